#![allow(dead_code)]

use spatial_dom::{domination_margin, Interval, LpNorm, Rect, SeededRng};

pub const NORMS: [f64; 3] = [1.0, 2.0, 3.0];

/// Random rectangles, points and sub-rectangles for randomized suites.
pub struct Gen {
    pub rng: SeededRng,
}

impl Gen {
    pub fn new(seed: u64) -> Self {
        Gen {
            rng: SeededRng::new(seed),
        }
    }

    pub fn coord(&mut self) -> f64 {
        self.rng.uniform(-10.0, 10.0)
    }

    pub fn interval_near(&mut self, center: f64, spread: f64) -> Interval {
        let c = center + self.rng.uniform(-spread, spread);
        let len = if self.rng.below(5) == 0 {
            0.0
        } else {
            self.rng.uniform(0.0, 4.0)
        };
        Interval::new(c - 0.5 * len, c + 0.5 * len).unwrap()
    }

    pub fn rect(&mut self, d: usize) -> Rect {
        let dims = (0..d)
            .map(|_| {
                let c = self.coord();
                self.interval_near(c, 0.0)
            })
            .collect();
        Rect::new(dims).unwrap()
    }

    pub fn rect_near(&mut self, center: &[f64], spread: f64) -> Rect {
        Rect::new(center.iter().map(|&c| self.interval_near(c, spread)).collect()).unwrap()
    }

    pub fn point(&mut self, d: usize) -> Vec<f64> {
        (0..d).map(|_| self.coord()).collect()
    }

    /// A mix of unrelated rectangles and configurations where `a` sits
    /// close to `r` and `b` farther out, so both verdicts are common.
    pub fn instance(&mut self, d: usize) -> (Rect, Rect, Rect) {
        match self.rng.below(3) {
            0 => (self.rect(d), self.rect(d), self.rect(d)),
            _ => {
                let r = self.rect(d);
                let c = r.center();
                let a = self.rect_near(&c, 4.0);
                let far: Vec<f64> = c.iter().map(|&x| x + self.rng.uniform(-14.0, 14.0)).collect();
                let b = self.rect_near(&far, 2.0);
                (a, b, r)
            }
        }
    }

    /// A random sub-rectangle of `r`.
    pub fn shrink(&mut self, r: &Rect) -> Rect {
        let dims = r
            .intervals()
            .iter()
            .map(|iv| {
                let x = self.rng.uniform(iv.lo(), iv.hi());
                let y = self.rng.uniform(iv.lo(), iv.hi());
                Interval::new(x.min(y), x.max(y)).unwrap()
            })
            .collect();
        Rect::new(dims).unwrap()
    }

    pub fn norm(&mut self) -> LpNorm {
        LpNorm::new(NORMS[self.rng.below(3) as usize]).unwrap()
    }
}

/// Magnitude of the quantities summed into the margin; used to scale tolerances.
pub fn margin_scale(a: &Rect, b: &Rect, r: &Rect, norm: LpNorm) -> f64 {
    let mut s = 0.0;
    for ((a, b), r) in a.intervals().iter().zip(b.intervals()).zip(r.intervals()) {
        for x in [r.lo(), r.hi()] {
            s += norm.pow(a.max_dist(x)) + norm.pow(b.min_dist(x));
        }
    }
    s.max(f64::MIN_POSITIVE)
}

/// True when the margin is too close to zero for a floating-point verdict
/// comparison to be meaningful.
pub fn knife_edge(a: &Rect, b: &Rect, r: &Rect, norm: LpNorm) -> bool {
    let m = domination_margin(a, b, r, norm).unwrap().margin;
    m.abs() < 1e-9 || m.abs() < 1e-12 * margin_scale(a, b, r, norm)
}

/// Draws instances until one is clear of the knife edge.
pub fn clear_instance(g: &mut Gen, d: usize, norm: LpNorm) -> (Rect, Rect, Rect) {
    loop {
        let (a, b, r) = g.instance(d);
        if !knife_edge(&a, &b, &r, norm) {
            return (a, b, r);
        }
    }
}

pub fn map_rect(r: &Rect, f: impl Fn(usize, f64, f64) -> (f64, f64)) -> Rect {
    Rect::new(
        r.intervals()
            .iter()
            .enumerate()
            .map(|(i, iv)| {
                let (x, y) = f(i, iv.lo(), iv.hi());
                Interval::new(x.min(y), x.max(y)).unwrap()
            })
            .collect(),
    )
    .unwrap()
}

pub fn permute(r: &Rect, perm: &[usize]) -> Rect {
    Rect::new(perm.iter().map(|&i| *r.interval(i)).collect()).unwrap()
}

pub fn random_permutation(rng: &mut SeededRng, d: usize) -> Vec<usize> {
    let mut p: Vec<usize> = (0..d).collect();
    for i in (1..d).rev() {
        let j = rng.below(i as u64 + 1) as usize;
        p.swap(i, j);
    }
    p
}
