//! Spatial domination of rectangles.
//!
//! `A` dominates `B` with respect to `R` when every point of `A` is strictly
//! closer to every point of `R` than any point of `B` is. The decision
//! decomposes per dimension: for each axis take the larger of the two
//! endpoint terms `MaxDist(A_i, r)^p - MinDist(B_i, r)^p` with
//! `r ∈ {R_i.lo, R_i.hi}`, sum them, and compare the sum against zero. That
//! test is both sound and complete and costs `Θ(d)`.
//!
//! Alongside it live the classic min/max-distance test (sound but
//! incomplete), an exponential corner-enumeration oracle, and a randomized
//! falsifier that samples point triples directly.

use std::fmt;
use std::str::FromStr;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::geom::{
    check_dims, max2, point_dist_pow, rect_max_dist_pow, rect_min_dist_pow, Interval, LpNorm, Point, Rect,
};
use crate::rng::SeededRng;

/// Default largest dimensionality the corner oracle accepts (2^20 corners).
pub const DEFAULT_CORNER_CAP: usize = 20;

/// Outcome of the domination test together with its diagnostic sum.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct DominationVerdict {
    pub dominated: bool,
    /// Sum of the per-dimension terms, in units of distance^p.
    pub margin: f64,
    pub per_dim_terms: Vec<f64>,
}

/// Witness triple violating domination: `dist_a >= dist_b`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Counterexample {
    pub a: Point,
    pub b: Point,
    pub r: Point,
    pub dist_a: f64,
    pub dist_b: f64,
}

#[inline(always)]
fn dim_term_with(a: &Interval, b: &Interval, r: &Interval, pow: impl Fn(f64) -> f64) -> f64 {
    let at_lo = pow(a.max_dist(r.lo())) - pow(b.min_dist(r.lo()));
    let at_hi = pow(a.max_dist(r.hi())) - pow(b.min_dist(r.hi()));
    let term = max2(at_lo, at_hi);
    debug_assert!(!term.is_nan());
    term
}

fn dim_term(a: &Interval, b: &Interval, r: &Interval, norm: LpNorm) -> f64 {
    dim_term_with(a, b, r, |x| norm.pow(x))
}

#[inline(always)]
fn fold_terms(a: &Rect, b: &Rect, r: &Rect, pow: impl Fn(f64) -> f64 + Copy) -> f64 {
    a.intervals()
        .iter()
        .zip(b.intervals())
        .zip(r.intervals())
        .fold(0.0, |sum, ((a, b), r)| sum + dim_term_with(a, b, r, pow))
}

fn check_triple(a: &Rect, b: &Rect, r: &Rect) -> Result<()> {
    check_dims(a.dims(), b.dims())?;
    check_dims(a.dims(), r.dims())
}

/// Domination sum for operands already known to share dimensionality.
#[inline]
pub(crate) fn margin_unchecked(a: &Rect, b: &Rect, r: &Rect, norm: LpNorm) -> f64 {
    let p = norm.p();
    if p == 2.0 {
        fold_terms(a, b, r, |x| x * x)
    } else if p == 1.0 {
        fold_terms(a, b, r, |x| x)
    } else {
        fold_terms(a, b, r, |x| x.powf(p))
    }
}

#[inline]
pub(crate) fn minmax_unchecked(a: &Rect, b: &Rect, r: &Rect, norm: LpNorm) -> bool {
    // Powered comparison is order-equivalent to comparing the true distances.
    let far = rect_max_dist_pow(a, r, norm).unwrap_or(f64::INFINITY);
    let near = rect_min_dist_pow(b, r, norm).unwrap_or(f64::NEG_INFINITY);
    far < near
}

/// Evaluates the domination sum and reports every per-dimension term.
pub fn domination_margin(a: &Rect, b: &Rect, r: &Rect, norm: LpNorm) -> Result<DominationVerdict> {
    check_triple(a, b, r)?;
    let per_dim_terms: Vec<f64> = a
        .intervals()
        .iter()
        .zip(b.intervals())
        .zip(r.intervals())
        .map(|((a, b), r)| dim_term(a, b, r, norm))
        .collect();
    // Same left-to-right accumulation as `margin_unchecked`.
    let margin = per_dim_terms.iter().fold(0.0, |sum, t| sum + t);
    Ok(DominationVerdict {
        dominated: margin < 0.0,
        margin,
        per_dim_terms,
    })
}

/// Whether `a` dominates `b` with respect to `r`.
pub fn dominates(a: &Rect, b: &Rect, r: &Rect, norm: LpNorm) -> Result<bool> {
    check_triple(a, b, r)?;
    Ok(margin_unchecked(a, b, r, norm) < 0.0)
}

/// The min/max-distance test: `MaxDist(A, R) < MinDist(B, R)`.
///
/// Sound, but misses every configuration where the two extremes are
/// attained at different locations of `R`.
pub fn minmax_dominates(a: &Rect, b: &Rect, r: &Rect, norm: LpNorm) -> Result<bool> {
    check_triple(a, b, r)?;
    Ok(minmax_unchecked(a, b, r, norm))
}

/// Largest corner sum over all `2^d` corners of `r`, bounded by `cap` dimensions.
pub fn corner_oracle_margin_with_cap(a: &Rect, b: &Rect, r: &Rect, norm: LpNorm, cap: usize) -> Result<f64> {
    check_triple(a, b, r)?;
    let dims = r.dims();
    if dims > cap || dims >= u64::BITS as usize {
        return Err(Error::CornerCapExceeded { dims, cap });
    }
    let (ai, bi, ri) = (a.intervals(), b.intervals(), r.intervals());
    let mut worst = f64::NEG_INFINITY;
    for mask in 0..(1u64 << dims) {
        let mut sum = 0.0;
        for i in 0..dims {
            let corner = if mask >> i & 1 == 1 { ri[i].hi() } else { ri[i].lo() };
            sum += norm.pow(ai[i].max_dist(corner)) - norm.pow(bi[i].min_dist(corner));
        }
        worst = worst.max(sum);
    }
    Ok(worst)
}

/// Corner enumeration verdict with an explicit dimension cap.
pub fn corner_oracle_dominates_with_cap(a: &Rect, b: &Rect, r: &Rect, norm: LpNorm, cap: usize) -> Result<bool> {
    corner_oracle_margin_with_cap(a, b, r, norm, cap).map(|m| m < 0.0)
}

/// Decides domination by enumerating every corner of `r`. Exponential in `d`;
/// meant as a verification oracle.
pub fn corner_oracle_dominates(a: &Rect, b: &Rect, r: &Rect, norm: LpNorm) -> Result<bool> {
    corner_oracle_dominates_with_cap(a, b, r, norm, DEFAULT_CORNER_CAP)
}

fn sample_into(rng: &mut SeededRng, rect: &Rect, out: &mut [f64]) {
    for (x, iv) in out.iter_mut().zip(rect.intervals()) {
        *x = rng.uniform(iv.lo(), iv.hi());
    }
}

/// Searches for a point triple `a ∈ A, b ∈ B, r ∈ R` with `dist(a,r) >= dist(b,r)`.
///
/// Draws `n_samples` uniform triples (coordinates of `a`, then `b`, then `r`)
/// and returns the first violation. Finding none proves nothing; finding one
/// refutes domination.
pub fn sample_falsify(
    a: &Rect,
    b: &Rect,
    r: &Rect,
    norm: LpNorm,
    n_samples: usize,
    seed: u64,
) -> Result<Option<Counterexample>> {
    check_triple(a, b, r)?;
    if n_samples == 0 {
        return Err(Error::NoSamples);
    }
    let d = a.dims();
    let mut rng = SeededRng::new(seed);
    let (mut pa, mut pb, mut pr) = (vec![0.0; d], vec![0.0; d], vec![0.0; d]);
    for _ in 0..n_samples {
        sample_into(&mut rng, a, &mut pa);
        sample_into(&mut rng, b, &mut pb);
        sample_into(&mut rng, r, &mut pr);
        let da = point_dist_pow(&pa, &pr, norm)?;
        let db = point_dist_pow(&pb, &pr, norm)?;
        if da >= db {
            return Ok(Some(Counterexample {
                a: Point::new(pa)?,
                b: Point::new(pb)?,
                r: Point::new(pr)?,
                dist_a: norm.root(da),
                dist_b: norm.root(db),
            }));
        }
    }
    Ok(None)
}

/// Which domination test drives candidate pruning.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Criterion {
    /// The complete per-dimension criterion.
    Eq2,
    /// The min/max-distance baseline.
    MinMax,
}

impl Criterion {
    pub const ALL: [Criterion; 2] = [Criterion::Eq2, Criterion::MinMax];

    pub fn name(self) -> &'static str {
        match self {
            Criterion::Eq2 => "eq2",
            Criterion::MinMax => "minmax",
        }
    }

    pub fn dominates(self, a: &Rect, b: &Rect, r: &Rect, norm: LpNorm) -> Result<bool> {
        check_triple(a, b, r)?;
        Ok(self.dominates_unchecked(a, b, r, norm))
    }

    #[inline]
    pub(crate) fn dominates_unchecked(self, a: &Rect, b: &Rect, r: &Rect, norm: LpNorm) -> bool {
        match self {
            Criterion::Eq2 => margin_unchecked(a, b, r, norm) < 0.0,
            Criterion::MinMax => minmax_unchecked(a, b, r, norm),
        }
    }
}

impl fmt::Display for Criterion {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

impl FromStr for Criterion {
    type Err = String;

    fn from_str(s: &str) -> std::result::Result<Self, Self::Err> {
        match s {
            "eq2" => Ok(Criterion::Eq2),
            "minmax" => Ok(Criterion::MinMax),
            other => Err(format!("unknown criterion `{other}` (expected eq2 or minmax)")),
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn rect(bounds: &[(f64, f64)]) -> Rect {
        Rect::new(bounds.iter().map(|&(lo, hi)| Interval::new(lo, hi).unwrap()).collect()).unwrap()
    }

    fn golden() -> (Rect, Rect, Rect) {
        (
            Rect::point(&[0.0, 2.0]).unwrap(),
            Rect::point(&[0.0, 0.0]).unwrap(),
            rect(&[(2.0, 10.0), (2.0, 4.0)]),
        )
    }

    #[test]
    fn golden_example_margin() {
        let (a, b, r) = golden();
        let v = domination_margin(&a, &b, &r, LpNorm::EUCLIDEAN).unwrap();
        assert!(v.dominated);
        assert_eq!(v.margin, -4.0);
        assert_eq!(v.per_dim_terms, vec![0.0, -4.0]);
        assert!(dominates(&a, &b, &r, LpNorm::EUCLIDEAN).unwrap());
    }

    #[test]
    fn golden_example_second_axis_both_ways() {
        // The worked example evaluates the second axis at r = 10 instead of
        // its true upper endpoint 4; both evaluations give a maximum of -4.
        let a = Interval::point(2.0).unwrap();
        let b = Interval::point(0.0).unwrap();
        let at = |r: f64| LpNorm::EUCLIDEAN.pow(a.max_dist(r)) - LpNorm::EUCLIDEAN.pow(b.min_dist(r));
        assert_eq!(at(2.0), -4.0);
        assert_eq!(at(4.0), -12.0);
        assert_eq!(at(10.0), -36.0);
        assert_eq!(at(2.0).max(at(4.0)), at(2.0).max(at(10.0)));
    }

    #[test]
    fn swapped_golden_is_not_dominated() {
        let (a, b, r) = golden();
        let v = domination_margin(&b, &a, &r, LpNorm::EUCLIDEAN).unwrap();
        assert!(!v.dominated);
        assert!(!corner_oracle_dominates(&b, &a, &r, LpNorm::EUCLIDEAN).unwrap());
    }

    #[test]
    fn self_never_dominates() {
        let a = rect(&[(0.0, 1.0), (3.0, 5.0)]);
        let r = rect(&[(-2.0, 7.0), (0.0, 0.5)]);
        for p in [1.0, 2.0, 3.5] {
            let v = domination_margin(&a, &a, &r, LpNorm::new(p).unwrap()).unwrap();
            assert!(!v.dominated);
            assert!(v.margin >= 0.0);
        }
    }

    #[test]
    fn one_dimensional_points() {
        let a = Rect::point(&[0.0]).unwrap();
        let b = Rect::point(&[5.0]).unwrap();
        let r = Rect::point(&[1.0]).unwrap();
        assert!(dominates(&a, &b, &r, LpNorm::MANHATTAN).unwrap());
    }

    #[test]
    fn minmax_cases() {
        let (a, b, r) = golden();
        assert!(!minmax_dominates(&a, &b, &r, LpNorm::EUCLIDEAN).unwrap());

        let unit = rect(&[(0.0, 1.0), (0.0, 1.0)]);
        let far = rect(&[(10.0, 11.0), (10.0, 11.0)]);
        assert!(minmax_dominates(&unit, &far, &unit, LpNorm::EUCLIDEAN).unwrap());
        assert!(!minmax_dominates(&unit, &unit, &unit, LpNorm::EUCLIDEAN).unwrap());
    }

    #[test]
    fn corner_oracle_golden_max_at_min_corner() {
        let (a, b, r) = golden();
        let m = corner_oracle_margin_with_cap(&a, &b, &r, LpNorm::EUCLIDEAN, 20).unwrap();
        assert_eq!(m, -4.0);
        assert!(corner_oracle_dominates(&a, &b, &r, LpNorm::EUCLIDEAN).unwrap());
    }

    #[test]
    fn corner_oracle_cap() {
        let r = Rect::point(&[0.0; 5]).unwrap();
        assert_eq!(
            corner_oracle_dominates_with_cap(&r, &r, &r, LpNorm::EUCLIDEAN, 4),
            Err(Error::CornerCapExceeded { dims: 5, cap: 4 })
        );
        assert!(corner_oracle_dominates_with_cap(&r, &r, &r, LpNorm::EUCLIDEAN, 5).is_ok());
    }

    #[test]
    fn dimension_mismatch_is_reported() {
        let (a, b, _) = golden();
        let r1 = rect(&[(0.0, 1.0)]);
        let err = Error::DimensionMismatch { left: 2, right: 1 };
        assert_eq!(domination_margin(&a, &b, &r1, LpNorm::EUCLIDEAN), Err(err.clone()));
        assert_eq!(dominates(&a, &b, &r1, LpNorm::EUCLIDEAN), Err(err.clone()));
        assert_eq!(minmax_dominates(&a, &b, &r1, LpNorm::EUCLIDEAN), Err(err.clone()));
        assert_eq!(
            corner_oracle_dominates(&a, &b, &r1, LpNorm::EUCLIDEAN),
            Err(err.clone())
        );
        assert_eq!(sample_falsify(&a, &b, &r1, LpNorm::EUCLIDEAN, 1, 0), Err(err));
    }

    #[test]
    fn falsifier_finds_nothing_on_golden() {
        let (a, b, r) = golden();
        assert_eq!(
            sample_falsify(&a, &b, &r, LpNorm::EUCLIDEAN, 100_000, 42).unwrap(),
            None
        );
    }

    #[test]
    fn falsifier_refutes_swapped_golden() {
        let (a, b, r) = golden();
        let cx = sample_falsify(&b, &a, &r, LpNorm::EUCLIDEAN, 100_000, 42)
            .unwrap()
            .expect("swapped instance must be refuted");
        assert!(cx.dist_a >= cx.dist_b);
        assert!(r.contains_point(cx.r.coords()));
        // Hand-checked witness at r = (2, 2): dist(b', r) = sqrt(8) > dist(a', r) = 2.
        let rr = Point::new(vec![2.0, 2.0]).unwrap();
        let from_b = Point::new(vec![0.0, 0.0]).unwrap();
        let from_a = Point::new(vec![0.0, 2.0]).unwrap();
        assert_eq!(crate::geom::point_dist(&from_a, &rr, LpNorm::EUCLIDEAN).unwrap(), 2.0);
        assert_eq!(
            crate::geom::point_dist(&from_b, &rr, LpNorm::EUCLIDEAN).unwrap(),
            8f64.sqrt()
        );
    }

    #[test]
    fn falsifier_refutes_self() {
        let a = rect(&[(0.0, 1.0), (0.0, 1.0)]);
        let r = rect(&[(2.0, 3.0), (0.0, 1.0)]);
        let cx = sample_falsify(&a, &a, &r, LpNorm::EUCLIDEAN, 1_000, 9).unwrap();
        assert!(cx.is_some());
        assert_eq!(
            sample_falsify(&a, &a, &r, LpNorm::EUCLIDEAN, 0, 9),
            Err(Error::NoSamples)
        );
    }

    #[test]
    fn falsifier_is_deterministic() {
        let a = rect(&[(0.0, 1.0), (0.0, 1.0)]);
        let r = rect(&[(2.0, 3.0), (0.0, 1.0)]);
        let x = sample_falsify(&a, &a, &r, LpNorm::EUCLIDEAN, 1_000, 9).unwrap();
        let y = sample_falsify(&a, &a, &r, LpNorm::EUCLIDEAN, 1_000, 9).unwrap();
        assert_eq!(x, y);
    }

    #[test]
    fn criterion_parse() {
        assert_eq!("eq2".parse::<Criterion>(), Ok(Criterion::Eq2));
        assert_eq!("minmax".parse::<Criterion>(), Ok(Criterion::MinMax));
        assert!("corner".parse::<Criterion>().is_err());
    }
}
