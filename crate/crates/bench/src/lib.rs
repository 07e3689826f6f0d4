//! Seeded fixtures shared by the benchmarks.

use spatial_dom::{generate, Entry, GeneratorConfig, Interval, Rect, SeededRng};

/// A random rectangle inside the unit cube with sides up to 0.1.
pub fn unit_rect(rng: &mut SeededRng, d: usize) -> Rect {
    let dims = (0..d)
        .map(|_| {
            let lo = rng.uniform(0.0, 1.0);
            Interval::new(lo, lo + rng.uniform(0.0, 0.1)).unwrap()
        })
        .collect();
    Rect::new(dims).unwrap()
}

/// `(a, b, r)` drawn in that order from `seed`.
pub fn triple(d: usize, seed: u64) -> (Rect, Rect, Rect) {
    let mut rng = SeededRng::new(seed);
    (unit_rect(&mut rng, d), unit_rect(&mut rng, d), unit_rect(&mut rng, d))
}

/// Uniform dataset plus a query drawn with the next seed.
pub fn workload(n: usize, d: usize, seed: u64) -> (Vec<Entry>, Rect) {
    let config = GeneratorConfig {
        n,
        d,
        seed,
        ..GeneratorConfig::default()
    };
    let entries = generate(&config).unwrap();
    let query = generate(&GeneratorConfig {
        n: 1,
        seed: seed.wrapping_add(1),
        ..config
    })
    .unwrap()
    .remove(0)
    .mbr;
    (entries, query)
}
