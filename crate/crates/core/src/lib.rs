//! Spatial domination for axis-parallel rectangles under Lp norms.
//!
//! Given rectangles `A`, `B` and `R`, [`dominates`] decides in `O(d)` whether
//! every point of `A` is strictly closer to every point of `R` than any point
//! of `B`. The decision is exact: it neither misses a domination (unlike the
//! min/max-distance test in [`minmax_dominates`]) nor reports a false one.
//!
//! ```
//! use spatial_dom::{dominates, minmax_dominates, LpNorm, Rect};
//!
//! let a = Rect::point(&[0.0, 2.0]).unwrap();
//! let b = Rect::point(&[0.0, 0.0]).unwrap();
//! let r = Rect::from_bounds(&[2.0, 2.0], &[10.0, 4.0]).unwrap();
//! assert!(dominates(&a, &b, &r, LpNorm::EUCLIDEAN).unwrap());
//! assert!(!minmax_dominates(&a, &b, &r, LpNorm::EUCLIDEAN).unwrap());
//! ```
//!
//! The crate also provides a bisector classifier ([`classify_halfspace`]), an
//! STR-packed tree with kNN / reverse-kNN candidate filtering ([`build_str`]),
//! and a JSON Lines dataset format with a seeded workload generator.

pub mod data_io;
pub mod domination;
pub mod error;
pub mod geom;
pub mod halfspace;
pub mod index;
pub mod rng;

pub use data_io::{generate, read_jsonl, write_jsonl, DataError, DatasetRecord, Distribution, GeneratorConfig};
pub use domination::{
    corner_oracle_dominates, corner_oracle_dominates_with_cap, corner_oracle_margin_with_cap, dominates,
    domination_margin, minmax_dominates, sample_falsify, Counterexample, Criterion, DominationVerdict,
    DEFAULT_CORNER_CAP,
};
pub use error::{Error, Result};
pub use geom::{
    interval_max_dist, interval_min_dist, point_dist, rect_max_dist, rect_max_dist_pow, rect_min_dist,
    rect_min_dist_pow, Interval, LpNorm, Point, Rect,
};
pub use halfspace::{classify_halfspace, HalfspaceClass};
pub use index::{
    build_str, knn_candidates, naive_knn_candidates, naive_rknn_candidates, rknn_candidates, Children, Entry,
    QueryStats, RTree, RTreeNode, DEFAULT_FANOUT,
};
pub use rng::SeededRng;
