//! Intervals, rectangles, points and the Lp distance primitives built on them.
//!
//! All rectangles are axis-parallel and closed. A rectangle whose intervals
//! are all degenerate (`lo == hi`) is a point, which is how point objects
//! take part in domination tests.

use std::fmt;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// A closed one-dimensional range `[lo, hi]`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct Interval {
    lo: f64,
    hi: f64,
}

impl Interval {
    /// Builds an interval, rejecting non-finite bounds and `lo > hi`.
    pub fn new(lo: f64, hi: f64) -> Result<Self> {
        if !lo.is_finite() || !hi.is_finite() {
            return Err(Error::NonFiniteInterval { lo, hi });
        }
        if lo > hi {
            return Err(Error::InvertedInterval { lo, hi });
        }
        Ok(Interval { lo, hi })
    }

    /// The degenerate interval `[v, v]`.
    pub fn point(v: f64) -> Result<Self> {
        Self::new(v, v)
    }

    #[inline]
    pub fn lo(&self) -> f64 {
        self.lo
    }

    #[inline]
    pub fn hi(&self) -> f64 {
        self.hi
    }

    #[inline]
    pub fn len(&self) -> f64 {
        self.hi - self.lo
    }

    #[inline]
    pub fn is_degenerate(&self) -> bool {
        self.lo == self.hi
    }

    #[inline]
    pub fn contains(&self, x: f64) -> bool {
        self.lo <= x && x <= self.hi
    }

    #[inline]
    pub fn contains_interval(&self, other: &Interval) -> bool {
        self.lo <= other.lo && other.hi <= self.hi
    }

    /// Smallest `|x - y|` over `y` in the interval.
    #[inline]
    pub fn min_dist(&self, x: f64) -> f64 {
        // Exactly one of the two differences is positive when x lies outside.
        max2(max2(self.lo - x, x - self.hi), 0.0)
    }

    /// Largest `|x - y|` over `y` in the interval; always attained at an endpoint.
    #[inline]
    pub fn max_dist(&self, x: f64) -> f64 {
        // lo <= hi, so the larger difference is never negative.
        max2(x - self.lo, self.hi - x)
    }

    /// Smallest interval covering both.
    pub fn union(&self, other: &Interval) -> Interval {
        Interval {
            lo: self.lo.min(other.lo),
            hi: self.hi.max(other.hi),
        }
    }
}

impl<'de> Deserialize<'de> for Interval {
    fn deserialize<D: serde::Deserializer<'de>>(deserializer: D) -> Result<Self, D::Error> {
        let (lo, hi) = <(f64, f64)>::deserialize(deserializer)?;
        Interval::new(lo, hi).map_err(serde::de::Error::custom)
    }
}

impl fmt::Display for Interval {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "[{}, {}]", self.lo, self.hi)
    }
}

/// Minimum distance between an interval and a scalar.
#[inline]
pub fn interval_min_dist(interval: &Interval, x: f64) -> f64 {
    interval.min_dist(x)
}

/// Maximum distance between an interval and a scalar.
#[inline]
pub fn interval_max_dist(interval: &Interval, x: f64) -> f64 {
    interval.max_dist(x)
}

/// A point in `d`-dimensional space with finite coordinates.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct Point(Vec<f64>);

impl Point {
    pub fn new(coords: Vec<f64>) -> Result<Self> {
        if coords.is_empty() {
            return Err(Error::ZeroDimensions);
        }
        if let Some((index, &value)) = coords.iter().enumerate().find(|(_, v)| !v.is_finite()) {
            return Err(Error::NonFiniteCoordinate { index, value });
        }
        Ok(Point(coords))
    }

    #[inline]
    pub fn dims(&self) -> usize {
        self.0.len()
    }

    #[inline]
    pub fn coords(&self) -> &[f64] {
        &self.0
    }

    pub fn into_coords(self) -> Vec<f64> {
        self.0
    }

    /// The degenerate rectangle holding only this point.
    pub fn to_rect(&self) -> Rect {
        Rect(self.0.iter().map(|&v| Interval { lo: v, hi: v }).collect())
    }
}

impl<'de> Deserialize<'de> for Point {
    fn deserialize<D: serde::Deserializer<'de>>(deserializer: D) -> Result<Self, D::Error> {
        let coords = Vec::<f64>::deserialize(deserializer)?;
        Point::new(coords).map_err(serde::de::Error::custom)
    }
}

/// An axis-parallel rectangle given by one closed interval per dimension.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct Rect(Vec<Interval>);

impl Rect {
    pub fn new(dims: Vec<Interval>) -> Result<Self> {
        if dims.is_empty() {
            return Err(Error::ZeroDimensions);
        }
        Ok(Rect(dims))
    }

    /// Builds a rectangle from its lower and upper corners.
    pub fn from_bounds(min: &[f64], max: &[f64]) -> Result<Self> {
        if min.len() != max.len() {
            return Err(Error::DimensionMismatch {
                left: min.len(),
                right: max.len(),
            });
        }
        let dims = min
            .iter()
            .zip(max)
            .map(|(&lo, &hi)| Interval::new(lo, hi))
            .collect::<Result<Vec<_>>>()?;
        Rect::new(dims)
    }

    /// The degenerate rectangle at `coords`.
    pub fn point(coords: &[f64]) -> Result<Self> {
        Ok(Point::new(coords.to_vec())?.to_rect())
    }

    #[inline]
    pub fn dims(&self) -> usize {
        self.0.len()
    }

    #[inline]
    pub fn intervals(&self) -> &[Interval] {
        &self.0
    }

    #[inline]
    pub fn interval(&self, dim: usize) -> &Interval {
        &self.0[dim]
    }

    pub fn min_corner(&self) -> Vec<f64> {
        self.0.iter().map(Interval::lo).collect()
    }

    pub fn max_corner(&self) -> Vec<f64> {
        self.0.iter().map(Interval::hi).collect()
    }

    pub fn center(&self) -> Vec<f64> {
        self.0.iter().map(|iv| iv.lo + 0.5 * (iv.hi - iv.lo)).collect()
    }

    pub fn is_point(&self) -> bool {
        self.0.iter().all(Interval::is_degenerate)
    }

    /// Converts a degenerate rectangle back into a point.
    pub fn as_point(&self) -> Option<Point> {
        self.is_point().then(|| Point(self.min_corner()))
    }

    /// Componentwise interval containment of `other` in `self`.
    pub fn contains_rect(&self, other: &Rect) -> bool {
        self.dims() == other.dims() && self.0.iter().zip(&other.0).all(|(a, b)| a.contains_interval(b))
    }

    pub fn contains_point(&self, p: &[f64]) -> bool {
        self.dims() == p.len() && self.0.iter().zip(p).all(|(iv, &x)| iv.contains(x))
    }

    /// Smallest rectangle covering both. Panics on a dimension mismatch.
    pub fn union(&self, other: &Rect) -> Rect {
        assert_eq!(
            self.dims(),
            other.dims(),
            "union of rectangles with different dimensionality"
        );
        Rect(self.0.iter().zip(&other.0).map(|(a, b)| a.union(b)).collect())
    }

    /// The corner selecting `hi` in every dimension whose bit is set in `mask`.
    pub fn corner(&self, mask: u64) -> Vec<f64> {
        self.0
            .iter()
            .enumerate()
            .map(|(i, iv)| if mask >> i & 1 == 1 { iv.hi } else { iv.lo })
            .collect()
    }
}

impl<'de> Deserialize<'de> for Rect {
    fn deserialize<D: serde::Deserializer<'de>>(deserializer: D) -> Result<Self, D::Error> {
        let dims = Vec::<Interval>::deserialize(deserializer)?;
        Rect::new(dims).map_err(serde::de::Error::custom)
    }
}

impl From<Point> for Rect {
    fn from(p: Point) -> Self {
        p.to_rect()
    }
}

impl From<&Point> for Rect {
    fn from(p: &Point) -> Self {
        p.to_rect()
    }
}

/// The order `p` of an Lp norm, any finite real `p >= 1`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
#[serde(transparent)]
pub struct LpNorm(f64);

impl LpNorm {
    pub const MANHATTAN: LpNorm = LpNorm(1.0);
    pub const EUCLIDEAN: LpNorm = LpNorm(2.0);

    pub fn new(p: f64) -> Result<Self> {
        if p.is_finite() && p >= 1.0 {
            Ok(LpNorm(p))
        } else {
            Err(Error::InvalidNorm(p))
        }
    }

    #[inline]
    pub fn p(&self) -> f64 {
        self.0
    }

    /// `x^p` for a non-negative `x`.
    #[inline]
    pub fn pow(&self, x: f64) -> f64 {
        debug_assert!(x >= 0.0);
        if self.0 == 2.0 {
            x * x
        } else if self.0 == 1.0 {
            x
        } else {
            x.powf(self.0)
        }
    }

    /// `x^(1/p)`, the inverse of [`LpNorm::pow`].
    #[inline]
    pub fn root(&self, x: f64) -> f64 {
        if self.0 == 2.0 {
            x.sqrt()
        } else if self.0 == 1.0 {
            x
        } else {
            x.powf(self.0.recip())
        }
    }
}

impl<'de> Deserialize<'de> for LpNorm {
    fn deserialize<D: serde::Deserializer<'de>>(deserializer: D) -> Result<Self, D::Error> {
        LpNorm::new(f64::deserialize(deserializer)?).map_err(serde::de::Error::custom)
    }
}

impl fmt::Display for LpNorm {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "L{}", self.0)
    }
}

#[inline]
pub(crate) fn check_dims(left: usize, right: usize) -> Result<()> {
    if left == right {
        Ok(())
    } else {
        Err(Error::DimensionMismatch { left, right })
    }
}

/// `Σ |a_i - b_i|^p`, the p-th power of the Lp distance.
pub fn point_dist_pow(a: &[f64], b: &[f64], norm: LpNorm) -> Result<f64> {
    check_dims(a.len(), b.len())?;
    Ok(a.iter().zip(b).map(|(x, y)| norm.pow((x - y).abs())).sum())
}

/// Lp distance between two points.
pub fn point_dist(a: &Point, b: &Point, norm: LpNorm) -> Result<f64> {
    point_dist_pow(a.coords(), b.coords(), norm).map(|s| norm.root(s))
}

/// p-th power of the minimum Lp distance between two rectangles.
pub fn rect_min_dist_pow(a: &Rect, b: &Rect, norm: LpNorm) -> Result<f64> {
    check_dims(a.dims(), b.dims())?;
    Ok(a.0
        .iter()
        .zip(&b.0)
        .map(|(x, y)| norm.pow((y.lo - x.hi).max(x.lo - y.hi).max(0.0)))
        .sum())
}

/// p-th power of the maximum Lp distance between two rectangles.
pub fn rect_max_dist_pow(a: &Rect, b: &Rect, norm: LpNorm) -> Result<f64> {
    check_dims(a.dims(), b.dims())?;
    Ok(a.0
        .iter()
        .zip(&b.0)
        .map(|(x, y)| norm.pow((x.lo - y.hi).abs().max((x.hi - y.lo).abs())))
        .sum())
}

/// Minimum Lp distance between any point of `a` and any point of `b`.
pub fn rect_min_dist(a: &Rect, b: &Rect, norm: LpNorm) -> Result<f64> {
    rect_min_dist_pow(a, b, norm).map(|s| norm.root(s))
}

/// Maximum Lp distance between any point of `a` and any point of `b`.
pub fn rect_max_dist(a: &Rect, b: &Rect, norm: LpNorm) -> Result<f64> {
    rect_max_dist_pow(a, b, norm).map(|s| norm.root(s))
}

/// Branch-free maximum for finite operands; skips the NaN handling of `f64::max`.
#[inline(always)]
pub(crate) fn max2(a: f64, b: f64) -> f64 {
    if a > b {
        a
    } else {
        b
    }
}
