//! Classifying a rectangle against the bisector of two points.

use serde::{Deserialize, Serialize};

use crate::domination::margin_unchecked;
use crate::error::{Error, Result};
use crate::geom::{check_dims, LpNorm, Point, Rect};

/// Where a rectangle lies relative to the set of points equidistant from `a` and `b`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub enum HalfspaceClass {
    /// Every point of the rectangle is strictly closer to `a`.
    FullyCloserToA,
    /// The rectangle touches or crosses the bisector.
    Intersecting,
    /// Every point of the rectangle is strictly closer to `b`.
    FullyCloserToB,
}

/// Three-way classification of `r` against the bisector of `a` and `b`.
///
/// Under L2 the bisector is a hyperplane; for other norms the same two
/// point-domination tests still separate the three cases. A rectangle
/// touching the bisector is `Intersecting`.
pub fn classify_halfspace(a: &Point, b: &Point, r: &Rect, norm: LpNorm) -> Result<HalfspaceClass> {
    check_dims(a.dims(), b.dims())?;
    check_dims(a.dims(), r.dims())?;
    if a == b {
        return Err(Error::DegenerateBisector);
    }
    let (ra, rb) = (a.to_rect(), b.to_rect());
    Ok(if margin_unchecked(&ra, &rb, r, norm) < 0.0 {
        HalfspaceClass::FullyCloserToA
    } else if margin_unchecked(&rb, &ra, r, norm) < 0.0 {
        HalfspaceClass::FullyCloserToB
    } else {
        HalfspaceClass::Intersecting
    })
}
