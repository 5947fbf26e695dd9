//! Newton polygons: the lower convex hull of coefficient valuations.
//!
//! Only coefficients distinguishable from 0 at working precision contribute
//! points; if any coefficient below the truncation order was skipped for that
//! reason the polygon is flagged provisional, because an exact-zero claim is
//! unprovable at finite precision.

use std::cmp::Ordering;
use std::fmt;

use super::{Series, SeriesError};

/// An exact rational slope, reduced, with positive denominator.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct Ratio {
    num: i64,
    den: i64,
}

impl Ratio {
    pub fn new(num: i64, den: i64) -> Ratio {
        assert!(den != 0, "zero denominator");
        let g = gcd_i64(num.unsigned_abs(), den.unsigned_abs()) as i64;
        let sign = if den < 0 { -1 } else { 1 };
        Ratio {
            num: sign * num / g,
            den: sign * den / g,
        }
    }

    pub fn num(&self) -> i64 {
        self.num
    }

    pub fn den(&self) -> i64 {
        self.den
    }

    pub fn is_negative(&self) -> bool {
        self.num < 0
    }
}

impl PartialOrd for Ratio {
    fn partial_cmp(&self, other: &Self) -> Option<Ordering> {
        Some(self.cmp(other))
    }
}

impl Ord for Ratio {
    fn cmp(&self, other: &Self) -> Ordering {
        (self.num as i128 * other.den as i128).cmp(&(other.num as i128 * self.den as i128))
    }
}

impl fmt::Display for Ratio {
    fn fmt(&self, out: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.den == 1 {
            write!(out, "{}", self.num)
        } else {
            write!(out, "{}/{}", self.num, self.den)
        }
    }
}

fn gcd_i64(mut a: u64, mut b: u64) -> u64 {
    if a == 0 {
        return b.max(1);
    }
    while b != 0 {
        let t = a % b;
        a = b;
        b = t;
    }
    a
}

/// One segment of the lower hull.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct Segment {
    pub slope: Ratio,
    pub length: usize,
}

/// Lower convex hull of `(degree, valuation)` points with strictly
/// increasing slopes.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct NewtonPolygon {
    pub vertices: Vec<(usize, u32)>,
    pub segments: Vec<Segment>,
    /// True when some coefficient below the truncation order was
    /// indistinguishable from 0 at precision N and therefore skipped.
    pub provisional: bool,
}

/// The Newton polygon of a series: hull of `{(k, val(coeff_k))}` over the
/// coefficients with valuation < N.
pub fn newton_polygon(f: &Series) -> Result<NewtonPolygon, SeriesError> {
    let n = f.ring().precision();
    let mut points: Vec<(usize, u32)> = Vec::new();
    let mut skipped = false;
    for k in 0..f.prec_t() {
        let v = f.coeff(k).valuation();
        if v < n {
            points.push((k, v));
        } else {
            skipped = true;
        }
    }
    if points.is_empty() {
        return Err(SeriesError::ZeroSeries);
    }
    let vertices = lower_hull(&points);
    let segments = vertices
        .windows(2)
        .map(|w| {
            let (d0, v0) = w[0];
            let (d1, v1) = w[1];
            Segment {
                slope: Ratio::new(v1 as i64 - v0 as i64, (d1 - d0) as i64),
                length: d1 - d0,
            }
        })
        .collect();
    Ok(NewtonPolygon {
        vertices,
        segments,
        provisional: skipped,
    })
}

/// Monotone-chain lower hull; input sorted by strictly increasing degree.
fn lower_hull(points: &[(usize, u32)]) -> Vec<(usize, u32)> {
    let mut hull: Vec<(usize, u32)> = Vec::new();
    for &p in points {
        while hull.len() >= 2 {
            let a = hull[hull.len() - 2];
            let b = hull[hull.len() - 1];
            // keep b only if it turns strictly left of segment a->p
            let cross = (b.0 as i128 - a.0 as i128) * (p.1 as i128 - a.1 as i128)
                - (b.1 as i128 - a.1 as i128) * (p.0 as i128 - a.0 as i128);
            if cross <= 0 {
                hull.pop();
            } else {
                break;
            }
        }
        hull.push(p);
    }
    hull
}
