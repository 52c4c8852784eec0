//! Closed real intervals, the basic building block for focal elements,
//! search-space bounds and subdomain boxes.

use serde::{Deserialize, Serialize};
use thiserror::Error;

#[derive(Debug, Error)]
pub enum IntervalError {
    #[error("interval bounds are not ordered: lo = {lo}, hi = {hi}")]
    Unordered { lo: f64, hi: f64 },
    #[error("interval bounds are not finite: lo = {lo}, hi = {hi}")]
    NotFinite { lo: f64, hi: f64 },
}

/// A closed interval `[lo, hi]` with `lo <= hi`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Interval {
    pub lo: f64,
    pub hi: f64,
}

impl Interval {
    pub fn new(lo: f64, hi: f64) -> Result<Self, IntervalError> {
        if !lo.is_finite() || !hi.is_finite() {
            return Err(IntervalError::NotFinite { lo, hi });
        }
        if lo > hi {
            return Err(IntervalError::Unordered { lo, hi });
        }
        Ok(Self { lo, hi })
    }

    /// Builds the interval from two bounds in either order.
    pub fn from_unordered(a: f64, b: f64) -> Result<Self, IntervalError> {
        Self::new(a.min(b), a.max(b))
    }

    pub fn width(&self) -> f64 {
        self.hi - self.lo
    }

    pub fn midpoint(&self) -> f64 {
        0.5 * (self.lo + self.hi)
    }

    pub fn contains(&self, x: f64) -> bool {
        self.lo <= x && x <= self.hi
    }

    /// True when the two closed intervals share at least one point.
    pub fn intersects(&self, other: &Interval) -> bool {
        self.lo <= other.hi && other.lo <= self.hi
    }

    /// Rescales the width about the midpoint by `factor >= 0`.
    pub fn scale_about_midpoint(&self, factor: f64) -> Interval {
        let mid = self.midpoint();
        let half = 0.5 * self.width() * factor;
        Interval {
            lo: mid - half,
            hi: mid + half,
        }
    }

    /// Clamps `x` into the interval.
    pub fn clamp(&self, x: f64) -> f64 {
        x.clamp(self.lo, self.hi)
    }
}

/// Normalized volume of `boxed` relative to `domain` (product of width
/// ratios). Zero-width domain coordinates contribute a factor of 1.
pub fn normalized_volume(boxed: &[Interval], domain: &[Interval]) -> f64 {
    boxed
        .iter()
        .zip(domain)
        .map(|(b, d)| {
            if d.width() > 0.0 {
                b.width() / d.width()
            } else {
                1.0
            }
        })
        .product()
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn rejects_unordered_bounds() {
        assert!(Interval::new(2.0, 1.0).is_err());
        assert!(Interval::new(f64::NAN, 1.0).is_err());
    }

    #[test]
    fn from_unordered_sorts() {
        let iv = Interval::from_unordered(3.0, -1.0).unwrap();
        assert_eq!(iv.lo, -1.0);
        assert_eq!(iv.hi, 3.0);
    }

    #[test]
    fn midpoint_scaling() {
        let iv = Interval::new(2.0, 6.0).unwrap();
        let scaled = iv.scale_about_midpoint(0.5);
        assert_eq!(scaled.lo, 3.0);
        assert_eq!(scaled.hi, 5.0);
        let identity = iv.scale_about_midpoint(1.0);
        assert_eq!(identity.lo, 2.0);
        assert_eq!(identity.hi, 6.0);
        let point = iv.scale_about_midpoint(0.0);
        assert_eq!(point.lo, point.hi);
    }

    #[test]
    fn intersection_is_inclusive() {
        let a = Interval::new(0.0, 1.0).unwrap();
        let b = Interval::new(1.0, 2.0).unwrap();
        assert!(a.intersects(&b));
        let c = Interval::new(1.0 + 1e-12, 2.0).unwrap();
        assert!(!a.intersects(&c));
    }
}
