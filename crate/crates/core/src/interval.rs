use std::cmp::Ordering;
use std::fmt;

use crate::error::{Error, Result};

/// A closed interval `[lo, hi]` on the real line.
///
/// Degenerate intervals (`lo == hi`) are permitted and represent single
/// points. Bounds are always finite.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Interval {
    lo: f64,
    hi: f64,
}

impl Interval {
    pub fn new(lo: f64, hi: f64) -> Result<Interval> {
        if !lo.is_finite() || !hi.is_finite() {
            return Err(Error::invalid(format!(
                "interval bounds must be finite, got [{lo}, {hi}]"
            )));
        }
        if lo > hi {
            return Err(Error::invalid(format!(
                "interval bounds out of order: lo = {lo} > hi = {hi}"
            )));
        }
        Ok(Interval { lo, hi })
    }

    /// The degenerate interval `[x, x]`.
    pub fn point(x: f64) -> Result<Interval> {
        Interval::new(x, x)
    }

    pub fn lo(&self) -> f64 {
        self.lo
    }

    pub fn hi(&self) -> f64 {
        self.hi
    }

    pub fn len(&self) -> f64 {
        self.hi - self.lo
    }

    pub fn is_point(&self) -> bool {
        self.lo == self.hi
    }

    pub fn midpoint(&self) -> f64 {
        0.5 * (self.lo + self.hi)
    }

    pub fn contains(&self, x: f64) -> bool {
        self.lo <= x && x <= self.hi
    }

    /// Closed-interval intersection test: touching endpoints count.
    pub fn intersects(&self, other: &Interval) -> bool {
        self.lo <= other.hi && other.lo <= self.hi
    }

    /// True when `other` lies entirely inside `self`.
    pub fn contains_interval(&self, other: &Interval) -> bool {
        self.lo <= other.lo && other.hi <= self.hi
    }

    pub fn intersection(&self, other: &Interval) -> Option<Interval> {
        let lo = self.lo.max(other.lo);
        let hi = self.hi.min(other.hi);
        if lo <= hi {
            Some(Interval { lo, hi })
        } else {
            None
        }
    }

    /// Shift both bounds by `delta`.
    pub fn shifted(&self, delta: f64) -> Result<Interval> {
        Interval::new(self.lo + delta, self.hi + delta)
    }

    /// Total order by (lo, hi); used for deterministic zone sorting.
    pub fn lex_cmp(&self, other: &Interval) -> Ordering {
        self.lo
            .total_cmp(&other.lo)
            .then(self.hi.total_cmp(&other.hi))
    }
}

impl fmt::Display for Interval {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "[{}, {}]", self.lo, self.hi)
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn construction_validates_order() {
        assert!(Interval::new(1.0, 2.0).is_ok());
        assert!(Interval::new(2.0, 1.0).is_err());
        assert!(Interval::new(f64::NAN, 1.0).is_err());
        assert!(Interval::new(0.0, f64::INFINITY).is_err());
    }

    #[test]
    fn degenerate_interval_is_a_point() {
        let p = Interval::point(3.5).unwrap();
        assert!(p.is_point());
        assert_eq!(p.len(), 0.0);
        assert!(p.contains(3.5));
        assert!(!p.contains(3.5000001));
    }

    #[test]
    fn touching_intervals_intersect() {
        let a = Interval::new(0.0, 1.0).unwrap();
        let b = Interval::new(1.0, 2.0).unwrap();
        assert!(a.intersects(&b));
        let got = a.intersection(&b).unwrap();
        assert!(got.is_point());
        assert_eq!(got.lo(), 1.0);
    }

    #[test]
    fn disjoint_intervals_do_not_intersect() {
        let a = Interval::new(0.0, 1.0).unwrap();
        let b = Interval::new(1.5, 2.0).unwrap();
        assert!(!a.intersects(&b));
        assert!(a.intersection(&b).is_none());
    }

    #[test]
    fn containment() {
        let outer = Interval::new(0.0, 10.0).unwrap();
        let inner = Interval::new(2.0, 3.0).unwrap();
        assert!(outer.contains_interval(&inner));
        assert!(!inner.contains_interval(&outer));
        assert!(outer.contains_interval(&outer));
    }

    #[test]
    fn lex_ordering() {
        let a = Interval::new(0.0, 5.0).unwrap();
        let b = Interval::new(0.0, 6.0).unwrap();
        let c = Interval::new(1.0, 2.0).unwrap();
        assert_eq!(a.lex_cmp(&b), Ordering::Less);
        assert_eq!(b.lex_cmp(&c), Ordering::Less);
        assert_eq!(a.lex_cmp(&a), Ordering::Equal);
    }
}
