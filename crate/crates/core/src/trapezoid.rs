use crate::error::{Error, Result};
use crate::interval::Interval;

/// A trapezoidal membership function.
///
/// Membership is 1 exactly on `core`, 0 outside `support`, and linear on the
/// two ramps between them, so the function is continuous everywhere. A
/// measurement `v` with error `e` maps to `core = [v - e, v + e]` and
/// `support = [v - 2e, v + 2e]`: deviations within the measurement error do
/// not reduce confidence at all, and confidence fades linearly over one more
/// error-width. With `e = 0` the whole function degenerates to the single
/// point `{v}`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Trapezoid {
    support: Interval,
    core: Interval,
}

impl Trapezoid {
    pub fn new(support: Interval, core: Interval) -> Result<Trapezoid> {
        if !support.contains_interval(&core) {
            return Err(Error::invalid(format!(
                "core {core} must lie inside support {support}"
            )));
        }
        Ok(Trapezoid { support, core })
    }

    /// Standard construction: core `v ± e`, support `v ± 2e`.
    pub fn from_value_error(value: f64, error: f64) -> Result<Trapezoid> {
        Trapezoid::with_ramp(value, error, error)
    }

    /// Construction with an explicit ramp width (support `v ± (e + ramp)`).
    pub fn with_ramp(value: f64, error: f64, ramp: f64) -> Result<Trapezoid> {
        if !value.is_finite() {
            return Err(Error::invalid(format!("value must be finite, got {value}")));
        }
        if !error.is_finite() || error < 0.0 {
            return Err(Error::invalid(format!(
                "measurement error must be finite and non-negative, got {error}"
            )));
        }
        if !ramp.is_finite() || ramp < 0.0 {
            return Err(Error::invalid(format!(
                "ramp width must be finite and non-negative, got {ramp}"
            )));
        }
        let core = Interval::new(value - error, value + error)?;
        let support = Interval::new(value - error - ramp, value + error + ramp)?;
        Trapezoid::new(support, core)
    }

    pub fn support(&self) -> Interval {
        self.support
    }

    pub fn core(&self) -> Interval {
        self.core
    }

    /// The four breakpoints in ascending order; equal values collapse for
    /// degenerate shapes.
    pub fn breakpoints(&self) -> [f64; 4] {
        [
            self.support.lo(),
            self.core.lo(),
            self.core.hi(),
            self.support.hi(),
        ]
    }

    pub fn membership(&self, x: f64) -> f64 {
        if x.is_nan() {
            return 0.0;
        }
        if x < self.support.lo() || x > self.support.hi() {
            return 0.0;
        }
        if self.core.contains(x) {
            return 1.0;
        }
        if x < self.core.lo() {
            (x - self.support.lo()) / (self.core.lo() - self.support.lo())
        } else {
            (self.support.hi() - x) / (self.support.hi() - self.core.hi())
        }
    }

    pub fn translated(&self, delta: f64) -> Result<Trapezoid> {
        Trapezoid::new(self.support.shifted(delta)?, self.core.shifted(delta)?)
    }

    /// Maximum membership over a closed interval.
    ///
    /// Equals 1 when the interval touches the core; otherwise the function is
    /// monotone towards the core on each side, so the maximum sits at the
    /// nearest interval endpoint.
    pub fn max_membership_on(&self, zone: &Interval) -> f64 {
        if self.core.intersects(zone) {
            1.0
        } else {
            self.membership(zone.lo()).max(self.membership(zone.hi()))
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::assert_abs_diff_eq;

    #[test]
    fn standard_construction() {
        let t = Trapezoid::from_value_error(7.3, 0.1).unwrap();
        assert_abs_diff_eq!(t.core().lo(), 7.2, epsilon = 1e-12);
        assert_abs_diff_eq!(t.core().hi(), 7.4, epsilon = 1e-12);
        assert_abs_diff_eq!(t.support().lo(), 7.1, epsilon = 1e-12);
        assert_abs_diff_eq!(t.support().hi(), 7.5, epsilon = 1e-12);
    }

    #[test]
    fn zero_error_degenerates_to_point() {
        let t = Trapezoid::from_value_error(5.0, 0.0).unwrap();
        assert_eq!(t.core(), t.support());
        assert!(t.core().is_point());
        assert_eq!(t.membership(5.0), 1.0);
        assert_eq!(t.membership(5.0 + 1e-15), 0.0);
    }

    #[test]
    fn forced_breakpoints() {
        let t = Trapezoid::from_value_error(2.0, 0.2).unwrap();
        let bp = t.breakpoints();
        let expected = [1.6, 1.8, 2.2, 2.4];
        for (got, want) in bp.iter().zip(expected) {
            assert_abs_diff_eq!(*got, want, epsilon = 1e-12);
        }
        assert_eq!(t.membership(bp[0]), 0.0);
        assert_eq!(t.membership(bp[1]), 1.0);
        assert_eq!(t.membership(bp[2]), 1.0);
        assert_eq!(t.membership(bp[3]), 0.0);
        assert_abs_diff_eq!(t.membership(1.7), 0.5, epsilon = 1e-12);
    }

    #[test]
    fn membership_values() {
        let t = Trapezoid::from_value_error(7.3, 0.1).unwrap();
        assert_abs_diff_eq!(t.membership(7.4), 1.0, epsilon = 1e-12);
        assert_eq!(t.membership(7.3), 1.0);
        assert_abs_diff_eq!(t.membership(7.45), 0.5, epsilon = 1e-12);
        assert_eq!(t.membership(7.6), 0.0);
        assert_eq!(t.membership(f64::NAN), 0.0);
        assert_eq!(t.membership(f64::INFINITY), 0.0);
    }

    #[test]
    fn negative_error_rejected() {
        assert!(Trapezoid::from_value_error(1.0, -0.1).is_err());
        assert!(Trapezoid::with_ramp(1.0, 0.1, -0.5).is_err());
    }

    #[test]
    fn translation_matches_fresh_construction() {
        let t = Trapezoid::from_value_error(7.3, 0.1).unwrap();
        let shifted = t.translated(0.7).unwrap();
        let fresh = Trapezoid::from_value_error(8.0, 0.1).unwrap();
        assert_eq!(shifted.breakpoints(), fresh.breakpoints());
    }

    #[test]
    fn translation_identity() {
        let t = Trapezoid::from_value_error(3.0, 0.25).unwrap();
        assert_eq!(t.translated(0.0).unwrap(), t);
    }

    #[test]
    fn symmetry_around_value() {
        let t = Trapezoid::from_value_error(2.0, 0.2).unwrap();
        for i in 0..50 {
            let offset = i as f64 * 0.0125;
            let left = t.membership(2.0 - offset);
            let right = t.membership(2.0 + offset);
            assert_abs_diff_eq!(left, right, epsilon = 1e-12);
        }
    }

    #[test]
    fn continuity_at_breakpoints() {
        let t = Trapezoid::from_value_error(7.3, 0.1).unwrap();
        let slope = 1.0 / 0.1;
        for b in t.breakpoints() {
            let eps = 1e-9;
            let jump = (t.membership(b - eps) - t.membership(b + eps)).abs();
            assert!(jump <= 1e-6 * slope, "discontinuity at {b}: {jump}");
        }
    }

    #[test]
    fn max_membership_on_interval() {
        let t = Trapezoid::from_value_error(2.0, 0.2).unwrap();
        let core_zone = Interval::new(1.9, 2.1).unwrap();
        assert_eq!(t.max_membership_on(&core_zone), 1.0);
        let ramp_zone = Interval::new(1.65, 1.7).unwrap();
        assert_abs_diff_eq!(t.max_membership_on(&ramp_zone), 0.5, epsilon = 1e-12);
        let outside = Interval::new(3.0, 4.0).unwrap();
        assert_eq!(t.max_membership_on(&outside), 0.0);
    }

    #[test]
    fn membership_bounds_property() {
        use proptest::prelude::*;
        proptest!(|(v in -100.0..100.0f64, e in 0.0..10.0f64, x in -300.0..300.0f64)| {
            let t = Trapezoid::from_value_error(v, e).unwrap();
            let m = t.membership(x);
            prop_assert!((0.0..=1.0).contains(&m));
            let in_core = t.core().contains(x);
            prop_assert_eq!(m == 1.0, in_core);
        });
    }

    #[test]
    fn translation_exact_on_dyadic_offsets() {
        use proptest::prelude::*;
        proptest!(|(v in -64i32..64, e in 0u8..16, steps in -256i32..256, x in -64i32..64)| {
            let value = v as f64 * 0.25;
            let error = e as f64 * 0.25;
            let delta = steps as f64 * 0.25;
            let t = Trapezoid::from_value_error(value, error).unwrap();
            let moved = t.translated(delta).unwrap();
            let probe = x as f64 * 0.25;
            prop_assert_eq!(moved.membership(probe), t.membership(probe - delta));
        });
    }
}
