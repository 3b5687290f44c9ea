//! Smooth dyadic spectral multipliers.
//!
//! The building block is a C-infinity cutoff eta with eta = 1 on [0, 1] and
//! eta = 0 on [4, inf), constructed from the bump b(x) = exp(-1/x) through
//! sigma(x) = b(x) / (b(x) + b(1-x)) and eta(x) = sigma((4 - x) / 3). From it:
//!
//! * phi(x) = eta(x/4) - eta(x), supported in [1, 16];
//! * phi_j(x) = phi(x / 4^(j-1)) for j >= 1 and phi_0 = eta, a dyadic
//!   partition of unity: sum_{j=0}^{m-1} phi_j = eta_m telescopes exactly;
//! * eta_m(x) = eta(x / 4^(m-1)), equal to 1 on [0, 4^(m-1)], supported in
//!   [0, 4^m];
//! * psi_{j,r}(x) = phi(y) / y^(r/2) at y = x / 4^(j-1), the tempered band
//!   filter: phi_j(x) = 2^(-(j-1) r) psi_{j,r}(x) x^(r/2) pointwise.
//!
//! All filters act on the nonnegative spectral axis; negative arguments are
//! rejected rather than extended.

use crate::error::{Error, Result};
use std::sync::Arc;

fn bump(x: f64) -> f64 {
    if x <= 0.0 {
        0.0
    } else {
        (-1.0 / x).exp()
    }
}

fn sigma(x: f64) -> f64 {
    let a = bump(x);
    if a == 0.0 {
        return 0.0;
    }
    let b = bump(1.0 - x);
    if b == 0.0 {
        return 1.0;
    }
    a / (a + b)
}

fn eta(x: f64) -> f64 {
    sigma((4.0 - x) / 3.0)
}

fn phi(x: f64) -> f64 {
    eta(x / 4.0) - eta(x)
}

fn pow4(j: u32) -> f64 {
    4f64.powi(j as i32)
}

/// Declared decay of a custom multiplier, used to justify kernel truncation.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum Decay {
    /// Decays faster than any polynomial (Schwartz class on the spectral axis).
    Rapid,
    /// Vanishes above the given point.
    Support(f64),
    /// Nothing declared; kernel ops reject such filters.
    Unknown,
}

/// User-supplied multiplier with a decay declaration.
#[derive(Clone)]
pub struct CustomFilter {
    pub f: Arc<dyn Fn(f64) -> f64 + Send + Sync>,
    pub decay: Decay,
}

impl std::fmt::Debug for CustomFilter {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.debug_struct("CustomFilter").field("decay", &self.decay).finish()
    }
}

/// A spectral multiplier profile F, evaluated at t^2 lambda by the kernel and
/// operator machinery.
#[derive(Debug, Clone)]
pub enum Filter {
    /// Smooth cutoff, 1 on [0, 1], 0 beyond 4.
    Eta,
    /// Dilated cutoff eta(x / 4^(m-1)), m >= 1.
    EtaM(u32),
    /// Band profile eta(x/4) - eta(x), supported in [1, 16].
    Phi,
    /// Dyadic band phi(x / 4^(j-1)) for j >= 1; j = 0 is the cutoff eta.
    PhiJ(u32),
    /// Tempered band phi(y) / y^(r/2) at y = x / 4^(j-1); j >= 1, r > 0.
    PsiJR(u32, f64),
    /// exp(-x).
    Gaussian,
    Custom(CustomFilter),
}

impl Filter {
    /// Validates index and exponent constraints carried by the variant.
    pub fn validate(&self) -> Result<()> {
        match self {
            Filter::EtaM(0) => Err(Error::FilterIndex("EtaM requires m >= 1")),
            Filter::PsiJR(0, _) => Err(Error::FilterIndex("PsiJR requires j >= 1")),
            Filter::PsiJR(_, r) if !(*r > 0.0) => {
                Err(Error::InvalidExponent { name: "r", value: *r })
            }
            _ => Ok(()),
        }
    }

    /// Evaluates the multiplier at a nonnegative spectral argument.
    pub fn eval(&self, x: f64) -> Result<f64> {
        self.validate()?;
        if !(x >= 0.0) {
            return Err(Error::NegativeFilterArgument(x));
        }
        Ok(self.eval_raw(x))
    }

    /// Evaluation without argument checks; callers guarantee x >= 0 and a
    /// valid variant.
    pub(crate) fn eval_raw(&self, x: f64) -> f64 {
        match self {
            Filter::Eta => eta(x),
            Filter::EtaM(m) => eta(x / pow4(m - 1)),
            Filter::Phi => phi(x),
            Filter::PhiJ(0) => eta(x),
            Filter::PhiJ(j) => eta(x / pow4(*j)) - eta(x / pow4(j - 1)),
            Filter::PsiJR(j, r) => {
                let y = x / pow4(j - 1);
                let p = phi(y);
                if p == 0.0 {
                    0.0
                } else {
                    p * y.powf(-r / 2.0)
                }
            }
            Filter::Gaussian => (-x).exp(),
            Filter::Custom(c) => (c.f)(x),
        }
    }

    /// Upper end of the support, when finite.
    pub fn support_upper(&self) -> Option<f64> {
        match self {
            Filter::Eta => Some(4.0),
            Filter::EtaM(m) => Some(pow4(*m)),
            Filter::Phi => Some(16.0),
            Filter::PhiJ(0) => Some(4.0),
            Filter::PhiJ(j) | Filter::PsiJR(j, _) => Some(pow4(j + 1)),
            Filter::Gaussian => None,
            Filter::Custom(c) => match c.decay {
                Decay::Support(b) => Some(b),
                _ => None,
            },
        }
    }

    /// True when the tail beyond any point can be bounded (finite support or
    /// declared rapid decay).
    pub fn decays(&self) -> bool {
        match self {
            Filter::Custom(c) => !matches!(c.decay, Decay::Unknown),
            _ => true,
        }
    }

    /// F(0); kernels of filters with F(0) != 0 only localize for t <= 1.
    pub fn value_at_zero(&self) -> f64 {
        self.eval_raw(0.0)
    }
}

/// Deviation maxima of the dyadic partition of unity.
#[derive(Debug, Clone, Copy)]
pub struct PartitionCheck {
    /// max over [0, 4^(J-1)] of |sum_{j<J} phi_j - 1|.
    pub max_dev_unity: f64,
    /// max over the extended axis of |sum_{j<J} phi_j - eta_J|.
    pub max_dev_vs_eta: f64,
}

/// Samples the partition sum_{j=0}^{J-1} phi_j on log-spaced points: against 1
/// on [0, 4^(J-1)] where the partition must resolve unity, and against eta_J
/// everywhere.
pub fn partition_check(j_count: u32, sample_count: usize) -> Result<PartitionCheck> {
    if j_count < 1 {
        return Err(Error::FilterIndex("partition needs at least one band"));
    }
    if sample_count < 16 {
        return Err(Error::InvalidExponent { name: "sample_count", value: sample_count as f64 });
    }
    let sum_at = |x: f64| -> f64 {
        let mut s = 0.0;
        for j in 0..j_count {
            s += Filter::PhiJ(j).eval_raw(x);
        }
        s
    };
    let log_points = |hi: f64| -> Vec<f64> {
        let lo = 1e-8_f64;
        let mut xs = vec![0.0];
        for i in 0..sample_count {
            let f = i as f64 / (sample_count - 1) as f64;
            xs.push(lo * (hi / lo).powf(f));
        }
        xs
    };

    let unity_hi = pow4(j_count - 1);
    let max_dev_unity = log_points(unity_hi)
        .into_iter()
        .map(|x| (sum_at(x) - 1.0).abs())
        .fold(0.0, f64::max);

    let eta_j = Filter::EtaM(j_count);
    let max_dev_vs_eta = log_points(pow4(j_count + 2))
        .into_iter()
        .map(|x| (sum_at(x) - eta_j.eval_raw(x)).abs())
        .fold(0.0, f64::max);

    Ok(PartitionCheck { max_dev_unity, max_dev_vs_eta })
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::assert_abs_diff_eq;

    #[test]
    fn cutoff_plateau_and_support() {
        assert_eq!(Filter::Eta.eval(0.5).unwrap(), 1.0);
        assert_eq!(Filter::Eta.eval(1.0).unwrap(), 1.0);
        assert_eq!(Filter::Eta.eval(4.0).unwrap(), 0.0);
        assert_eq!(Filter::Eta.eval(5.0).unwrap(), 0.0);
        // Midpoint of the ramp by the symmetry of sigma.
        assert_abs_diff_eq!(Filter::Eta.eval(2.5).unwrap(), 0.5, epsilon = 1e-15);
    }

    #[test]
    fn band_filters_dilate_consistently() {
        let base = Filter::Phi.eval(2.0).unwrap();
        assert!(base > 0.0 && base < 1.0);
        for j in 1..=6u32 {
            let x = 2.0 * 4f64.powi(j as i32 - 1);
            assert_abs_diff_eq!(Filter::PhiJ(j).eval(x).unwrap(), base, epsilon = 1e-15);
        }
        // phi_2 vanishes at the lower edge of its band.
        assert_eq!(Filter::PhiJ(2).eval(4.0).unwrap(), 0.0);
        assert_eq!(Filter::PhiJ(0).eval(0.5).unwrap(), 1.0);
    }

    #[test]
    fn tempered_band_matches_plain_band_over_power() {
        let want = Filter::Phi.eval(4.0).unwrap() / 4.0;
        assert_abs_diff_eq!(Filter::PsiJR(1, 2.0).eval(4.0).unwrap(), want, epsilon = 1e-15);
        // Outside the band the quotient is defined as zero.
        assert_eq!(Filter::PsiJR(1, 2.0).eval(0.5).unwrap(), 0.0);
        assert_eq!(Filter::PsiJR(1, 2.0).eval(0.0).unwrap(), 0.0);
    }

    #[test]
    fn invalid_variants_and_arguments_are_rejected() {
        assert!(Filter::EtaM(0).eval(1.0).is_err());
        assert!(Filter::PsiJR(0, 1.0).eval(1.0).is_err());
        assert!(Filter::PsiJR(1, 0.0).eval(1.0).is_err());
        assert!(Filter::Eta.eval(-0.1).is_err());
        assert!(Filter::Eta.eval(f64::NAN).is_err());
    }

    #[test]
    fn cutoff_monotone_on_ramp() {
        let mut prev = f64::INFINITY;
        for i in 0..=400 {
            let x = 1.0 + 3.0 * i as f64 / 400.0;
            let v = Filter::Eta.eval(x).unwrap();
            assert!(v <= prev + 1e-15);
            prev = v;
        }
    }

    #[test]
    fn partition_resolves_unity() {
        let chk = partition_check(8, 1000).unwrap();
        assert!(chk.max_dev_unity <= 1e-12, "unity deviation {}", chk.max_dev_unity);
        assert!(chk.max_dev_vs_eta <= 1e-12, "telescoping deviation {}", chk.max_dev_vs_eta);
        assert!(partition_check(0, 100).is_err());
        assert!(partition_check(4, 8).is_err());
    }

    #[test]
    fn zero_values_and_supports() {
        assert_eq!(Filter::Eta.value_at_zero(), 1.0);
        assert_eq!(Filter::EtaM(3).value_at_zero(), 1.0);
        assert_eq!(Filter::Phi.value_at_zero(), 0.0);
        assert_eq!(Filter::PhiJ(2).value_at_zero(), 0.0);
        assert_eq!(Filter::Gaussian.value_at_zero(), 1.0);
        assert_eq!(Filter::Phi.support_upper(), Some(16.0));
        assert_eq!(Filter::PhiJ(3).support_upper(), Some(256.0));
        assert_eq!(Filter::EtaM(2).support_upper(), Some(16.0));
        assert_eq!(Filter::Gaussian.support_upper(), None);
    }

    proptest::proptest! {
        #[test]
        fn values_stay_in_range(x in 0.0..1e6f64) {
            let e = Filter::Eta.eval_raw(x);
            proptest::prop_assert!((0.0..=1.0).contains(&e));
            for j in 0..6u32 {
                let p = Filter::PhiJ(j).eval_raw(x);
                proptest::prop_assert!((-1.0..=1.0).contains(&p));
            }
        }

        #[test]
        fn partition_telescopes_pointwise(x in 0.0..1e5f64, m in 1u32..9) {
            let mut s = 0.0;
            for j in 0..m {
                s += Filter::PhiJ(j).eval_raw(x);
            }
            let want = Filter::EtaM(m).eval_raw(x);
            proptest::prop_assert!((s - want).abs() <= 1e-14);
        }

        #[test]
        fn band_equals_tempered_band_times_power(j in 1u32..7, r in 0.25..4.0f64, y in 1.0..16.0f64) {
            let x = y * 4f64.powi(j as i32 - 1);
            let lhs = Filter::PhiJ(j).eval_raw(x);
            let rhs = 2f64.powf(-((j as f64 - 1.0) * r))
                * Filter::PsiJR(j, r).eval_raw(x)
                * x.powf(r / 2.0);
            let scale = lhs.abs().max(1e-30);
            proptest::prop_assert!((lhs - rhs).abs() / scale <= 1e-12);
        }
    }
}
