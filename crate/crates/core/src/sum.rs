//! Compensated (Neumaier) summation for long spectral and quadrature sums.

/// Running Neumaier sum; the correction term recovers low-order bits lost when
/// terms of very different magnitude meet.
#[derive(Debug, Clone, Copy, Default)]
pub struct Neumaier {
    s: f64,
    c: f64,
}

impl Neumaier {
    pub fn new() -> Self {
        Self::default()
    }

    #[inline]
    pub fn add(&mut self, x: f64) {
        let t = self.s + x;
        if self.s.abs() >= x.abs() {
            self.c += (self.s - t) + x;
        } else {
            self.c += (x - t) + self.s;
        }
        self.s = t;
    }

    #[inline]
    pub fn total(&self) -> f64 {
        self.s + self.c
    }
}

/// Compensated sum of an iterator of terms.
pub fn sum<I: IntoIterator<Item = f64>>(it: I) -> f64 {
    let mut acc = Neumaier::new();
    for x in it {
        acc.add(x);
    }
    acc.total()
}

/// Compensated dot product.
pub fn dot(a: &[f64], b: &[f64]) -> f64 {
    debug_assert_eq!(a.len(), b.len());
    let mut acc = Neumaier::new();
    for (x, y) in a.iter().zip(b) {
        acc.add(x * y);
    }
    acc.total()
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn recovers_cancellation_that_naive_summation_loses() {
        // 1 followed by 1e16 copies' worth of tiny terms, structured as
        // [1e16, 1.0, -1e16]: naive left-to-right drops the 1.0.
        let total = sum([1e16, 1.0, -1e16]);
        assert_eq!(total, 1.0);
    }

    #[test]
    fn matches_exact_arithmetic_on_alternating_series() {
        let terms: Vec<f64> = (1..=100_000).map(|k| if k % 2 == 0 { -1.0 / k as f64 } else { 1.0 / k as f64 }).collect();
        let total = sum(terms.iter().copied());
        let naive: f64 = terms.iter().sum();
        // ln 2 to ~1e-5 for the partial series; compensated and naive agree closely here,
        // the point is just that compensation never hurts.
        assert!((total - naive).abs() < 1e-10);
        assert!((total - std::f64::consts::LN_2).abs() < 1e-4);
    }
}
