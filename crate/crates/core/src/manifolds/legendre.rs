//! Normalized associated Legendre functions Q_k^m(cos theta).
//!
//! Normalization is chosen so the real orthonormal spherical harmonics are
//!
//! ```text
//! Y_{k,0}  = Q_k^0(cos theta)
//! Y_{k,m}  = sqrt(2) Q_k^m(cos theta) cos(m phi)   (m > 0)
//! Y_{k,-m} = sqrt(2) Q_k^m(cos theta) sin(m phi)   (m > 0)
//! ```
//!
//! with unit L2 norm against the surface measure of the unit sphere. No
//! Condon-Shortley phase. The fully normalized three-term recurrence keeps
//! every intermediate value of order one, so degrees in the thousands are
//! evaluated without overflow; the diagonal seed Q_m^m carries the factor
//! sin(theta)^m and underflows gracefully to zero near the poles.

/// Q_0^0 = 1 / sqrt(4 pi).
pub const Q00: f64 = 0.282_094_791_773_878_14;

/// Diagonal value Q_m^m for sin(theta) = st.
fn seed(m: u32, st: f64) -> f64 {
    let mut q = Q00;
    for i in 1..=m {
        let i = i as f64;
        q *= st * ((2.0 * i + 1.0) / (2.0 * i)).sqrt();
    }
    q
}

/// Fills `out` with Q_k^m(ct) for k = m..=k_max (so `out.len() == k_max - m + 1`).
pub fn column(m: u32, k_max: u32, ct: f64, st: f64, out: &mut Vec<f64>) {
    debug_assert!(m <= k_max);
    out.clear();
    let mf = m as f64;
    let mut prev2 = 0.0;
    let mut prev1 = seed(m, st);
    out.push(prev1);
    for k in (m + 1)..=k_max {
        let kf = k as f64;
        let a = ((4.0 * kf * kf - 1.0) / (kf * kf - mf * mf)).sqrt();
        let b = (((kf - 1.0) * (kf - 1.0) - mf * mf) / (4.0 * (kf - 1.0) * (kf - 1.0) - 1.0)).sqrt();
        let q = a * (ct * prev1 - b * prev2);
        out.push(q);
        prev2 = prev1;
        prev1 = q;
    }
}

/// Triangular table Q_k^m for all 0 <= m <= k <= k_max, indexed by `tri_index`.
pub fn table(k_max: u32, ct: f64, st: f64) -> Vec<f64> {
    let n = tri_len(k_max);
    let mut tab = vec![0.0; n];
    let mut col = Vec::with_capacity(k_max as usize + 1);
    for m in 0..=k_max {
        column(m, k_max, ct, st, &mut col);
        for (off, &q) in col.iter().enumerate() {
            tab[tri_index(m + off as u32, m)] = q;
        }
    }
    tab
}

/// Storage index of (k, m) in the triangular table.
#[inline]
pub fn tri_index(k: u32, m: u32) -> usize {
    debug_assert!(m <= k);
    (k as usize * (k as usize + 1)) / 2 + m as usize
}

/// Table length for degrees up to k_max.
#[inline]
pub fn tri_len(k_max: u32) -> usize {
    tri_index(k_max, k_max) + 1
}

/// Single value Q_k^m(ct); O(k) work.
pub fn single(k: u32, m: u32, ct: f64, st: f64) -> f64 {
    let mut col = Vec::with_capacity((k - m) as usize + 1);
    column(m, k, ct, st, &mut col);
    col[(k - m) as usize]
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::assert_abs_diff_eq;

    // Low-degree closed forms: Q_k^m = sqrt((2k+1)/(4 pi) (k-m)!/(k+m)!) P_k^m.
    #[test]
    fn low_degree_closed_forms() {
        let fourpi = 4.0 * std::f64::consts::PI;
        for &theta in &[0.3_f64, 1.1, 2.0, 2.9] {
            let (ct, st) = (theta.cos(), theta.sin());
            assert_abs_diff_eq!(single(0, 0, ct, st), (1.0 / fourpi).sqrt(), epsilon = 1e-15);
            assert_abs_diff_eq!(single(1, 0, ct, st), (3.0 / fourpi).sqrt() * ct, epsilon = 1e-14);
            assert_abs_diff_eq!(single(1, 1, ct, st), (3.0 / (2.0 * fourpi)).sqrt() * st, epsilon = 1e-14);
            assert_abs_diff_eq!(
                single(2, 0, ct, st),
                (5.0 / fourpi).sqrt() * 0.5 * (3.0 * ct * ct - 1.0),
                epsilon = 1e-14
            );
            assert_abs_diff_eq!(
                single(2, 1, ct, st),
                (5.0 / (6.0 * fourpi)).sqrt() * 3.0 * ct * st,
                epsilon = 1e-14
            );
            assert_abs_diff_eq!(
                single(2, 2, ct, st),
                (5.0 / (24.0 * fourpi)).sqrt() * 3.0 * st * st,
                epsilon = 1e-14
            );
        }
    }

    // Addition theorem at coincident points: sum_m Y_km(x)^2 = (2k+1)/(4 pi),
    // i.e. Q_k0^2 + 2 sum_{m>0} Q_km^2 is independent of theta.
    #[test]
    fn diagonal_addition_identity() {
        let fourpi = 4.0 * std::f64::consts::PI;
        for k in [0u32, 1, 5, 40, 200] {
            for &theta in &[0.0_f64, 0.2, 1.3, std::f64::consts::PI - 0.1] {
                let (ct, st) = (theta.cos(), theta.sin());
                let tab = table(k, ct, st);
                let mut s = tab[tri_index(k, 0)].powi(2);
                for m in 1..=k {
                    s += 2.0 * tab[tri_index(k, m)].powi(2);
                }
                let want = (2.0 * k as f64 + 1.0) / fourpi;
                assert_abs_diff_eq!(s, want, epsilon = 1e-11 * want.max(1.0));
            }
        }
    }

    #[test]
    fn table_matches_single_entries() {
        let (ct, st) = (0.4_f64, (1.0 - 0.16_f64).sqrt());
        let tab = table(30, ct, st);
        for k in 0..=30u32 {
            for m in 0..=k {
                assert_abs_diff_eq!(tab[tri_index(k, m)], single(k, m, ct, st), epsilon = 1e-13);
            }
        }
    }

    #[test]
    fn pole_kills_nonzonal_values() {
        let tab = table(12, 1.0, 0.0);
        for k in 1..=12u32 {
            for m in 1..=k {
                assert_eq!(tab[tri_index(k, m)], 0.0);
            }
        }
    }
}
