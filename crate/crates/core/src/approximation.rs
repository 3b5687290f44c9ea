//! Norms, best spectral approximation, and rate experiments.
//!
//! Everything here reduces to coefficient arithmetic plus quadrature: L_p
//! norms of grid samples, Sobolev graph norms ||f||_p + ||L^{r/2} f||_p,
//! best approximation E(f, omega, p) by expansions with eigenvalues below
//! omega, Besov norms built from the dyadic sequence E(f, 4^j, p), per-band
//! multiplier norms against their predicted decay, the rate experiment for
//! the low-pass approximation family, Nikolskii-type norm-growth ratios for
//! spectral polynomials, and the closure of polynomial restrictions on the
//! sphere.
//!
//! Exponent convention for the Nikolskii ratios: omega plays the role of a
//! polynomial degree, so the candidate space is the span of eigenfunctions
//! with lambda <= omega^2 and the comparison weight is
//! omega^{2k + d/p - d/q}. On the circle and torus d is the dimension; on
//! the sphere the ratios are reported both with d = 2 (dimension, the gated
//! value) and with d = 3 (dimension of the rotation group).

use crate::error::{Error, Result};
use crate::filters::Filter;
use crate::fit::{fit_linear, fit_log_log, RateFit};
use crate::manifolds::{Manifold, Point, QuadratureGrid};
use crate::operators::{grid_lp_norm, synthesize, GridFunction, SpectralCoeffs};
use crate::sum::Neumaier;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use rand_distr::{Distribution, StandardNormal};
use std::sync::Arc;

/// Weighted L_p norm of grid samples; p = inf takes the grid maximum.
pub fn lp_norm(f: &GridFunction, p: f64) -> Result<f64> {
    grid_lp_norm(f, p)
}

/// Sampling grid dense enough to resolve expansions below `omega`; sup
/// norms read off it are accurate to grid density, not exact.
fn refinement_grid(model: Manifold, omega: f64) -> Result<Arc<QuadratureGrid>> {
    let deg = model.degree_for(omega) as usize;
    let res = match model {
        Manifold::Circle => (4 * (deg + 1)).clamp(256, 32768),
        Manifold::Torus2 => (2 * (deg + 1)).clamp(32, 512),
        Manifold::Sphere2 => (2 * (deg + 1)).clamp(32, 512),
    };
    Ok(Arc::new(model.grid(res)?))
}

/// L_q norm of an expansion: Parseval for q = 2, synthesis on a refinement
/// grid otherwise.
fn expansion_lq_norm(c: &SpectralCoeffs, q: f64) -> Result<f64> {
    if !(q >= 1.0) {
        return Err(Error::InvalidExponent { name: "q", value: q });
    }
    if q == 2.0 {
        let mut acc = Neumaier::new();
        for &v in &c.coeffs {
            acc.add(v * v);
        }
        return Ok(acc.total().max(0.0).sqrt());
    }
    let grid = refinement_grid(c.model, c.cutoff_omega)?;
    grid_lp_norm(&synthesize(c, grid)?, q)
}

/// Scales coefficients by g(lambda) without touching the enumeration.
fn scale_by(c: &SpectralCoeffs, g: impl Fn(f64) -> f64) -> SpectralCoeffs {
    let coeffs = c.pairs().iter().zip(&c.coeffs).map(|(p, &v)| g(p.lambda) * v).collect();
    SpectralCoeffs::from_parts(c.model, c.cutoff_omega, c.pairs_arc(), coeffs)
}

/// Graph norm ||f||_p + ||L^{r/2} f||_p of a band-limited expansion.
pub fn sobolev_norm(c: &SpectralCoeffs, p: f64, r: f64) -> Result<f64> {
    if !(r > 0.0) {
        return Err(Error::InvalidExponent { name: "r", value: r });
    }
    let base = expansion_lq_norm(c, p)?;
    let rough = expansion_lq_norm(&scale_by(c, |l| l.powf(r / 2.0)), p)?;
    Ok(base + rough)
}

/// Best approximation E(f, omega, p) of a band-limited expansion by
/// expansions with eigenvalues <= omega. Exact via the Parseval tail for
/// p = 2; for p != 2 the L_2 projection is used as the approximant, which
/// upper-bounds the true infimum (callers should surface that).
pub fn best_approx(c: &SpectralCoeffs, omega: f64, p: f64) -> Result<f64> {
    if !(p >= 1.0) {
        return Err(Error::InvalidExponent { name: "p", value: p });
    }
    if p == 2.0 {
        let mut acc = Neumaier::new();
        for (pair, &v) in c.pairs().iter().zip(&c.coeffs) {
            if pair.lambda > omega {
                acc.add(v * v);
            }
        }
        return Ok(acc.total().max(0.0).sqrt());
    }
    let tail = scale_by(c, |l| if l > omega { 1.0 } else { 0.0 });
    expansion_lq_norm(&tail, p)
}

/// Approximation-family Besov norm
/// ||f||_p + (sum_{j<=j_max} [2^{alpha j} E(f, 4^j, p)]^t)^{1/t},
/// with the sup over j when t = inf.
pub fn besov_norm(c: &SpectralCoeffs, alpha: f64, p: f64, t: f64, j_max: u32) -> Result<f64> {
    if !(alpha > 0.0) {
        return Err(Error::InvalidExponent { name: "alpha", value: alpha });
    }
    if !(t >= 1.0) {
        return Err(Error::InvalidExponent { name: "t", value: t });
    }
    let base = expansion_lq_norm(c, p)?;
    let mut sup = 0.0f64;
    let mut acc = Neumaier::new();
    for j in 0..=j_max {
        let e = best_approx(c, 4.0f64.powi(j as i32), p)?;
        let term = 2.0f64.powf(alpha * j as f64) * e;
        if t.is_finite() {
            acc.add(term.powf(t));
        } else if term > sup {
            sup = term;
        }
    }
    let tail = if t.is_finite() { acc.total().max(0.0).powf(1.0 / t) } else { sup };
    Ok(base + tail)
}

/// One row of a band-norm table.
#[derive(Debug, Clone, Copy)]
pub struct BandRow {
    pub j: u32,
    /// ||phi_j(L) f||_q.
    pub measured: f64,
    /// (2^{js})^{-r/s + 1/p - 1/q} . ||f||_{W_p^r}.
    pub bound: f64,
    pub ratio: f64,
}

/// Measured band norms against the predicted per-band decay. Requires
/// p <= q.
pub fn band_norm_table(
    c: &SpectralCoeffs,
    p: f64,
    q: f64,
    r: f64,
    j_max: u32,
) -> Result<Vec<BandRow>> {
    if !(p >= 1.0) {
        return Err(Error::InvalidExponent { name: "p", value: p });
    }
    if !(q >= 1.0) {
        return Err(Error::InvalidExponent { name: "q", value: q });
    }
    if p > q {
        return Err(Error::ExponentOrder { p, q });
    }
    let s = c.model.dim() as f64;
    let exponent = -r / s + 1.0 / p - 1.0 / q;
    let sob = sobolev_norm(c, p, r)?;
    let mut rows = Vec::with_capacity(j_max as usize + 1);
    for j in 0..=j_max {
        let filter = Filter::PhiJ(j);
        let banded = scale_by(c, |l| filter.eval_raw(l));
        let measured = expansion_lq_norm(&banded, q)?;
        let bound = 2.0f64.powf(j as f64 * s * exponent) * sob;
        let ratio = if bound > 0.0 { measured / bound } else { 0.0 };
        rows.push(BandRow { j, measured, bound, ratio });
    }
    Ok(rows)
}

/// Band-norm experiment rows plus the fitted decay of the extremal family.
#[derive(Debug, Clone)]
pub struct BandExperiment {
    pub rows: Vec<BandRow>,
    /// Slope of log2(measured) against j s; compare with -r/s + 1/p - 1/q.
    pub fit: RateFit,
    pub expected_slope: f64,
}

/// Runs the band-norm check on per-band extremal functions: for each j the
/// test function is the band kernel at the base point (coefficients
/// phi_j(lambda_l) u_l(x0)), the tight case of the per-band bound.
pub fn band_norm_experiment(
    model: Manifold,
    p: f64,
    q: f64,
    r: f64,
    j_max: u32,
) -> Result<BandExperiment> {
    if j_max < 2 {
        return Err(Error::FitRangeTooSmall { needed: 3, got: j_max as usize + 1 });
    }
    let s = model.dim() as f64;
    let x0 = model.base_point();
    let mut rows = Vec::with_capacity(j_max as usize);
    for j in 1..=j_max {
        let filter = Filter::PhiJ(j);
        let omega = 4.0f64.powi(j as i32 + 1);
        let pairs = Arc::new(model.eigenpairs_up_to(omega)?);
        let vals = model.eval_basis(&pairs, &x0)?;
        let coeffs: Vec<f64> = pairs
            .iter()
            .zip(&vals)
            .map(|(pr, &v)| filter.eval_raw(pr.lambda) * v)
            .collect();
        let c = SpectralCoeffs::from_parts(model, omega, pairs, coeffs);
        // Normalize to the unit Sobolev sphere so the per-band decay is the
        // object being measured, not the raw band mass.
        let sob = sobolev_norm(&c, p, r)?;
        if sob == 0.0 {
            continue;
        }
        let unit = scale_by(&c, |_| 1.0 / sob);
        let table = band_norm_table(&unit, p, q, r, j)?;
        rows.push(table[j as usize]);
    }
    let points: Vec<(f64, f64)> = rows
        .iter()
        .filter(|row| row.measured > 0.0)
        .map(|row| (row.j as f64 * s, row.measured.log2()))
        .collect();
    let fit = fit_linear(&points)?;
    Ok(BandExperiment { rows, fit, expected_slope: -r / s + 1.0 / p - 1.0 / q })
}

/// Parameters of the width-rate experiment.
#[derive(Debug, Clone, Copy)]
pub struct WidthParams {
    pub p: f64,
    pub q: f64,
    /// Smoothness of the comparison Sobolev ball.
    pub r: f64,
    pub m_min: u32,
    pub m_max: u32,
    /// Random unit-ball members per band, on top of the extremal member.
    pub draws: u32,
    pub seed: u64,
}

/// One dyadic level of the width experiment.
#[derive(Debug, Clone, Copy)]
pub struct WidthRow {
    pub m: u32,
    /// dim E_{4^m}(L), the rank of the approximation operator.
    pub n_m: u64,
    /// max over the family of ||f - eta_m(L) f||_q / ||f||_{W_p^r}.
    pub worst_error: f64,
}

/// Width-rate experiment result.
#[derive(Debug, Clone)]
pub struct WidthReport {
    pub rows: Vec<WidthRow>,
    /// log-log fit of worst error against n_m, smallest level dropped.
    pub fit: RateFit,
    /// -r/s + (1/p - 1/q)_+, the predicted slope.
    pub expected_slope: f64,
}

/// Measures the approximation rate of the low-pass family eta_m(L) on
/// Sobolev-normalized band functions: band kernels at the base point plus
/// seeded random coefficient draws in bands m and m+1. The predicted error
/// decay against the operator rank n_m has slope -r/s + (1/p - 1/q)_+,
/// which must be negative for the experiment to make sense.
pub fn width_rate_experiment(model: Manifold, params: &WidthParams) -> Result<WidthReport> {
    let WidthParams { p, q, r, m_min, m_max, draws, seed } = *params;
    if !(p >= 1.0) {
        return Err(Error::InvalidExponent { name: "p", value: p });
    }
    if !(q >= 1.0) {
        return Err(Error::InvalidExponent { name: "q", value: q });
    }
    if !(r > 0.0) {
        return Err(Error::InvalidExponent { name: "r", value: r });
    }
    let s = model.dim() as f64;
    let expected_slope = -r / s + (1.0 / p - 1.0 / q).max(0.0);
    if expected_slope >= 0.0 {
        return Err(Error::NonNegativeRateExponent(expected_slope));
    }
    if m_min < 1 {
        return Err(Error::InvalidExponent { name: "m_min", value: m_min as f64 });
    }
    if m_max < m_min + 2 {
        return Err(Error::FitRangeTooSmall {
            needed: 3,
            got: (m_max + 1).saturating_sub(m_min) as usize,
        });
    }
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let x0 = model.base_point();
    let mut rows = Vec::with_capacity((m_max - m_min + 1) as usize);
    for m in m_min..=m_max {
        let omega = 4.0f64.powi(m as i32 + 2);
        let pairs = Arc::new(model.eigenpairs_up_to(omega)?);
        let base_vals = model.eval_basis(&pairs, &x0)?;
        let low_pass = Filter::EtaM(m);
        let mut worst = 0.0f64;
        for band in [m, m + 1] {
            let filter = Filter::PhiJ(band);
            let band_profile: Vec<f64> =
                pairs.iter().map(|pr| filter.eval_raw(pr.lambda)).collect();
            for member in 0..=draws {
                let coeffs: Vec<f64> = if member == 0 {
                    band_profile.iter().zip(&base_vals).map(|(&b, &v)| b * v).collect()
                } else {
                    band_profile
                        .iter()
                        .map(|&b| {
                            let z: f64 = StandardNormal.sample(&mut rng);
                            b * z
                        })
                        .collect()
                };
                let c =
                    SpectralCoeffs::from_parts(model, omega, Arc::clone(&pairs), coeffs);
                let denom = sobolev_norm(&c, p, r)?;
                if denom == 0.0 {
                    continue;
                }
                let err = scale_by(&c, |l| 1.0 - low_pass.eval_raw(l));
                let num = expansion_lq_norm(&err, q)?;
                if num / denom > worst {
                    worst = num / denom;
                }
            }
        }
        rows.push(WidthRow { m, n_m: model.weyl_count(4.0f64.powi(m as i32)), worst_error: worst });
    }
    // The smallest level is preasymptotic; fit the rest.
    let points: Vec<(f64, f64)> =
        rows.iter().skip(1).map(|row| (row.n_m as f64, row.worst_error)).collect();
    let fit = fit_log_log(&points)?;
    Ok(WidthReport { rows, fit, expected_slope })
}

/// One Nikolskii ratio measurement.
#[derive(Debug, Clone, Copy)]
pub struct NikolskiiRow {
    pub omega: f64,
    /// ||L^k phi||_q / (omega^{2k + d/p - d/q} ||phi||_p) with d the
    /// manifold dimension.
    pub ratio: f64,
    /// Same ratio weighted with d = dim of the symmetry group (differs from
    /// `ratio` only on the sphere, where the group is SO(3)).
    pub group_ratio: f64,
}

/// Nikolskii check result across a list of degrees.
#[derive(Debug, Clone)]
pub struct NikolskiiReport {
    pub rows: Vec<NikolskiiRow>,
    pub max_ratio: f64,
    pub min_ratio: f64,
    pub dim_d: f64,
    pub group_d: f64,
}

/// Norm-growth ratios of Dirichlet-type kernels phi = sum u_l(x0) u_l over
/// eigenvalues <= omega^2, for each omega in the list. The ratios stay
/// bounded above and below when omega is read as a degree. Requires p <= q.
pub fn nikolskii_check(
    model: Manifold,
    omega_list: &[f64],
    k: u32,
    p: f64,
    q: f64,
) -> Result<NikolskiiReport> {
    if !(p >= 1.0) {
        return Err(Error::InvalidExponent { name: "p", value: p });
    }
    if !(q >= 1.0) {
        return Err(Error::InvalidExponent { name: "q", value: q });
    }
    if p > q {
        return Err(Error::ExponentOrder { p, q });
    }
    if omega_list.is_empty() {
        return Err(Error::EmptyScaleList);
    }
    let dim_d = model.dim() as f64;
    let group_d = match model {
        Manifold::Sphere2 => 3.0,
        _ => dim_d,
    };
    let x0 = model.base_point();
    let mut rows = Vec::with_capacity(omega_list.len());
    for &omega in omega_list {
        if !omega.is_finite() || omega < 1.0 {
            return Err(Error::InvalidExponent { name: "omega", value: omega });
        }
        let cutoff = omega * omega;
        let pairs = Arc::new(model.eigenpairs_up_to(cutoff)?);
        let coeffs = model.eval_basis(&pairs, &x0)?;
        let phi = SpectralCoeffs::from_parts(model, cutoff, pairs, coeffs);
        let num = expansion_lq_norm(&scale_by(&phi, |l| l.powi(k as i32)), q)?;
        let den_norm = expansion_lq_norm(&phi, p)?;
        let weight = |d: f64| omega.powf(2.0 * k as f64 + d / p - d / q);
        rows.push(NikolskiiRow {
            omega,
            ratio: num / (weight(dim_d) * den_norm),
            group_ratio: num / (weight(group_d) * den_norm),
        });
    }
    let max_ratio = rows.iter().map(|r| r.ratio).fold(f64::MIN, f64::max);
    let min_ratio = rows.iter().map(|r| r.ratio).fold(f64::MAX, f64::min);
    Ok(NikolskiiReport { rows, max_ratio, min_ratio, dim_d, group_d })
}

/// Residual of one monomial restriction.
#[derive(Debug, Clone, Copy)]
pub struct MonomialRow {
    /// Exponents (a, b, c) of x^a y^b z^c.
    pub powers: [u32; 3],
    /// ||m - P m||_2 / ||m||_2 with P the projection onto eigenvalues
    /// <= degree (degree + 1).
    pub residual: f64,
}

/// Polynomial-span check on the sphere.
#[derive(Debug, Clone)]
pub struct SpanReport {
    pub rows: Vec<MonomialRow>,
    pub max_residual: f64,
}

/// Projects every monomial of total degree <= `degree`, restricted to the
/// sphere, onto the expansions with eigenvalues <= degree (degree + 1), and
/// reports the relative L_2 residuals. Restrictions of polynomials are
/// spanned by eigenfunctions, so the residuals sit at quadrature roundoff.
pub fn polynomial_span_check(degree: u32) -> Result<SpanReport> {
    let model = Manifold::Sphere2;
    let omega = (degree * (degree + 1)) as f64;
    let grid = Arc::new(model.grid((degree as usize + 2).max(4))?);
    let pairs = Arc::new(model.eigenpairs_up_to(omega)?);
    let mut rows = Vec::new();
    let mut max_residual = 0.0f64;
    for total in 0..=degree {
        for a in (0..=total).rev() {
            for b in (0..=(total - a)).rev() {
                let c = total - a - b;
                let f = GridFunction::sample(Arc::clone(&grid), |pt| {
                    let Point::Sphere2(v) = pt else { unreachable!() };
                    v[0].powi(a as i32) * v[1].powi(b as i32) * v[2].powi(c as i32)
                });
                let mut norm_sq = Neumaier::new();
                for (&w, &v) in grid.weights.iter().zip(&f.values) {
                    norm_sq.add(w * v * v);
                }
                let norm_sq = norm_sq.total();
                let mut coeffs = Vec::with_capacity(pairs.len());
                for pair in pairs.iter() {
                    let mut acc = Neumaier::new();
                    for ((x, &w), &fv) in grid.nodes.iter().zip(&grid.weights).zip(&f.values)
                    {
                        acc.add(w * fv * pair.evaluate(x)?);
                    }
                    coeffs.push(acc.total());
                }
                // Pointwise projection error; subtracting before squaring
                // keeps the tiny residual clear of cancellation noise.
                let mut err_sq = Neumaier::new();
                for ((x, &w), &fv) in grid.nodes.iter().zip(&grid.weights).zip(&f.values) {
                    let vals = model.eval_basis(&pairs, x)?;
                    let diff = fv - crate::sum::dot(&coeffs, &vals);
                    err_sq.add(w * diff * diff);
                }
                let residual = (err_sq.total().max(0.0) / norm_sq).sqrt();
                rows.push(MonomialRow { powers: [a, b, c], residual });
                if residual > max_residual {
                    max_residual = residual;
                }
            }
        }
    }
    Ok(SpanReport { rows, max_residual })
}
