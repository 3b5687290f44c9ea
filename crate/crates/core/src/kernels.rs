//! Spectral multiplier kernels K_t(x, y) = sum_l F(t^2 lambda_l) u_l(x) u_l(y).
//!
//! For a rapidly decaying profile F the kernel concentrates at scale t:
//! |K_t(x, y)| <= C t^{-s} (1 + d(x, y)/t)^{-(s+1)} with C independent of t,
//! the cross-section norms obey (int |K_t(x, .)|^alpha)^{1/alpha} <= C t^{-s/alpha'},
//! and int (1 + d/t)^{-M} <= C t^s for M > s. This module truncates the
//! eigenfunction sum with an explicit tail bound, evaluates kernels pointwise
//! and in rows against a fixed base point, and measures those localization
//! quantities by quadrature.
//!
//! Truncation: with a finite filter support [0, hi] the sum stops exactly at
//! hi / t^2. Otherwise dyadic spectral windows [L, 4L] are scanned and the sum
//! stops once |F| sup_window . sup|u_l|^2 . #window drops below the tail
//! tolerance and keeps halving, which bounds the whole remaining tail by a
//! geometric series. Filters with no declared decay are rejected.

use crate::error::{Error, Result};
use crate::filters::Filter;
use crate::manifolds::{legendre, EigenLabel, Eigenpair, Manifold, Point, QuadratureGrid, SQRT_2};
use crate::sum::Neumaier;
use std::sync::Arc;

/// A truncated spectral multiplier kernel, reusable across evaluation points.
#[derive(Debug, Clone)]
pub struct KernelOp {
    pub model: Manifold,
    pub filter: Filter,
    pub t: f64,
    cutoff: f64,
    pairs: Arc<Vec<Eigenpair>>,
    /// Distinct eigenvalues, ascending.
    levels: Vec<f64>,
    /// Eigenpair index -> level index.
    level_of: Vec<usize>,
    /// F(t^2 lambda) per level.
    fvals: Vec<f64>,
}

fn validate_scale(filter: &Filter, t: f64) -> Result<()> {
    if !t.is_finite() || t <= 0.0 {
        return Err(Error::ScaleOutOfRange { t });
    }
    if filter.value_at_zero() != 0.0 && t > 1.0 {
        return Err(Error::ScaleOutOfRange { t });
    }
    Ok(())
}

/// Spectral cutoff implementing the tail rule described in the module docs.
fn truncation_cutoff(model: Manifold, filter: &Filter, t: f64, tail_tol: f64) -> Result<f64> {
    if let Some(hi) = filter.support_upper() {
        return Ok(hi / (t * t));
    }
    if !filter.decays() {
        return Err(Error::FilterNotDecaying);
    }
    if !(tail_tol > 0.0) {
        return Err(Error::InvalidExponent { name: "tail_tol", value: tail_tol });
    }
    let window_mass = |lam: f64| -> f64 {
        let mut fmax: f64 = 0.0;
        for c in [1.0, 1.5, 2.0, 3.0, 4.0] {
            fmax = fmax.max(filter.eval_raw(t * t * c * lam).abs());
        }
        let count = (model.weyl_count(4.0 * lam) - model.weyl_count(lam)) as f64;
        fmax * model.sup_sq_bound(4.0 * lam) * count
    };
    let mut lam = (1.0 / (t * t)).max(16.0);
    for _ in 0..60 {
        let m0 = window_mass(lam);
        if m0 <= tail_tol / 2.0 && window_mass(2.0 * lam) <= m0 / 2.0 {
            return Ok(lam);
        }
        lam *= 2.0;
        if lam > 1e14 {
            break;
        }
    }
    Err(Error::TruncationUnresolved { t })
}

impl KernelOp {
    /// Builds the kernel with the automatic tail rule.
    pub fn new(model: Manifold, filter: &Filter, t: f64, tail_tol: f64) -> Result<Self> {
        filter.validate()?;
        validate_scale(filter, t)?;
        let cutoff = truncation_cutoff(model, filter, t, tail_tol)?;
        Self::with_cutoff(model, filter, t, cutoff)
    }

    /// Builds the kernel truncated at an explicit spectral cutoff.
    pub fn with_cutoff(model: Manifold, filter: &Filter, t: f64, cutoff: f64) -> Result<Self> {
        filter.validate()?;
        validate_scale(filter, t)?;
        let pairs = model.eigenpairs_up_to(cutoff)?;
        let mut levels: Vec<f64> = Vec::new();
        let mut level_of = Vec::with_capacity(pairs.len());
        for p in &pairs {
            if levels.last() != Some(&p.lambda) {
                levels.push(p.lambda);
            }
            level_of.push(levels.len() - 1);
        }
        let fvals: Vec<f64> = levels.iter().map(|&l| filter.eval_raw(t * t * l)).collect();
        Ok(KernelOp {
            model,
            filter: filter.clone(),
            t,
            cutoff,
            pairs: Arc::new(pairs),
            levels,
            level_of,
            fvals,
        })
    }

    pub fn cutoff_omega(&self) -> f64 {
        self.cutoff
    }

    pub fn pair_count(&self) -> usize {
        self.pairs.len()
    }

    pub fn pairs(&self) -> &[Eigenpair] {
        &self.pairs
    }

    /// Pointwise kernel value; bitwise symmetric in (x, y) because each term
    /// is accumulated as F . (u(x) u(y)).
    pub fn eval(&self, x: &Point, y: &Point) -> Result<f64> {
        let vx = self.model.eval_basis(&self.pairs, x)?;
        let vy = self.model.eval_basis(&self.pairs, y)?;
        let mut acc = Neumaier::new();
        for l in 0..vx.len() {
            acc.add(self.fvals[self.level_of[l]] * (vx[l] * vy[l]));
        }
        Ok(acc.total())
    }

    /// Kernel row against a fixed base point.
    pub fn row(&self, x: &Point, ys: &[Point]) -> Result<Vec<f64>> {
        let frame = KernelFrame::new(self, x)?;
        let mut sums = vec![0.0; self.levels.len()];
        let mut out = Vec::with_capacity(ys.len());
        for y in ys {
            frame.level_sums(y, &mut sums)?;
            let mut acc = Neumaier::new();
            for (f, s) in self.fvals.iter().zip(&sums) {
                acc.add(f * s);
            }
            out.push(acc.total());
        }
        Ok(out)
    }

    /// Dense kernel matrix over the grid nodes, row-major.
    pub fn matrix(&self, grid: &QuadratureGrid) -> Result<Vec<f64>> {
        if grid.manifold != self.model {
            return Err(Error::ModelMismatch);
        }
        let n = grid.len();
        let mut out = Vec::with_capacity(n * n);
        for x in &grid.nodes {
            out.extend(self.row(x, &grid.nodes)?);
        }
        Ok(out)
    }
}

/// Level sums sum_{lambda_l = lambda} u_l(x) u_l(y) for a fixed x, evaluated
/// at many y. On the sphere the azimuthal orders with zero weight at x are
/// skipped entirely, so a polar base point costs O(k_max) per y instead of
/// O(k_max^2).
struct KernelFrame<'a> {
    op: &'a KernelOp,
    x_vals: Vec<f64>,
    sphere: Option<SphereFrame>,
}

struct SphereFrame {
    k_max: u32,
    /// Per azimuthal order m: cosine and sine weights indexed by k - m, or
    /// None when every weight vanishes.
    orders: Vec<Option<(Vec<f64>, Vec<f64>)>>,
}

impl<'a> KernelFrame<'a> {
    fn new(op: &'a KernelOp, x: &Point) -> Result<Self> {
        let x_vals = op.model.eval_basis(&op.pairs, x)?;
        let sphere = if op.model == Manifold::Sphere2 {
            let k_max = op.levels.len() as u32 - 1;
            let mut orders: Vec<Option<(Vec<f64>, Vec<f64>)>> = vec![None; k_max as usize + 1];
            for (l, p) in op.pairs.iter().enumerate() {
                let EigenLabel::Sphere2 { degree, order } = p.label else {
                    return Err(Error::ModelMismatch);
                };
                let w = x_vals[l];
                if w == 0.0 {
                    continue;
                }
                let m = order.unsigned_abs();
                let slot = orders[m as usize].get_or_insert_with(|| {
                    let len = (k_max - m) as usize + 1;
                    (vec![0.0; len], vec![0.0; len])
                });
                let at = (degree - m) as usize;
                if order >= 0 {
                    let scale = if order == 0 { 1.0 } else { SQRT_2 };
                    slot.0[at] = scale * w;
                } else {
                    slot.1[at] = SQRT_2 * w;
                }
            }
            Some(SphereFrame { k_max, orders })
        } else {
            None
        };
        Ok(KernelFrame { op, x_vals, sphere })
    }

    fn level_sums(&self, y: &Point, out: &mut [f64]) -> Result<()> {
        debug_assert_eq!(out.len(), self.op.levels.len());
        out.fill(0.0);
        if let Some(sf) = &self.sphere {
            let Point::Sphere2(v) = y else { return Err(Error::ModelMismatch) };
            let rho = v[0].hypot(v[1]);
            let ct = v[2].clamp(-1.0, 1.0);
            let st = rho.min(1.0);
            let phi = if rho == 0.0 { 0.0 } else { v[1].atan2(v[0]) };
            let mut col = Vec::new();
            for (m, slot) in sf.orders.iter().enumerate() {
                let Some((wc, ws)) = slot else { continue };
                let m = m as u32;
                legendre::column(m, sf.k_max, ct, st, &mut col);
                let (smp, cmp) = (m as f64 * phi).sin_cos();
                for (off, &q) in col.iter().enumerate() {
                    let k = m as usize + off;
                    out[k] += q * (wc[off] * cmp + ws[off] * smp);
                }
            }
        } else {
            let vy = self.op.model.eval_basis(&self.op.pairs, y)?;
            for (l, &xv) in self.x_vals.iter().enumerate() {
                if xv != 0.0 {
                    out[self.op.level_of[l]] += xv * vy[l];
                }
            }
        }
        Ok(())
    }
}

/// Localization data for one scale t.
#[derive(Debug, Clone)]
pub struct KernelProfile {
    pub t: f64,
    /// max over sampled pairs of t^s |K_t| (1 + d/t)^{s+1}.
    pub fitted_constant: f64,
    /// (geodesic distance, |K_t(x0, y)|) per sampled pair.
    pub samples: Vec<(f64, f64)>,
    /// (alpha, cross-section norm) pairs; filled by the cross-section driver.
    pub alpha_norms: Vec<(f64, f64)>,
}

/// Evaluates pointwise; builds the kernel once per call, so batch work should
/// go through `KernelOp` directly.
pub fn kernel_eval(
    model: Manifold,
    filter: &Filter,
    t: f64,
    x: &Point,
    y: &Point,
    tail_tol: f64,
) -> Result<f64> {
    KernelOp::new(model, filter, t, tail_tol)?.eval(x, y)
}

/// Relative tail tolerance for profile work, scaled to the diagonal size t^{-s}.
fn profile_tail_tol(model: Manifold, t: f64) -> f64 {
    1e-9 * t.powi(-(model.dim() as i32))
}

/// Localization profiles at the given scales, sampling pairs (base point,
/// grid node). By homogeneity one base point per model covers a full symmetry
/// class of pairs.
pub fn localization_profile(
    model: Manifold,
    filter: &Filter,
    t_list: &[f64],
    pair_grid: &QuadratureGrid,
) -> Result<Vec<KernelProfile>> {
    if t_list.is_empty() {
        return Err(Error::EmptyScaleList);
    }
    if pair_grid.manifold != model {
        return Err(Error::ModelMismatch);
    }
    filter.validate()?;
    for &t in t_list {
        validate_scale(filter, t)?;
    }
    let mut cutoff: f64 = 0.0;
    for &t in t_list {
        cutoff = cutoff.max(truncation_cutoff(model, filter, t, profile_tail_tol(model, t))?);
    }
    let t_ref = t_list.iter().copied().fold(f64::INFINITY, f64::min);
    let op = KernelOp::with_cutoff(model, filter, t_ref, cutoff)?;
    let frame = KernelFrame::new(&op, &model.base_point())?;

    let s = model.dim() as i32;
    let fvals_per_t: Vec<Vec<f64>> = t_list
        .iter()
        .map(|&t| op.levels.iter().map(|&l| filter.eval_raw(t * t * l)).collect())
        .collect();

    let x0 = model.base_point();
    let mut profiles: Vec<KernelProfile> = t_list
        .iter()
        .map(|&t| KernelProfile {
            t,
            fitted_constant: 0.0,
            samples: Vec::with_capacity(pair_grid.len()),
            alpha_norms: Vec::new(),
        })
        .collect();

    let mut sums = vec![0.0; op.levels.len()];
    for y in &pair_grid.nodes {
        frame.level_sums(y, &mut sums)?;
        let d = model.geodesic_distance(&x0, y)?;
        for (ti, profile) in profiles.iter_mut().enumerate() {
            let t = t_list[ti];
            let mut acc = Neumaier::new();
            for (f, sv) in fvals_per_t[ti].iter().zip(&sums) {
                acc.add(f * sv);
            }
            let k = acc.total().abs();
            profile.samples.push((d, k));
            let weighted = t.powi(s) * k * (1.0 + d / t).powi(s + 1);
            if weighted > profile.fitted_constant {
                profile.fitted_constant = weighted;
            }
        }
    }
    Ok(profiles)
}

/// One cross-section norm measurement.
#[derive(Debug, Clone, Copy)]
pub struct CrossSection {
    pub t: f64,
    pub alpha: f64,
    /// (int |K_t(x, .)|^alpha dy)^{1/alpha}, or the sup for alpha = inf.
    pub norm: f64,
    /// t^{s/alpha'} . norm, the quantity that stays bounded across scales.
    pub scaled: f64,
}

/// Internal quadrature resolution for cross sections at a spectral cutoff.
fn section_resolution(model: Manifold, cutoff: f64) -> usize {
    let deg = model.degree_for(cutoff) as usize;
    match model {
        Manifold::Circle => (8 * (deg + 1)).clamp(256, 16384),
        Manifold::Torus2 => (4 * (deg + 1)).clamp(64, 1024),
        Manifold::Sphere2 => (2 * (deg + 1)).clamp(64, 512),
    }
}

/// Cross-section norms over scales and alphas, sharing one pass over the
/// internal quadrature grid.
pub fn cross_section_norms(
    model: Manifold,
    filter: &Filter,
    t_list: &[f64],
    x: &Point,
    alphas: &[f64],
) -> Result<Vec<CrossSection>> {
    if t_list.is_empty() {
        return Err(Error::EmptyScaleList);
    }
    filter.validate()?;
    model.validate_point(x)?;
    for &a in alphas {
        if !(a >= 1.0) {
            return Err(Error::InvalidExponent { name: "alpha", value: a });
        }
    }
    for &t in t_list {
        validate_scale(filter, t)?;
    }
    let mut cutoff: f64 = 0.0;
    for &t in t_list {
        cutoff = cutoff.max(truncation_cutoff(model, filter, t, profile_tail_tol(model, t))?);
    }
    let t_ref = t_list.iter().copied().fold(f64::INFINITY, f64::min);
    let op = KernelOp::with_cutoff(model, filter, t_ref, cutoff)?;
    let grid = model.grid(section_resolution(model, cutoff))?;
    let frame = KernelFrame::new(&op, x)?;

    let fvals_per_t: Vec<Vec<f64>> = t_list
        .iter()
        .map(|&t| op.levels.iter().map(|&l| filter.eval_raw(t * t * l)).collect())
        .collect();

    // Accumulators indexed by (t, alpha).
    let mut acc: Vec<Vec<Neumaier>> = vec![vec![Neumaier::new(); alphas.len()]; t_list.len()];
    let mut sup: Vec<Vec<f64>> = vec![vec![0.0; alphas.len()]; t_list.len()];
    let mut sums = vec![0.0; op.levels.len()];
    for (y, &w) in grid.nodes.iter().zip(&grid.weights) {
        frame.level_sums(y, &mut sums)?;
        for (ti, fv) in fvals_per_t.iter().enumerate() {
            let mut kacc = Neumaier::new();
            for (f, sv) in fv.iter().zip(&sums) {
                kacc.add(f * sv);
            }
            let k = kacc.total().abs();
            for (ai, &a) in alphas.iter().enumerate() {
                if a.is_finite() {
                    acc[ti][ai].add(w * k.powf(a));
                } else if k > sup[ti][ai] {
                    sup[ti][ai] = k;
                }
            }
        }
    }

    let s = model.dim() as f64;
    let mut out = Vec::with_capacity(t_list.len() * alphas.len());
    for (ti, &t) in t_list.iter().enumerate() {
        for (ai, &a) in alphas.iter().enumerate() {
            let norm = if a.is_finite() { acc[ti][ai].total().max(0.0).powf(1.0 / a) } else { sup[ti][ai] };
            let scaled = t.powf(s * (1.0 - 1.0 / a)) * norm;
            out.push(CrossSection { t, alpha: a, norm, scaled });
        }
    }
    Ok(out)
}

/// Single cross-section norm (int |K_t(x, .)|^alpha)^{1/alpha}.
pub fn cross_section_norm(
    model: Manifold,
    filter: &Filter,
    t: f64,
    x: &Point,
    alpha: f64,
) -> Result<f64> {
    Ok(cross_section_norms(model, filter, &[t], x, &[alpha])?[0].norm)
}

/// Scaled decay integrals t^{-s} int (1 + d(x, y)/t)^{-m_exp} dy.
#[derive(Debug, Clone)]
pub struct DecayCheck {
    /// Maximum over the sampled base points.
    pub value: f64,
    /// Per-base values; these agree to rounding because the base points are
    /// chosen on a common discrete symmetry orbit of the grid.
    pub per_base: Vec<f64>,
}

/// Verifies the scaled decay integral stays O(1); requires m_exp > s.
pub fn integral_decay_check(model: Manifold, t: f64, m_exp: f64) -> Result<DecayCheck> {
    if !t.is_finite() || t <= 0.0 {
        return Err(Error::ScaleOutOfRange { t });
    }
    let s = model.dim() as f64;
    if !(m_exp > s) {
        return Err(Error::InvalidExponent { name: "m_exp", value: m_exp });
    }
    let res = match model {
        Manifold::Circle => ((32.0 / t).ceil() as usize).clamp(128, 16384),
        Manifold::Torus2 => ((16.0 / t).ceil() as usize).clamp(64, 1024),
        Manifold::Sphere2 => ((16.0 / t).ceil() as usize).clamp(64, 512),
    };
    let grid = model.grid(res)?;
    // Base points on one discrete symmetry orbit of the grid.
    let bases: Vec<Point> = match model {
        Manifold::Circle => [0, res / 4, res / 2].iter().map(|&i| grid.nodes[i]).collect(),
        Manifold::Torus2 => [0, res / 4, res / 2]
            .iter()
            .map(|&i| grid.nodes[i * res + i])
            .collect(),
        Manifold::Sphere2 => {
            let n_phi = 2 * res;
            let i0 = res / 2;
            [0, n_phi / 4, n_phi / 2]
                .iter()
                .map(|&j| grid.nodes[i0 * n_phi + j])
                .collect()
        }
    };
    let mut per_base = Vec::with_capacity(bases.len());
    for b in &bases {
        let mut acc = Neumaier::new();
        for (y, &w) in grid.nodes.iter().zip(&grid.weights) {
            let d = model.geodesic_distance(b, y)?;
            acc.add(w * (1.0 + d / t).powf(-m_exp));
        }
        per_base.push(t.powf(-s) * acc.total());
    }
    let value = per_base.iter().copied().fold(0.0, f64::max);
    Ok(DecayCheck { value, per_base })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::filters::{CustomFilter, Decay};
    use approx::assert_abs_diff_eq;

    // Diagonal Gaussian kernel on the circle at t = 1 equals the theta-like
    // series (1/2pi) sum_{n in Z} exp(-n^2); the series converges to 1e-12
    // within a handful of terms.
    #[test]
    fn circle_gaussian_diagonal_matches_series() {
        let mut series = 1.0;
        for n in 1..40 {
            series += 2.0 * (-((n * n) as f64)).exp();
        }
        let want = series / std::f64::consts::TAU;
        let x = Point::Circle(0.0);
        let got = kernel_eval(Manifold::Circle, &Filter::Gaussian, 1.0, &x, &x, 1e-12).unwrap();
        assert_abs_diff_eq!(got, want, epsilon = 1e-12);
        // Off the base point the diagonal is the same by homogeneity.
        let y = Point::Circle(2.4);
        let got2 = kernel_eval(Manifold::Circle, &Filter::Gaussian, 1.0, &y, &y, 1e-12).unwrap();
        assert_abs_diff_eq!(got2, want, epsilon = 1e-12);
    }

    #[test]
    fn kernel_is_symmetric() {
        let cases = [
            (Manifold::Circle, Point::Circle(0.3), Point::Circle(2.0)),
            (Manifold::Torus2, Point::Torus2(0.1, 1.0), Point::Torus2(4.0, 2.5)),
            (Manifold::Sphere2, Point::sphere_angles(0.4, 1.0), Point::sphere_angles(2.0, 5.0)),
        ];
        for (model, x, y) in cases {
            let op = KernelOp::new(model, &Filter::Gaussian, 0.5, 1e-10).unwrap();
            let kxy = op.eval(&x, &y).unwrap();
            let kyx = op.eval(&y, &x).unwrap();
            assert!((kxy - kyx).abs() <= 1e-12 * kxy.abs().max(1.0), "{model}: {kxy} vs {kyx}");
        }
    }

    #[test]
    fn truncation_is_sound_under_cutoff_growth() {
        let tol = 1e-9;
        for model in [Manifold::Circle, Manifold::Sphere2] {
            let op = KernelOp::new(model, &Filter::Gaussian, 0.5, tol).unwrap();
            let refined =
                KernelOp::with_cutoff(model, &Filter::Gaussian, 0.5, 4.0 * op.cutoff_omega())
                    .unwrap();
            assert!(refined.pair_count() >= 2 * op.pair_count() || op.cutoff_omega() > 60.0);
            let x = model.base_point();
            let y = match model {
                Manifold::Circle => Point::Circle(1.0),
                Manifold::Sphere2 => Point::sphere_angles(1.0, 0.0),
                Manifold::Torus2 => unreachable!(),
            };
            for pt in [(&x, &x), (&x, &y)] {
                let a = op.eval(pt.0, pt.1).unwrap();
                let b = refined.eval(pt.0, pt.1).unwrap();
                assert!((a - b).abs() < tol, "{model}: truncation drift {}", (a - b).abs());
            }
        }
    }

    #[test]
    fn row_matches_pointwise_eval() {
        let model = Manifold::Sphere2;
        let op = KernelOp::new(model, &Filter::Gaussian, 0.7, 1e-10).unwrap();
        let grid = model.grid(6).unwrap();
        let x = Point::sphere_angles(1.2, 0.7);
        let row = op.row(&x, &grid.nodes).unwrap();
        for (y, &rv) in grid.nodes.iter().zip(&row).step_by(17) {
            assert_abs_diff_eq!(op.eval(&x, y).unwrap(), rv, epsilon = 1e-11);
        }
    }

    #[test]
    fn scale_and_decay_preconditions() {
        // F(0) != 0 restricts to t <= 1.
        assert!(KernelOp::new(Manifold::Circle, &Filter::Gaussian, 1.5, 1e-8).is_err());
        // Band filters vanish at zero, so any t > 0 is allowed.
        assert!(KernelOp::new(Manifold::Circle, &Filter::Phi, 1.5, 1e-8).is_ok());
        assert!(KernelOp::new(Manifold::Circle, &Filter::Gaussian, 0.0, 1e-8).is_err());
        // A custom filter without declared decay cannot be truncated.
        let undeclared = Filter::Custom(CustomFilter {
            f: std::sync::Arc::new(|x| 1.0 / (1.0 + x)),
            decay: Decay::Unknown,
        });
        assert!(KernelOp::new(Manifold::Circle, &undeclared, 0.5, 1e-8).is_err());
        // The same profile with a declared support is fine.
        let supported = Filter::Custom(CustomFilter {
            f: std::sync::Arc::new(|x| if x < 9.0 { 1.0 / (1.0 + x) } else { 0.0 }),
            decay: Decay::Support(9.0),
        });
        assert!(KernelOp::new(Manifold::Circle, &supported, 0.5, 1e-8).is_ok());
    }

    #[test]
    fn localization_constants_stable_on_circle() {
        let grid = Manifold::Circle.grid(128).unwrap();
        let ts = [1.0, 0.5, 0.25];
        let profiles =
            localization_profile(Manifold::Circle, &Filter::Gaussian, &ts, &grid).unwrap();
        assert_eq!(profiles.len(), 3);
        let consts: Vec<f64> = profiles.iter().map(|p| p.fitted_constant).collect();
        let max = consts.iter().copied().fold(f64::MIN, f64::max);
        let min = consts.iter().copied().fold(f64::MAX, f64::min);
        assert!(max / min <= 10.0, "constants {consts:?}");
        assert!(localization_profile(Manifold::Circle, &Filter::Gaussian, &[], &grid).is_err());
    }

    // Parseval oracle: the alpha = 2 cross-section norm squared is
    // sum_l F(t^2 lambda_l)^2 u_l(x)^2.
    #[test]
    fn cross_section_two_norm_matches_spectral_oracle() {
        for (model, x) in [
            (Manifold::Circle, Point::Circle(0.0)),
            (Manifold::Sphere2, Point::Sphere2([0.0, 0.0, 1.0])),
        ] {
            let t = 0.5;
            let op = KernelOp::new(model, &Filter::Gaussian, t, 1e-12).unwrap();
            let vx = model.eval_basis(op.pairs(), &x).unwrap();
            let mut acc = Neumaier::new();
            for (l, &v) in vx.iter().enumerate() {
                let f = op.fvals[op.level_of[l]];
                acc.add((f * v) * (f * v));
            }
            let oracle = acc.total().sqrt();
            let got = cross_section_norm(model, &Filter::Gaussian, t, &x, 2.0).unwrap();
            assert!(
                (got - oracle).abs() <= 1e-8 * oracle.max(1.0),
                "{model}: quadrature {got} vs oracle {oracle}"
            );
        }
    }

    #[test]
    fn cross_section_rejects_bad_alpha() {
        let x = Point::Circle(0.0);
        assert!(cross_section_norm(Manifold::Circle, &Filter::Gaussian, 0.5, &x, 0.5).is_err());
    }

    #[test]
    fn decay_integral_is_stable_and_invariant() {
        for model in [Manifold::Circle, Manifold::Torus2, Manifold::Sphere2] {
            let s = model.dim() as f64;
            let mut values = Vec::new();
            for t in [1.0, 0.5, 0.25, 0.125] {
                let chk = integral_decay_check(model, t, s + 1.0).unwrap();
                let spread = chk
                    .per_base
                    .iter()
                    .map(|v| (v - chk.per_base[0]).abs())
                    .fold(0.0, f64::max);
                assert!(spread <= 1e-10 * chk.value, "{model}: base spread {spread}");
                values.push(chk.value);
            }
            let max = values.iter().copied().fold(f64::MIN, f64::max);
            let min = values.iter().copied().fold(f64::MAX, f64::min);
            assert!(max / min < 10.0, "{model}: decay integrals {values:?}");
            assert!(integral_decay_check(model, 0.5, s).is_err());
        }
    }
}
