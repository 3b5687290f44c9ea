//! Band-limited analysis, synthesis, and spectral multiplier operators.
//!
//! A `GridFunction` holds samples on a quadrature grid; `analyze` projects it
//! onto the eigenbasis below a cutoff (exact for band-limited inputs when the
//! grid certifies products of that band), `synthesize` evaluates an expansion
//! back on a grid, and a multiplier F(t^2 L) acts either directly on
//! coefficients or through its kernel by quadrature:
//! g(x_i) = sum_j w_j K_t(x_i, x_j) f(x_j). The two routes agree on
//! band-limited data, which is the operator-level consistency check this
//! module exposes, together with multiplier commutativity and a discrete
//! Young convolution bound.

use crate::error::{Error, Result};
use crate::filters::Filter;
use crate::kernels::KernelOp;
use crate::manifolds::{Eigenpair, Manifold, Point, QuadratureGrid};
use crate::sum::{dot, Neumaier};
use std::sync::Arc;

/// Samples of a function on a fixed quadrature grid.
#[derive(Debug, Clone)]
pub struct GridFunction {
    pub grid: Arc<QuadratureGrid>,
    pub values: Vec<f64>,
}

impl GridFunction {
    pub fn new(grid: Arc<QuadratureGrid>, values: Vec<f64>) -> Result<Self> {
        if values.len() != grid.len() {
            return Err(Error::LengthMismatch { expected: grid.len(), got: values.len() });
        }
        Ok(GridFunction { grid, values })
    }

    /// Samples a closure at every grid node.
    pub fn sample(grid: Arc<QuadratureGrid>, f: impl FnMut(&Point) -> f64) -> Self {
        let values = grid.nodes.iter().map(f).collect();
        GridFunction { grid, values }
    }

    /// Samples one eigenfunction.
    pub fn from_eigenpair(grid: Arc<QuadratureGrid>, pair: &Eigenpair) -> Result<Self> {
        let values: Result<Vec<f64>> = grid.nodes.iter().map(|x| pair.evaluate(x)).collect();
        Ok(GridFunction { grid, values: values? })
    }

    pub fn len(&self) -> usize {
        self.values.len()
    }

    pub fn is_empty(&self) -> bool {
        self.values.is_empty()
    }
}

/// Coefficients against the canonical eigenbasis enumeration below a cutoff.
#[derive(Debug, Clone)]
pub struct SpectralCoeffs {
    pub model: Manifold,
    pub cutoff_omega: f64,
    pairs: Arc<Vec<Eigenpair>>,
    pub coeffs: Vec<f64>,
}

impl SpectralCoeffs {
    /// Wraps an explicit coefficient vector aligned with the enumeration
    /// below `omega`.
    pub fn from_coeffs(model: Manifold, omega: f64, coeffs: Vec<f64>) -> Result<Self> {
        let pairs = Arc::new(model.eigenpairs_up_to(omega)?);
        if coeffs.len() != pairs.len() {
            return Err(Error::LengthMismatch { expected: pairs.len(), got: coeffs.len() });
        }
        Ok(SpectralCoeffs { model, cutoff_omega: omega, pairs, coeffs })
    }

    /// Builds coefficients by evaluating a closure on each eigenpair.
    pub fn build(model: Manifold, omega: f64, f: impl FnMut(&Eigenpair) -> f64) -> Result<Self> {
        let pairs = Arc::new(model.eigenpairs_up_to(omega)?);
        let coeffs = pairs.iter().map(f).collect();
        Ok(SpectralCoeffs { model, cutoff_omega: omega, pairs, coeffs })
    }

    /// Wires together parts that are already known to be aligned.
    pub(crate) fn from_parts(
        model: Manifold,
        omega: f64,
        pairs: Arc<Vec<Eigenpair>>,
        coeffs: Vec<f64>,
    ) -> Self {
        debug_assert_eq!(pairs.len(), coeffs.len());
        SpectralCoeffs { model, cutoff_omega: omega, pairs, coeffs }
    }

    pub fn pairs(&self) -> &[Eigenpair] {
        &self.pairs
    }

    pub(crate) fn pairs_arc(&self) -> Arc<Vec<Eigenpair>> {
        Arc::clone(&self.pairs)
    }

    pub fn len(&self) -> usize {
        self.coeffs.len()
    }

    pub fn is_empty(&self) -> bool {
        self.coeffs.is_empty()
    }

    /// Evaluates the expansion at one point.
    pub fn eval(&self, x: &Point) -> Result<f64> {
        let vals = self.model.eval_basis(&self.pairs, x)?;
        Ok(dot(&self.coeffs, &vals))
    }
}

/// Projects grid samples onto the eigenbasis below `omega` by quadrature.
/// The grid must integrate products of eigenfunctions below `omega` exactly,
/// otherwise the projection is meaningless and the call is rejected.
pub fn analyze(f: &GridFunction, omega: f64) -> Result<SpectralCoeffs> {
    let grid = &f.grid;
    if !grid.certifies_pair_omega(omega) {
        return Err(Error::BandExceedsGrid {
            needed_degree: 2 * grid.manifold.degree_for(omega),
            exactness: grid.exactness,
        });
    }
    let pairs = Arc::new(grid.manifold.eigenpairs_up_to(omega)?);
    let mut acc = vec![Neumaier::new(); pairs.len()];
    for ((x, &w), &fv) in grid.nodes.iter().zip(&grid.weights).zip(&f.values) {
        let vals = grid.manifold.eval_basis(&pairs, x)?;
        let wf = w * fv;
        for (a, v) in acc.iter_mut().zip(&vals) {
            a.add(wf * v);
        }
    }
    Ok(SpectralCoeffs {
        model: grid.manifold,
        cutoff_omega: omega,
        pairs,
        coeffs: acc.into_iter().map(|a| a.total()).collect(),
    })
}

/// Evaluates an expansion on a grid.
pub fn synthesize(c: &SpectralCoeffs, grid: Arc<QuadratureGrid>) -> Result<GridFunction> {
    if grid.manifold != c.model {
        return Err(Error::ModelMismatch);
    }
    let mut values = Vec::with_capacity(grid.len());
    for x in &grid.nodes {
        let vals = c.model.eval_basis(&c.pairs, x)?;
        values.push(dot(&c.coeffs, &vals));
    }
    Ok(GridFunction { grid, values })
}

/// Applies F(t^2 L) on coefficients: c_l -> F(t^2 lambda_l) c_l.
pub fn apply_multiplier_spectral(
    c: &SpectralCoeffs,
    filter: &Filter,
    t: f64,
) -> Result<SpectralCoeffs> {
    filter.validate()?;
    if !t.is_finite() || t <= 0.0 {
        return Err(Error::ScaleOutOfRange { t });
    }
    let coeffs = c
        .pairs
        .iter()
        .zip(&c.coeffs)
        .map(|(p, &cv)| filter.eval_raw(t * t * p.lambda) * cv)
        .collect();
    Ok(SpectralCoeffs {
        model: c.model,
        cutoff_omega: c.cutoff_omega,
        pairs: Arc::clone(&c.pairs),
        coeffs,
    })
}

/// Applies F(t^2 L) through its kernel by quadrature on the sample grid:
/// g_i = sum_j w_j K_t(x_i, x_j) f_j, with the kernel truncated at `omega`.
/// No coefficient pass is involved, so this is an independent route whose
/// agreement with `apply_multiplier_spectral` is a real consistency check.
/// The grid must certify eigenfunction products below `omega`.
pub fn apply_multiplier_grid(
    f: &GridFunction,
    filter: &Filter,
    t: f64,
    omega: f64,
) -> Result<GridFunction> {
    let grid = &f.grid;
    if !grid.certifies_pair_omega(omega) {
        return Err(Error::BandExceedsGrid {
            needed_degree: 2 * grid.manifold.degree_for(omega),
            exactness: grid.exactness,
        });
    }
    let op = KernelOp::with_cutoff(grid.manifold, filter, t, omega)?;
    let wf: Vec<f64> = grid.weights.iter().zip(&f.values).map(|(&w, &v)| w * v).collect();
    let mut values = Vec::with_capacity(grid.len());
    for x in &grid.nodes {
        let row = op.row(x, &grid.nodes)?;
        values.push(dot(&row, &wf));
    }
    Ok(GridFunction { grid: Arc::clone(grid), values })
}

/// Maximum relative discrepancy between applying two multipliers in either
/// order on the same coefficients. Scalar multipliers commute, so anything
/// beyond rounding indicates a broken coefficient path.
pub fn scalar_commutation_check(
    c: &SpectralCoeffs,
    fa: &Filter,
    ta: f64,
    fb: &Filter,
    tb: f64,
) -> Result<f64> {
    let ab = apply_multiplier_spectral(&apply_multiplier_spectral(c, fb, tb)?, fa, ta)?;
    let ba = apply_multiplier_spectral(&apply_multiplier_spectral(c, fa, ta)?, fb, tb)?;
    let scale = c.coeffs.iter().fold(0.0f64, |m, v| m.max(v.abs())).max(f64::MIN_POSITIVE);
    let mut worst = 0.0f64;
    for (x, y) in ab.coeffs.iter().zip(&ba.coeffs) {
        worst = worst.max((x - y).abs() / scale);
    }
    Ok(worst)
}

/// Weighted l^p norm of grid samples; p = inf takes the node maximum.
pub fn grid_lp_norm(f: &GridFunction, p: f64) -> Result<f64> {
    if !(p >= 1.0) {
        return Err(Error::InvalidExponent { name: "p", value: p });
    }
    if p.is_infinite() {
        return Ok(f.values.iter().fold(0.0f64, |m, v| m.max(v.abs())));
    }
    let mut acc = Neumaier::new();
    for (&w, &v) in f.grid.weights.iter().zip(&f.values) {
        acc.add(w * v.abs().powf(p));
    }
    Ok(acc.total().max(0.0).powf(1.0 / p))
}

/// One verified instance of the discrete Young inequality.
#[derive(Debug, Clone, Copy)]
pub struct YoungCheck {
    pub p: f64,
    pub alpha: f64,
    /// Target exponent from 1/q = 1/p + 1/alpha - 1.
    pub q: f64,
    /// ||F(t^2 L) f||_q computed by kernel quadrature.
    pub lhs: f64,
    /// c ||f||_p with c the larger of the row and column alpha-norm maxima
    /// of the weighted kernel matrix.
    pub rhs: f64,
    pub constant: f64,
    pub satisfied: bool,
}

/// Verifies ||K_t * f||_q <= c ||f||_p with c read off the kernel matrix on
/// the sample grid, so the discrete inequality must hold up to rounding.
pub fn young_bound_check(
    f: &GridFunction,
    filter: &Filter,
    t: f64,
    omega: f64,
    p: f64,
    alpha: f64,
) -> Result<YoungCheck> {
    if !(p >= 1.0) {
        return Err(Error::InvalidExponent { name: "p", value: p });
    }
    if !(alpha >= 1.0) {
        return Err(Error::InvalidExponent { name: "alpha", value: alpha });
    }
    let inv_q = 1.0 / p + 1.0 / alpha - 1.0;
    if inv_q < -1e-12 {
        return Err(Error::IncompatibleYoungExponents { p, alpha });
    }
    let q = if inv_q <= 0.0 { f64::INFINITY } else { 1.0 / inv_q };

    let grid = &f.grid;
    if !grid.certifies_pair_omega(omega) {
        return Err(Error::BandExceedsGrid {
            needed_degree: 2 * grid.manifold.degree_for(omega),
            exactness: grid.exactness,
        });
    }
    let op = KernelOp::with_cutoff(grid.manifold, filter, t, omega)?;
    let n = grid.len();
    let matrix = op.matrix(grid)?;

    let section = |get: &dyn Fn(usize, usize) -> f64| -> f64 {
        let mut worst = 0.0f64;
        for i in 0..n {
            let norm = if alpha.is_finite() {
                let mut acc = Neumaier::new();
                for j in 0..n {
                    acc.add(grid.weights[j] * get(i, j).abs().powf(alpha));
                }
                acc.total().max(0.0).powf(1.0 / alpha)
            } else {
                (0..n).fold(0.0f64, |m, j| m.max(get(i, j).abs()))
            };
            worst = worst.max(norm);
        }
        worst
    };
    let row_max = section(&|i, j| matrix[i * n + j]);
    let col_max = section(&|i, j| matrix[j * n + i]);
    let constant = row_max.max(col_max);

    let wf: Vec<f64> = grid.weights.iter().zip(&f.values).map(|(&w, &v)| w * v).collect();
    let g_values: Vec<f64> = (0..n).map(|i| dot(&matrix[i * n..(i + 1) * n], &wf)).collect();
    let g = GridFunction { grid: Arc::clone(grid), values: g_values };

    let lhs = grid_lp_norm(&g, q)?;
    let rhs = constant * grid_lp_norm(f, p)?;
    Ok(YoungCheck { p, alpha, q, lhs, rhs, constant, satisfied: lhs <= rhs * (1.0 + 1e-9) })
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::assert_abs_diff_eq;

    fn circle_grid(res: usize) -> Arc<QuadratureGrid> {
        Arc::new(Manifold::Circle.grid(res).unwrap())
    }

    #[test]
    fn analyze_recovers_eigenfunction_coefficients() {
        let grid = circle_grid(64);
        let pairs = Manifold::Circle.eigenpairs_up_to(100.0).unwrap();
        let f = GridFunction::from_eigenpair(Arc::clone(&grid), &pairs[5]).unwrap();
        let c = analyze(&f, 100.0).unwrap();
        for (l, &cv) in c.coeffs.iter().enumerate() {
            let want = if l == 5 { 1.0 } else { 0.0 };
            assert_abs_diff_eq!(cv, want, epsilon = 1e-10);
        }
    }

    #[test]
    fn synthesis_inverts_analysis_on_bandlimited_data() {
        let grid = circle_grid(48);
        let f = GridFunction::sample(Arc::clone(&grid), |x| {
            let Point::Circle(v) = x else { unreachable!() };
            1.5 + v.cos() - 0.25 * (3.0 * v).sin()
        });
        let c = analyze(&f, 100.0).unwrap();
        let back = synthesize(&c, Arc::clone(&grid)).unwrap();
        for (a, b) in f.values.iter().zip(&back.values) {
            assert_abs_diff_eq!(a, b, epsilon = 1e-10);
        }
    }

    #[test]
    fn analysis_rejects_band_beyond_grid_exactness() {
        let grid = circle_grid(16);
        let f = GridFunction::sample(Arc::clone(&grid), |_| 1.0);
        // Degree 10 products need exactness 20 > 15.
        assert!(matches!(analyze(&f, 100.0), Err(Error::BandExceedsGrid { .. })));
        assert!(analyze(&f, 16.0).is_ok());
    }

    #[test]
    fn low_pass_multiplier_fixes_low_band_exactly() {
        // eta_m equals 1 below 4^{m-1}, so those coefficients pass through
        // bitwise; above 4^m everything is annihilated.
        let m = 2u32;
        let c = SpectralCoeffs::build(Manifold::Circle, 300.0, |p| 1.0 / (1.0 + p.lambda)).unwrap();
        let out = apply_multiplier_spectral(&c, &Filter::EtaM(m), 1.0).unwrap();
        for ((p, &before), &after) in c.pairs().iter().zip(&c.coeffs).zip(&out.coeffs) {
            if p.lambda <= 4.0f64.powi(m as i32 - 1) {
                assert_eq!(before, after, "low band must be untouched at lambda={}", p.lambda);
            }
            if p.lambda >= 4.0f64.powi(m as i32) {
                assert_eq!(after, 0.0, "high band must vanish at lambda={}", p.lambda);
            }
        }
    }

    #[test]
    fn grid_and_spectral_routes_agree_on_bandlimited_input() {
        for (model, res, omega) in
            [(Manifold::Circle, 64usize, 100.0), (Manifold::Sphere2, 12, 20.0)]
        {
            let grid = Arc::new(model.grid(res).unwrap());
            let pairs = model.eigenpairs_up_to(omega).unwrap();
            let f = GridFunction::sample(Arc::clone(&grid), |x| {
                pairs[1].evaluate(x).unwrap() + 0.5 * pairs[pairs.len() - 1].evaluate(x).unwrap()
            });
            let via_grid = apply_multiplier_grid(&f, &Filter::Gaussian, 0.8, omega).unwrap();
            let c = analyze(&f, omega).unwrap();
            let fc = apply_multiplier_spectral(&c, &Filter::Gaussian, 0.8).unwrap();
            let via_spectral = synthesize(&fc, Arc::clone(&grid)).unwrap();
            for (a, b) in via_grid.values.iter().zip(&via_spectral.values) {
                assert_abs_diff_eq!(a, b, epsilon = 1e-8);
            }
        }
    }

    #[test]
    fn multipliers_commute_to_rounding() {
        let c = SpectralCoeffs::build(Manifold::Torus2, 60.0, |p| (-p.lambda / 30.0).exp())
            .unwrap();
        let dev =
            scalar_commutation_check(&c, &Filter::EtaM(2), 1.0, &Filter::PhiJ(1), 0.5).unwrap();
        assert!(dev <= 1e-12, "commutation deviation {dev}");
    }

    #[test]
    fn young_bound_holds_on_eigenfunction_input() {
        let grid = circle_grid(48);
        let pairs = Manifold::Circle.eigenpairs_up_to(64.0).unwrap();
        let f = GridFunction::from_eigenpair(Arc::clone(&grid), &pairs[3]).unwrap();
        for (p, alpha) in [(1.0, 1.0), (2.0, 1.0), (2.0, 2.0), (1.0, 2.0)] {
            let chk = young_bound_check(&f, &Filter::Gaussian, 0.5, 64.0, p, alpha).unwrap();
            assert!(chk.satisfied, "p={p} alpha={alpha}: lhs {} rhs {}", chk.lhs, chk.rhs);
        }
        // 1/4 + 1/2 - 1 < 0: no valid target exponent exists.
        assert!(young_bound_check(&f, &Filter::Gaussian, 0.5, 64.0, 4.0, 2.0).is_err());
    }

    #[test]
    fn expansion_eval_matches_synthesis() {
        let c = SpectralCoeffs::build(Manifold::Sphere2, 12.0, |p| 1.0 / (1.0 + p.index as f64))
            .unwrap();
        let grid = Arc::new(Manifold::Sphere2.grid(6).unwrap());
        let g = synthesize(&c, Arc::clone(&grid)).unwrap();
        for (x, &v) in grid.nodes.iter().zip(&g.values).step_by(13) {
            assert_abs_diff_eq!(c.eval(x).unwrap(), v, epsilon = 1e-12);
        }
    }
}
