//! Model manifolds with closed-form Laplace-Beltrami spectra.
//!
//! Three compact homogeneous models are supported:
//!
//! * `Circle`: s = 1, measure 2 pi, eigenvalues n^2 with the real trigonometric
//!   basis 1/sqrt(2 pi), cos(n x)/sqrt(pi), sin(n x)/sqrt(pi);
//! * `Torus2`: s = 2, measure 4 pi^2, eigenvalues n1^2 + n2^2 with products of
//!   the circle basis;
//! * `Sphere2`: s = 2, measure 4 pi, eigenvalues k(k+1) with real orthonormal
//!   spherical harmonics of degree k (multiplicity 2k+1).
//!
//! Enumeration is deterministic: eigenpairs are sorted by eigenvalue and ties
//! are broken by a structural label order (constant before cosine before sine
//! at each frequency; lexicographic factor order on the torus; ascending order
//! within a spherical degree). Eigenvalue counts follow the Weyl law
//! N_omega ~ c omega^{s/2}, which the closed-form counters expose exactly.

mod gauss;
pub mod legendre;

use crate::error::{Error, Result};
use crate::fit::{fit_log_log, RateFit};
use crate::sum::Neumaier;
use std::f64::consts::{PI, TAU};
use std::fmt;

pub const INV_SQRT_PI: f64 = 0.564_189_583_547_756_3;
pub const INV_SQRT_2PI: f64 = 0.398_942_280_401_432_7;
pub const SQRT_2: f64 = std::f64::consts::SQRT_2;

/// Hard cap on the number of eigenpairs a single enumeration may materialize.
pub const MAX_EIGENPAIRS: u64 = 3_000_000;

const UNIT_NORM_TOL: f64 = 1e-8;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum Manifold {
    Circle,
    Torus2,
    Sphere2,
}

impl fmt::Display for Manifold {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Manifold::Circle => "circle",
            Manifold::Torus2 => "torus2",
            Manifold::Sphere2 => "sphere2",
        })
    }
}

impl std::str::FromStr for Manifold {
    type Err = String;
    fn from_str(s: &str) -> std::result::Result<Self, String> {
        match s {
            "circle" => Ok(Manifold::Circle),
            "torus2" | "torus" => Ok(Manifold::Torus2),
            "sphere2" | "sphere" => Ok(Manifold::Sphere2),
            other => Err(format!(
                "unknown manifold model '{other}' (expected circle, torus2, or sphere2)"
            )),
        }
    }
}

/// A point on one of the model manifolds.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum Point {
    /// Angle coordinate; any real value, identified mod 2 pi.
    Circle(f64),
    Torus2(f64, f64),
    /// Unit vector in R^3.
    Sphere2([f64; 3]),
}

impl Point {
    pub fn circle(theta: f64) -> Self {
        Point::Circle(theta)
    }

    pub fn torus(theta1: f64, theta2: f64) -> Self {
        Point::Torus2(theta1, theta2)
    }

    pub fn sphere(v: [f64; 3]) -> Self {
        Point::Sphere2(v)
    }

    /// Sphere point from spherical angles (polar, azimuthal).
    pub fn sphere_angles(theta: f64, phi: f64) -> Self {
        let (st, ct) = theta.sin_cos();
        let (sp, cp) = phi.sin_cos();
        Point::Sphere2([st * cp, st * sp, ct])
    }

    fn manifold(&self) -> Manifold {
        match self {
            Point::Circle(_) => Manifold::Circle,
            Point::Torus2(..) => Manifold::Torus2,
            Point::Sphere2(_) => Manifold::Sphere2,
        }
    }
}

/// Labels of the circle eigenbasis, ordered constant < cos(n) < sin(n) with n ascending.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum CircleLabel {
    Const,
    Cos(u32),
    Sin(u32),
}

impl CircleLabel {
    /// Position in the canonical basis order: 0, then 2n-1 for cos(n), 2n for sin(n).
    pub fn basis_index(self) -> u64 {
        match self {
            CircleLabel::Const => 0,
            CircleLabel::Cos(n) => 2 * n as u64 - 1,
            CircleLabel::Sin(n) => 2 * n as u64,
        }
    }

    pub fn frequency(self) -> u32 {
        match self {
            CircleLabel::Const => 0,
            CircleLabel::Cos(n) | CircleLabel::Sin(n) => n,
        }
    }

    fn eval(self, theta: f64) -> f64 {
        match self {
            CircleLabel::Const => INV_SQRT_2PI,
            CircleLabel::Cos(n) => (n as f64 * theta).cos() * INV_SQRT_PI,
            CircleLabel::Sin(n) => (n as f64 * theta).sin() * INV_SQRT_PI,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum EigenLabel {
    Circle(CircleLabel),
    Torus2(CircleLabel, CircleLabel),
    /// Degree k and order m in [-k, k]; m > 0 carries cos(m phi), m < 0 sin(|m| phi).
    Sphere2 { degree: u32, order: i32 },
}

/// One Laplace-Beltrami eigenfunction with its eigenvalue and position in the
/// canonical enumeration.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Eigenpair {
    pub index: usize,
    pub lambda: f64,
    pub label: EigenLabel,
}

impl Eigenpair {
    /// Evaluates the eigenfunction at a point of the matching manifold.
    pub fn evaluate(&self, x: &Point) -> Result<f64> {
        match (&self.label, x) {
            (EigenLabel::Circle(l), Point::Circle(theta)) => Ok(l.eval(*theta)),
            (EigenLabel::Torus2(l1, l2), Point::Torus2(t1, t2)) => Ok(l1.eval(*t1) * l2.eval(*t2)),
            (EigenLabel::Sphere2 { degree, order }, p @ Point::Sphere2(_)) => {
                let (ct, st, phi) = sphere_coords(p)?;
                let m = order.unsigned_abs();
                let q = legendre::single(*degree, m, ct, st);
                Ok(match order.signum() {
                    0 => q,
                    1 => SQRT_2 * q * (m as f64 * phi).cos(),
                    _ => SQRT_2 * q * (m as f64 * phi).sin(),
                })
            }
            _ => Err(Error::ModelMismatch),
        }
    }
}

/// Quadrature grid on a model manifold.
///
/// `exactness` is the largest combined eigenfunction degree whose products the
/// rule integrates exactly: two basis elements with degrees d1 + d2 <= exactness
/// have exact discrete inner products.
#[derive(Debug, Clone)]
pub struct QuadratureGrid {
    pub manifold: Manifold,
    pub nodes: Vec<Point>,
    pub weights: Vec<f64>,
    pub exactness: u32,
    pub resolution: usize,
}

impl QuadratureGrid {
    pub fn len(&self) -> usize {
        self.nodes.len()
    }

    pub fn is_empty(&self) -> bool {
        self.nodes.is_empty()
    }

    /// Compensated quadrature sum of point values against the weights.
    pub fn integrate(&self, values: &[f64]) -> Result<f64> {
        if values.len() != self.weights.len() {
            return Err(Error::LengthMismatch { expected: self.weights.len(), got: values.len() });
        }
        let mut acc = Neumaier::new();
        for (w, v) in self.weights.iter().zip(values) {
            acc.add(w * v);
        }
        Ok(acc.total())
    }

    /// True when products of any two eigenfunctions with eigenvalue <= omega
    /// integrate exactly on this grid.
    pub fn certifies_pair_omega(&self, omega: f64) -> bool {
        2 * self.manifold.degree_for(omega) <= self.exactness as u64
    }
}

fn sphere_coords(p: &Point) -> Result<(f64, f64, f64)> {
    match p {
        Point::Sphere2(v) => {
            let rho = v[0].hypot(v[1]);
            let ct = v[2].clamp(-1.0, 1.0);
            let phi = if rho == 0.0 { 0.0 } else { v[1].atan2(v[0]) };
            Ok((ct, rho.min(1.0), phi))
        }
        _ => Err(Error::ModelMismatch),
    }
}

/// Largest n >= 0 with n^2 <= omega; exact for omega below 2^53.
fn int_sqrt_leq(omega: f64) -> u64 {
    if omega < 0.0 {
        return 0;
    }
    let mut n = omega.sqrt().floor() as u64;
    while (n as f64) * (n as f64) > omega {
        n -= 1;
    }
    while ((n + 1) as f64) * ((n + 1) as f64) <= omega {
        n += 1;
    }
    n
}

/// Largest k >= 0 with k(k+1) <= omega.
fn max_sphere_degree(omega: f64) -> u64 {
    if omega < 0.0 {
        return 0;
    }
    let mut k = ((-1.0 + (1.0 + 4.0 * omega).sqrt()) / 2.0).floor().max(0.0) as u64;
    while (k as f64) * (k as f64 + 1.0) > omega {
        k -= 1;
    }
    while ((k + 1) as f64) * ((k + 2) as f64) <= omega {
        k += 1;
    }
    k
}

fn circle_labels(n: u32) -> Vec<CircleLabel> {
    if n == 0 {
        vec![CircleLabel::Const]
    } else {
        vec![CircleLabel::Cos(n), CircleLabel::Sin(n)]
    }
}

fn circle_dist(a: f64, b: f64) -> f64 {
    let d = (a - b).rem_euclid(TAU);
    d.min(TAU - d)
}

impl Manifold {
    /// Geometric dimension s.
    pub fn dim(self) -> u32 {
        match self {
            Manifold::Circle => 1,
            Manifold::Torus2 | Manifold::Sphere2 => 2,
        }
    }

    pub fn total_measure(self) -> f64 {
        match self {
            Manifold::Circle => TAU,
            Manifold::Torus2 => TAU * TAU,
            Manifold::Sphere2 => 4.0 * PI,
        }
    }

    pub fn diameter(self) -> f64 {
        match self {
            Manifold::Circle | Manifold::Sphere2 => PI,
            Manifold::Torus2 => PI * SQRT_2,
        }
    }

    /// Canonical base point; by homogeneity one representative suffices for
    /// distance-profile sampling.
    pub fn base_point(self) -> Point {
        match self {
            Manifold::Circle => Point::Circle(0.0),
            Manifold::Torus2 => Point::Torus2(0.0, 0.0),
            Manifold::Sphere2 => Point::Sphere2([0.0, 0.0, 1.0]),
        }
    }

    /// Largest frequency (circle, torus) or spherical degree with eigenvalue <= omega.
    pub fn degree_for(self, omega: f64) -> u64 {
        match self {
            Manifold::Circle | Manifold::Torus2 => int_sqrt_leq(omega),
            Manifold::Sphere2 => max_sphere_degree(omega),
        }
    }

    /// Eigenvalue of a single frequency or degree.
    pub fn lambda_of_degree(self, n: u64) -> f64 {
        match self {
            Manifold::Circle | Manifold::Torus2 => (n as f64) * (n as f64),
            Manifold::Sphere2 => (n as f64) * (n as f64 + 1.0),
        }
    }

    /// Uniform bound on sup |u_l|^2 over eigenfunctions with eigenvalue <= omega.
    pub fn sup_sq_bound(self, omega: f64) -> f64 {
        match self {
            Manifold::Circle => 1.0 / PI,
            Manifold::Torus2 => 1.0 / (PI * PI),
            Manifold::Sphere2 => {
                let k = max_sphere_degree(omega) as f64;
                (2.0 * k + 1.0) / (4.0 * PI)
            }
        }
    }

    pub fn validate_point(self, x: &Point) -> Result<()> {
        if x.manifold() != self {
            return Err(Error::ModelMismatch);
        }
        match x {
            Point::Circle(t) => {
                if !t.is_finite() {
                    return Err(Error::InvalidPoint(format!("non-finite angle {t}")));
                }
            }
            Point::Torus2(t1, t2) => {
                if !t1.is_finite() || !t2.is_finite() {
                    return Err(Error::InvalidPoint(format!("non-finite angles ({t1}, {t2})")));
                }
            }
            Point::Sphere2(v) => {
                let norm = (v[0] * v[0] + v[1] * v[1] + v[2] * v[2]).sqrt();
                if !norm.is_finite() || (norm - 1.0).abs() > UNIT_NORM_TOL {
                    return Err(Error::InvalidPoint(format!(
                        "sphere vector has norm {norm}, expected 1 within {UNIT_NORM_TOL}"
                    )));
                }
            }
        }
        Ok(())
    }

    /// Geodesic distance between two valid points.
    pub fn geodesic_distance(self, x: &Point, y: &Point) -> Result<f64> {
        self.validate_point(x)?;
        self.validate_point(y)?;
        match (x, y) {
            (Point::Circle(a), Point::Circle(b)) => Ok(circle_dist(*a, *b)),
            (Point::Torus2(a1, a2), Point::Torus2(b1, b2)) => {
                let d1 = circle_dist(*a1, *b1);
                let d2 = circle_dist(*a2, *b2);
                Ok(d1.hypot(d2))
            }
            (Point::Sphere2(u), Point::Sphere2(v)) => {
                let nu = (u[0] * u[0] + u[1] * u[1] + u[2] * u[2]).sqrt();
                let nv = (v[0] * v[0] + v[1] * v[1] + v[2] * v[2]).sqrt();
                let dot = (u[0] * v[0] + u[1] * v[1] + u[2] * v[2]) / (nu * nv);
                Ok(dot.clamp(-1.0, 1.0).acos())
            }
            _ => Err(Error::ModelMismatch),
        }
    }

    /// Number of eigenpairs with eigenvalue <= omega, by closed-form counting.
    ///
    /// Circle: 2 floor(sqrt(omega)) + 1. Sphere: (k+1)^2 for the largest k with
    /// k(k+1) <= omega. Torus: lattice point count of the disk of radius
    /// sqrt(omega), one short sum per abscissa.
    pub fn weyl_count(self, omega: f64) -> u64 {
        if omega < 0.0 {
            return 0;
        }
        match self {
            Manifold::Circle => 2 * int_sqrt_leq(omega) + 1,
            Manifold::Sphere2 => {
                let k = max_sphere_degree(omega);
                (k + 1) * (k + 1)
            }
            Manifold::Torus2 => {
                let amax = int_sqrt_leq(omega);
                let mut count = 2 * int_sqrt_leq(omega) + 1;
                for a in 1..=amax {
                    let rest = omega - (a as f64) * (a as f64);
                    count += 2 * (2 * int_sqrt_leq(rest) + 1);
                }
                count
            }
        }
    }

    /// All eigenpairs with eigenvalue <= omega, sorted by (eigenvalue, label order).
    pub fn eigenpairs_up_to(self, omega: f64) -> Result<Vec<Eigenpair>> {
        let count = self.weyl_count(omega);
        if count > MAX_EIGENPAIRS {
            return Err(Error::SpectrumTooLarge { omega, count, max: MAX_EIGENPAIRS });
        }
        let mut pairs: Vec<Eigenpair> = Vec::with_capacity(count as usize);
        match self {
            Manifold::Circle => {
                for n in 0..=int_sqrt_leq(omega) as u32 {
                    let lambda = (n as f64) * (n as f64);
                    for label in circle_labels(n) {
                        pairs.push(Eigenpair { index: 0, lambda, label: EigenLabel::Circle(label) });
                    }
                }
            }
            Manifold::Torus2 => {
                let amax = int_sqrt_leq(omega) as u32;
                for n1 in 0..=amax {
                    let rest = omega - (n1 as f64) * (n1 as f64);
                    for n2 in 0..=int_sqrt_leq(rest) as u32 {
                        let lambda = (n1 as f64) * (n1 as f64) + (n2 as f64) * (n2 as f64);
                        for l1 in circle_labels(n1) {
                            for l2 in circle_labels(n2) {
                                pairs.push(Eigenpair {
                                    index: 0,
                                    lambda,
                                    label: EigenLabel::Torus2(l1, l2),
                                });
                            }
                        }
                    }
                }
                pairs.sort_by(|a, b| {
                    let (EigenLabel::Torus2(a1, a2), EigenLabel::Torus2(b1, b2)) = (&a.label, &b.label)
                    else {
                        unreachable!()
                    };
                    a.lambda
                        .total_cmp(&b.lambda)
                        .then(a1.basis_index().cmp(&b1.basis_index()))
                        .then(a2.basis_index().cmp(&b2.basis_index()))
                });
            }
            Manifold::Sphere2 => {
                for k in 0..=max_sphere_degree(omega) as u32 {
                    let lambda = (k as f64) * (k as f64 + 1.0);
                    for m in -(k as i32)..=(k as i32) {
                        pairs.push(Eigenpair {
                            index: 0,
                            lambda,
                            label: EigenLabel::Sphere2 { degree: k, order: m },
                        });
                    }
                }
            }
        }
        debug_assert_eq!(pairs.len() as u64, count);
        for (i, p) in pairs.iter_mut().enumerate() {
            p.index = i;
        }
        Ok(pairs)
    }

    /// The first `count` eigenpairs of the canonical enumeration.
    pub fn first_eigenpairs(self, count: usize) -> Result<Vec<Eigenpair>> {
        if count as u64 > MAX_EIGENPAIRS {
            return Err(Error::SpectrumTooLarge {
                omega: f64::NAN,
                count: count as u64,
                max: MAX_EIGENPAIRS,
            });
        }
        let mut omega = 4.0;
        while self.weyl_count(omega) < count as u64 {
            omega *= 2.0;
        }
        let mut pairs = self.eigenpairs_up_to(omega)?;
        pairs.truncate(count);
        Ok(pairs)
    }

    /// Fits log lambda_l against log l over l in [l_min, l_max]; the slope
    /// estimates the growth exponent 2/s.
    pub fn eigenvalue_growth_fit(self, l_min: usize, l_max: usize) -> Result<RateFit> {
        if l_min < 2 {
            return Err(Error::InvalidExponent { name: "l_min", value: l_min as f64 });
        }
        if l_max < l_min || l_max - l_min + 1 < 8 {
            return Err(Error::FitRangeTooSmall {
                needed: 8,
                got: l_max.saturating_sub(l_min).saturating_add(1),
            });
        }
        let pairs = self.first_eigenpairs(l_max + 1)?;
        let pts: Vec<(f64, f64)> =
            (l_min..=l_max).map(|l| (l as f64, pairs[l].lambda)).collect();
        let first = pts[0].1;
        if pts.iter().all(|p| p.1 == first) {
            return Err(Error::DegenerateFit("constant eigenvalue sequence"));
        }
        fit_log_log(&pts)
    }

    /// Builds the standard quadrature grid at the given resolution.
    ///
    /// Circle: `resolution` equispaced nodes, exactness resolution - 1.
    /// Torus: the product of two such circles. Sphere: Gauss-Legendre polar
    /// times 2 x resolution equispaced azimuthal, exactness 2 resolution - 1.
    pub fn grid(self, resolution: usize) -> Result<QuadratureGrid> {
        if resolution < 4 {
            return Err(Error::ResolutionTooSmall(resolution));
        }
        match self {
            Manifold::Circle => {
                let w = TAU / resolution as f64;
                let nodes = (0..resolution).map(|i| Point::Circle(w * i as f64)).collect();
                Ok(QuadratureGrid {
                    manifold: self,
                    nodes,
                    weights: vec![w; resolution],
                    exactness: resolution as u32 - 1,
                    resolution,
                })
            }
            Manifold::Torus2 => {
                let w = TAU / resolution as f64;
                let mut nodes = Vec::with_capacity(resolution * resolution);
                for i in 0..resolution {
                    for j in 0..resolution {
                        nodes.push(Point::Torus2(w * i as f64, w * j as f64));
                    }
                }
                Ok(QuadratureGrid {
                    manifold: self,
                    nodes,
                    weights: vec![w * w; resolution * resolution],
                    exactness: resolution as u32 - 1,
                    resolution,
                })
            }
            Manifold::Sphere2 => {
                let n_phi = 2 * resolution;
                let (xs, ws) = gauss::gauss_legendre(resolution);
                let wphi = TAU / n_phi as f64;
                let mut nodes = Vec::with_capacity(resolution * n_phi);
                let mut weights = Vec::with_capacity(resolution * n_phi);
                for (i, &ct) in xs.iter().enumerate() {
                    let st = (1.0 - ct * ct).max(0.0).sqrt();
                    for j in 0..n_phi {
                        let phi = wphi * j as f64;
                        let (sp, cp) = phi.sin_cos();
                        nodes.push(Point::Sphere2([st * cp, st * sp, ct]));
                        weights.push(ws[i] * wphi);
                    }
                }
                Ok(QuadratureGrid {
                    manifold: self,
                    nodes,
                    weights,
                    exactness: 2 * resolution as u32 - 1,
                    resolution,
                })
            }
        }
    }

    /// Evaluates every listed eigenfunction at a point, sharing the Legendre
    /// and trigonometric tables across the batch.
    pub fn eval_basis(self, pairs: &[Eigenpair], x: &Point) -> Result<Vec<f64>> {
        self.validate_point(x)?;
        match (self, x) {
            (Manifold::Circle, Point::Circle(theta)) => pairs
                .iter()
                .map(|p| match p.label {
                    EigenLabel::Circle(l) => Ok(l.eval(*theta)),
                    _ => Err(Error::ModelMismatch),
                })
                .collect(),
            (Manifold::Torus2, Point::Torus2(t1, t2)) => {
                let mut maxf = 0u32;
                for p in pairs {
                    if let EigenLabel::Torus2(l1, l2) = p.label {
                        maxf = maxf.max(l1.frequency()).max(l2.frequency());
                    } else {
                        return Err(Error::ModelMismatch);
                    }
                }
                let tab1 = trig_tables(*t1, maxf);
                let tab2 = trig_tables(*t2, maxf);
                pairs
                    .iter()
                    .map(|p| match p.label {
                        EigenLabel::Torus2(l1, l2) => Ok(eval_with_table(l1, &tab1) * eval_with_table(l2, &tab2)),
                        _ => Err(Error::ModelMismatch),
                    })
                    .collect()
            }
            (Manifold::Sphere2, p @ Point::Sphere2(_)) => {
                let mut kmax = 0u32;
                for e in pairs {
                    if let EigenLabel::Sphere2 { degree, .. } = e.label {
                        kmax = kmax.max(degree);
                    } else {
                        return Err(Error::ModelMismatch);
                    }
                }
                let (ct, st, phi) = sphere_coords(p)?;
                let q = legendre::table(kmax, ct, st);
                let trig = trig_tables(phi, kmax);
                pairs
                    .iter()
                    .map(|e| match e.label {
                        EigenLabel::Sphere2 { degree, order } => {
                            let m = order.unsigned_abs();
                            let qv = q[legendre::tri_index(degree, m)];
                            Ok(match order.signum() {
                                0 => qv,
                                1 => SQRT_2 * qv * trig.0[m as usize],
                                _ => SQRT_2 * qv * trig.1[m as usize],
                            })
                        }
                        _ => Err(Error::ModelMismatch),
                    })
                    .collect()
            }
            _ => Err(Error::ModelMismatch),
        }
    }
}

/// cos(n t) and sin(n t) for n = 0..=maxf.
fn trig_tables(t: f64, maxf: u32) -> (Vec<f64>, Vec<f64>) {
    let mut c = Vec::with_capacity(maxf as usize + 1);
    let mut s = Vec::with_capacity(maxf as usize + 1);
    for n in 0..=maxf {
        let (sn, cn) = (n as f64 * t).sin_cos();
        c.push(cn);
        s.push(sn);
    }
    (c, s)
}

fn eval_with_table(l: CircleLabel, tab: &(Vec<f64>, Vec<f64>)) -> f64 {
    match l {
        CircleLabel::Const => INV_SQRT_2PI,
        CircleLabel::Cos(n) => tab.0[n as usize] * INV_SQRT_PI,
        CircleLabel::Sin(n) => tab.1[n as usize] * INV_SQRT_PI,
    }
}
