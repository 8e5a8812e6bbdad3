//! Periodic points and their classification, Anosov certificates for linear
//! automorphisms, and cone-field checks for perturbed maps.

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::geometry::{dist_unchecked, wrap, TorusPoint};
use crate::linalg::{i128_pow, Eigenvalue, I128Mat, IntMatrix, Matrix};
use crate::systems::SystemMap;

/// Eigenvalue moduli within this distance of 1 classify as nonhyperbolic.
pub const HYPERBOLICITY_TOLERANCE: f64 = 1e-9;

/// Band around modulus 1 in which an Anosov certificate is refused.
pub const ANOSOV_TOLERANCE: f64 = 1e-12;

/// Return distance accepted as "periodic".
pub const PERIODIC_TOLERANCE: f64 = 1e-9;

/// Largest `|det(A^n - I)|` that `periodic_points_linear` will enumerate.
pub const MAX_ENUMERATED_POINTS: u128 = 5_000;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Classification {
    Hyperbolic,
    Nonhyperbolic,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct PeriodicPointRecord {
    pub point: TorusPoint,
    /// Minimal period.
    pub period: usize,
    /// Eigenvalues of the differential of `f^period` at the point.
    pub eigenvalues: Vec<Eigenvalue>,
    pub classification: Classification,
}

fn classify(eigenvalues: &[Eigenvalue], tol: f64) -> Classification {
    if eigenvalues.iter().all(|e| (e.modulus() - 1.0).abs() > tol) {
        Classification::Hyperbolic
    } else {
        Classification::Nonhyperbolic
    }
}

/// Real eigen-splitting `R^2 = E^u ⊕ E^s` of a hyperbolic integer matrix.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Splitting {
    pub lambda_u: f64,
    pub lambda_s: f64,
    /// Unit eigenvector for `lambda_u`.
    pub unstable: [f64; 2],
    /// Unit eigenvector for `lambda_s`.
    pub stable: [f64; 2],
}

impl Splitting {
    fn basis(&self) -> Matrix {
        Matrix::new2([[self.unstable[0], self.stable[0]], [self.unstable[1], self.stable[1]]])
    }

    /// Coefficients `(a, b)` with `v = a e_u + b e_s`.
    pub fn coefficients(&self, v: [f64; 2]) -> (f64, f64) {
        let inv = self.basis().inverse().expect("eigenbasis is nonsingular");
        let c = inv.apply(v);
        (c[0], c[1])
    }

    pub fn combine(&self, a: f64, b: f64) -> [f64; 2] {
        [
            a * self.unstable[0] + b * self.stable[0],
            a * self.unstable[1] + b * self.stable[1],
        ]
    }

    /// Euclidean condition number of the eigenbasis.
    pub fn condition_number(&self) -> f64 {
        let (s1, s2) = self.basis().singular_values();
        s1 / s2
    }
}

/// Unit eigenvector of `[[a, b], [c, d]]` for the real eigenvalue `lambda`.
fn eigenvector(m: [[i64; 2]; 2], lambda: f64) -> [f64; 2] {
    let [[a, b], [c, d]] = m;
    let v1 = [b as f64, lambda - a as f64];
    let v2 = [lambda - d as f64, c as f64];
    let n1 = v1[0].hypot(v1[1]);
    let n2 = v2[0].hypot(v2[1]);
    let (v, n) = if n1 >= n2 { (v1, n1) } else { (v2, n2) };
    let s = if v[0] < 0.0 || (v[0] == 0.0 && v[1] < 0.0) {
        -1.0
    } else {
        1.0
    };
    [s * v[0] / n, s * v[1] / n]
}

/// The splitting of `A`, or `None` if some eigenvalue modulus lies within
/// [`ANOSOV_TOLERANCE`] of 1 (including every complex pair, since `|det A| = 1`).
pub fn hyperbolic_splitting(a: IntMatrix) -> Option<Splitting> {
    let ev = a.eigenvalues();
    if ev
        .iter()
        .any(|e| !e.is_real() || (e.modulus() - 1.0).abs() <= ANOSOV_TOLERANCE)
    {
        return None;
    }
    let (u, s) = if ev[0].modulus() > 1.0 {
        (ev[0].re, ev[1].re)
    } else {
        (ev[1].re, ev[0].re)
    };
    Some(Splitting {
        lambda_u: u,
        lambda_s: s,
        unstable: eigenvector(a.entries(), u),
        stable: eigenvector(a.entries(), s),
    })
}

/// Constants `(C, lambda)` with `|A^n|_{E^s}| <= C lambda^n` and
/// `|A^-n|_{E^u}| <= C lambda^n`, in the Euclidean eigenbasis.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct AnosovCertificate {
    pub matrix: IntMatrix,
    pub lambda: f64,
    #[serde(rename = "C")]
    pub c: f64,
    pub lambda_unstable: f64,
    pub lambda_stable: f64,
    pub unstable_direction: [f64; 2],
    pub stable_direction: [f64; 2],
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "verdict", rename_all = "lowercase")]
pub enum AnosovVerdict {
    Granted(AnosovCertificate),
    Refused {
        matrix: IntMatrix,
        eigenvalues: Vec<Eigenvalue>,
        reason: String,
    },
}

impl AnosovVerdict {
    pub fn certificate(&self) -> Option<&AnosovCertificate> {
        match self {
            AnosovVerdict::Granted(c) => Some(c),
            AnosovVerdict::Refused { .. } => None,
        }
    }

    pub fn is_granted(&self) -> bool {
        matches!(self, AnosovVerdict::Granted(_))
    }
}

/// Linear Anosov criterion: no eigenvalue of `A` on the unit circle.
pub fn anosov_certificate_linear(a: IntMatrix) -> AnosovVerdict {
    match hyperbolic_splitting(a) {
        Some(sp) => AnosovVerdict::Granted(AnosovCertificate {
            matrix: a,
            lambda: sp.lambda_s.abs().max(1.0 / sp.lambda_u.abs()),
            c: sp.condition_number(),
            lambda_unstable: sp.lambda_u,
            lambda_stable: sp.lambda_s,
            unstable_direction: sp.unstable,
            stable_direction: sp.stable,
        }),
        None => AnosovVerdict::Refused {
            matrix: a,
            eigenvalues: a.eigenvalues(),
            reason: "eigenvalue on the unit circle".into(),
        },
    }
}

/// Elements `(p + q sqrt(disc)) / 2` of a real quadratic ring, evaluated
/// without cancellation. Used to measure `|A^n v|` for an exact eigenvector
/// `v` when the true value is many orders of magnitude below `|A^n|`.
#[derive(Debug, Clone, Copy)]
struct QuadraticVec {
    p: [i128; 2],
    q: [i128; 2],
}

impl QuadraticVec {
    fn apply(&self, m: &I128Mat) -> Option<Self> {
        let mv = |v: [i128; 2]| -> Option<[i128; 2]> {
            Some([
                m[0][0].checked_mul(v[0])?.checked_add(m[0][1].checked_mul(v[1])?)?,
                m[1][0].checked_mul(v[0])?.checked_add(m[1][1].checked_mul(v[1])?)?,
            ])
        };
        Some(Self {
            p: mv(self.p)?,
            q: mv(self.q)?,
        })
    }

    fn component(p: i128, q: i128, disc: i128) -> Option<f64> {
        let s = (disc as f64).sqrt();
        let (pf, qs) = (p as f64, q as f64 * s);
        if pf == 0.0 || qs == 0.0 || (pf > 0.0) == (qs > 0.0) {
            Some((pf + qs) / 2.0)
        } else {
            // (p + q s) = (p^2 - q^2 disc) / (p - q s), exact numerator
            let num = p.checked_mul(p)?.checked_sub(q.checked_mul(q)?.checked_mul(disc)?)?;
            Some(num as f64 / (pf - qs) / 2.0)
        }
    }

    fn norm(&self, disc: i128) -> Option<f64> {
        let x = Self::component(self.p[0], self.q[0], disc)?;
        let y = Self::component(self.p[1], self.q[1], disc)?;
        Some(x.hypot(y))
    }
}

/// `2 v` for the eigenvector `v = (b, lambda - a)` of `lambda = (t + sign s)/2`.
fn exact_eigenvector(a: IntMatrix, sign: i128) -> QuadraticVec {
    let [[a00, a01], _] = a.entries();
    let t = a.trace() as i128;
    QuadraticVec {
        p: [2 * a01 as i128, t - 2 * a00 as i128],
        q: [0, sign],
    }
}

/// Worst-case slack of the two decay inequalities over `n = 1..=n_max`:
/// `max_n max(|A^n v_s| - C lambda^n, |A^-n v_u| - C lambda^n)` for unit
/// eigenvectors, computed in exact quadratic-integer arithmetic. A value
/// `<= tol` means the certificate's inequalities hold within `tol`. Powers
/// whose exact evaluation would overflow `i128` end the scan early.
pub fn certificate_decay_excess(cert: &AnosovCertificate, n_max: usize) -> f64 {
    let a = cert.matrix;
    let disc = (a.trace() as i128).pow(2) - 4 * a.det() as i128;
    // the unstable eigenvalue has the larger modulus: same sign as the trace
    let u_sign: i128 = if a.trace() >= 0 { 1 } else { -1 };
    let mut vu = exact_eigenvector(a, u_sign);
    let mut vs = exact_eigenvector(a, -u_sign);
    let (Some(nu), Some(ns)) = (vu.norm(disc), vs.norm(disc)) else {
        return f64::NEG_INFINITY;
    };
    let fwd: I128Mat = a.into();
    let bwd: I128Mat = a.inverse().into();
    let mut worst = f64::NEG_INFINITY;
    for n in 1..=n_max {
        let step = (|| {
            let s = vs.apply(&fwd)?;
            let u = vu.apply(&bwd)?;
            Some((s, u, s.norm(disc)?, u.norm(disc)?))
        })();
        let Some((s, u, s_norm, u_norm)) = step else {
            break;
        };
        (vs, vu) = (s, u);
        let bound = cert.c * cert.lambda.powi(n as i32);
        worst = worst.max(s_norm / ns - bound).max(u_norm / nu - bound);
    }
    worst
}

/// All points with `A^n x = x mod Z^2`, found exactly over the rationals
/// with common denominator `|det(A^n - I)|`.
pub fn periodic_points_linear(a: IntMatrix, n: usize) -> Result<Vec<PeriodicPointRecord>> {
    if n == 0 {
        return Err(Error::InvalidParameter("period must be at least 1".into()));
    }
    let an = i128_pow(&a.into(), n);
    let m = [[an[0][0] - 1, an[0][1]], [an[1][0], an[1][1] - 1]];
    let det = m[0][0] * m[1][1] - m[0][1] * m[1][0];
    if det == 0 {
        return Err(Error::NonIsolatedPeriodicSet(n));
    }
    let d = det.unsigned_abs();
    if d > MAX_ENUMERATED_POINTS {
        return Err(Error::TooManyPeriodicPoints(d));
    }
    let d = d as i128;
    // x = (i, j) / d is n-periodic iff M (i, j) ≡ 0 (mod d)
    let mut points = Vec::new();
    for i in 0..d {
        for j in 0..d {
            if (m[0][0] * i + m[0][1] * j) % d == 0 && (m[1][0] * i + m[1][1] * j) % d == 0 {
                points.push((i, j));
            }
        }
    }
    debug_assert_eq!(points.len() as i128, d);
    let base: I128Mat = a.into();
    let records = points
        .into_iter()
        .map(|(i, j)| {
            let period = (1..=n)
                .filter(|q| n.is_multiple_of(*q))
                .find(|&q| {
                    let aq = i128_pow(&base, q);
                    let xi = aq[0][0] * i + aq[0][1] * j - i;
                    let xj = aq[1][0] * i + aq[1][1] * j - j;
                    xi.rem_euclid(d) == 0 && xj.rem_euclid(d) == 0
                })
                .expect("q = n always returns");
            let aq = i128_pow(&base, period);
            let mq = Matrix::new2([[aq[0][0] as f64, aq[0][1] as f64], [aq[1][0] as f64, aq[1][1] as f64]]);
            let eigenvalues = mq.eigenvalues();
            PeriodicPointRecord {
                point: TorusPoint::torus(i as f64 / d as f64, j as f64 / d as f64),
                period,
                classification: classify(&eigenvalues, HYPERBOLICITY_TOLERANCE),
                eigenvalues,
            }
        })
        .collect();
    Ok(records)
}

/// Classifies an `n`-periodic point of `f` from the eigenvalues of the
/// differential of `f^q`, `q` the minimal period.
pub fn classify_periodic(f: &SystemMap, p: &TorusPoint, n: usize, tol: f64) -> Result<PeriodicPointRecord> {
    if n == 0 {
        return Err(Error::InvalidParameter("period must be at least 1".into()));
    }
    if p.dim() != f.dim() {
        return Err(Error::DimensionMismatch {
            left: f.dim(),
            right: p.dim(),
        });
    }
    let mut orbit = vec![*p];
    for _ in 0..n {
        orbit.push(f.forward(orbit.last().unwrap()));
    }
    let distance = dist_unchecked(&orbit[n], p);
    if distance > PERIODIC_TOLERANCE {
        return Err(Error::NotPeriodic { period: n, distance });
    }
    let period = (1..=n)
        .find(|&q| dist_unchecked(&orbit[q], p) <= PERIODIC_TOLERANCE)
        .unwrap_or(n);
    let product = orbit[..period]
        .iter()
        .fold(Matrix::identity(f.dim()), |acc, q| f.differential(q).mul(&acc));
    let eigenvalues = product.eigenvalues();
    Ok(PeriodicPointRecord {
        point: *p,
        period,
        classification: classify(&eigenvalues, tol),
        eigenvalues,
    })
}

/// Newton refinement of an approximate `n`-periodic point of `f`:
/// solves `f^n(p) - p = 0` on the torus from `seed`.
pub fn refine_periodic_point(f: &SystemMap, seed: &TorusPoint, n: usize, max_iter: usize) -> Result<TorusPoint> {
    let dim = f.dim();
    let mut p = *seed;
    for _ in 0..max_iter {
        let mut q = p;
        let mut jac = Matrix::identity(dim);
        for _ in 0..n {
            jac = f.differential(&q).mul(&jac);
            q = f.forward(&q);
        }
        let r = p.displacement_to(&q);
        if r[0].hypot(r[1]) <= 1e-13 {
            break;
        }
        let step = jac
            .sub(&Matrix::identity(dim))
            .inverse()
            .ok_or_else(|| Error::NotHyperbolic("Df^n - I is singular".into()))?
            .apply(r);
        p = p.translate([-step[0], -step[1]]);
    }
    let back = f.iterate(&p, n as i64);
    let distance = dist_unchecked(&back, &p);
    if distance > PERIODIC_TOLERANCE {
        return Err(Error::NotPeriodic { period: n, distance });
    }
    Ok(p)
}

/// Outcome of a sampled cone-field check.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ConeReport {
    pub holds: bool,
    pub opening: f64,
    pub grid: usize,
    pub iterations: usize,
    /// Smallest expansion factor of vectors in the unstable (resp. stable,
    /// under the inverse) cone over the grid.
    pub min_expansion: f64,
    /// Smallest `opening - |slope of image boundary|`; positive means strict invariance.
    pub worst_margin: f64,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub reason: Option<String>,
}

/// Image of the cone `{a e_1 + b e_2 : |b| <= o |a|}` (in the given
/// coordinates) under `d`: returns `(margin, min expansion)`.
fn cone_image(d: &Matrix, sp: &Splitting, unstable: bool, o: f64) -> (f64, f64) {
    let (e1, e2) = if unstable {
        (sp.unstable, sp.stable)
    } else {
        (sp.stable, sp.unstable)
    };
    let ray = |sign: f64| [e1[0] + sign * o * e2[0], e1[1] + sign * o * e2[1]];
    let coords = |w: [f64; 2]| {
        let (a, b) = sp.coefficients(w);
        if unstable {
            (a, b)
        } else {
            (b, a)
        }
    };
    let rays = [ray(1.0), ray(-1.0)];
    let images: Vec<(f64, f64)> = rays.iter().map(|r| coords(d.apply(*r))).collect();
    let same_half = images[0].0 * images[1].0 > 0.0;
    let slope = images
        .iter()
        .map(|(a, b)| if *a == 0.0 { f64::INFINITY } else { (b / a).abs() })
        .fold(0.0, f64::max);
    let margin = if same_half { o - slope } else { f64::NEG_INFINITY };

    // min |d v| / |v| over the sector: at a boundary ray or at a right
    // singular vector of d lying inside the sector
    let ratio = |v: [f64; 2]| {
        let w = d.apply(v);
        w[0].hypot(w[1]) / v[0].hypot(v[1])
    };
    let mut expansion = rays.iter().map(|r| ratio(*r)).fold(f64::INFINITY, f64::min);
    let dtd = d.transpose().mul(d);
    let (s1, s2) = d.singular_values();
    for sigma2 in [s1 * s1, s2 * s2] {
        // eigenvector of d^T d for sigma^2
        let m = dtd.entries();
        let v = if m[0][1].abs() > 1e-300 {
            [m[0][1], sigma2 - m[0][0]]
        } else if (m[0][0] - sigma2).abs() < (m[1][1] - sigma2).abs() {
            [1.0, 0.0]
        } else {
            [0.0, 1.0]
        };
        let (a, b) = coords(v);
        if a != 0.0 && (b / a).abs() <= o {
            expansion = expansion.min(ratio(v));
        }
    }
    (margin, expansion)
}

/// Sampled cone criterion on a `grid x grid` lattice: the `iterations`-step
/// differential maps the unstable cone (half-opening `opening`, slope units,
/// around the linear model's unstable direction) strictly into itself with
/// expansion > 1, and the inverse does the same for the stable cone.
pub fn cone_report(f: &SystemMap, opening: f64, grid: usize, iterations: usize) -> ConeReport {
    let mut report = ConeReport {
        holds: false,
        opening,
        grid,
        iterations,
        min_expansion: 0.0,
        worst_margin: f64::NEG_INFINITY,
        reason: None,
    };
    if f.dim() != 2 {
        report.reason = Some("cone criterion needs a torus map".into());
        return report;
    }
    if !(opening > 0.0 && opening < 1.0) || grid == 0 || iterations == 0 {
        report.reason = Some("opening must lie in (0, 1); grid and iterations positive".into());
        return report;
    }
    let Some(sp) = f.linear_model().and_then(hyperbolic_splitting) else {
        report.reason = Some("no hyperbolic linear model to orient the cones".into());
        return report;
    };
    let (margin, expansion) = (0..grid * grid)
        .into_par_iter()
        .map(|idx| {
            let x = TorusPoint::torus((idx / grid) as f64 / grid as f64, (idx % grid) as f64 / grid as f64);
            let mut fwd = Matrix::identity(2);
            let mut bwd = Matrix::identity(2);
            let (mut p, mut q) = (x, x);
            for _ in 0..iterations {
                fwd = f.differential(&p).mul(&fwd);
                p = f.forward(&p);
                bwd = f.inverse_differential(&q).mul(&bwd);
                q = f.backward(&q);
            }
            let (mu, eu) = cone_image(&fwd, &sp, true, opening);
            let (ms, es) = cone_image(&bwd, &sp, false, opening);
            (mu.min(ms), eu.min(es))
        })
        .reduce(|| (f64::INFINITY, f64::INFINITY), |a, b| (a.0.min(b.0), a.1.min(b.1)));
    report.worst_margin = margin;
    report.min_expansion = expansion;
    report.holds = margin > 0.0 && expansion > 1.0;
    if !report.holds {
        report.reason = Some("cone not strictly invariant or not expanded".into());
    }
    report
}

pub fn cone_criterion(f: &SystemMap, opening: f64, grid: usize, iterations: usize) -> bool {
    cone_report(f, opening, grid, iterations).holds
}

/// Wrapped residual `f^n(p) - p`, handy for diagnostics.
pub fn periodic_residual(f: &SystemMap, p: &TorusPoint, n: usize) -> f64 {
    let q = f.iterate(p, n as i64);
    let [dx, dy] = p.displacement_to(&q);
    wrap(dx).hypot(wrap(dy))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::systems::{make_conservative_perturbation, make_linear, make_rotation, PerturbationMode};

    #[test]
    fn cat_fixed_and_period_two_points() {
        let one = periodic_points_linear(IntMatrix::CAT, 1).unwrap();
        assert_eq!(one.len(), 1);
        assert_eq!(one[0].point, TorusPoint::torus(0.0, 0.0));
        assert_eq!(one[0].classification, Classification::Hyperbolic);
        let two = periodic_points_linear(IntMatrix::CAT, 2).unwrap();
        assert_eq!(two.len(), 5);
        let periods: Vec<usize> = two.iter().map(|r| r.period).collect();
        assert_eq!(periods.iter().filter(|&&p| p == 1).count(), 1);
        assert_eq!(periods.iter().filter(|&&p| p == 2).count(), 4);
        assert!(matches!(
            periodic_points_linear(IntMatrix::IDENTITY, 1),
            Err(Error::NonIsolatedPeriodicSet(1))
        ));
        assert!(matches!(
            periodic_points_linear(IntMatrix::SHEAR, 3),
            Err(Error::NonIsolatedPeriodicSet(3))
        ));
    }

    #[test]
    fn periodic_counts_match_determinant() {
        // |det(A^n - I)| = |tr(A^n) - 2| for det A = 1: Lucas numbers L_2n - 2
        let f = make_linear([[2, 1], [1, 1]]).unwrap();
        for n in 1..=6 {
            let pts = periodic_points_linear(IntMatrix::CAT, n).unwrap();
            let an = i128_pow(&IntMatrix::CAT.into(), n);
            assert_eq!(pts.len() as i128, an[0][0] + an[1][1] - 2);
            for r in &pts {
                assert!(periodic_residual(&f, &r.point, n) <= 1e-9);
                let c = classify_periodic(&f, &r.point, n, HYPERBOLICITY_TOLERANCE).unwrap();
                assert_eq!(c.period, r.period);
                assert_eq!(c.classification, r.classification);
            }
        }
    }

    #[test]
    fn classify_examples() {
        let cat = make_linear([[2, 1], [1, 1]]).unwrap();
        let r = classify_periodic(&cat, &TorusPoint::torus(0.0, 0.0), 1, 1e-9).unwrap();
        assert_eq!(r.classification, Classification::Hyperbolic);
        let s5 = 5f64.sqrt();
        assert!((r.eigenvalues[0].modulus() - (3.0 + s5) / 2.0).abs() < 1e-14);
        assert!((r.eigenvalues[1].modulus() - (3.0 - s5) / 2.0).abs() < 1e-14);

        let shear = make_linear([[1, 0], [1, 1]]).unwrap();
        let r = classify_periodic(&shear, &TorusPoint::torus(0.0, 0.0), 1, 1e-9).unwrap();
        assert_eq!(r.classification, Classification::Nonhyperbolic);
        assert!(r.eigenvalues.iter().all(|e| e.re == 1.0 && e.im == 0.0));

        let golden = make_rotation((5f64.sqrt() - 1.0) / 2.0).unwrap();
        assert!(matches!(
            classify_periodic(&golden, &TorusPoint::circle(0.0), 7, 1e-9),
            Err(Error::NotPeriodic { period: 7, .. })
        ));
        let quarter = make_rotation(0.25).unwrap();
        let r = classify_periodic(&quarter, &TorusPoint::circle(0.0), 4, 1e-9).unwrap();
        assert_eq!(r.period, 4);
        assert_eq!(r.classification, Classification::Nonhyperbolic);
        assert_eq!(r.eigenvalues, vec![Eigenvalue::real(1.0)]);
    }

    #[test]
    fn certificates() {
        let cert = anosov_certificate_linear(IntMatrix::CAT);
        let c = cert.certificate().expect("cat map is Anosov");
        assert!((c.lambda - (3.0 - 5f64.sqrt()) / 2.0).abs() < 1e-12);
        assert!((c.c - 1.0).abs() < 1e-12, "cat eigenbasis is orthonormal");
        assert!(certificate_decay_excess(c, 20) <= 1e-9);
        assert!(!anosov_certificate_linear(IntMatrix::SHEAR).is_granted());
        assert!(!anosov_certificate_linear(IntMatrix::new([[0, -1], [1, 0]]).unwrap()).is_granted());

        // non-symmetric and orientation-reversing examples
        for m in [[[3, 2], [1, 1]], [[1, 1], [1, 0]], [[-2, 1], [1, -1]]] {
            let a = IntMatrix::new(m).unwrap();
            let c = anosov_certificate_linear(a).certificate().cloned().unwrap();
            assert!(c.c >= 1.0);
            assert!(c.lambda < 1.0);
            assert!(certificate_decay_excess(&c, 20) <= 1e-9, "{m:?}");
        }
    }

    #[test]
    fn decay_excess_detects_bad_constants() {
        let mut c = anosov_certificate_linear(IntMatrix::CAT)
            .certificate()
            .cloned()
            .unwrap();
        c.lambda *= 0.9;
        assert!(certificate_decay_excess(&c, 20) > 0.0);
    }

    #[test]
    fn cones() {
        let cat = make_linear([[2, 1], [1, 1]]).unwrap();
        let r = cone_report(&cat, 0.2, 16, 1);
        assert!(r.holds, "{r:?}");
        assert!(r.min_expansion >= 2.0);
        let g = make_conservative_perturbation(&cat, 1e-3, PerturbationMode::ShearSin).unwrap();
        assert!(cone_criterion(&g, 0.2, 64, 1));
        let shear = make_linear([[1, 0], [1, 1]]).unwrap();
        assert!(!cone_criterion(&shear, 0.2, 16, 1));
        assert!(!cone_criterion(&make_rotation(0.1).unwrap(), 0.2, 16, 1));
    }

    #[test]
    fn refine_perturbed_fixed_point() {
        let cat = make_linear([[2, 1], [1, 1]]).unwrap();
        let g = make_conservative_perturbation(&cat, 1e-3, PerturbationMode::ShearSin).unwrap();
        for r in periodic_points_linear(IntMatrix::CAT, 2).unwrap() {
            let p = refine_periodic_point(&g, &r.point, 2, 20).unwrap();
            assert!(periodic_residual(&g, &p, 2) <= 1e-12);
            let c = classify_periodic(&g, &p, 2, HYPERBOLICITY_TOLERANCE).unwrap();
            assert_eq!(c.classification, Classification::Hyperbolic);
        }
    }
}
