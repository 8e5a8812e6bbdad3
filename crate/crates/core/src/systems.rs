//! Library of invertible, volume-preserving maps of the circle and torus.
//!
//! Every map is described by a serializable [`MapSpec`] and evaluated through
//! a validated [`SystemMap`]. Perturbations are globally defined and have
//! Jacobian determinant exactly one, so volume preservation holds to machine
//! precision rather than up to a bump-function blend.

use std::f64::consts::PI;
use std::fmt;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::geometry::{dist_unchecked, TorusPoint};
use crate::linalg::{IntMatrix, Matrix};

/// Tolerance used when a constructor checks volume preservation.
pub const VOLUME_TOLERANCE: f64 = 1e-9;

/// Sample budget (per axis) for constructor-time sanity checks.
const CONSTRUCTION_SAMPLES: usize = 32;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum PerturbationMode {
    /// `tau(x, y) = (x + delta sin(2 pi (y + phase)), y)` (or its transpose).
    ShearSin,
    /// `tau(x) = x + delta e_1`.
    Translation,
}

impl fmt::Display for PerturbationMode {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            PerturbationMode::ShearSin => f.write_str("shear-sin"),
            PerturbationMode::Translation => f.write_str("translation"),
        }
    }
}

/// Coordinate displaced by a shear-sin perturbation.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum ShearAxis {
    #[default]
    X,
    Y,
}

fn is_zero(v: &f64) -> bool {
    *v == 0.0
}

fn is_default_axis(a: &ShearAxis) -> bool {
    *a == ShearAxis::X
}

/// Declarative description of a map, serialized as
/// `{kind, matrix?, theta?, delta?, mode?, base?}`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "kebab-case", deny_unknown_fields)]
pub enum MapSpec {
    /// `x -> A x mod Z^2`.
    Linear { matrix: IntMatrix },
    /// `x -> x + theta mod 1` on the circle.
    Rotation { theta: f64 },
    /// Base map followed by a translation of `delta` in the first coordinate.
    TranslationMethod { base: Box<MapSpec>, delta: f64 },
    /// Base map precomposed with a unit-Jacobian perturbation `tau`.
    Perturbed {
        base: Box<MapSpec>,
        delta: f64,
        mode: PerturbationMode,
        #[serde(default, skip_serializing_if = "is_zero")]
        phase: f64,
        #[serde(default, skip_serializing_if = "is_default_axis")]
        axis: ShearAxis,
    },
}

impl MapSpec {
    pub fn linear(matrix: IntMatrix) -> Self {
        MapSpec::Linear { matrix }
    }

    pub fn cat() -> Self {
        Self::linear(IntMatrix::CAT)
    }

    pub fn shear() -> Self {
        Self::linear(IntMatrix::SHEAR)
    }

    pub fn identity() -> Self {
        Self::linear(IntMatrix::IDENTITY)
    }

    pub fn rotation(theta: f64) -> Self {
        MapSpec::Rotation { theta }
    }

    fn dim(&self) -> usize {
        match self {
            MapSpec::Linear { .. } => 2,
            MapSpec::Rotation { .. } => 1,
            MapSpec::TranslationMethod { base, .. } | MapSpec::Perturbed { base, .. } => base.dim(),
        }
    }

    fn validate(&self) -> Result<()> {
        match self {
            MapSpec::Linear { .. } => Ok(()),
            MapSpec::Rotation { theta } => {
                if theta.is_finite() {
                    Ok(())
                } else {
                    Err(Error::Construction(format!("rotation angle {theta} is not finite")))
                }
            }
            MapSpec::TranslationMethod { base, delta } => {
                base.validate()?;
                if !(0.0..0.5).contains(delta) {
                    return Err(Error::Construction(format!(
                        "translation delta {delta} outside [0, 1/2)"
                    )));
                }
                Ok(())
            }
            MapSpec::Perturbed {
                base,
                delta,
                mode,
                phase,
                ..
            } => {
                base.validate()?;
                if !delta.is_finite() || !phase.is_finite() {
                    return Err(Error::Construction("perturbation parameters must be finite".into()));
                }
                match mode {
                    PerturbationMode::ShearSin => {
                        if base.dim() != 2 {
                            return Err(Error::Construction("shear-sin perturbation needs a torus map".into()));
                        }
                        if (2.0 * PI * delta).abs() >= 1.0 {
                            return Err(Error::Construction(format!(
                                "shear-sin amplitude {delta} too large (need |2 pi delta| < 1)"
                            )));
                        }
                    }
                    PerturbationMode::Translation => {
                        if delta.abs() >= 0.5 {
                            return Err(Error::Construction(format!(
                                "translation delta {delta} outside (-1/2, 1/2)"
                            )));
                        }
                    }
                }
                Ok(())
            }
        }
    }

    fn label(&self) -> String {
        match self {
            MapSpec::Linear { matrix } => match *matrix {
                IntMatrix::CAT => "cat".to_string(),
                IntMatrix::SHEAR => "shear".to_string(),
                IntMatrix::IDENTITY => "identity".to_string(),
                m => format!("linear{:?}", m.entries()),
            },
            MapSpec::Rotation { theta } => format!("rotation({theta})"),
            MapSpec::TranslationMethod { base, delta } => {
                format!("translate({}, {delta})", base.label())
            }
            MapSpec::Perturbed {
                base,
                delta,
                mode,
                phase,
                axis,
            } => {
                let mut s = format!("perturbed({}, {mode}, {delta}", base.label());
                if *phase != 0.0 {
                    s.push_str(&format!(", phase={phase}"));
                }
                if *axis != ShearAxis::X {
                    s.push_str(", axis=y");
                }
                s.push(')');
                s
            }
        }
    }

    fn forward(&self, p: &TorusPoint) -> TorusPoint {
        match self {
            MapSpec::Linear { matrix } => TorusPoint::from_lift(matrix.apply(p.raw()), 2),
            MapSpec::Rotation { theta } => TorusPoint::circle(p.x() + theta),
            MapSpec::TranslationMethod { base, delta } => base.forward(p).translate([*delta, 0.0]),
            MapSpec::Perturbed { base, .. } => base.forward(&self.tau(p, 1.0)),
        }
    }

    fn backward(&self, p: &TorusPoint) -> TorusPoint {
        match self {
            MapSpec::Linear { matrix } => TorusPoint::from_lift(matrix.inverse().apply(p.raw()), 2),
            MapSpec::Rotation { theta } => TorusPoint::circle(p.x() - theta),
            MapSpec::TranslationMethod { base, delta } => base.backward(&p.translate([-delta, 0.0])),
            MapSpec::Perturbed { base, .. } => self.tau(&base.backward(p), -1.0),
        }
    }

    fn differential(&self, p: &TorusPoint) -> Matrix {
        match self {
            MapSpec::Linear { matrix } => matrix.to_matrix(),
            MapSpec::Rotation { .. } => Matrix::scalar(1.0),
            MapSpec::TranslationMethod { base, .. } => base.differential(p),
            MapSpec::Perturbed { base, .. } => {
                let inner = self.tau(p, 1.0);
                base.differential(&inner).mul(&self.tau_differential(p))
            }
        }
    }

    /// The perturbation `tau` (sign = 1) or its inverse (sign = -1). Only
    /// meaningful on `Perturbed`.
    fn tau(&self, p: &TorusPoint, sign: f64) -> TorusPoint {
        let MapSpec::Perturbed {
            delta,
            mode,
            phase,
            axis,
            ..
        } = self
        else {
            return *p;
        };
        let d = sign * delta;
        match mode {
            PerturbationMode::Translation => p.translate([d, 0.0]),
            PerturbationMode::ShearSin => match axis {
                ShearAxis::X => p.translate([d * (2.0 * PI * (p.y() + phase)).sin(), 0.0]),
                ShearAxis::Y => p.translate([0.0, d * (2.0 * PI * (p.x() + phase)).sin()]),
            },
        }
    }

    fn tau_differential(&self, p: &TorusPoint) -> Matrix {
        let MapSpec::Perturbed {
            base,
            delta,
            mode,
            phase,
            axis,
        } = self
        else {
            return Matrix::identity(self.dim());
        };
        match mode {
            PerturbationMode::Translation => Matrix::identity(base.dim()),
            PerturbationMode::ShearSin => match axis {
                ShearAxis::X => {
                    let s = 2.0 * PI * delta * (2.0 * PI * (p.y() + phase)).cos();
                    Matrix::new2([[1.0, s], [0.0, 1.0]])
                }
                ShearAxis::Y => {
                    let s = 2.0 * PI * delta * (2.0 * PI * (p.x() + phase)).cos();
                    Matrix::new2([[1.0, 0.0], [s, 1.0]])
                }
            },
        }
    }

    /// Upper bounds on `sup |Df|` and `sup |D(f^-1)|` (spectral norm).
    fn lipschitz(&self) -> (f64, f64) {
        match self {
            MapSpec::Linear { matrix } => (
                matrix.to_matrix().spectral_norm(),
                matrix.inverse().to_matrix().spectral_norm(),
            ),
            MapSpec::Rotation { .. } => (1.0, 1.0),
            MapSpec::TranslationMethod { base, .. } => base.lipschitz(),
            MapSpec::Perturbed { base, delta, mode, .. } => {
                let (fwd, bwd) = base.lipschitz();
                let tau = match mode {
                    PerturbationMode::Translation => 1.0,
                    // |[[1, s], [0, 1]]| = (|s| + sqrt(s^2 + 4)) / 2, increasing in |s|
                    PerturbationMode::ShearSin => {
                        let s = 2.0 * PI * delta.abs();
                        (s + (s * s + 4.0).sqrt()) / 2.0
                    }
                };
                (fwd * tau, bwd * tau)
            }
        }
    }

    fn constant_differential(&self) -> Option<Matrix> {
        match self {
            MapSpec::Linear { matrix } => Some(matrix.to_matrix()),
            MapSpec::Rotation { .. } => Some(Matrix::scalar(1.0)),
            MapSpec::TranslationMethod { base, .. } => base.constant_differential(),
            MapSpec::Perturbed { base, delta, mode, .. } => match mode {
                PerturbationMode::Translation => base.constant_differential(),
                PerturbationMode::ShearSin if *delta == 0.0 => base.constant_differential(),
                PerturbationMode::ShearSin => None,
            },
        }
    }

    fn linear_model(&self) -> Option<IntMatrix> {
        match self {
            MapSpec::Linear { matrix } => Some(*matrix),
            MapSpec::Rotation { .. } => None,
            MapSpec::TranslationMethod { base, .. } | MapSpec::Perturbed { base, .. } => base.linear_model(),
        }
    }
}

/// A validated invertible volume-preserving map with its differential.
#[derive(Debug, Clone, PartialEq)]
pub struct SystemMap {
    spec: MapSpec,
    label: String,
    dim: usize,
    lipschitz: (f64, f64),
    constant_differential: Option<Matrix>,
}

impl SystemMap {
    pub fn from_spec(spec: MapSpec) -> Result<Self> {
        spec.validate()?;
        let map = SystemMap {
            label: spec.label(),
            dim: spec.dim(),
            lipschitz: spec.lipschitz(),
            constant_differential: spec.constant_differential(),
            spec,
        };
        let defect = volume_defect(&map, CONSTRUCTION_SAMPLES);
        if defect > VOLUME_TOLERANCE {
            return Err(Error::Construction(format!(
                "{} is not volume preserving (defect {defect:e})",
                map.label
            )));
        }
        Ok(map)
    }

    pub fn spec(&self) -> &MapSpec {
        &self.spec
    }

    pub fn label(&self) -> &str {
        &self.label
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    pub fn forward(&self, p: &TorusPoint) -> TorusPoint {
        debug_assert_eq!(p.dim(), self.dim);
        self.spec.forward(p)
    }

    pub fn backward(&self, p: &TorusPoint) -> TorusPoint {
        debug_assert_eq!(p.dim(), self.dim);
        self.spec.backward(p)
    }

    pub fn differential(&self, p: &TorusPoint) -> Matrix {
        self.spec.differential(p)
    }

    /// `D(f^-1)(p) = (Df(f^-1 p))^-1`.
    pub fn inverse_differential(&self, p: &TorusPoint) -> Matrix {
        self.differential(&self.backward(p))
            .inverse()
            .expect("volume-preserving differential is invertible")
    }

    /// `f^k(p)` for any integer `k`.
    pub fn iterate(&self, p: &TorusPoint, k: i64) -> TorusPoint {
        let mut q = *p;
        if k >= 0 {
            for _ in 0..k {
                q = self.forward(&q);
            }
        } else {
            for _ in 0..(-k) {
                q = self.backward(&q);
            }
        }
        q
    }

    /// Upper bound on the Lipschitz constant of `f` (`inverse = false`) or
    /// `f^-1` with respect to the quotient metric.
    pub fn lipschitz_bound(&self, inverse: bool) -> f64 {
        if inverse {
            self.lipschitz.1
        } else {
            self.lipschitz.0
        }
    }

    /// Upper bound on `Lip(f^k)`: exact `|M^k|` for affine maps, otherwise
    /// `Lip(f)^|k|`.
    pub fn iterate_lipschitz_bound(&self, k: i64) -> f64 {
        let n = k.unsigned_abs() as u32;
        match self.constant_differential {
            Some(m) => {
                let m = if k < 0 { m.inverse().expect("unimodular") } else { m };
                m.powi(n).spectral_norm()
            }
            None => self.lipschitz_bound(k < 0).powi(n as i32),
        }
    }

    /// Differential when it does not depend on the point (affine maps).
    pub fn constant_differential(&self) -> Option<Matrix> {
        self.constant_differential
    }

    /// The integer matrix this map is built around, if any.
    pub fn linear_model(&self) -> Option<IntMatrix> {
        self.spec.linear_model()
    }
}

impl fmt::Display for SystemMap {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&self.label)
    }
}

/// `x -> A x mod Z^2` for an integer matrix with `|det A| = 1`.
pub fn make_linear(matrix: [[i64; 2]; 2]) -> Result<SystemMap> {
    SystemMap::from_spec(MapSpec::linear(IntMatrix::new(matrix)?))
}

/// Circle rotation by `theta`.
pub fn make_rotation(theta: f64) -> Result<SystemMap> {
    SystemMap::from_spec(MapSpec::rotation(theta))
}

/// `h = T_delta ∘ base`, with `T_delta` the translation by `delta` in the
/// first coordinate. The action on the remaining coordinate is the base's
/// own, so `Dh = D(base)` everywhere and `d_C0(h, base) = delta`.
pub fn make_translation_method_map(base: &SystemMap, delta: f64) -> Result<SystemMap> {
    SystemMap::from_spec(MapSpec::TranslationMethod {
        base: Box::new(base.spec.clone()),
        delta,
    })
}

/// `g = base ∘ tau` with a unit-Jacobian perturbation `tau`.
pub fn make_conservative_perturbation(base: &SystemMap, delta: f64, mode: PerturbationMode) -> Result<SystemMap> {
    make_conservative_perturbation_with(base, delta, mode, 0.0, ShearAxis::X)
}

pub fn make_conservative_perturbation_with(
    base: &SystemMap,
    delta: f64,
    mode: PerturbationMode,
    phase: f64,
    axis: ShearAxis,
) -> Result<SystemMap> {
    SystemMap::from_spec(MapSpec::Perturbed {
        base: Box::new(base.spec.clone()),
        delta,
        mode,
        phase,
        axis,
    })
}

/// Shear-sin perturbation with phase and axis drawn from `seed`.
pub fn make_seeded_perturbation(base: &SystemMap, delta: f64, seed: u64) -> Result<SystemMap> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let phase: f64 = rng.random();
    let axis = if rng.random::<bool>() {
        ShearAxis::Y
    } else {
        ShearAxis::X
    };
    make_conservative_perturbation_with(base, delta, PerturbationMode::ShearSin, phase, axis)
}

/// Radical inverse of `i` in the given base (van der Corput).
fn radical_inverse(mut i: usize, base: usize) -> f64 {
    let inv = 1.0 / base as f64;
    let mut f = inv;
    let mut r = 0.0;
    while i > 0 {
        r += f * (i % base) as f64;
        i /= base;
        f *= inv;
    }
    r
}

/// Sample set used by the grid estimators: the first `samples^dim` points of
/// the van der Corput (dim 1) or Halton(2, 3) (dim 2) sequence. Larger sample
/// counts give supersets, so sup-estimates are monotone in `samples`.
pub fn sample_points(dim: usize, samples: usize) -> Vec<TorusPoint> {
    let count = samples.max(1).pow(dim as u32);
    (0..count)
        .map(|i| {
            if dim == 1 {
                TorusPoint::circle(radical_inverse(i, 2))
            } else {
                TorusPoint::torus(radical_inverse(i, 2), radical_inverse(i, 3))
            }
        })
        .collect()
}

/// Lower bound on `d_1(f, g) = max(sup d(f x, g x), sup |Df(x) - Dg(x)|)`
/// from `samples^dim` sample points.
pub fn c1_distance(f: &SystemMap, g: &SystemMap, samples: usize) -> Result<f64> {
    if f.dim != g.dim {
        return Err(Error::DimensionMismatch {
            left: f.dim,
            right: g.dim,
        });
    }
    let (c0, c1) = c1_components(f, g, samples);
    Ok(c0.max(c1))
}

/// `(C0 part, differential part)` of the sampled `d_1`.
pub fn c1_components(f: &SystemMap, g: &SystemMap, samples: usize) -> (f64, f64) {
    sample_points(f.dim, samples)
        .par_iter()
        .map(|x| {
            let c0 = dist_unchecked(&f.forward(x), &g.forward(x));
            let c1 = f.differential(x).sub(&g.differential(x)).spectral_norm();
            (c0, c1)
        })
        .reduce(|| (0.0, 0.0), |a, b| (a.0.max(b.0), a.1.max(b.1)))
}

/// `max |det Df(x) - 1|` over `samples^dim` sample points.
pub fn volume_defect(f: &SystemMap, samples: usize) -> f64 {
    sample_points(f.dim, samples)
        .par_iter()
        .map(|x| (f.differential(x).det() - 1.0).abs())
        .reduce(|| 0.0, f64::max)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::geometry::torus_dist;

    fn t(x: f64, y: f64) -> TorusPoint {
        TorusPoint::torus(x, y)
    }

    fn close(p: &TorusPoint, q: &TorusPoint, tol: f64) -> bool {
        torus_dist(p, q).unwrap() <= tol
    }

    #[test]
    fn linear_examples() {
        let id = make_linear([[1, 0], [0, 1]]).unwrap();
        assert_eq!(id.forward(&t(0.3, 0.7)), t(0.3, 0.7));
        let cat = make_linear([[2, 1], [1, 1]]).unwrap();
        assert_eq!(cat.forward(&t(0.5, 0.5)), t(0.5, 0.0));
        assert_eq!(cat.label(), "cat");
        let shear = make_linear([[1, 0], [1, 1]]).unwrap();
        assert!(close(&shear.forward(&t(0.25, 0.1)), &t(0.25, 0.35), 1e-15));
        assert!(matches!(make_linear([[1, 1], [1, 1]]), Err(Error::Construction(_))));
    }

    #[test]
    fn rotation_examples() {
        let id = make_rotation(0.0).unwrap();
        assert_eq!(id.forward(&TorusPoint::circle(0.3)), TorusPoint::circle(0.3));
        let half = make_rotation(0.5).unwrap();
        assert_eq!(half.forward(&TorusPoint::circle(0.75)), TorusPoint::circle(0.25));
        let theta = (5f64.sqrt() - 1.0) / 2.0;
        let r = make_rotation(theta).unwrap();
        let expected = [
            0.618_033_988_749_894_8,
            0.236_067_977_499_789_7,
            0.854_101_966_249_684_5,
        ];
        let mut p = TorusPoint::circle(0.0);
        for e in expected {
            p = r.forward(&p);
            assert!((p.x() - e).abs() < 1e-12, "{} vs {e}", p.x());
        }
    }

    #[test]
    fn translation_method_examples() {
        let id1 = make_rotation(0.0).unwrap();
        let h = make_translation_method_map(&id1, 0.01).unwrap();
        assert!((h.forward(&TorusPoint::circle(0.3)).x() - 0.31).abs() < 1e-15);
        assert!((c1_distance(&id1, &h, 64).unwrap() - 0.01).abs() < 1e-12);

        let shear = make_linear([[1, 0], [1, 1]]).unwrap();
        let h = make_translation_method_map(&shear, 0.01).unwrap();
        assert!(close(&h.forward(&t(0.0, 0.0)), &t(0.01, 0.0), 1e-15));
        assert!(close(&h.forward(&t(0.2, 0.3)), &t(0.21, 0.5), 1e-15));

        let cat = make_linear([[2, 1], [1, 1]]).unwrap();
        let h = make_translation_method_map(&cat, 0.001).unwrap();
        let (c0, c1) = c1_components(&cat, &h, 64);
        assert!((c0 - 0.001).abs() < 1e-12);
        assert_eq!(c1, 0.0);
        assert!(make_translation_method_map(&cat, 0.6).is_err());
    }

    #[test]
    fn perturbation_examples() {
        let cat = make_linear([[2, 1], [1, 1]]).unwrap();
        let same = make_conservative_perturbation(&cat, 0.0, PerturbationMode::ShearSin).unwrap();
        for x in sample_points(2, 8) {
            assert_eq!(same.forward(&x), cat.forward(&x));
        }
        let id = make_linear([[1, 0], [0, 1]]).unwrap();
        let tau = make_conservative_perturbation(&id, 0.001, PerturbationMode::ShearSin).unwrap();
        assert!(close(&tau.forward(&t(0.0, 0.25)), &t(0.001, 0.25), 1e-15));

        let g = make_conservative_perturbation(&cat, 0.001, PerturbationMode::ShearSin).unwrap();
        assert!(volume_defect(&g, 100) <= 1e-12);
        assert!(make_conservative_perturbation(&cat, 0.2, PerturbationMode::ShearSin).is_err());
        let rot = make_rotation(0.1).unwrap();
        assert!(make_conservative_perturbation(&rot, 0.001, PerturbationMode::ShearSin).is_err());
        assert!(make_conservative_perturbation(&rot, 0.001, PerturbationMode::Translation).is_ok());
    }

    #[test]
    fn c1_distance_examples() {
        let cat = make_linear([[2, 1], [1, 1]]).unwrap();
        assert_eq!(c1_distance(&cat, &cat, 16).unwrap(), 0.0);
        let r0 = make_rotation(0.0).unwrap();
        let r1 = make_rotation(0.01).unwrap();
        assert!((c1_distance(&r0, &r1, 32).unwrap() - 0.01).abs() < 1e-12);
        assert!(c1_distance(&r0, &cat, 4).is_err());

        // D(cat∘tau) - D(cat) = A [[0, s], [0, 0]] has norm |s| * |A e_1| = |s| sqrt(5),
        // s = 2 pi delta cos(2 pi y), maximal at y = 0 which is sample 0.
        let g = make_conservative_perturbation(&cat, 0.001, PerturbationMode::ShearSin).unwrap();
        let d = c1_distance(&cat, &g, 256).unwrap();
        let expected = 2.0 * PI * 0.001 * 5f64.sqrt();
        assert!((d - expected).abs() < 1e-12, "{d} vs {expected}");
    }

    #[test]
    fn c1_distance_monotone_in_samples() {
        let cat = make_linear([[2, 1], [1, 1]]).unwrap();
        let g =
            make_conservative_perturbation_with(&cat, 0.001, PerturbationMode::ShearSin, 0.137, ShearAxis::Y).unwrap();
        let mut last = 0.0;
        for s in 1..40 {
            let d = c1_distance(&cat, &g, s).unwrap();
            assert!(d >= last);
            last = d;
        }
    }

    #[test]
    fn lipschitz_bounds_dominate_sampled_norms() {
        let cat = make_linear([[2, 1], [1, 1]]).unwrap();
        let g = make_conservative_perturbation(&cat, 0.01, PerturbationMode::ShearSin).unwrap();
        for x in sample_points(2, 32) {
            assert!(g.differential(&x).spectral_norm() <= g.lipschitz_bound(false) + 1e-12);
            assert!(g.inverse_differential(&x).spectral_norm() <= g.lipschitz_bound(true) + 1e-12);
        }
        let shear = make_linear([[1, 0], [1, 1]]).unwrap();
        // |S^k| = (|k| + sqrt(k^2 + 4)) / 2
        for k in -6i64..=6 {
            let kf = k.abs() as f64;
            let exact = (kf + (kf * kf + 4.0).sqrt()) / 2.0;
            assert!((shear.iterate_lipschitz_bound(k) - exact).abs() < 1e-12);
        }
    }

    #[test]
    fn spec_json_round_trip() {
        let cat = make_linear([[2, 1], [1, 1]]).unwrap();
        let g = make_conservative_perturbation(&cat, 0.001, PerturbationMode::ShearSin).unwrap();
        let s = serde_json::to_string(g.spec()).unwrap();
        assert_eq!(
            s,
            r#"{"kind":"perturbed","base":{"kind":"linear","matrix":[[2,1],[1,1]]},"delta":0.001,"mode":"shear-sin"}"#
        );
        let back: MapSpec = serde_json::from_str(&s).unwrap();
        assert_eq!(&back, g.spec());
        let rot: MapSpec = serde_json::from_str(r#"{"kind":"rotation","theta":0.25}"#).unwrap();
        assert_eq!(SystemMap::from_spec(rot).unwrap().dim(), 1);
        assert!(serde_json::from_str::<MapSpec>(r#"{"kind":"linear","matrix":[[2,0],[0,1]]}"#).is_err());
    }
}
