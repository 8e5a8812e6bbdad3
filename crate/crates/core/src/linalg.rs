//! Closed-form 1x1 / 2x2 linear algebra: differentials, integer
//! automorphism matrices, eigenvalues and spectral norms.

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// A real `dim x dim` matrix, `dim` in {1, 2}. Dimension-one matrices keep
/// only the `[0][0]` entry meaningful; the other entries are zero.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Matrix {
    m: [[f64; 2]; 2],
    dim: usize,
}

impl Matrix {
    pub fn scalar(a: f64) -> Self {
        Self {
            m: [[a, 0.0], [0.0, 0.0]],
            dim: 1,
        }
    }

    pub fn new2(m: [[f64; 2]; 2]) -> Self {
        Self { m, dim: 2 }
    }

    pub fn identity(dim: usize) -> Self {
        if dim == 1 {
            Self::scalar(1.0)
        } else {
            Self::new2([[1.0, 0.0], [0.0, 1.0]])
        }
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    pub fn entries(&self) -> [[f64; 2]; 2] {
        self.m
    }

    pub fn get(&self, i: usize, j: usize) -> f64 {
        self.m[i][j]
    }

    pub fn det(&self) -> f64 {
        if self.dim == 1 {
            self.m[0][0]
        } else {
            self.m[0][0] * self.m[1][1] - self.m[0][1] * self.m[1][0]
        }
    }

    pub fn trace(&self) -> f64 {
        if self.dim == 1 {
            self.m[0][0]
        } else {
            self.m[0][0] + self.m[1][1]
        }
    }

    pub fn mul(&self, other: &Matrix) -> Matrix {
        debug_assert_eq!(self.dim, other.dim);
        let a = &self.m;
        let b = &other.m;
        let mut m = [[0.0; 2]; 2];
        for (i, row) in m.iter_mut().enumerate() {
            for (j, v) in row.iter_mut().enumerate() {
                *v = a[i][0] * b[0][j] + a[i][1] * b[1][j];
            }
        }
        Matrix { m, dim: self.dim }
    }

    pub fn sub(&self, other: &Matrix) -> Matrix {
        let mut m = self.m;
        for (i, row) in m.iter_mut().enumerate() {
            for (j, v) in row.iter_mut().enumerate() {
                *v -= other.m[i][j];
            }
        }
        Matrix { m, dim: self.dim }
    }

    pub fn add(&self, other: &Matrix) -> Matrix {
        self.sub(&other.scale(-1.0))
    }

    pub fn scale(&self, c: f64) -> Matrix {
        let mut m = self.m;
        m.iter_mut().flatten().for_each(|v| *v *= c);
        Matrix { m, dim: self.dim }
    }

    pub fn transpose(&self) -> Matrix {
        let m = self.m;
        Matrix {
            m: [[m[0][0], m[1][0]], [m[0][1], m[1][1]]],
            dim: self.dim,
        }
    }

    pub fn apply(&self, v: [f64; 2]) -> [f64; 2] {
        if self.dim == 1 {
            [self.m[0][0] * v[0], 0.0]
        } else {
            [
                self.m[0][0] * v[0] + self.m[0][1] * v[1],
                self.m[1][0] * v[0] + self.m[1][1] * v[1],
            ]
        }
    }

    pub fn inverse(&self) -> Option<Matrix> {
        let det = self.det();
        if det == 0.0 || !det.is_finite() {
            return None;
        }
        if self.dim == 1 {
            return Some(Matrix::scalar(1.0 / det));
        }
        let m = self.m;
        Some(Matrix::new2([
            [m[1][1] / det, -m[0][1] / det],
            [-m[1][0] / det, m[0][0] / det],
        ]))
    }

    pub fn powi(&self, n: u32) -> Matrix {
        let mut out = Matrix::identity(self.dim);
        for _ in 0..n {
            out = out.mul(self);
        }
        out
    }

    /// Largest and smallest singular values, in closed form for 2x2:
    /// `s1^2 + s2^2 = |M|_F^2`, `s1 s2 = |det M|`.
    pub fn singular_values(&self) -> (f64, f64) {
        if self.dim == 1 {
            let a = self.m[0][0].abs();
            return (a, a);
        }
        let f2: f64 = self.m.iter().flatten().map(|v| v * v).sum();
        let det = self.det().abs();
        let disc = (f2 * f2 - 4.0 * det * det).max(0.0).sqrt();
        let s1 = ((f2 + disc) / 2.0).sqrt();
        let s2 = if s1 > 0.0 { det / s1 } else { 0.0 };
        (s1, s2)
    }

    /// Operator norm induced by the Euclidean norm.
    pub fn spectral_norm(&self) -> f64 {
        self.singular_values().0
    }

    pub fn eigenvalues(&self) -> Vec<Eigenvalue> {
        if self.dim == 1 {
            return vec![Eigenvalue::real(self.m[0][0])];
        }
        let t = self.trace();
        let d = self.det();
        let disc = t * t - 4.0 * d;
        if disc >= 0.0 {
            let s = disc.sqrt();
            // avoid cancellation in the smaller root
            let big = if t >= 0.0 { (t + s) / 2.0 } else { (t - s) / 2.0 };
            let small = if big != 0.0 { d / big } else { 0.0 };
            let (l1, l2) = if big.abs() >= small.abs() {
                (big, small)
            } else {
                (small, big)
            };
            vec![Eigenvalue::real(l1), Eigenvalue::real(l2)]
        } else {
            let im = (-disc).sqrt() / 2.0;
            vec![Eigenvalue { re: t / 2.0, im }, Eigenvalue { re: t / 2.0, im: -im }]
        }
    }
}

/// A complex eigenvalue, serialized as `{re, im}`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Eigenvalue {
    pub re: f64,
    pub im: f64,
}

impl Eigenvalue {
    pub fn real(re: f64) -> Self {
        Self { re, im: 0.0 }
    }

    pub fn modulus(&self) -> f64 {
        self.re.hypot(self.im)
    }

    pub fn is_real(&self) -> bool {
        self.im == 0.0
    }
}

/// 2x2 integer matrix with determinant ±1: a toral automorphism.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(try_from = "[[i64; 2]; 2]", into = "[[i64; 2]; 2]")]
pub struct IntMatrix([[i64; 2]; 2]);

impl IntMatrix {
    pub const CAT: IntMatrix = IntMatrix([[2, 1], [1, 1]]);
    pub const SHEAR: IntMatrix = IntMatrix([[1, 0], [1, 1]]);
    pub const IDENTITY: IntMatrix = IntMatrix([[1, 0], [0, 1]]);

    pub fn new(m: [[i64; 2]; 2]) -> Result<Self> {
        let det = m[0][0] as i128 * m[1][1] as i128 - m[0][1] as i128 * m[1][0] as i128;
        if det.abs() != 1 {
            return Err(Error::Construction(format!(
                "integer matrix {m:?} has determinant {det}, expected ±1"
            )));
        }
        Ok(Self(m))
    }

    pub fn entries(&self) -> [[i64; 2]; 2] {
        self.0
    }

    pub fn det(&self) -> i64 {
        let m = self.0;
        m[0][0] * m[1][1] - m[0][1] * m[1][0]
    }

    pub fn trace(&self) -> i64 {
        self.0[0][0] + self.0[1][1]
    }

    /// Integer inverse `det * adj(A)`, exact since `det = ±1`.
    pub fn inverse(&self) -> IntMatrix {
        let [[a, b], [c, d]] = self.0;
        let det = self.det();
        IntMatrix([[det * d, -det * b], [-det * c, det * a]])
    }

    pub fn to_matrix(&self) -> Matrix {
        let [[a, b], [c, d]] = self.0;
        Matrix::new2([[a as f64, b as f64], [c as f64, d as f64]])
    }

    pub fn apply(&self, v: [f64; 2]) -> [f64; 2] {
        let [[a, b], [c, d]] = self.0;
        [a as f64 * v[0] + b as f64 * v[1], c as f64 * v[0] + d as f64 * v[1]]
    }

    pub fn eigenvalues(&self) -> Vec<Eigenvalue> {
        self.to_matrix().eigenvalues()
    }
}

impl TryFrom<[[i64; 2]; 2]> for IntMatrix {
    type Error = Error;

    fn try_from(m: [[i64; 2]; 2]) -> Result<Self> {
        IntMatrix::new(m)
    }
}

impl From<IntMatrix> for [[i64; 2]; 2] {
    fn from(m: IntMatrix) -> Self {
        m.0
    }
}

/// Exact integer 2x2 products, used for lattice computations.
pub(crate) type I128Mat = [[i128; 2]; 2];

pub(crate) fn i128_mul(a: &I128Mat, b: &I128Mat) -> I128Mat {
    let mut out = [[0i128; 2]; 2];
    for (i, row) in out.iter_mut().enumerate() {
        for (j, v) in row.iter_mut().enumerate() {
            *v = a[i][0] * b[0][j] + a[i][1] * b[1][j];
        }
    }
    out
}

pub(crate) fn i128_pow(a: &I128Mat, n: usize) -> I128Mat {
    let mut out = [[1, 0], [0, 1]];
    for _ in 0..n {
        out = i128_mul(&out, a);
    }
    out
}

impl From<IntMatrix> for I128Mat {
    fn from(m: IntMatrix) -> Self {
        let [[a, b], [c, d]] = m.0;
        [[a as i128, b as i128], [c as i128, d as i128]]
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn cat_eigenvalues() {
        let ev = IntMatrix::CAT.eigenvalues();
        let s5 = 5f64.sqrt();
        assert!((ev[0].re - (3.0 + s5) / 2.0).abs() < 1e-14);
        assert!((ev[1].re - (3.0 - s5) / 2.0).abs() < 1e-15);
    }

    #[test]
    fn rotation_eigenvalues_on_unit_circle() {
        let r = IntMatrix::new([[0, -1], [1, 0]]).unwrap();
        for e in r.eigenvalues() {
            assert!((e.modulus() - 1.0).abs() < 1e-15);
            assert!(!e.is_real());
        }
    }

    #[test]
    fn singular_values_match_brute_force() {
        let m = Matrix::new2([[2.0, 1.0], [1.0, 1.0]]);
        let (s1, s2) = m.singular_values();
        let mut best: f64 = 0.0;
        for i in 0..100_000 {
            let t = i as f64 / 100_000.0 * std::f64::consts::PI;
            let v = m.apply([t.cos(), t.sin()]);
            best = best.max(v[0].hypot(v[1]));
        }
        assert!((s1 - best).abs() < 1e-8);
        assert!((s1 * s2 - 1.0).abs() < 1e-12);
    }

    #[test]
    fn integer_inverse() {
        let a = IntMatrix::CAT;
        assert_eq!(a.inverse().entries(), [[1, -1], [-1, 2]]);
        let m = a.to_matrix().mul(&a.inverse().to_matrix());
        assert_eq!(m, Matrix::identity(2));
        assert!(IntMatrix::new([[2, 0], [0, 1]]).is_err());
        assert!(serde_json::from_str::<IntMatrix>("[[1,1],[1,1]]").is_err());
    }
}
