//! Sequence-space Newton iteration for `F(y)_j = f(y_j) - y_{j+1} = 0`,
//! started at a pseudo-orbit. Each step is the minimum-norm solution of the
//! linearised system, computed from the block-tridiagonal normal equations.

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::geometry::{dist_unchecked, TorusPoint};
use crate::linalg::Matrix;
use crate::orbits::PseudoOrbit;
use crate::systems::SystemMap;

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct NewtonShadow {
    /// Corrected sequence `y_{-N}, ..., y_N`.
    pub orbit: Vec<TorusPoint>,
    /// `max_k d(x_k, y_k)`.
    pub achieved: f64,
    /// `max_j |f(y_j) - y_{j+1}|` at exit.
    pub residual: f64,
    pub iterations: usize,
}

impl NewtonShadow {
    pub fn witness(&self) -> TorusPoint {
        self.orbit[self.orbit.len() / 2]
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "status", rename_all = "kebab-case")]
pub enum NewtonOutcome {
    Converged(NewtonShadow),
    NotConverged { iterations: usize, residual: f64 },
}

impl NewtonOutcome {
    pub fn shadow(&self) -> Option<&NewtonShadow> {
        match self {
            NewtonOutcome::Converged(s) => Some(s),
            NewtonOutcome::NotConverged { .. } => None,
        }
    }
}

pub fn shadow_solve_newton(f: &SystemMap, pseudo: &PseudoOrbit, tol: f64, max_iter: usize) -> Result<NewtonOutcome> {
    if pseudo.dim() != f.dim() {
        return Err(Error::DimensionMismatch {
            left: f.dim(),
            right: pseudo.dim(),
        });
    }
    if tol.is_nan() || tol <= 0.0 {
        return Err(Error::InvalidParameter(format!(
            "tolerance must be positive, got {tol}"
        )));
    }
    Ok(newton_track(f, pseudo.points(), tol, max_iter))
}

fn residuals(f: &SystemMap, ys: &[TorusPoint]) -> (Vec<[f64; 2]>, f64) {
    let r: Vec<[f64; 2]> = ys.windows(2).map(|w| w[1].displacement_to(&f.forward(&w[0]))).collect();
    let norm = r.iter().map(|v| v[0].hypot(v[1])).fold(0.0, f64::max);
    (r, norm)
}

fn sub(a: [f64; 2], b: [f64; 2]) -> [f64; 2] {
    [a[0] - b[0], a[1] - b[1]]
}

/// Minimum-norm Newton step `-J^T (J J^T)^{-1} F`. `None` on a singular pivot.
fn newton_step(diffs: &[Matrix], r: &[[f64; 2]], dim: usize) -> Option<Vec<[f64; 2]>> {
    let m = r.len();
    let id = Matrix::identity(dim);
    // J J^T: diagonal D_j D_j^T + I, upper -D_{j+1}^T, lower -D_{j+1}
    let diag = |j: usize| diffs[j].mul(&diffs[j].transpose()).add(&id);
    let upper = |j: usize| diffs[j + 1].transpose().scale(-1.0);
    let lower = |j: usize| diffs[j + 1].scale(-1.0);

    let mut pivots = Vec::with_capacity(m);
    let mut rhs = Vec::with_capacity(m);
    pivots.push(diag(0).inverse()?);
    rhs.push(r[0]);
    for i in 1..m {
        let l = lower(i - 1).mul(&pivots[i - 1]);
        let a = diag(i).sub(&l.mul(&upper(i - 1)));
        pivots.push(a.inverse()?);
        rhs.push(sub(r[i], l.apply(rhs[i - 1])));
    }
    let mut w = vec![[0.0; 2]; m];
    w[m - 1] = pivots[m - 1].apply(rhs[m - 1]);
    for i in (0..m - 1).rev() {
        w[i] = pivots[i].apply(sub(rhs[i], upper(i).apply(w[i + 1])));
    }
    let mut delta = vec![[0.0; 2]; m + 1];
    for (j, d) in delta.iter_mut().enumerate() {
        let mut v = [0.0; 2];
        if j < m {
            v = diffs[j].transpose().apply(w[j]);
        }
        if j >= 1 {
            v = sub(v, w[j - 1]);
        }
        *d = [-v[0], -v[1]];
    }
    Some(delta)
}

/// Newton from an arbitrary finite sequence; no gap validation.
pub(crate) fn newton_track(f: &SystemMap, xs: &[TorusPoint], tol: f64, max_iter: usize) -> NewtonOutcome {
    let dim = f.dim();
    let mut ys = xs.to_vec();
    let (mut r, mut norm) = residuals(f, &ys);
    let mut iterations = 0;
    while norm > tol && iterations < max_iter {
        iterations += 1;
        let diffs: Vec<Matrix> = ys.iter().map(|y| f.differential(y)).collect();
        let Some(step) = newton_step(&diffs, &r, dim) else {
            return NewtonOutcome::NotConverged {
                iterations,
                residual: norm,
            };
        };
        // damped: halve until the residual decreases
        let mut t = 1.0;
        loop {
            let trial: Vec<TorusPoint> = ys
                .iter()
                .zip(&step)
                .map(|(y, d)| y.translate([t * d[0], t * d[1]]))
                .collect();
            let (tr, tn) = residuals(f, &trial);
            if tn < norm || t < 1e-3 {
                ys = trial;
                r = tr;
                norm = tn;
                break;
            }
            t /= 2.0;
        }
    }
    if norm > tol {
        return NewtonOutcome::NotConverged {
            iterations,
            residual: norm,
        };
    }
    let achieved = xs
        .iter()
        .zip(&ys)
        .map(|(x, y)| dist_unchecked(x, y))
        .fold(0.0, f64::max);
    NewtonOutcome::Converged(NewtonShadow {
        orbit: ys,
        achieved,
        residual: norm,
        iterations,
    })
}
