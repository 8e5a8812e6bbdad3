//! Shadowing for hyperbolic toral automorphisms by splitting the one-step
//! errors along the eigendirections: the stable part is summed forward, the
//! unstable part backward.

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::geometry::{dist_unchecked, wrap, TorusPoint};
use crate::hyperbolicity::hyperbolic_splitting;
use crate::linalg::IntMatrix;
use crate::orbits::PseudoOrbit;

/// A true orbit segment tracking a pseudo-orbit of a linear automorphism.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct LinearShadow {
    /// Orbit point at index 0.
    pub witness: TorusPoint,
    /// `A^k(witness)` for `-N <= k <= N`, built from the corrected sequence.
    pub orbit: Vec<TorusPoint>,
    /// `max_k d(x_k, y_k)`.
    pub achieved: f64,
    /// `K * delta_bound` with `K` from [`shadowing_constant`].
    pub bound: f64,
}

/// A constant `K` with: every delta-pseudo-orbit of `A` is `K delta`-shadowed.
/// `K = cond(V) (1 / (1 - |l_s|) + 1 / (|l_u| - 1))` for the eigenbasis `V`.
pub fn shadowing_constant(a: IntMatrix) -> Result<f64> {
    let sp = hyperbolic_splitting(a)
        .ok_or_else(|| Error::NotHyperbolic(format!("{:?} has an eigenvalue on the unit circle", a.entries())))?;
    Ok(sp.condition_number() * (1.0 / (1.0 - sp.lambda_s.abs()) + 1.0 / (sp.lambda_u.abs() - 1.0)))
}

pub fn shadow_solve_linear(a: IntMatrix, pseudo: &PseudoOrbit) -> Result<LinearShadow> {
    if pseudo.dim() != 2 {
        return Err(Error::DimensionMismatch {
            left: 2,
            right: pseudo.dim(),
        });
    }
    let sp = hyperbolic_splitting(a)
        .ok_or_else(|| Error::NotHyperbolic(format!("{:?} has an eigenvalue on the unit circle", a.entries())))?;
    let xs = pseudo.points();
    let m = xs.len() - 1;

    // e_j = x_{j+1} - A x_j, split as eu_j e_u + es_j e_s
    let errors: Vec<(f64, f64)> = xs
        .windows(2)
        .map(|w| {
            let ax = a.apply(w[0].raw());
            let next = w[1].raw();
            sp.coefficients([wrap(next[0] - ax[0]), wrap(next[1] - ax[1])])
        })
        .collect();

    // corrections c_{j+1} = A c_j - e_j
    let mut cu = vec![0.0; m + 1];
    for j in (0..m).rev() {
        cu[j] = (cu[j + 1] + errors[j].0) / sp.lambda_u;
    }
    let mut cs = vec![0.0; m + 1];
    for j in 0..m {
        cs[j + 1] = sp.lambda_s * cs[j] - errors[j].1;
    }

    let orbit: Vec<TorusPoint> = xs
        .iter()
        .enumerate()
        .map(|(j, x)| x.translate(sp.combine(cu[j], cs[j])))
        .collect();
    let achieved = xs
        .iter()
        .zip(&orbit)
        .map(|(x, y)| dist_unchecked(x, y))
        .fold(0.0, f64::max);
    Ok(LinearShadow {
        witness: orbit[pseudo.horizon()],
        achieved,
        bound: shadowing_constant(a)? * pseudo.delta_bound(),
        orbit,
    })
}
