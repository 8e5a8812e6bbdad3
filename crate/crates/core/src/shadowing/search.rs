//! Grid search for tracking points with certified failure.
//!
//! Every property reduces to minimising an objective `y -> D(y)` over the
//! phase space and comparing with `eps`. Candidates are tried in a fixed
//! order (anchor, Newton seed, full grid, local refinement), so the verdict
//! and witness are deterministic. When nothing tracks, `D` is Lipschitz in
//! `y` with the constant of the candidate orbits, and a grid minimum above
//! `eps + L r` (`r` the covering radius) rules out every point.

use rayon::prelude::*;

use super::newton::newton_track;
use super::{Outcome, Property, ShadowVerdict, WitnessSource};
use crate::error::{Error, Result};
use crate::geometry::{dist_unchecked, one_sided_excess, PointSet, TorusPoint};
use crate::orbits::{orbit_points, orbit_points_into, MethodSpec};
use crate::systems::SystemMap;

#[derive(Debug, Clone, PartialEq)]
pub struct SearchConfig {
    /// Requested grid spacing; the grid has `round(1 / grid_step)` points per axis.
    pub grid_step: f64,
    pub refine_rounds: usize,
    /// Points per axis of each refinement subgrid.
    pub refine_points: usize,
    /// Above `ln L` this large, a failure is reported without certification.
    pub log_lipschitz_cap: f64,
    pub newton_tol: f64,
    pub newton_max_iter: usize,
}

impl Default for SearchConfig {
    fn default() -> Self {
        Self {
            grid_step: 1.0 / 512.0,
            refine_rounds: 3,
            refine_points: 17,
            log_lipschitz_cap: 25.0,
            newton_tol: 1e-10,
            newton_max_iter: 40,
        }
    }
}

impl SearchConfig {
    pub fn with_grid_step(grid_step: f64) -> Self {
        Self {
            grid_step,
            ..Self::default()
        }
    }

    fn per_axis(&self) -> Result<usize> {
        if !(self.grid_step > 0.0 && self.grid_step <= 0.5) {
            return Err(Error::InvalidParameter(format!(
                "grid step must lie in (0, 1/2], got {}",
                self.grid_step
            )));
        }
        Ok((1.0 / self.grid_step).round() as usize)
    }
}

/// Target sequence and candidate family for one property.
struct Problem<'a> {
    property: Property,
    f: &'a SystemMap,
    method: &'a MethodSpec,
    horizon: usize,
    target: Vec<TorusPoint>,
    target_set: Vec<TorusPoint>,
}

impl<'a> Problem<'a> {
    fn new(
        property: Property,
        f: &'a SystemMap,
        method: &'a MethodSpec,
        x: &TorusPoint,
        horizon: usize,
    ) -> Result<Self> {
        let target = match property {
            Property::Direct => method.evaluate(x, horizon),
            _ => orbit_points(f, x, horizon),
        };
        if target.len() != 2 * horizon + 1 {
            return Err(Error::InvalidParameter(format!(
                "method returned {} points, expected {}",
                target.len(),
                2 * horizon + 1
            )));
        }
        let target_set = PointSet::new(target.clone())?.deduplicated().points().to_vec();
        Ok(Self {
            property,
            f,
            method,
            horizon,
            target,
            target_set,
        })
    }

    fn candidate_into(&self, y: &TorusPoint, buf: &mut Vec<TorusPoint>) {
        match self.property {
            Property::Direct => orbit_points_into(self.f, y, self.horizon, buf),
            _ => self.method.evaluate_into(y, self.horizon, buf),
        }
    }

    fn value(&self, y: &TorusPoint, buf: &mut Vec<TorusPoint>) -> f64 {
        self.candidate_into(y, buf);
        match self.property {
            Property::Direct | Property::Inverse => self
                .target
                .iter()
                .zip(buf.iter())
                .map(|(a, b)| dist_unchecked(a, b))
                .fold(0.0, f64::max),
            Property::Weak => one_sided_excess(buf, &self.target_set),
            Property::Orbital => one_sided_excess(buf, &self.target_set).max(one_sided_excess(&self.target_set, buf)),
        }
    }

    /// Lipschitz constant of `y -> D(y)`: that of `y -> candidate_k(y)` over `|k| <= N`.
    fn lipschitz(&self) -> Option<f64> {
        match self.property {
            Property::Direct => {
                let n = self.horizon as i64;
                Some((-n..=n).map(|k| self.f.iterate_lipschitz_bound(k)).fold(1.0, f64::max))
            }
            _ => self.method.lipschitz_bound(self.horizon),
        }
    }

    /// Initial point of a Newton-corrected orbit tracking the target.
    fn newton_seed(&self, config: &SearchConfig) -> Option<TorusPoint> {
        let map = match self.property {
            Property::Direct => self.f,
            _ => self.method.inducing_map()?,
        };
        newton_track(map, &self.target, config.newton_tol, config.newton_max_iter)
            .shadow()
            .map(|s| s.witness())
    }

    fn values(&self, points: &[TorusPoint]) -> Vec<f64> {
        points
            .par_iter()
            .map_init(Vec::new, |buf, y| self.value(y, buf))
            .collect()
    }
}

fn grid_points(dim: usize, n: usize) -> Vec<TorusPoint> {
    let step = 1.0 / n as f64;
    if dim == 1 {
        (0..n).map(|i| TorusPoint::circle(i as f64 * step)).collect()
    } else {
        (0..n * n)
            .map(|idx| TorusPoint::torus((idx / n) as f64 * step, (idx % n) as f64 * step))
            .collect()
    }
}

fn subgrid(center: &TorusPoint, half_width: f64, points: usize) -> Vec<TorusPoint> {
    let offset = |i: usize| -half_width + 2.0 * half_width * i as f64 / (points - 1) as f64;
    if center.dim() == 1 {
        (0..points).map(|i| center.translate([offset(i), 0.0])).collect()
    } else {
        (0..points * points)
            .map(|idx| center.translate([offset(idx / points), offset(idx % points)]))
            .collect()
    }
}

fn argmin(values: &[f64]) -> usize {
    values
        .iter()
        .enumerate()
        .fold(
            (0, f64::INFINITY),
            |best, (i, &v)| if v < best.1 { (i, v) } else { best },
        )
        .0
}

fn validate(f: &SystemMap, method: &MethodSpec, x: &TorusPoint, eps: f64, horizon: usize) -> Result<()> {
    if x.dim() != f.dim() {
        return Err(Error::DimensionMismatch {
            left: f.dim(),
            right: x.dim(),
        });
    }
    if let Some(g) = method.inducing_map() {
        if g.dim() != f.dim() {
            return Err(Error::DimensionMismatch {
                left: f.dim(),
                right: g.dim(),
            });
        }
    }
    if !(eps > 0.0 && eps.is_finite()) {
        return Err(Error::InvalidParameter(format!("eps must be positive, got {eps}")));
    }
    if horizon == 0 {
        return Err(Error::InvalidParameter("horizon N must be at least 1".into()));
    }
    Ok(())
}

/// `D(y)` for the given property: the tracking distance between the
/// property's target sequence at `x` and its candidate sequence at `y`.
pub fn tracking_distance(
    property: Property,
    f: &SystemMap,
    method: &MethodSpec,
    x: &TorusPoint,
    y: &TorusPoint,
    horizon: usize,
) -> Result<f64> {
    validate(f, method, x, 1.0, horizon)?;
    if y.dim() != f.dim() {
        return Err(Error::DimensionMismatch {
            left: f.dim(),
            right: y.dim(),
        });
    }
    let problem = Problem::new(property, f, method, x, horizon)?;
    Ok(problem.value(y, &mut Vec::new()))
}

pub fn check_property(
    property: Property,
    f: &SystemMap,
    method: &MethodSpec,
    x: &TorusPoint,
    eps: f64,
    horizon: usize,
    config: &SearchConfig,
) -> Result<ShadowVerdict> {
    validate(f, method, x, eps, horizon)?;
    let n = config.per_axis()?;
    let problem = Problem::new(property, f, method, x, horizon)?;
    let verdict = |outcome| ShadowVerdict {
        property,
        system: f.label().to_string(),
        method: method.label().to_string(),
        x: *x,
        eps,
        horizon,
        outcome,
    };
    let tracked = |witness, achieved, source| {
        verdict(Outcome::Tracked {
            witness,
            achieved,
            source,
        })
    };

    let mut buf = Vec::new();
    let at_anchor = problem.value(x, &mut buf);
    if at_anchor <= eps {
        return Ok(tracked(*x, at_anchor, WitnessSource::Anchor));
    }
    if let Some(seed) = problem.newton_seed(config) {
        let v = problem.value(&seed, &mut buf);
        if v <= eps {
            return Ok(tracked(seed, v, WitnessSource::Newton));
        }
    }

    let grid = grid_points(f.dim(), n);
    let values = problem.values(&grid);
    if let Some(i) = values.iter().position(|&v| v <= eps) {
        return Ok(tracked(grid[i], values[i], WitnessSource::Grid));
    }
    let best = argmin(&values);
    let min_over_grid = values[best];

    let mut center = grid[best];
    let mut half_width = 1.0 / n as f64;
    for _ in 0..config.refine_rounds {
        let pts = subgrid(&center, half_width, config.refine_points.max(2));
        let vals = problem.values(&pts);
        if let Some(i) = vals.iter().position(|&v| v <= eps) {
            return Ok(tracked(pts[i], vals[i], WitnessSource::Refinement));
        }
        center = pts[argmin(&vals)];
        half_width /= 8.0;
    }

    let covering_radius = (f.dim() as f64).sqrt() / (2.0 * n as f64);
    let lipschitz = problem.lipschitz();
    let outcome = match lipschitz {
        Some(l) if min_over_grid - l * covering_radius > eps => Outcome::Failed {
            min_over_grid,
            grid_step: 1.0 / n as f64,
            lipschitz_bound: Some(l),
            covering_radius,
            certified: true,
        },
        Some(l) if l.ln() <= config.log_lipschitz_cap => Outcome::Inconclusive {
            min_over_grid: Some(min_over_grid),
            reason: format!(
                "no tracking point found; grid minimum {min_over_grid:.6} minus L*r = {:.6} does not exceed eps",
                l * covering_radius
            ),
        },
        _ => Outcome::Failed {
            min_over_grid,
            grid_step: 1.0 / n as f64,
            lipschitz_bound: lipschitz,
            covering_radius,
            certified: false,
        },
    };
    Ok(verdict(outcome))
}

pub fn check_shadowing(
    f: &SystemMap,
    method: &MethodSpec,
    x: &TorusPoint,
    eps: f64,
    horizon: usize,
    grid_step: f64,
) -> Result<ShadowVerdict> {
    check_property(
        Property::Direct,
        f,
        method,
        x,
        eps,
        horizon,
        &SearchConfig::with_grid_step(grid_step),
    )
}

pub fn check_inverse_shadowing(
    f: &SystemMap,
    method: &MethodSpec,
    x: &TorusPoint,
    eps: f64,
    horizon: usize,
    grid_step: f64,
) -> Result<ShadowVerdict> {
    check_property(
        Property::Inverse,
        f,
        method,
        x,
        eps,
        horizon,
        &SearchConfig::with_grid_step(grid_step),
    )
}

pub fn check_weak_inverse(
    f: &SystemMap,
    method: &MethodSpec,
    x: &TorusPoint,
    eps: f64,
    horizon: usize,
    grid_step: f64,
) -> Result<ShadowVerdict> {
    check_property(
        Property::Weak,
        f,
        method,
        x,
        eps,
        horizon,
        &SearchConfig::with_grid_step(grid_step),
    )
}

pub fn check_orbital_inverse(
    f: &SystemMap,
    method: &MethodSpec,
    x: &TorusPoint,
    eps: f64,
    horizon: usize,
    grid_step: f64,
) -> Result<ShadowVerdict> {
    check_property(
        Property::Orbital,
        f,
        method,
        x,
        eps,
        horizon,
        &SearchConfig::with_grid_step(grid_step),
    )
}
