//! Drift experiments: a neutral direction lets a constant translation
//! accumulate, so no method orbit stays near the true orbit for long.

use std::time::Instant;

use serde::Deserialize;

use super::{judge, Expect, ExpectationTable, ExperimentReport, OrbitDump, Record, RunOptions, SystemDescriptor};
use crate::error::{Error, Result};
use crate::geometry::{wrap, TorusPoint};
use crate::orbits::{method_from_map, orbit_points, MethodSpec};
use crate::shadowing::{check_property, Property, SearchConfig, ShadowVerdict};
use crate::systems::{make_linear, make_rotation, make_translation_method_map, SystemMap};

/// `min_c max_{|k| <= N} |c + k delta| = N delta`, attained at `c = 0`.
pub fn drift_lower_bound(delta: f64, horizon: usize) -> f64 {
    horizon as f64 * delta.abs()
}

#[derive(Debug, Clone, Deserialize)]
struct Defaults {
    #[serde(default)]
    theta: Option<f64>,
    delta: f64,
    eps: f64,
    #[serde(rename = "N")]
    horizon: usize,
    grid: usize,
}

#[derive(Debug, Clone, Deserialize)]
struct Control {
    id: String,
    base: String,
    delta: f64,
    expect: Expect,
}

#[derive(Debug, Clone, Deserialize)]
struct DriftEntry {
    property: Property,
    defaults: Defaults,
    eps_convention: String,
    expect: Expect,
    #[serde(default)]
    controls: Vec<Control>,
}

#[derive(Debug, Clone, Deserialize)]
struct RotationExpect {
    inverse: Expect,
    orbital: Expect,
}

#[derive(Debug, Clone, Deserialize)]
struct RotationEntry {
    defaults: Defaults,
    eps_convention: String,
    expect: RotationExpect,
}

/// Parameters of the shear drift experiments; `eps1` is the tracking tolerance.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct DriftParams {
    pub delta: f64,
    pub eps1: f64,
    pub horizon: usize,
    /// Grid points per axis.
    pub grid: usize,
}

impl DriftParams {
    /// Table defaults for `prop33`, `prop34` or `prop35`.
    pub fn defaults(name: &str) -> Result<Self> {
        let e: DriftEntry = ExpectationTable::shipped().entry(name)?;
        Ok(Self {
            delta: e.defaults.delta,
            eps1: e.defaults.eps,
            horizon: e.defaults.horizon,
            grid: e.defaults.grid,
        })
    }

    fn validate(&self) -> Result<()> {
        if !(self.eps1 > 0.0 && self.eps1.is_finite()) {
            return Err(Error::InvalidParameter(format!(
                "eps1 must be positive, got {}",
                self.eps1
            )));
        }
        if !(self.delta >= 0.0 && self.delta < self.eps1) {
            return Err(Error::InvalidParameter(format!(
                "need 0 <= delta < eps1, got delta = {}, eps1 = {}",
                self.delta, self.eps1
            )));
        }
        check_horizon_grid(self.horizon, self.grid)
    }
}

fn check_horizon_grid(horizon: usize, grid: usize) -> Result<()> {
    if horizon == 0 {
        return Err(Error::InvalidParameter("horizon N must be at least 1".into()));
    }
    if grid < 2 {
        return Err(Error::InvalidParameter(format!(
            "grid needs at least 2 points per axis, got {grid}"
        )));
    }
    Ok(())
}

fn descriptor(role: &str, map: &SystemMap) -> SystemDescriptor {
    SystemDescriptor {
        role: role.to_string(),
        label: map.label().to_string(),
        spec: map.spec().clone(),
    }
}

fn dumps_for(id: &str, f: &SystemMap, method: &MethodSpec, v: &ShadowVerdict) -> Vec<OrbitDump> {
    let mut out = vec![OrbitDump {
        name: format!("{id}-target"),
        points: orbit_points(f, &v.x, v.horizon),
    }];
    if let Some(y) = v.witness() {
        out.push(OrbitDump {
            name: format!("{id}-witness"),
            points: method.evaluate(&y, v.horizon),
        });
    }
    out
}

fn elapsed(report: &mut ExperimentReport, options: &RunOptions, key: &str, start: Instant) {
    if options.timings {
        report
            .timings
            .get_or_insert_with(Default::default)
            .insert(key.to_string(), start.elapsed().as_secs_f64());
    }
}

/// Shear base `f(x, y) = (x, x + y)` with the method induced by
/// `h = T_delta o f`; checks the experiment's property at `x = (0, 0)`.
pub fn run_drift(name: &str, params: &DriftParams, options: &RunOptions) -> Result<ExperimentReport> {
    let entry: DriftEntry = ExpectationTable::shipped().entry(name)?;
    params.validate()?;
    let start = Instant::now();
    let mut report = ExperimentReport::new(name, entry.eps_convention.clone(), options.seed);
    report.param("property", entry.property);
    report.param("delta", params.delta);
    report.param("eps1", params.eps1);
    report.param("N", params.horizon);
    report.param("grid", params.grid);
    report.param("x", TorusPoint::torus(0.0, 0.0));
    report.param("drift_bound", drift_lower_bound(params.delta, params.horizon));

    let config = SearchConfig::with_grid_step(1.0 / params.grid as f64);
    let x = TorusPoint::torus(0.0, 0.0);
    let f = make_linear([[1, 0], [1, 1]])?;
    let h = make_translation_method_map(&f, params.delta)?;
    let method = method_from_map(&f, &h)?;
    report.systems.push(descriptor("base", &f));
    report.systems.push(descriptor("method", &h));

    let v = check_property(entry.property, &f, &method, &x, params.eps1, params.horizon, &config)?;
    if let Some(m) = v.min_over_grid() {
        report.notes.push(format!(
            "grid minimum {m:.6} against drift bound {:.6}",
            drift_lower_bound(params.delta, params.horizon)
        ));
    }
    report
        .orbit_dumps
        .extend(dumps_for(entry.property.name(), &f, &method, &v));
    let id = entry.property.name().to_string();
    report
        .verdicts
        .push(judge(id, entry.expect, Record::Shadow(v), Some(params.delta)));

    for control in &entry.controls {
        let base = match control.base.as_str() {
            "cat" => make_linear([[2, 1], [1, 1]])?,
            "shear" => make_linear([[1, 0], [1, 1]])?,
            other => {
                return Err(Error::Parse {
                    what: "expectation table",
                    detail: format!("unknown control base '{other}'"),
                })
            }
        };
        let h = make_translation_method_map(&base, control.delta)?;
        let method = method_from_map(&base, &h)?;
        report.systems.push(descriptor(&format!("{}-base", control.id), &base));
        report.systems.push(descriptor(&format!("{}-method", control.id), &h));
        let v = check_property(entry.property, &base, &method, &x, params.eps1, params.horizon, &config)?;
        report.orbit_dumps.extend(dumps_for(&control.id, &base, &method, &v));
        report.verdicts.push(judge(
            control.id.clone(),
            control.expect,
            Record::Shadow(v),
            Some(control.delta),
        ));
    }
    elapsed(&mut report, options, "total_seconds", start);
    Ok(report.finish())
}

/// Inverse shadowing with the shear drift mechanism.
pub fn prop33_neutral_drift(delta: f64, eps1: f64, horizon: usize) -> Result<ExperimentReport> {
    let p = DriftParams {
        delta,
        eps1,
        horizon,
        ..DriftParams::defaults("prop33")?
    };
    run_drift("prop33", &p, &RunOptions::default())
}

/// Weak inverse shadowing with the shear drift mechanism.
pub fn prop34_weak_drift(delta: f64, eps1: f64, horizon: usize) -> Result<ExperimentReport> {
    let p = DriftParams {
        delta,
        eps1,
        horizon,
        ..DriftParams::defaults("prop34")?
    };
    run_drift("prop34", &p, &RunOptions::default())
}

/// Orbital inverse shadowing with the shear drift mechanism, plus a
/// hyperbolic control on the cat map.
pub fn prop35_orbital_drift(delta: f64, eps1: f64, horizon: usize) -> Result<ExperimentReport> {
    let p = DriftParams {
        delta,
        eps1,
        horizon,
        ..DriftParams::defaults("prop35")?
    };
    run_drift("prop35", &p, &RunOptions::default())
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct RotationParams {
    pub theta: f64,
    pub delta: f64,
    pub eps: f64,
    pub horizon: usize,
    pub grid: usize,
}

impl RotationParams {
    pub fn defaults() -> Result<Self> {
        let e: RotationEntry = ExpectationTable::shipped().entry("rotation-dichotomy")?;
        Ok(Self {
            theta: e.defaults.theta.unwrap_or((5f64.sqrt() - 1.0) / 2.0),
            delta: e.defaults.delta,
            eps: e.defaults.eps,
            horizon: e.defaults.horizon,
            grid: e.defaults.grid,
        })
    }

    fn validate(&self) -> Result<()> {
        if !(self.eps > 0.0 && self.eps.is_finite()) {
            return Err(Error::InvalidParameter(format!(
                "eps must be positive, got {}",
                self.eps
            )));
        }
        if !(self.delta >= 0.0 && self.delta < self.eps) {
            return Err(Error::InvalidParameter(format!(
                "need 0 <= delta < eps, got delta = {}, eps = {}",
                self.delta, self.eps
            )));
        }
        check_horizon_grid(self.horizon, self.grid)?;
        if let Some(q) = (1..=self.horizon).find(|&q| wrap(q as f64 * self.theta).abs() <= 1e-9) {
            return Err(Error::InvalidParameter(format!(
                "theta = {} has period {q} <= N = {}",
                self.theta, self.horizon
            )));
        }
        Ok(())
    }
}

/// Rotation by `theta` against the method induced by rotation by
/// `theta + delta`: inverse shadowing fails by drift while the orbital
/// inclusions hold at `y = x`.
pub fn run_rotation(params: &RotationParams, options: &RunOptions) -> Result<ExperimentReport> {
    let entry: RotationEntry = ExpectationTable::shipped().entry("rotation-dichotomy")?;
    params.validate()?;
    let start = Instant::now();
    let mut report = ExperimentReport::new("rotation-dichotomy", entry.eps_convention.clone(), options.seed);
    report.param("theta", params.theta);
    report.param("delta", params.delta);
    report.param("eps", params.eps);
    report.param("N", params.horizon);
    report.param("grid", params.grid);
    report.param("x", TorusPoint::circle(0.0));
    report.param("drift_bound", drift_lower_bound(params.delta, params.horizon));

    let config = SearchConfig::with_grid_step(1.0 / params.grid as f64);
    let x = TorusPoint::circle(0.0);
    let f = make_rotation(params.theta)?;
    let g = make_rotation(params.theta + params.delta)?;
    let method = method_from_map(&f, &g)?;
    report.systems.push(descriptor("base", &f));
    report.systems.push(descriptor("method", &g));

    for (property, expect) in [
        (Property::Inverse, entry.expect.inverse),
        (Property::Orbital, entry.expect.orbital),
    ] {
        let v = check_property(property, &f, &method, &x, params.eps, params.horizon, &config)?;
        report.orbit_dumps.extend(dumps_for(property.name(), &f, &method, &v));
        report
            .verdicts
            .push(judge(property.name(), expect, Record::Shadow(v), Some(params.delta)));
    }
    elapsed(&mut report, options, "total_seconds", start);
    Ok(report.finish())
}

pub fn rotation_dichotomy(theta: f64, delta: f64, eps: f64, horizon: usize) -> Result<ExperimentReport> {
    let p = RotationParams {
        theta,
        delta,
        eps,
        horizon,
        ..RotationParams::defaults()?
    };
    run_rotation(&p, &RunOptions::default())
}
