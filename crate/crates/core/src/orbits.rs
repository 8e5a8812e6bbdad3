//! Orbit segments, delta-pseudo-orbits and delta-methods.
//!
//! Bi-infinite sequences are truncated to indices `-N..=N`; index `k` of a
//! segment is stored at position `k + N`.

use std::fmt;
use std::io::Write;
use std::sync::Arc;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use crate::error::{Error, Result};
use crate::geometry::{dist_unchecked, TorusPoint};
use crate::systems::{c1_components, SystemMap};

/// Samples per axis used when measuring `d_1(f, g)` for an induced method.
pub const METHOD_SAMPLES: usize = 128;

/// Added to the measured `d_1` lower bound to obtain an induced method's delta.
pub const METHOD_DELTA_MARGIN: f64 = 1e-9;

/// A finite two-sided sequence `x_{-N}, ..., x_N` whose consecutive gaps
/// `d(f(x_i), x_{i+1})` were checked to be `< delta_bound` for some map `f`.
#[derive(Debug, Clone, PartialEq)]
pub struct PseudoOrbit {
    points: Vec<TorusPoint>,
    horizon: usize,
    delta_bound: f64,
}

impl PseudoOrbit {
    /// Checks the gaps against `f` and wraps the sequence.
    pub fn new(f: &SystemMap, points: Vec<TorusPoint>, delta: f64) -> Result<Self> {
        if points.len() < 3 || points.len().is_multiple_of(2) {
            return Err(Error::InvalidParameter(format!(
                "pseudo-orbit needs 2N+1 points with N >= 1, got {}",
                points.len()
            )));
        }
        for p in &points {
            if p.dim() != f.dim() {
                return Err(Error::DimensionMismatch {
                    left: f.dim(),
                    right: p.dim(),
                });
            }
        }
        let horizon = points.len() / 2;
        if let Some((i, gap)) = first_violation(f, &points, delta) {
            return Err(Error::NotPseudoOrbit {
                index: i as i64 - horizon as i64,
                gap,
                delta,
            });
        }
        Ok(Self {
            points,
            horizon,
            delta_bound: delta,
        })
    }

    pub fn points(&self) -> &[TorusPoint] {
        &self.points
    }

    pub fn horizon(&self) -> usize {
        self.horizon
    }

    pub fn delta_bound(&self) -> f64 {
        self.delta_bound
    }

    pub fn dim(&self) -> usize {
        self.points[0].dim()
    }

    /// Entry at index `k`, `-N <= k <= N`.
    pub fn at(&self, k: i64) -> TorusPoint {
        self.points[(k + self.horizon as i64) as usize]
    }

    pub fn anchor(&self) -> TorusPoint {
        self.at(0)
    }

    pub fn into_points(self) -> Vec<TorusPoint> {
        self.points
    }
}

fn first_violation(f: &SystemMap, seq: &[TorusPoint], delta: f64) -> Option<(usize, f64)> {
    seq.windows(2).enumerate().find_map(|(i, w)| {
        let gap = dist_unchecked(&f.forward(&w[0]), &w[1]);
        (gap >= delta).then_some((i, gap))
    })
}

/// Largest consecutive gap `max_i d(f(x_i), x_{i+1})`.
pub fn max_gap(f: &SystemMap, seq: &[TorusPoint]) -> f64 {
    seq.windows(2)
        .map(|w| dist_unchecked(&f.forward(&w[0]), &w[1]))
        .fold(0.0, f64::max)
}

/// Whether every gap `d(f(x_i), x_{i+1})` is strictly below `delta`.
/// Sequences shorter than two points are vacuously valid.
pub fn validate_pseudo_orbit(f: &SystemMap, seq: &[TorusPoint], delta: f64) -> bool {
    first_violation(f, seq, delta).is_none()
}

/// The true orbit points `f^k(x)`, `-N <= k <= N`.
pub fn orbit_points(f: &SystemMap, x: &TorusPoint, horizon: usize) -> Vec<TorusPoint> {
    let mut out = Vec::with_capacity(2 * horizon + 1);
    orbit_points_into(f, x, horizon, &mut out);
    out
}

pub(crate) fn orbit_points_into(f: &SystemMap, x: &TorusPoint, horizon: usize, out: &mut Vec<TorusPoint>) {
    out.clear();
    out.resize(2 * horizon + 1, *x);
    for i in (0..horizon).rev() {
        out[i] = f.backward(&out[i + 1]);
    }
    for i in horizon..2 * horizon {
        out[i + 1] = f.forward(&out[i]);
    }
}

/// `f^k(x)` for `-N <= k <= N` as a pseudo-orbit. The recorded bound is the
/// round-off gap plus a tiny margin; true orbits are 0-pseudo-orbits.
pub fn orbit_segment(f: &SystemMap, x: &TorusPoint, horizon: usize) -> Result<PseudoOrbit> {
    if horizon == 0 {
        return Err(Error::InvalidParameter("horizon must be at least 1".into()));
    }
    if x.dim() != f.dim() {
        return Err(Error::DimensionMismatch {
            left: f.dim(),
            right: x.dim(),
        });
    }
    let points = orbit_points(f, x, horizon);
    let delta = max_gap(f, &points) + 1e-12;
    PseudoOrbit::new(f, points, delta)
}

/// Writes `k,coord_0[,coord_1]` rows, `k` ascending from `-N` to `N`.
pub fn write_orbit_csv<W: Write>(points: &[TorusPoint], writer: W) -> Result<()> {
    let horizon = points.len() as i64 / 2;
    let dim = points.first().map_or(1, TorusPoint::dim);
    let mut w = csv::Writer::from_writer(writer);
    if dim == 1 {
        w.write_record(["k", "coord_0"])?;
    } else {
        w.write_record(["k", "coord_0", "coord_1"])?;
    }
    for (i, p) in points.iter().enumerate() {
        let mut row = vec![(i as i64 - horizon).to_string()];
        row.extend(p.coords().iter().map(|c| c.to_string()));
        w.write_record(&row)?;
    }
    w.flush()?;
    Ok(())
}

/// A callable producing the segment `phi(x)_{-N..=N}` for a point `x`.
pub type RawMethodFn = dyn Fn(&TorusPoint, usize) -> Vec<TorusPoint> + Send + Sync;

#[derive(Clone)]
pub enum MethodKind {
    /// `phi_g(x) = {g^n(x)}`: the method induced by a map `g` C1-close to `f`.
    Induced(SystemMap),
    /// An arbitrary delta-method, used to exercise validators.
    Raw(Arc<RawMethodFn>),
}

impl fmt::Debug for MethodKind {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            MethodKind::Induced(g) => write!(f, "Induced({})", g.label()),
            MethodKind::Raw(_) => f.write_str("Raw(..)"),
        }
    }
}

/// A delta-method for a map `f`.
#[derive(Debug, Clone)]
pub struct MethodSpec {
    kind: MethodKind,
    delta: f64,
    label: String,
}

impl MethodSpec {
    pub fn raw(label: impl Into<String>, delta: f64, method: Arc<RawMethodFn>) -> Self {
        Self {
            kind: MethodKind::Raw(method),
            delta,
            label: label.into(),
        }
    }

    pub fn kind(&self) -> &MethodKind {
        &self.kind
    }

    pub fn delta(&self) -> f64 {
        self.delta
    }

    pub fn label(&self) -> &str {
        &self.label
    }

    /// The inducing map, for induced methods.
    pub fn inducing_map(&self) -> Option<&SystemMap> {
        match &self.kind {
            MethodKind::Induced(g) => Some(g),
            MethodKind::Raw(_) => None,
        }
    }

    pub fn evaluate(&self, x: &TorusPoint, horizon: usize) -> Vec<TorusPoint> {
        let mut out = Vec::with_capacity(2 * horizon + 1);
        self.evaluate_into(x, horizon, &mut out);
        out
    }

    pub(crate) fn evaluate_into(&self, x: &TorusPoint, horizon: usize, out: &mut Vec<TorusPoint>) {
        match &self.kind {
            MethodKind::Induced(g) => orbit_points_into(g, x, horizon, out),
            MethodKind::Raw(m) => {
                *out = m(x, horizon);
            }
        }
    }

    /// Upper bound on the Lipschitz constant of `y -> phi(y)_k` over
    /// `|k| <= N`; unknown for raw methods.
    pub fn lipschitz_bound(&self, horizon: usize) -> Option<f64> {
        match &self.kind {
            MethodKind::Induced(g) => Some(
                (-(horizon as i64)..=horizon as i64)
                    .map(|k| g.iterate_lipschitz_bound(k))
                    .fold(1.0, f64::max),
            ),
            MethodKind::Raw(_) => None,
        }
    }

    /// Raw-kind contract at `x`: `phi(x)_0 = x` and `phi(x)` is a
    /// `delta`-pseudo-orbit of `f`.
    pub fn satisfies_contract(&self, f: &SystemMap, x: &TorusPoint, horizon: usize) -> bool {
        let seq = self.evaluate(x, horizon);
        seq.len() == 2 * horizon + 1 && seq[horizon] == *x && validate_pseudo_orbit(f, &seq, self.delta)
    }
}

/// The method induced by `g`, with `delta` the sampled `d_1(f, g)` plus
/// [`METHOD_DELTA_MARGIN`].
pub fn method_from_map(f: &SystemMap, g: &SystemMap) -> Result<MethodSpec> {
    if f.dim() != g.dim() {
        return Err(Error::DimensionMismatch {
            left: f.dim(),
            right: g.dim(),
        });
    }
    let (c0, c1) = c1_components(f, g, METHOD_SAMPLES);
    Ok(MethodSpec {
        kind: MethodKind::Induced(g.clone()),
        delta: c0.max(c1) + METHOD_DELTA_MARGIN,
        label: g.label().to_string(),
    })
}

fn point_seed(seed: u64, x: &TorusPoint) -> u64 {
    // splitmix64 over the coordinate bits
    let mut h = seed ^ 0x9E37_79B9_7F4A_7C15;
    for c in x.coords() {
        h ^= c.to_bits();
        h = h.wrapping_add(0x9E37_79B9_7F4A_7C15);
        h = (h ^ (h >> 30)).wrapping_mul(0xBF58_476D_1CE4_E5B9);
        h = (h ^ (h >> 27)).wrapping_mul(0x94D0_49BB_1331_11EB);
        h ^= h >> 31;
    }
    h
}

fn random_offset(rng: &mut ChaCha8Rng, radius: f64, dim: usize) -> [f64; 2] {
    if dim == 1 {
        [rng.random_range(-radius..radius), 0.0]
    } else {
        let r = radius * rng.random::<f64>().sqrt();
        let t = rng.random::<f64>() * std::f64::consts::TAU;
        [r * t.cos(), r * t.sin()]
    }
}

/// A raw delta-method: each step of the true orbit is displaced by an
/// independent offset of norm `< delta`. Deterministic in `(seed, x)`.
pub fn random_method(f: &SystemMap, delta: f64, seed: u64) -> Result<MethodSpec> {
    if delta.is_nan() || delta <= 0.0 {
        return Err(Error::InvalidParameter(format!(
            "method delta must be positive, got {delta}"
        )));
    }
    let map = f.clone();
    let dim = f.dim();
    // stay strictly inside the open delta-ball despite round-off
    let radius = delta * 0.999;
    let method = move |x: &TorusPoint, horizon: usize| {
        let mut rng = ChaCha8Rng::seed_from_u64(point_seed(seed, x));
        let mut out = vec![*x; 2 * horizon + 1];
        for i in horizon..2 * horizon {
            out[i + 1] = map.forward(&out[i]).translate(random_offset(&mut rng, radius, dim));
        }
        for i in (0..horizon).rev() {
            out[i] = map.backward(&out[i + 1].translate(random_offset(&mut rng, radius, dim)));
        }
        out
    };
    Ok(MethodSpec::raw(
        format!("random({}, {delta}, seed={seed})", f.label()),
        delta,
        Arc::new(method),
    ))
}
