//! Finite-horizon checkers for direct shadowing and the three inverse
//! shadowing properties, plus the two tracking solvers they use as seeds.

use std::fmt;

use serde::{Deserialize, Serialize};

use crate::geometry::TorusPoint;

mod linear;
mod newton;
mod search;

pub use linear::{shadow_solve_linear, shadowing_constant, LinearShadow};
pub use newton::{shadow_solve_newton, NewtonOutcome, NewtonShadow};
pub use search::{
    check_inverse_shadowing, check_orbital_inverse, check_property, check_shadowing, check_weak_inverse,
    tracking_distance, SearchConfig,
};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Property {
    /// Some true orbit tracks the method's pseudo-orbit through `x`, index by index.
    Direct,
    /// Some method orbit tracks the true orbit of `x`, index by index.
    Inverse,
    /// Some method orbit lies in the closed eps-neighbourhood of the orbit of `x`.
    Weak,
    /// Both one-sided inclusions between the orbit of `x` and a method orbit.
    Orbital,
}

impl Property {
    pub const ALL: [Property; 4] = [Property::Direct, Property::Inverse, Property::Weak, Property::Orbital];

    pub fn name(&self) -> &'static str {
        match self {
            Property::Direct => "direct",
            Property::Inverse => "inverse",
            Property::Weak => "weak",
            Property::Orbital => "orbital",
        }
    }
}

impl fmt::Display for Property {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

impl std::str::FromStr for Property {
    type Err = crate::Error;

    fn from_str(s: &str) -> crate::Result<Self> {
        Property::ALL
            .into_iter()
            .find(|p| p.name() == s)
            .ok_or_else(|| crate::Error::Parse {
                what: "property",
                detail: format!("unknown property '{s}' (expected direct, inverse, weak or orbital)"),
            })
    }
}

/// Where a tracking witness came from.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum WitnessSource {
    /// The anchor point `x` itself.
    Anchor,
    /// Initial point of a sequence-space Newton solution.
    Newton,
    /// A point of the search grid.
    Grid,
    /// A point of the local refinement around the best grid cell.
    Refinement,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "outcome", rename_all = "kebab-case")]
pub enum Outcome {
    Tracked {
        witness: TorusPoint,
        achieved: f64,
        source: WitnessSource,
    },
    /// No grid point tracks. With `certified`, every point of the phase space
    /// misses by the Lipschitz covering argument:
    /// `min_over_grid - lipschitz_bound * covering_radius > eps`.
    Failed {
        min_over_grid: f64,
        grid_step: f64,
        #[serde(skip_serializing_if = "Option::is_none")]
        lipschitz_bound: Option<f64>,
        covering_radius: f64,
        certified: bool,
    },
    Inconclusive {
        #[serde(skip_serializing_if = "Option::is_none")]
        min_over_grid: Option<f64>,
        reason: String,
    },
}

/// Result of a tracking search at a fixed horizon and tolerance.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ShadowVerdict {
    pub property: Property,
    pub system: String,
    pub method: String,
    pub x: TorusPoint,
    pub eps: f64,
    #[serde(rename = "N")]
    pub horizon: usize,
    #[serde(flatten)]
    pub outcome: Outcome,
}

impl ShadowVerdict {
    pub fn is_tracked(&self) -> bool {
        matches!(self.outcome, Outcome::Tracked { .. })
    }

    pub fn is_certified_failure(&self) -> bool {
        matches!(self.outcome, Outcome::Failed { certified: true, .. })
    }

    pub fn is_failure(&self) -> bool {
        matches!(self.outcome, Outcome::Failed { .. })
    }

    pub fn witness(&self) -> Option<TorusPoint> {
        match self.outcome {
            Outcome::Tracked { witness, .. } => Some(witness),
            _ => None,
        }
    }

    pub fn achieved(&self) -> Option<f64> {
        match self.outcome {
            Outcome::Tracked { achieved, .. } => Some(achieved),
            _ => None,
        }
    }

    pub fn min_over_grid(&self) -> Option<f64> {
        match self.outcome {
            Outcome::Failed { min_over_grid, .. } => Some(min_over_grid),
            Outcome::Inconclusive { min_over_grid, .. } => min_over_grid,
            Outcome::Tracked { .. } => None,
        }
    }

    /// Short outcome tag: `tracked`, `certified-failure`, `failure` or `inconclusive`.
    pub fn outcome_tag(&self) -> &'static str {
        match self.outcome {
            Outcome::Tracked { .. } => "tracked",
            Outcome::Failed { certified: true, .. } => "certified-failure",
            Outcome::Failed { certified: false, .. } => "failure",
            Outcome::Inconclusive { .. } => "inconclusive",
        }
    }
}
