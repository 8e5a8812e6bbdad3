//! System × property matrix: the Anosov example against nonhyperbolic ones,
//! plus a seeded sweep of conservative perturbations of the cat map.

use std::collections::BTreeMap;
use std::time::Instant;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

use super::{judge, Expect, ExpectationTable, ExperimentReport, Record, RunOptions, SystemDescriptor};
use crate::error::{Error, Result};
use crate::geometry::TorusPoint;
use crate::hyperbolicity::anosov_certificate_linear;
use crate::linalg::IntMatrix;
use crate::orbits::method_from_map;
use crate::shadowing::{check_property, Property, SearchConfig};
use crate::systems::{make_seeded_perturbation, MapSpec, PerturbationMode, ShearAxis, SystemMap};

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct GallerySystem {
    /// Row name; also the key into the expectation table.
    pub name: String,
    pub system: MapSpec,
    /// Map inducing the method.
    pub method: MapSpec,
    /// Row expectations overriding the table.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub expect: Option<BTreeMap<String, Expect>>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct SweepConfig {
    pub delta: f64,
    pub eps: f64,
    #[serde(rename = "N")]
    pub horizon: usize,
    pub count: usize,
    pub expect: Expect,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct GalleryConfig {
    pub systems: Vec<GallerySystem>,
    pub eps: f64,
    #[serde(rename = "N")]
    pub horizon: usize,
    /// Grid points per axis.
    pub grid: usize,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub sweep: Option<SweepConfig>,
}

#[derive(Debug, Clone, Deserialize)]
struct GalleryEntry {
    defaults: GalleryDefaults,
    eps_convention: String,
    rows: BTreeMap<String, BTreeMap<String, Expect>>,
    perturbation_sweep: SweepConfig,
}

#[derive(Debug, Clone, Deserialize)]
struct GalleryDefaults {
    eps: f64,
    #[serde(rename = "N")]
    horizon: usize,
    grid: usize,
}

fn entry() -> Result<GalleryEntry> {
    ExpectationTable::shipped().entry("theorem-gallery")
}

impl GalleryConfig {
    /// Cat, shear and golden rotation, each against a method at distance
    /// about 0.01 or less, plus the table's perturbation sweep.
    pub fn from_table() -> Result<Self> {
        let e = entry()?;
        let theta = (5f64.sqrt() - 1.0) / 2.0;
        let cat = MapSpec::cat();
        let shear = MapSpec::shear();
        Ok(Self {
            systems: vec![
                GallerySystem {
                    name: "cat".into(),
                    system: cat.clone(),
                    method: MapSpec::Perturbed {
                        base: Box::new(cat),
                        delta: 1e-3,
                        mode: PerturbationMode::ShearSin,
                        phase: 0.25,
                        axis: ShearAxis::X,
                    },
                    expect: None,
                },
                GallerySystem {
                    name: "shear".into(),
                    system: shear.clone(),
                    method: MapSpec::TranslationMethod {
                        base: Box::new(shear),
                        delta: 0.01,
                    },
                    expect: None,
                },
                GallerySystem {
                    name: "rotation".into(),
                    system: MapSpec::rotation(theta),
                    method: MapSpec::rotation(theta + 0.01),
                    expect: None,
                },
            ],
            eps: e.defaults.eps,
            horizon: e.defaults.horizon,
            grid: e.defaults.grid,
            sweep: Some(e.perturbation_sweep),
        })
    }
}

const PROPERTIES: [Property; 3] = [Property::Inverse, Property::Weak, Property::Orbital];

pub fn theorem_gallery(config: &GalleryConfig, options: &RunOptions) -> Result<ExperimentReport> {
    let table = entry()?;
    if config.eps.is_nan() || config.eps <= 0.0 || config.horizon == 0 || config.grid < 2 {
        return Err(Error::InvalidParameter(
            "gallery needs eps > 0, N >= 1 and grid >= 2".into(),
        ));
    }
    let start = Instant::now();
    let mut report = ExperimentReport::new("theorem-gallery", table.eps_convention.clone(), options.seed);
    report.param("eps", config.eps);
    report.param("N", config.horizon);
    report.param("grid", config.grid);
    report.param("x", TorusPoint::torus(0.0, 0.0));
    if let Some(s) = &config.sweep {
        report.param("sweep", s);
    }
    let search = SearchConfig::with_grid_step(1.0 / config.grid as f64);

    for row in &config.systems {
        let expect = match &row.expect {
            Some(e) => e.clone(),
            None => table.rows.get(&row.name).cloned().ok_or_else(|| {
                Error::InvalidParameter(format!("no expectation row for gallery system '{}'", row.name))
            })?,
        };
        let f = SystemMap::from_spec(row.system.clone())?;
        let g = SystemMap::from_spec(row.method.clone())?;
        let method = method_from_map(&f, &g)?;
        report.systems.push(SystemDescriptor {
            role: format!("{}-base", row.name),
            label: f.label().to_string(),
            spec: row.system.clone(),
        });
        report.systems.push(SystemDescriptor {
            role: format!("{}-method", row.name),
            label: g.label().to_string(),
            spec: row.method.clone(),
        });
        let x = TorusPoint::origin(f.dim());
        let mut cells = BTreeMap::new();
        for property in PROPERTIES {
            let Some(&want) = expect.get(property.name()) else {
                continue;
            };
            let v = check_property(property, &f, &method, &x, config.eps, config.horizon, &search)?;
            let e = judge(
                format!("{}/{}", row.name, property),
                want,
                Record::Shadow(v),
                Some(method.delta()),
            );
            cells.insert(property.name().to_string(), e.observed.clone());
            report.verdicts.push(e);
        }
        if let (Some(&want), Some(a)) = (expect.get("anosov"), f.linear_model()) {
            let e = judge(
                format!("{}/anosov", row.name),
                want,
                Record::Anosov(anosov_certificate_linear(a)),
                None,
            );
            cells.insert("anosov".to_string(), e.observed.clone());
            report.verdicts.push(e);
        }
        report.matrix.insert(row.name.clone(), cells);
    }

    if let Some(sweep) = &config.sweep {
        let cat = SystemMap::from_spec(MapSpec::linear(IntMatrix::CAT))?;
        let mut rng = ChaCha8Rng::seed_from_u64(options.seed);
        let sweep_search = SearchConfig::with_grid_step(1.0 / config.grid as f64);
        for i in 0..sweep.count {
            let x = TorusPoint::torus(rng.random(), rng.random());
            let g = make_seeded_perturbation(&cat, sweep.delta, options.seed.wrapping_add(i as u64 + 1))?;
            let method = method_from_map(&cat, &g)?;
            report.systems.push(SystemDescriptor {
                role: format!("sweep-{i}"),
                label: g.label().to_string(),
                spec: g.spec().clone(),
            });
            let v = check_property(
                Property::Inverse,
                &cat,
                &method,
                &x,
                sweep.eps,
                sweep.horizon,
                &sweep_search,
            )?;
            report.verdicts.push(judge(
                format!("sweep-{i}/inverse"),
                sweep.expect,
                Record::Shadow(v),
                None,
            ));
        }
    }
    if options.timings {
        report
            .timings
            .get_or_insert_with(Default::default)
            .insert("total_seconds".into(), start.elapsed().as_secs_f64());
    }
    Ok(report.finish())
}
