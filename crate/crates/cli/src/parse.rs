//! Short-form parsers for systems, methods and points.

use std::fs;

use anyhow::{anyhow, bail, Context, Result};
use shadowlab::geometry::TorusPoint;
use shadowlab::orbits::{method_from_map, random_method, MethodSpec};
use shadowlab::systems::{
    make_conservative_perturbation, make_linear, make_rotation, make_seeded_perturbation, make_translation_method_map,
    MapSpec, PerturbationMode, SystemMap,
};

fn number(s: &str, what: &str) -> Result<f64> {
    s.trim()
        .parse::<f64>()
        .ok()
        .filter(|v| v.is_finite())
        .ok_or_else(|| anyhow!("invalid {what} '{s}'"))
}

fn json_spec(s: &str) -> Result<MapSpec> {
    let text = match s.strip_prefix('@') {
        Some(path) => fs::read_to_string(path).with_context(|| format!("reading {path}"))?,
        None => s.to_string(),
    };
    serde_json::from_str(&text).context("invalid map spec JSON")
}

/// `cat`, `shear`, `identity`, `rotation:THETA`, `linear:a,b,c,d`, inline
/// JSON or `@file.json`.
pub fn system(s: &str) -> Result<SystemMap> {
    let s = s.trim();
    if s.starts_with('{') || s.starts_with('@') {
        return Ok(SystemMap::from_spec(json_spec(s)?)?);
    }
    let (kind, arg) = s.split_once(':').unwrap_or((s, ""));
    let map = match kind {
        "cat" => make_linear([[2, 1], [1, 1]])?,
        "shear" => make_linear([[1, 0], [1, 1]])?,
        "identity" => make_linear([[1, 0], [0, 1]])?,
        "rotation" => make_rotation(number(arg, "rotation angle")?)?,
        "linear" => {
            let v: Vec<i64> = arg
                .split(',')
                .map(|t| t.trim().parse::<i64>())
                .collect::<std::result::Result<_, _>>()
                .map_err(|_| anyhow!("linear needs four integers a,b,c,d, got '{arg}'"))?;
            let [a, b, c, d] = v[..] else {
                bail!("linear needs four integers a,b,c,d, got '{arg}'");
            };
            make_linear([[a, b], [c, d]])?
        }
        _ => bail!("unknown system '{s}' (expected cat, shear, identity, rotation:THETA, linear:a,b,c,d or JSON)"),
    };
    Ok(map)
}

/// Methods for `f`: `same`, `translate:DELTA`, `rotation:+DELTA`,
/// `rotation:THETA`, `perturb:shear-sin:DELTA[:SEED]`,
/// `perturb:translation:DELTA`, `random:DELTA`, `map:SYSTEM` or JSON.
pub fn method(s: &str, f: &SystemMap, seed: u64) -> Result<MethodSpec> {
    let s = s.trim();
    if s.starts_with('{') || s.starts_with('@') {
        let g = SystemMap::from_spec(json_spec(s)?)?;
        return Ok(method_from_map(f, &g)?);
    }
    let (kind, arg) = s.split_once(':').unwrap_or((s, ""));
    let g = match kind {
        "same" => f.clone(),
        "translate" => make_translation_method_map(f, number(arg, "translation")?)?,
        "rotation" if arg.starts_with(['+', '-']) => {
            let MapSpec::Rotation { theta } = f.spec() else {
                bail!("relative rotation method needs a rotation system");
            };
            make_rotation(theta + number(arg, "rotation offset")?)?
        }
        "rotation" => make_rotation(number(arg, "rotation angle")?)?,
        "perturb" => {
            let parts: Vec<&str> = arg.split(':').collect();
            match parts[..] {
                ["shear-sin", d] => {
                    make_conservative_perturbation(f, number(d, "perturbation size")?, PerturbationMode::ShearSin)?
                }
                ["shear-sin", d, sd] => {
                    let sd = sd
                        .parse::<u64>()
                        .map_err(|_| anyhow!("invalid perturbation seed '{sd}'"))?;
                    make_seeded_perturbation(f, number(d, "perturbation size")?, sd)?
                }
                ["translation", d] => {
                    make_conservative_perturbation(f, number(d, "perturbation size")?, PerturbationMode::Translation)?
                }
                _ => bail!("perturb expects shear-sin:DELTA[:SEED] or translation:DELTA, got '{arg}'"),
            }
        }
        "random" => return Ok(random_method(f, number(arg, "method delta")?, seed)?),
        "map" => system(arg)?,
        _ => bail!("unknown method '{s}'"),
    };
    Ok(method_from_map(f, &g)?)
}

/// `x` or `x,y`.
pub fn point(s: &str) -> Result<TorusPoint> {
    let coords: Vec<f64> = s.split(',').map(|t| number(t, "coordinate")).collect::<Result<_>>()?;
    Ok(TorusPoint::new(&coords)?)
}
