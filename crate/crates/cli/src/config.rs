//! Law descriptors, config-file overlay and shared experiment options.
//!
//! Config files are flat TOML-style `key = value` text; command-line flags
//! override file values. Every experiment command requires a master seed.

use anyhow::{anyhow, bail, Context, Result};
use hypsurf::{LengthLaw, TwistLaw, WeightLaw};
use std::collections::BTreeMap;
use std::path::Path;

/// Parses `pm:L`, `uniform:LO,HI` or `loguniform:LO,HI` boundary-length
/// descriptors.
pub fn parse_length_law(s: &str) -> Result<LengthLaw> {
    let (kind, rest) = s
        .split_once(':')
        .ok_or_else(|| anyhow!("length law must be kind:params, got {s:?}"))?;
    let nums: Vec<f64> = rest
        .split(',')
        .map(|x| x.trim().parse::<f64>().context("bad number in length law"))
        .collect::<Result<_>>()?;
    match (kind, nums.as_slice()) {
        ("pm", [a]) => Ok(LengthLaw::PointMass(*a)),
        ("uniform", [lo, hi]) => Ok(LengthLaw::Uniform(*lo, *hi)),
        ("loguniform", [lo, hi]) => Ok(LengthLaw::LogUniform(*lo, *hi)),
        _ => bail!("unrecognized length law {s:?}"),
    }
}

pub fn parse_twist_law(s: &str) -> Result<TwistLaw> {
    match s {
        "zero" => Ok(TwistLaw::Zero),
        "uniform" => Ok(TwistLaw::UniformCircle),
        _ => bail!("twist law must be zero|uniform, got {s:?}"),
    }
}

pub fn law_descriptor(law: &WeightLaw) -> String {
    let length = match law.length {
        LengthLaw::PointMass(a) => format!("pm:{a}"),
        LengthLaw::Uniform(lo, hi) => format!("uniform:{lo},{hi}"),
        LengthLaw::LogUniform(lo, hi) => format!("loguniform:{lo},{hi}"),
    };
    let twist = match law.twist {
        TwistLaw::Zero => "zero",
        TwistLaw::UniformCircle => "uniform",
    };
    format!("{length}/{twist}")
}

/// Flat key=value config file (TOML subset: strings, numbers, no tables).
pub fn load_config(path: &Path) -> Result<BTreeMap<String, String>> {
    let text = std::fs::read_to_string(path)
        .with_context(|| format!("reading config {}", path.display()))?;
    let mut map = BTreeMap::new();
    for (i, line) in text.lines().enumerate() {
        let line = line.trim();
        if line.is_empty() || line.starts_with('#') {
            continue;
        }
        let (k, v) = line
            .split_once('=')
            .ok_or_else(|| anyhow!("config line {}: expected key = value", i + 1))?;
        map.insert(
            k.trim().to_string(),
            v.trim().trim_matches('"').to_string(),
        );
    }
    Ok(map)
}

/// Flag value, else config value, else default.
pub fn resolve<T: std::str::FromStr>(
    flag: Option<T>,
    config: &BTreeMap<String, String>,
    key: &str,
    default: Option<T>,
) -> Result<T>
where
    T::Err: std::fmt::Display,
{
    if let Some(v) = flag {
        return Ok(v);
    }
    if let Some(raw) = config.get(key) {
        return raw
            .parse::<T>()
            .map_err(|e| anyhow!("config key {key}: {e}"));
    }
    default.ok_or_else(|| anyhow!("missing required option `{key}` (flag or config)"))
}

pub fn parse_f64_list(s: &str) -> Result<Vec<f64>> {
    s.split(',')
        .map(|x| x.trim().parse::<f64>().context("bad number in list"))
        .collect()
}

pub fn parse_usize_list(s: &str) -> Result<Vec<usize>> {
    s.split(',')
        .map(|x| x.trim().parse::<usize>().context("bad integer in list"))
        .collect()
}
