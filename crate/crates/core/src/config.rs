//! Flat `key=value` experiment configuration.
//!
//! ```text
//! # α = 0.8, σ = 0.05
//! alpha = 0.8
//! hurst = 0.4
//! sigma = 0.05
//! T = 0.2
//! steps = 4,8,16,32
//! modes = 2047
//! trajectories = 500
//! seed = 1
//! f = paper
//! u0 = 1:0.25
//! v0 = 3:0.5
//! workers = auto
//! ```
//!
//! `q` (mode:value pairs, or `none`) replaces `sigma` with explicit
//! eigenvalues of the noise covariance.

use std::collections::BTreeMap;
use std::fmt::Write as _;
use std::path::Path;

use crate::error::{Error, Result};
use crate::experiments::{ExperimentConfig, NoiseModel};
use crate::stepper::Drift;

const KNOWN: [&str; 13] = [
    "alpha", "hurst", "sigma", "q", "T", "steps", "modes", "trajectories", "seed", "f", "u0", "v0", "workers",
];

/// Environment variable that overrides `seed`.
pub const SEED_ENV: &str = "SPDE_SEED";

fn bad(key: &str, value: &str, what: &str) -> Error {
    Error::Config(format!("key `{key}`: cannot parse {value:?} as {what}"))
}

fn parse_pairs(key: &str, value: &str) -> Result<Vec<(usize, f64)>> {
    let mut out = Vec::new();
    for item in value.split([',', ' ', '\t']).filter(|s| !s.is_empty()) {
        let (i, c) = item.split_once(':').ok_or_else(|| bad(key, item, "mode:coeff"))?;
        let i = i.trim().parse::<usize>().map_err(|_| bad(key, item, "mode:coeff"))?;
        let c = c.trim().parse::<f64>().map_err(|_| bad(key, item, "mode:coeff"))?;
        out.push((i, c));
    }
    Ok(out)
}

struct Entries(BTreeMap<String, String>);

impl Entries {
    fn get(&self, key: &str) -> Option<&str> {
        self.0.get(key).map(String::as_str)
    }

    fn required(&self, key: &str) -> Result<&str> {
        self.get(key)
            .ok_or_else(|| Error::Config(format!("missing required key `{key}`")))
    }

    fn float(&self, key: &str) -> Result<f64> {
        let v = self.required(key)?;
        v.parse::<f64>().ok().filter(|x| x.is_finite()).ok_or_else(|| bad(key, v, "a number"))
    }

    fn count(&self, key: &str) -> Result<usize> {
        let v = self.required(key)?;
        v.parse::<usize>().map_err(|_| bad(key, v, "a non-negative integer"))
    }
}

/// Parses configuration text. Unknown keys and duplicates are errors.
pub fn parse_config(text: &str) -> Result<ExperimentConfig> {
    let mut map = BTreeMap::new();
    for (lineno, raw) in text.lines().enumerate() {
        let line = raw.split('#').next().unwrap_or("").trim();
        if line.is_empty() {
            continue;
        }
        let (k, v) = line
            .split_once('=')
            .ok_or_else(|| Error::Config(format!("line {}: expected key=value", lineno + 1)))?;
        let k = k.trim();
        if !KNOWN.contains(&k) {
            return Err(Error::Config(format!("line {}: unknown key `{k}`", lineno + 1)));
        }
        if map.insert(k.to_string(), v.trim().to_string()).is_some() {
            return Err(Error::Config(format!("line {}: duplicate key `{k}`", lineno + 1)));
        }
    }
    let e = Entries(map);

    let noise = match e.get("q") {
        Some(q) if q.eq_ignore_ascii_case("none") || q.is_empty() => NoiseModel::Explicit(Vec::new()),
        Some(q) => {
            let pairs = parse_pairs("q", q)?;
            let len = pairs.iter().map(|p| p.0).max().unwrap_or(0);
            let mut list = vec![0.0; len];
            for (i, v) in pairs {
                if i == 0 {
                    return Err(Error::Config("key `q`: modes are numbered from 1".into()));
                }
                list[i - 1] = v;
            }
            NoiseModel::Explicit(list)
        }
        None => NoiseModel::Decay(e.float("sigma")?),
    };
    let steps_raw = e.required("steps")?;
    let step_counts = steps_raw
        .split(',')
        .map(|s| s.trim().parse::<usize>().map_err(|_| bad("steps", steps_raw, "a comma list of counts")))
        .collect::<Result<Vec<_>>>()?;
    let seed_raw = e.required("seed")?;
    let base_seed = seed_raw.parse::<u64>().map_err(|_| bad("seed", seed_raw, "an unsigned integer"))?;
    let drift = e.required("f")?.parse::<Drift>()?;
    let workers = match e.get("workers") {
        None | Some("auto") | Some("") => None,
        Some(w) => Some(w.parse::<usize>().map_err(|_| bad("workers", w, "a worker count or auto"))?),
    };

    let cfg = ExperimentConfig {
        alpha: e.float("alpha")?,
        hurst: e.float("hurst")?,
        noise,
        final_time: e.float("T")?,
        step_counts,
        modes: e.count("modes")?,
        trajectories: e.count("trajectories")?,
        base_seed,
        drift,
        u0: e.get("u0").map(|v| parse_pairs("u0", v)).transpose()?.unwrap_or_default(),
        v0: e.get("v0").map(|v| parse_pairs("v0", v)).transpose()?.unwrap_or_default(),
        workers,
    };
    cfg.validate()?;
    Ok(cfg)
}

pub fn load_config(path: &Path) -> Result<ExperimentConfig> {
    let text = std::fs::read_to_string(path)
        .map_err(|e| Error::Config(format!("cannot read {}: {e}", path.display())))?;
    parse_config(&text)
}

/// Replaces the seed with `value` when it is set.
pub fn apply_seed_override(cfg: &mut ExperimentConfig, value: Option<&str>) -> Result<()> {
    if let Some(v) = value {
        cfg.base_seed = v
            .trim()
            .parse()
            .map_err(|_| Error::Config(format!("{SEED_ENV}: cannot parse {v:?} as an unsigned integer")))?;
    }
    Ok(())
}

fn pairs_text(list: &[(usize, f64)]) -> String {
    list.iter().map(|(i, c)| format!("{i}:{c}")).collect::<Vec<_>>().join(",")
}

/// Canonical text form; `parse_config(&to_text(c)) == c`. Worker count is
/// omitted because it never affects results.
pub fn to_text(cfg: &ExperimentConfig) -> String {
    let mut s = String::new();
    let _ = writeln!(s, "alpha = {}", cfg.alpha);
    let _ = writeln!(s, "hurst = {}", cfg.hurst);
    match &cfg.noise {
        NoiseModel::Decay(sigma) => {
            let _ = writeln!(s, "sigma = {sigma}");
        }
        NoiseModel::Explicit(q) if q.iter().all(|&x| x == 0.0) => {
            let _ = writeln!(s, "q = none");
        }
        NoiseModel::Explicit(q) => {
            let pairs: Vec<(usize, f64)> =
                q.iter().enumerate().filter(|(_, v)| **v != 0.0).map(|(i, v)| (i + 1, *v)).collect();
            let _ = writeln!(s, "q = {}", pairs_text(&pairs));
        }
    }
    let steps: Vec<String> = cfg.step_counts.iter().map(|n| n.to_string()).collect();
    let _ = writeln!(s, "T = {}", cfg.final_time);
    let _ = writeln!(s, "steps = {}", steps.join(","));
    let _ = writeln!(s, "modes = {}", cfg.modes);
    let _ = writeln!(s, "trajectories = {}", cfg.trajectories);
    let _ = writeln!(s, "seed = {}", cfg.base_seed);
    let _ = writeln!(s, "f = {}", cfg.drift);
    let _ = writeln!(s, "u0 = {}", pairs_text(&cfg.u0));
    let _ = writeln!(s, "v0 = {}", pairs_text(&cfg.v0));
    s
}
