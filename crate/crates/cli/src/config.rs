//! Experiment configuration: a TOML file with flat `key = value` sections,
//! overridden by command-line flags, expanded into a parameter grid.
//!
//! Numeric values are decimal strings parsed by Rust's `f64` parser, which
//! rounds to the nearest binary64 value (ties to even). A value may be a
//! scalar, a comma-separated list, or a range `start:stop:count` of `count`
//! evenly spaced points including both ends.

use std::collections::BTreeMap;

use pittlab::quad::QuadConfig;
use serde_json::Value;

use crate::error::CliError;

pub const MAX_GRID_POINTS: usize = 10_000;

/// One grid axis per key; keys listed in `fixed` are kept as whole lists.
#[derive(Debug, Clone, Default, PartialEq)]
pub struct ExperimentConfig {
    pub command: String,
    pub grid: BTreeMap<String, Vec<Value>>,
    pub fixed: BTreeMap<String, Value>,
    pub quad: QuadConfig,
    pub seed: Option<u64>,
    pub out: Option<String>,
}

pub type Point = BTreeMap<String, Value>;

fn parse_scalar(s: &str) -> Value {
    let t = s.trim();
    match t.parse::<f64>() {
        Ok(x) if x.is_finite() => serde_json::Number::from_f64(x)
            .map(Value::Number)
            .unwrap_or(Value::Null),
        Ok(x) => Value::String(if x > 0.0 { "inf".into() } else { "-inf".into() }),
        Err(_) => Value::String(t.to_string()),
    }
}

/// Parses a flag value into grid entries.
pub fn parse_values(key: &str, raw: &str) -> Result<Vec<Value>, CliError> {
    let raw = raw.trim();
    if raw.is_empty() {
        return Ok(Vec::new());
    }
    let parts: Vec<&str> = raw.split(':').collect();
    if parts.len() == 3 {
        let bad = || CliError::usage(format!("--{key}: range must be start:stop:count, got `{raw}`"));
        let a: f64 = parts[0].trim().parse().map_err(|_| bad())?;
        let b: f64 = parts[1].trim().parse().map_err(|_| bad())?;
        let n: usize = parts[2].trim().parse().map_err(|_| bad())?;
        if n == 1 {
            return Ok(vec![parse_scalar(parts[0])]);
        }
        return Ok((0..n)
            .map(|i| {
                let x = if i + 1 == n {
                    b
                } else {
                    a + (b - a) * i as f64 / (n - 1) as f64
                };
                serde_json::Number::from_f64(x)
                    .map(Value::Number)
                    .unwrap_or(Value::Null)
            })
            .collect());
    }
    Ok(raw.split(',').map(parse_scalar).collect())
}

fn toml_to_json(key: &str, v: &toml::Value) -> Result<Value, CliError> {
    Ok(match v {
        toml::Value::Integer(i) => Value::from(*i as f64),
        toml::Value::Float(x) => parse_scalar(&x.to_string()),
        toml::Value::String(s) => parse_scalar(s),
        toml::Value::Boolean(b) => Value::from(if *b { 1.0 } else { 0.0 }),
        other => {
            return Err(CliError::usage(format!(
                "field `{key}`: expected a number or string, got {}",
                other.type_str()
            )))
        }
    })
}

fn line_of(src: &str, key: &str) -> String {
    src.lines()
        .position(|l| {
            let l = l.trim_start();
            l.starts_with(key) && l[key.len()..].trim_start().starts_with('=')
        })
        .map(|i| format!("line {}: ", i + 1))
        .unwrap_or_default()
}

fn config_values(src: &str, key: &str, v: &toml::Value) -> Result<Vec<Value>, CliError> {
    let at = |e: CliError| CliError::usage(format!("{}{}", line_of(src, key), e.message()));
    match v {
        toml::Value::Array(items) => items
            .iter()
            .map(|x| toml_to_json(key, x))
            .collect::<Result<_, _>>()
            .map_err(at),
        toml::Value::String(s) => parse_values(key, s).map_err(at),
        other => Ok(vec![toml_to_json(key, other).map_err(at)?]),
    }
}

/// Keys a command accepts, with defaults for absent ones.
#[derive(Debug, Clone, Copy)]
pub struct KeySpec {
    pub key: &'static str,
    pub default: Option<&'static str>,
    pub help: &'static str,
    /// Whole-list parameter, never expanded into grid points.
    pub list: bool,
}

impl ExperimentConfig {
    /// Reads `path` (if any) and folds in flag overrides.
    pub fn load(
        command: &str,
        keys: &[KeySpec],
        path: Option<&str>,
        flags: &BTreeMap<String, String>,
        seed: Option<u64>,
        out: Option<String>,
    ) -> Result<Self, CliError> {
        let mut cfg = ExperimentConfig {
            command: command.to_string(),
            seed,
            out,
            ..Default::default()
        };
        let known = |k: &str| keys.iter().find(|s| s.key == k);
        if let Some(path) = path {
            let src = std::fs::read_to_string(path)
                .map_err(|e| CliError::usage(format!("cannot read config `{path}`: {e}")))?;
            let table: toml::Table = src
                .parse()
                .map_err(|e: toml::de::Error| CliError::usage(format!("config `{path}`: {e}")))?;
            for (k, v) in &table {
                match (k.as_str(), v) {
                    ("command", toml::Value::String(c)) => {
                        if c != command {
                            return Err(CliError::usage(format!(
                                "{}field `command`: config is for `{c}`, not `{command}`",
                                line_of(&src, "command")
                            )));
                        }
                    }
                    ("seed", toml::Value::Integer(s)) if *s >= 0 => {
                        if cfg.seed.is_none() {
                            cfg.seed = Some(*s as u64);
                        }
                    }
                    ("out", toml::Value::String(o)) => {
                        if cfg.out.is_none() {
                            cfg.out = Some(o.clone());
                        }
                    }
                    ("params", toml::Value::Table(params)) => {
                        for (pk, pv) in params {
                            let spec = known(pk).ok_or_else(|| {
                                CliError::usage(format!(
                                    "{}field `params.{pk}`: unknown parameter for `{command}`",
                                    line_of(&src, pk)
                                ))
                            })?;
                            let values = config_values(&src, pk, pv)?;
                            if spec.list {
                                cfg.fixed.insert(pk.clone(), Value::Array(values));
                            } else {
                                cfg.grid.insert(pk.clone(), values);
                            }
                        }
                    }
                    ("quad", toml::Value::Table(q)) => {
                        for (qk, qv) in q {
                            let line = line_of(&src, qk);
                            let num = qv
                                .as_integer()
                                .map(|i| i as f64)
                                .or_else(|| qv.as_float())
                                .ok_or_else(|| {
                                    CliError::usage(format!("{line}field `quad.{qk}`: expected a number"))
                                })?;
                            match qk.as_str() {
                                "u_max" => cfg.quad.u_max = num,
                                "panels" => cfg.quad.panels = num as usize,
                                "order" => cfg.quad.order = num as usize,
                                "grid_m" => cfg.quad.grid_m = Some(num as usize),
                                _ => {
                                    return Err(CliError::usage(format!(
                                        "{line}field `quad.{qk}`: expected one of u_max, panels, order, grid_m"
                                    )))
                                }
                            }
                        }
                    }
                    _ => {
                        return Err(CliError::usage(format!(
                            "{}field `{k}`: expected `command`, `seed`, `out`, [params] or [quad]",
                            line_of(&src, k)
                        )))
                    }
                }
            }
        }
        for (k, raw) in flags {
            let spec = known(k).ok_or_else(|| CliError::usage(format!("unknown parameter `{k}` for `{command}`")))?;
            let values = parse_values(k, raw)?;
            if spec.list {
                cfg.fixed.insert(k.clone(), Value::Array(values));
            } else {
                cfg.grid.insert(k.clone(), values);
            }
        }
        for spec in keys {
            if cfg.grid.contains_key(spec.key) || cfg.fixed.contains_key(spec.key) {
                continue;
            }
            if let Some(d) = spec.default {
                let values = parse_values(spec.key, d)?;
                if spec.list {
                    cfg.fixed.insert(spec.key.to_string(), Value::Array(values));
                } else {
                    cfg.grid.insert(spec.key.to_string(), values);
                }
            }
        }
        cfg.quad.validate().map_err(|e| CliError::usage(format!("quad: {e}")))?;
        let size = cfg.grid_size();
        if size > MAX_GRID_POINTS {
            return Err(CliError::usage(format!(
                "grid has {size} points; the limit is {MAX_GRID_POINTS}"
            )));
        }
        Ok(cfg)
    }

    pub fn grid_size(&self) -> usize {
        self.grid
            .values()
            .map(|v| v.len())
            .try_fold(1usize, |a, n| a.checked_mul(n))
            .unwrap_or(usize::MAX)
    }

    /// Cartesian product in key order, last key fastest.
    pub fn points(&self) -> Vec<Point> {
        let keys: Vec<&String> = self.grid.keys().collect();
        let total = self.grid_size();
        let mut out = Vec::with_capacity(total);
        for mut idx in 0..total {
            let mut point: Point = self.fixed.clone();
            for k in keys.iter().rev() {
                let axis = &self.grid[*k];
                point.insert((*k).clone(), axis[idx % axis.len()].clone());
                idx /= axis.len();
            }
            out.push(point);
        }
        out
    }
}
