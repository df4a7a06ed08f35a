//! Subcommand table and per-grid-point evaluation.

use std::collections::BTreeMap;

use pittlab::fourier::{random_step_function, random_trig_polynomial};
use pittlab::inequalities::{
    bochkarev_decay, pitt_ratio, pitt_region_classify, stein_weiss_check, type_test_ratio, zygmund_check, PittInput,
    PittParams, SteinWeissParams, TypeFamily, TypeNotion, ZygmundVariant,
};
use pittlab::interpolation::{
    hardy_check_functions, hardy_check_sequences, k_functional, limiting_interp_norm, HardyVariant, InterpParams,
    StepPsi,
};
use pittlab::quad::QuadConfig;
use pittlab::rearrange::{PowerProfile, Profile, RearrangementCurve};
use pittlab::sharpness::{sharpness_verdict, CounterexampleSpec, Family, GrowthModel, SharpnessReport};
use pittlab::values::{random_points, type_cotype_constant, AverageMethod, TypeKind, ValueSpace};
use serde_json::{json, Map, Value};

use crate::config::{KeySpec, Point};
use crate::error::CliError;
use crate::record::num;

const fn key(key: &'static str, default: Option<&'static str>, help: &'static str) -> KeySpec {
    KeySpec {
        key,
        default,
        help,
        list: false,
    }
}

pub struct CommandSpec {
    pub name: &'static str,
    pub about: &'static str,
    pub keys: &'static [KeySpec],
}

const POLY_KEYS: [KeySpec; 5] = [
    key("d", Some("1"), "torus dimension (1 or 2)"),
    key("n", Some("8"), "polynomial degree N (coefficients on |n|_inf <= N)"),
    key("r", Some("2"), "value space l^r exponent"),
    key("dim", Some("2"), "value space dimension"),
    key("sample", Some("0"), "random-stream index of the test polynomial"),
];

macro_rules! keys {
    ($($k:expr),* $(,)?) => {
        &[$($k),*]
    };
}

pub static COMMANDS: &[CommandSpec] = &[
    CommandSpec {
        name: "region",
        about: "Classify (d, p, q, beta, gamma, p0) against the region of Pitt's inequality for spaces of Fourier type p0, including the endpoint cases",
        keys: keys![
            key("d", Some("1"), "dimension"),
            key("p", None, "integrability exponent of f"),
            key("q", None, "integrability exponent of the transform"),
            key("gamma", None, "weight exponent on the transform side"),
            key("beta", None, "weight exponent on f; derived from the scaling relation when absent"),
            key("p0", Some("2"), "Fourier type of the value space"),
        ],
    },
    CommandSpec {
        name: "ratio",
        about: "Evaluate both sides of Pitt's weighted Fourier inequality on a seeded random vector-valued trigonometric polynomial",
        keys: keys![
            POLY_KEYS[0], POLY_KEYS[1], POLY_KEYS[2], POLY_KEYS[3], POLY_KEYS[4],
            key("p", None, "integrability exponent of f"),
            key("q", None, "integrability exponent of the coefficients"),
            key("gamma", None, "coefficient weight exponent"),
            key("beta", None, "torus weight exponent; scaling relation when absent"),
            key("p0", Some("2"), "Fourier type used for the region verdict"),
        ],
    },
    CommandSpec {
        name: "type-test",
        about: "Fourier, Paley and Hardy-Littlewood type/cotype test ratios (Hausdorff-Young, Paley and Hardy-Littlewood inequalities) on a seeded random polynomial",
        keys: keys![
            POLY_KEYS[0], POLY_KEYS[1], POLY_KEYS[2], POLY_KEYS[3], POLY_KEYS[4],
            key("family", Some("fourier"), "fourier | paley | hl"),
            key("kind", Some("type"), "type | cotype"),
            key("exponent", None, "type exponent in (1,2] or cotype exponent in [2,inf)"),
        ],
    },
    CommandSpec {
        name: "sharpness",
        about: "Sweep a counterexample family and fit its growth to confirm the failure of the endpoint inequalities (Hardy-Littlewood type, Pitt, Zygmund and Bochkarev sharpness)",
        keys: keys![
            key("family", None, "EX411 | EX412 | EX413 | R56_strict | R56_endpoint | T61 | PITT_TYPE | Z_SHARP | Z_LOGLOG | BOCH_SHARP_b_eq | BOCH_SHARP_b_gt"),
            key("d", Some("1"), "dimension"),
            key("control", Some("0"), "1 skips the parameter-window check (control runs)"),
            KeySpec { key: "schedule", default: None, help: "truncation list N (default 2^7,2^9,...,2^17 for d=1; 2^2..2^7 for d=2)", list: true },
            key("eps", None, "family parameter"),
            key("eta", None, "family parameter"),
            key("delta", None, "family parameter"),
            key("alpha", None, "family parameter"),
            key("p", None, "family parameter"),
            key("q", None, "family parameter"),
            key("p0", None, "family parameter"),
            key("q0", None, "family parameter"),
            key("r", None, "family parameter"),
            key("b", None, "family parameter"),
            key("gamma", None, "family parameter"),
        ],
    },
    CommandSpec {
        name: "zygmund",
        about: "Both sides of the Zygmund-type Lorentz-Zygmund inequalities (std, endpoint with log log weight, and sequence form) on a seeded random polynomial",
        keys: keys![
            POLY_KEYS[0], POLY_KEYS[1], POLY_KEYS[2], POLY_KEYS[3], POLY_KEYS[4],
            key("variant", Some("std"), "std | endpoint | sequence"),
            key("b", None, "logarithmic exponent"),
            key("q", None, "second Lorentz exponent"),
        ],
    },
    CommandSpec {
        name: "bochkarev",
        about: "Bochkarev coefficient-decay statistic for spaces of Fourier type p0 on seeded random polynomials",
        keys: keys![
            POLY_KEYS[0],
            key("n", Some("64"), "polynomial degree N"),
            POLY_KEYS[2],
            key("dim", Some("1"), "value space dimension"),
            POLY_KEYS[4],
            key("p0", Some("2"), "Fourier type"),
            key("q", None, "second Lorentz exponent"),
        ],
    },
    CommandSpec {
        name: "rademacher",
        about: "Rademacher (Steinhaus) type and cotype constants of l^r_N over basis or seeded random vector families",
        keys: keys![
            key("r", Some("1"), "value space l^r exponent"),
            key("dim", None, "value space dimension N"),
            key("vectors", Some("basis"), "basis | random"),
            key("count", None, "number of vectors (default: dim)"),
            key("exponent", Some("2"), "type/cotype exponent"),
            key("kind", Some("type"), "type | cotype"),
            key("moment", Some("2"), "moment of the random sum"),
            key("method", Some("exact"), "exact (all sign patterns) | mc (Steinhaus Monte Carlo)"),
            key("trials", Some("10000"), "Monte Carlo trials"),
            key("sample", Some("0"), "random-stream index for random vectors"),
        ],
    },
    CommandSpec {
        name: "interp",
        about: "Limiting real interpolation norms built from the K-functional of (L^1, L^inf)",
        keys: keys![
            key("curve", Some("indicator"), "indicator (f* = 1 on (0,a)) | power (f* = t^-a on (0,1))"),
            key("a", Some("1"), "curve parameter"),
            key("theta", None, "interpolation parameter in [0,1]"),
            key("q", None, "interpolation exponent"),
            key("b", Some("0"), "logarithmic exponent"),
        ],
    },
    CommandSpec {
        name: "hardy",
        about: "Both sides of the logarithmic Hardy inequalities for functions on (0,1) and for sequences",
        keys: keys![
            key("kind", Some("functions"), "functions | sequences"),
            key("variant", Some("i"), "i | iii (functions only)"),
            key("b", None, "logarithmic exponent"),
            key("q", None, "exponent"),
            key("a", Some("0"), "psi(t) = t^-a (1 - log t)^c, or c_n = n^-a (1 + log n)^c"),
            key("c", Some("0"), "logarithmic exponent of the test input"),
            key("octaves", Some("40"), "functions: dyadic octaves sampled"),
            key("per_octave", Some("16"), "functions: cells per octave"),
            key("len", Some("10000"), "sequences: length"),
        ],
    },
    CommandSpec {
        name: "stein-weiss",
        about: "Both sides of the Stein-Weiss weighted fractional-integration inequality on seeded random step functions on the line",
        keys: keys![
            key("u", None, "exponent on g"),
            key("v", None, "exponent on the potential"),
            key("lambda", None, "kernel exponent |x|^-lambda"),
            key("a", None, "weight exponent on the potential side"),
            key("b", None, "weight exponent on g"),
            key("cells", Some("4"), "cells k in [-cells, cells]"),
            key("scale", Some("1"), "cell width"),
            key("sample", Some("0"), "random-stream index"),
        ],
    },
];

pub fn spec(name: &str) -> Option<&'static CommandSpec> {
    COMMANDS.iter().find(|c| c.name == name)
}

/// Whether the point draws random numbers.
pub fn needs_seed(command: &str, point: &Point) -> bool {
    match command {
        "ratio" | "type-test" | "zygmund" | "bochkarev" | "stein-weiss" => true,
        "rademacher" => {
            point.get("method").and_then(Value::as_str) == Some("mc")
                || point.get("vectors").and_then(Value::as_str) == Some("random")
        }
        _ => false,
    }
}

fn missing(k: &str) -> CliError {
    CliError::usage(format!("missing parameter `{k}`"))
}

fn get_num(p: &Point, k: &str) -> Result<f64, CliError> {
    opt_num(p, k)?.ok_or_else(|| missing(k))
}

fn opt_num(p: &Point, k: &str) -> Result<Option<f64>, CliError> {
    match p.get(k) {
        None | Some(Value::Null) => Ok(None),
        Some(Value::Number(n)) => Ok(n.as_f64()),
        Some(Value::String(s)) => match s.as_str() {
            "inf" => Ok(Some(f64::INFINITY)),
            "-inf" => Ok(Some(f64::NEG_INFINITY)),
            _ => Err(CliError::usage(format!(
                "parameter `{k}`: expected a number, got `{s}`"
            ))),
        },
        Some(other) => Err(CliError::usage(format!(
            "parameter `{k}`: expected a number, got {other}"
        ))),
    }
}

fn get_int(p: &Point, k: &str) -> Result<usize, CliError> {
    let x = get_num(p, k)?;
    if x < 0.0 || x.fract() != 0.0 || x > 1e15 {
        return Err(CliError::usage(format!(
            "parameter `{k}`: expected a nonnegative integer, got {x}"
        )));
    }
    Ok(x as usize)
}

fn get_text<'a>(p: &'a Point, k: &str) -> Result<&'a str, CliError> {
    match p.get(k) {
        Some(Value::String(s)) => Ok(s),
        None => Err(missing(k)),
        Some(other) => Err(CliError::usage(format!(
            "parameter `{k}`: expected a name, got {other}"
        ))),
    }
}

fn choice<T: Copy>(p: &Point, k: &str, options: &[(&str, T)]) -> Result<T, CliError> {
    let s = get_text(p, k)?;
    options.iter().find(|o| o.0 == s).map(|o| o.1).ok_or_else(|| {
        let names: Vec<&str> = options.iter().map(|o| o.0).collect();
        CliError::usage(format!(
            "parameter `{k}`: expected one of {}, got `{s}`",
            names.join(", ")
        ))
    })
}

fn poly(p: &Point, seed: u64) -> Result<pittlab::fourier::TrigPolynomial, CliError> {
    let space = ValueSpace::new(get_num(p, "r")?, get_int(p, "dim")?)?;
    Ok(random_trig_polynomial(
        get_int(p, "d")?,
        get_int(p, "n")?,
        space,
        seed,
        get_int(p, "sample")? as u64,
    )?)
}

fn pitt_params(p: &Point) -> Result<PittParams, CliError> {
    let (d, pp, q, gamma, p0) = (
        get_int(p, "d")?,
        get_num(p, "p")?,
        get_num(p, "q")?,
        get_num(p, "gamma")?,
        get_num(p, "p0")?,
    );
    Ok(match opt_num(p, "beta")? {
        Some(beta) => PittParams::new(d, pp, q, beta, gamma, p0),
        None => PittParams::on_scaling_line(d, pp, q, gamma, p0),
    })
}

/// Evaluates one grid point.
pub fn evaluate(command: &str, p: &Point, quad: &QuadConfig, seed: Option<u64>) -> Result<Value, CliError> {
    let seed_or = || seed.ok_or_else(|| CliError::usage(format!("`{command}` draws random inputs; pass --seed")));
    let out = match command {
        "region" => {
            let params = pitt_params(p)?;
            let verdict = pitt_region_classify(&params)?;
            json!({
                "verdict": verdict.as_str(),
                "holds": verdict.holds(),
                "beta": num(params.beta),
                "lower_endpoint": num(params.lower_endpoint()),
                "upper_endpoint": num(params.upper_endpoint()),
            })
        }
        "ratio" => {
            let params = pitt_params(p)?;
            let f = poly(p, seed_or()?)?;
            let verdict = pitt_region_classify(&params)?;
            let r = pitt_ratio(PittInput::Torus(&f), &params, quad)?;
            json!({
                "lhs": num(r.lhs),
                "rhs": num(r.rhs),
                "ratio": num(r.ratio),
                "beta": num(params.beta),
                "verdict": verdict.as_str(),
            })
        }
        "type-test" => {
            let family = choice(
                p,
                "family",
                &[
                    ("fourier", TypeFamily::Fourier),
                    ("paley", TypeFamily::Paley),
                    ("hl", TypeFamily::Hl),
                ],
            )?;
            let kind = choice(p, "kind", &[("type", TypeKind::Type), ("cotype", TypeKind::Cotype)])?;
            let notion = TypeNotion::new(family, kind, get_num(p, "exponent")?)?;
            let f = poly(p, seed_or()?)?;
            json!({ "ratio": num(type_test_ratio(&f, &notion, quad)?) })
        }
        "sharpness" => sharpness(p, quad)?,
        "zygmund" => {
            let variant = choice(
                p,
                "variant",
                &[
                    ("std", ZygmundVariant::Std),
                    ("endpoint", ZygmundVariant::Endpoint),
                    ("sequence", ZygmundVariant::Sequence),
                ],
            )?;
            let f = poly(p, seed_or()?)?;
            let s = zygmund_check(&f, get_num(p, "b")?, get_num(p, "q")?, variant, quad)?;
            json!({
                "lhs": num(s.lhs.value()),
                "rhs": num(s.rhs.value()),
                "ratio": num(s.lhs.value() / s.rhs.value()),
            })
        }
        "bochkarev" => {
            let f = poly(p, seed_or()?)?;
            json!({ "statistic": num(bochkarev_decay(&f, get_num(p, "p0")?, get_num(p, "q")?, quad)?) })
        }
        "rademacher" => rademacher(p, seed)?,
        "interp" => {
            let params = InterpParams::new(get_num(p, "theta")?, get_num(p, "q")?, get_num(p, "b")?)?;
            let a = get_num(p, "a")?;
            let norm_k = |c: &dyn Profile| -> Result<(f64, f64), CliError> {
                Ok((limiting_interp_norm(c, &params, quad)?, k_functional(c, 1.0)?))
            };
            let (norm, k1) = match get_text(p, "curve")? {
                "indicator" => norm_k(&RearrangementCurve::constant(1.0, a, a.max(1.0))?)?,
                "power" => {
                    if !(0.0..1.0).contains(&a) {
                        return Err(CliError::Domain(format!("power curve needs 0 <= a < 1, got {a}")));
                    }
                    norm_k(&PowerProfile { c: 1.0, a, total: 1.0 })?
                }
                other => {
                    return Err(CliError::usage(format!(
                        "parameter `curve`: expected indicator or power, got `{other}`"
                    )))
                }
            };
            json!({ "norm": num(norm), "k_at_1": num(k1) })
        }
        "hardy" => {
            let (a, c, b, q) = (get_num(p, "a")?, get_num(p, "c")?, get_num(p, "b")?, get_num(p, "q")?);
            let pair = match get_text(p, "kind")? {
                "functions" => {
                    let variant = choice(p, "variant", &[("i", HardyVariant::I), ("iii", HardyVariant::Iii)])?;
                    let psi = StepPsi::sample(
                        |t| t.powf(-a) * (1.0 - t.ln()).powf(c),
                        get_int(p, "octaves")?,
                        get_int(p, "per_octave")?,
                    )?;
                    hardy_check_functions(&psi, b, q, variant, quad)?
                }
                "sequences" => {
                    let seq: Vec<f64> = (1..=get_int(p, "len")?)
                        .map(|n| {
                            let n = n as f64;
                            n.powf(-a) * (1.0 + n.ln()).powf(c)
                        })
                        .collect();
                    hardy_check_sequences(&seq, b, q)?
                }
                other => {
                    return Err(CliError::usage(format!(
                        "parameter `kind`: expected functions or sequences, got `{other}`"
                    )))
                }
            };
            json!({ "lhs": num(pair.lhs), "rhs": num(pair.rhs), "ratio": num(pair.ratio()) })
        }
        "stein-weiss" => {
            let params = SteinWeissParams {
                u: get_num(p, "u")?,
                v: get_num(p, "v")?,
                lambda: get_num(p, "lambda")?,
                a: get_num(p, "a")?,
                b: get_num(p, "b")?,
            };
            let g = random_step_function(
                1,
                get_num(p, "scale")?,
                ValueSpace::scalar(),
                get_int(p, "cells")?,
                seed_or()?,
                get_int(p, "sample")? as u64,
            )?;
            let r = stein_weiss_check(&g, &params, quad)?;
            json!({ "lhs": num(r.lhs), "rhs": num(r.rhs), "ratio": num(r.ratio) })
        }
        other => return Err(CliError::usage(format!("unknown command `{other}`"))),
    };
    Ok(out)
}

const FAMILY_KEYS: [&str; 11] = ["eps", "eta", "delta", "alpha", "p", "q", "p0", "q0", "r", "b", "gamma"];

fn sharpness(p: &Point, quad: &QuadConfig) -> Result<Value, CliError> {
    let family: Family = get_text(p, "family")?.parse()?;
    let d = get_int(p, "d")?;
    let mut params: BTreeMap<String, f64> = family.default_params();
    for k in FAMILY_KEYS {
        if let Some(v) = opt_num(p, k)? {
            if !params.contains_key(k) {
                return Err(CliError::usage(format!(
                    "parameter `{k}` is not used by family {family}"
                )));
            }
            params.insert(k.to_string(), v);
        }
    }
    let schedule = match p.get("schedule") {
        Some(Value::Array(items)) if !items.is_empty() => items
            .iter()
            .map(|v| match v.as_f64() {
                Some(x) if x >= 1.0 && x.fract() == 0.0 => Ok(x as usize),
                _ => Err(CliError::usage(format!(
                    "schedule entries must be positive integers, got {v}"
                ))),
            })
            .collect::<Result<Vec<_>, _>>()?,
        _ => pittlab::sharpness::default_schedule(d),
    };
    let spec = if get_num(p, "control")? != 0.0 {
        CounterexampleSpec::unchecked(family, d, params, schedule)?
    } else {
        CounterexampleSpec::new(family, d, params, schedule)?
    };
    Ok(sharpness_json(&sharpness_verdict(&spec, quad)?))
}

fn model_name(m: GrowthModel) -> &'static str {
    match m {
        GrowthModel::Bounded => "bounded",
        GrowthModel::LogPower => "log_power",
        GrowthModel::LoglogPower => "loglog_power",
        GrowthModel::Power => "power",
    }
}

fn fit_json(f: &pittlab::sharpness::GrowthFit) -> Value {
    json!({ "model": model_name(f.model), "exponent": num(f.exponent), "r_squared": num(f.r_squared) })
}

fn to_value<T: serde::Serialize>(x: &T) -> Value {
    serde_json::to_value(x).unwrap_or(Value::Null)
}

pub fn sharpness_json(r: &SharpnessReport) -> Value {
    let e = &r.expectation;
    let params: Map<String, Value> = r.spec.params.iter().map(|(k, v)| (k.clone(), num(*v))).collect();
    let series: Vec<Value> = r
        .series
        .iter()
        .map(|s| json!({ "n": s.n, "support": s.support, "lhs": num(s.lhs), "rhs": num(s.rhs) }))
        .collect();
    let plot: Vec<Value> = r
        .series
        .iter()
        .map(|s| {
            let y = match e.divergent {
                pittlab::sharpness::Side::Ratio => s.lhs / s.rhs,
                pittlab::sharpness::Side::Rhs => s.rhs,
                pittlab::sharpness::Side::Lhs => s.lhs,
            };
            let x = e.regressor.eval(s.n, s.support);
            let fit = (r.fit.offset + r.fit.scale * x.powf(r.fit.exponent * e.power))
                .max(0.0)
                .powf(1.0 / e.power);
            json!([s.n, num(y), num(fit)])
        })
        .collect();
    json!({
        "family": r.spec.family.id(),
        "d": r.spec.d,
        "family_params": params,
        "schedule": r.spec.schedule,
        "expected": {
            "model": model_name(e.model),
            "exponent": num(e.exponent),
            "regressor": to_value(&e.regressor),
            "power": num(e.power),
            "divergent_side": to_value(&e.divergent),
            "rhs": to_value(&e.rhs),
            "derivation": e.derivation,
        },
        "fit": {
            "exponent": num(r.fit.exponent),
            "r_squared": num(r.fit.r_squared),
            "offset": num(r.fit.offset),
            "scale": num(r.fit.scale),
        },
        "generic_fit": fit_json(&r.generic_fit),
        "rhs_fit": fit_json(&r.rhs_fit),
        "rhs_increment": num(r.rhs_increment),
        "relative_error": num(r.relative_error),
        "verdict": to_value(&r.verdict),
        "series": series,
        "plot": plot,
    })
}

fn rademacher(p: &Point, seed: Option<u64>) -> Result<Value, CliError> {
    let dim = get_int(p, "dim")?;
    let space = ValueSpace::new(get_num(p, "r")?, dim)?;
    let count = match opt_num(p, "count")? {
        Some(_) => get_int(p, "count")?,
        None => dim,
    };
    let sample = get_int(p, "sample")? as u64;
    let need = || seed.ok_or_else(|| CliError::usage("random vectors and Monte Carlo averages need --seed"));
    let vectors = match get_text(p, "vectors")? {
        "basis" => {
            if count > dim {
                return Err(CliError::Domain(format!(
                    "basis family has at most dim={dim} vectors, asked for {count}"
                )));
            }
            (0..count).map(|k| space.basis(k)).collect()
        }
        "random" => random_points(&space, count, need()?, sample),
        other => {
            return Err(CliError::usage(format!(
                "parameter `vectors`: expected basis or random, got `{other}`"
            )))
        }
    };
    let method = match get_text(p, "method")? {
        "exact" => AverageMethod::ExactEnum,
        "mc" => AverageMethod::MonteCarlo {
            seed: need()?,
            trials: get_int(p, "trials")?,
        },
        other => {
            return Err(CliError::usage(format!(
                "parameter `method`: expected exact or mc, got `{other}`"
            )))
        }
    };
    let kind = choice(p, "kind", &[("type", TypeKind::Type), ("cotype", TypeKind::Cotype)])?;
    let c = type_cotype_constant(
        &space,
        get_num(p, "exponent")?,
        &[vectors],
        get_num(p, "moment")?,
        method,
        kind,
    )?;
    Ok(json!({ "constant": num(c) }))
}
