//! Counterexample families for the endpoint and type statements, truncation
//! sweeps, and growth-rate fitting.
//!
//! Every family has coefficients `ĉ(n) = a_n e_{slot(n)}` in an `ℓ^r` space
//! whose dimension equals the support size. Then `‖ĉ(n)‖ = a_n` and
//! `‖f(t)‖ = ‖a‖_r` for every `t`, so both sides reduce to scalar sums.
//! [`Counterexample::materialize`] builds the dense polynomial for small
//! truncations so the reduction can be checked against the generic evaluators.

use std::collections::BTreeMap;

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::fourier::{IndexNorm, MultiIndex, TrigPolynomial};
use crate::inequalities::default_grid;
use crate::quad::QuadConfig;
use crate::rearrange::{
    lz_norm_function, lz_norm_lattice, torus_rearrangement, weighted_lp_norm_sequence, weighted_lp_norm_torus,
    LzParams, RearrangementCurve,
};
use crate::values::{dual_exponent, lr_norm_real, ValuePoint, ValueSpace};
use crate::{Error, Result};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub enum Family {
    #[serde(rename = "EX411")]
    Ex411,
    #[serde(rename = "EX412")]
    Ex412,
    #[serde(rename = "EX413")]
    Ex413,
    #[serde(rename = "R56_strict")]
    R56Strict,
    #[serde(rename = "R56_endpoint")]
    R56Endpoint,
    #[serde(rename = "T61")]
    T61,
    #[serde(rename = "PITT_TYPE")]
    PittType,
    #[serde(rename = "Z_SHARP")]
    ZSharp,
    #[serde(rename = "Z_LOGLOG")]
    ZLoglog,
    #[serde(rename = "BOCH_SHARP_b_eq")]
    BochSharpBEq,
    #[serde(rename = "BOCH_SHARP_b_gt")]
    BochSharpBGt,
}

impl Family {
    pub const ALL: [Family; 11] = [
        Family::Ex411,
        Family::Ex412,
        Family::Ex413,
        Family::R56Strict,
        Family::R56Endpoint,
        Family::T61,
        Family::PittType,
        Family::ZSharp,
        Family::ZLoglog,
        Family::BochSharpBEq,
        Family::BochSharpBGt,
    ];

    pub fn id(&self) -> &'static str {
        match self {
            Family::Ex411 => "EX411",
            Family::Ex412 => "EX412",
            Family::Ex413 => "EX413",
            Family::R56Strict => "R56_strict",
            Family::R56Endpoint => "R56_endpoint",
            Family::T61 => "T61",
            Family::PittType => "PITT_TYPE",
            Family::ZSharp => "Z_SHARP",
            Family::ZLoglog => "Z_LOGLOG",
            Family::BochSharpBEq => "BOCH_SHARP_b_eq",
            Family::BochSharpBGt => "BOCH_SHARP_b_gt",
        }
    }

    /// Default parameters, all inside the family's window for `d = 1`.
    pub fn default_params(&self) -> BTreeMap<String, f64> {
        let pairs: &[(&str, f64)] = match self {
            Family::Ex411 | Family::Ex413 => &[("p", 1.5), ("eps", 0.5)],
            Family::Ex412 => &[("p", 1.2), ("q", 1.9), ("eps", 0.3)],
            Family::R56Strict => &[("p0", 1.2), ("p", 2.5), ("q", 2.5), ("gamma", 0.0), ("eps", 0.3)],
            Family::R56Endpoint => &[("p0", 1.1), ("p", 2.0), ("q", 2.0), ("eta", 0.3)],
            Family::T61 => &[("q0", 3.0), ("alpha", 0.7)],
            Family::PittType => &[("r", 1.1), ("p", 2.0), ("q", 2.0), ("gamma", 0.05)],
            Family::ZSharp => &[("q", 1.0), ("b", -4.0)],
            Family::ZLoglog => &[("q", 2.0)],
            Family::BochSharpBEq => &[("p0", 1.1), ("q", 1.0), ("delta", 0.3)],
            Family::BochSharpBGt => &[("p0", 1.1), ("q", 1.0), ("b", 0.0), ("eps", 0.5)],
        };
        pairs.iter().map(|(k, v)| (k.to_string(), *v)).collect()
    }

    /// Lattice norm used for `|n|` in the construction.
    pub fn index_norm(&self) -> IndexNorm {
        match self {
            Family::T61 | Family::PittType | Family::ZSharp | Family::ZLoglog => IndexNorm::Max,
            _ => IndexNorm::Euclid,
        }
    }
}

impl std::fmt::Display for Family {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.write_str(self.id())
    }
}

impl std::str::FromStr for Family {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        Family::ALL
            .iter()
            .copied()
            .find(|f| f.id().eq_ignore_ascii_case(s))
            .ok_or_else(|| Error::domain(format!("unknown counterexample family `{s}`")))
    }
}

pub fn default_schedule(d: usize) -> Vec<usize> {
    match d {
        1 => (0..6).map(|k| 1usize << (7 + 2 * k)).collect(),
        _ => (2..=7).map(|k| 1usize << k).collect(),
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct CounterexampleSpec {
    pub family: Family,
    pub d: usize,
    pub params: BTreeMap<String, f64>,
    pub schedule: Vec<usize>,
}

fn window(cond: bool, bound: &'static str, detail: impl FnOnce() -> String) -> Result<()> {
    if cond {
        Ok(())
    } else {
        Err(Error::hypothesis(bound, detail()))
    }
}

impl CounterexampleSpec {
    /// Spec with the parameter window enforced.
    pub fn new(family: Family, d: usize, params: BTreeMap<String, f64>, schedule: Vec<usize>) -> Result<Self> {
        let spec = Self::unchecked(family, d, params, schedule)?;
        spec.check_window()?;
        Ok(spec)
    }

    pub fn with_defaults(family: Family, d: usize) -> Result<Self> {
        Self::new(family, d, family.default_params(), default_schedule(d))
    }

    /// Spec whose parameters may lie outside the window (controls).
    pub fn unchecked(family: Family, d: usize, params: BTreeMap<String, f64>, schedule: Vec<usize>) -> Result<Self> {
        if d != 1 && d != 2 {
            return Err(Error::domain(format!("dimension d must be 1 or 2, got {d}")));
        }
        if schedule.is_empty() || schedule.contains(&0) || schedule.windows(2).any(|w| w[0] >= w[1]) {
            return Err(Error::domain(
                "schedule must be a strictly increasing list of positive N",
            ));
        }
        let spec = CounterexampleSpec {
            family,
            d,
            params,
            schedule,
        };
        for key in family.default_params().keys() {
            spec.get(key)?;
        }
        Ok(spec)
    }

    pub fn get(&self, key: &str) -> Result<f64> {
        self.params
            .get(key)
            .copied()
            .filter(|v| v.is_finite())
            .ok_or_else(|| Error::domain(format!("{} needs a finite parameter `{key}`", self.family)))
    }

    fn p(&self, key: &str) -> f64 {
        self.params[key]
    }

    /// `β` from the scaling relation for the Pitt-type families.
    pub fn beta(&self) -> f64 {
        let d = self.d as f64;
        match self.family {
            Family::R56Strict | Family::PittType => self.p("gamma") + d * (1.0 - 1.0 / self.p("p") - 1.0 / self.p("q")),
            Family::R56Endpoint => self.gamma() + d * (1.0 - 1.0 / self.p("p") - 1.0 / self.p("q")),
            _ => 0.0,
        }
    }

    /// `γ`, fixed at the endpoint for `R56_endpoint`.
    pub fn gamma(&self) -> f64 {
        let d = self.d as f64;
        match self.family {
            Family::R56Endpoint => d * (1.0 / self.p("p0") + 1.0 / self.p("q") - 1.0),
            Family::R56Strict | Family::PittType => self.p("gamma"),
            _ => 0.0,
        }
    }

    pub fn check_window(&self) -> Result<()> {
        let d = self.d as f64;
        let g = |k: &str| self.p(k);
        match self.family {
            Family::Ex411 | Family::Ex413 => {
                let (p, e) = (g("p"), g("eps"));
                window(p > 1.0 && p < 2.0, "1 < p < 2", || format!("p={p}"))?;
                window(e > 1.0 / dual_exponent(p), "eps > 1/p'", || format!("eps={e}"))?;
                window(e < 1.0 / p, "eps < 1/p", || format!("eps={e}"))
            }
            Family::Ex412 => {
                let (p, q, e) = (g("p"), g("q"), g("eps"));
                window(p > 1.0 && p < 2.0, "1 < p < 2", || format!("p={p}"))?;
                window(q > p && q <= 2.0, "p < q <= 2", || format!("p={p}, q={q}"))?;
                window(e > d / dual_exponent(p), "eps > d/p'", || format!("eps={e}"))?;
                window(e < d / dual_exponent(q), "eps < d/q'", || format!("eps={e}"))
            }
            Family::R56Strict | Family::R56Endpoint => {
                let (p0, p, q) = (g("p0"), g("p"), g("q"));
                let p0d = dual_exponent(p0);
                window(p0 > 1.0 && p0 < 2.0, "1 < p0 < 2", || format!("p0={p0}"))?;
                window(p > p0 && p < p0d, "p0 < p < p0'", || format!("p={p}, p0={p0}"))?;
                window(q >= p && q < p0d, "p <= q < p0'", || format!("p={p}, q={q}"))?;
                let gamma = self.gamma();
                window(gamma >= 0.0 && self.beta() >= 0.0, "beta, gamma >= 0", || {
                    format!("beta={}, gamma={gamma}", self.beta())
                })?;
                if self.family == Family::R56Strict {
                    let e = g("eps");
                    window(
                        gamma < d * (1.0 / p0 + 1.0 / q - 1.0),
                        "gamma < d(1/p0 + 1/q - 1)",
                        || format!("gamma={gamma}"),
                    )?;
                    window(e > d * (1.0 - 1.0 / p0), "eps > d(1 - 1/p0)", || format!("eps={e}"))?;
                    window(e < d / q - gamma, "eps < d/q - gamma", || format!("eps={e}"))
                } else {
                    let eta = g("eta");
                    window(eta > 1.0 / p0d, "eta > 1/p0'", || format!("eta={eta}"))?;
                    window(eta < 1.0 / q, "eta < 1/q", || format!("eta={eta}"))
                }
            }
            Family::T61 => {
                let (q0, a) = (g("q0"), g("alpha"));
                window(q0 > 2.0, "q0 > 2", || format!("q0={q0}"))?;
                window(a > 1.0 / (q0 - 1.0), "alpha > 1/(q0-1)", || format!("alpha={a}"))?;
                window(a < 1.0, "alpha < 1", || format!("alpha={a}"))
            }
            Family::PittType => {
                let (r, p, q, gamma) = (g("r"), g("p"), g("q"), g("gamma"));
                window(r > 1.0 && r <= 2.0 && r < p, "1 < r <= 2, r < p", || {
                    format!("r={r}, p={p}")
                })?;
                window(p > 1.0 && q >= p, "1 < p <= q", || format!("p={p}, q={q}"))?;
                let lower = (d * (1.0 / p.min(2.0) + 1.0 / q - 1.0)).max(0.0);
                window(gamma > lower && gamma < d / q, "Pitt region interior", || {
                    format!("gamma={gamma} outside ({lower}, {})", d / q)
                })?;
                window(self.beta() < d / r - d / p, "beta < d/r - d/p", || {
                    format!("beta={}", self.beta())
                })
            }
            Family::ZSharp => {
                let (q, b) = (g("q"), g("b"));
                window(q >= 1.0, "q >= 1", || format!("q={q}"))?;
                window(b < -1.0 / q, "b < -1/q", || format!("b={b}"))
            }
            Family::ZLoglog => {
                let q = g("q");
                window(q > 1.0, "1 < q < inf", || format!("q={q}"))
            }
            Family::BochSharpBEq | Family::BochSharpBGt => {
                let (p0, q) = (g("p0"), g("q"));
                let p0d = dual_exponent(p0);
                window(p0 > 1.0 && p0 <= 2.0, "1 < p0 <= 2", || format!("p0={p0}"))?;
                window(q >= 1.0 && q < p0d, "1 <= q < p0'", || format!("q={q}"))?;
                if self.family == Family::BochSharpBEq {
                    let delta = g("delta");
                    window(delta > 1.0 / p0d, "delta > 1/p0'", || format!("delta={delta}"))?;
                    window(delta < 1.0 / q, "delta < 1/q", || format!("delta={delta}"))
                } else {
                    let (b, e) = (g("b"), g("eps"));
                    window(b > -1.0 / q, "b > -1/q", || format!("b={b}"))?;
                    window(e > 1.0 / p0d, "eps > 1/p0'", || format!("eps={e}"))?;
                    window(e < b + 1.0 / q + 1.0 / p0d, "eps < b + 1/q + 1/p0'", || {
                        format!("eps={e}")
                    })
                }
            }
        }
    }

    /// Exponent `r` of the value space `ℓ^r`.
    pub fn value_exponent(&self) -> f64 {
        match self.family {
            Family::Ex411 | Family::Ex412 => dual_exponent(self.p("p")),
            Family::Ex413 => self.p("p"),
            Family::R56Strict | Family::R56Endpoint | Family::BochSharpBEq | Family::BochSharpBGt => {
                dual_exponent(self.p("p0"))
            }
            Family::T61 => dual_exponent(self.p("q0")),
            Family::PittType => self.p("r"),
            Family::ZSharp | Family::ZLoglog => 1.0,
        }
    }

    /// `a_n` as a function of `|n|` (family norm).
    pub fn amplitude(&self, rho: f64) -> f64 {
        let d = self.d as f64;
        let l = 1.0 + rho.ln();
        match self.family {
            Family::Ex411 => rho.powf(-d / dual_exponent(self.p("p"))) * l.powf(-self.p("eps")),
            Family::Ex412 | Family::R56Strict => rho.powf(-self.p("eps")),
            Family::Ex413 => rho.powf(-d / self.p("p")) * l.powf(-self.p("eps")),
            Family::R56Endpoint => rho.powf(-d * (1.0 - 1.0 / self.p("p0"))) * l.powf(-self.p("eta")),
            Family::T61 => {
                let qd = dual_exponent(self.p("q0"));
                (rho + 1.0).powf(-d / qd) * (rho + 1.0).ln().powf(-self.p("alpha") / qd)
            }
            Family::PittType => (rho + 1.0).powf(-d / self.p("r")),
            Family::ZSharp => (rho + 1.0).powf(-d),
            Family::ZLoglog => (rho + 1.0).powf(-d) / l,
            Family::BochSharpBEq => {
                let p0d = dual_exponent(self.p("p0"));
                rho.powf(-d / p0d) * l.powf(-1.0 / p0d) * (1.0 + l.ln()).powf(-self.p("delta"))
            }
            Family::BochSharpBGt => rho.powf(-d / dual_exponent(self.p("p0"))) * l.powf(-self.p("eps")),
        }
    }

    /// Diagonal counterexample at truncation `n`.
    pub fn build(&self, n: usize) -> Result<Counterexample> {
        if n == 0 {
            return Err(Error::domain("truncation N must be >= 1"));
        }
        let norm = self.family.index_norm();
        let support: Vec<(MultiIndex, f64)> = MultiIndex::boxed(self.d, n)
            .into_iter()
            .map(|m| (m, m.norm(norm)))
            .filter(|&(_, rho)| rho >= 1.0 && rho <= n as f64)
            .collect();
        let amplitudes = support.iter().map(|&(_, rho)| self.amplitude(rho)).collect();
        Ok(Counterexample {
            spec: self.clone(),
            n,
            support,
            amplitudes,
        })
    }

    /// Expected growth of the divergent side.
    pub fn expectation(&self) -> Expectation {
        let d = self.d as f64;
        let g = |k: &str| self.p(k);
        let (model, exponent, regressor, power, derivation) = match self.family {
            Family::Ex411 | Family::Ex413 => {
                let (p, e) = (g("p"), g("eps"));
                (
                    GrowthModel::LogPower,
                    (1.0 - e * p) / p,
                    Regressor::OnePlusLog,
                    p,
                    "Σ (1+log|n|)^{-εp} |n|^{-d} over the shell, integral comparison",
                )
            }
            Family::Ex412 => {
                let q = dual_exponent(g("q"));
                (
                    GrowthModel::Power,
                    d / q - g("eps"),
                    Regressor::N,
                    q,
                    "Σ |n|^{-εq'} over the ball grows like N^{d - εq'}",
                )
            }
            Family::R56Strict => {
                let q = g("q");
                (
                    GrowthModel::Power,
                    d / q - self.gamma() - g("eps"),
                    Regressor::N,
                    q,
                    "Σ |n|^{-(γ+ε)q} over the ball grows like N^{d - (γ+ε)q}",
                )
            }
            Family::R56Endpoint => {
                let q = g("q");
                (
                    GrowthModel::LogPower,
                    1.0 / q - g("eta"),
                    Regressor::OnePlusLog,
                    q,
                    "Σ (1+log|n|)^{-ηq} |n|^{-d}, integral comparison",
                )
            }
            Family::T61 => {
                let qd = dual_exponent(g("q0"));
                (
                    GrowthModel::LogPower,
                    (1.0 - g("alpha")) / qd,
                    Regressor::LogNPlusOne,
                    qd,
                    "lhs^{q0'} ≍ log(N+1)^{1-α}; rhs converges",
                )
            }
            Family::PittType => {
                let r = g("r");
                (
                    GrowthModel::LogPower,
                    1.0 / r,
                    Regressor::LogNPlusOne,
                    r,
                    "K_N^r = Σ (|n|+1)^{-d} ≍ log(N+1)",
                )
            }
            Family::ZSharp => (
                GrowthModel::LogPower,
                1.0,
                Regressor::LogNPlusOne,
                1.0,
                "‖f(t)‖ = Σ (|n|+1)^{-d} ≍ log(N+1)",
            ),
            Family::ZLoglog => (
                GrowthModel::LoglogPower,
                1.0,
                Regressor::OnePlusLoglog,
                1.0,
                "‖f(t)‖ = Σ (1+|n|)^{-d}(1+log|n|)^{-1} ≍ log(1+log N)",
            ),
            Family::BochSharpBEq => {
                let q = g("q");
                (
                    GrowthModel::LoglogPower,
                    (1.0 - g("delta") * q) / q,
                    Regressor::OnePlusLoglogSupport,
                    q,
                    "Σ_k (1+log(1+log k))^{-δq} / (k(1+log k)) over the support",
                )
            }
            Family::BochSharpBGt => {
                let (q, p0d) = (g("q"), dual_exponent(g("p0")));
                let b_eff = g("b") + 1.0 / p0d.max(q);
                (
                    GrowthModel::LogPower,
                    b_eff - g("eps") + 1.0 / q,
                    Regressor::OnePlusLogSupport,
                    q,
                    "Σ_k (1+log k)^{(b+1/max{p0',q}-ε)q} / k over the support",
                )
            }
        };
        let divergent = if self.family == Family::T61 {
            Side::Ratio
        } else {
            Side::Lhs
        };
        let rhs = match self.family {
            Family::ZLoglog => RhsBehaviour::Slower,
            _ => RhsBehaviour::Converges,
        };
        Expectation {
            model,
            exponent,
            regressor,
            power,
            divergent,
            rhs,
            derivation: derivation.to_string(),
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Side {
    Lhs,
    Rhs,
    Ratio,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum GrowthModel {
    Bounded,
    LogPower,
    LoglogPower,
    Power,
}

/// Abscissa against which a family's growth is measured.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Regressor {
    N,
    /// `1 + ln N`.
    OnePlusLog,
    /// `ln(N + 1)`.
    LogNPlusOne,
    /// `1 + ln(1 + ln N)`.
    OnePlusLoglog,
    /// `1 + ln K` with `K` the support size.
    OnePlusLogSupport,
    /// `1 + ln(1 + ln K)` with `K` the support size.
    OnePlusLoglogSupport,
}

impl Regressor {
    pub fn eval(&self, n: usize, support: usize) -> f64 {
        let (n, k) = (n as f64, support as f64);
        match self {
            Regressor::N => n,
            Regressor::OnePlusLog => 1.0 + n.ln(),
            Regressor::LogNPlusOne => n.ln_1p(),
            Regressor::OnePlusLoglog => 1.0 + n.ln().ln_1p(),
            Regressor::OnePlusLogSupport => 1.0 + k.ln(),
            Regressor::OnePlusLoglogSupport => 1.0 + k.ln().ln_1p(),
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum RhsBehaviour {
    Converges,
    /// Grows, but strictly slower than the divergent side.
    Slower,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Expectation {
    pub model: GrowthModel,
    pub exponent: f64,
    pub regressor: Regressor,
    /// Outer exponent of the divergent norm; the fit runs on `value^power`.
    pub power: f64,
    pub divergent: Side,
    pub rhs: RhsBehaviour,
    pub derivation: String,
}

/// A truncated counterexample in diagonal form.
#[derive(Debug, Clone, PartialEq)]
pub struct Counterexample {
    spec: CounterexampleSpec,
    n: usize,
    support: Vec<(MultiIndex, f64)>,
    amplitudes: Vec<f64>,
}

/// Both sides of the family's inequality at one truncation.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct SideValues {
    pub lhs: f64,
    pub rhs: f64,
}

impl SideValues {
    pub fn get(&self, side: Side) -> f64 {
        match side {
            Side::Lhs => self.lhs,
            Side::Rhs => self.rhs,
            Side::Ratio => self.lhs / self.rhs,
        }
    }
}

/// `∫_{[-1/2,1/2]^d} |t|^c dt`.
fn weight_mass(d: usize, c: f64, cfg: &QuadConfig) -> Result<f64> {
    if c == 0.0 {
        return Ok(1.0);
    }
    if d == 1 {
        return Ok(2.0 * 0.5f64.powf(c + 1.0) / (c + 1.0));
    }
    let mut one = TrigPolynomial::zero(d, 0, ValueSpace::scalar())?;
    one.set(MultiIndex::two(0, 0), ValuePoint::from_real(&[1.0]))?;
    weighted_lp_norm_torus(&one, 1.0, c, 1, cfg)
}

/// LZ norm of the constant 1 on `(0, 1)`.
fn unit_lz(params: &LzParams, cfg: &QuadConfig) -> Result<f64> {
    let one = RearrangementCurve::constant(1.0, 1.0, 1.0)?;
    lz_norm_function(&one, params, cfg)?
        .finite()
        .ok_or_else(|| Error::domain("the function-side norm of a constant diverges"))
}

impl Counterexample {
    pub fn spec(&self) -> &CounterexampleSpec {
        &self.spec
    }

    pub fn truncation(&self) -> usize {
        self.n
    }

    /// `(n, a_n)` in lexicographic order of `n`.
    pub fn coefficients(&self) -> impl Iterator<Item = (MultiIndex, f64)> + '_ {
        self.support.iter().map(|s| s.0).zip(self.amplitudes.iter().copied())
    }

    pub fn support_size(&self) -> usize {
        self.support.len()
    }

    pub fn value_space(&self) -> Result<ValueSpace> {
        ValueSpace::new(self.spec.value_exponent(), self.support.len().max(1))
    }

    /// Dense polynomial with `ĉ(n) = a_n e_{slot(n)}`.
    pub fn materialize(&self) -> Result<TrigPolynomial> {
        let space = self.value_space()?;
        let mut f = TrigPolynomial::zero(self.spec.d, self.n, space)?;
        for (slot, (m, a)) in self.coefficients().enumerate() {
            f.set(m, space.basis(slot).scaled(num_complex::Complex64::new(a, 0.0)))?;
        }
        Ok(f)
    }

    fn weighted(&self, p: f64, w: f64) -> f64 {
        let pairs: Vec<(MultiIndex, f64)> = self.coefficients().collect();
        weighted_lp_norm_sequence(&pairs, p, w, self.spec.family.index_norm())
    }

    /// Both sides via the scalar reduction.
    pub fn sides(&self, cfg: &QuadConfig) -> Result<SideValues> {
        let s = &self.spec;
        let d = s.d as f64;
        let a = &self.amplitudes;
        let norm_r = lr_norm_real(a.iter().copied(), s.value_exponent());
        let g = |k: &str| s.p(k);
        let (lhs, rhs) = match s.family {
            Family::Ex411 => {
                let p = g("p");
                (self.weighted(p, -d * (2.0 - p) / p), norm_r)
            }
            Family::Ex412 => {
                let qd = dual_exponent(g("q"));
                let mass = weight_mass(s.d, d * (qd - 2.0), cfg)?;
                (lr_norm_real(a.iter().copied(), qd), norm_r * mass.powf(1.0 / qd))
            }
            Family::Ex413 => {
                let pd = dual_exponent(g("p"));
                (norm_r, self.weighted(pd, d * (pd - 2.0) / pd))
            }
            Family::R56Strict | Family::R56Endpoint => {
                let (p, q) = (g("p"), g("q"));
                let mass = weight_mass(s.d, s.beta() * p, cfg)?;
                (self.weighted(q, -s.gamma()), norm_r * mass.powf(1.0 / p))
            }
            Family::T61 => {
                let q0 = g("q0");
                (norm_r, self.weighted(q0, d * (q0 - 2.0) / q0))
            }
            Family::PittType => {
                let (p, q) = (g("p"), g("q"));
                let mass = weight_mass(s.d, -s.gamma() * q, cfg)?;
                (norm_r * mass.powf(1.0 / q), self.weighted(p, s.beta()))
            }
            Family::ZSharp => {
                let (q, b) = (g("q"), g("b"));
                let lhs = norm_r * unit_lz(&LzParams::new(f64::INFINITY, q, b), cfg)?;
                (lhs, lz_norm_lattice(a, &LzParams::new(1.0, q, b + 1.0))?)
            }
            Family::ZLoglog => {
                let q = g("q");
                let qd = dual_exponent(q);
                let outer = LzParams::new(f64::INFINITY, qd, 1.0 / q - 1.0).with_loglog(-1.0);
                (
                    norm_r * unit_lz(&outer, cfg)?,
                    lz_norm_lattice(a, &LzParams::new(1.0, qd, 1.0 / q))?,
                )
            }
            Family::BochSharpBEq | Family::BochSharpBGt => {
                let (p0, q) = (g("p0"), g("q"));
                let p0d = dual_exponent(p0);
                let b = if s.family == Family::BochSharpBEq {
                    -1.0 / q
                } else {
                    g("b")
                };
                let seq = LzParams::new(p0d, q, b + 1.0 / p0d.max(q));
                let func = LzParams::new(p0, q, b + 1.0 / p0.min(q));
                (lz_norm_lattice(a, &seq)?, norm_r * unit_lz(&func, cfg)?)
            }
        };
        Ok(SideValues { lhs, rhs })
    }

    /// Both sides through the generic evaluators on the materialized polynomial.
    pub fn sides_generic(&self, cfg: &QuadConfig) -> Result<SideValues> {
        let s = &self.spec;
        let d = s.d as f64;
        let f = self.materialize()?;
        let norm = s.family.index_norm();
        let coeffs = f.coefficient_norms();
        let plain: Vec<f64> = coeffs.iter().map(|c| c.1).collect();
        let m = default_grid(f.degree(), f.d(), cfg);
        let g = |k: &str| s.p(k);
        let torus = |p: f64, w: f64| weighted_lp_norm_torus(&f, p, w, m, cfg);
        let lz = |params: LzParams| -> Result<f64> {
            let curve = torus_rearrangement(&f, m)?;
            Ok(lz_norm_function(&curve, &params, cfg)?.value())
        };
        let (lhs, rhs) = match s.family {
            Family::Ex411 => {
                let p = g("p");
                (
                    weighted_lp_norm_sequence(&coeffs, p, -d * (2.0 - p) / p, norm),
                    torus(p, 0.0)?,
                )
            }
            Family::Ex412 => {
                let qd = dual_exponent(g("q"));
                (lr_norm_real(plain.iter().copied(), qd), torus(qd, d * (qd - 2.0) / qd)?)
            }
            Family::Ex413 => {
                let pd = dual_exponent(g("p"));
                (
                    torus(pd, 0.0)?,
                    weighted_lp_norm_sequence(&coeffs, pd, d * (pd - 2.0) / pd, norm),
                )
            }
            Family::R56Strict | Family::R56Endpoint => (
                weighted_lp_norm_sequence(&coeffs, g("q"), -s.gamma(), norm),
                torus(g("p"), s.beta())?,
            ),
            Family::T61 => {
                let q0 = g("q0");
                (
                    torus(q0, 0.0)?,
                    weighted_lp_norm_sequence(&coeffs, q0, d * (q0 - 2.0) / q0, norm),
                )
            }
            Family::PittType => (
                torus(g("q"), -s.gamma())?,
                weighted_lp_norm_sequence(&coeffs, g("p"), s.beta(), norm),
            ),
            Family::ZSharp => {
                let (q, b) = (g("q"), g("b"));
                (
                    lz(LzParams::new(f64::INFINITY, q, b))?,
                    lz_norm_lattice(&plain, &LzParams::new(1.0, q, b + 1.0))?,
                )
            }
            Family::ZLoglog => {
                let q = g("q");
                let qd = dual_exponent(q);
                (
                    lz(LzParams::new(f64::INFINITY, qd, 1.0 / q - 1.0).with_loglog(-1.0))?,
                    lz_norm_lattice(&plain, &LzParams::new(1.0, qd, 1.0 / q))?,
                )
            }
            Family::BochSharpBEq | Family::BochSharpBGt => {
                let (p0, q) = (g("p0"), g("q"));
                let p0d = dual_exponent(p0);
                let b = if s.family == Family::BochSharpBEq {
                    -1.0 / q
                } else {
                    g("b")
                };
                (
                    lz_norm_lattice(&plain, &LzParams::new(p0d, q, b + 1.0 / p0d.max(q)))?,
                    lz(LzParams::new(p0, q, b + 1.0 / p0.min(q)))?,
                )
            }
        };
        Ok(SideValues { lhs, rhs })
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct SeriesPoint {
    pub n: usize,
    pub support: usize,
    pub lhs: f64,
    pub rhs: f64,
}

/// Both sides along the schedule; schedule points run in parallel, results
/// keep schedule order.
pub fn growth_series(spec: &CounterexampleSpec, cfg: &QuadConfig) -> Result<Vec<SeriesPoint>> {
    if spec.schedule.len() < 4 {
        return Err(Error::domain("growth series need at least 4 schedule points"));
    }
    spec.schedule
        .par_iter()
        .map(|&n| {
            let ce = spec.build(n)?;
            let v = ce.sides(cfg)?;
            Ok(SeriesPoint {
                n,
                support: ce.support_size(),
                lhs: v.lhs,
                rhs: v.rhs,
            })
        })
        .collect()
}

pub fn side_values(series: &[SeriesPoint], side: Side) -> Vec<(usize, f64)> {
    series
        .iter()
        .map(|p| (p.n, SideValues { lhs: p.lhs, rhs: p.rhs }.get(side)))
        .collect()
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct GrowthFit {
    pub model: GrowthModel,
    pub exponent: f64,
    pub r_squared: f64,
}

/// Relative spread `(max - min)/max` over the top half of a series.
pub fn top_half_spread(values: &[f64]) -> f64 {
    let top = &values[values.len() / 2..];
    let hi = top.iter().copied().fold(f64::NEG_INFINITY, f64::max);
    let lo = top.iter().copied().fold(f64::INFINITY, f64::min);
    (hi - lo) / hi
}

pub const BOUNDED_SPREAD: f64 = 0.02;
pub const MIN_R_SQUARED: f64 = 0.9;
pub const EXPONENT_TOL: f64 = 0.15;

/// `(slope, r²)` of the least-squares line through `(x, y)`.
fn linear_fit(x: &[f64], y: &[f64]) -> (f64, f64) {
    let n = x.len() as f64;
    let mx = x.iter().sum::<f64>() / n;
    let my = y.iter().sum::<f64>() / n;
    let sxy: f64 = x.iter().zip(y).map(|(a, b)| (a - mx) * (b - my)).sum();
    let sxx: f64 = x.iter().map(|a| (a - mx).powi(2)).sum();
    let syy: f64 = y.iter().map(|b| (b - my).powi(2)).sum();
    if sxx == 0.0 {
        return (0.0, 0.0);
    }
    let r2 = if syy == 0.0 { 1.0 } else { sxy * sxy / (sxx * syy) };
    (sxy / sxx, r2)
}

/// Max-`r²` choice among `N^s`, `(ln N)^s`, `(ln ln N)^s` on log-log axes.
pub fn fit_growth(series: &[(usize, f64)]) -> Result<GrowthFit> {
    if series.len() < 4 {
        return Err(Error::domain("growth fits need at least 4 points"));
    }
    if let Some(bad) = series.iter().find(|p| !(p.1 > 0.0) || !p.1.is_finite()) {
        return Err(Error::domain(format!(
            "growth fits need positive values, got {}",
            bad.1
        )));
    }
    if series.iter().any(|p| p.0 < 3) {
        return Err(Error::domain("growth fits need N >= 3 so that ln ln N > 0"));
    }
    let values: Vec<f64> = series.iter().map(|p| p.1).collect();
    if top_half_spread(&values) < BOUNDED_SPREAD {
        return Ok(GrowthFit {
            model: GrowthModel::Bounded,
            exponent: 0.0,
            r_squared: 1.0,
        });
    }
    let y: Vec<f64> = values.iter().map(|v| v.ln()).collect();
    let axes = [
        (
            GrowthModel::Power,
            series.iter().map(|p| (p.0 as f64).ln()).collect::<Vec<_>>(),
        ),
        (
            GrowthModel::LogPower,
            series.iter().map(|p| (p.0 as f64).ln().ln()).collect(),
        ),
        (
            GrowthModel::LoglogPower,
            series.iter().map(|p| (p.0 as f64).ln().ln().ln()).collect(),
        ),
    ];
    let mut best: Option<GrowthFit> = None;
    for (model, x) in axes {
        let (slope, r2) = linear_fit(&x, &y);
        if best.is_none_or(|b| r2 > b.r_squared) {
            best = Some(GrowthFit {
                model,
                exponent: slope,
                r_squared: r2,
            });
        }
    }
    Ok(best.expect("three candidate models"))
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct OffsetFit {
    /// `s` in `value^power ≈ C + A x^{s·power}`.
    pub exponent: f64,
    pub r_squared: f64,
    pub offset: f64,
    pub scale: f64,
}

fn offset_residual(x: &[f64], s: &[f64], e: f64) -> (f64, f64, f64) {
    let xe: Vec<f64> = x.iter().map(|v| v.powf(e)).collect();
    let n = x.len() as f64;
    let mx = xe.iter().sum::<f64>() / n;
    let ms = s.iter().sum::<f64>() / n;
    let sxy: f64 = xe.iter().zip(s).map(|(a, b)| (a - mx) * (b - ms)).sum();
    let sxx: f64 = xe.iter().map(|a| (a - mx).powi(2)).sum();
    let a = if sxx > 0.0 { sxy / sxx } else { 0.0 };
    let c = ms - a * mx;
    let ssr: f64 = xe.iter().zip(s).map(|(xv, sv)| (sv - c - a * xv).powi(2)).sum();
    (ssr, a, c)
}

const OFFSET_GRID_STEP: f64 = 0.005;
const OFFSET_GRID_MAX: f64 = 6.0;

/// Fits `value^power = C + A x^{e}` by scanning `e` and refining with a
/// golden-section search; reports `s = e / power`.
pub fn fit_offset_model(x: &[f64], values: &[f64], power: f64) -> Result<OffsetFit> {
    if x.len() != values.len() || x.len() < 4 {
        return Err(Error::domain("offset fits need at least 4 paired points"));
    }
    if !(power > 0.0) || x.iter().any(|v| !(*v > 0.0)) || values.iter().any(|v| !(*v >= 0.0)) {
        return Err(Error::domain(
            "offset fits need positive abscissae, power and nonnegative values",
        ));
    }
    let s: Vec<f64> = values.iter().map(|v| v.powf(power)).collect();
    let ms = s.iter().sum::<f64>() / s.len() as f64;
    let sst: f64 = s.iter().map(|v| (v - ms).powi(2)).sum();
    if sst == 0.0 {
        return Ok(OffsetFit {
            exponent: 0.0,
            r_squared: 1.0,
            offset: ms,
            scale: 0.0,
        });
    }
    let steps = (OFFSET_GRID_MAX / OFFSET_GRID_STEP) as usize;
    let mut best = (f64::INFINITY, OFFSET_GRID_STEP);
    for i in 1..=steps {
        let e = i as f64 * OFFSET_GRID_STEP;
        let (ssr, _, _) = offset_residual(x, &s, e);
        if ssr < best.0 {
            best = (ssr, e);
        }
    }
    let (mut lo, mut hi) = ((best.1 - OFFSET_GRID_STEP).max(1e-6), best.1 + OFFSET_GRID_STEP);
    let phi = 0.5 * (5f64.sqrt() - 1.0);
    for _ in 0..60 {
        let a = hi - phi * (hi - lo);
        let b = lo + phi * (hi - lo);
        if offset_residual(x, &s, a).0 < offset_residual(x, &s, b).0 {
            hi = b;
        } else {
            lo = a;
        }
    }
    let e = 0.5 * (lo + hi);
    let (ssr, scale, offset) = offset_residual(x, &s, e);
    let (ssr, e, scale, offset) = if ssr <= best.0 {
        (ssr, e, scale, offset)
    } else {
        let (r, a, c) = offset_residual(x, &s, best.1);
        (r, best.1, a, c)
    };
    Ok(OffsetFit {
        exponent: e / power,
        r_squared: (1.0 - ssr / sst).max(0.0),
        offset,
        scale,
    })
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Verdict {
    Sharp,
    NotDetected,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SharpnessReport {
    pub spec: CounterexampleSpec,
    pub expectation: Expectation,
    pub series: Vec<SeriesPoint>,
    /// Expected-model fit of the divergent side.
    pub fit: OffsetFit,
    /// Generic model selection on the divergent side.
    pub generic_fit: GrowthFit,
    /// Generic model selection on the right-hand side.
    pub rhs_fit: GrowthFit,
    /// Expected-model fit of the right-hand side on the same axis.
    pub rhs_offset_fit: OffsetFit,
    /// `|v_last - v_prev| / v_last` for the right-hand side.
    pub rhs_increment: f64,
    pub relative_error: f64,
    pub verdict: Verdict,
}

/// Sweeps the schedule and decides whether the divergence predicted for the
/// family is observed.
pub fn sharpness_verdict(spec: &CounterexampleSpec, cfg: &QuadConfig) -> Result<SharpnessReport> {
    let expectation = spec.expectation();
    let series = growth_series(spec, cfg)?;
    let x: Vec<f64> = series
        .iter()
        .map(|p| expectation.regressor.eval(p.n, p.support))
        .collect();
    let div = side_values(&series, expectation.divergent);
    let rhs = side_values(&series, Side::Rhs);
    let div_values: Vec<f64> = div.iter().map(|p| p.1).collect();
    let rhs_values: Vec<f64> = rhs.iter().map(|p| p.1).collect();
    let fit = fit_offset_model(&x, &div_values, expectation.power)?;
    let generic_fit = fit_growth(&div)?;
    let rhs_fit = fit_growth(&rhs)?;
    let rhs_power = match spec.family {
        Family::ZLoglog => 1.0,
        _ => expectation.power,
    };
    let rhs_offset_fit = fit_offset_model(&x, &rhs_values, rhs_power)?;
    let k = rhs_values.len();
    let rhs_increment = (rhs_values[k - 1] - rhs_values[k - 2]).abs() / rhs_values[k - 1];
    let relative_error = if expectation.exponent != 0.0 {
        (fit.exponent / expectation.exponent - 1.0).abs()
    } else {
        f64::INFINITY
    };
    let rhs_bounded = rhs_fit.model == GrowthModel::Bounded;
    let rhs_ok = match expectation.rhs {
        RhsBehaviour::Converges => rhs_bounded,
        RhsBehaviour::Slower => rhs_bounded || rhs_offset_fit.exponent < fit.exponent,
    };
    let sharp = expectation.exponent > 0.0
        && generic_fit.model != GrowthModel::Bounded
        && relative_error <= EXPONENT_TOL
        && fit.r_squared >= MIN_R_SQUARED
        && rhs_ok;
    Ok(SharpnessReport {
        spec: spec.clone(),
        expectation,
        series,
        fit,
        generic_fit,
        rhs_fit,
        rhs_offset_fit,
        rhs_increment,
        relative_error,
        verdict: if sharp { Verdict::Sharp } else { Verdict::NotDetected },
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    fn cfg() -> QuadConfig {
        QuadConfig::default()
    }

    #[test]
    fn ex411_coefficients() {
        let spec = CounterexampleSpec::with_defaults(Family::Ex411, 1).unwrap();
        let ce = spec.build(10).unwrap();
        assert_eq!(ce.support_size(), 20);
        for (m, a) in ce.coefficients() {
            let n = m.k[0].unsigned_abs() as f64;
            let expect = n.powf(-1.0 / 3.0) * (1.0 + n.ln()).powf(-0.5);
            assert!((a - expect).abs() < 1e-15);
        }
    }

    #[test]
    fn t61_spot_value_and_shell() {
        let spec = CounterexampleSpec::with_defaults(Family::T61, 1).unwrap();
        let ce = spec.build(4).unwrap();
        assert_eq!(ce.support_size(), 8);
        let a1 = ce.coefficients().find(|(m, _)| m.k[0] == 1).unwrap().1;
        let expect = 2f64.powf(-2.0 / 3.0) * 2f64.ln().powf(-0.7 / 1.5);
        assert!((a1 - expect).abs() < 1e-15);
        let spec2 = CounterexampleSpec::with_defaults(Family::T61, 2).unwrap();
        assert_eq!(spec2.build(3).unwrap().support_size(), 7 * 7 - 1);
    }

    #[test]
    fn windows_are_enforced() {
        let mut params = Family::Ex411.default_params();
        params.insert("eps".into(), 0.9);
        match CounterexampleSpec::new(Family::Ex411, 1, params.clone(), default_schedule(1)) {
            Err(Error::Hypothesis { condition, .. }) => assert_eq!(condition, "eps < 1/p"),
            other => panic!("{other:?}"),
        }
        assert!(CounterexampleSpec::unchecked(Family::Ex411, 1, params, default_schedule(1)).is_ok());
        for fam in Family::ALL {
            CounterexampleSpec::with_defaults(fam, 1).unwrap_or_else(|e| panic!("{fam}: {e}"));
        }
    }

    #[test]
    fn single_shell_is_finite() {
        for fam in Family::ALL {
            let spec = CounterexampleSpec::with_defaults(fam, 1).unwrap();
            let v = spec.build(1).unwrap().sides(&cfg()).unwrap();
            assert!(
                v.lhs.is_finite() && v.rhs.is_finite() && v.lhs > 0.0 && v.rhs > 0.0,
                "{fam}"
            );
        }
    }

    #[test]
    fn reduction_matches_generic_path() {
        for fam in Family::ALL {
            let spec = CounterexampleSpec::with_defaults(fam, 1).unwrap();
            let ce = spec.build(6).unwrap();
            let fast = ce.sides(&cfg()).unwrap();
            let slow = ce.sides_generic(&cfg()).unwrap();
            assert!(
                (fast.lhs - slow.lhs).abs() < 1e-8 * fast.lhs,
                "{fam} lhs {fast:?} {slow:?}"
            );
            assert!(
                (fast.rhs - slow.rhs).abs() < 1e-8 * fast.rhs,
                "{fam} rhs {fast:?} {slow:?}"
            );
        }
    }

    #[test]
    fn fit_growth_synthetic() {
        let ns: Vec<usize> = default_schedule(1);
        let constant: Vec<(usize, f64)> = ns.iter().map(|&n| (n, 5.0)).collect();
        let f = fit_growth(&constant).unwrap();
        assert_eq!((f.model, f.exponent, f.r_squared), (GrowthModel::Bounded, 0.0, 1.0));
        let lp: Vec<(usize, f64)> = ns.iter().map(|&n| (n, (n as f64).ln().powf(0.25))).collect();
        let f = fit_growth(&lp).unwrap();
        assert_eq!(f.model, GrowthModel::LogPower);
        assert!((f.exponent - 0.25).abs() < 0.02 && f.r_squared >= 0.99);
        let ll: Vec<(usize, f64)> = ns.iter().map(|&n| (n, (n as f64).ln().ln())).collect();
        let f = fit_growth(&ll).unwrap();
        assert_eq!(f.model, GrowthModel::LoglogPower);
        assert!((f.exponent - 1.0).abs() < 0.1 && f.r_squared >= 0.95);
        assert!(fit_growth(&[(4, 1.0), (8, 0.0), (16, 1.0), (32, 1.0)]).is_err());
    }

    #[test]
    fn offset_fit_recovers_exponent() {
        let x: Vec<f64> = (1..=6).map(|k| 1.0 + k as f64 * 2.0).collect();
        let v: Vec<f64> = x
            .iter()
            .map(|t: &f64| (3.0 + 2.0 * t.powf(0.6)).powf(1.0 / 1.5))
            .collect();
        let f = fit_offset_model(&x, &v, 1.5).unwrap();
        assert!((f.exponent - 0.4).abs() < 1e-6, "{f:?}");
        assert!(f.r_squared > 0.999999);
        assert!((f.offset - 3.0).abs() < 1e-4);
    }

    #[test]
    fn loglog_unit_constant_is_one() {
        let params = LzParams::new(f64::INFINITY, 2.0, -0.5).with_loglog(-1.0);
        let v = unit_lz(&params, &cfg()).unwrap();
        assert!((v - 1.0).abs() < 1e-6, "{v}");
    }

    #[test]
    fn boch_amplitude_spot_value() {
        let spec = CounterexampleSpec::with_defaults(Family::BochSharpBEq, 1).unwrap();
        let e = std::f64::consts::E;
        let l: f64 = 2.0;
        let expect = e.powf(-1.0 / 11.0) * l.powf(-1.0 / 11.0) * (1.0 + l.ln()).powf(-0.3);
        assert!((spec.amplitude(e) - expect).abs() < 1e-15);
    }

    #[test]
    fn out_of_window_control_is_not_detected() {
        let mut params = Family::Ex411.default_params();
        params.insert("eps".into(), 1.2);
        let spec = CounterexampleSpec::unchecked(Family::Ex411, 1, params, default_schedule(1)).unwrap();
        let r = sharpness_verdict(&spec, &cfg()).unwrap();
        assert_eq!(r.verdict, Verdict::NotDetected);
    }

    #[test]
    fn series_are_deterministic() {
        let spec = CounterexampleSpec::new(Family::T61, 1, Family::T61.default_params(), vec![8, 16, 32, 64]).unwrap();
        let a = growth_series(&spec, &cfg()).unwrap();
        let b = growth_series(&spec, &cfg()).unwrap();
        assert_eq!(a, b);
        assert_eq!(a.iter().map(|p| p.n).collect::<Vec<_>>(), vec![8, 16, 32, 64]);
    }
}
