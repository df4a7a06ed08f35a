//! Region classification for vector-valued Pitt inequalities and numeric
//! evaluators for both sides of the Fourier inequalities studied here.
//!
//! Evaluators report the two sides and their ratio; whether a ratio stays
//! bounded along a family is decided by [`crate::sharpness`].

use serde::{Deserialize, Serialize};

use crate::fourier::{IndexNorm, StepFunction, TrigPolynomial};
use crate::quad::{self, Estimate, QuadConfig};
use crate::rearrange::{
    lz_norm_function, lz_norm_lattice, torus_rearrangement, weighted_lp_norm_sequence, weighted_lp_norm_torus, LzParams,
};
use crate::values::{dual_exponent, TypeKind};
use crate::{Error, Result};

/// Absolute tolerance for endpoint membership and the scaling relation.
pub const ENDPOINT_TOL: f64 = 1e-12;

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct PittParams {
    pub d: usize,
    pub p: f64,
    pub q: f64,
    pub beta: f64,
    pub gamma: f64,
    /// Fourier type of the value space.
    pub p0: f64,
}

impl PittParams {
    pub fn new(d: usize, p: f64, q: f64, beta: f64, gamma: f64, p0: f64) -> Self {
        PittParams {
            d,
            p,
            q,
            beta,
            gamma,
            p0,
        }
    }

    /// Parameters with `β` fixed by the scaling relation.
    pub fn on_scaling_line(d: usize, p: f64, q: f64, gamma: f64, p0: f64) -> Self {
        let beta = gamma + d as f64 * (1.0 - 1.0 / p - 1.0 / q);
        PittParams {
            d,
            p,
            q,
            beta,
            gamma,
            p0,
        }
    }

    pub fn validate(&self) -> Result<()> {
        let open = |x: f64| x > 1.0 && x.is_finite();
        if self.d == 0 {
            return Err(Error::domain("dimension d must be >= 1"));
        }
        if !open(self.p) || !open(self.q) {
            return Err(Error::domain(format!(
                "need 1 < p, q < inf, got p={}, q={}",
                self.p, self.q
            )));
        }
        if !(self.p0 > 1.0 && self.p0 <= 2.0) {
            return Err(Error::domain(format!(
                "Fourier type p0 must lie in (1, 2], got {}",
                self.p0
            )));
        }
        if !(self.beta >= 0.0 && self.gamma >= 0.0) || !self.beta.is_finite() || !self.gamma.is_finite() {
            return Err(Error::domain(format!(
                "weights need beta, gamma >= 0, got beta={}, gamma={}",
                self.beta, self.gamma
            )));
        }
        Ok(())
    }

    /// `d(1 - 1/p - 1/q) - (β - γ)`.
    pub fn scaling_defect(&self) -> f64 {
        self.d as f64 * (1.0 - 1.0 / self.p - 1.0 / self.q) - (self.beta - self.gamma)
    }

    /// `max{0, d(1/min{p,p₀} + 1/q - 1)}`.
    pub fn lower_endpoint(&self) -> f64 {
        (self.d as f64 * (1.0 / self.p.min(self.p0) + 1.0 / self.q - 1.0)).max(0.0)
    }

    /// `d/q`.
    pub fn upper_endpoint(&self) -> f64 {
        self.d as f64 / self.q
    }

    /// `(p, q, β, γ) → (q', p', γ, β)`.
    pub fn dual(&self) -> PittParams {
        PittParams {
            d: self.d,
            p: dual_exponent(self.q),
            q: dual_exponent(self.p),
            beta: self.gamma,
            gamma: self.beta,
            p0: self.p0,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum EndpointCase {
    /// `p = q` away from `[p₀, p₀']`, `p₀ ≠ 2`.
    I,
    /// `p = q`, `p₀ = 2`.
    Ii,
    /// `p < q`, `p ∈ (1, p₀] ∪ [p₀', ∞)`.
    Iii,
    /// `p < q`, `p ∈ (p₀, p₀')`, `q ≥ p₀'`.
    Iv,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "snake_case", tag = "kind", content = "case")]
pub enum RegionVerdict {
    Interior,
    EndpointHolds(EndpointCase),
    EndpointFails,
    OutsideRegion,
    ScalingViolated,
}

impl RegionVerdict {
    /// Stable name used in CSV output.
    pub fn as_str(&self) -> &'static str {
        match self {
            RegionVerdict::Interior => "interior",
            RegionVerdict::EndpointHolds(EndpointCase::I) => "endpoint_i",
            RegionVerdict::EndpointHolds(EndpointCase::Ii) => "endpoint_ii",
            RegionVerdict::EndpointHolds(EndpointCase::Iii) => "endpoint_iii",
            RegionVerdict::EndpointHolds(EndpointCase::Iv) => "endpoint_iv",
            RegionVerdict::EndpointFails => "endpoint_fails",
            RegionVerdict::OutsideRegion => "outside",
            RegionVerdict::ScalingViolated => "scaling_violated",
        }
    }

    /// Whether the inequality holds for every space of the given Fourier type.
    pub fn holds(&self) -> bool {
        matches!(self, RegionVerdict::Interior | RegionVerdict::EndpointHolds(_))
    }
}

impl std::fmt::Display for RegionVerdict {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.write_str(self.as_str())
    }
}

impl std::str::FromStr for RegionVerdict {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        Ok(match s {
            "interior" => RegionVerdict::Interior,
            "endpoint_i" => RegionVerdict::EndpointHolds(EndpointCase::I),
            "endpoint_ii" => RegionVerdict::EndpointHolds(EndpointCase::Ii),
            "endpoint_iii" => RegionVerdict::EndpointHolds(EndpointCase::Iii),
            "endpoint_iv" => RegionVerdict::EndpointHolds(EndpointCase::Iv),
            "endpoint_fails" => RegionVerdict::EndpointFails,
            "outside" => RegionVerdict::OutsideRegion,
            "scaling_violated" => RegionVerdict::ScalingViolated,
            other => return Err(Error::domain(format!("unknown region verdict `{other}`"))),
        })
    }
}

/// Classifies `(d, p, q, β, γ, p₀)` with the default tolerance.
pub fn pitt_region_classify(params: &PittParams) -> Result<RegionVerdict> {
    pitt_region_classify_with_tol(params, ENDPOINT_TOL)
}

pub fn pitt_region_classify_with_tol(params: &PittParams, eps: f64) -> Result<RegionVerdict> {
    params.validate()?;
    if params.p > params.q + eps {
        return Err(Error::domain(format!(
            "the classifier assumes p <= q, got p={}, q={}",
            params.p, params.q
        )));
    }
    if params.scaling_defect().abs() > eps {
        return Ok(RegionVerdict::ScalingViolated);
    }
    let lower = params.lower_endpoint();
    let upper = params.upper_endpoint();
    let g = params.gamma;
    if g > lower + eps && g < upper - eps {
        return Ok(RegionVerdict::Interior);
    }
    if (g - lower).abs() > eps {
        return Ok(RegionVerdict::OutsideRegion);
    }
    let (p, q, p0) = (params.p, params.q, params.p0);
    let p0d = dual_exponent(p0);
    let hilbert = (p0 - 2.0).abs() <= eps;
    let case = if (p - q).abs() <= eps {
        if hilbert {
            Some(EndpointCase::Ii)
        } else if p < p0 - eps || p > p0d + eps {
            Some(EndpointCase::I)
        } else {
            None
        }
    } else if p <= p0 + eps || p >= p0d - eps {
        Some(EndpointCase::Iii)
    } else if q >= p0d - eps {
        Some(EndpointCase::Iv)
    } else {
        None
    };
    Ok(case.map_or(RegionVerdict::EndpointFails, RegionVerdict::EndpointHolds))
}

/// Default oversampled grid for a degree-`n` polynomial.
pub fn default_grid(n: usize, d: usize, cfg: &QuadConfig) -> usize {
    let min = 2 * n + 1;
    cfg.grid_m.unwrap_or(if d == 1 { 8 * min } else { 4 * min }).max(min)
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct SideRatio {
    pub lhs: f64,
    pub rhs: f64,
    pub ratio: f64,
    /// How much the truncated part of `lhs` could add (line path only).
    pub tail_bound: f64,
}

impl SideRatio {
    fn new(lhs: f64, rhs: f64, tail_bound: f64) -> Result<Self> {
        if !(rhs > 0.0) {
            return Err(Error::domain("right-hand side vanishes; the ratio is undefined"));
        }
        Ok(SideRatio {
            lhs,
            rhs,
            ratio: lhs / rhs,
            tail_bound,
        })
    }
}

#[derive(Debug, Clone, Copy)]
pub enum PittInput<'a> {
    Torus(&'a TrigPolynomial),
    /// One-dimensional step function; the transform side is integrated over `[-window, window]`.
    Line {
        f: &'a StepFunction,
        window: f64,
    },
}

fn check_exponents(params: &PittParams) -> Result<()> {
    if !(params.p >= 1.0 && params.q >= 1.0) || !params.p.is_finite() || !params.q.is_finite() {
        return Err(Error::domain("ratio evaluation needs finite p, q >= 1"));
    }
    if !(params.beta >= 0.0 && params.gamma >= 0.0) {
        return Err(Error::domain("ratio evaluation needs beta, gamma >= 0"));
    }
    Ok(())
}

/// `‖f̂‖_{L^q(|·|^{-γq})} / ‖f‖_{L^p(|·|^{βp})}`, on the torus/lattice pair
/// (weights `(|n|+1)^{-γq}` on coefficients) or on the line.
pub fn pitt_ratio(input: PittInput<'_>, params: &PittParams, cfg: &QuadConfig) -> Result<SideRatio> {
    check_exponents(params)?;
    match input {
        PittInput::Torus(f) => {
            if f.is_zero() {
                return Err(Error::domain("degenerate input: f vanishes identically"));
            }
            let lhs = weighted_lp_norm_sequence(&f.coefficient_norms(), params.q, -params.gamma, IndexNorm::Euclid);
            let m = default_grid(f.degree(), f.d(), cfg);
            let rhs = weighted_lp_norm_torus(f, params.p, params.beta, m, cfg)?;
            SideRatio::new(lhs, rhs, 0.0)
        }
        PittInput::Line { f, window } => {
            if f.is_zero() {
                return Err(Error::domain("degenerate input: f vanishes identically"));
            }
            let line = crate::fourier::weighted_lq_norm_ft_line(f, params.q, params.gamma, window, cfg)?;
            let rhs = step_weighted_norm(f, params.p, params.beta);
            SideRatio::new(line.value, rhs, line.tail_bound)
        }
    }
}

/// `∫_{lo}^{hi} |t|^c dt` for `c > -1`.
fn power_integral(lo: f64, hi: f64, c: f64) -> f64 {
    let prim = |t: f64| t.signum() * t.abs().powf(c + 1.0) / (c + 1.0);
    prim(hi) - prim(lo)
}

/// `(Σ_k ‖x_k‖^p ∫_{cell k} |t|^{wp} dt)^{1/p}` for a one-dimensional step function.
pub fn step_weighted_norm(f: &StepFunction, p: f64, w: f64) -> f64 {
    let a = f.scale();
    let space = f.space();
    let total: f64 = f
        .cells()
        .iter()
        .map(|(k, x)| {
            let lo = a * (-0.5 - k.k[0] as f64);
            space.norm_unchecked(&x.entries).powf(p) * power_integral(lo, lo + a, w * p)
        })
        .sum();
    total.powf(1.0 / p)
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum TypeFamily {
    Fourier,
    Paley,
    Hl,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct TypeNotion {
    pub family: TypeFamily,
    pub kind: TypeKind,
    pub exponent: f64,
}

impl TypeNotion {
    pub fn new(family: TypeFamily, kind: TypeKind, exponent: f64) -> Result<Self> {
        let ok = match kind {
            TypeKind::Type => exponent > 1.0 && exponent <= 2.0,
            TypeKind::Cotype => (2.0..f64::INFINITY).contains(&exponent),
        };
        if !ok {
            return Err(Error::domain(format!(
                "{kind:?} exponent {exponent} is outside {}",
                if kind == TypeKind::Type { "(1, 2]" } else { "[2, inf)" }
            )));
        }
        Ok(TypeNotion { family, kind, exponent })
    }
}

/// Ratio in the transference form of a type or cotype notion: coefficient
/// side over `‖f‖_{L^p}` for types, `‖f‖_{L^q}` over coefficient side for cotypes.
pub fn type_test_ratio(f: &TrigPolynomial, notion: &TypeNotion, cfg: &QuadConfig) -> Result<f64> {
    let notion = TypeNotion::new(notion.family, notion.kind, notion.exponent)?;
    if f.is_zero() {
        return Err(Error::domain("degenerate input: f vanishes identically"));
    }
    let r = notion.exponent;
    let d = f.d() as f64;
    let coeffs = f.coefficient_norms();
    let plain: Vec<f64> = coeffs.iter().map(|c| c.1).collect();
    let m = default_grid(f.degree(), f.d(), cfg);
    let func = weighted_lp_norm_torus(f, r, 0.0, m, cfg)?;
    let rd = dual_exponent(r);
    let coef = match notion.family {
        TypeFamily::Fourier => crate::values::lr_norm_real(plain.iter().copied(), rd),
        TypeFamily::Paley => lz_norm_lattice(&plain, &LzParams::new(rd, r, 0.0))?,
        TypeFamily::Hl => {
            // (|n|+1)^{-d(2-p)} for types, (|n|+1)^{d(q-2)} for cotypes.
            let w = d * (r - 2.0) / r;
            weighted_lp_norm_sequence(&coeffs, r, w, IndexNorm::Euclid)
        }
    };
    match notion.kind {
        TypeKind::Type => Ok(coef / func),
        TypeKind::Cotype if coef > 0.0 => Ok(func / coef),
        TypeKind::Cotype => Err(Error::domain("coefficient side vanishes")),
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum ZygmundVariant {
    /// `L^{1,q}(log L)^{b+1} → ℓ^{∞,q}(log ℓ)^b`, `b > -1/q`.
    Std,
    /// `L^{1,q}(log L)^{1-1/q}(log log L) → ℓ^{∞,q}(log ℓ)^{-1/q}`.
    Endpoint,
    /// `ℓ^{1,q}(log ℓ)^{b+1} → L^{∞,q}(log L)^b`, `b < -1/q`.
    Sequence,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct SidePair {
    pub lhs: Estimate,
    pub rhs: Estimate,
}

/// Both sides of a Zygmund-type inequality for `f` (lhs is the target norm).
pub fn zygmund_check(
    f: &TrigPolynomial,
    b: f64,
    q: f64,
    variant: ZygmundVariant,
    cfg: &QuadConfig,
) -> Result<SidePair> {
    if !(q >= 1.0) {
        return Err(Error::domain(format!("q must be >= 1, got {q}")));
    }
    let inv_q = if q.is_infinite() { 0.0 } else { 1.0 / q };
    match variant {
        ZygmundVariant::Std if !(b > -inv_q) || (q.is_infinite() && b <= 0.0) => {
            return Err(Error::hypothesis(
                "b > -1/q",
                format!("standard variant got b={b}, q={q}"),
            ))
        }
        ZygmundVariant::Endpoint if q.is_infinite() => {
            return Err(Error::hypothesis("q < inf", "the endpoint variant needs finite q"))
        }
        ZygmundVariant::Sequence if !(b < -inv_q) => {
            return Err(Error::hypothesis(
                "b < -1/q",
                format!("sequence variant got b={b}, q={q}"),
            ))
        }
        _ => {}
    }
    if f.is_zero() {
        return Ok(SidePair {
            lhs: Estimate::Finite(0.0),
            rhs: Estimate::Finite(0.0),
        });
    }
    let coeffs: Vec<f64> = f.coefficient_norms().into_iter().map(|c| c.1).collect();
    let curve = torus_rearrangement(f, default_grid(f.degree(), f.d(), cfg))?;
    Ok(match variant {
        ZygmundVariant::Std => SidePair {
            lhs: Estimate::Finite(lz_norm_lattice(&coeffs, &LzParams::new(f64::INFINITY, q, b))?),
            rhs: lz_norm_function(&curve, &LzParams::new(1.0, q, b + 1.0), cfg)?,
        },
        ZygmundVariant::Endpoint => SidePair {
            lhs: Estimate::Finite(lz_norm_lattice(&coeffs, &LzParams::new(f64::INFINITY, q, -inv_q))?),
            rhs: lz_norm_function(&curve, &LzParams::new(1.0, q, 1.0 - inv_q).with_loglog(1.0), cfg)?,
        },
        ZygmundVariant::Sequence => SidePair {
            lhs: lz_norm_function(&curve, &LzParams::new(f64::INFINITY, q, b), cfg)?,
            rhs: Estimate::Finite(lz_norm_lattice(&coeffs, &LzParams::new(1.0, q, b + 1.0))?),
        },
    })
}

/// `Σ_n exp(-a ‖c_n‖^{-1/(b+1/q)})` over coefficient norms.
pub fn exp_summability(norms: &[f64], a: f64, b: f64, q: f64) -> Result<f64> {
    let inv_q = if q.is_infinite() { 0.0 } else { 1.0 / q };
    let e = b + inv_q;
    if !(e > 0.0) {
        return Err(Error::hypothesis("b + 1/q > 0", format!("got b + 1/q = {e}")));
    }
    if !(a > 0.0) {
        return Err(Error::domain(format!("a must be positive, got {a}")));
    }
    Ok(norms
        .iter()
        .filter(|&&c| c > 0.0)
        .map(|&c| (-a * c.powf(-1.0 / e)).exp())
        .sum())
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct ExpSummability {
    pub sum: f64,
    /// `‖f‖_{L^{1,q}(log L)^{b+1}}`, checked against the budget `ρ`.
    pub norm: f64,
}

/// [`exp_summability`] for the coefficients of `f` after checking
/// `‖f‖_{L^{1,q}(log L)^{b+1}} ≤ ρ`.
pub fn exp_summability_within(
    f: &TrigPolynomial,
    a: f64,
    b: f64,
    q: f64,
    rho: f64,
    cfg: &QuadConfig,
) -> Result<ExpSummability> {
    let norms: Vec<f64> = f.coefficient_norms().into_iter().map(|c| c.1).collect();
    let sum = exp_summability(&norms, a, b, q)?;
    let curve = torus_rearrangement(f, default_grid(f.degree(), f.d(), cfg))?;
    let norm = lz_norm_function(&curve, &LzParams::new(1.0, q, b + 1.0), cfg)?.value();
    if !(norm <= rho) {
        return Err(Error::hypothesis(
            "norm within budget rho",
            format!("L^(1,q)(log L)^(b+1) norm {norm} exceeds rho = {rho}"),
        ));
    }
    Ok(ExpSummability { sum, norm })
}

/// `sup_k c_k* k^{1/p₀'} (1+ln k)^{-(1/p₀ - 1/max{p₀',q})} / ‖f‖_{L^{p₀,q}}`.
pub fn bochkarev_decay(f: &TrigPolynomial, p0: f64, q: f64, cfg: &QuadConfig) -> Result<f64> {
    if !(p0 > 1.0 && p0 <= 2.0) {
        return Err(Error::domain(format!("p0 must lie in (1, 2], got {p0}")));
    }
    if !(q > p0) {
        return Err(Error::hypothesis("q > p0", format!("got q={q}, p0={p0}")));
    }
    let p0d = dual_exponent(p0);
    let log_exp = 1.0 / p0 - 1.0 / p0d.max(q);
    let curve = torus_rearrangement(f, default_grid(f.degree(), f.d(), cfg))?;
    let denom = lz_norm_function(&curve, &LzParams::new(p0, q, 0.0), cfg)?.value();
    if !(denom > 0.0) {
        return Err(Error::domain("the L^(p0,q) norm of f vanishes"));
    }
    let mut cs: Vec<f64> = f.coefficient_norms().into_iter().map(|c| c.1).collect();
    cs.sort_by(|a, b| b.total_cmp(a));
    let sup = cs
        .iter()
        .enumerate()
        .map(|(i, &c)| {
            let k = (i + 1) as f64;
            c * k.powf(1.0 / p0d) * (1.0 + k.ln()).powf(-log_exp)
        })
        .fold(0.0, f64::max);
    Ok(sup / denom)
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct SteinWeissParams {
    pub u: f64,
    pub v: f64,
    pub lambda: f64,
    pub a: f64,
    pub b: f64,
}

impl SteinWeissParams {
    /// Rejects the first violated hypothesis by name.
    pub fn validate(&self) -> Result<()> {
        let SteinWeissParams { u, v, lambda, a, b } = *self;
        if !(u > 1.0 && u <= v && v.is_finite()) {
            return Err(Error::hypothesis("1 < u <= v < inf", format!("u={u}, v={v}")));
        }
        if !(lambda > 0.0 && lambda < 1.0) {
            return Err(Error::hypothesis("0 < lambda < 1", format!("lambda={lambda}")));
        }
        if !(a < 1.0 / v) {
            return Err(Error::hypothesis("a < 1/v", format!("a={a}, v={v}")));
        }
        let ud = dual_exponent(u);
        if !(b < 1.0 / ud) {
            return Err(Error::hypothesis("b < 1/u'", format!("b={b}, u'={ud}")));
        }
        if !(a + b >= 0.0) {
            return Err(Error::hypothesis("a + b >= 0", format!("a + b = {}", a + b)));
        }
        let defect = 1.0 / v + 1.0 / ud - (lambda + a + b);
        if defect.abs() > 1e-10 {
            return Err(Error::hypothesis(
                "1/v + 1/u' = lambda + a + b",
                format!("scaling defect {defect}"),
            ));
        }
        Ok(())
    }
}

/// `∫_{lo}^{hi} |x - y|^{-λ} dy` without cancellation far from the interval.
fn riesz_cell(x: f64, lo: f64, hi: f64, lambda: f64) -> f64 {
    let e = 1.0 - lambda;
    if x > hi && x > 0.0 {
        let big = (-lo / x).ln_1p() * e;
        let small = (-hi / x).ln_1p() * e;
        x.powf(e) / e * small.exp() * (big - small).exp_m1()
    } else if x < lo && x < 0.0 {
        riesz_cell(-x, -hi, -lo, lambda)
    } else {
        let prim = |s: f64| s.signum() * s.abs().powf(e) / e;
        prim(x - lo) - prim(x - hi)
    }
}

const SW_LEVELS: usize = 40;
const SW_ORDER: usize = 16;
const SW_TAIL_SPAN: f64 = 60.0;

/// Both sides of the weighted fractional-integration inequality
/// `‖|·|^{-λ} * g‖_{L^v(|·|^{-av})} ≤ C ‖g‖_{L^u(|·|^{bu})}` for a step function on the line.
pub fn stein_weiss_check(g: &StepFunction, params: &SteinWeissParams, cfg: &QuadConfig) -> Result<SideRatio> {
    params.validate()?;
    if g.d() != 1 {
        return Err(Error::domain("fractional integration is only implemented for d = 1"));
    }
    let SteinWeissParams { u, v, lambda, a, b } = *params;
    if g.is_zero() {
        return Ok(SideRatio {
            lhs: 0.0,
            rhs: 0.0,
            ratio: 0.0,
            tail_bound: 0.0,
        });
    }
    let rhs = step_weighted_norm(g, u, b);
    let s = g.scale();
    let space = g.space();
    let cells: Vec<(f64, f64, &crate::values::ValuePoint)> = g
        .cells()
        .iter()
        .map(|(k, x)| {
            let lo = s * (-0.5 - k.k[0] as f64);
            (lo, lo + s, x)
        })
        .collect();
    let conv_norm = |x: f64| -> f64 {
        let mut acc = space.zero();
        for &(lo, hi, val) in &cells {
            acc.add_assign_scaled(val, num_complex::Complex64::new(riesz_cell(x, lo, hi, lambda), 0.0));
        }
        space.norm_unchecked(&acc.entries)
    };
    let integrand = |x: f64| -> f64 {
        let n = conv_norm(x);
        if n == 0.0 {
            0.0
        } else {
            n.powf(v) * x.abs().powf(-a * v)
        }
    };

    let mut pts: Vec<f64> = cells.iter().flat_map(|c| [c.0, c.1]).collect();
    pts.push(0.0);
    let reach = pts.iter().fold(0.0f64, |m, p| m.max(p.abs())).max(s);
    let r = 2.0 * reach;
    pts.extend([-r, r]);
    pts.sort_by(|x, y| x.total_cmp(y));
    pts.dedup_by(|x, y| (*x - *y).abs() <= 1e-14 * r);

    let rule = quad::gauss_rule(SW_ORDER.max(cfg.order));
    let mut total = 0.0;
    for w in pts.windows(2) {
        let (lo, hi) = (w[0], w[1]);
        let mid = 0.5 * (lo + hi);
        let h = mid - lo;
        for k in 0..SW_LEVELS {
            let (near, far) = (h * 0.5f64.powi(k as i32 + 1), h * 0.5f64.powi(k as i32));
            total += quad::gauss_with(&rule, lo + near, lo + far, integrand);
            total += quad::gauss_with(&rule, hi - far, hi - near, integrand);
        }
        let eps = h * 0.5f64.powi(SW_LEVELS as i32);
        total += quad::gauss_with(&rule, lo, lo + eps, integrand);
        total += quad::gauss_with(&rule, hi - eps, hi, integrand);
    }
    // |x| > r in s = ln(|x|/r), then the asymptotic |G|^v |x|^{-(λ+a)v}.
    for sign in [1.0, -1.0] {
        let mut t = 0.0;
        while t < SW_TAIL_SPAN {
            let next = t + 0.5;
            total += quad::gauss_with(&rule, t, next, |z| {
                let x = r * z.exp();
                integrand(sign * x) * x
            });
            t = next;
        }
    }
    let mut mass = space.zero();
    for &(lo, hi, val) in &cells {
        mass.add_assign_scaled(val, num_complex::Complex64::new(hi - lo, 0.0));
    }
    let big_g = space.norm_unchecked(&mass.entries);
    let decay = (lambda + a) * v - 1.0;
    let far = r * SW_TAIL_SPAN.exp();
    total += 2.0 * big_g.powf(v) * far.powf(-decay) / decay;
    SideRatio::new(total.powf(1.0 / v), rhs, 0.0)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::fourier::MultiIndex;
    use crate::values::{ValuePoint, ValueSpace};

    fn cfg() -> QuadConfig {
        QuadConfig::default()
    }

    fn scalar_poly(n: usize, coeffs: &[(i64, f64)]) -> TrigPolynomial {
        let mut f = TrigPolynomial::zero(1, n, ValueSpace::scalar()).unwrap();
        for &(k, v) in coeffs {
            f.set(MultiIndex::one(k), ValuePoint::from_real(&[v])).unwrap();
        }
        f
    }

    #[test]
    fn classifier_examples() {
        let v = pitt_region_classify(&PittParams::new(1, 2.0, 2.0, 0.0, 0.0, 2.0)).unwrap();
        assert_eq!(v, RegionVerdict::EndpointHolds(EndpointCase::Ii));
        let v = pitt_region_classify(&PittParams::new(1, 1.5, 1.5, 0.0, 1.0 / 3.0, 1.5)).unwrap();
        assert_eq!(v, RegionVerdict::EndpointFails);
        let p = PittParams::on_scaling_line(1, 1.2, 2.0, 0.4, 2.0);
        assert_eq!(pitt_region_classify(&p).unwrap(), RegionVerdict::Interior);
        let mut bad = p;
        bad.beta += 1e-6;
        assert_eq!(pitt_region_classify(&bad).unwrap(), RegionVerdict::ScalingViolated);
        assert!(pitt_region_classify(&PittParams::new(1, 3.0, 2.0, 0.0, 0.0, 2.0)).is_err());
        let out = PittParams::on_scaling_line(1, 1.2, 2.0, 0.55, 2.0);
        assert_eq!(pitt_region_classify(&out).unwrap(), RegionVerdict::OutsideRegion);
    }

    #[test]
    fn classifier_endpoint_cases() {
        let at_lower = |p: f64, q: f64, p0: f64| {
            let probe = PittParams::new(1, p, q, 0.0, 0.0, p0);
            PittParams::on_scaling_line(1, p, q, probe.lower_endpoint(), p0)
        };
        let c = |p, q, p0| pitt_region_classify(&at_lower(p, q, p0)).unwrap();
        assert_eq!(c(1.2, 1.2, 1.5), RegionVerdict::EndpointHolds(EndpointCase::I));
        assert_eq!(c(4.0, 4.0, 1.5), RegionVerdict::EndpointHolds(EndpointCase::I));
        assert_eq!(c(2.0, 2.0, 1.5), RegionVerdict::EndpointFails);
        assert_eq!(c(1.5, 2.5, 1.5), RegionVerdict::EndpointHolds(EndpointCase::Iii));
        assert_eq!(c(2.0, 3.0, 1.5), RegionVerdict::EndpointHolds(EndpointCase::Iv));
        assert_eq!(c(2.0, 2.5, 1.5), RegionVerdict::EndpointFails);
    }

    #[test]
    fn pitt_ratio_examples() {
        let mode = scalar_poly(1, &[(1, 1.0)]);
        let p = PittParams::new(1, 2.0, 2.0, 0.0, 0.0, 2.0);
        let r = pitt_ratio(PittInput::Torus(&mode), &p, &cfg()).unwrap();
        assert!((r.ratio - 1.0).abs() < 1e-12);
        let c = scalar_poly(0, &[(0, -3.0)]);
        let r = pitt_ratio(PittInput::Torus(&c), &p, &cfg()).unwrap();
        assert!((r.ratio - 1.0).abs() < 1e-12);
        let zero = scalar_poly(2, &[]);
        assert!(pitt_ratio(PittInput::Torus(&zero), &p, &cfg()).is_err());
    }

    #[test]
    fn step_weighted_norm_is_exact() {
        let s = ValueSpace::scalar();
        let g = StepFunction::new(1, 2.0, s, vec![(MultiIndex::one(-1), ValuePoint::from_real(&[3.0]))]).unwrap();
        // cell [1, 3]; ∫ 9 t² dt = 9 * 26/3 = 78
        assert!((step_weighted_norm(&g, 2.0, 1.0) - 78f64.sqrt()).abs() < 1e-12);
    }

    #[test]
    fn type_ratio_single_mode() {
        let f = scalar_poly(0, &[(0, 2.0)]);
        for fam in [TypeFamily::Fourier, TypeFamily::Paley, TypeFamily::Hl] {
            let t = TypeNotion::new(fam, TypeKind::Type, 1.5).unwrap();
            assert!((type_test_ratio(&f, &t, &cfg()).unwrap() - 1.0).abs() < 1e-12);
            let c = TypeNotion::new(fam, TypeKind::Cotype, 3.0).unwrap();
            assert!((type_test_ratio(&f, &c, &cfg()).unwrap() - 1.0).abs() < 1e-12);
        }
        assert!(TypeNotion::new(TypeFamily::Fourier, TypeKind::Type, 2.5).is_err());
        assert!(TypeNotion::new(TypeFamily::Fourier, TypeKind::Cotype, 1.5).is_err());
    }

    #[test]
    fn zygmund_examples() {
        let f = scalar_poly(0, &[(0, 1.5)]);
        let s = zygmund_check(&f, 0.0, 1.0, ZygmundVariant::Std, &cfg()).unwrap();
        assert!((s.lhs.value() - 1.5).abs() < 1e-12);
        assert!((s.rhs.value() - 3.0).abs() < 1e-8, "{s:?}");
        let z = scalar_poly(3, &[]);
        let s = zygmund_check(&z, 0.0, 1.0, ZygmundVariant::Std, &cfg()).unwrap();
        assert_eq!((s.lhs.value(), s.rhs.value()), (0.0, 0.0));
        assert!(zygmund_check(&f, -1.0, 1.0, ZygmundVariant::Std, &cfg()).is_err());
        assert!(zygmund_check(&f, 0.0, 1.0, ZygmundVariant::Sequence, &cfg()).is_err());
        assert!(zygmund_check(&f, 0.0, f64::INFINITY, ZygmundVariant::Endpoint, &cfg()).is_err());
        let s = zygmund_check(&f, -2.0, 1.0, ZygmundVariant::Sequence, &cfg()).unwrap();
        assert!(s.lhs.is_finite() && s.rhs.value() > 0.0);
    }

    #[test]
    fn exp_summability_examples() {
        assert_eq!(exp_summability(&[0.0; 5], 1.0, 1.0, 1.0).unwrap(), 0.0);
        assert!((exp_summability(&[1.0], 1.0, 1.0, 1.0).unwrap() - (-1.0f64).exp()).abs() < 1e-15);
        assert!(exp_summability(&[1.0], 1.0, -1.0, 1.0).is_err());
    }

    #[test]
    fn bochkarev_is_scale_invariant() {
        let f = scalar_poly(2, &[(0, 1.0), (2, -0.5)]);
        let a = bochkarev_decay(&f, 2.0, 4.0, &cfg()).unwrap();
        let b = bochkarev_decay(&f.scaled(num_complex::Complex64::new(0.0, 7.0)), 2.0, 4.0, &cfg()).unwrap();
        assert!((a - b).abs() < 1e-9 * a);
        assert!(bochkarev_decay(&scalar_poly(1, &[]), 2.0, 4.0, &cfg()).is_err());
        assert!(bochkarev_decay(&f, 2.0, 1.5, &cfg()).is_err());
    }

    #[test]
    fn stein_weiss_examples() {
        let s = ValueSpace::scalar();
        let one =
            |v: f64| StepFunction::new(1, 1.0, s, vec![(MultiIndex::one(0), ValuePoint::from_real(&[v]))]).unwrap();
        let p = SteinWeissParams {
            u: 2.0,
            v: 2.0,
            lambda: 0.6,
            a: 0.2,
            b: 0.2,
        };
        let r1 = stein_weiss_check(&one(1.0), &p, &cfg()).unwrap();
        let r2 = stein_weiss_check(&one(2.0), &p, &cfg()).unwrap();
        assert!((r2.lhs - 2.0 * r1.lhs).abs() < 1e-10 * r1.lhs);
        assert!((r2.rhs - 2.0 * r1.rhs).abs() < 1e-12);
        assert!(r1.ratio.is_finite() && r1.ratio > 0.0);
        let zero = stein_weiss_check(&one(0.0), &p, &cfg()).unwrap();
        assert_eq!((zero.lhs, zero.rhs, zero.ratio), (0.0, 0.0, 0.0));
        let bad = SteinWeissParams { a: 0.6, b: -0.2, ..p };
        match stein_weiss_check(&one(1.0), &bad, &cfg()) {
            Err(Error::Hypothesis { condition, .. }) => assert_eq!(condition, "a < 1/v"),
            other => panic!("{other:?}"),
        }
    }

    #[test]
    fn riesz_cell_far_field() {
        let direct = |x: f64| {
            let prim = |s: f64| s.signum() * s.abs().powf(0.4) / 0.4;
            prim(x + 0.5) - prim(x - 0.5)
        };
        for x in [0.7, 3.0, -2.0, 50.0] {
            assert!((riesz_cell(x, -0.5, 0.5, 0.6) - direct(x)).abs() < 1e-12);
        }
        let far = riesz_cell(1e20, -0.5, 0.5, 0.6);
        assert!((far / 1e20f64.powf(-0.6) - 1.0).abs() < 1e-9);
    }
}
