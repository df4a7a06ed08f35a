//! K-functionals of the `(L¹, L^∞)` couple, limiting interpolation norms and
//! logarithmic Hardy inequalities.

use serde::{Deserialize, Serialize};

use crate::quad::{log_axis_integral, log_axis_sup, Estimate, QuadConfig};
use crate::rearrange::{lz_norm_function, LzParams, Profile};
use crate::{Error, Result};

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct InterpParams {
    pub theta: f64,
    pub q: f64,
    pub b: f64,
}

impl InterpParams {
    pub fn new(theta: f64, q: f64, b: f64) -> Result<Self> {
        let p = InterpParams { theta, q, b };
        p.validate()?;
        Ok(p)
    }

    pub fn validate(&self) -> Result<()> {
        let (theta, q, b) = (self.theta, self.q, self.b);
        if !(0.0..=1.0).contains(&theta) {
            return Err(Error::domain(format!("theta must lie in [0, 1], got {theta}")));
        }
        if !(q >= 1.0) || !b.is_finite() {
            return Err(Error::domain(format!(
                "need q in [1, inf] and finite b, got q={q}, b={b}"
            )));
        }
        let inv_q = if q.is_infinite() { 0.0 } else { 1.0 / q };
        if theta == 0.0 {
            let ok = if q.is_infinite() { b > 0.0 } else { b >= -inv_q };
            if !ok {
                return Err(Error::hypothesis(
                    "theta = 0 needs b >= -1/q (b > 0 if q = inf)",
                    format!("b={b}, q={q}"),
                ));
            }
        }
        if theta == 1.0 {
            let ok = if q.is_infinite() { b <= 0.0 } else { b < -inv_q };
            if !ok {
                return Err(Error::hypothesis(
                    "theta = 1 needs b < -1/q (b <= 0 if q = inf)",
                    format!("b={b}, q={q}"),
                ));
            }
        }
        Ok(())
    }
}

/// `K(t, f; L¹, L^∞) = ∫_0^t f*(s) ds`.
pub fn k_functional(curve: &dyn Profile, t: f64) -> Result<f64> {
    if !(t > 0.0) {
        return Err(Error::domain(format!("K-functional needs t > 0, got {t}")));
    }
    Ok(curve.primitive(t))
}

/// `K(s, f; L^∞, L¹)` by direct infimization over truncations
/// `f = min(|f|, λ) + (|f| - λ)_+`, for step curves.
pub fn k_functional_reversed(curve: &crate::rearrange::RearrangementCurve, s: f64) -> Result<f64> {
    if !(s > 0.0) {
        return Err(Error::domain(format!("K-functional needs s > 0, got {s}")));
    }
    let values = curve.values();
    let ends = curve.ends();
    let excess = |lambda: f64| -> f64 {
        let mut start = 0.0;
        let mut acc = 0.0;
        for (&e, &v) in ends.iter().zip(values) {
            if v <= lambda {
                break;
            }
            acc += (v - lambda) * (e - start);
            start = e;
        }
        acc
    };
    let mut best = s * excess(0.0);
    for &lambda in values {
        best = best.min(lambda + s * excess(lambda));
    }
    Ok(best)
}

/// `c·u + ln K(e^{-αu})`, extrapolated linearly past `αu = 600` with the two
/// slopes combined first so that large `u` does not cancel catastrophically.
fn ln_tk(curve: &dyn Profile, c: f64, alpha: f64, u: f64) -> f64 {
    const U_SAFE: f64 = 600.0;
    let ln_k = |v: f64| curve.primitive((-v).exp()).ln();
    let v = alpha * u;
    if v <= U_SAFE {
        return c * u + ln_k(v);
    }
    let u_s = U_SAFE / alpha;
    let slope = ln_k(U_SAFE) - ln_k(U_SAFE - 1.0);
    c * u_s + ln_k(U_SAFE) + (c + alpha * slope) * (u - u_s)
}

fn log_breaks(curve: &dyn Profile, scale: f64) -> Vec<f64> {
    curve
        .breakpoints()
        .into_iter()
        .filter(|&t| t > 0.0 && t < 1.0)
        .map(|t| -t.ln() * scale)
        .collect()
}

fn finish(est: Estimate, q: f64) -> f64 {
    match est {
        Estimate::Finite(v) if q.is_infinite() => v,
        Estimate::Finite(v) => v.powf(1.0 / q),
        Estimate::Infinite => f64::INFINITY,
    }
}

/// `(∫_0^1 (t^{-θ}(1+|log t|)^b K(t,f))^q dt/t)^{1/q}`.
pub fn limiting_interp_norm(curve: &dyn Profile, params: &InterpParams, cfg: &QuadConfig) -> Result<f64> {
    params.validate()?;
    if curve.primitive(1.0) == 0.0 {
        return Ok(0.0);
    }
    let InterpParams { theta, q, b } = *params;
    let ln_g = |u: f64| b * u.ln_1p() + ln_tk(curve, theta, 1.0, u);
    let breaks = log_breaks(curve, 1.0);
    let est = if q.is_infinite() {
        log_axis_sup(&|u| ln_g(u).exp(), &breaks, f64::INFINITY, cfg)
    } else {
        log_axis_integral(&|u| (q * ln_g(u)).exp(), &breaks, f64::INFINITY, cfg)
    };
    Ok(finish(est, q))
}

/// A nonnegative step function on `(0, 1)`: value `v_j` on `(e_{j-1}, e_j]`
/// with `e_0 = 0` and last end `1`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct StepPsi {
    ends: Vec<f64>,
    values: Vec<f64>,
    prefix: Vec<f64>,
}

impl StepPsi {
    pub fn new(ends: Vec<f64>, values: Vec<f64>) -> Result<Self> {
        if ends.is_empty() || ends.len() != values.len() {
            return Err(Error::domain("step function needs matching, nonempty ends and values"));
        }
        if (ends[ends.len() - 1] - 1.0).abs() > 1e-15 {
            return Err(Error::domain("last cell must end at 1"));
        }
        let mut prev = 0.0;
        let mut acc = 0.0;
        let mut prefix = Vec::with_capacity(ends.len());
        for (&e, &v) in ends.iter().zip(&values) {
            if !(e > prev) {
                return Err(Error::domain("cell ends must be strictly increasing in (0, 1]"));
            }
            if !(v >= 0.0) || !v.is_finite() {
                return Err(Error::domain(format!("psi must be finite and >= 0, got {v}")));
            }
            acc += v * (e - prev);
            prefix.push(acc);
            prev = e;
        }
        Ok(StepPsi { ends, values, prefix })
    }

    pub fn zero() -> Self {
        StepPsi::new(vec![1.0], vec![0.0]).expect("valid zero step")
    }

    /// Samples `psi` at geometric cell midpoints on `2^{-octaves} < t ≤ 1`
    /// with `per_octave` cells per octave; the first cell `(0, 2^{-octaves}]`
    /// takes the value at half its end.
    pub fn sample(psi: impl Fn(f64) -> f64, octaves: usize, per_octave: usize) -> Result<Self> {
        let cells = octaves * per_octave;
        let h = std::f64::consts::LN_2 / per_octave as f64;
        let first = (-(cells as f64) * h).exp();
        let mut ends = vec![first];
        let mut values = vec![psi(0.5 * first)];
        for j in (0..cells).rev() {
            let hi = if j == 0 { 1.0 } else { (-(j as f64) * h).exp() };
            let mid = (-(j as f64 + 0.5) * h).exp();
            ends.push(hi);
            values.push(psi(mid));
        }
        StepPsi::new(ends, values)
    }

    pub fn value(&self, t: f64) -> f64 {
        let k = self.ends.partition_point(|&e| e < t);
        self.values.get(k).copied().unwrap_or(0.0)
    }

    /// `∫_0^t ψ`, exact.
    pub fn primitive(&self, t: f64) -> f64 {
        if t <= 0.0 {
            return 0.0;
        }
        let k = self.ends.partition_point(|&e| e < t);
        if k >= self.ends.len() {
            return *self.prefix.last().expect("nonempty");
        }
        let (before, start) = if k == 0 {
            (0.0, 0.0)
        } else {
            (self.prefix[k - 1], self.ends[k - 1])
        };
        before + self.values[k] * (t - start)
    }

    /// `ln ∫_0^{e^{-u}} ψ`, with the innermost cell handled in log form.
    fn ln_primitive(&self, u: f64) -> f64 {
        let t = (-u).exp();
        if t > self.ends[0] || u < 700.0 {
            return self.primitive(t).ln();
        }
        self.values[0].ln() - u
    }

    fn breaks(&self) -> Vec<f64> {
        self.ends[..self.ends.len() - 1].iter().map(|e| -e.ln()).collect()
    }

    fn value_log(&self, u: f64) -> f64 {
        if u >= -self.ends[0].ln() {
            self.values[0]
        } else {
            self.value((-u).exp())
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum HardyVariant {
    /// Weight `(1 - log t)^b`.
    I,
    /// Weight `(1 + log(1 - log t))^b` against `dt/(t(1 - log t))`.
    Iii,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct HardyPair {
    pub lhs: f64,
    pub rhs: f64,
}

impl HardyPair {
    pub fn ratio(&self) -> f64 {
        if self.rhs == 0.0 {
            0.0
        } else {
            self.lhs / self.rhs
        }
    }
}

type LogIntegrand<'a> = Box<dyn Fn(f64) -> f64 + 'a>;

/// Both sides of the logarithmic Hardy inequality for functions on `(0, 1)`.
pub fn hardy_check_functions(
    psi: &StepPsi,
    b: f64,
    q: f64,
    variant: HardyVariant,
    cfg: &QuadConfig,
) -> Result<HardyPair> {
    if !(q >= 1.0) {
        return Err(Error::domain(format!("q must lie in [1, inf], got {q}")));
    }
    let inv_q = if q.is_infinite() { 0.0 } else { 1.0 / q };
    if !(b + inv_q > 0.0) {
        return Err(Error::hypothesis("b + 1/q > 0", format!("b={b}, q={q}")));
    }
    if psi.values.iter().all(|&v| v == 0.0) {
        return Ok(HardyPair { lhs: 0.0, rhs: 0.0 });
    }
    let breaks = psi.breaks();
    // Logs of the integrands against du, before raising to q; `measure` is
    // the extra ln of the measure density in u.
    let (ln_lhs, ln_rhs): (LogIntegrand<'_>, LogIntegrand<'_>) = match variant {
        HardyVariant::I => (
            Box::new(move |u: f64| b * u.ln_1p() + psi.ln_primitive(u)),
            Box::new(move |u: f64| -u + (b + 1.0) * u.ln_1p() + psi.value_log(u).ln()),
        ),
        HardyVariant::Iii => (
            Box::new(move |u: f64| b * u.ln_1p().ln_1p() + psi.ln_primitive(u)),
            Box::new(move |u: f64| -u + u.ln_1p() + (b + 1.0) * u.ln_1p().ln_1p() + psi.value_log(u).ln()),
        ),
    };
    let measure = |u: f64| match variant {
        HardyVariant::I => 0.0,
        HardyVariant::Iii => -u.ln_1p(),
    };
    let side = |f: &dyn Fn(f64) -> f64| -> f64 {
        let est = if q.is_infinite() {
            log_axis_sup(&|u| f(u).exp(), &breaks, f64::INFINITY, cfg)
        } else {
            log_axis_integral(&|u| (q * f(u) + measure(u)).exp(), &breaks, f64::INFINITY, cfg)
        };
        finish(est, q)
    };
    Ok(HardyPair {
        lhs: side(&ln_lhs),
        rhs: side(&ln_rhs),
    })
}

/// Both sides of the logarithmic Hardy inequality for sequences.
///
/// The left sum runs over all `n`; past the support the partial sums are
/// constant and the remainder is summed directly to `2^20` terms, then by
/// Euler–Maclaurin.
pub fn hardy_check_sequences(c: &[f64], b: f64, q: f64) -> Result<HardyPair> {
    if !(q >= 1.0) {
        return Err(Error::domain(format!("q must lie in [1, inf], got {q}")));
    }
    let inv_q = if q.is_infinite() { 0.0 } else { 1.0 / q };
    if !(b + inv_q < 0.0) {
        return Err(Error::hypothesis("b + 1/q < 0", format!("b={b}, q={q}")));
    }
    if let Some(bad) = c.iter().find(|v| !(**v >= 0.0) || !v.is_finite()) {
        return Err(Error::domain(format!(
            "sequence entries must be finite and >= 0, got {bad}"
        )));
    }
    let l = |n: f64| 1.0 + n.ln();
    let mut partial = 0.0;
    let mut lhs = 0.0f64;
    let mut rhs = 0.0f64;
    for (i, &cn) in c.iter().enumerate() {
        let n = (i + 1) as f64;
        partial += cn;
        let left = l(n).powf(b) * partial;
        let right = n * l(n).powf(b + 1.0) * cn;
        if q.is_infinite() {
            lhs = lhs.max(left);
            rhs = rhs.max(right);
        } else {
            lhs += left.powf(q) / n;
            rhs += right.powf(q) / n;
        }
    }
    if q.is_infinite() {
        return Ok(HardyPair { lhs, rhs });
    }
    if partial > 0.0 {
        let e = b * q;
        let f = |x: f64| l(x).powf(e) / x;
        const DIRECT: usize = 1 << 20;
        let mut tail = 0.0;
        let start = c.len() + 1;
        let stop = start.max(DIRECT);
        for n in start..stop {
            tail += f(n as f64);
        }
        // Σ_{n ≥ M} f(n) ≈ ∫_M^∞ f + f(M)/2 - f'(M)/12.
        let m = stop as f64;
        let integral = l(m).powf(e + 1.0) / (-(e + 1.0));
        let fprime = l(m).powf(e - 1.0) * (e - l(m)) / (m * m);
        tail += integral + 0.5 * f(m) - fprime / 12.0;
        lhs += partial.powf(q) * tail;
    }
    Ok(HardyPair {
        lhs: lhs.powf(1.0 / q),
        rhs: rhs.powf(1.0 / q),
    })
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Bracket {
    pub left: f64,
    pub middle: f64,
    pub right: f64,
    /// `middle / left`.
    pub c1: f64,
    /// `right / middle`.
    pub c2: f64,
}

/// The embedding chain
/// `(L¹,L^∞)_{θ,q;b+1/min(p,q)} ↪ (L¹, L^{r,p})_{1,q;b} ↪ (L¹,L^∞)_{θ,q;b+1/max(p,q)}`
/// with `1/r = 1 - θ`, evaluated on one curve. The outer norms are
/// Lorentz–Zygmund norms; the middle uses Holmstedt's formula
/// `K(t; L¹, L^{r,p}) ≍ ∫_0^{t^α} f* + t (∫_{t^α}^∞ (s^{1/r} f*(s))^p ds/s)^{1/p}`, `α = 1/θ`.
pub fn reiteration_bracket_check(
    curve: &dyn Profile,
    theta: f64,
    p: f64,
    q: f64,
    b: f64,
    cfg: &QuadConfig,
) -> Result<Bracket> {
    if !(theta > 0.0 && theta < 1.0) {
        return Err(Error::domain(format!("theta must lie in (0, 1), got {theta}")));
    }
    if !(p >= 1.0) || !(q >= 1.0) {
        return Err(Error::domain(format!("need p, q in [1, inf], got p={p}, q={q}")));
    }
    let inv = |x: f64| if x.is_infinite() { 0.0 } else { 1.0 / x };
    if !(b < -inv(q)) {
        return Err(Error::hypothesis("b < -1/q", format!("b={b}, q={q}")));
    }
    if curve.primitive(curve.total_measure().min(1e300)) == 0.0 {
        return Ok(Bracket {
            left: 0.0,
            middle: 0.0,
            right: 0.0,
            c1: 0.0,
            c2: 0.0,
        });
    }
    let r = 1.0 / (1.0 - theta);
    let left = lz_norm_function(curve, &LzParams::new(r, q, b + inv(p.min(q))), cfg)?.value();
    let right = lz_norm_function(curve, &LzParams::new(r, q, b + inv(p.max(q))), cfg)?.value();

    let alpha = 1.0 / theta;
    let total = curve.total_measure();
    let ln_f = |w: f64| -> f64 {
        if w >= 0.0 {
            curve.ln_value_log(w)
        } else {
            curve.value((-w).exp()).ln()
        }
    };
    // s^{1/r} f*(s) at s = e^{-w}, in logs.
    let ln_h = |w: f64| -w / r + ln_f(w);
    let head_breaks: Vec<f64> = curve
        .breakpoints()
        .into_iter()
        .filter(|&t| t > 1.0 && t < total)
        .map(|t| t.ln())
        .collect();
    let head_upper = if total > 1.0 { total.ln() } else { 0.0 };
    let inner_breaks = log_breaks(curve, 1.0);
    let head = if p.is_infinite() {
        log_axis_sup(&|v| ln_h(-v).exp(), &head_breaks, head_upper, cfg)
    } else {
        log_axis_integral(&|v| (p * ln_h(-v)).exp(), &head_breaks, head_upper, cfg)
    };
    let head = head
        .finite()
        .ok_or_else(|| Error::domain("curve is not in L^{r,p} away from 0"))?;
    // ln of (∫_{t^α}^∞ (s^{1/r} f*)^p ds/s)^{1/p} at t = e^{-u}.
    let ln_inner = |u: f64| -> f64 {
        let upper = alpha * u;
        if p.is_infinite() {
            let near = log_axis_sup(&|w| ln_h(w).exp(), &inner_breaks, upper, cfg).value();
            head.max(near).ln()
        } else {
            let near = log_axis_integral(&|w| (p * ln_h(w)).exp(), &inner_breaks, upper, cfg).value();
            (head + near).ln() / p
        }
    };
    // ln of t^{-1}(1+|log t|)^b K̃(t).
    let ln_g = |u: f64| -> f64 {
        let a = ln_tk(curve, 1.0, alpha, u);
        let c = ln_inner(u);
        let m = a.max(c);
        b * u.ln_1p() + m + ((a - m).exp() + (c - m).exp()).ln()
    };
    let breaks = log_breaks(curve, theta);
    let est = if q.is_infinite() {
        log_axis_sup(&|u| ln_g(u).exp(), &breaks, f64::INFINITY, cfg)
    } else {
        log_axis_integral(&|u| (q * ln_g(u)).exp(), &breaks, f64::INFINITY, cfg)
    };
    let middle = finish(est, q);
    Ok(Bracket {
        left,
        middle,
        right,
        c1: middle / left,
        c2: right / middle,
    })
}
