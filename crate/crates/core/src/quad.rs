//! Quadrature shared by the norm evaluators.
//!
//! Integrals over `(0, 1]` against `dt/t` are taken in the variable
//! `u = -ln t`; the half line `[0, u_max]` is split into Gauss–Legendre
//! panels aligned with the integrand's breakpoints, and the tail beyond
//! `u_max` is integrated in `s = ln(1 + u)` chunk by chunk until the chunk
//! contributions Cauchy-converge. A tail that never settles is reported as
//! [`Estimate::Infinite`].

use std::collections::HashMap;
use std::sync::{Arc, Mutex, OnceLock};

use gauss_quad::legendre::GaussLegendre;
use serde::{Deserialize, Serialize};

/// Largest `s = ln(1+u)` visited by the tail sweep. `e^700` is still finite.
const S_FAR: f64 = 700.0;
const TAIL_CHUNK: f64 = 0.5;
const TAIL_REL_TOL: f64 = 1e-15;
const TAIL_QUIET_CHUNKS: usize = 4;

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct QuadConfig {
    /// End of the uniformly paneled part of the `u = -ln t` axis.
    pub u_max: f64,
    /// Number of uniform panels on `[0, u_max]` (breakpoints add more).
    pub panels: usize,
    /// Gauss–Legendre nodes per panel.
    pub order: usize,
    /// Samples per axis when a torus function has to be rearranged or
    /// integrated on a grid; `None` lets the caller pick an oversampled grid.
    pub grid_m: Option<usize>,
}

impl Default for QuadConfig {
    fn default() -> Self {
        QuadConfig {
            u_max: 40.0,
            panels: 160,
            order: 12,
            grid_m: None,
        }
    }
}

impl QuadConfig {
    /// Same configuration with twice the panel count.
    pub fn refined(&self) -> Self {
        QuadConfig {
            panels: self.panels * 2,
            ..*self
        }
    }

    pub fn validate(&self) -> crate::Result<()> {
        if !(self.u_max > 0.0 && self.u_max.is_finite()) || self.panels == 0 || self.order == 0 {
            return Err(crate::Error::domain(
                "quadrature needs u_max > 0, panels >= 1 and order >= 1",
            ));
        }
        Ok(())
    }
}

/// A nonnegative quantity that may be `+∞` (divergent integral or sum).
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Estimate {
    Finite(f64),
    Infinite,
}

impl Estimate {
    pub fn value(self) -> f64 {
        match self {
            Estimate::Finite(v) => v,
            Estimate::Infinite => f64::INFINITY,
        }
    }

    pub fn is_finite(self) -> bool {
        matches!(self, Estimate::Finite(_))
    }

    pub fn finite(self) -> Option<f64> {
        match self {
            Estimate::Finite(v) => Some(v),
            Estimate::Infinite => None,
        }
    }

    pub(crate) fn from_value(v: f64) -> Estimate {
        if v.is_finite() {
            Estimate::Finite(v)
        } else {
            Estimate::Infinite
        }
    }
}

type RuleCache = Mutex<HashMap<usize, Arc<Vec<(f64, f64)>>>>;

fn rule_cache() -> &'static RuleCache {
    static RULES: OnceLock<RuleCache> = OnceLock::new();
    RULES.get_or_init(|| Mutex::new(HashMap::new()))
}

/// Gauss–Legendre nodes and weights on `[-1, 1]`, cached per order.
pub fn gauss_rule(order: usize) -> Arc<Vec<(f64, f64)>> {
    let order = order.max(1);
    let mut cache = rule_cache().lock().expect("quadrature cache poisoned");
    cache
        .entry(order)
        .or_insert_with(|| {
            let deg = std::num::NonZeroUsize::new(order).expect("order >= 1");
            Arc::new(GaussLegendre::new(deg).as_node_weight_pairs().to_vec())
        })
        .clone()
}

/// Gauss–Legendre approximation of `∫_a^b f` with a prefetched rule.
#[inline]
pub fn gauss_with(rule: &[(f64, f64)], a: f64, b: f64, mut f: impl FnMut(f64) -> f64) -> f64 {
    let half = 0.5 * (b - a);
    let mid = 0.5 * (b + a);
    let mut acc = 0.0;
    for &(x, w) in rule {
        acc += w * f(mid + half * x);
    }
    acc * half
}

pub fn gauss(order: usize, a: f64, b: f64, f: impl FnMut(f64) -> f64) -> f64 {
    gauss_with(&gauss_rule(order), a, b, f)
}

/// Sorted panel edges on `[lo, hi]`: `n` uniform panels merged with the
/// breakpoints that fall strictly inside.
pub(crate) fn panel_edges(lo: f64, hi: f64, n: usize, breaks: &[f64]) -> Vec<f64> {
    let mut edges: Vec<f64> = (0..=n).map(|i| lo + (hi - lo) * i as f64 / n as f64).collect();
    edges.extend(breaks.iter().copied().filter(|&b| b > lo && b < hi));
    edges.sort_by(|a, b| a.total_cmp(b));
    let scale = (hi - lo).abs().max(1.0);
    edges.dedup_by(|a, b| (*a - *b).abs() <= 1e-13 * scale);
    edges
}

/// `∫_0^upper g(u) du` where `g` is smooth between `breaks`.
///
/// `upper` may be `f64::INFINITY`. Non-finite integrand values make the
/// result infinite.
pub fn log_axis_integral(g: &dyn Fn(f64) -> f64, breaks: &[f64], upper: f64, cfg: &QuadConfig) -> Estimate {
    if upper <= 0.0 {
        return Estimate::Finite(0.0);
    }
    let rule = gauss_rule(cfg.order);
    let main_end = cfg.u_max.min(upper);
    let panels = ((cfg.panels as f64) * main_end / cfg.u_max).ceil().max(1.0) as usize;
    let edges = panel_edges(0.0, main_end, panels, breaks);
    let mut total = 0.0;
    for w in edges.windows(2) {
        total += gauss_with(&rule, w[0], w[1], g);
    }
    if !total.is_finite() {
        return Estimate::Infinite;
    }
    if upper <= cfg.u_max {
        return Estimate::Finite(total);
    }

    // Tail in s = ln(1+u); du = (1+u) ds.
    let s_end = upper.ln_1p().min(S_FAR);
    let s_breaks: Vec<f64> = breaks.iter().filter(|&&b| b > cfg.u_max).map(|b| b.ln_1p()).collect();
    let tail = |s: f64| {
        let u = s.exp_m1();
        g(u) * (1.0 + u)
    };
    let mut s = cfg.u_max.ln_1p();
    let mut quiet = 0usize;
    while s < s_end {
        let next = (s + TAIL_CHUNK).min(s_end);
        let edges = panel_edges(s, next, 1, &s_breaks);
        let mut chunk = 0.0;
        for w in edges.windows(2) {
            chunk += gauss_with(&rule, w[0], w[1], tail);
        }
        if !chunk.is_finite() {
            return Estimate::Infinite;
        }
        total += chunk;
        if chunk.abs() <= TAIL_REL_TOL * total.abs() {
            quiet += 1;
            if quiet >= TAIL_QUIET_CHUNKS {
                return Estimate::Finite(total);
            }
        } else {
            quiet = 0;
        }
        s = next;
    }
    if upper.is_finite() && upper.ln_1p() <= S_FAR {
        return Estimate::from_value(total);
    }
    // Slowly converging tails: extrapolate a local power law h ≈ A(1+s)^{-κ}.
    let (h0, h1) = (tail(s_end - 1.0), tail(s_end));
    if h1 == 0.0 {
        return Estimate::Finite(total);
    }
    if !(h0 > 0.0 && h1 > 0.0 && h0.is_finite() && h1.is_finite()) {
        return Estimate::Infinite;
    }
    let kappa = -(h1 / h0).ln() / ((1.0 + s_end) / s_end).ln();
    if kappa > 1.0 + 1e-6 {
        Estimate::from_value(total + h1 * (1.0 + s_end) / (kappa - 1.0))
    } else {
        Estimate::Infinite
    }
}

/// `sup_{0 ≤ u < upper} g(u)` sampled on the same nodes as
/// [`log_axis_integral`] plus the breakpoints themselves.
///
/// Reports `+∞` when the integrand is still growing at the far end of an
/// unbounded axis.
pub fn log_axis_sup(g: &dyn Fn(f64) -> f64, breaks: &[f64], upper: f64, cfg: &QuadConfig) -> Estimate {
    if upper <= 0.0 {
        return Estimate::Finite(0.0);
    }
    let rule = gauss_rule(cfg.order);
    let mut best = 0.0f64;
    let mut visit = |v: f64| {
        if v.is_nan() || v == f64::INFINITY {
            best = f64::INFINITY;
        } else if v > best {
            best = v;
        }
    };
    let main_end = cfg.u_max.min(upper);
    let edges = panel_edges(0.0, main_end, cfg.panels, breaks);
    for w in edges.windows(2) {
        let (a, b) = (w[0], w[1]);
        visit(g(a));
        for &(x, _) in rule.iter() {
            visit(g(0.5 * (a + b) + 0.5 * (b - a) * x));
        }
    }
    for &b in breaks.iter().filter(|&&b| b >= 0.0 && b < upper) {
        visit(g(b));
    }
    visit(g(main_end.min(upper * (1.0 - 1e-15))));
    if upper > cfg.u_max {
        let s_end = upper.ln_1p().min(S_FAR);
        let mut s = cfg.u_max.ln_1p();
        let mut last = g(cfg.u_max);
        let mut rising = false;
        while s < s_end {
            s = (s + TAIL_CHUNK).min(s_end);
            let v = g(s.exp_m1());
            visit(v);
            rising = v > last * (1.0 + 1e-12) && v > 0.0;
            last = v;
        }
        if rising && !(upper.is_finite() && upper.ln_1p() <= S_FAR) {
            return Estimate::Infinite;
        }
    }
    Estimate::from_value(best)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn gauss_is_exact_on_polynomials() {
        let v = gauss(5, 0.0, 2.0, |x| x.powi(9));
        assert!((v - 2f64.powi(10) / 10.0).abs() < 1e-10);
    }

    #[test]
    fn exponential_tail_converges() {
        let cfg = QuadConfig::default();
        let v = log_axis_integral(&|u: f64| (-u / 3.0).exp(), &[], f64::INFINITY, &cfg);
        assert!((v.value() - 3.0).abs() < 1e-10, "{v:?}");
    }

    #[test]
    fn power_tail_converges_and_harmonic_diverges() {
        let cfg = QuadConfig::default();
        let v = log_axis_integral(&|u: f64| (1.0 + u).powf(-2.5), &[], f64::INFINITY, &cfg);
        assert!((v.value() - 1.0 / 1.5).abs() < 1e-9, "{v:?}");
        let h = log_axis_integral(&|u: f64| (1.0 + u).powi(-1), &[], f64::INFINITY, &cfg);
        assert_eq!(h, Estimate::Infinite);
    }

    #[test]
    fn breakpoints_make_steps_exact() {
        let cfg = QuadConfig::default();
        let g = |u: f64| if u < 1.234 { 2.0 } else { 0.0 };
        let v = log_axis_integral(&g, &[1.234], f64::INFINITY, &cfg);
        assert!((v.value() - 2.468).abs() < 1e-12);
    }

    #[test]
    fn sup_detects_growth() {
        let cfg = QuadConfig::default();
        assert_eq!(log_axis_sup(&|u: f64| u, &[], f64::INFINITY, &cfg), Estimate::Infinite);
        let v = log_axis_sup(&|u: f64| (-(u - 2.0).powi(2)).exp(), &[2.0], f64::INFINITY, &cfg);
        assert!((v.value() - 1.0).abs() < 1e-15);
    }
}
