//! Non-increasing rearrangements and the Lorentz–Zygmund family of norms.

use serde::{Deserialize, Serialize};

use crate::fourier::{IndexNorm, MultiIndex, TrigPolynomial};
use crate::quad::{self, log_axis_integral, log_axis_sup, Estimate, QuadConfig};
use crate::{Error, Result};

/// A non-increasing function on `(0, total_measure)`.
///
/// Step curves are the main implementor; a few closed-form profiles exist
/// for analytic test cases.
pub trait Profile: Sync {
    fn total_measure(&self) -> f64;
    /// `f*(t)`.
    fn value(&self, t: f64) -> f64;
    /// `f*(e^{-u})`; override when `e^{-u}` underflows before the profile
    /// becomes constant.
    fn value_log(&self, u: f64) -> f64 {
        self.value((-u).exp())
    }
    /// `ln f*(e^{-u})`, for profiles that overflow in linear scale.
    fn ln_value_log(&self, u: f64) -> f64 {
        self.value_log(u).ln()
    }
    /// Points in `t` where the profile jumps.
    fn breakpoints(&self) -> Vec<f64> {
        Vec::new()
    }
    /// `∫_0^t f*(s) ds`.
    fn primitive(&self, t: f64) -> f64 {
        if t <= 0.0 {
            return 0.0;
        }
        // ∫_0^t f*(s) ds = t ∫_0^∞ f*(t e^{-v}) e^{-v} dv
        let breaks: Vec<f64> = self
            .breakpoints()
            .into_iter()
            .filter(|&b| b < t)
            .map(|b| (t / b).ln())
            .collect();
        let g = |v: f64| self.value(t * (-v).exp()) * (-v).exp();
        t * log_axis_integral(&g, &breaks, f64::INFINITY, &QuadConfig::default()).value()
    }
}

/// Rearranged step function: cell `j` has measure `t_j - t_{j-1}` and value
/// `v_j`, with `v_1 ≥ v_2 ≥ …`; zero beyond the last cell.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct RearrangementCurve {
    ends: Vec<f64>,
    values: Vec<f64>,
    prefix: Vec<f64>,
    total_measure: f64,
}

impl RearrangementCurve {
    /// Builds a curve from cell ends `t_1 < … < t_K` and values.
    pub fn from_steps(ends: Vec<f64>, values: Vec<f64>, total_measure: f64) -> Result<Self> {
        if ends.len() != values.len() {
            return Err(Error::domain("curve needs one value per cell"));
        }
        let mut prev_t = 0.0;
        let mut prev_v = f64::INFINITY;
        for (&t, &v) in ends.iter().zip(&values) {
            if !(t > prev_t) {
                return Err(Error::domain(
                    "curve breakpoints must be strictly increasing and positive",
                ));
            }
            if !(v >= 0.0 && v <= prev_v) || !v.is_finite() {
                return Err(Error::domain(
                    "curve values must be finite, nonnegative and non-increasing",
                ));
            }
            prev_t = t;
            prev_v = v;
        }
        if !(total_measure >= prev_t) || total_measure <= 0.0 {
            return Err(Error::domain("total measure must cover every cell"));
        }
        let mut prefix = Vec::with_capacity(ends.len());
        let (mut acc, mut start) = (0.0, 0.0);
        for (&t, &v) in ends.iter().zip(&values) {
            acc += v * (t - start);
            prefix.push(acc);
            start = t;
        }
        Ok(RearrangementCurve {
            ends,
            values,
            prefix,
            total_measure,
        })
    }

    /// Indicator-like curve `c·1_{(0,a)}` on `(0, total)`.
    pub fn constant(c: f64, a: f64, total: f64) -> Result<Self> {
        Self::from_steps(vec![a], vec![c], total)
    }

    pub fn zero(total: f64) -> Self {
        RearrangementCurve {
            ends: Vec::new(),
            values: Vec::new(),
            prefix: Vec::new(),
            total_measure: total,
        }
    }

    pub fn ends(&self) -> &[f64] {
        &self.ends
    }

    pub fn values(&self) -> &[f64] {
        &self.values
    }

    pub fn len(&self) -> usize {
        self.values.len()
    }

    pub fn is_empty(&self) -> bool {
        self.values.is_empty()
    }

    /// `|{f* > λ}|`.
    pub fn distribution(&self, lambda: f64) -> f64 {
        let k = self.values.partition_point(|&v| v > lambda);
        if k == 0 {
            0.0
        } else {
            self.ends[k - 1]
        }
    }

    /// Pointwise scaling `λ f*`.
    pub fn scaled(&self, lambda: f64) -> Self {
        let s = lambda.abs();
        RearrangementCurve {
            ends: self.ends.clone(),
            values: self.values.iter().map(|v| v * s).collect(),
            prefix: self.prefix.iter().map(|v| v * s).collect(),
            total_measure: self.total_measure,
        }
    }
}

impl Profile for RearrangementCurve {
    fn total_measure(&self) -> f64 {
        self.total_measure
    }

    fn value(&self, t: f64) -> f64 {
        let k = self.ends.partition_point(|&e| e < t);
        self.values.get(k).copied().unwrap_or(0.0)
    }

    fn breakpoints(&self) -> Vec<f64> {
        let mut out = Vec::new();
        for (j, &t) in self.ends.iter().enumerate() {
            let next = self.values.get(j + 1).copied().unwrap_or(0.0);
            if next != self.values[j] {
                out.push(t);
            }
        }
        out
    }

    fn primitive(&self, t: f64) -> f64 {
        if t <= 0.0 {
            return 0.0;
        }
        let k = self.ends.partition_point(|&e| e < t);
        if k >= self.ends.len() {
            return self.prefix.last().copied().unwrap_or(0.0);
        }
        let before = if k == 0 { 0.0 } else { self.prefix[k - 1] };
        let start = if k == 0 { 0.0 } else { self.ends[k - 1] };
        before + self.values[k] * (t - start)
    }
}

/// `c · t^{-a}` on `(0, total)`, zero afterwards.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct PowerProfile {
    pub c: f64,
    pub a: f64,
    pub total: f64,
}

impl Profile for PowerProfile {
    fn total_measure(&self) -> f64 {
        self.total
    }

    fn value(&self, t: f64) -> f64 {
        if t < self.total {
            self.c * t.powf(-self.a)
        } else {
            0.0
        }
    }

    fn value_log(&self, u: f64) -> f64 {
        if (-u).exp() < self.total {
            self.c * (self.a * u).exp()
        } else {
            0.0
        }
    }

    fn ln_value_log(&self, u: f64) -> f64 {
        if (-u).exp() < self.total {
            self.c.ln() + self.a * u
        } else {
            f64::NEG_INFINITY
        }
    }

    fn breakpoints(&self) -> Vec<f64> {
        if self.total.is_finite() {
            vec![self.total]
        } else {
            Vec::new()
        }
    }

    fn primitive(&self, t: f64) -> f64 {
        let t = t.min(self.total);
        if t <= 0.0 {
            return 0.0;
        }
        if self.a >= 1.0 {
            return f64::INFINITY;
        }
        self.c * t.powf(1.0 - self.a) / (1.0 - self.a)
    }
}

fn sort_desc(v: &mut [f64]) {
    v.sort_by(|a, b| b.total_cmp(a));
}

/// Rearranges a list of magnitudes on unit cells.
pub fn rearrange_sequence(norms: &[f64]) -> Result<RearrangementCurve> {
    if let Some(bad) = norms.iter().find(|v| !(**v >= 0.0) || !v.is_finite()) {
        return Err(Error::domain(format!(
            "rearrangement input must be finite and >= 0, got {bad}"
        )));
    }
    let mut values = norms.to_vec();
    sort_desc(&mut values);
    let ends = (1..=values.len()).map(|k| k as f64).collect();
    let total = values.len().max(1) as f64;
    RearrangementCurve::from_steps(ends, values, total)
}

/// Rearranges `(cell measure, magnitude)` samples.
pub fn rearrange_sampled(samples: &[(f64, f64)]) -> Result<RearrangementCurve> {
    if samples.is_empty() {
        return Err(Error::domain("no samples to rearrange"));
    }
    for &(m, v) in samples {
        if !(m > 0.0) || !m.is_finite() {
            return Err(Error::domain(format!("cell measure must be positive, got {m}")));
        }
        if !(v >= 0.0) || !v.is_finite() {
            return Err(Error::domain(format!("magnitude must be finite and >= 0, got {v}")));
        }
    }
    let mut cells = samples.to_vec();
    cells.sort_by(|a, b| b.1.total_cmp(&a.1));
    let mut ends = Vec::with_capacity(cells.len());
    let mut values = Vec::with_capacity(cells.len());
    let mut acc = 0.0;
    for (m, v) in cells {
        acc += m;
        // Merge equal magnitudes into one plateau.
        if values.last() == Some(&v) {
            *ends.last_mut().expect("nonempty") = acc;
        } else {
            ends.push(acc);
            values.push(v);
        }
    }
    RearrangementCurve::from_steps(ends, values, acc)
}

/// Rearranges equal-measure samples (a uniform grid of cells).
pub fn rearrange_uniform(mags: &[f64], cell_measure: f64) -> Result<RearrangementCurve> {
    let samples: Vec<(f64, f64)> = mags.iter().map(|&v| (cell_measure, v)).collect();
    rearrange_sampled(&samples)
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct LzParams {
    pub p: f64,
    pub q: f64,
    pub b: f64,
    #[serde(default)]
    pub loglog: f64,
    /// Generalized weight: exponent `α₀` for `t ≤ 1` and `α∞` for `t > 1`,
    /// replacing `b`.
    #[serde(default)]
    pub split: Option<(f64, f64)>,
}

impl LzParams {
    pub fn new(p: f64, q: f64, b: f64) -> Self {
        LzParams {
            p,
            q,
            b,
            loglog: 0.0,
            split: None,
        }
    }

    pub fn with_loglog(mut self, c: f64) -> Self {
        self.loglog = c;
        self
    }

    pub fn with_split(mut self, alpha0: f64, alpha_inf: f64) -> Self {
        self.split = Some((alpha0, alpha_inf));
        self
    }

    fn b_small(&self) -> f64 {
        self.split.map_or(self.b, |s| s.0)
    }

    fn b_large(&self) -> f64 {
        self.split.map_or(self.b, |s| s.1)
    }

    pub fn validate(&self) -> Result<()> {
        if !(self.p >= 1.0) || !(self.q >= 1.0) {
            return Err(Error::domain(format!(
                "Lorentz-Zygmund exponents need p, q in [1, inf], got p={}, q={}",
                self.p, self.q
            )));
        }
        if self.p.is_infinite() {
            let b = self.b_small();
            if self.q.is_infinite() {
                if b > 0.0 || (b == 0.0 && self.loglog > 0.0) {
                    return Err(Error::domain(
                        "p = q = inf needs b <= 0, otherwise the space is trivial",
                    ));
                }
            } else {
                let e = b + 1.0 / self.q;
                let ok = e < -1e-14 || (e.abs() <= 1e-14 && self.loglog + 1.0 / self.q < 0.0);
                if !ok {
                    return Err(Error::domain(format!(
                        "p = inf with q < inf needs b + 1/q < 0 (got {e}); the space is trivial otherwise"
                    )));
                }
            }
        }
        Ok(())
    }

    /// `ln` of `(1+|ln t|)^b (1+ln(1+|ln t|))^c` given `x = |ln t|`.
    #[inline]
    fn log_weight(&self, x: f64, small_t: bool) -> f64 {
        let b = if small_t { self.b_small() } else { self.b_large() };
        let mut w = 0.0;
        if b != 0.0 {
            w += b * x.ln_1p();
        }
        if self.loglog != 0.0 {
            w += self.loglog * x.ln_1p().ln_1p();
        }
        w
    }
}

/// Weight `(1+ln k)^b (1+ln(1+ln k))^c` of the sequence quasi-norm at `k ≥ 1`.
fn sequence_log_weight(params: &LzParams, k: f64) -> f64 {
    params.log_weight(k.ln(), k <= 1.0)
}

/// `(Σ_k (k^{1/p} w(k) x_k*)^q / k)^{1/q}` over the rearranged input.
pub fn lz_norm_sequence(values: &[f64], params: &LzParams) -> Result<f64> {
    params.validate()?;
    if let Some(bad) = values.iter().find(|v| !(**v >= 0.0) || !v.is_finite()) {
        return Err(Error::domain(format!(
            "sequence entries must be finite and >= 0, got {bad}"
        )));
    }
    let mut xs = values.to_vec();
    sort_desc(&mut xs);
    lz_norm_sorted(&xs, params)
}

/// [`lz_norm_sequence`] on the lattice `ℤ^d` with counting measure.
///
/// No triviality rule applies there: `ℓ^{∞,q}(log ℓ)^b` with `b > -1/q`
/// is a proper sequence space (the target of the Zygmund inequalities), so
/// only the exponent ranges are checked.
pub fn lz_norm_lattice(values: &[f64], params: &LzParams) -> Result<f64> {
    if !(params.p >= 1.0) || !(params.q >= 1.0) {
        return Err(Error::domain(format!(
            "Lorentz-Zygmund exponents need p, q in [1, inf], got p={}, q={}",
            params.p, params.q
        )));
    }
    if let Some(bad) = values.iter().find(|v| !(**v >= 0.0) || !v.is_finite()) {
        return Err(Error::domain(format!(
            "sequence entries must be finite and >= 0, got {bad}"
        )));
    }
    let mut xs = values.to_vec();
    sort_desc(&mut xs);
    lz_norm_sorted(&xs, params)
}

/// Decreasing rearrangement of `‖f‖_X` sampled on the uniform `M`-grid of
/// the torus, each sample carrying measure `M^{-d}`.
pub fn torus_rearrangement(f: &TrigPolynomial, m: usize) -> Result<RearrangementCurve> {
    let space = f.space();
    let mags: Vec<f64> = f
        .sample_grid(m)
        .iter()
        .map(|x| space.norm_unchecked(&x.entries))
        .collect();
    rearrange_uniform(&mags, 1.0 / mags.len() as f64)
}

/// Same as [`lz_norm_sequence`] for input already sorted in decreasing order.
pub(crate) fn lz_norm_sorted(xs: &[f64], params: &LzParams) -> Result<f64> {
    let inv_p = if params.p.is_infinite() { 0.0 } else { 1.0 / params.p };
    let log_term = |k: usize, x: f64| {
        let kf = k as f64;
        inv_p * kf.ln() + sequence_log_weight(params, kf) + x.ln()
    };
    if params.q.is_infinite() {
        let mut best = 0.0f64;
        for (i, &x) in xs.iter().enumerate() {
            if x > 0.0 {
                best = best.max(log_term(i + 1, x).exp());
            }
        }
        return Ok(best);
    }
    let q = params.q;
    // Factor out the largest log-term so the sum cannot overflow.
    let logs: Vec<f64> = xs
        .iter()
        .enumerate()
        .filter(|(_, &x)| x > 0.0)
        .map(|(i, &x)| q * log_term(i + 1, x) - ((i + 1) as f64).ln())
        .collect();
    let top = logs.iter().copied().fold(f64::NEG_INFINITY, f64::max);
    if top == f64::NEG_INFINITY {
        return Ok(0.0);
    }
    let s: f64 = logs.iter().map(|l| (l - top).exp()).sum();
    Ok(((top + s.ln()) / q).exp())
}

/// `(∫ (t^{1/p} w(t) f*(t))^q dt/t)^{1/q}` over `(0, total_measure)`.
pub fn lz_norm_function(profile: &dyn Profile, params: &LzParams, cfg: &QuadConfig) -> Result<Estimate> {
    params.validate()?;
    cfg.validate()?;
    let total = profile.total_measure();
    let inv_p = if params.p.is_infinite() { 0.0 } else { 1.0 / params.p };
    let jumps = profile.breakpoints();

    // (0, min(1,T)] in u = -ln t, shifted so the axis starts at u0 = -ln min(1,T).
    let u0 = if total < 1.0 { -total.ln() } else { 0.0 };
    let small_breaks: Vec<f64> = jumps
        .iter()
        .filter(|&&t| t < 1.0 && t < total)
        .map(|&t| -t.ln() - u0)
        .collect();
    let small = |x: f64| -> f64 {
        let u = x + u0;
        let lv = profile.ln_value_log(u);
        if lv == f64::NEG_INFINITY || lv.is_nan() {
            return 0.0;
        }
        let l = -u * inv_p + params.log_weight(u, true) + lv;
        if params.q.is_infinite() {
            l.exp()
        } else {
            (params.q * l).exp()
        }
    };
    // (1, T) in v = ln t.
    let upper_large = if total > 1.0 { total.ln() } else { 0.0 };
    let large_breaks: Vec<f64> = jumps
        .iter()
        .filter(|&&t| t > 1.0 && t < total)
        .map(|&t| t.ln())
        .collect();
    let large = |v: f64| -> f64 {
        let f = profile.value(v.exp());
        if f <= 0.0 {
            return 0.0;
        }
        let l = v * inv_p + params.log_weight(v, false) + f.ln();
        if params.q.is_infinite() {
            l.exp()
        } else {
            (params.q * l).exp()
        }
    };
    // Step curves vanish past their last cell; stop the large-t axis there.
    let upper_large = match jumps.last() {
        Some(&t) if profile.value(t * (1.0 + 1e-12)) == 0.0 && t > 1.0 => upper_large.min(t.ln()),
        Some(&t) if profile.value(t * (1.0 + 1e-12)) == 0.0 && t <= 1.0 => 0.0,
        _ => upper_large,
    };

    if params.q.is_infinite() {
        let a = log_axis_sup(&small, &small_breaks, f64::INFINITY, cfg);
        let b = log_axis_sup(&large, &large_breaks, upper_large, cfg);
        return Ok(match (a, b) {
            (Estimate::Finite(x), Estimate::Finite(y)) => Estimate::Finite(x.max(y)),
            _ => Estimate::Infinite,
        });
    }
    let a = log_axis_integral(&small, &small_breaks, f64::INFINITY, cfg);
    let b = log_axis_integral(&large, &large_breaks, upper_large, cfg);
    Ok(match (a, b) {
        (Estimate::Finite(x), Estimate::Finite(y)) => Estimate::from_value((x + y).powf(1.0 / params.q)),
        _ => Estimate::Infinite,
    })
}

/// `(Σ_n ‖x_n‖^p (|n|+1)^{wp})^{1/p}` over `(index, ‖x_n‖)` pairs.
pub fn weighted_lp_norm_sequence(norms: &[(MultiIndex, f64)], p: f64, w: f64, index_norm: IndexNorm) -> f64 {
    if p.is_infinite() {
        return norms
            .iter()
            .map(|(n, x)| x * (n.norm(index_norm) + 1.0).powf(w))
            .fold(0.0, f64::max);
    }
    let s: f64 = norms
        .iter()
        .map(|(n, x)| x.powf(p) * (n.norm(index_norm) + 1.0).powf(w * p))
        .sum();
    s.powf(1.0 / p)
}

/// Number of dyadic levels in the graded mesh around the origin.
const TORUS_LEVELS: usize = 52;

/// `(∫_{[-1/2,1/2]^d} ‖f(t)‖^p |t|^{wp} dt)^{1/p}`.
///
/// Unweighted norms use the rectangle rule on the `M`-grid, which is exact
/// for `p = 2` once `M ≥ 2N+1`. Weighted norms use Gauss–Legendre panels on a
/// dyadic mesh graded towards the origin.
pub fn weighted_lp_norm_torus(f: &TrigPolynomial, p: f64, w: f64, grid_m: usize, cfg: &QuadConfig) -> Result<f64> {
    let d = f.d();
    if grid_m < 2 * f.degree() + 1 {
        return Err(Error::domain(format!(
            "grid M = {grid_m} must be at least 2N+1 = {}",
            2 * f.degree() + 1
        )));
    }
    if !(p >= 1.0) {
        return Err(Error::domain(format!("p must be >= 1, got {p}")));
    }
    let a = w * p;
    if p.is_finite() && a <= -(d as f64) {
        return Err(Error::domain(format!(
            "weight |t|^{a} is not integrable near 0 in dimension {d}"
        )));
    }
    let space = f.space();
    if w == 0.0 {
        let samples = f.sample_grid(grid_m);
        let norms = samples.iter().map(|x| space.norm_unchecked(&x.entries));
        if p.is_infinite() {
            return Ok(norms.fold(0.0, f64::max));
        }
        let mean = norms.map(|v| v.powf(p)).sum::<f64>() / samples.len() as f64;
        return Ok(mean.powf(1.0 / p));
    }
    if p.is_infinite() {
        return Err(Error::domain("weighted sup norms on the torus are not supported"));
    }
    let n = f.degree() as f64;
    let base = if d == 2 { 2 * cfg.order } else { cfg.order };
    let nodes_for = |width: f64| base + (8.0 * n * width).ceil() as usize;
    let g = |t: &[f64]| -> f64 {
        let r = t.iter().map(|x| x * x).sum::<f64>().sqrt();
        let v = space.norm_unchecked(&f.eval(t).entries);
        if v == 0.0 {
            0.0
        } else {
            v.powf(p) * r.powf(a)
        }
    };
    let origin = vec![0.0; d];
    let g0 = space.norm_unchecked(&f.eval(&origin).entries).powf(p);
    let mut total = 0.0;
    match d {
        1 => {
            for k in 0..TORUS_LEVELS {
                let hi = 0.5 * 0.5f64.powi(k as i32);
                let lo = 0.5 * hi;
                let rule = quad::gauss_rule(nodes_for(hi - lo));
                total += quad::gauss_with(&rule, lo, hi, |t| g(&[t]));
                total += quad::gauss_with(&rule, -hi, -lo, |t| g(&[t]));
            }
            let eps = 0.5 * 0.5f64.powi(TORUS_LEVELS as i32);
            total += 2.0 * g0 * eps.powf(a + 1.0) / (a + 1.0);
        }
        2 => {
            for k in 0..TORUS_LEVELS {
                let r = 0.5 * 0.5f64.powi(k as i32);
                let h = 0.5 * r;
                // Square ring [-r,r]^2 minus [-h,h]^2 as four rectangles.
                let rects = [(-r, r, h, r), (-r, r, -r, -h), (-r, -h, -h, h), (h, r, -h, h)];
                for (x0, x1, y0, y1) in rects {
                    let rx = quad::gauss_rule(nodes_for(x1 - x0));
                    let ry = quad::gauss_rule(nodes_for(y1 - y0));
                    total += quad::gauss_with(&rx, x0, x1, |x| quad::gauss_with(&ry, y0, y1, |y| g(&[x, y])));
                }
            }
            let eps = 0.5 * 0.5f64.powi(TORUS_LEVELS as i32);
            let angular = quad::gauss(32, 0.0, std::f64::consts::FRAC_PI_4, |phi| phi.cos().powf(-(a + 2.0)));
            total += g0 * 8.0 * eps.powf(a + 2.0) / (a + 2.0) * angular;
        }
        _ => return Err(Error::domain("only d in {1,2} is supported")),
    }
    Ok(total.powf(1.0 / p))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::values::{ValuePoint, ValueSpace};

    fn cfg() -> QuadConfig {
        QuadConfig::default()
    }

    #[test]
    fn sequence_rearrangement() {
        let c = rearrange_sequence(&[3.0, 1.0, 2.0]).unwrap();
        assert_eq!(c.values(), &[3.0, 2.0, 1.0]);
        assert_eq!(c.len(), 3);
        let c = rearrange_sequence(&[2.5; 4]).unwrap();
        assert_eq!(c.values(), &[2.5; 4]);
        assert!(rearrange_sequence(&[1.0, -1.0]).is_err());
    }

    #[test]
    fn sampled_rearrangement() {
        let c = rearrange_sampled(&[(1.0, 4.0)]).unwrap();
        assert_eq!(c.value(0.3), 4.0);
        assert_eq!(c.total_measure(), 1.0);
        let c = rearrange_sampled(&[(0.5, 1.0), (0.5, 2.0)]).unwrap();
        assert_eq!(c.value(0.25), 2.0);
        assert_eq!(c.value(0.5), 2.0);
        assert_eq!(c.value(0.75), 1.0);
        assert!(rearrange_sampled(&[(0.0, 1.0)]).is_err());
    }

    #[test]
    fn sampled_sine_l1() {
        let m = 1 << 14;
        let mags: Vec<f64> = (0..m)
            .map(|j| ((j as f64 + 0.5) / m as f64 * std::f64::consts::TAU).sin().abs())
            .collect();
        let c = rearrange_uniform(&mags, 1.0 / m as f64).unwrap();
        let l1 = lz_norm_function(&c, &LzParams::new(1.0, 1.0, 0.0), &cfg())
            .unwrap()
            .value();
        assert!((l1 - 2.0 / std::f64::consts::PI).abs() < 1e-3);
        assert!((c.primitive(1.0) - l1).abs() < 1e-9);
    }

    #[test]
    fn lz_sequence_examples() {
        let p = LzParams::new(3.0, 1.5, 0.7);
        assert!((lz_norm_sequence(&[4.2], &p).unwrap() - 4.2).abs() < 1e-14);
        let xs = [0.3, 2.0, 1.1, 0.0, 5.0];
        let lp = xs.iter().map(|x: &f64| x.powf(2.5)).sum::<f64>().powf(1.0 / 2.5);
        let v = lz_norm_sequence(&xs, &LzParams::new(2.5, 2.5, 0.0)).unwrap();
        assert!((v - lp).abs() < 1e-13 * lp);
        assert!(lz_norm_sequence(&xs, &LzParams::new(f64::INFINITY, 2.0, 0.0)).is_err());
        assert!(lz_norm_sequence(&xs, &LzParams::new(f64::INFINITY, 2.0, -0.6)).is_ok());
        assert!(lz_norm_sequence(&xs, &LzParams::new(f64::INFINITY, f64::INFINITY, 0.1)).is_err());
    }

    #[test]
    fn lz_function_examples() {
        let one = RearrangementCurve::constant(1.0, 1.0, 1.0).unwrap();
        let v = lz_norm_function(&one, &LzParams::new(1.0, 1.0, 0.0), &cfg())
            .unwrap()
            .value();
        assert!((v - 1.0).abs() < 1e-12, "{v}");
        let ind = RearrangementCurve::constant(1.0, 0.37, 1.0).unwrap();
        let v = lz_norm_function(&ind, &LzParams::new(1.0, 1.0, 0.0), &cfg())
            .unwrap()
            .value();
        assert!((v - 0.37).abs() < 1e-12, "{v}");
        let pw = PowerProfile {
            c: 1.0,
            a: 1.0 / 3.0,
            total: 1.0,
        };
        let v = lz_norm_function(&pw, &LzParams::new(2.0, 2.0, 0.0), &cfg())
            .unwrap()
            .value();
        assert!((v - 3f64.sqrt()).abs() < 1e-6, "{v}");
    }

    #[test]
    fn lz_function_log_weight_and_infinity() {
        // ∫_0^1 (1-ln t) dt = 2
        let one = RearrangementCurve::constant(1.0, 1.0, 1.0).unwrap();
        let v = lz_norm_function(&one, &LzParams::new(1.0, 1.0, 1.0), &cfg())
            .unwrap()
            .value();
        assert!((v - 2.0).abs() < 1e-10, "{v}");
        // ∫_0^1 (1+|ln t|)^{-2} dt/t = 1
        let v = lz_norm_function(&one, &LzParams::new(f64::INFINITY, 1.0, -2.0), &cfg()).unwrap();
        assert!((v.value() - 1.0).abs() < 1e-9, "{v:?}");
        // t^{-1/2} is not in L^2: ∫ dt/t diverges at 0.
        let pw = PowerProfile {
            c: 1.0,
            a: 0.5,
            total: 1.0,
        };
        let v = lz_norm_function(&pw, &LzParams::new(2.0, 2.0, 0.0), &cfg()).unwrap();
        assert_eq!(v, Estimate::Infinite);
    }

    #[test]
    fn lz_function_past_one_and_split_weight() {
        // f* = 1 on (0,3): L^1 norm 3, with split weight α∞ = 1 the part on
        // (1,3) becomes ∫_1^3 (1+ln t) dt = 3 ln 3.
        let c = RearrangementCurve::constant(1.0, 3.0, 3.0).unwrap();
        let v = lz_norm_function(&c, &LzParams::new(1.0, 1.0, 0.0), &cfg())
            .unwrap()
            .value();
        assert!((v - 3.0).abs() < 1e-10, "{v}");
        let v = lz_norm_function(&c, &LzParams::new(1.0, 1.0, 0.0).with_split(0.0, 1.0), &cfg())
            .unwrap()
            .value();
        assert!((v - (1.0 + 3.0 * 3f64.ln())).abs() < 1e-9, "{v}");
    }

    #[test]
    fn sup_norm_of_step() {
        let c = RearrangementCurve::from_steps(vec![0.25, 1.0], vec![2.0, 1.0], 1.0).unwrap();
        // sup t^{1/2} f*(t) is attained at t=1/4 (value 1) and t=1 (value 1).
        let v = lz_norm_function(&c, &LzParams::new(2.0, f64::INFINITY, 0.0), &cfg())
            .unwrap()
            .value();
        assert!((v - 1.0).abs() < 1e-12, "{v}");
    }

    #[test]
    fn weighted_sequence_examples() {
        let z = MultiIndex::one(0);
        let one = MultiIndex::one(1);
        assert_eq!(weighted_lp_norm_sequence(&[(z, 3.0)], 2.0, 1.0, IndexNorm::Euclid), 3.0);
        assert!((weighted_lp_norm_sequence(&[(one, 3.0)], 2.0, 1.0, IndexNorm::Euclid) - 6.0).abs() < 1e-14);
    }

    #[test]
    fn torus_norm_examples() {
        let s = ValueSpace::new(2.0, 2).unwrap();
        let x = ValuePoint::from_real(&[3.0, 4.0]);
        let mut f = TrigPolynomial::zero(1, 3, s).unwrap();
        f.set(MultiIndex::one(0), x).unwrap();
        let v = weighted_lp_norm_torus(&f, 1.5, 0.0, 7, &cfg()).unwrap();
        assert!((v - 5.0).abs() < 1e-13);
        let scalar = ValueSpace::scalar();
        let mut one = TrigPolynomial::zero(1, 0, scalar).unwrap();
        one.set(MultiIndex::one(0), ValuePoint::from_real(&[1.0])).unwrap();
        let v = weighted_lp_norm_torus(&one, 1.0, 1.0, 1, &cfg()).unwrap();
        assert!((v - 0.25).abs() < 1e-8, "{v}");
        assert!(weighted_lp_norm_torus(&one, 1.0, -1.0, 1, &cfg()).is_err());
        assert!(weighted_lp_norm_torus(&f, 1.0, 0.0, 6, &cfg()).is_err());
    }

    #[test]
    fn torus_weighted_2d_constant() {
        // ∫_{[-1/2,1/2]^2} |t|^{-1} dt = 4 ln(1+√2)
        let mut one = TrigPolynomial::zero(2, 0, ValueSpace::scalar()).unwrap();
        one.set(MultiIndex::two(0, 0), ValuePoint::from_real(&[1.0])).unwrap();
        let v = weighted_lp_norm_torus(&one, 1.0, -1.0, 1, &cfg()).unwrap();
        let exact = 4.0 * (1.0 + 2f64.sqrt()).ln();
        assert!((v - exact).abs() < 1e-8, "{v} vs {exact}");
    }
}
