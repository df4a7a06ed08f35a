//! Vector-valued Fourier analysis on the torus, transforms of lattice step
//! functions on the line, and the trigonometric and Walsh systems.
//!
//! The transform convention is `f̂(ξ) = ∫ f(t) e^{-2πi t·ξ} dt` throughout.

use std::f64::consts::{PI, TAU};

use num_complex::Complex64;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rustfft::FftPlanner;
use serde::{Deserialize, Serialize};

use crate::quad::{self, QuadConfig};
use crate::values::{ValuePoint, ValueSpace};
use crate::{Error, Result};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Default, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum IndexNorm {
    #[default]
    Euclid,
    Max,
}

/// A point of `ℤ^d` for `d ∈ {1, 2}`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub struct MultiIndex {
    pub d: u8,
    pub k: [i64; 2],
}

impl MultiIndex {
    pub fn one(n: i64) -> Self {
        MultiIndex { d: 1, k: [n, 0] }
    }

    pub fn two(a: i64, b: i64) -> Self {
        MultiIndex { d: 2, k: [a, b] }
    }

    pub fn coords(&self) -> &[i64] {
        &self.k[..self.d as usize]
    }

    pub fn max_abs(&self) -> i64 {
        self.coords().iter().map(|v| v.abs()).max().unwrap_or(0)
    }

    pub fn norm(&self, which: IndexNorm) -> f64 {
        match which {
            IndexNorm::Euclid => self.coords().iter().map(|&v| (v * v) as f64).sum::<f64>().sqrt(),
            IndexNorm::Max => self.max_abs() as f64,
        }
    }

    /// All indices with `max_j |n_j| ≤ n`, in lexicographic order.
    pub fn boxed(d: usize, n: usize) -> Vec<MultiIndex> {
        let n = n as i64;
        match d {
            1 => (-n..=n).map(MultiIndex::one).collect(),
            _ => (-n..=n)
                .flat_map(|a| (-n..=n).map(move |b| MultiIndex::two(a, b)))
                .collect(),
        }
    }

    /// The shell `1 ≤ max_j |n_j| ≤ n`, in lexicographic order.
    pub fn shell(d: usize, n: usize) -> Vec<MultiIndex> {
        Self::boxed(d, n).into_iter().filter(|m| m.max_abs() > 0).collect()
    }
}

fn check_dim(d: usize) -> Result<()> {
    if d == 1 || d == 2 {
        Ok(())
    } else {
        Err(Error::domain(format!("dimension d must be 1 or 2, got {d}")))
    }
}

/// `Σ_{|n|_∞ ≤ N} c_n e^{2πi n·t}` with coefficients in a value space.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct TrigPolynomial {
    d: usize,
    n: usize,
    space: ValueSpace,
    coeffs: Vec<ValuePoint>,
}

impl TrigPolynomial {
    pub fn zero(d: usize, n: usize, space: ValueSpace) -> Result<Self> {
        check_dim(d)?;
        let side = 2 * n + 1;
        Ok(TrigPolynomial {
            d,
            n,
            space,
            coeffs: vec![space.zero(); side.pow(d as u32)],
        })
    }

    pub fn d(&self) -> usize {
        self.d
    }

    pub fn degree(&self) -> usize {
        self.n
    }

    pub fn space(&self) -> &ValueSpace {
        &self.space
    }

    fn slot(&self, idx: MultiIndex) -> Option<usize> {
        if idx.d as usize != self.d || idx.max_abs() > self.n as i64 {
            return None;
        }
        let side = (2 * self.n + 1) as i64;
        let off = self.n as i64;
        let pos = match self.d {
            1 => idx.k[0] + off,
            _ => (idx.k[0] + off) * side + idx.k[1] + off,
        };
        Some(pos as usize)
    }

    pub fn set(&mut self, idx: MultiIndex, x: ValuePoint) -> Result<()> {
        self.space.check(&x)?;
        let slot = self
            .slot(idx)
            .ok_or_else(|| Error::domain(format!("index {:?} outside degree {}", idx.coords(), self.n)))?;
        self.coeffs[slot] = x;
        Ok(())
    }

    pub fn coeff(&self, idx: MultiIndex) -> Option<&ValuePoint> {
        self.slot(idx).map(|s| &self.coeffs[s])
    }

    pub fn iter(&self) -> impl Iterator<Item = (MultiIndex, &ValuePoint)> {
        MultiIndex::boxed(self.d, self.n).into_iter().zip(self.coeffs.iter())
    }

    /// `(n, ‖c_n‖_X)` for every index in the box.
    pub fn coefficient_norms(&self) -> Vec<(MultiIndex, f64)> {
        self.iter()
            .map(|(i, x)| (i, self.space.norm_unchecked(&x.entries)))
            .collect()
    }

    pub fn is_zero(&self) -> bool {
        self.coeffs.iter().all(ValuePoint::is_zero)
    }

    pub fn scaled(&self, s: Complex64) -> Self {
        TrigPolynomial {
            coeffs: self.coeffs.iter().map(|x| x.scaled(s)).collect(),
            ..self.clone()
        }
    }

    /// Direct evaluation of the synthesis sum at `t`.
    pub fn eval(&self, t: &[f64]) -> ValuePoint {
        let mut out = self.space.zero();
        let n = self.n as i64;
        match self.d {
            1 => {
                let step = Complex64::from_polar(1.0, TAU * t[0]);
                let mut e = Complex64::from_polar(1.0, -TAU * t[0] * n as f64);
                for x in &self.coeffs {
                    out.add_assign_scaled(x, e);
                    e *= step;
                }
            }
            _ => {
                let side = (2 * n + 1) as usize;
                let e1: Vec<Complex64> = (-n..=n)
                    .map(|a| Complex64::from_polar(1.0, TAU * t[0] * a as f64))
                    .collect();
                let e2: Vec<Complex64> = (-n..=n)
                    .map(|b| Complex64::from_polar(1.0, TAU * t[1] * b as f64))
                    .collect();
                for (i, x) in self.coeffs.iter().enumerate() {
                    out.add_assign_scaled(x, e1[i / side] * e2[i % side]);
                }
            }
        }
        out
    }

    /// Values at the grid points `j/M` (row-major in `d = 2`).
    pub fn sample_grid(&self, m: usize) -> Vec<ValuePoint> {
        let dim = self.space.dim;
        let n = self.n as i64;
        let wrap = |k: i64| k.rem_euclid(m as i64) as usize;
        let mut planner = FftPlanner::<f64>::new();
        let fft = planner.plan_fft_inverse(m);
        match self.d {
            1 => {
                let mut out = vec![self.space.zero(); m];
                let mut buf = vec![Complex64::new(0.0, 0.0); m];
                for c in 0..dim {
                    buf.iter_mut().for_each(|z| *z = Complex64::new(0.0, 0.0));
                    for (i, x) in self.coeffs.iter().enumerate() {
                        buf[wrap(i as i64 - n)] += x.entries[c];
                    }
                    fft.process(&mut buf);
                    for (j, z) in buf.iter().enumerate() {
                        out[j].entries[c] = *z;
                    }
                }
                out
            }
            _ => {
                let side = (2 * n + 1) as usize;
                let mut out = vec![self.space.zero(); m * m];
                let mut grid = vec![Complex64::new(0.0, 0.0); m * m];
                for c in 0..dim {
                    grid.iter_mut().for_each(|z| *z = Complex64::new(0.0, 0.0));
                    for (i, x) in self.coeffs.iter().enumerate() {
                        let (a, b) = ((i / side) as i64 - n, (i % side) as i64 - n);
                        grid[wrap(a) * m + wrap(b)] += x.entries[c];
                    }
                    fft2(&mut grid, m, &*fft);
                    for (j, z) in grid.iter().enumerate() {
                        out[j].entries[c] = *z;
                    }
                }
                out
            }
        }
    }
}

fn fft2(grid: &mut [Complex64], m: usize, fft: &dyn rustfft::Fft<f64>) {
    for row in grid.chunks_mut(m) {
        fft.process(row);
    }
    let mut col = vec![Complex64::new(0.0, 0.0); m];
    for j in 0..m {
        for i in 0..m {
            col[i] = grid[i * m + j];
        }
        fft.process(&mut col);
        for i in 0..m {
            grid[i * m + j] = col[i];
        }
    }
}

fn seeded(seed: u64, stream: u64) -> ChaCha8Rng {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    rng.set_stream(stream);
    rng
}

fn random_point(rng: &mut ChaCha8Rng, dim: usize) -> ValuePoint {
    ValuePoint::new(
        (0..dim)
            .map(|_| Complex64::new(rng.gen_range(-1.0..1.0), rng.gen_range(-1.0..1.0)))
            .collect(),
    )
}

/// Polynomial of degree `n` whose coefficient entries are uniform in the
/// square `[-1, 1]²`, drawn from ChaCha8 with the given seed and stream.
pub fn random_trig_polynomial(d: usize, n: usize, space: ValueSpace, seed: u64, stream: u64) -> Result<TrigPolynomial> {
    let mut f = TrigPolynomial::zero(d, n, space)?;
    let mut rng = seeded(seed, stream);
    for idx in MultiIndex::boxed(d, n) {
        f.set(idx, random_point(&mut rng, space.dim))?;
    }
    Ok(f)
}

/// Step function on the cells `|k|_∞ ≤ k_max` with random values, as in
/// [`random_trig_polynomial`].
pub fn random_step_function(
    d: usize,
    a: f64,
    space: ValueSpace,
    k_max: usize,
    seed: u64,
    stream: u64,
) -> Result<StepFunction> {
    let mut rng = seeded(seed, stream);
    let cells = MultiIndex::boxed(d, k_max)
        .into_iter()
        .map(|k| (k, random_point(&mut rng, space.dim)))
        .collect();
    StepFunction::new(d, a, space, cells)
}

/// `f(t) = Σ c_n e^{2πi n·t}`.
pub fn trig_synthesis(f: &TrigPolynomial, t: &[f64]) -> ValuePoint {
    f.eval(t)
}

/// Fourier coefficients `|n|_∞ ≤ N` from samples on the uniform `M`-grid
/// (row-major for `d = 2`); exact for trigonometric polynomials of degree
/// `≤ N` when `M ≥ 2N+1`.
pub fn dft_coefficients(
    samples: &[ValuePoint],
    space: &ValueSpace,
    d: usize,
    m: usize,
    n: usize,
) -> Result<TrigPolynomial> {
    check_dim(d)?;
    if m < 2 * n + 1 {
        return Err(Error::domain(format!(
            "grid M = {m} aliases degree {n}; need M >= {}",
            2 * n + 1
        )));
    }
    if samples.len() != m.pow(d as u32) {
        return Err(Error::domain(format!(
            "expected {} samples, got {}",
            m.pow(d as u32),
            samples.len()
        )));
    }
    for s in samples {
        space.check(s)?;
    }
    let mut out = TrigPolynomial::zero(d, n, *space)?;
    let mut planner = FftPlanner::<f64>::new();
    let fft = planner.plan_fft_forward(m);
    let scale = 1.0 / samples.len() as f64;
    let wrap = |k: i64| k.rem_euclid(m as i64) as usize;
    let indices = MultiIndex::boxed(d, n);
    let mut buf = vec![Complex64::new(0.0, 0.0); samples.len()];
    for c in 0..space.dim {
        for (b, s) in buf.iter_mut().zip(samples) {
            *b = s.entries[c];
        }
        if d == 1 {
            fft.process(&mut buf);
        } else {
            fft2(&mut buf, m, &*fft);
        }
        for (slot, idx) in indices.iter().enumerate() {
            let pos = match d {
                1 => wrap(idx.k[0]),
                _ => wrap(idx.k[0]) * m + wrap(idx.k[1]),
            };
            out.coeffs[slot].entries[c] = buf[pos] * scale;
        }
    }
    Ok(out)
}

/// `sin(πx)/(πx)` with the removable singularity filled in.
pub fn sinc(x: f64) -> f64 {
    if x.abs() < 1e-8 {
        1.0 - (PI * x).powi(2) / 6.0
    } else {
        (PI * x).sin() / (PI * x)
    }
}

/// `Σ_k 1_{[-1/2,1/2]^d}(t/a + k) x_k`: value `x_k` on the cube `a(Q - k)`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct StepFunction {
    d: usize,
    a: f64,
    space: ValueSpace,
    cells: Vec<(MultiIndex, ValuePoint)>,
}

impl StepFunction {
    pub fn new(d: usize, a: f64, space: ValueSpace, cells: Vec<(MultiIndex, ValuePoint)>) -> Result<Self> {
        check_dim(d)?;
        if !(a > 0.0) || !a.is_finite() {
            return Err(Error::domain(format!("scale a must be positive, got {a}")));
        }
        let mut seen = std::collections::HashSet::new();
        for (k, x) in &cells {
            if k.d as usize != d {
                return Err(Error::domain("cell index has the wrong dimension"));
            }
            if !seen.insert(*k) {
                return Err(Error::domain(format!("cell {:?} listed twice", k.coords())));
            }
            space.check(x)?;
        }
        Ok(StepFunction { d, a, space, cells })
    }

    pub fn d(&self) -> usize {
        self.d
    }

    pub fn scale(&self) -> f64 {
        self.a
    }

    pub fn space(&self) -> &ValueSpace {
        &self.space
    }

    pub fn cells(&self) -> &[(MultiIndex, ValuePoint)] {
        &self.cells
    }

    pub fn is_zero(&self) -> bool {
        self.cells.iter().all(|(_, x)| x.is_zero())
    }

    pub fn max_cell(&self) -> i64 {
        self.cells.iter().map(|(k, _)| k.max_abs()).max().unwrap_or(0)
    }

    /// `f(t)`; cube boundaries are resolved towards the cell containing `t/a + k` rounded.
    pub fn eval(&self, t: &[f64]) -> ValuePoint {
        let target: Vec<i64> = t.iter().map(|&x| -(x / self.a).round() as i64).collect();
        self.cells
            .iter()
            .find(|(k, _)| k.coords() == target.as_slice())
            .map(|(_, x)| x.clone())
            .unwrap_or_else(|| self.space.zero())
    }

    /// `(a^d Σ ‖x_k‖^p)^{1/p}`.
    pub fn lp_norm(&self, p: f64) -> f64 {
        let vol = self.a.powi(self.d as i32);
        let norms = self.cells.iter().map(|(_, x)| self.space.norm_unchecked(&x.entries));
        if p.is_infinite() {
            return norms.fold(0.0, f64::max);
        }
        (vol * norms.map(|v| v.powf(p)).sum::<f64>()).powf(1.0 / p)
    }

    /// The trigonometric polynomial `Σ_k x_k e^{2πi k·t}` sharing the step
    /// function's coefficients.
    pub fn to_trig_polynomial(&self) -> Result<TrigPolynomial> {
        let n = self.max_cell() as usize;
        let mut f = TrigPolynomial::zero(self.d, n, self.space)?;
        for (k, x) in &self.cells {
            f.set(*k, x.clone())?;
        }
        Ok(f)
    }
}

/// `f̂(ξ) = a^d g(aξ) Σ_k e^{2πi k·aξ} x_k` with `g(ξ) = Π sinc(ξ_j)`.
pub fn step_ft(f: &StepFunction, xi: &[f64]) -> ValuePoint {
    let a = f.a;
    let scaled: Vec<f64> = xi.iter().map(|x| a * x).collect();
    let g: f64 = scaled.iter().map(|&x| sinc(x)).product();
    let mut out = f.space.zero();
    for (k, x) in &f.cells {
        let phase: f64 = k.coords().iter().zip(&scaled).map(|(&kj, &s)| kj as f64 * s).sum();
        out.add_assign_scaled(x, Complex64::from_polar(1.0, TAU * phase));
    }
    out.scaled(Complex64::new(a.powi(f.d as i32) * g, 0.0))
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct LineNorm {
    /// `(∫_{-M}^{M} ‖f̂‖^q |ξ|^{-γq} dξ)^{1/q}`.
    pub value: f64,
    /// Upper bound on how much the discarded tail `|ξ| > M` can add to `value`.
    pub tail_bound: f64,
}

const LINE_LEVELS: usize = 52;

/// `‖f̂‖_{L^q(ℝ, |ξ|^{-γq})}` for a one-dimensional step function, truncated
/// to `[-M, M]` with a certified tail.
pub fn weighted_lq_norm_ft_line(
    f: &StepFunction,
    q: f64,
    gamma: f64,
    window: f64,
    cfg: &QuadConfig,
) -> Result<LineNorm> {
    if f.d != 1 {
        return Err(Error::domain("line-side norms are only implemented for d = 1"));
    }
    if !(q > 1.0) || !q.is_finite() {
        return Err(Error::domain(format!(
            "need 1 < q < inf for a summable tail, got q={q}"
        )));
    }
    if !(gamma >= 0.0 && gamma * q < 1.0) {
        return Err(Error::domain(format!("need 0 <= gamma < 1/q, got gamma={gamma}")));
    }
    if !(window > 0.0) || !window.is_finite() {
        return Err(Error::domain("window M must be positive"));
    }
    let a = f.a;
    let gq = gamma * q;
    let space = f.space;
    let h = |xi: f64| -> f64 {
        let v = space.norm_unchecked(&step_ft(f, &[xi]).entries);
        if v == 0.0 {
            0.0
        } else {
            v.powf(q) * xi.abs().powf(-gq)
        }
    };
    let kmax = f.max_cell() as usize;
    let rule = quad::gauss_rule(cfg.order + 2 * kmax + 4);
    let first = (1.0 / a).min(window);
    let mut total = 0.0;
    for sign in [1.0, -1.0] {
        for lvl in 0..LINE_LEVELS {
            let hi = first * 0.5f64.powi(lvl as i32);
            total += quad::gauss_with(&rule, 0.5 * hi, hi, |x| h(sign * x));
        }
        let mut lo = first;
        let mut j = 1usize;
        while lo < window {
            let hi = ((j + 1) as f64 / a).min(window);
            total += quad::gauss_with(&rule, lo, hi, |x| h(sign * x));
            lo = hi;
            j += 1;
        }
    }
    let eps = first * 0.5f64.powi(LINE_LEVELS as i32);
    let f0 = space.norm_unchecked(&step_ft(f, &[0.0]).entries);
    total += 2.0 * f0.powf(q) * eps.powf(1.0 - gq) / (1.0 - gq);
    let mass: f64 = f.cells.iter().map(|(_, x)| space.norm_unchecked(&x.entries)).sum();
    let tail = 2.0 * (mass / PI).powf(q) * window.powf(1.0 - q - gq) / (q + gq - 1.0);
    let value = total.powf(1.0 / q);
    Ok(LineNorm {
        value,
        tail_bound: (total + tail).powf(1.0 / q) - value,
    })
}

/// Empirical bracketing constants `(C₁, C₂)` with
/// `C₁ ≤ |ξ|^{γq} Σ_m |g(ξ+m)|^q |ξ+m|^{-γq} ≤ C₂` on `ξ ∈ [-1/2, 1/2]`,
/// which sandwiches the line-side norm of a unit-scale step function between
/// multiples of the torus-side norm of its coefficient polynomial (`d = 1`).
pub fn transference_constants(q: f64, gamma: f64) -> Result<(f64, f64)> {
    if !(q > 1.0) || !(gamma >= 0.0 && gamma * q < 1.0) {
        return Err(Error::domain("transference constants need q > 1 and 0 <= gamma < 1/q"));
    }
    let gq = gamma * q;
    let terms = 4000i64;
    let density = |xi: f64| -> f64 {
        let mut s = 0.0;
        for m in -terms..=terms {
            let x = xi + m as f64;
            if x == 0.0 {
                s += 1.0;
            } else {
                s += sinc(x).abs().powf(q) * (xi.abs() / x.abs()).powf(gq);
            }
        }
        // Remaining |m| > terms: |g| ≤ 1/(π|x|) and |ξ/x| ≤ 1.
        s + 2.0 * (PI * (terms as f64 - 0.5)).powf(-q) * (terms as f64 - 0.5) / (q - 1.0)
    };
    let (mut lo, mut hi) = (f64::INFINITY, 0.0f64);
    let steps = 400;
    for i in 0..=steps {
        let xi = -0.5 + i as f64 / steps as f64;
        let v = density(xi);
        lo = lo.min(v);
        hi = hi.max(v);
    }
    Ok((lo, hi))
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Ons {
    /// `φ_0 = 1, φ_{2k-1} = e^{2πiks}, φ_{2k} = e^{-2πiks}`.
    Trigonometric,
    /// Walsh–Paley ordering.
    Walsh,
}

impl Ons {
    /// Frequency of the `n`-th trigonometric function.
    pub fn trig_frequency(n: usize) -> i64 {
        if n == 0 {
            0
        } else if n % 2 == 1 {
            n.div_ceil(2) as i64
        } else {
            -((n / 2) as i64)
        }
    }

    /// `φ_n(s)` for `s ∈ [0, 1)`.
    pub fn eval(&self, n: usize, s: f64) -> Complex64 {
        match self {
            Ons::Trigonometric => Complex64::from_polar(1.0, TAU * Self::trig_frequency(n) as f64 * s),
            Ons::Walsh => {
                let mut sign = 1.0;
                let mut bits = n;
                let mut k = 0;
                while bits > 0 {
                    if bits & 1 == 1 {
                        let digit = ((s * 2f64.powi(k + 1)).floor() as i64).rem_euclid(2);
                        if digit == 1 {
                            sign = -sign;
                        }
                    }
                    bits >>= 1;
                    k += 1;
                }
                Complex64::new(sign, 0.0)
            }
        }
    }
}

/// In-place Walsh–Hadamard transform in natural (Hadamard) order.
pub fn fwht(data: &mut [Complex64]) {
    let n = data.len();
    let mut h = 1;
    while h < n {
        for block in (0..n).step_by(2 * h) {
            for i in block..block + h {
                let (x, y) = (data[i], data[i + h]);
                data[i] = x + y;
                data[i + h] = x - y;
            }
        }
        h *= 2;
    }
}

fn bit_reverse(n: usize, bits: u32) -> usize {
    if bits == 0 {
        0
    } else {
        n.reverse_bits() >> (usize::BITS - bits)
    }
}

/// `c_n = ∫ f φ̄_n` for `n < count`, from samples at `s_j = j/M`.
pub fn ons_coefficients(
    samples: &[ValuePoint],
    space: &ValueSpace,
    system: Ons,
    count: usize,
) -> Result<Vec<ValuePoint>> {
    let m = samples.len();
    for s in samples {
        space.check(s)?;
    }
    match system {
        Ons::Trigonometric => {
            let top = (0..count)
                .map(|n| Ons::trig_frequency(n).unsigned_abs() as usize)
                .max()
                .unwrap_or(0);
            let poly = dft_coefficients(samples, space, 1, m, top)?;
            Ok((0..count)
                .map(|n| {
                    poly.coeff(MultiIndex::one(Ons::trig_frequency(n)))
                        .cloned()
                        .expect("index within degree")
                })
                .collect())
        }
        Ons::Walsh => {
            if !m.is_power_of_two() || m < count {
                return Err(Error::domain(format!(
                    "Walsh coefficients need a power-of-two grid of size >= {count}, got {m}"
                )));
            }
            let bits = m.trailing_zeros();
            let mut out = vec![space.zero(); count];
            let mut buf = vec![Complex64::new(0.0, 0.0); m];
            for c in 0..space.dim {
                for (b, s) in buf.iter_mut().zip(samples) {
                    *b = s.entries[c];
                }
                fwht(&mut buf);
                for (n, o) in out.iter_mut().enumerate() {
                    o.entries[c] = buf[bit_reverse(n, bits)] / m as f64;
                }
            }
            Ok(out)
        }
    }
}

/// `Σ_n c_n φ_n(j/M)` on the uniform `M`-grid.
pub fn ons_synthesis(coeffs: &[ValuePoint], space: &ValueSpace, system: Ons, m: usize) -> Result<Vec<ValuePoint>> {
    for c in coeffs {
        space.check(c)?;
    }
    match system {
        Ons::Walsh if m.is_power_of_two() && coeffs.len() <= m => {
            let bits = m.trailing_zeros();
            let mut out = vec![space.zero(); m];
            let mut buf = vec![Complex64::new(0.0, 0.0); m];
            for c in 0..space.dim {
                buf.iter_mut().for_each(|z| *z = Complex64::new(0.0, 0.0));
                for (n, x) in coeffs.iter().enumerate() {
                    buf[bit_reverse(n, bits)] = x.entries[c];
                }
                fwht(&mut buf);
                for (o, z) in out.iter_mut().zip(&buf) {
                    o.entries[c] = *z;
                }
            }
            Ok(out)
        }
        Ons::Walsh => Err(Error::domain(
            "Walsh synthesis needs a power-of-two grid covering the indices",
        )),
        Ons::Trigonometric => Ok((0..m)
            .map(|j| {
                let s = j as f64 / m as f64;
                let mut v = space.zero();
                for (n, x) in coeffs.iter().enumerate() {
                    v.add_assign_scaled(x, system.eval(n, s));
                }
                v
            })
            .collect()),
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn scalar_poly(d: usize, n: usize, entries: &[(MultiIndex, f64)]) -> TrigPolynomial {
        let mut f = TrigPolynomial::zero(d, n, ValueSpace::scalar()).unwrap();
        for &(i, v) in entries {
            f.set(i, ValuePoint::from_real(&[v])).unwrap();
        }
        f
    }

    #[test]
    fn single_mode_dft() {
        let space = ValueSpace::new(2.0, 2).unwrap();
        let x = ValuePoint::new(vec![Complex64::new(1.0, -0.5), Complex64::new(0.0, 2.0)]);
        let mut f = TrigPolynomial::zero(1, 4, space).unwrap();
        f.set(MultiIndex::one(-3), x.clone()).unwrap();
        let g = dft_coefficients(&f.sample_grid(9), &space, 1, 9, 4).unwrap();
        for (i, c) in g.iter() {
            let expect = if i == MultiIndex::one(-3) {
                x.clone()
            } else {
                space.zero()
            };
            for (a, b) in c.entries.iter().zip(&expect.entries) {
                assert!((a - b).norm() < 1e-13);
            }
        }
    }

    #[test]
    fn constant_dft_and_aliasing_guard() {
        let f = scalar_poly(2, 0, &[(MultiIndex::two(0, 0), 2.5)]);
        let g = dft_coefficients(&f.sample_grid(3), f.space(), 2, 3, 1).unwrap();
        assert!((g.coeff(MultiIndex::two(0, 0)).unwrap().entries[0].re - 2.5).abs() < 1e-14);
        assert!(g.coeff(MultiIndex::two(1, -1)).unwrap().entries[0].norm() < 1e-14);
        assert!(dft_coefficients(&f.sample_grid(4), f.space(), 1, 4, 2).is_err());
    }

    #[test]
    fn synthesis_examples() {
        let f = scalar_poly(
            1,
            2,
            &[
                (MultiIndex::one(-2), 1.0),
                (MultiIndex::one(1), 3.0),
                (MultiIndex::one(0), -0.5),
            ],
        );
        let at0 = trig_synthesis(&f, &[0.0]).entries[0];
        assert!((at0 - Complex64::new(3.5, 0.0)).norm() < 1e-14);
        let a = trig_synthesis(&f, &[0.123]).entries[0];
        let b = trig_synthesis(&f, &[1.123]).entries[0];
        assert!((a - b).norm() < 1e-12);
        let grid = f.sample_grid(7);
        for (j, v) in grid.iter().enumerate() {
            let direct = f.eval(&[j as f64 / 7.0]);
            assert!((v.entries[0] - direct.entries[0]).norm() < 1e-12);
        }
    }

    #[test]
    fn step_transform_examples() {
        let s = ValueSpace::scalar();
        let f = StepFunction::new(1, 1.0, s, vec![(MultiIndex::one(0), ValuePoint::from_real(&[2.0]))]).unwrap();
        assert!((step_ft(&f, &[0.0]).entries[0] - Complex64::new(2.0, 0.0)).norm() < 1e-15);
        assert!(step_ft(&f, &[1.0]).entries[0].norm() < 1e-15);
        assert_eq!(f.eval(&[0.2]).entries[0].re, 2.0);
        assert_eq!(f.eval(&[0.7]).entries[0].re, 0.0);
        assert!((f.lp_norm(3.0) - 2.0).abs() < 1e-15);
    }

    #[test]
    fn line_norm_examples() {
        let s = ValueSpace::scalar();
        let cube = StepFunction::new(1, 1.0, s, vec![(MultiIndex::one(0), ValuePoint::from_real(&[1.0]))]).unwrap();
        let cfg = QuadConfig::default();
        let l2 = weighted_lq_norm_ft_line(&cube, 2.0, 0.0, 200.0, &cfg).unwrap();
        assert!((l2.value - 1.0).abs() <= l2.tail_bound + 1e-9, "{l2:?}");
        let l4 = weighted_lq_norm_ft_line(&cube, 4.0, 0.0, 50.0, &cfg).unwrap();
        assert!((l4.value - (2.0f64 / 3.0).powf(0.25)).abs() < 1e-4, "{l4:?}");
        let doubled = StepFunction::new(1, 1.0, s, vec![(MultiIndex::one(0), ValuePoint::from_real(&[2.0]))]).unwrap();
        let l4d = weighted_lq_norm_ft_line(&doubled, 4.0, 0.0, 50.0, &cfg).unwrap();
        assert!((l4d.value - 2.0 * l4.value).abs() < 1e-12);
        assert!(weighted_lq_norm_ft_line(&cube, 1.0, 0.0, 5.0, &cfg).is_err());
        assert!(weighted_lq_norm_ft_line(&cube, 2.0, 0.5, 5.0, &cfg).is_err());
    }

    #[test]
    fn transference_bracket_constants() {
        let (c1, c2) = transference_constants(2.0, 0.0).unwrap();
        // Σ_m sinc²(ξ+m) = 1 identically.
        assert!((c1 - 1.0).abs() < 1e-3 && (c2 - 1.0).abs() < 1e-3, "{c1} {c2}");
        let (c1, c2) = transference_constants(3.0, 0.2).unwrap();
        assert!(
            c1 >= (2.0 / PI).powi(3) * 0.999 && (1.0..2.0).contains(&c2),
            "{c1} {c2}"
        );
    }

    #[test]
    fn walsh_basics() {
        let m = 16;
        let space = ValueSpace::scalar();
        for k in 0..m {
            let samples: Vec<ValuePoint> = (0..m)
                .map(|j| ValuePoint::new(vec![Ons::Walsh.eval(k, j as f64 / m as f64)]))
                .collect();
            let c = ons_coefficients(&samples, &space, Ons::Walsh, m).unwrap();
            for (n, v) in c.iter().enumerate() {
                let expect = if n == k { 1.0 } else { 0.0 };
                assert!(
                    (v.entries[0] - Complex64::new(expect, 0.0)).norm() < 1e-14,
                    "k={k} n={n}"
                );
            }
        }
        let samples = vec![ValuePoint::from_real(&[1.0]); 12];
        assert!(ons_coefficients(&samples, &space, Ons::Walsh, 4).is_err());
    }

    #[test]
    fn trig_ons_basics() {
        let m = 32;
        let space = ValueSpace::scalar();
        let samples: Vec<ValuePoint> = (0..m)
            .map(|j| ValuePoint::new(vec![Ons::Trigonometric.eval(5, j as f64 / m as f64)]))
            .collect();
        let c = ons_coefficients(&samples, &space, Ons::Trigonometric, 9).unwrap();
        for (n, v) in c.iter().enumerate() {
            let expect = if n == 5 { 1.0 } else { 0.0 };
            assert!((v.entries[0] - Complex64::new(expect, 0.0)).norm() < 1e-13);
        }
    }
}
