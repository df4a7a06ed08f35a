//! Finite-dimensional value spaces `ℓ^r_m` over ℂ, Rademacher averages and
//! type/cotype ratios.

use num_complex::Complex64;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

use crate::{Error, Result};

/// Conjugate exponent `r'` with `1/r + 1/r' = 1`.
pub fn dual_exponent(r: f64) -> f64 {
    if r == 1.0 {
        f64::INFINITY
    } else if r.is_infinite() {
        1.0
    } else {
        r / (r - 1.0)
    }
}

/// `(Σ|x_i|^r)^{1/r}`, or the max norm for `r = ∞`.
pub fn lr_norm(entries: &[Complex64], r: f64) -> f64 {
    lr_norm_real(entries.iter().map(|z| z.norm()), r)
}

/// ℓ^r norm of a list of nonnegative magnitudes.
pub fn lr_norm_real(mags: impl IntoIterator<Item = f64>, r: f64) -> f64 {
    if r.is_infinite() {
        return mags.into_iter().fold(0.0, f64::max);
    }
    if r == 1.0 {
        return mags.into_iter().sum();
    }
    if r == 2.0 {
        return mags.into_iter().map(|m| m * m).sum::<f64>().sqrt();
    }
    // Scale by the largest magnitude so that large r does not overflow.
    let mags: Vec<f64> = mags.into_iter().collect();
    let top = mags.iter().copied().fold(0.0, f64::max);
    if top == 0.0 || !top.is_finite() {
        return top;
    }
    let s: f64 = mags.iter().map(|m| (m / top).powf(r)).sum();
    top * s.powf(1.0 / r)
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct ValueSpace {
    pub r: f64,
    pub dim: usize,
}

impl ValueSpace {
    pub fn new(r: f64, dim: usize) -> Result<Self> {
        if !(r >= 1.0) {
            return Err(Error::domain(format!("value space exponent must be >= 1, got {r}")));
        }
        if dim == 0 {
            return Err(Error::domain("value space dimension must be >= 1"));
        }
        Ok(ValueSpace { r, dim })
    }

    pub fn scalar() -> Self {
        ValueSpace { r: 2.0, dim: 1 }
    }

    pub fn dual(&self) -> ValueSpace {
        ValueSpace {
            r: dual_exponent(self.r),
            dim: self.dim,
        }
    }

    pub fn zero(&self) -> ValuePoint {
        ValuePoint::zeros(self.dim)
    }

    pub fn basis(&self, k: usize) -> ValuePoint {
        let mut x = self.zero();
        x.entries[k] = Complex64::new(1.0, 0.0);
        x
    }

    pub fn norm(&self, x: &ValuePoint) -> Result<f64> {
        self.check(x)?;
        if let Some(bad) = x.entries.iter().find(|z| !(z.re.is_finite() && z.im.is_finite())) {
            return Err(Error::domain(format!("non-finite entry {bad}")));
        }
        Ok(lr_norm(&x.entries, self.r))
    }

    /// Norm without validation, for hot loops over trusted data.
    #[inline]
    pub fn norm_unchecked(&self, x: &[Complex64]) -> f64 {
        lr_norm(x, self.r)
    }

    pub(crate) fn check(&self, x: &ValuePoint) -> Result<()> {
        if x.entries.len() != self.dim {
            return Err(Error::domain(format!(
                "point has {} entries, space has dimension {}",
                x.entries.len(),
                self.dim
            )));
        }
        Ok(())
    }
}

/// Coordinates of a vector in some `ℓ^r_m`; the space travels separately.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ValuePoint {
    pub entries: Vec<Complex64>,
}

impl ValuePoint {
    pub fn new(entries: Vec<Complex64>) -> Self {
        ValuePoint { entries }
    }

    pub fn zeros(dim: usize) -> Self {
        ValuePoint {
            entries: vec![Complex64::new(0.0, 0.0); dim],
        }
    }

    pub fn from_real(values: &[f64]) -> Self {
        ValuePoint {
            entries: values.iter().map(|&v| Complex64::new(v, 0.0)).collect(),
        }
    }

    pub fn dim(&self) -> usize {
        self.entries.len()
    }

    pub fn scaled(&self, s: Complex64) -> ValuePoint {
        ValuePoint {
            entries: self.entries.iter().map(|z| z * s).collect(),
        }
    }

    pub fn add_assign_scaled(&mut self, other: &ValuePoint, s: Complex64) {
        for (a, b) in self.entries.iter_mut().zip(&other.entries) {
            *a += b * s;
        }
    }

    pub fn is_zero(&self) -> bool {
        self.entries.iter().all(|z| z.re == 0.0 && z.im == 0.0)
    }
}

/// `⟨x, y⟩ = Σ x_i · conj(y_i)`.
pub fn dual_pair(x: &ValuePoint, y: &ValuePoint) -> Result<Complex64> {
    if x.dim() != y.dim() {
        return Err(Error::domain(format!(
            "pairing needs equal dimensions, got {} and {}",
            x.dim(),
            y.dim()
        )));
    }
    Ok(x.entries.iter().zip(&y.entries).map(|(a, b)| a * b.conj()).sum())
}

/// The dual vector that attains equality in Hölder's inequality for `x`,
/// normalized to unit norm in `ℓ^{r'}`.
pub fn norming_functional(space: &ValueSpace, x: &ValuePoint) -> Result<ValuePoint> {
    let nx = space.norm(x)?;
    if nx == 0.0 {
        return Ok(space.zero());
    }
    let r = space.r;
    let entries: Vec<Complex64> = if r.is_infinite() {
        let k = x
            .entries
            .iter()
            .enumerate()
            .max_by(|a, b| a.1.norm().total_cmp(&b.1.norm()))
            .map(|(k, _)| k)
            .unwrap_or(0);
        let mut e = vec![Complex64::new(0.0, 0.0); x.dim()];
        let z = x.entries[k];
        e[k] = z / z.norm();
        e
    } else {
        x.entries
            .iter()
            .map(|z| {
                let m = z.norm();
                if m == 0.0 {
                    Complex64::new(0.0, 0.0)
                } else {
                    // conj is applied by dual_pair, so keep the phase of z.
                    z / m * (m / nx).powf(r - 1.0)
                }
            })
            .collect()
    };
    Ok(ValuePoint { entries })
}

/// Identity copy of `ℓ^s_K` (lattice of `K` points) inside a value space of
/// the same dimension. Used to realise the finite-dimensional constructions
/// on the integer lattice concretely.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct LatticeCopy {
    pub source_r: f64,
    pub target: ValueSpace,
}

impl LatticeCopy {
    pub fn apply(&self, a: &[Complex64]) -> Result<ValuePoint> {
        if a.len() != self.target.dim {
            return Err(Error::domain("lattice copy: wrong source dimension"));
        }
        Ok(ValuePoint::new(a.to_vec()))
    }

    /// Banach–Mazur distortion `‖T‖‖T^{-1}‖` of the identity `ℓ^s_K → ℓ^r_K`.
    pub fn distortion(&self) -> f64 {
        let k = self.target.dim as f64;
        let (s, r) = (1.0 / self.source_r, 1.0 / self.target.r);
        k.powf((s - r).abs())
    }
}

/// Number of lattice points `n ∈ ℤ^d` with `1 ≤ max_j |n_j| ≤ N`.
pub fn lattice_shell_size(n: usize, d: usize) -> usize {
    (2 * n + 1).pow(d as u32) - 1
}

/// Copy of `ℓ^1` on the lattice shell `1 ≤ |n|_∞ ≤ N` as `ℓ^1_K`.
pub fn embed_l1_copy(n: usize, d: usize) -> Result<LatticeCopy> {
    if n == 0 || !(d == 1 || d == 2) {
        return Err(Error::domain("embed_l1_copy needs N >= 1 and d in {1,2}"));
    }
    Ok(LatticeCopy {
        source_r: 1.0,
        target: ValueSpace::new(1.0, lattice_shell_size(n, d))?,
    })
}

/// `count` points with entries uniform in `[-1, 1]²`, from ChaCha8 with the
/// given seed and stream.
pub fn random_points(space: &ValueSpace, count: usize, seed: u64, stream: u64) -> Vec<ValuePoint> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    rng.set_stream(stream);
    (0..count)
        .map(|_| {
            ValuePoint::new(
                (0..space.dim)
                    .map(|_| Complex64::new(rng.gen_range(-1.0..1.0), rng.gen_range(-1.0..1.0)))
                    .collect(),
            )
        })
        .collect()
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case", tag = "method")]
pub enum AverageMethod {
    /// All `2^m` real sign patterns.
    ExactEnum,
    /// Complex Steinhaus signs, one ChaCha stream per trial.
    MonteCarlo { seed: u64, trials: usize },
}

pub const MAX_EXACT_VECTORS: usize = 20;

/// `(E‖Σ ε_n x_n‖^moment)^{1/moment}`.
pub fn rademacher_average(space: &ValueSpace, xs: &[ValuePoint], moment: f64, method: AverageMethod) -> Result<f64> {
    if !(moment >= 1.0 && moment.is_finite()) {
        return Err(Error::domain(format!(
            "moment must be a finite number >= 1, got {moment}"
        )));
    }
    for x in xs {
        space.norm(x)?;
    }
    if xs.is_empty() {
        return Ok(0.0);
    }
    let dim = space.dim;
    match method {
        AverageMethod::ExactEnum => {
            let m = xs.len();
            if m > MAX_EXACT_VECTORS {
                return Err(Error::domain(format!(
                    "exact enumeration limited to {MAX_EXACT_VECTORS} vectors, got {m}"
                )));
            }
            // Gray-code walk: each step flips one sign, so the sum updates in O(dim).
            let mut sum = vec![Complex64::new(0.0, 0.0); dim];
            for x in xs {
                for (s, v) in sum.iter_mut().zip(&x.entries) {
                    *s += v;
                }
            }
            let mut signs = vec![1.0f64; m];
            let mut acc = space.norm_unchecked(&sum).powf(moment);
            let patterns: u64 = 1 << m;
            for step in 1..patterns {
                let k = step.trailing_zeros() as usize;
                let delta = -2.0 * signs[k];
                signs[k] = -signs[k];
                for (s, v) in sum.iter_mut().zip(&xs[k].entries) {
                    *s += v * delta;
                }
                acc += space.norm_unchecked(&sum).powf(moment);
            }
            Ok((acc / patterns as f64).powf(1.0 / moment))
        }
        AverageMethod::MonteCarlo { seed, trials } => {
            if trials < 100 {
                return Err(Error::domain(format!("Monte Carlo needs >= 100 trials, got {trials}")));
            }
            let mut acc = 0.0;
            let mut sum = vec![Complex64::new(0.0, 0.0); dim];
            for trial in 0..trials {
                let mut rng = ChaCha8Rng::seed_from_u64(seed);
                rng.set_stream(trial as u64);
                sum.iter_mut().for_each(|s| *s = Complex64::new(0.0, 0.0));
                for x in xs {
                    let theta: f64 = rng.gen::<f64>() * std::f64::consts::TAU;
                    let eps = Complex64::from_polar(1.0, theta);
                    for (s, v) in sum.iter_mut().zip(&x.entries) {
                        *s += v * eps;
                    }
                }
                acc += space.norm_unchecked(&sum).powf(moment);
            }
            Ok((acc / trials as f64).powf(1.0 / moment))
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum TypeKind {
    Type,
    Cotype,
}

/// Largest ratio over the family in the type inequality
/// `(E‖Σε x‖^m)^{1/m} ≤ C (Σ‖x‖^p)^{1/p}` or the cotype inequality
/// `(Σ‖x‖^q)^{1/q} ≤ C (E‖Σε x‖^m)^{1/m}`.
pub fn type_cotype_constant(
    space: &ValueSpace,
    exponent: f64,
    family: &[Vec<ValuePoint>],
    moment: f64,
    method: AverageMethod,
    kind: TypeKind,
) -> Result<f64> {
    if family.is_empty() {
        return Err(Error::domain("type/cotype family is empty"));
    }
    if !(exponent >= 1.0) {
        return Err(Error::domain(format!(
            "type/cotype exponent must be >= 1, got {exponent}"
        )));
    }
    let mut worst = 0.0f64;
    for tuple in family {
        let avg = rademacher_average(space, tuple, moment, method)?;
        let norms: Vec<f64> = tuple.iter().map(|x| space.norm_unchecked(&x.entries)).collect();
        let plain = lr_norm_real(norms, exponent);
        let ratio = match kind {
            TypeKind::Type if plain > 0.0 => avg / plain,
            TypeKind::Cotype if avg > 0.0 => plain / avg,
            _ => continue,
        };
        worst = worst.max(ratio);
    }
    Ok(worst)
}
