//! The large sieve quadratic form `Σ_k |Σ_n a_n e(x_k n)|²` for a finite
//! point set, its optimal constant, and the closed-form majorants it is
//! compared against.
//!
//! The optimal constant for points `x_1..x_K` and frequencies
//! `n = M+1..M+N` is the largest eigenvalue of `T*T` (equivalently `TT*`),
//! where `T = [e(x_k n)]` is the `K × N` matrix of the form.

use num_complex::Complex64;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;
use serde::Serialize;

use crate::error::{Error, Result};
use crate::expsum::e_frac;
use crate::rationals::{
    cmp_value, enumerate_set, expected_set_len, min_circular_gap, totient, Rational01, TorusPoint,
};

/// Largest `K · N` accepted for a Gram computation.
pub const GRAM_GUARD: u64 = 10_000_000;

/// Largest `K · N` for which `T` is stored instead of recomputed per product.
pub const MATERIALIZE_LIMIT: u64 = 1 << 22;

pub const DEFAULT_MAX_ITERATIONS: usize = 100_000;

/// Tolerance on the relative Rayleigh residual.
pub const DEFAULT_TOLERANCE: f64 = 1e-10;

/// Slack allowed when asserting the explicit-constant ceiling.
pub const CEILING_SLACK: f64 = 1e-6;

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct SieveInstance {
    points: Vec<Rational01>,
    offset: i64,
    n: u64,
}

impl SieveInstance {
    pub fn new(points: Vec<Rational01>, offset: i64, n: u64) -> Result<Self> {
        if n == 0 {
            return Err(Error::InvalidParameter("frequency window length N must be positive".into()));
        }
        if points.is_empty() {
            return Err(Error::InvalidParameter("point set is empty".into()));
        }
        let mut sorted = points.clone();
        sorted.sort_by(cmp_value);
        if sorted.windows(2).any(|w| w[0] == w[1]) {
            return Err(Error::CoincidentPoints);
        }
        Ok(Self { points, offset, n })
    }

    pub fn points(&self) -> &[Rational01] {
        &self.points
    }

    pub fn offset(&self) -> i64 {
        self.offset
    }

    pub fn n(&self) -> u64 {
        self.n
    }

    pub fn k(&self) -> usize {
        self.points.len()
    }

    fn frequencies(&self) -> impl Iterator<Item = i64> + '_ {
        (1..=self.n as i64).map(move |j| self.offset + j)
    }

    /// `e(x n)` with the phase `x n` reduced exactly modulo 1.
    fn entry(&self, point: &Rational01, freq: i64) -> Complex64 {
        e_frac(point.numer() as i128 * freq as i128, point.denom() as u128)
    }

    /// Value of the quadratic form `Σ_k |Σ_n a_n e(x_k n)|²`.
    pub fn form(&self, coefficients: &[Complex64]) -> Result<f64> {
        if coefficients.len() as u64 != self.n {
            return Err(Error::InvalidParameter(format!(
                "expected {} coefficients, got {}",
                self.n,
                coefficients.len()
            )));
        }
        let op = Operator::new(self)?;
        Ok(op.apply(coefficients).iter().map(|z| z.norm_sqr()).sum())
    }
}

/// Which Gram matrix to iterate on: `T*T` acts on coefficient vectors of
/// length `N`, `TT*` on vectors of length `K`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "lowercase")]
pub enum Side {
    Frequencies,
    Points,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct GramSpectrum {
    pub lambda_max: f64,
    pub iterations: usize,
    /// `‖G v - λ v‖ / (λ ‖v‖)` at return.
    pub residual: f64,
}

/// `T` either stored row-major or evaluated on demand.
struct Operator<'a> {
    instance: &'a SieveInstance,
    stored: Option<Vec<Complex64>>,
}

impl<'a> Operator<'a> {
    fn new(instance: &'a SieveInstance) -> Result<Self> {
        let size = instance.k() as u64 * instance.n;
        if size > GRAM_GUARD {
            return Err(Error::Guard(format!(
                "K·N = {size} exceeds {GRAM_GUARD}; use a smaller Q or N"
            )));
        }
        let stored = (size <= MATERIALIZE_LIMIT).then(|| {
            let mut t = Vec::with_capacity(size as usize);
            for p in &instance.points {
                t.extend(instance.frequencies().map(|f| instance.entry(p, f)));
            }
            t
        });
        Ok(Self { instance, stored })
    }

    fn for_row(&self, k: usize, mut f: impl FnMut(usize, Complex64)) {
        let n = self.instance.n as usize;
        match &self.stored {
            Some(t) => t[k * n..(k + 1) * n].iter().enumerate().for_each(|(j, &z)| f(j, z)),
            None => {
                let p = &self.instance.points[k];
                for (j, freq) in self.instance.frequencies().enumerate() {
                    f(j, self.instance.entry(p, freq));
                }
            }
        }
    }

    /// `T a`, length `K`.
    fn apply(&self, a: &[Complex64]) -> Vec<Complex64> {
        (0..self.instance.k())
            .map(|k| {
                let mut acc = Complex64::new(0.0, 0.0);
                self.for_row(k, |j, z| acc += z * a[j]);
                acc
            })
            .collect()
    }

    /// `T* b`, length `N`.
    fn apply_adjoint(&self, b: &[Complex64]) -> Vec<Complex64> {
        let mut out = vec![Complex64::new(0.0, 0.0); self.instance.n as usize];
        for (k, bk) in b.iter().enumerate() {
            self.for_row(k, |j, z| out[j] += z.conj() * bk);
        }
        out
    }

    fn gram(&self, side: Side, v: &[Complex64]) -> Vec<Complex64> {
        match side {
            Side::Frequencies => self.apply_adjoint(&self.apply(v)),
            Side::Points => self.apply(&self.apply_adjoint(v)),
        }
    }

    fn row(&self, k: usize) -> Vec<Complex64> {
        let mut out = Vec::with_capacity(self.instance.n as usize);
        self.for_row(k, |_, z| out.push(z));
        out
    }
}

/// Largest Gram dimension stored as a dense matrix.
pub const DENSE_GRAM_LIMIT: usize = 2048;

/// The Gram matrix of one side, dense when small enough.
enum Gram<'a> {
    Dense { dim: usize, entries: Vec<Complex64> },
    Factored { op: Operator<'a>, side: Side },
}

impl<'a> Gram<'a> {
    fn new(instance: &'a SieveInstance, side: Side) -> Result<Self> {
        let op = Operator::new(instance)?;
        let dim = match side {
            Side::Frequencies => instance.n as usize,
            Side::Points => instance.k(),
        };
        if dim > DENSE_GRAM_LIMIT {
            return Ok(Gram::Factored { op, side });
        }
        let mut entries = vec![Complex64::new(0.0, 0.0); dim * dim];
        match side {
            Side::Frequencies => {
                // (T*T)[m][n] = Σ_k e(x_k (n - m)), Toeplitz in n - m
                let diag: Vec<Complex64> = (0..dim as i64)
                    .into_par_iter()
                    .map(|d| {
                        instance
                            .points
                            .iter()
                            .map(|p| e_frac(p.numer() as i128 * d as i128, p.denom() as u128))
                            .sum()
                    })
                    .collect();
                for m in 0..dim {
                    for n in 0..dim {
                        entries[m * dim + n] =
                            if n >= m { diag[n - m] } else { diag[m - n].conj() };
                    }
                }
            }
            Side::Points => {
                // (TT*)[k][l] = <row_k, row_l>
                let rows: Vec<Vec<Complex64>> = (0..dim).map(|k| op.row(k)).collect();
                let upper: Vec<Vec<Complex64>> = (0..dim)
                    .into_par_iter()
                    .map(|k| {
                        (k..dim)
                            .map(|l| rows[k].iter().zip(&rows[l]).map(|(a, b)| a * b.conj()).sum())
                            .collect()
                    })
                    .collect();
                for (k, row) in upper.into_iter().enumerate() {
                    for (offset, z) in row.into_iter().enumerate() {
                        let l = k + offset;
                        entries[k * dim + l] = z;
                        entries[l * dim + k] = z.conj();
                    }
                }
            }
        }
        Ok(Gram::Dense { dim, entries })
    }

    fn dim(&self) -> usize {
        match self {
            Gram::Dense { dim, .. } => *dim,
            Gram::Factored { op, side: Side::Frequencies } => op.instance.n as usize,
            Gram::Factored { op, side: Side::Points } => op.instance.k(),
        }
    }

    fn apply(&self, v: &[Complex64]) -> Vec<Complex64> {
        match self {
            Gram::Dense { dim, entries } => entries
                .par_chunks(*dim)
                .map(|row| row.iter().zip(v).map(|(a, b)| a * b).sum())
                .collect(),
            Gram::Factored { op, side } => op.gram(*side, v),
        }
    }
}

fn norm(v: &[Complex64]) -> f64 {
    v.iter().map(|z| z.norm_sqr()).sum::<f64>().sqrt()
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct PowerOptions {
    pub tol: f64,
    pub max_iterations: usize,
    pub seed: u64,
}

impl Default for PowerOptions {
    fn default() -> Self {
        Self { tol: DEFAULT_TOLERANCE, max_iterations: DEFAULT_MAX_ITERATIONS, seed: 0 }
    }
}

/// Largest eigenvalue of the chosen Gram matrix by power iteration from a
/// seeded random start.
pub fn gram_lambda_max(instance: &SieveInstance, side: Side, options: PowerOptions) -> Result<GramSpectrum> {
    if options.tol.is_nan() || options.tol <= 0.0 {
        return Err(Error::InvalidParameter("tolerance must be positive".into()));
    }
    let gram = Gram::new(instance, side)?;
    let dim = gram.dim();
    let mut rng = ChaCha8Rng::seed_from_u64(options.seed);
    let mut v: Vec<Complex64> =
        (0..dim).map(|_| Complex64::new(rng.gen::<f64>() - 0.5, rng.gen::<f64>() - 0.5)).collect();
    let scale = norm(&v);
    v.iter_mut().for_each(|z| *z /= scale);

    let mut residual = f64::INFINITY;
    for iteration in 1..=options.max_iterations {
        let w = gram.apply(&v);
        // v has unit norm, so the Rayleigh quotient is <v, w>
        let lambda: f64 = v.iter().zip(&w).map(|(a, b)| (a.conj() * b).re).sum();
        if lambda <= 0.0 {
            return Err(Error::InvalidParameter("Gram form vanished on the start vector".into()));
        }
        let r = v.iter().zip(&w).map(|(a, b)| (b - a * lambda).norm_sqr()).sum::<f64>().sqrt();
        residual = r / lambda;
        if residual <= options.tol {
            return Ok(GramSpectrum { lambda_max: lambda, iterations: iteration, residual });
        }
        let wn = norm(&w);
        v = w.into_iter().map(|z| z / wn).collect();
    }
    Err(Error::NoConvergence { iterations: options.max_iterations, residual })
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct DualityCheck {
    /// `λ_max(T*T)`.
    pub frequencies: GramSpectrum,
    /// `λ_max(TT*)`.
    pub points: GramSpectrum,
}

impl DualityCheck {
    pub fn gap(&self) -> f64 {
        (self.frequencies.lambda_max - self.points.lambda_max).abs()
    }
}

/// The optimal constant computed from both sides of the form.
pub fn duality_check(instance: &SieveInstance, options: PowerOptions) -> Result<DualityCheck> {
    Ok(DualityCheck {
        frequencies: gram_lambda_max(instance, Side::Frequencies, options)?,
        points: gram_lambda_max(instance, Side::Points, options)?,
    })
}

/// `δ⁻¹ - 1 + N` with `δ` the exact minimal torus distance of the points.
/// A single point has no `δ`; the ceiling is then `N`.
pub fn cohen_selberg_ceiling(instance: &SieveInstance) -> Result<f64> {
    let mut sorted = instance.points.clone();
    sorted.sort_by(cmp_value);
    match min_circular_gap(&sorted) {
        None => Ok(instance.n as f64),
        Some(d) if d.is_zero() => Err(Error::CoincidentPoints),
        Some(d) => Ok(d.den as f64 / d.num as f64 - 1.0 + instance.n as f64),
    }
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct BoundValue {
    pub name: &'static str,
    pub value: f64,
    /// True only when the formula carries explicit constants.
    pub assertable: bool,
}

/// `Σ_{Q<q≤2Q} (q^k - 1 + N)`: the explicit ceiling applied to each
/// denominator class of `S_{Q,k}` separately (those points are
/// `q^{-k}`-spaced) and summed.
pub fn per_q_ceiling(q_anchor: u64, n: u64, k: u32) -> f64 {
    (q_anchor + 1..=2 * q_anchor).map(|q| (q as f64).powi(k as i32) - 1.0 + n as f64).sum()
}

/// Every closed-form majorant at `(Q, N, k, ε)`. Logarithms are natural.
pub fn bound_catalog(q_anchor: u64, n: u64, k: u32, epsilon: f64) -> Result<Vec<BoundValue>> {
    if q_anchor == 0 || n == 0 || k < 2 || epsilon.is_nan() || epsilon < 0.0 {
        return Err(Error::InvalidParameter(format!(
            "bound catalog needs Q >= 1, N >= 1, k >= 2, ε >= 0 (got Q={q_anchor}, N={n}, k={k}, ε={epsilon})"
        )));
    }
    let q = q_anchor as f64;
    let nf = n as f64;
    let kf = k as f64;
    let kappa = 2f64.powi(k as i32 - 1);
    let log2q = (2.0 * q).ln();
    let n_eps = nf.powf(epsilon);

    let mut out = vec![
        BoundValue { name: "classical", value: q.powf(2.0 * kf) + nf, assertable: false },
        BoundValue { name: "per_q_classical", value: q * (q.powf(kf) + nf), assertable: false },
    ];
    if k == 2 {
        out.push(BoundValue {
            name: "theorem_square",
            value: log2q * (q.powi(3) + (nf * q.sqrt() + nf.sqrt() * q * q) * n_eps),
            assertable: false,
        });
    }
    out.push(BoundValue {
        name: "theorem_power",
        value: log2q
            * (q.powf(kf + 1.0)
                + n_eps
                    * (nf * q.powf((kappa - 1.0) / kappa)
                        + nf.powf(1.0 - 1.0 / kappa) * q.powf((kappa + kf) / kappa))),
        assertable: false,
    });
    if k == 2 {
        out.push(BoundValue {
            name: "proposition_square",
            value: q.powf(0.5 + epsilon) * (q.powi(3) + nf),
            assertable: false,
        });
    }
    out.push(BoundValue {
        name: "conjectural",
        value: q.powf(epsilon) * (q.powf(kf + 1.0) + nf),
        assertable: false,
    });
    out.push(BoundValue { name: "cohen_selberg_per_q", value: per_q_ceiling(q_anchor, n, k), assertable: true });
    Ok(out)
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct RatioEntry {
    pub name: &'static str,
    pub value: f64,
    pub ratio: f64,
    pub assertable: bool,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct ExperimentRecord {
    #[serde(rename = "Q")]
    pub q_anchor: u64,
    #[serde(rename = "N")]
    pub n: u64,
    pub k: u32,
    pub points: usize,
    pub lambda_max: f64,
    pub bounds: Vec<RatioEntry>,
    pub iterations: usize,
    pub residual: f64,
}

impl ExperimentRecord {
    /// Whether every assertable bound holds, with [`CEILING_SLACK`].
    pub fn assertions_hold(&self) -> bool {
        self.bounds
            .iter()
            .filter(|b| b.assertable)
            .all(|b| self.lambda_max <= b.value + CEILING_SLACK)
    }
}

/// The full set `S_{Q,k}` as a sieve instance over `n = 1..N`.
pub fn instance_for_set(q_anchor: u64, k: u32, n: u64) -> Result<SieveInstance> {
    let len = expected_set_len(q_anchor, k)?;
    if len.saturating_mul(n) > GRAM_GUARD {
        return Err(Error::Guard(format!(
            "|S_Q|·N = {len}·{n} exceeds {GRAM_GUARD}; use a smaller Q or N"
        )));
    }
    let set = enumerate_set(q_anchor, k)?;
    SieveInstance::new(set.elements().iter().map(|&x| x.into()).collect(), 0, n)
}

/// `λ_max` for the full `S_{Q,k}` against every catalog bound.
pub fn sieve_ratio_experiment(
    q_anchor: u64,
    n: u64,
    k: u32,
    epsilon: f64,
    options: PowerOptions,
) -> Result<ExperimentRecord> {
    let instance = instance_for_set(q_anchor, k, n)?;
    // iterate on the smaller Gram matrix; both share the nonzero spectrum
    let side = if (instance.k() as u64) < n { Side::Points } else { Side::Frequencies };
    let spectrum = gram_lambda_max(&instance, side, options)?;
    let bounds = bound_catalog(q_anchor, n, k, epsilon)?
        .into_iter()
        .map(|b| RatioEntry {
            name: b.name,
            value: b.value,
            ratio: spectrum.lambda_max / b.value,
            assertable: b.assertable,
        })
        .collect();
    Ok(ExperimentRecord {
        q_anchor,
        n,
        k,
        points: instance.k(),
        lambda_max: spectrum.lambda_max,
        bounds,
        iterations: spectrum.iterations,
        residual: spectrum.residual,
    })
}

/// `Σ_{q=2}^{Q} Σ_{1≤a<q^k, (a,q)=1} |Σ_n a_n e(an/q^k)|²` for coefficients on
/// `n = M+1..M+N`.
pub fn additive_lhs(q_max: u64, k: u32, coefficients: &[Complex64], offset: i64) -> Result<f64> {
    let mut total = 0.0;
    for q in 2..=q_max {
        total += additive_lhs_single(q, k, coefficients, offset)?;
    }
    Ok(total)
}

/// The inner sum of [`additive_lhs`] for one modulus `q^k`.
pub fn additive_lhs_single(q: u64, k: u32, coefficients: &[Complex64], offset: i64) -> Result<f64> {
    let m = q
        .checked_pow(k)
        .ok_or_else(|| Error::Range(format!("q^k = {q}^{k} overflows u64")))?;
    let count = m / q * totient(q);
    if count.saturating_mul(coefficients.len() as u64) > GRAM_GUARD {
        return Err(Error::Guard(format!("φ(q^k)·N exceeds {GRAM_GUARD} at q = {q}")));
    }
    let mut total = 0.0;
    for a in (1..m).filter(|a| num_integer::gcd(*a, q) == 1) {
        let s: Complex64 = coefficients
            .iter()
            .enumerate()
            .map(|(j, c)| c * e_frac(a as i128 * (offset + 1 + j as i64) as i128, m as u128))
            .sum();
        total += s.norm_sqr();
    }
    Ok(total)
}
