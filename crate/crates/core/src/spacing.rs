//! The spacing statistic `M_k(Q, N)`: the largest number of other points of
//! `S_{Q,k}` lying strictly within torus distance `1/(2N)` of a single point.

use rayon::prelude::*;
use serde::Serialize;

use crate::error::{Error, Result};
use crate::rationals::{
    enumerate_set, torus_offset, FractionSet, PowerFraction, Threshold, TorusPoint,
};

/// Largest set the quadratic oracle accepts.
pub const BRUTE_FORCE_LIMIT: usize = 50_000;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
pub struct SpacingQuery {
    pub q_anchor: u64,
    pub k: u32,
    pub n: u64,
    /// Whether `x' = x` is left out of the neighbor count.
    pub exclude_self: bool,
}

impl SpacingQuery {
    pub fn new(q_anchor: u64, k: u32, n: u64) -> Result<Self> {
        if q_anchor == 0 || n == 0 || k < 2 {
            return Err(Error::InvalidParameter(format!(
                "spacing query needs Q >= 1, k >= 2, N >= 1 (got Q={q_anchor}, k={k}, N={n})"
            )));
        }
        Ok(Self { q_anchor, k, n, exclude_self: true })
    }

    pub fn threshold(&self) -> Threshold {
        Threshold::half_over(self.n)
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct SpacingResult {
    pub count: usize,
    pub witness: PowerFraction,
    /// Every element with its own neighbor count, in ascending order of value.
    pub neighbors: Vec<(PowerFraction, usize)>,
}

impl SpacingResult {
    fn from_counts(set: &FractionSet, counts: Vec<usize>) -> Self {
        let (best_index, count) = argmax_first(&counts);
        let neighbors = set.elements().iter().copied().zip(counts).collect();
        Self { count, witness: set.elements()[best_index], neighbors }
    }
}

fn argmax_first(counts: &[usize]) -> (usize, usize) {
    let mut best = (0, counts[0]);
    for (i, &c) in counts.iter().enumerate().skip(1) {
        if c > best.1 {
            best = (i, c);
        }
    }
    best
}

/// Per-point neighbor counts by comparing every pair. Quadratic.
pub fn neighbor_counts_bruteforce<P: TorusPoint + Sync>(points: &[P], threshold: Threshold) -> Vec<usize> {
    neighbor_counts_bruteforce_multi(points, &[threshold]).pop().unwrap_or_default()
}

/// [`neighbor_counts_bruteforce`] for several thresholds in one pass over
/// the pairs; entry `t` of the result belongs to `thresholds[t]`.
pub fn neighbor_counts_bruteforce_multi<P: TorusPoint + Sync>(
    points: &[P],
    thresholds: &[Threshold],
) -> Vec<Vec<usize>> {
    let raw: Vec<(u64, u64)> = points.iter().map(|p| (p.numer(), p.denom())).collect();
    let narrow = raw.iter().all(|&(_, d)| d >> 32 == 0) && thresholds.iter().all(|t| t.inverse() >> 64 == 0);
    // widest cut-off first: a pair outside one cut-off is outside every later one
    let mut order: Vec<usize> = (0..thresholds.len()).collect();
    order.sort_by_key(|&t| thresholds[t].inverse());
    let per_point: Vec<Vec<usize>> = raw
        .par_iter()
        .enumerate()
        .map(|(i, &(a, d))| {
            let mut counts = vec![0usize; thresholds.len()];
            for (j, &(b, e)) in raw.iter().enumerate() {
                if j == i {
                    continue;
                }
                if narrow {
                    // every product below fits in 64 bits
                    let den = d * e;
                    let diff = (a * e).abs_diff(b * d);
                    let num = diff.min(den - diff) as u128;
                    for &t in &order {
                        if num * thresholds[t].inverse() >= den as u128 {
                            break;
                        }
                        counts[t] += 1;
                    }
                } else {
                    let (num, den) = torus_offset(&(a, d), &(b, e));
                    for &t in &order {
                        if !thresholds[t].admits_ratio(num, den) {
                            break;
                        }
                        counts[t] += 1;
                    }
                }
            }
            counts
        })
        .collect();
    (0..thresholds.len()).map(|t| per_point.iter().map(|c| c[t]).collect()).collect()
}

/// Signed offset `value(ext) - value(x)` of the periodic extension of the
/// sorted points, as `(|numerator|, denominator)`.
#[inline]
fn offset(points: &[impl TorusPoint], e: usize, i: usize) -> (u128, u128) {
    let n = points.len();
    let y = &points[e % n];
    let x = &points[i];
    let shift = e as i128 / n as i128 - 1;
    let y_num = y.numer() as i128 + shift * y.denom() as i128;
    let num = y_num * x.denom() as i128 - x.numer() as i128 * y.denom() as i128;
    (num.unsigned_abs(), y.denom() as u128 * x.denom() as u128)
}

#[inline]
fn within(points: &[impl TorusPoint], e: usize, i: usize, threshold: Threshold) -> bool {
    let (num, den) = offset(points, e, i);
    threshold.admits_ratio(num, den)
}

/// Per-point neighbor counts on a sorted point set in linear time.
///
/// The points are unrolled into three copies shifted by -1, 0 and +1. For the
/// point at position `i` the admissible neighbors form a contiguous run of the
/// unrolled sequence around `n + i`, and both ends of that run only move right
/// as `i` grows.
pub fn neighbor_counts_sorted<P: TorusPoint>(points: &[P], threshold: Threshold) -> Vec<usize> {
    let n = points.len();
    if n == 0 {
        return Vec::new();
    }
    if threshold.covers_torus() {
        return vec![n - 1; n];
    }
    let mut counts = Vec::with_capacity(n);
    let (mut lo, mut hi) = (1usize, n);
    for i in 0..n {
        let centre = n + i;
        hi = hi.max(centre);
        while hi + 1 < centre + n && within(points, hi + 1, i, threshold) {
            hi += 1;
        }
        lo = lo.max(centre + 1 - n);
        while lo < centre && !within(points, lo, i, threshold) {
            lo += 1;
        }
        counts.push(hi - lo);
    }
    counts
}

fn finish(set: &FractionSet, mut counts: Vec<usize>, exclude_self: bool) -> SpacingResult {
    if !exclude_self {
        counts.iter_mut().for_each(|c| *c += 1);
    }
    SpacingResult::from_counts(set, counts)
}

/// Quadratic oracle on an already enumerated set.
pub fn spacing_bruteforce_in(set: &FractionSet, n: u64, exclude_self: bool) -> Result<SpacingResult> {
    if set.len() > BRUTE_FORCE_LIMIT {
        return Err(Error::Guard(format!(
            "|S_Q| = {} exceeds the brute-force limit {BRUTE_FORCE_LIMIT}; use the fast path",
            set.len()
        )));
    }
    let counts = neighbor_counts_bruteforce(set.elements(), Threshold::half_over(n));
    Ok(finish(set, counts, exclude_self))
}

/// The quadratic oracle at several `N` sharing one pass over the pairs.
pub fn spacing_bruteforce_many(set: &FractionSet, ns: &[u64]) -> Result<Vec<SpacingResult>> {
    if set.len() > BRUTE_FORCE_LIMIT {
        return Err(Error::Guard(format!(
            "|S_Q| = {} exceeds the brute-force limit {BRUTE_FORCE_LIMIT}; use the fast path",
            set.len()
        )));
    }
    let thresholds: Vec<Threshold> = ns.iter().map(|&n| Threshold::half_over(n)).collect();
    Ok(neighbor_counts_bruteforce_multi(set.elements(), &thresholds)
        .into_iter()
        .map(|counts| finish(set, counts, true))
        .collect())
}

/// Sliding-window count on an already enumerated set.
pub fn spacing_fast_in(set: &FractionSet, n: u64, exclude_self: bool) -> SpacingResult {
    finish(set, neighbor_counts_sorted(set.elements(), Threshold::half_over(n)), exclude_self)
}

pub fn spacing_count_bruteforce(query: &SpacingQuery) -> Result<SpacingResult> {
    let expected = crate::rationals::expected_set_len(query.q_anchor, query.k)?;
    if expected > BRUTE_FORCE_LIMIT as u64 {
        return Err(Error::Guard(format!(
            "|S_Q| = {expected} exceeds the brute-force limit {BRUTE_FORCE_LIMIT}; use the fast path"
        )));
    }
    let set = enumerate_set(query.q_anchor, query.k)?;
    spacing_bruteforce_in(&set, query.n, query.exclude_self)
}

pub fn spacing_count_fast(query: &SpacingQuery) -> Result<SpacingResult> {
    let set = enumerate_set(query.q_anchor, query.k)?;
    Ok(spacing_fast_in(&set, query.n, query.exclude_self))
}

/// Maximum neighbor count only, without building the per-element audit list.
pub fn max_neighbors(set: &FractionSet, threshold: Threshold) -> (usize, PowerFraction) {
    let counts = neighbor_counts_sorted(set.elements(), threshold);
    let (i, c) = argmax_first(&counts);
    (c, set.elements()[i])
}

/// `M(Q)`: the maximal number of other points of `S_{Q,2}` with
/// `2||x - x'|| < Q^{-3}`.
pub fn table1_statistic(q_anchor: u64) -> Result<usize> {
    let set = enumerate_set(q_anchor, 2)?;
    table1_statistic_in(&set)
}

pub fn table1_statistic_in(set: &FractionSet) -> Result<usize> {
    let n = conjecture_n(set.q_anchor(), 2)?;
    Ok(max_neighbors(set, Threshold::half_over(n)).0)
}

/// `N = Q^{k+1}`, the frequency length at which the conjectures are posed.
pub fn conjecture_n(q_anchor: u64, k: u32) -> Result<u64> {
    q_anchor
        .checked_pow(k + 1)
        .ok_or_else(|| Error::Range(format!("Q^(k+1) = {q_anchor}^{} overflows u64", k + 1)))
}

/// The majorant `Q^{k+1}/N + (Q^{(κ-1)/κ} + Q^{(κ+k)/κ} / N^{1/κ}) N^ε`
/// with `κ = 2^{k-1}`; for `k = 2` this is `Q³/N + (√Q + Q²/√N) N^ε`.
pub fn spacing_majorant(q_anchor: u64, n: u64, k: u32, epsilon: f64) -> f64 {
    let q = q_anchor as f64;
    let n = n as f64;
    let kappa = 2f64.powi(k as i32 - 1);
    let k = k as f64;
    q.powf(k + 1.0) / n
        + (q.powf((kappa - 1.0) / kappa) + q.powf((kappa + k) / kappa) / n.powf(1.0 / kappa))
            * n.powf(epsilon)
}

/// `M(Q,N) / (Q³/N + (√Q + Q²/√N) N^ε)`. Diagnostic only.
pub fn lemma4_ratio_report(q_anchor: u64, n: u64, epsilon: f64) -> Result<f64> {
    let set = enumerate_set(q_anchor, 2)?;
    let (m, _) = max_neighbors(&set, Threshold::half_over(n));
    Ok(m as f64 / spacing_majorant(q_anchor, n, 2, epsilon))
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct ScanRow {
    pub q: u64,
    pub m: usize,
    pub witness_a: u64,
    pub witness_q: u64,
    /// `m` over the spacing majorant at `N = Q^{k+1}`.
    pub ratio: f64,
    pub running_max: usize,
    /// Count under the cut-off `||x - x'|| < Q^{-(k+1)}` (no factor 2),
    /// reported for `k >= 3`.
    pub literal_m: Option<usize>,
}

/// Least-squares line `m ≈ intercept + slope · ln Q`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct LogFit {
    pub intercept: f64,
    pub slope: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct ScanReport {
    pub k: u32,
    pub rows: Vec<ScanRow>,
    pub max: usize,
    pub fit: Option<LogFit>,
}

pub fn fit_log(rows: &[(u64, usize)]) -> Option<LogFit> {
    let n = rows.len() as f64;
    let xs: Vec<f64> = rows.iter().map(|&(q, _)| (q as f64).ln()).collect();
    let ys: Vec<f64> = rows.iter().map(|&(_, m)| m as f64).collect();
    let mean_x = xs.iter().sum::<f64>() / n;
    let mean_y = ys.iter().sum::<f64>() / n;
    let sxx: f64 = xs.iter().map(|x| (x - mean_x).powi(2)).sum();
    if rows.len() < 2 || sxx == 0.0 {
        return None;
    }
    let sxy: f64 = xs.iter().zip(&ys).map(|(x, y)| (x - mean_x) * (y - mean_y)).sum();
    let slope = sxy / sxx;
    Some(LogFit { intercept: mean_y - slope * mean_x, slope })
}

/// Scans `M_k(Q, Q^{k+1})` over `q_min..=q_max`, obtaining each set from
/// `source` (which may read a cache). Rows are ordered by `Q`.
pub fn conjecture_scan_with<F>(q_min: u64, q_max: u64, k: u32, epsilon: f64, source: F) -> Result<ScanReport>
where
    F: Fn(u64, u32) -> Result<FractionSet> + Sync,
{
    if q_min == 0 || q_max < q_min {
        return Err(Error::InvalidParameter(format!(
            "scan range needs 1 <= q_min <= q_max (got {q_min}..={q_max})"
        )));
    }
    if k < 2 {
        return Err(Error::InvalidParameter(format!("exponent k = {k} must be at least 2")));
    }
    let rows: Vec<ScanRow> = (q_min..=q_max)
        .into_par_iter()
        .map(|q| {
            let set = source(q, k)?;
            let n = conjecture_n(q, k)?;
            let (m, witness) = max_neighbors(&set, Threshold::half_over(n));
            let literal_m = if k >= 3 {
                Some(max_neighbors(&set, Threshold::reciprocal(n as u128)).0)
            } else {
                None
            };
            Ok(ScanRow {
                q,
                m,
                witness_a: witness.a(),
                witness_q: witness.q(),
                ratio: m as f64 / spacing_majorant(q, n, k, epsilon),
                running_max: 0,
                literal_m,
            })
        })
        .collect::<Result<_>>()?;
    let mut rows = rows;
    let mut running = 0;
    for row in &mut rows {
        running = running.max(row.m);
        row.running_max = running;
    }
    let pairs: Vec<(u64, usize)> = rows.iter().map(|r| (r.q, r.m)).collect();
    Ok(ScanReport { k, fit: fit_log(&pairs), max: running, rows })
}

pub fn conjecture_scan(q_min: u64, q_max: u64, k: u32, epsilon: f64) -> Result<ScanReport> {
    conjecture_scan_with(q_min, q_max, k, epsilon, enumerate_set)
}
