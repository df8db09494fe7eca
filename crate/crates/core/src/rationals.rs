//! Exact arithmetic for fractions `a / q^k` on the torus `R / Z`.
//!
//! All comparisons go through integer cross-multiplication; nothing in this
//! module touches floating point except the explicit `to_f64` accessors.

use std::cmp::Ordering;
use std::fmt;
use std::io::{BufRead, BufReader, Read, Write};

use num_integer::Integer;
use rayon::prelude::*;
use serde::Serialize;

use crate::error::{Error, Result};

/// Largest supported denominator. Keeps every numerator difference of two
/// points inside `u128` after cross-multiplication.
pub const MAX_DENOMINATOR: u64 = 1 << 62;

/// Upper bound on `|S_{Q,k}|` accepted by [`enumerate_set`].
pub const MAX_SET_LEN: u64 = 1 << 26;

/// A point of the torus given as a fraction `numer / denom` in `[0, 1)`.
pub trait TorusPoint {
    fn numer(&self) -> u64;
    fn denom(&self) -> u64;

    fn to_f64(&self) -> f64 {
        self.numer() as f64 / self.denom() as f64
    }
}

/// Compares the values of two torus points exactly.
pub fn cmp_value<P: TorusPoint + ?Sized, R: TorusPoint + ?Sized>(x: &P, y: &R) -> Ordering {
    let lhs = x.numer() as u128 * y.denom() as u128;
    let rhs = y.numer() as u128 * x.denom() as u128;
    lhs.cmp(&rhs)
}

/// Full 256-bit product of two `u128` values as `(high, low)`.
fn wide_mul(a: u128, b: u128) -> (u128, u128) {
    const LO: u128 = u64::MAX as u128;
    let (a1, a0) = (a >> 64, a & LO);
    let (b1, b0) = (b >> 64, b & LO);
    let p00 = a0 * b0;
    let p01 = a0 * b1;
    let p10 = a1 * b0;
    let p11 = a1 * b1;
    let mid = (p00 >> 64) + (p01 & LO) + (p10 & LO);
    let lo = (p00 & LO) | (mid << 64);
    let hi = p11 + (p01 >> 64) + (p10 >> 64) + (mid >> 64);
    (hi, lo)
}

/// Compares `a * b` with `c * d` without overflow.
pub fn mul_cmp(a: u128, b: u128, c: u128, d: u128) -> Ordering {
    match (a.checked_mul(b), c.checked_mul(d)) {
        (Some(x), Some(y)) => x.cmp(&y),
        _ => wide_mul(a, b).cmp(&wide_mul(c, d)),
    }
}

/// Euler's totient by trial division.
pub fn totient(mut n: u64) -> u64 {
    if n == 0 {
        return 0;
    }
    let mut result = n;
    let mut p = 2;
    while p * p <= n {
        if n % p == 0 {
            while n % p == 0 {
                n /= p;
            }
            result -= result / p;
        }
        p += 1;
    }
    if n > 1 {
        result -= result / n;
    }
    result
}

/// Distinct prime divisors of `n` in ascending order.
pub fn prime_divisors(mut n: u64) -> Vec<u64> {
    let mut primes = Vec::new();
    let mut p = 2;
    while p * p <= n {
        if n % p == 0 {
            primes.push(p);
            while n % p == 0 {
                n /= p;
            }
        }
        p += 1;
    }
    if n > 1 {
        primes.push(n);
    }
    primes
}

fn checked_power(q: u64, k: u32) -> Result<u64> {
    match q.checked_pow(k) {
        Some(v) if v <= MAX_DENOMINATOR => Ok(v),
        _ => Err(Error::Range(format!(
            "q^k = {q}^{k} exceeds the supported denominator bound 2^62"
        ))),
    }
}

/// A reduced fraction `a / q^k` with `gcd(a, q) = 1` and `1 <= a < q^k`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize)]
pub struct PowerFraction {
    a: u64,
    q: u64,
    k: u32,
    #[serde(skip)]
    den: u64,
}

impl PowerFraction {
    pub fn new(a: u64, q: u64, k: u32) -> Result<Self> {
        if k < 2 {
            return Err(Error::InvalidParameter(format!("exponent k = {k} must be at least 2")));
        }
        if q < 2 {
            return Err(Error::InvalidParameter(format!(
                "base q = {q} admits no numerator with 1 <= a < q^k"
            )));
        }
        let den = checked_power(q, k)?;
        if a == 0 || a >= den {
            return Err(Error::InvalidParameter(format!("numerator {a} outside [1, {den})")));
        }
        if a.gcd(&q) != 1 {
            return Err(Error::InvalidParameter(format!("gcd({a}, {q}) != 1")));
        }
        Ok(Self { a, q, k, den })
    }

    pub fn a(&self) -> u64 {
        self.a
    }

    pub fn q(&self) -> u64 {
        self.q
    }

    pub fn k(&self) -> u32 {
        self.k
    }

    /// The denominator `q^k`.
    pub fn modulus(&self) -> u64 {
        self.den
    }
}

impl TorusPoint for PowerFraction {
    fn numer(&self) -> u64 {
        self.a
    }
    fn denom(&self) -> u64 {
        self.den
    }
}

impl fmt::Display for PowerFraction {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}/{}^{}", self.a, self.q, self.k)
    }
}

/// A general rational torus point `num / den` in lowest terms, `0 <= num < den`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize)]
pub struct Rational01 {
    num: u64,
    den: u64,
}

impl Rational01 {
    /// Builds the point `num / den mod 1`, reducing to lowest terms.
    pub fn new(num: u64, den: u64) -> Result<Self> {
        if den == 0 {
            return Err(Error::InvalidParameter("zero denominator".into()));
        }
        if den > MAX_DENOMINATOR {
            return Err(Error::Range(format!("denominator {den} exceeds 2^62")));
        }
        let num = num % den;
        let g = num.gcd(&den);
        Ok(Self { num: num / g, den: den / g })
    }

    pub fn num(&self) -> u64 {
        self.num
    }

    pub fn den(&self) -> u64 {
        self.den
    }

    /// Rotation `x -> x + shift mod 1`.
    pub fn rotate(&self, shift: &Rational01) -> Result<Self> {
        let den = self.den as u128 * shift.den as u128 / self.den.gcd(&shift.den) as u128;
        if den > MAX_DENOMINATOR as u128 {
            return Err(Error::Range(format!("rotated denominator {den} exceeds 2^62")));
        }
        let num = self.num as u128 * (den / self.den as u128)
            + shift.num as u128 * (den / shift.den as u128);
        Self::new((num % den) as u64, den as u64)
    }
}

impl TorusPoint for Rational01 {
    fn numer(&self) -> u64 {
        self.num
    }
    fn denom(&self) -> u64 {
        self.den
    }
}

impl From<PowerFraction> for Rational01 {
    fn from(x: PowerFraction) -> Self {
        Self { num: x.a, den: x.den }
    }
}

/// The exact torus distance `||x - y||` as a reduced fraction in `[0, 1/2]`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize)]
pub struct TorusDistance {
    pub num: u128,
    pub den: u128,
}

impl TorusDistance {
    pub fn is_zero(&self) -> bool {
        self.num == 0
    }

    pub fn to_f64(&self) -> f64 {
        self.num as f64 / self.den as f64
    }
}

impl PartialOrd for TorusDistance {
    fn partial_cmp(&self, other: &Self) -> Option<Ordering> {
        Some(self.cmp(other))
    }
}

impl Ord for TorusDistance {
    fn cmp(&self, other: &Self) -> Ordering {
        mul_cmp(self.num, other.den, other.num, self.den)
    }
}

impl fmt::Display for TorusDistance {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}/{}", self.num, self.den)
    }
}

/// Exact `||x - y||`, computed by cross-multiplication.
pub fn torus_distance<P: TorusPoint + ?Sized, R: TorusPoint + ?Sized>(x: &P, y: &R) -> TorusDistance {
    let den = x.denom() as u128 * y.denom() as u128;
    let lhs = x.numer() as u128 * y.denom() as u128;
    let rhs = y.numer() as u128 * x.denom() as u128;
    // both values lie in [0, 1), so the raw difference is already in [0, den)
    let diff = lhs.abs_diff(rhs);
    let nearest = diff.min(den - diff);
    let g = nearest.gcd(&den);
    TorusDistance { num: nearest / g, den: den / g }
}

impl TorusPoint for (u64, u64) {
    fn numer(&self) -> u64 {
        self.0
    }
    fn denom(&self) -> u64 {
        self.1
    }
}

/// `||x - y||` as an unreduced `(numerator, denominator)` pair over `den(x) den(y)`.
#[inline]
pub fn torus_offset<P: TorusPoint + ?Sized, R: TorusPoint + ?Sized>(x: &P, y: &R) -> (u128, u128) {
    let den = x.denom() as u128 * y.denom() as u128;
    let diff = (x.numer() as u128 * y.denom() as u128).abs_diff(y.numer() as u128 * x.denom() as u128);
    (diff.min(den - diff), den)
}

/// True iff `d < 1 / (2N)`, strictly.
pub fn compare_distance_to_threshold(d: &TorusDistance, n: u64) -> bool {
    Threshold::half_over(n).admits(d)
}

/// A strict distance cut-off `1 / inverse` on the torus.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize)]
pub struct Threshold {
    inverse: u128,
}

impl Threshold {
    /// The cut-off `1 / (2N)`.
    pub fn half_over(n: u64) -> Self {
        assert!(n >= 1, "N must be positive");
        Self { inverse: 2 * n as u128 }
    }

    /// The cut-off `1 / m`.
    pub fn reciprocal(m: u128) -> Self {
        assert!(m >= 1, "reciprocal threshold needs m >= 1");
        Self { inverse: m }
    }

    pub fn inverse(&self) -> u128 {
        self.inverse
    }

    /// Whether every pair of torus points is closer than the cut-off.
    pub fn covers_torus(&self) -> bool {
        self.inverse < 2
    }

    /// `d < 1 / inverse`.
    pub fn admits(&self, d: &TorusDistance) -> bool {
        self.admits_ratio(d.num, d.den)
    }

    /// Strict `num / den < 1 / inverse` for any representation of the ratio.
    #[inline]
    pub fn admits_ratio(&self, num: u128, den: u128) -> bool {
        if num >> 64 == 0 && self.inverse >> 64 == 0 {
            return (num as u64 as u128) * (self.inverse as u64 as u128) < den;
        }
        match num.checked_mul(self.inverse) {
            Some(lhs) => lhs < den,
            None => mul_cmp(num, self.inverse, 1, den) == Ordering::Less,
        }
    }
}

/// Truncated decimal expansion of `num / den` with `digits` fractional digits.
pub fn decimal_string(num: u128, den: u128, digits: usize) -> String {
    let mut out = format!("{}.", num / den);
    let mut rem = num % den;
    for _ in 0..digits {
        // rem < den <= 2^62, so 10 * rem cannot overflow
        rem *= 10;
        out.push(char::from(b'0' + (rem / den) as u8));
        rem %= den;
    }
    out
}

/// `Σ_{Q<q≤2Q} q^{k-1} φ(q)`, the size of `S_{Q,k}`.
pub fn expected_set_len(q_anchor: u64, k: u32) -> Result<u64> {
    let mut total: u64 = 0;
    for q in q_anchor + 1..=2 * q_anchor {
        let term = checked_power(q, k - 1)?
            .checked_mul(totient(q))
            .ok_or_else(|| Error::Range(format!("q^(k-1) phi(q) overflows at q = {q}")))?;
        total = total
            .checked_add(term)
            .ok_or_else(|| Error::Range("set cardinality overflows u64".into()))?;
    }
    Ok(total)
}

/// The set `S_{Q,k}` sorted ascending by value.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct FractionSet {
    q_anchor: u64,
    k: u32,
    elements: Vec<PowerFraction>,
}

fn check_window(q_anchor: u64, k: u32) -> Result<()> {
    if q_anchor == 0 {
        return Err(Error::InvalidParameter("Q must be at least 1".into()));
    }
    if k < 2 {
        return Err(Error::InvalidParameter(format!("exponent k = {k} must be at least 2")));
    }
    let top = q_anchor
        .checked_mul(2)
        .ok_or_else(|| Error::Range(format!("2Q overflows for Q = {q_anchor}")))?;
    checked_power(top, k)?;
    Ok(())
}

/// Enumerates `S_{Q,k} = { a/q^k : gcd(a,q) = 1, 1 <= a < q^k, Q < q <= 2Q }`.
pub fn enumerate_set(q_anchor: u64, k: u32) -> Result<FractionSet> {
    check_window(q_anchor, k)?;
    let expected = expected_set_len(q_anchor, k)?;
    if expected > MAX_SET_LEN {
        return Err(Error::Guard(format!(
            "|S_(Q={q_anchor},k={k})| = {expected} exceeds the limit {MAX_SET_LEN}"
        )));
    }

    let slices: Vec<Vec<PowerFraction>> = (q_anchor + 1..=2 * q_anchor)
        .into_par_iter()
        .map(|q| {
            let den = q.pow(k);
            let coprime: Vec<bool> = (0..q).map(|r| r.gcd(&q) == 1).collect();
            (1..den)
                .filter(|a| coprime[(a % q) as usize])
                .map(|a| PowerFraction { a, q, k, den })
                .collect()
        })
        .collect();

    let mut elements: Vec<PowerFraction> = Vec::with_capacity(expected as usize);
    for slice in slices {
        elements.extend(slice);
    }
    elements.par_sort_unstable_by(cmp_value);
    Ok(FractionSet { q_anchor, k, elements })
}

const CSV_DIGITS: usize = 18;

impl FractionSet {
    pub fn q_anchor(&self) -> u64 {
        self.q_anchor
    }

    pub fn k(&self) -> u32 {
        self.k
    }

    pub fn elements(&self) -> &[PowerFraction] {
        &self.elements
    }

    pub fn len(&self) -> usize {
        self.elements.len()
    }

    pub fn is_empty(&self) -> bool {
        self.elements.is_empty()
    }

    /// Elements whose base is exactly `q`, still in ascending order.
    pub fn slice_for(&self, q: u64) -> impl Iterator<Item = &PowerFraction> {
        self.elements.iter().filter(move |x| x.q == q)
    }

    /// Exact minimum of `||x - x'||` over distinct elements, via adjacent
    /// gaps of the sorted circle.
    pub fn min_gap(&self) -> Option<TorusDistance> {
        min_circular_gap(&self.elements)
    }

    /// CSV with columns `a,q,k,value`.
    pub fn write_csv<W: Write>(&self, mut out: W) -> Result<()> {
        writeln!(out, "a,q,k,value")?;
        for x in &self.elements {
            writeln!(
                out,
                "{},{},{},{}",
                x.a,
                x.q,
                x.k,
                decimal_string(x.a as u128, x.den as u128, CSV_DIGITS)
            )?;
        }
        Ok(())
    }

    /// Binary cache: little-endian u64 header `(Q, k, count)` followed by
    /// `(a, q)` u64 pairs.
    pub fn write_cache<W: Write>(&self, mut out: W) -> Result<()> {
        out.write_all(&self.q_anchor.to_le_bytes())?;
        out.write_all(&(self.k as u64).to_le_bytes())?;
        out.write_all(&(self.elements.len() as u64).to_le_bytes())?;
        let mut buf = Vec::with_capacity(16 * self.elements.len());
        for x in &self.elements {
            buf.extend_from_slice(&x.a.to_le_bytes());
            buf.extend_from_slice(&x.q.to_le_bytes());
        }
        out.write_all(&buf)?;
        Ok(())
    }

    /// Reads a binary cache, re-validating every record, the window, the
    /// cardinality and the strict ordering.
    pub fn read_cache<R: Read>(input: R) -> Result<Self> {
        let mut input = BufReader::new(input);
        let mut word = [0u8; 8];
        let mut next = |input: &mut BufReader<R>| -> Result<u64> {
            input.read_exact(&mut word).map_err(|e| match e.kind() {
                std::io::ErrorKind::UnexpectedEof => Error::Cache("truncated file".into()),
                _ => Error::Io(e),
            })?;
            Ok(u64::from_le_bytes(word))
        };
        let q_anchor = next(&mut input)?;
        let k = u32::try_from(next(&mut input)?).map_err(|_| Error::Cache("bad exponent".into()))?;
        let count = next(&mut input)?;
        check_window(q_anchor, k).map_err(|e| Error::Cache(e.to_string()))?;
        let expected = expected_set_len(q_anchor, k)?;
        if count != expected {
            return Err(Error::Cache(format!("count {count} differs from |S_Q| = {expected}")));
        }
        let mut elements = Vec::with_capacity(count as usize);
        for _ in 0..count {
            let a = next(&mut input)?;
            let q = next(&mut input)?;
            if q <= q_anchor || q > 2 * q_anchor {
                return Err(Error::Cache(format!("base {q} outside ({q_anchor}, {}]", 2 * q_anchor)));
            }
            let x = PowerFraction::new(a, q, k).map_err(|e| Error::Cache(e.to_string()))?;
            if let Some(prev) = elements.last() {
                if cmp_value(prev, &x) != Ordering::Less {
                    return Err(Error::Cache("records not strictly increasing".into()));
                }
            }
            elements.push(x);
        }
        if !input.fill_buf()?.is_empty() {
            return Err(Error::Cache("trailing bytes after last record".into()));
        }
        Ok(Self { q_anchor, k, elements })
    }
}

/// Minimal exact gap between distinct points of a sorted slice, including
/// the wrap-around gap across 0.
pub fn min_circular_gap<P: TorusPoint>(sorted: &[P]) -> Option<TorusDistance> {
    if sorted.len() < 2 {
        return None;
    }
    let mut best: Option<TorusDistance> = None;
    for i in 0..sorted.len() {
        let j = (i + 1) % sorted.len();
        let d = torus_distance(&sorted[i], &sorted[j]);
        best = Some(match best {
            Some(b) if b <= d => b,
            _ => d,
        });
    }
    best
}

#[cfg(test)]
mod tests {
    use super::*;

    fn pf(a: u64, q: u64, k: u32) -> PowerFraction {
        PowerFraction::new(a, q, k).unwrap()
    }

    // The minimum over all integers of |x - y - m|, by scanning m.
    fn distance_by_scan(x: &PowerFraction, y: &PowerFraction) -> (i128, i128) {
        let den = (x.modulus() as i128) * (y.modulus() as i128);
        let diff = x.a() as i128 * y.modulus() as i128 - y.a() as i128 * x.modulus() as i128;
        let best = (-2..=2).map(|m| (diff - m * den).abs()).min().unwrap();
        let g = best.gcd(&den);
        (best / g, den / g)
    }

    #[test]
    fn smallest_window_is_quarters() {
        let set = enumerate_set(1, 2).unwrap();
        let got: Vec<(u64, u64)> = set.elements().iter().map(|x| (x.a(), x.q())).collect();
        assert_eq!(got, vec![(1, 2), (3, 2)]);
    }

    #[test]
    fn window_two_has_fourteen_elements() {
        // brute force: q = 3 gives a in 1..9 coprime to 3, q = 4 gives odd a < 16
        let mut brute = 0;
        for q in 3u64..=4 {
            brute += (1..q * q).filter(|a| a.gcd(&q) == 1).count();
        }
        assert_eq!(brute, 14);
        assert_eq!(enumerate_set(2, 2).unwrap().len(), 14);
    }

    #[test]
    fn window_ten_matches_totient_sum() {
        let formula: u64 = (11..=20).map(|q| q * totient(q)).sum();
        assert_eq!(enumerate_set(10, 2).unwrap().len() as u64, formula);
        assert_eq!(expected_set_len(10, 2).unwrap(), formula);
    }

    #[test]
    fn antipodal_and_identity_distances() {
        let quarter = pf(1, 2, 2);
        let three_quarters = pf(3, 2, 2);
        assert_eq!(torus_distance(&quarter, &three_quarters), TorusDistance { num: 1, den: 2 });
        assert!(torus_distance(&quarter, &quarter).is_zero());
    }

    #[test]
    fn quarter_to_seven_ninths() {
        let x = pf(1, 2, 2);
        let y = pf(7, 3, 2);
        let d = torus_distance(&x, &y);
        // 1/4 - 7/9 = -19/36; 19/36 > 1/2 so the nearest integer is -1, giving 17/36
        assert_eq!(distance_by_scan(&x, &y), (17, 36));
        assert_eq!(d, TorusDistance { num: 17, den: 36 });
    }

    #[test]
    fn strict_threshold_boundaries() {
        let half = TorusDistance { num: 1, den: 2 };
        assert!(!compare_distance_to_threshold(&half, 1));
        let tiny = TorusDistance { num: 1, den: 144 };
        assert!(!compare_distance_to_threshold(&tiny, 72));
        assert!(compare_distance_to_threshold(&tiny, 71));
    }

    #[test]
    fn minimal_gap_of_window_two() {
        let set = enumerate_set(2, 2).unwrap();
        assert_eq!(set.min_gap().unwrap(), TorusDistance { num: 1, den: 144 });
        // realized by 7/16 and 4/9, i.e. 63/144 and 64/144
        let d = torus_distance(&pf(7, 4, 2), &pf(4, 3, 2));
        assert_eq!(d, TorusDistance { num: 1, den: 144 });
    }

    #[test]
    fn overflow_is_reported_with_the_power() {
        let err = enumerate_set(1 << 40, 2).unwrap_err();
        assert!(matches!(err, Error::Range(ref m) if m.contains("^2")), "{err}");
        assert!(PowerFraction::new(1, 3, 64).is_err());
    }

    #[test]
    fn invalid_fractions_rejected() {
        assert!(PowerFraction::new(2, 2, 2).is_err());
        assert!(PowerFraction::new(0, 3, 2).is_err());
        assert!(PowerFraction::new(9, 3, 2).is_err());
        assert!(PowerFraction::new(1, 3, 1).is_err());
        assert!(enumerate_set(0, 2).is_err());
        assert!(enumerate_set(3, 1).is_err());
    }

    #[test]
    fn decimal_expansion_truncates() {
        assert_eq!(decimal_string(1, 4, 18), "0.250000000000000000");
        assert_eq!(decimal_string(2, 3, 5), "0.66666");
        assert_eq!(decimal_string(7, 9, 3), "0.777");
    }

    #[test]
    fn csv_layout() {
        let mut out = Vec::new();
        enumerate_set(1, 2).unwrap().write_csv(&mut out).unwrap();
        assert_eq!(
            String::from_utf8(out).unwrap(),
            "a,q,k,value\n1,2,2,0.250000000000000000\n3,2,2,0.750000000000000000\n"
        );
    }

    #[test]
    fn cache_round_trip_and_header() {
        let set = enumerate_set(3, 3).unwrap();
        let mut buf = Vec::new();
        set.write_cache(&mut buf).unwrap();
        assert_eq!(&buf[0..8], &3u64.to_le_bytes());
        assert_eq!(&buf[8..16], &3u64.to_le_bytes());
        assert_eq!(&buf[16..24], &(set.len() as u64).to_le_bytes());
        assert_eq!(buf.len(), 24 + 16 * set.len());
        assert_eq!(FractionSet::read_cache(&buf[..]).unwrap(), set);
    }

    #[test]
    fn corrupt_cache_rejected() {
        let set = enumerate_set(2, 2).unwrap();
        let mut buf = Vec::new();
        set.write_cache(&mut buf).unwrap();
        // swap the first two records
        let (first, second) = (buf[24..40].to_vec(), buf[40..56].to_vec());
        let mut swapped = buf.clone();
        swapped[24..40].copy_from_slice(&second);
        swapped[40..56].copy_from_slice(&first);
        assert!(matches!(FractionSet::read_cache(&swapped[..]), Err(Error::Cache(_))));
        assert!(matches!(FractionSet::read_cache(&buf[..buf.len() - 3]), Err(Error::Cache(_))));
        let mut extra = buf.clone();
        extra.push(0);
        assert!(matches!(FractionSet::read_cache(&extra[..]), Err(Error::Cache(_))));
    }

    #[test]
    fn wide_comparison_agrees_with_narrow() {
        let big = u128::MAX / 3;
        assert_eq!(mul_cmp(big, 4, big, 3), Ordering::Greater);
        assert_eq!(mul_cmp(big, 6, big * 2, 3), Ordering::Equal);
        assert_eq!(mul_cmp(7, 9, 8, 8), Ordering::Less);
    }

    #[test]
    fn rotation_by_half() {
        let x = Rational01::new(1, 3).unwrap();
        let half = Rational01::new(1, 2).unwrap();
        assert_eq!(x.rotate(&half).unwrap(), Rational01::new(5, 6).unwrap());
        let y = Rational01::new(3, 4).unwrap();
        assert_eq!(y.rotate(&half).unwrap(), Rational01::new(1, 4).unwrap());
    }

    #[test]
    fn totients() {
        let phi: Vec<u64> = (1..=12).map(totient).collect();
        assert_eq!(phi, vec![1, 1, 2, 2, 4, 2, 6, 4, 6, 4, 10, 4]);
        assert_eq!(prime_divisors(360), vec![2, 3, 5]);
    }
}
