//! Exponential sums `Σ e(f(n))`, the Weyl differencing bound, the Fejér
//! majorant `φ(x) = (sin πx / 2x)²` and the kernel `V(y) = Σ φ(n/2N) e(ny)`.

use std::f64::consts::PI;

use num_complex::Complex64;
use num_integer::Integer;
use num_rational::Ratio;
use num_traits::{Signed, Zero};
use serde::Serialize;

use crate::error::{Error, Result};
use crate::rationals::{Rational01, TorusPoint};

/// Minimum truncation length for the Poisson check.
pub const MIN_POISSON_TERMS: u64 = 1_000;

/// `‖x‖` values below this are treated as zero on the real-α path.
pub const REAL_ALPHA_GUARD: f64 = 1e-9;

/// `e(x) = exp(2πix)`.
#[inline]
pub fn e(x: f64) -> Complex64 {
    let (s, c) = (2.0 * PI * x).sin_cos();
    Complex64::new(c, s)
}

/// `e(num / den)` for an exact fraction, reducing modulo 1 first.
#[inline]
pub fn e_frac(num: i128, den: u128) -> Complex64 {
    let r = num.rem_euclid(den as i128) as u128;
    e(r as f64 / den as f64)
}

/// Kahan–Babuška summation of complex terms.
#[derive(Debug, Default, Clone, Copy)]
pub struct CompensatedSum {
    sum: Complex64,
    comp: Complex64,
}

impl CompensatedSum {
    pub fn add(&mut self, x: Complex64) {
        self.sum.re = neumaier(&mut self.comp.re, self.sum.re, x.re);
        self.sum.im = neumaier(&mut self.comp.im, self.sum.im, x.im);
    }

    pub fn value(&self) -> Complex64 {
        self.sum + self.comp
    }
}

#[inline]
fn neumaier(comp: &mut f64, sum: f64, x: f64) -> f64 {
    let t = sum + x;
    if sum.abs() >= x.abs() {
        *comp += (sum - t) + x;
    } else {
        *comp += (x - t) + sum;
    }
    t
}

/// Real compensated sum.
pub fn sum_f64<I: IntoIterator<Item = f64>>(terms: I) -> f64 {
    let (mut sum, mut comp) = (0.0, 0.0);
    for x in terms {
        sum = neumaier(&mut comp, sum, x);
    }
    sum + comp
}

/// A polynomial phase `f(x) = Σ c_i x^i` with exact rational coefficients.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct PolynomialPhase {
    coefficients: Vec<Ratio<i64>>,
    /// Common denominator of all coefficients.
    common_den: u128,
    /// `c_i · common_den`, reduced modulo `common_den`.
    scaled: Vec<u128>,
}

impl PolynomialPhase {
    /// Coefficients from the constant term upward; the last one is the
    /// leading coefficient `α` and must be nonzero, degree at least 2.
    pub fn new(coefficients: Vec<Ratio<i64>>) -> Result<Self> {
        if coefficients.len() < 3 {
            return Err(Error::InvalidParameter(format!(
                "phase degree {} is below 2",
                coefficients.len().saturating_sub(1)
            )));
        }
        if coefficients.last().is_some_and(|c| c.is_zero()) {
            return Err(Error::InvalidParameter("leading coefficient must be nonzero".into()));
        }
        let mut common_den: u128 = 1;
        for c in &coefficients {
            common_den = common_den.lcm(&(c.denom().unsigned_abs() as u128));
            if common_den > 1 << 62 {
                return Err(Error::Range("coefficient denominators exceed 2^62".into()));
            }
        }
        let scaled = coefficients
            .iter()
            .map(|c| {
                let num = *c.numer() as i128 * (common_den / c.denom().unsigned_abs() as u128) as i128;
                num.rem_euclid(common_den as i128) as u128
            })
            .collect();
        Ok(Self { coefficients, common_den, scaled })
    }

    /// The monomial `α x^k`.
    pub fn monomial(alpha: Ratio<i64>, k: u32) -> Result<Self> {
        let mut c = vec![Ratio::zero(); k as usize + 1];
        c[k as usize] = alpha;
        Self::new(c)
    }

    pub fn degree(&self) -> u32 {
        (self.coefficients.len() - 1) as u32
    }

    pub fn leading(&self) -> Ratio<i64> {
        *self.coefficients.last().expect("degree >= 2")
    }

    pub fn coefficients(&self) -> &[Ratio<i64>] {
        &self.coefficients
    }

    /// `f(n) mod 1` as the exact fraction `r / common_den`.
    pub fn phase_at(&self, n: i64) -> (u128, u128) {
        let m = self.common_den;
        let n_mod = (n as i128).rem_euclid(m as i128) as u128;
        let mut acc: u128 = 0;
        for &c in self.scaled.iter().rev() {
            acc = (acc * n_mod % m + c) % m;
        }
        (acc, m)
    }
}

/// A run of `len` consecutive integers starting at `start`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
pub struct Interval {
    pub start: i64,
    pub len: u64,
}

impl Interval {
    pub fn new(start: i64, len: u64) -> Result<Self> {
        if len == 0 {
            return Err(Error::InvalidParameter("interval length must be at least 1".into()));
        }
        Ok(Self { start, len })
    }

    pub fn iter(&self) -> impl Iterator<Item = i64> {
        let start = self.start;
        (0..self.len as i64).map(move |i| start + i)
    }
}

/// `S = Σ_{n∈I} e(f(n))`, each phase reduced exactly modulo 1.
pub fn exp_sum(phase: &PolynomialPhase, interval: Interval) -> Complex64 {
    let mut acc = CompensatedSum::default();
    for n in interval.iter() {
        let (r, m) = phase.phase_at(n);
        acc.add(e(r as f64 / m as f64));
    }
    acc.value()
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
pub struct WeylParams {
    pub kappa: u64,
    pub interval: Interval,
}

impl WeylParams {
    pub fn new(k: u32, interval: Interval) -> Result<Self> {
        if !(2..=7).contains(&k) {
            return Err(Error::InvalidParameter(format!("Weyl degree k = {k} outside 2..=7")));
        }
        Ok(Self { kappa: 1 << (k - 1), interval })
    }
}

fn factorial(k: u32) -> u128 {
    (1..=k as u128).product()
}

/// Visits every product `r_1 ⋯ r_{k-1}` with each `r_i ∈ [1, n-1]`, passing
/// the product reduced modulo `modulus`.
fn for_each_product_mod(n: u64, depth: u32, modulus: u128, f: &mut impl FnMut(u128)) {
    fn go(n: u64, depth: u32, acc: u128, modulus: u128, f: &mut impl FnMut(u128)) {
        if depth == 0 {
            f(acc);
            return;
        }
        for r in 1..n {
            go(n, depth - 1, acc * (r as u128 % modulus) % modulus, modulus, f);
        }
    }
    go(n, depth, 1 % modulus, modulus, f);
}

fn weyl_total(kappa: u64, k: u32, n: u64, r_sum: f64) -> f64 {
    let nf = n as f64;
    let kappa_i = kappa as i32;
    2f64.powi(2 * kappa_i) * nf.powi(kappa_i - 1)
        + 2f64.powi(kappa_i) * nf.powi(kappa_i - k as i32) * r_sum
}

/// Right side of the Weyl differencing inequality
/// `|S|^κ ≤ 2^{2κ} N^{κ-1} + 2^κ N^{κ-k} Σ_{r} min(N, 1/‖α k! r_1⋯r_{k-1}‖)`,
/// with `κ = 2^{k-1}` and each `r_i` running over `1..N-1`.
///
/// `‖·‖` is evaluated exactly; a zero distance contributes `N`.
pub fn weyl_bound(phase: &PolynomialPhase, interval: Interval) -> Result<f64> {
    let k = phase.degree();
    let params = WeylParams::new(k, interval)?;
    let n = interval.len;
    let alpha = phase.leading();
    let den = alpha.denom().unsigned_abs() as u128;
    let num = (*alpha.numer() as i128).rem_euclid(den as i128) as u128;
    let scale = num * (factorial(k) % den) % den;

    let mut terms = Vec::new();
    for_each_product_mod(n, k - 1, den, &mut |product| {
        let m = scale * product % den;
        let nearest = m.min(den - m);
        let term = if nearest == 0 || (n as u128) * nearest <= den {
            // ‖·‖ ≤ 1/N, so the minimum is N
            n as f64
        } else {
            den as f64 / nearest as f64
        };
        terms.push(term);
    });
    Ok(weyl_total(params.kappa, k, n, sum_f64(terms)))
}

/// The Weyl bound for a real (possibly irrational) leading coefficient.
/// Distances below [`REAL_ALPHA_GUARD`] count as zero.
pub fn weyl_bound_real(alpha: f64, k: u32, interval: Interval) -> Result<f64> {
    let params = WeylParams::new(k, interval)?;
    let n = interval.len;
    let scaled = alpha * factorial(k) as f64;
    let mut terms = Vec::new();
    fn go(n: u64, depth: u32, acc: f64, scaled: f64, terms: &mut Vec<f64>) {
        if depth == 0 {
            let x = scaled * acc;
            let d = (x - x.round()).abs();
            let nf = n as f64;
            terms.push(if d < REAL_ALPHA_GUARD { nf } else { nf.min(1.0 / d) });
            return;
        }
        for r in 1..n {
            go(n, depth - 1, acc * r as f64, scaled, terms);
        }
    }
    go(n, k - 1, 1.0, scaled, &mut terms);
    Ok(weyl_total(params.kappa, k, n, sum_f64(terms)))
}

/// One row of a bound-tightness study.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct WeylRow {
    pub n: u64,
    pub s_pow_kappa: f64,
    pub bound: f64,
    pub ratio: f64,
}

/// `|S|^κ` against the bound for every prefix length `1..=max_len` starting at 1.
pub fn weyl_study(phase: &PolynomialPhase, max_len: u64) -> Result<Vec<WeylRow>> {
    let kappa = 1i32 << (phase.degree() - 1);
    (1..=max_len)
        .map(|n| {
            let interval = Interval::new(1, n)?;
            let s = exp_sum(phase, interval).norm().powi(kappa);
            let bound = weyl_bound(phase, interval)?;
            Ok(WeylRow { n, s_pow_kappa: s, bound, ratio: s / bound })
        })
        .collect()
}

/// `φ(x) = (sin πx / 2x)²`, with `φ(0) = π²/4`.
pub fn fejer_phi(x: f64) -> f64 {
    if x == 0.0 {
        return PI * PI / 4.0;
    }
    let v = (PI * x).sin() / (2.0 * x);
    v * v
}

/// `φ̂(s) = (π²/4) max(1 - |s|, 0)`.
pub fn fejer_phi_hat(s: f64) -> f64 {
    PI * PI / 4.0 * (1.0 - s.abs()).max(0.0)
}

/// `φ(n / 2N) = N² sin²(πn/2N) / n²`, reducing `n mod 2N` before the sine.
fn phi_at(n: u64, big_n: u64) -> f64 {
    if n == 0 {
        return fejer_phi(0.0);
    }
    let period = 2 * big_n;
    let s = (PI * (n % period) as f64 / period as f64).sin();
    let nf = n as f64;
    let bn = big_n as f64;
    bn * bn * s * s / (nf * nf)
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct PoissonCheck {
    /// `Σ_{|n|≤T} φ(n/2N)`.
    pub lhs: f64,
    /// `2N φ̂(0) = π²N/2`.
    pub rhs: f64,
    pub gap: f64,
    /// `(2N)²/T`, a majorant for the omitted terms.
    pub tail_bound: f64,
    pub terms: u64,
}

/// Default truncation `max(10³, 100 N)`.
pub fn default_poisson_terms(n: u64) -> u64 {
    MIN_POISSON_TERMS.max(100 * n)
}

/// Both sides of `Σ_n φ(n/2N) = 2N Σ_m φ̂(2Nm)`. Only `m = 0` survives on the
/// right since `φ̂` vanishes outside `[-1, 1]`.
pub fn poisson_identity_check(n: u64, tail: u64) -> Result<PoissonCheck> {
    if n == 0 {
        return Err(Error::InvalidParameter("N must be positive".into()));
    }
    if tail < MIN_POISSON_TERMS {
        return Err(Error::InvalidParameter(format!(
            "truncation {tail} is below the minimum {MIN_POISSON_TERMS}"
        )));
    }
    let one_side = sum_f64((1..=tail).rev().map(|m| phi_at(m, n)));
    let lhs = phi_at(0, n) + 2.0 * one_side;
    let rhs = 2.0 * n as f64 * fejer_phi_hat(0.0);
    let nf = n as f64;
    Ok(PoissonCheck {
        lhs,
        rhs,
        gap: (lhs - rhs).abs(),
        tail_bound: (2.0 * nf).powi(2) / tail as f64,
        terms: tail,
    })
}

/// Closed form `V(y) = (π²N/2)(1 - 2N‖y‖)` for `‖y‖ < 1/(2N)`, else 0.
pub fn v_kernel(y: f64, n: u64) -> f64 {
    let dist = (y - y.round()).abs();
    let nf = n as f64;
    if 2.0 * nf * dist < 1.0 {
        PI * PI * nf / 2.0 * (1.0 - 2.0 * nf * dist)
    } else {
        0.0
    }
}

/// Closed form of `V` at an exact rational point; the support boundary is
/// decided exactly.
pub fn v_kernel_exact(y: &Rational01, n: u64) -> f64 {
    let num = y.numer() as u128;
    let den = y.denom() as u128;
    let dist_num = num.min(den - num);
    let two_n = 2 * n as u128;
    if two_n * dist_num >= den {
        return 0.0;
    }
    let nf = n as f64;
    PI * PI * nf / 2.0 * ((den - two_n * dist_num) as f64 / den as f64)
}

/// Truncated Fourier sum `Σ_{|n|≤T} φ(n/2N) e(ny)`.
pub fn v_kernel_partial(y: f64, n: u64, terms: u64) -> Complex64 {
    let mut acc = CompensatedSum::default();
    for m in (1..=terms).rev() {
        let w = phi_at(m, n);
        acc.add(w * e(m as f64 * y));
        acc.add(w * e(-(m as f64) * y));
    }
    acc.add(Complex64::new(phi_at(0, n), 0.0));
    acc.value()
}

/// Trigamma `ψ'(x) = Σ_{j≥0} 1/(x+j)²` for `x > 0`.
pub fn trigamma(mut x: f64) -> f64 {
    assert!(x > 0.0, "trigamma needs a positive argument");
    let mut acc = 0.0;
    while x < 20.0 {
        acc += 1.0 / (x * x);
        x += 1.0;
    }
    let inv = 1.0 / x;
    let inv2 = inv * inv;
    // asymptotic series with Bernoulli-number coefficients
    let series = inv
        + inv2 / 2.0
        + inv * inv2
            * (1.0 / 6.0
                + inv2 * (-1.0 / 30.0 + inv2 * (1.0 / 42.0 + inv2 * (-1.0 / 30.0 + inv2 * 5.0 / 66.0))));
    acc + series
}

/// The full Fourier series `Σ_n φ(n/2N) e(ny)` at a rational `y`, summed
/// exactly over residue classes modulo the joint period `P = lcm(2N, den y)`:
/// `Σ_{n≥1} g(n)/n² = P^{-2} Σ_{r=1}^{P} g(r) ψ'(r/P)` for `P`-periodic `g`.
pub fn v_kernel_series(y: &Rational01, n: u64) -> Result<f64> {
    if n == 0 {
        return Err(Error::InvalidParameter("N must be positive".into()));
    }
    let period = (2 * n).lcm(&y.denom());
    if period > 1 << 24 {
        return Err(Error::Guard(format!("joint period {period} is too long")));
    }
    let pf = period as f64;
    let nf = n as f64;
    let terms = (1..=period).map(|r| {
        let s = (PI * (r % (2 * n)) as f64 / (2 * n) as f64).sin();
        let c = e_frac(r as i128 * y.numer() as i128, y.denom() as u128).re;
        nf * nf * s * s * c * trigamma(r as f64 / pf) / (pf * pf)
    });
    Ok(fejer_phi(0.0) + 2.0 * sum_f64(terms))
}

/// Parses `p/q` or an integer into an exact rational.
pub fn parse_ratio(text: &str) -> Result<Ratio<i64>> {
    let bad = || Error::InvalidParameter(format!("cannot parse rational '{text}'"));
    let r = match text.split_once('/') {
        Some((p, q)) => {
            let p: i64 = p.trim().parse().map_err(|_| bad())?;
            let q: i64 = q.trim().parse().map_err(|_| bad())?;
            if q == 0 {
                return Err(bad());
            }
            Ratio::new(p, q)
        }
        None => Ratio::from_integer(text.trim().parse().map_err(|_| bad())?),
    };
    Ok(if r.denom().is_negative() { Ratio::new(-r.numer(), -r.denom()) } else { r })
}

#[cfg(test)]
mod tests {
    use super::*;

    fn ratio(p: i64, q: i64) -> Ratio<i64> {
        Ratio::new(p, q)
    }

    // f(n) = n²/5 summed term by term in floating point, n = 1..20.
    fn direct_fifths() -> Complex64 {
        (1..=20).map(|n: i64| e((n * n) as f64 / 5.0)).sum()
    }

    #[test]
    fn alternating_and_trivial_sums() {
        let half = PolynomialPhase::monomial(ratio(1, 2), 2).unwrap();
        assert!(exp_sum(&half, Interval::new(1, 10).unwrap()).norm() < 1e-12);
        let int = PolynomialPhase::monomial(ratio(1, 1), 2).unwrap();
        let s = exp_sum(&int, Interval::new(1, 5).unwrap());
        assert!((s - Complex64::new(5.0, 0.0)).norm() < 1e-12);
    }

    #[test]
    fn fifths_against_direct_evaluation() {
        let phase = PolynomialPhase::monomial(ratio(1, 5), 2).unwrap();
        let s = exp_sum(&phase, Interval::new(1, 20).unwrap());
        let direct = direct_fifths();
        assert!((s - direct).norm() < 1e-12);
        // n² mod 5 cycles through 1,4,4,1,0: each period is the quadratic
        // Gauss sum √5
        assert!((s - Complex64::new(4.0 * 5f64.sqrt(), 0.0)).norm() < 1e-12, "{s}");
    }

    #[test]
    fn phase_reduction_is_exact_for_large_n() {
        let phase = PolynomialPhase::new(vec![ratio(1, 3), ratio(-2, 7), ratio(5, 11)]).unwrap();
        let n: i64 = 1_000_000_007;
        let (r, m) = phase.phase_at(n);
        let exact = Ratio::<i128>::new(1, 3) + Ratio::new(-2, 7) * n as i128
            + Ratio::new(5, 11) * (n as i128) * (n as i128);
        let frac = exact - exact.floor();
        assert_eq!(Ratio::new(r as i128, m as i128), frac);
    }

    #[test]
    fn weyl_bound_square_integer_alpha() {
        let phase = PolynomialPhase::monomial(ratio(1, 1), 2).unwrap();
        let bound = weyl_bound(&phase, Interval::new(1, 5).unwrap()).unwrap();
        assert_eq!(bound, 160.0);
    }

    #[test]
    fn weyl_bound_half_alpha_frozen() {
        // α = 1/2, k! = 2: every ‖r‖ = 0, so each of the 9 terms is N = 10
        let phase = PolynomialPhase::monomial(ratio(1, 2), 2).unwrap();
        let bound = weyl_bound(&phase, Interval::new(1, 10).unwrap()).unwrap();
        assert_eq!(bound, 16.0 * 10.0 + 4.0 * 90.0);
        assert!(exp_sum(&phase, Interval::new(1, 10).unwrap()).norm_sqr() <= bound);
    }

    #[test]
    fn weyl_bound_cubic_four_fold() {
        let phase = PolynomialPhase::monomial(ratio(1, 7), 3).unwrap();
        let interval = Interval::new(1, 8).unwrap();
        // direct double sum over r1, r2 in 1..7 with ‖6 r1 r2 / 7‖
        let mut r_sum = 0.0;
        for r1 in 1..8i64 {
            for r2 in 1..8i64 {
                let m = (6 * r1 * r2).rem_euclid(7);
                let d = m.min(7 - m) as f64 / 7.0;
                r_sum += if d == 0.0 { 8.0 } else { (1.0 / d).min(8.0) };
            }
        }
        let expected = 256.0 * 512.0 + 16.0 * 8.0 * r_sum;
        let bound = weyl_bound(&phase, interval).unwrap();
        assert!((bound - expected).abs() < 1e-9 * expected);
        assert!(exp_sum(&phase, interval).norm().powi(4) <= bound);
    }

    #[test]
    fn weyl_bound_length_one() {
        let phase = PolynomialPhase::monomial(ratio(3, 8), 2).unwrap();
        assert_eq!(weyl_bound(&phase, Interval::new(4, 1).unwrap()).unwrap(), 16.0);
        let cubic = PolynomialPhase::monomial(ratio(3, 8), 3).unwrap();
        assert_eq!(weyl_bound(&cubic, Interval::new(4, 1).unwrap()).unwrap(), 256.0);
    }

    #[test]
    fn real_alpha_matches_rational_path() {
        let phase = PolynomialPhase::monomial(ratio(3, 11), 2).unwrap();
        let interval = Interval::new(1, 30).unwrap();
        let exact = weyl_bound(&phase, interval).unwrap();
        let real = weyl_bound_real(3.0 / 11.0, 2, interval).unwrap();
        assert!((exact - real).abs() < 1e-6 * exact);
        assert!(weyl_bound_real(2f64.sqrt(), 3, interval).unwrap() > 0.0);
    }

    #[test]
    fn fejer_values() {
        assert_eq!(fejer_phi(0.0), PI * PI / 4.0);
        assert!((fejer_phi(0.5) - 1.0).abs() < 1e-15);
        assert!(fejer_phi(1.0).abs() < 1e-30);
        assert_eq!(fejer_phi_hat(0.0), PI * PI / 4.0);
        assert_eq!(fejer_phi_hat(1.0), 0.0);
        assert_eq!(fejer_phi_hat(-0.5), PI * PI / 8.0);
    }

    #[test]
    fn poisson_small_n() {
        for n in [1u64, 3] {
            let c = poisson_identity_check(n, default_poisson_terms(n)).unwrap();
            assert!((c.rhs - PI * PI * n as f64 / 2.0).abs() < 1e-12);
            assert!(c.gap <= c.tail_bound, "{c:?}");
        }
        assert!(poisson_identity_check(1, 999).is_err());
    }

    #[test]
    fn kernel_at_centre_and_edge() {
        assert!((v_kernel(0.0, 1) - PI * PI / 2.0).abs() < 1e-15);
        assert_eq!(v_kernel(0.25, 2), 0.0);
        let edge = Rational01::new(1, 4).unwrap();
        assert_eq!(v_kernel_exact(&edge, 2), 0.0);
        assert!(v_kernel_partial(0.0, 3, 2000).im.abs() < 1e-12);
    }

    #[test]
    fn kernel_eighth_two() {
        let y = Rational01::new(1, 8).unwrap();
        let closed = v_kernel_exact(&y, 2);
        // (π²·2/2)(1 - 4/8) = π²/2
        assert!((closed - PI * PI / 2.0).abs() < 1e-14);
        let series = v_kernel_series(&y, 2).unwrap();
        assert!((closed - series).abs() < 1e-6, "{closed} vs {series}");
    }

    #[test]
    fn trigamma_known_values() {
        assert!((trigamma(1.0) - PI * PI / 6.0).abs() < 1e-13);
        assert!((trigamma(0.5) - PI * PI / 2.0).abs() < 1e-12);
        assert!((trigamma(0.25) - (PI * PI + 8.0 * 0.915_965_594_177_219_f64)).abs() < 1e-11);
    }

    #[test]
    fn parse_rationals() {
        assert_eq!(parse_ratio("3/-6").unwrap(), ratio(-1, 2));
        assert_eq!(parse_ratio("4").unwrap(), ratio(4, 1));
        assert!(parse_ratio("1/0").is_err());
        assert!(parse_ratio("x").is_err());
    }

    #[test]
    fn degenerate_phases_rejected() {
        assert!(PolynomialPhase::new(vec![ratio(1, 2), ratio(1, 3)]).is_err());
        assert!(PolynomialPhase::new(vec![ratio(1, 2), ratio(1, 3), ratio(0, 1)]).is_err());
        assert!(Interval::new(0, 0).is_err());
    }
}
