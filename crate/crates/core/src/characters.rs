//! Dirichlet characters modulo `q^k`, Gauss sums, and the passage from the
//! additive form over `a/q^k` to the multiplicative form over primitive
//! characters.

use num_complex::Complex64;
use rayon::prelude::*;
use serde::Serialize;

use crate::error::{Error, Result};
use crate::expsum::{e, e_frac, CompensatedSum};
use crate::rationals::{prime_divisors, totient};

/// Largest modulus accepted for a character table.
pub const MAX_MODULUS: u64 = 1_000_000;

/// Largest number of stored values `φ(m) · m`.
pub const MAX_TABLE_ENTRIES: u64 = 1 << 26;

/// Phase index marking `χ(a) = 0`.
const ZERO: u32 = u32::MAX;

fn pow_mod(mut base: u64, mut exp: u64, m: u64) -> u64 {
    let mut acc = 1 % m;
    base %= m;
    while exp > 0 {
        if exp & 1 == 1 {
            acc = acc * base % m;
        }
        base = base * base % m;
        exp >>= 1;
    }
    acc
}

/// Smallest primitive root modulo an odd prime `p` that also generates
/// the units modulo every power of `p`.
fn primitive_root(p: u64) -> u64 {
    let factors = prime_divisors(p - 1);
    let g = (2..p)
        .find(|&g| factors.iter().all(|r| pow_mod(g, (p - 1) / r, p) != 1))
        .unwrap_or(1);
    if pow_mod(g, p - 1, p * p) == 1 {
        g + p
    } else {
        g
    }
}

/// One cyclic factor of the unit group: `log` maps a residue modulo
/// `local` to its exponent on the factor's generator.
struct Factor {
    order: u32,
    local: u64,
    log: Vec<u32>,
    /// Exponent read off a residue: the `-1` factor of `2^e` uses the sign.
    sign_only: bool,
}

impl Factor {
    fn exponent(&self, a: u64) -> u32 {
        let r = a % self.local;
        if self.sign_only {
            return if r % 4 == 1 { 0 } else { 1 };
        }
        self.log[r as usize]
    }
}

fn cyclic_log(generator: u64, order: u32, local: u64) -> Vec<u32> {
    let mut log = vec![ZERO; local as usize];
    let mut x = 1 % local;
    for j in 0..order {
        log[x as usize] = j;
        x = x * generator % local;
    }
    log
}

fn factors_of(m: u64) -> Vec<Factor> {
    let mut out = Vec::new();
    for p in prime_divisors(m) {
        let mut local = 1;
        while m % (local * p) == 0 {
            local *= p;
        }
        if p == 2 {
            if local >= 4 {
                out.push(Factor { order: 2, local, log: Vec::new(), sign_only: true });
            }
            if local >= 8 {
                // 5 generates the residues ≡ 1 mod 4; fold the sign in first
                let order = (local / 4) as u32;
                let mut log = cyclic_log(5, order, local);
                for a in (3..local).step_by(4) {
                    log[a as usize] = log[(local - a) as usize];
                }
                out.push(Factor { order, local, log, sign_only: false });
            }
        } else {
            let order = (local / p * (p - 1)) as u32;
            let log = cyclic_log(primitive_root(p), order, local);
            out.push(Factor { order, local, log, sign_only: false });
        }
    }
    out
}

fn lcm(a: u64, b: u64) -> u64 {
    a / num_integer::gcd(a, b) * b
}

/// All characters modulo `m = q^k`, each stored as phase indices into the
/// `order`-th roots of unity.
#[derive(Debug, Clone)]
pub struct CharacterTable {
    q: u64,
    k: u32,
    modulus: u64,
    order: u64,
    /// Character index in mixed radix over the cyclic factors.
    radices: Vec<u32>,
    phases: Vec<Vec<u32>>,
    primitive: Vec<bool>,
    roots: Vec<Complex64>,
}

impl CharacterTable {
    pub fn new(q: u64, k: u32) -> Result<Self> {
        if q == 0 || k == 0 {
            return Err(Error::InvalidParameter(format!("need q >= 1, k >= 1 (got q={q}, k={k})")));
        }
        let modulus = q
            .checked_pow(k)
            .filter(|&m| m <= MAX_MODULUS)
            .ok_or_else(|| Error::Guard(format!("q^k = {q}^{k} exceeds {MAX_MODULUS}")))?;
        let count = totient(modulus);
        if count * modulus > MAX_TABLE_ENTRIES {
            return Err(Error::Guard(format!(
                "φ(m)·m = {} exceeds {MAX_TABLE_ENTRIES} stored values; use a smaller q^k",
                count * modulus
            )));
        }
        let factors = factors_of(modulus);
        let order = factors.iter().fold(1, |acc, f| lcm(acc, f.order as u64));
        let radices: Vec<u32> = factors.iter().map(|f| f.order).collect();

        let exponents: Vec<Option<Vec<u32>>> = (0..modulus)
            .map(|a| {
                (num_integer::gcd(a, modulus) == 1)
                    .then(|| factors.iter().map(|f| f.exponent(a)).collect())
            })
            .collect();

        let phases: Vec<Vec<u32>> = (0..count as usize)
            .into_par_iter()
            .map(|index| {
                let digits = mixed_radix(index, &radices);
                exponents
                    .iter()
                    .map(|ex| match ex {
                        None => ZERO,
                        Some(ex) => {
                            let mut t = 0u64;
                            for ((d, x), r) in digits.iter().zip(ex).zip(&radices) {
                                t += *d as u64 * *x as u64 * (order / *r as u64);
                            }
                            (t % order) as u32
                        }
                    })
                    .collect()
            })
            .collect();

        let roots = (0..order).map(|t| e(t as f64 / order as f64)).collect();
        let mut table = Self {
            q,
            k,
            modulus,
            order,
            radices,
            phases,
            primitive: Vec::new(),
            roots,
        };
        table.primitive = (0..table.len()).map(|i| table.primitive_by_restriction(i)).collect();
        Ok(table)
    }

    pub fn q(&self) -> u64 {
        self.q
    }

    pub fn k(&self) -> u32 {
        self.k
    }

    pub fn modulus(&self) -> u64 {
        self.modulus
    }

    pub fn len(&self) -> usize {
        self.phases.len()
    }

    pub fn is_empty(&self) -> bool {
        self.phases.is_empty()
    }

    /// Index of the principal character.
    pub fn principal(&self) -> usize {
        0
    }

    pub fn value(&self, chi: usize, a: u64) -> Complex64 {
        match self.phases[chi][(a % self.modulus) as usize] {
            ZERO => Complex64::new(0.0, 0.0),
            t => self.roots[t as usize],
        }
    }

    pub fn values(&self, chi: usize) -> Vec<Complex64> {
        (0..self.modulus).map(|a| self.value(chi, a)).collect()
    }

    /// Order of `χ` in the character group.
    pub fn character_order(&self, chi: usize) -> u64 {
        self.phases[chi]
            .iter()
            .filter(|&&t| t != ZERO)
            .fold(1, |acc, &t| lcm(acc, self.order / num_integer::gcd(t as u64, self.order)))
    }

    /// Index of `conj(χ)`.
    pub fn conjugate(&self, chi: usize) -> usize {
        let digits = mixed_radix(chi, &self.radices);
        let mut index = 0usize;
        for (d, r) in digits.iter().zip(&self.radices).rev() {
            index = index * *r as usize + ((*r - *d) % *r) as usize;
        }
        index
    }

    pub fn is_primitive(&self, chi: usize) -> bool {
        self.primitive[chi]
    }

    pub fn primitive_indices(&self) -> Vec<usize> {
        (0..self.len()).filter(|&i| self.primitive[i]).collect()
    }

    /// For every prime `p | m`, `χ` must be nontrivial on the units that
    /// are `≡ 1 mod m/p`.
    fn primitive_by_restriction(&self, chi: usize) -> bool {
        let m = self.modulus;
        if m == 1 {
            return false;
        }
        prime_divisors(m).into_iter().all(|p| {
            let step = m / p;
            (0..p)
                .map(|j| 1 + j * step)
                .filter(|&a| num_integer::gcd(a, m) == 1)
                .any(|a| self.phases[chi][(a % m) as usize] != 0)
        })
    }

    pub fn gauss_sum(&self, chi: usize) -> GaussSum {
        let mut acc = CompensatedSum::default();
        for a in 1..self.modulus {
            if self.phases[chi][a as usize] != ZERO {
                acc.add(self.value(chi, a) * e_frac(a as i128, self.modulus as u128));
            }
        }
        GaussSum { chi, value: acc.value() }
    }

    /// `max |Σ_a χ(a) conj(χ′(a)) - φ(m) [χ = χ′]|` over all pairs.
    pub fn orthogonality_error(&self) -> f64 {
        let phi = self.len() as f64;
        (0..self.len())
            .into_par_iter()
            .map(|i| {
                (i..self.len())
                    .map(|j| {
                        let mut acc = CompensatedSum::default();
                        for (x, y) in self.phases[i].iter().zip(&self.phases[j]) {
                            if *x != ZERO {
                                let t = (*x as u64 + self.order - *y as u64) % self.order;
                                acc.add(self.roots[t as usize]);
                            }
                        }
                        let target = if i == j { phi } else { 0.0 };
                        (acc.value() - target).norm()
                    })
                    .fold(0.0, f64::max)
            })
            .reduce(|| 0.0, f64::max)
    }

    /// `max_n |χ(n) - G(conj χ)⁻¹ Σ_a conj(χ)(a) e(an/m)|` over `n` coprime to `m`.
    pub fn inversion_check(&self, chi: usize) -> Result<f64> {
        if !self.is_primitive(chi) {
            return Err(Error::NotPrimitive(chi));
        }
        let bar = self.conjugate(chi);
        let g = self.gauss_sum(bar).value;
        let m = self.modulus;
        let worst = (1..m)
            .filter(|&n| num_integer::gcd(n, m) == 1)
            .map(|n| {
                let mut acc = CompensatedSum::default();
                for a in 1..m {
                    if self.phases[bar][a as usize] != ZERO {
                        acc.add(self.value(bar, a) * e_frac(a as i128 * n as i128, m as u128));
                    }
                }
                (self.value(chi, n) - acc.value() / g).norm()
            })
            .fold(0.0, f64::max);
        Ok(worst)
    }

    /// `Σ_n a_n χ(n)` over `n = M+1..M+N`.
    pub fn twisted_sum(&self, chi: usize, coefficients: &[Complex64], offset: i64) -> Complex64 {
        let mut acc = CompensatedSum::default();
        for (j, c) in coefficients.iter().enumerate() {
            let n = (offset + 1 + j as i64).rem_euclid(self.modulus as i64) as u64;
            acc.add(c * self.value(chi, n));
        }
        acc.value()
    }

    pub fn export(&self) -> TableExport {
        TableExport {
            modulus: self.modulus,
            characters: (0..self.len())
                .map(|i| CharacterExport {
                    index: i,
                    primitive: self.primitive[i],
                    values: self.values(i).iter().map(|z| (z.re, z.im)).collect(),
                })
                .collect(),
        }
    }
}

fn mixed_radix(mut index: usize, radices: &[u32]) -> Vec<u32> {
    radices
        .iter()
        .map(|&r| {
            let d = (index % r as usize) as u32;
            index /= r as usize;
            d
        })
        .collect()
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct GaussSum {
    pub chi: usize,
    #[serde(serialize_with = "pair")]
    pub value: Complex64,
}

fn pair<S: serde::Serializer>(z: &Complex64, s: S) -> std::result::Result<S::Ok, S::Error> {
    (z.re, z.im).serialize(s)
}

#[derive(Debug, Clone, Serialize)]
pub struct CharacterExport {
    pub index: usize,
    pub primitive: bool,
    pub values: Vec<(f64, f64)>,
}

#[derive(Debug, Clone, Serialize)]
pub struct TableExport {
    pub modulus: u64,
    pub characters: Vec<CharacterExport>,
}

/// `S(a/m) = Σ_n a_n e(an/m)` for every residue `a`.
fn additive_sums(modulus: u64, coefficients: &[Complex64], offset: i64) -> Vec<Complex64> {
    (0..modulus)
        .map(|a| {
            let mut acc = CompensatedSum::default();
            for (j, c) in coefficients.iter().enumerate() {
                let n = offset + 1 + j as i64;
                acc.add(c * e_frac(a as i128 * n as i128, modulus as u128));
            }
            acc.value()
        })
        .collect()
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct TransferCheck {
    /// `Σ*_χ |Σ a_n χ(n)|²` over primitive `χ`.
    pub lhs: f64,
    /// `m⁻¹ Σ_χ |Σ_a conj(χ)(a) S(a/m)|²` over all `χ`.
    pub middle: f64,
    /// `φ(m)/m · Σ_{(a,q)=1} |S(a/m)|²`.
    pub rhs: f64,
    /// Largest gap between a primitive term of `lhs` and its rewriting
    /// through the Gauss sum.
    pub term_gap: f64,
}

impl TransferCheck {
    pub fn holds(&self, tol: f64) -> bool {
        let scale = self.rhs.abs().max(1.0);
        self.lhs <= self.rhs + tol * scale && (self.middle - self.rhs).abs() <= tol * scale
    }
}

pub fn mult_transfer_check(table: &CharacterTable, coefficients: &[Complex64], offset: i64) -> TransferCheck {
    let m = table.modulus();
    let sums = additive_sums(m, coefficients, offset);
    let mf = m as f64;
    let rewritten = |chi: usize| {
        let bar = table.conjugate(chi);
        let mut acc = CompensatedSum::default();
        for (a, s) in sums.iter().enumerate() {
            acc.add(table.value(bar, a as u64) * s);
        }
        acc.value().norm_sqr() / mf
    };
    let mut lhs = 0.0;
    let mut middle = 0.0;
    let mut term_gap: f64 = 0.0;
    for chi in 0..table.len() {
        let r = rewritten(chi);
        middle += r;
        if table.is_primitive(chi) {
            let direct = table.twisted_sum(chi, coefficients, offset).norm_sqr();
            lhs += direct;
            term_gap = term_gap.max((direct - r).abs());
        }
    }
    let coprime: f64 = sums
        .iter()
        .enumerate()
        .filter(|(a, _)| num_integer::gcd(*a as u64, m) == 1)
        .map(|(_, s)| s.norm_sqr())
        .sum();
    let rhs = table.len() as f64 / mf * coprime;
    TransferCheck { lhs, middle, rhs, term_gap }
}

/// `Σ_{q=2}^{Q} (q/φ(q)) Σ*_{χ mod q^k} |Σ_n a_n χ(n)|²`. The modulus 1
/// carries no primitive character.
pub fn corollary_lhs(q_max: u64, k: u32, coefficients: &[Complex64], offset: i64) -> Result<f64> {
    let mut total = 0.0;
    for q in 2..=q_max {
        let table = CharacterTable::new(q, k)?;
        let weight = q as f64 / totient(q) as f64;
        let inner: f64 = table
            .primitive_indices()
            .into_iter()
            .map(|chi| table.twisted_sum(chi, coefficients, offset).norm_sqr())
            .sum();
        total += weight * inner;
    }
    Ok(total)
}
