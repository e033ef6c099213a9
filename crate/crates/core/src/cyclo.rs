//! Exact arithmetic in cyclotomic fields ℚ(ζ_m).
//!
//! A [`CycloNum`] is an element of ℚ(ζ_m) stored on the power basis
//! 1, ζ, …, ζ^{φ(m)−1} reduced modulo the m-th cyclotomic polynomial Φ_m,
//! as a vector of integer numerators over one positive denominator. The
//! representation is canonical, so equality at a fixed conductor is
//! coefficient comparison; operands at different conductors are lifted to the
//! lcm first.
//!
//! Provided here:
//! - construction: [`CycloNum::root_of_unity`], [`CycloNum::from_rational`],
//!   integer/rational conversions,
//! - exact field arithmetic (`+`, `-`, `*`, [`CycloNum::div`],
//!   [`CycloNum::inv`], [`CycloNum::pow`]),
//! - Galois action [`CycloNum::galois_apply`] and the subfield test
//!   [`CycloNum::lies_in_subfield`] / exact lowering [`CycloNum::lower_to`],
//! - JSON serialization as `{"m": m, "coeffs": ["num/den", …]}`,
//! - a display form and an approximate complex embedding for human output.
//!
//! Reduction tables (x^k mod Φ_m) are memoized per conductor in a
//! process-wide registry: concurrent readers, serialized writers.

use std::collections::HashMap;
use std::fmt;
use std::str::FromStr;
use std::sync::{Arc, LazyLock, RwLock};

use num_bigint::BigInt;
use num_integer::Integer;
use num_rational::BigRational;
use num_traits::{One, Signed, ToPrimitive, Zero};
use serde::de::Error as _;
use serde::{Deserialize, Deserializer, Serialize, Serializer};
use thiserror::Error;

/// Hard cap on conductors. Exact arithmetic needs dense degree-φ(m)
/// reduction tables; beyond this size values would have ~10⁵ coefficients
/// and every product would crawl, so construction refuses instead of
/// hanging. All verification flows use m = p(q−1) ≤ a few hundred.
pub const MAX_CONDUCTOR: u64 = 20_000;

/// Conductors up to this size get a dense table of all m reduction rows;
/// larger ones fall back to on-demand rows memoized per exponent.
const DENSE_ROWS_LIMIT: u64 = 512;

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum CycloError {
    #[error("division by zero")]
    DivisionByZero,
    #[error("galois exponent {c} is not coprime to conductor {m}")]
    NotCoprime { c: u64, m: u64 },
    #[error("{d} does not divide conductor {m}")]
    NotDivisor { d: u64, m: u64 },
    #[error("value does not lie in the subfield of conductor {d}")]
    NotInSubfield { d: u64 },
    #[error("bad cyclotomic serialization: {0}")]
    BadSerialization(String),
}

// ---- integer utilities ----

/// Euler's totient.
pub fn euler_phi(m: u64) -> u64 {
    let mut phi = m;
    for (p, _) in factorize(m) {
        phi = phi / p * (p - 1);
    }
    phi
}

/// Prime factorization by trial division, as (prime, exponent) pairs.
pub fn factorize(mut n: u64) -> Vec<(u64, u32)> {
    let mut out = Vec::new();
    let mut d = 2;
    while d * d <= n {
        if n % d == 0 {
            let mut e = 0;
            while n % d == 0 {
                n /= d;
                e += 1;
            }
            out.push((d, e));
        }
        d += 1;
    }
    if n > 1 {
        out.push((n, 1));
    }
    out
}

/// All divisors of n in increasing order.
pub fn divisors(n: u64) -> Vec<u64> {
    let mut out = vec![1u64];
    for (p, e) in factorize(n) {
        let prev = out.clone();
        let mut pk = 1;
        for _ in 0..e {
            pk *= p;
            out.extend(prev.iter().map(|d| d * pk));
        }
    }
    out.sort_unstable();
    out
}

// ---- integer polynomial helpers (dense, low degree first) ----

fn poly_trim(v: &mut Vec<BigInt>) {
    while v.len() > 1 && v.last().map_or(false, |c| c.is_zero()) {
        v.pop();
    }
}

fn poly_mul(a: &[BigInt], b: &[BigInt]) -> Vec<BigInt> {
    let mut out = vec![BigInt::zero(); a.len() + b.len() - 1];
    for (i, x) in a.iter().enumerate() {
        if x.is_zero() {
            continue;
        }
        for (j, y) in b.iter().enumerate() {
            if !y.is_zero() {
                out[i + j] += x * y;
            }
        }
    }
    out
}

/// Exact division by a monic polynomial; panics if the division is inexact
/// (only ever used on products of cyclotomic polynomials, where it is exact).
fn poly_divexact_monic(num: &[BigInt], den: &[BigInt]) -> Vec<BigInt> {
    assert!(den.last().map_or(false, |c| c.is_one()));
    let mut rem = num.to_vec();
    poly_trim(&mut rem);
    let dd = den.len() - 1;
    assert!(rem.len() - 1 >= dd);
    let mut quot = vec![BigInt::zero(); rem.len() - dd];
    for k in (0..quot.len()).rev() {
        let c = std::mem::take(&mut rem[k + dd]);
        if c.is_zero() {
            continue;
        }
        for (i, d) in den.iter().enumerate().take(dd) {
            if !d.is_zero() {
                rem[k + i] -= &c * d;
            }
        }
        quot[k] = c;
    }
    assert!(rem.iter().all(|c| c.is_zero()), "inexact polynomial division");
    quot
}

/// The m-th cyclotomic polynomial Φ_m, monic of degree φ(m), memoized.
/// Computed by iterated exact division of x^m − 1 by Φ_d over proper
/// divisors d of m.
pub fn cyclotomic_poly(m: u64) -> Arc<Vec<BigInt>> {
    static MEMO: LazyLock<RwLock<HashMap<u64, Arc<Vec<BigInt>>>>> =
        LazyLock::new(|| RwLock::new(HashMap::new()));
    if let Some(p) = MEMO.read().unwrap().get(&m) {
        return p.clone();
    }
    let mut f = vec![BigInt::zero(); m as usize + 1];
    f[0] = -BigInt::one();
    f[m as usize] = BigInt::one();
    for d in divisors(m) {
        if d < m {
            f = poly_divexact_monic(&f, &cyclotomic_poly(d));
        }
    }
    let arc = Arc::new(f);
    MEMO.write().unwrap().entry(m).or_insert_with(|| arc.clone());
    arc
}

// ---- reduction-table registry ----

struct Basis {
    m: u64,
    phi: usize,
    /// Rows x^k mod Φ_m. Dense variant holds k ∈ [0, m); the slim variant
    /// holds only k ∈ [phi, min(2·phi−1, m)) needed by product reduction,
    /// with other exponents computed on demand into `extra`.
    rows: RowStore,
    extra: RwLock<HashMap<u64, Arc<Vec<BigInt>>>>,
}

enum RowStore {
    /// rows[k] = x^k mod Φ_m for all k in [0, m).
    Dense(Vec<Vec<BigInt>>),
    /// rows[i] = x^(phi+i) mod Φ_m.
    Slim(Vec<Vec<BigInt>>),
}

static BASES: LazyLock<RwLock<HashMap<u64, Arc<Basis>>>> =
    LazyLock::new(|| RwLock::new(HashMap::new()));

fn basis(m: u64) -> Arc<Basis> {
    assert!(m >= 1, "conductor must be positive");
    assert!(
        m <= MAX_CONDUCTOR,
        "conductor {m} exceeds the supported maximum {MAX_CONDUCTOR}"
    );
    if let Some(b) = BASES.read().unwrap().get(&m) {
        return b.clone();
    }
    let mut w = BASES.write().unwrap();
    w.entry(m).or_insert_with(|| Arc::new(Basis::build(m))).clone()
}

impl Basis {
    fn build(m: u64) -> Basis {
        let modulus = cyclotomic_poly(m);
        let phi = modulus.len() - 1;
        // Iterate row(k+1) from row(k): multiply by x and reduce the
        // overflowing top coefficient against the monic modulus.
        let step = |row: &[BigInt]| -> Vec<BigInt> {
            let mut next = vec![BigInt::zero(); phi];
            let top = &row[phi - 1];
            if !top.is_zero() {
                for i in 0..phi {
                    next[i] = -(top * &modulus[i]);
                }
            }
            for i in 1..phi {
                next[i] += &row[i - 1];
            }
            next
        };
        let unit = |k: usize| {
            let mut v = vec![BigInt::zero(); phi];
            v[k] = BigInt::one();
            v
        };
        let rows = if m <= DENSE_ROWS_LIMIT {
            let mut rows: Vec<Vec<BigInt>> = Vec::with_capacity(m as usize);
            for k in 0..m as usize {
                if k < phi {
                    rows.push(unit(k));
                } else {
                    rows.push(step(&rows[k - 1]));
                }
            }
            // Wrap-around sanity check: x^m ≡ 1 validates Φ_m and the rows.
            let last = rows.last().unwrap();
            debug_assert_eq!(step(last), unit(0), "x^m != 1 mod Phi_{m}");
            RowStore::Dense(rows)
        } else {
            let hi = (2 * phi as u64 - 1).min(m) as usize;
            let mut rows: Vec<Vec<BigInt>> = Vec::with_capacity(hi.saturating_sub(phi));
            for k in phi..hi {
                let prev = if k == phi { unit(phi - 1) } else { rows[k - phi - 1].clone() };
                rows.push(step(&prev));
            }
            RowStore::Slim(rows)
        };
        Basis { m, phi, rows, extra: RwLock::new(HashMap::new()) }
    }

    /// Invokes `f(i, c)` for each nonzero coefficient c of x^k mod Φ_m.
    fn apply_row(&self, k: u64, mut f: impl FnMut(usize, &BigInt)) {
        let k = k % self.m;
        if (k as usize) < self.phi {
            f(k as usize, &BigInt::one());
            return;
        }
        match &self.rows {
            RowStore::Dense(rows) => {
                for (i, c) in rows[k as usize].iter().enumerate() {
                    if !c.is_zero() {
                        f(i, c);
                    }
                }
            }
            RowStore::Slim(rows) => {
                if (k as usize) < self.phi + rows.len() {
                    for (i, c) in rows[k as usize - self.phi].iter().enumerate() {
                        if !c.is_zero() {
                            f(i, c);
                        }
                    }
                } else {
                    let row = self.demand_row(k);
                    for (i, c) in row.iter().enumerate() {
                        if !c.is_zero() {
                            f(i, c);
                        }
                    }
                }
            }
        }
    }

    /// x^k mod Φ_m for a large exponent, by square-and-multiply, memoized.
    fn demand_row(&self, k: u64) -> Arc<Vec<BigInt>> {
        if let Some(r) = self.extra.read().unwrap().get(&k) {
            return r.clone();
        }
        let mut acc = vec![BigInt::zero(); self.phi];
        acc[0] = BigInt::one();
        let mut sq = vec![BigInt::zero(); self.phi];
        sq[1] = BigInt::one();
        let mut e = k;
        while e > 0 {
            if e & 1 == 1 {
                acc = self.reduce_product(&acc, &sq);
            }
            e >>= 1;
            if e > 0 {
                sq = self.reduce_product(&sq, &sq);
            }
        }
        let arc = Arc::new(acc);
        self.extra.write().unwrap().entry(k).or_insert_with(|| arc.clone());
        arc
    }

    /// Product of two coefficient vectors, reduced to the power basis.
    fn reduce_product(&self, a: &[BigInt], b: &[BigInt]) -> Vec<BigInt> {
        let conv = poly_mul(a, b);
        self.reduce_vec(conv)
    }

    /// Reduces a raw coefficient vector (degree possibly ≥ φ) to the basis.
    fn reduce_vec(&self, mut conv: Vec<BigInt>) -> Vec<BigInt> {
        if conv.len() <= self.phi {
            conv.resize(self.phi, BigInt::zero());
            return conv;
        }
        let mut out: Vec<BigInt> = conv[..self.phi].to_vec();
        for k in self.phi..conv.len() {
            let c = std::mem::take(&mut conv[k]);
            if c.is_zero() {
                continue;
            }
            self.apply_row(k as u64, |i, r| out[i] += &c * r);
        }
        out
    }
}

// ---- CycloNum ----

/// An element of ℚ(ζ_m): numerators over a common positive denominator on
/// the power basis mod Φ_m, fully reduced (content coprime to denominator).
#[derive(Clone)]
pub struct CycloNum {
    m: u64,
    num: Vec<BigInt>,
    den: BigInt,
}

impl CycloNum {
    fn raw(m: u64, num: Vec<BigInt>, den: BigInt) -> CycloNum {
        let mut v = CycloNum { m, num, den };
        v.normalize();
        v
    }

    fn normalize(&mut self) {
        debug_assert!(!self.den.is_zero());
        if self.den.is_negative() {
            self.den = -std::mem::take(&mut self.den);
            for c in &mut self.num {
                *c = -std::mem::take(c);
            }
        }
        let mut g = self.den.clone();
        for c in &self.num {
            if g.is_one() {
                break;
            }
            if !c.is_zero() {
                g = g.gcd(c);
            }
        }
        if self.num.iter().all(|c| c.is_zero()) {
            self.den = BigInt::one();
            return;
        }
        if !g.is_one() {
            self.den /= &g;
            for c in &mut self.num {
                *c /= &g;
            }
        }
    }

    /// The zero of ℚ (conductor 1).
    pub fn zero() -> CycloNum {
        CycloNum { m: 1, num: vec![BigInt::zero()], den: BigInt::one() }
    }

    /// The one of ℚ (conductor 1).
    pub fn one() -> CycloNum {
        CycloNum { m: 1, num: vec![BigInt::one()], den: BigInt::one() }
    }

    pub fn from_int(n: i64) -> CycloNum {
        CycloNum { m: 1, num: vec![BigInt::from(n)], den: BigInt::one() }
    }

    pub fn from_bigint(n: BigInt) -> CycloNum {
        CycloNum { m: 1, num: vec![n], den: BigInt::one() }
    }

    pub fn from_rational(r: &BigRational) -> CycloNum {
        CycloNum::raw(1, vec![r.numer().clone()], r.denom().clone())
    }

    /// The exact rational n/d (d ≠ 0).
    pub fn rational(n: i64, d: i64) -> CycloNum {
        assert!(d != 0);
        CycloNum::raw(1, vec![BigInt::from(n)], BigInt::from(d))
    }

    /// ζ_m^k, canonically reduced; k may be negative.
    pub fn root_of_unity(m: u64, k: i64) -> CycloNum {
        let b = basis(m);
        let k = k.rem_euclid(m as i64) as u64;
        let mut num = vec![BigInt::zero(); b.phi];
        b.apply_row(k, |i, c| num[i] += c);
        CycloNum { m, num, den: BigInt::one() }
    }

    pub fn conductor(&self) -> u64 {
        self.m
    }

    pub fn is_zero(&self) -> bool {
        self.num.iter().all(|c| c.is_zero())
    }

    pub fn is_one(&self) -> bool {
        self.den.is_one()
            && self.num[0].is_one()
            && self.num[1..].iter().all(|c| c.is_zero())
    }

    pub fn is_rational(&self) -> bool {
        self.num[1..].iter().all(|c| c.is_zero())
    }

    pub fn as_rational(&self) -> Option<BigRational> {
        self.is_rational()
            .then(|| BigRational::new(self.num[0].clone(), self.den.clone()))
    }

    /// Coefficients on the power basis as reduced rationals, length φ(m).
    pub fn coeffs(&self) -> Vec<BigRational> {
        self.num
            .iter()
            .map(|n| BigRational::new(n.clone(), self.den.clone()))
            .collect()
    }

    /// Rewrites the value in ℚ(ζ_target) where m | target. Exact, lossless.
    pub fn lift_to(&self, target: u64) -> Result<CycloNum, CycloError> {
        if target == self.m {
            return Ok(self.clone());
        }
        if target % self.m != 0 {
            return Err(CycloError::NotDivisor { d: self.m, m: target });
        }
        let b = basis(target);
        let t = target / self.m;
        let mut num = vec![BigInt::zero(); b.phi];
        for (j, c) in self.num.iter().enumerate() {
            if !c.is_zero() {
                b.apply_row(j as u64 * t, |i, r| num[i] += c * r);
            }
        }
        Ok(CycloNum::raw(target, num, self.den.clone()))
    }

    fn lift_pair(a: &CycloNum, b: &CycloNum) -> (CycloNum, CycloNum) {
        if a.m == b.m {
            return (a.clone(), b.clone());
        }
        let l = a.m.lcm(&b.m);
        (a.lift_to(l).unwrap(), b.lift_to(l).unwrap())
    }

    /// Multiplies by ζ_m^k at this value's own conductor (fast path used by
    /// summation loops; equivalent to `self * root_of_unity(m, k)`).
    pub fn mul_root(&self, k: i64) -> CycloNum {
        if self.is_zero() {
            return self.clone();
        }
        let b = basis(self.m);
        let k = k.rem_euclid(self.m as i64) as u64;
        let mut num = vec![BigInt::zero(); b.phi];
        for (j, c) in self.num.iter().enumerate() {
            if !c.is_zero() {
                b.apply_row(j as u64 + k, |i, r| num[i] += c * r);
            }
        }
        CycloNum::raw(self.m, num, self.den.clone())
    }

    /// Galois automorphism σ_c: ζ_m ↦ ζ_m^c, for gcd(c, m) = 1.
    pub fn galois_apply(&self, c: u64) -> Result<CycloNum, CycloError> {
        let c = c % self.m;
        if self.m.gcd(&c) != 1 {
            return Err(CycloError::NotCoprime { c, m: self.m });
        }
        let b = basis(self.m);
        let mut num = vec![BigInt::zero(); b.phi];
        for (j, x) in self.num.iter().enumerate() {
            if !x.is_zero() {
                b.apply_row(j as u64 * c % self.m, |i, r| num[i] += x * r);
            }
        }
        Ok(CycloNum::raw(self.m, num, self.den.clone()))
    }

    /// Complex conjugation σ_{−1}.
    pub fn conj(&self) -> CycloNum {
        if self.m <= 2 {
            return self.clone();
        }
        self.galois_apply(self.m - 1).unwrap()
    }

    /// True iff the value is fixed by every σ_c with c ≡ 1 (mod d), i.e.
    /// lies in ℚ(ζ_d). Requires d | m.
    pub fn lies_in_subfield(&self, d: u64) -> Result<bool, CycloError> {
        if d == 0 || self.m % d != 0 {
            return Err(CycloError::NotDivisor { d, m: self.m });
        }
        let mut c = 1 + d;
        while c < self.m {
            if self.m.gcd(&c) == 1 && self.galois_apply(c).unwrap() != *self {
                return Ok(false);
            }
            c += d;
        }
        Ok(true)
    }

    /// Rewrites the value exactly in ℚ(ζ_d) for d | m, or reports that it
    /// does not lie there. The result is verified by lifting back.
    pub fn lower_to(&self, d: u64) -> Result<CycloNum, CycloError> {
        if d == self.m {
            return Ok(self.clone());
        }
        if d == 0 || self.m % d != 0 {
            return Err(CycloError::NotDivisor { d, m: self.m });
        }
        let low = lowering(self.m, d);
        let phi_d = low.inv.len();
        let mut cand = vec![BigRational::zero(); phi_d];
        for (j, inv_row) in low.inv.iter().enumerate() {
            let mut acc = BigRational::zero();
            for (i, coef) in inv_row.iter().enumerate() {
                let v = &self.num[low.rows[i]];
                if !v.is_zero() && !coef.is_zero() {
                    acc += coef * BigRational::new(v.clone(), self.den.clone());
                }
            }
            cand[j] = acc;
        }
        let denom = cand.iter().fold(BigInt::one(), |a, r| a.lcm(r.denom()));
        let num: Vec<BigInt> =
            cand.iter().map(|r| r.numer() * (&denom / r.denom())).collect();
        let out = CycloNum::raw(d, num, denom);
        if out.lift_to(self.m).unwrap() == *self {
            Ok(out)
        } else {
            Err(CycloError::NotInSubfield { d })
        }
    }

    /// Multiplicative inverse via the norm trick: multiply all nontrivial
    /// Galois conjugates; the product with self is the rational norm.
    pub fn inv(&self) -> Result<CycloNum, CycloError> {
        if self.is_zero() {
            return Err(CycloError::DivisionByZero);
        }
        if let Some(r) = self.as_rational() {
            return Ok(CycloNum::from_rational(&r.recip()));
        }
        let mut prod = CycloNum::one();
        for c in 2..self.m {
            if self.m.gcd(&c) == 1 {
                prod = &prod * &self.galois_apply(c).unwrap();
            }
        }
        let norm = (self * &prod)
            .as_rational()
            .expect("product of all conjugates must be rational");
        debug_assert!(!norm.is_zero());
        Ok(prod.scale(&norm.recip()))
    }

    pub fn div(&self, other: &CycloNum) -> Result<CycloNum, CycloError> {
        Ok(self * &other.inv()?)
    }

    /// Integer power; negative exponents go through `inv`.
    pub fn pow(&self, e: i64) -> Result<CycloNum, CycloError> {
        let base = if e < 0 { self.inv()? } else { self.clone() };
        let mut e = e.unsigned_abs();
        let mut acc = CycloNum::one();
        let mut sq = base;
        while e > 0 {
            if e & 1 == 1 {
                acc = &acc * &sq;
            }
            e >>= 1;
            if e > 0 {
                sq = &sq * &sq;
            }
        }
        Ok(acc)
    }

    /// Multiplies by an exact rational scalar.
    pub fn scale(&self, r: &BigRational) -> CycloNum {
        let num = self.num.iter().map(|c| c * r.numer()).collect();
        CycloNum::raw(self.m, num, &self.den * r.denom())
    }

    pub fn scale_int(&self, n: i64) -> CycloNum {
        let k = BigInt::from(n);
        CycloNum::raw(self.m, self.num.iter().map(|c| c * &k).collect(), self.den.clone())
    }

    /// Approximate complex embedding ζ_m ↦ exp(2πi/m), for display only.
    pub fn approx(&self) -> (f64, f64) {
        let den = self.den.to_f64().unwrap_or(f64::NAN);
        let (mut re, mut im) = (0.0, 0.0);
        for (k, c) in self.num.iter().enumerate() {
            if c.is_zero() {
                continue;
            }
            let x = c.to_f64().unwrap_or(f64::NAN) / den;
            let ang = 2.0 * std::f64::consts::PI * k as f64 / self.m as f64;
            re += x * ang.cos();
            im += x * ang.sin();
        }
        (re, im)
    }

    /// Builds Σ coeff·ζ_m^exp from an exponent-indexed accumulation; used by
    /// the direct character-sum loops.
    pub(crate) fn from_root_accum(m: u64, counts: &[BigInt]) -> CycloNum {
        let b = basis(m);
        let mut num = vec![BigInt::zero(); b.phi];
        for (e, c) in counts.iter().enumerate() {
            if !c.is_zero() {
                b.apply_row(e as u64, |i, r| num[i] += c * r);
            }
        }
        CycloNum::raw(m, num, BigInt::one())
    }

    #[cfg(test)]
    fn invariants_ok(&self) -> bool {
        let b = basis(self.m);
        if self.num.len() != b.phi || self.den.is_negative() || self.den.is_zero() {
            return false;
        }
        if self.is_zero() {
            return self.den.is_one();
        }
        let mut g = self.den.clone();
        for c in &self.num {
            g = g.gcd(c);
        }
        g.is_one()
    }
}

// ---- lowering solver ----

/// Precomputed data mapping ℚ(ζ_m) coordinates to ℚ(ζ_d) coordinates:
/// `rows` indexes φ(d) linearly independent rows of the lift matrix and
/// `inv` is the inverse of that square submatrix.
struct Lowering {
    rows: Vec<usize>,
    inv: Vec<Vec<BigRational>>,
}

static LOWERINGS: LazyLock<RwLock<HashMap<(u64, u64), Arc<Lowering>>>> =
    LazyLock::new(|| RwLock::new(HashMap::new()));

fn lowering(m: u64, d: u64) -> Arc<Lowering> {
    if let Some(l) = LOWERINGS.read().unwrap().get(&(m, d)) {
        return l.clone();
    }
    let l = Arc::new(build_lowering(m, d));
    LOWERINGS
        .write()
        .unwrap()
        .entry((m, d))
        .or_insert_with(|| l.clone())
        .clone()
}

fn build_lowering(m: u64, d: u64) -> Lowering {
    let bm = basis(m);
    let phi_d = euler_phi(d) as usize;
    let t = m / d;
    // Lift matrix: column j is x^(j·t) mod Φ_m, the image of the j-th
    // ℚ(ζ_d) basis vector.
    let mut cols = vec![vec![BigRational::zero(); bm.phi]; phi_d];
    for (j, col) in cols.iter_mut().enumerate() {
        bm.apply_row(j as u64 * t, |i, c| col[i] = BigRational::from(c.clone()));
    }
    // Select pivot rows by incremental Gaussian elimination.
    let mut rows: Vec<usize> = Vec::with_capacity(phi_d);
    let mut mat: Vec<Vec<BigRational>> = Vec::new();
    for i in 0..bm.phi {
        if rows.len() == phi_d {
            break;
        }
        let cand: Vec<BigRational> = cols.iter().map(|c| c[i].clone()).collect();
        let mut probe = mat.clone();
        probe.push(cand.clone());
        if rank(&probe) == probe.len() {
            mat.push(cand);
            rows.push(i);
        }
    }
    assert_eq!(rows.len(), phi_d, "lift matrix must have full column rank");
    let inv = invert(&mat);
    Lowering { rows, inv }
}

fn rank(mat: &[Vec<BigRational>]) -> usize {
    let mut a: Vec<Vec<BigRational>> = mat.to_vec();
    let (r, c) = (a.len(), a.first().map_or(0, |x| x.len()));
    let mut rank = 0;
    for col in 0..c {
        if rank == r {
            break;
        }
        if let Some(p) = (rank..r).find(|&i| !a[i][col].is_zero()) {
            a.swap(rank, p);
            for i in rank + 1..r {
                if !a[i][col].is_zero() {
                    let f = &a[i][col] / &a[rank][col];
                    for j in col..c {
                        let s = &f * &a[rank][j];
                        a[i][j] -= s;
                    }
                }
            }
            rank += 1;
        }
    }
    rank
}

/// Gauss–Jordan inverse of a square nonsingular rational matrix.
fn invert(mat: &[Vec<BigRational>]) -> Vec<Vec<BigRational>> {
    let n = mat.len();
    let mut a = mat.to_vec();
    let mut inv: Vec<Vec<BigRational>> = (0..n)
        .map(|i| (0..n).map(|j| if i == j { BigRational::one() } else { BigRational::zero() }).collect())
        .collect();
    for col in 0..n {
        let p = (col..n).find(|&i| !a[i][col].is_zero()).expect("singular matrix");
        a.swap(col, p);
        inv.swap(col, p);
        let pivot = a[col][col].clone();
        for j in 0..n {
            a[col][j] /= &pivot;
            inv[col][j] /= &pivot;
        }
        for i in 0..n {
            if i != col && !a[i][col].is_zero() {
                let f = a[i][col].clone();
                for j in 0..n {
                    let s = &f * &a[col][j];
                    a[i][j] -= s;
                    let s = &f * &inv[col][j];
                    inv[i][j] -= s;
                }
            }
        }
    }
    inv
}

// ---- operators & equality ----

impl PartialEq for CycloNum {
    fn eq(&self, other: &CycloNum) -> bool {
        if self.m == other.m {
            return self.den == other.den && self.num == other.num;
        }
        let (a, b) = CycloNum::lift_pair(self, other);
        a.den == b.den && a.num == b.num
    }
}

impl Eq for CycloNum {}

impl std::ops::Add for &CycloNum {
    type Output = CycloNum;
    fn add(self, rhs: &CycloNum) -> CycloNum {
        if self.m == rhs.m {
            let num = self
                .num
                .iter()
                .zip(&rhs.num)
                .map(|(a, b)| a * &rhs.den + b * &self.den)
                .collect();
            return CycloNum::raw(self.m, num, &self.den * &rhs.den);
        }
        let (a, b) = CycloNum::lift_pair(self, rhs);
        &a + &b
    }
}

impl std::ops::Sub for &CycloNum {
    type Output = CycloNum;
    fn sub(self, rhs: &CycloNum) -> CycloNum {
        self + &(-rhs)
    }
}

impl std::ops::Neg for &CycloNum {
    type Output = CycloNum;
    fn neg(self) -> CycloNum {
        CycloNum {
            m: self.m,
            num: self.num.iter().map(|c| -c).collect(),
            den: self.den.clone(),
        }
    }
}

impl std::ops::Mul for &CycloNum {
    type Output = CycloNum;
    fn mul(self, rhs: &CycloNum) -> CycloNum {
        if self.is_zero() || rhs.is_zero() {
            return CycloNum::zero();
        }
        if self.m == rhs.m {
            let b = basis(self.m);
            let conv = poly_mul(&self.num, &rhs.num);
            let num = b.reduce_vec(conv);
            return CycloNum::raw(self.m, num, &self.den * &rhs.den);
        }
        if let Some(r) = self.as_rational() {
            return rhs.scale(&r);
        }
        if let Some(r) = rhs.as_rational() {
            return self.scale(&r);
        }
        let (a, b) = CycloNum::lift_pair(self, rhs);
        &a * &b
    }
}

macro_rules! forward_owned {
    ($trait:ident, $method:ident) => {
        impl std::ops::$trait for CycloNum {
            type Output = CycloNum;
            fn $method(self, rhs: CycloNum) -> CycloNum {
                std::ops::$trait::$method(&self, &rhs)
            }
        }
    };
}
forward_owned!(Add, add);
forward_owned!(Sub, sub);
forward_owned!(Mul, mul);

impl std::ops::Neg for CycloNum {
    type Output = CycloNum;
    fn neg(self) -> CycloNum {
        -&self
    }
}

impl fmt::Debug for CycloNum {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "CycloNum(m={}, {})", self.m, self)
    }
}

impl fmt::Display for CycloNum {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.is_zero() {
            return write!(f, "0");
        }
        let mut first = true;
        for (k, c) in self.num.iter().enumerate() {
            if c.is_zero() {
                continue;
            }
            let r = BigRational::new(c.clone(), self.den.clone());
            let mag = r.abs();
            let neg = r.is_negative();
            if first {
                if neg {
                    write!(f, "-")?;
                }
                first = false;
            } else if neg {
                write!(f, " - ")?;
            } else {
                write!(f, " + ")?;
            }
            if k == 0 {
                write!(f, "{mag}")?;
            } else {
                if !mag.is_one() {
                    write!(f, "{mag}*")?;
                }
                write!(f, "z{}", self.m)?;
                if k > 1 {
                    write!(f, "^{k}")?;
                }
            }
        }
        Ok(())
    }
}

// ---- serde ----

impl Serialize for CycloNum {
    fn serialize<S: Serializer>(&self, s: S) -> Result<S::Ok, S::Error> {
        use serde::ser::SerializeStruct;
        let mut st = s.serialize_struct("CycloNum", 2)?;
        st.serialize_field("m", &self.m)?;
        let coeffs: Vec<String> = self
            .num
            .iter()
            .map(|n| {
                let r = BigRational::new(n.clone(), self.den.clone());
                format!("{}/{}", r.numer(), r.denom())
            })
            .collect();
        st.serialize_field("coeffs", &coeffs)?;
        st.end()
    }
}

impl<'de> Deserialize<'de> for CycloNum {
    fn deserialize<D: Deserializer<'de>>(d: D) -> Result<CycloNum, D::Error> {
        #[derive(Deserialize)]
        struct Wire {
            m: u64,
            coeffs: Vec<String>,
        }
        let w = Wire::deserialize(d)?;
        if w.m == 0 || w.m > MAX_CONDUCTOR {
            return Err(D::Error::custom(format!("invalid conductor {}", w.m)));
        }
        let phi = euler_phi(w.m) as usize;
        if w.coeffs.len() != phi {
            return Err(D::Error::custom(format!(
                "expected {} coefficients for conductor {}, got {}",
                phi,
                w.m,
                w.coeffs.len()
            )));
        }
        let mut parsed = Vec::with_capacity(phi);
        for s in &w.coeffs {
            let r = BigRational::from_str(s)
                .map_err(|e| D::Error::custom(format!("bad coefficient {s:?}: {e}")))?;
            parsed.push(r);
        }
        let den = parsed.iter().fold(BigInt::one(), |a, r| a.lcm(r.denom()));
        let num = parsed.iter().map(|r| r.numer() * (&den / r.denom())).collect();
        Ok(CycloNum::raw(w.m, num, den))
    }
}
