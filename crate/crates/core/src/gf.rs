//! Finite fields GF(p^f) sized for exhaustive summation.
//!
//! A [`FiniteField`] owns dense exp/log/trace tables; a [`FieldElem`] is a
//! packed code Σ cᵢ·pⁱ over the polynomial basis, so 0 is representable
//! uniformly and all arithmetic is table- or digit-driven. Construction is
//! deterministic: with the modulus omitted, the lexicographically smallest
//! monic irreducible polynomial is chosen (coefficients compared from the
//! constant term up), and the generator is the smallest element code of
//! multiplicative order q−1, so character indices mean the same thing
//! across runs.
//!
//! Provided here:
//! - [`FiniteField::new`] / [`FiniteField::with_modulus`] /
//!   [`FiniteField::from_order`] construction,
//! - element arithmetic (`add`, `mul`, `inv`, `pow`, …), discrete
//!   [`FiniteField::log`], [`FiniteField::trace`], Frobenius,
//! - deterministic enumeration: [`FiniteField::elements`] yields 0 then the
//!   units in generator-power order,
//! - a serializable [`FieldDescriptor`].
//!
//! Fields are immutable once built and safe to share across threads.

use serde::{Deserialize, Serialize};
use thiserror::Error;

/// Upper bound on q: tables are dense, so construction refuses anything
/// larger than 2^16 elements.
pub const MAX_FIELD_SIZE: u64 = 1 << 16;

const LOG_ZERO: u32 = u32::MAX;

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum GfError {
    #[error("{0} is not prime")]
    NotPrime(u64),
    #[error("field order {q} exceeds the supported maximum {MAX_FIELD_SIZE}")]
    FieldTooLarge { q: u64 },
    #[error("invalid modulus: {0}")]
    InvalidModulus(String),
    #[error("modulus is reducible over GF({p})")]
    ReducibleModulus { p: u32 },
    #[error("{0} is not a prime power")]
    NotPrimePower(u64),
    #[error("no multiplicative generator found (internal invariant break)")]
    NoGenerator,
    #[error("discrete log of zero")]
    LogOfZero,
    #[error("division by zero")]
    DivisionByZero,
    #[error("element code {code} out of range for field of order {q}")]
    InvalidElement { code: u64, q: u32 },
}

/// An element of a specific [`FiniteField`], as a packed coefficient code.
/// All arithmetic goes through the owning field's methods.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(transparent)]
pub struct FieldElem(pub u32);

impl FieldElem {
    pub fn code(self) -> u32 {
        self.0
    }
}

/// JSON face of a field: enough to reconstruct it exactly.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct FieldDescriptor {
    pub p: u32,
    pub f: u32,
    pub q: u32,
    pub modulus: Vec<u32>,
    pub generator: u32,
}

/// GF(p^f) with exp/log/trace tables; the arena all sums run over.
#[derive(Debug)]
pub struct FiniteField {
    p: u32,
    f: u32,
    q: u32,
    /// Monic irreducible of degree f, low-degree-first, length f+1.
    modulus: Vec<u32>,
    generator: FieldElem,
    /// exp[i] = code of generator^i, length q−1.
    exp: Vec<u32>,
    /// log[code] = i with exp[i] = code; LOG_ZERO at 0.
    log: Vec<u32>,
    /// trace[code] = x + x^p + … + x^{p^{f−1}} ∈ GF(p).
    trace: Vec<u32>,
}

impl FiniteField {
    /// Builds GF(p^f) with the deterministic default modulus.
    pub fn new(p: u32, f: u32) -> Result<FiniteField, GfError> {
        Self::build(p, f, None)
    }

    /// Builds GF(p^f) over a caller-supplied monic irreducible modulus,
    /// given low-degree-first with length f+1.
    pub fn with_modulus(p: u32, f: u32, modulus: &[u32]) -> Result<FiniteField, GfError> {
        Self::build(p, f, Some(modulus))
    }

    /// Builds the field of order q = p^f from q alone.
    pub fn from_order(q: u64) -> Result<FiniteField, GfError> {
        if q < 2 {
            return Err(GfError::NotPrimePower(q));
        }
        if q > MAX_FIELD_SIZE {
            return Err(GfError::FieldTooLarge { q });
        }
        let mut p = 2u64;
        while p * p <= q {
            if q % p == 0 {
                let mut f = 0u32;
                let mut rest = q;
                while rest % p == 0 {
                    rest /= p;
                    f += 1;
                }
                if rest != 1 {
                    return Err(GfError::NotPrimePower(q));
                }
                return FiniteField::new(p as u32, f);
            }
            p += 1;
        }
        FiniteField::new(q as u32, 1)
    }

    fn build(p: u32, f: u32, modulus: Option<&[u32]>) -> Result<FiniteField, GfError> {
        if !is_prime(p as u64) {
            return Err(GfError::NotPrime(p as u64));
        }
        if f == 0 {
            return Err(GfError::InvalidModulus("extension degree must be >= 1".into()));
        }
        let mut q: u64 = 1;
        for _ in 0..f {
            q *= p as u64;
            if q > MAX_FIELD_SIZE {
                return Err(GfError::FieldTooLarge { q });
            }
        }
        let q = q as u32;

        let modulus = match modulus {
            Some(m) => {
                if m.len() != f as usize + 1 {
                    return Err(GfError::InvalidModulus(format!(
                        "expected {} coefficients for degree {f}, got {}",
                        f + 1,
                        m.len()
                    )));
                }
                if m[f as usize] != 1 {
                    return Err(GfError::InvalidModulus("modulus must be monic".into()));
                }
                if m.iter().any(|&c| c >= p) {
                    return Err(GfError::InvalidModulus(format!(
                        "coefficients must be reduced mod {p}"
                    )));
                }
                if !is_irreducible(m, p) {
                    return Err(GfError::ReducibleModulus { p });
                }
                m.to_vec()
            }
            None => default_modulus(p, f, q),
        };

        // Generator: smallest element code of multiplicative order q−1,
        // checked via q−1 divided by each prime factor.
        let factors: Vec<u64> = prime_factors((q - 1).max(1) as u64);
        let mut generator = None;
        'cand: for c in 1..q {
            if q > 2 && c == 1 {
                continue;
            }
            let e = decode(c, p, f);
            for &ell in &factors {
                let pw = poly_pow_mod(&e, (q as u64 - 1) / ell, &modulus, p);
                if is_one(&pw) {
                    continue 'cand;
                }
            }
            generator = Some(c);
            break;
        }
        let gen_code = generator.ok_or(GfError::NoGenerator)?;

        let gen_poly = decode(gen_code, p, f);
        let mut exp = Vec::with_capacity(q as usize - 1);
        let mut cur = decode(1, p, f);
        for _ in 0..q - 1 {
            exp.push(encode(&cur, p));
            cur = poly_mul_mod(&cur, &gen_poly, &modulus, p);
        }
        debug_assert!(is_one(&cur), "generator order must divide q-1");
        let mut log = vec![LOG_ZERO; q as usize];
        for (i, &code) in exp.iter().enumerate() {
            debug_assert_eq!(log[code as usize], LOG_ZERO, "generator order below q-1");
            log[code as usize] = i as u32;
        }

        let mut field = FiniteField {
            p,
            f,
            q,
            modulus,
            generator: FieldElem(gen_code),
            exp,
            log,
            trace: Vec::new(),
        };
        let mut trace = Vec::with_capacity(q as usize);
        for code in 0..q {
            let x = FieldElem(code);
            let mut acc = x;
            let mut sum = x;
            for _ in 1..f {
                acc = field.frobenius(acc);
                sum = field.add(sum, acc);
            }
            debug_assert!(sum.0 < p, "trace must land in the prime subfield");
            trace.push(sum.0);
        }
        field.trace = trace;
        Ok(field)
    }

    pub fn p(&self) -> u32 {
        self.p
    }

    pub fn f(&self) -> u32 {
        self.f
    }

    pub fn q(&self) -> u32 {
        self.q
    }

    pub fn modulus(&self) -> &[u32] {
        &self.modulus
    }

    pub fn generator(&self) -> FieldElem {
        self.generator
    }

    pub fn descriptor(&self) -> FieldDescriptor {
        FieldDescriptor {
            p: self.p,
            f: self.f,
            q: self.q,
            modulus: self.modulus.clone(),
            generator: self.generator.0,
        }
    }

    pub fn zero(&self) -> FieldElem {
        FieldElem(0)
    }

    pub fn one(&self) -> FieldElem {
        FieldElem(1)
    }

    /// Validates a raw code into an element of this field.
    pub fn elem(&self, code: u64) -> Result<FieldElem, GfError> {
        if code < self.q as u64 {
            Ok(FieldElem(code as u32))
        } else {
            Err(GfError::InvalidElement { code, q: self.q })
        }
    }

    /// The image of the integer n under ℤ → GF(p) ⊆ GF(q).
    pub fn from_int(&self, n: i64) -> FieldElem {
        FieldElem(n.rem_euclid(self.p as i64) as u32)
    }

    /// Coefficients of x on the polynomial basis, low degree first, length f.
    pub fn coeffs(&self, x: FieldElem) -> Vec<u32> {
        decode(x.0, self.p, self.f)
    }

    pub fn add(&self, a: FieldElem, b: FieldElem) -> FieldElem {
        if self.p == 2 {
            return FieldElem(a.0 ^ b.0);
        }
        let (mut a, mut b) = (a.0, b.0);
        let mut out = 0;
        let mut place = 1;
        for _ in 0..self.f {
            out += (a % self.p + b % self.p) % self.p * place;
            place *= self.p;
            a /= self.p;
            b /= self.p;
        }
        FieldElem(out)
    }

    pub fn neg(&self, a: FieldElem) -> FieldElem {
        if self.p == 2 {
            return a;
        }
        let mut a = a.0;
        let mut out = 0;
        let mut place = 1;
        for _ in 0..self.f {
            out += (self.p - a % self.p) % self.p * place;
            place *= self.p;
            a /= self.p;
        }
        FieldElem(out)
    }

    pub fn sub(&self, a: FieldElem, b: FieldElem) -> FieldElem {
        self.add(a, self.neg(b))
    }

    pub fn mul(&self, a: FieldElem, b: FieldElem) -> FieldElem {
        if a.0 == 0 || b.0 == 0 {
            return FieldElem(0);
        }
        let i = self.log[a.0 as usize] as u64 + self.log[b.0 as usize] as u64;
        FieldElem(self.exp[(i % (self.q as u64 - 1)) as usize])
    }

    pub fn inv(&self, a: FieldElem) -> Result<FieldElem, GfError> {
        if a.0 == 0 {
            return Err(GfError::DivisionByZero);
        }
        let i = self.log[a.0 as usize] as u64;
        Ok(FieldElem(self.exp[((self.q as u64 - 1 - i) % (self.q as u64 - 1)) as usize]))
    }

    pub fn div(&self, a: FieldElem, b: FieldElem) -> Result<FieldElem, GfError> {
        Ok(self.mul(a, self.inv(b)?))
    }

    /// a^e with 0^0 = 1; negative exponents invert first.
    pub fn pow(&self, a: FieldElem, e: i64) -> Result<FieldElem, GfError> {
        if a.0 == 0 {
            return match e {
                0 => Ok(self.one()),
                _ if e > 0 => Ok(self.zero()),
                _ => Err(GfError::DivisionByZero),
            };
        }
        let i = self.log[a.0 as usize] as i64;
        let j = (i as i128 * e as i128).rem_euclid(self.q as i128 - 1) as usize;
        Ok(FieldElem(self.exp[j]))
    }

    /// Discrete log base the fixed generator.
    pub fn log(&self, a: FieldElem) -> Result<u64, GfError> {
        if a.0 == 0 {
            return Err(GfError::LogOfZero);
        }
        Ok(self.log[a.0 as usize] as u64)
    }

    /// generator^i, with i reduced mod q−1.
    pub fn exp(&self, i: i64) -> FieldElem {
        FieldElem(self.exp[i.rem_euclid(self.q as i64 - 1) as usize])
    }

    /// x ↦ x^p, the field's arithmetic Frobenius.
    pub fn frobenius(&self, a: FieldElem) -> FieldElem {
        if a.0 == 0 {
            return a;
        }
        let i = self.log[a.0 as usize] as u64 * self.p as u64;
        FieldElem(self.exp[(i % (self.q as u64 - 1)) as usize])
    }

    /// Absolute trace to GF(p), returned as the prime-field value.
    pub fn trace(&self, a: FieldElem) -> u32 {
        self.trace[a.0 as usize]
    }

    /// All q elements: zero first, then units in generator-power order.
    pub fn elements(&self) -> impl Iterator<Item = FieldElem> + '_ {
        std::iter::once(FieldElem(0)).chain(self.units())
    }

    /// The q−1 units in generator-power order (1, g, g², …).
    pub fn units(&self) -> impl Iterator<Item = FieldElem> + '_ {
        self.exp.iter().map(|&c| FieldElem(c))
    }
}

// ---- prime / polynomial helpers over GF(p) ----

fn is_prime(n: u64) -> bool {
    if n < 2 {
        return false;
    }
    let mut d = 2;
    while d * d <= n {
        if n % d == 0 {
            return false;
        }
        d += 1;
    }
    true
}

fn prime_factors(mut n: u64) -> Vec<u64> {
    let mut out = Vec::new();
    let mut d = 2;
    while d * d <= n {
        if n % d == 0 {
            out.push(d);
            while n % d == 0 {
                n /= d;
            }
        }
        d += 1;
    }
    if n > 1 {
        out.push(n);
    }
    out
}

/// Packs coefficients (low degree first) into the element code Σ cᵢ·pⁱ.
fn encode(coeffs: &[u32], p: u32) -> u32 {
    coeffs.iter().rev().fold(0, |acc, &c| acc * p + c)
}

fn decode(code: u32, p: u32, f: u32) -> Vec<u32> {
    let mut v = Vec::with_capacity(f as usize);
    let mut c = code;
    for _ in 0..f {
        v.push(c % p);
        c /= p;
    }
    v
}

fn is_one(a: &[u32]) -> bool {
    a.first() == Some(&1) && a[1..].iter().all(|&c| c == 0)
}

/// Product of two degree-<f coefficient vectors, reduced mod the monic
/// modulus, coefficients mod p.
fn poly_mul_mod(a: &[u32], b: &[u32], modulus: &[u32], p: u32) -> Vec<u32> {
    let f = modulus.len() - 1;
    let mut prod = vec![0u64; 2 * f.max(1) - 1];
    for (i, &x) in a.iter().enumerate() {
        if x == 0 {
            continue;
        }
        for (j, &y) in b.iter().enumerate() {
            if y != 0 {
                prod[i + j] += x as u64 * y as u64;
            }
        }
    }
    for c in &mut prod {
        *c %= p as u64;
    }
    // Reduce top coefficients against the monic modulus.
    for k in (f..prod.len()).rev() {
        let c = prod[k];
        if c == 0 {
            continue;
        }
        prod[k] = 0;
        for (i, &m) in modulus.iter().enumerate().take(f) {
            if m != 0 {
                let idx = k - f + i;
                let cur = prod[idx];
                prod[idx] = (cur + (p as u64 - m as u64) * c) % p as u64;
            }
        }
    }
    prod.truncate(f);
    prod.iter().map(|&c| c as u32).collect()
}

fn poly_pow_mod(a: &[u32], mut e: u64, modulus: &[u32], p: u32) -> Vec<u32> {
    let f = modulus.len() - 1;
    let mut acc = vec![0u32; f.max(1)];
    acc[0] = 1;
    let mut sq = a.to_vec();
    sq.resize(f.max(1), 0);
    while e > 0 {
        if e & 1 == 1 {
            acc = poly_mul_mod(&acc, &sq, modulus, p);
        }
        e >>= 1;
        if e > 0 {
            sq = poly_mul_mod(&sq, &sq, modulus, p);
        }
    }
    acc
}

/// Monic irreducibility over GF(p): x^{p^f} ≡ x (mod m) and, for each prime
/// ℓ | f, gcd(x^{p^{f/ℓ}} − x, m) = 1.
fn is_irreducible(modulus: &[u32], p: u32) -> bool {
    let f = (modulus.len() - 1) as u64;
    if f == 0 {
        return false;
    }
    if f == 1 {
        return true;
    }
    let x: Vec<u32> = {
        let mut v = vec![0u32; f as usize];
        v[1] = 1;
        v
    };
    let xq = frob_power(&x, f, modulus, p);
    if xq != x {
        return false;
    }
    for ell in prime_factors(f) {
        let xd = frob_power(&x, f / ell, modulus, p);
        let diff = poly_sub(&xd, &x, p);
        if poly_gcd_degree(&diff, modulus, p) != 0 {
            return false;
        }
    }
    true
}

/// x ↦ x^{p^k} mod modulus, by k successive p-th powers.
fn frob_power(a: &[u32], k: u64, modulus: &[u32], p: u32) -> Vec<u32> {
    let mut cur = a.to_vec();
    for _ in 0..k {
        cur = poly_pow_mod(&cur, p as u64, modulus, p);
    }
    cur
}

fn poly_sub(a: &[u32], b: &[u32], p: u32) -> Vec<u32> {
    let n = a.len().max(b.len());
    (0..n)
        .map(|i| {
            let x = a.get(i).copied().unwrap_or(0);
            let y = b.get(i).copied().unwrap_or(0);
            (x + p - y) % p
        })
        .collect()
}

fn poly_deg(a: &[u32]) -> Option<usize> {
    a.iter().rposition(|&c| c != 0)
}

/// Degree of gcd(a, m) over GF(p); 0 means coprime.
fn poly_gcd_degree(a: &[u32], m: &[u32], p: u32) -> usize {
    let mut x = m.to_vec();
    let mut y = a.to_vec();
    loop {
        let Some(dy) = poly_deg(&y) else {
            return poly_deg(&x).unwrap_or(0);
        };
        // x mod y, with y scaled monic via a modular inverse of its lead.
        let lead_inv = mod_inv(y[dy], p);
        loop {
            let Some(dx) = poly_deg(&x) else { break };
            if dx < dy {
                break;
            }
            let factor = x[dx] as u64 * lead_inv as u64 % p as u64;
            for i in 0..=dy {
                if y[i] != 0 {
                    let sub = factor * y[i] as u64 % p as u64;
                    let idx = dx - dy + i;
                    x[idx] = ((x[idx] as u64 + p as u64 - sub) % p as u64) as u32;
                }
            }
        }
        std::mem::swap(&mut x, &mut y);
    }
}

fn mod_inv(a: u32, p: u32) -> u32 {
    // Fermat: a^(p-2) mod p.
    let mut acc: u64 = 1;
    let mut base = a as u64 % p as u64;
    let mut e = p as u64 - 2;
    while e > 0 {
        if e & 1 == 1 {
            acc = acc * base % p as u64;
        }
        base = base * base % p as u64;
        e >>= 1;
    }
    acc as u32
}

/// Smallest monic irreducible of degree f over GF(p), coefficients compared
/// from the constant term up (c₀ is the most significant digit of the
/// enumeration key).
fn default_modulus(p: u32, f: u32, _q: u32) -> Vec<u32> {
    if f == 1 {
        return vec![0, 1];
    }
    let count = (p as u64).pow(f);
    for key in 0..count {
        let mut m = vec![0u32; f as usize + 1];
        m[f as usize] = 1;
        let mut k = key;
        for i in (0..f as usize).rev() {
            m[i] = (k % p as u64) as u32;
            k /= p as u64;
        }
        if is_irreducible(&m, p) {
            return m;
        }
    }
    unreachable!("irreducible polynomials exist in every degree");
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn prime_field_basics() {
        let k = FiniteField::new(5, 1).unwrap();
        assert_eq!((k.p(), k.f(), k.q()), (5, 1, 5));
        assert_eq!(k.modulus(), &[0, 1]);
        assert_eq!(k.generator(), FieldElem(2));
        assert_eq!(k.exp, vec![1, 2, 4, 3]);
        assert_eq!(k.log(FieldElem(4)).unwrap(), 2);
        assert_eq!(k.log(FieldElem(1)).unwrap(), 0);
        assert_eq!(k.log(k.generator()).unwrap(), 1);
        assert_eq!(k.log(FieldElem(0)), Err(GfError::LogOfZero));
    }

    #[test]
    fn known_generators_and_exp_tables() {
        let k7 = FiniteField::new(7, 1).unwrap();
        assert_eq!(k7.generator(), FieldElem(3));
        assert_eq!(k7.exp, vec![1, 3, 2, 6, 4, 5]);
        let k13 = FiniteField::new(13, 1).unwrap();
        assert_eq!(k13.generator(), FieldElem(2));
        assert_eq!(k13.exp, vec![1, 2, 4, 8, 3, 6, 12, 11, 9, 5, 10, 7]);
        let k3 = FiniteField::new(3, 1).unwrap();
        assert_eq!(k3.exp, vec![1, 2]);
        assert_eq!(k3.trace, vec![0, 1, 2]);
    }

    #[test]
    fn gf4_structure() {
        let k = FiniteField::new(2, 2).unwrap();
        assert_eq!(k.modulus(), &[1, 1, 1]);
        assert_eq!(k.generator(), FieldElem(2));
        assert_eq!(k.exp, vec![1, 2, 3]);
        assert_eq!(k.trace, vec![0, 0, 1, 1]);
        for u in k.units() {
            assert_eq!(k.pow(u, 3).unwrap(), k.one());
        }
    }

    #[test]
    fn gf8_structure() {
        let k = FiniteField::new(2, 3).unwrap();
        assert_eq!(k.modulus(), &[1, 0, 1, 1]);
        assert_eq!(k.generator(), FieldElem(2));
        assert_eq!(k.exp, vec![1, 2, 4, 5, 7, 3, 6]);
        assert_eq!(k.trace, vec![0, 1, 1, 0, 1, 0, 0, 1]);
    }

    #[test]
    fn gf9_structure() {
        let k = FiniteField::new(3, 2).unwrap();
        assert_eq!(k.modulus(), &[1, 0, 1]);
        assert_eq!(k.generator(), FieldElem(4));
        assert_eq!(k.exp, vec![1, 4, 6, 7, 2, 8, 3, 5]);
        assert_eq!(k.trace, vec![0, 2, 1, 0, 2, 1, 0, 2, 1]);
        // trace(1) = f mod p
        assert_eq!(k.trace(k.one()), 2);
    }

    #[test]
    fn larger_extensions() {
        let k16 = FiniteField::new(2, 4).unwrap();
        assert_eq!(k16.modulus(), &[1, 0, 0, 1, 1]);
        assert_eq!(k16.generator(), FieldElem(2));
        let k25 = FiniteField::new(5, 2).unwrap();
        assert_eq!(k25.modulus(), &[1, 1, 1]);
        assert_eq!(k25.generator(), FieldElem(7));
        assert_eq!(&k25.exp[..12], &[1, 7, 18, 8, 20, 21, 3, 16, 24, 19, 10, 13]);
        let k27 = FiniteField::new(3, 3).unwrap();
        assert_eq!(k27.modulus(), &[1, 0, 2, 1]);
        assert_eq!(k27.generator(), FieldElem(3));
    }

    #[test]
    fn construction_is_deterministic() {
        let a = FiniteField::new(3, 2).unwrap();
        let b = FiniteField::new(3, 2).unwrap();
        assert_eq!(a.exp, b.exp);
        assert_eq!(a.log, b.log);
        assert_eq!(a.trace, b.trace);
        assert_eq!(a.descriptor(), b.descriptor());
    }

    #[test]
    fn explicit_modulus() {
        let k = FiniteField::with_modulus(2, 2, &[1, 1, 1]).unwrap();
        assert_eq!(k.q(), 4);
        assert_eq!(
            FiniteField::with_modulus(2, 2, &[1, 0, 1]).unwrap_err(),
            GfError::ReducibleModulus { p: 2 }
        );
        assert!(matches!(
            FiniteField::with_modulus(2, 2, &[1, 1, 0]),
            Err(GfError::InvalidModulus(_))
        ));
        assert!(matches!(
            FiniteField::with_modulus(3, 2, &[3, 0, 1]),
            Err(GfError::InvalidModulus(_))
        ));
        // A non-default irreducible gives a valid field with the same order.
        let alt = FiniteField::with_modulus(2, 3, &[1, 1, 0, 1]).unwrap();
        assert_eq!(alt.q(), 8);
        for u in alt.units() {
            assert_eq!(alt.pow(u, 7).unwrap(), alt.one());
        }
    }

    #[test]
    fn constructor_errors() {
        assert_eq!(FiniteField::new(4, 1).unwrap_err(), GfError::NotPrime(4));
        assert_eq!(
            FiniteField::new(2, 17).unwrap_err(),
            GfError::FieldTooLarge { q: 1 << 17 }
        );
        assert_eq!(
            FiniteField::from_order(12).unwrap_err(),
            GfError::NotPrimePower(12)
        );
        assert_eq!(
            FiniteField::from_order(1).unwrap_err(),
            GfError::NotPrimePower(1)
        );
        let k49 = FiniteField::from_order(49).unwrap();
        assert_eq!((k49.p(), k49.f()), (7, 2));
        let k2 = FiniteField::from_order(2).unwrap();
        assert_eq!(k2.generator(), FieldElem(1));
        assert_eq!(k2.exp, vec![1]);
    }

    #[test]
    fn enumeration_order() {
        let k3 = FiniteField::new(3, 1).unwrap();
        let elems: Vec<u32> = k3.elements().map(|e| e.code()).collect();
        assert_eq!(elems, vec![0, 1, 2]);
        let k7 = FiniteField::new(7, 1).unwrap();
        let units: Vec<u32> = k7.units().map(|e| e.code()).collect();
        assert_eq!(units, vec![1, 3, 2, 6, 4, 5]);
        let k4 = FiniteField::new(2, 2).unwrap();
        assert_eq!(k4.elements().count(), 4);
        assert_eq!(k4.units().count(), 3);
    }

    #[test]
    fn arithmetic_laws_exhaustive() {
        for (p, f) in [(2, 3), (3, 2), (7, 1)] {
            let k = FiniteField::new(p, f).unwrap();
            let all: Vec<FieldElem> = k.elements().collect();
            for &a in &all {
                assert_eq!(k.add(a, k.neg(a)), k.zero());
                assert_eq!(k.mul(a, k.one()), a);
                // Frobenius fixes the prime subfield.
                if a.code() < p {
                    assert_eq!(k.frobenius(a), a);
                }
                if a != k.zero() {
                    assert_eq!(k.mul(a, k.inv(a).unwrap()), k.one());
                }
                for &b in &all {
                    assert_eq!(k.add(a, b), k.add(b, a));
                    assert_eq!(k.sub(k.add(a, b), b), a);
                    if a.code() != 0 && b.code() != 0 {
                        let lhs = k.log(k.mul(a, b)).unwrap();
                        let rhs = (k.log(a).unwrap() + k.log(b).unwrap()) % (k.q() as u64 - 1);
                        assert_eq!(lhs, rhs);
                    }
                    for &c in &all {
                        if c.code() % 11 == a.code() % 11 {
                            assert_eq!(
                                k.mul(k.add(a, b), c),
                                k.add(k.mul(a, c), k.mul(b, c))
                            );
                        }
                    }
                }
            }
        }
    }

    #[test]
    fn trace_is_additive_and_surjective() {
        for (p, f) in [(2, 2), (2, 3), (3, 2), (5, 2)] {
            let k = FiniteField::new(p, f).unwrap();
            let all: Vec<FieldElem> = k.elements().collect();
            let mut hit = vec![false; p as usize];
            for &a in &all {
                hit[k.trace(a) as usize] = true;
                for &b in &all {
                    assert_eq!(
                        k.trace(k.add(a, b)),
                        (k.trace(a) + k.trace(b)) % p
                    );
                }
            }
            assert!(hit.iter().all(|&h| h), "trace misses a prime-field value");
        }
    }

    #[test]
    fn pow_edge_cases() {
        let k = FiniteField::new(7, 1).unwrap();
        assert_eq!(k.pow(k.zero(), 0).unwrap(), k.one());
        assert_eq!(k.pow(k.zero(), 5).unwrap(), k.zero());
        assert_eq!(k.pow(k.zero(), -1), Err(GfError::DivisionByZero));
        assert_eq!(k.pow(k.generator(), -1).unwrap(), k.inv(k.generator()).unwrap());
        assert_eq!(k.pow(k.generator(), 6).unwrap(), k.one());
        assert_eq!(k.inv(k.zero()), Err(GfError::DivisionByZero));
        assert_eq!(k.elem(9), Err(GfError::InvalidElement { code: 9, q: 7 }));
        assert_eq!(k.from_int(-3), FieldElem(4));
    }

    #[test]
    fn descriptor_serializes() {
        let k = FiniteField::new(3, 2).unwrap();
        let js = serde_json::to_string(&k.descriptor()).unwrap();
        let back: FieldDescriptor = serde_json::from_str(&js).unwrap();
        assert_eq!(back, k.descriptor());
        assert!(js.contains("\"modulus\":[1,0,1]"));
    }
}
