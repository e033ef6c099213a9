//! Gauss sums, Jacobi sums, Pochhammer symbols, and their cached tables.
//!
//! [`SumTables`] fixes a field k and an additive character ψ, then
//! precomputes every Gauss sum g(χ_j) = −Σ_x ψ(x)χ_j(x) together with its
//! exact inverse, obtained from the reflection law g(χ)·g°(χ̄) = q·χ(−1)
//! rather than by generic field inversion. Everything downstream — the
//! variant g°(χ) = q^{δ(χ)}g(χ), the Pochhammer symbols (α)_ν = g(αν)/g(α)
//! and (α)°_ν = g°(αν)/g°(α) extended multiplicatively over parameter
//! multisets, Jacobi sums, and the hypergeometric coefficient rows — reads
//! those tables.
//!
//! Sums over k* live a priori in ℚ(ζ_{p(q−1)}) (conductor [`SumTables::m0`]).
//! The balanced ratio (α)_ν/(β)°_ν is invariant under the Galois group
//! fixing ℚ(ζ_{q−1}) and under changing ψ, so [`SumTables::pair_row`]
//! rewrites whole rows of them at conductor q−1; those small rows are what
//! the series evaluators iterate over.
//!
//! Also here, as exact two-sided checks: the Pochhammer chain and
//! reflection rules, the Davenport–Hasse multiplication formula with its
//! Pochhammer corollaries, and the Jacobi-sum bridge identities.

use std::collections::HashMap;
use std::sync::{Arc, RwLock};

use num_bigint::BigInt;
use num_rational::BigRational;
use thiserror::Error;

use crate::chars::{AddChar, MultChar, ParamSet};
use crate::cyclo::CycloNum;
use crate::gf::{FieldElem, FiniteField};

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum SumsError {
    #[error("{n} does not divide q-1 = {q1}")]
    NotDivisor { n: u64, q1: u64 },
}

/// Per-(field, ψ) tables of Gauss sums and derived quantities.
pub struct SumTables {
    field: Arc<FiniteField>,
    psi: AddChar,
    /// Conductor p(q−1): the cyclotomic field housing all raw sums.
    m0: u64,
    /// gauss[j] = g(χ_j), at conductor m0.
    gauss: Vec<CycloNum>,
    /// gauss_inv[j] = 1/g(χ_j), from the reflection law.
    gauss_inv: Vec<CycloNum>,
    /// log(−1), used for χ(−1) signs.
    minus_one_log: u64,
    /// Cached rows ν ↦ (χ_a)_ν/(χ_b)°_ν at conductor q−1.
    pair: RwLock<HashMap<(u64, u64), Arc<Vec<CycloNum>>>>,
}

impl SumTables {
    /// Tables for the canonical ψ with shift 1.
    pub fn new(field: Arc<FiniteField>) -> SumTables {
        let psi = AddChar::canonical(&field);
        SumTables::with_psi(field, psi)
    }

    /// Tables for ψ_a with an arbitrary nonzero shift.
    pub fn with_psi(field: Arc<FiniteField>, psi: AddChar) -> SumTables {
        assert_eq!(psi.p, field.p(), "additive character from another field");
        let q = field.q() as u64;
        let q1 = q - 1;
        let p = field.p() as u64;
        let m0 = p * q1;

        // g(χ_j) = −Σ_t ψ(g^t)·ζ_{q−1}^{jt}; with ζ_p = ζ_{m0}^{q−1} and
        // ζ_{q−1} = ζ_{m0}^p, each term is one ζ_{m0} power. Accumulate
        // exponent counts, reduce once per character.
        let units: Vec<FieldElem> = field.units().collect();
        let traces: Vec<u64> = units
            .iter()
            .map(|&u| field.trace(field.mul(psi.shift, u)) as u64)
            .collect();
        let mut gauss = Vec::with_capacity(q1 as usize);
        for j in 0..q1 {
            let mut counts = vec![BigInt::ZERO; m0 as usize];
            for (t, &tr) in traces.iter().enumerate() {
                let e = (q1 * tr + p * j * t as u64) % m0;
                counts[e as usize] -= 1;
            }
            gauss.push(CycloNum::from_root_accum(m0, &counts));
        }

        let minus_one_log = if p == 2 { 0 } else { q1 / 2 };
        // 1/g(χ) = g°(χ̄)·χ(−1)/q.
        let q_big = BigRational::from(BigInt::from(q));
        let mut gauss_inv = Vec::with_capacity(q1 as usize);
        for j in 0..q1 {
            let jb = (q1 - j) % q1;
            let mut v = gauss[jb as usize].scale(&q_big.recip());
            if jb == 0 {
                v = v.scale(&q_big);
            }
            let sign = j * minus_one_log % q1;
            if sign != 0 {
                v = -v;
            }
            gauss_inv.push(v);
        }

        SumTables {
            field,
            psi,
            m0,
            gauss,
            gauss_inv,
            minus_one_log,
            pair: RwLock::new(HashMap::new()),
        }
    }

    pub fn field(&self) -> &Arc<FiniteField> {
        &self.field
    }

    pub fn psi(&self) -> AddChar {
        self.psi
    }

    pub fn q(&self) -> u64 {
        self.field.q() as u64
    }

    /// Order of the character group, q−1.
    pub fn q1(&self) -> u64 {
        self.q() - 1
    }

    /// Conductor p(q−1) of the ambient cyclotomic field.
    pub fn m0(&self) -> u64 {
        self.m0
    }

    /// χ_j over this field.
    pub fn chi(&self, j: i64) -> MultChar {
        MultChar::new(self.q1(), j)
    }

    fn check(&self, chi: MultChar) -> u64 {
        assert_eq!(chi.order, self.q1(), "character from another field");
        chi.index
    }

    /// χ(−1) as ±1.
    pub fn sign_at_minus_one(&self, chi: MultChar) -> i64 {
        let j = self.check(chi);
        if j * self.minus_one_log % self.q1() == 0 {
            1
        } else {
            -1
        }
    }

    /// The Gauss sum g(χ).
    pub fn gauss(&self, chi: MultChar) -> &CycloNum {
        let j = self.check(chi);
        &self.gauss[j as usize]
    }

    /// The variant g°(χ) = q^{δ(χ)}·g(χ); g°(ε) = q.
    pub fn gauss0(&self, chi: MultChar) -> CycloNum {
        let j = self.check(chi);
        if j == 0 {
            self.gauss[0].scale_int(self.q() as i64)
        } else {
            self.gauss[j as usize].clone()
        }
    }

    /// Exact 1/g(χ), via the reflection law.
    pub fn gauss_inverse(&self, chi: MultChar) -> &CycloNum {
        let j = self.check(chi);
        &self.gauss_inv[j as usize]
    }

    /// Exact 1/g°(χ).
    pub fn gauss0_inverse(&self, chi: MultChar) -> CycloNum {
        let j = self.check(chi);
        if j == 0 {
            let q = BigRational::from(BigInt::from(self.q()));
            self.gauss_inv[0].scale(&q.recip())
        } else {
            self.gauss_inv[j as usize].clone()
        }
    }

    // Index-level kernels shared by the evaluators; indices already mod q−1.

    pub(crate) fn gauss_idx(&self, j: u64) -> &CycloNum {
        &self.gauss[j as usize]
    }

    pub(crate) fn gauss_inv_idx(&self, j: u64) -> &CycloNum {
        &self.gauss_inv[j as usize]
    }

    fn poch_idx(&self, a: u64, n: u64) -> CycloNum {
        let an = (a + n) % self.q1();
        self.gauss_idx(an) * self.gauss_inv_idx(a)
    }

    fn poch0_idx(&self, a: u64, n: u64) -> CycloNum {
        let an = (a + n) % self.q1();
        let v = self.poch_idx(a, n);
        match (an == 0, a == 0) {
            (true, false) => v.scale_int(self.q() as i64),
            (false, true) => v.scale(&BigRational::from(BigInt::from(self.q())).recip()),
            _ => v,
        }
    }

    /// (χ_a)_{χ_n} for single characters.
    pub fn pochhammer_char(&self, alpha: MultChar, nu: MultChar) -> CycloNum {
        let (a, n) = (self.check(alpha), self.check(nu));
        self.poch_idx(a, n)
    }

    /// (χ_a)°_{χ_n} for single characters.
    pub fn pochhammer0_char(&self, alpha: MultChar, nu: MultChar) -> CycloNum {
        let (a, n) = (self.check(alpha), self.check(nu));
        self.poch0_idx(a, n)
    }

    /// (𝛂)_ν = ∏ (α)_ν over the multiset.
    pub fn pochhammer(&self, set: &ParamSet, nu: MultChar) -> CycloNum {
        let n = self.check(nu);
        assert_eq!(set.order, self.q1(), "parameter set from another field");
        let mut acc = CycloNum::one();
        for (c, m) in set.iter() {
            let v = self.poch_idx(c.index, n);
            for _ in 0..m {
                acc = &acc * &v;
            }
        }
        acc
    }

    /// (𝛂)°_ν = ∏ (α)°_ν over the multiset.
    pub fn pochhammer0(&self, set: &ParamSet, nu: MultChar) -> CycloNum {
        let n = self.check(nu);
        assert_eq!(set.order, self.q1(), "parameter set from another field");
        let mut acc = CycloNum::one();
        for (c, m) in set.iter() {
            let v = self.poch0_idx(c.index, n);
            for _ in 0..m {
                acc = &acc * &v;
            }
        }
        acc
    }

    /// Row ν ↦ (χ_a)_ν / (χ_b)°_ν for all ν, at conductor q−1.
    ///
    /// The ratio is invariant under every σ_c with c ≡ 1 (mod q−1), so it
    /// lies in ℚ(ζ_{q−1}); rewriting it there keeps series loops small.
    pub fn pair_row(&self, a: u64, b: u64) -> Arc<Vec<CycloNum>> {
        let q1 = self.q1();
        let key = (a % q1, b % q1);
        if let Some(row) = self.pair.read().unwrap().get(&key) {
            return row.clone();
        }
        let (a, b) = key;
        let q = BigRational::from(BigInt::from(self.q()));
        let mut row = Vec::with_capacity(q1 as usize);
        for n in 0..q1 {
            let an = (a + n) % q1;
            let bn = (b + n) % q1;
            // (χ_a)_ν / (χ_b)°_ν = [g(aν)/g(a)] · [g°(b)/g°(bν)]
            let mut v = &(self.gauss_idx(an) * self.gauss_inv_idx(bn))
                * &(self.gauss_idx(b) * self.gauss_inv_idx(a));
            if b == 0 {
                v = v.scale(&q);
            }
            if bn == 0 {
                v = v.scale(&q.recip());
            }
            let lowered = v.lower_to(q1).unwrap_or_else(|_| {
                debug_assert!(false, "balanced ratio must lie at conductor q-1");
                v
            });
            row.push(lowered);
        }
        let arc = Arc::new(row);
        self.pair
            .write()
            .unwrap()
            .entry(key)
            .or_insert_with(|| arc.clone())
            .clone()
    }

    /// The two-variable Jacobi sum j(χ,χ′) = −Σ_{x+y=1} χ(x)χ′(y),
    /// by direct summation at conductor q−1.
    pub fn jacobi(&self, chi: MultChar, chi2: MultChar) -> CycloNum {
        let a = self.check(chi);
        let b = self.check(chi2);
        let q1 = self.q1();
        let k = &*self.field;
        let mut counts = vec![BigInt::ZERO; q1 as usize];
        for x in k.units() {
            let y = k.sub(k.one(), x);
            if y.code() == 0 {
                continue;
            }
            let e = (a * k.log(x).unwrap() + b * k.log(y).unwrap()) % q1;
            counts[e as usize] -= 1;
        }
        CycloNum::from_root_accum(q1, &counts)
    }

    /// The Gauss-sum expression for j(χ,χ′): g(χ)g(χ′)/g°(χχ′), with the
    /// rational correction −(1−q)²/q when both characters are trivial.
    pub fn jacobi_formula(&self, chi: MultChar, chi2: MultChar) -> CycloNum {
        let a = self.check(chi);
        let b = self.check(chi2);
        let q1 = self.q1();
        let ab = (a + b) % q1;
        let mut v = &(self.gauss_idx(a) * self.gauss_idx(b))
            * &self.gauss_inv_idx(ab);
        if ab == 0 {
            v = v.scale(&BigRational::from(BigInt::from(self.q())).recip());
        }
        if a == 0 && b == 0 {
            let q = BigRational::from(BigInt::from(self.q()));
            let one_m_q = BigRational::from(BigInt::from(1 - self.q() as i64));
            v = &v - &CycloNum::from_rational(&(&one_m_q * &one_m_q / q));
        }
        v
    }

    /// Both sides of the Jacobi–Pochhammer bridge
    /// j(αν, \overline{βν}) = (β)_{ᾱ}(α)_ν / ((ε)°_{ᾱ}(β)_ν) · ν(−1) + δ(βν)(1−q).
    pub fn jacobi_pochhammer_bridge(
        &self,
        alpha: MultChar,
        beta: MultChar,
        nu: MultChar,
    ) -> (CycloNum, CycloNum) {
        let a = self.check(alpha);
        let b = self.check(beta);
        let n = self.check(nu);
        let q1 = self.q1();
        let lhs = self.jacobi(self.chi((a + n) as i64), self.chi(-((b + n) as i64)));

        let abar = (q1 - a) % q1;
        // 1/(ε)°_{ᾱ} = g°(ε)/g°(ᾱ) = q / g°(ᾱ)
        let inv_eps0 = {
            let mut v = self.gauss_inv_idx(abar).scale_int(self.q() as i64);
            if abar == 0 {
                v = v.scale(&BigRational::from(BigInt::from(self.q())).recip());
            }
            v
        };
        // 1/(β)_ν = g(β)/g(βν)
        let bn = (b + n) % q1;
        let inv_poch_b = self.gauss_idx(b) * self.gauss_inv_idx(bn);
        let mut rhs = &(&self.poch_idx(b, abar) * &self.poch_idx(a, n))
            * &(&inv_eps0 * &inv_poch_b);
        rhs = rhs.scale_int(self.sign_at_minus_one(nu));
        if bn == 0 {
            rhs = &rhs + &CycloNum::from_int(1 - self.q() as i64);
        }
        (lhs, rhs)
    }

    /// Exact check of the reflection law g(χ)·g°(χ̄) = q·χ(−1).
    pub fn check_reflection(&self, chi: MultChar) -> bool {
        let lhs = self.gauss(chi) * &self.gauss0(chi.conj());
        let rhs = CycloNum::from_int(self.q() as i64 * self.sign_at_minus_one(chi));
        lhs == rhs
    }

    /// Exact check of both chain rules
    /// (α)_{βν} = (α)_β·(αβ)_ν and (α)°_{βν} = (α)°_β·(αβ)°_ν.
    pub fn check_pochhammer_chain(&self, alpha: MultChar, beta: MultChar, nu: MultChar) -> bool {
        let bn = beta.mul(nu);
        let ab = alpha.mul(beta);
        let plain = self.pochhammer_char(alpha, bn)
            == &self.pochhammer_char(alpha, beta) * &self.pochhammer_char(ab, nu);
        let ring = self.pochhammer0_char(alpha, bn)
            == &self.pochhammer0_char(alpha, beta) * &self.pochhammer0_char(ab, nu);
        plain && ring
    }

    /// Exact check of (α)_ν·(ᾱ)°_{ν̄} = ν(−1).
    pub fn check_pochhammer_reflection(&self, alpha: MultChar, nu: MultChar) -> bool {
        let lhs = &self.pochhammer_char(alpha, nu)
            * &self.pochhammer0_char(alpha.conj(), nu.conj());
        lhs == CycloNum::from_int(self.sign_at_minus_one(nu))
    }

    /// Exact check of the multiplication formula
    /// g(χⁿ) = χⁿ(n)·∏_{φⁿ=ε} g(χφ)/g(φ), for n | q−1.
    pub fn check_multiplication(&self, chi: MultChar, n: u64) -> Result<bool, SumsError> {
        let a = self.check(chi);
        let q1 = self.q1();
        if n == 0 || q1 % n != 0 {
            return Err(SumsError::NotDivisor { n, q1 });
        }
        let an = a * n % q1;
        let lhs = self.gauss_idx(an).clone();
        let mut rhs = self.char_at_int(an, n as i64);
        let step = q1 / n;
        for i in 0..n {
            let phi = i * step;
            let ap = (a + phi) % q1;
            rhs = &rhs * &(self.gauss_idx(ap) * self.gauss_inv_idx(phi));
        }
        Ok(lhs == rhs)
    }

    /// Exact check of both Pochhammer corollaries of the multiplication
    /// formula: (αⁿ)_{νⁿ} = νⁿ(n)·∏_{φⁿ=ε}(αφ)_ν and its g° twin.
    pub fn check_multiplication_pochhammer(
        &self,
        alpha: MultChar,
        nu: MultChar,
        n: u64,
    ) -> Result<bool, SumsError> {
        let a = self.check(alpha);
        let v = self.check(nu);
        let q1 = self.q1();
        if n == 0 || q1 % n != 0 {
            return Err(SumsError::NotDivisor { n, q1 });
        }
        let an = a * n % q1;
        let vn = v * n % q1;
        let scale = self.char_at_int(vn, n as i64);
        let step = q1 / n;
        let mut plain = scale.clone();
        let mut ring = scale;
        for i in 0..n {
            let ap = (a + i * step) % q1;
            plain = &plain * &self.poch_idx(ap, v);
            ring = &ring * &self.poch0_idx(ap, v);
        }
        Ok(self.poch_idx(an, vn) == plain && self.poch0_idx(an, vn) == ring)
    }

    /// χ_j evaluated at the image of the integer n in k.
    fn char_at_int(&self, j: u64, n: i64) -> CycloNum {
        let x = self.field.from_int(n);
        MultChar::new(self.q1(), j as i64).eval(&self.field, x)
    }
}
