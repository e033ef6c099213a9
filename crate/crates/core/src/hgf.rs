//! Hypergeometric series over finite fields.
//!
//! The central object is F(α,β;λ) = (1/(1−q)) Σ_ν (α)_ν/(β)°_ν ν(λ), a sum
//! over all multiplicative characters ν with exact cyclotomic coefficients.
//! This module provides:
//!
//! - [`HgfSpec`]: a numerator/denominator parameter pair (α; β),
//! - [`HgfEvaluator`]: a precomputed coefficient table for one spec,
//! - [`hgf_eval`] / [`rfs_eval`]: one-shot evaluation, plain F and ₍r₎F₍s₎,
//! - [`AppellKernel`] / [`appell_f4`]: the two-variable Appell F₄ double sum,
//! - [`euler_gauss_2f1_at_1`], [`kummer_2f1_at_minus1`], [`dixon_3f2_at_1`]:
//!   closed-form summation values,
//! - [`pfaff_transform_check`]: the ₂F₁ argument transformation x ↦ x/(x−1),
//! - [`fourier`] / [`fourier_inverse`]: exact Fourier transforms on k* and
//!   (k*)², used to cross-check product formulas.

use std::sync::Arc;

use num_bigint::BigInt;
use num_rational::BigRational;
use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::chars::{MultChar, ParamSet};
use crate::cyclo::CycloNum;
use crate::gf::{FieldElem, FiniteField};
use crate::sums::SumTables;

/// Errors from hypergeometric evaluators.
#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum HgfError {
    /// The formula requires odd characteristic.
    #[error("formula requires odd characteristic, field has p = 2")]
    EvenCharacteristic,
    /// A stated hypothesis fails for these parameters.
    #[error("hypothesis violated: {0}")]
    HypothesisViolated(String),
    /// The transformation is undefined at x = 1.
    #[error("transformation undefined at x = 1")]
    XEqualsOne,
    /// Numerator and denominator parameters live over different groups.
    #[error("parameter sets over groups of different order: {left} vs {right}")]
    OrderMismatch {
        /// Numerator group order.
        left: u64,
        /// Denominator group order.
        right: u64,
    },
}

/// A hypergeometric parameter pair (α; β) over one character group.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct HgfSpec {
    /// Numerator parameter multiset α.
    pub num: ParamSet,
    /// Denominator parameter multiset β.
    pub den: ParamSet,
}

impl HgfSpec {
    /// Pairs a numerator and denominator multiset over the same group.
    pub fn new(num: ParamSet, den: ParamSet) -> Result<HgfSpec, HgfError> {
        if num.order != den.order {
            return Err(HgfError::OrderMismatch {
                left: num.order,
                right: den.order,
            });
        }
        Ok(HgfSpec { num, den })
    }

    /// The ₍r₎F₍s₎ form: ε is adjoined to the denominator parameters.
    pub fn rfs(order: u64, num: &[i64], den: &[i64]) -> HgfSpec {
        let num = ParamSet::from_indices(order, num);
        let mut den = ParamSet::from_indices(order, den);
        den.insert(MultChar::trivial(order));
        HgfSpec { num, den }
    }

    /// Order q−1 of the character group both multisets live in.
    pub fn order(&self) -> u64 {
        self.num.order
    }

    /// True when deg α = deg β, so values land in ℚ(ζ_{q−1}).
    pub fn is_balanced(&self) -> bool {
        self.num.degree() == self.den.degree()
    }
}

/// g°(χ_j) from the cached Gauss table.
fn g0_idx(t: &SumTables, j: u64) -> CycloNum {
    if j == 0 {
        t.gauss_idx(0).scale_int(t.q() as i64)
    } else {
        t.gauss_idx(j).clone()
    }
}

/// 1/g°(χ_j) from the cached Gauss table.
fn g0_inv_idx(t: &SumTables, j: u64) -> CycloNum {
    if j == 0 {
        let r = BigRational::new(BigInt::from(1), BigInt::from(t.q()));
        t.gauss_inv_idx(0).scale(&r)
    } else {
        t.gauss_inv_idx(j).clone()
    }
}

/// v·ζ_{q1}^k, rotating within the basis when the conductor allows it.
fn mul_zeta(v: &CycloNum, q1: u64, k: i64) -> CycloNum {
    let k = k.rem_euclid(q1 as i64);
    let m = v.conductor();
    if m % q1 == 0 {
        v.mul_root(k * (m / q1) as i64)
    } else {
        v * &CycloNum::root_of_unity(q1, k)
    }
}

/// Precomputed coefficient table n ↦ (α)_{χ_n}/(β)°_{χ_n} · 1/(1−q) for one spec.
pub struct HgfEvaluator {
    field: Arc<FiniteField>,
    q1: u64,
    coeffs: Vec<CycloNum>,
}

impl HgfEvaluator {
    /// Builds the coefficient table from the cached Gauss sums.
    ///
    /// Numerator/denominator characters are consumed in matched pairs through
    /// the ψ-independent ratio rows, so balanced specs stay at conductor q−1;
    /// unmatched leftovers contribute individual Gauss-sum factors.
    pub fn new(tables: &SumTables, spec: &HgfSpec) -> HgfEvaluator {
        let q1 = tables.q1();
        assert_eq!(spec.order(), q1, "spec and tables must share a field");
        let mut num: Vec<u64> = spec.num.expanded().iter().map(|c| c.index).collect();
        let mut den: Vec<u64> = spec.den.expanded().iter().map(|c| c.index).collect();
        let mut coeffs = vec![CycloNum::one(); q1 as usize];
        while let (Some(&a), Some(&b)) = (num.last(), den.last()) {
            num.pop();
            den.pop();
            let row = tables.pair_row(a, b);
            for (c, r) in coeffs.iter_mut().zip(row.iter()) {
                *c = &*c * r;
            }
        }
        for a in num {
            let inv_a = tables.gauss_inv_idx(a).clone();
            for (n, c) in coeffs.iter_mut().enumerate() {
                let j = (a + n as u64) % q1;
                *c = &(&*c * tables.gauss_idx(j)) * &inv_a;
            }
        }
        for b in den {
            let g0_b = g0_idx(tables, b);
            for (n, c) in coeffs.iter_mut().enumerate() {
                let j = (b + n as u64) % q1;
                *c = &(&*c * &g0_b) * &g0_inv_idx(tables, j);
            }
        }
        let s = BigRational::new(BigInt::from(1), BigInt::from(1i64 - tables.q() as i64));
        for c in coeffs.iter_mut() {
            *c = c.scale(&s);
        }
        HgfEvaluator {
            field: tables.field().clone(),
            q1,
            coeffs,
        }
    }

    /// Evaluates F(α,β;λ); every character kills λ = 0, so F(α,β;0) = 0.
    pub fn eval(&self, lambda: FieldElem) -> CycloNum {
        if lambda == self.field.zero() {
            return CycloNum::zero();
        }
        let e = self.field.log(lambda).expect("nonzero element has a log");
        let mut acc = CycloNum::zero();
        for (n, c) in self.coeffs.iter().enumerate() {
            acc = &acc + &mul_zeta(c, self.q1, (n as u64 * e % self.q1) as i64);
        }
        acc
    }
}

/// One-shot F(α,β;λ).
pub fn hgf_eval(tables: &SumTables, spec: &HgfSpec, lambda: FieldElem) -> CycloNum {
    HgfEvaluator::new(tables, spec).eval(lambda)
}

/// One-shot ₍r₎F₍s₎(a₁,…;b₁,…;λ), ε adjoined to the denominator.
pub fn rfs_eval(tables: &SumTables, num: &[i64], den: &[i64], lambda: FieldElem) -> CycloNum {
    hgf_eval(tables, &HgfSpec::rfs(tables.q1(), num, den), lambda)
}

/// Precomputed Appell F₄ kernel (ν,ν′) ↦ (α+β)_{νν′}/((ε+γ)°_ν(ε+γ′)°_{ν′}),
/// scaled by 1/(1−q)²; entries lowered to conductor q−1.
pub struct AppellKernel {
    field: Arc<FiniteField>,
    q1: u64,
    kernel: Vec<CycloNum>,
}

impl AppellKernel {
    /// Builds the kernel for F₄(α,β;γ,γ′) by the defining double sum.
    pub fn new(
        tables: &SumTables,
        alpha: MultChar,
        beta: MultChar,
        gamma: MultChar,
        gamma2: MultChar,
    ) -> AppellKernel {
        let q1 = tables.q1();
        let q = tables.q() as i64;
        let num_row: Vec<CycloNum> = (0..q1)
            .map(|m| {
                let nu = tables.chi(m as i64);
                &tables.pochhammer_char(alpha, nu) * &tables.pochhammer_char(beta, nu)
            })
            .collect();
        let den_row = |g: MultChar| -> Vec<CycloNum> {
            let g0_g = g0_idx(tables, g.index);
            (0..q1)
                .map(|n| {
                    let unit = g0_inv_idx(tables, n).scale_int(q);
                    let shifted = g0_inv_idx(tables, (g.index + n) % q1);
                    &(&unit * &g0_g) * &shifted
                })
                .collect()
        };
        let den1 = den_row(gamma);
        let den2 = den_row(gamma2);
        let s = {
            let d = BigInt::from(1i64 - q);
            BigRational::new(BigInt::from(1), &d * &d)
        };
        let mut kernel = Vec::with_capacity((q1 * q1) as usize);
        for n in 0..q1 {
            for n2 in 0..q1 {
                let entry = &(&num_row[((n + n2) % q1) as usize] * &den1[n as usize])
                    * &den2[n2 as usize];
                let entry = entry.scale(&s);
                kernel.push(
                    entry
                        .lower_to(q1)
                        .expect("balanced double-sum kernel lies in Q(zeta_{q-1})"),
                );
            }
        }
        AppellKernel {
            field: tables.field().clone(),
            q1,
            kernel,
        }
    }

    /// Evaluates F₄ at (λ,λ′); zero when either argument is 0.
    pub fn eval(&self, lambda: FieldElem, lambda2: FieldElem) -> CycloNum {
        let zero = self.field.zero();
        if lambda == zero || lambda2 == zero {
            return CycloNum::zero();
        }
        let e = self.field.log(lambda).expect("nonzero element has a log");
        let e2 = self.field.log(lambda2).expect("nonzero element has a log");
        let mut acc = CycloNum::zero();
        for n in 0..self.q1 {
            for n2 in 0..self.q1 {
                let c = &self.kernel[(n * self.q1 + n2) as usize];
                let k = (n * e + n2 * e2) % self.q1;
                acc = &acc + &mul_zeta(c, self.q1, k as i64);
            }
        }
        acc
    }
}

/// One-shot Appell F₄(α,β;γ,γ′;λ,λ′) by the defining double character sum.
pub fn appell_f4(
    tables: &SumTables,
    alpha: MultChar,
    beta: MultChar,
    gamma: MultChar,
    gamma2: MultChar,
    lambda: FieldElem,
    lambda2: FieldElem,
) -> CycloNum {
    AppellKernel::new(tables, alpha, beta, gamma, gamma2).eval(lambda, lambda2)
}

/// Closed form of ₂F₁(α,β;γ;1).
///
/// Generic branch g°(γ)g(ᾱβ̄γ)/(g°(ᾱγ)g°(β̄γ)); when α+β = ε+γ as multisets
/// the value degenerates to 1 + q^{δ(γ)}(1−q).
pub fn euler_gauss_2f1_at_1(
    tables: &SumTables,
    alpha: MultChar,
    beta: MultChar,
    gamma: MultChar,
) -> CycloNum {
    let q1 = tables.q1();
    let (a, b, c) = (alpha.index, beta.index, gamma.index);
    let sub = |x: u64, y: u64| (x + q1 - y) % q1;
    let lhs = ParamSet::from_indices(q1, &[a as i64, b as i64]);
    let rhs = ParamSet::from_indices(q1, &[0, c as i64]);
    if lhs == rhs {
        let d = if gamma.is_trivial() {
            tables.q() as i64
        } else {
            1
        };
        return CycloNum::from_int(1 + d * (1 - tables.q() as i64));
    }
    let top = &g0_idx(tables, c) * tables.gauss_idx(sub(sub(c, a), b));
    &(&top * &g0_inv_idx(tables, sub(c, a))) * &g0_inv_idx(tables, sub(c, b))
}

/// Closed form of ₂F₁(α²,β;α²β̄;−1) in odd characteristic:
/// Σ over the two square roots α′ of α² of g°(α²β̄)g(α′)/(g(α²)g°(α′β̄)).
pub fn kummer_2f1_at_minus1(
    tables: &SumTables,
    alpha: MultChar,
    beta: MultChar,
) -> Result<CycloNum, HgfError> {
    if tables.field().p() == 2 {
        return Err(HgfError::EvenCharacteristic);
    }
    let q1 = tables.q1();
    let h = q1 / 2;
    let (a, b) = (alpha.index, beta.index);
    let a2 = 2 * a % q1;
    let sub = |x: u64, y: u64| (x + q1 - y) % q1;
    let common = &g0_idx(tables, sub(a2, b)) * tables.gauss_inv_idx(a2);
    let mut acc = CycloNum::zero();
    for ap in [a, (a + h) % q1] {
        acc = &acc + &(tables.gauss_idx(ap) * &g0_inv_idx(tables, sub(ap, b)));
    }
    Ok(&acc * &common)
}

/// Closed form of ₃F₂(α²,β,γ;α²β̄,α²γ̄;1) in odd characteristic.
///
/// Requires α² ≠ βγ and β+γ ≠ ε+α′ for both square roots α′ of α²; the sum
/// runs over those square roots.
pub fn dixon_3f2_at_1(
    tables: &SumTables,
    alpha: MultChar,
    beta: MultChar,
    gamma: MultChar,
) -> Result<CycloNum, HgfError> {
    if tables.field().p() == 2 {
        return Err(HgfError::EvenCharacteristic);
    }
    let q1 = tables.q1();
    let h = q1 / 2;
    let (a, b, c) = (alpha.index, beta.index, gamma.index);
    let a2 = 2 * a % q1;
    let sub = |x: u64, y: u64| (x + q1 - y) % q1;
    if a2 == (b + c) % q1 {
        return Err(HgfError::HypothesisViolated(format!(
            "α² = βγ (character indices {a2} = {b} + {c} mod {q1})"
        )));
    }
    let bc = ParamSet::from_indices(q1, &[b as i64, c as i64]);
    for ap in [a, (a + h) % q1] {
        if bc == ParamSet::from_indices(q1, &[0, ap as i64]) {
            return Err(HgfError::HypothesisViolated(format!(
                "β+γ = ε+α′ (character indices {{{b},{c}}} = {{0,{ap}}} mod {q1})"
            )));
        }
    }
    let common = &(&g0_idx(tables, sub(a2, b)) * &g0_idx(tables, sub(a2, c)))
        * &(tables.gauss_inv_idx(a2) * tables.gauss_inv_idx(sub(sub(a2, b), c)));
    let mut acc = CycloNum::zero();
    for ap in [a, (a + h) % q1] {
        let t = &(tables.gauss_idx(ap) * tables.gauss_idx(sub(sub(ap, b), c)))
            * &(&g0_inv_idx(tables, sub(ap, b)) * &g0_inv_idx(tables, sub(ap, c)));
        acc = &acc + &t;
    }
    Ok(&acc * &common)
}

/// Checks ₂F₁(α,β̄γ;γ;x) = ᾱ(1−x)·₂F₁(α,β;γ;x/(x−1)) exactly, for x ≠ 1.
pub fn pfaff_transform_check(
    tables: &SumTables,
    alpha: MultChar,
    beta: MultChar,
    gamma: MultChar,
    x: FieldElem,
) -> Result<bool, HgfError> {
    let f = tables.field();
    if x == f.one() {
        return Err(HgfError::XEqualsOne);
    }
    let q1 = tables.q1();
    let (a, b, c) = (alpha.index as i64, beta.index as i64, gamma.index as i64);
    let lhs = rfs_eval(tables, &[a, (c - b).rem_euclid(q1 as i64)], &[c], x);
    let arg = f
        .div(x, f.sub(x, f.one()))
        .expect("x - 1 is nonzero when x is not 1");
    let scale = alpha.conj().eval(f, f.sub(f.one(), x));
    let rhs = &scale * &rfs_eval(tables, &[a, b], &[c], arg);
    Ok(lhs == rhs)
}

/// A dense function table on k* (indexed by discrete log) or on (k*)²
/// (row-major log pairs).
#[derive(Debug, Clone, PartialEq)]
pub enum GroupTable {
    /// f(gen^e) at position e, length q−1.
    Units(Vec<CycloNum>),
    /// f(gen^e, gen^e′) at position e·(q−1)+e′, length (q−1)².
    UnitsSquared(Vec<CycloNum>),
}

/// Fourier transform f̂(ν) = Σ_g f(g)ν̄(g), indexed by character index.
pub fn fourier(tables: &SumTables, f: &GroupTable) -> GroupTable {
    let q1 = tables.q1();
    match f {
        GroupTable::Units(vals) => {
            assert_eq!(vals.len() as u64, q1, "table must cover all of k*");
            let out = (0..q1)
                .map(|n| {
                    let mut acc = CycloNum::zero();
                    for (e, v) in vals.iter().enumerate() {
                        acc = &acc + &mul_zeta(v, q1, -((n * e as u64 % q1) as i64));
                    }
                    acc
                })
                .collect();
            GroupTable::Units(out)
        }
        GroupTable::UnitsSquared(vals) => {
            assert_eq!(vals.len() as u64, q1 * q1, "table must cover all of (k*)²");
            let mut out = Vec::with_capacity(vals.len());
            for n in 0..q1 {
                for n2 in 0..q1 {
                    let mut acc = CycloNum::zero();
                    for e in 0..q1 {
                        for e2 in 0..q1 {
                            let v = &vals[(e * q1 + e2) as usize];
                            let k = (n * e + n2 * e2) % q1;
                            acc = &acc + &mul_zeta(v, q1, -(k as i64));
                        }
                    }
                    out.push(acc);
                }
            }
            GroupTable::UnitsSquared(out)
        }
    }
}

/// Inverse Fourier transform f(g) = (1/#G) Σ_ν f̂(ν)ν(g).
pub fn fourier_inverse(tables: &SumTables, fhat: &GroupTable) -> GroupTable {
    let q1 = tables.q1();
    let scale = |acc: CycloNum, size: u64| {
        acc.scale(&BigRational::new(BigInt::from(1), BigInt::from(size)))
    };
    match fhat {
        GroupTable::Units(vals) => {
            assert_eq!(vals.len() as u64, q1, "table must cover all characters");
            let out = (0..q1)
                .map(|e| {
                    let mut acc = CycloNum::zero();
                    for (n, v) in vals.iter().enumerate() {
                        acc = &acc + &mul_zeta(v, q1, (n as u64 * e % q1) as i64);
                    }
                    scale(acc, q1)
                })
                .collect();
            GroupTable::Units(out)
        }
        GroupTable::UnitsSquared(vals) => {
            assert_eq!(vals.len() as u64, q1 * q1, "table must cover all pairs");
            let mut out = Vec::with_capacity(vals.len());
            for e in 0..q1 {
                for e2 in 0..q1 {
                    let mut acc = CycloNum::zero();
                    for n in 0..q1 {
                        for n2 in 0..q1 {
                            let v = &vals[(n * q1 + n2) as usize];
                            let k = (n * e + n2 * e2) % q1;
                            acc = &acc + &mul_zeta(v, q1, k as i64);
                        }
                    }
                    out.push(scale(acc, q1 * q1));
                }
            }
            GroupTable::UnitsSquared(out)
        }
    }
}
