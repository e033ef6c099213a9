//! Characters of a finite field and multisets of them.
//!
//! A [`MultChar`] is a multiplicative character χ_j of k*, identified by its
//! index j mod q−1 relative to the field's fixed generator: χ_j(gᵗ) =
//! ζ_{q−1}^{jt}, with χ(0) = 0 by convention. An [`AddChar`] is ψ_a(x) =
//! ζ_p^{Tr(ax)} for a shift a ∈ k*. A [`ParamSet`] is an unordered multiset
//! of multiplicative characters with the degree map, the symmetric pairing
//! counting coincidences, elementwise shift and conjugation, and union.
//!
//! Also here: the distinguished characters ([`quadratic_char`],
//! [`cubic_chars`], [`nth_root_chars`]) and the text syntax used by the CLI
//! ([`parse_mult_char`], [`parse_param_set`]: `chi:j`, `eps`, `phi`, `rho`,
//! bare indices, comma lists, `none`).
//!
//! Characters are tied to a field only through the group order q−1; indices
//! mean the same thing across runs because field construction is
//! deterministic.

use std::collections::BTreeMap;
use std::fmt;

use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::cyclo::CycloNum;
use crate::gf::{FieldElem, FiniteField};

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum CharError {
    #[error("character groups differ: order {left} vs {right}")]
    FieldMismatch { left: u64, right: u64 },
    #[error("no such character: {condition}")]
    NoSuchCharacter { condition: String },
    #[error("additive character shift must be nonzero")]
    ZeroShift,
    #[error("bad character syntax {token:?} at position {position}: {reason}")]
    Parse {
        token: String,
        position: usize,
        reason: String,
    },
}

/// A multiplicative character χ_j of a group k* of order q−1.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct MultChar {
    /// Group order q−1.
    pub order: u64,
    /// Index j, always reduced mod order.
    pub index: u64,
}

impl MultChar {
    pub fn new(order: u64, index: i64) -> MultChar {
        assert!(order >= 1);
        MultChar { order, index: index.rem_euclid(order as i64) as u64 }
    }

    /// The trivial character ε.
    pub fn trivial(order: u64) -> MultChar {
        MultChar::new(order, 0)
    }

    /// All q−1 characters in index order.
    pub fn all(order: u64) -> impl Iterator<Item = MultChar> {
        (0..order).map(move |j| MultChar { order, index: j })
    }

    pub fn is_trivial(self) -> bool {
        self.index == 0
    }

    /// The characteristic function of ε: 1 iff χ = ε.
    pub fn delta(self) -> u32 {
        u32::from(self.index == 0)
    }

    /// χ(x): 0 at x = 0, else ζ_{q−1}^{j·log x}.
    pub fn eval(self, field: &FiniteField, x: FieldElem) -> CycloNum {
        assert_eq!(self.order, field.q() as u64 - 1, "character from another field");
        if x.code() == 0 {
            return CycloNum::zero();
        }
        let t = field.log(x).unwrap();
        CycloNum::root_of_unity(self.order, (self.index * t % self.order) as i64)
    }

    pub fn mul(self, other: MultChar) -> MultChar {
        assert_eq!(self.order, other.order, "character from another field");
        MultChar { order: self.order, index: (self.index + other.index) % self.order }
    }

    /// χ̄ = χ^{−1}.
    pub fn conj(self) -> MultChar {
        MultChar { order: self.order, index: (self.order - self.index) % self.order }
    }

    pub fn pow(self, n: i64) -> MultChar {
        let idx = (self.index as i128 * n as i128).rem_euclid(self.order as i128);
        MultChar { order: self.order, index: idx as u64 }
    }

    /// Multiplicative order of χ in the character group.
    pub fn char_order(self) -> u64 {
        self.order / gcd(self.index, self.order)
    }
}

impl fmt::Display for MultChar {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.index == 0 {
            write!(f, "eps")
        } else {
            write!(f, "chi:{}", self.index)
        }
    }
}

/// The unique quadratic character (index (q−1)/2); needs odd q.
pub fn quadratic_char(field: &FiniteField) -> Result<MultChar, CharError> {
    let q1 = field.q() as u64 - 1;
    if field.p() == 2 {
        return Err(CharError::NoSuchCharacter {
            condition: "quadratic character requires 2 | q-1 (odd q)".into(),
        });
    }
    Ok(MultChar { order: q1, index: q1 / 2 })
}

/// Both nontrivial characters with χ³ = ε; needs 3 | q−1.
pub fn cubic_chars(field: &FiniteField) -> Result<[MultChar; 2], CharError> {
    let q1 = field.q() as u64 - 1;
    if q1 % 3 != 0 {
        return Err(CharError::NoSuchCharacter {
            condition: format!("cubic characters require 3 | q-1, but q-1 = {q1}"),
        });
    }
    Ok([
        MultChar { order: q1, index: q1 / 3 },
        MultChar { order: q1, index: 2 * q1 / 3 },
    ])
}

/// All characters with χⁿ = ε, in index order; count gcd(n, q−1).
pub fn nth_root_chars(field: &FiniteField, n: u64) -> Vec<MultChar> {
    let q1 = field.q() as u64 - 1;
    let g = gcd(n, q1);
    let step = q1 / g;
    (0..g).map(|i| MultChar { order: q1, index: i * step }).collect()
}

fn gcd(a: u64, b: u64) -> u64 {
    if a == 0 {
        b
    } else {
        gcd(b % a, a)
    }
}

/// The additive character ψ_a(x) = ζ_p^{Tr(ax)} for a nonzero shift a.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub struct AddChar {
    pub p: u32,
    pub shift: FieldElem,
}

impl AddChar {
    pub fn new(field: &FiniteField, shift: FieldElem) -> Result<AddChar, CharError> {
        if shift.code() == 0 {
            return Err(CharError::ZeroShift);
        }
        Ok(AddChar { p: field.p(), shift })
    }

    /// The default ψ₁ with shift 1.
    pub fn canonical(field: &FiniteField) -> AddChar {
        AddChar { p: field.p(), shift: field.one() }
    }

    /// ψ_a(x) = ζ_p^{Tr(ax)}.
    pub fn eval(self, field: &FiniteField, x: FieldElem) -> CycloNum {
        assert_eq!(self.p, field.p(), "additive character from another field");
        let t = field.trace(field.mul(self.shift, x));
        CycloNum::root_of_unity(self.p as u64, t as i64)
    }
}

/// A multiset of multiplicative characters over one field, stored as
/// index → multiplicity.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct ParamSet {
    /// Group order q−1.
    pub order: u64,
    counts: BTreeMap<u64, u32>,
}

impl ParamSet {
    pub fn empty(order: u64) -> ParamSet {
        ParamSet { order, counts: BTreeMap::new() }
    }

    pub fn from_chars(order: u64, chars: &[MultChar]) -> Result<ParamSet, CharError> {
        let mut s = ParamSet::empty(order);
        for &c in chars {
            if c.order != order {
                return Err(CharError::FieldMismatch { left: order, right: c.order });
            }
            s.insert(c);
        }
        Ok(s)
    }

    pub fn from_indices(order: u64, indices: &[i64]) -> ParamSet {
        let mut s = ParamSet::empty(order);
        for &i in indices {
            s.insert(MultChar::new(order, i));
        }
        s
    }

    pub fn insert(&mut self, c: MultChar) {
        assert_eq!(self.order, c.order, "character from another field");
        *self.counts.entry(c.index).or_insert(0) += 1;
    }

    /// Total multiplicity.
    pub fn degree(&self) -> u64 {
        self.counts.values().map(|&m| m as u64).sum()
    }

    pub fn is_empty(&self) -> bool {
        self.counts.is_empty()
    }

    /// Distinct (character, multiplicity) pairs in index order.
    pub fn iter(&self) -> impl Iterator<Item = (MultChar, u32)> + '_ {
        self.counts
            .iter()
            .map(|(&j, &m)| (MultChar { order: self.order, index: j }, m))
    }

    /// All members with multiplicity, in index order.
    pub fn expanded(&self) -> Vec<MultChar> {
        let mut out = Vec::with_capacity(self.degree() as usize);
        for (c, m) in self.iter() {
            for _ in 0..m {
                out.push(c);
            }
        }
        out
    }

    pub fn multiplicity(&self, index: u64) -> u32 {
        self.counts.get(&(index % self.order)).copied().unwrap_or(0)
    }

    /// Number of members equal to ε (the pairing with {ε}).
    pub fn eps_multiplicity(&self) -> u32 {
        self.multiplicity(0)
    }

    /// Σ over member pairs of δ(αβ̄): counts index coincidences with
    /// multiplicity. Symmetric and additive over unions.
    pub fn pairing(&self, other: &ParamSet) -> Result<u64, CharError> {
        if self.order != other.order {
            return Err(CharError::FieldMismatch { left: self.order, right: other.order });
        }
        Ok(self
            .counts
            .iter()
            .map(|(j, &m)| m as u64 * other.multiplicity(*j) as u64)
            .sum())
    }

    /// Multiplies every member by χ, preserving multiplicities.
    pub fn shift(&self, chi: MultChar) -> Result<ParamSet, CharError> {
        if self.order != chi.order {
            return Err(CharError::FieldMismatch { left: self.order, right: chi.order });
        }
        let mut out = ParamSet::empty(self.order);
        for (c, m) in self.iter() {
            *out.counts.entry(c.mul(chi).index).or_insert(0) += m;
        }
        Ok(out)
    }

    /// Conjugates (inverts) every member.
    pub fn conj(&self) -> ParamSet {
        let mut out = ParamSet::empty(self.order);
        for (c, m) in self.iter() {
            *out.counts.entry(c.conj().index).or_insert(0) += m;
        }
        out
    }

    /// Multiset union (disjoint sum of multiplicities).
    pub fn union(&self, other: &ParamSet) -> Result<ParamSet, CharError> {
        if self.order != other.order {
            return Err(CharError::FieldMismatch { left: self.order, right: other.order });
        }
        let mut out = self.clone();
        for (c, m) in other.iter() {
            *out.counts.entry(c.index).or_insert(0) += m;
        }
        Ok(out)
    }
}

impl fmt::Display for ParamSet {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.is_empty() {
            return write!(f, "none");
        }
        let mut first = true;
        for c in self.expanded() {
            if !first {
                write!(f, ",")?;
            }
            write!(f, "{c}")?;
            first = false;
        }
        Ok(())
    }
}

/// Parses one character token: a bare index, `chi:j`, `eps`, `phi`
/// (quadratic), or `rho` (first cubic).
pub fn parse_mult_char(token: &str, field: &FiniteField) -> Result<MultChar, CharError> {
    parse_char_at(token, field, 0)
}

fn parse_char_at(
    token: &str,
    field: &FiniteField,
    position: usize,
) -> Result<MultChar, CharError> {
    let q1 = field.q() as u64 - 1;
    let t = token.trim();
    let err = |reason: &str| CharError::Parse {
        token: t.to_string(),
        position,
        reason: reason.to_string(),
    };
    match t {
        "" => Err(err("empty character token")),
        "eps" => Ok(MultChar::trivial(q1)),
        "phi" => quadratic_char(field),
        "rho" => Ok(cubic_chars(field)?[0]),
        _ => {
            let body = t.strip_prefix("chi:").unwrap_or(t);
            let j: i64 = body
                .parse()
                .map_err(|_| err("expected an integer index, chi:j, eps, phi, or rho"))?;
            Ok(MultChar::new(q1, j))
        }
    }
}

/// Parses a comma list of character tokens into a ParamSet; `none` (or the
/// empty string) is the empty multiset.
pub fn parse_param_set(list: &str, field: &FiniteField) -> Result<ParamSet, CharError> {
    let q1 = field.q() as u64 - 1;
    let t = list.trim();
    if t.is_empty() || t == "none" {
        return Ok(ParamSet::empty(q1));
    }
    let mut out = ParamSet::empty(q1);
    for (i, token) in t.split(',').enumerate() {
        out.insert(parse_char_at(token, field, i)?);
    }
    Ok(out)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn fields() -> Vec<FiniteField> {
        [(2u32, 2u32), (5, 1), (7, 1), (3, 2)]
            .iter()
            .map(|&(p, f)| FiniteField::new(p, f).unwrap())
            .collect()
    }

    #[test]
    fn trivial_character_values() {
        let k = FiniteField::new(5, 1).unwrap();
        let eps = MultChar::trivial(4);
        assert!(eps.eval(&k, FieldElem(0)).is_zero());
        for u in k.units() {
            assert!(eps.eval(&k, u).is_one());
        }
        assert_eq!(eps.delta(), 1);
        assert_eq!(MultChar::new(4, 4).delta(), 1, "index wraps to 0");
        assert_eq!(MultChar::new(4, 2).delta(), 0);
    }

    #[test]
    fn quadratic_values_match_squares() {
        let k = FiniteField::new(5, 1).unwrap();
        let phi = quadratic_char(&k).unwrap();
        assert_eq!(phi.index, 2);
        assert!(phi.eval(&k, FieldElem(4)).is_one(), "4 = 2^2 is a square");
        assert_eq!(phi.eval(&k, FieldElem(2)), CycloNum::from_int(-1));
        // chi(1) = 1 for every character.
        for j in 0..4 {
            assert!(MultChar::new(4, j).eval(&k, k.one()).is_one());
        }
    }

    #[test]
    fn multiplicativity_exhaustive() {
        for k in fields() {
            let q1 = k.q() as u64 - 1;
            for chi in MultChar::all(q1) {
                for x in k.units() {
                    for y in k.units() {
                        let lhs = chi.eval(&k, k.mul(x, y));
                        let rhs = &chi.eval(&k, x) * &chi.eval(&k, y);
                        assert_eq!(lhs, rhs);
                    }
                }
            }
        }
    }

    #[test]
    fn additive_character_laws() {
        for k in fields() {
            for a in k.units() {
                let psi = AddChar::new(&k, a).unwrap();
                assert!(psi.eval(&k, k.zero()).is_one());
                for x in k.elements() {
                    let minus = psi.eval(&k, k.neg(x));
                    assert!((&psi.eval(&k, x) * &minus).is_one());
                    for y in k.elements() {
                        assert_eq!(
                            psi.eval(&k, k.add(x, y)),
                            &psi.eval(&k, x) * &psi.eval(&k, y)
                        );
                    }
                }
            }
        }
        let k3 = FiniteField::new(3, 1).unwrap();
        let psi = AddChar::canonical(&k3);
        assert_eq!(psi.eval(&k3, FieldElem(1)), CycloNum::root_of_unity(3, 1));
        assert_eq!(AddChar::new(&k3, FieldElem(0)), Err(CharError::ZeroShift));
    }

    #[test]
    fn orthogonality() {
        for k in fields() {
            let q1 = k.q() as u64 - 1;
            for chi in MultChar::all(q1) {
                let mut sum = CycloNum::zero();
                for x in k.units() {
                    sum = &sum + &chi.eval(&k, x);
                }
                let expect = CycloNum::from_int(q1 as i64 * chi.delta() as i64);
                assert_eq!(sum, expect, "q={} chi={}", k.q(), chi);
            }
            for a in k.units() {
                let psi = AddChar::new(&k, a).unwrap();
                let mut sum = CycloNum::zero();
                for x in k.elements() {
                    sum = &sum + &psi.eval(&k, x);
                }
                assert!(sum.is_zero(), "q={} shift={}", k.q(), a.code());
            }
        }
    }

    #[test]
    fn character_group_structure() {
        let k = FiniteField::new(7, 1).unwrap();
        for chi in MultChar::all(6) {
            assert_eq!(chi.char_order(), 6 / gcd(chi.index, 6));
            assert!(chi.pow(chi.char_order() as i64).is_trivial());
            assert_eq!(chi.mul(chi.conj()).delta(), 1);
        }
        let a = MultChar::new(6, 2);
        let b = MultChar::new(6, 5);
        assert_eq!(a.mul(b).index, 1);
        assert_eq!(a.pow(-1), a.conj());
        // Conjugate evaluates to the complex conjugate value.
        for x in k.units() {
            assert_eq!(b.conj().eval(&k, x), b.eval(&k, x).conj());
        }
    }

    #[test]
    fn distinguished_characters() {
        let k5 = FiniteField::new(5, 1).unwrap();
        assert_eq!(quadratic_char(&k5).unwrap().index, 2);
        let k4 = FiniteField::new(2, 2).unwrap();
        assert!(matches!(
            quadratic_char(&k4),
            Err(CharError::NoSuchCharacter { .. })
        ));
        let k7 = FiniteField::new(7, 1).unwrap();
        let [r1, r2] = cubic_chars(&k7).unwrap();
        assert_eq!((r1.index, r2.index), (2, 4));
        assert!(matches!(
            cubic_chars(&k5),
            Err(CharError::NoSuchCharacter { .. })
        ));
        assert_eq!(nth_root_chars(&k7, 3).len(), 3);
        let sq5: Vec<u64> = nth_root_chars(&k5, 2).iter().map(|c| c.index).collect();
        assert_eq!(sq5, vec![0, 2]);
        let k8 = FiniteField::new(2, 3).unwrap();
        assert_eq!(nth_root_chars(&k8, 7).len(), 7);
    }

    #[test]
    fn paramset_degree_and_pairing() {
        let two_eps = ParamSet::from_indices(4, &[0, 0]);
        let eps = ParamSet::from_indices(4, &[0]);
        assert_eq!(two_eps.degree(), 2);
        assert_eq!(two_eps.pairing(&eps).unwrap(), 2);
        let ab = ParamSet::from_indices(4, &[1, 2]);
        let c = ParamSet::from_indices(4, &[3]);
        assert_eq!(ab.pairing(&c).unwrap(), 0);
        assert_eq!(ab.pairing(&two_eps).unwrap(), two_eps.pairing(&ab).unwrap());
        // Additivity over union.
        let u = c.union(&eps).unwrap();
        assert_eq!(
            two_eps.pairing(&u).unwrap(),
            two_eps.pairing(&c).unwrap() + two_eps.pairing(&eps).unwrap()
        );
        assert_eq!(
            ab.pairing(&ParamSet::empty(6)),
            Err(CharError::FieldMismatch { left: 4, right: 6 })
        );
    }

    #[test]
    fn paramset_shift_conj() {
        let a = ParamSet::from_indices(6, &[1, 1, 4]);
        let chi = MultChar::new(6, 2);
        let shifted = a.shift(chi).unwrap();
        assert_eq!(shifted, ParamSet::from_indices(6, &[3, 3, 0]));
        assert_eq!(
            shifted.conj(),
            a.conj().shift(chi.conj()).unwrap(),
            "conj(shift(A, chi)) = shift(conj(A), conj(chi))"
        );
        assert_eq!(a.conj().conj(), a);
        assert_eq!(a.multiplicity(1), 2);
        assert_eq!(a.eps_multiplicity(), 0);
        assert_eq!(shifted.eps_multiplicity(), 1);
        let expanded: Vec<u64> = a.expanded().iter().map(|c| c.index).collect();
        assert_eq!(expanded, vec![1, 1, 4]);
    }

    #[test]
    fn parsing() {
        let k = FiniteField::new(7, 1).unwrap();
        assert_eq!(parse_mult_char("chi:2", &k).unwrap().index, 2);
        assert_eq!(parse_mult_char("4", &k).unwrap().index, 4);
        assert_eq!(parse_mult_char("-1", &k).unwrap().index, 5);
        assert_eq!(parse_mult_char("eps", &k).unwrap().index, 0);
        assert_eq!(parse_mult_char("phi", &k).unwrap().index, 3);
        assert_eq!(parse_mult_char("rho", &k).unwrap().index, 2);
        let e = parse_mult_char("chi:x", &k).unwrap_err();
        assert!(matches!(e, CharError::Parse { ref token, .. } if token == "chi:x"));

        let s = parse_param_set("chi:1,chi:1,phi", &k).unwrap();
        assert_eq!(s.degree(), 3);
        assert_eq!(s.multiplicity(1), 2);
        assert_eq!(s.multiplicity(3), 1);
        assert!(parse_param_set("none", &k).unwrap().is_empty());
        assert!(parse_param_set("", &k).unwrap().is_empty());
        let e = parse_param_set("eps,bogus,phi", &k).unwrap_err();
        assert!(matches!(e, CharError::Parse { position: 1, .. }));
        // Round-trip through display syntax.
        let shown = s.to_string();
        assert_eq!(parse_param_set(&shown, &k).unwrap(), s);
    }
}
