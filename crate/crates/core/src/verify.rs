//! Identity catalog and exact verification engine.
//!
//! Every entry in the catalog pairs a hypothesis predicate with two exact
//! evaluators (left- and right-hand side) and a quantifier over field points.
//! Verification enumerates all admissible parameter tuples, evaluates both
//! sides at every point (or a seeded sample of tuples), and reports each
//! mismatch with both cyclotomic values. The module provides:
//!
//! - [`IdentityId`]: one tag per catalog identity,
//! - [`catalog`]: metadata for every identity,
//! - [`enumerate_admissible`] / [`hypothesis`]: the admissible tuple sets,
//! - [`verify`] / [`verify_suite`]: exact checking with reports,
//! - [`verify_mutated`]: single-slot perturbation runs that prove the
//!   checker can actually fail,
//! - [`VerificationReport`]: the serializable result record.

use std::fmt;
use std::str::FromStr;
use std::sync::Arc;
use std::time::Instant;

use num_bigint::BigInt;
use num_rational::BigRational;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::chars::ParamSet;
use crate::cyclo::CycloNum;
use crate::gf::{FieldElem, FiniteField};
use crate::hgf::{
    dixon_3f2_at_1, euler_gauss_2f1_at_1, kummer_2f1_at_minus1, AppellKernel, HgfEvaluator,
    HgfSpec,
};
use crate::sums::SumTables;

/// Exhaustive/sample threshold: primitive evaluations per (identity, field).
const AUTO_LIMIT: u64 = 10_000_000;
/// Default sample size when not exhaustive.
const DEFAULT_SAMPLE: u64 = 2000;
/// Sampled parameter-set tuples per field for the structural identities.
const STRUCT_SAMPLES: usize = 16;
/// Parameter-set shapes (numerator size, denominator size) cycled by samples.
const STRUCT_SHAPES: [(usize, usize); 5] = [(1, 1), (2, 2), (1, 2), (2, 3), (3, 3)];

/// Identifies one catalog identity.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub enum IdentityId {
    /// ψ(λ)·₁F₁(α;β;λ) = ₁F₁(ᾱβ;β;−λ).
    #[serde(rename = "P1-KUMMER-EXP")]
    P1KummerExp,
    /// ψ(λ/2)·₁F₁(α;α²;λ) = ₀F₁(;αφ;λ²/16).
    #[serde(rename = "P2-SQUARE")]
    P2Square,
    /// αβγ̄(1−λ)·₂F₁(α,β;γ;λ) = ₂F₁(ᾱγ,β̄γ;γ;λ).
    #[serde(rename = "P6-EULER")]
    P6Euler,
    /// ₁F₁(α;β²;λ)·₁F₁(α;β²;−λ) = ₂F₃(λ²/4).
    #[serde(rename = "P9-RAMANUJAN")]
    P9Ramanujan,
    /// ₀F₁(;α²;λ)·₀F₁(;β²;λ) = ₂F₃(4λ).
    #[serde(rename = "THM-B3a")]
    ThmB3a,
    /// ₀F₁(;α²φ;λ)·₀F₁(;β²φ;λ) = ₂F₃(4λ).
    #[serde(rename = "THM-B3b")]
    ThmB3b,
    /// ₀F₁(;α²;λ)·₀F₁(;α²;−λ) = ₀F₃(−λ²/4).
    #[serde(rename = "THM-B4")]
    ThmB4,
    /// ₀F₁(;α²;λ)·₀F₁(;ᾱ²;−λ) = q^{δ(α)}·₀F₃(−λ²/4).
    #[serde(rename = "COR-B5")]
    CorB5,
    /// ₂F₀(α²,β²;λ)·₂F₀(α²,β²;−λ) = ₄F₁(4λ²).
    #[serde(rename = "COR-B7")]
    CorB7,
    /// ₂F₀(α²,ᾱ²;λ)·₂F₀(β²,β̄²;−λ) = ₄F₁(4λ²).
    #[serde(rename = "COR-B8")]
    CorB8,
    /// ₁F₁(α;β²;λ)·₁F₁(αβ̄²;β̄²;−λ) = ₂F₃(λ²/4).
    #[serde(rename = "COR-B10")]
    CorB10,
    /// ₁F₁(α²;α⁴;λ)·₁F₁(β²;β⁴;−λ) = ₂F₃(λ²/4).
    #[serde(rename = "COR-B11a")]
    CorB11a,
    /// ₁F₁(α²φ;α⁴;λ)·₁F₁(β²φ;β⁴;−λ) = ₂F₃(λ²/4).
    #[serde(rename = "COR-B11b")]
    CorB11b,
    /// ₀F₂(;α⁶,β⁶;λ)·₀F₂(;α⁶,β⁶;−λ) = ₃F₈(−27λ²/64).
    #[serde(rename = "THM-B12")]
    ThmB12,
    /// Two-variable ₂F₁ product equals Appell F₄ with a δ(1−xy) correction.
    #[serde(rename = "THM-F4-PRODUCT")]
    ThmF4Product,
    /// ₂F₁(α²,β²;γ;λ)·₂F₁(α²,β²;γ′;λ) = ₄F₃(4λ(1−λ)) with δ corrections.
    #[serde(rename = "COR-B14")]
    CorB14,
    /// Diagonal Appell values: F₄(α²,β²;γ,γ′;x,x) = ₄F₃(4x).
    #[serde(rename = "LEM-F4-DIAG")]
    LemF4Diag,
    /// Simultaneous parameter shift by a character φ.
    #[serde(rename = "STRUCT-G8")]
    StructG8,
    /// Exchange of numerator and denominator with inverted argument.
    #[serde(rename = "STRUCT-G9")]
    StructG9,
    /// Cancellation of common parameters with a correction sum.
    #[serde(rename = "STRUCT-G10")]
    StructG10,
    /// ₂F₁ at λ=1 equals its Gauss-sum closed form.
    #[serde(rename = "CLOSED-G11")]
    ClosedG11,
    /// ₂F₁ at λ=−1 equals its two-term closed form.
    #[serde(rename = "CLOSED-G12")]
    ClosedG12,
    /// ₃F₂ at λ=1 equals its two-term closed form.
    #[serde(rename = "CLOSED-G13")]
    ClosedG13,
    /// Argument transformation x ↦ x/(x−1) for ₂F₁.
    #[serde(rename = "PFAFF")]
    Pfaff,
}

const ALL_IDS: [IdentityId; 24] = [
    IdentityId::P1KummerExp,
    IdentityId::P2Square,
    IdentityId::P6Euler,
    IdentityId::P9Ramanujan,
    IdentityId::ThmB3a,
    IdentityId::ThmB3b,
    IdentityId::ThmB4,
    IdentityId::CorB5,
    IdentityId::CorB7,
    IdentityId::CorB8,
    IdentityId::CorB10,
    IdentityId::CorB11a,
    IdentityId::CorB11b,
    IdentityId::ThmB12,
    IdentityId::ThmF4Product,
    IdentityId::CorB14,
    IdentityId::LemF4Diag,
    IdentityId::StructG8,
    IdentityId::StructG9,
    IdentityId::StructG10,
    IdentityId::ClosedG11,
    IdentityId::ClosedG12,
    IdentityId::ClosedG13,
    IdentityId::Pfaff,
];

const ALL_NAMES: [&str; 24] = [
    "P1-KUMMER-EXP",
    "P2-SQUARE",
    "P6-EULER",
    "P9-RAMANUJAN",
    "THM-B3a",
    "THM-B3b",
    "THM-B4",
    "COR-B5",
    "COR-B7",
    "COR-B8",
    "COR-B10",
    "COR-B11a",
    "COR-B11b",
    "THM-B12",
    "THM-F4-PRODUCT",
    "COR-B14",
    "LEM-F4-DIAG",
    "STRUCT-G8",
    "STRUCT-G9",
    "STRUCT-G10",
    "CLOSED-G11",
    "CLOSED-G12",
    "CLOSED-G13",
    "PFAFF",
];

impl IdentityId {
    /// Every catalog identity, in canonical order.
    pub fn all() -> &'static [IdentityId; 24] {
        &ALL_IDS
    }

    /// Position in the canonical order; also the per-identity seed component.
    pub fn ordinal(self) -> usize {
        ALL_IDS.iter().position(|&x| x == self).unwrap()
    }

    /// Canonical display name.
    pub fn name(self) -> &'static str {
        ALL_NAMES[self.ordinal()]
    }
}

impl fmt::Display for IdentityId {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

impl FromStr for IdentityId {
    type Err = String;

    fn from_str(s: &str) -> Result<IdentityId, String> {
        ALL_NAMES
            .iter()
            .position(|n| n.eq_ignore_ascii_case(s))
            .map(|i| ALL_IDS[i])
            .ok_or_else(|| format!("unknown identity `{s}`"))
    }
}

/// Catalog metadata for one identity.
#[derive(Debug, Clone, Copy)]
pub struct CatalogEntry {
    /// The identity tag.
    pub id: IdentityId,
    /// Free character indices per tuple; None for sampled parameter-set entries.
    pub arity: Option<usize>,
    /// One-line statement of what is checked.
    pub description: &'static str,
}

/// Metadata for the full catalog, in canonical order.
pub fn catalog() -> Vec<CatalogEntry> {
    ALL_IDS
        .iter()
        .map(|&id| CatalogEntry {
            id,
            arity: arity(id),
            description: match id {
                IdentityId::P1KummerExp => "ψ(λ)·₁F₁(α;β;λ) = ₁F₁(ᾱβ;β;−λ) for α ∉ {ε,β}",
                IdentityId::P2Square => "ψ(λ/2)·₁F₁(α;α²;λ) = ₀F₁(;αφ;λ²/16) for α ≠ ε",
                IdentityId::P6Euler => {
                    "αβγ̄(1−λ)·₂F₁(α,β;γ;λ) = ₂F₁(ᾱγ,β̄γ;γ;λ) for λ ≠ 1"
                }
                IdentityId::P9Ramanujan => {
                    "₁F₁(α;β²;λ)·₁F₁(α;β²;−λ) = ₂F₃(α,ᾱβ²;β²,β,βφ;λ²/4)"
                }
                IdentityId::ThmB3a => "₀F₁(;α²;λ)·₀F₁(;β²;λ) = ₂F₃(αβ,αβφ;α²,β²,α²β²;4λ)",
                IdentityId::ThmB3b => {
                    "₀F₁(;α²φ;λ)·₀F₁(;β²φ;λ) = ₂F₃(αβ,αβφ;α²φ,β²φ,α²β²;4λ)"
                }
                IdentityId::ThmB4 => "₀F₁(;α²;λ)·₀F₁(;α²;−λ) = ₀F₃(;α²,α,αφ;−λ²/4)",
                IdentityId::CorB5 => {
                    "₀F₁(;α²;λ)·₀F₁(;ᾱ²;−λ) = q^{δ(α)}·₀F₃(;φ,αφ,ᾱφ;−λ²/4)"
                }
                IdentityId::CorB7 => {
                    "₂F₀(α²,β²;λ)·₂F₀(α²,β²;−λ) = ₄F₁(α²,β²,αβ,αβφ;α²β²;4λ²)"
                }
                IdentityId::CorB8 => {
                    "₂F₀(α²,ᾱ²;λ)·₂F₀(β²,β̄²;−λ) = ₄F₁(αβ̄φ,ᾱβφ,αβ,ᾱβ̄;φ;4λ²)"
                }
                IdentityId::CorB10 => {
                    "₁F₁(α;β²;λ)·₁F₁(αβ̄²;β̄²;−λ) = ₂F₃(αβ̄φ,ᾱβφ;φ,βφ,β̄φ;λ²/4)"
                }
                IdentityId::CorB11a => {
                    "₁F₁(α²;α⁴;λ)·₁F₁(β²;β⁴;−λ) = ₂F₃(αβ,αβφ;α²φ,β²φ,α²β²;λ²/4)"
                }
                IdentityId::CorB11b => {
                    "₁F₁(α²φ;α⁴;λ)·₁F₁(β²φ;β⁴;−λ) = ₂F₃(αβ,αβφ;α²,β²,α²β²;λ²/4)"
                }
                IdentityId::ThmB12 => {
                    "₀F₂(;α⁶,β⁶;λ)·₀F₂(;α⁶,β⁶;−λ) = ₃F₈(−27λ²/64) for 6 | q−1"
                }
                IdentityId::ThmF4Product => {
                    "₂F₁(γ;x/(x−1))·₂F₁(γ′;y/(y−1)) − δ(1−xy)·C = F₄(γ,γ′;·,·)"
                }
                IdentityId::CorB14 => {
                    "₂F₁(γ;λ)·₂F₁(γ′;λ) − δ(1−2λ)·C = ₄F₃(4λ(1−λ)) + δ(1−λ)"
                }
                IdentityId::LemF4Diag => {
                    "F₄(α²,β²;γ,γ′;x,x) = ₄F₃(α²,β²,αβ,αβφ;α²β²,γ,γ′;4x)"
                }
                IdentityId::StructG8 => {
                    "F(α,β;λ) = (α)_φ/(β)°_φ·φ(λ)·F(αφ,βφ;λ) on sampled parameter sets"
                }
                IdentityId::StructG9 => {
                    "F(β,α;λ) = F(ᾱ,β̄;(−1)^{deg}·λ⁻¹) on sampled parameter sets"
                }
                IdentityId::StructG10 => {
                    "F(α+γ,β+γ;λ) = q^{(γ,ε)}·(F(α,β;λ) + correction sum)"
                }
                IdentityId::ClosedG11 => "₂F₁(α,β;γ;1) equals its Gauss-sum closed form",
                IdentityId::ClosedG12 => "₂F₁(α²,β;α²β̄;−1) equals its two-term closed form",
                IdentityId::ClosedG13 => {
                    "₃F₂(α²,β,γ;α²β̄,α²γ̄;1) equals its two-term closed form"
                }
                IdentityId::Pfaff => {
                    "₂F₁(α,β̄γ;γ;x) = ᾱ(1−x)·₂F₁(α,β;γ;x/(x−1)) for β ∉ {ε,γ}"
                }
            },
        })
        .collect()
}

/// Free character indices per tuple; None for sampled parameter-set entries.
fn arity(id: IdentityId) -> Option<usize> {
    use IdentityId::*;
    match id {
        P2Square | ThmB4 | CorB5 => Some(1),
        P1KummerExp | P9Ramanujan | ThmB3a | ThmB3b | CorB7 | CorB8 | CorB10 | CorB11a
        | CorB11b | ThmB12 | ClosedG12 => Some(2),
        P6Euler | ThmF4Product | CorB14 | LemF4Diag | ClosedG11 | ClosedG13 | Pfaff => Some(3),
        StructG8 | StructG9 | StructG10 => None,
    }
}

/// Field-level precondition failure, if any.
fn field_skip_reason(id: IdentityId, field: &FiniteField) -> Option<String> {
    use IdentityId::*;
    let odd_only = matches!(
        id,
        P2Square
            | P9Ramanujan
            | ThmB3a
            | ThmB3b
            | ThmB4
            | CorB5
            | CorB7
            | CorB8
            | CorB10
            | CorB11a
            | CorB11b
            | CorB14
            | LemF4Diag
            | ClosedG12
            | ClosedG13
    );
    if odd_only && field.p() == 2 {
        return Some("p = 2".to_string());
    }
    if id == ThmB12 && (field.q() - 1) % 6 != 0 {
        return Some("6 ∤ q−1".to_string());
    }
    None
}

/// The hypothesis predicate of one identity, on a raw index tuple.
///
/// Assumes the field passes the identity's precondition (odd characteristic,
/// divisibility); tuples are character indices in `0..q−1`. For the sampled
/// structural identities this is a well-formedness check on the shape header.
pub fn hypothesis(id: IdentityId, field: &FiniteField, tuple: &[u64]) -> bool {
    use IdentityId::*;
    let q1 = (field.q() - 1) as u64;
    let q1i = q1 as i64;
    let h = (q1 / 2) as i64;
    let r = |k: i64| k.rem_euclid(q1i) as u64;
    if let Some(n) = arity(id) {
        if tuple.len() != n || tuple.iter().any(|&x| x >= q1) {
            return false;
        }
    }
    let v = |i: usize| tuple[i] as i64;
    match id {
        P1KummerExp => tuple[0] != 0 && tuple[0] != tuple[1],
        P2Square => tuple[0] != 0,
        P6Euler => {
            tuple[0] != 0 && tuple[1] != 0 && tuple[0] != tuple[2] && tuple[1] != tuple[2]
        }
        P9Ramanujan => {
            let (a, b) = (v(0), v(1));
            r(a) != 0 && r(a - b) != 0 && r(a - b - h) != 0 && r(a - 2 * b) != 0
        }
        ThmB3a | ThmB3b => {
            let (a, b) = (v(0), v(1));
            r(2 * a - 2 * b) != 0 && r(2 * a + 2 * b) != 0
        }
        ThmB4 | CorB5 => true,
        CorB7 => {
            let (a, b) = (v(0), v(1));
            r(2 * a) != 0 && r(2 * b) != 0 && r(2 * a + 2 * b) != 0
        }
        CorB8 | CorB11a => {
            let (a, b) = (v(0), v(1));
            r(2 * a) != 0 && r(2 * b) != 0 && r(2 * a + 2 * b) != 0 && r(2 * a - 2 * b) != 0
        }
        CorB10 => {
            // β ≠ ε is required on top of the square conditions: the b = 0
            // instances are off by exactly q (see the sharpness test below).
            let (a, b) = (v(0), v(1));
            tuple[1] != 0 && r(a) != 0 && r(a - 2 * b) != 0 && r(2 * a - 2 * b) != 0
        }
        CorB11b => {
            let (a, b) = (v(0), v(1));
            r(2 * a + h) != 0
                && r(2 * b + h) != 0
                && r(2 * a + 2 * b) != 0
                && r(2 * a - 2 * b) != 0
        }
        ThmB12 => {
            let (a, b) = (v(0), v(1));
            r(6 * a - 12 * b) != 0 && r(12 * a - 6 * b) != 0 && r(6 * a + 6 * b) != 0
        }
        ThmF4Product => {
            tuple[0] != 0 && tuple[1] != 0 && tuple[0] != tuple[2] && tuple[1] != tuple[2]
        }
        CorB14 => {
            let (a, b, c) = (v(0), v(1), v(2));
            r(2 * a) != 0
                && r(2 * b) != 0
                && r(2 * a) != r(c)
                && r(2 * b) != r(c)
                && r(2 * a + 2 * b) != 0
                && r(2 * a + 2 * b) != r(2 * c)
        }
        LemF4Diag => {
            let (a, b, c) = (v(0), v(1), v(2));
            r(2 * a + 2 * b) != 0 && r(2 * a + 2 * b) != r(2 * c)
        }
        StructG8 => well_formed_shape(tuple, q1, 2, 1),
        StructG9 => well_formed_shape(tuple, q1, 2, 0),
        StructG10 => well_formed_shape(tuple, q1, 3, 0),
        ClosedG11 | ClosedG12 => true,
        ClosedG13 => {
            let (a, b, c) = (v(0), v(1), v(2));
            let sorted = |x: u64, y: u64| if x <= y { (x, y) } else { (y, x) };
            let bc = sorted(tuple[1], tuple[2]);
            r(2 * a) != r(b + c) && bc != sorted(0, r(a)) && bc != sorted(0, r(a + h))
        }
        Pfaff => tuple[1] != 0 && tuple[1] != tuple[2],
    }
}

/// Checks a sampled-shape tuple: `headers` size fields, then that many
/// indices, plus `extra` trailing indices.
fn well_formed_shape(tuple: &[u64], q1: u64, headers: usize, extra: usize) -> bool {
    if tuple.len() < headers {
        return false;
    }
    let sizes: u64 = tuple[..headers].iter().sum();
    tuple.len() == headers + sizes as usize + extra
        && tuple[headers..].iter().all(|&x| x < q1)
}

/// Admissible parameter tuples for one identity over one field.
#[derive(Debug, Clone)]
pub struct Admissible {
    /// Character-index tuples satisfying the identity's hypotheses.
    pub tuples: Vec<Vec<u64>>,
    /// Set when the field fails a precondition; tuples are then empty.
    pub skip_reason: Option<String>,
}

/// Enumerates the admissible tuples of an identity, in deterministic order.
pub fn enumerate_admissible(id: IdentityId, field: &FiniteField) -> Admissible {
    if let Some(reason) = field_skip_reason(id, field) {
        return Admissible {
            tuples: Vec::new(),
            skip_reason: Some(reason),
        };
    }
    let q1 = (field.q() - 1) as u64;
    let tuples = match arity(id) {
        Some(n) => {
            let mut tuples = Vec::new();
            let mut tuple = vec![0u64; n];
            loop {
                if hypothesis(id, field, &tuple) {
                    tuples.push(tuple.clone());
                }
                let mut i = n;
                loop {
                    if i == 0 {
                        return Admissible {
                            tuples,
                            skip_reason: None,
                        };
                    }
                    i -= 1;
                    tuple[i] += 1;
                    if tuple[i] < q1 {
                        break;
                    }
                    tuple[i] = 0;
                }
            }
        }
        None => sample_shapes(id, q1),
    };
    Admissible {
        tuples,
        skip_reason: None,
    }
}

/// Seeded parameter-set tuples for the structural identities.
fn sample_shapes(id: IdentityId, q1: u64) -> Vec<Vec<u64>> {
    let mut seed = [0u8; 32];
    seed[..8].copy_from_slice(&(id.ordinal() as u64).to_le_bytes());
    seed[8..16].copy_from_slice(&(q1 + 1).to_le_bytes());
    seed[16] = 0x5e;
    let mut rng = ChaCha8Rng::from_seed(seed);
    let pick = |rng: &mut ChaCha8Rng| rand::Rng::gen_range(rng, 0..q1);
    let mut tuples = Vec::with_capacity(STRUCT_SAMPLES);
    for i in 0..STRUCT_SAMPLES {
        let (r, s) = STRUCT_SHAPES[i % STRUCT_SHAPES.len()];
        let mut tu = vec![r as u64, s as u64];
        let mut extra = 0usize;
        if id == IdentityId::StructG10 {
            let t = 1 + (i % 2);
            tu.push(t as u64);
            extra = t;
        }
        let total = r + s + extra + usize::from(id == IdentityId::StructG8);
        for _ in 0..total {
            tu.push(pick(&mut rng));
        }
        tuples.push(tu);
    }
    tuples
}

/// A sample point of an identity's quantifier.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Point {
    /// Single argument λ.
    One(FieldElem),
    /// Argument pair (x, y).
    Two(FieldElem, FieldElem),
}

impl Point {
    fn codes(self) -> Vec<u64> {
        match self {
            Point::One(x) => vec![x.0 as u64],
            Point::Two(x, y) => vec![x.0 as u64, y.0 as u64],
        }
    }
}

fn unary(p: Point) -> FieldElem {
    match p {
        Point::One(x) => x,
        Point::Two(..) => unreachable!("identity quantifies over single points"),
    }
}

fn binary(p: Point) -> (FieldElem, FieldElem) {
    match p {
        Point::Two(x, y) => (x, y),
        Point::One(_) => unreachable!("identity quantifies over point pairs"),
    }
}

/// The point set an identity quantifies over.
fn points_for(id: IdentityId, field: &FiniteField) -> Vec<Point> {
    use IdentityId::*;
    let one = field.one();
    match id {
        P6Euler | Pfaff => field
            .elements()
            .filter(|&x| x != one)
            .map(Point::One)
            .collect(),
        StructG8 | StructG9 => field.units().map(Point::One).collect(),
        ClosedG11 | ClosedG13 => vec![Point::One(one)],
        ClosedG12 => vec![Point::One(field.from_int(-1))],
        ThmF4Product => {
            let xs: Vec<FieldElem> = field.elements().filter(|&x| x != one).collect();
            let mut pts = Vec::with_capacity(xs.len() * xs.len());
            for &x in &xs {
                for &y in &xs {
                    pts.push(Point::Two(x, y));
                }
            }
            pts
        }
        _ => field.elements().map(Point::One).collect(),
    }
}

/// Exact evaluators for one identity instance; the right-hand side may be
/// built from a different (perturbed) tuple than the left.
struct Case {
    lhs: Box<dyn Fn(Point) -> CycloNum + Send + Sync>,
    rhs: Box<dyn Fn(Point) -> CycloNum + Send + Sync>,
}

fn rfs_ev(t: &SumTables, num: &[i64], den: &[i64]) -> HgfEvaluator {
    HgfEvaluator::new(t, &HgfSpec::rfs(t.q1(), num, den))
}

/// Decodes a sampled-shape tuple into (numerator, denominator, trailing).
fn decode_shape(q1: u64, tuple: &[u64], headers: usize) -> (ParamSet, ParamSet, Vec<u64>) {
    let r = tuple[0] as usize;
    let s = tuple[1] as usize;
    let body = &tuple[headers..];
    let num = ParamSet::from_indices(q1, &body[..r].iter().map(|&x| x as i64).collect::<Vec<_>>());
    let den = ParamSet::from_indices(
        q1,
        &body[r..r + s].iter().map(|&x| x as i64).collect::<Vec<_>>(),
    );
    (num, den, body[r + s..].to_vec())
}

/// Builds the two evaluators for one identity instance.
///
/// `lt` parameterizes the left-hand side and `rt` the right-hand side; they
/// are equal except under mutation testing.
fn make_case(id: IdentityId, t: &SumTables, lt: &[u64], rt: &[u64]) -> Case {
    use IdentityId::*;
    let q1 = t.q1();
    let h = (q1 / 2) as i64;
    let f = t.field().clone();
    let one = f.one();
    let li: Vec<i64> = lt.iter().map(|&x| x as i64).collect();
    let ri: Vec<i64> = rt.iter().map(|&x| x as i64).collect();
    match id {
        P1KummerExp => {
            let e1 = rfs_ev(t, &[li[0]], &[li[1]]);
            let psi = t.psi();
            let fl = f.clone();
            let e2 = rfs_ev(t, &[ri[1] - ri[0]], &[ri[1]]);
            let fr = f;
            Case {
                lhs: Box::new(move |p| {
                    let l = unary(p);
                    &psi.eval(&fl, l) * &e1.eval(l)
                }),
                rhs: Box::new(move |p| e2.eval(fr.neg(unary(p)))),
            }
        }
        P2Square => {
            let e1 = rfs_ev(t, &[li[0]], &[2 * li[0]]);
            let psi = t.psi();
            let inv2 = f.inv(f.from_int(2)).unwrap();
            let fl = f.clone();
            let e2 = rfs_ev(t, &[], &[ri[0] + h]);
            let inv16 = f.inv(f.from_int(16)).unwrap();
            let fr = f;
            Case {
                lhs: Box::new(move |p| {
                    let l = unary(p);
                    &psi.eval(&fl, fl.mul(l, inv2)) * &e1.eval(l)
                }),
                rhs: Box::new(move |p| {
                    let l = unary(p);
                    e2.eval(fr.mul(fr.mul(l, l), inv16))
                }),
            }
        }
        P6Euler => {
            let e1 = rfs_ev(t, &[li[0], li[1]], &[li[2]]);
            let ch = t.chi(li[0] + li[1] - li[2]);
            let fl = f.clone();
            let e2 = rfs_ev(t, &[ri[2] - ri[0], ri[2] - ri[1]], &[ri[2]]);
            Case {
                lhs: Box::new(move |p| {
                    let l = unary(p);
                    &ch.eval(&fl, fl.sub(one, l)) * &e1.eval(l)
                }),
                rhs: Box::new(move |p| e2.eval(unary(p))),
            }
        }
        P9Ramanujan => {
            let e1 = rfs_ev(t, &[li[0]], &[2 * li[1]]);
            let fl = f.clone();
            let e2 = rfs_ev(
                t,
                &[ri[0], 2 * ri[1] - ri[0]],
                &[2 * ri[1], ri[1], ri[1] + h],
            );
            let inv4 = f.inv(f.from_int(4)).unwrap();
            let fr = f;
            Case {
                lhs: Box::new(move |p| {
                    let l = unary(p);
                    &e1.eval(l) * &e1.eval(fl.neg(l))
                }),
                rhs: Box::new(move |p| {
                    let l = unary(p);
                    e2.eval(fr.mul(fr.mul(l, l), inv4))
                }),
            }
        }
        ThmB3a | ThmB3b => {
            let shift = if id == ThmB3b { h } else { 0 };
            let e1 = rfs_ev(t, &[], &[2 * li[0] + shift]);
            let e2 = rfs_ev(t, &[], &[2 * li[1] + shift]);
            let e3 = rfs_ev(
                t,
                &[ri[0] + ri[1], ri[0] + ri[1] + h],
                &[2 * ri[0] + shift, 2 * ri[1] + shift, 2 * ri[0] + 2 * ri[1]],
            );
            let four = f.from_int(4);
            let fr = f;
            Case {
                lhs: Box::new(move |p| {
                    let l = unary(p);
                    &e1.eval(l) * &e2.eval(l)
                }),
                rhs: Box::new(move |p| e3.eval(fr.mul(four, unary(p)))),
            }
        }
        ThmB4 => {
            let e1 = rfs_ev(t, &[], &[2 * li[0]]);
            let fl = f.clone();
            let e2 = rfs_ev(t, &[], &[2 * ri[0], ri[0], ri[0] + h]);
            let inv4 = f.inv(f.from_int(4)).unwrap();
            let fr = f;
            Case {
                lhs: Box::new(move |p| {
                    let l = unary(p);
                    &e1.eval(l) * &e1.eval(fl.neg(l))
                }),
                rhs: Box::new(move |p| {
                    let l = unary(p);
                    e2.eval(fr.neg(fr.mul(fr.mul(l, l), inv4)))
                }),
            }
        }
        CorB5 => {
            let e1 = rfs_ev(t, &[], &[2 * li[0]]);
            let e1n = rfs_ev(t, &[], &[-2 * li[0]]);
            let fl = f.clone();
            let e2 = rfs_ev(t, &[], &[h, ri[0] + h, -ri[0] + h]);
            let scale = if rt[0] == 0 { t.q() as i64 } else { 1 };
            let inv4 = f.inv(f.from_int(4)).unwrap();
            let fr = f;
            Case {
                lhs: Box::new(move |p| {
                    let l = unary(p);
                    &e1.eval(l) * &e1n.eval(fl.neg(l))
                }),
                rhs: Box::new(move |p| {
                    let l = unary(p);
                    e2.eval(fr.neg(fr.mul(fr.mul(l, l), inv4))).scale_int(scale)
                }),
            }
        }
        CorB7 => {
            let e1 = rfs_ev(t, &[2 * li[0], 2 * li[1]], &[]);
            let fl = f.clone();
            let e2 = rfs_ev(
                t,
                &[2 * ri[0], 2 * ri[1], ri[0] + ri[1], ri[0] + ri[1] + h],
                &[2 * ri[0] + 2 * ri[1]],
            );
            let four = f.from_int(4);
            let fr = f;
            Case {
                lhs: Box::new(move |p| {
                    let l = unary(p);
                    &e1.eval(l) * &e1.eval(fl.neg(l))
                }),
                rhs: Box::new(move |p| {
                    let l = unary(p);
                    e2.eval(fr.mul(four, fr.mul(l, l)))
                }),
            }
        }
        CorB8 => {
            let e1 = rfs_ev(t, &[2 * li[0], -2 * li[0]], &[]);
            let e1n = rfs_ev(t, &[2 * li[1], -2 * li[1]], &[]);
            let fl = f.clone();
            let e2 = rfs_ev(
                t,
                &[
                    ri[0] - ri[1] + h,
                    ri[1] - ri[0] + h,
                    ri[0] + ri[1],
                    -ri[0] - ri[1],
                ],
                &[h],
            );
            let four = f.from_int(4);
            let fr = f;
            Case {
                lhs: Box::new(move |p| {
                    let l = unary(p);
                    &e1.eval(l) * &e1n.eval(fl.neg(l))
                }),
                rhs: Box::new(move |p| {
                    let l = unary(p);
                    e2.eval(fr.mul(four, fr.mul(l, l)))
                }),
            }
        }
        CorB10 => {
            let e1 = rfs_ev(t, &[li[0]], &[2 * li[1]]);
            let e1n = rfs_ev(t, &[li[0] - 2 * li[1]], &[-2 * li[1]]);
            let fl = f.clone();
            let e2 = rfs_ev(
                t,
                &[ri[0] - ri[1] + h, ri[1] - ri[0] + h],
                &[h, ri[1] + h, -ri[1] + h],
            );
            let inv4 = f.inv(f.from_int(4)).unwrap();
            let fr = f;
            Case {
                lhs: Box::new(move |p| {
                    let l = unary(p);
                    &e1.eval(l) * &e1n.eval(fl.neg(l))
                }),
                rhs: Box::new(move |p| {
                    let l = unary(p);
                    e2.eval(fr.mul(fr.mul(l, l), inv4))
                }),
            }
        }
        CorB11a | CorB11b => {
            let shift = if id == CorB11b { h } else { 0 };
            let e1 = rfs_ev(t, &[2 * li[0] + shift], &[4 * li[0]]);
            let e1n = rfs_ev(t, &[2 * li[1] + shift], &[4 * li[1]]);
            let fl = f.clone();
            // The ₂F₃ denominators carry φ exactly when the ₁F₁ numerators do not.
            let dshift = if id == CorB11b { 0 } else { h };
            let e2 = rfs_ev(
                t,
                &[ri[0] + ri[1], ri[0] + ri[1] + h],
                &[
                    2 * ri[0] + dshift,
                    2 * ri[1] + dshift,
                    2 * ri[0] + 2 * ri[1],
                ],
            );
            let inv4 = f.inv(f.from_int(4)).unwrap();
            let fr = f;
            Case {
                lhs: Box::new(move |p| {
                    let l = unary(p);
                    &e1.eval(l) * &e1n.eval(fl.neg(l))
                }),
                rhs: Box::new(move |p| {
                    let l = unary(p);
                    e2.eval(fr.mul(fr.mul(l, l), inv4))
                }),
            }
        }
        ThmB12 => {
            let r3 = (q1 / 3) as i64;
            let e1 = rfs_ev(t, &[], &[6 * li[0], 6 * li[1]]);
            let fl = f.clone();
            let (a, b) = (ri[0], ri[1]);
            let e2 = rfs_ev(
                t,
                &[2 * a + 2 * b, 2 * a + 2 * b + r3, 2 * a + 2 * b + 2 * r3],
                &[
                    6 * a,
                    6 * b,
                    3 * a,
                    3 * a + h,
                    3 * b,
                    3 * b + h,
                    3 * a + 3 * b,
                    3 * a + 3 * b + h,
                ],
            );
            let c27 = f.from_int(-27);
            let inv64 = f.inv(f.from_int(64)).unwrap();
            let fr = f;
            Case {
                lhs: Box::new(move |p| {
                    let l = unary(p);
                    &e1.eval(l) * &e1.eval(fl.neg(l))
                }),
                rhs: Box::new(move |p| {
                    let l = unary(p);
                    e2.eval(fr.mul(c27, fr.mul(fr.mul(l, l), inv64)))
                }),
            }
        }
        ThmF4Product => {
            let (a, b, c) = (li[0], li[1], li[2]);
            let cp = a + b - c;
            let e1 = rfs_ev(t, &[a, b], &[c]);
            let e2 = rfs_ev(t, &[a, b], &[cp]);
            let corr = {
                let g = &(&t.gauss0(t.chi(c)) * &t.gauss0(t.chi(cp)))
                    * &(t.gauss_inverse(t.chi(a)) * t.gauss_inverse(t.chi(b)));
                g.scale_int(t.sign_at_minus_one(t.chi(b - c)))
            };
            let (cb, ca, cbeta) = (t.chi(c - b), t.chi(a), t.chi(b));
            let fl = f.clone();
            let (ra, rb, rc) = (ri[0], ri[1], ri[2]);
            let kernel = AppellKernel::new(
                t,
                t.chi(ra),
                t.chi(rb),
                t.chi(rc),
                t.chi(ra + rb - rc),
            );
            let fr = f;
            Case {
                lhs: Box::new(move |p| {
                    let (x, y) = binary(p);
                    let lx = fl.div(x, fl.sub(x, one)).unwrap();
                    let ly = fl.div(y, fl.sub(y, one)).unwrap();
                    let mut v = &e1.eval(lx) * &e2.eval(ly);
                    if fl.mul(x, y) == one {
                        let d = &(&corr * &cb.eval(&fl, y))
                            * &(&ca.eval(&fl, fl.sub(one, x)) * &cbeta.eval(&fl, fl.sub(one, y)));
                        v = &v - &d;
                    }
                    v
                }),
                rhs: Box::new(move |p| {
                    let (x, y) = binary(p);
                    let u = fr
                        .inv(fr.mul(fr.sub(one, x), fr.sub(one, y)))
                        .unwrap();
                    kernel.eval(fr.neg(fr.mul(x, u)), fr.neg(fr.mul(y, u)))
                }),
            }
        }
        CorB14 => {
            let (a, b, c) = (li[0], li[1], li[2]);
            let cp = 2 * a + 2 * b - c;
            let e1 = rfs_ev(t, &[2 * a, 2 * b], &[c]);
            let e2 = rfs_ev(t, &[2 * a, 2 * b], &[cp]);
            let corr = {
                let g = &(&t.gauss0(t.chi(c)) * &t.gauss0(t.chi(cp)))
                    * &(t.gauss_inverse(t.chi(2 * a)) * t.gauss_inverse(t.chi(2 * b)));
                &g * &t.chi(a + b).eval(&f, f.from_int(4))
            };
            let two = f.from_int(2);
            let fl = f.clone();
            let (ra, rb, rc) = (ri[0], ri[1], ri[2]);
            let e3 = rfs_ev(
                t,
                &[2 * ra, 2 * rb, ra + rb, ra + rb + h],
                &[2 * ra + 2 * rb, rc, 2 * ra + 2 * rb - rc],
            );
            let four = f.from_int(4);
            let fr = f;
            Case {
                lhs: Box::new(move |p| {
                    let l = unary(p);
                    let mut v = &e1.eval(l) * &e2.eval(l);
                    if fl.mul(two, l) == one {
                        v = &v - &corr;
                    }
                    v
                }),
                rhs: Box::new(move |p| {
                    let l = unary(p);
                    let mut v = e3.eval(fr.mul(four, fr.mul(l, fr.sub(one, l))));
                    if l == one {
                        v = &v + &CycloNum::one();
                    }
                    v
                }),
            }
        }
        LemF4Diag => {
            let (a, b, c) = (li[0], li[1], li[2]);
            let kernel = AppellKernel::new(
                t,
                t.chi(2 * a),
                t.chi(2 * b),
                t.chi(c),
                t.chi(2 * a + 2 * b - c),
            );
            let (ra, rb, rc) = (ri[0], ri[1], ri[2]);
            let e2 = rfs_ev(
                t,
                &[2 * ra, 2 * rb, ra + rb, ra + rb + h],
                &[2 * ra + 2 * rb, rc, 2 * ra + 2 * rb - rc],
            );
            let four = f.from_int(4);
            let fr = f;
            Case {
                lhs: Box::new(move |p| {
                    let x = unary(p);
                    kernel.eval(x, x)
                }),
                rhs: Box::new(move |p| e2.eval(fr.mul(four, unary(p)))),
            }
        }
        StructG8 => {
            let (num, den, _) = decode_shape(q1, lt, 2);
            let e1 = HgfEvaluator::new(t, &HgfSpec::new(num, den).unwrap());
            let (rnum, rden, trail) = decode_shape(q1, rt, 2);
            let phi = t.chi(trail[0] as i64);
            let ratio = t
                .pochhammer(&rnum, phi)
                .div(&t.pochhammer0(&rden, phi))
                .unwrap();
            let e2 = HgfEvaluator::new(
                t,
                &HgfSpec::new(rnum.shift(phi).unwrap(), rden.shift(phi).unwrap()).unwrap(),
            );
            let fr = f;
            Case {
                lhs: Box::new(move |p| e1.eval(unary(p))),
                rhs: Box::new(move |p| {
                    let l = unary(p);
                    &(&ratio * &phi.eval(&fr, l)) * &e2.eval(l)
                }),
            }
        }
        StructG9 => {
            let (num, den, _) = decode_shape(q1, lt, 2);
            let e1 = HgfEvaluator::new(t, &HgfSpec::new(den, num).unwrap());
            let (rnum, rden, _) = decode_shape(q1, rt, 2);
            let parity = (rnum.degree() + rden.degree()) % 2;
            let e2 = HgfEvaluator::new(t, &HgfSpec::new(rnum.conj(), rden.conj()).unwrap());
            let fr = f;
            Case {
                lhs: Box::new(move |p| e1.eval(unary(p))),
                rhs: Box::new(move |p| {
                    let inv = fr.inv(unary(p)).unwrap();
                    let arg = if parity == 1 { fr.neg(inv) } else { inv };
                    e2.eval(arg)
                }),
            }
        }
        StructG10 => {
            let (num, den, _) = decode_shape(q1, lt, 3);
            let gammas = ParamSet::from_indices(
                q1,
                &lt[3 + (lt[0] + lt[1]) as usize..]
                    .iter()
                    .map(|&x| x as i64)
                    .collect::<Vec<_>>(),
            );
            let e1 = HgfEvaluator::new(
                t,
                &HgfSpec::new(num.union(&gammas).unwrap(), den.union(&gammas).unwrap()).unwrap(),
            );
            let (rnum, rden, _) = decode_shape(q1, rt, 3);
            let rgammas = ParamSet::from_indices(
                q1,
                &rt[3 + (rt[0] + rt[1]) as usize..]
                    .iter()
                    .map(|&x| x as i64)
                    .collect::<Vec<_>>(),
            );
            let e2 = HgfEvaluator::new(t, &HgfSpec::new(rnum.clone(), rden.clone()).unwrap());
            let q = t.q();
            let qpow = (q as i64).pow(rgammas.eps_multiplicity());
            let terms: Vec<_> = rgammas
                .iter()
                .map(|(nu, m)| {
                    let nub = nu.conj();
                    let qm = BigInt::from(q).pow(m);
                    let coeff = BigRational::new(
                        BigInt::from(q) * (&qm - BigInt::from(1)),
                        qm * BigInt::from(q - 1),
                    );
                    let ratio = t
                        .pochhammer(&rnum, nub)
                        .div(&t.pochhammer0(&rden, nub))
                        .unwrap();
                    (nub, ratio.scale(&coeff))
                })
                .collect();
            let qinv = BigRational::new(BigInt::from(1), BigInt::from(q));
            let fr = f;
            Case {
                lhs: Box::new(move |p| e1.eval(unary(p))),
                rhs: Box::new(move |p| {
                    let l = unary(p);
                    let mut corr = CycloNum::zero();
                    for (nub, w) in &terms {
                        corr = &corr + &(w * &nub.eval(&fr, l));
                    }
                    (&e2.eval(l) + &corr.scale(&qinv)).scale_int(qpow)
                }),
            }
        }
        ClosedG11 => {
            let e1 = rfs_ev(t, &[li[0], li[1]], &[li[2]]);
            let val = euler_gauss_2f1_at_1(t, t.chi(ri[0]), t.chi(ri[1]), t.chi(ri[2]));
            Case {
                lhs: Box::new(move |_| e1.eval(one)),
                rhs: Box::new(move |_| val.clone()),
            }
        }
        ClosedG12 => {
            let e1 = rfs_ev(t, &[2 * li[0], li[1]], &[2 * li[0] - li[1]]);
            let m1 = f.from_int(-1);
            let val = kummer_2f1_at_minus1(t, t.chi(ri[0]), t.chi(ri[1]))
                .expect("odd characteristic is enforced at enumeration");
            Case {
                lhs: Box::new(move |_| e1.eval(m1)),
                rhs: Box::new(move |_| val.clone()),
            }
        }
        ClosedG13 => {
            let e1 = rfs_ev(
                t,
                &[2 * li[0], li[1], li[2]],
                &[2 * li[0] - li[1], 2 * li[0] - li[2]],
            );
            let val = dixon_3f2_at_1(t, t.chi(ri[0]), t.chi(ri[1]), t.chi(ri[2]))
                .expect("enumerated tuples satisfy the hypotheses");
            Case {
                lhs: Box::new(move |_| e1.eval(one)),
                rhs: Box::new(move |_| val.clone()),
            }
        }
        Pfaff => {
            let e1 = rfs_ev(t, &[li[0], li[2] - li[1]], &[li[2]]);
            let e2 = rfs_ev(t, &[ri[0], ri[1]], &[ri[2]]);
            let ca = t.chi(-ri[0]);
            let fr = f;
            Case {
                lhs: Box::new(move |p| e1.eval(unary(p))),
                rhs: Box::new(move |p| {
                    let x = unary(p);
                    let arg = fr.div(x, fr.sub(x, one)).unwrap();
                    &ca.eval(&fr, fr.sub(one, x)) * &e2.eval(arg)
                }),
            }
        }
    }
}

/// Tuple-selection strategy for verification runs.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub enum Mode {
    /// Check every admissible tuple.
    Exhaustive,
    /// Check a seeded uniform sample of tuples (all points each).
    Sample {
        /// Number of tuples to sample.
        n: u64,
        /// User-level sampling seed.
        seed: u64,
    },
    /// Exhaustive when tuples×points stays small, else a default-size sample.
    Auto {
        /// Seed used if sampling is needed.
        seed: u64,
    },
}

/// Field coordinates echoed in reports.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub struct FieldInfo {
    /// Characteristic.
    pub p: u64,
    /// Extension degree.
    pub f: u32,
    /// Field size p^f.
    pub q: u64,
}

impl FieldInfo {
    fn of(field: &FiniteField) -> FieldInfo {
        FieldInfo {
            p: field.p() as u64,
            f: field.f(),
            q: field.q() as u64,
        }
    }
}

/// One exact mismatch: the tuple, the point, and both values.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Failure {
    /// Parameter tuple of the failing instance.
    pub tuple: Vec<u64>,
    /// Element code(s) of the failing point.
    pub lambda: Vec<u64>,
    /// Exact left-hand value.
    pub lhs: CycloNum,
    /// Exact right-hand value.
    pub rhs: CycloNum,
}

/// Result of one (identity, field) verification run.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct VerificationReport {
    /// Which identity was checked.
    pub identity: IdentityId,
    /// Field the run used.
    pub field: FieldInfo,
    /// Admissible tuples found.
    pub tuples_enumerated: u64,
    /// Tuples actually evaluated (less than enumerated only when sampling).
    pub tuples_checked: u64,
    /// Points evaluated per tuple.
    pub lambdas_per_tuple: u64,
    /// Every exact mismatch; empty means the identity held.
    pub failures: Vec<Failure>,
    /// Wall-clock time; callers may zero this for byte-stable output.
    pub elapsed_ms: u64,
    /// Sampling seed, present only when a sample was drawn.
    #[serde(skip_serializing_if = "Option::is_none", default)]
    pub seed: Option<u64>,
    /// Why the field was skipped, if a precondition failed.
    #[serde(skip_serializing_if = "Option::is_none", default)]
    pub skip_reason: Option<String>,
}

impl VerificationReport {
    /// True when no mismatch was found (including skipped/empty runs).
    pub fn passed(&self) -> bool {
        self.failures.is_empty()
    }
}

fn sampling_seed(user: u64, id: IdentityId, q: u64) -> [u8; 32] {
    let mut s = [0u8; 32];
    s[..8].copy_from_slice(&user.to_le_bytes());
    s[8..16].copy_from_slice(&(id.ordinal() as u64).to_le_bytes());
    s[16..24].copy_from_slice(&q.to_le_bytes());
    s[24] = 0xa5;
    s
}

/// Picks tuple indices per the mode; returns the recorded seed when sampled.
fn select_tuples(
    id: IdentityId,
    q: u64,
    n_tuples: usize,
    n_points: usize,
    mode: Mode,
) -> (Vec<usize>, Option<u64>) {
    let exhaustive = || (0..n_tuples).collect::<Vec<_>>();
    let sample = |n: u64, seed: u64| {
        let amount = (n as usize).min(n_tuples);
        let mut rng = ChaCha8Rng::from_seed(sampling_seed(seed, id, q));
        let mut picked = rand::seq::index::sample(&mut rng, n_tuples, amount).into_vec();
        picked.sort_unstable();
        (picked, Some(seed))
    };
    match mode {
        Mode::Exhaustive => (exhaustive(), None),
        Mode::Sample { n, seed } => sample(n, seed),
        Mode::Auto { seed } => {
            if (n_tuples as u64).saturating_mul(n_points as u64) <= AUTO_LIMIT {
                (exhaustive(), None)
            } else {
                sample(DEFAULT_SAMPLE, seed)
            }
        }
    }
}

/// Verifies one identity over the tables' field, evaluating both sides
/// exactly at every admissible (tuple, point) pair per the mode.
pub fn verify(tables: &SumTables, id: IdentityId, mode: Mode) -> VerificationReport {
    let start = Instant::now();
    let field = tables.field();
    let adm = enumerate_admissible(id, field);
    let points = points_for(id, field);
    let mut report = VerificationReport {
        identity: id,
        field: FieldInfo::of(field),
        tuples_enumerated: adm.tuples.len() as u64,
        tuples_checked: 0,
        lambdas_per_tuple: points.len() as u64,
        failures: Vec::new(),
        elapsed_ms: 0,
        seed: None,
        skip_reason: adm.skip_reason,
    };
    if report.skip_reason.is_none() && !adm.tuples.is_empty() {
        let (indices, seed) =
            select_tuples(id, field.q() as u64, adm.tuples.len(), points.len(), mode);
        report.tuples_checked = indices.len() as u64;
        report.seed = seed;
        report.failures = indices
            .par_iter()
            .flat_map_iter(|&i| {
                let tuple = &adm.tuples[i];
                let case = make_case(id, tables, tuple, tuple);
                let mut found = Vec::new();
                for &pt in &points {
                    let lhs = (case.lhs)(pt);
                    let rhs = (case.rhs)(pt);
                    if lhs != rhs {
                        found.push(Failure {
                            tuple: tuple.clone(),
                            lambda: pt.codes(),
                            lhs,
                            rhs,
                        });
                    }
                }
                found
            })
            .collect();
    }
    report.elapsed_ms = start.elapsed().as_millis() as u64;
    report
}

/// Runs the (field × identity) cross product with one table set per field.
pub fn verify_suite(
    fields: &[Arc<FiniteField>],
    ids: &[IdentityId],
    mode: Mode,
) -> Vec<VerificationReport> {
    let mut out = Vec::with_capacity(fields.len() * ids.len());
    for field in fields {
        let tables = SumTables::new(field.clone());
        for &id in ids {
            out.push(verify(&tables, id, mode));
        }
    }
    out
}

/// A single-slot perturbation of the right-hand side's parameter tuple.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct Mutation {
    /// Which admissible tuple to perturb (reduced mod the tuple count).
    pub tuple_index: usize,
    /// Which mutable slot to bump (reduced mod the slot count).
    pub slot: usize,
    /// Index offset to add (normalized to a nonzero value mod q−1).
    pub delta: u64,
}

/// Slots eligible for mutation: everything except shape-header fields.
fn mutable_slots(id: IdentityId, len: usize) -> std::ops::Range<usize> {
    match id {
        IdentityId::StructG8 | IdentityId::StructG9 => 2..len,
        IdentityId::StructG10 => 3..len,
        _ => 0..len,
    }
}

/// Re-verifies one tuple with a perturbed right-hand side.
///
/// The base tuple is admissible; the perturbed tuple need not be, since
/// every right-hand side is total in the parameter indices. The one
/// exception is the ₃F₂ closed form, whose guard clauses make it partial;
/// there the perturbation is nudged forward until the hypothesis holds
/// again. Failures demonstrate the checker is not vacuous.
pub fn verify_mutated(tables: &SumTables, id: IdentityId, mutation: Mutation) -> VerificationReport {
    let start = Instant::now();
    let field = tables.field();
    let adm = enumerate_admissible(id, field);
    let points = points_for(id, field);
    let mut report = VerificationReport {
        identity: id,
        field: FieldInfo::of(field),
        tuples_enumerated: adm.tuples.len() as u64,
        tuples_checked: 0,
        lambdas_per_tuple: points.len() as u64,
        failures: Vec::new(),
        elapsed_ms: 0,
        seed: None,
        skip_reason: adm.skip_reason,
    };
    if report.skip_reason.is_some() || adm.tuples.is_empty() {
        report.elapsed_ms = start.elapsed().as_millis() as u64;
        return report;
    }
    let q1 = (field.q() - 1) as u64;
    let base = &adm.tuples[mutation.tuple_index % adm.tuples.len()];
    let slots = mutable_slots(id, base.len());
    let slot = slots.start + (mutation.slot % slots.len());
    let mut mutated = None;
    for off in 0..q1.saturating_sub(1) {
        let d = 1 + (mutation.delta + off) % (q1 - 1);
        let mut cand = base.clone();
        cand[slot] = (cand[slot] + d) % q1;
        let evaluable = id != IdentityId::ClosedG13 || hypothesis(id, field, &cand);
        if cand != *base && evaluable {
            mutated = Some(cand);
            break;
        }
    }
    let Some(mutated) = mutated else {
        report.skip_reason = Some("no admissible perturbation of this slot".to_string());
        report.elapsed_ms = start.elapsed().as_millis() as u64;
        return report;
    };
    report.tuples_checked = 1;
    let case = make_case(id, tables, base, &mutated);
    for &pt in &points {
        let lhs = (case.lhs)(pt);
        let rhs = (case.rhs)(pt);
        if lhs != rhs {
            report.failures.push(Failure {
                tuple: mutated.clone(),
                lambda: pt.codes(),
                lhs,
                rhs,
            });
        }
    }
    report.elapsed_ms = start.elapsed().as_millis() as u64;
    report
}

#[cfg(test)]
mod tests {
    use super::*;

    fn tables(q: u64) -> SumTables {
        SumTables::new(Arc::new(FiniteField::from_order(q).unwrap()))
    }

    #[test]
    fn identity_names_roundtrip() {
        assert_eq!(IdentityId::all().len(), 24);
        for &id in IdentityId::all() {
            assert_eq!(id.to_string().parse::<IdentityId>().unwrap(), id);
            let json = serde_json::to_string(&id).unwrap();
            assert_eq!(json, format!("\"{id}\""));
            assert_eq!(serde_json::from_str::<IdentityId>(&json).unwrap(), id);
        }
        assert_eq!(
            "thm-b3a".parse::<IdentityId>().unwrap(),
            IdentityId::ThmB3a
        );
        assert!("THM-B99".parse::<IdentityId>().is_err());
        assert_eq!(catalog().len(), 24);
    }

    #[test]
    fn enumeration_counts_and_skips() {
        let f3 = FiniteField::from_order(3).unwrap();
        let adm = enumerate_admissible(IdentityId::ThmB3a, &f3);
        assert!(adm.tuples.is_empty() && adm.skip_reason.is_none());

        let f5 = FiniteField::from_order(5).unwrap();
        let adm = enumerate_admissible(IdentityId::ThmB3a, &f5);
        assert_eq!(adm.tuples.len(), 8);

        let adm = enumerate_admissible(IdentityId::ThmB12, &f5);
        assert!(adm.tuples.is_empty());
        assert_eq!(adm.skip_reason.as_deref(), Some("6 ∤ q−1"));

        let f4 = FiniteField::from_order(4).unwrap();
        let adm = enumerate_admissible(IdentityId::ThmB4, &f4);
        assert_eq!(adm.skip_reason.as_deref(), Some("p = 2"));

        // 6 | q−1 holds at q = 7, but the index congruences leave nothing:
        // α⁶ and β¹² are both trivial, so the hypothesis is never met.
        let f7 = FiniteField::from_order(7).unwrap();
        let adm = enumerate_admissible(IdentityId::ThmB12, &f7);
        assert!(adm.skip_reason.is_none() && adm.tuples.is_empty());

        let f25 = FiniteField::from_order(25).unwrap();
        let adm = enumerate_admissible(IdentityId::ThmB12, &f25);
        assert!(adm.skip_reason.is_none());
        assert_eq!(adm.tuples.len(), 216);
    }

    #[test]
    fn enumeration_matches_hypothesis_complement() {
        let field = FiniteField::from_order(5).unwrap();
        let q1 = 4u64;
        for id in [
            IdentityId::P6Euler,
            IdentityId::CorB10,
            IdentityId::ClosedG13,
            IdentityId::Pfaff,
            IdentityId::CorB14,
            IdentityId::P9Ramanujan,
        ] {
            let listed: std::collections::HashSet<Vec<u64>> =
                enumerate_admissible(id, &field).tuples.into_iter().collect();
            let n = arity(id).unwrap();
            let mut tuple = vec![0u64; n];
            'tuples: loop {
                assert_eq!(
                    hypothesis(id, &field, &tuple),
                    listed.contains(&tuple),
                    "{id} {tuple:?}"
                );
                let mut i = n;
                loop {
                    if i == 0 {
                        break 'tuples;
                    }
                    i -= 1;
                    tuple[i] += 1;
                    if tuple[i] < q1 {
                        break;
                    }
                    tuple[i] = 0;
                }
            }
        }
    }

    #[test]
    fn sampled_shapes_are_deterministic_and_well_formed() {
        let field = FiniteField::from_order(7).unwrap();
        for id in [
            IdentityId::StructG8,
            IdentityId::StructG9,
            IdentityId::StructG10,
        ] {
            let a = enumerate_admissible(id, &field);
            let b = enumerate_admissible(id, &field);
            assert_eq!(a.tuples, b.tuples);
            assert_eq!(a.tuples.len(), STRUCT_SAMPLES);
            for tu in &a.tuples {
                assert!(hypothesis(id, &field, tu), "{id} {tu:?}");
            }
        }
    }

    #[test]
    fn small_field_products_pass_exhaustively() {
        let t = tables(5);
        for id in [
            IdentityId::P1KummerExp,
            IdentityId::P2Square,
            IdentityId::P6Euler,
            IdentityId::P9Ramanujan,
            IdentityId::ThmB3a,
            IdentityId::ThmB3b,
            IdentityId::ThmB4,
            IdentityId::CorB5,
            IdentityId::CorB10,
        ] {
            let report = verify(&t, id, Mode::Exhaustive);
            assert!(
                report.passed(),
                "{id}: {} failures, first: {:?}",
                report.failures.len(),
                report.failures.first()
            );
        }
    }

    #[test]
    fn closed_forms_pass_exhaustively() {
        let t = tables(7);
        for id in [
            IdentityId::ClosedG11,
            IdentityId::ClosedG12,
            IdentityId::ClosedG13,
        ] {
            let report = verify(&t, id, Mode::Exhaustive);
            assert!(report.passed(), "{id}: {:?}", report.failures.first());
            assert!(report.tuples_checked > 0);
            assert_eq!(report.lambdas_per_tuple, 1);
        }
    }

    #[test]
    fn two_variable_suite_passes_on_gf5() {
        let t = tables(5);
        for id in [
            IdentityId::ThmF4Product,
            IdentityId::LemF4Diag,
            IdentityId::Pfaff,
        ] {
            let report = verify(&t, id, Mode::Exhaustive);
            assert!(report.passed(), "{id}: {:?}", report.failures.first());
            assert!(report.tuples_checked > 0, "{id} enumerated nothing");
        }
        // The ₂F₁ square-product needs q1 ∤ 2(a+b); its enumeration is empty
        // below q = 7.
        let adm = enumerate_admissible(IdentityId::CorB14, t.field());
        assert!(adm.tuples.is_empty() && adm.skip_reason.is_none());
        let t7 = tables(7);
        let report = verify(&t7, IdentityId::CorB14, Mode::Exhaustive);
        assert!(report.passed(), "{:?}", report.failures.first());
        assert!(report.tuples_checked > 0);
    }

    #[test]
    fn structural_identities_pass_on_small_fields() {
        for q in [4, 5] {
            let t = tables(q);
            for id in [
                IdentityId::StructG8,
                IdentityId::StructG9,
                IdentityId::StructG10,
            ] {
                let report = verify(&t, id, Mode::Exhaustive);
                assert!(report.passed(), "q={q} {id}: {:?}", report.failures.first());
                assert_eq!(report.tuples_checked, STRUCT_SAMPLES as u64);
            }
        }
    }

    #[test]
    fn sampling_is_reproducible() {
        let t = tables(7);
        let mode = Mode::Sample { n: 5, seed: 42 };
        let a = verify(&t, IdentityId::P6Euler, mode);
        let b = verify(&t, IdentityId::P6Euler, mode);
        assert_eq!(a.tuples_checked, 5);
        assert_eq!(a.seed, Some(42));
        let mut a = a;
        let mut b = b;
        a.elapsed_ms = 0;
        b.elapsed_ms = 0;
        assert_eq!(
            serde_json::to_string(&a).unwrap(),
            serde_json::to_string(&b).unwrap()
        );
    }

    #[test]
    fn auto_mode_is_exhaustive_at_small_sizes() {
        let t = tables(5);
        let report = verify(&t, IdentityId::P6Euler, Mode::Auto { seed: 42 });
        assert_eq!(report.tuples_checked, report.tuples_enumerated);
        assert_eq!(report.seed, None);
    }

    #[test]
    fn mutations_surface_failures() {
        let t = tables(7);
        for id in [
            IdentityId::P6Euler,
            IdentityId::ThmB3a,
            IdentityId::ClosedG11,
            IdentityId::Pfaff,
            IdentityId::CorB7,
        ] {
            let mut found = false;
            'search: for slot in 0..3 {
                for delta in 0..6 {
                    let report = verify_mutated(
                        &t,
                        id,
                        Mutation {
                            tuple_index: 1,
                            slot,
                            delta,
                        },
                    );
                    if !report.passed() {
                        found = true;
                        break 'search;
                    }
                }
            }
            assert!(found, "{id}: no perturbation produced a failure");
        }
    }

    #[test]
    fn report_serialization_roundtrips() {
        let t = tables(5);
        let report = verify(&t, IdentityId::ClosedG11, Mode::Exhaustive);
        let json = serde_json::to_string(&report).unwrap();
        let back: VerificationReport = serde_json::from_str(&json).unwrap();
        assert_eq!(back, report);
        assert!(json.contains("\"identity\":\"CLOSED-G11\""));
    }

    #[test]
    fn suite_runs_cross_product() {
        let fields: Vec<Arc<FiniteField>> = [3u64, 4]
            .iter()
            .map(|&q| Arc::new(FiniteField::from_order(q).unwrap()))
            .collect();
        let ids = [IdentityId::ClosedG11, IdentityId::ThmB4];
        let reports = verify_suite(&fields, &ids, Mode::Exhaustive);
        assert_eq!(reports.len(), 4);
        assert!(reports.iter().all(|r| r.passed()));
        assert_eq!(reports[1].skip_reason, None);
        assert_eq!(reports[3].skip_reason.as_deref(), Some("p = 2"));
        assert!(verify_suite(&fields, &[], Mode::Exhaustive).is_empty());
    }
}


#[cfg(test)]
mod catalog_sweep {
    use super::*;

    fn tables(q: u64) -> SumTables {
        SumTables::new(Arc::new(FiniteField::from_order(q).unwrap()))
    }

    /// Full catalog, exhaustive, over one even and two odd mid-size fields.
    #[test]
    fn every_identity_passes_exhaustively_midsize() {
        for q in [7u64, 8, 9] {
            let t = tables(q);
            for &id in IdentityId::all() {
                let r = verify(&t, id, Mode::Exhaustive);
                assert!(
                    r.passed(),
                    "q={q} {id}: {} failures, first {:?}",
                    r.failures.len(),
                    r.failures.first()
                );
            }
        }
    }

    /// The β ≠ ε condition on the ₁F₁×₁F₁ product is sharp: with β = ε the
    /// two sides differ by exactly a factor of q, while β = φ (the other
    /// square root of ε) still satisfies the identity.
    #[test]
    fn b10_beta_condition_is_sharp() {
        for q in [5u64, 9] {
            let t = tables(q);
            let f = t.field().clone();
            let q1 = q - 1;
            let mut dropped_fail = 0u64;
            let mut dropped_pass = 0u64;
            for a in 0..q1 {
                for b in 0..q1 {
                    let tu = [a, b];
                    let squares_ok =
                        a != 0 && a != (2 * b) % q1 && (2 * a) % q1 != (2 * b) % q1;
                    if !squares_ok || hypothesis(IdentityId::CorB10, &f, &tu) {
                        continue;
                    }
                    // Dropped tuples are exactly those with b = 0.
                    assert_eq!(b, 0, "q={q}: unexpected dropped tuple ({a},{b})");
                    let case = make_case(IdentityId::CorB10, &t, &tu, &tu);
                    let mut saw_fail = false;
                    for l in f.elements() {
                        let lhs = (case.lhs)(Point::One(l));
                        let rhs = (case.rhs)(Point::One(l));
                        if lhs != rhs {
                            saw_fail = true;
                            assert_eq!(lhs, rhs.scale_int(q as i64), "q={q} ({a},{b})");
                        }
                    }
                    if saw_fail {
                        dropped_fail += 1;
                    } else {
                        dropped_pass += 1;
                    }
                }
            }
            assert!(dropped_fail > 0, "q={q}: the restriction was vacuous");
            assert_eq!(dropped_pass, 0, "q={q}: over-restricted tuples");
        }
    }
}
