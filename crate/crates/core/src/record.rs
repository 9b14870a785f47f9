//! JSON records for polynomials, verdicts and inverse reports. Field
//! elements are coefficient vectors over `F_p`, constant term first.

use std::collections::BTreeMap;

use serde::{Deserialize, Serialize};

use crate::construct::{FamilyKind, FamilyMember, PermSpec, PermVerdict, Variant};
use crate::field::{Felt, FieldCtx, FieldError};
use crate::poly::Poly;

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct FieldRecord {
    pub p: u64,
    pub k: u32,
    pub q: u64,
    pub modulus: Vec<u64>,
    pub gamma: Vec<u64>,
}

impl FieldRecord {
    pub fn new(ctx: &FieldCtx) -> Self {
        FieldRecord {
            p: ctx.p(),
            k: ctx.k(),
            q: ctx.q(),
            modulus: ctx.modulus(),
            gamma: ctx.coeffs(ctx.gamma()),
        }
    }
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct SpecRecord {
    pub variant: Variant,
    pub n: u64,
    pub m: i64,
    pub l: i64,
    pub alpha: Vec<u64>,
}

impl SpecRecord {
    pub fn new(ctx: &FieldCtx, spec: &PermSpec, l: i64) -> Self {
        SpecRecord {
            variant: spec.variant,
            n: spec.n,
            m: spec.m,
            l,
            alpha: ctx.coeffs(spec.alpha),
        }
    }
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct TermRecord {
    pub exp: u64,
    pub coeff: Vec<u64>,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct PolyRecord {
    pub terms: Vec<TermRecord>,
    pub text: String,
}

impl PolyRecord {
    pub fn new(ctx: &FieldCtx, f: &Poly) -> Self {
        PolyRecord {
            terms: f
                .terms()
                .map(|(exp, c)| TermRecord {
                    exp,
                    coeff: ctx.coeffs(c),
                })
                .collect(),
            text: crate::poly::PolyRing::new(ctx).render(f),
        }
    }

    pub fn to_poly(&self, ctx: &FieldCtx) -> Result<Poly, FieldError> {
        let terms = self
            .terms
            .iter()
            .map(|t| Ok((t.exp, ctx.from_coeffs(&t.coeff)?)))
            .collect::<Result<Vec<(u64, Felt)>, FieldError>>()?;
        Ok(Poly::from_terms(ctx, terms))
    }
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct VerdictRecord {
    #[serde(flatten)]
    pub verdict: PermVerdict,
    /// Exhaustive check, when the field was small enough to run it.
    pub oracle: Option<bool>,
}

/// Agreement of the inverse routes on one spec; digests are SHA-256 of the
/// value tables.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct RouteReport {
    pub spec: SpecRecord,
    pub routes: BTreeMap<String, String>,
    pub agree: bool,
}

/// Output of `construct` and `invert`.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct Record {
    pub field: FieldRecord,
    pub spec: SpecRecord,
    pub poly: PolyRecord,
    /// The product terms before reduction, `(exponent, coefficient)`.
    pub raw: Vec<(i128, Vec<u64>)>,
    pub verdict: VerdictRecord,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub inverse: Option<PolyRecord>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub report: Option<RouteReport>,
}

/// One family member at fixed `(m, l)`.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct FamilyRecord {
    pub field: FieldRecord,
    pub family: FamilyKind,
    pub member: FamilyMember,
    pub m: i64,
    pub l: i64,
    pub poly: PolyRecord,
    pub is_perm: bool,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct CountRow {
    pub q: u64,
    pub m: i64,
    pub valid: u64,
    pub total: u64,
    pub ratio: f64,
}
