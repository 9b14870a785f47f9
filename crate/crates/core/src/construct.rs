//! Permutation polynomials `x^{n+m(q+1)}·H_n(x^{q-1}, α)` and
//! `x^{n+m(q+1)}·G_n(x^{q-1}, α)` over `F_{q^2}`: construction, the gcd
//! criterion deciding bijectivity, the unit-circle reduction, exhaustive
//! verification and the binomial/trinomial families.

use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::field::{Felt, FieldCtx};
use crate::intmath::gcd;
use crate::par::{self, Exec};
use crate::poly::{reduce_exponent_vanishing, Poly, PolyRing};
use crate::redei::{gh_coeffs, gh_eval, RedeiError};

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum ConstructError {
    #[error("n must be positive")]
    ZeroN,
    #[error("alpha is not a (q+1)-th root of unity")]
    AlphaNotInMu,
    #[error("the {family} family needs {prime} to not divide q (p = {p})")]
    Characteristic {
        family: &'static str,
        prime: u64,
        p: u64,
    },
    #[error(transparent)]
    Redei(#[from] RedeiError),
}

/// Which Rédei component sits inside the construction.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub enum Variant {
    H,
    G,
}

impl std::str::FromStr for Variant {
    type Err = String;
    fn from_str(s: &str) -> Result<Self, Self::Err> {
        match s {
            "H" | "h" => Ok(Variant::H),
            "G" | "g" => Ok(Variant::G),
            other => Err(format!("unknown variant {other:?}, expected H or G")),
        }
    }
}

/// A construction request `P(x) = x^{n+m(q+1)}·F_n(x^{q-1}, α)` with
/// `F = H` or `G`.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct PermSpec {
    pub variant: Variant,
    pub n: u64,
    pub m: i64,
    pub alpha: Felt,
}

impl PermSpec {
    pub fn new(
        ctx: &FieldCtx,
        variant: Variant,
        n: u64,
        m: i64,
        alpha: Felt,
    ) -> Result<Self, ConstructError> {
        let spec = PermSpec {
            variant,
            n,
            m,
            alpha,
        };
        spec.validate(ctx)?;
        Ok(spec)
    }

    /// `α = γ^{l(q-1)}`.
    pub fn from_l(
        ctx: &FieldCtx,
        variant: Variant,
        n: u64,
        m: i64,
        l: i64,
    ) -> Result<Self, ConstructError> {
        Self::new(ctx, variant, n, m, ctx.alpha_from_l(l))
    }

    pub fn validate(&self, ctx: &FieldCtx) -> Result<(), ConstructError> {
        if self.n == 0 {
            return Err(ConstructError::ZeroN);
        }
        if !ctx.in_mu_q1(self.alpha) {
            return Err(ConstructError::AlphaNotInMu);
        }
        Ok(())
    }

    /// The integer exponent `r = n + m(q+1)`, un-normalised.
    pub fn exponent(&self, ctx: &FieldCtx) -> i128 {
        self.n as i128 + self.m as i128 * (ctx.q() as i128 + 1)
    }

    /// `r` moved into `[1, q^2 - 1]`; same map on `F_{q^2}`.
    pub fn reduced_exponent(&self, ctx: &FieldCtx) -> u64 {
        reduce_exponent_vanishing(ctx, self.exponent(ctx))
    }

    /// `F_n(y, α)` for the chosen component.
    pub fn component_eval(&self, ctx: &FieldCtx, y: Felt) -> Felt {
        component_eval(ctx, self.variant, self.n, self.alpha, y)
    }

    /// `P(x)` evaluated directly through the Rédei ladder.
    pub fn eval(&self, ctx: &FieldCtx, x: Felt) -> Felt {
        if x.is_zero() {
            return Felt::ZERO;
        }
        let y = ctx.pow(x, ctx.q() - 1);
        ctx.mul(
            ctx.pow(x, self.reduced_exponent(ctx)),
            self.component_eval(ctx, y),
        )
    }

    /// The unit-circle map `x ↦ x^r·F_n(x, α)^{q-1}` (equal to
    /// `x^n·F_n(x, α)^{q-1}` on `μ_{q+1}`).
    pub fn mu_map(&self, ctx: &FieldCtx, x: Felt) -> Felt {
        let f = self.component_eval(ctx, x);
        ctx.mul(
            ctx.pow(x, self.reduced_exponent(ctx)),
            ctx.pow(f, ctx.q() - 1),
        )
    }
}

pub(crate) fn component_eval(
    ctx: &FieldCtx,
    variant: Variant,
    n: u64,
    alpha: Felt,
    y: Felt,
) -> Felt {
    let (g, h) = gh_eval(ctx, n, alpha, y);
    match variant {
        Variant::G => g,
        Variant::H => h,
    }
}

/// Whether `√α` lies on the unit circle `μ_{q+1}`.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum SqrtCase {
    SqrtInMu,
    SqrtNotInMu,
}

/// For `α ∈ μ_{q+1}`; membership is the same for both roots.
pub fn sqrt_case(ctx: &FieldCtx, alpha: Felt) -> SqrtCase {
    let root = ctx
        .sqrt_canonical(alpha)
        .expect("elements of the unit circle are squares");
    if ctx.in_mu_q1(root) {
        SqrtCase::SqrtInMu
    } else {
        SqrtCase::SqrtNotInMu
    }
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct Condition {
    pub name: String,
    pub gcd: u64,
    pub pass: bool,
}

impl Condition {
    fn coprime(name: &str, a: i128, b: i128) -> Self {
        let g = gcd(a, b) as u64;
        Condition {
            name: name.to_string(),
            gcd: g,
            pass: g == 1,
        }
    }
}

/// Outcome of the gcd criterion; `is_perm` holds iff every condition passes.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct PermVerdict {
    pub is_perm: bool,
    pub case: SqrtCase,
    pub conditions: Vec<Condition>,
}

/// Decides bijectivity of `x^{n+m(q+1)}·F_n(x^{q-1}, α)` on `F_{q^2}`:
///
/// * `√α ∈ μ_{q+1}`: `gcd(n(n+2m), q-1) = 1`;
/// * `√α ∉ μ_{q+1}`: `gcd(n+2m, q-1) = 1` and `gcd(n, q+1) = 1`.
///
/// The same test applies to both variants. Even `n` needs no special case:
/// `n + 2m` is then even and `q - 1` is even.
pub fn check_criterion(ctx: &FieldCtx, spec: &PermSpec) -> Result<PermVerdict, ConstructError> {
    spec.validate(ctx)?;
    let (n, m) = (spec.n as i128, spec.m as i128);
    let (qm1, qp1) = (ctx.q() as i128 - 1, ctx.q() as i128 + 1);
    let case = sqrt_case(ctx, spec.alpha);
    let conditions = match case {
        SqrtCase::SqrtInMu => vec![Condition::coprime(
            "gcd(n(n+2m), q-1)",
            n * (n + 2 * m),
            qm1,
        )],
        SqrtCase::SqrtNotInMu => vec![
            Condition::coprime("gcd(n+2m, q-1)", n + 2 * m, qm1),
            Condition::coprime("gcd(n, q+1)", n, qp1),
        ],
    };
    Ok(PermVerdict {
        is_perm: conditions.iter().all(|c| c.pass),
        case,
        conditions,
    })
}

/// Coefficient form of a construction, keeping the raw (un-normalised)
/// exponents next to the reduced polynomial.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct PermPoly {
    pub spec: PermSpec,
    /// `(n + m(q+1) + (q-1)·d, c)` for each term `c·y^d` of `F_n(y, α)`.
    pub raw_terms: Vec<(i128, Felt)>,
    /// Reduced modulo `x^{q^2} - x`.
    pub reduced: Poly,
}

/// Substitutes `x^{q-1}` into the coefficient form of `F_n`, multiplies by
/// `x^{n+m(q+1)}` and reduces.
pub fn build_perm_poly(ctx: &FieldCtx, spec: &PermSpec) -> Result<PermPoly, ConstructError> {
    spec.validate(ctx)?;
    let pair = gh_coeffs(ctx, spec.n, spec.alpha)?;
    let inner = match spec.variant {
        Variant::G => pair.g,
        Variant::H => pair.h,
    };
    let r_raw = spec.exponent(ctx);
    let r = spec.reduced_exponent(ctx) as i128;
    let s = ctx.q() as i128 - 1;
    let raw_terms: Vec<(i128, Felt)> = inner
        .terms()
        .map(|(d, c)| (r_raw + s * d as i128, c))
        .collect();
    let reduced = Poly::from_terms(
        ctx,
        inner
            .terms()
            .map(|(d, c)| (reduce_exponent_vanishing(ctx, r + s * d as i128), c)),
    );
    Ok(PermPoly {
        spec: *spec,
        raw_terms,
        reduced,
    })
}

/// Result of the exhaustive bijectivity test.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct BijectionCheck {
    pub is_perm: bool,
    /// Two distinct inputs with the same image, when not a permutation.
    pub witness: Option<(Felt, Felt)>,
}

/// Value table of `f` over all of `F_{q^2}`, indexed by packed element.
pub fn value_table<F>(ctx: &FieldCtx, exec: Exec, f: F) -> Vec<Felt>
where
    F: Fn(Felt) -> Felt + Sync + Send,
{
    par::map_range(exec, ctx.q2() as usize, |i| f(ctx.element_at(i)))
}

/// Ground truth: evaluate everywhere and look for a collision.
pub fn is_permutation_bruteforce<F>(ctx: &FieldCtx, f: F) -> BijectionCheck
where
    F: Fn(Felt) -> Felt + Sync + Send,
{
    is_permutation_bruteforce_with(ctx, Exec::default(), f)
}

pub fn is_permutation_bruteforce_with<F>(ctx: &FieldCtx, exec: Exec, f: F) -> BijectionCheck
where
    F: Fn(Felt) -> Felt + Sync + Send,
{
    let table = value_table(ctx, exec, f);
    check_table(ctx, &table)
}

/// Collision scan of a value table; the merge step after a partitioned
/// evaluation.
pub fn check_table(ctx: &FieldCtx, table: &[Felt]) -> BijectionCheck {
    const UNSEEN: u32 = u32::MAX;
    let mut first = vec![UNSEEN; ctx.q2() as usize];
    for (i, v) in table.iter().enumerate() {
        let slot = &mut first[v.index()];
        if *slot != UNSEEN {
            return BijectionCheck {
                is_perm: false,
                witness: Some((ctx.element_at(*slot as usize), ctx.element_at(i))),
            };
        }
        *slot = i as u32;
    }
    BijectionCheck {
        is_perm: true,
        witness: None,
    }
}

/// `x^r·f(x^{q-1})` permutes `F_{q^2}` iff `gcd(r, q-1) = 1` and
/// `x ↦ x^r·f(x)^{q-1}` is injective on `μ_{q+1}`; the latter is checked
/// by enumerating powers of `ζ`. A root of `f` on the circle fails the
/// test (a whole coset would map to zero).
pub fn cyclotomic_criterion(ctx: &FieldCtx, r: i128, f: &Poly) -> bool {
    if gcd(r, ctx.q() as i128 - 1) != 1 {
        return false;
    }
    let ring = PolyRing::new(ctx);
    let r = reduce_exponent_vanishing(ctx, r);
    let mut seen = vec![false; ctx.q2() as usize];
    for x in ctx.mu_q1() {
        let fx = ring.eval(f, x);
        if fx.is_zero() {
            return false;
        }
        let v = ctx.mul(ctx.pow(x, r), ctx.pow(fx, ctx.q() - 1));
        if std::mem::replace(&mut seen[v.index()], true) {
            return false;
        }
    }
    true
}

/// The general bijectivity-transfer criterion over explicit finite maps:
/// `f: A → A`, `λ: A → S`, `λ̄: A → S̄`, `f̄: S → S̄` with `|S| = |S̄|`.
/// Requires `λ̄∘f = f̄∘λ` and both `λ`, `λ̄` surjective; returns whether
/// `f̄` is a bijection and `f` is injective on every fibre of `λ`.
pub fn agw_criterion(
    f: &[usize],
    lambda: &[usize],
    lambda_bar: &[usize],
    f_bar: &[usize],
) -> Result<bool, String> {
    let a = f.len();
    let s = f_bar.len();
    if lambda.len() != a || lambda_bar.len() != a {
        return Err("maps on A have mismatched lengths".into());
    }
    let covers = |map: &[usize]| {
        let mut hit = vec![false; s];
        for &v in map {
            if v >= s {
                return false;
            }
            hit[v] = true;
        }
        hit.into_iter().all(|h| h)
    };
    if !covers(lambda) || !covers(lambda_bar) {
        return Err("λ and λ̄ must be surjective onto sets of equal size".into());
    }
    if (0..a).any(|x| f[x] >= a || lambda_bar[f[x]] != f_bar[lambda[x]]) {
        return Err("diagram does not commute".into());
    }
    let mut hit = vec![false; s];
    for &v in f_bar {
        if v >= s || std::mem::replace(&mut hit[v], true) {
            return Ok(false);
        }
    }
    let mut seen = std::collections::HashSet::new();
    Ok((0..a).all(|x| seen.insert((lambda[x], f[x]))))
}

/// Number of `n ∈ [1, range_end]` with `gcd(n(n+2m), q-1) = 1`.
pub fn count_valid_n(q: u64, m: i64, range_end: u64) -> u64 {
    (1..=range_end)
        .filter(|&n| {
            let n = n as i128;
            gcd(n * (n + 2 * m as i128), q as i128 - 1) == 1
        })
        .count() as u64
}

/// Which member of a two-member family: `P1` is built on `G_n`, `P2` on
/// `H_n`.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub enum FamilyMember {
    P1,
    P2,
}

impl FamilyMember {
    pub fn variant(self) -> Variant {
        match self {
            FamilyMember::P1 => Variant::G,
            FamilyMember::P2 => Variant::H,
        }
    }
}

impl std::str::FromStr for FamilyMember {
    type Err = String;
    fn from_str(s: &str) -> Result<Self, Self::Err> {
        match s {
            "P1" | "p1" => Ok(FamilyMember::P1),
            "P2" | "p2" => Ok(FamilyMember::P2),
            other => Err(format!(
                "unknown family member {other:?}, expected P1 or P2"
            )),
        }
    }
}

/// Binomials (`n = 3`) or trinomials (`n = 5`).
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum FamilyKind {
    Binomial,
    Trinomial,
}

impl FamilyKind {
    pub fn n(self) -> u64 {
        match self {
            FamilyKind::Binomial => 3,
            FamilyKind::Trinomial => 5,
        }
    }
}

impl std::str::FromStr for FamilyKind {
    type Err = String;
    fn from_str(s: &str) -> Result<Self, Self::Err> {
        match s {
            "binomial" => Ok(FamilyKind::Binomial),
            "trinomial" => Ok(FamilyKind::Trinomial),
            other => Err(format!(
                "unknown family {other:?}, expected binomial or trinomial"
            )),
        }
    }
}

/// Family polynomials written out term by term, as `(coefficient, power of
/// α, exponent offset)` with exponent `m(q+1) + offset`.
fn family_terms(kind: FamilyKind, member: FamilyMember, q: i128) -> Vec<(i64, u64, i128)> {
    match (kind, member) {
        (FamilyKind::Binomial, FamilyMember::P1) => vec![(1, 0, 3 * q), (3, 1, q + 2)],
        (FamilyKind::Binomial, FamilyMember::P2) => vec![(3, 0, 2 * q + 1), (1, 1, 3)],
        (FamilyKind::Trinomial, FamilyMember::P1) => {
            vec![(1, 0, 5 * q), (10, 1, 3 * q + 2), (5, 2, q + 4)]
        }
        (FamilyKind::Trinomial, FamilyMember::P2) => {
            vec![(5, 0, 4 * q + 1), (10, 1, 2 * q + 3), (1, 2, 5)]
        }
    }
}

/// Family member for given `m` and `α = γ^{l(q-1)}`, reduced modulo
/// `x^{q^2} - x`. Binomials need `3 ∤ q`, trinomials `5 ∤ q`.
pub fn family_poly(
    ctx: &FieldCtx,
    kind: FamilyKind,
    member: FamilyMember,
    m: i64,
    l: i64,
) -> Result<Poly, ConstructError> {
    let banned = kind.n();
    if ctx.p() == banned {
        return Err(ConstructError::Characteristic {
            family: match kind {
                FamilyKind::Binomial => "binomial",
                FamilyKind::Trinomial => "trinomial",
            },
            prime: banned,
            p: ctx.p(),
        });
    }
    let q = ctx.q() as i128;
    let alpha = ctx.alpha_from_l(l);
    let shift = m as i128 * (q + 1);
    Ok(Poly::from_terms(
        ctx,
        family_terms(kind, member, q)
            .into_iter()
            .map(|(c, a_pow, off)| {
                (
                    reduce_exponent_vanishing(ctx, shift + off),
                    ctx.mul(ctx.from_int(c), ctx.pow(alpha, a_pow)),
                )
            }),
    ))
}

pub fn family_binomial(
    ctx: &FieldCtx,
    member: FamilyMember,
    m: i64,
    l: i64,
) -> Result<Poly, ConstructError> {
    family_poly(ctx, FamilyKind::Binomial, member, m, l)
}

pub fn family_trinomial(
    ctx: &FieldCtx,
    member: FamilyMember,
    m: i64,
    l: i64,
) -> Result<Poly, ConstructError> {
    family_poly(ctx, FamilyKind::Trinomial, member, m, l)
}

/// The closed congruence conditions stated for the families, one per
/// specialisation of `m`. Each is meant to agree with [`check_criterion`].
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub enum FamilyCondition {
    /// Binomials, any `m`.
    BinomialAnyM,
    /// Binomials with `m = q - 3`.
    BinomialQMinus3,
    /// Binomials with `m = q - 2`; same congruences as `m = q - 3`.
    BinomialQMinus2,
    BinomialM1,
    /// Binomials with `m = 0`; stated for even `l` only.
    BinomialM0,
    /// Trinomials, any `m`.
    TrinomialAnyM,
    /// Trinomials with `m = q - 4`.
    TrinomialQMinus4,
    /// Trinomials with `m = q - 3`; same congruences as `m = q - 4`.
    TrinomialQMinus3,
    TrinomialM1,
    TrinomialM0,
}

impl FamilyCondition {
    pub const ALL: [FamilyCondition; 10] = [
        FamilyCondition::BinomialAnyM,
        FamilyCondition::BinomialQMinus3,
        FamilyCondition::BinomialQMinus2,
        FamilyCondition::BinomialM1,
        FamilyCondition::BinomialM0,
        FamilyCondition::TrinomialAnyM,
        FamilyCondition::TrinomialQMinus4,
        FamilyCondition::TrinomialQMinus3,
        FamilyCondition::TrinomialM1,
        FamilyCondition::TrinomialM0,
    ];

    pub fn kind(self) -> FamilyKind {
        use FamilyCondition::*;
        match self {
            BinomialAnyM | BinomialQMinus3 | BinomialQMinus2 | BinomialM1 | BinomialM0 => {
                FamilyKind::Binomial
            }
            _ => FamilyKind::Trinomial,
        }
    }

    /// The fixed `m`, or `None` when the condition is stated for every `m`.
    pub fn fixed_m(self, q: u64) -> Option<i64> {
        use FamilyCondition::*;
        let q = q as i64;
        match self {
            BinomialAnyM | TrinomialAnyM => None,
            BinomialQMinus3 | TrinomialQMinus3 => Some(q - 3),
            BinomialQMinus2 => Some(q - 2),
            TrinomialQMinus4 => Some(q - 4),
            BinomialM1 | TrinomialM1 => Some(1),
            BinomialM0 | TrinomialM0 => Some(0),
        }
    }

    /// Predicted permutation status, or `None` where nothing is claimed.
    pub fn predicts(self, q: u64, m: i64, l: i64) -> Option<bool> {
        use FamilyCondition::*;
        if let Some(fixed) = self.fixed_m(q) {
            if fixed != m {
                return None;
            }
        }
        let even = l.rem_euclid(2) == 0;
        let qi = q as i128;
        let m = m as i128;
        let coprime = |a: i128, b: i128| gcd(a, b) == 1;
        let r = |k: u64| q % k;
        Some(match (self, even) {
            (BinomialAnyM, true) => coprime(3 * (2 * m + 3), qi - 1),
            (BinomialAnyM, false) => coprime(2 * m + 3, qi - 1) && coprime(3, qi + 1),
            (BinomialQMinus3 | BinomialQMinus2, true) => r(3) != 1,
            (BinomialQMinus3 | BinomialQMinus2, false) => r(3) != 2,
            (BinomialM1, true) => r(3) != 1 && r(5) != 1,
            (BinomialM1, false) => r(3) != 2 && r(5) != 1,
            (BinomialM0, true) => r(3) != 1,
            (BinomialM0, false) => return None,
            (TrinomialAnyM, true) => coprime(5 * (2 * m + 5), qi - 1),
            (TrinomialAnyM, false) => coprime(2 * m + 5, qi - 1) && coprime(5, qi + 1),
            (TrinomialQMinus4 | TrinomialQMinus3, true) => r(5) != 1,
            (TrinomialQMinus4 | TrinomialQMinus3, false) => r(5) != 4,
            (TrinomialM1, true) => r(5) != 1 && r(7) != 1,
            (TrinomialM1, false) => r(5) != 4 && r(7) != 1,
            (TrinomialM0, true) => r(5) != 1,
            (TrinomialM0, false) => r(5) != 1 && r(5) != 4,
        })
    }
}
