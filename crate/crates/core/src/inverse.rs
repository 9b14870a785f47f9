//! Compositional inverses of the constructed permutations, by three
//! independent routes: the cyclotomic double sum, the closed unit-circle
//! inverse lifted to `F_{q^2}`, and plain table inversion.

use serde::{Deserialize, Serialize};
use sha2::{Digest, Sha256};
use thiserror::Error;

use crate::construct::{
    check_criterion, check_table, component_eval, sqrt_case, Condition, ConstructError, PermSpec,
    SqrtCase, Variant,
};
use crate::field::{Felt, FieldCtx};
use crate::intmath::{ext_gcd, gcd, mod_inverse};
use crate::par::{self, Exec};
use crate::poly::{reduce_exponent_vanishing, Poly};

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum InverseError {
    #[error("no Bezout solution: {0}")]
    NoBezout(Condition),
    #[error("not a permutation; failing condition(s): {}", render_conditions(.0))]
    NotPermutation(Vec<Condition>),
    #[error("closed-form inverse not available: {0}")]
    Hypothesis(Condition),
    #[error("not a bijection: {} and {} share an image", .0, .1)]
    NotBijective(String, String),
    #[error("{0} is not on the unit circle")]
    NotInMu(String),
    #[error("closed and rational forms disagree at {0}")]
    FormMismatch(String),
    #[error(transparent)]
    Construct(#[from] ConstructError),
}

fn render_conditions(cs: &[Condition]) -> String {
    cs.iter()
        .filter(|c| !c.pass)
        .map(|c| c.to_string())
        .collect::<Vec<_>>()
        .join(", ")
}

impl std::fmt::Display for Condition {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        write!(f, "{} = {}", self.name, self.gcd)
    }
}

/// Exponent bookkeeping for the inverse formulas, with `r = n + m(q+1)`.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct BezoutData {
    pub r: i128,
    /// `r·r_prime + (q-1)·t = 1`, `0 <= r_prime < q-1`.
    pub r_prime: i128,
    pub t: i128,
    /// `n·n1 ≡ 1 (mod 2(q-1))`.
    pub n1: Option<u64>,
    /// `n·n2 ≡ 1 (mod 2(q+1))`.
    pub n2: Option<u64>,
    /// `r·r_prime_full ≡ 1 (mod q^2-1)`.
    pub r_prime_full: Option<u64>,
}

pub fn bezout(ctx: &FieldCtx, spec: &PermSpec) -> Result<BezoutData, InverseError> {
    let q = ctx.q() as i128;
    let r = spec.exponent(ctx);
    let n = spec.n as i128;
    let (g, _, _) = ext_gcd(r, q - 1);
    if g != 1 {
        return Err(InverseError::NoBezout(Condition {
            name: "gcd(n+m(q+1), q-1)".into(),
            gcd: g.unsigned_abs() as u64,
            pass: false,
        }));
    }
    let r_prime = mod_inverse(r, (q - 1) as u128).unwrap() as i128;
    let t = (1 - r * r_prime) / (q - 1);
    let data = BezoutData {
        r,
        r_prime,
        t,
        n1: mod_inverse(n, 2 * (q - 1) as u128).map(|v| v as u64),
        n2: mod_inverse(n, 2 * (q + 1) as u128).map(|v| v as u64),
        r_prime_full: mod_inverse(r, (q * q - 1) as u128).map(|v| v as u64),
    };
    assert_eq!(r * data.r_prime + (q - 1) * data.t, 1);
    if let Some(v) = data.n1 {
        assert_eq!((n * v as i128).rem_euclid(2 * (q - 1)), 1);
    }
    if let Some(v) = data.n2 {
        assert_eq!((n * v as i128).rem_euclid(2 * (q + 1)), 1);
    }
    if let Some(v) = data.r_prime_full {
        assert_eq!((r * v as i128).rem_euclid(q * q - 1), 1);
    }
    Ok(data)
}

fn require_perm(ctx: &FieldCtx, spec: &PermSpec) -> Result<(), InverseError> {
    let verdict = check_criterion(ctx, spec)?;
    if verdict.is_perm {
        Ok(())
    } else {
        Err(InverseError::NotPermutation(verdict.conditions))
    }
}

/// The inverse as a reduced polynomial, from the cyclotomic double sum
/// `(1/(q+1)) Σ_{i,j} ζ^{t·i - r·i·j} (x/A_i)^{r' + (q-1)j}` with
/// `A_i = F_n(ζ^i, α)`.
pub fn inverse_cyclotomic(ctx: &FieldCtx, spec: &PermSpec) -> Result<Poly, InverseError> {
    inverse_cyclotomic_with(ctx, spec, Exec::default())
}

pub fn inverse_cyclotomic_with(
    ctx: &FieldCtx,
    spec: &PermSpec,
    exec: Exec,
) -> Result<Poly, InverseError> {
    require_perm(ctx, spec)?;
    let b = bezout(ctx, spec)?;
    let q = ctx.q();
    let circle = ctx.mu_q1();
    let a_inv: Vec<Felt> = circle
        .iter()
        .map(|&z| ctx.inv(spec.component_eval(ctx, z)))
        .collect::<Result<_, _>>()
        .expect("A_i vanishes only for non-permutations");
    let scale = ctx.inv(ctx.from_int(q as i64 + 1)).expect("q+1 is a unit");
    // ζ^{t i - r i j} = γ^{(q-1)(t - r j) i}
    let coeffs = par::map_range(exec, q as usize + 1, |j| {
        let e = b.r_prime + (q as i128 - 1) * j as i128;
        let step = (q as i128 - 1) * (b.t - b.r * j as i128);
        let sum = a_inv.iter().enumerate().fold(Felt::ZERO, |acc, (i, &ai)| {
            let z = ctx.gamma_pow(step * i as i128);
            ctx.add(acc, ctx.mul(z, ctx.powi(ai, e).unwrap()))
        });
        (reduce_exponent_vanishing(ctx, e), ctx.mul(scale, sum))
    });
    Ok(Poly::from_terms(ctx, coeffs))
}

/// Which closed unit-circle inverse applies.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub enum MuCase {
    I1,
    I2,
    I3,
    I4,
}

/// Closed-form inverse of `x ↦ x^n·F_n(x, α)^{q-1}` on `μ_{q+1}`.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct MuInverse {
    pub variant: Variant,
    pub n: u64,
    pub alpha: Felt,
    pub case: MuCase,
    pub n_inv: u64,
    pub sqrt_alpha: Felt,
}

impl MuInverse {
    /// Picks the case from the variant and the position of `√α`; needs the
    /// matching `n1` or `n2` to exist.
    pub fn new(
        ctx: &FieldCtx,
        variant: Variant,
        n: u64,
        alpha: Felt,
    ) -> Result<Self, InverseError> {
        if !ctx.in_mu_q1(alpha) {
            return Err(ConstructError::AlphaNotInMu.into());
        }
        let q = ctx.q() as i128;
        let in_mu = sqrt_case(ctx, alpha) == SqrtCase::SqrtInMu;
        let (modulus, name) = if in_mu {
            (2 * (q - 1), "gcd(n, 2(q-1))")
        } else {
            (2 * (q + 1), "gcd(n, 2(q+1))")
        };
        let n_inv = mod_inverse(n as i128, modulus as u128).ok_or_else(|| {
            InverseError::Hypothesis(Condition {
                name: name.into(),
                gcd: gcd(n as i128, modulus) as u64,
                pass: false,
            })
        })? as u64;
        let case = match (variant, in_mu) {
            (Variant::H, true) => MuCase::I1,
            (Variant::H, false) => MuCase::I2,
            (Variant::G, true) => MuCase::I3,
            (Variant::G, false) => MuCase::I4,
        };
        Ok(MuInverse {
            variant,
            n,
            alpha,
            case,
            n_inv,
            sqrt_alpha: ctx
                .sqrt_canonical(alpha)
                .expect("unit-circle elements are squares"),
        })
    }

    /// The same inverse using `-√α` in the rational form.
    pub fn with_other_root(mut self, ctx: &FieldCtx) -> Self {
        self.sqrt_alpha = ctx.neg(self.sqrt_alpha);
        self
    }

    /// The map being inverted.
    pub fn forward(&self, ctx: &FieldCtx, x: Felt) -> Felt {
        let f = component_eval(ctx, self.variant, self.n, self.alpha, x);
        ctx.mul(ctx.pow(x, self.n), ctx.pow(f, ctx.q() - 1))
    }

    /// Rédei-power form; total on `μ_{q+1}`.
    pub fn eval_redei(&self, ctx: &FieldCtx, x: Felt) -> Felt {
        let (n, k) = (self.n as i128, self.n_inv as i128);
        let a = self.alpha;
        let qm1 = ctx.q() - 1;
        let pw = |e: i128| ctx.powi(a, e).unwrap();
        let (lead, shift) = match self.case {
            MuCase::I1 => (pw((n * k - 1) / 2), pw((n - 1) / 2)),
            MuCase::I2 => (Felt::ONE, pw((n - 1) / 2)),
            MuCase::I3 => (pw(k + (n * k + 1) / 2), pw((n + 1) / 2)),
            MuCase::I4 => (pw(k + 1), pw((n + 1) / 2)),
        };
        let inner = component_eval(ctx, self.variant, self.n_inv, a, ctx.mul(shift, x));
        ctx.mul(lead, ctx.mul(ctx.pow(x, self.n_inv), ctx.pow(inner, qm1)))
    }

    /// Rational form `√α·(u^k ± v^k)/(u^k ∓ v^k)` with `u, v = βx ± 1`;
    /// `None` at a pole. For `n` odd, `β = (√α)^{n-2}` (variant `H`) or
    /// `(√α)^n` (variant `G`).
    pub fn eval_rational(&self, ctx: &FieldCtx, x: Felt) -> Option<Felt> {
        let s = self.sqrt_alpha;
        let beta_pow = match self.variant {
            Variant::H => self.n as i128 - 2,
            Variant::G => self.n as i128,
        };
        let bx = ctx.mul(ctx.powi(s, beta_pow).ok()?, x);
        let u = ctx.pow(ctx.add(bx, Felt::ONE), self.n_inv);
        let v = ctx.pow(ctx.sub(bx, Felt::ONE), self.n_inv);
        let (num, den) = match self.variant {
            Variant::H => (ctx.add(u, v), ctx.sub(u, v)),
            Variant::G => (ctx.sub(u, v), ctx.add(u, v)),
        };
        Some(ctx.mul(s, ctx.div(num, den).ok()?))
    }

    /// Evaluates both forms, insisting they agree wherever the rational form
    /// is defined.
    pub fn eval(&self, ctx: &FieldCtx, x: Felt) -> Result<Felt, InverseError> {
        if !ctx.in_mu_q1(x) {
            return Err(InverseError::NotInMu(ctx.render(x)));
        }
        let y = self.eval_redei(ctx, x);
        match self.eval_rational(ctx, x) {
            Some(z) if z != y => Err(InverseError::FormMismatch(ctx.render(x))),
            _ => Ok(y),
        }
    }
}

pub fn mu_inverse_eval(ctx: &FieldCtx, inv: &MuInverse, x: Felt) -> Result<Felt, InverseError> {
    inv.eval(ctx, x)
}

/// Inverse of `P` on all of `F_{q^2}` built from a unit-circle inverse:
/// `x ↦ x^{r'(q^2-q+1)}·F_n(I(x^{q-1}), α)^{r'(q-2)}·I(x^{q-1})`.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct LiftedInverse {
    pub spec: PermSpec,
    pub mu: MuInverse,
    pub r_prime_full: u64,
}

impl LiftedInverse {
    pub fn eval(&self, ctx: &FieldCtx, x: Felt) -> Result<Felt, InverseError> {
        if x.is_zero() {
            return Ok(Felt::ZERO);
        }
        let ord = ctx.order() as u128;
        let q = ctx.q() as u128;
        let rp = self.r_prime_full as u128;
        let e1 = (rp * ((q * q - q + 1) % ord) % ord) as u64;
        let e2 = (rp * (q - 2) % ord) as u64;
        let i = self.mu.eval(ctx, ctx.pow(x, ctx.q() - 1))?;
        let f = self.spec.component_eval(ctx, i);
        Ok(ctx.mul(ctx.mul(ctx.pow(x, e1), ctx.pow(f, e2)), i))
    }
}

/// Closed-form route. Refuses unless `P` is a permutation and
/// `gcd(n+m(q+1), q^2-1) = 1`; in the `√α ∈ μ_{q+1}` case that is the
/// extra demand `gcd(n, q+1) = 1`.
pub fn lift_inverse(ctx: &FieldCtx, spec: &PermSpec) -> Result<LiftedInverse, InverseError> {
    require_perm(ctx, spec)?;
    let q = ctx.q() as i128;
    let r = spec.exponent(ctx);
    let g = gcd(r, q * q - 1);
    if g != 1 {
        let gn = gcd(spec.n as i128, q + 1);
        let cond = if gn != 1 {
            Condition {
                name: "gcd(n, q+1)".into(),
                gcd: gn as u64,
                pass: false,
            }
        } else {
            Condition {
                name: "gcd(n+m(q+1), q^2-1)".into(),
                gcd: g as u64,
                pass: false,
            }
        };
        return Err(InverseError::Hypothesis(cond));
    }
    let b = bezout(ctx, spec)?;
    let mu = MuInverse::new(ctx, spec.variant, spec.n, spec.alpha)?;
    Ok(LiftedInverse {
        spec: *spec,
        mu,
        r_prime_full: b.r_prime_full.expect("checked coprime above"),
    })
}

/// Inverse of an arbitrary map given as a value table, or a collision.
pub fn inverse_table(ctx: &FieldCtx, table: &[Felt]) -> Result<Vec<Felt>, InverseError> {
    let check = check_table(ctx, table);
    if let Some((a, b)) = check.witness {
        return Err(InverseError::NotBijective(ctx.render(a), ctx.render(b)));
    }
    let mut inv = vec![Felt::ZERO; table.len()];
    for (i, v) in table.iter().enumerate() {
        inv[v.index()] = ctx.element_at(i);
    }
    Ok(inv)
}

/// SHA-256 of a value table (packed indices, little-endian u32), hex.
pub fn table_digest(table: &[Felt]) -> String {
    let mut h = Sha256::new();
    for v in table {
        h.update((v.index() as u32).to_le_bytes());
    }
    hex::encode(h.finalize())
}

/// Which inverse routes to run.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Route {
    Cyclotomic,
    Closed,
    Table,
}

impl Route {
    pub const ALL: [Route; 3] = [Route::Cyclotomic, Route::Closed, Route::Table];

    pub fn name(self) -> &'static str {
        match self {
            Route::Cyclotomic => "cyclotomic",
            Route::Closed => "closed",
            Route::Table => "table",
        }
    }
}

/// Value table of `P^{-1}` by one route.
pub fn route_table(
    ctx: &FieldCtx,
    spec: &PermSpec,
    route: Route,
    exec: Exec,
) -> Result<Vec<Felt>, InverseError> {
    match route {
        Route::Cyclotomic => {
            let inv = inverse_cyclotomic_with(ctx, spec, exec)?;
            let ring = crate::poly::PolyRing::new(ctx);
            Ok(par::map_range(exec, ctx.q2() as usize, |i| {
                ring.eval(&inv, ctx.element_at(i))
            }))
        }
        Route::Closed => {
            let lifted = lift_inverse(ctx, spec)?;
            par::map_range(exec, ctx.q2() as usize, |i| {
                lifted.eval(ctx, ctx.element_at(i))
            })
            .into_iter()
            .collect()
        }
        Route::Table => {
            let table = crate::construct::value_table(ctx, exec, |x| spec.eval(ctx, x));
            inverse_table(ctx, &table)
        }
    }
}
