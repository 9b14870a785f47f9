//! Pointwise checks of the algebraic identities behind the construction.
//! Each returns `true` when the identity holds at the given point; the
//! suites in `selftest` and the acceptance tests sweep them over grids.

use crate::construct::{component_eval, Variant};
use crate::field::{Felt, FieldCtx};
use crate::poly::PolyRing;
use crate::redei::{dickson_eval, gh_eval, RedeiPair};

/// `(x ± s)^n = G_n(x) ± H_n(x)·s` with `s^2 = α`, using a coefficient form.
pub fn binomial_expansion_coeffs(ctx: &FieldCtx, pair: &RedeiPair, s: Felt, x: Felt) -> bool {
    let ring = PolyRing::new(ctx);
    let g = ring.eval(&pair.g, x);
    let h = ring.eval(&pair.h, x);
    let hs = ctx.mul(h, s);
    ctx.pow(ctx.add(x, s), pair.n) == ctx.add(g, hs)
        && ctx.pow(ctx.sub(x, s), pair.n) == ctx.sub(g, hs)
}

/// The same expansion through the evaluation ladder.
pub fn binomial_expansion(ctx: &FieldCtx, n: u64, s: Felt, x: Felt) -> bool {
    let (g, h) = gh_eval(ctx, n, ctx.mul(s, s), x);
    let hs = ctx.mul(h, s);
    ctx.pow(ctx.add(x, s), n) == ctx.add(g, hs) && ctx.pow(ctx.sub(x, s), n) == ctx.sub(g, hs)
}

/// `2·G_n(x, α) = D_n(2x, x^2 - α)`.
pub fn dickson_of_g(ctx: &FieldCtx, n: u64, alpha: Felt, x: Felt) -> bool {
    let two = ctx.from_int(2);
    let (g, _) = gh_eval(ctx, n, alpha, x);
    let d = dickson_eval(ctx, n, ctx.sub(ctx.mul(x, x), alpha), ctx.mul(two, x));
    ctx.mul(two, g) == d
}

/// `2s·H_n(x, α) = D_n(2s, α - x^2)` for odd `n`, `s^2 = α`.
pub fn dickson_of_h(ctx: &FieldCtx, n: u64, s: Felt, x: Felt) -> bool {
    let alpha = ctx.mul(s, s);
    let two_s = ctx.mul(ctx.from_int(2), s);
    let (_, h) = gh_eval(ctx, n, alpha, x);
    let d = dickson_eval(ctx, n, ctx.sub(alpha, ctx.mul(x, x)), two_s);
    ctx.mul(two_s, h) == d
}

/// `gcd(G_n, H_n) = 1` in `F_{q^2}[x]`.
pub fn coprime_components(ctx: &FieldCtx, pair: &RedeiPair) -> bool {
    let ring = PolyRing::new(ctx);
    match ring.gcd(&pair.g, &pair.h) {
        Ok(d) => d.degree() == Some(0),
        Err(_) => false,
    }
}

/// On `b ∈ μ_{q+1}` with `n` odd, the Frobenius swaps the components:
/// `H_n(b)^q = b^{-n}·α^{-(n-1)/2}·G_n(b)` and likewise with `G`, `H`
/// exchanged.
pub fn frobenius_swap(ctx: &FieldCtx, variant: Variant, n: u64, alpha: Felt, b: Felt) -> bool {
    let (g, h) = gh_eval(ctx, n, alpha, b);
    let (this, other) = match variant {
        Variant::H => (h, g),
        Variant::G => (g, h),
    };
    let k = ctx.mul(
        ctx.powi(b, -(n as i128)).unwrap(),
        ctx.powi(alpha, -((n as i128 - 1) / 2)).unwrap(),
    );
    ctx.frobenius_q(this) == ctx.mul(k, other)
}

/// `x^n·H_n(x)^{q-1} = α^{-(n-1)/2}·G_n(x)/H_n(x)` on `μ_{q+1}` (and the
/// reciprocal statement for `G`).
pub fn unit_circle_ratio(ctx: &FieldCtx, variant: Variant, n: u64, alpha: Felt, x: Felt) -> bool {
    let (g, h) = gh_eval(ctx, n, alpha, x);
    let (num, den) = match variant {
        Variant::H => (g, h),
        Variant::G => (h, g),
    };
    let Ok(ratio) = ctx.div(num, den) else {
        return false;
    };
    let f = component_eval(ctx, variant, n, alpha, x);
    let lhs = ctx.mul(ctx.pow(x, n), ctx.pow(f, ctx.q() - 1));
    let rhs = ctx.mul(ctx.powi(alpha, -((n as i128 - 1) / 2)).unwrap(), ratio);
    lhs == rhs
}

/// `l(x) = (x + s)/(x - s)`, `None` at `x = s`.
pub fn mobius(ctx: &FieldCtx, s: Felt, x: Felt) -> Option<Felt> {
    ctx.div(ctx.add(x, s), ctx.sub(x, s)).ok()
}

/// For `x ∈ μ_{q+1}`, `x ≠ ±s`: `l(x)^{q-1} = -1` when `s ∈ μ_{q+1}`,
/// `l(x)^{q+1} = -1` otherwise.
pub fn mobius_power(ctx: &FieldCtx, s: Felt, x: Felt) -> bool {
    let Some(l) = mobius(ctx, s, x) else {
        return false;
    };
    let e = if ctx.in_mu_q1(s) {
        ctx.q() - 1
    } else {
        ctx.q() + 1
    };
    ctx.pow(l, e) == ctx.neg(Felt::ONE)
}

/// Two points of `μ_{q+1} \ {±s}` collide under `x ↦ x^n·F_n(x)^{q-1}`
/// exactly when `l(x)^n = l(y)^n`.
pub fn collision_matches_mobius(
    ctx: &FieldCtx,
    variant: Variant,
    n: u64,
    s: Felt,
    x: Felt,
    y: Felt,
) -> bool {
    let alpha = ctx.mul(s, s);
    let map = |z: Felt| {
        let f = component_eval(ctx, variant, n, alpha, z);
        ctx.mul(ctx.pow(z, n), ctx.pow(f, ctx.q() - 1))
    };
    match (mobius(ctx, s, x), mobius(ctx, s, y)) {
        (Some(lx), Some(ly)) => (map(x) == map(y)) == (ctx.pow(lx, n) == ctx.pow(ly, n)),
        _ => false,
    }
}
