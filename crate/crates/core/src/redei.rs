//! The Rédei components `G_n(x, α)`, `H_n(x, α)` defined by
//! `(x + √α)^n = G_n + H_n·√α`, and Dickson polynomials `D_n(x, a)`.
//!
//! Each object has two independent constructions: the recursion (or its
//! matrix power) and the closed binomial sum. Tests keep them in agreement.

use thiserror::Error;

use crate::field::{Felt, FieldCtx};
use crate::intmath::binomial_mod_p;
use crate::poly::{Poly, PolyRing};

/// Largest `n` accepted for coefficient-form construction.
pub const DEFAULT_COEFF_CAP: u64 = 10_000;

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum RedeiError {
    #[error("alpha is not a (q+1)-th root of unity")]
    AlphaNotInMu,
    #[error("n = {n} exceeds the coefficient-form cap {cap}")]
    DegreeCap { n: u64, cap: u64 },
}

/// `(G_n, H_n)` for fixed `n` and `α ∈ μ_{q+1}` in coefficient form.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct RedeiPair {
    pub n: u64,
    pub alpha: Felt,
    pub g: Poly,
    pub h: Poly,
}

/// Coefficient form of `(G_n, H_n)` built by `n` steps of
/// `G_n = x·G_{n-1} + α·H_{n-1}`, `H_n = G_{n-1} + x·H_{n-1}` from
/// `G_0 = 1`, `H_0 = 0`.
pub fn gh_coeffs(ctx: &FieldCtx, n: u64, alpha: Felt) -> Result<RedeiPair, RedeiError> {
    gh_coeffs_capped(ctx, n, alpha, DEFAULT_COEFF_CAP)
}

pub fn gh_coeffs_capped(
    ctx: &FieldCtx,
    n: u64,
    alpha: Felt,
    cap: u64,
) -> Result<RedeiPair, RedeiError> {
    if !ctx.in_mu_q1(alpha) {
        return Err(RedeiError::AlphaNotInMu);
    }
    if n > cap {
        return Err(RedeiError::DegreeCap { n, cap });
    }
    let ring = PolyRing::new(ctx);
    let mut g = Poly::one();
    let mut h = Poly::zero();
    for _ in 0..n {
        let g_next = ring.add(&ring.mul_monomial(&g, Felt::ONE, 1), &ring.scale(&h, alpha));
        let h_next = ring.add(&g, &ring.mul_monomial(&h, Felt::ONE, 1));
        g = g_next;
        h = h_next;
    }
    Ok(RedeiPair { n, alpha, g, h })
}

/// Closed form `G_n = Σ C(n,2i) α^i x^{n-2i}`, `H_n = Σ C(n,2i+1) α^i
/// x^{n-2i-1}`, binomials reduced mod `p` by Lucas' theorem.
pub fn gh_coeffs_closed(ctx: &FieldCtx, n: u64, alpha: Felt) -> (Poly, Poly) {
    let p = ctx.p();
    let mut g = Vec::new();
    let mut h = Vec::new();
    let mut alpha_i = Felt::ONE;
    for i in 0..=n / 2 {
        let cg = ctx.from_int(binomial_mod_p(n, 2 * i, p) as i64);
        g.push((n - 2 * i, ctx.mul(cg, alpha_i)));
        if 2 * i < n {
            let ch = ctx.from_int(binomial_mod_p(n, 2 * i + 1, p) as i64);
            h.push((n - 2 * i - 1, ctx.mul(ch, alpha_i)));
        }
        alpha_i = ctx.mul(alpha_i, alpha);
    }
    (Poly::from_terms(ctx, g), Poly::from_terms(ctx, h))
}

/// `(G_n(x, α), H_n(x, α))` at a point, in `O(log n)` multiplications.
///
/// Powers of `[[x, α], [1, x]]` keep the shape `[[G, αH], [H, G]]`, so the
/// square-and-multiply ladder only tracks the first column `(G, H)`.
/// `α ∈ μ_{q+1}` is not checked; the identity holds for any `α`.
pub fn gh_eval(ctx: &FieldCtx, n: u64, alpha: Felt, x: Felt) -> (Felt, Felt) {
    let mul = |(a, b): (Felt, Felt), (c, d): (Felt, Felt)| {
        (
            ctx.add(ctx.mul(a, c), ctx.mul(alpha, ctx.mul(b, d))),
            ctx.add(ctx.mul(a, d), ctx.mul(b, c)),
        )
    };
    let mut acc = (Felt::ONE, Felt::ZERO);
    let mut base = (x, Felt::ONE);
    let mut e = n;
    while e > 0 {
        if e & 1 == 1 {
            acc = mul(acc, base);
        }
        e >>= 1;
        if e > 0 {
            base = mul(base, base);
        }
    }
    acc
}

/// `R_n(x, α) = G_n / H_n`, `None` at a pole.
pub fn redei_eval(ctx: &FieldCtx, n: u64, alpha: Felt, x: Felt) -> Option<Felt> {
    let (g, h) = gh_eval(ctx, n, alpha, x);
    ctx.div(g, h).ok()
}

/// Dickson polynomial of the first kind, `D_n(x, a)`.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct DicksonSpec {
    pub n: u64,
    pub a: Felt,
}

impl DicksonSpec {
    pub fn eval(&self, ctx: &FieldCtx, x: Felt) -> Felt {
        dickson_eval(ctx, self.n, self.a, x)
    }

    pub fn coeffs(&self, ctx: &FieldCtx) -> Poly {
        dickson_coeffs(ctx, self.n, self.a)
    }
}

/// `D_n(x, a)` through the companion matrix of
/// `D_n = x·D_{n-1} - a·D_{n-2}`, `D_0 = 2`, `D_1 = x`.
pub fn dickson_eval(ctx: &FieldCtx, n: u64, a: Felt, x: Felt) -> Felt {
    if n == 0 {
        return ctx.from_int(2);
    }
    let m = [[x, ctx.neg(a)], [Felt::ONE, Felt::ZERO]];
    let mp = mat_pow(ctx, m, n - 1);
    // [D_n, D_{n-1}] = M^{n-1} [D_1, D_0]
    let two = ctx.from_int(2);
    ctx.add(ctx.mul(mp[0][0], x), ctx.mul(mp[0][1], two))
}

/// Coefficient form of `D_n(x, a)` by the three-term recurrence.
pub fn dickson_coeffs(ctx: &FieldCtx, n: u64, a: Felt) -> Poly {
    let ring = PolyRing::new(ctx);
    let mut prev = Poly::constant(ctx.from_int(2));
    if n == 0 {
        return prev;
    }
    let mut cur = Poly::x();
    for _ in 1..n {
        let next = ring.sub(
            &ring.mul_monomial(&cur, Felt::ONE, 1),
            &ring.scale(&prev, a),
        );
        prev = cur;
        cur = next;
    }
    cur
}

/// Closed form `D_n = Σ n/(n-i)·C(n-i, i)·(-a)^i x^{n-2i}`, using
/// `n/(n-i)·C(n-i, i) = C(n-i, i) + C(n-i-1, i-1)` to stay in integers.
pub fn dickson_coeffs_closed(ctx: &FieldCtx, n: u64, a: Felt) -> Poly {
    if n == 0 {
        return Poly::constant(ctx.from_int(2));
    }
    let p = ctx.p();
    let minus_a = ctx.neg(a);
    let mut terms = Vec::new();
    let mut pow = Felt::ONE;
    for i in 0..=n / 2 {
        let mut c = binomial_mod_p(n - i, i, p);
        if i >= 1 {
            c = (c + binomial_mod_p(n - i - 1, i - 1, p)) % p;
        }
        terms.push((n - 2 * i, ctx.mul(ctx.from_int(c as i64), pow)));
        pow = ctx.mul(pow, minus_a);
    }
    Poly::from_terms(ctx, terms)
}

type Mat2 = [[Felt; 2]; 2];

fn mat_mul(ctx: &FieldCtx, a: Mat2, b: Mat2) -> Mat2 {
    let dot = |i: usize, j: usize| ctx.add(ctx.mul(a[i][0], b[0][j]), ctx.mul(a[i][1], b[1][j]));
    [[dot(0, 0), dot(0, 1)], [dot(1, 0), dot(1, 1)]]
}

fn mat_pow(ctx: &FieldCtx, m: Mat2, mut e: u64) -> Mat2 {
    let mut acc = [[Felt::ONE, Felt::ZERO], [Felt::ZERO, Felt::ONE]];
    let mut base = m;
    while e > 0 {
        if e & 1 == 1 {
            acc = mat_mul(ctx, acc, base);
        }
        e >>= 1;
        if e > 0 {
            base = mat_mul(ctx, base, base);
        }
    }
    acc
}

/// `(G_n, H_n)` from the full 2×2 matrix power applied to `(1, 0)`; the
/// reference for [`gh_eval`].
pub fn gh_eval_matrix(ctx: &FieldCtx, n: u64, alpha: Felt, x: Felt) -> (Felt, Felt) {
    let m = mat_pow(ctx, [[x, alpha], [Felt::ONE, x]], n);
    (m[0][0], m[1][0])
}

#[cfg(test)]
mod tests {
    use super::*;
    use rand::{Rng, SeedableRng};
    use rand_chacha::ChaCha8Rng;

    fn poly(ctx: &FieldCtx, terms: &[(u64, Felt)]) -> Poly {
        Poly::from_terms(ctx, terms.iter().copied())
    }

    #[test]
    fn small_cases_match_closed_expressions() {
        let f = FieldCtx::new(11, 1).unwrap();
        let c = |n: i64| f.from_int(n);
        for l in 0..=f.q() as i64 {
            let a = f.alpha_from_l(l);
            let a2 = f.mul(a, a);
            let p0 = gh_coeffs(&f, 0, a).unwrap();
            assert_eq!((p0.g, p0.h), (Poly::one(), Poly::zero()));
            let p3 = gh_coeffs(&f, 3, a).unwrap();
            assert_eq!(p3.g, poly(&f, &[(3, c(1)), (1, f.mul(c(3), a))]));
            assert_eq!(p3.h, poly(&f, &[(2, c(3)), (0, a)]));
            let p5 = gh_coeffs(&f, 5, a).unwrap();
            assert_eq!(
                p5.g,
                poly(&f, &[(5, c(1)), (3, f.mul(c(10), a)), (1, f.mul(c(5), a2))])
            );
            assert_eq!(p5.h, poly(&f, &[(4, c(5)), (2, f.mul(c(10), a)), (0, a2)]));
        }
    }

    #[test]
    fn recursion_and_closed_form_agree() {
        for (p, k) in [(3, 1), (5, 1), (3, 2), (7, 1)] {
            let f = FieldCtx::new(p, k).unwrap();
            for a in f.mu_q1() {
                for n in 0..40 {
                    let pair = gh_coeffs(&f, n, a).unwrap();
                    assert_eq!((pair.g, pair.h), gh_coeffs_closed(&f, n, a), "n={n}");
                }
            }
        }
    }

    #[test]
    fn coefficient_form_guards() {
        let f = FieldCtx::new(5, 1).unwrap();
        assert_eq!(gh_coeffs(&f, 3, f.gamma()), Err(RedeiError::AlphaNotInMu));
        assert_eq!(
            gh_coeffs_capped(&f, 30, Felt::ONE, 20),
            Err(RedeiError::DegreeCap { n: 30, cap: 20 })
        );
    }

    #[test]
    fn ladder_matches_matrix_and_coefficients() {
        let f = FieldCtx::new(3, 2).unwrap();
        let ring = PolyRing::new(&f);
        let mut rng = ChaCha8Rng::seed_from_u64(21);
        let mu = f.mu_q1();
        for a in &mu {
            let pair = gh_coeffs(&f, 7, *a).unwrap();
            for _ in 0..100 {
                let x = f.element_at(rng.gen_range(0..f.q2() as usize));
                let expect = (ring.eval(&pair.g, x), ring.eval(&pair.h, x));
                assert_eq!(gh_eval(&f, 7, *a, x), expect);
            }
        }
        for _ in 0..200 {
            let n = rng.gen_range(0..200);
            let a = mu[rng.gen_range(0..mu.len())];
            let x = f.element_at(rng.gen_range(0..f.q2() as usize));
            assert_eq!(gh_eval(&f, n, a, x), gh_eval_matrix(&f, n, a, x));
        }
        let x = f.element_at(5);
        assert_eq!(gh_eval(&f, 1, mu[3], x), (x, Felt::ONE));
    }

    #[test]
    fn binomial_expansion_identity() {
        let f = FieldCtx::new(5, 2).unwrap();
        let mut rng = ChaCha8Rng::seed_from_u64(8);
        let mu = f.mu_q1();
        for _ in 0..1000 {
            let n = rng.gen_range(0..=50);
            let a = mu[rng.gen_range(0..mu.len())];
            let x = f.element_at(rng.gen_range(0..f.q2() as usize));
            let (g, h) = gh_eval(&f, n, a, x);
            for s in f.sqrt(a) {
                let plus = f.pow(f.add(x, s), n);
                let minus = f.pow(f.sub(x, s), n);
                assert_eq!(plus, f.add(g, f.mul(h, s)));
                assert_eq!(minus, f.sub(g, f.mul(h, s)));
            }
        }
    }

    #[test]
    fn dickson_small_cases() {
        let f = FieldCtx::new(7, 1).unwrap();
        let a = f.from_int(3);
        let c = |n: i64| f.from_int(n);
        assert_eq!(
            dickson_coeffs(&f, 3, a),
            poly(&f, &[(3, c(1)), (1, f.neg(f.mul(c(3), a)))])
        );
        let a2 = f.mul(a, a);
        assert_eq!(
            dickson_coeffs(&f, 5, a),
            poly(
                &f,
                &[(5, c(1)), (3, f.neg(f.mul(c(5), a))), (1, f.mul(c(5), a2))]
            )
        );
        assert_eq!(dickson_coeffs(&f, 0, a), Poly::constant(c(2)));
        assert_eq!(dickson_coeffs(&f, 1, a), Poly::x());
    }

    #[test]
    fn dickson_recurrence_closed_form_and_evaluation_agree() {
        let f = FieldCtx::new(3, 2).unwrap();
        let ring = PolyRing::new(&f);
        let mut rng = ChaCha8Rng::seed_from_u64(13);
        for n in 0..40 {
            let a = f.element_at(rng.gen_range(0..f.q2() as usize));
            let d = dickson_coeffs(&f, n, a);
            assert_eq!(d, dickson_coeffs_closed(&f, n, a), "n={n}");
            for _ in 0..10 {
                let x = f.element_at(rng.gen_range(0..f.q2() as usize));
                assert_eq!(DicksonSpec { n, a }.eval(&f, x), ring.eval(&d, x));
            }
        }
    }

    #[test]
    fn waring_identity() {
        let f = FieldCtx::new(5, 1).unwrap();
        let mut rng = ChaCha8Rng::seed_from_u64(17);
        for _ in 0..1000 {
            let u1 = f.element_at(rng.gen_range(0..f.q2() as usize));
            let u2 = f.element_at(rng.gen_range(0..f.q2() as usize));
            let n = rng.gen_range(1..60);
            let lhs = f.add(f.pow(u1, n), f.pow(u2, n));
            assert_eq!(lhs, dickson_eval(&f, n, f.mul(u1, u2), f.add(u1, u2)));
        }
    }

    #[test]
    fn redei_function_values() {
        let f = FieldCtx::new(7, 1).unwrap();
        let x = f.element_at(10);
        assert_eq!(redei_eval(&f, 1, Felt::ONE, x), Some(x));
        // G_3(1,1)/H_3(1,1) = 4/4
        assert_eq!(redei_eval(&f, 3, Felt::ONE, Felt::ONE), Some(Felt::ONE));
        let f = FieldCtx::new(3, 2).unwrap();
        for n in [3, 5, 7] {
            for a in f.mu_q1() {
                for b in f.mu_q1() {
                    assert!(redei_eval(&f, n, a, b).is_some(), "pole on the unit circle");
                }
            }
        }
    }
}
