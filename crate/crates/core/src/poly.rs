//! Sparse univariate polynomials over `F_{q^2}`.
//!
//! The polynomials this crate deals with have a handful of terms spread over
//! exponents up to `q^2`, so terms live in an ordered map keyed by exponent.
//! Arithmetic needs the field, so it is done through a [`PolyRing`] view.

use std::collections::BTreeMap;

use thiserror::Error;

use crate::field::{Felt, FieldCtx, FieldError};

pub const DEFAULT_DEGREE_CAP: u64 = 1 << 21;

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum PolyError {
    #[error("result degree {degree} exceeds the degree cap {cap}")]
    DegreeCap { degree: u128, cap: u64 },
    #[error("gcd of two zero polynomials is undefined")]
    ZeroGcd,
    #[error("division by the zero polynomial")]
    DivisionByZero,
    #[error("value table has {got} entries, expected {expected}")]
    TableSize { got: usize, expected: u64 },
    #[error(transparent)]
    Field(#[from] FieldError),
}

/// Map from exponent to nonzero coefficient.
#[derive(Clone, Debug, Default, PartialEq, Eq)]
pub struct Poly {
    terms: BTreeMap<u64, Felt>,
}

impl Poly {
    pub fn zero() -> Self {
        Self::default()
    }

    pub fn constant(c: Felt) -> Self {
        Self::monomial(c, 0)
    }

    pub fn one() -> Self {
        Self::constant(Felt::ONE)
    }

    /// The indeterminate `x`.
    pub fn x() -> Self {
        Self::monomial(Felt::ONE, 1)
    }

    pub fn monomial(c: Felt, e: u64) -> Self {
        let mut terms = BTreeMap::new();
        if !c.is_zero() {
            terms.insert(e, c);
        }
        Poly { terms }
    }

    pub fn is_zero(&self) -> bool {
        self.terms.is_empty()
    }

    /// `None` for the zero polynomial.
    pub fn degree(&self) -> Option<u64> {
        self.terms.keys().next_back().copied()
    }

    pub fn leading_coeff(&self) -> Option<Felt> {
        self.terms.values().next_back().copied()
    }

    pub fn coeff(&self, e: u64) -> Felt {
        self.terms.get(&e).copied().unwrap_or(Felt::ZERO)
    }

    pub fn num_terms(&self) -> usize {
        self.terms.len()
    }

    /// `(exponent, coefficient)` pairs, exponents ascending.
    pub fn terms(&self) -> impl Iterator<Item = (u64, Felt)> + '_ {
        self.terms.iter().map(|(&e, &c)| (e, c))
    }

    fn add_term(&mut self, ctx: &FieldCtx, e: u64, c: Felt) {
        if c.is_zero() {
            return;
        }
        let entry = self.terms.entry(e).or_insert(Felt::ZERO);
        *entry = ctx.add(*entry, c);
        if entry.is_zero() {
            self.terms.remove(&e);
        }
    }

    /// Builds a polynomial from possibly repeated exponents, summing
    /// coefficients that collide.
    pub fn from_terms(ctx: &FieldCtx, terms: impl IntoIterator<Item = (u64, Felt)>) -> Self {
        let mut out = Poly::zero();
        for (e, c) in terms {
            out.add_term(ctx, e, c);
        }
        out
    }
}

/// Reduces a (possibly negative) exponent so that `x^e` keeps its value on
/// every element of `F_{q^2}`: `0` stays `0`, anything else lands in
/// `[1, q^2 - 1]`. Negative exponents are only meaningful on `x != 0`, where
/// this is the usual reduction modulo `q^2 - 1`.
pub fn reduce_exponent(ctx: &FieldCtx, e: i128) -> u64 {
    if e == 0 {
        return 0;
    }
    ((e - 1).rem_euclid(ctx.order() as i128) + 1) as u64
}

/// Like [`reduce_exponent`] but for a monomial that must vanish at zero:
/// every integer, `0` included, lands in `[1, q^2 - 1]`.
pub fn reduce_exponent_vanishing(ctx: &FieldCtx, e: i128) -> u64 {
    ((e - 1).rem_euclid(ctx.order() as i128) + 1) as u64
}

/// Polynomial arithmetic over a fixed field.
#[derive(Clone, Copy)]
pub struct PolyRing<'a> {
    ctx: &'a FieldCtx,
    degree_cap: u64,
}

impl<'a> PolyRing<'a> {
    pub fn new(ctx: &'a FieldCtx) -> Self {
        Self::with_cap(ctx, DEFAULT_DEGREE_CAP)
    }

    pub fn with_cap(ctx: &'a FieldCtx, degree_cap: u64) -> Self {
        PolyRing { ctx, degree_cap }
    }

    pub fn ctx(&self) -> &'a FieldCtx {
        self.ctx
    }

    fn check_cap(&self, degree: u128) -> Result<(), PolyError> {
        if degree > self.degree_cap as u128 {
            return Err(PolyError::DegreeCap {
                degree,
                cap: self.degree_cap,
            });
        }
        Ok(())
    }

    pub fn eval(&self, f: &Poly, x: Felt) -> Felt {
        let ctx = self.ctx;
        f.terms().fold(Felt::ZERO, |acc, (e, c)| {
            ctx.add(acc, ctx.mul(c, ctx.pow(x, e)))
        })
    }

    /// Evaluations at every field element, in packed-index order.
    pub fn value_table(&self, f: &Poly) -> Vec<Felt> {
        self.ctx.elements().map(|a| self.eval(f, a)).collect()
    }

    pub fn add(&self, f: &Poly, g: &Poly) -> Poly {
        let mut out = f.clone();
        for (e, c) in g.terms() {
            out.add_term(self.ctx, e, c);
        }
        out
    }

    pub fn neg(&self, f: &Poly) -> Poly {
        Poly {
            terms: f.terms().map(|(e, c)| (e, self.ctx.neg(c))).collect(),
        }
    }

    pub fn sub(&self, f: &Poly, g: &Poly) -> Poly {
        self.add(f, &self.neg(g))
    }

    pub fn scale(&self, f: &Poly, c: Felt) -> Poly {
        if c.is_zero() {
            return Poly::zero();
        }
        Poly {
            terms: f.terms().map(|(e, a)| (e, self.ctx.mul(a, c))).collect(),
        }
    }

    /// `c * x^shift * f`.
    pub fn mul_monomial(&self, f: &Poly, c: Felt, shift: u64) -> Poly {
        if c.is_zero() {
            return Poly::zero();
        }
        Poly {
            terms: f
                .terms()
                .map(|(e, a)| (e + shift, self.ctx.mul(a, c)))
                .collect(),
        }
    }

    pub fn mul(&self, f: &Poly, g: &Poly) -> Result<Poly, PolyError> {
        match (f.degree(), g.degree()) {
            (Some(a), Some(b)) => self.check_cap(a as u128 + b as u128)?,
            _ => return Ok(Poly::zero()),
        }
        let mut out = Poly::zero();
        for (e1, c1) in f.terms() {
            for (e2, c2) in g.terms() {
                out.add_term(self.ctx, e1 + e2, self.ctx.mul(c1, c2));
            }
        }
        Ok(out)
    }

    /// `f(x^d)`: exponent multiplication, valid for any monomial inner map.
    pub fn substitute_power(&self, f: &Poly, d: u64) -> Result<Poly, PolyError> {
        if let Some(deg) = f.degree() {
            self.check_cap(deg as u128 * d as u128)?;
        }
        Ok(Poly {
            terms: f.terms().map(|(e, c)| (e * d, c)).collect(),
        })
    }

    /// `f(g(x))` as a genuine polynomial, subject to the degree cap.
    pub fn compose(&self, f: &Poly, g: &Poly) -> Result<Poly, PolyError> {
        if let (Some(df), Some(dg)) = (f.degree(), g.degree()) {
            self.check_cap(df as u128 * dg as u128)?;
        }
        self.compose_with(f, g, |p| p)
    }

    /// `f(g(x))` reduced modulo `x^{q^2} - x` after every product, so the
    /// degree never exceeds `q^2 - 1`.
    pub fn compose_reduced(&self, f: &Poly, g: &Poly) -> Poly {
        let g = self.reduce_functional(g);
        let ring = PolyRing::with_cap(self.ctx, u64::MAX);
        ring.compose_with(f, &g, |p| self.reduce_functional(&p))
            .expect("uncapped ring")
    }

    fn compose_with(
        &self,
        f: &Poly,
        g: &Poly,
        reduce: impl Fn(Poly) -> Poly,
    ) -> Result<Poly, PolyError> {
        let mut out = Poly::zero();
        for (e, c) in f.terms() {
            let mut acc = Poly::one();
            let mut base = g.clone();
            let mut e = e;
            while e > 0 {
                if e & 1 == 1 {
                    acc = reduce(self.mul(&acc, &base)?);
                }
                e >>= 1;
                if e > 0 {
                    base = reduce(self.mul(&base, &base)?);
                }
            }
            out = self.add(&out, &self.scale(&acc, c));
        }
        Ok(out)
    }

    /// The canonical representative of `f` modulo `x^{q^2} - x` that keeps
    /// the evaluation map on all of `F_{q^2}`.
    pub fn reduce_functional(&self, f: &Poly) -> Poly {
        Poly::from_terms(
            self.ctx,
            f.terms()
                .map(|(e, c)| (reduce_exponent(self.ctx, e as i128), c)),
        )
    }

    pub fn monic(&self, f: &Poly) -> Poly {
        match f.leading_coeff() {
            None => Poly::zero(),
            Some(lc) => self.scale(f, self.ctx.inv(lc).expect("nonzero leading coefficient")),
        }
    }

    pub fn div_rem(&self, f: &Poly, g: &Poly) -> Result<(Poly, Poly), PolyError> {
        let (dg, lc) = match (g.degree(), g.leading_coeff()) {
            (Some(d), Some(c)) => (d, c),
            _ => return Err(PolyError::DivisionByZero),
        };
        let lc_inv = self.ctx.inv(lc)?;
        let mut quo = Poly::zero();
        let mut rem = f.clone();
        while let Some(dr) = rem.degree() {
            if dr < dg {
                break;
            }
            let c = self.ctx.mul(rem.leading_coeff().unwrap(), lc_inv);
            let shift = dr - dg;
            quo.add_term(self.ctx, shift, c);
            rem = self.sub(&rem, &self.mul_monomial(g, c, shift));
        }
        Ok((quo, rem))
    }

    /// Monic gcd by the Euclidean algorithm.
    pub fn gcd(&self, f: &Poly, g: &Poly) -> Result<Poly, PolyError> {
        Ok(self.ext_gcd(f, g)?.0)
    }

    /// `(d, s, t)` with `s*f + t*g = d`, `d` the monic gcd.
    pub fn ext_gcd(&self, f: &Poly, g: &Poly) -> Result<(Poly, Poly, Poly), PolyError> {
        if f.is_zero() && g.is_zero() {
            return Err(PolyError::ZeroGcd);
        }
        let (mut r0, mut r1) = (f.clone(), g.clone());
        let (mut s0, mut s1) = (Poly::one(), Poly::zero());
        let (mut t0, mut t1) = (Poly::zero(), Poly::one());
        while !r1.is_zero() {
            let (quo, rem) = self.div_rem(&r0, &r1)?;
            let s2 = self.sub(&s0, &self.mul(&quo, &s1)?);
            let t2 = self.sub(&t0, &self.mul(&quo, &t1)?);
            (r0, r1) = (r1, rem);
            (s0, s1) = (s1, s2);
            (t0, t1) = (t1, t2);
        }
        let lc_inv = self.ctx.inv(r0.leading_coeff().unwrap())?;
        Ok((
            self.scale(&r0, lc_inv),
            self.scale(&s0, lc_inv),
            self.scale(&t0, lc_inv),
        ))
    }

    /// The unique reduced polynomial (degree `< q^2`) whose evaluation map is
    /// the given table, indexed by packed element index.
    pub fn interpolate(&self, values: &[Felt]) -> Result<Poly, PolyError> {
        let ctx = self.ctx;
        if values.len() as u64 != ctx.q2() {
            return Err(PolyError::TableSize {
                got: values.len(),
                expected: ctx.q2(),
            });
        }
        let n = ctx.order();
        let nonzero: Vec<(u64, Felt)> = ctx
            .elements()
            .skip(1)
            .map(|a| (ctx.log(a).unwrap(), values[a.index()]))
            .filter(|(_, v)| !v.is_zero())
            .collect();
        let mut terms = vec![(0u64, values[0])];
        for e in 1..n {
            // c_e = -sum_{a != 0} f(a) a^{-e}
            let s = nonzero.iter().fold(Felt::ZERO, |acc, &(la, v)| {
                let a_inv_e = ctx.gamma_pow(-((la as i128) * (e as i128)));
                ctx.add(acc, ctx.mul(v, a_inv_e))
            });
            terms.push((e, ctx.neg(s)));
        }
        let total = values.iter().fold(Felt::ZERO, |acc, &v| ctx.add(acc, v));
        terms.push((n, ctx.neg(total)));
        Ok(Poly::from_terms(ctx, terms))
    }

    /// Text rendering `c·x^e + ...`, exponents ascending.
    pub fn render(&self, f: &Poly) -> String {
        render_terms(self.ctx, f.terms().map(|(e, c)| (e as i128, c)))
    }
}

/// Renders `(exponent, coefficient)` pairs; exponents may be negative when
/// showing un-normalised forms.
pub fn render_terms(ctx: &FieldCtx, terms: impl Iterator<Item = (i128, Felt)>) -> String {
    let parts: Vec<String> = terms
        .filter(|(_, c)| !c.is_zero())
        .map(|(e, c)| {
            let coeff = ctx.render(c);
            match (e, c == Felt::ONE) {
                (0, _) => coeff,
                (1, true) => "x".to_string(),
                (1, false) => format!("{coeff}·x"),
                (_, true) => format!("x^{e}"),
                (_, false) => format!("{coeff}·x^{e}"),
            }
        })
        .collect();
    if parts.is_empty() {
        "0".to_string()
    } else {
        parts.join(" + ")
    }
}
