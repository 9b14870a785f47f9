//! Exact arithmetic in `F_{q^2}`, `q = p^k`, `p` an odd prime.
//!
//! Elements are stored as a packed base-`p` integer `c0 + c1*p + ... `
//! of their coefficient vector in the basis `1, t, ..., t^{2k-1}` of
//! `F_p[t]/(modulus)`. Multiplication, inversion and powering go through
//! discrete log tables relative to the primitive element `gamma`; the
//! schoolbook product is kept as the reference path and is what builds the
//! tables in the first place.
//!
//! The subfield `F_q` is not a separate type: it is the fixed field of
//! [`FieldCtx::frobenius_q`].

use std::cmp::Ordering;
use std::fmt;

use thiserror::Error;

use crate::intmath;

/// Default cap on `q^2`; exhaustive routines enumerate the whole field.
pub const DEFAULT_SIZE_BOUND: u64 = 1 << 20;

/// Largest `q^2` for which a context can be built at all (log tables).
pub const MAX_SIZE_BOUND: u64 = 1 << 24;

/// Square roots are found by scanning the field up to this size and by
/// Tonelli-Shanks above it.
pub const EXHAUSTIVE_SQRT_LIMIT: u64 = 1 << 16;

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum FieldError {
    #[error("p = {0} is not an odd prime")]
    NotOddPrime(u64),
    #[error("extension degree k must be positive")]
    ZeroDegree,
    #[error("field size q^2 = {size} exceeds the size bound {bound}")]
    SizeBound { size: u128, bound: u64 },
    #[error("division by zero")]
    DivisionByZero,
    #[error("{ell} does not divide q^2 - 1 = {order}")]
    NotADivisor { ell: u64, order: u64 },
    #[error("coefficient vector has length {got}, expected {expected}")]
    BadLength { got: usize, expected: usize },
    #[error("coefficient {0} is not reduced modulo p")]
    BadCoefficient(u64),
}

/// One element of `F_{q^2}`.
#[derive(Clone, Copy, PartialEq, Eq, Hash, Debug, Default)]
pub struct Felt(u32);

impl Felt {
    pub const ZERO: Felt = Felt(0);
    pub const ONE: Felt = Felt(1);

    /// Packed index in `[0, q^2)`; also the position of the element in
    /// [`FieldCtx::elements`].
    #[inline]
    pub fn index(self) -> usize {
        self.0 as usize
    }

    #[inline]
    pub fn is_zero(self) -> bool {
        self.0 == 0
    }
}

/// Immutable description of `F_p ⊂ F_q ⊂ F_{q^2}`.
pub struct FieldCtx {
    p: u32,
    k: u32,
    degree: usize,
    q: u64,
    q2: u64,
    size_bound: u64,
    modulus: Vec<u32>,
    gamma: Felt,
    zeta: Felt,
    // exp_table[i] = gamma^i for i in [0, q^2 - 1); log_table[0] is unused.
    exp_table: Vec<u32>,
    log_table: Vec<u32>,
}

impl fmt::Debug for FieldCtx {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.debug_struct("FieldCtx")
            .field("p", &self.p)
            .field("k", &self.k)
            .field("modulus", &self.modulus)
            .field("gamma", &self.coeffs(self.gamma))
            .finish()
    }
}

impl FieldCtx {
    /// `make_field(p, k)` with the default size bound.
    pub fn new(p: u64, k: u32) -> Result<Self, FieldError> {
        Self::with_bound(p, k, DEFAULT_SIZE_BOUND)
    }

    /// Builds the field deterministically: the modulus is the smallest monic
    /// irreducible of degree `2k` and `gamma` the smallest primitive element,
    /// both in the canonical order (coefficient tuples compared from the
    /// constant term upwards).
    pub fn with_bound(p: u64, k: u32, size_bound: u64) -> Result<Self, FieldError> {
        if p == 2 || !intmath::is_prime(p) {
            return Err(FieldError::NotOddPrime(p));
        }
        if k == 0 {
            return Err(FieldError::ZeroDegree);
        }
        let bound = size_bound.min(MAX_SIZE_BOUND);
        let size = (p as u128).checked_pow(2 * k).unwrap_or(u128::MAX);
        if size > bound as u128 {
            return Err(FieldError::SizeBound { size, bound });
        }
        let degree = 2 * k as usize;
        let q = p.pow(k);
        let q2 = q * q;
        let p32 = p as u32;

        let modulus = smallest_irreducible(p32, degree);
        let mut ctx = FieldCtx {
            p: p32,
            k,
            degree,
            q,
            q2,
            size_bound: bound,
            modulus,
            gamma: Felt::ZERO,
            zeta: Felt::ZERO,
            exp_table: Vec::new(),
            log_table: Vec::new(),
        };
        ctx.gamma = ctx.smallest_primitive();
        ctx.build_tables();
        ctx.zeta = ctx.pow(ctx.gamma, q - 1);
        Ok(ctx)
    }

    pub fn p(&self) -> u64 {
        self.p as u64
    }
    pub fn k(&self) -> u32 {
        self.k
    }
    pub fn q(&self) -> u64 {
        self.q
    }
    pub fn q2(&self) -> u64 {
        self.q2
    }
    /// Order of the multiplicative group, `q^2 - 1`.
    pub fn order(&self) -> u64 {
        self.q2 - 1
    }
    pub fn size_bound(&self) -> u64 {
        self.size_bound
    }
    /// Modulus coefficients, constant term first, length `2k + 1`.
    pub fn modulus(&self) -> Vec<u64> {
        self.modulus.iter().map(|&c| c as u64).collect()
    }
    pub fn gamma(&self) -> Felt {
        self.gamma
    }
    /// `gamma^(q-1)`, a generator of `mu_{q+1}`.
    pub fn zeta(&self) -> Felt {
        self.zeta
    }

    pub fn zero(&self) -> Felt {
        Felt::ZERO
    }
    pub fn one(&self) -> Felt {
        Felt::ONE
    }

    /// All field elements in packed-index order.
    pub fn elements(&self) -> impl Iterator<Item = Felt> + Clone {
        (0..self.q2 as u32).map(Felt)
    }

    pub fn element_at(&self, index: usize) -> Felt {
        assert!((index as u64) < self.q2, "element index out of range");
        Felt(index as u32)
    }

    /// The image of an integer in the prime field.
    pub fn from_int(&self, n: i64) -> Felt {
        Felt(n.rem_euclid(self.p as i64) as u32)
    }

    pub fn from_coeffs(&self, coeffs: &[u64]) -> Result<Felt, FieldError> {
        if coeffs.len() != self.degree {
            return Err(FieldError::BadLength {
                got: coeffs.len(),
                expected: self.degree,
            });
        }
        let mut packed = 0u64;
        for &c in coeffs.iter().rev() {
            if c >= self.p as u64 {
                return Err(FieldError::BadCoefficient(c));
            }
            packed = packed * self.p as u64 + c;
        }
        Ok(Felt(packed as u32))
    }

    /// Coefficient vector, constant term first.
    pub fn coeffs(&self, a: Felt) -> Vec<u64> {
        let mut out = Vec::with_capacity(self.degree);
        let mut v = a.0;
        for _ in 0..self.degree {
            out.push((v % self.p) as u64);
            v /= self.p;
        }
        out
    }

    /// Canonical order: coefficient tuples compared lexicographically,
    /// constant term first.
    pub fn canonical_cmp(&self, a: Felt, b: Felt) -> Ordering {
        self.coeffs(a).cmp(&self.coeffs(b))
    }

    /// Short text form: prime-field elements as integers, everything else as
    /// a power of `gamma`.
    pub fn render(&self, a: Felt) -> String {
        if self.in_prime_field(a) {
            a.0.to_string()
        } else {
            format!("γ^{}", self.log_table[a.index()])
        }
    }

    /// True when `a` lies in the prime field.
    pub fn in_prime_field(&self, a: Felt) -> bool {
        a.0 < self.p
    }

    #[inline]
    pub fn add(&self, a: Felt, b: Felt) -> Felt {
        let p = self.p;
        let (mut x, mut y) = (a.0, b.0);
        let (mut out, mut place) = (0u32, 1u32);
        for _ in 0..self.degree {
            let s = x % p + y % p;
            out += (if s >= p { s - p } else { s }) * place;
            x /= p;
            y /= p;
            place = place.wrapping_mul(p);
        }
        Felt(out)
    }

    #[inline]
    pub fn neg(&self, a: Felt) -> Felt {
        let p = self.p;
        let mut x = a.0;
        let (mut out, mut place) = (0u32, 1u32);
        for _ in 0..self.degree {
            let c = x % p;
            if c != 0 {
                out += (p - c) * place;
            }
            x /= p;
            place = place.wrapping_mul(p);
        }
        Felt(out)
    }

    #[inline]
    pub fn sub(&self, a: Felt, b: Felt) -> Felt {
        self.add(a, self.neg(b))
    }

    #[inline]
    pub fn mul(&self, a: Felt, b: Felt) -> Felt {
        if a.is_zero() || b.is_zero() {
            return Felt::ZERO;
        }
        let n = self.order();
        let s = self.log_table[a.index()] as u64 + self.log_table[b.index()] as u64;
        Felt(self.exp_table[(if s >= n { s - n } else { s }) as usize])
    }

    pub fn inv(&self, a: Felt) -> Result<Felt, FieldError> {
        if a.is_zero() {
            return Err(FieldError::DivisionByZero);
        }
        let l = self.log_table[a.index()] as u64;
        Ok(Felt(
            self.exp_table[((self.order() - l) % self.order()) as usize],
        ))
    }

    pub fn div(&self, a: Felt, b: Felt) -> Result<Felt, FieldError> {
        Ok(self.mul(a, self.inv(b)?))
    }

    /// `a^e` for a non-negative exponent; `0^0 = 1`.
    pub fn pow(&self, a: Felt, e: u64) -> Felt {
        if e == 0 {
            return Felt::ONE;
        }
        if a.is_zero() {
            return Felt::ZERO;
        }
        let n = self.order() as u128;
        let l = self.log_table[a.index()] as u128 * (e as u128 % n) % n;
        Felt(self.exp_table[l as usize])
    }

    /// `a^e` for any integer exponent; negative exponents need `a != 0`.
    /// Exponents are reduced modulo `q^2 - 1` for nonzero bases.
    pub fn powi(&self, a: Felt, e: i128) -> Result<Felt, FieldError> {
        if e >= 0 {
            let n = self.order() as i128;
            if a.is_zero() {
                return Ok(if e == 0 { Felt::ONE } else { Felt::ZERO });
            }
            return Ok(self.pow(a, (e % n) as u64));
        }
        if a.is_zero() {
            return Err(FieldError::DivisionByZero);
        }
        let n = self.order() as i128;
        Ok(self.pow(a, e.rem_euclid(n) as u64))
    }

    /// Discrete logarithm to base `gamma`.
    pub fn log(&self, a: Felt) -> Option<u64> {
        (!a.is_zero()).then(|| self.log_table[a.index()] as u64)
    }

    /// `gamma^e`.
    pub fn gamma_pow(&self, e: i128) -> Felt {
        Felt(self.exp_table[e.rem_euclid(self.order() as i128) as usize])
    }

    /// `a ↦ a^q`, the generator of `Gal(F_{q^2}/F_q)`.
    pub fn frobenius_q(&self, a: Felt) -> Felt {
        self.pow(a, self.q)
    }

    /// Membership in `mu_ell`, the group of `ell`-th roots of unity.
    pub fn in_mu(&self, a: Felt, ell: u64) -> Result<bool, FieldError> {
        if ell == 0 || !self.order().is_multiple_of(ell) {
            return Err(FieldError::NotADivisor {
                ell,
                order: self.order(),
            });
        }
        Ok(!a.is_zero() && self.pow(a, ell) == Felt::ONE)
    }

    /// Membership in `mu_{q+1}`, the norm-one subgroup.
    pub fn in_mu_q1(&self, a: Felt) -> bool {
        !a.is_zero() && self.pow(a, self.q + 1) == Felt::ONE
    }

    /// The `q + 1` elements of `mu_{q+1}` as `zeta^0, zeta^1, ...`.
    pub fn mu_q1(&self) -> Vec<Felt> {
        let mut out = Vec::with_capacity(self.q as usize + 1);
        let mut z = Felt::ONE;
        for _ in 0..=self.q {
            out.push(z);
            z = self.mul(z, self.zeta);
        }
        out
    }

    /// `gamma^(l(q-1)) = zeta^l`, with `l` taken modulo `q + 1`.
    pub fn alpha_from_l(&self, l: i64) -> Felt {
        let l = l.rem_euclid(self.q as i64 + 1) as u64;
        self.pow(self.zeta, l)
    }

    pub fn is_square(&self, a: Felt) -> bool {
        a.is_zero() || self.pow(a, self.order() / 2) == Felt::ONE
    }

    /// Square roots of `a`: empty for non-squares, `[0]` for zero, and
    /// `[r, -r]` with `r` the canonically smaller root otherwise.
    pub fn sqrt(&self, a: Felt) -> Vec<Felt> {
        if a.is_zero() {
            return vec![Felt::ZERO];
        }
        let root = if self.q2 <= EXHAUSTIVE_SQRT_LIMIT {
            self.sqrt_exhaustive(a)
        } else {
            self.sqrt_tonelli_shanks(a)
        };
        match root {
            None => Vec::new(),
            Some(r) => {
                let s = self.neg(r);
                if self.canonical_cmp(r, s) == Ordering::Less {
                    vec![r, s]
                } else {
                    vec![s, r]
                }
            }
        }
    }

    /// The canonical (smaller) square root, if any.
    pub fn sqrt_canonical(&self, a: Felt) -> Option<Felt> {
        self.sqrt(a).first().copied()
    }

    /// One square root of nonzero `a` by scanning the field.
    pub fn sqrt_exhaustive(&self, a: Felt) -> Option<Felt> {
        self.elements().skip(1).find(|&x| self.mul(x, x) == a)
    }

    /// One square root of nonzero `a` by Tonelli-Shanks; `gamma` serves as
    /// the quadratic non-residue.
    pub fn sqrt_tonelli_shanks(&self, a: Felt) -> Option<Felt> {
        if a.is_zero() {
            return Some(Felt::ZERO);
        }
        if !self.is_square(a) {
            return None;
        }
        let n = self.order();
        let s = n.trailing_zeros();
        let t = n >> s;
        let mut m = s;
        let mut c = self.pow(self.gamma, t);
        let mut x = self.pow(a, t.div_ceil(2));
        let mut b = self.pow(a, t);
        while b != Felt::ONE {
            let mut i = 0;
            let mut b2 = b;
            while b2 != Felt::ONE {
                b2 = self.mul(b2, b2);
                i += 1;
            }
            let mut d = c;
            for _ in 0..(m - i - 1) {
                d = self.mul(d, d);
            }
            x = self.mul(x, d);
            c = self.mul(d, d);
            b = self.mul(b, c);
            m = i;
        }
        Some(x)
    }

    /// Reference product: schoolbook multiplication of coefficient vectors
    /// followed by reduction modulo the defining polynomial.
    pub fn mul_schoolbook(&self, a: Felt, b: Felt) -> Felt {
        let x: Vec<u32> = self.coeffs(a).into_iter().map(|c| c as u32).collect();
        let y: Vec<u32> = self.coeffs(b).into_iter().map(|c| c as u32).collect();
        let prod = fp_poly::mul_mod(&x, &y, &self.modulus, self.p);
        self.pack(&prod)
    }

    /// Multiplicative order of nonzero `a`, from the factorisation of `q^2-1`.
    pub fn multiplicative_order(&self, a: Felt) -> Option<u64> {
        if a.is_zero() {
            return None;
        }
        let mut ord = self.order();
        for ell in intmath::prime_factors(self.order()) {
            while ord.is_multiple_of(ell) && self.pow(a, ord / ell) == Felt::ONE {
                ord /= ell;
            }
        }
        Some(ord)
    }

    fn pack(&self, digits: &[u32]) -> Felt {
        let mut packed = 0u32;
        for i in (0..self.degree).rev() {
            packed = packed * self.p + digits.get(i).copied().unwrap_or(0);
        }
        Felt(packed)
    }

    // Canonical order puts c0 most significant, so the i-th element in that
    // order has base-p digits of i read from the top.
    fn canonical_nth(&self, i: u64) -> Vec<u32> {
        let mut digits = vec![0u32; self.degree];
        let mut v = i;
        for slot in digits.iter_mut().rev() {
            *slot = (v % self.p as u64) as u32;
            v /= self.p as u64;
        }
        digits
    }

    fn smallest_primitive(&self) -> Felt {
        let n = self.order();
        let factors = intmath::prime_factors(n);
        (1..self.q2)
            .map(|i| self.pack(&self.canonical_nth(i)))
            .find(|&g| {
                factors
                    .iter()
                    .all(|&ell| self.pow_schoolbook(g, n / ell) != Felt::ONE)
            })
            .expect("multiplicative group of a finite field is cyclic")
    }

    fn pow_schoolbook(&self, a: Felt, mut e: u64) -> Felt {
        let mut acc = Felt::ONE;
        let mut base = a;
        while e > 0 {
            if e & 1 == 1 {
                acc = self.mul_schoolbook(acc, base);
            }
            base = self.mul_schoolbook(base, base);
            e >>= 1;
        }
        acc
    }

    fn build_tables(&mut self) {
        let n = self.order() as usize;
        let mut exp_table = Vec::with_capacity(n);
        let mut log_table = vec![0u32; self.q2 as usize];
        let g: Vec<u32> = self
            .coeffs(self.gamma)
            .into_iter()
            .map(|c| c as u32)
            .collect();
        let mut cur = vec![0u32; self.degree];
        cur[0] = 1;
        for i in 0..n {
            let packed = self.pack(&cur);
            exp_table.push(packed.0);
            log_table[packed.index()] = i as u32;
            cur = fp_poly::mul_mod(&cur, &g, &self.modulus, self.p);
        }
        debug_assert_eq!(self.pack(&cur), Felt::ONE);
        self.exp_table = exp_table;
        self.log_table = log_table;
    }
}

// Smallest monic irreducible of the given degree over F_p, scanning the
// lower coefficients in canonical order.
fn smallest_irreducible(p: u32, degree: usize) -> Vec<u32> {
    let total = (p as u64).pow(degree as u32);
    for i in 0..total {
        let mut f = vec![0u32; degree + 1];
        let mut v = i;
        for slot in f[..degree].iter_mut().rev() {
            *slot = (v % p as u64) as u32;
            v /= p as u64;
        }
        f[degree] = 1;
        if fp_poly::is_irreducible(&f, p) {
            return f;
        }
    }
    unreachable!("irreducible polynomials exist in every degree")
}

/// Dense polynomials over `F_p`, constant term first. Only used to pick and
/// apply the defining polynomial.
pub(crate) mod fp_poly {
    fn trim(mut a: Vec<u32>) -> Vec<u32> {
        while a.last() == Some(&0) {
            a.pop();
        }
        a
    }

    fn inv_mod(a: u32, p: u32) -> u32 {
        crate::intmath::pow_mod(a as u64, p as u64 - 2, p as u64) as u32
    }

    /// Remainder of `a` modulo the monic or non-monic nonzero `m`.
    pub fn rem(a: &[u32], m: &[u32], p: u32) -> Vec<u32> {
        let m = trim(m.to_vec());
        let dm = m.len() - 1;
        let lead_inv = inv_mod(m[dm], p) as u64;
        let mut r: Vec<u64> = a.iter().map(|&c| c as u64).collect();
        let p64 = p as u64;
        while r.len() > dm {
            let top = r.len() - 1;
            let c = r[top] % p64 * lead_inv % p64;
            if c != 0 {
                for (j, &mj) in m.iter().enumerate() {
                    let idx = top - dm + j;
                    r[idx] = (r[idx] + p64 - c * mj as u64 % p64) % p64;
                }
            }
            r.pop();
        }
        trim(r.into_iter().map(|c| (c % p64) as u32).collect())
    }

    pub fn mul_mod(a: &[u32], b: &[u32], m: &[u32], p: u32) -> Vec<u32> {
        if a.is_empty() || b.is_empty() {
            return Vec::new();
        }
        let p64 = p as u64;
        let mut prod = vec![0u64; a.len() + b.len() - 1];
        for (i, &x) in a.iter().enumerate() {
            if x == 0 {
                continue;
            }
            for (j, &y) in b.iter().enumerate() {
                prod[i + j] = (prod[i + j] + x as u64 * y as u64) % p64;
            }
        }
        let prod: Vec<u32> = prod.into_iter().map(|c| c as u32).collect();
        rem(&prod, m, p)
    }

    fn pow_mod(base: &[u32], mut e: u64, m: &[u32], p: u32) -> Vec<u32> {
        let mut acc = vec![1u32];
        let mut b = rem(base, m, p);
        while e > 0 {
            if e & 1 == 1 {
                acc = mul_mod(&acc, &b, m, p);
            }
            b = mul_mod(&b, &b, m, p);
            e >>= 1;
        }
        acc
    }

    fn gcd(a: &[u32], b: &[u32], p: u32) -> Vec<u32> {
        let (mut a, mut b) = (trim(a.to_vec()), trim(b.to_vec()));
        while !b.is_empty() {
            let r = rem(&a, &b, p);
            a = b;
            b = r;
        }
        a
    }

    /// `f` is irreducible iff it shares no factor with `x^(p^d) - x` for
    /// every `d <= deg f / 2`.
    pub fn is_irreducible(f: &[u32], p: u32) -> bool {
        let deg = f.len() - 1;
        if f[0] == 0 {
            return deg == 1;
        }
        let mut frob = vec![0u32, 1u32];
        for _ in 1..=deg / 2 {
            frob = pow_mod(&frob, p as u64, f, p);
            let mut h = frob.clone();
            h.resize(h.len().max(2), 0);
            h[1] = (h[1] + p - 1) % p;
            if gcd(f, &h, p).len() > 1 {
                return false;
            }
        }
        true
    }
}
