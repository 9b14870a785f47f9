//! Integer helpers: gcds, Bezout coefficients, modular inverses, factoring
//! of small integers and binomial coefficients modulo a prime.

/// Non-negative gcd of two signed integers. `gcd(0, 0) == 0`.
pub fn gcd(a: i128, b: i128) -> u128 {
    let (mut a, mut b) = (a.unsigned_abs(), b.unsigned_abs());
    while b != 0 {
        let t = a % b;
        a = b;
        b = t;
    }
    a
}

/// Extended Euclid: returns `(g, x, y)` with `a*x + b*y = g = gcd(a, b) >= 0`.
pub fn ext_gcd(a: i128, b: i128) -> (i128, i128, i128) {
    let (mut old_r, mut r) = (a, b);
    let (mut old_s, mut s) = (1i128, 0i128);
    let (mut old_t, mut t) = (0i128, 1i128);
    while r != 0 {
        let quo = old_r.div_euclid(r);
        (old_r, r) = (r, old_r - quo * r);
        (old_s, s) = (s, old_s - quo * s);
        (old_t, t) = (t, old_t - quo * t);
    }
    if old_r < 0 {
        (-old_r, -old_s, -old_t)
    } else {
        (old_r, old_s, old_t)
    }
}

/// Least non-negative `x` with `a*x ≡ 1 (mod m)`, if it exists.
pub fn mod_inverse(a: i128, m: u128) -> Option<u128> {
    if m == 0 {
        return None;
    }
    if m == 1 {
        return Some(0);
    }
    let m = m as i128;
    let (g, x, _) = ext_gcd(a.rem_euclid(m), m);
    if g != 1 {
        return None;
    }
    Some(x.rem_euclid(m) as u128)
}

pub fn is_prime(n: u64) -> bool {
    if n < 2 {
        return false;
    }
    if n.is_multiple_of(2) {
        return n == 2;
    }
    let mut d = 3u64;
    while d.saturating_mul(d) <= n {
        if n.is_multiple_of(d) {
            return false;
        }
        d += 2;
    }
    true
}

/// Distinct prime factors of `n`, ascending.
pub fn prime_factors(mut n: u64) -> Vec<u64> {
    let mut out = Vec::new();
    let mut d = 2u64;
    while d.saturating_mul(d) <= n {
        if n.is_multiple_of(d) {
            out.push(d);
            while n.is_multiple_of(d) {
                n /= d;
            }
        }
        d += if d == 2 { 1 } else { 2 };
    }
    if n > 1 {
        out.push(n);
    }
    out
}

/// `base^exp mod m` on machine integers.
pub fn pow_mod(base: u64, mut exp: u64, m: u64) -> u64 {
    if m == 1 {
        return 0;
    }
    let m128 = m as u128;
    let mut acc: u128 = 1;
    let mut b = (base % m) as u128;
    while exp > 0 {
        if exp & 1 == 1 {
            acc = acc * b % m128;
        }
        b = b * b % m128;
        exp >>= 1;
    }
    acc as u64
}

/// `C(n, k) mod p` for prime `p`, via Lucas' theorem.
pub fn binomial_mod_p(mut n: u64, mut k: u64, p: u64) -> u64 {
    if k > n {
        return 0;
    }
    let mut acc = 1u64;
    while n > 0 || k > 0 {
        let (ni, ki) = (n % p, k % p);
        if ki > ni {
            return 0;
        }
        acc = (acc as u128 * small_binomial(ni, ki, p) as u128 % p as u128) as u64;
        n /= p;
        k /= p;
    }
    acc
}

// C(n, k) mod p with n < p, so every factor in the denominator is invertible.
fn small_binomial(n: u64, k: u64, p: u64) -> u64 {
    let k = k.min(n - k);
    let (mut num, mut den) = (1u64, 1u64);
    for i in 0..k {
        num = ((num as u128 * ((n - i) % p) as u128) % p as u128) as u64;
        den = ((den as u128 * ((i + 1) % p) as u128) % p as u128) as u64;
    }
    let inv = pow_mod(den, p - 2, p);
    ((num as u128 * inv as u128) % p as u128) as u64
}

#[cfg(test)]
mod tests {
    use super::*;

    fn binomial_exact(n: u64, k: u64) -> u128 {
        let mut acc: u128 = 1;
        for i in 0..k {
            acc = acc * (n - i) as u128 / (i + 1) as u128;
        }
        acc
    }

    #[test]
    fn lucas_matches_exact_binomials() {
        for p in [3u64, 5, 7, 11, 13] {
            for n in 0..60u64 {
                for k in 0..=n {
                    assert_eq!(
                        binomial_mod_p(n, k, p) as u128,
                        binomial_exact(n, k) % p as u128,
                        "C({n},{k}) mod {p}"
                    );
                }
            }
        }
    }

    #[test]
    fn bezout_identity_holds() {
        for a in -40i128..40 {
            for b in -40i128..40 {
                let (g, x, y) = ext_gcd(a, b);
                assert_eq!(a * x + b * y, g);
                assert_eq!(g as u128, gcd(a, b));
            }
        }
    }

    #[test]
    fn inverses() {
        assert_eq!(mod_inverse(3, 16), Some(11));
        assert_eq!(mod_inverse(3, 8), Some(3));
        assert_eq!(mod_inverse(-7, 8), Some(1));
        assert_eq!(mod_inverse(3, 9), None);
    }

    #[test]
    fn factoring() {
        assert_eq!(prime_factors(80), vec![2, 5]);
        assert_eq!(prime_factors(242), vec![2, 11]);
        assert_eq!(prime_factors(624), vec![2, 3, 13]);
        assert_eq!(prime_factors(97), vec![97]);
        assert!(is_prime(1021) && !is_prime(1023) && !is_prime(1));
    }
}
