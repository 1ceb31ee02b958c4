//! Elementary number theory shared by the deciders: multiplicative orders,
//! power-congruence solving, and factorization of small integers.

use crate::error::{Error, Result};

/// Greatest common divisor.
pub fn gcd(mut a: u64, mut b: u64) -> u64 {
    while b != 0 {
        let t = a % b;
        a = b;
        b = t;
    }
    a
}

/// Least common multiple. Panics on overflow; inputs in this crate stay far below 2^32.
pub fn lcm(a: u64, b: u64) -> u64 {
    if a == 0 || b == 0 {
        return 0;
    }
    a / gcd(a, b) * b
}

/// `base^exp mod modulus` with 128-bit intermediates. `modulus >= 1`.
pub fn mod_pow(base: u64, mut exp: u64, modulus: u64) -> u64 {
    assert!(modulus >= 1, "zero modulus");
    if modulus == 1 {
        return 0;
    }
    let m = modulus as u128;
    let mut acc: u128 = 1;
    let mut b = (base as u128) % m;
    while exp > 0 {
        if exp & 1 == 1 {
            acc = acc * b % m;
        }
        b = b * b % m;
        exp >>= 1;
    }
    acc as u64
}

/// Primality by trial division; adequate for the magnitudes in scope (< 2^32).
pub fn is_prime(n: u64) -> bool {
    if n < 2 {
        return false;
    }
    if n % 2 == 0 {
        return n == 2;
    }
    let mut d = 3u64;
    while d * d <= n {
        if n % d == 0 {
            return false;
        }
        d += 2;
    }
    true
}

/// Prime factorization of a positive integer, primes strictly increasing.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Factorization {
    value: u64,
    factors: Vec<(u64, u32)>,
}

impl Factorization {
    pub fn value(&self) -> u64 {
        self.value
    }

    /// `(prime, multiplicity)` pairs with primes strictly increasing.
    pub fn factors(&self) -> &[(u64, u32)] {
        &self.factors
    }

    pub fn primes(&self) -> impl Iterator<Item = u64> + '_ {
        self.factors.iter().map(|&(p, _)| p)
    }

    /// Euler's totient of the factored value.
    pub fn euler_phi(&self) -> u64 {
        let mut phi = 1u64;
        for &(p, e) in &self.factors {
            phi *= p.pow(e - 1) * (p - 1);
        }
        phi
    }
}

/// Factor `n >= 1` by trial division.
pub fn factorize(mut n: u64) -> Factorization {
    assert!(n >= 1, "factorize requires n >= 1");
    let value = n;
    let mut factors = Vec::new();
    let mut p = 2u64;
    while p * p <= n {
        if n % p == 0 {
            let mut e = 0u32;
            while n % p == 0 {
                n /= p;
                e += 1;
            }
            factors.push((p, e));
        }
        p += if p == 2 { 1 } else { 2 };
    }
    if n > 1 {
        factors.push((n, 1));
    }
    debug_assert!(factors
        .iter()
        .fold(1u64, |acc, &(p, e)| acc * p.pow(e))
        .eq(&value));
    Factorization { value, factors }
}

/// Splits `q` as `p^k` with `p` prime, or reports that `q` is not a prime power.
pub fn prime_power_split(q: u64) -> Result<(u64, u32)> {
    if q < 2 {
        return Err(Error::NotPrimePower(q));
    }
    let f = factorize(q);
    match f.factors() {
        [(p, e)] => Ok((*p, *e)),
        _ => Err(Error::NotPrimePower(q)),
    }
}

/// Least `t >= 1` with `a^t = 1 (mod n)`. Requires `n >= 2` and `gcd(a, n) = 1`.
///
/// The order is found by reducing the group order `phi(n)` prime by prime,
/// so absence of any smaller exponent is certified without a linear scan.
pub fn mul_order(a: u64, n: u64) -> Result<u64> {
    if n < 2 {
        return Err(Error::BadModulus(n));
    }
    let a = a % n;
    if gcd(a, n) != 1 {
        return Err(Error::NotCoprime { a, n });
    }
    let phi = factorize(n).euler_phi();
    let mut t = phi;
    for p in factorize(phi).primes() {
        while t % p == 0 && mod_pow(a, t / p, n) == 1 {
            t /= p;
        }
    }
    debug_assert_eq!(mod_pow(a, t, n), 1);
    Ok(t)
}

/// Multiplicative order of `a` modulo `p^n` for odd prime `p`, by the closed
/// formula: with `d = ord_p(a)` and `p^h` exactly dividing `a^d - 1`, the
/// order is `d` when `n <= h` and `p^(n-h) * d` otherwise.
pub fn ord_prime_power(a: u64, p: u64, n: u32) -> Result<u64> {
    if p == 2 || !is_prime(p) {
        return Err(Error::NotPrime(p));
    }
    if n == 0 {
        return Err(Error::BadModulus(1));
    }
    if a % p == 0 {
        return Err(Error::NotCoprime { a: a % p, n: p });
    }
    let pn = p
        .checked_pow(n)
        .filter(|&pn| pn < (1 << 62))
        .ok_or(Error::SizeBound {
            what: "prime power modulus",
            value: p as u128,
            bound: 1 << 62,
        })?;
    let d = mul_order(a % p, p)?;
    // h is capped at n: the formula only consults h when h < n.
    let ad = mod_pow(a % pn, d, pn);
    if ad == 1 {
        return Ok(d);
    }
    let mut rem = ad - 1;
    let mut h = 0u32;
    while rem % p == 0 {
        rem /= p;
        h += 1;
    }
    debug_assert!(h >= 1 && h < n);
    Ok(p.pow(n - h) * d)
}

/// Normalizes a possibly negative residue into `[0, m)`.
pub fn normalize_mod(v: i64, m: u64) -> u64 {
    debug_assert!(m >= 1);
    let m_i = m as i128;
    ((v as i128).rem_euclid(m_i)) as u64
}

/// Least `t >= 1` with `q^t = v (mod m)`, or `None` when no power of `q`
/// hits `v`. Requires `gcd(q, m) = 1`; `v` may be negative and is reduced
/// modulo `m` first. For `m = 1` the answer is `t = 1`.
///
/// Powers of `q` repeat with period `mul_order(q, m)`, so the bounded search
/// certifies absence.
pub fn solve_power_congruence(q: u64, v: i64, m: u64) -> Result<Option<u64>> {
    if m == 0 {
        return Err(Error::BadModulus(0));
    }
    if m == 1 {
        return Ok(Some(1));
    }
    let q = q % m;
    if gcd(q, m) != 1 {
        return Err(Error::NotCoprime { a: q, n: m });
    }
    let target = normalize_mod(v, m);
    let order = mul_order(q, m)?;
    let mut pow = 1u64;
    for t in 1..=order {
        pow = (pow as u128 * q as u128 % m as u128) as u64;
        if pow == target {
            return Ok(Some(t));
        }
    }
    Ok(None)
}

#[cfg(test)]
mod tests {
    use super::*;

    /// Independent oracle: order by direct repeated multiplication.
    fn brute_order(a: u64, n: u64) -> u64 {
        let mut x = a % n;
        let mut t = 1;
        while x != 1 {
            x = x * (a % n) % n;
            t += 1;
        }
        t
    }

    #[test]
    fn mul_order_examples() {
        // 2, 4, 1 mod 7
        assert_eq!(mul_order(2, 7).unwrap(), 3);
        assert_eq!(mul_order(1, 5).unwrap(), 1);
        // Lemma-style cross-check for (2, 9): d = ord_3(2) = 2, h = 1, 3^(2-1)*2 = 6.
        assert_eq!(mul_order(2, 9).unwrap(), 6);
        assert_eq!(brute_order(2, 9), 6);
    }

    #[test]
    fn mul_order_rejects_bad_input() {
        assert!(matches!(mul_order(2, 1), Err(Error::BadModulus(1))));
        assert!(matches!(mul_order(3, 9), Err(Error::NotCoprime { .. })));
        assert!(matches!(mul_order(6, 4), Err(Error::NotCoprime { .. })));
    }

    #[test]
    fn mul_order_agrees_with_scan() {
        for n in 2..400u64 {
            for a in 1..n {
                if gcd(a, n) == 1 {
                    assert_eq!(mul_order(a, n).unwrap(), brute_order(a, n), "a={a} n={n}");
                }
            }
        }
    }

    #[test]
    fn ord_prime_power_examples() {
        assert_eq!(ord_prime_power(2, 3, 2).unwrap(), 6);
        assert_eq!(ord_prime_power(2, 7, 1).unwrap(), 3);
        assert_eq!(ord_prime_power(4, 5, 2).unwrap(), 10);
    }

    #[test]
    fn ord_prime_power_rejects_bad_input() {
        assert!(matches!(ord_prime_power(3, 2, 2), Err(Error::NotPrime(2))));
        assert!(matches!(ord_prime_power(3, 9, 1), Err(Error::NotPrime(9))));
        assert!(matches!(
            ord_prime_power(6, 3, 2),
            Err(Error::NotCoprime { .. })
        ));
    }

    #[test]
    fn ord_prime_power_matches_mul_order() {
        for p in [3u64, 5, 7, 11, 13] {
            let mut n = 1u32;
            while p.pow(n) <= 4000 {
                let pn = p.pow(n);
                for a in 2..pn.min(200) {
                    if a % p != 0 && a != 1 && a != pn - 1 {
                        assert_eq!(
                            ord_prime_power(a, p, n).unwrap(),
                            mul_order(a, pn).unwrap(),
                            "a={a} p={p} n={n}"
                        );
                    }
                }
                n += 1;
            }
        }
    }

    #[test]
    fn solve_power_congruence_examples() {
        // 2^3 = 8 = -1 (mod 9)
        assert_eq!(solve_power_congruence(2, -1, 9).unwrap(), Some(3));
        // no power of 2 is -1 mod 15 (powers cycle 2, 4, 8, 1)
        assert_eq!(solve_power_congruence(2, -1, 15).unwrap(), None);
        // identity target is hit exactly at the order
        for (q, m) in [(2u64, 9u64), (3, 7), (5, 13)] {
            assert_eq!(
                solve_power_congruence(q, 1, m).unwrap(),
                Some(mul_order(q, m).unwrap())
            );
        }
        assert_eq!(solve_power_congruence(7, -5, 1).unwrap(), Some(1));
        assert!(matches!(
            solve_power_congruence(3, 1, 9),
            Err(Error::NotCoprime { .. })
        ));
    }

    #[test]
    fn solve_power_congruence_minimality_and_membership() {
        // t is returned iff v lies in <q> mod m, and is minimal.
        for m in 2..120u64 {
            for q in 2..m {
                if gcd(q, m) != 1 {
                    continue;
                }
                let order = mul_order(q, m).unwrap();
                let cyclic: Vec<u64> = (1..=order).map(|t| mod_pow(q, t, m)).collect();
                for v in 0..m {
                    let got = solve_power_congruence(q, v as i64, m).unwrap();
                    match got {
                        Some(t) => {
                            assert_eq!(mod_pow(q, t, m), v);
                            for smaller in 1..t {
                                assert_ne!(mod_pow(q, smaller, m), v);
                            }
                        }
                        None => assert!(!cyclic.contains(&v)),
                    }
                }
            }
        }
    }

    #[test]
    fn factorization_invariants() {
        for n in 1..5000u64 {
            let f = factorize(n);
            assert_eq!(f.value(), n);
            let mut acc = 1u64;
            let mut last = 0u64;
            for &(p, e) in f.factors() {
                assert!(is_prime(p));
                assert!(p > last);
                last = p;
                acc *= p.pow(e);
            }
            assert_eq!(acc, n);
        }
    }

    #[test]
    fn prime_power_split_examples() {
        assert_eq!(prime_power_split(9).unwrap(), (3, 2));
        assert_eq!(prime_power_split(2).unwrap(), (2, 1));
        assert_eq!(prime_power_split(32).unwrap(), (2, 5));
        assert!(prime_power_split(6).is_err());
        assert!(prime_power_split(1).is_err());
    }
}
