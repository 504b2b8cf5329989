//! Primality testing and the sieve for primes compatible with a local
//! context, i.e. `q ≡ -1 mod n` with an order-`n` trivialization.

use num_integer::gcd;
use thiserror::Error;

#[derive(Debug, Error, PartialEq, Eq)]
pub enum PrimeError {
    #[error("search bound exhausted before finding {wanted} primes (found {found})")]
    InsufficientPrimes { wanted: usize, found: usize },
}

/// Deterministic Miller-Rabin for `u64` (valid for the full 64-bit range
/// with this witness set).
pub fn is_prime(n: u64) -> bool {
    if n < 2 {
        return false;
    }
    for p in [2u64, 3, 5, 7, 11, 13, 17, 19, 23, 29, 31, 37] {
        if n == p {
            return true;
        }
        if n % p == 0 {
            return false;
        }
    }
    let mut d = n - 1;
    let mut s = 0u32;
    while d % 2 == 0 {
        d /= 2;
        s += 1;
    }
    'witness: for a in [2u64, 3, 5, 7, 11, 13, 17, 19, 23, 29, 31, 37] {
        let mut x = pow_mod(a, d, n);
        if x == 1 || x == n - 1 {
            continue;
        }
        for _ in 1..s {
            x = mul_mod(x, x, n);
            if x == n - 1 {
                continue 'witness;
            }
        }
        return false;
    }
    true
}

fn mul_mod(a: u64, b: u64, m: u64) -> u64 {
    ((a as u128 * b as u128) % m as u128) as u64
}

fn pow_mod(mut b: u64, mut e: u64, m: u64) -> u64 {
    let mut r = 1u64;
    b %= m;
    while e > 0 {
        if e & 1 == 1 {
            r = mul_mod(r, b, m);
        }
        b = mul_mod(b, b, m);
        e >>= 1;
    }
    r
}

/// Whether `(q, n)` passes every arithmetic precondition of a local context:
/// `q` odd prime, `n ≥ 5`, `gcd(n, 6) = 1`, `n | q + 1`, and the
/// trivialization condition `gcd(n, (q² - 1)/n) = 1`.
pub fn context_admissible(q: u64, n: u64) -> bool {
    if n < 5 || gcd(n, 6) != 1 || q < 3 || q % 2 == 0 || !is_prime(q) {
        return false;
    }
    if (q + 1) % n != 0 {
        return false;
    }
    let q2m1 = (q as u128) * (q as u128) - 1;
    gcd(n as u128, q2m1 / n as u128) == 1
}

/// The `count` smallest primes `q ≥ q_min` with `q ≡ -1 mod n` that pass
/// [`context_admissible`], in ascending order.
pub fn local_primes(n: u64, count: usize, q_min: u64) -> Result<Vec<u64>, PrimeError> {
    let mut out = Vec::with_capacity(count);
    // First candidate >= q_min congruent to -1 mod n.
    let mut q = if q_min % n == n - 1 {
        q_min
    } else {
        q_min + (n - 1 + n - q_min % n) % n
    };
    // Desk-scale search cap; the density of valid q is ~1/phi(n) among
    // primes, so this bound is generous.
    let cap = q_min.saturating_add(200_000_000 / n.max(1)).max(10_000_000);
    while out.len() < count && q <= cap {
        if context_admissible(q, n) {
            out.push(q);
        }
        q += n;
    }
    if out.len() < count {
        return Err(PrimeError::InsufficientPrimes {
            wanted: count,
            found: out.len(),
        });
    }
    Ok(out)
}

/// Factorization of a small integer as (prime, exponent) pairs.
pub(crate) fn factorize(mut m: u64) -> Vec<(u64, u32)> {
    let mut out = Vec::new();
    let mut d = 2u64;
    while d * d <= m {
        if m % d == 0 {
            let mut e = 0;
            while m % d == 0 {
                m /= d;
                e += 1;
            }
            out.push((d, e));
        }
        d += 1;
    }
    if m > 1 {
        out.push((m, 1));
    }
    out
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn small_primes() {
        let primes: Vec<u64> = (0..40).filter(|&n| is_prime(n)).collect();
        assert_eq!(primes, vec![2, 3, 5, 7, 11, 13, 17, 19, 23, 29, 31, 37]);
        assert!(is_prime(2_147_483_647));
        assert!(!is_prime(2_147_483_649));
    }

    #[test]
    fn sieve_n5() {
        assert_eq!(local_primes(5, 3, 3).unwrap(), vec![19, 29, 59]);
        assert_eq!(local_primes(5, 1, 20).unwrap(), vec![29]);
    }

    #[test]
    fn sieve_n7() {
        assert_eq!(local_primes(7, 2, 3).unwrap(), vec![13, 41]);
    }

    #[test]
    fn sieve_skips_bad_trivialization() {
        // 149 ≡ -1 mod 5 but 25 | 150, so gcd(5, (149²-1)/5) = 5.
        assert!(!context_admissible(149, 5));
        assert!(local_primes(5, 20, 3).unwrap().iter().all(|&q| q != 149));
        // ...while (149, 25) is admissible.
        assert!(context_admissible(149, 25));
    }

    #[test]
    fn factorize_small() {
        assert_eq!(factorize(360), vec![(2, 3), (3, 2), (5, 1)]);
        assert_eq!(factorize(97), vec![(97, 1)]);
    }
}
