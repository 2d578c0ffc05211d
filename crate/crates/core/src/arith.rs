//! Small number-theoretic helpers: sieving, primality and factorization of
//! the (possibly huge) group orders produced by Smith normal forms.

use std::collections::BTreeMap;

use num_bigint::BigUint;
use num_integer::Integer;
use num_traits::{One, ToPrimitive, Zero};

/// All primes `<= bound`, ascending (sieve of Eratosthenes).
pub fn primes_up_to(bound: u64) -> Vec<u64> {
    if bound < 2 {
        return Vec::new();
    }
    let bound = bound as usize;
    let mut composite = vec![false; bound + 1];
    let mut out = Vec::new();
    for i in 2..=bound {
        if composite[i] {
            continue;
        }
        out.push(i as u64);
        let mut j = i * i;
        while j <= bound {
            composite[j] = true;
            j += i;
        }
    }
    out
}

fn mul_mod(a: u64, b: u64, m: u64) -> u64 {
    ((a as u128 * b as u128) % m as u128) as u64
}

fn pow_mod(mut b: u64, mut e: u64, m: u64) -> u64 {
    let mut r = 1 % m;
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

/// Deterministic Miller–Rabin for 64-bit integers.
pub fn is_prime_u64(n: u64) -> bool {
    if n < 2 {
        return false;
    }
    const SMALL: [u64; 12] = [2, 3, 5, 7, 11, 13, 17, 19, 23, 29, 31, 37];
    for &p in &SMALL {
        if n.is_multiple_of(p) {
            return n == p;
        }
    }
    let s = (n - 1).trailing_zeros();
    let d = (n - 1) >> s;
    'witness: for &a in &SMALL {
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

/// Probabilistic Miller–Rabin with fixed bases; exact below 3.3e24.
pub fn is_probable_prime(n: &BigUint) -> bool {
    if let Some(small) = n.to_u64() {
        return is_prime_u64(small);
    }
    if n.is_even() {
        return false;
    }
    let one = BigUint::one();
    let n_minus_one = n - &one;
    let s = n_minus_one.trailing_zeros().unwrap_or(0);
    let d = &n_minus_one >> s;
    const BASES: [u64; 20] = [
        2, 3, 5, 7, 11, 13, 17, 19, 23, 29, 31, 37, 41, 43, 47, 53, 59, 61, 67, 71,
    ];
    'witness: for &a in &BASES {
        let mut x = BigUint::from(a).modpow(&d, n);
        if x == one || x == n_minus_one {
            continue;
        }
        for _ in 1..s {
            x = (&x * &x) % n;
            if x == n_minus_one {
                continue 'witness;
            }
        }
        return false;
    }
    true
}

/// p-adic valuation of a nonzero integer and its p-free cofactor.
pub fn split_valuation(n: &BigUint, p: u64) -> (u32, BigUint) {
    let mut v = 0;
    let mut rest = n.clone();
    if rest.is_zero() {
        return (0, rest);
    }
    let p = BigUint::from(p);
    loop {
        let (q, r) = rest.div_rem(&p);
        if !r.is_zero() {
            break;
        }
        rest = q;
        v += 1;
    }
    (v, rest)
}

pub fn valuation(n: &BigUint, p: u64) -> u32 {
    split_valuation(n, p).0
}

// Brent's variant of Pollard rho. Returns a nontrivial factor of an odd
// composite `n`.
fn pollard_brent(n: &BigUint) -> BigUint {
    let one = BigUint::one();
    let mut c = BigUint::one();
    loop {
        let f = |x: &BigUint| (x * x + &c) % n;
        let mut y = BigUint::from(2u32);
        let mut r: u64 = 1;
        let mut q = BigUint::one();
        let mut g = BigUint::one();
        let mut x = y.clone();
        let mut ys = y.clone();
        const M: u64 = 64;
        while g == one {
            x = y.clone();
            for _ in 0..r {
                y = f(&y);
            }
            let mut k = 0;
            while k < r && g == one {
                ys = y.clone();
                for _ in 0..M.min(r - k) {
                    y = f(&y);
                    let diff = if x > y { &x - &y } else { &y - &x };
                    q = (q * diff) % n;
                }
                g = q.gcd(n);
                k += M;
            }
            r *= 2;
        }
        if &g == n {
            loop {
                ys = f(&ys);
                let diff = if x > ys { &x - &ys } else { &ys - &x };
                g = diff.gcd(n);
                if g != one {
                    break;
                }
            }
        }
        if &g != n {
            return g;
        }
        c += 1u32;
    }
}

/// Prime factorization `n = ∏ p^e`, keyed by prime. `n` must be nonzero.
pub fn factorize(n: &BigUint) -> BTreeMap<BigUint, u32> {
    let mut out = BTreeMap::new();
    if n.is_zero() {
        return out;
    }
    let mut rest = n.clone();
    for p in primes_up_to(1000) {
        if rest.is_one() {
            break;
        }
        let (v, r) = split_valuation(&rest, p);
        if v > 0 {
            out.insert(BigUint::from(p), v);
            rest = r;
        }
    }
    let mut stack = vec![rest];
    while let Some(m) = stack.pop() {
        if m.is_one() {
            continue;
        }
        if is_probable_prime(&m) {
            *out.entry(m).or_insert(0) += 1;
            continue;
        }
        let f = pollard_brent(&m);
        let g = &m / &f;
        stack.push(f);
        stack.push(g);
    }
    out
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn sieve_small() {
        assert_eq!(primes_up_to(20), vec![2, 3, 5, 7, 11, 13, 17, 19]);
        assert!(primes_up_to(1).is_empty());
        assert_eq!(primes_up_to(10_000).len(), 1229);
    }

    #[test]
    fn miller_rabin_agrees_with_sieve() {
        let sieve = primes_up_to(5000);
        for n in 0..5000u64 {
            assert_eq!(is_prime_u64(n), sieve.binary_search(&n).is_ok(), "{n}");
        }
        assert!(is_prime_u64(18_446_744_073_709_551_557));
    }

    #[test]
    fn factorize_semiprime() {
        // (2^61 - 1) * (2^31 - 1) * 7^3
        let p = BigUint::from((1u64 << 61) - 1);
        let q = BigUint::from((1u64 << 31) - 1);
        let n = &p * &q * BigUint::from(343u32);
        let f = factorize(&n);
        assert_eq!(f.len(), 3);
        assert_eq!(f[&p], 1);
        assert_eq!(f[&q], 1);
        assert_eq!(f[&BigUint::from(7u32)], 3);
    }

    #[test]
    fn valuations() {
        let n = BigUint::from(2u32 * 2 * 2 * 3 * 5);
        assert_eq!(split_valuation(&n, 2), (3, BigUint::from(15u32)));
        assert_eq!(valuation(&n, 7), 0);
    }
}
