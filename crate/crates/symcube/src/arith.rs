//! Small integer helpers shared across modules.

/// Deterministic Miller–Rabin for u64 (the listed bases cover the full range).
pub fn is_prime_u64(n: u64) -> bool {
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
    'witness: for &a in &[2u64, 3, 5, 7, 11, 13, 17, 19, 23, 29, 31, 37] {
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

pub fn mul_mod(a: u64, b: u64, m: u64) -> u64 {
    ((a as u128 * b as u128) % m as u128) as u64
}

pub fn pow_mod(mut b: u64, mut e: u64, m: u64) -> u64 {
    let mut acc = 1u64 % m;
    b %= m;
    while e > 0 {
        if e & 1 == 1 {
            acc = mul_mod(acc, b, m);
        }
        b = mul_mod(b, b, m);
        e >>= 1;
    }
    acc
}

/// Sieve of Eratosthenes.
pub fn primes_up_to(n: usize) -> Vec<u64> {
    if n < 2 {
        return Vec::new();
    }
    let mut composite = vec![false; n + 1];
    let mut out = Vec::new();
    for p in 2..=n {
        if !composite[p] {
            out.push(p as u64);
            let mut m = p * p;
            while m <= n {
                composite[m] = true;
                m += p;
            }
        }
    }
    out
}

/// Modular inverse mod prime p.
pub fn inv_mod(a: u64, p: u64) -> u64 {
    pow_mod(a % p, p - 2, p)
}

/// Kronecker symbol (a/n), the usual extension of Jacobi to all integers.
pub fn kronecker_symbol(mut a: i64, mut n: i64) -> i32 {
    if n == 0 {
        return if a.abs() == 1 { 1 } else { 0 };
    }
    if a % 2 == 0 && n % 2 == 0 {
        return 0;
    }
    let mut v = 0;
    while n % 2 == 0 {
        n /= 2;
        v += 1;
    }
    // (a/2) = (-1)^((a^2-1)/8) for odd a
    let tab2 = |x: i64| -> i32 {
        match x & 7 {
            1 | 7 => 1,
            3 | 5 => -1,
            _ => 0,
        }
    };
    let mut k = if v % 2 == 0 { 1 } else { tab2(a) };
    if n < 0 {
        n = -n;
        if a < 0 {
            k = -k;
        }
    }
    loop {
        if a == 0 {
            return if n > 1 { 0 } else { k };
        }
        v = 0;
        while a % 2 == 0 {
            a /= 2;
            v += 1;
        }
        if v % 2 == 1 {
            k *= tab2(n);
        }
        // reciprocity: flip iff both are 3 mod 4
        if a & n & 2 != 0 {
            k = -k;
        }
        let r = a.abs();
        a = n % r;
        n = r;
    }
}

pub fn is_squarefree_u64(n: u64) -> bool {
    let mut m = n;
    let mut p = 2u64;
    while p * p <= m {
        if m % p == 0 {
            m /= p;
            if m % p == 0 {
                return false;
            }
        }
        p += 1;
    }
    true
}

/// Fundamental discriminants index primitive quadratic characters; 1 stands
/// for the trivial character.
pub fn is_fundamental_discriminant(d: i64) -> bool {
    if d == 0 {
        return false;
    }
    if d == 1 {
        return true;
    }
    let r = ((d % 4) + 4) % 4;
    if r == 1 {
        return is_squarefree_u64(d.unsigned_abs());
    }
    if r != 0 {
        return false;
    }
    let m = d / 4;
    let rm = ((m % 4) + 4) % 4;
    (rm == 2 || rm == 3) && is_squarefree_u64(m.unsigned_abs())
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn primality_spot_checks() {
        assert!(is_prime_u64(2));
        assert!(is_prime_u64(691));
        assert!(is_prime_u64(2_305_843_009_213_693_951)); // 2^61 - 1
        assert!(!is_prime_u64(1));
        assert!(!is_prime_u64(561)); // Carmichael
        assert!(!is_prime_u64(25_326_001));
        assert!(!is_prime_u64(3_474_749_660_383)); // strong pseudoprime to several bases
        let ps = primes_up_to(100);
        assert_eq!(ps.len(), 25);
        assert_eq!(ps[24], 97);
    }

    #[test]
    fn inverse_mod_prime() {
        for a in 1..97u64 {
            assert_eq!(mul_mod(a, inv_mod(a, 97), 97), 1);
        }
    }

    #[test]
    fn kronecker_matches_legendre_and_small_characters() {
        // (d/p) against Euler's criterion for odd primes p
        for &p in &[3i64, 5, 7, 11, 13, 97] {
            for d in -30i64..=30 {
                let e = pow_mod(
                    ((d % p + p) % p) as u64,
                    ((p - 1) / 2) as u64,
                    p as u64,
                );
                let want = if e == 0 {
                    0
                } else if e == 1 {
                    1
                } else {
                    -1
                };
                assert_eq!(kronecker_symbol(d, p), want, "d={d} p={p}");
            }
        }
        // chi_{-4} and chi_8 tables
        let m4: Vec<i32> = (1..=8).map(|n| kronecker_symbol(-4, n)).collect();
        assert_eq!(m4, vec![1, 0, -1, 0, 1, 0, -1, 0]);
        let m8: Vec<i32> = (1..=8).map(|n| kronecker_symbol(8, n)).collect();
        assert_eq!(m8, vec![1, 0, -1, 0, -1, 0, 1, 0]);
        // complete multiplicativity in the top argument
        for d in [-20i64, -7, 5, 12, 17] {
            for m in 1..=40i64 {
                for n in 1..=10i64 {
                    assert_eq!(
                        kronecker_symbol(d, m * n),
                        kronecker_symbol(d, m) * kronecker_symbol(d, n)
                    );
                }
            }
        }
    }

    #[test]
    fn fundamental_discriminants_up_to_20() {
        let fund: Vec<i64> = (-20i64..=20)
            .filter(|&d| is_fundamental_discriminant(d))
            .collect();
        assert_eq!(
            fund,
            vec![-20, -19, -15, -11, -8, -7, -4, -3, 1, 5, 8, 12, 13, 17]
        );
    }
}
