//! Scalar arithmetic modulo a small prime, plus the Lucas rule for
//! binomial coefficients in characteristic `p`.

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

/// Reduce a signed integer into `[0, p)`.
pub fn normalize(p: u64, c: i64) -> u64 {
    let m = p as i64;
    (((c % m) + m) % m) as u64
}

pub fn add(p: u64, a: u64, b: u64) -> u64 {
    (a + b) % p
}

pub fn sub(p: u64, a: u64, b: u64) -> u64 {
    (a + p - b % p) % p
}

pub fn mul(p: u64, a: u64, b: u64) -> u64 {
    ((a as u128 * b as u128) % p as u128) as u64
}

pub fn pow(p: u64, mut base: u64, mut exp: u64) -> u64 {
    base %= p;
    let mut acc = 1u64;
    while exp > 0 {
        if exp & 1 == 1 {
            acc = mul(p, acc, base);
        }
        base = mul(p, base, base);
        exp >>= 1;
    }
    acc
}

pub fn inv(p: u64, a: u64) -> u64 {
    assert!(!a.is_multiple_of(p), "inverse of zero mod {p}");
    pow(p, a, p - 2)
}

/// `binom(n, k) mod p` by the Lucas rule on base-`p` digits.
pub fn lucas_binom(p: u64, n: u64, k: u64) -> u64 {
    if k > n {
        return 0;
    }
    let mut n = n;
    let mut k = k;
    let mut acc = 1u64;
    while k > 0 || n > 0 {
        let nd = n % p;
        let kd = k % p;
        if kd > nd {
            return 0;
        }
        acc = mul(p, acc, small_binom(p, nd, kd));
        n /= p;
        k /= p;
    }
    acc
}

fn small_binom(p: u64, n: u64, k: u64) -> u64 {
    // n, k < p here, so the product formula stays in range.
    let k = k.min(n - k);
    let mut num = 1u64;
    let mut den = 1u64;
    for i in 0..k {
        num = mul(p, num, n - i);
        den = mul(p, den, i + 1);
    }
    mul(p, num, inv(p, den.max(1)))
}
