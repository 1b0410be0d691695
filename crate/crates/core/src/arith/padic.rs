//! p-adic logarithm and exponential coefficients on `Z/p^k`.

use crate::ring::{inv_mod, mul_mod, valuation};

/// `p^{v_p(m)}` stripped from `m`, as `(v_p(m), unit part)`.
pub fn split(m: u64, p: u64) -> (u32, u64) {
    let v = valuation(m as u128, p);
    (v, m / p.pow(v))
}

/// `v_p(m!)` by Legendre's formula.
pub fn factorial_valuation(m: u64, p: u64) -> u32 {
    let mut v = 0;
    let mut q = m / p;
    while q > 0 {
        v += q as u32;
        q /= p;
    }
    v
}

/// `p^m / m!` modulo `p^k` (requires `p` odd, where `m - v_p(m!) > 0` for `m > 0`).
pub fn exp_coefficient(m: u64, p: u64, k: u32) -> u64 {
    let pk = p.pow(k);
    let v = m as u32 - factorial_valuation(m, p);
    if v >= k {
        return 0;
    }
    let mut unit = 1u64;
    for i in 2..=m {
        unit = mul_mod(unit, split(i, p).1 % pk, pk);
    }
    mul_mod(p.pow(v), inv_mod(unit, pk).expect("unit part of m!"), pk)
}

/// `log(theta) mod p^k` for an integer `theta = 1 mod p`, `p` odd.
/// Each term `z^m / m` is computed exactly with `v_p(m)` guard digits.
pub fn log_one_plus(theta: u64, p: u64, k: u32) -> Option<u64> {
    let pk = p.pow(k);
    if theta % p != 1 % p {
        return None;
    }
    let z = (theta % pk + pk - 1) % pk;
    let mut acc = 0u64;
    // m - v_p(m) >= k for every m > 2k + 2 when p >= 3
    for m in 1..=(2 * k as u64 + 2) {
        let (vm, um) = split(m, p);
        if m as u32 - vm >= k {
            continue;
        }
        let modulus = p.pow(k + vm) as u128;
        let mut zm = 1u128;
        for _ in 0..m {
            zm = zm * z as u128 % modulus;
        }
        debug_assert_eq!(zm % p.pow(vm) as u128, 0);
        let term = (zm / p.pow(vm) as u128) as u64 % pk;
        let term = mul_mod(term, inv_mod(um % pk, pk)?, pk);
        acc = if m % 2 == 1 { (acc + term) % pk } else { (acc + pk - term) % pk };
    }
    Some(acc)
}

/// `(1/p) log(theta) mod p^{k-1}` for `theta = 1 mod p`.
pub fn ell(theta: u64, p: u64, k: u32) -> Option<u64> {
    let l = log_one_plus(theta, p, k)?;
    debug_assert_eq!(l % p, 0);
    Some((l / p) % p.pow(k - 1))
}
