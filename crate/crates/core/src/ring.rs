//! The coefficient-ring abstraction shared by series and formal group laws.

use std::fmt::Debug;

/// A commutative ring given by a context object; elements carry no context.
pub trait Ring: Clone + Debug + Send + Sync {
    type Elt: Clone + PartialEq + Debug + Send + Sync;

    fn zero(&self) -> Self::Elt;
    fn one(&self) -> Self::Elt;
    fn from_i64(&self, v: i64) -> Self::Elt;
    fn add(&self, a: &Self::Elt, b: &Self::Elt) -> Self::Elt;
    fn sub(&self, a: &Self::Elt, b: &Self::Elt) -> Self::Elt;
    fn neg(&self, a: &Self::Elt) -> Self::Elt;
    fn mul(&self, a: &Self::Elt, b: &Self::Elt) -> Self::Elt;
    fn is_zero(&self, a: &Self::Elt) -> bool;
    /// Multiplicative inverse, `None` for non-units.
    fn inv(&self, a: &Self::Elt) -> Option<Self::Elt>;
    fn format(&self, a: &Self::Elt) -> String;
    /// Short human-readable description, used in reports and fixtures.
    fn describe(&self) -> String;

    fn is_one(&self, a: &Self::Elt) -> bool {
        *a == self.one()
    }

    fn pow(&self, a: &Self::Elt, mut e: u64) -> Self::Elt {
        let mut base = a.clone();
        let mut acc = self.one();
        while e > 0 {
            if e & 1 == 1 {
                acc = self.mul(&acc, &base);
            }
            e >>= 1;
            if e > 0 {
                base = self.mul(&base, &base);
            }
        }
        acc
    }

    fn add_assign(&self, a: &mut Self::Elt, b: &Self::Elt) {
        *a = self.add(a, b);
    }

    fn mul_int(&self, a: &Self::Elt, k: i64) -> Self::Elt {
        self.mul(a, &self.from_i64(k))
    }
}

#[inline]
pub(crate) fn mul_mod(a: u64, b: u64, m: u64) -> u64 {
    if (a | b) >> 32 == 0 {
        (a * b) % m
    } else {
        ((a as u128 * b as u128) % m as u128) as u64
    }
}

/// Reduce a signed integer into `[0, m)`.
#[inline]
pub(crate) fn reduce_i64(v: i64, m: u64) -> u64 {
    v.rem_euclid(m as i64) as u64
}

/// Inverse of `a` modulo `m` for `gcd(a, m) = 1`.
pub(crate) fn inv_mod(a: u64, m: u64) -> Option<u64> {
    let (mut old_r, mut r) = (a as i128 % m as i128, m as i128);
    let (mut old_s, mut s) = (1i128, 0i128);
    while r != 0 {
        let q = old_r / r;
        (old_r, r) = (r, old_r - q * r);
        (old_s, s) = (s, old_s - q * s);
    }
    if old_r != 1 {
        return if m == 1 { Some(0) } else { None };
    }
    Some(old_s.rem_euclid(m as i128) as u64)
}

/// p-adic valuation of a nonzero integer.
pub fn valuation(mut v: u128, p: u64) -> u32 {
    if v == 0 {
        return u32::MAX;
    }
    let p = p as u128;
    let mut e = 0;
    while v % p == 0 {
        v /= p;
        e += 1;
    }
    e
}

pub fn is_prime(p: u64) -> bool {
    if p < 2 {
        return false;
    }
    let mut d = 2;
    while d * d <= p {
        if p % d == 0 {
            return false;
        }
        d += 1;
    }
    true
}

/// `p^e`, or `None` on overflow.
pub fn checked_pow(p: u64, e: u32) -> Option<u64> {
    p.checked_pow(e)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn inverse_mod_prime_power() {
        for a in [1u64, 2, 4, 5, 7, 80] {
            let inv = inv_mod(a, 81).unwrap();
            assert_eq!(mul_mod(a, inv, 81), 1);
        }
        assert_eq!(inv_mod(3, 81), None);
    }

    #[test]
    fn valuations() {
        assert_eq!(valuation(12, 2), 2);
        assert_eq!(valuation(162, 3), 4);
        assert_eq!(valuation(7, 3), 0);
    }
}
