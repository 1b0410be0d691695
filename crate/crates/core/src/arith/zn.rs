//! The profinite index ring `Z_n = Z_p x Z/(p^n - 1)` at finite precision.

use serde::{Deserialize, Serialize};

use super::ArithError;
use crate::ring::{inv_mod, mul_mod, reduce_i64};

/// An element of `Z_n`, with the `Z_p` component known modulo `p^K`.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct ZnElt {
    pub p: u64,
    pub n: u32,
    /// Working precision `K` of the `Z_p` component.
    pub precision: u32,
    pub zp: u64,
    pub res: u64,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct ZnCanonical {
    pub alpha: ZnElt,
    pub lambda: ZnElt,
    pub r: u64,
}

fn check(p: u64, n: u32, k: u32) -> Result<(u64, u64), ArithError> {
    if k == 0 {
        return Err(ArithError::InvalidPrecision(k));
    }
    let pk = p
        .checked_pow(k)
        .filter(|&v| v < (1u64 << 40))
        .ok_or(ArithError::PrecisionTooLarge { p, k })?;
    let q = p.checked_pow(n).ok_or(ArithError::PrecisionTooLarge { p, k: n })? - 1;
    Ok((pk, q))
}

impl ZnElt {
    /// Image of an integer.
    pub fn from_int(p: u64, n: u32, precision: u32, v: i64) -> Result<Self, ArithError> {
        let (pk, q) = check(p, n, precision)?;
        Ok(ZnElt { p, n, precision, zp: reduce_i64(v, pk), res: reduce_i64(v, q) })
    }

    pub fn new(p: u64, n: u32, precision: u32, zp: u64, res: u64) -> Result<Self, ArithError> {
        let (pk, q) = check(p, n, precision)?;
        Ok(ZnElt { p, n, precision, zp: zp % pk, res: res % q.max(1) })
    }

    fn pk(&self) -> u64 {
        self.p.pow(self.precision)
    }
    fn q(&self) -> u64 {
        self.p.pow(self.n) - 1
    }

    fn compatible(&self, other: &Self) -> Result<(), ArithError> {
        if self.p != other.p || self.n != other.n || self.precision != other.precision {
            return Err(ArithError::ContextMismatch(format!(
                "Z_n elements over (p={}, n={}, K={}) and (p={}, n={}, K={})",
                self.p, self.n, self.precision, other.p, other.n, other.precision
            )));
        }
        Ok(())
    }

    pub fn add(&self, other: &Self) -> Result<Self, ArithError> {
        self.compatible(other)?;
        let (pk, q) = (self.pk(), self.q());
        Ok(ZnElt { zp: (self.zp + other.zp) % pk, res: (self.res + other.res) % q.max(1), ..*self })
    }

    pub fn mul(&self, other: &Self) -> Result<Self, ArithError> {
        self.compatible(other)?;
        let (pk, q) = (self.pk(), self.q());
        Ok(ZnElt { zp: mul_mod(self.zp, other.zp, pk), res: mul_mod(self.res, other.res, q.max(1)), ..*self })
    }

    pub fn neg(&self) -> Self {
        let (pk, q) = (self.pk(), self.q().max(1));
        ZnElt { zp: (pk - self.zp) % pk, res: (q - self.res) % q, ..*self }
    }

    pub fn scale(&self, m: i64) -> Self {
        let (pk, q) = (self.pk(), self.q().max(1));
        ZnElt {
            zp: mul_mod(self.zp, reduce_i64(m, pk), pk),
            res: mul_mod(self.res, reduce_i64(m, q), q),
            ..*self
        }
    }

    pub fn is_zero(&self) -> bool {
        self.zp == 0 && self.res == 0
    }

    /// Additive order at the working precision.
    pub fn additive_order(&self) -> u64 {
        let g1 = gcd(self.zp, self.pk());
        let g2 = gcd(self.res, self.q().max(1));
        lcm(self.pk() / g1, self.q().max(1) / g2)
    }

    /// The same element at a smaller precision.
    pub fn truncate(&self, k: u32) -> Result<Self, ArithError> {
        if k > self.precision {
            return Err(ArithError::PrecisionExceeded { requested: k, available: self.precision });
        }
        ZnElt::new(self.p, self.n, k, self.zp, self.res)
    }
}

/// The integer residue modulo `p^k (p^n - 1)` determined by `a`.
pub fn zn_reduce(a: &ZnElt, k: u32) -> Result<u64, ArithError> {
    if k > a.precision {
        return Err(ArithError::PrecisionExceeded { requested: k, available: a.precision });
    }
    let pk = a.p.pow(k);
    let q = a.q();
    let x = a.zp % pk;
    if q <= 1 {
        return Ok(x);
    }
    // x + pk * s with s = (res - x) / pk mod q
    let pk_inv = inv_mod(pk % q, q).expect("p^k is prime to p^n - 1");
    let diff = (a.res + q - x % q) % q;
    let s = mul_mod(diff, pk_inv, q);
    Ok(x + pk * s)
}

/// `alpha = (0, 1)`, `lambda = alpha * r(n)` and `r(n) = (p^n - 1)/(p - 1)`.
pub fn zn_canonical(p: u64, n: u32, precision: u32) -> Result<ZnCanonical, ArithError> {
    let (_, q) = check(p, n, precision)?;
    let r = q / (p - 1);
    let alpha = ZnElt::new(p, n, precision, 0, 1)?;
    let lambda = ZnElt::new(p, n, precision, 0, r)?;
    Ok(ZnCanonical { alpha, lambda, r })
}

fn gcd(a: u64, b: u64) -> u64 {
    if b == 0 {
        a
    } else {
        gcd(b, a % b)
    }
}

fn lcm(a: u64, b: u64) -> u64 {
    a / gcd(a, b) * b
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    #[test]
    fn reductions_of_alpha_and_lambda() {
        let c = zn_canonical(3, 2, 4).unwrap();
        assert_eq!(c.r, 4);
        assert_eq!(zn_reduce(&c.lambda, 1).unwrap(), 12);
        assert_eq!(zn_reduce(&c.alpha, 1).unwrap(), 9);
        assert_eq!(c.lambda.additive_order(), 2);
        assert_eq!(c.alpha.additive_order(), 8);
        assert_eq!(c.alpha.mul(&c.alpha).unwrap(), c.alpha);
    }

    #[test]
    fn lambda_orders() {
        let c = zn_canonical(5, 2, 3).unwrap();
        assert_eq!(c.r, 6);
        assert_eq!(c.lambda.additive_order(), 4);
        for (p, n) in [(2, 2), (3, 1), (3, 3), (7, 2), (13, 2)] {
            let c = zn_canonical(p, n, 2).unwrap();
            assert_eq!(c.alpha.additive_order(), p.pow(n) - 1);
            assert!(c.lambda.scale(p as i64 - 1).is_zero());
            for m in 1..(p as i64 - 1) {
                assert!(!c.lambda.scale(m).is_zero());
            }
        }
    }

    #[test]
    fn precision_is_enforced() {
        let a = ZnElt::from_int(3, 2, 2, 7).unwrap();
        assert!(matches!(zn_reduce(&a, 3), Err(ArithError::PrecisionExceeded { .. })));
        let b = ZnElt::from_int(3, 2, 3, 7).unwrap();
        assert!(a.add(&b).is_err());
    }

    proptest! {
        #[test]
        fn integers_reduce_to_themselves(v in 0i64..1_000_000, k in 1u32..5) {
            let a = ZnElt::from_int(3, 2, 6, v).unwrap();
            let m = 3u64.pow(k) * 8;
            prop_assert_eq!(zn_reduce(&a, k).unwrap(), v as u64 % m);
        }

        #[test]
        fn consecutive_reductions_agree(zp in 0u64..15625, res in 0u64..24, k in 2u32..6) {
            let a = ZnElt::new(5, 2, 6, zp, res).unwrap();
            let hi = zn_reduce(&a, k).unwrap();
            let lo = zn_reduce(&a, k - 1).unwrap();
            prop_assert_eq!(hi % (5u64.pow(k - 1) * 24), lo);
        }

        #[test]
        fn reduction_is_a_ring_map(x in -500i64..500, y in -500i64..500) {
            let a = ZnElt::from_int(2, 3, 5, x).unwrap();
            let b = ZnElt::from_int(2, 3, 5, y).unwrap();
            let m = 32 * 7;
            let ab = zn_reduce(&a.mul(&b).unwrap(), 5).unwrap();
            prop_assert_eq!(ab, (x * y).rem_euclid(m) as u64);
            let s = zn_reduce(&a.add(&b).unwrap(), 5).unwrap();
            prop_assert_eq!(s, (x + y).rem_euclid(m) as u64);
        }
    }
}
