//! Truncated Witt vectors `W(F_{p^n})/p^k`, realised as `Z/p^k[t]/(f)` for a
//! fixed lift `f` of the residue-field modulus.

use std::fmt;

use super::field::{FieldCtx, FieldElt};
use super::moduli;
use super::ArithError;
use crate::ring::{mul_mod, reduce_i64, Ring};

/// Largest residue degree supported by the fixed-size element storage.
pub const MAX_DEGREE: usize = 3;

#[derive(Clone, Copy, PartialEq, Eq, Hash)]
pub struct WittCtx {
    p: u64,
    n: usize,
    k: u32,
    pk: u64,
    /// Low coefficients of the monic modulus `t^n + c_{n-1}t^{n-1} + ... + c_0`, reduced mod p^k.
    modulus: [u64; MAX_DEGREE],
    /// The same coefficients as small integers in `[0, p)`.
    base_modulus: [u64; MAX_DEGREE],
}

/// An element of `W/p^k`: coefficients of `1, t, ..., t^{n-1}` in `[0, p^k)`.
#[derive(Clone, Copy, PartialEq, Eq, Hash, Default, serde::Serialize, serde::Deserialize)]
pub struct WittElt(pub(crate) [u64; MAX_DEGREE]);

impl fmt::Debug for WittCtx {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "W(F_{}^{})/{}^{}", self.p, self.n, self.p, self.k)
    }
}

impl fmt::Debug for WittElt {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{:?}", self.0)
    }
}

impl WittElt {
    pub fn coeffs(&self) -> &[u64; MAX_DEGREE] {
        &self.0
    }
}

impl WittCtx {
    /// Looks up the modulus for `(p, n)` in the shipped table and verifies that
    /// it is irreducible mod p.
    pub fn new(p: u64, n: usize, k: u32) -> Result<Self, ArithError> {
        let coeffs = moduli::lookup(p, n)?;
        if k == 0 {
            return Err(ArithError::InvalidPrecision(k));
        }
        let pk = p
            .checked_pow(k)
            .filter(|&v| v < (1u64 << 40))
            .ok_or(ArithError::PrecisionTooLarge { p, k })?;
        let mut base_modulus = [0u64; MAX_DEGREE];
        base_modulus[..n].copy_from_slice(&coeffs[..n]);
        FieldCtx::check_irreducible(p, n, &base_modulus[..n])?;
        Ok(Self::from_parts(p, n, k, pk, base_modulus))
    }

    fn from_parts(p: u64, n: usize, k: u32, pk: u64, base_modulus: [u64; MAX_DEGREE]) -> Self {
        let mut modulus = [0u64; MAX_DEGREE];
        for i in 0..n {
            modulus[i] = base_modulus[i] % pk;
        }
        WittCtx { p, n, k, pk, modulus, base_modulus }
    }

    /// The same extension at a different precision.
    pub fn with_precision(&self, k: u32) -> Result<Self, ArithError> {
        if k == 0 {
            return Err(ArithError::InvalidPrecision(k));
        }
        let pk = self
            .p
            .checked_pow(k)
            .filter(|&v| v < (1u64 << 40))
            .ok_or(ArithError::PrecisionTooLarge { p: self.p, k })?;
        Ok(Self::from_parts(self.p, self.n, k, pk, self.base_modulus))
    }

    pub fn p(&self) -> u64 {
        self.p
    }
    pub fn n(&self) -> usize {
        self.n
    }
    pub fn precision(&self) -> u32 {
        self.k
    }
    /// `p^k`.
    pub fn modulus_int(&self) -> u64 {
        self.pk
    }
    pub fn base_modulus(&self) -> &[u64] {
        &self.base_modulus[..self.n]
    }

    pub fn residue_field(&self) -> FieldCtx {
        FieldCtx::from_witt(self.with_precision(1).expect("precision 1 is valid"))
    }

    pub fn from_int(&self, v: i64) -> WittElt {
        let mut c = [0u64; MAX_DEGREE];
        c[0] = reduce_i64(v, self.pk);
        WittElt(c)
    }

    pub fn from_coeffs(&self, coeffs: &[i64]) -> WittElt {
        let mut acc = self.zero();
        let mut tp = self.one();
        let t = self.gen();
        for &c in coeffs {
            acc = self.add(&acc, &self.mul(&tp, &self.from_int(c)));
            tp = self.mul(&tp, &t);
        }
        acc
    }

    /// The class of `t`.
    pub fn gen(&self) -> WittElt {
        if self.n == 1 {
            // t = -c_0 in Z_p[t]/(t + c_0)
            return self.from_int(-(self.modulus[0] as i64));
        }
        let mut c = [0u64; MAX_DEGREE];
        c[1] = 1 % self.pk;
        WittElt(c)
    }

    /// Constant term if the element lies in `Z/p^k`.
    pub fn as_int(&self, a: &WittElt) -> Option<u64> {
        if a.0[1..self.n].iter().all(|&c| c == 0) {
            Some(a.0[0])
        } else {
            None
        }
    }

    pub fn reduce_from(&self, src: &WittCtx, a: &WittElt) -> WittElt {
        debug_assert_eq!(src.n, self.n);
        let mut c = [0u64; MAX_DEGREE];
        for i in 0..self.n {
            c[i] = a.0[i] % self.pk;
        }
        WittElt(c)
    }

    /// Any lift of an element of lower precision (the representative itself).
    pub fn lift_from(&self, src: &WittCtx, a: &WittElt) -> WittElt {
        self.reduce_from(src, a)
    }

    pub fn residue(&self, a: &WittElt) -> FieldElt {
        let mut c = [0u64; MAX_DEGREE];
        for i in 0..self.n {
            c[i] = a.0[i] % self.p;
        }
        FieldElt(c)
    }

    /// The naive coefficientwise lift of a residue.
    pub fn lift_residue(&self, x: &FieldElt) -> WittElt {
        WittElt(x.0)
    }

    pub fn is_unit(&self, a: &WittElt) -> bool {
        (0..self.n).any(|i| a.0[i] % self.p != 0)
    }

    /// `p`-adic valuation (`precision` for zero).
    pub fn valuation(&self, a: &WittElt) -> u32 {
        (0..self.n)
            .map(|i| if a.0[i] == 0 { self.k } else { crate::ring::valuation(a.0[i] as u128, self.p).min(self.k) })
            .min()
            .unwrap_or(self.k)
    }

    /// Divide by `p^e`; the result is meaningful modulo `p^{k-e}`.
    pub fn div_p_pow(&self, a: &WittElt, e: u32) -> Option<WittElt> {
        let pe = self.p.pow(e);
        let mut c = [0u64; MAX_DEGREE];
        for i in 0..self.n {
            if a.0[i] % pe != 0 {
                return None;
            }
            c[i] = a.0[i] / pe;
        }
        Some(WittElt(c))
    }

    pub fn mul_p_pow(&self, a: &WittElt, e: u32) -> WittElt {
        if e >= self.k {
            return self.zero();
        }
        self.mul(a, &self.from_int(self.p.pow(e) as i64))
    }

    pub fn random<R: rand::Rng + ?Sized>(&self, rng: &mut R) -> WittElt {
        let mut c = [0u64; MAX_DEGREE];
        for ci in c.iter_mut().take(self.n) {
            *ci = rng.gen_range(0..self.pk);
        }
        WittElt(c)
    }

    /// Teichmüller lift: the stabilised limit of `y -> y^{p^n}` on any lift of `x`.
    pub fn teichmuller(&self, x: &FieldElt) -> WittElt {
        let q = self.p.pow(self.n as u32);
        let mut y = self.lift_residue(x);
        loop {
            let next = self.pow(&y, q);
            if next == y {
                return y;
            }
            y = next;
        }
    }

    /// Digits `alpha_j` with `a = sum_j T(alpha_j) p^j`.
    pub fn teich_digits(&self, a: &WittElt) -> Vec<FieldElt> {
        let mut digits = Vec::with_capacity(self.k as usize);
        let mut r = *a;
        for _ in 0..self.k {
            let d = self.residue(&r);
            let t = self.teichmuller(&d);
            let diff = self.sub(&r, &t);
            r = self.div_p_pow(&diff, 1).expect("difference with the Teichmüller digit is divisible by p");
            digits.push(d);
        }
        digits
    }

    pub fn from_teich_digits(&self, digits: &[FieldElt]) -> WittElt {
        let mut acc = self.zero();
        for (j, d) in digits.iter().enumerate().take(self.k as usize) {
            let term = self.mul_p_pow(&self.teichmuller(d), j as u32);
            acc = self.add(&acc, &term);
        }
        acc
    }

    /// Lift of the Frobenius, computed digit by digit.
    pub fn frobenius(&self, a: &WittElt) -> WittElt {
        if self.n == 1 {
            return *a;
        }
        let field = self.residue_field();
        let digits: Vec<FieldElt> = self.teich_digits(a).iter().map(|d| field.frobenius(d)).collect();
        self.from_teich_digits(&digits)
    }

    pub fn frobenius_pow(&self, a: &WittElt, i: usize) -> WittElt {
        let mut r = *a;
        for _ in 0..(i % self.n) {
            r = self.frobenius(&r);
        }
        r
    }

    fn inv_unit(&self, a: &WittElt) -> WittElt {
        let field = self.residue_field();
        let r = field.inv(&self.residue(a)).expect("unit residue");
        // Newton: y <- y (2 - a y), doubling the p-adic precision each step.
        let mut y = self.lift_residue(&r);
        let two = self.from_int(2);
        let mut prec = 1;
        while prec < self.k {
            y = self.mul(&y, &self.sub(&two, &self.mul(a, &y)));
            prec *= 2;
        }
        y
    }
}

impl Ring for WittCtx {
    type Elt = WittElt;

    fn zero(&self) -> WittElt {
        WittElt([0; MAX_DEGREE])
    }
    fn one(&self) -> WittElt {
        self.from_int(1)
    }
    fn from_i64(&self, v: i64) -> WittElt {
        self.from_int(v)
    }
    fn add(&self, a: &WittElt, b: &WittElt) -> WittElt {
        let mut c = [0u64; MAX_DEGREE];
        for i in 0..self.n {
            let s = a.0[i] + b.0[i];
            c[i] = if s >= self.pk { s - self.pk } else { s };
        }
        WittElt(c)
    }
    fn sub(&self, a: &WittElt, b: &WittElt) -> WittElt {
        let mut c = [0u64; MAX_DEGREE];
        for i in 0..self.n {
            c[i] = if a.0[i] >= b.0[i] { a.0[i] - b.0[i] } else { a.0[i] + self.pk - b.0[i] };
        }
        WittElt(c)
    }
    fn neg(&self, a: &WittElt) -> WittElt {
        self.sub(&self.zero(), a)
    }
    fn mul(&self, a: &WittElt, b: &WittElt) -> WittElt {
        let n = self.n;
        let m = self.pk;
        if n == 1 {
            return WittElt([mul_mod(a.0[0], b.0[0], m), 0, 0]);
        }
        let mut prod = [0u64; 2 * MAX_DEGREE - 1];
        for i in 0..n {
            if a.0[i] == 0 {
                continue;
            }
            for j in 0..n {
                prod[i + j] = (prod[i + j] + mul_mod(a.0[i], b.0[j], m)) % m;
            }
        }
        // t^n = -(c_0 + c_1 t + ... + c_{n-1} t^{n-1})
        for d in (n..2 * n - 1).rev() {
            let top = prod[d];
            if top == 0 {
                continue;
            }
            prod[d] = 0;
            for i in 0..n {
                let sub = mul_mod(top, self.modulus[i], m);
                let slot = &mut prod[d - n + i];
                *slot = if *slot >= sub { *slot - sub } else { *slot + m - sub };
            }
        }
        let mut c = [0u64; MAX_DEGREE];
        c[..n].copy_from_slice(&prod[..n]);
        WittElt(c)
    }
    fn is_zero(&self, a: &WittElt) -> bool {
        a.0.iter().all(|&c| c == 0)
    }
    fn inv(&self, a: &WittElt) -> Option<WittElt> {
        self.is_unit(a).then(|| self.inv_unit(a))
    }
    fn format(&self, a: &WittElt) -> String {
        format_poly(&a.0[..self.n], "t")
    }
    fn describe(&self) -> String {
        format!("W(F_{}^{})/{}^{}", self.p, self.n, self.p, self.k)
    }
}

/// `2+t+3*t^2` style rendering of a coefficient vector.
pub(crate) fn format_poly(coeffs: &[u64], var: &str) -> String {
    let mut parts = Vec::new();
    for (i, &c) in coeffs.iter().enumerate() {
        if c == 0 {
            continue;
        }
        let mono = match i {
            0 => String::new(),
            1 => var.to_string(),
            _ => format!("{var}^{i}"),
        };
        parts.push(match (i, c) {
            (0, c) => c.to_string(),
            (_, 1) => mono,
            (_, c) => format!("{c}*{mono}"),
        });
    }
    if parts.is_empty() {
        "0".to_string()
    } else {
        parts.join("+")
    }
}
