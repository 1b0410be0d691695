//! The residue field `F_{p^n}`.

use std::fmt;

use super::witt::{WittCtx, MAX_DEGREE};
use super::ArithError;
use crate::ring::{inv_mod, mul_mod, Ring};

/// `F_{p^n} = F_p[t]/(f)`; shares its arithmetic with `W/p`.
#[derive(Clone, Copy, PartialEq, Eq, Hash)]
pub struct FieldCtx {
    w: WittCtx,
}

#[derive(Clone, Copy, PartialEq, Eq, Hash, Default, serde::Serialize, serde::Deserialize)]
pub struct FieldElt(pub(crate) [u64; MAX_DEGREE]);

impl fmt::Debug for FieldCtx {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "F_{}^{}", self.p(), self.n())
    }
}

impl fmt::Debug for FieldElt {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{:?}", self.0)
    }
}

impl FieldElt {
    pub fn coeffs(&self) -> &[u64; MAX_DEGREE] {
        &self.0
    }
}

impl FieldCtx {
    pub fn new(p: u64, n: usize) -> Result<Self, ArithError> {
        Ok(WittCtx::new(p, n, 1)?.residue_field())
    }

    pub(crate) fn from_witt(w: WittCtx) -> Self {
        debug_assert_eq!(w.precision(), 1);
        FieldCtx { w }
    }

    pub fn p(&self) -> u64 {
        self.w.p()
    }
    pub fn n(&self) -> usize {
        self.w.n()
    }
    /// Number of elements `p^n`.
    pub fn order(&self) -> u64 {
        self.p().pow(self.n() as u32)
    }

    fn to_w(x: &FieldElt) -> super::witt::WittElt {
        super::witt::WittElt(x.0)
    }
    fn from_w(x: super::witt::WittElt) -> FieldElt {
        FieldElt(x.0)
    }

    pub fn from_int(&self, v: i64) -> FieldElt {
        Self::from_w(self.w.from_int(v))
    }

    pub fn gen(&self) -> FieldElt {
        Self::from_w(self.w.gen())
    }

    pub fn frobenius(&self, x: &FieldElt) -> FieldElt {
        self.pow(x, self.p())
    }

    /// All elements, in a fixed order.
    pub fn elements(&self) -> Vec<FieldElt> {
        let (p, n) = (self.p(), self.n());
        let mut out = Vec::with_capacity(self.order() as usize);
        for idx in 0..self.order() {
            let mut c = [0u64; MAX_DEGREE];
            let mut r = idx;
            for ci in c.iter_mut().take(n) {
                *ci = r % p;
                r /= p;
            }
            out.push(FieldElt(c));
        }
        out
    }

    pub fn multiplicative_order(&self, x: &FieldElt) -> u64 {
        let q1 = self.order() - 1;
        (1..=q1).find(|&d| q1 % d == 0 && self.pow(x, d) == self.one()).unwrap_or(0)
    }

    /// A generator of the multiplicative group.
    pub fn primitive_element(&self) -> FieldElt {
        let q1 = self.order() - 1;
        self.elements()
            .into_iter()
            .find(|x| !self.is_zero(x) && self.multiplicative_order(x) == q1)
            .expect("finite fields have primitive elements")
    }

    pub fn random<R: rand::Rng + ?Sized>(&self, rng: &mut R) -> FieldElt {
        Self::from_w(self.w.random(rng))
    }

    /// Norm to `F_p`: the product of all Galois conjugates.
    pub fn norm(&self, x: &FieldElt) -> u64 {
        let r = (self.order() - 1) / (self.p() - 1);
        self.pow(x, r).0[0]
    }

    /// Rabin's test: `f` is irreducible iff `t^{p^n} = t mod f` and
    /// `gcd(t^{p^{n/q}} - t, f) = 1` for every prime `q | n`.
    pub(crate) fn check_irreducible(p: u64, n: usize, low: &[u64]) -> Result<(), ArithError> {
        if n == 0 || n > MAX_DEGREE {
            return Err(ArithError::UnsupportedField { p, n });
        }
        if n == 1 {
            return Ok(());
        }
        let mut f: Vec<u64> = low.iter().map(|c| c % p).collect();
        f.push(1);
        let t_pow = |e: u32| -> Vec<u64> {
            // t^{p^e} mod f by repeated p-th powering
            let mut r = vec![0, 1];
            for _ in 0..e {
                r = poly_powmod(&r, p, &f, p);
            }
            r
        };
        let t = vec![0u64, 1];
        if poly_sub(&t_pow(n as u32), &t, p) != Vec::<u64>::new() {
            return Err(ArithError::ReducibleModulus { p, n });
        }
        for q in 2..=n {
            if n % q != 0 || !crate::ring::is_prime(q as u64) {
                continue;
            }
            let h = poly_sub(&t_pow((n / q) as u32), &t, p);
            let g = poly_gcd(&h, &f, p);
            if g.len() != 1 {
                return Err(ArithError::ReducibleModulus { p, n });
            }
        }
        Ok(())
    }
}

impl Ring for FieldCtx {
    type Elt = FieldElt;

    fn zero(&self) -> FieldElt {
        FieldElt([0; MAX_DEGREE])
    }
    fn one(&self) -> FieldElt {
        self.from_int(1)
    }
    fn from_i64(&self, v: i64) -> FieldElt {
        self.from_int(v)
    }
    fn add(&self, a: &FieldElt, b: &FieldElt) -> FieldElt {
        Self::from_w(self.w.add(&Self::to_w(a), &Self::to_w(b)))
    }
    fn sub(&self, a: &FieldElt, b: &FieldElt) -> FieldElt {
        Self::from_w(self.w.sub(&Self::to_w(a), &Self::to_w(b)))
    }
    fn neg(&self, a: &FieldElt) -> FieldElt {
        Self::from_w(self.w.neg(&Self::to_w(a)))
    }
    fn mul(&self, a: &FieldElt, b: &FieldElt) -> FieldElt {
        Self::from_w(self.w.mul(&Self::to_w(a), &Self::to_w(b)))
    }
    fn is_zero(&self, a: &FieldElt) -> bool {
        a.0.iter().all(|&c| c == 0)
    }
    fn inv(&self, a: &FieldElt) -> Option<FieldElt> {
        if self.is_zero(a) {
            return None;
        }
        Some(self.pow(a, self.order() - 2))
    }
    fn format(&self, a: &FieldElt) -> String {
        super::witt::format_poly(&a.0[..self.n()], "t")
    }
    fn describe(&self) -> String {
        format!("F_{}^{}", self.p(), self.n())
    }
}

fn trim(mut v: Vec<u64>) -> Vec<u64> {
    while v.last() == Some(&0) {
        v.pop();
    }
    v
}

fn poly_sub(a: &[u64], b: &[u64], p: u64) -> Vec<u64> {
    let len = a.len().max(b.len());
    let out = (0..len)
        .map(|i| {
            let x = a.get(i).copied().unwrap_or(0);
            let y = b.get(i).copied().unwrap_or(0);
            (x + p - y % p) % p
        })
        .collect();
    trim(out)
}

fn poly_rem(a: &[u64], m: &[u64], p: u64) -> Vec<u64> {
    let mut r = trim(a.to_vec());
    let m = trim(m.to_vec());
    let lead_inv = inv_mod(*m.last().expect("nonzero modulus"), p).expect("field");
    while r.len() >= m.len() {
        let shift = r.len() - m.len();
        let c = mul_mod(*r.last().unwrap(), lead_inv, p);
        for (i, &mi) in m.iter().enumerate() {
            r[shift + i] = (r[shift + i] + p - mul_mod(c, mi, p)) % p;
        }
        r = trim(r);
    }
    r
}

fn poly_mulmod(a: &[u64], b: &[u64], m: &[u64], p: u64) -> Vec<u64> {
    if a.is_empty() || b.is_empty() {
        return Vec::new();
    }
    let mut prod = vec![0u64; a.len() + b.len() - 1];
    for (i, &x) in a.iter().enumerate() {
        for (j, &y) in b.iter().enumerate() {
            prod[i + j] = (prod[i + j] + mul_mod(x, y, p)) % p;
        }
    }
    poly_rem(&prod, m, p)
}

fn poly_powmod(a: &[u64], mut e: u64, m: &[u64], p: u64) -> Vec<u64> {
    let mut base = poly_rem(a, m, p);
    let mut acc = vec![1u64];
    while e > 0 {
        if e & 1 == 1 {
            acc = poly_mulmod(&acc, &base, m, p);
        }
        base = poly_mulmod(&base, &base, m, p);
        e >>= 1;
    }
    acc
}

fn poly_gcd(a: &[u64], b: &[u64], p: u64) -> Vec<u64> {
    let (mut x, mut y) = (trim(a.to_vec()), trim(b.to_vec()));
    while !y.is_empty() {
        let r = poly_rem(&x, &y, p);
        x = y;
        y = r;
    }
    x
}
