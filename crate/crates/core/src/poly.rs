//! Truncated polynomial rings `W[u_1, ..., u_v]` modulo a power of the ideal
//! `(u)` or of `m = (p, u)`.
//!
//! The deformation ring `E_0/m^j` keeps the coefficient of `u^b` modulo
//! `p^{j-|b|}`. The flat variant keeps every coefficient modulo the same
//! power of `p` and only truncates the `u`-degree; it is used to build
//! formal group laws before reducing them.

use std::fmt;
use std::sync::Arc;

use crate::arith::{ArithError, FieldCtx, FieldElt, WittCtx, WittElt, MAX_DEGREE};
use crate::ring::{mul_mod, Ring};

pub const MAX_VARS: usize = 2;
pub const MAX_MONOMIALS: usize = 10;

#[derive(Clone, Copy, PartialEq, Eq, Hash, Default)]
pub struct PolyElt(pub(crate) [WittElt; MAX_MONOMIALS]);

impl fmt::Debug for PolyElt {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let nz: Vec<_> = self.0.iter().enumerate().filter(|(_, c)| **c != WittElt::default()).collect();
        write!(f, "{nz:?}")
    }
}

struct Tables {
    monos: Vec<[u32; MAX_VARS]>,
    degs: Vec<u32>,
    /// `p^{cap}` for each monomial.
    caps: Vec<u64>,
    mul: Vec<Vec<Option<usize>>>,
}

#[derive(Clone)]
pub struct PolyRing {
    w: WittCtx,
    nvars: usize,
    /// Monomials of `u`-degree `>= udeg` are dropped.
    udeg: u32,
    weighted: bool,
    t: Arc<Tables>,
}

impl fmt::Debug for PolyRing {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&self.describe())
    }
}

impl PartialEq for PolyRing {
    fn eq(&self, other: &Self) -> bool {
        self.w == other.w && self.nvars == other.nvars && self.udeg == other.udeg && self.weighted == other.weighted
    }
}

/// The deformation ring `E_0/m^j`.
pub type DefRing = PolyRing;

impl PolyRing {
    /// `E_0/m^j = W[[u_1..u_{n-1}]]/m^j` with `W = W(F_{p^n})`.
    pub fn deformation(p: u64, n: usize, j: u32) -> Result<Self, ArithError> {
        let w = WittCtx::new(p, n, j)?;
        Self::build(w, n - 1, j, true)
    }

    /// `Z/p^prec [u_1..u_v] / (u)^udeg`.
    pub fn flat(p: u64, nvars: usize, udeg: u32, prec: u32) -> Result<Self, ArithError> {
        let w = WittCtx::new(p, 1, prec)?;
        Self::build(w, nvars, udeg, false)
    }

    fn build(w: WittCtx, nvars: usize, udeg: u32, weighted: bool) -> Result<Self, ArithError> {
        if nvars > MAX_VARS || udeg == 0 {
            return Err(ArithError::InvalidPrecision(udeg));
        }
        let mut monos = Vec::new();
        for d in 0..udeg {
            match nvars {
                0 => {
                    if d == 0 {
                        monos.push([0, 0]);
                    }
                }
                1 => monos.push([d, 0]),
                _ => {
                    for a in (0..=d).rev() {
                        monos.push([a, d - a]);
                    }
                }
            }
        }
        if monos.len() > MAX_MONOMIALS {
            return Err(ArithError::InvalidPrecision(udeg));
        }
        let degs: Vec<u32> = monos.iter().map(|m| m[0] + m[1]).collect();
        let p = w.p();
        let caps = degs
            .iter()
            .map(|&d| if weighted { p.pow(w.precision() - d) } else { w.modulus_int() })
            .collect();
        let mul = monos
            .iter()
            .map(|a| {
                monos
                    .iter()
                    .map(|b| {
                        let c = [a[0] + b[0], a[1] + b[1]];
                        monos.iter().position(|m| *m == c)
                    })
                    .collect()
            })
            .collect();
        Ok(PolyRing { w, nvars, udeg, weighted, t: Arc::new(Tables { monos, degs, caps, mul }) })
    }

    pub fn witt(&self) -> &WittCtx {
        &self.w
    }
    pub fn p(&self) -> u64 {
        self.w.p()
    }
    pub fn nvars(&self) -> usize {
        self.nvars
    }
    /// `j` for `E_0/m^j`, or the `u`-degree bound of a flat ring.
    pub fn truncation(&self) -> u32 {
        self.udeg
    }
    pub fn is_weighted(&self) -> bool {
        self.weighted
    }
    pub fn num_monomials(&self) -> usize {
        self.t.monos.len()
    }
    pub fn monomial(&self, i: usize) -> [u32; MAX_VARS] {
        self.t.monos[i]
    }
    pub fn monomial_degree(&self, i: usize) -> u32 {
        self.t.degs[i]
    }
    pub fn residue_field(&self) -> FieldCtx {
        self.w.residue_field()
    }

    fn reduce(&self, mut a: PolyElt) -> PolyElt {
        for (i, c) in a.0.iter_mut().enumerate().take(self.num_monomials()) {
            let cap = self.t.caps[i];
            for x in c.0.iter_mut() {
                *x %= cap;
            }
        }
        a
    }

    pub fn constant(&self, c: &WittElt) -> PolyElt {
        let mut e = PolyElt::default();
        e.0[0] = *c;
        self.reduce(e)
    }

    /// The variable `u_i`, `1 <= i <= nvars`.
    pub fn u(&self, i: usize) -> PolyElt {
        assert!(i >= 1 && i <= self.nvars, "variable u_{i} out of range");
        let mut m = [0u32; MAX_VARS];
        m[i - 1] = 1;
        self.monomial_elt(m, &self.w.one())
    }

    /// `c * u^b`, zero when the monomial is truncated away.
    pub fn monomial_elt(&self, b: [u32; MAX_VARS], c: &WittElt) -> PolyElt {
        let mut e = PolyElt::default();
        if let Some(i) = self.t.monos.iter().position(|m| *m == b) {
            e.0[i] = *c;
        }
        self.reduce(e)
    }

    pub fn coeff(&self, a: &PolyElt, i: usize) -> WittElt {
        a.0[i]
    }

    pub fn from_coeffs(&self, coeffs: &[WittElt]) -> PolyElt {
        let mut e = PolyElt::default();
        for (i, c) in coeffs.iter().enumerate().take(self.num_monomials()) {
            e.0[i] = *c;
        }
        self.reduce(e)
    }

    pub fn teichmuller(&self, x: &FieldElt) -> PolyElt {
        self.constant(&self.w.teichmuller(x))
    }

    /// Reduction modulo `m`.
    pub fn residue(&self, a: &PolyElt) -> FieldElt {
        self.w.residue(&a.0[0])
    }

    /// The constant `W`-coefficient.
    pub fn constant_term(&self, a: &PolyElt) -> WittElt {
        a.0[0]
    }

    /// Largest `r` with `a in m^r` (`(u)^r` for flat rings); the truncation for zero.
    pub fn m_order(&self, a: &PolyElt) -> u32 {
        let mut best = self.udeg;
        for i in 0..self.num_monomials() {
            let c = &a.0[i];
            if c.0.iter().all(|&x| x == 0) {
                continue;
            }
            let extra = if self.weighted { self.w.valuation(c) } else { 0 };
            best = best.min(self.t.degs[i] + extra);
        }
        best
    }

    /// Coordinates of `a in m^r` in `m^r/m^{r+1}` over the residue field,
    /// indexed by the monomials `u^b` with `|b| <= r` (standing for `p^{r-|b|} u^b`).
    pub fn layer(&self, a: &PolyElt, r: u32) -> Vec<(usize, FieldElt)> {
        debug_assert!(self.weighted);
        let p = self.p();
        let mut out = Vec::new();
        for i in 0..self.num_monomials() {
            let d = self.t.degs[i];
            if d > r {
                continue;
            }
            let pe = p.pow(r - d);
            let c = &a.0[i];
            let mut f = [0u64; MAX_DEGREE];
            for (l, x) in c.0.iter().enumerate() {
                debug_assert_eq!(x % pe, 0, "element not in m^{r}");
                f[l] = (x / pe) % p;
            }
            out.push((i, FieldElt(f)));
        }
        out
    }

    /// `T(s) p^{r-|b|} u^b` for the monomial with index `i`.
    pub fn layer_element(&self, i: usize, r: u32, s: &FieldElt) -> PolyElt {
        let d = self.t.degs[i];
        debug_assert!(d <= r);
        let c = self.w.mul_p_pow(&self.w.teichmuller(s), r - d);
        let mut e = PolyElt::default();
        e.0[i] = c;
        self.reduce(e)
    }

    /// Evaluate `a` at `u_i -> images[i]`, fixing `W`.
    pub fn substitute(&self, a: &PolyElt, images: &[PolyElt]) -> PolyElt {
        let pw = self.power_table(images);
        self.substitute_with(a, &pw)
    }

    /// `u^b -> prod images[i]^{b_i}` for every monomial, for repeated substitution.
    pub fn power_table(&self, images: &[PolyElt]) -> Vec<PolyElt> {
        assert_eq!(images.len(), self.nvars);
        let mut pows: Vec<Vec<PolyElt>> = images
            .iter()
            .map(|x| {
                let mut v = vec![self.one()];
                for d in 1..self.udeg as usize {
                    let next = self.mul(&v[d - 1], x);
                    v.push(next);
                }
                v
            })
            .collect();
        if pows.is_empty() {
            pows.push(vec![self.one()]);
        }
        self.t
            .monos
            .iter()
            .map(|m| {
                let mut acc = self.one();
                for (v, &e) in m.iter().enumerate().take(self.nvars) {
                    acc = self.mul(&acc, &pows[v][e as usize]);
                }
                acc
            })
            .collect()
    }

    pub fn substitute_with(&self, a: &PolyElt, table: &[PolyElt]) -> PolyElt {
        let mut acc = self.zero();
        for i in 0..self.num_monomials() {
            let c = &a.0[i];
            if c.0.iter().all(|&x| x == 0) {
                continue;
            }
            acc = self.add(&acc, &self.scale(&table[i], c));
        }
        acc
    }

    /// Multiply by a `W`-scalar.
    pub fn scale(&self, a: &PolyElt, c: &WittElt) -> PolyElt {
        let mut e = PolyElt::default();
        for i in 0..self.num_monomials() {
            e.0[i] = self.w.mul(&a.0[i], c);
        }
        self.reduce(e)
    }

    /// Coefficientwise Frobenius on `W`, fixing each `u_i`.
    pub fn frobenius_coeffs(&self, a: &PolyElt) -> PolyElt {
        let mut e = PolyElt::default();
        for i in 0..self.num_monomials() {
            e.0[i] = self.w.frobenius(&a.0[i]);
        }
        self.reduce(e)
    }

    /// Image of an element of another ring with the same variables:
    /// coefficients are reduced or embedded and truncated monomials dropped.
    pub fn map_from(&self, src: &PolyRing, a: &PolyElt) -> PolyElt {
        assert_eq!(src.nvars, self.nvars);
        let mut e = PolyElt::default();
        for i in 0..src.num_monomials() {
            let c = &a.0[i];
            if c.0.iter().all(|&x| x == 0) {
                continue;
            }
            let Some(ti) = self.t.monos.iter().position(|m| *m == src.t.monos[i]) else { continue };
            e.0[ti] = if src.w.n() == self.w.n() {
                self.w.reduce_from(&src.w, c)
            } else {
                debug_assert_eq!(src.w.n(), 1);
                self.w.from_int((c.0[0] % self.w.modulus_int()) as i64)
            };
        }
        self.reduce(e)
    }

    /// The same ring at truncation `j` (`W`-precision follows for weighted rings).
    pub fn with_truncation(&self, j: u32) -> Result<Self, ArithError> {
        let w = if self.weighted { self.w.with_precision(j)? } else { self.w };
        Self::build(w, self.nvars, j, self.weighted)
    }

    /// Divide by `p`; the result lives in the ring at truncation `j - 1`.
    pub fn div_p(&self, a: &PolyElt, target: &PolyRing) -> Option<PolyElt> {
        let mut e = PolyElt::default();
        let p = self.p();
        for i in 0..self.num_monomials() {
            for l in 0..MAX_DEGREE {
                let x = a.0[i].0[l];
                if x % p != 0 {
                    return None;
                }
                e.0[i].0[l] = x / p;
            }
        }
        // monomial layout agrees on the common prefix
        let mut out = PolyElt::default();
        out.0[..target.num_monomials()].copy_from_slice(&e.0[..target.num_monomials()]);
        Some(target.reduce(out))
    }

    /// Equality modulo `p`, i.e. in `E_0/(p, m^j)`.
    pub fn eq_mod_p(&self, a: &PolyElt, b: &PolyElt) -> bool {
        let p = self.p();
        (0..self.num_monomials()).all(|i| (0..MAX_DEGREE).all(|l| a.0[i].0[l] % p == b.0[i].0[l] % p))
    }

    pub fn random<R: rand::Rng + ?Sized>(&self, rng: &mut R) -> PolyElt {
        let mut e = PolyElt::default();
        for i in 0..self.num_monomials() {
            e.0[i] = self.w.random(rng);
        }
        self.reduce(e)
    }

    /// A random element of `m`.
    pub fn random_in_m<R: rand::Rng + ?Sized>(&self, rng: &mut R) -> PolyElt {
        let mut e = self.random(rng);
        e.0[0] = self.w.mul_p_pow(&e.0[0], 1);
        self.reduce(e)
    }

    /// Coefficients as `(exponents, W-coefficient)` pairs, skipping zeros.
    pub fn terms(&self, a: &PolyElt) -> Vec<([u32; MAX_VARS], WittElt)> {
        (0..self.num_monomials())
            .filter(|&i| a.0[i].0.iter().any(|&x| x != 0))
            .map(|i| (self.t.monos[i], a.0[i]))
            .collect()
    }
}

impl Ring for PolyRing {
    type Elt = PolyElt;

    fn zero(&self) -> PolyElt {
        PolyElt::default()
    }
    fn one(&self) -> PolyElt {
        self.constant(&self.w.one())
    }
    fn from_i64(&self, v: i64) -> PolyElt {
        self.constant(&self.w.from_int(v))
    }
    fn add(&self, a: &PolyElt, b: &PolyElt) -> PolyElt {
        let mut e = PolyElt::default();
        let n = self.w.n();
        for i in 0..self.num_monomials() {
            let cap = self.t.caps[i];
            for l in 0..n {
                let s = a.0[i].0[l] + b.0[i].0[l];
                e.0[i].0[l] = if s >= cap { s - cap } else { s };
            }
        }
        e
    }
    fn sub(&self, a: &PolyElt, b: &PolyElt) -> PolyElt {
        let mut e = PolyElt::default();
        let n = self.w.n();
        for i in 0..self.num_monomials() {
            let cap = self.t.caps[i];
            for l in 0..n {
                let (x, y) = (a.0[i].0[l], b.0[i].0[l]);
                e.0[i].0[l] = if x >= y { x - y } else { x + cap - y };
            }
        }
        e
    }
    fn neg(&self, a: &PolyElt) -> PolyElt {
        self.sub(&self.zero(), a)
    }
    fn mul(&self, a: &PolyElt, b: &PolyElt) -> PolyElt {
        let nm = self.num_monomials();
        if nm == 1 {
            let mut e = PolyElt::default();
            e.0[0] = self.w.mul(&a.0[0], &b.0[0]);
            return self.reduce(e);
        }
        let mut e = PolyElt::default();
        for i in 0..nm {
            if a.0[i].0.iter().all(|&x| x == 0) {
                continue;
            }
            for (jj, slot) in self.t.mul[i].iter().enumerate() {
                let Some(k) = *slot else { continue };
                if b.0[jj].0.iter().all(|&x| x == 0) {
                    continue;
                }
                let prod = self.w.mul(&a.0[i], &b.0[jj]);
                e.0[k] = self.w.add(&e.0[k], &prod);
            }
        }
        self.reduce(e)
    }
    fn is_zero(&self, a: &PolyElt) -> bool {
        a.0.iter().all(|c| c.0.iter().all(|&x| x == 0))
    }
    fn inv(&self, a: &PolyElt) -> Option<PolyElt> {
        let c0 = self.w.inv(&a.0[0])?;
        let mut y = self.constant(&c0);
        let two = self.from_i64(2);
        loop {
            let next = self.mul(&y, &self.sub(&two, &self.mul(a, &y)));
            if next == y {
                return Some(y);
            }
            y = next;
        }
    }
    fn format(&self, a: &PolyElt) -> String {
        let mut parts = Vec::new();
        for (m, c) in self.terms(a) {
            let cs = self.w.format(&c);
            let mut mono = String::new();
            for (v, &e) in m.iter().enumerate().take(self.nvars) {
                match e {
                    0 => {}
                    1 => mono.push_str(&format!("*u{}", v + 1)),
                    _ => mono.push_str(&format!("*u{}^{}", v + 1, e)),
                }
            }
            if mono.is_empty() {
                parts.push(cs);
            } else if cs == "1" {
                parts.push(mono[1..].to_string());
            } else if cs.contains('+') {
                parts.push(format!("({cs}){mono}"));
            } else {
                parts.push(format!("{cs}{mono}"));
            }
        }
        if parts.is_empty() {
            "0".into()
        } else {
            parts.join(" + ")
        }
    }
    fn describe(&self) -> String {
        if self.weighted {
            format!("E_0/m^{} over {}", self.udeg, self.w.describe())
        } else {
            format!("Z/{}^{}[u_1..u_{}]/(u)^{}", self.p(), self.w.precision(), self.nvars, self.udeg)
        }
    }
    fn mul_int(&self, a: &PolyElt, k: i64) -> PolyElt {
        let mut e = *a;
        let m = self.w.modulus_int();
        let kk = crate::ring::reduce_i64(k, m);
        for c in e.0.iter_mut().take(self.num_monomials()) {
            for x in c.0.iter_mut() {
                *x = mul_mod(*x, kk, m);
            }
        }
        self.reduce(e)
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use rand::SeedableRng;
    use rand_chacha::ChaCha8Rng;

    #[test]
    fn weighted_truncation_drops_m_cubed() {
        let r = PolyRing::deformation(3, 2, 3).unwrap();
        let u = r.u(1);
        assert!(r.is_zero(&r.pow(&u, 3)));
        let pu2 = r.mul(&r.from_i64(3), &r.mul(&u, &u));
        assert!(r.is_zero(&pu2));
        let pu = r.mul(&r.from_i64(3), &u);
        assert!(!r.is_zero(&pu));
        assert_eq!(r.m_order(&pu), 2);
        assert!(r.is_zero(&r.from_i64(27)));
        assert_eq!(r.m_order(&r.from_i64(9)), 2);
    }

    #[test]
    fn inverse_and_associativity() {
        let mut rng = ChaCha8Rng::seed_from_u64(1);
        for (p, n, j) in [(3, 2, 3), (5, 2, 4), (3, 3, 3), (5, 1, 3)] {
            let r = PolyRing::deformation(p, n, j).unwrap();
            for _ in 0..30 {
                let (a, b, c) = (r.random(&mut rng), r.random(&mut rng), r.random(&mut rng));
                assert_eq!(r.mul(&r.mul(&a, &b), &c), r.mul(&a, &r.mul(&b, &c)));
                assert_eq!(r.mul(&a, &r.add(&b, &c)), r.add(&r.mul(&a, &b), &r.mul(&a, &c)));
                if let Some(ai) = r.inv(&a) {
                    assert_eq!(r.mul(&a, &ai), r.one());
                }
            }
        }
    }

    #[test]
    fn substitution_is_a_ring_map() {
        let mut rng = ChaCha8Rng::seed_from_u64(2);
        let r = PolyRing::deformation(5, 3, 3).unwrap();
        let imgs = [r.random_in_m(&mut rng), r.random_in_m(&mut rng)];
        for _ in 0..20 {
            let (a, b) = (r.random(&mut rng), r.random(&mut rng));
            let lhs = r.substitute(&r.mul(&a, &b), &imgs);
            let rhs = r.mul(&r.substitute(&a, &imgs), &r.substitute(&b, &imgs));
            assert_eq!(lhs, rhs);
        }
        assert_eq!(r.substitute(&r.u(2), &imgs), imgs[1]);
    }

    #[test]
    fn layers_roundtrip() {
        let r = PolyRing::deformation(3, 2, 3).unwrap();
        let f = r.residue_field();
        let x = r.add(&r.layer_element(0, 2, &f.gen()), &r.layer_element(1, 2, &f.one()));
        assert_eq!(r.m_order(&x), 2);
        assert_eq!(r.layer(&x, 2), vec![(0, f.gen()), (1, f.one()), (2, f.zero())]);
    }

    #[test]
    fn flat_ring_maps_into_deformation_ring() {
        let flat = PolyRing::flat(3, 1, 3, 6).unwrap();
        let def = PolyRing::deformation(3, 2, 3).unwrap();
        let a = flat.add(&flat.from_i64(28), &flat.mul(&flat.from_i64(4), &flat.u(1)));
        let b = def.map_from(&flat, &a);
        assert_eq!(b, def.add(&def.from_i64(1), &def.mul(&def.from_i64(4), &def.u(1))));
        assert_eq!(def.format(&b), "1 + 4*u1");
    }
}
