//! The endomorphism ring `W<S>/(S^n - p, S a = a^phi S)` of `H_n`, its units,
//! the matrix `A(g)`, the determinant and `zeta`.
//!
//! Products are normalised so that `stab_mul(g, h)` corresponds to the series
//! composition `g(h(x))`. The matrix `A(g)` is that of right multiplication
//! `v -> v g` on the basis `1, S, ..., S^{n-1}`, so `A(gh) = A(h) A(g)`.

use std::fmt;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::Serialize;

use crate::arith::padic;
use crate::arith::{ArithError, FieldCtx, WittCtx, WittElt};
use crate::fgl::{FglError, FormalGroupLaw};
use crate::parse::{parse_list, ParseError};
use crate::ring::Ring;
use crate::series::USeries;

#[derive(Debug, Clone, PartialEq, Eq, thiserror::Error)]
pub enum StabError {
    #[error("element is not a unit (a_0 = 0 mod p)")]
    NotAUnit,
    #[error("elements live over different Witt rings")]
    ContextMismatch,
    #[error("zeta is not implemented for p = 2")]
    PrimeTwoUnsupported,
    #[error("theta(g) = {0} is not a principal unit of Z_p")]
    ThetaNotPrincipal(String),
    #[error("zeta needs Witt precision k >= 3, got {0}")]
    PrecisionTooSmall(u32),
    #[error("determinant post-check failed: {0}")]
    DetPostCheck(String),
    #[error("endomorphism post-check failed")]
    NotAnEndomorphism,
    #[error(transparent)]
    Parse(#[from] ParseError),
    #[error(transparent)]
    Fgl(#[from] FglError),
    #[error(transparent)]
    Arith(#[from] ArithError),
}

/// `a_0 + a_1 S + ... + a_{n-1} S^{n-1}`.
#[derive(Clone, PartialEq, Eq, Hash)]
pub struct StabElt {
    ctx: WittCtx,
    a: Vec<WittElt>,
}

impl fmt::Debug for StabElt {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&self.to_string())
    }
}

impl fmt::Display for StabElt {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let parts: Vec<String> = self.a.iter().map(|c| self.ctx.format(c)).collect();
        f.write_str(&parts.join("; "))
    }
}

impl Serialize for StabElt {
    fn serialize<S: serde::Serializer>(&self, s: S) -> Result<S::Ok, S::Error> {
        s.serialize_str(&self.to_string())
    }
}

impl StabElt {
    pub fn from_coeffs(ctx: WittCtx, coeffs: &[WittElt]) -> Self {
        let mut a = vec![ctx.zero(); ctx.n()];
        for (slot, c) in a.iter_mut().zip(coeffs) {
            *slot = *c;
        }
        StabElt { ctx, a }
    }

    pub fn one(ctx: WittCtx) -> Self {
        Self::from_coeffs(ctx, &[ctx.one()])
    }

    /// The element `S` (for `n = 1`, `S = p`).
    pub fn s(ctx: WittCtx) -> Self {
        if ctx.n() == 1 {
            return Self::from_coeffs(ctx, &[ctx.from_int(ctx.p() as i64)]);
        }
        let mut c = vec![ctx.zero(); ctx.n()];
        c[1] = ctx.one();
        Self::from_coeffs(ctx, &c)
    }

    /// A central element `a in Z_p`.
    pub fn central(ctx: WittCtx, a: i64) -> Self {
        Self::from_coeffs(ctx, &[ctx.from_int(a)])
    }

    pub fn teichmuller(ctx: WittCtx, x: &crate::arith::FieldElt) -> Self {
        Self::from_coeffs(ctx, &[ctx.teichmuller(x)])
    }

    /// Parses `a_0; a_1; ...`, padding missing coefficients with zero.
    pub fn parse(ctx: WittCtx, text: &str) -> Result<Self, StabError> {
        let a = parse_list(&ctx, text, ctx.n())?;
        Ok(StabElt { ctx, a })
    }

    /// Uniform coefficients; `a_0` is redrawn until invertible when `unit` is set.
    pub fn random<R: Rng + ?Sized>(ctx: WittCtx, rng: &mut R, unit: bool) -> Self {
        let mut a: Vec<WittElt> = (0..ctx.n()).map(|_| ctx.random(rng)).collect();
        while unit && !ctx.is_unit(&a[0]) {
            a[0] = ctx.random(rng);
        }
        StabElt { ctx, a }
    }

    pub fn from_seed(ctx: WittCtx, seed: u64, unit: bool) -> Self {
        Self::random(ctx, &mut ChaCha8Rng::seed_from_u64(seed), unit)
    }

    pub fn ctx(&self) -> &WittCtx {
        &self.ctx
    }
    pub fn coeffs(&self) -> &[WittElt] {
        &self.a
    }
    pub fn is_unit(&self) -> bool {
        self.ctx.is_unit(&self.a[0])
    }
    /// `g'(0)`, the residue of `a_0`.
    pub fn leading_residue(&self) -> crate::arith::FieldElt {
        self.ctx.residue(&self.a[0])
    }

    pub fn add(&self, o: &Self) -> Result<Self, StabError> {
        self.same(o)?;
        let a = self.a.iter().zip(&o.a).map(|(x, y)| self.ctx.add(x, y)).collect();
        Ok(StabElt { ctx: self.ctx, a })
    }

    fn same(&self, o: &Self) -> Result<(), StabError> {
        if self.ctx != o.ctx {
            return Err(StabError::ContextMismatch);
        }
        Ok(())
    }

    /// `(a_i S^i)(b_j S^j) = a_i b_j^{phi^i} S^{i+j}` with `S^n = p`.
    pub fn mul(&self, o: &Self) -> Result<Self, StabError> {
        self.same(o)?;
        let w = &self.ctx;
        let n = w.n();
        let mut c = vec![w.zero(); n];
        for (i, ai) in self.a.iter().enumerate() {
            if w.is_zero(ai) {
                continue;
            }
            for (j, bj) in o.a.iter().enumerate() {
                if w.is_zero(bj) {
                    continue;
                }
                let mut t = w.mul(ai, &w.frobenius_pow(bj, i));
                let mut e = i + j;
                if e >= n {
                    t = w.mul_p_pow(&t, 1);
                    e -= n;
                }
                c[e] = w.add(&c[e], &t);
            }
        }
        Ok(StabElt { ctx: *w, a: c })
    }

    /// Two-sided inverse by `y <- y (2 - g y)`.
    pub fn inv(&self) -> Result<Self, StabError> {
        let w = &self.ctx;
        let a0inv = w.inv(&self.a[0]).ok_or(StabError::NotAUnit)?;
        let two = StabElt::central(*w, 2);
        let mut y = StabElt::from_coeffs(*w, &[a0inv]);
        loop {
            let next = y.mul(&two.sub(&self.mul(&y)?)?)?;
            if next == y {
                break;
            }
            y = next;
        }
        debug_assert_eq!(y.mul(self)?, StabElt::one(*w));
        Ok(y)
    }

    fn sub(&self, o: &Self) -> Result<Self, StabError> {
        self.same(o)?;
        let a = self.a.iter().zip(&o.a).map(|(x, y)| self.ctx.sub(x, y)).collect();
        Ok(StabElt { ctx: self.ctx, a })
    }

    /// Column `j` holds the coordinates of `S^j g`.
    pub fn matrix(&self) -> Vec<Vec<WittElt>> {
        let w = &self.ctx;
        let n = w.n();
        let mut m = vec![vec![w.zero(); n]; n];
        for j in 0..n {
            for (i, ai) in self.a.iter().enumerate() {
                let mut t = w.frobenius_pow(ai, j);
                let mut row = i + j;
                if row >= n {
                    t = w.mul_p_pow(&t, 1);
                    row -= n;
                }
                m[row][j] = t;
            }
        }
        m
    }

    /// `det A(g)`, checked to be Frobenius-fixed and `= a_0^{r(n)} mod p`.
    pub fn det(&self) -> Result<WittElt, StabError> {
        let w = &self.ctx;
        let d = det_leibniz(w, &self.matrix());
        if w.frobenius(&d) != d {
            return Err(StabError::DetPostCheck("determinant is not Frobenius-fixed".into()));
        }
        let r = r_of(w.p(), w.n());
        let field = w.residue_field();
        if w.residue(&d) != field.pow(&w.residue(&self.a[0]), r) {
            return Err(StabError::DetPostCheck("determinant is not a_0^r(n) mod p".into()));
        }
        Ok(d)
    }

    /// `theta(g) = T(a_0)^{-r(n)} det(g)`, an element of `1 + pZ_p`.
    pub fn theta(&self) -> Result<u64, StabError> {
        let w = &self.ctx;
        if !self.is_unit() {
            return Err(StabError::NotAUnit);
        }
        let r = r_of(w.p(), w.n());
        let t = w.teichmuller(&self.leading_residue());
        let tinv = w.inv(&w.pow(&t, r)).ok_or(StabError::NotAUnit)?;
        let th = w.mul(&tinv, &self.det()?);
        match w.as_int(&th) {
            Some(v) if v % w.p() == 1 => Ok(v),
            _ => Err(StabError::ThetaNotPrincipal(w.format(&th))),
        }
    }

    /// `zeta(g) = (1/p) log theta(g)`, modulo `p^{k-2}`.
    pub fn zeta(&self) -> Result<Zeta, StabError> {
        let w = &self.ctx;
        let (p, k) = (w.p(), w.precision());
        if p == 2 {
            return Err(StabError::PrimeTwoUnsupported);
        }
        if k < 3 {
            return Err(StabError::PrecisionTooSmall(k));
        }
        let th = self.theta()?;
        let l = padic::ell(th, p, k).ok_or_else(|| StabError::ThetaNotPrincipal(th.to_string()))?;
        let modulus = p.pow(k - 2);
        Ok(Zeta { value: l % modulus, modulus })
    }

    /// The endomorphism series of `H_n` over `F_{p^n}`: the digit `alpha` of
    /// `T(alpha) p^j S^i` becomes `alpha x^{p^{i+nj}}`, combined under `H_n`.
    pub fn to_series(&self, honda: &FormalGroupLaw<FieldCtx>) -> Result<USeries<crate::arith::FieldElt>, StabError> {
        let w = &self.ctx;
        let f = &honda.ring;
        let big_n = honda.trunc_degree();
        let (p, n) = (w.p(), w.n());
        let mut terms = Vec::new();
        for (i, ai) in self.a.iter().enumerate() {
            for (j, alpha) in w.teich_digits(ai).into_iter().enumerate() {
                if f.is_zero(&alpha) {
                    continue;
                }
                let e = (i + n * j) as u32;
                match p.checked_pow(e) {
                    Some(d) if d as usize <= big_n => terms.push(USeries::monomial(f, big_n, d as usize, alpha)),
                    _ => {}
                }
            }
        }
        let s = if terms.is_empty() { USeries::zero(f, big_n) } else { honda.formal_sum(&terms)? };
        if !honda.is_endomorphism(&s)? {
            return Err(StabError::NotAnEndomorphism);
        }
        Ok(s)
    }

    /// Degree through which [`StabElt::to_series`] is determined by the
    /// retained Witt digits: `p^{nk} - 1`.
    pub fn faithful_degree(&self) -> u64 {
        let w = &self.ctx;
        w.p().checked_pow(w.n() as u32 * w.precision()).map_or(u64::MAX, |v| v - 1)
    }
}

/// `zeta(g)` as a residue modulo `p^{k-2}`.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
pub struct Zeta {
    pub value: u64,
    pub modulus: u64,
}

impl Zeta {
    pub fn add(&self, o: &Zeta) -> Zeta {
        Zeta { value: (self.value + o.value) % self.modulus, modulus: self.modulus }
    }
}

/// `r(n) = (p^n - 1)/(p - 1)`.
pub fn r_of(p: u64, n: usize) -> u64 {
    (p.pow(n as u32) - 1) / (p - 1)
}

/// Leibniz expansion; `n <= 3` here, so the `n!` terms are cheap.
pub fn det_leibniz(w: &WittCtx, m: &[Vec<WittElt>]) -> WittElt {
    let n = m.len();
    let mut perm: Vec<usize> = (0..n).collect();
    let mut acc = w.zero();
    permute(&mut perm, 0, &mut |p| {
        let mut inversions = 0;
        for i in 0..n {
            for j in i + 1..n {
                if p[i] > p[j] {
                    inversions += 1;
                }
            }
        }
        let mut t = w.one();
        for (i, &pi) in p.iter().enumerate() {
            t = w.mul(&t, &m[i][pi]);
        }
        acc = if inversions % 2 == 0 { w.add(&acc, &t) } else { w.sub(&acc, &t) };
    });
    acc
}

fn permute(v: &mut Vec<usize>, k: usize, f: &mut dyn FnMut(&[usize])) {
    if k == v.len() {
        f(v);
        return;
    }
    for i in k..v.len() {
        v.swap(k, i);
        permute(v, k + 1, f);
        v.swap(k, i);
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::arith::galois::mat_mul;
    use crate::fgl::honda_fgl_field;

    #[test]
    fn relations() {
        let w = WittCtx::new(3, 2, 4).unwrap();
        let f = w.residue_field();
        let s = StabElt::s(w);
        let om = StabElt::teichmuller(w, &f.gen());
        let lhs = s.mul(&om).unwrap();
        let tp = w.teichmuller(&f.pow(&f.gen(), 3));
        assert_eq!(lhs, StabElt::from_coeffs(w, &[w.zero(), tp]));
        assert_eq!(s.mul(&s).unwrap(), StabElt::central(w, 3));
        let g = StabElt::parse(w, "1; 1").unwrap();
        assert_eq!(g.mul(&g).unwrap(), StabElt::from_coeffs(w, &[w.from_int(4), w.from_int(2)]));
    }

    #[test]
    fn matrix_shape_and_determinant() {
        let w = WittCtx::new(3, 2, 4).unwrap();
        let g = StabElt::parse(w, "1; 1").unwrap();
        assert_eq!(g.matrix(), vec![vec![w.one(), w.from_int(3)], vec![w.one(), w.one()]]);
        assert_eq!(w.as_int(&g.det().unwrap()), Some(79));
        assert_eq!(g.zeta().unwrap(), Zeta { value: 8, modulus: 9 });
        let c = StabElt::central(w, 5);
        assert_eq!(w.as_int(&c.det().unwrap()), Some(25));
    }

    #[test]
    fn teichmuller_elements() {
        let w = WittCtx::new(5, 2, 4).unwrap();
        let f = w.residue_field();
        let om = StabElt::teichmuller(w, &f.gen());
        assert_eq!(om.det().unwrap(), w.teichmuller(&f.pow(&f.gen(), 6)));
        assert_eq!(om.zeta().unwrap().value, 0);
        let inv = om.inv().unwrap();
        assert_eq!(inv, StabElt::teichmuller(w, &f.inv(&f.gen()).unwrap()));
    }

    #[test]
    fn matrix_is_an_anti_homomorphism() {
        let w = WittCtx::new(3, 3, 3).unwrap();
        let mut rng = ChaCha8Rng::seed_from_u64(4);
        for _ in 0..20 {
            let g = StabElt::random(w, &mut rng, false);
            let h = StabElt::random(w, &mut rng, false);
            let gh = g.mul(&h).unwrap();
            assert_eq!(gh.matrix(), mat_mul(&w, &h.matrix(), &g.matrix()));
            assert_eq!(gh.det().unwrap(), w.mul(&g.det().unwrap(), &h.det().unwrap()));
        }
    }

    #[test]
    fn series_intertwines_product_and_composition() {
        let w = WittCtx::new(3, 2, 3).unwrap();
        let honda = honda_fgl_field(3, 2, 30).unwrap();
        let f = &honda.ring;
        assert_eq!(StabElt::one(w).to_series(&honda).unwrap(), USeries::x(f, 30));
        let p = StabElt::central(w, 3).to_series(&honda).unwrap();
        assert_eq!(p, USeries::monomial(f, 30, 9, f.one()));
        let om = StabElt::teichmuller(w, &f.gen()).to_series(&honda).unwrap();
        assert_eq!(om, USeries::monomial(f, 30, 1, f.gen()));
        let mut rng = ChaCha8Rng::seed_from_u64(8);
        for _ in 0..5 {
            let g = StabElt::random(w, &mut rng, true);
            let h = StabElt::random(w, &mut rng, true);
            let lhs = g.mul(&h).unwrap().to_series(&honda).unwrap();
            let rhs = g.to_series(&honda).unwrap().compose(f, &h.to_series(&honda).unwrap()).unwrap();
            assert_eq!(lhs, rhs);
        }
    }

    #[test]
    fn random_units_cover_the_residue_field() {
        let w = WittCtx::new(3, 2, 2).unwrap();
        let mut rng = ChaCha8Rng::seed_from_u64(0);
        let mut seen = std::collections::HashSet::new();
        for _ in 0..1000 {
            let g = StabElt::random(w, &mut rng, true);
            assert!(g.is_unit());
            seen.insert(g.leading_residue());
        }
        assert_eq!(seen.len(), 8);
        assert_eq!(StabElt::from_seed(w, 5, true), StabElt::from_seed(w, 5, true));
    }
}
