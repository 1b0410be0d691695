//! Formal group laws: the Honda law `H_n`, the universal deformation `G_n`,
//! formal sums, `a`-series and conjugation by power series.

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

use crate::arith::{ArithError, FieldCtx, WittCtx};
use crate::poly::{DefRing, PolyElt, PolyRing};
use crate::ring::{inv_mod, mul_mod, Ring};
use crate::series::{BSeries, SeriesError, USeries};

#[derive(Debug, Clone, PartialEq, Eq, thiserror::Error)]
pub enum FglError {
    #[error("logarithm coefficients are not p-integral in degree {0}")]
    IntegralityFailure(usize),
    #[error("post-check failed: {0}")]
    PostCheckFailure(String),
    #[error("formal group law axiom fails: {0}")]
    AxiomFailure(String),
    #[error("truncation N = {0} is too small")]
    TruncationTooSmall(usize),
    #[error(transparent)]
    Series(#[from] SeriesError),
    #[error(transparent)]
    Arith(#[from] ArithError),
    #[error("malformed formal group law document: {0}")]
    Json(String),
}

/// A truncated formal group law over a coefficient ring.
#[derive(Clone, Debug)]
pub struct FormalGroupLaw<R: Ring> {
    pub ring: R,
    pub series: BSeries<R::Elt>,
    pub name: String,
    pub p: u64,
    pub n: usize,
}

/// Where the Honda law should live.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum HondaTarget {
    Field,
    Witt(u32),
}

/// Largest `S` with `p^S <= N`.
fn log_depth(p: u64, big_n: usize) -> u32 {
    let mut s = 0;
    while p.pow(s + 1) as usize <= big_n {
        s += 1;
    }
    s
}

/// Solves `l(G(x,y)) = l(x) + l(y)` for `l(x) = sum_k lambda_k x^{p^k}`, given
/// the integral rescalings `Lambda_k = p^S lambda_k`, over a flat ring
/// `Z/p^P[u]/(u)^d`. Degree `e` of the new iterate only depends on degrees
/// `<= e - 1` of the old one, so the iteration reaches its fixed point in at
/// most `N` steps; the division by `p^S` is checked for exactness there.
fn solve_from_log(ring: &PolyRing, lambdas: &[PolyElt], s: u32, big_n: usize) -> Result<BSeries<PolyElt>, FglError> {
    let p = ring.p();
    let ps = p.pow(s);
    let xy = BSeries::x_plus_y(ring, big_n);
    let mut base = xy.scale(ring, &ring.from_i64(ps as i64));
    for (k, lam) in lambdas.iter().enumerate().skip(1) {
        if ring.is_zero(lam) {
            continue;
        }
        let e = p.pow(k as u32) as usize;
        let mut pw = BSeries::zero(ring, big_n);
        if e <= big_n {
            pw.set(e, 0, lam.clone());
            pw.set(0, e, lam.clone());
        }
        base = base.add(ring, &pw);
    }
    let divide = |num: &BSeries<PolyElt>, exact: bool| -> Result<BSeries<PolyElt>, FglError> {
        let mut out = BSeries::zero(ring, big_n);
        for (i, j, c) in num.iter() {
            let mut q = PolyElt::default();
            let mut ok = true;
            for m in 0..ring.num_monomials() {
                let v = ring.coeff(c, m).coeffs()[0];
                if v % ps != 0 {
                    ok = false;
                    break;
                }
                q.0[m].0[0] = v / ps;
            }
            if !ok {
                if exact {
                    return Err(FglError::IntegralityFailure(i + j));
                }
                continue;
            }
            out.set(i, j, q);
        }
        Ok(out)
    };
    let mut g = xy.clone();
    for _ in 0..=big_n + 1 {
        let mut num = base.clone();
        for (k, lam) in lambdas.iter().enumerate().skip(1) {
            if ring.is_zero(lam) {
                continue;
            }
            let gp = g.pow(ring, p.pow(k as u32));
            num = num.sub(ring, &gp.scale(ring, lam));
        }
        let next = divide(&num, false)?;
        if next == g {
            divide(&num, true)?;
            return Ok(g);
        }
        g = next;
    }
    Err(FglError::PostCheckFailure("logarithm fixed point did not converge".into()))
}

/// Working precision for a law needed modulo `p^prec`.
fn flat_precision(prec: u32, s: u32) -> u32 {
    prec + 2 * s + 1
}

/// `p^S lambda_k` for the Honda logarithm `sum_i x^{p^{ni}}/p^i`.
fn honda_lambdas(ring: &PolyRing, n: usize, s: u32) -> Vec<PolyElt> {
    let p = ring.p();
    (0..=s as usize)
        .map(|k| if k % n == 0 { ring.from_i64(p.pow(s - (k / n) as u32) as i64) } else { ring.zero() })
        .collect()
}

/// `p^S lambda_k` for the p-typical logarithm with Araki generators
/// `v_0 = p, v_i = u_i (0 < i < n), v_n = 1, v_i = 0 (i > n)`:
/// `(p - p^{p^k}) lambda_k = sum_{i<k} lambda_i v_{k-i}^{p^i}`.
fn araki_lambdas(ring: &PolyRing, n: usize, s: u32) -> Result<Vec<PolyElt>, FglError> {
    let p = ring.p();
    let pm = ring.witt().modulus_int();
    let mut lam = vec![ring.from_i64(p.pow(s) as i64)];
    for k in 1..=s as usize {
        let mut acc = ring.zero();
        for i in 0..k {
            let idx = k - i;
            let v = if idx < n {
                ring.pow(&ring.u(idx), p.pow(i as u32))
            } else if idx == n {
                ring.one()
            } else {
                continue;
            };
            acc = ring.add(&acc, &ring.mul(&lam[i], &v));
        }
        // divide by p, then by the unit 1 - p^{p^k - 1}
        let mut q = PolyElt::default();
        for m in 0..ring.num_monomials() {
            let c = ring.coeff(&acc, m).coeffs()[0];
            if c % p != 0 {
                return Err(FglError::IntegralityFailure(p.pow(k as u32) as usize));
            }
            q.0[m].0[0] = c / p;
        }
        let e = p.pow(k as u32) - 1;
        let pe = if e >= 64 { 0 } else { crate::ring::checked_pow(p, e as u32).map_or(0, |v| v % pm) };
        let unit = (1 + pm - pe) % pm;
        let uinv = inv_mod(unit, pm).expect("1 - p^e is a unit");
        let mut scaled = PolyElt::default();
        for m in 0..ring.num_monomials() {
            scaled.0[m].0[0] = mul_mod(q.0[m].0[0] % pm, uinv, pm);
        }
        lam.push(scaled);
    }
    Ok(lam)
}

/// The Honda law with logarithm `sum_i x^{p^{ni}}/p^i`, over `Z/p^prec`.
fn honda_integral(p: u64, n: usize, big_n: usize, prec: u32) -> Result<(PolyRing, BSeries<PolyElt>), FglError> {
    let s = log_depth(p, big_n);
    let ring = PolyRing::flat(p, 0, 1, flat_precision(prec, s))?;
    let lam = honda_lambdas(&ring, n, s);
    let g = solve_from_log(&ring, &lam, s, big_n)?;
    Ok((ring, g))
}

/// `H_n` over `F_{p^n}`.
pub fn honda_fgl_field(p: u64, n: usize, big_n: usize) -> Result<FormalGroupLaw<FieldCtx>, FglError> {
    if big_n < 2 {
        return Err(FglError::TruncationTooSmall(big_n));
    }
    let field = FieldCtx::new(p, n)?;
    let (flat, g) = honda_integral(p, n, big_n, 1)?;
    let series = g.map(|c| field.from_int((flat.coeff(c, 0).coeffs()[0] % p) as i64));
    let law = FormalGroupLaw { ring: field, series, name: format!("H_{n}"), p, n };
    law.check_axioms()?;
    let ps = law.p_series()?;
    if ps != USeries::monomial(&field, big_n, p.pow(n as u32) as usize, field.one()) {
        return Err(FglError::PostCheckFailure(format!("[p](x) != x^{} over F_{}^{}", p.pow(n as u32), p, n)));
    }
    Ok(law)
}

/// The Honda law (same logarithm) over `W/p^k`.
pub fn honda_fgl_witt(p: u64, n: usize, big_n: usize, k: u32) -> Result<FormalGroupLaw<WittCtx>, FglError> {
    if big_n < 2 {
        return Err(FglError::TruncationTooSmall(big_n));
    }
    let w = WittCtx::new(p, n, k)?;
    let (flat, g) = honda_integral(p, n, big_n, k)?;
    let series = g.map(|c| w.from_int((flat.coeff(c, 0).coeffs()[0] % w.modulus_int()) as i64));
    let law = FormalGroupLaw { ring: w, series, name: format!("H_{n}"), p, n };
    law.check_axioms()?;
    let field = w.residue_field();
    let ps = law.p_series()?;
    let expect = p.pow(n as u32) as usize;
    for (d, c) in ps.c.iter().enumerate() {
        let want = if d == expect { field.one() } else { field.zero() };
        if w.residue(c) != want {
            return Err(FglError::PostCheckFailure("[p](x) is not x^{p^n} mod p".into()));
        }
    }
    Ok(law)
}

/// Dispatch on [`HondaTarget`]; the field law is returned as a `W/p` law when a
/// uniform type is needed.
pub fn honda_fgl(p: u64, n: usize, big_n: usize, target: HondaTarget) -> Result<FormalGroupLaw<WittCtx>, FglError> {
    match target {
        HondaTarget::Field => honda_fgl_witt(p, n, big_n, 1),
        HondaTarget::Witt(k) => honda_fgl_witt(p, n, big_n, k),
    }
}

/// `G_n` over `E_0/m^j`, with both post-checks: its p-series is
/// `px +_G u_1 x^p +_G ... +_G u_{n-1} x^{p^{n-1}} +_G x^{p^n}` and it reduces to `H_n` mod `m`.
pub fn universal_deformation_fgl(p: u64, n: usize, j: u32, big_n: usize) -> Result<FormalGroupLaw<DefRing>, FglError> {
    let law = universal_deformation_unchecked(p, n, j, big_n)?;
    law.check_axioms()?;
    law.check_deformation_p_series()?;
    let honda = honda_fgl_field(p, n, big_n)?;
    let ring = &law.ring;
    for (i, jj, c) in law.series.iter() {
        if ring.residue(c) != *honda.series.get(i, jj) {
            return Err(FglError::PostCheckFailure(format!("G_{n} mod m differs from H_{n} at x^{i} y^{jj}")));
        }
    }
    Ok(law)
}

pub(crate) fn universal_deformation_unchecked(p: u64, n: usize, j: u32, big_n: usize) -> Result<FormalGroupLaw<DefRing>, FglError> {
    if big_n < 2 {
        return Err(FglError::TruncationTooSmall(big_n));
    }
    let def = DefRing::deformation(p, n, j)?;
    let s = log_depth(p, big_n);
    let flat = PolyRing::flat(p, n - 1, j, flat_precision(j, s))?;
    let lam = araki_lambdas(&flat, n, s)?;
    let g = solve_from_log(&flat, &lam, s, big_n)?;
    let series = g.map(|c| def.map_from(&flat, c));
    Ok(FormalGroupLaw { ring: def, series, name: format!("G_{n}"), p, n })
}

impl<R: Ring> FormalGroupLaw<R> {
    pub fn trunc_degree(&self) -> usize {
        self.series.trunc_degree()
    }

    /// `F(a(x), b(x))`.
    pub fn add(&self, a: &USeries<R::Elt>, b: &USeries<R::Elt>) -> Result<USeries<R::Elt>, FglError> {
        Ok(self.series.bsubstitute(&self.ring, a, b)?)
    }

    /// Left-associated formal sum of the given series.
    pub fn formal_sum(&self, terms: &[USeries<R::Elt>]) -> Result<USeries<R::Elt>, FglError> {
        let Some((first, rest)) = terms.split_first() else {
            return Ok(USeries::zero(&self.ring, self.trunc_degree()));
        };
        if !self.ring.is_zero(&first.c[0]) {
            return Err(SeriesError::ConstantTermNonzero.into());
        }
        let mut acc = first.clone();
        for t in rest {
            acc = self.add(&acc, t)?;
        }
        Ok(acc)
    }

    /// `[m](x)` for a non-negative integer `m`.
    pub fn int_series(&self, m: u64) -> Result<USeries<R::Elt>, FglError> {
        let r = &self.ring;
        let n = self.trunc_degree();
        let x = USeries::x(r, n);
        let mut acc = USeries::zero(r, n);
        // double-and-add on the formal group
        let mut base = x;
        let mut e = m;
        while e > 0 {
            if e & 1 == 1 {
                acc = self.add(&acc, &base)?;
            }
            e >>= 1;
            if e > 0 {
                base = self.add(&base, &base)?;
            }
        }
        Ok(acc)
    }

    pub fn p_series(&self) -> Result<USeries<R::Elt>, FglError> {
        self.int_series(self.p)
    }

    /// `[a](x)` for `a` given by its base-`p` digits `a = sum c_i p^i`:
    /// `sum^F [c_i]([p]^{o i}(x))`.
    pub fn a_series(&self, a: u64) -> Result<USeries<R::Elt>, FglError> {
        let r = &self.ring;
        let n = self.trunc_degree();
        let ps = self.p_series()?;
        let mut digits = Vec::new();
        let mut rest = a;
        while rest > 0 {
            digits.push(rest % self.p);
            rest /= self.p;
        }
        let mut iter_p = USeries::x(r, n);
        let mut terms = Vec::new();
        for (i, &c) in digits.iter().enumerate() {
            if i > 0 {
                iter_p = ps.compose(r, &iter_p)?;
            }
            if c == 0 {
                continue;
            }
            let ci = self.int_series(c)?;
            terms.push(ci.compose(r, &iter_p)?);
        }
        self.formal_sum(&terms)
    }

    /// The formal inverse `i(x)` with `F(x, i(x)) = 0`.
    pub fn inverse_series(&self) -> Result<USeries<R::Elt>, FglError> {
        let r = &self.ring;
        let n = self.trunc_degree();
        let x = USeries::x(r, n);
        let mut i = x.neg(r);
        for _ in 0..=n {
            // i <- i - F(x, i), valid since dF/dy(x, i) = 1 + O(x)
            let f = self.add(&x, &i)?;
            if f.c.iter().all(|c| r.is_zero(c)) {
                return Ok(i);
            }
            i = i.sub(r, &f);
        }
        Err(FglError::PostCheckFailure("formal inverse did not converge".into()))
    }

    /// `F(x, 0) = x`, `F(x, y) = F(y, x)`, and associativity to truncation.
    pub fn check_axioms(&self) -> Result<(), FglError> {
        let r = &self.ring;
        let f = &self.series;
        for (i, j, c) in f.iter() {
            let unit_term = (i == 1 && j == 0) || (i == 0 && j == 1);
            if j == 0 || i == 0 {
                let want = if unit_term { r.one() } else { r.zero() };
                if *c != want {
                    return Err(FglError::AxiomFailure(format!("unit axiom at x^{i} y^{j}")));
                }
            }
            if *f.get(j, i) != *c {
                return Err(FglError::AxiomFailure(format!("commutativity at x^{i} y^{j}")));
            }
        }
        if self.trunc_degree() <= 12 {
            self.check_associativity_cube()
        } else {
            self.check_associativity_probes(0x5eed, 3)
        }
    }

    /// Compares `F(F(x,y),z)` and `F(x,F(y,z))` coefficient by coefficient.
    fn check_associativity_cube(&self) -> Result<(), FglError> {
        let r = &self.ring;
        let n = self.trunc_degree();
        let f = &self.series;
        // lhs[c] = coefficient of z^c, a series in (x, y) of degree <= n - c
        let fpow: Vec<BSeries<R::Elt>> = {
            let mut v = vec![{
                let mut one = BSeries::zero(r, n);
                one.set(0, 0, r.one());
                one
            }];
            for a in 1..=n {
                let next = v[a - 1].mul(r, f);
                v.push(next);
            }
            v
        };
        let idx = |a: usize, b: usize, c: usize| -> usize { (a * (n + 1) + b) * (n + 1) + c };
        let mut lhs = vec![r.zero(); (n + 1).pow(3)];
        let mut rhs = vec![r.zero(); (n + 1).pow(3)];
        for (a, b, cab) in f.iter() {
            if r.is_zero(cab) {
                continue;
            }
            // c_ab F(x,y)^a z^b
            for (i, j, v) in fpow[a].iter() {
                if i + j + b > n || r.is_zero(v) {
                    continue;
                }
                let t = r.mul(cab, v);
                r.add_assign(&mut lhs[idx(i, j, b)], &t);
            }
            // c_ab x^a F(y,z)^b
            for (i, j, v) in fpow[b].iter() {
                if a + i + j > n || r.is_zero(v) {
                    continue;
                }
                let t = r.mul(cab, v);
                r.add_assign(&mut rhs[idx(a, i, j)], &t);
            }
        }
        if lhs != rhs {
            return Err(FglError::AxiomFailure("associativity".into()));
        }
        Ok(())
    }

    /// Associativity on seeded random curves `x = a(t), y = b(t), z = c(t)`.
    fn check_associativity_probes(&self, seed: u64, probes: usize) -> Result<(), FglError> {
        let r = &self.ring;
        let n = self.trunc_degree();
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        for _ in 0..probes {
            let mut rand_series = || {
                let mut s = USeries::zero(r, n);
                for d in 1..=n {
                    s.c[d] = r.from_i64(rng.gen_range(-50..50));
                }
                s
            };
            let (a, b, c) = (rand_series(), rand_series(), rand_series());
            let lhs = self.add(&self.add(&a, &b)?, &c)?;
            let rhs = self.add(&a, &self.add(&b, &c)?)?;
            if lhs != rhs {
                return Err(FglError::AxiomFailure("associativity (probe)".into()));
            }
        }
        Ok(())
    }

    /// `h^{-1}(F(h(x), h(y)))`, the law making `h` an isomorphism onto `F`.
    pub fn conjugate(&self, h: &USeries<R::Elt>) -> Result<FormalGroupLaw<R>, FglError> {
        let r = &self.ring;
        let hinv = h.revert(r)?;
        let inner = self.series.substitute_separate(r, h, h)?;
        let series = inner.compose_outer(r, &hinv)?;
        let law = FormalGroupLaw { ring: r.clone(), series, name: format!("{}^h", self.name), p: self.p, n: self.n };
        // h: G_h -> F is a homomorphism
        let lhs = law.series.compose_outer(r, h)?;
        if lhs != inner {
            return Err(FglError::PostCheckFailure("conjugating series is not a homomorphism".into()));
        }
        Ok(law)
    }

    /// `g(F(x,y)) = F(g(x), g(y))`.
    pub fn is_endomorphism(&self, g: &USeries<R::Elt>) -> Result<bool, FglError> {
        let r = &self.ring;
        let lhs = self.series.compose_outer(r, g)?;
        let rhs = self.series.substitute_separate(r, g, g)?;
        Ok(lhs == rhs)
    }

    pub fn to_document(&self) -> FglDocument {
        let coeffs = self
            .series
            .iter()
            .filter(|(_, _, c)| !self.ring.is_zero(c))
            .map(|(i, j, c)| FglCoeff { i, j, c: self.ring.format(c) })
            .collect();
        FglDocument {
            schema: "ltlab/1".into(),
            name: self.name.clone(),
            p: self.p,
            n: self.n,
            big_n: self.trunc_degree(),
            ring: self.ring.describe(),
            coeffs,
        }
    }
}

impl FormalGroupLaw<DefRing> {
    /// Verifies the p-series against the Araki form of `[p](x)`.
    pub fn check_deformation_p_series(&self) -> Result<(), FglError> {
        let r = &self.ring;
        let big_n = self.trunc_degree();
        let mut terms = vec![USeries::monomial(r, big_n, 1, r.from_i64(self.p as i64))];
        for i in 1..=self.n {
            let deg = self.p.pow(i as u32) as usize;
            let coeff = if i < self.n { r.u(i) } else { r.one() };
            terms.push(USeries::monomial(r, big_n, deg, coeff));
        }
        let expect = self.formal_sum(&terms)?;
        if self.p_series()? != expect {
            return Err(FglError::PostCheckFailure(format!("[p](x) of G_{} differs from the Araki form", self.n)));
        }
        Ok(())
    }
}

/// Serialized form `{p, n, N, ring, coeffs: [{i, j, c}]}`.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct FglDocument {
    pub schema: String,
    pub name: String,
    pub p: u64,
    pub n: usize,
    #[serde(rename = "N")]
    pub big_n: usize,
    pub ring: String,
    pub coeffs: Vec<FglCoeff>,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct FglCoeff {
    pub i: usize,
    pub j: usize,
    pub c: String,
}

impl FglDocument {
    /// Rebuilds the law over `ring`, parsing coefficients with the ring's syntax.
    pub fn load<R: crate::parse::Parseable>(&self, ring: R) -> Result<FormalGroupLaw<R>, FglError> {
        if self.ring != ring.describe() {
            return Err(FglError::Json(format!("document ring {} does not match {}", self.ring, ring.describe())));
        }
        let mut series = BSeries::zero(&ring, self.big_n);
        for c in &self.coeffs {
            if c.i + c.j > self.big_n {
                return Err(FglError::Json(format!("term x^{} y^{} beyond N", c.i, c.j)));
            }
            let v = crate::parse::parse_elt(&ring, &c.c).map_err(|e| FglError::Json(e.to_string()))?;
            series.set(c.i, c.j, v);
        }
        let law = FormalGroupLaw { ring, series, name: self.name.clone(), p: self.p, n: self.n };
        law.check_axioms()?;
        Ok(law)
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn honda_height_one_at_three() {
        let h = honda_fgl_field(3, 1, 4).unwrap();
        assert_eq!(*h.series.get(2, 1), h.ring.from_int(2));
        assert_eq!(*h.series.get(1, 0), h.ring.one());
        assert_eq!(*h.series.get(3, 0), h.ring.zero());
    }

    #[test]
    fn honda_coefficients_lie_in_prime_field() {
        for (p, n, big_n) in [(2, 2, 12), (3, 2, 20), (5, 2, 26), (2, 3, 17), (3, 3, 28)] {
            let h = honda_fgl_field(p, n, big_n).unwrap();
            for (_, _, c) in h.series.iter() {
                assert!(c.coeffs()[1..].iter().all(|&x| x == 0));
            }
        }
    }

    #[test]
    fn honda_over_witt_has_p_integral_coefficients() {
        let h = honda_fgl_witt(3, 2, 10, 4).unwrap();
        assert_eq!(h.ring.precision(), 4);
        let f = honda_fgl_field(3, 2, 10).unwrap();
        for (i, j, c) in h.series.iter() {
            assert_eq!(h.ring.residue(c), *f.series.get(i, j));
        }
    }

    #[test]
    fn deformation_post_checks() {
        for (p, n, j, big_n) in [(3, 1, 3, 10), (5, 1, 3, 10), (3, 2, 3, 10), (3, 2, 2, 17), (2, 2, 3, 9)] {
            let g = universal_deformation_fgl(p, n, j, big_n).unwrap();
            let ps = g.p_series().unwrap();
            assert_eq!(ps.c[1], g.ring.from_i64(p as i64));
            if n > 1 {
                assert_eq!(ps.c[p as usize], g.ring.u(1));
            }
        }
    }

    #[test]
    fn a_series_is_multiplicative_and_additive() {
        let g = universal_deformation_fgl(3, 2, 3, 10).unwrap();
        let r = &g.ring;
        assert_eq!(g.a_series(1).unwrap(), USeries::x(r, 10));
        assert_eq!(g.a_series(3).unwrap(), g.p_series().unwrap());
        for (a, b) in [(2u64, 5u64), (4, 7), (10, 3)] {
            let fa = g.a_series(a).unwrap();
            let fb = g.a_series(b).unwrap();
            assert_eq!(fa.compose(r, &fb).unwrap(), g.a_series(a * b).unwrap());
            assert_eq!(g.add(&fa, &fb).unwrap(), g.a_series(a + b).unwrap());
        }
        let two = g.formal_sum(&[USeries::x(r, 10), USeries::x(r, 10)]).unwrap();
        assert_eq!(two, g.a_series(2).unwrap());
    }

    #[test]
    fn conjugation_by_linear_series() {
        let g = universal_deformation_fgl(3, 2, 3, 10).unwrap();
        let r = &g.ring;
        let u = r.from_i64(2);
        let h = USeries::monomial(r, 10, 1, u);
        let gh = g.conjugate(&h).unwrap();
        gh.check_axioms().unwrap();
        for (i, j, c) in g.series.iter() {
            if i + j == 0 {
                continue;
            }
            let want = r.mul(c, &r.pow(&u, (i + j - 1) as u64));
            assert_eq!(*gh.series.get(i, j), want);
        }
        let id = g.conjugate(&USeries::x(r, 10)).unwrap();
        assert_eq!(id.series, g.series);
    }

    #[test]
    fn formal_inverse() {
        let g = universal_deformation_fgl(5, 2, 2, 26).unwrap();
        let i = g.inverse_series().unwrap();
        let x = USeries::x(&g.ring, 26);
        assert!(g.add(&x, &i).unwrap().c.iter().all(|c| g.ring.is_zero(c)));
    }
}
