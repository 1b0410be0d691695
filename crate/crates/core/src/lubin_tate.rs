//! The deformation ring `E_0/m^j`, its unit-group maps and the Lubin-Tate
//! action of the stabilizer group.
//!
//! For a unit `g` with lift `h` the solver finds `phi = phi_g` and the
//! `*`-isomorphism `f: phi_* G_n -> G_h` one `m`-adic layer at a time. Modulo
//! `m` every law involved reduces to `H_n`, so the linearised equation of each
//! layer is the same `F_{p^n}`-linear system for every `g`. It is assembled
//! and factored once per [`LubinTate`] context.

use std::collections::BTreeMap;
use std::sync::OnceLock;

use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;
use serde::Serialize;

use crate::arith::padic::{exp_coefficient, split};
use crate::arith::{zn_reduce, ArithError, FieldCtx, FieldElt, ZnElt};
use crate::fgl::{honda_fgl_field, universal_deformation_fgl, FglError, FormalGroupLaw};
use crate::poly::{DefRing, PolyElt};
use crate::ring::{inv_mod, Ring};
use crate::series::{BSeries, SeriesError, USeries};
use crate::stabilizer::{StabElt, StabError};

#[derive(Debug, Clone, PartialEq, Eq, thiserror::Error)]
pub enum LtError {
    #[error("exp(p-) is not implemented for p = 2")]
    PrimeTwoUnsupported,
    #[error("element is not a unit")]
    NotAUnit,
    #[error("element is not a principal unit for the requested logarithm")]
    NotPrincipalUnit,
    #[error("linear system at m-adic layer {layer} is inconsistent")]
    SolverStuck { layer: u32 },
    #[error("linear system at step {layer} leaves {unknown} undetermined")]
    Underdetermined { layer: u32, unknown: String },
    #[error("series has a non p-power term in degree {degree}")]
    ResidueNotExpressible { degree: usize },
    #[error("invalid parameters: {0}")]
    InvalidParameters(String),
    #[error("post-check failed: {0}")]
    PostCheck(String),
    #[error(transparent)]
    Stab(#[from] StabError),
    #[error(transparent)]
    Fgl(#[from] FglError),
    #[error(transparent)]
    Series(#[from] SeriesError),
    #[error(transparent)]
    Arith(#[from] ArithError),
}

/// `exp(p x) = sum p^m x^m / m!`, a unit congruent to 1 mod `p`.
pub fn exp_p(ring: &DefRing, x: &PolyElt) -> Result<PolyElt, LtError> {
    let p = ring.p();
    if p == 2 {
        return Err(LtError::PrimeTwoUnsupported);
    }
    let j = ring.truncation();
    let w = ring.witt();
    let mut acc = ring.one();
    let mut xm = ring.one();
    for m in 1u64.. {
        let v = m as u32 - crate::arith::padic::factorial_valuation(m, p);
        if v >= j {
            break;
        }
        xm = ring.mul(&xm, x);
        let c = exp_coefficient(m, p, j);
        acc = ring.add(&acc, &ring.scale(&xm, &w.from_int(c as i64)));
    }
    Ok(acc)
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
#[serde(rename_all = "lowercase")]
pub enum LogMode {
    /// `log y` for `y = 1 mod m`.
    Principal,
    /// `(1/p) log y` for `y = 1 mod p`.
    Ell,
}

/// The logarithm of a unit. The result lives in a coarser truncation:
/// `E_0/m^{j-1}` in `Ell` mode, and `E_0/m^{j-L}` in `Principal` mode where
/// `p^L` is the largest denominator met.
pub fn log_unit(ring: &DefRing, y: &PolyElt, mode: LogMode) -> Result<(DefRing, PolyElt), LtError> {
    let p = ring.p();
    if p == 2 {
        return Err(LtError::PrimeTwoUnsupported);
    }
    let j = ring.truncation();
    let z = ring.sub(y, &ring.one());
    match mode {
        LogMode::Ell => {
            if j < 2 {
                return Err(LtError::InvalidParameters("ell-mode log needs j >= 2".into()));
            }
            let target = ring.with_truncation(j - 1)?;
            let w = ring.div_p(&z, &target).ok_or(LtError::NotPrincipalUnit)?;
            let tw = target.witt();
            let mut acc = target.zero();
            let mut wm = target.one();
            // p^{m-1} w^m / m with the p-part of m cancelled
            for m in 1u64.. {
                let (vm, um) = split(m, p);
                if m as u32 - 1 >= vm + (j - 1) {
                    break;
                }
                wm = target.mul(&wm, &w);
                let e = m as u32 - 1 - vm;
                if e >= j - 1 {
                    continue;
                }
                let c = tw.mul_p_pow(&tw.from_int(inv_unit(um, p, j - 1) as i64), e);
                let term = target.scale(&wm, &c);
                acc = if m % 2 == 1 { target.add(&acc, &term) } else { target.sub(&acc, &term) };
            }
            Ok((target, acc))
        }
        LogMode::Principal => {
            if ring.m_order(&z) < 1 {
                return Err(LtError::NotPrincipalUnit);
            }
            // terms z^m/m with m - v(m) < j contribute; L is their worst denominator
            let loss = (1u64..)
                .take_while(|&m| m as u32 - split(m, p).0 < j)
                .map(|m| split(m, p).0)
                .max()
                .unwrap_or(0);
            if loss >= j {
                return Err(LtError::InvalidParameters("truncation too small for log".into()));
            }
            let target = ring.with_truncation(j - loss)?;
            let mut acc = target.zero();
            let mut zm = ring.one();
            for m in 1u64.. {
                let (vm, um) = split(m, p);
                if m as u32 - vm >= j {
                    break;
                }
                zm = ring.mul(&zm, &z);
                let mut q = zm;
                let mut cur = ring.clone();
                for _ in 0..vm {
                    let next = cur.with_truncation(cur.truncation() - 1)?;
                    q = cur.div_p(&q, &next).ok_or(LtError::PostCheck("log term not divisible".into()))?;
                    cur = next;
                }
                let q = target.map_from(&cur, &q);
                let c = target.witt().from_int(inv_unit(um, p, target.truncation()) as i64);
                let term = target.scale(&q, &c);
                acc = if m % 2 == 1 { target.add(&acc, &term) } else { target.sub(&acc, &term) };
            }
            Ok((target, acc))
        }
    }
}

fn inv_unit(u: u64, p: u64, k: u32) -> u64 {
    let pk = p.pow(k);
    inv_mod(u % pk, pk).expect("unit part")
}

/// `x^a` for `a in Z_n`, through the integer `zn_reduce(a, j - 1)`; well defined
/// since `x^{p^{j-1}(p^n - 1)} = 1` in `E_0/m^j`.
pub fn zn_pow(ring: &DefRing, x: &PolyElt, a: &ZnElt) -> Result<PolyElt, LtError> {
    if !ring.witt().is_unit(&ring.constant_term(x)) {
        return Err(LtError::NotAUnit);
    }
    let k = ring.truncation().saturating_sub(1).max(1);
    let e = zn_reduce(a, k)?;
    Ok(ring.pow(x, e))
}

/// How the series of `g` is lifted to `E_0/m^j`.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Lift {
    /// Teichmüller lift of each coefficient.
    Teichmuller,
    /// Teichmüller lift plus a seeded random element of `m` in every degree.
    Perturbed(u64),
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
pub struct Residual {
    /// The defining equation holds modulo `m^{m_order}` ...
    pub m_order: u32,
    /// ... for all terms of total degree at most `x_degree`.
    pub x_degree: usize,
}

#[derive(Clone, Debug)]
pub struct LtResult {
    pub g: StabElt,
    pub ring: DefRing,
    /// `phi_g(u_i)`, `i = 1..n-1`.
    pub phi: Vec<PolyElt>,
    pub f: USeries<PolyElt>,
    pub psi: USeries<PolyElt>,
    /// `t_0, t_1, ...`.
    pub t: Vec<PolyElt>,
    pub residual: Residual,
    /// The logarithm equation was imposed through this `x`-degree.
    pub effective_degree: u64,
}

impl LtResult {
    pub fn t0(&self) -> &PolyElt {
        &self.t[0]
    }

    pub fn to_document(&self) -> LtDocument {
        let r = &self.ring;
        LtDocument {
            schema: crate::SCHEMA,
            g: self.g.to_string(),
            p: r.p(),
            n: self.phi.len() + 1,
            j: r.truncation(),
            phi: self.phi.iter().enumerate().map(|(i, e)| (format!("u{}", i + 1), r.format(e))).collect(),
            t0: r.format(&self.t[0]),
            t_list: self.t.iter().map(|e| r.format(e)).collect(),
            residual: self.residual,
            effective_degree: self.effective_degree,
        }
    }
}

#[derive(Clone, Debug, Serialize)]
pub struct LtDocument {
    pub schema: &'static str,
    pub g: String,
    pub p: u64,
    pub n: usize,
    pub j: u32,
    pub phi: BTreeMap<String, String>,
    pub t0: String,
    pub t_list: Vec<String>,
    pub residual: Residual,
    pub effective_degree: u64,
}

/// Evaluate `x` at `u_i -> phi_g(u_i)`.
pub fn act_on(res: &LtResult, x: &PolyElt) -> PolyElt {
    if res.phi.is_empty() {
        return *x;
    }
    res.ring.substitute(x, &res.phi)
}

/// The `t_i` with `psi = t_0 x +_G t_1 x^p +_G ...`, for `p^i <= min(N, p^max_i)`.
pub fn extract_t(psi: &USeries<PolyElt>, law: &FormalGroupLaw<DefRing>, max_i: u32) -> Result<Vec<PolyElt>, LtError> {
    let r = &law.ring;
    let p = law.p as usize;
    let n = psi.trunc_degree().min(law.trunc_degree());
    if !r.witt().is_unit(&r.constant_term(&psi.c[1])) {
        return Err(LtError::NotAUnit);
    }
    let iota = law.inverse_series()?;
    let mut rem = psi.truncate(n);
    let mut out = Vec::new();
    let mut d = 1usize;
    for _ in 0..=max_i {
        if d > n {
            break;
        }
        if let Some(bad) = (1..d).find(|&e| !r.is_zero(&rem.c[e])) {
            return Err(LtError::ResidueNotExpressible { degree: bad });
        }
        let t = rem.c[d];
        out.push(t);
        let neg = iota.compose(r, &USeries::monomial(r, n, d, t))?;
        rem = law.add(&rem, &neg)?;
        d *= p;
    }
    if let Some(bad) = (1..d.min(n + 1)).find(|&e| !r.is_zero(&rem.c[e])) {
        return Err(LtError::ResidueNotExpressible { degree: bad });
    }
    Ok(out)
}

/// Default series truncation `p^n + 1`.
pub fn default_degree(p: u64, n: usize) -> usize {
    p.pow(n as u32) as usize + 1
}

/// `Lambda_m = p^m lambda_m` for the Araki logarithm of `G_n`, `m = 0..=count`:
/// `(1 - p^{p^m - 1}) Lambda_m = sum_{1 <= k <= min(m, n)} p^{k-1} Lambda_{m-k} v_k^{p^{m-k}}`.
fn big_lambdas(ring: &DefRing, n: usize, count: usize) -> Vec<PolyElt> {
    let p = ring.p();
    let w = ring.witt();
    let trunc = ring.truncation() as u64;
    let mut lam = vec![ring.one()];
    for m in 1..=count {
        let mut acc = ring.zero();
        for k in 1..=m.min(n) {
            let v = if k == n {
                ring.one()
            } else {
                match crate::ring::checked_pow(p, (m - k) as u32) {
                    Some(e) if e < trunc => ring.pow(&ring.u(k), e),
                    _ => continue,
                }
            };
            let term = ring.scale(&ring.mul(&lam[m - k], &v), &w.mul_p_pow(&w.one(), k as u32 - 1));
            acc = ring.add(&acc, &term);
        }
        let e = crate::ring::checked_pow(p, m as u32).map_or(u32::MAX, |v| (v - 1).min(u32::MAX as u64) as u32);
        let unit = w.sub(&w.one(), &w.mul_p_pow(&w.one(), e));
        lam.push(ring.scale(&acc, &w.inv(&unit).expect("1 - p^e is a unit")));
    }
    lam
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
enum Var {
    /// `t_m`.
    T(usize),
    /// `phi(u_k)`, stored at index `k - 1`.
    A(usize),
}

/// The logarithm form of the defining equation. Writing
/// `psi = t_0 x +_G t_1 x^p +_G ...`, `psi` is an isomorphism `phi_* G_n -> G_n`
/// exactly when for every `m >= 1`
///
/// ```text
/// F_m = t_0 phi(Lambda_m) - sum_{i <= m} p^i Lambda_{m-i} t_i^{p^{m-i}} = 0,
/// ```
///
/// and `psi = h mod m` says `t_m mod m` is the Teichmüller digit `m` of `g`.
/// Only p-power degrees occur, so the deep equations that pin `t_0` stay cheap.
///
/// Step `r` solves for layer `r` of `t_0`, layer `r + 1` of `phi(u_k)` and layer
/// `r + e_m - m` of `t_m` against layer `r + e_m` of `F_m`, where `e_m` is the
/// `m`-adic order of `Lambda_m`. Lower steps fix everything these layers see.
struct LogSolver {
    /// `E_0/m^K` with room above the output truncation.
    ring: DefRing,
    lambdas: Vec<PolyElt>,
    orders: Vec<u32>,
    steps: u32,
    /// `t_0 ..= t_outputs` are reported.
    outputs: usize,
}

impl LogSolver {
    fn new(p: u64, n: usize, j: u32, big_n: usize) -> Result<Self, LtError> {
        let mut outputs = n;
        while (p.pow(outputs as u32 + 1) as usize) <= big_n {
            outputs += 1;
        }
        let cap = (2..=24u32).rev().find(|&k| DefRing::deformation(p, n, k).is_ok()).ok_or(LtError::InvalidParameters("no working precision".into()))?;
        let wide = DefRing::deformation(p, n, cap)?;
        let probe = big_lambdas(&wide, n, outputs);
        let shift = (0..=outputs).map(|i| i as i64 - wide.m_order(&probe[i]) as i64).max().unwrap_or(0).max(0) as u32;
        let steps = j - 1 + shift;
        let count = n * (steps as usize + 1);
        let wide_lam = big_lambdas(&wide, n, count);
        let orders: Vec<u32> = wide_lam.iter().map(|l| wide.m_order(l)).collect();
        let k = (steps + 1 + orders.iter().copied().max().unwrap_or(0)).min(cap);
        if k < steps + 1 + u32::from(n > 1) {
            return Err(LtError::InvalidParameters(format!("j = {j} needs more working precision than available")));
        }
        let ring = DefRing::deformation(p, n, k)?;
        let lambdas = wide_lam.iter().map(|l| ring.map_from(&wide, l)).collect();
        Ok(LogSolver { ring, lambdas, orders, steps, outputs })
    }

    fn count(&self) -> usize {
        self.lambdas.len() - 1
    }

    /// `F_1, ..., F_M`.
    fn equations(&self, t: &[PolyElt], a: &[PolyElt]) -> Vec<PolyElt> {
        let r = &self.ring;
        let p = r.p();
        let w = r.witt();
        let big_m = self.count();
        let table = r.power_table(a);
        // frob[i][k] = t_i^{p^k}
        let frob: Vec<Vec<PolyElt>> = (0..=big_m)
            .map(|i| {
                let mut v = vec![t[i]];
                for k in 1..=big_m - i {
                    let next = r.pow(&v[k - 1], p);
                    v.push(next);
                }
                v
            })
            .collect();
        (1..=big_m)
            .map(|m| {
                let mut acc = r.mul(&t[0], &r.substitute_with(&self.lambdas[m], &table));
                for i in 0..=m {
                    let c = r.scale(&r.mul(&self.lambdas[m - i], &frob[i][m - i]), &w.mul_p_pow(&w.one(), i as u32));
                    acc = r.sub(&acc, &c);
                }
                acc
            })
            .collect()
    }

    fn layer_of(&self, var: Var, step: u32) -> Option<u32> {
        let l = match var {
            Var::T(m) => step as i64 + self.orders[m] as i64 - m as i64,
            Var::A(_) => step as i64 + 1,
        };
        (l >= 1 && l < self.ring.truncation() as i64).then_some(l as u32)
    }

    /// Teichmüller digit `m` of `g` for `m = 0..=M`. Digits that are missing
    /// from `g` are only allowed where they cannot reach the reported layers.
    fn digits(&self, g: &StabElt) -> Result<Vec<FieldElt>, LtError> {
        let w = g.ctx();
        let n = w.n();
        let field = w.residue_field();
        let all: Vec<Vec<FieldElt>> = g.coeffs().iter().map(|a| w.teich_digits(a)).collect();
        (0..=self.count())
            .map(|m| match all[m % n].get(m / n) {
                Some(d) => Ok(*d),
                None if m as i64 - self.orders[m] as i64 > self.steps as i64 => Ok(field.zero()),
                None => Err(LtError::Stab(StabError::PrecisionTooSmall(w.precision()))),
            })
            .collect()
    }

    /// `(phi(u_k), t_m)` in `E_0/m^K`, correct through the layers the steps reach.
    fn solve(&self, g: &StabElt, nv: usize) -> Result<(Vec<PolyElt>, Vec<PolyElt>), LtError> {
        let r = &self.ring;
        let field = r.residue_field();
        let big_m = self.count();
        let k = r.truncation();
        let mut t: Vec<PolyElt> = self.digits(g)?.iter().map(|d| r.teichmuller(d)).collect();
        let mut a = vec![r.zero(); nv];
        let one = field.one();
        for step in 0..=self.steps {
            let mut unknowns: Vec<(Var, usize, u32)> = Vec::new();
            let vars = (0..nv).map(Var::A).chain((0..=big_m).map(Var::T));
            for var in vars {
                let layer = match var {
                    Var::T(0) if step >= 1 => step,
                    Var::T(0) => continue,
                    _ => match self.layer_of(var, step) {
                        Some(l) => l,
                        None => continue,
                    },
                };
                for mono in 0..r.num_monomials() {
                    if r.monomial_degree(mono) <= layer {
                        unknowns.push((var, mono, layer));
                    }
                }
            }
            let targets: Vec<(usize, u32)> = (1..=big_m).map(|m| (m, step + self.orders[m])).filter(|&(_, l)| l < k).collect();
            let base = self.equations(&t, &a);
            let read = |eqs: &[PolyElt]| -> Result<Vec<FieldElt>, LtError> {
                let mut out = Vec::new();
                for &(m, l) in &targets {
                    if r.m_order(&eqs[m - 1]) < l {
                        return Err(LtError::PostCheck(format!("logarithm equation {m} fails below layer {l}")));
                    }
                    out.extend(r.layer(&eqs[m - 1], l).into_iter().map(|(_, v)| v));
                }
                Ok(out)
            };
            let b0 = read(&base)?;
            let bump = |var: Var, e: &PolyElt, t: &mut Vec<PolyElt>, a: &mut Vec<PolyElt>| match var {
                Var::T(m) => t[m] = r.add(&t[m], e),
                Var::A(i) => a[i] = r.add(&a[i], e),
            };
            let mut cols = Vec::with_capacity(unknowns.len());
            for &(var, mono, layer) in &unknowns {
                let (mut tt, mut aa) = (t.clone(), a.clone());
                bump(var, &r.layer_element(mono, layer, &one), &mut tt, &mut aa);
                let moved = self.equations(&tt, &aa);
                let diff: Vec<PolyElt> = moved.iter().zip(&base).map(|(x, y)| r.sub(x, y)).collect();
                cols.push(read(&diff)?);
            }
            let rhs: Vec<FieldElt> = b0.iter().map(|x| field.neg(x)).collect();
            let (z, determined) = solve_linear(&field, &cols, &rhs).ok_or(LtError::SolverStuck { layer: step })?;
            if let Some(c) = determined.iter().position(|d| !d) {
                return Err(LtError::Underdetermined { layer: step, unknown: format!("{:?}", unknowns[c].0) });
            }
            for (&(var, mono, layer), zc) in unknowns.iter().zip(&z) {
                if !field.is_zero(zc) {
                    bump(var, &r.layer_element(mono, layer, zc), &mut t, &mut a);
                }
            }
        }
        let last = self.equations(&t, &a);
        for (m, e) in last.iter().enumerate() {
            let want = (self.steps + 1 + self.orders[m + 1]).min(k);
            if r.m_order(e) < want {
                return Err(LtError::PostCheck(format!("logarithm equation {} holds only modulo m^{}", m + 1, r.m_order(e))));
            }
        }
        Ok((a, t))
    }
}

/// Solves `sum_c z_c cols[c] = rhs`, free unknowns set to zero. Also reports,
/// per unknown, whether every solution agrees on it.
fn solve_linear(f: &FieldCtx, cols: &[Vec<FieldElt>], rhs: &[FieldElt]) -> Option<(Vec<FieldElt>, Vec<bool>)> {
    let nr = rhs.len();
    let nc = cols.len();
    let mut m: Vec<Vec<FieldElt>> = (0..nr)
        .map(|i| {
            let mut row: Vec<FieldElt> = cols.iter().map(|c| c[i]).collect();
            row.push(rhs[i]);
            row
        })
        .collect();
    let mut pivots = Vec::new();
    let mut row = 0;
    for c in 0..nc {
        let Some(pr) = (row..nr).find(|&i| !f.is_zero(&m[i][c])) else { continue };
        m.swap(row, pr);
        let inv = f.inv(&m[row][c])?;
        for x in m[row].iter_mut() {
            *x = f.mul(x, &inv);
        }
        let prow = m[row].clone();
        for (i, r) in m.iter_mut().enumerate() {
            if i == row || f.is_zero(&r[c]) {
                continue;
            }
            let k = r[c];
            for (x, y) in r.iter_mut().zip(&prow) {
                *x = f.sub(x, &f.mul(&k, y));
            }
        }
        pivots.push(c);
        row += 1;
    }
    if m[row..].iter().any(|r| !f.is_zero(&r[nc])) {
        return None;
    }
    let mut z = vec![f.zero(); nc];
    let mut determined = vec![false; nc];
    for (i, &c) in pivots.iter().enumerate() {
        z[c] = m[i][nc];
        determined[c] = (0..nc).all(|cc| pivots.contains(&cc) || f.is_zero(&m[i][cc]));
    }
    Some((z, determined))
}

/// The layer system of the bivariate equation `L(z) = b` over `F_{p^n}`.
/// It only sees `c_{p^k}` from degree `p^{n+k}` on, so it pins `phi` once
/// `N >= p^{n+1}` but needs far more to pin `t_0`; the solver keeps it as an
/// independent check on `phi`.
struct System {
    field: FieldCtx,
    /// Unknowns: `phi(u_1..u_{n-1})` followed by `c_d` for these degrees.
    degrees: Vec<usize>,
    /// Equations: coefficients of `x^a y^b`, `1 <= a <= b`.
    rows: Vec<(usize, usize)>,
    /// Column-major matrix.
    cols: Vec<Vec<FieldElt>>,
    pivot_rows: Vec<usize>,
    pivot_cols: Vec<usize>,
    /// Inverse of the pivot block.
    inv: Vec<Vec<FieldElt>>,
}

impl System {
    fn build(gn: &FormalGroupLaw<DefRing>, honda: &FormalGroupLaw<FieldCtx>, sparse: bool) -> Result<Self, LtError> {
        let f = honda.ring;
        let ring = &gn.ring;
        let big_n = gn.trunc_degree();
        let p = gn.p as usize;
        let nv = gn.n - 1;
        let keep = |d: usize| !sparse || (d + p - 2) % (p - 1) == 0;
        let degrees: Vec<usize> = (1..=big_n).filter(|&d| keep(d)).collect();
        let mut rows = Vec::new();
        for s in 2..=big_n {
            if !keep(s) {
                continue;
            }
            for a in 1..=s / 2 {
                rows.push((a, s - a));
            }
        }
        let h = &honda.series;
        let hx = h.d_x(&f);
        let hy = h.d_y(&f);
        let mut cols: Vec<Vec<FieldElt>> = Vec::new();
        for i in 1..=nv {
            let idx = (0..ring.num_monomials())
                .find(|&m| ring.monomial_degree(m) == 1 && ring.monomial(m)[i - 1] == 1)
                .expect("u_i is a monomial of E_0/m^j for j >= 2");
            let col = rows
                .iter()
                .map(|&(a, b)| f.neg(&ring.witt().residue(&ring.coeff(gn.series.get(a, b), idx))))
                .collect();
            cols.push(col);
        }
        let mut hpow = BSeries::zero(&f, big_n);
        hpow.set(0, 0, f.one());
        let mut dmax_done = 0;
        for &d in &degrees {
            while dmax_done < d {
                hpow = hpow.mul(&f, h);
                dmax_done += 1;
            }
            // L(x^d) = dH/dx x^d + dH/dy y^d - H^d, all terms through degree N
            let col = rows
                .iter()
                .map(|&(a, b)| {
                    let mut v = f.neg(hpow.get(a, b));
                    if a >= d {
                        v = f.add(&v, hx.get(a - d, b));
                    }
                    if b >= d {
                        v = f.add(&v, hy.get(a, b - d));
                    }
                    v
                })
                .collect();
            cols.push(col);
        }
        // elimination to choose pivots in column order
        let ncols = cols.len();
        let mut work: Vec<Vec<FieldElt>> = rows.iter().enumerate().map(|(ri, _)| cols.iter().map(|c| c[ri]).collect()).collect();
        let mut used = vec![false; rows.len()];
        let mut pivot_rows = Vec::new();
        let mut pivot_cols = Vec::new();
        for c in 0..ncols {
            let Some(r) = (0..rows.len()).find(|&r| !used[r] && !f.is_zero(&work[r][c])) else { continue };
            used[r] = true;
            pivot_rows.push(r);
            pivot_cols.push(c);
            let inv = f.inv(&work[r][c]).expect("nonzero pivot");
            let prow: Vec<FieldElt> = work[r].iter().map(|x| f.mul(x, &inv)).collect();
            for (rr, row) in work.iter_mut().enumerate() {
                if rr == r || f.is_zero(&row[c]) {
                    continue;
                }
                let k = row[c];
                for (x, y) in row.iter_mut().zip(&prow) {
                    *x = f.sub(x, &f.mul(&k, y));
                }
            }
        }
        let m = pivot_cols.len();
        let block: Vec<Vec<FieldElt>> = pivot_rows.iter().map(|&r| pivot_cols.iter().map(|&c| cols[c][r]).collect()).collect();
        let inv = invert(&f, &block).ok_or_else(|| LtError::PostCheck("pivot block is singular".into()))?;
        debug_assert_eq!(inv.len(), m);
        Ok(System { field: f, degrees, rows, cols, pivot_rows, pivot_cols, inv })
    }

    /// Minimal-support solution, checked against every equation.
    fn solve(&self, rhs: &[FieldElt]) -> Option<Vec<FieldElt>> {
        let f = &self.field;
        let b: Vec<FieldElt> = self.pivot_rows.iter().map(|&r| rhs[r]).collect();
        let mut z = vec![f.zero(); self.cols.len()];
        for (i, &c) in self.pivot_cols.iter().enumerate() {
            let mut acc = f.zero();
            for (a, y) in self.inv[i].iter().zip(&b) {
                if !f.is_zero(y) {
                    acc = f.add(&acc, &f.mul(a, y));
                }
            }
            z[c] = acc;
        }
        for (r, want) in rhs.iter().enumerate() {
            let mut acc = f.zero();
            for (c, zc) in z.iter().enumerate() {
                if !f.is_zero(zc) {
                    acc = f.add(&acc, &f.mul(&self.cols[c][r], zc));
                }
            }
            if acc != *want {
                return None;
            }
        }
        Some(z)
    }
}

fn invert(f: &FieldCtx, m: &[Vec<FieldElt>]) -> Option<Vec<Vec<FieldElt>>> {
    let n = m.len();
    let mut a: Vec<Vec<FieldElt>> = m
        .iter()
        .enumerate()
        .map(|(i, row)| {
            let mut r = row.clone();
            r.extend((0..n).map(|k| if k == i { f.one() } else { f.zero() }));
            r
        })
        .collect();
    for c in 0..n {
        let piv = (c..n).find(|&r| !f.is_zero(&a[r][c]))?;
        a.swap(c, piv);
        let inv = f.inv(&a[c][c])?;
        for x in a[c].iter_mut() {
            *x = f.mul(x, &inv);
        }
        let prow = a[c].clone();
        for (r, row) in a.iter_mut().enumerate() {
            if r == c || f.is_zero(&row[c]) {
                continue;
            }
            let k = row[c];
            for (x, y) in row.iter_mut().zip(&prow) {
                *x = f.sub(x, &f.mul(&k, y));
            }
        }
    }
    Some(a.into_iter().map(|r| r[n..].to_vec()).collect())
}

/// Precomputed data for the action on `E_0/m^j` at series truncation `N`.
pub struct LubinTate {
    pub p: u64,
    pub n: usize,
    pub j: u32,
    pub big_n: usize,
    pub gn: FormalGroupLaw<DefRing>,
    pub honda: FormalGroupLaw<FieldCtx>,
    log: LogSolver,
    bivariate: OnceLock<Result<System, LtError>>,
}

impl LubinTate {
    pub fn new(p: u64, n: usize, j: u32, big_n: Option<usize>) -> Result<Self, LtError> {
        if !(1..=2).contains(&n) {
            return Err(LtError::InvalidParameters(format!("the solver supports n = 1, 2 (got {n})")));
        }
        if p == 2 {
            return Err(LtError::PrimeTwoUnsupported);
        }
        if j < 2 {
            return Err(LtError::InvalidParameters(format!("j must be at least 2 (got {j})")));
        }
        let big_n = big_n.unwrap_or_else(|| default_degree(p, n));
        let pn = p.pow(n as u32) as usize;
        if big_n < pn {
            return Err(LtError::InvalidParameters(format!("N = {big_n} is below p^n = {pn}")));
        }
        let gn = universal_deformation_fgl(p, n, j, big_n)?;
        let honda = honda_fgl_field(p, n, big_n)?;
        let log = LogSolver::new(p, n, j, big_n)?;
        Ok(LubinTate { p, n, j, big_n, gn, honda, log, bivariate: OnceLock::new() })
    }

    pub fn ring(&self) -> &DefRing {
        &self.gn.ring
    }

    /// Degree of the deepest logarithm coefficient the solver imposes.
    pub fn effective_degree(&self) -> u64 {
        self.p.pow(self.log.count() as u32)
    }

    fn lift(&self, g: &StabElt, lift: Lift) -> Result<USeries<PolyElt>, LtError> {
        let r = self.ring();
        let gs = g.to_series(&self.honda)?;
        let mut h = gs.map(|c| r.teichmuller(c));
        if let Lift::Perturbed(seed) = lift {
            let mut rng = ChaCha8Rng::seed_from_u64(seed);
            for d in 1..=self.big_n {
                h.c[d] = r.add(&h.c[d], &r.random_in_m(&mut rng));
            }
        }
        Ok(h)
    }

    /// `G_h(f(x), f(y)) - f(phi_* G_n(x, y))`.
    fn defect(&self, gh: &BSeries<PolyElt>, f: &USeries<PolyElt>, phi: &[PolyElt]) -> Result<BSeries<PolyElt>, LtError> {
        let r = self.ring();
        let lhs = gh.substitute_separate(r, f, f)?;
        let pushed = if phi.is_empty() {
            self.gn.series.clone()
        } else {
            let table = r.power_table(phi);
            self.gn.series.map(|c| r.substitute_with(c, &table))
        };
        let rhs = pushed.compose_outer(r, f)?;
        Ok(lhs.sub(r, &rhs))
    }

    fn check_input(&self, g: &StabElt) -> Result<(), LtError> {
        if !g.is_unit() {
            return Err(LtError::NotAUnit);
        }
        if g.ctx().p() != self.p || g.ctx().n() != self.n {
            return Err(LtError::InvalidParameters("element and context differ in (p, n)".into()));
        }
        Ok(())
    }

    pub fn lt_action(&self, g: &StabElt) -> Result<LtResult, LtError> {
        self.lt_action_with(g, Lift::Teichmuller)
    }

    pub fn lt_action_with(&self, g: &StabElt, lift: Lift) -> Result<LtResult, LtError> {
        self.check_input(g)?;
        let r = self.ring();
        let (a, t) = self.log.solve(g, self.n - 1)?;
        let phi: Vec<PolyElt> = a.iter().map(|x| r.map_from(&self.log.ring, x)).collect();
        let t: Vec<PolyElt> = t[..=self.log.outputs].iter().map(|x| r.map_from(&self.log.ring, x)).collect();
        let p = self.p as usize;
        let terms: Vec<USeries<PolyElt>> = t
            .iter()
            .enumerate()
            .filter_map(|(i, c)| p.checked_pow(i as u32).filter(|&d| d <= self.big_n).map(|d| USeries::monomial(r, self.big_n, d, *c)))
            .collect();
        let psi = self.gn.formal_sum(&terms)?;
        let h = self.lift(g, lift)?;
        let f = h.revert(r)?.compose(r, &psi)?;
        let field = r.residue_field();
        for (d, c) in f.c.iter().enumerate() {
            let want = if d == 1 { field.one() } else { field.zero() };
            if r.residue(c) != want {
                return Err(LtError::PostCheck(format!("f is not x modulo m in degree {d}")));
            }
        }
        let gh = self.gn.conjugate(&h)?;
        if !self.defect(&gh.series, &f, &phi)?.is_zero(r) {
            return Err(LtError::PostCheck("the defining equation fails below the truncation".into()));
        }
        if !r.witt().is_unit(&r.constant_term(&t[0])) || r.residue(&t[0]) != g.leading_residue() {
            return Err(LtError::PostCheck("t_0(g) differs from g'(0) modulo m".into()));
        }
        Ok(LtResult {
            g: g.clone(),
            ring: r.clone(),
            phi,
            f,
            psi,
            t,
            residual: Residual { m_order: self.j, x_degree: self.big_n },
            effective_degree: self.effective_degree(),
        })
    }

    /// `phi_g` from the bivariate layer system with the Teichmüller lift,
    /// independent of the logarithm solver. Reliable once `N >= p^{n+1}`.
    pub fn bivariate_phi(&self, g: &StabElt) -> Result<Vec<PolyElt>, LtError> {
        self.check_input(g)?;
        let sys = self.bivariate.get_or_init(|| System::build(&self.gn, &self.honda, true)).as_ref().map_err(Clone::clone)?;
        let r = self.ring();
        let nv = self.n - 1;
        let h = self.lift(g, Lift::Teichmuller)?;
        let gh = self.gn.conjugate(&h)?;
        let mut phi: Vec<PolyElt> = (1..=nv).map(|i| r.u(i)).collect();
        let mut f = USeries::x(r, self.big_n);
        let neg_one = sys.field.neg(&sys.field.one());
        for layer in 1..self.j {
            let d = self.defect(&gh.series, &f, &phi)?;
            let mut rhs: BTreeMap<usize, Vec<FieldElt>> = BTreeMap::new();
            for (ri, &(a, b)) in sys.rows.iter().enumerate() {
                let c = d.get(a, b);
                if r.m_order(c) < layer {
                    return Err(LtError::SolverStuck { layer });
                }
                for (mu, v) in r.layer(c, layer) {
                    rhs.entry(mu).or_insert_with(|| vec![sys.field.zero(); sys.rows.len()])[ri] = sys.field.mul(&v, &neg_one);
                }
            }
            for (mu, b) in rhs {
                if b.iter().all(|x| sys.field.is_zero(x)) {
                    continue;
                }
                let z = sys.solve(&b).ok_or(LtError::SolverStuck { layer })?;
                for (c, zc) in z.iter().enumerate() {
                    if sys.field.is_zero(zc) {
                        continue;
                    }
                    let e = r.layer_element(mu, layer, zc);
                    if c < nv {
                        phi[c] = r.add(&phi[c], &e);
                    } else {
                        let deg = sys.degrees[c - nv];
                        f.c[deg] = r.add(&f.c[deg], &e);
                    }
                }
            }
        }
        if !self.defect(&gh.series, &f, &phi)?.is_zero(r) {
            return Err(LtError::SolverStuck { layer: self.j });
        }
        Ok(phi)
    }

    /// Independent solves, one per element, in input order.
    pub fn lt_action_batch(&self, gs: &[StabElt]) -> Vec<Result<LtResult, LtError>> {
        gs.par_iter().map(|g| self.lt_action(g)).collect()
    }

    /// `t_0(gh)` against `phi_g(t_0(h)) t_0(g)`.
    pub fn crossed_check(&self, g: &StabElt, h: &StabElt) -> Result<CrossedReport, LtError> {
        let gh = g.mul(h)?;
        let rs = [g, h, &gh].par_iter().map(|x| self.lt_action(x)).collect::<Result<Vec<_>, _>>()?;
        Ok(crossed_law(&rs[0], &rs[1], &rs[2]))
    }
}

/// The crossed-homomorphism law from the three results for `g`, `h` and `gh`.
pub fn crossed_law(g: &LtResult, h: &LtResult, gh: &LtResult) -> CrossedReport {
    let r = &g.ring;
    let lhs = *gh.t0();
    let rhs = r.mul(&act_on(g, h.t0()), g.t0());
    CrossedReport { holds: lhs == rhs, lhs: r.format(&lhs), rhs: r.format(&rhs) }
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct CrossedReport {
    pub holds: bool,
    pub lhs: String,
    pub rhs: String,
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::arith::{zn_canonical, WittCtx};

    #[test]
    fn exp_and_log_fixtures() {
        let r = DefRing::deformation(3, 1, 3).unwrap();
        assert_eq!(exp_p(&r, &r.zero()).unwrap(), r.one());
        let e = exp_p(&r, &r.one()).unwrap();
        assert_eq!(r.witt().as_int(&r.constant_term(&e)), Some(13));
        let (t, l) = log_unit(&r, &r.from_i64(-2), LogMode::Ell).unwrap();
        assert_eq!(t.truncation(), 2);
        assert_eq!(l, t.from_i64(-1));
        let (_, l) = log_unit(&r, &r.one(), LogMode::Ell).unwrap();
        assert!(t.is_zero(&l));
        assert_eq!(log_unit(&r, &r.from_i64(2), LogMode::Ell).unwrap_err(), LtError::NotPrincipalUnit);
    }

    #[test]
    fn exp_log_roundtrip_on_deformation_ring() {
        let r = DefRing::deformation(5, 2, 4).unwrap();
        let mut rng = ChaCha8Rng::seed_from_u64(2);
        for _ in 0..20 {
            let x = r.random(&mut rng);
            let y = exp_p(&r, &x).unwrap();
            let (t, l) = log_unit(&r, &y, LogMode::Ell).unwrap();
            assert_eq!(l, t.map_from(&r, &x));
            let (t2, lp) = log_unit(&r, &y, LogMode::Principal).unwrap();
            assert_eq!(lp, t2.map_from(&r, &r.mul_int(&x, 5)));
        }
    }

    #[test]
    fn zn_powers() {
        let r = DefRing::deformation(3, 2, 3).unwrap();
        let c = zn_canonical(3, 2, 3).unwrap();
        let x = r.add(&r.teichmuller(&r.residue_field().gen()), &r.u(1));
        let ta = zn_pow(&r, &x, &c.alpha).unwrap();
        assert_eq!(ta, r.teichmuller(&r.residue(&x)));
        let zero = ZnElt::from_int(3, 2, 3, 0).unwrap();
        assert_eq!(zn_pow(&r, &x, &zero).unwrap(), r.one());
        let seven = ZnElt::from_int(3, 2, 3, 7).unwrap();
        assert_eq!(zn_pow(&r, &x, &seven).unwrap(), r.pow(&x, 7));
        assert_eq!(zn_pow(&r, &r.u(1), &seven).unwrap_err(), LtError::NotAUnit);
    }

    #[test]
    fn identity_and_teichmuller_actions() {
        for p in [3u64, 5] {
            let lt = LubinTate::new(p, 2, 3, None).unwrap();
            let r = lt.ring();
            let w = WittCtx::new(p, 2, 4).unwrap();
            let one = lt.lt_action(&StabElt::one(w)).unwrap();
            assert_eq!(one.phi, vec![r.u(1)]);
            assert_eq!(one.f, USeries::x(r, lt.big_n));
            assert_eq!(one.t[0], r.one());
            let fld = w.residue_field();
            let om = fld.gen();
            let res = lt.lt_action(&StabElt::teichmuller(w, &om)).unwrap();
            let tom = r.teichmuller(&om);
            assert_eq!(res.phi[0], r.mul(&r.pow(&tom, p - 1), &r.u(1)));
            assert_eq!(res.psi, USeries::monomial(r, lt.big_n, 1, tom));
            assert_eq!(res.t[0], tom);
            assert_eq!(act_on(&res, &r.u(1)), res.phi[0]);
        }
    }

    #[test]
    fn extract_t_roundtrip() {
        let lt = LubinTate::new(3, 2, 3, None).unwrap();
        let r = lt.ring();
        let mut rng = ChaCha8Rng::seed_from_u64(3);
        let n = lt.big_n;
        let mut t = vec![r.random(&mut rng), r.random(&mut rng), r.random(&mut rng)];
        t[0] = r.add(&r.mul_int(&t[0], 3), &r.one());
        let terms: Vec<_> = t.iter().enumerate().map(|(i, c)| USeries::monomial(r, n, 3usize.pow(i as u32), *c)).collect();
        let psi = lt.gn.formal_sum(&terms).unwrap();
        assert_eq!(extract_t(&psi, &lt.gn, 2).unwrap(), t);
        let mut bad = USeries::x(r, n);
        bad.c[2] = r.one();
        assert_eq!(extract_t(&bad, &lt.gn, 2).unwrap_err(), LtError::ResidueNotExpressible { degree: 2 });
    }

    #[test]
    fn central_elements_act_trivially() {
        for p in [3u64, 5] {
            let lt = LubinTate::new(p, 2, 3, None).unwrap();
            let r = lt.ring();
            let w = WittCtx::new(p, 2, 4).unwrap();
            for a in [2i64, 4, -1, 1 + p as i64, 7 * p as i64 + 1] {
                let res = lt.lt_action(&StabElt::central(w, a)).unwrap();
                assert_eq!(res.phi, vec![r.u(1)]);
                assert_eq!(res.t[0], r.from_i64(a));
            }
        }
    }

    #[test]
    fn height_one_units_are_their_own_t0() {
        for p in [3u64, 5, 7] {
            let lt = LubinTate::new(p, 1, 3, None).unwrap();
            let r = lt.ring();
            let w = WittCtx::new(p, 1, 4).unwrap();
            let mut rng = ChaCha8Rng::seed_from_u64(p);
            for _ in 0..10 {
                let g = StabElt::random(w, &mut rng, true);
                let res = lt.lt_action(&g).unwrap();
                assert!(res.phi.is_empty());
                assert_eq!(res.t[0], r.constant(&r.witt().reduce_from(&w, &g.coeffs()[0])));
            }
        }
    }

    // phi and t_0 from the bivariate layer system run to x-degree 81
    #[test]
    fn matches_a_deep_bivariate_solve() {
        let w = WittCtx::new(3, 2, 4).unwrap();
        let mut rng = ChaCha8Rng::seed_from_u64(11);
        let lt = LubinTate::new(3, 2, 3, None).unwrap();
        let r = lt.ring();
        let want = [
            ("12+9*t + (5+2*t)*u1 + u1^2", "7+5*t + (3+7*t)*u1"),
            ("21+6*t + (2+6*t)*u1 + 2*t*u1^2", "25+10*t + (2+t)*u1"),
            ("6+6*t + 2*u1 + (2+2*t)*u1^2", "5+5*t + 8*u1"),
            ("15 + 7*u1 + u1^2", "13 + 2*u1"),
        ];
        for (phi, t0) in want {
            let g = StabElt::random(w, &mut rng, true);
            let res = lt.lt_action(&g).unwrap();
            assert_eq!(res.phi[0], crate::parse::parse_elt(r, phi).unwrap());
            assert_eq!(res.t[0], crate::parse::parse_elt(r, t0).unwrap());
        }
    }

    #[test]
    fn phi_agrees_with_the_bivariate_system() {
        let log = LubinTate::new(3, 2, 3, None).unwrap();
        let biv = LubinTate::new(3, 2, 3, Some(27)).unwrap();
        let w = WittCtx::new(3, 2, 4).unwrap();
        let mut rng = ChaCha8Rng::seed_from_u64(5);
        for _ in 0..4 {
            let g = StabElt::random(w, &mut rng, true);
            assert_eq!(log.lt_action(&g).unwrap().phi, biv.bivariate_phi(&g).unwrap());
        }
    }

    #[test]
    fn random_units_satisfy_the_structural_laws() {
        let lt = LubinTate::new(3, 2, 3, None).unwrap();
        let w = WittCtx::new(3, 2, 4).unwrap();
        let mut rng = ChaCha8Rng::seed_from_u64(11);
        for i in 0..12 {
            let g = StabElt::random(w, &mut rng, true);
            let h = StabElt::random(w, &mut rng, true);
            let rep = lt.crossed_check(&g, &h).unwrap();
            assert!(rep.holds, "{rep:?}");
            let (rg, rh) = (lt.lt_action(&g).unwrap(), lt.lt_action(&h).unwrap());
            let rgh = lt.lt_action(&g.mul(&h).unwrap()).unwrap();
            assert_eq!(rgh.phi[0], act_on(&rg, &rh.phi[0]));
            let alt = lt.lt_action_with(&g, Lift::Perturbed(i)).unwrap();
            assert_eq!(alt.phi, rg.phi);
            assert_eq!(alt.psi, rg.psi);
            assert_ne!(alt.f, rg.f);
        }
    }
}
