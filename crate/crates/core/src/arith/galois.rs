//! Twisted Galois modules over `W/p^k` and their Frobenius invariants.

use serde::Serialize;

use super::witt::{WittCtx, WittElt};
use super::ArithError;
use crate::ring::{inv_mod, mul_mod, Ring};

pub type WMatrix = Vec<Vec<WittElt>>;

/// A free `W/p^k`-module of rank `r` with the semilinear operator `v -> F * phi(v)`.
#[derive(Clone, Debug)]
pub struct TwistedGalModule {
    pub ctx: WittCtx,
    pub frob: WMatrix,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct DescentReport {
    pub invariants_rank: usize,
    /// Exponents `e` of summands `Z/p^e` with `0 < e < k` in the invariants.
    pub partial_torsion: Vec<u32>,
    pub iso_verified: bool,
}

impl TwistedGalModule {
    pub fn new(ctx: WittCtx, frob: WMatrix) -> Result<Self, ArithError> {
        let r = frob.len();
        if r == 0 || frob.iter().any(|row| row.len() != r) {
            return Err(ArithError::NotSemilinear("operator matrix is not square".into()));
        }
        Ok(TwistedGalModule { ctx, frob })
    }

    /// `(W/p^k)^r` with the coordinatewise Frobenius.
    pub fn standard(ctx: WittCtx, r: usize) -> Self {
        TwistedGalModule { ctx, frob: identity(&ctx, r) }
    }

    /// The standard module written in the basis given by the columns of `b`.
    pub fn conjugated(ctx: WittCtx, b: &WMatrix) -> Result<Self, ArithError> {
        let b_inv = mat_inv(&ctx, b).ok_or_else(|| ArithError::NotSemilinear("basis change is singular".into()))?;
        let frob = mat_mul(&ctx, &b_inv, &mat_frob(&ctx, b));
        Self::new(ctx, frob)
    }

    pub fn rank(&self) -> usize {
        self.frob.len()
    }

    /// `F phi(v)`.
    pub fn apply(&self, v: &[WittElt]) -> Vec<WittElt> {
        let fv: Vec<WittElt> = v.iter().map(|x| self.ctx.frobenius(x)).collect();
        mat_vec(&self.ctx, &self.frob, &fv)
    }

    /// `F phi(F) ... phi^{n-1}(F) = I`, which makes the operator of order `n`.
    pub fn check_semilinear(&self) -> Result<(), ArithError> {
        let ctx = &self.ctx;
        let mut acc = self.frob.clone();
        let mut twisted = self.frob.clone();
        for _ in 1..ctx.n() {
            twisted = mat_frob(ctx, &twisted);
            acc = mat_mul(ctx, &acc, &twisted);
        }
        if acc != identity(ctx, self.rank()) {
            return Err(ArithError::NotSemilinear(format!(
                "the n-fold twisted product of the operator is not the identity (rank {})",
                self.rank()
            )));
        }
        Ok(())
    }
}

/// Computes `M^Gal` as the kernel of `v -> F phi(v) - v` over `Z/p^k` and checks
/// that `W (x) M^Gal -> M` is an isomorphism.
pub fn galois_descent_check(m: &TwistedGalModule) -> Result<DescentReport, ArithError> {
    m.check_semilinear()?;
    let ctx = &m.ctx;
    let (n, r) = (ctx.n(), m.rank());
    let dim = n * r;
    let pk = ctx.modulus_int();
    let k = ctx.precision();

    // columns: images of the Z/p^k-basis t^l e_j
    let mut a = vec![vec![0u64; dim]; dim];
    for j in 0..r {
        for l in 0..n {
            let mut v = vec![ctx.zero(); r];
            let mut c = [0i64; 3];
            c[l] = 1;
            v[j] = ctx.from_coeffs(&c[..n]);
            let img = m.apply(&v);
            for (jj, x) in img.iter().enumerate() {
                let x = ctx.sub(x, &v[jj]);
                for ll in 0..n {
                    a[jj * n + ll][j * n + l] = x.coeffs()[ll];
                }
            }
        }
    }

    let (diag, cols) = smith_columns(a, ctx.p(), pk, k);
    let mut free = Vec::new();
    let mut partial_torsion = Vec::new();
    for (i, &e) in diag.iter().enumerate() {
        if e >= k {
            free.push(i);
        } else if e > 0 {
            partial_torsion.push(k - e);
        }
    }
    let invariants_rank = free.len();

    let mut iso_verified = invariants_rank == r && partial_torsion.is_empty();
    if iso_verified {
        // basis matrix over W: column s is the s-th invariant vector
        let mut basis = vec![vec![ctx.zero(); r]; r];
        for (s, &i) in free.iter().enumerate() {
            for j in 0..r {
                let coeffs: Vec<i64> = (0..n).map(|l| cols[j * n + l][i] as i64).collect();
                basis[j][s] = ctx.from_coeffs(&coeffs);
            }
        }
        iso_verified = mat_inv(ctx, &basis).is_some();
    }
    Ok(DescentReport { invariants_rank, partial_torsion, iso_verified })
}

/// Smith reduction over `Z/p^k`. Returns the valuations of the diagonal
/// (`k` for zero) and the accumulated column transformation `V`.
/// Pivots: smallest valuation, then lowest (row, column) index.
fn smith_columns(mut a: Vec<Vec<u64>>, p: u64, pk: u64, k: u32) -> (Vec<u32>, Vec<Vec<u64>>) {
    let dim = a.len();
    let val = |x: u64| if x == 0 { k } else { crate::ring::valuation(x as u128, p).min(k) };
    let mut v: Vec<Vec<u64>> = (0..dim).map(|i| (0..dim).map(|j| u64::from(i == j)).collect()).collect();
    let mut diag = Vec::with_capacity(dim);
    for t in 0..dim {
        let mut best: Option<(u32, usize, usize)> = None;
        for i in t..dim {
            for j in t..dim {
                let e = val(a[i][j]);
                if e < k && best.map_or(true, |(be, _, _)| e < be) {
                    best = Some((e, i, j));
                }
            }
        }
        let Some((e, pi, pj)) = best else {
            diag.extend(std::iter::repeat(k).take(dim - t));
            break;
        };
        a.swap(t, pi);
        for row in a.iter_mut() {
            row.swap(t, pj);
        }
        for row in v.iter_mut() {
            row.swap(t, pj);
        }
        let pe = p.pow(e);
        let unit_inv = inv_mod((a[t][t] / pe) % pk, pk).expect("pivot unit part");
        for x in a[t].iter_mut() {
            *x = mul_mod(*x, unit_inv, pk);
        }
        // a[t][t] == p^e now
        for i in 0..dim {
            if i == t || a[i][t] == 0 {
                continue;
            }
            let f = a[i][t] / pe;
            for j in 0..dim {
                let s = mul_mod(f, a[t][j], pk);
                a[i][j] = (a[i][j] + pk - s) % pk;
            }
        }
        for j in 0..dim {
            if j == t || a[t][j] == 0 {
                continue;
            }
            let f = a[t][j] / pe;
            for row in a.iter_mut() {
                let s = mul_mod(f, row[t], pk);
                row[j] = (row[j] + pk - s) % pk;
            }
            for row in v.iter_mut() {
                let s = mul_mod(f, row[t], pk);
                row[j] = (row[j] + pk - s) % pk;
            }
        }
        diag.push(e);
    }
    (diag, v)
}

pub(crate) fn identity(ctx: &WittCtx, r: usize) -> WMatrix {
    (0..r).map(|i| (0..r).map(|j| if i == j { ctx.one() } else { ctx.zero() }).collect()).collect()
}

pub(crate) fn mat_mul(ctx: &WittCtx, a: &WMatrix, b: &WMatrix) -> WMatrix {
    let (rows, inner, cols) = (a.len(), b.len(), b.first().map_or(0, Vec::len));
    let mut out = vec![vec![ctx.zero(); cols]; rows];
    for i in 0..rows {
        for l in 0..inner {
            if ctx.is_zero(&a[i][l]) {
                continue;
            }
            for j in 0..cols {
                out[i][j] = ctx.add(&out[i][j], &ctx.mul(&a[i][l], &b[l][j]));
            }
        }
    }
    out
}

fn mat_vec(ctx: &WittCtx, a: &WMatrix, v: &[WittElt]) -> Vec<WittElt> {
    a.iter()
        .map(|row| row.iter().zip(v).fold(ctx.zero(), |acc, (x, y)| ctx.add(&acc, &ctx.mul(x, y))))
        .collect()
}

pub(crate) fn mat_frob(ctx: &WittCtx, a: &WMatrix) -> WMatrix {
    a.iter().map(|row| row.iter().map(|x| ctx.frobenius(x)).collect()).collect()
}

/// Gauss-Jordan inverse over the local ring `W/p^k`; `None` when singular mod p.
pub(crate) fn mat_inv(ctx: &WittCtx, a: &WMatrix) -> Option<WMatrix> {
    let r = a.len();
    let mut m = a.clone();
    let mut inv = identity(ctx, r);
    for c in 0..r {
        let pr = (c..r).find(|&i| ctx.is_unit(&m[i][c]))?;
        m.swap(c, pr);
        inv.swap(c, pr);
        let u = ctx.inv(&m[c][c])?;
        for j in 0..r {
            m[c][j] = ctx.mul(&m[c][j], &u);
            inv[c][j] = ctx.mul(&inv[c][j], &u);
        }
        for i in 0..r {
            if i == c || ctx.is_zero(&m[i][c]) {
                continue;
            }
            let f = m[i][c];
            for j in 0..r {
                m[i][j] = ctx.sub(&m[i][j], &ctx.mul(&f, &m[c][j]));
                inv[i][j] = ctx.sub(&inv[i][j], &ctx.mul(&f, &inv[c][j]));
            }
        }
    }
    Some(inv)
}

#[cfg(test)]
mod tests {
    use super::*;
    use rand::SeedableRng;
    use rand_chacha::ChaCha8Rng;

    #[test]
    fn rank_one_standard_module() {
        let ctx = WittCtx::new(3, 2, 3).unwrap();
        let rep = galois_descent_check(&TwistedGalModule::standard(ctx, 1)).unwrap();
        assert_eq!(rep, DescentReport { invariants_rank: 1, partial_torsion: vec![], iso_verified: true });
    }

    #[test]
    fn conjugated_modules_descend() {
        let mut rng = ChaCha8Rng::seed_from_u64(17);
        for (p, n, k) in [(3, 2, 3), (5, 2, 2), (2, 3, 4), (3, 3, 2)] {
            let ctx = WittCtx::new(p, n, k).unwrap();
            let mut done = 0;
            while done < 4 {
                let b: WMatrix = (0..2).map(|_| (0..2).map(|_| ctx.random(&mut rng)).collect()).collect();
                if mat_inv(&ctx, &b).is_none() {
                    continue;
                }
                let m = TwistedGalModule::conjugated(ctx, &b).unwrap();
                let rep = galois_descent_check(&m).unwrap();
                assert_eq!(rep.invariants_rank, 2);
                assert!(rep.iso_verified, "{p} {n} {k}");
                done += 1;
            }
        }
    }

    #[test]
    fn wrong_order_operator_is_rejected() {
        let ctx = WittCtx::new(5, 1, 2).unwrap();
        let m = TwistedGalModule::new(ctx, vec![vec![ctx.from_int(2)]]).unwrap();
        assert!(matches!(galois_descent_check(&m), Err(ArithError::NotSemilinear(_))));
    }

    #[test]
    fn inverse_roundtrip() {
        let ctx = WittCtx::new(3, 2, 4).unwrap();
        let mut rng = ChaCha8Rng::seed_from_u64(3);
        for _ in 0..10 {
            let b: WMatrix = (0..3).map(|_| (0..3).map(|_| ctx.random(&mut rng)).collect()).collect();
            if let Some(bi) = mat_inv(&ctx, &b) {
                assert_eq!(mat_mul(&ctx, &b, &bi), identity(&ctx, 3));
            }
        }
    }
}
