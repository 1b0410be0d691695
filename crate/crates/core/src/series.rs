//! Truncated power series in one and two variables over a [`Ring`].

use serde::{Deserialize, Serialize};

use crate::ring::Ring;

#[derive(Debug, Clone, PartialEq, Eq, thiserror::Error)]
pub enum SeriesError {
    #[error("inner series has a nonzero constant term")]
    ConstantTermNonzero,
    #[error("linear coefficient is not a unit")]
    LinearNotUnit,
    #[error("truncation degrees differ ({0} vs {1})")]
    TruncationMismatch(usize, usize),
}

/// `c_0 + c_1 x + ... + c_N x^N`.
#[derive(Clone, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct USeries<E> {
    pub c: Vec<E>,
}

/// `sum c_{ij} x^i y^j` over `i + j <= N`, stored by total degree.
#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub struct BSeries<E> {
    n: usize,
    c: Vec<E>,
}

#[inline]
fn tri(d: usize) -> usize {
    d * (d + 1) / 2
}

impl<E: Clone + PartialEq> USeries<E> {
    pub fn zero<R: Ring<Elt = E>>(r: &R, n: usize) -> Self {
        USeries { c: vec![r.zero(); n + 1] }
    }

    /// The series `x`.
    pub fn x<R: Ring<Elt = E>>(r: &R, n: usize) -> Self {
        Self::monomial(r, n, 1, r.one())
    }

    pub fn monomial<R: Ring<Elt = E>>(r: &R, n: usize, d: usize, c: E) -> Self {
        let mut s = Self::zero(r, n);
        if d <= n {
            s.c[d] = c;
        }
        s
    }

    pub fn from_coeffs<R: Ring<Elt = E>>(r: &R, n: usize, coeffs: &[E]) -> Self {
        let mut s = Self::zero(r, n);
        for (d, c) in coeffs.iter().enumerate().take(n + 1) {
            s.c[d] = c.clone();
        }
        s
    }

    pub fn trunc_degree(&self) -> usize {
        self.c.len() - 1
    }

    pub fn coeff(&self, d: usize) -> &E {
        &self.c[d]
    }

    pub fn truncate(&self, n: usize) -> Self {
        assert!(n <= self.trunc_degree());
        USeries { c: self.c[..=n].to_vec() }
    }

    /// Lowest degree with a nonzero coefficient.
    pub fn valuation<R: Ring<Elt = E>>(&self, r: &R) -> Option<usize> {
        self.c.iter().position(|x| !r.is_zero(x))
    }

    pub fn add<R: Ring<Elt = E>>(&self, r: &R, o: &Self) -> Self {
        USeries { c: self.c.iter().zip(&o.c).map(|(a, b)| r.add(a, b)).collect() }
    }

    pub fn sub<R: Ring<Elt = E>>(&self, r: &R, o: &Self) -> Self {
        USeries { c: self.c.iter().zip(&o.c).map(|(a, b)| r.sub(a, b)).collect() }
    }

    pub fn neg<R: Ring<Elt = E>>(&self, r: &R) -> Self {
        USeries { c: self.c.iter().map(|a| r.neg(a)).collect() }
    }

    pub fn scale<R: Ring<Elt = E>>(&self, r: &R, s: &E) -> Self {
        USeries { c: self.c.iter().map(|a| r.mul(a, s)).collect() }
    }

    pub fn map<E2, F: Fn(&E) -> E2>(&self, f: F) -> USeries<E2> {
        USeries { c: self.c.iter().map(f).collect() }
    }

    pub fn mul<R: Ring<Elt = E>>(&self, r: &R, o: &Self) -> Self {
        let n = self.trunc_degree().min(o.trunc_degree());
        let mut out = vec![r.zero(); n + 1];
        let onz: Vec<usize> = (0..=n).filter(|&d| !r.is_zero(&o.c[d])).collect();
        for i in 0..=n {
            if r.is_zero(&self.c[i]) {
                continue;
            }
            for &j in &onz {
                if i + j > n {
                    break;
                }
                let t = r.mul(&self.c[i], &o.c[j]);
                r.add_assign(&mut out[i + j], &t);
            }
        }
        USeries { c: out }
    }

    pub fn pow<R: Ring<Elt = E>>(&self, r: &R, mut e: u64) -> Self {
        let mut acc = Self::monomial(r, self.trunc_degree(), 0, r.one());
        let mut base = self.clone();
        while e > 0 {
            if e & 1 == 1 {
                acc = acc.mul(r, &base);
            }
            e >>= 1;
            if e > 0 {
                base = base.mul(r, &base);
            }
        }
        acc
    }

    /// `[1, g, g^2, ..., g^m]`.
    pub fn powers<R: Ring<Elt = E>>(&self, r: &R, m: usize) -> Vec<Self> {
        let mut v = vec![Self::monomial(r, self.trunc_degree(), 0, r.one())];
        for i in 1..=m {
            let next = v[i - 1].mul(r, self);
            v.push(next);
        }
        v
    }

    /// `f(g(x))`.
    pub fn compose<R: Ring<Elt = E>>(&self, r: &R, g: &Self) -> Result<Self, SeriesError> {
        if !r.is_zero(&g.c[0]) {
            return Err(SeriesError::ConstantTermNonzero);
        }
        let n = self.trunc_degree().min(g.trunc_degree());
        let g = g.truncate(n);
        // Horner, skipping the multiplications that only shift zeros
        let mut acc = Self::zero(r, n);
        for d in (0..=n).rev() {
            if acc.c.iter().any(|x| !r.is_zero(x)) {
                acc = acc.mul(r, &g);
            }
            r.add_assign(&mut acc.c[0], &self.c[d]);
        }
        Ok(acc)
    }

    /// Compositional inverse; requires a unit linear coefficient.
    pub fn revert<R: Ring<Elt = E>>(&self, r: &R) -> Result<Self, SeriesError> {
        if !r.is_zero(&self.c[0]) {
            return Err(SeriesError::ConstantTermNonzero);
        }
        let n = self.trunc_degree();
        if n == 0 {
            return Ok(self.clone());
        }
        let a1_inv = r.inv(&self.c[1]).ok_or(SeriesError::LinearNotUnit)?;
        // g <- g - (f(g) - x)/a_1 gains at least one degree per step
        let x = Self::x(r, n);
        let mut g = x.scale(r, &a1_inv);
        for _ in 0..n {
            let err = self.compose(r, &g)?.sub(r, &x);
            if err.c.iter().all(|c| r.is_zero(c)) {
                break;
            }
            g = g.sub(r, &err.scale(r, &a1_inv));
        }
        Ok(g)
    }

    pub fn format<R: Ring<Elt = E>>(&self, r: &R) -> String {
        let mut parts = Vec::new();
        for (d, c) in self.c.iter().enumerate() {
            if r.is_zero(c) {
                continue;
            }
            let cs = r.format(c);
            let cs = if cs.contains('+') { format!("({cs})") } else { cs };
            let mono = match d {
                0 => String::new(),
                1 => "x".into(),
                _ => format!("x^{d}"),
            };
            parts.push(match (d, cs.as_str()) {
                (0, _) => cs,
                (_, "1") => mono,
                _ => format!("{cs}*{mono}"),
            });
        }
        if parts.is_empty() {
            "0".into()
        } else {
            parts.join(" + ")
        }
    }
}

impl<E: Clone + PartialEq> BSeries<E> {
    pub fn zero<R: Ring<Elt = E>>(r: &R, n: usize) -> Self {
        BSeries { n, c: vec![r.zero(); tri(n + 1)] }
    }

    pub fn trunc_degree(&self) -> usize {
        self.n
    }

    #[inline]
    fn idx(i: usize, j: usize) -> usize {
        tri(i + j) + j
    }

    pub fn get(&self, i: usize, j: usize) -> &E {
        &self.c[Self::idx(i, j)]
    }

    pub fn set(&mut self, i: usize, j: usize, v: E) {
        let k = Self::idx(i, j);
        self.c[k] = v;
    }

    /// `(i, j, c_{ij})` over all slots, including zeros, by total degree.
    pub fn iter(&self) -> impl Iterator<Item = (usize, usize, &E)> {
        (0..=self.n).flat_map(move |d| (0..=d).map(move |j| (d - j, j, &self.c[Self::idx(d - j, j)])))
    }

    pub fn nonzero<R: Ring<Elt = E>>(&self, r: &R) -> Vec<(usize, usize, E)> {
        self.iter().filter(|(_, _, c)| !r.is_zero(c)).map(|(i, j, c)| (i, j, c.clone())).collect()
    }

    /// `x + y`.
    pub fn x_plus_y<R: Ring<Elt = E>>(r: &R, n: usize) -> Self {
        let mut s = Self::zero(r, n);
        if n >= 1 {
            s.set(1, 0, r.one());
            s.set(0, 1, r.one());
        }
        s
    }

    /// `f(x)` viewed as a bivariate series.
    pub fn from_x<R: Ring<Elt = E>>(r: &R, f: &USeries<E>) -> Self {
        let mut s = Self::zero(r, f.trunc_degree());
        for (d, c) in f.c.iter().enumerate() {
            s.set(d, 0, c.clone());
        }
        s
    }

    /// `f(y)` viewed as a bivariate series.
    pub fn from_y<R: Ring<Elt = E>>(r: &R, f: &USeries<E>) -> Self {
        let mut s = Self::zero(r, f.trunc_degree());
        for (d, c) in f.c.iter().enumerate() {
            s.set(0, d, c.clone());
        }
        s
    }

    pub fn truncate(&self, n: usize) -> Self {
        assert!(n <= self.n);
        BSeries { n, c: self.c[..tri(n + 1)].to_vec() }
    }

    /// Sum, truncated at the smaller of the two degrees.
    pub fn add<R: Ring<Elt = E>>(&self, r: &R, o: &Self) -> Self {
        BSeries { n: self.n.min(o.n), c: self.c.iter().zip(&o.c).map(|(a, b)| r.add(a, b)).collect() }
    }

    pub fn sub<R: Ring<Elt = E>>(&self, r: &R, o: &Self) -> Self {
        BSeries { n: self.n.min(o.n), c: self.c.iter().zip(&o.c).map(|(a, b)| r.sub(a, b)).collect() }
    }

    pub fn scale<R: Ring<Elt = E>>(&self, r: &R, s: &E) -> Self {
        BSeries { n: self.n, c: self.c.iter().map(|a| r.mul(a, s)).collect() }
    }

    pub fn map<E2, F: Fn(&E) -> E2>(&self, f: F) -> BSeries<E2> {
        BSeries { n: self.n, c: self.c.iter().map(f).collect() }
    }

    pub fn is_zero<R: Ring<Elt = E>>(&self, r: &R) -> bool {
        self.c.iter().all(|x| r.is_zero(x))
    }

    /// `F(y, x)`.
    pub fn swap(&self) -> Self {
        let mut c = self.c.clone();
        for (i, j, v) in self.iter() {
            c[Self::idx(j, i)] = v.clone();
        }
        BSeries { n: self.n, c }
    }

    /// Nonzero terms as `(i, j, index)` sorted by total degree.
    fn support<R: Ring<Elt = E>>(&self, r: &R) -> Vec<(usize, usize, usize)> {
        let mut v = Vec::new();
        for d in 0..=self.n {
            for j in 0..=d {
                let k = Self::idx(d - j, j);
                if !r.is_zero(&self.c[k]) {
                    v.push((d - j, j, k));
                }
            }
        }
        v
    }

    pub fn mul<R: Ring<Elt = E>>(&self, r: &R, o: &Self) -> Self {
        let n = self.n.min(o.n);
        let mut out = Self::zero(r, n);
        let sa = self.support(r);
        let sb = o.support(r);
        for &(i1, j1, k1) in &sa {
            let d1 = i1 + j1;
            if d1 > n {
                break;
            }
            let a = &self.c[k1];
            for &(i2, j2, k2) in &sb {
                if d1 + i2 + j2 > n {
                    break;
                }
                let t = r.mul(a, &o.c[k2]);
                let k = Self::idx(i1 + i2, j1 + j2);
                r.add_assign(&mut out.c[k], &t);
            }
        }
        out
    }

    pub fn pow<R: Ring<Elt = E>>(&self, r: &R, mut e: u64) -> Self {
        let mut acc = Self::zero(r, self.n);
        acc.set(0, 0, r.one());
        let mut base = self.clone();
        while e > 0 {
            if e & 1 == 1 {
                acc = acc.mul(r, &base);
            }
            e >>= 1;
            if e > 0 {
                base = base.mul(r, &base);
            }
        }
        acc
    }

    /// `dF/dx`, truncated at degree `N - 1`.
    pub fn d_x<R: Ring<Elt = E>>(&self, r: &R) -> Self {
        let n = self.n.saturating_sub(1);
        let mut out = Self::zero(r, n);
        for (i, j, c) in self.iter() {
            if i >= 1 && i + j - 1 <= n {
                out.set(i - 1, j, r.mul_int(c, i as i64));
            }
        }
        out
    }

    /// `dF/dy`, truncated at degree `N - 1`.
    pub fn d_y<R: Ring<Elt = E>>(&self, r: &R) -> Self {
        self.swap().d_x(r).swap()
    }

    /// `F(a(x), b(x))`.
    pub fn bsubstitute<R: Ring<Elt = E>>(&self, r: &R, a: &USeries<E>, b: &USeries<E>) -> Result<USeries<E>, SeriesError> {
        if !r.is_zero(&a.c[0]) || !r.is_zero(&b.c[0]) {
            return Err(SeriesError::ConstantTermNonzero);
        }
        let n = self.n.min(a.trunc_degree()).min(b.trunc_degree());
        let (a, b) = (a.truncate(n), b.truncate(n));
        let pa = a.powers(r, n);
        let pb = b.powers(r, n);
        let mut acc = USeries::zero(r, n);
        for i in 0..=n {
            // Q_i = sum_j c_ij b^j, then acc += a^i Q_i
            let mut q = USeries::zero(r, n);
            let mut any = false;
            for j in 0..=(n - i) {
                let c = self.get(i, j);
                if r.is_zero(c) {
                    continue;
                }
                any = true;
                for d in j..=n {
                    if !r.is_zero(&pb[j].c[d]) {
                        let t = r.mul(c, &pb[j].c[d]);
                        r.add_assign(&mut q.c[d], &t);
                    }
                }
            }
            if any {
                acc = acc.add(r, &pa[i].mul(r, &q));
            }
        }
        Ok(acc)
    }

    /// `F(a(x), b(y))`.
    pub fn substitute_separate<R: Ring<Elt = E>>(&self, r: &R, a: &USeries<E>, b: &USeries<E>) -> Result<Self, SeriesError> {
        if !r.is_zero(&a.c[0]) || !r.is_zero(&b.c[0]) {
            return Err(SeriesError::ConstantTermNonzero);
        }
        let n = self.n.min(a.trunc_degree()).min(b.trunc_degree());
        let (a, b) = (a.truncate(n), b.truncate(n));
        let pa = a.powers(r, n);
        let pb = b.powers(r, n);
        let mut out = Self::zero(r, n);
        for i in 0..=n {
            let mut q = USeries::zero(r, n);
            let mut any = false;
            for j in 0..=(n - i) {
                let c = self.get(i, j);
                if r.is_zero(c) {
                    continue;
                }
                any = true;
                for d in j..=(n - i) {
                    if !r.is_zero(&pb[j].c[d]) {
                        let t = r.mul(c, &pb[j].c[d]);
                        r.add_assign(&mut q.c[d], &t);
                    }
                }
            }
            if !any {
                continue;
            }
            let qs: Vec<usize> = (0..=n).filter(|&d| !r.is_zero(&q.c[d])).collect();
            for d1 in i..=n {
                let x = &pa[i].c[d1];
                if r.is_zero(x) {
                    continue;
                }
                for &d2 in &qs {
                    if d1 + d2 > n {
                        break;
                    }
                    let t = r.mul(x, &q.c[d2]);
                    let k = Self::idx(d1, d2);
                    r.add_assign(&mut out.c[k], &t);
                }
            }
        }
        Ok(out)
    }

    /// `f(F(x, y))` for a univariate `f`; `F` must have zero constant term.
    pub fn compose_outer<R: Ring<Elt = E>>(&self, r: &R, f: &USeries<E>) -> Result<Self, SeriesError> {
        if !r.is_zero(self.get(0, 0)) {
            return Err(SeriesError::ConstantTermNonzero);
        }
        let n = self.n.min(f.trunc_degree());
        let b = self.truncate(n);
        let mut acc = Self::zero(r, n);
        let mut pw = Self::zero(r, n);
        pw.set(0, 0, r.one());
        // powers are built incrementally; gaps in f are bridged by one multiplication
        let last = (1..=n).rev().find(|&d| !r.is_zero(&f.c[d]));
        let Some(last) = last else {
            acc.set(0, 0, f.c[0].clone());
            return Ok(acc);
        };
        for d in 1..=last {
            pw = pw.mul(r, &b);
            if !r.is_zero(&f.c[d]) {
                acc = acc.add(r, &pw.scale(r, &f.c[d]));
            }
        }
        let c0 = r.add(acc.get(0, 0), &f.c[0]);
        acc.set(0, 0, c0);
        Ok(acc)
    }

    /// `F(x, 0)`.
    pub fn restrict_x<R: Ring<Elt = E>>(&self, r: &R) -> USeries<E> {
        let mut u = USeries::zero(r, self.n);
        for d in 0..=self.n {
            u.c[d] = self.get(d, 0).clone();
        }
        u
    }

    pub fn format<R: Ring<Elt = E>>(&self, r: &R) -> String {
        let mut parts = Vec::new();
        for (i, j, c) in self.iter() {
            if r.is_zero(c) {
                continue;
            }
            let mut mono = Vec::new();
            match i {
                0 => {}
                1 => mono.push("x".to_string()),
                _ => mono.push(format!("x^{i}")),
            }
            match j {
                0 => {}
                1 => mono.push("y".to_string()),
                _ => mono.push(format!("y^{j}")),
            }
            let cs = r.format(c);
            let cs = if cs.contains('+') { format!("({cs})") } else { cs };
            parts.push(if mono.is_empty() {
                cs
            } else if cs == "1" {
                mono.join("*")
            } else {
                format!("{cs}*{}", mono.join("*"))
            });
        }
        if parts.is_empty() {
            "0".into()
        } else {
            parts.join(" + ")
        }
    }
}
