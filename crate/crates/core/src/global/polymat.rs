//! Matrices over `F[x]`: column bases and weak Popov column reduction.

use std::fmt;

use crate::arith::{FieldCtx, Poly};

#[derive(Clone, PartialEq, Eq)]
pub struct PMat {
    ctx: FieldCtx,
    rows: usize,
    cols: usize,
    d: Vec<Poly>,
}

impl fmt::Debug for PMat {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "[")?;
        for i in 0..self.rows {
            if i > 0 {
                write!(f, "; ")?;
            }
            for j in 0..self.cols {
                if j > 0 {
                    write!(f, ", ")?;
                }
                write!(f, "{}", self.get(i, j))?;
            }
        }
        write!(f, "]")
    }
}

impl PMat {
    pub fn zeros(ctx: &FieldCtx, rows: usize, cols: usize) -> Self {
        PMat { ctx: ctx.clone(), rows, cols, d: vec![Poly::zero(ctx); rows * cols] }
    }
    pub fn identity(ctx: &FieldCtx, n: usize) -> Self {
        let mut m = Self::zeros(ctx, n, n);
        for i in 0..n {
            m.set(i, i, Poly::one(ctx));
        }
        m
    }
    pub fn diagonal(ctx: &FieldCtx, entries: Vec<Poly>) -> Self {
        let n = entries.len();
        let mut m = Self::zeros(ctx, n, n);
        for (i, e) in entries.into_iter().enumerate() {
            m.set(i, i, e);
        }
        m
    }
    pub fn from_rows(ctx: &FieldCtx, rows: Vec<Vec<Poly>>) -> Self {
        let r = rows.len();
        let c = rows.first().map_or(0, |x| x.len());
        assert!(rows.iter().all(|x| x.len() == c), "ragged matrix");
        PMat { ctx: ctx.clone(), rows: r, cols: c, d: rows.into_iter().flatten().collect() }
    }
    pub fn from_cols(ctx: &FieldCtx, rows: usize, cols: &[Vec<Poly>]) -> Self {
        let mut m = Self::zeros(ctx, rows, cols.len());
        for (j, c) in cols.iter().enumerate() {
            for (i, v) in c.iter().enumerate() {
                m.set(i, j, v.clone());
            }
        }
        m
    }

    pub fn ctx(&self) -> &FieldCtx {
        &self.ctx
    }
    pub fn rows(&self) -> usize {
        self.rows
    }
    pub fn cols(&self) -> usize {
        self.cols
    }
    pub fn get(&self, i: usize, j: usize) -> &Poly {
        &self.d[i * self.cols + j]
    }
    pub fn set(&mut self, i: usize, j: usize, v: Poly) {
        self.d[i * self.cols + j] = v;
    }
    pub fn col(&self, j: usize) -> Vec<Poly> {
        (0..self.rows).map(|i| self.get(i, j).clone()).collect()
    }
    pub fn columns(&self) -> Vec<Vec<Poly>> {
        (0..self.cols).map(|j| self.col(j)).collect()
    }
    pub fn is_zero(&self) -> bool {
        self.d.iter().all(|p| p.is_zero())
    }
    /// Largest entry degree in column `j`, `None` for a zero column.
    pub fn col_degree(&self, j: usize) -> Option<usize> {
        (0..self.rows).filter_map(|i| self.get(i, j).deg()).max()
    }
    pub fn max_degree(&self) -> Option<usize> {
        self.d.iter().filter_map(|p| p.deg()).max()
    }

    pub fn mul(&self, o: &PMat) -> PMat {
        assert_eq!(self.cols, o.rows);
        let mut m = PMat::zeros(&self.ctx, self.rows, o.cols);
        for i in 0..self.rows {
            for j in 0..o.cols {
                let mut acc = Poly::zero(&self.ctx);
                for k in 0..self.cols {
                    let (a, b) = (self.get(i, k), o.get(k, j));
                    if !a.is_zero() && !b.is_zero() {
                        acc = acc.add(&a.mul(b));
                    }
                }
                m.set(i, j, acc);
            }
        }
        m
    }
    pub fn transpose(&self) -> PMat {
        let mut m = PMat::zeros(&self.ctx, self.cols, self.rows);
        for i in 0..self.rows {
            for j in 0..self.cols {
                m.set(j, i, self.get(i, j).clone());
            }
        }
        m
    }
    pub fn map(&self, f: impl Fn(&Poly) -> Poly) -> PMat {
        PMat { ctx: self.ctx.clone(), rows: self.rows, cols: self.cols, d: self.d.iter().map(f).collect() }
    }
    pub fn map_ctx(&self, ctx: &FieldCtx, f: impl Fn(&Poly) -> Poly) -> PMat {
        PMat { ctx: ctx.clone(), rows: self.rows, cols: self.cols, d: self.d.iter().map(f).collect() }
    }
    /// Entrywise `p(x) -> p^(q)(x^q)`.
    pub fn frobenius(&self) -> PMat {
        self.map(|p| p.frobenius())
    }
    pub fn scale(&self, p: &Poly) -> PMat {
        self.map(|e| e.mul(p))
    }

    fn minor(&self, skip_r: usize, skip_c: usize) -> PMat {
        let mut rows = Vec::with_capacity(self.rows - 1);
        for i in (0..self.rows).filter(|&i| i != skip_r) {
            rows.push((0..self.cols).filter(|&j| j != skip_c).map(|j| self.get(i, j).clone()).collect());
        }
        PMat::from_rows(&self.ctx, rows)
    }

    /// Fraction-free elimination.
    pub fn det(&self) -> Poly {
        assert_eq!(self.rows, self.cols);
        let n = self.rows;
        if n == 0 {
            return Poly::one(&self.ctx);
        }
        let mut a: Vec<Vec<Poly>> = (0..n).map(|i| (0..n).map(|j| self.get(i, j).clone()).collect()).collect();
        let mut sign = false;
        let mut prev = Poly::one(&self.ctx);
        for k in 0..n - 1 {
            let Some(piv) = (k..n).find(|&i| !a[i][k].is_zero()) else {
                return Poly::zero(&self.ctx);
            };
            if piv != k {
                a.swap(piv, k);
                sign = !sign;
            }
            for i in k + 1..n {
                for j in k + 1..n {
                    let v = a[i][j].mul(&a[k][k]).sub(&a[i][k].mul(&a[k][j]));
                    a[i][j] = v.exact_div(&prev).expect("Bareiss division is exact");
                }
                a[i][k] = Poly::zero(&self.ctx);
            }
            prev = a[k][k].clone();
        }
        let d = a[n - 1][n - 1].clone();
        if sign {
            d.neg()
        } else {
            d
        }
    }

    pub fn adjugate(&self) -> PMat {
        let n = self.rows;
        let mut m = PMat::zeros(&self.ctx, n, n);
        if n == 1 {
            m.set(0, 0, Poly::one(&self.ctx));
            return m;
        }
        for i in 0..n {
            for j in 0..n {
                let c = self.minor(j, i).det();
                m.set(i, j, if (i + j) % 2 == 1 { c.neg() } else { c });
            }
        }
        m
    }
}

/// A basis (as columns of an `n x n` matrix) of the `F[x]`-span of the
/// columns of `gens`, which must have full row rank.
pub fn column_basis(gens: &PMat) -> PMat {
    let n = gens.rows();
    let mut cols: Vec<Vec<Poly>> = gens.columns();
    let mut out: Vec<Vec<Poly>> = Vec::with_capacity(n);
    for i in 0..n {
        loop {
            let nz: Vec<usize> = (0..cols.len()).filter(|&j| !cols[j][i].is_zero()).collect();
            if nz.len() <= 1 {
                break;
            }
            let piv = *nz.iter().min_by_key(|&&j| (cols[j][i].deg(), j)).unwrap();
            let pc = cols[piv].clone();
            for &j in &nz {
                if j == piv {
                    continue;
                }
                let (qt, _) = cols[j][i].divrem(&pc[i]);
                for r in i..n {
                    let t = qt.mul(&pc[r]);
                    cols[j][r] = cols[j][r].sub(&t);
                }
            }
        }
        let j = (0..cols.len()).find(|&j| !cols[j][i].is_zero()).expect("full row rank");
        let c = cols.swap_remove(j);
        out.push(c);
        cols.retain(|c| c.iter().any(|p| !p.is_zero()));
    }
    PMat::from_cols(gens.ctx(), n, &out)
}

fn pivot(m: &PMat, j: usize) -> Option<(usize, usize)> {
    let d = m.col_degree(j)?;
    let i = (0..m.rows()).rev().find(|&i| m.get(i, j).deg() == Some(d)).unwrap();
    Some((i, d))
}

/// Bring the columns of `s` to weak Popov form by unimodular column
/// operations, applying the same operations to `tracked`.
pub fn weak_popov(s: &mut PMat, tracked: &mut PMat) {
    assert_eq!(s.cols(), tracked.cols());
    loop {
        let pivots: Vec<Option<(usize, usize)>> = (0..s.cols()).map(|j| pivot(s, j)).collect();
        let mut clash = None;
        'find: for a in 0..s.cols() {
            for b in a + 1..s.cols() {
                if let (Some((ia, da)), Some((ib, db))) = (pivots[a], pivots[b]) {
                    if ia == ib {
                        clash = Some(if da >= db { (a, b, ia, da - db) } else { (b, a, ia, db - da) });
                        break 'find;
                    }
                }
            }
        }
        let Some((hi, lo, row, shift)) = clash else { return };
        let c = &s.get(row, hi).lc() * &s.get(row, lo).lc().inv().unwrap();
        let f = Poly::monomial(c, shift);
        for m in [&mut *s, &mut *tracked] {
            for r in 0..m.rows() {
                let v = m.get(r, hi).sub(&f.mul(m.get(r, lo)));
                m.set(r, hi, v);
            }
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn p(k: &FieldCtx, c: &[i64]) -> Poly {
        Poly::from_ints(k, c)
    }

    #[test]
    fn det_adj() {
        let k = FieldCtx::new(7, 1, 1).unwrap();
        let m = PMat::from_rows(&k, vec![vec![p(&k, &[0, 1]), p(&k, &[1])], vec![p(&k, &[2]), p(&k, &[1, 1])]]);
        assert_eq!(m.det(), p(&k, &[-2, 1, 1]));
        let prod = m.mul(&m.adjugate());
        assert_eq!(prod, PMat::diagonal(&k, vec![m.det(), m.det()]));
    }

    #[test]
    fn basis_and_popov() {
        let k = FieldCtx::new(5, 1, 1).unwrap();
        // the 2x2 minors are x^2, x^3, (x^2 + 1) x^2, with gcd x^2
        let g = PMat::from_cols(
            &k,
            2,
            &[vec![p(&k, &[0, 1]), p(&k, &[0])], vec![p(&k, &[1, 0, 1]), p(&k, &[0, 1])], vec![p(&k, &[0]), p(&k, &[0, 0, 1])]],
        );
        let b = column_basis(&g);
        assert_eq!(b.det().monic(), p(&k, &[0, 0, 1]));
        let mut s = PMat::from_rows(&k, vec![vec![p(&k, &[0, 0, 1]), p(&k, &[0, 0, 0, 1])], vec![p(&k, &[1]), p(&k, &[1, 1])]]);
        let mut t = PMat::identity(&k, 2);
        let s0 = s.clone();
        weak_popov(&mut s, &mut t);
        assert_eq!(s0.mul(&t), s);
        let (a, b) = (pivot(&s, 0).unwrap(), pivot(&s, 1).unwrap());
        assert_ne!(a.0, b.0);
    }
}
