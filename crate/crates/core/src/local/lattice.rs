//! Matrices of Laurent polynomials and full-rank `A`-lattices in `K^n`,
//! `A = k[[t]]`, kept in a canonical Hermite normal form.
//!
//! Every lattice carries a floor `a` with `t^a A^n` inside it, so all
//! computations can be done exactly on Laurent polynomials truncated at `a`.

use std::fmt;

use crate::arith::{FieldCtx, FieldElement, LaurentPoly};

/// Dense matrix of exact Laurent polynomials.
#[derive(Clone, PartialEq, Eq, Hash)]
pub struct LMat {
    ctx: FieldCtx,
    rows: usize,
    cols: usize,
    d: Vec<LaurentPoly>,
}

impl fmt::Debug for LMat {
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

impl LMat {
    pub fn zeros(ctx: &FieldCtx, rows: usize, cols: usize) -> Self {
        LMat { ctx: ctx.clone(), rows, cols, d: vec![LaurentPoly::zero(ctx); rows * cols] }
    }
    pub fn identity(ctx: &FieldCtx, n: usize) -> Self {
        let mut m = Self::zeros(ctx, n, n);
        for i in 0..n {
            m.set(i, i, LaurentPoly::one(ctx));
        }
        m
    }
    pub fn diagonal(ctx: &FieldCtx, entries: Vec<LaurentPoly>) -> Self {
        let n = entries.len();
        let mut m = Self::zeros(ctx, n, n);
        for (i, e) in entries.into_iter().enumerate() {
            m.set(i, i, e);
        }
        m
    }
    /// Diagonal matrix `diag(t^e_i)`.
    pub fn t_diagonal(ctx: &FieldCtx, exps: &[i64]) -> Self {
        Self::diagonal(ctx, exps.iter().map(|&e| LaurentPoly::t_pow(ctx, e)).collect())
    }
    pub fn from_rows(ctx: &FieldCtx, rows: Vec<Vec<LaurentPoly>>) -> Self {
        let r = rows.len();
        let c = rows.first().map_or(0, |x| x.len());
        assert!(rows.iter().all(|x| x.len() == c), "ragged matrix");
        LMat { ctx: ctx.clone(), rows: r, cols: c, d: rows.into_iter().flatten().collect() }
    }
    pub fn from_cols(ctx: &FieldCtx, rows: usize, cols: Vec<Vec<LaurentPoly>>) -> Self {
        let mut m = Self::zeros(ctx, rows, cols.len());
        for (j, c) in cols.into_iter().enumerate() {
            assert_eq!(c.len(), rows);
            for (i, v) in c.into_iter().enumerate() {
                m.set(i, j, v);
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
    pub fn get(&self, i: usize, j: usize) -> &LaurentPoly {
        &self.d[i * self.cols + j]
    }
    pub fn set(&mut self, i: usize, j: usize, v: LaurentPoly) {
        self.d[i * self.cols + j] = v;
    }
    pub fn col(&self, j: usize) -> Vec<LaurentPoly> {
        (0..self.rows).map(|i| self.get(i, j).clone()).collect()
    }
    pub fn columns(&self) -> Vec<Vec<LaurentPoly>> {
        (0..self.cols).map(|j| self.col(j)).collect()
    }
    pub fn entries(&self) -> &[LaurentPoly] {
        &self.d
    }
    /// Rows `r0..r1`, columns `c0..c1`.
    pub fn block(&self, r0: usize, r1: usize, c0: usize, c1: usize) -> LMat {
        let mut m = Self::zeros(&self.ctx, r1 - r0, c1 - c0);
        for i in r0..r1 {
            for j in c0..c1 {
                m.set(i - r0, j - c0, self.get(i, j).clone());
            }
        }
        m
    }

    /// Smallest valuation among nonzero entries.
    pub fn min_valuation(&self) -> Option<i64> {
        self.d.iter().filter_map(|v| v.valuation()).min()
    }
    pub fn is_zero(&self) -> bool {
        self.d.iter().all(|v| v.is_zero())
    }

    pub fn mul(&self, o: &LMat) -> LMat {
        assert_eq!(self.cols, o.rows);
        let mut m = Self::zeros(&self.ctx, self.rows, o.cols);
        for i in 0..self.rows {
            for j in 0..o.cols {
                let mut acc = LaurentPoly::zero(&self.ctx);
                for k in 0..self.cols {
                    let a = self.get(i, k);
                    let b = o.get(k, j);
                    if !a.is_zero() && !b.is_zero() {
                        acc = acc.add(&a.mul(b));
                    }
                }
                m.set(i, j, acc);
            }
        }
        m
    }
    /// Product with every entry truncated below `bound`.
    pub fn mul_trunc(&self, o: &LMat, bound: i64) -> LMat {
        assert_eq!(self.cols, o.rows);
        let mut m = Self::zeros(&self.ctx, self.rows, o.cols);
        for i in 0..self.rows {
            for j in 0..o.cols {
                let mut acc = LaurentPoly::zero(&self.ctx);
                for k in 0..self.cols {
                    acc = acc.add(&self.get(i, k).mul_trunc(o.get(k, j), bound));
                }
                m.set(i, j, acc);
            }
        }
        m
    }
    pub fn transpose(&self) -> LMat {
        let mut m = Self::zeros(&self.ctx, self.cols, self.rows);
        for i in 0..self.rows {
            for j in 0..self.cols {
                m.set(j, i, self.get(i, j).clone());
            }
        }
        m
    }
    pub fn map(&self, f: impl Fn(&LaurentPoly) -> LaurentPoly) -> LMat {
        LMat { ctx: self.ctx.clone(), rows: self.rows, cols: self.cols, d: self.d.iter().map(f).collect() }
    }
    pub fn map_ctx(&self, ctx: &FieldCtx, f: impl Fn(&LaurentPoly) -> LaurentPoly) -> LMat {
        LMat { ctx: ctx.clone(), rows: self.rows, cols: self.cols, d: self.d.iter().map(f).collect() }
    }
    /// Entrywise Frobenius.
    pub fn frobenius(&self) -> LMat {
        self.map(|v| v.frobenius())
    }
    pub fn shift(&self, k: i64) -> LMat {
        self.map(|v| v.shift(k))
    }
    pub fn truncate(&self, bound: i64) -> LMat {
        self.map(|v| v.truncate(bound))
    }

    /// Determinant, by fraction-free elimination on the polynomial part.
    pub fn det(&self) -> LaurentPoly {
        assert_eq!(self.rows, self.cols);
        let n = self.rows;
        if n == 0 {
            return LaurentPoly::one(&self.ctx);
        }
        // clear denominators row by row so the entries are polynomials in t
        let mut shift = 0i64;
        let mut a: Vec<Vec<LaurentPoly>> = (0..n)
            .map(|i| {
                let s = (0..n).filter_map(|j| self.get(i, j).valuation()).min().unwrap_or(0);
                shift += s;
                (0..n).map(|j| self.get(i, j).shift(-s)).collect()
            })
            .collect();
        let mut sign = false;
        let mut prev = LaurentPoly::one(&self.ctx);
        for k in 0..n - 1 {
            if a[k][k].is_zero() {
                let Some(r) = (k + 1..n).find(|&r| !a[r][k].is_zero()) else {
                    return LaurentPoly::zero(&self.ctx);
                };
                a.swap(k, r);
                sign = !sign;
            }
            for i in k + 1..n {
                for j in k + 1..n {
                    let num = a[i][j].mul(&a[k][k]).sub(&a[i][k].mul(&a[k][j]));
                    a[i][j] = num.exact_div(&prev).expect("Bareiss division is exact");
                }
                a[i][k] = LaurentPoly::zero(&self.ctx);
            }
            prev = a[k][k].clone();
        }
        let d = a[n - 1][n - 1].shift(shift);
        if sign {
            d.neg()
        } else {
            d
        }
    }

    /// Adjugate matrix, `adj(M) M = det(M) I`.
    pub fn adjugate(&self) -> LMat {
        assert_eq!(self.rows, self.cols);
        let n = self.rows;
        let mut m = Self::zeros(&self.ctx, n, n);
        if n == 1 {
            m.set(0, 0, LaurentPoly::one(&self.ctx));
            return m;
        }
        for i in 0..n {
            for j in 0..n {
                let minor = LMat::from_rows(
                    &self.ctx,
                    (0..n)
                        .filter(|&r| r != j)
                        .map(|r| (0..n).filter(|&c| c != i).map(|c| self.get(r, c).clone()).collect())
                        .collect(),
                );
                let d = minor.det();
                m.set(i, j, if (i + j) % 2 == 1 { d.neg() } else { d });
            }
        }
        m
    }
}

/// A full-rank lattice in `K^n` in Hermite normal form: the basis is lower
/// triangular with `t^k_i` on the diagonal and every entry below the diagonal
/// in row `i` a Laurent polynomial with exponents `< k_i`.
#[derive(Clone, PartialEq, Eq, Hash)]
pub struct Lattice {
    ctx: FieldCtx,
    k: Vec<i64>,
    g: LMat,
    floor: i64,
}

impl fmt::Debug for Lattice {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "Lattice{:?}", self.g)
    }
}

impl fmt::Display for Lattice {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "span{:?}", self.g)
    }
}

impl Lattice {
    pub fn standard(ctx: &FieldCtx, n: usize) -> Self {
        Self::diagonal(ctx, &vec![0; n])
    }
    /// `t^e_1 A + ... + t^e_n A`.
    pub fn diagonal(ctx: &FieldCtx, exps: &[i64]) -> Self {
        let floor = exps.iter().copied().max().unwrap_or(0);
        Lattice { ctx: ctx.clone(), k: exps.to_vec(), g: LMat::t_diagonal(ctx, exps), floor }
    }

    /// The `A`-span of the given columns together with `t^floor A^n`. The
    /// caller guarantees that the span has full rank once `t^floor A^n` is
    /// added, which is automatic.
    pub fn from_generators(ctx: &FieldCtx, n: usize, cols: &[Vec<LaurentPoly>], floor: i64) -> Self {
        let mut work: Vec<Vec<LaurentPoly>> = cols
            .iter()
            .map(|c| c.iter().map(|v| v.truncate(floor)).collect::<Vec<_>>())
            .filter(|c: &Vec<LaurentPoly>| c.iter().any(|v| !v.is_zero()))
            .collect();
        for i in 0..n {
            let mut c = vec![LaurentPoly::zero(ctx); n];
            c[i] = LaurentPoly::t_pow(ctx, floor);
            work.push(c);
        }
        let mut basis: Vec<Vec<LaurentPoly>> = Vec::with_capacity(n);
        let mut k = Vec::with_capacity(n);
        for i in 0..n {
            let (pj, kv) = work
                .iter()
                .enumerate()
                .filter_map(|(j, c)| c[i].valuation().map(|v| (j, v)))
                .min_by_key(|&(j, v)| (v, j))
                .expect("t^floor e_i is always available");
            let mut piv = work.swap_remove(pj);
            // make the pivot exactly t^kv
            let unit = piv[i].shift(-kv);
            if unit != LaurentPoly::one(ctx) {
                let low = piv.iter().filter_map(|v| v.valuation()).min().unwrap();
                let uinv = unit.inverse_trunc(floor - low);
                for v in piv.iter_mut() {
                    *v = v.mul_trunc(&uinv, floor);
                }
            }
            piv[i] = LaurentPoly::t_pow(ctx, kv);
            for c in work.iter_mut() {
                if c[i].is_zero() {
                    continue;
                }
                let f = c[i].shift(-kv);
                for r in i..n {
                    if !piv[r].is_zero() {
                        let t = f.mul_trunc(&piv[r], floor);
                        c[r] = c[r].sub(&t);
                    }
                }
                c[i] = LaurentPoly::zero(ctx);
            }
            work.retain(|c| c.iter().any(|v| !v.is_zero()));
            basis.push(piv);
            k.push(kv);
        }
        // reduce below the diagonal
        for j in 0..n {
            for i in j + 1..n {
                let e = &basis[j][i];
                let high = match e.top() {
                    Some(top) if top >= k[i] => e.window(k[i], top + 1),
                    _ => continue,
                };
                let f = high.shift(-k[i]);
                let (left, right) = basis.split_at_mut(i);
                for r in i..n {
                    let t = f.mul_trunc(&right[0][r], floor);
                    left[j][r] = left[j][r].sub(&t);
                }
            }
        }
        let g = LMat::from_cols(ctx, n, basis);
        let mut lat = Lattice { ctx: ctx.clone(), k, g, floor };
        lat.tighten_floor();
        lat
    }

    /// Build directly from HNF data, which must already be canonical.
    pub fn from_hnf_unchecked(ctx: &FieldCtx, k: Vec<i64>, g: LMat, floor: i64) -> Self {
        Lattice { ctx: ctx.clone(), k, g, floor }
    }

    fn tighten_floor(&mut self) {
        let lo = self.k.iter().copied().max().unwrap_or(0);
        let n = self.k.len();
        for a in lo..self.floor {
            let ok = (0..n).all(|i| {
                let mut v = vec![LaurentPoly::zero(&self.ctx); n];
                v[i] = LaurentPoly::t_pow(&self.ctx, a);
                self.contains_vec(&v)
            });
            if ok {
                self.floor = a;
                return;
            }
        }
    }

    pub fn ctx(&self) -> &FieldCtx {
        &self.ctx
    }
    pub fn rank(&self) -> usize {
        self.k.len()
    }
    /// Diagonal exponents of the Hermite form.
    pub fn exponents(&self) -> &[i64] {
        &self.k
    }
    pub fn basis(&self) -> &LMat {
        &self.g
    }
    /// Smallest `a` with `t^a A^n` inside the lattice.
    pub fn floor(&self) -> i64 {
        self.floor
    }
    /// Valuation of the determinant of a basis.
    pub fn det_valuation(&self) -> i64 {
        self.k.iter().sum()
    }
    /// Largest `b` with the lattice inside `t^b A^n`.
    pub fn ceiling(&self) -> i64 {
        self.g.min_valuation().unwrap_or(0)
    }

    /// Membership of an exact vector.
    pub fn contains_vec(&self, x: &[LaurentPoly]) -> bool {
        let n = self.rank();
        let mut x: Vec<LaurentPoly> = x.iter().map(|v| v.truncate(self.floor)).collect();
        for i in 0..n {
            if x[i].is_zero() {
                continue;
            }
            if x[i].valuation().unwrap() < self.k[i] {
                return false;
            }
            let f = x[i].shift(-self.k[i]);
            for r in i..n {
                let t = f.mul_trunc(self.g.get(r, i), self.floor);
                x[r] = x[r].sub(&t);
            }
        }
        true
    }
    /// `other` is a sublattice of `self`.
    pub fn contains(&self, other: &Lattice) -> bool {
        if other.det_valuation() < self.det_valuation() {
            return false;
        }
        (0..other.rank()).all(|j| self.contains_vec(&other.g.col(j)))
    }
    /// `dim_k(self / sub)` for a sublattice `sub`.
    pub fn colength_of(&self, sub: &Lattice) -> i64 {
        sub.det_valuation() - self.det_valuation()
    }
    pub fn sum(&self, o: &Lattice) -> Lattice {
        let mut cols = self.g.columns();
        cols.extend(o.g.columns());
        Lattice::from_generators(&self.ctx, self.rank(), &cols, self.floor.min(o.floor))
    }
    /// `t^k L`.
    pub fn shift(&self, k: i64) -> Lattice {
        Lattice {
            ctx: self.ctx.clone(),
            k: self.k.iter().map(|v| v + k).collect(),
            g: self.g.shift(k),
            floor: self.floor + k,
        }
    }
    /// Image under an invertible matrix `m` when a floor for the image is known.
    pub fn image(&self, m: &LMat, floor: i64) -> Lattice {
        let prod = m.mul_trunc(&self.g, floor);
        Lattice::from_generators(&self.ctx, self.rank(), &prod.columns(), floor)
    }

    /// Residues of basis columns `g_i` modulo `t L`; sublattices of colength
    /// one are `t L + span{sum c_i g_i : lambda(c) = 0}`.
    pub fn hyperplane_sublattice(&self, lambda: &[FieldElement]) -> Lattice {
        let n = self.rank();
        let mut cols: Vec<Vec<LaurentPoly>> = self.g.shift(1).columns();
        let piv = lambda.iter().position(|c| !c.is_zero()).expect("nonzero functional");
        let inv = lambda[piv].inv().unwrap();
        for j in 0..n {
            if j == piv {
                continue;
            }
            // g_j - (lambda_j / lambda_piv) g_piv lies in the kernel
            let f = &lambda[j] * &inv;
            let col: Vec<LaurentPoly> = (0..n)
                .map(|r| self.g.get(r, j).sub(&self.g.get(r, piv).scale(&f)))
                .collect();
            cols.push(col);
        }
        Lattice::from_generators(&self.ctx, n, &cols, self.floor + 1)
    }
}

/// Elementary-divisor exponents of a square matrix over `A` localized at `t`,
/// computed modulo `t^bound` (valid when `bound` exceeds the valuation of the
/// determinant). Returned sorted ascending.
pub fn smith_exponents(m: &LMat, bound: i64) -> Vec<i64> {
    let n = m.rows();
    let mut a: Vec<Vec<LaurentPoly>> =
        (0..n).map(|i| (0..m.cols()).map(|j| m.get(i, j).truncate(bound)).collect()).collect();
    let mut out = Vec::new();
    let mut rows: Vec<usize> = (0..n).collect();
    let mut cols: Vec<usize> = (0..m.cols()).collect();
    while !rows.is_empty() && !cols.is_empty() {
        let best = rows
            .iter()
            .flat_map(|&i| cols.iter().map(move |&j| (i, j)))
            .filter_map(|(i, j)| a[i][j].valuation().map(|v| (v, i, j)))
            .min();
        let Some((v, pi, pj)) = best else { break };
        let unit = a[pi][pj].shift(-v);
        let lowest = a.iter().flatten().filter_map(|x| x.valuation()).min().unwrap_or(0);
        let uinv = unit.inverse_trunc(bound - lowest + 1);
        for &i in &rows {
            if i == pi || a[i][pj].is_zero() {
                continue;
            }
            let f = a[i][pj].shift(-v).mul_trunc(&uinv, bound - v);
            for &j in &cols {
                let t = f.mul_trunc(&a[pi][j], bound);
                a[i][j] = a[i][j].sub(&t);
            }
        }
        out.push(v);
        rows.retain(|&i| i != pi);
        cols.retain(|&j| j != pj);
    }
    out.sort();
    out
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::arith::parse::parse_laurent;

    fn k5() -> FieldCtx {
        FieldCtx::new(5, 1, 1).unwrap()
    }

    fn lp(s: &str, k: &FieldCtx) -> LaurentPoly {
        parse_laurent(s, k).unwrap()
    }

    #[test]
    fn det_and_adjugate() {
        let k = k5();
        let m = LMat::from_rows(
            &k,
            vec![vec![lp("t^-1 + 1", &k), lp("t^2", &k)], vec![lp("3", &k), lp("t + t^3", &k)]],
        );
        let d = m.det();
        let want = lp("t^-1 + 1", &k).mul(&lp("t + t^3", &k)).sub(&lp("3*t^2", &k));
        assert_eq!(d, want);
        let adj = m.adjugate();
        let prod = adj.mul(&m);
        assert_eq!(prod, LMat::diagonal(&k, vec![d.clone(), d]));
    }

    #[test]
    fn hnf_is_canonical() {
        let k = k5();
        let c1 = vec![lp("t^-1 + 2", &k), lp("t^-2 + t", &k)];
        let c2 = vec![lp("t", &k), lp("1 + t^3", &k)];
        let l1 = Lattice::from_generators(&k, 2, &[c1.clone(), c2.clone()], 6);
        // a different generating set of the same lattice
        let c3: Vec<LaurentPoly> = c1.iter().zip(&c2).map(|(a, b)| a.add(&b.scale(&k.from_int(3)))).collect();
        let l2 = Lattice::from_generators(&k, 2, &[c3, c2.clone(), c1.clone()], 8);
        assert_eq!(l1, l2);
        assert!(l1.contains_vec(&c1));
        assert!(!l1.contains_vec(&[lp("t^-3", &k), LaurentPoly::zero(&k)]));
        assert_eq!(l1.det_valuation(), m_det_val(&[c1, c2]));
    }

    fn m_det_val(cols: &[Vec<LaurentPoly>]) -> i64 {
        let k = cols[0][0].ctx().clone();
        LMat::from_cols(&k, 2, cols.to_vec()).det().valuation().unwrap()
    }

    #[test]
    fn containment_and_colength() {
        let k = k5();
        let a = Lattice::diagonal(&k, &[-1, 0]);
        let b = Lattice::diagonal(&k, &[0, 2]);
        assert!(a.contains(&b));
        assert!(!b.contains(&a));
        assert_eq!(a.colength_of(&b), 3);
        let lam = vec![k.one(), k.from_int(2)];
        let h = a.hyperplane_sublattice(&lam);
        assert!(a.contains(&h) && h.contains(&a.shift(1)));
        assert_eq!(a.colength_of(&h), 1);
    }

    #[test]
    fn smith_of_diagonal_conjugate() {
        let k = k5();
        let m = LMat::from_rows(
            &k,
            vec![vec![lp("t", &k), lp("1", &k)], vec![lp("0", &k), lp("t", &k)]],
        );
        assert_eq!(smith_exponents(&m, 5), vec![0, 2]);
    }
}
