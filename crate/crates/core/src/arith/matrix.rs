//! Dense matrices over a finite field.

use std::fmt;

use super::field::{FieldCtx, FieldElement};

#[derive(Clone, PartialEq, Eq)]
pub struct Mat {
    ctx: FieldCtx,
    rows: usize,
    cols: usize,
    d: Vec<FieldElement>,
}

impl fmt::Debug for Mat {
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

impl Mat {
    pub fn zeros(ctx: &FieldCtx, rows: usize, cols: usize) -> Self {
        Mat { ctx: ctx.clone(), rows, cols, d: vec![ctx.zero(); rows * cols] }
    }
    pub fn identity(ctx: &FieldCtx, n: usize) -> Self {
        let mut m = Self::zeros(ctx, n, n);
        for i in 0..n {
            m.set(i, i, ctx.one());
        }
        m
    }
    pub fn from_rows(ctx: &FieldCtx, rows: Vec<Vec<FieldElement>>) -> Self {
        let r = rows.len();
        let c = rows.first().map_or(0, |x| x.len());
        assert!(rows.iter().all(|x| x.len() == c), "ragged matrix");
        Mat { ctx: ctx.clone(), rows: r, cols: c, d: rows.into_iter().flatten().collect() }
    }
    pub fn from_ints(ctx: &FieldCtx, rows: &[&[i64]]) -> Self {
        Self::from_rows(
            ctx,
            rows.iter().map(|r| r.iter().map(|&v| ctx.from_int(v)).collect()).collect(),
        )
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
    pub fn get(&self, i: usize, j: usize) -> &FieldElement {
        &self.d[i * self.cols + j]
    }
    pub fn set(&mut self, i: usize, j: usize, v: FieldElement) {
        self.d[i * self.cols + j] = v;
    }
    pub fn row(&self, i: usize) -> Vec<FieldElement> {
        self.d[i * self.cols..(i + 1) * self.cols].to_vec()
    }
    pub fn col(&self, j: usize) -> Vec<FieldElement> {
        (0..self.rows).map(|i| self.get(i, j).clone()).collect()
    }
    pub fn to_rows(&self) -> Vec<Vec<FieldElement>> {
        (0..self.rows).map(|i| self.row(i)).collect()
    }

    pub fn mul(&self, o: &Mat) -> Mat {
        assert_eq!(self.cols, o.rows);
        let mut m = Mat::zeros(&self.ctx, self.rows, o.cols);
        for i in 0..self.rows {
            for k in 0..self.cols {
                let a = self.get(i, k);
                if a.is_zero() {
                    continue;
                }
                for j in 0..o.cols {
                    let b = o.get(k, j);
                    if !b.is_zero() {
                        m.d[i * o.cols + j] += &(a * b);
                    }
                }
            }
        }
        m
    }
    pub fn mul_vec(&self, v: &[FieldElement]) -> Vec<FieldElement> {
        (0..self.rows)
            .map(|i| {
                (0..self.cols).fold(self.ctx.zero(), |acc, j| &acc + &(self.get(i, j) * &v[j]))
            })
            .collect()
    }
    pub fn transpose(&self) -> Mat {
        let mut m = Mat::zeros(&self.ctx, self.cols, self.rows);
        for i in 0..self.rows {
            for j in 0..self.cols {
                m.set(j, i, self.get(i, j).clone());
            }
        }
        m
    }
    /// Entrywise `a -> a^q`.
    pub fn frobenius(&self) -> Mat {
        Mat {
            ctx: self.ctx.clone(),
            rows: self.rows,
            cols: self.cols,
            d: self.d.iter().map(|v| v.frobenius()).collect(),
        }
    }
    pub fn map(&self, ctx: &FieldCtx, f: impl Fn(&FieldElement) -> FieldElement) -> Mat {
        Mat { ctx: ctx.clone(), rows: self.rows, cols: self.cols, d: self.d.iter().map(f).collect() }
    }
    pub fn is_zero(&self) -> bool {
        self.d.iter().all(|v| v.is_zero())
    }

    /// Reduced row echelon form in place; returns pivot columns.
    pub fn rref(&mut self) -> Vec<usize> {
        let mut pivots = Vec::new();
        let mut row = 0;
        for col in 0..self.cols {
            if row == self.rows {
                break;
            }
            let Some(piv) = (row..self.rows).find(|&i| !self.get(i, col).is_zero()) else {
                continue;
            };
            if piv != row {
                for j in 0..self.cols {
                    self.d.swap(piv * self.cols + j, row * self.cols + j);
                }
            }
            let li = self.get(row, col).inv().unwrap();
            for j in col..self.cols {
                let v = self.get(row, j) * &li;
                self.set(row, j, v);
            }
            for i in 0..self.rows {
                if i == row || self.get(i, col).is_zero() {
                    continue;
                }
                let f = self.get(i, col).clone();
                for j in col..self.cols {
                    let t = &f * self.get(row, j);
                    self.d[i * self.cols + j] -= &t;
                }
            }
            pivots.push(col);
            row += 1;
        }
        pivots
    }
    pub fn rank(&self) -> usize {
        self.clone().rref().len()
    }
    /// Right kernel basis, canonical (one vector per free column).
    pub fn kernel(&self) -> Vec<Vec<FieldElement>> {
        let mut m = self.clone();
        let pivots = m.rref();
        let free: Vec<usize> = (0..self.cols).filter(|c| !pivots.contains(c)).collect();
        free.iter()
            .map(|&f| {
                let mut v = vec![self.ctx.zero(); self.cols];
                v[f] = self.ctx.one();
                for (r, &pc) in pivots.iter().enumerate() {
                    v[pc] = -m.get(r, f);
                }
                v
            })
            .collect()
    }
    pub fn inverse(&self) -> Option<Mat> {
        assert_eq!(self.rows, self.cols);
        let n = self.rows;
        let mut aug = Mat::zeros(&self.ctx, n, 2 * n);
        for i in 0..n {
            for j in 0..n {
                aug.set(i, j, self.get(i, j).clone());
            }
            aug.set(i, n + i, self.ctx.one());
        }
        let piv = aug.rref();
        if piv.len() < n || piv[n - 1] != n - 1 {
            return None;
        }
        let mut inv = Mat::zeros(&self.ctx, n, n);
        for i in 0..n {
            for j in 0..n {
                inv.set(i, j, aug.get(i, n + j).clone());
            }
        }
        Some(inv)
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn inverse_and_kernel() {
        let k = FieldCtx::new(7, 1, 1).unwrap();
        let a = Mat::from_ints(&k, &[&[1, 2], &[3, 4]]);
        let ai = a.inverse().unwrap();
        assert_eq!(a.mul(&ai), Mat::identity(&k, 2));
        let s = Mat::from_ints(&k, &[&[1, 2, 3], &[2, 4, 6]]);
        let ker = s.kernel();
        assert_eq!(ker.len(), 2);
        for v in ker {
            assert!(s.mul_vec(&v).iter().all(|x| x.is_zero()));
        }
        assert!(Mat::from_ints(&k, &[&[1, 2], &[2, 4]]).inverse().is_none());
    }
}
