//! Frobenius-semilinear operators on finite-dimensional spaces over finite
//! fields, and Artin-Schreier type solvers over fields and power series.

use crate::arith::fp::FpMatrix;
use crate::arith::matrix::Mat;
use crate::arith::{Embedding, FieldCtx, FieldElement, LaurentPoly, LaurentScalar};
use crate::error::{Error, Result};

/// Default cap on the extension degree searched by [`splitting_extension`].
pub const EXTENSION_CAP: u32 = 4096;

/// `phi(x) = M x^(q)`; column `j` of `M` is `phi(e_j)`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct SemilinearOp {
    m: Mat,
}

impl SemilinearOp {
    pub fn new(m: Mat) -> Result<Self> {
        if m.rows() != m.cols() {
            return Err(Error::InvalidInput("semilinear operator needs a square matrix".into()));
        }
        Ok(SemilinearOp { m })
    }
    pub fn identity(ctx: &FieldCtx, n: usize) -> Self {
        SemilinearOp { m: Mat::identity(ctx, n) }
    }
    pub fn zero(ctx: &FieldCtx, n: usize) -> Self {
        SemilinearOp { m: Mat::zeros(ctx, n, n) }
    }
    pub fn ctx(&self) -> &FieldCtx {
        self.m.ctx()
    }
    pub fn dim(&self) -> usize {
        self.m.rows()
    }
    pub fn matrix(&self) -> &Mat {
        &self.m
    }

    pub fn apply(&self, x: &[FieldElement]) -> Vec<FieldElement> {
        let xq: Vec<FieldElement> = x.iter().map(|v| v.frobenius()).collect();
        self.m.mul_vec(&xq)
    }

    /// Matrix of `phi^k`: `M M^(q) ... M^(q^(k-1))`.
    pub fn power_matrix(&self, k: usize) -> Mat {
        let mut acc = Mat::identity(self.ctx(), self.dim());
        let mut tw = self.m.clone();
        for _ in 0..k {
            acc = acc.mul(&tw);
            tw = tw.frobenius();
        }
        acc
    }

    /// Base change `G^{-1} M G^(q)`, the matrix in the basis given by the
    /// columns of `g`.
    pub fn conjugate(&self, g: &Mat) -> Result<Self> {
        let gi = g
            .inverse()
            .ok_or_else(|| Error::InvalidInput("change of basis is singular".into()))?;
        Ok(SemilinearOp { m: gi.mul(&self.m).mul(&g.frobenius()) })
    }

    /// The same operator over an extension field.
    pub fn base_change(&self, emb: &Embedding) -> Self {
        SemilinearOp { m: self.m.map(emb.dst(), |v| emb.map(v)) }
    }

    /// F_p-matrix of `x -> x - phi(x)` on `F_p^(n d)` (restriction of scalars).
    fn restricted_one_minus_phi(&self) -> FpMatrix {
        let ctx = self.ctx();
        let d = ctx.degree();
        let n = self.dim();
        let p = ctx.p();
        let mut a = FpMatrix::zeros(p, n * d, n * d);
        for j in 0..n {
            for k in 0..d {
                let mut unit = vec![0u64; d];
                unit[k] = 1;
                let beta = ctx.from_coeffs(&unit);
                let bq = beta.frobenius();
                let col = j * d + k;
                for i in 0..n {
                    let mut v = -&(self.m.get(i, j) * &bq);
                    if i == j {
                        v += &beta;
                    }
                    for (l, &c) in v.coeffs().iter().enumerate() {
                        a.set(i * d + l, col, c);
                    }
                }
            }
        }
        a
    }

    fn unflatten(&self, v: &[u64]) -> Vec<FieldElement> {
        let d = self.ctx().degree();
        v.chunks(d).map(|c| self.ctx().from_coeffs(c)).collect()
    }
}

/// Stable rank of the iterates and its complement.
pub fn ss_nil_dims(op: &SemilinearOp) -> (usize, usize) {
    let n = op.dim();
    let ss = op.power_matrix(n).rank();
    (ss, n - ss)
}

/// Fixed vectors of an operator, as an `F_q`-basis (`q = p^r`).
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct FixedSpace {
    pub ctx: FieldCtx,
    pub basis: Vec<Vec<FieldElement>>,
}

impl FixedSpace {
    /// Dimension over `F_q`.
    pub fn dim(&self) -> usize {
        self.basis.len()
    }
}

/// `{x : phi(x) = x}` over the ground field of `op`.
pub fn fixed_space(op: &SemilinearOp) -> FixedSpace {
    let ker = op.restricted_one_minus_phi().kernel();
    let ctx = op.ctx().clone();
    // F_q-independent fixed vectors are independent over the ground field,
    // so a greedy rank test extracts an F_q-basis.
    let mut basis: Vec<Vec<FieldElement>> = Vec::new();
    for v in ker {
        let x = op.unflatten(&v);
        let mut rows = basis.clone();
        rows.push(x.clone());
        if Mat::from_rows(&ctx, rows).rank() > basis.len() {
            basis.push(x);
        }
        if basis.len() == op.dim() {
            break;
        }
    }
    FixedSpace { ctx, basis }
}

/// Degree, over the ground field `F_{q^d}` of `op`, of the smallest
/// extension over which the fixed space has `F_q`-dimension equal to the
/// semisimple rank. It is the order of `N = M M^(q) ... M^(q^(d-1))` on the
/// stable image of `phi`.
pub fn splitting_degree(op: &SemilinearOp, cap: u32) -> Result<u32> {
    let ctx = op.ctx();
    let n = op.dim();
    let stable = op.power_matrix(n);
    let mut basis: Vec<Vec<FieldElement>> = Vec::new();
    for j in 0..n {
        let mut rows = basis.clone();
        rows.push(stable.col(j));
        if Mat::from_rows(ctx, rows).rank() > basis.len() {
            basis.push(stable.col(j));
        }
    }
    let ss = basis.len();
    if ss == 0 {
        return Ok(1);
    }
    let s = Mat::from_rows(ctx, basis).transpose();
    // ss rows of s on which it is invertible
    let mut pivots: Vec<usize> = Vec::new();
    for i in 0..n {
        let mut rows: Vec<Vec<FieldElement>> = pivots.iter().map(|&k| s.row(k)).collect();
        rows.push(s.row(i));
        if Mat::from_rows(ctx, rows).rank() > pivots.len() {
            pivots.push(i);
        }
    }
    let sp = Mat::from_rows(ctx, pivots.iter().map(|&k| s.row(k)).collect());
    let ns = op.power_matrix(ctx.e() as usize).mul(&s);
    let nsp = Mat::from_rows(ctx, pivots.iter().map(|&k| ns.row(k)).collect());
    let m = sp.inverse().expect("pivot rows are independent").mul(&nsp);
    let one = Mat::identity(ctx, ss);
    let mut cur = m.clone();
    let mut k = 1u32;
    while cur != one {
        if k >= cap {
            return Err(Error::IterationLimit(format!("splitting degree exceeds {cap}")));
        }
        cur = cur.mul(&m);
        k += 1;
    }
    Ok(k)
}

/// The field of [`splitting_degree`] over the ground field of `op`.
pub fn splitting_extension(op: &SemilinearOp) -> Result<FieldCtx> {
    splitting_extension_capped(op, EXTENSION_CAP)
}

pub fn splitting_extension_capped(op: &SemilinearOp, cap: u32) -> Result<FieldCtx> {
    op.ctx().extend(splitting_degree(op, cap)?)
}

/// Solution of `x - phi(x) = v`, possibly over an extension of the ground field.
#[derive(Clone, Debug)]
pub struct FieldSolution {
    pub ctx: FieldCtx,
    /// Degree of `ctx` over the ground field of the operator.
    pub extension: u32,
    pub x: Vec<FieldElement>,
}

/// Solve `x - phi(x) = v` after restriction of scalars; free variables are
/// set to zero. Extends the field when no solution exists.
pub fn artin_schreier_solve_field(op: &SemilinearOp, v: &[FieldElement]) -> Result<FieldSolution> {
    artin_schreier_solve_field_capped(op, v, EXTENSION_CAP)
}

pub fn artin_schreier_solve_field_capped(
    op: &SemilinearOp,
    v: &[FieldElement],
    cap: u32,
) -> Result<FieldSolution> {
    if v.len() != op.dim() {
        return Err(Error::InvalidInput("right-hand side has the wrong length".into()));
    }
    let base = op.ctx();
    // Frobenius acts on the solutions with order dividing p times the
    // splitting degree, so the smallest solving degree divides that product.
    let bound = splitting_degree(op, cap)? as u64 * base.p();
    for e in (1..=bound).filter(|e| bound.is_multiple_of(*e)) {
        if e > cap as u64 {
            break;
        }
        let e = e as u32;
        let (ctx, op_e, v_e) = if e == 1 {
            (base.clone(), op.clone(), v.to_vec())
        } else {
            let ext = base.extend(e)?;
            let emb = Embedding::new(base, &ext)?;
            let ve = v.iter().map(|a| emb.map(a)).collect();
            (ext, op.base_change(&emb), ve)
        };
        let rhs: Vec<u64> = v_e.iter().flat_map(|a| a.coeffs().to_vec()).collect();
        if let Some(sol) = op_e.restricted_one_minus_phi().solve(&rhs) {
            return Ok(FieldSolution { ctx, extension: e, x: op_e.unflatten(&sol) });
        }
    }
    Err(Error::IterationLimit(format!(
        "Artin-Schreier system unsolvable below extension degree {cap}"
    )))
}

/// Solution of a series system, over `ctx` (possibly an extension).
#[derive(Clone, Debug)]
pub struct SeriesSolution {
    pub ctx: FieldCtx,
    pub x: Vec<LaurentScalar>,
}

/// Solve `x - M F(x) = b` over `A = k[[t]]` to absolute precision `prec`,
/// where `F` is the coefficientwise Frobenius with `t -> t^q`.
pub fn solve_series_system(
    m: &[Vec<LaurentScalar>],
    b: &[LaurentScalar],
    prec: i64,
) -> Result<SeriesSolution> {
    let n = b.len();
    if m.len() != n || m.iter().any(|r| r.len() != n) {
        return Err(Error::InvalidInput("series system has inconsistent sizes".into()));
    }
    if prec <= 0 {
        return Err(Error::InvalidInput("precision must be positive".into()));
    }
    let all = m.iter().flatten().chain(b.iter());
    for s in all.clone() {
        if s.valuation_bound() < 0 {
            return Err(Error::InvalidInput("series system entries must lie in A".into()));
        }
        if let Some(np) = s.precision() {
            if np < prec {
                return Err(Error::InsufficientPrecision(format!(
                    "input known below t^{np}, solution requested below t^{prec}"
                )));
            }
        }
    }
    let base = b
        .first()
        .map(|s| s.ctx().clone())
        .ok_or_else(|| Error::InvalidInput("empty system".into()))?;
    // residue layer
    let m0 = Mat::from_rows(
        &base,
        m.iter().map(|r| r.iter().map(|s| s.known().coeff(0)).collect()).collect(),
    );
    let b0: Vec<FieldElement> = b.iter().map(|s| s.known().coeff(0)).collect();
    let res = artin_schreier_solve_field(&SemilinearOp::new(m0)?, &b0)?;
    let emb = Embedding::new(&base, &res.ctx)?;
    let lift = |s: &LaurentScalar| {
        let k = s.known().map_coeffs(&res.ctx, |v| emb.map(v));
        match s.precision() {
            None => LaurentScalar::exact(k),
            Some(n) => LaurentScalar::with_precision(k, n),
        }
    };
    let me: Vec<Vec<LaurentScalar>> = m.iter().map(|r| r.iter().map(lift).collect()).collect();
    let be: Vec<LaurentScalar> = b.iter().map(lift).collect();
    lift_series_solution(&me, &be, &res.x, prec)
}

/// Lift a residue solution `x0` of `x - M F(x) = b` (mod `t`) to a solution
/// over `A` to absolute precision `prec`. The lift is unique.
pub fn lift_series_solution(
    m: &[Vec<LaurentScalar>],
    b: &[LaurentScalar],
    x0: &[FieldElement],
    prec: i64,
) -> Result<SeriesSolution> {
    let n = x0.len();
    if b.len() != n || m.len() != n || m.iter().any(|r| r.len() != n) {
        return Err(Error::InvalidInput("series system has inconsistent sizes".into()));
    }
    let ctx = match x0.first() {
        Some(v) => v.ctx().clone(),
        None => return Ok(SeriesSolution { ctx: b[0].ctx().clone(), x: Vec::new() }),
    };
    for s in m.iter().flatten().chain(b.iter()) {
        if s.valuation_bound() < 0 {
            return Err(Error::InvalidInput("series system entries must lie in A".into()));
        }
        if s.precision().is_some_and(|np| np < prec) {
            return Err(Error::InsufficientPrecision(format!(
                "input known below t^{}, solution requested below t^{prec}",
                s.precision().unwrap()
            )));
        }
    }
    let q = ctx.q() as i64;
    // coefficient layers: x_N = b_N + sum_{l + q k = N} M_l x_k^q
    let mut layers: Vec<Vec<FieldElement>> = vec![x0.to_vec()];
    for nn in 1..prec {
        let mut xn: Vec<FieldElement> = b.iter().map(|s| s.known().coeff(nn)).collect();
        let mut k = 0;
        while q * k <= nn {
            let l = nn - q * k;
            let xk: Vec<FieldElement> = layers[k as usize].iter().map(|v| v.frobenius()).collect();
            for i in 0..n {
                for j in 0..n {
                    let c = m[i][j].known().coeff(l);
                    if !c.is_zero() {
                        xn[i] += &(&c * &xk[j]);
                    }
                }
            }
            k += 1;
        }
        layers.push(xn);
    }
    let x = (0..n)
        .map(|i| {
            let poly = LaurentPoly::from_parts(&ctx, 0, layers.iter().map(|l| l[i].clone()).collect());
            LaurentScalar::with_precision(poly, prec)
        })
        .collect();
    Ok(SeriesSolution { ctx, x })
}

/// Solve `b'_i - sum_j (b'_j)^q a_ji = b_i`, the index convention of the
/// surjectivity statement for root duals.
pub fn artin_schreier_solve_series(
    a: &[Vec<LaurentScalar>],
    b: &[LaurentScalar],
    prec: i64,
) -> Result<SeriesSolution> {
    let n = a.len();
    let at: Vec<Vec<LaurentScalar>> =
        (0..n).map(|i| (0..n).map(|j| a[j][i].clone()).collect()).collect();
    solve_series_system(&at, b, prec)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn k(p: u64, r: u32) -> FieldCtx {
        FieldCtx::new(p, r, 1).unwrap()
    }

    #[test]
    fn basic_dims() {
        let f = k(5, 1);
        assert_eq!(ss_nil_dims(&SemilinearOp::identity(&f, 3)), (3, 0));
        let up = SemilinearOp::new(Mat::from_ints(&f, &[&[0, 1, 2], &[0, 0, 3], &[0, 0, 0]])).unwrap();
        assert_eq!(ss_nil_dims(&up), (0, 3));
        let d = SemilinearOp::new(Mat::from_ints(&f, &[&[1, 0], &[0, 0]])).unwrap();
        assert_eq!(ss_nil_dims(&d), (1, 1));
        assert_eq!(fixed_space(&SemilinearOp::identity(&f, 2)).dim(), 2);
        assert_eq!(fixed_space(&up).dim(), 0);
    }

    #[test]
    fn generator_needs_extension() {
        let f = k(5, 1);
        let g = f.generator().unwrap();
        let op = SemilinearOp::new(Mat::from_rows(&f, vec![vec![g.clone()]])).unwrap();
        assert_eq!(fixed_space(&op).dim(), 0);
        let ext = splitting_extension(&op).unwrap();
        // c^4 = g^{-1} is solvable once g^{-1} is a fourth power
        let mut e = 0;
        for cand in 1..=8u32 {
            let big = f.extend(cand).unwrap();
            let emb = Embedding::new(&f, &big).unwrap();
            let target = emb.map(&g.inv().unwrap());
            if big.elements().any(|c| !c.is_zero() && c.pow(4) == target) {
                e = cand;
                break;
            }
        }
        assert_eq!(ext.e(), e);
    }

    #[test]
    fn splitting_degree_matches_search() {
        use rand::{Rng, SeedableRng};
        let mut rng = rand_chacha::ChaCha8Rng::seed_from_u64(4);
        for (p, r, e) in [(5, 1, 1), (7, 1, 1), (5, 1, 2), (3, 2, 1)] {
            let f = FieldCtx::new(p, r, e).unwrap();
            let size = f.size().unwrap();
            for _ in 0..25 {
                let n = rng.gen_range(1..=2);
                let rows = (0..n).map(|_| (0..n).map(|_| f.from_index(rng.gen_range(0..size))).collect()).collect();
                let op = SemilinearOp::new(Mat::from_rows(&f, rows)).unwrap();
                let (ss, _) = ss_nil_dims(&op);
                let k = splitting_degree(&op, 400).unwrap();
                if k > 12 {
                    continue;
                }
                let found = (1..=k)
                    .find(|&j| {
                        let ext = f.extend(j).unwrap();
                        fixed_space(&op.base_change(&Embedding::new(&f, &ext).unwrap())).dim() == ss
                    })
                    .unwrap();
                assert_eq!(found, k, "{op:?}");
            }
        }
    }

    #[test]
    fn artin_schreier_obstruction() {
        let f = k(5, 1);
        let op = SemilinearOp::identity(&f, 1);
        let sol = artin_schreier_solve_field(&op, &[f.one()]).unwrap();
        assert_eq!(sol.extension, 5);
        let x = &sol.x[0];
        assert_eq!(&(x - &x.frobenius()), &sol.ctx.one());
    }

    #[test]
    fn series_examples() {
        let f = k(5, 1);
        let t = LaurentScalar::exact(LaurentPoly::t_pow(&f, 1));
        let one = LaurentScalar::exact(LaurentPoly::one(&f));
        let sol = artin_schreier_solve_series(&[vec![t.clone()]], std::slice::from_ref(&one), 12).unwrap();
        let x = sol.x[0].known();
        for e in 0..12 {
            assert_eq!(x.coeff(e).is_one(), [0, 1, 6].contains(&e), "t^{e}");
        }
        // residual check to the certified precision
        let fx = crate::arith::series_frobenius(&sol.x[0]);
        let res = sol.x[0].sub(&t.mul(&fx));
        assert_eq!(res.known().truncate(12), LaurentPoly::one(&f));
        let zero = LaurentScalar::exact(LaurentPoly::zero(&f));
        let sol = artin_schreier_solve_series(&[vec![one.clone()]], &[zero], 8).unwrap();
        assert!(sol.x[0].known().is_zero());
    }
}
