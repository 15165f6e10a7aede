//! Presentations `W = K^m + A^s` of local unit modules.

use serde::Serialize;

use super::lattice::{smith_exponents, LMat};
use crate::arith::{FieldCtx, LaurentPoly, LaurentScalar};
use crate::error::{Error, Result};

/// `W = K^m + A^s` with `F(e_j) = sum_i B_ij e_i`; the first `m` coordinates
/// are the `K`-part.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct LocalUnitModule {
    ctx: FieldCtx,
    m: usize,
    s: usize,
    b: Vec<Vec<LaurentScalar>>,
}

/// Outcome of [`check_unit`] when the module passes.
#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct UnitDiagnostics {
    pub m: usize,
    pub s: usize,
    pub det_valuation: i64,
    /// Elementary divisor exponents of the `A`-part block (all zero).
    pub a_part_divisors: Vec<i64>,
}

impl LocalUnitModule {
    pub fn new(ctx: &FieldCtx, m: usize, s: usize, b: Vec<Vec<LaurentScalar>>) -> Result<Self> {
        let n = m + s;
        if n == 0 {
            return Err(Error::InvalidInput("module of rank zero".into()));
        }
        if b.len() != n || b.iter().any(|r| r.len() != n) {
            return Err(Error::InvalidInput(format!("structure matrix must be {n}x{n}")));
        }
        if b.iter().flatten().any(|v| v.ctx() != ctx) {
            return Err(Error::InvalidInput("structure matrix over a different field".into()));
        }
        Ok(LocalUnitModule { ctx: ctx.clone(), m, s, b })
    }

    /// Module from an exact Laurent-polynomial matrix.
    pub fn from_exact(ctx: &FieldCtx, m: usize, s: usize, b: &LMat) -> Result<Self> {
        let rows = (0..b.rows())
            .map(|i| (0..b.cols()).map(|j| LaurentScalar::exact(b.get(i, j).clone())).collect())
            .collect();
        Self::new(ctx, m, s, rows)
    }

    /// `K e` with `F(e) = t^d e`.
    pub fn twist(ctx: &FieldCtx, d: i64) -> Self {
        Self::from_exact(ctx, 1, 0, &LMat::t_diagonal(ctx, &[d])).unwrap()
    }
    /// `A^n` with the identity structure matrix.
    pub fn free(ctx: &FieldCtx, n: usize) -> Self {
        Self::from_exact(ctx, 0, n, &LMat::identity(ctx, n)).unwrap()
    }

    pub fn ctx(&self) -> &FieldCtx {
        &self.ctx
    }
    pub fn m(&self) -> usize {
        self.m
    }
    pub fn s(&self) -> usize {
        self.s
    }
    pub fn n(&self) -> usize {
        self.m + self.s
    }
    pub fn q(&self) -> u64 {
        self.ctx.q()
    }
    pub fn structure(&self) -> &[Vec<LaurentScalar>] {
        &self.b
    }

    /// The structure matrix as exact Laurent polynomials.
    pub fn exact_b(&self) -> Result<LMat> {
        let rows = self
            .b
            .iter()
            .map(|r| r.iter().map(|v| v.require_exact().cloned()).collect::<Result<Vec<_>>>())
            .collect::<Result<Vec<_>>>()?;
        Ok(LMat::from_rows(&self.ctx, rows))
    }

    /// Direct sum, with the `K`-parts collected first.
    pub fn direct_sum(&self, o: &LocalUnitModule) -> Result<LocalUnitModule> {
        if self.ctx != o.ctx {
            return Err(Error::InvalidInput("direct sum over different fields".into()));
        }
        let order = self.block_order(o);
        let n = self.n() + o.n();
        let zero = LaurentScalar::exact(LaurentPoly::zero(&self.ctx));
        let mut b = vec![vec![zero; n]; n];
        for (ni, &(src_i, oi)) in order.iter().enumerate() {
            for (nj, &(src_j, oj)) in order.iter().enumerate() {
                if src_i == src_j {
                    let m = if src_i == 0 { &self.b } else { &o.b };
                    b[ni][nj] = m[oi][oj].clone();
                }
            }
        }
        LocalUnitModule::new(&self.ctx, self.m + o.m, self.s + o.s, b)
    }

    /// Coordinate order of a direct sum: `(summand, index)` pairs.
    pub fn block_order(&self, o: &LocalUnitModule) -> Vec<(usize, usize)> {
        let mut v: Vec<(usize, usize)> = (0..self.m).map(|i| (0, i)).collect();
        v.extend((0..o.m).map(|i| (1, i)));
        v.extend((self.m..self.n()).map(|i| (0, i)));
        v.extend((o.m..o.n()).map(|i| (1, i)));
        v
    }
}

/// Verify the presentation: `B` invertible over `K`, the `A`-part preserved,
/// and the induced map on `W / W^vec = A^s` an isomorphism.
pub fn check_unit(w: &LocalUnitModule) -> Result<UnitDiagnostics> {
    let (m, n) = (w.m, w.n());
    for i in m..n {
        for j in 0..n {
            let v = &w.b[i][j];
            if j < m && !(v.known().is_zero() && v.precision().is_none()) {
                if v.known().is_zero() {
                    return Err(Error::InsufficientPrecision(format!(
                        "entry ({i},{j}) must be exactly zero"
                    )));
                }
                return Err(Error::NotClosed(format!(
                    "F maps the K-part into the A-part (entry ({i},{j}) = {v})"
                )));
            }
            if j >= m && v.valuation_bound() < 0 {
                return Err(Error::NotClosed(format!(
                    "entry ({i},{j}) = {v} has a pole, so F(A-part) leaves W"
                )));
            }
        }
    }
    let b = w.exact_b()?;
    let det = b.det();
    let Some(dv) = det.valuation() else {
        return Err(Error::NotUnit(vec![]));
    };
    let aa = b.block(m, n, m, n);
    let div = if w.s == 0 {
        Vec::new()
    } else {
        let adv = aa.det().valuation().ok_or_else(|| {
            Error::NotUnit(vec![i64::MAX])
        })?;
        smith_exponents(&aa, adv + 1)
    };
    if div.iter().any(|&e| e != 0) {
        return Err(Error::NotUnit(div));
    }
    Ok(UnitDiagnostics { m, s: w.s, det_valuation: dv, a_part_divisors: div })
}

/// Pullback along `t -> s^e`, expressed in the new uniformizer `s`.
pub fn tame_base_change(w: &LocalUnitModule, e: u64) -> Result<LocalUnitModule> {
    if e == 0 {
        return Err(Error::InvalidInput("ramification index must be positive".into()));
    }
    if e.is_multiple_of(w.ctx.p()) {
        return Err(Error::WildRamification(e));
    }
    let b = w
        .b
        .iter()
        .map(|r| {
            r.iter()
                .map(|v| {
                    let inflated = v.known().inflate(e);
                    match v.precision() {
                        None => LaurentScalar::exact(inflated),
                        Some(n) => LaurentScalar::with_precision(inflated, n * e as i64),
                    }
                })
                .collect()
        })
        .collect();
    LocalUnitModule::new(&w.ctx, w.m, w.s, b)
}
