//! The global pipeline on P^1: minimal root bundle, splitting type, Cech
//! cohomology of the root dual with its Frobenius action, and the Euler
//! characteristic bound.

pub mod polymat;

use num_rational::Ratio;
use serde::{Deserialize, Serialize};

use crate::arith::{FieldElement, LaurentPoly, Mat, Poly};
use crate::catalog::{GlobalUnitModule, Place};
use crate::error::{Error, Result};
use crate::local::{Frame, IndexValue, LMat, Lattice};
use crate::semilin::{ss_nil_dims, SemilinearOp};
use polymat::{column_basis, weak_popov, PMat};

/// A root of the global module: one lattice per bad place, the standard
/// lattice elsewhere.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct RootBundle {
    pub lattices: Vec<(Place, Lattice)>,
    pub indices: Vec<(Place, IndexValue)>,
    pub degree: i64,
}

impl RootBundle {
    /// Bundle from given local lattices (in local coordinates, one per bad
    /// place of `gm`, in the same order), each of which must be a root.
    pub fn from_lattices(gm: &GlobalUnitModule, lattices: Vec<Lattice>) -> Result<RootBundle> {
        if lattices.len() != gm.places().len() {
            return Err(Error::InvalidInput("one lattice per bad place required".into()));
        }
        let mut indices = Vec::new();
        let mut degree = 0;
        let mut sum = Ratio::from_integer(0);
        for (d, l) in gm.places().iter().zip(&lattices) {
            let frame = Frame::new(&d.module)?;
            let idx = frame.index_of(l);
            sum += idx.ratio();
            indices.push((d.place.clone(), idx));
            let vt = d.frame.det().valuation().expect("invertible frame");
            degree -= vt + l.det_valuation();
        }
        if sum != Ratio::from_integer(degree) {
            return Err(Error::NonIntegralDegree { degree, sum: sum.to_string() });
        }
        let lattices = gm.places().iter().map(|d| d.place.clone()).zip(lattices).collect();
        Ok(RootBundle { lattices, indices, degree })
    }

    pub fn index_sum(&self) -> Ratio<i64> {
        self.indices.iter().map(|(_, v)| v.ratio()).sum()
    }
}

/// Minimal roots at all bad places.
pub fn global_minimal_root(gm: &GlobalUnitModule) -> Result<RootBundle> {
    let lattices = gm
        .places()
        .iter()
        .map(|d| Frame::new(&d.module)?.minimal_root())
        .collect::<Result<Vec<_>>>()?;
    RootBundle::from_lattices(gm, lattices)
}

pub fn root_degree(rb: &RootBundle) -> i64 {
    rb.degree
}

/// The root dual `E = N_0^v` as `E(A^1) = (1/D) M F[x]^n` with column
/// degrees `d_k`, so that `E = sum O(d_k)` with frame `c_k = M_k / D`.
#[derive(Clone, Debug)]
pub struct DualBundle {
    pub m: PMat,
    pub denom: Poly,
    pub degrees: Vec<i64>,
}

fn root_basis(gm: &GlobalUnitModule, rb: &RootBundle, place: &Place) -> LMat {
    let i = gm.places().iter().position(|d| &d.place == place).unwrap();
    gm.places()[i].frame.mul(rb.lattices[i].1.basis())
}

/// Columns of `t^R (X)^-T` below `t^h`, with `R` making them integral and
/// `t^h A^n` inside their span.
fn dual_window(x: &LMat) -> (i64, i64, LMat) {
    let n = x.rows();
    let det = x.det();
    let v = det.valuation().expect("invertible");
    let adj = x.adjugate();
    let minadj = adj.min_valuation().unwrap_or(0);
    let r = (v - minadj).max(0);
    let h = r - x.min_valuation().unwrap();
    let inv = det.inverse_trunc(h - r - minadj);
    let y = adj.transpose().shift(r).mul_trunc(&LMat::diagonal(x.ctx(), vec![inv; n]), h);
    (r, h, y)
}

fn to_poly(l: &LaurentPoly, a: &FieldElement) -> Poly {
    let ctx = l.ctx();
    if l.is_zero() {
        return Poly::zero(ctx);
    }
    let v = l.valuation().unwrap();
    assert!(v >= 0, "integral window expected");
    let top = l.top().unwrap();
    let c = (0..=top).map(|e| l.coeff(e)).collect();
    Poly::new(ctx.clone(), c).taylor_shift(&-a)
}

/// Reduced basis of the root dual and its splitting.
pub fn dual_bundle(gm: &GlobalUnitModule, rb: &RootBundle) -> Result<DualBundle> {
    let ctx = gm.ctx();
    let n = gm.n();
    let mut denom = Poly::one(ctx);
    let mut locals: Vec<(FieldElement, i64, Vec<Vec<Poly>>)> = Vec::new();
    for d in gm.places() {
        let Place::Finite(a) = &d.place else { continue };
        let (r, h, y) = dual_window(&root_basis(gm, rb, &d.place));
        let lin = Poly::linear(a);
        denom = denom.mul(&lin.pow(r as u64));
        let mut gens: Vec<Vec<Poly>> = y.columns().iter().map(|c| c.iter().map(|e| to_poly(e, a)).collect()).collect();
        let th = lin.pow(h as u64);
        for i in 0..n {
            let mut c = vec![Poly::zero(ctx); n];
            c[i] = th.clone();
            gens.push(c);
        }
        locals.push((a.clone(), h, gens));
    }
    let m = if locals.is_empty() {
        PMat::identity(ctx, n)
    } else {
        let mut all = Vec::new();
        for (i, (_, _, gens)) in locals.iter().enumerate() {
            let mut e = Poly::one(ctx);
            for (j, (b, h, _)) in locals.iter().enumerate() {
                if i != j {
                    e = e.mul(&Poly::linear(b).pow(*h as u64));
                }
            }
            all.extend(gens.iter().map(|c| c.iter().map(|p| p.mul(&e)).collect::<Vec<_>>()));
        }
        column_basis(&PMat::from_cols(ctx, n, &all))
    };
    // sections at infinity: Q c regular, Q = (T G)^T in t = 1/x
    let q_inf = match gm.place(&Place::Infinity) {
        Some(_) => root_basis(gm, rb, &Place::Infinity).transpose(),
        None => LMat::identity(ctx, n),
    };
    let k = q_inf.entries().iter().filter_map(|e| e.top()).max().unwrap_or(0).max(0);
    let rows = (0..n)
        .map(|i| {
            (0..n)
                .map(|j| {
                    let e = q_inf.get(i, j);
                    let mut c = vec![ctx.zero(); (k - e.valuation().unwrap_or(k)) as usize + 1];
                    for (ex, v) in e.terms() {
                        c[(k - ex) as usize] = v.clone();
                    }
                    Poly::new(ctx.clone(), c)
                })
                .collect()
        })
        .collect();
    let rmat = PMat::from_rows(ctx, rows);
    let mut s = rmat.mul(&m);
    let mut tracked = m;
    weak_popov(&mut s, &mut tracked);
    let top = k + denom.degree_i();
    let degrees: Vec<i64> = (0..n)
        .map(|j| s.col_degree(j).map(|c| top - c as i64).ok_or_else(|| Error::Degenerate("dual basis lost rank".into())))
        .collect::<Result<_>>()?;
    let total: i64 = degrees.iter().sum();
    if total != -rb.degree {
        return Err(Error::NonIntegralDegree { degree: -total, sum: rb.degree.to_string() });
    }
    Ok(DualBundle { m: tracked, denom, degrees })
}

/// Splitting type `(d_1 >= ... >= d_n)` of the root bundle `N_0`.
pub fn splitting_type(gm: &GlobalUnitModule, rb: &RootBundle) -> Result<Vec<i64>> {
    let mut d: Vec<i64> = dual_bundle(gm, rb)?.degrees.iter().map(|x| -x).collect();
    d.sort_unstable_by(|a, b| b.cmp(a));
    Ok(d)
}

/// Basis element `x^j c_k` of a cohomology group.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
pub struct Monomial {
    pub k: usize,
    pub j: i64,
}

/// Frobenius on `H^0` and `H^1` of the root dual, with the monomial bases
/// their matrices refer to.
#[derive(Clone, Debug)]
pub struct Cohomology {
    pub dual: DualBundle,
    pub h0_basis: Vec<Monomial>,
    pub h1_basis: Vec<Monomial>,
    pub h0: SemilinearOp,
    pub h1: SemilinearOp,
    /// `phi(c_k) = sum_i P_ik c_i`.
    pub action: PMat,
}

/// `phi(c) = B^-T c^(q)` on `E` in the reduced frame: `P` with
/// `phi(c_k) = sum_i P_ik c_i`.
fn frame_action(gm: &GlobalUnitModule, dual: &DualBundle) -> Result<PMat> {
    let c = gm.generic_matrix().transpose().mul(&dual.m);
    let det = c.det();
    let num = c.adjugate().mul(&dual.m.frobenius()).scale(&dual.denom);
    let den = det.mul(&dual.denom.frobenius());
    let n = gm.n();
    let q = gm.q() as i64;
    let mut p = PMat::zeros(gm.ctx(), n, n);
    for i in 0..n {
        for k in 0..n {
            let e = num.get(i, k).exact_div(&den).ok_or_else(|| {
                Error::RepresentativeMismatch(format!("Frobenius does not preserve E(A^1) (entry {i},{k})"))
            })?;
            if let Some(deg) = e.deg() {
                if deg as i64 > dual.degrees[i] - q * dual.degrees[k] {
                    return Err(Error::RepresentativeMismatch(format!(
                        "Frobenius does not preserve sections at infinity (entry {i},{k})"
                    )));
                }
            }
            p.set(i, k, e);
        }
    }
    Ok(p)
}

fn op_on(basis: &[Monomial], p: &PMat, q: i64, keep: impl Fn(usize, i64) -> bool) -> Result<SemilinearOp> {
    let ctx = p.ctx();
    let pos = |k: usize, j: i64| basis.iter().position(|b| b.k == k && b.j == j);
    let mut m = Mat::zeros(ctx, basis.len(), basis.len());
    for (col, b) in basis.iter().enumerate() {
        for i in 0..p.rows() {
            for (l, c) in p.get(i, b.k).coeffs().iter().enumerate() {
                let e = q * b.j + l as i64;
                if c.is_zero() || !keep(i, e) {
                    continue;
                }
                let row = pos(i, e).ok_or_else(|| {
                    Error::RepresentativeMismatch(format!("image term x^{e} c_{i} outside the basis"))
                })?;
                m.set(row, col, c.clone());
            }
        }
    }
    SemilinearOp::new(m)
}

pub fn cohomology_semilinear(gm: &GlobalUnitModule, rb: &RootBundle) -> Result<Cohomology> {
    let dual = dual_bundle(gm, rb)?;
    let action = frame_action(gm, &dual)?;
    let q = gm.q() as i64;
    let d = dual.degrees.clone();
    let mut h0_basis = Vec::new();
    let mut h1_basis = Vec::new();
    for (k, &dk) in d.iter().enumerate() {
        h0_basis.extend((0..=dk).map(|j| Monomial { k, j }));
        h1_basis.extend((dk + 1..0).map(|j| Monomial { k, j }));
    }
    let h0 = op_on(&h0_basis, &action, q, |_, _| true)?;
    let h1 = op_on(&h1_basis, &action, q, |i, e| e < 0 && e > d[i])?;
    Ok(Cohomology { dual, h0_basis, h1_basis, h0, h1, action })
}

/// `(1 - g) n - sum indices`.
pub fn chi_lower_bound(n: usize, g: u64, indices: &[IndexValue]) -> Ratio<i64> {
    let s: Ratio<i64> = indices.iter().map(|v| v.ratio()).sum();
    Ratio::from_integer((1 - g as i64) * n as i64) - s
}

/// Index at one place, as reported.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct PlaceIndex {
    pub place: String,
    pub num: i64,
    pub den: i64,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct CohomReport {
    pub n: usize,
    pub local_indices: Vec<PlaceIndex>,
    pub degree_root: i64,
    pub splitting: Vec<i64>,
    pub h0: usize,
    pub h1: usize,
    pub ss0: usize,
    pub ss1: usize,
    pub nil1: usize,
    pub chi: i64,
    pub bound: IndexValue,
    pub bound_ceil: i64,
    pub equality: bool,
}

impl CohomReport {
    /// The report with place names dropped and indices sorted, for
    /// comparisons across coordinate changes.
    pub fn place_free(&self) -> CohomReport {
        let mut r = self.clone();
        for pi in &mut r.local_indices {
            pi.place.clear();
        }
        r.local_indices.sort_by(|a, b| (a.num * b.den).cmp(&(b.num * a.den)));
        r
    }
}

/// Exact mod-p Euler characteristic from any root bundle; `h0 = ss0` and
/// `h1 = ss1` do not depend on the root.
pub fn etale_chi_with_root(gm: &GlobalUnitModule, rb: &RootBundle) -> Result<CohomReport> {
    let coh = cohomology_semilinear(gm, rb)?;
    let (ss0, _) = ss_nil_dims(&coh.h0);
    let (ss1, nil1) = ss_nil_dims(&coh.h1);
    let chi = ss0 as i64 - ss1 as i64;
    let indices: Vec<IndexValue> = rb.indices.iter().map(|(_, v)| *v).collect();
    let bound = chi_lower_bound(gm.n(), 0, &indices);
    let mut splitting: Vec<i64> = coh.dual.degrees.iter().map(|x| -x).collect();
    splitting.sort_unstable_by(|a, b| b.cmp(a));
    Ok(CohomReport {
        n: gm.n(),
        // places where only the frame differs (free local module) have index 0
        local_indices: rb
            .indices
            .iter()
            .filter(|(p, _)| gm.place(p).is_some_and(|d| d.module.m() > 0))
            .map(|(p, v)| PlaceIndex { place: p.to_string(), num: v.num(), den: v.den() })
            .collect(),
        degree_root: rb.degree,
        splitting,
        h0: ss0,
        h1: ss1,
        ss0,
        ss1,
        nil1,
        chi,
        bound: IndexValue::from_ratio(bound),
        bound_ceil: bound.ceil().to_integer(),
        equality: Ratio::from_integer(chi) == bound,
    })
}

/// Exact mod-p Euler characteristic via the minimal root. For the minimal
/// root Frobenius is bijective on `H^0`; anything else is reported as an
/// internal inconsistency.
pub fn etale_chi(gm: &GlobalUnitModule) -> Result<CohomReport> {
    let rb = global_minimal_root(gm)?;
    let rep = etale_chi_with_root(gm, &rb)?;
    let dim0: i64 = rep.splitting.iter().map(|d| (1 - d).max(0)).sum();
    if rep.ss0 as i64 != dim0 {
        return Err(Error::RepresentativeMismatch(format!(
            "Frobenius on H^0 has a nilpotent part ({} of {dim0})",
            rep.ss0
        )));
    }
    Ok(rep)
}
