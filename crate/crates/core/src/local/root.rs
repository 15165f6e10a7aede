//! Roots of local unit modules: the Frobenius span of a lattice, the root
//! test, minimal roots and their index.

use std::fmt;

use num_rational::Ratio;
use serde::{Deserialize, Serialize};

use super::lattice::{LMat, Lattice};
use super::module::LocalUnitModule;
use crate::arith::{FieldCtx, FieldElement, LaurentPoly, LaurentScalar, Mat};
use crate::error::{Error, Result};
use crate::semilin::{fixed_space, lift_series_solution, ss_nil_dims, FixedSpace, SemilinearOp};

/// Precision (absolute, in `t`) used for witnesses and generation thresholds.
pub const DEFAULT_PRECISION: i64 = 64;
/// Maximum number of Frobenius-span iterations in the generation trace.
pub const CHAIN_CAP: usize = 8;
/// The trace gives up once a lattice in the chain spans more than this many
/// powers of `t` between its lowest entry and its floor.
pub const CHAIN_WIDTH_CAP: i64 = 4096;
/// Upper limit on the exponent of the starting root.
const START_CAP: i64 = 1 << 20;

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct RootOptions {
    pub precision: i64,
    /// Also iterate the Frobenius span and record how generation shows up.
    pub trace: bool,
}

impl Default for RootOptions {
    fn default() -> Self {
        RootOptions { precision: DEFAULT_PRECISION, trace: true }
    }
}

impl RootOptions {
    pub fn fast() -> Self {
        RootOptions { precision: 1, trace: false }
    }
}

/// How the ascending chain `L, Phi(L), Phi^2(L), ...` behaved.
#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
#[serde(tag = "kind", rename_all = "kebab-case")]
pub enum GenerationTrace {
    /// The chain contained `t^-P (K-part basis)` and the `A`-part basis.
    Reached { iterations: usize, threshold: i64 },
    /// `Phi^(i+1)(L) = Phi^i(L)` strictly inside `W`.
    Stabilized { iterations: usize },
    CapHit { iterations: usize },
    NotRun,
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct RootCertificate {
    pub lattice: Lattice,
    /// `X` over `A` with `G = (B G^(q)) X`, known below `t^precision`.
    pub witness: Vec<Vec<LaurentScalar>>,
    /// Stable rank of `x -> X(0)^T x^(q)`; equals `s` for a root.
    pub residue_ss: usize,
    pub trace: GenerationTrace,
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub enum RootStatus {
    Root(Box<RootCertificate>),
    NotStable,
    NotGenerating,
    Undetermined(String),
}

impl RootStatus {
    pub fn is_root(&self) -> bool {
        matches!(self, RootStatus::Root(_))
    }
}

/// Precomputed data of the structure matrix `B`.
#[derive(Clone, Debug)]
pub struct Frame {
    ctx: FieldCtx,
    m: usize,
    s: usize,
    q: i64,
    b: LMat,
    adj: LMat,
    det_val: i64,
    beta_min: i64,
    /// `t^(q a + c) A^n` lies in `Phi(L)` whenever `t^a A^n` lies in `L`.
    c_phi: i64,
}

impl Frame {
    pub fn new(w: &LocalUnitModule) -> Result<Frame> {
        let b = w.exact_b()?;
        let det = b.det();
        let det_val = det
            .valuation()
            .ok_or_else(|| Error::InvalidInput("structure matrix is singular".into()))?;
        let adj = b.adjugate();
        let beta_min = b.min_valuation().unwrap();
        let c_phi = det_val - adj.min_valuation().unwrap_or(0);
        Ok(Frame {
            ctx: w.ctx().clone(),
            m: w.m(),
            s: w.s(),
            q: w.q() as i64,
            b,
            adj,
            det_val,
            beta_min,
            c_phi,
        })
    }

    pub fn n(&self) -> usize {
        self.m + self.s
    }

    fn check_inside(&self, l: &Lattice) -> Result<()> {
        if l.rank() != self.n() || l.ctx() != &self.ctx {
            return Err(Error::InvalidInput("lattice does not live in this module".into()));
        }
        let g = l.basis();
        for i in self.m..self.n() {
            for j in 0..self.n() {
                if g.get(i, j).valuation().is_some_and(|v| v < 0) {
                    return Err(Error::InvalidInput(format!(
                        "lattice leaves W: A-part coordinate {i} has a pole"
                    )));
                }
            }
        }
        Ok(())
    }

    /// The `A`-span of `F(L)`, basis `B G^(q)`.
    pub fn phi_span(&self, l: &Lattice) -> Lattice {
        let floor = self.q * l.floor() + self.c_phi;
        let gq = l.basis().frobenius();
        let h = self.b.mul_trunc(&gq, floor);
        Lattice::from_generators(&self.ctx, self.n(), &h.columns(), floor)
    }

    /// The smallest lattice `M` with `Phi(M) ⊇ L`.
    pub fn c_op(&self, l: &Lattice) -> Lattice {
        let n = self.n();
        // N = B^-1 L = span(t^-v adj(B) G)
        let f_n = l.floor() - self.beta_min;
        let ng = self.adj.mul_trunc(l.basis(), f_n + self.det_val).shift(-self.det_val);
        let mut cols = Vec::with_capacity(n * self.q as usize);
        for y in ng.columns() {
            let parts: Vec<Vec<LaurentPoly>> = y.iter().map(|v| v.frobenius_decompose()).collect();
            for j in 0..self.q as usize {
                let x: Vec<LaurentPoly> = parts.iter().map(|p| p[j].clone()).collect();
                if x.iter().any(|v| !v.is_zero()) {
                    cols.push(x);
                }
            }
        }
        Lattice::from_generators(&self.ctx, n, &cols, f_n.div_euclid(self.q))
    }

    /// `t^-a A^m + A^s`.
    pub fn standard_root(&self, a: i64) -> Lattice {
        let mut e = vec![-a; self.m];
        e.extend(std::iter::repeat_n(0, self.s));
        Lattice::diagonal(&self.ctx, &e)
    }

    /// An exponent `a` for which [`Frame::standard_root`] is a root, from the
    /// valuations of the blocks of `B^-1`.
    pub fn start_exponent(&self) -> i64 {
        let (m, n) = (self.m, self.n());
        if m == 0 {
            return 0;
        }
        let bkk = self.b.block(0, m, 0, m);
        let dk = bkk.det().valuation().expect("K-block is invertible");
        let adj_kk = bkk.adjugate();
        // B_KK^-1 has valuation c_kk; B_KK^-1 B_KA B_AA^-1 has valuation c_ka
        let c_kk = adj_kk.min_valuation().unwrap() - dk;
        let mut a = ceil_div(1 - c_kk, self.q - 1).max(0);
        if self.s > 0 {
            let bka = self.b.block(0, m, m, n);
            let adj_aa = self.b.block(m, n, m, n).adjugate();
            if let Some(v) = adj_kk.mul(&bka).mul(&adj_aa).min_valuation() {
                a = a.max(ceil_div(dk - v, self.q));
            }
        }
        a
    }

    /// `X` with `G = (B G^(q)) X` in the form `t^-v Y u^-1`: returns `Y t^-v`
    /// (exact) and the unit `u`.
    fn witness_parts(&self, l: &Lattice) -> (LMat, LaurentPoly) {
        let h = self.b.mul(&l.basis().frobenius());
        let det = h.det();
        let v = det.valuation().expect("Phi(L) has full rank");
        let y = h.adjugate().mul(l.basis()).shift(-v);
        (y, det.shift(-v))
    }

    pub fn is_root(&self, l: &Lattice, opts: RootOptions) -> Result<RootStatus> {
        self.check_inside(l)?;
        let (y, u) = self.witness_parts(l);
        if y.min_valuation().is_some_and(|v| v < 0) {
            return Ok(RootStatus::NotStable);
        }
        let n = self.n();
        let u0inv = u.coeff(0).inv().unwrap();
        let xbar_t = Mat::from_rows(
            &self.ctx,
            (0..n).map(|i| (0..n).map(|j| &y.get(j, i).coeff(0) * &u0inv).collect()).collect(),
        );
        let (ss, _) = ss_nil_dims(&SemilinearOp::new(xbar_t)?);
        if ss != self.s {
            return Ok(RootStatus::NotGenerating);
        }
        let prec = opts.precision.max(1);
        let uinv = u.inverse_trunc(prec);
        let witness = (0..n)
            .map(|i| {
                (0..n)
                    .map(|j| LaurentScalar::with_precision(y.get(i, j).mul_trunc(&uinv, prec), prec))
                    .collect()
            })
            .collect();
        let trace = if opts.trace { self.generation_trace(l, prec / 2) } else { GenerationTrace::NotRun };
        if let GenerationTrace::Stabilized { iterations } = trace {
            return Ok(RootStatus::Undetermined(format!(
                "residue test says generating but the chain stabilized after {iterations} steps"
            )));
        }
        Ok(RootStatus::Root(Box::new(RootCertificate {
            lattice: l.clone(),
            witness,
            residue_ss: ss,
            trace,
        })))
    }

    /// Iterate the Frobenius span until it contains `t^-P (K-part) + (A-part)`
    /// or stops growing.
    pub fn generation_trace(&self, l: &Lattice, threshold: i64) -> GenerationTrace {
        let target = self.standard_root(threshold.max(0));
        let mut cur = l.clone();
        for i in 0..=CHAIN_CAP {
            if cur.contains(&target) {
                return GenerationTrace::Reached { iterations: i, threshold };
            }
            if i == CHAIN_CAP {
                break;
            }
            if self.q * cur.floor() + self.c_phi - cur.ceiling() * self.q > CHAIN_WIDTH_CAP {
                return GenerationTrace::CapHit { iterations: i };
            }
            let next = self.phi_span(&cur);
            if next == cur {
                return GenerationTrace::Stabilized { iterations: i };
            }
            cur = next;
        }
        GenerationTrace::CapHit { iterations: CHAIN_CAP }
    }

    fn is_root_fast(&self, l: &Lattice) -> bool {
        matches!(self.is_root(l, RootOptions::fast()), Ok(RootStatus::Root(_)))
    }

    /// A root of the form `t^-a A^m + A^s`.
    pub fn start_root(&self) -> Result<Lattice> {
        let mut a = self.start_exponent();
        loop {
            let l = self.standard_root(a);
            if self.is_root_fast(&l) {
                return Ok(l);
            }
            log::warn!("starting exponent {a} does not give a root; raising it");
            a = 2 * a + 1;
            if a > START_CAP {
                return Err(Error::IterationLimit("no starting root found".into()));
            }
        }
    }

    /// Minimal root by iterating `L -> C(L)` from the starting root.
    pub fn minimal_root(&self) -> Result<Lattice> {
        let mut l = self.start_root()?;
        loop {
            let next = self.c_op(&l);
            if next == l {
                break;
            }
            debug_assert!(l.contains(&next));
            l = next;
        }
        match self.is_root(&l, RootOptions::fast())? {
            RootStatus::Root(_) => Ok(l),
            other => Err(Error::Undetermined(format!("descent ended at a non-root ({other:?})"))),
        }
    }

    /// Minimal root by repeatedly passing to a colength-one sublattice that is
    /// still a root, trying functionals in a fixed order.
    pub fn greedy_minimal_root(&self, start: Option<&Lattice>) -> Result<Lattice> {
        let mut l = match start {
            Some(l) => {
                if !self.is_root_fast(l) {
                    return Err(Error::InvalidInput("greedy descent must start at a root".into()));
                }
                l.clone()
            }
            None => self.start_root()?,
        };
        let functionals = normalized_functionals(&self.ctx, self.n())?;
        'outer: loop {
            for lam in &functionals {
                let sub = l.hyperplane_sublattice(lam);
                if self.is_root_fast(&sub) {
                    l = sub;
                    continue 'outer;
                }
            }
            return Ok(l);
        }
    }

    /// `[W_0, ..., W_depth]` with `W_(i+1) = Phi(W_i)`.
    pub fn root_filtration(&self, l: &Lattice, depth: usize) -> Vec<Lattice> {
        let mut out = vec![l.clone()];
        for _ in 0..depth {
            let next = self.phi_span(out.last().unwrap());
            out.push(next);
        }
        out
    }

    /// `dim_k(Phi(L)/L)` for a lattice with `L ⊆ Phi(L)`.
    pub fn colength_step(&self, l: &Lattice) -> i64 {
        // v det(B G^(q)) = v det B + q v det G
        l.det_valuation() - self.det_val - self.q * l.det_valuation()
    }

    pub fn index_of(&self, l: &Lattice) -> IndexValue {
        IndexValue::new(self.colength_step(l), self.q - 1)
    }

    /// The matrix `(a_ji)` of the root dual, `F(w_i^v) = sum_j a_ji w_j^v`.
    pub fn root_dual(&self, l: &Lattice, precision: i64) -> Result<Vec<Vec<LaurentScalar>>> {
        let opts = RootOptions { precision, trace: false };
        match self.is_root(l, opts)? {
            RootStatus::Root(cert) => {
                let n = self.n();
                Ok((0..n).map(|j| (0..n).map(|i| cert.witness[i][j].clone()).collect()).collect())
            }
            other => Err(Error::InvalidInput(format!("root dual of a non-root ({other:?})"))),
        }
    }
}

fn ceil_div(a: i64, b: i64) -> i64 {
    -((-a).div_euclid(b))
}

/// Nonzero row vectors with first nonzero entry 1, in index order.
pub fn normalized_functionals(ctx: &FieldCtx, n: usize) -> Result<Vec<Vec<FieldElement>>> {
    let size = ctx
        .size()
        .filter(|&s| s.checked_pow(n as u32).is_some_and(|t| t <= 1 << 20))
        .ok_or(Error::BoxTooLarge(u128::MAX))?;
    let mut out = Vec::new();
    for lead in 0..n {
        let free = n - lead - 1;
        for idx in 0..size.pow(free as u32) {
            let mut v = vec![ctx.zero(); n];
            v[lead] = ctx.one();
            let mut r = idx;
            for slot in v.iter_mut().skip(lead + 1) {
                *slot = ctx.from_index(r % size);
                r /= size;
            }
            out.push(v);
        }
    }
    Ok(out)
}

/// A minimal root index `dim_k(W_1/W_0)/(q-1)` in lowest terms.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(into = "IndexRepr", try_from = "IndexRepr")]
pub struct IndexValue(Ratio<i64>);

#[derive(Serialize, Deserialize)]
struct IndexRepr {
    num: i64,
    den: i64,
}

impl From<IndexValue> for IndexRepr {
    fn from(v: IndexValue) -> Self {
        IndexRepr { num: v.num(), den: v.den() }
    }
}

impl TryFrom<IndexRepr> for IndexValue {
    type Error = String;
    fn try_from(r: IndexRepr) -> std::result::Result<Self, String> {
        if r.den == 0 {
            return Err("zero denominator".into());
        }
        Ok(IndexValue::new(r.num, r.den))
    }
}

impl IndexValue {
    pub fn new(num: i64, den: i64) -> Self {
        IndexValue(Ratio::new(num, den))
    }
    pub fn zero() -> Self {
        IndexValue::new(0, 1)
    }
    pub fn from_ratio(r: Ratio<i64>) -> Self {
        IndexValue(r)
    }
    pub fn num(&self) -> i64 {
        *self.0.numer()
    }
    pub fn den(&self) -> i64 {
        *self.0.denom()
    }
    pub fn ratio(&self) -> Ratio<i64> {
        self.0
    }
}

impl fmt::Display for IndexValue {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}", self.0)
    }
}

/// `Hom_{A[F]}(W, A)`: invariants `x = a x^(q)` of the root dual of the
/// minimal root.
#[derive(Clone, Debug)]
pub struct InvariantHoms {
    /// Fixed vectors mod `t` over the ground field.
    pub residue: FixedSpace,
    /// Their unique lifts, known below `t^precision`.
    pub lifts: Vec<Vec<LaurentScalar>>,
    /// Dimension over the algebraic closure, `ss` of the residue operator.
    pub geometric_dim: usize,
}

impl InvariantHoms {
    /// Dimension over `F_q` of the invariants over the ground field.
    pub fn dim(&self) -> usize {
        self.residue.dim()
    }
}

pub fn phi_span(w: &LocalUnitModule, l: &Lattice) -> Result<Lattice> {
    let f = Frame::new(w)?;
    f.check_inside(l)?;
    Ok(f.phi_span(l))
}

/// Root test. Inexact structure matrices give `Undetermined`.
pub fn is_root(w: &LocalUnitModule, l: &Lattice, opts: RootOptions) -> Result<RootStatus> {
    match Frame::new(w) {
        Ok(f) => f.is_root(l, opts),
        Err(Error::InsufficientPrecision(msg)) => Ok(RootStatus::Undetermined(msg)),
        Err(e) => Err(e),
    }
}

pub fn root_filtration(w: &LocalUnitModule, l: &Lattice, depth: usize) -> Result<Vec<Lattice>> {
    let f = Frame::new(w)?;
    match f.is_root(l, RootOptions::fast())? {
        RootStatus::Root(_) => Ok(f.root_filtration(l, depth)),
        other => Err(Error::InvalidInput(format!("filtration of a non-root ({other:?})"))),
    }
}

pub fn minimal_root(w: &LocalUnitModule) -> Result<Lattice> {
    super::check_unit(w)?;
    Frame::new(w)?.minimal_root()
}

pub fn greedy_minimal_root(w: &LocalUnitModule) -> Result<Lattice> {
    super::check_unit(w)?;
    Frame::new(w)?.greedy_minimal_root(None)
}

pub fn minimal_root_index(w: &LocalUnitModule) -> Result<IndexValue> {
    super::check_unit(w)?;
    let f = Frame::new(w)?;
    Ok(f.index_of(&f.minimal_root()?))
}

pub fn root_dual(w: &LocalUnitModule, l: &Lattice, precision: i64) -> Result<Vec<Vec<LaurentScalar>>> {
    Frame::new(w)?.root_dual(l, precision)
}

pub fn local_invariant_homs(w: &LocalUnitModule, precision: i64) -> Result<InvariantHoms> {
    super::check_unit(w)?;
    let f = Frame::new(w)?;
    let a = f.root_dual(&f.minimal_root()?, precision)?;
    let n = f.n();
    let abar = Mat::from_rows(
        &f.ctx,
        a.iter().map(|r| r.iter().map(|v| v.known().coeff(0)).collect()).collect(),
    );
    let op = SemilinearOp::new(abar)?;
    let residue = fixed_space(&op);
    let zero = vec![LaurentScalar::exact(LaurentPoly::zero(&f.ctx)); n];
    let lifts = residue
        .basis
        .iter()
        .map(|x0| lift_series_solution(&a, &zero, x0, precision).map(|s| s.x))
        .collect::<Result<Vec<_>>>()?;
    Ok(InvariantHoms { residue, lifts, geometric_dim: ss_nil_dims(&op).0 })
}

#[cfg(test)]
mod tests {
    use super::*;

    fn twist(p: u64, r: u32, d: i64) -> LocalUnitModule {
        LocalUnitModule::twist(&FieldCtx::new(p, r, 1).unwrap(), d)
    }

    #[test]
    fn quadratic_twist() {
        let w = twist(5, 1, 2);
        let l0 = minimal_root(&w).unwrap();
        assert_eq!(l0.exponents(), &[-1]);
        assert_eq!(minimal_root_index(&w).unwrap(), IndexValue::new(1, 2));
        let st = is_root(&w, &l0, RootOptions::default()).unwrap();
        let RootStatus::Root(cert) = st else { panic!("{st:?}") };
        assert!(matches!(cert.trace, GenerationTrace::Reached { .. }));
        assert_eq!(cert.witness[0][0].known(), &LaurentPoly::t_pow(w.ctx(), 2));
    }

    #[test]
    fn trivial_twist_is_not_generated_by_a() {
        let w = twist(5, 1, 0);
        let l = Lattice::standard(w.ctx(), 1);
        assert_eq!(is_root(&w, &l, RootOptions::default()).unwrap(), RootStatus::NotGenerating);
        assert_eq!(minimal_root_index(&w).unwrap(), IndexValue::new(1, 1));
    }

    #[test]
    fn rank_one_closed_form() {
        for (p, r) in [(5, 1), (7, 1), (3, 2)] {
            let q = (p as i64).pow(r);
            for d in -7..=2 * q {
                let w = twist(p, r, d);
                let dt = d.rem_euclid(q - 1);
                let expect = IndexValue::new(q - 1 - dt, q - 1);
                assert_eq!(minimal_root_index(&w).unwrap(), expect, "q={q} d={d}");
                let f = Frame::new(&w).unwrap();
                assert_eq!(f.greedy_minimal_root(None).unwrap(), f.minimal_root().unwrap());
            }
        }
    }

    #[test]
    fn free_module() {
        let k = FieldCtx::new(7, 1, 1).unwrap();
        let w = LocalUnitModule::free(&k, 3);
        assert_eq!(minimal_root(&w).unwrap(), Lattice::standard(&k, 3));
        assert_eq!(minimal_root_index(&w).unwrap(), IndexValue::zero());
        assert_eq!(local_invariant_homs(&w, 8).unwrap().dim(), 3);
    }

    #[test]
    fn invariants() {
        let k = FieldCtx::new(5, 1, 1).unwrap();
        let tw = LocalUnitModule::twist(&k, 2);
        assert_eq!(local_invariant_homs(&tw, 8).unwrap().dim(), 0);
        let sum = LocalUnitModule::free(&k, 1).direct_sum(&tw).unwrap();
        let inv = local_invariant_homs(&sum, 8).unwrap();
        assert_eq!((inv.dim(), inv.geometric_dim), (1, 1));
        let l0 = minimal_root(&sum).unwrap();
        assert_eq!(l0.exponents(), &[-1, 0]);
    }

    #[test]
    fn filtration_scales_by_q() {
        let w = twist(5, 1, 2);
        let l0 = minimal_root(&w).unwrap();
        let fil = root_filtration(&w, &l0, 2).unwrap();
        let col: Vec<i64> = fil.windows(2).map(|p| p[1].colength_of(&p[0])).collect();
        assert_eq!(col, vec![2, 10]);
    }

    #[test]
    fn residue_orientation_over_extension() {
        // W = K^2 with B^-1 = u v^T + t w z^T, L = A^2, so X = B^-1 and
        // X(0) = u v^T has entries outside F_q
        let k = FieldCtx::new(5, 1, 3).unwrap();
        let g = k.generator().unwrap();
        let u = [k.one(), g.clone()];
        for flip in [false, true] {
            // u^T v^(q) = 0 unless flipped
            let vq = if flip { [k.one(), k.one()] } else { [-&u[1], u[0].clone()] };
            let v = [vq[0].frobenius_inv(), vq[1].frobenius_inv()];
            let (w_, z) = ([k.one(), k.zero()], [k.zero(), g.pow(7)]);
            let x = LMat::from_rows(
                &k,
                (0..2)
                    .map(|i| {
                        (0..2)
                            .map(|j| {
                                LaurentPoly::constant(&u[i] * &v[j])
                                    .add(&LaurentPoly::monomial(&w_[i] * &z[j], 1))
                            })
                            .collect()
                    })
                    .collect(),
            );
            let det = x.det();
            let b = x.adjugate().map(|e| e.exact_div(&det).unwrap());
            let w = LocalUnitModule::from_exact(&k, 2, 0, &b).unwrap();
            let f = Frame::new(&w).unwrap();
            let l = Lattice::standard(&k, 2);
            let st = f.is_root(&l, RootOptions::default()).unwrap();
            let chain = f.generation_trace(&l, 32);
            let twisted_rank = !(&(&u[0] * &vq[0]) + &(&u[1] * &vq[1])).is_zero();
            assert_eq!(st.is_root(), !twisted_rank);
            assert_eq!(matches!(chain, GenerationTrace::Reached { .. }), st.is_root(), "{chain:?}");
        }
    }
}
