//! Generic structure matrices and per-place local presentations.

use std::collections::BTreeMap;

use super::{base_ctx, cover_poly, parse_place, Place, SheafSpec};
use crate::arith::{Embedding, FieldCtx, LaurentPoly, Poly};
use crate::error::{Error, Result};
use crate::global::polymat::PMat;
use crate::local::{check_unit, LMat, LocalUnitModule};

/// Local presentation at a bad place. The columns of `frame` are the local
/// basis vectors in generic coordinates, so `frame * B_local =
/// B_generic * frame^(q)`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct LocalData {
    pub place: Place,
    pub module: LocalUnitModule,
    pub frame: LMat,
    pub frame_inv: LMat,
}

/// A unit module on P^1: generic basis `e` with `F(e_j) = sum_i B_ij e_i`,
/// `B` polynomial in `x`; the stalk is `A^n` in the generic basis away from
/// the listed places.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct GlobalUnitModule {
    ctx: FieldCtx,
    n: usize,
    b: PMat,
    places: Vec<LocalData>,
}

/// `p` in the uniformizer `t = x - a`, or `t = 1/x` at infinity.
pub fn localize(p: &Poly, place: &Place) -> LaurentPoly {
    let ctx = p.ctx();
    match place {
        Place::Finite(a) => LaurentPoly::from_parts(ctx, 0, p.taylor_shift(a).coeffs().to_vec()),
        Place::Infinity => {
            let Some(d) = p.deg() else { return LaurentPoly::zero(ctx) };
            let c: Vec<_> = p.coeffs().iter().rev().cloned().collect();
            LaurentPoly::from_parts(ctx, -(d as i64), c)
        }
    }
}

fn localize_mat(m: &PMat, place: &Place) -> LMat {
    let rows = (0..m.rows()).map(|i| (0..m.cols()).map(|j| localize(m.get(i, j), place)).collect()).collect();
    LMat::from_rows(m.ctx(), rows)
}

impl GlobalUnitModule {
    pub fn new(ctx: &FieldCtx, b: PMat, mut places: Vec<LocalData>) -> Result<Self> {
        places.sort_by(|a, b| a.place.cmp(&b.place));
        let gm = GlobalUnitModule { ctx: ctx.clone(), n: b.rows(), b, places };
        gm.validate()?;
        Ok(gm)
    }

    pub fn ctx(&self) -> &FieldCtx {
        &self.ctx
    }
    pub fn n(&self) -> usize {
        self.n
    }
    pub fn q(&self) -> u64 {
        self.ctx.q()
    }
    pub fn generic_matrix(&self) -> &PMat {
        &self.b
    }
    /// Bad places in order, finite places first.
    pub fn places(&self) -> &[LocalData] {
        &self.places
    }
    pub fn place(&self, p: &Place) -> Option<&LocalData> {
        self.places.iter().find(|d| &d.place == p)
    }
    pub fn localized_generic(&self, place: &Place) -> LMat {
        localize_mat(&self.b, place)
    }

    /// The local module at any place; `A^n` with the localized generic
    /// matrix away from the bad places.
    pub fn local_module(&self, place: &Place) -> Result<LocalUnitModule> {
        match self.place(place) {
            Some(d) => Ok(d.module.clone()),
            None => LocalUnitModule::from_exact(&self.ctx, 0, self.n, &self.localized_generic(place)),
        }
    }

    fn validate(&self) -> Result<()> {
        let n = self.n;
        if n == 0 || self.b.cols() != n {
            return Err(Error::InvalidInput("generic matrix must be square of positive size".into()));
        }
        let id = LMat::identity(&self.ctx, n);
        for d in &self.places {
            let bp = self.localized_generic(&d.place);
            if d.module.n() != n || d.frame.rows() != n || d.frame_inv.rows() != n {
                return Err(Error::InvalidInput(format!("rank mismatch at {}", d.place)));
            }
            if d.frame.mul(&d.frame_inv) != id {
                return Err(Error::InvalidInput(format!("frame at {} is not inverted by frame_inv", d.place)));
            }
            let lhs = d.frame.mul(&d.module.exact_b()?);
            let rhs = bp.mul(&d.frame.frobenius());
            if lhs != rhs {
                return Err(Error::InvalidInput(format!(
                    "local structure at {} does not match the generic matrix",
                    d.place
                )));
            }
            check_unit(&d.module)?;
        }
        // det B may only vanish at bad finite places
        let mut det = self.b.det();
        if det.is_zero() {
            return Err(Error::NotUnit(vec![]));
        }
        for d in &self.places {
            if let Place::Finite(a) = &d.place {
                let lin = Poly::linear(a);
                while let Some(q) = det.exact_div(&lin) {
                    det = q;
                }
            }
        }
        if det.deg() != Some(0) {
            return Err(Error::NotUnit(vec![det.degree_i()]));
        }
        if self.place(&Place::Infinity).is_none() && self.b.max_degree().unwrap_or(0) > 0 {
            return Err(Error::InvalidInput("generic matrix has a pole at inf, which is not listed".into()));
        }
        Ok(())
    }
}

struct Parts {
    n: usize,
    b: PMat,
    places: BTreeMap<Place, LocalData>,
}

struct Builder {
    ctx: FieldCtx,
    base: FieldCtx,
    emb: Embedding,
}

impl Builder {
    fn place(&self, s: &str) -> Result<Place> {
        Ok(match parse_place(s, &self.base)? {
            None => Place::Infinity,
            Some(a) => Place::Finite(self.emb.map(&a)),
        })
    }
    fn poly(&self, f: &Poly) -> Poly {
        f.map_coeffs(&self.ctx, |c| self.emb.map(c))
    }
    fn t(&self, e: i64) -> LaurentPoly {
        LaurentPoly::t_pow(&self.ctx, e)
    }
    fn zero(&self) -> LaurentPoly {
        LaurentPoly::zero(&self.ctx)
    }

    fn local(&self, b: &PMat, place: Place, m: usize, frame: LMat, frame_inv: LMat) -> Result<LocalData> {
        let bp = frame_inv.mul(&localize_mat(b, &place)).mul(&frame.frobenius());
        let module = LocalUnitModule::from_exact(&self.ctx, m, b.rows() - m, &bp)?;
        Ok(LocalData { place, module, frame, frame_inv })
    }

    fn build(&self, spec: &SheafSpec) -> Result<Parts> {
        let ctx = &self.ctx;
        let q = ctx.q() as i64;
        match spec {
            SheafSpec::Constant { rank } => {
                if *rank == 0 {
                    return Err(Error::InvalidInput("rank must be positive".into()));
                }
                Ok(Parts { n: *rank, b: PMat::identity(ctx, *rank), places: BTreeMap::new() })
            }
            SheafSpec::Shriek { rank, punctures } => {
                let n = *rank;
                if n == 0 {
                    return Err(Error::InvalidInput("rank must be positive".into()));
                }
                let b = PMat::identity(ctx, n);
                let mut places = BTreeMap::new();
                for s in punctures {
                    let pl = self.place(s)?;
                    let id = LMat::identity(ctx, n);
                    let d = self.local(&b, pl.clone(), n, id.clone(), id)?;
                    if places.insert(pl.clone(), d).is_some() {
                        return Err(Error::InvalidInput(format!("puncture {pl} listed twice")));
                    }
                }
                Ok(Parts { n, b, places })
            }
            SheafSpec::TameCover { f } => {
                if ctx.p() < 5 {
                    return Err(Error::InvalidInput("double covers need p >= 5".into()));
                }
                let f = self.poly(&cover_poly(f, &self.base)?);
                let deg = f.deg().unwrap() as i64;
                let h = (q - 1) / 2;
                let b = PMat::diagonal(ctx, vec![Poly::one(ctx), f.pow(h as u64)]);
                let mut places = BTreeMap::new();
                let swap = LMat::from_rows(ctx, vec![vec![self.zero(), self.t(0)], vec![self.t(0), self.zero()]]);
                let roots = f.roots();
                if roots.len() as i64 != deg {
                    return Err(Error::InvalidInput("cover polynomial does not split in the work field".into()));
                }
                for a in roots {
                    let pl = Place::Finite(a);
                    places.insert(pl.clone(), self.local(&b, pl, 1, swap.clone(), swap.clone())?);
                }
                // y' = t^c y at infinity, t = 1/x
                let c = (deg + 1) / 2;
                let (m, frame, inv) = if deg % 2 == 1 {
                    (
                        1,
                        LMat::from_rows(ctx, vec![vec![self.zero(), self.t(0)], vec![self.t(c), self.zero()]]),
                        LMat::from_rows(ctx, vec![vec![self.zero(), self.t(-c)], vec![self.t(0), self.zero()]]),
                    )
                } else {
                    (0, LMat::t_diagonal(ctx, &[0, c]), LMat::t_diagonal(ctx, &[0, -c]))
                };
                places.insert(Place::Infinity, self.local(&b, Place::Infinity, m, frame, inv)?);
                Ok(Parts { n: 2, b, places })
            }
            SheafSpec::Rank1Twist { twists } => {
                let mut ds: BTreeMap<Place, i64> = BTreeMap::new();
                for tw in twists {
                    let pl = self.place(&tw.place)?;
                    if ds.insert(pl.clone(), tw.d).is_some() {
                        return Err(Error::InvalidInput(format!("twist at {pl} listed twice")));
                    }
                }
                let total: i64 = ds.values().sum();
                if total.rem_euclid(q - 1) != 0 {
                    return Err(Error::InvalidInput(format!(
                        "twist exponents sum to {total}, which is not divisible by q - 1 = {}",
                        q - 1
                    )));
                }
                let mut b = Poly::one(ctx);
                let mut reduced_sum = 0;
                for (pl, d) in &ds {
                    if let Place::Finite(a) = pl {
                        let r = d.rem_euclid(q - 1);
                        reduced_sum += r;
                        b = b.mul(&Poly::linear(a).pow(r as u64));
                    }
                }
                let bm = PMat::diagonal(ctx, vec![b]);
                let mut places = BTreeMap::new();
                for (pl, d) in &ds {
                    let c = match pl {
                        Place::Finite(_) => (d - d.rem_euclid(q - 1)) / (q - 1),
                        Place::Infinity => (d + reduced_sum) / (q - 1),
                    };
                    let data = self.local(&bm, pl.clone(), 1, LMat::t_diagonal(ctx, &[c]), LMat::t_diagonal(ctx, &[-c]))?;
                    places.insert(pl.clone(), data);
                }
                if !ds.contains_key(&Place::Infinity) && reduced_sum != 0 {
                    let c = reduced_sum / (q - 1);
                    let data =
                        self.local(&bm, Place::Infinity, 0, LMat::t_diagonal(ctx, &[c]), LMat::t_diagonal(ctx, &[-c]))?;
                    places.insert(Place::Infinity, data);
                }
                Ok(Parts { n: 1, b: bm, places })
            }
            SheafSpec::DirectSum { summands } => {
                let mut it = summands.iter();
                let first = it.next().ok_or_else(|| Error::InvalidInput("empty direct sum".into()))?;
                let mut acc = self.build(first)?;
                for s in it {
                    acc = self.sum(acc, self.build(s)?)?;
                }
                Ok(acc)
            }
        }
    }

    fn free_data(&self, parts: &Parts, place: &Place) -> Result<LocalData> {
        let id = LMat::identity(&self.ctx, parts.n);
        self.local(&parts.b, place.clone(), 0, id.clone(), id)
    }

    fn sum(&self, x: Parts, y: Parts) -> Result<Parts> {
        let ctx = &self.ctx;
        let n = x.n + y.n;
        let mut b = PMat::zeros(ctx, n, n);
        for (src, off) in [(&x, 0), (&y, x.n)] {
            for i in 0..src.n {
                for j in 0..src.n {
                    b.set(off + i, off + j, src.b.get(i, j).clone());
                }
            }
        }
        let mut keys: Vec<Place> = x.places.keys().chain(y.places.keys()).cloned().collect();
        keys.sort();
        keys.dedup();
        let mut places = BTreeMap::new();
        for pl in keys {
            let dx = match x.places.get(&pl) {
                Some(d) => d.clone(),
                None => self.free_data(&x, &pl)?,
            };
            let dy = match y.places.get(&pl) {
                Some(d) => d.clone(),
                None => self.free_data(&y, &pl)?,
            };
            let module = dx.module.direct_sum(&dy.module)?;
            let order = dx.module.block_order(&dy.module);
            let mut frame = LMat::zeros(ctx, n, n);
            let mut inv = LMat::zeros(ctx, n, n);
            for (ni, &(src, oi)) in order.iter().enumerate() {
                let (d, off, k) = if src == 0 { (&dx, 0, x.n) } else { (&dy, x.n, y.n) };
                for r in 0..k {
                    frame.set(off + r, ni, d.frame.get(r, oi).clone());
                    inv.set(ni, off + r, d.frame_inv.get(oi, r).clone());
                }
            }
            places.insert(pl.clone(), LocalData { place: pl, module, frame, frame_inv: inv });
        }
        Ok(Parts { n, b, places })
    }
}

fn lcm(a: u64, b: u64) -> u64 {
    let (mut x, mut y) = (a, b);
    while y != 0 {
        (x, y) = (y, x % y);
    }
    a / x * b
}

fn splitting_need(spec: &SheafSpec, base: &FieldCtx) -> Result<u64> {
    Ok(match spec {
        SheafSpec::TameCover { f } => cover_poly(f, base)?.splitting_degree(),
        SheafSpec::DirectSum { summands } => {
            summands.iter().try_fold(1, |acc, s| Ok::<_, Error>(lcm(acc, splitting_need(s, base)?)))?
        }
        _ => 1,
    })
}

/// The work field `F_{q^e}` for a spec: `e` is the least common multiple of
/// `field_ext` and the splitting degrees of all cover polynomials.
pub fn work_field(spec: &SheafSpec, p: u64, r: u32, field_ext: u32) -> Result<FieldCtx> {
    if field_ext == 0 {
        return Err(Error::InvalidInput("field extension degree must be positive".into()));
    }
    let base = base_ctx(p, r)?;
    let e = lcm(field_ext as u64, splitting_need(spec, &base)?);
    FieldCtx::new(p, r, u32::try_from(e).map_err(|_| Error::InvalidInput("extension too large".into()))?)
}

/// The unit module dual to the sheaf `spec` on P^1 over `F_{p^r}`, presented
/// over the work field (see [`work_field`]).
pub fn global_dual_of_sheaf(spec: &SheafSpec, p: u64, r: u32, field_ext: u32) -> Result<GlobalUnitModule> {
    let ctx = work_field(spec, p, r, field_ext)?;
    let base = base_ctx(p, r)?;
    let emb = Embedding::new(&base, &ctx)?;
    let builder = Builder { ctx: ctx.clone(), base, emb };
    let parts = builder.build(spec)?;
    GlobalUnitModule::new(&ctx, parts.b, parts.places.into_values().collect())
}

/// The local dual at `place` (written as in the spec syntax).
pub fn local_dual_of_sheaf(spec: &SheafSpec, place: &str, p: u64, r: u32, field_ext: u32) -> Result<LocalUnitModule> {
    let gm = global_dual_of_sheaf(spec, p, r, field_ext)?;
    let base = base_ctx(p, r)?;
    let emb = Embedding::new(&base, gm.ctx())?;
    let pl = match parse_place(place, &base)? {
        None => Place::Infinity,
        Some(a) => Place::Finite(emb.map(&a)),
    };
    gm.local_module(&pl)
}
