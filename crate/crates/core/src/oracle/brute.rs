//! Minimal roots by exhaustive search over Hermite forms in a box.

use rand::Rng;
use rayon::prelude::*;

use crate::arith::{FieldCtx, FieldElement, LaurentPoly};
use crate::error::{Error, Result};
use crate::local::{Frame, Lattice, LocalUnitModule, RootOptions, RootStatus};

/// Candidate limit for the enumeration.
pub const MAX_CANDIDATES: u128 = 1_000_000;

/// Lattices `L` with `t^hi A^n ⊆ L ⊆ t^lo A^n`, given by Hermite forms with
/// diagonal exponents in `[lo, hi]`.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct SearchBox {
    pub lo: i64,
    pub hi: i64,
}

impl SearchBox {
    /// `[-a, 1]` for the starting root `t^-a A^m + A^s`; every root inside
    /// the starting root has Hermite exponents at least `-a`.
    pub fn around_start(w: &LocalUnitModule) -> Result<SearchBox> {
        let a = Frame::new(w)?.start_exponent();
        Ok(SearchBox { lo: -a, hi: 1 })
    }
}

struct Shape {
    n: usize,
    m: usize,
    size: u128,
    lo: i64,
}

impl Shape {
    fn low(&self, row: usize) -> i64 {
        if row >= self.m {
            self.lo.max(0)
        } else {
            self.lo
        }
    }
    /// Number of free coefficients below the diagonal for exponents `k`.
    fn free_coeffs(&self, k: &[i64]) -> u32 {
        (1..self.n).map(|r| r as u32 * (k[r] - self.low(r)).max(0) as u32).sum()
    }
    fn count(&self, k: &[i64]) -> Option<u128> {
        self.size.checked_pow(self.free_coeffs(k))
    }
}

fn exponent_vectors(shape: &Shape, hi: i64) -> Vec<Vec<i64>> {
    let mut out = vec![Vec::new()];
    for r in 0..shape.n {
        let lo = shape.low(r);
        out = out
            .into_iter()
            .flat_map(|v| {
                (lo..=hi).map(move |k| {
                    let mut w = v.clone();
                    w.push(k);
                    w
                })
            })
            .collect();
    }
    out
}

fn decode(ctx: &FieldCtx, shape: &Shape, k: &[i64], mut idx: u128) -> Lattice {
    let n = shape.n;
    let mut cols: Vec<Vec<LaurentPoly>> = Vec::with_capacity(n);
    for i in 0..n {
        let mut col = vec![LaurentPoly::zero(ctx); n];
        col[i] = LaurentPoly::t_pow(ctx, k[i]);
        cols.push(col);
    }
    for r in 1..n {
        let low = shape.low(r);
        for col in cols.iter_mut().take(r) {
            let len = (k[r] - low).max(0) as usize;
            let mut c: Vec<FieldElement> = Vec::with_capacity(len);
            for _ in 0..len {
                c.push(ctx.from_index(idx % shape.size));
                idx /= shape.size;
            }
            col[r] = LaurentPoly::from_parts(ctx, low, c);
        }
    }
    let det: i64 = k.iter().sum();
    let floor = det - (n as i64 - 1) * shape.lo.min(0);
    Lattice::from_generators(ctx, n, &cols, floor.max(k.iter().copied().max().unwrap()))
}

/// All roots in the box, in enumeration order.
pub fn roots_in_box(w: &LocalUnitModule, bx: SearchBox) -> Result<Vec<Lattice>> {
    let frame = Frame::new(w)?;
    let ctx = w.ctx();
    if bx.lo > bx.hi {
        return Err(Error::InvalidInput("empty search box".into()));
    }
    let size = ctx.size().ok_or(Error::BoxTooLarge(u128::MAX))?;
    let shape = Shape { n: w.n(), m: w.m(), size, lo: bx.lo };
    let kvecs = exponent_vectors(&shape, bx.hi);
    let mut offsets = Vec::with_capacity(kvecs.len() + 1);
    let mut total: u128 = 0;
    for k in &kvecs {
        offsets.push(total);
        total = shape
            .count(k)
            .and_then(|c| total.checked_add(c))
            .ok_or(Error::BoxTooLarge(u128::MAX))?;
    }
    offsets.push(total);
    if total > MAX_CANDIDATES {
        return Err(Error::BoxTooLarge(total));
    }
    let found: Vec<Result<Option<Lattice>>> = (0..total as u64)
        .into_par_iter()
        .map(|flat| {
            let flat = flat as u128;
            let which = offsets.partition_point(|&o| o <= flat) - 1;
            let l = decode(ctx, &shape, &kvecs[which], flat - offsets[which]);
            match frame.is_root(&l, RootOptions::fast())? {
                RootStatus::Root(_) => Ok(Some(l)),
                RootStatus::Undetermined(msg) => Err(Error::Undetermined(msg)),
                _ => Ok(None),
            }
        })
        .collect();
    let mut roots = Vec::new();
    for r in found {
        if let Some(l) = r? {
            roots.push(l);
        }
    }
    Ok(roots)
}

/// A uniformly random Hermite form in the box (not necessarily a root).
pub fn sample_lattice<R: Rng>(w: &LocalUnitModule, bx: SearchBox, rng: &mut R) -> Result<Lattice> {
    let size = w.ctx().size().ok_or(Error::BoxTooLarge(u128::MAX))?;
    let shape = Shape { n: w.n(), m: w.m(), size, lo: bx.lo };
    let kvecs = exponent_vectors(&shape, bx.hi);
    let k = &kvecs[rng.gen_range(0..kvecs.len())];
    let count = shape.count(k).ok_or(Error::BoxTooLarge(u128::MAX))?;
    Ok(decode(w.ctx(), &shape, k, rng.gen_range(0..count)))
}

/// The inclusion-minimal root in the box.
pub fn brute_force_minimal_root(w: &LocalUnitModule, bx: SearchBox) -> Result<Lattice> {
    let roots = roots_in_box(w, bx)?;
    let best = roots.iter().map(|l| l.det_valuation()).max().ok_or(Error::BoxBoundaryHit)?;
    let mut cands = roots.iter().filter(|l| l.det_valuation() == best);
    let min = cands.next().unwrap();
    if cands.next().is_some() || !roots.iter().all(|l| l.contains(min)) {
        return Err(Error::NoUniqueMinimum);
    }
    if min.exponents().contains(&bx.hi) {
        return Err(Error::BoxBoundaryHit);
    }
    Ok(min.clone())
}

/// How [`certify_minimal_root`] checked its answer.
#[derive(Clone, Debug, PartialEq, Eq)]
pub enum Certification {
    /// Exhaustive search in the box agreed.
    Exhaustive(SearchBox),
    /// The box was too large; this many sampled roots all contained it.
    Sampled { roots: usize, samples: usize },
}

/// Minimal root by descent, checked against exhaustive search (widening the
/// box upwards on boundary hits) or, past the candidate limit, against
/// randomly sampled roots.
pub fn certify_minimal_root<R: Rng>(
    w: &LocalUnitModule,
    rng: &mut R,
) -> Result<(Lattice, Certification)> {
    let frame = Frame::new(w)?;
    let l0 = frame.minimal_root()?;
    let mut bx = SearchBox::around_start(w)?;
    loop {
        match brute_force_minimal_root(w, bx) {
            Ok(b) if b == l0 => return Ok((l0, Certification::Exhaustive(bx))),
            Ok(b) => {
                return Err(Error::OracleMismatch(format!(
                    "descent gave {l0}, exhaustive search gave {b}"
                )))
            }
            Err(Error::BoxBoundaryHit) if bx.hi < bx.lo.max(0) + 4 => bx.hi += 1,
            Err(Error::BoxTooLarge(n)) => {
                log::warn!("box with {n} candidates; certifying by sampling");
                let samples = 2000;
                let mut roots = 0;
                for _ in 0..samples {
                    let l = sample_lattice(w, bx, rng)?;
                    if frame.is_root(&l, RootOptions::fast())?.is_root() {
                        roots += 1;
                        if !l.contains(&l0) {
                            return Err(Error::OracleMismatch(format!(
                                "sampled root {l} does not contain {l0}"
                            )));
                        }
                    }
                }
                return Ok((l0, Certification::Sampled { roots, samples }));
            }
            Err(e) => return Err(e),
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::local::minimal_root;

    #[test]
    fn quadratic_example_box() {
        let k = FieldCtx::new(5, 1, 1).unwrap();
        let w = LocalUnitModule::twist(&k, 2);
        let l = brute_force_minimal_root(&w, SearchBox { lo: -3, hi: 3 }).unwrap();
        assert_eq!(l, Lattice::diagonal(&k, &[-1]));
    }

    #[test]
    fn agrees_on_small_sums() {
        let k = FieldCtx::new(5, 1, 1).unwrap();
        let w = LocalUnitModule::free(&k, 1).direct_sum(&LocalUnitModule::twist(&k, 2)).unwrap();
        let bx = SearchBox::around_start(&w).unwrap();
        assert_eq!(brute_force_minimal_root(&w, bx).unwrap(), minimal_root(&w).unwrap());
        let f = LocalUnitModule::free(&k, 2);
        assert_eq!(
            brute_force_minimal_root(&f, SearchBox { lo: -1, hi: 1 }).unwrap(),
            Lattice::standard(&k, 2)
        );
    }
}
