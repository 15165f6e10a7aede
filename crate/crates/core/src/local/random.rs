//! Random local modules with monomial structure matrices.

use rand::Rng;

use super::lattice::LMat;
use super::module::LocalUnitModule;
use crate::arith::{FieldCtx, FieldElement, LaurentPoly};

/// Degree ranges for [`random_monomial_module`].
#[derive(Clone, Copy, Debug)]
pub struct MonomialRanges {
    /// Twist exponents on the `K`-block diagonal.
    pub twist: (i64, i64),
    /// Exponents of off-diagonal monomials.
    pub off: (i64, i64),
}

impl MonomialRanges {
    /// Twists in `[-(q-1), 2(q-1)]`, off-diagonal exponents in `[-2, 3]`.
    pub fn for_field(ctx: &FieldCtx) -> Self {
        let q = ctx.q() as i64;
        MonomialRanges { twist: (-(q - 1), 2 * (q - 1)), off: (-2, 3) }
    }
}

fn nonzero<R: Rng>(ctx: &FieldCtx, rng: &mut R) -> FieldElement {
    let size = ctx.size().expect("small field");
    ctx.from_index(rng.gen_range(1..size))
}

fn mono<R: Rng>(ctx: &FieldCtx, rng: &mut R, range: (i64, i64)) -> LaurentPoly {
    LaurentPoly::monomial(nonzero(ctx, rng), rng.gen_range(range.0..=range.1))
}

/// A unit module of rank `1..=max_rank` (at most 2) in block shape, whose
/// structure matrix has monomial entries.
pub fn random_monomial_module<R: Rng>(
    ctx: &FieldCtx,
    rng: &mut R,
    max_rank: usize,
    ranges: MonomialRanges,
) -> LocalUnitModule {
    let n = rng.gen_range(1..=max_rank.clamp(1, 2));
    let m = rng.gen_range(0..=n);
    let s = n - m;
    let zero = LaurentPoly::zero(ctx);
    let mut b = vec![vec![zero.clone(); n]; n];
    match m {
        1 => b[0][0] = mono(ctx, rng, ranges.twist),
        2 => {
            if rng.gen_bool(0.3) {
                b[0][1] = mono(ctx, rng, ranges.twist);
                b[1][0] = mono(ctx, rng, ranges.twist);
            } else {
                b[0][0] = mono(ctx, rng, ranges.twist);
                b[1][1] = mono(ctx, rng, ranges.twist);
                if rng.gen_bool(0.5) {
                    let (i, j) = if rng.gen_bool(0.5) { (0, 1) } else { (1, 0) };
                    b[i][j] = mono(ctx, rng, ranges.off);
                }
            }
        }
        _ => {}
    }
    match s {
        1 => b[m][m] = LaurentPoly::constant(nonzero(ctx, rng)),
        2 => {
            if rng.gen_bool(0.3) {
                b[0][1] = LaurentPoly::constant(nonzero(ctx, rng));
                b[1][0] = LaurentPoly::constant(nonzero(ctx, rng));
            } else {
                b[0][0] = LaurentPoly::constant(nonzero(ctx, rng));
                b[1][1] = LaurentPoly::constant(nonzero(ctx, rng));
                if rng.gen_bool(0.5) {
                    let (i, j) = if rng.gen_bool(0.5) { (0, 1) } else { (1, 0) };
                    b[i][j] = mono(ctx, rng, (0, ranges.off.1.max(0)));
                }
            }
        }
        _ => {}
    }
    if m == 1 && s == 1 && rng.gen_bool(0.6) {
        b[0][1] = mono(ctx, rng, ranges.off);
    }
    LocalUnitModule::from_exact(ctx, m, s, &LMat::from_rows(ctx, b)).expect("well-formed")
}
