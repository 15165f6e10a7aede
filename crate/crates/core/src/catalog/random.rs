//! Random catalog specifications.

use rand::seq::SliceRandom;
use rand::Rng;

use super::{element_label, SheafSpec, TwistSpec};
use crate::arith::{FieldCtx, Poly};

fn random_places<R: Rng>(ctx: &FieldCtx, rng: &mut R, k: usize) -> Vec<String> {
    let mut all: Vec<String> = ctx.elements().map(|a| element_label(&a)).collect();
    all.push("inf".into());
    all.shuffle(rng);
    all.truncate(k);
    all
}

/// A square-free polynomial of degree `deg` over `F_{p^r}`.
pub fn random_cover_poly<R: Rng>(ctx: &FieldCtx, rng: &mut R, deg: usize) -> Poly {
    let size = ctx.size().expect("small field");
    loop {
        let mut c: Vec<_> = (0..deg).map(|_| ctx.from_index(rng.gen_range(0..size))).collect();
        c.push(ctx.from_index(rng.gen_range(1..size)));
        let f = Poly::new(ctx.clone(), c);
        if f.is_squarefree() {
            return f;
        }
    }
}

/// One catalog summand: constant, extension by zero, a double cover of
/// genus at most one, or a rank-one twist.
pub fn random_summand<R: Rng>(p: u64, r: u32, rng: &mut R) -> SheafSpec {
    let ctx = FieldCtx::new(p, r, 1).expect("valid field");
    let q = ctx.q() as i64;
    match rng.gen_range(0..4) {
        0 => SheafSpec::Constant { rank: rng.gen_range(1..=2) },
        1 => {
            let k = rng.gen_range(1..=3);
            SheafSpec::Shriek { rank: rng.gen_range(1..=2), punctures: random_places(&ctx, rng, k) }
        }
        2 => {
            let deg = rng.gen_range(1..=4);
            let f = random_cover_poly(&ctx, rng, deg);
            SheafSpec::TameCover { f: super::poly_label(&f) }
        }
        _ => {
            let k = rng.gen_range(1..=3);
            let places = random_places(&ctx, rng, k);
            let mut ds: Vec<i64> = (0..k).map(|_| rng.gen_range(-(q - 1)..2 * (q - 1))).collect();
            // make the sum divisible by q - 1
            let s: i64 = ds.iter().sum();
            ds[0] -= s.rem_euclid(q - 1);
            SheafSpec::Rank1Twist {
                twists: places.into_iter().zip(ds).map(|(place, d)| TwistSpec { place, d }).collect(),
            }
        }
    }
}

/// A direct sum of two or three random summands.
pub fn random_direct_sum<R: Rng>(p: u64, r: u32, rng: &mut R) -> SheafSpec {
    let k = rng.gen_range(2..=3);
    SheafSpec::DirectSum { summands: (0..k).map(|_| random_summand(p, r, rng)).collect() }
}
