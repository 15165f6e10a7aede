//! Euler characteristics of catalog sheaves from their topology alone.

use serde::Serialize;

use super::hasse::hasse_witt_genus1;
use crate::catalog::{cover_poly, SheafSpec};
use crate::arith::FieldCtx;
use crate::error::{Error, Result};

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct OracleReport {
    pub chi_top: i64,
    /// p-rank of the cover, for genus-one covers only.
    pub p_rank: Option<u32>,
    /// How each number was obtained.
    pub details: Vec<String>,
}

fn walk(spec: &SheafSpec, ctx: &FieldCtx, out: &mut OracleReport) -> Result<i64> {
    match spec {
        SheafSpec::Constant { rank } => {
            out.details.push(format!("constant rank {rank}: chi = {rank}"));
            Ok(*rank as i64)
        }
        SheafSpec::Shriek { rank, punctures } => {
            let m = punctures.len() as i64;
            // 0 -> j_! F -> F -> (skyscrapers at the punctures) -> 0
            let chi = *rank as i64 * (1 - m);
            out.details.push(format!("extension by zero, rank {rank}, {m} punctures: chi = {chi}"));
            Ok(chi)
        }
        SheafSpec::TameCover { f } => {
            let poly = cover_poly(f, ctx)?;
            let deg = poly.deg().unwrap();
            match deg {
                1 | 2 => {
                    out.details.push(format!("y^2 = {f} has genus 0: chi = 1"));
                    Ok(1)
                }
                3 | 4 => {
                    let red = hasse_witt_genus1(&poly)?;
                    let pr = red.p_rank();
                    out.p_rank = Some(pr);
                    out.details.push(format!("y^2 = {f} is {red:?} (Hasse invariant): chi = {}", 1 - pr as i64));
                    Ok(1 - pr as i64)
                }
                _ => Err(Error::UnsupportedVariant(format!("no p-rank oracle for genus {}", deg.div_ceil(2) - 1))),
            }
        }
        SheafSpec::DirectSum { summands } => summands.iter().map(|s| walk(s, ctx, out)).sum(),
        SheafSpec::Rank1Twist { .. } => Err(Error::UnsupportedVariant("no topological oracle for rank-one twists".into())),
    }
}

/// `chi(P^1, sheaf)` without any unit-module computation.
pub fn chi_topological(spec: &SheafSpec, p: u64, r: u32) -> Result<OracleReport> {
    let ctx = FieldCtx::new(p, r, 1)?;
    let mut out = OracleReport { chi_top: 0, p_rank: None, details: Vec::new() };
    out.chi_top = walk(spec, &ctx, &mut out)?;
    Ok(out)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn examples() {
        let s = SheafSpec::Shriek { rank: 2, punctures: vec!["0".into(), "inf".into()] };
        assert_eq!(chi_topological(&s, 5, 1).unwrap().chi_top, -2);
        assert_eq!(chi_topological(&SheafSpec::Constant { rank: 3 }, 5, 1).unwrap().chi_top, 3);
        let ss = chi_topological(&SheafSpec::tame_cover("x^3 + 1"), 5, 1).unwrap();
        assert_eq!((ss.chi_top, ss.p_rank), (1, Some(0)));
        let ord = chi_topological(&SheafSpec::tame_cover("x^3 + x"), 5, 1).unwrap();
        assert_eq!((ord.chi_top, ord.p_rank), (0, Some(1)));
    }
}
