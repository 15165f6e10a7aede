//! Sheaf specifications on P^1 and their unit-module duals.

mod build;
pub mod random;

use std::fmt;

use serde::{Deserialize, Serialize};

use crate::arith::parse::{parse_element, parse_poly};
use crate::arith::{FieldCtx, FieldElement, Poly};
use crate::error::{Error, Result};

pub use build::{global_dual_of_sheaf, local_dual_of_sheaf, localize, work_field, GlobalUnitModule, LocalData};

/// A closed point of P^1 over the working field.
#[derive(Clone, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum Place {
    Finite(FieldElement),
    Infinity,
}

impl fmt::Display for Place {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Place::Finite(a) => write!(f, "{}", element_label(a)),
            Place::Infinity => write!(f, "inf"),
        }
    }
}

/// `a` as an integer when it lies in the prime field, else as `g^k` for the
/// generator `g` of its field.
pub fn element_label(a: &FieldElement) -> String {
    if let Some(v) = a.as_prime() {
        return v.to_string();
    }
    let g = a.ctx().generator().expect("small field");
    let mut cur = g.clone();
    let mut k = 1u128;
    while &cur != a {
        cur = &cur * &g;
        k += 1;
    }
    format!("g^{k}")
}

/// A polynomial in `x` written in the syntax accepted by [`parse_poly`].
pub fn poly_label(f: &Poly) -> String {
    if f.is_zero() {
        return "0".into();
    }
    let mut out = Vec::new();
    for (i, c) in f.coeffs().iter().enumerate().rev() {
        if c.is_zero() {
            continue;
        }
        out.push(match i {
            0 => element_label(c),
            1 => format!("{}*x", element_label(c)),
            _ => format!("{}*x^{i}", element_label(c)),
        });
    }
    out.join(" + ")
}

/// A prescribed twist at one place of a rank-one module.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct TwistSpec {
    pub place: String,
    pub d: i64,
}

/// Constructible sheaves in the catalog. Places are written as elements of
/// `F_{p^r}` (`g^k`, integers) or `"inf"`; polynomials are in `x` over
/// `F_{p^r}`.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "kebab-case", deny_unknown_fields)]
pub enum SheafSpec {
    /// The constant sheaf of rank `rank`.
    Constant { rank: usize },
    /// Extension by zero of the constant sheaf off `punctures`.
    Shriek { rank: usize, punctures: Vec<String> },
    /// Pushforward of the constant sheaf along `y^2 = f(x)`.
    TameCover { f: String },
    DirectSum { summands: Vec<SheafSpec> },
    /// Rank one, with the local module `K e`, `F e = t^d e` at each listed
    /// place.
    Rank1Twist { twists: Vec<TwistSpec> },
}

pub(crate) fn base_ctx(p: u64, r: u32) -> Result<FieldCtx> {
    FieldCtx::new(p, r, 1)
}

pub(crate) fn parse_place(s: &str, ctx: &FieldCtx) -> Result<Option<FieldElement>> {
    if s.trim() == "inf" {
        Ok(None)
    } else {
        parse_element(s, ctx).map(Some)
    }
}

fn place_label(a: Option<&FieldElement>) -> String {
    a.map_or_else(|| "inf".to_string(), element_label)
}

/// `x -> 1/x` on places.
fn swap_place(s: &str, ctx: &FieldCtx) -> Result<String> {
    Ok(match parse_place(s, ctx)? {
        None => "0".into(),
        Some(a) if a.is_zero() => "inf".into(),
        Some(a) => place_label(Some(&a.inv().unwrap())),
    })
}

/// Parse a cover polynomial, which must be nonconstant and square-free.
pub fn cover_poly(f: &str, ctx: &FieldCtx) -> Result<Poly> {
    let poly = parse_poly(f, ctx)?;
    match poly.deg() {
        None | Some(0) => Err(Error::InvalidInput(format!("cover polynomial {f:?} must be nonconstant"))),
        _ if !poly.is_squarefree() => Err(Error::Degenerate(format!("{f} is not square-free"))),
        _ => Ok(poly),
    }
}

impl SheafSpec {
    /// Generic rank.
    pub fn rank(&self) -> usize {
        match self {
            SheafSpec::Constant { rank } | SheafSpec::Shriek { rank, .. } => *rank,
            SheafSpec::TameCover { .. } => 2,
            SheafSpec::DirectSum { summands } => summands.iter().map(|s| s.rank()).sum(),
            SheafSpec::Rank1Twist { .. } => 1,
        }
    }

    /// The genus of the cover for `TameCover`, 0 for sheaves on P^1 itself.
    pub fn genus_target(&self, p: u64, r: u32) -> Result<Option<u64>> {
        Ok(match self {
            SheafSpec::TameCover { f } => {
                let d = cover_poly(f, &base_ctx(p, r)?)?.deg().unwrap() as u64;
                Some(d.div_ceil(2) - 1)
            }
            SheafSpec::DirectSum { .. } => None,
            _ => Some(0),
        })
    }

    /// The same sheaf after the coordinate change `x -> 1/x`.
    pub fn swap(&self, p: u64, r: u32) -> Result<SheafSpec> {
        let ctx = base_ctx(p, r)?;
        Ok(match self {
            SheafSpec::Constant { .. } => self.clone(),
            SheafSpec::Shriek { rank, punctures } => SheafSpec::Shriek {
                rank: *rank,
                punctures: punctures.iter().map(|s| swap_place(s, &ctx)).collect::<Result<_>>()?,
            },
            SheafSpec::TameCover { f } => {
                let poly = cover_poly(f, &ctx)?;
                let d = poly.deg().unwrap();
                SheafSpec::TameCover { f: poly_label(&poly.reverse(d.div_ceil(2) * 2)) }
            }
            SheafSpec::DirectSum { summands } => SheafSpec::DirectSum {
                summands: summands.iter().map(|s| s.swap(p, r)).collect::<Result<_>>()?,
            },
            SheafSpec::Rank1Twist { twists } => SheafSpec::Rank1Twist {
                twists: twists
                    .iter()
                    .map(|t| Ok(TwistSpec { place: swap_place(&t.place, &ctx)?, d: t.d }))
                    .collect::<Result<_>>()?,
            },
        })
    }

    /// Builds `y^2 = f(x)` in the catalog's string syntax.
    pub fn tame_cover(f: &str) -> SheafSpec {
        SheafSpec::TameCover { f: f.to_string() }
    }
}
