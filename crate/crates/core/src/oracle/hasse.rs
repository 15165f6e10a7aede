//! Hasse invariant of genus-one double covers `y^2 = f(x)`.

use serde::Serialize;

use crate::arith::{FieldElement, Poly};
use crate::error::{Error, Result};

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
#[serde(rename_all = "kebab-case")]
pub enum Reduction {
    Ordinary,
    Supersingular,
}

impl Reduction {
    pub fn p_rank(self) -> u32 {
        match self {
            Reduction::Ordinary => 1,
            Reduction::Supersingular => 0,
        }
    }
}

/// The coefficient of `x^(p-1)` in `f^((p-1)/2)`.
pub fn hasse_invariant(f: &Poly) -> Result<FieldElement> {
    let p = f.ctx().p();
    if p < 5 {
        return Err(Error::InvalidInput(format!("Hasse criterion needs p >= 5, got {p}")));
    }
    match f.deg() {
        Some(3) | Some(4) => {}
        d => return Err(Error::InvalidInput(format!("expected a cubic or quartic, got degree {d:?}"))),
    }
    if !f.is_squarefree() {
        return Err(Error::Degenerate(format!("{f:?} is not square-free")));
    }
    Ok(f.pow((p - 1) / 2).coeff(p as usize - 1))
}

pub fn hasse_witt_genus1(f: &Poly) -> Result<Reduction> {
    Ok(if hasse_invariant(f)?.is_zero() { Reduction::Supersingular } else { Reduction::Ordinary })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::arith::FieldCtx;

    #[test]
    fn classical_cases() {
        let k5 = FieldCtx::new(5, 1, 1).unwrap();
        let k7 = FieldCtx::new(7, 1, 1).unwrap();
        let cube_plus_one = |k: &FieldCtx| Poly::from_ints(k, &[1, 0, 0, 1]);
        assert_eq!(hasse_witt_genus1(&cube_plus_one(&k5)).unwrap(), Reduction::Supersingular);
        let f = Poly::from_ints(&k5, &[0, 1, 0, 1]);
        assert_eq!(hasse_invariant(&f).unwrap().as_prime(), Some(2));
        assert_eq!(hasse_witt_genus1(&cube_plus_one(&k7)).unwrap(), Reduction::Ordinary);
        assert_eq!(hasse_invariant(&cube_plus_one(&k7)).unwrap().as_prime(), Some(3));
        let sq = Poly::from_ints(&k5, &[0, 0, 1, 1]);
        assert!(matches!(hasse_witt_genus1(&sq), Err(Error::Degenerate(_))));
    }
}
