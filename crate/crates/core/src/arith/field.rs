//! Finite fields `F_{p^(r*e)}` presented as `F_p[x]/(m)` with a deterministic
//! modulus, together with the `q = p^r` Frobenius twist used throughout the
//! crate.

use std::cmp::Ordering;
use std::fmt;
use std::ops::{Add, AddAssign, Mul, MulAssign, Neg, Sub, SubAssign};
use std::sync::{Arc, OnceLock};

use smallvec::SmallVec;

use super::fp::{self, FpPoly};
use crate::error::{Error, Result};

type Coeffs = SmallVec<[u64; 4]>;

struct Inner {
    p: u64,
    r: u32,
    e: u32,
    deg: usize,
    modulus: FpPoly,
    /// Columns of the F_p-linear map `a -> a^p`.
    frob_cols: OnceLock<Vec<Coeffs>>,
    generator: OnceLock<std::result::Result<FieldElement, String>>,
}

/// Context for the field `F_{q'}` with `q' = p^(r*e)`. The twist exponent is
/// `q = p^r`; `e` is the extension degree over `F_q`.
#[derive(Clone)]
pub struct FieldCtx(Arc<Inner>);

impl fmt::Debug for FieldCtx {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "F_{{{}^{}}}(q={}^{})", self.p(), self.degree(), self.p(), self.r())
    }
}

impl PartialEq for FieldCtx {
    fn eq(&self, other: &Self) -> bool {
        Arc::ptr_eq(&self.0, &other.0)
            || (self.0.p == other.0.p && self.0.r == other.0.r && self.0.e == other.0.e)
    }
}
impl Eq for FieldCtx {}

impl std::hash::Hash for FieldCtx {
    fn hash<H: std::hash::Hasher>(&self, state: &mut H) {
        (self.p(), self.r(), self.e()).hash(state)
    }
}

impl FieldCtx {
    pub fn new(p: u64, r: u32, e: u32) -> Result<Self> {
        if !fp::is_prime(p) {
            return Err(Error::InvalidInput(format!("{p} is not prime")));
        }
        if p >= 1 << 31 {
            return Err(Error::InvalidInput(format!("prime {p} too large")));
        }
        if r == 0 || e == 0 {
            return Err(Error::InvalidInput("r and e must be positive".into()));
        }
        let deg = (r * e) as usize;
        let modulus = fp::smallest_irreducible(deg, p);
        Ok(FieldCtx(Arc::new(Inner {
            p,
            r,
            e,
            deg,
            modulus,
            frob_cols: OnceLock::new(),
            generator: OnceLock::new(),
        })))
    }

    pub fn p(&self) -> u64 {
        self.0.p
    }
    pub fn r(&self) -> u32 {
        self.0.r
    }
    pub fn e(&self) -> u32 {
        self.0.e
    }
    /// Degree of the field over `F_p`.
    pub fn degree(&self) -> usize {
        self.0.deg
    }
    pub fn modulus(&self) -> &[u64] {
        &self.0.modulus
    }
    /// The twist `q = p^r`.
    pub fn q(&self) -> u64 {
        self.0.p.pow(self.0.r)
    }
    /// Field size `p^(r e)`, when it fits.
    pub fn size(&self) -> Option<u128> {
        (self.0.p as u128).checked_pow(self.0.deg as u32)
    }

    /// The same twist over an extension of degree `factor` of this field.
    pub fn extend(&self, factor: u32) -> Result<FieldCtx> {
        FieldCtx::new(self.p(), self.r(), self.e() * factor)
    }

    pub fn zero(&self) -> FieldElement {
        FieldElement {
            ctx: self.clone(),
            c: SmallVec::from_elem(0, self.degree()),
        }
    }
    pub fn one(&self) -> FieldElement {
        self.from_int(1)
    }
    pub fn from_int(&self, v: i64) -> FieldElement {
        let mut z = self.zero();
        z.c[0] = v.rem_euclid(self.p() as i64) as u64;
        z
    }
    /// The class of `x` in `F_p[x]/(m)`.
    pub fn x(&self) -> FieldElement {
        if self.degree() == 1 {
            // x = -m_0
            return self.from_int(-(self.0.modulus[0] as i64));
        }
        let mut z = self.zero();
        z.c[1] = 1;
        z
    }

    pub fn from_coeffs(&self, coeffs: &[u64]) -> FieldElement {
        let mut z = self.zero();
        for (i, &c) in coeffs.iter().enumerate().take(self.degree()) {
            z.c[i] = c % self.p();
        }
        z
    }

    /// Element with integer index `sum c_i p^i`; the inverse of
    /// [`FieldElement::index`].
    pub fn from_index(&self, mut idx: u128) -> FieldElement {
        let mut z = self.zero();
        for i in 0..self.degree() {
            z.c[i] = (idx % self.p() as u128) as u64;
            idx /= self.p() as u128;
        }
        z
    }

    /// All field elements in index order. Only sensible for small fields.
    pub fn elements(&self) -> impl Iterator<Item = FieldElement> + '_ {
        let n = self.size().expect("field too large to enumerate");
        (0..n).map(move |i| self.from_index(i))
    }

    /// The documented generator `g`: the smallest element (in index order)
    /// that generates the multiplicative group.
    pub fn generator(&self) -> Result<FieldElement> {
        self.0
            .generator
            .get_or_init(|| {
                let size = self.size().ok_or("field too large")?;
                let order = size - 1;
                let primes = fp::prime_factors(order).ok_or("cannot factor group order")?;
                for idx in 1..size {
                    let a = self.from_index(idx);
                    if primes.iter().all(|&l| !a.pow(order / l).is_one()) {
                        return Ok(a);
                    }
                }
                Err("no generator found".to_string())
            })
            .clone()
            .map_err(Error::InvalidInput)
    }

    fn frob_cols(&self) -> &Vec<Coeffs> {
        self.0.frob_cols.get_or_init(|| {
            let d = self.degree();
            let xp = self.x().pow(self.p() as u128);
            let mut cols = Vec::with_capacity(d);
            let mut cur = self.one();
            for _ in 0..d {
                cols.push(cur.c.clone());
                cur = &cur * &xp;
            }
            cols
        })
    }
}

#[derive(Clone)]
pub struct FieldElement {
    ctx: FieldCtx,
    c: Coeffs,
}

impl FieldElement {
    pub fn ctx(&self) -> &FieldCtx {
        &self.ctx
    }
    pub fn coeffs(&self) -> &[u64] {
        &self.c
    }
    pub fn is_zero(&self) -> bool {
        self.c.iter().all(|&v| v == 0)
    }
    pub fn is_one(&self) -> bool {
        self.c[0] == 1 && self.c[1..].iter().all(|&v| v == 0)
    }
    /// `Some(v)` when the element lies in the prime field.
    pub fn as_prime(&self) -> Option<u64> {
        if self.c[1..].iter().all(|&v| v == 0) {
            Some(self.c[0])
        } else {
            None
        }
    }
    pub fn index(&self) -> u128 {
        self.c
            .iter()
            .rev()
            .fold(0u128, |acc, &v| acc * self.ctx.p() as u128 + v as u128)
    }

    pub fn pow(&self, mut e: u128) -> FieldElement {
        let mut acc = self.ctx.one();
        let mut b = self.clone();
        while e > 0 {
            if e & 1 == 1 {
                acc = &acc * &b;
            }
            b = &b * &b;
            e >>= 1;
        }
        acc
    }

    pub fn inv(&self) -> Option<FieldElement> {
        if self.is_zero() {
            return None;
        }
        let p = self.ctx.p();
        if self.ctx.degree() == 1 {
            return Some(self.ctx.from_int(fp::inv(self.c[0], p) as i64));
        }
        let mut a: FpPoly = self.c.to_vec();
        fp::poly_trim(&mut a);
        let inv = fp::poly_inv_mod(&a, &self.ctx.0.modulus, p);
        Some(self.ctx.from_coeffs(&inv))
    }

    /// `a^(p^k)`; `k` is taken modulo the field degree.
    pub fn frobenius_p(&self, k: usize) -> FieldElement {
        let d = self.ctx.degree();
        let k = k % d;
        if d == 1 || k == 0 {
            return self.clone();
        }
        let cols = self.ctx.frob_cols();
        let p = self.ctx.p();
        let mut cur = self.c.clone();
        for _ in 0..k {
            let mut next: Coeffs = SmallVec::from_elem(0, d);
            for (j, &cj) in cur.iter().enumerate() {
                if cj == 0 {
                    continue;
                }
                for i in 0..d {
                    next[i] = fp::add(next[i], fp::mul(cj, cols[j][i], p), p);
                }
            }
            cur = next;
        }
        FieldElement {
            ctx: self.ctx.clone(),
            c: cur,
        }
    }

    /// The twist `a -> a^q`, `q = p^r`.
    pub fn frobenius(&self) -> FieldElement {
        self.frobenius_p(self.ctx.r() as usize)
    }

    /// The inverse twist `a -> a^(1/q)`.
    pub fn frobenius_inv(&self) -> FieldElement {
        let d = self.ctx.degree();
        let r = self.ctx.r() as usize % d;
        self.frobenius_p((d - r) % d)
    }

    /// Absolute trace to `F_p`.
    pub fn trace(&self) -> u64 {
        let p = self.ctx.p();
        (0..self.ctx.degree()).fold(0, |acc, k| fp::add(acc, self.frobenius_p(k).c[0], p))
    }

    fn check(&self, other: &FieldElement) {
        debug_assert!(self.ctx == other.ctx, "mixed field contexts");
    }
}

impl PartialEq for FieldElement {
    fn eq(&self, other: &Self) -> bool {
        self.c == other.c
    }
}
impl Eq for FieldElement {}

impl std::hash::Hash for FieldElement {
    fn hash<H: std::hash::Hasher>(&self, state: &mut H) {
        self.c.hash(state)
    }
}

impl PartialOrd for FieldElement {
    fn partial_cmp(&self, other: &Self) -> Option<Ordering> {
        Some(self.cmp(other))
    }
}
/// Index order: compare coefficient vectors from the top coefficient down.
impl Ord for FieldElement {
    fn cmp(&self, other: &Self) -> Ordering {
        self.c.iter().rev().cmp(other.c.iter().rev())
    }
}

impl fmt::Debug for FieldElement {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{self}")
    }
}

impl fmt::Display for FieldElement {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if let Some(v) = self.as_prime() {
            return write!(f, "{v}");
        }
        let mut first = true;
        for (i, &c) in self.c.iter().enumerate().rev() {
            if c == 0 {
                continue;
            }
            if !first {
                write!(f, "+")?;
            }
            first = false;
            match (i, c) {
                (0, _) => write!(f, "{c}")?,
                (1, 1) => write!(f, "x")?,
                (1, _) => write!(f, "{c}*x")?,
                (_, 1) => write!(f, "x^{i}")?,
                _ => write!(f, "{c}*x^{i}")?,
            }
        }
        Ok(())
    }
}

impl<'a> Add<&'a FieldElement> for &'a FieldElement {
    type Output = FieldElement;
    fn add(self, rhs: &FieldElement) -> FieldElement {
        self.check(rhs);
        let p = self.ctx.p();
        FieldElement {
            ctx: self.ctx.clone(),
            c: self.c.iter().zip(&rhs.c).map(|(&a, &b)| fp::add(a, b, p)).collect(),
        }
    }
}

impl<'a> Sub<&'a FieldElement> for &'a FieldElement {
    type Output = FieldElement;
    fn sub(self, rhs: &FieldElement) -> FieldElement {
        self.check(rhs);
        let p = self.ctx.p();
        FieldElement {
            ctx: self.ctx.clone(),
            c: self.c.iter().zip(&rhs.c).map(|(&a, &b)| fp::sub(a, b, p)).collect(),
        }
    }
}

impl<'a> Mul<&'a FieldElement> for &'a FieldElement {
    type Output = FieldElement;
    fn mul(self, rhs: &FieldElement) -> FieldElement {
        self.check(rhs);
        let p = self.ctx.p();
        let d = self.ctx.degree();
        if d == 1 {
            return FieldElement {
                ctx: self.ctx.clone(),
                c: smallvec::smallvec![fp::mul(self.c[0], rhs.c[0], p)],
            };
        }
        let mut t = vec![0u64; 2 * d - 1];
        for (i, &a) in self.c.iter().enumerate() {
            if a == 0 {
                continue;
            }
            for (j, &b) in rhs.c.iter().enumerate() {
                t[i + j] = fp::add(t[i + j], fp::mul(a, b, p), p);
            }
        }
        let m = &self.ctx.0.modulus;
        for i in (d..2 * d - 1).rev() {
            let top = t[i];
            if top == 0 {
                continue;
            }
            for j in 0..d {
                t[i - d + j] = fp::sub(t[i - d + j], fp::mul(top, m[j], p), p);
            }
            t[i] = 0;
        }
        FieldElement {
            ctx: self.ctx.clone(),
            c: t[..d].iter().copied().collect(),
        }
    }
}

impl Neg for &FieldElement {
    type Output = FieldElement;
    fn neg(self) -> FieldElement {
        let p = self.ctx.p();
        FieldElement {
            ctx: self.ctx.clone(),
            c: self.c.iter().map(|&a| fp::sub(0, a, p)).collect(),
        }
    }
}

macro_rules! forward_owned {
    ($tr:ident, $m:ident) => {
        impl $tr<FieldElement> for FieldElement {
            type Output = FieldElement;
            fn $m(self, rhs: FieldElement) -> FieldElement {
                (&self).$m(&rhs)
            }
        }
        impl<'a> $tr<&'a FieldElement> for FieldElement {
            type Output = FieldElement;
            fn $m(self, rhs: &FieldElement) -> FieldElement {
                (&self).$m(rhs)
            }
        }
    };
}
forward_owned!(Add, add);
forward_owned!(Sub, sub);
forward_owned!(Mul, mul);

impl Neg for FieldElement {
    type Output = FieldElement;
    fn neg(self) -> FieldElement {
        -&self
    }
}

impl AddAssign<&FieldElement> for FieldElement {
    fn add_assign(&mut self, rhs: &FieldElement) {
        let p = self.ctx.p();
        for (a, &b) in self.c.iter_mut().zip(&rhs.c) {
            *a = fp::add(*a, b, p);
        }
    }
}
impl SubAssign<&FieldElement> for FieldElement {
    fn sub_assign(&mut self, rhs: &FieldElement) {
        let p = self.ctx.p();
        for (a, &b) in self.c.iter_mut().zip(&rhs.c) {
            *a = fp::sub(*a, b, p);
        }
    }
}
impl MulAssign<&FieldElement> for FieldElement {
    fn mul_assign(&mut self, rhs: &FieldElement) {
        *self = &*self * rhs;
    }
}

/// Embedding of a subfield context into an extension context with the same
/// `p` and `r`: `x` of the small field is sent to a fixed root of its modulus.
#[derive(Clone, Debug)]
pub struct Embedding {
    src: FieldCtx,
    dst: FieldCtx,
    powers: Vec<FieldElement>,
}

impl Embedding {
    pub fn new(src: &FieldCtx, dst: &FieldCtx) -> Result<Self> {
        if src.p() != dst.p() || src.r() != dst.r() || !dst.degree().is_multiple_of(src.degree()) {
            return Err(Error::InvalidInput(format!(
                "{src:?} does not embed in {dst:?}"
            )));
        }
        let image = if src.degree() == 1 {
            dst.one()
        } else if src == dst {
            dst.x()
        } else {
            let m = super::poly::Poly::new(
                dst.clone(),
                src.modulus().iter().map(|&c| dst.from_int(c as i64)).collect(),
            );
            let mut roots = m.roots();
            roots.sort();
            roots.into_iter().next().ok_or_else(|| {
                Error::InvalidInput("modulus has no root in the extension".into())
            })?
        };
        let mut powers = Vec::with_capacity(src.degree());
        let mut cur = dst.one();
        for _ in 0..src.degree() {
            powers.push(cur.clone());
            cur = &cur * &image;
        }
        Ok(Embedding {
            src: src.clone(),
            dst: dst.clone(),
            powers,
        })
    }

    pub fn src(&self) -> &FieldCtx {
        &self.src
    }
    pub fn dst(&self) -> &FieldCtx {
        &self.dst
    }

    pub fn map(&self, a: &FieldElement) -> FieldElement {
        if self.src.degree() == 1 {
            return self.dst.from_int(a.c[0] as i64);
        }
        let mut acc = self.dst.zero();
        for (i, &c) in a.c.iter().enumerate() {
            if c != 0 {
                acc += &(&self.powers[i] * &self.dst.from_int(c as i64));
            }
        }
        acc
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn field_axioms_small() {
        let k = FieldCtx::new(5, 2, 1).unwrap();
        for a in k.elements() {
            if !a.is_zero() {
                assert!((&a * &a.inv().unwrap()).is_one());
            }
            assert_eq!(a.pow(25), a);
            assert_eq!(a.frobenius().frobenius_inv(), a);
            assert_eq!(a.frobenius(), a.pow(25));
            assert_eq!(a.frobenius_p(1), a.pow(5));
        }
    }

    #[test]
    fn generator_is_primitive() {
        let k = FieldCtx::new(7, 1, 1).unwrap();
        assert_eq!(k.generator().unwrap().as_prime(), Some(3));
        let k = FieldCtx::new(5, 2, 1).unwrap();
        let g = k.generator().unwrap();
        let mut seen = std::collections::HashSet::new();
        let mut cur = k.one();
        for _ in 0..24 {
            seen.insert(cur.clone());
            cur = &cur * &g;
        }
        assert_eq!(seen.len(), 24);
    }

    #[test]
    fn embedding_is_a_ring_map() {
        let small = FieldCtx::new(5, 2, 1).unwrap();
        let big = small.extend(3).unwrap();
        let emb = Embedding::new(&small, &big).unwrap();
        let g = small.generator().unwrap();
        let h = &g + &small.from_int(3);
        assert_eq!(emb.map(&(&g * &h)), &emb.map(&g) * &emb.map(&h));
        assert_eq!(emb.map(&(&g + &h)), &emb.map(&g) + &emb.map(&h));
        assert_eq!(emb.map(&g).frobenius(), emb.map(&g.frobenius()));
    }

    #[test]
    fn deterministic_modulus() {
        let a = FieldCtx::new(7, 2, 2).unwrap();
        let b = FieldCtx::new(7, 2, 2).unwrap();
        assert_eq!(a.modulus(), b.modulus());
        assert!(fp::is_irreducible(&a.modulus().to_vec(), 7));
    }
}
