//! Dense univariate polynomials over a [`FieldCtx`].

use std::fmt;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use super::field::{FieldCtx, FieldElement};

#[derive(Clone, PartialEq, Eq)]
pub struct Poly {
    ctx: FieldCtx,
    /// Coefficients, lowest degree first, no trailing zeros.
    c: Vec<FieldElement>,
}

impl fmt::Debug for Poly {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{self}")
    }
}

impl fmt::Display for Poly {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.is_zero() {
            return write!(f, "0");
        }
        let mut first = true;
        for (i, c) in self.c.iter().enumerate().rev() {
            if c.is_zero() {
                continue;
            }
            if !first {
                write!(f, " + ")?;
            }
            first = false;
            let coef = if c.as_prime().is_some() {
                c.to_string()
            } else {
                format!("({c})")
            };
            match i {
                0 => write!(f, "{coef}")?,
                _ if c.is_one() => write!(f, "x^{i}")?,
                _ => write!(f, "{coef}*x^{i}")?,
            }
        }
        Ok(())
    }
}

impl Poly {
    pub fn new(ctx: FieldCtx, mut c: Vec<FieldElement>) -> Self {
        while c.last().is_some_and(|v| v.is_zero()) {
            c.pop();
        }
        Poly { ctx, c }
    }
    pub fn zero(ctx: &FieldCtx) -> Self {
        Poly { ctx: ctx.clone(), c: Vec::new() }
    }
    pub fn constant(a: FieldElement) -> Self {
        let ctx = a.ctx().clone();
        Poly::new(ctx, vec![a])
    }
    pub fn one(ctx: &FieldCtx) -> Self {
        Poly::constant(ctx.one())
    }
    pub fn x(ctx: &FieldCtx) -> Self {
        Poly::monomial(ctx.one(), 1)
    }
    pub fn monomial(a: FieldElement, k: usize) -> Self {
        let ctx = a.ctx().clone();
        let mut c = vec![ctx.zero(); k];
        c.push(a);
        Poly::new(ctx, c)
    }
    /// `x - a`.
    pub fn linear(a: &FieldElement) -> Self {
        Poly::new(a.ctx().clone(), vec![-a, a.ctx().one()])
    }
    pub fn from_ints(ctx: &FieldCtx, c: &[i64]) -> Self {
        Poly::new(ctx.clone(), c.iter().map(|&v| ctx.from_int(v)).collect())
    }

    pub fn ctx(&self) -> &FieldCtx {
        &self.ctx
    }
    pub fn coeffs(&self) -> &[FieldElement] {
        &self.c
    }
    pub fn is_zero(&self) -> bool {
        self.c.is_empty()
    }
    pub fn deg(&self) -> Option<usize> {
        self.c.len().checked_sub(1)
    }
    /// Degree with `deg 0 = -1`, convenient for degree arithmetic.
    pub fn degree_i(&self) -> i64 {
        self.c.len() as i64 - 1
    }
    pub fn coeff(&self, i: usize) -> FieldElement {
        self.c.get(i).cloned().unwrap_or_else(|| self.ctx.zero())
    }
    pub fn lc(&self) -> FieldElement {
        self.c.last().cloned().unwrap_or_else(|| self.ctx.zero())
    }
    /// Lowest exponent with a nonzero coefficient.
    pub fn valuation(&self) -> Option<usize> {
        self.c.iter().position(|v| !v.is_zero())
    }

    pub fn add(&self, o: &Poly) -> Poly {
        let n = self.c.len().max(o.c.len());
        let c = (0..n).map(|i| &self.coeff(i) + &o.coeff(i)).collect();
        Poly::new(self.ctx.clone(), c)
    }
    pub fn sub(&self, o: &Poly) -> Poly {
        let n = self.c.len().max(o.c.len());
        let c = (0..n).map(|i| &self.coeff(i) - &o.coeff(i)).collect();
        Poly::new(self.ctx.clone(), c)
    }
    pub fn neg(&self) -> Poly {
        Poly::new(self.ctx.clone(), self.c.iter().map(|v| -v).collect())
    }
    pub fn scale(&self, a: &FieldElement) -> Poly {
        Poly::new(self.ctx.clone(), self.c.iter().map(|v| v * a).collect())
    }
    /// Multiply by `x^k`.
    pub fn shift(&self, k: usize) -> Poly {
        if self.is_zero() {
            return self.clone();
        }
        let mut c = vec![self.ctx.zero(); k];
        c.extend(self.c.iter().cloned());
        Poly { ctx: self.ctx.clone(), c }
    }
    pub fn mul(&self, o: &Poly) -> Poly {
        if self.is_zero() || o.is_zero() {
            return Poly::zero(&self.ctx);
        }
        let mut c = vec![self.ctx.zero(); self.c.len() + o.c.len() - 1];
        for (i, a) in self.c.iter().enumerate() {
            if a.is_zero() {
                continue;
            }
            for (j, b) in o.c.iter().enumerate() {
                c[i + j] += &(a * b);
            }
        }
        Poly::new(self.ctx.clone(), c)
    }
    pub fn pow(&self, mut e: u64) -> Poly {
        let mut acc = Poly::one(&self.ctx);
        let mut b = self.clone();
        while e > 0 {
            if e & 1 == 1 {
                acc = acc.mul(&b);
            }
            e >>= 1;
            if e > 0 {
                b = b.mul(&b);
            }
        }
        acc
    }

    /// Division with remainder. Panics on division by zero.
    pub fn divrem(&self, d: &Poly) -> (Poly, Poly) {
        assert!(!d.is_zero(), "polynomial division by zero");
        let dd = d.c.len() - 1;
        if self.c.len() <= dd {
            return (Poly::zero(&self.ctx), self.clone());
        }
        let inv = d.lc().inv().expect("nonzero leading coefficient");
        let mut r = self.c.clone();
        let mut q = vec![self.ctx.zero(); r.len() - dd];
        for i in (dd..r.len()).rev() {
            if r[i].is_zero() {
                continue;
            }
            let f = &r[i] * &inv;
            for (j, dj) in d.c.iter().enumerate() {
                let t = &f * dj;
                r[i - dd + j] -= &t;
            }
            q[i - dd] = f;
        }
        r.truncate(dd);
        (Poly::new(self.ctx.clone(), q), Poly::new(self.ctx.clone(), r))
    }
    pub fn rem(&self, d: &Poly) -> Poly {
        self.divrem(d).1
    }
    /// Exact quotient, `None` when `d` does not divide `self`.
    pub fn exact_div(&self, d: &Poly) -> Option<Poly> {
        let (q, r) = self.divrem(d);
        r.is_zero().then_some(q)
    }
    pub fn monic(&self) -> Poly {
        if self.is_zero() {
            return self.clone();
        }
        self.scale(&self.lc().inv().unwrap())
    }
    pub fn gcd(&self, o: &Poly) -> Poly {
        let (mut a, mut b) = (self.clone(), o.clone());
        while !b.is_zero() {
            let r = a.rem(&b);
            a = b;
            b = r;
        }
        a.monic()
    }
    pub fn mulmod(&self, o: &Poly, m: &Poly) -> Poly {
        self.mul(o).rem(m)
    }
    pub fn powmod(&self, mut e: u128, m: &Poly) -> Poly {
        let mut acc = Poly::one(&self.ctx).rem(m);
        let mut b = self.rem(m);
        while e > 0 {
            if e & 1 == 1 {
                acc = acc.mulmod(&b, m);
            }
            e >>= 1;
            if e > 0 {
                b = b.mulmod(&b, m);
            }
        }
        acc
    }

    pub fn eval(&self, x: &FieldElement) -> FieldElement {
        let mut acc = self.ctx.zero();
        for c in self.c.iter().rev() {
            acc = &(&acc * x) + c;
        }
        acc
    }
    pub fn derivative(&self) -> Poly {
        let c = self
            .c
            .iter()
            .enumerate()
            .skip(1)
            .map(|(i, v)| v * &self.ctx.from_int(i as i64))
            .collect();
        Poly::new(self.ctx.clone(), c)
    }
    /// `f(x + a)`, the Taylor shift recentring at `a`.
    pub fn taylor_shift(&self, a: &FieldElement) -> Poly {
        let lin = Poly::new(self.ctx.clone(), vec![a.clone(), self.ctx.one()]);
        let mut acc = Poly::zero(&self.ctx);
        for c in self.c.iter().rev() {
            acc = acc.mul(&lin).add(&Poly::constant(c.clone()));
        }
        acc
    }
    /// Reversal `x^k f(1/x)` for `k >= deg f`.
    pub fn reverse(&self, k: usize) -> Poly {
        assert!(self.c.len() <= k + 1);
        let mut c = vec![self.ctx.zero(); k + 1];
        for (i, v) in self.c.iter().enumerate() {
            c[k - i] = v.clone();
        }
        Poly::new(self.ctx.clone(), c)
    }
    /// The ring Frobenius `sum c_i x^i -> sum c_i^q x^(q i)`.
    pub fn frobenius(&self) -> Poly {
        let q = self.ctx.q() as usize;
        if self.is_zero() {
            return self.clone();
        }
        let mut c = vec![self.ctx.zero(); (self.c.len() - 1) * q + 1];
        for (i, v) in self.c.iter().enumerate() {
            c[i * q] = v.frobenius();
        }
        Poly::new(self.ctx.clone(), c)
    }
    /// Map coefficients into another field.
    pub fn map_coeffs(&self, ctx: &FieldCtx, f: impl Fn(&FieldElement) -> FieldElement) -> Poly {
        Poly::new(ctx.clone(), self.c.iter().map(f).collect())
    }

    pub fn is_squarefree(&self) -> bool {
        if self.is_zero() {
            return false;
        }
        let d = self.derivative();
        if d.is_zero() {
            return self.deg() == Some(0);
        }
        self.gcd(&d).deg() == Some(0)
    }

    /// Degree of the smallest extension of the current field over which the
    /// square-free polynomial `self` splits into linear factors.
    pub fn splitting_degree(&self) -> u64 {
        let x = Poly::x(&self.ctx);
        let mut f = self.monic();
        let mut k = 0u64;
        let mut lcm = 1u64;
        let mut xp = x.clone();
        while f.deg().unwrap_or(0) > 0 {
            k += 1;
            xp = xp.frobenius_mod(self.ctx.degree(), &f);
            let g = f.gcd(&xp.sub(&x));
            if g.deg().unwrap_or(0) > 0 {
                lcm = lcm / gcd_u64(lcm, k) * k;
                f = f.exact_div(&g).unwrap();
                xp = xp.rem(&f);
            }
        }
        lcm
    }

    /// `self^(p^k) mod m`, one `p`-th power at a time so that `p^k` never
    /// has to fit in an integer.
    pub fn frobenius_mod(&self, k: usize, m: &Poly) -> Poly {
        let p = self.ctx.p() as u128;
        (0..k).fold(self.rem(m), |acc, _| acc.powmod(p, m))
    }

    /// Distinct roots in the current field, sorted by index order.
    pub fn roots(&self) -> Vec<FieldElement> {
        if self.is_zero() {
            return Vec::new();
        }
        let x = Poly::x(&self.ctx);
        let f = self.monic();
        // product of the distinct linear factors
        let lin = f.gcd(&x.frobenius_mod(self.ctx.degree(), &f).sub(&x));
        let mut out = Vec::new();
        let mut rng = ChaCha8Rng::seed_from_u64(0x5eed);
        split_linear(&lin, &mut rng, &mut out);
        out.sort();
        out
    }
}

fn gcd_u64(a: u64, b: u64) -> u64 {
    if b == 0 {
        a
    } else {
        gcd_u64(b, a % b)
    }
}

/// Equal-degree splitting of a product of distinct linear factors.
fn split_linear(f: &Poly, rng: &mut ChaCha8Rng, out: &mut Vec<FieldElement>) {
    match f.deg() {
        None | Some(0) => return,
        Some(1) => {
            out.push(-&f.monic().coeff(0));
            return;
        }
        _ => {}
    }
    let ctx = f.ctx().clone();
    let p = ctx.p();
    let d = ctx.degree();
    loop {
        let coeffs: Vec<u64> = (0..d).map(|_| rng.gen_range(0..p)).collect();
        let a = ctx.from_coeffs(&coeffs);
        let base = Poly::new(ctx.clone(), vec![a, ctx.one()]);
        let g = if p == 2 {
            // absolute trace map
            let mut acc = base.rem(f);
            let mut cur = acc.clone();
            for _ in 1..d {
                cur = cur.mulmod(&cur, f);
                acc = acc.add(&cur);
            }
            acc
        } else {
            // (|K| - 1)/2 = (p - 1)/2 * (1 + p + ... + p^(d-1))
            let mut cur = base.rem(f);
            let mut norm = cur.clone();
            for _ in 1..d {
                cur = cur.powmod(p as u128, f);
                norm = norm.mulmod(&cur, f);
            }
            norm.powmod((p as u128 - 1) / 2, f).sub(&Poly::one(&ctx))
        };
        let h = f.gcd(&g);
        if let Some(hd) = h.deg() {
            if hd > 0 && hd < f.deg().unwrap() {
                let rest = f.exact_div(&h).unwrap();
                split_linear(&h, rng, out);
                split_linear(&rest, rng, out);
                return;
            }
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn divrem_roundtrip() {
        let k = FieldCtx::new(7, 1, 1).unwrap();
        let a = Poly::from_ints(&k, &[3, 0, 5, 1, 6]);
        let b = Poly::from_ints(&k, &[1, 2, 1]);
        let (q, r) = a.divrem(&b);
        assert_eq!(q.mul(&b).add(&r), a);
        assert!(r.deg().unwrap_or(0) < 2);
    }

    #[test]
    fn roots_past_u128() {
        // |F_{5^60}| does not fit in a u128
        let k = FieldCtx::new(5, 1, 60).unwrap();
        assert!(k.size().is_none());
        let f = Poly::from_ints(&k, &[-2, 0, 1]);
        let r = f.roots();
        assert_eq!(r.len(), 2);
        for a in &r {
            assert_eq!(&(a * a), &k.from_int(2));
        }
        assert_eq!(Poly::from_ints(&k, &[1, 1, 0, 1]).splitting_degree(), 1);
    }

    #[test]
    fn roots_of_cubic() {
        // x^3 + 1 over F_5 has the single root 4; over F_25 it splits.
        let k = FieldCtx::new(5, 1, 1).unwrap();
        let f = Poly::from_ints(&k, &[1, 0, 0, 1]);
        let r = f.roots();
        assert_eq!(r.len(), 1);
        assert_eq!(r[0].as_prime(), Some(4));
        assert_eq!(f.splitting_degree(), 2);
        let k2 = FieldCtx::new(5, 1, 2).unwrap();
        let f2 = Poly::from_ints(&k2, &[1, 0, 0, 1]);
        let r2 = f2.roots();
        assert_eq!(r2.len(), 3);
        for a in &r2 {
            assert!(f2.eval(a).is_zero());
        }
    }

    #[test]
    fn taylor_shift_and_frobenius() {
        let k = FieldCtx::new(5, 1, 2).unwrap();
        let g = k.generator().unwrap();
        let f = Poly::new(k.clone(), vec![g.clone(), k.from_int(2), k.one()]);
        let s = f.taylor_shift(&g);
        let y = k.from_int(3);
        assert_eq!(s.eval(&y), f.eval(&(&y + &g)));
        let fr = f.frobenius();
        assert_eq!(fr.eval(&y.frobenius()), f.eval(&y).frobenius());
    }

    #[test]
    fn squarefree() {
        let k = FieldCtx::new(5, 1, 1).unwrap();
        assert!(Poly::from_ints(&k, &[1, 0, 0, 1]).is_squarefree());
        assert!(!Poly::from_ints(&k, &[1, 2, 1]).is_squarefree());
    }
}
