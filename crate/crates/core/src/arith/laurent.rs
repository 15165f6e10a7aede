//! Laurent polynomials and truncated Laurent series in `t`.

use std::fmt;

use super::field::{FieldCtx, FieldElement};
use crate::error::{Error, Result};

/// An exact Laurent polynomial `sum_k c_k t^(val + k)`.
///
/// Normalized: either empty (zero) or with nonzero first and last coefficient.
#[derive(Clone, PartialEq, Eq, Hash)]
pub struct LaurentPoly {
    ctx: FieldCtx,
    val: i64,
    c: Vec<FieldElement>,
}

impl LaurentPoly {
    pub fn from_parts(ctx: &FieldCtx, val: i64, c: Vec<FieldElement>) -> Self {
        let mut s = LaurentPoly { ctx: ctx.clone(), val, c };
        s.normalize();
        s
    }
    fn normalize(&mut self) {
        while self.c.last().is_some_and(|v| v.is_zero()) {
            self.c.pop();
        }
        let lead = self.c.iter().position(|v| !v.is_zero()).unwrap_or(self.c.len());
        if lead > 0 {
            self.c.drain(..lead);
            self.val += lead as i64;
        }
        if self.c.is_empty() {
            self.val = 0;
        }
    }

    pub fn zero(ctx: &FieldCtx) -> Self {
        LaurentPoly { ctx: ctx.clone(), val: 0, c: Vec::new() }
    }
    pub fn one(ctx: &FieldCtx) -> Self {
        Self::monomial(ctx.one(), 0)
    }
    pub fn monomial(a: FieldElement, e: i64) -> Self {
        let ctx = a.ctx().clone();
        Self::from_parts(&ctx, e, vec![a])
    }
    pub fn t_pow(ctx: &FieldCtx, e: i64) -> Self {
        Self::monomial(ctx.one(), e)
    }
    pub fn constant(a: FieldElement) -> Self {
        Self::monomial(a, 0)
    }

    pub fn ctx(&self) -> &FieldCtx {
        &self.ctx
    }
    pub fn is_zero(&self) -> bool {
        self.c.is_empty()
    }
    /// Lowest exponent, `None` for zero.
    pub fn valuation(&self) -> Option<i64> {
        (!self.is_zero()).then_some(self.val)
    }
    /// Highest exponent, `None` for zero.
    pub fn top(&self) -> Option<i64> {
        (!self.is_zero()).then(|| self.val + self.c.len() as i64 - 1)
    }
    pub fn coeff(&self, e: i64) -> FieldElement {
        let k = e - self.val;
        if k < 0 || k >= self.c.len() as i64 {
            self.ctx.zero()
        } else {
            self.c[k as usize].clone()
        }
    }
    pub fn lead(&self) -> FieldElement {
        self.c.first().cloned().unwrap_or_else(|| self.ctx.zero())
    }
    /// Iterate `(exponent, coefficient)` over nonzero terms.
    pub fn terms(&self) -> impl Iterator<Item = (i64, &FieldElement)> {
        self.c
            .iter()
            .enumerate()
            .filter(|(_, v)| !v.is_zero())
            .map(move |(k, v)| (self.val + k as i64, v))
    }

    pub fn add(&self, o: &LaurentPoly) -> LaurentPoly {
        if self.is_zero() {
            return o.clone();
        }
        if o.is_zero() {
            return self.clone();
        }
        let lo = self.val.min(o.val);
        let hi = self.top().unwrap().max(o.top().unwrap());
        let c = (lo..=hi).map(|e| &self.coeff(e) + &o.coeff(e)).collect();
        Self::from_parts(&self.ctx, lo, c)
    }
    pub fn sub(&self, o: &LaurentPoly) -> LaurentPoly {
        self.add(&o.neg())
    }
    pub fn neg(&self) -> LaurentPoly {
        LaurentPoly {
            ctx: self.ctx.clone(),
            val: self.val,
            c: self.c.iter().map(|v| -v).collect(),
        }
    }
    pub fn scale(&self, a: &FieldElement) -> LaurentPoly {
        Self::from_parts(&self.ctx, self.val, self.c.iter().map(|v| v * a).collect())
    }
    /// Multiply by `t^k`.
    pub fn shift(&self, k: i64) -> LaurentPoly {
        let mut s = self.clone();
        if !s.is_zero() {
            s.val += k;
        }
        s
    }
    pub fn mul(&self, o: &LaurentPoly) -> LaurentPoly {
        if self.is_zero() || o.is_zero() {
            return Self::zero(&self.ctx);
        }
        let mut c = vec![self.ctx.zero(); self.c.len() + o.c.len() - 1];
        for (i, a) in self.c.iter().enumerate() {
            if a.is_zero() {
                continue;
            }
            for (j, b) in o.c.iter().enumerate() {
                if !b.is_zero() {
                    c[i + j] += &(a * b);
                }
            }
        }
        Self::from_parts(&self.ctx, self.val + o.val, c)
    }
    /// Product keeping only exponents `< bound`.
    pub fn mul_trunc(&self, o: &LaurentPoly, bound: i64) -> LaurentPoly {
        if self.is_zero() || o.is_zero() || self.val + o.val >= bound {
            return Self::zero(&self.ctx);
        }
        let len = (bound - self.val - o.val) as usize;
        let len = len.min(self.c.len() + o.c.len() - 1);
        let mut c = vec![self.ctx.zero(); len];
        for (i, a) in self.c.iter().enumerate().take(len) {
            if a.is_zero() {
                continue;
            }
            for (j, b) in o.c.iter().enumerate().take(len - i) {
                if !b.is_zero() {
                    c[i + j] += &(a * b);
                }
            }
        }
        Self::from_parts(&self.ctx, self.val + o.val, c)
    }
    /// Drop every term with exponent `>= bound`.
    pub fn truncate(&self, bound: i64) -> LaurentPoly {
        if self.is_zero() || self.val >= bound {
            return Self::zero(&self.ctx);
        }
        let keep = ((bound - self.val) as usize).min(self.c.len());
        Self::from_parts(&self.ctx, self.val, self.c[..keep].to_vec())
    }
    /// Keep only the terms with exponent `< bound` and `>= low`.
    pub fn window(&self, low: i64, bound: i64) -> LaurentPoly {
        let t = self.truncate(bound);
        if t.is_zero() || t.val >= low {
            return t;
        }
        let skip = (low - t.val) as usize;
        if skip >= t.c.len() {
            return Self::zero(&self.ctx);
        }
        Self::from_parts(&self.ctx, low, t.c[skip..].to_vec())
    }

    /// The Frobenius `sum c_i t^i -> sum c_i^q t^(q i)`.
    pub fn frobenius(&self) -> LaurentPoly {
        if self.is_zero() {
            return self.clone();
        }
        let q = self.ctx.q() as usize;
        let mut c = vec![self.ctx.zero(); (self.c.len() - 1) * q + 1];
        for (k, v) in self.c.iter().enumerate() {
            c[k * q] = v.frobenius();
        }
        Self::from_parts(&self.ctx, self.val * q as i64, c)
    }

    /// Write `self = sum_{j<q} t^j F(x_j)` and return `[x_0, ..., x_{q-1}]`.
    pub fn frobenius_decompose(&self) -> Vec<LaurentPoly> {
        let q = self.ctx.q() as i64;
        let mut parts: Vec<Vec<(i64, FieldElement)>> = vec![Vec::new(); q as usize];
        for (e, v) in self.terms() {
            let j = e.rem_euclid(q);
            parts[j as usize].push((e.div_euclid(q), v.frobenius_inv()));
        }
        parts
            .into_iter()
            .map(|terms| {
                terms.into_iter().fold(Self::zero(&self.ctx), |acc, (e, v)| {
                    acc.add(&Self::monomial(v, e))
                })
            })
            .collect()
    }

    /// Series inverse of a nonzero Laurent polynomial, with all terms of
    /// exponent `< bound`.
    pub fn inverse_trunc(&self, bound: i64) -> LaurentPoly {
        assert!(!self.is_zero(), "inverse of zero");
        let v = self.val;
        let len = bound + v;
        if len <= 0 {
            return Self::zero(&self.ctx);
        }
        let len = len as usize;
        let inv0 = self.c[0].inv().unwrap();
        let mut g: Vec<FieldElement> = Vec::with_capacity(len);
        for k in 0..len {
            let mut acc = if k == 0 { self.ctx.one() } else { self.ctx.zero() };
            for i in 1..=k.min(self.c.len() - 1) {
                acc -= &(&self.c[i] * &g[k - i]);
            }
            g.push(&acc * &inv0);
        }
        Self::from_parts(&self.ctx, -v, g)
    }

    /// Substitute `t -> t^e`.
    pub fn inflate(&self, e: u64) -> LaurentPoly {
        if self.is_zero() || e == 1 {
            return self.clone();
        }
        let e = e as usize;
        let mut c = vec![self.ctx.zero(); (self.c.len() - 1) * e + 1];
        for (k, v) in self.c.iter().enumerate() {
            c[k * e] = v.clone();
        }
        Self::from_parts(&self.ctx, self.val * e as i64, c)
    }

    /// Exact quotient by a nonzero Laurent polynomial, if it exists.
    pub fn exact_div(&self, d: &LaurentPoly) -> Option<LaurentPoly> {
        if self.is_zero() {
            return Some(self.clone());
        }
        let top = self.top().unwrap() - d.top().unwrap();
        if top < self.val - d.val {
            return None;
        }
        let inv = d.inverse_trunc(top + 1 - self.val);
        let q = self.mul_trunc(&inv, top + 1);
        (q.mul(d) == *self).then_some(q)
    }

    pub fn map_coeffs(&self, ctx: &FieldCtx, f: impl Fn(&FieldElement) -> FieldElement) -> Self {
        Self::from_parts(ctx, self.val, self.c.iter().map(f).collect())
    }
}

impl fmt::Debug for LaurentPoly {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{self}")
    }
}

impl fmt::Display for LaurentPoly {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write_terms(f, self.terms(), 't')
    }
}

pub(crate) fn write_terms<'a>(
    f: &mut fmt::Formatter<'_>,
    terms: impl Iterator<Item = (i64, &'a FieldElement)>,
    var: char,
) -> fmt::Result {
    let mut first = true;
    for (e, c) in terms {
        if !first {
            write!(f, " + ")?;
        }
        first = false;
        let coef = if c.as_prime().is_some() {
            c.to_string()
        } else {
            format!("({c})")
        };
        match e {
            0 => write!(f, "{coef}")?,
            1 if c.is_one() => write!(f, "{var}")?,
            _ if c.is_one() => write!(f, "{var}^{e}")?,
            1 => write!(f, "{coef}*{var}")?,
            _ => write!(f, "{coef}*{var}^{e}")?,
        }
    }
    if first {
        write!(f, "0")?;
    }
    Ok(())
}

/// An element of `k((t))`: a Laurent polynomial that is either exact or known
/// only below an absolute precision.
#[derive(Clone, PartialEq, Eq)]
pub struct LaurentScalar {
    known: LaurentPoly,
    /// Coefficients of exponent `< prec` are certified; `None` means exact.
    prec: Option<i64>,
}

impl fmt::Debug for LaurentScalar {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{self}")
    }
}

impl fmt::Display for LaurentScalar {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self.prec {
            None => write!(f, "{}", self.known),
            Some(n) if self.known.is_zero() => write!(f, "O(t^{n})"),
            Some(n) => write!(f, "{} + O(t^{n})", self.known),
        }
    }
}

impl From<LaurentPoly> for LaurentScalar {
    fn from(known: LaurentPoly) -> Self {
        LaurentScalar::exact(known)
    }
}

impl LaurentScalar {
    pub fn exact(known: LaurentPoly) -> Self {
        LaurentScalar { known, prec: None }
    }
    /// Truncated series; terms at or beyond `prec` are discarded.
    pub fn with_precision(known: LaurentPoly, prec: i64) -> Self {
        LaurentScalar { known: known.truncate(prec), prec: Some(prec) }
    }
    pub fn ctx(&self) -> &FieldCtx {
        self.known.ctx()
    }
    pub fn known(&self) -> &LaurentPoly {
        &self.known
    }
    pub fn precision(&self) -> Option<i64> {
        self.prec
    }
    pub fn is_exact(&self) -> bool {
        self.prec.is_none()
    }
    /// Valuation when it is certified.
    pub fn valuation(&self) -> Option<i64> {
        self.known.valuation()
    }
    /// A lower bound on the valuation, also for `O(t^N)`.
    pub fn valuation_bound(&self) -> i64 {
        match (self.known.valuation(), self.prec) {
            (Some(v), _) => v,
            (None, Some(n)) => n,
            (None, None) => i64::MAX,
        }
    }
    pub fn coeff(&self, e: i64) -> Result<FieldElement> {
        if let Some(n) = self.prec {
            if e >= n {
                return Err(Error::InsufficientPrecision(format!(
                    "coefficient of t^{e} requested, known below t^{n}"
                )));
            }
        }
        Ok(self.known.coeff(e))
    }
    /// The exact Laurent polynomial, or an error if only truncated data is known.
    pub fn require_exact(&self) -> Result<&LaurentPoly> {
        match self.prec {
            None => Ok(&self.known),
            Some(n) => Err(Error::InsufficientPrecision(format!(
                "exact value required, series known only below t^{n}"
            ))),
        }
    }

    fn min_prec(a: Option<i64>, b: Option<i64>) -> Option<i64> {
        match (a, b) {
            (Some(x), Some(y)) => Some(x.min(y)),
            (x, None) => x,
            (None, y) => y,
        }
    }

    pub fn add(&self, o: &LaurentScalar) -> LaurentScalar {
        let prec = Self::min_prec(self.prec, o.prec);
        let known = self.known.add(&o.known);
        match prec {
            None => Self::exact(known),
            Some(n) => Self::with_precision(known, n),
        }
    }
    pub fn neg(&self) -> LaurentScalar {
        LaurentScalar { known: self.known.neg(), prec: self.prec }
    }
    pub fn sub(&self, o: &LaurentScalar) -> LaurentScalar {
        self.add(&o.neg())
    }
    pub fn mul(&self, o: &LaurentScalar) -> LaurentScalar {
        let p1 = self.prec.map(|n| n.saturating_add(o.valuation_bound()));
        let p2 = o.prec.map(|n| n.saturating_add(self.valuation_bound()));
        let prec = Self::min_prec(p1, p2);
        match prec {
            None => Self::exact(self.known.mul(&o.known)),
            Some(n) => Self::with_precision(self.known.mul_trunc(&o.known, n), n),
        }
    }
}

/// `sum c_i t^i -> sum c_i^q t^(q i)`, multiplying the precision by `q`.
pub fn series_frobenius(f: &LaurentScalar) -> LaurentScalar {
    let q = f.ctx().q() as i64;
    LaurentScalar {
        known: f.known.frobenius(),
        prec: f.prec.map(|n| n * q),
    }
}

/// Inverse of `f` to relative precision `target`: the result is certified for
/// exponents `< -v(f) + target`.
pub fn laurent_inverse(f: &LaurentScalar, target: i64) -> Result<LaurentScalar> {
    let v = f.known.valuation().ok_or_else(|| {
        Error::InsufficientPrecision("leading coefficient of the series is unknown".into())
    })?;
    if let Some(n) = f.prec {
        if n - v < target {
            return Err(Error::InsufficientPrecision(format!(
                "series known to relative precision {}, {} requested",
                n - v,
                target
            )));
        }
    }
    let bound = -v + target;
    Ok(LaurentScalar::with_precision(f.known.inverse_trunc(bound), bound))
}
