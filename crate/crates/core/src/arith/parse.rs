//! Text syntax for scalars: `g^k` for powers of the field generator, integers
//! for prime-field elements, terms like `g^3*t^-2`, and an optional `O(t^N)`
//! precision marker.

use super::field::{FieldCtx, FieldElement};
use super::laurent::{LaurentPoly, LaurentScalar};
use super::poly::Poly;
use crate::error::{Error, Result};

struct Lexer<'a> {
    s: &'a [u8],
    i: usize,
}

impl<'a> Lexer<'a> {
    fn new(s: &'a str) -> Self {
        Lexer { s: s.as_bytes(), i: 0 }
    }
    fn skip_ws(&mut self) {
        while self.i < self.s.len() && self.s[self.i].is_ascii_whitespace() {
            self.i += 1;
        }
    }
    fn peek(&mut self) -> Option<u8> {
        self.skip_ws();
        self.s.get(self.i).copied()
    }
    fn eat(&mut self, c: u8) -> bool {
        if self.peek() == Some(c) {
            self.i += 1;
            true
        } else {
            false
        }
    }
    fn int(&mut self) -> Option<i64> {
        self.skip_ws();
        let start = self.i;
        if self.i < self.s.len() && self.s[self.i] == b'-' {
            self.i += 1;
        }
        while self.i < self.s.len() && self.s[self.i].is_ascii_digit() {
            self.i += 1;
        }
        let txt = std::str::from_utf8(&self.s[start..self.i]).ok()?;
        match txt.parse() {
            Ok(v) => Some(v),
            Err(_) => {
                self.i = start;
                None
            }
        }
    }
}

fn err(src: &str, msg: &str) -> Error {
    Error::InvalidInput(format!("cannot parse scalar {src:?}: {msg}"))
}

/// Parse a Laurent scalar in the variable `var`.
pub fn parse_scalar(src: &str, ctx: &FieldCtx, var: char) -> Result<LaurentScalar> {
    let (terms, prec) = parse_terms(src, ctx, var)?;
    let poly = terms
        .into_iter()
        .fold(LaurentPoly::zero(ctx), |acc, (e, c)| acc.add(&LaurentPoly::monomial(c, e)));
    Ok(match prec {
        None => LaurentScalar::exact(poly),
        Some(n) => LaurentScalar::with_precision(poly, n),
    })
}

/// Parse an exact Laurent polynomial in `t`.
pub fn parse_laurent(src: &str, ctx: &FieldCtx) -> Result<LaurentPoly> {
    let s = parse_scalar(src, ctx, 't')?;
    Ok(s.require_exact().map_err(|_| err(src, "precision marker not allowed"))?.clone())
}

/// Parse a field element such as `g^3`, `2` or `g^2 + 1`.
pub fn parse_element(src: &str, ctx: &FieldCtx) -> Result<FieldElement> {
    let (terms, prec) = parse_terms(src, ctx, '\0')?;
    if prec.is_some() {
        return Err(err(src, "precision marker not allowed"));
    }
    Ok(terms.into_iter().fold(ctx.zero(), |acc, (_, c)| &acc + &c))
}

/// Parse a polynomial in `x`.
pub fn parse_poly(src: &str, ctx: &FieldCtx) -> Result<Poly> {
    let (terms, prec) = parse_terms(src, ctx, 'x')?;
    if prec.is_some() {
        return Err(err(src, "precision marker not allowed"));
    }
    let mut top = 0usize;
    for (e, _) in &terms {
        if *e < 0 {
            return Err(err(src, "negative exponent in a polynomial"));
        }
        top = top.max(*e as usize);
    }
    let mut c = vec![ctx.zero(); top + 1];
    for (e, v) in terms {
        c[e as usize] += &v;
    }
    Ok(Poly::new(ctx.clone(), c))
}

type Terms = (Vec<(i64, FieldElement)>, Option<i64>);

fn parse_terms(src: &str, ctx: &FieldCtx, var: char) -> Result<Terms> {
    let mut lx = Lexer::new(src);
    let mut terms = Vec::new();
    let mut prec = None;
    let mut first = true;
    loop {
        let mut negative = false;
        if !first {
            match lx.peek() {
                None => break,
                Some(b'+') => lx.i += 1,
                Some(b'-') => {
                    lx.i += 1;
                    negative = true;
                }
                _ => return Err(err(src, "expected + or -")),
            }
        } else if lx.eat(b'-') {
            negative = true;
        }
        first = false;
        if lx.peek() == Some(b'O') {
            lx.i += 1;
            if !lx.eat(b'(') || lx.peek() != Some(var as u8) {
                return Err(err(src, "malformed O(...) marker"));
            }
            lx.i += 1;
            let n = if lx.eat(b'^') {
                lx.int().ok_or_else(|| err(src, "bad exponent"))?
            } else {
                1
            };
            if !lx.eat(b')') {
                return Err(err(src, "unclosed O(...)"));
            }
            prec = Some(n);
            continue;
        }
        let (e, c) = parse_term(&mut lx, ctx, var, src)?;
        terms.push((e, if negative { -&c } else { c }));
    }
    if let Some(n) = prec {
        if terms.iter().any(|(e, c)| *e >= n && !c.is_zero()) {
            return Err(err(src, "term beyond the stated precision"));
        }
    }
    Ok((terms, prec))
}

fn parse_term(lx: &mut Lexer, ctx: &FieldCtx, var: char, src: &str) -> Result<(i64, FieldElement)> {
    let mut coef = ctx.one();
    let mut exp = 0i64;
    let mut any = false;
    loop {
        match lx.peek() {
            Some(b'g') => {
                lx.i += 1;
                let k = if lx.eat(b'^') {
                    lx.int().ok_or_else(|| err(src, "bad generator exponent"))?
                } else {
                    1
                };
                let g = ctx.generator()?;
                let gk = if k >= 0 {
                    g.pow(k as u128)
                } else {
                    g.inv().unwrap().pow((-k) as u128)
                };
                coef = &coef * &gk;
            }
            Some(c) if var != '\0' && c == var as u8 => {
                lx.i += 1;
                let k = if lx.eat(b'^') {
                    lx.int().ok_or_else(|| err(src, "bad exponent"))?
                } else {
                    1
                };
                exp += k;
            }
            Some(c) if c.is_ascii_digit() => {
                let v = lx.int().ok_or_else(|| err(src, "bad integer"))?;
                coef = &coef * &ctx.from_int(v);
            }
            Some(b'(') => {
                lx.i += 1;
                let start = lx.i;
                let mut depth = 1;
                while lx.i < lx.s.len() && depth > 0 {
                    match lx.s[lx.i] {
                        b'(' => depth += 1,
                        b')' => depth -= 1,
                        _ => {}
                    }
                    lx.i += 1;
                }
                if depth != 0 {
                    return Err(err(src, "unbalanced parentheses"));
                }
                let inner = std::str::from_utf8(&lx.s[start..lx.i - 1]).unwrap();
                coef = &coef * &parse_element(inner, ctx)?;
            }
            _ => break,
        }
        any = true;
        if !lx.eat(b'*') {
            break;
        }
    }
    if !any {
        return Err(err(src, "empty term"));
    }
    Ok((exp, coef))
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn parses_terms() {
        let k = FieldCtx::new(5, 1, 1).unwrap();
        let f = parse_laurent("t^-1 + 2*t^3", &k).unwrap();
        assert_eq!(f.valuation(), Some(-1));
        assert_eq!(f.coeff(3).as_prime(), Some(2));
        let f = parse_laurent("-t", &k).unwrap();
        assert_eq!(f.coeff(1).as_prime(), Some(4));
        let s = parse_scalar("1 + t + O(t^4)", &k, 't').unwrap();
        assert_eq!(s.precision(), Some(4));
        assert!(parse_scalar("t^5 + O(t^4)", &k, 't').is_err());
    }

    #[test]
    fn generator_powers() {
        let k = FieldCtx::new(5, 2, 1).unwrap();
        let g = k.generator().unwrap();
        assert_eq!(parse_element("g^3", &k).unwrap(), g.pow(3));
        let f = parse_laurent("g^2*t^-1", &k).unwrap();
        assert_eq!(f.coeff(-1), g.pow(2));
        let p = parse_poly("x^3 + (g+1)*x", &k).unwrap();
        assert_eq!(p.coeff(1), &g + &k.one());
        assert_eq!(parse_element("g^-1", &k).unwrap(), g.inv().unwrap());
    }
}
