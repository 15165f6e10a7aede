//! Prime-field kernels: scalar helpers, dense polynomials over `F_p` used to
//! build extension moduli, and a small dense matrix type with row reduction.
//!
//! Everything here works on raw `u64` residues in `[0, p)`; the extension
//! field layer in [`super::field`] is built on top.

pub fn add(a: u64, b: u64, p: u64) -> u64 {
    let s = a + b;
    if s >= p {
        s - p
    } else {
        s
    }
}

pub fn sub(a: u64, b: u64, p: u64) -> u64 {
    if a >= b {
        a - b
    } else {
        a + p - b
    }
}

pub fn mul(a: u64, b: u64, p: u64) -> u64 {
    ((a as u128 * b as u128) % p as u128) as u64
}

pub fn pow(mut a: u64, mut e: u128, p: u64) -> u64 {
    let mut acc = 1 % p;
    a %= p;
    while e > 0 {
        if e & 1 == 1 {
            acc = mul(acc, a, p);
        }
        a = mul(a, a, p);
        e >>= 1;
    }
    acc
}

pub fn inv(a: u64, p: u64) -> u64 {
    assert!(!a.is_multiple_of(p), "inverse of zero in F_{p}");
    pow(a, (p - 2) as u128, p)
}

pub fn is_prime(n: u64) -> bool {
    if n < 2 {
        return false;
    }
    let mut d = 2u64;
    while d * d <= n {
        if n.is_multiple_of(d) {
            return false;
        }
        d += 1;
    }
    true
}

/// Distinct prime factors by trial division. Returns `None` when the
/// cofactor left after the trial bound cannot be certified prime.
pub fn prime_factors(mut n: u128) -> Option<Vec<u128>> {
    const BOUND: u128 = 5_000_000;
    let mut out = Vec::new();
    let mut d: u128 = 2;
    while d * d <= n && d <= BOUND {
        if n.is_multiple_of(d) {
            out.push(d);
            while n.is_multiple_of(d) {
                n /= d;
            }
        }
        d += 1;
    }
    if n > 1 {
        if d * d > n {
            out.push(n);
        } else {
            return None;
        }
    }
    Some(out)
}

// ---------------------------------------------------------------------------
// Polynomials over F_p, little-endian coefficient vectors.

pub type FpPoly = Vec<u64>;

pub fn poly_trim(a: &mut FpPoly) {
    while a.last() == Some(&0) {
        a.pop();
    }
}

pub fn poly_deg(a: &FpPoly) -> Option<usize> {
    a.iter().rposition(|&c| c != 0)
}

pub fn poly_sub(a: &FpPoly, b: &FpPoly, p: u64) -> FpPoly {
    let n = a.len().max(b.len());
    let mut out: FpPoly = (0..n)
        .map(|i| {
            sub(
                a.get(i).copied().unwrap_or(0),
                b.get(i).copied().unwrap_or(0),
                p,
            )
        })
        .collect();
    poly_trim(&mut out);
    out
}

pub fn poly_mul(a: &FpPoly, b: &FpPoly, p: u64) -> FpPoly {
    if a.is_empty() || b.is_empty() {
        return Vec::new();
    }
    let mut out = vec![0u64; a.len() + b.len() - 1];
    for (i, &x) in a.iter().enumerate() {
        if x == 0 {
            continue;
        }
        for (j, &y) in b.iter().enumerate() {
            out[i + j] = add(out[i + j], mul(x, y, p), p);
        }
    }
    poly_trim(&mut out);
    out
}

pub fn poly_rem(a: &FpPoly, m: &FpPoly, p: u64) -> FpPoly {
    let dm = poly_deg(m).expect("division by zero polynomial");
    let lead_inv = inv(m[dm], p);
    let mut r = a.clone();
    poly_trim(&mut r);
    while let Some(dr) = poly_deg(&r) {
        if dr < dm {
            break;
        }
        let c = mul(r[dr], lead_inv, p);
        let shift = dr - dm;
        for j in 0..=dm {
            r[shift + j] = sub(r[shift + j], mul(c, m[j], p), p);
        }
        poly_trim(&mut r);
    }
    r
}

pub fn poly_divrem(a: &FpPoly, m: &FpPoly, p: u64) -> (FpPoly, FpPoly) {
    let dm = poly_deg(m).expect("division by zero polynomial");
    let lead_inv = inv(m[dm], p);
    let mut r = a.clone();
    poly_trim(&mut r);
    let mut q = vec![0u64; r.len().saturating_sub(dm).max(1)];
    while let Some(dr) = poly_deg(&r) {
        if dr < dm {
            break;
        }
        let c = mul(r[dr], lead_inv, p);
        let shift = dr - dm;
        q[shift] = c;
        for j in 0..=dm {
            r[shift + j] = sub(r[shift + j], mul(c, m[j], p), p);
        }
        poly_trim(&mut r);
    }
    poly_trim(&mut q);
    (q, r)
}

pub fn poly_mulmod(a: &FpPoly, b: &FpPoly, m: &FpPoly, p: u64) -> FpPoly {
    poly_rem(&poly_mul(a, b, p), m, p)
}

pub fn poly_powmod(base: &FpPoly, mut e: u128, m: &FpPoly, p: u64) -> FpPoly {
    let mut acc: FpPoly = vec![1];
    let mut b = poly_rem(base, m, p);
    while e > 0 {
        if e & 1 == 1 {
            acc = poly_mulmod(&acc, &b, m, p);
        }
        b = poly_mulmod(&b, &b, m, p);
        e >>= 1;
    }
    poly_rem(&acc, m, p)
}

pub fn poly_gcd(a: &FpPoly, b: &FpPoly, p: u64) -> FpPoly {
    let mut x = a.clone();
    let mut y = b.clone();
    poly_trim(&mut x);
    poly_trim(&mut y);
    while !y.is_empty() {
        let r = poly_rem(&x, &y, p);
        x = y;
        y = r;
    }
    if let Some(d) = poly_deg(&x) {
        let li = inv(x[d], p);
        for c in x.iter_mut() {
            *c = mul(*c, li, p);
        }
    }
    x
}

/// Inverse of `a` modulo an irreducible `m` by the extended Euclidean algorithm.
pub fn poly_inv_mod(a: &FpPoly, m: &FpPoly, p: u64) -> FpPoly {
    let (mut r0, mut r1) = (m.clone(), poly_rem(a, m, p));
    let (mut s0, mut s1): (FpPoly, FpPoly) = (Vec::new(), vec![1]);
    assert!(!r1.is_empty(), "inverse of zero");
    while !r1.is_empty() {
        let (q, r) = poly_divrem(&r0, &r1, p);
        let s = poly_sub(&s0, &poly_mul(&q, &s1, p), p);
        r0 = r1;
        r1 = r;
        s0 = s1;
        s1 = s;
    }
    // r0 is a nonzero constant
    let c = inv(r0[0], p);
    let mut out: FpPoly = s0.iter().map(|&x| mul(x, c, p)).collect();
    poly_trim(&mut out);
    poly_rem(&out, m, p)
}

/// `x^(p^k) mod m`, by repeated p-th powering.
fn x_pow_p_pow(k: usize, m: &FpPoly, p: u64) -> FpPoly {
    let mut h: FpPoly = poly_rem(&vec![0, 1], m, p);
    for _ in 0..k {
        h = poly_powmod(&h, p as u128, m, p);
    }
    h
}

/// Rabin's irreducibility test for a monic polynomial of degree `d`.
pub fn is_irreducible(m: &FpPoly, p: u64) -> bool {
    let d = match poly_deg(m) {
        Some(d) if d >= 1 => d,
        _ => return false,
    };
    if d == 1 {
        return true;
    }
    let x: FpPoly = vec![0, 1];
    if poly_sub(&x_pow_p_pow(d, m, p), &poly_rem(&x, m, p), p) != Vec::<u64>::new() {
        return false;
    }
    let mut n = d;
    let mut l = 2;
    let mut primes = Vec::new();
    while n > 1 {
        if n % l == 0 {
            primes.push(l);
            while n % l == 0 {
                n /= l;
            }
        }
        l += 1;
    }
    primes.into_iter().all(|l| {
        let h = poly_sub(&x_pow_p_pow(d / l, m, p), &x, p);
        poly_deg(&poly_gcd(&h, m, p)) == Some(0)
    })
}

/// The smallest monic irreducible polynomial of degree `d` over `F_p`, where
/// monic polynomials are ordered by the integer `sum c_i p^i` of their
/// non-leading coefficients.
pub fn smallest_irreducible(d: usize, p: u64) -> FpPoly {
    let mut coeffs = vec![0u64; d + 1];
    coeffs[d] = 1;
    loop {
        if is_irreducible(&coeffs, p) {
            return coeffs;
        }
        // increment the base-p counter in coefficients 0..d
        let mut i = 0;
        loop {
            coeffs[i] += 1;
            if coeffs[i] < p {
                break;
            }
            coeffs[i] = 0;
            i += 1;
            assert!(i < d, "no irreducible polynomial of degree {d}");
        }
    }
}

// ---------------------------------------------------------------------------
// Dense matrices over F_p.

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct FpMatrix {
    pub p: u64,
    pub rows: usize,
    pub cols: usize,
    pub data: Vec<u64>,
}

impl FpMatrix {
    pub fn zeros(p: u64, rows: usize, cols: usize) -> Self {
        FpMatrix {
            p,
            rows,
            cols,
            data: vec![0; rows * cols],
        }
    }

    pub fn get(&self, i: usize, j: usize) -> u64 {
        self.data[i * self.cols + j]
    }

    pub fn set(&mut self, i: usize, j: usize, v: u64) {
        self.data[i * self.cols + j] = v % self.p;
    }

    /// Reduced row echelon form in place; returns the pivot columns.
    pub fn rref(&mut self) -> Vec<usize> {
        let p = self.p;
        let mut pivots = Vec::new();
        let mut row = 0;
        for col in 0..self.cols {
            if row == self.rows {
                break;
            }
            let Some(piv) = (row..self.rows).find(|&i| self.get(i, col) != 0) else {
                continue;
            };
            if piv != row {
                for j in 0..self.cols {
                    self.data.swap(piv * self.cols + j, row * self.cols + j);
                }
            }
            let li = inv(self.get(row, col), p);
            for j in col..self.cols {
                let v = mul(self.get(row, j), li, p);
                self.set(row, j, v);
            }
            for i in 0..self.rows {
                if i == row {
                    continue;
                }
                let f = self.get(i, col);
                if f == 0 {
                    continue;
                }
                for j in col..self.cols {
                    let v = sub(self.get(i, j), mul(f, self.get(row, j), p), p);
                    self.data[i * self.cols + j] = v;
                }
            }
            pivots.push(col);
            row += 1;
        }
        pivots
    }

    pub fn rank(&self) -> usize {
        self.clone().rref().len()
    }

    /// Basis of the right kernel `{x : A x = 0}`, in the canonical form read
    /// off the reduced echelon form (one vector per free column, with a 1 in
    /// that column).
    pub fn kernel(&self) -> Vec<Vec<u64>> {
        let mut m = self.clone();
        let pivots = m.rref();
        let p = self.p;
        let free: Vec<usize> = (0..self.cols).filter(|c| !pivots.contains(c)).collect();
        free.iter()
            .map(|&f| {
                let mut v = vec![0u64; self.cols];
                v[f] = 1;
                for (r, &pc) in pivots.iter().enumerate() {
                    v[pc] = sub(0, m.get(r, f), p);
                }
                v
            })
            .collect()
    }

    /// Solves `A x = b`. Free variables are set to zero, which makes the
    /// returned solution the reduced representative of the affine solution set.
    pub fn solve(&self, b: &[u64]) -> Option<Vec<u64>> {
        let p = self.p;
        let mut aug = FpMatrix::zeros(p, self.rows, self.cols + 1);
        for i in 0..self.rows {
            for j in 0..self.cols {
                aug.set(i, j, self.get(i, j));
            }
            aug.set(i, self.cols, b[i]);
        }
        let pivots = aug.rref();
        if pivots.last() == Some(&self.cols) {
            return None;
        }
        let mut x = vec![0u64; self.cols];
        for (r, &pc) in pivots.iter().enumerate() {
            x[pc] = aug.get(r, self.cols);
        }
        Some(x)
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn smallest_irreducibles() {
        assert_eq!(smallest_irreducible(1, 5), vec![0, 1]);
        // x^2 + 2 is the first monic quadratic without roots mod 5
        assert_eq!(smallest_irreducible(2, 5), vec![2, 0, 1]);
        // x^2 + 1 over F_7 (-1 is a non-residue)
        assert_eq!(smallest_irreducible(2, 7), vec![1, 0, 1]);
        assert!(is_irreducible(&vec![1, 1, 1], 2));
        assert!(!is_irreducible(&vec![1, 0, 1], 2));
    }

    #[test]
    fn kernel_and_solve() {
        let mut a = FpMatrix::zeros(5, 2, 3);
        a.set(0, 0, 1);
        a.set(0, 1, 2);
        a.set(1, 2, 1);
        let k = a.kernel();
        assert_eq!(k, vec![vec![3, 1, 0]]);
        assert_eq!(a.solve(&[1, 4]), Some(vec![1, 0, 4]));
    }

    #[test]
    fn inverse_mod() {
        let m = smallest_irreducible(3, 5);
        let a: FpPoly = vec![3, 1, 4];
        let ai = poly_inv_mod(&a, &m, 5);
        assert_eq!(poly_mulmod(&a, &ai, &m, 5), vec![1]);
    }
}
