//! Dense univariate polynomials over `F_p`, coefficients stored lowest degree
//! first with no trailing zeros.

use crate::ff::{mul_mod, pow_mod};

#[derive(Clone, Debug, PartialEq, Eq, Default)]
pub struct Poly {
    coeffs: Vec<u64>,
}

#[inline]
fn add_mod(a: u64, b: u64, p: u64) -> u64 {
    let s = a + b;
    if s >= p {
        s - p
    } else {
        s
    }
}

#[inline]
fn sub_mod(a: u64, b: u64, p: u64) -> u64 {
    if a >= b {
        a - b
    } else {
        a + p - b
    }
}

#[inline]
fn inv_mod(a: u64, p: u64) -> u64 {
    assert!(!a.is_multiple_of(p), "inverse of zero");
    pow_mod(a, p - 2, p)
}

impl Poly {
    pub fn zero() -> Self {
        Self { coeffs: Vec::new() }
    }

    pub fn constant(c: u64, p: u64) -> Self {
        Self::from_coeffs(vec![c % p])
    }

    pub fn one() -> Self {
        Self { coeffs: vec![1] }
    }

    /// `x`.
    pub fn x() -> Self {
        Self { coeffs: vec![0, 1] }
    }

    /// `x - r`.
    pub fn linear_root(r: u64, p: u64) -> Self {
        Self::from_coeffs(vec![sub_mod(0, r % p, p), 1])
    }

    /// `c x^n`.
    pub fn monomial(c: u64, n: usize, p: u64) -> Self {
        let mut v = vec![0; n + 1];
        v[n] = c % p;
        Self::from_coeffs(v)
    }

    /// Coefficients must already be reduced mod `p`.
    pub fn from_coeffs(mut coeffs: Vec<u64>) -> Self {
        while coeffs.last() == Some(&0) {
            coeffs.pop();
        }
        Self { coeffs }
    }

    /// `Π (x - r)`.
    pub fn from_roots(roots: &[u64], p: u64) -> Self {
        roots
            .iter()
            .fold(Self::one(), |acc, &r| acc.mul(&Self::linear_root(r, p), p))
    }

    pub fn coeffs(&self) -> &[u64] {
        &self.coeffs
    }

    pub fn coeff(&self, i: usize) -> u64 {
        self.coeffs.get(i).copied().unwrap_or(0)
    }

    pub fn is_zero(&self) -> bool {
        self.coeffs.is_empty()
    }

    /// `None` for the zero polynomial.
    pub fn degree(&self) -> Option<usize> {
        self.coeffs.len().checked_sub(1)
    }

    pub fn leading(&self) -> u64 {
        self.coeffs.last().copied().unwrap_or(0)
    }

    pub fn add(&self, o: &Self, p: u64) -> Self {
        let n = self.coeffs.len().max(o.coeffs.len());
        Self::from_coeffs((0..n).map(|i| add_mod(self.coeff(i), o.coeff(i), p)).collect())
    }

    pub fn sub(&self, o: &Self, p: u64) -> Self {
        let n = self.coeffs.len().max(o.coeffs.len());
        Self::from_coeffs((0..n).map(|i| sub_mod(self.coeff(i), o.coeff(i), p)).collect())
    }

    pub fn scale(&self, c: u64, p: u64) -> Self {
        Self::from_coeffs(self.coeffs.iter().map(|&a| mul_mod(a, c, p)).collect())
    }

    pub fn mul(&self, o: &Self, p: u64) -> Self {
        if self.is_zero() || o.is_zero() {
            return Self::zero();
        }
        let mut out = vec![0u128; self.coeffs.len() + o.coeffs.len() - 1];
        let m = p as u128;
        for (i, &a) in self.coeffs.iter().enumerate() {
            if a == 0 {
                continue;
            }
            for (j, &b) in o.coeffs.iter().enumerate() {
                out[i + j] = (out[i + j] + a as u128 * b as u128) % m;
            }
        }
        Self::from_coeffs(out.into_iter().map(|c| c as u64).collect())
    }

    pub fn pow(&self, mut e: u64, p: u64) -> Self {
        let mut base = self.clone();
        let mut acc = Self::one();
        while e > 0 {
            if e & 1 == 1 {
                acc = acc.mul(&base, p);
            }
            e >>= 1;
            if e > 0 {
                base = base.mul(&base, p);
            }
        }
        acc
    }

    /// `x^k · self`.
    pub fn shift(&self, k: usize) -> Self {
        if self.is_zero() {
            return Self::zero();
        }
        let mut v = vec![0; k];
        v.extend_from_slice(&self.coeffs);
        Self { coeffs: v }
    }

    pub fn derivative(&self, p: u64) -> Self {
        Self::from_coeffs(
            self.coeffs
                .iter()
                .enumerate()
                .skip(1)
                .map(|(i, &c)| mul_mod(c, i as u64 % p, p))
                .collect(),
        )
    }

    pub fn eval(&self, x: u64, p: u64) -> u64 {
        self.coeffs
            .iter()
            .rev()
            .fold(0, |acc, &c| add_mod(mul_mod(acc, x, p), c, p))
    }

    /// Quotient and remainder; panics on a zero divisor.
    pub fn div_rem(&self, d: &Self, p: u64) -> (Self, Self) {
        let dd = d.degree().expect("division by the zero polynomial");
        let lead_inv = inv_mod(d.leading(), p);
        let mut r = self.coeffs.clone();
        if r.len() <= dd {
            return (Self::zero(), self.clone());
        }
        let mut q = vec![0; r.len() - dd];
        for i in (dd..r.len()).rev() {
            let c = mul_mod(r[i], lead_inv, p);
            if c == 0 {
                continue;
            }
            q[i - dd] = c;
            for (j, &dc) in d.coeffs.iter().enumerate() {
                r[i - dd + j] = sub_mod(r[i - dd + j], mul_mod(c, dc, p), p);
            }
        }
        r.truncate(dd);
        (Self::from_coeffs(q), Self::from_coeffs(r))
    }

    pub fn rem(&self, d: &Self, p: u64) -> Self {
        self.div_rem(d, p).1
    }

    pub fn monic(&self, p: u64) -> Self {
        if self.is_zero() {
            return Self::zero();
        }
        self.scale(inv_mod(self.leading(), p), p)
    }

    /// Monic gcd (zero if both inputs are zero).
    pub fn gcd(&self, o: &Self, p: u64) -> Self {
        let (mut a, mut b) = (self.clone(), o.clone());
        while !b.is_zero() {
            let r = a.rem(&b, p);
            a = b;
            b = r;
        }
        a.monic(p)
    }

    /// `self^e mod m`.
    pub fn pow_mod(&self, mut e: u64, m: &Self, p: u64) -> Self {
        let mut base = self.rem(m, p);
        let mut acc = Self::one().rem(m, p);
        while e > 0 {
            if e & 1 == 1 {
                acc = acc.mul(&base, p).rem(m, p);
            }
            e >>= 1;
            if e > 0 {
                base = base.mul(&base, p).rem(m, p);
            }
        }
        acc
    }

    /// Taylor coefficients `c_0, ..., c_{n-1}` of `self` at `y`, i.e.
    /// `self(x) = Σ c_i (x - y)^i`, by repeated synthetic division.
    pub fn taylor_at(&self, y: u64, n: usize, p: u64) -> Vec<u64> {
        let mut cur = self.coeffs.clone();
        let mut out = Vec::with_capacity(n);
        for _ in 0..n {
            if cur.is_empty() {
                out.push(0);
                continue;
            }
            // Horner: quotient by (x - y) and remainder self(y).
            let mut carry = 0u64;
            let mut q = vec![0u64; cur.len().saturating_sub(1)];
            for i in (0..cur.len()).rev() {
                let v = add_mod(cur[i], mul_mod(carry, y, p), p);
                if i > 0 {
                    q[i - 1] = v;
                }
                carry = v;
            }
            out.push(carry);
            cur = q;
        }
        out
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    const P: u64 = 101;

    fn poly_strategy() -> impl Strategy<Value = Poly> {
        prop::collection::vec(0..P, 0..8).prop_map(Poly::from_coeffs)
    }

    #[test]
    fn from_roots_vanishes_at_roots() {
        let f = Poly::from_roots(&[3, 7, 11], P);
        assert_eq!(f.degree(), Some(3));
        for r in [3, 7, 11] {
            assert_eq!(f.eval(r, P), 0);
        }
        assert_ne!(f.eval(4, P), 0);
    }

    #[test]
    fn gcd_of_root_products() {
        let f = Poly::from_roots(&[1, 2, 3, 4], P);
        let g = Poly::from_roots(&[3, 4, 5], P).scale(7, P);
        assert_eq!(f.gcd(&g, P), Poly::from_roots(&[3, 4], P));
        assert_eq!(f.gcd(&Poly::zero(), P), f);
    }

    #[test]
    fn x_pow_minus_one_splits_over_subgroup() {
        // x^(p-1) - 1 has every nonzero residue as a root.
        let xt = Poly::monomial(1, 100, P).sub(&Poly::one(), P);
        let lin = Poly::from_roots(&[5, 9], P);
        assert_eq!(xt.gcd(&lin, P), lin);
    }

    #[test]
    fn taylor_coefficients_of_power() {
        // (x - 2)^3 has Taylor data (0, 0, 0, 1) at 2.
        let f = Poly::linear_root(2, P).pow(3, P);
        assert_eq!(f.taylor_at(2, 5, P), vec![0, 0, 0, 1, 0]);
        // At 0 the Taylor coefficients are the coefficients.
        let g = Poly::from_coeffs(vec![4, 5, 6]);
        assert_eq!(g.taylor_at(0, 3, P), vec![4, 5, 6]);
    }

    #[test]
    fn derivative_example() {
        let f = Poly::from_coeffs(vec![1, 2, 3]);
        assert_eq!(f.derivative(P), Poly::from_coeffs(vec![2, 6]));
    }

    proptest! {
        #[test]
        fn div_rem_reconstructs(a in poly_strategy(), b in poly_strategy()) {
            prop_assume!(!b.is_zero());
            let (q, r) = a.div_rem(&b, P);
            prop_assert_eq!(q.mul(&b, P).add(&r, P), a);
            prop_assert!(r.degree().is_none_or(|d| d < b.degree().unwrap()));
        }

        #[test]
        fn eval_is_ring_hom(a in poly_strategy(), b in poly_strategy(), x in 0..P) {
            prop_assert_eq!(a.mul(&b, P).eval(x, P), mul_mod(a.eval(x, P), b.eval(x, P), P));
            prop_assert_eq!(a.add(&b, P).eval(x, P), add_mod(a.eval(x, P), b.eval(x, P), P));
        }

        #[test]
        fn gcd_divides_both(a in poly_strategy(), b in poly_strategy()) {
            prop_assume!(!a.is_zero() || !b.is_zero());
            let g = a.gcd(&b, P);
            prop_assert!(a.rem(&g, P).is_zero());
            prop_assert!(b.rem(&g, P).is_zero());
        }

        #[test]
        fn leibniz(a in poly_strategy(), b in poly_strategy()) {
            let lhs = a.mul(&b, P).derivative(P);
            let rhs = a.derivative(P).mul(&b, P).add(&a.mul(&b.derivative(P), P), P);
            prop_assert_eq!(lhs, rhs);
        }

        #[test]
        fn taylor_reconstructs(a in poly_strategy(), y in 0..P) {
            let n = a.coeffs().len();
            let t = a.taylor_at(y, n, P);
            let shifted = t.iter().enumerate().fold(Poly::zero(), |acc, (i, &c)| {
                acc.add(&Poly::linear_root(y, P).pow(i as u64, P).scale(c, P), P)
            });
            prop_assert_eq!(shifted, a);
        }

        #[test]
        fn pow_mod_matches_pow(a in poly_strategy(), e in 0u64..12) {
            let m = Poly::from_roots(&[1, 2, 3], P);
            prop_assert_eq!(a.pow_mod(e, &m, P), a.pow(e, P).rem(&m, P));
        }
    }
}
