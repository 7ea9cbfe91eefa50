//! Dense univariate polynomials and rational functions over a `Scalar`.

use std::ops::{Add, Mul, Neg, Sub};

use crate::scalar::Scalar;

/// Coefficients in increasing degree, no trailing zeros (the zero polynomial is empty).
#[derive(Clone, Debug, PartialEq)]
pub struct Poly<S> {
    coeffs: Vec<S>,
}

impl<S: Scalar> Poly<S> {
    pub fn new(mut coeffs: Vec<S>) -> Self {
        while coeffs.last().is_some_and(|c| c.is_zero()) {
            coeffs.pop();
        }
        Poly { coeffs }
    }

    pub fn zero() -> Self {
        Poly { coeffs: Vec::new() }
    }

    pub fn constant(c: S) -> Self {
        Self::new(vec![c])
    }

    /// `c·t^k`
    pub fn monomial(c: S, k: usize) -> Self {
        let mut v = vec![S::zero(); k + 1];
        v[k] = c;
        Self::new(v)
    }

    /// `c0 + c1·t`
    pub fn linear(c0: S, c1: S) -> Self {
        Self::new(vec![c0, c1])
    }

    pub fn coeffs(&self) -> &[S] {
        &self.coeffs
    }

    pub fn coeff(&self, k: usize) -> S {
        self.coeffs.get(k).cloned().unwrap_or_else(S::zero)
    }

    pub fn is_zero(&self) -> bool {
        self.coeffs.is_empty()
    }

    /// Degree, `None` for the zero polynomial.
    pub fn degree(&self) -> Option<usize> {
        self.coeffs.len().checked_sub(1)
    }

    pub fn lead(&self) -> S {
        self.coeffs.last().cloned().unwrap_or_else(S::zero)
    }

    pub fn eval(&self, t: &S) -> S {
        self.coeffs.iter().rev().fold(S::zero(), |acc, c| acc * t.clone() + c.clone())
    }

    pub fn scale(&self, c: &S) -> Self {
        Self::new(self.coeffs.iter().map(|x| x.clone() * c.clone()).collect())
    }

    pub fn derivative(&self) -> Self {
        Self::new(
            self.coeffs
                .iter()
                .enumerate()
                .skip(1)
                .map(|(k, c)| c.clone() * S::from_i64(k as i64))
                .collect(),
        )
    }

    /// `p(λt)`
    pub fn rescale_var(&self, lambda: &S) -> Self {
        let mut pow = S::one();
        let mut out = Vec::with_capacity(self.coeffs.len());
        for c in &self.coeffs {
            out.push(c.clone() * pow.clone());
            pow = pow * lambda.clone();
        }
        Self::new(out)
    }

    pub fn map<T: Scalar>(&self, f: impl Fn(&S) -> T) -> Poly<T> {
        Poly::new(self.coeffs.iter().map(f).collect())
    }

    /// Euclidean division; panics on a zero divisor.
    pub fn div_rem(&self, d: &Self) -> (Self, Self) {
        let dd = d.degree().expect("division by the zero polynomial");
        let mut r = self.coeffs.clone();
        let lead = d.lead();
        if r.len() <= dd {
            return (Self::zero(), self.clone());
        }
        let mut q = vec![S::zero(); r.len() - dd];
        for k in (0..q.len()).rev() {
            let c = r[k + dd].clone() / lead.clone();
            if !c.is_zero() {
                for (j, dc) in d.coeffs.iter().enumerate() {
                    r[k + j] = r[k + j].clone() - c.clone() * dc.clone();
                }
            }
            q[k] = c;
        }
        r.truncate(dd);
        (Self::new(q), Self::new(r))
    }

    pub fn monic(&self) -> Self {
        if self.is_zero() {
            return self.clone();
        }
        let l = self.lead();
        Self::new(self.coeffs.iter().map(|c| c.clone() / l.clone()).collect())
    }

    /// Monic gcd (exact arithmetic only: uses zero tests).
    pub fn gcd(a: &Self, b: &Self) -> Self {
        let (mut x, mut y) = (a.clone(), b.clone());
        while !y.is_zero() {
            let (_, r) = x.div_rem(&y);
            x = y;
            y = r;
        }
        x.monic()
    }
}

impl<S: Scalar> Add for &Poly<S> {
    type Output = Poly<S>;
    fn add(self, o: &Poly<S>) -> Poly<S> {
        let n = self.coeffs.len().max(o.coeffs.len());
        Poly::new((0..n).map(|k| self.coeff(k) + o.coeff(k)).collect())
    }
}

impl<S: Scalar> Sub for &Poly<S> {
    type Output = Poly<S>;
    fn sub(self, o: &Poly<S>) -> Poly<S> {
        let n = self.coeffs.len().max(o.coeffs.len());
        Poly::new((0..n).map(|k| self.coeff(k) - o.coeff(k)).collect())
    }
}

impl<S: Scalar> Mul for &Poly<S> {
    type Output = Poly<S>;
    fn mul(self, o: &Poly<S>) -> Poly<S> {
        if self.is_zero() || o.is_zero() {
            return Poly::zero();
        }
        let mut v = vec![S::zero(); self.coeffs.len() + o.coeffs.len() - 1];
        for (i, a) in self.coeffs.iter().enumerate() {
            if a.is_zero() {
                continue;
            }
            for (j, b) in o.coeffs.iter().enumerate() {
                v[i + j] = v[i + j].clone() + a.clone() * b.clone();
            }
        }
        Poly::new(v)
    }
}

impl<S: Scalar> Neg for &Poly<S> {
    type Output = Poly<S>;
    fn neg(self) -> Poly<S> {
        Poly::new(self.coeffs.iter().map(|c| -c.clone()).collect())
    }
}

macro_rules! owned_ops {
    ($tr:ident, $f:ident) => {
        impl<S: Scalar> $tr for Poly<S> {
            type Output = Poly<S>;
            fn $f(self, o: Poly<S>) -> Poly<S> {
                (&self).$f(&o)
            }
        }
    };
}
owned_ops!(Add, add);
owned_ops!(Sub, sub);
owned_ops!(Mul, mul);

impl<S: Scalar> Neg for Poly<S> {
    type Output = Poly<S>;
    fn neg(self) -> Poly<S> {
        -&self
    }
}

/// Reduced rational function `num/den` with monic denominator.
#[derive(Clone, Debug, PartialEq)]
pub struct RatFunc<S> {
    pub num: Poly<S>,
    pub den: Poly<S>,
}

impl<S: Scalar> RatFunc<S> {
    pub fn new(num: Poly<S>, den: Poly<S>) -> Self {
        assert!(!den.is_zero(), "zero denominator");
        if num.is_zero() {
            return RatFunc { num, den: Poly::constant(S::one()) };
        }
        let g = Poly::gcd(&num, &den);
        let (n, _) = num.div_rem(&g);
        let (d, _) = den.div_rem(&g);
        let l = d.lead();
        RatFunc {
            num: n.scale(&(S::one() / l.clone())),
            den: d.scale(&(S::one() / l)),
        }
    }

    pub fn from_poly(p: Poly<S>) -> Self {
        RatFunc { num: p, den: Poly::constant(S::one()) }
    }

    pub fn is_zero(&self) -> bool {
        self.num.is_zero()
    }

    pub fn add(&self, o: &Self) -> Self {
        Self::new(&(&self.num * &o.den) + &(&o.num * &self.den), &self.den * &o.den)
    }

    pub fn sub(&self, o: &Self) -> Self {
        Self::new(&(&self.num * &o.den) - &(&o.num * &self.den), &self.den * &o.den)
    }

    pub fn mul(&self, o: &Self) -> Self {
        Self::new(&self.num * &o.num, &self.den * &o.den)
    }

    pub fn div(&self, o: &Self) -> Self {
        assert!(!o.is_zero(), "division by zero rational function");
        Self::new(&self.num * &o.den, &self.den * &o.num)
    }

    pub fn neg(&self) -> Self {
        RatFunc { num: -&self.num, den: self.den.clone() }
    }

    pub fn derivative(&self) -> Self {
        Self::new(
            &(&self.num.derivative() * &self.den) - &(&self.num * &self.den.derivative()),
            &self.den * &self.den,
        )
    }

    pub fn eval(&self, t: &S) -> S {
        self.num.eval(t) / self.den.eval(t)
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::scalar::{gq, Gq};

    fn p(v: &[i64]) -> Poly<Gq> {
        Poly::new(v.iter().map(|&x| gq(x, 0)).collect())
    }

    #[test]
    fn arithmetic() {
        let a = p(&[1, 1]);
        let b = p(&[-1, 1]);
        assert_eq!(&a * &b, p(&[-1, 0, 1]));
        assert_eq!((&a + &b), p(&[0, 2]));
        assert_eq!((&a - &a), Poly::zero());
        assert_eq!(p(&[0, 0, 3]).derivative(), p(&[0, 6]));
        let (q, r) = p(&[-1, 0, 1]).div_rem(&a);
        assert_eq!(q, b);
        assert!(r.is_zero());
        assert_eq!(p(&[1, 2, 3]).rescale_var(&gq(0, 1)), p(&[1, 0, -3]) + Poly::monomial(gq(0, 2), 1));
    }

    #[test]
    fn ratfunc_reduces() {
        let r = RatFunc::new(p(&[-1, 0, 1]), p(&[2, 2]));
        assert_eq!(r.den, p(&[1]));
        assert_eq!(r.num, p(&[-1, 1]).scale(&crate::scalar::gq_ratio(1, 2)));
        let s = r.sub(&r);
        assert!(s.is_zero());
    }
}
