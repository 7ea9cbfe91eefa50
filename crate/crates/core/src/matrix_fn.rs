//! Matrix-valued rational functions `M₀ + M₁t + M₂t² + R₀/t + R₁/(t−1)`.

use serde_json::{json, Value};

use crate::error::{Error, Result};
use crate::matrix::Matrix;
use crate::scalar::{format_gq, Gq, Scalar};

pub const COMPONENTS: [&str; 5] = ["M0", "M1", "M2", "R0", "R1"];

/// Scalar analogue of `RationalMatrixFunction`.
#[derive(Clone, Debug, PartialEq)]
pub struct ScalarFn<S> {
    pub c0: S,
    pub c1: S,
    pub c2: S,
    pub r0: S,
    pub r1: S,
}

impl<S: Scalar> ScalarFn<S> {
    pub fn zero() -> Self {
        ScalarFn { c0: S::zero(), c1: S::zero(), c2: S::zero(), r0: S::zero(), r1: S::zero() }
    }

    pub fn constant(c: S) -> Self {
        ScalarFn { c0: c, ..Self::zero() }
    }

    pub fn is_zero(&self) -> bool {
        [&self.c0, &self.c1, &self.c2, &self.r0, &self.r1].iter().all(|x| x.is_zero())
    }

    pub fn eval(&self, t: &S) -> Result<S> {
        let mut v = self.c0.clone() + t.clone() * (self.c1.clone() + t.clone() * self.c2.clone());
        if !self.r0.is_zero() {
            if t.is_zero() {
                return Err(Error::PoleAtT(format!("{t:?}")));
            }
            v = v + self.r0.clone() / t.clone();
        }
        if !self.r1.is_zero() {
            let s = t.clone() - S::one();
            if s.is_zero() {
                return Err(Error::PoleAtT(format!("{t:?}")));
            }
            v = v + self.r1.clone() / s;
        }
        Ok(v)
    }
}

#[derive(Clone, Debug, PartialEq)]
pub struct RationalMatrixFunction<S> {
    pub m0: Matrix<S>,
    pub m1: Matrix<S>,
    pub m2: Matrix<S>,
    pub r0: Matrix<S>,
    pub r1: Matrix<S>,
}

impl<S: Scalar> RationalMatrixFunction<S> {
    pub fn zeros(n: usize) -> Self {
        let z = Matrix::zeros(n, n);
        RationalMatrixFunction { m0: z.clone(), m1: z.clone(), m2: z.clone(), r0: z.clone(), r1: z }
    }

    pub fn constant(m0: Matrix<S>) -> Self {
        let mut f = Self::zeros(m0.rows());
        f.m0 = m0;
        f
    }

    pub fn size(&self) -> usize {
        self.m0.rows()
    }

    pub fn components(&self) -> [&Matrix<S>; 5] {
        [&self.m0, &self.m1, &self.m2, &self.r0, &self.r1]
    }

    fn zip(&self, o: &Self, f: impl Fn(&Matrix<S>, &Matrix<S>) -> Matrix<S>) -> Self {
        RationalMatrixFunction {
            m0: f(&self.m0, &o.m0),
            m1: f(&self.m1, &o.m1),
            m2: f(&self.m2, &o.m2),
            r0: f(&self.r0, &o.r0),
            r1: f(&self.r1, &o.r1),
        }
    }

    pub fn map_components(&self, f: impl Fn(&Matrix<S>) -> Matrix<S>) -> Self {
        RationalMatrixFunction {
            m0: f(&self.m0),
            m1: f(&self.m1),
            m2: f(&self.m2),
            r0: f(&self.r0),
            r1: f(&self.r1),
        }
    }

    pub fn map<T: Scalar>(&self, f: impl Fn(&S) -> T + Copy) -> RationalMatrixFunction<T> {
        RationalMatrixFunction {
            m0: self.m0.map(f),
            m1: self.m1.map(f),
            m2: self.m2.map(f),
            r0: self.r0.map(f),
            r1: self.r1.map(f),
        }
    }

    pub fn add(&self, o: &Self) -> Self {
        self.zip(o, |a, b| a + b)
    }

    pub fn sub(&self, o: &Self) -> Self {
        self.zip(o, |a, b| a - b)
    }

    pub fn scale(&self, c: &S) -> Self {
        self.map_components(|a| a.scale(c))
    }

    /// `A·F(t)·B` componentwise.
    pub fn sandwich(&self, a: &Matrix<S>, b: &Matrix<S>) -> Self {
        self.map_components(|x| &(a * x) * b)
    }

    /// Adds `s·I` to the matrix component with the given index (see `COMPONENTS`).
    pub fn add_scalar(&self, component: usize, s: &S) -> Self {
        let mut out = self.clone();
        let n = self.size();
        let target = match component {
            0 => &mut out.m0,
            1 => &mut out.m1,
            2 => &mut out.m2,
            3 => &mut out.r0,
            _ => &mut out.r1,
        };
        for i in 0..n {
            target[(i, i)] = target[(i, i)].clone() + s.clone();
        }
        out
    }

    /// `F(λt)`; needs `R₁ = 0` since `1/(λt − 1)` leaves the family.
    pub fn rescale_time(&self, lambda: &S) -> Result<Self> {
        if !self.r1.is_zero() {
            return Err(Error::InvalidArgument("time rescaling with a pole at t=1".into()));
        }
        Ok(RationalMatrixFunction {
            m0: self.m0.clone(),
            m1: self.m1.scale(lambda),
            m2: self.m2.scale(&(lambda.clone() * lambda.clone())),
            r0: self.r0.scale(&(S::one() / lambda.clone())),
            r1: self.r1.clone(),
        })
    }

    /// `t·F(t)`, using `t/(t−1) = 1 + 1/(t−1)`; needs `M₂ = 0`.
    pub fn mul_t(&self) -> Result<Self> {
        if !self.m2.is_zero() {
            return Err(Error::InvalidArgument("t·F would have degree 3".into()));
        }
        Ok(RationalMatrixFunction {
            m0: &self.r0 + &self.r1,
            m1: self.m0.clone(),
            m2: self.m1.clone(),
            r0: Matrix::zeros(self.size(), self.size()),
            r1: self.r1.clone(),
        })
    }

    pub fn eval(&self, t: &S) -> Result<Matrix<S>> {
        let mut v = &self.m0 + &(&self.m1 + &self.m2.scale(t)).scale(t);
        if !self.r0.is_zero() {
            if t.is_zero() {
                return Err(Error::PoleAtT(format!("{t:?}")));
            }
            v = &v + &self.r0.scale(&(S::one() / t.clone()));
        }
        if !self.r1.is_zero() {
            let s = t.clone() - S::one();
            if s.is_zero() {
                return Err(Error::PoleAtT(format!("{t:?}")));
            }
            v = &v + &self.r1.scale(&(S::one() / s));
        }
        Ok(v)
    }

    pub fn entry(&self, i: usize, j: usize) -> ScalarFn<S> {
        ScalarFn {
            c0: self.m0[(i, j)].clone(),
            c1: self.m1[(i, j)].clone(),
            c2: self.m2[(i, j)].clone(),
            r0: self.r0[(i, j)].clone(),
            r1: self.r1[(i, j)].clone(),
        }
    }

    /// First differing component and entry, if any.
    pub fn first_difference(&self, o: &Self) -> Option<(&'static str, usize, usize)> {
        self.components()
            .iter()
            .zip(o.components())
            .zip(COMPONENTS)
            .find_map(|((a, b), name)| a.first_difference(b).map(|(i, j)| (name, i, j)))
    }
}

pub fn matrix_json(m: &Matrix<Gq>) -> Value {
    Value::Array(
        m.to_rows()
            .iter()
            .map(|r| Value::Array(r.iter().map(|x| Value::String(format_gq(x))).collect()))
            .collect(),
    )
}

impl RationalMatrixFunction<Gq> {
    pub fn to_json(&self) -> Value {
        json!({
            "size": self.size(),
            "M0": matrix_json(&self.m0),
            "M1": matrix_json(&self.m1),
            "M2": matrix_json(&self.m2),
            "R0": matrix_json(&self.r0),
            "R1": matrix_json(&self.r1),
        })
    }
}
