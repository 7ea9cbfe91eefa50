//! Differential realization of three sl₂ Verma modules on ℂ[x₁,x₂,x₃]:
//! `e = ∂ᵢ`, `h = −2xᵢ∂ᵢ + γᵢ`, `f = −xᵢ²∂ᵢ + γᵢxᵢ`.

use std::collections::BTreeMap;

use crate::error::{Error, Result};
use crate::matrix::Matrix;
use crate::scalar::Scalar;

use super::algebra::{self, AlgebraSpec, Flavor, GenKind, HighestWeight, ModuleElement, SiteSpec};
use crate::poly::Poly;

pub type Exp3 = [usize; 3];

#[derive(Clone, Debug, PartialEq)]
pub struct Poly3<S> {
    pub terms: BTreeMap<Exp3, S>,
}

impl<S: Scalar> Poly3<S> {
    pub fn zero() -> Self {
        Poly3 { terms: BTreeMap::new() }
    }

    pub fn constant(c: S) -> Self {
        let mut p = Self::zero();
        p.add_term([0, 0, 0], c);
        p
    }

    pub fn var(i: usize) -> Self {
        let mut e = [0; 3];
        e[i] = 1;
        let mut p = Self::zero();
        p.add_term(e, S::one());
        p
    }

    pub fn is_zero(&self) -> bool {
        self.terms.is_empty()
    }

    pub fn add_term(&mut self, e: Exp3, c: S) {
        if c.is_zero() {
            return;
        }
        let v = self.terms.remove(&e).map_or(c.clone(), |x| x + c);
        if !v.is_zero() {
            self.terms.insert(e, v);
        }
    }

    pub fn coeff(&self, e: &Exp3) -> S {
        self.terms.get(e).cloned().unwrap_or_else(S::zero)
    }

    pub fn add(&self, o: &Self) -> Self {
        let mut out = self.clone();
        for (e, c) in &o.terms {
            out.add_term(*e, c.clone());
        }
        out
    }

    pub fn sub(&self, o: &Self) -> Self {
        self.add(&o.scale(&-S::one()))
    }

    pub fn scale(&self, c: &S) -> Self {
        let mut out = Self::zero();
        for (e, x) in &self.terms {
            out.add_term(*e, x.clone() * c.clone());
        }
        out
    }

    pub fn mul(&self, o: &Self) -> Self {
        let mut out = Self::zero();
        for (e1, c1) in &self.terms {
            for (e2, c2) in &o.terms {
                out.add_term([e1[0] + e2[0], e1[1] + e2[1], e1[2] + e2[2]], c1.clone() * c2.clone());
            }
        }
        out
    }

    pub fn pow(&self, k: usize) -> Self {
        (0..k).fold(Self::constant(S::one()), |acc, _| acc.mul(self))
    }

    pub fn diff(&self, i: usize) -> Self {
        let mut out = Self::zero();
        for (e, c) in &self.terms {
            if e[i] > 0 {
                let mut ne = *e;
                ne[i] -= 1;
                out.add_term(ne, c.clone() * S::from_i64(e[i] as i64));
            }
        }
        out
    }

    pub fn mul_var(&self, i: usize) -> Self {
        let mut out = Self::zero();
        for (e, c) in &self.terms {
            let mut ne = *e;
            ne[i] += 1;
            out.add_term(ne, c.clone());
        }
        out
    }
}

/// One generator of the i-th factor applied to `p`.
pub fn vi_differential_realization<S: Scalar>(gammas: &[S; 3], kind: GenKind, site: usize, p: &Poly3<S>) -> Poly3<S> {
    let d = p.diff(site);
    match kind {
        GenKind::E => d,
        GenKind::H => d.mul_var(site).scale(&S::from_i64(-2)).add(&p.scale(&gammas[site])),
        GenKind::F => {
            let xd = d.mul_var(site).mul_var(site).scale(&-S::one());
            xd.add(&p.mul_var(site).scale(&gammas[site]))
        }
    }
}

/// `Ω^{(i,j)} = eᵢfⱼ + fᵢeⱼ + ½hᵢhⱼ`.
pub fn casimir<S: Scalar>(gammas: &[S; 3], i: usize, j: usize, p: &Poly3<S>) -> Poly3<S> {
    let g = |k, s, q: &Poly3<S>| vi_differential_realization(gammas, k, s, q);
    let ef = g(GenKind::E, i, &g(GenKind::F, j, p));
    let fe = g(GenKind::F, i, &g(GenKind::E, j, p));
    let hh = g(GenKind::H, i, &g(GenKind::H, j, p));
    ef.add(&fe).add(&hh.scale(&S::from_ratio(1, 2)))
}

/// `(x₁−x₂)ⁱ(x₁−x₃)^{m−i}`, i = 0..m.
pub fn vi_basis<S: Scalar>(m: usize) -> Vec<Poly3<S>> {
    let a = Poly3::var(0).sub(&Poly3::var(1));
    let b = Poly3::var(0).sub(&Poly3::var(2));
    (0..=m).map(|i| a.pow(i).mul(&b.pow(m - i))).collect()
}

/// Coordinates of `p` in `vi_basis(m)`: setting x₁ = 0 turns the i-th basis
/// vector into `(−1)^m x₂ⁱx₃^{m−i}`. The guess is checked by reconstruction.
pub fn vi_coordinates<S: Scalar>(p: &Poly3<S>, m: usize) -> Result<Vec<S>> {
    let sign = if m % 2 == 0 { S::one() } else { -S::one() };
    let coords: Vec<S> = (0..=m).map(|i| p.coeff(&[0, i, m - i]) * sign.clone()).collect();
    let rebuilt = vi_basis::<S>(m)
        .iter()
        .zip(&coords)
        .fold(Poly3::zero(), |acc, (b, c)| acc.add(&b.scale(c)));
    if rebuilt != *p {
        return Err(Error::NotInSpan(format!("polynomial is not in W_{m}")));
    }
    Ok(coords)
}

/// Matrices of `Ω^{(1,2)}` and `Ω^{(2,3)}` on W_m (column i = image of basis vector i).
pub fn vi_casimir_matrices<S: Scalar>(gammas: &[S; 3], m: usize) -> Result<(Matrix<S>, Matrix<S>)> {
    let basis = vi_basis::<S>(m);
    let mut o12 = Matrix::zeros(m + 1, m + 1);
    let mut o23 = Matrix::zeros(m + 1, m + 1);
    for (i, b) in basis.iter().enumerate() {
        let c12 = vi_coordinates(&casimir(gammas, 0, 1, b), m)?;
        let c23 = vi_coordinates(&casimir(gammas, 1, 2, b), m)?;
        for j in 0..=m {
            o12[(j, i)] = c12[j].clone();
            o23[(j, i)] = c23[j].clone();
        }
    }
    Ok((o12, o23))
}

fn falling<S: Scalar>(g: &S, k: usize) -> S {
    (0..k).fold(S::one(), |acc, j| acc * (g.clone() - S::from_i64(j as i64)))
}

/// `x^α ↦ ∏ f_i^{α_i}𝟏 / (γ_i)_{α_i}` (falling factorials); needs generic γ.
pub fn poly_to_pbw<S: Scalar>(gammas: &[S; 3], p: &Poly3<S>) -> Result<ModuleElement<S>> {
    let mut out = ModuleElement::zero();
    for (e, c) in &p.terms {
        let mut norm = S::one();
        for i in 0..3 {
            norm = norm * falling(&gammas[i], e[i]);
        }
        if norm.is_zero() {
            return Err(Error::InvalidArgument("γ is a non-negative integer below the degree".into()));
        }
        let w = (0..3).map(|i| vec![0; e[i]]).collect();
        out.add_term(w, Poly::constant(c.clone() / norm));
    }
    Ok(out)
}

pub fn pbw_to_poly<S: Scalar>(gammas: &[S; 3], v: &ModuleElement<S>) -> Result<Poly3<S>> {
    let mut out = Poly3::zero();
    for (w, c) in &v.terms {
        if c.degree().unwrap_or(0) > 0 || w.len() != 3 || w.iter().flatten().any(|&q| q != 0) {
            return Err(Error::NotInSpan(format!("word {w:?} is outside the rank-0 realization")));
        }
        let e = [w[0].len(), w[1].len(), w[2].len()];
        let mut norm = S::one();
        for i in 0..3 {
            norm = norm * falling(&gammas[i], e[i]);
        }
        out.add_term(e, c.coeff(0) * norm);
    }
    Ok(out)
}

/// Three rank-0 regular sites with constant highest weights.
pub fn vi_abstract_setup<S: Scalar>(gammas: &[S; 3]) -> (AlgebraSpec, HighestWeight<S>) {
    let spec = AlgebraSpec::new(vec![SiteSpec { rank: 0, flavor: Flavor::Regular }; 3]);
    let hw = HighestWeight { gammas: gammas.iter().map(|g| vec![Poly::constant(g.clone())]).collect() };
    (spec, hw)
}

/// `Ω^{(i,j)}` computed in the abstract Verma modules by normal ordering.
pub fn casimir_abstract<S: Scalar>(
    gammas: &[S; 3],
    i: usize,
    j: usize,
    v: &ModuleElement<S>,
) -> Result<ModuleElement<S>> {
    let (spec, hw) = vi_abstract_setup(gammas);
    algebra::OperatorExpr::new()
        .term(Poly::constant(S::one()), vec![algebra::e(0, i), algebra::f(0, j)])
        .term(Poly::constant(S::one()), vec![algebra::f(0, i), algebra::e(0, j)])
        .term(Poly::constant(S::from_ratio(1, 2)), vec![algebra::h(0, i), algebra::h(0, j)])
        .apply(&spec, &hw, v)
}
