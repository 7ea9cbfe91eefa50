//! Quantized Painlevé Hamiltonians as exact matrix functions on polynomials of degree ≤ m.
//!
//! `p = ℏ∂ₓ` always acts to the right of the x-coefficients, exactly as printed;
//! no reordering is done.

use std::fmt;
use std::str::FromStr;

use serde::{Deserialize, Serialize};
use serde_json::{json, Value};

use crate::error::{Error, Result};
use crate::matrix::Matrix;
use crate::matrix_fn::{RationalMatrixFunction, ScalarFn};
use crate::poly::Poly;
use crate::scalar::{format_gq, Gq, Scalar};

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub enum PainleveKind {
    II,
    III,
    IV,
    V,
    VI,
}

impl PainleveKind {
    pub const ALL: [PainleveKind; 5] =
        [PainleveKind::II, PainleveKind::III, PainleveKind::IV, PainleveKind::V, PainleveKind::VI];

    /// Which of the slots a, b, c, d the kind uses.
    pub fn slots(self) -> [bool; 4] {
        match self {
            PainleveKind::II => [true, false, false, false],
            PainleveKind::III | PainleveKind::IV => [true, true, false, false],
            PainleveKind::V => [true, true, true, false],
            PainleveKind::VI => [true, true, true, true],
        }
    }
}

impl fmt::Display for PainleveKind {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let s = match self {
            PainleveKind::II => "II",
            PainleveKind::III => "III",
            PainleveKind::IV => "IV",
            PainleveKind::V => "V",
            PainleveKind::VI => "VI",
        };
        f.write_str(s)
    }
}

impl FromStr for PainleveKind {
    type Err = Error;
    fn from_str(s: &str) -> Result<Self> {
        match s.trim().to_ascii_uppercase().as_str() {
            "II" | "2" => Ok(PainleveKind::II),
            "III" | "3" => Ok(PainleveKind::III),
            "IV" | "4" => Ok(PainleveKind::IV),
            "V" | "5" => Ok(PainleveKind::V),
            "VI" | "6" => Ok(PainleveKind::VI),
            _ => Err(Error::Parse(s.to_string())),
        }
    }
}

/// Parameters `a, b, c, d, ℏ`; slots a kind does not use must be `None`.
#[derive(Clone, Debug, PartialEq)]
pub struct ParamSet<S> {
    pub a: Option<S>,
    pub b: Option<S>,
    pub c: Option<S>,
    pub d: Option<S>,
    pub hbar: S,
}

pub type Params = ParamSet<Gq>;

impl<S: Scalar> ParamSet<S> {
    pub fn ii(a: S, hbar: S) -> Self {
        ParamSet { a: Some(a), b: None, c: None, d: None, hbar }
    }
    pub fn iii(a: S, b: S, hbar: S) -> Self {
        ParamSet { a: Some(a), b: Some(b), c: None, d: None, hbar }
    }
    pub fn iv(a: S, b: S, hbar: S) -> Self {
        Self::iii(a, b, hbar)
    }
    pub fn v(a: S, b: S, c: S, hbar: S) -> Self {
        ParamSet { a: Some(a), b: Some(b), c: Some(c), d: None, hbar }
    }
    pub fn vi(a: S, b: S, c: S, d: S, hbar: S) -> Self {
        ParamSet { a: Some(a), b: Some(b), c: Some(c), d: Some(d), hbar }
    }

    pub fn validate(&self, kind: PainleveKind) -> Result<()> {
        if self.hbar.is_zero() {
            return Err(Error::BadParamShape(format!("{kind}: hbar must be nonzero")));
        }
        let present = [self.a.is_some(), self.b.is_some(), self.c.is_some(), self.d.is_some()];
        if present != kind.slots() {
            return Err(Error::BadParamShape(format!(
                "{kind}: expected slots {:?} (a,b,c,d), got {:?}",
                kind.slots(),
                present
            )));
        }
        Ok(())
    }

    pub fn a(&self) -> S {
        self.a.clone().unwrap_or_else(S::zero)
    }
    pub fn b(&self) -> S {
        self.b.clone().unwrap_or_else(S::zero)
    }
    pub fn c(&self) -> S {
        self.c.clone().unwrap_or_else(S::zero)
    }
    pub fn d(&self) -> S {
        self.d.clone().unwrap_or_else(S::zero)
    }

    pub fn with_a(&self, a: S) -> Self {
        ParamSet { a: Some(a), ..self.clone() }
    }

    pub fn with_hbar(&self, hbar: S) -> Self {
        ParamSet { hbar, ..self.clone() }
    }

    /// `(a,b,c,d) → (−a,−b,−c,−d)`, ℏ unchanged.
    pub fn negated(&self) -> Self {
        let n = |x: &Option<S>| x.clone().map(|v| -v);
        ParamSet { a: n(&self.a), b: n(&self.b), c: n(&self.c), d: n(&self.d), hbar: self.hbar.clone() }
    }

    pub fn map<T: Scalar>(&self, f: impl Fn(&S) -> T) -> ParamSet<T> {
        ParamSet {
            a: self.a.as_ref().map(&f),
            b: self.b.as_ref().map(&f),
            c: self.c.as_ref().map(&f),
            d: self.d.as_ref().map(&f),
            hbar: f(&self.hbar),
        }
    }
}

impl Params {
    pub fn to_json(&self) -> Value {
        let f = |x: &Option<Gq>| x.as_ref().map(|v| Value::String(format_gq(v))).unwrap_or(Value::Null);
        json!({"a": f(&self.a), "b": f(&self.b), "c": f(&self.c), "d": f(&self.d), "hbar": format_gq(&self.hbar)})
    }
}

/// Which half of the invariance condition holds.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
pub enum InvarianceBranch {
    /// `a = mℏ`
    AEqualsMHbar,
    /// `b + c + d = (m − 1)ℏ`, VI only
    BcdSum,
}

#[derive(Clone, Debug, PartialEq)]
pub struct InvarianceReport<S> {
    pub holds: bool,
    pub branch: Option<InvarianceBranch>,
    /// Coefficient of `x^{m+1}` in `Ĥ·xᵐ` as a function of t.
    pub witness: ScalarFn<S>,
    /// Factors whose vanishing is the condition.
    pub factors: Vec<S>,
}

#[derive(Clone, Debug, PartialEq)]
pub struct HamiltonianMatrix<S> {
    pub kind: PainleveKind,
    pub m: usize,
    pub branch: InvarianceBranch,
    pub matrix: RationalMatrixFunction<S>,
}

/// `Σ c · xⁱ · pʲ` with `p = ℏ∂ₓ`.
#[derive(Clone, Debug)]
struct DiffOp<S> {
    terms: Vec<(usize, usize, S)>,
}

impl<S: Scalar> DiffOp<S> {
    fn new() -> Self {
        DiffOp { terms: Vec::new() }
    }

    fn term(mut self, xpow: usize, dorder: usize, c: S) -> Self {
        if !c.is_zero() {
            self.terms.push((xpow, dorder, c));
        }
        self
    }

    /// `(target degree, coefficient)` pairs of the op applied to `xᵏ`.
    fn on_monomial(&self, k: usize, hbar: &S) -> Vec<(usize, S)> {
        let mut out = Vec::new();
        for (xp, d, c) in &self.terms {
            if *d > k {
                continue;
            }
            let mut f = c.clone() * hbar.powi(*d as u32);
            for j in 0..*d {
                f = f * S::from_i64((k - j) as i64);
            }
            if !f.is_zero() {
                out.push((k - d + xp, f));
            }
        }
        out
    }
}

/// Splits the Hamiltonian's numerator as `N₀ + N₁·t` where the numerator is
/// `t(t−1)Ĥ` (VI), `tĤ` (V, III) or `Ĥ` itself (IV, II).
fn numerator_ops<S: Scalar>(kind: PainleveKind, p: &ParamSet<S>) -> (DiffOp<S>, DiffOp<S>) {
    let (a, b, c, d, h) = (p.a(), p.b(), p.c(), p.d(), p.hbar.clone());
    let one = S::one;
    let half = || S::from_ratio(1, 2);
    let n0 = DiffOp::new();
    let n1 = DiffOp::new();
    match kind {
        PainleveKind::VI => {
            let s = a.clone() + b.clone() + c.clone() + d.clone();
            let k = (b.clone() + c.clone() + d.clone() + h) * a.clone();
            (
                n0.term(3, 2, one())
                    .term(2, 2, -one())
                    .term(2, 1, -s)
                    .term(1, 1, a.clone() + b.clone() + d)
                    .term(1, 0, k.clone()),
                n1.term(1, 2, one())
                    .term(2, 2, -one())
                    .term(1, 1, a.clone() + b.clone() + c)
                    .term(0, 1, -(a + b))
                    .term(0, 0, -k),
            )
        }
        PainleveKind::V => (
            n0.term(2, 2, one())
                .term(1, 2, -one())
                .term(1, 1, -(b.clone() + c.clone()))
                .term(0, 1, b.clone())
                .term(0, 0, a.clone() * (b + c - a.clone() + h)),
            n1.term(2, 1, one()).term(1, 1, -one()).term(0, 0, a.clone()).term(1, 0, -a),
        ),
        PainleveKind::IV => (
            n0.term(1, 2, one()).term(2, 1, one()).term(0, 1, -b.clone()).term(1, 0, -a.clone()),
            n1.term(1, 1, -one()).term(0, 0, -(a - b.clone() - b)),
        ),
        PainleveKind::III => (
            n0.term(2, 2, one()).term(2, 1, -one()).term(1, 1, -b).term(1, 0, a),
            n1.term(0, 1, -one()),
        ),
        PainleveKind::II => (
            n0.term(0, 2, half()).term(2, 1, -one()).term(1, 0, a),
            n1.term(0, 1, -half()),
        ),
    }
}

/// Matrices of `N₀, N₁` on `x⁰..xᵐ` plus the row `x^{m+1}` that must vanish.
fn numerator_matrices<S: Scalar>(
    kind: PainleveKind,
    p: &ParamSet<S>,
    m: usize,
) -> (Matrix<S>, Matrix<S>, Vec<S>, Vec<S>) {
    let (n0, n1) = numerator_ops(kind, p);
    let mut a0: Matrix<S> = Matrix::zeros(m + 2, m + 1);
    let mut a1: Matrix<S> = Matrix::zeros(m + 2, m + 1);
    for k in 0..=m {
        for (deg, c) in n0.on_monomial(k, &p.hbar) {
            assert!(deg <= m + 1, "numerator raises degree by more than one");
            a0[(deg, k)] = a0[(deg, k)].clone() + c;
        }
        for (deg, c) in n1.on_monomial(k, &p.hbar) {
            assert!(deg <= m + 1, "numerator raises degree by more than one");
            a1[(deg, k)] = a1[(deg, k)].clone() + c;
        }
    }
    let top0 = (0..=m).map(|k| a0[(m + 1, k)].clone()).collect();
    let top1 = (0..=m).map(|k| a1[(m + 1, k)].clone()).collect();
    let trim = |a: &Matrix<S>| Matrix::from_fn(m + 1, m + 1, |i, j| a[(i, j)].clone());
    (trim(&a0), trim(&a1), top0, top1)
}

/// Splits `(N₀ + N₁t)/den(t)` into the five-component form.
fn assemble<S: Scalar>(kind: PainleveKind, n0: Matrix<S>, n1: Matrix<S>) -> RationalMatrixFunction<S> {
    let mut f = RationalMatrixFunction::zeros(n0.rows());
    match kind {
        PainleveKind::VI => {
            // (A + Bt)/(t(t−1)) = −A/t + (A+B)/(t−1)
            f.r1 = &n0 + &n1;
            f.r0 = -&n0;
        }
        PainleveKind::V | PainleveKind::III => {
            f.m0 = n1;
            f.r0 = n0;
        }
        PainleveKind::IV | PainleveKind::II => {
            f.m0 = n0;
            f.m1 = n1;
        }
    }
    f
}

fn scalar_assemble<S: Scalar>(kind: PainleveKind, c0: S, c1: S) -> ScalarFn<S> {
    let mut one = Matrix::zeros(1, 1);
    one[(0, 0)] = c0;
    let mut two = Matrix::zeros(1, 1);
    two[(0, 0)] = c1;
    assemble(kind, one, two).entry(0, 0)
}

pub fn invariance_condition<S: Scalar>(
    kind: PainleveKind,
    params: &ParamSet<S>,
    m: usize,
) -> Result<InvarianceReport<S>> {
    params.validate(kind)?;
    let (n0, n1) = numerator_ops(kind, params);
    let lead = |op: &DiffOp<S>| {
        op.on_monomial(m, &params.hbar)
            .into_iter()
            .filter(|(deg, _)| *deg == m + 1)
            .fold(S::zero(), |acc, (_, c)| acc + c)
    };
    let witness = scalar_assemble(kind, lead(&n0), lead(&n1));
    let hm = params.hbar.clone() * S::from_i64(m as i64);
    let scale = params.a().magnitude().max(hm.magnitude());
    let f_a = params.a() - hm;
    let mut factors = vec![f_a.clone()];
    let mut branch = None;
    if f_a.negligible(scale) {
        branch = Some(InvarianceBranch::AEqualsMHbar);
    }
    if kind == PainleveKind::VI {
        let f_bcd = params.b() + params.c() + params.d()
            - params.hbar.clone() * S::from_i64(m as i64 - 1);
        let scale = [params.b(), params.c(), params.d(), params.hbar.clone()]
            .iter()
            .fold(0.0f64, |s, x| s.max(x.magnitude()))
            * (m as f64 + 1.0);
        if branch.is_none() && f_bcd.negligible(scale) {
            branch = Some(InvarianceBranch::BcdSum);
        }
        factors.push(f_bcd);
    }
    Ok(InvarianceReport { holds: branch.is_some(), branch, witness, factors })
}

pub fn build_hamiltonian_matrix<S: Scalar>(
    kind: PainleveKind,
    params: &ParamSet<S>,
    m: usize,
) -> Result<HamiltonianMatrix<S>> {
    let inv = invariance_condition(kind, params, m)?;
    let Some(branch) = inv.branch else {
        return Err(Error::InvarianceViolated(format!(
            "{kind}, m={m}: leading factors {:?} are all nonzero",
            inv.factors
        )));
    };
    let (n0, n1, top0, top1) = numerator_matrices(kind, params, m);
    let scale = n0.to_rows().iter().chain(n1.to_rows().iter()).flatten().fold(0.0f64, |s, c| s.max(c.magnitude()));
    if top0.iter().chain(&top1).any(|c| !c.negligible(scale)) {
        return Err(Error::InvarianceViolated(format!("{kind}, m={m}: x^(m+1) row nonzero")));
    }
    Ok(HamiltonianMatrix { kind, m, branch, matrix: assemble(kind, n0, n1) })
}

/// The matrix of `Ĥ′_J`: the same expansion with ℏ replaced by −ℏ everywhere.
pub fn hbar_flipped_matrix<S: Scalar>(
    kind: PainleveKind,
    params: &ParamSet<S>,
    m: usize,
) -> Result<RationalMatrixFunction<S>> {
    let flipped = params.with_hbar(-params.hbar.clone());
    build_hamiltonian_matrix(kind, &flipped, m).map(|h| h.matrix)
}

fn xpoly<S: Scalar>(v: &[S]) -> Poly<S> {
    Poly::new(v.to_vec())
}

/// Applies `Ĥ_J(t)` to a polynomial given by coefficients, straight from the
/// printed formulas (independent of the matrix builder). Output has one more
/// coefficient than the input.
pub fn apply_hamiltonian<S: Scalar>(
    kind: PainleveKind,
    params: &ParamSet<S>,
    poly: &[S],
    t: &S,
) -> Result<Vec<S>> {
    params.validate(kind)?;
    let (a, b, c, d, h) = (params.a(), params.b(), params.c(), params.d(), params.hbar.clone());
    let pole0 = matches!(kind, PainleveKind::VI | PainleveKind::V | PainleveKind::III);
    if pole0 && t.is_zero() {
        return Err(Error::PoleAtT(format!("{t:?}")));
    }
    if kind == PainleveKind::VI && (t.clone() - S::one()).is_zero() {
        return Err(Error::PoleAtT(format!("{t:?}")));
    }
    let phi = xpoly(poly);
    let dphi = phi.derivative().scale(&h);
    let ddphi = phi.derivative().derivative().scale(&(h.clone() * h.clone()));
    let x = Poly::monomial(S::one(), 1);
    let cst = |v: S| Poly::constant(v);
    let x_minus = |v: S| &x - &cst(v);

    let out = match kind {
        PainleveKind::VI => {
            let c2 = &(&x * &x_minus(S::one())) * &x_minus(t.clone());
            let c1 = &(&(&x_minus(S::one()) * &x_minus(t.clone())).scale(&(a.clone() + b.clone()))
                + &(&x * &x_minus(t.clone())).scale(&c))
                + &(&x * &x_minus(S::one())).scale(&d);
            let c0 = x_minus(t.clone()).scale(&((b + c + d + h) * a));
            let num = &(&(&c2 * &ddphi) - &(&c1 * &dphi)) + &(&c0 * &phi);
            num.scale(&(S::one() / (t.clone() * (t.clone() - S::one()))))
        }
        PainleveKind::V => {
            let c2 = &x * &x_minus(S::one());
            let c1 = &(&(&x * &x).scale(t) - &x.scale(&(b.clone() + c.clone() + t.clone()))) + &cst(b.clone());
            let c0 = &cst(a.clone() * (b + c - a.clone() + h + t.clone())) - &x.scale(&(a * t.clone()));
            let num = &(&(&c2 * &ddphi) + &(&c1 * &dphi)) + &(&c0 * &phi);
            num.scale(&(S::one() / t.clone()))
        }
        PainleveKind::IV => {
            let c1 = &(&(&x * &x) - &x.scale(t)) - &cst(b.clone());
            let c0 = &x.scale(&-a.clone()) - &cst((a - b.clone() - b) * t.clone());
            &(&(&x * &ddphi) + &(&c1 * &dphi)) + &(&c0 * &phi)
        }
        PainleveKind::III => {
            let c1 = &(&(&x * &x) + &x.scale(&b)) + &cst(t.clone());
            let num = &(&(&(&x * &x) * &ddphi) - &(&c1 * &dphi)) + &(&x.scale(&a) * &phi);
            num.scale(&(S::one() / t.clone()))
        }
        PainleveKind::II => {
            let c1 = &(&x * &x) + &cst(t.clone() / S::from_i64(2));
            &(&ddphi.scale(&S::from_ratio(1, 2)) - &(&c1 * &dphi)) + &(&x.scale(&a) * &phi)
        }
    };
    let mut v: Vec<S> = out.coeffs().to_vec();
    v.resize(poly.len() + 1, S::zero());
    Ok(v)
}

#[derive(Clone, Debug)]
pub struct SymmetryReport<S> {
    pub pass: bool,
    pub lhs: RationalMatrixFunction<S>,
    pub rhs: RationalMatrixFunction<S>,
    pub first_difference: Option<(&'static str, usize, usize)>,
}

/// Checks the ℏ → −ℏ proposition for `kind` as an exact identity.
///
/// `params` are the parameters of `Ĥ′` (so `a = −mℏ`); the right side is built
/// from the original Hamiltonian at negated parameters.
pub fn verify_symmetry<S: Scalar>(
    kind: PainleveKind,
    params: &ParamSet<S>,
    m: usize,
) -> Result<SymmetryReport<S>> {
    let lhs = hbar_flipped_matrix(kind, params, m)?;
    let orig = build_hamiltonian_matrix(kind, &params.negated(), m)?.matrix;
    let n = m + 1;
    let sign_diag = || Matrix::diag((0..n).map(|j| if j % 2 == 0 { S::one() } else { -S::one() }).collect());
    let rhs = match kind {
        PainleveKind::VI => orig,
        PainleveKind::V => orig.rescale_time(&-S::one())?.scale(&-S::one()),
        PainleveKind::III | PainleveKind::II => {
            let dm = sign_diag();
            orig.sandwich(&dm, &dm)
        }
        PainleveKind::IV => {
            let i = S::imag_unit();
            let d = Matrix::diag((0..n).map(|j| i.powi(j as u32)).collect());
            let dinv = Matrix::diag((0..n).map(|j| (-i.clone()).powi(j as u32)).collect());
            orig.rescale_time(&i)?.sandwich(&d, &dinv).scale(&i)
        }
    };
    let first_difference = lhs.first_difference(&rhs);
    Ok(SymmetryReport { pass: first_difference.is_none(), lhs, rhs, first_difference })
}

impl InvarianceReport<Gq> {
    pub fn to_json(&self) -> Value {
        let w = &self.witness;
        json!({
            "holds": self.holds,
            "branch": self.branch,
            "factors": self.factors.iter().map(format_gq).collect::<Vec<_>>(),
            "witness": {"c0": format_gq(&w.c0), "c1": format_gq(&w.c1), "c2": format_gq(&w.c2), "r0": format_gq(&w.r0), "r1": format_gq(&w.r1)},
        })
    }
}

impl HamiltonianMatrix<Gq> {
    pub fn to_json(&self) -> Value {
        json!({"kind": self.kind.to_string(), "m": self.m, "branch": self.branch, "matrix": self.matrix.to_json()})
    }
}

impl SymmetryReport<Gq> {
    pub fn to_json(&self) -> Value {
        json!({
            "pass": self.pass,
            "first_difference": self.first_difference.map(|(c, i, j)| json!({"component": c, "row": i, "col": j})),
        })
    }
}
