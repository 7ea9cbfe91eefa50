//! Selberg-type integral solutions Φ_m, the ℏ = 1 bordered Hankel
//! determinants P_m, and the identities relating them.

use num_complex::Complex;
use rayon::prelude::*;
use serde_json::{json, Value};

use crate::error::{Error, Result};
use crate::hamiltonians::{build_hamiltonian_matrix, PainleveKind, ParamSet};
use crate::matrix::Matrix;
use crate::scalar::Real;
use crate::weights::{contour_for_degree, dt_log_master, master_at_node, moments, pairwise_sum, MomentTable, QuadRule};

type C<F> = Complex<F>;

pub const DEFAULT_EVAL_BUDGET: u128 = 10_000_000;

/// Integrand-evaluation cap, overridable through `QPL_EVAL_BUDGET`.
pub fn eval_budget() -> u128 {
    std::env::var("QPL_EVAL_BUDGET").ok().and_then(|s| s.trim().parse().ok()).unwrap_or(DEFAULT_EVAL_BUDGET)
}

/// Coefficients of a polynomial in x, lowest degree first.
#[derive(Clone, Debug, PartialEq)]
pub struct CoeffVector<F> {
    pub m: usize,
    pub coeffs: Vec<C<F>>,
    /// Relative change against the half-node rule (pessimistic for the returned value).
    pub err: F,
}

impl<F: Real> CoeffVector<F> {
    pub fn to_json(&self) -> Value {
        json!({
            "m": self.m,
            "coeffs": self.coeffs.iter().map(crate::weights::cjson).collect::<Vec<_>>(),
            "err": self.err.to_f64().unwrap_or(f64::NAN),
        })
    }
}

fn zero<F: Real>() -> C<F> {
    C::new(F::zero(), F::zero())
}

fn cf<F: Real>(x: f64) -> C<F> {
    C::new(F::lit(x), F::zero())
}

fn binom(n: usize, k: usize) -> f64 {
    (0..k).fold(1.0, |acc, j| acc * (n - j) as f64 / (j + 1) as f64)
}

fn max_norm<F: Real>(v: &[C<F>]) -> F {
    v.iter().fold(F::zero(), |a, z| a.max(z.norm()))
}

fn rel_diff<F: Real>(a: &[C<F>], b: &[C<F>]) -> F {
    let d: Vec<C<F>> = a.iter().zip(b).map(|(x, y)| x - y).collect();
    let s = max_norm(a).max(max_norm(b));
    if s > F::zero() {
        max_norm(&d) / s
    } else {
        F::zero()
    }
}

/// Parameters with the a-slot fixed by the invariance condition: `a = mℏ`,
/// except for VI on the branch `b + c + d = (m−1)ℏ` where a is kept.
pub fn on_invariant_line<F: Real>(kind: PainleveKind, params: &ParamSet<C<F>>, hbar: u32, m: usize) -> ParamSet<C<F>> {
    let h = cf::<F>(hbar as f64);
    let p = params.with_hbar(h);
    if kind == PainleveKind::VI {
        let s = p.b() + p.c() + p.d() - h * F::from_usize(m).unwrap() + h;
        if s.norm() <= F::lit(1e-12) && p.a.is_some() {
            return p;
        }
    }
    p.with_a(h * F::from_usize(m).unwrap())
}

/// One-dimensional data shared by all tensor-product brackets.
struct Grid<F> {
    nodes: Vec<C<F>>,
    weights: Vec<C<F>>,
    dlog: Vec<C<F>>,
}

fn grid<F: Real>(kind: PainleveKind, params: &ParamSet<C<F>>, t: C<F>, rule: &QuadRule<F>) -> Result<Grid<F>> {
    let mut weights = Vec::with_capacity(rule.nodes.len());
    let mut dlog = Vec::with_capacity(rule.nodes.len());
    for (i, (u, w)) in rule.nodes.iter().zip(&rule.weights).enumerate() {
        weights.push(master_at_node(kind, params, rule, i, t)? * w);
        dlog.push(dt_log_master(kind, params, *u, t).0);
    }
    Ok(Grid { nodes: rule.nodes.clone(), weights, dlog })
}

fn tuples(n: usize, m: usize) -> u128 {
    (0..m).fold(1u128, |acc, j| acc * (n - j.min(n)) as u128 / (j as u128 + 1))
}

/// `⟨f⟩ = ∫ ∏_{i<j}(uᵢ−uⱼ)^{2ℏ} ∏ρ(uᵢ) f(u) du` for symmetric vector-valued f.
///
/// The pairwise factor vanishes on the diagonal, so the full tensor sum is
/// m! times the sum over strictly increasing index tuples. The outer index is
/// distributed over threads and reduced pairwise in index order.
fn symmetric_bracket<F, G>(g: &Grid<F>, hbar: u32, m: usize, len: usize, f: G) -> Vec<C<F>>
where
    F: Real,
    G: Fn(&[C<F>], &[C<F>], &mut [C<F>], C<F>) + Sync,
{
    if m == 0 {
        let mut acc = vec![zero(); len];
        f(&[], &[], &mut acc, cf(1.0));
        return acc;
    }
    let n = g.nodes.len();
    let p2 = 2 * hbar as i32;
    let pair: Vec<C<F>> = (0..n * n)
        .map(|k| {
            let (i, j) = (k / n, k % n);
            if i < j {
                (g.nodes[i] - g.nodes[j]).powi(p2)
            } else {
                zero()
            }
        })
        .collect();
    fn rec<F: Real, G: Fn(&[C<F>], &[C<F>], &mut [C<F>], C<F>)>(
        g: &Grid<F>,
        pair: &[C<F>],
        idx: &mut Vec<usize>,
        us: &mut Vec<C<F>>,
        dl: &mut Vec<C<F>>,
        w: C<F>,
        m: usize,
        acc: &mut [C<F>],
        f: &G,
    ) {
        let n = g.nodes.len();
        if idx.len() == m {
            f(us, dl, acc, w);
            return;
        }
        let start = idx.last().map_or(0, |&i| i + 1);
        for j in start..n {
            let mut wj = w * g.weights[j];
            for &i in idx.iter() {
                wj = wj * pair[i * n + j];
            }
            idx.push(j);
            us.push(g.nodes[j]);
            dl.push(g.dlog[j]);
            rec(g, pair, idx, us, dl, wj, m, acc, f);
            idx.pop();
            us.pop();
            dl.pop();
        }
    }
    let partial: Vec<Vec<C<F>>> = (0..n)
        .into_par_iter()
        .map(|i| {
            let mut acc = vec![zero(); len];
            let mut idx = vec![i];
            let mut us = vec![g.nodes[i]];
            let mut dl = vec![g.dlog[i]];
            rec(g, &pair, &mut idx, &mut us, &mut dl, g.weights[i], m, &mut acc, &f);
            acc
        })
        .collect();
    let fact = (1..=m).fold(1.0, |a, k| a * k as f64);
    (0..len)
        .map(|c| pairwise_sum(&partial.iter().map(|p| p[c]).collect::<Vec<_>>()) * F::lit(fact))
        .collect()
}

/// Coefficients of `∏(x − uᵢ)`, lowest degree first.
fn product_coeffs<F: Real>(us: &[C<F>]) -> Vec<C<F>> {
    let mut c = vec![cf::<F>(1.0)];
    for &u in us {
        let mut next = vec![zero(); c.len() + 1];
        for (k, &ck) in c.iter().enumerate() {
            next[k + 1] = next[k + 1] + ck;
            next[k] = next[k] - ck * u;
        }
        c = next;
    }
    c
}

struct Setup<F> {
    params: ParamSet<C<F>>,
    grids: Vec<Grid<F>>,
}

/// Grids at `nodes` and (when possible) `nodes/2` per contour piece, after the budget check.
fn setup<F: Real>(
    kind: PainleveKind,
    params: &ParamSet<C<F>>,
    hbar: u32,
    m: usize,
    t: C<F>,
    nodes: usize,
) -> Result<Setup<F>> {
    if hbar == 0 {
        return Err(Error::InvalidArgument("hbar must be a positive integer".into()));
    }
    if nodes < 8 {
        return Err(Error::InvalidArgument("nodes must be at least 8".into()));
    }
    let p = on_invariant_line(kind, params, hbar, m);
    let deg = 2 * hbar as usize * m.saturating_sub(1) + m + 2;
    let contour = contour_for_degree(kind, &p, t, deg)?;
    let sizes: Vec<usize> = if nodes / 2 >= 8 { vec![nodes, nodes / 2] } else { vec![nodes] };
    let needed: u128 = sizes.iter().map(|&s| tuples(s * contour.pieces(), m)).sum();
    let limit = eval_budget();
    if needed > limit {
        return Err(Error::BudgetExceeded { needed, limit });
    }
    let grids = sizes.iter().map(|&s| grid(kind, &p, t, &contour.rule(s))).collect::<Result<_>>()?;
    Ok(Setup { params: p, grids })
}

/// `[Φ coefficients, ∂ₜΦ coefficients]` on one grid.
fn phi_on_grid<F: Real>(g: &Grid<F>, hbar: u32, m: usize) -> (Vec<C<F>>, Vec<C<F>>) {
    let n = m + 1;
    let v = symmetric_bracket(g, hbar, m, 2 * n, |us, dl, acc, w| {
        let c = product_coeffs(us);
        let s = dl.iter().fold(zero::<F>(), |a, b| a + b);
        for k in 0..n {
            acc[k] = acc[k] + w * c[k];
            acc[n + k] = acc[n + k] + w * c[k] * s;
        }
    });
    (v[..n].to_vec(), v[n..].to_vec())
}

fn phi_pair<F: Real>(
    kind: PainleveKind,
    params: &ParamSet<C<F>>,
    hbar: u32,
    m: usize,
    t: C<F>,
    nodes: usize,
) -> Result<(CoeffVector<F>, CoeffVector<F>)> {
    let s = setup(kind, params, hbar, m, t, nodes)?;
    let (phi, dphi) = phi_on_grid(&s.grids[0], hbar, m);
    let (err, derr) = match s.grids.get(1) {
        Some(g) => {
            let (p2, d2) = phi_on_grid(g, hbar, m);
            (rel_diff(&phi, &p2), rel_diff(&dphi, &d2))
        }
        None => (F::zero(), F::zero()),
    };
    Ok((CoeffVector { m, coeffs: phi, err }, CoeffVector { m, coeffs: dphi, err: derr }))
}

/// `Φ_m(x, t) = ⟨∏(x − uᵢ)⟩` as coefficients in x.
pub fn phi_m<F: Real>(
    kind: PainleveKind,
    params: &ParamSet<C<F>>,
    hbar: u32,
    m: usize,
    t: C<F>,
    nodes: usize,
) -> Result<CoeffVector<F>> {
    phi_pair(kind, params, hbar, m, t, nodes).map(|p| p.0)
}

/// `∂ₜΦ_m` by differentiating the weights under the integral.
pub fn phi_m_time_derivative<F: Real>(
    kind: PainleveKind,
    params: &ParamSet<C<F>>,
    hbar: u32,
    m: usize,
    t: C<F>,
    nodes: usize,
) -> Result<CoeffVector<F>> {
    phi_pair(kind, params, hbar, m, t, nodes).map(|p| p.1)
}

/// Same coefficients with each `e_k(u)` rebuilt from power sums by Newton's identities.
pub fn phi_m_via_power_sums<F: Real>(
    kind: PainleveKind,
    params: &ParamSet<C<F>>,
    hbar: u32,
    m: usize,
    t: C<F>,
    nodes: usize,
) -> Result<CoeffVector<F>> {
    let s = setup(kind, params, hbar, m, t, nodes)?;
    let v = symmetric_bracket(&s.grids[0], hbar, m, m + 1, |us, _, acc, w| {
        let p: Vec<C<F>> = (0..=m).map(|k| us.iter().fold(zero::<F>(), |a, u| a + u.powi(k as i32))).collect();
        let mut e = vec![cf::<F>(1.0)];
        for k in 1..=m {
            let mut s = zero::<F>();
            for i in 1..=k {
                let term = e[k - i] * p[i];
                s = if i % 2 == 1 { s + term } else { s - term };
            }
            e.push(s / F::from_usize(k).unwrap());
        }
        for k in 0..=m {
            let sign = if (m - k) % 2 == 0 { F::one() } else { -F::one() };
            acc[k] = acc[k] + w * e[m - k] * sign;
        }
    });
    Ok(CoeffVector { m, coeffs: v, err: F::zero() })
}

fn mat_vec_norm<F: Real>(v: &[C<F>]) -> F {
    v.iter().fold(F::zero(), |a, z| a + z.norm_sqr()).sqrt()
}

/// `‖ℏΦ′ − M(t)Φ‖ / ‖M(t)Φ‖` for a coefficient vector and its t-derivative.
pub fn schrodinger_residual_of<F: Real>(
    kind: PainleveKind,
    params: &ParamSet<C<F>>,
    m: usize,
    t: C<F>,
    phi: &[C<F>],
    dphi: &[C<F>],
) -> Result<F> {
    let hm = build_hamiltonian_matrix(kind, params, m)?.matrix.eval(&t)?;
    let mphi = hm.mul_vec(phi);
    let r: Vec<C<F>> = dphi.iter().zip(&mphi).map(|(d, mp)| d * params.hbar - mp).collect();
    let den = mat_vec_norm(&mphi);
    let num = mat_vec_norm(&r);
    Ok(if den > F::zero() { num / den } else { num })
}

pub fn schrodinger_residual<F: Real>(
    kind: PainleveKind,
    params: &ParamSet<C<F>>,
    hbar: u32,
    m: usize,
    t: C<F>,
    nodes: usize,
) -> Result<F> {
    let (phi, dphi) = phi_pair(kind, params, hbar, m, t, nodes)?;
    let p = on_invariant_line(kind, params, hbar, m);
    schrodinger_residual_of(kind, &p, m, t, &phi.coeffs, &dphi.coeffs)
}

/// Bordered Hankel determinant `P_m` (ℏ = 1) and its t-derivative.
#[derive(Clone, Debug, PartialEq)]
pub struct HankelBorderedDet<F> {
    pub m: usize,
    pub coeffs: Vec<C<F>>,
    pub dcoeffs: Vec<C<F>>,
    /// Pure Hankel determinant `(τ)_m`, the leading coefficient.
    pub tau_m: C<F>,
}

impl<F: Real> HankelBorderedDet<F> {
    pub fn to_json(&self) -> Value {
        json!({
            "m": self.m,
            "coeffs": self.coeffs.iter().map(crate::weights::cjson).collect::<Vec<_>>(),
            "dcoeffs": self.dcoeffs.iter().map(crate::weights::cjson).collect::<Vec<_>>(),
            "tau_m": crate::weights::cjson(&self.tau_m),
        })
    }
}

/// `det[τ_{i+j}]_{i,j<m}` from a moment table.
pub fn hankel_det<F: Real>(table: &MomentTable<F>, m: usize) -> C<F> {
    Matrix::from_fn(m, m, |i, j| table.tau[i + j]).det()
}

/// Cofactor expansion of the bordered determinant along its bottom row
/// `1, x, …, xᵐ`; the derivative sums the row-by-row replacements.
pub fn bordered_from_table<F: Real>(table: &MomentTable<F>, m: usize) -> Result<HankelBorderedDet<F>> {
    if m == 0 {
        return Ok(HankelBorderedDet { m, coeffs: vec![cf(1.0)], dcoeffs: vec![zero()], tau_m: cf(1.0) });
    }
    if table.tau.len() < 2 * m {
        return Err(Error::InvalidArgument(format!("moment table needs index {}", 2 * m - 1)));
    }
    let mut coeffs = Vec::with_capacity(m + 1);
    let mut dcoeffs = Vec::with_capacity(m + 1);
    for j in 0..=m {
        let cols: Vec<usize> = (0..=m).filter(|&c| c != j).collect();
        let minor = |src: &Vec<C<F>>, row_override: Option<usize>| {
            Matrix::from_fn(m, m, |i, k| {
                let v = if Some(i) == row_override { src } else { &table.tau };
                v[i + cols[k]]
            })
            .det()
        };
        let sign = if (m + j) % 2 == 0 { F::one() } else { -F::one() };
        coeffs.push(minor(&table.tau, None) * sign);
        let d = (0..m).fold(zero::<F>(), |a, r| a + minor(&table.dtau, Some(r)));
        dcoeffs.push(d * sign);
    }
    let tau_m = hankel_det(table, m);
    Ok(HankelBorderedDet { m, coeffs, dcoeffs, tau_m })
}

fn unit_hbar_params<F: Real>(kind: PainleveKind, params: &ParamSet<C<F>>, m: usize) -> ParamSet<C<F>> {
    on_invariant_line(kind, params, 1, m)
}

pub fn determinant_solution<F: Real>(
    kind: PainleveKind,
    params: &ParamSet<C<F>>,
    m: usize,
    t: C<F>,
    nodes: usize,
) -> Result<HankelBorderedDet<F>> {
    let p = unit_hbar_params(kind, params, m);
    let table = moments(kind, &p, t, (2 * m).max(1), nodes)?;
    bordered_from_table(&table, m)
}

/// Schrödinger residual of `P_m` at ℏ = 1.
pub fn determinant_residual<F: Real>(
    kind: PainleveKind,
    params: &ParamSet<C<F>>,
    m: usize,
    t: C<F>,
    nodes: usize,
) -> Result<F> {
    let det = determinant_solution(kind, params, m, t, nodes)?;
    schrodinger_residual_of(kind, &unit_hbar_params(kind, params, m), m, t, &det.coeffs, &det.dcoeffs)
}

/// `∫P_m P_n ρ / Σ|pⱼqₖτ_{j+k}|` on one moment table (ρ with the supplied
/// parameters, ℏ = 1).
pub fn orthogonality_check<F: Real>(
    kind: PainleveKind,
    params: &ParamSet<C<F>>,
    m: usize,
    n: usize,
    t: C<F>,
    nodes: usize,
) -> Result<C<F>> {
    if m == n {
        return Err(Error::InvalidArgument("orthogonality needs m ≠ n".into()));
    }
    let p = params.with_hbar(cf(1.0));
    let kmax = (2 * m.max(n)).max(m + n).max(1);
    let table = moments(kind, &p, t, kmax, nodes)?;
    let pm = bordered_from_table(&table, m)?.coeffs;
    let pn = bordered_from_table(&table, n)?.coeffs;
    let mut terms = Vec::new();
    for (j, a) in pm.iter().enumerate() {
        for (k, b) in pn.iter().enumerate() {
            terms.push(a * b * table.tau[j + k]);
        }
    }
    let scale = terms.iter().fold(F::zero(), |s, z| s + z.norm());
    let v = pairwise_sum(&terms);
    Ok(if scale > F::zero() { v / scale } else { v })
}

/// `sin` of the angle between two complex coefficient vectors (0 when parallel),
/// from the component of `b` orthogonal to `a` to avoid cancellation in `1 − cos²`.
pub fn direction_deviation<F: Real>(a: &[C<F>], b: &[C<F>]) -> F {
    let na = mat_vec_norm(a);
    let nb = mat_vec_norm(b);
    if na == F::zero() || nb == F::zero() {
        return if na == nb { F::zero() } else { F::one() };
    }
    let proj = a.iter().zip(b).fold(zero::<F>(), |s, (x, y)| s + x.conj() * y) / (na * na);
    let perp: Vec<C<F>> = a.iter().zip(b).map(|(x, y)| y - x * proj).collect();
    (mat_vec_norm(&perp) / nb).min(F::one())
}

#[derive(Clone, Debug, PartialEq)]
pub struct LemmaReport<F> {
    /// (k, relative residual) of the Sym-bracket identity, k = 0..m−1.
    pub lemma: Vec<(usize, F)>,
    /// (k, relative residual) of the ⟨φ_k⟩ derivative recurrence, k = 0..m.
    pub varphi: Vec<(usize, F)>,
    pub max_residual: F,
}

impl<F: Real> LemmaReport<F> {
    pub fn to_json(&self) -> Value {
        let rows = |v: &Vec<(usize, F)>| v.iter().map(|(k, r)| json!([k, r.to_f64().unwrap_or(f64::NAN)])).collect::<Vec<_>>();
        json!({
            "lemma": rows(&self.lemma),
            "varphi": rows(&self.varphi),
            "max_residual": self.max_residual.to_f64().unwrap_or(f64::NAN),
        })
    }
}

fn rel<F: Real>(l: C<F>, r: C<F>) -> F {
    let s = l.norm().max(r.norm());
    if s > F::zero() {
        (l - r).norm() / s
    } else {
        F::zero()
    }
}

/// Checks the VI recurrences among `⟨φ_k⟩ = ⟨Sym ∏_{l≤m−k} u_l⟩` by quadrature.
pub fn verify_lemma_recurrences<F: Real>(
    params: &ParamSet<C<F>>,
    hbar: u32,
    m: usize,
    t: C<F>,
    nodes: usize,
) -> Result<LemmaReport<F>> {
    let kind = PainleveKind::VI;
    if m == 0 {
        return Ok(LemmaReport { lemma: vec![], varphi: vec![], max_residual: F::zero() });
    }
    let s = setup(kind, params, hbar, m, t, nodes)?;
    let p = &s.params;
    let (a, b, c, d) = (p.a(), p.b(), p.c(), p.d());
    let h = cf::<F>(hbar as f64);
    let n = m + 1;
    // layout: φ_k (n), ∂ₜφ_k (n), B_k (m)
    let v = symmetric_bracket(&s.grids[0], hbar, m, 2 * n + m, |us, dl, acc, w| {
        let e = elementary(us);
        let sdl = dl.iter().fold(zero::<F>(), |x, y| x + y);
        for k in 0..n {
            let phi = e[m - k] / F::lit(binom(m, m - k));
            acc[k] = acc[k] + w * phi;
            acc[n + k] = acc[n + k] + w * phi * sdl;
        }
        for k in 0..m {
            // Sym[d/(t−u_j) ∏_{l∈L} u_l], |L| = m−k−1, j ∉ L
            let r = m - k - 1;
            let mut tot = zero::<F>();
            for j in 0..m {
                let rest: Vec<C<F>> = us.iter().enumerate().filter(|&(i, _)| i != j).map(|(_, u)| *u).collect();
                tot = tot + d / (t - us[j]) * elementary(&rest)[r];
            }
            acc[2 * n + k] = acc[2 * n + k] + w * tot / F::lit(m as f64 * binom(m - 1, r));
        }
    });
    let phi = |k: isize| if k < 0 || k > m as isize { zero::<F>() } else { v[k as usize] };
    let one = cf::<F>(1.0);
    let kf = |k: usize| cf::<F>(k as f64);
    let mf = kf(m);
    let tt = t * (t - one);
    let lemma: Vec<(usize, F)> = (0..m)
        .map(|k| {
            let lhs = tt * v[2 * n + k];
            let rhs = -(a + b + d * (one - t) - kf(k) * h) * phi(k as isize + 1)
                + (a + b + c + d - (mf + kf(k) - one) * h) * phi(k as isize);
            (k, rel(lhs, rhs))
        })
        .collect();
    let varphi: Vec<(usize, F)> = (0..=m)
        .map(|k| {
            let ki = k as isize;
            let lhs = tt * v[n + k];
            let rhs = (mf - kf(k)) * t * (a + b - kf(k) * h) * phi(ki + 1)
                - ((mf - kf(k)) * t * (a + b + c + d - (mf + kf(k) - one) * h)
                    - kf(k) * (a + b + d * (one - t) - (kf(k) - one) * h))
                    * phi(ki)
                - kf(k) * (a + b + c + d - (mf + kf(k) - cf(2.0)) * h) * phi(ki - 1);
            (k, rel(lhs, rhs))
        })
        .collect();
    let max_residual = lemma.iter().chain(&varphi).fold(F::zero(), |x, &(_, r)| x.max(r));
    Ok(LemmaReport { lemma, varphi, max_residual })
}

/// `e_0..e_n` of the given values.
fn elementary<F: Real>(us: &[C<F>]) -> Vec<C<F>> {
    let mut e = vec![zero::<F>(); us.len() + 1];
    e[0] = cf(1.0);
    for (i, &u) in us.iter().enumerate() {
        for k in (1..=i + 1).rev() {
            e[k] = e[k] + e[k - 1] * u;
        }
    }
    e
}
