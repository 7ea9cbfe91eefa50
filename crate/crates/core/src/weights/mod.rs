//! Master functions ρ_J, default one-cycles, moment tables and the moment
//! relations that follow from integrating total derivatives.

pub mod contour;
pub mod quadrature;

use num_complex::Complex;
use serde_json::{json, Value};

use crate::error::{Error, Result};
use crate::hamiltonians::{PainleveKind, ParamSet};
use crate::scalar::Real;

pub use contour::{contour_for_degree, default_contour, ContourSpec, QuadRule};
pub use quadrature::{gauss_legendre, pairwise_sum};

type C<F> = Complex<F>;

fn at_zero<F: Real>(z: C<F>) -> bool {
    z.re == F::zero() && z.im == F::zero()
}

/// `α·ln z`, dropped when α = 0; a zero base with α ≠ 0 is a singular point.
fn log_power<F: Real>(z: C<F>, alpha: C<F>, u: C<F>) -> Result<C<F>> {
    if at_zero(alpha) {
        return Ok(C::new(F::zero(), F::zero()));
    }
    if at_zero(z) {
        return Err(Error::SingularPoint(format!("{u}")));
    }
    Ok(alpha * z.ln())
}

/// Principal-branch `ln ρ_J(u, t)`.
pub fn log_master_function<F: Real>(kind: PainleveKind, params: &ParamSet<C<F>>, u: C<F>, t: C<F>) -> Result<C<F>> {
    log_master_at(kind, params, u, C::new(F::one(), F::zero()) - u, t)
}

/// As `log_master_function` with `1 − u` supplied separately, so nodes packed
/// against u = 1 keep their distance to it.
pub fn log_master_at<F: Real>(
    kind: PainleveKind,
    params: &ParamSet<C<F>>,
    u: C<F>,
    one_minus_u: C<F>,
    t: C<F>,
) -> Result<C<F>> {
    let one = C::new(F::one(), F::zero());
    let (a, b, c, d) = (params.a(), params.b(), params.c(), params.d());
    Ok(match kind {
        PainleveKind::VI => {
            log_power(u, -a - b - one, u)? + log_power(one_minus_u, -c - one, u)? + log_power(t - u, -d, u)?
        }
        PainleveKind::V => log_power(u, -b - one, u)? + log_power(one_minus_u, -c - one, u)? + u * t,
        PainleveKind::IV => log_power(u, -b - one, u)? - u * t + u * u * F::lit(0.5),
        PainleveKind::III => {
            if at_zero(u) {
                return Err(Error::SingularPoint(format!("{u}")));
            }
            log_power(u, -b - one, u)? + t / u - u
        }
        PainleveKind::II => -(u * t + u * u * u * F::lit(2.0 / 3.0)),
    })
}

pub fn master_function<F: Real>(kind: PainleveKind, params: &ParamSet<C<F>>, u: C<F>, t: C<F>) -> Result<C<F>> {
    log_master_function(kind, params, u, t).map(|l| l.exp())
}

/// `ρ_J` at the i-th node of a rule.
pub fn master_at_node<F: Real>(kind: PainleveKind, params: &ParamSet<C<F>>, rule: &QuadRule<F>, i: usize, t: C<F>) -> Result<C<F>> {
    log_master_at(kind, params, rule.nodes[i], rule.complement[i], t).map(|l| l.exp())
}

/// `∂ₜ ln ρ_J` and `∂ₜ² ln ρ_J`.
pub fn dt_log_master<F: Real>(kind: PainleveKind, params: &ParamSet<C<F>>, u: C<F>, t: C<F>) -> (C<F>, C<F>) {
    let z = C::new(F::zero(), F::zero());
    match kind {
        PainleveKind::II | PainleveKind::IV => (-u, z),
        PainleveKind::III => (u.inv(), z),
        PainleveKind::V => (u, z),
        PainleveKind::VI => {
            let d = params.d();
            let r = (t - u).inv();
            (-d * r, d * r * r)
        }
    }
}

/// `τ^{(k)}(t) = ∫ uᵏρ du` with first and second t-derivatives.
#[derive(Clone, Debug, PartialEq)]
pub struct MomentTable<F> {
    pub kind: PainleveKind,
    pub t: C<F>,
    pub tau: Vec<C<F>>,
    pub dtau: Vec<C<F>>,
    pub d2tau: Vec<C<F>>,
    /// `|τ_N − τ_{2N}|` per entry.
    pub err: Vec<F>,
}

/// `[re, im]` as JSON numbers.
pub fn cjson<F: Real>(z: &C<F>) -> Value {
    json!([z.re.to_f64().unwrap_or(f64::NAN), z.im.to_f64().unwrap_or(f64::NAN)])
}

impl<F: Real> MomentTable<F> {
    pub fn kmax(&self) -> usize {
        self.tau.len() - 1
    }

    pub fn to_json(&self) -> Value {
        json!({
            "kind": self.kind.to_string(),
            "t": cjson(&self.t),
            "tau": self.tau.iter().map(cjson).collect::<Vec<_>>(),
            "err": self.err.iter().map(|e| e.to_f64().unwrap_or(f64::NAN)).collect::<Vec<_>>(),
        })
    }
}

fn raw_moments<F: Real>(
    kind: PainleveKind,
    params: &ParamSet<C<F>>,
    t: C<F>,
    kmax: usize,
    rule: &QuadRule<F>,
) -> Result<[Vec<C<F>>; 3]> {
    let n = rule.nodes.len();
    let mut cols: [Vec<Vec<C<F>>>; 3] = [vec![Vec::with_capacity(n); kmax + 1], vec![Vec::with_capacity(n); kmax + 1], vec![Vec::with_capacity(n); kmax + 1]];
    for (i, (u, w)) in rule.nodes.iter().zip(&rule.weights).enumerate() {
        let base = master_at_node(kind, params, rule, i, t)? * w;
        let (l1, l2) = dt_log_master(kind, params, *u, t);
        let mut p = base;
        for k in 0..=kmax {
            cols[0][k].push(p);
            cols[1][k].push(p * l1);
            cols[2][k].push(p * (l1 * l1 + l2));
            p = p * u;
        }
    }
    Ok(cols.map(|c| c.iter().map(|v| pairwise_sum(v)).collect()))
}

/// Moments on the default contour with `nodes` points per contour piece; the
/// error column compares against a rule with twice as many nodes.
pub fn moments<F: Real>(
    kind: PainleveKind,
    params: &ParamSet<C<F>>,
    t: C<F>,
    kmax: usize,
    nodes: usize,
) -> Result<MomentTable<F>> {
    if nodes < 8 {
        return Err(Error::InvalidArgument("nodes must be at least 8".into()));
    }
    let contour = contour_for_degree(kind, params, t, kmax.max(8) + 2)?;
    let [tau, dtau, d2tau] = raw_moments(kind, params, t, kmax, &contour.rule(nodes))?;
    let [tau2, _, _] = raw_moments(kind, params, t, kmax, &contour.rule(2 * nodes))?;
    let err = tau.iter().zip(&tau2).map(|(a, b)| (a - b).norm()).collect();
    Ok(MomentTable { kind, t, tau, dtau, d2tau, err })
}

/// As `moments`, failing with `NotConverged` when an error exceeds `tol·max|τ|`.
pub fn moments_checked<F: Real>(
    kind: PainleveKind,
    params: &ParamSet<C<F>>,
    t: C<F>,
    kmax: usize,
    nodes: usize,
    tol: F,
) -> Result<MomentTable<F>> {
    let tab = moments(kind, params, t, kmax, nodes)?;
    let scale = tab.tau.iter().fold(F::zero(), |a, z| a.max(z.norm()));
    let worst = tab.err.iter().fold(F::zero(), |a, &e| a.max(e));
    if worst > tol * scale {
        return Err(Error::NotConverged(worst.to_f64().unwrap_or(f64::NAN)));
    }
    Ok(tab)
}

#[derive(Clone, Debug, PartialEq)]
pub struct IdentityReport<F> {
    /// (k, relative residual)
    pub relations: Vec<(usize, F)>,
    pub max_residual: F,
}

/// `∫ d/du(g_k ρ) du = 0` written in moments, with `g_k = uᵏ` (II, III, IV),
/// `uᵏ(1−u)` (V) or `uᵏ(1−u)(t−u)` (VI) so that the relation closes; k runs
/// over the values where the boundary terms vanish and all indices are in the table.
pub fn moment_identities<F: Real>(
    kind: PainleveKind,
    params: &ParamSet<C<F>>,
    t: C<F>,
    table: &MomentTable<F>,
) -> IdentityReport<F> {
    let tau = &table.tau;
    let kmax = tau.len() as isize - 1;
    let one = C::new(F::one(), F::zero());
    let kc = |k: usize| C::new(F::from_usize(k).unwrap(), F::zero());
    let (a, b, c, d) = (params.a(), params.b(), params.c(), params.d());
    // each relation: list of (coefficient, index)
    let mut rels: Vec<(usize, Vec<(C<F>, usize)>)> = Vec::new();
    for k in 0..=kmax.max(0) as usize {
        let terms: Option<Vec<(C<F>, isize)>> = match kind {
            PainleveKind::II => Some(vec![(kc(k), k as isize - 1), (-t, k as isize), (-one * F::lit(2.0), k as isize + 2)]),
            PainleveKind::III if k >= 2 => {
                Some(vec![(kc(k) - b - one, k as isize - 1), (-t, k as isize - 2), (-one, k as isize)])
            }
            PainleveKind::IV if k >= 1 => Some(vec![(kc(k) - b - one, k as isize - 1), (-t, k as isize), (one, k as isize + 1)]),
            PainleveKind::V if k >= 1 => Some(vec![
                (kc(k) - b - one, k as isize - 1),
                (b + c + one - kc(k) + t, k as isize),
                (-t, k as isize + 1),
            ]),
            PainleveKind::VI if k >= 1 => {
                let aa = -a - b - one;
                Some(vec![
                    (t * (kc(k) + aa), k as isize - 1),
                    (-(kc(k) + one + aa) * (one + t) + (c + one) * t + d, k as isize),
                    (kc(k) + one + aa - c - d, k as isize + 1),
                ])
            }
            _ => None,
        };
        let Some(terms) = terms else { continue };
        if terms.iter().any(|&(co, i)| i > kmax || (i < 0 && co != C::new(F::zero(), F::zero()))) {
            continue;
        }
        rels.push((k, terms.into_iter().filter(|&(_, i)| i >= 0).map(|(co, i)| (co, i as usize)).collect()));
    }
    let relations: Vec<(usize, F)> = rels
        .into_iter()
        .map(|(k, terms)| {
            let parts: Vec<C<F>> = terms.iter().map(|&(co, i)| co * tau[i]).collect();
            let scale = parts.iter().fold(F::zero(), |s, z| s + z.norm());
            let sum = parts.iter().fold(C::new(F::zero(), F::zero()), |s, z| s + z);
            (k, if scale > F::zero() { sum.norm() / scale } else { F::zero() })
        })
        .collect();
    let max_residual = relations.iter().fold(F::zero(), |m, &(_, r)| m.max(r));
    IdentityReport { relations, max_residual }
}

/// Integrand magnitude at the truncated ends of the contour relative to its peak.
pub fn decay_check<F: Real>(
    kind: PainleveKind,
    params: &ParamSet<C<F>>,
    t: C<F>,
    contour: &ContourSpec<F>,
) -> Result<F> {
    let rule = contour.rule(64);
    let mags: Vec<F> = (0..rule.nodes.len())
        .map(|i| master_at_node(kind, params, &rule, i, t).map(|r| (r * rule.weights[i]).norm()))
        .collect::<Result<_>>()?;
    let peak = mags.iter().fold(F::zero(), |a, &b| a.max(b));
    let ends: Vec<C<F>> = match *contour {
        ContourSpec::Segment { q, exp_q, .. } if exp_q.re == F::zero() && exp_q.im == F::zero() => vec![q],
        ContourSpec::Segment { .. } => vec![],
        ContourSpec::Ray { origin, direction, r_min, r_max } => vec![origin + direction * r_min, origin + direction * r_max],
        ContourSpec::TwoRay { theta_minus, theta_plus, radius } => {
            vec![C::from_polar(radius, theta_minus), C::from_polar(radius, theta_plus)]
        }
    };
    let mut worst = F::zero();
    for u in ends {
        let v = master_function(kind, params, u, t)?.norm() * (F::one() + u.norm());
        worst = worst.max(v / peak);
    }
    Ok(worst)
}
