//! Concrete one-cycles for the master functions and their quadrature rules.

use num_complex::Complex;

use crate::error::{Error, Result};
use crate::hamiltonians::{PainleveKind, ParamSet};
use crate::scalar::Real;

use super::log_master_function;
use super::quadrature::gauss_legendre;

type C<F> = Complex<F>;

#[derive(Clone, Debug, PartialEq)]
pub enum ContourSpec<F> {
    /// Straight segment p → q; the integrand behaves like `(u−p)^{exp_p}` and
    /// `(u−q)^{exp_q}` at the ends.
    Segment { p: C<F>, q: C<F>, exp_p: C<F>, exp_q: C<F> },
    /// `origin + r·direction`, r ∈ [r_min, r_max], on a logarithmic scale.
    Ray { origin: C<F>, direction: C<F>, r_min: F, r_max: F },
    /// From ∞·e^{iθ₋} into 0 and out to ∞·e^{iθ₊}, truncated at `radius`.
    TwoRay { theta_minus: F, theta_plus: F, radius: F },
}

/// Nodes and complex weights of a one-dimensional rule along a contour.
#[derive(Clone, Debug)]
pub struct QuadRule<F> {
    pub nodes: Vec<C<F>>,
    pub weights: Vec<C<F>>,
    /// `1 − u` per node, accurate where u rounds to 1.
    pub complement: Vec<C<F>>,
}

const LN_TAIL: f64 = 41.4465; // ln 1e18

fn c<F: Real>(re: F) -> C<F> {
    C::new(re, F::zero())
}

/// Re log|ρ·u^deg| along `origin + r·dir` sampled on a geometric grid.
fn scan<F: Real>(
    kind: PainleveKind,
    params: &ParamSet<C<F>>,
    t: C<F>,
    dir: C<F>,
    deg: usize,
    jacobian_r: bool,
) -> Vec<(F, F)> {
    let mut out = Vec::new();
    let mut r = F::lit(1e-8);
    let step = F::lit(1.05);
    while r < F::lit(1e5) {
        let u = dir * r;
        if let Ok(l) = log_master_function(kind, params, u, t) {
            let mut v = l.re + F::from_usize(deg).unwrap() * (F::one() + r).ln();
            if jacobian_r {
                v = v + r.ln();
            }
            if v.is_finite() {
                out.push((r, v));
            }
        }
        r = r * step;
    }
    out
}

/// Smallest radius past the peak beyond which every sample is below peak·1e−18.
fn outer_radius<F: Real>(samples: &[(F, F)], what: &str) -> Result<F> {
    let (ipk, peak) = samples
        .iter()
        .enumerate()
        .fold((0, F::neg_infinity()), |acc, (i, &(_, v))| if v > acc.1 { (i, v) } else { acc });
    let cut = peak - F::lit(LN_TAIL);
    let last_above = samples.iter().rposition(|&(_, v)| v > cut).unwrap_or(ipk);
    if last_above + 1 >= samples.len() {
        return Err(Error::NoConvergentContour(format!("{what}: integrand does not decay")));
    }
    Ok(samples[last_above + 1].0)
}

fn inner_radius<F: Real>(samples: &[(F, F)], what: &str) -> Result<F> {
    let peak = samples.iter().fold(F::neg_infinity(), |a, &(_, v)| a.max(v));
    let cut = peak - F::lit(LN_TAIL);
    let first_above = samples.iter().position(|&(_, v)| v > cut).unwrap_or(0);
    if first_above == 0 {
        return Err(Error::NoConvergentContour(format!("{what}: integrand does not vanish at 0")));
    }
    Ok(samples[first_above - 1].0)
}

fn near_unit_interval<F: Real>(t: C<F>) -> bool {
    t.im.abs() <= F::epsilon() && t.re >= F::zero() && t.re <= F::one()
}

/// Default cycle per kind; `deg` bounds the polynomial degree multiplying ρ
/// (used only to place truncation radii).
pub fn contour_for_degree<F: Real>(
    kind: PainleveKind,
    params: &ParamSet<C<F>>,
    t: C<F>,
    deg: usize,
) -> Result<ContourSpec<F>> {
    params.validate(kind)?;
    let neg = |x: C<F>, name: &str| -> Result<()> {
        if x.re < F::zero() {
            Ok(())
        } else {
            Err(Error::NoConvergentContour(format!("{kind}: need Re {name} < 0")))
        }
    };
    let one = c(F::one());
    match kind {
        PainleveKind::II => {
            let th = F::lit(2.0) * F::FRAC_PI_3();
            let mut radius = F::zero();
            for s in [-F::one(), F::one()] {
                let dir = C::from_polar(F::one(), s * th);
                radius = radius.max(outer_radius(&scan(kind, params, t, dir, deg, false), "II")?);
            }
            Ok(ContourSpec::TwoRay { theta_minus: -th, theta_plus: th, radius })
        }
        PainleveKind::III => {
            if t.re >= F::zero() {
                return Err(Error::NoConvergentContour("III: need Re t < 0".into()));
            }
            let s = scan(kind, params, t, one, deg, true);
            Ok(ContourSpec::Ray {
                origin: c(F::zero()),
                direction: one,
                r_min: inner_radius(&s, "III")?,
                r_max: outer_radius(&s, "III")?,
            })
        }
        PainleveKind::IV => {
            neg(params.b(), "b")?;
            let dir = C::new(F::zero(), F::one());
            let r = outer_radius(&scan(kind, params, t, dir, deg, false), "IV")?;
            Ok(ContourSpec::Segment { p: c(F::zero()), q: dir * r, exp_p: -params.b() - one, exp_q: c(F::zero()) })
        }
        PainleveKind::V => {
            neg(params.b(), "b")?;
            neg(params.c(), "c")?;
            Ok(ContourSpec::Segment { p: c(F::zero()), q: one, exp_p: -params.b() - one, exp_q: -params.c() - one })
        }
        PainleveKind::VI => {
            neg(params.a() + params.b(), "(a+b)")?;
            neg(params.c(), "c")?;
            if near_unit_interval(t) {
                return Err(Error::NoConvergentContour("VI: t lies on [0,1]".into()));
            }
            Ok(ContourSpec::Segment {
                p: c(F::zero()),
                q: one,
                exp_p: -params.a() - params.b() - one,
                exp_q: -params.c() - one,
            })
        }
    }
}

pub fn default_contour<F: Real>(kind: PainleveKind, params: &ParamSet<C<F>>, t: C<F>) -> Result<ContourSpec<F>> {
    contour_for_degree(kind, params, t, 8)
}

/// Power σ in `u = p + (mid−p)s^σ` making `(u−p)^α du` smooth (or nearly so) in s.
pub fn absorbing_power<F: Real>(alpha: C<F>) -> usize {
    let tol = F::lit(1e-9);
    if alpha.im.abs() <= tol {
        let a1 = alpha.re + F::one();
        for q in 1..=12usize {
            let v = a1 * F::from_usize(q).unwrap();
            if (v - v.round()).abs() <= tol && v.round() >= F::one() {
                return q;
            }
        }
    }
    let a1 = (alpha.re + F::one()).max(F::lit(0.05));
    (F::lit(8.0) / a1).ceil().to_usize().unwrap_or(16).clamp(1, 16)
}

impl<F: Real> ContourSpec<F> {
    /// Rule with `n` Gauss–Legendre nodes on each piece.
    pub fn rule(&self, n: usize) -> QuadRule<F> {
        let (x, w) = gauss_legendre::<F>(n);
        let half = F::lit(0.5);
        // nodes on [0,1]
        let s: Vec<F> = x.iter().map(|&x| (x + F::one()) * half).collect();
        let ws: Vec<F> = w.iter().map(|&w| w * half).collect();
        let mut nodes = Vec::new();
        let mut weights = Vec::new();
        let mut complement = Vec::new();
        let one = c(F::one());
        let mut push_power = |from: C<F>, to: C<F>, sigma: usize, sign: F| {
            let sf = F::from_usize(sigma).unwrap();
            for (si, wi) in s.iter().zip(&ws) {
                let sp = si.powi(sigma as i32 - 1);
                nodes.push(from + (to - from) * (sp * *si));
                complement.push((one - from) - (to - from) * (sp * *si));
                weights.push((to - from) * (sf * sp * *wi * sign));
            }
        };
        match *self {
            ContourSpec::Segment { p, q, exp_p, exp_q } => {
                let mid = (p + q) * half;
                push_power(p, mid, absorbing_power(exp_p), F::one());
                push_power(q, mid, absorbing_power(exp_q), -F::one());
            }
            ContourSpec::TwoRay { theta_minus, theta_plus, radius } => {
                let zero = c(F::zero());
                let em = C::from_polar(radius, theta_minus);
                let ep = C::from_polar(radius, theta_plus);
                // incoming ray: ∞e^{iθ₋} → 0 is minus the outgoing parametrization
                push_power(zero, em * half, 1, -F::one());
                push_power(em * half, em, 1, -F::one());
                push_power(zero, ep * half, 1, F::one());
                push_power(ep * half, ep, 1, F::one());
            }
            ContourSpec::Ray { origin, direction, r_min, r_max } => {
                let (l0, l1) = (r_min.ln(), r_max.ln());
                let lm = (l0 + l1) * half;
                for (a, b) in [(l0, lm), (lm, l1)] {
                    for (si, wi) in s.iter().zip(&ws) {
                        let r = (a + (b - a) * *si).exp();
                        nodes.push(origin + direction * r);
                        complement.push(one - origin - direction * r);
                        weights.push(direction * (r * (b - a) * *wi));
                    }
                }
            }
        }
        QuadRule { nodes, weights, complement }
    }

    pub fn pieces(&self) -> usize {
        match self {
            ContourSpec::TwoRay { .. } => 4,
            _ => 2,
        }
    }
}
