//! Moving VI Schrödinger solutions to solutions of the KZ equation on W_m.

use num_complex::Complex;
use serde_json::{json, Value};

use crate::error::{Error, Result};
use crate::hamiltonians::{PainleveKind, Params};
use crate::scalar::{gq_to_complex, Gq, Real};
use crate::weights::cjson;

use super::cases::{hamiltonian_matrix_kz, printed_highest_weight, t_map, verify_theorem};

type C<F> = Complex<F>;

/// One Φ sample: time, coefficients, and their t-derivative.
#[derive(Clone, Debug)]
pub struct PhiSample<F> {
    pub t: C<F>,
    pub phi: Vec<C<F>>,
    pub dphi: Vec<C<F>>,
}

#[derive(Clone, Debug)]
pub struct PsiSample<F> {
    pub t: C<F>,
    pub psi: Vec<C<F>>,
    pub dpsi: Vec<C<F>>,
    /// `|κΨ′ − H_KZΨ|∞ / max(|κΨ′|∞, |H_KZΨ|∞)`.
    pub residual: F,
}

#[derive(Clone, Debug)]
pub struct Transport<F> {
    pub m: usize,
    /// Exponents of `t` and `t − 1` in the scalar prefactor.
    pub alpha: C<F>,
    pub beta: C<F>,
    pub samples: Vec<PsiSample<F>>,
    pub max_residual: F,
}

impl<F: Real> Transport<F> {
    pub fn to_json(&self) -> Value {
        json!({
            "m": self.m,
            "alpha": cjson(&self.alpha),
            "beta": cjson(&self.beta),
            "max_residual": self.max_residual.to_f64().unwrap_or(f64::NAN),
            "samples": self.samples.iter().map(|s| json!({
                "t": cjson(&s.t),
                "psi": s.psi.iter().map(cjson).collect::<Vec<_>>(),
                "residual": s.residual.to_f64().unwrap_or(f64::NAN),
            })).collect::<Vec<_>>(),
        })
    }
}

fn inf_norm<F: Real>(v: &[C<F>]) -> F {
    v.iter().fold(F::zero(), |a, z| a.max(z.norm()))
}

/// `Ψ(t) = t^α (t−1)^β T_m⁻¹ Φ(t)` with α, β read off the verified gauge
/// scalars, and the residual of `κ∂ₜΨ = H_KZ Ψ` at each sample.
///
/// Only `κ = 1/ℏ` is expected to give a vanishing residual; other κ are
/// transported the same way and the residual reports the mismatch.
pub fn kz_solution_transport<F: Real>(
    params: &Params,
    m: usize,
    samples: &[PhiSample<F>],
    kappa: C<F>,
) -> Result<Transport<F>> {
    let case = PainleveKind::VI;
    let report = verify_theorem(case, params, m)?;
    let (s1, s2) = report.gauge.clone().expect("VI report carries the gauge");
    let h = params.hbar.clone();
    let shift = params.a() * (params.b() + params.c() + params.d() + h.clone());
    let den = gq_to_complex::<F>(&(h.clone() * h)) * kappa;
    if den.norm() == F::zero() {
        return Err(Error::InvalidArgument("kappa must be nonzero".into()));
    }
    let alpha = gq_to_complex::<F>(&s1) / den;
    let beta = gq_to_complex::<F>(&(s2 + shift)) / den;
    let hw = printed_highest_weight(case, params, m)?;
    let kz = hamiltonian_matrix_kz::<Gq>(case, &hw, m)?.map(|q| gq_to_complex::<F>(q));
    let tinv = t_map::<Gq>(case, m).inverse().expect("T_m is invertible").map(|q| gq_to_complex::<F>(q));
    let one = C::new(F::one(), F::zero());
    let mut out = Vec::with_capacity(samples.len());
    let mut max_residual = F::zero();
    for s in samples {
        if s.phi.len() != m + 1 || s.dphi.len() != m + 1 {
            return Err(Error::InvalidArgument(format!("sample needs {} coefficients", m + 1)));
        }
        let t = s.t;
        if t.norm() == F::zero() || (t - one).norm() == F::zero() {
            return Err(Error::PoleAtT(format!("{t}")));
        }
        let pre = (t.ln() * alpha + (t - one).ln() * beta).exp();
        let logd = alpha / t + beta / (t - one);
        let u = tinv.mul_vec(&s.phi);
        let du = tinv.mul_vec(&s.dphi);
        let psi: Vec<C<F>> = u.iter().map(|x| x * pre).collect();
        let dpsi: Vec<C<F>> = u.iter().zip(&du).map(|(x, dx)| (dx + x * logd) * pre).collect();
        let hpsi = kz.eval(&t)?.mul_vec(&psi);
        let lhs: Vec<C<F>> = dpsi.iter().map(|d| d * kappa).collect();
        let diff: Vec<C<F>> = lhs.iter().zip(&hpsi).map(|(a, b)| a - b).collect();
        let scale = inf_norm(&lhs).max(inf_norm(&hpsi));
        let residual = if scale > F::zero() { inf_norm(&diff) / scale } else { F::zero() };
        max_residual = max_residual.max(residual);
        out.push(PsiSample { t, psi, dpsi, residual });
    }
    Ok(Transport { m, alpha, beta, samples: out, max_residual })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::hypergeom::{phi_m, phi_m_time_derivative};
    use crate::scalar::gq_ratio;
    use crate::ParamSet;

    fn params(m: usize) -> Params {
        ParamSet::vi(gq_ratio(m as i64, 1), gq_ratio(-5, 2), gq_ratio(-1, 2), gq_ratio(3, 10), gq_ratio(1, 1))
    }

    #[test]
    fn m0_prefactor_alone_solves() {
        let s = PhiSample { t: C::new(-0.7, 0.0), phi: vec![C::new(1.0, 0.0)], dphi: vec![C::new(0.0, 0.0)] };
        let tr = kz_solution_transport(&params(0), 0, &[s], C::new(1.0, 0.0)).unwrap();
        assert!(tr.max_residual < 1e-14);
    }

    #[test]
    fn m1_quadrature_solution_transports() {
        let p = params(1);
        let pf = p.map(|q| gq_to_complex::<f64>(q));
        let samples: Vec<_> = [-0.5, -1.0, 2.0, 3.5]
            .iter()
            .map(|&t| {
                let t = C::new(t, 0.0);
                PhiSample {
                    t,
                    phi: phi_m(PainleveKind::VI, &pf, 1, 1, t, 64).unwrap().coeffs,
                    dphi: phi_m_time_derivative(PainleveKind::VI, &pf, 1, 1, t, 64).unwrap().coeffs,
                }
            })
            .collect();
        let tr = kz_solution_transport(&p, 1, &samples, C::new(1.0, 0.0)).unwrap();
        assert!(tr.max_residual < 1e-10, "{}", tr.max_residual);
        let wrong = kz_solution_transport(&p, 1, &samples, C::new(-1.0, 0.0)).unwrap();
        assert!(wrong.max_residual > 1e-3);
    }
}
