//! The linear systems `ℏφ′ = M(t)φ` on polynomial states: a Dormand–Prince
//! 5(4) integrator with dense output, residuals, and the m = 1 reductions to
//! second-order scalar equations.

use num_complex::Complex;
use serde_json::{json, Value};

use crate::error::{Error, Result};
use crate::hamiltonians::{build_hamiltonian_matrix, PainleveKind, ParamSet};
use crate::matrix_fn::{RationalMatrixFunction, ScalarFn};
use crate::poly::{Poly, RatFunc};
use crate::scalar::{Real, Scalar};
use crate::weights::cjson;

type C<F> = Complex<F>;

pub const DEFAULT_MARGIN: f64 = 1e-3;

#[derive(Clone, Debug)]
pub struct LinearSystem<F> {
    pub matrix: RationalMatrixFunction<C<F>>,
    pub hbar: C<F>,
    /// Poles of the matrix, a subset of {0, 1}.
    pub singularities: Vec<C<F>>,
}

impl<F: Real> LinearSystem<F> {
    pub fn new(matrix: RationalMatrixFunction<C<F>>, hbar: C<F>) -> Self {
        let mut singularities = Vec::new();
        if !matrix.r0.is_zero() {
            singularities.push(C::new(F::zero(), F::zero()));
        }
        if !matrix.r1.is_zero() {
            singularities.push(C::new(F::one(), F::zero()));
        }
        LinearSystem { matrix, hbar, singularities }
    }

    pub fn for_kind(kind: PainleveKind, params: &ParamSet<C<F>>, m: usize) -> Result<Self> {
        let h = build_hamiltonian_matrix(kind, params, m)?;
        Ok(Self::new(h.matrix, params.hbar))
    }

    pub fn dim(&self) -> usize {
        self.matrix.size()
    }

    /// `M(t)φ/ℏ`.
    pub fn rhs(&self, t: C<F>, phi: &[C<F>]) -> Result<Vec<C<F>>> {
        let m = self.matrix.eval(&t)?;
        Ok(m.mul_vec(phi).into_iter().map(|v| v / self.hbar).collect())
    }
}

#[derive(Clone, Copy, Debug)]
pub struct Options<F> {
    pub rtol: F,
    pub atol: F,
    /// Minimal distance between the path and any singularity.
    pub margin: F,
    pub max_steps: usize,
}

impl<F: Real> Options<F> {
    pub fn new(rtol: F, atol: F) -> Self {
        Options { rtol, atol, margin: F::lit(DEFAULT_MARGIN), max_steps: 1_000_000 }
    }
}

/// Accepted steps of one integration along the segment `t(s) = t0 + s(t1 − t0)`.
#[derive(Clone, Debug)]
pub struct Trajectory<F> {
    pub t0: C<F>,
    pub t1: C<F>,
    /// Path parameter at each accepted step, strictly increasing from 0 to 1.
    pub s: Vec<F>,
    pub grid: Vec<C<F>>,
    pub states: Vec<Vec<C<F>>>,
    /// Per-step interpolation coefficients (five vectors each).
    pub dense: Vec<[Vec<C<F>>; 5]>,
}

impl<F: Real> Trajectory<F> {
    pub fn final_state(&self) -> &[C<F>] {
        self.states.last().expect("trajectory has at least one state")
    }

    /// Dense output at path parameter `s ∈ [0, 1]`.
    pub fn at_parameter(&self, s: F) -> Vec<C<F>> {
        let n = self.s.len();
        if n == 1 || s <= self.s[0] {
            return self.states[0].clone();
        }
        if s >= self.s[n - 1] {
            return self.states[n - 1].clone();
        }
        let k = self.s.partition_point(|&x| x <= s).saturating_sub(1).min(n - 2);
        let h = self.s[k + 1] - self.s[k];
        let th = (s - self.s[k]) / h;
        let th1 = F::one() - th;
        let r = &self.dense[k];
        (0..r[0].len())
            .map(|i| r[0][i] + (r[1][i] + (r[2][i] + (r[3][i] + r[4][i] * th1) * th) * th1) * th)
            .collect()
    }

    /// Dense output at a point of the segment (projected onto it).
    pub fn at(&self, t: C<F>) -> Vec<C<F>> {
        let d = self.t1 - self.t0;
        let s = ((t - self.t0) * d.conj()).re / d.norm_sqr();
        self.at_parameter(s)
    }

    pub fn to_json(&self) -> Value {
        json!({
            "t0": cjson(&self.t0),
            "t1": cjson(&self.t1),
            "grid": self.grid.iter().map(cjson).collect::<Vec<_>>(),
            "states": self.states.iter().map(|v| v.iter().map(cjson).collect::<Vec<_>>()).collect::<Vec<_>>(),
        })
    }

    /// `t,re_phi0,im_phi0,…` rows; t is the real part of the grid point.
    pub fn to_csv(&self) -> String {
        let n = self.states.first().map_or(0, |v| v.len());
        let mut out = String::from("t");
        for i in 0..n {
            out.push_str(&format!(",re_phi{i},im_phi{i}"));
        }
        out.push('\n');
        for (t, v) in self.grid.iter().zip(&self.states) {
            out.push_str(&format!("{}", t.re.to_f64().unwrap_or(f64::NAN)));
            for z in v {
                out.push_str(&format!(
                    ",{},{}",
                    z.re.to_f64().unwrap_or(f64::NAN),
                    z.im.to_f64().unwrap_or(f64::NAN)
                ));
            }
            out.push('\n');
        }
        out
    }
}

// Dormand–Prince 5(4) tableau with Hairer's dense-output weights.
const C2: f64 = 1.0 / 5.0;
const C3: f64 = 3.0 / 10.0;
const C4: f64 = 4.0 / 5.0;
const C5: f64 = 8.0 / 9.0;
const A21: f64 = 1.0 / 5.0;
const A31: f64 = 3.0 / 40.0;
const A32: f64 = 9.0 / 40.0;
const A41: f64 = 44.0 / 45.0;
const A42: f64 = -56.0 / 15.0;
const A43: f64 = 32.0 / 9.0;
const A51: f64 = 19372.0 / 6561.0;
const A52: f64 = -25360.0 / 2187.0;
const A53: f64 = 64448.0 / 6561.0;
const A54: f64 = -212.0 / 729.0;
const A61: f64 = 9017.0 / 3168.0;
const A62: f64 = -355.0 / 33.0;
const A63: f64 = 46732.0 / 5247.0;
const A64: f64 = 49.0 / 176.0;
const A65: f64 = -5103.0 / 18656.0;
const A71: f64 = 35.0 / 384.0;
const A73: f64 = 500.0 / 1113.0;
const A74: f64 = 125.0 / 192.0;
const A75: f64 = -2187.0 / 6784.0;
const A76: f64 = 11.0 / 84.0;
const E1: f64 = 71.0 / 57600.0;
const E3: f64 = -71.0 / 16695.0;
const E4: f64 = 71.0 / 1920.0;
const E5: f64 = -17253.0 / 339200.0;
const E6: f64 = 22.0 / 525.0;
const E7: f64 = -1.0 / 40.0;
const D1: f64 = -12715105075.0 / 11282082432.0;
const D3: f64 = 87487479700.0 / 32700410799.0;
const D4: f64 = -10690763975.0 / 1880347072.0;
const D5: f64 = 701980252875.0 / 199316789632.0;
const D6: f64 = -1453857185.0 / 822651844.0;
const D7: f64 = 69997945.0 / 29380423.0;

fn lin<F: Real>(y: &[C<F>], h: F, terms: &[(f64, &Vec<C<F>>)]) -> Vec<C<F>> {
    (0..y.len())
        .map(|i| {
            let s = terms.iter().fold(C::new(F::zero(), F::zero()), |a, (c, k)| a + k[i] * F::lit(*c));
            y[i] + s * h
        })
        .collect()
}

fn inf_norm<F: Real>(v: &[C<F>]) -> F {
    v.iter().fold(F::zero(), |a, z| a.max(z.norm()))
}

fn segment_distance<F: Real>(z0: C<F>, z1: C<F>, p: C<F>) -> F {
    let d = z1 - z0;
    let len2 = d.norm_sqr();
    let s = if len2 == F::zero() { F::zero() } else { (((p - z0) * d.conj()).re / len2).max(F::zero()).min(F::one()) };
    (z0 + d * s - p).norm()
}

/// Integrates along the real interval `[t0, t1]` with default margin.
pub fn integrate<F: Real>(system: &LinearSystem<F>, t0: F, t1: F, phi0: &[C<F>], rtol: F, atol: F) -> Result<Trajectory<F>> {
    integrate_segment(
        system,
        C::new(t0, F::zero()),
        C::new(t1, F::zero()),
        phi0,
        &Options::new(rtol, atol),
    )
}

/// Integrates along the straight segment `z0 → z1` in the complex t-plane.
pub fn integrate_segment<F: Real>(
    system: &LinearSystem<F>,
    z0: C<F>,
    z1: C<F>,
    phi0: &[C<F>],
    opts: &Options<F>,
) -> Result<Trajectory<F>> {
    if !(opts.rtol > F::zero() && opts.atol > F::zero()) {
        return Err(Error::InvalidArgument("rtol and atol must be positive".into()));
    }
    if phi0.len() != system.dim() {
        return Err(Error::InvalidArgument(format!("initial state needs {} entries", system.dim())));
    }
    for p in &system.singularities {
        if segment_distance(z0, z1, *p) <= opts.margin {
            return Err(Error::SingularityInInterval(format!("{p}")));
        }
    }
    let dz = z1 - z0;
    let mut traj = Trajectory { t0: z0, t1: z1, s: vec![F::zero()], grid: vec![z0], states: vec![phi0.to_vec()], dense: vec![] };
    if dz.norm() == F::zero() {
        return Ok(traj);
    }
    // dφ/ds = (t1 − t0)·M(t(s))φ/ℏ
    let f = |s: F, y: &[C<F>]| -> Result<Vec<C<F>>> {
        Ok(system.rhs(z0 + dz * s, y)?.into_iter().map(|v| v * dz).collect())
    };
    let sk = |y0: &[C<F>], y1: &[C<F>]| opts.atol + opts.rtol * inf_norm(y0).max(inf_norm(y1));

    let mut s = F::zero();
    let mut y = phi0.to_vec();
    let mut k1 = f(s, &y)?;
    // starting step from the scaled sizes of y and y′
    let mut h = {
        let sc = sk(&y, &y);
        let d0 = inf_norm(&y) / sc;
        let d1 = inf_norm(&k1) / sc;
        let h0 = if d0 < F::lit(1e-5) || d1 < F::lit(1e-5) { F::lit(1e-6) } else { F::lit(0.01) * d0 / d1 };
        let y1 = lin(&y, h0, &[(1.0, &k1)]);
        let f1 = f(h0, &y1)?;
        let d2 = f1.iter().zip(&k1).map(|(a, b)| a - b).fold(F::zero(), |a, z| a.max(z.norm())) / sc / h0;
        let m = d1.max(d2);
        let h1 = if m <= F::lit(1e-15) { (h0 * F::lit(1e-3)).max(F::lit(1e-6)) } else { (F::lit(0.01) / m).powf(F::lit(0.2)) };
        (F::lit(100.0) * h0).min(h1).min(F::one())
    };
    let safe = F::lit(0.9);
    let beta = F::lit(0.04);
    let expo1 = F::lit(0.2) - beta * F::lit(0.75);
    let (facc1, facc2) = (F::lit(5.0), F::lit(0.1));
    let mut facold = F::lit(1e-4);
    let hmin = F::lit(1e-14);
    let mut steps = 0usize;
    let mut last_rejected = false;
    while s < F::one() {
        if steps >= opts.max_steps {
            return Err(Error::StepUnderflow(format!("{} (step limit)", z0 + dz * s)));
        }
        steps += 1;
        if h < hmin {
            return Err(Error::StepUnderflow(format!("{}", z0 + dz * s)));
        }
        let last = s + h >= F::one();
        if last {
            h = F::one() - s;
        }
        let k2 = f(s + h * F::lit(C2), &lin(&y, h, &[(A21, &k1)]))?;
        let k3 = f(s + h * F::lit(C3), &lin(&y, h, &[(A31, &k1), (A32, &k2)]))?;
        let k4 = f(s + h * F::lit(C4), &lin(&y, h, &[(A41, &k1), (A42, &k2), (A43, &k3)]))?;
        let k5 = f(s + h * F::lit(C5), &lin(&y, h, &[(A51, &k1), (A52, &k2), (A53, &k3), (A54, &k4)]))?;
        let k6 = f(s + h, &lin(&y, h, &[(A61, &k1), (A62, &k2), (A63, &k3), (A64, &k4), (A65, &k5)]))?;
        let ynew = lin(&y, h, &[(A71, &k1), (A73, &k3), (A74, &k4), (A75, &k5), (A76, &k6)]);
        let k7 = f(s + h, &ynew)?;
        let e = lin(
            &vec![C::new(F::zero(), F::zero()); y.len()],
            h,
            &[(E1, &k1), (E3, &k3), (E4, &k4), (E5, &k5), (E6, &k6), (E7, &k7)],
        );
        let err = inf_norm(&e) / sk(&y, &ynew);
        let fac11 = err.powf(expo1);
        if err <= F::one() {
            let mut fac = fac11 / facold.powf(beta);
            fac = facc2.max(facc1.min(fac / safe));
            facold = err.max(F::lit(1e-4));
            let ydiff: Vec<C<F>> = ynew.iter().zip(&y).map(|(a, b)| a - b).collect();
            let bspl: Vec<C<F>> = k1.iter().zip(&ydiff).map(|(k, d)| k * h - d).collect();
            let r4: Vec<C<F>> = (0..y.len()).map(|i| ydiff[i] - k7[i] * h - bspl[i]).collect();
            let zero = vec![C::new(F::zero(), F::zero()); y.len()];
            let r5 = lin(&zero, h, &[(D1, &k1), (D3, &k3), (D4, &k4), (D5, &k5), (D6, &k6), (D7, &k7)]);
            traj.dense.push([y.clone(), ydiff, bspl, r4, r5]);
            s = if last { F::one() } else { s + h };
            y = ynew;
            k1 = k7;
            traj.s.push(s);
            traj.grid.push(if last { z1 } else { z0 + dz * s });
            traj.states.push(y.clone());
            let mut hnew = h / fac;
            if last_rejected {
                hnew = hnew.min(h);
            }
            last_rejected = false;
            h = hnew;
        } else {
            h = h / facc1.min(fac11 / safe);
            last_rejected = true;
        }
    }
    Ok(traj)
}

/// `‖ℏ·φ′ − M(t)φ‖₂ / max(1, ‖M(t)φ‖₂)`.
pub fn residual<F: Real>(system: &LinearSystem<F>, t: C<F>, state: &[C<F>], state_dt: &[C<F>]) -> Result<F> {
    let mphi = system.matrix.eval(&t)?.mul_vec(state);
    let norm = |v: &mut dyn Iterator<Item = C<F>>| v.fold(F::zero(), |a, z| a + z.norm_sqr()).sqrt();
    let num = norm(&mut state_dt.iter().zip(&mphi).map(|(d, m)| d * system.hbar - m));
    let den = norm(&mut mphi.iter().copied());
    Ok(num / den.max(F::one()))
}

fn scalar_fn_to_rat<S: Scalar>(f: &ScalarFn<S>) -> RatFunc<S> {
    let poly = RatFunc::from_poly(Poly::new(vec![f.c0.clone(), f.c1.clone(), f.c2.clone()]));
    let t = Poly::linear(S::zero(), S::one());
    let tm1 = Poly::linear(-S::one(), S::one());
    poly.add(&RatFunc::new(Poly::constant(f.r0.clone()), t)).add(&RatFunc::new(Poly::constant(f.r1.clone()), tm1))
}

/// `φ₁″ + p(t)φ₁′ + q(t)φ₁ = 0` for the m = 1 system, obtained by eliminating φ₀.
#[derive(Clone, Debug, PartialEq)]
pub struct ClassicalReduction<S> {
    pub p: RatFunc<S>,
    pub q: RatFunc<S>,
}

/// Eliminates φ₀ from `ℏφ₀′ = Aφ₀ + Bφ₁, ℏφ₁′ = Cφ₀ + Dφ₁`:
/// `p = −(C′/C + A/ℏ + D/ℏ)`, `q = ((C′/C + A/ℏ)D − CB/ℏ − D′)/ℏ`.
pub fn classical_reduction_m1<S: Scalar>(kind: PainleveKind, params: &ParamSet<S>) -> Result<ClassicalReduction<S>> {
    let hm = build_hamiltonian_matrix(kind, params, 1)?.matrix;
    let e = |i, j| scalar_fn_to_rat(&hm.entry(i, j));
    let (a, b, c, d) = (e(0, 0), e(0, 1), e(1, 0), e(1, 1));
    if c.is_zero() {
        return Err(Error::EliminationSingular);
    }
    let hinv = RatFunc::from_poly(Poly::constant(S::one() / params.hbar.clone()));
    let k = c.derivative().div(&c).add(&a.mul(&hinv));
    let p = k.add(&d.mul(&hinv)).neg();
    let q = k.mul(&d).sub(&c.mul(&b).mul(&hinv)).sub(&d.derivative()).mul(&hinv);
    Ok(ClassicalReduction { p, q })
}
