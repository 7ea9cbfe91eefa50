//! Gauss–Legendre rules and deterministic summation.

use num_complex::Complex;

use crate::scalar::Real;

/// Nodes and weights on [−1, 1], by Newton iteration on the three-term recurrence.
pub fn gauss_legendre<F: Real>(n: usize) -> (Vec<F>, Vec<F>) {
    assert!(n >= 1, "need at least one node");
    let one = F::one();
    let two = F::lit(2.0);
    let mut x = vec![F::zero(); n];
    let mut w = vec![F::zero(); n];
    let nf = F::from_usize(n).unwrap();
    let tol = F::epsilon() * F::lit(4.0);
    for i in 0..(n + 1) / 2 {
        let mut z = (F::PI() * (F::from_usize(i).unwrap() + F::lit(0.75)) / (nf + F::lit(0.5))).cos();
        let mut dp = F::one();
        for _ in 0..100 {
            let (mut p0, mut p1) = (one, z);
            for k in 2..=n {
                let kf = F::from_usize(k).unwrap();
                let p2 = ((two * kf - one) * z * p1 - (kf - one) * p0) / kf;
                p0 = p1;
                p1 = p2;
            }
            let pn = if n == 1 { z } else { p1 };
            let pm = if n == 1 { one } else { p0 };
            dp = nf * (z * pn - pm) / (z * z - one);
            let dz = pn / dp;
            z = z - dz;
            if dz.abs() <= tol {
                break;
            }
        }
        let wi = two / ((one - z * z) * dp * dp);
        x[i] = -z;
        x[n - 1 - i] = z;
        w[i] = wi;
        w[n - 1 - i] = wi;
    }
    if n % 2 == 1 {
        x[n / 2] = F::zero();
    }
    (x, w)
}

/// Pairwise (cascade) summation; the split points depend only on the length.
pub fn pairwise_sum<F: Real>(v: &[Complex<F>]) -> Complex<F> {
    const LEAF: usize = 16;
    if v.len() <= LEAF {
        return v.iter().fold(Complex::new(F::zero(), F::zero()), |a, b| a + b);
    }
    let mid = v.len() / 2;
    pairwise_sum(&v[..mid]) + pairwise_sum(&v[mid..])
}
