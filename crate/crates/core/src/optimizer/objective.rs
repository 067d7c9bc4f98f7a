//! Soft-min of pretty-good-measurement successes and its exact gradient.
//!
//! With final states `Psi = [psi_1 .. psi_D]` and Gram matrix
//! `G = Psi^dagger Psi`, the pretty-good measurement succeeds on `F_j` with
//! probability `(G^{1/2})_jj^2`.

use crate::error::{Error, Result};
use crate::linalg::{exp_i_divided_difference, CMatrix, CVector, HermitianEigen, C64, ZERO};
use crate::oracle::FunctionFamily;

use super::param::ParamAlgorithm;

/// Eigenvalues of the Gram matrix below this count as zero.
const GRAM_CUTOFF: f64 = 1e-12;

/// Objective value, exact per-function successes and (optionally) the
/// gradient with respect to `theta`.
#[derive(Clone, Debug)]
pub struct Evaluation {
    pub value: f64,
    pub successes: Vec<f64>,
    pub worst: f64,
    pub gradient: Option<Vec<f64>>,
}

/// `-tau ln(mean_j exp(-p_j / tau))`, the plain minimum at `tau = 0`.
pub fn soft_min(p: &[f64], tau: f64) -> f64 {
    let m = p.iter().copied().fold(f64::INFINITY, f64::min);
    if tau <= 0.0 {
        return m;
    }
    let mean = p.iter().map(|&x| (-(x - m) / tau).exp()).sum::<f64>() / p.len() as f64;
    m - tau * mean.ln()
}

fn soft_min_weights(p: &[f64], tau: f64) -> Vec<f64> {
    let m = p.iter().copied().fold(f64::INFINITY, f64::min);
    if tau <= 0.0 {
        let j = p.iter().position(|&x| x == m).unwrap_or(0);
        return (0..p.len()).map(|i| if i == j { 1.0 } else { 0.0 }).collect();
    }
    let e: Vec<f64> = p.iter().map(|&x| (-(x - m) / tau).exp()).collect();
    let total: f64 = e.iter().sum();
    e.into_iter().map(|x| x / total).collect()
}

/// Soft-min at temperature `tau` of the pretty-good-measurement successes.
pub fn objective(params: &ParamAlgorithm, fam: &FunctionFamily, tau: f64) -> Result<f64> {
    Ok(evaluate(params, fam, tau, false)?.value)
}

pub fn evaluate(
    params: &ParamAlgorithm,
    fam: &FunctionFamily,
    tau: f64,
    with_gradient: bool,
) -> Result<Evaluation> {
    if fam.domain_size() != params.domain_size() {
        return Err(Error::model(format!(
            "family has N = {} but parameters have N = {}",
            fam.domain_size(),
            params.domain_size()
        )));
    }
    if tau.is_nan() || tau < 0.0 {
        return Err(Error::parameter(format!("temperature must be >= 0, got {tau}")));
    }
    let d = params.dim();
    let k = params.k();
    let realized = params.realize();
    let s: CVector = realized[0].0.column(0).into_owned();
    let signs: Vec<Vec<f64>> = fam.members().iter().map(|f| params.oracle_signs(f)).collect();
    let count = signs.len();

    // Forward pass; inputs[j][i] is the state entering V_{i+1}.
    let mut inputs: Vec<Vec<CVector>> = Vec::with_capacity(count);
    let mut psi = CMatrix::zeros(d, count);
    for (j, sg) in signs.iter().enumerate() {
        let mut v = s.clone();
        let mut trace = Vec::with_capacity(k);
        for (u, _) in &realized[1..] {
            apply_signs(&mut v, sg);
            trace.push(v.clone());
            v = u * v;
        }
        psi.set_column(j, &v);
        inputs.push(trace);
    }

    let gram = psi.adjoint() * &psi;
    let eig = HermitianEigen::new(&gram);
    let root = |m: f64| if m > GRAM_CUTOFF { m.sqrt() } else { 0.0 };
    let roots: Vec<f64> = eig.values.iter().map(|&m| root(m)).collect();
    let sqrt_gram = eig.apply_fn(|m| C64::new(root(m), 0.0));
    let diag: Vec<f64> = (0..count).map(|j| sqrt_gram[(j, j)].re).collect();
    let successes: Vec<f64> = diag.iter().map(|r| r * r).collect();
    let value = soft_min(&successes, tau);
    let worst = soft_min(&successes, 0.0);
    if !with_gradient {
        return Ok(Evaluation {
            value,
            successes,
            worst,
            gradient: None,
        });
    }

    // d value / d Psi through the matrix square root.
    let weights = soft_min_weights(&successes, tau);
    let q = &eig.vectors;
    let mut c = CMatrix::zeros(count, count);
    for j in 0..count {
        c[(j, j)] = C64::new(2.0 * weights[j] * diag[j], 0.0);
    }
    let mut khat = q.adjoint() * c * q;
    for a in 0..count {
        for b in 0..count {
            let den = roots[a] + roots[b];
            let gamma = if den > GRAM_CUTOFF.sqrt() { 1.0 / den } else { 0.0 };
            khat[(a, b)] *= gamma;
        }
    }
    let a_mat = q * khat * q.adjoint();
    let grad_psi = (&psi * a_mat) * C64::new(2.0, 0.0);

    // Back through the queries, in the convention dL = Re tr(G^dagger dX).
    let mut grad_u: Vec<CMatrix> = (0..=k).map(|_| CMatrix::zeros(d, d)).collect();
    for (j, sg) in signs.iter().enumerate() {
        let mut b: CVector = grad_psi.column(j).into_owned();
        for i in (0..k).rev() {
            grad_u[i + 1] += &b * inputs[j][i].adjoint();
            b = realized[i + 1].0.adjoint() * b;
            apply_signs(&mut b, sg);
        }
        for r in 0..d {
            grad_u[0][(r, 0)] += b[r];
        }
    }

    // Back through exp(i H) and the real parameterization.
    let mut gradient = vec![0.0; (k + 1) * d * d];
    for (i, ((_, he), gu)) in realized.iter().zip(&grad_u).enumerate() {
        let p = &he.vectors;
        let mut z = p.adjoint() * gu * p;
        for a in 0..d {
            for b in 0..d {
                z[(a, b)] *= exp_i_divided_difference(he.values[a], he.values[b]).conj();
            }
        }
        let z = p * z * p.adjoint();
        let block = &mut gradient[i * d * d..(i + 1) * d * d];
        for a in 0..d {
            block[a * d + a] = z[(a, a)].re;
            for b in a + 1..d {
                block[a * d + b] = z[(a, b)].re + z[(b, a)].re;
                block[b * d + a] = z[(a, b)].im - z[(b, a)].im;
            }
        }
    }

    Ok(Evaluation {
        value,
        successes,
        worst,
        gradient: Some(gradient),
    })
}

fn apply_signs(v: &mut CVector, signs: &[f64]) {
    for (z, &s) in v.iter_mut().zip(signs) {
        if s < 0.0 {
            *z = ZERO - *z;
        }
    }
}
