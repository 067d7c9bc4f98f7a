//! Dense complex linear algebra shared by the simulator and the optimizer.

use nalgebra::{DMatrix, DVector};
use num_complex::Complex64;
use rand::Rng;
use rand_distr::StandardNormal;

use crate::error::{Error, Result};

pub type C64 = Complex64;
pub type CMatrix = DMatrix<C64>;
pub type CVector = DVector<C64>;

pub const ZERO: C64 = C64::new(0.0, 0.0);
pub const ONE: C64 = C64::new(1.0, 0.0);

/// `max |V^dagger V - I|` entrywise.
pub fn unitarity_defect(m: &CMatrix) -> f64 {
    if !m.is_square() {
        return f64::INFINITY;
    }
    let g = m.adjoint() * m - CMatrix::identity(m.nrows(), m.ncols());
    g.iter().map(|z| z.norm()).fold(0.0, f64::max)
}

/// Largest entrywise deviation from Hermiticity.
pub fn hermiticity_defect(m: &CMatrix) -> f64 {
    (m - m.adjoint()).iter().map(|z| z.norm()).fold(0.0, f64::max)
}

/// Spectral decomposition `H = P diag(lambda) P^dagger` of a Hermitian matrix.
#[derive(Clone, Debug)]
pub struct HermitianEigen {
    pub values: Vec<f64>,
    pub vectors: CMatrix,
}

impl HermitianEigen {
    pub fn new(h: &CMatrix) -> Self {
        let eig = h.clone().symmetric_eigen();
        HermitianEigen {
            values: eig.eigenvalues.iter().copied().collect(),
            vectors: eig.eigenvectors,
        }
    }

    /// `P diag(f(lambda)) P^dagger`.
    pub fn apply_fn(&self, f: impl Fn(f64) -> C64) -> CMatrix {
        let d = self.values.len();
        let mut scaled = self.vectors.clone();
        for j in 0..d {
            let fj = f(self.values[j]);
            for i in 0..d {
                scaled[(i, j)] *= fj;
            }
        }
        scaled * self.vectors.adjoint()
    }
}

/// `exp(i H)` for Hermitian `H`, returned together with the decomposition
/// that produced it.
pub fn expm_i_hermitian(h: &CMatrix) -> (CMatrix, HermitianEigen) {
    let eig = HermitianEigen::new(h);
    let u = eig.apply_fn(|l| C64::from_polar(1.0, l));
    (u, eig)
}

/// Divided difference of `exp(i x)` at `a`, `b`; the derivative when they meet.
pub fn exp_i_divided_difference(a: f64, b: f64) -> C64 {
    let half = 0.5 * (a - b);
    let sinc = if half.abs() < 1e-6 {
        1.0 - half * half / 6.0
    } else {
        half.sin() / half
    };
    C64::i() * C64::from_polar(sinc, 0.5 * (a + b))
}

/// A Hermitian `H` with `exp(i H) = u` for unitary `u`.
///
/// The eigenbasis of a normal matrix is shared by the commuting Hermitian
/// pieces `(u + u^dagger)/2` and `(u - u^dagger)/2i`; a generic real mix of
/// the two separates distinct eigenphases.
pub fn log_unitary(u: &CMatrix) -> Result<CMatrix> {
    let defect = unitarity_defect(u);
    if defect > 1e-10 {
        return Err(Error::validation(format!(
            "matrix is not unitary (defect {defect:.3e})"
        )));
    }
    let d = u.nrows();
    let re_part = (u + u.adjoint()) * C64::new(0.5, 0.0);
    let im_part = (u - u.adjoint()) * C64::new(0.0, -0.5);
    for mix in [0.618_033_988_749_894_8, 0.271_828_182_845_904_5, std::f64::consts::SQRT_2] {
        let combo = &re_part + &im_part * C64::new(mix, 0.0);
        let eig = HermitianEigen::new(&combo);
        let phases: Vec<f64> = (0..d)
            .map(|j| {
                let v = eig.vectors.column(j);
                (v.adjoint() * u * v)[(0, 0)].arg()
            })
            .collect();
        let h = HermitianEigen {
            values: phases,
            vectors: eig.vectors.clone(),
        }
        .apply_fn(|l| C64::new(l, 0.0));
        let h = (&h + h.adjoint()) * C64::new(0.5, 0.0);
        let (back, _) = expm_i_hermitian(&h);
        if (back - u).iter().map(|z| z.norm()).fold(0.0, f64::max) < 1e-9 {
            return Ok(h);
        }
    }
    Err(Error::model("could not separate the eigenphases of the unitary"))
}

/// A unitary whose first column is the unit vector `s` (Householder form).
pub fn complete_to_unitary(s: &CVector) -> Result<CMatrix> {
    let d = s.len();
    let norm = s.norm();
    if d == 0 || (norm - 1.0).abs() > 1e-10 {
        return Err(Error::validation(format!("vector norm {norm} is not 1")));
    }
    let phase = if s[0].norm() > 0.0 {
        C64::from_polar(1.0, s[0].arg())
    } else {
        ONE
    };
    let t = s * phase.conj();
    let mut v = -t;
    v[0] += ONE;
    let vn2 = v.norm_squared();
    let mut h = CMatrix::identity(d, d);
    if vn2 > 1e-30 {
        h -= (&v * v.adjoint()) * C64::new(2.0 / vn2, 0.0);
    }
    Ok(h * phase)
}

pub fn random_gaussian_matrix<R: Rng + ?Sized>(rng: &mut R, rows: usize, cols: usize) -> CMatrix {
    CMatrix::from_fn(rows, cols, |_, _| {
        C64::new(rng.sample(StandardNormal), rng.sample(StandardNormal))
    })
}

/// Haar-random unitary via QR of a complex Ginibre matrix with the phase
/// correction on the diagonal of `R`.
pub fn random_unitary<R: Rng + ?Sized>(rng: &mut R, d: usize) -> CMatrix {
    let z = random_gaussian_matrix(rng, d, d);
    let qr = z.qr();
    let (mut q, r) = (qr.q(), qr.r());
    for j in 0..d {
        let rjj = r[(j, j)];
        let ph = if rjj.norm() > 0.0 { rjj / rjj.norm() } else { ONE };
        for i in 0..d {
            q[(i, j)] *= ph;
        }
    }
    q
}

/// Uniformly random unit vector.
pub fn random_state<R: Rng + ?Sized>(rng: &mut R, d: usize) -> CVector {
    let v = CVector::from_fn(d, |_, _| {
        C64::new(rng.sample(StandardNormal), rng.sample(StandardNormal))
    });
    let n = v.norm();
    v / C64::new(n, 0.0)
}

/// In-place normalized fast Walsh–Hadamard transform on a power-of-two slice.
pub fn fwht_normalized(data: &mut [C64]) {
    let n = data.len();
    debug_assert!(n.is_power_of_two());
    fwht(data);
    let scale = 1.0 / (n as f64).sqrt();
    for z in data.iter_mut() {
        *z *= scale;
    }
}

/// Unnormalized fast Walsh–Hadamard transform: `out[s] = sum_f (-1)^{|s&f|} in[f]`.
pub fn fwht(data: &mut [C64]) {
    let n = data.len();
    let mut h = 1;
    while h < n {
        for block in (0..n).step_by(2 * h) {
            for i in block..block + h {
                let (a, b) = (data[i], data[i + h]);
                data[i] = a + b;
                data[i + h] = a - b;
            }
        }
        h *= 2;
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use rand::SeedableRng;
    use rand_chacha::ChaCha8Rng;

    fn max_diff(a: &CMatrix, b: &CMatrix) -> f64 {
        (a - b).iter().map(|z| z.norm()).fold(0.0, f64::max)
    }

    #[test]
    fn random_unitary_is_unitary() {
        let mut rng = ChaCha8Rng::seed_from_u64(1);
        for d in [1, 2, 5, 16] {
            assert!(unitarity_defect(&random_unitary(&mut rng, d)) < 1e-12);
        }
    }

    #[test]
    fn expm_matches_taylor_series() {
        let mut rng = ChaCha8Rng::seed_from_u64(2);
        let g = random_gaussian_matrix(&mut rng, 4, 4) * C64::new(0.3, 0.0);
        let h = (&g + g.adjoint()) * C64::new(0.5, 0.0);
        let (u, _) = expm_i_hermitian(&h);
        let ih = &h * C64::i();
        let mut term = CMatrix::identity(4, 4);
        let mut sum = term.clone();
        for n in 1..40 {
            term = &term * &ih / C64::new(n as f64, 0.0);
            sum += &term;
        }
        assert!(max_diff(&u, &sum) < 1e-12);
    }

    #[test]
    fn log_unitary_inverts_exp() {
        let mut rng = ChaCha8Rng::seed_from_u64(3);
        for d in [2, 3, 8] {
            let u = random_unitary(&mut rng, d);
            let h = log_unitary(&u).unwrap();
            assert!(hermiticity_defect(&h) < 1e-12);
            let (back, _) = expm_i_hermitian(&h);
            assert!(max_diff(&back, &u) < 1e-9);
        }
        // permutation with degenerate spectrum
        let mut p = CMatrix::zeros(4, 4);
        for (i, j) in [(0, 1), (1, 0), (2, 3), (3, 2)] {
            p[(i, j)] = ONE;
        }
        let (back, _) = expm_i_hermitian(&log_unitary(&p).unwrap());
        assert!(max_diff(&back, &p) < 1e-9);
    }

    #[test]
    fn completion_has_requested_first_column() {
        let mut rng = ChaCha8Rng::seed_from_u64(4);
        let s = random_state(&mut rng, 6);
        let u = complete_to_unitary(&s).unwrap();
        assert!(unitarity_defect(&u) < 1e-12);
        assert!((u.column(0) - &s).norm() < 1e-12);
        let e0 = CVector::from_fn(3, |i, _| if i == 0 { ONE } else { ZERO });
        assert!((complete_to_unitary(&e0).unwrap().column(0) - &e0).norm() < 1e-15);
    }

    #[test]
    fn fwht_matches_definition() {
        let mut rng = ChaCha8Rng::seed_from_u64(5);
        let input: Vec<C64> = random_state(&mut rng, 8).iter().copied().collect();
        let mut fast = input.clone();
        fwht(&mut fast);
        for (s, out) in fast.iter().enumerate() {
            let direct: C64 = input
                .iter()
                .enumerate()
                .map(|(f, z)| if (s & f).count_ones() % 2 == 1 { -z } else { *z })
                .sum();
            assert!((direct - out).norm() < 1e-12);
        }
    }

    #[test]
    fn divided_difference_limits() {
        let a = 0.7;
        let d = exp_i_divided_difference(a, a);
        assert!((d - C64::i() * C64::from_polar(1.0, a)).norm() < 1e-15);
        let b = 1.9;
        let exact = (C64::from_polar(1.0, a) - C64::from_polar(1.0, b)) / (a - b);
        assert!((exp_i_divided_difference(a, b) - exact).norm() < 1e-14);
    }
}
