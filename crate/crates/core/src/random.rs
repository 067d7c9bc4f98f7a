//! Random algorithms, measurements and polynomials for audits and tests.

use rand::seq::SliceRandom;
use rand::Rng;

use crate::error::Result;
use crate::linalg::{random_gaussian_matrix, random_state, random_unitary, CVector, C64};
use crate::oracle::{BooleanFunction, FunctionFamily};
use crate::poly::MultilinearPolynomial;
use crate::simulator::{Algorithm, Measurement, Operator, Space};

/// Haar-random initial state and unitaries.
pub fn random_algorithm<R: Rng + ?Sized>(rng: &mut R, space: Space, k: usize) -> Result<Algorithm> {
    let d = space.dim();
    let initial = random_state(rng, d);
    let unitaries = (0..k).map(|_| Operator::Dense(random_unitary(rng, d))).collect();
    Algorithm::new(space, initial, unitaries)
}

/// Columns of a Haar-random unitary split into `outcomes` nonempty groups.
pub fn random_measurement<R: Rng + ?Sized>(rng: &mut R, dim: usize, outcomes: usize) -> Result<Measurement> {
    assert!(outcomes >= 1 && outcomes <= dim, "need 1 <= outcomes <= dim");
    let u = random_unitary(rng, dim);
    let mut owner: Vec<usize> = (0..dim).map(|i| if i < outcomes { i } else { rng.random_range(0..outcomes) }).collect();
    owner.shuffle(rng);
    let mut groups: Vec<Vec<CVector>> = vec![Vec::new(); outcomes];
    for (j, &o) in owner.iter().enumerate() {
        groups[o].push(u.column(j).into_owned());
    }
    Measurement::new(dim, groups)
}

/// `size` distinct functions on `domain_size` points.
pub fn random_family<R: Rng + ?Sized>(rng: &mut R, domain_size: u32, size: usize) -> Result<FunctionFamily> {
    let mut masks: Vec<u64> = (0..1u64 << domain_size).collect();
    masks.shuffle(rng);
    masks.truncate(size);
    FunctionFamily::from_masks(domain_size, &masks)
}

/// Random function on `domain_size` points.
pub fn random_function<R: Rng + ?Sized>(rng: &mut R, domain_size: u32) -> Result<BooleanFunction> {
    let mask = rng.random::<u64>() & crate::oracle::domain_mask(domain_size);
    BooleanFunction::from_mask(domain_size, mask)
}

/// Gaussian coefficients on every subset of size `<= k`.
pub fn random_polynomial<R: Rng + ?Sized>(rng: &mut R, domain_size: u32, k: u32) -> Result<MultilinearPolynomial> {
    let mut q = MultilinearPolynomial::zero(domain_size, k)?;
    let g = random_gaussian_matrix(rng, q.coefficients().len(), 1);
    for (a, z) in q.coefficients_mut().iter_mut().zip(g.iter()) {
        *a = *z;
    }
    Ok(q)
}

/// [`random_polynomial`] rescaled so that `|Q(F0)| = 1`.
pub fn random_normalized_polynomial<R: Rng + ?Sized>(
    rng: &mut R,
    domain_size: u32,
    k: u32,
    f0: &BooleanFunction,
) -> Result<MultilinearPolynomial> {
    loop {
        let mut q = random_polynomial(rng, domain_size, k)?;
        let v = q.evaluate(f0)?;
        if v.norm() > 1e-6 {
            q.scale(C64::new(1.0, 0.0) / v);
            return Ok(q);
        }
    }
}
