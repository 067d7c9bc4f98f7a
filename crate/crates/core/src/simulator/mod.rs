//! State-vector execution of `k`-query algorithms and projective
//! measurement of the final states.

mod algorithm;
pub mod io;
mod measurement;
mod operator;
mod space;

use nalgebra::DMatrix;
use rayon::prelude::*;

pub use algorithm::{Algorithm, QuantumState, NORM_TOL};
pub use measurement::{Measurement, SparseVector, ORTHO_TOL};
pub use operator::{Operator, UNITARITY_TOL};
pub use space::{BasisLabel, Picture, Space};

use crate::error::{Error, Result};
use crate::oracle::{BooleanFunction, FunctionFamily};

/// `||P_l psi||^2` for each outcome `l`.
pub fn outcome_probabilities(state: &QuantumState, m: &Measurement) -> Result<Vec<f64>> {
    m.probabilities(&state.amplitudes)
}

/// `run` followed by measurement.
pub fn run_and_measure(alg: &Algorithm, m: &Measurement, f: &BooleanFunction) -> Result<Vec<f64>> {
    outcome_probabilities(&alg.run(f)?, m)
}

/// Entry `(l, j)` is the probability of announcing outcome `l` when the
/// oracle holds family member `j`.
#[derive(Clone, Debug, PartialEq)]
pub struct SuccessMatrix {
    pub matrix: DMatrix<f64>,
}

impl SuccessMatrix {
    pub fn size(&self) -> usize {
        self.matrix.ncols()
    }

    /// `P(announce j | oracle holds F_j)` for each `j`.
    pub fn diagonal(&self) -> Vec<f64> {
        (0..self.matrix.ncols()).map(|j| self.matrix[(j, j)]).collect()
    }

    pub fn worst_case_success(&self) -> f64 {
        self.diagonal().into_iter().fold(f64::INFINITY, f64::min)
    }

    /// Largest `|column sum - 1|`.
    pub fn column_sum_defect(&self) -> f64 {
        (0..self.matrix.ncols())
            .map(|j| (self.matrix.column(j).sum() - 1.0).abs())
            .fold(0.0, f64::max)
    }

    pub fn max_deviation(&self, other: &SuccessMatrix) -> f64 {
        (&self.matrix - &other.matrix).abs().max()
    }

    /// Rows as nested vectors, row `l` = outcome `l`.
    pub fn rows(&self) -> Vec<Vec<f64>> {
        self.matrix
            .row_iter()
            .map(|r| r.iter().copied().collect())
            .collect()
    }
}

/// Success probabilities of `alg` + `m` on every member of `fam`.
pub fn success_matrix(alg: &Algorithm, m: &Measurement, fam: &FunctionFamily) -> Result<SuccessMatrix> {
    if m.outcome_count() != fam.len() {
        return Err(Error::validation(format!(
            "measurement has {} outcomes but the family has {} members",
            m.outcome_count(),
            fam.len()
        )));
    }
    if m.dim() != alg.space().dim() {
        return Err(Error::model("measurement and algorithm dimensions differ"));
    }
    if fam.domain_size() != alg.space().domain_size() {
        return Err(Error::model("family and algorithm domain sizes differ"));
    }
    let columns = fam
        .members()
        .par_iter()
        .map(|f| run_and_measure(alg, m, f))
        .collect::<Result<Vec<_>>>()?;
    let d = fam.len();
    Ok(SuccessMatrix {
        matrix: DMatrix::from_fn(d, d, |l, j| columns[j][l]),
    })
}
