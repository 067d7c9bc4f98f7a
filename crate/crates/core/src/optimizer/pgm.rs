use crate::error::{Error, Result};
use crate::linalg::{CMatrix, CVector, HermitianEigen, C64};
use crate::simulator::Measurement;

/// Eigenvalues of the ensemble operator at or below this are treated as zero.
pub const PGM_CUTOFF: f64 = 1e-12;

/// Square-root measurement for an ensemble `psi_1 .. psi_D` with equal
/// priors: `E_j = rho^{-1/2} |psi_j><psi_j| rho^{-1/2} + Pi_ker / D` where
/// `rho = sum_j |psi_j><psi_j|` and `Pi_ker` projects onto its kernel.
#[derive(Clone, Debug)]
pub struct PrettyGoodMeasurement {
    dim: usize,
    /// `rho^{-1/2} psi_j` (pseudo-inverse on the support).
    vectors: Vec<CVector>,
    /// Orthonormal basis of `ker rho`.
    complement: Vec<CVector>,
}

pub fn pretty_good_measurement(states: &[CVector]) -> Result<PrettyGoodMeasurement> {
    let first = states
        .first()
        .ok_or_else(|| Error::validation("pretty-good measurement needs at least one state"))?;
    let dim = first.len();
    if states.iter().any(|s| s.len() != dim) {
        return Err(Error::model("ensemble states have different dimensions"));
    }
    let mut rho = CMatrix::zeros(dim, dim);
    for s in states {
        rho += s * s.adjoint();
    }
    let eig = HermitianEigen::new(&rho);
    let inv_sqrt = eig.apply_fn(|l| {
        if l > PGM_CUTOFF {
            C64::new(1.0 / l.sqrt(), 0.0)
        } else {
            C64::new(0.0, 0.0)
        }
    });
    let vectors = states.iter().map(|s| &inv_sqrt * s).collect();
    let complement = eig
        .values
        .iter()
        .enumerate()
        .filter(|(_, &l)| l <= PGM_CUTOFF)
        .map(|(j, _)| eig.vectors.column(j).into_owned())
        .collect();
    Ok(PrettyGoodMeasurement {
        dim,
        vectors,
        complement,
    })
}

impl PrettyGoodMeasurement {
    pub fn dim(&self) -> usize {
        self.dim
    }

    pub fn outcome_count(&self) -> usize {
        self.vectors.len()
    }

    /// Dense POVM element `E_j`.
    pub fn element(&self, j: usize) -> CMatrix {
        let v = &self.vectors[j];
        let mut e = v * v.adjoint();
        let share = C64::new(1.0 / self.vectors.len() as f64, 0.0);
        for c in &self.complement {
            e += (c * c.adjoint()) * share;
        }
        e
    }

    /// `<psi|E_j|psi>` for every `j`.
    pub fn probabilities(&self, psi: &CVector) -> Vec<f64> {
        let spill: f64 = self.complement.iter().map(|c| c.dotc(psi).norm_sqr()).sum::<f64>()
            / self.vectors.len() as f64;
        self.vectors
            .iter()
            .map(|v| v.dotc(psi).norm_sqr() + spill)
            .collect()
    }

    /// `max |sum_j E_j - I|`.
    pub fn completeness_defect(&self) -> f64 {
        let mut total = CMatrix::zeros(self.dim, self.dim);
        for j in 0..self.vectors.len() {
            total += self.element(j);
        }
        (total - CMatrix::identity(self.dim, self.dim))
            .iter()
            .map(|z| z.norm())
            .fold(0.0, f64::max)
    }

    /// Projective form, available when the vectors `rho^{-1/2} psi_j` are
    /// orthonormal (linearly independent ensemble). The kernel of `rho` is
    /// attached to outcome 0.
    pub fn to_projective(&self) -> Result<Measurement> {
        let mut outcomes: Vec<Vec<CVector>> = self.vectors.iter().map(|v| vec![v.clone()]).collect();
        outcomes[0].extend(self.complement.iter().cloned());
        Measurement::new(self.dim, outcomes).map_err(|e| {
            Error::validation(format!("pretty-good measurement is not projective: {e}"))
        })
    }
}
