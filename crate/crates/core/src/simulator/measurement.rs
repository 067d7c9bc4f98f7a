use std::collections::HashSet;

use crate::error::{Error, Result};
use crate::linalg::{CMatrix, CVector, C64, ZERO};

/// Orthonormality tolerance for measurement subspace bases.
pub const ORTHO_TOL: f64 = 1e-12;

/// Sparse vector, `(index, amplitude)` pairs with no repeated index.
pub type SparseVector = Vec<(usize, C64)>;

fn sparsify(v: &CVector) -> SparseVector {
    v.iter()
        .enumerate()
        .filter(|(_, z)| **z != ZERO)
        .map(|(i, z)| (i, *z))
        .collect()
}

/// A complete projective measurement. Outcome `l` projects onto the span of
/// its `m_l` orthonormal basis vectors; the subspaces are mutually
/// orthogonal and together span the whole space.
#[derive(Clone, Debug, PartialEq)]
pub struct Measurement {
    dim: usize,
    outcomes: Vec<Vec<SparseVector>>,
}

impl Measurement {
    /// Validates orthonormality (at [`ORTHO_TOL`]) and completeness.
    pub fn new(dim: usize, outcomes: Vec<Vec<CVector>>) -> Result<Self> {
        for (l, vs) in outcomes.iter().enumerate() {
            for v in vs {
                if v.len() != dim {
                    return Err(Error::model(format!(
                        "outcome {l} has a vector of length {} in dimension {dim}",
                        v.len()
                    )));
                }
            }
        }
        let sparse = outcomes
            .iter()
            .map(|vs| vs.iter().map(sparsify).collect())
            .collect();
        Self::from_sparse(dim, sparse)
    }

    pub fn from_sparse(dim: usize, outcomes: Vec<Vec<SparseVector>>) -> Result<Self> {
        if outcomes.is_empty() {
            return Err(Error::validation("a measurement needs at least one outcome"));
        }
        let total: usize = outcomes.iter().map(Vec::len).sum();
        if total != dim {
            return Err(Error::validation(format!(
                "outcome subspaces have total dimension {total}, expected {dim} (incomplete measurement)"
            )));
        }
        let m = Self { dim, outcomes };
        m.check_orthonormal()?;
        Ok(m)
    }

    /// Outcome `l` spans the listed standard basis vectors.
    pub fn from_standard_basis(dim: usize, outcomes: Vec<Vec<usize>>) -> Result<Self> {
        let sparse = outcomes
            .into_iter()
            .map(|idx| {
                idx.into_iter()
                    .map(|i| vec![(i, C64::new(1.0, 0.0))])
                    .collect()
            })
            .collect();
        Self::from_sparse(dim, sparse)
    }

    fn check_orthonormal(&self) -> Result<()> {
        let vectors: Vec<&SparseVector> = self.outcomes.iter().flatten().collect();
        for v in &vectors {
            if v.iter().any(|(i, _)| *i >= self.dim) {
                return Err(Error::model("measurement vector index out of range"));
            }
        }
        // Fast path: every vector is a phase times a standard basis vector.
        if vectors.iter().all(|v| v.len() == 1) {
            let mut seen = HashSet::with_capacity(vectors.len());
            for v in &vectors {
                let (i, z) = v[0];
                if (z.norm() - 1.0).abs() > ORTHO_TOL {
                    return Err(Error::validation("measurement vector is not normalized"));
                }
                if !seen.insert(i) {
                    return Err(Error::validation("measurement vectors are not orthogonal"));
                }
            }
            return Ok(());
        }
        let mut b = CMatrix::from_element(self.dim, vectors.len(), ZERO);
        for (j, v) in vectors.iter().enumerate() {
            for &(i, z) in v.iter() {
                b[(i, j)] += z;
            }
        }
        let gram = b.adjoint() * &b;
        for i in 0..gram.nrows() {
            for j in 0..gram.ncols() {
                let target = if i == j { 1.0 } else { 0.0 };
                let dev = (gram[(i, j)] - C64::new(target, 0.0)).norm();
                if dev > ORTHO_TOL {
                    return Err(Error::validation(format!(
                        "measurement basis is not orthonormal (Gram entry ({i},{j}) off by {dev:.3e})"
                    )));
                }
            }
        }
        Ok(())
    }

    #[inline]
    pub fn dim(&self) -> usize {
        self.dim
    }
    #[inline]
    pub fn outcome_count(&self) -> usize {
        self.outcomes.len()
    }
    pub fn outcome(&self, l: usize) -> &[SparseVector] {
        &self.outcomes[l]
    }
    /// `m_l`, the dimension of each outcome subspace.
    pub fn ranks(&self) -> Vec<usize> {
        self.outcomes.iter().map(Vec::len).collect()
    }

    pub fn dense_outcomes(&self) -> Vec<Vec<CVector>> {
        self.outcomes
            .iter()
            .map(|vs| {
                vs.iter()
                    .map(|v| {
                        let mut d = CVector::from_element(self.dim, ZERO);
                        for &(i, z) in v {
                            d[i] = z;
                        }
                        d
                    })
                    .collect()
            })
            .collect()
    }

    /// `<r|psi>` for a sparse basis vector `r`.
    #[inline]
    pub fn overlap(r: &SparseVector, psi: &CVector) -> C64 {
        r.iter().map(|&(i, z)| z.conj() * psi[i]).sum()
    }

    /// `||P_l psi||^2` for every outcome.
    pub fn probabilities(&self, psi: &CVector) -> Result<Vec<f64>> {
        if psi.len() != self.dim {
            return Err(Error::model(format!(
                "state of dimension {} measured in dimension {}",
                psi.len(),
                self.dim
            )));
        }
        Ok(self
            .outcomes
            .iter()
            .map(|vs| vs.iter().map(|r| Self::overlap(r, psi).norm_sqr()).sum())
            .collect())
    }

    /// The same measurement with every basis vector mapped through `c`.
    pub fn transformed(&self, c: &CMatrix) -> Result<Measurement> {
        if c.nrows() != self.dim || c.ncols() != self.dim {
            return Err(Error::model("basis change has the wrong dimension"));
        }
        let outcomes = self
            .dense_outcomes()
            .into_iter()
            .map(|vs| vs.into_iter().map(|v| c * v).collect())
            .collect();
        Measurement::new(self.dim, outcomes)
    }
}
