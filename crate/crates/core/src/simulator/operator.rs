use crate::error::{Error, Result};
use crate::linalg::{fwht_normalized, unitarity_defect, CMatrix, CVector, C64, ZERO};

/// Unitarity tolerance `max |V^dagger V - I|`.
pub const UNITARITY_TOL: f64 = 1e-10;

/// An `F`-independent unitary step.
///
/// Dense matrices are the general case; permutations and blockwise
/// Walsh–Hadamard transforms keep the large structured constructions cheap.
#[derive(Clone, Debug, PartialEq)]
pub enum Operator {
    Dense(CMatrix),
    /// `|i> -> |target[i]>`.
    Permutation(Vec<usize>),
    /// Normalized Walsh–Hadamard transform on every contiguous block of
    /// `block` amplitudes.
    BlockWalshHadamard { block: usize },
    /// Applied first to last.
    Sequence(Vec<Operator>),
}

impl Operator {
    pub fn identity(dim: usize) -> Self {
        Operator::Permutation((0..dim).collect())
    }

    /// Checks that the operator is a unitary on a space of dimension `dim`.
    pub fn validate(&self, dim: usize) -> Result<()> {
        match self {
            Operator::Dense(m) => {
                if m.nrows() != dim || m.ncols() != dim {
                    return Err(Error::model(format!(
                        "{}x{} unitary on a {dim}-dimensional space",
                        m.nrows(),
                        m.ncols()
                    )));
                }
                let defect = unitarity_defect(m);
                if defect > UNITARITY_TOL {
                    return Err(Error::validation(format!(
                        "matrix is not unitary: max|V^dagger V - I| = {defect:.3e}"
                    )));
                }
            }
            Operator::Permutation(target) => {
                if target.len() != dim {
                    return Err(Error::model(format!(
                        "permutation of length {} on a {dim}-dimensional space",
                        target.len()
                    )));
                }
                let mut seen = vec![false; dim];
                for &t in target {
                    if t >= dim || std::mem::replace(&mut seen[t], true) {
                        return Err(Error::validation("permutation is not a bijection"));
                    }
                }
            }
            Operator::BlockWalshHadamard { block } => {
                if !block.is_power_of_two() || !dim.is_multiple_of(*block) {
                    return Err(Error::validation(format!(
                        "Walsh-Hadamard block {block} must be a power of two dividing {dim}"
                    )));
                }
            }
            Operator::Sequence(ops) => {
                for op in ops {
                    op.validate(dim)?;
                }
            }
        }
        Ok(())
    }

    /// `v <- V v`. Dimensions are assumed validated.
    pub fn apply(&self, v: &mut CVector) {
        match self {
            Operator::Dense(m) => {
                *v = m * &*v;
            }
            Operator::Permutation(target) => {
                let mut out = CVector::from_element(v.len(), ZERO);
                for (i, &t) in target.iter().enumerate() {
                    out[t] = v[i];
                }
                *v = out;
            }
            Operator::BlockWalshHadamard { block } => {
                for chunk in v.as_mut_slice().chunks_mut(*block) {
                    fwht_normalized(chunk);
                }
            }
            Operator::Sequence(ops) => {
                for op in ops {
                    op.apply(v);
                }
            }
        }
    }

    /// `v <- V^dagger v`.
    pub fn apply_adjoint(&self, v: &mut CVector) {
        match self {
            Operator::Dense(m) => {
                *v = m.adjoint() * &*v;
            }
            Operator::Permutation(target) => {
                let out = CVector::from_fn(v.len(), |i, _| v[target[i]]);
                *v = out;
            }
            // real symmetric, self-inverse
            Operator::BlockWalshHadamard { .. } => self.apply(v),
            Operator::Sequence(ops) => {
                for op in ops.iter().rev() {
                    op.apply_adjoint(v);
                }
            }
        }
    }

    pub fn to_dense(&self, dim: usize) -> CMatrix {
        match self {
            Operator::Dense(m) => m.clone(),
            _ => {
                let mut out = CMatrix::from_element(dim, dim, ZERO);
                for j in 0..dim {
                    let mut e = CVector::from_element(dim, ZERO);
                    e[j] = C64::new(1.0, 0.0);
                    self.apply(&mut e);
                    out.set_column(j, &e);
                }
                out
            }
        }
    }
}
