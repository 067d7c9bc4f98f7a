//! JSON file formats for algorithms and measurements.
//!
//! Complex numbers are `[re, im]` pairs; unitaries are flattened row-major.

use std::path::Path;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::linalg::{CMatrix, CVector, C64};

use super::{Algorithm, Measurement, Operator, Picture, Space};

pub type ComplexPair = [f64; 2];

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct AlgorithmFile {
    pub picture: Picture,
    pub domain_size: u32,
    pub workspace: usize,
    pub k: usize,
    pub initial: Vec<ComplexPair>,
    pub unitaries: Vec<Vec<ComplexPair>>,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct MeasurementFile {
    pub outcomes: Vec<Vec<Vec<ComplexPair>>>,
}

fn to_pairs<'a>(it: impl IntoIterator<Item = &'a C64>) -> Vec<ComplexPair> {
    it.into_iter().map(|z| [z.re, z.im]).collect()
}

fn from_pairs(p: &[ComplexPair]) -> Vec<C64> {
    p.iter().map(|&[re, im]| C64::new(re, im)).collect()
}

impl AlgorithmFile {
    pub fn from_algorithm(alg: &Algorithm) -> Self {
        let space = alg.space();
        AlgorithmFile {
            picture: space.picture(),
            domain_size: space.domain_size(),
            workspace: space.workspace(),
            k: alg.k(),
            initial: to_pairs(alg.initial().iter()),
            unitaries: alg
                .dense_unitaries()
                .iter()
                .map(|m| to_pairs(m.transpose().iter()))
                .collect(),
        }
    }

    /// Validates shape, normalization and unitarity.
    pub fn to_algorithm(&self) -> Result<Algorithm> {
        let space = Space::new(self.picture, self.domain_size, self.workspace)?;
        let dim = space.dim();
        if self.unitaries.len() != self.k {
            return Err(Error::validation(format!(
                "k = {} but {} unitaries were given",
                self.k,
                self.unitaries.len()
            )));
        }
        if self.initial.len() != dim {
            return Err(Error::validation(format!(
                "initial state has {} entries, expected 2*N*W = {dim}",
                self.initial.len()
            )));
        }
        let unitaries = self
            .unitaries
            .iter()
            .enumerate()
            .map(|(i, flat)| {
                if flat.len() != dim * dim {
                    return Err(Error::validation(format!(
                        "V_{} has {} entries, expected {}",
                        i + 1,
                        flat.len(),
                        dim * dim
                    )));
                }
                Ok(Operator::Dense(CMatrix::from_row_slice(dim, dim, &from_pairs(flat))))
            })
            .collect::<Result<Vec<_>>>()?;
        Algorithm::new(space, CVector::from_vec(from_pairs(&self.initial)), unitaries)
    }
}

impl MeasurementFile {
    pub fn from_measurement(m: &Measurement) -> Self {
        MeasurementFile {
            outcomes: m
                .dense_outcomes()
                .iter()
                .map(|vs| vs.iter().map(|v| to_pairs(v.iter())).collect())
                .collect(),
        }
    }

    pub fn to_measurement(&self) -> Result<Measurement> {
        let dim = self
            .outcomes
            .iter()
            .flatten()
            .map(Vec::len)
            .next()
            .ok_or_else(|| Error::validation("measurement file has no vectors"))?;
        let outcomes = self
            .outcomes
            .iter()
            .map(|vs| vs.iter().map(|v| CVector::from_vec(from_pairs(v))).collect())
            .collect();
        Measurement::new(dim, outcomes)
    }
}

pub fn load_algorithm(path: &Path) -> Result<Algorithm> {
    let file: AlgorithmFile = serde_json::from_str(&std::fs::read_to_string(path)?)?;
    file.to_algorithm()
}

pub fn load_measurement(path: &Path) -> Result<Measurement> {
    let file: MeasurementFile = serde_json::from_str(&std::fs::read_to_string(path)?)?;
    file.to_measurement()
}

pub fn save_algorithm(alg: &Algorithm, path: &Path) -> Result<()> {
    std::fs::write(path, serde_json::to_string(&AlgorithmFile::from_algorithm(alg))?)?;
    Ok(())
}

pub fn save_measurement(m: &Measurement, path: &Path) -> Result<()> {
    std::fs::write(path, serde_json::to_string(&MeasurementFile::from_measurement(m))?)?;
    Ok(())
}
