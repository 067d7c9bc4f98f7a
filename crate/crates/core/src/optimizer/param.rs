use rand::Rng;
use rand_distr::StandardNormal;

use crate::error::{Error, Result};
use crate::linalg::{complete_to_unitary, expm_i_hermitian, log_unitary, CMatrix, CVector, HermitianEigen, C64, ZERO};
use crate::oracle::BooleanFunction;
use crate::simulator::{Algorithm, Operator, Picture, Space};

/// Largest `N`, `k` and `W` the optimizer accepts.
pub const MAX_OPT_DOMAIN: u32 = 8;
pub const MAX_OPT_QUERIES: usize = 4;
pub const MAX_OPT_WORKSPACE: usize = 8;

/// A `k`-query algorithm on the phase-picture core `{0, 1, .., N} x W`,
/// `d = (N + 1) W`, given by `k + 1` real vectors of length `d^2`.
///
/// Block 0 generates a unitary whose first column is the initial state;
/// block `i` generates `V_i = exp(i H_i)`. A block `theta` maps to
/// `H_aa = theta[a d + a]` and, for `a < b`,
/// `H_ab = theta[a d + b] + i theta[b d + a]`.
#[derive(Clone, Debug, PartialEq)]
pub struct ParamAlgorithm {
    domain_size: u32,
    workspace: usize,
    k: usize,
    theta: Vec<f64>,
}

impl ParamAlgorithm {
    pub fn new(domain_size: u32, workspace: usize, k: usize, theta: Vec<f64>) -> Result<Self> {
        check_shape(domain_size, workspace, k)?;
        let d = (domain_size as usize + 1) * workspace;
        if theta.len() != (k + 1) * d * d {
            return Err(Error::validation(format!(
                "expected {} parameters, got {}",
                (k + 1) * d * d,
                theta.len()
            )));
        }
        Ok(ParamAlgorithm {
            domain_size,
            workspace,
            k,
            theta,
        })
    }

    /// Gaussian parameters with standard deviation `scale`.
    pub fn random<R: Rng + ?Sized>(
        rng: &mut R,
        domain_size: u32,
        workspace: usize,
        k: usize,
        scale: f64,
    ) -> Result<Self> {
        check_shape(domain_size, workspace, k)?;
        let d = (domain_size as usize + 1) * workspace;
        let theta = (0..(k + 1) * d * d)
            .map(|_| scale * rng.sample::<f64, _>(StandardNormal))
            .collect();
        Self::new(domain_size, workspace, k, theta)
    }

    pub fn domain_size(&self) -> u32 {
        self.domain_size
    }

    pub fn workspace(&self) -> usize {
        self.workspace
    }

    pub fn k(&self) -> usize {
        self.k
    }

    pub fn dim(&self) -> usize {
        (self.domain_size as usize + 1) * self.workspace
    }

    pub fn theta(&self) -> &[f64] {
        &self.theta
    }

    pub fn theta_mut(&mut self) -> &mut [f64] {
        &mut self.theta
    }

    /// Hermitian generator of block `i` (0 = initial state).
    pub fn generator(&self, i: usize) -> CMatrix {
        let d = self.dim();
        hermitian_from_block(&self.theta[i * d * d..(i + 1) * d * d], d)
    }

    /// `exp(i H)` and its spectral data for every block.
    pub fn realize(&self) -> Vec<(CMatrix, HermitianEigen)> {
        (0..=self.k).map(|i| expm_i_hermitian(&self.generator(i))).collect()
    }

    pub fn initial_state(&self) -> CVector {
        self.realize()[0].0.column(0).into_owned()
    }

    pub fn unitaries(&self) -> Vec<CMatrix> {
        self.realize().into_iter().skip(1).map(|(u, _)| u).collect()
    }

    /// Oracle eigenvalue on each core index for `f`.
    pub fn oracle_signs(&self, f: &BooleanFunction) -> Vec<f64> {
        let w = self.workspace;
        (0..self.dim())
            .map(|i| {
                let x = (i / w) as u32;
                if x == 0 {
                    1.0
                } else {
                    f64::from(f.value(x))
                }
            })
            .collect()
    }

    /// Embedding into the full phase-picture space, identity on the
    /// auxiliary labels.
    pub fn to_algorithm(&self) -> Result<Algorithm> {
        let space = Space::new(Picture::Phase, self.domain_size, self.workspace)?;
        let (full, d) = (space.dim(), self.dim());
        let realized = self.realize();
        let mut initial = CVector::from_element(full, ZERO);
        initial.rows_mut(0, d).copy_from(&realized[0].0.column(0));
        let unitaries = realized
            .iter()
            .skip(1)
            .map(|(u, _)| {
                let mut big = CMatrix::identity(full, full);
                big.view_mut((0, 0), (d, d)).copy_from(u);
                Operator::Dense(big)
            })
            .collect();
        Algorithm::new(space, initial, unitaries)
    }

    /// Parameters reproducing a phase-picture algorithm whose initial state
    /// and unitaries live on the core labels `0..=N`.
    pub fn from_algorithm(alg: &Algorithm) -> Result<Self> {
        let space = alg.space();
        if space.picture() != Picture::Phase {
            return Err(Error::model("parameterization lives in the phase picture"));
        }
        let (n, w) = (space.domain_size(), space.workspace());
        check_shape(n, w, alg.k())?;
        let (full, d) = (space.dim(), space.core_dim());
        let leak = alg.initial().rows(d, full - d).norm();
        if leak > 1e-10 {
            return Err(Error::model(format!(
                "initial state has weight {leak:.3e} outside the core labels"
            )));
        }
        let s: CVector = alg.initial().rows(0, d).into_owned();
        let mut blocks = vec![log_unitary(&complete_to_unitary(&s)?)?];
        for (i, v) in alg.dense_unitaries().iter().enumerate() {
            let off = v.view((d, 0), (full - d, d)).iter().chain(v.view((0, d), (d, full - d)).iter())
                .map(|z| z.norm())
                .fold(0.0, f64::max);
            if off > 1e-10 {
                return Err(Error::model(format!(
                    "V_{} mixes core and auxiliary labels ({off:.3e})",
                    i + 1
                )));
            }
            blocks.push(log_unitary(&v.view((0, 0), (d, d)).into_owned())?);
        }
        let mut theta = Vec::with_capacity(blocks.len() * d * d);
        for h in &blocks {
            theta.extend(block_from_hermitian(h));
        }
        Self::new(n, w, alg.k(), theta)
    }
}

fn check_shape(domain_size: u32, workspace: usize, k: usize) -> Result<()> {
    if domain_size == 0 || domain_size > MAX_OPT_DOMAIN {
        return Err(Error::capacity(format!(
            "optimizer supports 1 <= N <= {MAX_OPT_DOMAIN}, got {domain_size}"
        )));
    }
    if k == 0 || k > MAX_OPT_QUERIES {
        return Err(Error::capacity(format!(
            "optimizer supports 1 <= k <= {MAX_OPT_QUERIES}, got {k}"
        )));
    }
    if workspace == 0 || workspace > MAX_OPT_WORKSPACE {
        return Err(Error::capacity(format!(
            "optimizer supports 1 <= W <= {MAX_OPT_WORKSPACE}, got {workspace}"
        )));
    }
    Ok(())
}

pub(crate) fn hermitian_from_block(theta: &[f64], d: usize) -> CMatrix {
    let mut h = CMatrix::zeros(d, d);
    for a in 0..d {
        h[(a, a)] = C64::new(theta[a * d + a], 0.0);
        for b in a + 1..d {
            let z = C64::new(theta[a * d + b], theta[b * d + a]);
            h[(a, b)] = z;
            h[(b, a)] = z.conj();
        }
    }
    h
}

fn block_from_hermitian(h: &CMatrix) -> Vec<f64> {
    let d = h.nrows();
    let mut theta = vec![0.0; d * d];
    for a in 0..d {
        theta[a * d + a] = h[(a, a)].re;
        for b in a + 1..d {
            theta[a * d + b] = h[(a, b)].re;
            theta[b * d + a] = h[(a, b)].im;
        }
    }
    theta
}
