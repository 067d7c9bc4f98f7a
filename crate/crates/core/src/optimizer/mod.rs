//! Numerical search for the best worst-case success probability that `k`
//! queries achieve on a family.
//!
//! Each restart draws random generators, then runs Adam ascent on the
//! soft-min of the pretty-good-measurement successes while the step size
//! and the soft-min temperature decay geometrically. Restarts run in
//! fixed-size batches on the rayon pool; each has its own ChaCha stream, so
//! results do not depend on the number of worker threads.

pub mod objective;
pub mod param;
pub mod pgm;

use std::sync::Mutex;

use num_rational::BigRational;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;

use crate::bounds::m_sum;
use crate::error::{Error, Result};
use crate::linalg::CVector;
use crate::oracle::{BooleanFunction, FamilyKind, FunctionFamily};
use crate::reference::build_uniform_subset_algorithm;
use crate::report::rational_to_f64;
use crate::simulator::{success_matrix, Measurement};

pub use objective::{evaluate, objective, soft_min, Evaluation};
pub use param::{ParamAlgorithm, MAX_OPT_DOMAIN, MAX_OPT_QUERIES, MAX_OPT_WORKSPACE};
pub use pgm::{pretty_good_measurement, PrettyGoodMeasurement, PGM_CUTOFF};

/// Slack allowed above `M(N, k) / D` before a result counts as a violation.
pub const CEILING_TOL: f64 = 1e-9;

#[derive(Clone, Debug, PartialEq)]
pub struct OptimizerConfig {
    pub restarts: usize,
    pub max_iterations: usize,
    /// Adam step size, decayed geometrically to `final_step_size`.
    pub step_size: f64,
    pub final_step_size: f64,
    /// Soft-min temperature, decayed geometrically to `final_temperature`.
    pub temperature: f64,
    pub final_temperature: f64,
    pub tolerance: f64,
    pub seed: u64,
    /// `None` picks the smallest power of two with `(N + 1) W >= D`.
    pub workspace: Option<usize>,
    /// Standard deviation of the initial generator entries.
    pub init_scale: f64,
    /// Restarts per parallel batch; the run stops after the first batch
    /// that reaches the ceiling.
    pub batch_size: usize,
    /// Re-score the best run with the projective form of its measurement
    /// when the final states are linearly independent.
    pub projective_refinement: bool,
}

impl Default for OptimizerConfig {
    fn default() -> Self {
        OptimizerConfig {
            restarts: 16,
            max_iterations: 2000,
            step_size: 0.05,
            final_step_size: 1e-3,
            temperature: 0.02,
            final_temperature: 1e-5,
            tolerance: 1e-9,
            seed: 0,
            workspace: None,
            init_scale: 1.0,
            batch_size: 8,
            projective_refinement: false,
        }
    }
}

impl OptimizerConfig {
    pub fn validate(&self) -> Result<()> {
        let positive = [
            ("restarts", self.restarts as f64),
            ("max_iterations", self.max_iterations as f64),
            ("step_size", self.step_size),
            ("final_step_size", self.final_step_size),
            ("temperature", self.temperature),
            ("final_temperature", self.final_temperature),
            ("tolerance", self.tolerance),
            ("init_scale", self.init_scale),
            ("batch_size", self.batch_size as f64),
        ];
        for (name, v) in positive {
            if v.is_nan() || v <= 0.0 || !v.is_finite() {
                return Err(Error::parameter(format!("{name} must be positive, got {v}")));
            }
        }
        if self.workspace == Some(0) {
            return Err(Error::parameter("workspace must be positive"));
        }
        Ok(())
    }
}

/// Smallest power of two `W` with `(N + 1) W >= D`.
pub fn default_workspace(domain_size: u32, family_size: usize) -> usize {
    let labels = domain_size as usize + 1;
    let mut w = 1;
    while labels * w < family_size {
        w *= 2;
    }
    w
}

#[derive(Clone, Debug)]
pub struct OptResult {
    /// Best worst-case success found.
    pub best_worst_case: f64,
    pub params: ParamAlgorithm,
    pub per_function: Vec<f64>,
    /// `M(N, k) / D`.
    pub bound_ceiling: BigRational,
    pub certified_gap: f64,
    pub converged: bool,
    pub restarts_run: usize,
    pub best_restart: usize,
    /// Best worst-case value of every restart that ran, in order.
    pub restart_values: Vec<f64>,
    pub workspace: usize,
    /// Whether the values come from a projective measurement.
    pub projective: bool,
}

impl OptResult {
    /// Realized algorithm and the pretty-good measurement of its final states.
    pub fn measurement(&self, fam: &FunctionFamily) -> Result<PrettyGoodMeasurement> {
        pretty_good_measurement(&final_states(&self.params, fam)?)
    }
}

fn final_states(params: &ParamAlgorithm, fam: &FunctionFamily) -> Result<Vec<CVector>> {
    let alg = params.to_algorithm()?;
    let d = params.dim();
    fam.members()
        .iter()
        .map(|f| Ok(alg.run(f)?.amplitudes.rows(0, d).into_owned()))
        .collect()
}

static CEILING_MONITOR: Mutex<f64> = Mutex::new(f64::NEG_INFINITY);

/// Largest `p D - M(N, k)` seen by any optimizer run in this process.
pub fn max_ceiling_excess() -> f64 {
    *CEILING_MONITOR.lock().unwrap_or_else(|e| e.into_inner())
}

fn record_ceiling(value: f64, family_size: usize, m: f64) {
    let excess = value * family_size as f64 - m;
    let mut guard = CEILING_MONITOR.lock().unwrap_or_else(|e| e.into_inner());
    if excess > *guard {
        *guard = excess;
    }
}

struct RunOutcome {
    value: f64,
    params: ParamAlgorithm,
    successes: Vec<f64>,
    converged: bool,
}

fn run_restart(
    fam: &FunctionFamily,
    k: usize,
    workspace: usize,
    cfg: &OptimizerConfig,
    index: usize,
    target: f64,
) -> Result<RunOutcome> {
    let mut rng = ChaCha8Rng::seed_from_u64(cfg.seed);
    rng.set_stream(index as u64);
    let mut params = ParamAlgorithm::random(&mut rng, fam.domain_size(), workspace, k, cfg.init_scale)?;
    let n = params.theta().len();
    let (beta1, beta2, eps): (f64, f64, f64) = (0.9, 0.999, 1e-12);
    let mut m = vec![0.0; n];
    let mut v = vec![0.0; n];
    let iterations = cfg.max_iterations;
    let patience = (iterations / 10).max(50);
    let mut best = RunOutcome {
        value: f64::NEG_INFINITY,
        params: params.clone(),
        successes: Vec::new(),
        converged: false,
    };
    let mut last_gain = 0;
    for t in 0..iterations {
        let frac = if iterations > 1 { t as f64 / (iterations - 1) as f64 } else { 1.0 };
        let lr = cfg.step_size * (cfg.final_step_size / cfg.step_size).powf(frac);
        let tau = cfg.temperature * (cfg.final_temperature / cfg.temperature).powf(frac);
        let eval = evaluate(&params, fam, tau, true)?;
        if eval.worst > best.value + cfg.tolerance {
            last_gain = t;
        }
        if eval.worst > best.value {
            best.value = eval.worst;
            best.params = params.clone();
            best.successes = eval.successes.clone();
        }
        if best.value >= target - cfg.tolerance {
            best.converged = true;
            break;
        }
        if t >= iterations / 2 && t - last_gain > patience {
            best.converged = true;
            break;
        }
        let g = eval.gradient.expect("gradient requested");
        let (c1, c2) = (1.0 - beta1.powi(t as i32 + 1), 1.0 - beta2.powi(t as i32 + 1));
        for (i, theta) in params.theta_mut().iter_mut().enumerate() {
            m[i] = beta1 * m[i] + (1.0 - beta1) * g[i];
            v[i] = beta2 * v[i] + (1.0 - beta2) * g[i] * g[i];
            *theta += lr * (m[i] / c1) / ((v[i] / c2).sqrt() + eps);
        }
    }
    let last = evaluate(&params, fam, 0.0, false)?;
    if last.worst > best.value {
        best.value = last.worst;
        best.params = params;
        best.successes = last.successes;
    }
    Ok(best)
}

/// Multi-restart ascent of the worst-case success of `k` queries on `fam`.
pub fn optimize(fam: &FunctionFamily, k: usize, cfg: &OptimizerConfig) -> Result<OptResult> {
    cfg.validate()?;
    let n = fam.domain_size();
    let workspace = cfg.workspace.unwrap_or_else(|| default_workspace(n, fam.len()));
    if workspace > MAX_OPT_WORKSPACE {
        return Err(Error::capacity(format!(
            "family of {} functions needs W = {workspace} > {MAX_OPT_WORKSPACE}",
            fam.len()
        )));
    }
    if k as u64 > u64::from(n) {
        return Err(Error::parameter(format!("k = {k} exceeds N = {n}")));
    }
    let m = m_sum(u64::from(n), k as u64)?;
    let d_count = fam.len();
    let ceiling = crate::bounds::ratio(&m, &num_bigint::BigUint::from(d_count));
    let ceiling_f = rational_to_f64(&ceiling);
    let m_f = rational_to_f64(&BigRational::from_integer(m.into()));
    let target = ceiling_f.min(1.0);

    let mut outcomes: Vec<RunOutcome> = Vec::new();
    let mut start = 0;
    while start < cfg.restarts {
        let end = (start + cfg.batch_size).min(cfg.restarts);
        let batch = (start..end)
            .into_par_iter()
            .map(|i| run_restart(fam, k, workspace, cfg, i, target))
            .collect::<Result<Vec<_>>>()?;
        for r in &batch {
            record_ceiling(r.value, d_count, m_f);
        }
        outcomes.extend(batch);
        start = end;
        if outcomes.iter().any(|r| r.value >= target - cfg.tolerance) {
            break;
        }
    }

    let mut best_restart = 0;
    for (i, r) in outcomes.iter().enumerate() {
        if r.value > outcomes[best_restart].value {
            best_restart = i;
        }
    }
    let restart_values: Vec<f64> = outcomes.iter().map(|r| r.value).collect();
    let best = outcomes.swap_remove(best_restart);
    let mut result = OptResult {
        best_worst_case: best.value,
        per_function: best.successes,
        bound_ceiling: ceiling,
        certified_gap: ceiling_f - best.value,
        converged: best.converged,
        restarts_run: restart_values.len(),
        best_restart,
        restart_values,
        params: best.params,
        workspace,
        projective: false,
    };
    if cfg.projective_refinement {
        refine_projective(&mut result, fam)?;
    }
    if result.best_worst_case > ceiling_f + CEILING_TOL {
        return Err(Error::model(format!(
            "optimizer result {} exceeds the counting ceiling {}",
            result.best_worst_case, ceiling_f
        )));
    }
    Ok(result)
}

fn refine_projective(result: &mut OptResult, fam: &FunctionFamily) -> Result<()> {
    let pgm = result.measurement(fam)?;
    let Ok(projective) = pgm.to_projective() else {
        return Ok(());
    };
    let alg = result.params.to_algorithm()?;
    let full = embed_measurement(&projective, alg.space().dim())?;
    let diag = success_matrix(&alg, &full, fam)?.diagonal();
    result.best_worst_case = diag.iter().copied().fold(f64::INFINITY, f64::min);
    result.certified_gap = rational_to_f64(&result.bound_ceiling) - result.best_worst_case;
    result.per_function = diag;
    result.projective = true;
    Ok(())
}

/// Extends a core-block measurement to the full space, auxiliary labels
/// going to outcome 0.
fn embed_measurement(m: &Measurement, dim: usize) -> Result<Measurement> {
    let core = m.dim();
    let mut outcomes: Vec<Vec<CVector>> = m
        .dense_outcomes()
        .into_iter()
        .map(|vs| {
            vs.into_iter()
                .map(|v| {
                    let mut big = CVector::zeros(dim);
                    big.rows_mut(0, core).copy_from(&v);
                    big
                })
                .collect()
        })
        .collect();
    for i in core..dim {
        let mut e = CVector::zeros(dim);
        e[i] = crate::linalg::ONE;
        outcomes[0].push(e);
    }
    Measurement::new(dim, outcomes)
}

/// One seven-function subset of `all(3)`.
#[derive(Clone, Debug)]
pub struct SevenRow {
    pub omitted: BooleanFunction,
    pub members: Vec<BooleanFunction>,
    pub best_worst_case: f64,
    pub per_function: Vec<f64>,
    pub converged: bool,
    /// Worst case of the two-query uniform-subset algorithm after merging
    /// the omitted function's outcome into the best other outcome.
    pub baseline: f64,
    pub bound_ceiling: BigRational,
}

#[derive(Clone, Debug)]
pub struct SevenFunctionSearch {
    pub rows: Vec<SevenRow>,
    pub global_max: f64,
    /// Every subset stays strictly below 1 (best found, not a proof).
    pub all_below_one: bool,
}

/// Runs [`optimize`] with `k = 2` on each of the 8 subsets of `all(3)`
/// with 7 members.
pub fn search_seven_function_sets(cfg: &OptimizerConfig) -> Result<SevenFunctionSearch> {
    let all = FunctionFamily::make(FamilyKind::All { domain_size: 3 })?;
    let reference = build_uniform_subset_algorithm(3, 2)?;
    let sm = reference.success_matrix()?.matrix;
    let mut rows = Vec::with_capacity(all.len());
    for o in 0..all.len() {
        let keep: Vec<usize> = (0..all.len()).filter(|&j| j != o).collect();
        let members: Vec<BooleanFunction> = keep.iter().map(|&j| all.members()[j]).collect();
        let fam = FunctionFamily::new(members.clone())?;
        let baseline = keep
            .iter()
            .map(|&t| {
                keep.iter()
                    .map(|&j| sm[(j, j)] + if j == t { sm[(o, j)] } else { 0.0 })
                    .fold(f64::INFINITY, f64::min)
            })
            .fold(f64::NEG_INFINITY, f64::max);
        let res = optimize(&fam, 2, cfg)?;
        rows.push(SevenRow {
            omitted: all.members()[o],
            members,
            best_worst_case: res.best_worst_case,
            per_function: res.per_function,
            converged: res.converged,
            baseline,
            bound_ceiling: res.bound_ceiling,
        });
    }
    let global_max = rows.iter().map(|r| r.best_worst_case).fold(f64::NEG_INFINITY, f64::max);
    Ok(SevenFunctionSearch {
        all_below_one: rows.iter().all(|r| r.best_worst_case < 1.0),
        rows,
        global_max,
    })
}
