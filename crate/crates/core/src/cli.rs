//! Command-line front end. [`dispatch`] does all the work so it can be
//! driven from tests; the `qql` binary only forwards its output.

use std::path::PathBuf;
use std::time::Instant;

use clap::{Args, Parser, Subcommand, ValueEnum};
use num_bigint::BigUint;
use serde_json::{json, Value};

use crate::bounds::{
    format_rational, is_feasible, m_sum, max_distinguishable, parse_rational, pow2, sorting_lower_bound,
    BoundQuery,
};
use crate::error::{Error, Result};
use crate::oracle::{BooleanFunction, FunctionFamily};
use crate::optimizer::{optimize, search_seven_function_sets, OptimizerConfig};
use crate::poly::{extract_polynomials, lemma_audit, minimizer, MultilinearPolynomial, PolynomialReport};
use crate::reference::{build_character_distinguisher, build_uniform_subset_algorithm, AlgorithmBundle};
use crate::report::{rational_to_f64, RunReport};
use crate::simulator::io::{load_algorithm, load_measurement};
use crate::simulator::{success_matrix, SuccessMatrix};

pub const EXIT_OK: i32 = 0;
pub const EXIT_VALIDATION: i32 = 2;
pub const EXIT_USAGE: i32 = 64;

#[derive(Clone, Copy, Debug, PartialEq, Eq, ValueEnum)]
pub enum Format {
    Json,
    Csv,
}

#[derive(Debug, Parser)]
#[command(name = "qql", version, about = "Quantum query lab")]
struct Cli {
    /// Worker threads for parallel sweeps.
    #[arg(long, global = true, env = "QQL_THREADS")]
    threads: Option<usize>,
    #[arg(long, global = true, value_enum, default_value = "json")]
    format: Format,
    #[command(subcommand)]
    command: Command,
}

#[derive(Debug, Subcommand)]
enum Command {
    /// M(N, k), the largest family size at success p, and feasibility of D.
    Bounds {
        #[arg(long = "N")]
        domain_size: u64,
        #[arg(long)]
        k: u64,
        #[arg(long)]
        p: Option<String>,
        /// Family size to test for feasibility.
        #[arg(long = "D")]
        family_size: Option<String>,
    },
    /// Fewest queries the counting bound allows for sorting n items.
    SortBound {
        #[arg(long)]
        n: u64,
    },
    /// Single-query character distinguisher on N = 2^n - 1.
    RunExample1 {
        #[arg(long)]
        n: u32,
    },
    /// k-query uniform-subset algorithm on all 2^N functions.
    RunVandam {
        #[arg(long = "N")]
        domain_size: u32,
        #[arg(long)]
        k: u32,
    },
    /// Success matrix of an algorithm file on a family file.
    Simulate {
        #[arg(long)]
        algorithm: PathBuf,
        #[arg(long)]
        measurement: PathBuf,
        #[arg(long)]
        family: PathBuf,
    },
    /// Character coefficients of every measured amplitude.
    AnalyzePoly {
        #[arg(long)]
        algorithm: PathBuf,
        #[arg(long)]
        measurement: PathBuf,
        /// Include every extracted polynomial in the report.
        #[arg(long)]
        full: bool,
    },
    /// Checks sum_F |Q(F)|^2 against 2^N / M(N, deg Q) at F0.
    LemmaAudit {
        /// Polynomial report file; without it the equal-coefficient
        /// minimizer for --N, --k is audited.
        #[arg(long)]
        poly: Option<PathBuf>,
        #[arg(long = "N")]
        domain_size: Option<u32>,
        #[arg(long)]
        k: Option<u32>,
        /// F0 as a sign string; defaults to the constant +1 function.
        #[arg(long, allow_hyphen_values = true)]
        f0: Option<String>,
    },
    /// Best worst-case success of k queries on a family.
    Optimize {
        #[arg(long)]
        family: PathBuf,
        #[arg(long)]
        k: usize,
        #[command(flatten)]
        opt: OptArgs,
    },
    /// Optimizer on every 7-function subset of all(3) with k = 2.
    Example3Search {
        #[command(flatten)]
        opt: OptArgs,
    },
}

#[derive(Debug, Args)]
struct OptArgs {
    #[arg(long, default_value_t = 16)]
    restarts: usize,
    #[arg(long, default_value_t = 2000)]
    iterations: usize,
    #[arg(long, default_value_t = 0)]
    seed: u64,
    #[arg(long)]
    workspace: Option<usize>,
    /// Re-score with the projective form of the measurement when possible.
    #[arg(long)]
    projective: bool,
}

impl OptArgs {
    fn config(&self) -> OptimizerConfig {
        OptimizerConfig {
            restarts: self.restarts,
            max_iterations: self.iterations,
            seed: self.seed,
            workspace: self.workspace,
            projective_refinement: self.projective,
            ..OptimizerConfig::default()
        }
    }

    fn echo(&self) -> Value {
        json!({
            "restarts": self.restarts,
            "iterations": self.iterations,
            "seed": self.seed,
            "workspace": self.workspace,
            "projective": self.projective,
        })
    }
}

/// Exit code and the text destined for standard output and standard error.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Outcome {
    pub code: i32,
    pub stdout: String,
    pub stderr: String,
}

/// Parses `argv` (including the program name) and runs the subcommand.
pub fn dispatch<I, T>(argv: I) -> Outcome
where
    I: IntoIterator<Item = T>,
    T: Into<std::ffi::OsString> + Clone,
{
    let cli = match Cli::try_parse_from(argv) {
        Ok(cli) => cli,
        Err(e) => return parse_failure(e),
    };
    let run = || execute(&cli);
    let result = match cli.threads {
        Some(0) => Err(Error::parameter("--threads must be positive")),
        Some(t) => rayon::ThreadPoolBuilder::new()
            .num_threads(t)
            .build()
            .map_err(|e| Error::parameter(format!("thread pool: {e}")))
            .and_then(|pool| pool.install(run)),
        None => run(),
    };
    match result {
        Ok(stdout) => Outcome {
            code: EXIT_OK,
            stdout,
            stderr: String::new(),
        },
        Err(e) => Outcome {
            code: EXIT_VALIDATION,
            stdout: String::new(),
            stderr: format!("error: {e}\n"),
        },
    }
}

fn parse_failure(e: clap::Error) -> Outcome {
    use clap::error::ErrorKind;
    let text = e.render().to_string();
    match e.kind() {
        ErrorKind::DisplayHelp | ErrorKind::DisplayVersion => Outcome {
            code: EXIT_OK,
            stdout: text,
            stderr: String::new(),
        },
        ErrorKind::InvalidSubcommand
        | ErrorKind::MissingSubcommand
        | ErrorKind::DisplayHelpOnMissingArgumentOrSubcommand => Outcome {
            code: EXIT_USAGE,
            stdout: String::new(),
            stderr: text,
        },
        _ => Outcome {
            code: EXIT_VALIDATION,
            stdout: String::new(),
            stderr: text,
        },
    }
}

fn execute(cli: &Cli) -> Result<String> {
    let start = Instant::now();
    let (name, input, outputs, seed, matrix) = match &cli.command {
        Command::Bounds {
            domain_size,
            k,
            p,
            family_size,
        } => {
            let (input, outputs) = bounds(*domain_size, *k, p.as_deref(), family_size.as_deref())?;
            ("bounds", input, outputs, None, None)
        }
        Command::SortBound { n } => {
            let cert = sorting_lower_bound(*n)?;
            ("sort-bound", json!({ "n": n }), serde_json::to_value(cert)?, None, None)
        }
        Command::RunExample1 { n } => {
            let bundle = build_character_distinguisher(*n)?;
            let (outputs, sm) = bundle_outputs(&bundle)?;
            ("run-example1", json!({ "n": n }), outputs, None, Some((sm, bundle.family)))
        }
        Command::RunVandam { domain_size, k } => {
            let bundle = build_uniform_subset_algorithm(*domain_size, *k)?;
            let (outputs, sm) = bundle_outputs(&bundle)?;
            (
                "run-vandam",
                json!({ "N": domain_size, "k": k }),
                outputs,
                None,
                Some((sm, bundle.family)),
            )
        }
        Command::Simulate {
            algorithm,
            measurement,
            family,
        } => {
            let alg = load_algorithm(algorithm)?;
            let m = load_measurement(measurement)?;
            let fam = FunctionFamily::from_json(&std::fs::read_to_string(family)?)?;
            let sm = success_matrix(&alg, &m, &fam)?;
            let outputs = json!({
                "functions": function_names(&fam),
                "success_matrix": sm.rows(),
                "diagonal": sm.diagonal(),
                "worst_case_success": sm.worst_case_success(),
                "column_sum_defect": sm.column_sum_defect(),
            });
            let input = json!({ "algorithm": algorithm, "measurement": measurement, "family": family });
            ("simulate", input, outputs, None, Some((sm, fam)))
        }
        Command::AnalyzePoly {
            algorithm,
            measurement,
            full,
        } => {
            let alg = load_algorithm(algorithm)?;
            let m = load_measurement(measurement)?;
            let ex = extract_polynomials(&alg, &m)?;
            let mut outputs = json!({
                "k": ex.k,
                "max_excess_coefficient": ex.max_excess_coefficient,
                "degree_certified": ex.degree_certified(),
                "total_parseval": ex.total_parseval(),
                "global_sum": ex.total_parseval() * rational_to_f64(&num_rational::BigRational::from_integer(
                    pow2(u64::from(alg.space().domain_size())).into()
                )),
            });
            if *full {
                let polys: Vec<Vec<PolynomialReport>> = ex
                    .outcomes
                    .iter()
                    .map(|row| row.iter().map(MultilinearPolynomial::to_report).collect())
                    .collect();
                outputs["polynomials"] = serde_json::to_value(polys)?;
            }
            let input = json!({ "algorithm": algorithm, "measurement": measurement, "full": full });
            ("analyze-poly", input, outputs, None, None)
        }
        Command::LemmaAudit {
            poly,
            domain_size,
            k,
            f0,
        } => {
            let (input, outputs) = audit(poly.as_ref(), *domain_size, *k, f0.as_deref())?;
            ("lemma-audit", input, outputs, None, None)
        }
        Command::Optimize { family, k, opt } => {
            let fam = FunctionFamily::from_json(&std::fs::read_to_string(family)?)?;
            let res = optimize(&fam, *k, &opt.config())?;
            let mut input = opt.echo();
            input["family"] = json!(family);
            input["k"] = json!(k);
            let outputs = json!({
                "functions": function_names(&fam),
                "best_worst_case": res.best_worst_case,
                "per_function": res.per_function,
                "bound_ceiling": format_rational(&res.bound_ceiling),
                "certified_gap": res.certified_gap,
                "converged": res.converged,
                "restarts_run": res.restarts_run,
                "best_restart": res.best_restart,
                "workspace": res.workspace,
                "projective": res.projective,
            });
            ("optimize", input, outputs, Some(opt.seed), None)
        }
        Command::Example3Search { opt } => {
            let search = search_seven_function_sets(&opt.config())?;
            let rows: Vec<Value> = search
                .rows
                .iter()
                .map(|r| {
                    json!({
                        "omitted": r.omitted.to_string(),
                        "members": r.members.iter().map(ToString::to_string).collect::<Vec<_>>(),
                        "best_worst_case": r.best_worst_case,
                        "per_function": r.per_function,
                        "converged": r.converged,
                        "baseline": r.baseline,
                        "bound_ceiling": format_rational(&r.bound_ceiling),
                    })
                })
                .collect();
            let outputs = json!({
                "rows": rows,
                "global_max": search.global_max,
                "all_below_one": search.all_below_one,
            });
            ("example3-search", opt.echo(), outputs, Some(opt.seed), None)
        }
    };

    match cli.format {
        Format::Json => {
            let report = RunReport::new(name, input, outputs, start.elapsed().as_secs_f64(), seed);
            Ok(report.to_json() + "\n")
        }
        Format::Csv => match matrix {
            Some((sm, fam)) => matrix_csv(&sm, &fam),
            None => Err(Error::validation(format!("{name} has no matrix output for --format csv"))),
        },
    }
}

fn bounds(n: u64, k: u64, p: Option<&str>, family_size: Option<&str>) -> Result<(Value, Value)> {
    let m = m_sum(n, k)?;
    let mut input = json!({ "N": n, "k": k });
    let mut outputs = json!({
        "m_sum": m.to_str_radix(10),
        "classical_count": pow2(k).to_str_radix(10),
    });
    let p = p.map(parse_rational).transpose()?;
    if let Some(p) = &p {
        input["p"] = json!(format_rational(p));
        outputs["max_D"] = json!(max_distinguishable(n, k, p)?.to_str_radix(10));
    }
    if let Some(d) = family_size {
        let d: BigUint = d
            .parse()
            .map_err(|_| Error::parameter(format!("cannot parse --D {d:?} as a positive integer")))?;
        let p = p.ok_or_else(|| Error::parameter("--D needs --p"))?;
        input["D"] = json!(d.to_str_radix(10));
        outputs["feasible"] = json!(is_feasible(&BoundQuery::new(n, k, p, d)?)?);
    }
    Ok((input, outputs))
}

fn audit(
    poly: Option<&PathBuf>,
    domain_size: Option<u32>,
    k: Option<u32>,
    f0: Option<&str>,
) -> Result<(Value, Value)> {
    let q = match (poly, domain_size, k) {
        (Some(path), _, _) => {
            let report: PolynomialReport = serde_json::from_str(&std::fs::read_to_string(path)?)?;
            MultilinearPolynomial::from_report(&report, None)?
        }
        (None, Some(n), Some(k)) => {
            let f0 = parse_f0(f0, n)?;
            minimizer(n, k, &f0)?
        }
        _ => return Err(Error::parameter("lemma-audit needs --poly or both --N and --k")),
    };
    let f0 = parse_f0(f0, q.domain_size())?;
    let result = lemma_audit(&q, &f0)?;
    let input = json!({
        "poly": poly,
        "N": q.domain_size(),
        "k": k,
        "f0": f0.to_string(),
    });
    Ok((input, serde_json::to_value(result)?))
}

fn parse_f0(f0: Option<&str>, n: u32) -> Result<BooleanFunction> {
    let f = match f0 {
        Some(s) => s.parse::<BooleanFunction>()?,
        None => BooleanFunction::constant_one(n)?,
    };
    if f.domain_size() != n {
        return Err(Error::domain(format!(
            "F0 has {} values but N = {n}",
            f.domain_size()
        )));
    }
    Ok(f)
}

fn bundle_outputs(bundle: &AlgorithmBundle) -> Result<(Value, SuccessMatrix)> {
    let sm = bundle.success_matrix()?;
    let predicted = rational_to_f64(&bundle.predicted_success);
    let diagonal = sm.diagonal();
    let max_error = diagonal.iter().map(|p| (p - predicted).abs()).fold(0.0, f64::max);
    let outputs = json!({
        "functions": function_names(&bundle.family),
        "success_matrix": sm.rows(),
        "measured_success": diagonal,
        "predicted_success": format_rational(&bundle.predicted_success),
        "predicted_success_value": predicted,
        "max_prediction_error": max_error,
        "worst_case_success": sm.worst_case_success(),
    });
    Ok((outputs, sm))
}

fn function_names(fam: &FunctionFamily) -> Vec<String> {
    fam.members().iter().map(ToString::to_string).collect()
}

/// Rows are outcomes, columns are family members.
fn matrix_csv(sm: &SuccessMatrix, fam: &FunctionFamily) -> Result<String> {
    let mut w = csv::Writer::from_writer(Vec::new());
    let mut header = vec!["outcome".to_owned()];
    header.extend(function_names(fam));
    w.write_record(&header).map_err(csv_error)?;
    for (l, row) in sm.rows().iter().enumerate() {
        let mut record = vec![fam.members()[l].to_string()];
        record.extend(row.iter().map(|p| p.to_string()));
        w.write_record(&record).map_err(csv_error)?;
    }
    let bytes = w.into_inner().map_err(|e| Error::validation(e.to_string()))?;
    String::from_utf8(bytes).map_err(|e| Error::validation(e.to_string()))
}

fn csv_error(e: csv::Error) -> Error {
    Error::validation(format!("csv: {e}"))
}
