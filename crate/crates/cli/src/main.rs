use std::path::PathBuf;
use std::process::ExitCode;

use anyhow::{anyhow, bail, Context, Result};
use clap::{Args, Parser, Subcommand, ValueEnum};
use serde_json::{json, Value};

use imbalance_core::condition::{
    chibar_sample, delta_measure, delta_modularity, kappa, ConditionReport, KappaMethod, DEFAULT_CHIBAR_TRIALS,
};
use imbalance_core::design::{build_special_line_design, check_design, design_rank_check, sinkhorn_scale};
use imbalance_core::graver::{from_rational, graver_basis, kappa_vs_graver_check, proximity_experiment, IpInstance};
use imbalance_core::incidence::{check_maxlines_bounds, lines, maxlines, PointConfig, PointsRep};
use imbalance_core::matroid::{longest_line_minor, minor_chain, LinearMatroid};
use imbalance_core::numerics::scalar::parse_rational_str;
use imbalance_core::numerics::{Field, Matrix, MatrixRep};
use imbalance_core::{generators, harness, with_matrix, with_points};

#[derive(Parser)]
#[command(name = "imbalance", version, about = "Circuit imbalance, incidence, matroid-minor, design and Graver tools")]
struct Cli {
    #[command(flatten)]
    global: Global,
    #[command(subcommand)]
    command: Command,
}

#[derive(Args)]
struct Global {
    /// Input JSON file; `-` or absent reads stdin.
    #[arg(long, global = true)]
    input: Option<PathBuf>,
    /// Output file; absent writes stdout.
    #[arg(long, global = true)]
    out: Option<PathBuf>,
    #[arg(long, global = true, default_value_t = 0)]
    seed: u64,
    /// Zero tolerance for complex_float inputs (ignored by exact fields).
    #[arg(long, global = true)]
    tol: Option<f64>,
}

#[derive(Clone, Copy, ValueEnum)]
enum Method {
    Circuit,
    Detratio,
    Both,
}

#[derive(Subcommand)]
enum Command {
    /// Circuit imbalance measure kappa.
    Kappa {
        #[arg(long, value_enum, default_value = "both")]
        method: Method,
    },
    /// Distance measure delta (full row rank required).
    Delta,
    /// Largest absolute rank-sized subdeterminant of an integer matrix.
    Deltamod,
    /// Sampled lower bound on chi-bar.
    Chibar {
        #[arg(long, default_value_t = DEFAULT_CHIBAR_TRIALS)]
        trials: usize,
    },
    /// All lines of a point set.
    Lines,
    /// A point on the most lines.
    Maxlines,
    /// Checks the Sylvester-Gallai type lower bounds on maxlines.
    CheckSg,
    /// Greedy contraction chain down to a target rank.
    MinorChain {
        #[arg(long, default_value_t = 2)]
        to_rank: usize,
    },
    /// Longest U_{2,l} minor.
    LongestLine,
    /// Design matrices.
    Design {
        #[command(subcommand)]
        action: DesignAction,
    },
    /// Diagonal scaling to row sums <= cap and column sums 1.
    Scale {
        /// Row cap as `p/q`; defaults to q/k of the design.
        #[arg(long)]
        row_cap: Option<String>,
        #[arg(long, default_value_t = 1e-9)]
        eps: f64,
        #[arg(long, default_value_t = 100_000)]
        max_iter: usize,
    },
    /// Graver basis of an integer matrix.
    Graver,
    /// LP/IP proximity through the separable reduction.
    Proximity {
        #[arg(long)]
        instance: PathBuf,
    },
    /// Writes a generated instance as JSON.
    Generate {
        #[command(subcommand)]
        kind: GenerateKind,
    },
    /// Runs verification suites and emits a JSON report.
    Verify {
        /// Suite names (repeatable or comma separated), or `all`.
        #[arg(long, value_delimiter = ',', default_value = "all")]
        suite: Vec<String>,
    },
}

#[derive(Subcommand)]
enum DesignAction {
    /// Measures (q, k, t) of a matrix.
    Check,
    /// Builds the special-line design of a point set.
    Build,
    /// Checks rank >= n / (1 + t(q-1)/k).
    Rankcheck,
}

#[derive(Subcommand)]
enum GenerateKind {
    Dowling {
        #[arg(long)]
        d: usize,
        #[arg(long)]
        t: usize,
    },
    Halfcircle {
        #[arg(long)]
        n: usize,
    },
    IncidenceComplete {
        #[arg(long)]
        v: usize,
    },
    Grid {
        #[arg(long, default_value_t = 3)]
        side: usize,
    },
    #[command(alias = "random")]
    RandomConfig {
        #[arg(long)]
        d: usize,
        #[arg(long)]
        n: usize,
    },
    RandomIntegerMatrix {
        #[arg(long)]
        d: usize,
        #[arg(long)]
        n: usize,
        #[arg(long, default_value_t = 3)]
        bound: i64,
    },
    IpInstance {
        #[arg(long)]
        d: usize,
        #[arg(long)]
        n: usize,
    },
}

/// A command's JSON output and whether every bound it checks holds.
struct Output {
    value: Value,
    ok: bool,
}

impl Output {
    fn ok(value: Value) -> Self {
        Self { value, ok: true }
    }

    fn checked(value: Value, ok: bool) -> Self {
        Self { value, ok }
    }
}

fn read_json(path: Option<&PathBuf>) -> Result<Value> {
    let text = match path {
        Some(p) if p.as_os_str() != "-" => {
            std::fs::read_to_string(p).with_context(|| format!("reading {}", p.display()))?
        }
        _ => std::io::read_to_string(std::io::stdin()).context("reading stdin")?,
    };
    serde_json::from_str(&text).context("parsing input JSON")
}

fn read_matrix(g: &Global) -> Result<MatrixRep> {
    let rep = MatrixRep::from_json(&read_json(g.input.as_ref())?)?;
    Ok(match (rep, g.tol) {
        (MatrixRep::ComplexFloat(m), Some(t)) => MatrixRep::ComplexFloat(m.with_tol(t)?),
        (rep, _) => rep,
    })
}

fn read_points(v: &Value, tol: Option<f64>) -> Result<PointsRep> {
    let rep = PointsRep::from_json(v)?;
    Ok(match (rep, tol) {
        (PointsRep::ComplexFloat(s), Some(t)) => {
            PointsRep::ComplexFloat(PointConfig::with_tol(s.dim(), s.points().to_vec(), t)?)
        }
        (rep, _) => rep,
    })
}

fn int_matrix(rep: MatrixRep) -> Result<Vec<Vec<i64>>> {
    match rep {
        MatrixRep::Rational(m) => Ok(from_rational(&m)?),
        other => bail!("an integer matrix in rational mode is required, got {:?}", other.mode()),
    }
}

fn condition<F: Field>(_: &Matrix<F>, f: impl FnOnce(ConditionReport) -> Result<ConditionReport>) -> Result<Output> {
    Ok(Output::ok(serde_json::to_value(f(ConditionReport::new::<F>())?)?))
}

fn chain_output<F: Field>(m: &LinearMatroid<F>, to_rank: usize) -> Result<Output> {
    let chain = minor_chain(m, to_rank)?;
    Ok(Output::checked(chain.summary(), chain.holds()))
}

fn longest_output<F: Field>(m: &LinearMatroid<F>) -> Result<Output> {
    let simple = m.simplify().0;
    let line = longest_line_minor(m)?;
    Ok(Output::ok(json!({
        "rank": m.rank(),
        "simple_size": simple.len(),
        "length": line.length,
        "contracted": line.contracted,
    })))
}

fn run(cli: Cli) -> Result<Output> {
    let g = &cli.global;
    match cli.command {
        Command::Kappa { method } => {
            let method = match method {
                Method::Circuit => KappaMethod::Circuit,
                Method::Detratio => KappaMethod::Detratio,
                Method::Both => KappaMethod::Both,
            };
            with_matrix!(read_matrix(g)?, a => condition(&a, |r| {
                let k = kappa(&a, method)?;
                let mut r = r.with_kappa(&k);
                if matches!(method, KappaMethod::Both) {
                    r.kappa_methods_agree = Some(true);
                }
                Ok(r)
            }))
        }
        Command::Delta => with_matrix!(read_matrix(g)?, a => condition(&a, |r| Ok(r.with_delta(&delta_measure(&a)?)))),
        Command::Deltamod => {
            with_matrix!(read_matrix(g)?, a => condition(&a, |r| Ok(r.with_delta_mod(&delta_modularity(&a)?))))
        }
        Command::Chibar { trials } => with_matrix!(read_matrix(g)?, a => condition(&a, |r| {
            Ok(r.with_chibar(chibar_sample(&a, trials, g.seed)?, trials))
        })),
        Command::Lines => {
            let pts = read_points(&read_json(g.input.as_ref())?, g.tol)?;
            with_points!(pts, s => Ok(Output::ok(serde_json::to_value(lines(&s)?)?)))
        }
        Command::Maxlines => {
            let pts = read_points(&read_json(g.input.as_ref())?, g.tol)?;
            with_points!(pts, s => {
                let (point, count) = maxlines(&lines(&s)?);
                Ok(Output::ok(json!({ "n": s.len(), "point": point, "maxlines": count })))
            })
        }
        Command::CheckSg => {
            let pts = read_points(&read_json(g.input.as_ref())?, g.tol)?;
            with_points!(pts, s => {
                let rep = check_maxlines_bounds(&s)?;
                let ok = rep.pass();
                Ok(Output::checked(serde_json::to_value(rep)?, ok))
            })
        }
        Command::MinorChain { to_rank } => {
            // A point set stands for its affine matroid.
            let v = read_json(g.input.as_ref())?;
            if v.get("points").is_some() {
                with_points!(read_points(&v, g.tol)?, s => chain_output(&LinearMatroid::from_affine(&s), to_rank))
            } else {
                with_matrix!(MatrixRep::from_json(&v)?, a => chain_output(&LinearMatroid::new(a), to_rank))
            }
        }
        Command::LongestLine => {
            // A point set stands for its affine matroid.
            let v = read_json(g.input.as_ref())?;
            if v.get("points").is_some() {
                with_points!(read_points(&v, g.tol)?, s => longest_output(&LinearMatroid::from_affine(&s)))
            } else {
                with_matrix!(MatrixRep::from_json(&v)?, a => longest_output(&LinearMatroid::new(a)))
            }
        }
        Command::Design { action } => match action {
            DesignAction::Check => {
                with_matrix!(read_matrix(g)?, a => Ok(Output::ok(serde_json::to_value(check_design(&a))?)))
            }
            DesignAction::Build => {
                let pts = read_points(&read_json(g.input.as_ref())?, g.tol)?;
                with_points!(pts, s => {
                    let design = build_special_line_design(&s)?;
                    let cert = check_design(&design.matrix);
                    Ok(Output::ok(json!({
                        "matrix": MatrixRep::from(design.matrix.clone()).to_json(),
                        "triples": design.triples,
                        "k_per_point": design.k_per_point,
                        "certificate": cert,
                        "meets_three_k": design.meets_three_k(),
                    })))
                })
            }
            DesignAction::Rankcheck => with_matrix!(read_matrix(g)?, a => {
                let rep = design_rank_check(&a)?;
                let ok = rep.pass;
                Ok(Output::checked(serde_json::to_value(rep)?, ok))
            }),
        },
        Command::Scale { row_cap, eps, max_iter } => with_matrix!(read_matrix(g)?, a => {
            let cap = match &row_cap {
                Some(s) => parse_rational_str(s)?,
                None => {
                    let c = check_design(&a);
                    if c.k == 0 {
                        bail!("matrix has a zero column; pass --row-cap explicitly");
                    }
                    parse_rational_str(&format!("{}/{}", c.q, c.k))?
                }
            };
            let res = sinkhorn_scale(&a, &cap, eps, max_iter)?;
            let mut v = serde_json::to_value(&res)?;
            v["row_cap"] = json!(cap.to_string());
            v["b"] = MatrixRep::from(res.b.clone()).to_json();
            Ok(Output::checked(v, res.converged))
        }),
        Command::Graver => {
            let a = int_matrix(read_matrix(g)?)?;
            let gb = graver_basis(&a)?;
            let kg = kappa_vs_graver_check(&a)?;
            let ok = kg.holds;
            Ok(Output::checked(json!({ "basis": gb, "kappa_check": kg }), ok))
        }
        Command::Proximity { instance } => {
            let ip = IpInstance::from_json(&read_json(Some(&instance))?)?;
            let rep = proximity_experiment(&ip)?;
            let ok = rep.holds();
            Ok(Output::checked(serde_json::to_value(rep)?, ok))
        }
        Command::Generate { kind } => generate(kind, g.seed).map(Output::ok),
        Command::Verify { suite } => {
            let report = harness::verify_suite(&suite, g.seed)?;
            let (total, fatal) = (report.checks.len(), report.fatal_count());
            eprintln!("{total} checks, {fatal} theorem-backed failures");
            Ok(Output::checked(serde_json::to_value(&report)?, report.passed()))
        }
    }
}

fn generate(kind: GenerateKind, seed: u64) -> Result<Value> {
    Ok(match kind {
        GenerateKind::Dowling { d, t } => generators::dowling(d, t)?.to_json(),
        GenerateKind::Halfcircle { n } => {
            if n == 0 {
                bail!("n must be positive");
            }
            MatrixRep::from(generators::half_circle(n)).to_json()
        }
        GenerateKind::IncidenceComplete { v } => {
            if v < 2 {
                bail!("v must be at least 2");
            }
            MatrixRep::from(generators::unsigned_incidence_complete(v)).to_json()
        }
        GenerateKind::Grid { side } => {
            if side == 0 {
                bail!("side must be positive");
            }
            PointsRep::from(generators::grid(side)).to_json()
        }
        GenerateKind::RandomConfig { d, n } => PointsRep::from(generators::random_config(d, n, seed)?).to_json(),
        GenerateKind::RandomIntegerMatrix { d, n, bound } => {
            if d == 0 || n == 0 || bound < 1 {
                bail!("d, n and bound must be positive");
            }
            MatrixRep::from(generators::random_integer_matrix(d, n, bound, seed)).to_json()
        }
        GenerateKind::IpInstance { d, n } => generators::random_ip_instance(d, n, seed)?.to_json(),
    })
}

fn write_output(path: Option<&PathBuf>, v: &Value) -> Result<()> {
    let text = serde_json::to_string_pretty(v)? + "\n";
    match path {
        Some(p) => std::fs::write(p, text).with_context(|| format!("writing {}", p.display())),
        None => {
            print!("{text}");
            Ok(())
        }
    }
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    let out = cli.global.out.clone();
    let result = run(cli).and_then(|o| {
        write_output(out.as_ref(), &o.value)?;
        Ok(o.ok)
    });
    match result {
        Ok(true) => ExitCode::SUCCESS,
        Ok(false) => ExitCode::from(1),
        Err(e) => {
            eprintln!("error: {:#}", anyhow!(e));
            ExitCode::from(2)
        }
    }
}
