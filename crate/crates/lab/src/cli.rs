//! `cur-lab` command line.
//!
//! Exit codes: 0 on success, 2 for usage and configuration errors, 1 for
//! runtime failures (IO, numerical errors).

use std::ffi::OsString;
use std::fs;
use std::io::Write;
use std::path::{Path, PathBuf};

use clap::{Args, Parser, Subcommand};

use cur_core::cluster::{
    clustering_accuracy, clustering_matrix, generate_union_of_subspaces, labels_from_clustering_matrix,
};
use cur_core::cur::{build_cur, draw_cur_indices, relative_error, verify_characterization_with, Norm, EXACT_TOL};
use cur_core::deim::deim_cur;
use cur_core::linalg::{compact_svd, numerical_rank, stable_rank};
use cur_core::rng::{stream, Purpose};
use cur_core::sampling::{
    length_dist, leverage_dist, min_sample_size_rv, sample_size_length_via_lev, sample_size_leverage, uniform_dist,
};
use cur_core::synth::LowRankSpec;
use cur_core::{Axis, DenseMatrix, IndexSet};

use crate::config::{parse_model_spec, parse_override, ExperimentConfig, SchemeName};
use crate::experiment::{default_cluster_d, fmt_real, run_experiment};
use crate::report::{emit_csv, write_csv};
use crate::{mtx, LabError};

#[derive(Debug, Parser)]
#[command(name = "cur-lab", version, about = "Exact CUR decompositions: tools and experiments")]
#[command(arg_required_else_help = true)]
struct Cli {
    #[command(flatten)]
    global: Global,
    #[command(subcommand)]
    command: Command,
}

#[derive(Debug, Args)]
struct Global {
    /// Master seed for every random draw.
    #[arg(long, global = true)]
    seed: Option<u64>,
    /// Absolute rank tolerance (default: max(m, n)·eps·σ₁).
    #[arg(long, global = true)]
    tol: Option<f64>,
    /// Output file (CSV for `experiment`, Matrix Market otherwise).
    #[arg(long, global = true)]
    out: Option<PathBuf>,
}

#[derive(Debug, Subcommand)]
enum Command {
    /// Singular values and numerical rank of a matrix.
    Svd {
        #[arg(long = "in")]
        input: PathBuf,
    },
    /// CUR from explicit or sampled index sets, with the exactness checks.
    Cur(CurArgs),
    /// DEIM-selected CUR of rank `k`.
    Deim {
        #[arg(long = "in")]
        input: PathBuf,
        #[arg(long)]
        k: usize,
    },
    /// Sample-size bounds.
    SampleSize(SampleSizeArgs),
    /// Monte Carlo experiment driven by a `key = value` config file.
    Experiment {
        #[arg(long)]
        config: PathBuf,
        /// Override a config entry, e.g. `--set trials=10`.
        #[arg(long = "set", value_name = "KEY=VALUE")]
        overrides: Vec<String>,
        /// Record wall time per trial (output is then not reproducible).
        #[arg(long)]
        timing: bool,
    },
    /// Subspace clustering from a sampled CUR.
    Cluster(ClusterArgs),
    /// Writes a random rank-`k` matrix.
    Generate {
        #[arg(long)]
        m: usize,
        #[arg(long)]
        n: usize,
        #[arg(long)]
        k: usize,
        #[arg(long)]
        kappa: Option<f64>,
    },
}

#[derive(Debug, Args)]
struct CurArgs {
    #[arg(long = "in")]
    input: PathBuf,
    /// Row indices (0-based, comma separated).
    #[arg(long, value_delimiter = ',', requires = "cols", conflicts_with = "scheme")]
    rows: Option<Vec<usize>>,
    #[arg(long, value_delimiter = ',', requires = "rows")]
    cols: Option<Vec<usize>>,
    #[arg(long, default_value = "length")]
    scheme: String,
    /// Rank used for leverage scores (default: numerical rank).
    #[arg(long)]
    k: Option<usize>,
    #[arg(long)]
    d1: Option<usize>,
    #[arg(long)]
    d2: Option<usize>,
    #[arg(long)]
    dedup: bool,
}

#[derive(Debug, Args)]
struct SampleSizeArgs {
    /// Stable rank.
    #[arg(long)]
    r: f64,
    #[arg(long)]
    k: Option<usize>,
    #[arg(long)]
    kappa: Option<f64>,
    #[arg(long)]
    eps: f64,
    #[arg(long)]
    delta: f64,
    #[arg(long = "c", default_value_t = 1.0)]
    big_c: f64,
    /// Leverage-score dominance factor.
    #[arg(long, default_value_t = 1.0)]
    beta: f64,
}

#[derive(Debug, Args)]
struct ClusterArgs {
    /// Data matrix, one point per column.
    #[arg(long = "in", conflicts_with = "model", required_unless_present = "model")]
    input: Option<PathBuf>,
    /// Union-of-subspaces model block to generate the data from.
    #[arg(long)]
    model: Option<PathBuf>,
    /// Largest subspace dimension (taken from the model when generating).
    #[arg(long)]
    d_max: Option<usize>,
    #[arg(long, default_value = "length")]
    scheme: String,
    /// Rows and columns drawn (default: ⌈4k ln k⌉ for numerical rank k).
    #[arg(long)]
    d: Option<usize>,
    #[arg(long, default_value_t = cur_core::cluster::DEFAULT_ZERO_TOL)]
    zero_tol: f64,
}

/// Parses `args` (including the program name) and runs the command, writing
/// results to `out`. Returns the process exit code.
pub fn run<I, T>(args: I, out: &mut dyn Write) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<OsString> + Clone,
{
    let cli = match Cli::try_parse_from(args) {
        Ok(cli) => cli,
        Err(e) => {
            let _ = e.print();
            return e.exit_code();
        }
    };
    match dispatch(cli, out) {
        Ok(()) => 0,
        Err(e) => {
            eprintln!("error: {e}");
            e.exit_code()
        }
    }
}

fn dispatch(cli: Cli, out: &mut dyn Write) -> Result<(), LabError> {
    let g = cli.global;
    match cli.command {
        Command::Svd { input } => svd(&mtx::load(&input)?, &g, out),
        Command::Cur(args) => cur(args, &g, out),
        Command::Deim { input, k } => deim(&mtx::load(&input)?, k, &g, out),
        Command::SampleSize(args) => sample_size(&args, out),
        Command::Experiment { config, overrides, timing } => experiment(&config, &overrides, timing, &g, out),
        Command::Cluster(args) => cluster(args, &g, out),
        Command::Generate { m, n, k, kappa } => generate(m, n, k, kappa, &g, out),
    }
}

fn stdout_err(e: std::io::Error) -> LabError {
    LabError::io("<stdout>", e)
}

macro_rules! say {
    ($out:expr, $($arg:tt)*) => {
        writeln!($out, $($arg)*).map_err(stdout_err)?
    };
}

fn join<T: ToString>(v: &[T]) -> String {
    v.iter().map(ToString::to_string).collect::<Vec<_>>().join(",")
}

fn svd(a: &DenseMatrix, g: &Global, out: &mut dyn Write) -> Result<(), LabError> {
    let f = compact_svd(a, g.tol)?;
    say!(out, "shape {}x{}", a.rows(), a.cols());
    say!(out, "rank {}", f.numerical_rank);
    say!(out, "tolerance {}", fmt_real(f.tolerance_used));
    say!(out, "stable_rank {}", fmt_real(stable_rank(a).unwrap_or(0.0)));
    for (i, s) in f.spectrum.iter().enumerate() {
        say!(out, "sigma[{}] {}", i + 1, fmt_real(*s));
    }
    Ok(())
}

fn scheme(name: &str) -> Result<SchemeName, LabError> {
    name.parse().map_err(|_| LabError::Usage(format!("unknown scheme `{name}` (uniform, length, leverage)")))
}

fn draw(
    a: &DenseMatrix,
    scheme: SchemeName,
    k: usize,
    d1: usize,
    d2: usize,
    dedup: bool,
    g: &Global,
) -> Result<(IndexSet, IndexSet), LabError> {
    let (rd, cd) = match scheme {
        SchemeName::Uniform => (uniform_dist(a.rows(), Axis::Rows)?, uniform_dist(a.cols(), Axis::Cols)?),
        SchemeName::Length => (length_dist(a, Axis::Rows)?, length_dist(a, Axis::Cols)?),
        SchemeName::Leverage => (leverage_dist(a, k, Axis::Rows, g.tol)?, leverage_dist(a, k, Axis::Cols, g.tol)?),
    };
    let seed = g.seed.unwrap_or(0);
    Ok(draw_cur_indices(
        a,
        &rd,
        &cd,
        d1,
        d2,
        &mut stream(seed, 0, 0, Purpose::Rows),
        &mut stream(seed, 0, 0, Purpose::Cols),
        dedup,
    )?)
}

fn cur(args: CurArgs, g: &Global, out: &mut dyn Write) -> Result<(), LabError> {
    let a = mtx::load(&args.input)?;
    let (rows, cols) = match (args.rows, args.cols) {
        (Some(r), Some(c)) => (IndexSet::rows(r), IndexSet::cols(c)),
        _ => {
            let k = args.k.unwrap_or_else(|| numerical_rank(&a, g.tol).max(1));
            let d = default_cluster_d(k);
            draw(&a, scheme(&args.scheme)?, k, args.d1.unwrap_or(d), args.d2.unwrap_or(d), args.dedup, g)?
        }
    };
    let f = build_cur(&a, &rows, &cols, g.tol)?;
    let rep = verify_characterization_with(&a, &rows, &cols, EXACT_TOL, g.tol)?;
    say!(out, "rows {}", join(rows.indices()));
    say!(out, "cols {}", join(cols.indices()));
    say!(out, "rank A={} C={} R={} U={}", rep.rank_a, rep.rank_c, rep.rank_r, rep.rank_u);
    say!(out, "rel_err_2 {}", fmt_real(relative_error(&a, &f, Norm::Spectral)));
    say!(out, "rel_err_F {}", fmt_real(relative_error(&a, &f, Norm::Frobenius)));
    let names = ["rank_u", "cur", "projection", "pinv_product", "ranks_cr"];
    for (name, holds) in names.iter().zip(rep.conditions()) {
        say!(out, "condition {name} {holds}");
    }
    say!(out, "exact {}", rep.all_hold());
    if let Some(path) = &g.out {
        mtx::save(path, &f.u)?;
    }
    Ok(())
}

fn deim(a: &DenseMatrix, k: usize, g: &Global, out: &mut dyn Write) -> Result<(), LabError> {
    let f = deim_cur(a, k, g.tol)?;
    say!(out, "rows {}", join(f.rows.indices()));
    say!(out, "cols {}", join(f.cols.indices()));
    say!(out, "residual {}", fmt_real(relative_error(a, &f, Norm::Frobenius)));
    if let Some(path) = &g.out {
        mtx::save(path, &f.u)?;
    }
    Ok(())
}

fn sample_size(args: &SampleSizeArgs, out: &mut dyn Write) -> Result<(), LabError> {
    let d = min_sample_size_rv(args.r, args.eps, args.delta, args.big_c)?;
    say!(out, "stable_rank_bound {d}");
    if let Some(k) = args.k {
        say!(out, "leverage_bound {}", sample_size_leverage(k, args.beta, args.delta)?);
        if let Some(kappa) = args.kappa {
            say!(out, "length_via_leverage_bound {}", sample_size_length_via_lev(args.r, kappa, k, args.delta)?);
        }
    }
    Ok(())
}

fn experiment(
    path: &Path,
    overrides: &[String],
    timing: bool,
    g: &Global,
    out: &mut dyn Write,
) -> Result<(), LabError> {
    let text = fs::read_to_string(path).map_err(|e| LabError::io(path, e))?;
    let cfg: ExperimentConfig = text.parse()?;
    let mut entries = overrides.iter().map(|s| parse_override(s)).collect::<Result<Vec<_>, _>>()?;
    if let Some(seed) = g.seed {
        entries.push(parse_override(&format!("seed={seed}"))?);
    }
    if let Some(tol) = g.tol {
        entries.push(parse_override(&format!("tol={tol:e}"))?);
    }
    if timing {
        entries.push(parse_override("timing=true")?);
    }
    let mut cfg = cfg.with_overrides(&entries)?;
    if let Some(p) = &g.out {
        cfg.out = Some(p.clone());
    }
    let result = run_experiment(&cfg)?;
    match &cfg.out {
        Some(p) => emit_csv(&result.records, &result.summary, p),
        None => write_csv(out, &result.records, &result.summary).map_err(stdout_err),
    }
}

fn cluster(args: ClusterArgs, g: &Global, out: &mut dyn Write) -> Result<(), LabError> {
    let (a, truth, model_d_max) = match (&args.input, &args.model) {
        (Some(p), _) => (mtx::load(p)?, None, None),
        (None, Some(p)) => {
            let text = fs::read_to_string(p).map_err(|e| LabError::io(p, e))?;
            let mut spec = parse_model_spec(&text)?;
            if let Some(seed) = g.seed {
                spec.seed = seed;
            }
            let (a, model) = generate_union_of_subspaces(&spec, &mut stream(spec.seed, 0, 0, Purpose::Model))?;
            (a, Some(model.truth()), Some(model.d_max()))
        }
        (None, None) => unreachable!("clap requires --in or --model"),
    };
    let d_max = args.d_max.or(model_d_max).ok_or_else(|| LabError::Usage("--d-max is required with --in".into()))?;
    let k = numerical_rank(&a, g.tol).max(1);
    let d = args.d.unwrap_or_else(|| default_cluster_d(k));
    let (rows, cols) = draw(&a, scheme(&args.scheme)?, k, d, d, false, g)?;
    let f = build_cur(&a, &rows, &cols, g.tol)?;
    let labels = labels_from_clustering_matrix(&clustering_matrix(&f, d_max, args.zero_tol)?);
    say!(out, "rank {k}");
    say!(out, "exact {}", relative_error(&a, &f, Norm::Frobenius) <= EXACT_TOL);
    say!(out, "clusters {}", labels.num_clusters());
    say!(out, "labels {}", join(labels.labels()));
    if let Some(truth) = truth {
        say!(out, "accuracy {}", fmt_real(clustering_accuracy(&labels, &truth)?));
    }
    Ok(())
}

fn generate(m: usize, n: usize, k: usize, kappa: Option<f64>, g: &Global, out: &mut dyn Write) -> Result<(), LabError> {
    let spec = LowRankSpec { kappa, ..LowRankSpec::new(m, n, k) };
    let a = spec.generate(&mut stream(g.seed.unwrap_or(0), 0, 0, Purpose::Matrix))?;
    match &g.out {
        Some(p) => mtx::save(p, &a),
        None => mtx::write_matrix(out, &a).map_err(stdout_err),
    }
}
