use std::fs;
use std::io::{self, Write};
use std::path::PathBuf;
use std::process::ExitCode;

use absep::chull::{builtin_sets, hull_membership, DEFAULT_MAX_ITER, DEFAULT_TOL};
use absep::criteria::{multipartite_alpha_bounds, multipartite_ball_param, symmetric_alpha_bounds, AlphaBounds};
use absep::falsify::{falsify_ap, falsify_sap, haar_unitary, unitary_json, FalsifyOutcome};
use absep::io::parse_spectrum_arg;
use absep::maps::DensityMatrix;
use absep::polytope::{brute_force_facets, ordered_sector_facet, parse_rational, two_simplex_vertices, Facet};
use absep::report::{check_spectrum, CheckOptions};
use absep::scan::{class_counts, region_scan, write_csv, ScanConfig};
use absep::symmetric::{sap_check_via_embedding, MAX_EIGEN_DIM};
use absep::{validate_spectrum, Error, Result, Spectrum, SystemDims};
use clap::{Args, Parser, Subcommand, ValueEnum};
use serde_json::json;

#[derive(Parser)]
#[command(name = "absep", version, about = "Spectral certificates of absolute separability")]
struct Cli {
    #[arg(long, global = true, value_enum, default_value_t = Format::Json)]
    format: Format,
    /// Master seed for randomized subcommands.
    #[arg(long, global = true, default_value_t = 0)]
    seed: u64,
    /// Residual tolerance of the hull solver.
    #[arg(long, global = true, default_value_t = DEFAULT_TOL)]
    tol: f64,
    #[command(subcommand)]
    command: Command,
}

#[derive(Clone, Copy, PartialEq, Eq, ValueEnum)]
enum Format {
    Json,
    Text,
}

#[derive(Subcommand)]
enum Command {
    /// Run every applicable criterion and the hull search on a spectrum.
    Check(CheckArgs),
    /// Exact facets of the union of the two reduction-map simplexes.
    Facets(FacetArgs),
    /// Decide hull membership and print the decomposition certificate.
    Solve(SolveArgs),
    /// Search for a unitary that makes the spectrum NPT.
    Falsify(FalsifyArgs),
    /// Criteria on the symmetric subspace, plus a PPT check of the Dicke-diagonal state.
    SymCheck(SymCheckArgs),
    /// Reduction-map thresholds for N qudits.
    Bounds(BoundsArgs),
    /// Classify random bipartite spectra by detecting criterion (CSV).
    Scan(ScanArgs),
}

#[derive(Args, Clone)]
struct DimsArgs {
    /// Bipartite dimensions, e.g. 3x3.
    #[arg(long, conflicts_with_all = ["d", "n"])]
    dims: Option<String>,
    /// Local dimension of each qudit.
    #[arg(long, requires = "n")]
    d: Option<usize>,
    /// Number of qudits.
    #[arg(long, requires = "d")]
    n: Option<usize>,
    /// Restrict to the symmetric subspace (with --d/--n).
    #[arg(long, requires = "d")]
    symmetric: bool,
}

impl DimsArgs {
    fn resolve(&self, from_file: Option<SystemDims>) -> Result<SystemDims> {
        if let Some(text) = &self.dims {
            return text.parse();
        }
        if let (Some(d), Some(n)) = (self.d, self.n) {
            return if self.symmetric { SystemDims::symmetric(d, n) } else { SystemDims::multiqudit(d, n) };
        }
        from_file.ok_or_else(|| Error::InvalidDims("no dimensions: pass --dims or --d/--n, or put them in the spectrum file".into()))
    }
}

#[derive(Args)]
struct CheckArgs {
    /// Spectrum file (JSON or plain text) or an inline comma-separated list.
    #[arg(long)]
    spectrum: String,
    #[command(flatten)]
    dims: DimsArgs,
    /// Use only the generic symmetric bounds.
    #[arg(long)]
    generic: bool,
    /// Skip the hull search.
    #[arg(long)]
    no_hull: bool,
    #[arg(long, default_value_t = DEFAULT_MAX_ITER)]
    max_iter: usize,
}

#[derive(Args)]
struct FacetArgs {
    /// Total dimension.
    #[arg(long = "D", alias = "dim")]
    dim: usize,
    #[arg(long, default_value = "-1", allow_hyphen_values = true)]
    alpha_minus: String,
    #[arg(long, default_value = "2")]
    alpha_plus: String,
    /// Enumerate every facet instead of the ordered-sector one.
    #[arg(long)]
    brute_force: bool,
}

#[derive(Args)]
struct SolveArgs {
    #[arg(long)]
    spectrum: String,
    #[command(flatten)]
    dims: DimsArgs,
    #[arg(long, default_value_t = DEFAULT_MAX_ITER)]
    max_iter: usize,
}

#[derive(Args)]
struct FalsifyArgs {
    #[arg(long)]
    spectrum: String,
    #[command(flatten)]
    dims: DimsArgs,
    #[arg(long, default_value_t = 10_000)]
    samples: u64,
    /// Write the witness unitary as a JSON matrix.
    #[arg(long)]
    dump_witness: Option<PathBuf>,
}

#[derive(Args)]
struct SymCheckArgs {
    #[arg(long)]
    d: usize,
    #[arg(long)]
    n: usize,
    #[arg(long)]
    spectrum: String,
    /// Use the sharper bounds where known (default).
    #[arg(long, conflicts_with = "generic")]
    tight: bool,
    /// Use only the generic bounds.
    #[arg(long)]
    generic: bool,
}

#[derive(Args)]
struct BoundsArgs {
    #[arg(long)]
    d: usize,
    #[arg(long)]
    n: usize,
    #[arg(long)]
    symmetric: bool,
}

#[derive(Args)]
struct ScanArgs {
    #[arg(long)]
    dims: String,
    /// Rows per sampled spectrum.
    #[arg(long, default_value_t = 10)]
    grid: usize,
    #[arg(long, default_value_t = 10_000)]
    samples: u64,
    /// Write the CSV here instead of stdout.
    #[arg(long)]
    output: Option<PathBuf>,
    #[arg(long, default_value_t = DEFAULT_MAX_ITER)]
    max_iter: usize,
}

fn load_spectrum(arg: &str, dims: &DimsArgs) -> Result<(Spectrum, SystemDims)> {
    let input = parse_spectrum_arg(arg)?;
    let dims = dims.resolve(input.dims)?;
    Ok((validate_spectrum(&input.eigenvalues, &dims)?, dims))
}

fn emit(format: Format, value: &serde_json::Value, text: impl FnOnce() -> String) -> Result<()> {
    let out = match format {
        Format::Json => serde_json::to_string_pretty(value)?,
        Format::Text => text(),
    };
    let mut stdout = io::stdout().lock();
    writeln!(stdout, "{}", out.trim_end())?;
    Ok(())
}

fn cmd_check(cli: &Cli, args: &CheckArgs) -> Result<()> {
    let (s, dims) = load_spectrum(&args.spectrum, &args.dims)?;
    let opts = CheckOptions { tol: cli.tol, max_iter: args.max_iter, run_hull: !args.no_hull, use_tight: !args.generic };
    let report = check_spectrum(&s, &dims, &opts)?;
    emit(cli.format, &serde_json::to_value(&report)?, || report.to_text())
}

fn facet_text(facets: &[Facet]) -> String {
    facets.iter().map(|f| format!("{}\n", f.display_inequality())).collect()
}

fn cmd_facets(cli: &Cli, args: &FacetArgs) -> Result<()> {
    let am = parse_rational(&args.alpha_minus)?;
    let ap = parse_rational(&args.alpha_plus)?;
    let facets = if args.brute_force {
        brute_force_facets(&two_simplex_vertices(args.dim, &am, &ap)?)?
    } else {
        vec![ordered_sector_facet(args.dim, &am, &ap)?]
    };
    emit(cli.format, &serde_json::to_value(&facets)?, || facet_text(&facets))
}

fn cmd_solve(cli: &Cli, args: &SolveArgs) -> Result<()> {
    let (s, dims) = load_spectrum(&args.spectrum, &args.dims)?;
    let sets = builtin_sets(&dims)?;
    let cert = hull_membership(&s, &sets, cli.tol, args.max_iter)?.certificate();
    emit(cli.format, &serde_json::to_value(&cert)?, || {
        let mut out = format!(
            "feasible: {}\nresidual: {:.3e}\niterations: {}\n",
            cert.feasible, cert.residual, cert.iterations
        );
        for p in &cert.parts {
            out.push_str(&format!("{:<12} trace={:.9}\n", p.set, p.trace));
        }
        out
    })
}

fn cmd_falsify(cli: &Cli, args: &FalsifyArgs) -> Result<()> {
    let (s, dims) = load_spectrum(&args.spectrum, &args.dims)?;
    let outcome: FalsifyOutcome = match dims {
        SystemDims::Symmetric { d, n } => falsify_sap(&s, d, n, args.samples, cli.seed)?,
        _ => falsify_ap(&s, &dims, args.samples, cli.seed)?,
    };
    if let (Some(path), Some(seed)) = (&args.dump_witness, outcome.witness_unitary_seed) {
        let u = haar_unitary(dims.total_dim(), seed);
        fs::write(path, serde_json::to_string_pretty(&unitary_json(&u))?)
            .map_err(|e| Error::Io(format!("{}: {e}", path.display())))?;
    }
    emit(cli.format, &serde_json::to_value(&outcome)?, || {
        let status = if outcome.witness_found { "witness found" } else { "no witness found at this budget" };
        format!(
            "{status}\nsamples: {}\nbest min PT eigenvalue: {:.6e} (sample {})\n",
            outcome.samples_run, outcome.best_min_pt_eig, outcome.best_sample
        )
    })
}

fn cmd_sym_check(cli: &Cli, args: &SymCheckArgs) -> Result<()> {
    let dims = SystemDims::symmetric(args.d, args.n)?;
    let input = parse_spectrum_arg(&args.spectrum)?;
    let s = validate_spectrum(&input.eigenvalues, &dims)?;
    let opts = CheckOptions { tol: cli.tol, use_tight: !args.generic, ..CheckOptions::default() };
    let report = check_spectrum(&s, &dims, &opts)?;
    let full_dim = (args.d as f64).powi(args.n as i32);
    let sap = if full_dim <= MAX_EIGEN_DIM as f64 {
        let rho = DensityMatrix::operator(diag(s.values()), vec![s.len()])?;
        Some(sap_check_via_embedding(&rho, args.d, args.n)?)
    } else {
        None
    };
    let value = json!({ "report": report, "dicke_diagonal_ppt": sap });
    emit(cli.format, &value, || {
        let mut out = report.to_text();
        if let Some(r) = &sap {
            for (k, e) in &r.min_pt_eig {
                out.push_str(&format!("dicke-diagonal PT over {k} qudit(s): λ_min = {e:+.6e}\n"));
            }
        }
        out
    })
}

fn diag(values: &[f64]) -> absep::maps::CMatrix {
    absep::maps::CMatrix::from_diagonal(&nalgebra::DVector::from_iterator(values.len(), values.iter().map(|&v| v.into())))
}

fn bounds_json(dims: &SystemDims, b: &AlphaBounds, a: Option<f64>) -> serde_json::Value {
    let dim = dims.total_dim();
    json!({
        "dims": dims,
        "D": dim,
        "A": a,
        "alpha_minus": b.alpha_minus,
        "alpha_plus": b.alpha_plus,
        "lambda_min_threshold": b.min_threshold(dim),
        "lambda_max_threshold": b.max_threshold(dim),
        "alpha_minus_provenance": b.lower,
        "alpha_plus_provenance": b.upper,
    })
}

fn cmd_bounds(cli: &Cli, args: &BoundsArgs) -> Result<()> {
    let (dims, bounds, a) = if args.symmetric {
        let dims = SystemDims::symmetric(args.d, args.n)?;
        (dims, symmetric_alpha_bounds(args.d, args.n), None)
    } else {
        let dims = SystemDims::multiqudit(args.d, args.n)?;
        let a = multipartite_ball_param(args.d, args.n).a;
        (dims, multipartite_alpha_bounds(args.d, args.n), Some(a))
    };
    let value = bounds_json(&dims, &bounds, a);
    emit(cli.format, &value, || {
        let dim = dims.total_dim();
        let mut out = format!("dims: {dims} (D = {dim})\n");
        if let Some(a) = a {
            out.push_str(&format!("A: {a:.10}\n"));
        }
        out.push_str(&format!("alpha_-: {:.10} ({:?})\n", bounds.alpha_minus, bounds.lower));
        out.push_str(&format!("alpha_+: {:.10} ({:?})\n", bounds.alpha_plus, bounds.upper));
        out.push_str(&format!("lambda_min >= {:.10}\n", bounds.min_threshold(dim)));
        out.push_str(&format!("lambda_max <= {:.10}\n", bounds.max_threshold(dim)));
        out
    })
}

fn cmd_scan(cli: &Cli, args: &ScanArgs) -> Result<()> {
    let dims: SystemDims = args.dims.parse()?;
    let cfg = ScanConfig { grid: args.grid, samples: args.samples, seed: cli.seed, tol: cli.tol, max_iter: args.max_iter };
    let rows = region_scan(&dims, &cfg)?;
    match &args.output {
        Some(path) => {
            let file = fs::File::create(path).map_err(|e| Error::Io(format!("{}: {e}", path.display())))?;
            write_csv(&rows, io::BufWriter::new(file))?;
            let counts: Vec<String> = class_counts(&rows).iter().map(|(c, n)| format!("{c}={n}")).collect();
            eprintln!("{}", counts.join(" "));
        }
        None => write_csv(&rows, io::BufWriter::new(io::stdout().lock()))?,
    }
    Ok(())
}

fn run(cli: &Cli) -> Result<()> {
    if !(cli.tol.is_finite() && cli.tol > 0.0) {
        return Err(Error::PreconditionUnmet(format!("--tol must be positive, got {}", cli.tol)));
    }
    match &cli.command {
        Command::Check(a) => cmd_check(cli, a),
        Command::Facets(a) => cmd_facets(cli, a),
        Command::Solve(a) => cmd_solve(cli, a),
        Command::Falsify(a) => cmd_falsify(cli, a),
        Command::SymCheck(a) => cmd_sym_check(cli, a),
        Command::Bounds(a) => cmd_bounds(cli, a),
        Command::Scan(a) => cmd_scan(cli, a),
    }
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    match run(&cli) {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::from(if e.is_input_error() { 2 } else { 3 })
        }
    }
}
