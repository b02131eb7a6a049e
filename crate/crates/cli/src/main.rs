use std::fs::File;
use std::io::{self, BufWriter, Write};
use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand, ValueEnum};

use spp_core::mesh::SideReport;
use spp_core::reference::reference_layout;
use spp_core::study::{standard_eps1_list, standard_n_list};
use spp_core::{
    build_mesh, check_against_reference, mesh_diagnostics, reference_table, run_study, solve_cell, Error,
    ManufacturedSolution, MeshParams, OutputFormat, QuadratureRule, StudyConfig,
};

const EXIT_CONFIG: u8 = 1;
const EXIT_CHECK: u8 = 2;
const EXIT_NUMERICAL: u8 = 3;

#[derive(Parser)]
#[command(name = "spp", version, about = "Linear FEM on Bakhvalov-type meshes for -eps1 u'' + eps2 u' + u = cos(pi x)")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Solve one cell and dump mesh and discrete solution.
    Solve(SolveArgs),
    /// Sweep a parameter grid and print errors and rates.
    Study(StudyArgs),
    /// Regenerate one of the six published tables.
    Table(TableArgs),
    /// Dump a mesh and optionally its lemma diagnostics.
    MeshInspect(MeshArgs),
}

#[derive(Args, Clone)]
struct Discretization {
    /// Mesh parameter tau.
    #[arg(long)]
    tau: Option<f64>,
    /// Mesh parameter p in (0, 1).
    #[arg(long, default_value_t = 0.5)]
    p: f64,
    /// Gauss points per panel for assembly.
    #[arg(long)]
    quad_points: Option<usize>,
    /// Panels per element for assembly.
    #[arg(long, default_value_t = 1)]
    quad_panels: usize,
}

impl Discretization {
    fn rule(&self, default_points: usize) -> Result<QuadratureRule, Error> {
        QuadratureRule::new(self.quad_points.unwrap_or(default_points), self.quad_panels)
    }
}

#[derive(Clone, Copy, ValueEnum)]
enum Format {
    Csv,
    Md,
}

impl From<Format> for OutputFormat {
    fn from(f: Format) -> Self {
        match f {
            Format::Csv => OutputFormat::Csv,
            Format::Md => OutputFormat::Markdown,
        }
    }
}

#[derive(Args)]
struct SolveArgs {
    #[arg(long)]
    eps1: f64,
    #[arg(long)]
    eps2: f64,
    #[arg(long)]
    n: usize,
    #[command(flatten)]
    disc: Discretization,
    #[arg(long)]
    out: Option<PathBuf>,
}

#[derive(Args)]
struct StudyArgs {
    #[arg(long, value_delimiter = ',', required = true)]
    eps1: Vec<f64>,
    #[arg(long, value_delimiter = ',', required = true)]
    eps2: Vec<f64>,
    #[arg(long, value_delimiter = ',', required = true)]
    n: Vec<usize>,
    #[command(flatten)]
    disc: Discretization,
    #[arg(long, value_enum, default_value = "csv")]
    format: Format,
    #[arg(long)]
    out: Option<PathBuf>,
    /// Worker threads.
    #[arg(long)]
    jobs: Option<usize>,
}

#[derive(Args)]
struct TableArgs {
    #[arg(long, value_parser = clap::value_parser!(u8).range(1..=6))]
    id: u8,
    /// Compare against the printed values; exit 2 on mismatch.
    #[arg(long)]
    check: bool,
    /// Override the eps1 columns.
    #[arg(long, value_delimiter = ',')]
    eps1: Option<Vec<f64>>,
    /// Override the N rows.
    #[arg(long, value_delimiter = ',')]
    n: Option<Vec<usize>>,
    #[command(flatten)]
    disc: Discretization,
    #[arg(long, value_enum, default_value = "md")]
    format: Format,
    #[arg(long)]
    out: Option<PathBuf>,
    #[arg(long)]
    jobs: Option<usize>,
}

#[derive(Args)]
struct MeshArgs {
    #[arg(long, required_unless_present = "mu0")]
    eps1: Option<f64>,
    #[arg(long, required_unless_present = "mu0")]
    eps2: Option<f64>,
    /// Decay rate at x = 0 (instead of eps1/eps2).
    #[arg(long, requires = "mu1")]
    mu0: Option<f64>,
    /// Decay rate at x = 1.
    #[arg(long)]
    mu1: Option<f64>,
    #[arg(long)]
    n: usize,
    #[command(flatten)]
    disc: Discretization,
    /// Print the lemma checks to stderr.
    #[arg(long)]
    diagnostics: bool,
    #[arg(long)]
    out: Option<PathBuf>,
}

enum Failure {
    Config(String),
    Numerical(String),
    Check(String),
    Io(io::Error),
}

impl From<Error> for Failure {
    fn from(e: Error) -> Self {
        if e.is_numerical() {
            Failure::Numerical(e.to_string())
        } else {
            Failure::Config(e.to_string())
        }
    }
}

impl From<io::Error> for Failure {
    fn from(e: io::Error) -> Self {
        Failure::Io(e)
    }
}

fn open_out(path: &Option<PathBuf>) -> io::Result<Box<dyn Write>> {
    Ok(match path {
        Some(p) => Box::new(BufWriter::new(File::create(p)?)),
        None => Box::new(BufWriter::new(io::stdout().lock())),
    })
}

fn solve(args: SolveArgs) -> Result<(), Failure> {
    let params = MeshParams::new(args.n, args.disc.tau.unwrap_or(2.0), args.disc.p)?;
    let quad = args.disc.rule(5)?;
    let cell = solve_cell(args.eps1, args.eps2, &params, &quad, &spp_core::metrics::default_error_quadrature())?;
    let mut out = open_out(&args.out)?;
    cell.mesh.write_dump(&mut out, Some(cell.u_h.values()))?;
    out.flush()?;
    eprintln!(
        "e_energy={:.6e} e_superclose={:.6e} e_interp={:.6e} galerkin_residual={:.2e} quad_delta={:.2e}",
        cell.e_energy, cell.e_superclose, cell.e_interp, cell.galerkin_residual, cell.quad_delta
    );
    Ok(())
}

fn finish_sweep(table: &spp_core::ConvergenceTable) -> Result<(), Failure> {
    let mut numerical = false;
    for row in table.failures() {
        eprintln!(
            "cell eps1={:e} eps2={:e} N={} failed: {}",
            row.eps1,
            row.eps2,
            row.n,
            row.error.as_deref().unwrap_or("")
        );
        numerical |= row.numerical_failure;
    }
    match table.failures().next() {
        None => Ok(()),
        Some(_) if numerical => Err(Failure::Numerical("some cells failed".into())),
        Some(_) => Err(Failure::Config("some cells failed".into())),
    }
}

fn study(args: StudyArgs) -> Result<(), Failure> {
    let mut cfg = StudyConfig::new(args.eps1, args.eps2, args.n);
    cfg.tau = args.disc.tau.unwrap_or(2.0);
    cfg.p = args.disc.p;
    cfg.quad = args.disc.rule(5)?;
    cfg.jobs = args.jobs;
    let table = run_study(&cfg)?;
    let mut out = open_out(&args.out)?;
    out.write_all(table.render(args.format.into()).as_bytes())?;
    out.flush()?;
    finish_sweep(&table)
}

fn table(args: TableArgs) -> Result<(), Failure> {
    let reference = reference_table(args.id)?;
    let mut cfg = StudyConfig::new(
        args.eps1.unwrap_or_else(standard_eps1_list),
        vec![reference.eps2],
        args.n.unwrap_or_else(standard_n_list),
    )
    .reproduction_profile();
    if let Some(tau) = args.disc.tau {
        cfg.tau = tau;
    }
    cfg.p = args.disc.p;
    cfg.quad = args.disc.rule(1)?;
    cfg.jobs = args.jobs;
    let table = run_study(&cfg)?;
    let text = match args.format {
        Format::Csv => table.to_csv(),
        Format::Md => reference_layout(&table, &reference),
    };
    let mut out = open_out(&args.out)?;
    out.write_all(text.as_bytes())?;
    out.flush()?;
    finish_sweep(&table)?;
    if args.check {
        let report = check_against_reference(&table, args.id)?;
        for v in report.failures() {
            eprintln!(
                "mismatch eps1={:e} N={} {:?}: computed {:.4e}, printed {}, target {:.4} +/- {}",
                v.eps1, v.n, v.kind, v.computed, v.printed, v.target, v.tolerance
            );
        }
        eprintln!("{}", report.summary());
        if !report.passed() {
            return Err(Failure::Check(format!("table {} does not match", args.id)));
        }
    }
    Ok(())
}

fn mesh_inspect(args: MeshArgs) -> Result<(), Failure> {
    let params = MeshParams::new(args.n, args.disc.tau.unwrap_or(2.0), args.disc.p)?;
    let (mu0, mu1) = match (args.mu0, args.mu1, args.eps1, args.eps2) {
        (Some(a), Some(b), _, _) => (a, b),
        (_, _, Some(e1), Some(e2)) => {
            let ms = ManufacturedSolution::new(e1, e2)?;
            (ms.mu0, ms.mu1)
        }
        _ => return Err(Failure::Config("give --eps1 and --eps2, or --mu0 and --mu1".into())),
    };
    let mesh = build_mesh(mu0, mu1, &params)?;
    let mut out = open_out(&args.out)?;
    mesh.write_dump(&mut out, None)?;
    out.flush()?;
    if args.diagnostics {
        let d = mesh_diagnostics(&mesh);
        for (side, report) in [("left", &d.left), ("right", &d.right)] {
            match report {
                SideReport::Skipped { notice } => eprintln!("{side}: {notice}"),
                SideReport::Graded(g) => {
                    eprintln!("{side}: monotone={}", g.monotone);
                    for b in &g.brackets {
                        eprintln!("{side}: {} : {:.6e} <= {:.6e} <= {:.6e} {}", b.name, b.lower, b.value, b.upper, ok(b.holds()));
                    }
                    eprintln!(
                        "{side}: max (mu N h)^1.5 e^(-p mu d) = {:.6e}, ^2.5 = {:.6e}",
                        g.scaled_product_m32, g.scaled_product_m52
                    );
                    eprintln!(
                        "{side}: max T_i = {:.6e} at i = {} (endpoint: {}), mu N^2 max T = {:.6e}",
                        g.t_max, g.t_argmax, g.t_max_at_endpoint, g.t_max_scaled
                    );
                }
            }
        }
        for b in &d.central {
            eprintln!("central: {} : {:.6e} <= {:.6e} <= {:.6e} {}", b.name, b.lower, b.value, b.upper, ok(b.holds()));
        }
    }
    Ok(())
}

fn ok(b: bool) -> &'static str {
    if b {
        "ok"
    } else {
        "VIOLATED"
    }
}

fn main() -> ExitCode {
    let cli = match Cli::try_parse() {
        Ok(cli) => cli,
        Err(e) => {
            let code = if e.use_stderr() { EXIT_CONFIG } else { 0 };
            let _ = e.print();
            return ExitCode::from(code);
        }
    };
    let result = match cli.command {
        Command::Solve(a) => solve(a),
        Command::Study(a) => study(a),
        Command::Table(a) => table(a),
        Command::MeshInspect(a) => mesh_inspect(a),
    };
    match result {
        Ok(()) => ExitCode::SUCCESS,
        Err(Failure::Config(msg)) => {
            eprintln!("error: {msg}");
            ExitCode::from(EXIT_CONFIG)
        }
        Err(Failure::Check(msg)) => {
            eprintln!("check failed: {msg}");
            ExitCode::from(EXIT_CHECK)
        }
        Err(Failure::Numerical(msg)) => {
            eprintln!("numerical failure: {msg}");
            ExitCode::from(EXIT_NUMERICAL)
        }
        Err(Failure::Io(e)) => {
            eprintln!("error: {e}");
            ExitCode::from(EXIT_CONFIG)
        }
    }
}
