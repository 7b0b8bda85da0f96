use std::io::{Read, Write};
use std::path::{Path, PathBuf};
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand, ValueEnum};
use resultant_forge_core::bench::{stability_run, NormalSampler};
use resultant_forge_core::oracle::bkk_2d;
use resultant_forge_core::polytope::{newton_polytope, Displacement};
use resultant_forge_core::solver::{EigenDiagnostics, Root};
use resultant_forge_core::template::FormulationPreference;
use resultant_forge_core::verify::{verify, VerifyOptions};
use resultant_forge_core::{generate, solve, Error, PolySystem, SearchConfig, TemplateFile};
use serde::Serialize;

#[derive(Parser)]
#[command(name = "resultant-forge", version, about = "Generate and run sparse-resultant polynomial solvers")]
struct Cli {
    /// Cap on worker threads for search and bench.
    #[arg(long, global = true)]
    jobs: Option<usize>,
    /// Suppress progress output on stderr.
    #[arg(short, long, global = true)]
    quiet: bool,
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Build a solver template for a problem file.
    Generate(GenerateArgs),
    /// Solve one coefficient instance with a template.
    Solve(SolveArgs),
    /// Numerical stability over random instances.
    Bench(BenchArgs),
    /// Cross-check a template against oracles.
    Verify(VerifyArgs),
    /// Print polytope or template details.
    #[command(subcommand)]
    Inspect(InspectCommand),
}

#[derive(Args)]
struct GenerateArgs {
    #[arg(long)]
    problem: PathBuf,
    #[arg(long, env = "RESULTANT_FORGE_SEED", default_value_t = 0)]
    seed: u64,
    #[arg(long, default_value_t = 0.45)]
    epsilon: f64,
    #[arg(long)]
    max_subset: Option<usize>,
    #[arg(long, default_value = "auto")]
    formulation: FormulationPreference,
    #[arg(long)]
    out: PathBuf,
}

#[derive(Clone, Copy, ValueEnum)]
enum OutputFormat {
    Json,
    Csv,
}

#[derive(Args)]
struct SolveArgs {
    #[arg(long)]
    template: PathBuf,
    /// JSON array of coefficients by slot, or `-` for stdin.
    #[arg(long)]
    coeffs: String,
    /// Report complex roots too, not only real ones.
    #[arg(long)]
    all_complex: bool,
    #[arg(long, value_enum, default_value = "json")]
    format: OutputFormat,
}

#[derive(Args)]
struct BenchArgs {
    #[arg(long)]
    template: PathBuf,
    #[arg(long, default_value_t = 5000)]
    n: usize,
    #[arg(long, env = "RESULTANT_FORGE_SEED", default_value_t = 0)]
    seed: u64,
    /// Report path; `.json` writes JSON, anything else text.
    #[arg(long)]
    report: Option<PathBuf>,
}

#[derive(Args)]
struct VerifyArgs {
    #[arg(long)]
    problem: PathBuf,
    #[arg(long)]
    template: PathBuf,
    #[arg(long, default_value_t = 20)]
    instances: usize,
    #[arg(long, env = "RESULTANT_FORGE_SEED", default_value_t = 0)]
    seed: u64,
}

#[derive(Subcommand)]
enum InspectCommand {
    /// Newton polytopes of a problem.
    Polytope {
        #[arg(long)]
        problem: PathBuf,
    },
    /// Sizes, partition and reduction trace of a template.
    Template {
        #[arg(long)]
        template: PathBuf,
    },
}

struct Failure {
    code: u8,
    message: String,
}

impl From<Error> for Failure {
    fn from(e: Error) -> Self {
        let code = match &e {
            Error::NoFavourableBasis { .. } | Error::Underdetermined { .. } => 2,
            Error::CannotSquare(_) => 3,
            Error::UnsupportedVersion { .. } | Error::Mismatch(_) => 4,
            _ => 1,
        };
        Failure {
            code,
            message: e.to_string(),
        }
    }
}

impl Failure {
    fn io(path: &Path, e: std::io::Error) -> Self {
        Failure {
            code: 1,
            message: format!("{}: {e}", path.display()),
        }
    }

    fn other(message: impl Into<String>) -> Self {
        Failure {
            code: 1,
            message: message.into(),
        }
    }
}

type CliResult = Result<(), Failure>;

fn load_problem(path: &Path) -> Result<PolySystem, Failure> {
    let text = std::fs::read_to_string(path).map_err(|e| Failure::io(path, e))?;
    PolySystem::from_json(&text).map_err(|e| Failure::other(format!("{}: {e}", path.display())))
}

fn load_template(path: &Path) -> Result<TemplateFile, Failure> {
    let text = std::fs::read_to_string(path).map_err(|e| Failure::io(path, e))?;
    TemplateFile::from_json(&text).map_err(|e| {
        let mut f = Failure::from(e);
        f.message = format!("{}: {}", path.display(), f.message);
        f
    })
}

fn parse_coeffs(text: &str) -> Result<Vec<f64>, Failure> {
    if let Ok(v) = serde_json::from_str::<Vec<f64>>(text) {
        return Ok(v);
    }
    text.split(|c: char| c.is_whitespace() || c == ',')
        .filter(|s| !s.is_empty())
        .map(|s| s.parse::<f64>().map_err(|_| Failure::other(format!("bad coefficient '{s}'"))))
        .collect()
}

fn read_coeffs(arg: &str) -> Result<Vec<f64>, Failure> {
    let text = if arg == "-" {
        let mut s = String::new();
        std::io::stdin()
            .read_to_string(&mut s)
            .map_err(|e| Failure::other(format!("stdin: {e}")))?;
        s
    } else {
        std::fs::read_to_string(arg).map_err(|e| Failure::io(Path::new(arg), e))?
    };
    parse_coeffs(&text)
}

fn cmd_generate(args: &GenerateArgs, quiet: bool) -> CliResult {
    let sys = load_problem(&args.problem)?;
    let cfg = SearchConfig {
        epsilon: args.epsilon,
        seed: args.seed,
        max_subset_size: args.max_subset,
        formulation: args.formulation,
        ..SearchConfig::default()
    };
    cfg.validate()?;
    if !quiet {
        eprintln!(
            "generate: {} polynomials in {} variables, seed {}",
            sys.n_polys(),
            sys.n_vars(),
            args.seed
        );
    }
    let file = match generate(&sys, &cfg) {
        Ok(f) => f,
        Err(e @ Error::NoFavourableBasis { .. }) => {
            if let Error::NoFavourableBasis { diagnostics } = &e {
                if !quiet {
                    for d in diagnostics.iter().take(10) {
                        eprintln!("  rejected {}: {}", d.origin, d.rejection);
                    }
                }
            }
            return Err(e.into());
        }
        Err(e) => return Err(e.into()),
    };
    if !quiet {
        let s = &file.search;
        eprintln!(
            "search: {} candidates, {} accepted; chose {} ({}×{}, eig {})",
            s.evaluated, s.accepted, s.origin, s.rows, s.cols, s.eigen_size
        );
        eprintln!(
            "reduction: {} steps, {} columns and {} rows removed",
            file.trace.steps.len(),
            file.trace.removed_cols.len(),
            file.trace.removed_rows.len()
        );
    }
    file.save(&args.out)?;
    emit(&(file.summary_line() + "\n"))?;
    Ok(())
}

#[derive(Serialize)]
struct SolveOutput<'a> {
    n_roots: usize,
    roots: Vec<&'a Root>,
    diagnostics: &'a EigenDiagnostics,
}

/// Write to stdout; a closed pipe ends output quietly.
fn emit(text: &str) -> CliResult {
    match std::io::stdout().lock().write_all(text.as_bytes()) {
        Err(e) if e.kind() != std::io::ErrorKind::BrokenPipe => Err(Failure::other(e.to_string())),
        _ => Ok(()),
    }
}

fn write_csv(roots: &[&Root], names: &[String]) -> CliResult {
    let mut w = csv::Writer::from_writer(Vec::new());
    let mut header: Vec<String> = Vec::new();
    for n in names {
        header.push(format!("{n}_re"));
        header.push(format!("{n}_im"));
    }
    header.extend(["residual", "is_real"].map(String::from));
    let to_failure = |e: csv::Error| Failure::other(e.to_string());
    w.write_record(&header).map_err(to_failure)?;
    for r in roots {
        let mut rec: Vec<String> = Vec::new();
        for z in &r.x {
            rec.push(z.re.to_string());
            rec.push(z.im.to_string());
        }
        rec.push(format!("{:e}", r.residual));
        rec.push(r.is_real.to_string());
        w.write_record(&rec).map_err(to_failure)?;
    }
    let bytes = w.into_inner().map_err(|e| Failure::other(e.to_string()))?;
    emit(&String::from_utf8_lossy(&bytes))
}

fn cmd_solve(args: &SolveArgs) -> CliResult {
    let file = load_template(&args.template)?;
    let coeffs = read_coeffs(&args.coeffs)?;
    let sol = solve(&file.template, &coeffs)?;
    let roots: Vec<_> = sol.roots.iter().filter(|r| args.all_complex || r.is_real).collect();
    match args.format {
        OutputFormat::Json => {
            let out = SolveOutput {
                n_roots: roots.len(),
                roots: roots.clone(),
                diagnostics: &sol.diagnostics,
            };
            let text = serde_json::to_string_pretty(&out).map_err(|e| Failure::other(e.to_string()))?;
            emit(&(text + "\n"))?;
        }
        OutputFormat::Csv => write_csv(&roots, file.template.system.var_names())?,
    }
    Ok(())
}

fn cmd_bench(args: &BenchArgs, quiet: bool) -> CliResult {
    let file = load_template(&args.template)?;
    if !quiet {
        eprintln!("bench: {} instances, seed {}", args.n, args.seed);
    }
    let rep = stability_run(&file.template, &NormalSampler, args.n, args.seed);
    emit(&rep.to_text())?;
    if let Some(path) = &args.report {
        let body = if path.extension().is_some_and(|e| e == "json") {
            rep.to_json()
        } else {
            rep.to_text()
        };
        std::fs::write(path, body).map_err(|e| Failure::io(path, e))?;
    }
    Ok(())
}

fn cmd_verify(args: &VerifyArgs) -> CliResult {
    let sys = load_problem(&args.problem)?;
    let file = load_template(&args.template)?;
    let opts = VerifyOptions {
        instances: args.instances,
        seed: args.seed,
    };
    let rep = verify(&sys, &file, &opts)?;
    emit(&rep.to_string())?;
    if rep.passed() {
        Ok(())
    } else {
        Err(Failure::other("verification failed"))
    }
}

fn cmd_inspect(cmd: &InspectCommand) -> CliResult {
    let mut out = std::io::stdout().lock();
    let w = |e: std::io::Error| Failure::other(e.to_string());
    match cmd {
        InspectCommand::Polytope { problem } => {
            let sys = load_problem(problem)?;
            for (j, p) in sys.polys().iter().enumerate() {
                let np = newton_polytope(p)?;
                let vertices: Vec<String> = np.vertices().iter().map(|v| v.to_string()).collect();
                let points = np.lattice_points(&Displacement::zero(sys.n_vars()))?;
                writeln!(
                    out,
                    "f{}: {} terms, vertices [{}], {} lattice points",
                    j + 1,
                    p.terms().len(),
                    vertices.join(", "),
                    points.len()
                )
                .map_err(w)?;
            }
            if sys.n_vars() == 2 && sys.n_polys() == 2 {
                let s = sys.supports()?;
                writeln!(out, "bkk bound: {}", bkk_2d(&s[0], &s[1])).map_err(w)?;
            }
        }
        InspectCommand::Template { template } => {
            let file = load_template(template)?;
            let tpl = &file.template;
            let names = tpl.system.var_names();
            let list = |v: &[resultant_forge_core::Monomial]| {
                v.iter().map(|m| m.to_string()).collect::<Vec<_>>().join(" ")
            };
            writeln!(out, "{}", file.summary_line()).map_err(w)?;
            writeln!(out, "hidden variable: {}", names[tpl.hidden_var]).map_err(w)?;
            writeln!(out, "formulation: {:?}", tpl.formulation()).map_err(w)?;
            writeln!(
                out,
                "fallback: {}",
                tpl.fallback.as_ref().map_or("none".to_string(), |f| format!("{:?}", f.formulation))
            )
            .map_err(w)?;
            writeln!(out, "B_λ: {}", list(&tpl.primary.b_lambda)).map_err(w)?;
            writeln!(out, "B_c: {}", list(&tpl.primary.b_c)).map_err(w)?;
            writeln!(
                out,
                "search: {} ({} evaluated, {} accepted), unreduced {}×{}",
                file.search.origin, file.search.evaluated, file.search.accepted, file.search.rows, file.search.cols
            )
            .map_err(w)?;
            writeln!(out, "reduction steps: {}", file.trace.steps.len()).map_err(w)?;
            writeln!(out, "seed: {}", file.config.seed).map_err(w)?;
            writeln!(out, "float rank: {} of {}", file.rank_check.rank, file.rank_check.size).map_err(w)?;
        }
    }
    Ok(())
}

fn run(cli: Cli) -> CliResult {
    if let Some(jobs) = cli.jobs {
        rayon::ThreadPoolBuilder::new()
            .num_threads(jobs.max(1))
            .build_global()
            .map_err(|e| Failure::other(e.to_string()))?;
    }
    match &cli.command {
        Command::Generate(a) => cmd_generate(a, cli.quiet),
        Command::Solve(a) => cmd_solve(a),
        Command::Bench(a) => cmd_bench(a, cli.quiet),
        Command::Verify(a) => cmd_verify(a),
        Command::Inspect(c) => cmd_inspect(c),
    }
}

fn main() -> ExitCode {
    match run(Cli::parse()) {
        Ok(()) => ExitCode::SUCCESS,
        Err(f) => {
            eprintln!("error: {}", f.message);
            ExitCode::from(f.code)
        }
    }
}
