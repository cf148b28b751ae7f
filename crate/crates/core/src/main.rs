use clap::{Args, Parser, Subcommand, ValueEnum};
use lapspec::error::Result;
use lapspec::report::{cmd_analyze, cmd_verify, parse_s_grid, Command, Format, RunConfig, EXIT_INPUT};
use lapspec::spectra::{EstimatorParams, FrequencyGrid, SpectrumKind};

#[derive(Parser)]
#[command(name = "lapspec", version, about = "Estimate and verify spectra of bounded functions")]
struct Cli {
    #[command(subcommand)]
    command: Cmd,
}

#[derive(Subcommand)]
enum Cmd {
    /// Classify a grid of frequencies for one function or semigroup.
    Analyze(Opts),
    /// Run a named verification suite over the standard corpus.
    Verify(Opts),
}

#[derive(Clone, Copy, ValueEnum)]
enum Fmt {
    Csv,
    Json,
}

#[derive(Args)]
struct Opts {
    /// Function descriptor JSON.
    #[arg(long)]
    func: Option<String>,
    /// Matrix JSON: {"A": [[...], ...]}.
    #[arg(long)]
    matrix: Option<String>,
    /// Laplace, WeakLaplace, Carleman, Beurling, ReducedBeurlingC0, UniformLaplace, UniformCarleman.
    #[arg(long)]
    spectrum: Option<String>,
    /// MIN:MAX:STEP
    #[arg(long, allow_hyphen_values = true)]
    grid: Option<String>,
    /// MIN:MAX, expanded to powers of two.
    #[arg(long = "a-ladder")]
    a_ladder: Option<String>,
    /// Comma-separated translates.
    #[arg(long = "s-grid", allow_hyphen_values = true)]
    s_grid: Option<String>,
    /// KEY=VAL, repeatable.
    #[arg(long)]
    tol: Vec<String>,
    #[arg(long)]
    suite: Option<String>,
    #[arg(long)]
    out: Option<String>,
    #[arg(long)]
    threads: Option<usize>,
    #[arg(long)]
    seed: Option<u64>,
    #[arg(long, value_enum, default_value = "csv")]
    format: Fmt,
}

fn config(command: Command, o: Opts) -> Result<RunConfig> {
    let mut c = RunConfig::new(command);
    c.func = o.func;
    c.matrix = o.matrix;
    c.spectrum = o.spectrum.as_deref().map(SpectrumKind::parse).transpose()?;
    c.suite = o.suite;
    if let Some(g) = o.grid {
        c.grid = FrequencyGrid::parse(&g)?;
    }
    if let Some(a) = o.a_ladder {
        c.a_ladder = EstimatorParams::parse_a_ladder(&a)?;
    }
    if let Some(s) = o.s_grid {
        c.s_grid = parse_s_grid(&s)?;
    }
    for t in &o.tol {
        c.set_tol(t)?;
    }
    if let Some(s) = o.seed {
        c.seed = s;
    }
    c.format = match o.format {
        Fmt::Csv => Format::Csv,
        Fmt::Json => Format::Json,
    };
    c.out = o.out;
    c.threads = o.threads;
    Ok(c)
}

fn main() {
    let cli = match Cli::try_parse() {
        Ok(c) => c,
        Err(e) => {
            let code = if e.use_stderr() { EXIT_INPUT } else { 0 };
            let _ = e.print();
            std::process::exit(code);
        }
    };
    let (command, opts) = match cli.command {
        Cmd::Analyze(o) => (Command::Analyze, o),
        Cmd::Verify(o) => (Command::Verify, o),
    };
    let cfg = match config(command, opts) {
        Ok(c) => c,
        Err(e) => {
            eprintln!("error: {e}");
            std::process::exit(EXIT_INPUT);
        }
    };
    if let Some(n) = cfg.threads {
        if n == 0 || rayon::ThreadPoolBuilder::new().num_threads(n).build_global().is_err() {
            eprintln!("error: cannot start {n} worker threads");
            std::process::exit(EXIT_INPUT);
        }
    }
    let code = match command {
        Command::Analyze => cmd_analyze(&cfg),
        Command::Verify => cmd_verify(&cfg),
    };
    std::process::exit(code);
}
