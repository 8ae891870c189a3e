mod config;

use std::io::Write as _;
use std::path::{Path, PathBuf};
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand};
use kyle_disclosure::asymptotics::{limit_constant_a, theorem31_limits};
use kyle_disclosure::benchmark::{solve_hs_multiperiod, two_period_no_disclosure};
use kyle_disclosure::disclosure::solve;
use kyle_disclosure::figures::{figure, FigureOptions};
use kyle_disclosure::report::{
    benchmark_table, equivalence_table, limits_table, simulation_json, simulation_table,
    solve_table, OutputFormat, Table,
};
use kyle_disclosure::simulator::{
    compare_conventions, simulate_paths, NoiseConvention, SimulationConfig,
};
use kyle_disclosure::{Error, MarketParams};

use config::ConfigFile;

const EXIT_INVALID: u8 = 2;
const EXIT_NUMERIC: u8 = 3;
const EXIT_STATISTICAL: u8 = 4;

#[derive(Debug)]
pub struct CliError {
    pub code: u8,
    pub message: String,
}

impl CliError {
    pub fn invalid(message: impl Into<String>) -> Self {
        Self {
            code: EXIT_INVALID,
            message: message.into(),
        }
    }

    fn numeric(message: impl Into<String>) -> Self {
        Self {
            code: EXIT_NUMERIC,
            message: message.into(),
        }
    }
}

impl From<Error> for CliError {
    fn from(e: Error) -> Self {
        let code = match e {
            Error::InvalidParams { .. }
            | Error::WrongN { .. }
            | Error::MonopolistHasNoA
            | Error::EmptySimulation => EXIT_INVALID,
            Error::ConventionMismatch { .. } => EXIT_STATISTICAL,
            Error::DegenerateVariance { .. }
            | Error::NoBracket { .. }
            | Error::ShootingDiverged { .. }
            | Error::SecondOrderViolated { .. }
            | Error::BracketSignError { .. } => EXIT_NUMERIC,
        };
        Self {
            code,
            message: e.to_string(),
        }
    }
}

#[derive(Parser, Debug)]
#[command(
    name = "kyle-disclosure",
    version,
    about = "Sequential-auction insider trading with post-trade disclosure"
)]
struct Cli {
    #[command(flatten)]
    globals: Globals,
    #[command(subcommand)]
    command: Command,
}

#[derive(Args, Debug)]
struct Globals {
    /// Number of insiders M.
    #[arg(long, global = true)]
    insiders: Option<u32>,
    /// Number of auctions N.
    #[arg(long, global = true)]
    auctions: Option<usize>,
    /// Prior mean of the value p0 (default 0).
    #[arg(long, global = true, allow_negative_numbers = true)]
    prior_mean: Option<f64>,
    /// Prior variance Σ0 (default 1).
    #[arg(long, global = true, allow_negative_numbers = true)]
    prior_var: Option<f64>,
    /// Noise trader variance per auction (default 1).
    #[arg(long, global = true, allow_negative_numbers = true)]
    noise_var: Option<f64>,
    /// Output file; standard output when omitted.
    #[arg(long, global = true)]
    out: Option<PathBuf>,
    /// csv or json.
    #[arg(long, global = true)]
    format: Option<String>,
    /// key=value file supplying defaults for any flag.
    #[arg(long, global = true)]
    config: Option<PathBuf>,
}

#[derive(Subcommand, Debug)]
enum Command {
    /// Equilibrium with disclosure, one row per auction.
    Solve,
    /// Benchmark equilibrium without disclosure.
    Benchmark,
    /// Limits as the number of auctions grows.
    Limits {
        /// Fail unless the limit constant A exists (M >= 2).
        #[arg(long = "want-A")]
        want_a: bool,
    },
    /// Monte Carlo check of the equilibrium.
    Simulate {
        /// Number of simulated paths (default 200000).
        #[arg(long)]
        paths: Option<u64>,
        /// Master seed (default 42).
        #[arg(long)]
        seed: Option<u64>,
        /// independent or common.
        #[arg(long)]
        convention: Option<String>,
        /// Also run the other convention and compare.
        #[arg(long)]
        check_equivalence: bool,
        /// Exit with status 4 when any statistical check fails.
        #[arg(long)]
        strict: bool,
        /// Keep the first K paths in full (JSON output only).
        #[arg(long)]
        record_paths: Option<usize>,
    },
    /// Datasets behind the figures.
    Figures {
        /// 1 to 6, a comma list, or all.
        #[arg(long)]
        which: Option<String>,
        /// Directory for the series files (default figures).
        #[arg(long)]
        outdir: Option<PathBuf>,
        /// Auctions for figures 1 and 2.
        #[arg(long)]
        n_auctions: Option<usize>,
        /// Auction grid for figures 5 and 6, comma separated.
        #[arg(long)]
        n_grid: Option<String>,
        /// Auction grid for figures 3 and 4, comma separated.
        #[arg(long)]
        comparison_grid: Option<String>,
    },
}

struct Ctx {
    cfg: ConfigFile,
    params: MarketParams,
    out: Option<PathBuf>,
    format: OutputFormat,
}

fn context(g: &Globals) -> Result<Ctx, CliError> {
    let cfg = match &g.config {
        Some(p) => ConfigFile::load(p)?,
        None => ConfigFile::default(),
    };
    let params = MarketParams::new(
        cfg.pick(g.insiders, "insiders", 2)?,
        cfg.pick(g.auctions, "auctions", 2)?,
        cfg.pick(g.prior_var, "prior-var", 1.0)?,
        cfg.pick(g.noise_var, "noise-var", 1.0)?,
    )
    .with_prior_mean(cfg.pick(g.prior_mean, "prior-mean", 0.0)?);
    let format: String = cfg.pick(g.format.clone(), "format", "csv".to_string())?;
    let format = format.parse().map_err(CliError::invalid)?;
    let out = cfg.pick_opt(g.out.clone(), "out")?;
    Ok(Ctx {
        cfg,
        params,
        out,
        format,
    })
}

fn emit(table: &Table, out: Option<&Path>, format: OutputFormat) -> Result<(), CliError> {
    let text = table.render(format);
    match out {
        Some(path) => {
            if let Some(dir) = path.parent().filter(|d| !d.as_os_str().is_empty()) {
                std::fs::create_dir_all(dir).map_err(|e| {
                    CliError::invalid(format!("cannot create {}: {e}", dir.display()))
                })?;
            }
            std::fs::write(path, text)
                .map_err(|e| CliError::invalid(format!("cannot write {}: {e}", path.display())))
        }
        None => {
            let mut stdout = std::io::stdout().lock();
            stdout
                .write_all(text.as_bytes())
                .map_err(|e| CliError::invalid(format!("cannot write output: {e}")))
        }
    }
}

/// `results.csv` becomes `results.equivalence.csv`.
fn sibling(path: &Path, tag: &str, format: OutputFormat) -> PathBuf {
    let stem = path
        .file_stem()
        .and_then(|s| s.to_str())
        .unwrap_or("report");
    path.with_file_name(format!("{stem}.{tag}.{}", format.extension()))
}

fn parse_grid(text: &str) -> Result<Vec<usize>, CliError> {
    let grid: Vec<usize> = text
        .split(',')
        .map(|s| {
            s.trim()
                .parse::<usize>()
                .ok()
                .filter(|n| *n >= 1)
                .ok_or_else(|| CliError::invalid(format!("bad auction count `{s}` in grid")))
        })
        .collect::<Result<_, _>>()?;
    if grid.is_empty() {
        return Err(CliError::invalid("empty auction grid"));
    }
    Ok(grid)
}

fn parse_which(text: &str) -> Result<Vec<u8>, CliError> {
    if text == "all" {
        return Ok((1..=6).collect());
    }
    text.split(',')
        .map(|s| match s.trim().parse::<u8>() {
            Ok(n @ 1..=6) => Ok(n),
            _ => Err(CliError::invalid(format!(
                "unknown figure `{s}` (expected 1 to 6 or all)"
            ))),
        })
        .collect()
}

fn cmd_solve(ctx: &Ctx) -> Result<u8, CliError> {
    let path = solve(&ctx.params)?;
    emit(&solve_table(&path), ctx.out.as_deref(), ctx.format)?;
    Ok(0)
}

fn cmd_benchmark(ctx: &Ctx) -> Result<u8, CliError> {
    let path = solve_hs_multiperiod(&ctx.params)?;
    let k = if ctx.params.auctions == 2 {
        two_period_no_disclosure(&ctx.params)?.k
    } else {
        None
    };
    emit(&benchmark_table(&path, k), ctx.out.as_deref(), ctx.format)?;
    Ok(0)
}

fn cmd_limits(ctx: &Ctx, want_a: bool) -> Result<u8, CliError> {
    let want_a = ctx.cfg.switch(want_a, "want-a")?;
    let params = ctx.params.validate()?;
    let constant = if want_a || params.insiders >= 2 {
        Some(limit_constant_a(params.insiders)?)
    } else {
        None
    };
    let limits = theorem31_limits(&params)?;
    emit(
        &limits_table(&limits, constant.as_ref()),
        ctx.out.as_deref(),
        ctx.format,
    )?;
    Ok(0)
}

struct SimulateFlags {
    paths: Option<u64>,
    seed: Option<u64>,
    convention: Option<String>,
    check_equivalence: bool,
    strict: bool,
    record_paths: Option<usize>,
}

fn cmd_simulate(ctx: &Ctx, f: SimulateFlags) -> Result<u8, CliError> {
    let cfg = &ctx.cfg;
    let convention: String = cfg.pick(f.convention, "convention", "independent".into())?;
    let convention: NoiseConvention = convention.parse()?;
    let mut sim = SimulationConfig::new(
        cfg.pick(f.paths, "paths", 200_000)?,
        cfg.pick(f.seed, "seed", 42)?,
        convention,
    );
    sim.record_paths = cfg.pick(f.record_paths, "record-paths", 0)?;
    let check = cfg.switch(f.check_equivalence, "check-equivalence")?;
    let strict = cfg.switch(f.strict, "strict")?;
    sim.validate()?;

    let path = solve(&ctx.params)?;
    let report = simulate_paths(&path, &sim)?;
    match ctx.format {
        OutputFormat::Json => write_text(&simulation_json(&report), ctx.out.as_deref())?,
        OutputFormat::Csv => emit(&simulation_table(&report), ctx.out.as_deref(), ctx.format)?,
    }
    let checks = report.checks();
    let passed = checks.iter().filter(|(_, ok)| *ok).count();
    eprintln!("simulate: {passed}/{} checks pass", checks.len());
    for (name, ok) in &checks {
        if !ok {
            eprintln!("simulate: FAIL {name}");
        }
    }
    let mut ok = report.all_pass();

    if check {
        let other = match convention {
            NoiseConvention::Independent => NoiseConvention::Common,
            NoiseConvention::Common => NoiseConvention::Independent,
        };
        let mut other_cfg = sim;
        other_cfg.noise_convention = other;
        other_cfg.record_paths = 0;
        let other_report = simulate_paths(&path, &other_cfg)?;
        let (ind, com) = match convention {
            NoiseConvention::Independent => (&report, &other_report),
            NoiseConvention::Common => (&other_report, &report),
        };
        let verdict = compare_conventions(ind, com)?;
        let eq_table = equivalence_table(&verdict);
        match &ctx.out {
            Some(p) => emit(
                &eq_table,
                Some(&sibling(p, "equivalence", ctx.format)),
                ctx.format,
            )?,
            None => emit(&eq_table, None, ctx.format)?,
        }
        match verdict.first_mismatch() {
            None => eprintln!("equivalence: pass"),
            Some(c) => {
                eprintln!(
                    "equivalence: FAIL {} ({} vs {}, {:.2} joint s.e.)",
                    c.statistic, c.left, c.right, c.z_score
                );
                ok = false;
            }
        }
    }
    if strict && !ok {
        return Ok(EXIT_STATISTICAL);
    }
    Ok(0)
}

fn write_text(text: &str, out: Option<&Path>) -> Result<(), CliError> {
    match out {
        Some(p) => std::fs::write(p, text)
            .map_err(|e| CliError::invalid(format!("cannot write {}: {e}", p.display()))),
        None => {
            print!("{text}");
            Ok(())
        }
    }
}

struct FigureFlags {
    which: Option<String>,
    outdir: Option<PathBuf>,
    n_auctions: Option<usize>,
    n_grid: Option<String>,
    comparison_grid: Option<String>,
}

fn cmd_figures(ctx: &Ctx, f: FigureFlags) -> Result<u8, CliError> {
    let cfg = &ctx.cfg;
    let which = parse_which(&cfg.pick(f.which, "which", "all".to_string())?)?;
    let outdir: PathBuf = cfg.pick(f.outdir, "outdir", PathBuf::from("figures"))?;
    let mut opts = FigureOptions {
        prior_var: ctx.params.prior_var,
        noise_var: ctx.params.noise_var,
        ..FigureOptions::default()
    };
    opts.fig12_auctions = cfg.pick(f.n_auctions, "n-auctions", opts.fig12_auctions)?;
    if let Some(g) = cfg.pick_opt(f.n_grid, "n-grid")? {
        opts.disclosure_grid = parse_grid(&g)?;
    }
    if let Some(g) = cfg.pick_opt(f.comparison_grid, "comparison-grid")? {
        opts.comparison_grid = parse_grid(&g)?;
    }
    MarketParams::new(1, opts.fig12_auctions, opts.prior_var, opts.noise_var).validate()?;

    let mut all_pass = true;
    for id in which {
        let out = figure(id, &opts)?;
        let files = out
            .write(&outdir, ctx.format)
            .map_err(|e| CliError::invalid(format!("cannot write to {}: {e}", outdir.display())))?;
        for file in &files {
            eprintln!("fig{id}: wrote {}", file.display());
        }
        for a in &out.assertions {
            let tag = match (a.pass, a.gating) {
                (true, _) => "PASS",
                (false, true) => "FAIL",
                (false, false) => "NOTE",
            };
            eprintln!("fig{id}: {tag} {} ({})", a.claim, a.detail);
        }
        all_pass &= out.passed();
    }
    if !all_pass {
        return Err(CliError::numeric("a figure assertion failed"));
    }
    Ok(0)
}

fn run() -> Result<u8, CliError> {
    let cli = Cli::parse();
    let ctx = context(&cli.globals)?;
    match cli.command {
        Command::Solve => cmd_solve(&ctx),
        Command::Benchmark => cmd_benchmark(&ctx),
        Command::Limits { want_a } => cmd_limits(&ctx, want_a),
        Command::Simulate {
            paths,
            seed,
            convention,
            check_equivalence,
            strict,
            record_paths,
        } => cmd_simulate(
            &ctx,
            SimulateFlags {
                paths,
                seed,
                convention,
                check_equivalence,
                strict,
                record_paths,
            },
        ),
        Command::Figures {
            which,
            outdir,
            n_auctions,
            n_grid,
            comparison_grid,
        } => cmd_figures(
            &ctx,
            FigureFlags {
                which,
                outdir,
                n_auctions,
                n_grid,
                comparison_grid,
            },
        ),
    }
}

fn main() -> ExitCode {
    match run() {
        Ok(code) => ExitCode::from(code),
        Err(e) => {
            eprintln!("error: {}", e.message);
            ExitCode::from(e.code)
        }
    }
}
