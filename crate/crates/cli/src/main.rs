//! `fairsamp` — command-line front end for the fair-sampling workbench.
//!
//! One concern per subcommand; subcommands compose via files. All randomness
//! is seed-controlled, so identical invocations produce identical outputs.

use std::path::{Path, PathBuf};
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand};

use fairsamp_core::anneal::{anneal_sweep, sweep_to_csv, SweepConfig};
use fairsamp_core::circuit::Circuit;
use fairsamp_core::compiler::{route_and_lower, verify_equivalence, CompileOptions};
use fairsamp_core::experiment::{run_experiment, write_experiment, AngleSpec, ExperimentSpec};
use fairsamp_core::gmqaoa::{
    assemble_qaoa, grid_search, QaoaParams, DEFAULT_GRID_RESOLUTION,
};
use fairsamp_core::ising::{ComplementMode, IsingModel, ProblemId, Spin};
use fairsamp_core::metrics::{
    aggregate_error, fairness_nstr, ground_distribution, gsp, CalibrationData, FairnessConfig,
};
use fairsamp_core::sim::{sample, simulate, SampleCounts};
use fairsamp_core::topology::Topology;

#[derive(Parser)]
#[command(
    name = "fairsamp",
    about = "Build, compile, simulate and score Grover-mixer QAOA and annealing runs \
             on degenerate-ground-state Ising problems",
    version
)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// List the built-in problems with their ground states.
    Problems,
    /// Find optimal 1-round angles by fine grid search.
    Gridsearch(GridsearchArgs),
    /// Build an abstract GM-QAOA circuit and write its text form.
    Build(BuildArgs),
    /// Compile a circuit onto a hardware topology in a native gateset.
    Compile(CompileArgs),
    /// Simulate a circuit and emit sampled counts.
    Simulate(SimulateArgs),
    /// Full experiment: build, compile, simulate, sample repeatedly, score.
    Run(RunArgs),
    /// Score an existing counts file: GSP, fairness, aggregate error.
    Metrics(MetricsArgs),
    /// Sweep annealing times and emit time,gsp,fairness_shots,energy rows.
    Anneal(AnnealArgs),
}

#[derive(Args)]
struct ProblemArgs {
    /// Problem id: a, b, c, d or e.
    #[arg(long)]
    problem: String,
    /// Fix q0 := ↑, reducing to n-1 qubits.
    #[arg(long)]
    reduce: bool,
}

impl ProblemArgs {
    fn model(&self) -> std::result::Result<IsingModel, fairsamp_core::Error> {
        let id: ProblemId = self.problem.parse()?;
        let model = IsingModel::builtin(id);
        if self.reduce {
            Ok(model.fix_spin(0, Spin::Up)?.0)
        } else {
            Ok(model)
        }
    }
}

#[derive(Args)]
struct AngleArgs {
    /// Comma-separated β list, radians ("0.5pi" works too).
    #[arg(long, allow_hyphen_values = true)]
    betas: Option<String>,
    /// Comma-separated γ list, radians ("−0.6pi" works too).
    #[arg(long, allow_hyphen_values = true)]
    gammas: Option<String>,
    /// Pick the angles by grid search instead.
    #[arg(long)]
    gridsearch: bool,
}

impl AngleArgs {
    fn spec(&self) -> anyhow_lite::Result<AngleSpec> {
        if self.gridsearch {
            return Ok(AngleSpec::GridSearch);
        }
        match (&self.betas, &self.gammas) {
            (Some(b), Some(g)) => Ok(AngleSpec::Explicit(QaoaParams::new(
                parse_angle_list(b)?,
                parse_angle_list(g)?,
            )?)),
            _ => Err("provide --betas and --gammas, or --gridsearch".into()),
        }
    }
}

#[derive(Args)]
struct GridsearchArgs {
    #[command(flatten)]
    problem: ProblemArgs,
    /// Grid resolution in radians; default π/60.
    #[arg(long, allow_hyphen_values = true)]
    resolution: Option<String>,
}

#[derive(Args)]
struct BuildArgs {
    #[command(flatten)]
    problem: ProblemArgs,
    #[command(flatten)]
    angles: AngleArgs,
    /// Output file ("-" or omitted: stdout).
    #[arg(long)]
    out: Option<PathBuf>,
}

#[derive(Args)]
struct CompileArgs {
    /// Abstract circuit file to compile (alternative to --problem).
    #[arg(long, conflicts_with = "problem")]
    circuit: Option<PathBuf>,
    #[arg(long)]
    problem: Option<String>,
    /// Fix q0 := ↑ before building.
    #[arg(long)]
    reduce: bool,
    #[command(flatten)]
    angles: AngleArgs,
    /// Topology name (lnn, 5t, 5p, 6a, 7h, clique[N]) or JSON file.
    #[arg(long)]
    topology: String,
    /// Target gateset: ibm, generic or abstract.
    #[arg(long, default_value = "ibm")]
    gateset: String,
    /// Ancilla budget (default: all free nodes).
    #[arg(long)]
    ancilla: Option<usize>,
    /// Check equivalence against the input circuit and print the verdict.
    #[arg(long)]
    verify: bool,
    #[arg(long, default_value_t = 0)]
    seed: u64,
    /// Output file ("-" or omitted: stdout).
    #[arg(long)]
    out: Option<PathBuf>,
}

#[derive(Args)]
struct SimulateArgs {
    /// Circuit file to simulate (alternative to --problem).
    #[arg(long, conflicts_with = "problem")]
    circuit: Option<PathBuf>,
    #[arg(long)]
    problem: Option<String>,
    #[arg(long)]
    reduce: bool,
    #[command(flatten)]
    angles: AngleArgs,
    #[arg(long, default_value_t = 8192)]
    shots: u64,
    #[arg(long, default_value_t = 1)]
    seed: u64,
    /// Counts format: json or csv.
    #[arg(long, default_value = "json")]
    format: String,
    #[arg(long)]
    out: Option<PathBuf>,
}

#[derive(Args)]
struct RunArgs {
    #[command(flatten)]
    problem: ProblemArgs,
    #[command(flatten)]
    angles: AngleArgs,
    /// Compile onto this topology first (name or JSON file).
    #[arg(long)]
    topology: Option<String>,
    #[arg(long, default_value = "ibm")]
    gateset: String,
    #[arg(long)]
    ancilla: Option<usize>,
    #[arg(long, default_value_t = 8192)]
    shots: u64,
    #[arg(long, default_value_t = 20)]
    repeats: u64,
    #[arg(long, default_value_t = 1)]
    seed: u64,
    /// Fairness inner loops.
    #[arg(long, default_value_t = 100_000)]
    ni: u64,
    /// Calibration JSON for aggregate error.
    #[arg(long)]
    calib: Option<PathBuf>,
    /// Output directory for summary.json, calls.csv, circuit.txt.
    #[arg(long)]
    out: PathBuf,
}

#[derive(Args)]
struct MetricsArgs {
    /// Counts file (JSON map bitstring -> count).
    #[arg(long)]
    counts: PathBuf,
    #[command(flatten)]
    problem: ProblemArgs,
    /// Treat complement pairs as the same ground state.
    #[arg(long)]
    combined: bool,
    #[arg(long, default_value_t = 100_000)]
    ni: u64,
    #[arg(long, default_value_t = 1)]
    seed: u64,
    /// Compiled circuit whose aggregate error to report (needs --calib).
    #[arg(long)]
    circuit: Option<PathBuf>,
    #[arg(long)]
    calib: Option<PathBuf>,
}

#[derive(Args)]
struct AnnealArgs {
    #[command(flatten)]
    problem: ProblemArgs,
    /// Comma-separated annealing times (dimensionless).
    #[arg(long, allow_hyphen_values = true)]
    times: String,
    #[arg(long, default_value_t = 100)]
    steps_per_unit: usize,
    #[arg(long, default_value_t = 8192)]
    shots: u64,
    #[arg(long, default_value_t = 1)]
    seed: u64,
    /// Fairness inner loops (annealing default).
    #[arg(long, default_value_t = 1_000)]
    ni: u64,
    /// Treat complement pairs as the same ground state.
    #[arg(long)]
    combined: bool,
    #[arg(long)]
    out: Option<PathBuf>,
}

// Small local error alias so main can bubble anything printable.
mod anyhow_lite {
    pub type Error = Box<dyn std::error::Error>;
    pub type Result<T> = std::result::Result<T, Error>;
}
use anyhow_lite::Result;

fn main() -> ExitCode {
    // Die quietly when a downstream pipe closes, like other line tools.
    #[cfg(unix)]
    unsafe {
        libc::signal(libc::SIGPIPE, libc::SIG_DFL);
    }
    let cli = Cli::parse();
    match dispatch(cli.command) {
        Ok(()) => ExitCode::SUCCESS,
        Err(err) => {
            eprintln!("error: {err}");
            ExitCode::FAILURE
        }
    }
}

fn dispatch(command: Command) -> Result<()> {
    match command {
        Command::Problems => cmd_problems(),
        Command::Gridsearch(args) => cmd_gridsearch(args),
        Command::Build(args) => cmd_build(args),
        Command::Compile(args) => cmd_compile(args),
        Command::Simulate(args) => cmd_simulate(args),
        Command::Run(args) => cmd_run(args),
        Command::Metrics(args) => cmd_metrics(args),
        Command::Anneal(args) => cmd_anneal(args),
    }
}

fn cmd_problems() -> Result<()> {
    for id in ProblemId::ALL {
        let model = IsingModel::builtin(id);
        let ground = model.enumerate_ground_states()?;
        println!(
            "problem {}: n={}, {} couplings, ground energy {}, {} ground states",
            id.name(),
            model.n,
            model.quadratic.len(),
            ground.energy,
            ground.states.len()
        );
        println!("  couplings: {:?}", model.quadratic);
        println!("  ground states (q0 first, 0=up): {}", ground.bitstrings().join(" "));
    }
    Ok(())
}

fn cmd_gridsearch(args: GridsearchArgs) -> Result<()> {
    let model = args.problem.model()?;
    let resolution = match &args.resolution {
        Some(text) => parse_angle(text)?,
        None => DEFAULT_GRID_RESOLUTION,
    };
    let result = grid_search(&model, resolution, 1)?;
    println!(
        "problem {} ({}): energy {:.3}, GSP {:.3}",
        args.problem.problem,
        if args.problem.reduce { "reduced" } else { "full" },
        result.energy,
        result.gsp
    );
    println!(
        "angles: beta = {:.6} rad ({:+.4}π), gamma = {:.6} rad ({:+.4}π)",
        result.params.betas[0],
        result.params.betas[0] / std::f64::consts::PI,
        result.params.gammas[0],
        result.params.gammas[0] / std::f64::consts::PI,
    );
    Ok(())
}

fn cmd_build(args: BuildArgs) -> Result<()> {
    let model = args.problem.model()?;
    let params = resolve_angles(&args.angles, &model)?;
    let circuit = assemble_qaoa(&model, &params);
    write_text(args.out.as_deref(), &circuit.to_text())?;
    Ok(())
}

fn cmd_compile(args: CompileArgs) -> Result<()> {
    let circuit = match (&args.circuit, &args.problem) {
        (Some(path), None) => Circuit::from_text(&std::fs::read_to_string(path)?)?,
        (None, Some(problem)) => {
            let pargs = ProblemArgs {
                problem: problem.clone(),
                reduce: args.reduce,
            };
            let model = pargs.model()?;
            let params = resolve_angles(&args.angles, &model)?;
            assemble_qaoa(&model, &params)
        }
        _ => return Err("provide exactly one of --circuit or --problem".into()),
    };
    let topo = load_topology(&args.topology, circuit.n + args.ancilla.unwrap_or(1))?;
    let compiled = route_and_lower(
        &circuit,
        &topo,
        &CompileOptions {
            gateset: args.gateset.parse()?,
            ancilla_budget: args.ancilla,
            seed: args.seed,
        },
    )?;
    println!("topology: {}", topo.name);
    println!("swaps: {}", compiled.swap_count);
    println!("gates: {}", compiled.circuit.gates.len());
    println!("layout_in:  {:?}", compiled.layout_in);
    println!("layout_out: {:?}", compiled.layout_out);
    if args.verify {
        let equivalent = verify_equivalence(&circuit, &compiled)?;
        println!("equivalent: {equivalent}");
        if !equivalent {
            return Err("compiled circuit failed equivalence verification".into());
        }
    }
    write_text(args.out.as_deref(), &compiled.circuit.to_text())?;
    Ok(())
}

fn cmd_simulate(args: SimulateArgs) -> Result<()> {
    let circuit = match (&args.circuit, &args.problem) {
        (Some(path), None) => Circuit::from_text(&std::fs::read_to_string(path)?)?,
        (None, Some(problem)) => {
            let pargs = ProblemArgs {
                problem: problem.clone(),
                reduce: args.reduce,
            };
            let model = pargs.model()?;
            let params = resolve_angles(&args.angles, &model)?;
            assemble_qaoa(&model, &params)
        }
        _ => return Err("provide exactly one of --circuit or --problem".into()),
    };
    let state = simulate(&circuit)?;
    let counts = sample(&state, args.shots, args.seed);
    let text = match args.format.as_str() {
        "json" => counts.to_json(),
        "csv" => counts.to_csv(),
        other => return Err(format!("unknown format {other:?} (json, csv)").into()),
    };
    write_text(args.out.as_deref(), &text)?;
    Ok(())
}

fn cmd_run(args: RunArgs) -> Result<()> {
    let id: ProblemId = args.problem.problem.parse()?;
    let topology = match &args.topology {
        Some(name) => {
            let model = args.problem.model()?;
            Some(load_topology(name, model.n + args.ancilla.unwrap_or(1))?)
        }
        None => None,
    };
    let calibration = match &args.calib {
        Some(path) => Some(CalibrationData::from_json(&std::fs::read_to_string(path)?)?),
        None => None,
    };
    let spec = ExperimentSpec {
        problem: id,
        reduce: args.problem.reduce,
        angles: args.angles.spec()?,
        topology,
        gateset: args.gateset.parse()?,
        ancilla_budget: args.ancilla,
        shots: args.shots,
        repeats: args.repeats,
        seed: args.seed,
        fairness: FairnessConfig::with_inner_loops(args.ni),
        calibration,
    };
    let output = run_experiment(&spec)?;
    write_experiment(&args.out, &output)?;
    println!(
        "problem {}: exact GSP {:.4}, exact energy {:.4}",
        id.name(),
        output.exact_gsp,
        output.exact_energy
    );
    let gsps: Vec<f64> = output.calls.iter().map(|c| c.gsp).collect();
    println!(
        "{} calls × {} shots: GSP mean {:.4} (min {:.4}, max {:.4})",
        args.repeats,
        args.shots,
        gsps.iter().sum::<f64>() / gsps.len() as f64,
        gsps.iter().copied().fold(f64::INFINITY, f64::min),
        gsps.iter().copied().fold(f64::NEG_INFINITY, f64::max),
    );
    if let Some(e) = output.aggregate_error {
        println!("aggregate error: {e:.4}");
    }
    println!("wrote {}", args.out.display());
    Ok(())
}

fn cmd_metrics(args: MetricsArgs) -> Result<()> {
    let model = args.problem.model()?;
    let mode = if args.combined {
        ComplementMode::Combined
    } else {
        ComplementMode::Separate
    };
    let ground = model.enumerate_ground_states()?.with_mode(mode);
    let counts = SampleCounts::from_json(&std::fs::read_to_string(&args.counts)?, model.n)?;
    println!("shots: {}", counts.shots);
    println!("gsp: {:.6}", gsp(&counts, &ground));
    let distribution = ground_distribution(&counts, &ground);
    let fairness = fairness_nstr(
        &distribution,
        &FairnessConfig::with_inner_loops(args.ni),
        args.seed,
    )?;
    println!("fairness_shots: {fairness}");
    match (&args.circuit, &args.calib) {
        (Some(circuit_path), Some(calib_path)) => {
            let circuit = Circuit::from_text(&std::fs::read_to_string(circuit_path)?)?;
            let calib = CalibrationData::from_json(&std::fs::read_to_string(calib_path)?)?;
            println!(
                "aggregate_error: {:.6}",
                aggregate_error(&circuit, &calib, true)?
            );
        }
        (None, None) => {}
        _ => return Err("aggregate error needs both --circuit and --calib".into()),
    }
    Ok(())
}

fn cmd_anneal(args: AnnealArgs) -> Result<()> {
    let model = args.problem.model()?;
    let times = parse_float_list(&args.times)?;
    let cfg = SweepConfig {
        steps_per_unit_time: args.steps_per_unit,
        shots: args.shots,
        seed: args.seed,
        fairness: FairnessConfig {
            inner_loops: args.ni,
            ..FairnessConfig::anneal_default()
        },
        complement_mode: if args.combined {
            ComplementMode::Combined
        } else {
            ComplementMode::Separate
        },
        ..Default::default()
    };
    let rows = anneal_sweep(&model, &times, &cfg)?;
    write_text(args.out.as_deref(), &sweep_to_csv(&rows))?;
    Ok(())
}

fn resolve_angles(args: &AngleArgs, model: &IsingModel) -> Result<QaoaParams> {
    match resolve_angle_spec(args, model)? {
        AngleSpec::Explicit(params) => Ok(params),
        AngleSpec::GridSearch => unreachable!("resolved below"),
    }
}

fn resolve_angle_spec(args: &AngleArgs, model: &IsingModel) -> Result<AngleSpec> {
    let spec = args.spec()?;
    if let AngleSpec::GridSearch = spec {
        // Resolve eagerly for commands that need concrete angles; `run`
        // records the search result itself via the experiment module.
        let result = grid_search(model, DEFAULT_GRID_RESOLUTION, 1)?;
        return Ok(AngleSpec::Explicit(result.params));
    }
    Ok(spec)
}

fn parse_angle(text: &str) -> Result<f64> {
    let t = text.trim().to_ascii_lowercase();
    if let Some(stripped) = t.strip_suffix("pi") {
        let factor: f64 = if stripped.is_empty() || stripped == "+" {
            1.0
        } else if stripped == "-" {
            -1.0
        } else {
            stripped.parse()?
        };
        Ok(factor * std::f64::consts::PI)
    } else {
        Ok(t.parse()?)
    }
}

fn parse_angle_list(text: &str) -> Result<Vec<f64>> {
    text.split(',').map(parse_angle).collect()
}

fn parse_float_list(text: &str) -> Result<Vec<f64>> {
    text.split(',')
        .map(|t| t.trim().parse::<f64>().map_err(Into::into))
        .collect()
}

fn load_topology(name_or_path: &str, clique_size: usize) -> Result<Topology> {
    match Topology::builtin(name_or_path, Some(clique_size)) {
        Ok(topo) => Ok(topo),
        Err(builtin_err) => {
            let path = Path::new(name_or_path);
            if path.exists() {
                Ok(Topology::from_json(&std::fs::read_to_string(path)?)?)
            } else {
                Err(builtin_err.into())
            }
        }
    }
}

fn write_text(out: Option<&Path>, text: &str) -> Result<()> {
    match out {
        None => {
            print!("{text}");
            Ok(())
        }
        Some(path) if path.as_os_str() == "-" => {
            print!("{text}");
            Ok(())
        }
        Some(path) => {
            if let Some(parent) = path.parent() {
                if !parent.as_os_str().is_empty() {
                    std::fs::create_dir_all(parent)?;
                }
            }
            std::fs::write(path, text)?;
            Ok(())
        }
    }
}
