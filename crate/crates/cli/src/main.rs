//! Command-line front end: single-instance solves, parameter sweeps,
//! replicator-dynamics runs, robustness scans, and Monte Carlo simulation.
//!
//! Output contracts: JSON mirrors the library report types and CSV uses 12
//! significant digits, with every file carrying a provenance block (all
//! five game parameters, solver configuration, seeds, artifact version).
//! Re-running a command with identical inputs produces byte-identical
//! output. Exit codes: 0 success, 2 invalid input, 3 computation failure.

mod config;
mod output;

use std::fmt;
use std::path::PathBuf;

use clap::{Args, Parser, Subcommand, ValueEnum};
use serde_json::json;

use relayer_game::dynamics::integrate;
use relayer_game::equilibrium::solve_equilibrium;
use relayer_game::montecarlo::{simulate, simulate_round};
use relayer_game::robustness::{coalition_curve, invasion_barrier};
use relayer_game::{Action, EquilibriumReport, GameParams, SolverConfig};

use config::{ConfigFile, ParamsSection, SolverSection};
use output::{csv_cell, emit, sig, Provenance};

/// Most trace rows a simulation run will write.
const TRACE_ROW_CAP: u64 = 100_000;

#[derive(Debug)]
pub enum CliError {
    /// Invalid parameters, flags, or config (exit 2).
    Input(String),
    /// Solver, integration, or simulation failure (exit 3).
    Computation(String),
}

impl CliError {
    fn code(&self) -> i32 {
        match self {
            CliError::Input(_) => 2,
            CliError::Computation(_) => 3,
        }
    }
}

impl fmt::Display for CliError {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            CliError::Input(msg) | CliError::Computation(msg) => write!(f, "{msg}"),
        }
    }
}

#[derive(Parser)]
#[command(
    name = "relayer-game",
    version,
    about = "Equilibrium solver, sweeps, dynamics, robustness scans, and simulation \
             for the relayer upload game"
)]
struct Cli {
    /// TOML config file; command-line flags override its values.
    #[arg(long, global = true, value_name = "FILE")]
    config: Option<PathBuf>,
    /// Output file (stdout when omitted). Relative paths resolve under
    /// RELAYER_GAME_OUT_DIR when that variable is set.
    #[arg(long, global = true, value_name = "FILE")]
    out: Option<PathBuf>,
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Solve one instance; equilibrium report as JSON.
    Solve(SolveArgs),
    /// Sweep one parameter axis; one CSV row per value.
    Sweep(SweepArgs),
    /// Integrate the replicator dynamic; trajectories as CSV.
    Dynamics(DynamicsArgs),
    /// Coalition abstention curve (CSV) or invasion-barrier scan (JSON).
    Robustness(RobustnessArgs),
    /// Simulate repeated rounds; statistics as JSON.
    Simulate(SimulateArgs),
}

/// Game parameters; each falls back to the config file's [params] section.
#[derive(Args, Clone, Copy)]
struct ParamFlags {
    /// Number of relayers (>= 3).
    #[arg(long)]
    n: Option<u32>,
    /// Upload benefit.
    #[arg(long)]
    b: Option<f64>,
    /// First-upload cost.
    #[arg(long)]
    cf: Option<f64>,
    /// Late-upload cost.
    #[arg(long)]
    cl: Option<f64>,
    /// Outage penalty.
    #[arg(long)]
    p: Option<f64>,
}

/// Solver overrides; fall back to [solver], then to built-in defaults.
#[derive(Args, Clone, Copy)]
struct SolverFlags {
    /// Accept a root once |h(q)| falls below this.
    #[arg(long)]
    tolerance: Option<f64>,
    /// Bisection iteration cap.
    #[arg(long)]
    max_iterations: Option<u32>,
    /// Lower end of the initial bracket.
    #[arg(long)]
    bracket_floor: Option<f64>,
}

#[derive(Args)]
struct SolveArgs {
    #[command(flatten)]
    params: ParamFlags,
    #[command(flatten)]
    solver: SolverFlags,
}

#[derive(Args)]
struct SweepArgs {
    #[command(flatten)]
    params: ParamFlags,
    #[command(flatten)]
    solver: SolverFlags,
    /// Parameter to sweep.
    #[arg(long, value_enum)]
    axis: Option<Axis>,
    /// Explicit axis values.
    #[arg(long, value_delimiter = ',')]
    values: Option<Vec<f64>>,
    /// Range sweep: first value.
    #[arg(long)]
    start: Option<f64>,
    /// Range sweep: last value (inclusive).
    #[arg(long)]
    stop: Option<f64>,
    /// Range sweep: increment.
    #[arg(long)]
    step: Option<f64>,
    /// Columns to emit, from {q_star, outage, reward}.
    #[arg(long, value_delimiter = ',')]
    outputs: Option<Vec<String>>,
}

#[derive(Args)]
struct DynamicsArgs {
    #[command(flatten)]
    params: ParamFlags,
    #[command(flatten)]
    solver: SolverFlags,
    /// Adaptation rate.
    #[arg(long)]
    mu: Option<f64>,
    /// Initial upload probabilities, one trajectory each.
    #[arg(long, value_delimiter = ',')]
    q0: Option<Vec<f64>>,
    /// Integration horizon.
    #[arg(long)]
    t_end: Option<f64>,
    /// Step size.
    #[arg(long)]
    dt: Option<f64>,
}

#[derive(Args)]
struct RobustnessArgs {
    #[command(flatten)]
    params: ParamFlags,
    #[command(flatten)]
    solver: SolverFlags,
    /// coalition: abstaining-coalition payoff curve; barrier: invasion scan.
    #[arg(long, value_enum)]
    mode: Option<Mode>,
    /// Mutant-strategy grid step for the barrier scan.
    #[arg(long)]
    qm_step: Option<f64>,
}

#[derive(Args)]
struct SimulateArgs {
    #[command(flatten)]
    params: ParamFlags,
    #[command(flatten)]
    solver: SolverFlags,
    /// "equilibrium", "all-upload", "all-abstain", one probability for all
    /// players, or a comma-separated per-player list.
    #[arg(long)]
    strategy: Option<String>,
    #[arg(long)]
    rounds: Option<u64>,
    #[arg(long)]
    seed: Option<u64>,
    /// Also write a per-round trace CSV to this path (first 10^5 rounds).
    #[arg(long, value_name = "FILE")]
    trace: Option<PathBuf>,
}

#[derive(ValueEnum, Clone, Copy, PartialEq, Eq)]
enum Axis {
    N,
    Cf,
    Cl,
    P,
}

impl Axis {
    fn name(self) -> &'static str {
        match self {
            Axis::N => "n",
            Axis::Cf => "cf",
            Axis::Cl => "cl",
            Axis::P => "p",
        }
    }

    fn parse(text: &str) -> Result<Self, CliError> {
        match text {
            "n" => Ok(Axis::N),
            "cf" => Ok(Axis::Cf),
            "cl" => Ok(Axis::Cl),
            "p" => Ok(Axis::P),
            other => Err(CliError::Input(format!(
                "axis must be one of n, cf, cl, p; got {other}"
            ))),
        }
    }
}

#[derive(ValueEnum, Clone, Copy, PartialEq, Eq)]
enum Mode {
    Coalition,
    Barrier,
}

fn main() {
    let cli = Cli::parse();
    if let Err(e) = run(cli) {
        eprintln!("error: {e}");
        std::process::exit(e.code());
    }
}

fn run(cli: Cli) -> Result<(), CliError> {
    let file = match &cli.config {
        Some(path) => ConfigFile::load(path)?,
        None => ConfigFile::default(),
    };
    let out = cli.out.as_deref();
    match cli.command {
        Command::Solve(args) => cmd_solve(args, &file, out),
        Command::Sweep(args) => cmd_sweep(args, &file, out),
        Command::Dynamics(args) => cmd_dynamics(args, &file, out),
        Command::Robustness(args) => cmd_robustness(args, &file, out),
        Command::Simulate(args) => cmd_simulate(args, &file, out),
    }
}

fn merged_params(flags: &ParamFlags, file: &ParamsSection) -> ParamsSection {
    ParamsSection {
        n: flags.n.or(file.n),
        b: flags.b.or(file.b),
        cf: flags.cf.or(file.cf),
        cl: flags.cl.or(file.cl),
        p: flags.p.or(file.p),
    }
}

fn require<T>(value: Option<T>, name: &str) -> Result<T, CliError> {
    value.ok_or_else(|| CliError::Input(format!("parameter {name} is required")))
}

fn build_params(section: &ParamsSection) -> Result<GameParams, CliError> {
    GameParams::new(
        require(section.n, "n")?,
        require(section.b, "b")?,
        require(section.cf, "cf")?,
        require(section.cl, "cl")?,
        require(section.p, "p")?,
    )
    .map_err(|e| CliError::Input(e.to_string()))
}

fn build_solver(flags: &SolverFlags, file: &SolverSection) -> SolverConfig {
    let defaults = SolverConfig::default();
    SolverConfig {
        tolerance: flags.tolerance.or(file.tolerance).unwrap_or(defaults.tolerance),
        max_iterations: flags
            .max_iterations
            .or(file.max_iterations)
            .unwrap_or(defaults.max_iterations),
        bracket_floor: flags
            .bracket_floor
            .or(file.bracket_floor)
            .unwrap_or(defaults.bracket_floor),
    }
}

fn solve(params: &GameParams, config: &SolverConfig) -> Result<EquilibriumReport, CliError> {
    solve_equilibrium(params, config).map_err(|e| CliError::Computation(e.to_string()))
}

fn push_params(prov: &mut Provenance, params: &GameParams) {
    prov.push("n", params.n())
        .push("b", params.b())
        .push("c_f", params.c_f())
        .push("c_l", params.c_l())
        .push("p", params.p());
}

fn push_solver(prov: &mut Provenance, config: &SolverConfig) {
    prov.push("solver_tolerance", config.tolerance)
        .push("solver_max_iterations", config.max_iterations)
        .push("solver_bracket_floor", config.bracket_floor);
}

fn provenance_json(params: &GameParams, config: &SolverConfig) -> serde_json::Value {
    json!({
        "artifact": format!("relayer-game {}", env!("CARGO_PKG_VERSION")),
        "n": params.n(),
        "b": params.b(),
        "c_f": params.c_f(),
        "c_l": params.c_l(),
        "p": params.p(),
        "solver": {
            "tolerance": config.tolerance,
            "max_iterations": config.max_iterations,
            "bracket_floor": config.bracket_floor,
        },
    })
}

fn to_pretty(value: &serde_json::Value) -> String {
    let mut text = serde_json::to_string_pretty(value).expect("report serializes");
    text.push('\n');
    text
}

fn cmd_solve(
    args: SolveArgs,
    file: &ConfigFile,
    out: Option<&std::path::Path>,
) -> Result<(), CliError> {
    let params = build_params(&merged_params(&args.params, &file.params))?;
    let config = build_solver(&args.solver, &file.solver);
    let report = solve(&params, &config)?;
    let mut provenance = provenance_json(&params, &config);
    provenance["command"] = json!("solve");
    let doc = json!({
        "provenance": provenance,
        "report": report,
    });
    emit(out, &to_pretty(&doc))
}

/// Inclusive range values; the last value is clamped onto `stop`.
fn range_values(start: f64, stop: f64, step: f64) -> Result<Vec<f64>, CliError> {
    if !(step > 0.0 && step.is_finite() && start.is_finite() && stop >= start) {
        return Err(CliError::Input(format!(
            "range needs finite start <= stop and positive step; \
             got start={start} stop={stop} step={step}"
        )));
    }
    let mut values = Vec::new();
    let slack = step * 1e-9;
    let mut k = 0u64;
    loop {
        let v = start + k as f64 * step;
        if v > stop + slack {
            break;
        }
        values.push(v.min(stop));
        k += 1;
    }
    Ok(values)
}

fn sweep_values(args: &SweepArgs, file: &config::SweepSection) -> Result<Vec<f64>, CliError> {
    let flagged_range = args.start.is_some() || args.stop.is_some() || args.step.is_some();
    let values = if let Some(v) = &args.values {
        v.clone()
    } else if flagged_range {
        range_values(
            require(args.start.or(file.start), "start")?,
            require(args.stop.or(file.stop), "stop")?,
            require(args.step.or(file.step), "step")?,
        )?
    } else if let Some(v) = &file.values {
        v.clone()
    } else if file.start.is_some() || file.stop.is_some() || file.step.is_some() {
        range_values(
            require(file.start, "start")?,
            require(file.stop, "stop")?,
            require(file.step, "step")?,
        )?
    } else {
        return Err(CliError::Input(
            "sweep needs --values or --start/--stop/--step".into(),
        ));
    };
    if values.is_empty() {
        return Err(CliError::Input("sweep has no axis values".into()));
    }
    if values.iter().any(|v| !v.is_finite()) {
        return Err(CliError::Input("axis values must be finite".into()));
    }
    Ok(values)
}

fn sweep_outputs(
    args: &SweepArgs,
    file: &config::SweepSection,
) -> Result<Vec<&'static str>, CliError> {
    let requested = args
        .outputs
        .clone()
        .or_else(|| file.outputs.clone())
        .unwrap_or_else(|| vec!["q_star".into(), "outage".into(), "reward".into()]);
    let mut outputs = Vec::new();
    for token in &requested {
        let known = ["q_star", "outage", "reward"]
            .iter()
            .find(|k| *k == token)
            .copied();
        match known {
            Some(k) if !outputs.contains(&k) => outputs.push(k),
            Some(_) => {}
            None => {
                return Err(CliError::Input(format!(
                    "unknown output column {token}; expected q_star, outage, reward"
                )))
            }
        }
    }
    Ok(outputs)
}

/// One game per axis value; n must land on an integer.
fn instantiate(
    section: &ParamsSection,
    axis: Axis,
    value: f64,
) -> Result<GameParams, CliError> {
    let mut s = *section;
    match axis {
        Axis::N => {
            if value.fract() != 0.0 || value < 0.0 || value > u32::MAX as f64 {
                return Err(CliError::Input(format!(
                    "axis value {value} is not a valid player count"
                )));
            }
            s.n = Some(value as u32);
        }
        Axis::Cf => s.cf = Some(value),
        Axis::Cl => s.cl = Some(value),
        Axis::P => s.p = Some(value),
    }
    build_params(&s)
}

fn cmd_sweep(
    args: SweepArgs,
    file: &ConfigFile,
    out: Option<&std::path::Path>,
) -> Result<(), CliError> {
    let axis = match args.axis {
        Some(axis) => axis,
        None => Axis::parse(&require(file.sweep.axis.clone(), "axis")?)?,
    };
    let values = sweep_values(&args, &file.sweep)?;
    let outputs = sweep_outputs(&args, &file.sweep)?;
    let section = merged_params(&args.params, &file.params);
    let config = build_solver(&args.solver, &file.solver);

    let mut provenance = Provenance::new("sweep");
    provenance.push("axis", axis.name());
    provenance.push(
        "axis_values",
        values
            .iter()
            .map(|v| v.to_string())
            .collect::<Vec<_>>()
            .join(","),
    );
    let display = |v: Option<f64>| v.map_or("(unset)".to_string(), |v| v.to_string());
    provenance.push(
        "n",
        if axis == Axis::N {
            "(swept)".to_string()
        } else {
            section.n.map_or("(unset)".to_string(), |n| n.to_string())
        },
    );
    provenance.push("b", display(section.b));
    provenance.push(
        "c_f",
        if axis == Axis::Cf {
            "(swept)".to_string()
        } else {
            display(section.cf)
        },
    );
    provenance.push(
        "c_l",
        if axis == Axis::Cl {
            "(swept)".to_string()
        } else {
            display(section.cl)
        },
    );
    provenance.push(
        "p",
        if axis == Axis::P {
            "(swept)".to_string()
        } else {
            display(section.p)
        },
    );
    provenance.push("outputs", outputs.join(","));
    push_solver(&mut provenance, &config);

    let mut text = provenance.header();
    text.push_str("axis_value");
    for name in &outputs {
        text.push(',');
        text.push_str(name);
    }
    text.push_str(",residual,error\n");

    for &value in &values {
        let row = instantiate(&section, axis, value)
            .and_then(|params| solve(&params, &config));
        text.push_str(&sig(value));
        match row {
            Ok(report) => {
                for name in &outputs {
                    let cell = match *name {
                        "q_star" => report.q_star,
                        "outage" => report.outage,
                        "reward" => report.reward,
                        _ => unreachable!(),
                    };
                    text.push(',');
                    text.push_str(&sig(cell));
                }
                text.push(',');
                text.push_str(&sig(report.residual_h));
                text.push_str(",\n");
            }
            Err(e) => {
                for _ in &outputs {
                    text.push(',');
                }
                text.push(',');
                let message = match e {
                    CliError::Input(m) | CliError::Computation(m) => m,
                };
                text.push(',');
                text.push_str(&csv_cell(&message));
                text.push('\n');
            }
        }
    }
    emit(out, &text)
}

fn cmd_dynamics(
    args: DynamicsArgs,
    file: &ConfigFile,
    out: Option<&std::path::Path>,
) -> Result<(), CliError> {
    let params = build_params(&merged_params(&args.params, &file.params))?;
    let config = build_solver(&args.solver, &file.solver);
    let mu = args.mu.or(file.dynamics.mu).unwrap_or(0.1);
    let t_end = args.t_end.or(file.dynamics.t_end).unwrap_or(500.0);
    let dt = args.dt.or(file.dynamics.dt).unwrap_or(0.01);
    let starts = args
        .q0
        .clone()
        .or_else(|| file.dynamics.q0.clone())
        .ok_or_else(|| CliError::Input("dynamics needs --q0".into()))?;
    if starts.is_empty() {
        return Err(CliError::Input("dynamics needs at least one q0".into()));
    }

    let report = solve(&params, &config)?;
    let trajectories: Vec<_> = starts
        .iter()
        .map(|&q0| integrate(&params, mu, q0, t_end, dt))
        .collect::<Result<_, _>>()
        .map_err(|e| CliError::Computation(e.to_string()))?;

    let mut provenance = Provenance::new("dynamics");
    push_params(&mut provenance, &params);
    provenance
        .push("mu", mu)
        .push(
            "q0",
            starts
                .iter()
                .map(|v| v.to_string())
                .collect::<Vec<_>>()
                .join(","),
        )
        .push("t_end", t_end)
        .push("dt", dt)
        .push("q_star", report.q_star);
    push_solver(&mut provenance, &config);

    let mut text = provenance.header();
    text.push_str("time");
    for q0 in &starts {
        text.push_str(&format!(",q_{q0}"));
    }
    text.push('\n');
    // All trajectories share dt and t_end, hence the same stored grid.
    let len = trajectories[0].len();
    debug_assert!(trajectories.iter().all(|t| t.len() == len));
    for i in 0..len {
        text.push_str(&sig(trajectories[0].times[i]));
        for trajectory in &trajectories {
            text.push(',');
            text.push_str(&sig(trajectory.values[i]));
        }
        text.push('\n');
    }
    emit(out, &text)
}

fn cmd_robustness(
    args: RobustnessArgs,
    file: &ConfigFile,
    out: Option<&std::path::Path>,
) -> Result<(), CliError> {
    let params = build_params(&merged_params(&args.params, &file.params))?;
    let config = build_solver(&args.solver, &file.solver);
    let mode = match args.mode {
        Some(mode) => mode,
        None => match require(file.robustness.mode.clone(), "mode")?.as_str() {
            "coalition" => Mode::Coalition,
            "barrier" => Mode::Barrier,
            other => {
                return Err(CliError::Input(format!(
                    "mode must be coalition or barrier; got {other}"
                )))
            }
        },
    };
    let report = solve(&params, &config)?;

    match mode {
        Mode::Coalition => {
            let curve = coalition_curve(&params, report.q_star)
                .map_err(|e| CliError::Computation(e.to_string()))?;
            let mut provenance = Provenance::new("robustness");
            provenance.push("mode", "coalition");
            push_params(&mut provenance, &params);
            provenance
                .push("q_star", report.q_star)
                .push("coalition_size", "round(alpha * n), sizes 1..n-1")
                .push("mutant_strategy", 0.0);
            push_solver(&mut provenance, &config);
            let mut text = provenance.header();
            text.push_str("alpha,resident,mutant,baseline\n");
            for row in &curve {
                text.push_str(&format!(
                    "{},{},{},{}\n",
                    sig(row.alpha),
                    sig(row.resident),
                    sig(row.mutant),
                    sig(row.baseline)
                ));
            }
            emit(out, &text)
        }
        Mode::Barrier => {
            let step = args.qm_step.or(file.robustness.qm_step).unwrap_or(0.001);
            let scan = invasion_barrier(&params, report.q_star, step)
                .map_err(|e| CliError::Input(e.to_string()))?;
            let worst = scan
                .per_k
                .iter()
                .min_by(|a, b| a.min_gap.total_cmp(&b.min_gap))
                .expect("scan covers k = 1..n-1");
            let mut provenance = provenance_json(&params, &config);
            provenance["command"] = json!("robustness");
            provenance["mode"] = json!("barrier");
            provenance["q_star"] = json!(report.q_star);
            provenance["qm_step"] = json!(step);
            let doc = json!({
                "provenance": provenance,
                "barrier": scan.barrier,
                "barrier_mutants": scan.barrier_mutants,
                "worst_gap": worst.min_gap,
                "worst_gap_q_m": worst.argmin_q_m,
                "worst_gap_mutants": worst.mutants,
                "per_k": scan.per_k,
            });
            emit(out, &to_pretty(&doc))?;
            if scan.barrier <= 0.0 {
                return Err(CliError::Computation(format!(
                    "invasion barrier is 0: a lone mutant at q_m = {} already matches \
                     the residents (gap {:e})",
                    worst.argmin_q_m, worst.min_gap
                )));
            }
            Ok(())
        }
    }
}

fn resolve_strategies(
    choice: &str,
    params: &GameParams,
    config: &SolverConfig,
) -> Result<(Vec<f64>, Option<f64>), CliError> {
    let n = params.n() as usize;
    match choice {
        "equilibrium" => {
            let report = solve(params, config)?;
            Ok((vec![report.q_star; n], Some(report.q_star)))
        }
        "all-upload" => Ok((vec![1.0; n], None)),
        "all-abstain" => Ok((vec![0.0; n], None)),
        list => {
            let values: Result<Vec<f64>, _> =
                list.split(',').map(|tok| tok.trim().parse::<f64>()).collect();
            let values = values.map_err(|_| {
                CliError::Input(format!(
                    "strategy must be equilibrium, all-upload, all-abstain, a \
                     probability, or a comma-separated list; got {list}"
                ))
            })?;
            match values.len() {
                1 => Ok((vec![values[0]; n], None)),
                len if len == n => Ok((values, None)),
                len => Err(CliError::Input(format!(
                    "strategy list has {len} entries, expected {n}"
                ))),
            }
        }
    }
}

fn cmd_simulate(
    args: SimulateArgs,
    file: &ConfigFile,
    out: Option<&std::path::Path>,
) -> Result<(), CliError> {
    let params = build_params(&merged_params(&args.params, &file.params))?;
    let config = build_solver(&args.solver, &file.solver);
    let choice = args
        .strategy
        .clone()
        .or_else(|| file.simulate.strategy.clone())
        .unwrap_or_else(|| "equilibrium".into());
    let rounds = args.rounds.or(file.simulate.rounds).unwrap_or(1_000_000);
    let seed = args.seed.or(file.simulate.seed).unwrap_or(42);

    let (strategies, q_star) = resolve_strategies(&choice, &params, &config)?;
    let stats = simulate(&params, &strategies, rounds, seed)
        .map_err(|e| CliError::Input(e.to_string()))?;

    let mut provenance = provenance_json(&params, &config);
    provenance["command"] = json!("simulate");
    provenance["strategy"] = json!(choice);
    provenance["rounds"] = json!(rounds);
    provenance["seed"] = json!(seed);
    if let Some(q) = q_star {
        provenance["q_star"] = json!(q);
    }
    let doc = json!({
        "provenance": provenance,
        "stats": stats,
    });
    emit(out, &to_pretty(&doc))?;

    if let Some(trace_path) = &args.trace {
        let mut text = String::new();
        text.push_str(&format!(
            "# artifact = relayer-game {}\n# command = simulate trace\n# seed = {seed}\n",
            env!("CARGO_PKG_VERSION")
        ));
        text.push_str("round,first_uploader,outage,actions");
        for i in 0..params.n() {
            text.push_str(&format!(",payoff_{i}"));
        }
        text.push('\n');
        for round in 0..rounds.min(TRACE_ROW_CAP) {
            let outcome = simulate_round(&params, &strategies, seed, round)
                .map_err(|e| CliError::Computation(e.to_string()))?;
            let first = outcome
                .first_uploader
                .map_or(String::new(), |i| i.to_string());
            let actions: String = outcome
                .actions
                .iter()
                .map(|a| match a {
                    Action::Upload => 'U',
                    Action::NoUpload => 'N',
                })
                .collect();
            text.push_str(&format!("{},{first},{},{actions}", outcome.round, outcome.outage));
            for payoff in &outcome.payoffs {
                text.push(',');
                text.push_str(&sig(*payoff));
            }
            text.push('\n');
        }
        emit(Some(trace_path), &text)?;
    }
    Ok(())
}
