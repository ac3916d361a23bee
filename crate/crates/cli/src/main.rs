//! `dgap`: simulate payoff-based learning, integrate the comparison dynamics,
//! catalog stationary points and run Monte-Carlo presets.
//!
//! Exit status: 0 on success, 1 on usage errors, 2 on numerical failures.
//! The worker count for `experiment` comes from `DGAP_WORKERS` (default 1).

use clap::{Args, Parser, Subcommand, ValueEnum};
use dgap_core::analysis::{exact_potential, SUPPORT_TOL};
use dgap_core::dynamics::{run_dgap, DgapConfig, OdeConfig, StepSchedule, VectorField, BR_BRACKET_MAX};
use dgap_core::experiments::{preset, preset_names, run_experiment, workers_from_env, ExperimentConfig};
use dgap_core::game::{builtin_names, GameSpec};
use dgap_core::io::{to_json_string, write_json, write_svg, write_trajectory};
use dgap_core::{
    build_interaction_graph, eigen_spectrum, find_zeros, integrate_ode, is_bipartite, jacobian_f, mean_field,
    noise_excitation, stability_of, ActionProfile, BoundingBox, Error, Game,
};
use std::path::{Path, PathBuf};
use std::process::ExitCode;

#[derive(Parser)]
#[command(name = "dgap", version, about = "Payoff-based learning in continuous games")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Builtin games.
    Games {
        #[command(subcommand)]
        action: GamesAction,
    },
    /// Run the stochastic process and write a trajectory CSV.
    Simulate(SimulateArgs),
    /// Integrate a deterministic vector field and write a trajectory CSV.
    Ode(OdeArgs),
    /// Compute the stationary-point catalog.
    Zeros(ZerosArgs),
    /// Jacobian, spectrum, class, stability, graph and noise at a point.
    Analyze(AnalyzeArgs),
    /// Run a Monte-Carlo preset and write the report.
    Experiment(ExperimentArgs),
}

#[derive(Subcommand)]
enum GamesAction {
    /// Print every builtin name with its JSON descriptor.
    List,
}

#[derive(Args)]
struct GameArg {
    /// Builtin name or path to a JSON descriptor.
    #[arg(long)]
    game: String,
}

#[derive(Args)]
struct SimulateArgs {
    #[command(flatten)]
    game: GameArg,
    /// Initial profile, comma separated.
    #[arg(long)]
    x0: String,
    #[arg(long)]
    steps: u64,
    #[arg(long, default_value_t = 0)]
    seed: u64,
    /// First round index; defaults to the smallest safe one for x0.
    #[arg(long)]
    start_index: Option<u64>,
    #[arg(long, default_value_t = 1)]
    record_every: u64,
    /// `harmonic` or `power:SCALE,EXPONENT`.
    #[arg(long, default_value = "harmonic")]
    schedule: String,
    #[arg(long)]
    out: PathBuf,
    #[arg(long)]
    svg: Option<PathBuf>,
}

#[derive(Clone, Copy, ValueEnum)]
enum FieldKind {
    Dampened,
    Arrow,
    Rosen,
    Brd,
}

#[derive(Args)]
struct OdeArgs {
    #[command(flatten)]
    game: GameArg,
    #[arg(long)]
    x0: String,
    #[arg(long, value_enum, default_value = "dampened")]
    field: FieldKind,
    /// Rosen weights, comma separated; all ones by default.
    #[arg(long)]
    weights: Option<String>,
    #[arg(long, default_value_t = 10.0)]
    horizon: f64,
    #[arg(long, default_value_t = 0.01)]
    dt: f64,
    #[arg(long)]
    out: PathBuf,
    #[arg(long)]
    svg: Option<PathBuf>,
}

#[derive(Args)]
struct ZerosArgs {
    #[command(flatten)]
    game: GameArg,
    /// `LO:HI` for a cube, or `L1,..,LN:U1,..,UN`; defaults to [0, 10]^N.
    #[arg(long = "box")]
    bounds: Option<String>,
    #[arg(long, default_value_t = 4)]
    grid: usize,
    #[arg(long)]
    out: Option<PathBuf>,
}

#[derive(Args)]
struct AnalyzeArgs {
    #[command(flatten)]
    game: GameArg,
    #[arg(long)]
    point: String,
    /// Threshold on |∂u_i/∂x_j| for an interaction edge.
    #[arg(long, default_value_t = 1e-9)]
    graph_tol: f64,
}

#[derive(Args)]
struct ExperimentArgs {
    /// Preset name; ignored when --config is given.
    #[arg(long, required_unless_present = "config")]
    preset: Option<String>,
    /// JSON experiment configuration.
    #[arg(long)]
    config: Option<PathBuf>,
    /// Overrides the master seed.
    #[arg(long)]
    seed: Option<u64>,
    #[arg(long)]
    runs: Option<usize>,
    #[arg(long)]
    steps: Option<u64>,
    #[arg(long)]
    out: PathBuf,
}

fn load_game(arg: &GameArg) -> Result<(GameSpec, Box<dyn Game>), Error> {
    let spec = if builtin_names().contains(&arg.game.as_str()) {
        GameSpec::named(&arg.game)?
    } else if Path::new(&arg.game).is_file() {
        dgap_core::io::read_json(Path::new(&arg.game))?
    } else {
        GameSpec::named(&arg.game)?
    };
    let game = spec.build()?;
    Ok((spec, game))
}

fn parse_list(text: &str) -> Result<Vec<f64>, Error> {
    text.split(',')
        .map(|t| {
            t.trim()
                .parse::<f64>()
                .map_err(|_| Error::InvalidConfig(format!("`{t}` is not a number")))
        })
        .collect()
}

fn parse_schedule(text: &str) -> Result<StepSchedule, Error> {
    if text == "harmonic" {
        return Ok(StepSchedule::Harmonic);
    }
    let params = text
        .strip_prefix("power:")
        .ok_or_else(|| Error::InvalidConfig(format!("unknown schedule `{text}`")))?;
    match parse_list(params)?.as_slice() {
        [scale, exponent] => StepSchedule::power(*scale, *exponent),
        _ => Err(Error::InvalidConfig("power schedule takes SCALE,EXPONENT".into())),
    }
}

fn parse_box(text: Option<&str>, n: usize) -> Result<BoundingBox, Error> {
    let Some(text) = text else {
        return Ok(BoundingBox::default_for(n));
    };
    let (lo, hi) = text
        .split_once(':')
        .ok_or_else(|| Error::InvalidConfig("box must be LO:HI".into()))?;
    let (lo, hi) = (parse_list(lo)?, parse_list(hi)?);
    let widen = |v: Vec<f64>| if v.len() == 1 { vec![v[0]; n] } else { v };
    let b = BoundingBox::new(widen(lo), widen(hi))?;
    if b.dim() != n {
        return Err(Error::InvalidConfig(format!(
            "box has dimension {}, game has {n} players",
            b.dim()
        )));
    }
    Ok(b)
}

fn fmt_vec(v: &[f64]) -> String {
    let parts: Vec<String> = v.iter().map(|c| format!("{}", c + 0.0)).collect();
    format!("({})", parts.join(", "))
}

fn games_list() -> Result<(), Error> {
    for name in builtin_names() {
        let spec = GameSpec::named(name)?;
        println!("{name}\t{}", serde_json::to_string(&spec)?);
    }
    Ok(())
}

fn simulate(a: &SimulateArgs) -> Result<(), Error> {
    let (_, game) = load_game(&a.game)?;
    let x0 = ActionProfile::parse(&a.x0)?;
    let schedule = parse_schedule(&a.schedule)?;
    let start = a
        .start_index
        .unwrap_or_else(|| dgap_core::dynamics::required_start_index(&schedule, &x0));
    let cfg = DgapConfig::new(a.steps, a.seed)
        .with_schedule(schedule)
        .with_start_index(start);
    let traj = run_dgap(game.as_ref(), &x0, &cfg, a.record_every)?;
    write_trajectory(&traj, &a.out)?;
    if let Some(svg) = &a.svg {
        write_svg(&traj, svg)?;
    }
    let last = traj.last().expect("trajectory has states");
    println!(
        "{} states written to {}; x_{} = {}",
        traj.states.len(),
        a.out.display(),
        last.n,
        fmt_vec(&last.x)
    );
    Ok(())
}

fn ode(a: &OdeArgs) -> Result<(), Error> {
    let (_, game) = load_game(&a.game)?;
    let x0 = ActionProfile::parse(&a.x0)?;
    let n = game.n_players();
    let field = match a.field {
        FieldKind::Dampened => VectorField::Dampened,
        FieldKind::Arrow => VectorField::Arrow,
        FieldKind::Rosen => {
            let weights = match &a.weights {
                Some(w) => parse_list(w)?,
                None => vec![1.0; n],
            };
            if weights.len() != n || weights.iter().any(|w| w.is_nan() || *w <= 0.0) {
                return Err(Error::InvalidConfig(format!("need {n} positive weights")));
            }
            VectorField::Rosen { weights }
        }
        FieldKind::Brd => VectorField::BestResponse {
            bracket_max: BR_BRACKET_MAX,
        },
    };
    let traj = integrate_ode(game.as_ref(), &x0, &OdeConfig::new(field, a.horizon, a.dt, n))?;
    write_trajectory(&traj, &a.out)?;
    if let Some(svg) = &a.svg {
        write_svg(&traj, svg)?;
    }
    let last = traj.last().expect("trajectory has states");
    println!(
        "{} states written to {}; x(T) = {}",
        traj.states.len(),
        a.out.display(),
        fmt_vec(&last.x)
    );
    Ok(())
}

fn zeros(a: &ZerosArgs) -> Result<(), Error> {
    let (_, game) = load_game(&a.game)?;
    let bounds = parse_box(a.bounds.as_deref(), game.n_players())?;
    let cat = find_zeros(game.as_ref(), &bounds, a.grid)?;
    if let Some(out) = &a.out {
        write_json(out, &cat)?;
    }
    let ne = cat
        .points
        .iter()
        .filter(|p| p.klass == dgap_core::ZeroClass::NashEquilibrium)
        .count();
    println!(
        "{}: {} zeros ({} NashEquilibrium, {} OtherZero), {} clusters",
        cat.game,
        cat.points.len(),
        ne,
        cat.points.len() - ne,
        cat.clusters.len()
    );
    for (i, p) in cat.points.iter().enumerate() {
        let cluster = p.cluster.map_or(String::new(), |c| format!(" cluster {c}"));
        println!(
            "  [{i}] {} {:?} {:?}{cluster}",
            fmt_vec(&p.location),
            p.klass,
            p.stability
        );
    }
    for s in &cat.unresolved_supports {
        println!("  unresolved support {s:?}");
    }
    Ok(())
}

fn analyze(a: &AnalyzeArgs) -> Result<(), Error> {
    let (spec, game) = load_game(&a.game)?;
    let x = ActionProfile::parse(&a.point)?;
    let g = game.as_ref();
    println!("game: {}", g.name());
    println!("point: {}", fmt_vec(&x));
    let jac = jacobian_f(g, &x)?;
    println!("jacobian:");
    for row in jac.rows() {
        println!("  {}", fmt_vec(&row));
    }
    let spectrum = eigen_spectrum(&jac)?;
    let eig: Vec<String> = spectrum
        .eigenvalues
        .iter()
        .map(|e| {
            if e.im == 0.0 {
                format!("{}", e.re)
            } else {
                format!("{}{:+}i", e.re, e.im)
            }
        })
        .collect();
    println!("eigenvalues: {}", eig.join(", "));
    let graph = build_interaction_graph(g, &x, a.graph_tol)?;
    let bip = is_bipartite(&graph);
    match &bip.partition {
        Some((l, r)) => {
            let one = |s: &[usize]| s.iter().map(|i| (i + 1).to_string()).collect::<Vec<_>>().join(",");
            println!(
                "interaction graph: bipartite, partition {{{}}} / {{{}}}",
                one(l),
                one(r)
            );
        }
        None => println!("interaction graph: not bipartite"),
    }
    let f = mean_field(g, &x)?;
    println!("mean field: {}", fmt_vec(&f));
    match stability_of(g, &x, dgap_core::analysis::SPEC_TOL) {
        Ok(p) => {
            println!("class: {:?}", p.klass);
            println!("stability: {:?}", p.stability);
            for v in &p.unstable_directions {
                println!(
                    "unstable direction {}: noise excitation {:e}",
                    fmt_vec(v),
                    noise_excitation(g, &x, v)?
                );
            }
        }
        Err(Error::NotAZero { residual }) => println!("class: not a zero (|F|_inf = {residual:e})"),
        Err(e) => return Err(e),
    }
    if let Some(p) = exact_potential(&spec) {
        println!("potential: {}", p.eval(&x));
    }
    let idle: Vec<usize> = (0..x.len()).filter(|&i| x[i] <= SUPPORT_TOL).map(|i| i + 1).collect();
    if !idle.is_empty() {
        println!("idle players: {idle:?}");
    }
    Ok(())
}

fn experiment(a: &ExperimentArgs) -> Result<(), Error> {
    let mut cfg: ExperimentConfig = match (&a.config, &a.preset) {
        (Some(path), _) => dgap_core::io::read_json(path)?,
        (None, Some(name)) => preset(name)?,
        (None, None) => {
            return Err(Error::InvalidConfig(format!(
                "give --preset ({}) or --config",
                preset_names().join(", ")
            )))
        }
    };
    if let Some(s) = a.seed {
        cfg.master_seed = s;
    }
    if let Some(r) = a.runs {
        cfg.n_runs = r;
    }
    if let Some(k) = a.steps {
        cfg.dgap.n_steps = k;
        cfg.record_every = (k / 1000).max(1);
    }
    let report = run_experiment(&cfg, workers_from_env()?)?;
    std::fs::write(&a.out, to_json_string(&report)?)?;
    print!("{}", report.summary_table());
    Ok(())
}

fn main() -> ExitCode {
    let cli = match Cli::try_parse() {
        Ok(c) => c,
        Err(e) => {
            let code = if e.use_stderr() { 1 } else { 0 };
            let _ = e.print();
            return ExitCode::from(code);
        }
    };
    let result = match &cli.command {
        Command::Games {
            action: GamesAction::List,
        } => games_list(),
        Command::Simulate(a) => simulate(a),
        Command::Ode(a) => ode(a),
        Command::Zeros(a) => zeros(a),
        Command::Analyze(a) => analyze(a),
        Command::Experiment(a) => experiment(a),
    };
    match result {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::from(if e.is_numerical() { 2 } else { 1 })
        }
    }
}
