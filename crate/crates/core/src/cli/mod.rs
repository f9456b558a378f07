//! The `causal-lab` command line.
//!
//! Every command prints a JSON report on stdout (and writes it, plus any CSV
//! series, into `--out DIR` when given). Exit codes: 0 on success, 1 when
//! `--assert` is set and a checked condition fails, 2 on invalid input.

mod report;
mod scenario;

use std::ffi::OsString;
use std::path::PathBuf;
use std::time::Instant;

use clap::{Args, Parser, Subcommand, ValueEnum};
use serde_json::{json, Value};

pub use report::{condition_json, verdict_json, write_atomic, ReportRecord};
pub use scenario::{MeasurementSpec, QuantumGridSpec, QuantumSpec, ScenarioFile, SignalSpec, SpacetimeSpec, TransportSpec, Units};

use crate::conditions::{evaluate_conditions, find_ns_witness, truth_table, validate, MeasurementScenario};
use crate::error::{Error, Result};
use crate::protocol::{construct_protocol, simulate_signalling, single_senders, SignallingProtocol};
use crate::quantum::{
    analytic_ce_gaussian, born_measure, evolve, gaussian_packet, guard_boundary, min_violation_halfwidth, AnyPacket,
    Dynamics, Grid1d, Packet, BOUNDARY_LIMIT,
};
use crate::region::Region;
use crate::transport::{check_ce, check_ce_within, Method};
use crate::weight::{Exact, Weight};

/// Environment variable capping the worker thread count.
pub const THREADS_ENV: &str = "CAUSAL_LAB_THREADS";

#[derive(Debug, Parser)]
#[command(name = "causal-lab", version, about = "Causality checks for detection statistics in Minkowski spacetime")]
pub struct Cli {
    #[command(subcommand)]
    pub command: Command,

    /// Scenario file (JSON).
    #[arg(long, global = true)]
    pub scenario: Option<PathBuf>,

    /// Exit with status 1 when a checked condition fails.
    #[arg(long = "assert", global = true)]
    pub assert: bool,

    /// Overrides the scenario seed.
    #[arg(long, global = true)]
    pub seed: Option<u64>,

    /// Directory for report.json and CSV series.
    #[arg(long, global = true)]
    pub out: Option<PathBuf>,

    #[arg(long, global = true, value_enum, default_value_t = MethodArg::Maxflow)]
    pub method: MethodArg,

    /// Evaluate measure weights as exact rationals.
    #[arg(long, global = true)]
    pub exact_rational: bool,
}

#[derive(Debug, Clone, Copy, ValueEnum)]
pub enum MethodArg {
    Bruteforce,
    Maxflow,
}

impl From<MethodArg> for Method {
    fn from(m: MethodArg) -> Method {
        match m {
            MethodArg::Bruteforce => Method::Bruteforce,
            MethodArg::Maxflow => Method::Maxflow,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum Condition {
    Ce,
    Ns,
    A1,
    A2,
    All,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Check the measurement scenario's internal consistency.
    Validate,
    /// Evaluate one condition, or all of them.
    Check {
        #[arg(value_enum)]
        condition: Condition,
    },
    /// The realisability table of (NS, A1, A2, CE) on the two-point family.
    TruthTable,
    /// Build a signalling protocol from the scenario's NS witness.
    Protocol,
    /// Evolve a Gaussian packet and check CE on a detector interval.
    SimulateQuantum(QuantumArgs),
    /// Causality-violation scales for a Gaussian packet.
    Scales(ScalesArgs),
    /// Monte Carlo bit error of the scenario's signalling protocol.
    SignalSim {
        #[arg(long)]
        trials: Option<usize>,
        #[arg(long, value_delimiter = ',')]
        block_sizes: Option<Vec<usize>>,
    },
}

#[derive(Debug, Clone, Args)]
pub struct QuantumArgs {
    #[arg(long, value_enum)]
    pub dynamics: Option<DynamicsArg>,
    #[arg(long)]
    pub m: Option<f64>,
    #[arg(long)]
    pub lambda: Option<f64>,
    #[arg(long)]
    pub t: Option<f64>,
    /// Detector half-width; defaults to 1.5 times the violation threshold.
    #[arg(long)]
    pub ell: Option<f64>,
    #[arg(long)]
    pub half_width: Option<f64>,
    #[arg(long)]
    pub n: Option<usize>,
    #[arg(long, value_enum)]
    pub units: Option<UnitsArg>,
}

#[derive(Debug, Clone, Copy, ValueEnum)]
pub enum DynamicsArg {
    Schrodinger,
    Relativistic,
    Dirac,
}

#[derive(Debug, Clone, Copy, ValueEnum)]
pub enum UnitsArg {
    Natural,
    Si,
}

impl From<UnitsArg> for Units {
    fn from(u: UnitsArg) -> Units {
        match u {
            UnitsArg::Natural => Units::Natural,
            UnitsArg::Si => Units::Si,
        }
    }
}

#[derive(Debug, Clone, Args)]
pub struct ScalesArgs {
    #[arg(long)]
    pub m: f64,
    #[arg(long)]
    pub lambda: f64,
    /// Elapsed time, or `inf` for the asymptotic bound.
    #[arg(long, default_value = "inf")]
    pub t: String,
    #[arg(long, value_enum, default_value_t = UnitsArg::Si)]
    pub units: UnitsArg,
}

/// What a command produced: its verdict payload, whether the checked
/// conditions hold, and CSV series to write next to the report.
struct Outcome {
    verdicts: Value,
    ok: bool,
    csv: Vec<(String, Vec<u8>)>,
}

impl Outcome {
    fn new(verdicts: Value, ok: bool) -> Self {
        Outcome {
            verdicts,
            ok,
            csv: Vec::new(),
        }
    }
}

/// Parses `args` (including the program name) and runs the command.
/// Returns the process exit code.
pub fn run<I, T>(args: I) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<OsString> + Clone,
{
    let args: Vec<OsString> = args.into_iter().map(Into::into).collect();
    let cli = match Cli::try_parse_from(&args) {
        Ok(cli) => cli,
        Err(e) => {
            let code = if e.use_stderr() { 2 } else { 0 };
            let _ = e.print();
            return code;
        }
    };
    configure_threads();
    let echo: Vec<String> = args.iter().skip(1).map(|a| a.to_string_lossy().into_owned()).collect();
    match execute(&cli, &echo) {
        Ok(ok) => {
            if cli.assert && !ok {
                1
            } else {
                0
            }
        }
        Err(e) => {
            eprintln!("causal-lab: {e}");
            2
        }
    }
}

fn configure_threads() {
    if let Some(n) = std::env::var(THREADS_ENV).ok().and_then(|v| v.parse::<usize>().ok()) {
        // a second call in the same process keeps the first pool
        let _ = rayon::ThreadPoolBuilder::new().num_threads(n.max(1)).build_global();
    }
}

fn execute(cli: &Cli, echo: &[String]) -> Result<bool> {
    let start = Instant::now();
    let text = match &cli.scenario {
        Some(path) => Some(
            std::fs::read_to_string(path).map_err(|e| Error::Scenario(format!("{}: {e}", path.display())))?,
        ),
        None => None,
    };
    let file = text.as_deref().map(ScenarioFile::parse).transpose()?;
    let need = || file.as_ref().ok_or_else(|| Error::Scenario("this command needs --scenario".into()));
    let seed = cli.seed.or(file.as_ref().and_then(|f| f.seed)).unwrap_or(0);
    let method: Method = cli.method.into();

    let outcome = match &cli.command {
        Command::Validate => {
            if cli.exact_rational {
                validate_cmd::<Exact>(need()?)?
            } else {
                validate_cmd::<f64>(need()?)?
            }
        }
        Command::Check { condition } => {
            if cli.exact_rational {
                check_cmd::<Exact>(need()?, *condition, method)?
            } else {
                check_cmd::<f64>(need()?, *condition, method)?
            }
        }
        Command::TruthTable => truth_table_cmd()?,
        Command::Protocol => {
            if cli.exact_rational {
                protocol_cmd::<Exact>(need()?)?
            } else {
                protocol_cmd::<f64>(need()?)?
            }
        }
        Command::SimulateQuantum(args) => quantum_cmd(file.as_ref(), args)?,
        Command::Scales(args) => scales_cmd(args)?,
        Command::SignalSim { trials, block_sizes } => {
            signal_cmd(need()?, *trials, block_sizes.clone(), seed, cli.exact_rational)?
        }
    };

    let record = ReportRecord::new(echo, text.as_deref(), seed, outcome.verdicts, start.elapsed().as_secs_f64());
    let body = record.to_pretty()?;
    println!("{body}");
    if let Some(dir) = &cli.out {
        std::fs::create_dir_all(dir).map_err(|e| Error::Scenario(format!("{}: {e}", dir.display())))?;
        write_atomic(&dir.join("report.json"), body.as_bytes())?;
        for (name, bytes) in &outcome.csv {
            write_atomic(&dir.join(name), bytes)?;
        }
    }
    Ok(outcome.ok)
}

fn validate_cmd<W: Weight>(file: &ScenarioFile) -> Result<Outcome> {
    let sc = file.measurement::<W>()?;
    let violations = validate(&sc);
    Ok(Outcome::new(
        json!({ "valid": violations.is_empty(), "violations": violations }),
        violations.is_empty(),
    ))
}

fn check_cmd<W: Weight>(file: &ScenarioFile, condition: Condition, method: Method) -> Result<Outcome> {
    if condition == Condition::Ce {
        let (mu, nu) = file.transport_pair::<W>()?;
        let v = check_ce(&mu, &nu, &file.causal_structure()?, method)?;
        return Ok(Outcome::new(json!({ "ce": verdict_json(&v) }), v.holds));
    }
    let sc: MeasurementScenario<W> = file.measurement()?;
    let violations = validate(&sc);
    if !violations.is_empty() {
        return Err(Error::Scenario(format!("invalid measurement scenario: {violations:?}")));
    }
    let r = evaluate_conditions(&sc, method)?;
    let ok = match condition {
        Condition::Ns => r.ns,
        Condition::A1 => r.a1,
        Condition::A2 => r.a2,
        _ => r.ce && r.ns && r.a1 && r.a2,
    };
    let full = condition_json(&r);
    let verdicts = match condition {
        Condition::All => full,
        Condition::Ns => json!({ "ns": r.ns, "ns_distance": full["ns_distance"], "ns_witness": full["ns_witness"] }),
        Condition::A1 => json!({ "a1": r.a1, "a1_mass": full["a1_mass"], "a1_vacuous": r.a1_vacuous }),
        _ => json!({ "a2": r.a2, "a2_distance": full["a2_distance"], "a2_vacuous": r.a2_vacuous }),
    };
    Ok(Outcome::new(verdicts, ok))
}

fn truth_table_cmd() -> Result<Outcome> {
    let table = truth_table()?;
    let sample = |s: &crate::conditions::SampleVerdict| {
        json!({
            "abc": s.abc.iter().map(|w| w.to_json()).collect::<Vec<_>>(),
            "ns": s.verdict[0], "a1": s.verdict[1], "a2": s.verdict[2], "ce": s.verdict[3],
        })
    };
    let rows: Vec<Value> = table
        .iter()
        .map(|row| {
            json!({
                "expected": { "ns": row.expected[0], "a1": row.expected[1], "a2": row.expected[2], "ce": row.expected[3] },
                "samples": row.samples.iter().map(sample).collect::<Vec<_>>(),
                "reproduced": row.reproduced(),
                "erratum": row.erratum.as_ref().map(sample),
            })
        })
        .collect();
    let ok = table.iter().all(|r| r.reproduced());
    Ok(Outcome::new(json!({ "rows": rows, "all_reproduced": ok }), ok))
}

fn build_protocol<W: Weight>(file: &ScenarioFile) -> Result<(MeasurementScenario<W>, SignallingProtocol)> {
    let sc: MeasurementScenario<W> = file.measurement()?;
    let lattice = file
        .protocol
        .as_ref()
        .ok_or_else(|| Error::Scenario("missing \"protocol\" lattice section".into()))?;
    let witness = find_ns_witness(&sc)?.ok_or(Error::NoWitness)?;
    let proto = construct_protocol(&sc, &witness, lattice)?;
    Ok((sc, proto))
}

fn protocol_cmd<W: Weight>(file: &ScenarioFile) -> Result<Outcome> {
    let (sc, proto) = build_protocol::<W>(file)?;
    let audit = proto.audit(&sc.cs)?;
    let lattice = file.protocol.as_ref().expect("checked in build_protocol");
    let singles = single_senders(&sc.k, &proto.q, proto.s, lattice, &sc.cs)?;
    eprintln!(
        "receiver q = (t={}, x={:?}); {} sender(s); gap {}; C in J-(q): {}; K covered: {}; senders not before q: {}",
        proto.q.t,
        proto.q.x,
        proto.k_count(),
        proto.channel_gap,
        audit.c_in_past_of_q,
        audit.k_covered,
        audit.senders_not_before_q
    );
    Ok(Outcome::new(
        json!({
            "protocol": proto,
            "k": proto.k_count(),
            "audit": audit,
            "single_sender_exists": !singles.is_empty(),
        }),
        audit.ok(),
    ))
}

fn quantum_cmd(file: Option<&ScenarioFile>, args: &QuantumArgs) -> Result<Outcome> {
    let mut spec = file.and_then(|f| f.quantum.clone()).unwrap_or(QuantumSpec {
        dynamics: Dynamics::Schrodinger,
        units: Units::Natural,
        m: 1.0,
        lambda: 1.0,
        t: 1.0,
        x0: 0.0,
        k0: 0.0,
        grid: QuantumGridSpec {
            half_width: 40.0,
            n: 8192,
        },
        ell: None,
        k: None,
    });
    if let Some(d) = args.dynamics {
        spec.dynamics = match d {
            DynamicsArg::Schrodinger => Dynamics::Schrodinger,
            DynamicsArg::Relativistic => Dynamics::Relativistic,
            DynamicsArg::Dirac => Dynamics::Dirac,
        };
    }
    spec.m = args.m.unwrap_or(spec.m);
    spec.lambda = args.lambda.unwrap_or(spec.lambda);
    spec.t = args.t.unwrap_or(spec.t);
    spec.grid.half_width = args.half_width.unwrap_or(spec.grid.half_width);
    spec.grid.n = args.n.unwrap_or(spec.grid.n);
    if let Some(u) = args.units {
        spec.units = u.into();
    }
    if args.ell.is_some() {
        spec.ell = args.ell;
        spec.k = None;
    }
    let consts = spec.units.constants();
    let cs = consts.causal_structure()?;
    let scale = min_violation_halfwidth(spec.m, spec.lambda, spec.t, &consts)?;
    let k = match (&spec.k, spec.ell) {
        (Some(k), _) => k.clone(),
        (None, Some(ell)) => Region::interval(-ell, ell),
        (None, None) => {
            let ell = 1.5 * scale.ell_min.expect("finite t");
            Region::interval(-ell, ell)
        }
    };
    let grid = Grid1d::symmetric(spec.grid.half_width, spec.grid.n)?;
    let psi = gaussian_packet(spec.lambda, spec.x0, spec.k0, grid, spec.m, consts)?;
    let evolved = evolve(&AnyPacket::Scalar(psi.clone()), spec.t, spec.dynamics)?;
    guard_boundary(&evolved, BOUNDARY_LIMIT)?;
    let mu = born_measure(&psi, 0.0)?;
    let nu = born_measure(&evolved, spec.t)?;
    let verdict = check_ce_within(&mu, &nu, &k, &cs, Method::Maxflow)?;
    let analytic = match (spec.dynamics, &spec.k, spec.x0 == 0.0 && spec.k0 == 0.0) {
        (Dynamics::Schrodinger, None, true) => {
            let ell = k.boxes()[0].hi[0];
            Some(analytic_ce_gaussian(spec.m, spec.lambda, spec.t, ell, &consts)?)
        }
        _ => None,
    };
    let mut w = csv::Writer::from_writer(Vec::new());
    w.write_record(["x", "density"]).map_err(csv_err)?;
    for (x, d) in grid.xs().into_iter().zip(evolved.density()) {
        w.serialize((x, d)).map_err(csv_err)?;
    }
    let bytes = w.into_inner().map_err(|e| Error::Scenario(e.to_string()))?;
    let mut out = Outcome::new(
        json!({
            "dynamics": spec.dynamics,
            "K": k,
            "ce": verdict_json(&verdict),
            "analytic_ce": analytic,
            "scales": scale,
            "norm": evolved.norm(),
            "boundary_density": crate::quantum::boundary_density(&evolved),
        }),
        verdict.holds,
    );
    out.csv.push(("density.csv".into(), bytes));
    Ok(out)
}

fn csv_err(e: csv::Error) -> Error {
    Error::Scenario(e.to_string())
}

fn scales_cmd(args: &ScalesArgs) -> Result<Outcome> {
    let t = match args.t.trim().to_ascii_lowercase().as_str() {
        "inf" | "infinity" => f64::INFINITY,
        other => other
            .parse::<f64>()
            .map_err(|_| Error::Scenario(format!("bad --t {other:?}")))?,
    };
    let units: Units = args.units.into();
    let report = min_violation_halfwidth(args.m, args.lambda, t, &units.constants())?;
    Ok(Outcome::new(json!({ "scales": report, "units": units }), true))
}

fn signal_cmd(
    file: &ScenarioFile,
    trials: Option<usize>,
    blocks: Option<Vec<usize>>,
    seed: u64,
    exact: bool,
) -> Result<Outcome> {
    let proto = if exact {
        build_protocol::<Exact>(file)?.1
    } else {
        build_protocol::<f64>(file)?.1
    };
    let spec = file.signal.clone().unwrap_or(SignalSpec {
        trials: 10_000,
        block_sizes: vec![1, 10, 100],
    });
    let trials = trials.unwrap_or(spec.trials);
    let blocks = blocks.unwrap_or(spec.block_sizes);
    let mut w = csv::Writer::from_writer(Vec::new());
    w.write_record(["block_size", "error_rate", "stderr"]).map_err(csv_err)?;
    let mut rows = Vec::new();
    for b in blocks {
        let s = simulate_signalling(&proto, trials, b, seed)?;
        w.serialize((s.block_size, s.error_rate, s.stderr)).map_err(csv_err)?;
        rows.push(s);
    }
    let bytes = w.into_inner().map_err(|e| Error::Scenario(e.to_string()))?;
    let mut out = Outcome::new(json!({ "channel_gap": proto.channel_gap, "stats": rows }), true);
    out.csv.push(("signal.csv".into(), bytes));
    Ok(out)
}
