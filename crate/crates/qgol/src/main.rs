use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Parser, Subcommand, ValueEnum};
use qgol::driver::Driver;
use qgol::report::verify_report;
use qgol::scene::{parse_scene, Scene};
use qgol::trajectory::write_trajectory;
use qgol_core::evolution::{dense_oracle_step, Region, SimClock};
use qgol_core::gadgets::{controlled_z_gadget, crossing_gadget, extract_gate_matrix, hadamard_gadget, cnot_gadget, Placement};
use qgol_core::gate::{self, Matrix};
use qgol_core::rule::ScatteringRule;
use qgol_core::state::Superposition;

const GATE_TOL: f64 = 1e-9;
const ORACLE_TOL: f64 = 1e-12;

#[derive(Parser)]
#[command(name = "qgol", version, about = "Partitioned quantum cellular automaton on 2x2x2 blocks")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Certify the scattering operator and print the report as JSON.
    Verify,
    /// Simulate a scene and write snapshots plus a manifest.
    Run {
        #[arg(long)]
        scene: PathBuf,
        #[arg(long)]
        steps: u64,
        #[arg(long, default_value_t = 1)]
        snapshot_every: u64,
        #[arg(long, default_value = "out")]
        out: PathBuf,
    },
    /// Extract a gadget's logical matrix and compare with the reference gate.
    GateTest { gate: GateName },
    /// Compare the sparse step with the dense oracle, step by step.
    OracleDiff {
        #[arg(long)]
        scene: PathBuf,
        #[arg(long)]
        steps: u64,
        /// Region size in cells along x, y, z; it is anchored at the block
        /// holding the smallest occupied coordinates of each step.
        #[arg(long, num_args = 3, value_names = ["X", "Y", "Z"])]
        region: Vec<usize>,
    },
    /// Start the session server on 127.0.0.1.
    Serve {
        #[arg(long, default_value_t = 8080)]
        port: u16,
    },
}

#[derive(Clone, Copy, ValueEnum)]
enum GateName {
    Hadamard,
    Cphase,
    Cz,
    Cnot,
}

enum Failure {
    Test(String),
    Usage(String),
}

fn load_scene(path: &PathBuf) -> Result<Scene, Failure> {
    let bytes = std::fs::read(path).map_err(|e| Failure::Usage(format!("{}: {e}", path.display())))?;
    parse_scene(&bytes).map_err(|e| Failure::Usage(format!("{}: {e}", path.display())))
}

fn gate_test(which: GateName, rule: &ScatteringRule) -> Result<(), Failure> {
    let origin = Placement::translation([0; 3]).expect("even");
    let built = match which {
        GateName::Hadamard => Ok((hadamard_gadget(&origin), 1, gate::hadamard())),
        GateName::Cphase => crossing_gadget(&origin).map(|g| (g, 2, gate::controlled_r_pi_4())),
        GateName::Cz => controlled_z_gadget(&origin).map(|g| (g, 2, gate::controlled_z())),
        GateName::Cnot => cnot_gadget().map(|g| (g, 2, gate::cnot())),
    };
    let (g, qubits, reference) = built.map_err(|e| Failure::Test(e.to_string()))?;
    let m: Matrix = extract_gate_matrix(&g, qubits, rule).map_err(|e| Failure::Test(e.to_string()))?;
    let residual = m.residual_up_to_phase(&reference);
    println!("gadget {} latency {} residual {residual:e}", g.name, g.latency);
    let canon = m.canonical_phase();
    for i in 0..canon.dim() {
        let row: Vec<String> = (0..canon.dim()).map(|j| format!("{:+.6}{:+.6}i", canon[(i, j)].re, canon[(i, j)].im)).collect();
        println!("  {}", row.join("  "));
    }
    if residual <= GATE_TOL {
        Ok(())
    } else {
        Err(Failure::Test(format!("residual {residual:e} above {GATE_TOL:e}")))
    }
}

fn max_diff(a: &Superposition, b: &Superposition) -> f64 {
    let d = |x: &Superposition, y: &Superposition| x.iter().map(|(k, v)| (v - y.amplitude(k)).norm()).fold(0.0, f64::max);
    d(a, b).max(d(b, a))
}

fn oracle_diff(scene: &Scene, steps: u64, dims: [usize; 3], driver: &Driver) -> Result<(), Failure> {
    let mut clock = SimClock::new(scene.t0);
    let mut cur = scene.initial.clone();
    for n in 0..steps {
        let parity = clock.parity();
        let min = cur.iter().filter_map(|(c, _)| c.bounds()).map(|(lo, _)| lo).reduce(|a, b| {
            qgol_core::state::Cell::new(a.x.min(b.x), a.y.min(b.y), a.z.min(b.z))
        });
        let corner = min.map(|m| parity.locate(m).0).unwrap_or_default();
        let region = Region::new(corner, dims);
        let dense = dense_oracle_step(&cur, &region, parity, &driver.rule)
            .map_err(|e| Failure::Test(format!("step {n}: {e}")))?;
        let sparse = driver.step(&cur, parity);
        let diff = max_diff(&sparse, &dense);
        println!("step {n} parity {} branches {} max_diff {diff:e}", parity.name(), sparse.len());
        if diff > ORACLE_TOL {
            return Err(Failure::Test(format!("step {n}: difference {diff:e} above {ORACLE_TOL:e}")));
        }
        cur = sparse;
        clock.t += 1;
    }
    Ok(())
}

fn execute(cli: Cli) -> Result<(), Failure> {
    let rule = ScatteringRule::standard();
    match cli.command {
        Command::Verify => {
            let report = verify_report(&rule);
            println!("{}", serde_json::to_string_pretty(&report).expect("report serializes"));
            if report.passed {
                Ok(())
            } else {
                Err(Failure::Test("scattering operator failed verification".into()))
            }
        }
        Command::Run { scene, steps, snapshot_every, out } => {
            let scene = load_scene(&scene)?;
            let driver = Driver::new(rule, scene.prune);
            let m = write_trajectory(&out, &scene, steps, snapshot_every, &driver).map_err(|e| match e {
                qgol::Error::Invalid(m) => Failure::Usage(m),
                e => Failure::Test(e.to_string()),
            })?;
            println!("wrote {} snapshots to {}", m.snapshots.len(), out.display());
            Ok(())
        }
        Command::GateTest { gate } => gate_test(gate, &rule),
        Command::OracleDiff { scene, steps, region } => {
            let scene = load_scene(&scene)?;
            let driver = Driver::new(rule, scene.prune);
            oracle_diff(&scene, steps, [region[0], region[1], region[2]], &driver)
        }
        Command::Serve { port } => {
            let runtime = tokio::runtime::Runtime::new().map_err(|e| Failure::Test(e.to_string()))?;
            runtime
                .block_on(qgol::server::serve(port, Driver::new(rule, qgol_core::state::DEFAULT_PRUNE)))
                .map_err(|e| Failure::Test(e.to_string()))
        }
    }
}

fn main() -> ExitCode {
    env_logger::init();
    let cli = Cli::parse();
    match execute(cli) {
        Ok(()) => ExitCode::SUCCESS,
        Err(Failure::Test(m)) => {
            eprintln!("FAIL: {m}");
            ExitCode::from(1)
        }
        Err(Failure::Usage(m)) => {
            eprintln!("error: {m}");
            ExitCode::from(2)
        }
    }
}
