mod config;

use std::fmt::Write as _;
use std::path::{Path, PathBuf};
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand, ValueEnum};

use config::FileConfig;
use schelling_core::dynamics::{default_max_steps, run, Dynamic, RunConfig};
use schelling_core::io::{read_run, write_run};
use schelling_core::probe::probe;
use schelling_core::render::{render_landscape, render_ring};
use schelling_core::structure::{census, run_statistics};
use schelling_core::sweep::{label_outcome, read_csv, run_sweep, SweepConfig, DEFAULT_DELTA};
use schelling_core::thresholds::{classify, lambda, stochastic_stability, ThresholdSet};
use schelling_core::{parse_tolerance, Ring, Scenario, Tolerance};

#[derive(Parser, Debug)]
#[command(name = "schelling", version, about = "Open one-dimensional Schelling ring: simulate, predict and map outcomes")]
struct Cli {
    /// TOML file supplying defaults for any flag.
    #[arg(long, global = true)]
    config: Option<PathBuf>,
    #[command(subcommand)]
    command: Command,
}

#[derive(Args, Debug, Default, Clone)]
struct ScenarioArgs {
    /// Initial density of green nodes.
    #[arg(long)]
    rho: Option<f64>,
    /// Green tolerance as a decimal or fraction (exact).
    #[arg(long)]
    tau_g: Option<String>,
    /// Red tolerance as a decimal or fraction (exact).
    #[arg(long)]
    tau_r: Option<String>,
}

#[derive(Subcommand, Debug)]
enum Command {
    /// Run one simulation.
    Simulate {
        #[command(flatten)]
        scenario: ScenarioArgs,
        /// Neighbourhood radius.
        #[arg(short)]
        w: Option<usize>,
        /// Number of nodes.
        #[arg(short)]
        n: Option<usize>,
        /// selective, incremental, synchronous or perturbed:EPS.
        #[arg(long)]
        dynamic: Option<String>,
        #[arg(long)]
        seed: Option<u64>,
        #[arg(long)]
        max_steps: Option<u64>,
        /// Keep the event log and colourings.
        #[arg(long, value_enum)]
        events: Option<OnOff>,
        /// Check the harmony index at every flip (selective only).
        #[arg(long)]
        monitor: bool,
        #[arg(long)]
        delta: Option<f64>,
        /// Write the run record here.
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Print the tipping thresholds for a density.
    Thresholds {
        #[arg(long)]
        rho: Option<f64>,
    },
    /// Predict the outcome of a scenario.
    Classify {
        #[command(flatten)]
        scenario: ScenarioArgs,
        #[arg(long)]
        dynamic: Option<String>,
        /// Also report stochastic potentials for this radius.
        #[arg(short)]
        w: Option<usize>,
    },
    /// Exact probabilities of local events in the initial configuration.
    Probe {
        #[command(flatten)]
        scenario: ScenarioArgs,
        #[arg(short)]
        w: Option<usize>,
        /// Monte-Carlo samples for a cross-check (0 to skip).
        #[arg(long, default_value_t = 0)]
        samples: u64,
        #[arg(long)]
        seed: Option<u64>,
    },
    /// Monte-Carlo grid over the tolerance square.
    Sweep {
        #[arg(long)]
        rho: Option<f64>,
        #[arg(short)]
        w: Option<usize>,
        #[arg(short)]
        n: Option<usize>,
        #[arg(long)]
        dynamic: Option<String>,
        /// Cells per axis.
        #[arg(long)]
        grid: Option<usize>,
        #[arg(long)]
        reps: Option<usize>,
        #[arg(long)]
        seed: Option<u64>,
        #[arg(long)]
        delta: Option<f64>,
        #[arg(long)]
        max_steps: Option<u64>,
        #[arg(long)]
        threads: Option<usize>,
        /// CSV destination; the summary then goes to stdout. Without it the
        /// CSV goes to stdout.
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// The density where the domination boundary meets (kappa_g, 1/2).
    Lambda,
    /// Write SVG figures.
    Render {
        #[command(subcommand)]
        what: RenderCommand,
    },
}

#[derive(Subcommand, Debug)]
enum RenderCommand {
    /// Outcome map from a sweep CSV.
    Landscape {
        #[arg(long)]
        input: PathBuf,
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Radial history from a run record written by `simulate --out`.
    Ring {
        #[arg(long)]
        input: PathBuf,
        #[arg(long)]
        out: Option<PathBuf>,
    },
}

#[derive(ValueEnum, Debug, Clone, Copy, PartialEq, Eq)]
enum OnOff {
    On,
    Off,
}

enum Failure {
    Usage(String),
    Runtime(String),
}

type Outcome<T> = Result<T, Failure>;

fn usage<E: std::fmt::Display>(e: E) -> Failure {
    Failure::Usage(e.to_string())
}

fn runtime<E: std::fmt::Display>(e: E) -> Failure {
    Failure::Runtime(e.to_string())
}

struct Resolver {
    file: FileConfig,
}

impl Resolver {
    fn need<T>(&self, flag: Option<T>, file: Option<T>, name: &str) -> Outcome<T> {
        flag.or(file).ok_or_else(|| Failure::Usage(format!("missing --{name} (flag or config key)")))
    }

    fn rho(&self, flag: Option<f64>) -> Outcome<f64> {
        let rho = self.need(flag, self.file.rho, "rho")?;
        if !(rho > 0.0 && rho < 1.0) {
            return Err(usage(format!("rho must lie in (0, 1), got {rho}")));
        }
        Ok(rho)
    }

    fn scenario(&self, a: &ScenarioArgs) -> Outcome<Scenario> {
        let rho = self.rho(a.rho)?;
        let tol = |flag: &Option<String>, file: &Option<config::Scalar>, name: &str| -> Outcome<Tolerance> {
            let text = self.need(flag.clone(), file.as_ref().map(|s| s.text()), name)?;
            parse_tolerance(&text).map_err(|e| usage(format!("--{name}: {e}")))
        };
        let g = tol(&a.tau_g, &self.file.tau_g, "tau-g")?;
        let r = tol(&a.tau_r, &self.file.tau_r, "tau-r")?;
        Scenario::new(rho, g, r).map_err(usage)
    }

    fn dynamic(&self, flag: Option<String>) -> Outcome<Dynamic> {
        match flag.or_else(|| self.file.dynamic.clone()) {
            None => Ok(Dynamic::Selective),
            Some(s) => s.parse().map_err(|e| usage(format!("--dynamic: {e}"))),
        }
    }

    fn w(&self, flag: Option<usize>) -> Outcome<usize> {
        let w = self.need(flag, self.file.w, "w")?;
        if w == 0 {
            return Err(usage("w must be at least 1"));
        }
        Ok(w)
    }

    fn n(&self, flag: Option<usize>, w: usize) -> Outcome<usize> {
        let n = self.need(flag, self.file.n, "n")?;
        if 2 * w + 1 > n {
            return Err(usage(format!("need 2w + 1 <= n, got w={w} n={n}")));
        }
        Ok(n)
    }

    fn delta(&self, flag: Option<f64>) -> Outcome<f64> {
        let d = flag.or(self.file.delta).unwrap_or(DEFAULT_DELTA);
        if !(d > 0.0 && d < 0.5) {
            return Err(usage("delta must lie in (0, 1/2)"));
        }
        Ok(d)
    }

    fn max_steps(&self, flag: Option<u64>, n: usize) -> Outcome<u64> {
        let m = flag.or(self.file.max_steps).unwrap_or_else(|| default_max_steps(n));
        if m == 0 {
            return Err(usage("max-steps must be at least 1"));
        }
        Ok(m)
    }

    fn out(&self, flag: Option<PathBuf>) -> Option<PathBuf> {
        flag.or_else(|| self.file.out.clone())
    }
}

fn emit(path: Option<&Path>, text: &str) -> Outcome<()> {
    match path {
        Some(p) => std::fs::write(p, text).map_err(|e| runtime(format!("writing {}: {e}", p.display()))),
        None => {
            print!("{text}");
            Ok(())
        }
    }
}

fn thresholds_text(th: &ThresholdSet) -> String {
    format!(
        "kappa_g: {:.11}\nkappa_r: {:.11}\nmu_g: {:.11}\nmu_r: {:.11}\n",
        th.kappa_g, th.kappa_r, th.mu_g, th.mu_r
    )
}

fn execute(cli: Cli) -> Outcome<()> {
    let file = match &cli.config {
        Some(p) => config::load(p).map_err(usage)?,
        None => FileConfig::default(),
    };
    let r = Resolver { file };
    match cli.command {
        Command::Simulate { scenario, w, n, dynamic, seed, max_steps, events, monitor, delta, out } => {
            let scenario = r.scenario(&scenario)?;
            let dynamic = r.dynamic(dynamic)?;
            let w = r.w(w)?;
            let n = r.n(n, w)?;
            let seed = seed.or(r.file.seed).unwrap_or(0);
            let max_steps = r.max_steps(max_steps, n)?;
            let delta = r.delta(delta)?;
            let events = events.map(|e| e == OnOff::On).or(r.file.events).unwrap_or(true);
            if monitor && dynamic != Dynamic::Selective {
                return Err(usage("--monitor applies to the selective dynamic only"));
            }
            let mut ring = Ring::random(n, w, &scenario, seed).map_err(usage)?;
            let mut rc = RunConfig::new(dynamic, max_steps, seed);
            if !events {
                rc = rc.summary_only();
            }
            if monitor {
                rc = rc.with_monitor();
            }
            let record = run(&mut ring, &rc).map_err(runtime)?;
            let summary = run_statistics(&record);
            let predicted = classify(&scenario, dynamic).map_err(runtime)?;
            let c = census(&ring);
            let mut s = String::new();
            let _ = writeln!(s, "rho: {}\ntau_g: {}\ntau_r: {}", scenario.rho(), scenario.tau_g(), scenario.tau_r());
            let _ = writeln!(s, "w: {w}\nn: {n}\ndynamic: {dynamic}\nseed: {seed}");
            let _ = writeln!(s, "termination: {}\nsteps: {}", record.termination, record.steps_executed);
            let _ = writeln!(s, "initial_green_fraction: {:.6}", summary.initial_green_fraction);
            let _ = writeln!(s, "final_green_fraction: {:.6}", summary.final_green_fraction);
            let _ = writeln!(s, "changed_fraction: {:.6}", summary.changed_fraction);
            if let Dynamic::PerturbedIncremental { .. } = dynamic {
                let _ = writeln!(s, "forced_flips: {}", record.forced_flips);
            }
            let _ = writeln!(s, "outcome: {}", label_outcome(&summary, delta));
            let _ = writeln!(s, "predicted: {}", predicted.prediction);
            let _ = writeln!(s, "final_unhappy: {}", c.unhappy_green + c.unhappy_red);
            let _ = writeln!(s, "final_stable_nodes: green {} red {}", c.stable_green, c.stable_red);
            if monitor {
                let _ = writeln!(s, "harmony: increased at every flip");
            }
            print!("{s}");
            if let Some(p) = r.out(out) {
                emit(Some(&p), &write_run(&record))?;
            }
            Ok(())
        }
        Command::Thresholds { rho } => {
            let rho = r.rho(rho)?;
            let th = ThresholdSet::new(rho).map_err(runtime)?;
            print!("rho: {rho}\n{}", thresholds_text(&th));
            Ok(())
        }
        Command::Classify { scenario, dynamic, w } => {
            let scenario = r.scenario(&scenario)?;
            let dynamic = r.dynamic(dynamic)?;
            let c = classify(&scenario, dynamic).map_err(runtime)?;
            let mut s = String::new();
            let _ = writeln!(s, "rho: {}\ntau_g: {}\ntau_r: {}\ndynamic: {dynamic}", scenario.rho(), scenario.tau_g(), scenario.tau_r());
            let _ = writeln!(s, "prediction: {}\nrule: {}", c.prediction, c.rule);
            if let Dynamic::PerturbedIncremental { .. } = dynamic {
                let _ = writeln!(s, "note: classified as the incremental dynamic");
            }
            s.push_str(&thresholds_text(&c.thresholds));
            let d = c.domination;
            let _ = writeln!(s, "domination: {}\nln_h: {:.12}\nln_target: {:.12}", d.label, d.ln_h, d.ln_target);
            if d.boundary_extended {
                let _ = writeln!(s, "h: continuous extension on tau_g + tau_r = 1");
            }
            if let Some(z) = c.firewall_drift {
                let _ = writeln!(s, "firewall_drift: {z:.6}");
            }
            let w = w.or(r.file.w);
            if let Some(w) = w {
                let st = stochastic_stability(&scenario, w);
                let stable = st.stable.map_or("tie".to_string(), |c| format!("all {c}"));
                let _ = writeln!(s, "potential_all_green: {}\npotential_all_red: {}\nstochastically_stable: {stable}", st.green, st.red);
            }
            print!("{s}");
            Ok(())
        }
        Command::Probe { scenario, w, samples, seed } => {
            let scenario = r.scenario(&scenario)?;
            let w = r.w(w)?;
            let p = probe(&scenario, w).map_err(runtime)?;
            let mut s = String::new();
            let _ = writeln!(s, "rho: {}\ntau_g: {}\ntau_r: {}\nw: {w}", scenario.rho(), scenario.tau_g(), scenario.tau_r());
            for (name, v) in p.entries() {
                let _ = writeln!(s, "{name}: {v:.6e}");
            }
            if samples > 0 {
                let seed = seed.or(r.file.seed).unwrap_or(0);
                let _ = writeln!(s, "monte_carlo_samples: {samples}");
                for e in p.monte_carlo(samples, seed) {
                    let z = if e.std_error > 0.0 { (e.estimate - e.exact) / e.std_error } else { 0.0 };
                    let _ = writeln!(s, "mc {}: {:.6e} (z = {z:.2})", e.name, e.estimate);
                }
            }
            print!("{s}");
            Ok(())
        }
        Command::Sweep { rho, w, n, dynamic, grid, reps, seed, delta, max_steps, threads, out } => {
            let rho = r.rho(rho)?;
            let dynamic = r.dynamic(dynamic)?;
            let w = r.w(w)?;
            let n = r.n(n, w)?;
            let grid = grid.or(r.file.grid).unwrap_or(32);
            let reps = reps.or(r.file.reps).unwrap_or(3);
            let seed = seed.or(r.file.seed).unwrap_or(0);
            let mut c = SweepConfig::new(rho, w, n, dynamic, grid, reps, seed);
            c.delta = r.delta(delta)?;
            c.max_steps = Some(r.max_steps(max_steps, n)?);
            c.threads = threads.or(r.file.threads);
            c.validate().map_err(usage)?;
            let result = run_sweep(&c).map_err(runtime)?;
            match r.out(out) {
                Some(p) => {
                    emit(Some(&p), &result.to_csv_string())?;
                    print!("{}", result.summary_text());
                }
                None => print!("{}", result.to_csv_string()),
            }
            Ok(())
        }
        Command::Lambda => {
            let l = lambda().map_err(runtime)?;
            println!("lambda: {:.10}", l.lambda);
            println!("kappa_g: {:.10}", l.kappa_g);
            println!("kappa_r: {:.10}", l.kappa_r);
            println!("residual: {:.3e}", l.residual);
            println!("dual_residual: {:.6e}", l.dual_residual);
            Ok(())
        }
        Command::Render { what } => match what {
            RenderCommand::Landscape { input, out } => {
                let f = std::fs::File::open(&input).map_err(|e| runtime(format!("opening {}: {e}", input.display())))?;
                let csv = read_csv(f).map_err(runtime)?;
                emit(out.as_deref(), &render_landscape(&csv).map_err(runtime)?)
            }
            RenderCommand::Ring { input, out } => {
                let text = std::fs::read_to_string(&input).map_err(|e| runtime(format!("reading {}: {e}", input.display())))?;
                let record = read_run(&text).map_err(runtime)?;
                emit(out.as_deref(), &render_ring(&record).map_err(runtime)?)
            }
        },
    }
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
    match execute(cli) {
        Ok(()) => ExitCode::SUCCESS,
        Err(Failure::Usage(m)) => {
            eprintln!("error: {m}");
            ExitCode::from(1)
        }
        Err(Failure::Runtime(m)) => {
            eprintln!("error: {m}");
            ExitCode::from(2)
        }
    }
}
