use anyhow::Context;
use clap::{Args, Parser, Subcommand};
use morphsim_core::harness::{
    compare, compute_metrics, read_csv, render_table, run, run_pair, write_csv, ConfigError, FinsChoice, NavMode,
    RunEnd, RunOptions, RunReport, Scenario, SimConfig,
};
use std::fs::File;
use std::io::{BufReader, BufWriter};
use std::path::{Path, PathBuf};
use std::process::ExitCode;

#[derive(Parser)]
#[command(name = "morphsim", version, about = "Morphing-fin AUV simulator")]
struct Cli {
    #[command(subcommand)]
    cmd: Cmd,
}

#[derive(Args, Clone)]
struct RunArgs {
    /// Scenario file, or builtin:<name>.
    #[arg(long, default_value = "builtin:zigzag")]
    scenario: String,
    #[arg(long, default_value = "auto", value_parser = parse_fins)]
    fins: FinsChoice,
    #[arg(long)]
    seed: Option<u64>,
    #[arg(long, default_value = "out")]
    out: PathBuf,
    #[arg(long, value_parser = parse_nav)]
    nav: Option<NavMode>,
}

#[derive(Subcommand)]
enum Cmd {
    /// Run one scenario, writing telemetry.csv and metrics.json.
    Run(RunArgs),
    /// Run a scenario with fins on and off, or compare two saved metrics files.
    Compare {
        #[command(flatten)]
        run: RunArgs,
        /// Two metrics.json files to compare instead of running (fins-on first).
        #[arg(long, num_args = 2, value_names = ["FIN", "NOFIN"])]
        reports: Option<Vec<PathBuf>>,
    },
    /// Search the plant and appendage coefficients toward the turn targets.
    Calibrate {
        #[arg(long, default_value = "out")]
        out: PathBuf,
        /// Pattern-search iterations.
        #[arg(long, default_value_t = 40)]
        iterations: usize,
    },
    /// Recompute metrics from an existing telemetry CSV.
    Analyze {
        csv: PathBuf,
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Run the gateway servers only, for external payload and navigation clients.
    Serve {
        #[arg(long, default_value = "127.0.0.1")]
        host: String,
        #[arg(long, default_value_t = morphsim_core::gateway::DEFAULT_NAV_PORT)]
        nav_port: u16,
        #[arg(long, default_value_t = morphsim_core::gateway::DEFAULT_PAYLOAD_PORT)]
        payload_port: u16,
    },
}

fn parse_fins(s: &str) -> Result<FinsChoice, String> {
    s.parse()
}

fn parse_nav(s: &str) -> Result<NavMode, String> {
    s.parse()
}

/// Exit status classes.
enum Failure {
    Config(anyhow::Error),
    Runtime(anyhow::Error),
    Safety(String),
}

impl From<ConfigError> for Failure {
    fn from(e: ConfigError) -> Self {
        Failure::Config(e.into())
    }
}

fn runtime<E: Into<anyhow::Error>>(e: E) -> Failure {
    Failure::Runtime(e.into())
}

fn load(a: &RunArgs) -> Result<Scenario, Failure> {
    let mut s = Scenario::load(&a.scenario)?.with_fins(a.fins);
    if let Some(seed) = a.seed {
        s.seed = seed;
    }
    if let Some(nav) = a.nav {
        s.nav = nav;
    }
    s.config.self_check()?;
    Ok(s)
}

fn write_json<T: serde::Serialize>(path: &Path, v: &T) -> Result<(), Failure> {
    let f = File::create(path).with_context(|| path.display().to_string()).map_err(Failure::Runtime)?;
    serde_json::to_writer_pretty(BufWriter::new(f), v).map_err(runtime)
}

fn write_run(dir: &Path, rows: &[morphsim_core::harness::TelemetryRow], report: &RunReport) -> Result<(), Failure> {
    std::fs::create_dir_all(dir).with_context(|| dir.display().to_string()).map_err(Failure::Runtime)?;
    let csv = dir.join("telemetry.csv");
    let f = File::create(&csv).with_context(|| csv.display().to_string()).map_err(Failure::Runtime)?;
    write_csv(BufWriter::new(f), rows).map_err(runtime)?;
    write_json(&dir.join("metrics.json"), report)
}

fn check_end(end: &RunEnd) -> Result<(), Failure> {
    match end {
        RunEnd::Completed => Ok(()),
        RunEnd::Safety(r) => Err(Failure::Safety(format!("safety envelope violated: {}", r.as_str()))),
        RunEnd::Aborted(m) => Err(Failure::Runtime(anyhow::anyhow!("run aborted: {m}"))),
    }
}

fn execute(cli: Cli) -> Result<(), Failure> {
    match cli.cmd {
        Cmd::Run(a) => {
            let s = load(&a)?;
            let r = run(&s, RunOptions::default())?;
            let report = RunReport::new(&s, &r);
            write_run(&a.out, &r.rows, &report)?;
            log::info!("{} ticks written to {}", r.rows.len(), a.out.display());
            check_end(&r.end)
        }
        Cmd::Compare { run, reports: Some(paths) } => {
            let read = |p: &Path| -> Result<RunReport, Failure> {
                let f = File::open(p).with_context(|| p.display().to_string()).map_err(Failure::Config)?;
                serde_json::from_reader(BufReader::new(f))
                    .with_context(|| p.display().to_string())
                    .map_err(Failure::Config)
            };
            let c = compare(&read(&paths[0])?, &read(&paths[1])?).map_err(|e| Failure::Config(e.into()))?;
            std::fs::create_dir_all(&run.out).map_err(runtime)?;
            write_json(&run.out.join("comparison.json"), &c)?;
            print!("{}", render_table(&c));
            Ok(())
        }
        Cmd::Compare { run, reports: None } => {
            let s = load(&run)?;
            let pair = run_pair(&s).map_err(runtime)?;
            write_run(&run.out.join("fins_on"), &pair.fin.1.rows, &pair.fin.0)?;
            write_run(&run.out.join("fins_off"), &pair.nofin.1.rows, &pair.nofin.0)?;
            write_json(&run.out.join("comparison.json"), &pair.comparison)?;
            print!("{}", render_table(&pair.comparison));
            check_end(&pair.fin.1.end)?;
            check_end(&pair.nofin.1.end)
        }
        Cmd::Calibrate { out, iterations } => {
            let cal = morphsim_core::harness::calibrate::calibrate(iterations).map_err(runtime)?;
            std::fs::create_dir_all(&out).map_err(runtime)?;
            let conf = out.join("calibrated.conf");
            let a = &cal.achieved;
            let fmt = |v: Option<f64>| v.map_or("-".to_string(), |v| format!("{v:.3}"));
            let header = format!(
                "# Default vehicle, environment and controller configuration.\n\
                 # Angles are in degrees where the key ends in _deg; everything else is SI.\n\
                 # Produced by `morphsim calibrate` on the builtin zig-zag pair with truth feedback:\n\
                 # radius without fins {} m, with fins {} m, peak yaw rate with fins {} deg/s, improvement {} %,\n\
                 # analytic fin to rudder-only yaw-rate ratio {}.\n\n",
                fmt(a.radius_nofin),
                fmt(a.radius_fin),
                fmt(a.peak_rate_fin),
                fmt(a.improvement_pct),
                fmt(a.analytic_rate_ratio)
            );
            std::fs::write(&conf, header + &cal.config.render()).map_err(runtime)?;
            write_json(&out.join("calibration.json"), &cal.achieved)?;
            println!("{}", serde_json::to_string_pretty(&cal.achieved).map_err(runtime)?);
            println!("config written to {}", conf.display());
            Ok(())
        }
        Cmd::Analyze { csv, out } => {
            let f = File::open(&csv).with_context(|| csv.display().to_string()).map_err(Failure::Config)?;
            let rows = read_csv(BufReader::new(f)).map_err(|e| Failure::Config(e.into()))?;
            let m = compute_metrics(&rows);
            match out {
                Some(p) => write_json(&p, &m),
                None => {
                    println!("{}", serde_json::to_string_pretty(&m).map_err(runtime)?);
                    Ok(())
                }
            }
        }
        Cmd::Serve { host, nav_port, payload_port } => {
            let g = morphsim_core::harness::serve::Gateways::start(&host, nav_port, payload_port, &SimConfig::builtin())
                .map_err(runtime)?;
            let (n, p) = g.addrs();
            log::info!("navigation gateway on {n}, payload gateway on {p}");
            loop {
                std::thread::park();
            }
        }
    }
}

fn main() -> ExitCode {
    env_logger::Builder::from_env(env_logger::Env::default().default_filter_or("info")).init();
    match execute(Cli::parse()) {
        Ok(()) => ExitCode::SUCCESS,
        Err(Failure::Config(e)) => {
            eprintln!("config error: {e:#}");
            ExitCode::from(2)
        }
        Err(Failure::Runtime(e)) => {
            eprintln!("error: {e:#}");
            ExitCode::from(3)
        }
        Err(Failure::Safety(m)) => {
            eprintln!("{m}");
            ExitCode::from(4)
        }
    }
}
