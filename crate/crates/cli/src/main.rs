use std::fs::File;
use std::io::BufWriter;
use std::path::{Path, PathBuf};
use std::process::ExitCode;

use aerosim_core::config::{self, PRESETS};
use aerosim_core::engagement::{
    error_vs_navigation_sweep, plan_engagement, probability_vs_speed_sweep, simulate_engagement,
    simulate_vehicle_run,
};
use aerosim_core::interceptor::{calibrate_thrust, KillTable};
use aerosim_core::report;
use aerosim_core::{monte_carlo_batch, run_stream, InterceptorType, Scenario};
use anyhow::{bail, Context, Result};
use clap::{Args, Parser, Subcommand, ValueEnum};
use serde::Serialize;

mod manifest;

use manifest::RunManifest;

/// Ranges of the landing-error sweep, m.
const SWEEP_RANGES: [f64; 6] = [615e3, 675e3, 800e3, 950e3, 1000e3, 1100e3];
const SWEEP_SPEEDS: [f64; 5] = [1200.0, 1400.0, 1600.0, 1800.0, 2000.0];

#[derive(Parser)]
#[command(
    name = "aerosim",
    version,
    about = "Re-entry vehicle and interceptor simulation"
)]
struct Cli {
    #[command(flatten)]
    common: Common,
    #[command(subcommand)]
    command: Command,
}

#[derive(Args)]
struct Common {
    /// Scenario TOML file; missing keys take defaults.
    #[arg(long, global = true, env = "AEROSIM_SCENARIO")]
    scenario: Option<PathBuf>,
    /// Shipped scenario by name instead of a file.
    #[arg(
        long,
        global = true,
        env = "AEROSIM_PRESET",
        conflicts_with = "scenario"
    )]
    preset: Option<String>,
    /// Batch seed, overriding the scenario.
    #[arg(long, global = true, env = "AEROSIM_SEED")]
    seed: Option<u64>,
    /// Output directory.
    #[arg(long, global = true, env = "AEROSIM_OUT", default_value = "out")]
    out: PathBuf,
    /// Runs per batch, overriding the scenario.
    #[arg(long, global = true, env = "AEROSIM_N")]
    n: Option<usize>,
    /// Integration step in seconds, overriding the scenario.
    #[arg(long, global = true, env = "AEROSIM_DT")]
    dt: Option<f64>,
}

#[derive(Subcommand)]
enum Command {
    /// Noise-free vehicle flight to touchdown.
    Fly,
    /// One engagement of the vehicle by every configured site.
    Engage,
    /// Monte Carlo batch of engagements.
    Batch,
    /// Batch per row over target range or vehicle speed.
    Sweep {
        kind: SweepKind,
        /// Target ranges in m for the error sweep, comma separated.
        #[arg(long, value_delimiter = ',')]
        ranges: Option<Vec<f64>>,
        /// Vehicle speeds in m/s for the speed sweep, comma separated.
        #[arg(long, value_delimiter = ',')]
        speeds: Option<Vec<f64>>,
    },
    /// Fit an interceptor's thrust to its reference peak speed.
    Calibrate {
        #[arg(value_parser = parse_kind)]
        kind: InterceptorType,
        /// Peak speed to reach, m/s; defaults to the type's reference peak.
        #[arg(long)]
        target: Option<f64>,
    },
    /// Print the resolved scenario as TOML.
    Defaults {
        /// Also print both kill tables.
        #[arg(long)]
        tables: bool,
        /// List the shipped presets and exit.
        #[arg(long)]
        list: bool,
    },
}

#[derive(Clone, Copy, ValueEnum)]
enum SweepKind {
    /// Landing error against navigation time over target ranges.
    Error,
    /// Interception probability against vehicle speed.
    Speed,
}

fn parse_kind(s: &str) -> std::result::Result<InterceptorType, String> {
    s.parse().map_err(|e| format!("{e}"))
}

impl Common {
    fn load(&self, fallback_preset: Option<&str>) -> Result<Scenario> {
        let mut s = match (&self.scenario, &self.preset) {
            (Some(path), _) => config::parse_scenario(path)
                .with_context(|| format!("loading {}", path.display()))?,
            (None, Some(name)) => config::preset(name)?,
            (None, None) => match fallback_preset {
                Some(name) => config::preset(name)?,
                None => Scenario::default(),
            },
        };
        if let Some(seed) = self.seed {
            s.batch.seed = seed;
        }
        if let Some(n) = self.n {
            s.batch.runs = n;
        }
        if let Some(dt) = self.dt {
            s.batch.dt = dt;
        }
        s.validate()?;
        Ok(s)
    }

    fn out_dir(&self) -> Result<&Path> {
        std::fs::create_dir_all(&self.out)
            .with_context(|| format!("creating {}", self.out.display()))?;
        Ok(&self.out)
    }
}

fn create(dir: &Path, name: &str) -> Result<BufWriter<File>> {
    let path = dir.join(name);
    let f = File::create(&path).with_context(|| format!("creating {}", path.display()))?;
    Ok(BufWriter::new(f))
}

fn finish(dir: &Path, manifest: RunManifest) -> Result<()> {
    manifest.write(dir)?;
    println!(
        "wrote {} and {}",
        manifest.outputs.join(", "),
        manifest::FILE_NAME
    );
    Ok(())
}

fn cmd_fly(common: &Common) -> Result<()> {
    let scenario = common.load(None)?.noise_free();
    let dir = common.out_dir()?;
    let run = simulate_vehicle_run(&scenario, &mut run_stream(scenario.batch.seed, 0), 0)?;
    report::write_vehicle_csv(create(dir, "trajectory.csv")?, &run.samples)?;
    let r = &run.result;
    println!(
        "touchdown t = {:.2} s, X = {:.1} m, error = {:.2} m, T_nav = {:.2} s",
        r.flight_time, r.touchdown_x, r.landing_error, r.nav_time
    );
    finish(
        dir,
        RunManifest::new("fly", &scenario, vec!["trajectory.csv".into()]),
    )
}

fn cmd_engage(common: &Common) -> Result<()> {
    let scenario = common.load(None)?;
    let dir = common.out_dir()?;
    let plan = plan_engagement(&scenario)?;
    let mut rng = run_stream(scenario.batch.seed, 0);
    let run = simulate_engagement(&scenario, &plan, &mut rng, 0, true)?;
    let mut outputs = vec!["vehicle.csv".to_string()];
    report::write_vehicle_csv(create(dir, "vehicle.csv")?, &run.vehicle)?;
    for trace in &run.interceptors {
        let index = scenario
            .interceptors
            .sites
            .iter()
            .position(|s| *s == trace.site)
            .unwrap_or(0);
        let name = format!("interceptor_{index}_{}.csv", trace.site.kind.name());
        report::write_interceptor_csv(create(dir, &name)?, trace)?;
        outputs.push(name);
    }
    let r = &run.result;
    println!(
        "touchdown error = {:.2} m, launches = {}, intercepted = {}, miss = {:.3} m",
        r.landing_error,
        r.launches.len(),
        r.intercepted,
        r.miss_distance
    );
    finish(dir, RunManifest::new("engage", &scenario, outputs))
}

fn cmd_batch(common: &Common) -> Result<()> {
    let scenario = common.load(None)?;
    let dir = common.out_dir()?;
    let batch = monte_carlo_batch(&scenario)?;
    report::write_batch_csv(create(dir, "batch.csv")?, &batch)?;
    let s = &batch.stats;
    println!(
        "runs = {}, failed = {}, max error = {:.2} m, CEP = {:.2} m, p = {:.4} +/- {:.4}",
        s.n, s.failed, s.max_error, s.cep, s.p_hat, s.p_se
    );
    finish(
        dir,
        RunManifest::new("batch", &scenario, vec!["batch.csv".into()]),
    )
}

fn cmd_sweep(
    common: &Common,
    kind: SweepKind,
    ranges: Option<Vec<f64>>,
    speeds: Option<Vec<f64>>,
) -> Result<()> {
    match kind {
        SweepKind::Error => {
            let scenario = common.load(Some("calibration"))?;
            let dir = common.out_dir()?;
            let ranges = ranges.unwrap_or_else(|| SWEEP_RANGES.to_vec());
            let rows = error_vs_navigation_sweep(&scenario, &ranges)?;
            report::write_navigation_sweep_csv(create(dir, "sweep_error.csv")?, &rows)?;
            for r in &rows {
                println!(
                    "X = {:>9.0} m  T_nav = {:6.2} s  max error = {:7.2} m",
                    r.x, r.mean_nav_time, r.max_error
                );
            }
            finish(
                dir,
                RunManifest::new("sweep error", &scenario, vec!["sweep_error.csv".into()]),
            )
        }
        SweepKind::Speed => {
            let scenario = common.load(Some("speed"))?;
            let dir = common.out_dir()?;
            let speeds = speeds.unwrap_or_else(|| SWEEP_SPEEDS.to_vec());
            let rows = probability_vs_speed_sweep(&scenario, &speeds)?;
            report::write_speed_sweep_csv(create(dir, "sweep_speed.csv")?, &rows)?;
            for r in &rows {
                println!(
                    "V = {:6.0} m/s  P1 = {:.3} +/- {:.3}  P2 = {:.3} +/- {:.3}",
                    r.v, r.p1, r.p1_se, r.p2, r.p2_se
                );
            }
            finish(
                dir,
                RunManifest::new("sweep speed", &scenario, vec!["sweep_speed.csv".into()]),
            )
        }
    }
}

#[derive(Serialize)]
struct CalibrationReport {
    kind: InterceptorType,
    target_peak: f64,
    scale: f64,
    peak_speed: f64,
    peak_time: f64,
    iterations: usize,
    thrust: Vec<f64>,
}

fn cmd_calibrate(common: &Common, kind: InterceptorType, target: Option<f64>) -> Result<()> {
    let scenario = common.load(None)?;
    let spec = scenario.interceptors.spec(kind);
    let target = target.unwrap_or_else(|| spec.reference_peak_speed());
    if !(target > 0.0 && target.is_finite()) {
        bail!("--target must be a positive speed");
    }
    let env = scenario.atmosphere.model();
    let (fitted, cal) = calibrate_thrust(spec, &env, target, scenario.atmosphere.g)?;
    println!(
        "{}: thrust scale = {:.6}, peak V = {:.2} m/s at t = {:.2} s ({} iterations)",
        kind.name(),
        cal.scale,
        cal.peak_speed,
        cal.peak_time,
        cal.iterations
    );
    for (i, st) in fitted.stages.iter().enumerate() {
        println!("  stage {i}: {:.1} N for {:.1} s", st.thrust, st.duration);
    }
    let dir = common.out_dir()?;
    let name = format!("calibration_{}.json", kind.name());
    let report = CalibrationReport {
        kind,
        target_peak: target,
        scale: cal.scale,
        peak_speed: cal.peak_speed,
        peak_time: cal.peak_time,
        iterations: cal.iterations,
        thrust: fitted.stages.iter().map(|s| s.thrust).collect(),
    };
    let mut w = create(dir, &name)?;
    serde_json::to_writer_pretty(&mut w, &report)?;
    std::io::Write::write_all(&mut w, b"\n")?;
    finish(
        dir,
        RunManifest::new(&format!("calibrate {}", kind.name()), &scenario, vec![name]),
    )
}

#[derive(Serialize)]
struct Tables {
    kill_table: Vec<KillTable>,
}

fn cmd_defaults(common: &Common, tables: bool, list: bool) -> Result<()> {
    if list {
        for (name, _) in PRESETS {
            println!("{name}");
        }
        return Ok(());
    }
    let scenario = common.load(None)?;
    print!("{}", config::dump_scenario(&scenario)?);
    if tables {
        let t = Tables {
            kill_table: vec![
                KillTable::for_type(InterceptorType::Type1),
                KillTable::for_type(InterceptorType::Type2),
            ],
        };
        println!();
        print!("{}", toml::to_string_pretty(&t)?);
    }
    Ok(())
}

fn run(cli: Cli) -> Result<()> {
    let common = &cli.common;
    match cli.command {
        Command::Fly => cmd_fly(common),
        Command::Engage => cmd_engage(common),
        Command::Batch => cmd_batch(common),
        Command::Sweep {
            kind,
            ranges,
            speeds,
        } => cmd_sweep(common, kind, ranges, speeds),
        Command::Calibrate { kind, target } => cmd_calibrate(common, kind, target),
        Command::Defaults { tables, list } => cmd_defaults(common, tables, list),
    }
}

fn main() -> ExitCode {
    match run(Cli::parse()) {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("error: {e:#}");
            ExitCode::FAILURE
        }
    }
}
