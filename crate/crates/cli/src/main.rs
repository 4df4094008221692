//! `qcarnot`: batch front end for the cycle engine.
//!
//! Exit codes: 0 success, 1 computation error, 2 configuration error.

mod output;

use std::io::Write;
use std::path::{Path, PathBuf};
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand, ValueEnum};
use qcarnot::config::{ResolvedConfig, RunConfig, SweepConfig};
use qcarnot::cycle::run_to_limit_cycle;
use qcarnot::protocols::{
    build_constant_mu_protocol, build_sta_protocol, build_ste_nonthermal_protocol,
    build_ste_protocol, write_protocol_csv,
};
use qcarnot::thermo::{
    analyze_cycle, evaluate_cycle, sweep, write_comparison_csv, write_sweep_csv,
};
use qcarnot::{BathSpec, Error, FrequencyProtocol, Result};

use output::Staged;

#[derive(Parser)]
#[command(
    name = "qcarnot",
    version,
    about = "Finite-time quantum Carnot-analog engines"
)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Build a single stroke protocol and print it as CSV.
    Protocol(ProtocolArgs),
    /// Run one cycle to its limit cycle and export trajectories and ledger.
    Cycle(RunArgs),
    /// Evaluate a cycle over a list of axis values.
    Sweep(RunArgs),
    /// Evaluate several configurations and join their ledgers.
    Compare(CompareArgs),
    /// Check a configuration without running it.
    Validate(ConfigArgs),
}

#[derive(Clone, Copy, ValueEnum)]
enum ProtocolKind {
    Sta,
    Ste,
    Constmu,
    Constant,
}

#[derive(Args)]
struct ProtocolArgs {
    kind: ProtocolKind,
    omega_initial: f64,
    omega_final: f64,
    /// Stroke duration (atomic units); not used by constmu.
    t_f: Option<f64>,
    #[arg(long, allow_hyphen_values = true)]
    mu: Option<f64>,
    /// Bath temperature for ste.
    #[arg(long)]
    temperature: Option<f64>,
    /// Internal (Gibbs) temperature for a non-thermal ste.
    #[arg(long)]
    internal_temperature: Option<f64>,
    #[arg(long, default_value_t = 0.05)]
    coupling: f64,
    /// Samples for closed-form protocols.
    #[arg(long, default_value_t = 2001)]
    samples: usize,
    /// Output file (standard output when absent).
    #[arg(long)]
    out: Option<PathBuf>,
}

#[derive(Args)]
struct ConfigArgs {
    /// Embedded preset: carnot-shortcut, endo-shortcut, endo-global, table1-literal, eq6-consistent.
    #[arg(long, conflicts_with = "config")]
    preset: Option<String>,
    /// TOML or JSON configuration file.
    #[arg(long)]
    config: Option<PathBuf>,
    /// Limit-cycle convergence tolerance.
    #[arg(long)]
    tol: Option<f64>,
    /// Cycle time in units of 2π/ω_min.
    #[arg(long)]
    cycle_time: Option<f64>,
}

#[derive(Args)]
struct RunArgs {
    #[command(flatten)]
    config: ConfigArgs,
    /// Output directory; defaults to $QCARNOT_OUT/<name> or ./qcarnot-out/<name>.
    #[arg(long)]
    out: Option<PathBuf>,
    /// Sweep axis: cycle_time, dephasing or compression_ratio.
    #[arg(long)]
    axis: Option<String>,
    /// Comma-separated axis values.
    #[arg(long, value_delimiter = ',', allow_hyphen_values = true)]
    values: Option<Vec<f64>>,
    /// Worker threads for sweeps (all cores by default).
    #[arg(long)]
    jobs: Option<usize>,
}

#[derive(Args)]
struct CompareArgs {
    /// Presets to compare; defaults to the three cycle kinds.
    #[arg(long, value_delimiter = ',')]
    preset: Vec<String>,
    #[arg(long)]
    config: Vec<PathBuf>,
    #[arg(long)]
    tol: Option<f64>,
    #[arg(long)]
    cycle_time: Option<f64>,
    #[arg(long)]
    out: Option<PathBuf>,
    #[arg(long)]
    jobs: Option<usize>,
}

fn main() -> ExitCode {
    env_logger::Builder::from_env(env_logger::Env::default().default_filter_or("warn")).init();
    let cli = Cli::parse();
    let result = match cli.command {
        Command::Protocol(a) => protocol(a),
        Command::Cycle(a) => cycle(a),
        Command::Sweep(a) => run_sweep(a),
        Command::Compare(a) => compare(a),
        Command::Validate(a) => validate(a),
    };
    match result {
        Ok(code) => code,
        Err(e) => {
            eprintln!("error: {}: {e}", e.name());
            if e.is_config() {
                ExitCode::from(2)
            } else {
                ExitCode::from(1)
            }
        }
    }
}

fn load(args: &ConfigArgs) -> Result<RunConfig> {
    let mut cfg = match (&args.preset, &args.config) {
        (Some(p), None) => RunConfig::from_preset(p),
        (None, Some(path)) => RunConfig::load(path)?,
        (None, None) => return Err(Error::Config("give --preset or --config".into())),
        (Some(_), Some(_)) => unreachable!("clap rejects both"),
    };
    if let Some(t) = args.tol {
        cfg.tolerances.cycle = Some(t);
    }
    if let Some(t) = args.cycle_time {
        cfg.cycle.cycle_time = Some(t);
    }
    Ok(cfg)
}

fn output_dir(explicit: Option<&Path>, configured: Option<&Path>, name: &str) -> PathBuf {
    if let Some(p) = explicit.or(configured) {
        return p.to_path_buf();
    }
    let root = std::env::var_os("QCARNOT_OUT")
        .map(PathBuf::from)
        .unwrap_or_else(|| "qcarnot-out".into());
    root.join(name)
}

fn warn_all(cfg: &ResolvedConfig) {
    for w in &cfg.warnings {
        eprintln!("warning: {w}");
    }
}

fn protocol(a: ProtocolArgs) -> Result<ExitCode> {
    let need_tf = || {
        a.t_f
            .ok_or_else(|| Error::Config("this protocol needs a duration t_f".into()))
    };
    let p: FrequencyProtocol = match a.kind {
        ProtocolKind::Sta => build_sta_protocol(a.omega_initial, a.omega_final, need_tf()?)?.0,
        ProtocolKind::Ste => {
            let t = a
                .temperature
                .ok_or_else(|| Error::Config("ste needs --temperature".into()))?;
            let bath = BathSpec::new(t, a.coupling)?;
            match a.internal_temperature {
                Some(ti) => {
                    build_ste_nonthermal_protocol(
                        a.omega_initial,
                        a.omega_final,
                        need_tf()?,
                        ti,
                        bath,
                    )?
                    .0
                }
                None => build_ste_protocol(a.omega_initial, a.omega_final, need_tf()?, bath)?.0,
            }
        }
        ProtocolKind::Constmu => {
            let mu =
                a.mu.ok_or_else(|| Error::Config("constmu needs --mu".into()))?;
            build_constant_mu_protocol(a.omega_initial, a.omega_final, mu)?
        }
        ProtocolKind::Constant => {
            if a.omega_initial != a.omega_final {
                return Err(Error::Config(
                    "constant protocol needs omega_initial = omega_final".into(),
                ));
            }
            FrequencyProtocol::constant(a.omega_initial, need_tf()?)?
        }
    };
    let mut buf = Vec::new();
    write_protocol_csv(&p, a.samples, &mut buf)?;
    match a.out {
        Some(path) => write_file_atomic(&path, &buf)?,
        None => std::io::stdout().write_all(&buf)?,
    }
    Ok(ExitCode::SUCCESS)
}

fn write_file_atomic(path: &Path, bytes: &[u8]) -> Result<()> {
    let mut tmp = path.as_os_str().to_os_string();
    tmp.push(".partial");
    std::fs::write(&tmp, bytes)?;
    std::fs::rename(&tmp, path)?;
    Ok(())
}

fn cycle(a: RunArgs) -> Result<ExitCode> {
    let cfg = load(&a.config)?.resolve()?;
    warn_all(&cfg);
    let options = cfg.limit_cycle_options();
    let v0 = cfg.spec.initial_state()?;
    let result = run_to_limit_cycle(&cfg.spec, &v0, &options)?;
    let ledger = analyze_cycle(&result)?;
    let out = output_dir(a.out.as_deref(), cfg.output.as_deref(), &cfg.name);
    let mut stage = Staged::new(&out)?;
    let written = result.export(stage.dir())?;
    stage.record(&written);
    stage.write(
        "ledger.json",
        (serde_json::to_string_pretty(&ledger)? + "\n").as_bytes(),
    )?;
    let dir = stage.commit("cycle", &[&cfg])?;
    println!(
        "{}: {} after {} cycles, W = {:.6e}, P = {:.6e}, eta/eta_C = {:.4}",
        cfg.name,
        ledger.operational_mode.name(),
        ledger.iterations,
        ledger.total_work,
        ledger.power,
        ledger.efficiency / ledger.carnot_efficiency
    );
    println!("wrote {}", dir.display());
    Ok(ExitCode::SUCCESS)
}

fn run_sweep(a: RunArgs) -> Result<ExitCode> {
    let mut raw = load(&a.config)?;
    match (a.axis, a.values) {
        (Some(axis), Some(values)) => raw.sweep = Some(SweepConfig { axis, values }),
        (None, None) => {}
        _ => return Err(Error::Config("--axis and --values go together".into())),
    }
    let cfg = raw.resolve()?;
    warn_all(&cfg);
    let (axis, values) = cfg.sweep.clone().ok_or_else(|| {
        Error::Config("no sweep given (use --axis/--values or a [sweep] table)".into())
    })?;
    if a.jobs == Some(0) {
        return Err(Error::Config("--jobs must be at least 1".into()));
    }
    let rows = sweep(&cfg.spec, axis, &values, &cfg.limit_cycle_options(), a.jobs)?;
    let out = output_dir(
        a.out.as_deref(),
        cfg.output.as_deref(),
        &format!("{}-{}", cfg.name, axis.name()),
    );
    let mut stage = Staged::new(&out)?;
    let mut buf = Vec::new();
    write_sweep_csv(axis, &rows, &mut buf)?;
    stage.write("sweep.csv", &buf)?;
    let meta = serde_json::json!({
        "template": cfg.spec,
        "axis": axis.name(),
        "values": values,
        "content_hash": cfg.content_hash(),
        "errors": rows.iter().filter_map(|r| r.error.as_ref().map(|e| serde_json::json!({"value": r.value, "error": e}))).collect::<Vec<_>>(),
    });
    stage.write(
        "sweep.json",
        (serde_json::to_string_pretty(&meta)? + "\n").as_bytes(),
    )?;
    let dir = stage.commit("sweep", &[&cfg])?;
    let failed = rows.iter().filter(|r| r.ledger.is_none()).count();
    println!(
        "{} rows ({failed} failed), wrote {}",
        rows.len(),
        dir.display()
    );
    for r in rows.iter().filter(|r| r.error.is_some()) {
        eprintln!(
            "{} = {}: {}",
            axis.name(),
            r.value,
            r.error.as_deref().unwrap_or("")
        );
    }
    Ok(if failed == 0 {
        ExitCode::SUCCESS
    } else {
        ExitCode::from(1)
    })
}

fn compare(a: CompareArgs) -> Result<ExitCode> {
    let mut raws: Vec<RunConfig> = a.preset.iter().map(|p| RunConfig::from_preset(p)).collect();
    for path in &a.config {
        raws.push(RunConfig::load(path)?);
    }
    if raws.is_empty() {
        raws = ["carnot-shortcut", "endo-shortcut", "endo-global"]
            .iter()
            .map(|p| RunConfig::from_preset(p))
            .collect();
    }
    let mut cfgs = Vec::new();
    for mut r in raws {
        if let Some(t) = a.tol {
            r.tolerances.cycle = Some(t);
        }
        if let Some(t) = a.cycle_time {
            r.cycle.cycle_time = Some(t);
        }
        let c = r.resolve()?;
        warn_all(&c);
        cfgs.push(c);
    }
    let pool = rayon::ThreadPoolBuilder::new()
        .num_threads(a.jobs.unwrap_or(0))
        .build()
        .map_err(|e| Error::Config(format!("cannot start worker pool: {e}")))?;
    let ledgers: Vec<Result<_>> = pool.install(|| {
        use rayon::prelude::*;
        cfgs.par_iter()
            .map(|c| evaluate_cycle(&c.spec, &c.limit_cycle_options()).map(|(_, l)| l))
            .collect()
    });
    let mut rows = Vec::new();
    for (c, l) in cfgs.iter().zip(ledgers) {
        rows.push((
            c.name.clone(),
            l.map_err(|e| Error::Stroke {
                stroke: c.name.clone(),
                source: Box::new(e),
            })?,
        ));
    }
    let out = output_dir(a.out.as_deref(), None, "compare");
    let mut stage = Staged::new(&out)?;
    let mut buf = Vec::new();
    write_comparison_csv(&rows, &mut buf)?;
    stage.write("compare.csv", &buf)?;
    let refs: Vec<&ResolvedConfig> = cfgs.iter().collect();
    let dir = stage.commit("compare", &refs)?;
    for (name, l) in &rows {
        println!(
            "{name:>16}: P = {:.6e}, eta/eta_C = {:.4}, {}",
            l.power,
            l.efficiency / l.carnot_efficiency,
            l.operational_mode.name()
        );
    }
    println!("wrote {}", dir.display());
    Ok(ExitCode::SUCCESS)
}

fn validate(a: ConfigArgs) -> Result<ExitCode> {
    let cfg = load(&a)?.resolve()?;
    let s = &cfg.spec;
    let g = &s.geometry;
    println!("config: {} ({})", cfg.name, s.kind.name());
    println!("content hash: {}", cfg.content_hash());
    println!("corners: {:?}", g.omega);
    println!(
        "compression ratio {} against the lower bound T_h/T_c = {}",
        g.compression_ratio(),
        s.hot_internal / s.cold_internal
    );
    println!(
        "baths T_h = {}, T_c = {}; corner temperatures T_h = {}, T_c = {}",
        s.hot_bath, s.cold_bath, s.hot_internal, s.cold_internal
    );
    if s.kind.is_shortcut() {
        println!(
            "cycle time {} ({:.6} a.u.): open strokes {:.6} a.u. each, adiabats {}",
            s.cycle_time,
            s.cycle_time_atomic(),
            s.open_stroke_duration(),
            s.adiabat_duration
        );
    } else {
        println!(
            "cycle time {} ({:.6} a.u.): |mu| = {:.6e}",
            s.cycle_time,
            s.cycle_time_atomic(),
            s.constant_mu_magnitude()
        );
    }
    // differences from the shipped preset of the same cycle kind
    let reference = qcarnot::config::preset(s.kind.name())?;
    let diffs = spec_diff(&reference, s);
    if diffs.is_empty() {
        println!("matches preset {}", s.kind.name());
    } else {
        println!("differs from preset {}:", s.kind.name());
        for d in diffs {
            println!("  {d}");
        }
    }
    warn_all(&cfg);
    if cfg.warnings.is_empty() {
        println!("ok");
    }
    Ok(ExitCode::SUCCESS)
}

fn spec_diff(a: &qcarnot::cycle::CycleSpec, b: &qcarnot::cycle::CycleSpec) -> Vec<String> {
    let av = serde_json::to_value(a).expect("spec serializes");
    let bv = serde_json::to_value(b).expect("spec serializes");
    let (Some(am), Some(bm)) = (av.as_object(), bv.as_object()) else {
        return Vec::new();
    };
    am.iter()
        .filter(|(k, v)| bm.get(*k) != Some(v))
        .map(|(k, v)| format!("{k}: {} -> {}", v, bm.get(k).cloned().unwrap_or_default()))
        .collect()
}
