use std::io::Write;
use std::path::PathBuf;
use std::process::ExitCode;

use bichromatic_core::experiments::{place_pump, read_config, run_scenario, write_csv, ResultTable, ScenarioConfig, ScenarioKind};
use bichromatic_core::params::{to_angular, to_linear};
use bichromatic_core::spectra::emission_spectrum;
use bichromatic_core::Error;
use clap::{Args, Parser, Subcommand};

/// Pump-probe simulations of a quantum dot in a cavity.
#[derive(Parser)]
#[command(name = "bichromatic", version)]
struct Cli {
    /// Worker threads for sweep points (0 = one per core).
    #[arg(long, global = true, default_value_t = 0)]
    jobs: usize,

    #[command(subcommand)]
    command: Command,
}

#[derive(Args)]
struct Output {
    /// CSV destination; stdout when omitted.
    #[arg(long)]
    out: Option<PathBuf>,

    /// Override a config key, e.g. `--set j1=2.5`. Repeatable.
    #[arg(long = "set", value_name = "KEY=VALUE")]
    overrides: Vec<String>,
}

#[derive(Subcommand)]
enum Command {
    /// Run the scenario described by a config file.
    Run {
        #[arg(long)]
        config: PathBuf,
        #[command(flatten)]
        output: Output,
    },
    /// Probe scan across both polaritons, pump on the lower one.
    Fig1(Output),
    /// Supersplitting of the upper polariton versus J1.
    Fig2(Output),
    /// Second-manifold peak position versus J1, with knee detection.
    Fig3(Output),
    /// Dressed-state dips of a detuned dot seen through the cavity.
    Fig5(Output),
    /// Peak asymmetry versus g and dot-cavity detuning, with both fits.
    Fig6(Output),
    /// Cavity emission spectrum at a single parameter point.
    Spectrum {
        /// Lower edge, GHz relative to the bare cavity.
        #[arg(long, default_value_t = -60.0, allow_negative_numbers = true)]
        from: f64,
        /// Upper edge, GHz relative to the bare cavity.
        #[arg(long, default_value_t = 60.0, allow_negative_numbers = true)]
        to: f64,
        #[arg(long, default_value_t = 1201)]
        count: usize,
        #[command(flatten)]
        output: Output,
    },
    /// Print the config of a scenario preset.
    Config {
        #[arg(default_value = "custom")]
        scenario: String,
    },
}

fn apply_overrides(cfg: &mut ScenarioConfig, output: &Output) -> Result<(), Error> {
    for item in &output.overrides {
        let (k, v) = item
            .split_once('=')
            .ok_or_else(|| Error::Config(format!("override `{item}` is not of the form key=value")))?;
        cfg.set(k.trim(), v.trim())?;
    }
    if output.out.is_some() {
        cfg.output = output.out.clone();
    }
    cfg.validate()
}

fn emit(table: &ResultTable, out: &Option<PathBuf>) -> Result<(), Error> {
    match out {
        Some(path) => write_csv(table, path),
        None => {
            let mut stdout = std::io::stdout().lock();
            stdout.write_all(table.to_csv_string().as_bytes())?;
            Ok(())
        }
    }
}

fn scenario(mut cfg: ScenarioConfig, output: &Output) -> Result<(), Error> {
    apply_overrides(&mut cfg, output)?;
    let result = run_scenario(&cfg)?;
    emit(&result.table, &cfg.output)?;
    if cfg.output.is_some() {
        for line in &result.table.annotations {
            eprintln!("{line}");
        }
    }
    Ok(())
}

fn spectrum(from: f64, to: f64, count: usize, output: &Output) -> Result<(), Error> {
    if count < 2 || !(from < to) {
        return Err(Error::Config("spectrum needs count >= 2 and from < to".into()));
    }
    let mut cfg = ScenarioConfig::preset(ScenarioKind::Custom);
    apply_overrides(&mut cfg, output)?;
    let mut params = cfg.params;
    place_pump(&mut params, cfg.pump_lock)?;
    params.validate()?;
    let cavity = params.nu_c - params.nu_l;
    let step = (to - from) / (count - 1) as f64;
    let nu: Vec<f64> = (0..count)
        .map(|k| if k + 1 == count { to } else { from + step * k as f64 })
        .collect();
    let omega: Vec<f64> = nu.iter().map(|v| to_angular(v + cavity)).collect();
    let spec = emission_spectrum(&params, &omega)?;

    let mut table = ResultTable::new(vec!["nu_offset".into(), "nu_from_pump".into(), "s".into()]);
    table.provenance.push(format!("bichromatic {}", env!("CARGO_PKG_VERSION")));
    for (k, v) in cfg.entries() {
        if k != "output" {
            table.provenance.push(format!("config: {k} = {v}"));
        }
    }
    table.provenance.push(format!("config: nu_l (resolved) = {}", params.nu_l));
    table.provenance.push(format!("grid: {count} points in [{from}, {to}] GHz from the cavity, step {step}"));
    table.provenance.push(format!("solver: z_epsilon {:e} rad/ns", spec.z_epsilon));
    if spec.negative {
        table.annotations.push("warning: spectrum has negative values beyond noise".into());
    }
    for e in &spec.extrema {
        table.annotations.push(format!(
            "extrema: {} at nu_offset = {} value = {:e}",
            e.kind,
            to_linear(e.location) - cavity,
            e.value
        ));
    }
    for (k, &v) in nu.iter().enumerate() {
        table.push_row(vec![v, v + cavity, spec.values[k]])?;
    }
    emit(&table, &output.out)
}

fn dispatch(command: Command) -> Result<(), Error> {
    match command {
        Command::Run { config, output } => {
            let cfg = read_config(&config).map_err(|e| match e {
                Error::Io(io) => Error::Config(format!("cannot read {}: {io}", config.display())),
                e => e,
            })?;
            scenario(cfg, &output)
        }
        Command::Fig1(o) => scenario(ScenarioConfig::preset(ScenarioKind::Fig1), &o),
        Command::Fig2(o) => scenario(ScenarioConfig::preset(ScenarioKind::Fig2), &o),
        Command::Fig3(o) => scenario(ScenarioConfig::preset(ScenarioKind::Fig3), &o),
        Command::Fig5(o) => scenario(ScenarioConfig::preset(ScenarioKind::Fig5), &o),
        Command::Fig6(o) => scenario(ScenarioConfig::preset(ScenarioKind::Fig6), &o),
        Command::Spectrum { from, to, count, output } => spectrum(from, to, count, &output),
        Command::Config { scenario } => {
            let kind: ScenarioKind = scenario.parse()?;
            print!("{}", ScenarioConfig::preset(kind).to_config_string());
            Ok(())
        }
    }
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    if cli.jobs > 0 {
        if let Err(e) = rayon::ThreadPoolBuilder::new().num_threads(cli.jobs).build_global() {
            eprintln!("error: {e}");
            return ExitCode::from(3);
        }
    }
    match dispatch(cli.command) {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::from(if e.is_config_error() { 2 } else { 3 })
        }
    }
}
