//! `cryoload`: evaluate material models, refit them from measurements, and
//! run static/active/budget computations for fridge wiring configurations.
//!
//! Exit codes: 0 all stages pass within margin, 1 config or I/O error,
//! 2 a stage exceeds its budget, 3 the line count exceeds fridge capacity.

use std::path::{Path, PathBuf};
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand, ValueEnum};

use cryoload::attenuators::{line_active_loads, twpa_pump_loads, LineKind};
use cryoload::cables::stage_static_load;
use cryoload::config::{RunConfig, SystemInputs};
use cryoload::fitting;
use cryoload::materials::{self, UnitKind};
use cryoload::report::{self, sci4};
use cryoload::system::{sweep_sizes, system_budget, SweepEntry};
use cryoload::Error;

#[derive(Parser)]
#[command(
    name = "cryoload",
    version,
    about = "Cryogenic wiring heat-budget engine"
)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Material model operations
    Materials {
        #[command(subcommand)]
        command: MaterialsCommand,
    },
    /// Fit a property model to a measurement CSV
    Fit(FitArgs),
    /// Cable-level static loads
    Cable {
        #[command(subcommand)]
        command: CableCommand,
    },
    /// Per-line active loads
    Line {
        #[command(subcommand)]
        command: LineCommand,
    },
    /// Per-stage budget for one processor size
    Budget(BudgetArgs),
    /// Budget sweep over processor sizes
    Sweep(SweepArgs),
}

#[derive(Subcommand)]
enum MaterialsCommand {
    /// Evaluate a material model at a list of temperatures
    Eval(EvalArgs),
}

#[derive(Subcommand)]
enum CableCommand {
    /// Per-stage static heat loads of the configured cable
    Static(CableStaticArgs),
}

#[derive(Subcommand)]
enum LineCommand {
    /// Per-stage active heat loads of one line template
    Active(LineActiveArgs),
}

#[derive(Clone, Copy, ValueEnum)]
enum Format {
    /// Full-precision machine CSV on stdout
    Csv,
    /// Human-readable table on stdout
    Summary,
}

#[derive(Args)]
struct EvalArgs {
    /// Material name (built-in or from config material_files)
    #[arg(long)]
    material: String,
    /// Comma-separated temperatures in kelvin
    #[arg(long, value_delimiter = ',', required = true)]
    temps: Vec<f64>,
    #[arg(long)]
    config: Option<PathBuf>,
}

#[derive(Args)]
struct FitArgs {
    /// Input CSV with header `temperature_K,value`
    #[arg(long)]
    csv: PathBuf,
    /// Polynomial degree in log10(T)
    #[arg(long, default_value_t = fitting::DEFAULT_DEGREE)]
    degree: usize,
    /// Discard measurements above this temperature, K
    #[arg(long, default_value_t = 300.0)]
    t_cap: f64,
    /// Unit of the fitted property
    #[arg(long, value_enum, default_value_t = UnitArg::ThermalConductivity)]
    unit: UnitArg,
    /// Output material definition file
    #[arg(long)]
    out: PathBuf,
    /// Output residual CSV
    #[arg(long)]
    residuals: Option<PathBuf>,
}

#[derive(Clone, Copy, ValueEnum)]
enum UnitArg {
    ThermalConductivity,
    Resistivity,
}

impl From<UnitArg> for UnitKind {
    fn from(value: UnitArg) -> Self {
        match value {
            UnitArg::ThermalConductivity => UnitKind::ThermalConductivity,
            UnitArg::Resistivity => UnitKind::Resistivity,
        }
    }
}

#[derive(Args)]
struct CableStaticArgs {
    #[arg(long)]
    config: Option<PathBuf>,
    /// Number of identical cables
    #[arg(long, default_value_t = 1)]
    count: usize,
    #[arg(long, value_enum, default_value_t = Format::Summary)]
    format: Format,
}

#[derive(Args)]
struct LineActiveArgs {
    #[arg(long)]
    config: Option<PathBuf>,
    /// Line kind from the config templates (e.g. qubit_flux, twpa_pump)
    #[arg(long)]
    line: String,
    #[arg(long, value_enum, default_value_t = Format::Summary)]
    format: Format,
}

#[derive(Args)]
struct BudgetArgs {
    #[arg(long)]
    config: Option<PathBuf>,
    /// Processor array edge; overrides the config value
    #[arg(long)]
    n: Option<u32>,
    /// Pass threshold on the cooling-power fraction, (0, 1]
    #[arg(long)]
    margin: Option<f64>,
    /// Directory for budget.csv and summary.toml
    #[arg(long, default_value = ".")]
    out_dir: PathBuf,
    /// Also write plot_data.csv (n vs fraction per stage)
    #[arg(long)]
    plot_data: bool,
    #[arg(long, value_enum, default_value_t = Format::Summary)]
    format: Format,
    /// Write the resolved configuration to this path
    #[arg(long)]
    emit_config: Option<PathBuf>,
}

#[derive(Args)]
struct SweepArgs {
    #[arg(long)]
    config: Option<PathBuf>,
    /// Inclusive processor size range, e.g. 10..15
    #[arg(long)]
    sweep: String,
    #[arg(long)]
    margin: Option<f64>,
    #[arg(long, default_value = ".")]
    out_dir: PathBuf,
    #[arg(long)]
    plot_data: bool,
    #[arg(long, value_enum, default_value_t = Format::Summary)]
    format: Format,
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    match run(cli.command) {
        Ok(code) => code,
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::from(1)
        }
    }
}

fn load_config(path: &Option<PathBuf>) -> Result<RunConfig, Error> {
    match path {
        Some(p) => RunConfig::from_file(p),
        None => Ok(RunConfig::default_xld1000sl()),
    }
}

fn timestamp_header() -> String {
    format!("# generated {}\n", chrono::Utc::now().to_rfc3339())
}

fn write_report(path: &Path, body: &str) -> Result<(), Error> {
    if let Some(dir) = path.parent() {
        if !dir.as_os_str().is_empty() {
            std::fs::create_dir_all(dir)?;
        }
    }
    std::fs::write(path, format!("{}{body}", timestamp_header()))?;
    Ok(())
}

fn run(command: Command) -> Result<ExitCode, Error> {
    match command {
        Command::Materials {
            command: MaterialsCommand::Eval(args),
        } => cmd_materials_eval(args),
        Command::Fit(args) => cmd_fit(args),
        Command::Cable {
            command: CableCommand::Static(args),
        } => cmd_cable_static(args),
        Command::Line {
            command: LineCommand::Active(args),
        } => cmd_line_active(args),
        Command::Budget(args) => cmd_budget(args),
        Command::Sweep(args) => cmd_sweep(args),
    }
}

fn cmd_materials_eval(args: EvalArgs) -> Result<ExitCode, Error> {
    let config = load_config(&args.config)?;
    let inputs = config.resolve()?;
    let model = inputs.library.get(&args.material)?;
    println!(
        "temperature_K  value_{}",
        match model.unit_kind {
            UnitKind::ThermalConductivity => "W_per_m_K",
            UnitKind::Resistivity => "ohm_m",
        }
    );
    for t in args.temps {
        let value = model.eval(t)?;
        println!("{t:<13}  {}", sci4(value));
    }
    Ok(ExitCode::SUCCESS)
}

fn cmd_fit(args: FitArgs) -> Result<ExitCode, Error> {
    let series = fitting::read_measurement_file(&args.csv, args.unit.into())?;
    let (filtered, removed) = fitting::filter_measurements(&series, args.t_cap)?;
    if removed > 0 {
        println!("excluded {removed} measurements above {} K", args.t_cap);
    }
    let (model, mut fit_report) = fitting::fit_polylog(&filtered, args.degree)?;
    fit_report.removed_by_filter = removed;
    println!(
        "fitted degree-{} model over {:.4}..{:.4} K, RMS log10 residual {}",
        args.degree,
        model.t_min,
        model.t_max,
        sci4(fit_report.rms_log_residual)
    );
    let rounded: Vec<String> = model
        .coefficients
        .iter()
        .take(args.degree + 1)
        .map(|c| format!("{c:.6e}"))
        .collect();
    println!("coefficients (7 s.f.): {}", rounded.join(", "));
    std::fs::write(&args.out, materials::to_material_file(&model))?;
    println!("wrote {}", args.out.display());
    if let Some(path) = &args.residuals {
        let mut buf = Vec::new();
        fitting::write_residual_csv(&mut buf, &fit_report)?;
        std::fs::write(path, buf)?;
        println!("wrote {}", path.display());
    }
    Ok(ExitCode::SUCCESS)
}

fn cmd_cable_static(args: CableStaticArgs) -> Result<ExitCode, Error> {
    let config = load_config(&args.config)?;
    let inputs = config.resolve()?;
    let convention = inputs.options.static_convention;
    let mut rows = Vec::new();
    for stage in &inputs.fridge.stages {
        if stage.cooling_power_w.is_none() {
            continue;
        }
        let load = stage_static_load(
            &inputs.cable,
            &inputs.fridge,
            &stage.name,
            args.count,
            convention,
        )?;
        rows.push((stage.name.clone(), load));
    }
    match args.format {
        Format::Csv => {
            println!("stage,count,static_W");
            for (stage, load) in rows {
                println!("{stage},{},{load}", args.count);
            }
        }
        Format::Summary => {
            println!(
                "static heat load of {} x {} ({:?} convention)",
                args.count, inputs.cable.name, convention
            );
            println!("{:<6} {:>12}", "stage", "static_W");
            for (stage, load) in rows {
                println!("{stage:<6} {:>12}", sci4(load));
            }
        }
    }
    Ok(ExitCode::SUCCESS)
}

fn parse_line_kind(name: &str) -> Result<LineKind, Error> {
    for kind in [
        LineKind::QubitXy,
        LineKind::QubitFlux,
        LineKind::CouplerFlux,
        LineKind::ReadIn,
        LineKind::ReadOut,
        LineKind::TwpaPump,
    ] {
        if kind.label() == name {
            return Ok(kind);
        }
    }
    Err(Error::Config(format!("unknown line kind `{name}`")))
}

fn cmd_line_active(args: LineActiveArgs) -> Result<ExitCode, Error> {
    let config = load_config(&args.config)?;
    let inputs = config.resolve()?;
    let kind = parse_line_kind(&args.line)?;
    let line = inputs
        .processor
        .template(kind)
        .ok_or_else(|| Error::Config(format!("no template for line kind `{}`", args.line)))?;

    let (coax, attenuator): (Vec<f64>, Vec<f64>) = if kind == LineKind::TwpaPump {
        let loads = twpa_pump_loads(line, &inputs.fridge, &inputs.cable)?;
        println!(
            "rms current at the directional coupler: {} A",
            sci4(loads.coupler_current_a)
        );
        let pads: Vec<f64> = loads
            .pad_w
            .iter()
            .zip(loads.termination_w.iter())
            .map(|(p, t)| p + t)
            .collect();
        (loads.coax_w, pads)
    } else {
        let loads = line_active_loads(line, &inputs.fridge, &inputs.cable)?;
        (loads.coax_w, loads.attenuator_w)
    };

    match args.format {
        Format::Csv => {
            println!("stage,coax_W,attenuator_W");
            for (i, stage) in inputs.fridge.stages.iter().enumerate() {
                println!("{},{},{}", stage.name, coax[i], attenuator[i]);
            }
        }
        Format::Summary => {
            println!("active heat load of one {} line", kind.label());
            println!("{:<6} {:>12} {:>14}", "stage", "coax_W", "attenuator_W");
            for (i, stage) in inputs.fridge.stages.iter().enumerate() {
                println!(
                    "{:<6} {:>12} {:>14}",
                    stage.name,
                    sci4(coax[i]),
                    sci4(attenuator[i])
                );
            }
        }
    }
    Ok(ExitCode::SUCCESS)
}

fn apply_overrides(config: &mut RunConfig, n: Option<u32>, margin: Option<f64>) {
    if let Some(n) = n {
        config.processor.n = n;
    }
    if let Some(margin) = margin {
        config.budget.margin = margin;
    }
}

fn budget_exit(entries: &[SweepEntry]) -> ExitCode {
    let any_capacity = entries
        .iter()
        .any(|e| matches!(e.result, Err(Error::CapacityExceeded { .. })));
    if any_capacity {
        return ExitCode::from(3);
    }
    let any_fail = entries
        .iter()
        .any(|e| e.result.as_ref().map(|r| !r.all_pass).unwrap_or(true));
    if any_fail {
        ExitCode::from(2)
    } else {
        ExitCode::SUCCESS
    }
}

fn emit_outputs(
    inputs: &SystemInputs,
    entries: &[SweepEntry],
    out_dir: &Path,
    plot_data: bool,
    format: Format,
) -> Result<(), Error> {
    let reports: Vec<_> = entries
        .iter()
        .filter_map(|e| e.result.as_ref().ok())
        .collect();
    write_report(&out_dir.join("budget.csv"), &report::budget_csv(&reports))?;
    write_report(
        &out_dir.join("summary.toml"),
        &report::summary_toml(entries, inputs.options.margin)?,
    )?;
    if plot_data {
        write_report(
            &out_dir.join("plot_data.csv"),
            &report::plot_data_csv(&reports),
        )?;
    }
    for entry in entries {
        match &entry.result {
            Ok(r) => match format {
                Format::Summary => print!("{}", report::budget_table(r)),
                Format::Csv => print!("{}", report::budget_csv(&[r])),
            },
            Err(e) => println!("n = {}: {e}", entry.n),
        }
    }
    Ok(())
}

fn cmd_budget(args: BudgetArgs) -> Result<ExitCode, Error> {
    let mut config = load_config(&args.config)?;
    apply_overrides(&mut config, args.n, args.margin);
    if let Some(path) = &args.emit_config {
        std::fs::write(path, config.to_toml())?;
        println!("wrote {}", path.display());
    }
    let inputs = config.resolve()?;
    let result = system_budget(
        &inputs.processor,
        &inputs.fridge,
        &inputs.cable,
        &inputs.fixed_per_readout,
        &inputs.options,
    );
    if let Err(Error::CapacityExceeded { required, capacity }) = &result {
        eprintln!(
            "capacity exceeded: configuration requires {required} lines, fridge provides {capacity}"
        );
    }
    let entries = vec![SweepEntry {
        n: inputs.processor.n,
        counts: cryoload::system::processor_line_counts(&inputs.processor),
        result,
    }];
    emit_outputs(
        &inputs,
        &entries,
        &args.out_dir,
        args.plot_data,
        args.format,
    )?;
    Ok(budget_exit(&entries))
}

fn parse_sweep_range(text: &str) -> Result<std::ops::RangeInclusive<u32>, Error> {
    let (a, b) = text
        .split_once("..=")
        .or_else(|| text.split_once(".."))
        .ok_or_else(|| Error::Config(format!("sweep range must look like A..B, got `{text}`")))?;
    let lo: u32 = a
        .trim()
        .parse()
        .map_err(|e| Error::Config(format!("sweep start `{a}`: {e}")))?;
    let hi: u32 = b
        .trim()
        .parse()
        .map_err(|e| Error::Config(format!("sweep end `{b}`: {e}")))?;
    Ok(lo..=hi)
}

fn cmd_sweep(args: SweepArgs) -> Result<ExitCode, Error> {
    let mut config = load_config(&args.config)?;
    apply_overrides(&mut config, None, args.margin);
    let inputs = config.resolve()?;
    let range = parse_sweep_range(&args.sweep)?;
    let entries = sweep_sizes(
        range,
        &inputs.processor,
        &inputs.fridge,
        &inputs.cable,
        &inputs.fixed_per_readout,
        &inputs.options,
    );
    emit_outputs(
        &inputs,
        &entries,
        &args.out_dir,
        args.plot_data,
        args.format,
    )?;
    Ok(budget_exit(&entries))
}
