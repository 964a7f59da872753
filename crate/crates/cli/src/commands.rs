//! Subcommand runners. Each one loads the model, solves, and writes CSV.

use std::path::{Path, PathBuf};

use rotorfe::campbell::model_resolver;
use rotorfe::{
    assemble, find_critical_speeds, modal_analysis, rad_s_to_hz, rad_s_to_rpm, receptance_direct, receptance_modal,
    receptance_real_form, rpm_to_rad_s, sweep, CampbellData64, FrfOptions, FrfResult64, RotorModel64,
    ThermalCondition, ThermalLoad,
};

use crate::output::{num, sha256_hex, sibling, write_atomic, CsvDoc};
use crate::schema::{parse_model_file, ModelDocument};
use crate::{Cli, CliError, Command, FrfArgs, MethodArg, SweepArgs, ThermalModeArg};

/// What a run produced, for the caller to print.
#[derive(Debug, Default)]
pub struct RunReport {
    pub written: Vec<PathBuf>,
    pub warnings: Vec<String>,
    pub messages: Vec<String>,
}

struct Loaded {
    doc: ModelDocument,
    model: RotorModel64,
    hash: String,
    thermal: ThermalCondition<f64>,
    thermal_echo: String,
}

fn thermal_override(cli: &Cli) -> Result<(ThermalCondition<f64>, String), CliError> {
    let bad = |m: &str| Err(CliError::Input(m.to_string()));
    match (cli.thermal_mode, cli.delta_t_k, cli.axial_force_n) {
        (None, None, None) => Ok((ThermalCondition::Model, "thermal=model".into())),
        (Some(ThermalModeArg::Fixed) | None, Some(dt), None) => {
            Ok((ThermalCondition::Load(ThermalLoad::constrained(dt)), format!("thermal=fixed delta_t_k={dt}")))
        }
        (Some(ThermalModeArg::Force) | None, None, Some(f)) => {
            Ok((ThermalCondition::Load(ThermalLoad::prescribed(f)), format!("thermal=force axial_force_n={f}")))
        }
        (Some(ThermalModeArg::Fixed), None, _) => bad("--thermal-mode fixed requires --delta-t-k"),
        (Some(ThermalModeArg::Force), _, None) => bad("--thermal-mode force requires --axial-force-n"),
        _ => bad("--delta-t-k and --axial-force-n cannot be combined"),
    }
}

fn load(cli: &Cli, warnings: &mut Vec<String>) -> Result<Loaded, CliError> {
    let path = cli.model.as_ref().ok_or_else(|| CliError::Input("--model is required".into()))?;
    let bytes = std::fs::read(path).map_err(|e| CliError::Input(format!("cannot read {}: {e}", path.display())))?;
    let text = std::str::from_utf8(&bytes)
        .map_err(|e| CliError::Input(format!("{} is not UTF-8: {e}", path.display())))?;
    let (doc, model, model_warnings) = parse_model_file(text)?;
    warnings.extend(model_warnings);
    let (thermal, thermal_echo) = thermal_override(cli)?;
    Ok(Loaded { doc, model, hash: sha256_hex(&bytes), thermal, thermal_echo })
}

fn provenance(loaded: &Loaded, echo: &str) -> String {
    format!(
        "rotorfe {} model_sha256={} config: {echo} {}",
        env!("CARGO_PKG_VERSION"),
        loaded.hash,
        loaded.thermal_echo
    )
}

fn out_path(cli: &Cli, default: &str) -> PathBuf {
    cli.out.clone().unwrap_or_else(|| PathBuf::from(default))
}

fn speed_rpm(arg: Option<f64>, doc: &ModelDocument) -> Result<f64, CliError> {
    let rpm = arg.or(doc.speed_rpm).unwrap_or(0.0);
    if !rpm.is_finite() {
        return Err(CliError::Input("spin speed must be finite".into()));
    }
    Ok(rpm)
}

fn speed_grid(args: &SweepArgs) -> Result<Vec<f64>, CliError> {
    if !(args.min_rpm < args.max_rpm) || !args.min_rpm.is_finite() || !args.max_rpm.is_finite() {
        return Err(CliError::Input("--min-rpm must be smaller than --max-rpm".into()));
    }
    if args.steps < 2 {
        return Err(CliError::Input("--steps must be at least 2".into()));
    }
    let span = args.max_rpm - args.min_rpm;
    let last = (args.steps - 1) as f64;
    Ok((0..args.steps).map(|i| rpm_to_rad_s(args.min_rpm + span * i as f64 / last)).collect())
}

pub fn run(cli: &Cli) -> Result<RunReport, CliError> {
    let mut report = RunReport::default();
    let loaded = load(cli, &mut report.warnings)?;
    match &cli.command {
        Command::Modes { rpm } => run_modes(cli, &loaded, *rpm, &mut report)?,
        Command::Campbell { sweep, compare } => run_campbell(cli, &loaded, sweep, *compare, &mut report)?,
        Command::Critical { sweep, order } => run_critical(cli, &loaded, sweep, *order, &mut report)?,
        Command::Frf(args) => run_frf(cli, &loaded, args, &mut report)?,
    }
    Ok(report)
}

fn emit(path: &Path, doc: &CsvDoc, report: &mut RunReport) -> Result<(), CliError> {
    write_atomic(path, doc.as_str())?;
    report.written.push(path.to_path_buf());
    Ok(())
}

fn run_modes(cli: &Cli, loaded: &Loaded, rpm: Option<f64>, report: &mut RunReport) -> Result<(), CliError> {
    let rpm = speed_rpm(rpm, &loaded.doc)?;
    let model = loaded.thermal.apply(&loaded.model);
    let modal = modal_analysis(&assemble(&model, rpm_to_rad_s(rpm))?)?;
    let mut doc = CsvDoc::new(
        &provenance(loaded, &format!("command=modes speed_rpm={rpm}")),
        &["mode_index", "freq_hz", "damping_ratio", "whirl", "re_s", "im_s"],
    );
    for (i, m) in modal.modes.iter().enumerate() {
        let whirl = m.whirl.map(|w| w.label()).unwrap_or("planar");
        doc.row(&[i.to_string(), num(rad_s_to_hz(m.omega)), num(m.zeta), whirl.to_string(), num(m.s.re), num(m.s.im)]);
    }
    emit(&out_path(cli, "modes.csv"), &doc, report)
}

fn campbell_doc(loaded: &Loaded, echo: &str, data: &CampbellData64) -> CsvDoc {
    let mut doc = CsvDoc::new(
        &format!("{} label=\"{}\"", provenance(loaded, echo), data.thermal_label),
        &["speed_rpm", "branch_id", "freq_hz", "damping_ratio", "whirl", "mac"],
    );
    for (i, &speed) in data.speeds.iter().enumerate() {
        for b in &data.branches {
            let mut row = vec![num(rad_s_to_rpm(speed)), b.id.to_string()];
            match &b.points[i] {
                Some(p) => row.extend([num(rad_s_to_hz(p.omega)), num(p.zeta), p.whirl.label().to_string(), num(p.mac)]),
                None => row.extend([String::new(), String::new(), "lost".to_string(), String::new()]),
            }
            doc.row(&row);
        }
    }
    doc
}

fn sweep_echo(command: &str, args: &SweepArgs) -> String {
    format!("command={command} min_rpm={} max_rpm={} steps={}", args.min_rpm, args.max_rpm, args.steps)
}

fn run_campbell(
    cli: &Cli,
    loaded: &Loaded,
    args: &SweepArgs,
    compare: bool,
    report: &mut RunReport,
) -> Result<(), CliError> {
    let grid = speed_grid(args)?;
    let echo = sweep_echo("campbell", args);
    let data = sweep(&loaded.model, &grid, loaded.thermal)?;
    report.warnings.extend(data.warnings.iter().cloned());
    let out = out_path(cli, "campbell.csv");
    emit(&out, &campbell_doc(loaded, &echo, &data), report)?;
    if compare {
        let plain = sweep(&loaded.model, &grid, ThermalCondition::NoPrestress)?;
        report.warnings.extend(plain.warnings.iter().cloned());
        emit(&sibling(&out, "no_prestress"), &campbell_doc(loaded, &echo, &plain), report)?;
    }
    Ok(())
}

fn run_critical(cli: &Cli, loaded: &Loaded, args: &SweepArgs, order: f64, report: &mut RunReport) -> Result<(), CliError> {
    if !(order > 0.0) || !order.is_finite() {
        return Err(CliError::Input("--order must be positive".into()));
    }
    let grid = speed_grid(args)?;
    let data = sweep(&loaded.model, &grid, loaded.thermal)?;
    report.warnings.extend(data.warnings.iter().cloned());
    let resolver = model_resolver(&loaded.model, loaded.thermal)?;
    let found = find_critical_speeds(&data, order, &resolver)?;
    let mut doc = CsvDoc::new(
        &provenance(loaded, &format!("{} order={order}", sweep_echo("critical", args))),
        &["branch_id", "excitation_order", "critical_rpm", "residual_hz"],
    );
    for c in &found {
        doc.row(&[c.branch.to_string(), num(c.excitation_order), num(rad_s_to_rpm(c.speed)), num(rad_s_to_hz(c.residual))]);
    }
    emit(&out_path(cli, "critical.csv"), &doc, report)
}

fn frf_doc(provenance: &str, freq_hz: &[f64], r: &FrfResult64) -> CsvDoc {
    let mut doc = CsvDoc::new(provenance, &["freq_hz", "re_h", "im_h", "magnitude", "phase_deg", "method"]);
    for (f, h) in freq_hz.iter().zip(&r.h) {
        doc.row(&[
            num(*f),
            num(h.re),
            num(h.im),
            num(h.norm()),
            num(h.im.atan2(h.re).to_degrees()),
            r.method.label().to_string(),
        ]);
    }
    doc
}

fn run_frf(cli: &Cli, loaded: &Loaded, args: &FrfArgs, report: &mut RunReport) -> Result<(), CliError> {
    if !(args.fmin_hz < args.fmax_hz) || !args.fmin_hz.is_finite() || !args.fmax_hz.is_finite() {
        return Err(CliError::Input("--fmin-hz must be smaller than --fmax-hz".into()));
    }
    if args.points < 2 {
        return Err(CliError::Input("--points must be at least 2".into()));
    }
    let rpm = speed_rpm(args.rpm, &loaded.doc)?;
    let last = (args.points - 1) as f64;
    let freq_hz: Vec<f64> =
        (0..args.points).map(|i| args.fmin_hz + (args.fmax_hz - args.fmin_hz) * i as f64 / last).collect();
    let omega: Vec<f64> = freq_hz.iter().map(|f| 2.0 * std::f64::consts::PI * f).collect();

    let model = loaded.thermal.apply(&loaded.model);
    let system = assemble(&model, rpm_to_rad_s(rpm))?;
    let (j, k) = (args.resp, args.exc);
    system.dof_map.require(j)?;
    system.dof_map.require(k)?;
    let wants = |m: MethodArg| args.method == m || args.method == MethodArg::All;
    let modal = if wants(MethodArg::Modal) || wants(MethodArg::Real13) {
        Some(modal_analysis(&system)?)
    } else {
        None
    };
    let opts = FrfOptions::default();
    let mut results: Vec<FrfResult64> = Vec::new();
    if wants(MethodArg::Modal) {
        results.push(receptance_modal(modal.as_ref().expect("solved"), &system.dof_map, j, k, &omega, opts)?);
    }
    if wants(MethodArg::Real13) {
        results.push(receptance_real_form(modal.as_ref().expect("solved"), &system.dof_map, j, k, &omega, opts)?);
    }
    if wants(MethodArg::Direct) {
        results.push(receptance_direct(&system, j, k, &omega)?);
    }

    let echo = format!(
        "command=frf resp={j} exc={k} fmin_hz={} fmax_hz={} points={} speed_rpm={rpm}",
        args.fmin_hz, args.fmax_hz, args.points
    );
    let out = out_path(cli, "frf.csv");
    for r in &results {
        let path = if results.len() == 1 { out.clone() } else { sibling(&out, r.method.label()) };
        let prov = format!("{} method={}", provenance(loaded, &echo), r.method.label());
        emit(&path, &frf_doc(&prov, &freq_hz, r), report)?;
    }
    if results.len() > 1 {
        let mut doc = CsvDoc::new(&provenance(loaded, &echo), &["method", "reference", "max_relative_deviation"]);
        let reference = &results[0];
        for r in &results[1..] {
            let dev = r.max_relative_deviation(reference);
            report.messages.push(format!(
                "max relative deviation {} vs {}: {}",
                r.method.label(),
                reference.method.label(),
                num(dev)
            ));
            doc.row(&[r.method.label().to_string(), reference.method.label().to_string(), num(dev)]);
        }
        emit(&sibling(&out, "deviation"), &doc, report)?;
    }
    Ok(())
}
