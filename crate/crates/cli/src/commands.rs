use std::fs;
use std::path::{Path, PathBuf};

use clap::Parser;
use faultloc_core::config::TABLE1_TOML;
use faultloc_core::spectrum::frequency_grid;
use faultloc_core::{
    advise_bandwidth, gaussian_pulse_waveform, magnitude_response, magnitude_spectrum, simulate_pde,
    synthesize_output, CaseConfig, CostFunction, CostOptions, InitialGuess,
};
use serde::Serialize;
use serde_json::json;

use crate::error::{CliError, CliResult};
use crate::io::{
    cost_curve_csv, read_waveform, response_csv, spectrum_csv, waveform_csv, write_text, WaveformFile,
};
use crate::manifest::RunManifest;
use crate::{Cli, Command, Mode};

// Diagnostic sweep behind the flat-curve warning: the auto-search range.
const FLATNESS_SWEEP: (f64, f64, usize) = (10.0, 1e5, 64);
const FLAT_SPREAD: f64 = 0.01;

pub fn run(cli: Cli, args: &[String]) -> CliResult<()> {
    if let Some(name) = &cli.seed_config {
        debug_assert_eq!(name, "table1");
        return match &cli.out {
            Some(path) => write_text(path, TABLE1_TOML),
            None => {
                print!("{TABLE1_TOML}");
                Ok(())
            }
        };
    }
    let command = cli
        .command
        .ok_or_else(|| CliError::Usage("a subcommand or --seed-config is required".into()))?;
    if let Command::Replay { manifest } = &command {
        return replay(manifest);
    }
    rayon::ThreadPoolBuilder::new()
        .num_threads(cli.threads)
        .build_global()
        .map_err(|e| CliError::Usage(format!("--threads: {e}")))?;

    let out = cli
        .out
        .clone()
        .ok_or_else(|| CliError::Usage("--out is required".into()))?;
    let ctx = Context {
        config_path: cli.config.clone(),
        out,
        args: args.to_vec(),
    };
    match command {
        Command::Simulate { mode } => simulate(&ctx, mode),
        Command::Spectrum { input } => spectrum(&ctx, &input),
        Command::Tf { ell } => tf(&ctx, &ell),
        Command::Sweep {
            input,
            ell_min,
            ell_max,
            ell_step,
            omega_cut,
        } => sweep(&ctx, &input, (ell_min, ell_max, ell_step), omega_cut),
        Command::Locate {
            input,
            init_ell,
            auto: _,
            omega_cut,
        } => locate(&ctx, &input, init_ell, omega_cut),
        Command::Advise { ell_min } => advise(&ctx, ell_min),
        Command::Replay { .. } => unreachable!("handled above"),
    }
}

struct Context {
    config_path: Option<PathBuf>,
    out: PathBuf,
    args: Vec<String>,
}

impl Context {
    fn config(&self) -> CliResult<CaseConfig> {
        let path = self
            .config_path
            .as_ref()
            .ok_or_else(|| CliError::Usage("--config is required".into()))?;
        let text = fs::read_to_string(path).map_err(|e| CliError::input(path, e))?;
        Ok(CaseConfig::from_toml_str(&text)?)
    }

    fn manifest(
        &self,
        subcommand: &str,
        inputs: &[&Path],
        outputs: Vec<PathBuf>,
        parameters: serde_json::Value,
    ) -> CliResult<()> {
        RunManifest {
            toolkit_version: env!("CARGO_PKG_VERSION").to_owned(),
            subcommand: subcommand.to_owned(),
            config_path: self.config_path.clone(),
            inputs: inputs.iter().map(|p| p.to_path_buf()).collect(),
            outputs,
            parameters,
            args: self.args.clone(),
        }
        .write(&self.out)?;
        Ok(())
    }
}

fn simulate(ctx: &Context, mode: Mode) -> CliResult<()> {
    let c = ctx.config()?;
    let sys = c.system();
    let (ts, n) = (c.sampling.sample_interval(), c.sampling.n_samples());
    let (ell, t_f, sigma) = (c.simulation.ell_true(), c.fault.onset(), c.fault.width());
    let waveform = match mode {
        Mode::Synth => synthesize_output(&sys, ell, t_f, sigma, ts, n)?,
        Mode::Pde => {
            let input = gaussian_pulse_waveform(sigma, t_f, ts, n)?;
            simulate_pde(&sys, ell, &input.samples, ts, c.simulation.spatial_nodes())?
        }
    };
    let header = [("T_s", ts), ("ell_true", ell), ("t_f", t_f), ("sigma", sigma)];
    write_text(&ctx.out, &waveform_csv(&waveform, &header))?;
    let mode_name = match mode {
        Mode::Pde => "pde",
        Mode::Synth => "synth",
    };
    ctx.manifest(
        "simulate",
        &[],
        vec![ctx.out.clone()],
        json!({ "mode": mode_name, "config": c }),
    )
}

fn spectrum(ctx: &Context, input: &Path) -> CliResult<()> {
    let file = read_waveform(input)?;
    write_text(&ctx.out, &spectrum_csv(&magnitude_spectrum(&file.waveform)))?;
    ctx.manifest(
        "spectrum",
        &[input],
        vec![ctx.out.clone()],
        json!({ "T_s": file.waveform.sample_interval(), "n_samples": file.waveform.len() }),
    )
}

fn tf_output(out: &Path, ell: f64, count: usize) -> PathBuf {
    if count == 1 {
        return out.to_path_buf();
    }
    let stem = out.file_stem().unwrap_or_default().to_string_lossy();
    let name = match out.extension() {
        Some(ext) => format!("{stem}_ell{ell}.{}", ext.to_string_lossy()),
        None => format!("{stem}_ell{ell}"),
    };
    out.with_file_name(name)
}

fn tf(ctx: &Context, ells: &[f64]) -> CliResult<()> {
    let c = ctx.config()?;
    let sys = c.system();
    let grid = frequency_grid(c.sampling.n_samples() / 2, c.sampling.sample_interval())?;
    let mut outputs = Vec::new();
    for &ell in ells {
        let response = magnitude_response(&grid, &sys, ell)?;
        let path = tf_output(&ctx.out, ell, ells.len());
        write_text(&path, &response_csv(&response))?;
        outputs.push(path);
    }
    ctx.manifest("tf", &[], outputs, json!({ "ell_m": ells, "config": c }))
}

fn distance_grid(lo: f64, hi: f64, step: f64) -> CliResult<Vec<f64>> {
    if !(lo.is_finite() && hi.is_finite() && step.is_finite() && step > 0.0) || hi < lo {
        return Err(CliError::Usage(format!(
            "empty distance grid: ell_min = {lo}, ell_max = {hi}, ell_step = {step}"
        )));
    }
    let count = ((hi - lo) / step + 1e-9).floor() as usize + 1;
    Ok((0..count).map(|i| lo + i as f64 * step).collect())
}

fn measured(input: &Path, c: &CaseConfig) -> CliResult<WaveformFile> {
    let file = read_waveform(input)?;
    let (got, want) = (file.waveform.sample_interval(), c.sampling.sample_interval());
    if (got - want).abs() > 1e-9 * want {
        return Err(CliError::input(
            input,
            format!("sample interval {got} s does not match the configuration's T_s = {want} s"),
        ));
    }
    if let Some(&sigma) = file.header.get("sigma") {
        if (sigma - c.fault.width()).abs() > 1e-9 * c.fault.width() {
            log::warn!(
                "{}: recorded sigma = {sigma} s differs from the configured {} s used in the cost",
                input.display(),
                c.fault.width()
            );
        }
    }
    Ok(file)
}

fn cost_function(file: &WaveformFile, c: &CaseConfig, omega_cut: Option<f64>) -> CliResult<CostFunction> {
    let options = CostOptions {
        omega_cut,
        ..CostOptions::default()
    };
    let spectrum = magnitude_spectrum(&file.waveform);
    Ok(CostFunction::new(
        &spectrum,
        &c.system(),
        c.fault.width(),
        options,
    )?)
}

fn sweep(ctx: &Context, input: &Path, range: (f64, f64, f64), omega_cut: Option<f64>) -> CliResult<()> {
    let c = ctx.config()?;
    let ells = distance_grid(range.0, range.1, range.2)?;
    let file = measured(input, &c)?;
    let j = cost_function(&file, &c, omega_cut)?;
    let curve = j.sweep(&ells)?;
    let header = [("omega_cut", j.omega_cut()), ("sigma", c.fault.width())];
    write_text(&ctx.out, &cost_curve_csv(&curve, &header))?;
    ctx.manifest(
        "sweep",
        &[input],
        vec![ctx.out.clone()],
        json!({
            "ell_min_m": range.0, "ell_max_m": range.1, "ell_step_m": range.2,
            "omega_cut_rad_s": j.omega_cut(), "config": c,
        }),
    )
}

#[derive(Debug, Serialize)]
struct LocateReport {
    ell_hat_m: f64,
    cost_at_min: f64,
    iterations: usize,
    evaluations: usize,
    omega_cut_rad_s: f64,
    converged: bool,
    flat_cost_warning: bool,
    cost_spread: f64,
}

fn locate(ctx: &Context, input: &Path, init_ell: Option<f64>, omega_cut: Option<f64>) -> CliResult<()> {
    let c = ctx.config()?;
    let file = measured(input, &c)?;
    let j = cost_function(&file, &c, omega_cut)?;
    let start = init_ell.map_or(InitialGuess::Auto, InitialGuess::From);
    let result = j.localize(start)?;

    let (lo, hi, count) = FLATNESS_SWEEP;
    let ratio = (hi / lo).ln() / (count - 1) as f64;
    let probe: Vec<f64> = (0..count).map(|i| lo * (ratio * i as f64).exp()).collect();
    let spread = j.sweep(&probe)?.spread();
    let flat = spread.is_nan() || spread < FLAT_SPREAD;
    if flat {
        log::warn!("cost curve is nearly flat (spread {spread:.3e}); the estimate is unreliable");
    }

    let report = LocateReport {
        ell_hat_m: result.ell_hat,
        cost_at_min: result.cost_at_min,
        iterations: result.iterations,
        evaluations: result.evaluations,
        omega_cut_rad_s: j.omega_cut(),
        converged: result.converged,
        flat_cost_warning: flat,
        cost_spread: spread,
    };
    let mut text = serde_json::to_string_pretty(&report).expect("report serialises");
    text.push('\n');
    write_text(&ctx.out, &text)?;
    ctx.manifest(
        "locate",
        &[input],
        vec![ctx.out.clone()],
        json!({ "init_ell_m": init_ell, "omega_cut_rad_s": j.omega_cut(), "config": c }),
    )?;
    if result.converged {
        Ok(())
    } else {
        Err(CliError::NotConverged)
    }
}

fn advise(ctx: &Context, ell_min: f64) -> CliResult<()> {
    let c = ctx.config()?;
    let advice = advise_bandwidth(&c.system(), ell_min)?;
    let mut text = serde_json::to_string_pretty(&advice).expect("advice serialises");
    text.push('\n');
    write_text(&ctx.out, &text)?;
    ctx.manifest(
        "advise",
        &[],
        vec![ctx.out.clone()],
        json!({ "ell_min_m": ell_min, "config": c }),
    )
}

fn replay(path: &Path) -> CliResult<()> {
    let manifest = RunManifest::read(path)?;
    let cli = Cli::try_parse_from(&manifest.args)?;
    if matches!(cli.command, Some(Command::Replay { .. })) {
        return Err(CliError::input(
            path,
            "manifest records a replay; refusing to recurse",
        ));
    }
    run(cli, &manifest.args)
}
