//! Command-line surface: subcommand dispatch, artifact writing, and the
//! deterministic exit-code contract (0 success, 2 config error, 3 numerical
//! failure, 4 acceptance failure).

use clap::{Args, Parser, Subcommand};
use serde::Serialize;
use std::ffi::OsString;
use std::path::{Path, PathBuf};
use std::time::Instant;

use crate::config::{ParamsFile, Resolved};
use crate::csvio::{self, Table};
use crate::error::{Error, Result};
use crate::fit::{self, ModelKind};
use crate::mirror;
use crate::papercheck;
use crate::spectra;
use crate::svg;

pub const EXIT_OK: i32 = 0;
pub const EXIT_CONFIG: i32 = 2;
pub const EXIT_NUMERICAL: i32 = 3;
pub const EXIT_ACCEPTANCE: i32 = 4;

#[derive(Parser)]
#[command(
    name = "sawsim",
    version,
    about = "Simulate and fit a flux-tunable qubit coupled to a multimode acoustic cavity"
)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Args)]
struct Common {
    /// JSON params file; defaults to the built-in reference device.
    #[arg(long)]
    config: Option<PathBuf>,
    /// Output directory for artifacts.
    #[arg(long, default_value = "out")]
    out: PathBuf,
    /// Master seed for all synthetic randomness.
    #[arg(long, default_value_t = 1)]
    seed: u64,
    /// Also emit SVG plots.
    #[arg(long)]
    svg: bool,
}

#[derive(Subcommand)]
enum Command {
    /// Transducer response, energy loss, and acoustic shift vs frequency.
    IdtResponse(Common),
    /// Mirror stopband and confined-mode ladder.
    Mirror(Common),
    /// Flux-swept avoided-crossing spectrum.
    Crossings(Common),
    /// Number-splitting spectra over the configured drive powers.
    Numbersplit(Common),
    /// Fit a dataset CSV with the named model
    /// (linear | flux | t1 | crossings | numbersplit).
    Fit {
        model: String,
        /// Input dataset CSV.
        #[arg(long)]
        data: PathBuf,
        #[command(flatten)]
        common: Common,
    },
    /// Run the full consistency suite against the reference values.
    Papercheck(Common),
}

/// Written to stdout after every successful run.
#[derive(Debug, Serialize)]
pub struct RunReport {
    pub command: String,
    pub wall_time_s: f64,
    pub artifacts: Vec<PathBuf>,
    pub warnings: Vec<String>,
}

fn exit_code_for(e: &Error) -> i32 {
    match e {
        Error::Config(_) | Error::InvalidParams(_) | Error::FitSetup(_) => EXIT_CONFIG,
        _ => EXIT_NUMERICAL,
    }
}

/// Entry point used by `main` and by the CLI tests.
pub fn run<I, T>(argv: I) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<OsString> + Clone,
{
    let cli = match Cli::try_parse_from(argv) {
        Ok(cli) => cli,
        Err(e) => {
            // Usage/help text; version and --help are successes.
            let code = if e.use_stderr() { EXIT_CONFIG } else { EXIT_OK };
            let _ = e.print();
            return code;
        }
    };
    let started = Instant::now();
    let (name, common) = match &cli.command {
        Command::IdtResponse(c) => ("idt-response", c),
        Command::Mirror(c) => ("mirror", c),
        Command::Crossings(c) => ("crossings", c),
        Command::Numbersplit(c) => ("numbersplit", c),
        Command::Fit { common, .. } => ("fit", common),
        Command::Papercheck(c) => ("papercheck", c),
    };
    let resolved = match load_config(common) {
        Ok(r) => r,
        Err(e) => {
            eprintln!("sawsim: {e}");
            return exit_code_for(&e);
        }
    };
    if let Err(e) = std::fs::create_dir_all(&common.out) {
        eprintln!("sawsim: cannot create output directory: {e}");
        return EXIT_NUMERICAL;
    }
    let outcome = match &cli.command {
        Command::IdtResponse(c) => cmd_idt_response(&resolved, c),
        Command::Mirror(c) => cmd_mirror(&resolved, c),
        Command::Crossings(c) => cmd_crossings(&resolved, c),
        Command::Numbersplit(c) => cmd_numbersplit(&resolved, c),
        Command::Fit { model, data, common } => cmd_fit(&resolved, model, data, common),
        Command::Papercheck(c) => {
            return run_papercheck(&resolved, c, started);
        }
    };
    match outcome {
        Ok((artifacts, warnings)) => {
            report(name, started, artifacts, warnings);
            EXIT_OK
        }
        Err(e) => {
            eprintln!("sawsim: {e}");
            exit_code_for(&e)
        }
    }
}

fn load_config(common: &Common) -> Result<Resolved> {
    match &common.config {
        Some(path) => ParamsFile::load(path)?.resolve(),
        None => ParamsFile::default().resolve(),
    }
}

fn report(command: &str, started: Instant, artifacts: Vec<PathBuf>, warnings: Vec<String>) {
    let rep = RunReport {
        command: command.to_string(),
        wall_time_s: started.elapsed().as_secs_f64(),
        artifacts,
        warnings,
    };
    match serde_json::to_string_pretty(&rep) {
        Ok(text) => println!("{text}"),
        Err(_) => println!("{rep:?}"),
    }
}

type Artifacts = (Vec<PathBuf>, Vec<String>);

fn write_table(table: &Table, path: PathBuf, artifacts: &mut Vec<PathBuf>) -> Result<()> {
    csvio::write_csv(table, &path)?;
    artifacts.push(path);
    Ok(())
}

fn cmd_idt_response(r: &Resolved, c: &Common) -> Result<Artifacts> {
    let mut artifacts = Vec::new();
    let gamma = papercheck::gamma1_table(r)?;
    write_table(&gamma, c.out.join("idt_response.csv"), &mut artifacts)?;
    write_table(
        &papercheck::amplitude_table(r)?,
        c.out.join("idt_amplitude.csv"),
        &mut artifacts,
    )?;
    if c.svg {
        let points: Vec<(f64, f64)> = gamma
            .rows
            .iter()
            .map(|row| (row[0].parse().unwrap(), row[1].parse().unwrap()))
            .collect();
        let path = c.out.join("idt_response.svg");
        svg::write_svg(
            &svg::Plot {
                title: "Qubit energy loss vs frequency".into(),
                x_label: "frequency (Hz)".into(),
                y_label: "Γ₁ (Hz)".into(),
                traces: vec![svg::Trace {
                    label: "Γ₁".into(),
                    points,
                }],
            },
            &path,
        )?;
        artifacts.push(path);
    }
    Ok((artifacts, Vec::new()))
}

fn cmd_mirror(r: &Resolved, c: &Common) -> Result<Artifacts> {
    let mut artifacts = Vec::new();
    let band = mirror::stopband(&r.cavity.mirrors, 0.9)?
        .ok_or_else(|| Error::InvalidParams("mirror has no stopband".into()))?;
    let mut t = Table::new(&["f_lo_hz", "f_hi_hz", "width_hz", "bragg_freq_hz"]);
    t.push_values(&[band.0, band.1, band.1 - band.0, r.cavity.mirrors.bragg_freq()]);
    write_table(&t, c.out.join("stopband.csv"), &mut artifacts)?;
    let ladder = mirror::resonance_frequencies(&r.cavity, band)?;
    let model = crate::jc::SystemModel {
        transmon: r.transmon.clone(),
        modes: ladder,
    };
    write_table(
        &papercheck::mode_table(&model),
        c.out.join("modes.csv"),
        &mut artifacts,
    )?;
    if c.svg {
        let points: Vec<(f64, f64)> = {
            let n = 2001;
            (0..n)
                .map(|k| {
                    let f = band.0 - 30e6 + (band.1 - band.0 + 60e6) * k as f64 / (n - 1) as f64;
                    (f, mirror::mirror_reflection(f, &r.cavity.mirrors).map(|c| c.norm()))
                })
                .map(|(f, v)| Ok((f, v?)))
                .collect::<Result<_>>()?
        };
        let path = c.out.join("mirror_reflection.svg");
        svg::write_svg(
            &svg::Plot {
                title: "Mirror reflectance".into(),
                x_label: "frequency (Hz)".into(),
                y_label: "|r|".into(),
                traces: vec![svg::Trace {
                    label: "|r|".into(),
                    points,
                }],
            },
            &path,
        )?;
        artifacts.push(path);
    }
    Ok((artifacts, Vec::new()))
}

fn cmd_crossings(r: &Resolved, c: &Common) -> Result<Artifacts> {
    let mut artifacts = Vec::new();
    let (table, spec) = papercheck::crossings_table(r)?;
    write_table(&table, c.out.join("crossings.csv"), &mut artifacts)?;
    if c.svg {
        let m = r.system.modes.modes.len();
        let traces: Vec<svg::Trace> = (0..=m)
            .map(|b| svg::Trace {
                label: String::new(),
                points: spec
                    .currents
                    .iter()
                    .zip(&spec.branches)
                    .map(|(i, row)| (*i, row[b]))
                    .collect(),
            })
            .collect();
        let path = c.out.join("crossings.svg");
        svg::write_svg(
            &svg::Plot {
                title: "Avoided-crossing spectrum".into(),
                x_label: "coil current (A)".into(),
                y_label: "frequency (Hz)".into(),
                traces,
            },
            &path,
        )?;
        artifacts.push(path);
    }
    Ok((artifacts, Vec::new()))
}

fn cmd_numbersplit(r: &Resolved, c: &Common) -> Result<Artifacts> {
    let mut artifacts = Vec::new();
    let (table, traces) = papercheck::numbersplit_table(r)?;
    write_table(&table, c.out.join("numbersplit.csv"), &mut artifacts)?;
    if c.svg {
        let offset = traces
            .iter()
            .flat_map(|t| t.values.iter())
            .cloned()
            .fold(0.0_f64, f64::max);
        let path = c.out.join("numbersplit.svg");
        svg::write_svg(
            &svg::Plot {
                title: "Number-splitting spectra (offset per drive power)".into(),
                x_label: "frequency (Hz)".into(),
                y_label: "P_e (offset)".into(),
                traces: traces
                    .iter()
                    .enumerate()
                    .map(|(k, t)| svg::Trace {
                        label: format!("power {k}"),
                        points: t
                            .freqs
                            .iter()
                            .zip(&t.values)
                            .map(|(f, v)| (*f, v + k as f64 * offset))
                            .collect(),
                    })
                    .collect(),
            },
            &path,
        )?;
        artifacts.push(path);
    }
    Ok((artifacts, Vec::new()))
}

fn column(rows: &[Vec<f64>], k: usize) -> Vec<f64> {
    rows.iter().map(|r| r[k]).collect()
}

fn cmd_fit(r: &Resolved, model: &str, data: &Path, c: &Common) -> Result<Artifacts> {
    let (header, rows) = csvio::read_csv(data)?;
    if rows.is_empty() {
        return Err(Error::FitSetup("dataset CSV has no rows".into()));
    }
    let fitres = match model {
        "linear" => {
            require_columns(&header, 2, model)?;
            let x = column(&rows, 0);
            let y = column(&rows, 1);
            let (slope, intercept, _) = crate::math::linear_regression(&x, &y);
            let scale = slope.abs().max(intercept.abs()).max(1.0);
            fit::least_squares_fit(&fit::FitProblem {
                model: ModelKind::Linear,
                x,
                y,
                sigma: vec![1.0; rows.len()],
                init: vec![slope, intercept],
                bounds: vec![
                    (slope - 10.0 * scale, slope + 10.0 * scale),
                    (intercept - 10.0 * scale, intercept + 10.0 * scale),
                ],
                mask: None,
            })?
        }
        "flux" => {
            require_columns(&header, 2, model)?;
            let x = column(&rows, 0);
            let y = column(&rows, 1);
            let f_max = y.iter().cloned().fold(0.0_f64, f64::max);
            let f_min = y.iter().cloned().fold(f64::INFINITY, f64::min);
            let i_at_max = x[y
                .iter()
                .enumerate()
                .max_by(|a, b| a.1.partial_cmp(b.1).unwrap())
                .unwrap()
                .0];
            let i_at_min = x[y
                .iter()
                .enumerate()
                .min_by(|a, b| a.1.partial_cmp(b.1).unwrap())
                .unwrap()
                .0];
            let a_init = ((f_min / f_max) * (f_min / f_max)).clamp(0.02, 0.9);
            let ic_init = (2.0 * (i_at_min - i_at_max).abs()).max(1e-5);
            fit::least_squares_fit(&fit::FitProblem {
                model: ModelKind::FluxCurve,
                x,
                y,
                sigma: vec![f_max.max(1.0) * 1e-4; rows.len()],
                init: vec![f_max, a_init, ic_init, i_at_max],
                bounds: vec![
                    (0.8 * f_max, 1.2 * f_max),
                    (0.001, 0.95),
                    (0.3 * ic_init, 3.0 * ic_init),
                    (i_at_max - ic_init, i_at_max + ic_init),
                ],
                mask: None,
            })?
        }
        "t1" => {
            require_columns(&header, 2, model)?;
            let data = fit::SyntheticDataset {
                x: column(&rows, 0),
                y_noisy: column(&rows, 1),
                y_true: Vec::new(),
                noise_sigma: 0.0,
                seed: c.seed,
            };
            fit::fit_t1_curve(&data, r.idt.n_periods)?
        }
        "crossings" => {
            let m = r.system.modes.modes.len();
            require_columns(&header, m + 2, model)?;
            let currents = column(&rows, 0);
            let branches: Vec<Vec<f64>> = rows.iter().map(|row| row[1..].to_vec()).collect();
            fit::fit_crossings(&currents, &branches, &r.system, 1e3)?
        }
        "numbersplit" => {
            require_columns(&header, 3, model)?;
            let mut traces: Vec<spectra::SpectrumTrace> = Vec::new();
            let mut last_id = f64::NEG_INFINITY;
            for row in &rows {
                if row[0] != last_id {
                    traces.push(spectra::SpectrumTrace {
                        freqs: Vec::new(),
                        values: Vec::new(),
                    });
                    last_id = row[0];
                }
                let t = traces.last_mut().unwrap();
                t.freqs.push(row[1]);
                t.values.push(row[2]);
            }
            let p = &r.numbersplit;
            let mut init = vec![p.half_shift, p.mode_loss, p.qubit_linewidth];
            let mut bounds = vec![
                (0.2 * p.half_shift, 3.0 * p.half_shift),
                (0.2 * p.mode_loss, 3.0 * p.mode_loss),
                (0.3 * p.qubit_linewidth, 3.0 * p.qubit_linewidth),
            ];
            let peak = traces
                .iter()
                .flat_map(|t| t.values.iter())
                .cloned()
                .fold(0.0_f64, f64::max);
            for _ in &traces {
                init.extend_from_slice(&[0.8, 0.0, 1.0]);
                bounds.extend_from_slice(&[(0.0, 10.0), (-0.5 * peak, 0.5 * peak), (1e-3, 1e3)]);
            }
            fit::fit_number_splitting(
                &traces,
                p.qubit_freq,
                p.n_max,
                p.pull_per_phonon,
                &init,
                &bounds,
                (0.01 * peak).max(f64::MIN_POSITIVE),
            )?
        }
        other => {
            return Err(Error::Config(format!(
                "unknown fit model {other:?}; expected linear | flux | t1 | crossings | numbersplit"
            )))
        }
    };
    let path = c.out.join(format!("fit_{model}.json"));
    std::fs::write(&path, serde_json::to_string_pretty(&fitres)?)?;
    let warnings = if fitres.converged {
        Vec::new()
    } else {
        vec!["fit hit the iteration cap without converging".to_string()]
    };
    Ok((vec![path], warnings))
}

fn require_columns(header: &[String], n: usize, model: &str) -> Result<()> {
    if header.len() != n {
        return Err(Error::FitSetup(format!(
            "{model} fit expects {n} CSV columns, found {}",
            header.len()
        )));
    }
    Ok(())
}

fn run_papercheck(resolved: &Resolved, c: &Common, started: Instant) -> i32 {
    match papercheck::run(resolved, &c.out, c.seed, c.svg) {
        Ok(rep) => {
            for row in &rep.results {
                println!(
                    "{} {:2}. {} — {}",
                    if row.passed { "PASS" } else { "FAIL" },
                    row.index,
                    row.name,
                    row.detail
                );
            }
            let all = rep.all_passed();
            report("papercheck", started, rep.artifacts, Vec::new());
            if all {
                EXIT_OK
            } else {
                EXIT_ACCEPTANCE
            }
        }
        Err(e) => {
            eprintln!("sawsim: {e}");
            exit_code_for(&e)
        }
    }
}
