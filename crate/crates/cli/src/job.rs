//! Reproducible units of work. A [`Job`] plus the parameter set fully
//! determines every byte a command writes; both are stored in the manifest
//! so that `replay` can regenerate the outputs elsewhere.

use std::path::{Path, PathBuf};

use flr4_core::grid::GridSpec;
use flr4_core::model::{component_label, CSign, COMPONENTS};
use flr4_core::spectrum::POLE_GUARD;
use flr4_core::steadystate::{stability_eigs, steady_state};
use flr4_core::sweeps::{
    evaluate_spectrum, figure_bundle, peak_vs_omega3, populations_vs_detuning, FigurePoint, NuGrid, SweepTable,
    DEFAULT_DELTA1_GRID, DEFAULT_OMEGA3_GRID,
};
use flr4_core::{build_liouvillian, Exec, Method, SpectrumSeries, SystemParams, Transition};
use serde::{Deserialize, Serialize};

use crate::output::{write_atomic, Csv};
use crate::CliError;

pub const TOOL: &str = "flr4";
pub const VERSION: &str = env!("CARGO_PKG_VERSION");

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Format {
    Csv,
    Json,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Figure {
    Fig2a,
    Fig2b,
    Fig3a,
    Fig3b,
    Fig4,
}

impl Figure {
    pub fn name(self) -> &'static str {
        match self {
            Figure::Fig2a => "fig2a",
            Figure::Fig2b => "fig2b",
            Figure::Fig3a => "fig3a",
            Figure::Fig3b => "fig3b",
            Figure::Fig4 => "fig4",
        }
    }

    pub fn params(self) -> SystemParams {
        match self {
            Figure::Fig2a | Figure::Fig3a | Figure::Fig4 => FigurePoint::Fig2a.params(),
            Figure::Fig2b | Figure::Fig3b => FigurePoint::Fig2b.params(),
        }
    }
}

/// Transitions selected for output.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum LineSelection {
    All,
    One(Transition),
}

impl LineSelection {
    fn transitions(self) -> Vec<Transition> {
        match self {
            LineSelection::All => Transition::ALL.to_vec(),
            LineSelection::One(t) => vec![t],
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "command", rename_all = "kebab-case")]
pub enum Job {
    Steady { format: Format },
    Eigs,
    Spectrum { nu: GridSpec, method: Method, lines: LineSelection },
    Populations { delta1: GridSpec },
    SweepOmega3 { omega3: GridSpec, method: Method },
    Figure { figure: Figure },
}

/// Where a job writes. Single-file jobs print to stdout without a path.
#[derive(Debug, Clone)]
pub enum Target {
    Stdout,
    File(PathBuf),
    Dir(PathBuf),
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Manifest {
    pub tool: String,
    pub version: String,
    pub job: Job,
    pub params: SystemParams,
    pub c_sign: String,
    /// Derived metadata; ignored when replaying.
    #[serde(default)]
    pub details: serde_json::Value,
}

impl Manifest {
    fn new(job: &Job, params: &SystemParams, details: serde_json::Value) -> Self {
        Self {
            tool: TOOL.into(),
            version: VERSION.into(),
            job: job.clone(),
            params: *params,
            c_sign: CSign::DERIVED.as_str().into(),
            details,
        }
    }
}

fn emit(target: &Target, default_name: &str, contents: &str) -> Result<Vec<PathBuf>, CliError> {
    let path = match target {
        Target::Stdout => {
            print!("{contents}");
            return Ok(Vec::new());
        }
        Target::File(p) => p.clone(),
        Target::Dir(d) => d.join(default_name),
    };
    write_atomic(&path, contents).map_err(|e| CliError::io(&path, e))?;
    Ok(vec![path])
}

fn write_in(dir: &Path, name: &str, contents: &str) -> Result<PathBuf, CliError> {
    let path = dir.join(name);
    write_atomic(&path, contents).map_err(|e| CliError::io(&path, e))?;
    Ok(path)
}

fn spectrum_details(s: &SpectrumSeries, grid: &GridSpec) -> serde_json::Value {
    let excluded = grid.points - s.nu.len();
    serde_json::json!({
        "method": s.method.as_str(),
        "nu_grid": grid,
        "pole_guard": if s.method == Method::Eq10 { Some(POLE_GUARD) } else { None },
        "nu_points_excluded": excluded,
        "coherent_weight": s.coherent_weight,
        "units": "mu^2 / gamma, relative to each line center",
    })
}

fn spectrum_csv(manifest: &Manifest, s: &SpectrumSeries, lines: LineSelection) -> String {
    let ts = lines.transitions();
    let mut columns = vec!["nu"];
    columns.extend(ts.iter().map(|t| t.label()));
    let mut csv = Csv::new(manifest, &columns);
    let cols: Vec<&[f64]> = ts.iter().map(|&t| s.line(t).expect("line evaluated")).collect();
    for (k, &x) in s.nu.iter().enumerate() {
        let mut row = vec![x];
        row.extend(cols.iter().map(|c| c[k]));
        csv.row(&row);
    }
    csv.into_string()
}

fn table_csv(manifest: &Manifest, t: &SweepTable) -> String {
    let mut columns = vec![t.axis_name.as_str()];
    columns.extend(t.columns.iter().map(|c| c.name.as_str()));
    let mut csv = Csv::new(manifest, &columns);
    for (k, &x) in t.axis_values.iter().enumerate() {
        let mut row = vec![x];
        row.extend(t.columns.iter().map(|c| c.values[k]));
        csv.row(&row);
    }
    csv.into_string()
}

fn table_details(t: &SweepTable, axis: &GridSpec, method: Option<Method>) -> serde_json::Value {
    serde_json::json!({
        "axis": axis,
        "method": method.map(Method::as_str),
        "nu_grid": if method.is_some() { Some("per point: [-25,25]x2001 for omega3<=10, [-120,120]x4801 above") } else { None },
        "skipped": t.skipped,
    })
}

/// Runs a job, returning the files written.
pub fn run(job: &Job, params: &SystemParams, target: &Target) -> Result<Vec<PathBuf>, CliError> {
    let p = params.validate()?;
    match job {
        Job::Steady { format } => {
            let psi = steady_state(&build_liouvillian(&p))?;
            let report = psi.check();
            let manifest = Manifest::new(job, params, serde_json::json!({ "state_report": report }));
            let text = match format {
                Format::Csv => {
                    let mut csv = Csv::new(&manifest, &["label", "re", "im", "element"]);
                    for k in 1..=15 {
                        let z = psi.get(k);
                        csv.labeled_row(&format!("psi{k}"), &[z.re, z.im], &component_label(k));
                    }
                    csv.labeled_row("rho11", &[psi.ground_population(), 0.0], "rho11");
                    csv.into_string()
                }
                Format::Json => {
                    let entries: Vec<_> = (1..=15)
                        .map(|k| {
                            let z = psi.get(k);
                            let (a, b) = COMPONENTS[k - 1];
                            serde_json::json!({ "index": k, "element": format!("rho{a}{b}"), "re": z.re, "im": z.im })
                        })
                        .collect();
                    let doc = serde_json::json!({
                        "manifest": manifest,
                        "psi": entries,
                        "rho11": psi.ground_population(),
                    });
                    serde_json::to_string_pretty(&doc).expect("serializable") + "\n"
                }
            };
            let ext = if *format == Format::Csv { "csv" } else { "json" };
            emit(target, &format!("steady.{ext}"), &text)
        }
        Job::Eigs => {
            let eigs = stability_eigs(&build_liouvillian(&p));
            let manifest = Manifest::new(job, params, serde_json::json!({ "order": "descending real part" }));
            let mut csv = Csv::new(&manifest, &["index", "re", "im"]);
            for (k, e) in eigs.iter().enumerate() {
                csv.row(&[(k + 1) as f64, e.re, e.im]);
            }
            emit(target, "eigs.csv", &csv.into_string())
        }
        Job::Spectrum { nu, method, lines } => {
            let s = evaluate_spectrum(&p, &nu.values()?, *method, Exec::default())?;
            let manifest = Manifest::new(job, params, spectrum_details(&s, nu));
            emit(target, "spectrum.csv", &spectrum_csv(&manifest, &s, *lines))
        }
        Job::Populations { delta1 } => {
            let t = populations_vs_detuning(&p, &delta1.values()?)?;
            let manifest = Manifest::new(job, params, table_details(&t, delta1, None));
            emit(target, "populations.csv", &table_csv(&manifest, &t))
        }
        Job::SweepOmega3 { omega3, method } => {
            let t = peak_vs_omega3(&p, &omega3.values()?, &NuGrid::Auto, *method)?;
            let manifest = Manifest::new(job, params, table_details(&t, omega3, Some(*method)));
            emit(target, "peaks.csv", &table_csv(&manifest, &t))
        }
        Job::Figure { figure } => {
            let dir = match target {
                Target::Dir(d) => d.clone(),
                _ => return Err(CliError::usage("figure output needs --out-dir")),
            };
            if *params != figure.params() {
                return Err(CliError::usage("figure parameters are fixed; manifest was edited"));
            }
            run_figure(job, *figure, &dir)
        }
    }
}

fn run_figure(job: &Job, figure: Figure, dir: &Path) -> Result<Vec<PathBuf>, CliError> {
    let name = figure.name();
    let params = figure.params();
    let mut files = Vec::new();
    let details = match figure {
        Figure::Fig2a | Figure::Fig2b => {
            let point = if figure == Figure::Fig2a { FigurePoint::Fig2a } else { FigurePoint::Fig2b };
            let b = figure_bundle(point, Method::Eq10)?;
            let details = serde_json::json!({
                "spectrum": spectrum_details(&b.spectrum, &b.nu_grid),
                "populations": table_details(&b.populations, &b.delta1_grid, None),
            });
            let manifest = Manifest::new(job, &params, details.clone());
            files.push(write_in(dir, &format!("{name}_spectrum.csv"), &spectrum_csv(&manifest, &b.spectrum, LineSelection::All))?);
            files.push(write_in(dir, &format!("{name}_populations.csv"), &table_csv(&manifest, &b.populations))?);
            details
        }
        Figure::Fig3a | Figure::Fig3b => {
            let t = populations_vs_detuning(&params.validate()?, &DEFAULT_DELTA1_GRID.values()?)?;
            let details = table_details(&t, &DEFAULT_DELTA1_GRID, None);
            let manifest = Manifest::new(job, &params, details.clone());
            files.push(write_in(dir, &format!("{name}_populations.csv"), &table_csv(&manifest, &t))?);
            details
        }
        Figure::Fig4 => {
            let t = peak_vs_omega3(&params.validate()?, &DEFAULT_OMEGA3_GRID.values()?, &NuGrid::Auto, Method::Eq10)?;
            let details = table_details(&t, &DEFAULT_OMEGA3_GRID, Some(Method::Eq10));
            let manifest = Manifest::new(job, &params, details.clone());
            files.push(write_in(dir, &format!("{name}_peaks.csv"), &table_csv(&manifest, &t))?);
            details
        }
    };
    let manifest = Manifest::new(job, &params, details);
    let json = serde_json::to_string_pretty(&manifest).expect("serializable") + "\n";
    files.push(write_in(dir, &format!("{name}_manifest.json"), &json)?);
    Ok(files)
}
