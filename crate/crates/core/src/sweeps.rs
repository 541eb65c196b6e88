//! Parameter scans: populations against the first detuning, spectra at the
//! named driving points and peak emission against the third Rabi frequency.

use std::str::FromStr;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::exec::Exec;
use crate::grid::GridSpec;
use crate::model::{build_liouvillian, SystemParams, ValidatedParams};
use crate::qrt::{spectrum_timedomain_with, CorrelationMode, TauGrid, DEFAULT_TAU_MAX};
use crate::spectrum::{
    exclude_pole, peak_of, spectrum_consistent_with, spectrum_eq10_with, Method, SpectrumSeries, Transition,
};
use crate::steadystate::steady_state;

/// Default first-detuning axis.
pub const DEFAULT_DELTA1_GRID: GridSpec = GridSpec {
    min: -20.0,
    max: 20.0,
    points: 801,
    log: false,
};

/// Default third-drive axis.
pub const DEFAULT_OMEGA3_GRID: GridSpec = GridSpec {
    min: 0.25,
    max: 50.0,
    points: 100,
    log: true,
};

/// Frequency grid wide enough for the sidebands at a given `Omega3`:
/// `[-25, 25]` with 2001 points up to `Omega3 = 10`, `[-120, 120]` with
/// 4801 points above.
pub fn default_nu_grid(omega3: f64) -> GridSpec {
    if omega3 <= 10.0 {
        GridSpec::linear(-25.0, 25.0, 2001)
    } else {
        GridSpec::linear(-120.0, 120.0, 4801)
    }
}

/// Evaluates all three lines with the chosen method. The literal method
/// silently drops grid points inside the pole guard.
pub fn evaluate_spectrum(p: &ValidatedParams, nu: &[f64], method: Method, exec: Exec) -> Result<SpectrumSeries> {
    match method {
        Method::Eq10 => spectrum_eq10_with(p, &exclude_pole(nu), exec),
        Method::QrtConsistent => spectrum_consistent_with(p, nu, exec),
        Method::TimeDomain => {
            let nu_max = nu.iter().fold(0.0_f64, |a, x| a.max(x.abs()));
            let grid = TauGrid::for_spectrum(DEFAULT_TAU_MAX, nu_max);
            spectrum_timedomain_with(p, nu, grid, CorrelationMode::Truncated, exec)
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct Column {
    pub name: String,
    pub values: Vec<f64>,
}

/// Sweep point that could not be evaluated.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct SkippedPoint {
    pub axis_value: f64,
    pub code: &'static str,
    pub message: String,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct SweepTable {
    pub axis_name: String,
    pub axis_values: Vec<f64>,
    pub columns: Vec<Column>,
    pub skipped: Vec<SkippedPoint>,
}

impl SweepTable {
    pub fn column(&self, name: &str) -> Option<&[f64]> {
        self.columns
            .iter()
            .find(|c| c.name == name)
            .map(|c| c.values.as_slice())
    }

    fn from_rows(axis_name: &str, names: &[String], rows: Vec<(f64, Result<Vec<f64>>)>) -> Self {
        let mut axis_values = Vec::with_capacity(rows.len());
        let mut columns: Vec<Column> = names
            .iter()
            .map(|n| Column {
                name: n.clone(),
                values: Vec::with_capacity(rows.len()),
            })
            .collect();
        let mut skipped = Vec::new();
        for (x, row) in rows {
            match row {
                Ok(values) => {
                    axis_values.push(x);
                    for (c, v) in columns.iter_mut().zip(values) {
                        c.values.push(v);
                    }
                }
                Err(e) => skipped.push(SkippedPoint {
                    axis_value: x,
                    code: e.code(),
                    message: e.to_string(),
                }),
            }
        }
        Self {
            axis_name: axis_name.to_string(),
            axis_values,
            columns,
            skipped,
        }
    }
}

fn check_axis(values: &[f64]) -> Result<()> {
    if values.is_empty() {
        return Err(Error::InvalidGrid("empty sweep axis".into()));
    }
    if !values.windows(2).all(|w| w[1] > w[0]) {
        return Err(Error::InvalidGrid("sweep axis must be strictly ascending".into()));
    }
    Ok(())
}

/// Steady-state `rho22`, `rho33`, `rho44` for each first detuning, the
/// other parameters held fixed. Singular points are recorded as skipped.
pub fn populations_vs_detuning(p: &ValidatedParams, delta1: &[f64]) -> Result<SweepTable> {
    populations_vs_detuning_with(p, delta1, Exec::default())
}

pub fn populations_vs_detuning_with(p: &ValidatedParams, delta1: &[f64], exec: Exec) -> Result<SweepTable> {
    check_axis(delta1)?;
    let base = *p.params();
    let rows = exec.map(delta1, |&d1| {
        let row = (|| {
            let mut q = base;
            q.delta[0] = d1;
            let q = q.validate()?;
            let psi = steady_state(&build_liouvillian(&q))?;
            Ok(psi.populations().to_vec())
        })();
        (d1, row)
    });
    let names = ["rho22", "rho33", "rho44"].map(String::from);
    Ok(SweepTable::from_rows("delta1", &names, rows))
}

/// Frequency grid used per sweep point.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum NuGrid {
    /// [`default_nu_grid`] of each point's `Omega3`.
    Auto,
    Fixed(GridSpec),
}

impl NuGrid {
    pub fn spec_for(&self, omega3: f64) -> GridSpec {
        match self {
            NuGrid::Auto => default_nu_grid(omega3),
            NuGrid::Fixed(g) => *g,
        }
    }
}

/// Column names of [`peak_vs_omega3`], in order.
pub fn peak_columns() -> Vec<String> {
    let mut names = Vec::new();
    for t in Transition::ALL {
        names.push(format!("peak_{}", t.label()));
    }
    for t in Transition::ALL {
        names.push(format!("argpeak_nu_{}", t.label()));
    }
    for t in Transition::ALL {
        names.push(format!("center_{}", t.label()));
    }
    names.push("center_nu".into());
    names
}

/// Peak value (global maximum over the frequency grid, ties toward line
/// center), its frequency, and the value nearest line center, per line and
/// per `Omega3`. `Omega1`, `Omega2` and everything else come from `p`.
pub fn peak_vs_omega3(p: &ValidatedParams, omega3: &[f64], nu: &NuGrid, method: Method) -> Result<SweepTable> {
    peak_vs_omega3_with(p, omega3, nu, method, Exec::default())
}

pub fn peak_vs_omega3_with(
    p: &ValidatedParams,
    omega3: &[f64],
    nu: &NuGrid,
    method: Method,
    exec: Exec,
) -> Result<SweepTable> {
    check_axis(omega3)?;
    // fail early on a malformed fixed grid rather than once per point
    if let NuGrid::Fixed(g) = nu {
        g.values()?;
    }
    let base = *p.params();
    let rows = exec.map(omega3, |&o3| {
        let row = (|| {
            let mut q = base;
            q.omega[2] = o3;
            let q = q.validate()?;
            let grid = nu.spec_for(o3).values()?;
            let s = evaluate_spectrum(&q, &grid, method, Exec::Sequential)?;
            let mut peaks = Vec::with_capacity(3);
            let mut args = Vec::with_capacity(3);
            let mut centers = Vec::with_capacity(3);
            let mut center_nu = 0.0;
            for t in Transition::ALL {
                let line = s.line(t).expect("all three lines evaluated");
                let (v, x) = peak_of(&s.nu, line).expect("non-empty grid");
                peaks.push(v);
                args.push(x);
                let (c, cx) = s.line_center(t).expect("non-empty grid");
                centers.push(c);
                center_nu = cx;
            }
            let mut row = peaks;
            row.extend(args);
            row.extend(centers);
            row.push(center_nu);
            Ok(row)
        })();
        (o3, row)
    });
    Ok(SweepTable::from_rows("omega3", &peak_columns(), rows))
}

/// Named driving points with the reference decay constants.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum FigurePoint {
    /// `Omega = (7, 4, 1)`.
    Fig2a,
    /// `Omega = (7, 4, 50)`.
    Fig2b,
}

impl FigurePoint {
    pub fn omega(self) -> [f64; 3] {
        match self {
            FigurePoint::Fig2a => [7.0, 4.0, 1.0],
            FigurePoint::Fig2b => [7.0, 4.0, 50.0],
        }
    }

    pub fn params(self) -> SystemParams {
        SystemParams::reference(self.omega())
    }

    pub fn name(self) -> &'static str {
        match self {
            FigurePoint::Fig2a => "fig2a",
            FigurePoint::Fig2b => "fig2b",
        }
    }
}

impl FromStr for FigurePoint {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "fig2a" => Ok(FigurePoint::Fig2a),
            "fig2b" => Ok(FigurePoint::Fig2b),
            other => Err(Error::UnknownPoint(other.to_string())),
        }
    }
}

/// Spectra and companion population scan at a named point.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct FigureBundle {
    pub point: FigurePoint,
    pub params: SystemParams,
    pub nu_grid: GridSpec,
    pub delta1_grid: GridSpec,
    pub spectrum: SpectrumSeries,
    pub populations: SweepTable,
}

pub fn figure_bundle(point: FigurePoint, method: Method) -> Result<FigureBundle> {
    let params = point.params();
    let p = params.validate()?;
    let nu_grid = default_nu_grid(params.omega[2]);
    let spectrum = evaluate_spectrum(&p, &nu_grid.values()?, method, Exec::default())?;
    let delta1_grid = DEFAULT_DELTA1_GRID;
    let populations = populations_vs_detuning(&p, &delta1_grid.values()?)?;
    Ok(FigureBundle {
        point,
        params,
        nu_grid,
        delta1_grid,
        spectrum,
        populations,
    })
}
