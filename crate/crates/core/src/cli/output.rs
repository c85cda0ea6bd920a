//! File formats: comma-separated tables with a header row and 17 significant
//! digits, one JSON object per file, and gnuplot scripts.

use std::fmt::Write as _;
use std::fs;
use std::path::{Path, PathBuf};

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::ivp::{OdeParams, State};
use crate::matcher::NodalSolution;
use crate::profile::ProfileSpec;
use crate::shooting::AngleCurve;

pub fn num(x: f64) -> String {
    format!("{x:.16e}")
}

/// Builds CSV text from a header and rows of preformatted cells.
pub fn csv<I, R>(header: &[&str], rows: I) -> String
where
    I: IntoIterator<Item = R>,
    R: IntoIterator<Item = String>,
{
    let mut out = header.join(",");
    out.push('\n');
    for row in rows {
        let cells: Vec<String> = row.into_iter().collect();
        out.push_str(&cells.join(","));
        out.push('\n');
    }
    out
}

pub fn write(path: &Path, contents: &str) -> Result<()> {
    if let Some(dir) = path.parent() {
        if !dir.as_os_str().is_empty() {
            fs::create_dir_all(dir)
                .map_err(|e| Error::Config(format!("cannot create {}: {e}", dir.display())))?;
        }
    }
    fs::write(path, contents).map_err(|e| Error::Config(format!("cannot write {}: {e}", path.display())))
}

pub fn write_json<T: Serialize>(path: &Path, value: &T) -> Result<()> {
    let mut text = serde_json::to_string_pretty(value)
        .map_err(|e| Error::Config(format!("cannot serialize {}: {e}", path.display())))?;
    text.push('\n');
    write(path, &text)
}

pub fn curve_csv(curve: &AngleCurve) -> String {
    csv(
        &["param", "angle", "radius", "zeros"],
        curve
            .knots
            .iter()
            .map(|k| [num(k.param), num(k.angle), num(k.radius), k.zeros.to_string()]),
    )
}

pub fn grid_csv(grid: &[State]) -> String {
    csv(
        &["t", "u", "up"],
        grid.iter().map(|s| [num(s.t), num(s.u), num(s.up)]),
    )
}

/// Reads a `t,u,up` table.
pub fn read_grid(path: &Path) -> Result<Vec<State>> {
    let text = fs::read_to_string(path)
        .map_err(|e| Error::Config(format!("cannot read {}: {e}", path.display())))?;
    let mut lines = text.lines();
    let header = lines.next().unwrap_or_default();
    if header.trim() != "t,u,up" {
        return Err(Error::Config(format!(
            "{}: expected header `t,u,up`, found `{header}`",
            path.display()
        )));
    }
    let mut grid = Vec::new();
    for (i, line) in lines.enumerate() {
        if line.trim().is_empty() {
            continue;
        }
        let cells: Vec<&str> = line.split(',').collect();
        let parsed: std::result::Result<Vec<f64>, _> = cells.iter().map(|c| c.trim().parse::<f64>()).collect();
        match parsed {
            Ok(v) if v.len() == 3 && v.iter().all(|x| x.is_finite()) => grid.push(State::new(v[0], v[1], v[2])),
            _ => {
                return Err(Error::Config(format!(
                    "{}: malformed row {}: `{line}`",
                    path.display(),
                    i + 2
                )))
            }
        }
    }
    Ok(grid)
}

fn finite(x: f64) -> Option<f64> {
    x.is_finite().then_some(x)
}

/// JSON companion of a solution grid; carries everything needed to re-verify
/// the solution from files alone.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct SolutionSummary {
    pub alpha: f64,
    pub beta: f64,
    pub k: usize,
    pub zeros: Vec<f64>,
    pub residual_norm: Option<f64>,
    pub seam_jump: [Option<f64>; 2],
    pub energy_monotonicity_violation: Option<f64>,
    pub passed: bool,
    pub t0: f64,
    pub delta_left: f64,
    pub delta_right: f64,
    pub mismatch_norm: f64,
    pub grid_points: usize,
    pub grid_file: String,
    pub profile: ProfileSpec,
    pub ode: OdeParams,
    pub report: serde_json::Value,
}

impl SolutionSummary {
    pub fn new(sol: &NodalSolution, profile: &ProfileSpec, ode: &OdeParams, grid_file: &str) -> Self {
        let r = &sol.report;
        Self {
            alpha: sol.alpha,
            beta: sol.beta_signed,
            k: sol.k,
            zeros: sol.zeros.clone(),
            residual_norm: finite(r.residual_sup),
            seam_jump: [finite(r.seam_jump[0]), finite(r.seam_jump[1])],
            energy_monotonicity_violation: finite(r.energy_violation),
            passed: r.passed,
            t0: sol.t0,
            delta_left: sol.delta_left,
            delta_right: sol.delta_right,
            mismatch_norm: sol.mismatch_norm,
            grid_points: sol.grid.len(),
            grid_file: grid_file.to_string(),
            profile: profile.clone(),
            ode: *ode,
            report: serde_json::to_value(r).unwrap_or(serde_json::Value::Null),
        }
    }
}

/// Resolves a solution path given as the JSON file, the CSV file, or their
/// shared stem.
pub fn solution_paths(path: &Path) -> (PathBuf, PathBuf) {
    match path.extension().and_then(|e| e.to_str()) {
        Some("json") => (path.to_path_buf(), path.with_extension("csv")),
        Some("csv") => (path.with_extension("json"), path.to_path_buf()),
        _ => {
            let s = path.as_os_str().to_string_lossy();
            (PathBuf::from(format!("{s}.json")), PathBuf::from(format!("{s}.csv")))
        }
    }
}

pub fn read_summary(path: &Path) -> Result<SolutionSummary> {
    let text = fs::read_to_string(path)
        .map_err(|e| Error::Config(format!("cannot read {}: {e}", path.display())))?;
    serde_json::from_str(&text).map_err(|e| Error::Config(format!("{}: {e}", path.display())))
}

pub struct Plot<'a> {
    pub title: &'a str,
    pub xlabel: &'a str,
    pub ylabel: &'a str,
    pub logx: bool,
    /// `(file, using, title)` per series.
    pub series: Vec<(String, &'a str, String)>,
}

pub fn gnuplot(plot: &Plot) -> String {
    let mut s = String::new();
    let _ = writeln!(s, "set datafile separator ','");
    let _ = writeln!(s, "set title '{}'", plot.title);
    let _ = writeln!(s, "set xlabel '{}'", plot.xlabel);
    let _ = writeln!(s, "set ylabel '{}'", plot.ylabel);
    if plot.logx {
        let _ = writeln!(s, "set logscale x");
    }
    let _ = writeln!(s, "set grid");
    let parts: Vec<String> = plot
        .series
        .iter()
        .map(|(file, using, title)| format!("'{file}' every ::1 using {using} with lines title '{title}'"))
        .collect();
    let _ = writeln!(s, "plot {}", parts.join(", \\\n     "));
    let _ = writeln!(s, "pause -1");
    s
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn seventeen_digits() {
        assert_eq!(num(0.1), "1.0000000000000001e-1");
        assert_eq!(num(0.1).parse::<f64>().unwrap(), 0.1);
    }

    #[test]
    fn grid_round_trip() {
        let dir = tempfile::tempdir().unwrap();
        let path = dir.path().join("g.csv");
        let grid = vec![State::new(0.0, 1.0 / 3.0, -2.0), State::new(0.5, 1e-300, 7.0)];
        write(&path, &grid_csv(&grid)).unwrap();
        assert_eq!(read_grid(&path).unwrap(), grid);
    }

    #[test]
    fn malformed_rows() {
        let dir = tempfile::tempdir().unwrap();
        let path = dir.path().join("g.csv");
        write(&path, "t,u,up\n0,1\n").unwrap();
        assert!(read_grid(&path).is_err());
        write(&path, "x,y\n").unwrap();
        assert!(read_grid(&path).is_err());
    }

    #[test]
    fn path_resolution() {
        let (j, c) = solution_paths(Path::new("out/solution_1"));
        assert_eq!((j, c), (PathBuf::from("out/solution_1.json"), PathBuf::from("out/solution_1.csv")));
        let (j, c) = solution_paths(Path::new("a/s.csv"));
        assert_eq!((j, c), (PathBuf::from("a/s.json"), PathBuf::from("a/s.csv")));
    }
}
