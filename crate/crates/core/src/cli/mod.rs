//! The `nodal-shoot` command line.
//!
//! ```text
//! nodal-shoot <profile|shoot|sweep-angles|match|verify> --config FILE
//!     [--set section.key=value]... [--jobs N] [--out DIR] [--all-roots]
//! ```
//!
//! Exit codes: 0 ok, 1 verification failure, 2 invalid input, 3 refinement
//! budget exhausted, 4 no solution found, 5 exponent precondition failed.

pub mod config;
pub mod output;

use std::f64::consts::PI;
use std::path::{Path, PathBuf};

use clap::{Parser, Subcommand};
use rayon::prelude::*;
use serde::Serialize;

use crate::error::{Error, Result};
use crate::ivp::{self, OdeParams};
use crate::matcher::{self, MatchOptions, MatchProblem, NodalSolution};
use crate::profile::{check_exponent, check_profile, ExponentReport, Profile, ValidationReport, DEFAULT_ASYMPTOTIC_TOL};
use crate::shooting::{self, AngleCurve, ConsistencyTally, Side, SweepOptions};
use crate::verify;
pub use config::{RunConfig, Task};
use output::{csv, num, Plot};

pub const EXIT_OK: u8 = 0;
pub const EXIT_VERIFY: u8 = 1;
pub const EXIT_INPUT: u8 = 2;
pub const EXIT_BUDGET: u8 = 3;
pub const EXIT_NOT_FOUND: u8 = 4;
pub const EXIT_EXPONENT: u8 = 5;

const PROFILE_POINTS: usize = 1001;

#[derive(Debug, Parser)]
#[command(name = "nodal-shoot", version, about = "Nodal solutions of singular Yamabe-type ODEs by double shooting")]
pub struct Cli {
    #[command(subcommand)]
    pub command: Command,
    /// TOML run configuration.
    #[arg(long, global = true)]
    pub config: Option<PathBuf>,
    /// Override a configuration key, e.g. `--set ode.lambda=5`.
    #[arg(long = "set", value_name = "KEY=VALUE", global = true)]
    pub overrides: Vec<String>,
    /// Worker threads (defaults to the number of cores).
    #[arg(long, global = true)]
    pub jobs: Option<usize>,
    /// Output directory (overrides `out` in the config).
    #[arg(long, global = true)]
    pub out: Option<PathBuf>,
    /// Keep every distinct root found from the seed set.
    #[arg(long, global = true)]
    pub all_roots: bool,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Validate the profile and tabulate h(t).
    Profile,
    /// Shoot from the configured alpha / beta values.
    Shoot,
    /// Build the left and right angle curves.
    SweepAngles,
    /// Search for solutions with the configured zero counts.
    Match,
    /// Re-verify a stored solution.
    Verify {
        /// Solution JSON, CSV, or their shared stem.
        path: Option<PathBuf>,
    },
}

impl Command {
    fn task(&self) -> Task {
        match self {
            Command::Profile => Task::Profile,
            Command::Shoot => Task::Shoot,
            Command::SweepAngles => Task::SweepAngles,
            Command::Match => Task::Match,
            Command::Verify { .. } => Task::Verify,
        }
    }
}

pub fn exit_code(err: &Error) -> u8 {
    match err {
        Error::InvalidSpec(_) | Error::Domain { .. } | Error::ProfileInvalid(_) | Error::Config(_) => EXIT_INPUT,
        Error::BudgetExhausted { .. } => EXIT_BUDGET,
        Error::NotFound(_) => EXIT_NOT_FOUND,
        Error::Exponent { .. } => EXIT_EXPONENT,
        Error::StepUnderflow { .. }
        | Error::Divergence { .. }
        | Error::AmbiguousAngle(_)
        | Error::Assembly { .. }
        | Error::Resolution(_) => EXIT_VERIFY,
    }
}

/// Parses `args` (including the program name) and runs the command.
pub fn main_with_args<I, T>(args: I) -> u8
where
    I: IntoIterator<Item = T>,
    T: Into<std::ffi::OsString> + Clone,
{
    let cli = match Cli::try_parse_from(args) {
        Ok(c) => c,
        Err(e) => {
            let _ = e.print();
            return if e.use_stderr() { EXIT_INPUT } else { EXIT_OK };
        }
    };
    run(&cli)
}

pub fn run(cli: &Cli) -> u8 {
    let mut builder = rayon::ThreadPoolBuilder::new();
    if let Some(j) = cli.jobs {
        if j == 0 {
            eprintln!("error: --jobs must be at least 1");
            return EXIT_INPUT;
        }
        builder = builder.num_threads(j);
    }
    let pool = match builder.build() {
        Ok(p) => p,
        Err(e) => {
            eprintln!("error: cannot start worker pool: {e}");
            return EXIT_INPUT;
        }
    };
    match pool.install(|| dispatch(cli)) {
        Ok(code) => code,
        Err(e) => {
            eprintln!("error: {e}");
            exit_code(&e)
        }
    }
}

fn dispatch(cli: &Cli) -> Result<u8> {
    if let Command::Verify { path: Some(path) } = &cli.command {
        let cfg = match &cli.config {
            Some(_) => Some(load(cli)?),
            None => None,
        };
        return cmd_verify(path, cfg.as_ref().and_then(|c| c.tolerances.clone()));
    }
    let cfg = load(cli)?;
    let out = cli
        .out
        .clone()
        .or_else(|| cfg.out.clone())
        .unwrap_or_else(|| PathBuf::from("out"));
    match &cli.command {
        Command::Profile => cmd_profile(&cfg, &out),
        Command::Shoot => cmd_shoot(&cfg, &out),
        Command::SweepAngles => cmd_sweep_angles(&cfg, &out),
        Command::Match => cmd_match(&cfg, &out, cli.all_roots),
        Command::Verify { path: None } => {
            let path = cfg
                .verify
                .solution
                .clone()
                .ok_or_else(|| Error::Config("verify needs a solution path".into()))?;
            cmd_verify(&path, cfg.tolerances.clone())
        }
        Command::Verify { .. } => unreachable!(),
    }
}

fn load(cli: &Cli) -> Result<RunConfig> {
    let cfg = RunConfig::load(cli.config.as_deref(), &cli.overrides)?;
    let task = cli.command.task();
    if let Some(t) = cfg.task {
        if t != task {
            return Err(Error::Config(format!(
                "config task `{}` does not match command `{}`",
                t.name(),
                task.name()
            )));
        }
    }
    Ok(cfg)
}

fn profile_of(cfg: &RunConfig) -> Result<Profile> {
    Profile::new(cfg.profile_spec()?)
}

#[derive(Serialize)]
struct ValidationFile<'a> {
    #[serde(flatten)]
    report: &'a ValidationReport,
    exponent: Option<ExponentReport>,
}

pub fn cmd_profile(cfg: &RunConfig, out: &Path) -> Result<u8> {
    let profile = profile_of(cfg)?;
    let params = cfg.ode.unwrap_or_else(|| OdeParams::new(1.0, 2.0));
    let report = check_profile(&profile, DEFAULT_ASYMPTOTIC_TOL, 256);
    let exponent = match cfg.ode {
        Some(p) => {
            let s = profile.spec();
            Some(check_exponent(s.n, s.m1, s.m2, p.q)?)
        }
        None => None,
    };

    let d = profile.d();
    let t0 = report.t0.unwrap_or(0.5 * d);
    let delta = params
        .delta
        .unwrap_or_else(|| (t0 / 100.0).min((d - t0) / 100.0).min(params.tol_abs.powf(0.25)));
    let rows = (0..PROFILE_POINTS).map(|i| {
        let t = delta + (d - 2.0 * delta) * i as f64 / (PROFILE_POINTS - 1) as f64;
        [num(t), num(profile.h(t))]
    });
    output::write(&out.join("profile.csv"), &csv(&["t", "h"], rows))?;
    output::write_json(
        &out.join("validation.json"),
        &ValidationFile {
            report: &report,
            exponent,
        },
    )?;
    output::write(
        &out.join("plot_profile.gp"),
        &output::gnuplot(&Plot {
            title: "mean curvature profile",
            xlabel: "t",
            ylabel: "h(t)",
            logx: false,
            series: vec![("profile.csv".into(), "1:2", "h".into())],
        }),
    )?;
    match report.t0 {
        Some(t0) => println!("t0 = {}", num(t0)),
        None => println!("t0 not found"),
    }
    if !report.passed {
        for f in &report.failures {
            eprintln!("profile check failed: {f}");
        }
        return Ok(EXIT_INPUT);
    }
    Ok(EXIT_OK)
}

pub fn cmd_shoot(cfg: &RunConfig, out: &Path) -> Result<u8> {
    let profile = profile_of(cfg)?;
    let params = cfg.ode_params()?;
    profile.t0()?;
    let jobs: Vec<(Side, usize, f64)> = cfg
        .shoot
        .alpha
        .iter()
        .enumerate()
        .map(|(i, &a)| (Side::Left, i, a))
        .chain(cfg.shoot.beta.iter().enumerate().map(|(i, &b)| (Side::Right, i, b)))
        .collect();
    if jobs.is_empty() {
        return Err(Error::Config("shoot needs [shoot] alpha and/or beta values".into()));
    }
    let results: Vec<Result<(shooting::ShotPoint, Option<ivp::Trajectory>)>> = jobs
        .par_iter()
        .map(|&(side, _, p)| {
            let shot = shooting::shoot(side, p, &profile, &params)?;
            let traj = if cfg.shoot.trajectories && p != 0.0 {
                Some(shooting::shoot_trajectory(side, p, &profile, &params)?)
            } else {
                None
            };
            Ok((shot, traj))
        })
        .collect();

    let mut rows = Vec::new();
    let mut series = Vec::new();
    for (&(side, i, _), res) in jobs.iter().zip(results) {
        let (shot, traj) = res?;
        let side_name = side_name(side);
        rows.push([
            side_name.to_string(),
            num(shot.param),
            num(shot.u_t0),
            num(shot.up_t0),
            num(shot.raw_angle()),
            num(shot.radius()),
            shot.zeros_inside.to_string(),
        ]);
        if let Some(traj) = traj {
            let stem = format!("trajectory_{side_name}_{i}");
            let body = csv(
                &["t", "u", "up", "E"],
                traj.samples
                    .iter()
                    .zip(&traj.energy)
                    .map(|(s, e)| [num(s.t), num(s.u), num(s.up), num(*e)]),
            );
            output::write(&out.join(format!("{stem}.csv")), &body)?;
            output::write(
                &out.join(format!("{stem}_zeros.csv")),
                &csv(&["t"], traj.zeros.iter().map(|z| [num(*z)])),
            )?;
            series.push((format!("{stem}.csv"), "1:2", format!("{side_name} {}", shot.param)));
        }
    }
    output::write(
        &out.join("shots.csv"),
        &csv(&["side", "param", "u_t0", "up_t0", "angle", "radius", "zeros"], rows),
    )?;
    if !series.is_empty() {
        output::write(
            &out.join("plot_trajectories.gp"),
            &output::gnuplot(&Plot {
                title: "shooting trajectories",
                xlabel: "t",
                ylabel: "u",
                logx: false,
                series,
            }),
        )?;
    }
    Ok(EXIT_OK)
}

fn side_name(side: Side) -> &'static str {
    match side {
        Side::Left => "left",
        Side::Right => "right",
    }
}

#[derive(Serialize)]
struct ConsistencyFile {
    left: ConsistencyTally,
    right: ConsistencyTally,
    mismatches: usize,
    bound_violations: usize,
    budget_exhausted: bool,
}

pub fn cmd_sweep_angles(cfg: &RunConfig, out: &Path) -> Result<u8> {
    let profile = profile_of(cfg)?;
    let params = cfg.ode_params()?;
    let s = &cfg.sweep;
    let opts = SweepOptions {
        theta_max: s.theta_max,
        budget: s.budget,
        stop_winding: s.stop_half_turns.map(|h| h * PI),
        ..SweepOptions::default()
    };
    if !(opts.theta_max > 0.0 && opts.theta_max < PI / 2.0) {
        return Err(Error::Config(format!(
            "theta_max = {} must lie in (0, pi/2)",
            opts.theta_max
        )));
    }
    let (left, right) = rayon::join(
        || shooting::angle_sweep_with(Side::Left, s.alpha_min, s.alpha_max, &profile, &params, &opts),
        || shooting::angle_sweep_with(Side::Right, s.beta_min, s.beta_max, &profile, &params, &opts),
    );
    let mut exhausted = false;
    let mut take = |r: Result<AngleCurve>| -> Result<AngleCurve> {
        match r {
            Ok(c) => Ok(c),
            Err(Error::BudgetExhausted { partial, .. }) => {
                exhausted = true;
                Ok(*partial)
            }
            Err(e) => Err(e),
        }
    };
    let (mut left, mut right) = (take(left)?, take(right)?);
    if s.extend_odd {
        left = shooting::extend_odd(&left);
        right = shooting::extend_odd(&right);
    }
    output::write(&out.join("left_curve.csv"), &output::curve_csv(&left))?;
    output::write(&out.join("right_curve.csv"), &output::curve_csv(&right))?;
    let (lt, rt) = (shooting::consistency(&left), shooting::consistency(&right));
    let file = ConsistencyFile {
        mismatches: lt.mismatches + rt.mismatches,
        bound_violations: lt.bound_violations + rt.bound_violations,
        left: lt,
        right: rt,
        budget_exhausted: exhausted,
    };
    output::write_json(&out.join("consistency.json"), &file)?;
    output::write(
        &out.join("plot_curves.gp"),
        &output::gnuplot(&Plot {
            title: "winding angles",
            xlabel: "parameter",
            ylabel: "angle",
            logx: true,
            series: vec![
                ("left_curve.csv".into(), "1:2", "a(alpha)".into()),
                ("right_curve.csv".into(), "1:2", "b(beta)".into()),
            ],
        }),
    )?;
    println!(
        "left: {} knots, right: {} knots, {} mismatches",
        left.knots.len(),
        right.knots.len(),
        file.mismatches
    );
    if exhausted {
        eprintln!("refinement budget of {} shots exhausted; partial curves written", s.budget);
        return Ok(EXIT_BUDGET);
    }
    Ok(EXIT_OK)
}

pub fn match_problem(cfg: &RunConfig, k: usize) -> Result<MatchProblem> {
    let profile = profile_of(cfg)?;
    let params = cfg.ode_params()?;
    let m = &cfg.matching;
    let mut problem = MatchProblem::new(k, profile, params);
    problem.alpha_range = (m.alpha_min, m.alpha_max);
    problem.beta_range = (m.beta_min, m.beta_max);
    problem.coarse_grid = m.coarse_grid;
    problem.options = MatchOptions {
        match_tol_rel: m.match_tol_rel,
        max_seeds: m.max_seeds,
        theta_max: m.theta_max,
        budget: m.budget,
        grid_points: m.grid_points,
        tolerances: Some(cfg.tolerance_set(&params)),
        ..MatchOptions::default()
    };
    Ok(problem)
}

pub fn cmd_match(cfg: &RunConfig, out: &Path, all_roots_flag: bool) -> Result<u8> {
    let ks = cfg.matching.k.clone();
    if ks.is_empty() {
        return Err(Error::Config("match needs a nonempty [match] k list".into()));
    }
    let all_roots = all_roots_flag || cfg.matching.all_roots;
    let spec = cfg.profile_spec()?;
    let params = cfg.ode_params()?;
    let problems: Vec<MatchProblem> = ks
        .iter()
        .map(|&k| match_problem(cfg, k))
        .collect::<Result<_>>()?;
    let results: Vec<Result<Vec<NodalSolution>>> = problems
        .par_iter()
        .map(|p| {
            if all_roots {
                matcher::find_nodal_all(p)
            } else {
                matcher::find_nodal(p).map(|s| vec![s])
            }
        })
        .collect();

    let mut code = EXIT_OK;
    for (&k, res) in ks.iter().zip(results) {
        match res {
            Ok(sols) => {
                for (i, sol) in sols.iter().enumerate() {
                    let stem = if i == 0 {
                        format!("solution_{k}")
                    } else {
                        format!("solution_{k}_{}", i + 1)
                    };
                    write_solution(out, &stem, sol, &spec, &params)?;
                    println!(
                        "k = {k}: alpha = {}, beta = {}, residual = {:.3e}, seam = {:.3e}, {}",
                        num(sol.alpha),
                        num(sol.beta_signed),
                        sol.report.residual_sup,
                        sol.report.seam_jump[0].max(sol.report.seam_jump[1]),
                        if sol.report.passed { "verified" } else { "FAILED verification" }
                    );
                    if !sol.report.passed {
                        for f in &sol.report.failures {
                            eprintln!("k = {k}: {f}");
                        }
                        if code == EXIT_OK {
                            code = EXIT_VERIFY;
                        }
                    }
                }
            }
            Err(e) => {
                eprintln!("k = {k}: {e}");
                if code == EXIT_OK {
                    code = exit_code(&e);
                }
            }
        }
    }
    Ok(code)
}

fn write_solution(out: &Path, stem: &str, sol: &NodalSolution, spec: &crate::profile::ProfileSpec, params: &OdeParams) -> Result<()> {
    let csv_name = format!("{stem}.csv");
    output::write(&out.join(&csv_name), &output::grid_csv(&sol.grid))?;
    output::write_json(
        &out.join(format!("{stem}.json")),
        &output::SolutionSummary::new(sol, spec, params, &csv_name),
    )?;
    output::write(
        &out.join(format!("plot_{stem}.gp")),
        &output::gnuplot(&Plot {
            title: &format!("nodal solution, k = {}", sol.k),
            xlabel: "t",
            ylabel: "u",
            logx: false,
            series: vec![(csv_name, "1:2", format!("k = {}", sol.k))],
        }),
    )
}

/// Rebuilds a solution from its CSV and JSON files.
pub fn load_solution(path: &Path) -> Result<(NodalSolution, Profile, OdeParams)> {
    let (json, grid_path) = output::solution_paths(path);
    let summary = output::read_summary(&json)?;
    let grid = output::read_grid(&grid_path)?;
    let profile = Profile::new(summary.profile.clone())?;
    summary.ode.validate()?;
    if grid.is_empty() {
        return Err(Error::Config(format!("{} holds no rows", grid_path.display())));
    }
    let t0 = profile.t0()?;
    let sol = NodalSolution {
        alpha: summary.alpha,
        beta_signed: summary.beta,
        k: summary.k,
        t0,
        delta_left: summary.delta_left,
        delta_right: summary.delta_right,
        mismatch_norm: summary.mismatch_norm,
        seam_jump: [0.0; 2],
        grid,
        zeros: Vec::new(),
        report: Default::default(),
    };
    Ok((sol, profile, summary.ode))
}

pub fn cmd_verify(path: &Path, tolerances: Option<verify::ToleranceSet>) -> Result<u8> {
    let (sol, profile, params) = load_solution(path)?;
    let tol = tolerances.unwrap_or_else(|| verify::ToleranceSet::for_params(&params));
    let report = verify::verify_solution(&sol, &profile, &params, &tol);
    let text = serde_json::to_string_pretty(&report).map_err(|e| Error::Config(e.to_string()))?;
    println!("{text}");
    if report.passed {
        Ok(EXIT_OK)
    } else {
        for f in &report.failures {
            eprintln!("verification failed: {f}");
        }
        Ok(EXIT_VERIFY)
    }
}
