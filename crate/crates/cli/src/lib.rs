//! Command-line driver: configuration, orchestration and CSV output.
//!
//! Exit codes: 0 success, 1 I/O error, 2 validation failure (bad config,
//! condition violated without `force`, bad parameters), 3 construction error
//! during the run.

pub mod config;
pub mod output;

use std::fs;
use std::io::Write;
use std::path::{Path, PathBuf};

use nozzleflow_core::diagnostics::{l1_error_vs_fan, post_average_failures};
use nozzleflow_core::initial::{initial_state, InitialData};
use nozzleflow_core::newton::NewtonOptions;
use nozzleflow_core::nozzle::{parse_table, tabulated_geometry};
use nozzleflow_core::scheme::{run, RunOutput, SchemeParams, StepState};
use nozzleflow_core::{
    mu_sigma, validate_condition_m, AdmissibilityConstants, ConditionReport, GasConstants, Geometry, Majorant,
    NozzleProfile,
};
use thiserror::Error;

pub use config::{parse_config, ConfigIssue, InitSpec, MajorantSpec, NozzleSpec, RunConfig};

#[derive(Debug, Error)]
pub enum CliError {
    #[error("invalid configuration:\n{}", .0.iter().map(|i| format!("  {i}")).collect::<Vec<_>>().join("\n"))]
    Config(Vec<ConfigIssue>),

    #[error("{path}: {source}")]
    Io {
        path: PathBuf,
        #[source]
        source: std::io::Error,
    },

    #[error("validation failed: {0}")]
    Validation(String),

    #[error("{0}")]
    Construction(nozzleflow_core::Error),
}

impl CliError {
    pub fn exit_code(&self) -> u8 {
        match self {
            CliError::Io { .. } => 1,
            CliError::Config(_) | CliError::Validation(_) => 2,
            CliError::Construction(_) => 3,
        }
    }
}

fn io_err(path: &Path) -> impl FnOnce(std::io::Error) -> CliError + '_ {
    move |source| CliError::Io {
        path: path.to_path_buf(),
        source,
    }
}

fn invalid(e: nozzleflow_core::Error) -> CliError {
    CliError::Validation(e.to_string())
}

fn read(path: &Path) -> Result<String, CliError> {
    fs::read_to_string(path).map_err(io_err(path))
}

/// Read and parse a config file.
pub fn load_config(path: &Path) -> Result<RunConfig, CliError> {
    parse_config(&read(path)?).map_err(CliError::Config)
}

/// Everything needed to start a run at one mesh size.
#[derive(Debug, Clone)]
pub struct Problem {
    pub c: GasConstants,
    pub consts: AdmissibilityConstants,
    pub profile: NozzleProfile,
    pub report: ConditionReport,
    pub data: InitialData,
    pub params: SchemeParams,
    pub init: StepState,
}

pub fn constants(cfg: &RunConfig) -> Result<(GasConstants, AdmissibilityConstants), CliError> {
    let c = GasConstants::new(cfg.gamma).map_err(invalid)?;
    let k = mu_sigma(&c).map_err(invalid)?.with_epsilon(cfg.epsilon).map_err(invalid)?;
    Ok((c, k))
}

/// Nozzle profile on the mesh `dx`; relative paths resolve against `base`.
pub fn build_profile(cfg: &RunConfig, dx: f64, base: &Path) -> Result<NozzleProfile, CliError> {
    let (_, k) = constants(cfg)?;
    let geometry = match &cfg.nozzle {
        NozzleSpec::Constant => Geometry::Constant,
        NozzleSpec::Laval { h, x_cut } => Geometry::Laval { h: *h, x_cut: *x_cut },
        NozzleSpec::WindTunnel { h, x_cut } => Geometry::WindTunnel { h: *h, x_cut: *x_cut },
        NozzleSpec::Table(p) => {
            let path = base.join(p);
            let (x, a) = parse_table(&read(&path)?).map_err(|e| CliError::Validation(format!("{}: {e}", path.display())))?;
            tabulated_geometry(x, a).map_err(|e| CliError::Validation(format!("{}: {e}", path.display())))?
        }
    };
    let profile = match &cfg.majorant {
        MajorantSpec::Derived => NozzleProfile::with_derived_b(geometry, k.mu, dx).map_err(invalid)?,
        MajorantSpec::Zero => NozzleProfile::new(geometry, Majorant::Zero).map_err(invalid)?,
        MajorantSpec::Table(p) => {
            let path = base.join(p);
            let (x, b) = parse_table(&read(&path)?).map_err(|e| CliError::Validation(format!("{}: {e}", path.display())))?;
            let maj = Majorant::from_table(x, b).map_err(|e| CliError::Validation(format!("{}: {e}", path.display())))?;
            NozzleProfile::new(geometry, maj).map_err(invalid)?
        }
    };
    Ok(profile.with_source_scale(cfg.source_scale))
}

pub fn initial_data(cfg: &RunConfig, base: &Path) -> Result<InitialData, CliError> {
    match &cfg.init {
        InitSpec::Preset(d) => Ok(d.clone()),
        InitSpec::Table(p) => {
            let path = base.join(p);
            InitialData::parse_table(&read(&path)?).map_err(|e| CliError::Validation(format!("{}: {e}", path.display())))
        }
    }
}

/// Build the problem at mesh size `dx`. Fails when the nozzle breaks the
/// admissibility condition unless `force`.
pub fn prepare(cfg: &RunConfig, dx: f64, base: &Path, force: bool) -> Result<Problem, CliError> {
    let (c, consts) = constants(cfg)?;
    let profile = build_profile(cfg, dx, base)?;
    let report = validate_condition_m(&profile, &consts);
    if !report.passed() && !force {
        return Err(CliError::Validation(format!(
            "nozzle violates the admissibility condition, clause {} (use --force to run anyway)",
            report.violated_clause().unwrap_or("?")
        )));
    }
    if cfg.source_scale != 1.0 && !force {
        return Err(CliError::Validation("source_scale other than 1 needs force".into()));
    }
    let data = initial_data(cfg, base)?;
    let m = match cfg.m_amp {
        Some(m) => m,
        None => data.auto_m(cfg.x_min, cfg.x_max, dx, &profile, &c).map_err(invalid)?,
    };
    if !(m > 0.0) {
        return Err(CliError::Validation("M = 0 (all-vacuum data); set M explicitly".into()));
    }
    let mut params =
        SchemeParams::with_exponents(c, dx, m, cfg.t_final, &profile, cfg.alpha, cfg.beta, cfg.delta).map_err(invalid)?;
    params.newton = NewtonOptions {
        tol: cfg.newton_tol,
        max_iter: cfg.newton_max_iter,
    };
    let (init, _) = initial_state(&data, cfg.x_min, cfg.x_max, &params, &profile).map_err(invalid)?;
    Ok(Problem {
        c,
        consts,
        profile,
        report,
        data,
        params,
        init,
    })
}

/// What a finished run left on disk.
#[derive(Debug)]
pub struct RunSummary {
    pub out_dir: PathBuf,
    pub snapshots: Vec<PathBuf>,
    pub steps: usize,
    pub max_violation: f64,
    pub output: RunOutput,
}

fn prepare_out_dir(out: &Path) -> Result<(), CliError> {
    fs::create_dir_all(out).map_err(io_err(out))
}

fn write_run_files(out: &Path, p: &Problem, o: &RunOutput) -> Result<Vec<PathBuf>, CliError> {
    let mut written = Vec::new();
    for s in &o.snapshots {
        let path = out.join(output::snapshot_name(s.t));
        let mut w = output::create(&path).map_err(io_err(&path))?;
        output::write_snapshot(&mut w, &s.state, &p.params, &p.profile).map_err(io_err(&path))?;
        w.flush().map_err(io_err(&path))?;
        written.push(path);
    }
    let path = out.join("diagnostics.csv");
    let mut w = output::create(&path).map_err(io_err(&path))?;
    output::write_diagnostics(&mut w, &o.diagnostics).map_err(io_err(&path))?;
    w.flush().map_err(io_err(&path))?;
    Ok(written)
}

/// Run the configured problem and write `snap_<t>.csv` and
/// `diagnostics.csv` into `out`. On a construction error the files up to
/// the failing step are still written.
pub fn cmd_run(cfg: &RunConfig, base: &Path, out: &Path, force: bool) -> Result<RunSummary, CliError> {
    let p = prepare(cfg, cfg.dx, base, force || cfg.force)?;
    prepare_out_dir(out)?;
    let o = run(&p.params, &p.profile, p.init.clone(), &cfg.snapshots).map_err(invalid)?;
    let snapshots = write_run_files(out, &p, &o)?;
    for s in &o.snapshots {
        let bad = post_average_failures(&s.state, &p.params, &p.profile);
        assert!(bad.is_empty(), "cut-off left nodes outside the bounds: {bad:?}");
    }
    if let Some(e) = o.failure.clone() {
        return Err(CliError::Construction(e));
    }
    let max_violation = o
        .diagnostics
        .iter()
        .map(|d| d.max_z_violation.max(d.max_w_violation))
        .fold(0.0, f64::max);
    Ok(RunSummary {
        out_dir: out.to_path_buf(),
        snapshots,
        steps: o.diagnostics.len(),
        max_violation,
        output: o,
    })
}

/// Condition check and parameter constraints only.
pub fn cmd_validate(cfg: &RunConfig, base: &Path) -> Result<ConditionReport, CliError> {
    let p = prepare(cfg, cfg.dx, base, true)?;
    Ok(p.report)
}

/// One row of a refinement study.
#[derive(Debug, Clone, PartialEq)]
pub struct LevelResult {
    pub dx: f64,
    pub steps: usize,
    pub max_violation: f64,
    /// Against the exact fan; only for Riemann data in a source-free nozzle.
    pub l1_error: Option<f64>,
}

/// Run at `dx, dx/2, ...` (`levels` meshes) and write `convergence.csv`.
pub fn cmd_levels(cfg: &RunConfig, base: &Path, out: &Path, force: bool, levels: usize) -> Result<Vec<LevelResult>, CliError> {
    prepare_out_dir(out)?;
    let mut rows = Vec::new();
    for l in 0..levels {
        let dx = cfg.dx / 2f64.powi(l as i32);
        let p = prepare(cfg, dx, base, force || cfg.force)?;
        let o = run(&p.params, &p.profile, p.init.clone(), &[]).map_err(invalid)?;
        if let Some(e) = o.failure {
            return Err(CliError::Construction(e));
        }
        let l1 = match p.data {
            InitialData::Riemann { x0, left, right } if p.profile.is_homogeneous() => Some(
                l1_error_vs_fan(
                    &o.final_state,
                    dx,
                    nozzleflow_core::GasState::from_velocity(left.0, left.1),
                    nozzleflow_core::GasState::from_velocity(right.0, right.1),
                    x0,
                    &p.c,
                )
                .map_err(invalid)?,
            ),
            _ => None,
        };
        rows.push(LevelResult {
            dx,
            steps: o.diagnostics.len(),
            max_violation: o
                .diagnostics
                .iter()
                .map(|d| d.max_z_violation.max(d.max_w_violation))
                .fold(0.0, f64::max),
            l1_error: l1,
        });
    }
    let path = out.join("convergence.csv");
    let mut w = output::create(&path).map_err(io_err(&path))?;
    (|| {
        writeln!(w, "dx,steps,max_violation,l1_error")?;
        for r in &rows {
            let l1 = r.l1_error.map(|v| format!("{v:?}")).unwrap_or_default();
            writeln!(w, "{:?},{},{:?},{}", r.dx, r.steps, r.max_violation, l1)?;
        }
        w.flush()
    })()
    .map_err(io_err(&path))?;
    Ok(rows)
}

/// Parse `"rho,v"`.
pub fn parse_pair(s: &str) -> Result<(f64, f64), String> {
    let parts: Vec<&str> = s.split(',').map(str::trim).collect();
    if parts.len() != 2 {
        return Err(format!("expected \"rho,v\", got {s:?}"));
    }
    let num = |t: &str| t.parse::<f64>().ok().filter(|v| v.is_finite()).ok_or_else(|| format!("bad number {t:?}"));
    let (rho, v) = (num(parts[0])?, num(parts[1])?);
    if rho < 0.0 {
        return Err(format!("negative density in {s:?}"));
    }
    Ok((rho, v))
}
