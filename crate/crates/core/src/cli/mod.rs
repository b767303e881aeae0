//! Command-line front end: `biot verify` and `biot edema`.

pub mod config;
pub mod vtk;

use std::ffi::OsString;
use std::fmt::Write as _;
use std::path::{Path, PathBuf};
use std::sync::Arc;

use clap::{CommandFactory, FromArgMatches, Parser, Subcommand, ValueEnum};
use log::info;
use thiserror::Error;

pub use config::{schema_help, RunConfig, SCHEMA};
pub use vtk::{write_vtk, write_vtk_to, FieldData, VtkField};

use crate::biot::{Algorithm, BiotError, BiotMaterial, LoadTime, TransientState};
use crate::edema::{
    linear_fit, max_icp_vs_rate, parameter_sweep, run_normal_state, run_tbi, sweep_csv, EdemaConfig, EdemaError,
    SweepParameter,
};
use crate::fem::CoefficientVector;
use crate::mesh::{load_mesh, synthetic_brain_mesh, Mesh};
use crate::verify::{convergence_study, InitialData, StudyConfig, VerifyError};

#[derive(Debug, Error)]
pub enum CliError {
    #[error("{0}")]
    Usage(String),
    #[error("{0}")]
    Domain(String),
    #[error("{0}")]
    Io(String),
    #[error("solver failure: {0}")]
    Solver(String),
}

impl CliError {
    pub fn exit_code(&self) -> i32 {
        match self {
            CliError::Solver(_) => 2,
            _ => 1,
        }
    }
}

impl From<BiotError> for CliError {
    fn from(e: BiotError) -> Self {
        match e {
            BiotError::Solver(s) => CliError::Solver(s.to_string()),
            other => CliError::Domain(other.to_string()),
        }
    }
}

impl From<VerifyError> for CliError {
    fn from(e: VerifyError) -> Self {
        match e {
            VerifyError::Biot(b) => b.into(),
            VerifyError::TooFewLevels(_) | VerifyError::StepMismatch { .. } => CliError::Usage(e.to_string()),
            other => CliError::Domain(other.to_string()),
        }
    }
}

impl From<EdemaError> for CliError {
    fn from(e: EdemaError) -> Self {
        match e {
            EdemaError::Biot(b) => b.into(),
            other => CliError::Domain(other.to_string()),
        }
    }
}

#[derive(Debug, Parser)]
#[command(name = "biot", version, about = "Three-field Biot poroelasticity solver")]
pub struct Cli {
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Manufactured-solution convergence study.
    Verify(VerifyArgs),
    /// Brain-edema runs.
    Edema(EdemaArgs),
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum AlgorithmArg {
    Coupled,
    Decoupled,
}

#[derive(Debug, clap::Args)]
pub struct VerifyArgs {
    #[arg(long, value_enum)]
    pub algorithm: Option<AlgorithmArg>,
    #[arg(long)]
    pub nu: Option<f64>,
    #[arg(long = "K")]
    pub k: Option<f64>,
    #[arg(long)]
    pub dt: Option<f64>,
    #[arg(long)]
    pub levels: Option<usize>,
    /// CSV destination; standard output when absent.
    #[arg(long)]
    pub out: Option<PathBuf>,
    #[arg(long)]
    pub config: Option<PathBuf>,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum Mode {
    Normal,
    Tbi,
    RateSweep,
    ParamSweep,
}

#[derive(Debug, clap::Args)]
pub struct EdemaArgs {
    #[arg(long, value_enum, default_value = "tbi")]
    pub mode: Mode,
    /// Mesh file, or `synthetic` for the generated slice.
    #[arg(long, default_value = "synthetic")]
    pub mesh: String,
    #[arg(long)]
    pub config: Option<PathBuf>,
    #[arg(long, default_value = ".")]
    pub out: PathBuf,
    /// Also write every DOF value as CSV.
    #[arg(long)]
    pub dump_dofs: bool,
}

fn command() -> clap::Command {
    Cli::command().after_help(schema_help())
}

/// Runs the CLI and returns the process exit code.
pub fn main_with_args<I, T>(args: I) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<OsString> + Clone,
{
    let matches = match command().try_get_matches_from(args) {
        Ok(m) => m,
        Err(e) => {
            let _ = e.print();
            return if e.use_stderr() { 1 } else { 0 };
        }
    };
    let cli = match Cli::from_arg_matches(&matches) {
        Ok(c) => c,
        Err(e) => {
            let _ = e.print();
            return 1;
        }
    };
    match run(cli) {
        Ok(()) => 0,
        Err(e) => {
            eprintln!("error: {e}");
            e.exit_code()
        }
    }
}

pub fn run(cli: Cli) -> Result<(), CliError> {
    match cli.command {
        Command::Verify(a) => cmd_verify(&a),
        Command::Edema(a) => cmd_edema(&a),
    }
}

fn load_config(path: Option<&Path>) -> Result<RunConfig, CliError> {
    path.map_or_else(|| Ok(RunConfig::default()), RunConfig::load)
}

pub fn study_config(args: &VerifyArgs, cfg: &RunConfig) -> Result<StudyConfig, CliError> {
    let algorithm = match args.algorithm {
        Some(AlgorithmArg::Coupled) => Algorithm::Coupled,
        Some(AlgorithmArg::Decoupled) => Algorithm::Decoupled,
        None => match cfg.text("verify_algorithm") {
            "coupled" => Algorithm::Coupled,
            "decoupled" => Algorithm::Decoupled,
            v => return Err(CliError::Usage(format!("verify_algorithm: expected coupled or decoupled, got '{v}'"))),
        },
    };
    let dt = match (args.dt, cfg.text("verify_dt")) {
        (Some(dt), _) => dt,
        (None, "auto") => match algorithm {
            Algorithm::Coupled => 1e-5,
            Algorithm::Decoupled => 1e-6,
        },
        (None, _) => cfg.real("verify_dt")?,
    };
    if !(dt > 0.0 && dt.is_finite()) {
        return Err(CliError::Usage(format!("dt must be positive, got {dt}")));
    }
    let levels = args.levels.map_or_else(|| cfg.integer("verify_levels"), Ok)?;
    let mut study = StudyConfig::new(
        algorithm,
        args.nu.map_or_else(|| cfg.real("verify_nu"), Ok)?,
        args.k.map_or_else(|| cfg.real("verify_K"), Ok)?,
        dt,
        levels,
    );
    study.base_divisions = cfg.integer("verify_base_divisions")?;
    study.t_final = cfg.real("verify_t_final")?;
    study.initial = match cfg.text("verify_initial") {
        "exact" => InitialData::Exact,
        "zero-u" => InitialData::ZeroDisplacement,
        v => return Err(CliError::Usage(format!("verify_initial: expected exact or zero-u, got '{v}'"))),
    };
    study.load_time = match cfg.text("verify_load_time") {
        "next" => LoadTime::Next,
        "current" => LoadTime::Current,
        v => return Err(CliError::Usage(format!("verify_load_time: expected next or current, got '{v}'"))),
    };
    if study.levels < 2 {
        return Err(CliError::Usage(format!("--levels must be at least 2, got {}", study.levels)));
    }
    if study.base_divisions == 0 {
        return Err(CliError::Usage("verify_base_divisions must be positive".into()));
    }
    Ok(study)
}

fn cmd_verify(args: &VerifyArgs) -> Result<(), CliError> {
    let cfg = load_config(args.config.as_deref())?;
    let study = study_config(args, &cfg)?;
    let table = convergence_study(&study)?;
    let csv = table.to_csv();
    match &args.out {
        Some(path) => write_file(path, &csv)?,
        None => print!("{csv}"),
    }
    Ok(())
}

pub fn edema_config(cfg: &RunConfig) -> Result<EdemaConfig, CliError> {
    let material = BiotMaterial::new(
        cfg.real("E")?,
        cfg.real("nu")?,
        cfg.real("alpha")?,
        cfg.real("c0")?,
        cfg.real("kappa")?,
        cfg.real("mu_f")?,
    )?;
    let c = EdemaConfig {
        material,
        c_b: cfg.real("c_b")?,
        p_sas: cfg.real("p_sas")?,
        p_vent: cfg.real("p_vent")?,
        q_injured: cfg.real("q_injured")?,
        dt: cfg.real("dt")?,
        t_max: cfg.real("t_max")?,
        plateau_tol: cfg.real("plateau_tol")?,
    };
    c.validate()?;
    Ok(c)
}

fn edema_mesh(spec: &str, cfg: &RunConfig) -> Result<Mesh, CliError> {
    if spec == "synthetic" {
        synthetic_brain_mesh(
            cfg.real("mesh_width")?,
            cfg.real("mesh_height")?,
            cfg.real("ventricle_scale")?,
            cfg.real("injured_fraction")?,
            cfg.integer("mesh_elements")?,
        )
        .map_err(|e| CliError::Domain(e.to_string()))
    } else {
        load_mesh(spec).map_err(|e| CliError::Io(format!("cannot load mesh {spec}: {e}")))
    }
}

fn cmd_edema(args: &EdemaArgs) -> Result<(), CliError> {
    let cfg = load_config(args.config.as_deref())?;
    let config = edema_config(&cfg)?;
    let dump = args.dump_dofs || cfg.boolean("dump_dofs")?;
    let mesh = Arc::new(edema_mesh(&args.mesh, &cfg)?);
    std::fs::create_dir_all(&args.out)
        .map_err(|e| CliError::Io(format!("cannot create {}: {e}", args.out.display())))?;
    info!("mesh: {} vertices, {} triangles", mesh.n_vertices(), mesh.n_triangles());
    match args.mode {
        Mode::Normal => {
            let state = run_normal_state(mesh.clone(), &config)?;
            let (lo, hi) = range(state.p.values());
            println!("normal state: p in [{lo:.4}, {hi:.4}] Pa, max |u| {:.6e} mm", state.u.max_magnitude());
            write_state(&args.out, "normal", &mesh, &state, dump)?;
        }
        Mode::Tbi => {
            let r = run_tbi(mesh.clone(), &config)?;
            println!(
                "injury: p_max {:.4} Pa, u_max {:.6e} mm, t_peak {} min, plateaued {}",
                r.p_max(),
                r.u_max(),
                r.t_peak(),
                r.plateaued
            );
            write_file(&args.out.join("tbi_series.csv"), &r.series.to_csv())?;
            write_state(&args.out, "tbi_final", &mesh, &r.final_state, dump)?;
        }
        Mode::RateSweep => {
            let pts = max_icp_vs_rate(mesh, &config, &cfg.reals("rates")?)?;
            let mut csv = String::from("rate,max_icp_pa\n");
            for (r, p) in &pts {
                writeln!(csv, "{r},{p:.6e}").unwrap();
            }
            if let Some((a, b, r2)) = linear_fit(&pts) {
                println!("max ICP = {a:.6e} * rate + {b:.6e}, R^2 = {r2:.6}");
            }
            write_file(&args.out.join("rate_sweep.csv"), &csv)?;
        }
        Mode::ParamSweep => {
            let name = cfg.text("sweep_param");
            let param: SweepParameter = name.parse()?;
            let rows = parameter_sweep(mesh, &config, param, &cfg.reals("sweep_values")?)?;
            let csv = sweep_csv(&rows);
            print!("{csv}");
            write_file(&args.out.join(format!("param_sweep_{name}.csv")), &csv)?;
        }
    }
    Ok(())
}

fn range(v: &[f64]) -> (f64, f64) {
    v.iter().fold((f64::INFINITY, f64::NEG_INFINITY), |(lo, hi), &x| (lo.min(x), hi.max(x)))
}

fn write_file(path: &Path, text: &str) -> Result<(), CliError> {
    std::fs::write(path, text).map_err(|e| CliError::Io(format!("cannot write {}: {e}", path.display())))
}

fn write_state(dir: &Path, stem: &str, mesh: &Mesh, s: &TransientState, dump: bool) -> Result<(), CliError> {
    let path = dir.join(format!("{stem}.vtk"));
    let fields = [
        VtkField::from_coefficients("p", &s.p),
        VtkField::from_coefficients("xi", &s.xi),
        VtkField::from_coefficients("u", &s.u),
    ];
    write_vtk(&path, mesh, &fields).map_err(|e| CliError::Io(format!("cannot write {}: {e}", path.display())))?;
    if dump {
        write_file(&dir.join(format!("{stem}_dofs.csv")), &dof_csv(&[("u", &s.u), ("xi", &s.xi), ("p", &s.p)]))?;
    }
    Ok(())
}

/// Every DOF with its coordinates, full order.
pub fn dof_csv(fields: &[(&str, &CoefficientVector)]) -> String {
    let mut s = String::from("field,dof,x,y,value\n");
    for (name, f) in fields {
        let space = f.space();
        for (i, v) in f.values().iter().enumerate() {
            let [x, y] = space.dof_coords(i);
            writeln!(s, "{name},{i},{x},{y},{v}").unwrap();
        }
    }
    s
}
