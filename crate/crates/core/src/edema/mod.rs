//! Brain-edema application in mm–min–Pa units.
//!
//! The skull side (tag [`BRAIN_OUTER`]) is clamped and absorbs fluid through
//! a Robin law towards the subarachnoid pressure; the ventricle wall (tag
//! [`BRAIN_VENTRICLE`]) carries the ventricular pressure both as a Dirichlet
//! value and as a normal traction. An injury is a constant fluid source on
//! region [`REGION_INJURED`].

use std::fmt::Write as _;
use std::sync::Arc;

use log::{debug, info};
use thiserror::Error;

use crate::biot::{
    solve_steady, BiotError, BiotMaterial, CoupledStepper, ProblemData, Robin, Source, Spaces, TransientState,
};
use crate::mesh::{synthetic_brain_mesh, Mesh, MeshError, BRAIN_OUTER, BRAIN_VENTRICLE, REGION_INJURED};

#[derive(Debug, Error)]
pub enum EdemaError {
    #[error("invalid parameter: {0}")]
    Domain(String),
    #[error("the mesh has no injured region (region {REGION_INJURED})")]
    NoInjuredRegion,
    #[error(transparent)]
    Biot(#[from] BiotError),
    #[error(transparent)]
    Mesh(#[from] MeshError),
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct EdemaConfig {
    pub material: BiotMaterial,
    /// Boundary conductance, mm/(min·Pa).
    pub c_b: f64,
    /// Subarachnoid (far-field) pressure, Pa.
    pub p_sas: f64,
    /// Ventricular pressure, Pa.
    pub p_vent: f64,
    /// Source density on the injured region, mm³/min per mm².
    pub q_injured: f64,
    /// Time step, min.
    pub dt: f64,
    /// Final time cap, min.
    pub t_max: f64,
    /// Relative per-step change of the maximum pressure below which the run stops.
    pub plateau_tol: f64,
}

pub const BASELINE_E: f64 = 9010.0;
pub const BASELINE_NU: f64 = 0.35;
pub const BASELINE_C0: f64 = 4.5e-7;
pub const BASELINE_KAPPA: f64 = 1.4e-9;
pub const BASELINE_MU_F: f64 = 1.48e-5;

impl EdemaConfig {
    pub fn baseline() -> Self {
        Self {
            material: BiotMaterial::new(BASELINE_E, BASELINE_NU, 1.0, BASELINE_C0, BASELINE_KAPPA, BASELINE_MU_F)
                .expect("baseline material is valid"),
            c_b: 3e-5,
            p_sas: 1070.0,
            p_vent: 1100.0,
            q_injured: 9e-3,
            dt: 1.0,
            t_max: 3000.0,
            plateau_tol: 1e-6,
        }
    }

    pub fn validate(&self) -> Result<(), EdemaError> {
        let positive = [("c_b", self.c_b), ("dt", self.dt), ("t_max", self.t_max), ("plateau_tol", self.plateau_tol)];
        for (name, v) in positive {
            if !(v > 0.0 && v.is_finite()) {
                return Err(EdemaError::Domain(format!("{name} must be positive, got {v}")));
            }
        }
        if !(self.q_injured >= 0.0 && self.q_injured.is_finite()) {
            return Err(EdemaError::Domain(format!("q_injured must be nonnegative, got {}", self.q_injured)));
        }
        Ok(())
    }
}

/// The default synthetic slice: 124 × 104 mm, about 9155 elements with
/// 1.8 % of them injured.
pub fn default_brain_mesh() -> Result<Mesh, MeshError> {
    synthetic_brain_mesh(124.0, 104.0, 0.25, 0.018, 9155)
}

/// Absorption conductance `Q0 / (p_d · A_SAS)`.
pub fn conductance(q0: f64, p_d: f64, a_sas: f64) -> Result<f64, EdemaError> {
    for (name, v) in [("Q0", q0), ("p_d", p_d), ("A_SAS", a_sas)] {
        if !(v > 0.0 && v.is_finite()) {
            return Err(EdemaError::Domain(format!("{name} must be positive, got {v}")));
        }
    }
    Ok(q0 / (p_d * a_sas))
}

/// Boundary conditions without the injury source.
pub fn edema_boundary_data(config: &EdemaConfig) -> ProblemData {
    let p_vent = config.p_vent;
    let mut data = ProblemData::default();
    data.dirichlet_u.push((BRAIN_OUTER, Arc::new(|_, _, _| [0.0, 0.0])));
    data.robin.push(Robin { tag: BRAIN_OUTER, c_b: config.c_b, p_far: config.p_sas });
    data.dirichlet_p.push((BRAIN_VENTRICLE, Arc::new(move |_, _, _| p_vent)));
    data.traction.push((BRAIN_VENTRICLE, Arc::new(move |_, _, _, n| [-p_vent * n[0], -p_vent * n[1]])));
    data
}

fn injury_data(config: &EdemaConfig) -> ProblemData {
    let mut data = edema_boundary_data(config);
    let q = config.q_injured;
    if q != 0.0 {
        data.source = Some(Source { value: Arc::new(move |_, _, _| q), region: Some(REGION_INJURED) });
    }
    data
}

/// Steady balance of absorption and discharge (no source).
pub fn run_normal_state(mesh: Arc<Mesh>, config: &EdemaConfig) -> Result<TransientState, EdemaError> {
    config.validate()?;
    let spaces = Spaces::new(mesh);
    Ok(solve_steady(&spaces, &config.material, &edema_boundary_data(config), 0.0)?)
}

#[derive(Debug, Clone, Default, PartialEq)]
pub struct TimeSeries {
    /// min
    pub times: Vec<f64>,
    /// Pa
    pub max_icp: Vec<f64>,
    /// mm
    pub max_disp: Vec<f64>,
}

pub const TIME_SERIES_HEADER: &str = "t_min,max_icp_pa,max_disp_mm";

impl TimeSeries {
    fn push(&mut self, s: &TransientState) {
        self.times.push(s.t);
        self.max_icp.push(s.p.values().iter().copied().fold(f64::NEG_INFINITY, f64::max));
        self.max_disp.push(s.u.max_magnitude());
    }

    pub fn len(&self) -> usize {
        self.times.len()
    }

    pub fn is_empty(&self) -> bool {
        self.times.is_empty()
    }

    pub fn to_csv(&self) -> String {
        let mut s = format!("{TIME_SERIES_HEADER}\n");
        for i in 0..self.len() {
            writeln!(s, "{},{:.10e},{:.10e}", self.times[i], self.max_icp[i], self.max_disp[i]).unwrap();
        }
        s
    }

    /// First time the maximum pressure has covered `fraction` of its total rise.
    pub fn time_to_fraction(&self, fraction: f64) -> f64 {
        let (first, last) = (self.max_icp[0], *self.max_icp.last().unwrap());
        let target = first + fraction * (last - first);
        let i = self.max_icp.iter().position(|&v| v >= target).unwrap_or(self.len() - 1);
        self.times[i]
    }
}

#[derive(Debug, Clone)]
pub struct TbiResult {
    pub series: TimeSeries,
    pub normal_state: TransientState,
    pub final_state: TransientState,
    /// Whether the stopping tolerance was met before `t_max`.
    pub plateaued: bool,
}

impl TbiResult {
    pub fn p_max(&self) -> f64 {
        *self.series.max_icp.last().unwrap()
    }

    pub fn u_max(&self) -> f64 {
        *self.series.max_disp.last().unwrap()
    }

    /// Time to 99 % of the pressure rise.
    pub fn t_peak(&self) -> f64 {
        self.series.time_to_fraction(0.99)
    }
}

/// Transient injury run from the normal state, stopped at the pressure
/// plateau or at `t_max`.
pub fn run_tbi(mesh: Arc<Mesh>, config: &EdemaConfig) -> Result<TbiResult, EdemaError> {
    config.validate()?;
    if mesh.region_area(REGION_INJURED) <= 0.0 {
        return Err(EdemaError::NoInjuredRegion);
    }
    let spaces = Spaces::new(mesh.clone());
    let normal = run_normal_state(mesh, config)?;
    let stepper = CoupledStepper::new(&spaces, &config.material, config.dt, &injury_data(config))?;
    let mut state = stepper.initial_state(0.0, normal.u.clone(), normal.p.clone())?;
    let mut series = TimeSeries::default();
    series.push(&state);
    let max_steps = (config.t_max / config.dt).ceil() as usize;
    let mut plateaued = false;
    for n in 1..=max_steps {
        let mut next = stepper.step(&state)?;
        next.t = n as f64 * config.dt;
        state = next;
        series.push(&state);
        let k = series.len() - 1;
        let (prev, cur) = (series.max_icp[k - 1], series.max_icp[k]);
        if ((cur - prev) / cur).abs() < config.plateau_tol {
            plateaued = true;
            break;
        }
    }
    info!(
        "injury run: {} steps, plateau {plateaued}, max ICP {:.2} Pa, max displacement {:.4} mm",
        series.len() - 1,
        series.max_icp.last().unwrap(),
        series.max_disp.last().unwrap()
    );
    Ok(TbiResult { series, normal_state: normal, final_state: state, plateaued })
}

/// Plateau maximum pressure for each absorption rate, sorted by rate.
pub fn max_icp_vs_rate(mesh: Arc<Mesh>, config: &EdemaConfig, rates: &[f64]) -> Result<Vec<(f64, f64)>, EdemaError> {
    let mut rates = rates.to_vec();
    rates.sort_by(f64::total_cmp);
    if let Some(&bad) = rates.iter().find(|r| !(**r >= 0.0)) {
        return Err(EdemaError::Domain(format!("absorption rate must be nonnegative, got {bad}")));
    }
    let configs: Vec<_> = rates.iter().map(|&q_injured| EdemaConfig { q_injured, ..*config }).collect();
    let results = run_cases(&mesh, &configs)?;
    Ok(rates.into_iter().zip(results).map(|(rate, r)| (rate, r.p_max())).collect())
}

/// Independent injury runs, in input order, spread over the available cores.
fn run_cases(mesh: &Arc<Mesh>, configs: &[EdemaConfig]) -> Result<Vec<TbiResult>, EdemaError> {
    let workers = std::thread::available_parallelism().map_or(1, |n| n.get());
    let mut out = Vec::with_capacity(configs.len());
    for chunk in configs.chunks(workers) {
        if chunk.len() == 1 {
            out.push(run_tbi(mesh.clone(), &chunk[0])?);
            continue;
        }
        let results: Vec<_> = std::thread::scope(|s| {
            let handles: Vec<_> = chunk.iter().map(|c| s.spawn(move || run_tbi(mesh.clone(), c))).collect();
            handles.into_iter().map(|h| h.join().expect("injury run panicked")).collect()
        });
        for r in results {
            out.push(r?);
        }
    }
    for (c, r) in configs.iter().zip(&out) {
        debug!("q {} E {} nu {} kappa {}: p_max {}", c.q_injured, c.material.e(), c.material.nu(), c.material.kappa(), r.p_max());
    }
    Ok(out)
}

/// Least-squares line through `(x, y)`: returns slope, intercept and R².
pub fn linear_fit(points: &[(f64, f64)]) -> Option<(f64, f64, f64)> {
    let n = points.len() as f64;
    if points.len() < 2 {
        return None;
    }
    let mx = points.iter().map(|p| p.0).sum::<f64>() / n;
    let my = points.iter().map(|p| p.1).sum::<f64>() / n;
    let sxx: f64 = points.iter().map(|p| (p.0 - mx).powi(2)).sum();
    let sxy: f64 = points.iter().map(|p| (p.0 - mx) * (p.1 - my)).sum();
    let syy: f64 = points.iter().map(|p| (p.1 - my).powi(2)).sum();
    if sxx == 0.0 {
        return None;
    }
    let slope = sxy / sxx;
    let r2 = if syy == 0.0 { 1.0 } else { sxy * sxy / (sxx * syy) };
    Some((slope, my - slope * mx, r2))
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum SweepParameter {
    YoungModulus,
    PoissonRatio,
    Permeability,
}

impl std::str::FromStr for SweepParameter {
    type Err = EdemaError;
    fn from_str(s: &str) -> Result<Self, Self::Err> {
        match s {
            "E" | "e" => Ok(Self::YoungModulus),
            "nu" => Ok(Self::PoissonRatio),
            "kappa" => Ok(Self::Permeability),
            _ => Err(EdemaError::Domain(format!("unknown sweep parameter '{s}' (expected E, nu or kappa)"))),
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SweepRow {
    pub value: f64,
    pub mu: f64,
    pub inv_lambda: f64,
    pub u_max: f64,
    pub p_max: f64,
    pub t_peak: f64,
}

pub const SWEEP_HEADER: &str = "value,mu,inv_lambda,u_max_mm,p_max_pa,t_peak_min";

pub fn sweep_csv(rows: &[SweepRow]) -> String {
    let mut s = format!("{SWEEP_HEADER}\n");
    for r in rows {
        writeln!(s, "{},{:.6e},{:.6e},{:.6e},{:.6e},{}", r.value, r.mu, r.inv_lambda, r.u_max, r.p_max, r.t_peak)
            .unwrap();
    }
    s
}

/// One injury run per value of the swept parameter, the others held at `config`.
pub fn parameter_sweep(
    mesh: Arc<Mesh>,
    config: &EdemaConfig,
    param: SweepParameter,
    values: &[f64],
) -> Result<Vec<SweepRow>, EdemaError> {
    let materials = values
        .iter()
        .map(|&value| match param {
            SweepParameter::YoungModulus => config.material.with_e(value),
            SweepParameter::PoissonRatio => config.material.with_nu(value),
            SweepParameter::Permeability => config.material.with_kappa(value),
        })
        .collect::<Result<Vec<_>, _>>()?;
    let configs: Vec<_> = materials.iter().map(|&material| EdemaConfig { material, ..*config }).collect();
    let results = run_cases(&mesh, &configs)?;
    Ok(values
        .iter()
        .zip(materials.iter().zip(results))
        .map(|(&value, (material, r))| SweepRow {
            value,
            mu: material.mu(),
            inv_lambda: 1.0 / material.lambda(),
            u_max: r.u_max(),
            p_max: r.p_max(),
            t_peak: r.t_peak(),
        })
        .collect())
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn linear_fit_exact_line() {
        let pts: Vec<_> = (0..5).map(|i| (i as f64, 3.0 * i as f64 - 2.0)).collect();
        let (a, b, r2) = linear_fit(&pts).unwrap();
        assert!((a - 3.0).abs() < 1e-14 && (b + 2.0).abs() < 1e-14 && (r2 - 1.0).abs() < 1e-14);
        assert!(linear_fit(&[(1.0, 2.0)]).is_none());
        assert!(linear_fit(&[(1.0, 2.0), (1.0, 3.0)]).is_none());
    }

    #[test]
    fn conductance_values() {
        let c = conductance(70.0, 30.0, 76000.0).unwrap();
        assert!((c - 3.070_175e-5).abs() < 1e-10);
        assert_eq!(format!("{:.0e}", c), "3e-5");
        assert!((c / 3.0e-5 - 1.0).abs() < 0.05);
        assert!((conductance(140.0, 30.0, 76000.0).unwrap() - 2.0 * c).abs() < 1e-18);
        assert_eq!(conductance(1.0, 1.0, 1.0).unwrap(), 1.0);
        assert!(conductance(0.0, 1.0, 1.0).is_err());
    }

    #[test]
    fn baseline_values() {
        let c = EdemaConfig::baseline();
        assert!((c.material.conductivity() - 1.4e-9 / 1.48e-5).abs() < 1e-18);
        assert!((c.material.mu() - 3337.0).abs() < 0.5);
        assert_eq!((c.p_sas, c.p_vent, c.c_b, c.q_injured), (1070.0, 1100.0, 3e-5, 9e-3));
        assert!(c.validate().is_ok());
        assert!(EdemaConfig { dt: 0.0, ..c }.validate().is_err());
    }

    #[test]
    fn sweep_parameter_names() {
        assert_eq!("kappa".parse::<SweepParameter>().unwrap(), SweepParameter::Permeability);
        assert!("mu".parse::<SweepParameter>().is_err());
    }

    #[test]
    fn time_to_fraction() {
        let s = TimeSeries { times: vec![0.0, 1.0, 2.0, 3.0], max_icp: vec![0.0, 50.0, 99.5, 100.0], max_disp: vec![0.0; 4] };
        assert_eq!(s.time_to_fraction(0.99), 2.0);
        assert_eq!(s.time_to_fraction(0.5), 1.0);
    }
}
