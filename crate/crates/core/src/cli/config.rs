//! Flat `key = value` run configuration.

use std::collections::BTreeMap;
use std::fmt::Write as _;
use std::path::Path;

use super::CliError;

pub struct KeySpec {
    pub key: &'static str,
    pub default: &'static str,
    pub help: &'static str,
}

/// Every recognised key with its default.
pub const SCHEMA: &[KeySpec] = &[
    KeySpec { key: "E", default: "9010", help: "Young's modulus, Pa" },
    KeySpec { key: "nu", default: "0.35", help: "Poisson ratio" },
    KeySpec { key: "alpha", default: "1", help: "Biot-Willis constant" },
    KeySpec { key: "c0", default: "4.5e-7", help: "constrained specific storage, 1/Pa" },
    KeySpec { key: "kappa", default: "1.4e-9", help: "permeability, mm^2" },
    KeySpec { key: "mu_f", default: "1.48e-5", help: "fluid viscosity, Pa min" },
    KeySpec { key: "c_b", default: "3e-5", help: "boundary conductance, mm/(min Pa)" },
    KeySpec { key: "p_sas", default: "1070", help: "subarachnoid pressure, Pa" },
    KeySpec { key: "p_vent", default: "1100", help: "ventricular pressure, Pa" },
    KeySpec { key: "q_injured", default: "9e-3", help: "source density on the injured region, mm^3/min per mm^2" },
    KeySpec { key: "dt", default: "1", help: "time step, min" },
    KeySpec { key: "t_max", default: "3000", help: "final time cap, min" },
    KeySpec { key: "plateau_tol", default: "1e-6", help: "relative per-step change that ends a run" },
    KeySpec { key: "mesh_width", default: "124", help: "synthetic mesh outer width, mm" },
    KeySpec { key: "mesh_height", default: "104", help: "synthetic mesh outer height, mm" },
    KeySpec { key: "ventricle_scale", default: "0.25", help: "ventricle size relative to the outer ellipse" },
    KeySpec { key: "injured_fraction", default: "0.018", help: "fraction of elements in the injured region" },
    KeySpec { key: "mesh_elements", default: "9155", help: "target element count of the synthetic mesh" },
    KeySpec { key: "rates", default: "2.25e-3,4.5e-3,9e-3,1.8e-2,3.6e-2", help: "absorption rates of rate-sweep" },
    KeySpec { key: "sweep_param", default: "kappa", help: "parameter of param-sweep: E, nu or kappa" },
    KeySpec { key: "sweep_values", default: "1.4e-10,1.4e-9,1.4e-8", help: "values of param-sweep" },
    KeySpec { key: "dump_dofs", default: "false", help: "also write every DOF value as CSV" },
    KeySpec { key: "verify_algorithm", default: "coupled", help: "coupled or decoupled" },
    KeySpec { key: "verify_nu", default: "0.3", help: "Poisson ratio of the manufactured problem" },
    KeySpec { key: "verify_K", default: "1", help: "hydraulic conductivity of the manufactured problem" },
    KeySpec { key: "verify_dt", default: "auto", help: "time step; auto is 1e-5 coupled, 1e-6 decoupled" },
    KeySpec { key: "verify_levels", default: "4", help: "number of refinement levels (>= 2)" },
    KeySpec { key: "verify_base_divisions", default: "17", help: "divisions per side of the coarsest mesh" },
    KeySpec { key: "verify_t_final", default: "0.001", help: "final time" },
    KeySpec { key: "verify_initial", default: "exact", help: "initial data: exact or zero-u" },
    KeySpec { key: "verify_load_time", default: "next", help: "load evaluation time: next or current" },
];

/// Help text listing every key and its default.
pub fn schema_help() -> String {
    let mut s = String::from("Configuration keys (key = default):\n");
    for k in SCHEMA {
        writeln!(s, "  {} = {}    # {}", k.key, k.default, k.help).unwrap();
    }
    s
}

#[derive(Debug, Clone, PartialEq)]
pub struct RunConfig {
    values: BTreeMap<&'static str, String>,
}

impl Default for RunConfig {
    fn default() -> Self {
        Self { values: SCHEMA.iter().map(|k| (k.key, k.default.to_string())).collect() }
    }
}

impl RunConfig {
    /// Parses `key = value` lines; `#` starts a comment. Unknown keys are rejected.
    pub fn parse(text: &str) -> Result<Self, CliError> {
        let mut cfg = Self::default();
        for (n, raw) in text.lines().enumerate() {
            let line = raw.split('#').next().unwrap().trim();
            if line.is_empty() {
                continue;
            }
            let (k, v) = line
                .split_once('=')
                .ok_or_else(|| CliError::Usage(format!("config line {}: expected key = value, got '{line}'", n + 1)))?;
            cfg.set(k.trim(), v.trim()).map_err(|e| match e {
                CliError::Usage(m) => CliError::Usage(format!("config line {}: {m}", n + 1)),
                other => other,
            })?;
        }
        Ok(cfg)
    }

    pub fn load(path: &Path) -> Result<Self, CliError> {
        let text = std::fs::read_to_string(path)
            .map_err(|e| CliError::Usage(format!("cannot read config {}: {e}", path.display())))?;
        Self::parse(&text)
    }

    pub fn set(&mut self, key: &str, value: &str) -> Result<(), CliError> {
        let spec = SCHEMA
            .iter()
            .find(|k| k.key == key)
            .ok_or_else(|| CliError::Usage(format!("unknown key '{key}'")))?;
        self.values.insert(spec.key, value.to_string());
        Ok(())
    }

    pub fn text(&self, key: &str) -> &str {
        self.values.get(key).unwrap_or_else(|| panic!("key '{key}' missing from schema"))
    }

    pub fn real(&self, key: &str) -> Result<f64, CliError> {
        parse_real(key, self.text(key))
    }

    pub fn integer(&self, key: &str) -> Result<usize, CliError> {
        let v = self.text(key);
        v.parse().map_err(|_| CliError::Usage(format!("{key}: expected a nonnegative integer, got '{v}'")))
    }

    pub fn boolean(&self, key: &str) -> Result<bool, CliError> {
        match self.text(key) {
            "true" => Ok(true),
            "false" => Ok(false),
            v => Err(CliError::Usage(format!("{key}: expected true or false, got '{v}'"))),
        }
    }

    pub fn reals(&self, key: &str) -> Result<Vec<f64>, CliError> {
        self.text(key).split(',').map(|s| parse_real(key, s.trim())).collect()
    }
}

fn parse_real(key: &str, v: &str) -> Result<f64, CliError> {
    v.parse::<f64>()
        .ok()
        .filter(|x| x.is_finite())
        .ok_or_else(|| CliError::Usage(format!("{key}: expected a real number, got '{v}'")))
}
