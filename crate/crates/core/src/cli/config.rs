//! Flat `key = value` parameter files.
//!
//! ```text
//! # lines starting with '#' are comments
//! units = "mhz"          # or "rad_per_us"
//! gamma_c = 10
//! J = 500
//! delta_L_prime = -100
//! ```
//!
//! Frequencies are read as multiples of 2π·MHz unless `units = "rad_per_us"`.

use std::collections::BTreeMap;
use std::fmt::Write as _;
use std::str::FromStr;

use crate::error::{Error, Result};
use crate::params::{from_mhz, thermal_occupancy, to_mhz, SystemParams};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub enum Units {
    /// Plain numbers mean value × 2π MHz.
    #[default]
    Mhz,
    RadPerUs,
}

impl Units {
    pub fn name(self) -> &'static str {
        match self {
            Units::Mhz => "mhz",
            Units::RadPerUs => "rad_per_us",
        }
    }

    fn to_canonical(self, v: f64) -> f64 {
        match self {
            Units::Mhz => from_mhz(v),
            Units::RadPerUs => v,
        }
    }

    fn in_units(self, v: f64) -> f64 {
        match self {
            Units::Mhz => to_mhz(v),
            Units::RadPerUs => v,
        }
    }
}

impl FromStr for Units {
    type Err = String;

    fn from_str(s: &str) -> std::result::Result<Self, String> {
        match s {
            "mhz" | "2pi_mhz" => Ok(Units::Mhz),
            "rad_per_us" => Ok(Units::RadPerUs),
            _ => Err(format!("unknown units '{s}' (expected \"mhz\" or \"rad_per_us\")")),
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
enum Kind {
    Frequency,
    Dimensionless,
    Temperature,
}

const KEYS: &[(&str, Kind)] = &[
    ("gamma_c", Kind::Frequency),
    ("gamma_at", Kind::Frequency),
    ("gamma_m", Kind::Frequency),
    ("omega_m", Kind::Frequency),
    ("J", Kind::Frequency),
    ("g1", Kind::Frequency),
    ("g_coll", Kind::Frequency),
    ("delta_L_prime", Kind::Frequency),
    ("delta_R_prime", Kind::Frequency),
    ("delta_L", Kind::Frequency),
    ("delta_R", Kind::Frequency),
    ("beta", Kind::Dimensionless),
    ("Delta_L", Kind::Frequency),
    ("Delta_R", Kind::Frequency),
    ("alpha", Kind::Dimensionless),
    ("alpha_L", Kind::Dimensionless),
    ("alpha_R", Kind::Dimensionless),
    ("epsilon", Kind::Frequency),
    ("T_kelvin", Kind::Temperature),
    ("n_th", Kind::Dimensionless),
];

fn kind_of(key: &str) -> Option<Kind> {
    KEYS.iter().find(|(k, _)| *k == key).map(|&(_, kind)| kind)
}

/// True for every key a config file may set.
pub fn is_known_key(key: &str) -> bool {
    kind_of(key).is_some()
}

/// Whether `key` is read in the file's frequency units (as opposed to a
/// dimensionless amplitude or a temperature).
pub fn is_frequency_key(key: &str) -> bool {
    kind_of(key) == Some(Kind::Frequency)
}

/// Key-value pairs as written, before unit conversion.
#[derive(Debug, Clone, PartialEq, Default)]
pub struct RawConfig {
    pub units: Units,
    values: BTreeMap<String, f64>,
    lines: BTreeMap<String, usize>,
}

impl RawConfig {
    pub fn parse(text: &str) -> Result<Self> {
        let mut raw = RawConfig::default();
        let mut units_line = None;
        for (index, line) in text.lines().enumerate() {
            let number = index + 1;
            let err = |message: String| Error::Config {
                line: Some(number),
                message,
            };
            let content = line.split('#').next().unwrap_or("").trim();
            if content.is_empty() {
                continue;
            }
            let (key, value) = content
                .split_once('=')
                .ok_or_else(|| err(format!("expected 'key = value', got '{content}'")))?;
            let key = key.trim();
            let value = value.trim();

            if key == "units" {
                if units_line.is_some() {
                    return Err(err("duplicate key 'units'".into()));
                }
                raw.units = value.trim_matches('"').parse().map_err(err)?;
                units_line = Some(number);
                continue;
            }
            if !is_known_key(key) {
                return Err(err(format!("unknown key '{key}'")));
            }
            let v: f64 = value
                .parse()
                .map_err(|_| err(format!("'{value}' is not a number (key '{key}')")))?;
            if !v.is_finite() {
                return Err(err(format!("'{key}' must be finite")));
            }
            if let Some(first) = raw.lines.get(key) {
                return Err(err(format!("duplicate key '{key}' (first set on line {first})")));
            }
            raw.values.insert(key.to_string(), v);
            raw.lines.insert(key.to_string(), number);
        }
        Ok(raw)
    }

    /// The stored fields of `p` in the given units. δ′ is written directly
    /// when β = 0; otherwise the bare detunings and β are written so that
    /// re-reading reproduces `p` exactly.
    pub fn from_params(p: &SystemParams, units: Units) -> Self {
        let f = |v: f64| units.in_units(v);
        let mut values = BTreeMap::new();
        let mut put = |k: &str, v: f64| {
            values.insert(k.to_string(), v);
        };
        put("gamma_c", f(p.gamma_c));
        put("gamma_at", f(p.gamma_at));
        put("gamma_m", f(p.gamma_m));
        put("omega_m", f(p.omega_m));
        put("J", f(p.tunnelling));
        put("g1", f(p.g1));
        put("g_coll", f(p.g_coll));
        if p.beta == 0.0 {
            put("delta_L_prime", f(p.delta_l));
            put("delta_R_prime", f(p.delta_r));
        } else {
            put("delta_L", f(p.delta_l));
            put("delta_R", f(p.delta_r));
            put("beta", p.beta);
        }
        put("Delta_L", f(p.atom_detuning_l));
        put("Delta_R", f(p.atom_detuning_r));
        if p.alpha_l == p.alpha_r {
            put("alpha", p.alpha_l);
        } else {
            put("alpha_L", p.alpha_l);
            put("alpha_R", p.alpha_r);
        }
        put("epsilon", f(p.epsilon));
        put("n_th", p.n_th);
        RawConfig {
            units,
            values,
            lines: BTreeMap::new(),
        }
    }

    pub fn get(&self, key: &str) -> Option<f64> {
        self.values.get(key).copied()
    }

    /// Overrides one key, clearing whichever keys conflict with it.
    pub fn set(&mut self, key: &str, value: f64) -> Result<()> {
        if !is_known_key(key) {
            return Err(Error::config(format!("unknown key '{key}'")));
        }
        let conflicts: &[&str] = match key {
            "alpha" => &["alpha_L", "alpha_R"],
            "alpha_L" | "alpha_R" => &["alpha"],
            "T_kelvin" => &["n_th"],
            "n_th" => &["T_kelvin"],
            _ => &[],
        };
        if key == "alpha_L" || key == "alpha_R" {
            // keep the other side when splitting a shared alpha
            if let Some(a) = self.get("alpha") {
                self.values.entry("alpha_L".into()).or_insert(a);
                self.values.entry("alpha_R".into()).or_insert(a);
            }
        }
        for k in conflicts {
            self.values.remove(*k);
        }
        self.values.insert(key.to_string(), value);
        self.lines.remove(key);
        Ok(())
    }

    /// True when the detunings are given as bare δ with a nonzero β; the sign
    /// convention of the 2g₁β shift is then worth a second look.
    pub fn uses_bare_shift(&self) -> bool {
        self.values.contains_key("delta_L") && self.get("beta").is_some_and(|b| b != 0.0)
    }

    fn located(&self, key: &str, message: String) -> Error {
        Error::Config {
            line: self.lines.get(key).copied(),
            message,
        }
    }

    pub fn resolve(&self) -> Result<SystemParams> {
        let mut missing = Vec::new();
        let mut need = |key: &'static str| -> f64 {
            match self.get(key) {
                Some(v) => v,
                None => {
                    missing.push(key);
                    f64::NAN
                }
            }
        };
        let f = |v: f64| self.units.to_canonical(v);

        let gamma_c = f(need("gamma_c"));
        let gamma_at = f(need("gamma_at"));
        let gamma_m = f(need("gamma_m"));
        let omega_m = f(need("omega_m"));
        let tunnelling = f(need("J"));
        let g1 = f(need("g1"));
        let g_coll = f(need("g_coll"));
        let atom_detuning_l = f(need("Delta_L"));
        let atom_detuning_r = f(need("Delta_R"));

        let has = |k: &str| self.values.contains_key(k);
        let primed = has("delta_L_prime") || has("delta_R_prime");
        let bare = has("delta_L") || has("delta_R");
        if primed && bare {
            let key = if has("delta_L") { "delta_L" } else { "delta_R" };
            return Err(self.located(
                key,
                "give either delta_L_prime/delta_R_prime or delta_L/delta_R, not both".into(),
            ));
        }
        let (dl, dr) = if bare {
            (need("delta_L"), need("delta_R"))
        } else {
            (need("delta_L_prime"), need("delta_R_prime"))
        };

        let (alpha_l, alpha_r) = match (self.get("alpha"), has("alpha_L") || has("alpha_R")) {
            (Some(_), true) => {
                return Err(self.located("alpha", "give either alpha or alpha_L/alpha_R, not both".into()))
            }
            (Some(a), false) => (a, a),
            (None, true) => (need("alpha_L"), need("alpha_R")),
            (None, false) => (need("alpha"), f64::NAN),
        };

        if !missing.is_empty() {
            return Err(Error::config(format!("missing keys: {}", missing.join(", "))));
        }

        let n_th = match (self.get("T_kelvin"), self.get("n_th")) {
            (Some(_), Some(_)) => {
                return Err(self.located("T_kelvin", "give either T_kelvin or n_th, not both".into()))
            }
            (Some(t), None) => thermal_occupancy(omega_m, t)
                .map_err(|e| self.located("T_kelvin", e.to_string()))?,
            (None, n) => n.unwrap_or(0.0),
        };

        let mut p = SystemParams {
            gamma_c,
            gamma_at,
            gamma_m,
            omega_m,
            tunnelling,
            g1,
            g_coll,
            delta_l: f(dl),
            delta_r: f(dr),
            atom_detuning_l,
            atom_detuning_r,
            alpha_l,
            alpha_r,
            beta: self.get("beta").unwrap_or(0.0),
            epsilon: f(self.get("epsilon").unwrap_or(0.0)),
            n_th,
        };
        if !bare {
            p = p.with_modified_detunings(p.delta_l, p.delta_r);
        }
        Ok(p)
    }

    pub fn render(&self) -> String {
        let mut out = String::new();
        let _ = writeln!(out, "units = \"{}\"", self.units.name());
        // stable order: declaration order of KEYS
        for (key, _) in KEYS {
            if let Some(v) = self.get(key) {
                let _ = writeln!(out, "{key} = {v:?}");
            }
        }
        out
    }
}

pub fn parse_config(text: &str) -> Result<SystemParams> {
    RawConfig::parse(text)?.resolve()
}
