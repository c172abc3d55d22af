//! Flat `key=value` sweep configuration.
//!
//! One entry per line; `#` starts a comment; blank lines are ignored. Keys
//! carry their unit in the name:
//!
//! | key | meaning | default |
//! |-----|---------|---------|
//! | `preset` | `gaas-dots`, `si-dots` or `si-donors` | none |
//! | `name` | material label | preset name or `custom` |
//! | `xi_eV` | deformation potential | from preset |
//! | `s_mps` | sound speed | from preset |
//! | `rho_gcc` | mass density | from preset |
//! | `e14_cpm2`, `kappa` | piezo constant and permittivity (both or neither) | from preset |
//! | `a_nm`, `L_nm` | dot size, inter-dot distance | from preset |
//! | `shape` | `gaussian` or `hydrogenic` | from preset, else `gaussian` |
//! | `channels` | comma-separated channel names | every channel the setup admits |
//! | `dt_min_ps`, `dt_max_ps` | cycle-time range | 1, 10000 |
//! | `points_per_decade` | grid density | 20 |
//! | `log_spaced` | `true`/`false` | `true` |
//! | `regime_threshold` | long-wavelength cut on `ak`, `Lk` | 0.1 |
//! | `rel_tol`, `abs_tol`, `max_subdivisions` | quadrature settings | 1e-9, 1e-30, 1000 |
//! | `radial_cutoff_factor` | form-factor level where radial integrals stop | 1e-18 |
//! | `combined` | add a summed-channel row | `false` |
//! | `b2_time_ps` | time of the `B²(t)` oracle check | 100 |
//!
//! Without a preset, `xi_eV`, `s_mps`, `rho_gcc`, `a_nm` and `L_nm` are
//! required. Unknown and repeated keys are errors.

use std::collections::BTreeMap;
use std::str::FromStr;

use crate::error::{Error, Result};
use crate::materials::{preset, ConfinementShape, CouplingChannel, Material, QubitGeometry};
use crate::quadrature::QuadratureSettings;
use crate::sweep::{
    SweepConfig, DEFAULT_B2_CHECK_TIME, DEFAULT_DT_MAX, DEFAULT_DT_MIN, DEFAULT_POINTS_PER_DECADE,
};
use crate::units::{
    convert_energy, convert_length_time, density_from_gcc, EnergyUnit, LengthTimeUnit,
};

pub const KEYS: [&str; 22] = [
    "preset",
    "name",
    "xi_eV",
    "s_mps",
    "rho_gcc",
    "e14_cpm2",
    "kappa",
    "a_nm",
    "L_nm",
    "shape",
    "channels",
    "dt_min_ps",
    "dt_max_ps",
    "points_per_decade",
    "log_spaced",
    "regime_threshold",
    "rel_tol",
    "abs_tol",
    "max_subdivisions",
    "combined",
    "b2_time_ps",
    "radial_cutoff_factor",
];

#[derive(Debug, Clone, PartialEq)]
struct Entry {
    value: String,
    /// `None` for values set programmatically (e.g. from command-line flags).
    line: Option<usize>,
}

/// Raw, syntax-checked key/value pairs.
#[derive(Debug, Clone, Default, PartialEq)]
pub struct ConfigEntries {
    entries: BTreeMap<String, Entry>,
}

fn key_error(key: &str, line: Option<usize>, message: impl Into<String>) -> Error {
    Error::Config {
        line,
        key: Some(key.to_string()),
        message: message.into(),
    }
}

fn check_known(key: &str, line: Option<usize>) -> Result<()> {
    if KEYS.contains(&key) {
        Ok(())
    } else {
        Err(key_error(key, line, "unknown key"))
    }
}

/// Splits `text` into entries without interpreting values.
pub fn parse_entries(text: &str) -> Result<ConfigEntries> {
    let mut out = ConfigEntries::default();
    for (i, raw) in text.lines().enumerate() {
        let line = i + 1;
        let content = raw.split('#').next().unwrap_or("").trim();
        if content.is_empty() {
            continue;
        }
        let Some((key, value)) = content.split_once('=') else {
            return Err(Error::Config {
                line: Some(line),
                key: None,
                message: format!("expected `key=value`, got `{content}`"),
            });
        };
        let (key, value) = (key.trim(), value.trim());
        if key.is_empty() {
            return Err(Error::Config {
                line: Some(line),
                key: None,
                message: "empty key".into(),
            });
        }
        check_known(key, Some(line))?;
        if value.is_empty() {
            return Err(key_error(key, Some(line), "empty value"));
        }
        if let Some(prev) = out.entries.get(key) {
            return Err(key_error(
                key,
                Some(line),
                format!(
                    "duplicate key (first set on line {})",
                    prev.line.unwrap_or(0)
                ),
            ));
        }
        out.entries.insert(
            key.to_string(),
            Entry {
                value: value.to_string(),
                line: Some(line),
            },
        );
    }
    Ok(out)
}

/// Parses and validates a whole configuration.
pub fn parse_config(text: &str) -> Result<SweepConfig> {
    parse_entries(text)?.build()
}

impl ConfigEntries {
    /// Sets or replaces `key`. Used for command-line overrides.
    pub fn set(&mut self, key: &str, value: impl Into<String>) -> Result<()> {
        check_known(key, None)?;
        let value = value.into();
        if value.trim().is_empty() {
            return Err(key_error(key, None, "empty value"));
        }
        self.entries.insert(
            key.to_string(),
            Entry {
                value: value.trim().to_string(),
                line: None,
            },
        );
        Ok(())
    }

    pub fn get(&self, key: &str) -> Option<&str> {
        self.entries.get(key).map(|e| e.value.as_str())
    }

    fn line(&self, key: &str) -> Option<usize> {
        self.entries.get(key).and_then(|e| e.line)
    }

    fn err(&self, key: &str, message: impl Into<String>) -> Error {
        key_error(key, self.line(key), message)
    }

    fn parsed<T: FromStr>(&self, key: &str) -> Result<Option<T>>
    where
        T::Err: std::fmt::Display,
    {
        match self.get(key) {
            None => Ok(None),
            Some(v) => v
                .parse::<T>()
                .map(Some)
                .map_err(|e| self.err(key, format!("cannot parse `{v}`: {e}"))),
        }
    }

    fn number(&self, key: &str) -> Result<Option<f64>> {
        match self.parsed::<f64>(key)? {
            Some(v) if !v.is_finite() => Err(self.err(key, format!("must be finite, got {v}"))),
            other => Ok(other),
        }
    }

    fn positive(&self, key: &str) -> Result<Option<f64>> {
        match self.number(key)? {
            Some(v) if v <= 0.0 => Err(self.err(key, format!("must be > 0, got {v}"))),
            other => Ok(other),
        }
    }

    fn required(&self, key: &str, value: Option<f64>) -> Result<f64> {
        value.ok_or_else(|| key_error(key, None, "required when no preset is given"))
    }

    fn converted(
        &self,
        key: &str,
        value: Option<f64>,
        convert: impl Fn(f64) -> Result<f64>,
    ) -> Result<Option<f64>> {
        value
            .map(|v| convert(v).map_err(|e| self.err(key, e.to_string())))
            .transpose()
    }

    fn boolean(&self, key: &str) -> Result<Option<bool>> {
        match self.get(key) {
            None => Ok(None),
            Some("true") => Ok(Some(true)),
            Some("false") => Ok(Some(false)),
            Some(v) => Err(self.err(key, format!("expected true or false, got `{v}`"))),
        }
    }

    /// Interprets and validates the entries.
    pub fn build(&self) -> Result<SweepConfig> {
        let base = match self.get("preset") {
            Some(name) => Some(preset(name).map_err(|e| self.err("preset", e.to_string()))?),
            None => None,
        };

        let xi = self.converted("xi_eV", self.positive("xi_eV")?, |v| {
            convert_energy(v, EnergyUnit::EV)
        })?;
        let s = self.positive("s_mps")?;
        let rho = self.converted("rho_gcc", self.positive("rho_gcc")?, density_from_gcc)?;
        let e14 = self.positive("e14_cpm2")?;
        let kappa = self.positive("kappa")?;
        let nm = |v: f64| convert_length_time(v, LengthTimeUnit::Nm);
        let a = self.converted("a_nm", self.positive("a_nm")?, nm)?;
        let l = self.converted("L_nm", self.positive("L_nm")?, nm)?;
        let shape = self
            .get("shape")
            .map(|v| ConfinementShape::from_str(v).map_err(|e| self.err("shape", e.to_string())))
            .transpose()?;

        let piezo = match (e14, kappa) {
            (Some(e), Some(k)) => Some(
                Material::piezo_modulus(e, k)
                    .map_err(|err| self.err("e14_cpm2", err.to_string()))?,
            ),
            (None, None) => None,
            (Some(_), None) => {
                return Err(key_error("kappa", None, "required together with e14_cpm2"))
            }
            (None, Some(_)) => {
                return Err(key_error("e14_cpm2", None, "required together with kappa"))
            }
        };

        let (material, geometry) = match &base {
            Some(p) => {
                let mut m = p.material.clone();
                if let Some(n) = self.get("name") {
                    m.name = n.to_string();
                }
                m.xi = xi.unwrap_or(m.xi);
                m.s = s.unwrap_or(m.s);
                m.rho = rho.unwrap_or(m.rho);
                m.piezo_m = piezo.or(m.piezo_m);
                let g = QubitGeometry {
                    a: a.unwrap_or(p.geometry.a),
                    l: l.unwrap_or(p.geometry.l),
                    shape: shape.unwrap_or(p.geometry.shape),
                };
                (m, g)
            }
            None => {
                let m = Material {
                    name: self.get("name").unwrap_or("custom").to_string(),
                    xi: self.required("xi_eV", xi)?,
                    s: self.required("s_mps", s)?,
                    rho: self.required("rho_gcc", rho)?,
                    piezo_m: piezo,
                };
                let g = QubitGeometry {
                    a: self.required("a_nm", a)?,
                    l: self.required("L_nm", l)?,
                    shape: shape.unwrap_or(ConfinementShape::Gaussian),
                };
                (m, g)
            }
        };

        let channels = match self.get("channels") {
            Some(list) => {
                let mut out = Vec::new();
                for name in list.split(',').map(str::trim) {
                    let c = CouplingChannel::from_str(name)
                        .map_err(|e| self.err("channels", e.to_string()))?;
                    c.check(&material, &geometry)
                        .map_err(|e| self.err("channels", e.to_string()))?;
                    if out.contains(&c) {
                        return Err(self.err("channels", format!("`{name}` listed twice")));
                    }
                    out.push(c);
                }
                out
            }
            None => CouplingChannel::ALL
                .into_iter()
                .filter(|c| c.check(&material, &geometry).is_ok())
                .collect(),
        };

        let ps = |v: f64| convert_length_time(v, LengthTimeUnit::Ps);
        let dt_min = self
            .converted("dt_min_ps", self.positive("dt_min_ps")?, ps)?
            .unwrap_or(DEFAULT_DT_MIN);
        let dt_max = self
            .converted("dt_max_ps", self.positive("dt_max_ps")?, ps)?
            .unwrap_or(DEFAULT_DT_MAX);
        if dt_min > dt_max {
            return Err(key_error(
                "dt_max_ps",
                self.line("dt_max_ps").or(self.line("dt_min_ps")),
                "must not be smaller than dt_min_ps",
            ));
        }
        let points_per_decade = self
            .parsed::<usize>("points_per_decade")?
            .unwrap_or(DEFAULT_POINTS_PER_DECADE);
        if points_per_decade == 0 {
            return Err(self.err("points_per_decade", "must be >= 1"));
        }

        let defaults = QuadratureSettings::default();
        let quadrature = QuadratureSettings {
            rel_tol: self.positive("rel_tol")?.unwrap_or(defaults.rel_tol),
            abs_tol: self.positive("abs_tol")?.unwrap_or(defaults.abs_tol),
            max_subdivisions: self
                .parsed::<usize>("max_subdivisions")?
                .unwrap_or(defaults.max_subdivisions),
            radial_cutoff_factor: self
                .positive("radial_cutoff_factor")?
                .unwrap_or(defaults.radial_cutoff_factor),
        };
        quadrature.validate().map_err(|e| match &e {
            Error::InvalidParameter { name, .. } => key_error(name, self.line(name), e.to_string()),
            _ => e,
        })?;

        let config = SweepConfig {
            material,
            geometry,
            channels,
            dt_min,
            dt_max,
            points_per_decade,
            log_spaced: self.boolean("log_spaced")?.unwrap_or(true),
            quadrature,
            regime_threshold: self
                .positive("regime_threshold")?
                .unwrap_or(crate::rates::DEFAULT_REGIME_THRESHOLD),
            combined: self.boolean("combined")?.unwrap_or(false),
            b2_check_time: self
                .converted("b2_time_ps", self.positive("b2_time_ps")?, ps)?
                .unwrap_or(DEFAULT_B2_CHECK_TIME),
        };
        config.validate().map_err(|e| Error::Config {
            line: None,
            key: None,
            message: e.to_string(),
        })?;
        Ok(config)
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::sweep::run_sweep;

    fn config_err(text: &str) -> (Option<usize>, Option<String>, String) {
        match parse_config(text) {
            Err(Error::Config { line, key, message }) => (line, key, message),
            other => panic!("expected a config error, got {other:?}"),
        }
    }

    #[test]
    fn preset_with_defaults() {
        let cfg = parse_config("preset=si-donors\n").unwrap();
        assert_eq!(cfg.geometry.a, 3e-9);
        assert_eq!(cfg.geometry.shape, ConfinementShape::Hydrogenic);
        assert_eq!(cfg.channels, vec![CouplingChannel::DeformationHydrogenic]);
        assert_eq!(
            (cfg.dt_min, cfg.dt_max, cfg.points_per_decade),
            (1e-12, 1e-8, 20)
        );
        assert!(cfg.log_spaced && !cfg.combined);
        assert_eq!(cfg, SweepConfig::from_preset("si-donors").unwrap());
    }

    #[test]
    fn comments_blank_lines_and_spacing() {
        let text = "# header\n\n  preset = gaas-dots   # trailing\nL_nm=80\n\tdt_max_ps = 1000\n";
        let cfg = parse_config(text).unwrap();
        assert_eq!(cfg.geometry.l, 80e-9);
        assert_eq!(cfg.dt_max, 1e-9);
        assert_eq!(cfg.channels.len(), 2);
    }

    #[test]
    fn explicit_material() {
        let text =
            "xi_eV=7\ns_mps=5140\nrho_gcc=5.31\ne14_cpm2=0.16\nkappa=12.8\na_nm=25\nL_nm=50\n";
        let cfg = parse_config(text).unwrap();
        let gaas = SweepConfig::from_preset("gaas-dots").unwrap();
        assert_eq!(cfg.material.xi, gaas.material.xi);
        assert_eq!(cfg.material.piezo_m, gaas.material.piezo_m);
        assert_eq!(cfg.material.name, "custom");
        assert_eq!(cfg.channels, gaas.channels);
        assert_eq!(run_sweep(&cfg).unwrap(), run_sweep(&gaas).unwrap());
    }

    #[test]
    fn negative_size_names_the_key() {
        let (line, key, _) = config_err("preset=si-dots\na_nm=-5\n");
        assert_eq!(line, Some(2));
        assert_eq!(key.as_deref(), Some("a_nm"));
    }

    #[test]
    fn duplicate_key_is_an_error() {
        let (line, key, message) = config_err("preset=si-dots\nL_nm=60\nL_nm=70\n");
        assert_eq!(line, Some(3));
        assert_eq!(key.as_deref(), Some("L_nm"));
        assert!(message.contains("duplicate"));
    }

    #[test]
    fn unknown_key_and_bad_syntax() {
        let (line, key, _) = config_err("preset=si-dots\nsize=3\n");
        assert_eq!((line, key.as_deref()), (Some(2), Some("size")));
        let (line, key, _) = config_err("preset=si-dots\njust words\n");
        assert_eq!((line, key), (Some(2), None));
        let (_, key, _) = config_err("preset=si-dots\nrel_tol=\n");
        assert_eq!(key.as_deref(), Some("rel_tol"));
    }

    #[test]
    fn missing_required_without_preset() {
        let (_, key, _) = config_err("xi_eV=3.3\ns_mps=9000\na_nm=3\nL_nm=50\n");
        assert_eq!(key.as_deref(), Some("rho_gcc"));
    }

    #[test]
    fn value_errors_name_their_key() {
        for (text, want) in [
            ("preset=nowhere\n", "preset"),
            ("preset=si-dots\nshape=square\n", "shape"),
            ("preset=si-dots\nchannels=piezo-gaussian\n", "channels"),
            ("preset=si-dots\nchannels=phonons\n", "channels"),
            ("preset=si-dots\npoints_per_decade=0\n", "points_per_decade"),
            (
                "preset=si-dots\npoints_per_decade=2.5\n",
                "points_per_decade",
            ),
            ("preset=si-dots\ndt_min_ps=100\ndt_max_ps=10\n", "dt_max_ps"),
            ("preset=si-dots\nlog_spaced=yes\n", "log_spaced"),
            ("preset=si-dots\nrel_tol=nan\n", "rel_tol"),
            ("preset=si-dots\nmax_subdivisions=0\n", "max_subdivisions"),
            ("preset=gaas-dots\ne14_cpm2=0.2\n", "kappa"),
        ] {
            let (_, key, _) = config_err(text);
            assert_eq!(key.as_deref(), Some(want), "{text}");
        }
    }

    #[test]
    fn overrides_replace_file_values() {
        let mut entries = parse_entries("preset=si-dots\nL_nm=60\n").unwrap();
        entries.set("L_nm", "90").unwrap();
        entries.set("combined", "true").unwrap();
        let cfg = entries.build().unwrap();
        assert_eq!(cfg.geometry.l, 90e-9);
        assert!(cfg.combined);
        assert!(entries.set("bogus", "1").is_err());
    }

    #[test]
    fn channels_in_any_order() {
        let cfg = parse_config("preset=gaas-dots\nchannels=piezo-gaussian, deformation-gaussian\n")
            .unwrap();
        assert_eq!(cfg.ordered_channels(), CouplingChannel::ALL[..2].to_vec());
    }
}
