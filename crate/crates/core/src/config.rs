//! TOML configuration files and `key=value` overrides.

use std::io::Read;
use std::path::Path;

use serde::de::DeserializeOwned;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::model::{bath_correlations, Mode, SqueezedBath, SystemParams};

/// Numeric parameters of one point: system rates plus the squeezed bath.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct ParamSet {
    pub kappa: f64,
    pub gamma_m: f64,
    pub g0: f64,
    pub g_minus: f64,
    pub g_plus: f64,
    pub n_th: f64,
    pub r: f64,
    pub theta: f64,
}

impl Default for ParamSet {
    fn default() -> Self {
        ParamSet::from_parts(&SystemParams::reference(), 0.0, 0.0)
    }
}

impl ParamSet {
    pub fn from_parts(params: &SystemParams, r: f64, theta: f64) -> Self {
        ParamSet {
            kappa: params.kappa,
            gamma_m: params.gamma_m,
            g0: params.g0,
            g_minus: params.g_minus,
            g_plus: params.g_plus,
            n_th: params.n_th,
            r,
            theta,
        }
    }

    pub fn params(&self) -> Result<SystemParams> {
        SystemParams::new(
            self.kappa,
            self.gamma_m,
            self.g0,
            self.g_minus,
            self.g_plus,
            self.n_th,
        )
    }

    pub fn bath(&self) -> Result<SqueezedBath> {
        bath_correlations(self.r, self.theta)
    }

    fn slot(&mut self, key: &str) -> Result<&mut f64> {
        Ok(match key {
            "kappa" => &mut self.kappa,
            "gamma_m" => &mut self.gamma_m,
            "g0" => &mut self.g0,
            "g_minus" => &mut self.g_minus,
            "g_plus" => &mut self.g_plus,
            "n_th" => &mut self.n_th,
            "r" => &mut self.r,
            "theta" => &mut self.theta,
            _ => return Err(Error::UnknownKey(key.to_string())),
        })
    }

    /// Sets a field by name. Unknown names are errors.
    pub fn set(&mut self, key: &str, value: f64) -> Result<()> {
        *self.slot(key)? = value;
        Ok(())
    }

    pub fn get(&self, key: &str) -> Result<f64> {
        let mut copy = *self;
        Ok(*copy.slot(key)?)
    }

    pub const KEYS: [&'static str; 8] = [
        "kappa", "gamma_m", "g0", "g_minus", "g_plus", "n_th", "r", "theta",
    ];
}

/// A single-point configuration file: the keys of [`ParamSet`] plus `mode`.
#[derive(Debug, Clone, Copy, PartialEq, Default)]
pub struct PointConfig {
    pub point: ParamSet,
    pub mode: Mode,
}

impl PointConfig {
    /// Deserializes a flat table after applying `overrides` in order.
    pub fn resolve(table: toml::Table, overrides: &[String]) -> Result<Self> {
        let mut table = apply_overrides(table, overrides)?;
        let mode = match table.remove("mode") {
            None => Mode::default(),
            Some(toml::Value::String(s)) => s.parse()?,
            Some(other) => {
                return Err(Error::Config(format!("mode must be a string, got {other}")))
            }
        };
        Ok(PointConfig {
            point: deserialize(table)?,
            mode,
        })
    }

    pub fn to_table(&self) -> toml::Table {
        let mut t = toml::Table::try_from(self.point).expect("flat numeric table");
        t.insert("mode".into(), toml::Value::String(self.mode.to_string()));
        t
    }
}

/// Reads a TOML document from `path`, or from stdin when `path` is `-`.
pub fn read_table(path: &Path) -> Result<toml::Table> {
    let text = if path.as_os_str() == "-" {
        let mut s = String::new();
        std::io::stdin().read_to_string(&mut s)?;
        s
    } else {
        std::fs::read_to_string(path)
            .map_err(|e| Error::Config(format!("cannot read {}: {e}", path.display())))?
    };
    parse_table(&text)
}

pub fn parse_table(text: &str) -> Result<toml::Table> {
    text.parse::<toml::Table>()
        .map_err(|e| Error::Config(format!("invalid TOML: {}", e.message())))
}

/// Parses the right-hand side of an override as a TOML value, falling back to
/// a bare string.
fn parse_value(raw: &str) -> toml::Value {
    let doc = format!("v = {raw}");
    match doc.parse::<toml::Table>() {
        Ok(mut t) => t
            .remove("v")
            .unwrap_or_else(|| toml::Value::String(raw.to_string())),
        Err(_) => toml::Value::String(raw.to_string()),
    }
}

/// Applies a `dotted.key=value` override, creating intermediate tables.
pub fn apply_override(table: &mut toml::Table, assignment: &str) -> Result<()> {
    let (key, raw) = assignment
        .split_once('=')
        .ok_or_else(|| Error::Config(format!("override `{assignment}` is not key=value")))?;
    let key = key.trim();
    if key.is_empty() {
        return Err(Error::Config(format!(
            "override `{assignment}` has an empty key"
        )));
    }
    let parts: Vec<&str> = key.split('.').collect();
    let (last, path) = parts.split_last().expect("split yields at least one part");
    let mut cursor = table;
    for part in path {
        let entry = cursor
            .entry(part.to_string())
            .or_insert_with(|| toml::Value::Table(toml::Table::new()));
        cursor = entry
            .as_table_mut()
            .ok_or_else(|| Error::Config(format!("`{part}` in `{key}` is not a table")))?;
    }
    cursor.insert(last.to_string(), parse_value(raw.trim()));
    Ok(())
}

pub fn apply_overrides(mut table: toml::Table, overrides: &[String]) -> Result<toml::Table> {
    for o in overrides {
        apply_override(&mut table, o)?;
    }
    Ok(table)
}

/// Deserializes `table`, mapping unknown fields to [`Error::UnknownKey`].
pub fn deserialize<T: DeserializeOwned>(table: toml::Table) -> Result<T> {
    table.try_into().map_err(|e: toml::de::Error| {
        let msg = e.message().to_string();
        if msg.starts_with("unknown field") {
            Error::UnknownKey(msg)
        } else {
            Error::Config(msg)
        }
    })
}

/// Deserializes `table` after applying `overrides` in order.
pub fn resolve<T: DeserializeOwned>(table: toml::Table, overrides: &[String]) -> Result<T> {
    deserialize(apply_overrides(table, overrides)?)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn defaults_are_reference_point() {
        let c = PointConfig::resolve(toml::Table::new(), &[]).unwrap();
        assert_eq!(c.point.params().unwrap(), SystemParams::reference());
        assert_eq!(c.point.r, 0.0);
        assert_eq!(c.mode, Mode::Rwa);
    }

    #[test]
    fn file_then_overrides() {
        let table = parse_table("kappa = 0.2\nr = 1\nmode = \"full\"\n").unwrap();
        let c = PointConfig::resolve(
            table,
            &[
                "theta=3.5".to_string(),
                "mode=rwa".to_string(),
                "kappa=0.3".to_string(),
            ],
        )
        .unwrap();
        assert_eq!(c.point.kappa, 0.3);
        assert_eq!(c.point.r, 1.0);
        assert_eq!(c.point.theta, 3.5);
        assert_eq!(c.mode, Mode::Rwa);
    }

    #[test]
    fn point_table_round_trip() {
        let c = PointConfig {
            point: ParamSet {
                r: 1.0,
                theta: 0.1,
                ..ParamSet::default()
            },
            mode: Mode::Full,
        };
        assert_eq!(PointConfig::resolve(c.to_table(), &[]).unwrap(), c);
    }

    #[test]
    fn unknown_keys_are_errors() {
        let err = PointConfig::resolve(toml::Table::new(), &["kapa=0.1".to_string()]).unwrap_err();
        assert!(matches!(err, Error::UnknownKey(_)), "{err:?}");
        let table = parse_table("bogus = 1").unwrap();
        assert!(PointConfig::resolve(table, &[]).is_err());
    }

    #[test]
    fn malformed_overrides() {
        let mut t = toml::Table::new();
        assert!(apply_override(&mut t, "kappa").is_err());
        assert!(apply_override(&mut t, "=1").is_err());
        apply_override(&mut t, "base.kappa=0.5").unwrap();
        assert_eq!(t["base"]["kappa"].as_float(), Some(0.5));
        assert!(apply_override(&mut t, "base.kappa.x=1").is_err());
    }

    #[test]
    fn bad_mode_is_config_error() {
        let err =
            PointConfig::resolve(toml::Table::new(), &["mode=floquet".to_string()]).unwrap_err();
        assert_eq!(err.exit_code(), 3);
    }

    #[test]
    fn set_and_get_by_name() {
        let mut c = ParamSet::default();
        for (i, key) in ParamSet::KEYS.iter().enumerate() {
            c.set(key, i as f64).unwrap();
            assert_eq!(c.get(key).unwrap(), i as f64);
        }
        assert!(c.set("omega_m", 2.0).is_err());
    }
}
