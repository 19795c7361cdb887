use std::collections::BTreeMap;

use serde::Serialize;

use super::HarnessError;

/// A recognised key with its default.
#[derive(Debug, Clone, Copy)]
pub struct KeySpec {
    pub key: &'static str,
    pub default: &'static str,
    pub help: &'static str,
}

impl KeySpec {
    pub const fn new(key: &'static str, default: &'static str, help: &'static str) -> Self {
        KeySpec { key, default, help }
    }
}

/// Fully resolved parameters of one experiment run.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct Settings {
    pub id: String,
    pub seed: u64,
    pub values: BTreeMap<String, String>,
}

impl Settings {
    pub(super) fn resolve(
        id: &str,
        keys: &[KeySpec],
        seed: u64,
        overrides: &BTreeMap<String, String>,
    ) -> Result<Self, HarnessError> {
        let mut values: BTreeMap<String, String> =
            keys.iter().map(|k| (k.key.to_string(), k.default.to_string())).collect();
        for (k, v) in overrides {
            match values.get_mut(k) {
                Some(slot) => *slot = v.trim().to_string(),
                None => {
                    return Err(HarnessError::UnknownKey {
                        key: k.clone(),
                        exp: id.to_string(),
                    })
                }
            }
        }
        Ok(Settings {
            id: id.to_string(),
            seed,
            values,
        })
    }

    pub fn str(&self, key: &str) -> &str {
        self.values
            .get(key)
            .unwrap_or_else(|| panic!("experiment {} has no key {key}", self.id))
    }

    fn bad(&self, key: &str, reason: impl Into<String>) -> HarnessError {
        HarnessError::BadValue {
            key: key.to_string(),
            value: self.str(key).to_string(),
            reason: reason.into(),
        }
    }

    pub fn f64(&self, key: &str) -> Result<f64, HarnessError> {
        self.str(key)
            .parse::<f64>()
            .ok()
            .filter(|v| v.is_finite())
            .ok_or_else(|| self.bad(key, "expected a finite number"))
    }

    pub fn usize(&self, key: &str) -> Result<usize, HarnessError> {
        self.str(key)
            .parse::<usize>()
            .map_err(|_| self.bad(key, "expected a non-negative integer"))
    }

    pub fn f64_list(&self, key: &str) -> Result<Vec<f64>, HarnessError> {
        let v: Option<Vec<f64>> = self
            .str(key)
            .split(',')
            .map(|p| p.trim().parse::<f64>().ok().filter(|v| v.is_finite()))
            .collect();
        v.filter(|v| !v.is_empty())
            .ok_or_else(|| self.bad(key, "expected a comma-separated list of numbers"))
    }

    pub fn usize_list(&self, key: &str) -> Result<Vec<usize>, HarnessError> {
        let v: Option<Vec<usize>> = self.str(key).split(',').map(|p| p.trim().parse().ok()).collect();
        v.filter(|v| !v.is_empty())
            .ok_or_else(|| self.bad(key, "expected a comma-separated list of integers"))
    }

    /// Rejects the value of `key` with `reason`.
    pub fn reject(&self, key: &str, reason: impl Into<String>) -> HarnessError {
        self.bad(key, reason)
    }

    /// A positive count.
    pub fn count(&self, key: &str) -> Result<usize, HarnessError> {
        let v = self.usize(key)?;
        if v == 0 {
            return Err(self.bad(key, "must be positive"));
        }
        Ok(v)
    }

    pub fn positive(&self, key: &str) -> Result<f64, HarnessError> {
        let v = self.f64(key)?;
        if v <= 0.0 {
            return Err(self.bad(key, "must be positive"));
        }
        Ok(v)
    }
}
