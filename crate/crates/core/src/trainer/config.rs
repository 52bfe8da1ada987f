use std::fmt;
use std::str::FromStr;

use serde::{Deserialize, Deserializer, Serialize, Serializer};

use crate::dataset::default_batch_size;
use crate::error::{Error, Result};

/// Mini-batch size: a fixed count, or `auto` = `round(sqrt(n))`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub enum BatchSize {
    #[default]
    Auto,
    Fixed(usize),
}

impl BatchSize {
    pub fn resolve(self, n_instances: usize) -> usize {
        match self {
            BatchSize::Auto => default_batch_size(n_instances),
            BatchSize::Fixed(n) => n,
        }
    }
}

impl fmt::Display for BatchSize {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            BatchSize::Auto => f.write_str("auto"),
            BatchSize::Fixed(n) => write!(f, "{n}"),
        }
    }
}

impl FromStr for BatchSize {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        if s.eq_ignore_ascii_case("auto") {
            return Ok(BatchSize::Auto);
        }
        match s.parse::<usize>() {
            Ok(n) if n > 0 => Ok(BatchSize::Fixed(n)),
            _ => Err(Error::invalid(format!(
                "batch size must be a positive count or `auto`, got `{s}`"
            ))),
        }
    }
}

impl Serialize for BatchSize {
    fn serialize<S: Serializer>(&self, s: S) -> std::result::Result<S::Ok, S::Error> {
        match self {
            BatchSize::Auto => s.serialize_str("auto"),
            BatchSize::Fixed(n) => s.serialize_u64(*n as u64),
        }
    }
}

impl<'de> Deserialize<'de> for BatchSize {
    fn deserialize<D: Deserializer<'de>>(d: D) -> std::result::Result<Self, D::Error> {
        #[derive(Deserialize)]
        #[serde(untagged)]
        enum Repr {
            Count(u64),
            Text(String),
        }
        match Repr::deserialize(d)? {
            Repr::Count(0) => Err(serde::de::Error::custom("batch size must be positive")),
            Repr::Count(n) => Ok(BatchSize::Fixed(n as usize)),
            Repr::Text(t) => t.parse().map_err(serde::de::Error::custom),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct TrainConfig {
    /// Number of AND-layer columns (rules).
    pub n_rules: usize,
    pub batch_size: BatchSize,
    pub max_flips_per_batch: usize,
    /// Expected literals per initial rule; each attribute joins a rule with
    /// probability `init_expected_literals / n_attributes`.
    pub init_expected_literals: f64,
    pub epochs: usize,
    pub seed: u64,
}

impl Default for TrainConfig {
    fn default() -> Self {
        Self {
            n_rules: 20,
            batch_size: BatchSize::Auto,
            max_flips_per_batch: 2,
            init_expected_literals: 3.0,
            epochs: 1,
            seed: 0,
        }
    }
}

impl TrainConfig {
    pub fn validate(&self) -> Result<()> {
        if self.n_rules == 0 {
            return Err(Error::invalid("n_rules must be at least 1"));
        }
        if !self.init_expected_literals.is_finite() || self.init_expected_literals <= 0.0 {
            return Err(Error::invalid("init_expected_literals must be positive"));
        }
        if self.epochs == 0 {
            return Err(Error::invalid("epochs must be at least 1"));
        }
        if self.batch_size == BatchSize::Fixed(0) {
            return Err(Error::invalid("batch size must be positive"));
        }
        Ok(())
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn defaults() {
        let c = TrainConfig::default();
        assert_eq!(c.n_rules, 20);
        assert_eq!(c.max_flips_per_batch, 2);
        assert_eq!(c.init_expected_literals, 3.0);
        assert_eq!(c.epochs, 1);
        assert_eq!(c.batch_size, BatchSize::Auto);
        c.validate().unwrap();
    }

    #[test]
    fn batch_size_parsing() {
        assert_eq!("auto".parse::<BatchSize>().unwrap(), BatchSize::Auto);
        assert_eq!("400".parse::<BatchSize>().unwrap(), BatchSize::Fixed(400));
        assert!("0".parse::<BatchSize>().is_err());
        assert!("x".parse::<BatchSize>().is_err());
        assert_eq!(BatchSize::Auto.resolve(900), 30);
    }

    #[test]
    fn json_forms() {
        let c = TrainConfig {
            batch_size: BatchSize::Fixed(400),
            ..Default::default()
        };
        let json = serde_json::to_string(&c).unwrap();
        assert!(json.contains(r#""batch_size":400"#));
        assert_eq!(serde_json::from_str::<TrainConfig>(&json).unwrap(), c);
        let partial: TrainConfig = serde_json::from_str(r#"{"batch_size":"auto","n_rules":5}"#).unwrap();
        assert_eq!(partial.n_rules, 5);
        assert_eq!(partial.max_flips_per_batch, 2);
        assert!(serde_json::from_str::<TrainConfig>(r#"{"rules":5}"#).is_err());
    }

    #[test]
    fn validation() {
        let bad = |f: fn(&mut TrainConfig)| {
            let mut c = TrainConfig::default();
            f(&mut c);
            c.validate().is_err()
        };
        assert!(bad(|c| c.n_rules = 0));
        assert!(bad(|c| c.epochs = 0));
        assert!(bad(|c| c.init_expected_literals = 0.0));
        assert!(bad(|c| c.init_expected_literals = f64::NAN));
        assert!(!bad(|c| c.max_flips_per_batch = 0));
    }
}
