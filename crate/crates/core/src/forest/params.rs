use std::fmt;
use std::str::FromStr;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// How many features each split considers.
#[derive(Clone, Copy, Debug, Default, PartialEq, Serialize, Deserialize)]
#[serde(try_from = "String", into = "String")]
pub enum MaxFeatures {
    #[default]
    Sqrt,
    Log2,
    All,
    Count(usize),
    Fraction(f64),
}

impl MaxFeatures {
    pub fn resolve(self, n_features: usize) -> usize {
        let d = n_features as f64;
        let n = match self {
            MaxFeatures::Sqrt => d.sqrt().floor() as usize,
            MaxFeatures::Log2 => d.log2().floor() as usize,
            MaxFeatures::All => n_features,
            MaxFeatures::Count(n) => n,
            MaxFeatures::Fraction(f) => (f * d).floor() as usize,
        };
        n.clamp(1, n_features.max(1))
    }
}

impl fmt::Display for MaxFeatures {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            MaxFeatures::Sqrt => f.write_str("sqrt"),
            MaxFeatures::Log2 => f.write_str("log2"),
            MaxFeatures::All => f.write_str("all"),
            MaxFeatures::Count(n) => write!(f, "{n}"),
            MaxFeatures::Fraction(x) => write!(f, "{x:?}"),
        }
    }
}

impl FromStr for MaxFeatures {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "sqrt" => Ok(MaxFeatures::Sqrt),
            "log2" => Ok(MaxFeatures::Log2),
            "all" => Ok(MaxFeatures::All),
            _ if s.contains('.') => match s.parse::<f64>() {
                Ok(x) if x > 0.0 && x <= 1.0 => Ok(MaxFeatures::Fraction(x)),
                _ => Err(Error::Config(format!("max_features fraction {s:?} not in (0, 1]"))),
            },
            _ => match s.parse::<usize>() {
                Ok(n) if n > 0 => Ok(MaxFeatures::Count(n)),
                _ => Err(Error::Config(format!(
                    "max_features must be sqrt, log2, all, a positive count or a fraction; got {s:?}"
                ))),
            },
        }
    }
}

impl TryFrom<String> for MaxFeatures {
    type Error = Error;

    fn try_from(s: String) -> Result<Self> {
        s.parse()
    }
}

impl From<MaxFeatures> for String {
    fn from(m: MaxFeatures) -> String {
        m.to_string()
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(default)]
pub struct ForestParams {
    pub n_estimators: usize,
    pub min_samples_split: usize,
    pub min_samples_leaf: usize,
    pub max_depth: usize,
    pub bootstrap: bool,
    pub max_features: MaxFeatures,
    pub seed: u64,
}

impl Default for ForestParams {
    fn default() -> Self {
        Self {
            n_estimators: 100,
            min_samples_split: 5,
            min_samples_leaf: 4,
            max_depth: 100,
            bootstrap: false,
            max_features: MaxFeatures::Sqrt,
            seed: 0,
        }
    }
}

impl ForestParams {
    pub fn validate(&self) -> Result<()> {
        if self.n_estimators == 0 {
            return Err(Error::Config("n_estimators must be >= 1".into()));
        }
        if self.max_depth == 0 {
            return Err(Error::Config("max_depth must be >= 1".into()));
        }
        if self.min_samples_split < 2 {
            return Err(Error::Config("min_samples_split must be >= 2".into()));
        }
        if self.min_samples_leaf == 0 {
            return Err(Error::Config("min_samples_leaf must be >= 1".into()));
        }
        Ok(())
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn resolve_rules() {
        assert_eq!(MaxFeatures::Sqrt.resolve(382), 19);
        assert_eq!(MaxFeatures::Log2.resolve(382), 8);
        assert_eq!(MaxFeatures::All.resolve(7), 7);
        assert_eq!(MaxFeatures::Count(50).resolve(7), 7);
        assert_eq!(MaxFeatures::Fraction(0.5).resolve(7), 3);
        assert_eq!(MaxFeatures::Sqrt.resolve(1), 1);
        assert_eq!(MaxFeatures::Fraction(0.01).resolve(7), 1);
    }

    #[test]
    fn text_form() {
        for m in [
            MaxFeatures::Sqrt,
            MaxFeatures::Log2,
            MaxFeatures::All,
            MaxFeatures::Count(12),
            MaxFeatures::Fraction(0.25),
        ] {
            assert_eq!(m.to_string().parse::<MaxFeatures>().unwrap(), m);
        }
        assert!("0".parse::<MaxFeatures>().is_err());
        assert!("1.5".parse::<MaxFeatures>().is_err());
        assert!("half".parse::<MaxFeatures>().is_err());
    }

    #[test]
    fn table_defaults() {
        let p = ForestParams::default();
        assert_eq!(
            (p.n_estimators, p.min_samples_split, p.min_samples_leaf, p.max_depth, p.bootstrap),
            (100, 5, 4, 100, false)
        );
        assert!(p.validate().is_ok());
        assert!(ForestParams { n_estimators: 0, ..p.clone() }.validate().is_err());
        assert!(ForestParams { max_depth: 0, ..p }.validate().is_err());
    }
}
