use crate::config::Configuration;
use crate::error::{Error, Result};
use crate::forest::deserialize_forest;
use crate::fuzzy::RuleBase;
use crate::tuning::{Expert, Fixed, FullSearch, Predictive, RandomForest, Strategy};
use serde::{Deserialize, Serialize};
use std::path::{Path, PathBuf};
use std::str::FromStr;

/// Strategy selection as written in scenario files and on the command line.
#[derive(Clone, Debug, Default, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "kebab-case", rename_all_fields = "camelCase", deny_unknown_fields)]
pub enum StrategySpec {
    #[default]
    Full,
    Predictive {
        #[serde(default)]
        retrial_interval: Option<usize>,
    },
    Expert {
        /// Rule file; the shipped rules when absent.
        #[serde(default)]
        rules: Option<PathBuf>,
        #[serde(default)]
        threshold: Option<f64>,
    },
    RandomForest {
        model: PathBuf,
        #[serde(default)]
        k: Option<usize>,
    },
    Fixed {
        configuration: Configuration,
    },
}

/// A ready strategy plus the model file it was loaded from, if any.
pub struct BuiltStrategy {
    pub strategy: Box<dyn Strategy>,
    pub model_file: Option<String>,
}

impl StrategySpec {
    pub fn resolve_paths(&mut self, base: &Path) {
        let fix = |p: &mut PathBuf| {
            if p.is_relative() {
                *p = base.join(&*p);
            }
        };
        match self {
            StrategySpec::Expert { rules: Some(p), .. } => fix(p),
            StrategySpec::RandomForest { model, .. } => fix(model),
            _ => {}
        }
    }

    pub fn build(&self, space_len: usize, total_phases: usize) -> Result<BuiltStrategy> {
        let (strategy, model_file): (Box<dyn Strategy>, _) = match self {
            StrategySpec::Full => (Box::new(FullSearch), None),
            StrategySpec::Predictive { retrial_interval } => {
                let r = retrial_interval.unwrap_or_else(|| Predictive::default_retrial_interval(Some(total_phases)));
                (Box::new(Predictive::new(space_len, r)), None)
            }
            StrategySpec::Expert { rules, threshold } => {
                let rb = match rules {
                    Some(p) => RuleBase::parse(&std::fs::read_to_string(p)?)?,
                    None => RuleBase::default_rules(),
                };
                let mut e = Expert::new(rb);
                if let Some(t) = threshold {
                    e.threshold = *t;
                }
                (Box::new(e), None)
            }
            StrategySpec::RandomForest { model, k } => {
                let text = std::fs::read_to_string(model)
                    .map_err(|e| Error::Model { path: model.display().to_string(), message: e.to_string() })?;
                let forest = deserialize_forest(&text)
                    .map_err(|e| Error::Model { path: model.display().to_string(), message: e.to_string() })?;
                (Box::new(RandomForest { forest, k: k.unwrap_or(3) }), Some(model.display().to_string()))
            }
            StrategySpec::Fixed { configuration } => (Box::new(Fixed(*configuration)), None),
        };
        Ok(BuiltStrategy { strategy, model_file })
    }
}

/// `full`, `predictive`, `expert`, `random-forest` (needs a model path set
/// separately) or `fixed:<configuration>`.
impl FromStr for StrategySpec {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        if let Some(c) = s.strip_prefix("fixed:") {
            return Ok(StrategySpec::Fixed { configuration: c.parse()? });
        }
        match s {
            "full" => Ok(StrategySpec::Full),
            "predictive" => Ok(StrategySpec::Predictive { retrial_interval: None }),
            "expert" => Ok(StrategySpec::Expert { rules: None, threshold: None }),
            "random-forest" | "rf" => Ok(StrategySpec::RandomForest { model: PathBuf::new(), k: None }),
            other => Err(Error::Scenario(format!(
                "unknown strategy `{other}`; expected full, predictive, expert, random-forest or fixed:<configuration>"
            ))),
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn parses_names() {
        assert_eq!("full".parse::<StrategySpec>().unwrap(), StrategySpec::Full);
        let f: StrategySpec = "fixed:VL-List_Iter-NoN3L-SoA".parse().unwrap();
        assert!(matches!(f, StrategySpec::Fixed { .. }));
        assert!("fixed:nope".parse::<StrategySpec>().is_err());
        assert!("greedy".parse::<StrategySpec>().is_err());
    }

    #[test]
    fn missing_model_is_reported() {
        let s = StrategySpec::RandomForest { model: "/nonexistent/model.json".into(), k: None };
        assert!(matches!(s.build(30, 5), Err(Error::Model { .. })));
    }
}
