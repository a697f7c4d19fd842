//! Parameter sweeps: build each family member, solve each game, emit CSV.

use std::fmt::Write;

use serde::{Deserialize, Serialize};

use crate::error::{ConstructionError, FormatError, GameError};
use crate::families::family;
use crate::game::{solve, GameVerdict, TokenBudget};
use crate::pda::Pda;
use crate::turing::TuringMachine;

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ExperimentConfig {
    pub family: String,
    /// Construction parameters; ignored by families without one.
    #[serde(default = "zero")]
    pub params: Vec<usize>,
    /// Token counts per row: `3`, `const:3`, `linear`, `exp`, `exp:2`,
    /// `param` or `param+1` (relative to the construction parameter).
    pub tokens: Vec<String>,
    pub horizons: Vec<usize>,
    #[serde(default = "default_budgets")]
    pub eps_budgets: Vec<usize>,
    #[serde(default)]
    pub output: Option<String>,
    #[serde(default)]
    pub tm: Option<crate::turing::TmDoc>,
}

fn zero() -> Vec<usize> {
    vec![0]
}

fn default_budgets() -> Vec<usize> {
    vec![64]
}

#[derive(Debug, thiserror::Error)]
pub enum ExperimentError {
    #[error(transparent)]
    Format(#[from] FormatError),
    #[error(transparent)]
    Construction(#[from] ConstructionError),
    #[error(transparent)]
    Game(#[from] GameError),
    #[error("invalid experiment: {0}")]
    Invalid(String),
}

impl ExperimentConfig {
    pub fn from_json(text: &str) -> Result<Self, FormatError> {
        serde_json::from_str(text).map_err(FormatError::from_json)
    }

    pub fn validate(&self) -> Result<(), ExperimentError> {
        family(&self.family)?;
        for (name, empty) in [
            ("params", self.params.is_empty()),
            ("tokens", self.tokens.is_empty()),
            ("horizons", self.horizons.is_empty()),
            ("eps_budgets", self.eps_budgets.is_empty()),
        ] {
            if empty {
                return Err(ExperimentError::Invalid(format!("`{name}` must not be empty")));
            }
        }
        Ok(())
    }
}

pub const CSV_HEADER: &str = "family,n,k,states,stack_symbols,size,tokens,horizon,eps_budget,verdict";

/// Token count for one row. `horizon` is the announced length for the
/// parameterized budgets.
fn token_count(entry: &str, pda: &Pda, param: usize, horizon: usize) -> Result<usize, GameError> {
    if let Ok(c) = entry.parse::<usize>() {
        return Ok(c);
    }
    if entry == "param" {
        return Ok(param);
    }
    if let Some(d) = entry.strip_prefix("param+") {
        let d: usize = d.parse().map_err(|_| GameError::BadParameter(format!("bad offset in `{entry}`")))?;
        return Ok(param + d);
    }
    Ok(TokenBudget::parse(entry, pda)?.tokens(horizon))
}

/// Runs the sweep. Rows are ordered by parameter, token entry, horizon and
/// budget, each in the order given.
pub fn run_experiment(cfg: &ExperimentConfig) -> Result<String, ExperimentError> {
    cfg.validate()?;
    let fam = family(&cfg.family)?;
    let tm = cfg.tm.as_ref().map(TuringMachine::from_doc).transpose()?;
    let params: &[usize] = if fam.parameter().is_some() { &cfg.params } else { &[0] };
    let mut out = String::from(CSV_HEADER);
    out.push('\n');
    for &n in params {
        let pda = fam.build(n, tm.as_ref())?;
        let n_col = if fam.parameter().is_some() { n.to_string() } else { String::new() };
        for entry in &cfg.tokens {
            for &h in &cfg.horizons {
                for &budget in &cfg.eps_budgets {
                    let k = token_count(entry, &pda, n, h)?;
                    if k == 0 {
                        return Err(ExperimentError::Invalid(format!("`{entry}` gives zero tokens")));
                    }
                    let verdict = match solve(&pda, k, h, budget)?.verdict {
                        GameVerdict::DeterminerWins { .. } => "determiner",
                        GameVerdict::SpoilerWins { .. } => "spoiler",
                        GameVerdict::Unknown { .. } => "unknown",
                    };
                    writeln!(
                        out,
                        "{},{n_col},{k},{},{},{},{entry},{h},{budget},{verdict}",
                        fam.name(),
                        pda.states().len(),
                        pda.stack_alphabet().len(),
                        pda.size()
                    )
                    .expect("writing to a string");
                }
            }
        }
    }
    Ok(out)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn cfg(text: &str) -> ExperimentConfig {
        ExperimentConfig::from_json(text).unwrap()
    }

    #[test]
    fn union_matrix() {
        let c = cfg(r#"{"family":"union","params":[1],"tokens":["param","param+1"],"horizons":[4]}"#);
        let csv = run_experiment(&c).unwrap();
        let rows: Vec<&str> = csv.lines().collect();
        assert_eq!(rows[0], CSV_HEADER);
        assert!(rows[1].starts_with("union,1,1,") && rows[1].ends_with(",spoiler"));
        assert!(rows[2].starts_with("union,1,2,") && rows[2].ends_with(",determiner"));
    }

    #[test]
    fn empty_range_is_rejected() {
        let c = cfg(r#"{"family":"block","tokens":["1"],"horizons":[]}"#);
        assert!(matches!(run_experiment(&c), Err(ExperimentError::Invalid(_))));
        let c = cfg(r#"{"family":"nope","tokens":["1"],"horizons":[1]}"#);
        assert!(matches!(run_experiment(&c), Err(ExperimentError::Construction(_))));
    }

    #[test]
    fn unknown_fields_are_rejected() {
        assert!(ExperimentConfig::from_json(r#"{"family":"block","tokens":["1"],"horizons":[1],"x":1}"#).is_err());
    }
}
