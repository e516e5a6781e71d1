//! Textual and structured description of a state family plus its parameters.
//!
//! Canonical form: `family:d=<d>:params=<comma-list>`, e.g.
//! `werner2:d=2:params=0.8` or `gen_bell:d=2:params=0.7,0.1,0.1,0.1`.

use std::fmt;
use std::str::FromStr;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Family {
    Werner2,
    Weyl2,
    WeylD,
    Isotropic,
    WernerD,
    RankDeficient,
    GenBell,
    NonWeyl,
    NoisySchmidt,
}

impl Family {
    pub const ALL: [Family; 9] = [
        Family::Werner2,
        Family::Weyl2,
        Family::WeylD,
        Family::Isotropic,
        Family::WernerD,
        Family::RankDeficient,
        Family::GenBell,
        Family::NonWeyl,
        Family::NoisySchmidt,
    ];

    pub fn name(self) -> &'static str {
        match self {
            Family::Werner2 => "werner2",
            Family::Weyl2 => "weyl2",
            Family::WeylD => "weyl_d",
            Family::Isotropic => "isotropic",
            Family::WernerD => "werner_d",
            Family::RankDeficient => "rank_deficient",
            Family::GenBell => "gen_bell",
            Family::NonWeyl => "non_weyl",
            Family::NoisySchmidt => "noisy_schmidt",
        }
    }

    /// Families defined only for two qubits.
    pub fn fixed_dimension(self) -> Option<usize> {
        match self {
            Family::Werner2 | Family::Weyl2 | Family::NonWeyl => Some(2),
            _ => None,
        }
    }

    /// Number of parameters the family takes in dimension `d`.
    pub fn param_count(self, d: usize) -> usize {
        match self {
            Family::Werner2 | Family::Isotropic | Family::WernerD | Family::RankDeficient => 1,
            Family::Weyl2 => 3,
            Family::WeylD => d * d - 1,
            Family::GenBell => d * d,
            Family::NonWeyl => 2,
            Family::NoisySchmidt => d + 1,
        }
    }

    /// Parameter names in order, used by sweeps.
    pub fn param_names(self, d: usize) -> Vec<String> {
        match self {
            Family::Werner2 | Family::RankDeficient => vec!["p".into()],
            Family::Weyl2 => vec!["t1".into(), "t2".into(), "t3".into()],
            Family::WeylD => (1..d * d).map(|i| format!("w{i}")).collect(),
            Family::Isotropic => vec!["F".into()],
            Family::WernerD => vec!["x".into()],
            Family::GenBell => (0..d * d).map(|i| format!("p{i}")).collect(),
            Family::NonWeyl => vec!["x".into(), "p".into()],
            Family::NoisySchmidt => {
                let mut v: Vec<String> = (0..d).map(|i| format!("lambda{i}")).collect();
                v.push("p".into());
                v
            }
        }
    }
}

impl fmt::Display for Family {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

impl FromStr for Family {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        Family::ALL
            .iter()
            .copied()
            .find(|f| f.name() == s)
            .ok_or_else(|| Error::Parse(format!("unknown state family '{s}'")))
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct StateSpec {
    pub family: Family,
    pub d: usize,
    pub params: Vec<f64>,
}

impl StateSpec {
    /// Builds a spec and checks the parameter count and dimension.
    ///
    /// Range checks happen in the state constructors.
    pub fn new(family: Family, d: usize, params: Vec<f64>) -> Result<Self> {
        if let Some(fixed) = family.fixed_dimension() {
            if d != fixed {
                return Err(Error::InvalidParameter(format!(
                    "{family} is defined for d={fixed}, got d={d}"
                )));
            }
        }
        if d < 2 {
            return Err(Error::InvalidParameter(format!(
                "dimension must be >= 2, got {d}"
            )));
        }
        let want = family.param_count(d);
        if params.len() != want {
            return Err(Error::InvalidParameter(format!(
                "{family} with d={d} takes {want} parameter(s), got {}",
                params.len()
            )));
        }
        if let Some(bad) = params.iter().find(|v| !v.is_finite()) {
            return Err(Error::InvalidParameter(format!(
                "non-finite parameter {bad}"
            )));
        }
        Ok(Self { family, d, params })
    }

    pub fn werner2(p: f64) -> Self {
        Self {
            family: Family::Werner2,
            d: 2,
            params: vec![p],
        }
    }

    pub fn weyl2(t: [f64; 3]) -> Self {
        Self {
            family: Family::Weyl2,
            d: 2,
            params: t.to_vec(),
        }
    }

    pub fn weyl_d(d: usize, w: Vec<f64>) -> Self {
        Self {
            family: Family::WeylD,
            d,
            params: w,
        }
    }

    pub fn isotropic(d: usize, f: f64) -> Self {
        Self {
            family: Family::Isotropic,
            d,
            params: vec![f],
        }
    }

    pub fn werner_d(d: usize, x: f64) -> Self {
        Self {
            family: Family::WernerD,
            d,
            params: vec![x],
        }
    }

    pub fn rank_deficient(d: usize, p: f64) -> Self {
        Self {
            family: Family::RankDeficient,
            d,
            params: vec![p],
        }
    }

    pub fn gen_bell(d: usize, probs: Vec<f64>) -> Self {
        Self {
            family: Family::GenBell,
            d,
            params: probs,
        }
    }

    pub fn non_weyl(x: f64, p: f64) -> Self {
        Self {
            family: Family::NonWeyl,
            d: 2,
            params: vec![x, p],
        }
    }

    pub fn noisy_schmidt(lambdas: &[f64], p: f64) -> Self {
        let mut params = lambdas.to_vec();
        params.push(p);
        Self {
            family: Family::NoisySchmidt,
            d: lambdas.len(),
            params,
        }
    }

    /// Index of a named parameter (see [`Family::param_names`]), or a bare index.
    pub fn param_index(&self, name: &str) -> Result<usize> {
        let names = self.family.param_names(self.d);
        if let Some(i) = names.iter().position(|n| n == name) {
            return Ok(i);
        }
        match name.parse::<usize>() {
            Ok(i) if i < self.params.len() => Ok(i),
            _ => Err(Error::InvalidParameter(format!(
                "{} has no parameter '{name}' (known: {})",
                self.family,
                names.join(",")
            ))),
        }
    }

    pub fn with_param(&self, index: usize, value: f64) -> Self {
        let mut s = self.clone();
        s.params[index] = value;
        s
    }
}

impl fmt::Display for StateSpec {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}:d={}:params=", self.family, self.d)?;
        for (i, p) in self.params.iter().enumerate() {
            if i > 0 {
                f.write_str(",")?;
            }
            write!(f, "{p}")?;
        }
        Ok(())
    }
}

impl FromStr for StateSpec {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        let mut parts = s.split(':');
        let family: Family = parts
            .next()
            .ok_or_else(|| Error::Parse("empty state spec".into()))?
            .trim()
            .parse()?;
        let mut d = family.fixed_dimension();
        let mut params = None;
        for part in parts {
            let (key, value) = part
                .split_once('=')
                .ok_or_else(|| Error::Parse(format!("expected key=value, got '{part}'")))?;
            match key.trim() {
                "d" => {
                    d = Some(
                        value
                            .trim()
                            .parse()
                            .map_err(|_| Error::Parse(format!("invalid dimension '{value}'")))?,
                    )
                }
                "params" => params = Some(parse_list(value)?),
                other => return Err(Error::Parse(format!("unknown field '{other}'"))),
            }
        }
        let d = d.ok_or_else(|| Error::Parse(format!("{family} needs d=<dimension>")))?;
        let params = params.ok_or_else(|| Error::Parse("missing params=<list>".into()))?;
        StateSpec::new(family, d, params)
    }
}

/// Parses a comma-separated list of reals.
pub fn parse_list(s: &str) -> Result<Vec<f64>> {
    s.split(',')
        .filter(|t| !t.trim().is_empty())
        .map(|t| {
            t.trim()
                .parse::<f64>()
                .map_err(|_| Error::Parse(format!("invalid number '{t}'")))
        })
        .collect()
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn canonical_form_round_trips() {
        let s = StateSpec::gen_bell(2, vec![0.7, 0.1, 0.1, 0.1]);
        let text = s.to_string();
        assert_eq!(text, "gen_bell:d=2:params=0.7,0.1,0.1,0.1");
        assert_eq!(text.parse::<StateSpec>().unwrap(), s);
    }

    #[test]
    fn two_qubit_families_default_their_dimension() {
        let s: StateSpec = "werner2:params=0.8".parse().unwrap();
        assert_eq!(s, StateSpec::werner2(0.8));
    }

    #[test]
    fn wrong_param_count_is_rejected() {
        assert!("weyl2:d=2:params=0.1,0.2".parse::<StateSpec>().is_err());
        assert!("isotropic:d=3:params=0.1,0.2".parse::<StateSpec>().is_err());
        assert!("werner2:d=3:params=0.5".parse::<StateSpec>().is_err());
        assert!("bogus:d=3:params=0.5".parse::<StateSpec>().is_err());
    }

    #[test]
    fn named_parameters() {
        let s = StateSpec::noisy_schmidt(&[0.6, 0.8], 0.5);
        assert_eq!(s.param_index("p").unwrap(), 2);
        assert_eq!(s.param_index("lambda1").unwrap(), 1);
        assert!(s.param_index("q").is_err());
    }
}
