//! Run configuration: built-in defaults, overridden by a TOML file,
//! overridden by command-line flags.

use std::path::Path;

use grreduce::cycles::CycleDescriptor;
use grreduce::moment::MomentVector;
use grreduce::tol::{DEFAULT_FD_STEP, TAU_LAG, TAU_OPEN, TAU_PLUCK, TAU_SOLVE};
use serde::{Deserialize, Serialize};

use crate::CliError;

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Tolerances {
    pub tau_pluck: f64,
    pub tau_solve: f64,
    pub tau_lag: f64,
    pub tau_open: f64,
}

impl Default for Tolerances {
    fn default() -> Self {
        Self { tau_pluck: TAU_PLUCK, tau_solve: TAU_SOLVE, tau_lag: TAU_LAG, tau_open: TAU_OPEN }
    }
}

/// Fully resolved settings of one run.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct RunConfig {
    pub n: usize,
    pub k: usize,
    pub c: Vec<f64>,
    pub pairs: Vec<(usize, usize)>,
    pub samples: usize,
    pub seed: u64,
    pub fd_step: f64,
    pub tolerances: Tolerances,
}

/// Partial settings, as read from a file or from flags.
#[derive(Debug, Clone, Default, PartialEq, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct Overrides {
    pub n: Option<usize>,
    pub k: Option<usize>,
    pub c: Option<Vec<f64>>,
    pub pairs: Option<PairList>,
    pub samples: Option<usize>,
    pub seed: Option<u64>,
    pub fd_step: Option<f64>,
    #[serde(default)]
    pub tolerances: ToleranceOverrides,
}

#[derive(Debug, Clone, Copy, Default, PartialEq, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ToleranceOverrides {
    pub tau_pluck: Option<f64>,
    pub tau_solve: Option<f64>,
    pub tau_lag: Option<f64>,
    pub tau_open: Option<f64>,
}

/// Pairs written either as `"0-1,2-3"` or as `[[0, 1], [2, 3]]`.
#[derive(Debug, Clone, PartialEq, Deserialize)]
#[serde(untagged)]
pub enum PairList {
    Text(String),
    List(Vec<(usize, usize)>),
}

impl PairList {
    pub fn resolve(&self) -> Result<Vec<(usize, usize)>, CliError> {
        match self {
            PairList::List(v) => Ok(v.clone()),
            PairList::Text(s) => parse_pairs(s),
        }
    }
}

pub fn parse_pairs(text: &str) -> Result<Vec<(usize, usize)>, CliError> {
    text.split(',')
        .map(str::trim)
        .filter(|t| !t.is_empty())
        .map(|t| {
            let (a, b) = t.split_once('-').ok_or_else(|| CliError::Config(format!("pair {t:?} is not of the form i-j")))?;
            let parse = |x: &str| {
                x.trim().parse::<usize>().map_err(|_| CliError::Config(format!("pair {t:?} has a non-integer index")))
            };
            Ok((parse(a)?, parse(b)?))
        })
        .collect()
}

impl Overrides {
    pub fn from_toml_file(path: &Path) -> Result<Self, CliError> {
        let text = std::fs::read_to_string(path)
            .map_err(|e| CliError::Config(format!("cannot read config {}: {e}", path.display())))?;
        toml::from_str(&text).map_err(|e| CliError::Config(format!("invalid config {}: {e}", path.display())))
    }

    /// `self` with every field set in `over` replaced.
    pub fn layered(self, over: Overrides) -> Overrides {
        Overrides {
            n: over.n.or(self.n),
            k: over.k.or(self.k),
            c: over.c.or(self.c),
            pairs: over.pairs.or(self.pairs),
            samples: over.samples.or(self.samples),
            seed: over.seed.or(self.seed),
            fd_step: over.fd_step.or(self.fd_step),
            tolerances: ToleranceOverrides {
                tau_pluck: over.tolerances.tau_pluck.or(self.tolerances.tau_pluck),
                tau_solve: over.tolerances.tau_solve.or(self.tolerances.tau_solve),
                tau_lag: over.tolerances.tau_lag.or(self.tolerances.tau_lag),
                tau_open: over.tolerances.tau_open.or(self.tolerances.tau_open),
            },
        }
    }
}

impl RunConfig {
    /// Applies `overrides` to the defaults `n = 3, k = 2, c = (0.2, 0.3),
    /// samples = 100, h = 1e-4, seed = 42` and validates the result.
    ///
    /// Without explicit targets, `c = (0.2, 0.3)` is used for `k = 2` without
    /// pairs and `c_i = 1/(2k)` otherwise.
    pub fn resolve(overrides: &Overrides) -> Result<Self, CliError> {
        let n = overrides.n.unwrap_or(3);
        let k = overrides.k.unwrap_or(2);
        let pairs = overrides.pairs.as_ref().map(PairList::resolve).transpose()?.unwrap_or_default();
        let c = overrides.c.clone().unwrap_or_else(|| {
            if k == 2 && pairs.is_empty() {
                vec![0.2, 0.3]
            } else {
                vec![0.5 / k.max(1) as f64; k]
            }
        });
        let defaults = Tolerances::default();
        let t = &overrides.tolerances;
        let config = RunConfig {
            n,
            k,
            c,
            pairs,
            samples: overrides.samples.unwrap_or(100),
            seed: overrides.seed.unwrap_or(42),
            fd_step: overrides.fd_step.unwrap_or(DEFAULT_FD_STEP),
            tolerances: Tolerances {
                tau_pluck: t.tau_pluck.unwrap_or(defaults.tau_pluck),
                tau_solve: t.tau_solve.unwrap_or(defaults.tau_solve),
                tau_lag: t.tau_lag.unwrap_or(defaults.tau_lag),
                tau_open: t.tau_open.unwrap_or(defaults.tau_open),
            },
        };
        config.validate()?;
        Ok(config)
    }

    fn validate(&self) -> Result<(), CliError> {
        let bad = |msg: String| Err(CliError::Config(msg));
        let t = &self.tolerances;
        for (name, value) in [("tau_pluck", t.tau_pluck), ("tau_solve", t.tau_solve), ("tau_lag", t.tau_lag), ("tau_open", t.tau_open)] {
            if !(value.is_finite() && value > 0.0) {
                return bad(format!("{name} must be positive, got {value}"));
            }
        }
        if !(self.fd_step.is_finite() && self.fd_step > 0.0) {
            return bad(format!("fd_step must be positive, got {}", self.fd_step));
        }
        if self.samples == 0 {
            return bad("samples must be at least 1".into());
        }
        if self.n < 2 {
            return bad(format!("n must be at least 2, got {}", self.n));
        }
        if self.k + 1 > self.n {
            return bad(format!("k must lie in [0, n − 1], got k = {}, n = {}", self.k, self.n));
        }
        if self.c.len() != self.k {
            return bad(format!("expected {} moment targets, got {}", self.k, self.c.len()));
        }
        let sum: f64 = self.c.iter().sum();
        if !self.c.iter().all(|&x| x.is_finite() && x > t.tau_open) || !(sum < 1.0 - t.tau_open) {
            return bad(format!("targets {:?} need c_i > {:e} and sum < 1 − {:e}", self.c, t.tau_open, t.tau_open));
        }
        self.descriptor().map(|_| ())
    }

    pub fn targets(&self) -> Result<MomentVector, CliError> {
        MomentVector::target(self.c.clone()).map_err(|e| CliError::Config(e.to_string()))
    }

    pub fn descriptor(&self) -> Result<CycleDescriptor, CliError> {
        CycleDescriptor::new(self.n, self.k, self.pairs.clone(), self.targets()?).map_err(|e| CliError::Config(e.to_string()))
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn defaults() {
        let c = RunConfig::resolve(&Overrides::default()).unwrap();
        assert_eq!((c.n, c.k, c.samples, c.seed), (3, 2, 100, 42));
        assert_eq!(c.c, vec![0.2, 0.3]);
        assert_eq!(c.fd_step, 1e-4);
        assert_eq!(c.tolerances, Tolerances::default());
    }

    #[test]
    fn pair_parsing() {
        assert_eq!(parse_pairs("0-1, 2-3").unwrap(), vec![(0, 1), (2, 3)]);
        assert_eq!(parse_pairs("").unwrap(), vec![]);
        assert!(parse_pairs("0:1").is_err());
        assert!(parse_pairs("a-1").is_err());
    }

    #[test]
    fn file_then_flags() {
        let file: Overrides = toml::from_str(
            "n = 5\nk = 4\npairs = [[0, 1]]\nseed = 7\n[tolerances]\ntau_lag = 1e-6\n",
        )
        .unwrap();
        let flags = Overrides { seed: Some(9), pairs: Some(PairList::Text("0-1,2-3".into())), ..Overrides::default() };
        let c = RunConfig::resolve(&file.layered(flags)).unwrap();
        assert_eq!((c.n, c.k, c.seed), (5, 4, 9));
        assert_eq!(c.pairs, vec![(0, 1), (2, 3)]);
        assert_eq!(c.c, vec![0.125; 4]);
        assert_eq!(c.tolerances.tau_lag, 1e-6);
        assert_eq!(c.tolerances.tau_pluck, TAU_PLUCK);
    }

    #[test]
    fn rejects_bad_settings() {
        let resolve = |o: Overrides| RunConfig::resolve(&o);
        assert!(resolve(Overrides { samples: Some(0), ..Default::default() }).is_err());
        assert!(resolve(Overrides { k: Some(3), ..Default::default() }).is_err());
        assert!(resolve(Overrides { c: Some(vec![0.6, 0.5]), ..Default::default() }).is_err());
        assert!(resolve(Overrides { pairs: Some(PairList::Text("0-1".into())), c: Some(vec![0.2, 0.3]), ..Default::default() }).is_err());
        let tol = ToleranceOverrides { tau_lag: Some(-1.0), ..Default::default() };
        assert!(resolve(Overrides { tolerances: tol, ..Default::default() }).is_err());
        assert!(toml::from_str::<Overrides>("bogus = 1").is_err());
    }
}
