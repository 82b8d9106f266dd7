//! Runners behind the `mtoone` binary: analyze, verify, search and count.

use std::fmt;
use std::path::PathBuf;
use std::str::FromStr;

use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;

pub mod analyze;
pub mod count;
pub mod families;
pub mod grid;
pub mod report;
pub mod search;

use grid::Grid;
use report::{Record, Report};

pub const EXIT_DISAGREE: i32 = 1;
pub const EXIT_PARSE: i32 = 2;
pub const EXIT_SCALE: i32 = 3;
pub const EXIT_BUDGET: i32 = 4;

#[derive(Debug, thiserror::Error)]
pub enum CliError {
    #[error("{0}")]
    Usage(String),
    #[error(transparent)]
    Core(#[from] mtoone_core::Error),
    #[error("search space has {size} candidates, over the budget of {budget}")]
    Budget { size: u128, budget: u128 },
    #[error("i/o: {0}")]
    Io(String),
}

impl From<std::io::Error> for CliError {
    fn from(e: std::io::Error) -> Self {
        CliError::Io(e.to_string())
    }
}

impl CliError {
    pub fn exit_code(&self) -> i32 {
        use mtoone_core::Error as E;
        match self {
            CliError::Usage(_) => EXIT_PARSE,
            CliError::Budget { .. } => EXIT_BUDGET,
            CliError::Io(_) => EXIT_DISAGREE,
            CliError::Core(E::UnsupportedScale(_)) => EXIT_SCALE,
            CliError::Core(E::Hypothesis { .. } | E::Indeterminate(_) | E::Degenerate) => {
                EXIT_DISAGREE
            }
            CliError::Core(_) => EXIT_PARSE,
        }
    }
}

pub fn scale(msg: impl Into<String>) -> CliError {
    CliError::Core(mtoone_core::Error::UnsupportedScale(msg.into()))
}

/// Theorem families known to `verify`.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub enum Family {
    Main,
    SmallM,
    SmallEll,
    Corollaries,
    FqBridge,
    Monomial,
    HdLemma,
    Hd,
    Lift,
    Halfplane,
    G3,
    G5,
    Transfer,
    Towers,
    Count,
    Criteria,
}

impl Family {
    pub const ALL: [Family; 16] = [
        Family::Main,
        Family::SmallM,
        Family::SmallEll,
        Family::Corollaries,
        Family::FqBridge,
        Family::Monomial,
        Family::HdLemma,
        Family::Hd,
        Family::Lift,
        Family::Halfplane,
        Family::G3,
        Family::G5,
        Family::Transfer,
        Family::Towers,
        Family::Count,
        Family::Criteria,
    ];

    pub fn name(self) -> &'static str {
        match self {
            Family::Main => "main",
            Family::SmallM => "small-m",
            Family::SmallEll => "small-ell",
            Family::Corollaries => "corollaries",
            Family::FqBridge => "fq-bridge",
            Family::Monomial => "monomial",
            Family::HdLemma => "hd-lemma",
            Family::Hd => "hd",
            Family::Lift => "lift",
            Family::Halfplane => "halfplane",
            Family::G3 => "g3",
            Family::G5 => "g5",
            Family::Transfer => "transfer",
            Family::Towers => "towers",
            Family::Count => "count",
            Family::Criteria => "criteria",
        }
    }
}

impl fmt::Display for Family {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

impl FromStr for Family {
    type Err = CliError;

    fn from_str(s: &str) -> Result<Self, CliError> {
        Family::ALL
            .into_iter()
            .find(|f| f.name() == s)
            .ok_or_else(|| {
                let names: Vec<&str> = Family::ALL.iter().map(|f| f.name()).collect();
                CliError::Usage(format!(
                    "unknown family {s:?}; expected one of {}",
                    names.join(", ")
                ))
            })
    }
}

/// Everything `verify` needs besides the output paths.
#[derive(Clone, Debug)]
pub struct VerifyConfig {
    pub family: Family,
    pub grid: Grid,
    /// Random draws per grid cell; each family has its own default.
    pub draws: Option<usize>,
    pub seed: u64,
    /// Lift the m <= 16 cap of the main grid.
    pub all: bool,
    /// Extra model file for the criteria family.
    pub fixture: Option<PathBuf>,
}

impl VerifyConfig {
    pub fn new(family: Family) -> Self {
        VerifyConfig {
            family,
            grid: Grid::default(),
            draws: None,
            seed: 0,
            all: false,
            fixture: None,
        }
    }

    pub fn draws_or(&self, default: usize) -> usize {
        self.draws.unwrap_or(default)
    }

    /// Reproducible generator for one grid cell, independent of scheduling.
    pub fn rng(&self, key: &[u64]) -> ChaCha8Rng {
        let mut h = self.seed ^ 0x9e37_79b9_7f4a_7c15;
        for &k in key {
            h = splitmix(h ^ k);
        }
        ChaCha8Rng::seed_from_u64(h)
    }
}

fn splitmix(mut z: u64) -> u64 {
    z = z.wrapping_add(0x9e37_79b9_7f4a_7c15);
    z = (z ^ (z >> 30)).wrapping_mul(0xbf58_476d_1ce4_e5b9);
    z = (z ^ (z >> 27)).wrapping_mul(0x94d0_49bb_1331_11eb);
    z ^ (z >> 31)
}

/// Runs `work` on each cell in parallel and concatenates the records.
pub(crate) fn fan<T, F>(cells: Vec<T>, work: F) -> Vec<Record>
where
    T: Send + Sync,
    F: Fn(&T) -> Vec<Record> + Sync + Send,
{
    cells.par_iter().flat_map_iter(work).collect()
}

/// Runs a family with the given number of worker threads (0 = all processors).
pub fn run_verify(cfg: &VerifyConfig, jobs: usize) -> Result<Report, CliError> {
    let pool = rayon::ThreadPoolBuilder::new()
        .num_threads(jobs)
        .build()
        .map_err(|e| CliError::Usage(e.to_string()))?;
    let records = pool.install(|| families::run(cfg))?;
    Ok(Report::new(cfg.family.name(), cfg.seed, records))
}

/// Exit status of `verify`: 0 iff no record disagrees.
pub fn verify_exit_code(report: &Report) -> i32 {
    if report.summary.disagreements == 0 {
        0
    } else {
        EXIT_DISAGREE
    }
}
