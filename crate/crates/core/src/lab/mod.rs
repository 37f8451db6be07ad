//! Randomized and optimization experiments around the braidability of operator triples.
//!
//! Every experiment is a pure function of its [`ExperimentConfig`]. Trial `i` draws its
//! operators from a [`Sampler`](crate::operator::random::Sampler) seeded with
//! `trial_seed(cfg.seed, i)`; trials run in parallel and are collected in index order, so
//! reports are bit-reproducible.

mod evidence;
mod experiments;
mod optimize;

use std::path::PathBuf;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::fidelity::PlacementPolicy;
use crate::operator::io::MatrixFile;
use crate::operator::random::OperatorKind;
use crate::operator::{CMatrix, ToleranceProfile};

pub use evidence::{ConjectureEvidence, Counterexample, EvidenceSummary, Reading, TrialRecord};
pub use experiments::{
    perturbation_sweep, run_case_theorems, run_commuting_experiment, run_functional_calculus,
    run_mixed_law_checks, run_obstruction_search, run_rank_one_experiment, CaseReport, CaseTrial,
    CommutingReport, CommutingTrial, FunctionalCalculusReport, MixedLawReport, Polynomial, RankOneReport,
    RankOneTrial, SweepPoint,
};
pub use optimize::{kappa_sweep, minimize_defect, KappaSweep, MinimizeReport, OptimizerSchedule};

/// Relative commutator below which a pair counts as commuting.
pub const COMMUTING_THRESHOLD: f64 = 1e-10;
/// Relative commutator a sampled pair must exceed to count as clearly non-commuting.
pub const NONCOMMUTING_FLOOR: f64 = 1e-3;

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct ExperimentConfig {
    pub dim_min: usize,
    pub dim_max: usize,
    pub trials: usize,
    pub seed: u64,
    pub tol: ToleranceProfile,
    pub family: OperatorKind,
    pub policy: PlacementPolicy,
    pub out_path: Option<PathBuf>,
}

impl Default for ExperimentConfig {
    fn default() -> Self {
        Self {
            dim_min: 3,
            dim_max: 3,
            trials: 100,
            seed: 0,
            tol: ToleranceProfile::default(),
            family: OperatorKind::Psd,
            policy: PlacementPolicy::LeftOnly,
            out_path: None,
        }
    }
}

impl ExperimentConfig {
    pub fn new(dim_min: usize, dim_max: usize, trials: usize, seed: u64) -> Self {
        Self {
            dim_min,
            dim_max,
            trials,
            seed,
            ..Self::default()
        }
    }

    pub fn with_policy(mut self, policy: PlacementPolicy) -> Self {
        self.policy = policy;
        self
    }

    pub fn with_tol(mut self, tol: ToleranceProfile) -> Self {
        self.tol = tol;
        self
    }

    pub fn validate(&self) -> Result<()> {
        if self.trials == 0 {
            return Err(Error::Precondition("trials must be at least 1".into()));
        }
        if self.dim_min == 0 {
            return Err(Error::Shape("dimension must be at least 1".into()));
        }
        if self.dim_min > self.dim_max {
            return Err(Error::Shape(format!("empty dimension range {}..={}", self.dim_min, self.dim_max)));
        }
        if matches!(self.family, OperatorKind::CommutingFamily(_) | OperatorKind::Hermitian) {
            return Err(Error::Precondition(format!(
                "family {:?} does not produce single positive operators",
                self.family
            )));
        }
        self.tol.validate()
    }

    /// Non-commuting searches need room for non-commuting matrices.
    pub fn validate_noncommuting(&self) -> Result<()> {
        self.validate()?;
        if self.dim_min < 2 {
            return Err(Error::Shape("non-commuting searches need dimension >= 2".into()));
        }
        Ok(())
    }

    /// Dimensions cycle through the configured range by trial index.
    pub fn dim_for(&self, index: usize) -> usize {
        self.dim_min + index % (self.dim_max - self.dim_min + 1)
    }
}

/// A failed assertion with everything needed to replay it.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct Failure {
    pub experiment: String,
    pub trial: usize,
    pub seed: u64,
    pub message: String,
    pub matrices: Vec<MatrixFile>,
}

impl Failure {
    pub(crate) fn new(experiment: &str, trial: usize, seed: u64, message: String, ms: &[&CMatrix]) -> Self {
        Self {
            experiment: experiment.to_string(),
            trial,
            seed,
            message,
            matrices: ms.iter().map(|m| MatrixFile::from_matrix(m)).collect(),
        }
    }
}
