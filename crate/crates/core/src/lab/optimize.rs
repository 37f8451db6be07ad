//! Constrained search for nearly braidable non-commuting triples.
//!
//! Each restart runs a (1+1) evolution strategy with the one-fifth success rule on
//! `a = GG^H / tr(GG^H)`, complex `G`. The objective is the worst R3 defect over the six
//! placements of three distinct operands; proposals whose largest pairwise relative
//! commutator falls below `κ` are rejected.

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::fidelity::{star, PERMUTATIONS};
use crate::operator::io::MatrixFile;
use crate::operator::random::{trial_seed, Sampler};
use crate::operator::{frobenius, relative_commutator, relative_defect, CMatrix, PositiveOperator, C64};

/// Feasible starting points are drawn by rejection; this many draws per restart at most.
const MAX_START_DRAWS: usize = 10_000;

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct OptimizerSchedule {
    pub restarts: usize,
    /// Objective evaluations per restart.
    pub max_evaluations: usize,
    pub sigma0: f64,
    pub sigma_floor: f64,
    /// Step multiplier after a success; failures multiply by its inverse fourth root.
    pub success_factor: f64,
}

impl Default for OptimizerSchedule {
    fn default() -> Self {
        Self {
            restarts: 50,
            max_evaluations: 3000,
            sigma0: 0.3,
            sigma_floor: 1e-9,
            success_factor: 1.5,
        }
    }
}

impl OptimizerSchedule {
    pub fn with_restarts(mut self, restarts: usize) -> Self {
        self.restarts = restarts;
        self
    }

    fn validate(&self) -> Result<()> {
        if self.restarts == 0 || self.max_evaluations == 0 {
            return Err(Error::Precondition("optimizer needs at least one restart and one evaluation".into()));
        }
        if !(self.sigma0 > 0.0 && self.sigma_floor > 0.0 && self.success_factor > 1.0) {
            return Err(Error::Precondition("invalid step-size schedule".into()));
        }
        Ok(())
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct RestartRecord {
    pub seed: u64,
    pub objective: f64,
    pub evaluations: usize,
    pub final_sigma: f64,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct MinimizeReport {
    pub kappa: f64,
    pub dim: usize,
    pub seed: u64,
    pub schedule: OptimizerSchedule,
    /// Smallest worst-placement defect found.
    pub best_objective: f64,
    /// Best single-placement defect of the same triple.
    pub best_min_defect: f64,
    pub best_commutator: f64,
    pub evaluations: usize,
    pub restarts: Vec<RestartRecord>,
    pub matrices: Vec<MatrixFile>,
}

impl MinimizeReport {
    pub fn stays_above(&self, floor: f64) -> bool {
        self.best_objective > floor
    }
}

struct Evaluation {
    max_defect: f64,
    min_defect: f64,
    commutator: f64,
}

fn operators(gs: &[CMatrix]) -> Result<Vec<PositiveOperator>> {
    gs.iter()
        .map(|g| {
            let p = g * g.adjoint();
            let t = p.trace().re;
            PositiveOperator::from_product(&(p / C64::new(t, 0.0)))
        })
        .collect()
}

fn max_commutator(ops: &[PositiveOperator]) -> Result<f64> {
    let mut m = 0.0f64;
    for i in 0..3 {
        for j in i + 1..3 {
            m = m.max(relative_commutator(ops[i].matrix(), ops[j].matrix())?);
        }
    }
    Ok(m)
}

fn evaluate(ops: &[PositiveOperator], commutator: f64) -> Result<Evaluation> {
    let mut p: Vec<Vec<Option<PositiveOperator>>> = vec![vec![None, None, None]; 3];
    for i in 0..3 {
        for j in 0..3 {
            if i != j {
                p[i][j] = Some(star(&ops[i], &ops[j])?);
            }
        }
    }
    let get = |i: usize, j: usize| p[i][j].as_ref().expect("off-diagonal product");
    let (mut hi, mut lo) = (0.0f64, f64::INFINITY);
    for [i, j, k] in PERMUTATIONS {
        let l = star(&ops[i], get(j, k))?;
        let r = star(get(i, j), get(i, k))?;
        let d = relative_defect(l.matrix(), r.matrix());
        hi = hi.max(d);
        lo = lo.min(d);
    }
    Ok(Evaluation {
        max_defect: hi,
        min_defect: lo,
        commutator,
    })
}

fn normalize(gs: &mut [CMatrix]) {
    for g in gs {
        let n = frobenius(g);
        *g /= C64::new(n, 0.0);
    }
}

struct RestartOutcome {
    record: RestartRecord,
    eval: Evaluation,
    gs: Vec<CMatrix>,
}

fn run_restart(dim: usize, kappa: f64, sched: &OptimizerSchedule, seed: u64) -> Result<RestartOutcome> {
    let mut s = Sampler::new(seed);
    let mut start = None;
    for _ in 0..MAX_START_DRAWS {
        let mut gs: Vec<CMatrix> = (0..3).map(|_| s.complex_gaussian_matrix(dim, dim)).collect();
        normalize(&mut gs);
        let ops = operators(&gs)?;
        let c = max_commutator(&ops)?;
        if c >= kappa {
            start = Some((gs, ops, c));
            break;
        }
    }
    let (mut gs, ops, c) = start.ok_or_else(|| {
        Error::Precondition(format!("no triple with commutator >= {kappa} in {MAX_START_DRAWS} draws"))
    })?;
    let mut cur = evaluate(&ops, c)?;
    let mut evaluations = 1;
    let mut sigma = sched.sigma0;
    let fail_factor = sched.success_factor.powf(-0.25);
    while evaluations < sched.max_evaluations && sigma > sched.sigma_floor && cur.max_defect > 0.0 {
        let dirs: Vec<CMatrix> = (0..3).map(|_| s.complex_gaussian_matrix(dim, dim)).collect();
        let norm = dirs.iter().map(|d| frobenius(d).powi(2)).sum::<f64>().sqrt();
        let mut cand: Vec<CMatrix> = gs.iter().zip(&dirs).map(|(g, d)| g + d * C64::new(sigma / norm, 0.0)).collect();
        normalize(&mut cand);
        let ops = operators(&cand)?;
        let c = max_commutator(&ops)?;
        let better = if c >= kappa {
            evaluations += 1;
            let e = evaluate(&ops, c)?;
            (e.max_defect < cur.max_defect).then_some(e)
        } else {
            None
        };
        match better {
            Some(e) => {
                cur = e;
                gs = cand;
                sigma *= sched.success_factor;
            }
            None => sigma *= fail_factor,
        }
    }
    Ok(RestartOutcome {
        record: RestartRecord {
            seed,
            objective: cur.max_defect,
            evaluations,
            final_sigma: sigma,
        },
        eval: cur,
        gs,
    })
}

/// Minimizes the worst distinct-placement R3 defect subject to a largest pairwise relative
/// commutator of at least `kappa`. `kappa = 0` leaves the search unconstrained.
pub fn minimize_defect(dim: usize, kappa: f64, seed: u64, schedule: &OptimizerSchedule) -> Result<MinimizeReport> {
    if dim < 2 {
        return Err(Error::Shape("minimization needs dimension >= 2".into()));
    }
    if !(0.0..1.0).contains(&kappa) {
        return Err(Error::Domain(format!("commutator floor {kappa} outside [0, 1)")));
    }
    schedule.validate()?;
    let outcomes: Vec<RestartOutcome> = (0..schedule.restarts)
        .into_par_iter()
        .map(|r| run_restart(dim, kappa, schedule, trial_seed(seed, r as u64)))
        .collect::<Result<_>>()?;
    let best = outcomes
        .iter()
        .enumerate()
        .min_by(|(i, a), (j, b)| a.eval.max_defect.total_cmp(&b.eval.max_defect).then(i.cmp(j)))
        .map(|(_, o)| o)
        .expect("at least one restart");
    let ops = operators(&best.gs)?;
    Ok(MinimizeReport {
        kappa,
        dim,
        seed,
        schedule: schedule.clone(),
        best_objective: best.eval.max_defect,
        best_min_defect: best.eval.min_defect,
        best_commutator: best.eval.commutator,
        evaluations: outcomes.iter().map(|o| o.record.evaluations).sum(),
        matrices: ops.iter().map(|p| MatrixFile::from_matrix(p.matrix())).collect(),
        restarts: outcomes.into_iter().map(|o| o.record).collect(),
    })
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct KappaSweep {
    pub kappas: Vec<f64>,
    pub best_objectives: Vec<f64>,
    /// Nondecreasing in `κ`.
    pub monotone: bool,
    /// Nondecreasing up to a relative drop of `noise`.
    pub monotone_within_noise: bool,
    pub noise: f64,
}

pub fn kappa_sweep(
    dim: usize,
    kappas: &[f64],
    seed: u64,
    schedule: &OptimizerSchedule,
    noise: f64,
) -> Result<KappaSweep> {
    let mut sorted = kappas.to_vec();
    sorted.sort_by(f64::total_cmp);
    let best: Vec<f64> = sorted
        .iter()
        .map(|&k| minimize_defect(dim, k, seed, schedule).map(|r| r.best_objective))
        .collect::<Result<_>>()?;
    let monotone = best.windows(2).all(|w| w[1] >= w[0]);
    let monotone_within_noise = best.windows(2).all(|w| w[1] >= w[0] * (1.0 - noise));
    Ok(KappaSweep {
        kappas: sorted,
        best_objectives: best,
        monotone,
        monotone_within_noise,
        noise,
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    fn quick() -> OptimizerSchedule {
        OptimizerSchedule {
            restarts: 4,
            max_evaluations: 300,
            ..OptimizerSchedule::default()
        }
    }

    #[test]
    fn deterministic_given_seed() {
        let a = minimize_defect(2, 0.3, 5, &quick()).unwrap();
        let b = minimize_defect(2, 0.3, 5, &quick()).unwrap();
        assert_eq!(a, b);
        assert!(a.best_commutator >= 0.3);
    }

    #[test]
    fn rejects_bad_inputs() {
        assert!(minimize_defect(1, 0.1, 0, &quick()).is_err());
        assert!(minimize_defect(2, 1.5, 0, &quick()).is_err());
        assert!(minimize_defect(2, 0.1, 0, &quick().with_restarts(0)).is_err());
    }
}
