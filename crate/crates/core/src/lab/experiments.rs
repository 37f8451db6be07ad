use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use super::evidence::{ConjectureEvidence, Counterexample, Reading, TrialRecord};
use super::{ExperimentConfig, Failure, COMMUTING_THRESHOLD, NONCOMMUTING_FLOOR};
use crate::error::{Error, Result};
use crate::fidelity::{
    braidable, oslash, quarter_form_defect, r1_defect, r2_residual, r2_solve, star, PlacementPolicy, Side,
    PERMUTATIONS,
};
use crate::operator::io::MatrixFile;
use crate::operator::random::{trial_seed, OperatorKind, Sampler, STRICT_SHIFT};
use crate::operator::{
    relative_commutator, relative_defect, trace, CMatrix, DensityOperator, PositiveOperator,
    StrictlyPositiveOperator, C64,
};

/// Attempts at drawing a clearly non-commuting sample before giving up.
const MAX_REJECTIONS: usize = 100;

fn max_pairwise_commutator(ops: &[&CMatrix]) -> Result<f64> {
    let mut m = 0.0f64;
    for i in 0..ops.len() {
        for j in i + 1..ops.len() {
            m = m.max(relative_commutator(ops[i], ops[j])?);
        }
    }
    Ok(m)
}

fn sample_member(s: &mut Sampler, kind: OperatorKind, dim: usize) -> PositiveOperator {
    match kind {
        OperatorKind::StrictlyPositive => s.strictly_positive(dim, STRICT_SHIFT).into_inner(),
        OperatorKind::Density => s.density(dim).into_inner(),
        OperatorKind::Rank1Projector => s.rank1_projector(dim),
        // other kinds are rejected by ExperimentConfig::validate
        _ => s.psd(dim),
    }
}

/// Draws `count` members until their largest pairwise commutator exceeds the floor.
fn noncommuting_sample(s: &mut Sampler, kind: OperatorKind, dim: usize, count: usize) -> Result<Vec<PositiveOperator>> {
    for _ in 0..MAX_REJECTIONS {
        let ops: Vec<PositiveOperator> = (0..count).map(|_| sample_member(s, kind, dim)).collect();
        let ms: Vec<&CMatrix> = ops.iter().map(|p| p.matrix()).collect();
        if max_pairwise_commutator(&ms)? > NONCOMMUTING_FLOOR {
            return Ok(ops);
        }
    }
    Err(Error::Precondition(format!(
        "no non-commuting sample after {MAX_REJECTIONS} draws at dim {dim}"
    )))
}

fn strict(p: &PositiveOperator, floor: f64) -> Result<StrictlyPositiveOperator> {
    StrictlyPositiveOperator::new(p.clone(), floor)
}

fn max_of(xs: impl IntoIterator<Item = f64>) -> f64 {
    xs.into_iter().fold(0.0, |m, x| if x.is_nan() || m.is_nan() { f64::NAN } else { m.max(x) })
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct CommutingTrial {
    pub index: usize,
    pub seed: u64,
    pub dim: usize,
    pub r1_max: f64,
    pub r3_left_max: f64,
    pub r3_right_max: f64,
    pub r2_residual_max: f64,
    /// `‖a*I - a^½‖` and `‖I*a - a^½‖`, worst over members.
    pub identity_max: f64,
    pub oslash_r1_max: f64,
    pub oslash_r3_max: f64,
    pub oslash_r2_max: f64,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct CommutingReport {
    pub trials: Vec<CommutingTrial>,
    pub failures: Vec<Failure>,
    pub passed: bool,
    pub tolerance: crate::operator::ToleranceProfile,
    pub seed: u64,
}

fn oslash_law(x: &DensityOperator, y: &DensityOperator, z: &DensityOperator, side: Side) -> Result<f64> {
    let (l, r) = match side {
        Side::Left => (oslash(x, &oslash(y, z)?)?, oslash(&oslash(x, y)?, &oslash(x, z)?)?),
        Side::Right => (oslash(&oslash(y, z)?, x)?, oslash(&oslash(y, x)?, &oslash(z, x)?)?),
    };
    Ok(relative_defect(l.matrix(), r.matrix()))
}

fn commuting_trial(cfg: &ExperimentConfig, index: usize) -> Result<(CommutingTrial, Vec<Failure>)> {
    let seed = trial_seed(cfg.seed, index as u64);
    let dim = cfg.dim_for(index);
    let mut s = Sampler::new(seed);
    let family = s.commuting_family(3, dim);
    let tol = cfg.tol.axiom_tol;

    let r1_max = max_of(family.iter().map(|a| r1_defect(a)).collect::<Result<Vec<_>>>()?);
    let (_, rep) = braidable(&family, tol, PlacementPolicy::BothSides)?;
    let side_max = |side| max_of(rep.placements.iter().filter(|p| p.side == side).map(|p| p.defect));
    let (r3_left_max, r3_right_max) = (side_max(Side::Left), side_max(Side::Right));

    let mut r2 = Vec::new();
    let mut identity = Vec::new();
    let id = PositiveOperator::identity(dim);
    for a in &family {
        let sa = strict(a, cfg.tol.strict_floor)?;
        for b in &family {
            r2.push(r2_residual(&sa, b)?);
        }
        let root = a.sqrt();
        identity.push(relative_defect(star(a, &id)?.matrix(), root.matrix()));
        identity.push(relative_defect(star(&id, a)?.matrix(), root.matrix()));
    }

    let dens: Vec<DensityOperator> = family.iter().map(DensityOperator::normalized).collect::<Result<_>>()?;
    let mut o_r1 = Vec::new();
    let mut o_r2 = Vec::new();
    let mut o_r3 = Vec::new();
    for rho in &dens {
        o_r1.push(relative_defect(oslash(rho, rho)?.matrix(), rho.matrix()));
        let sr = strict(rho, cfg.tol.strict_floor)?;
        for target in &dens {
            let c = DensityOperator::normalized(&r2_solve(&sr, target)?)?;
            o_r2.push(relative_defect(oslash(rho, &c)?.matrix(), target.matrix()));
        }
    }
    for side in [Side::Left, Side::Right] {
        for [i, j, k] in PERMUTATIONS {
            o_r3.push(oslash_law(&dens[i], &dens[j], &dens[k], side)?);
        }
    }

    let trial = CommutingTrial {
        index,
        seed,
        dim,
        r1_max,
        r3_left_max,
        r3_right_max,
        r2_residual_max: max_of(r2),
        identity_max: max_of(identity),
        oslash_r1_max: max_of(o_r1),
        oslash_r3_max: max_of(o_r3),
        oslash_r2_max: max_of(o_r2),
    };
    let mut failures = Vec::new();
    let checks = [
        ("R1", trial.r1_max),
        ("R3", trial.r3_left_max),
        ("R3'", trial.r3_right_max),
        ("R2 residual", trial.r2_residual_max),
        ("a*I = I*a = a^1/2", trial.identity_max),
        ("oslash R1", trial.oslash_r1_max),
        ("oslash R3/R3'", trial.oslash_r3_max),
        ("oslash R2 residual", trial.oslash_r2_max),
    ];
    for (name, v) in checks {
        if !(v < tol) {
            let ms: Vec<&CMatrix> = family.iter().map(|p| p.matrix()).collect();
            failures.push(Failure::new("commuting", index, seed, format!("{name} defect {v:e} >= {tol:e}"), &ms));
        }
    }
    Ok((trial, failures))
}

/// Commuting families: R1, R2, R3, R3', `a*I = a^½`, and the same laws for `⊘` on the
/// normalized members.
pub fn run_commuting_experiment(cfg: &ExperimentConfig) -> Result<CommutingReport> {
    cfg.validate()?;
    let results: Vec<(CommutingTrial, Vec<Failure>)> =
        (0..cfg.trials).into_par_iter().map(|i| commuting_trial(cfg, i)).collect::<Result<_>>()?;
    let mut trials = Vec::with_capacity(results.len());
    let mut failures = Vec::new();
    for (t, f) in results {
        trials.push(t);
        failures.extend(f);
    }
    Ok(CommutingReport {
        passed: failures.is_empty(),
        trials,
        failures,
        tolerance: cfg.tol,
        seed: cfg.seed,
    })
}

fn obstruction_trial(cfg: &ExperimentConfig, index: usize) -> Result<(TrialRecord, Option<Counterexample>)> {
    let seed = trial_seed(cfg.seed, index as u64);
    let dim = cfg.dim_for(index);
    let mut s = Sampler::new(seed);
    let ops = noncommuting_sample(&mut s, cfg.family, dim, 3)?;
    let tol = cfg.tol.axiom_tol;
    let (_, mut rep) = braidable(&ops, tol, cfg.policy)?;
    rep.seed = Some(seed);
    let rec = TrialRecord::from_report(index, seed, &rep, false);
    let mut readings = Vec::new();
    if rec.max_commutator > tol {
        if rec.braidable {
            readings.push(Reading::AllPlacements);
        }
        if rec.braidable_distinct {
            readings.push(Reading::DistinctPlacements);
        }
    }
    let cex = (!readings.is_empty()).then(|| Counterexample {
        trial: index,
        seed,
        readings,
        max_commutator: rec.max_commutator,
        matrices: ops.iter().map(|p| MatrixFile::from_matrix(p.matrix())).collect(),
        placements: rep.placements.clone(),
        tolerance: cfg.tol,
    });
    Ok((rec, cex))
}

/// Random non-commuting triples; any braidable one is archived as a counterexample.
///
/// One `(a, a, a)` control is appended after the random trials.
pub fn run_obstruction_search(cfg: &ExperimentConfig) -> Result<ConjectureEvidence> {
    cfg.validate_noncommuting()?;
    let results: Vec<(TrialRecord, Option<Counterexample>)> =
        (0..cfg.trials).into_par_iter().map(|i| obstruction_trial(cfg, i)).collect::<Result<_>>()?;
    let mut records = Vec::with_capacity(results.len() + 1);
    let mut cex = Vec::new();
    for (r, c) in results {
        records.push(r);
        cex.extend(c);
    }
    let control_index = cfg.trials;
    let control_seed = trial_seed(cfg.seed, control_index as u64);
    let a = sample_member(&mut Sampler::new(control_seed), cfg.family, cfg.dim_min);
    let (_, rep) = braidable(&[a.clone(), a.clone(), a], cfg.tol.axiom_tol, cfg.policy)?;
    records.push(TrialRecord::from_report(control_index, control_seed, &rep, true));
    Ok(ConjectureEvidence::assemble(records, cex, cfg.tol, cfg.seed))
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct SweepPoint {
    pub eps: f64,
    pub min_defect: f64,
    pub max_defect: f64,
    pub max_commutator: f64,
}

/// A commuting triple pushed off commutativity by `ε` times random positive directions.
pub fn perturbation_sweep(seed: u64, dim: usize, eps: &[f64], policy: PlacementPolicy) -> Result<Vec<SweepPoint>> {
    if dim < 2 {
        return Err(Error::Shape("perturbation sweep needs dimension >= 2".into()));
    }
    let mut s = Sampler::new(seed);
    let family = s.commuting_family(3, dim);
    let dirs: Vec<PositiveOperator> = (0..3).map(|_| s.psd(dim)).collect();
    eps.iter()
        .map(|&e| {
            if !(e >= 0.0) {
                return Err(Error::Domain(format!("perturbation size {e} must be nonnegative")));
            }
            let ops: Vec<PositiveOperator> = family
                .iter()
                .zip(&dirs)
                .map(|(f, d)| PositiveOperator::from_product(&(f.matrix() + d.matrix() * C64::new(e, 0.0))))
                .collect::<Result<_>>()?;
            let (_, rep) = braidable(&ops, f64::INFINITY, policy)?;
            Ok(SweepPoint {
                eps: e,
                min_defect: rep.min_defect,
                max_defect: rep.max_defect,
                max_commutator: rep.max_commutator(),
            })
        })
        .collect()
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct CaseTrial {
    pub index: usize,
    pub seed: u64,
    pub dim: usize,
    /// Commutator measure the case theorem conditions on.
    pub commutator: f64,
    pub commuting: bool,
    /// Braidability, or a small quarter-form defect.
    pub verdict: bool,
    pub defect: f64,
    pub agrees: bool,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct CaseReport {
    pub commutant: Vec<CaseTrial>,
    pub identity: Vec<CaseTrial>,
    pub quarter_form: Vec<CaseTrial>,
    pub quadruple: Vec<CaseTrial>,
    pub failures: Vec<Failure>,
    pub passed: bool,
}

/// `U blockdiag(B, diag(rest)) U^H`.
fn embed_block(u: &CMatrix, block: &CMatrix, rest: &[f64]) -> Result<PositiveOperator> {
    let m = block.nrows();
    let d = m + rest.len();
    let mut inner = CMatrix::zeros(d, d);
    inner.view_mut((0, 0), (m, m)).copy_from(block);
    for (k, &v) in rest.iter().enumerate() {
        inner[(m + k, m + k)] = C64::new(v, 0.0);
    }
    PositiveOperator::from_product(&(u * inner * u.adjoint()))
}

fn commutant_case(s: &mut Sampler, dim: usize, index: usize) -> Result<(Vec<PositiveOperator>, f64)> {
    let m = 2 + index / 2 % (dim - 1);
    let u = s.unitary(dim);
    let lambda = s.uniform(0.1, 1.1);
    let mut spec = vec![lambda; m];
    spec.extend(s.spectrum(dim - m, 0.1, 1.1));
    let a = PositiveOperator::with_basis(&u, &spec)?;
    let commuting = index % 2 == 0;
    for _ in 0..MAX_REJECTIONS {
        let (bb, cb) = if commuting {
            let v = s.unitary(m);
            let sb = s.spectrum(m, 0.1, 1.1);
            let sc = s.spectrum(m, 0.1, 1.1);
            (
                PositiveOperator::with_basis(&v, &sb)?.matrix().clone(),
                PositiveOperator::with_basis(&v, &sc)?.matrix().clone(),
            )
        } else {
            (s.psd(m).matrix().clone(), s.psd(m).matrix().clone())
        };
        let rb = s.spectrum(dim - m, 0.1, 1.1);
        let rc = s.spectrum(dim - m, 0.1, 1.1);
        let b = embed_block(&u, &bb, &rb)?;
        let c = embed_block(&u, &cb, &rc)?;
        let comm = relative_commutator(b.matrix(), c.matrix())?;
        if commuting || comm > NONCOMMUTING_FLOOR {
            return Ok((vec![a, b, c], comm));
        }
    }
    Err(Error::Precondition("could not draw a non-commuting commutant pair".into()))
}

fn pair_case(s: &mut Sampler, dim: usize, index: usize) -> Result<(PositiveOperator, PositiveOperator)> {
    if index % 2 == 0 {
        let f = s.commuting_family(2, dim);
        Ok((f[0].clone(), f[1].clone()))
    } else {
        let ops = noncommuting_sample(s, OperatorKind::StrictlyPositive, dim, 2)?;
        Ok((ops[0].clone(), ops[1].clone()))
    }
}

fn case_trials(cfg: &ExperimentConfig, index: usize) -> Result<[(CaseTrial, Vec<&'static str>, Vec<CMatrix>); 4]> {
    let seed = trial_seed(cfg.seed, index as u64);
    let dim = cfg.dim_for(index);
    let tol = cfg.tol.axiom_tol;
    let mut s = Sampler::new(seed);
    let make = |commutator: f64, verdict: bool, defect: f64| {
        let commuting = commutator < COMMUTING_THRESHOLD;
        CaseTrial {
            index,
            seed,
            dim,
            commutator,
            commuting,
            verdict,
            defect,
            agrees: verdict == commuting,
        }
    };

    let (ops, comm) = commutant_case(&mut s, dim, index)?;
    let (ok, rep) = braidable(&ops, tol, cfg.policy)?;
    let commutant = (make(comm, ok, rep.max_defect), vec!["commutant"], ops.iter().map(|p| p.matrix().clone()).collect());

    let (b, c) = pair_case(&mut s, dim, index)?;
    let ops = vec![PositiveOperator::identity(dim), b.clone(), c.clone()];
    let (ok, rep) = braidable(&ops, tol, cfg.policy)?;
    let comm = relative_commutator(b.matrix(), c.matrix())?;
    let identity = (make(comm, ok, rep.max_defect), vec!["identity"], ops.iter().map(|p| p.matrix().clone()).collect());

    let (b, c) = pair_case(&mut s, dim, index)?;
    let sb = strict(&b, cfg.tol.strict_floor)?;
    let q = quarter_form_defect(&sb, &c)?;
    let comm = relative_commutator(b.matrix(), c.matrix())?;
    let quarter = (make(comm, q < tol, q), vec!["quarter-form"], vec![b.matrix().clone(), c.matrix().clone()]);

    let f = s.commuting_family(3, dim);
    let a = if index % 2 == 0 {
        f[2].clone()
    } else {
        let mut cand = s.strictly_positive(dim, STRICT_SHIFT).into_inner();
        for _ in 0..MAX_REJECTIONS {
            if relative_commutator(cand.matrix(), f[0].matrix())? > NONCOMMUTING_FLOOR {
                break;
            }
            cand = s.strictly_positive(dim, STRICT_SHIFT).into_inner();
        }
        cand
    };
    let ops = vec![a, f[0].clone(), f[0].sqrt(), f[1].clone()];
    let ms: Vec<&CMatrix> = ops.iter().map(|p| p.matrix()).collect();
    let comm = max_pairwise_commutator(&ms)?;
    let (ok, rep) = braidable(&ops, tol, cfg.policy)?;
    let quadruple = (make(comm, ok, rep.max_defect), vec!["quadruple"], ops.iter().map(|p| p.matrix().clone()).collect());

    Ok([commutant, identity, quarter, quadruple])
}

/// Commutant, identity, quarter-form and quadruple cases: the braidability verdict must
/// match the commutation verdict on every trial.
pub fn run_case_theorems(cfg: &ExperimentConfig) -> Result<CaseReport> {
    cfg.validate_noncommuting()?;
    let rows = (0..cfg.trials).into_par_iter().map(|i| case_trials(cfg, i)).collect::<Result<Vec<_>>>()?;
    let mut report = CaseReport {
        commutant: Vec::new(),
        identity: Vec::new(),
        quarter_form: Vec::new(),
        quadruple: Vec::new(),
        failures: Vec::new(),
        passed: true,
    };
    for row in rows {
        for (k, (trial, name, ms)) in row.into_iter().enumerate() {
            if !trial.agrees {
                let refs: Vec<&CMatrix> = ms.iter().collect();
                report.failures.push(Failure::new(
                    name[0],
                    trial.index,
                    trial.seed,
                    format!(
                        "verdict {} but commutator {:e} (defect {:e})",
                        trial.verdict, trial.commutator, trial.defect
                    ),
                    &refs,
                ));
            }
            match k {
                0 => report.commutant.push(trial),
                1 => report.identity.push(trial),
                2 => report.quarter_form.push(trial),
                _ => report.quadruple.push(trial),
            }
        }
    }
    report.passed = report.failures.is_empty();
    Ok(report)
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct RankOneTrial {
    pub index: usize,
    pub seed: u64,
    pub dim: usize,
    /// Smallest `tr(ef)` over pairs of the triple.
    pub min_overlap: f64,
    pub distinct_braidable: bool,
    pub distinct_max_defect: f64,
    pub equal_braidable: bool,
    /// `‖efe - tr(ef) e‖`.
    pub identity_residual: f64,
    /// `‖efe - tr(ef) f‖`.
    pub swapped_identity_residual: f64,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct RankOneReport {
    pub trials: Vec<RankOneTrial>,
    pub failures: Vec<Failure>,
    pub distinct_not_braidable: usize,
    pub equal_braidable: usize,
    pub identity_max: f64,
    pub swapped_identity_max: f64,
    pub passed: bool,
}

/// Overlap below which rank-one samples are redrawn.
pub const MIN_OVERLAP: f64 = 0.05;

fn rank_one_trial(cfg: &ExperimentConfig, index: usize) -> Result<(RankOneTrial, Vec<Failure>)> {
    let seed = trial_seed(cfg.seed, index as u64);
    let dim = cfg.dim_for(index);
    let tol = cfg.tol.axiom_tol;
    let mut s = Sampler::new(seed);
    let mut picked = None;
    for _ in 0..MAX_REJECTIONS {
        let ps: Vec<PositiveOperator> = (0..3).map(|_| s.rank1_projector(dim)).collect();
        let mut lo = f64::INFINITY;
        for i in 0..3 {
            for j in i + 1..3 {
                lo = lo.min(trace(&(ps[i].matrix() * ps[j].matrix())).re);
            }
        }
        if lo > MIN_OVERLAP {
            picked = Some((ps, lo));
            break;
        }
    }
    let (ps, min_overlap) = picked.ok_or_else(|| Error::Precondition("no overlapping rank-one triple".into()))?;
    let (ok, rep) = braidable(&ps, tol, cfg.policy)?;
    let (eq_ok, _) = braidable(&[ps[0].clone(), ps[0].clone(), ps[0].clone()], tol, cfg.policy)?;
    let (e, f) = (ps[0].matrix(), ps[1].matrix());
    let efe = e * f * e;
    let tef = trace(&(e * f));
    let identity_residual = relative_defect(&efe, &(e * tef));
    let swapped_identity_residual = relative_defect(&efe, &(f * tef));
    let trial = RankOneTrial {
        index,
        seed,
        dim,
        min_overlap,
        distinct_braidable: ok,
        distinct_max_defect: rep.max_defect,
        equal_braidable: eq_ok,
        identity_residual,
        swapped_identity_residual,
    };
    let mut failures = Vec::new();
    let ms: Vec<&CMatrix> = ps.iter().map(|p| p.matrix()).collect();
    if ok {
        failures.push(Failure::new("rank1", index, seed, "distinct projectors are braidable".into(), &ms));
    }
    if !eq_ok {
        failures.push(Failure::new("rank1", index, seed, "equal projectors are not braidable".into(), &ms[..1]));
    }
    if !(identity_residual < 1e-10) {
        failures.push(Failure::new(
            "rank1",
            index,
            seed,
            format!("efe = tr(ef) e fails by {identity_residual:e}"),
            &ms[..2],
        ));
    }
    Ok((trial, failures))
}

/// Rank-one projector triples: distinct ones must fail to braid, equal ones must braid.
pub fn run_rank_one_experiment(cfg: &ExperimentConfig) -> Result<RankOneReport> {
    cfg.validate_noncommuting()?;
    let rows = (0..cfg.trials).into_par_iter().map(|i| rank_one_trial(cfg, i)).collect::<Result<Vec<_>>>()?;
    let mut trials = Vec::new();
    let mut failures = Vec::new();
    for (t, f) in rows {
        trials.push(t);
        failures.extend(f);
    }
    Ok(RankOneReport {
        distinct_not_braidable: trials.iter().filter(|t| !t.distinct_braidable).count(),
        equal_braidable: trials.iter().filter(|t| t.equal_braidable).count(),
        identity_max: max_of(trials.iter().map(|t| t.identity_residual)),
        swapped_identity_max: max_of(trials.iter().map(|t| t.swapped_identity_residual)),
        passed: failures.is_empty(),
        trials,
        failures,
    })
}

/// Coefficients in ascending degree.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct Polynomial(pub Vec<f64>);

impl Polynomial {
    pub fn eval(&self, t: f64) -> f64 {
        self.0.iter().rev().fold(0.0, |acc, &c| acc * t + c)
    }

    /// `f(A)` through the cached eigendecomposition of `A`.
    pub fn apply(&self, a: &PositiveOperator, psd_tol: f64) -> Result<PositiveOperator> {
        a.map_spectrum(|t| self.eval(t), psd_tol)
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct FunctionalTrial {
    pub index: usize,
    pub seed: u64,
    pub dim: usize,
    pub max_defect: f64,
    pub braidable: bool,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct FunctionalCalculusReport {
    pub f: Polynomial,
    pub g: Polynomial,
    pub trials: Vec<FunctionalTrial>,
    pub failures: Vec<Failure>,
    pub passed: bool,
}

/// `(I, f(b), g(c))` for commuting `(b, c)` must be braidable.
pub fn run_functional_calculus(cfg: &ExperimentConfig, f: &Polynomial, g: &Polynomial) -> Result<FunctionalCalculusReport> {
    cfg.validate()?;
    let rows = (0..cfg.trials)
        .into_par_iter()
        .map(|index| -> Result<(FunctionalTrial, Option<Failure>)> {
            let seed = trial_seed(cfg.seed, index as u64);
            let dim = cfg.dim_for(index);
            let fam = Sampler::new(seed).commuting_family(2, dim);
            let fb = f.apply(&fam[0], cfg.tol.psd_tol)?;
            let gc = g.apply(&fam[1], cfg.tol.psd_tol)?;
            let ops = vec![PositiveOperator::identity(dim), fb, gc];
            let (ok, rep) = braidable(&ops, cfg.tol.axiom_tol, cfg.policy)?;
            let fail = (!ok).then(|| {
                let ms: Vec<&CMatrix> = ops.iter().map(|p| p.matrix()).collect();
                Failure::new("functional-calculus", index, seed, format!("defect {:e}", rep.max_defect), &ms)
            });
            Ok((
                FunctionalTrial {
                    index,
                    seed,
                    dim,
                    max_defect: rep.max_defect,
                    braidable: ok,
                },
                fail,
            ))
        })
        .collect::<Result<Vec<_>>>()?;
    let mut trials = Vec::new();
    let mut failures = Vec::new();
    for (t, f) in rows {
        trials.push(t);
        failures.extend(f);
    }
    Ok(FunctionalCalculusReport {
        f: f.clone(),
        g: g.clone(),
        passed: failures.is_empty(),
        trials,
        failures,
    })
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct MixedLawTrial {
    pub index: usize,
    pub seed: u64,
    pub dim: usize,
    /// `‖a(b*c) - (a*b)(a*c)‖`.
    pub product_over_star: f64,
    /// `‖a*(bc) - (a*I)(b*c)‖`.
    pub star_over_product: f64,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct MixedLawReport {
    pub trials: Vec<MixedLawTrial>,
    pub failures: Vec<Failure>,
    pub passed: bool,
}

/// Mixed distributivity between the matrix product and `*` on commuting triples.
pub fn run_mixed_law_checks(cfg: &ExperimentConfig) -> Result<MixedLawReport> {
    cfg.validate()?;
    let tol = cfg.tol.axiom_tol;
    let rows = (0..cfg.trials)
        .into_par_iter()
        .map(|index| -> Result<(MixedLawTrial, Option<Failure>)> {
            let seed = trial_seed(cfg.seed, index as u64);
            let dim = cfg.dim_for(index);
            let f = Sampler::new(seed).commuting_family(3, dim);
            let (a, b, c) = (&f[0], &f[1], &f[2]);
            let bc = star(b, c)?;
            let lhs1 = a.matrix() * bc.matrix();
            let rhs1 = star(a, b)?.matrix() * star(a, c)?.matrix();
            let prod = PositiveOperator::from_product(&(b.matrix() * c.matrix()))?;
            let lhs2 = star(a, &prod)?;
            let rhs2 = star(a, &PositiveOperator::identity(dim))?.matrix() * bc.matrix();
            let t = MixedLawTrial {
                index,
                seed,
                dim,
                product_over_star: relative_defect(&lhs1, &rhs1),
                star_over_product: relative_defect(lhs2.matrix(), &rhs2),
            };
            let fail = (!(t.product_over_star < tol && t.star_over_product < tol)).then(|| {
                Failure::new(
                    "mixed-law",
                    index,
                    seed,
                    format!("defects {:e}, {:e}", t.product_over_star, t.star_over_product),
                    &[a.matrix(), b.matrix(), c.matrix()],
                )
            });
            Ok((t, fail))
        })
        .collect::<Result<Vec<_>>>()?;
    let mut trials = Vec::new();
    let mut failures = Vec::new();
    for (t, f) in rows {
        trials.push(t);
        failures.extend(f);
    }
    Ok(MixedLawReport {
        passed: failures.is_empty(),
        trials,
        failures,
    })
}
