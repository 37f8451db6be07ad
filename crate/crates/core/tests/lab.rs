mod common;

use qfid::fidelity::{braidable, PlacementPolicy};
use qfid::lab::*;
use qfid::operator::random::Sampler;
use qfid::PositiveOperator;

fn cfg(dim_min: usize, dim_max: usize, trials: usize, seed: u64) -> ExperimentConfig {
    ExperimentConfig::new(dim_min, dim_max, trials, seed)
}

#[test]
fn commuting_triples_satisfy_every_law() {
    let r = run_commuting_experiment(&cfg(1, 6, 60, 3).with_policy(PlacementPolicy::BothSides)).unwrap();
    assert!(r.passed, "{:?}", r.failures.first());
    assert_eq!(r.trials.len(), 60);
    assert!(r.trials.iter().all(|t| t.r3_left_max < 1e-8 && t.r3_right_max < 1e-8));
}

#[test]
fn identity_with_noncommuting_pair_is_not_braidable() {
    let mut s = Sampler::new(97);
    let (b, c) = (s.psd(3), s.psd(3));
    let (ok, rep) = braidable(&[PositiveOperator::identity(3), b, c], 1e-8, PlacementPolicy::LeftOnly).unwrap();
    assert!(!ok);
    assert!(rep.max_commutator() > 1e-3);
}

#[test]
fn case_theorems_agree() {
    let r = run_case_theorems(&cfg(2, 5, 40, 97)).unwrap();
    assert!(r.passed, "{:?}", r.failures.first());
    for t in &r.identity {
        assert_eq!(t.verdict, t.commuting);
    }
    assert!(r.identity.iter().any(|t| !t.commuting));
}

#[test]
fn rank_one_projectors() {
    let mut s = Sampler::new(101);
    let (e, f) = (s.rank1_projector(3), s.rank1_projector(3));
    let (em, fm) = (e.matrix(), f.matrix());
    let efe = em * fm * em;
    let overlap = common::tr(&(em * fm));
    assert!(common::frob(&(&efe - em * overlap)) < 1e-10);
    // the other reading differs unless e = f
    assert!(common::frob(&(&efe - fm * overlap)) > 1e-3);

    let mut s = Sampler::new(103);
    let ps: Vec<PositiveOperator> = (0..3).map(|_| s.rank1_projector(3)).collect();
    assert!(!braidable(&ps, 1e-8, PlacementPolicy::LeftOnly).unwrap().0);
    let same = vec![ps[0].clone(); 3];
    assert!(braidable(&same, 1e-8, PlacementPolicy::LeftOnly).unwrap().0);

    let r = run_rank_one_experiment(&cfg(2, 4, 40, 101)).unwrap();
    assert!(r.passed);
    assert_eq!(r.distinct_not_braidable, 40);
    assert_eq!(r.equal_braidable, 40);
    assert!(r.identity_max < 1e-10);
    assert!(r.swapped_identity_max > 1e-3);
}

#[test]
fn functional_calculus() {
    let f = Polynomial(vec![0.0, 0.0, 1.0]);
    let g = Polynomial(vec![1.0, 1.0]);
    let fam = Sampler::new(107).commuting_family(2, 3);
    let ops = [PositiveOperator::identity(3), f.apply(&fam[0], 1e-10).unwrap(), g.apply(&fam[1], 1e-10).unwrap()];
    assert!(braidable(&ops, 1e-8, PlacementPolicy::LeftOnly).unwrap().0);
    // f(b) against the oracle
    let want = common::apply(fam[0].matrix(), |t| t * t);
    assert!(common::rel(ops[1].matrix(), &want) < 1e-10);
    let r = run_functional_calculus(&cfg(2, 4, 30, 107), &f, &g).unwrap();
    assert!(r.passed);
}

#[test]
fn mixed_laws_on_commuting_triples() {
    let r = run_mixed_law_checks(&cfg(2, 5, 30, 109)).unwrap();
    assert!(r.passed);
    assert!(r.trials.iter().all(|t| t.product_over_star < 1e-9 && t.star_over_product < 1e-9));
    // direct check of the first identity with oracle roots
    let fam = Sampler::new(109).commuting_family(3, 3);
    let (a, b, c) = (fam[0].matrix(), fam[1].matrix(), fam[2].matrix());
    let l = a * common::star(b, c);
    let r = common::star(a, b) * common::star(a, c);
    assert!(common::rel(&l, &r) < 1e-9);
}

#[test]
fn obstruction_search_is_reproducible_and_consistent() {
    let c = cfg(2, 4, 60, 2);
    let a = run_obstruction_search(&c).unwrap();
    let b = run_obstruction_search(&c).unwrap();
    assert_eq!(a, b);
    assert_eq!(a.summary.trials, 60);
    assert_eq!(a.summary.controls, 1);
    let control = a.records.last().unwrap();
    assert!(control.control && control.braidable);
    let tol = c.tol.axiom_tol;
    let hits = a.records.iter().filter(|r| !r.control && r.max_defect < tol && r.max_commutator > tol).count();
    assert_eq!(a.counterexamples.is_empty(), hits == 0);
    assert!(a.records.iter().all(|r| r.min_defect <= r.max_defect));
}

#[test]
fn single_member_family_is_braidable() {
    let a = Sampler::new(4).psd(3);
    let (ok, rep) = braidable(&[a], 1e-8, PlacementPolicy::BothSides).unwrap();
    assert!(ok && rep.commutators.is_empty());
}

#[test]
fn perturbation_grows_with_noncommutativity() {
    let pts = perturbation_sweep(5, 3, &[0.0, 1e-4, 1e-3, 1e-2, 1e-1], PlacementPolicy::LeftOnly).unwrap();
    assert!(pts[0].max_defect < 1e-10);
    assert!(pts.windows(2).all(|w| w[1].max_defect >= w[0].max_defect));
}

#[test]
fn minimizer() {
    let s = OptimizerSchedule::default();
    let zero = minimize_defect(2, 0.0, 113, &s).unwrap();
    assert!(zero.best_objective < 1e-8, "{}", zero.best_objective);
    let r = minimize_defect(2, 0.5, 113, &s).unwrap();
    assert!(r.best_objective > 1e-4);
    assert!(r.best_commutator >= 0.5);
    assert!(r.stays_above(1e-4));
    let sweep = kappa_sweep(2, &[0.4, 0.1, 0.2], 113, &s.clone().with_restarts(10), 0.05).unwrap();
    assert_eq!(sweep.kappas, vec![0.1, 0.2, 0.4]);
    assert!(sweep.monotone_within_noise, "{:?}", sweep.best_objectives);
}

#[test]
fn config_validation() {
    assert!(run_obstruction_search(&cfg(1, 1, 5, 0)).is_err());
    assert!(run_commuting_experiment(&cfg(2, 2, 0, 0)).is_err());
    assert!(run_commuting_experiment(&cfg(3, 2, 5, 0)).is_err());
}
