//! Runs the sixteen acceptance criteria and prints one PASS/FAIL line each.
//! Exits non-zero when any criterion fails.

use std::time::Instant;

use qfid::bures::{bures_distance, world_function};
use qfid::fidelity::{
    inverse_pair_defect, monotonicity_defect, r1_defect, relative_star_commutator, spectrum_match, star, Orientation,
    PlacementPolicy,
};
use qfid::homology::*;
use qfid::lab::*;
use qfid::model::*;
use qfid::operator::random::{trial_seed, Sampler, STRICT_SHIFT};
use qfid::operator::{relative_commutator, relative_defect};
use qfid::wy::{quasi_distributivity_report, wy_information, QUASI_DISTRIBUTIVITY_SIGN};
use qfid::{DensityOperator, PositiveOperator, Result, ToleranceProfile, C64};

struct Verdict {
    passed: bool,
    detail: String,
}

fn verdict(passed: bool, detail: String) -> Result<Verdict> {
    Ok(Verdict { passed, detail })
}

fn dim_cycle(i: usize) -> usize {
    2 + i % 5
}

fn max(xs: impl IntoIterator<Item = f64>) -> f64 {
    xs.into_iter().fold(0.0, f64::max)
}

fn c1() -> Result<Verdict> {
    let mut r1 = 0.0f64;
    let mut scaling = 0.0f64;
    for i in 0..500 {
        let mut s = Sampler::new(trial_seed(1, i as u64));
        let (a, b) = (s.psd(dim_cycle(i)), s.psd(dim_cycle(i)));
        r1 = r1.max(r1_defect(&a)?);
        let base = star(&a, &b)?;
        for lambda in [0.25, 1.0, 4.0, 10.0] {
            let lhs = star(&a, &b.scaled(lambda)?)?;
            scaling = scaling.max(relative_defect(lhs.matrix(), &(base.matrix() * C64::new(lambda.sqrt(), 0.0))));
        }
    }
    verdict(r1 < 1e-10 && scaling < 1e-9, format!("max R1 defect {r1:.2e}, max scaling defect {scaling:.2e}"))
}

fn c2() -> Result<Verdict> {
    let cfg = ExperimentConfig::new(2, 6, 200, 2).with_policy(PlacementPolicy::BothSides);
    let r = run_commuting_experiment(&cfg)?;
    let r3 = max(r.trials.iter().map(|t| t.r3_left_max.max(t.r3_right_max)));
    let r2 = max(r.trials.iter().map(|t| t.r2_residual_max));
    verdict(r3 < 1e-8 && r2 < 1e-8, format!("max placement defect {r3:.2e}, max R2 residual {r2:.2e}"))
}

fn c3() -> Result<Verdict> {
    let mut discordant = 0;
    let mut commuting = 0;
    for i in 0..500 {
        let mut s = Sampler::new(trial_seed(3, i as u64));
        let dim = dim_cycle(i);
        let (a, b) = if i % 2 == 0 {
            commuting += 1;
            let f = s.commuting_family(2, dim);
            (f[0].clone(), f[1].clone())
        } else {
            (s.psd(dim), s.psd(dim))
        };
        let plain = relative_commutator(a.matrix(), b.matrix())? < 1e-10;
        let starred = relative_star_commutator(&a, &b)? < 1e-8;
        if plain != starred {
            discordant += 1;
        }
    }
    verdict(discordant == 0, format!("{discordant} discordant of 500 ({commuting} commuting)"))
}

fn c4() -> Result<Verdict> {
    let mut worst = 0.0f64;
    for i in 0..200 {
        let mut s = Sampler::new(trial_seed(4, i as u64));
        let (a, b) = (s.psd(dim_cycle(i)), s.psd(dim_cycle(i)));
        worst = worst.max(spectrum_match(&a, &b)?);
    }
    verdict(worst < 1e-8, format!("max sorted-eigenvalue deviation {worst:.2e}"))
}

fn c5() -> Result<Verdict> {
    let r = run_case_theorems(&ExperimentConfig::new(2, 6, 200, 5))?;
    let counts = [r.commutant.len(), r.identity.len(), r.quarter_form.len(), r.quadruple.len()];
    verdict(
        r.passed && counts.iter().all(|&n| n >= 200),
        format!("trials per case {counts:?}, {} failures", r.failures.len()),
    )
}

fn c6() -> Result<Verdict> {
    let tol = ToleranceProfile::default();
    let (mut transposed, mut defining) = (0.0f64, 0.0f64);
    for i in 0..200 {
        let mut s = Sampler::new(trial_seed(6, i as u64));
        let dim = dim_cycle(i);
        let a = s.psd(dim);
        let b = PositiveOperator::new(a.matrix() + s.psd(dim).matrix(), &tol)?;
        let x = s.psd(dim);
        transposed = transposed.max(monotonicity_defect(&a, &b, &x, Orientation::Transposed, &tol)?);
        defining = defining.max(monotonicity_defect(&a, &b, &x, Orientation::Defining, &tol)?);
    }
    verdict(
        transposed <= 1e-8,
        format!("max negative eigenvalue {transposed:.2e} (defining-order reading {defining:.2e}, reported only)"),
    )
}

fn c7() -> Result<Verdict> {
    let (mut transposed, mut defining) = (0.0f64, 0.0f64);
    for i in 0..200 {
        let mut s = Sampler::new(trial_seed(7, i as u64));
        let dim = dim_cycle(i);
        let (a, b) = (s.strictly_positive(dim, STRICT_SHIFT), s.strictly_positive(dim, STRICT_SHIFT));
        let d = inverse_pair_defect(&a, &b)?;
        transposed = transposed.max(d.transposed.0.max(d.transposed.1));
        defining = defining.max(d.defining.0.max(d.defining.1));
    }
    verdict(
        transposed < 1e-8,
        format!("max residual {transposed:.2e} (defining-order reading {defining:.2e}, reported only)"),
    )
}

fn c8() -> Result<Verdict> {
    let r = run_rank_one_experiment(&ExperimentConfig::new(2, 6, 100, 8))?;
    let printed = r.swapped_identity_max < 1e-10;
    let ok = printed && r.distinct_not_braidable == 100 && r.equal_braidable == 100;
    verdict(
        ok,
        format!(
            "efe - tr(ef)f max {:.2e}; efe - tr(ef)e max {:.2e}; distinct not braidable {}/100; equal braidable {}/100",
            r.swapped_identity_max, r.identity_max, r.distinct_not_braidable, r.equal_braidable
        ),
    )
}

fn c9() -> Result<Verdict> {
    let search = run_obstruction_search(&ExperimentConfig::new(2, 4, 1000, 9))?;
    let opt = minimize_defect(2, 0.5, 113, &OptimizerSchedule::default())?;
    let again = minimize_defect(2, 0.5, 113, &OptimizerSchedule::default())?;
    let ok = search.counterexamples.is_empty() && opt.best_objective > 1e-4 && opt == again;
    verdict(
        ok,
        format!(
            "{} counterexamples in {} trials (smallest max defect {:.2e}); kappa 0.5 best defect {:.2e}, reproducible {}",
            search.counterexamples.len(),
            search.summary.trials,
            search.summary.smallest_max_defect,
            opt.best_objective,
            opt == again
        ),
    )
}

fn c10() -> Result<Verdict> {
    let mut agreement = 0.0f64;
    let mut sign_ok = true;
    for i in 0..300 {
        let mut s = Sampler::new(trial_seed(10, i as u64));
        let dim = dim_cycle(i);
        let (a, b, c) = (s.psd(dim), s.psd(dim), s.psd(dim));
        let r = quasi_distributivity_report(&a, &b, &c)?;
        agreement = agreement.max((r.t1 - QUASI_DISTRIBUTIVITY_SIGN * r.t2).abs() / r.t2.abs().max(1.0));
        sign_ok &= r.sign == QUASI_DISTRIBUTIVITY_SIGN;
    }
    let (mut s_max, mut iff_ok) = (f64::NEG_INFINITY, true);
    for i in 0..300 {
        let mut s = Sampler::new(trial_seed(100, i as u64));
        let dim = dim_cycle(i);
        let rho = s.density(dim);
        let k = if i % 2 == 0 {
            let basis = qfid::operator::Spectral::of(rho.matrix()).vectors;
            PositiveOperator::with_basis(&basis, &s.spectrum(dim, 0.1, 1.0))?.as_hermitian().clone()
        } else {
            s.hermitian(dim)
        };
        let sw = wy_information(&k, &rho)?;
        s_max = s_max.max(sw);
        let commuting = relative_commutator(rho.matrix(), k.matrix())? < 1e-10;
        iff_ok &= (sw.abs() <= 1e-10) == commuting;
    }
    verdict(
        agreement < 1e-9 && sign_ok && s_max <= 1e-10 && iff_ok,
        format!(
            "max |T1 - ({QUASI_DISTRIBUTIVITY_SIGN})T2| {agreement:.2e}, sign constant {sign_ok}; max S_WY {s_max:.2e}, zero iff commuting {iff_ok}"
        ),
    )
}

fn c11() -> Result<Verdict> {
    let mut notes = Vec::new();
    let mut ok = true;
    let mut entropic = 0.0f64;
    for a in [0.3, 0.5, 0.7] {
        let e = ExponentPair::new(a, 1.0 - a);
        let real = axiom_report(&ScalarSystem::new(Carrier::PositiveReal, e), &Carrier::PositiveReal.samples(60, 11), 1e-10)?;
        let cplx = axiom_report(&ScalarSystem::new(Carrier::ComplexNonzero, e), &Carrier::ComplexNonzero.samples(60, 11), 1e-10)?;
        entropic = entropic.max(real.max_entropic);
        ok &= real.flags.all() && cplx.flags.all();
        if !cplx.flags.all() {
            notes.push(format!("C* at a={a}: {:?}", cplx.flags));
        }
        if !real.flags.all() {
            notes.push(format!("R+ at a={a}: {:?}", real.flags));
        }
    }
    let bad = axiom_report(&ScalarSystem::new(Carrier::ComplexNonzero, ExponentPair::new(0.7, 0.7)), &Carrier::ComplexNonzero.samples(60, 11), 1e-10)?;
    ok &= !bad.flags.r1 && entropic < 1e-12;
    verdict(
        ok,
        format!(
            "a=b=0.7 R1 {}; max entropic defect {entropic:.2e}; {}",
            if bad.flags.r1 { "holds" } else { "fails" },
            if notes.is_empty() { "all flags true".to_string() } else { notes.join("; ") }
        ),
    )
}

fn c12() -> Result<Verdict> {
    let mut rule = 0.0f64;
    for i in 0..200 {
        let seed = trial_seed(12, i as u64);
        let mut s = Sampler::new(seed);
        let dim = dim_cycle(i);
        let g = s.complex_gaussian_matrix(dim, dim) + qfid::CMatrix::identity(dim, dim) * C64::new(2.0, 0.0);
        let d = ItoDerivative::from_homomorphism(conjugation_hom(&g)?, dim, seed, 1e-10)?;
        let (x, y) = (s.complex_gaussian_matrix(dim, dim), s.complex_gaussian_matrix(dim, dim));
        rule = rule.max(ito_rule_defect(&|m| d.apply(m), &x, &y)?);
    }
    let mut induced = 0.0f64;
    for a in [0.3, 0.5, 0.7] {
        let law = ScalarSystem::new(Carrier::PositiveReal, ExponentPair::new(a, 1.0 - a));
        let xs = Carrier::PositiveReal.samples(30, 12);
        for i in 0..xs.len() {
            induced = induced.max(ld_ito_defect(&law, xs[i], xs[(i + 1) % 30], xs[(i + 2) % 30], &xs, 1e-10)?);
        }
    }
    verdict(
        rule < 1e-10 && induced < 1e-10,
        format!("Ito rule max defect {rule:.2e}; law-induced identity max defect {induced:.2e}"),
    )
}

fn c13() -> Result<Verdict> {
    let mut systems: Vec<FiniteBinarySystem> = (1..=4).map(trivial_system).collect::<Result<_>>()?;
    systems.push(dihedral_system(3)?);
    systems.push(dihedral_system(5)?);
    let mut failures = 0;
    for s in &systems {
        for d in 1..=4 {
            failures += boundary_squared_failures(s, d)?.len();
        }
    }
    // exhaustive cocycle checks against direct evaluation, on small integer cochains
    let mut mismatches = 0;
    let mut cocycles = 0;
    let mut r = Sampler::new(13);
    for n in [3usize, 5] {
        let s = dihedral_system(n)?;
        for trial in 0..50 {
            let phi = if trial % 2 == 0 {
                let psi = Cochain::from_fn(n, 1, |_| r.index(4) as f64);
                coboundary(&psi, &s)?
            } else {
                Cochain::from_fn(n, 2, |_| r.index(3) as f64)
            };
            let mut holds = true;
            for_each_tuple(n, 3, |t| {
                let (a, b, c) = (t[0], t[1], t[2]);
                let l = phi.get(&[a, c]) + phi.get(&[s.op(a, c), s.op(b, c)]);
                let rr = phi.get(&[a, b]) + phi.get(&[s.op(a, b), c]);
                holds &= l == rr;
            });
            cocycles += holds as usize;
            if is_2cocycle(&phi, &s, 0.0)?.holds != holds {
                mismatches += 1;
            }
        }
    }
    verdict(
        failures == 0 && mismatches == 0,
        format!("{failures} nonzero boundary-squared tuples; cocycle checker mismatches {mismatches}/100 ({cocycles} cocycles)"),
    )
}

fn c14() -> Result<Verdict> {
    let mut discordant = 0;
    for i in 0..100 {
        let mut s = Sampler::new(trial_seed(14, i as u64));
        let family = s.commuting_densities(3, dim_cycle(i));
        discordant += trace_cocycle_vs_gamma(&family, 1e-9, 1)?.discordant;
    }
    verdict(discordant == 0, format!("{discordant} discordant triples over 100 families"))
}

fn c15() -> Result<Verdict> {
    let (mut diag, mut sym, mut sq, mut orth) = (0.0f64, 0.0f64, 0.0f64, 0.0f64);
    for i in 0..200 {
        let mut s = Sampler::new(trial_seed(15, i as u64));
        let dim = dim_cycle(i);
        let (p, q) = (s.density(dim), s.density(dim));
        diag = diag.max(world_function(&p, &p)?.abs());
        sym = sym.max((world_function(&p, &q)? - world_function(&q, &p)?).abs());
        let d = bures_distance(&p, &q)?;
        sq = sq.max((d * d - 2.0 * world_function(&p, &q)?).abs());
        let u = s.unitary(dim);
        let col = |j: usize| -> Vec<C64> { u.column(j).iter().copied().collect() };
        let (e0, e1) = (DensityOperator::pure(&col(0))?, DensityOperator::pure(&col(1))?);
        orth = orth.max((bures_distance(&e0, &e1)? - 2f64.sqrt()).abs());
    }
    verdict(
        diag < 1e-10 && sym < 1e-10 && sq < 1e-10 && orth <= 1e-8,
        format!("sigma(P,P) {diag:.2e}, asymmetry {sym:.2e}, |d^2 - 2 sigma| {sq:.2e}, orthogonal |d - sqrt2| {orth:.2e}"),
    )
}

fn c16() -> Result<Verdict> {
    let dir = tempfile::tempdir().map_err(qfid::Error::from)?;
    let mut same = true;
    for cmd in ["braid", "wy", "cases"] {
        let paths = [dir.path().join(format!("{cmd}-a.json")), dir.path().join(format!("{cmd}-b.json"))];
        for p in &paths {
            let code = qfid::cli::run(["qfid", cmd, "--dim", "3", "--trials", "20", "--seed", "16", "--out-path", p.to_str().unwrap()]);
            if code == 1 {
                return verdict(false, format!("{cmd} exited with a usage error"));
            }
        }
        same &= std::fs::read(&paths[0]).map_err(qfid::Error::from)? == std::fs::read(&paths[1]).map_err(qfid::Error::from)?;
    }
    let c = ExperimentConfig::new(2, 4, 50, 16);
    let (a, b) = (run_obstruction_search(&c)?, run_obstruction_search(&c)?);
    same &= serde_json::to_vec(&a).map_err(qfid::Error::from)? == serde_json::to_vec(&b).map_err(qfid::Error::from)?;
    verdict(same, format!("braid, wy, cases reports and evidence JSON byte-identical: {same}"))
}

fn main() {
    let criteria: [(&str, fn() -> Result<Verdict>); 16] = [
        ("fidelity axioms", c1),
        ("commutative embedding", c2),
        ("star-commutator equivalence", c3),
        ("spectrum symmetry", c4),
        ("case theorems", c5),
        ("order compatibility", c6),
        ("inverse pair", c7),
        ("rank-one theorem", c8),
        ("obstruction evidence", c9),
        ("WY identity", c10),
        ("scalar law", c11),
        ("Ito derivations", c12),
        ("homology", c13),
        ("trace cocycle", c14),
        ("Bures world function", c15),
        ("reproducibility", c16),
    ];
    let start = Instant::now();
    let mut failed = Vec::new();
    for (i, (name, f)) in criteria.iter().enumerate() {
        let t = Instant::now();
        let v = f().unwrap_or_else(|e| Verdict { passed: false, detail: format!("error: {e}") });
        println!(
            "criterion {:>2} {:<28} {}  {} [{:.1}s]",
            i + 1,
            name,
            if v.passed { "PASS" } else { "FAIL" },
            v.detail,
            t.elapsed().as_secs_f64()
        );
        if !v.passed {
            failed.push(i + 1);
        }
    }
    println!("acceptance: {}/16 passed in {:.1}s", 16 - failed.len(), start.elapsed().as_secs_f64());
    if !failed.is_empty() {
        println!("acceptance: failing criteria {failed:?}");
        std::process::exit(1);
    }
}
