//! Command-line front end.
//!
//! Exit status: 0 when every assertion of the subcommand holds, 1 on usage or input errors,
//! 2 when an assertion fails (the failing witnesses are part of the report).

use std::ffi::OsString;
use std::io::Write;
use std::path::{Path, PathBuf};
use std::time::{SystemTime, UNIX_EPOCH};

use clap::{Args, Parser, Subcommand, ValueEnum};
use serde::Serialize;
use serde_json::{json, Value};

use crate::bures::{bures_distance, family_report, world_function, PointFamily};
use crate::error::{Error, Result};
use crate::fidelity::{
    braidable, inverse_pair_defect, monotonicity_defect, r1_defect, relative_star_commutator, spectrum_match, star,
    Orientation, PlacementPolicy,
};
use crate::homology::{
    boundary_squared_failures, dihedral_system, is_2cocycle, trace_cocycle_vs_gamma, trivial_system, Cochain,
    FiniteBinarySystem,
};
use crate::lab::{
    kappa_sweep, minimize_defect, perturbation_sweep, run_case_theorems, run_commuting_experiment,
    run_functional_calculus, run_mixed_law_checks, run_obstruction_search, run_rank_one_experiment,
    ExperimentConfig, OptimizerSchedule, Polynomial, COMMUTING_THRESHOLD,
};
use crate::model::{
    axiom_report, conjugation_hom, ito_rule_defect, ld_ito_defect, Carrier, ExponentPair, ItoDerivative,
    ScalarSystem,
};
use crate::operator::io::{load_family_file, LoadMode};
use crate::operator::random::{trial_seed, OperatorKind, Sampler, STRICT_SHIFT};
use crate::operator::{relative_commutator, relative_defect, DensityOperator, PositiveOperator, ToleranceProfile, C64};
use crate::wy::{quasi_distributivity_report, wy_information, QUASI_DISTRIBUTIVITY_SIGN};

/// Environment variable naming the default directory for reports.
pub const OUT_DIR_ENV: &str = "QFID_OUT_DIR";

#[derive(Parser, Debug)]
#[command(name = "qfid", version, about = "Fidelity-product laboratory: axiom checks, braidability searches and homology")]
pub struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, ValueEnum, Serialize)]
#[serde(rename_all = "kebab-case")]
pub enum Family {
    Psd,
    StrictlyPositive,
    Density,
    Rank1,
}

impl From<Family> for OperatorKind {
    fn from(f: Family) -> Self {
        match f {
            Family::Psd => OperatorKind::Psd,
            Family::StrictlyPositive => OperatorKind::StrictlyPositive,
            Family::Density => OperatorKind::Density,
            Family::Rank1 => OperatorKind::Rank1Projector,
        }
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, ValueEnum, Serialize)]
#[serde(rename_all = "kebab-case")]
pub enum OutFormat {
    Json,
    Jsonl,
    Csv,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, ValueEnum, Serialize)]
#[serde(rename_all = "kebab-case")]
pub enum CarrierArg {
    ComplexNonzero,
    Complex,
    PositiveReal,
    NonnegReal,
}

impl From<CarrierArg> for Carrier {
    fn from(c: CarrierArg) -> Self {
        match c {
            CarrierArg::ComplexNonzero => Carrier::ComplexNonzero,
            CarrierArg::Complex => Carrier::Complex,
            CarrierArg::PositiveReal => Carrier::PositiveReal,
            CarrierArg::NonnegReal => Carrier::NonnegReal,
        }
    }
}

#[derive(Args, Clone, Debug, Serialize)]
pub struct Common {
    /// Matrix dimension (lower end of the range when --dim-max is given)
    #[arg(long, default_value_t = 3)]
    dim: usize,
    /// Upper end of the dimension range; trials cycle through it
    #[arg(long)]
    dim_max: Option<usize>,
    #[arg(long, default_value_t = 100)]
    trials: usize,
    #[arg(long, default_value_t = 0)]
    seed: u64,
    /// Axiom tolerance; the rest of the tolerance profile keeps its defaults
    #[arg(long, default_value_t = 1e-8)]
    tol: f64,
    #[arg(long, value_enum, default_value_t = Family::Psd)]
    family: Family,
    #[arg(long, value_enum, default_value_t = OutFormat::Json)]
    out_format: OutFormat,
    /// Report destination; defaults to $QFID_OUT_DIR/<command>-<seed>.<ext>, else stdout
    #[arg(long)]
    #[serde(skip)]
    out_path: Option<PathBuf>,
    /// Closure depth for operator tables built from a family
    #[arg(long, default_value_t = 1)]
    closure_depth: usize,
    /// Test R3' placements as well as R3
    #[arg(long)]
    both_sides: bool,
}

impl Common {
    fn tolerance(&self) -> Result<ToleranceProfile> {
        ToleranceProfile::with_axiom_tol(self.tol)
    }

    fn config(&self) -> Result<ExperimentConfig> {
        let mut cfg = ExperimentConfig::new(self.dim, self.dim_max.unwrap_or(self.dim), self.trials, self.seed)
            .with_tol(self.tolerance()?)
            .with_policy(if self.both_sides { PlacementPolicy::BothSides } else { PlacementPolicy::LeftOnly });
        cfg.family = self.family.into();
        cfg.out_path = self.out_path.clone();
        cfg.validate()?;
        Ok(cfg)
    }
}

#[derive(Subcommand, Debug)]
enum Command {
    /// Fidelity-product axioms on random operators and commuting families
    Axioms(Common),
    /// Braidability search on random non-commuting triples, or on a given family
    Braid {
        #[command(flatten)]
        common: Common,
        /// JSON file with a list of matrices to test instead of random triples
        #[arg(long)]
        matrices: Option<PathBuf>,
    },
    /// Commutant, identity, quarter-form, quadruple, functional-calculus and mixed-law cases
    Cases(Common),
    /// Rank-one projector triples
    Rank1(Common),
    /// Boundary checks on finite tables and the trace cocycle on commuting densities
    Homology {
        #[command(flatten)]
        common: Common,
        /// Highest chain degree for the boundary-squared check
        #[arg(long, default_value_t = 4)]
        degree: usize,
        /// JSON table `{"n": .., "table": [[..]]}` to check as well
        #[arg(long)]
        table: Option<PathBuf>,
        /// 2-cochain JSON to test for the cocycle condition on --table
        #[arg(long, requires = "table")]
        cochain: Option<PathBuf>,
    },
    /// Quasi-distributivity of the half-anticommutator product and Wigner-Yanase information
    Wy(Common),
    /// Bures distance, world function and Gram determinant of a density family
    Bures {
        #[command(flatten)]
        common: Common,
        /// JSON list of density matrices, base point first
        #[arg(long)]
        matrices: Option<PathBuf>,
        /// Number of random points besides the base
        #[arg(long, default_value_t = 3)]
        points: usize,
    },
    /// Axioms of the scalar law y^a z^b
    Scalar {
        #[command(flatten)]
        common: Common,
        #[command(flatten)]
        law: ScalarArgs,
    },
    /// Ito rule for conjugation homomorphisms and the law-induced identity
    Ito {
        #[command(flatten)]
        common: Common,
        #[command(flatten)]
        law: ScalarArgs,
    },
    /// Constrained search for nearly braidable non-commuting triples
    Minimize {
        #[command(flatten)]
        common: Common,
        /// Lower bound on the largest pairwise relative commutator
        #[arg(long, default_value_t = 0.5)]
        kappa: f64,
        #[arg(long, default_value_t = 50)]
        restarts: usize,
        /// Objective evaluations per restart
        #[arg(long, default_value_t = 3000)]
        max_evaluations: usize,
        /// The best defect must stay above this when kappa > 0
        #[arg(long, default_value_t = 1e-4)]
        floor: f64,
        /// Comma-separated kappa values for an additional sweep
        #[arg(long, value_delimiter = ',')]
        sweep: Vec<f64>,
    },
}

#[derive(Args, Clone, Debug, Serialize)]
struct ScalarArgs {
    #[arg(long, default_value_t = 0.5)]
    a: f64,
    #[arg(long, default_value_t = 0.5)]
    b: f64,
    #[arg(long, value_enum, default_value_t = CarrierArg::PositiveReal)]
    carrier: CarrierArg,
}

/// What a subcommand produced.
struct Outcome {
    report: Value,
    records: Option<Vec<Value>>,
    csv: Option<String>,
    passed: bool,
    summary: String,
}

impl Outcome {
    fn new(report: impl Serialize, passed: bool, summary: String) -> Result<Self> {
        Ok(Self {
            report: serde_json::to_value(report)?,
            records: None,
            csv: None,
            passed,
            summary,
        })
    }
}

fn to_values<T: Serialize>(xs: &[T]) -> Result<Vec<Value>> {
    xs.iter().map(|x| serde_json::to_value(x).map_err(Error::from)).collect()
}

fn max_of(xs: impl IntoIterator<Item = f64>) -> f64 {
    xs.into_iter().fold(0.0, |m, x| if x.is_nan() || m.is_nan() { f64::NAN } else { m.max(x) })
}

#[derive(Serialize)]
struct AxiomTrial {
    index: usize,
    seed: u64,
    dim: usize,
    r1: f64,
    scaling: f64,
    spectrum: f64,
    commutator: f64,
    star_commutator: f64,
    concordant: bool,
    inverse_pair_transposed: (f64, f64),
    inverse_pair_defining: (f64, f64),
    monotonicity_transposed: f64,
    monotonicity_defining: f64,
}

fn draw(s: &mut Sampler, family: OperatorKind, dim: usize) -> PositiveOperator {
    match family {
        OperatorKind::StrictlyPositive => s.strictly_positive(dim, STRICT_SHIFT).into_inner(),
        OperatorKind::Density => s.density(dim).into_inner(),
        OperatorKind::Rank1Projector => s.rank1_projector(dim),
        _ => s.psd(dim),
    }
}

fn axioms(c: &Common) -> Result<Outcome> {
    let cfg = c.config()?;
    let tol = cfg.tol;
    let mut trials = Vec::with_capacity(cfg.trials);
    for index in 0..cfg.trials {
        let seed = trial_seed(cfg.seed, index as u64);
        let dim = cfg.dim_for(index);
        let mut s = Sampler::new(seed);
        let (a, b) = (draw(&mut s, cfg.family, dim), draw(&mut s, cfg.family, dim));
        let base = star(&a, &b)?;
        let mut scaling = 0.0f64;
        for lambda in [0.25, 1.0, 4.0, 10.0] {
            let lhs = star(&a, &b.scaled(lambda)?)?;
            scaling = scaling.max(relative_defect(lhs.matrix(), &(base.matrix() * C64::new(lambda.sqrt(), 0.0))));
        }
        let commutator = relative_commutator(a.matrix(), b.matrix())?;
        let star_commutator = relative_star_commutator(&a, &b)?;
        let (sa, sb) = (s.strictly_positive(dim, STRICT_SHIFT), s.strictly_positive(dim, STRICT_SHIFT));
        let inv = inverse_pair_defect(&sa, &sb)?;
        let lo = s.psd(dim);
        let hi = PositiveOperator::from_product(&(lo.matrix() + s.psd(dim).matrix()))?;
        let x = s.psd(dim);
        trials.push(AxiomTrial {
            index,
            seed,
            dim,
            r1: r1_defect(&a)?,
            scaling,
            spectrum: spectrum_match(&a, &b)?,
            commutator,
            star_commutator,
            concordant: (commutator < COMMUTING_THRESHOLD) == (star_commutator < tol.axiom_tol),
            inverse_pair_transposed: inv.transposed,
            inverse_pair_defining: inv.defining,
            monotonicity_transposed: monotonicity_defect(&lo, &hi, &x, Orientation::Transposed, &tol)?,
            monotonicity_defining: monotonicity_defect(&lo, &hi, &x, Orientation::Defining, &tol)?,
        });
    }
    let commuting = run_commuting_experiment(&cfg)?;
    let t = tol.axiom_tol;
    let asserted = [
        ("r1", max_of(trials.iter().map(|r| r.r1))),
        ("scaling", max_of(trials.iter().map(|r| r.scaling))),
        ("spectrum", max_of(trials.iter().map(|r| r.spectrum))),
        (
            "inverse_pair_transposed",
            max_of(trials.iter().map(|r| r.inverse_pair_transposed.0.max(r.inverse_pair_transposed.1))),
        ),
        ("monotonicity_transposed", max_of(trials.iter().map(|r| r.monotonicity_transposed))),
    ];
    let discordant = trials.iter().filter(|r| !r.concordant).count();
    let passed = asserted.iter().all(|(_, v)| *v < t) && discordant == 0 && commuting.passed;
    let maxima: serde_json::Map<String, Value> = asserted.iter().map(|(k, v)| (k.to_string(), json!(v))).collect();
    let defining = json!({
        "inverse_pair": max_of(trials.iter().map(|r| r.inverse_pair_defining.0.max(r.inverse_pair_defining.1))),
        "monotonicity": max_of(trials.iter().map(|r| r.monotonicity_defining)),
    });
    let summary = format!(
        "{} trials, {} discordant commutator verdicts, {} commuting-family failures",
        trials.len(),
        discordant,
        commuting.failures.len()
    );
    let mut out = Outcome::new(
        json!({
            "maxima": maxima,
            "defining_reading": defining,
            "discordant": discordant,
            "trials": trials,
            "commuting": commuting,
        }),
        passed,
        summary,
    )?;
    out.records = Some(to_values(&trials)?);
    Ok(out)
}

fn braid(c: &Common, matrices: Option<&Path>) -> Result<Outcome> {
    let cfg = c.config()?;
    if let Some(path) = matrices {
        let ops: Vec<PositiveOperator> = load_family_file(path, LoadMode::Positive, &cfg.tol)?
            .iter()
            .map(|m| m.positive().expect("positive mode").clone())
            .collect();
        let (ok, rep) = braidable(&ops, cfg.tol.axiom_tol, cfg.policy)?;
        let summary = format!("{} operators, braidable = {ok}, max defect {:e}", ops.len(), rep.max_defect);
        let mut out = Outcome::new(&rep, true, summary)?;
        out.records = Some(to_values(&rep.placements)?);
        return Ok(out);
    }
    let ev = run_obstruction_search(&cfg)?;
    let control_ok = ev.records.iter().filter(|r| r.control).all(|r| r.braidable);
    let summary = format!(
        "{} trials, {} counterexamples, smallest max defect {:e}",
        ev.summary.trials, ev.summary.counterexamples, ev.summary.smallest_max_defect
    );
    let mut out = Outcome::new(&ev, ev.counterexamples.is_empty() && control_ok, summary)?;
    out.records = Some(to_values(&ev.records)?);
    out.csv = Some(ev.to_csv()?);
    Ok(out)
}

fn cases(c: &Common) -> Result<Outcome> {
    let cfg = c.config()?;
    let cases = run_case_theorems(&cfg)?;
    let square = Polynomial(vec![0.0, 0.0, 1.0]);
    let shift = Polynomial(vec![1.0, 1.0]);
    let functional = run_functional_calculus(&cfg, &square, &shift)?;
    let mixed = run_mixed_law_checks(&cfg)?;
    let eps = [0.0, 1e-6, 1e-5, 1e-4, 1e-3, 1e-2];
    let sweep = perturbation_sweep(cfg.seed, cfg.dim_min, &eps, cfg.policy)?;
    let passed = cases.passed && functional.passed && mixed.passed;
    let summary = format!(
        "{} case failures, {} functional-calculus failures, {} mixed-law failures",
        cases.failures.len(),
        functional.failures.len(),
        mixed.failures.len()
    );
    Outcome::new(
        json!({ "cases": cases, "functional_calculus": functional, "mixed_laws": mixed, "perturbation": sweep }),
        passed,
        summary,
    )
}

fn rank1(c: &Common) -> Result<Outcome> {
    let r = run_rank_one_experiment(&c.config()?)?;
    let summary = format!(
        "{}/{} distinct triples not braidable, {}/{} equal triples braidable",
        r.distinct_not_braidable,
        r.trials.len(),
        r.equal_braidable,
        r.trials.len()
    );
    let mut out = Outcome::new(&r, r.passed, summary)?;
    out.records = Some(to_values(&r.trials)?);
    Ok(out)
}

fn homology(c: &Common, degree: usize, table: Option<&Path>, cochain: Option<&Path>) -> Result<Outcome> {
    let tol = c.tolerance()?;
    let mut systems: Vec<(String, FiniteBinarySystem)> = Vec::new();
    for n in 1..=4 {
        systems.push((format!("trivial-{n}"), trivial_system(n)?));
    }
    for n in [3, 5] {
        systems.push((format!("dihedral-{n}"), dihedral_system(n)?));
    }
    let mut given = None;
    if let Some(p) = table {
        let s = FiniteBinarySystem::from_json(&std::fs::read_to_string(p)?)?;
        given = Some(s.clone());
        systems.push((p.display().to_string(), s));
    }
    let mut boundary = Vec::new();
    let mut boundary_failures = 0;
    for (name, s) in &systems {
        for d in 2..=degree {
            let f = boundary_squared_failures(s, d)?;
            boundary_failures += f.len();
            boundary.push(json!({ "system": name, "degree": d, "failures": f }));
        }
    }
    let cocycle = match (cochain, &given) {
        (Some(p), Some(s)) => {
            let phi = Cochain::from_json(&std::fs::read_to_string(p)?, s.n(), 2)?;
            Some(is_2cocycle(&phi, s, 0.0)?)
        }
        _ => None,
    };
    let cfg = c.config()?;
    let mut discordant = 0;
    let mut trace_reports = Vec::new();
    if cfg.dim_min >= 1 {
        for index in 0..cfg.trials {
            let seed = trial_seed(cfg.seed, index as u64);
            let fam = Sampler::new(seed).commuting_densities(3, cfg.dim_for(index));
            let r = trace_cocycle_vs_gamma(&fam, tol.axiom_tol, c.closure_depth)?;
            discordant += r.discordant;
            trace_reports.push(r);
        }
    }
    let passed = boundary_failures == 0 && discordant == 0;
    let summary = format!(
        "{boundary_failures} boundary-squared failures, {discordant} discordant trace-cocycle triples"
    );
    Outcome::new(
        json!({
            "boundary_squared": boundary,
            "cocycle": cocycle,
            "trace_cocycle": { "discordant": discordant, "families": trace_reports },
        }),
        passed,
        summary,
    )
}

#[derive(Serialize)]
struct WyTrial {
    index: usize,
    seed: u64,
    dim: usize,
    #[serde(rename = "T1")]
    t1: f64,
    #[serde(rename = "T2")]
    t2: f64,
    #[serde(rename = "T3")]
    t3: f64,
    scale: f64,
    sign_residual: f64,
    scale_residual: f64,
    skew_information: f64,
    state_commutator: f64,
}

fn wy(c: &Common) -> Result<Outcome> {
    let cfg = c.config()?;
    let tol = cfg.tol.axiom_tol;
    let mut trials = Vec::new();
    let mut failures = 0;
    for index in 0..cfg.trials {
        let seed = trial_seed(cfg.seed, index as u64);
        let dim = cfg.dim_for(index);
        let mut s = Sampler::new(seed);
        let (a, b, cc) = (draw(&mut s, cfg.family, dim), draw(&mut s, cfg.family, dim), draw(&mut s, cfg.family, dim));
        let q = quasi_distributivity_report(&a, &b, &cc)?;
        let scale_of = |x: f64, y: f64| f64::max(1.0, x.abs() + y.abs());
        let sign_residual = (q.t1 - QUASI_DISTRIBUTIVITY_SIGN * q.t2).abs() / scale_of(q.t1, q.t2);
        let scale_residual = (q.t2 - q.scale * q.t3).abs() / scale_of(q.t2, q.scale * q.t3);
        let rho = s.density(dim);
        let k = s.hermitian(dim);
        let skew = wy_information(&k, &rho)?;
        let state_commutator = relative_commutator(rho.sqrt().matrix(), k.matrix())?;
        let zero_iff = (skew.abs() < tol) == (state_commutator < tol);
        if !(sign_residual < tol && scale_residual < tol && skew <= 1e-10 && zero_iff) {
            failures += 1;
        }
        trials.push(WyTrial {
            index,
            seed,
            dim,
            t1: q.t1,
            t2: q.t2,
            t3: q.t3,
            scale: q.scale,
            sign_residual,
            scale_residual,
            skew_information: skew,
            state_commutator,
        });
    }
    let mut w = csv::Writer::from_writer(Vec::new());
    for t in &trials {
        w.serialize(t).map_err(|e| Error::Parse(e.to_string()))?;
    }
    let csv = String::from_utf8(w.into_inner().map_err(|e| Error::Parse(e.to_string()))?).expect("csv is UTF-8");
    let summary = format!("{} triples, {failures} failures, sign constant {QUASI_DISTRIBUTIVITY_SIGN}", trials.len());
    let mut out = Outcome::new(
        json!({ "sign": QUASI_DISTRIBUTIVITY_SIGN, "failures": failures, "trials": trials }),
        failures == 0,
        summary,
    )?;
    out.records = Some(to_values(&trials)?);
    out.csv = Some(csv);
    Ok(out)
}

fn bures(c: &Common, matrices: Option<&Path>, points: usize) -> Result<Outcome> {
    let tol = c.tolerance()?;
    let members: Vec<DensityOperator> = match matrices {
        Some(p) => load_family_file(p, LoadMode::Density, &tol)?
            .into_iter()
            .map(|m| match m {
                crate::operator::io::LoadedOperator::Density(d) => d,
                _ => unreachable!("density mode"),
            })
            .collect(),
        None => {
            if c.dim == 0 {
                return Err(Error::Shape("dimension must be at least 1".into()));
            }
            let mut s = Sampler::new(c.seed);
            (0..=points).map(|_| s.density(c.dim)).collect()
        }
    };
    let family = PointFamily::from_list(members.clone())?;
    let report = family_report(&family)?;
    let mut self_distance = 0.0f64;
    let mut symmetry = 0.0f64;
    let mut squared = 0.0f64;
    for x in &members {
        self_distance = self_distance.max(world_function(x, x)?.abs());
        for y in &members {
            let (sxy, syx) = (world_function(x, y)?, world_function(y, x)?);
            symmetry = symmetry.max((sxy - syx).abs());
            squared = squared.max((bures_distance(x, y)?.powi(2) - 2.0 * sxy).abs());
        }
    }
    let passed = self_distance < tol.axiom_tol && symmetry < tol.axiom_tol && squared < tol.axiom_tol;
    let summary = format!("{} points, Gram determinant {:e}", members.len(), report.determinant);
    Outcome::new(
        json!({
            "checks": { "self_distance": self_distance, "symmetry": symmetry, "squared_distance": squared },
            "family": report,
        }),
        passed,
        summary,
    )
}

fn scalar(c: &Common, law: &ScalarArgs) -> Result<Outcome> {
    c.tolerance()?;
    if c.trials == 0 {
        return Err(Error::Precondition("trials must be at least 1".into()));
    }
    let e = ExponentPair::new(law.a, law.b);
    let carrier: Carrier = law.carrier.into();
    let sys = ScalarSystem::new(carrier, e);
    let samples = carrier.samples(c.trials, c.seed);
    let rep = axiom_report(&sys, &samples, c.tol)?;
    // the law is a quandle exactly when a + b = 1
    let passed = rep.flags.all() == e.is_quandle();
    let summary = format!("a = {}, b = {}, flags {:?}", law.a, law.b, rep.flags);
    Outcome::new(json!({ "exponents": e, "carrier": carrier, "quandle_expected": e.is_quandle(), "axioms": rep }), passed, summary)
}

fn ito(c: &Common, law: &ScalarArgs) -> Result<Outcome> {
    let cfg = c.config()?;
    let tol = cfg.tol.axiom_tol;
    let mut rule = Vec::new();
    for index in 0..cfg.trials {
        let seed = trial_seed(cfg.seed, index as u64);
        let dim = cfg.dim_for(index);
        let mut s = Sampler::new(seed);
        let g = s.complex_gaussian_matrix(dim, dim) + crate::operator::CMatrix::identity(dim, dim) * C64::new(2.0, 0.0);
        let d = ItoDerivative::from_homomorphism(conjugation_hom(&g)?, dim, seed, tol)?;
        let x = s.complex_gaussian_matrix(dim, dim);
        let y = s.complex_gaussian_matrix(dim, dim);
        rule.push(ito_rule_defect(&|m| d.apply(m), &x, &y)?);
    }
    let carrier: Carrier = law.carrier.into();
    let sys = ScalarSystem::new(carrier, ExponentPair::new(law.a, law.b));
    let samples = carrier.samples(cfg.trials.max(3), cfg.seed);
    let mut induced = Vec::new();
    for i in 0..samples.len() {
        let (x, y, z) = (samples[i], samples[(i + 1) % samples.len()], samples[(i + 2) % samples.len()]);
        induced.push(ld_ito_defect(&sys, x, y, z, &samples, tol)?);
    }
    let (rule_max, induced_max) = (max_of(rule.iter().copied()), max_of(induced.iter().copied()));
    let passed = rule_max < tol && induced_max < tol;
    let summary = format!("Ito rule max defect {rule_max:e}, law-induced identity max defect {induced_max:e}");
    Outcome::new(
        json!({
            "ito_rule": { "max_defect": rule_max, "defects": rule },
            "law_induced": { "exponents": sys.exponents, "carrier": carrier, "max_defect": induced_max, "defects": induced },
        }),
        passed,
        summary,
    )
}

fn minimize(c: &Common, kappa: f64, restarts: usize, max_evaluations: usize, floor: f64, sweep: &[f64]) -> Result<Outcome> {
    c.tolerance()?;
    let schedule = OptimizerSchedule {
        restarts,
        max_evaluations,
        ..OptimizerSchedule::default()
    };
    let r = minimize_defect(c.dim, kappa, c.seed, &schedule)?;
    let swept = if sweep.is_empty() { None } else { Some(kappa_sweep(c.dim, sweep, c.seed, &schedule, 0.1)?) };
    let passed = if kappa > 0.0 { r.stays_above(floor) } else { r.best_objective < c.tol };
    let mut w = csv::Writer::from_writer(Vec::new());
    for rec in &r.restarts {
        w.serialize(rec).map_err(|e| Error::Parse(e.to_string()))?;
    }
    let csv = String::from_utf8(w.into_inner().map_err(|e| Error::Parse(e.to_string()))?).expect("csv is UTF-8");
    let summary = format!("kappa {kappa}: best defect {:e} after {} evaluations", r.best_objective, r.evaluations);
    let mut out = Outcome::new(json!({ "floor": floor, "result": r, "sweep": swept }), passed, summary)?;
    out.records = Some(to_values(&r.restarts)?);
    out.csv = Some(csv);
    Ok(out)
}

fn render(name: &str, c: &Common, extra: Value, out: &Outcome) -> Result<String> {
    let envelope = json!({
        "command": name,
        "version": env!("CARGO_PKG_VERSION"),
        "config": c,
        "arguments": extra,
        "tolerance": c.tolerance()?,
        "passed": out.passed,
        "report": out.report,
    });
    Ok(match c.out_format {
        OutFormat::Json => serde_json::to_string_pretty(&envelope)? + "\n",
        OutFormat::Jsonl => {
            let mut s = String::new();
            for r in out.records.iter().flatten() {
                s.push_str(&serde_json::to_string(r)?);
                s.push('\n');
            }
            s.push_str(&serde_json::to_string(&json!({ "summary": envelope }))?);
            s.push('\n');
            s
        }
        OutFormat::Csv => out
            .csv
            .clone()
            .ok_or_else(|| Error::Precondition(format!("csv output is not available for `{name}`")))?,
    })
}

fn destination(name: &str, c: &Common) -> Option<PathBuf> {
    if let Some(p) = &c.out_path {
        return Some(p.clone());
    }
    let dir = std::env::var_os(OUT_DIR_ENV)?;
    let ext = match c.out_format {
        OutFormat::Json => "json",
        OutFormat::Jsonl => "jsonl",
        OutFormat::Csv => "csv",
    };
    Some(PathBuf::from(dir).join(format!("{name}-{}.{ext}", c.seed)))
}

/// Temp file in the target directory, then rename over the destination.
pub fn write_atomic(path: &Path, contents: &[u8]) -> Result<()> {
    let dir = match path.parent() {
        Some(d) if !d.as_os_str().is_empty() => d.to_path_buf(),
        _ => PathBuf::from("."),
    };
    std::fs::create_dir_all(&dir)?;
    let mut tmp = tempfile::NamedTempFile::new_in(&dir)?;
    tmp.write_all(contents)?;
    tmp.as_file().sync_all()?;
    tmp.persist(path).map_err(|e| Error::Io(e.error))?;
    Ok(())
}

/// Sidecar path holding the timestamp and command line, kept out of the report itself.
pub fn meta_path(path: &Path) -> PathBuf {
    let mut s = path.as_os_str().to_owned();
    s.push(".meta.json");
    PathBuf::from(s)
}

fn dispatch(cli: &Cli, argv: &[String]) -> Result<(bool, String)> {
    let (name, common, extra, out) = match &cli.command {
        Command::Axioms(c) => ("axioms", c, Value::Null, axioms(c)?),
        Command::Braid { common, matrices } => {
            ("braid", common, json!({ "matrices": matrices }), braid(common, matrices.as_deref())?)
        }
        Command::Cases(c) => ("cases", c, Value::Null, cases(c)?),
        Command::Rank1(c) => ("rank1", c, Value::Null, rank1(c)?),
        Command::Homology { common, degree, table, cochain } => (
            "homology",
            common,
            json!({ "degree": degree, "table": table, "cochain": cochain }),
            homology(common, *degree, table.as_deref(), cochain.as_deref())?,
        ),
        Command::Wy(c) => ("wy", c, Value::Null, wy(c)?),
        Command::Bures { common, matrices, points } => (
            "bures",
            common,
            json!({ "matrices": matrices, "points": points }),
            bures(common, matrices.as_deref(), *points)?,
        ),
        Command::Scalar { common, law } => ("scalar", common, serde_json::to_value(law)?, scalar(common, law)?),
        Command::Ito { common, law } => ("ito", common, serde_json::to_value(law)?, ito(common, law)?),
        Command::Minimize { common, kappa, restarts, max_evaluations, floor, sweep } => (
            "minimize",
            common,
            json!({ "kappa": kappa, "restarts": restarts, "max_evaluations": max_evaluations, "floor": floor, "sweep": sweep }),
            minimize(common, *kappa, *restarts, *max_evaluations, *floor, sweep)?,
        ),
    };
    let text = render(name, common, extra, &out)?;
    match destination(name, common) {
        Some(path) => {
            write_atomic(&path, text.as_bytes())?;
            let created = SystemTime::now().duration_since(UNIX_EPOCH).map(|d| d.as_secs()).unwrap_or(0);
            let meta = json!({ "created_unix": created, "argv": argv, "report": path });
            write_atomic(&meta_path(&path), (serde_json::to_string_pretty(&meta)? + "\n").as_bytes())?;
        }
        None => print!("{text}"),
    }
    let verdict = if out.passed { "PASS" } else { "FAIL" };
    Ok((out.passed, format!("qfid {name}: {verdict}: {}", out.summary)))
}

/// Errors in the caller's input exit 1; numerical breakdowns count as failed assertions.
fn exit_code_for(e: &Error) -> i32 {
    match e {
        Error::Singular(_) | Error::Numerical(_) | Error::OrthogonalSupport { .. } | Error::Structure(_) => 2,
        _ => 1,
    }
}

/// Parses `args` (program name first), runs the subcommand and returns the exit status.
pub fn run<I, T>(args: I) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<OsString> + Clone,
{
    let args: Vec<OsString> = args.into_iter().map(Into::into).collect();
    let cli = match Cli::try_parse_from(&args) {
        Ok(c) => c,
        Err(e) => {
            let _ = e.print();
            return if e.use_stderr() { 1 } else { 0 };
        }
    };
    let argv: Vec<String> = args.iter().map(|a| a.to_string_lossy().into_owned()).collect();
    match dispatch(&cli, &argv) {
        Ok((passed, line)) => {
            eprintln!("{line}");
            if passed {
                0
            } else {
                2
            }
        }
        Err(e) => {
            eprintln!("error: {e}");
            let code = exit_code_for(&e);
            if code == 1 {
                eprintln!("usage: qfid <axioms|braid|cases|rank1|homology|wy|bures|scalar|ito|minimize> [options]; see --help");
            }
            code
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn help_and_usage_codes() {
        assert_eq!(run(["qfid", "--help"]), 0);
        assert_eq!(run(["qfid", "braid", "--bogus"]), 1);
        assert_eq!(run(["qfid"]), 1);
        assert_eq!(run(["qfid", "braid", "--dim", "0"]), 1);
    }

    #[test]
    fn meta_path_appends_suffix() {
        assert_eq!(meta_path(Path::new("/tmp/r.json")), PathBuf::from("/tmp/r.json.meta.json"));
    }
}
