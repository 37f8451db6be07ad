//! Scalar and Schur-product systems `(y, z) ↦ y^a z^b`, group quandles, Ito derivatives,
//! and a sampled axiom checker for arbitrary binary laws.

use std::f64::consts::TAU;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::operator::random::Sampler;
use crate::operator::{principal_power, relative_defect, schur_power, schur_product_matrix, CMatrix, C64, ONE, ZERO};

/// Samples used for triple-based axioms: all triples over this many leading samples,
/// plus cyclically consecutive triples over the whole list.
pub const TRIPLE_PREFIX: usize = 20;
/// Leading samples used for the four-variable entropic law.
pub const ENTROPIC_PREFIX: usize = 10;
/// Leading samples used for the pairwise R2 check.
pub const PAIR_PREFIX: usize = 30;

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct ExponentPair {
    pub a: f64,
    pub b: f64,
}

impl ExponentPair {
    pub fn new(a: f64, b: f64) -> Self {
        Self { a, b }
    }

    /// `a + b = 1`, compared exactly.
    pub fn is_quandle(&self) -> bool {
        self.a + self.b == 1.0
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum Carrier {
    ComplexNonzero,
    Complex,
    PositiveReal,
    NonnegReal,
}

impl Carrier {
    pub fn contains(self, z: C64) -> bool {
        let finite = z.re.is_finite() && z.im.is_finite();
        finite
            && match self {
                Carrier::ComplexNonzero => z != ZERO,
                Carrier::Complex => true,
                Carrier::PositiveReal => z.im == 0.0 && z.re > 0.0,
                Carrier::NonnegReal => z.im == 0.0 && z.re >= 0.0,
            }
    }

    /// Random carrier element: complex Gaussian, or `exp` of a Gaussian for real carriers.
    pub fn sample(self, s: &mut Sampler) -> C64 {
        match self {
            Carrier::ComplexNonzero | Carrier::Complex => s.complex_gaussian(),
            Carrier::PositiveReal | Carrier::NonnegReal => C64::new(s.gaussian().exp(), 0.0),
        }
    }

    pub fn samples(self, count: usize, seed: u64) -> Vec<C64> {
        let mut s = Sampler::new(seed);
        (0..count).map(|_| self.sample(&mut s)).collect()
    }
}

/// `y^a z^b` with principal powers, arguments in `[0, 2π)`.
pub fn scalar_star(y: C64, z: C64, e: ExponentPair) -> Result<C64> {
    Ok(principal_power(y, e.a)? * principal_power(z, e.b)?)
}

fn arg(z: C64) -> f64 {
    let t = z.im.atan2(z.re);
    if t < 0.0 {
        t + TAU
    } else {
        t
    }
}

/// Scaled distance `|x - y| / max(1, |x| + |y|)`, matching [`relative_defect`].
pub fn scalar_distance(x: C64, y: C64) -> f64 {
    (x - y).norm() / f64::max(1.0, x.norm() + y.norm())
}

/// A binary operation `x ▷ y` with an R2 solver for `x ▷ c = y`.
pub trait BinaryLaw {
    type Elem: Clone + Serialize;

    fn apply(&self, x: &Self::Elem, y: &Self::Elem) -> Result<Self::Elem>;

    /// Scale-free distance used for every defect.
    fn distance(&self, x: &Self::Elem, y: &Self::Elem) -> f64;

    /// A solution `c` of `x ▷ c = y` if the law's solver finds one.
    fn solve_r2(&self, x: &Self::Elem, y: &Self::Elem) -> Result<Option<Self::Elem>>;

    /// Whether an element belongs to the law's carrier.
    fn in_carrier(&self, _x: &Self::Elem) -> bool {
        true
    }
}

/// `y ▷ z = y^a z^b` on a scalar carrier.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct ScalarSystem {
    pub carrier: Carrier,
    pub exponents: ExponentPair,
}

impl ScalarSystem {
    pub fn new(carrier: Carrier, exponents: ExponentPair) -> Self {
        Self { carrier, exponents }
    }

    /// Closed-form `c = (y x^{-a})^{1/b}` plus the other branches of the `1/b` root.
    pub fn r2_candidates(&self, x: C64, y: C64) -> Result<Vec<C64>> {
        let ExponentPair { a, b } = self.exponents;
        if b == 0.0 {
            return Ok(Vec::new());
        }
        let xa = principal_power(x, a)?;
        if xa == ZERO {
            return Ok(if y == ZERO { vec![ONE] } else { Vec::new() });
        }
        let w = y / xa;
        let mut out = vec![principal_power(w, 1.0 / b)?];
        if w != ZERO && matches!(self.carrier, Carrier::Complex | Carrier::ComplexNonzero) {
            // c = |w|^{1/b} e^{i(θ_w + 2πk)/b}, reduced to [0, 2π)
            let r = w.norm().powf(1.0 / b);
            let turns = (1.0 / b).abs().ceil() as i64 + 1;
            for k in -turns..=turns {
                out.push(C64::from_polar(r, (arg(w) + TAU * k as f64) / b));
            }
        }
        Ok(out)
    }
}

impl BinaryLaw for ScalarSystem {
    type Elem = C64;

    fn apply(&self, x: &C64, y: &C64) -> Result<C64> {
        scalar_star(*x, *y, self.exponents)
    }

    fn distance(&self, x: &C64, y: &C64) -> f64 {
        scalar_distance(*x, *y)
    }

    fn solve_r2(&self, x: &C64, y: &C64) -> Result<Option<C64>> {
        let mut best: Option<(f64, C64)> = None;
        for c in self.r2_candidates(*x, *y)? {
            if !self.carrier.contains(c) {
                continue;
            }
            let d = scalar_distance(self.apply(x, &c)?, *y);
            if best.map_or(true, |(bd, _)| d < bd) {
                best = Some((d, c));
            }
        }
        Ok(best.map(|(_, c)| c))
    }

    fn in_carrier(&self, x: &C64) -> bool {
        self.carrier.contains(*x)
    }
}

/// `x ∘a ∘ y ∘b` entrywise.
pub fn schur_star(x: &CMatrix, y: &CMatrix, e: ExponentPair) -> Result<CMatrix> {
    schur_product_matrix(&schur_power(x, e.a)?, &schur_power(y, e.b)?)
}

/// [`schur_star`] as a law on matrices; R2 is solved entrywise.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct SchurSystem {
    pub carrier: Carrier,
    pub exponents: ExponentPair,
}

impl BinaryLaw for SchurSystem {
    type Elem = CMatrix;

    fn apply(&self, x: &CMatrix, y: &CMatrix) -> Result<CMatrix> {
        schur_star(x, y, self.exponents)
    }

    fn distance(&self, x: &CMatrix, y: &CMatrix) -> f64 {
        relative_defect(x, y)
    }

    fn solve_r2(&self, x: &CMatrix, y: &CMatrix) -> Result<Option<CMatrix>> {
        if x.shape() != y.shape() {
            return Err(Error::Shape("Schur operands differ in shape".into()));
        }
        let scalar = ScalarSystem::new(self.carrier, self.exponents);
        let mut c = x.clone();
        for (slot, (xi, yi)) in c.iter_mut().zip(x.iter().zip(y.iter())) {
            match scalar.solve_r2(xi, yi)? {
                Some(v) => *slot = v,
                None => return Ok(None),
            }
        }
        Ok(Some(c))
    }

    fn in_carrier(&self, x: &CMatrix) -> bool {
        x.iter().all(|&z| self.carrier.contains(z))
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum GroupVariant {
    /// `g h^{-1} g`
    Core,
    /// `h^{-1} g h`
    Conjugation,
    /// `g^{-1} h g^{-1}`
    InverseSandwich,
    /// `g^{-1} h g`
    InverseConjugation,
}

/// Multiplicative group operations needed by [`group_quandle`].
pub trait GroupElem: Clone + Serialize {
    fn mul(&self, other: &Self) -> Self;
    fn inv(&self) -> Result<Self>;
    fn dist(&self, other: &Self) -> f64;
}

impl GroupElem for C64 {
    fn mul(&self, other: &Self) -> Self {
        self * other
    }

    fn inv(&self) -> Result<Self> {
        if *self == ZERO {
            return Err(Error::Singular("0 has no inverse".into()));
        }
        Ok(self.inv())
    }

    fn dist(&self, other: &Self) -> f64 {
        scalar_distance(*self, *other)
    }
}

impl GroupElem for CMatrix {
    fn mul(&self, other: &Self) -> Self {
        self * other
    }

    fn inv(&self) -> Result<Self> {
        if !self.is_square() {
            return Err(Error::Shape("only square matrices invert".into()));
        }
        self.clone()
            .try_inverse()
            .ok_or_else(|| Error::Singular("matrix is not invertible".into()))
    }

    fn dist(&self, other: &Self) -> f64 {
        relative_defect(self, other)
    }
}

pub fn group_quandle<G: GroupElem>(g: &G, h: &G, variant: GroupVariant) -> Result<G> {
    Ok(match variant {
        GroupVariant::Core => g.mul(&h.inv()?).mul(g),
        GroupVariant::Conjugation => h.inv()?.mul(g).mul(h),
        GroupVariant::InverseSandwich => {
            let gi = g.inv()?;
            gi.mul(h).mul(&gi)
        }
        GroupVariant::InverseConjugation => g.inv()?.mul(h).mul(g),
    })
}

/// [`group_quandle`] as a [`BinaryLaw`].
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct GroupQuandle<G> {
    pub variant: GroupVariant,
    _elem: std::marker::PhantomData<G>,
}

impl<G> GroupQuandle<G> {
    pub fn new(variant: GroupVariant) -> Self {
        Self {
            variant,
            _elem: std::marker::PhantomData,
        }
    }
}

impl<G: GroupElem> BinaryLaw for GroupQuandle<G> {
    type Elem = G;

    fn apply(&self, x: &G, y: &G) -> Result<G> {
        group_quandle(x, y, self.variant)
    }

    fn distance(&self, x: &G, y: &G) -> f64 {
        x.dist(y)
    }

    fn solve_r2(&self, g: &G, h: &G) -> Result<Option<G>> {
        Ok(match self.variant {
            GroupVariant::Core => Some(g.mul(&h.inv()?).mul(g)),
            GroupVariant::InverseSandwich => Some(g.mul(h).mul(g)),
            GroupVariant::InverseConjugation => Some(g.mul(h).mul(&g.inv()?)),
            // left translations c ↦ c^{-1} g c only reach the conjugacy class of g
            GroupVariant::Conjugation => (g.dist(h) == 0.0).then(|| g.clone()),
        })
    }
}

#[derive(Clone, Copy, Debug, Default, PartialEq, Eq, Serialize, Deserialize)]
pub struct AxiomFlags {
    pub r1: bool,
    pub r2: bool,
    pub r3: bool,
    pub r3_prime: bool,
    pub entropic: bool,
}

impl AxiomFlags {
    pub fn all(&self) -> bool {
        self.r1 && self.r2 && self.r3 && self.r3_prime && self.entropic
    }
}

#[derive(Clone, Debug, Serialize, Deserialize)]
pub struct Witness<E> {
    pub axiom: String,
    pub defect: f64,
    pub tuple: Vec<E>,
}

#[derive(Clone, Debug, Serialize, Deserialize)]
pub struct AxiomReport<E> {
    pub flags: AxiomFlags,
    pub max_r1: f64,
    pub max_r2: f64,
    pub max_r3: f64,
    pub max_r3_prime: f64,
    pub max_entropic: f64,
    /// Fraction of samples with R1 defect at or above `tol`.
    pub r1_failure_rate: f64,
    /// Results leaving the carrier.
    pub carrier_violations: usize,
    pub witnesses: Vec<Witness<E>>,
    pub tol: f64,
    pub sample_count: usize,
}

struct Worst<E> {
    defect: f64,
    tuple: Vec<E>,
}

impl<E: Clone> Worst<E> {
    fn new() -> Self {
        Self {
            defect: 0.0,
            tuple: Vec::new(),
        }
    }

    fn offer(&mut self, d: f64, tuple: &[&E]) {
        // NaN counts as the worst possible defect
        let d = if d.is_nan() { f64::INFINITY } else { d };
        if d > self.defect || self.tuple.is_empty() {
            self.defect = self.defect.max(d);
            self.tuple = tuple.iter().map(|&e| e.clone()).collect();
        }
    }
}

fn triples(n: usize) -> Vec<[usize; 3]> {
    let m = n.min(TRIPLE_PREFIX);
    let mut out = Vec::with_capacity(m * m * m + n);
    for i in 0..m {
        for j in 0..m {
            for k in 0..m {
                out.push([i, j, k]);
            }
        }
    }
    if n > m {
        out.extend((0..n).map(|i| [i, (i + 1) % n, (i + 2) % n]));
    }
    out
}

/// Sampled check of R1, R2, R3, R3' and the entropic law.
///
/// R1 runs on every sample, R2 on all pairs of the first [`PAIR_PREFIX`] samples, R3 and
/// R3' on the triples described at [`TRIPLE_PREFIX`], and the entropic law on all
/// quadruples of the first [`ENTROPIC_PREFIX`] samples.
pub fn axiom_report<L: BinaryLaw>(law: &L, samples: &[L::Elem], tol: f64) -> Result<AxiomReport<L::Elem>> {
    if samples.is_empty() {
        return Err(Error::Precondition("axiom report needs at least one sample".into()));
    }
    let n = samples.len();
    let violations = std::cell::Cell::new(0usize);
    let op = |x: &L::Elem, y: &L::Elem| -> Result<L::Elem> {
        let r = law.apply(x, y)?;
        if !law.in_carrier(&r) {
            violations.set(violations.get() + 1);
        }
        Ok(r)
    };

    let mut r1 = Worst::new();
    let mut r1_fail = 0;
    for x in samples {
        let d = law.distance(&op(x, x)?, x);
        if !(d < tol) {
            r1_fail += 1;
        }
        r1.offer(d, &[x]);
    }

    let mut r2 = Worst::new();
    let p = n.min(PAIR_PREFIX);
    for x in &samples[..p] {
        for y in &samples[..p] {
            let d = match law.solve_r2(x, y)? {
                Some(c) => law.distance(&op(x, &c)?, y),
                None => f64::INFINITY,
            };
            r2.offer(d, &[x, y]);
        }
    }

    let mut r3 = Worst::new();
    let mut r3p = Worst::new();
    for [i, j, k] in triples(n) {
        let (x, y, z) = (&samples[i], &samples[j], &samples[k]);
        let l = op(x, &op(y, z)?)?;
        let r = op(&op(x, y)?, &op(x, z)?)?;
        r3.offer(law.distance(&l, &r), &[x, y, z]);
        let l = op(&op(y, z)?, x)?;
        let r = op(&op(y, x)?, &op(z, x)?)?;
        r3p.offer(law.distance(&l, &r), &[x, y, z]);
    }

    let mut ent = Worst::new();
    let q = n.min(ENTROPIC_PREFIX);
    for i in 0..q {
        for j in 0..q {
            for k in 0..q {
                for l in 0..q {
                    let (x, y, u, v) = (&samples[i], &samples[j], &samples[k], &samples[l]);
                    let lhs = op(&op(x, y)?, &op(u, v)?)?;
                    let rhs = op(&op(x, u)?, &op(y, v)?)?;
                    ent.offer(law.distance(&lhs, &rhs), &[x, y, u, v]);
                }
            }
        }
    }

    let flags = AxiomFlags {
        r1: r1.defect < tol,
        r2: r2.defect < tol,
        r3: r3.defect < tol,
        r3_prime: r3p.defect < tol,
        entropic: ent.defect < tol,
    };
    let mut witnesses = Vec::new();
    for (name, ok, w) in [
        ("R1", flags.r1, &r1),
        ("R2", flags.r2, &r2),
        ("R3", flags.r3, &r3),
        ("R3'", flags.r3_prime, &r3p),
        ("entropic", flags.entropic, &ent),
    ] {
        if !ok {
            witnesses.push(Witness {
                axiom: name.to_string(),
                defect: w.defect,
                tuple: w.tuple.clone(),
            });
        }
    }
    Ok(AxiomReport {
        flags,
        max_r1: r1.defect,
        max_r2: r2.defect,
        max_r3: r3.defect,
        max_r3_prime: r3p.defect,
        max_entropic: ent.defect,
        r1_failure_rate: r1_fail as f64 / n as f64,
        carrier_violations: violations.get(),
        witnesses,
        tol,
        sample_count: n,
    })
}

/// A linear map on matrices.
pub type MatrixMap = Box<dyn Fn(&CMatrix) -> CMatrix + Send + Sync>;

/// `d = ρ - id` for a unital multiplicative map `ρ`.
pub struct ItoDerivative {
    hom: MatrixMap,
}

/// Number of random pairs used to validate a homomorphism.
pub const HOM_VALIDATION_PAIRS: usize = 8;

impl ItoDerivative {
    /// Validates `ρ(1) = 1` and `ρ(xy) = ρ(x)ρ(y)` on random pairs before accepting `ρ`.
    pub fn from_homomorphism(hom: MatrixMap, dim: usize, seed: u64, tol: f64) -> Result<Self> {
        if dim == 0 {
            return Err(Error::Shape("dimension must be at least 1".into()));
        }
        let id = CMatrix::identity(dim, dim);
        let unit = relative_defect(&hom(&id), &id);
        if !(unit < tol) {
            return Err(Error::Precondition(format!("map is not unital: defect {unit:e}")));
        }
        let mut s = Sampler::new(seed);
        for _ in 0..HOM_VALIDATION_PAIRS {
            let x = s.complex_gaussian_matrix(dim, dim);
            let y = s.complex_gaussian_matrix(dim, dim);
            let d = relative_defect(&hom(&(&x * &y)), &(hom(&x) * hom(&y)));
            if !(d < tol) {
                return Err(Error::Precondition(format!("map is not multiplicative: defect {d:e}")));
            }
        }
        Ok(Self { hom })
    }

    /// `d(x) = ρ(x) - x`.
    pub fn apply(&self, x: &CMatrix) -> CMatrix {
        (self.hom)(x) - x
    }

    /// `ρ(x) = d(x) + x`, evaluated through the derivative.
    pub fn homomorphism_apply(&self, x: &CMatrix) -> CMatrix {
        self.apply(x) + x
    }

    /// Gives back the map the derivative was built from.
    pub fn into_homomorphism(self) -> MatrixMap {
        self.hom
    }
}

/// `ρ(x) - x` without validating `ρ`.
pub fn ito_apply(hom: &dyn Fn(&CMatrix) -> CMatrix, x: &CMatrix) -> CMatrix {
    hom(x) - x
}

/// `‖d(xy) - d(x)y - x d(y) - d(x)d(y)‖` relative.
pub fn ito_rule_defect(d: &dyn Fn(&CMatrix) -> CMatrix, x: &CMatrix, y: &CMatrix) -> Result<f64> {
    if x.shape() != y.shape() || !x.is_square() {
        return Err(Error::Shape("Ito rule needs square matrices of one size".into()));
    }
    let (dx, dy) = (d(x), d(y));
    let lhs = d(&(x * y));
    let rhs = &dx * y + x * &dy + &dx * &dy;
    Ok(relative_defect(&lhs, &rhs))
}

/// `x ↦ g x g^{-1}`.
pub fn conjugation_hom(g: &CMatrix) -> Result<MatrixMap> {
    let gi = g.inv()?;
    let g = g.clone();
    Ok(Box::new(move |x: &CMatrix| &g * x * &gi))
}

/// The law-induced identity
/// `x⋆(y▷z) - (x⋆y)▷(x⋆z) = (x⋆y)▷z + y▷(x⋆z)` with `x⋆w = (x▷w) - w`.
pub fn ld_ito_defect_raw<L: BinaryLaw<Elem = C64>>(law: &L, x: C64, y: C64, z: C64) -> Result<f64> {
    // differences at round-off level are snapped to 0, since `▷` takes roots of them
    let st = |w: C64| -> Result<C64> {
        let v = law.apply(&x, &w)?;
        let d = v - w;
        Ok(if d.norm() <= 8.0 * f64::EPSILON * v.norm().max(w.norm()) { ZERO } else { d })
    };
    let yz = law.apply(&y, &z)?;
    let xy = st(y)?;
    let xz = st(z)?;
    let lhs = st(yz)? - law.apply(&xy, &xz)?;
    let rhs = law.apply(&xy, &z)? + law.apply(&y, &xz)?;
    Ok(scalar_distance(lhs, rhs))
}

/// [`ld_ito_defect_raw`] after confirming R3 on `validation` samples.
pub fn ld_ito_defect<L: BinaryLaw<Elem = C64>>(
    law: &L,
    x: C64,
    y: C64,
    z: C64,
    validation: &[C64],
    tol: f64,
) -> Result<f64> {
    let rep = axiom_report(law, validation, tol)?;
    if !rep.flags.r3 {
        return Err(Error::Precondition(format!(
            "law fails left distributivity on validation samples (defect {:e})",
            rep.max_r3
        )));
    }
    ld_ito_defect_raw(law, x, y, z)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn c(re: f64, im: f64) -> C64 {
        C64::new(re, im)
    }

    #[test]
    fn scalar_examples() {
        let half = ExponentPair::new(0.5, 0.5);
        assert!((scalar_star(c(4.0, 0.0), c(9.0, 0.0), half).unwrap() - c(6.0, 0.0)).norm() < 1e-15);
        assert!((scalar_star(c(-1.0, 0.0), c(1.0, 0.0), half).unwrap() - c(0.0, 1.0)).norm() < 1e-15);
        let z = c(-0.3, 1.7);
        let e = ExponentPair::new(0.3, 0.7);
        assert!(scalar_distance(scalar_star(z, z, e).unwrap(), z) < 1e-15);
        assert!(scalar_star(ZERO, ONE, ExponentPair::new(-1.0, 2.0)).is_err());
    }

    #[test]
    fn quandle_flag_is_exact() {
        assert!(ExponentPair::new(0.5, 0.5).is_quandle());
        assert!(!ExponentPair::new(0.7, 0.7).is_quandle());
    }

    #[test]
    fn positive_reals_pass_every_axiom() {
        let law = ScalarSystem::new(Carrier::PositiveReal, ExponentPair::new(0.3, 0.7));
        let rep = axiom_report(&law, &Carrier::PositiveReal.samples(40, 3), 1e-10).unwrap();
        assert!(rep.flags.all(), "{:?}", rep.witnesses);
        assert_eq!(rep.carrier_violations, 0);
    }

    #[test]
    fn r1_fails_off_the_line() {
        let law = ScalarSystem::new(Carrier::ComplexNonzero, ExponentPair::new(0.7, 0.7));
        let rep = axiom_report(&law, &Carrier::ComplexNonzero.samples(50, 4), 1e-10).unwrap();
        assert!(!rep.flags.r1);
        assert!(rep.witnesses.iter().any(|w| w.axiom == "R1"));
    }

    #[test]
    fn single_idempotent_sample() {
        let law = ScalarSystem::new(Carrier::Complex, ExponentPair::new(0.4, 0.6));
        let rep = axiom_report(&law, &[ONE], 1e-12).unwrap();
        assert!(rep.flags.r1 && rep.flags.r3);
        assert!(matches!(axiom_report(&law, &[], 1e-12), Err(Error::Precondition(_))));
    }

    #[test]
    fn group_variants() {
        let g = c(0.5, 2.0);
        let h = c(-1.0, 0.3);
        assert_eq!(group_quandle(&g, &g, GroupVariant::Conjugation).unwrap(), g);
        let core = group_quandle(&g, &h, GroupVariant::Core).unwrap();
        assert!((core - g * g / h).norm() < 1e-14);
        assert!(group_quandle(&g, &ZERO, GroupVariant::Core).is_err());
        let m = CMatrix::from_fn(2, 2, |i, j| c((i + 2 * j) as f64, 0.0));
        let r = group_quandle(&m, &m, GroupVariant::InverseConjugation).unwrap();
        assert!(relative_defect(&r, &m) < 1e-14);
        let singular = CMatrix::from_element(2, 2, ONE);
        assert!(matches!(group_quandle(&m, &singular, GroupVariant::Core), Err(Error::Singular(_))));
    }

    #[test]
    fn core_quandle_on_nonzero_complex() {
        let law = GroupQuandle::<C64>::new(GroupVariant::Core);
        let rep = axiom_report(&law, &Carrier::ComplexNonzero.samples(50, 9), 1e-9).unwrap();
        assert!(rep.flags.r1 && rep.flags.r3 && rep.flags.r2);
    }

    #[test]
    fn schur_examples() {
        let e = ExponentPair::new(0.25, 0.75);
        let x = CMatrix::from_fn(3, 3, |i, j| c(1.0 + (i * 3 + j) as f64, 0.0));
        assert!(relative_defect(&schur_star(&x, &x, e).unwrap(), &x) < 1e-14);
        let ones = CMatrix::from_element(3, 3, ONE);
        assert_eq!(schur_star(&ones, &ones, e).unwrap(), ones);
    }

    #[test]
    fn ito_from_identity_is_zero() {
        let d = ItoDerivative::from_homomorphism(Box::new(|x: &CMatrix| x.clone()), 3, 1, 1e-10).unwrap();
        let x = Sampler::new(2).complex_gaussian_matrix(3, 3);
        assert_eq!(d.apply(&x), CMatrix::zeros(3, 3));
        assert_eq!(d.apply(&CMatrix::identity(3, 3)), CMatrix::zeros(3, 3));
    }

    #[test]
    fn transpose_is_rejected_as_a_homomorphism() {
        let r = ItoDerivative::from_homomorphism(Box::new(|x: &CMatrix| x.transpose()), 3, 1, 1e-10);
        assert!(matches!(r, Err(Error::Precondition(_))));
    }

    #[test]
    fn ld_ito_idempotent_collapse() {
        let law = ScalarSystem::new(Carrier::Complex, ExponentPair::new(0.5, 0.5));
        let a = c(0.3, -1.2);
        assert!(ld_ito_defect_raw(&law, a, a, a).unwrap() < 1e-14);
    }
}
