//! The fidelity product `a*b = (b^½ a b^½)^½`, its normalized form `⊘`, and defect
//! functionals for the quandle axioms.

use serde::{Deserialize, Serialize};

use crate::error::{check_same_dim, Error, Result};
use crate::operator::{
    relative_commutator, relative_defect, CMatrix, DensityOperator, HermitianMatrix, PositiveOperator,
    Spectral, StrictlyPositiveOperator, ToleranceProfile,
};

/// Trace below which two densities are treated as having orthogonal supports.
pub const ORTHOGONALITY_FLOOR: f64 = 1e-12;

/// `a*b = (b^½ a b^½)^½`, as the polar modulus `|Z| = (Z^H Z)^½` of `Z = a^½ b^½`.
///
/// Working on `Z` keeps singular values accurate to `ε‖Z‖`, where the sandwich route only
/// reaches `√ε` on rank-deficient inputs.
pub fn star(a: &PositiveOperator, b: &PositiveOperator) -> Result<PositiveOperator> {
    check_same_dim(a.dim(), b.dim())?;
    let z = a.sqrt().matrix() * b.sqrt().matrix();
    let (sigma, v) = right_singular(z)?;
    Ok(PositiveOperator::from_spectral(sigma, v))
}

const JACOBI_SWEEPS: usize = 60;

/// One-sided Jacobi SVD: singular values and right singular vectors of `g`.
///
/// Used instead of nalgebra's complex SVD, which can miss a singular value by ~1e-4 when
/// two of them nearly coincide.
fn right_singular(mut g: CMatrix) -> Result<(Vec<f64>, CMatrix)> {
    let n = g.ncols();
    let tol = n as f64 * f64::EPSILON;
    let mut v = CMatrix::identity(n, n);
    for _ in 0..JACOBI_SWEEPS {
        let mut rotated = false;
        for p in 0..n {
            for q in p + 1..n {
                let alpha = g.column(p).norm_squared();
                let beta = g.column(q).norm_squared();
                let gamma = g.column(p).dotc(&g.column(q));
                let mag = gamma.norm();
                if mag <= tol * (alpha * beta).sqrt() || mag == 0.0 {
                    continue;
                }
                rotated = true;
                // rotate the phase out of column q so the 2x2 Gram block is real
                let phase = gamma.conj() / mag;
                let zeta = (beta - alpha) / (2.0 * mag);
                let t = zeta.signum() / (zeta.abs() + (1.0 + zeta * zeta).sqrt());
                let c = 1.0 / (1.0 + t * t).sqrt();
                let s = c * t;
                for m in [&mut g, &mut v] {
                    for r in 0..m.nrows() {
                        let x = m[(r, p)];
                        let y = m[(r, q)] * phase;
                        m[(r, p)] = x * c - y * s;
                        m[(r, q)] = x * s + y * c;
                    }
                }
            }
        }
        if !rotated {
            let sigma = (0..n).map(|j| g.column(j).norm()).collect();
            return Ok((sigma, v));
        }
    }
    Err(Error::Numerical(format!("Jacobi SVD did not converge in {JACOBI_SWEEPS} sweeps")))
}

/// Reference route `(b^½ a b^½)^½` through an eigendecomposition of the sandwich.
pub fn star_by_eigen(a: &PositiveOperator, b: &PositiveOperator) -> Result<PositiveOperator> {
    check_same_dim(a.dim(), b.dim())?;
    let rb = b.sqrt();
    let inner = rb.matrix() * a.matrix() * rb.matrix();
    let p = PositiveOperator::from_product(&inner).map_err(|e| Error::Numerical(format!("b^½ a b^½: {e}")))?;
    Ok(p.sqrt())
}

/// Which argument order the infix `x*y` denotes.
///
/// `Defining` reads `x*y` as `star(x, y) = (y^½ x y^½)^½`; `Transposed` reads it as
/// `star(y, x) = (x^½ y x^½)^½`. Some identities hold only in one reading.
#[derive(Clone, Copy, Debug, Default, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum Orientation {
    #[default]
    Defining,
    Transposed,
}

impl Orientation {
    pub fn apply(self, x: &PositiveOperator, y: &PositiveOperator) -> Result<PositiveOperator> {
        match self {
            Orientation::Defining => star(x, y),
            Orientation::Transposed => star(y, x),
        }
    }
}

/// `a ⊘ b = (a*b) / tr(a*b)`.
pub fn oslash(a: &DensityOperator, b: &DensityOperator) -> Result<DensityOperator> {
    let s = star(a, b)?;
    let t = s.trace();
    if !(t > ORTHOGONALITY_FLOOR) {
        return Err(Error::OrthogonalSupport {
            trace: t,
            floor: ORTHOGONALITY_FLOOR,
        });
    }
    DensityOperator::normalized(&s)
}

/// `[a,b]_* = a*b - b*a`.
pub fn star_commutator(a: &PositiveOperator, b: &PositiveOperator) -> Result<HermitianMatrix> {
    let ab = star(a, b)?;
    let ba = star(b, a)?;
    Ok(HermitianMatrix::symmetrized(&(ab.matrix() - ba.matrix())))
}

/// Relative norm of the star-commutator, on the same scale as [`relative_commutator`].
pub fn relative_star_commutator(a: &PositiveOperator, b: &PositiveOperator) -> Result<f64> {
    let ab = star(a, b)?;
    let ba = star(b, a)?;
    Ok(relative_defect(ab.matrix(), ba.matrix()))
}

/// Solves `b = a*c` for `c`.
///
/// `b = a*c` means `c^½ a c^½ = b²`; the positive solution is `c = s²` with
/// `s = a^{-½} (a^½ b² a^½)^½ a^{-½}`.
pub fn r2_solve(a: &StrictlyPositiveOperator, b: &PositiveOperator) -> Result<PositiveOperator> {
    check_same_dim(a.dim(), b.dim())?;
    let inv_half = a.power(-0.5)?;
    let b2 = b.power(2.0)?;
    let mid = star(&b2, a)?;
    let s = inv_half.matrix() * mid.matrix() * inv_half.matrix();
    let s = PositiveOperator::from_product(&s)?;
    s.power(2.0)
}

/// `‖a*c - b‖` relative, for `c = r2_solve(a, b)`.
pub fn r2_residual(a: &StrictlyPositiveOperator, b: &PositiveOperator) -> Result<f64> {
    let c = r2_solve(a, b)?;
    Ok(relative_defect(star(a, &c)?.matrix(), b.matrix()))
}

/// `‖a*a - a‖` relative.
pub fn r1_defect(a: &PositiveOperator) -> Result<f64> {
    Ok(relative_defect(star(a, a)?.matrix(), a.matrix()))
}

/// R3 is `x*(y*z) = (x*y)*(x*z)`; R3' is `(y*z)*x = (y*x)*(z*x)`.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum Side {
    Left,
    Right,
}

/// Operands assigned to the slots `(x, y, z)` and the distributive law to test.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct PlacementAssignment {
    pub slots: [usize; 3],
    pub side: Side,
}

/// The six permutations of `(0, 1, 2)` in lexicographic order.
pub const PERMUTATIONS: [[usize; 3]; 6] = [[0, 1, 2], [0, 2, 1], [1, 0, 2], [1, 2, 0], [2, 0, 1], [2, 1, 0]];

impl PlacementAssignment {
    /// The six permutations for one side, lexicographic in `slots`.
    pub fn all(side: Side) -> Vec<Self> {
        PERMUTATIONS.iter().map(|&slots| Self { slots, side }).collect()
    }

    pub fn is_distinct(&self) -> bool {
        let [i, j, k] = self.slots;
        i != j && j != k && i != k
    }
}

/// Both sides of the instantiated law.
fn law_sides(
    ops: &[&PositiveOperator],
    slots: [usize; 3],
    side: Side,
) -> Result<(PositiveOperator, PositiveOperator)> {
    let [x, y, z] = slots.map(|i| ops[i]);
    Ok(match side {
        Side::Left => (star(x, &star(y, z)?)?, star(&star(x, y)?, &star(x, z)?)?),
        Side::Right => (star(&star(y, z)?, x)?, star(&star(y, x)?, &star(z, x)?)?),
    })
}

/// Relative defect of R3 or R3' with `(a, b, c)` placed per `placement`.
pub fn r3_defect(
    a: &PositiveOperator,
    b: &PositiveOperator,
    c: &PositiveOperator,
    placement: PlacementAssignment,
) -> Result<f64> {
    check_same_dim(a.dim(), b.dim())?;
    check_same_dim(a.dim(), c.dim())?;
    if placement.slots.iter().any(|&s| s > 2) {
        return Err(Error::Shape("placement slot out of range".into()));
    }
    let (l, r) = law_sides(&[a, b, c], placement.slots, placement.side)?;
    Ok(relative_defect(l.matrix(), r.matrix()))
}

/// `‖b*c - b^¼ c^½ b^¼‖` relative.
pub fn quarter_form_defect(b: &StrictlyPositiveOperator, c: &PositiveOperator) -> Result<f64> {
    check_same_dim(b.dim(), c.dim())?;
    let q = b.power(0.25)?;
    let rhs = q.matrix() * c.sqrt().matrix() * q.matrix();
    Ok(relative_defect(star(b, c)?.matrix(), &rhs))
}

/// Largest gap between the sorted spectra of `a*b` and `b*a`, each freshly diagonalized.
pub fn spectrum_match(a: &PositiveOperator, b: &PositiveOperator) -> Result<f64> {
    let ab = Spectral::of(star(a, b)?.matrix()).values;
    let ba = Spectral::of(star(b, a)?.matrix()).values;
    Ok(ab.iter().zip(ba.iter()).map(|(x, y)| (x - y).abs()).fold(0.0, f64::max))
}

/// Residuals `(‖XY - I‖, ‖YX - I‖)` for both readings of the infix product.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct InversePairDefect {
    /// `X^½ = (a*b) * a^{-1}` with the infix read as [`Orientation::Transposed`].
    pub transposed: (f64, f64),
    /// `X^½ = a^{-1} * (a*b)` with the infix read as [`Orientation::Defining`].
    pub defining: (f64, f64),
}

/// `X^½ = a^{-1}⋄(a⋄b)`, `Y^½ = b^{-1}⋄(b⋄a)` with `⋄` the infix in `orientation`.
pub fn inverse_pair(
    a: &StrictlyPositiveOperator,
    b: &StrictlyPositiveOperator,
    orientation: Orientation,
) -> Result<(CMatrix, CMatrix)> {
    check_same_dim(a.dim(), b.dim())?;
    let half = |p: &PositiveOperator, q: &PositiveOperator| -> Result<PositiveOperator> {
        let inner = orientation.apply(p, q)?;
        orientation.apply(&p.inverse()?, &inner)
    };
    let x = half(a, b)?.power(2.0)?;
    let y = half(b, a)?.power(2.0)?;
    Ok((x.matrix().clone(), y.matrix().clone()))
}

pub fn inverse_pair_defect(a: &StrictlyPositiveOperator, b: &StrictlyPositiveOperator) -> Result<InversePairDefect> {
    let residuals = |o| -> Result<(f64, f64)> {
        let (x, y) = inverse_pair(a, b, o)?;
        let id = CMatrix::identity(a.dim(), a.dim());
        Ok((relative_defect(&(&x * &y), &id), relative_defect(&(&y * &x), &id)))
    };
    Ok(InversePairDefect {
        transposed: residuals(Orientation::Transposed)?,
        defining: residuals(Orientation::Defining)?,
    })
}

/// `max(0, -λ_min(x⋄b - x⋄a))` for `a <= b`, with `⋄` the infix in `orientation`.
pub fn monotonicity_defect(
    a: &PositiveOperator,
    b: &PositiveOperator,
    x: &PositiveOperator,
    orientation: Orientation,
    tol: &ToleranceProfile,
) -> Result<f64> {
    check_same_dim(a.dim(), b.dim())?;
    check_same_dim(a.dim(), x.dim())?;
    if !crate::operator::loewner_leq(a.as_hermitian(), b.as_hermitian(), tol.psd_tol)? {
        return Err(Error::Precondition("monotonicity needs a <= b in the Loewner order".into()));
    }
    let xa = orientation.apply(x, a)?;
    let xb = orientation.apply(x, b)?;
    let diff = xb.matrix() - xa.matrix();
    let lo = Spectral::of(&crate::operator::symmetrize(&diff)).values[0];
    Ok((-lo).max(0.0))
}

/// `(‖[X, X^H]‖, ‖[b, c]‖)` relative, with `X = b^½ c^½`.
pub fn normal_factor_check(b: &PositiveOperator, c: &PositiveOperator) -> Result<(f64, f64)> {
    check_same_dim(b.dim(), c.dim())?;
    let x = b.sqrt().matrix() * c.sqrt().matrix();
    let xh = x.adjoint();
    Ok((relative_commutator(&x, &xh)?, relative_commutator(b.matrix(), c.matrix())?))
}

/// Which placements [`braidable`] enumerates.
#[derive(Clone, Copy, Debug, Default, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum PlacementPolicy {
    #[default]
    LeftOnly,
    BothSides,
}

impl PlacementPolicy {
    pub fn sides(self) -> &'static [Side] {
        match self {
            PlacementPolicy::LeftOnly => &[Side::Left],
            PlacementPolicy::BothSides => &[Side::Left, Side::Right],
        }
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct PlacementRecord {
    pub slots: [usize; 3],
    pub side: Side,
    /// All three slots hold different list positions.
    pub distinct: bool,
    pub defect: f64,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct PairRecord {
    pub pair: [usize; 2],
    pub commutator: f64,
    pub star_commutator: f64,
}

/// Per-placement defects for one operator list.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct DefectReport {
    /// Ordered triples with repetition, lexicographic, left side before right side.
    pub placements: Vec<PlacementRecord>,
    pub commutators: Vec<PairRecord>,
    pub max_defect: f64,
    pub min_defect: f64,
    pub max_distinct_defect: f64,
    pub min_distinct_defect: f64,
    /// Every placement below `tol`.
    pub verdict: bool,
    /// Every placement with three distinct positions below `tol`.
    pub verdict_distinct: bool,
    pub tol: f64,
    pub dim: usize,
    pub seed: Option<u64>,
    pub policy: PlacementPolicy,
}

impl DefectReport {
    pub fn max_commutator(&self) -> f64 {
        self.commutators.iter().map(|p| p.commutator).fold(0.0, f64::max)
    }
}

/// Tests R3 (and R3' under [`PlacementPolicy::BothSides`]) on every ordered triple drawn
/// with repetition from `ops`.
pub fn braidable(ops: &[PositiveOperator], tol: f64, policy: PlacementPolicy) -> Result<(bool, DefectReport)> {
    let n = ops.len();
    if n == 0 {
        return Err(Error::Shape("braidable needs at least one operator".into()));
    }
    let dim = ops[0].dim();
    for op in ops {
        check_same_dim(dim, op.dim())?;
    }
    // products[i][j] = ops[i] * ops[j]
    let mut products = Vec::with_capacity(n);
    for x in ops {
        let row: Result<Vec<_>> = ops.iter().map(|y| star(x, y)).collect();
        products.push(row?);
    }
    let mut placements = Vec::with_capacity(n * n * n * policy.sides().len());
    for &side in policy.sides() {
        for i in 0..n {
            for j in 0..n {
                for k in 0..n {
                    let (l, r) = match side {
                        Side::Left => (star(&ops[i], &products[j][k])?, star(&products[i][j], &products[i][k])?),
                        Side::Right => (star(&products[j][k], &ops[i])?, star(&products[j][i], &products[k][i])?),
                    };
                    placements.push(PlacementRecord {
                        slots: [i, j, k],
                        side,
                        distinct: i != j && j != k && i != k,
                        defect: relative_defect(l.matrix(), r.matrix()),
                    });
                }
            }
        }
    }
    let mut commutators = Vec::new();
    for i in 0..n {
        for j in i + 1..n {
            commutators.push(PairRecord {
                pair: [i, j],
                commutator: relative_commutator(ops[i].matrix(), ops[j].matrix())?,
                star_commutator: relative_defect(products[i][j].matrix(), products[j][i].matrix()),
            });
        }
    }
    let fold = |distinct_only: bool| {
        placements
            .iter()
            .filter(|p| !distinct_only || p.distinct)
            .fold((0.0_f64, f64::INFINITY), |(hi, lo), p| (hi.max(p.defect), lo.min(p.defect)))
    };
    let (max_defect, min_defect) = fold(false);
    let (max_distinct_defect, min_distinct_defect) = fold(true);
    let verdict = max_defect < tol;
    let report = DefectReport {
        placements,
        commutators,
        max_defect,
        min_defect,
        max_distinct_defect,
        min_distinct_defect,
        verdict,
        verdict_distinct: max_distinct_defect < tol,
        tol,
        dim,
        seed: None,
        policy,
    };
    Ok((verdict, report))
}
