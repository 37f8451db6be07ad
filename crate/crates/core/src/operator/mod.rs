//! Finite-dimensional Hermitian and positive operators.
//!
//! Every positive operator carries its own spectral decomposition, computed once at
//! construction. Matrix functions (`A^p`, functional calculus) reuse it, so repeated
//! square roots of the same operand never re-diagonalize.

mod functions;
pub mod io;
pub mod random;

use nalgebra::{DMatrix, DVector, SymmetricEigen};
use num_complex::Complex64;
use serde::{Deserialize, Serialize};
use std::ops::Deref;

use crate::error::{Error, Result};

pub use functions::{
    anticommutator, commutator, loewner_leq, matrix_power, principal_power, relative_commutator,
    schur_power, schur_product, schur_product_matrix,
};

pub type C64 = Complex64;
pub type CMatrix = DMatrix<Complex64>;

pub const ZERO: C64 = C64::new(0.0, 0.0);
pub const ONE: C64 = C64::new(1.0, 0.0);

/// Tolerances shared by validation and verdicts.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct ToleranceProfile {
    pub hermitian_tol: f64,
    pub psd_tol: f64,
    pub axiom_tol: f64,
    pub strict_floor: f64,
}

impl Default for ToleranceProfile {
    fn default() -> Self {
        Self {
            hermitian_tol: 1e-10,
            psd_tol: 1e-10,
            axiom_tol: 1e-8,
            strict_floor: 1e-8,
        }
    }
}

impl ToleranceProfile {
    pub fn new(hermitian_tol: f64, psd_tol: f64, axiom_tol: f64, strict_floor: f64) -> Result<Self> {
        let profile = Self {
            hermitian_tol,
            psd_tol,
            axiom_tol,
            strict_floor,
        };
        profile.validate()?;
        Ok(profile)
    }

    /// Default profile with a different verdict threshold.
    pub fn with_axiom_tol(axiom_tol: f64) -> Result<Self> {
        let d = Self::default();
        Self::new(d.hermitian_tol, d.psd_tol, axiom_tol, d.strict_floor)
    }

    pub fn validate(&self) -> Result<()> {
        let all = [
            ("hermitian_tol", self.hermitian_tol),
            ("psd_tol", self.psd_tol),
            ("axiom_tol", self.axiom_tol),
            ("strict_floor", self.strict_floor),
        ];
        for (name, v) in all {
            if !(v.is_finite() && v > 0.0) {
                return Err(Error::Tolerance(format!("{name} must be finite and > 0, got {v}")));
            }
        }
        if self.axiom_tol < self.hermitian_tol {
            return Err(Error::Tolerance(format!(
                "axiom_tol {} must be >= hermitian_tol {}",
                self.axiom_tol, self.hermitian_tol
            )));
        }
        Ok(())
    }
}

/// Frobenius norm.
pub fn frobenius(m: &CMatrix) -> f64 {
    m.norm()
}

/// `||L - R||_F / max(1, ||L||_F + ||R||_F)`; the defect measure used everywhere.
pub fn relative_defect(lhs: &CMatrix, rhs: &CMatrix) -> f64 {
    frobenius(&(lhs - rhs)) / f64::max(1.0, frobenius(lhs) + frobenius(rhs))
}

pub fn trace(m: &CMatrix) -> C64 {
    m.diagonal().iter().sum()
}

/// Largest entry of `|A - A^H|`.
pub fn max_hermitian_deviation(m: &CMatrix) -> f64 {
    let n = m.nrows();
    let mut worst = 0.0f64;
    for i in 0..n {
        for j in i..n {
            worst = worst.max((m[(i, j)] - m[(j, i)].conj()).norm());
        }
    }
    worst
}

pub(crate) fn symmetrize(m: &CMatrix) -> CMatrix {
    (m + m.adjoint()).scale(0.5)
}

fn require_square(m: &CMatrix) -> Result<usize> {
    if m.nrows() != m.ncols() {
        return Err(Error::Shape(format!("matrix is not square: {}x{}", m.nrows(), m.ncols())));
    }
    if m.nrows() == 0 {
        return Err(Error::Shape("dimension must be at least 1".into()));
    }
    Ok(m.nrows())
}

/// A square complex matrix equal to its conjugate transpose.
#[derive(Clone, Debug, PartialEq)]
pub struct HermitianMatrix {
    m: CMatrix,
}

impl HermitianMatrix {
    /// Validates Hermiticity within `tol` and stores the exactly symmetrized matrix.
    pub fn new(m: CMatrix, tol: f64) -> Result<Self> {
        require_square(&m)?;
        let dev = max_hermitian_deviation(&m);
        if dev.is_nan() || dev > tol {
            return Err(Error::HermitianViolation { max_deviation: dev, tol });
        }
        Ok(Self { m: symmetrize(&m) })
    }

    pub(crate) fn symmetrized(m: &CMatrix) -> Self {
        Self { m: symmetrize(m) }
    }

    pub fn identity(dim: usize) -> Self {
        Self { m: CMatrix::identity(dim, dim) }
    }

    pub fn from_real_diagonal(diag: &[f64]) -> Result<Self> {
        if diag.is_empty() {
            return Err(Error::Shape("dimension must be at least 1".into()));
        }
        let v = DVector::from_iterator(diag.len(), diag.iter().map(|&x| C64::new(x, 0.0)));
        Ok(Self { m: CMatrix::from_diagonal(&v) })
    }

    /// Builds from real row-major entries.
    pub fn from_real_rows(rows: &[&[f64]]) -> Result<Self> {
        let n = rows.len();
        if rows.iter().any(|r| r.len() != n) {
            return Err(Error::Shape("rows must form a square matrix".into()));
        }
        let m = CMatrix::from_fn(n, n, |i, j| C64::new(rows[i][j], 0.0));
        Self::new(m, ToleranceProfile::default().hermitian_tol)
    }

    pub fn dim(&self) -> usize {
        self.m.nrows()
    }

    pub fn matrix(&self) -> &CMatrix {
        &self.m
    }

    pub fn into_matrix(self) -> CMatrix {
        self.m
    }

    pub fn trace(&self) -> f64 {
        trace(&self.m).re
    }

    /// Ascending eigenvalues.
    pub fn eigenvalues(&self) -> Vec<f64> {
        Spectral::of(&self.m).values.iter().copied().collect()
    }

    pub fn min_eigenvalue(&self) -> f64 {
        self.eigenvalues()[0]
    }
}

/// Eigendecomposition `A = U diag(values) U^H` with ascending values.
#[derive(Clone, Debug, PartialEq)]
pub struct Spectral {
    pub values: DVector<f64>,
    pub vectors: CMatrix,
}

impl Spectral {
    pub fn of(hermitian: &CMatrix) -> Self {
        let eig = SymmetricEigen::new(hermitian.clone());
        Self::sorted(eig.eigenvalues, eig.eigenvectors)
    }

    fn sorted(values: DVector<f64>, vectors: CMatrix) -> Self {
        let n = values.len();
        let mut order: Vec<usize> = (0..n).collect();
        order.sort_by(|&i, &j| values[i].total_cmp(&values[j]));
        let values = DVector::from_iterator(n, order.iter().map(|&i| values[i]));
        let vectors = CMatrix::from_fn(vectors.nrows(), n, |r, c| vectors[(r, order[c])]);
        Self { values, vectors }
    }

    /// `U diag(f(λ)) U^H`.
    pub fn apply(&self, f: impl Fn(f64) -> f64) -> CMatrix {
        let mut scaled = self.vectors.clone();
        for (j, &lambda) in self.values.iter().enumerate() {
            let fl = f(lambda);
            scaled.column_mut(j).scale_mut(fl);
        }
        symmetrize(&(scaled * self.vectors.adjoint()))
    }
}

/// Hermitian positive-semidefinite operator with its cached spectral decomposition.
///
/// Eigenvalues in `[-tol, 0)` are clamped to zero at construction, so powers never
/// see round-off negatives.
#[derive(Clone, Debug)]
pub struct PositiveOperator {
    h: HermitianMatrix,
    spectral: Spectral,
}

impl PartialEq for PositiveOperator {
    fn eq(&self, other: &Self) -> bool {
        self.h == other.h
    }
}

impl PositiveOperator {
    pub fn new(m: CMatrix, tol: &ToleranceProfile) -> Result<Self> {
        let h = HermitianMatrix::new(m, tol.hermitian_tol)?;
        Self::from_hermitian(h, tol.psd_tol)
    }

    /// Checks `λ_min >= -psd_tol * max(1, λ_max)`.
    pub fn from_hermitian(h: HermitianMatrix, psd_tol: f64) -> Result<Self> {
        let spectral = Spectral::of(&h.m);
        Self::from_parts(h, spectral, psd_tol)
    }

    fn from_parts(h: HermitianMatrix, mut spectral: Spectral, psd_tol: f64) -> Result<Self> {
        let n = spectral.values.len();
        let lo = spectral.values[0];
        let hi = spectral.values[n - 1];
        if !lo.is_finite() || !hi.is_finite() {
            return Err(Error::Numerical("non-finite eigenvalue".into()));
        }
        let tol = psd_tol * f64::max(1.0, hi.abs());
        if lo < -tol {
            return Err(Error::NegativeEigenvalue { min_eigenvalue: lo, tol });
        }
        let mut clamped = false;
        for v in spectral.values.iter_mut() {
            if *v < 0.0 {
                *v = 0.0;
                clamped = true;
            }
        }
        let h = if clamped {
            HermitianMatrix { m: spectral.apply(|x| x) }
        } else {
            h
        };
        Ok(Self { h, spectral })
    }

    /// Assembles `U diag(values) U^H` from a known decomposition; values must be >= 0.
    pub(crate) fn from_spectral(values: Vec<f64>, vectors: CMatrix) -> Self {
        let spectral = Spectral::sorted(DVector::from_vec(values), vectors);
        let m = spectral.apply(|x| x.max(0.0));
        let mut spectral = spectral;
        spectral.values.iter_mut().for_each(|v| *v = v.max(0.0));
        Self {
            h: HermitianMatrix { m },
            spectral,
        }
    }

    /// Internal constructor for products known to be positive up to round-off.
    pub(crate) fn from_product(m: &CMatrix) -> Result<Self> {
        Self::from_hermitian(HermitianMatrix::symmetrized(m), ToleranceProfile::default().psd_tol)
    }

    pub fn identity(dim: usize) -> Self {
        Self::from_spectral(vec![1.0; dim], CMatrix::identity(dim, dim))
    }

    pub fn from_diagonal(diag: &[f64]) -> Result<Self> {
        Self::from_hermitian(HermitianMatrix::from_real_diagonal(diag)?, ToleranceProfile::default().psd_tol)
    }

    /// Builds `U diag(spectrum) U^H` for a unitary `U` with a nonnegative spectrum.
    pub fn with_basis(basis: &CMatrix, spectrum: &[f64]) -> Result<Self> {
        if basis.nrows() != basis.ncols() || basis.nrows() != spectrum.len() {
            return Err(Error::Shape("basis and spectrum sizes differ".into()));
        }
        if let Some(&bad) = spectrum.iter().find(|&&x| !(x >= 0.0)) {
            return Err(Error::Domain(format!("spectrum value {bad} is negative")));
        }
        Ok(Self::from_spectral(spectrum.to_vec(), basis.clone()))
    }

    pub fn dim(&self) -> usize {
        self.h.dim()
    }

    pub fn matrix(&self) -> &CMatrix {
        &self.h.m
    }

    pub fn as_hermitian(&self) -> &HermitianMatrix {
        &self.h
    }

    pub fn spectral(&self) -> &Spectral {
        &self.spectral
    }

    pub fn eigenvalues(&self) -> &[f64] {
        self.spectral.values.as_slice()
    }

    pub fn min_eigenvalue(&self) -> f64 {
        self.spectral.values[0]
    }

    pub fn max_eigenvalue(&self) -> f64 {
        self.spectral.values[self.dim() - 1]
    }

    pub fn trace(&self) -> f64 {
        self.h.trace()
    }

    /// Numerically singular: `λ_min <= n ε max(1, λ_max)`.
    pub fn is_singular(&self) -> bool {
        let n = self.dim() as f64;
        self.min_eigenvalue() <= n * f64::EPSILON * f64::max(1.0, self.max_eigenvalue())
    }

    /// Principal power `U diag(λ^p) U^H`; `0^0 = 1`.
    pub fn power(&self, p: f64) -> Result<Self> {
        if !p.is_finite() {
            return Err(Error::Domain(format!("exponent {p} is not finite")));
        }
        if p < 0.0 && self.is_singular() {
            return Err(Error::Singular(format!(
                "negative power {p} of an operator with smallest eigenvalue {:e}",
                self.min_eigenvalue()
            )));
        }
        let values: Vec<f64> = self.spectral.values.iter().map(|&l| pow_nonneg(l, p)).collect();
        Ok(Self::from_spectral(values, self.spectral.vectors.clone()))
    }

    pub fn sqrt(&self) -> Self {
        self.power(0.5).expect("nonnegative power of a positive operator")
    }

    pub fn inverse(&self) -> Result<Self> {
        self.power(-1.0)
    }

    /// Functional calculus `f(A)`; fails when `f` maps a computed eigenvalue below `-psd_tol`.
    pub fn map_spectrum(&self, f: impl Fn(f64) -> f64, psd_tol: f64) -> Result<Self> {
        let mut values = Vec::with_capacity(self.dim());
        for &l in self.spectral.values.iter() {
            let v = f(l);
            if !v.is_finite() || v < -psd_tol {
                return Err(Error::Domain(format!("f({l}) = {v} leaves [0, inf)")));
            }
            values.push(v.max(0.0));
        }
        Ok(Self::from_spectral(values, self.spectral.vectors.clone()))
    }

    /// `λ A` for `λ >= 0`.
    pub fn scaled(&self, lambda: f64) -> Result<Self> {
        if !(lambda >= 0.0) {
            return Err(Error::Domain(format!("scale {lambda} must be nonnegative")));
        }
        let values = self.spectral.values.iter().map(|&l| l * lambda).collect();
        Ok(Self::from_spectral(values, self.spectral.vectors.clone()))
    }
}

pub(crate) fn pow_nonneg(x: f64, p: f64) -> f64 {
    if p == 0.0 {
        1.0
    } else if x == 0.0 {
        0.0
    } else {
        x.powf(p)
    }
}

/// Positive operator whose smallest eigenvalue is at least the strict floor.
#[derive(Clone, Debug, PartialEq)]
pub struct StrictlyPositiveOperator(PositiveOperator);

impl StrictlyPositiveOperator {
    pub fn new(p: PositiveOperator, floor: f64) -> Result<Self> {
        let lo = p.min_eigenvalue();
        if lo < floor {
            return Err(Error::BelowStrictFloor { min_eigenvalue: lo, floor });
        }
        Ok(Self(p))
    }

    pub fn with_default_floor(p: PositiveOperator) -> Result<Self> {
        Self::new(p, ToleranceProfile::default().strict_floor)
    }

    pub fn into_inner(self) -> PositiveOperator {
        self.0
    }
}

impl Deref for StrictlyPositiveOperator {
    type Target = PositiveOperator;
    fn deref(&self) -> &PositiveOperator {
        &self.0
    }
}

/// Density operator: positive with unit trace.
#[derive(Clone, Debug, PartialEq)]
pub struct DensityOperator(PositiveOperator);

pub const TRACE_TOL: f64 = 1e-10;

impl DensityOperator {
    pub fn new(p: PositiveOperator) -> Result<Self> {
        let deviation = (p.trace() - 1.0).abs();
        if !(deviation <= TRACE_TOL) {
            return Err(Error::TraceViolation { deviation, tol: TRACE_TOL });
        }
        Ok(Self(p))
    }

    /// `p / tr p`.
    pub fn normalized(p: &PositiveOperator) -> Result<Self> {
        let t = p.trace();
        if !(t > 0.0) {
            return Err(Error::Domain(format!("cannot normalize an operator of trace {t}")));
        }
        Ok(Self(p.scaled(1.0 / t)?))
    }

    pub fn from_diagonal(diag: &[f64]) -> Result<Self> {
        Self::new(PositiveOperator::from_diagonal(diag)?)
    }

    /// Pure state `v v^H / |v|^2`.
    pub fn pure(v: &[C64]) -> Result<Self> {
        let p = functions::projector(v)?;
        Ok(Self(p))
    }

    pub fn into_inner(self) -> PositiveOperator {
        self.0
    }

    pub fn as_positive(&self) -> &PositiveOperator {
        &self.0
    }
}

impl Deref for DensityOperator {
    type Target = PositiveOperator;
    fn deref(&self) -> &PositiveOperator {
        &self.0
    }
}
