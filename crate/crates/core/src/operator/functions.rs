use std::f64::consts::TAU;

use super::{
    frobenius, relative_defect, CMatrix, HermitianMatrix, PositiveOperator, Spectral, C64, ONE, ZERO,
};
use crate::error::{check_same_dim, Error, Result};

/// Principal power `A^p` of a positive operator.
pub fn matrix_power(a: &PositiveOperator, p: f64) -> Result<HermitianMatrix> {
    Ok(a.power(p)?.as_hermitian().clone())
}

fn check_shape(x: &CMatrix, y: &CMatrix) -> Result<()> {
    if x.shape() != y.shape() {
        return Err(Error::Shape(format!(
            "shape mismatch: {}x{} vs {}x{}",
            x.nrows(),
            x.ncols(),
            y.nrows(),
            y.ncols()
        )));
    }
    Ok(())
}

/// Entrywise product of two equally shaped matrices.
pub fn schur_product_matrix(x: &CMatrix, y: &CMatrix) -> Result<CMatrix> {
    check_shape(x, y)?;
    Ok(x.component_mul(y))
}

/// Entrywise product of Hermitian matrices, which is again Hermitian.
pub fn schur_product(x: &HermitianMatrix, y: &HermitianMatrix) -> Result<HermitianMatrix> {
    check_same_dim(x.dim(), y.dim())?;
    Ok(HermitianMatrix::symmetrized(&x.matrix().component_mul(y.matrix())))
}

/// `|z|^p exp(i p θ)` with the argument θ taken in `[0, 2π)`.
///
/// `0^p = 0` for `p > 0` and `0^0 = 1`; a zero base with `p < 0` is singular.
pub fn principal_power(z: C64, p: f64) -> Result<C64> {
    if z == ZERO {
        return if p > 0.0 {
            Ok(ZERO)
        } else if p == 0.0 {
            Ok(ONE)
        } else {
            Err(Error::Singular(format!("0^{p}")))
        };
    }
    let mut theta = z.im.atan2(z.re);
    if theta < 0.0 {
        theta += TAU;
    }
    if theta >= TAU {
        theta = 0.0;
    }
    let r = z.norm().powf(p);
    Ok(C64::from_polar(r, p * theta))
}

/// Entrywise principal power.
pub fn schur_power(x: &CMatrix, p: f64) -> Result<CMatrix> {
    let mut out = x.clone();
    for z in out.iter_mut() {
        *z = principal_power(*z, p)?;
    }
    Ok(out)
}

/// `[a, b] = ab - ba`.
pub fn commutator(a: &CMatrix, b: &CMatrix) -> Result<CMatrix> {
    check_shape(a, b)?;
    Ok(a * b - b * a)
}

/// `{a, b} = ab + ba`.
pub fn anticommutator(a: &CMatrix, b: &CMatrix) -> Result<CMatrix> {
    check_shape(a, b)?;
    Ok(a * b + b * a)
}

/// `||ab - ba||_F / max(1, ||ab||_F + ||ba||_F)`.
pub fn relative_commutator(a: &CMatrix, b: &CMatrix) -> Result<f64> {
    check_shape(a, b)?;
    Ok(relative_defect(&(a * b), &(b * a)))
}

/// Loewner order: `a <= b` iff `λ_min(b - a) >= -tol`.
pub fn loewner_leq(a: &HermitianMatrix, b: &HermitianMatrix, tol: f64) -> Result<bool> {
    check_same_dim(a.dim(), b.dim())?;
    let diff = b.matrix() - a.matrix();
    let spectral = Spectral::of(&diff);
    Ok(spectral.values[0] >= -tol)
}

/// Rank-one projector `v v^H / |v|^2`.
pub(crate) fn projector(v: &[C64]) -> Result<PositiveOperator> {
    let n = v.len();
    let norm2: f64 = v.iter().map(|z| z.norm_sqr()).sum();
    if n == 0 || !(norm2 > 0.0) {
        return Err(Error::Domain("projector needs a nonzero vector".into()));
    }
    let scale = norm2.sqrt();
    let unit: Vec<C64> = v.iter().map(|z| z / scale).collect();
    // Complete `unit` to an orthonormal basis so the decomposition is exact.
    let mut basis = CMatrix::zeros(n, n);
    basis.set_column(0, &nalgebra::DVector::from_vec(unit.clone()));
    let mut filled = 1;
    for k in 0..n {
        if filled == n {
            break;
        }
        let mut e = nalgebra::DVector::<C64>::zeros(n);
        e[k] = ONE;
        // two Gram-Schmidt passes keep the basis orthonormal to round-off
        for _ in 0..2 {
            for j in 0..filled {
                let col = basis.column(j).clone_owned();
                let overlap = col.dotc(&e);
                e -= col * overlap;
            }
        }
        let len = e.norm();
        if len > 1e-6 {
            basis.set_column(filled, &(e / C64::new(len, 0.0)));
            filled += 1;
        }
    }
    let mut spectrum = vec![0.0; n];
    spectrum[0] = 1.0;
    let p = PositiveOperator::from_spectral(spectrum, basis);
    debug_assert!(frobenius(p.matrix()).is_finite());
    Ok(p)
}
