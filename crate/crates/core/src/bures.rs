//! Bures distance, the world function `σ_B = 1 - tr(ρ₁*ρ₂)`, Γ forms and Gram
//! determinants of finite density families.

use nalgebra::DMatrix;
use serde::{Deserialize, Serialize};

use crate::error::{check_same_dim, Error, Result};
use crate::fidelity::star;
use crate::operator::DensityOperator;

/// Radicands down to this value are clamped to zero.
pub const RADICAND_FLOOR: f64 = -1e-10;

/// Reciprocal condition estimate below which a Gram matrix is flagged.
pub const ILL_CONDITIONED: f64 = 1e-10;

/// Gram 1-norm below which the family is treated as collapsed to a point.
pub const DEGENERATE_SCALE: f64 = 1e-10;

/// `tr(a*b)`.
pub fn fidelity(a: &DensityOperator, b: &DensityOperator) -> Result<f64> {
    Ok(star(a, b)?.trace())
}

/// `d_B(a,b) = (2 - 2 tr(a*b))^½`.
pub fn bures_distance(a: &DensityOperator, b: &DensityOperator) -> Result<f64> {
    let r = 2.0 - 2.0 * fidelity(a, b)?;
    if r < RADICAND_FLOOR {
        return Err(Error::Numerical(format!("Bures radicand {r:e} is negative")));
    }
    Ok(r.max(0.0).sqrt())
}

/// `σ_B(ρ₁, ρ₂) = 1 - tr(ρ₁*ρ₂)`, unclamped.
pub fn world_function(r1: &DensityOperator, r2: &DensityOperator) -> Result<f64> {
    Ok(1.0 - fidelity(r1, r2)?)
}

/// `Γ(P₀; Pᵢ, Pⱼ) = σ(P₀,Pᵢ) + σ(P₀,Pⱼ) - σ(Pᵢ,Pⱼ)`.
pub fn gamma(p0: &DensityOperator, pi: &DensityOperator, pj: &DensityOperator) -> Result<f64> {
    Ok(world_function(p0, pi)? + world_function(p0, pj)? - world_function(pi, pj)?)
}

#[derive(Clone, Debug)]
pub struct PointFamily {
    base: DensityOperator,
    points: Vec<DensityOperator>,
}

impl PointFamily {
    pub fn new(base: DensityOperator, points: Vec<DensityOperator>) -> Result<Self> {
        if points.is_empty() {
            return Err(Error::Shape("a point family needs at least one point besides the base".into()));
        }
        for p in &points {
            check_same_dim(base.dim(), p.dim())?;
        }
        Ok(Self { base, points })
    }

    /// First member is the base point.
    pub fn from_list(mut all: Vec<DensityOperator>) -> Result<Self> {
        if all.is_empty() {
            return Err(Error::Shape("empty family".into()));
        }
        let base = all.remove(0);
        Self::new(base, all)
    }

    pub fn base(&self) -> &DensityOperator {
        &self.base
    }

    pub fn points(&self) -> &[DensityOperator] {
        &self.points
    }

    /// `G_ij = Γ(P₀; Pᵢ, Pⱼ)`; symmetric by construction.
    pub fn gram(&self) -> Result<DMatrix<f64>> {
        let n = self.points.len();
        let s0: Vec<f64> = self
            .points
            .iter()
            .map(|p| world_function(&self.base, p))
            .collect::<Result<_>>()?;
        let mut g = DMatrix::zeros(n, n);
        for i in 0..n {
            for j in i..n {
                let sij = if i == j { 0.0 } else { world_function(&self.points[i], &self.points[j])? };
                let v = s0[i] + s0[j] - sij;
                g[(i, j)] = v;
                g[(j, i)] = v;
            }
        }
        Ok(g)
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct FamilyReport {
    /// `σ` between all members, base first.
    pub sigma_matrix: Vec<Vec<f64>>,
    pub gram: Vec<Vec<f64>>,
    pub determinant: f64,
    /// Flattened upper triangle of the Gram matrix, row-major.
    pub gammas: Vec<f64>,
    /// Reciprocal 1-norm condition estimate of the Gram matrix.
    pub rcond: f64,
    /// Small `rcond`, or a Gram matrix that is zero up to round-off.
    pub ill_conditioned: bool,
}

/// `F_n`: determinant of the Gram matrix via partial-pivot LU.
pub fn squared_length(f: &PointFamily) -> Result<f64> {
    Ok(f.gram()?.lu().determinant())
}

fn one_norm(m: &DMatrix<f64>) -> f64 {
    (0..m.ncols()).map(|j| m.column(j).iter().map(|x| x.abs()).sum::<f64>()).fold(0.0, f64::max)
}

pub fn family_report(f: &PointFamily) -> Result<FamilyReport> {
    let g = f.gram()?;
    let n = g.nrows();
    let lu = g.clone().lu();
    let determinant = lu.determinant();
    let rcond = match lu.try_inverse() {
        Some(inv) => {
            let d = one_norm(&g) * one_norm(&inv);
            if d.is_finite() && d > 0.0 {
                1.0 / d
            } else {
                0.0
            }
        }
        None => 0.0,
    };
    let all: Vec<&DensityOperator> = std::iter::once(f.base()).chain(f.points()).collect();
    let mut sigma_matrix = vec![vec![0.0; all.len()]; all.len()];
    for i in 0..all.len() {
        for j in 0..all.len() {
            if i != j {
                sigma_matrix[i][j] = world_function(all[i], all[j])?;
            }
        }
    }
    let gram: Vec<Vec<f64>> = (0..n).map(|i| (0..n).map(|j| g[(i, j)]).collect()).collect();
    let gammas = (0..n).flat_map(|i| (i..n).map(move |j| (i, j))).map(|(i, j)| g[(i, j)]).collect();
    Ok(FamilyReport {
        sigma_matrix,
        gram,
        determinant,
        gammas,
        rcond,
        ill_conditioned: rcond < ILL_CONDITIONED || one_norm(&g) < DEGENERATE_SCALE,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::operator::random::Sampler;
    use crate::operator::C64;

    fn pure(v: [f64; 2]) -> DensityOperator {
        DensityOperator::pure(&[C64::new(v[0], 0.0), C64::new(v[1], 0.0)]).unwrap()
    }

    #[test]
    fn distance_examples() {
        let rho = Sampler::new(1).density(3);
        assert!(bures_distance(&rho, &rho).unwrap() < 1e-7);
        assert!(world_function(&rho, &rho).unwrap().abs() < 1e-12);
        let d = bures_distance(&pure([1.0, 0.0]), &pure([0.0, 1.0])).unwrap();
        assert!((d - 2f64.sqrt()).abs() < 1e-12);
        let a = DensityOperator::from_diagonal(&[0.75, 0.25]).unwrap();
        let b = DensityOperator::from_diagonal(&[0.25, 0.75]).unwrap();
        assert!((bures_distance(&a, &b).unwrap() - (2.0 - 3f64.sqrt()).sqrt()).abs() < 1e-12);
    }

    #[test]
    fn gamma_degenerate_cases() {
        let mut s = Sampler::new(2);
        let (p0, p1) = (s.density(2), s.density(2));
        assert!(gamma(&p0, &p0, &p0).unwrap().abs() < 1e-12);
        let g = gamma(&p0, &p1, &p1).unwrap();
        assert!((g - 2.0 * world_function(&p0, &p1).unwrap()).abs() < 1e-12);
    }

    #[test]
    fn single_point_gram() {
        let mut s = Sampler::new(3);
        let f = PointFamily::new(s.density(3), vec![s.density(3)]).unwrap();
        let det = squared_length(&f).unwrap();
        assert!((det - 2.0 * world_function(f.base(), &f.points()[0]).unwrap()).abs() < 1e-12);
        assert!(PointFamily::new(s.density(3), vec![]).is_err());
    }

    #[test]
    fn coincident_family_has_zero_length() {
        let rho = Sampler::new(4).density(3);
        let f = PointFamily::new(rho.clone(), vec![rho.clone(), rho.clone()]).unwrap();
        let r = family_report(&f).unwrap();
        assert!(r.determinant.abs() < 1e-12);
        assert!(r.ill_conditioned);
        assert_eq!(r.gammas.len(), 3);
    }
}
