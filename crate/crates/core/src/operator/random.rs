//! Reproducible random operators.
//!
//! All sampling goes through [`Sampler`], a ChaCha8 stream seeded from a 64-bit value.
//! Independent trials derive their seeds with [`trial_seed`], a SplitMix64 mix of the
//! master seed and the trial index, so results do not depend on scheduling.

use nalgebra::DVector;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rand_distr::StandardNormal;
use serde::{Deserialize, Serialize};

use super::{
    CMatrix, DensityOperator, HermitianMatrix, PositiveOperator, Spectral, StrictlyPositiveOperator,
    C64,
};
use crate::error::{Error, Result};

/// Shift added to sampled PSD matrices to make them strictly positive.
pub const STRICT_SHIFT: f64 = 0.1;
/// Range of the independent spectra used for commuting families.
pub const FAMILY_SPECTRUM: (f64, f64) = (0.1, 1.1);

fn splitmix64(mut z: u64) -> u64 {
    z = z.wrapping_add(0x9e37_79b9_7f4a_7c15);
    z = (z ^ (z >> 30)).wrapping_mul(0xbf58_476d_1ce4_e5b9);
    z = (z ^ (z >> 27)).wrapping_mul(0x94d0_49bb_1331_11eb);
    z ^ (z >> 31)
}

/// Per-trial seed derived from `(master, index)`.
pub fn trial_seed(master: u64, index: u64) -> u64 {
    splitmix64(splitmix64(master) ^ index.wrapping_mul(0xd1b5_4a32_d192_ed03))
}

pub struct Sampler {
    rng: ChaCha8Rng,
}

impl Sampler {
    pub fn new(seed: u64) -> Self {
        Self {
            rng: ChaCha8Rng::seed_from_u64(seed),
        }
    }

    pub fn gaussian(&mut self) -> f64 {
        self.rng.sample(StandardNormal)
    }

    pub fn uniform(&mut self, lo: f64, hi: f64) -> f64 {
        lo + (hi - lo) * self.rng.random::<f64>()
    }

    pub fn index(&mut self, n: usize) -> usize {
        self.rng.random_range(0..n)
    }

    pub fn complex_gaussian(&mut self) -> C64 {
        C64::new(self.gaussian(), self.gaussian())
    }

    pub fn complex_gaussian_matrix(&mut self, rows: usize, cols: usize) -> CMatrix {
        CMatrix::from_fn(rows, cols, |_, _| self.complex_gaussian())
    }

    /// `(G + G^H) / 2` for complex Gaussian `G`.
    pub fn hermitian(&mut self, dim: usize) -> HermitianMatrix {
        let g = self.complex_gaussian_matrix(dim, dim);
        HermitianMatrix::symmetrized(&g)
    }

    /// `G G^H / dim`.
    pub fn psd(&mut self, dim: usize) -> PositiveOperator {
        let g = self.complex_gaussian_matrix(dim, dim);
        let m = &g * g.adjoint() / C64::new(dim as f64, 0.0);
        PositiveOperator::from_product(&m).expect("Gram matrix is positive")
    }

    /// PSD sample plus `shift * I`.
    pub fn strictly_positive(&mut self, dim: usize, shift: f64) -> StrictlyPositiveOperator {
        let p = self.psd(dim);
        let values: Vec<f64> = p.eigenvalues().iter().map(|&l| l + shift).collect();
        let shifted = PositiveOperator::from_spectral(values, p.spectral().vectors.clone());
        StrictlyPositiveOperator::new(shifted, shift).expect("shifted spectrum")
    }

    pub fn density(&mut self, dim: usize) -> DensityOperator {
        DensityOperator::normalized(&self.psd(dim)).expect("Gram matrix has positive trace")
    }

    pub fn unit_vector(&mut self, dim: usize) -> Vec<C64> {
        let v = DVector::from_fn(dim, |_, _| self.complex_gaussian());
        let n = v.norm();
        v.iter().map(|z| z / n).collect()
    }

    pub fn rank1_projector(&mut self, dim: usize) -> PositiveOperator {
        let v = self.unit_vector(dim);
        super::functions::projector(&v).expect("unit vector")
    }

    /// Eigenbasis of a random Hermitian matrix.
    pub fn unitary(&mut self, dim: usize) -> CMatrix {
        let h = self.hermitian(dim);
        Spectral::of(h.matrix()).vectors
    }

    pub fn spectrum(&mut self, dim: usize, lo: f64, hi: f64) -> Vec<f64> {
        (0..dim).map(|_| self.uniform(lo, hi)).collect()
    }

    /// Members `U f_k(Λ) U^H` sharing one eigenbasis, with independent positive spectra.
    pub fn commuting_family(&mut self, count: usize, dim: usize) -> Vec<PositiveOperator> {
        let u = self.unitary(dim);
        (0..count)
            .map(|_| {
                let s = self.spectrum(dim, FAMILY_SPECTRUM.0, FAMILY_SPECTRUM.1);
                PositiveOperator::with_basis(&u, &s).expect("positive spectrum")
            })
            .collect()
    }

    pub fn commuting_densities(&mut self, count: usize, dim: usize) -> Vec<DensityOperator> {
        self.commuting_family(count, dim)
            .iter()
            .map(|p| DensityOperator::normalized(p).expect("positive trace"))
            .collect()
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum OperatorKind {
    Psd,
    StrictlyPositive,
    Density,
    Rank1Projector,
    CommutingFamily(usize),
    Hermitian,
}

#[derive(Clone, Debug)]
pub enum Generated {
    Hermitian(HermitianMatrix),
    Positive(PositiveOperator),
    StrictlyPositive(StrictlyPositiveOperator),
    Density(DensityOperator),
    Family(Vec<PositiveOperator>),
}

impl Generated {
    /// All generated matrices, in order.
    pub fn matrices(&self) -> Vec<CMatrix> {
        match self {
            Generated::Hermitian(h) => vec![h.matrix().clone()],
            Generated::Positive(p) => vec![p.matrix().clone()],
            Generated::StrictlyPositive(p) => vec![p.matrix().clone()],
            Generated::Density(p) => vec![p.matrix().clone()],
            Generated::Family(f) => f.iter().map(|p| p.matrix().clone()).collect(),
        }
    }
}

/// Deterministic for a fixed `(kind, dim, seed)`.
pub fn random_operator(kind: OperatorKind, dim: usize, seed: u64) -> Result<Generated> {
    if dim == 0 {
        return Err(Error::Shape("dimension must be at least 1".into()));
    }
    let mut s = Sampler::new(seed);
    Ok(match kind {
        OperatorKind::Psd => Generated::Positive(s.psd(dim)),
        OperatorKind::StrictlyPositive => Generated::StrictlyPositive(s.strictly_positive(dim, STRICT_SHIFT)),
        OperatorKind::Density => Generated::Density(s.density(dim)),
        OperatorKind::Rank1Projector => Generated::Positive(s.rank1_projector(dim)),
        OperatorKind::CommutingFamily(count) => {
            if count == 0 {
                return Err(Error::Shape("family must have at least one member".into()));
            }
            Generated::Family(s.commuting_family(count, dim))
        }
        OperatorKind::Hermitian => Generated::Hermitian(s.hermitian(dim)),
    })
}
