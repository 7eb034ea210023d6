//! Fourier coefficients of a symmetrized Gaussian density.

use std::f64::consts::{PI, TAU};

use num_complex::Complex64;

use crate::error::{check_dim, Error, Result};
use crate::graph::enumerate_lattice;
use crate::groups::CosetGroup;
use crate::lattice::LatticeCell;
use crate::rational::unit_phase_f64;
use crate::symop::Freq;

/// Gaussians of width `sigma` placed at every image `φ(x)`, `φ ∈ Ĝ`.
#[derive(Clone, Debug)]
pub struct OrbitDensity {
    dim: usize,
    images: Vec<Vec<f64>>,
    sigma: f64,
    cell: LatticeCell,
}

impl OrbitDensity {
    pub fn new(group: &CosetGroup, x: &[f64], sigma: f64, cell: &LatticeCell) -> Result<Self> {
        check_dim(group.dim(), x.len())?;
        check_dim(group.dim(), cell.dim())?;
        if !(sigma > 0.0 && sigma.is_finite()) {
            return Err(Error::InvalidParameter(format!("sigma must be positive, got {sigma}")));
        }
        let images = group
            .elements()
            .iter()
            .map(|op| op.act_on_point(x))
            .collect::<Result<_>>()?;
        Ok(OrbitDensity {
            dim: group.dim(),
            images,
            sigma,
            cell: cell.clone(),
        })
    }

    /// `(2π)^{d/2} σ^d exp(-2π²σ²|B^{-1}k|²) Σ_φ exp(-2πi k·φ(x))`.
    pub fn coefficient(&self, k: &Freq) -> Complex64 {
        let d = self.dim as f64;
        let envelope = TAU.powf(d / 2.0)
            * self.sigma.powf(d)
            * (-2.0 * PI * PI * self.sigma * self.sigma * self.cell.wave_norm_sq(k.as_slice())).exp();
        let sum: Complex64 = self.images.iter().map(|y| unit_phase_f64(-k.dot(y))).sum();
        sum * envelope
    }

    /// Coefficients for every frequency in the max-norm box of `radius`.
    pub fn coefficients(&self, radius: u32) -> Result<Vec<(Freq, Complex64)>> {
        Ok(enumerate_lattice(self.dim, radius)?
            .into_iter()
            .map(|k| (k, self.coefficient(&k)))
            .collect())
    }
}

pub fn gaussian_orbit_coefficients(
    group: &CosetGroup,
    x: &[f64],
    sigma: f64,
    cell: &LatticeCell,
    radius: u32,
) -> Result<Vec<(Freq, Complex64)>> {
    OrbitDensity::new(group, x, sigma, cell)?.coefficients(radius)
}
