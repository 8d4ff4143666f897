//! Mach-Zehnder likelihood `P(μ | j, θ, τ)` and the phase substructure of
//! its θ-dependence.
//!
//! The input is the twisted coherent state `|ψ(τ)⟩ = exp(-iτJz²)|j,j⟩_x`;
//! the interferometer rotates it about `y` by the phase θ and the relative
//! particle number `μ` is read out along `z`:
//!
//! `P(μ | j, θ, τ) = |⟨j,μ| exp(+iθ Jy) |ψ(τ)⟩|²`.
//!
//! Sign convention: increasing θ steers an `x`-polarized input toward `+z`,
//! so at the `θ = π/2` working point the `τ = 0` interferometer lights the
//! `μ = +j` port. (The opposite rotation sense relabels the ports `μ → -μ`
//! and mirrors θ about π/2; nothing downstream depends on the choice.)

use nalgebra::DMatrix;
use rayon::prelude::*;

use crate::dynamics::evolve_oat;
use crate::rotation::RotationGenerator;
use crate::spinspace::{coherent_spin_state, DickeState, Direction, Spin};
use crate::{Error, Result};

/// Reusable likelihood model for one `(j, τ)`: the evolved input state plus
/// the spectral y-rotation, so a probability column at any θ costs one
/// matrix-vector product.
#[derive(Debug, Clone)]
pub struct MzLikelihood {
    spin: Spin,
    tau: f64,
    input: DickeState,
    generator: RotationGenerator,
}

impl MzLikelihood {
    pub fn new(spin: Spin, tau: f64) -> Self {
        let input = evolve_oat(&coherent_spin_state(spin, Direction::X), tau);
        let generator = RotationGenerator::new(spin, Direction::Y);
        Self {
            spin,
            tau,
            input,
            generator,
        }
    }

    pub fn spin(&self) -> Spin {
        self.spin
    }

    pub fn tau(&self) -> f64 {
        self.tau
    }

    /// `P(μ|θ)` over `μ = +j..-j`.
    pub fn column(&self, theta: f64) -> Vec<f64> {
        let rotated = self.generator.apply(&self.input, -theta);
        rotated.amplitudes().iter().map(|a| a.norm_sqr()).collect()
    }

    /// Likelihood table over an ascending θ grid in `[0, π]`.
    pub fn table(&self, theta_grid: &[f64]) -> Result<ConditionalDistribution> {
        if theta_grid.is_empty() {
            return Err(Error::EmptyGrid);
        }
        let ascending = theta_grid.windows(2).all(|w| w[0] < w[1]);
        let in_range = theta_grid
            .iter()
            .all(|&t| (-1e-12..=std::f64::consts::PI + 1e-12).contains(&t));
        if !ascending || !in_range {
            return Err(Error::BadGrid);
        }
        let dim = self.spin.dim();
        let columns: Vec<Vec<f64>> = theta_grid
            .par_iter()
            .map(|&theta| self.column(theta))
            .collect();
        let mut table = DMatrix::zeros(dim, theta_grid.len());
        for (k, col) in columns.iter().enumerate() {
            for (i, &p) in col.iter().enumerate() {
                table[(i, k)] = p;
            }
        }
        Ok(ConditionalDistribution {
            spin: self.spin,
            tau: self.tau,
            theta_grid: theta_grid.to_vec(),
            table,
        })
    }
}

/// `P(μ | j, θ, τ)` for a single θ.
pub fn likelihood(spin: Spin, tau: f64, theta: f64) -> Vec<f64> {
    MzLikelihood::new(spin, tau).column(theta)
}

/// Likelihood table over a θ grid.
pub fn likelihood_table(
    spin: Spin,
    tau: f64,
    theta_grid: &[f64],
) -> Result<ConditionalDistribution> {
    MzLikelihood::new(spin, tau).table(theta_grid)
}

/// Default θ grid: 4096 uniform points spanning `[0, π]`, densified to
/// `64·N` points for `N > 64` so substructures of width `~1/N` stay
/// resolved.
pub fn default_theta_grid(particles: u32) -> Vec<f64> {
    let len = 4096.max(64 * particles as usize);
    uniform_grid(len)
}

/// `len` uniform points spanning `[0, π]` inclusive.
pub fn uniform_grid(len: usize) -> Vec<f64> {
    let step = std::f64::consts::PI / (len - 1) as f64;
    (0..len).map(|k| k as f64 * step).collect()
}

/// Precomputed likelihood table `P[μ-index][θ-index]`.
#[derive(Debug, Clone)]
pub struct ConditionalDistribution {
    spin: Spin,
    tau: f64,
    theta_grid: Vec<f64>,
    table: DMatrix<f64>,
}

impl ConditionalDistribution {
    pub fn spin(&self) -> Spin {
        self.spin
    }

    pub fn tau(&self) -> f64 {
        self.tau
    }

    pub fn theta_grid(&self) -> &[f64] {
        &self.theta_grid
    }

    pub fn probability(&self, mu_index: usize, theta_index: usize) -> f64 {
        self.table[(mu_index, theta_index)]
    }

    /// `P(·|θ_k)` as a vector over μ.
    pub fn column(&self, theta_index: usize) -> Vec<f64> {
        (0..self.spin.dim())
            .map(|i| self.table[(i, theta_index)])
            .collect()
    }

    /// `θ ↦ P(μ|θ)` for a fixed μ.
    pub fn row_for_mu(&self, mu: f64) -> Result<Vec<f64>> {
        let idx = self.spin.index_of(mu)?;
        Ok((0..self.theta_grid.len())
            .map(|k| self.table[(idx, k)])
            .collect())
    }

    /// Worst column-normalization defect `|Σ_μ P(μ|θ) - 1|`.
    pub fn max_normalization_defect(&self) -> f64 {
        (0..self.theta_grid.len())
            .map(|k| {
                ((0..self.spin.dim()).map(|i| self.table[(i, k)]).sum::<f64>() - 1.0).abs()
            })
            .fold(0.0, f64::max)
    }

    /// CSV export: `theta,mu,probability`, one row per cell, 17 significant
    /// digits.
    pub fn write_csv<W: std::io::Write>(&self, mut w: W) -> Result<()> {
        writeln!(w, "theta,mu,probability")?;
        for (k, &theta) in self.theta_grid.iter().enumerate() {
            for (i, mu) in self.spin.projections().enumerate() {
                writeln!(w, "{:.16e},{},{:.16e}", theta, mu, self.table[(i, k)])?;
            }
        }
        Ok(())
    }
}

/// How a substructure width was extracted.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum WidthKind {
    /// Mean distance between adjacent qualifying local maxima.
    PeakSpacing,
    /// Full width at half maximum of the single dominant feature.
    Fwhm,
}

/// Extracted substructure width of `θ ↦ P(μ|θ)`.
#[derive(Debug, Clone, Copy)]
pub struct SubstructureWidth {
    pub width: f64,
    pub kind: WidthKind,
    pub peaks: usize,
}

/// Typical substructure size of `θ ↦ P(μ|θ)` over `(0, π)`: the mean
/// distance between adjacent local maxima that rise above 10% of the global
/// maximum, falling back to the FWHM of the single dominant peak when fewer
/// than two maxima qualify.
///
/// Requires the grid to resolve the `1/N` scale with at least 10 points.
pub fn substructure_width(dist: &ConditionalDistribution, mu: f64) -> Result<SubstructureWidth> {
    let row = dist.row_for_mu(mu)?;
    let grid = dist.theta_grid();
    let step = grid[1.min(grid.len() - 1)] - grid[0];
    let needed = 1.0 / (10.0 * f64::from(dist.spin().particles()));
    if grid.len() < 2 || step > needed {
        return Err(Error::InvalidParameter(format!(
            "θ grid step {step:.3e} too coarse to resolve 1/N substructures (need <= {needed:.3e})"
        )));
    }
    let global_max = row.iter().cloned().fold(0.0f64, f64::max);
    if global_max <= 0.0 {
        return Err(Error::InvalidParameter(
            "probability row is identically zero".into(),
        ));
    }
    let threshold = 0.1 * global_max;
    let mut peaks: Vec<usize> = Vec::new();
    for i in 1..row.len() - 1 {
        if row[i] >= threshold && row[i] > row[i - 1] && row[i] >= row[i + 1] {
            peaks.push(i);
        }
    }
    if peaks.len() >= 2 {
        let spacing = (grid[*peaks.last().unwrap()] - grid[peaks[0]]) / (peaks.len() - 1) as f64;
        return Ok(SubstructureWidth {
            width: spacing,
            kind: WidthKind::PeakSpacing,
            peaks: peaks.len(),
        });
    }

    // FWHM of the dominant feature, linearly interpolating the half-maximum
    // crossings and clamping at the grid ends.
    let argmax = row
        .iter()
        .enumerate()
        .max_by(|a, b| a.1.partial_cmp(b.1).unwrap())
        .map(|(i, _)| i)
        .unwrap();
    let half = global_max / 2.0;
    let left = {
        let mut i = argmax;
        while i > 0 && row[i] >= half {
            i -= 1;
        }
        if row[i] >= half {
            grid[i]
        } else {
            let t = (half - row[i]) / (row[i + 1] - row[i]);
            grid[i] + t * (grid[i + 1] - grid[i])
        }
    };
    let right = {
        let mut i = argmax;
        while i + 1 < row.len() && row[i] >= half {
            i += 1;
        }
        if row[i] >= half {
            grid[i]
        } else {
            let t = (half - row[i]) / (row[i - 1] - row[i]);
            grid[i] - t * (grid[i] - grid[i - 1])
        }
    };
    Ok(SubstructureWidth {
        width: right - left,
        kind: WidthKind::Fwhm,
        peaks: peaks.len(),
    })
}
