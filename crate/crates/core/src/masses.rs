//! Total masses `ξ = (‖μR⁺‖, ‖μR⁻‖, ‖μI⁺‖)`.
//!
//! Two routes: tensor-grid quadrature of the part-densities (d ≤ 3), and a
//! constrained least-squares fit of the estimator to the exact Gram matrix
//! on a small data subset. The fit eliminates `ξ1 = ξ2 + k(0)` and solves
//! the remaining two-variable nonnegative least squares by enumerating the
//! four active sets.

use ndarray::{Array2, ArrayView2};
use serde::{Deserialize, Serialize};

use crate::error::{check_dim, Error, Result};
use crate::evalbench::gram_exact;
use crate::features::{phi_matrix, psi_matrix};
use crate::quadrature::TrapezoidGrid;
use crate::sampler::FrequencyBank;
use crate::spectral::{Part, SpectralKernel};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum MassSource {
    Quadrature,
    SubsetLs,
    Analytic,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct MassSet {
    pub xi1: f64,
    pub xi2: f64,
    pub xi3: f64,
    pub source: MassSource,
    /// `ξ1 − ξ2 − k(0)`.
    pub constraint_residual: f64,
}

impl MassSet {
    /// Masses known in closed form (e.g. `(1, 0, 0)` for the Gaussian kernel).
    pub fn analytic(kernel: &SpectralKernel, xi1: f64, xi2: f64, xi3: f64) -> Result<Self> {
        let k0 = kernel.kernel_eval(&vec![0.0; kernel.dim()])?;
        Ok(Self { xi1, xi2, xi3, source: MassSource::Analytic, constraint_residual: xi1 - xi2 - k0 })
    }

    /// `‖μ‖ = ξ1 + ξ2 + 2ξ3`.
    pub fn total_mass(&self) -> f64 {
        self.xi1 + self.xi2 + 2.0 * self.xi3
    }

    pub fn as_array(&self) -> [f64; 3] {
        [self.xi1, self.xi2, self.xi3]
    }
}

/// Quadrature integrals of all four part-densities.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct PartIntegrals {
    pub real_pos: f64,
    pub real_neg: f64,
    pub imag_pos: f64,
    pub imag_neg: f64,
}

pub fn integrate_parts(kernel: &SpectralKernel) -> Result<PartIntegrals> {
    let grid = TrapezoidGrid::spectral(kernel.dim(), kernel.sigma())?;
    // Fail early on unrepresentable densities rather than inside the parallel sum.
    kernel.density_complex(&vec![0.0; kernel.dim()])?;
    let [rp, rn, ip, ineg] = grid.integrate(|w| match kernel.density_complex(w) {
        Ok((re, im)) => [re.max(0.0), (-re).max(0.0), im.max(0.0), (-im).max(0.0)],
        Err(_) => [f64::NAN; 4],
    });
    if [rp, rn, ip, ineg].iter().any(|v| !v.is_finite()) {
        return Err(Error::Overflow("part-density quadrature is not finite".into()));
    }
    Ok(PartIntegrals { real_pos: rp, real_neg: rn, imag_pos: ip, imag_neg: ineg })
}

pub fn masses_quadrature(kernel: &SpectralKernel) -> Result<MassSet> {
    let parts = integrate_parts(kernel)?;
    let k0 = kernel.kernel_eval(&vec![0.0; kernel.dim()])?;
    Ok(MassSet {
        xi1: parts.real_pos,
        xi2: parts.real_neg,
        xi3: parts.imag_pos,
        source: MassSource::Quadrature,
        constraint_residual: parts.real_pos - parts.real_neg - k0,
    })
}

/// Block Gram matrices of the bank on a subset: `A = Φ_ωΦ_ωᵀ`, `B = Φ_ζΦ_ζᵀ`,
/// `C = Φ_νΨ_νᵀ`, plus the exact Gram `K`.
struct SubsetBlocks {
    k: Array2<f64>,
    a: Array2<f64>,
    b: Option<Array2<f64>>,
    c: Option<Array2<f64>>,
    k0: f64,
}

impl SubsetBlocks {
    fn new(kernel: &SpectralKernel, bank: &FrequencyBank, subset: ArrayView2<'_, f64>) -> Result<Self> {
        if subset.nrows() < 2 {
            return Err(Error::EmptySubset(subset.nrows()));
        }
        check_dim(kernel.dim(), subset.ncols())?;
        check_dim(kernel.dim(), bank.dim())?;
        if bank.omega.nrows() == 0 {
            return Err(Error::DegenerateMeasure(Part::RealPos));
        }
        let gram = |w: ArrayView2<'_, f64>| {
            let p = phi_matrix(w, subset, 1.0);
            p.dot(&p.t())
        };
        let b = (bank.zeta.nrows() > 0).then(|| gram(bank.zeta.view()));
        let c = (bank.nu.nrows() > 0).then(|| {
            let p = phi_matrix(bank.nu.view(), subset, 1.0);
            let q = psi_matrix(bank.nu.view(), subset, 1.0);
            p.dot(&q.t())
        });
        Ok(Self {
            k: gram_exact(kernel, subset, subset)?,
            a: gram(bank.omega.view()),
            b,
            c,
            k0: kernel.kernel_eval(&vec![0.0; kernel.dim()])?,
        })
    }

    fn objective(&self, xi1: f64, xi2: f64, xi3: f64) -> f64 {
        let mut r = &self.k - &(&self.a * xi1);
        if let Some(b) = &self.b {
            r.scaled_add(xi2, b);
        }
        if let Some(c) = &self.c {
            r.scaled_add(2.0 * xi3, c);
        }
        r.iter().map(|v| v * v).sum()
    }
}

/// `‖K − (ξ1·A − ξ2·B − 2ξ3·C)‖_F²` on the subset for the given masses.
pub fn subset_objective(
    kernel: &SpectralKernel,
    bank: &FrequencyBank,
    subset: ArrayView2<'_, f64>,
    masses: &MassSet,
) -> Result<f64> {
    let blocks = SubsetBlocks::new(kernel, bank, subset)?;
    Ok(blocks.objective(masses.xi1, masses.xi2, masses.xi3))
}

/// Fit the masses to the exact Gram matrix on `subset` under
/// `ξ1 − ξ2 = k(0)`, `ξ ≥ 0`. Parts with an empty bank are pinned to zero.
pub fn masses_subset_ls(kernel: &SpectralKernel, bank: &FrequencyBank, subset: ArrayView2<'_, f64>) -> Result<MassSet> {
    let blocks = SubsetBlocks::new(kernel, bank, subset)?;
    let k0 = blocks.k0;
    // Residual after eliminating ξ1: y − a·x1 − b·x2, a = ξ2, b = ξ3.
    let y = &blocks.k - &(&blocks.a * k0);
    let x1 = blocks.b.as_ref().map(|b| &blocks.a - b);
    let x2 = blocks.c.as_ref().map(|c| c * -2.0);

    let dot = |p: &Array2<f64>, q: &Array2<f64>| -> f64 { p.iter().zip(q).map(|(u, v)| u * v).sum() };
    // Regressors below round-off relative to ‖K‖_F are treated as absent.
    let tiny = (1e-12 * dot(&blocks.k, &blocks.k).sqrt()).powi(2);
    let mut candidates: Vec<(f64, f64)> = vec![(0.0, 0.0)];
    if let Some(x1) = &x1 {
        let g11 = dot(x1, x1);
        if g11 > tiny {
            candidates.push(((dot(x1, &y) / g11).max(0.0), 0.0));
        }
    }
    if let Some(x2) = &x2 {
        let g22 = dot(x2, x2);
        if g22 > tiny {
            candidates.push((0.0, (dot(x2, &y) / g22).max(0.0)));
        }
    }
    if let (Some(x1), Some(x2)) = (&x1, &x2) {
        let (g11, g12, g22) = (dot(x1, x1), dot(x1, x2), dot(x2, x2));
        let (b1, b2) = (dot(x1, &y), dot(x2, &y));
        let det = g11 * g22 - g12 * g12;
        // Near-singular normal equations fall through to the boundary candidates.
        if g11 > tiny && g22 > tiny && det > 1e-12 * g11 * g22 {
            let a = (g22 * b1 - g12 * b2) / det;
            let b = (g11 * b2 - g12 * b1) / det;
            if a >= 0.0 && b >= 0.0 {
                candidates.push((a, b));
            }
        }
    }

    let (xi2, xi3) = candidates
        .into_iter()
        .map(|(a, b)| (blocks.objective(a + k0, a, b), (a, b)))
        .min_by(|p, q| p.0.total_cmp(&q.0))
        .map(|(_, ab)| ab)
        .expect("candidate list is never empty");
    let xi1 = xi2 + k0;
    Ok(MassSet { xi1, xi2, xi3, source: MassSource::SubsetLs, constraint_residual: xi1 - xi2 - k0 })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::spectral::Family;
    use ndarray::Array2;
    use rand::SeedableRng;
    use rand_chacha::ChaCha8Rng;
    use rand_distr::{Distribution, StandardNormal};

    fn normal_points(n: usize, d: usize, seed: u64) -> Array2<f64> {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        Array2::from_shape_fn((n, d), |_| StandardNormal.sample(&mut rng))
    }

    #[test]
    fn quadrature_gaussian_is_probability() {
        let k = SpectralKernel::gaussian(1, 2.0).unwrap();
        let m = masses_quadrature(&k).unwrap();
        assert!((m.xi1 - 1.0).abs() < 1e-12);
        assert_eq!((m.xi2, m.xi3), (0.0, 0.0));
    }

    #[test]
    fn quadrature_sinh_real_part_is_envelope() {
        let k = SpectralKernel::standard(Family::SinhGaussian, 1).unwrap();
        let m = masses_quadrature(&k).unwrap();
        assert!((m.xi1 - 1.0).abs() < 1e-12);
        assert_eq!(m.xi2, 0.0);
    }

    #[test]
    fn quadrature_cosh_constraint() {
        let k = SpectralKernel::standard(Family::CoshGaussian, 1).unwrap();
        let m = masses_quadrature(&k).unwrap();
        assert!((m.xi1 - m.xi2 - 1.0).abs() < 1e-9);
        assert!(m.constraint_residual.abs() < 1e-9);
    }

    #[test]
    fn quadrature_two_dimensional_shift() {
        let k = SpectralKernel::standard(Family::ShiftGaussian, 2).unwrap();
        let p = integrate_parts(&k).unwrap();
        let k0 = k.kernel_eval(&[0.0, 0.0]).unwrap();
        assert!((p.real_pos - p.real_neg - k0).abs() < 1e-9);
        assert!((p.imag_pos - p.imag_neg).abs() < 1e-12);
    }

    #[test]
    fn quadrature_rejects_high_dimension() {
        let k = SpectralKernel::standard(Family::ShiftGaussian, 4).unwrap();
        assert!(matches!(masses_quadrature(&k), Err(Error::UnsupportedDimension { .. })));
    }

    #[test]
    fn subset_ls_gaussian_is_exact() {
        let k = SpectralKernel::gaussian(2, 2.0).unwrap();
        let bank = FrequencyBank::sample(&k, 64, 3).unwrap();
        let m = masses_subset_ls(&k, &bank, normal_points(10, 2, 1).view()).unwrap();
        assert_eq!((m.xi1, m.xi2, m.xi3), (1.0, 0.0, 0.0));
        assert_eq!(m.source, MassSource::SubsetLs);
    }

    #[test]
    fn subset_ls_errors() {
        let k = SpectralKernel::standard(Family::ShiftGaussian, 1).unwrap();
        let bank = FrequencyBank::sample(&k, 16, 3).unwrap();
        assert!(matches!(
            masses_subset_ls(&k, &bank, Array2::zeros((0, 1)).view()),
            Err(Error::EmptySubset(0))
        ));
        assert!(matches!(
            masses_subset_ls(&k, &bank, Array2::zeros((1, 1)).view()),
            Err(Error::EmptySubset(1))
        ));
        assert!(masses_subset_ls(&k, &bank, Array2::zeros((5, 2)).view()).is_err());
    }

    #[test]
    fn duplicate_points_fall_back_to_boundary() {
        // Every subset point identical: all lags are zero, the regressors vanish
        // and only the constraint determines the answer.
        let k = SpectralKernel::standard(Family::CoshGaussian, 1).unwrap();
        let bank = FrequencyBank::sample(&k, 32, 0).unwrap();
        let subset = Array2::from_elem((6, 1), 0.25);
        let m = masses_subset_ls(&k, &bank, subset.view()).unwrap();
        assert_eq!((m.xi2, m.xi3), (0.0, 0.0));
        assert!((m.xi1 - 1.0).abs() < 1e-15);
    }

    #[test]
    fn subset_ls_feasible_and_dominates_quadrature() {
        for fam in Family::ASYMMETRIC {
            let k = SpectralKernel::standard(fam, 1).unwrap();
            let q = masses_quadrature(&k).unwrap();
            for seed in 0..5 {
                let bank = FrequencyBank::sample(&k, 256, seed).unwrap();
                let subset = normal_points(10, 1, 100 + seed);
                let m = masses_subset_ls(&k, &bank, subset.view()).unwrap();
                assert!(m.xi1 >= 0.0 && m.xi2 >= 0.0 && m.xi3 >= 0.0);
                assert!(m.constraint_residual.abs() < 1e-8);
                let mut qq = q.clone();
                if bank.zeta.nrows() == 0 {
                    qq.xi2 = 0.0;
                }
                let fit = subset_objective(&k, &bank, subset.view(), &m).unwrap();
                let reference = subset_objective(&k, &bank, subset.view(), &qq).unwrap();
                assert!(fit <= reference + 1e-12, "{fam}: {fit} > {reference}");
            }
        }
    }

    #[test]
    fn total_mass_counts_imaginary_twice() {
        let k = SpectralKernel::standard(Family::ShiftGaussian, 1).unwrap();
        let m = MassSet::analytic(&k, 0.6, 0.1, 0.25).unwrap();
        assert!((m.total_mass() - 1.2).abs() < 1e-15);
        let json = serde_json::to_value(&m).unwrap();
        assert_eq!(json["source"], "analytic");
        assert!(json.get("constraint_residual").is_some());
    }
}
