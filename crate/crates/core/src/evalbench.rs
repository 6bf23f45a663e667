//! Gram matrices, approximation error metrics and the uniform-convergence
//! sample-size calculator.

use ndarray::{s, Array2, ArrayView2};
use rayon::prelude::*;

use crate::error::{check_dim, Error, Result};
use crate::features::{phi_matrix, psi_matrix, FeatureMap};
use crate::masses::MassSet;
use crate::sampler::sample_part;
use crate::spectral::{Part, SpectralKernel};

/// Frequencies processed per matrix product in [`gram_approx`]; bounds memory at large `M`.
const FREQ_CHUNK: usize = 1024;

/// `K[i][j] = k(rows_i − cols_j)`.
pub fn gram_exact(kernel: &SpectralKernel, rows: ArrayView2<'_, f64>, cols: ArrayView2<'_, f64>) -> Result<Array2<f64>> {
    let d = kernel.dim();
    check_dim(d, rows.ncols())?;
    check_dim(d, cols.ncols())?;
    let (n, n2) = (rows.nrows(), cols.nrows());
    let data: Vec<f64> = (0..n)
        .into_par_iter()
        .map(|i| {
            let mut delta = vec![0.0; d];
            let x = rows.row(i);
            (0..n2)
                .map(|j| {
                    for ((dl, a), b) in delta.iter_mut().zip(x.iter()).zip(cols.row(j).iter()) {
                        *dl = a - b;
                    }
                    kernel.kernel_eval(&delta)
                })
                .collect::<Result<Vec<f64>>>()
        })
        .collect::<Result<Vec<Vec<f64>>>>()?
        .into_iter()
        .flatten()
        .collect();
    Ok(Array2::from_shape_vec((n, n2), data).expect("n × n2 entries"))
}

/// `K̃[i][j] = s(rows_i − cols_j)` via block matrix products.
///
/// When `rows` and `cols` are the same matrix, only the upper block-triangle
/// is multiplied: cosine blocks are symmetric and the sine block is
/// antisymmetric, so the lower triangle follows by reflection.
pub fn gram_approx(map: &FeatureMap, rows: ArrayView2<'_, f64>, cols: ArrayView2<'_, f64>) -> Result<Array2<f64>> {
    let d = map.dim();
    check_dim(d, rows.ncols())?;
    check_dim(d, cols.ncols())?;
    let square = rows.shape() == cols.shape() && rows == cols;
    let bank = map.bank();
    let xi = map.masses();
    let n = rows.nrows();
    let mut even = Array2::zeros((n, cols.nrows()));
    let mut odd = Array2::zeros((if square { n } else { 0 }, if square { n } else { 0 }));
    let terms = [
        (bank.omega.view(), xi.xi1, false),
        (bank.zeta.view(), -xi.xi2, false),
        (bank.nu.view(), -2.0 * xi.xi3, true),
    ];
    for (freqs, coef, skew) in terms {
        let m = freqs.nrows();
        if m == 0 || coef == 0.0 {
            continue;
        }
        for start in (0..m).step_by(FREQ_CHUNK) {
            let chunk = freqs.slice(s![start..(start + FREQ_CHUNK).min(m), ..]);
            // Rescale so the chunk's 1/√m_chunk becomes the bank's 1/√M.
            let w = (chunk.nrows() as f64 / m as f64).sqrt();
            let left = phi_matrix(chunk, rows, w);
            if square {
                // ψ is φ with its cosine and sine halves swapped and the sines negated.
                if skew {
                    upper_block_product(coef, &left, &phi_to_psi(&left), &mut odd);
                } else {
                    upper_block_product(coef, &left, &left, &mut even);
                }
            } else {
                let right = if skew { psi_matrix(chunk, cols, w) } else { phi_matrix(chunk, cols, w) };
                ndarray::linalg::general_mat_mul(coef, &left, &right.t(), 1.0, &mut even);
            }
        }
    }
    if square {
        reflect_blocks(&mut even, &mut odd);
        even += &odd;
    }
    Ok(even)
}

fn phi_to_psi(phi: &Array2<f64>) -> Array2<f64> {
    let m = phi.ncols() / 2;
    let mut psi = Array2::zeros(phi.raw_dim());
    psi.slice_mut(s![.., ..m]).assign(&phi.slice(s![.., m..]).mapv(|v| -v));
    psi.slice_mut(s![.., m..]).assign(&phi.slice(s![.., ..m]));
    psi
}

/// Row block size of the triangular product.
const ROW_BLOCK: usize = 128;

/// `out[I, J] += coef·left[I]·right[J]ᵀ` for row blocks `I ≤ J`.
fn upper_block_product(coef: f64, left: &Array2<f64>, right: &Array2<f64>, out: &mut Array2<f64>) {
    let n = left.nrows();
    for i0 in (0..n).step_by(ROW_BLOCK) {
        let i1 = (i0 + ROW_BLOCK).min(n);
        let l = left.slice(s![i0..i1, ..]);
        let r = right.slice(s![i0.., ..]);
        let mut o = out.slice_mut(s![i0..i1, i0..]);
        ndarray::linalg::general_mat_mul(coef, &l, &r.t(), 1.0, &mut o);
    }
}

/// Fill the strictly-lower block-triangle: `even` symmetrically, `odd` antisymmetrically.
fn reflect_blocks(even: &mut Array2<f64>, odd: &mut Array2<f64>) {
    let n = even.nrows();
    for i in 0..n {
        let block_start = (i / ROW_BLOCK) * ROW_BLOCK;
        for j in 0..block_start {
            even[[i, j]] = even[[j, i]];
            odd[[i, j]] = -odd[[j, i]];
        }
    }
}

/// `‖K − K̃‖_F / ‖K‖_F`.
pub fn relative_error(k: ArrayView2<'_, f64>, k_tilde: ArrayView2<'_, f64>) -> Result<f64> {
    if k.dim() != k_tilde.dim() {
        let (a, b) = (k.dim(), k_tilde.dim());
        return Err(Error::DimensionMismatch { expected: a.0 * a.1, got: b.0 * b.1 });
    }
    let norm: f64 = k.iter().map(|v| v * v).sum::<f64>().sqrt();
    if norm == 0.0 {
        return Err(Error::ZeroNorm);
    }
    let diff: f64 = k.iter().zip(k_tilde.iter()).map(|(a, b)| (a - b) * (a - b)).sum::<f64>().sqrt();
    Ok(diff / norm)
}

/// Largest entrywise deviation `max |K − K̃|`.
pub fn max_abs_error(k: ArrayView2<'_, f64>, k_tilde: ArrayView2<'_, f64>) -> Result<f64> {
    if k.dim() != k_tilde.dim() {
        let (a, b) = (k.dim(), k_tilde.dim());
        return Err(Error::DimensionMismatch { expected: a.0 * a.1, got: b.0 * b.1 });
    }
    Ok(k.iter().zip(k_tilde.iter()).map(|(a, b)| (a - b).abs()).fold(0.0, f64::max))
}

/// `max_Δ |s(Δ) − k(Δ)|` over a grid of lags, evaluated on point pairs `(Δ, 0)`.
pub fn sup_error_grid(kernel: &SpectralKernel, map: &FeatureMap, grid: &[Vec<f64>]) -> Result<f64> {
    if grid.is_empty() {
        return Err(Error::InvalidParameter("sup-error grid is empty".into()));
    }
    let d = kernel.dim();
    check_dim(d, map.dim())?;
    let mut lags = Array2::zeros((grid.len(), d));
    for (mut row, delta) in lags.rows_mut().into_iter().zip(grid) {
        check_dim(d, delta.len())?;
        row.iter_mut().zip(delta).for_each(|(o, v)| *o = *v);
    }
    let origin = Array2::zeros((1, d));
    let approx = gram_approx(map, lags.view(), origin.view())?;
    let mut worst: f64 = 0.0;
    for (delta, s) in grid.iter().zip(approx.column(0)) {
        worst = worst.max((s - kernel.kernel_eval(delta)?).abs());
    }
    Ok(worst)
}

/// `n` evenly spaced one-dimensional lags on `[lo, hi]`.
pub fn uniform_grid_1d(lo: f64, hi: f64, n: usize) -> Vec<Vec<f64>> {
    match n {
        0 => Vec::new(),
        1 => vec![vec![lo]],
        _ => (0..n).map(|i| vec![lo + (hi - lo) * i as f64 / (n - 1) as f64]).collect(),
    }
}

/// `β_d = ((d/2)^(−d/(d+2)) + (d/2)^(2/(d+2))) · 2^((6d+2)/(d+2))`.
pub fn beta_d(d: f64) -> f64 {
    let h = d / 2.0;
    (h.powf(-d / (d + 2.0)) + h.powf(2.0 / (d + 2.0))) * 2f64.powf((6.0 * d + 2.0) / (d + 2.0))
}

/// Inputs of the uniform-convergence sample-size bound.
#[derive(Debug, Clone, PartialEq)]
pub struct BoundInputs {
    pub d: usize,
    /// Diameter `l` of the lag set.
    pub diameter: f64,
    pub eps: f64,
    pub delta: f64,
    /// `‖μ‖ = ξ1 + ξ2 + 2ξ3`.
    pub total_mass: f64,
    /// `α_μ = sqrt((ξ1² + ξ2² + 2ξ3²)·σ_μ²)`.
    pub alpha_mu: f64,
}

impl BoundInputs {
    /// Estimate `α_μ` from fresh banks of `samples` rows per part.
    pub fn for_kernel(
        kernel: &SpectralKernel,
        masses: &MassSet,
        diameter: f64,
        eps: f64,
        delta: f64,
        samples: usize,
        seed: u64,
    ) -> Result<Self> {
        let sigma_sq = sigma_mu_sq(kernel, samples, seed)?;
        let scale = masses.xi1.powi(2) + masses.xi2.powi(2) + 2.0 * masses.xi3.powi(2);
        Ok(Self {
            d: kernel.dim(),
            diameter,
            eps,
            delta,
            total_mass: masses.total_mass(),
            alpha_mu: (scale * sigma_sq).sqrt(),
        })
    }

    pub fn beta_d(&self) -> f64 {
        beta_d(self.d as f64)
    }
}

/// `σ_μ² = E‖ω‖² + E‖ζ‖² + 2E‖ν‖²` by Monte Carlo; degenerate parts contribute 0.
pub fn sigma_mu_sq(kernel: &SpectralKernel, samples: usize, seed: u64) -> Result<f64> {
    let mut total = 0.0;
    for (part, weight) in [(Part::RealPos, 1.0), (Part::RealNeg, 1.0), (Part::ImagPos, 2.0)] {
        let density = kernel.part(part);
        if density.is_degenerate() {
            continue;
        }
        let draws = sample_part(&density, samples, seed)?;
        let mean_sq = draws.iter().map(|v| v * v).sum::<f64>() / samples as f64;
        total += weight * mean_sq;
    }
    Ok(total)
}

/// Smallest `M` for which `‖s − k‖_∞ ≤ ε` holds with probability `≥ 1 − δ`.
pub fn bound_min_features(b: &BoundInputs) -> Result<u64> {
    if !(b.delta > 0.0 && b.delta < 1.0) {
        return Err(Error::InvalidProbability(b.delta));
    }
    for (name, v) in [("eps", b.eps), ("diameter", b.diameter), ("total_mass", b.total_mass), ("alpha_mu", b.alpha_mu)] {
        if !(v.is_finite() && v > 0.0) {
            return Err(Error::InvalidParameter(format!("{name} must be positive, got {v}")));
        }
    }
    let d = b.d as f64;
    let lead = 4.0 * (d + 2.0) * b.total_mass * b.total_mass / (b.eps * b.eps);
    let log_term = (b.beta_d() / b.delta).ln() + 2.0 * d / (d + 2.0) * (b.alpha_mu * b.diameter / b.eps).ln();
    let value = lead * log_term;
    if value <= 1.0 {
        return Ok(1);
    }
    if value >= u64::MAX as f64 {
        return Err(Error::Overflow(format!("feature bound {value:.3e} exceeds u64")));
    }
    Ok(value.ceil() as u64)
}
