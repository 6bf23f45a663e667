//! Explicit feature maps φ/ψ and the kernel estimator built on them.
//!
//! For a bank `W` with `M` rows,
//!
//! ```text
//! φ(W, x) = [cos(w₁ᵀx) … cos(w_Mᵀx), sin(w₁ᵀx) … sin(w_Mᵀx)] / √M
//! ψ(W, y) = [−sin(w₁ᵀy) … −sin(w_Mᵀy), cos(w₁ᵀy) … cos(w_Mᵀy)] / √M
//! ```
//!
//! so `φ(W,x)ᵀφ(W,y) = mean cos(wᵀ(x−y))` and `φ(W,x)ᵀψ(W,y) = mean sin(wᵀ(x−y))`.

use ndarray::{s, Array1, Array2, ArrayView2};
use serde::{Deserialize, Serialize};

use crate::error::{check_dim, Error, Result};
use crate::masses::MassSet;
use crate::sampler::FrequencyBank;
use crate::spectral::Part;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Side {
    Left,
    Right,
}

pub fn phi_block(freqs: ArrayView2<'_, f64>, x: &[f64]) -> Vec<f64> {
    trig_block(freqs, x, false)
}

pub fn psi_block(freqs: ArrayView2<'_, f64>, y: &[f64]) -> Vec<f64> {
    trig_block(freqs, y, true)
}

fn trig_block(freqs: ArrayView2<'_, f64>, x: &[f64], psi: bool) -> Vec<f64> {
    let m = freqs.nrows();
    let scale = 1.0 / (m as f64).sqrt();
    let mut out = vec![0.0; 2 * m];
    for (k, w) in freqs.rows().into_iter().enumerate() {
        let t: f64 = w.iter().zip(x).map(|(a, b)| a * b).sum();
        let (sin, cos) = t.sin_cos();
        if psi {
            out[k] = -sin * scale;
            out[m + k] = cos * scale;
        } else {
            out[k] = cos * scale;
            out[m + k] = sin * scale;
        }
    }
    out
}

/// Row-wise φ for a data matrix: `N × 2M`, scaled by `weight`.
pub fn phi_matrix(freqs: ArrayView2<'_, f64>, data: ArrayView2<'_, f64>, weight: f64) -> Array2<f64> {
    trig_matrix(freqs, data, weight, false)
}

/// Row-wise ψ for a data matrix: `N × 2M`, scaled by `weight`.
pub fn psi_matrix(freqs: ArrayView2<'_, f64>, data: ArrayView2<'_, f64>, weight: f64) -> Array2<f64> {
    trig_matrix(freqs, data, weight, true)
}

fn trig_matrix(freqs: ArrayView2<'_, f64>, data: ArrayView2<'_, f64>, weight: f64, psi: bool) -> Array2<f64> {
    let m = freqs.nrows();
    let n = data.nrows();
    let proj = data.dot(&freqs.t());
    let scale = weight / (m as f64).sqrt();
    let mut out = Array2::zeros((n, 2 * m));
    for (mut row, p) in out.rows_mut().into_iter().zip(proj.rows()) {
        for (k, &t) in p.iter().enumerate() {
            let (sin, cos) = t.sin_cos();
            if psi {
                row[k] = -sin * scale;
                row[m + k] = cos * scale;
            } else {
                row[k] = cos * scale;
                row[m + k] = sin * scale;
            }
        }
    }
    out
}

/// Description of one contiguous block of transformed features.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct BlockInfo {
    pub name: String,
    pub width: usize,
    pub weight: f64,
    /// Sign of this block in the bilinear pairing `Left(x)·Right(y)`.
    pub sign: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct FeatureLayout {
    pub side: Side,
    pub blocks: Vec<BlockInfo>,
}

impl FeatureLayout {
    pub fn width(&self) -> usize {
        self.blocks.iter().map(|b| b.width).sum()
    }

    /// Layout for untransformed inputs.
    pub fn raw(dim: usize) -> Self {
        Self {
            side: Side::Left,
            blocks: vec![BlockInfo { name: "raw".into(), width: dim, weight: 1.0, sign: 1.0 }],
        }
    }

    pub fn signs(&self) -> Array1<f64> {
        self.blocks
            .iter()
            .flat_map(|b| std::iter::repeat_n(b.sign, b.width))
            .collect()
    }
}

/// A realized random-feature map: a frequency bank plus total masses.
#[derive(Debug, Clone, PartialEq)]
pub struct FeatureMap {
    bank: FrequencyBank,
    masses: MassSet,
}

impl FeatureMap {
    pub fn new(bank: FrequencyBank, masses: MassSet) -> Result<Self> {
        for (part, xi, rows) in [
            (Part::RealPos, masses.xi1, bank.omega.nrows()),
            (Part::RealNeg, masses.xi2, bank.zeta.nrows()),
            (Part::ImagPos, masses.xi3, bank.nu.nrows()),
        ] {
            if !(xi.is_finite() && xi >= 0.0) {
                return Err(Error::InvalidParameter(format!("mass for {part} must be finite and nonnegative, got {xi}")));
            }
            if xi > 0.0 && rows == 0 {
                return Err(Error::MassBankMismatch(part));
            }
        }
        Ok(Self { bank, masses })
    }

    pub fn bank(&self) -> &FrequencyBank {
        &self.bank
    }

    pub fn masses(&self) -> &MassSet {
        &self.masses
    }

    pub fn dim(&self) -> usize {
        self.bank.dim()
    }

    /// The same map restricted to the real (symmetric) part of the measure:
    /// the ν block is dropped, which approximates `(K + Kᵀ)/2`.
    pub fn symmetric_part(&self) -> Self {
        let mut bank = self.bank.clone();
        bank.nu = Array2::zeros((0, bank.dim()));
        let mut masses = self.masses.clone();
        masses.xi3 = 0.0;
        Self { bank, masses }
    }

    /// `s(x − y)`; degenerate (empty) banks contribute nothing.
    pub fn approx_kernel(&self, x: &[f64], y: &[f64]) -> Result<f64> {
        let d = self.dim();
        check_dim(d, x.len())?;
        check_dim(d, y.len())?;
        let inner = |a: Vec<f64>, b: Vec<f64>| -> f64 { a.iter().zip(&b).map(|(p, q)| p * q).sum() };
        let mut s = 0.0;
        if self.bank.omega.nrows() > 0 {
            let w = self.bank.omega.view();
            s += self.masses.xi1 * inner(phi_block(w, x), phi_block(w, y));
        }
        if self.bank.zeta.nrows() > 0 {
            let w = self.bank.zeta.view();
            s -= self.masses.xi2 * inner(phi_block(w, x), phi_block(w, y));
        }
        if self.bank.nu.nrows() > 0 {
            let w = self.bank.nu.view();
            s -= 2.0 * self.masses.xi3 * inner(phi_block(w, x), psi_block(w, y));
        }
        Ok(s)
    }

    pub fn layout(&self, side: Side) -> FeatureLayout {
        let mut blocks = Vec::new();
        if self.bank.omega.nrows() > 0 {
            blocks.push(BlockInfo {
                name: "omega".into(),
                width: 2 * self.bank.omega.nrows(),
                weight: self.masses.xi1.sqrt(),
                sign: 1.0,
            });
        }
        if self.bank.zeta.nrows() > 0 {
            blocks.push(BlockInfo {
                name: "zeta".into(),
                width: 2 * self.bank.zeta.nrows(),
                weight: self.masses.xi2.sqrt(),
                sign: -1.0,
            });
        }
        if self.bank.nu.nrows() > 0 {
            blocks.push(BlockInfo {
                name: match side {
                    Side::Left => "nu_phi".into(),
                    Side::Right => "nu_psi".into(),
                },
                width: 2 * self.bank.nu.nrows(),
                weight: (2.0 * self.masses.xi3).sqrt(),
                // The estimator subtracts 2ξ3·φᵀψ.
                sign: -1.0,
            });
        }
        FeatureLayout { side, blocks }
    }

    pub fn width(&self) -> usize {
        self.layout(Side::Left).width()
    }

    /// Map an `N × d` matrix to `[√ξ1·φ_ω, √ξ2·φ_ζ, √(2ξ3)·φ_ν]` (Left) or with
    /// `ψ_ν` in the last block (Right). Blocks of empty banks are omitted.
    pub fn transform(&self, data: ArrayView2<'_, f64>, side: Side) -> Result<Array2<f64>> {
        check_dim(self.dim(), data.ncols())?;
        let layout = self.layout(side);
        let mut out = Array2::zeros((data.nrows(), layout.width()));
        let mut col = 0;
        for block in &layout.blocks {
            let mat = match block.name.as_str() {
                "omega" => phi_matrix(self.bank.omega.view(), data, block.weight),
                "zeta" => phi_matrix(self.bank.zeta.view(), data, block.weight),
                "nu_phi" => phi_matrix(self.bank.nu.view(), data, block.weight),
                _ => psi_matrix(self.bank.nu.view(), data, block.weight),
            };
            out.slice_mut(s![.., col..col + block.width]).assign(&mat);
            col += block.width;
        }
        Ok(out)
    }
}

/// Write transformed features as dense CSV, one row per sample, no header.
/// For sparse libsvm lines use [`crate::dataio::write_libsvm`].
pub fn write_features_csv<W: std::io::Write>(features: ArrayView2<'_, f64>, w: W) -> Result<()> {
    let mut out = csv::WriterBuilder::new().has_headers(false).from_writer(w);
    for row in features.rows() {
        out.write_record(row.iter().map(|v| format!("{v:?}")))?;
    }
    out.flush()?;
    Ok(())
}
