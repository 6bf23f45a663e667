//! Kernel families and their complex spectral densities.
//!
//! Every supported kernel is a Gaussian envelope times a bounded modulation,
//! so its Fourier transform is the Gaussian density `g(ω) = (σ/√(2π))^d
//! exp(-σ²‖ω‖²/2)` times a phase factor. The transform convention is
//! `k(Δ) = ∫ exp(iωᵀΔ) μ(ω) dω`.
//!
//! | family          | k(Δ)                                   | μ(ω) / g(ω)                     |
//! |-----------------|----------------------------------------|---------------------------------|
//! | `Gaussian`      | exp(-‖Δ‖²/2σ²)                         | 1                               |
//! | `ShiftGaussian` | exp(-‖Δ+r‖²/2σ²)                       | exp(i rᵀω)                      |
//! | `SinhGaussian`  | exp(-‖Δ‖²/2σ²)·(1 + sinh(βᵀΔ))         | 1 - i·G·sin(σ²βᵀω)              |
//! | `CoshGaussian`  | exp(-‖Δ‖²/2σ²)·exp(βᵀΔ)                | G·exp(-i σ²βᵀω)                 |
//!
//! with `G = exp(σ²‖β‖²/2)`. The names "sinh" and "cosh" are historical: the
//! sinh family is `1 + sinh`, and the cosh family uses `exp = cosh + sinh`.

use std::f64::consts::PI;
use std::fmt;

use serde::{Deserialize, Serialize};

use crate::error::{check_dim, Error, Result};

/// Largest exponent that still yields a finite `f64` after `exp`.
const LOG_MAX: f64 = 709.0;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Family {
    /// `exp(-‖Δ+r‖²/(2σ²))`.
    ShiftGaussian,
    /// `(1 + sinh(βᵀΔ))·exp(-‖Δ‖²/(2σ²))`. Despite the name, the sinh term
    /// carries an added constant.
    SinhGaussian,
    /// `exp(βᵀΔ)·exp(-‖Δ‖²/(2σ²))`, i.e. cosh plus sinh, not cosh alone.
    CoshGaussian,
    /// Symmetric `exp(-‖Δ‖²/(2σ²))`; the classic RFF case.
    Gaussian,
}

impl Family {
    pub const ASYMMETRIC: [Family; 3] = [
        Family::ShiftGaussian,
        Family::SinhGaussian,
        Family::CoshGaussian,
    ];

    pub fn name(self) -> &'static str {
        match self {
            Family::ShiftGaussian => "shift_gaussian",
            Family::SinhGaussian => "sinh_gaussian",
            Family::CoshGaussian => "cosh_gaussian",
            Family::Gaussian => "gaussian",
        }
    }
}

impl fmt::Display for Family {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

/// One of the four positive measures of the Jordan split `μ = μR⁺ − μR⁻ + i(μI⁺ − μI⁻)`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Part {
    RealPos,
    RealNeg,
    ImagPos,
    ImagNeg,
}

impl Part {
    pub const ALL: [Part; 4] = [Part::RealPos, Part::RealNeg, Part::ImagPos, Part::ImagNeg];

    pub fn name(self) -> &'static str {
        match self {
            Part::RealPos => "real_pos",
            Part::RealNeg => "real_neg",
            Part::ImagPos => "imag_pos",
            Part::ImagNeg => "imag_neg",
        }
    }

    /// RNG stream index; one logical stream per (part, seed).
    pub fn stream_id(self) -> u64 {
        match self {
            Part::RealPos => 0,
            Part::RealNeg => 1,
            Part::ImagPos => 2,
            Part::ImagNeg => 3,
        }
    }
}

impl fmt::Display for Part {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

/// A shift-invariant kernel together with its closed-form spectral density.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SpectralKernel {
    family: Family,
    dim: usize,
    sigma: f64,
    /// Shift vector `r` (ShiftGaussian); zeros otherwise.
    shift: Vec<f64>,
    /// Skew vector `β` (Sinh/CoshGaussian); zeros otherwise.
    skew: Vec<f64>,
}

impl SpectralKernel {
    pub fn gaussian(dim: usize, sigma: f64) -> Result<Self> {
        Self::build(Family::Gaussian, dim, sigma, vec![0.0; dim], vec![0.0; dim])
    }

    pub fn shift_gaussian(sigma: f64, shift: Vec<f64>) -> Result<Self> {
        let dim = shift.len();
        Self::build(Family::ShiftGaussian, dim, sigma, shift, vec![0.0; dim])
    }

    pub fn sinh_gaussian(sigma: f64, skew: Vec<f64>) -> Result<Self> {
        let dim = skew.len();
        Self::build(Family::SinhGaussian, dim, sigma, vec![0.0; dim], skew)
    }

    pub fn cosh_gaussian(sigma: f64, skew: Vec<f64>) -> Result<Self> {
        let dim = skew.len();
        Self::build(Family::CoshGaussian, dim, sigma, vec![0.0; dim], skew)
    }

    /// The experimental defaults: σ = 2, r = (2/d)·1, β = (π/2d)·1.
    pub fn standard(family: Family, dim: usize) -> Result<Self> {
        let d = dim as f64;
        let sigma = 2.0;
        match family {
            Family::Gaussian => Self::gaussian(dim, sigma),
            Family::ShiftGaussian => Self::shift_gaussian(sigma, vec![2.0 / d; dim]),
            Family::SinhGaussian => Self::sinh_gaussian(sigma, vec![0.5 * PI / d; dim]),
            Family::CoshGaussian => Self::cosh_gaussian(sigma, vec![0.5 * PI / d; dim]),
        }
    }

    fn build(family: Family, dim: usize, sigma: f64, shift: Vec<f64>, skew: Vec<f64>) -> Result<Self> {
        if dim == 0 {
            return Err(Error::InvalidParameter("kernel dimension must be positive".into()));
        }
        if !(sigma.is_finite() && sigma > 0.0) {
            return Err(Error::InvalidParameter(format!("sigma must be positive, got {sigma}")));
        }
        check_dim(dim, shift.len())?;
        check_dim(dim, skew.len())?;
        if shift.iter().chain(&skew).any(|v| !v.is_finite()) {
            return Err(Error::InvalidParameter("shift/skew entries must be finite".into()));
        }
        let kernel = Self { family, dim, sigma, shift, skew };
        if kernel.log_gain() > LOG_MAX {
            return Err(Error::Overflow(format!(
                "skew prefactor exp(σ²‖β‖²/2) = exp({:.1}) is not representable",
                kernel.log_gain()
            )));
        }
        Ok(kernel)
    }

    pub fn family(&self) -> Family {
        self.family
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    pub fn sigma(&self) -> f64 {
        self.sigma
    }

    pub fn shift(&self) -> &[f64] {
        &self.shift
    }

    pub fn skew(&self) -> &[f64] {
        &self.skew
    }

    pub fn is_symmetric(&self) -> bool {
        self.phase_vector().iter().all(|&v| v == 0.0)
    }

    /// `ln G = σ²‖β‖²/2`, zero for families without a skew vector.
    pub fn log_gain(&self) -> f64 {
        match self.family {
            Family::SinhGaussian | Family::CoshGaussian => {
                0.5 * self.sigma * self.sigma * dot(&self.skew, &self.skew)
            }
            Family::ShiftGaussian | Family::Gaussian => 0.0,
        }
    }

    /// The vector `a` such that the spectral phase is `θ(ω) = aᵀω`.
    fn phase_vector(&self) -> &[f64] {
        match self.family {
            Family::ShiftGaussian => &self.shift,
            Family::SinhGaussian | Family::CoshGaussian => &self.skew,
            Family::Gaussian => &self.shift,
        }
    }

    /// Spectral phase: `rᵀω` (shift), `σ²βᵀω` (sinh/cosh), 0 (Gaussian).
    pub fn phase(&self, omega: &[f64]) -> f64 {
        match self.family {
            Family::ShiftGaussian => dot(&self.shift, omega),
            Family::SinhGaussian | Family::CoshGaussian => {
                self.sigma * self.sigma * dot(&self.skew, omega)
            }
            Family::Gaussian => 0.0,
        }
    }

    /// `ln g(ω)` for the Gaussian envelope `N(0, σ⁻² I)`.
    pub fn log_envelope(&self, omega: &[f64]) -> f64 {
        let d = self.dim as f64;
        d * (self.sigma / (2.0 * PI).sqrt()).ln() - 0.5 * self.sigma * self.sigma * dot(omega, omega)
    }

    pub fn kernel_eval(&self, delta: &[f64]) -> Result<f64> {
        check_dim(self.dim, delta.len())?;
        let s2 = self.sigma * self.sigma;
        let value = match self.family {
            Family::Gaussian => (-0.5 * dot(delta, delta) / s2).exp(),
            Family::ShiftGaussian => {
                let sq: f64 = delta.iter().zip(&self.shift).map(|(a, r)| (a + r) * (a + r)).sum();
                (-0.5 * sq / s2).exp()
            }
            Family::SinhGaussian => {
                let base = -0.5 * dot(delta, delta) / s2;
                let t = dot(&self.skew, delta);
                // env·sinh(t) recombined in log space so large |t| does not overflow early.
                base.exp() + 0.5 * ((base + t).exp() - (base - t).exp())
            }
            Family::CoshGaussian => {
                let base = -0.5 * dot(delta, delta) / s2;
                (base + dot(&self.skew, delta)).exp()
            }
        };
        if value.is_finite() {
            Ok(value)
        } else {
            Err(Error::Overflow(format!("k(Δ) is not finite for Δ = {delta:?}")))
        }
    }

    /// `(Re μ(ω), Im μ(ω))`, unnormalized and including the `(σ/√(2π))^d` prefactor.
    pub fn density_complex(&self, omega: &[f64]) -> Result<(f64, f64)> {
        check_dim(self.dim, omega.len())?;
        let log_g = self.log_envelope(omega);
        let theta = self.phase(omega);
        let (re, im) = match self.family {
            Family::Gaussian => (log_g.exp(), 0.0),
            Family::ShiftGaussian => {
                let g = log_g.exp();
                (g * theta.cos(), g * theta.sin())
            }
            Family::SinhGaussian => {
                let amp = checked_exp(log_g + self.log_gain())?;
                (log_g.exp(), -amp * theta.sin())
            }
            Family::CoshGaussian => {
                let amp = checked_exp(log_g + self.log_gain())?;
                (amp * theta.cos(), -amp * theta.sin())
            }
        };
        Ok((re, im))
    }

    pub fn part(&self, part: Part) -> PartDensity<'_> {
        PartDensity { part, kernel: self }
    }
}

/// One positive part-density of a kernel's spectral measure.
#[derive(Debug, Clone, Copy)]
pub struct PartDensity<'a> {
    part: Part,
    kernel: &'a SpectralKernel,
}

impl<'a> PartDensity<'a> {
    pub fn part(&self) -> Part {
        self.part
    }

    pub fn kernel(&self) -> &'a SpectralKernel {
        self.kernel
    }

    /// `max(±Re μ, 0)` or `max(±Im μ, 0)`.
    pub fn eval(&self, omega: &[f64]) -> Result<f64> {
        let (re, im) = self.kernel.density_complex(omega)?;
        Ok(match self.part {
            Part::RealPos => re.max(0.0),
            Part::RealNeg => (-re).max(0.0),
            Part::ImagPos => im.max(0.0),
            Part::ImagNeg => (-im).max(0.0),
        })
    }

    /// True iff the part is identically zero, decided analytically per family.
    pub fn is_degenerate(&self) -> bool {
        let k = self.kernel;
        match (k.family, self.part) {
            (_, Part::RealPos) => false,
            (Family::Gaussian | Family::SinhGaussian, Part::RealNeg) => true,
            (Family::Gaussian, _) => true,
            _ => k.is_symmetric(),
        }
    }

    /// `ln c`, where `c` bounds `f/g` for the Gaussian envelope `g`.
    pub fn log_envelope_bound(&self) -> f64 {
        let k = self.kernel;
        match (k.family, self.part) {
            (Family::CoshGaussian, _) => k.log_gain(),
            (Family::SinhGaussian, Part::ImagPos | Part::ImagNeg) => k.log_gain(),
            _ => 0.0,
        }
    }

    /// Acceptance ratio `f(ω) / (c·g(ω))`, always in `[0, 1]`.
    ///
    /// Computed from the phase alone, so it stays finite even where `c`
    /// itself would overflow.
    pub fn acceptance_ratio(&self, omega: &[f64]) -> f64 {
        if self.is_degenerate() {
            return 0.0;
        }
        let k = self.kernel;
        let theta = k.phase(omega);
        match (k.family, self.part) {
            (Family::Gaussian | Family::SinhGaussian, Part::RealPos) => 1.0,
            (_, Part::RealPos) => theta.cos().max(0.0),
            (_, Part::RealNeg) => (-theta.cos()).max(0.0),
            (Family::ShiftGaussian, Part::ImagPos) => theta.sin().max(0.0),
            (Family::ShiftGaussian, Part::ImagNeg) => (-theta.sin()).max(0.0),
            (_, Part::ImagPos) => (-theta.sin()).max(0.0),
            (_, Part::ImagNeg) => theta.sin().max(0.0),
        }
    }
}

fn checked_exp(x: f64) -> Result<f64> {
    if x > LOG_MAX {
        Err(Error::Overflow(format!("exp({x:.1}) is not representable")))
    } else {
        Ok(x.exp())
    }
}

pub(crate) fn dot(a: &[f64], b: &[f64]) -> f64 {
    a.iter().zip(b).map(|(x, y)| x * y).sum()
}

/// JSON kernel configuration, e.g.
/// `{"family": "shift_gaussian", "sigma": 2.0, "shift": [0.25, 0.25]}`.
///
/// Missing vectors fall back to the experimental defaults of [`SpectralKernel::standard`].
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct KernelConfig {
    pub family: Family,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub dim: Option<usize>,
    #[serde(default = "default_sigma")]
    pub sigma: f64,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub shift: Option<Vec<f64>>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub skew: Option<Vec<f64>>,
}

fn default_sigma() -> f64 {
    2.0
}

impl KernelConfig {
    pub fn new(family: Family) -> Self {
        Self { family, dim: None, sigma: default_sigma(), shift: None, skew: None }
    }

    /// Resolve to a kernel. `data_dim` is the dimension of the data the kernel
    /// will be applied to, when known; it must agree with `dim` and vector lengths.
    pub fn build(&self, data_dim: Option<usize>) -> Result<SpectralKernel> {
        let vec_len = match self.family {
            Family::ShiftGaussian => self.shift.as_ref().map(Vec::len),
            Family::SinhGaussian | Family::CoshGaussian => self.skew.as_ref().map(Vec::len),
            Family::Gaussian => None,
        };
        let dim = self
            .dim
            .or(vec_len)
            .or(data_dim)
            .ok_or_else(|| Error::Config(format!("cannot infer dimension for {} kernel", self.family)))?;
        for other in [vec_len, data_dim].into_iter().flatten() {
            if other != dim {
                return Err(Error::Config(format!(
                    "{} kernel: dimension {dim} conflicts with {other}",
                    self.family
                )));
            }
        }
        let d = dim as f64;
        match self.family {
            Family::Gaussian => SpectralKernel::gaussian(dim, self.sigma),
            Family::ShiftGaussian => SpectralKernel::shift_gaussian(
                self.sigma,
                self.shift.clone().unwrap_or_else(|| vec![2.0 / d; dim]),
            ),
            Family::SinhGaussian => SpectralKernel::sinh_gaussian(
                self.sigma,
                self.skew.clone().unwrap_or_else(|| vec![0.5 * PI / d; dim]),
            ),
            Family::CoshGaussian => SpectralKernel::cosh_gaussian(
                self.sigma,
                self.skew.clone().unwrap_or_else(|| vec![0.5 * PI / d; dim]),
            ),
        }
    }
}
