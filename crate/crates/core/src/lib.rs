//! Random Fourier features for real, shift-invariant, possibly asymmetric kernels.
//!
//! A real kernel `k(x, y) = k(x − y)` has a complex spectral measure
//! `μ = μR⁺ − μR⁻ + i(μI⁺ − μI⁻)`. Sampling frequencies from the three
//! positive parts `μR⁺`, `μR⁻`, `μI⁺` and weighting by their total masses
//! gives the estimator
//!
//! ```text
//! s(x − y) = ξ1·φ(ω,x)ᵀφ(ω,y) − ξ2·φ(ζ,x)ᵀφ(ζ,y) − 2ξ3·φ(ν,x)ᵀψ(ν,y)
//! ```
//!
//! Modules:
//!
//! | module        | purpose                                                        |
//! |---------------|----------------------------------------------------------------|
//! | [`spectral`]  | kernel families, complex densities, the four part-densities    |
//! | [`sampler`]   | acceptance-rejection frequency sampling, [`FrequencyBank`]     |
//! | [`features`]  | φ/ψ maps, the estimator `s`, classification features           |
//! | [`masses`]    | total masses by quadrature and by subset least squares         |
//! | [`evalbench`] | Gram matrices, error metrics, the sample-complexity bound      |
//! | [`dataio`]    | libsvm parsing, min-max normalization, k-fold splits           |
//! | [`classifier`]| squared-hinge linear SVM with cross-validated `C`              |
//! | [`experiment`]| end-to-end experiment drivers behind the CLI                   |
//!
//! ```
//! use askrff::{Family, FeatureMap, FrequencyBank, SpectralKernel, masses};
//!
//! let kernel = SpectralKernel::standard(Family::SinhGaussian, 1).unwrap();
//! let bank = FrequencyBank::sample(&kernel, 256, 42).unwrap();
//! let xi = masses::masses_quadrature(&kernel).unwrap();
//! let map = FeatureMap::new(bank, xi).unwrap();
//! let s = map.approx_kernel(&[0.3], &[0.3]).unwrap();
//! assert!((s - kernel.kernel_eval(&[0.0]).unwrap()).abs() < 1e-10);
//! ```

pub mod classifier;
pub mod dataio;
pub mod error;
pub mod evalbench;
pub mod experiment;
pub mod features;
pub mod masses;
pub mod quadrature;
pub mod sampler;
pub mod spectral;
pub mod stats;

pub use error::{Error, Result};
pub use features::{FeatureMap, Side};
pub use masses::{MassSet, MassSource};
pub use sampler::FrequencyBank;
pub use spectral::{Family, KernelConfig, Part, PartDensity, SpectralKernel};
