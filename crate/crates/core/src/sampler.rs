//! Acceptance-rejection sampling of frequencies from unnormalized part-densities.
//!
//! The proposal for every family is the Gaussian envelope `N(0, σ⁻² I)` and
//! the per-part constant `c` is the analytic supremum of the modulation, so
//! the acceptance probability of a proposal `ω` is exactly
//! [`PartDensity::acceptance_ratio`]. Total masses are never consulted.
//!
//! Random numbers come from ChaCha8 (`rand_chacha::ChaCha8Rng`) seeded with
//! `seed_from_u64(seed)` and switched to stream `part.stream_id()`, so each
//! (part, seed) pair owns one independent, reproducible stream. Proposal
//! coordinates are `StandardNormal / σ` drawn in row order; a uniform is
//! drawn only when the acceptance ratio is below one.

use std::io::{BufRead, Write};

use ndarray::{Array2, ArrayView2};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rand_distr::StandardNormal;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::spectral::{Part, PartDensity, SpectralKernel};

/// Proposals examined before the acceptance rate is checked.
pub const PROBE_PROPOSALS: u64 = 10_000;
/// Minimum acceptable acceptance rate after the probe batch.
pub const MIN_ACCEPTANCE_RATE: f64 = 1e-4;
/// Consecutive rejections tolerated for a single accepted sample.
pub const MAX_PROPOSALS_PER_SAMPLE: u64 = 1_000_000;

pub fn is_degenerate(part: &PartDensity<'_>) -> bool {
    part.is_degenerate()
}

pub fn part_rng(part: Part, seed: u64) -> ChaCha8Rng {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    rng.set_stream(part.stream_id());
    rng
}

/// Draw `m` rows from the normalized part-density.
pub fn sample_part(part: &PartDensity<'_>, m: usize, seed: u64) -> Result<Array2<f64>> {
    if m == 0 {
        return Err(Error::InvalidParameter("sample count must be at least 1".into()));
    }
    if part.is_degenerate() {
        return Err(Error::DegenerateMeasure(part.part()));
    }
    let kernel = part.kernel();
    let d = kernel.dim();
    let inv_sigma = 1.0 / kernel.sigma();
    let mut rng = part_rng(part.part(), seed);
    let mut out = Array2::zeros((m, d));
    let mut proposal = vec![0.0; d];
    let mut proposed: u64 = 0;
    let mut accepted: u64 = 0;

    for mut row in out.rows_mut() {
        let mut since_last = 0u64;
        loop {
            for z in proposal.iter_mut() {
                *z = rng.sample::<f64, _>(StandardNormal) * inv_sigma;
            }
            proposed += 1;
            since_last += 1;
            let ratio = part.acceptance_ratio(&proposal);
            let accept = ratio >= 1.0 || rng.random::<f64>() < ratio;
            if accept {
                accepted += 1;
                row.iter_mut().zip(&proposal).for_each(|(o, &z)| *o = z);
                break;
            }
            if proposed == PROBE_PROPOSALS && (accepted as f64) / (proposed as f64) < MIN_ACCEPTANCE_RATE {
                return Err(Error::EnvelopeFailure {
                    part: part.part(),
                    rate: accepted as f64 / proposed as f64,
                    proposals: proposed,
                });
            }
            if since_last >= MAX_PROPOSALS_PER_SAMPLE {
                return Err(Error::EnvelopeFailure {
                    part: part.part(),
                    rate: accepted as f64 / proposed as f64,
                    proposals: proposed,
                });
            }
        }
    }
    Ok(out)
}

/// A secondary part whose probe batch bounds its mass below this fraction of
/// `|k(0)|` is treated as empty.
pub const NEGLIGIBLE_MASS_FRACTION: f64 = 1e-3;

/// 95% Poisson upper bound on the expected count after zero observed events.
const ZERO_EVENT_UPPER: f64 = 3.0;

/// Sampled frequencies for the three parts used by the approximation.
///
/// `zeta` and `nu` have zero rows when the corresponding part is degenerate,
/// or numerically negligible (see [`FrequencyBank::sample`]).
#[derive(Debug, Clone, PartialEq)]
pub struct FrequencyBank {
    pub omega: Array2<f64>,
    pub zeta: Array2<f64>,
    pub nu: Array2<f64>,
    pub seed: u64,
    pub m: usize,
}

impl FrequencyBank {
    pub const PARTS: [Part; 3] = [Part::RealPos, Part::RealNeg, Part::ImagPos];

    /// Sample all non-degenerate banks of `kernel` with `m` rows each.
    ///
    /// Since the envelope has unit mass, a part's mass is `c` times its
    /// acceptance probability. If the probe batch of a `zeta` or `nu` part
    /// accepts nothing, its mass is below `3c / PROBE_PROPOSALS` with 95%
    /// confidence; when that bound is under `NEGLIGIBLE_MASS_FRACTION·|k(0)|`
    /// the bank is left empty (its mass is then pinned to zero). Any other
    /// envelope failure is returned.
    pub fn sample(kernel: &SpectralKernel, m: usize, seed: u64) -> Result<Self> {
        let d = kernel.dim();
        let k0 = kernel.kernel_eval(&vec![0.0; d])?.abs();
        let draw = |p: Part| -> Result<Array2<f64>> {
            let density = kernel.part(p);
            if density.is_degenerate() {
                return Ok(Array2::zeros((0, d)));
            }
            match sample_part(&density, m, seed) {
                Err(Error::EnvelopeFailure { proposals, rate, .. })
                    if p != Part::RealPos
                        && proposals == PROBE_PROPOSALS
                        && rate == 0.0
                        && ZERO_EVENT_UPPER * density.log_envelope_bound().exp() / PROBE_PROPOSALS as f64
                            <= NEGLIGIBLE_MASS_FRACTION * k0 =>
                {
                    Ok(Array2::zeros((0, d)))
                }
                other => other,
            }
        };
        // Each part has its own stream, so the three draws are independent.
        let (omega, (zeta, nu)) = rayon::join(
            || draw(Part::RealPos),
            || rayon::join(|| draw(Part::RealNeg), || draw(Part::ImagPos)),
        );
        Ok(Self { omega: omega?, zeta: zeta?, nu: nu?, seed, m })
    }

    /// Bank built from explicit frequency matrices, e.g. loaded from disk.
    pub fn from_parts(omega: Array2<f64>, zeta: Array2<f64>, nu: Array2<f64>, seed: u64) -> Result<Self> {
        let m = omega.nrows();
        let d = omega.ncols();
        for (name, mat) in [("zeta", &zeta), ("nu", &nu)] {
            if mat.nrows() != 0 && mat.nrows() != m {
                return Err(Error::InvalidParameter(format!(
                    "{name} has {} rows, omega has {m}",
                    mat.nrows()
                )));
            }
            if mat.ncols() != d {
                return Err(Error::DimensionMismatch { expected: d, got: mat.ncols() });
            }
        }
        Ok(Self { omega, zeta, nu, seed, m })
    }

    pub fn dim(&self) -> usize {
        self.omega.ncols()
    }

    pub fn get(&self, part: Part) -> ArrayView2<'_, f64> {
        match part {
            Part::RealPos => self.omega.view(),
            Part::RealNeg => self.zeta.view(),
            Part::ImagPos => self.nu.view(),
            Part::ImagNeg => panic!("imag_neg is never sampled; use imag_pos mirrored"),
        }
    }

    pub fn write_part_csv<W: Write>(&self, part: Part, mut w: W) -> Result<()> {
        let mat = self.get(part);
        let header = BankHeader { m: mat.nrows(), d: self.dim(), seed: self.seed, part };
        writeln!(w, "# {}", serde_json::to_string(&header)?)?;
        for row in mat.rows() {
            let line: Vec<String> = row.iter().map(|v| format!("{v:?}")).collect();
            writeln!(w, "{}", line.join(","))?;
        }
        Ok(())
    }

    /// Write `omega.csv`, `zeta.csv` and `nu.csv` into `dir`.
    pub fn save_dir(&self, dir: &std::path::Path) -> Result<()> {
        std::fs::create_dir_all(dir)?;
        for (part, name) in Self::PARTS.iter().zip(["omega.csv", "zeta.csv", "nu.csv"]) {
            let f = std::fs::File::create(dir.join(name))?;
            self.write_part_csv(*part, std::io::BufWriter::new(f))?;
        }
        Ok(())
    }

    pub fn load_dir(dir: &std::path::Path) -> Result<Self> {
        let mut mats = Vec::new();
        let mut seed = 0;
        for name in ["omega.csv", "zeta.csv", "nu.csv"] {
            let f = std::fs::File::open(dir.join(name))?;
            let (header, mat) = read_part_csv(std::io::BufReader::new(f))?;
            seed = header.seed;
            mats.push(mat);
        }
        let nu = mats.pop().unwrap();
        let zeta = mats.pop().unwrap();
        let omega = mats.pop().unwrap();
        Self::from_parts(omega, zeta, nu, seed)
    }
}

/// JSON header line of a serialized bank part.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct BankHeader {
    pub m: usize,
    pub d: usize,
    pub seed: u64,
    pub part: Part,
}

pub fn read_part_csv<R: BufRead>(r: R) -> Result<(BankHeader, Array2<f64>)> {
    let mut lines = r.lines();
    let first = lines.next().ok_or(Error::Parse { line: 1, msg: "missing header".into() })??;
    let json = first
        .strip_prefix('#')
        .ok_or(Error::Parse { line: 1, msg: "header must start with '#'".into() })?;
    let header: BankHeader = serde_json::from_str(json.trim())?;
    let mut data = Vec::with_capacity(header.m * header.d);
    let mut rows = 0;
    for (i, line) in lines.enumerate() {
        let line = line?;
        if line.trim().is_empty() {
            continue;
        }
        let before = data.len();
        for tok in line.split(',') {
            let v: f64 = tok.trim().parse().map_err(|e| Error::Parse { line: i + 2, msg: format!("{e}") })?;
            data.push(v);
        }
        if data.len() - before != header.d {
            return Err(Error::Format { line: i + 2, msg: format!("expected {} columns", header.d) });
        }
        rows += 1;
    }
    if rows != header.m {
        return Err(Error::Format { line: rows + 1, msg: format!("expected {} rows, found {rows}", header.m) });
    }
    let mat = Array2::from_shape_vec((rows, header.d), data).expect("shape checked above");
    Ok((header, mat))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::spectral::Family;
    use std::f64::consts::PI;

    #[test]
    fn gaussian_samples_are_raw_proposals() {
        let k = SpectralKernel::gaussian(2, 2.0).unwrap();
        let got = sample_part(&k.part(Part::RealPos), 50, 11).unwrap();
        let mut rng = part_rng(Part::RealPos, 11);
        for row in got.rows() {
            for &v in row {
                let z: f64 = rng.sample(StandardNormal);
                assert_eq!(v, z / 2.0);
            }
        }
    }

    #[test]
    fn degenerate_part_is_rejected() {
        let k = SpectralKernel::gaussian(1, 1.0).unwrap();
        assert!(is_degenerate(&k.part(Part::ImagPos)));
        assert!(matches!(
            sample_part(&k.part(Part::ImagPos), 10, 0),
            Err(Error::DegenerateMeasure(Part::ImagPos))
        ));
        let s = SpectralKernel::sinh_gaussian(2.0, vec![PI / 2.0]).unwrap();
        assert!(is_degenerate(&s.part(Part::RealNeg)));
        let sh = SpectralKernel::shift_gaussian(2.0, vec![2.0]).unwrap();
        assert!(!is_degenerate(&sh.part(Part::RealNeg)));
    }

    #[test]
    fn zero_count_is_invalid() {
        let k = SpectralKernel::gaussian(1, 1.0).unwrap();
        assert!(sample_part(&k.part(Part::RealPos), 0, 0).is_err());
    }

    #[test]
    fn tiny_acceptance_rate_is_an_envelope_failure() {
        // real_neg with r = 0.01 needs |ω| > 50π under N(0, 1): never proposed in practice.
        let k = SpectralKernel::shift_gaussian(1.0, vec![0.01]).unwrap();
        let err = sample_part(&k.part(Part::RealNeg), 5, 3).unwrap_err();
        assert!(matches!(err, Error::EnvelopeFailure { part: Part::RealNeg, .. }), "{err}");
        // Its mass is far below 1e-3·k(0), so the bank drops it.
        let bank = FrequencyBank::sample(&k, 5, 3).unwrap();
        assert_eq!((bank.omega.nrows(), bank.zeta.nrows(), bank.nu.nrows()), (5, 0, 5));
    }

    #[test]
    fn high_dimensional_shift_drops_negligible_real_neg() {
        let k = SpectralKernel::standard(Family::ShiftGaussian, 16).unwrap();
        let bank = FrequencyBank::sample(&k, 8, 0).unwrap();
        assert_eq!(bank.zeta.nrows(), 0);
        assert_eq!(bank.nu.nrows(), 8);
    }

    #[test]
    fn seed_determinism_and_stream_separation() {
        let k = SpectralKernel::standard(Family::CoshGaussian, 3).unwrap();
        let a = FrequencyBank::sample(&k, 64, 7).unwrap();
        let b = FrequencyBank::sample(&k, 64, 7).unwrap();
        assert_eq!(a, b);
        let c = FrequencyBank::sample(&k, 64, 8).unwrap();
        assert_ne!(a.omega, c.omega);
        assert_ne!(a.omega, a.zeta);
        assert_eq!(a.omega.dim(), (64, 3));
        assert_eq!(a.nu.nrows(), 64);
    }

    #[test]
    fn degenerate_banks_are_empty() {
        let k = SpectralKernel::standard(Family::SinhGaussian, 2).unwrap();
        let bank = FrequencyBank::sample(&k, 16, 1).unwrap();
        assert_eq!(bank.zeta.dim(), (0, 2));
        assert_eq!(bank.nu.nrows(), 16);
        let g = SpectralKernel::gaussian(2, 2.0).unwrap();
        let bank = FrequencyBank::sample(&g, 16, 1).unwrap();
        assert_eq!((bank.zeta.nrows(), bank.nu.nrows()), (0, 0));
    }

    #[test]
    fn sinh_imaginary_acceptance_matches_modulation() {
        let k = SpectralKernel::sinh_gaussian(2.0, vec![PI / 2.0]).unwrap();
        let p = k.part(Part::ImagPos);
        assert_eq!(p.log_envelope_bound(), k.log_gain());
        assert!((k.log_gain() - 0.5 * 4.0 * PI * PI / 4.0).abs() < 1e-15);
        for i in -200..=200 {
            let w = i as f64 * 0.01;
            let expected = (-(4.0 * PI / 2.0 * w).sin()).max(0.0);
            assert!((p.acceptance_ratio(&[w]) - expected).abs() < 1e-15);
        }
    }

    #[test]
    fn proposal_soundness() {
        use rand::Rng;
        let mut rng = ChaCha8Rng::seed_from_u64(99);
        for fam in Family::ASYMMETRIC {
            let k = SpectralKernel::standard(fam, 2).unwrap();
            for part in Part::ALL {
                let p = k.part(part);
                let c = p.log_envelope_bound().exp();
                for _ in 0..10_000 {
                    let w = [rng.random_range(-6.0..6.0), rng.random_range(-6.0..6.0)];
                    let g = k.log_envelope(&w).exp();
                    assert!(p.eval(&w).unwrap() <= c * g + 1e-12);
                }
            }
        }
    }

    #[test]
    fn bank_csv_round_trip() {
        let k = SpectralKernel::standard(Family::ShiftGaussian, 2).unwrap();
        let bank = FrequencyBank::sample(&k, 9, 5).unwrap();
        let dir = tempfile::tempdir().unwrap();
        bank.save_dir(dir.path()).unwrap();
        let back = FrequencyBank::load_dir(dir.path()).unwrap();
        assert_eq!(back, bank);

        let mut buf = Vec::new();
        bank.write_part_csv(Part::ImagPos, &mut buf).unwrap();
        let text = String::from_utf8(buf).unwrap();
        assert!(text.starts_with(r#"# {"m":9,"d":2,"seed":5,"part":"imag_pos"}"#));
        let truncated: String = text.lines().take(4).map(|l| format!("{l}\n")).collect();
        assert!(matches!(read_part_csv(truncated.as_bytes()), Err(Error::Format { .. })));
    }
}
