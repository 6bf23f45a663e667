//! End-to-end experiment drivers behind the `askrff` binary.
//!
//! Every command is a pure function of its [`ExperimentConfig`]: the seed list
//! fixes banks, subsets, folds and synthetic data. Trials run in parallel and
//! are emitted ordered by (kernel, M, trial).

use std::io::Write;
use std::path::{Path, PathBuf};
use std::time::Instant;

use ndarray::{Array2, ArrayView2, Axis};
use rand::seq::index::sample as sample_indices;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rand_distr::StandardNormal;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::classifier::{cv_select, default_c_grid, evaluate, LinearClassifier};
use crate::dataio::{load_pair, normalize_minmax, Dataset};
use crate::error::{Error, Result};
use crate::evalbench::{gram_approx, gram_exact, relative_error, sup_error_grid};
use crate::features::{FeatureLayout, FeatureMap, Side};
use crate::masses::{masses_quadrature, masses_subset_ls, MassSet};
use crate::quadrature::MAX_DIM;
use crate::sampler::FrequencyBank;
use crate::spectral::{Family, KernelConfig, SpectralKernel};
use crate::stats::{mean, std_dev};

/// Training rows kept by `classify` unless `full` is set.
pub const DESK_TRAIN_CAP: usize = 10_000;
/// Lag grid used for the sup error: 101 points along the unit diagonal, `|t| ≤ 3`.
pub const SUP_GRID_POINTS: usize = 101;
pub const SUP_GRID_RADIUS: f64 = 3.0;
/// RNG stream for subset / synthetic draws, disjoint from the sampler's part streams.
const AUX_STREAM: u64 = 16;

#[derive(Debug, Clone, Default, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct DataConfig {
    /// libsvm training file; relative paths resolve against the data directory.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub train: Option<PathBuf>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub test: Option<PathBuf>,
    /// Synthetic data dimension when no files are given.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub dim: Option<usize>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ExperimentConfig {
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub kernel: Option<KernelConfig>,
    /// Alternative to `kernel`; defaults to the three asymmetric families.
    #[serde(default, skip_serializing_if = "Vec::is_empty")]
    pub kernels: Vec<KernelConfig>,
    /// Feature counts (per bank). `masses` and `classify` use these directly.
    #[serde(default, skip_serializing_if = "Vec::is_empty")]
    pub m: Vec<usize>,
    /// `M/d` multipliers for `approx`; defaults to `2¹, …, 2¹⁰`.
    #[serde(default, skip_serializing_if = "Vec::is_empty")]
    pub m_over_d: Vec<usize>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub n_s: Option<usize>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub seeds: Option<Vec<u64>>,
    /// First seed when `seeds` is absent; trial `t` uses `seed + t`.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub seed: Option<u64>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub trials: Option<usize>,
    /// Number of data points (synthetic size or subsample cap for `approx`).
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub points: Option<usize>,
    #[serde(default)]
    pub data: DataConfig,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub data_dir: Option<PathBuf>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub out: Option<PathBuf>,
    /// Record wall times; disable for byte-identical output.
    #[serde(default = "default_true")]
    pub timing: bool,
    /// Skip the desk-scale training cap.
    #[serde(default)]
    pub full: bool,
}

fn default_true() -> bool {
    true
}

impl Default for ExperimentConfig {
    fn default() -> Self {
        Self::from_json_str("{}").expect("empty config is valid")
    }
}

impl ExperimentConfig {
    pub fn from_json_str(s: &str) -> Result<Self> {
        serde_json::from_str(s).map_err(|e| Error::Config(e.to_string()))
    }

    pub fn from_path(path: &Path) -> Result<Self> {
        let text = std::fs::read_to_string(path)
            .map_err(|e| Error::Io(std::io::Error::new(e.kind(), format!("{}: {e}", path.display()))))?;
        Self::from_json_str(&text)
    }

    /// Resolved trial seeds.
    pub fn seed_list(&self) -> Result<Vec<u64>> {
        match (&self.seeds, self.trials) {
            (Some(s), Some(t)) if s.len() != t => Err(Error::Config(format!(
                "trials = {t} but {} seeds were given",
                s.len()
            ))),
            (Some(s), _) if s.is_empty() => Err(Error::Config("seed list is empty".into())),
            (Some(s), _) => Ok(s.clone()),
            (None, t) => {
                let t = t.unwrap_or(10);
                if t == 0 {
                    return Err(Error::Config("trials must be positive".into()));
                }
                let base = self.seed.unwrap_or(0);
                Ok((0..t as u64).map(|i| base.wrapping_add(i)).collect())
            }
        }
    }

    fn base_seed(&self) -> Result<u64> {
        Ok(self.seed_list()?[0])
    }

    pub fn kernel_configs(&self) -> Result<Vec<KernelConfig>> {
        match (&self.kernel, self.kernels.is_empty()) {
            (Some(_), false) => Err(Error::Config("give either `kernel` or `kernels`, not both".into())),
            (Some(k), true) => Ok(vec![k.clone()]),
            (None, false) => Ok(self.kernels.clone()),
            (None, true) => Ok(Family::ASYMMETRIC.iter().map(|&f| KernelConfig::new(f)).collect()),
        }
    }

    fn n_s(&self, default: usize) -> Result<usize> {
        match self.n_s.unwrap_or(default) {
            0 => Err(Error::Config("n_s must be positive".into())),
            n => Ok(n),
        }
    }

    fn resolve(&self, p: &Path) -> PathBuf {
        match &self.data_dir {
            Some(dir) if p.is_relative() => dir.join(p),
            _ => p.to_path_buf(),
        }
    }

    fn elapsed_ms(&self, start: Instant) -> f64 {
        if self.timing {
            start.elapsed().as_secs_f64() * 1e3
        } else {
            0.0
        }
    }
}

/// Synthetic data generators used when no files are configured.
pub mod synthetic {
    use super::*;

    fn rng(seed: u64) -> ChaCha8Rng {
        let mut r = ChaCha8Rng::seed_from_u64(seed);
        r.set_stream(AUX_STREAM);
        r
    }

    pub fn standard_normal(n: usize, d: usize, seed: u64) -> Array2<f64> {
        let mut r = rng(seed);
        Array2::from_shape_simple_fn((n, d), || r.sample(StandardNormal))
    }

    pub fn uniform(n: usize, d: usize, seed: u64) -> Array2<f64> {
        let mut r = rng(seed);
        Array2::from_shape_simple_fn((n, d), || r.random::<f64>())
    }

    /// Binary "ring": label +1 iff `‖x − ½‖²` exceeds its median, with a
    /// fraction `noise` of labels flipped. `x` is uniform on `[0, 1]^d`.
    pub fn ring(n: usize, d: usize, noise: f64, seed: u64) -> Dataset {
        let x = uniform(n, d, seed);
        let r2: Vec<f64> = x.rows().into_iter().map(|row| row.iter().map(|v| (v - 0.5).powi(2)).sum()).collect();
        let mut sorted = r2.clone();
        sorted.sort_by(f64::total_cmp);
        let median = sorted[n / 2];
        let mut r = rng(seed ^ 0x9e37_79b9_7f4a_7c15);
        let y = r2
            .iter()
            .map(|&v| {
                let label = if v > median { 1 } else { -1 };
                if r.random::<f64>() < noise {
                    -label
                } else {
                    label
                }
            })
            .collect();
        Dataset::new("ring", x, y)
    }

    /// Binary labels from the sign of a random quadratic form plus a linear
    /// term, `x ~ N(0, I)`; a fraction `noise` of labels is flipped.
    pub fn quadratic(n: usize, d: usize, noise: f64, seed: u64) -> Dataset {
        let x = standard_normal(n, d, seed);
        let mut r = rng(seed ^ 0x51_7cc1_b727_220a);
        let a = Array2::from_shape_simple_fn((d, d), || r.sample::<f64, _>(StandardNormal));
        let a = (&a + &a.t()) * 0.5;
        let b: Vec<f64> = (0..d).map(|_| r.sample::<f64, _>(StandardNormal)).collect();
        let scores: Vec<f64> = x
            .rows()
            .into_iter()
            .map(|row| {
                let ax = a.dot(&row);
                row.dot(&ax) + row.iter().zip(&b).map(|(p, q)| p * q).sum::<f64>()
            })
            .collect();
        let mut sorted = scores.clone();
        sorted.sort_by(f64::total_cmp);
        let median = sorted[n / 2];
        let y = scores
            .iter()
            .map(|&s| {
                let label = if s > median { 1 } else { -1 };
                if r.random::<f64>() < noise {
                    -label
                } else {
                    label
                }
            })
            .collect();
        Dataset::new("quadratic", x, y)
    }

    /// Split the first `n_train` rows off as training data.
    pub fn split(ds: &Dataset, n_train: usize) -> (Dataset, Dataset) {
        let n_train = n_train.min(ds.len());
        let train: Vec<usize> = (0..n_train).collect();
        let test: Vec<usize> = (n_train..ds.len()).collect();
        (ds.select(&train), ds.select(&test))
    }
}

/// `n_s` distinct rows of `data` chosen by `seed`.
pub fn subset_rows(data: ArrayView2<'_, f64>, n_s: usize, seed: u64) -> Result<Array2<f64>> {
    if n_s > data.nrows() {
        return Err(Error::InvalidParameter(format!("subset of {n_s} from {} rows", data.nrows())));
    }
    let mut r = ChaCha8Rng::seed_from_u64(seed);
    r.set_stream(AUX_STREAM);
    let mut idx = sample_indices(&mut r, data.nrows(), n_s).into_vec();
    idx.sort_unstable();
    Ok(data.select(Axis(0), &idx))
}

/// Sample a bank and fit masses on a subset: one run of the full estimator.
pub fn fit_feature_map(
    kernel: &SpectralKernel,
    m: usize,
    data: ArrayView2<'_, f64>,
    n_s: usize,
    seed: u64,
) -> Result<FeatureMap> {
    let bank = FrequencyBank::sample(kernel, m, seed)?;
    let subset = subset_rows(data, n_s, seed)?;
    let masses = masses_subset_ls(kernel, &bank, subset.view())?;
    FeatureMap::new(bank, masses)
}

// ---------------------------------------------------------------- masses

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct MassTrial {
    pub seed: u64,
    pub xi1: f64,
    pub xi2: f64,
    pub xi3: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct MassSweepPoint {
    pub m: usize,
    pub trials: Vec<MassTrial>,
    /// `[ξ1, ξ2, ξ3]` over trials.
    pub mean: [f64; 3],
    pub std: [f64; 3],
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct KernelMassReport {
    pub kernel: String,
    pub config: KernelConfig,
    /// Reference masses by quadrature; absent for `d > 3`.
    pub quadrature: Option<MassSet>,
    pub sweep: Vec<MassSweepPoint>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct MassReport {
    pub n_s: usize,
    pub points: usize,
    pub dim: usize,
    pub seeds: Vec<u64>,
    pub kernels: Vec<KernelMassReport>,
}

fn load_or_synthesize(cfg: &ExperimentConfig, default_points: usize, default_dim: usize, normal: bool) -> Result<Array2<f64>> {
    let seed = cfg.base_seed()?;
    if let Some(train) = &cfg.data.train {
        let test = cfg.data.test.clone().unwrap_or_else(|| train.clone());
        let (tr, te) = load_pair(&cfg.resolve(train), &cfg.resolve(&test))?;
        let (tr, _) = normalize_minmax(&tr, &te)?;
        let cap = cfg.points.unwrap_or(default_points);
        return Ok(tr.subsample(cap, seed).x);
    }
    let n = cfg.points.unwrap_or(default_points);
    let d = cfg.data.dim.unwrap_or(default_dim);
    if n == 0 || d == 0 {
        return Err(Error::Config("synthetic data needs positive points and dim".into()));
    }
    Ok(if normal { synthetic::standard_normal(n, d, seed) } else { synthetic::uniform(n, d, seed) })
}

fn kernel_dim_hint(cfg: &ExperimentConfig) -> Result<Option<usize>> {
    let mut hint = cfg.data.dim;
    for k in cfg.kernel_configs()? {
        let own = k.dim.or(k.shift.as_ref().map(Vec::len)).or(k.skew.as_ref().map(Vec::len));
        hint = hint.or(own);
    }
    Ok(hint)
}

/// Subset-LS masses per trial and per `M`, against quadrature references.
/// Defaults: 2000 standard-normal points, `N_s = 50`, `M ∈ {2⁴, 2¹⁰}`.
pub fn cmd_masses(cfg: &ExperimentConfig) -> Result<MassReport> {
    let seeds = cfg.seed_list()?;
    let n_s = cfg.n_s(50)?;
    let ms = if cfg.m.is_empty() { vec![16, 1024] } else { cfg.m.clone() };
    if ms.contains(&0) {
        return Err(Error::Config("M must be positive".into()));
    }
    let dim_hint = kernel_dim_hint(cfg)?.unwrap_or(1);
    let data = load_or_synthesize(cfg, 2000, dim_hint, true)?;
    let mut kernels = Vec::new();
    for kc in cfg.kernel_configs()? {
        let kernel = kc.build(Some(data.ncols()))?;
        let quadrature = if kernel.dim() <= MAX_DIM { Some(masses_quadrature(&kernel)?) } else { None };
        let mut sweep = Vec::new();
        for &m in &ms {
            let trials = seeds
                .par_iter()
                .map(|&seed| {
                    let map = fit_feature_map(&kernel, m, data.view(), n_s, seed)?;
                    let ms = map.masses();
                    Ok(MassTrial { seed, xi1: ms.xi1, xi2: ms.xi2, xi3: ms.xi3 })
                })
                .collect::<Result<Vec<_>>>()?;
            let col = |f: fn(&MassTrial) -> f64| trials.iter().map(f).collect::<Vec<_>>();
            let cols = [col(|t| t.xi1), col(|t| t.xi2), col(|t| t.xi3)];
            sweep.push(MassSweepPoint {
                m,
                mean: [mean(&cols[0]), mean(&cols[1]), mean(&cols[2])],
                std: [std_dev(&cols[0]), std_dev(&cols[1]), std_dev(&cols[2])],
                trials,
            });
        }
        kernels.push(KernelMassReport { kernel: kernel.family().name().into(), config: kc, quadrature, sweep });
    }
    Ok(MassReport { n_s, points: data.nrows(), dim: data.ncols(), seeds, kernels })
}

// ---------------------------------------------------------------- approx

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ApproxRow {
    pub kernel: String,
    #[serde(rename = "M")]
    pub m: usize,
    pub trial: usize,
    pub rel_error: f64,
    pub sup_error: f64,
    pub wall_time_ms: f64,
}

/// Lag grid for the sup error: `t·(1, …, 1)/√d`, `t ∈ [−3, 3]`.
pub fn diagonal_grid(d: usize) -> Vec<Vec<f64>> {
    let u = 1.0 / (d as f64).sqrt();
    (0..SUP_GRID_POINTS)
        .map(|i| {
            let t = -SUP_GRID_RADIUS + 2.0 * SUP_GRID_RADIUS * i as f64 / (SUP_GRID_POINTS - 1) as f64;
            vec![t * u; d]
        })
        .collect()
}

/// Relative Gram error sweep. Defaults: 1000 uniform points in `[0, 1]^8`,
/// `M/d ∈ {2¹, …, 2¹⁰}`, `N_s = 50`.
pub fn cmd_approx(cfg: &ExperimentConfig) -> Result<Vec<ApproxRow>> {
    let seeds = cfg.seed_list()?;
    let n_s = cfg.n_s(50)?;
    let mults = if cfg.m_over_d.is_empty() { (1..=10).map(|e| 1usize << e).collect() } else { cfg.m_over_d.clone() };
    if mults.contains(&0) {
        return Err(Error::Config("M/d must be positive".into()));
    }
    let dim_hint = kernel_dim_hint(cfg)?.unwrap_or(8);
    let data = load_or_synthesize(cfg, 1000, dim_hint, false)?;
    let d = data.ncols();
    let grid = diagonal_grid(d);
    let mut rows = Vec::new();
    for kc in cfg.kernel_configs()? {
        let kernel = kc.build(Some(d))?;
        let exact = gram_exact(&kernel, data.view(), data.view())?;
        for &mult in &mults {
            let m = mult * d;
            let batch = seeds
                .par_iter()
                .enumerate()
                .map(|(trial, &seed)| {
                    let start = Instant::now();
                    let map = fit_feature_map(&kernel, m, data.view(), n_s, seed)?;
                    let approx = gram_approx(&map, data.view(), data.view())?;
                    let wall_time_ms = cfg.elapsed_ms(start);
                    Ok(ApproxRow {
                        kernel: kernel.family().name().into(),
                        m,
                        trial,
                        rel_error: relative_error(exact.view(), approx.view())?,
                        sup_error: sup_error_grid(&kernel, &map, &grid)?,
                        wall_time_ms,
                    })
                })
                .collect::<Result<Vec<_>>>()?;
            rows.extend(batch);
        }
    }
    Ok(rows)
}

pub fn write_approx_csv<W: Write>(rows: &[ApproxRow], w: W) -> Result<()> {
    let mut out = csv::Writer::from_writer(w);
    for r in rows {
        out.serialize(r)?;
    }
    out.flush()?;
    Ok(())
}

// ---------------------------------------------------------------- classify

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct AccuracySummary {
    pub mean: f64,
    pub std: f64,
    pub per_seed: Vec<f64>,
    /// Cross-validated `C` per seed.
    pub c: Vec<f64>,
}

impl AccuracySummary {
    fn from_runs(runs: Vec<(f64, f64)>) -> Self {
        let per_seed: Vec<f64> = runs.iter().map(|r| r.0).collect();
        Self { mean: mean(&per_seed), std: std_dev(&per_seed), c: runs.iter().map(|r| r.1).collect(), per_seed }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct KernelAccuracy {
    pub kernel: String,
    pub asymmetric: AccuracySummary,
    /// Features of the symmetric part only (sine block dropped).
    pub symmetrized: AccuracySummary,
    /// Mean bank sampling time.
    pub sampling_ms: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ClassifySweepPoint {
    pub m: usize,
    pub kernels: Vec<KernelAccuracy>,
    /// Gaussian kernel, `σ = 2`, same `M`.
    pub rbf: AccuracySummary,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ClassifyReport {
    pub dataset: String,
    pub n_train: usize,
    pub n_test: usize,
    pub dim: usize,
    pub classes: Vec<i64>,
    pub n_s: usize,
    pub seeds: Vec<u64>,
    pub c_grid: Vec<f64>,
    pub linear: AccuracySummary,
    pub sweep: Vec<ClassifySweepPoint>,
}

/// CV-select `C`, refit on all training rows, return (test accuracy, C).
pub fn fit_and_score(
    train_x: ArrayView2<'_, f64>,
    train_y: &[i64],
    test_x: ArrayView2<'_, f64>,
    test_y: &[i64],
    layout: FeatureLayout,
    seed: u64,
) -> Result<(f64, f64)> {
    let (c, _) = cv_select(train_x, train_y, &default_c_grid(), &layout, seed)?;
    let model = LinearClassifier::fit(train_x, train_y, c, layout)?;
    Ok((evaluate(&model, test_x, test_y)?, c))
}

/// Classification with random features: normalize, cap, then per seed and
/// kernel sample, fit masses, transform, cross-validate and test.
pub fn cmd_classify(cfg: &ExperimentConfig) -> Result<ClassifyReport> {
    let (train, test) = match (&cfg.data.train, &cfg.data.test) {
        (Some(tr), Some(te)) => load_pair(&cfg.resolve(tr), &cfg.resolve(te))?,
        _ => return Err(Error::Config("classify needs data.train and data.test".into())),
    };
    classify_datasets(cfg, &train, &test)
}

/// [`cmd_classify`] on in-memory datasets (labels already mapped).
pub fn classify_datasets(cfg: &ExperimentConfig, train: &Dataset, test: &Dataset) -> Result<ClassifyReport> {
    let seeds = cfg.seed_list()?;
    let n_s = cfg.n_s(50)?;
    let (train, test) = normalize_minmax(train, test)?;
    let train = if cfg.full { train } else { train.subsample(DESK_TRAIN_CAP, seeds[0]) };
    if train.classes().len() < 2 {
        return Err(Error::SingleClass);
    }
    let d = train.dim();
    let ms = if cfg.m.is_empty() { vec![2 * d] } else { cfg.m.clone() };
    if ms.contains(&0) {
        return Err(Error::Config("M must be positive".into()));
    }
    let n_s = n_s.min(train.len());
    let kernels = cfg
        .kernel_configs()?
        .iter()
        .map(|k| k.build(Some(d)))
        .collect::<Result<Vec<_>>>()?;
    let rbf_kernel = SpectralKernel::gaussian(d, 2.0)?;

    let linear = seeds
        .par_iter()
        .map(|&seed| fit_and_score(train.x.view(), &train.y, test.x.view(), &test.y, FeatureLayout::raw(d), seed))
        .collect::<Result<Vec<_>>>()?;

    let run = |kernel: &SpectralKernel, m: usize, seed: u64, symmetrize: bool| -> Result<((f64, f64), Option<(f64, f64)>, f64)> {
        let start = Instant::now();
        let bank = FrequencyBank::sample(kernel, m, seed)?;
        let sampling_ms = cfg.elapsed_ms(start);
        let subset = subset_rows(train.x.view(), n_s, seed)?;
        let masses = masses_subset_ls(kernel, &bank, subset.view())?;
        let map = FeatureMap::new(bank, masses)?;
        let score = |map: &FeatureMap| -> Result<(f64, f64)> {
            let ftr = map.transform(train.x.view(), Side::Left)?;
            let fte = map.transform(test.x.view(), Side::Left)?;
            fit_and_score(ftr.view(), &train.y, fte.view(), &test.y, map.layout(Side::Left), seed)
        };
        let asym = score(&map)?;
        let sym = if symmetrize { Some(score(&map.symmetric_part())?) } else { None };
        Ok((asym, sym, sampling_ms))
    };

    let mut sweep = Vec::new();
    for &m in &ms {
        let mut per_kernel = Vec::new();
        for kernel in &kernels {
            let runs = seeds.par_iter().map(|&s| run(kernel, m, s, true)).collect::<Result<Vec<_>>>()?;
            let times: Vec<f64> = runs.iter().map(|r| r.2).collect();
            per_kernel.push(KernelAccuracy {
                kernel: kernel.family().name().into(),
                asymmetric: AccuracySummary::from_runs(runs.iter().map(|r| r.0).collect()),
                symmetrized: AccuracySummary::from_runs(runs.iter().filter_map(|r| r.1).collect()),
                sampling_ms: mean(&times),
            });
        }
        let rbf = seeds.par_iter().map(|&s| run(&rbf_kernel, m, s, false).map(|r| r.0)).collect::<Result<Vec<_>>>()?;
        sweep.push(ClassifySweepPoint { m, kernels: per_kernel, rbf: AccuracySummary::from_runs(rbf) });
    }

    Ok(ClassifyReport {
        dataset: train.name.clone(),
        n_train: train.len(),
        n_test: test.len(),
        dim: d,
        classes: train.classes(),
        n_s,
        seeds,
        c_grid: default_c_grid(),
        linear: AccuracySummary::from_runs(linear),
        sweep,
    })
}
