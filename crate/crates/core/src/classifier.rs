//! L2-regularized squared-hinge linear SVM (primal), one-vs-rest for multiclass.
//!
//! Minimizes `½‖w‖² + C·Σᵢ max(0, 1 − yᵢ(wᵀxᵢ + b))²` with an unregularized
//! bias using a generalized Newton method: conjugate-gradient steps on the
//! generalized Hessian `I + 2C·Σ_active x̃ᵢx̃ᵢᵀ` and a backtracking line search.

use std::collections::BTreeSet;
use std::path::Path;

use ndarray::{Array1, ArrayView1, ArrayView2};
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::dataio::kfold_split;
use crate::error::{Error, Result};
use crate::features::FeatureLayout;

/// Relative gradient-norm tolerance of the Newton solver.
pub const GRAD_TOL: f64 = 1e-6;
const MAX_NEWTON_ITERS: usize = 200;
pub const CV_FOLDS: usize = 5;

/// `C = 2⁻⁵, …, 2⁵`.
pub fn default_c_grid() -> Vec<f64> {
    (-5..=5).map(|e| 2f64.powi(e)).collect()
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct LinearModel {
    pub weights: Vec<f64>,
    pub bias: f64,
    pub c: f64,
}

impl LinearModel {
    pub fn decision(&self, x: ArrayView1<'_, f64>) -> f64 {
        x.iter().zip(&self.weights).map(|(a, b)| a * b).sum::<f64>() + self.bias
    }
}

/// Primal objective at `(w, b)`.
pub fn objective(features: ArrayView2<'_, f64>, labels: &[f64], w: ArrayView1<'_, f64>, b: f64, c: f64) -> f64 {
    let z = features.dot(&w);
    let loss: f64 = z
        .iter()
        .zip(labels)
        .map(|(zi, yi)| (1.0 - yi * (zi + b)).max(0.0).powi(2))
        .sum();
    0.5 * w.dot(&w) + c * loss
}

/// Train a binary model; `labels` must be ±1 with both classes present.
pub fn train(features: ArrayView2<'_, f64>, labels: &[i64], c: f64) -> Result<LinearModel> {
    let n = features.nrows();
    if labels.len() != n {
        return Err(Error::DimensionMismatch { expected: n, got: labels.len() });
    }
    if !(c.is_finite() && c > 0.0) {
        return Err(Error::InvalidParameter(format!("C must be positive, got {c}")));
    }
    if labels.iter().any(|&y| y != 1 && y != -1) {
        return Err(Error::InvalidParameter("binary labels must be -1 or +1".into()));
    }
    if n < 2 || !labels.contains(&1) || !labels.contains(&-1) {
        return Err(Error::SingleClass);
    }
    let y: Vec<f64> = labels.iter().map(|&v| v as f64).collect();
    let (w, b) = newton_solve(features, &y, c);
    Ok(LinearModel { weights: w.to_vec(), bias: b, c })
}

fn newton_solve(x: ArrayView2<'_, f64>, y: &[f64], c: f64) -> (Array1<f64>, f64) {
    let p = x.ncols();
    let mut w = Array1::<f64>::zeros(p);
    let mut b = 0.0;

    // Returns (objective, grad_w, grad_b, active coefficients 2C·1[active]).
    let evaluate = |w: &Array1<f64>, b: f64| {
        let z = x.dot(w);
        let mut resid = Array1::<f64>::zeros(y.len());
        let mut active = Array1::<f64>::zeros(y.len());
        let mut loss = 0.0;
        for i in 0..y.len() {
            let m = 1.0 - y[i] * (z[i] + b);
            if m > 0.0 {
                loss += m * m;
                resid[i] = y[i] * m;
                active[i] = 2.0 * c;
            }
        }
        let gw = w - &(x.t().dot(&resid) * (2.0 * c));
        let gb = -2.0 * c * resid.sum();
        (0.5 * w.dot(w) + c * loss, gw, gb, active)
    };

    let (mut f, mut gw, mut gb, mut active) = evaluate(&w, b);
    let g0 = (gw.dot(&gw) + gb * gb).sqrt();
    for _ in 0..MAX_NEWTON_ITERS {
        let gnorm = (gw.dot(&gw) + gb * gb).sqrt();
        if gnorm <= GRAD_TOL * g0 {
            break;
        }
        let (dw, db) = cg_direction(x, &active, &gw, gb, gnorm);
        let slope = gw.dot(&dw) + gb * db;
        if slope >= 0.0 {
            break;
        }
        let mut step = 1.0;
        let mut accepted = false;
        for _ in 0..60 {
            let w_new = &w + &(&dw * step);
            let b_new = b + step * db;
            let (f_new, gw_new, gb_new, act_new) = evaluate(&w_new, b_new);
            if f_new <= f + 1e-4 * step * slope {
                w = w_new;
                b = b_new;
                f = f_new;
                gw = gw_new;
                gb = gb_new;
                active = act_new;
                accepted = true;
                break;
            }
            step *= 0.5;
        }
        if !accepted {
            break;
        }
    }
    (w, b)
}

/// Approximately solve `H d = −g` by conjugate gradients.
fn cg_direction(
    x: ArrayView2<'_, f64>,
    active: &Array1<f64>,
    gw: &Array1<f64>,
    gb: f64,
    gnorm: f64,
) -> (Array1<f64>, f64) {
    // Tiny bias damping keeps H positive definite when no sample is active.
    const BIAS_DAMPING: f64 = 1e-10;
    let hess = |vw: &Array1<f64>, vb: f64| -> (Array1<f64>, f64) {
        let mut u = x.dot(vw);
        u.mapv_inplace(|t| t + vb);
        u *= active;
        (vw + &x.t().dot(&u), u.sum() + BIAS_DAMPING * vb)
    };
    let tol = (0.1f64).min(gnorm.sqrt()) * gnorm;
    let mut dw = Array1::<f64>::zeros(gw.len());
    let mut db = 0.0;
    let mut rw = -gw.clone();
    let mut rb = -gb;
    let mut pw = rw.clone();
    let mut pb = rb;
    let mut rr = rw.dot(&rw) + rb * rb;
    let max_iter = 2 * (gw.len() + 1) + 20;
    for _ in 0..max_iter {
        if rr.sqrt() <= tol {
            break;
        }
        let (hw, hb) = hess(&pw, pb);
        let php = pw.dot(&hw) + pb * hb;
        if php <= 0.0 {
            break;
        }
        let alpha = rr / php;
        dw.scaled_add(alpha, &pw);
        db += alpha * pb;
        rw.scaled_add(-alpha, &hw);
        rb -= alpha * hb;
        let rr_new = rw.dot(&rw) + rb * rb;
        let beta = rr_new / rr;
        pw = &rw + &(&pw * beta);
        pb = rb + beta * pb;
        rr = rr_new;
    }
    if dw.iter().all(|v| *v == 0.0) && db == 0.0 {
        // CG made no progress: fall back to steepest descent.
        return (-gw.clone(), -gb);
    }
    (dw, db)
}

/// A trained binary or one-vs-rest classifier.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct LinearClassifier {
    /// Sorted class labels. Binary models score `classes[1]` positive.
    pub classes: Vec<i64>,
    pub models: Vec<LinearModel>,
    pub layout: FeatureLayout,
}

impl LinearClassifier {
    pub fn fit(features: ArrayView2<'_, f64>, labels: &[i64], c: f64, layout: FeatureLayout) -> Result<Self> {
        if layout.width() != features.ncols() {
            return Err(Error::DimensionMismatch { expected: layout.width(), got: features.ncols() });
        }
        let classes: Vec<i64> = labels.iter().copied().collect::<BTreeSet<_>>().into_iter().collect();
        if classes.len() < 2 {
            return Err(Error::SingleClass);
        }
        let targets: Vec<i64> = if classes.len() == 2 { vec![classes[1]] } else { classes.clone() };
        let models = targets
            .par_iter()
            .map(|&positive| {
                let y: Vec<i64> = labels.iter().map(|&l| if l == positive { 1 } else { -1 }).collect();
                train(features, &y, c)
            })
            .collect::<Result<Vec<_>>>()?;
        Ok(Self { classes, models, layout })
    }

    pub fn width(&self) -> usize {
        self.layout.width()
    }

    pub fn predict(&self, features: ArrayView2<'_, f64>) -> Result<Vec<i64>> {
        if features.ncols() != self.width() {
            return Err(Error::DimensionMismatch { expected: self.width(), got: features.ncols() });
        }
        Ok(features
            .rows()
            .into_iter()
            .map(|row| {
                if self.models.len() == 1 {
                    if self.models[0].decision(row) >= 0.0 {
                        self.classes[1]
                    } else {
                        self.classes[0]
                    }
                } else {
                    let best = self
                        .models
                        .iter()
                        .enumerate()
                        .map(|(k, m)| (k, m.decision(row)))
                        .fold((0, f64::NEG_INFINITY), |acc, cur| if cur.1 > acc.1 { cur } else { acc });
                    self.classes[best.0]
                }
            })
            .collect())
    }

    pub fn save(&self, path: &Path) -> Result<()> {
        let f = std::fs::File::create(path)?;
        serde_json::to_writer_pretty(std::io::BufWriter::new(f), self)?;
        Ok(())
    }

    pub fn load(path: &Path) -> Result<Self> {
        let f = std::fs::File::open(path)?;
        Ok(serde_json::from_reader(std::io::BufReader::new(f))?)
    }
}

/// Fraction of correctly predicted labels.
pub fn evaluate(model: &LinearClassifier, features: ArrayView2<'_, f64>, labels: &[i64]) -> Result<f64> {
    if labels.len() != features.nrows() {
        return Err(Error::DimensionMismatch { expected: features.nrows(), got: labels.len() });
    }
    if labels.is_empty() {
        return Ok(f64::NAN);
    }
    let pred = model.predict(features)?;
    let hits = pred.iter().zip(labels).filter(|(p, y)| p == y).count();
    Ok(hits as f64 / labels.len() as f64)
}

/// Validation accuracy per (C, fold).
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct CvTable {
    pub grid: Vec<f64>,
    /// `accuracy[i][f]` for `grid[i]` on fold `f`.
    pub accuracy: Vec<Vec<f64>>,
}

impl CvTable {
    pub fn mean_accuracy(&self) -> Vec<f64> {
        self.accuracy.iter().map(|r| r.iter().sum::<f64>() / r.len() as f64).collect()
    }
}

/// Pick the `C` with the best mean 5-fold validation accuracy; ties go to the smaller `C`.
pub fn cv_select(
    features: ArrayView2<'_, f64>,
    labels: &[i64],
    grid: &[f64],
    layout: &FeatureLayout,
    seed: u64,
) -> Result<(f64, CvTable)> {
    if grid.is_empty() {
        return Err(Error::InvalidParameter("C grid is empty".into()));
    }
    let folds = kfold_split(features.nrows(), CV_FOLDS, seed)?;
    let accuracy = grid
        .par_iter()
        .map(|&c| {
            folds
                .iter()
                .map(|(tr, va)| {
                    let xt = features.select(ndarray::Axis(0), tr);
                    let yt: Vec<i64> = tr.iter().map(|&i| labels[i]).collect();
                    let xv = features.select(ndarray::Axis(0), va);
                    let yv: Vec<i64> = va.iter().map(|&i| labels[i]).collect();
                    let model = LinearClassifier::fit(xt.view(), &yt, c, layout.clone())?;
                    evaluate(&model, xv.view(), &yv)
                })
                .collect::<Result<Vec<f64>>>()
        })
        .collect::<Result<Vec<_>>>()?;
    let table = CvTable { grid: grid.to_vec(), accuracy };
    let means = table.mean_accuracy();
    let mut best = 0;
    for i in 1..grid.len() {
        let better = means[i] > means[best];
        let tie_smaller = means[i] == means[best] && grid[i] < grid[best];
        if better || tie_smaller {
            best = i;
        }
    }
    Ok((grid[best], table))
}
