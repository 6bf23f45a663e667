//! libsvm-format datasets, min-max normalization and k-fold splits.

use std::collections::BTreeSet;
use std::io::{BufRead, Write};
use std::path::Path;

use ndarray::{Array2, Axis};
use rand::seq::SliceRandom;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

use crate::error::{Error, Result};

/// Sparse rows exactly as read from a libsvm file.
#[derive(Debug, Clone, PartialEq, Default)]
pub struct SparseRows {
    /// `(0-based index, value)` pairs, strictly increasing in index.
    pub rows: Vec<Vec<(usize, f64)>>,
    pub labels: Vec<i64>,
    /// Largest 1-based index observed (0 if every row is empty).
    pub max_index: usize,
}

impl SparseRows {
    pub fn to_dense(&self, dim: usize) -> Result<Array2<f64>> {
        if dim < self.max_index {
            return Err(Error::DimensionMismatch { expected: self.max_index, got: dim });
        }
        let mut x = Array2::zeros((self.rows.len(), dim));
        for (i, row) in self.rows.iter().enumerate() {
            for &(j, v) in row {
                x[[i, j]] = v;
            }
        }
        Ok(x)
    }
}

/// Parse `<label> <idx>:<val> ...` lines with 1-based, strictly increasing indices.
///
/// Blank lines and lines starting with `#` are skipped. Labels must be integral.
pub fn parse_libsvm<R: BufRead>(reader: R) -> Result<SparseRows> {
    let mut out = SparseRows::default();
    for (lineno, line) in reader.lines().enumerate() {
        let line = line?;
        let lineno = lineno + 1;
        let trimmed = line.trim();
        if trimmed.is_empty() || trimmed.starts_with('#') {
            continue;
        }
        let mut tokens = trimmed.split_whitespace();
        let label_tok = tokens.next().expect("non-empty line has a token");
        let label: f64 = label_tok
            .parse()
            .map_err(|_| Error::Parse { line: lineno, msg: format!("bad label {label_tok:?}") })?;
        if label.fract() != 0.0 || !label.is_finite() {
            return Err(Error::Parse { line: lineno, msg: format!("label {label_tok:?} is not an integer") });
        }
        let mut row = Vec::new();
        let mut last = 0usize;
        for tok in tokens {
            let (idx, val) = tok
                .split_once(':')
                .ok_or_else(|| Error::Parse { line: lineno, msg: format!("expected idx:val, got {tok:?}") })?;
            let idx: usize = idx
                .parse()
                .map_err(|_| Error::Parse { line: lineno, msg: format!("bad index {idx:?}") })?;
            let val: f64 = val
                .parse()
                .map_err(|_| Error::Parse { line: lineno, msg: format!("bad value {val:?}") })?;
            if idx == 0 {
                return Err(Error::Format { line: lineno, msg: "indices are 1-based".into() });
            }
            if idx <= last {
                return Err(Error::Format {
                    line: lineno,
                    msg: format!("index {idx} does not increase (previous {last})"),
                });
            }
            last = idx;
            row.push((idx - 1, val));
        }
        out.max_index = out.max_index.max(last);
        out.rows.push(row);
        out.labels.push(label as i64);
    }
    Ok(out)
}

/// Write rows in libsvm format, omitting zero entries.
pub fn write_libsvm<W: Write>(mut w: W, x: &Array2<f64>, labels: &[i64]) -> Result<()> {
    for (row, label) in x.rows().into_iter().zip(labels) {
        write!(w, "{label}")?;
        for (j, v) in row.iter().enumerate() {
            if *v != 0.0 {
                write!(w, " {}:{v:?}", j + 1)?;
            }
        }
        writeln!(w)?;
    }
    Ok(())
}

#[derive(Debug, Clone, PartialEq)]
pub struct Dataset {
    pub name: String,
    pub x: Array2<f64>,
    pub y: Vec<i64>,
    /// Per-feature minimum of the training portion, once normalized.
    pub feature_min: Option<Vec<f64>>,
    pub feature_max: Option<Vec<f64>>,
}

impl Dataset {
    pub fn new(name: impl Into<String>, x: Array2<f64>, y: Vec<i64>) -> Self {
        Self { name: name.into(), x, y, feature_min: None, feature_max: None }
    }

    pub fn len(&self) -> usize {
        self.x.nrows()
    }

    pub fn is_empty(&self) -> bool {
        self.x.nrows() == 0
    }

    pub fn dim(&self) -> usize {
        self.x.ncols()
    }

    pub fn classes(&self) -> Vec<i64> {
        self.y.iter().copied().collect::<BTreeSet<_>>().into_iter().collect()
    }

    pub fn select(&self, idx: &[usize]) -> Dataset {
        Dataset {
            name: self.name.clone(),
            x: self.x.select(Axis(0), idx),
            y: idx.iter().map(|&i| self.y[i]).collect(),
            feature_min: self.feature_min.clone(),
            feature_max: self.feature_max.clone(),
        }
    }

    /// Keep at most `cap` rows, chosen by a seeded shuffle (order preserved).
    pub fn subsample(&self, cap: usize, seed: u64) -> Dataset {
        if self.len() <= cap {
            return self.clone();
        }
        let mut idx: Vec<usize> = (0..self.len()).collect();
        idx.shuffle(&mut ChaCha8Rng::seed_from_u64(seed));
        idx.truncate(cap);
        idx.sort_unstable();
        self.select(&idx)
    }
}

/// Map a two-class label set onto `{−1, +1}` (smaller label → −1) for both
/// datasets, using the training labels to fix the mapping. Multiclass sets are
/// returned unchanged.
pub fn map_binary_labels(train: &mut Dataset, test: &mut Dataset) {
    let classes = train.classes();
    if classes.len() != 2 {
        return;
    }
    let (lo, hi) = (classes[0], classes[1]);
    for ds in [train, test] {
        for y in ds.y.iter_mut() {
            if *y == lo {
                *y = -1;
            } else if *y == hi {
                *y = 1;
            }
        }
    }
}

/// Load a train/test pair with aligned dimensionality (max index over both files).
pub fn load_pair(train_path: &Path, test_path: &Path) -> Result<(Dataset, Dataset)> {
    let open = |p: &Path| -> Result<SparseRows> {
        let f = std::fs::File::open(p).map_err(|e| {
            Error::Io(std::io::Error::new(e.kind(), format!("{}: {e}", p.display())))
        })?;
        parse_libsvm(std::io::BufReader::new(f))
    };
    let train = open(train_path)?;
    let test = open(test_path)?;
    let dim = train.max_index.max(test.max_index);
    let name = train_path.file_stem().map(|s| s.to_string_lossy().into_owned()).unwrap_or_default();
    let mut tr = Dataset::new(name.clone(), train.to_dense(dim)?, train.labels);
    let mut te = Dataset::new(name, test.to_dense(dim)?, test.labels);
    map_binary_labels(&mut tr, &mut te);
    Ok((tr, te))
}

/// Affine per-feature map to `[0, 1]` fitted on `train`; constant training
/// features map to 0 and test values are clipped to `[0, 1]`.
pub fn normalize_minmax(train: &Dataset, test: &Dataset) -> Result<(Dataset, Dataset)> {
    if train.dim() != test.dim() {
        return Err(Error::DimensionMismatch { expected: train.dim(), got: test.dim() });
    }
    let d = train.dim();
    let mut lo = vec![f64::INFINITY; d];
    let mut hi = vec![f64::NEG_INFINITY; d];
    for row in train.x.rows() {
        for (j, &v) in row.iter().enumerate() {
            lo[j] = lo[j].min(v);
            hi[j] = hi[j].max(v);
        }
    }
    if train.is_empty() {
        lo.fill(0.0);
        hi.fill(0.0);
    }
    let apply = |ds: &Dataset, clip: bool| -> Dataset {
        let mut x = ds.x.clone();
        for mut row in x.rows_mut() {
            for (j, v) in row.iter_mut().enumerate() {
                let range = hi[j] - lo[j];
                *v = if range > 0.0 { (*v - lo[j]) / range } else { 0.0 };
                if clip {
                    *v = v.clamp(0.0, 1.0);
                }
            }
        }
        Dataset {
            name: ds.name.clone(),
            x,
            y: ds.y.clone(),
            feature_min: Some(lo.clone()),
            feature_max: Some(hi.clone()),
        }
    };
    Ok((apply(train, false), apply(test, true)))
}

/// Shuffled `k`-fold partition of `0..n`: a list of (train, validation) index sets.
pub fn kfold_split(n: usize, k: usize, seed: u64) -> Result<Vec<(Vec<usize>, Vec<usize>)>> {
    if k < 2 {
        return Err(Error::InvalidParameter(format!("need at least 2 folds, got {k}")));
    }
    if k > n {
        return Err(Error::InvalidParameter(format!("{k} folds for {n} samples")));
    }
    let mut perm: Vec<usize> = (0..n).collect();
    perm.shuffle(&mut ChaCha8Rng::seed_from_u64(seed));
    let base = n / k;
    let extra = n % k;
    let mut folds = Vec::with_capacity(k);
    let mut start = 0;
    for f in 0..k {
        let len = base + usize::from(f < extra);
        let mut val = perm[start..start + len].to_vec();
        val.sort_unstable();
        let mut train: Vec<usize> = perm[..start].iter().chain(&perm[start + len..]).copied().collect();
        train.sort_unstable();
        folds.push((train, val));
        start += len;
    }
    Ok(folds)
}
