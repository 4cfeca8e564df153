//! Bag-of-words logistic regression over dense, sparse, or reconstructed
//! embedding features. Training is full-batch gradient descent with a fixed
//! step on standardized features; multiclass problems train one-vs-rest
//! heads so per-class coefficients stay directly readable.

use std::collections::BTreeSet;
use std::fs::File;
use std::io::{BufRead, BufReader};
use std::path::Path;

use crate::basis::BasisSet;
use crate::embedding::EmbeddingSpace;
use crate::encode;
use crate::error::{Error, Result};
use crate::math;
use crate::sparse_io::SparseCollection;

/// Lowercase, split on non-alphanumeric.
pub fn tokenize(text: &str) -> Vec<String> {
    text.to_lowercase()
        .split(|c: char| !c.is_alphanumeric())
        .filter(|t| !t.is_empty())
        .map(String::from)
        .collect()
}

/// Word-to-vector source for feature sums.
pub enum FeatureSpace<'a> {
    Dense(&'a EmbeddingSpace),
    Sparse {
        collection: &'a SparseCollection,
    },
    Reconstructed {
        words: std::collections::HashMap<String, Vec<f64>>,
        dim: usize,
    },
}

impl<'a> FeatureSpace<'a> {
    pub fn reconstructed(collection: &SparseCollection, basis: &BasisSet) -> Result<FeatureSpace<'a>> {
        let mut words = std::collections::HashMap::with_capacity(collection.len());
        for sv in collection.vectors() {
            let mut recon = encode::reconstruct(sv, basis)?;
            if math::normalize(&mut recon) < 1e-12 {
                continue;
            }
            words.insert(sv.word.clone(), recon);
        }
        Ok(FeatureSpace::Reconstructed { words, dim: basis.dim() })
    }

    pub fn dim(&self) -> usize {
        match self {
            FeatureSpace::Dense(space) => space.dim(),
            FeatureSpace::Sparse { collection } => {
                crate::grammar::N_GRAMMAR + collection.n_word_dims
            }
            FeatureSpace::Reconstructed { dim, .. } => *dim,
        }
    }

    /// Adds `word`'s vector into `acc`; false when out of vocabulary.
    fn accumulate(&self, word: &str, acc: &mut [f64]) -> bool {
        match self {
            FeatureSpace::Dense(space) => match space.word_vector(word) {
                Some(v) => {
                    math::axpy(1.0, v, acc);
                    true
                }
                None => false,
            },
            FeatureSpace::Sparse { collection } => match collection.get(word) {
                Some(sv) => {
                    for (i, c) in sv.nonzero_entries() {
                        acc[i] += c;
                    }
                    true
                }
                None => false,
            },
            FeatureSpace::Reconstructed { words, .. } => match words.get(word) {
                Some(v) => {
                    math::axpy(1.0, v, acc);
                    true
                }
                None => false,
            },
        }
    }
}

/// Sum of vectors of in-vocabulary tokens. Returns the feature vector and
/// how many tokens were in vocabulary.
pub fn bow_features(tokens: &[String], space: &FeatureSpace) -> (Vec<f64>, usize) {
    let mut acc = vec![0.0; space.dim()];
    let mut in_vocab = 0;
    for t in tokens {
        if space.accumulate(t, &mut acc) {
            in_vocab += 1;
        }
    }
    (acc, in_vocab)
}

#[derive(Debug, Clone)]
pub struct Dataset {
    pub features: Vec<Vec<f64>>,
    /// Index into `classes` per row.
    pub labels: Vec<usize>,
    pub classes: Vec<i64>,
    /// Documents where every token was out of vocabulary.
    pub all_oov: usize,
}

/// Reads `label<TAB>text` lines and builds bag-of-words features.
pub fn load_documents(path: &Path) -> Result<Vec<(i64, String)>> {
    let file = File::open(path).map_err(|e| Error::io(path, e))?;
    let reader = BufReader::new(file);
    let mut docs = Vec::new();
    for (i, line) in reader.lines().enumerate() {
        let line = line.map_err(|e| Error::io(path, e))?;
        if line.trim().is_empty() {
            continue;
        }
        let (label, text) = line
            .split_once('\t')
            .ok_or_else(|| Error::parse(path, i + 1, "expected label<TAB>text"))?;
        let label: i64 = label
            .trim()
            .parse()
            .map_err(|_| Error::parse(path, i + 1, format!("label {label:?} is not an integer")))?;
        docs.push((label, text.to_string()));
    }
    if docs.is_empty() {
        return Err(Error::Format {
            path: path.display().to_string(),
            message: "no documents".into(),
        });
    }
    Ok(docs)
}

pub fn build_dataset(docs: &[(i64, String)], space: &FeatureSpace) -> Dataset {
    let classes: Vec<i64> = docs
        .iter()
        .map(|(l, _)| *l)
        .collect::<BTreeSet<i64>>()
        .into_iter()
        .collect();
    let mut features = Vec::with_capacity(docs.len());
    let mut labels = Vec::with_capacity(docs.len());
    let mut all_oov = 0;
    for (label, text) in docs {
        let tokens = tokenize(text);
        let (f, in_vocab) = bow_features(&tokens, space);
        if in_vocab == 0 {
            all_oov += 1;
        }
        features.push(f);
        labels.push(classes.binary_search(label).expect("label in classes"));
    }
    Dataset { features, labels, classes, all_oov }
}

#[derive(Debug, Clone)]
pub struct LogRegConfig {
    pub step: f64,
    pub l2: f64,
    pub max_epochs: usize,
    pub rel_tol: f64,
}

impl Default for LogRegConfig {
    fn default() -> Self {
        LogRegConfig {
            step: 0.1,
            l2: 1e-4,
            max_epochs: 2000,
            rel_tol: 1e-6,
        }
    }
}

#[derive(Debug, Clone, Default)]
pub struct TrainingMeta {
    pub epochs_run: Vec<usize>,
    pub final_loss: Vec<f64>,
    /// Epochs where the loss increased by more than 1e-12 (step too large).
    pub monotonicity_violations: usize,
}

/// One weight vector (features + bias) per head. Binary problems use a
/// single head for `classes[1]`; multiclass trains one-vs-rest.
#[derive(Debug, Clone)]
pub struct BowClassifier {
    pub classes: Vec<i64>,
    pub weights: Vec<Vec<f64>>,
    pub feature_mean: Vec<f64>,
    pub feature_std: Vec<f64>,
    pub config: LogRegConfig,
    pub meta: TrainingMeta,
}

fn sigmoid(z: f64) -> f64 {
    if z >= 0.0 {
        1.0 / (1.0 + (-z).exp())
    } else {
        let e = z.exp();
        e / (1.0 + e)
    }
}

pub fn train_logreg(dataset: &Dataset, config: &LogRegConfig) -> Result<BowClassifier> {
    let k = dataset.classes.len();
    if k < 2 {
        return Err(Error::Domain(format!(
            "training set has {k} class(es); need at least 2"
        )));
    }
    let n = dataset.features.len();
    let d = dataset.features[0].len();

    // standardize with training statistics
    let mut mean = vec![0.0; d];
    for f in &dataset.features {
        math::axpy(1.0, f, &mut mean);
    }
    math::scale(&mut mean, 1.0 / n as f64);
    let mut var = vec![0.0; d];
    for f in &dataset.features {
        for (v, (x, m)) in var.iter_mut().zip(f.iter().zip(&mean)) {
            *v += (x - m) * (x - m);
        }
    }
    let std: Vec<f64> = var
        .iter()
        .map(|v| {
            let s = (v / n as f64).sqrt();
            if s < 1e-12 {
                1.0
            } else {
                s
            }
        })
        .collect();
    let standardized: Vec<Vec<f64>> = dataset
        .features
        .iter()
        .map(|f| {
            f.iter()
                .zip(mean.iter().zip(&std))
                .map(|(x, (m, s))| (x - m) / s)
                .collect()
        })
        .collect();

    let heads: Vec<usize> = if k == 2 { vec![1] } else { (0..k).collect() };
    let mut weights = Vec::with_capacity(heads.len());
    let mut meta = TrainingMeta::default();

    for &positive in &heads {
        let y: Vec<f64> = dataset
            .labels
            .iter()
            .map(|&l| (l == positive) as u8 as f64)
            .collect();
        let mut w = vec![0.0; d + 1]; // bias last, not regularized
        let mut loss_prev = f64::INFINITY;
        let mut epochs = 0;
        for epoch in 1..=config.max_epochs {
            epochs = epoch;
            let mut grad = vec![0.0; d + 1];
            let mut loss = 0.0;
            for (x, &yi) in standardized.iter().zip(&y) {
                let z = math::dot(&w[..d], x) + w[d];
                let p = sigmoid(z);
                // cross-entropy in a form stable for p near 0/1
                loss += if yi > 0.5 {
                    -(p.max(1e-300)).ln()
                } else {
                    -((1.0 - p).max(1e-300)).ln()
                };
                let err = p - yi;
                math::axpy(err, x, &mut grad[..d]);
                grad[d] += err;
            }
            loss /= n as f64;
            math::scale(&mut grad, 1.0 / n as f64);
            for j in 0..d {
                loss += 0.5 * config.l2 * w[j] * w[j];
                grad[j] += config.l2 * w[j];
            }
            math::axpy(-config.step, &grad, &mut w);

            if loss > loss_prev + 1e-12 {
                meta.monotonicity_violations += 1;
            }
            let rel = (loss_prev - loss).abs() / loss_prev.abs().max(1e-12);
            let done = loss_prev.is_finite() && rel < config.rel_tol;
            loss_prev = loss;
            if done {
                break;
            }
        }
        meta.epochs_run.push(epochs);
        meta.final_loss.push(loss_prev);
        weights.push(w);
    }

    Ok(BowClassifier {
        classes: dataset.classes.clone(),
        weights,
        feature_mean: mean,
        feature_std: std,
        config: config.clone(),
        meta,
    })
}

impl BowClassifier {
    fn head_score(&self, head: usize, features: &[f64]) -> f64 {
        let d = self.feature_mean.len();
        let w = &self.weights[head];
        let mut z = w[d];
        for j in 0..d {
            z += w[j] * (features[j] - self.feature_mean[j]) / self.feature_std[j];
        }
        z
    }

    pub fn predict(&self, features: &[f64]) -> i64 {
        if self.classes.len() == 2 {
            let z = self.head_score(0, features);
            if sigmoid(z) >= 0.5 {
                self.classes[1]
            } else {
                self.classes[0]
            }
        } else {
            let mut best = (0usize, f64::NEG_INFINITY);
            for head in 0..self.weights.len() {
                let z = self.head_score(head, features);
                if z > best.1 {
                    best = (head, z);
                }
            }
            self.classes[best.0]
        }
    }

    pub fn accuracy(&self, dataset: &Dataset) -> f64 {
        let correct = dataset
            .features
            .iter()
            .zip(&dataset.labels)
            .filter(|(f, &l)| self.predict(f) == dataset.classes[l])
            .count();
        correct as f64 / dataset.features.len().max(1) as f64
    }

    /// Per-head coefficients folded back to the raw feature scale, largest
    /// magnitude first: (dimension, weight on unstandardized features).
    pub fn raw_coefficients(&self, head: usize) -> Vec<(usize, f64)> {
        let d = self.feature_mean.len();
        let mut coeffs: Vec<(usize, f64)> = (0..d)
            .map(|j| (j, self.weights[head][j] / self.feature_std[j]))
            .collect();
        coeffs.sort_by(|a, b| b.1.abs().partial_cmp(&a.1.abs()).unwrap().then(a.0.cmp(&b.0)));
        coeffs
    }

    /// The paper-style log-odds display, one head per class with labeled
    /// dimensions.
    pub fn coefficient_report(&self, label_of: &dyn Fn(usize) -> String, top_k: usize) -> String {
        let mut out = String::new();
        let heads: Vec<(usize, i64)> = if self.classes.len() == 2 {
            vec![(0, self.classes[1])]
        } else {
            self.classes.iter().copied().enumerate().collect()
        };
        for (head, class) in heads {
            out.push_str(&format!("ln P({class})/(1 - P({class})) ="));
            for (i, (dim, w)) in self.raw_coefficients(head).into_iter().take(top_k).enumerate() {
                let sign = if w < 0.0 { "-" } else { "+" };
                let mag = math::format_sig(w.abs(), 3);
                let label = label_of(dim);
                if i == 0 && sign == "+" {
                    out.push_str(&format!(" {mag} * {label}"));
                } else {
                    out.push_str(&format!("\n  {sign} {mag} * {label}"));
                }
            }
            out.push_str("\n  + ...\n");
        }
        out
    }
}
