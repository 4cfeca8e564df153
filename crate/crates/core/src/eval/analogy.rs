//! 3CosAdd analogy evaluation: predict b' as the vocabulary item most
//! cosine-similar to (a' - a + b), excluding the three query words.

use std::collections::HashMap;
use std::fs::File;
use std::io::{BufRead, BufReader};
use std::path::Path;

use crate::basis::{sha256_hex, BasisSet};
use crate::embedding::EmbeddingSpace;
use crate::encode;
use crate::error::{Error, Result};
use crate::math;
use crate::sparse_io::SparseCollection;

#[derive(Debug, Clone)]
pub struct AnalogyQuestion {
    pub a: String,
    pub a_prime: String,
    pub b: String,
    pub b_prime: String,
    pub category: String,
    /// word2vec marks grammatical categories with a "gram" prefix.
    pub is_grammatical: bool,
}

/// Parses the word2vec questions-words format: `: category` section headers,
/// then four tokens per line.
pub fn load_questions(path: &Path) -> Result<Vec<AnalogyQuestion>> {
    let file = File::open(path).map_err(|e| Error::io(path, e))?;
    let reader = BufReader::new(file);
    let mut questions = Vec::new();
    let mut category = String::from("default");
    for (i, line) in reader.lines().enumerate() {
        let line = line.map_err(|e| Error::io(path, e))?;
        let line_no = i + 1;
        let trimmed = line.trim();
        if trimmed.is_empty() {
            continue;
        }
        if let Some(name) = trimmed.strip_prefix(':') {
            category = name.trim().to_string();
            continue;
        }
        let tokens: Vec<&str> = trimmed.split_whitespace().collect();
        if tokens.len() != 4 {
            return Err(Error::parse(path, line_no, "analogy line needs 4 tokens"));
        }
        let distinct = (0..4).all(|i| (i + 1..4).all(|j| tokens[i] != tokens[j]));
        if !distinct {
            return Err(Error::parse(path, line_no, "analogy tokens must be distinct"));
        }
        questions.push(AnalogyQuestion {
            a: tokens[0].to_string(),
            a_prime: tokens[1].to_string(),
            b: tokens[2].to_string(),
            b_prime: tokens[3].to_string(),
            category: category.clone(),
            is_grammatical: category.starts_with("gram"),
        });
    }
    Ok(questions)
}

/// Deterministic 50% held-out selection: a question is in the test half when
/// the low bit of sha256("a a' b b'|seed") is set.
pub fn is_test_question(q: &AnalogyQuestion, seed: u64) -> bool {
    let text = format!("{} {} {} {}|{seed}", q.a, q.a_prime, q.b, q.b_prime);
    let hex = sha256_hex(text.as_bytes());
    let byte = u8::from_str_radix(&hex[hex.len() - 2..], 16).expect("hex digest");
    byte & 1 == 1
}

pub fn test_split(questions: Vec<AnalogyQuestion>, seed: u64) -> Vec<AnalogyQuestion> {
    questions
        .into_iter()
        .filter(|q| is_test_question(q, seed))
        .collect()
}

enum Rows {
    Dense(Vec<Vec<f64>>),
    /// Sorted (global dimension, value) entries per word.
    Sparse(Vec<Vec<(usize, f64)>>),
}

/// A vocabulary with vectors in one of the three comparison spaces. Words
/// stay in frequency order, so argmax ties resolve to the more frequent word.
pub struct AnalogyVectors {
    words: Vec<String>,
    index: HashMap<String, usize>,
    rows: Rows,
    norms: Vec<f64>,
}

impl AnalogyVectors {
    pub fn dense(space: &EmbeddingSpace) -> AnalogyVectors {
        let mut words = Vec::with_capacity(space.len());
        let mut rows = Vec::with_capacity(space.len());
        let mut norms = Vec::with_capacity(space.len());
        for (i, w) in space.words().iter().enumerate() {
            let v = space.vector(i).to_vec();
            let n = math::norm(&v);
            if n == 0.0 {
                continue;
            }
            words.push(w.clone());
            rows.push(v);
            norms.push(n);
        }
        Self::finish(words, Rows::Dense(rows), norms)
    }

    /// Unit-normalized reconstructions of every encoded word. Words whose
    /// reconstruction is (near) zero are left out.
    pub fn reconstructed(collection: &SparseCollection, basis: &BasisSet) -> Result<AnalogyVectors> {
        let mut words = Vec::new();
        let mut rows = Vec::new();
        let mut norms = Vec::new();
        let mut skipped = 0usize;
        for sv in collection.vectors() {
            let mut recon = encode::reconstruct(sv, basis)?;
            if math::normalize(&mut recon) < 1e-12 {
                skipped += 1;
                continue;
            }
            words.push(sv.word.clone());
            rows.push(recon);
            norms.push(1.0);
        }
        if skipped > 0 {
            eprintln!("warning: {skipped} words had zero reconstructions and were skipped");
        }
        Ok(Self::finish(words, Rows::Dense(rows), norms))
    }

    /// The sparse coefficient vectors themselves.
    pub fn sparse(collection: &SparseCollection) -> AnalogyVectors {
        let mut words = Vec::new();
        let mut rows = Vec::new();
        let mut norms = Vec::new();
        for sv in collection.vectors() {
            let entries: Vec<(usize, f64)> = sv.nonzero_entries().collect();
            let n = sv.coeff_norm();
            if n == 0.0 {
                continue;
            }
            words.push(sv.word.clone());
            rows.push(entries);
            norms.push(n);
        }
        Self::finish(words, Rows::Sparse(rows), norms)
    }

    fn finish(words: Vec<String>, rows: Rows, norms: Vec<f64>) -> AnalogyVectors {
        let index = words
            .iter()
            .enumerate()
            .map(|(i, w)| (w.clone(), i))
            .collect();
        AnalogyVectors { words, index, rows, norms }
    }

    pub fn len(&self) -> usize {
        self.words.len()
    }

    pub fn is_empty(&self) -> bool {
        self.words.is_empty()
    }

    pub fn contains(&self, word: &str) -> bool {
        self.index.contains_key(word)
    }

    /// argmax over the vocabulary (minus `excluded`) of cos(x, a' - a + b).
    fn predict(&self, a: usize, a_prime: usize, b: usize) -> Option<usize> {
        let excluded = [a, a_prime, b];
        let mut best: Option<(usize, f64)> = None;
        match &self.rows {
            Rows::Dense(rows) => {
                let d = rows[a].len();
                let mut target = vec![0.0; d];
                for i in 0..d {
                    target[i] = rows[a_prime][i] - rows[a][i] + rows[b][i];
                }
                for (i, row) in rows.iter().enumerate() {
                    if excluded.contains(&i) {
                        continue;
                    }
                    let score = math::dot(row, &target) / self.norms[i];
                    match best {
                        Some((_, s)) if score <= s => {}
                        _ => best = Some((i, score)),
                    }
                }
            }
            Rows::Sparse(rows) => {
                let mut target: std::collections::BTreeMap<usize, f64> = Default::default();
                for &(j, v) in &rows[a_prime] {
                    *target.entry(j).or_insert(0.0) += v;
                }
                for &(j, v) in &rows[a] {
                    *target.entry(j).or_insert(0.0) -= v;
                }
                for &(j, v) in &rows[b] {
                    *target.entry(j).or_insert(0.0) += v;
                }
                let target: Vec<(usize, f64)> = target.into_iter().collect();
                for (i, row) in rows.iter().enumerate() {
                    if excluded.contains(&i) {
                        continue;
                    }
                    let score = sparse_dot(row, &target) / self.norms[i];
                    match best {
                        Some((_, s)) if score <= s => {}
                        _ => best = Some((i, score)),
                    }
                }
            }
        }
        best.map(|(i, _)| i)
    }
}

fn sparse_dot(a: &[(usize, f64)], b: &[(usize, f64)]) -> f64 {
    let mut sum = 0.0;
    let (mut i, mut j) = (0, 0);
    while i < a.len() && j < b.len() {
        match a[i].0.cmp(&b[j].0) {
            std::cmp::Ordering::Less => i += 1,
            std::cmp::Ordering::Greater => j += 1,
            std::cmp::Ordering::Equal => {
                sum += a[i].1 * b[j].1;
                i += 1;
                j += 1;
            }
        }
    }
    sum
}

#[derive(Debug, Clone, Default)]
pub struct AnalogyReport {
    pub answered: usize,
    pub skipped: usize,
    pub correct: usize,
    pub gram_answered: usize,
    pub gram_correct: usize,
    pub sem_answered: usize,
    pub sem_correct: usize,
}

impl AnalogyReport {
    pub fn accuracy(&self) -> f64 {
        self.correct as f64 / self.answered.max(1) as f64
    }

    pub fn gram_accuracy(&self) -> f64 {
        self.gram_correct as f64 / self.gram_answered.max(1) as f64
    }

    pub fn sem_accuracy(&self) -> f64 {
        self.sem_correct as f64 / self.sem_answered.max(1) as f64
    }
}

/// Questions with any out-of-vocabulary word count as skipped, not wrong.
pub fn analogy_eval(questions: &[AnalogyQuestion], vectors: &AnalogyVectors) -> Result<AnalogyReport> {
    let mut report = AnalogyReport::default();
    for q in questions {
        let ids = (
            vectors.index.get(q.a.as_str()),
            vectors.index.get(q.a_prime.as_str()),
            vectors.index.get(q.b.as_str()),
            vectors.index.get(q.b_prime.as_str()),
        );
        let (Some(&a), Some(&ap), Some(&b), Some(&bp)) = ids else {
            report.skipped += 1;
            continue;
        };
        report.answered += 1;
        let correct = vectors.predict(a, ap, b) == Some(bp);
        if correct {
            report.correct += 1;
        }
        if q.is_grammatical {
            report.gram_answered += 1;
            report.gram_correct += correct as usize;
        } else {
            report.sem_answered += 1;
            report.sem_correct += correct as usize;
        }
    }
    if report.answered == 0 {
        return Err(Error::Domain("no answerable analogy questions".into()));
    }
    Ok(report)
}
