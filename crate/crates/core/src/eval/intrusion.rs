//! Word intrusion question generation: for a sampled word dimension, the 4
//! highest-coefficient words plus one intruder drawn from the bottom half,
//! shuffled. Everything is driven by one seeded RNG so a given seed always
//! produces the same file.

use std::io::Write;

use rand::seq::SliceRandom;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde_json::json;

use crate::basis::BasisSet;
use crate::embedding::EmbeddingSpace;
use crate::error::{Error, Result};
use crate::grammar::N_GRAMMAR;
use crate::sparse_io::SparseCollection;

#[derive(Debug, Clone)]
pub struct IntrusionQuestion {
    /// Global sparse dimension (word block starts at 11).
    pub dimension_index: usize,
    pub dimension_label: String,
    pub top_words: Vec<String>,
    pub intruder: String,
    /// The 5 words in presentation order.
    pub presented_order: Vec<String>,
    pub seed: u64,
}

/// Candidate pool: the `pool_size` most frequent words that are lowercase,
/// ASCII-alphabetic, longer than one letter, and encoded.
fn candidate_pool<'a>(
    collection: &'a SparseCollection,
    space: &EmbeddingSpace,
    pool_size: usize,
) -> Vec<&'a crate::encode::SparseEmbedding> {
    space
        .words()
        .iter()
        .take(pool_size)
        .filter(|w| {
            w.len() > 1
                && w.chars().all(|c| c.is_ascii_alphabetic())
                && w.chars().all(|c| c.is_ascii_lowercase())
        })
        .filter_map(|w| collection.get(w))
        .collect()
}

pub fn generate_intrusion_questions(
    collection: &SparseCollection,
    space: &EmbeddingSpace,
    basis: &BasisSet,
    n_questions: usize,
    seed: u64,
    pool_size: usize,
) -> Result<Vec<IntrusionQuestion>> {
    let pool = candidate_pool(collection, space, pool_size);
    if pool.len() < 8 {
        return Err(Error::Domain(format!(
            "intrusion candidate pool has only {} words (need 8)",
            pool.len()
        )));
    }

    // word dimensions with at least 4 nonzero candidates are eligible
    let mut nonzero_count = vec![0usize; collection.n_word_dims];
    for sv in &pool {
        for &(j, _) in &sv.word_entries {
            nonzero_count[j] += 1;
        }
    }
    let eligible: Vec<usize> = (0..collection.n_word_dims)
        .filter(|&j| nonzero_count[j] >= 4)
        .collect();
    if eligible.is_empty() {
        return Err(Error::Domain("no word dimension has 4 nonzero candidates".into()));
    }

    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut questions = Vec::with_capacity(n_questions);
    for _ in 0..n_questions {
        let dim = eligible[rng.gen_range(0..eligible.len())];

        // rank pool words by signed coefficient, frequency rank breaking ties
        let mut ranked: Vec<(usize, f64)> = pool
            .iter()
            .enumerate()
            .map(|(rank, sv)| {
                let value = sv
                    .word_entries
                    .iter()
                    .find(|(j, _)| *j == dim)
                    .map(|&(_, c)| c)
                    .unwrap_or(0.0);
                (rank, value)
            })
            .collect();
        ranked.sort_by(|x, y| y.1.partial_cmp(&x.1).unwrap().then(x.0.cmp(&y.0)));

        let top_words: Vec<String> = ranked[..4]
            .iter()
            .map(|&(rank, _)| pool[rank].word.clone())
            .collect();
        let bottom = &ranked[ranked.len() - ranked.len() / 2..];
        let intruder = pool[bottom[rng.gen_range(0..bottom.len())].0].word.clone();
        debug_assert!(!top_words.contains(&intruder));

        let mut presented: Vec<String> = top_words.clone();
        presented.push(intruder.clone());
        presented.shuffle(&mut rng);

        let dimension_index = N_GRAMMAR + dim;
        let dimension_label = basis
            .label(dimension_index)
            .ok_or_else(|| {
                Error::Config(format!("dimension {dimension_index} has no label in basis"))
            })?
            .to_string();
        questions.push(IntrusionQuestion {
            dimension_index,
            dimension_label,
            top_words,
            intruder,
            presented_order: presented,
            seed,
        });
    }
    Ok(questions)
}

/// JSON-lines serialization; the first line is a metadata object. With
/// `with_hint` the dimension label is included.
pub fn write_jsonl(
    questions: &[IntrusionQuestion],
    with_hint: bool,
    meta: &[(String, String)],
    w: &mut impl Write,
) -> std::io::Result<()> {
    let mut meta_obj = serde_json::Map::new();
    meta_obj.insert("type".into(), json!("meta"));
    for (k, v) in meta {
        meta_obj.insert(k.clone(), json!(v));
    }
    writeln!(w, "{}", serde_json::Value::Object(meta_obj))?;
    for q in questions {
        let mut obj = serde_json::Map::new();
        obj.insert("dimension_index".into(), json!(q.dimension_index));
        if with_hint {
            obj.insert("hint".into(), json!(q.dimension_label));
        }
        obj.insert("words".into(), json!(q.presented_order));
        obj.insert("top_words".into(), json!(q.top_words));
        obj.insert("intruder".into(), json!(q.intruder));
        obj.insert("seed".into(), json!(q.seed));
        writeln!(w, "{}", serde_json::Value::Object(obj))?;
    }
    Ok(())
}
