//! Candidate filtering and greedy selection of the word-labeled basis
//! columns.
//!
//! Selection grows the basis one word at a time, taking the candidate with
//! the highest reference-weighted similarity sum; each reference vector's
//! weight is its dissimilarity to the closest (or, under `Min`, the
//! farthest) already-selected basis vector, which pushes the selection
//! toward diverse directions.

use serde::{Deserialize, Serialize};

use crate::embedding::EmbeddingSpace;
use crate::error::{Error, Result};
use crate::lexicon::{Lexicon, PosTag};
use crate::math;

/// How the per-reference diversity weight aggregates over selected vectors.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum DiversityAgg {
    /// w(v) = max over selected b of (1 - b.v). The default.
    Max,
    /// w(v) = min over selected b of (1 - b.v).
    Min,
}

impl DiversityAgg {
    pub fn parse(s: &str) -> Option<Self> {
        match s {
            "max" => Some(DiversityAgg::Max),
            "min" => Some(DiversityAgg::Min),
            _ => None,
        }
    }

    pub fn as_str(&self) -> &'static str {
        match self {
            DiversityAgg::Max => "max",
            DiversityAgg::Min => "min",
        }
    }
}

/// From the `top_k` most frequent words, keeps those that are lowercase,
/// in-dictionary nouns, verbs, or adjectives. Order (frequency rank) is
/// preserved.
pub fn filter_candidates(
    space: &EmbeddingSpace,
    lexicon: &Lexicon,
    top_k: usize,
) -> Result<Vec<usize>> {
    if top_k > space.len() {
        return Err(Error::Config(format!(
            "top_k {top_k} exceeds vocabulary size {}",
            space.len()
        )));
    }
    let kept: Vec<usize> = space.words()[..top_k]
        .iter()
        .enumerate()
        .filter(|(_, word)| {
            let e = lexicon.lookup(word);
            !e.is_capitalized
                && e.in_dictionary
                && matches!(e.pos, PosTag::Noun | PosTag::Verb | PosTag::Adj)
        })
        .map(|(i, _)| i)
        .collect();
    if kept.is_empty() {
        return Err(Error::Domain("candidate filter left no words".into()));
    }
    Ok(kept)
}

/// Scores are compared after rounding to 1e-12 so the argmax does not churn
/// on platform-dependent last bits; ties go to the earlier (more frequent)
/// candidate.
pub fn quantize_score(s: f64) -> f64 {
    (s * 1e12).round() / 1e12
}

/// Greedy selection of `n_select` candidates. Returns (candidate index,
/// quantized score) per step, in selection order.
///
/// Candidates and reference rows must be unit norm. The first pick is the
/// plain similarity-sum argmax (all weights 1). Candidate-to-reference dot
/// products are cached up front and the per-reference weights are updated
/// with one pass per step, so each step costs O(|F| * |V|) instead of
/// rebuilding the aggregation over all selected vectors. A full-vocabulary
/// run wants roughly `8 * |F| * |V|` bytes for the similarity cache.
pub fn select_basis(
    candidates: &[Vec<f64>],
    reference: &[&[f64]],
    n_select: usize,
    agg: DiversityAgg,
) -> Result<Vec<(usize, f64)>> {
    if n_select > candidates.len() {
        return Err(Error::Config(format!(
            "n_select {n_select} exceeds candidate pool {}",
            candidates.len()
        )));
    }
    if reference.is_empty() {
        return Err(Error::Config("reference set is empty".into()));
    }

    let sims: Vec<Vec<f64>> = candidates
        .iter()
        .map(|x| reference.iter().map(|v| math::dot(x, v)).collect())
        .collect();

    let mut weights = vec![1.0; reference.len()];
    let mut chosen = vec![false; candidates.len()];
    let mut selected = Vec::with_capacity(n_select);

    for step in 0..n_select {
        let mut best: Option<(usize, f64)> = None;
        for (i, row) in sims.iter().enumerate() {
            if chosen[i] {
                continue;
            }
            let mut sum = 0.0;
            for (xv, w) in row.iter().zip(&weights) {
                sum += xv * w;
            }
            let score = quantize_score(sum);
            match best {
                Some((_, s)) if score <= s => {}
                _ => best = Some((i, score)),
            }
        }
        let (idx, score) = best.expect("n_select <= candidates");
        chosen[idx] = true;
        selected.push((idx, score));

        for (w, bv) in weights.iter_mut().zip(&sims[idx]) {
            let fresh = 1.0 - bv;
            *w = if step == 0 {
                fresh
            } else {
                match agg {
                    DiversityAgg::Max => w.max(fresh),
                    DiversityAgg::Min => w.min(fresh),
                }
            };
        }
    }
    Ok(selected)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::lexicon::LexiconEntry;

    #[test]
    fn filter_applies_all_rules() {
        let words = vec!["dog".into(), "Paris".into(), "run".into(), "asdf".into()];
        let rows = vec![
            vec![1.0, 0.0],
            vec![0.0, 1.0],
            vec![1.0, 1.0],
            vec![0.5, 0.5],
        ];
        let space = EmbeddingSpace::from_rows(words, rows, true).unwrap();
        let mut lex = Lexicon::new();
        lex.insert("dog", LexiconEntry { pos: PosTag::Noun, is_capitalized: false, in_dictionary: true });
        lex.insert("Paris", LexiconEntry { pos: PosTag::Propn, is_capitalized: true, in_dictionary: true });
        lex.insert("run", LexiconEntry { pos: PosTag::Verb, is_capitalized: false, in_dictionary: true });
        lex.insert("asdf", LexiconEntry { pos: PosTag::Noun, is_capitalized: false, in_dictionary: false });

        let kept = filter_candidates(&space, &lex, 4).unwrap();
        let kept_words: Vec<&str> = kept.iter().map(|&i| space.words()[i].as_str()).collect();
        assert_eq!(kept_words, vec!["dog", "run"]);
    }

    #[test]
    fn filter_empty_is_error() {
        let words = vec!["slowly".into()];
        let space = EmbeddingSpace::from_rows(words, vec![vec![1.0]], true).unwrap();
        let mut lex = Lexicon::new();
        lex.insert("slowly", LexiconEntry { pos: PosTag::Adv, is_capitalized: false, in_dictionary: true });
        assert!(matches!(
            filter_candidates(&space, &lex, 1),
            Err(Error::Domain(_))
        ));
    }

    #[test]
    fn first_pick_is_self_similarity() {
        let x1 = vec![1.0, 0.0];
        let mut x2 = vec![1.0, 0.5];
        math::normalize(&mut x2);
        let reference = vec![x1.clone()];
        let refs: Vec<&[f64]> = reference.iter().map(|v| v.as_slice()).collect();
        let picks = select_basis(&[x1.clone(), x2], &refs, 1, DiversityAgg::Max).unwrap();
        assert_eq!(picks[0].0, 0);
        assert!((picks[0].1 - 1.0).abs() < 1e-9);
    }

    #[test]
    fn duplicate_candidates_tie_break_by_rank() {
        let x = vec![1.0, 0.0];
        let reference = vec![x.clone(), vec![0.0, 1.0]];
        let refs: Vec<&[f64]> = reference.iter().map(|v| v.as_slice()).collect();
        let picks = select_basis(&[x.clone(), x.clone()], &refs, 2, DiversityAgg::Max).unwrap();
        assert_eq!(picks[0].0, 0, "earlier duplicate wins the tie");
        assert_eq!(picks[1].0, 1);
    }

    #[test]
    fn agg_flag_changes_trace() {
        // three orthogonal-ish candidates, reference spread out
        let c = vec![
            vec![1.0, 0.0, 0.0],
            vec![0.0, 1.0, 0.0],
            vec![0.0, 0.0, 1.0],
        ];
        let reference: Vec<Vec<f64>> = vec![
            vec![1.0, 0.0, 0.0],
            vec![0.8, 0.6, 0.0],
            vec![0.0, 0.6, 0.8],
        ];
        let refs: Vec<&[f64]> = reference.iter().map(|v| v.as_slice()).collect();
        let max_trace = select_basis(&c, &refs, 3, DiversityAgg::Max).unwrap();
        let min_trace = select_basis(&c, &refs, 3, DiversityAgg::Min).unwrap();
        assert_eq!(max_trace[0].0, min_trace[0].0, "first pick ignores agg");
        let max_rest: Vec<f64> = max_trace.iter().skip(1).map(|(_, s)| *s).collect();
        let min_rest: Vec<f64> = min_trace.iter().skip(1).map(|(_, s)| *s).collect();
        assert_ne!(max_rest, min_rest);
    }

    #[test]
    fn n_select_too_large() {
        let c = vec![vec![1.0]];
        let r = vec![vec![1.0]];
        let refs: Vec<&[f64]> = r.iter().map(|v| v.as_slice()).collect();
        assert!(select_basis(&c, &refs, 2, DiversityAgg::Max).is_err());
    }
}
