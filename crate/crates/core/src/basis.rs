//! The labeled overcomplete basis (grammar block + selected word block) and
//! its JSON manifest. The manifest carries a sha256 content hash that every
//! downstream file references, so mixing artifacts from different runs is
//! caught at load time.

use std::fs;
use std::path::Path;

use serde::{Deserialize, Serialize};
use sha2::{Digest, Sha256};

use crate::embedding::EmbeddingSpace;
use crate::error::{Error, Result};
use crate::grammar::{self, GrammarBasis, N_GRAMMAR};
use crate::lexicon::Lexicon;
use crate::math;
use crate::selection::{self, DiversityAgg};

pub const MANIFEST_FORMAT: &str = "BASIS-MANIFEST v1";

pub fn sha256_hex(bytes: &[u8]) -> String {
    let mut h = Sha256::new();
    h.update(bytes);
    format!("{:x}", h.finalize())
}

#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct TraceStep {
    pub step: usize,
    pub word: String,
    pub score: f64,
}

#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct SelectionConfig {
    pub top_k: usize,
    pub n_select: usize,
    pub diversity_agg: DiversityAgg,
}

#[derive(Debug, Clone, Serialize, Deserialize)]
struct GrammarSection {
    labels: Vec<String>,
    provenance: Vec<usize>,
    raw: Vec<Vec<f64>>,
    ortho: Vec<Vec<f64>>,
    config_hash: String,
}

#[derive(Debug, Clone, Serialize, Deserialize)]
struct WordSection {
    labels: Vec<String>,
    vectors: Vec<Vec<f64>>,
    trace: Vec<TraceStep>,
    config: SelectionConfig,
    config_hash: String,
}

#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct Manifest {
    format: String,
    n_d: usize,
    grammar: GrammarSection,
    words: Option<WordSection>,
    hash: String,
}

impl Manifest {
    pub fn from_grammar(basis: &GrammarBasis, config_hash: &str) -> Manifest {
        let mut m = Manifest {
            format: MANIFEST_FORMAT.to_string(),
            n_d: basis.dim(),
            grammar: GrammarSection {
                labels: basis.labels().to_vec(),
                provenance: basis.provenance().to_vec(),
                raw: basis.raw().to_vec(),
                ortho: basis.ortho().to_vec(),
                config_hash: config_hash.to_string(),
            },
            words: None,
            hash: String::new(),
        };
        m.hash = m.content_hash();
        m
    }

    /// Extends a grammar-only manifest with the selected word block.
    pub fn attach_words(
        &mut self,
        labels: Vec<String>,
        vectors: Vec<Vec<f64>>,
        trace: Vec<TraceStep>,
        config: SelectionConfig,
        config_hash: &str,
    ) {
        self.words = Some(WordSection {
            labels,
            vectors,
            trace,
            config,
            config_hash: config_hash.to_string(),
        });
        self.hash = self.content_hash();
    }

    fn content_hash(&self) -> String {
        let mut clone = self.clone();
        clone.hash = String::new();
        sha256_hex(serde_json::to_string(&clone).expect("manifest is serializable").as_bytes())
    }

    pub fn hash(&self) -> &str {
        &self.hash
    }

    pub fn n_d(&self) -> usize {
        self.n_d
    }

    pub fn has_words(&self) -> bool {
        self.words.is_some()
    }

    pub fn save(&self, path: &Path) -> Result<()> {
        let json = serde_json::to_string_pretty(self).expect("manifest is serializable");
        fs::write(path, json).map_err(|e| Error::io(path, e))
    }

    pub fn load(path: &Path) -> Result<Manifest> {
        let text = fs::read_to_string(path).map_err(|e| Error::io(path, e))?;
        let manifest: Manifest = serde_json::from_str(&text).map_err(|e| Error::Format {
            path: path.display().to_string(),
            message: e.to_string(),
        })?;
        if manifest.format != MANIFEST_FORMAT {
            return Err(Error::Format {
                path: path.display().to_string(),
                message: format!("unknown manifest format {:?}", manifest.format),
            });
        }
        let expected = manifest.content_hash();
        if manifest.hash != expected {
            return Err(Error::Format {
                path: path.display().to_string(),
                message: "manifest content hash does not match its contents".into(),
            });
        }
        Ok(manifest)
    }

    pub fn grammar_basis(&self) -> Result<GrammarBasis> {
        GrammarBasis::from_parts(
            self.grammar.labels.clone(),
            self.grammar.raw.clone(),
            self.grammar.ortho.clone(),
            self.grammar.provenance.clone(),
        )
    }

    /// The full labeled basis. Errors when the word block has not been
    /// selected yet.
    pub fn basis_set(&self) -> Result<BasisSet> {
        let words = self.words.as_ref().ok_or_else(|| {
            Error::Config("manifest has no word block; run select-basis first".into())
        })?;
        BasisSet::from_parts(
            self.grammar_basis()?,
            words.labels.clone(),
            words.vectors.clone(),
            words.trace.clone(),
            self.hash.clone(),
        )
    }

    pub fn selection_config(&self) -> Option<&SelectionConfig> {
        self.words.as_ref().map(|w| &w.config)
    }

    pub fn selection_trace(&self) -> Option<&[TraceStep]> {
        self.words.as_ref().map(|w| w.trace.as_slice())
    }
}

/// Grammar block + word block, with the dense matrix used for sparse coding.
#[derive(Debug, Clone)]
pub struct BasisSet {
    grammar: GrammarBasis,
    word_labels: Vec<String>,
    word_vectors: Vec<Vec<f64>>,
    selection_trace: Vec<TraceStep>,
    manifest_hash: String,
}

impl BasisSet {
    /// Runs filter -> deflate -> greedy select and assembles the word block
    /// onto `grammar`.
    pub fn build(
        space: &EmbeddingSpace,
        lexicon: &Lexicon,
        grammar: GrammarBasis,
        config: &SelectionConfig,
    ) -> Result<(BasisSet, grammar::DeflationReport)> {
        let candidate_idx = selection::filter_candidates(space, lexicon, config.top_k)?;
        let candidates = candidate_idx
            .iter()
            .map(|&i| (space.words()[i].clone(), space.vector(i).to_vec()));
        let report = grammar::deflate_candidates(&grammar, candidates);
        if report.kept.len() < config.n_select {
            return Err(Error::Domain(format!(
                "only {} candidates survive filtering and deflation; need n_select = {}",
                report.kept.len(),
                config.n_select
            )));
        }

        let vectors: Vec<Vec<f64>> = report.kept.iter().map(|c| c.vector.clone()).collect();
        let reference: Vec<&[f64]> = (0..config.top_k).map(|i| space.vector(i)).collect();
        let picks = selection::select_basis(&vectors, &reference, config.n_select, config.diversity_agg)?;

        let mut word_labels = Vec::with_capacity(picks.len());
        let mut word_vectors = Vec::with_capacity(picks.len());
        let mut trace = Vec::with_capacity(picks.len());
        for (step, &(idx, score)) in picks.iter().enumerate() {
            let cand = &report.kept[idx];
            word_labels.push(cand.word.clone());
            word_vectors.push(cand.vector.clone());
            trace.push(TraceStep {
                step,
                word: cand.word.clone(),
                score,
            });
        }

        let set = BasisSet::from_parts(grammar, word_labels, word_vectors, trace, String::new())?;
        Ok((set, report))
    }

    pub fn from_parts(
        grammar: GrammarBasis,
        word_labels: Vec<String>,
        word_vectors: Vec<Vec<f64>>,
        selection_trace: Vec<TraceStep>,
        manifest_hash: String,
    ) -> Result<BasisSet> {
        if word_labels.len() != word_vectors.len() {
            return Err(Error::Config("word labels/vectors length mismatch".into()));
        }
        let mut seen = std::collections::HashSet::new();
        for label in &word_labels {
            if !seen.insert(label.as_str()) {
                return Err(Error::Config(format!("duplicate basis word {label:?}")));
            }
            if grammar.labels().iter().any(|g| g == label) {
                return Err(Error::Config(format!(
                    "basis word {label:?} collides with a grammar label"
                )));
            }
        }
        for (label, v) in word_labels.iter().zip(&word_vectors) {
            let nrm = math::norm(v);
            if (nrm - 1.0).abs() > 1e-9 {
                return Err(Error::Numerical(format!(
                    "basis word {label:?} is not unit norm ({nrm})"
                )));
            }
            for (glabel, q) in grammar.labels().iter().zip(grammar.ortho()) {
                let d = math::dot(v, q).abs();
                if d > 1e-8 {
                    return Err(Error::Numerical(format!(
                        "basis word {label:?} is not orthogonal to {glabel} (dot {d:.3e})"
                    )));
                }
            }
        }
        Ok(BasisSet {
            grammar,
            word_labels,
            word_vectors,
            selection_trace,
            manifest_hash,
        })
    }

    pub fn grammar(&self) -> &GrammarBasis {
        &self.grammar
    }

    pub fn word_labels(&self) -> &[String] {
        &self.word_labels
    }

    pub fn word_vectors(&self) -> &[Vec<f64>] {
        &self.word_vectors
    }

    pub fn selection_trace(&self) -> &[TraceStep] {
        &self.selection_trace
    }

    pub fn manifest_hash(&self) -> &str {
        &self.manifest_hash
    }

    pub fn n_words(&self) -> usize {
        self.word_labels.len()
    }

    /// Total sparse dimensionality: 11 grammar dims + word dims.
    pub fn n_sparse(&self) -> usize {
        N_GRAMMAR + self.n_words()
    }

    pub fn dim(&self) -> usize {
        self.grammar.dim()
    }

    /// Label for a global sparse dimension: 0..10 grammar, 11.. word block.
    pub fn label(&self, index: usize) -> Option<&str> {
        if index < N_GRAMMAR {
            Some(&self.grammar.labels()[index])
        } else {
            self.word_labels.get(index - N_GRAMMAR).map(String::as_str)
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn toy_grammar(d: usize) -> GrammarBasis {
        let labels: Vec<String> = grammar::GRAMMAR_LABELS.iter().map(|s| s.to_string()).collect();
        let rows: Vec<Vec<f64>> = (0..N_GRAMMAR)
            .map(|i| {
                let mut v = vec![0.0; d];
                v[i] = 1.0;
                v
            })
            .collect();
        GrammarBasis::from_parts(labels, rows.clone(), rows, vec![1; N_GRAMMAR]).unwrap()
    }

    #[test]
    fn manifest_round_trip_and_hash() {
        let g = toy_grammar(16);
        let m = Manifest::from_grammar(&g, "cfg123");
        let dir = tempfile::tempdir().unwrap();
        let path = dir.path().join("manifest.json");
        m.save(&path).unwrap();
        let loaded = Manifest::load(&path).unwrap();
        assert_eq!(loaded.hash(), m.hash());
        assert_eq!(loaded.n_d(), 16);
        assert!(!loaded.has_words());

        // tamper: flip one ortho value
        let mut bad: Manifest = serde_json::from_str(&std::fs::read_to_string(&path).unwrap()).unwrap();
        bad.grammar.ortho[0][0] = 0.25;
        let bad_path = dir.path().join("bad.json");
        std::fs::write(&bad_path, serde_json::to_string_pretty(&bad).unwrap()).unwrap();
        assert!(Manifest::load(&bad_path).is_err());
    }

    #[test]
    fn attach_words_changes_hash() {
        let g = toy_grammar(16);
        let mut m = Manifest::from_grammar(&g, "cfg");
        let h0 = m.hash().to_string();
        let mut v = vec![0.0; 16];
        v[12] = 1.0;
        m.attach_words(
            vec!["stone".into()],
            vec![v],
            vec![TraceStep { step: 0, word: "stone".into(), score: 1.0 }],
            SelectionConfig { top_k: 4, n_select: 1, diversity_agg: DiversityAgg::Max },
            "cfg2",
        );
        assert_ne!(m.hash(), h0);
        let set = m.basis_set().unwrap();
        assert_eq!(set.n_sparse(), 12);
        assert_eq!(set.label(0), Some("C0"));
        assert_eq!(set.label(11), Some("stone"));
    }

    #[test]
    fn basis_set_rejects_grammar_overlap_and_bad_vectors() {
        let g = toy_grammar(16);
        let mut ortho_vec = vec![0.0; 16];
        ortho_vec[13] = 1.0;
        assert!(BasisSet::from_parts(
            g.clone(),
            vec!["C0".into()],
            vec![ortho_vec.clone()],
            vec![],
            String::new()
        )
        .is_err());

        // vector not orthogonal to grammar rows
        let mut slanted = vec![0.0; 16];
        slanted[0] = 0.6;
        slanted[13] = 0.8;
        assert!(BasisSet::from_parts(
            g.clone(),
            vec!["stone".into()],
            vec![slanted],
            vec![],
            String::new()
        )
        .is_err());

        assert!(BasisSet::from_parts(
            g,
            vec!["stone".into()],
            vec![ortho_vec],
            vec![],
            String::new()
        )
        .is_ok());
    }
}
