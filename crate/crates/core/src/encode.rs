//! Encoding words into the sparse labeled space: grammatical projections,
//! FISTA over the word basis, clamping, and renormalization so the sparse
//! vector corresponds to a unit-length dense vector.

use crate::basis::BasisSet;
use crate::embedding::EmbeddingSpace;
use crate::error::{Error, Result};
use crate::grammar::N_GRAMMAR;
use crate::math;
use crate::solver::{self, SolverConfig};

/// A word's sparse coefficients. Grammatical entries are dense (all 11 kept,
/// never clamped); word entries store only nonzero coefficients, sorted by
/// word-dimension index.
#[derive(Debug, Clone, PartialEq)]
pub struct SparseEmbedding {
    pub word: String,
    pub gram_coeffs: Vec<f64>,
    pub word_entries: Vec<(usize, f64)>,
    /// Multiplicative factor that was applied to all coefficients;
    /// 0 marks a degenerate vector that could not be renormalized.
    pub scale_applied: f64,
}

impl SparseEmbedding {
    pub fn nnz_words(&self) -> usize {
        self.word_entries.len()
    }

    /// Nonzero entries over global sparse dimensions: grammar at 0..10,
    /// word dimension j at 11 + j. Indices are strictly increasing.
    pub fn nonzero_entries(&self) -> impl Iterator<Item = (usize, f64)> + '_ {
        self.gram_coeffs
            .iter()
            .enumerate()
            .filter(|(_, &c)| c != 0.0)
            .map(|(i, &c)| (i, c))
            .chain(self.word_entries.iter().map(|&(j, c)| (N_GRAMMAR + j, c)))
    }

    /// Euclidean norm of the sparse coefficient vector itself.
    pub fn coeff_norm(&self) -> f64 {
        let g: f64 = self.gram_coeffs.iter().map(|c| c * c).sum();
        let w: f64 = self.word_entries.iter().map(|(_, c)| c * c).sum();
        (g + w).sqrt()
    }
}

#[derive(Debug, Clone, Copy, Default)]
pub struct EncodeStats {
    pub iterations: usize,
    /// ||v_D - reconstruction||^2 before renormalization.
    pub unscaled_error_sq: f64,
    /// ||v_D - reconstruction|| before renormalization.
    pub unscaled_error: f64,
    pub degenerate: bool,
}

pub fn encode(
    word: &str,
    space: &EmbeddingSpace,
    basis: &BasisSet,
    config: &SolverConfig,
) -> Result<SparseEmbedding> {
    let l = solver::estimate_lipschitz(basis.word_vectors())?;
    encode_with_l(word, space, basis, config, l).map(|(sv, _)| sv)
}

/// Encoding with a shared Lipschitz constant, for batch runs.
pub fn encode_with_l(
    word: &str,
    space: &EmbeddingSpace,
    basis: &BasisSet,
    config: &SolverConfig,
    lipschitz: f64,
) -> Result<(SparseEmbedding, EncodeStats)> {
    if !space.is_preprocessed() {
        return Err(Error::Config("encode needs a preprocessed space".into()));
    }
    let dense = space
        .word_vector(word)
        .ok_or_else(|| Error::OutOfVocabulary(word.to_string()))?;

    let (gram_coeffs, residual) = basis.grammar().deflate(dense);
    let solved = solver::fista_solve_with_l(&residual, basis.word_vectors(), lipschitz, config)?;

    // clamp word coefficients, keep grammatical ones untouched
    let mut active: Vec<(usize, f64)> = solved
        .coeffs
        .iter()
        .enumerate()
        .filter(|(_, c)| c.abs() >= config.clamp && **c != 0.0)
        .map(|(j, &c)| (j, c))
        .collect();

    // renormalize so the reconstruction has unit length; dropping an entry
    // that lands under the clamp after scaling changes the norm, so iterate
    // until the stored set is stable
    let mut scale;
    loop {
        let recon = reconstruction(&gram_coeffs, &active, basis);
        let nrm = math::norm(&recon);
        if nrm < 1e-9 {
            let mut err = 0.0;
            for (r, v) in recon.iter().zip(dense) {
                err += (v - r) * (v - r);
            }
            eprintln!("warning: {word:?} reconstructs to (near) zero; left unscaled");
            let sv = SparseEmbedding {
                word: word.to_string(),
                gram_coeffs,
                word_entries: active,
                scale_applied: 0.0,
            };
            let stats = EncodeStats {
                iterations: solved.iterations,
                unscaled_error_sq: err,
                unscaled_error: err.sqrt(),
                degenerate: true,
            };
            return Ok((sv, stats));
        }
        scale = 1.0 / nrm;
        let violators: Vec<usize> = active
            .iter()
            .enumerate()
            .filter(|(_, (_, c))| {
                let scaled = (c * scale).abs();
                scaled > 0.0 && scaled < config.clamp
            })
            .map(|(pos, _)| pos)
            .collect();
        if violators.is_empty() {
            let mut err = 0.0;
            for (r, v) in recon.iter().zip(dense) {
                err += (v - r) * (v - r);
            }
            let sv = SparseEmbedding {
                word: word.to_string(),
                gram_coeffs: gram_coeffs.iter().map(|c| c * scale).collect(),
                word_entries: active.iter().map(|&(j, c)| (j, c * scale)).collect(),
                scale_applied: scale,
            };
            let stats = EncodeStats {
                iterations: solved.iterations,
                unscaled_error_sq: err,
                unscaled_error: err.sqrt(),
                degenerate: false,
            };
            return Ok((sv, stats));
        }
        for pos in violators.into_iter().rev() {
            active.remove(pos);
        }
    }
}

fn reconstruction(gram_coeffs: &[f64], word_entries: &[(usize, f64)], basis: &BasisSet) -> Vec<f64> {
    let mut recon = vec![0.0; basis.dim()];
    for (c, q) in gram_coeffs.iter().zip(basis.grammar().ortho()) {
        if *c != 0.0 {
            math::axpy(*c, q, &mut recon);
        }
    }
    for &(j, c) in word_entries {
        math::axpy(c, &basis.word_vectors()[j], &mut recon);
    }
    recon
}

/// Dense vector implied by the sparse coefficients.
pub fn reconstruct(sv: &SparseEmbedding, basis: &BasisSet) -> Result<Vec<f64>> {
    if sv.gram_coeffs.len() != N_GRAMMAR {
        return Err(Error::Config(format!(
            "expected {N_GRAMMAR} grammatical coefficients, got {}",
            sv.gram_coeffs.len()
        )));
    }
    if let Some(&(j, _)) = sv.word_entries.iter().find(|(j, _)| *j >= basis.n_words()) {
        return Err(Error::Config(format!(
            "word entry index {j} out of range for basis with {} words",
            basis.n_words()
        )));
    }
    Ok(reconstruction(&sv.gram_coeffs, &sv.word_entries, basis))
}

/// All nonzero coefficients with their labels, ordered by descending
/// magnitude; ties put grammatical labels first, then sort lexicographically.
pub fn explain(sv: &SparseEmbedding, basis: &BasisSet) -> Result<Vec<(String, f64)>> {
    let mut terms: Vec<(String, f64, bool)> = Vec::new();
    for (i, &c) in sv.gram_coeffs.iter().enumerate() {
        if c != 0.0 {
            terms.push((basis.grammar().labels()[i].clone(), c, true));
        }
    }
    for &(j, c) in &sv.word_entries {
        let label = basis
            .label(N_GRAMMAR + j)
            .ok_or_else(|| Error::Config(format!("word entry index {j} out of range")))?;
        terms.push((label.to_string(), c, false));
    }
    terms.sort_by(|a, b| {
        b.1.abs()
            .partial_cmp(&a.1.abs())
            .unwrap()
            .then_with(|| a.2.cmp(&b.2).reverse()) // grammatical first
            .then_with(|| a.0.cmp(&b.0))
    });
    Ok(terms.into_iter().map(|(label, c, _)| (label, c)).collect())
}

/// Coefficient formatted to 2 significant figures with trailing zeros
/// trimmed, the style used in decomposition printouts.
pub fn format_coeff(x: f64) -> String {
    math::format_sig(x, 2)
}

/// Text rendering of a decomposition, e.g.
/// `carbon = 0.79 * nitrogen - 0.38 * CAPITALIZATION ...`
pub fn render_explanation(word: &str, terms: &[(String, f64)], top: Option<usize>) -> String {
    let shown = top.unwrap_or(terms.len()).min(terms.len());
    let mut out = format!("{word} =");
    if shown == 0 {
        out.push_str(" 0");
        return out;
    }
    for (i, (label, c)) in terms[..shown].iter().enumerate() {
        let mag = format_coeff(c.abs());
        if i == 0 {
            let sign = if *c < 0.0 { "-" } else { "" };
            out.push_str(&format!(" {sign}{mag} * {label}"));
        } else {
            let sign = if *c < 0.0 { "-" } else { "+" };
            out.push_str(&format!("\n  {sign} {mag} * {label}"));
        }
    }
    out
}

#[derive(Debug, Clone, Default)]
pub struct BatchStats {
    /// Power-of-two bucketed solver iteration counts: bucket -> count.
    pub iteration_histogram: std::collections::BTreeMap<usize, usize>,
    pub degenerate: usize,
    pub mean_nnz_words: f64,
    pub mean_error_sq: f64,
    pub mean_error: f64,
}

/// Encodes many words with a shared Lipschitz constant. With `threads > 1`
/// the work is split over word ranges; per-word results do not depend on the
/// split, so output is identical to the single-threaded run.
pub fn batch_encode(
    words: &[String],
    space: &EmbeddingSpace,
    basis: &BasisSet,
    config: &SolverConfig,
    threads: usize,
) -> Result<(Vec<SparseEmbedding>, BatchStats)> {
    config.validate()?;
    let l = solver::estimate_lipschitz(basis.word_vectors())?;
    let threads = threads.max(1).min(words.len().max(1));

    let results: Vec<Result<(SparseEmbedding, EncodeStats)>> = if threads == 1 {
        words
            .iter()
            .map(|w| encode_with_l(w, space, basis, config, l))
            .collect()
    } else {
        let chunk = words.len().div_ceil(threads);
        let mut out: Vec<Result<(SparseEmbedding, EncodeStats)>> = Vec::with_capacity(words.len());
        std::thread::scope(|scope| {
            let handles: Vec<_> = words
                .chunks(chunk)
                .map(|ws| {
                    scope.spawn(move || {
                        ws.iter()
                            .map(|w| encode_with_l(w, space, basis, config, l))
                            .collect::<Vec<_>>()
                    })
                })
                .collect();
            for h in handles {
                out.extend(h.join().expect("encode worker panicked"));
            }
        });
        out
    };

    let mut vectors = Vec::with_capacity(words.len());
    let mut stats = BatchStats::default();
    let mut nnz_sum = 0usize;
    let mut err_sq_sum = 0.0;
    let mut err_sum = 0.0;
    for r in results {
        let (sv, s) = r?;
        *stats
            .iteration_histogram
            .entry(s.iterations.next_power_of_two())
            .or_insert(0) += 1;
        if s.degenerate {
            stats.degenerate += 1;
        }
        nnz_sum += sv.nnz_words();
        err_sq_sum += s.unscaled_error_sq;
        err_sum += s.unscaled_error;
        vectors.push(sv);
    }
    let n = vectors.len().max(1) as f64;
    stats.mean_nnz_words = nnz_sum as f64 / n;
    stats.mean_error_sq = err_sq_sum / n;
    stats.mean_error = err_sum / n;
    Ok((vectors, stats))
}
