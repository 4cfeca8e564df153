//! The 11 grammatical basis vectors: construction from an embedding space
//! plus lexicon, Gram–Schmidt orthonormalization in a fixed label order, and
//! deflation of arbitrary vectors against the orthonormal set.

use crate::embedding::EmbeddingSpace;
use crate::error::{Error, Result};
use crate::lexicon::{Lexicon, PosTag, Relation};
use crate::math;

/// Fixed label order. C0 comes first since it dominates the variance; the
/// order is recorded in the basis manifest so runs are reproducible.
pub const GRAMMAR_LABELS: [&str; 11] = [
    "C0",
    "CAPITALIZATION",
    "POS-NOUN",
    "POS-VERB",
    "POS-ADJ",
    "POS-ADV",
    "POS-NUM",
    "POS-PROPN",
    "PLURAL-NOUN",
    "PARTICIPLE",
    "PAST-TENSE",
];

pub const N_GRAMMAR: usize = GRAMMAR_LABELS.len();

#[derive(Debug, Clone)]
pub struct GrammarBasis {
    labels: Vec<String>,
    raw: Vec<Vec<f64>>,
    ortho: Vec<Vec<f64>>,
    /// How many words (or pairs) contributed to each raw vector.
    provenance: Vec<usize>,
}

impl GrammarBasis {
    /// Builds all 11 raw vectors in label order and orthonormalizes them.
    pub fn build(space: &EmbeddingSpace, lexicon: &Lexicon, top_k: usize) -> Result<GrammarBasis> {
        if !space.is_preprocessed() {
            return Err(Error::Config("grammar basis needs a preprocessed space".into()));
        }
        let mut raw = Vec::with_capacity(N_GRAMMAR);
        let mut provenance = Vec::with_capacity(N_GRAMMAR);

        raw.push(build_c0(space, top_k)?);
        provenance.push(top_k.min(space.len()));

        let (v, n) = build_mean_vector(space, "CAPITALIZATION", |w| {
            lexicon.lookup(w).is_capitalized
        })?;
        raw.push(v);
        provenance.push(n);

        for (label, tag) in [
            ("POS-NOUN", PosTag::Noun),
            ("POS-VERB", PosTag::Verb),
            ("POS-ADJ", PosTag::Adj),
            ("POS-ADV", PosTag::Adv),
            ("POS-NUM", PosTag::Num),
            ("POS-PROPN", PosTag::Propn),
        ] {
            let (v, n) = build_mean_vector(space, label, |w| lexicon.lookup(w).pos == tag)?;
            raw.push(v);
            provenance.push(n);
        }

        for relation in Relation::ALL {
            let (v, n) = build_relation_vector(space, lexicon.pairs(relation))
                .map_err(|e| match e {
                    Error::Domain(msg) => Error::Domain(format!("{relation}: {msg}")),
                    other => other,
                })?;
            raw.push(v);
            provenance.push(n);
        }

        let labels: Vec<String> = GRAMMAR_LABELS.iter().map(|s| s.to_string()).collect();
        let ortho = orthogonalize(&raw, &labels)?;
        Ok(GrammarBasis {
            labels,
            raw,
            ortho,
            provenance,
        })
    }

    /// Assembles a basis from prebuilt matrices, e.g. when reloading a
    /// manifest. Checks shape only.
    pub fn from_parts(
        labels: Vec<String>,
        raw: Vec<Vec<f64>>,
        ortho: Vec<Vec<f64>>,
        provenance: Vec<usize>,
    ) -> Result<GrammarBasis> {
        if labels.len() != N_GRAMMAR
            || raw.len() != N_GRAMMAR
            || ortho.len() != N_GRAMMAR
            || provenance.len() != N_GRAMMAR
        {
            return Err(Error::Config("grammar basis must have exactly 11 rows".into()));
        }
        Ok(GrammarBasis {
            labels,
            raw,
            ortho,
            provenance,
        })
    }

    pub fn labels(&self) -> &[String] {
        &self.labels
    }

    pub fn raw(&self) -> &[Vec<f64>] {
        &self.raw
    }

    pub fn ortho(&self) -> &[Vec<f64>] {
        &self.ortho
    }

    pub fn provenance(&self) -> &[usize] {
        &self.provenance
    }

    pub fn dim(&self) -> usize {
        self.ortho[0].len()
    }

    /// Largest off-diagonal |q_i . q_j| over the orthonormal rows.
    pub fn max_pairwise_dot(&self) -> f64 {
        let mut worst: f64 = 0.0;
        for i in 0..N_GRAMMAR {
            for j in i + 1..N_GRAMMAR {
                worst = worst.max(math::dot(&self.ortho[i], &self.ortho[j]).abs());
            }
        }
        worst
    }

    /// Projects `v` onto the orthonormal rows: returns the 11 projection
    /// coefficients and the residual `v - sum(coeff_i * q_i)`.
    pub fn deflate(&self, v: &[f64]) -> (Vec<f64>, Vec<f64>) {
        let mut coeffs = Vec::with_capacity(N_GRAMMAR);
        let mut residual = v.to_vec();
        for q in &self.ortho {
            let c = math::dot(v, q);
            coeffs.push(c);
            math::axpy(-c, q, &mut residual);
        }
        (coeffs, residual)
    }
}

/// First principal component of the `top_k` most frequent rows, unit norm,
/// sign fixed so the entry of largest magnitude is positive.
pub fn build_c0(space: &EmbeddingSpace, top_k: usize) -> Result<Vec<f64>> {
    if top_k < 2 {
        return Err(Error::Config("c0 needs at least 2 rows".into()));
    }
    if top_k > space.len() {
        return Err(Error::Config(format!(
            "top_k {top_k} exceeds vocabulary size {}",
            space.len()
        )));
    }
    let d = space.dim();
    // Gram matrix of the top_k rows, then power iteration on it.
    let mut gram = vec![0.0; d * d];
    for r in 0..top_k {
        let row = space.vector(r);
        for i in 0..d {
            let ri = row[i];
            if ri == 0.0 {
                continue;
            }
            let g = &mut gram[i * d..(i + 1) * d];
            for (gj, rj) in g.iter_mut().zip(row) {
                *gj += ri * rj;
            }
        }
    }

    let mut v = vec![1.0 / (d as f64).sqrt(); d];
    let mut lambda_prev = 0.0;
    let mut buf = vec![0.0; d];
    for _ in 0..10_000 {
        for i in 0..d {
            buf[i] = math::dot(&gram[i * d..(i + 1) * d], &v);
        }
        let lambda = math::dot(&buf, &v);
        let nrm = math::normalize(&mut buf);
        if nrm == 0.0 {
            return Err(Error::Numerical("power iteration collapsed to zero".into()));
        }
        std::mem::swap(&mut v, &mut buf);
        if (lambda - lambda_prev).abs() <= 1e-13 * lambda.abs().max(1.0) {
            break;
        }
        lambda_prev = lambda;
    }

    let mut max_idx = 0;
    for (i, x) in v.iter().enumerate() {
        if x.abs() > v[max_idx].abs() {
            max_idx = i;
        }
    }
    if v[max_idx] < 0.0 {
        math::scale(&mut v, -1.0);
    }
    Ok(v)
}

/// Unit-normalized mean of the rows whose word satisfies `predicate`.
pub fn build_mean_vector(
    space: &EmbeddingSpace,
    label: &str,
    predicate: impl Fn(&str) -> bool,
) -> Result<(Vec<f64>, usize)> {
    let d = space.dim();
    let mut sum = vec![0.0; d];
    let mut count = 0usize;
    for (i, word) in space.words().iter().enumerate() {
        if predicate(word) {
            math::axpy(1.0, space.vector(i), &mut sum);
            count += 1;
        }
    }
    if count < 10 {
        return Err(Error::Domain(format!(
            "{label}: only {count} matching words (need 10)"
        )));
    }
    math::scale(&mut sum, 1.0 / count as f64);
    if math::normalize(&mut sum) < 1e-12 {
        return Err(Error::Numerical(format!("{label}: mean vector is zero")));
    }
    Ok((sum, count))
}

/// Unit-normalized mean of (inflected - base) differences. Pairs with an
/// out-of-vocabulary word are excluded; the returned count is the number of
/// pairs that contributed.
pub fn build_relation_vector(
    space: &EmbeddingSpace,
    pairs: &[(String, String)],
) -> Result<(Vec<f64>, usize)> {
    let d = space.dim();
    let mut sum = vec![0.0; d];
    let mut count = 0usize;
    for (base, inflected) in pairs {
        let (Some(b), Some(f)) = (space.word_vector(base), space.word_vector(inflected)) else {
            continue;
        };
        for i in 0..d {
            sum[i] += f[i] - b[i];
        }
        count += 1;
    }
    if count < 10 {
        return Err(Error::Domain(format!(
            "only {count} resolvable pairs (need 10)"
        )));
    }
    math::scale(&mut sum, 1.0 / count as f64);
    if math::normalize(&mut sum) < 1e-12 {
        return Err(Error::Numerical("relation difference mean is zero".into()));
    }
    Ok((sum, count))
}

/// Modified Gram–Schmidt over the rows in the given order. Rows must be unit
/// norm on entry; a residual shorter than 1e-6 means near-linear dependence
/// and is reported with its label.
pub fn orthogonalize(raw: &[Vec<f64>], labels: &[String]) -> Result<Vec<Vec<f64>>> {
    let mut ortho: Vec<Vec<f64>> = Vec::with_capacity(raw.len());
    for (i, row) in raw.iter().enumerate() {
        let nrm = math::norm(row);
        if (nrm - 1.0).abs() > 1e-6 {
            return Err(Error::Config(format!(
                "row {:?} is not unit norm ({nrm})",
                labels[i]
            )));
        }
        let mut v = row.clone();
        for q in &ortho {
            let c = math::dot(&v, q);
            math::axpy(-c, q, &mut v);
        }
        // second sweep keeps the pairwise dots tight when rows correlate
        for q in &ortho {
            let c = math::dot(&v, q);
            math::axpy(-c, q, &mut v);
        }
        let residual = math::normalize(&mut v);
        if residual < 1e-6 {
            return Err(Error::Numerical(format!(
                "row {:?} is near-linearly dependent on earlier rows (residual {residual:.3e})",
                labels[i]
            )));
        }
        ortho.push(v);
    }
    Ok(ortho)
}

/// One candidate after deflation against the grammar basis.
#[derive(Debug, Clone)]
pub struct DeflatedCandidate {
    pub word: String,
    /// Unit-normalized residual.
    pub vector: Vec<f64>,
    /// 1 - |residual| before renormalization.
    pub removed_fraction: f64,
    /// True when more than half the length was removed.
    pub flagged: bool,
}

#[derive(Debug, Clone, Default)]
pub struct DeflationReport {
    pub kept: Vec<DeflatedCandidate>,
    /// (word, residual norm) for candidates inside the grammar span.
    pub dropped: Vec<(String, f64)>,
}

impl DeflationReport {
    pub fn flagged_count(&self) -> usize {
        self.kept.iter().filter(|c| c.flagged).count()
    }
}

/// Deflates every candidate against the basis and renormalizes. Candidates
/// losing more than 50% of their length are flagged but kept; candidates
/// with residual norm below 1e-6 are dropped.
pub fn deflate_candidates(
    basis: &GrammarBasis,
    candidates: impl IntoIterator<Item = (String, Vec<f64>)>,
) -> DeflationReport {
    let mut report = DeflationReport::default();
    for (word, vector) in candidates {
        let (_, mut residual) = basis.deflate(&vector);
        let nrm = math::normalize(&mut residual);
        if nrm < 1e-6 {
            report.dropped.push((word, nrm));
            continue;
        }
        report.kept.push(DeflatedCandidate {
            word,
            vector: residual,
            removed_fraction: 1.0 - nrm,
            flagged: nrm < 0.5,
        });
    }
    if !report.dropped.is_empty() {
        eprintln!(
            "warning: dropped {} candidates inside the grammar span",
            report.dropped.len()
        );
    }
    report
}

#[cfg(test)]
mod tests {
    use super::*;

    fn space_from(rows: Vec<Vec<f64>>) -> EmbeddingSpace {
        let words = (0..rows.len()).map(|i| format!("w{i}")).collect();
        EmbeddingSpace::from_rows(words, rows, true).unwrap()
    }

    #[test]
    fn c0_dominant_direction() {
        let space = space_from(vec![
            vec![1.0, 0.0],
            vec![-1.0, 0.0],
            vec![0.0, 0.1],
            vec![0.0, -0.1],
        ]);
        let c0 = build_c0(&space, 4).unwrap();
        assert!((c0[0] - 1.0).abs() < 1e-9, "{c0:?}");
        assert!(c0[1].abs() < 1e-9);
    }

    #[test]
    fn c0_rank_one_data() {
        let space = space_from(vec![vec![0.0, 1.0], vec![0.0, 1.0], vec![0.0, 1.0]]);
        let c0 = build_c0(&space, 3).unwrap();
        assert!((c0[1] - 1.0).abs() < 1e-12);
    }

    #[test]
    fn c0_guards() {
        let space = space_from(vec![vec![1.0, 0.0], vec![0.0, 1.0]]);
        assert!(build_c0(&space, 1).is_err());
        assert!(build_c0(&space, 3).is_err());
    }

    #[test]
    fn mean_vector_two_rows() {
        let space = space_from(vec![vec![1.0, 0.0], vec![0.0, 1.0]]);
        let lots = space_from(
            (0..12)
                .map(|i| if i % 2 == 0 { vec![1.0, 0.0] } else { vec![0.0, 1.0] })
                .collect(),
        );
        let (v, n) = build_mean_vector(&lots, "X", |_| true).unwrap();
        let r = std::f64::consts::FRAC_1_SQRT_2;
        assert_eq!(n, 12);
        assert!((v[0] - r).abs() < 1e-12 && (v[1] - r).abs() < 1e-12);

        // below the threshold
        assert!(build_mean_vector(&space, "Y", |w| w == "w0").is_err());
    }

    #[test]
    fn relation_vector_hand_arithmetic() {
        let words = vec!["a".into(), "b".into(), "c".into(), "d".into()];
        let rows = vec![
            vec![1.0, 0.0],
            vec![0.0, 1.0],
            vec![0.6, 0.8],
            vec![-0.8, 0.6],
        ];
        let space = EmbeddingSpace::from_rows(words, rows, true).unwrap();
        let mut pairs: Vec<(String, String)> = Vec::new();
        for _ in 0..5 {
            pairs.push(("a".into(), "b".into()));
            pairs.push(("c".into(), "d".into()));
        }
        let (v, n) = build_relation_vector(&space, &pairs).unwrap();
        assert_eq!(n, 10);
        // mean difference (-1.2, 0.4), normalized
        let expect = {
            let mut e = vec![-1.2, 0.4];
            math::normalize(&mut e);
            e
        };
        assert!((v[0] - expect[0]).abs() < 1e-12);
        assert!((v[1] - expect[1]).abs() < 1e-12);
    }

    #[test]
    fn relation_vector_skips_oov() {
        let words = vec!["a".into(), "b".into()];
        let rows = vec![vec![1.0, 0.0], vec![0.0, 1.0]];
        let space = EmbeddingSpace::from_rows(words, rows, true).unwrap();
        let mut pairs: Vec<(String, String)> = (0..10).map(|_| ("a".into(), "b".into())).collect();
        pairs.push(("a".into(), "zzz".into()));
        let (_, n) = build_relation_vector(&space, &pairs).unwrap();
        assert_eq!(n, 10);
    }

    #[test]
    fn orthogonalize_textbook() {
        let r = std::f64::consts::FRAC_1_SQRT_2;
        let raw = vec![vec![1.0, 0.0], vec![r, r]];
        let labels = vec!["A".to_string(), "B".to_string()];
        let q = orthogonalize(&raw, &labels).unwrap();
        assert!((q[0][0] - 1.0).abs() < 1e-12);
        assert!(q[1][0].abs() < 1e-12 && (q[1][1] - 1.0).abs() < 1e-12);
    }

    #[test]
    fn orthogonalize_fixed_point() {
        let raw = vec![vec![1.0, 0.0, 0.0], vec![0.0, 1.0, 0.0]];
        let labels = vec!["A".to_string(), "B".to_string()];
        let q = orthogonalize(&raw, &labels).unwrap();
        for (qi, ri) in q.iter().zip(&raw) {
            for (a, b) in qi.iter().zip(ri) {
                assert!((a - b).abs() < 1e-12);
            }
        }
    }

    #[test]
    fn orthogonalize_rejects_dependence() {
        let raw = vec![vec![1.0, 0.0], vec![1.0, 1e-9]];
        let mut second = raw[1].clone();
        math::normalize(&mut second);
        let raw = vec![raw[0].clone(), second];
        let labels = vec!["A".to_string(), "B".to_string()];
        match orthogonalize(&raw, &labels).unwrap_err() {
            Error::Numerical(msg) => assert!(msg.contains("\"B\""), "{msg}"),
            other => panic!("unexpected {other:?}"),
        }
    }

    fn toy_basis() -> GrammarBasis {
        // 11 orthonormal rows in 16 dims: coordinate vectors
        let labels: Vec<String> = GRAMMAR_LABELS.iter().map(|s| s.to_string()).collect();
        let rows: Vec<Vec<f64>> = (0..N_GRAMMAR)
            .map(|i| {
                let mut v = vec![0.0; 16];
                v[i] = 1.0;
                v
            })
            .collect();
        GrammarBasis::from_parts(labels, rows.clone(), rows, vec![1; N_GRAMMAR]).unwrap()
    }

    #[test]
    fn deflate_basis_member() {
        let basis = toy_basis();
        let v = basis.ortho()[3].clone();
        let (coeffs, residual) = basis.deflate(&v);
        for (i, c) in coeffs.iter().enumerate() {
            let want = if i == 3 { 1.0 } else { 0.0 };
            assert!((c - want).abs() < 1e-12);
        }
        assert!(math::norm(&residual) < 1e-12);
    }

    #[test]
    fn deflate_orthogonal_vector() {
        let basis = toy_basis();
        let mut v = vec![0.0; 16];
        v[14] = 1.0;
        let (coeffs, residual) = basis.deflate(&v);
        assert!(coeffs.iter().all(|c| c.abs() < 1e-12));
        assert!((math::norm(&residual) - 1.0).abs() < 1e-12);
    }

    #[test]
    fn deflate_reconstruction_identity() {
        let basis = toy_basis();
        let mut v: Vec<f64> = (0..16).map(|i| ((i * 7 + 3) % 11) as f64 - 5.0).collect();
        math::normalize(&mut v);
        let (coeffs, residual) = basis.deflate(&v);
        let mut recon = residual.clone();
        for (c, q) in coeffs.iter().zip(basis.ortho()) {
            math::axpy(*c, q, &mut recon);
        }
        for (a, b) in recon.iter().zip(&v) {
            assert!((a - b).abs() < 1e-12);
        }
    }

    #[test]
    fn deflate_candidates_rules() {
        let basis = toy_basis();
        // equal to a grammar row: dropped
        let g = basis.ortho()[0].clone();
        // orthogonal: unchanged
        let mut w = vec![0.0; 16];
        w[12] = 1.0;
        // mix of grammar row and orthogonal unit: residual = w, fraction 1 - sqrt(1/2)
        let mut mix = vec![0.0; 16];
        mix[0] = 1.0;
        mix[12] = 1.0;
        math::normalize(&mut mix);

        let report = deflate_candidates(
            &basis,
            vec![
                ("g".to_string(), g),
                ("w".to_string(), w.clone()),
                ("mix".to_string(), mix),
            ],
        );
        assert_eq!(report.dropped.len(), 1);
        assert_eq!(report.dropped[0].0, "g");
        assert_eq!(report.kept.len(), 2);

        let kept_w = &report.kept[0];
        assert_eq!(kept_w.word, "w");
        assert!(kept_w.removed_fraction.abs() < 1e-12);
        assert!(!kept_w.flagged);

        let kept_mix = &report.kept[1];
        assert_eq!(kept_mix.word, "mix");
        let expect = 1.0 - std::f64::consts::FRAC_1_SQRT_2;
        assert!((kept_mix.removed_fraction - expect).abs() < 1e-12);
        for (a, b) in kept_mix.vector.iter().zip(&w) {
            assert!((a - b).abs() < 1e-12);
        }
        assert!(!kept_mix.flagged); // residual norm 1/sqrt(2) > 0.5
    }
}
