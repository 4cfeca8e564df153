//! Sparsity vs reconstruction error, one full batch encode per alpha.

use std::io::Write;

use crate::basis::BasisSet;
use crate::embedding::EmbeddingSpace;
use crate::encode;
use crate::error::{Error, Result};
use crate::math;
use crate::solver::SolverConfig;

#[derive(Debug, Clone)]
pub struct TradeoffPoint {
    pub alpha: f64,
    /// Mean nonzero word entries per vector (grammatical entries excluded).
    pub mean_nnz: f64,
    /// Mean of ||v_D - recon||^2 with the pre-renormalization reconstruction.
    pub mean_error_sq: f64,
    /// Mean of ||v_D - recon||, reported alongside since either reading of
    /// "reconstruction error" is defensible.
    pub mean_error_l2: f64,
}

/// One point per alpha, in input order.
pub fn tradeoff_curve(
    words: &[String],
    space: &EmbeddingSpace,
    basis: &BasisSet,
    alphas: &[f64],
    base: &SolverConfig,
    threads: usize,
) -> Result<Vec<TradeoffPoint>> {
    if alphas.iter().any(|&a| !(a > 0.0)) {
        return Err(Error::Config("alphas must be strictly positive".into()));
    }
    let mut points = Vec::with_capacity(alphas.len());
    for &alpha in alphas {
        let config = SolverConfig { alpha, ..base.clone() };
        let (_, stats) = encode::batch_encode(words, space, basis, &config, threads)?;
        points.push(TradeoffPoint {
            alpha,
            mean_nnz: stats.mean_nnz_words,
            mean_error_sq: stats.mean_error_sq,
            mean_error_l2: stats.mean_error,
        });
    }
    Ok(points)
}

/// CSV with `# key=value` comment lines first.
pub fn write_csv(
    points: &[TradeoffPoint],
    comments: &[(String, String)],
    w: &mut impl Write,
) -> std::io::Result<()> {
    for (k, v) in comments {
        writeln!(w, "# {k}={v}")?;
    }
    writeln!(w, "alpha,mean_nnz,mean_error_sq,mean_error_l2")?;
    for p in points {
        writeln!(
            w,
            "{},{},{},{}",
            math::fmt_f64(p.alpha),
            math::fmt_f64(p.mean_nnz),
            math::fmt_f64(p.mean_error_sq),
            math::fmt_f64(p.mean_error_l2)
        )?;
    }
    Ok(())
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::basis::TraceStep;
    use crate::grammar::{GrammarBasis, GRAMMAR_LABELS, N_GRAMMAR};

    fn toy_basis() -> BasisSet {
        let labels: Vec<String> = GRAMMAR_LABELS.iter().map(|s| s.to_string()).collect();
        let rows: Vec<Vec<f64>> = (0..N_GRAMMAR)
            .map(|i| {
                let mut v = vec![0.0; 16];
                v[i] = 1.0;
                v
            })
            .collect();
        let grammar = GrammarBasis::from_parts(labels, rows.clone(), rows, vec![1; N_GRAMMAR]).unwrap();
        let mut w0 = vec![0.0; 16];
        w0[11] = 1.0;
        let mut w1 = vec![0.0; 16];
        w1[13] = 1.0;
        BasisSet::from_parts(
            grammar,
            vec!["stone".into(), "river".into()],
            vec![w0, w1],
            vec![TraceStep { step: 0, word: "stone".into(), score: 1.0 }],
            "h".into(),
        )
        .unwrap()
    }

    fn toy_space(n: usize) -> (Vec<String>, EmbeddingSpace) {
        use rand::{Rng, SeedableRng};
        let mut rng = rand_chacha::ChaCha8Rng::seed_from_u64(5);
        let words: Vec<String> = (0..n).map(|i| format!("w{i}")).collect();
        let rows: Vec<Vec<f64>> = (0..n)
            .map(|_| {
                let mut v: Vec<f64> = (0..16).map(|_| rng.gen_range(-1.0..1.0)).collect();
                math::normalize(&mut v);
                v
            })
            .collect();
        let space = EmbeddingSpace::from_rows(words.clone(), rows, true).unwrap();
        (words, space)
    }

    #[test]
    fn huge_alpha_kills_all_word_entries() {
        let basis = toy_basis();
        let (words, space) = toy_space(12);
        let base = SolverConfig::new(1.0);
        let points = tradeoff_curve(&words, &space, &basis, &[1e6], &base, 1).unwrap();
        assert_eq!(points[0].mean_nnz, 0.0);

        // error equals the mean squared deflation residual norm
        let mut expect = 0.0;
        for w in &words {
            let (_, residual) = basis.grammar().deflate(space.word_vector(w).unwrap());
            expect += math::norm_sq(&residual);
        }
        expect /= words.len() as f64;
        assert!((points[0].mean_error_sq - expect).abs() < 1e-9);
    }

    #[test]
    fn monotone_in_alpha() {
        let basis = toy_basis();
        let (words, space) = toy_space(30);
        let base = SolverConfig::new(1.0);
        let points = tradeoff_curve(&words, &space, &basis, &[0.1, 0.35], &base, 1).unwrap();
        assert!(points[0].mean_nnz >= points[1].mean_nnz);
        assert!(points[0].mean_error_sq <= points[1].mean_error_sq);
    }

    #[test]
    fn csv_one_row_per_alpha() {
        let points = vec![
            TradeoffPoint { alpha: 0.1, mean_nnz: 2.0, mean_error_sq: 0.5, mean_error_l2: 0.7 },
            TradeoffPoint { alpha: 0.35, mean_nnz: 1.0, mean_error_sq: 0.6, mean_error_l2: 0.75 },
        ];
        let mut buf = Vec::new();
        write_csv(&points, &[("config_hash".into(), "abc".into())], &mut buf).unwrap();
        let text = String::from_utf8(buf).unwrap();
        assert_eq!(text.lines().count(), 4);
        assert!(text.starts_with("# config_hash=abc\n"));
    }
}
