//! Shared fixtures and independent oracles for the integration and
//! acceptance suites. Everything here deliberately reimplements the checked
//! computation from scratch (different algorithms or different loop
//! structure) so a bug in the production path cannot hide.

#![allow(dead_code)]

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use sparse_embed::embedding::EmbeddingSpace;
use sparse_embed::lexicon::{Lexicon, LexiconEntry, PosTag, Relation};
use sparse_embed::selection::{quantize_score, DiversityAgg};

pub fn dot(a: &[f64], b: &[f64]) -> f64 {
    let mut s = 0.0;
    for i in 0..a.len() {
        s += a[i] * b[i];
    }
    s
}

pub fn norm(a: &[f64]) -> f64 {
    dot(a, a).sqrt()
}

pub fn normalize(a: &mut [f64]) {
    let n = norm(a);
    for x in a {
        *x /= n;
    }
}

pub fn random_unit(rng: &mut impl Rng, d: usize) -> Vec<f64> {
    loop {
        let mut v: Vec<f64> = (0..d).map(|_| rng.gen_range(-1.0..1.0)).collect();
        let n = norm(&v);
        if n > 1e-3 {
            for x in &mut v {
                *x /= n;
            }
            return v;
        }
    }
}

/// ---------------------------------------------------------------- lasso --

pub fn lasso_objective(target: &[f64], dict: &[Vec<f64>], coeffs: &[f64], alpha: f64) -> f64 {
    let d = target.len();
    let mut recon = vec![0.0; d];
    for (c, atom) in coeffs.iter().zip(dict) {
        for i in 0..d {
            recon[i] += c * atom[i];
        }
    }
    let mut fit = 0.0;
    for i in 0..d {
        fit += (target[i] - recon[i]) * (target[i] - recon[i]);
    }
    fit + alpha * coeffs.iter().map(|c| c.abs()).sum::<f64>()
}

/// Cyclic coordinate descent for min ||target - v.D||^2 + alpha*||v||_1,
/// swept until the largest coordinate change falls below `tol`.
pub fn cd_lasso(target: &[f64], dict: &[Vec<f64>], alpha: f64, tol: f64) -> Vec<f64> {
    let n = dict.len();
    let d = target.len();
    let mut v = vec![0.0; n];
    let mut recon = vec![0.0; d];
    let atom_norm_sq: Vec<f64> = dict.iter().map(|a| dot(a, a)).collect();
    for _ in 0..200_000 {
        let mut max_change = 0.0f64;
        for j in 0..n {
            let old = v[j];
            // rho = d_j . (target - recon_without_j)
            let mut rho = 0.0;
            for i in 0..d {
                rho += dict[j][i] * (target[i] - recon[i] + old * dict[j][i]);
            }
            let thr = alpha / 2.0;
            let new = if rho > thr {
                (rho - thr) / atom_norm_sq[j]
            } else if rho < -thr {
                (rho + thr) / atom_norm_sq[j]
            } else {
                0.0
            };
            if new != old {
                for i in 0..d {
                    recon[i] += (new - old) * dict[j][i];
                }
                v[j] = new;
            }
            max_change = max_change.max((new - old).abs());
        }
        if max_change < tol {
            break;
        }
    }
    v
}

pub fn support(v: &[f64]) -> Vec<usize> {
    v.iter()
        .enumerate()
        .filter(|(_, c)| **c != 0.0)
        .map(|(j, _)| j)
        .collect()
}

/// ------------------------------------------------------ greedy selection --

/// Re-evaluating oracle: recomputes every weight from the selected set and
/// every score from raw dot products at every step. O(steps*|F|*|V|*|B|).
pub fn naive_greedy(
    candidates: &[Vec<f64>],
    reference: &[&[f64]],
    n_select: usize,
    agg: DiversityAgg,
) -> Vec<(usize, f64)> {
    let mut selected: Vec<(usize, f64)> = Vec::new();
    for _ in 0..n_select {
        let mut best: Option<(usize, f64)> = None;
        for (i, x) in candidates.iter().enumerate() {
            if selected.iter().any(|&(s, _)| s == i) {
                continue;
            }
            let mut sum = 0.0;
            for v in reference {
                let w = if selected.is_empty() {
                    1.0
                } else {
                    let mut agg_val = match agg {
                        DiversityAgg::Max => f64::NEG_INFINITY,
                        DiversityAgg::Min => f64::INFINITY,
                    };
                    for &(b, _) in &selected {
                        let dis = 1.0 - dot(&candidates[b], v);
                        agg_val = match agg {
                            DiversityAgg::Max => agg_val.max(dis),
                            DiversityAgg::Min => agg_val.min(dis),
                        };
                    }
                    agg_val
                };
                sum += dot(x, v) * w;
            }
            let score = quantize_score(sum);
            match best {
                Some((_, s)) if score <= s => {}
                _ => best = Some((i, score)),
            }
        }
        selected.push(best.expect("candidates remain"));
    }
    selected
}

/// ------------------------------------------------------- linear algebra --

/// Principal direction via power iteration on an explicitly formed Gram
/// matrix, started from a random vector with restarts.
pub fn principal_direction_oracle(rows: &[Vec<f64>], seed: u64) -> Vec<f64> {
    let d = rows[0].len();
    let mut gram = vec![vec![0.0; d]; d];
    for r in rows {
        for i in 0..d {
            for j in 0..d {
                gram[i][j] += r[i] * r[j];
            }
        }
    }
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut best: Option<(f64, Vec<f64>)> = None;
    for _ in 0..3 {
        let mut v = random_unit(&mut rng, d);
        for _ in 0..100_000 {
            let mut next: Vec<f64> = (0..d).map(|i| dot(&gram[i], &v)).collect();
            let n = norm(&next);
            if n == 0.0 {
                break;
            }
            for x in &mut next {
                *x /= n;
            }
            let delta: f64 = next
                .iter()
                .zip(&v)
                .map(|(a, b)| (a - b).abs())
                .fold(0.0, f64::max);
            v = next;
            if delta < 1e-15 {
                break;
            }
        }
        let lambda = dot(&v, &(0..d).map(|i| dot(&gram[i], &v)).collect::<Vec<_>>());
        if best.as_ref().map_or(true, |(l, _)| lambda > *l) {
            best = Some((lambda, v));
        }
    }
    best.unwrap().1
}

/// Householder QR of the transpose: returns an orthonormal basis whose i-th
/// row spans the same flag as rows[0..=i].
pub fn householder_q(rows: &[Vec<f64>]) -> Vec<Vec<f64>> {
    let k = rows.len();
    let d = rows[0].len();
    // a: d x k column-major (columns are the input rows)
    let mut a = vec![vec![0.0; k]; d];
    for (j, row) in rows.iter().enumerate() {
        for i in 0..d {
            a[i][j] = row[i];
        }
    }
    let mut reflectors: Vec<Vec<f64>> = Vec::new();
    for col in 0..k {
        // Householder vector for column col below the diagonal
        let mut x = vec![0.0; d];
        for i in col..d {
            x[i] = a[i][col];
        }
        let alpha = -x[col].signum() * norm(&x[col..]);
        let mut u = x;
        u[col] -= alpha;
        let unorm = norm(&u[col..]);
        if unorm > 1e-300 {
            for i in col..d {
                u[i] /= unorm;
            }
            // apply I - 2uu^T to remaining columns
            for j in col..k {
                let mut proj = 0.0;
                for i in col..d {
                    proj += u[i] * a[i][j];
                }
                for i in col..d {
                    a[i][j] -= 2.0 * proj * u[i];
                }
            }
        }
        reflectors.push(u);
    }
    // q_i = H_0 H_1 ... H_{k-1} e_i
    let mut q = Vec::with_capacity(k);
    for idx in 0..k {
        let mut e = vec![0.0; d];
        e[idx] = 1.0;
        for refl in reflectors.iter().rev() {
            let mut proj = 0.0;
            for i in 0..d {
                proj += refl[i] * e[i];
            }
            for i in 0..d {
                e[i] -= 2.0 * proj * refl[i];
            }
        }
        q.push(e);
    }
    q
}

/// --------------------------------------------------------------- fixture --

/// Deterministic synthetic corpus: `n` words over `d` dims with POS tags,
/// capitalization, dictionary flags, and 12 pairs per inflection relation.
pub struct Fixture {
    pub space: EmbeddingSpace,
    pub lexicon: Lexicon,
    pub words: Vec<String>,
}

// capitalization is deliberately decoupled from the POS cycle (period 9 vs
// 10) so no grammatical mean coincides with another's word set
pub fn fixture_word(i: usize) -> String {
    if i % 9 == 4 {
        format!("Cap{i:03}")
    } else {
        format!("w{i:03}")
    }
}

pub fn synth_fixture(n: usize, d: usize, seed: u64) -> Fixture {
    assert!(n >= 100, "fixture needs at least 100 words");
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let words: Vec<String> = (0..n).map(fixture_word).collect();
    let rows: Vec<Vec<f64>> = (0..n).map(|_| random_unit(&mut rng, d)).collect();
    let space = EmbeddingSpace::from_rows(words.clone(), rows, false)
        .unwrap()
        .preprocess()
        .unwrap();

    let pos_cycle = [
        PosTag::Noun,
        PosTag::Verb,
        PosTag::Adj,
        PosTag::Adv,
        PosTag::Num,
        PosTag::Propn,
        PosTag::Noun,
        PosTag::Verb,
        PosTag::Adj,
        PosTag::Other,
    ];
    let mut lexicon = Lexicon::new();
    for (i, w) in words.iter().enumerate() {
        lexicon.insert(
            w.clone(),
            LexiconEntry {
                pos: pos_cycle[i % 10],
                is_capitalized: i % 9 == 4,
                in_dictionary: i % 13 != 0,
            },
        );
    }
    for (r, relation) in Relation::ALL.into_iter().enumerate() {
        for p in 0..12 {
            let base = r * 30 + 2 * p;
            lexicon.add_pair(relation, words[base].clone(), words[base + 1].clone());
        }
    }
    Fixture { space, lexicon, words }
}

/// Writes the fixture as the on-disk input formats (raw embedding text file
/// plus lexicon TSV) so file-level flows can be exercised.
pub fn write_fixture_files(dir: &std::path::Path, n: usize, d: usize, seed: u64) -> (std::path::PathBuf, std::path::PathBuf) {
    use std::io::Write;
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let emb_path = dir.join("embeddings.txt");
    let mut f = std::fs::File::create(&emb_path).unwrap();
    writeln!(f, "{n} {d}").unwrap();
    for i in 0..n {
        let v = random_unit(&mut rng, d);
        let vals: Vec<String> = v.iter().map(|x| format!("{x}")).collect();
        writeln!(f, "{} {}", fixture_word(i), vals.join(" ")).unwrap();
    }

    let fixture = synth_fixture(n, d, seed);
    let lex_path = dir.join("lexicon.tsv");
    fixture.lexicon.save(&lex_path).unwrap();
    (emb_path, lex_path)
}
