//! On-disk format for encoded sparse vectors.
//!
//! ```text
//! SPARSE-EMBED v1 <basis-manifest-sha256> <n_gram> <n_word_dims>
//! # key=value            (run metadata, sorted by key)
//! token <scale> 0:v 1:v ... 10:v 14:v 276:v
//! ```
//!
//! Indices 0..10 are the grammatical dimensions and are always all present;
//! indices >= 11 are word dimensions and only nonzero ones are stored. The
//! second field is the renormalization factor that was applied to the
//! coefficients (0 marks a degenerate vector), kept so a reload reproduces
//! the `SparseEmbedding` exactly. All reals carry 17 significant digits.

use std::collections::{BTreeMap, HashMap};
use std::fs::File;
use std::io::{BufRead, BufReader, BufWriter, Write};
use std::path::Path;

use crate::encode::SparseEmbedding;
use crate::error::{Error, Result};
use crate::grammar::N_GRAMMAR;
use crate::math;

pub const SPARSE_MAGIC: &str = "SPARSE-EMBED";
pub const SPARSE_VERSION: &str = "v1";

#[derive(Debug, Clone, Default)]
pub struct SparseCollection {
    pub basis_hash: String,
    /// Number of word dimensions in the basis (sparse dim = 11 + this).
    pub n_word_dims: usize,
    pub metadata: BTreeMap<String, String>,
    vectors: Vec<SparseEmbedding>,
    index: HashMap<String, usize>,
}

impl SparseCollection {
    pub fn new(basis_hash: String, n_word_dims: usize) -> SparseCollection {
        SparseCollection {
            basis_hash,
            n_word_dims,
            ..Default::default()
        }
    }

    pub fn push(&mut self, sv: SparseEmbedding) {
        self.index.insert(sv.word.clone(), self.vectors.len());
        self.vectors.push(sv);
    }

    pub fn extend(&mut self, svs: impl IntoIterator<Item = SparseEmbedding>) {
        for sv in svs {
            self.push(sv);
        }
    }

    pub fn len(&self) -> usize {
        self.vectors.len()
    }

    pub fn is_empty(&self) -> bool {
        self.vectors.is_empty()
    }

    pub fn vectors(&self) -> &[SparseEmbedding] {
        &self.vectors
    }

    pub fn get(&self, word: &str) -> Option<&SparseEmbedding> {
        self.index.get(word).map(|&i| &self.vectors[i])
    }

    pub fn save(&self, path: &Path) -> Result<()> {
        let file = File::create(path).map_err(|e| Error::io(path, e))?;
        let mut w = BufWriter::new(file);
        self.write(&mut w).map_err(|e| Error::io(path, e))?;
        w.flush().map_err(|e| Error::io(path, e))
    }

    pub fn write(&self, w: &mut impl Write) -> std::io::Result<()> {
        writeln!(
            w,
            "{SPARSE_MAGIC} {SPARSE_VERSION} {} {N_GRAMMAR} {}",
            self.basis_hash, self.n_word_dims
        )?;
        for (k, v) in &self.metadata {
            writeln!(w, "# {k}={v}")?;
        }
        for sv in &self.vectors {
            write!(w, "{} {}", sv.word, math::fmt_f64(sv.scale_applied))?;
            for (i, c) in sv.gram_coeffs.iter().enumerate() {
                write!(w, " {i}:{}", math::fmt_f64(*c))?;
            }
            for &(j, c) in &sv.word_entries {
                write!(w, " {}:{}", N_GRAMMAR + j, math::fmt_f64(c))?;
            }
            writeln!(w)?;
        }
        Ok(())
    }

    pub fn to_bytes(&self) -> Vec<u8> {
        let mut buf = Vec::new();
        self.write(&mut buf).expect("writing to memory");
        buf
    }

    /// Loads a sparse vector file. When `expected_basis_hash` is given, a
    /// file written against a different basis manifest is rejected.
    pub fn load(path: &Path, expected_basis_hash: Option<&str>) -> Result<SparseCollection> {
        let file = File::open(path).map_err(|e| Error::io(path, e))?;
        let reader = BufReader::new(file);
        let mut lines = reader.lines().enumerate();

        let (_, header) = lines.next().ok_or_else(|| Error::Format {
            path: path.display().to_string(),
            message: "empty file".into(),
        })?;
        let header = header.map_err(|e| Error::io(path, e))?;
        let fields: Vec<&str> = header.split_whitespace().collect();
        if fields.len() != 5 || fields[0] != SPARSE_MAGIC || fields[1] != SPARSE_VERSION {
            return Err(Error::Format {
                path: path.display().to_string(),
                message: format!("bad header {header:?}"),
            });
        }
        let basis_hash = fields[2].to_string();
        if let Some(expected) = expected_basis_hash {
            if basis_hash != expected {
                return Err(Error::ManifestMismatch {
                    expected: basis_hash,
                    actual: expected.to_string(),
                });
            }
        }
        let n_gram: usize = fields[3].parse().map_err(|_| Error::Format {
            path: path.display().to_string(),
            message: "bad n_gram".into(),
        })?;
        if n_gram != N_GRAMMAR {
            return Err(Error::Format {
                path: path.display().to_string(),
                message: format!("expected {N_GRAMMAR} grammatical dims, file has {n_gram}"),
            });
        }
        let n_word_dims: usize = fields[4].parse().map_err(|_| Error::Format {
            path: path.display().to_string(),
            message: "bad word-dim count".into(),
        })?;

        let mut out = SparseCollection::new(basis_hash, n_word_dims);
        for (i, line) in lines {
            let line = line.map_err(|e| Error::io(path, e))?;
            let line_no = i + 1;
            if line.is_empty() {
                continue;
            }
            if let Some(meta) = line.strip_prefix('#') {
                if let Some((k, v)) = meta.trim_start().split_once('=') {
                    out.metadata.insert(k.to_string(), v.to_string());
                }
                continue;
            }
            let mut parts = line.split_whitespace();
            let word = parts
                .next()
                .ok_or_else(|| Error::parse(path, line_no, "missing token"))?
                .to_string();
            let scale: f64 = parts
                .next()
                .ok_or_else(|| Error::parse(path, line_no, "missing scale"))?
                .parse()
                .map_err(|_| Error::parse(path, line_no, "bad scale"))?;
            let mut gram_coeffs = vec![0.0; N_GRAMMAR];
            let mut seen_gram = [false; N_GRAMMAR];
            let mut word_entries = Vec::new();
            for entry in parts {
                let (idx, val) = entry
                    .split_once(':')
                    .ok_or_else(|| Error::parse(path, line_no, format!("bad entry {entry:?}")))?;
                let idx: usize = idx
                    .parse()
                    .map_err(|_| Error::parse(path, line_no, format!("bad index {idx:?}")))?;
                let val: f64 = val
                    .parse()
                    .map_err(|_| Error::parse(path, line_no, format!("bad value {val:?}")))?;
                if idx < N_GRAMMAR {
                    gram_coeffs[idx] = val;
                    seen_gram[idx] = true;
                } else {
                    let j = idx - N_GRAMMAR;
                    if j >= n_word_dims {
                        return Err(Error::parse(
                            path,
                            line_no,
                            format!("index {idx} out of range (n_word_dims {n_word_dims})"),
                        ));
                    }
                    if let Some(&(last, _)) = word_entries.last() {
                        if j <= last {
                            return Err(Error::parse(path, line_no, "entries out of order"));
                        }
                    }
                    word_entries.push((j, val));
                }
            }
            if !seen_gram.iter().all(|&s| s) {
                return Err(Error::parse(
                    path,
                    line_no,
                    "grammatical entries 0..10 must all be present",
                ));
            }
            out.push(SparseEmbedding {
                word,
                gram_coeffs,
                word_entries,
                scale_applied: scale,
            });
        }
        Ok(out)
    }
}
