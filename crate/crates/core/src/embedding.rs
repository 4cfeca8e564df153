//! Dense embedding spaces: loading word2vec/fastText text files, the
//! mean-subtract + unit-normalize preprocessing, and a lossless on-disk
//! format that remembers whether preprocessing already happened.
//!
//! Word order in the file is taken as frequency order, most frequent first,
//! which is the convention of pretrained vector releases.

use std::collections::HashMap;
use std::fs::File;
use std::io::{BufRead, BufReader, BufWriter, Write};
use std::path::Path;

use crate::error::{Error, Result};
use crate::math;

const SPACE_MAGIC: &str = "EMBED-SPACE v1";

/// An ordered vocabulary with one dense vector per word.
#[derive(Debug, Clone)]
pub struct EmbeddingSpace {
    words: Vec<String>,
    index: HashMap<String, usize>,
    vectors: Vec<f64>, // row-major, len() * dim()
    n_d: usize,
    mean_vector: Vec<f64>,
    preprocessed: bool,
}

impl EmbeddingSpace {
    /// Builds a space from rows already in memory. Intended for synthetic
    /// data and tests; file loading should go through [`EmbeddingSpace::load`].
    pub fn from_rows(words: Vec<String>, rows: Vec<Vec<f64>>, preprocessed: bool) -> Result<Self> {
        if words.len() != rows.len() || words.is_empty() {
            return Err(Error::Config(format!(
                "from_rows: {} words vs {} rows",
                words.len(),
                rows.len()
            )));
        }
        let n_d = rows[0].len();
        let mut vectors = Vec::with_capacity(words.len() * n_d);
        for row in &rows {
            if row.len() != n_d {
                return Err(Error::Config("from_rows: ragged rows".into()));
            }
            vectors.extend_from_slice(row);
        }
        let mut index = HashMap::with_capacity(words.len());
        for (i, w) in words.iter().enumerate() {
            if index.insert(w.clone(), i).is_some() {
                return Err(Error::Config(format!("from_rows: duplicate word {w:?}")));
            }
        }
        Ok(EmbeddingSpace {
            words,
            index,
            vectors,
            n_d,
            mean_vector: vec![0.0; n_d],
            preprocessed,
        })
    }

    /// Loads the first `limit` rows of an embedding file.
    ///
    /// Accepts word2vec/fastText text (optional "count dim" header, then one
    /// `token v1 .. vn` line per word) and the format written by
    /// [`EmbeddingSpace::save`]. Duplicate tokens after the first are skipped
    /// and do not count toward `limit`.
    pub fn load(path: &Path, limit: usize) -> Result<Self> {
        if limit == 0 {
            return Err(Error::Config("limit must be positive".into()));
        }
        let file = File::open(path).map_err(|e| Error::io(path, e))?;
        let mut reader = BufReader::new(file);

        let mut first = String::new();
        reader
            .read_line(&mut first)
            .map_err(|e| Error::io(path, e))?;
        if first.trim_end().starts_with(SPACE_MAGIC) {
            return Self::load_native(path, reader, &first, limit);
        }

        let mut words: Vec<String> = Vec::new();
        let mut index = HashMap::new();
        let mut vectors: Vec<f64> = Vec::new();
        let mut n_d: Option<usize> = None;
        let mut skipped_duplicates = 0usize;

        // The word2vec header is a line of exactly two integers.
        let mut line_no = 1usize;
        let fields: Vec<&str> = first.split_whitespace().collect();
        let header_dim = match fields.as_slice() {
            [count, dim] => match (count.parse::<usize>(), dim.parse::<usize>()) {
                (Ok(_), Ok(d)) => Some(d),
                _ => None,
            },
            _ => None,
        };
        if let Some(d) = header_dim {
            n_d = Some(d);
        } else if !fields.is_empty() {
            parse_row(
                path, line_no, &fields, &mut n_d, &mut words, &mut index, &mut vectors,
                &mut skipped_duplicates,
            )?;
        }

        let mut line = String::new();
        while words.len() < limit {
            line.clear();
            let read = reader.read_line(&mut line).map_err(|e| Error::io(path, e))?;
            if read == 0 {
                break;
            }
            line_no += 1;
            let fields: Vec<&str> = line.split_whitespace().collect();
            if fields.is_empty() {
                continue;
            }
            parse_row(
                path, line_no, &fields, &mut n_d, &mut words, &mut index, &mut vectors,
                &mut skipped_duplicates,
            )?;
        }

        if words.is_empty() {
            return Err(Error::Format {
                path: path.display().to_string(),
                message: "no embedding rows".into(),
            });
        }
        if skipped_duplicates > 0 {
            eprintln!("warning: skipped {skipped_duplicates} duplicate tokens in {}", path.display());
        }
        let n_d = n_d.unwrap();
        Ok(EmbeddingSpace {
            words,
            index,
            vectors,
            n_d,
            mean_vector: vec![0.0; n_d],
            preprocessed: false,
        })
    }

    fn load_native(
        path: &Path,
        reader: BufReader<File>,
        header: &str,
        limit: usize,
    ) -> Result<Self> {
        let fields: Vec<&str> = header.split_whitespace().collect();
        // "EMBED-SPACE v1 <preprocessed> <n_words> <n_d>"
        if fields.len() != 5 {
            return Err(Error::Format {
                path: path.display().to_string(),
                message: "malformed EMBED-SPACE header".into(),
            });
        }
        let preprocessed = match fields[2] {
            "0" => false,
            "1" => true,
            other => {
                return Err(Error::Format {
                    path: path.display().to_string(),
                    message: format!("bad preprocessed flag {other:?}"),
                })
            }
        };
        let n_d: usize = fields[4].parse().map_err(|_| Error::Format {
            path: path.display().to_string(),
            message: "bad dimension in header".into(),
        })?;

        let mut words = Vec::new();
        let mut index = HashMap::new();
        let mut vectors = Vec::new();
        let mut mean_vector = vec![0.0; n_d];
        let mut n_d_seen = Some(n_d);
        let mut skipped = 0usize;

        for (i, line) in reader.lines().enumerate() {
            let line = line.map_err(|e| Error::io(path, e))?;
            let line_no = i + 2;
            let fields: Vec<&str> = line.split_whitespace().collect();
            if fields.is_empty() {
                continue;
            }
            if fields[0] == "MEAN" {
                if fields.len() != n_d + 1 {
                    return Err(Error::parse(path, line_no, "MEAN line has wrong arity"));
                }
                for (j, f) in fields[1..].iter().enumerate() {
                    mean_vector[j] = f
                        .parse()
                        .map_err(|_| Error::parse(path, line_no, format!("bad real {f:?}")))?;
                }
                continue;
            }
            if words.len() >= limit {
                break;
            }
            parse_row(
                path, line_no, &fields, &mut n_d_seen, &mut words, &mut index, &mut vectors,
                &mut skipped,
            )?;
        }
        if words.is_empty() {
            return Err(Error::Format {
                path: path.display().to_string(),
                message: "no embedding rows".into(),
            });
        }
        Ok(EmbeddingSpace {
            words,
            index,
            vectors,
            n_d,
            mean_vector,
            preprocessed,
        })
    }

    /// Writes the space, including the preprocessing state, so a reload is
    /// exact. Values carry 17 significant digits.
    pub fn save(&self, path: &Path) -> Result<()> {
        let file = File::create(path).map_err(|e| Error::io(path, e))?;
        let mut w = BufWriter::new(file);
        let flag = if self.preprocessed { 1 } else { 0 };
        writeln!(w, "{SPACE_MAGIC} {flag} {} {}", self.words.len(), self.n_d)
            .map_err(|e| Error::io(path, e))?;
        if self.preprocessed {
            let mean: Vec<String> = self.mean_vector.iter().map(|&x| math::fmt_f64(x)).collect();
            writeln!(w, "MEAN {}", mean.join(" ")).map_err(|e| Error::io(path, e))?;
        }
        for (i, word) in self.words.iter().enumerate() {
            let row: Vec<String> = self.vector(i).iter().map(|&x| math::fmt_f64(x)).collect();
            writeln!(w, "{word} {}", row.join(" ")).map_err(|e| Error::io(path, e))?;
        }
        w.flush().map_err(|e| Error::io(path, e))
    }

    /// Subtracts the column mean from every row, then scales each row to unit
    /// length. The column mean of the centered intermediate is checked to be
    /// zero before the per-row renormalization.
    pub fn preprocess(mut self) -> Result<Self> {
        if self.preprocessed {
            return Err(Error::Config(
                "space is already preprocessed; refusing to re-apply".into(),
            ));
        }
        let n = self.words.len();
        let d = self.n_d;
        let mut mean = vec![0.0; d];
        for i in 0..n {
            for (m, v) in mean.iter_mut().zip(self.vector(i)) {
                *m += v;
            }
        }
        for m in &mut mean {
            *m /= n as f64;
        }
        for i in 0..n {
            let row = &mut self.vectors[i * d..(i + 1) * d];
            for (v, m) in row.iter_mut().zip(&mean) {
                *v -= m;
            }
        }

        // centered intermediate: column mean must be zero up to rounding
        let mut check = vec![0.0; d];
        for i in 0..n {
            for (c, v) in check.iter_mut().zip(self.vector(i)) {
                *c += v;
            }
        }
        for c in &check {
            let col_mean = c / n as f64;
            if col_mean.abs() > 1e-9 {
                return Err(Error::Numerical(format!(
                    "centered column mean {col_mean} exceeds 1e-9"
                )));
            }
        }

        for i in 0..n {
            let row = &mut self.vectors[i * d..(i + 1) * d];
            let nrm = math::norm(row);
            if nrm < 1e-12 {
                return Err(Error::Numerical(format!(
                    "word {:?} has zero vector after mean subtraction",
                    self.words[i]
                )));
            }
            math::scale(row, 1.0 / nrm);
        }
        self.mean_vector = mean;
        self.preprocessed = true;
        Ok(self)
    }

    pub fn len(&self) -> usize {
        self.words.len()
    }

    pub fn is_empty(&self) -> bool {
        self.words.is_empty()
    }

    pub fn dim(&self) -> usize {
        self.n_d
    }

    pub fn words(&self) -> &[String] {
        &self.words
    }

    pub fn vector(&self, i: usize) -> &[f64] {
        &self.vectors[i * self.n_d..(i + 1) * self.n_d]
    }

    pub fn index_of(&self, word: &str) -> Option<usize> {
        self.index.get(word).copied()
    }

    pub fn word_vector(&self, word: &str) -> Option<&[f64]> {
        self.index_of(word).map(|i| self.vector(i))
    }

    pub fn is_preprocessed(&self) -> bool {
        self.preprocessed
    }

    pub fn mean_vector(&self) -> &[f64] {
        &self.mean_vector
    }
}

#[allow(clippy::too_many_arguments)]
fn parse_row(
    path: &Path,
    line_no: usize,
    fields: &[&str],
    n_d: &mut Option<usize>,
    words: &mut Vec<String>,
    index: &mut HashMap<String, usize>,
    vectors: &mut Vec<f64>,
    skipped_duplicates: &mut usize,
) -> Result<()> {
    let token = fields[0];
    let values = &fields[1..];
    match *n_d {
        Some(d) if values.len() != d => {
            return Err(Error::parse(
                path,
                line_no,
                format!("expected {d} values, found {}", values.len()),
            ));
        }
        None if values.is_empty() => {
            return Err(Error::parse(path, line_no, "row has no vector values"));
        }
        None => *n_d = Some(values.len()),
        _ => {}
    }
    if index.contains_key(token) {
        *skipped_duplicates += 1;
        return Ok(());
    }
    let start = vectors.len();
    for f in values {
        match f.parse::<f64>() {
            Ok(x) if x.is_finite() => vectors.push(x),
            _ => {
                vectors.truncate(start);
                return Err(Error::parse(path, line_no, format!("unparseable real {f:?}")));
            }
        }
    }
    index.insert(token.to_string(), words.len());
    words.push(token.to_string());
    Ok(())
}
