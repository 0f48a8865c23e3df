use std::collections::HashMap;
use std::path::Path;

use log::warn;

use crate::error::{read_file, Error, Result};

/// Dense word vectors, all of the same dimension.
#[derive(Debug, Clone, Default)]
pub struct EmbeddingTable {
    dim: usize,
    words: Vec<String>,
    index: HashMap<String, usize>,
    /// Row-major, `words.len() * dim` values.
    vectors: Vec<f64>,
    norms: Vec<f64>,
}

impl EmbeddingTable {
    pub fn load(path: impl AsRef<Path>) -> Result<Self> {
        let path = path.as_ref();
        Self::parse(&read_file(path)?, &path.display().to_string())
    }

    /// Parses the plain-text format: a `V D` header, then `word v1 .. vD` per line.
    pub fn parse(text: &str, source_name: &str) -> Result<Self> {
        let mut lines = text.lines().enumerate().filter(|(_, l)| !l.trim().is_empty());
        let (_, header) = lines
            .next()
            .ok_or_else(|| Error::format(source_name, 1, "missing `V D` header"))?;
        let mut parts = header.split_whitespace().map(str::parse::<usize>);
        let (Some(Ok(count)), Some(Ok(dim)), None) = (parts.next(), parts.next(), parts.next()) else {
            return Err(Error::format(source_name, 1, format!("bad header {header:?}, expected `V D`")));
        };

        let mut table = EmbeddingTable {
            dim,
            ..Default::default()
        };
        let mut rows = 0;
        for (idx, line) in lines {
            let line_no = idx + 1;
            let mut fields = line.split_whitespace();
            let word = fields.next().expect("non-empty line");
            let values: Vec<f64> = fields
                .map(|f| f.parse::<f64>())
                .collect::<Result<_, _>>()
                .map_err(|e| Error::format(source_name, line_no, format!("bad number: {e}")))?;
            if values.len() != dim {
                return Err(Error::format(
                    source_name,
                    line_no,
                    format!("{word:?} has {} components, expected {dim}", values.len()),
                ));
            }
            rows += 1;
            table.insert(word, &values, source_name, line_no);
        }
        if rows != count {
            return Err(Error::format(
                source_name,
                1,
                format!("header announces {count} vectors, file has {rows}"),
            ));
        }
        Ok(table)
    }

    /// Builds a table from in-memory rows. Panics if dimensions disagree.
    pub fn from_rows<'a>(rows: impl IntoIterator<Item = (&'a str, Vec<f64>)>) -> Self {
        let mut table = EmbeddingTable::default();
        for (i, (word, v)) in rows.into_iter().enumerate() {
            if i == 0 {
                table.dim = v.len();
            }
            assert_eq!(v.len(), table.dim, "dimension mismatch for {word}");
            table.insert(word, &v, "<memory>", i + 1);
        }
        table
    }

    fn insert(&mut self, word: &str, values: &[f64], source_name: &str, line_no: usize) {
        let norm = values.iter().map(|x| x * x).sum::<f64>().sqrt();
        if let Some(&i) = self.index.get(word) {
            warn!("{source_name}:{line_no}: duplicate vector for {word:?}, keeping the last one");
            self.vectors[i * self.dim..(i + 1) * self.dim].copy_from_slice(values);
            self.norms[i] = norm;
        } else {
            self.index.insert(word.to_string(), self.words.len());
            self.words.push(word.to_string());
            self.vectors.extend_from_slice(values);
            self.norms.push(norm);
        }
    }

    pub fn len(&self) -> usize {
        self.words.len()
    }

    pub fn is_empty(&self) -> bool {
        self.words.is_empty()
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    pub fn contains(&self, word: &str) -> bool {
        self.index.contains_key(word)
    }

    pub fn vector(&self, word: &str) -> Option<&[f64]> {
        self.index
            .get(word)
            .map(|&i| &self.vectors[i * self.dim..(i + 1) * self.dim])
    }

    fn row_cosine(&self, i: usize, j: usize) -> Option<f64> {
        let (ni, nj) = (self.norms[i], self.norms[j]);
        if ni == 0.0 || nj == 0.0 {
            return None;
        }
        let a = &self.vectors[i * self.dim..(i + 1) * self.dim];
        let b = &self.vectors[j * self.dim..(j + 1) * self.dim];
        let dot: f64 = a.iter().zip(b).map(|(x, y)| x * y).sum();
        Some((dot / (ni * nj)).clamp(-1.0, 1.0))
    }

    /// Cosine similarity, or `None` when either word is missing or has a zero vector.
    pub fn cosine(&self, a: &str, b: &str) -> Option<f64> {
        let i = *self.index.get(a)?;
        let j = *self.index.get(b)?;
        self.row_cosine(i, j)
    }

    /// The `n` most similar other words, most similar first, ties in lexicographic order.
    pub fn nearest(&self, word: &str, n: usize) -> Vec<(String, f64)> {
        let Some(&i) = self.index.get(word) else {
            return Vec::new();
        };
        if n == 0 {
            return Vec::new();
        }
        let mut scored: Vec<(&str, f64)> = (0..self.words.len())
            .filter(|&j| j != i)
            .filter_map(|j| self.row_cosine(i, j).map(|s| (self.words[j].as_str(), s)))
            .collect();
        scored.sort_by(|a, b| b.1.total_cmp(&a.1).then_with(|| a.0.cmp(b.0)));
        scored
            .into_iter()
            .take(n)
            .map(|(w, s)| (w.to_string(), s))
            .collect()
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    const FIXTURE: &str = "3 2\nalpha 1 0\nbeta 0 1\ngamma 3 4\n";

    #[test]
    fn loads_fixture() {
        let t = EmbeddingTable::parse(FIXTURE, "fx").unwrap();
        assert_eq!(t.len(), 3);
        assert_eq!(t.dim(), 2);
        assert_eq!(t.vector("gamma"), Some(&[3.0, 4.0][..]));
    }

    #[test]
    fn short_row_is_a_format_error_at_its_line() {
        let e = EmbeddingTable::parse("2 2\nalpha 1 0\nbeta 1\n", "fx").unwrap_err();
        assert!(e.to_string().starts_with("fx:3:"), "{e}");
    }

    #[test]
    fn duplicate_word_keeps_last() {
        let t = EmbeddingTable::parse("2 2\nalpha 1 0\nalpha 0 1\n", "fx").unwrap();
        assert_eq!(t.len(), 1);
        assert_eq!(t.vector("alpha"), Some(&[0.0, 1.0][..]));
    }

    #[test]
    fn cosine_basics() {
        let t = EmbeddingTable::parse(FIXTURE, "fx").unwrap();
        assert_eq!(t.cosine("alpha", "alpha"), Some(1.0));
        assert_eq!(t.cosine("alpha", "beta"), Some(0.0));
        // (1,0)·(3,4) / (1·5) = 0.6, computed by hand
        assert!((t.cosine("alpha", "gamma").unwrap() - 0.6).abs() < 1e-9);
        assert_eq!(t.cosine("alpha", "delta"), None);
    }

    #[test]
    fn zero_vector_is_a_miss() {
        let t = EmbeddingTable::from_rows([("z", vec![0.0, 0.0]), ("a", vec![1.0, 0.0])]);
        assert_eq!(t.cosine("z", "a"), None);
        assert!(t.nearest("a", 5).is_empty());
    }

    #[test]
    fn nearest_edge_cases() {
        let t = EmbeddingTable::parse(FIXTURE, "fx").unwrap();
        assert!(t.nearest("alpha", 0).is_empty());
        assert!(t.nearest("unknown", 3).is_empty());
        let n = t.nearest("alpha", 10);
        assert_eq!(n.len(), 2);
        assert_eq!(n[0].0, "gamma");
    }
}
