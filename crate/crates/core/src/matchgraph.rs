//! Bit-packed match graphs and their combining algebra.
//!
//! A match graph on a query of length `n` has `n + 1` vertices; edge
//! `(i, j)` records that the substring spanning 1-based positions
//! `i+1..j` matches. Vertices are numbered `0..=n` and all edges are
//! forward (`i <= j`). The graph is stored as an `(n+1) x (n+1)` boolean
//! matrix, row-major, each row padded to a 64-bit word boundary.
//!
//! Concatenation is boolean matrix multiplication implemented as
//! row-indexed word-OR accumulation (`O(n^3/w)`); star is the
//! reflexive-transitive closure via repeated squaring. Fast `O(n^omega)`
//! multiplication kernels can replace `concat` behind the same interface.

use std::fmt;

const WORD_BITS: usize = 64;

#[derive(Clone, PartialEq, Eq)]
pub struct MatchGraph {
    n: usize,
    words_per_row: usize,
    bits: Vec<u64>,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub enum DecodeError {
    Truncated,
    LengthMismatch { expected: usize, got: usize },
    PaddingBits,
    BackwardEdge,
}

impl fmt::Display for DecodeError {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            DecodeError::Truncated => write!(f, "input shorter than header"),
            DecodeError::LengthMismatch { expected, got } => {
                write!(f, "expected {expected} bytes, got {got}")
            }
            DecodeError::PaddingBits => write!(f, "nonzero bits in row padding"),
            DecodeError::BackwardEdge => write!(f, "edge below the diagonal"),
        }
    }
}

impl std::error::Error for DecodeError {}

impl MatchGraph {
    /// Empty graph (no edges) on `n + 1` vertices.
    pub fn new(n: usize) -> Self {
        let words_per_row = (n + 1 + WORD_BITS - 1) / WORD_BITS;
        MatchGraph {
            n,
            words_per_row,
            bits: vec![0; (n + 1) * words_per_row],
        }
    }

    pub fn n(&self) -> usize {
        self.n
    }

    fn row(&self, i: usize) -> &[u64] {
        &self.bits[i * self.words_per_row..(i + 1) * self.words_per_row]
    }

    fn row_mut(&mut self, i: usize) -> &mut [u64] {
        &mut self.bits[i * self.words_per_row..(i + 1) * self.words_per_row]
    }

    pub fn set(&mut self, i: usize, j: usize) {
        assert!(i <= self.n && j <= self.n, "vertex index out of range");
        self.row_mut(i)[j / WORD_BITS] |= 1u64 << (j % WORD_BITS);
    }

    pub fn has_edge(&self, i: usize, j: usize) -> bool {
        assert!(i <= self.n && j <= self.n, "vertex index out of range");
        self.row(i)[j / WORD_BITS] >> (j % WORD_BITS) & 1 != 0
    }

    /// Case 1 of the dynamic program: edge `(i, i+1)` wherever `q[i] = c`.
    pub fn from_char(q: &[u8], c: u8) -> Self {
        let mut g = MatchGraph::new(q.len());
        for (i, &b) in q.iter().enumerate() {
            if b == c {
                g.set(i, i + 1);
            }
        }
        g
    }

    /// The all-self-loops graph: the match graph of the empty string.
    pub fn from_epsilon(n: usize) -> Self {
        let mut g = MatchGraph::new(n);
        for i in 0..=n {
            g.set(i, i);
        }
        g
    }

    fn assert_same_n(&self, other: &Self) {
        assert_eq!(self.n, other.n, "match graph dimension mismatch");
    }

    /// Boolean matrix product: edge `(i, j)` iff some `l` has `(i, l)` here
    /// and `(l, j)` in `f`.
    pub fn concat(&self, f: &Self) -> Self {
        self.assert_same_n(f);
        let mut out = MatchGraph::new(self.n);
        let wpr = self.words_per_row;
        for i in 0..=self.n {
            for w in 0..wpr {
                let mut word = self.row(i)[w];
                while word != 0 {
                    let l = w * WORD_BITS + word.trailing_zeros() as usize;
                    word &= word - 1;
                    let src = i * wpr;
                    let frow = l * wpr;
                    for t in 0..wpr {
                        out.bits[src + t] |= f.bits[frow + t];
                    }
                }
            }
        }
        out
    }

    /// Entrywise OR.
    pub fn union(&self, f: &Self) -> Self {
        self.assert_same_n(f);
        let mut out = self.clone();
        for (o, &b) in out.bits.iter_mut().zip(f.bits.iter()) {
            *o |= b;
        }
        out
    }

    /// Entrywise AND.
    pub fn intersect(&self, f: &Self) -> Self {
        self.assert_same_n(f);
        let mut out = self.clone();
        for (o, &b) in out.bits.iter_mut().zip(f.bits.iter()) {
            *o &= b;
        }
        out
    }

    /// Entrywise NOT over the upper-triangular universe `{(i, j) : i <= j}`
    /// (diagonal included). Entries below the diagonal stay clear.
    pub fn complement(&self) -> Self {
        let mut out = MatchGraph::new(self.n);
        for i in 0..=self.n {
            for w in 0..self.words_per_row {
                out.row_mut(i)[w] = !self.row(i)[w] & Self::upper_mask(self.n, i, w);
            }
        }
        out
    }

    /// Mask of columns `j` with `j <= n` falling in word `w`.
    fn col_mask(n: usize, w: usize) -> u64 {
        let lo = w * WORD_BITS;
        if lo > n {
            0
        } else if n - lo >= WORD_BITS - 1 {
            u64::MAX
        } else {
            (1u64 << (n - lo + 1)) - 1
        }
    }

    /// Mask of valid upper-triangular columns (`i <= j <= n`) for row `i`
    /// in word `w`.
    fn upper_mask(n: usize, i: usize, w: usize) -> u64 {
        let lo = w * WORD_BITS;
        let ge_i = if lo >= i {
            u64::MAX
        } else if i - lo >= WORD_BITS {
            0
        } else {
            u64::MAX << (i - lo)
        };
        Self::col_mask(n, w) & ge_i
    }

    /// Reflexive-transitive closure, via repeated squaring of `self | I`.
    pub fn star(&self) -> Self {
        let mut b = self.union(&MatchGraph::from_epsilon(self.n));
        let mut span = 1usize;
        while span < self.n + 1 {
            b = b.concat(&b);
            span *= 2;
        }
        b
    }

    pub fn edges(&self) -> Vec<(usize, usize)> {
        let mut out = Vec::new();
        for i in 0..=self.n {
            for w in 0..self.words_per_row {
                let mut word = self.row(i)[w];
                while word != 0 {
                    let j = w * WORD_BITS + word.trailing_zeros() as usize;
                    word &= word - 1;
                    out.push((i, j));
                }
            }
        }
        out
    }

    pub fn edge_count(&self) -> usize {
        self.bits.iter().map(|w| w.count_ones() as usize).sum()
    }

    /// 0/1 matrix text, one row per line.
    pub fn to_matrix_text(&self) -> String {
        let mut out = String::new();
        for i in 0..=self.n {
            for j in 0..=self.n {
                out.push(if self.has_edge(i, j) { '1' } else { '0' });
            }
            out.push('\n');
        }
        out
    }

    /// Binary serialization: `n` as 64-bit little-endian, then the row
    /// words, little-endian, each row padded to a word boundary.
    pub fn to_bytes(&self) -> Vec<u8> {
        let mut out = Vec::with_capacity(8 + self.bits.len() * 8);
        out.extend_from_slice(&(self.n as u64).to_le_bytes());
        for w in &self.bits {
            out.extend_from_slice(&w.to_le_bytes());
        }
        out
    }

    /// Decodes [`to_bytes`](Self::to_bytes) output. Rejects length
    /// mismatches, set padding bits, and edges below the diagonal, so a
    /// successful decode always yields a graph the algebra can consume.
    pub fn from_bytes(data: &[u8]) -> Result<Self, DecodeError> {
        if data.len() < 8 {
            return Err(DecodeError::Truncated);
        }
        let n64 = u64::from_le_bytes(data[..8].try_into().unwrap());
        let n: usize = n64.try_into().map_err(|_| DecodeError::LengthMismatch {
            expected: usize::MAX,
            got: data.len(),
        })?;
        // length check in wide arithmetic before any allocation
        let words_per_row = (n as u128 + WORD_BITS as u128) / WORD_BITS as u128;
        let expected = (n as u128 + 1)
            .checked_mul(words_per_row)
            .and_then(|w| w.checked_mul(8))
            .and_then(|b| b.checked_add(8))
            .ok_or(DecodeError::Truncated)?;
        if expected != data.len() as u128 {
            return Err(DecodeError::LengthMismatch {
                expected: expected.min(usize::MAX as u128) as usize,
                got: data.len(),
            });
        }
        let mut g = MatchGraph::new(n);
        for (w, chunk) in g.bits.iter_mut().zip(data[8..].chunks_exact(8)) {
            *w = u64::from_le_bytes(chunk.try_into().unwrap());
        }
        for i in 0..=n {
            for w in 0..g.words_per_row {
                let word = g.row(i)[w];
                if word & !MatchGraph::col_mask(n, w) != 0 {
                    return Err(DecodeError::PaddingBits);
                }
                if word & !MatchGraph::upper_mask(n, i, w) != 0 {
                    return Err(DecodeError::BackwardEdge);
                }
            }
        }
        Ok(g)
    }

    pub fn byte_size(&self) -> usize {
        self.bits.len() * 8
    }
}

impl fmt::Debug for MatchGraph {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "MatchGraph(n={}, edges={:?})", self.n, self.edges())
    }
}
