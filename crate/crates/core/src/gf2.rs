//! Dense matrices over GF(2) with bit-packed rows.

use std::fmt;

use crate::graph::{words_for, Graph};

#[derive(Clone, PartialEq, Eq, Hash)]
pub struct BitMatrix {
    rows: usize,
    cols: usize,
    words: usize,
    data: Vec<u64>,
}

impl BitMatrix {
    pub fn zeros(rows: usize, cols: usize) -> Self {
        let words = words_for(cols);
        BitMatrix {
            rows,
            cols,
            words,
            data: vec![0; rows * words],
        }
    }

    pub fn identity(n: usize) -> Self {
        let mut m = Self::zeros(n, n);
        for i in 0..n {
            m.set(i, i, true);
        }
        m
    }

    /// Builds a matrix from rows of `0`/`1` characters; whitespace is
    /// ignored. Panics on ragged or non-binary input.
    pub fn from_rows(rows: &[&str]) -> Self {
        let parsed: Vec<Vec<bool>> = rows
            .iter()
            .map(|r| {
                r.chars()
                    .filter(|c| !c.is_whitespace())
                    .map(|c| match c {
                        '0' => false,
                        '1' => true,
                        other => panic!("not a GF(2) digit: {other:?}"),
                    })
                    .collect()
            })
            .collect();
        let cols = parsed.first().map_or(0, Vec::len);
        let mut m = Self::zeros(parsed.len(), cols);
        for (i, row) in parsed.iter().enumerate() {
            assert_eq!(row.len(), cols, "ragged matrix");
            for (j, &bit) in row.iter().enumerate() {
                m.set(i, j, bit);
            }
        }
        m
    }

    pub fn rows(&self) -> usize {
        self.rows
    }

    pub fn cols(&self) -> usize {
        self.cols
    }

    #[inline]
    pub fn get(&self, i: usize, j: usize) -> bool {
        assert!(i < self.rows && j < self.cols);
        self.data[i * self.words + j / 64] >> (j % 64) & 1 == 1
    }

    #[inline]
    pub fn set(&mut self, i: usize, j: usize, bit: bool) {
        assert!(i < self.rows && j < self.cols);
        let w = &mut self.data[i * self.words + j / 64];
        if bit {
            *w |= 1 << (j % 64);
        } else {
            *w &= !(1 << (j % 64));
        }
    }

    pub fn row_words(&self, i: usize) -> &[u64] {
        &self.data[i * self.words..(i + 1) * self.words]
    }

    /// Matrix with row `i` of `self` moved to position `perm[i]`.
    pub fn permute_rows(&self, perm: &[usize]) -> BitMatrix {
        assert_eq!(perm.len(), self.rows);
        let mut out = Self::zeros(self.rows, self.cols);
        for (i, &p) in perm.iter().enumerate() {
            out.data[p * self.words..(p + 1) * self.words].copy_from_slice(self.row_words(i));
        }
        out
    }

    /// Row echelon form obtained by forward elimination, plus its rank.
    pub fn echelon(&self) -> (BitMatrix, usize) {
        let mut m = self.clone();
        let rank = eliminate(&mut m.data, m.rows, m.cols, m.words);
        (m, rank)
    }

    /// Reduced row echelon form and the list of pivot columns.
    fn reduced_echelon(&self) -> (BitMatrix, Vec<usize>) {
        let mut m = self.clone();
        let words = m.words;
        let mut pivots = Vec::new();
        let mut r = 0;
        for c in 0..m.cols {
            if r == m.rows {
                break;
            }
            let (w, b) = (c / 64, c % 64);
            let Some(p) = (r..m.rows).find(|&i| m.data[i * words + w] >> b & 1 == 1) else {
                continue;
            };
            swap_rows(&mut m.data, words, r, p);
            for i in (0..m.rows).filter(|&i| i != r) {
                if m.data[i * words + w] >> b & 1 == 1 {
                    xor_row_into(&mut m.data, words, r, i);
                }
            }
            pivots.push(c);
            r += 1;
        }
        (m, pivots)
    }
}

#[inline]
fn swap_rows(data: &mut [u64], words: usize, a: usize, b: usize) {
    if a != b {
        for k in 0..words {
            data.swap(a * words + k, b * words + k);
        }
    }
}

/// `row[dst] ^= row[src]`.
#[inline]
fn xor_row_into(data: &mut [u64], words: usize, src: usize, dst: usize) {
    debug_assert_ne!(src, dst);
    let (s, d) = (src * words, dst * words);
    for k in 0..words {
        data[d + k] ^= data[s + k];
    }
}

/// Forward elimination with first-set-bit pivoting. Returns the rank.
fn eliminate(data: &mut [u64], rows: usize, cols: usize, words: usize) -> usize {
    let mut rank = 0;
    for c in 0..cols {
        if rank == rows {
            break;
        }
        let (w, b) = (c / 64, c % 64);
        let Some(p) = (rank..rows).find(|&i| data[i * words + w] >> b & 1 == 1) else {
            continue;
        };
        swap_rows(data, words, rank, p);
        for i in rank + 1..rows {
            if data[i * words + w] >> b & 1 == 1 {
                xor_row_into(data, words, rank, i);
            }
        }
        rank += 1;
    }
    rank
}

/// Rows of `0`/`1` characters, one per line.
impl fmt::Display for BitMatrix {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        for i in 0..self.rows {
            let line: String = (0..self.cols).map(|j| if self.get(i, j) { '1' } else { '0' }).collect();
            writeln!(f, "{line}")?;
        }
        Ok(())
    }
}

impl fmt::Debug for BitMatrix {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        writeln!(f, "BitMatrix {}x{}", self.rows, self.cols)?;
        fmt::Display::fmt(self, f)
    }
}

/// `M(G)`.
pub fn adjacency_matrix(g: &Graph) -> BitMatrix {
    let n = g.n();
    let mut m = BitMatrix::zeros(n, n);
    for (u, v) in g.edges() {
        m.set(u, v, true);
        m.set(v, u, true);
    }
    m
}

/// `X(G)`: `M(G)` bordered by an all-ones last row and column with a zero
/// corner, i.e. the adjacency matrix of `G` plus a cone vertex.
pub fn bordered_matrix(g: &Graph) -> BitMatrix {
    let n = g.n();
    let mut m = BitMatrix::zeros(n + 1, n + 1);
    for v in 0..n {
        let row = g.row(v);
        let dst = &mut m.data[v * m.words..(v + 1) * m.words];
        dst[..row.len()].copy_from_slice(row);
        m.set(v, n, true);
        m.set(n, v, true);
    }
    m
}

/// Rank over GF(2). Works on a scratch copy.
pub fn rank(m: &BitMatrix) -> usize {
    let mut scratch = m.data.clone();
    eliminate(&mut scratch, m.rows, m.cols, m.words)
}

/// `cols - rank`, the dimension of the right kernel.
pub fn nullity(m: &BitMatrix) -> usize {
    m.cols - rank(m)
}

/// The kernel has `2^k` elements; returns `k`.
pub fn kernel_size_exponent(m: &BitMatrix) -> usize {
    nullity(m)
}

/// A basis of the right kernel `{x : m x = 0}`, one basis vector per row.
pub fn kernel_basis(m: &BitMatrix) -> BitMatrix {
    let (rref, pivots) = m.reduced_echelon();
    let mut is_pivot = vec![false; m.cols];
    for &c in &pivots {
        is_pivot[c] = true;
    }
    let free: Vec<usize> = (0..m.cols).filter(|&c| !is_pivot[c]).collect();
    let mut basis = BitMatrix::zeros(free.len(), m.cols);
    for (k, &f) in free.iter().enumerate() {
        basis.set(k, f, true);
        for (r, &p) in pivots.iter().enumerate() {
            if rref.get(r, f) {
                basis.set(k, p, true);
            }
        }
    }
    basis
}
