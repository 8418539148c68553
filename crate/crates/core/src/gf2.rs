//! Dense GF(2) linear algebra on bit-packed rows.
//!
//! Rows are packed into `u64` words, least-significant bit first: column `j`
//! lives in word `j / 64` at bit position `j % 64`. Bits past the logical
//! width in the last word of a row are kept zero by every operation, so
//! whole-word XOR, AND, and popcount need no masking.
//!
//! All operations here are pure: anything that needs elimination works on a
//! scratch copy and never mutates its inputs.

use std::fmt;
use std::ops::BitXorAssign;

const WORD_BITS: usize = 64;

fn words_for(bits: usize) -> usize {
    bits.div_ceil(WORD_BITS)
}

/// A fixed-length vector over GF(2).
#[derive(Clone, PartialEq, Eq, Hash)]
pub struct BitVector {
    len: usize,
    words: Vec<u64>,
}

impl BitVector {
    /// All-zero vector of the given length.
    pub fn zeros(len: usize) -> Self {
        BitVector {
            len,
            words: vec![0; words_for(len)],
        }
    }

    /// Builds a vector from 0/1 entries.
    ///
    /// # Panics
    /// Panics if any entry is not 0 or 1.
    pub fn from_bits(bits: &[u8]) -> Self {
        let mut v = BitVector::zeros(bits.len());
        for (i, &b) in bits.iter().enumerate() {
            assert!(b <= 1, "entry {i} is {b}, expected 0 or 1");
            if b == 1 {
                v.set(i, true);
            }
        }
        v
    }

    /// Builds a vector of length `len` with ones exactly at `support`.
    ///
    /// # Panics
    /// Panics if any index is out of range.
    pub fn from_support(len: usize, support: &[usize]) -> Self {
        let mut v = BitVector::zeros(len);
        for &i in support {
            v.set(i, true);
        }
        v
    }

    pub fn len(&self) -> usize {
        self.len
    }

    pub fn is_empty(&self) -> bool {
        self.len == 0
    }

    /// # Panics
    /// Panics if `i >= len`.
    pub fn get(&self, i: usize) -> bool {
        assert!(i < self.len, "bit index {i} out of range for length {}", self.len);
        self.words[i / WORD_BITS] >> (i % WORD_BITS) & 1 == 1
    }

    /// # Panics
    /// Panics if `i >= len`.
    pub fn set(&mut self, i: usize, value: bool) {
        assert!(i < self.len, "bit index {i} out of range for length {}", self.len);
        let mask = 1u64 << (i % WORD_BITS);
        if value {
            self.words[i / WORD_BITS] |= mask;
        } else {
            self.words[i / WORD_BITS] &= !mask;
        }
    }

    /// Hamming weight.
    pub fn weight(&self) -> usize {
        self.words.iter().map(|w| w.count_ones() as usize).sum()
    }

    pub fn is_zero(&self) -> bool {
        self.words.iter().all(|&w| w == 0)
    }

    /// Indices of the nonzero coordinates, ascending.
    pub fn support(&self) -> Vec<usize> {
        (0..self.len).filter(|&i| self.get(i)).collect()
    }

    pub fn iter(&self) -> impl Iterator<Item = bool> + '_ {
        (0..self.len).map(|i| self.get(i))
    }

    fn words(&self) -> &[u64] {
        &self.words
    }
}

impl BitXorAssign<&BitVector> for BitVector {
    /// # Panics
    /// Panics on length mismatch.
    fn bitxor_assign(&mut self, rhs: &BitVector) {
        assert_eq!(self.len, rhs.len, "xor of vectors with different lengths");
        for (a, b) in self.words.iter_mut().zip(&rhs.words) {
            *a ^= b;
        }
    }
}

impl fmt::Debug for BitVector {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        for i in 0..self.len {
            write!(f, "{}", u8::from(self.get(i)))?;
        }
        Ok(())
    }
}

/// A dense GF(2) matrix with bit-packed rows.
#[derive(Clone, PartialEq, Eq)]
pub struct BitMatrix {
    rows: usize,
    cols: usize,
    words_per_row: usize,
    data: Vec<u64>,
}

impl BitMatrix {
    /// All-zero matrix. Zero rows and/or zero columns are allowed.
    pub fn zeros(rows: usize, cols: usize) -> Self {
        let words_per_row = words_for(cols);
        BitMatrix {
            rows,
            cols,
            words_per_row,
            data: vec![0; rows * words_per_row],
        }
    }

    pub fn identity(n: usize) -> Self {
        let mut m = BitMatrix::zeros(n, n);
        for i in 0..n {
            m.set(i, i, true);
        }
        m
    }

    /// Builds a matrix from rows of 0/1 entries.
    ///
    /// # Panics
    /// Panics if rows have unequal lengths or entries are not 0/1.
    pub fn from_dense(rows: &[Vec<u8>]) -> Self {
        let cols = rows.first().map_or(0, Vec::len);
        let mut m = BitMatrix::zeros(rows.len(), cols);
        for (r, row) in rows.iter().enumerate() {
            assert_eq!(row.len(), cols, "row {r} has length {}, expected {cols}", row.len());
            for (c, &b) in row.iter().enumerate() {
                assert!(b <= 1, "entry ({r},{c}) is {b}, expected 0 or 1");
                if b == 1 {
                    m.set(r, c, true);
                }
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

    /// # Panics
    /// Panics if out of range.
    pub fn get(&self, r: usize, c: usize) -> bool {
        assert!(r < self.rows && c < self.cols, "({r},{c}) out of range for {}x{}", self.rows, self.cols);
        self.data[r * self.words_per_row + c / WORD_BITS] >> (c % WORD_BITS) & 1 == 1
    }

    /// # Panics
    /// Panics if out of range.
    pub fn set(&mut self, r: usize, c: usize, value: bool) {
        assert!(r < self.rows && c < self.cols, "({r},{c}) out of range for {}x{}", self.rows, self.cols);
        let mask = 1u64 << (c % WORD_BITS);
        let w = &mut self.data[r * self.words_per_row + c / WORD_BITS];
        if value {
            *w |= mask;
        } else {
            *w &= !mask;
        }
    }

    /// Copies row `r` out as a vector.
    pub fn row(&self, r: usize) -> BitVector {
        BitVector {
            len: self.cols,
            words: self.row_words(r).to_vec(),
        }
    }

    /// Column indices of the ones in row `r`, ascending.
    pub fn row_support(&self, r: usize) -> Vec<usize> {
        (0..self.cols).filter(|&c| self.get(r, c)).collect()
    }

    fn row_words(&self, r: usize) -> &[u64] {
        &self.data[r * self.words_per_row..(r + 1) * self.words_per_row]
    }

    pub fn is_zero(&self) -> bool {
        self.data.iter().all(|&w| w == 0)
    }

    pub fn transpose(&self) -> BitMatrix {
        let mut t = BitMatrix::zeros(self.cols, self.rows);
        for r in 0..self.rows {
            for c in self.row_support(r) {
                t.set(c, r, true);
            }
        }
        t
    }

    /// Horizontal concatenation `[self | right]`.
    ///
    /// # Panics
    /// Panics if row counts differ.
    pub fn hconcat(&self, right: &BitMatrix) -> BitMatrix {
        assert_eq!(self.rows, right.rows, "hconcat of matrices with different row counts");
        let mut m = BitMatrix::zeros(self.rows, self.cols + right.cols);
        for r in 0..self.rows {
            for c in self.row_support(r) {
                m.set(r, c, true);
            }
            for c in right.row_support(r) {
                m.set(r, self.cols + c, true);
            }
        }
        m
    }

    /// Kronecker product; block (i,j) of the result is `other` where
    /// `self[i,j] = 1` and zero elsewhere.
    pub fn kron(&self, other: &BitMatrix) -> BitMatrix {
        let mut m = BitMatrix::zeros(self.rows * other.rows, self.cols * other.cols);
        for i1 in 0..self.rows {
            for j1 in self.row_support(i1) {
                for i2 in 0..other.rows {
                    for j2 in other.row_support(i2) {
                        m.set(i1 * other.rows + i2, j1 * other.cols + j2, true);
                    }
                }
            }
        }
        m
    }

    /// Matrix-vector product over GF(2).
    ///
    /// # Panics
    /// Panics if `v.len() != cols`.
    pub fn mul_vec(&self, v: &BitVector) -> BitVector {
        assert_eq!(v.len(), self.cols, "mul_vec: vector length {} != cols {}", v.len(), self.cols);
        let mut out = BitVector::zeros(self.rows);
        for r in 0..self.rows {
            let parity = self
                .row_words(r)
                .iter()
                .zip(v.words())
                .fold(0u32, |acc, (a, b)| acc ^ (a & b).count_ones());
            if parity & 1 == 1 {
                out.set(r, true);
            }
        }
        out
    }

    /// `self * other^T` over GF(2). Entry (i,j) is the inner product of
    /// row i of `self` with row j of `other`.
    ///
    /// # Panics
    /// Panics if column counts differ.
    pub fn mul_transpose(&self, other: &BitMatrix) -> BitMatrix {
        assert_eq!(self.cols, other.cols, "mul_transpose: column counts differ");
        let mut m = BitMatrix::zeros(self.rows, other.rows);
        for i in 0..self.rows {
            let a = self.row_words(i);
            for j in 0..other.rows {
                let parity = a
                    .iter()
                    .zip(other.row_words(j))
                    .fold(0u32, |acc, (x, y)| acc ^ (x & y).count_ones());
                if parity & 1 == 1 {
                    m.set(i, j, true);
                }
            }
        }
        m
    }

    /// GF(2) rank. Works on a scratch copy; `self` is not mutated.
    pub fn rank(&self) -> usize {
        let mut scratch = self.data.clone();
        forward_eliminate(&mut scratch, self.rows, self.words_per_row, self.cols).len()
    }

    /// Whether `v` is a GF(2) linear combination of the rows of `self`.
    ///
    /// # Panics
    /// Panics if `v.len() != cols`.
    pub fn in_rowspace(&self, v: &BitVector) -> bool {
        assert_eq!(v.len(), self.cols, "in_rowspace: vector length {} != cols {}", v.len(), self.cols);
        let mut scratch = self.data.clone();
        let pivots = forward_eliminate(&mut scratch, self.rows, self.words_per_row, self.cols);
        let wpr = self.words_per_row;
        let mut rem = v.words.clone();
        // Reduce v against the echelon rows in pivot order; each step clears
        // the pivot column and may only touch later columns.
        for &(pr, pc) in &pivots {
            if rem[pc / WORD_BITS] >> (pc % WORD_BITS) & 1 == 1 {
                for (w, s) in rem.iter_mut().zip(&scratch[pr * wpr..(pr + 1) * wpr]) {
                    *w ^= s;
                }
            }
        }
        rem.iter().all(|&w| w == 0)
    }

    /// Solves `M x = b` by Gauss-Jordan elimination, trying pivot columns
    /// greedily in the order given. Returns the solution with every
    /// non-pivot coordinate zero, or `None` if the system is inconsistent.
    ///
    /// The pivot order fully determines which solution is returned, which is
    /// what makes OSD-0 output reproducible.
    ///
    /// # Panics
    /// Panics if `b.len() != rows` or `pivot_order` is not a permutation of
    /// `0..cols`.
    pub fn solve_consistent(&self, b: &BitVector, pivot_order: &[usize]) -> Option<BitVector> {
        assert_eq!(b.len(), self.rows, "solve_consistent: rhs length {} != rows {}", b.len(), self.rows);
        assert_eq!(pivot_order.len(), self.cols, "solve_consistent: pivot_order length {} != cols {}", pivot_order.len(), self.cols);
        let mut seen = vec![false; self.cols];
        for &c in pivot_order {
            assert!(c < self.cols && !seen[c], "solve_consistent: pivot_order is not a permutation of 0..{}", self.cols);
            seen[c] = true;
        }

        let wpr = self.words_per_row;
        let mut a = self.data.clone();
        let mut rhs: Vec<bool> = (0..self.rows).map(|r| b.get(r)).collect();
        let mut pivot_row_of_col: Vec<Option<usize>> = vec![None; self.cols];
        let mut used = vec![false; self.rows];

        for &col in pivot_order {
            let w = col / WORD_BITS;
            let bit = col % WORD_BITS;
            let Some(p) = (0..self.rows).find(|&r| !used[r] && a[r * wpr + w] >> bit & 1 == 1) else {
                continue;
            };
            used[p] = true;
            pivot_row_of_col[col] = Some(p);
            // Full elimination: clear this column in every other row so the
            // pivot row's rhs bit is the coordinate value directly.
            for r in 0..self.rows {
                if r != p && a[r * wpr + w] >> bit & 1 == 1 {
                    let (head, tail) = a.split_at_mut(p.max(r) * wpr);
                    let (dst, src) = if r < p {
                        (&mut head[r * wpr..r * wpr + wpr], &tail[..wpr])
                    } else {
                        (&mut tail[..wpr], &head[p * wpr..p * wpr + wpr])
                    };
                    for (d, s) in dst.iter_mut().zip(src) {
                        *d ^= s;
                    }
                    rhs[r] ^= rhs[p];
                }
            }
        }

        // Every column was offered a pivot, so unused rows are now all-zero;
        // a surviving 1 on the right marks an inconsistent system.
        for r in 0..self.rows {
            if rhs[r] && a[r * wpr..(r + 1) * wpr].iter().all(|&w| w == 0) {
                return None;
            }
        }

        let mut x = BitVector::zeros(self.cols);
        for (col, pr) in pivot_row_of_col.iter().enumerate() {
            if let Some(p) = pr {
                x.set(col, rhs[*p]);
            }
        }
        Some(x)
    }
}

impl fmt::Debug for BitMatrix {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        writeln!(f, "BitMatrix {}x{}", self.rows, self.cols)?;
        for r in 0..self.rows {
            writeln!(f, "{:?}", self.row(r))?;
        }
        Ok(())
    }
}

/// Forward elimination in place. Pivot columns are scanned left to right,
/// pivot rows taken top-down; rows below each pivot are cleared, rows above
/// are left alone. Returns the `(pivot_row, pivot_col)` pairs in elimination
/// order, so `len()` is the rank and the pairs can replay the reduction
/// against another vector.
fn forward_eliminate(data: &mut [u64], rows: usize, wpr: usize, cols: usize) -> Vec<(usize, usize)> {
    let mut pivots = Vec::new();
    let mut next = 0;
    for col in 0..cols {
        if next == rows {
            break;
        }
        let w = col / WORD_BITS;
        let bit = col % WORD_BITS;
        let Some(found) = (next..rows).find(|&r| data[r * wpr + w] >> bit & 1 == 1) else {
            continue;
        };
        if found != next {
            for k in 0..wpr {
                data.swap(next * wpr + k, found * wpr + k);
            }
        }
        for r in next + 1..rows {
            if data[r * wpr + w] >> bit & 1 == 1 {
                let (top, bottom) = data.split_at_mut(r * wpr);
                let src = &top[next * wpr..next * wpr + wpr];
                for (d, s) in bottom[..wpr].iter_mut().zip(src) {
                    *d ^= s;
                }
            }
        }
        pivots.push((next, col));
        next += 1;
    }
    pivots
}
