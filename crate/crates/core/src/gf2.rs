//! Binary vector and matrix algebra over GF(2).
//!
//! Vectors are indexed 1..=dim with index 1 the most significant level; the
//! lower shift pushes values toward higher indices. Dimensions are capped at
//! 64 so a vector fits one machine word and a shift is a word shift.

use thiserror::Error;

pub const MAX_DIM: usize = 64;

#[derive(Debug, Error, PartialEq, Eq)]
pub enum Gf2Error {
    #[error("dimension mismatch: {0} vs {1}")]
    DimMismatch(usize, usize),
    #[error("dimension {0} out of range 1..={MAX_DIM}")]
    BadDim(usize),
}

/// Binary column vector of fixed dimension. Bit `m` (1-based) is stored at
/// word bit `m - 1`.
#[derive(Clone, Copy, PartialEq, Eq, Hash)]
pub struct BitVector {
    dim: usize,
    bits: u64,
}

impl BitVector {
    pub fn zero(dim: usize) -> Self {
        assert!((1..=MAX_DIM).contains(&dim), "dimension out of range");
        BitVector { dim, bits: 0 }
    }

    /// Builds from levels listed most-significant first: `[1,1,0]` is the
    /// vector with levels 1 and 2 set.
    pub fn from_levels(levels: &[u8]) -> Self {
        let mut v = Self::zero(levels.len());
        for (i, &b) in levels.iter().enumerate() {
            v.set(i + 1, b != 0);
        }
        v
    }

    pub fn from_word(dim: usize, bits: u64) -> Self {
        let mut v = Self::zero(dim);
        v.bits = bits & v.mask();
        v
    }

    fn mask(&self) -> u64 {
        if self.dim == 64 {
            u64::MAX
        } else {
            (1u64 << self.dim) - 1
        }
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    pub fn word(&self) -> u64 {
        self.bits
    }

    pub fn get(&self, level: usize) -> bool {
        assert!(level >= 1 && level <= self.dim, "level out of range");
        self.bits >> (level - 1) & 1 == 1
    }

    pub fn set(&mut self, level: usize, value: bool) {
        assert!(level >= 1 && level <= self.dim, "level out of range");
        if value {
            self.bits |= 1 << (level - 1);
        } else {
            self.bits &= !(1 << (level - 1));
        }
    }

    pub fn is_zero(&self) -> bool {
        self.bits == 0
    }

    /// Lower shift applied `k` times: level m of the result is level m-k of
    /// the input, zero for m <= k. Equals multiplication by `shift_matrix`.
    pub fn lower_shift(&self, k: usize) -> Self {
        let bits = if k >= self.dim { 0 } else { self.bits << k };
        BitVector {
            dim: self.dim,
            bits: bits & self.mask(),
        }
    }

    /// Levels as 0/1 bytes, most significant first.
    pub fn levels(&self) -> Vec<u8> {
        (1..=self.dim).map(|m| self.get(m) as u8).collect()
    }

    /// Hex encoding with level 1 as the most significant bit, left-padded to
    /// a whole number of nibbles.
    pub fn to_hex(&self) -> String {
        let nibbles = self.dim.div_ceil(4);
        let mut value: u64 = 0;
        for m in 1..=self.dim {
            value = (value << 1) | self.get(m) as u64;
        }
        format!("{value:0width$x}", width = nibbles)
    }

    pub fn from_hex(dim: usize, hex: &str) -> Result<Self, Gf2Error> {
        if !(1..=MAX_DIM).contains(&dim) {
            return Err(Gf2Error::BadDim(dim));
        }
        let value = u64::from_str_radix(hex, 16).map_err(|_| Gf2Error::BadDim(dim))?;
        let mut v = Self::zero(dim);
        for m in 1..=dim {
            v.set(m, value >> (dim - m) & 1 == 1);
        }
        Ok(v)
    }
}

impl std::fmt::Debug for BitVector {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        write!(f, "BitVector(")?;
        for m in 1..=self.dim {
            write!(f, "{}", self.get(m) as u8)?;
        }
        write!(f, ")")
    }
}

/// Dense binary matrix; row r is one word with column c at bit `c - 1`.
#[derive(Clone, PartialEq, Eq)]
pub struct BitMatrix {
    rows: usize,
    cols: usize,
    row_words: Vec<u64>,
}

impl BitMatrix {
    pub fn zero(rows: usize, cols: usize) -> Self {
        assert!(rows >= 1 && (1..=MAX_DIM).contains(&cols));
        BitMatrix {
            rows,
            cols,
            row_words: vec![0; rows],
        }
    }

    pub fn identity(n: usize) -> Self {
        let mut m = Self::zero(n, n);
        for i in 1..=n {
            m.set(i, i, true);
        }
        m
    }

    pub fn rows(&self) -> usize {
        self.rows
    }

    pub fn cols(&self) -> usize {
        self.cols
    }

    pub fn get(&self, row: usize, col: usize) -> bool {
        assert!(row >= 1 && row <= self.rows && col >= 1 && col <= self.cols);
        self.row_words[row - 1] >> (col - 1) & 1 == 1
    }

    pub fn set(&mut self, row: usize, col: usize, value: bool) {
        assert!(row >= 1 && row <= self.rows && col >= 1 && col <= self.cols);
        if value {
            self.row_words[row - 1] |= 1 << (col - 1);
        } else {
            self.row_words[row - 1] &= !(1 << (col - 1));
        }
    }

    pub fn row_word(&self, row: usize) -> u64 {
        self.row_words[row - 1]
    }

    pub fn matmul(&self, other: &BitMatrix) -> Result<BitMatrix, Gf2Error> {
        if self.cols != other.rows {
            return Err(Gf2Error::DimMismatch(self.cols, other.rows));
        }
        let mut out = BitMatrix::zero(self.rows, other.cols);
        for r in 1..=self.rows {
            let mut acc = 0u64;
            for k in 1..=self.cols {
                if self.get(r, k) {
                    acc ^= other.row_words[k - 1];
                }
            }
            out.row_words[r - 1] = acc;
        }
        Ok(out)
    }
}

impl std::fmt::Debug for BitMatrix {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        writeln!(f, "BitMatrix {}x{}", self.rows, self.cols)?;
        for r in 1..=self.rows {
            for c in 1..=self.cols {
                write!(f, "{}", self.get(r, c) as u8)?;
            }
            writeln!(f)?;
        }
        Ok(())
    }
}

/// `S^k` for the q-by-q lower shift matrix `S`: `(S x)_m = x_{m-1}` for
/// `m >= 2` and `(S x)_1 = 0`. For `k >= q` this is the zero matrix.
pub fn shift_matrix(q: usize, k: usize) -> BitMatrix {
    let mut m = BitMatrix::zero(q, q);
    if k < q {
        for r in (k + 1)..=q {
            m.set(r, r - k, true);
        }
    }
    m
}

/// Componentwise XOR.
pub fn gf2_add(a: &BitVector, b: &BitVector) -> Result<BitVector, Gf2Error> {
    if a.dim != b.dim {
        return Err(Gf2Error::DimMismatch(a.dim, b.dim));
    }
    Ok(BitVector {
        dim: a.dim,
        bits: a.bits ^ b.bits,
    })
}

/// Matrix-vector product over GF(2).
pub fn gf2_matvec(m: &BitMatrix, v: &BitVector) -> Result<BitVector, Gf2Error> {
    if m.cols != v.dim {
        return Err(Gf2Error::DimMismatch(m.cols, v.dim));
    }
    if m.rows > MAX_DIM {
        return Err(Gf2Error::BadDim(m.rows));
    }
    let mut out = BitVector::zero(m.rows);
    for r in 1..=m.rows {
        let parity = (m.row_words[r - 1] & v.bits).count_ones() & 1;
        if parity == 1 {
            out.bits |= 1 << (r - 1);
        }
    }
    Ok(out)
}

/// Rows of `L` (one per wanted bit) such that `L a = I` and `L b = 0`, where
/// `a` and `b` are given as column lists over an `obs_dim`-bit space. Returns
/// `None` when no such map exists, i.e. the wanted bits are not identifiable
/// in the presence of the nuisance columns.
#[allow(clippy::needless_range_loop)]
pub fn left_inverse_annihilating(
    a_cols: &[u64],
    b_cols: &[u64],
    obs_dim: usize,
) -> Option<Vec<u64>> {
    assert!(obs_dim <= MAX_DIM);
    // Solve l^T [A B] = [e_k 0] for each k: row-reduce the obs_dim x (m+n)
    // system whose rows are observation coordinates.
    let m = a_cols.len();
    let n = b_cols.len();
    let total = m + n;
    // row i = coefficient pattern of observation bit i over (a_cols, b_cols),
    // augmented with the identity to track the combination of observation bits.
    let mut rows: Vec<(u128, u64)> = (0..obs_dim)
        .map(|i| {
            let mut pat: u128 = 0;
            for (k, col) in a_cols.iter().enumerate() {
                if col >> i & 1 == 1 {
                    pat |= 1 << k;
                }
            }
            for (k, col) in b_cols.iter().enumerate() {
                if col >> i & 1 == 1 {
                    pat |= 1 << (m + k);
                }
            }
            (pat, 1u64 << i)
        })
        .collect();
    assert!(total <= 128, "too many solve columns");

    let mut pivot_of_col: Vec<Option<usize>> = vec![None; total];
    let mut next_row = 0;
    for col in 0..total {
        let Some(r) = (next_row..rows.len()).find(|&r| rows[r].0 >> col & 1 == 1) else {
            continue;
        };
        rows.swap(next_row, r);
        let (pat, comb) = rows[next_row];
        for (i, row) in rows.iter_mut().enumerate() {
            if i != next_row && row.0 >> col & 1 == 1 {
                row.0 ^= pat;
                row.1 ^= comb;
            }
        }
        pivot_of_col[col] = Some(next_row);
        next_row += 1;
    }

    // Wanted bit k must be expressible: pattern e_k must lie in the row space
    // with no nuisance component. After full reduction, that requires a pivot
    // in column k whose row pattern is exactly e_k.
    let mut out = Vec::with_capacity(m);
    for k in 0..m {
        let r = pivot_of_col[k]?;
        if rows[r].0 != 1u128 << k {
            return None;
        }
        out.push(rows[r].1);
    }
    Some(out)
}
