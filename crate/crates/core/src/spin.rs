//! Dense symmetric ±1 matrices with unit diagonal.
//!
//! A [`SpinMatrix`] is the matrix view of a physical spin configuration: entry
//! `(i, j)` holds the spin on the pair `{i, j}` and the diagonal is pinned to
//! `+1`. The same type carries readouts, codewords and error patterns.
//!
//! Pairs are enumerated in lexicographic order `(0,1), (0,2), …, (k-2,k-1)`;
//! [`pair_index`] and [`SpinMatrix::edge_values`] use that order everywhere.

use std::fmt;
use std::io::Write;

use crate::error::{invalid, Error, Result};

/// Number of unordered pairs among `k` items.
pub const fn n_pairs(k: usize) -> usize {
    if k < 2 {
        0
    } else {
        k * (k - 1) / 2
    }
}

/// Lexicographic index of the pair `{i, j}` (0-based, `i != j`) among `k` items.
#[inline]
pub fn pair_index(k: usize, i: usize, j: usize) -> usize {
    let (a, b) = if i < j { (i, j) } else { (j, i) };
    debug_assert!(a != b && b < k);
    a * (2 * k - a - 1) / 2 + (b - a - 1)
}

/// Iterator over all pairs `(i, j)`, `i < j`, in lexicographic order.
pub fn pairs(k: usize) -> impl Iterator<Item = (usize, usize)> {
    (0..k).flat_map(move |i| ((i + 1)..k).map(move |j| (i, j)))
}

#[derive(Clone, PartialEq, Eq, Hash)]
pub struct SpinMatrix {
    k: usize,
    entries: Vec<i8>,
}

impl SpinMatrix {
    /// The all-one matrix (the trivial codeword).
    pub fn ones(k: usize) -> Self {
        Self {
            k,
            entries: vec![1; k * k],
        }
    }

    /// Builds a matrix from the pair spins in lexicographic order.
    pub fn from_edge_values(k: usize, values: &[i8]) -> Result<Self> {
        if values.len() != n_pairs(k) {
            return Err(invalid(format!(
                "expected {} pair values for k = {k}, got {}",
                n_pairs(k),
                values.len()
            )));
        }
        let mut m = Self::ones(k);
        for ((i, j), &v) in pairs(k).zip(values) {
            if v != 1 && v != -1 {
                return Err(invalid(format!("spin value {v} at pair ({i}, {j})")));
            }
            m.set(i, j, v);
        }
        Ok(m)
    }

    /// Builds a matrix from full rows, validating shape, values, symmetry and
    /// the unit diagonal.
    pub fn from_rows(rows: &[Vec<i8>]) -> Result<Self> {
        let k = rows.len();
        let mut entries = Vec::with_capacity(k * k);
        for (r, row) in rows.iter().enumerate() {
            if row.len() != k {
                return Err(invalid(format!(
                    "row {} has {} entries, expected {k}",
                    r + 1,
                    row.len()
                )));
            }
            entries.extend_from_slice(row);
        }
        let m = Self { k, entries };
        m.validate()?;
        Ok(m)
    }

    fn validate(&self) -> Result<()> {
        let k = self.k;
        for i in 0..k {
            if self.get(i, i) != 1 {
                return Err(invalid(format!(
                    "diagonal entry ({0}, {0}) is not +1",
                    i + 1
                )));
            }
            for j in 0..k {
                let v = self.get(i, j);
                if v != 1 && v != -1 {
                    return Err(invalid(format!(
                        "entry ({}, {}) = {v} is not ±1",
                        i + 1,
                        j + 1
                    )));
                }
                if v != self.get(j, i) {
                    return Err(invalid(format!(
                        "matrix is not symmetric at ({}, {})",
                        i + 1,
                        j + 1
                    )));
                }
            }
        }
        Ok(())
    }

    /// Number of logical spins (matrix dimension).
    #[inline]
    pub fn k(&self) -> usize {
        self.k
    }

    /// Number of physical spins, `C(k, 2)`.
    #[inline]
    pub fn n_edges(&self) -> usize {
        n_pairs(self.k)
    }

    #[inline]
    pub fn get(&self, i: usize, j: usize) -> i8 {
        self.entries[i * self.k + j]
    }

    /// Sets the pair `{i, j}` (both triangle entries). `i` must differ from `j`.
    #[inline]
    pub fn set(&mut self, i: usize, j: usize, v: i8) {
        debug_assert!(i != j);
        self.entries[i * self.k + j] = v;
        self.entries[j * self.k + i] = v;
    }

    #[inline]
    pub fn flip(&mut self, i: usize, j: usize) {
        let v = -self.get(i, j);
        self.set(i, j, v);
    }

    /// Row `i` as a slice of length `k`.
    #[inline]
    pub fn row(&self, i: usize) -> &[i8] {
        &self.entries[i * self.k..(i + 1) * self.k]
    }

    /// Pair spins in lexicographic order (the vector form `x`).
    pub fn edge_values(&self) -> Vec<i8> {
        pairs(self.k).map(|(i, j)| self.get(i, j)).collect()
    }

    /// Componentwise (Hadamard) product.
    pub fn hadamard(&self, other: &SpinMatrix) -> Result<SpinMatrix> {
        self.check_same_dim(other)?;
        Ok(SpinMatrix {
            k: self.k,
            entries: self
                .entries
                .iter()
                .zip(&other.entries)
                .map(|(a, b)| a * b)
                .collect(),
        })
    }

    pub(crate) fn check_same_dim(&self, other: &SpinMatrix) -> Result<()> {
        if self.k != other.k {
            return Err(invalid(format!(
                "dimension mismatch: {} vs {}",
                self.k, other.k
            )));
        }
        Ok(())
    }

    /// Number of pairs whose spin is `-1`.
    pub fn count_negative(&self) -> usize {
        pairs(self.k).filter(|&(i, j)| self.get(i, j) < 0).count()
    }

    /// Number of pairs on which the two matrices differ.
    pub fn hamming(&self, other: &SpinMatrix) -> Result<usize> {
        self.check_same_dim(other)?;
        Ok(pairs(self.k)
            .filter(|&(i, j)| self.get(i, j) != other.get(i, j))
            .count())
    }

    /// Bit-packed pair spins as lowercase hex: bit `n` (LSB first within each
    /// byte) is set when pair `n` holds `-1`.
    pub fn packed_hex(&self) -> String {
        let mut bytes = vec![0u8; self.n_edges().div_ceil(8)];
        for (n, (i, j)) in pairs(self.k).enumerate() {
            if self.get(i, j) < 0 {
                bytes[n / 8] |= 1 << (n % 8);
            }
        }
        hex::encode(bytes)
    }

    pub fn from_packed_hex(k: usize, s: &str) -> Result<Self> {
        let bytes = hex::decode(s).map_err(|e| invalid(format!("bad packed state: {e}")))?;
        let n = n_pairs(k);
        if bytes.len() != n.div_ceil(8) {
            return Err(invalid(format!(
                "packed state has {} bytes, expected {} for k = {k}",
                bytes.len(),
                n.div_ceil(8)
            )));
        }
        let mut m = Self::ones(k);
        for (idx, (i, j)) in pairs(k).enumerate() {
            if bytes[idx / 8] >> (idx % 8) & 1 == 1 {
                m.set(i, j, -1);
            }
        }
        Ok(m)
    }

    /// Writes the matrix as `k` lines of comma-separated `±1` values.
    pub fn write_csv<W: Write>(&self, mut w: W) -> std::io::Result<()> {
        for i in 0..self.k {
            let line: Vec<String> = self.row(i).iter().map(|v| v.to_string()).collect();
            writeln!(w, "{}", line.join(","))?;
        }
        Ok(())
    }

    pub fn to_csv_string(&self) -> String {
        let mut buf = Vec::new();
        self.write_csv(&mut buf).expect("write to Vec");
        String::from_utf8(buf).expect("ascii")
    }

    /// Parses the CSV form written by [`SpinMatrix::write_csv`]. Blank lines are
    /// skipped; errors carry 1-based line and column numbers.
    pub fn parse_csv(text: &str) -> Result<Self> {
        let mut rows: Vec<Vec<i8>> = Vec::new();
        let mut line_numbers = Vec::new();
        for (ln, line) in text.lines().enumerate() {
            let line = line.trim();
            if line.is_empty() {
                continue;
            }
            let mut row = Vec::new();
            for (col, field) in line.split(',').enumerate() {
                let v: i8 = match field.trim().parse() {
                    Ok(v @ (1 | -1)) => v,
                    _ => {
                        return Err(Error::Parse {
                            line: ln + 1,
                            column: col + 1,
                            message: format!("expected +1 or -1, found {:?}", field.trim()),
                        })
                    }
                };
                row.push(v);
            }
            rows.push(row);
            line_numbers.push(ln + 1);
        }
        let k = rows.len();
        if k == 0 {
            return Err(Error::Parse {
                line: 1,
                column: 1,
                message: "empty matrix".into(),
            });
        }
        for (r, row) in rows.iter().enumerate() {
            if row.len() != k {
                return Err(Error::Parse {
                    line: line_numbers[r],
                    column: row.len().min(k) + 1,
                    message: format!("row has {} entries, expected {k}", row.len()),
                });
            }
        }
        for i in 0..k {
            if rows[i][i] != 1 {
                return Err(Error::Parse {
                    line: line_numbers[i],
                    column: i + 1,
                    message: "diagonal entry must be +1".into(),
                });
            }
            for (j, row_j) in rows.iter().enumerate().take(i) {
                if rows[i][j] != row_j[i] {
                    return Err(Error::Parse {
                        line: line_numbers[i],
                        column: j + 1,
                        message: format!(
                            "not symmetric: differs from entry ({}, {})",
                            j + 1,
                            i + 1
                        ),
                    });
                }
            }
        }
        Self::from_rows(&rows)
    }
}

impl fmt::Debug for SpinMatrix {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        writeln!(f, "SpinMatrix(k = {})", self.k)?;
        for i in 0..self.k {
            let s: String = self
                .row(i)
                .iter()
                .map(|&v| if v > 0 { '+' } else { '-' })
                .collect();
            writeln!(f, "  {s}")?;
        }
        Ok(())
    }
}
