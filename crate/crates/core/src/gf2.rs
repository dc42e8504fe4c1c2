//! Bit-packed binary matrices over GF(2).
//!
//! Only used for the binary views of the code (generator and parity-check
//! matrices); decoding itself works in the spin representation.

use std::fmt;

#[derive(Clone, PartialEq, Eq)]
pub struct BinaryMatrix {
    rows: usize,
    cols: usize,
    words_per_row: usize,
    data: Vec<u64>,
}

impl BinaryMatrix {
    pub fn zeros(rows: usize, cols: usize) -> Self {
        let words_per_row = cols.div_ceil(64);
        Self {
            rows,
            cols,
            words_per_row,
            data: vec![0; rows * words_per_row],
        }
    }

    pub fn rows(&self) -> usize {
        self.rows
    }

    pub fn cols(&self) -> usize {
        self.cols
    }

    #[inline]
    pub fn get(&self, r: usize, c: usize) -> bool {
        self.data[r * self.words_per_row + c / 64] >> (c % 64) & 1 == 1
    }

    #[inline]
    pub fn set(&mut self, r: usize, c: usize, v: bool) {
        let w = &mut self.data[r * self.words_per_row + c / 64];
        if v {
            *w |= 1 << (c % 64);
        } else {
            *w &= !(1 << (c % 64));
        }
    }

    fn row_words(&self, r: usize) -> &[u64] {
        &self.data[r * self.words_per_row..(r + 1) * self.words_per_row]
    }

    /// `self · otherᵀ (mod 2)`. Both operands must have the same column count.
    pub fn mul_transpose(&self, other: &BinaryMatrix) -> BinaryMatrix {
        assert_eq!(self.cols, other.cols, "column counts differ");
        let mut out = BinaryMatrix::zeros(self.rows, other.rows);
        for r in 0..self.rows {
            let a = self.row_words(r);
            for s in 0..other.rows {
                let b = other.row_words(s);
                let ones: u32 = a.iter().zip(b).map(|(x, y)| (x & y).count_ones()).sum();
                if ones & 1 == 1 {
                    out.set(r, s, true);
                }
            }
        }
        out
    }

    pub fn is_zero(&self) -> bool {
        self.data.iter().all(|&w| w == 0)
    }

    pub fn row_weight(&self, r: usize) -> usize {
        self.row_words(r)
            .iter()
            .map(|w| w.count_ones() as usize)
            .sum()
    }

    pub fn col_weight(&self, c: usize) -> usize {
        (0..self.rows).filter(|&r| self.get(r, c)).count()
    }

    /// Rows as `0`/`1` vectors.
    pub fn to_rows(&self) -> Vec<Vec<u8>> {
        (0..self.rows)
            .map(|r| (0..self.cols).map(|c| self.get(r, c) as u8).collect())
            .collect()
    }
}

impl fmt::Debug for BinaryMatrix {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        for row in self.to_rows() {
            let s: Vec<String> = row.iter().map(|b| b.to_string()).collect();
            writeln!(f, "{}", s.join(" "))?;
        }
        Ok(())
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn product_matches_naive() {
        let mut a = BinaryMatrix::zeros(3, 70);
        let mut b = BinaryMatrix::zeros(4, 70);
        for c in 0..70 {
            a.set(c % 3, c, c % 5 == 0);
            b.set(c % 4, c, c % 7 < 3);
            a.set((c + 1) % 3, c, c % 2 == 0);
        }
        let p = a.mul_transpose(&b);
        for r in 0..3 {
            for s in 0..4 {
                let naive = (0..70).filter(|&c| a.get(r, c) && b.get(s, c)).count() % 2 == 1;
                assert_eq!(p.get(r, s), naive);
            }
        }
    }
}
