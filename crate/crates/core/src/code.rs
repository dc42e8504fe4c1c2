//! The LHZ parity code for `K` logical spins.
//!
//! Physical spins (variable nodes) live on the `C(K,2)` pairs of logical
//! spins. Two families of parity checks are built:
//!
//! * weight-3 checks, one per triple `{i, j, l}`: `x_ij · x_jl · x_il`;
//! * weight-4 checks, one per lattice plaquette `(a, a+1, c, c+1)` with
//!   `a + 1 <= c`: `x_{a,c} · x_{a+1,c} · x_{a+1,c+1} · x_{a,c+1}`, where the
//!   diagonal spin `x_{a+1,a+1}` that appears on the lower boundary is the
//!   fixed `+1` and is left out of the check.
//!
//! Both families cut out the same code space: the `2^(K-1)` matrices
//! `x_ij = Z_i Z_j`.

use std::fmt;
use std::str::FromStr;

use serde::{Deserialize, Serialize};

use crate::error::{invalid, Result};
use crate::gf2::BinaryMatrix;
use crate::spin::{n_pairs, pair_index, pairs, SpinMatrix};

/// Which parity-check family a syndrome is computed over.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum SyndromeFamily {
    /// Triangle checks `x_ij x_jl x_il`.
    #[serde(rename = "weight3")]
    Weight3,
    /// Plaquette checks of the LHZ lattice.
    #[serde(rename = "weight4")]
    Weight4,
}

impl fmt::Display for SyndromeFamily {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            SyndromeFamily::Weight3 => "weight3",
            SyndromeFamily::Weight4 => "weight4",
        })
    }
}

impl FromStr for SyndromeFamily {
    type Err = crate::Error;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "3" | "weight3" | "weight-3" => Ok(SyndromeFamily::Weight3),
            "4" | "weight4" | "weight-4" => Ok(SyndromeFamily::Weight4),
            _ => Err(invalid(format!("unknown syndrome family {s:?}"))),
        }
    }
}

/// One family of parity checks with its bipartite adjacency.
#[derive(Clone, Debug)]
pub struct CheckSet {
    /// `N(c)`: variable nodes in check `c`.
    members: Vec<Vec<usize>>,
    /// `M(v)`: checks containing variable node `v`.
    adjacent: Vec<Vec<usize>>,
}

impl CheckSet {
    fn new(n_v: usize, members: Vec<Vec<usize>>) -> Self {
        let mut adjacent = vec![Vec::new(); n_v];
        for (c, m) in members.iter().enumerate() {
            for &v in m {
                adjacent[v].push(c);
            }
        }
        Self { members, adjacent }
    }

    pub fn len(&self) -> usize {
        self.members.len()
    }

    pub fn is_empty(&self) -> bool {
        self.members.is_empty()
    }

    #[inline]
    pub fn members(&self, c: usize) -> &[usize] {
        &self.members[c]
    }

    #[inline]
    pub fn adjacent(&self, v: usize) -> &[usize] {
        &self.adjacent[v]
    }

    pub fn iter(&self) -> impl Iterator<Item = &[usize]> {
        self.members.iter().map(Vec::as_slice)
    }

    /// Product of the spins of check `c` over the vector form `x`.
    #[inline]
    pub fn evaluate(&self, c: usize, x: &[i8]) -> i8 {
        self.members[c].iter().map(|&v| x[v]).product()
    }
}

/// Logical source state `Z ∈ {±1}^K`.
#[derive(Clone, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct LogicalState(Vec<i8>);

impl LogicalState {
    pub fn new(spins: Vec<i8>) -> Result<Self> {
        if let Some(v) = spins.iter().find(|&&v| v != 1 && v != -1) {
            return Err(invalid(format!("logical spin {v} is not ±1")));
        }
        Ok(Self(spins))
    }

    pub fn ones(k: usize) -> Self {
        Self(vec![1; k])
    }

    pub fn spins(&self) -> &[i8] {
        &self.0
    }

    pub fn len(&self) -> usize {
        self.0.len()
    }

    pub fn is_empty(&self) -> bool {
        self.0.is_empty()
    }

    /// Global spin flip `-Z`.
    pub fn flipped(&self) -> Self {
        Self(self.0.iter().map(|v| -v).collect())
    }
}

/// ±1 syndrome values of one check family.
#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub struct SyndromeVector {
    pub family: SyndromeFamily,
    pub values: Vec<i8>,
}

impl SyndromeVector {
    /// Number of violated (`-1`) checks.
    pub fn violated(&self) -> usize {
        self.values.iter().filter(|&&s| s < 0).count()
    }

    pub fn all_satisfied(&self) -> bool {
        self.values.iter().all(|&s| s > 0)
    }

    /// Componentwise product with another syndrome of the same family.
    pub fn product(&self, other: &SyndromeVector) -> SyndromeVector {
        assert_eq!(self.family, other.family);
        SyndromeVector {
            family: self.family,
            values: self
                .values
                .iter()
                .zip(&other.values)
                .map(|(a, b)| a * b)
                .collect(),
        }
    }
}

/// The parity code for `K` logical spins. Immutable once built.
#[derive(Clone, Debug)]
pub struct ParityCode {
    k: usize,
    edges: Vec<(usize, usize)>,
    triples: Vec<[usize; 3]>,
    plaquettes: Vec<[usize; 4]>,
    checks3: CheckSet,
    checks4: CheckSet,
}

impl ParityCode {
    /// Builds the code for `k >= 2` logical spins.
    pub fn new(k: usize) -> Result<Self> {
        if k < 2 {
            return Err(invalid(format!("need at least 2 logical spins, got {k}")));
        }
        let n_v = n_pairs(k);
        let edges: Vec<_> = pairs(k).collect();

        let mut triples = Vec::new();
        let mut members3 = Vec::new();
        for i in 0..k {
            for j in (i + 1)..k {
                for l in (j + 1)..k {
                    triples.push([i, j, l]);
                    members3.push(vec![
                        pair_index(k, i, j),
                        pair_index(k, i, l),
                        pair_index(k, j, l),
                    ]);
                }
            }
        }

        let mut plaquettes = Vec::new();
        let mut members4 = Vec::new();
        for a in 0..k.saturating_sub(2) {
            let b = a + 1;
            for c in b..(k - 1) {
                let d = c + 1;
                plaquettes.push([a, b, c, d]);
                let mut m = vec![pair_index(k, a, c)];
                if b != c {
                    m.push(pair_index(k, b, c));
                }
                m.push(pair_index(k, b, d));
                m.push(pair_index(k, a, d));
                m.sort_unstable();
                members4.push(m);
            }
        }

        Ok(Self {
            k,
            edges,
            triples,
            plaquettes,
            checks3: CheckSet::new(n_v, members3),
            checks4: CheckSet::new(n_v, members4),
        })
    }

    /// Number of logical spins `K`.
    pub fn k(&self) -> usize {
        self.k
    }

    /// Number of physical spins `N_v = C(K, 2)`.
    pub fn n_v(&self) -> usize {
        self.edges.len()
    }

    /// Variable node index → logical pair `(i, j)`, `i < j`, 0-based.
    pub fn edge(&self, v: usize) -> (usize, usize) {
        self.edges[v]
    }

    pub fn edges(&self) -> &[(usize, usize)] {
        &self.edges
    }

    /// Logical pair → variable node index.
    pub fn edge_index(&self, i: usize, j: usize) -> usize {
        pair_index(self.k, i, j)
    }

    /// Logical labels `{i, j, l}` of the weight-3 checks, in check order.
    pub fn triples(&self) -> &[[usize; 3]] {
        &self.triples
    }

    /// Lattice labels `(a, a+1, c, c+1)` of the weight-4 checks, in check order.
    pub fn plaquettes(&self) -> &[[usize; 4]] {
        &self.plaquettes
    }

    pub fn checks(&self, family: SyndromeFamily) -> &CheckSet {
        match family {
            SyndromeFamily::Weight3 => &self.checks3,
            SyndromeFamily::Weight4 => &self.checks4,
        }
    }

    /// Column weight `d_v` of the weight-3 family (`K - 2`).
    pub fn weight3_column_weight(&self) -> usize {
        self.k - 2
    }

    fn check_dim(&self, x: &SpinMatrix) -> Result<()> {
        if x.k() != self.k {
            return Err(invalid(format!(
                "matrix dimension {} does not match code with K = {}",
                x.k(),
                self.k
            )));
        }
        Ok(())
    }

    /// `ẑ_ij = Z_i Z_j`.
    pub fn encode(&self, z: &LogicalState) -> Result<SpinMatrix> {
        if z.len() != self.k {
            return Err(invalid(format!(
                "logical state has {} spins, code expects {}",
                z.len(),
                self.k
            )));
        }
        let s = z.spins();
        let mut m = SpinMatrix::ones(self.k);
        for &(i, j) in &self.edges {
            m.set(i, j, s[i] * s[j]);
        }
        Ok(m)
    }

    pub fn syndrome(&self, x: &SpinMatrix, family: SyndromeFamily) -> Result<SyndromeVector> {
        self.check_dim(x)?;
        let xv = x.edge_values();
        Ok(self.syndrome_of_vector(&xv, family))
    }

    /// Syndrome of the vector form (pair spins in lexicographic order).
    pub fn syndrome_of_vector(&self, x: &[i8], family: SyndromeFamily) -> SyndromeVector {
        let checks = self.checks(family);
        SyndromeVector {
            family,
            values: (0..checks.len()).map(|c| checks.evaluate(c, x)).collect(),
        }
    }

    /// Per variable node, the sum of syndromes of its adjacent checks,
    /// `Σ_{c ∈ M(v)} s_c(x)`.
    pub fn syndrome_sums(&self, x: &[i8], family: SyndromeFamily) -> Vec<i32> {
        let checks = self.checks(family);
        let s: Vec<i8> = (0..checks.len()).map(|c| checks.evaluate(c, x)).collect();
        (0..self.n_v())
            .map(|v| checks.adjacent(v).iter().map(|&c| s[c] as i32).sum())
            .collect()
    }

    /// True iff every weight-3 syndrome is `+1`, i.e. `x = encode(Z)` for some `Z`.
    pub fn is_codeword(&self, x: &SpinMatrix) -> Result<bool> {
        self.check_dim(x)?;
        Ok(self.logical_of(x).is_some())
    }

    /// The logical state `Z` (with `Z_1 = +1`) encoded by `x`, if `x` is a codeword.
    pub fn logical_of(&self, x: &SpinMatrix) -> Option<LogicalState> {
        if x.k() != self.k {
            return None;
        }
        // Triangle checks through spin 0 pin every pair to x_0i x_0j.
        let row0 = x.row(0);
        for &(i, j) in &self.edges {
            if i > 0 && x.get(i, j) != row0[i] * row0[j] {
                return None;
            }
        }
        Some(LogicalState(row0.to_vec()))
    }

    /// Generator matrix `G` (`K × N_v`): two ones per column.
    pub fn generator_matrix(&self) -> BinaryMatrix {
        let mut g = BinaryMatrix::zeros(self.k, self.n_v());
        for (v, &(i, j)) in self.edges.iter().enumerate() {
            g.set(i, v, true);
            g.set(j, v, true);
        }
        g
    }

    /// Binary parity-check matrix of a family (`H` for weight-4, `H′` for weight-3).
    pub fn parity_check_matrix(&self, family: SyndromeFamily) -> BinaryMatrix {
        let checks = self.checks(family);
        let mut h = BinaryMatrix::zeros(checks.len(), self.n_v());
        for (c, m) in checks.iter().enumerate() {
            for &v in m {
                h.set(c, v, true);
            }
        }
        h
    }
}

/// Error pattern `ê = x̂ ∘ ẑ`.
pub fn error_matrix(x: &SpinMatrix, z: &SpinMatrix) -> Result<SpinMatrix> {
    x.hadamard(z)
}

fn binom(n: usize, r: usize) -> usize {
    if r > n {
        return 0;
    }
    (0..r).fold(1, |acc, i| acc * (n - i) / (i + 1))
}

/// Table of code parameters for `K`: `(N_v, |checks4|, |checks3|, d_v)`.
pub fn expected_counts(k: usize) -> (usize, usize, usize, usize) {
    (
        binom(k, 2),
        binom(k.saturating_sub(1), 2),
        binom(k, 3),
        k.saturating_sub(2),
    )
}
