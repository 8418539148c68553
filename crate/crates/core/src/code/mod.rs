//! CSS code model: validated (G2, H1) stabilizer pairs, hypergraph-product
//! construction, Tanner graph extraction, and on-disk interchange (alist
//! matrices plus a TOML manifest).

mod alist;
mod builtins;
mod manifest;

pub use alist::{load_alist, save_alist};
pub use builtins::{builtin_code, builtin_names, hamming_7_4_check_matrix, repetition_check_matrix};
pub use manifest::{load_manifest, CodeManifest};

use crate::gf2::BitMatrix;
use thiserror::Error;

#[derive(Debug, Error)]
pub enum CodeError {
    #[error("g2 has {g2_cols} columns but h1 has {h1_cols}; both must equal n")]
    ColumnMismatch { g2_cols: usize, h1_cols: usize },
    #[error("g2 row {g2_row} anticommutes with h1 row {h1_row}")]
    Anticommuting { g2_row: usize, h1_row: usize },
    #[error("hypergraph product seed matrix must be nonempty")]
    EmptySeed,
    #[error("{path}:{line}: {message}")]
    AlistParse {
        path: String,
        line: usize,
        message: String,
    },
    #[error("{path}: {message}")]
    Manifest { path: String, message: String },
    #[error("{path}: manifest declares {field} = {declared} but the matrices give {actual}")]
    ManifestMismatch {
        path: String,
        field: &'static str,
        declared: usize,
        actual: usize,
    },
    #[error("failed to access {path}")]
    Io {
        path: String,
        #[source]
        source: std::io::Error,
    },
}

/// A CSS stabilizer code: X-type generators `g2` and Z-type generators `h1`,
/// both over the same `n` qubits, with `g2 · h1^T = 0`.
///
/// Decoding in this crate is syndrome-domain and X-error-only: `h1` defines
/// the Tanner graph and the syndrome map, `g2` defines the degeneracy group
/// used to classify residual errors.
#[derive(Clone, Debug)]
pub struct CssCode {
    name: String,
    n: usize,
    k: usize,
    g2: BitMatrix,
    h1: BitMatrix,
    claimed_distance: Option<usize>,
}

impl CssCode {
    pub fn name(&self) -> &str {
        &self.name
    }

    /// Physical qubit count.
    pub fn n(&self) -> usize {
        self.n
    }

    /// Logical qubit count, `n - rank(g2) - rank(h1)`.
    pub fn k(&self) -> usize {
        self.k
    }

    pub fn g2(&self) -> &BitMatrix {
        &self.g2
    }

    pub fn h1(&self) -> &BitMatrix {
        &self.h1
    }

    /// Distance declared by the source of the code. Metadata only; never
    /// computed or verified.
    pub fn claimed_distance(&self) -> Option<usize> {
        self.claimed_distance
    }

    pub fn with_name(mut self, name: impl Into<String>) -> Self {
        self.name = name.into();
        self
    }

    pub fn with_claimed_distance(mut self, d: Option<usize>) -> Self {
        self.claimed_distance = d;
        self
    }
}

/// Validates a `(g2, h1)` pair and derives `k`.
///
/// Every row of `g2` must commute with every row of `h1` (even inner
/// product); the check is exhaustive and reports the first offending pair.
pub fn make_css(
    g2: BitMatrix,
    h1: BitMatrix,
    name: impl Into<String>,
) -> Result<CssCode, CodeError> {
    if g2.cols() != h1.cols() {
        return Err(CodeError::ColumnMismatch {
            g2_cols: g2.cols(),
            h1_cols: h1.cols(),
        });
    }
    let commutator = g2.mul_transpose(&h1);
    for i in 0..g2.rows() {
        for j in 0..h1.rows() {
            if commutator.get(i, j) {
                return Err(CodeError::Anticommuting { g2_row: i, h1_row: j });
            }
        }
    }
    let n = h1.cols();
    let k = n - g2.rank() - h1.rank();
    Ok(CssCode {
        name: name.into(),
        n,
        k,
        g2,
        h1,
        claimed_distance: None,
    })
}

/// Hypergraph product of two classical parity-check matrices.
///
/// With `ha` of shape `ma×na` and `hb` of shape `mb×nb`:
///
/// ```text
/// h1 = [ ha ⊗ I_nb | I_ma ⊗ hb^T ]   (ma·nb rows)
/// g2 = [ I_na ⊗ hb | ha^T ⊗ I_mb ]   (na·mb rows)
/// ```
///
/// over `n = na·nb + ma·mb` columns. Kronecker blocks are row-major, so
/// column `j1·nb + j2` of the left block pairs seed-A column `j1` with
/// seed-B position `j2`. Commutativity holds identically:
/// `g2·h1^T = ha^T ⊗ hb + ha^T ⊗ hb = 0`.
pub fn hypergraph_product(ha: &BitMatrix, hb: &BitMatrix) -> Result<CssCode, CodeError> {
    if ha.rows() == 0 || ha.cols() == 0 || hb.rows() == 0 || hb.cols() == 0 {
        return Err(CodeError::EmptySeed);
    }
    let (ma, na) = (ha.rows(), ha.cols());
    let (mb, nb) = (hb.rows(), hb.cols());
    let h1 = ha
        .kron(&BitMatrix::identity(nb))
        .hconcat(&BitMatrix::identity(ma).kron(&hb.transpose()));
    let g2 = BitMatrix::identity(na)
        .kron(hb)
        .hconcat(&ha.transpose().kron(&BitMatrix::identity(mb)));
    let name = format!("hgp({ma}x{na},{mb}x{nb})");
    make_css(g2, h1, name)
}

/// Bipartite adjacency of `h1`: variable nodes are columns (qubits), check
/// nodes are rows (Z-stabilizer measurements).
///
/// Besides the two sorted neighbor lists, the graph carries cross-position
/// indices so a decoder can address "the slot of edge (v,c) on the other
/// side" in O(1) during message passing.
#[derive(Clone)]
pub struct TannerGraph {
    n_vars: usize,
    n_checks: usize,
    edge_count: usize,
    var_neighbors: Vec<Vec<usize>>,
    check_neighbors: Vec<Vec<usize>>,
    // var_pos_in_check[v][k] = position of v inside check_neighbors[c]
    // where c = var_neighbors[v][k]; check_pos_in_var is the mirror.
    var_pos_in_check: Vec<Vec<usize>>,
    check_pos_in_var: Vec<Vec<usize>>,
}

impl TannerGraph {
    pub fn from_h1(h1: &BitMatrix) -> Self {
        let n_vars = h1.cols();
        let n_checks = h1.rows();
        let mut var_neighbors = vec![Vec::new(); n_vars];
        let mut check_neighbors = vec![Vec::new(); n_checks];
        for c in 0..n_checks {
            for v in h1.row_support(c) {
                check_neighbors[c].push(v);
                var_neighbors[v].push(c);
            }
        }
        // Row-major construction leaves both lists sorted ascending.
        let check_pos_in_var: Vec<Vec<usize>> = check_neighbors
            .iter()
            .enumerate()
            .map(|(c, vs)| {
                vs.iter()
                    .map(|&v| var_neighbors[v].binary_search(&c).expect("edge exists"))
                    .collect()
            })
            .collect();
        let var_pos_in_check: Vec<Vec<usize>> = var_neighbors
            .iter()
            .enumerate()
            .map(|(v, cs)| {
                cs.iter()
                    .map(|&c| check_neighbors[c].binary_search(&v).expect("edge exists"))
                    .collect()
            })
            .collect();
        let edge_count = var_neighbors.iter().map(Vec::len).sum();
        TannerGraph {
            n_vars,
            n_checks,
            edge_count,
            var_neighbors,
            check_neighbors,
            var_pos_in_check,
            check_pos_in_var,
        }
    }

    pub fn n_vars(&self) -> usize {
        self.n_vars
    }

    pub fn n_checks(&self) -> usize {
        self.n_checks
    }

    pub fn edge_count(&self) -> usize {
        self.edge_count
    }

    /// Check neighborhood ∂v, ascending.
    pub fn var_neighbors(&self, v: usize) -> &[usize] {
        &self.var_neighbors[v]
    }

    /// Variable neighborhood ∂c, ascending.
    pub fn check_neighbors(&self, c: usize) -> &[usize] {
        &self.check_neighbors[c]
    }

    /// For edge `(v, var_neighbors(v)[k])`: the edge's slot index on the
    /// check side.
    pub fn var_pos_in_check(&self, v: usize) -> &[usize] {
        &self.var_pos_in_check[v]
    }

    /// For edge `(check_neighbors(c)[k], c)`: the edge's slot index on the
    /// variable side.
    pub fn check_pos_in_var(&self, c: usize) -> &[usize] {
        &self.check_pos_in_var[c]
    }

    /// Variable nodes with no checks at all. Errors there are invisible to
    /// the decoder, so callers should surface these.
    pub fn isolated_vars(&self) -> Vec<usize> {
        (0..self.n_vars)
            .filter(|&v| self.var_neighbors[v].is_empty())
            .collect()
    }

    /// Rebuilds the parity-check matrix the adjacency came from.
    pub fn to_matrix(&self) -> BitMatrix {
        let mut m = BitMatrix::zeros(self.n_checks, self.n_vars);
        for (c, vs) in self.check_neighbors.iter().enumerate() {
            for &v in vs {
                m.set(c, v, true);
            }
        }
        m
    }
}

/// Tanner graph of the code's `h1`.
pub fn tanner_graph(code: &CssCode) -> TannerGraph {
    TannerGraph::from_h1(code.h1())
}
