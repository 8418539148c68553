//! Built-in codes: small hypergraph products that exercise every decoder
//! without any input files.

use super::{hypergraph_product, CssCode};
use crate::gf2::BitMatrix;

/// Parity checks of the [n,1] repetition code: the (n−1)×n bidiagonal
/// matrix with rows {i, i+1}.
///
/// # Panics
/// Panics if `n < 2`.
pub fn repetition_check_matrix(n: usize) -> BitMatrix {
    assert!(n >= 2, "repetition code needs at least 2 bits");
    let mut h = BitMatrix::zeros(n - 1, n);
    for i in 0..n - 1 {
        h.set(i, i, true);
        h.set(i, i + 1, true);
    }
    h
}

/// Parity checks of the [7,4] Hamming code; column j is the binary
/// expansion of j+1, least significant bit in row 0. Self-orthogonal, so it
/// also seeds a valid Steane-style CSS pair.
pub fn hamming_7_4_check_matrix() -> BitMatrix {
    let mut h = BitMatrix::zeros(3, 7);
    for j in 0..7u32 {
        let label = j + 1;
        for r in 0..3 {
            if label >> r & 1 == 1 {
                h.set(r as usize, j as usize, true);
            }
        }
    }
    h
}

pub fn builtin_names() -> &'static [&'static str] {
    &["hgp:rep3", "hgp:rep5", "hgp:hamming7"]
}

/// Looks up a built-in code by name:
///
/// * `hgp:rep3` — HGP of the [3,1] repetition code with itself, [[13,1,3]]
/// * `hgp:rep5` — HGP of the [5,1] repetition code with itself, [[41,1,5]]
/// * `hgp:hamming7` — HGP of the [7,4] Hamming code with itself, [[58,16,3]]
pub fn builtin_code(name: &str) -> Option<CssCode> {
    let (seed, d) = match name {
        "hgp:rep3" => (repetition_check_matrix(3), 3),
        "hgp:rep5" => (repetition_check_matrix(5), 5),
        "hgp:hamming7" => (hamming_7_4_check_matrix(), 3),
        _ => return None,
    };
    let code = hypergraph_product(&seed, &seed)
        .expect("built-in seeds are valid")
        .with_name(name)
        .with_claimed_distance(Some(d));
    Some(code)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn repetition_matrix_shape() {
        let h = repetition_check_matrix(5);
        assert_eq!((h.rows(), h.cols()), (4, 5));
        for i in 0..4 {
            assert_eq!(h.row_support(i), vec![i, i + 1]);
        }
    }

    #[test]
    fn hamming_matrix_is_rank_3_and_self_orthogonal() {
        let h = hamming_7_4_check_matrix();
        assert_eq!((h.rows(), h.cols()), (3, 7));
        assert_eq!(h.rank(), 3);
        assert!(h.mul_transpose(&h).is_zero());
        assert_eq!(h.row_support(0), vec![0, 2, 4, 6]);
        assert_eq!(h.row_support(1), vec![1, 2, 5, 6]);
        assert_eq!(h.row_support(2), vec![3, 4, 5, 6]);
    }

    #[test]
    fn builtin_parameters() {
        let cases = [
            ("hgp:rep3", 13, 1, Some(3)),
            ("hgp:rep5", 41, 1, Some(5)),
            ("hgp:hamming7", 58, 16, Some(3)),
        ];
        for (name, n, k, d) in cases {
            let code = builtin_code(name).unwrap();
            assert_eq!(code.name(), name);
            assert_eq!(code.n(), n, "{name}");
            assert_eq!(code.k(), k, "{name}");
            assert_eq!(code.claimed_distance(), d);
            assert!(code.g2().mul_transpose(code.h1()).is_zero());
        }
        assert!(builtin_code("hgp:rep4").is_none());
        assert_eq!(builtin_names().len(), 3);
    }
}
