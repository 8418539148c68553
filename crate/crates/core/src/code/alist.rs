//! MacKay alist reader and writer.
//!
//! Layout (all indices 1-based in the file):
//!
//! ```text
//! n m                      // n = columns (VNs), m = rows (CNs)
//! max_col_weight max_row_weight
//! w(col 0) ... w(col n-1)
//! w(row 0) ... w(row m-1)
//! <n lines: row indices of each column>
//! <m lines: column indices of each row>
//! ```
//!
//! Entry lines may be zero-padded to the declared maximum weight or left
//! unpadded; the writer always pads. Zeros are only valid as padding.

use super::CodeError;
use crate::gf2::BitMatrix;
use std::fs;
use std::io::Write;
use std::path::Path;

pub fn load_alist(path: &Path) -> Result<BitMatrix, CodeError> {
    let text = fs::read_to_string(path).map_err(|source| CodeError::Io {
        path: path.display().to_string(),
        source,
    })?;
    parse_alist(&text).map_err(|(line, message)| CodeError::AlistParse {
        path: path.display().to_string(),
        line,
        message,
    })
}

pub fn save_alist(m: &BitMatrix, path: &Path) -> Result<(), CodeError> {
    let mut out = Vec::new();
    write_alist(m, &mut out).expect("writing to a Vec cannot fail");
    fs::write(path, out).map_err(|source| CodeError::Io {
        path: path.display().to_string(),
        source,
    })
}

fn write_alist(m: &BitMatrix, w: &mut impl Write) -> std::io::Result<()> {
    let n = m.cols();
    let rows = m.rows();
    let col_supports: Vec<Vec<usize>> = (0..n)
        .map(|c| (0..rows).filter(|&r| m.get(r, c)).collect())
        .collect();
    let row_supports: Vec<Vec<usize>> = (0..rows).map(|r| m.row_support(r)).collect();
    let max_col = col_supports.iter().map(Vec::len).max().unwrap_or(0);
    let max_row = row_supports.iter().map(Vec::len).max().unwrap_or(0);

    writeln!(w, "{n} {rows}")?;
    writeln!(w, "{max_col} {max_row}")?;
    writeln!(w, "{}", join_counts(col_supports.iter().map(Vec::len)))?;
    writeln!(w, "{}", join_counts(row_supports.iter().map(Vec::len)))?;
    for support in &col_supports {
        writeln!(w, "{}", join_padded(support, max_col))?;
    }
    for support in &row_supports {
        writeln!(w, "{}", join_padded(support, max_row))?;
    }
    Ok(())
}

fn join_counts(counts: impl Iterator<Item = usize>) -> String {
    counts
        .map(|c| c.to_string())
        .collect::<Vec<_>>()
        .join(" ")
}

fn join_padded(support: &[usize], width: usize) -> String {
    let mut parts: Vec<String> = support.iter().map(|&i| (i + 1).to_string()).collect();
    parts.resize(width, "0".to_string());
    parts.join(" ")
}

type ParseError = (usize, String);

/// Parses alist text. Errors carry the 1-based line number.
fn parse_alist(text: &str) -> Result<BitMatrix, ParseError> {
    let lines: Vec<&str> = text.lines().collect();
    let mut cursor = LineCursor { lines: &lines, next: 0 };

    let (line_no, header) = cursor.take("matrix size header")?;
    let [n, m] = parse_fields(line_no, &header, "expected \"n m\"")?;
    let (line_no, maxes) = cursor.take("maximum weight line")?;
    let [max_col, max_row] = parse_fields(line_no, &maxes, "expected \"max_col_weight max_row_weight\"")?;

    let (line_no, cw_line) = cursor.take("column weight line")?;
    let col_weights = parse_weight_list(line_no, &cw_line, n, max_col, "column")?;
    let (line_no, rw_line) = cursor.take("row weight line")?;
    let row_weights = parse_weight_list(line_no, &rw_line, m, max_row, "row")?;

    let mut matrix = BitMatrix::zeros(m, n);
    for c in 0..n {
        let (line_no, line) = cursor.take("column entry line")?;
        let entries = parse_entry_line(line_no, &line, col_weights[c], max_col, m, "column", c)?;
        for r in entries {
            matrix.set(r, c, true);
        }
    }
    for r in 0..m {
        let (line_no, line) = cursor.take("row entry line")?;
        let entries = parse_entry_line(line_no, &line, row_weights[r], max_row, n, "row", r)?;
        for c in entries {
            if !matrix.get(r, c) {
                return Err((
                    line_no,
                    format!("row {r} lists column {c} but column {c} does not list row {r}"),
                ));
            }
        }
        let listed = matrix.row_support(r).len();
        if listed != row_weights[r] {
            return Err((
                line_no,
                format!(
                    "row {r} has {listed} entries according to the column lists but declares weight {}",
                    row_weights[r]
                ),
            ));
        }
    }
    Ok(matrix)
}

struct LineCursor<'a> {
    lines: &'a [&'a str],
    next: usize,
}

impl LineCursor<'_> {
    /// Next non-returned line with its 1-based number; trailing content is
    /// the caller's problem, truncation is ours.
    fn take(&mut self, what: &str) -> Result<(usize, String), ParseError> {
        let Some(&line) = self.lines.get(self.next) else {
            return Err((self.lines.len() + 1, format!("file truncated, missing {what}")));
        };
        self.next += 1;
        Ok((self.next, line.to_string()))
    }
}

fn parse_fields<const K: usize>(
    line_no: usize,
    line: &str,
    expectation: &str,
) -> Result<[usize; K], ParseError> {
    let tokens: Vec<&str> = line.split_whitespace().collect();
    if tokens.len() != K {
        return Err((line_no, format!("{expectation}, found {} fields", tokens.len())));
    }
    let mut out = [0usize; K];
    for (slot, token) in out.iter_mut().zip(&tokens) {
        *slot = token
            .parse()
            .map_err(|_| (line_no, format!("invalid integer {token:?}")))?;
    }
    Ok(out)
}

fn parse_weight_list(
    line_no: usize,
    line: &str,
    expected_len: usize,
    max_weight: usize,
    kind: &str,
) -> Result<Vec<usize>, ParseError> {
    let weights: Vec<usize> = line
        .split_whitespace()
        .map(|t| t.parse().map_err(|_| (line_no, format!("invalid integer {t:?}"))))
        .collect::<Result<_, _>>()?;
    if weights.len() != expected_len {
        return Err((
            line_no,
            format!("expected {expected_len} {kind} weights, found {}", weights.len()),
        ));
    }
    if let Some(w) = weights.iter().find(|&&w| w > max_weight) {
        return Err((
            line_no,
            format!("{kind} weight {w} exceeds declared maximum {max_weight}"),
        ));
    }
    Ok(weights)
}

/// Parses one entry line: `weight` 1-based indices, optionally zero-padded
/// to `max_weight`. Returns 0-based indices.
fn parse_entry_line(
    line_no: usize,
    line: &str,
    weight: usize,
    max_weight: usize,
    index_bound: usize,
    kind: &str,
    which: usize,
) -> Result<Vec<usize>, ParseError> {
    let tokens: Vec<usize> = line
        .split_whitespace()
        .map(|t| t.parse().map_err(|_| (line_no, format!("invalid integer {t:?}"))))
        .collect::<Result<_, _>>()?;
    let nonzero: Vec<usize> = tokens.iter().copied().take_while(|&t| t != 0).collect();
    if nonzero.len() != weight {
        return Err((
            line_no,
            format!(
                "{kind} {which} declares weight {weight} but lists {} entries",
                nonzero.len()
            ),
        ));
    }
    // Padding may only be zeros, and only after the real entries.
    if tokens.len() > nonzero.len() && tokens[nonzero.len()..].iter().any(|&t| t != 0) {
        return Err((line_no, format!("{kind} {which}: nonzero entry after zero padding")));
    }
    if tokens.len() != weight && tokens.len() != max_weight {
        return Err((
            line_no,
            format!(
                "{kind} {which}: expected {weight} or {max_weight} fields, found {}",
                tokens.len()
            ),
        ));
    }
    let mut out = Vec::with_capacity(weight);
    for t in nonzero {
        if t > index_bound {
            return Err((line_no, format!("{kind} {which}: index {t} out of range 1..={index_bound}")));
        }
        out.push(t - 1);
    }
    Ok(out)
}
