//! Support constraints on generator matrices.
//!
//! A constraint prescribes zero sets `Z_1..Z_k` of columns. An MSRD code with
//! such zeros exists iff `|intersection of Z_i over Omega| + |Omega| <= k` for
//! every nonempty row subset `Omega`. Row and column indices are 0-based in
//! the API and 1-based in pattern files.

use std::collections::BTreeSet;
use std::fmt;

use num_bigint::BigUint;
use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::gf::next_prime_power;
use crate::sumrank::OrderedPartition;

/// Largest number of rows (or distinct zero sets) scanned exhaustively.
pub const SUBSET_GUARD: usize = 24;

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum ConstraintError {
    #[error("dimension must be at least 1")]
    ZeroDimension,
    #[error("{got} zero sets given for dimension {k}")]
    CountMismatch { k: usize, got: usize },
    #[error("row {row}: column {column} is outside 1..={n}")]
    IndexOutOfRange { row: usize, column: usize, n: usize },
    #[error("{k} rows exceed the subset-scan guard of {guard}")]
    SubsetGuard { k: usize, guard: usize },
    #[error("support condition violated by rows {}", one_based(.witness))]
    ConditionViolated { witness: Vec<usize> },
    #[error("greedy completion stuck at row {} with {size} zeros", .row + 1)]
    CompletionStuck { row: usize, size: usize },
    #[error("message {} is held by no source", .message + 1)]
    MessageUncovered { message: usize },
    #[error("{sources} sources but {widths} column widths")]
    WidthMismatch { sources: usize, widths: usize },
    #[error("line {line}: {message}")]
    Parse { line: usize, message: String },
}

fn one_based(rows: &[usize]) -> String {
    let inner: Vec<String> = rows.iter().map(|r| (r + 1).to_string()).collect();
    format!("{{{}}}", inner.join(","))
}

/// Zero sets `Z_1..Z_k` of a `k x n` generator matrix.
#[derive(Debug, Clone, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct SupportConstraint {
    n: usize,
    k: usize,
    zero_sets: Vec<BTreeSet<usize>>,
}

impl SupportConstraint {
    pub fn new(
        n: usize,
        k: usize,
        zero_sets: Vec<BTreeSet<usize>>,
    ) -> Result<Self, ConstraintError> {
        if k == 0 {
            return Err(ConstraintError::ZeroDimension);
        }
        if zero_sets.len() != k {
            return Err(ConstraintError::CountMismatch {
                k,
                got: zero_sets.len(),
            });
        }
        for (row, z) in zero_sets.iter().enumerate() {
            if let Some(&column) = z.iter().find(|&&c| c >= n) {
                return Err(ConstraintError::IndexOutOfRange {
                    row: row + 1,
                    column: column + 1,
                    n,
                });
            }
        }
        Ok(Self { n, k, zero_sets })
    }

    /// Convenience constructor from slices of 0-based columns.
    pub fn from_lists(n: usize, lists: &[&[usize]]) -> Result<Self, ConstraintError> {
        let sets = lists.iter().map(|l| l.iter().copied().collect()).collect();
        Self::new(n, lists.len(), sets)
    }

    /// `k` empty zero sets.
    pub fn unconstrained(n: usize, k: usize) -> Result<Self, ConstraintError> {
        Self::new(n, k, vec![BTreeSet::new(); k])
    }

    pub fn n(&self) -> usize {
        self.n
    }

    pub fn k(&self) -> usize {
        self.k
    }

    pub fn zero_sets(&self) -> &[BTreeSet<usize>] {
        &self.zero_sets
    }

    pub fn is_zero(&self, row: usize, col: usize) -> bool {
        self.zero_sets[row].contains(&col)
    }

    /// The same zero sets followed by `extra` empty rows.
    pub fn padded(&self, extra: usize) -> Self {
        let mut zero_sets = self.zero_sets.clone();
        zero_sets.extend(std::iter::repeat_n(BTreeSet::new(), extra));
        Self {
            n: self.n,
            k: self.k + extra,
            zero_sets,
        }
    }

    fn masks(&self) -> Vec<Bits> {
        self.zero_sets
            .iter()
            .map(|z| Bits::from_set(self.n, z))
            .collect()
    }
}

impl fmt::Display for SupportConstraint {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&write_pattern(self))
    }
}

/// Fixed-width column bitset.
#[derive(Debug, Clone, PartialEq, Eq, Hash)]
struct Bits(Vec<u64>);

impl Bits {
    fn full(n: usize) -> Self {
        let mut words = vec![u64::MAX; n.div_ceil(64)];
        if n % 64 != 0 {
            *words.last_mut().unwrap() = (1u64 << (n % 64)) - 1;
        }
        Bits(words)
    }

    fn from_set(n: usize, set: &BTreeSet<usize>) -> Self {
        let mut words = vec![0u64; n.div_ceil(64)];
        for &c in set {
            words[c / 64] |= 1 << (c % 64);
        }
        Bits(words)
    }

    fn and(&self, other: &Self) -> Self {
        Bits(self.0.iter().zip(&other.0).map(|(a, b)| a & b).collect())
    }

    fn count(&self) -> usize {
        self.0.iter().map(|w| w.count_ones() as usize).sum()
    }
}

/// Outcome of the exhaustive subset scan.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct ConditionReport {
    pub holds: bool,
    /// Lexicographically least violating row set (0-based), if any.
    pub witness: Option<Vec<usize>>,
    /// Whether every row set meets the bound with equality.
    pub equality_system: bool,
    /// `max |intersection| + |Omega|` over nonempty row sets.
    pub k_tilde: usize,
}

/// Scans every nonempty row set in lexicographic order.
///
/// Subtrees below an empty intersection are skipped: every extension has
/// value `|Omega| <= k`, so it can neither violate the bound nor raise
/// `k_tilde` above `k`. Such a parent is never all rows, so its own value is
/// below `k` and it has already cleared the equality flag.
pub fn check_condition(sc: &SupportConstraint) -> Result<ConditionReport, ConstraintError> {
    if sc.k > SUBSET_GUARD {
        return Err(ConstraintError::SubsetGuard {
            k: sc.k,
            guard: SUBSET_GUARD,
        });
    }
    let masks = sc.masks();
    let mut scan = Scan {
        masks: &masks,
        weights: None,
        k: sc.k,
        report: ConditionReport {
            holds: true,
            witness: None,
            equality_system: true,
            k_tilde: 0,
        },
    };
    let mut path = Vec::new();
    scan.visit(0, &Bits::full(sc.n), 0, &mut path);
    // All rows together always reach at least k, even when pruned.
    scan.report.k_tilde = scan.report.k_tilde.max(sc.k);
    Ok(scan.report)
}

struct Scan<'a> {
    masks: &'a [Bits],
    /// Row counts per mask when scanning grouped zero sets.
    weights: Option<&'a [usize]>,
    k: usize,
    report: ConditionReport,
}

impl Scan<'_> {
    fn visit(&mut self, start: usize, inter: &Bits, size: usize, path: &mut Vec<usize>) {
        for i in start..self.masks.len() {
            let next = inter.and(&self.masks[i]);
            let size = size + self.weights.map_or(1, |w| w[i]);
            let common = next.count();
            let value = common + size;
            path.push(i);
            self.report.k_tilde = self.report.k_tilde.max(value);
            if value > self.k {
                self.report.holds = false;
                self.report.witness.get_or_insert_with(|| path.clone());
            }
            if value != self.k {
                self.report.equality_system = false;
            }
            if common > 0 {
                self.visit(i + 1, &next, size, path);
            }
            path.pop();
        }
    }
}

/// `max |intersection| + |Omega|` over nonempty row sets.
///
/// Rows with identical zero sets are merged first: the best row set always
/// takes all rows of each zero set it touches, so only distinct sets need
/// scanning and the guard applies to their number.
pub fn k_tilde(sc: &SupportConstraint) -> Result<usize, ConstraintError> {
    let mut distinct: Vec<&BTreeSet<usize>> = Vec::new();
    let mut weights = Vec::new();
    for z in &sc.zero_sets {
        match distinct.iter().position(|d| *d == z) {
            Some(i) => weights[i] += 1,
            None => {
                distinct.push(z);
                weights.push(1);
            }
        }
    }
    if distinct.len() > SUBSET_GUARD {
        return Err(ConstraintError::SubsetGuard {
            k: distinct.len(),
            guard: SUBSET_GUARD,
        });
    }
    let masks: Vec<Bits> = distinct.iter().map(|z| Bits::from_set(sc.n, z)).collect();
    let mut scan = Scan {
        masks: &masks,
        weights: Some(&weights),
        k: sc.k,
        report: ConditionReport {
            holds: true,
            witness: None,
            equality_system: true,
            k_tilde: 0,
        },
    };
    scan.visit(0, &Bits::full(sc.n), 0, &mut Vec::new());
    Ok(scan.report.k_tilde.max(sc.k))
}

/// Greedily grows every zero set to size `k - 1` while keeping the condition.
///
/// Rows are filled in order, candidate columns in increasing order; a column
/// is kept iff the condition still holds after adding it.
pub fn complete_zero_sets(sc: &SupportConstraint) -> Result<SupportConstraint, ConstraintError> {
    let report = check_condition(sc)?;
    if let Some(witness) = report.witness {
        return Err(ConstraintError::ConditionViolated { witness });
    }
    let mut out = sc.clone();
    let target = sc.k - 1;
    for row in 0..sc.k {
        for col in 0..sc.n {
            if out.zero_sets[row].len() >= target {
                break;
            }
            if !out.zero_sets[row].insert(col) {
                continue;
            }
            if !holds_for_row(&out, row) {
                out.zero_sets[row].remove(&col);
            }
        }
        if out.zero_sets[row].len() != target {
            return Err(ConstraintError::CompletionStuck {
                row,
                size: out.zero_sets[row].len(),
            });
        }
    }
    Ok(out)
}

/// The condition restricted to row sets containing `row` (the others are unchanged).
fn holds_for_row(sc: &SupportConstraint, row: usize) -> bool {
    let masks = sc.masks();
    let others: Vec<usize> = (0..sc.k).filter(|&i| i != row).collect();
    fn go(
        masks: &[Bits],
        others: &[usize],
        start: usize,
        inter: &Bits,
        size: usize,
        k: usize,
    ) -> bool {
        if inter.count() + size > k {
            return false;
        }
        for idx in start..others.len() {
            let next = inter.and(&masks[others[idx]]);
            if next.count() > 0 && !go(masks, others, idx + 1, &next, size + 1, k) {
                return false;
            }
        }
        true
    }
    go(&masks, &others, 0, &masks[row], 1, sc.k)
}

/// Row `i` belongs to message `message_rows(r)[i]`; messages occupy consecutive rows.
pub fn message_rows(r: &[usize]) -> Vec<usize> {
    r.iter()
        .enumerate()
        .flat_map(|(g, &len)| std::iter::repeat_n(g, len))
        .collect()
}

/// Zero sets for a distributed code.
///
/// Source `s` owns the next `widths[s]` columns; a row of message `g` is zero
/// on the columns of every source that does not hold `g`.
pub fn derive_zero_sets(
    access: &[BTreeSet<usize>],
    r: &[usize],
    widths: &[usize],
) -> Result<SupportConstraint, ConstraintError> {
    if access.len() != widths.len() {
        return Err(ConstraintError::WidthMismatch {
            sources: access.len(),
            widths: widths.len(),
        });
    }
    if let Some(message) = (0..r.len()).find(|g| !access.iter().any(|j| j.contains(g))) {
        return Err(ConstraintError::MessageUncovered { message });
    }
    let n: usize = widths.iter().sum();
    let mut starts = Vec::with_capacity(widths.len());
    let mut acc = 0;
    for &w in widths {
        starts.push(acc);
        acc += w;
    }
    let zero_sets = message_rows(r)
        .into_iter()
        .map(|g| {
            access
                .iter()
                .zip(starts.iter().zip(widths))
                .filter(|(j, _)| !j.contains(&g))
                .flat_map(|(_, (&s, &w))| s..s + w)
                .collect()
        })
        .collect();
    SupportConstraint::new(n, r.iter().sum(), zero_sets)
}

/// Field sizes for a constrained LRS code of dimension `k`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub struct FieldParams {
    pub q: u64,
    /// `max(ceil(k - 1 + log_q k), max n_l)`.
    pub m: u32,
    /// Smallest `m >= max n_l` with `q^m > (k-1)(q-1)q^(k-2) + q^(n_l - 1)` for every block.
    pub m_sharp: u32,
}

/// Suggested `(q, m)`: `q` is the smallest prime power above the block count.
pub fn suggest_field_params(k: usize, part: &OrderedPartition) -> FieldParams {
    let ell = part.len() as u64;
    let q = next_prime_power(ell + 1);
    let max_block = *part.parts().iter().max().unwrap() as u32;
    // ceil(log_q k) as the least c with q^c >= k.
    let mut c = 0u32;
    let mut pw = 1u128;
    while pw < k as u128 {
        pw *= u128::from(q);
        c += 1;
    }
    let m = (k.saturating_sub(1) as u32 + c).max(max_block);
    let big_q = BigUint::from(q);
    let base = if k >= 2 {
        BigUint::from(k - 1) * BigUint::from(q - 1) * big_q.pow(k as u32 - 2)
    } else {
        BigUint::from(0u32)
    };
    let threshold = part
        .parts()
        .iter()
        .map(|&nl| &base + big_q.pow(nl as u32 - 1))
        .max()
        .unwrap();
    let mut m_sharp = 1u32;
    while big_q.pow(m_sharp) <= threshold {
        m_sharp += 1;
    }
    FieldParams {
        q,
        m,
        m_sharp: m_sharp.max(max_block),
    }
}

/// Parses a pattern file: one line per row, space-separated 1-based columns, `-` for empty.
///
/// Blank lines and lines starting with `#` are skipped. Returns the zero sets
/// (0-based) and the largest column mentioned.
pub fn parse_pattern(text: &str) -> Result<(Vec<BTreeSet<usize>>, usize), ConstraintError> {
    let mut rows = Vec::new();
    let mut max_col = 0;
    for (idx, raw) in text.lines().enumerate() {
        let line = raw.trim();
        if line.is_empty() || line.starts_with('#') {
            continue;
        }
        let err = |message: String| ConstraintError::Parse {
            line: idx + 1,
            message,
        };
        if line == "-" {
            rows.push(BTreeSet::new());
            continue;
        }
        let mut set = BTreeSet::new();
        for tok in line.split_whitespace() {
            let col: usize = tok
                .parse()
                .map_err(|_| err(format!("invalid column index {tok:?}")))?;
            if col == 0 {
                return Err(err("column indices are 1-based".into()));
            }
            if !set.insert(col - 1) {
                return Err(err(format!("column {col} repeated")));
            }
            max_col = max_col.max(col);
        }
        rows.push(set);
    }
    if rows.is_empty() {
        return Err(ConstraintError::Parse {
            line: 0,
            message: "no rows".into(),
        });
    }
    Ok((rows, max_col))
}

/// Builds a constraint from pattern text; `n` defaults to the largest column mentioned.
pub fn constraint_from_pattern(
    text: &str,
    n: Option<usize>,
) -> Result<SupportConstraint, ConstraintError> {
    let (rows, max_col) = parse_pattern(text)?;
    let k = rows.len();
    SupportConstraint::new(n.unwrap_or(max_col), k, rows)
}

pub fn write_pattern(sc: &SupportConstraint) -> String {
    let mut out = String::new();
    for z in &sc.zero_sets {
        if z.is_empty() {
            out.push('-');
        } else {
            let cols: Vec<String> = z.iter().map(|c| (c + 1).to_string()).collect();
            out.push_str(&cols.join(" "));
        }
        out.push('\n');
    }
    out
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn condition_examples() {
        let sc = SupportConstraint::from_lists(2, &[&[1], &[0]]).unwrap();
        let r = check_condition(&sc).unwrap();
        assert!(r.holds && r.equality_system);
        assert_eq!(r.k_tilde, 2);

        let sc = SupportConstraint::from_lists(2, &[&[0], &[0]]).unwrap();
        let r = check_condition(&sc).unwrap();
        assert!(!r.holds);
        assert_eq!(r.witness, Some(vec![0, 1]));
        assert_eq!(r.k_tilde, 3);
        assert_eq!(k_tilde(&sc).unwrap(), 3);

        let sc = SupportConstraint::unconstrained(5, 3).unwrap();
        let r = check_condition(&sc).unwrap();
        assert!(r.holds && !r.equality_system);
        assert_eq!(k_tilde(&sc).unwrap(), 3);
    }

    #[test]
    fn completion_examples() {
        let sc = SupportConstraint::unconstrained(2, 2).unwrap();
        let done = complete_zero_sets(&sc).unwrap();
        assert_eq!(
            done,
            SupportConstraint::from_lists(2, &[&[0], &[1]]).unwrap()
        );
        let full = SupportConstraint::from_lists(2, &[&[1], &[0]]).unwrap();
        assert_eq!(complete_zero_sets(&full).unwrap(), full);
        let bad = SupportConstraint::from_lists(2, &[&[0], &[0]]).unwrap();
        assert!(matches!(
            complete_zero_sets(&bad),
            Err(ConstraintError::ConditionViolated { .. })
        ));
    }

    fn toy_access() -> Vec<BTreeSet<usize>> {
        [[0, 1, 2], [0, 1, 3], [0, 2, 3], [1, 2, 3]]
            .iter()
            .map(|s| s.iter().copied().collect())
            .collect()
    }

    #[test]
    fn toy_zero_sets() {
        let sc = derive_zero_sets(&toy_access(), &[1, 3, 2, 3], &[6, 7, 2, 8]).unwrap();
        assert_eq!(sc.n(), 23);
        assert_eq!(sc.k(), 9);
        let z: BTreeSet<usize> = (15..23).collect();
        assert_eq!(sc.zero_sets()[0], z);
        let z: BTreeSet<usize> = (13..15).collect();
        assert_eq!(sc.zero_sets()[1], z);
        assert_eq!(sc.zero_sets()[3], z);
        assert_eq!(k_tilde(&sc).unwrap(), 9);
        assert_eq!(check_condition(&sc).unwrap().k_tilde, 9);
    }

    #[test]
    fn uncovered_message() {
        let access = vec![BTreeSet::from([0usize])];
        assert_eq!(
            derive_zero_sets(&access, &[1, 1], &[2]).unwrap_err(),
            ConstraintError::MessageUncovered { message: 1 }
        );
    }

    #[test]
    fn field_params_for_the_toy_table() {
        let p = |k, parts: &[usize]| {
            suggest_field_params(k, &OrderedPartition::new(parts.to_vec()).unwrap())
        };
        assert_eq!((p(9, &[15]).q, p(9, &[15]).m), (2, 15));
        assert_eq!((p(9, &[10, 9]).q, p(9, &[10, 9]).m), (3, 10));
        assert_eq!((p(9, &[8, 7, 8]).q, p(9, &[8, 7, 8]).m), (4, 10));
        assert_eq!((p(9, &[7, 7, 7, 6]).q, p(9, &[7, 7, 7, 6]).m), (5, 10));
        assert_eq!(p(1, &[3]).m, 3);
    }

    #[test]
    fn pattern_round_trip() {
        let text = "2\n1\n-\n";
        let sc = constraint_from_pattern(text, Some(3)).unwrap();
        assert_eq!(sc.k(), 3);
        assert_eq!(write_pattern(&sc), text);
        assert_eq!(
            parse_pattern("1\nx\n").unwrap_err(),
            ConstraintError::Parse {
                line: 2,
                message: "invalid column index \"x\"".into()
            }
        );
        assert!(matches!(
            constraint_from_pattern("4\n", Some(3)),
            Err(ConstraintError::IndexOutOfRange { .. })
        ));
    }
}
