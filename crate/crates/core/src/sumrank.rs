//! Sum-rank weights over ordered partitions, brute-force minimum distance and
//! a nearest-codeword decoder for micro-scale codes.

use std::ops::Range;

use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::gf::{BaseField, Elem, Field, FieldTower};
use crate::linalg::Matrix;

/// Largest codebook size `q^(m k)` enumerated by the brute-force routines.
pub const CODEWORD_GUARD: u64 = 1 << 22;

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum SumRankError {
    #[error("partition must have at least one part and all parts must be positive")]
    InvalidPartition,
    #[error("vector of length {got} does not match partition of {expected}")]
    LengthMismatch { expected: usize, got: usize },
    #[error("code with {order}^{k} codewords exceeds the enumeration guard")]
    SizeGuard { order: u64, k: usize },
    #[error("zero-dimensional code")]
    ZeroDimension,
}

/// Ordered partition `(n_1, ..., n_l)` of `n` into positive parts.
#[derive(Debug, Clone, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(try_from = "Vec<usize>", into = "Vec<usize>")]
pub struct OrderedPartition {
    parts: Vec<usize>,
}

impl TryFrom<Vec<usize>> for OrderedPartition {
    type Error = SumRankError;

    fn try_from(parts: Vec<usize>) -> Result<Self, SumRankError> {
        Self::new(parts)
    }
}

impl From<OrderedPartition> for Vec<usize> {
    fn from(p: OrderedPartition) -> Self {
        p.parts
    }
}

impl OrderedPartition {
    pub fn new(parts: Vec<usize>) -> Result<Self, SumRankError> {
        if parts.is_empty() || parts.contains(&0) {
            return Err(SumRankError::InvalidPartition);
        }
        Ok(Self { parts })
    }

    /// `n` parts of size 1 (Hamming metric).
    pub fn singletons(n: usize) -> Result<Self, SumRankError> {
        Self::new(vec![1; n])
    }

    pub fn parts(&self) -> &[usize] {
        &self.parts
    }

    /// Number of blocks.
    pub fn len(&self) -> usize {
        self.parts.len()
    }

    pub fn is_empty(&self) -> bool {
        self.parts.is_empty()
    }

    pub fn total(&self) -> usize {
        self.parts.iter().sum()
    }

    /// Index ranges of the blocks.
    pub fn ranges(&self) -> Vec<Range<usize>> {
        let mut start = 0;
        self.parts
            .iter()
            .map(|&p| {
                let r = start..start + p;
                start += p;
                r
            })
            .collect()
    }

    /// Partition with `removed` positions deleted; empty blocks disappear.
    pub fn puncture(&self, removed: &[usize]) -> Result<Self, SumRankError> {
        let parts = self
            .ranges()
            .into_iter()
            .map(|r| r.filter(|j| !removed.contains(j)).count())
            .filter(|&c| c > 0)
            .collect();
        Self::new(parts)
    }
}

fn check_len(x_len: usize, part: &OrderedPartition) -> Result<(), SumRankError> {
    if x_len != part.total() {
        return Err(SumRankError::LengthMismatch {
            expected: part.total(),
            got: x_len,
        });
    }
    Ok(())
}

/// `sum_l rank_q(x restricted to block l)`.
pub fn sum_rank_weight(
    field: &FieldTower,
    x: &[Elem],
    part: &OrderedPartition,
) -> Result<usize, SumRankError> {
    check_len(x.len(), part)?;
    Ok(part.ranges().into_iter().map(|r| field.rank_q(&x[r])).sum())
}

pub fn hamming_weight(x: &[Elem]) -> usize {
    x.iter().filter(|a| a.0 != 0).count()
}

pub fn rank_weight(field: &FieldTower, x: &[Elem]) -> usize {
    field.rank_q(x)
}

/// Which dimension of a matrix the partition splits.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Orientation {
    ColumnWise,
    RowWise,
}

/// Sum of the ranks of the blocks of a matrix over `F_q`.
pub fn sum_rank_weight_matrix(
    base: &BaseField,
    m: &Matrix<u32>,
    part: &OrderedPartition,
    orientation: Orientation,
) -> Result<usize, SumRankError> {
    let split = match orientation {
        Orientation::ColumnWise => m.cols(),
        Orientation::RowWise => m.rows(),
    };
    check_len(split, part)?;
    Ok(part
        .ranges()
        .into_iter()
        .map(|r| {
            let idx: Vec<usize> = r.collect();
            let block = match orientation {
                Orientation::ColumnWise => m.select_columns(&idx),
                Orientation::RowWise => m.select_rows(&idx),
            };
            block.rank(base)
        })
        .sum())
}

fn codebook_guard(field: &FieldTower, k: usize) -> Result<(), SumRankError> {
    let order = field.size();
    if k == 0 {
        return Err(SumRankError::ZeroDimension);
    }
    match order.checked_pow(k as u32) {
        Some(n) if n <= CODEWORD_GUARD => Ok(()),
        _ => Err(SumRankError::SizeGuard { order, k }),
    }
}

/// The message with canonical index `idx`: base-`|F|` digits, least significant first.
fn message(field: &FieldTower, k: usize, mut idx: u64) -> Vec<Elem> {
    let order = field.size();
    (0..k)
        .map(|_| {
            let d = idx % order;
            idx /= order;
            Elem(d)
        })
        .collect()
}

/// Minimum sum-rank weight over the nonzero codewords of the row space of `g`.
///
/// Only messages whose last nonzero entry is 1 are visited: scaling by a
/// nonzero scalar is an `F_q`-linear bijection on every block, so it leaves the
/// weight unchanged. Visits follow canonical message order and stop at weight 1.
pub fn min_distance_bruteforce(
    field: &FieldTower,
    g: &Matrix<Elem>,
    part: &OrderedPartition,
) -> Result<usize, SumRankError> {
    let k = g.rows();
    codebook_guard(field, k)?;
    check_len(g.cols(), part)?;
    let total = field.size().pow(k as u32);
    let mut best = usize::MAX;
    for idx in 1..total {
        let msg = message(field, k, idx);
        if msg.iter().rev().find(|a| a.0 != 0) != Some(&Elem(1)) {
            continue;
        }
        let c = g.left_mul_vec(field, &msg);
        let w = sum_rank_weight(field, &c, part)?;
        best = best.min(w);
        if best <= 1 {
            break;
        }
    }
    Ok(best)
}

/// Result of a brute-force decoding attempt.
#[derive(Debug, Clone, PartialEq, Eq)]
pub enum DecodeOutcome {
    Decoded {
        message: Vec<Elem>,
        distance: usize,
    },
    NoCodewordInRadius,
    /// More than one codeword lies within the radius.
    Ambiguous {
        candidates: usize,
    },
}

/// Exhaustive nearest-codeword decoder within the unique-decoding radius.
#[derive(Debug, Clone)]
pub struct BruteForceDecoder {
    field: FieldTower,
    generator: Matrix<Elem>,
    part: OrderedPartition,
    distance: usize,
}

impl BruteForceDecoder {
    pub fn new(
        field: &FieldTower,
        generator: &Matrix<Elem>,
        part: &OrderedPartition,
    ) -> Result<Self, SumRankError> {
        let distance = min_distance_bruteforce(field, generator, part)?;
        Ok(Self {
            field: field.clone(),
            generator: generator.clone(),
            part: part.clone(),
            distance,
        })
    }

    pub fn distance(&self) -> usize {
        self.distance
    }

    /// `floor((d - 1) / 2)`.
    pub fn radius(&self) -> usize {
        (self.distance - 1) / 2
    }

    pub fn decode(&self, y: &[Elem]) -> Result<DecodeOutcome, SumRankError> {
        self.decode_within(y, self.radius())
    }

    /// Lists every codeword within `radius` of `y`; unique means decoded.
    pub fn decode_within(&self, y: &[Elem], radius: usize) -> Result<DecodeOutcome, SumRankError> {
        check_len(y.len(), &self.part)?;
        let f = &self.field;
        let k = self.generator.rows();
        let total = f.size().pow(k as u32);
        let mut found: Option<(Vec<Elem>, usize)> = None;
        let mut count = 0;
        for idx in 0..total {
            let msg = message(f, k, idx);
            let c = self.generator.left_mul_vec(f, &msg);
            let diff: Vec<Elem> = y.iter().zip(&c).map(|(&a, &b)| f.sub(a, b)).collect();
            let w = sum_rank_weight(f, &diff, &self.part)?;
            if w <= radius {
                count += 1;
                found.get_or_insert((msg, w));
            }
        }
        Ok(match (count, found) {
            (1, Some((message, distance))) => DecodeOutcome::Decoded { message, distance },
            (0, _) => DecodeOutcome::NoCodewordInRadius,
            (candidates, _) => DecodeOutcome::Ambiguous { candidates },
        })
    }

    /// Decodes after deleting the erased positions from the code and from `y`.
    ///
    /// The punctured code's distance is recomputed, so the radius reflects
    /// what survives the erasures.
    pub fn decode_with_erasures(
        &self,
        y: &[Elem],
        erased: &[usize],
    ) -> Result<DecodeOutcome, SumRankError> {
        check_len(y.len(), &self.part)?;
        let keep: Vec<usize> = (0..y.len()).filter(|j| !erased.contains(j)).collect();
        let part = self.part.puncture(erased)?;
        let g = self.generator.select_columns(&keep);
        let y: Vec<Elem> = keep.iter().map(|&j| y[j]).collect();
        let inner = BruteForceDecoder::new(&self.field, &g, &part)?;
        inner.decode(&y)
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn f9() -> FieldTower {
        FieldTower::new(3, 2).unwrap()
    }

    #[test]
    fn weights_specialise_to_hamming_and_rank() {
        let f = f9();
        let x = vec![Elem(1), Elem(0), Elem(2), Elem(3)];
        assert_eq!(
            sum_rank_weight(&f, &x, &OrderedPartition::singletons(4).unwrap()).unwrap(),
            3
        );
        let whole = OrderedPartition::new(vec![4]).unwrap();
        assert_eq!(sum_rank_weight(&f, &x, &whole).unwrap(), 2);
        assert_eq!(sum_rank_weight(&f, &[Elem(0); 4], &whole).unwrap(), 0);
        assert!(matches!(
            sum_rank_weight(&f, &x[..3], &whole),
            Err(SumRankError::LengthMismatch { .. })
        ));
    }

    #[test]
    fn matrix_weight() {
        let f = BaseField::new(3, 1).unwrap();
        let id = Matrix::identity(&f, 4);
        let part = OrderedPartition::new(vec![1, 3]).unwrap();
        assert_eq!(
            sum_rank_weight_matrix(&f, &id, &part, Orientation::ColumnWise).unwrap(),
            4
        );
        assert_eq!(
            sum_rank_weight_matrix(&f, &id, &part, Orientation::RowWise).unwrap(),
            4
        );
        let ones = Matrix::filled(4, 4, 1u32);
        let w = sum_rank_weight_matrix(&f, &ones, &part, Orientation::ColumnWise).unwrap();
        assert_eq!(w, 2);
    }

    #[test]
    fn identity_code_has_distance_one() {
        let f = f9();
        let g = Matrix::identity(&f, 2);
        let part = OrderedPartition::new(vec![1, 1]).unwrap();
        assert_eq!(min_distance_bruteforce(&f, &g, &part).unwrap(), 1);
    }

    #[test]
    fn puncturing_drops_empty_blocks() {
        let part = OrderedPartition::new(vec![2, 1, 2]).unwrap();
        assert_eq!(part.puncture(&[2]).unwrap().parts(), &[2, 2]);
        assert_eq!(part.puncture(&[0, 3]).unwrap().parts(), &[1, 1, 1]);
    }

    #[test]
    fn partition_validation() {
        assert!(OrderedPartition::new(vec![]).is_err());
        assert!(OrderedPartition::new(vec![1, 0]).is_err());
        let p: Result<OrderedPartition, _> = serde_json::from_str("[2, 0]");
        assert!(p.is_err());
    }
}
