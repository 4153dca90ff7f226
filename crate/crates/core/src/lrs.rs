//! Linearized Reed-Solomon codes.
//!
//! A code is fixed by block representatives `a_1..a_l` from distinct
//! conjugacy classes and, per block, `F_q`-independent column multipliers
//! `beta_{l,t}`. The code locators are `a_l beta_{l,t}^(q-1)` and the
//! generator matrix has entry `N_i(a_l) beta_{l,t}^(q^i)` in row `i`.

use std::fmt;

use rand::Rng;
use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::gf::{Elem, Field, FieldTower};
use crate::linalg::Matrix;
use crate::skewpoly::{SkewPoly, SkewRing};
use crate::sumrank::OrderedPartition;

/// A single broken code invariant.
#[derive(Debug, Clone, PartialEq, Eq, Error, Serialize, Deserialize)]
pub enum Violation {
    #[error("{ell} blocks exceed q - 1 = {max}")]
    TooManyBlocks { ell: usize, max: u64 },
    #[error("block {block} has length {len} > m = {m}")]
    BlockTooLong { block: usize, len: usize, m: u32 },
    #[error("{reps} representatives for {blocks} blocks")]
    RepresentativeCount { reps: usize, blocks: usize },
    #[error("multipliers given for {got} blocks, expected {blocks}")]
    MultiplierBlocks { got: usize, blocks: usize },
    #[error("block {block} has {got} multipliers, expected {expected}")]
    MultiplierCount {
        block: usize,
        expected: usize,
        got: usize,
    },
    #[error("representative of block {block} is zero")]
    ZeroRepresentative { block: usize },
    #[error("representatives of blocks {first} and {second} are conjugate")]
    ConjugateRepresentatives { first: usize, second: usize },
    #[error("multipliers of block {block} are linearly dependent over F_q")]
    DependentMultipliers { block: usize },
    #[error("dimension {k} is not in 1..={n}")]
    Dimension { k: usize, n: usize },
}

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum LrsError {
    #[error("invalid code: {}", join(.0))]
    Invalid(Vec<Violation>),
    #[error("message of length {got}, expected {expected}")]
    LengthMismatch { expected: usize, got: usize },
}

fn join(v: &[Violation]) -> String {
    v.iter()
        .map(ToString::to_string)
        .collect::<Vec<_>>()
        .join("; ")
}

/// Bijection between `(block, position)` pairs and global coordinates.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct BlockIndexMap {
    starts: Vec<usize>,
    n: usize,
}

impl BlockIndexMap {
    pub fn new(part: &OrderedPartition) -> Self {
        Self {
            starts: part.ranges().into_iter().map(|r| r.start).collect(),
            n: part.total(),
        }
    }

    pub fn to_global(&self, block: usize, pos: usize) -> usize {
        self.starts[block] + pos
    }

    pub fn to_block(&self, j: usize) -> (usize, usize) {
        assert!(j < self.n, "coordinate {j} out of range");
        let block = self.starts.partition_point(|&s| s <= j) - 1;
        (block, j - self.starts[block])
    }
}

/// Checks every code invariant and lists all violations.
pub fn validate(
    field: &FieldTower,
    part: &OrderedPartition,
    k: usize,
    reps: &[Elem],
    multipliers: &[Vec<Elem>],
) -> Vec<Violation> {
    let mut out = Vec::new();
    let ell = part.len();
    let q = field.q();
    if ell as u64 > q - 1 {
        out.push(Violation::TooManyBlocks { ell, max: q - 1 });
    }
    for (block, &len) in part.parts().iter().enumerate() {
        if len > field.m() as usize {
            out.push(Violation::BlockTooLong {
                block,
                len,
                m: field.m(),
            });
        }
    }
    if reps.len() != ell {
        out.push(Violation::RepresentativeCount {
            reps: reps.len(),
            blocks: ell,
        });
    }
    for (block, a) in reps.iter().enumerate() {
        if a.0 == 0 {
            out.push(Violation::ZeroRepresentative { block });
        }
    }
    for first in 0..reps.len() {
        for second in first + 1..reps.len() {
            if reps[first].0 != 0 && field.are_conjugate(reps[first], reps[second]) {
                out.push(Violation::ConjugateRepresentatives { first, second });
            }
        }
    }
    if multipliers.len() != ell {
        out.push(Violation::MultiplierBlocks {
            got: multipliers.len(),
            blocks: ell,
        });
    }
    for (block, (betas, &len)) in multipliers.iter().zip(part.parts()).enumerate() {
        if betas.len() != len {
            out.push(Violation::MultiplierCount {
                block,
                expected: len,
                got: betas.len(),
            });
        } else if !field.linearly_independent(betas) {
            out.push(Violation::DependentMultipliers { block });
        }
    }
    if k == 0 || k > part.total() {
        out.push(Violation::Dimension { k, n: part.total() });
    }
    out
}

/// `gamma^0, ..., gamma^(l-1)`: one representative per nonzero conjugacy class.
pub fn default_representatives(field: &FieldTower, ell: usize) -> Vec<Elem> {
    (0..ell).map(|l| field.gamma_pow(l as u64)).collect()
}

/// Block `l` (0-based) gets `gamma^l, gamma^(l+1), ..., gamma^(l+n_l-1)`.
pub fn default_multipliers(field: &FieldTower, part: &OrderedPartition) -> Vec<Vec<Elem>> {
    part.parts()
        .iter()
        .enumerate()
        .map(|(l, &len)| (0..len).map(|t| field.gamma_pow((l + t) as u64)).collect())
        .collect()
}

/// Uniform random `F_q`-independent tuple of `len` elements (rejection sampling).
pub fn sample_block_multipliers<R: Rng + ?Sized>(
    field: &FieldTower,
    len: usize,
    rng: &mut R,
) -> Vec<Elem> {
    assert!(
        len <= field.m() as usize,
        "more than m independent elements requested"
    );
    loop {
        let betas: Vec<Elem> = (0..len)
            .map(|_| Elem(rng.gen_range(0..field.size())))
            .collect();
        if field.linearly_independent(&betas) {
            return betas;
        }
    }
}

/// A validated linearized Reed-Solomon code.
#[derive(Clone, PartialEq, Eq)]
pub struct LrsCode {
    field: FieldTower,
    part: OrderedPartition,
    k: usize,
    reps: Vec<Elem>,
    multipliers: Vec<Vec<Elem>>,
}

impl fmt::Debug for LrsCode {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.debug_struct("LrsCode")
            .field("field", &self.field)
            .field("part", &self.part.parts())
            .field("k", &self.k)
            .field("reps", &self.reps)
            .field("multipliers", &self.multipliers)
            .finish()
    }
}

impl LrsCode {
    pub fn new(
        field: &FieldTower,
        part: &OrderedPartition,
        k: usize,
        reps: Vec<Elem>,
        multipliers: Vec<Vec<Elem>>,
    ) -> Result<Self, LrsError> {
        let violations = validate(field, part, k, &reps, &multipliers);
        if !violations.is_empty() {
            return Err(LrsError::Invalid(violations));
        }
        Ok(Self {
            field: field.clone(),
            part: part.clone(),
            k,
            reps,
            multipliers,
        })
    }

    /// The code with default representatives and multipliers.
    pub fn with_defaults(
        field: &FieldTower,
        part: &OrderedPartition,
        k: usize,
    ) -> Result<Self, LrsError> {
        let reps = default_representatives(field, part.len());
        Self::new(field, part, k, reps, default_multipliers(field, part))
    }

    pub fn field(&self) -> &FieldTower {
        &self.field
    }

    pub fn partition(&self) -> &OrderedPartition {
        &self.part
    }

    pub fn n(&self) -> usize {
        self.part.total()
    }

    pub fn k(&self) -> usize {
        self.k
    }

    pub fn representatives(&self) -> &[Elem] {
        &self.reps
    }

    pub fn block_multipliers(&self) -> &[Vec<Elem>] {
        &self.multipliers
    }

    /// Multipliers flattened in coordinate order.
    pub fn multipliers(&self) -> Vec<Elem> {
        self.multipliers.iter().flatten().copied().collect()
    }

    pub fn index_map(&self) -> BlockIndexMap {
        BlockIndexMap::new(&self.part)
    }

    /// `a_l beta_{l,t}^(q-1)` in coordinate order.
    pub fn locators(&self) -> Vec<Elem> {
        let f = &self.field;
        let e = u128::from(f.q() - 1);
        self.multipliers
            .iter()
            .zip(&self.reps)
            .flat_map(|(betas, &a)| betas.iter().map(move |&b| f.mul(a, f.pow(b, e))))
            .collect()
    }

    /// The `k x n` matrix with entry `N_i(a_l) beta^(q^i)`.
    pub fn generator_matrix(&self) -> Matrix<Elem> {
        let f = &self.field;
        let ring = SkewRing::new(f.clone());
        let mut g = Matrix::filled(self.k, self.n(), Elem(0));
        let map = self.index_map();
        for (l, (betas, &a)) in self.multipliers.iter().zip(&self.reps).enumerate() {
            for i in 0..self.k {
                let norm = ring.truncated_norm(a, i);
                for (t, &b) in betas.iter().enumerate() {
                    g.set(i, map.to_global(l, t), f.mul(norm, f.frobenius_pow(b, i)));
                }
            }
        }
        g
    }

    /// Codeword `beta_j f(alpha_j)` for `f = sum_i msg_i X^i`.
    pub fn encode(&self, msg: &[Elem]) -> Result<Vec<Elem>, LrsError> {
        if msg.len() != self.k {
            return Err(LrsError::LengthMismatch {
                expected: self.k,
                got: msg.len(),
            });
        }
        let f = &self.field;
        let ring = SkewRing::new(f.clone());
        let poly = SkewPoly::new(msg.to_vec());
        Ok(self
            .locators()
            .into_iter()
            .zip(self.multipliers())
            .map(|(alpha, beta)| f.mul(beta, ring.evaluate(&poly, alpha)))
            .collect())
    }

    /// The same code at another dimension.
    pub fn with_dimension(&self, k: usize) -> Result<Self, LrsError> {
        Self::new(
            &self.field,
            &self.part,
            k,
            self.reps.clone(),
            self.multipliers.clone(),
        )
    }

    /// The same representatives with new multipliers.
    pub fn with_multipliers(&self, multipliers: Vec<Vec<Elem>>) -> Result<Self, LrsError> {
        Self::new(
            &self.field,
            &self.part,
            self.k,
            self.reps.clone(),
            multipliers,
        )
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn micro() -> LrsCode {
        let f = FieldTower::new(3, 2).unwrap();
        let g = f.gamma();
        let part = OrderedPartition::new(vec![2, 2]).unwrap();
        LrsCode::new(
            &f,
            &part,
            2,
            vec![Elem(1), g],
            vec![vec![Elem(1), g], vec![Elem(1), g]],
        )
        .unwrap()
    }

    #[test]
    fn micro_locators() {
        let c = micro();
        let f = c.field();
        let g = f.gamma();
        assert_eq!(
            c.locators(),
            vec![Elem(1), f.gamma_pow(2), g, f.gamma_pow(3)]
        );
    }

    #[test]
    fn micro_generator() {
        let c = micro();
        let f = c.field();
        let g = c.generator_matrix();
        assert_eq!(g.row(0), c.multipliers().as_slice());
        assert_eq!(&g.row(1)[..2], &[Elem(1), f.gamma_pow(3)]);
        assert_eq!(g.rank(f), 2);
    }

    #[test]
    fn violations_are_reported_individually() {
        let f = FieldTower::new(3, 2).unwrap();
        let part = OrderedPartition::new(vec![2, 2]).unwrap();
        let g2 = f.gamma_pow(2);
        let v = validate(
            &f,
            &part,
            2,
            &[Elem(1), g2],
            &default_multipliers(&f, &part),
        );
        assert_eq!(
            v,
            vec![Violation::ConjugateRepresentatives {
                first: 0,
                second: 1
            }]
        );
        let three = OrderedPartition::new(vec![1, 1, 1]).unwrap();
        let v = validate(
            &f,
            &three,
            2,
            &default_representatives(&f, 3),
            &default_multipliers(&f, &three),
        );
        assert!(v.contains(&Violation::TooManyBlocks { ell: 3, max: 2 }));
        let bad = vec![vec![Elem(1), Elem(2)], vec![Elem(1), f.gamma()]];
        let v = validate(&f, &part, 5, &[Elem(1), f.gamma()], &bad);
        assert_eq!(
            v,
            vec![
                Violation::DependentMultipliers { block: 0 },
                Violation::Dimension { k: 5, n: 4 }
            ]
        );
    }

    #[test]
    fn index_map_round_trip() {
        let part = OrderedPartition::new(vec![3, 1, 2]).unwrap();
        let map = BlockIndexMap::new(&part);
        for j in 0..6 {
            let (l, t) = map.to_block(j);
            assert_eq!(map.to_global(l, t), j);
        }
        assert_eq!(map.to_block(3), (1, 0));
    }

    #[test]
    fn encode_edge_cases() {
        let c = micro();
        assert_eq!(c.encode(&[Elem(0), Elem(0)]).unwrap(), vec![Elem(0); 4]);
        assert_eq!(c.encode(&[Elem(1), Elem(0)]).unwrap(), c.multipliers());
        assert!(matches!(
            c.encode(&[Elem(1)]),
            Err(LrsError::LengthMismatch { .. })
        ));
    }
}
