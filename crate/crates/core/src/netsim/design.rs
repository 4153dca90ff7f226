//! Source lengths, field parameters and the distributed constrained code.
//!
//! For a message subset `W` let `r(W)` be its total length. Both families of
//! length constraints say that the sources meeting `W` carry enough symbols:
//! `sum_{J meets W} n_J >= r(W) + c`, with `c = 2t + rho` for the capacity
//! constraints and `c = 2 ell t + rho` for the decodability constraints.

use std::collections::BTreeSet;

use serde::{Deserialize, Serialize};

use super::{NetError, INSTANCE_GUARD};
use crate::constraints::{derive_zero_sets, k_tilde, suggest_field_params, SupportConstraint};
use crate::construct::{subcode_generator, CodeRecord, ConstrainedCode, SynthesisOptions};
use crate::gf::FieldTower;
use crate::sumrank::OrderedPartition;

/// Messages, access structure and adversary, as read from JSON.
///
/// Access sets use 1-based message indices.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct NetworkInstance {
    pub h: usize,
    pub r: Vec<usize>,
    #[serde(rename = "S")]
    pub sources: Vec<Vec<usize>>,
    pub t: usize,
    pub rho: usize,
    pub ell: usize,
}

impl NetworkInstance {
    pub fn validate(&self) -> Result<(), NetError> {
        let bad = |msg: String| Err(NetError::InvalidInstance(msg));
        if self.h == 0 {
            return bad("no messages".into());
        }
        if self.h > INSTANCE_GUARD {
            return Err(NetError::Guard {
                what: "h",
                got: self.h,
                guard: INSTANCE_GUARD,
            });
        }
        if self.sources.len() > INSTANCE_GUARD {
            return Err(NetError::Guard {
                what: "sources",
                got: self.sources.len(),
                guard: INSTANCE_GUARD,
            });
        }
        if self.sources.is_empty() {
            return bad("no sources".into());
        }
        if self.r.len() != self.h {
            return bad(format!(
                "{} message lengths for h = {}",
                self.r.len(),
                self.h
            ));
        }
        if let Some(i) = self.r.iter().position(|&x| x == 0) {
            return bad(format!("message {} has length 0", i + 1));
        }
        if self.ell == 0 {
            return bad("ell must be at least 1".into());
        }
        for (s, j) in self.sources.iter().enumerate() {
            if let Some(&g) = j.iter().find(|&&g| g == 0 || g > self.h) {
                return bad(format!(
                    "source {} lists message {g} outside 1..={}",
                    s + 1,
                    self.h
                ));
            }
        }
        if let Some(g) = (1..=self.h).find(|g| !self.sources.iter().any(|j| j.contains(g))) {
            return bad(format!("message {g} is held by no source"));
        }
        Ok(())
    }

    /// Access sets with 0-based message indices.
    pub fn access_sets(&self) -> Vec<BTreeSet<usize>> {
        self.sources
            .iter()
            .map(|j| j.iter().map(|g| g - 1).collect())
            .collect()
    }

    fn masks(&self) -> Vec<u32> {
        self.sources
            .iter()
            .map(|j| j.iter().fold(0u32, |m, g| m | (1 << (g - 1))))
            .collect()
    }

    fn weight(&self, w: u32) -> usize {
        (0..self.h)
            .filter(|i| w >> i & 1 == 1)
            .map(|i| self.r[i])
            .sum()
    }

    pub fn k(&self) -> usize {
        self.r.iter().sum()
    }

    /// `2 ell t + rho + 1`.
    pub fn distance(&self) -> usize {
        2 * self.ell * self.t + self.rho + 1
    }

    /// The same instance with another block count.
    pub fn with_ell(&self, ell: usize) -> Self {
        Self {
            ell,
            ..self.clone()
        }
    }
}

/// `w_W = n - sum of n_J over sources disjoint from W` (0-based `W`).
pub fn mincut(inst: &NetworkInstance, lengths: &[usize], w: &BTreeSet<usize>) -> usize {
    let n: usize = lengths.iter().sum();
    let disjoint: usize = inst
        .access_sets()
        .iter()
        .zip(lengths)
        .filter(|(j, _)| j.is_disjoint(w))
        .map(|(_, &nj)| nj)
        .sum();
    n - disjoint
}

/// A length constraint that a tuple fails.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct LengthViolation {
    /// `true` for the decodability family (`c = 2 ell t + rho`).
    pub decodability: bool,
    /// 0-based messages.
    pub messages: Vec<usize>,
    pub required: usize,
    pub available: usize,
}

/// Re-checks both constraint families for every nonempty message subset.
pub fn check_lengths(inst: &NetworkInstance, lengths: &[usize]) -> Vec<LengthViolation> {
    let masks = inst.masks();
    let mut out = Vec::new();
    for w in 1u32..(1 << inst.h) {
        let available: usize = masks
            .iter()
            .zip(lengths)
            .filter(|(m, _)| *m & w != 0)
            .map(|(_, &n)| n)
            .sum();
        let messages: Vec<usize> = (0..inst.h).filter(|i| w >> i & 1 == 1).collect();
        for (decodability, c) in [
            (false, 2 * inst.t + inst.rho),
            (true, 2 * inst.ell * inst.t + inst.rho),
        ] {
            let required = inst.weight(w) + c;
            if available < required {
                out.push(LengthViolation {
                    decodability,
                    messages: messages.clone(),
                    required,
                    available,
                });
            }
        }
    }
    out
}

/// Minimum total length and the lexicographically smallest optimal tuple.
///
/// Candidate totals rise from the largest single-constraint lower bound; for
/// each total a depth-first search assigns lengths in order, pruning when the
/// unassigned sources cannot cover some subset's remaining deficit.
pub fn design_lengths(inst: &NetworkInstance) -> Result<(Vec<usize>, usize), NetError> {
    inst.validate()?;
    let masks = inst.masks();
    let c = 2 * inst.ell * inst.t + inst.rho;
    let subsets: Vec<u32> = (1u32..(1 << inst.h)).collect();
    let demand: Vec<usize> = subsets
        .iter()
        .map(|&w| inst.weight(w) + c.max(2 * inst.t + inst.rho))
        .collect();
    let cap = inst.k() + c;
    let lower = *demand.iter().max().unwrap();
    let upper = cap * masks.len();
    let mut search = LengthSearch {
        masks: &masks,
        subsets: &subsets,
        cap,
        lengths: Vec::new(),
    };
    for n in lower..=upper {
        let deficit = demand.clone();
        if search.assign(0, n, deficit) {
            return Ok((search.lengths, n));
        }
    }
    // Report the first subset no assignment within the caps can serve.
    let witness = subsets
        .iter()
        .zip(&demand)
        .find(|(&w, &d)| masks.iter().filter(|&&m| m & w != 0).count() * cap < d)
        .map(|(&w, _)| (0..inst.h).filter(|i| w >> i & 1 == 1).collect())
        .unwrap_or_default();
    Err(NetError::Infeasible {
        max_n: upper,
        witness,
    })
}

struct LengthSearch<'a> {
    masks: &'a [u32],
    subsets: &'a [u32],
    cap: usize,
    lengths: Vec<usize>,
}

impl LengthSearch<'_> {
    fn assign(&mut self, idx: usize, budget: usize, deficit: Vec<usize>) -> bool {
        let s = self.masks.len();
        // Unassigned sources from idx on must be able to cover each deficit.
        for (k, &w) in self.subsets.iter().enumerate() {
            if deficit[k] == 0 {
                continue;
            }
            let helpers = self.masks[idx..].iter().filter(|&&m| m & w != 0).count();
            if helpers == 0 || deficit[k] > budget || deficit[k] > helpers * self.cap {
                return false;
            }
        }
        if idx == s {
            return budget == 0;
        }
        let hi = if idx + 1 == s {
            budget
        } else {
            budget.min(self.cap)
        };
        let lo = if idx + 1 == s { budget } else { 0 };
        if hi > self.cap {
            return false;
        }
        for v in lo..=hi {
            let next: Vec<usize> = self
                .subsets
                .iter()
                .zip(&deficit)
                .map(|(&w, &d)| {
                    if self.masks[idx] & w != 0 {
                        d.saturating_sub(v)
                    } else {
                        d
                    }
                })
                .collect();
            self.lengths.push(v);
            if self.assign(idx + 1, budget - v, next) {
                return true;
            }
            self.lengths.pop();
        }
        false
    }
}

/// Splits `n` into `ell` near-equal consecutive blocks.
///
/// Block `l` ends at `round(l n / ell)` (halves rounded up), so the longer
/// blocks are spread out rather than stacked at the front: 23 into 3 gives
/// `(8, 7, 8)`.
pub fn split_blocks(n: usize, ell: usize) -> Vec<usize> {
    let bound = |l: usize| (2 * l * n + ell) / (2 * ell);
    (1..=ell).map(|l| bound(l) - bound(l - 1)).collect()
}

/// Everything about a design except the code itself.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct DesignParameters {
    pub lengths: Vec<usize>,
    pub n: usize,
    pub k: usize,
    pub k_tilde: usize,
    pub d: usize,
    pub q: u64,
    pub m: u32,
    pub m_sharp: u32,
    pub blocks: Vec<usize>,
    /// `n + m`, the length of a lifted packet.
    pub packet_length: usize,
}

/// Lengths, zero sets, covering dimension and field sizes.
pub fn design_parameters(
    inst: &NetworkInstance,
) -> Result<(DesignParameters, SupportConstraint), NetError> {
    let (lengths, n) = design_lengths(inst)?;
    let sc = derive_zero_sets(&inst.access_sets(), &inst.r, &lengths)?;
    let kt = k_tilde(&sc)?;
    if n < inst.ell {
        return Err(NetError::InvalidInstance(format!(
            "total length {n} leaves a block empty with ell = {}",
            inst.ell
        )));
    }
    let blocks = split_blocks(n, inst.ell);
    let part = OrderedPartition::new(blocks.clone())?;
    let fp = suggest_field_params(kt, &part);
    let params = DesignParameters {
        lengths,
        n,
        k: inst.k(),
        k_tilde: kt,
        d: inst.distance(),
        q: fp.q,
        m: fp.m,
        m_sharp: fp.m_sharp,
        blocks,
        packet_length: n + fp.m as usize,
    };
    Ok((params, sc))
}

/// A complete design: parameters plus the synthesized code.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct DesignResult {
    pub instance: NetworkInstance,
    pub params: DesignParameters,
    pub seed: u64,
    /// The covering `[n, k_tilde]` code; its first `k` rows form the distributed generator.
    pub code: CodeRecord,
}

impl DesignResult {
    pub fn constrained_code(&self) -> Result<ConstrainedCode, NetError> {
        Ok(ConstrainedCode::from_record(&self.code)?)
    }
}

/// Runs the whole design pipeline and synthesizes the distributed code.
pub fn build_distributed_code(
    inst: &NetworkInstance,
    opts: SynthesisOptions,
) -> Result<DesignResult, NetError> {
    let (params, sc) = design_parameters(inst)?;
    let field = FieldTower::new(params.q, params.m)?;
    let part = OrderedPartition::new(params.blocks.clone())?;
    let sub = subcode_generator(&field, &part, &sc, opts)?;
    Ok(DesignResult {
        instance: inst.clone(),
        params,
        seed: opts.seed,
        code: sub.cover.to_record(),
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    pub(crate) fn toy(ell: usize) -> NetworkInstance {
        NetworkInstance {
            h: 4,
            r: vec![1, 3, 2, 3],
            sources: vec![vec![1, 2, 3], vec![1, 2, 4], vec![1, 3, 4], vec![2, 3, 4]],
            t: 2,
            rho: 2,
            ell,
        }
    }

    #[test]
    fn toy_lengths() {
        let (lengths, n) = design_lengths(&toy(3)).unwrap();
        assert_eq!(n, 23);
        assert!(check_lengths(&toy(3), &lengths).is_empty());
        assert!(check_lengths(&toy(3), &[6, 7, 2, 8]).is_empty());
        assert_eq!(design_lengths(&toy(1)).unwrap().1, 15);
        assert!(check_lengths(&toy(1), &[6, 1, 0, 8]).is_empty());
    }

    #[test]
    fn single_source_needs_exactly_the_messages() {
        let inst = NetworkInstance {
            h: 2,
            r: vec![2, 3],
            sources: vec![vec![1, 2]],
            t: 0,
            rho: 0,
            ell: 1,
        };
        assert_eq!(design_lengths(&inst).unwrap(), (vec![5], 5));
    }

    #[test]
    fn toy_mincut() {
        let inst = toy(3);
        let lengths = [6, 7, 2, 8];
        assert_eq!(mincut(&inst, &lengths, &BTreeSet::from([0])), 15);
        assert_eq!(mincut(&inst, &lengths, &(0..4).collect()), 23);
    }

    #[test]
    fn block_splits() {
        assert_eq!(split_blocks(23, 3), vec![8, 7, 8]);
        assert_eq!(split_blocks(19, 2), vec![10, 9]);
        assert_eq!(split_blocks(15, 1), vec![15]);
        assert_eq!(split_blocks(33, 3), vec![11, 11, 11]);
        assert_eq!(split_blocks(27, 4).iter().sum::<usize>(), 27);
    }

    #[test]
    fn invalid_instances() {
        let mut inst = toy(3);
        inst.sources = vec![vec![1, 2, 3]];
        assert!(matches!(inst.validate(), Err(NetError::InvalidInstance(_))));
        let mut inst = toy(3);
        inst.ell = 0;
        assert!(inst.validate().is_err());
    }

    #[test]
    fn json_field_names() {
        let text = r#"{"h":4, "r":[1,3,2,3], "S":[[1,2,3],[1,2,4],[1,3,4],[2,3,4]], "t":2, "rho":2, "ell":3}"#;
        let inst: NetworkInstance = serde_json::from_str(text).unwrap();
        assert_eq!(inst, toy(3));
    }
}
