//! Synthesis of LRS generator matrices with prescribed zeros.
//!
//! With zero sets completed to size `k - 1`, row `i` of the transform `T` holds
//! the coefficients of the monic minimal polynomial of the locators indexed by
//! `Z_i`. Then `G = T * G_LRS` vanishes exactly on `Z_i` in row `i` and spans
//! the same LRS code whenever `T` is invertible.

use std::collections::BTreeSet;
use std::fmt;

use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::constraints::{
    check_condition, complete_zero_sets, k_tilde, ConstraintError, SupportConstraint,
};
use crate::gf::{Elem, FieldError, FieldSpec, FieldTower};
use crate::linalg::Matrix;
use crate::lrs::{
    default_multipliers, default_representatives, sample_block_multipliers, LrsCode, LrsError,
};
use crate::skewpoly::{Degree, SkewError, SkewPoly, SkewRing};
use crate::sumrank::{OrderedPartition, SumRankError};

/// Default number of multiplier assignments tried by [`synthesize`].
pub const DEFAULT_BUDGET: usize = 64;

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum ConstructError {
    #[error(transparent)]
    Constraint(#[from] ConstraintError),
    #[error(transparent)]
    Lrs(#[from] LrsError),
    #[error(transparent)]
    Skew(#[from] SkewError),
    #[error(transparent)]
    Field(#[from] FieldError),
    #[error(transparent)]
    SumRank(#[from] SumRankError),
    #[error("no valid multipliers after {attempts} attempts; last failure: {reason}")]
    BudgetExhausted { attempts: usize, reason: String },
    #[error("covering dimension {k_tilde} exceeds the length {n}")]
    Infeasible { k_tilde: usize, n: usize },
    #[error("zero set of row {row} has {size} columns, expected {expected}")]
    IncompleteZeroSet {
        row: usize,
        size: usize,
        expected: usize,
    },
    #[error("minimal polynomial of row {row} has degree {degree}, expected {expected}")]
    DependentLocators {
        row: usize,
        degree: Degree,
        expected: usize,
    },
    #[error("constraint row {row}: shift {tau} plus {zeros} zeros exceeds k - 1 = {limit}")]
    ShiftTooLarge {
        row: usize,
        tau: usize,
        zeros: usize,
        limit: usize,
    },
    #[error("serialized code is malformed: {0}")]
    Malformed(String),
}

/// Budget and seed for the multiplier search.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct SynthesisOptions {
    pub budget: usize,
    pub seed: u64,
}

impl Default for SynthesisOptions {
    fn default() -> Self {
        Self {
            budget: DEFAULT_BUDGET,
            seed: 0,
        }
    }
}

/// An LRS code together with a generator matrix meeting a support constraint.
#[derive(Clone, PartialEq, Eq)]
pub struct ConstrainedCode {
    pub code: LrsCode,
    /// Completed constraint (every zero set has `k - 1` columns).
    pub constraint: SupportConstraint,
    pub t: Matrix<Elem>,
    pub g: Matrix<Elem>,
    /// Number of multiplier assignments tried, including the accepted one.
    pub attempts: usize,
}

impl fmt::Debug for ConstrainedCode {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.debug_struct("ConstrainedCode")
            .field("code", &self.code)
            .field("attempts", &self.attempts)
            .finish_non_exhaustive()
    }
}

/// Where a generator entry disagrees with the constraint.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub enum MismatchKind {
    /// Prescribed zero that is nonzero.
    MissingZero,
    /// Zero outside the prescribed set.
    SpuriousZero,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub struct Mismatch {
    pub row: usize,
    pub col: usize,
    pub kind: MismatchKind,
}

/// Every entry where `G_ij = 0` disagrees with `j in Z_i`.
pub fn verify_support(g: &Matrix<Elem>, sc: &SupportConstraint) -> Vec<Mismatch> {
    let mut out = Vec::new();
    for row in 0..g.rows() {
        for col in 0..g.cols() {
            let zero = g.get(row, col) == Elem(0);
            match (sc.is_zero(row, col), zero) {
                (true, false) => out.push(Mismatch {
                    row,
                    col,
                    kind: MismatchKind::MissingZero,
                }),
                (false, true) => out.push(Mismatch {
                    row,
                    col,
                    kind: MismatchKind::SpuriousZero,
                }),
                _ => {}
            }
        }
    }
    out
}

/// Minimal polynomials of the locator subsets indexed by the zero sets, as rows of `T`.
pub fn build_t(code: &LrsCode, sc: &SupportConstraint) -> Result<Matrix<Elem>, ConstructError> {
    let k = code.k();
    let ring = SkewRing::new(code.field().clone());
    let locators = code.locators();
    let mut t = Matrix::filled(k, k, Elem(0));
    for (row, z) in sc.zero_sets().iter().enumerate() {
        if z.len() != k - 1 {
            return Err(ConstructError::IncompleteZeroSet {
                row,
                size: z.len(),
                expected: k - 1,
            });
        }
        let points: Vec<Elem> = z.iter().map(|&j| locators[j]).collect();
        let f = ring.minimal_polynomial(&points);
        if f.degree() != Degree::Finite(k - 1) {
            return Err(ConstructError::DependentLocators {
                row,
                degree: f.degree(),
                expected: k - 1,
            });
        }
        for (c, &v) in f.coeffs().iter().enumerate() {
            t.set(row, c, v);
        }
    }
    Ok(t)
}

fn try_assignment(
    code: &LrsCode,
    sc: &SupportConstraint,
) -> Result<(Matrix<Elem>, Matrix<Elem>), String> {
    let t = build_t(code, sc).map_err(|e| e.to_string())?;
    let field = code.field();
    if t.det(field) == Elem(0) {
        return Err("T is singular".into());
    }
    let g = t.mul(field, &code.generator_matrix());
    let mismatches = verify_support(&g, sc);
    if let Some(m) = mismatches.first() {
        return Err(format!(
            "{} support mismatches, first {:?} at ({}, {})",
            mismatches.len(),
            m.kind,
            m.row + 1,
            m.col + 1
        ));
    }
    Ok((t, g))
}

/// Searches multipliers until `T` is invertible and `G` has exactly the prescribed zeros.
///
/// Attempt 0 uses the default multipliers, later attempts draw uniform
/// independent tuples per block from a ChaCha8 stream seeded with `opts.seed`.
pub fn synthesize(
    field: &FieldTower,
    part: &OrderedPartition,
    k: usize,
    sc: &SupportConstraint,
    opts: SynthesisOptions,
) -> Result<ConstrainedCode, ConstructError> {
    if sc.k() != k {
        return Err(ConstraintError::CountMismatch { k, got: sc.k() }.into());
    }
    let report = check_condition(sc)?;
    if let Some(witness) = report.witness {
        return Err(ConstraintError::ConditionViolated { witness }.into());
    }
    let completed = complete_zero_sets(sc)?;
    let reps = default_representatives(field, part.len());
    let base = LrsCode::new(field, part, k, reps, default_multipliers(field, part))?;
    let mut rng = ChaCha8Rng::seed_from_u64(opts.seed);
    let mut reason = String::from("zero budget");
    for attempt in 0..opts.budget {
        let code = if attempt == 0 {
            base.clone()
        } else {
            let betas = part
                .parts()
                .iter()
                .map(|&len| sample_block_multipliers(field, len, &mut rng))
                .collect();
            base.with_multipliers(betas)?
        };
        match try_assignment(&code, &completed) {
            Ok((t, g)) => {
                return Ok(ConstrainedCode {
                    code,
                    constraint: completed,
                    t,
                    g,
                    attempts: attempt + 1,
                })
            }
            Err(why) => reason = why,
        }
    }
    Err(ConstructError::BudgetExhausted {
        attempts: opts.budget,
        reason,
    })
}

/// First `k` rows of a constrained `[n, k_tilde]` code, for constraints the
/// `[n, k]` code cannot meet.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Subcode {
    /// The covering code of dimension `k_tilde`.
    pub cover: ConstrainedCode,
    pub k: usize,
    /// The `k x n` generator.
    pub generator: Matrix<Elem>,
}

impl Subcode {
    pub fn k_tilde(&self) -> usize {
        self.cover.code.k()
    }
}

/// Pads the constraint with `k_tilde - k` empty rows, synthesizes the covering
/// code and keeps the first `k` rows. Reduces to [`synthesize`] when `k_tilde = k`.
pub fn subcode_generator(
    field: &FieldTower,
    part: &OrderedPartition,
    sc: &SupportConstraint,
    opts: SynthesisOptions,
) -> Result<Subcode, ConstructError> {
    let k = sc.k();
    let kt = k_tilde(sc)?;
    if kt > sc.n() {
        return Err(ConstructError::Infeasible {
            k_tilde: kt,
            n: sc.n(),
        });
    }
    let cover = synthesize(field, part, kt, &sc.padded(kt - k), opts)?;
    let rows: Vec<usize> = (0..k).collect();
    let generator = cover.g.select_rows(&rows);
    Ok(Subcode {
        cover,
        k,
        generator,
    })
}

/// Rank of the matrix stacking `S_{(k - tau_i - |Z_i|) x k}(X^tau_i f_{Z_i})`.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct RankReport {
    pub rank: usize,
    pub rows: usize,
    pub full_row_rank: bool,
}

/// Stacks the skew multiplication matrices of `X^tau_i * f_{Z_i}` and computes the rank.
///
/// `f_Z` is the minimal polynomial of the code locators indexed by `Z`.
pub fn constraint_matrix_rank(
    code: &LrsCode,
    rows: &[(BTreeSet<usize>, usize)],
) -> Result<RankReport, ConstructError> {
    let m = constraint_matrix(code, rows)?;
    let rank = m.rank(code.field());
    Ok(RankReport {
        rank,
        rows: m.rows(),
        full_row_rank: rank == m.rows(),
    })
}

pub fn constraint_matrix(
    code: &LrsCode,
    rows: &[(BTreeSet<usize>, usize)],
) -> Result<Matrix<Elem>, ConstructError> {
    let k = code.k();
    let ring = SkewRing::new(code.field().clone());
    let locators = code.locators();
    let mut out = Matrix::empty(k);
    for (row, (z, tau)) in rows.iter().enumerate() {
        if tau + z.len() > k - 1 {
            return Err(ConstructError::ShiftTooLarge {
                row,
                tau: *tau,
                zeros: z.len(),
                limit: k - 1,
            });
        }
        let points: Vec<Elem> = z.iter().map(|&j| locators[j]).collect();
        let u = ring.shift(*tau, &ring.minimal_polynomial(&points));
        let block = ring.skew_mult_matrix(&u, k - tau - z.len(), k)?;
        out = out.vstack(&block);
    }
    Ok(out)
}

/// Serializable form of a [`ConstrainedCode`], reproducible bit for bit.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct CodeRecord {
    pub field: FieldSpec,
    pub partition: OrderedPartition,
    pub k: usize,
    pub representatives: Vec<Elem>,
    pub multipliers: Vec<Vec<Elem>>,
    /// Completed zero sets, 1-based columns.
    pub zero_sets: Vec<Vec<usize>>,
    pub t: Vec<Vec<Elem>>,
    pub g: Vec<Vec<Elem>>,
    pub attempts: usize,
}

impl ConstrainedCode {
    pub fn to_record(&self) -> CodeRecord {
        CodeRecord {
            field: self.code.field().spec(),
            partition: self.code.partition().clone(),
            k: self.code.k(),
            representatives: self.code.representatives().to_vec(),
            multipliers: self.code.block_multipliers().to_vec(),
            zero_sets: self
                .constraint
                .zero_sets()
                .iter()
                .map(|z| z.iter().map(|c| c + 1).collect())
                .collect(),
            t: self.t.to_rows(),
            g: self.g.to_rows(),
            attempts: self.attempts,
        }
    }

    /// Rebuilds the code from a record and checks that `T` and `G` recompute exactly.
    pub fn from_record(rec: &CodeRecord) -> Result<Self, ConstructError> {
        let field = FieldTower::from_spec(&rec.field)?;
        let code = LrsCode::new(
            &field,
            &rec.partition,
            rec.k,
            rec.representatives.clone(),
            rec.multipliers.clone(),
        )?;
        let sets = rec
            .zero_sets
            .iter()
            .map(|z| {
                z.iter()
                    .map(|&c| {
                        c.checked_sub(1)
                            .ok_or_else(|| ConstructError::Malformed("column index 0".into()))
                    })
                    .collect::<Result<BTreeSet<usize>, _>>()
            })
            .collect::<Result<Vec<_>, _>>()?;
        let constraint = SupportConstraint::new(code.n(), rec.k, sets)?;
        let t = build_t(&code, &constraint)?;
        let g = t.mul(&field, &code.generator_matrix());
        if t.to_rows() != rec.t {
            return Err(ConstructError::Malformed(
                "T does not match the recomputed transform".into(),
            ));
        }
        if g.to_rows() != rec.g {
            return Err(ConstructError::Malformed(
                "G does not match T times the LRS generator".into(),
            ));
        }
        Ok(Self {
            code,
            constraint,
            t,
            g,
            attempts: rec.attempts,
        })
    }

    /// CSV blocks: each section starts with `# name`, followed by comma-separated rows.
    pub fn to_csv(&self) -> String {
        let rec = self.to_record();
        let mut out = String::new();
        let f = &rec.field;
        let join = |v: &[u64]| v.iter().map(u64::to_string).collect::<Vec<_>>().join(",");
        let elems = |v: &[Elem]| {
            v.iter()
                .map(|e| e.0.to_string())
                .collect::<Vec<_>>()
                .join(",")
        };
        out.push_str(&format!("# field p={},e={},m={}\n", f.p, f.e, f.m));
        out.push_str(&format!(
            "{}\n{}\n",
            join(&f.base_modulus),
            join(&f.top_modulus)
        ));
        let parts: Vec<u64> = rec.partition.parts().iter().map(|&p| p as u64).collect();
        out.push_str(&format!("# partition\n{}\n", join(&parts)));
        out.push_str(&format!("# k\n{}\n", rec.k));
        out.push_str(&format!("# attempts\n{}\n", rec.attempts));
        out.push_str(&format!(
            "# representatives\n{}\n",
            elems(&rec.representatives)
        ));
        out.push_str("# multipliers\n");
        for b in &rec.multipliers {
            out.push_str(&format!("{}\n", elems(b)));
        }
        out.push_str("# zero_sets\n");
        for z in &rec.zero_sets {
            if z.is_empty() {
                out.push_str("-\n");
            } else {
                let z: Vec<u64> = z.iter().map(|&c| c as u64).collect();
                out.push_str(&format!("{}\n", join(&z)));
            }
        }
        out.push_str("# T\n");
        for r in &rec.t {
            out.push_str(&format!("{}\n", elems(r)));
        }
        out.push_str("# G\n");
        for r in &rec.g {
            out.push_str(&format!("{}\n", elems(r)));
        }
        out
    }

    pub fn from_csv(text: &str) -> Result<Self, ConstructError> {
        let mut sections: Vec<(String, Vec<Vec<u64>>)> = Vec::new();
        for (idx, line) in text.lines().enumerate() {
            let line = line.trim();
            if line.is_empty() {
                continue;
            }
            if let Some(name) = line.strip_prefix('#') {
                sections.push((name.trim().to_string(), Vec::new()));
                continue;
            }
            let Some((_, rows)) = sections.last_mut() else {
                return Err(ConstructError::Malformed(format!(
                    "line {}: data before the first section",
                    idx + 1
                )));
            };
            if line == "-" {
                rows.push(Vec::new());
                continue;
            }
            let row = line
                .split(',')
                .map(|t| t.trim().parse::<u64>())
                .collect::<Result<Vec<_>, _>>()
                .map_err(|e| ConstructError::Malformed(format!("line {}: {e}", idx + 1)))?;
            rows.push(row);
        }
        let find = |prefix: &str| {
            sections
                .iter()
                .find(|(name, _)| name.split_whitespace().next() == Some(prefix))
                .ok_or_else(|| ConstructError::Malformed(format!("missing section {prefix}")))
        };
        let (header, moduli) = find("field")?;
        let mut pem = [0u64; 3];
        for (slot, key) in pem.iter_mut().zip(["p=", "e=", "m="]) {
            *slot = header
                .split(|c: char| c == ',' || c.is_whitespace())
                .find_map(|t| t.strip_prefix(key))
                .and_then(|v| v.parse().ok())
                .ok_or_else(|| ConstructError::Malformed(format!("field header lacks {key}")))?;
        }
        if moduli.len() != 2 {
            return Err(ConstructError::Malformed(
                "field section needs two moduli rows".into(),
            ));
        }
        let single = |name: &str| -> Result<u64, ConstructError> {
            find(name)?
                .1
                .first()
                .and_then(|r| r.first())
                .copied()
                .ok_or_else(|| ConstructError::Malformed(format!("empty section {name}")))
        };
        let to_elems = |rows: &[Vec<u64>]| {
            rows.iter()
                .map(|r| r.iter().map(|&v| Elem(v)).collect())
                .collect()
        };
        let parts = find("partition")?.1.first().cloned().unwrap_or_default();
        let rec = CodeRecord {
            field: FieldSpec {
                p: pem[0],
                e: pem[1] as u32,
                m: pem[2] as u32,
                base_modulus: moduli[0].clone(),
                top_modulus: moduli[1].clone(),
            },
            partition: OrderedPartition::new(parts.iter().map(|&p| p as usize).collect())?,
            k: single("k")? as usize,
            representatives: find("representatives")?
                .1
                .first()
                .map(|r| r.iter().map(|&v| Elem(v)).collect())
                .unwrap_or_default(),
            multipliers: to_elems(&find("multipliers")?.1),
            zero_sets: find("zero_sets")?
                .1
                .iter()
                .map(|r| r.iter().map(|&c| c as usize).collect())
                .collect(),
            t: to_elems(&find("T")?.1),
            g: to_elems(&find("G")?.1),
            attempts: single("attempts")? as usize,
        };
        Self::from_record(&rec)
    }
}

/// The coefficient row of a skew polynomial padded to `len`.
pub fn coefficient_row(f: &SkewPoly, len: usize) -> Vec<Elem> {
    (0..len).map(|i| f.coeff(i)).collect()
}
