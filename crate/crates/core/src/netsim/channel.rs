//! Adversarial linear network: `Y = A X + E` over `F_q`.
//!
//! `A = R D` drops at most `rho` of the `n` injected packets and mixes the
//! rest into `N` received packets; `E = U V` adds an error of rank at most
//! `t`. Codewords enter the network as lifted packets `(I | C^T)`.

use rand::seq::index::sample;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

use super::NetError;
use crate::gf::{BaseField, Elem, Field, FieldTower};
use crate::linalg::Matrix;
use crate::sumrank::{
    sum_rank_weight_matrix, BruteForceDecoder, DecodeOutcome, OrderedPartition, Orientation,
};

/// One draw of the network.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct ChannelRealization {
    /// `N x n` transfer matrix.
    pub a: Matrix<u32>,
    /// `N x M` error matrix.
    pub e: Matrix<u32>,
    /// Packets dropped by `D`.
    pub dropped: Vec<usize>,
    /// Inner dimension of `U V`.
    pub error_dim: usize,
}

fn random_matrix<R: Rng + ?Sized>(
    base: &BaseField,
    rows: usize,
    cols: usize,
    rng: &mut R,
) -> Matrix<u32> {
    let q = base.order() as u32;
    let mut out = Matrix::filled(rows, cols, 0u32);
    for i in 0..rows {
        for j in 0..cols {
            out.set(i, j, rng.gen_range(0..q));
        }
    }
    out
}

/// Samples `A` and `E` for `n` injected packets of length `big_m`, received as `big_n` packets.
///
/// The number of dropped packets is uniform on the values that keep
/// `rank A = n - dropped <= N`, capped at `rho`; the error dimension is
/// uniform on `0..=t`.
pub fn sample_channel<R: Rng + ?Sized>(
    base: &BaseField,
    n: usize,
    big_n: usize,
    big_m: usize,
    t: usize,
    rho: usize,
    rng: &mut R,
) -> Result<ChannelRealization, NetError> {
    if big_n + rho < n || rho > n {
        return Err(NetError::ChannelShape { n, big_n, rho });
    }
    let min_drop = n.saturating_sub(big_n);
    let drop = rng.gen_range(min_drop..=rho);
    let mut dropped = sample(rng, n, drop).into_vec();
    dropped.sort_unstable();
    let kept: Vec<usize> = (0..n).filter(|j| !dropped.contains(j)).collect();
    let r = loop {
        let r = random_matrix(base, big_n, kept.len(), rng);
        if r.rank(base) == kept.len() {
            break r;
        }
    };
    let mut a = Matrix::zeros(base, big_n, n);
    for (c, &j) in kept.iter().enumerate() {
        for i in 0..big_n {
            a.set(i, j, r.get(i, c));
        }
    }
    let error_dim = rng.gen_range(0..=t);
    let e = if error_dim == 0 {
        Matrix::zeros(base, big_n, big_m)
    } else {
        let u = random_matrix(base, big_n, error_dim, rng);
        let v = random_matrix(base, error_dim, big_m, rng);
        u.mul(base, &v)
    };
    Ok(ChannelRealization {
        a,
        e,
        dropped,
        error_dim,
    })
}

/// `Y = A X + E`.
pub fn transmit(
    base: &BaseField,
    ch: &ChannelRealization,
    x: &Matrix<u32>,
) -> Result<Matrix<u32>, NetError> {
    if x.rows() != ch.a.cols() || x.cols() != ch.e.cols() {
        return Err(NetError::Shape(format!(
            "X is {}x{}, channel expects {}x{}",
            x.rows(),
            x.cols(),
            ch.a.cols(),
            ch.e.cols()
        )));
    }
    Ok(ch.a.mul(base, x).add(base, &ch.e))
}

/// Lifted packets `(I_n | C^T)` for a codeword `c` of length `n` over `F_{q^m}`.
///
/// Source `J` injects the rows indexed by its own columns, which is its
/// block `(0 ... I ... 0 | C_J^T)`.
pub fn lift(field: &FieldTower, c: &[Elem]) -> Matrix<u32> {
    let base = field.base();
    Matrix::identity(base, c.len()).hstack(&field.expand(c).transpose())
}

/// Partitions and adversary bounds for a weight audit.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct AuditParams {
    /// Splits the `N` received packets.
    pub rows: OrderedPartition,
    /// Splits the `n` code coordinates.
    pub cols: OrderedPartition,
    /// Extra packet length beyond `n`.
    pub m: usize,
    pub t: usize,
    pub rho: usize,
}

impl AuditParams {
    pub fn n(&self) -> usize {
        self.cols.total()
    }

    pub fn big_n(&self) -> usize {
        self.rows.total()
    }

    pub fn big_m(&self) -> usize {
        self.n() + self.m
    }

    pub fn ell(&self) -> usize {
        self.rows.len()
    }
}

/// Ranks and sum-rank weights of one realization.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub struct AuditReport {
    pub rank_a: usize,
    /// Column-wise over the code blocks.
    pub weight_a: usize,
    pub rank_e: usize,
    /// Row-wise over the received blocks.
    pub weight_e: usize,
    /// `weight_a >= rank_a >= n - rho`.
    pub erasure_ok: bool,
    /// `rank_e <= t` and `weight_e <= ell t`.
    pub error_ok: bool,
}

pub fn audit_weights(
    base: &BaseField,
    ch: &ChannelRealization,
    params: &AuditParams,
) -> Result<AuditReport, NetError> {
    let rank_a = ch.a.rank(base);
    let weight_a = sum_rank_weight_matrix(base, &ch.a, &params.cols, Orientation::ColumnWise)?;
    let rank_e = ch.e.rank(base);
    let weight_e = sum_rank_weight_matrix(base, &ch.e, &params.rows, Orientation::RowWise)?;
    Ok(AuditReport {
        rank_a,
        weight_a,
        rank_e,
        weight_e,
        erasure_ok: weight_a >= rank_a && rank_a + params.rho >= params.n(),
        error_ok: rank_e <= params.t && weight_e <= params.ell() * params.t,
    })
}

/// Aggregate of many independent realizations.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct MonteCarloReport {
    pub trials: usize,
    pub erasure_ok: usize,
    pub error_ok: usize,
    /// Trials with `rank E = t`.
    pub full_rank_errors: usize,
    /// Among those, trials with `wt_SR(E) = ell t`.
    pub full_weight_errors: usize,
    /// `full_weight_errors / full_rank_errors`, or 0 when nothing was conditioned on.
    pub full_weight_probability: f64,
}

/// The generator for trial `i`: stream `i` of the ChaCha8 generator seeded by `root`.
pub fn trial_rng(root: u64, i: u64) -> ChaCha8Rng {
    let mut rng = ChaCha8Rng::seed_from_u64(root);
    rng.set_stream(i);
    rng
}

pub fn monte_carlo_audit(
    base: &BaseField,
    params: &AuditParams,
    trials: usize,
    root_seed: u64,
) -> Result<MonteCarloReport, NetError> {
    let mut rep = MonteCarloReport {
        trials,
        erasure_ok: 0,
        error_ok: 0,
        full_rank_errors: 0,
        full_weight_errors: 0,
        full_weight_probability: 0.0,
    };
    for i in 0..trials {
        let mut rng = trial_rng(root_seed, i as u64);
        let ch = sample_channel(
            base,
            params.n(),
            params.big_n(),
            params.big_m(),
            params.t,
            params.rho,
            &mut rng,
        )?;
        let a = audit_weights(base, &ch, params)?;
        rep.erasure_ok += a.erasure_ok as usize;
        rep.error_ok += a.error_ok as usize;
        if params.t > 0 && a.rank_e == params.t {
            rep.full_rank_errors += 1;
            rep.full_weight_errors += (a.weight_e == params.ell() * params.t) as usize;
        }
    }
    if rep.full_rank_errors > 0 {
        rep.full_weight_probability = rep.full_weight_errors as f64 / rep.full_rank_errors as f64;
    }
    Ok(rep)
}

fn random_message<R: Rng + ?Sized>(field: &FieldTower, k: usize, rng: &mut R) -> Vec<Elem> {
    (0..k)
        .map(|_| Elem(rng.gen_range(0..field.size())))
        .collect()
}

/// Sends a random message through an error-free, erasure-free network and
/// recovers it from the reduced row echelon form of `Y`.
///
/// `g` must have full row rank.
pub fn lossless_trial<R: Rng + ?Sized>(
    field: &FieldTower,
    g: &Matrix<Elem>,
    big_n: usize,
    rng: &mut R,
) -> Result<bool, NetError> {
    let base = field.base();
    let n = g.cols();
    let m = field.m() as usize;
    let msg = random_message(field, g.rows(), rng);
    let c = g.left_mul_vec(field, &msg);
    let x = lift(field, &c);
    let ch = sample_channel(base, n, big_n, n + m, 0, 0, rng)?;
    let y = transmit(base, &ch, &x)?;
    let (rref, pivots) = y.rref(base);
    if pivots.len() < n || pivots[..n] != (0..n).collect::<Vec<_>>()[..] {
        return Ok(false);
    }
    let received: Vec<Elem> = (0..n)
        .map(|j| field.from_coords(&rref.row(j)[n..]))
        .collect();
    Ok(g.solve_left(field, &received).as_deref() == Some(&msg[..]))
}

/// A random error of sum-rank weight exactly `w`.
///
/// Picks `w` coordinates with at most `min(n_l, m)` in each block, then fills
/// each block with `F_q`-independent values.
pub fn random_error<R: Rng + ?Sized>(
    field: &FieldTower,
    part: &OrderedPartition,
    w: usize,
    rng: &mut R,
) -> Result<Vec<Elem>, NetError> {
    let n = part.total();
    let m = field.m() as usize;
    let ranges = part.ranges();
    let capacity: usize = ranges.iter().map(|r| r.len().min(m)).sum();
    if w > capacity {
        return Err(NetError::Shape(format!(
            "no error of weight {w} fits blocks {:?} with m = {m}",
            part.parts()
        )));
    }
    let positions = loop {
        let pos = sample(rng, n, w).into_vec();
        if ranges
            .iter()
            .all(|r| pos.iter().filter(|j| r.contains(j)).count() <= m)
        {
            break pos;
        }
    };
    let mut e = vec![Elem(0); n];
    for r in &ranges {
        let idx: Vec<usize> = positions
            .iter()
            .copied()
            .filter(|j| r.contains(j))
            .collect();
        let vals = loop {
            let v = random_message(field, idx.len(), rng);
            if field.linearly_independent(&v) {
                break v;
            }
        };
        for (&j, v) in idx.iter().zip(vals) {
            e[j] = v;
        }
    }
    Ok(e)
}

/// Encodes a random message, erases `rho` random coordinates, adds an error
/// of the largest weight the punctured code still corrects, and decodes.
///
/// Returns whether the original message came back.
pub fn micro_decode_trial<R: Rng + ?Sized>(
    field: &FieldTower,
    decoder: &BruteForceDecoder,
    g: &Matrix<Elem>,
    part: &OrderedPartition,
    rho: usize,
    rng: &mut R,
) -> Result<bool, NetError> {
    let n = g.cols();
    let d = decoder.distance();
    if rho >= d {
        return Err(NetError::Shape(format!(
            "{rho} erasures leave nothing of distance {d}"
        )));
    }
    let msg = random_message(field, g.rows(), rng);
    let c = g.left_mul_vec(field, &msg);
    let mut erased = sample(rng, n, rho).into_vec();
    erased.sort_unstable();
    let e = random_error(field, part, (d - 1 - rho) / 2, rng)?;
    let y: Vec<Elem> = (0..n)
        .map(|j| {
            if erased.contains(&j) {
                Elem(0)
            } else {
                field.add(c[j], e[j])
            }
        })
        .collect();
    Ok(match decoder.decode_with_erasures(&y, &erased)? {
        DecodeOutcome::Decoded { message, .. } => message == msg,
        _ => false,
    })
}
