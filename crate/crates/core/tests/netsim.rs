use std::collections::BTreeSet;

use lrsnet::construct::SynthesisOptions;
use lrsnet::gf::FieldTower;
use lrsnet::netsim::{
    audit_weights, build_distributed_code, check_lengths, design_lengths, design_parameters, lift,
    lossless_trial, mincut, monte_carlo_audit, sample_channel, split_blocks, transmit, trial_rng,
    AuditParams, DesignResult, NetError, NetworkInstance,
};
use lrsnet::sumrank::OrderedPartition;
use proptest::prelude::*;

fn toy(ell: usize) -> NetworkInstance {
    NetworkInstance {
        h: 4,
        r: vec![1, 3, 2, 3],
        sources: vec![vec![1, 2, 3], vec![1, 2, 4], vec![1, 3, 4], vec![2, 3, 4]],
        t: 2,
        rho: 2,
        ell,
    }
}

fn instance() -> impl Strategy<Value = NetworkInstance> {
    (1usize..=3, 1usize..=3, 0usize..=1, 0usize..=2, 1usize..=3).prop_flat_map(
        |(h, s, t, rho, ell)| {
            (
                prop::collection::vec(1usize..=3, h),
                prop::collection::vec(prop::collection::btree_set(1..=h, 1..=h), s),
            )
                .prop_map(move |(r, sets)| {
                    let mut sources: Vec<Vec<usize>> =
                        sets.into_iter().map(|j| j.into_iter().collect()).collect();
                    // Make sure every message is held somewhere.
                    sources[0] = (1..=h).collect();
                    NetworkInstance {
                        h,
                        r,
                        sources,
                        t,
                        rho,
                        ell,
                    }
                })
        },
    )
}

/// Smallest feasible total by enumerating every tuple up to `limit`.
fn brute_min_n(inst: &NetworkInstance, limit: usize) -> usize {
    let s = inst.sources.len();
    let mut best = usize::MAX;
    let mut tuple = vec![0usize; s];
    loop {
        let n: usize = tuple.iter().sum();
        if n < best && check_lengths(inst, &tuple).is_empty() {
            best = n;
        }
        let mut i = 0;
        loop {
            if i == s {
                return best;
            }
            tuple[i] += 1;
            if tuple[i] <= limit {
                break;
            }
            tuple[i] = 0;
            i += 1;
        }
    }
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(48))]

    #[test]
    fn designer_is_optimal_and_feasible(inst in instance()) {
        let (lengths, n) = design_lengths(&inst).unwrap();
        prop_assert_eq!(lengths.iter().sum::<usize>(), n);
        prop_assert!(check_lengths(&inst, &lengths).is_empty());
        let limit = inst.k() + 2 * inst.ell * inst.t + inst.rho;
        prop_assert_eq!(n, brute_min_n(&inst, limit));
    }

    #[test]
    fn covering_dimension_never_exceeds_the_decodability_bound(inst in instance()) {
        let (_, n) = design_lengths(&inst).unwrap();
        if n < inst.ell {
            let short = matches!(design_parameters(&inst), Err(NetError::InvalidInstance(_)));
            prop_assert!(short);
            return Ok(());
        }
        let (p, _) = design_parameters(&inst).unwrap();
        prop_assert!(p.k_tilde >= p.k);
        prop_assert!(p.k_tilde + p.d - 1 <= p.n);
        prop_assert_eq!(p.blocks.iter().sum::<usize>(), p.n);
        prop_assert!(p.m as usize >= *p.blocks.iter().max().unwrap());
        let all: BTreeSet<usize> = (0..inst.h).collect();
        prop_assert_eq!(mincut(&inst, &p.lengths, &all), p.n);
    }

    #[test]
    fn block_splits_are_balanced(n in 1usize..200, ell in 1usize..8) {
        prop_assume!(ell <= n);
        let b = split_blocks(n, ell);
        prop_assert_eq!(b.len(), ell);
        prop_assert_eq!(b.iter().sum::<usize>(), n);
        prop_assert!(b.iter().max().unwrap() - b.iter().min().unwrap() <= 1);
    }

    #[test]
    fn channel_audit_holds_for_every_draw(seed in any::<u64>(), t in 0usize..=2, rho in 0usize..=2) {
        let field = FieldTower::new(3, 2).unwrap();
        let params = AuditParams {
            rows: OrderedPartition::new(vec![4, 4]).unwrap(),
            cols: OrderedPartition::new(vec![3, 3]).unwrap(),
            m: 2,
            t,
            rho,
        };
        let mut rng = trial_rng(seed, 0);
        let ch = sample_channel(field.base(), 6, 8, 8, t, rho, &mut rng).unwrap();
        let a = audit_weights(field.base(), &ch, &params).unwrap();
        prop_assert!(a.erasure_ok && a.error_ok);
        prop_assert!(a.weight_e <= 2 * a.rank_e);
    }
}

#[test]
fn toy_table_rows() {
    let expected = [
        (1, 15, 7, 2, 15),
        (2, 19, 11, 3, 10),
        (3, 23, 15, 4, 10),
        (4, 27, 19, 5, 10),
    ];
    for (ell, n, d, q, m) in expected {
        let (p, _) = design_parameters(&toy(ell)).unwrap();
        assert_eq!(
            (p.n, p.d, p.q, p.m, p.k_tilde),
            (n, d, q, m, 9),
            "ell = {ell}"
        );
        assert_eq!(p.packet_length, n + m as usize);
    }
}

#[test]
fn distributed_code_respects_source_access() {
    // Two messages, each source holds one: the generator is block diagonal.
    let inst = NetworkInstance {
        h: 2,
        r: vec![1, 1],
        sources: vec![vec![1], vec![2]],
        t: 0,
        rho: 1,
        ell: 2,
    };
    let res = build_distributed_code(&inst, SynthesisOptions::default()).unwrap();
    assert_eq!(res.params.lengths, vec![2, 2]);
    let cc = res.constrained_code().unwrap();
    let g = &cc.g;
    for c in 2..4 {
        assert_eq!(g.get(0, c).0, 0);
    }
    for c in 0..2 {
        assert_eq!(g.get(1, c).0, 0);
    }
    let json = serde_json::to_string(&res).unwrap();
    let back: DesignResult = serde_json::from_str(&json).unwrap();
    assert_eq!(back, res);
}

#[test]
fn lossless_network_delivers_every_message() {
    let inst = NetworkInstance {
        h: 2,
        r: vec![1, 2],
        sources: vec![vec![1, 2], vec![2]],
        t: 0,
        rho: 0,
        ell: 1,
    };
    let res = build_distributed_code(&inst, SynthesisOptions::default()).unwrap();
    let cc = res.constrained_code().unwrap();
    let field = cc.code.field().clone();
    let g = cc.g.select_rows(&(0..res.params.k).collect::<Vec<_>>());
    for i in 0..20 {
        let mut rng = trial_rng(99, i);
        assert!(lossless_trial(&field, &g, res.params.n + 2, &mut rng).unwrap());
    }
}

#[test]
fn lifted_packets_pass_through_a_full_rank_network() {
    let field = FieldTower::new(3, 2).unwrap();
    let base = field.base();
    let c: Vec<_> = (1..=4).map(lrsnet::gf::Elem).collect();
    let x = lift(&field, &c);
    let mut rng = trial_rng(4, 0);
    let ch = sample_channel(base, 4, 4, 6, 0, 0, &mut rng).unwrap();
    let y = transmit(base, &ch, &x).unwrap();
    assert_eq!(y.rref(base).0, x);
}

#[test]
fn monte_carlo_is_reproducible() {
    let field = FieldTower::new(3, 1).unwrap();
    let params = AuditParams {
        rows: OrderedPartition::new(vec![4, 4]).unwrap(),
        cols: OrderedPartition::new(vec![3, 3]).unwrap(),
        m: 2,
        t: 1,
        rho: 1,
    };
    let a = monte_carlo_audit(field.base(), &params, 200, 17).unwrap();
    let b = monte_carlo_audit(field.base(), &params, 200, 17).unwrap();
    assert_eq!(a, b);
    assert_eq!((a.erasure_ok, a.error_ok), (200, 200));
    assert!(a.full_rank_errors > 0);
}
