use std::fs;
use std::path::Path;
use std::process::ExitCode;

use anyhow::{anyhow, Context};
use lrsnet::constraints::{
    check_condition, constraint_from_pattern, suggest_field_params, ConstraintError,
    SupportConstraint,
};
use lrsnet::construct::{
    subcode_generator, synthesize, verify_support, ConstructError, SynthesisOptions,
};
use lrsnet::gf::{FieldError, FieldTower};
use lrsnet::linalg::Matrix;
use lrsnet::netsim::{
    build_distributed_code, design_parameters, lossless_trial, micro_decode_trial,
    monte_carlo_audit, split_blocks, trial_rng, AuditParams, DesignResult, MonteCarloReport,
    NetError, NetworkInstance,
};
use lrsnet::sumrank::{min_distance_bruteforce, BruteForceDecoder, OrderedPartition, SumRankError};
use serde::Serialize;

use crate::{ConstructArgs, DesignArgs, SimulateArgs};

/// An error with the exit code it maps to.
pub struct Failure {
    pub code: u8,
    pub inner: anyhow::Error,
}

/// Condition or feasibility failure.
fn failed(err: impl Into<anyhow::Error>) -> Failure {
    Failure {
        code: 1,
        inner: err.into(),
    }
}

/// Usage, input or parse error.
fn bad_input(err: impl Into<anyhow::Error>) -> Failure {
    Failure {
        code: 2,
        inner: err.into(),
    }
}

fn classify_construct(err: ConstructError) -> Failure {
    match err {
        ConstructError::Constraint(ConstraintError::Parse { .. })
        | ConstructError::Field(_)
        | ConstructError::Lrs(_)
        | ConstructError::Malformed(_) => bad_input(err),
        _ => failed(err),
    }
}

fn classify_net(err: NetError) -> Failure {
    match err {
        NetError::InvalidInstance(_) | NetError::Guard { .. } | NetError::Field(_) => {
            bad_input(err)
        }
        NetError::Construct(inner) => classify_construct(inner),
        _ => failed(err),
    }
}

type Outcome = Result<ExitCode, Failure>;

fn read(path: &Path) -> Result<String, Failure> {
    fs::read_to_string(path)
        .with_context(|| format!("reading {}", path.display()))
        .map_err(bad_input)
}

fn write(path: &Path, text: &str) -> Result<(), Failure> {
    fs::write(path, text)
        .with_context(|| format!("writing {}", path.display()))
        .map_err(bad_input)
}

fn one_based(v: &[usize]) -> String {
    let inner: Vec<String> = v.iter().map(|x| (x + 1).to_string()).collect();
    format!("{{{}}}", inner.join(","))
}

fn load_pattern(path: &Path, n: Option<usize>) -> Result<SupportConstraint, Failure> {
    constraint_from_pattern(&read(path)?, n)
        .with_context(|| format!("in {}", path.display()))
        .map_err(bad_input)
}

pub fn check(path: &Path, n: Option<usize>) -> Outcome {
    let sc = load_pattern(path, n)?;
    let rep = check_condition(&sc).map_err(bad_input)?;
    println!("rows k = {}, length n = {}", sc.k(), sc.n());
    println!("condition holds: {}", if rep.holds { "yes" } else { "no" });
    if let Some(w) = &rep.witness {
        println!("violating rows: {}", one_based(w));
    }
    println!("k_tilde = {}", rep.k_tilde);
    println!(
        "equality system: {}",
        if rep.equality_system { "yes" } else { "no" }
    );
    Ok(if rep.holds {
        ExitCode::SUCCESS
    } else {
        ExitCode::from(1)
    })
}

fn print_matrix(g: &Matrix<lrsnet::gf::Elem>) {
    for row in g.to_rows() {
        let cells: Vec<String> = row.iter().map(|e| e.to_string()).collect();
        println!("  {}", cells.join(" "));
    }
}

pub fn construct(args: &ConstructArgs) -> Outcome {
    let sc = load_pattern(&args.pattern, args.n)?;
    let n = sc.n();
    let parts = match &args.parts {
        Some(p) => p.clone(),
        None if args.ell == 0 || args.ell > n => {
            return Err(bad_input(anyhow!("--ell must be in 1..={n}")))
        }
        None => split_blocks(n, args.ell),
    };
    if parts.iter().sum::<usize>() != n {
        return Err(bad_input(anyhow!("blocks {parts:?} do not sum to n = {n}")));
    }
    let part = OrderedPartition::new(parts).map_err(bad_input)?;
    let rep = check_condition(&sc).map_err(bad_input)?;
    if !rep.holds && !args.subcode {
        let w = rep.witness.as_deref().unwrap_or_default();
        return Err(failed(anyhow!(
            "condition fails on rows {} (k_tilde = {}); rerun with --subcode for a subcode",
            one_based(w),
            rep.k_tilde
        )));
    }
    let dim = rep.k_tilde;
    let fp = suggest_field_params(dim, &part);
    let (q, m) = (args.q.unwrap_or(fp.q), args.m.unwrap_or(fp.m));
    let field = FieldTower::new(q, m).map_err(bad_input)?;
    let opts = SynthesisOptions {
        budget: args.budget,
        seed: args.seed,
    };
    let (cc, generator) = if rep.holds {
        let cc = synthesize(&field, &part, sc.k(), &sc, opts).map_err(classify_construct)?;
        let g = cc.g.clone();
        (cc, g)
    } else {
        let sub = subcode_generator(&field, &part, &sc, opts).map_err(classify_construct)?;
        (sub.cover, sub.generator)
    };
    let mismatches = verify_support(&cc.g, &cc.constraint);
    if !mismatches.is_empty() {
        return Err(failed(anyhow!("{} support mismatches", mismatches.len())));
    }
    println!(
        "field F_{q}^{m}, blocks {:?}, seed {}",
        part.parts(),
        args.seed
    );
    println!(
        "[n, k] = [{n}, {}], covering dimension {dim}, attempts {}",
        sc.k(),
        cc.attempts
    );
    let expected = n - dim + 1;
    match min_distance_bruteforce(&field, &generator, &part) {
        Ok(d) if d == expected => println!("sum-rank distance {d} (n - k_tilde + 1)"),
        Ok(d) => return Err(failed(anyhow!("distance {d}, expected {expected}"))),
        Err(SumRankError::SizeGuard { .. }) => {
            println!("sum-rank distance not enumerated (too many codewords); bound {expected}")
        }
        Err(e) => return Err(failed(e)),
    }
    println!("generator:");
    print_matrix(&generator);
    if let Some(out) = &args.out {
        let text = if out.extension().is_some_and(|e| e == "csv") {
            cc.to_csv()
        } else {
            serde_json::to_string_pretty(&cc.to_record()).map_err(failed)?
        };
        write(out, &text)?;
        if !rep.holds {
            println!(
                "record holds the covering code; the subcode is its first {} rows",
                sc.k()
            );
        }
    }
    Ok(ExitCode::SUCCESS)
}

fn load_instance(path: &Path) -> Result<NetworkInstance, Failure> {
    let inst: NetworkInstance = serde_json::from_str(&read(path)?)
        .with_context(|| format!("parsing {}", path.display()))
        .map_err(bad_input)?;
    inst.validate().map_err(classify_net)?;
    Ok(inst)
}

fn emit(out: Option<&Path>, text: &str) -> Result<(), Failure> {
    match out {
        Some(p) => write(p, text),
        None => {
            println!("{text}");
            Ok(())
        }
    }
}

fn table_row(inst: &NetworkInstance) -> Result<String, Failure> {
    let (p, _) = design_parameters(inst).map_err(classify_net)?;
    Ok(format!(
        "{:>3} {:>3} {:>4}  [{}, {}, {}]  {:?}  {:?}",
        inst.ell, p.q, p.m, p.n, p.k_tilde, p.d, p.blocks, p.lengths
    ))
}

const TABLE_HEADER: &str = "ell   q    m  [n, k~, d]  blocks  source lengths";

pub fn design(args: &DesignArgs) -> Outcome {
    let mut inst = load_instance(&args.instance)?;
    if let Some(ell) = args.ell {
        inst = inst.with_ell(ell);
        inst.validate().map_err(classify_net)?;
    }
    if let Some(max) = args.table {
        let mut lines = vec![TABLE_HEADER.to_string()];
        for ell in 1..=max {
            lines.push(table_row(&inst.with_ell(ell))?);
        }
        emit(args.out.as_deref(), &lines.join("\n"))?;
        return Ok(ExitCode::SUCCESS);
    }
    let text = if args.params_only {
        let (params, _) = design_parameters(&inst).map_err(classify_net)?;
        serde_json::to_string_pretty(&serde_json::json!({ "instance": inst, "params": params }))
    } else {
        let opts = SynthesisOptions {
            seed: args.seed,
            ..Default::default()
        };
        let res = build_distributed_code(&inst, opts).map_err(|e| match e {
            NetError::Construct(ConstructError::Constraint(ConstraintError::SubsetGuard {
                ..
            }))
            | NetError::Field(FieldError::TooLarge { .. } | FieldError::SizeGuard { .. }) => {
                failed(anyhow!(
                    "{e}; use --params-only for parameters without a code"
                ))
            }
            other => classify_net(other),
        })?;
        serde_json::to_string_pretty(&res)
    }
    .map_err(failed)?;
    emit(args.out.as_deref(), &text)?;
    Ok(ExitCode::SUCCESS)
}

#[derive(Debug, Serialize)]
struct Rate {
    trials: usize,
    succeeded: usize,
}

#[derive(Debug, Serialize)]
struct SimulationReport {
    seed: u64,
    trials: usize,
    n: usize,
    m: u32,
    t: usize,
    rho: usize,
    blocks: Vec<usize>,
    audit: MonteCarloReport,
    /// Error- and erasure-free delivery, only when `t = rho = 0`.
    lossless: Option<Rate>,
    /// Brute-force decoding with injected errors and erasures, when small enough.
    decoding: Option<Rate>,
}

/// Decoding trials run per simulation at most; each enumerates the codebook.
const DECODE_TRIALS: usize = 100;

pub fn simulate(args: &SimulateArgs) -> Outcome {
    let res: DesignResult = serde_json::from_str(&read(&args.design)?)
        .with_context(|| format!("parsing {}", args.design.display()))
        .map_err(bad_input)?;
    let cc = res.constrained_code().map_err(classify_net)?;
    let field = cc.code.field().clone();
    let base = field.base();
    let p = &res.params;
    let (t, rho) = (res.instance.t, res.instance.rho);
    let part = OrderedPartition::new(p.blocks.clone()).map_err(bad_input)?;
    let params = AuditParams {
        rows: part.clone(),
        cols: part.clone(),
        m: p.m as usize,
        t,
        rho,
    };
    let audit = monte_carlo_audit(base, &params, args.trials, args.seed).map_err(classify_net)?;
    let g = cc.g.select_rows(&(0..p.k).collect::<Vec<_>>());
    let mut ok = audit.erasure_ok == args.trials && audit.error_ok == args.trials;

    let lossless = if t == 0 && rho == 0 {
        let mut succeeded = 0;
        for i in 0..args.trials {
            let mut rng = trial_rng(args.seed.wrapping_add(1), i as u64);
            succeeded += lossless_trial(&field, &g, p.n, &mut rng).map_err(classify_net)? as usize;
        }
        ok &= succeeded == args.trials;
        Some(Rate {
            trials: args.trials,
            succeeded,
        })
    } else {
        None
    };

    let decoding = match BruteForceDecoder::new(&field, &g, &part) {
        Ok(dec) if dec.distance() > rho => {
            let trials = args.trials.min(DECODE_TRIALS);
            let mut succeeded = 0;
            for i in 0..trials {
                let mut rng = trial_rng(args.seed.wrapping_add(2), i as u64);
                succeeded += micro_decode_trial(&field, &dec, &g, &part, rho, &mut rng)
                    .map_err(classify_net)? as usize;
            }
            ok &= succeeded == trials;
            Some(Rate { trials, succeeded })
        }
        _ => None,
    };

    let report = SimulationReport {
        seed: args.seed,
        trials: args.trials,
        n: p.n,
        m: p.m,
        t,
        rho,
        blocks: p.blocks.clone(),
        audit,
        lossless,
        decoding,
    };
    emit(
        args.out.as_deref(),
        &serde_json::to_string_pretty(&report).map_err(failed)?,
    )?;
    Ok(if ok {
        ExitCode::SUCCESS
    } else {
        ExitCode::from(1)
    })
}

fn toy(sources: Vec<Vec<usize>>, ell: usize) -> NetworkInstance {
    NetworkInstance {
        h: 4,
        r: vec![1, 3, 2, 3],
        sources,
        t: 2,
        rho: 2,
        ell,
    }
}

pub fn tables(max_ell: usize) -> Outcome {
    let overlapping = vec![vec![1, 2, 3], vec![1, 2, 4], vec![1, 3, 4], vec![2, 3, 4]];
    println!("sources {overlapping:?}");
    println!("{TABLE_HEADER}");
    for ell in 1..=max_ell {
        println!("{}", table_row(&toy(overlapping.clone(), ell))?);
    }
    let variants = [
        vec![vec![1], vec![2], vec![3], vec![4]],
        vec![vec![1, 2], vec![1, 3], vec![2, 4], vec![3, 4]],
    ];
    for sources in variants {
        println!();
        println!("sources {sources:?}");
        println!("{TABLE_HEADER}");
        for ell in 1..=max_ell.min(3) {
            println!("{}", table_row(&toy(sources.clone(), ell))?);
        }
    }
    Ok(ExitCode::SUCCESS)
}
