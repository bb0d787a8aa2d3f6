//! Acceptance criteria, one PASS/FAIL line each.

mod common;

use std::process::ExitCode;
use std::time::{Duration, Instant};

use common::*;
use num_bigint::BigUint;
use rand::Rng;
use treeshift::minimality::{entropy_drop_analysis, MinimalityVerdict};
use treeshift::oracle::brute_force_count;
use treeshift::poly::{format_poly, largest_real_root};
use treeshift::*;

type Outcome = std::result::Result<String, String>;

fn check(cond: bool, what: impl Into<String>) -> std::result::Result<(), String> {
    if cond {
        Ok(())
    } else {
        Err(what.into())
    }
}

fn within(limit: Duration, start: Instant) -> std::result::Result<(), String> {
    let spent = start.elapsed();
    check(spent <= limit, format!("took {spent:?}, limit {limit:?}"))
}

fn entropy_report(spec: &TreeShiftSpec) -> EntropyReport {
    tsft_entropy(&Snre::from_spec(spec).unwrap(), &EntropyOptions::default()).unwrap()
}

fn oracle_equivalence() -> Outcome {
    let start = Instant::now();
    let mut r = rng(1);
    let mut specs = 0;
    let mut comparisons = 0;
    while specs < 30 {
        let k = r.gen_range(1..=3);
        let density = r.gen_range(0.1..0.6);
        let Ok((spec, _)) = random_spec(&mut r, k, 2, density).prune_dead_symbols() else {
            continue;
        };
        specs += 1;
        let snre = Snre::from_spec(&spec).map_err(|e| e.to_string())?;
        let exact = snre.evaluate_exact(3).map_err(|e| e.to_string())?;
        for n in 2..=4 {
            let brute = brute_force_count(&spec, n).map_err(|e| e.to_string())?;
            let direct: Vec<BigUint> = brute.counts.iter().map(|&c| BigUint::from(c)).collect();
            check(
                direct == exact.level(n - 1),
                format!("spec {specs}, height {n}: {:?} vs {:?}", direct, exact.level(n - 1)),
            )?;
            comparisons += 1;
        }
    }
    within(Duration::from_secs(60), start)?;
    Ok(format!("{specs} specs, {comparisons} heights, {:?}", start.elapsed()))
}

fn two_symbol_entropy() -> Outcome {
    let report = entropy_report(&two_symbol());
    let ln2 = 2f64.ln();
    check(report.exhaustive && report.reductions_evaluated == 4, "not all four reductions evaluated")?;
    check((report.entropy - ln2).abs() <= 1e-12, format!("entropy {}", report.entropy))?;
    let tail = Snre::from_spec(&two_symbol())
        .unwrap()
        .entropy_estimate(40, EstimateVariant::SumLogs)
        .unwrap()
        .tail();
    check((tail - ln2).abs() <= 0.05, format!("estimator tail {tail}"))?;
    Ok(format!("entropy {:.15}, tail {tail:.6}", report.entropy))
}

fn branching_realization() -> Outcome {
    let start = Instant::now();
    let m = branching_matrix();
    let (d, v) = extend_matrix(&m).map_err(|e| e.to_string())?;
    let expected_v = IntMatrix::from_rows(vec![
        vec![1, 1, 0, 1],
        vec![0, 0, 1, 2],
        vec![2, 1, 0, 0],
        vec![0, 0, 0, 3],
    ])
    .unwrap();
    check(d == 3 && v == expected_v, format!("V = {v:?}"))?;
    let (spec, plan) = realize_tsft(&m).map_err(|e| e.to_string())?;
    let b: Vec<String> = plan
        .allowed
        .iter()
        .map(|(root, kids)| format!("{root}{}", kids.join("")))
        .collect();
    let expected_b = [
        "a1a1a2a4", "a1a4a4a4", "a2a3a4a4", "a2a4a4a4", "a3a1a1a2", "a3a4a4a4", "a4a4a4a4",
    ];
    check(b == expected_b, format!("B = {b:?}"))?;
    check(spec.forbidden_patterns().len() == 4 * 64 - 7, "forbidden set is not the complement")?;

    let cp = char_poly(&m).map_err(|e| e.to_string())?;
    let rho = largest_real_root(&cp, 0.0, 3.0).ok_or("no real root")?;
    let report = verify_realization(&m, &VerifyOptions::default()).map_err(|e| e.to_string())?;
    check(report.passed, format!("verification failed, entropy {}", report.entropy))?;
    check((report.entropy - rho.ln()).abs() <= 1e-6, format!("entropy {} vs ln rho {}", report.entropy, rho.ln()))?;
    check(
        (report.estimator_tail - rho.ln()).abs() <= 0.05,
        format!("estimator tail {}", report.estimator_tail),
    )?;
    within(Duration::from_secs(10), start)?;
    Ok(format!(
        "rho {rho:.10}, entropy {:.10}, tail {:.6}, {:?}",
        report.entropy,
        report.estimator_tail,
        start.elapsed()
    ))
}

fn all_essential_suite() -> Outcome {
    let mut r = rng(4);
    for i in 0..50 {
        let k = 2 + i % 2;
        let d = 2 + (i / 2) % 2;
        let spec = all_essential_spec(&mut r, k, d);
        let h = entropy_report(&spec).entropy;
        check(
            (h - (d as f64).ln()).abs() <= 1e-9,
            format!("instance {i} (k={k}, d={d}): entropy {h}"),
        )?;
    }
    Ok("50 instances at ln d".into())
}

fn saving_symbol_instance() -> Outcome {
    let x = saving_example();
    let opts = EntropyOptions::default();
    let ln2 = 2f64.ln();

    let drop = entropy_drop_analysis(&x, &Pattern2::new(1, vec![0, 0]), &opts).map_err(|e| e.to_string())?;
    check((drop.h_x - ln2).abs() <= 1e-12, format!("h_X {}", drop.h_x))?;
    check(drop.h_y == 0.0, format!("h_Y {}", drop.h_y))?;
    check(drop.consistent && drop.verdict == MinimalityVerdict::Consistent, "removal of (b,(a,a)) not consistent")?;

    let y = x.without_pattern(&Pattern2::new(1, vec![0, 0])).unwrap();
    let counts = Snre::from_spec(&y).unwrap().evaluate_exact(20).unwrap();
    for n in 1..=20 {
        check(
            counts.level(n)[0] == BigUint::from(1u64 << n),
            format!("a_{n} = {} in Y", counts.level(n)[0]),
        )?;
    }

    let keep = entropy_drop_analysis(&x, &Pattern2::new(0, vec![0, 1]), &opts).map_err(|e| e.to_string())?;
    check((keep.h_y - keep.h_x).abs() <= 1e-12, format!("h_Y {} vs h_X {}", keep.h_y, keep.h_x))?;
    check(keep.consistent, "removal of (a,(a,b)) not consistent")?;
    Ok("drop to 0 on (b,(a,a)); no drop on (a,(a,b)); a_n = 2^n for n <= 20".into())
}

fn spectral_toolkit() -> Outcome {
    let golden = IntMatrix::from_rows(vec![vec![1, 1], vec![1, 0]]).unwrap();
    let phi = (1.0 + 5f64.sqrt()) / 2.0;
    let rho = spectral_radius(&golden).map_err(|e| e.to_string())?;
    check((rho - phi).abs() <= 1e-12, format!("rho {rho}"))?;
    let cp = format_poly(&char_poly(&branching_matrix()).map_err(|e| e.to_string())?);
    check(cp == "x^3 - x^2 - x - 1", format!("char poly {cp}"))?;
    let swap = IntMatrix::from_rows(vec![vec![0, 1], vec![1, 0]]).unwrap();
    let p = period(&swap, &[0, 1]).map_err(|e| e.to_string())?;
    check(p == 2, format!("period {p}"))?;
    Ok(format!("rho {rho:.15}, {cp}, period {p}"))
}

fn upper_bound_and_monotonicity() -> Outcome {
    let mut r = rng(7);
    let mut specs = Vec::new();
    while specs.len() < 100 {
        let k = r.gen_range(1..=3);
        let d = r.gen_range(2..=3);
        let density = r.gen_range(0.05..0.5);
        if let Ok((spec, _)) = random_spec(&mut r, k, d, density).prune_dead_symbols() {
            specs.push(spec);
        }
    }
    for (i, spec) in specs.iter().enumerate() {
        let h = entropy_report(spec).entropy;
        let bound = (spec.arity() as f64).ln();
        check(h <= bound + 1e-12, format!("spec {i}: entropy {h} above ln d {bound}"))?;
    }
    let mut removals = 0;
    for (i, spec) in specs.iter().take(20).enumerate() {
        let h = entropy_report(spec).entropy;
        for p in spec.allowed_patterns() {
            let h_y = spec
                .without_pattern(&p)
                .unwrap()
                .prune_dead_symbols()
                .map_or(0.0, |(y, _)| entropy_report(&y).entropy);
            check(h_y <= h + 1e-12, format!("spec {i}: removing {p:?} raised {h} to {h_y}"))?;
            removals += 1;
        }
    }
    Ok(format!("100 specs under ln d, {removals} removals on 20 specs"))
}

fn main() -> ExitCode {
    let criteria: [(&str, fn() -> Outcome); 7] = [
        ("recursion equals direct enumeration", oracle_equivalence),
        ("binary two-symbol system has entropy ln 2", two_symbol_entropy),
        ("realization of the 3x3 example", branching_realization),
        ("all-essential specs reach ln d", all_essential_suite),
        ("saving-symbol removal instance", saving_symbol_instance),
        ("spectral toolkit", spectral_toolkit),
        ("upper bound and monotonicity", upper_bound_and_monotonicity),
    ];
    let mut failed = 0;
    for (i, (name, run)) in criteria.iter().enumerate() {
        match run() {
            Ok(detail) => println!("criterion {} PASS  {name}: {detail}", i + 1),
            Err(why) => {
                failed += 1;
                println!("criterion {} FAIL  {name}: {why}", i + 1);
            }
        }
    }
    if failed == 0 {
        ExitCode::SUCCESS
    } else {
        ExitCode::FAILURE
    }
}
