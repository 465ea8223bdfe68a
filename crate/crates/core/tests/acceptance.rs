//! Acceptance run: one line per criterion, non-zero exit if any fails.

mod common;

use std::process::ExitCode;
use std::time::{Duration, Instant};

use common::*;
use lorenz_entropy::cli::{run_args, EXIT_VALIDATION};
use lorenz_entropy::engine::expected_iterations;
use lorenz_entropy::{
    build_markov, check_embedding, critical_itineraries, entropy_bracket_invariant_check, entropy_estimate_wordcount,
    estimate_entropy, spectral_radius, validate_lorenz, AdmissiblePair, EmbeddingStatus, LorenzMapSpec, SymbolWord,
};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

type Outcome = Result<String, String>;

fn ensure(cond: bool, msg: impl FnOnce() -> String) -> Result<(), String> {
    if cond {
        Ok(())
    } else {
        Err(msg())
    }
}

fn timed(limit: Duration, f: impl FnOnce() -> Outcome) -> Outcome {
    let start = Instant::now();
    let detail = f()?;
    let elapsed = start.elapsed();
    ensure(elapsed < limit, || format!("took {elapsed:.2?}, limit {limit:?}"))?;
    Ok(format!("{detail} in {elapsed:.2?}"))
}

const CELL_TOL: f64 = 5e-8;

fn golden_square_root_table() -> Outcome {
    timed(Duration::from_secs(5), || {
        let spec = sqrt_map();
        for n in [10, 100, 1000, 10000] {
            let r = estimate_entropy(&spec, 1e-6, n).map_err(|e| e.to_string())?;
            ensure((r.log_estimate - 0.4812117615).abs() < CELL_TOL, || {
                format!("n = {n}: {:.10} vs 0.4812117615", r.log_estimate)
            })?;
            ensure(r.contains_log(GOLDEN_LOG), || {
                format!("n = {n}: [{}, {}] misses ln golden ratio", r.log_lo, r.log_hi)
            })?;
        }
        Ok("4 cells within 5e-8, intervals contain ln((1+sqrt 5)/2)".into())
    })
}

/// `(n, epsilon, expected midpoint log)`.
type Cell = (usize, f64, f64);

fn golden_root_two_table() -> Outcome {
    timed(Duration::from_secs(5), || {
        let h = 2f64.sqrt().ln();
        let rows: [(f64, [Cell; 4]); 2] = [
            (
                0.5,
                [
                    (10, 0.3652803888, 0.3655560121),
                    (100, 0.3468120116, 0.3465736575),
                    (1000, 0.3468120116, 0.3465736575),
                    (10000, 0.3468120116, 0.3465736575),
                ],
            ),
            (
                1.0 / 2f64.sqrt(),
                [
                    (10, 0.3475021428, 0.3471925188),
                    (100, 0.3468120116, 0.3465736575),
                    (1000, 0.3468120116, 0.3465736575),
                    (10000, 0.3468120116, 0.3465736575),
                ],
            ),
        ];
        let mut cells = 0;
        for (p, row) in rows {
            let spec = root_two(p);
            for (n, coarse, fine) in row {
                for (eps, want) in [(1e-3, coarse), (1e-6, fine)] {
                    let r = estimate_entropy(&spec, eps, n).map_err(|e| e.to_string())?;
                    ensure((r.log_estimate - want).abs() < CELL_TOL, || {
                        format!("p = {p}, n = {n}, eps = {eps}: {:.10} vs {want}", r.log_estimate)
                    })?;
                    if n >= 100 {
                        ensure(r.contains_log(h), || format!("p = {p}, n = {n}, eps = {eps}: misses ln sqrt 2"))?;
                    }
                    cells += 1;
                }
            }
        }
        Ok(format!("{cells} cells within 5e-8, n >= 100 intervals contain ln sqrt 2"))
    })
}

fn parry_sweep() -> Outcome {
    timed(Duration::from_secs(60), || {
        let mut rng = ChaCha8Rng::seed_from_u64(0x5eed);
        let mut clean = 0;
        for i in 0..100 {
            let pair = pair_from_unit(rng.gen(), rng.gen(), 1.05, 1.95);
            let r = estimate_entropy(&LorenzMapSpec::uniform(pair), 1e-5, 1000).map_err(|e| e.to_string())?;
            ensure(r.contains_log(pair.a().ln()), || {
                format!("case {i}: a = {}, p = {}: [{}, {}] misses ln a", pair.a(), pair.p(), r.log_lo, r.log_hi)
            })?;
            if r.undetermined_total == 0 {
                clean += 1;
            }
        }
        ensure(clean >= 95, || format!("only {clean}/100 runs free of undetermined comparisons"))?;
        Ok(format!("100/100 intervals contain ln a, {clean}/100 with no undetermined comparisons"))
    })
}

fn slow_boundary_map() -> Outcome {
    timed(Duration::from_secs(120), || {
        let spec = slow_map();
        let r = estimate_entropy(&spec, 1e-4, 25000).map_err(|e| e.to_string())?;
        let slope = r.log_estimate.exp();
        ensure((slope - 1.00125).abs() < 1e-3, || format!("exp(estimate) = {slope}"))?;

        let crit = critical_itineraries(&spec, 25000).map_err(|e| e.to_string())?;
        let check = check_embedding(&crit, 1.5, 25000).map_err(|e| e.to_string())?;
        let (t1, _) = check.interval.ok_or("no t-interval")?;
        ensure(check.alpha_below_lower_bound, || "pi_a(alpha) >= 1 - 1/a".into())?;
        ensure((t1 - (1.0 - 1.0 / 1.5)).abs() < 1e-15, || format!("t1 = {t1}"))?;
        ensure(check.status == EmbeddingStatus::EmbedsAllP, || format!("status {:?}", check.status))?;
        Ok(format!("exp(estimate) = {slope:.9}, t1 = 1 - 1/a at a = 1.5"))
    })
}

fn oracle_triangle() -> Outcome {
    let spec = sqrt_map();
    let model = build_markov(&spec, 1000).map_err(|e| e.to_string())?;
    let markov = model.entropy().map_err(|e| e.to_string())?;
    ensure((markov - GOLDEN_LOG).abs() < 1e-9, || format!("Markov entropy {markov}"))?;

    let crit = critical_itineraries(&spec, 64).map_err(|e| e.to_string())?;
    let words = entropy_estimate_wordcount(&crit, 22).map_err(|e| e.to_string())?;
    ensure((words - markov).abs() <= 0.08, || format!("word count estimate {words} vs {markov}"))?;

    let r = estimate_entropy(&spec, 1e-6, 1000).map_err(|e| e.to_string())?;
    ensure(r.contains_log(markov), || format!("[{}, {}] misses {markov}", r.log_lo, r.log_hi))?;
    ensure(entropy_bracket_invariant_check(&r.trace, markov), || "bracket lost the Markov value".into())?;

    let fib = spectral_radius(&[vec![1.0, 1.0], vec![1.0, 0.0]], 1e-14).map_err(|e| e.to_string())?;
    ensure((fib - (1.0 + 5f64.sqrt()) / 2.0).abs() < 1e-10, || format!("Fibonacci radius {fib}"))?;
    Ok(format!("Markov {markov:.12}, words(22) {words:.4}, bisection bracket holds, Fibonacci {fib:.12}"))
}

const CASES: usize = 10_000;

fn property_suites() -> Outcome {
    let mut rng = ChaCha8Rng::seed_from_u64(7);
    let random_word = |rng: &mut ChaCha8Rng, n: usize| -> SymbolWord {
        SymbolWord::new((0..n).map(|_| rng.gen_range(0..2u8)).collect()).unwrap()
    };
    let mut run = |name: &str, check: &mut dyn FnMut(&mut ChaCha8Rng) -> Check| -> Result<(), String> {
        for case in 0..CASES {
            check(&mut rng).map_err(|e| format!("{name}, case {case}: {e}"))?;
        }
        Ok(())
    };

    run("ultrametric", &mut |rng| {
        let n = rng.gen_range(1..48);
        let u = random_word(rng, n);
        let k = rng.gen_range(0..=n);
        let v = u.prefix(k).concat(&random_word(rng, n - k));
        let j = rng.gen_range(0..=n);
        let w = u.prefix(j).concat(&random_word(rng, n - j));
        ultrametric(&u, &v, &w)
    })?;
    run("round trip", &mut |rng| {
        let pair = pair_from_unit(rng.gen(), rng.gen(), 1.01, 1.99);
        round_trip(&pair, orientation(rng.gen()), rng.gen(), rng.gen_range(5..60))
    })?;
    run("commuting diagram", &mut |rng| {
        let pair = pair_from_unit(rng.gen(), rng.gen(), 1.01, 1.99);
        commuting_diagram(&pair, orientation(rng.gen()), rng.gen(), rng.gen_range(3..60))
    })?;
    run("monotone in x", &mut |rng| {
        let pair = pair_from_unit(rng.gen(), rng.gen(), 1.01, 1.99);
        let x: f64 = rng.gen();
        let y = (x + rng.gen_range(0.0..0.01)).min(1.0);
        monotone_in_x(&pair, orientation(rng.gen()), x, y, rng.gen_range(1..80))
    })?;
    run("monotone in p", &mut |rng| {
        let ua: f64 = rng.gen();
        let p1 = pair_from_unit(ua, rng.gen(), 1.01, 1.99);
        let p2 = pair_from_unit(ua, rng.gen(), 1.01, 1.99);
        monotone_in_p(p1.a(), p1.p(), p2.p(), orientation(rng.gen()), rng.gen_range(3..200))
    })?;
    run("shift sub-invariance", &mut |rng| {
        let pair = pair_from_unit(rng.gen(), rng.gen(), 1.05, 1.95);
        let len = rng.gen_range(1..40);
        let flips: Vec<usize> = (0..rng.gen_range(0..3)).map(|_| rng.gen_range(0..40)).collect();
        shift_sub_invariance(&pair, rng.gen(), len, &flips)
    })?;

    let pair = AdmissiblePair::new(1.5, 0.5).unwrap();
    let s = enumeration_vs_sampling(&pair, orientation(true), 12, 100_000);
    ensure(s.sampled_rejected == 0, || format!("{} sampled itineraries rejected", s.sampled_rejected))?;
    ensure(s.admitted_unsampled == 0, || format!("{} admitted words never sampled", s.admitted_unsampled))?;
    Ok(format!(
        "6 suites x {CASES} cases; n = 12 enumeration: {} admitted, {} undetermined, {} sampled",
        s.admitted, s.undetermined, s.sampled
    ))
}

fn algorithm_mechanics() -> Outcome {
    let spec = sqrt_map();
    for eps in [1e-2, 1e-4, 1e-6] {
        let want = (2.0f64 / eps).log2().ceil() as usize;
        let r = estimate_entropy(&spec, eps, 100).map_err(|e| e.to_string())?;
        ensure(r.iterations == want && expected_iterations(eps) == want, || {
            format!("eps = {eps}: {} iterations, want {want}", r.iterations)
        })?;
    }

    let dir = tempfile::tempdir().map_err(|e| e.to_string())?;
    let path = dir.path().join("map.json");
    std::fs::write(&path, serde_json::to_string(&spec).unwrap()).map_err(|e| e.to_string())?;
    let args = [
        "lorenz-entropy",
        "entropy",
        "--map",
        path.to_str().unwrap(),
        "--epsilon",
        "1e-4",
        "--n",
        "200",
        "--format",
        "json",
    ];
    let (first, second) = (run_args(args), run_args(args));
    ensure(first.code == 0, || format!("entropy exited {}: {}", first.code, first.stderr))?;
    ensure(first.stdout == second.stdout, || "JSON reports differ between runs".into())?;

    let degenerate = LorenzMapSpec::new("2*x", "2*x - 1", 0.5).map_err(|e| e.to_string())?;
    ensure(!validate_lorenz(&degenerate, 10_000, 1e-9).passed(), || "degenerate map passed validation".into())?;
    ensure(estimate_entropy(&degenerate, 1e-3, 100).is_err(), || "degenerate map was estimated".into())?;
    std::fs::write(&path, serde_json::to_string(&degenerate).unwrap()).map_err(|e| e.to_string())?;
    let rejected = run_args(["lorenz-entropy", "validate", "--map", path.to_str().unwrap()]);
    ensure(rejected.code == EXIT_VALIDATION, || format!("validate exited {}", rejected.code))?;
    Ok("iteration counts 8/15/21, byte-identical JSON, f0(q) = 1 with f1(q) = 0 rejected".into())
}

type Criterion = fn() -> Outcome;

fn main() -> ExitCode {
    let criteria: [(&str, Criterion); 7] = [
        ("1 golden table, square-root Markov map", golden_square_root_table),
        ("2 golden table, slope sqrt 2 uniform maps", golden_root_two_table),
        ("3 Parry sweep", parry_sweep),
        ("4 near-identity boundary map", slow_boundary_map),
        ("5 oracle triangle", oracle_triangle),
        ("6 property suites", property_suites),
        ("7 algorithm mechanics", algorithm_mechanics),
    ];
    let filter: Vec<String> = std::env::args().skip(1).filter(|a| !a.starts_with('-')).collect();
    let mut failed = 0;
    for (name, check) in criteria {
        if !filter.is_empty() && !filter.iter().any(|f| name.contains(f.as_str())) {
            continue;
        }
        match check() {
            Ok(detail) => println!("PASS  criterion {name}: {detail}"),
            Err(why) => {
                failed += 1;
                println!("FAIL  criterion {name}: {why}");
            }
        }
    }
    if failed == 0 {
        ExitCode::SUCCESS
    } else {
        ExitCode::FAILURE
    }
}
