//! End-to-end acceptance run: one PASS/FAIL line per criterion, non-zero exit
//! if any fails.

use std::time::{Duration, Instant};

use onebit_cli::run_with;
use onebit_core::bounds::{lambda_bounds, m_rip_union, p_delta_exact, rip_m_window};
use onebit_core::embedding::{hamming_count, Boundary};
use onebit_core::montecarlo::{default_figure_grid, run_trials, sweep, wilson_interval_z, TrialConfig};
use onebit_core::oracles::{birthday_exact, eta_comparison, rip_exact_three};
use onebit_core::seed::stream;
use onebit_core::BitCode;

struct Outcome {
    passed: bool,
    detail: String,
}

fn outcome(passed: bool, detail: impl Into<String>) -> Outcome {
    Outcome {
        passed,
        detail: detail.into(),
    }
}

type Criterion = (&'static str, Duration, fn() -> Outcome);

fn main() {
    let criteria: [Criterion; 10] = [
        ("exact tail value", Duration::from_millis(1), exact_tail),
        ("Hoeffding domination", Duration::from_secs(1), hoeffding),
        ("Stirling sandwich", Duration::from_secs(1), stirling),
        ("birthday agreement", Duration::from_secs(30), birthday),
        ("three-point RIP agreement", Duration::from_secs(30), rip_three),
        ("figure reproduction", Duration::from_secs(600), figure),
        ("union-bound validation", Duration::from_secs(120), union_bound),
        ("eta window report", Duration::from_millis(1), eta_report),
        ("determinism", Duration::from_secs(120), determinism),
        ("brute-force equivalences", Duration::from_secs(30), brute_force),
    ];
    let mut failures = 0;
    for (k, (name, limit, check)) in criteria.into_iter().enumerate() {
        let start = Instant::now();
        let result = check();
        let elapsed = start.elapsed();
        let passed = result.passed && elapsed <= limit;
        failures += !passed as u32;
        println!(
            "{} {:>2} {name}: {} [{:.3?} / limit {:.0?}]",
            if passed { "PASS" } else { "FAIL" },
            k + 1,
            result.detail,
            elapsed,
            limit
        );
    }
    if failures > 0 {
        println!("{failures} criteria failed");
        std::process::exit(1);
    }
}

fn exact_tail() -> Outcome {
    let p = p_delta_exact(10, 0.2).unwrap();
    let ok = p.value == ratio(352, 1024) && p.float_value == 0.34375;
    outcome(ok, format!("p(10, 0.2) = {}", p.fraction()))
}

fn hoeffding() -> Outcome {
    let mut violations = 0;
    for m in 1..=300u64 {
        for k in 1..=9 {
            let delta = 0.05 * k as f64;
            let p = p_delta_exact(m, delta).unwrap().float_value;
            violations += (p > 2.0 * (-2.0 * delta * delta * m as f64).exp()) as u32;
        }
    }
    outcome(violations == 0, format!("{violations} violations over 2700 cells"))
}

fn stirling() -> Outcome {
    let mut violations = 0;
    for m in 10..=200u64 {
        for delta in [0.1, 0.15, 0.2, 0.25, 0.3, 0.4] {
            let lb = lambda_bounds(2, m, delta, false).unwrap();
            violations += !(lb.lambda1 <= lb.lambda_exact && lb.lambda_exact <= lb.lambda2) as u32;
        }
    }
    let spot = lambda_bounds(2, 10, 0.2, false).unwrap();
    // The quoted spot values carry five significant digits.
    let near = |x: f64, quoted: f64| ((x - quoted) / quoted).abs() < 1e-4;
    let spot_ok = near(spot.lambda1, 0.046905)
        && spot.lambda_exact == 0.34375
        && near(spot.lambda2, 0.60226)
        && spot.lambda1 <= spot.lambda_exact
        && spot.lambda_exact <= spot.lambda2;
    outcome(
        violations == 0 && spot_ok,
        format!(
            "{violations} violations; m=10, delta=0.2: {:.7} <= {} <= {:.7}",
            spot.lambda1, spot.lambda_exact, spot.lambda2
        ),
    )
}

fn birthday() -> Outcome {
    let grid: Vec<usize> = (4..=14).collect();
    let result = sweep(&TrialConfig::injectivity(10, 1, 100_000, 0xB1D), &grid).unwrap();
    let inside = result
        .rows
        .iter()
        .filter(|r| r.within_sigma(birthday_exact(10, r.m as u64).unwrap().float_value, 3.0))
        .count();
    outcome(inside >= 10, format!("{inside}/11 cells within 3 sigma"))
}

fn rip_three() -> Outcome {
    let mut inside = 0;
    let mut cells = Vec::new();
    for boundary in [Boundary::Strict, Boundary::Inclusive] {
        for m in [8usize, 16, 32] {
            let row = run_trials(&TrialConfig::rip(3, m, 0.2, 100_000, 0x3).with_boundary(boundary)).unwrap();
            let exact = rip_exact_three(m as u64, 0.2, boundary).unwrap().float_value;
            inside += row.within_sigma(exact, 3.0) as u32;
            cells.push(format!("{boundary} m={m}: {:.4}/{exact:.4}", row.p_hat));
        }
    }
    outcome(inside == 6, format!("{inside}/6 within 3 sigma ({})", cells.join(", ")))
}

fn figure() -> Outcome {
    let window = rip_m_window(800, 0.2, 0.5, 0.1, false).unwrap();
    let grid = default_figure_grid(&window);
    let result = sweep(&TrialConfig::rip(800, 1, 0.2, 200, 0xF16), &grid).unwrap();
    let crossing = result.crossing(0.5);
    let crossing_ok = crossing.is_some_and(|m| window.m_formula_eps1 < m && m < window.m_formula_eps2);
    let outside: Vec<usize> = result
        .rows
        .iter()
        .filter(|r| {
            let w = r.window.expect("orthogonal rows carry a window");
            let (lo, hi) = wilson_interval_z(r.successes, r.trials, 3.0);
            hi < w.lo || lo > w.hi
        })
        .map(|r| r.m)
        .collect();
    outcome(
        crossing_ok && outside.is_empty(),
        format!(
            "0.5 crossing at m = {:.1} in ({:.1}, {:.1}); rows outside widened window: {outside:?}",
            crossing.unwrap_or(f64::NAN),
            window.m_formula_eps1,
            window.m_formula_eps2
        ),
    )
}

fn union_bound() -> Outcome {
    let m = m_rip_union(100, 0.1, 0.2).unwrap().m_int as usize;
    let config = TrialConfig::rip(100, m, 0.2, 10_000, 0x07).with_boundary(Boundary::Inclusive);
    let row = run_trials(&config).unwrap();
    let failure = 1.0 - row.p_hat;
    outcome(m == 144 && failure <= 0.1, format!("m = {m}, failure frequency {failure:.4} <= 0.1"))
}

fn eta_report() -> Outcome {
    let r = eta_comparison(10, 7).unwrap();
    let ok = (r.deviation - 0.0063).abs() < 5e-5 && r.general_contains && r.deviation <= r.eta_general;
    outcome(
        ok,
        format!(
            "D = {:.6}; eta_general = {:.6} contains={}; eta_pairwise = {:.6} contains={} (reported)",
            r.deviation, r.eta_general, r.general_contains, r.eta_pairwise, r.pairwise_contains
        ),
    )
}

fn determinism() -> Outcome {
    let dir = tempfile::tempdir().unwrap();
    let run = |name: &str, cmd: &[&str], threads: &str| -> Vec<u8> {
        let path = dir.path().join(name);
        let mut args: Vec<String> = ["onebit"].iter().chain(cmd).map(|s| s.to_string()).collect();
        args.extend(["--threads".into(), threads.into(), "--out".into(), path.display().to_string()]);
        let code = run_with(&args, &mut Vec::new(), &mut Vec::new());
        assert_eq!(code, 0, "{args:?}");
        std::fs::read(path).unwrap()
    };
    let commands: [&[&str]; 3] = [
        &["simulate", "--n", "10", "--m", "7", "--trials", "20000", "--seed", "9"],
        &["sweep", "--n", "3", "--delta", "0.2", "--m-grid", "8:32:8", "--trials", "20000", "--seed", "9"],
        &["sweep", "--n", "200", "--delta", "0.2", "--m-grid", "100:200:50", "--trials", "300", "--seed", "9"],
    ];
    let mut identical = 0;
    for (k, cmd) in commands.iter().enumerate() {
        let a = run(&format!("{k}a.csv"), cmd, "1");
        let b = run(&format!("{k}b.csv"), cmd, "1");
        let c = run(&format!("{k}c.csv"), cmd, "8");
        identical += (a == b && a == c && !a.is_empty()) as u32;
    }
    outcome(identical == 3, format!("{identical}/3 commands byte-identical across reruns and 1 vs 8 threads"))
}

fn brute_force() -> Outcome {
    let mut mismatches = Vec::new();
    for n in 2..=3u32 {
        for m in 1..=4u32 {
            let size = 1u64 << m;
            let total = size.pow(n);
            let distinct = (0..total)
                .filter(|&idx| {
                    let codes: Vec<u64> = (0..n).map(|k| (idx / size.pow(k)) % size).collect();
                    (0..codes.len()).all(|i| (i + 1..codes.len()).all(|j| codes[i] != codes[j]))
                })
                .count() as u64;
            if birthday_exact(n as u64, m as u64).unwrap().value != ratio(distinct, total) {
                mismatches.push(format!("birthday n={n} m={m}"));
            }
        }
    }
    for m in 1..=7u32 {
        for delta in [0.1, 0.2, 0.25, 0.3, 0.45] {
            for boundary in [Boundary::Strict, Boundary::Inclusive] {
                let total = 1u64 << (3 * m);
                let good = (0..total)
                    .filter(|&seq| {
                        // Column j holds bits of x1, x2, x3 in bits 3j..3j+3.
                        let mut h = [0u32; 3];
                        for j in 0..m {
                            let c = (seq >> (3 * j)) & 7;
                            let (a, b, d) = (c & 1, (c >> 1) & 1, (c >> 2) & 1);
                            h[0] += (a ^ b) as u32;
                            h[1] += (a ^ d) as u32;
                            h[2] += (b ^ d) as u32;
                        }
                        h.iter().all(|&x| !boundary.violates((x as f64 / m as f64 - 0.5).abs(), delta))
                    })
                    .count() as u64;
                if rip_exact_three(m as u64, delta, boundary).unwrap().value != ratio(good, total) {
                    mismatches.push(format!("rip3 m={m} delta={delta} {boundary}"));
                }
            }
        }
    }
    let mut rng = stream(0x4A);
    let mut pairs = 0;
    for k in 0..10_000usize {
        let m = 1 + k % 130;
        let a = BitCode::random(m, &mut rng).unwrap();
        let b = BitCode::random(m, &mut rng).unwrap();
        let naive = (0..m).filter(|&j| a.get(j) != b.get(j)).count();
        if hamming_count(&a, &b).unwrap() != naive {
            mismatches.push(format!("hamming m={m}"));
        }
        pairs += 1;
    }
    outcome(
        mismatches.is_empty(),
        format!("birthday n<=3 m<=4, rip3 m<=7, {pairs} hamming pairs; mismatches: {mismatches:?}"),
    )
}

fn ratio(num: u64, den: u64) -> num_rational::BigRational {
    num_rational::BigRational::new(num.into(), den.into())
}
