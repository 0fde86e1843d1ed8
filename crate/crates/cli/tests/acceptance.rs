//! Acceptance criteria, one test per criterion. Each test prints a single
//! `[PASS]`/`[FAIL]` line; run with `--nocapture` to see them all.

use std::collections::{BTreeSet, VecDeque};
use std::f64::consts::LN_2;
use std::process::Command;
use std::time::{Duration, Instant};

use betagrowth::bconv::{local_dim_random, lq_spectrum_estimate};
use betagrowth::expansions::{
    count_prefixes, count_x_m, garsia_profile, kappa, random_rational, sparse_profile, verify_growth_bound,
};
use betagrowth::lyapunov::{
    dimension, estimate_gamma_mc, gamma_integer_case, gamma_multinacci_series, parry_chain, SeriesConfig,
};
use betagrowth::netautomaton::{Automaton, DEFAULT_STATE_CAP};
use betagrowth::numberfield::{format_rational, multinacci};
use betagrowth::{parse_beta, BetaSystem, Error, Exec};
use num_bigint::BigUint;
use num_rational::BigRational;
use num_traits::{One, Zero};
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

const EXEC: Exec = Exec::Parallel;

/// γ/log 2 and D for n = 2..=10 as published.
const TABLE: [(u32, f64, f64); 9] = [
    (2, 0.302, 1.0054),
    (3, 0.102500, 1.028876),
    (4, 0.041560, 1.012318),
    (5, 0.018426, 1.006510),
    (6, 0.008590, 1.003341),
    (7, 0.004123, 1.001695),
    (8, 0.002014, 1.000854),
    (9, 0.000993, 1.000429),
    (10, 0.000493, 1.000215),
];

fn verdict(id: u32, title: &str, pass: bool, detail: String) {
    println!("[{}] criterion {id:>2}: {title}: {detail}", if pass { "PASS" } else { "FAIL" });
    assert!(pass, "criterion {id} ({title}) failed: {detail}");
}

fn bin() -> Command {
    Command::new(env!("CARGO_BIN_EXE_betagrowth"))
}

fn run_bin(args: &[&str]) -> Vec<u8> {
    let out = bin().args(args).env_remove("BETAGROWTH_OUT_DIR").output().expect("binary runs");
    assert!(out.status.success(), "{args:?}: {}", String::from_utf8_lossy(&out.stderr));
    out.stdout
}

#[test]
fn c01_table_gamma_reproduction() {
    let t = Instant::now();
    let mut worst: f64 = 0.0;
    for &(n, g_ref, _) in &TABLE[1..] {
        let g = gamma_multinacci_series(n, &SeriesConfig::for_n(n, 1), EXEC).unwrap();
        assert_eq!(g.params.k_exact, Some(20));
        worst = worst.max((g.over_log2() - g_ref).abs());
    }
    let g2 = gamma_multinacci_series(2, &SeriesConfig::for_n(2, 1), EXEC).unwrap();
    let elapsed = t.elapsed();
    let n2 = g2.over_log2();
    let pass = worst <= 2e-5 && (n2 - 0.302).abs() <= 0.002 && elapsed < Duration::from_secs(120);
    verdict(
        1,
        "multinacci gamma/log 2",
        pass,
        format!("max |dev| n=3..10 = {worst:.2e} (tol 2e-5); n=2 hybrid = {n2:.6} (0.302 +- 0.002); {elapsed:.1?}"),
    );
}

#[test]
fn c02_dimension_column() {
    let mut devs = Vec::new();
    let mut pass = true;
    let mut d3 = 0.0;
    for &(n, _, d_ref) in &TABLE {
        let sys = multinacci(n).unwrap();
        let g = gamma_multinacci_series(n, &SeriesConfig::for_n(n, 1), EXEC).unwrap();
        let d = dimension(&g, &sys).value;
        let direct = (LN_2 - g.value) / sys.beta_f64().ln();
        pass &= (d - direct).abs() <= 1e-6;
        if n == 3 {
            d3 = d;
            pass &= (d - 1.020876).abs() <= 1e-6;
        } else {
            let dev = (d - d_ref).abs();
            pass &= dev <= 5e-5;
            devs.push(format!("n={n}: {d:.6} vs {d_ref} ({dev:.1e})"));
        }
    }
    let csv = String::from_utf8(run_bin(&["table1", "--n-range", "3..3"])).unwrap();
    let flagged = csv.lines().any(|l| l.starts_with("3,") && l.contains("misprint"));
    pass &= flagged;
    verdict(
        2,
        "dimension column",
        pass,
        format!("n=3 D = {d3:.6}, misprint flagged = {flagged}; {} (tol 5e-5)", devs.join(", ")),
    );
}

#[test]
fn c03_cross_method_gamma() {
    let t = Instant::now();
    let sys = multinacci(3).unwrap();
    let a = Automaton::build(&sys, DEFAULT_STATE_CAP).unwrap();
    let chain = parry_chain(&a).unwrap();
    let mc = estimate_gamma_mc(&chain, 100_000, 32, 1, EXEC).unwrap();
    let series = gamma_multinacci_series(3, &SeriesConfig::for_n(3, 1), EXEC).unwrap();
    let elapsed = t.elapsed();
    let diff = (mc.value - series.value).abs();
    let pass = diff <= 3.0 * mc.std_error && elapsed < Duration::from_secs(60);
    verdict(
        3,
        "tribonacci Monte-Carlo vs series",
        pass,
        format!(
            "mc {:.6} +- {:.2e}, series {:.6}, |diff| = {:.2} stderr; {elapsed:.1?}",
            mc.value,
            mc.std_error,
            series.value,
            diff / mc.std_error
        ),
    );
}

#[test]
fn c04_integer_case() {
    let sys4 = parse_beta("int:2", 4).unwrap();
    let exact = gamma_integer_case(&sys4).unwrap();
    let a = Automaton::build(&sys4, DEFAULT_STATE_CAP).unwrap();
    let chain = parry_chain(&a).unwrap();
    let mc = estimate_gamma_mc(&chain, 100_000, 32, 1, EXEC).unwrap();
    let sys2 = parse_beta("int:2", 2).unwrap();
    let zero = gamma_integer_case(&sys2).unwrap();
    let pass = exact.value == LN_2 && (mc.value - LN_2).abs() <= 3.0 * mc.std_error && zero.value == 0.0;
    verdict(
        4,
        "integer base",
        pass,
        format!(
            "m=4 closed form {} (log 2 = {LN_2}), mc {} +- {:.1e}; m=2 gamma = {}",
            exact.value, mc.value, mc.std_error, zero.value
        ),
    );
}

fn matrices_vs_dp(sys: &BetaSystem, points: usize, seed: u64) -> (usize, usize) {
    let a = Automaton::build(sys, DEFAULT_STATE_CAP).unwrap();
    let f = sys.field();
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let (mut checked, mut mismatches) = (0, 0);
    while checked < points {
        let z = sys.rational(random_rational(&mut rng, &BigRational::zero(), &BigRational::one()));
        let word = match a.coding_of_point(&z, 10) {
            Ok(w) => w,
            Err(Error::PartitionPoint(_)) => continue,
            Err(e) => panic!("{e}"),
        };
        let x = f.mul(&z, sys.right_end());
        for n in 0..=10 {
            if a.count_via_matrices(&word[..=n]).unwrap() != count_prefixes(sys, &x, n).unwrap() {
                mismatches += 1;
            }
        }
        checked += 1;
    }
    (checked, mismatches)
}

#[test]
fn c05_matrix_products_equal_prefix_counts() {
    let (g_pts, g_bad) = matrices_vs_dp(&parse_beta("golden", 2).unwrap(), 50, 5);
    let (t_pts, t_bad) = matrices_vs_dp(&multinacci(3).unwrap(), 50, 5);
    verdict(
        5,
        "matrix products vs prefix DP",
        g_bad == 0 && t_bad == 0,
        format!("golden {g_pts} points, {g_bad} mismatches; tribonacci {t_pts} points, {t_bad} mismatches; n <= 10"),
    );
}

fn reachable(a: &Automaton, from: usize, within: Option<&BTreeSet<usize>>) -> BTreeSet<usize> {
    let mut seen = BTreeSet::from([from]);
    let mut queue = VecDeque::from([from]);
    while let Some(i) = queue.pop_front() {
        for c in &a.states[i].children {
            if within.is_some_and(|w| !w.contains(&c.state)) {
                continue;
            }
            if seen.insert(c.state) {
                queue.push_back(c.state);
            }
        }
    }
    seen
}

fn automaton_identities(sys: &BetaSystem) -> Result<String, String> {
    let a = Automaton::build(sys, DEFAULT_STATE_CAP).map_err(|e| e.to_string())?;
    let f = sys.field();
    let ess: BTreeSet<usize> = a.essential.iter().copied().collect();
    for (i, s) in a.states.iter().enumerate() {
        let sum = s.children.iter().fold(f.zero(), |acc, c| &acc + &a.states[c.state].length);
        if f.mul(sys.rho(), &sum) != s.length {
            return Err(format!("length identity fails at state {}", i + 1));
        }
        if ess.contains(&i) {
            let inner = s
                .children
                .iter()
                .filter(|c| ess.contains(&c.state))
                .fold(f.zero(), |acc, c| &acc + &a.states[c.state].length);
            if f.mul(sys.rho(), &inner) != s.length {
                return Err(format!("restricted identity fails at state {}", i + 1));
            }
        }
    }
    if a.states[0].v() != 1 {
        return Err("v_1 != 1".into());
    }
    let words = a.codings(12);
    for w in &words {
        let row = a.row_vector(w).map_err(|e| e.to_string())?;
        if row.iter().any(BigUint::is_zero) {
            return Err(format!("zero entry along {w:?}"));
        }
    }
    for &i in &ess {
        if a.states[i].children.iter().any(|c| !ess.contains(&c.state)) {
            return Err("essential class not forward closed".into());
        }
        if reachable(&a, i, Some(&ess)) != ess {
            return Err("essential class not strongly connected".into());
        }
    }
    for i in 0..a.len() {
        if reachable(&a, i, None).is_disjoint(&ess) {
            return Err(format!("essential class unreachable from state {}", i + 1));
        }
    }
    Ok(format!("{} states, {} essential, {} words of length 13", a.len(), ess.len(), words.len()))
}

#[test]
fn c06_automaton_identities() {
    let g = automaton_identities(&parse_beta("golden", 2).unwrap());
    let t = automaton_identities(&multinacci(3).unwrap());
    let pass = g.is_ok() && t.is_ok();
    let show = |r: &Result<String, String>| match r {
        Ok(s) => s.clone(),
        Err(e) => format!("error: {e}"),
    };
    verdict(6, "automaton identities", pass, format!("golden: {}; tribonacci: {}", show(&g), show(&t)));
}

#[test]
fn c07_growth_bound() {
    let t = Instant::now();
    let mut parts = Vec::new();
    let mut pass = true;
    for (spec, k_listed) in [("1.3", "1/6"), ("1.4", "1/6"), ("1.5", "1/8")] {
        let sys = parse_beta(spec, 2).unwrap();
        let k = format_rational(&kappa(&sys).unwrap().kappa);
        let mut rng = ChaCha8Rng::seed_from_u64(1);
        let f = sys.field();
        let (mut fail, mut fail_inside, mut inside, mut shifted_fail) = (0, 0, 0, 0);
        for _ in 0..100 {
            let z = random_rational(&mut rng, &BigRational::zero(), &BigRational::one());
            let x = f.mul(&sys.rational(z), sys.right_end());
            let r = verify_growth_bound(&sys, &x, 24, EXEC).unwrap();
            inside += r.in_switch_interval as usize;
            fail += !r.pass as usize;
            fail_inside += (!r.pass && r.in_switch_interval) as usize;
            shifted_fail += !r.pass_shifted as usize;
        }
        pass &= fail == 0;
        parts.push(format!(
            "beta {spec}: kappa {k} (listed {k_listed}), {fail}/100 violate, \
             {fail_inside}/{inside} inside [1/beta, 1/(beta(beta-1))], delayed bound violated {shifted_fail}"
        ));
    }
    let elapsed = t.elapsed();
    pass &= elapsed < Duration::from_secs(120);
    verdict(7, "growth lower bound", pass, format!("{}; {elapsed:.1?}", parts.join("; ")));
}

#[test]
fn c08_sparse_counts() {
    let sys = parse_beta("golden", 2).unwrap();
    let xm: Vec<u64> = (1..=6).map(|m| count_x_m(&sys, m).unwrap()).collect();
    let xm_ok = xm.iter().zip(1..).all(|(&c, m)| c == m);
    let p = sparse_profile(&sys, &[1, 2, 3], EXEC).unwrap();
    let counts: Vec<&str> = p.checkpoints.iter().map(|c| c.count.as_str()).collect();
    let products: Vec<&str> = p.checkpoints.iter().map(|c| c.product_m.as_str()).collect();
    let pass = xm_ok && counts == ["1", "2", "6"] && counts == products && p.log_ratio_decreasing;
    verdict(
        8,
        "sparse expansions",
        pass,
        format!(
            "#X_m for m=1..6 = {xm:?} (expected m); checkpoints {counts:?} (expected [1, 2, 6] = prod m_j {products:?}); \
             log N/n decreasing = {}",
            p.log_ratio_decreasing
        ),
    );
}

#[test]
fn c09_garsia_diagnostics() {
    let sys = parse_beta("golden", 2).unwrap();
    let rows = garsia_profile(&sys, 25, EXEC).unwrap();
    let c = rows.iter().map(|r| r.normalized_min_gap).fold(f64::INFINITY, f64::min);
    // Sums at spacing ≥ cβ⁻ⁿ inside [0, 1/(β−1)], and their β⁻ⁿ-scaled copies cover it.
    let hi = 1.0 / ((sys.beta_f64() - 1.0) * c) + 1.0;
    let lo_seen = rows.iter().map(|r| r.normalized_count).fold(f64::INFINITY, f64::min);
    let hi_seen = rows.iter().map(|r| r.normalized_count).fold(0.0, f64::max);
    let pass = c > 0.0 && lo_seen >= 1.0 && hi_seen <= hi;
    verdict(
        9,
        "distinct sums",
        pass,
        format!("normalized counts in [{lo_seen:.4}, {hi_seen:.4}] within [1, {hi:.4}]; empirical C = {c:.6}"),
    );
}

#[test]
fn c10_measure_calibration() {
    let golden = parse_beta("golden", 2).unwrap();
    let levels: Vec<usize> = (12..=18).collect();
    let tau = lq_spectrum_estimate(&golden, &[0.0, 1.0], &levels, EXEC).unwrap();
    let (t0, t1) = (tau[0].tau, tau[1].tau);
    let deep: Vec<usize> = (10..=30).step_by(2).collect();
    let dyadic = local_dim_random(&parse_beta("int:2", 2).unwrap(), 16, &deep, 1, EXEC).unwrap();
    let typical = local_dim_random(&golden, 256, &deep, 1, EXEC).unwrap();
    let pass = (-0.02..=0.02).contains(&t1)
        && (-1.05..=-0.95).contains(&t0)
        && (dyadic.mean_slope - 1.0).abs() <= 0.01
        && (typical.mean_slope - 1.0054).abs() <= 0.01;
    verdict(
        10,
        "measure calibration",
        pass,
        format!(
            "tau(1) = {t1:.4}, tau(0) = {t0:.4}; beta=2 slope {:.4}; golden slope {:.4} +- {:.4} (256 points, levels 10..30)",
            dyadic.mean_slope, typical.mean_slope, typical.std_error
        ),
    );
}

#[test]
fn c11_determinism() {
    let dir = std::env::temp_dir().join(format!("betagrowth-acceptance-{}", std::process::id()));
    std::fs::create_dir_all(&dir).unwrap();
    let mut table = Vec::new();
    for i in 0..2 {
        let p = dir.join(format!("table1-{i}.csv"));
        let p = p.to_str().unwrap();
        run_bin(&["table1", "--n-range", "2..10", "--k-exact", "20", "--seed", "7", "--out", p]);
        table.push(std::fs::read(p).unwrap());
    }
    let args =
        ["gamma", "--beta", "multinacci:3", "--method", "mc", "--paths", "20000", "--chains", "8", "--seed", "7"];
    let g1 = run_bin(&args);
    let g2 = run_bin(&args);
    std::fs::remove_dir_all(&dir).ok();
    let pass = table[0] == table[1] && g1 == g2 && !g1.is_empty();
    verdict(
        11,
        "determinism",
        pass,
        format!(
            "table1 {} bytes identical = {}; gamma mc {} bytes identical = {}",
            table[0].len(),
            table[0] == table[1],
            g1.len(),
            g1 == g2
        ),
    );
}
