use betagrowth::expansions::{count_prefixes, kappa, prefix_counts};
use betagrowth::lyapunov::{estimate_gamma_mc, gamma_integer_case, parry_chain};
use betagrowth::netautomaton::{Automaton, DEFAULT_STATE_CAP};
use betagrowth::numberfield::{format_rational, parse_rational};
use betagrowth::{parse_beta, Exec};
use serde_json::json;

use crate::{CliError, Ctx, Report};

type Check = Result<(), String>;

fn ensure(cond: bool, msg: impl Into<String>) -> Check {
    if cond {
        Ok(())
    } else {
        Err(msg.into())
    }
}

fn core(e: betagrowth::Error) -> String {
    e.to_string()
}

fn golden_count() -> Check {
    let sys = parse_beta("golden", 2).map_err(core)?;
    let c = count_prefixes(&sys, &sys.rational(parse_rational("1").map_err(core)?), 2).map_err(core)?;
    ensure(c == 3u32.into(), format!("expected 3, got {c}"))
}

fn counts_monotone() -> Check {
    let sys = parse_beta("golden", 2).map_err(core)?;
    for s in ["1/3", "2/5", "7/10"] {
        let x = sys.rational(parse_rational(s).map_err(core)?);
        let c = prefix_counts(&sys, &x, 16, Exec::Sequential).map_err(core)?;
        ensure(c.windows(2).all(|w| w[1] >= w[0]), format!("counts decrease at x = {s}"))?;
    }
    Ok(())
}

fn kappa_three_halves() -> Check {
    let sys = parse_beta("3/2", 2).map_err(core)?;
    let k = kappa(&sys).map_err(core)?;
    let got = format_rational(&k.kappa);
    ensure(got == "1/8", format!("expected 1/8, got {got}"))
}

fn automaton_identities() -> Check {
    let sys = parse_beta("golden", 2).map_err(core)?;
    let a = Automaton::build(&sys, DEFAULT_STATE_CAP).map_err(core)?;
    a.check_length_identities().map_err(core)?;
    ensure(a.states[0].v() == 1, "initial state has v != 1")?;
    ensure(a.essential_class().map_err(core)? == a.essential, "essential class is not stable")?;
    for w in a.codings(8) {
        ensure(a.row_vector(&w).map_err(core)?.iter().all(|e| *e > 0u32.into()), "zero entry in a product")?;
    }
    Ok(())
}

fn matrices_match_dp() -> Check {
    let sys = parse_beta("golden", 2).map_err(core)?;
    let a = Automaton::build(&sys, DEFAULT_STATE_CAP).map_err(core)?;
    let f = sys.field();
    for s in ["1/3", "2/5", "5/7"] {
        let z = sys.rational(parse_rational(s).map_err(core)?);
        let w = a.coding_of_point(&z, 8).map_err(core)?;
        let x = f.mul(&z, sys.right_end());
        for n in 0..=8 {
            let m = a.count_via_matrices(&w[..=n]).map_err(core)?;
            let d = count_prefixes(&sys, &x, n).map_err(core)?;
            ensure(m == d, format!("z = {s}, n = {n}: matrices {m}, dp {d}"))?;
        }
    }
    Ok(())
}

fn integer_case() -> Check {
    let sys = parse_beta("int:2", 4).map_err(core)?;
    let g = gamma_integer_case(&sys).map_err(core)?;
    ensure(g.over_log2() == 1.0, format!("gamma/log 2 = {}", g.over_log2()))?;
    let sys = parse_beta("int:2", 2).map_err(core)?;
    let g = gamma_integer_case(&sys).map_err(core)?;
    ensure(g.value == 0.0, format!("gamma = {} for m = 2", g.value))
}

fn mc_reproducible(ctx: &Ctx) -> Check {
    let sys = parse_beta("golden", 2).map_err(core)?;
    let a = Automaton::build(&sys, DEFAULT_STATE_CAP).map_err(core)?;
    let chain = parry_chain(&a).map_err(core)?;
    let g1 = estimate_gamma_mc(&chain, 2000, 4, ctx.seed, ctx.exec).map_err(core)?;
    let g2 = estimate_gamma_mc(&chain, 2000, 4, ctx.seed, Exec::Sequential).map_err(core)?;
    ensure(g1.value.to_bits() == g2.value.to_bits(), "repeated runs differ")?;
    ensure(g1.value > 0.0 && g1.value < std::f64::consts::LN_2, format!("gamma = {} out of range", g1.value))
}

pub fn run(ctx: &Ctx) -> Result<Report, CliError> {
    let checks: Vec<(&str, Check)> = vec![
        ("golden prefix count at x=1, n=2", golden_count()),
        ("prefix counts are monotone", counts_monotone()),
        ("kappa(3/2) = 1/8", kappa_three_halves()),
        ("golden automaton length identities and positivity", automaton_identities()),
        ("matrix products equal prefix counts", matrices_match_dp()),
        ("integer case closed form", integer_case()),
        ("Monte-Carlo estimate is reproducible", mc_reproducible(ctx)),
    ];
    let mut failed = Vec::new();
    let rows: Vec<_> = checks
        .iter()
        .map(|(name, r)| {
            let pass = r.is_ok();
            eprintln!("{} {name}", if pass { "PASS" } else { "FAIL" });
            if let Err(e) = r {
                eprintln!("     {e}");
                failed.push(format!("{name}: {e}"));
            }
            json!({ "name": name, "pass": pass, "detail": r.as_ref().err() })
        })
        .collect();
    if !failed.is_empty() {
        return Err(CliError::Selftest(failed.join("; ")));
    }
    Ok(Report::Json(json!({ "checks": rows, "pass": true })))
}
