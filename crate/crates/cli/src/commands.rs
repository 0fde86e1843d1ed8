use betagrowth::bconv::{local_dim_estimate, local_dim_random, lq_spectrum_estimate, LocalDimEstimate};
use betagrowth::expansions::{
    branch_tree, count_x_m, garsia_profile, kappa as kappa_of, prefix_counts, simulate_k_beta, sparse_profile,
    verify_growth_bound,
};
use betagrowth::lyapunov::{
    dimension, estimate_gamma_mc, gamma_integer_case, gamma_multinacci_series, parry_chain, GammaEstimate, SeriesConfig,
};
use betagrowth::netautomaton::Automaton;
use betagrowth::numberfield::multinacci;
use betagrowth::{parse_beta, BetaSystem};
use serde::Serialize;
use serde_json::{json, Value};

use crate::parse::{parse_f64_list, parse_levels, parse_point, parse_u32_list};
use crate::{
    AutomatonArgs, BetaArgs, BoundArgs, CliError, CountArgs, Ctx, DimsArgs, GammaArgs, GraphFormat, Method, Report,
    SimulateArgs, SparseArgs, SumsArgs, Table1Args, TableFormat, TauArgs, TreeArgs,
};

type Out = Result<Report, CliError>;

fn system(a: &BetaArgs) -> Result<BetaSystem, CliError> {
    Ok(parse_beta(&a.beta, a.m)?)
}

fn usage(e: String) -> CliError {
    CliError::Usage(e)
}

fn to_json<T: Serialize>(v: &T) -> Value {
    serde_json::to_value(v).expect("report serializes")
}

fn base_info(sys: &BetaSystem) -> Value {
    json!({
        "label": sys.label(),
        "minimal_polynomial": sys.field().poly().to_string(),
        "approx": sys.beta_f64(),
        "m": sys.m(),
        "pisot": sys.is_pisot(),
    })
}

pub fn count(ctx: &Ctx, a: &CountArgs) -> Out {
    let sys = system(&a.base)?;
    let x = parse_point(&sys, &a.x)?;
    let counts = prefix_counts(&sys, &x, a.n, ctx.exec)?;
    Ok(Report::Json(json!({
        "beta": base_info(&sys),
        "x": a.x,
        "n": a.n,
        "count": counts[a.n].to_string(),
        "counts": counts.iter().map(|c| c.to_string()).collect::<Vec<_>>(),
        "method": "prefix-dp",
    })))
}

pub fn tree(_ctx: &Ctx, a: &TreeArgs) -> Out {
    let sys = system(&a.base)?;
    let x = parse_point(&sys, &a.x)?;
    let t = branch_tree(&sys, &x, a.depth, a.cap)?;
    let f = sys.field();
    let nodes: Vec<Value> = t
        .nodes
        .iter()
        .enumerate()
        .map(|(i, nd)| {
            json!({
                "id": i,
                "parent": nd.parent,
                "digit": nd.digit,
                "depth": nd.depth,
                "remainder": f.to_f64(&nd.remainder),
            })
        })
        .collect();
    let words: Vec<String> =
        t.leaves().map(|i| t.word(i).iter().map(u32::to_string).collect::<Vec<_>>().join(",")).collect();
    Ok(Report::Json(json!({
        "beta": base_info(&sys),
        "x": a.x,
        "depth": a.depth,
        "leaf_count": words.len(),
        "words": words,
        "nodes": nodes,
    })))
}

pub fn kappa(_ctx: &Ctx, a: &BetaArgs) -> Out {
    let sys = system(a)?;
    let k = kappa_of(&sys)?;
    Ok(Report::Json(json!({ "beta": base_info(&sys), "kappa": to_json(&k) })))
}

pub fn bound(ctx: &Ctx, a: &BoundArgs) -> Out {
    let sys = system(&a.base)?;
    let x = parse_point(&sys, &a.x)?;
    let r = verify_growth_bound(&sys, &x, a.n, ctx.exec)?;
    Ok(Report::Json(json!({ "beta": base_info(&sys), "x": a.x, "report": to_json(&r) })))
}

pub fn sums(ctx: &Ctx, a: &SumsArgs) -> Out {
    let sys = system(&a.base)?;
    let rows = garsia_profile(&sys, a.n, ctx.exec)?;
    let lo = rows.iter().map(|r| r.normalized_count).fold(f64::INFINITY, f64::min);
    let hi = rows.iter().map(|r| r.normalized_count).fold(0.0, f64::max);
    let gap = rows.iter().map(|r| r.normalized_min_gap).fold(f64::INFINITY, f64::min);
    Ok(Report::Json(json!({
        "beta": base_info(&sys),
        "rows": to_json(&rows),
        "normalized_count_window": [lo, hi],
        "min_normalized_gap": gap,
    })))
}

pub fn sparse(ctx: &Ctx, a: &SparseArgs) -> Out {
    let sys = parse_beta("golden", 2)?;
    let blocks = parse_u32_list(&a.blocks).map_err(usage)?;
    let profile = sparse_profile(&sys, &blocks, ctx.exec)?;
    let x_m: Vec<Value> =
        (1..=a.x_m).map(|m| Ok(json!({ "m": m, "count": count_x_m(&sys, m)? }))).collect::<Result<_, CliError>>()?;
    Ok(Report::Json(json!({ "profile": to_json(&profile), "x_m": x_m })))
}

pub fn simulate(ctx: &Ctx, a: &SimulateArgs) -> Out {
    let sys = system(&a.base)?;
    let x = parse_point(&sys, &a.x)?;
    let s = simulate_k_beta(&sys, &x, a.steps, ctx.seed)?;
    Ok(Report::Json(json!({ "beta": base_info(&sys), "x": a.x, "simulation": to_json(&s) })))
}

pub fn automaton(_ctx: &Ctx, a: &AutomatonArgs) -> Out {
    let sys = system(&a.base)?;
    let aut = Automaton::build(&sys, a.cap)?;
    aut.check_length_identities()?;
    Ok(match a.format {
        GraphFormat::Json => Report::Json(to_json(&aut.to_json())),
        GraphFormat::Dot => Report::Dot(aut.to_dot()),
    })
}

/// n when `sys` is the n-th multinacci base with two digits.
fn multinacci_index(sys: &BetaSystem) -> Option<u32> {
    if sys.m() != 2 {
        return None;
    }
    (2..=10).find(|&n| multinacci(n).is_ok_and(|s| s.field().poly().coeffs() == sys.field().poly().coeffs()))
}

fn series_config(n: u32, seed: u64, k_exact: Option<usize>) -> SeriesConfig {
    let mut cfg = SeriesConfig::for_n(n, seed);
    if let Some(k) = k_exact {
        cfg.k_exact = k;
        if n != 2 {
            cfg.k_tail = k;
        }
    }
    cfg
}

pub fn gamma(ctx: &Ctx, a: &GammaArgs) -> Out {
    let sys = system(&a.base)?;
    let mut extra = json!({});
    let g: GammaEstimate = match a.method {
        Method::Integer => gamma_integer_case(&sys)?,
        Method::Series => {
            let n = multinacci_index(&sys).ok_or_else(|| {
                CliError::Core(betagrowth::Error::Hypothesis(
                    "the series method needs a multinacci base with m = 2".into(),
                ))
            })?;
            extra = json!({ "multinacci_index": n });
            gamma_multinacci_series(n, &series_config(n, ctx.seed, a.k_exact), ctx.exec)?
        }
        Method::Mc => {
            let aut = Automaton::build(&sys, a.cap)?;
            let chain = parry_chain(&aut)?;
            extra = json!({
                "automaton_states": aut.len(),
                "essential_states": chain.len(),
                "row_sum_error": chain.row_sum_error(),
                "stationarity_error": chain.stationarity_error(),
            });
            estimate_gamma_mc(&chain, a.paths, a.chains, ctx.seed, ctx.exec)?
        }
    };
    let d = dimension(&g, &sys);
    let ln2 = std::f64::consts::LN_2;
    Ok(Report::Json(json!({
        "beta": base_info(&sys),
        "gamma": to_json(&g),
        "gamma_over_log2": g.over_log2(),
        "gamma_error_over_log2": g.total_error() / ln2,
        "dimension": to_json(&d),
        "diagnostics": extra,
    })))
}

/// Reference γ/log 2 and D values for the multinacci family, n = 2..=10.
const REFERENCE: [(u32, f64, f64); 9] = [
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

#[derive(Serialize)]
pub struct Table1Row {
    pub n: u32,
    pub beta_decimal: String,
    pub gamma_over_log2: String,
    pub gamma_error: String,
    #[serde(rename = "D")]
    pub d: String,
    #[serde(rename = "D_error")]
    pub d_error: String,
    pub method: String,
    pub note: String,
}

/// Flags a reference D that disagrees with the D implied by the reference γ.
fn reference_note(n: u32, beta: f64) -> String {
    let Some(&(_, g, d_ref)) = REFERENCE.iter().find(|r| r.0 == n) else {
        return String::new();
    };
    let implied = (1.0 - g) * std::f64::consts::LN_2 / beta.ln();
    if (implied - d_ref).abs() > 5e-5 {
        format!("suspected misprint: reference D {d_ref} but reference gamma implies {implied:.6}")
    } else {
        String::new()
    }
}

pub fn table1(ctx: &Ctx, a: &Table1Args) -> Out {
    let ns = parse_levels(&a.n_range).map_err(usage)?;
    let mut w = csv::Writer::from_writer(Vec::new());
    for n in ns {
        let n = u32::try_from(n).map_err(|_| usage(format!("bad index {n}")))?;
        let sys = multinacci(n)?;
        let cfg = series_config(n, ctx.seed, a.k_exact);
        let g = gamma_multinacci_series(n, &cfg, ctx.exec)?;
        let d = dimension(&g, &sys);
        let method = if cfg.k_tail > cfg.k_exact { "series+sampled-tail" } else { "series" };
        w.serialize(Table1Row {
            n,
            beta_decimal: format!("{:.6}", sys.beta_f64()),
            gamma_over_log2: format!("{:.8}", g.over_log2()),
            gamma_error: format!("{:.2e}", g.total_error() / std::f64::consts::LN_2),
            d: format!("{:.8}", d.value),
            d_error: format!("{:.2e}", d.error),
            method: format!("{method}(k_exact={},k_tail={})", cfg.k_exact, cfg.k_tail),
            note: reference_note(n, sys.beta_f64()),
        })
        .map_err(|e| CliError::Io(e.into()))?;
    }
    let bytes = w.into_inner().map_err(|e| CliError::Io(e.into_error()))?;
    Ok(Report::Csv(String::from_utf8(bytes).expect("csv is utf-8")))
}

#[derive(Serialize)]
struct DimRow<'a> {
    x: &'a str,
    slope: f64,
    intercept: f64,
    residual: f64,
    points: usize,
}

fn dim_row(e: &LocalDimEstimate) -> DimRow<'_> {
    DimRow { x: &e.x, slope: e.fit.slope, intercept: e.fit.intercept, residual: e.fit.residual, points: e.fit.points }
}

pub fn dims(ctx: &Ctx, a: &DimsArgs) -> Out {
    let sys = system(&a.base)?;
    let levels = parse_levels(&a.levels).map_err(usage)?;
    let (estimates, summary) = if let Some(k) = a.x.strip_prefix("random:") {
        let k: usize = k.parse().map_err(|_| usage(format!("bad sample count {k:?}")))?;
        let r = local_dim_random(&sys, k, &levels, ctx.seed, ctx.exec)?;
        let s = json!({ "mean_slope": r.mean_slope, "std_error": r.std_error, "samples": k });
        (r.samples, Some(s))
    } else {
        let xs: Vec<_> = a.x.split(',').map(|s| parse_point(&sys, s)).collect::<Result<_, _>>()?;
        let est = xs.iter().map(|x| local_dim_estimate(&sys, x, &levels, ctx.exec)).collect::<Result<Vec<_>, _>>()?;
        (est, None)
    };
    Ok(match a.format {
        TableFormat::Json => Report::Json(json!({
            "beta": base_info(&sys),
            "levels": levels,
            "estimates": to_json(&estimates),
            "summary": summary,
        })),
        TableFormat::Csv => {
            let mut w = csv::Writer::from_writer(Vec::new());
            for e in &estimates {
                w.serialize(dim_row(e)).map_err(|e| CliError::Io(e.into()))?;
            }
            let bytes = w.into_inner().map_err(|e| CliError::Io(e.into_error()))?;
            let mut s = String::from_utf8(bytes).expect("csv is utf-8");
            if let Some(v) = summary {
                s.push_str(&format!("# summary: {v}\n"));
            }
            Report::Csv(s)
        }
    })
}

#[derive(Serialize)]
struct TauRow {
    q: f64,
    tau_hat: f64,
    residual: f64,
}

pub fn tau(ctx: &Ctx, a: &TauArgs) -> Out {
    let sys = system(&a.base)?;
    let qs = parse_f64_list(&a.q_list).map_err(usage)?;
    let levels = parse_levels(&a.levels).map_err(usage)?;
    let est = lq_spectrum_estimate(&sys, &qs, &levels, ctx.exec)?;
    Ok(match a.format {
        TableFormat::Json => {
            Report::Json(json!({ "beta": base_info(&sys), "levels": levels, "estimates": to_json(&est) }))
        }
        TableFormat::Csv => {
            let mut w = csv::Writer::from_writer(Vec::new());
            for e in &est {
                w.serialize(TauRow { q: e.q, tau_hat: e.tau, residual: e.residual })
                    .map_err(|e| CliError::Io(e.into()))?;
            }
            let bytes = w.into_inner().map_err(|e| CliError::Io(e.into_error()))?;
            Report::Csv(String::from_utf8(bytes).expect("csv is utf-8"))
        }
    })
}
