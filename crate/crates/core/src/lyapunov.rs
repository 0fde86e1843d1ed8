//! The growth exponent γ and the local dimension D = (log m − γ)/log β.
//!
//! Three routes: Kingman Monte-Carlo along the Parry chain of the automaton,
//! the closed series for multinacci bases with m = 2, and the integer case
//! β | m where γ = log(m/β).

use crate::error::{Error, Result};
use crate::exec::{self, Exec};
use crate::netautomaton::Automaton;
use crate::numberfield::{multinacci, BetaSystem};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::Serialize;
use std::f64::consts::LN_2;

/// Steps between renormalizations of the running row vector.
pub const RENORM_EVERY: usize = 32;
/// Sampling streams for the series route start here so they never coincide
/// with chain indices.
const SERIES_STREAM_BASE: u64 = 1 << 32;

#[derive(Clone, Debug)]
pub struct ParryChain {
    /// Automaton indices of the states of Ω̂.
    pub states: Vec<usize>,
    pub p: Vec<f64>,
    /// Row-stochastic matrix over `states`.
    pub matrix: Vec<Vec<f64>>,
    /// Per row: (column, cumulative probability) for sampling.
    cumulative: Vec<Vec<(usize, f64)>>,
    /// T(i, j) in floating point, indexed by positions in `states`.
    transfer: Vec<Vec<Option<Vec<Vec<f64>>>>>,
}

/// Builds P_ij = ρℓⱼ/ℓᵢ on Ω̂ and its stationary vector.
pub fn parry_chain(a: &Automaton) -> Result<ParryChain> {
    let f = a.sys.field();
    let states = a.essential.clone();
    let pos: std::collections::HashMap<usize, usize> = states.iter().enumerate().map(|(k, &i)| (i, k)).collect();
    let r = states.len();
    let mut matrix = vec![vec![0.0; r]; r];
    let mut transfer = vec![vec![None; r]; r];
    for (k, &i) in states.iter().enumerate() {
        let li = &a.states[i].length;
        let mut row_sum = f.zero();
        for c in &a.states[i].children {
            let j = c.state;
            let kj = *pos.get(&j).ok_or_else(|| Error::Invariant("essential class is not forward closed".into()))?;
            let pij = f.div(&f.mul(a.sys.rho(), &a.states[j].length), li).expect("ℓ > 0");
            row_sum = &row_sum + &pij;
            matrix[k][kj] = f.to_f64(&pij);
            let t = &a.transitions[&(i, j)];
            transfer[k][kj] = Some(t.iter().map(|r| r.iter().map(|&e| e as f64).collect()).collect());
        }
        if row_sum != f.one() {
            return Err(Error::Invariant(format!("row {k} of the Parry matrix does not sum to 1")));
        }
    }
    // Lazy power iteration (P + I)/2 sidesteps periodicity.
    let mut p = vec![1.0 / r as f64; r];
    let mut residual = f64::INFINITY;
    for _ in 0..1_000_000 {
        let q = vec_mat(&p, &matrix);
        let next: Vec<f64> = p.iter().zip(&q).map(|(a, b)| 0.5 * (a + b)).collect();
        let s: f64 = next.iter().sum();
        p = next.into_iter().map(|x| x / s).collect();
        residual = vec_mat(&p, &matrix).iter().zip(&p).map(|(a, b)| (a - b).abs()).sum();
        if residual < 1e-14 {
            break;
        }
    }
    if residual >= 1e-12 || p.iter().any(|&x| x.partial_cmp(&0.0) != Some(std::cmp::Ordering::Greater)) {
        return Err(Error::Invariant(format!("stationary vector did not converge (residual {residual:e})")));
    }
    let cumulative = matrix
        .iter()
        .map(|row| {
            let mut acc = 0.0;
            row.iter()
                .enumerate()
                .filter(|(_, &x)| x > 0.0)
                .map(|(j, &x)| {
                    acc += x;
                    (j, acc)
                })
                .collect()
        })
        .collect();
    Ok(ParryChain { states, p, matrix, cumulative, transfer })
}

fn vec_mat(v: &[f64], m: &[Vec<f64>]) -> Vec<f64> {
    let mut out = vec![0.0; m.first().map_or(0, Vec::len)];
    for (x, row) in v.iter().zip(m) {
        for (o, y) in out.iter_mut().zip(row) {
            *o += x * y;
        }
    }
    out
}

impl ParryChain {
    pub fn len(&self) -> usize {
        self.states.len()
    }

    pub fn is_empty(&self) -> bool {
        self.states.is_empty()
    }

    /// Largest deviation of a row sum from 1.
    pub fn row_sum_error(&self) -> f64 {
        self.matrix.iter().map(|r| (r.iter().sum::<f64>() - 1.0).abs()).fold(0.0, f64::max)
    }

    /// ‖pP − p‖₁.
    pub fn stationarity_error(&self) -> f64 {
        vec_mat(&self.p, &self.matrix).iter().zip(&self.p).map(|(a, b)| (a - b).abs()).sum()
    }

    fn draw(cum: &[(usize, f64)], u: f64) -> usize {
        let total = cum.last().expect("nonempty row").1;
        let u = u * total;
        cum.iter().find(|(_, c)| u < *c).unwrap_or(cum.last().unwrap()).0
    }

    /// A P-path of `len` states started from p, as positions in `states`.
    pub fn sample_path<R: Rng>(&self, rng: &mut R, len: usize) -> Vec<usize> {
        let mut cum0 = Vec::with_capacity(self.len());
        let mut acc = 0.0;
        for (j, &x) in self.p.iter().enumerate() {
            acc += x;
            cum0.push((j, acc));
        }
        let mut path = Vec::with_capacity(len);
        if len == 0 {
            return path;
        }
        let mut s = Self::draw(&cum0, rng.random());
        path.push(s);
        for _ in 1..len {
            s = Self::draw(&self.cumulative[s], rng.random());
            path.push(s);
        }
        path
    }

    /// log‖T(x₁,x₂)⋯T(x_{n−1},xₙ)‖ along `path`.
    pub fn log_norm(&self, path: &[usize]) -> f64 {
        let mut v = vec![1.0; self.transfer_dim(path[0])];
        let mut log_scale = Neumaier::default();
        for (step, w) in path.windows(2).enumerate() {
            v = self.step(&v, w[0], w[1]);
            if (step + 1) % RENORM_EVERY == 0 {
                let s: f64 = v.iter().sum();
                log_scale.add(s.ln());
                v.iter_mut().for_each(|x| *x /= s);
            }
        }
        log_scale.add(v.iter().sum::<f64>().ln());
        log_scale.total()
    }

    fn transfer_dim(&self, k: usize) -> usize {
        self.transfer[k].iter().flatten().next().map_or(1, Vec::len)
    }

    fn step(&self, v: &[f64], i: usize, j: usize) -> Vec<f64> {
        let t = self.transfer[i][j].as_ref().expect("edge on path");
        vec_mat(v, t)
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
#[serde(rename_all = "kebab-case")]
pub enum GammaMethod {
    Mc,
    Series,
    IntegerCase,
}

#[derive(Clone, Debug, Default, Serialize)]
pub struct GammaParams {
    #[serde(skip_serializing_if = "Option::is_none")]
    pub path_len: Option<usize>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub chains: Option<usize>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub burn_in: Option<usize>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub k_exact: Option<usize>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub k_tail: Option<usize>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub mc_budget: Option<usize>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub seed: Option<u64>,
}

/// γ in nats.
#[derive(Clone, Debug, Serialize)]
pub struct GammaEstimate {
    pub value: f64,
    /// One standard error of the stochastic part (0 for exact routes).
    pub std_error: f64,
    /// Bound on the neglected series tail and summation rounding (0 where not applicable).
    pub truncation_bound: f64,
    pub method: GammaMethod,
    pub params: GammaParams,
}

impl GammaEstimate {
    /// Standard error plus truncation bound.
    pub fn total_error(&self) -> f64 {
        self.std_error + self.truncation_bound
    }

    pub fn over_log2(&self) -> f64 {
        self.value / LN_2
    }
}

/// Neumaier compensated sum.
#[derive(Default)]
struct Neumaier {
    sum: f64,
    comp: f64,
}

impl Neumaier {
    fn add(&mut self, x: f64) {
        let t = self.sum + x;
        if self.sum.abs() >= x.abs() {
            self.comp += (self.sum - t) + x;
        } else {
            self.comp += (x - t) + self.sum;
        }
        self.sum = t;
    }

    fn total(&self) -> f64 {
        self.sum + self.comp
    }
}

/// Kingman estimator: each chain runs `burn_in` steps to align the row
/// vector with the dominant direction, then measures the log growth over
/// `path_len` further steps.
pub fn estimate_gamma_mc(
    chain: &ParryChain,
    path_len: usize,
    n_chains: usize,
    seed: u64,
    exec: Exec,
) -> Result<GammaEstimate> {
    if path_len < 1000 {
        return Err(Error::BadInput("path length must be at least 1000".into()));
    }
    if n_chains < 2 {
        return Err(Error::BadInput("at least two chains are needed".into()));
    }
    let burn_in = (path_len / 10).max(100);
    let per_chain = exec::map_range(exec, n_chains, |c| -> Result<f64> {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        rng.set_stream(c as u64);
        let path = chain.sample_path(&mut rng, burn_in + path_len + 1);
        let mut v = vec![1.0; chain.transfer_dim(path[0])];
        let mut log_scale = Neumaier::default();
        for (step, w) in path.windows(2).enumerate() {
            v = chain.step(&v, w[0], w[1]);
            if (step + 1) % RENORM_EVERY == 0 || step + 1 == burn_in {
                let s: f64 = v.iter().sum();
                if !(s.is_finite() && s > 0.0) {
                    return Err(Error::Invariant("row vector left the finite positive range".into()));
                }
                if step + 1 > burn_in {
                    log_scale.add(s.ln());
                }
                v.iter_mut().for_each(|x| *x /= s);
            }
        }
        log_scale.add(v.iter().sum::<f64>().ln());
        Ok(log_scale.total() / path_len as f64)
    });
    let vals: Vec<f64> = per_chain.into_iter().collect::<Result<_>>()?;
    let n = vals.len() as f64;
    let mean = vals.iter().sum::<f64>() / n;
    let var = vals.iter().map(|x| (x - mean).powi(2)).sum::<f64>() / (n - 1.0);
    // Floor at the rounding level so degenerate cases (every chain exact)
    // still carry a usable error bar.
    let floor = 16.0 * f64::EPSILON * mean.abs().max(1.0);
    Ok(GammaEstimate {
        value: mean,
        std_error: (var / n).sqrt().max(floor),
        truncation_bound: 0.0,
        method: GammaMethod::Mc,
        params: GammaParams {
            path_len: Some(path_len),
            chains: Some(n_chains),
            burn_in: Some(burn_in),
            seed: Some(seed),
            ..Default::default()
        },
    })
}

// ---------------------------------------------------------------------------
// Multinacci series
// ---------------------------------------------------------------------------

/// Σ_{J∈{1,2}^k} log‖M_J‖ for k = 0..=k_max, by depth-first traversal of
/// the vectors M_J(1,1)ᵗ.
pub fn exact_inner_sums(k_max: usize, exec: Exec) -> Vec<f64> {
    // Split the tree at a fixed depth so work units are independent and the
    // reduction order is fixed.
    let split = k_max.min(10);
    let mut roots: Vec<(u64, u64)> = vec![(1, 1)];
    let mut sums = vec![0.0; k_max + 1];
    for s in sums.iter_mut().take(split + 1) {
        *s = roots.iter().map(|&(a, b)| ((a + b) as f64).ln()).sum();
        roots = roots.iter().flat_map(|&(a, b)| [(a + b, b), (a, a + b)]).collect();
    }
    if split == k_max {
        return sums;
    }
    // `roots` now holds the depth split+1 vectors.
    let partial = exec::map_slice(exec, &roots, |&(a, b)| {
        let mut acc = vec![0.0; k_max - split];
        fn walk(a: u64, b: u64, d: usize, acc: &mut [f64]) {
            acc[d] += ((a + b) as f64).ln();
            if d + 1 < acc.len() {
                walk(a + b, b, d + 1, acc);
                walk(a, a + b, d + 1, acc);
            }
        }
        walk(a, b, 0, &mut acc);
        acc
    });
    for p in partial {
        for (d, x) in p.into_iter().enumerate() {
            sums[split + 1 + d] += x;
        }
    }
    sums
}

/// Sample mean and standard error of log‖M_J‖ for uniform J ∈ {1,2}^k.
fn sampled_inner_mean(k: usize, samples: usize, seed: u64) -> (f64, f64) {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    rng.set_stream(SERIES_STREAM_BASE + k as u64);
    let mut sum = 0.0;
    let mut sum2 = 0.0;
    for _ in 0..samples {
        let (mut a, mut b) = (1.0f64, 1.0f64);
        let mut log_scale = 0.0;
        for step in 0..k {
            if rng.random::<bool>() {
                a += b;
            } else {
                b += a;
            }
            if step % RENORM_EVERY == RENORM_EVERY - 1 {
                let s = a + b;
                log_scale += s.ln();
                a /= s;
                b /= s;
            }
        }
        let x = log_scale + (a + b).ln();
        sum += x;
        sum2 += x * x;
    }
    let n = samples as f64;
    let mean = sum / n;
    let var = (sum2 / n - mean * mean).max(0.0) * n / (n - 1.0);
    (mean, (var / n).sqrt())
}

#[derive(Clone, Debug)]
pub struct SeriesConfig {
    pub k_exact: usize,
    /// Last level estimated by sampling; levels beyond are bounded analytically.
    pub k_tail: usize,
    pub mc_budget: usize,
    pub seed: u64,
}

impl SeriesConfig {
    /// Exact levels through 20 (22 for n = 2), sampled levels up to where the
    /// analytic tail falls below 1e-12.
    pub fn for_n(n: u32, seed: u64) -> SeriesConfig {
        let k_exact = if n == 2 { 22 } else { 20 };
        SeriesConfig { k_exact, k_tail: if n == 2 { 140 } else { k_exact }, mc_budget: 20_000, seed }
    }
}

/// γₙ for the n-th multinacci number with m = 2.
pub fn gamma_multinacci_series(n: u32, cfg: &SeriesConfig, exec: Exec) -> Result<GammaEstimate> {
    if !(2..=10).contains(&n) {
        return Err(Error::BadInput("multinacci order must be in 2..=10".into()));
    }
    if cfg.k_exact > 30 {
        return Err(Error::CapExceeded { what: "exact series level", cap: 30 });
    }
    let beta = multinacci(n)?.beta_f64();
    let x = beta.powi(-(n as i32));
    let ratio = 2.0 * x;
    if ratio >= 1.0 {
        return Err(Error::Hypothesis("series does not converge".into()));
    }
    let pref = x * (1.0 - 2.0 * x).powi(2) / (2.0 - (n as f64 + 1.0) * x);
    let exact = exact_inner_sums(cfg.k_exact, exec);
    let mut total = 0.0;
    for (k, s) in exact.iter().enumerate() {
        total += x.powi(k as i32) * s;
    }
    let k_tail = cfg.k_tail.max(cfg.k_exact);
    let sampled_levels: Vec<usize> = (cfg.k_exact + 1..=k_tail).collect();
    if !sampled_levels.is_empty() && cfg.mc_budget < 2 {
        return Err(Error::BadInput("sampling budget must be at least 2".into()));
    }
    let sampled = exec::map_slice(exec, &sampled_levels, |&k| sampled_inner_mean(k, cfg.mc_budget, cfg.seed));
    let mut var = 0.0;
    for (&k, (mean, se)) in sampled_levels.iter().zip(&sampled) {
        // β^{−nk}·2^k·mean
        let w = ratio.powi(k as i32);
        total += w * mean;
        var += (w * se).powi(2);
    }
    // Σ_{k>K} ratioᵏ (k+1) log 2
    let k0 = k_tail as f64 + 1.0;
    let r = ratio;
    let tail = LN_2 * r.powf(k0) * ((k0 + 1.0) / (1.0 - r) + r / (1.0 - r).powi(2));
    let sampled_any = !sampled_levels.is_empty();
    Ok(GammaEstimate {
        value: pref * total,
        std_error: pref * var.sqrt(),
        // tail bound plus rounding in the summation
        truncation_bound: pref * tail + 64.0 * f64::EPSILON * (pref * total).abs(),
        method: GammaMethod::Series,
        params: GammaParams {
            k_exact: Some(cfg.k_exact),
            k_tail: Some(k_tail),
            mc_budget: sampled_any.then_some(cfg.mc_budget),
            seed: sampled_any.then_some(cfg.seed),
            ..Default::default()
        },
    })
}

/// γ = log(m/β) for integer β dividing m.
pub fn gamma_integer_case(sys: &BetaSystem) -> Result<GammaEstimate> {
    let b = sys.integer_beta().ok_or_else(|| Error::Hypothesis("beta must be an integer".into()))?;
    let m = sys.m() as u64;
    if !m.is_multiple_of(b) {
        return Err(Error::Hypothesis(format!("beta = {b} does not divide m = {m}")));
    }
    Ok(GammaEstimate {
        value: ((m / b) as f64).ln(),
        std_error: 0.0,
        truncation_bound: 0.0,
        method: GammaMethod::IntegerCase,
        params: GammaParams::default(),
    })
}

#[derive(Clone, Debug, Serialize)]
pub struct Dimension {
    pub value: f64,
    pub error: f64,
    /// log_β m, the upper bound for D.
    pub upper: f64,
    /// Set when D leaves [1, log_β m] by more than 3 error bars.
    pub warning: Option<String>,
}

/// D = (log m − γ)/log β.
pub fn dimension(g: &GammaEstimate, sys: &BetaSystem) -> Dimension {
    let lb = sys.beta_f64().ln();
    let lm = (sys.m() as f64).ln();
    let value = (lm - g.value) / lb;
    let error = g.total_error() / lb;
    let upper = lm / lb;
    let slack = 3.0 * error + 1e-12;
    let warning = if value < 1.0 - slack {
        Some(format!("D = {value:.6} is below 1"))
    } else if value > upper + slack {
        Some(format!("D = {value:.6} exceeds log_beta m = {upper:.6}"))
    } else {
        None
    };
    Dimension { value, error, upper, warning }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::netautomaton::DEFAULT_STATE_CAP;
    use crate::numberfield::parse_beta;

    fn chain(spec: &str, m: u32) -> (BetaSystem, ParryChain) {
        let sys = parse_beta(spec, m).unwrap();
        let a = Automaton::build(&sys, DEFAULT_STATE_CAP).unwrap();
        let c = parry_chain(&a).unwrap();
        (sys, c)
    }

    #[test]
    fn parry_chain_is_stochastic() {
        for spec in ["golden", "multinacci:3", "int:2"] {
            let (_, c) = chain(spec, 2);
            assert!(c.row_sum_error() < 1e-14, "{spec}");
            assert!(c.stationarity_error() < 1e-12, "{spec}");
            assert!((c.p.iter().sum::<f64>() - 1.0).abs() < 1e-14);
        }
    }

    #[test]
    fn dyadic_gamma_is_zero() {
        let (_, c) = chain("int:2", 2);
        let g = estimate_gamma_mc(&c, 1000, 4, 1, Exec::Sequential).unwrap();
        assert_eq!(g.value, 0.0);
    }

    #[test]
    fn integer_case() {
        let g = gamma_integer_case(&parse_beta("int:2", 4).unwrap()).unwrap();
        assert!((g.value - LN_2).abs() < 1e-15);
        assert_eq!(gamma_integer_case(&parse_beta("int:2", 2).unwrap()).unwrap().value, 0.0);
        let g = gamma_integer_case(&parse_beta("int:3", 6).unwrap()).unwrap();
        assert!((g.value - LN_2).abs() < 1e-15);
        assert!(gamma_integer_case(&parse_beta("int:2", 3).unwrap()).is_err());
        assert!(gamma_integer_case(&parse_beta("golden", 2).unwrap()).is_err());
    }

    /// Brute force over all words of length k ≤ 12.
    #[test]
    fn inner_sums_match_brute_force() {
        let sums = exact_inner_sums(13, Exec::Sequential);
        assert!((sums[0] - 2f64.ln()).abs() < 1e-15);
        for (k, &sum) in sums.iter().enumerate() {
            let mut s = 0.0;
            for code in 0..1u32 << k {
                // M_J (1,1)ᵗ with M_{j1} applied last.
                let (mut a, mut b) = (1u64, 1u64);
                for i in (0..k).rev() {
                    if code >> i & 1 == 0 {
                        a += b;
                    } else {
                        b += a;
                    }
                }
                s += ((a + b) as f64).ln();
            }
            assert!((s - sum).abs() < 1e-9 * s.max(1.0), "k={k}");
        }
        let par = exact_inner_sums(16, Exec::Parallel);
        let seq = exact_inner_sums(16, Exec::Sequential);
        assert_eq!(par, seq);
    }

    #[test]
    fn series_values() {
        let g = gamma_multinacci_series(3, &SeriesConfig::for_n(3, 0), Exec::default()).unwrap();
        assert!((g.over_log2() - 0.102500).abs() < 1e-5);
        assert!(g.truncation_bound < 1e-9);
        let mut cfg = SeriesConfig::for_n(10, 0);
        cfg.k_exact = 15;
        let g = gamma_multinacci_series(10, &cfg, Exec::default()).unwrap();
        assert!((g.over_log2() - 0.000493).abs() < 1e-5);
        assert!(gamma_multinacci_series(11, &cfg, Exec::default()).is_err());
    }

    #[test]
    fn mc_is_deterministic() {
        let (_, c) = chain("golden", 2);
        let a = estimate_gamma_mc(&c, 2000, 4, 9, Exec::Parallel).unwrap();
        let b = estimate_gamma_mc(&c, 2000, 4, 9, Exec::Sequential).unwrap();
        assert_eq!(a.value.to_bits(), b.value.to_bits());
        assert!(a.std_error > 0.0);
    }

    #[test]
    fn log_norm_is_subadditive() {
        let (_, c) = chain("multinacci:3", 2);
        let mut rng = ChaCha8Rng::seed_from_u64(5);
        let path = c.sample_path(&mut rng, 400);
        for split in [1, 50, 199, 300] {
            let whole = c.log_norm(&path);
            let left = c.log_norm(&path[..=split]);
            let right = c.log_norm(&path[split..]);
            assert!(whole <= left + right + 1e-9);
        }
    }

    #[test]
    fn dimension_examples() {
        let sys = parse_beta("int:2", 2).unwrap();
        let d = dimension(&gamma_integer_case(&sys).unwrap(), &sys);
        assert_eq!(d.value, 1.0);
        assert!(d.warning.is_none());
        let sys = multinacci(5).unwrap();
        let g = gamma_multinacci_series(5, &SeriesConfig::for_n(5, 0), Exec::default()).unwrap();
        assert!((dimension(&g, &sys).value - 1.006510).abs() < 5e-6);
    }
}
