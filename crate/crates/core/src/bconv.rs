//! The Bernoulli convolution μ_{β,m} at finite resolution.
//!
//! μ is the law of Σ εₖβ⁻ᵏ with independent uniform digits. Truncating after
//! N digits moves each point by at most Rβ⁻ᴺ, R = (m−1)/(β−1), so masses of
//! balls are bracketed by widening or shrinking the ball by that amount.

use crate::error::{Error, Result};
use crate::exec::{self, Exec};
use crate::expansions::{floor_of, kappa, prefix_counts, random_rational};
use crate::numberfield::{format_rational, BetaSystem, FieldElement};
use num_bigint::{BigInt, BigUint};
use num_rational::BigRational;
use num_traits::{One, Pow, ToPrimitive, Zero};
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use serde::Serialize;
use std::cmp::Ordering;
use std::collections::{BTreeMap, HashMap};

/// Extra digits used beyond level n when bracketing a ball mass.
pub const DEFAULT_MARGIN: usize = 10;
pub const ATOM_CAP: usize = 4_000_000;
const LOCAL_STATE_CAP: usize = 4_000_000;

#[derive(Clone, Debug)]
pub struct MeasureAtoms {
    pub level: usize,
    /// Increasing values with their weights; weights are multiples of m⁻ⁿ.
    pub atoms: Vec<(FieldElement, BigRational)>,
}

impl MeasureAtoms {
    pub fn total_weight(&self) -> BigRational {
        self.atoms.iter().map(|(_, w)| w.clone()).sum()
    }
}

/// Scaled atoms y = Σ εₖβⁿ⁻ᵏ with the number of digit words producing each.
fn scaled_atoms(sys: &BetaSystem, n: usize) -> Result<HashMap<FieldElement, BigUint>> {
    let f = sys.field();
    let mut level: HashMap<FieldElement, BigUint> = HashMap::from([(f.zero(), BigUint::one())]);
    for _ in 0..n {
        let mut next: HashMap<FieldElement, BigUint> = HashMap::with_capacity(level.len() * 2);
        for (y, c) in &level {
            let by = f.mul_beta(y);
            for eps in 0..sys.m() {
                *next.entry(by.add_int(eps as i64)).or_insert_with(BigUint::zero) += c;
            }
        }
        if next.len() > ATOM_CAP {
            return Err(Error::CapExceeded { what: "measure atom", cap: ATOM_CAP });
        }
        level = next;
    }
    Ok(level)
}

/// The exact law of Σ_{k≤n} εₖβ⁻ᵏ under uniform digits.
pub fn level_atoms(sys: &BetaSystem, n: usize) -> Result<MeasureAtoms> {
    let f = sys.field();
    let scale = f.beta_pow(-(n as i64));
    let denom = BigInt::from(sys.m()).pow(n);
    let mut atoms: Vec<(FieldElement, BigRational)> = scaled_atoms(sys, n)?
        .into_iter()
        .map(|(y, c)| (f.mul(&y, &scale), BigRational::new(BigInt::from(c), denom.clone())))
        .collect();
    atoms.sort_by(|a, b| sys.cmp(&a.0, &b.0));
    Ok(MeasureAtoms { level: n, atoms })
}

/// Lower and upper bounds for μ([x − r, x + r]) with r = Rβ⁻ⁿ.
#[derive(Clone, Debug, Serialize)]
pub struct BallMass {
    pub n: usize,
    pub log_radius: f64,
    /// Count of level-N words certainly inside the ball (out of mᴺ).
    pub lower_count: String,
    pub upper_count: String,
    pub depth: usize,
    pub lower: f64,
    pub upper: f64,
}

impl BallMass {
    pub fn log_mid(&self) -> f64 {
        0.5 * (self.lower.ln() + self.upper.ln())
    }
}

/// Words of length N whose partial sum lies in [x − u, x + w], tracked
/// through the rescaled remainders tₖ = βᵏ(x − Sₖ) restricted to the window
/// that can still reach the target.
fn count_in_window(
    sys: &BetaSystem,
    x: &FieldElement,
    u: &FieldElement,
    w: &FieldElement,
    depth: usize,
) -> Result<HashMap<FieldElement, BigUint>> {
    let f = sys.field();
    let big_r = sys.right_end();
    let mut states: HashMap<FieldElement, BigUint> = HashMap::from([(x.clone(), BigUint::one())]);
    for k in 1..=depth {
        let bk = f.beta_pow(k as i64);
        let lo = f.mul(w, &bk).scale_int(-1);
        let tail = f.mul(big_r, &f.beta_pow(k as i64 - depth as i64).scale_int(-1).add_int(1));
        let hi = &f.mul(u, &bk) + &tail;
        let mut next: HashMap<FieldElement, BigUint> = HashMap::with_capacity(states.len() * 2);
        for (t, c) in &states {
            let bt = f.mul_beta(t);
            for eps in 0..sys.m() {
                let t2 = bt.add_int(-(eps as i64));
                if sys.cmp(&t2, &hi) == Ordering::Greater {
                    continue;
                }
                if sys.cmp(&t2, &lo) == Ordering::Less {
                    break;
                }
                *next.entry(t2).or_insert_with(BigUint::zero) += c;
            }
        }
        if next.len() > LOCAL_STATE_CAP {
            return Err(Error::CapExceeded { what: "ball mass state", cap: LOCAL_STATE_CAP });
        }
        states = next;
    }
    Ok(states)
}

/// Bracket for μ([x − Rβ⁻ⁿ, x + Rβ⁻ⁿ]) from digit words of length n + margin.
pub fn ball_mass(sys: &BetaSystem, x: &FieldElement, n: usize, margin: usize) -> Result<BallMass> {
    let f = sys.field();
    let depth = n + margin;
    let r = f.mul(sys.right_end(), &f.beta_pow(-(n as i64)));
    let slack = f.mul(sys.right_end(), &f.beta_pow(-(depth as i64)));
    let wide = &r + &slack;
    let states = count_in_window(sys, x, &wide, &r, depth)?;
    // Words with S_N ∈ [x − r, x + r − Rβ⁻ᴺ] stay inside the ball whatever
    // digits follow.
    let bn = f.beta_pow(depth as i64);
    let lo_t = f.mul(&(&r - &slack), &bn).scale_int(-1);
    let hi_t = f.mul(&r, &bn);
    let mut lower = BigUint::zero();
    let mut upper = BigUint::zero();
    for (t, c) in &states {
        upper += c;
        if sys.cmp(t, &lo_t) != Ordering::Less && sys.cmp(t, &hi_t) != Ordering::Greater {
            lower += c;
        }
    }
    let log_total = depth as f64 * (sys.m() as f64).ln();
    let to_mass = |c: &BigUint| (big_ln(c) - log_total).exp();
    Ok(BallMass {
        n,
        log_radius: f.to_f64(&r).ln(),
        lower_count: lower.to_string(),
        upper_count: upper.to_string(),
        depth,
        lower: to_mass(&lower),
        upper: to_mass(&upper),
    })
}

/// ln of a big integer without overflow.
pub fn big_ln(c: &BigUint) -> f64 {
    if c.is_zero() {
        return f64::NEG_INFINITY;
    }
    let bits = c.bits();
    if bits < 1000 {
        return c.to_f64().expect("finite").ln();
    }
    let shift = bits - 60;
    (c >> shift).to_f64().expect("finite").ln() + shift as f64 * std::f64::consts::LN_2
}

#[derive(Clone, Debug, Serialize)]
pub struct Regression {
    pub slope: f64,
    pub intercept: f64,
    /// Root-mean-square residual.
    pub residual: f64,
    pub points: usize,
}

/// Least squares on the deepest ⌈half⌉ of the points, ordered by level.
pub fn regress_deepest_half(xs: &[f64], ys: &[f64]) -> Result<Regression> {
    if xs.len() < 3 {
        return Err(Error::DegenerateRegression(xs.len()));
    }
    let keep = xs.len().div_ceil(2).max(3).min(xs.len());
    let start = xs.len() - keep;
    least_squares(&xs[start..], &ys[start..])
}

pub fn least_squares(xs: &[f64], ys: &[f64]) -> Result<Regression> {
    let n = xs.len();
    if n < 2 {
        return Err(Error::DegenerateRegression(n));
    }
    let nf = n as f64;
    let mx = xs.iter().sum::<f64>() / nf;
    let my = ys.iter().sum::<f64>() / nf;
    let sxx: f64 = xs.iter().map(|x| (x - mx).powi(2)).sum();
    if sxx == 0.0 {
        return Err(Error::DegenerateRegression(n));
    }
    let sxy: f64 = xs.iter().zip(ys).map(|(x, y)| (x - mx) * (y - my)).sum();
    let slope = sxy / sxx;
    let intercept = my - slope * mx;
    let ss: f64 = xs.iter().zip(ys).map(|(x, y)| (y - intercept - slope * x).powi(2)).sum();
    Ok(Regression { slope, intercept, residual: (ss / nf).sqrt(), points: n })
}

fn check_levels(levels: &[usize]) -> Result<()> {
    if levels.len() < 3 {
        return Err(Error::DegenerateRegression(levels.len()));
    }
    if levels.windows(2).any(|w| w[0] >= w[1]) {
        return Err(Error::BadInput("levels must be strictly increasing".into()));
    }
    Ok(())
}

#[derive(Clone, Debug, Serialize)]
pub struct LocalDimEstimate {
    pub x: String,
    pub masses: Vec<BallMass>,
    pub fit: Regression,
}

/// Slope of log μ(ball) against log radius over the given levels.
pub fn local_dim_estimate(
    sys: &BetaSystem,
    x: &FieldElement,
    levels: &[usize],
    exec: Exec,
) -> Result<LocalDimEstimate> {
    check_levels(levels)?;
    if !sys.in_interval(x) {
        return Err(Error::OutsideInterval);
    }
    let masses: Vec<BallMass> =
        exec::map_slice(exec, levels, |&n| ball_mass(sys, x, n, DEFAULT_MARGIN)).into_iter().collect::<Result<_>>()?;
    let xs: Vec<f64> = masses.iter().map(|m| m.log_radius).collect();
    let ys: Vec<f64> = masses.iter().map(BallMass::log_mid).collect();
    let fit = regress_deepest_half(&xs, &ys)?;
    Ok(LocalDimEstimate { x: format_point(sys, x), masses, fit })
}

fn format_point(sys: &BetaSystem, x: &FieldElement) -> String {
    match x.as_rational() {
        Some(r) => format_rational(r),
        None => format!("{:.17}", sys.field().to_f64(x)),
    }
}

#[derive(Clone, Debug, Serialize)]
pub struct RandomLocalDim {
    pub seed: u64,
    pub samples: Vec<LocalDimEstimate>,
    pub mean_slope: f64,
    pub std_error: f64,
}

/// Local-dimension slopes at points z·(m−1)/(β−1) with z drawn uniformly
/// from a fine rational grid in (0, 1).
pub fn local_dim_random(
    sys: &BetaSystem,
    samples: usize,
    levels: &[usize],
    seed: u64,
    exec: Exec,
) -> Result<RandomLocalDim> {
    if samples < 2 {
        return Err(Error::BadInput("at least two sample points are needed".into()));
    }
    check_levels(levels)?;
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let f = sys.field();
    let points: Vec<FieldElement> = (0..samples)
        .map(|_| {
            let z = random_rational(&mut rng, &BigRational::zero(), &BigRational::one());
            f.mul(&f.from_rational(z), sys.right_end())
        })
        .collect();
    let runs: Vec<LocalDimEstimate> =
        exec::map_slice(exec, &points, |x| local_dim_estimate(sys, x, levels, Exec::Sequential))
            .into_iter()
            .collect::<Result<_>>()?;
    let n = runs.len() as f64;
    let mean = runs.iter().map(|r| r.fit.slope).sum::<f64>() / n;
    let var = runs.iter().map(|r| (r.fit.slope - mean).powi(2)).sum::<f64>() / (n - 1.0);
    Ok(RandomLocalDim { seed, samples: runs, mean_slope: mean, std_error: (var / n).sqrt() })
}

#[derive(Clone, Debug, Serialize)]
pub struct TauEstimate {
    pub q: f64,
    pub tau: f64,
    pub residual: f64,
    /// (n, log Σ μ(cell)^q) per level.
    pub moments: Vec<(usize, f64)>,
}

/// Cell masses of the level-n atoms on the grid of mesh β⁻ⁿ: the atom with
/// scaled value y = βⁿ·Σεₖβ⁻ᵏ falls in cell ⌊y⌋.
fn grid_masses(sys: &BetaSystem, n: usize) -> Result<Vec<f64>> {
    let atoms = scaled_atoms(sys, n)?;
    let mut cells: BTreeMap<i64, BigUint> = BTreeMap::new();
    for (y, c) in atoms {
        *cells.entry(floor_of(sys, &y)).or_insert_with(BigUint::zero) += c;
    }
    let log_total = n as f64 * (sys.m() as f64).ln();
    Ok(cells.values().map(|c| (big_ln(c) - log_total).exp()).collect())
}

/// τ̂(q) for each q: slope of log Σ μ(cell)^q against log r, r = β⁻ⁿ, over
/// the deepest half of `levels`. Empty cells are left out.
pub fn lq_spectrum_estimate(sys: &BetaSystem, qs: &[f64], levels: &[usize], exec: Exec) -> Result<Vec<TauEstimate>> {
    check_levels(levels)?;
    if let Some(q) = qs.iter().find(|q| !(-2.0..=4.0).contains(*q)) {
        return Err(Error::BadInput(format!("q = {q} outside [-2, 4]")));
    }
    let grids: Vec<Vec<f64>> =
        exec::map_slice(exec, levels, |&n| grid_masses(sys, n)).into_iter().collect::<Result<_>>()?;
    let lb = sys.beta_f64().ln();
    let xs: Vec<f64> = levels.iter().map(|&n| -(n as f64) * lb).collect();
    qs.iter()
        .map(|&q| {
            let ys: Vec<f64> = grids.iter().map(|g| g.iter().map(|&p| p.powf(q)).sum::<f64>().ln()).collect();
            let fit = regress_deepest_half(&xs, &ys)?;
            Ok(TauEstimate {
                q,
                tau: fit.slope,
                residual: fit.residual,
                moments: levels.iter().copied().zip(ys).collect(),
            })
        })
        .collect()
}

#[derive(Clone, Debug, Serialize)]
pub struct UpperDimRow {
    pub n: usize,
    /// m⁻ⁿ𝒩ₙ(x)
    pub count_mass: f64,
    /// Certified lower bound for μ(x − β⁻ⁿ/(β−1), x + β⁻ⁿ/(β−1)).
    pub ball_lower: f64,
    /// ½·2^{−(1−κ)n}
    pub bound: f64,
    pub pass: bool,
    /// log μ(ball) / log radius at this level.
    pub slope: f64,
}

#[derive(Clone, Debug, Serialize)]
pub struct UpperDimPoint {
    pub x: String,
    pub rows: Vec<UpperDimRow>,
    pub pass: bool,
    /// Largest finite-level slope over the deeper half of the levels.
    pub max_slope: f64,
    pub margin: f64,
}

#[derive(Clone, Debug, Serialize)]
pub struct UpperDimReport {
    #[serde(serialize_with = "ser_rat")]
    pub kappa: BigRational,
    /// (1−κ) log_β 2.
    pub constant: f64,
    pub points: Vec<UpperDimPoint>,
    pub pass: bool,
}

fn ser_rat<S: serde::Serializer>(r: &BigRational, s: S) -> std::result::Result<S::Ok, S::Error> {
    s.serialize_str(&format_rational(r))
}

/// `c ≥ 2^e` for rational e, decided exactly.
fn at_least_pow2(c: &BigUint, e: &BigRational) -> bool {
    let d = e.denom().to_u32().expect("small denominator");
    let num = e.numer();
    if num.sign() != num_bigint::Sign::Plus {
        return !c.is_zero();
    }
    let k = num.to_usize().expect("small exponent");
    c.pow(d) >= BigUint::one() << k
}

/// Default digit margin for [`upper_dim_bound_check`]; kept small because
/// non-Pisot bases have many distinct remainders.
pub const UPPER_CHECK_MARGIN: usize = 4;

/// Checks μ(x ± β⁻ⁿ/(β−1)) ≥ ½·2^{−(1−κ)n} for n ≤ n_max at each x (m = 2,
/// β below the golden ratio), and reports finite-level slopes against
/// (1−κ) log_β 2.
pub fn upper_dim_bound_check(
    sys: &BetaSystem,
    xs: &[FieldElement],
    n_max: usize,
    margin: usize,
    exec: Exec,
) -> Result<UpperDimReport> {
    if sys.m() != 2 {
        return Err(Error::Hypothesis("requires m = 2".into()));
    }
    let k = kappa(sys)?.kappa;
    let constant = (1.0 - k.to_f64().unwrap()) * std::f64::consts::LN_2 / sys.beta_f64().ln();
    for x in xs {
        if sys.sign(x) != Ordering::Greater || sys.cmp(x, sys.right_end()) != Ordering::Less {
            return Err(Error::Hypothesis("x must lie strictly inside I_beta".into()));
        }
    }
    let points = exec::map_slice(exec, xs, |x| -> Result<UpperDimPoint> {
        let counts = prefix_counts(sys, x, n_max, Exec::Sequential)?;
        let mut rows = Vec::new();
        for (n, count) in counts.iter().enumerate().skip(1) {
            let bm = ball_mass(sys, x, n, margin)?;
            let lower: BigUint = bm.lower_count.parse().expect("decimal");
            // lower/2^N ≥ 2^{−1−(1−κ)n}  ⟺  lower ≥ 2^{N−1−n+κn}
            let e = BigRational::from_integer(BigInt::from(bm.depth as i64 - 1 - n as i64))
                + &k * BigRational::from_integer(BigInt::from(n));
            let pass = at_least_pow2(&lower, &e);
            rows.push(UpperDimRow {
                n,
                count_mass: (big_ln(count) - n as f64 * std::f64::consts::LN_2).exp(),
                ball_lower: bm.lower,
                bound: 0.5 * (-(1.0 - k.to_f64().unwrap()) * n as f64).exp2(),
                pass,
                slope: bm.lower.ln() / bm.log_radius,
            });
        }
        let deep = &rows[rows.len() / 2..];
        let max_slope = deep.iter().map(|r| r.slope).fold(f64::NEG_INFINITY, f64::max);
        Ok(UpperDimPoint {
            x: format_point(sys, x),
            pass: rows.iter().all(|r| r.pass),
            rows,
            max_slope,
            margin: constant - max_slope,
        })
    })
    .into_iter()
    .collect::<Result<Vec<_>>>()?;
    let pass = points.iter().all(|p| p.pass);
    Ok(UpperDimReport { kappa: k, constant, points, pass })
}
