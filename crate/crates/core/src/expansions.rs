//! Counting and enumerating β-expansion prefixes.
//!
//! A word ε₁…εₙ is an admissible prefix of some expansion of `x` iff the
//! rescaled remainder `βⁿ(x − Σ εₖβ⁻ᵏ)` stays in `[0, (m−1)/(β−1)]`. The level
//! DP tracks these remainders exactly and merges equal ones, which keeps the
//! state count polynomial for Pisot β.

use crate::error::{Error, Result};
use crate::exec::{self, Exec};
use crate::numberfield::{BetaSystem, FieldElement};
use num_bigint::{BigInt, BigUint};
use num_rational::BigRational;
use num_traits::{One, ToPrimitive, Zero};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::Serialize;
use std::cmp::Ordering;
use std::collections::{BTreeMap, HashMap, HashSet};

/// Default bound on the number of merged DP states per level.
pub const DEFAULT_STATE_CAP: usize = 4_000_000;
/// Above this many states a DP level is split across workers.
const PAR_THRESHOLD: usize = 512;

/// A merged DP state: remainder value and the number of prefixes reaching it.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct RemainderState {
    pub value: FieldElement,
    pub multiplicity: BigUint,
}

/// Admissible next remainders `βr − ε` of `r`, paired with the digit ε.
fn successors(sys: &BetaSystem, r: &FieldElement) -> Vec<(u32, FieldElement)> {
    let f = sys.field();
    let br = f.mul_beta(r);
    let mut out = Vec::new();
    for eps in 0..sys.m() {
        let next = br.add_int(-(eps as i64));
        if sys.sign(&next) == Ordering::Less {
            break;
        }
        if sys.cmp(&next, sys.right_end()) != Ordering::Greater {
            out.push((eps, next));
        }
    }
    out
}

fn advance(sys: &BetaSystem, states: HashMap<FieldElement, BigUint>, exec: Exec) -> HashMap<FieldElement, BigUint> {
    let items: Vec<(FieldElement, BigUint)> = states.into_iter().collect();
    let mode = if items.len() >= PAR_THRESHOLD { exec } else { Exec::Sequential };
    let children = exec::map_slice(mode, &items, |(r, _)| successors(sys, r));
    let mut next: HashMap<FieldElement, BigUint> = HashMap::with_capacity(items.len() * 2);
    for ((_, mult), kids) in items.iter().zip(children) {
        for (_, v) in kids {
            *next.entry(v).or_insert_with(BigUint::zero) += mult;
        }
    }
    next
}

fn check_interval(sys: &BetaSystem, x: &FieldElement) -> Result<()> {
    if sys.in_interval(x) {
        Ok(())
    } else {
        Err(Error::OutsideInterval)
    }
}

/// 𝒩_k(x; β) for every k = 0..=n_max.
pub fn prefix_counts(sys: &BetaSystem, x: &FieldElement, n_max: usize, exec: Exec) -> Result<Vec<BigUint>> {
    check_interval(sys, x)?;
    if let Some(counts) = prefix_counts_rational(sys, x, n_max) {
        return counts;
    }
    let mut states = HashMap::from([(x.clone(), BigUint::one())]);
    let mut counts = vec![BigUint::one()];
    for _ in 0..n_max {
        states = advance(sys, states, exec);
        if states.len() > DEFAULT_STATE_CAP {
            return Err(Error::CapExceeded { what: "prefix DP state", cap: DEFAULT_STATE_CAP });
        }
        counts.push(states.values().sum());
    }
    Ok(counts)
}

/// Integer fast path for rational β = p/q and rational x = a/b: the
/// remainder after k digits is U/(b·qᵏ) with U an integer. Returns `None`
/// when the inputs are irrational or an intermediate overflows i128.
fn prefix_counts_rational(sys: &BetaSystem, x: &FieldElement, n_max: usize) -> Option<Result<Vec<BigUint>>> {
    let beta = sys.beta().as_rational()?;
    let x = x.as_rational()?;
    let (p, q) = (beta.numer().to_i128()?, beta.denom().to_i128()?);
    let (a, b) = (x.numer().to_i128()?, x.denom().to_i128()?);
    let m1 = sys.m() as i128 - 1;
    let mut states: HashMap<i128, u128> = HashMap::from([(a, 1u128)]);
    let mut counts = vec![BigUint::one()];
    // scale = b·q^{k+1}
    let mut scale = b.checked_mul(q)?;
    for _ in 0..n_max {
        // U' ≤ (m−1)·q·scale/(p−q)
        let cap = m1.checked_mul(q)?.checked_mul(scale)?;
        let mut next: HashMap<i128, u128> = HashMap::with_capacity(states.len() * 2);
        for (&u, &c) in &states {
            let pu = p.checked_mul(u)?;
            for eps in 0..=m1 {
                let v = pu.checked_sub(eps.checked_mul(scale)?)?;
                if v < 0 {
                    break;
                }
                if v.checked_mul(p - q)? <= cap {
                    let e = next.entry(v).or_insert(0);
                    *e = e.checked_add(c)?;
                }
            }
        }
        if next.len() > DEFAULT_STATE_CAP {
            return Some(Err(Error::CapExceeded { what: "prefix DP state", cap: DEFAULT_STATE_CAP }));
        }
        counts.push(BigUint::from(next.values().try_fold(0u128, |acc, &c| acc.checked_add(c))?));
        states = next;
        scale = scale.checked_mul(q)?;
    }
    Some(Ok(counts))
}

/// 𝒩_n(x; β): the number of length-n prefixes of β-expansions of `x`.
pub fn count_prefixes(sys: &BetaSystem, x: &FieldElement, n: usize) -> Result<BigUint> {
    Ok(prefix_counts(sys, x, n, Exec::default())?.pop().expect("nonempty"))
}

/// The merged remainder states after `n` digits, in canonical order.
pub fn remainder_states(sys: &BetaSystem, x: &FieldElement, n: usize) -> Result<Vec<RemainderState>> {
    check_interval(sys, x)?;
    let mut states = HashMap::from([(x.clone(), BigUint::one())]);
    for _ in 0..n {
        states = advance(sys, states, Exec::Sequential);
    }
    let sorted: BTreeMap<_, _> = states.into_iter().collect();
    Ok(sorted.into_iter().map(|(value, multiplicity)| RemainderState { value, multiplicity }).collect())
}

// ---------------------------------------------------------------------------
// Branching tree
// ---------------------------------------------------------------------------

#[derive(Clone, Debug)]
pub struct BranchNode {
    /// Digit on the edge from the parent; `None` at the root.
    pub digit: Option<u32>,
    pub depth: usize,
    pub parent: Option<usize>,
    pub children: Vec<usize>,
    pub remainder: FieldElement,
}

/// Unmerged tree of admissible prefixes; root-to-depth-n paths are ℰₙ(x; β).
#[derive(Clone, Debug)]
pub struct BranchTree {
    pub nodes: Vec<BranchNode>,
    pub depth: usize,
}

impl BranchTree {
    pub fn nodes_at_depth(&self, n: usize) -> usize {
        self.nodes.iter().filter(|nd| nd.depth == n).count()
    }

    /// Digit word along the path from the root to node `i`.
    pub fn word(&self, mut i: usize) -> Vec<u32> {
        let mut w = Vec::new();
        while let Some(d) = self.nodes[i].digit {
            w.push(d);
            i = self.nodes[i].parent.expect("non-root has a parent");
        }
        w.reverse();
        w
    }

    pub fn leaves(&self) -> impl Iterator<Item = usize> + '_ {
        (0..self.nodes.len()).filter(|&i| self.nodes[i].depth == self.depth)
    }
}

pub fn branch_tree(sys: &BetaSystem, x: &FieldElement, depth: usize, node_cap: usize) -> Result<BranchTree> {
    check_interval(sys, x)?;
    let mut nodes =
        vec![BranchNode { digit: None, depth: 0, parent: None, children: Vec::new(), remainder: x.clone() }];
    let mut frontier = vec![0usize];
    for level in 1..=depth {
        let mut next = Vec::new();
        for &p in &frontier {
            for (eps, r) in successors(sys, &nodes[p].remainder) {
                if nodes.len() >= node_cap {
                    return Err(Error::CapExceeded { what: "branch tree node", cap: node_cap });
                }
                let id = nodes.len();
                nodes.push(BranchNode {
                    digit: Some(eps),
                    depth: level,
                    parent: Some(p),
                    children: Vec::new(),
                    remainder: r,
                });
                nodes[p].children.push(id);
                next.push(id);
            }
        }
        frontier = next;
    }
    Ok(BranchTree { nodes, depth })
}

// ---------------------------------------------------------------------------
// κ(β) and the growth bound for β below the golden ratio
// ---------------------------------------------------------------------------

#[derive(Clone, Debug, Serialize)]
pub struct Kappa {
    /// κ = ½ (⌊log_β(1/δ)⌋ + 1)⁻¹.
    #[serde(serialize_with = "ser_rational")]
    pub kappa: BigRational,
    /// `true` when β > √2, where 1/δ = (β²−1)/(1+β−β²); otherwise 1/δ = 1/(β−1).
    pub above_sqrt2: bool,
    pub floor_log: u32,
    pub inverse_delta: f64,
}

fn ser_rational<S: serde::Serializer>(r: &BigRational, s: S) -> std::result::Result<S::Ok, S::Error> {
    s.serialize_str(&crate::numberfield::format_rational(r))
}

fn require_below_golden(sys: &BetaSystem) -> Result<()> {
    let f = sys.field();
    let b = sys.beta();
    let b2 = f.mul(b, b);
    let golden_poly = &(&b2 - b) - &f.one();
    if sys.sign(&golden_poly) != Ordering::Less {
        return Err(Error::Hypothesis("beta must be below the golden ratio".into()));
    }
    Ok(())
}

/// Exact evaluation of κ(β); floors of logarithms are found by comparing
/// powers of β with 1/δ in the field.
pub fn kappa(sys: &BetaSystem) -> Result<Kappa> {
    require_below_golden(sys)?;
    let f = sys.field();
    let b = sys.beta();
    let b2 = f.mul(b, b);
    let above_sqrt2 = sys.sign(&b2.add_int(-2)) == Ordering::Greater;
    let inv_delta = if above_sqrt2 {
        let num = b2.add_int(-1);
        let den = (&b.add_int(1)) - &b2;
        f.div(&num, &den).expect("1+β−β² > 0 below golden")
    } else {
        f.inv(&b.add_int(-1)).expect("β > 1")
    };
    let mut k = 0u32;
    let mut pow = b.clone();
    while sys.cmp(&pow, &inv_delta) != Ordering::Greater {
        k += 1;
        pow = f.mul(&pow, b);
    }
    Ok(Kappa {
        kappa: BigRational::new(BigInt::one(), BigInt::from(2 * (k + 1))),
        above_sqrt2,
        floor_log: k,
        inverse_delta: f.to_f64(&inv_delta),
    })
}

#[derive(Clone, Debug, Serialize)]
pub struct GrowthRow {
    pub n: usize,
    /// 𝒩ₙ(x) over the full alphabet.
    pub count: String,
    /// Count over the two-digit sub-alphabet used by the reduction for m ≥ 3.
    pub reduced_count: String,
    pub bound: f64,
    pub pass: bool,
    /// Bound delayed by the entry time into the switch interval.
    pub pass_shifted: bool,
}

#[derive(Clone, Debug, Serialize)]
pub struct GrowthBoundReport {
    pub kappa: Kappa,
    pub digit_offset: Option<u32>,
    /// Whether the (reduced) point lies in [1/β, 1/(β(β−1))].
    pub in_switch_interval: bool,
    /// Steps of the greedy/lazy maps needed to reach that interval.
    pub entry_delay: usize,
    pub rows: Vec<GrowthRow>,
    pub pass: bool,
    pub pass_shifted: bool,
}

/// Iterates z ↦ βz below 1/β and z ↦ βz − 1 above 1/(β(β−1)) until z enters
/// the switch interval; returns the number of steps, capped at `cap`.
fn entry_delay(two: &BetaSystem, z: &FieldElement, cap: usize) -> usize {
    let f = two.field();
    let b = two.beta();
    let lo = f.inv(b).expect("β ≠ 0");
    let hi = f.inv(&f.mul(b, &b.add_int(-1))).expect("β > 1");
    let mut z = z.clone();
    for l in 0..cap {
        if two.cmp(&z, &lo) == Ordering::Less {
            z = f.mul(b, &z);
        } else if two.cmp(&z, &hi) == Ordering::Greater {
            z = f.mul(b, &z).add_int(-1);
        } else {
            return l;
        }
    }
    cap
}

/// `count ≥ 2^{κn−1}`, decided exactly.
fn exceeds_bound(count: &BigUint, kappa: &BigRational, n: usize) -> bool {
    let e = kappa * BigRational::from_integer(BigInt::from(n)) - BigRational::one();
    let (num, den) = (e.numer().clone(), e.denom().clone());
    if num <= BigInt::zero() {
        return !count.is_zero();
    }
    let den = den.to_u32().expect("small denominator");
    let num = num.to_u32().expect("small exponent");
    count.pow(den) >= (BigUint::one() << num as usize)
}

/// Checks 𝒩ₙ(x) ≥ 2^{κn−1} for n ≤ n_max.
///
/// For m ≥ 3 the bound is checked on the two-digit reduction: `x` is shifted
/// into `(0, 1/(β−1))` by `j/(β−1)` and counted with digits {j, j+1}. The
/// full-alphabet count, which dominates it, is reported alongside.
pub fn verify_growth_bound(sys: &BetaSystem, x: &FieldElement, n_max: usize, exec: Exec) -> Result<GrowthBoundReport> {
    let kappa = kappa(sys)?;
    if sys.sign(x) != Ordering::Greater || sys.cmp(x, sys.right_end()) != Ordering::Less {
        return Err(Error::Hypothesis("x must lie strictly inside I_beta".into()));
    }
    let full = prefix_counts(sys, x, n_max, exec)?;
    let (reduced, offset, delay) = if sys.m() == 2 {
        (full.clone(), None, entry_delay(sys, x, n_max + 1))
    } else {
        let f = sys.field();
        let unit = f.inv(&sys.beta().add_int(-1)).expect("β > 1");
        let mut j = 0u32;
        while j + 1 < sys.m() - 1 && sys.cmp(x, &unit.scale_int(j as i64 + 1)) != Ordering::Less {
            j += 1;
        }
        let y = x - &unit.scale_int(j as i64);
        let two = sys.with_digits(2)?;
        if y.is_zero() {
            (full.clone(), None, entry_delay(&two, x, n_max + 1))
        } else {
            let delay = entry_delay(&two, &y, n_max + 1);
            (prefix_counts(&two, &y, n_max, exec)?, Some(j), delay)
        }
    };
    let rows: Vec<GrowthRow> = (0..=n_max)
        .map(|n| {
            let dominated = full[n] >= reduced[n];
            let pass = exceeds_bound(&reduced[n], &kappa.kappa, n) && dominated;
            let pass_shifted = dominated
                && if n >= delay { exceeds_bound(&reduced[n], &kappa.kappa, n - delay) } else { !reduced[n].is_zero() };
            let k = kappa.kappa.to_f64().unwrap_or(0.0);
            GrowthRow {
                n,
                count: full[n].to_string(),
                reduced_count: reduced[n].to_string(),
                bound: (k * n as f64 - 1.0).exp2(),
                pass,
                pass_shifted,
            }
        })
        .collect();
    let pass = rows.iter().all(|r| r.pass);
    let pass_shifted = rows.iter().all(|r| r.pass_shifted);
    Ok(GrowthBoundReport {
        kappa,
        digit_offset: offset,
        in_switch_interval: delay == 0,
        entry_delay: delay,
        rows,
        pass,
        pass_shifted,
    })
}

// ---------------------------------------------------------------------------
// Switch regions and the random β-transformation
// ---------------------------------------------------------------------------

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
#[serde(rename_all = "lowercase")]
pub enum RegionKind {
    Switch,
    Equality,
}

#[derive(Clone, Debug)]
pub struct Region {
    pub kind: RegionKind,
    pub k: u32,
    pub lo: FieldElement,
    pub hi: FieldElement,
    pub lo_closed: bool,
    pub hi_closed: bool,
}

impl Region {
    pub fn contains(&self, sys: &BetaSystem, x: &FieldElement) -> bool {
        let a = sys.cmp(x, &self.lo);
        let b = sys.cmp(x, &self.hi);
        let above = a == Ordering::Greater || (self.lo_closed && a == Ordering::Equal);
        let below = b == Ordering::Less || (self.hi_closed && b == Ordering::Equal);
        above && below
    }
}

/// Switch regions Sₖ and equality regions Eₖ of K_β, in left-to-right order
/// of their index.
#[derive(Clone, Debug)]
pub struct SwitchGeometry {
    pub floor_beta: u32,
    pub switch: Vec<Region>,
    pub equality: Vec<Region>,
}

pub(crate) fn floor_of(sys: &BetaSystem, x: &FieldElement) -> i64 {
    let f = sys.field();
    let mut k = f.to_f64(x).floor() as i64;
    while sys.cmp(x, &f.from_int(k)) == Ordering::Less {
        k -= 1;
    }
    while sys.cmp(x, &f.from_int(k + 1)) != Ordering::Less {
        k += 1;
    }
    k
}

pub fn switch_geometry(sys: &BetaSystem) -> Result<SwitchGeometry> {
    let f = sys.field();
    let rho = sys.rho();
    let fb = floor_of(sys, sys.beta()) as u32;
    if let Some(b) = sys.integer_beta() {
        if sys.m() as u64 != b {
            return Err(Error::Hypothesis(format!("integer beta = {b} needs m = {b} for the greedy transformation")));
        }
        let equality = (0..sys.m())
            .map(|k| Region {
                kind: RegionKind::Equality,
                k,
                lo: rho.scale_int(k as i64),
                hi: rho.scale_int(k as i64 + 1),
                lo_closed: true,
                hi_closed: k + 1 == sys.m(),
            })
            .collect();
        return Ok(SwitchGeometry { floor_beta: fb, switch: Vec::new(), equality });
    }
    if sys.m() != fb + 1 {
        return Err(Error::Hypothesis(format!("K_beta needs m = floor(beta) + 1 = {}", fb + 1)));
    }
    // ⌊β⌋/(β(β−1))
    let bm1 = sys.beta().add_int(-1);
    let base = f.div(&rho.scale_int(fb as i64), &bm1).expect("β > 1");
    let switch: Vec<Region> = (1..=fb)
        .map(|k| Region {
            kind: RegionKind::Switch,
            k,
            lo: rho.scale_int(k as i64),
            hi: &base + &rho.scale_int(k as i64 - 1),
            lo_closed: true,
            hi_closed: true,
        })
        .collect();
    let mut equality = vec![Region {
        kind: RegionKind::Equality,
        k: 0,
        lo: f.zero(),
        hi: rho.clone(),
        lo_closed: true,
        hi_closed: false,
    }];
    for k in 1..=fb {
        let hi = if k == fb { sys.right_end().clone() } else { rho.scale_int(k as i64 + 1) };
        equality.push(Region {
            kind: RegionKind::Equality,
            k,
            lo: &base + &rho.scale_int(k as i64 - 1),
            hi,
            lo_closed: false,
            hi_closed: k == fb,
        });
    }
    Ok(SwitchGeometry { floor_beta: fb, switch, equality })
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct KStep {
    /// Whether the coin bit was consumed (x was in a switch region).
    pub consumed: bool,
    pub digit: u32,
    pub next: FieldElement,
}

/// One application of K_β. Boundary points of Sₖ count as switch points.
pub fn step_k_beta(sys: &BetaSystem, geom: &SwitchGeometry, bit: bool, x: &FieldElement) -> Result<KStep> {
    let bx = sys.field().mul_beta(x);
    if let Some(s) = geom.switch.iter().find(|r| r.contains(sys, x)) {
        let digit = if bit { s.k } else { s.k - 1 };
        return Ok(KStep { consumed: true, digit, next: bx.add_int(-(digit as i64)) });
    }
    if let Some(e) = geom.equality.iter().find(|r| r.contains(sys, x)) {
        return Ok(KStep { consumed: false, digit: e.k, next: bx.add_int(-(e.k as i64)) });
    }
    Err(Error::OutsideInterval)
}

#[derive(Clone, Debug, Serialize)]
pub struct Simulation {
    pub digits: Vec<u32>,
    pub bits_consumed: usize,
    /// |x − Σ_{k≤n} εₖβ⁻ᵏ| evaluated in floating point.
    pub residual: f64,
    /// (m−1)β⁻ⁿ/(β−1), the admissible truncation error.
    pub tolerance: f64,
}

/// Runs K_β for `steps` iterations with coin bits drawn from `seed`.
pub fn simulate_k_beta(sys: &BetaSystem, x: &FieldElement, steps: usize, seed: u64) -> Result<Simulation> {
    check_interval(sys, x)?;
    let geom = switch_geometry(sys)?;
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut bit: bool = rng.random();
    let mut cur = x.clone();
    let mut digits = Vec::with_capacity(steps);
    let mut consumed = 0;
    for _ in 0..steps {
        let s = step_k_beta(sys, &geom, bit, &cur)?;
        if s.consumed {
            consumed += 1;
            bit = rng.random();
        }
        digits.push(s.digit);
        cur = s.next;
    }
    let f = sys.field();
    let partial = digits
        .iter()
        .enumerate()
        .fold(f.zero(), |acc, (k, &d)| &acc + &f.beta_pow(-(k as i64) - 1).scale_int(d as i64));
    let residual = f.to_f64(&(x - &partial)).abs();
    let tolerance = f.to_f64(sys.right_end()) * sys.beta_f64().powi(-(steps as i32));
    Ok(Simulation { digits, bits_consumed: consumed, residual, tolerance })
}

// ---------------------------------------------------------------------------
// Distinct digit sums (Garsia separation)
// ---------------------------------------------------------------------------

/// Distinct values of `Σ_{j≤n} εⱼ β^{n−j}` = βⁿ · Σ εⱼ β⁻ʲ.
pub fn scaled_sums(sys: &BetaSystem, n: usize, cap: usize) -> Result<Vec<FieldElement>> {
    let f = sys.field();
    let mut level: HashSet<FieldElement> = HashSet::from([f.zero()]);
    for _ in 0..n {
        let mut next = HashSet::with_capacity(level.len() * 2);
        for y in &level {
            let by = f.mul_beta(y);
            for eps in 0..sys.m() {
                next.insert(by.add_int(eps as i64));
            }
        }
        if next.len() > cap {
            return Err(Error::CapExceeded { what: "distinct sum", cap });
        }
        level = next;
    }
    let mut v: Vec<FieldElement> = level.into_iter().collect();
    v.sort();
    Ok(v)
}

/// The number of distinct values Σ_{j=1}^n εⱼβ⁻ʲ.
pub fn distinct_sums_count(sys: &BetaSystem, n: usize) -> Result<BigUint> {
    if n == 0 {
        return Err(Error::BadInput("n must be at least 1".into()));
    }
    Ok(BigUint::from(scaled_sums(sys, n, DEFAULT_STATE_CAP)?.len()))
}

#[derive(Clone, Debug, Serialize)]
pub struct SumsRow {
    pub n: usize,
    pub distinct: usize,
    /// distinct / βⁿ
    pub normalized_count: f64,
    /// βⁿ · (smallest gap between distinct level-n sums)
    pub normalized_min_gap: f64,
}

/// Garsia diagnostics for levels 1..=n_max.
pub fn garsia_profile(sys: &BetaSystem, n_max: usize, exec: Exec) -> Result<Vec<SumsRow>> {
    let rows = exec::map_range(exec, n_max, |i| -> Result<SumsRow> {
        let n = i + 1;
        let sums = scaled_sums(sys, n, DEFAULT_STATE_CAP)?;
        let f = sys.field();
        let mut vals: Vec<(f64, usize)> = sums.iter().map(|y| f.to_f64(y)).zip(0..).collect();
        vals.sort_by(|a, b| a.0.total_cmp(&b.0));
        let mut best = (f64::INFINITY, 0usize);
        for w in 1..vals.len() {
            let gap = vals[w].0 - vals[w - 1].0;
            if gap < best.0 {
                best = (gap, w);
            }
        }
        if vals.len() >= 2 {
            // The float ordering of the closest pair is confirmed exactly.
            let (a, b) = (&sums[vals[best.1 - 1].1], &sums[vals[best.1].1]);
            if sys.cmp(b, a) != Ordering::Greater {
                return Err(Error::Invariant("closest pair of sums misordered".into()));
            }
        }
        Ok(SumsRow {
            n,
            distinct: sums.len(),
            normalized_count: sums.len() as f64 / sys.beta_f64().powi(n as i32),
            normalized_min_gap: best.0,
        })
    });
    rows.into_iter().collect()
}

// ---------------------------------------------------------------------------
// Sparse expansions for the golden ratio
// ---------------------------------------------------------------------------

fn require_golden(sys: &BetaSystem) -> Result<()> {
    let c: Vec<i64> = sys.field().poly().coeffs().iter().map(|c| c.to_i64().unwrap_or(i64::MAX)).collect();
    if c != [-1, -1, 1] || sys.m() != 2 {
        return Err(Error::Hypothesis("requires the golden ratio with m = 2".into()));
    }
    Ok(())
}

/// Number of words over {0,1} with `len` digits whose value Σεⱼβ⁻ʲ equals
/// `target` (given scaled by β^len).
fn count_words_with_value(sys: &BetaSystem, len: usize, scaled_target: &FieldElement) -> BigUint {
    let f = sys.field();
    let mut level: HashMap<FieldElement, BigUint> = HashMap::from([(f.zero(), BigUint::one())]);
    for _ in 0..len {
        let mut next: HashMap<FieldElement, BigUint> = HashMap::new();
        for (y, c) in &level {
            let by = f.mul_beta(y);
            for eps in 0..sys.m() {
                *next.entry(by.add_int(eps as i64)).or_insert_with(BigUint::zero) += c;
            }
        }
        level = next;
    }
    level.get(scaled_target).cloned().unwrap_or_default()
}

/// #𝔛_m: binary words of length 2m+1 whose value is exactly 1/β.
pub fn count_x_m(sys: &BetaSystem, m_param: u32) -> Result<u64> {
    require_golden(sys)?;
    if m_param == 0 {
        return Err(Error::BadInput("m must be at least 1".into()));
    }
    if m_param > 12 {
        return Err(Error::CapExceeded { what: "enumeration length parameter", cap: 12 });
    }
    let len = 2 * m_param as usize + 1;
    let target = sys.field().beta_pow(len as i64 - 1);
    Ok(count_words_with_value(sys, len, &target).to_u64().expect("fits"))
}

#[derive(Clone, Debug, Serialize)]
pub struct SparseCheckpoint {
    pub n: usize,
    /// 𝒩ₙ(x) from the prefix DP.
    pub count: String,
    /// ∏ mⱼ over the blocks so far.
    pub product_m: String,
    /// ∏ (mⱼ+1): the number of words with the same value as the prefix.
    pub product_m_plus_one: String,
    /// Words of length n with the same value as 10^{2m₁}…10^{2mₖ}.
    pub same_value_words: String,
    pub log_count_over_n: f64,
}

#[derive(Clone, Debug, Serialize)]
pub struct SparseProfile {
    pub blocks: Vec<u32>,
    /// Digits of x actually used (the given blocks plus continuation blocks).
    pub truncation_depth: usize,
    pub checkpoints: Vec<SparseCheckpoint>,
    pub log_ratio_decreasing: bool,
}

/// Prefix counts at block boundaries for x = 10^{2m₁}10^{2m₂}… (golden ratio).
///
/// The expansion continues past the supplied blocks with mₖ₊₁ = mₖ + 1, … and
/// is truncated 40 digits beyond the last checkpoint.
pub fn sparse_profile(sys: &BetaSystem, blocks: &[u32], exec: Exec) -> Result<SparseProfile> {
    require_golden(sys)?;
    if blocks.is_empty() || blocks.windows(2).any(|w| w[0] >= w[1]) || blocks[0] == 0 {
        return Err(Error::BadInput("blocks must be a strictly increasing list of positive integers".into()));
    }
    if blocks.len() > 8 {
        return Err(Error::CapExceeded { what: "checkpoint", cap: 8 });
    }
    let mut word: Vec<u32> = Vec::new();
    let mut checkpoints_n = Vec::new();
    for &m in blocks {
        word.push(1);
        word.extend(std::iter::repeat_n(0, 2 * m as usize));
        checkpoints_n.push(word.len());
    }
    let last = *checkpoints_n.last().unwrap();
    let mut m_next = *blocks.last().unwrap();
    while word.len() < last + 40 {
        m_next += 1;
        word.push(1);
        word.extend(std::iter::repeat_n(0, 2 * m_next as usize));
    }
    word.truncate(last + 40);
    let f = sys.field();
    let x = word.iter().enumerate().fold(
        f.zero(),
        |acc, (k, &d)| {
            if d == 0 {
                acc
            } else {
                &acc + &f.beta_pow(-(k as i64) - 1)
            }
        },
    );
    let counts = prefix_counts(sys, &x, last, exec)?;
    let mut checkpoints = Vec::new();
    let mut prod = BigUint::one();
    let mut prod1 = BigUint::one();
    for (i, &n) in checkpoints_n.iter().enumerate() {
        prod *= blocks[i];
        prod1 *= blocks[i] + 1;
        let target = word[..n].iter().fold(f.zero(), |acc, &d| f.mul_beta(&acc).add_int(d as i64));
        let same = count_words_with_value(sys, n, &target);
        let c = &counts[n];
        checkpoints.push(SparseCheckpoint {
            n,
            count: c.to_string(),
            product_m: prod.to_string(),
            product_m_plus_one: prod1.to_string(),
            same_value_words: same.to_string(),
            log_count_over_n: c.to_f64().unwrap_or(f64::INFINITY).ln() / n as f64,
        });
    }
    let log_ratio_decreasing = checkpoints.windows(2).all(|w| w[1].log_count_over_n < w[0].log_count_over_n);
    Ok(SparseProfile { blocks: blocks.to_vec(), truncation_depth: word.len(), checkpoints, log_ratio_decreasing })
}

/// Draws a rational uniformly from a 2^-40 grid strictly inside (lo, hi).
pub fn random_rational<R: Rng>(rng: &mut R, lo: &BigRational, hi: &BigRational) -> BigRational {
    let k: u64 = rng.random_range(1..(1u64 << 40));
    let t = BigRational::new(BigInt::from(k), BigInt::from(1u64 << 40));
    lo + (hi - lo) * t
}
