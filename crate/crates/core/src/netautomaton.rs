//! Net intervals of the IFS `S_i(x) = ρx + (i−1)(1−ρ)/(m−1)` and the finite
//! automaton coding them.
//!
//! A net interval Δ = [a, b] of level n is described, up to similarity, by its
//! normalized length ℓ = βⁿ(b − a) and the distinct normalized offsets
//! `c = βⁿ(a − S_J(0))` of the maps S_J covering it. Siblings with the same
//! (ℓ, V) are told apart by their rank among such siblings, so the coding of
//! ℱₙ by state paths is one-to-one.

use crate::error::{Error, Result};
use crate::exec::{self, Exec};
use crate::numberfield::{format_rational, BetaSystem, FieldElement};
use num_bigint::BigUint;
use num_traits::{One, Zero};
use petgraph::algo::tarjan_scc;
use petgraph::graph::DiGraph;
use serde::Serialize;
use std::cmp::Ordering;
use std::collections::{BTreeMap, BTreeSet, HashMap, VecDeque};
use std::fmt::Write as _;

pub const DEFAULT_STATE_CAP: usize = 10_000;
/// Deepest level for explicit enumeration of ℱₙ and of 𝒜ₙ.
pub const MAX_NET_LEVEL: usize = 14;

#[derive(Clone, Debug)]
pub struct NetInterval {
    pub level: usize,
    pub a: FieldElement,
    pub b: FieldElement,
    /// Distinct offsets βⁿ(a − S_J(0)) in increasing order, with the number
    /// of words J sharing each.
    pub covering: Vec<(FieldElement, u64)>,
}

impl NetInterval {
    pub fn multiplicity(&self) -> u64 {
        self.covering.iter().map(|(_, k)| k).sum()
    }
}

fn sort_real(sys: &BetaSystem, v: &mut [FieldElement]) {
    v.sort_by(|x, y| sys.cmp(x, y));
}

/// {S_J(0) : J ∈ 𝒜ₙ} with the number of words producing each value.
fn left_ends(sys: &BetaSystem, n: usize) -> HashMap<FieldElement, u64> {
    let f = sys.field();
    let offs: Vec<FieldElement> = (0..sys.m()).map(|i| sys.ifs_offset(i)).collect();
    let mut level = HashMap::from([(f.zero(), 1u64)]);
    for _ in 0..n {
        let mut next = HashMap::with_capacity(level.len() * 2);
        for (v, k) in &level {
            let rv = f.mul(sys.rho(), v);
            for d in &offs {
                *next.entry(d + &rv).or_insert(0) += k;
            }
        }
        level = next;
    }
    level
}

/// The net intervals ℱₙ in increasing order.
pub fn net_intervals(sys: &BetaSystem, n: usize) -> Result<Vec<NetInterval>> {
    if n > MAX_NET_LEVEL {
        return Err(Error::CapExceeded { what: "net interval level", cap: MAX_NET_LEVEL });
    }
    let f = sys.field();
    let ends = left_ends(sys, n);
    let rho_n = f.beta_pow(-(n as i64));
    let beta_n = f.beta_pow(n as i64);
    let mut starts: Vec<FieldElement> = ends.keys().cloned().collect();
    sort_real(sys, &mut starts);
    let mut points: Vec<FieldElement> = starts.iter().flat_map(|s| [s.clone(), s + &rho_n]).collect();
    points.sort();
    points.dedup();
    sort_real(sys, &mut points);
    let out = points
        .windows(2)
        .map(|w| {
            let (a, b) = (&w[0], &w[1]);
            let covering = starts
                .iter()
                .filter(|s| sys.cmp(s, a) != Ordering::Greater && sys.cmp(&(*s + &rho_n), b) != Ordering::Less)
                .map(|s| (f.mul(&beta_n, &(a - s)), ends[s]))
                .collect::<Vec<_>>();
            NetInterval { level: n, a: a.clone(), b: b.clone(), covering }
        })
        .collect::<Vec<_>>();
    let mut out = out;
    for iv in &mut out {
        iv.covering.sort_by(|x, y| sys.cmp(&x.0, &y.0));
    }
    Ok(out)
}

/// #{J ∈ 𝒜ₙ : S_J([0,1]) ⊇ Δ} by enumerating all mⁿ words.
pub fn multiplicity_direct(sys: &BetaSystem, delta: &NetInterval) -> Result<u64> {
    let n = delta.level;
    if n > MAX_NET_LEVEL {
        return Err(Error::CapExceeded { what: "net interval level", cap: MAX_NET_LEVEL });
    }
    let f = sys.field();
    let m = sys.m() as usize;
    let offs: Vec<FieldElement> = (0..sys.m()).map(|i| sys.ifs_offset(i)).collect();
    let rho_pows: Vec<FieldElement> = (0..n).map(|k| f.beta_pow(-(k as i64))).collect();
    let rho_n = f.beta_pow(-(n as i64));
    let mut count = 0;
    for code in 0..m.pow(n as u32) {
        let mut c = code;
        let mut s = f.zero();
        for rp in &rho_pows {
            s = &s + &f.mul(rp, &offs[c % m]);
            c /= m;
        }
        if sys.cmp(&s, &delta.a) != Ordering::Greater && sys.cmp(&(&s + &rho_n), &delta.b) != Ordering::Less {
            count += 1;
        }
    }
    Ok(count)
}

// ---------------------------------------------------------------------------
// Automaton
// ---------------------------------------------------------------------------

/// (target, child start, transfer matrix)
type Edge<T> = (T, FieldElement, Vec<Vec<u64>>);

#[derive(Clone, Debug, PartialEq, Eq, PartialOrd, Ord, Hash)]
struct StateKey {
    length: FieldElement,
    offsets: Vec<FieldElement>,
    rank: usize,
}

#[derive(Clone, Debug)]
pub struct State {
    /// Normalized length ℓᵢ.
    pub length: FieldElement,
    /// Distinct normalized offsets in increasing order; vᵢ is their number.
    pub offsets: Vec<FieldElement>,
    pub rank: usize,
    /// Children in left-to-right order.
    pub children: Vec<Child>,
}

impl State {
    pub fn v(&self) -> usize {
        self.offsets.len()
    }
}

#[derive(Clone, Debug)]
pub struct Child {
    pub state: usize,
    /// Left end of the child inside the parent, in the parent's normalized
    /// coordinates.
    pub start: FieldElement,
}

#[derive(Clone, Debug)]
pub struct Automaton {
    pub sys: BetaSystem,
    /// State 0 is the initial state [0, 1].
    pub states: Vec<State>,
    /// T(i, j) for every edge i → j, as a vᵢ × vⱼ matrix.
    pub transitions: BTreeMap<(usize, usize), Vec<Vec<u64>>>,
    pub essential: Vec<usize>,
}

struct ChildSpec {
    start: FieldElement,
    length: FieldElement,
    offsets: Vec<FieldElement>,
    /// Row u: for each parent offset, the child offsets hit (by index) with
    /// the number of digits mapping onto each.
    matrix: Vec<Vec<u64>>,
}

/// Sub-net-intervals of the normalized interval [0, ℓ] with covering maps
/// `[−c, −c + 1]`, c ∈ V.
fn children_of(sys: &BetaSystem, length: &FieldElement, offsets: &[FieldElement]) -> Vec<ChildSpec> {
    let f = sys.field();
    let rho = sys.rho();
    let digit_offs: Vec<FieldElement> = (0..sys.m()).map(|i| sys.ifs_offset(i)).collect();
    // Left ends of the sub-maps in normalized coordinates, keyed by (u, i).
    let starts: Vec<Vec<FieldElement>> = offsets.iter().map(|c| digit_offs.iter().map(|d| d - c).collect()).collect();
    let mut cuts = vec![f.zero(), length.clone()];
    for row in &starts {
        for s in row {
            for e in [s.clone(), s + rho] {
                if sys.sign(&e) == Ordering::Greater && sys.cmp(&e, length) == Ordering::Less {
                    cuts.push(e);
                }
            }
        }
    }
    cuts.sort();
    cuts.dedup();
    sort_real(sys, &mut cuts);
    cuts.windows(2)
        .map(|w| {
            let (p, q) = (&w[0], &w[1]);
            let mut hits: Vec<(usize, FieldElement)> = Vec::new();
            for (u, row) in starts.iter().enumerate() {
                for s in row {
                    if sys.cmp(s, p) != Ordering::Greater && sys.cmp(&(s + rho), q) != Ordering::Less {
                        hits.push((u, f.mul_beta(&(p - s))));
                    }
                }
            }
            let mut child_offsets: Vec<FieldElement> = hits.iter().map(|h| h.1.clone()).collect();
            child_offsets.sort();
            child_offsets.dedup();
            sort_real(sys, &mut child_offsets);
            let index: HashMap<&FieldElement, usize> = child_offsets.iter().enumerate().map(|(i, c)| (c, i)).collect();
            let mut matrix = vec![vec![0u64; child_offsets.len()]; offsets.len()];
            for (u, c) in &hits {
                matrix[*u][index[c]] += 1;
            }
            ChildSpec { start: p.clone(), length: f.mul_beta(&(q - p)), offsets: child_offsets, matrix }
        })
        .collect()
}

impl Automaton {
    /// Breadth-first closure from [0, 1]; fails once more than `state_cap`
    /// states are discovered.
    pub fn build(sys: &BetaSystem, state_cap: usize) -> Result<Automaton> {
        if state_cap == 0 {
            return Err(Error::BadInput("state cap must be positive".into()));
        }
        let f = sys.field();
        let root = StateKey { length: f.one(), offsets: vec![f.zero()], rank: 0 };
        let mut ids: HashMap<StateKey, usize> = HashMap::from([(root.clone(), 0)]);
        let mut keys = vec![root];
        let mut edges: Vec<Vec<Edge<usize>>> = vec![Vec::new()];
        let mut queue = VecDeque::from([0usize]);
        // Children depend only on (ℓ, V); states differing in rank share them.
        let mut memo: HashMap<(FieldElement, Vec<FieldElement>), Vec<Edge<StateKey>>> = HashMap::new();
        while let Some(i) = queue.pop_front() {
            let key = keys[i].clone();
            let shape = (key.length.clone(), key.offsets.clone());
            if !memo.contains_key(&shape) {
                let specs = children_of(sys, &key.length, &key.offsets);
                let mut seen: HashMap<(FieldElement, Vec<FieldElement>), usize> = HashMap::new();
                let kids = specs
                    .into_iter()
                    .map(|c| {
                        let r = seen.entry((c.length.clone(), c.offsets.clone())).or_insert(0);
                        let k = StateKey { length: c.length, offsets: c.offsets, rank: *r };
                        *r += 1;
                        (k, c.start, c.matrix)
                    })
                    .collect();
                memo.insert(shape.clone(), kids);
            }
            let mut out = Vec::new();
            for (k, start, mat) in &memo[&shape] {
                let j = match ids.get(k) {
                    Some(&j) => j,
                    None => {
                        let j = keys.len();
                        if j >= state_cap {
                            return Err(Error::CapExceeded { what: "automaton state", cap: state_cap });
                        }
                        ids.insert(k.clone(), j);
                        keys.push(k.clone());
                        edges.push(Vec::new());
                        queue.push_back(j);
                        j
                    }
                };
                out.push((j, start.clone(), mat.clone()));
            }
            edges[i] = out;
        }
        // Canonical numbering: root first, the rest by key.
        let mut order: Vec<usize> = (1..keys.len()).collect();
        order.sort_by(|&x, &y| keys[x].cmp(&keys[y]));
        order.insert(0, 0);
        let mut renum = vec![0; keys.len()];
        for (new, &old) in order.iter().enumerate() {
            renum[old] = new;
        }
        let mut transitions = BTreeMap::new();
        let states: Vec<State> = order
            .iter()
            .map(|&old| {
                let children = edges[old]
                    .iter()
                    .map(|(j, start, mat)| {
                        transitions.insert((renum[old], renum[*j]), mat.clone());
                        Child { state: renum[*j], start: start.clone() }
                    })
                    .collect();
                State {
                    length: keys[old].length.clone(),
                    offsets: keys[old].offsets.clone(),
                    rank: keys[old].rank,
                    children,
                }
            })
            .collect();
        let mut a = Automaton { sys: sys.clone(), states, transitions, essential: Vec::new() };
        a.essential = a.essential_class()?;
        Ok(a)
    }

    pub fn len(&self) -> usize {
        self.states.len()
    }

    pub fn is_empty(&self) -> bool {
        self.states.is_empty()
    }

    pub fn adjacent(&self, i: usize, j: usize) -> bool {
        self.transitions.contains_key(&(i, j))
    }

    fn successors(&self, i: usize) -> BTreeSet<usize> {
        self.states[i].children.iter().map(|c| c.state).collect()
    }

    /// The unique bottom strongly connected component of the state digraph,
    /// with forward closure, strong connectivity and reachability re-checked.
    pub fn essential_class(&self) -> Result<Vec<usize>> {
        let mut g = DiGraph::<(), ()>::new();
        let nodes: Vec<_> = (0..self.len()).map(|_| g.add_node(())).collect();
        for &(i, j) in self.transitions.keys() {
            g.add_edge(nodes[i], nodes[j], ());
        }
        let sccs = tarjan_scc(&g);
        let mut comp = vec![0; self.len()];
        for (c, members) in sccs.iter().enumerate() {
            for n in members {
                comp[n.index()] = c;
            }
        }
        let bottoms: Vec<usize> = (0..sccs.len())
            .filter(|&c| sccs[c].iter().all(|n| self.successors(n.index()).iter().all(|&j| comp[j] == c)))
            .collect();
        if bottoms.len() != 1 {
            return Err(Error::Invariant(format!("{} terminal classes, expected one", bottoms.len())));
        }
        let mut ess: Vec<usize> = sccs[bottoms[0]].iter().map(|n| n.index()).collect();
        ess.sort();
        // (i) forward closed
        let inside: BTreeSet<usize> = ess.iter().copied().collect();
        if ess.iter().any(|&i| !self.successors(i).is_subset(&inside)) {
            return Err(Error::Invariant("essential class is not forward closed".into()));
        }
        // (ii) a class with a single state must carry a loop
        if ess.len() == 1 && !self.adjacent(ess[0], ess[0]) {
            return Err(Error::Invariant("essential class has no cycle".into()));
        }
        // (iii) reachable from every state
        let mut reach = vec![false; self.len()];
        let mut stack: Vec<usize> = ess.clone();
        for &i in &ess {
            reach[i] = true;
        }
        let mut preds: Vec<Vec<usize>> = vec![Vec::new(); self.len()];
        for &(i, j) in self.transitions.keys() {
            preds[j].push(i);
        }
        while let Some(j) = stack.pop() {
            for &i in &preds[j] {
                if !reach[i] {
                    reach[i] = true;
                    stack.push(i);
                }
            }
        }
        if reach.iter().any(|r| !r) {
            return Err(Error::Invariant("essential class not reachable from every state".into()));
        }
        Ok(ess)
    }

    /// The φₙ-coding x₁…xₙ₊₁ of the level-n net interval containing z ∈ (0, 1).
    pub fn coding_of_point(&self, z: &FieldElement, n: usize) -> Result<Vec<usize>> {
        let sys = &self.sys;
        let f = sys.field();
        if sys.sign(z) != Ordering::Greater || sys.cmp(z, &f.one()) != Ordering::Less {
            return Err(Error::PartitionPoint(0));
        }
        let mut word = vec![0usize];
        let mut t = z.clone();
        let mut cur = 0usize;
        for level in 1..=n {
            let kids = &self.states[cur].children;
            let mut next = None;
            for (k, c) in kids.iter().enumerate() {
                match sys.cmp(&t, &c.start) {
                    Ordering::Equal if k > 0 => return Err(Error::PartitionPoint(level)),
                    Ordering::Less => break,
                    _ => next = Some(k),
                }
            }
            let k = next.ok_or_else(|| Error::Invariant("point left of every child".into()))?;
            let c = &kids[k];
            t = f.mul_beta(&(&t - &c.start));
            cur = c.state;
            word.push(cur);
        }
        Ok(word)
    }

    /// ‖T(x₁,x₂)⋯T(xₙ,xₙ₊₁)‖ evaluated as a row vector from the initial state.
    pub fn count_via_matrices(&self, word: &[usize]) -> Result<BigUint> {
        Ok(self.row_vector(word)?.into_iter().sum())
    }

    pub fn row_vector(&self, word: &[usize]) -> Result<Vec<BigUint>> {
        if word.first() != Some(&0) {
            return Err(Error::Inadmissible("word must start at the initial state".into()));
        }
        let mut row = vec![BigUint::one()];
        for w in word.windows(2) {
            let t = self
                .transitions
                .get(&(w[0], w[1]))
                .ok_or_else(|| Error::Inadmissible(format!("no edge {} -> {}", w[0], w[1])))?;
            row = apply(&row, t);
        }
        Ok(row)
    }

    /// All admissible words of length n+1 from the initial state, i.e. the
    /// codings of ℱₙ in left-to-right order.
    pub fn codings(&self, n: usize) -> Vec<Vec<usize>> {
        let mut words = vec![vec![0usize]];
        for _ in 0..n {
            words = words
                .into_iter()
                .flat_map(|w| {
                    let last = *w.last().unwrap();
                    self.states[last].children.iter().map(move |c| {
                        let mut x = w.clone();
                        x.push(c.state);
                        x
                    })
                })
                .collect();
        }
        words
    }

    /// Checks ℓᵢ = ρ Σ_{A_ij=1} ℓⱼ for all states and, restricted, on Ω̂.
    pub fn check_length_identities(&self) -> Result<()> {
        let f = self.sys.field();
        for (i, s) in self.states.iter().enumerate() {
            let sum = s.children.iter().fold(f.zero(), |acc, c| &acc + &self.states[c.state].length);
            if f.mul(self.sys.rho(), &sum) != s.length {
                return Err(Error::Invariant(format!("length identity fails at state {i}")));
            }
        }
        Ok(())
    }

    /// Matrix-product counts for every interval of ℱₙ, in order.
    pub fn level_counts(&self, n: usize, exec: Exec) -> Vec<BigUint> {
        let words = self.codings(n);
        exec::map_slice(exec, &words, |w| self.count_via_matrices(w).expect("admissible"))
    }

    pub fn to_json(&self) -> AutomatonJson {
        let f = self.sys.field();
        let fe = |x: &FieldElement| ElementJson {
            coeffs: x.coeffs().iter().map(format_rational).collect(),
            approx: f.to_f64(x),
        };
        let ess: BTreeSet<usize> = self.essential.iter().copied().collect();
        AutomatonJson {
            beta: self.sys.label().to_string(),
            minimal_polynomial: f.poly().to_string(),
            m: self.sys.m(),
            initial: 1,
            states: self
                .states
                .iter()
                .enumerate()
                .map(|(i, s)| StateJson {
                    id: i + 1,
                    length: fe(&s.length),
                    v: s.v(),
                    offsets: s.offsets.iter().map(fe).collect(),
                    rank: s.rank,
                    children: s.children.iter().map(|c| c.state + 1).collect(),
                    essential: ess.contains(&i),
                })
                .collect(),
            transitions: self
                .transitions
                .iter()
                .map(|(&(i, j), t)| TransitionJson { from: i + 1, to: j + 1, matrix: t.clone() })
                .collect(),
            essential: self.essential.iter().map(|i| i + 1).collect(),
        }
    }

    /// Graphviz rendering with the essential class filled.
    pub fn to_dot(&self) -> String {
        let ess: BTreeSet<usize> = self.essential.iter().copied().collect();
        let mut s = String::from("digraph automaton {\n  rankdir=LR;\n");
        for (i, st) in self.states.iter().enumerate() {
            let style = if ess.contains(&i) { ", style=filled, fillcolor=lightblue" } else { "" };
            let shape = if i == 0 { "doublecircle" } else { "circle" };
            let _ = writeln!(s, "  s{} [label=\"{}\\nv={}\", shape={shape}{style}];", i + 1, i + 1, st.v());
        }
        for (&(i, j), t) in &self.transitions {
            let label: Vec<String> =
                t.iter().map(|r| r.iter().map(u64::to_string).collect::<Vec<_>>().join(" ")).collect();
            let _ = writeln!(s, "  s{} -> s{} [label=\"{}\"];", i + 1, j + 1, label.join("; "));
        }
        s.push_str("}\n");
        s
    }
}

fn apply(row: &[BigUint], t: &[Vec<u64>]) -> Vec<BigUint> {
    let cols = t.first().map_or(0, Vec::len);
    let mut out = vec![BigUint::zero(); cols];
    for (r, trow) in row.iter().zip(t) {
        for (o, &e) in out.iter_mut().zip(trow) {
            if e != 0 {
                *o += r * e;
            }
        }
    }
    out
}

#[derive(Clone, Debug, Serialize)]
pub struct ElementJson {
    /// Coefficients in the basis 1, β, β², …
    pub coeffs: Vec<String>,
    pub approx: f64,
}

#[derive(Clone, Debug, Serialize)]
pub struct StateJson {
    pub id: usize,
    pub length: ElementJson,
    pub v: usize,
    pub offsets: Vec<ElementJson>,
    pub rank: usize,
    pub children: Vec<usize>,
    pub essential: bool,
}

#[derive(Clone, Debug, Serialize)]
pub struct TransitionJson {
    pub from: usize,
    pub to: usize,
    pub matrix: Vec<Vec<u64>>,
}

#[derive(Clone, Debug, Serialize)]
pub struct AutomatonJson {
    pub beta: String,
    pub minimal_polynomial: String,
    pub m: u32,
    pub initial: usize,
    pub states: Vec<StateJson>,
    pub transitions: Vec<TransitionJson>,
    pub essential: Vec<usize>,
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::expansions::count_prefixes;
    use crate::numberfield::parse_beta;
    use num_bigint::BigInt;
    use num_rational::BigRational;

    fn rat(n: i64, d: i64) -> BigRational {
        BigRational::new(BigInt::from(n), BigInt::from(d))
    }

    #[test]
    fn dyadic_net_intervals() {
        let sys = parse_beta("int:2", 2).unwrap();
        let f = net_intervals(&sys, 2).unwrap();
        assert_eq!(f.len(), 4);
        assert!(f.iter().all(|d| d.multiplicity() == 1));
    }

    #[test]
    fn golden_level_one() {
        let sys = parse_beta("golden", 2).unwrap();
        let f1 = net_intervals(&sys, 1).unwrap();
        assert_eq!(f1.len(), 3);
        let rho = sys.rho();
        assert_eq!(f1[0].b, rho.scale_int(-1).add_int(1));
        assert_eq!(f1[1].b, *rho);
        assert_eq!(f1.iter().map(|d| d.multiplicity()).collect::<Vec<_>>(), vec![1, 2, 1]);
        assert_eq!(multiplicity_direct(&sys, &f1[1]).unwrap(), 2);
        assert_eq!(multiplicity_direct(&sys, &f1[0]).unwrap(), 1);
    }

    #[test]
    fn net_lengths_sum_to_one() {
        for spec in ["golden", "multinacci:3"] {
            let sys = parse_beta(spec, 2).unwrap();
            let f = sys.field();
            for n in 0..=8 {
                let total = net_intervals(&sys, n).unwrap().iter().fold(f.zero(), |acc, d| &acc + &(&d.b - &d.a));
                assert_eq!(total, f.one(), "{spec} n={n}");
            }
        }
    }

    #[test]
    fn dyadic_automaton() {
        let sys = parse_beta("int:2", 2).unwrap();
        let a = Automaton::build(&sys, 100).unwrap();
        assert_eq!(a.len(), 2);
        assert!(a.states.iter().all(|s| s.v() == 1));
        assert!(a.transitions.values().all(|t| t == &vec![vec![1]]));
        assert_eq!(a.essential, vec![0, 1]);
        let w = a.codings(5)[7].clone();
        assert_eq!(a.count_via_matrices(&w).unwrap(), BigUint::one());
        let half = sys.rational(rat(1, 2));
        assert!(matches!(a.coding_of_point(&half, 3), Err(Error::PartitionPoint(1))));
    }

    #[test]
    fn golden_automaton_invariants() {
        let sys = parse_beta("golden", 2).unwrap();
        let a = Automaton::build(&sys, DEFAULT_STATE_CAP).unwrap();
        assert_eq!(a.states[0].v(), 1);
        a.check_length_identities().unwrap();
        let ess: BTreeSet<usize> = a.essential.iter().copied().collect();
        for &i in &a.essential {
            assert!(a.successors(i).is_subset(&ess));
        }
        for n in 0..=10 {
            let nets = net_intervals(&sys, n).unwrap();
            let words = a.codings(n);
            assert_eq!(words.len(), nets.len(), "n={n}");
            let counts = a.level_counts(n, Exec::Sequential);
            for (d, c) in nets.iter().zip(&counts) {
                assert_eq!(BigUint::from(d.multiplicity()), *c);
            }
        }
        for w in a.codings(8) {
            assert!(a.row_vector(&w).unwrap().iter().all(|e| !e.is_zero()));
        }
    }

    #[test]
    fn coding_matches_prefix_count() {
        let sys = parse_beta("golden", 2).unwrap();
        let a = Automaton::build(&sys, DEFAULT_STATE_CAP).unwrap();
        let f = sys.field();
        let z = sys.rational(rat(2, 5));
        let w = a.coding_of_point(&z, 12).unwrap();
        for n in 0..=12 {
            let prefix = &w[..=n];
            assert_eq!(a.codings(n).iter().filter(|x| x.as_slice() == prefix).count(), 1);
            let x = f.mul(&z, sys.right_end());
            assert_eq!(a.count_via_matrices(prefix).unwrap(), count_prefixes(&sys, &x, n).unwrap());
        }
    }

    #[test]
    fn direct_multiplicity_matches_covering_lists() {
        let sys = parse_beta("multinacci:3", 2).unwrap();
        for d in net_intervals(&sys, 6).unwrap() {
            assert_eq!(multiplicity_direct(&sys, &d).unwrap(), d.multiplicity());
        }
    }

    #[test]
    fn non_pisot_hits_cap() {
        let sys = parse_beta("poly:-3,0,1", 2).unwrap();
        assert!(matches!(Automaton::build(&sys, 500), Err(Error::CapExceeded { .. })));
    }

    #[test]
    fn rebuild_is_identical() {
        let sys = parse_beta("multinacci:3", 2).unwrap();
        let a = Automaton::build(&sys, DEFAULT_STATE_CAP).unwrap();
        let b = Automaton::build(&sys, DEFAULT_STATE_CAP).unwrap();
        assert_eq!(a.transitions, b.transitions);
        assert_eq!(format!("{:?}", a.to_json()), format!("{:?}", b.to_json()));
    }
}
