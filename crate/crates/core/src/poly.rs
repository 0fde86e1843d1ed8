//! Dense univariate polynomials over ℚ and 𝔽_p, constant term first.
//!
//! Only what the number-field layer needs: Sturm sequences for real-root
//! isolation, rational-root and square-free tests, and a mod-p distinct-degree
//! factorization used to certify irreducibility.

use num_bigint::BigInt;
use num_integer::Integer;
use num_rational::BigRational;
use num_traits::{One, Signed, ToPrimitive, Zero};
use std::collections::BTreeSet;

pub type RatPoly = Vec<BigRational>;

pub fn trim(p: &mut RatPoly) {
    while p.last().is_some_and(|c| c.is_zero()) {
        p.pop();
    }
}

/// Degree, or `None` for the zero polynomial.
pub fn degree(p: &[BigRational]) -> Option<usize> {
    p.iter().rposition(|c| !c.is_zero())
}

pub fn from_ints(c: &[BigInt]) -> RatPoly {
    let mut p: RatPoly = c.iter().cloned().map(BigRational::from_integer).collect();
    trim(&mut p);
    p
}

pub fn eval(p: &[BigRational], x: &BigRational) -> BigRational {
    p.iter().rev().fold(BigRational::zero(), |acc, c| acc * x + c)
}

pub fn derivative(p: &[BigRational]) -> RatPoly {
    let mut d: RatPoly =
        p.iter().enumerate().skip(1).map(|(i, c)| c * BigRational::from_integer(BigInt::from(i))).collect();
    trim(&mut d);
    d
}

/// Remainder of `a` modulo nonzero `b`.
pub fn rem(a: &[BigRational], b: &[BigRational]) -> RatPoly {
    let db = degree(b).expect("division by zero polynomial");
    let lead = &b[db];
    let mut r: RatPoly = a.to_vec();
    trim(&mut r);
    while let Some(dr) = degree(&r) {
        if dr < db {
            break;
        }
        let q = &r[dr] / lead;
        let shift = dr - db;
        for (i, c) in b.iter().enumerate().take(db + 1) {
            let t = &q * c;
            r[i + shift] -= t;
        }
        trim(&mut r);
    }
    r
}

fn make_monic(p: &mut RatPoly) {
    if let Some(d) = degree(p) {
        let lead = p[d].clone();
        for c in p.iter_mut() {
            *c = &*c / &lead;
        }
    }
}

pub fn gcd(a: &[BigRational], b: &[BigRational]) -> RatPoly {
    let mut x: RatPoly = a.to_vec();
    let mut y: RatPoly = b.to_vec();
    trim(&mut x);
    trim(&mut y);
    while degree(&y).is_some() {
        let r = rem(&x, &y);
        x = y;
        y = r;
    }
    make_monic(&mut x);
    x
}

/// Sturm chain `p, p', -rem(p, p'), ...`.
pub fn sturm_chain(p: &[BigRational]) -> Vec<RatPoly> {
    let mut chain = vec![p.to_vec(), derivative(p)];
    loop {
        let n = chain.len();
        if degree(&chain[n - 1]).is_none_or(|d| d == 0) {
            break;
        }
        let r: RatPoly = rem(&chain[n - 2], &chain[n - 1]).into_iter().map(|c| -c).collect();
        if degree(&r).is_none() {
            break;
        }
        chain.push(r);
    }
    chain
}

fn sign_changes(chain: &[RatPoly], x: &BigRational) -> usize {
    let mut last = 0i8;
    let mut changes = 0;
    for q in chain {
        let v = eval(q, x);
        let s = if v.is_positive() {
            1
        } else if v.is_negative() {
            -1
        } else {
            0
        };
        if s != 0 {
            if last != 0 && s != last {
                changes += 1;
            }
            last = s;
        }
    }
    changes
}

/// Number of distinct real roots in the half-open interval `(a, b]`.
pub fn count_roots(chain: &[RatPoly], a: &BigRational, b: &BigRational) -> usize {
    sign_changes(chain, a).saturating_sub(sign_changes(chain, b))
}

/// Integer upper bound on the modulus of every complex root.
pub fn cauchy_bound(p: &[BigRational]) -> BigInt {
    let d = degree(p).expect("zero polynomial");
    let lead = p[d].abs();
    let mut m = BigRational::zero();
    for c in &p[..d] {
        let r = c.abs() / &lead;
        if r > m {
            m = r;
        }
    }
    (m + BigRational::one()).ceil().to_integer()
}

fn divisors(n: &BigInt) -> Vec<BigInt> {
    let n = n.abs();
    let mut out = Vec::new();
    let mut d = BigInt::one();
    while &d * &d <= n {
        if (&n % &d).is_zero() {
            out.push(d.clone());
            let q = &n / &d;
            if q != d {
                out.push(q);
            }
        }
        d += 1;
    }
    out
}

/// All rational roots of an integer polynomial (rational-root theorem).
pub fn rational_roots(c: &[BigInt]) -> Vec<BigRational> {
    let p = from_ints(c);
    let Some(d) = degree(&p) else {
        return Vec::new();
    };
    let mut roots = Vec::new();
    if c[0].is_zero() {
        roots.push(BigRational::zero());
    }
    let low = c.iter().position(|x| !x.is_zero()).unwrap_or(0);
    if low >= d {
        return roots;
    }
    for num in divisors(&c[low]) {
        for den in divisors(&c[d]) {
            for s in [1i32, -1] {
                let r = BigRational::new(&num * BigInt::from(s), den.clone());
                if eval(&p, &r).is_zero() && !roots.contains(&r) {
                    roots.push(r);
                }
            }
        }
    }
    roots
}

// ---------------------------------------------------------------------------
// Arithmetic over 𝔽_p (p < 2^31), coefficients as u64
// ---------------------------------------------------------------------------

type ModPoly = Vec<u64>;

fn mtrim(a: &mut ModPoly) {
    while a.last() == Some(&0) {
        a.pop();
    }
}

fn mdeg(a: &ModPoly) -> Option<usize> {
    a.iter().rposition(|&c| c != 0)
}

fn inv_mod(a: u64, p: u64) -> u64 {
    let mut r = 1u64;
    let mut b = a % p;
    let mut e = p - 2;
    while e > 0 {
        if e & 1 == 1 {
            r = r * b % p;
        }
        b = b * b % p;
        e >>= 1;
    }
    r
}

fn mrem(a: &ModPoly, b: &ModPoly, p: u64) -> ModPoly {
    let db = mdeg(b).expect("zero divisor");
    let inv = inv_mod(b[db], p);
    let mut r = a.clone();
    mtrim(&mut r);
    while let Some(dr) = mdeg(&r) {
        if dr < db {
            break;
        }
        let q = r[dr] * inv % p;
        let shift = dr - db;
        for i in 0..=db {
            r[i + shift] = (r[i + shift] + p - q * b[i] % p) % p;
        }
        mtrim(&mut r);
    }
    r
}

fn mdiv(a: &ModPoly, b: &ModPoly, p: u64) -> ModPoly {
    let db = mdeg(b).expect("zero divisor");
    let inv = inv_mod(b[db], p);
    let mut r = a.clone();
    mtrim(&mut r);
    let da = match mdeg(&r) {
        Some(d) if d >= db => d,
        _ => return Vec::new(),
    };
    let mut q = vec![0u64; da - db + 1];
    while let Some(dr) = mdeg(&r) {
        if dr < db {
            break;
        }
        let c = r[dr] * inv % p;
        let shift = dr - db;
        q[shift] = c;
        for i in 0..=db {
            r[i + shift] = (r[i + shift] + p - c * b[i] % p) % p;
        }
        mtrim(&mut r);
    }
    mtrim(&mut q);
    q
}

fn mmul(a: &ModPoly, b: &ModPoly, p: u64) -> ModPoly {
    if a.is_empty() || b.is_empty() {
        return Vec::new();
    }
    let mut out = vec![0u64; a.len() + b.len() - 1];
    for (i, &x) in a.iter().enumerate() {
        for (j, &y) in b.iter().enumerate() {
            out[i + j] = (out[i + j] + x * y) % p;
        }
    }
    mtrim(&mut out);
    out
}

fn mgcd(a: &ModPoly, b: &ModPoly, p: u64) -> ModPoly {
    let mut x = a.clone();
    let mut y = b.clone();
    mtrim(&mut x);
    mtrim(&mut y);
    while mdeg(&y).is_some() {
        let r = mrem(&x, &y, p);
        x = y;
        y = r;
    }
    if let Some(d) = mdeg(&x) {
        let inv = inv_mod(x[d], p);
        for c in x.iter_mut() {
            *c = *c * inv % p;
        }
    }
    x
}

fn mpowmod(base: &ModPoly, mut e: u64, f: &ModPoly, p: u64) -> ModPoly {
    let mut result: ModPoly = vec![1];
    let mut b = mrem(base, f, p);
    while e > 0 {
        if e & 1 == 1 {
            result = mrem(&mmul(&result, &b, p), f, p);
        }
        b = mrem(&mmul(&b, &b, p), f, p);
        e >>= 1;
    }
    result
}

fn msub(a: &ModPoly, b: &ModPoly, p: u64) -> ModPoly {
    let n = a.len().max(b.len());
    let mut out: ModPoly = (0..n)
        .map(|i| {
            let x = a.get(i).copied().unwrap_or(0);
            let y = b.get(i).copied().unwrap_or(0);
            (x + p - y) % p
        })
        .collect();
    mtrim(&mut out);
    out
}

fn mderiv(a: &ModPoly, p: u64) -> ModPoly {
    let mut d: ModPoly = a.iter().enumerate().skip(1).map(|(i, &c)| (i as u64 % p) * c % p).collect();
    mtrim(&mut d);
    d
}

/// Degrees of the irreducible factors of a square-free `f` over 𝔽_p.
fn distinct_degree_pattern(f: &ModPoly, p: u64) -> Vec<usize> {
    let mut f = f.clone();
    let mut degrees = Vec::new();
    let x: ModPoly = vec![0, 1];
    let mut h = x.clone();
    let mut i = 1;
    while mdeg(&f).is_some_and(|d| d >= 2 * i) {
        h = mpowmod(&h, p, &f, p);
        let g = mgcd(&f, &msub(&h, &x, p), p);
        let dg = mdeg(&g).unwrap_or(0);
        if dg > 0 {
            degrees.extend(std::iter::repeat_n(i, dg / i));
            f = mdiv(&f, &g, p);
            h = mrem(&h, &f, p);
        }
        i += 1;
    }
    if let Some(d) = mdeg(&f) {
        if d > 0 {
            degrees.push(d);
        }
    }
    degrees
}

fn subset_sums(parts: &[usize]) -> BTreeSet<usize> {
    let mut sums = BTreeSet::from([0usize]);
    for &d in parts {
        let next: Vec<usize> = sums.iter().map(|s| s + d).collect();
        sums.extend(next);
    }
    sums
}

fn small_primes(count: usize) -> Vec<u64> {
    let mut out = Vec::with_capacity(count);
    let mut n = 3u64;
    while out.len() < count {
        if (2..).take_while(|k| k * k <= n).all(|k| !n.is_multiple_of(k)) {
            out.push(n);
        }
        n += 2;
    }
    out
}

/// Outcome of the trial irreducibility test.
#[derive(Clone, Debug, PartialEq, Eq)]
pub enum Irreducibility {
    Irreducible,
    Reducible(String),
    Unknown,
}

/// Trial-method irreducibility test for a primitive integer polynomial:
/// rational roots, square-freeness over ℚ, then intersecting the possible
/// factor degrees implied by factorization patterns modulo small primes.
pub fn irreducibility(c: &[BigInt]) -> Irreducibility {
    let p = from_ints(c);
    let Some(d) = degree(&p) else {
        return Irreducibility::Reducible("zero polynomial".into());
    };
    if d == 1 {
        return Irreducibility::Irreducible;
    }
    if let Some(r) = rational_roots(c).first() {
        return Irreducibility::Reducible(format!("rational root {r}"));
    }
    if degree(&gcd(&p, &derivative(&p))).is_some_and(|g| g > 0) {
        return Irreducibility::Reducible("repeated factor".into());
    }
    if d <= 3 {
        // Any proper factorization of a cubic or quadratic has a linear factor.
        return Irreducibility::Irreducible;
    }
    let mut possible: BTreeSet<usize> = (0..=d).collect();
    for q in small_primes(80) {
        let qb = BigInt::from(q);
        let f: ModPoly = c.iter().map(|a| a.mod_floor(&qb).to_u64().expect("residue fits")).collect();
        let mut f = f;
        mtrim(&mut f);
        if mdeg(&f) != Some(d) {
            continue;
        }
        if mdeg(&mgcd(&f, &mderiv(&f, q), q)).is_some_and(|g| g > 0) {
            continue;
        }
        let sums = subset_sums(&distinct_degree_pattern(&f, q));
        possible = possible.intersection(&sums).copied().collect();
        if possible.len() == 2 {
            return Irreducibility::Irreducible;
        }
    }
    Irreducibility::Unknown
}
