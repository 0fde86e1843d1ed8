//! Exact arithmetic in ℚ(β).
//!
//! Elements are rational coefficient vectors in the power basis `1, β, …, β^{d-1}`
//! reduced modulo the minimal polynomial, so equality is a coefficient check.
//! Signs are decided for the real embedding at a designated root β > 1, held as
//! a rational isolating interval that is refined on demand.

use crate::error::{Error, Result};
use crate::poly::{self, Irreducibility, RatPoly};
use crate::roots;
use num_bigint::BigInt;
use num_integer::Integer;
use num_rational::BigRational;
use num_traits::{One, Signed, ToPrimitive, Zero};
use std::cmp::Ordering;
use std::fmt;
use std::ops::{Add, Neg, Sub};
use std::sync::{Arc, RwLock};

/// Largest supported field degree.
pub const MAX_DEGREE: usize = 10;
/// Conjugates whose modulus is this close to 1 cannot be classified.
pub const PISOT_MARGIN: f64 = 1e-9;

/// Primitive integer polynomial with positive leading coefficient, certified
/// irreducible over ℚ.
#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub struct MinimalPolynomial {
    coeffs: Vec<BigInt>,
}

impl MinimalPolynomial {
    pub fn new(coeffs: Vec<BigInt>) -> Result<Self> {
        let mut coeffs = coeffs;
        while coeffs.last().is_some_and(|c| c.is_zero()) {
            coeffs.pop();
        }
        if coeffs.len() < 2 {
            return Err(Error::BadInput("polynomial must have degree at least 1".into()));
        }
        let degree = coeffs.len() - 1;
        if degree > MAX_DEGREE {
            return Err(Error::DegreeTooLarge(degree));
        }
        let content = coeffs.iter().fold(BigInt::zero(), |g, c| g.gcd(c));
        let sign = if coeffs[degree].is_negative() { -1 } else { 1 };
        let content = content * BigInt::from(sign);
        let coeffs: Vec<BigInt> = coeffs.into_iter().map(|c| c / &content).collect();
        match poly::irreducibility(&coeffs) {
            Irreducibility::Irreducible => Ok(Self { coeffs }),
            Irreducibility::Reducible(why) => Err(Error::Reducible(why)),
            Irreducibility::Unknown => {
                Err(Error::Reducible("irreducibility could not be certified by trial methods".into()))
            }
        }
    }

    pub fn from_i64(coeffs: &[i64]) -> Result<Self> {
        Self::new(coeffs.iter().map(|&c| BigInt::from(c)).collect())
    }

    pub fn degree(&self) -> usize {
        self.coeffs.len() - 1
    }

    /// Coefficients, constant term first.
    pub fn coeffs(&self) -> &[BigInt] {
        &self.coeffs
    }

    pub fn is_monic(&self) -> bool {
        self.coeffs[self.degree()].is_one()
    }

    fn rational(&self) -> RatPoly {
        poly::from_ints(&self.coeffs)
    }
}

impl fmt::Display for MinimalPolynomial {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let mut first = true;
        for (i, c) in self.coeffs.iter().enumerate().rev() {
            if c.is_zero() {
                continue;
            }
            let neg = c.is_negative();
            let a = c.abs();
            if first {
                if neg {
                    write!(f, "-")?;
                }
            } else {
                write!(f, " {} ", if neg { '-' } else { '+' })?;
            }
            first = false;
            match (i, a.is_one()) {
                (0, _) => write!(f, "{a}")?,
                (1, true) => write!(f, "x")?,
                (1, false) => write!(f, "{a}x")?,
                (_, true) => write!(f, "x^{i}")?,
                (_, false) => write!(f, "{a}x^{i}")?,
            }
        }
        Ok(())
    }
}

/// An element of ℚ(β) in canonical form (exactly `degree` coefficients).
///
/// The derived `Ord` is lexicographic on coefficients; it is a canonical
/// ordering for reproducible output, not the order of the real line. Use
/// [`NumberField::cmp`] for real comparisons.
#[derive(Clone, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct FieldElement {
    coeffs: Vec<BigRational>,
}

impl FieldElement {
    pub fn coeffs(&self) -> &[BigRational] {
        &self.coeffs
    }

    pub fn is_zero(&self) -> bool {
        self.coeffs.iter().all(Zero::is_zero)
    }

    /// The value as a rational, when it lies in ℚ.
    pub fn as_rational(&self) -> Option<&BigRational> {
        if self.coeffs[1..].iter().all(Zero::is_zero) {
            Some(&self.coeffs[0])
        } else {
            None
        }
    }

    pub fn scale(&self, k: &BigRational) -> FieldElement {
        FieldElement { coeffs: self.coeffs.iter().map(|c| c * k).collect() }
    }

    pub fn scale_int(&self, k: i64) -> FieldElement {
        self.scale(&BigRational::from_integer(BigInt::from(k)))
    }

    /// Adds an integer to the element.
    pub fn add_int(&self, k: i64) -> FieldElement {
        let mut out = self.clone();
        out.coeffs[0] += BigRational::from_integer(BigInt::from(k));
        out
    }
}

impl Add for &FieldElement {
    type Output = FieldElement;
    fn add(self, rhs: &FieldElement) -> FieldElement {
        FieldElement { coeffs: self.coeffs.iter().zip(&rhs.coeffs).map(|(a, b)| a + b).collect() }
    }
}

impl Sub for &FieldElement {
    type Output = FieldElement;
    fn sub(self, rhs: &FieldElement) -> FieldElement {
        FieldElement { coeffs: self.coeffs.iter().zip(&rhs.coeffs).map(|(a, b)| a - b).collect() }
    }
}

impl Add for FieldElement {
    type Output = FieldElement;
    fn add(self, rhs: FieldElement) -> FieldElement {
        &self + &rhs
    }
}

impl Sub for FieldElement {
    type Output = FieldElement;
    fn sub(self, rhs: FieldElement) -> FieldElement {
        &self - &rhs
    }
}

impl Neg for &FieldElement {
    type Output = FieldElement;
    fn neg(self) -> FieldElement {
        FieldElement { coeffs: self.coeffs.iter().map(|c| -c).collect() }
    }
}

impl Neg for FieldElement {
    type Output = FieldElement;
    fn neg(self) -> FieldElement {
        -&self
    }
}

#[derive(Clone, Debug)]
struct RootBox {
    lo: BigRational,
    hi: BigRational,
    lo_pows: Vec<BigRational>,
    hi_pows: Vec<BigRational>,
}

impl RootBox {
    fn new(lo: BigRational, hi: BigRational, d: usize) -> Self {
        let pows = |x: &BigRational| {
            let mut v = Vec::with_capacity(d);
            let mut acc = BigRational::one();
            for _ in 0..d {
                v.push(acc.clone());
                acc *= x;
            }
            v
        };
        RootBox { lo_pows: pows(&lo), hi_pows: pows(&hi), lo, hi }
    }

    fn width(&self) -> BigRational {
        &self.hi - &self.lo
    }
}

/// ℚ(β) together with the real embedding at its designated root β > 1.
pub struct NumberField {
    poly: MinimalPolynomial,
    rpoly: RatPoly,
    /// `β^d = Σ reducer[i] β^i`.
    reducer: Vec<BigRational>,
    root: RwLock<RootBox>,
    approx: f64,
    powers_f64: Vec<f64>,
}

impl fmt::Debug for NumberField {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.debug_struct("NumberField").field("poly", &self.poly.to_string()).field("beta", &self.approx).finish()
    }
}

fn pow2(k: i64) -> BigRational {
    if k >= 0 {
        BigRational::from_integer(BigInt::one() << k as usize)
    } else {
        BigRational::new(BigInt::one(), BigInt::one() << (-k) as usize)
    }
}

fn sign_of(x: &BigRational) -> Ordering {
    x.cmp(&BigRational::zero())
}

pub(crate) fn rat_to_f64(x: &BigRational) -> f64 {
    x.to_f64().unwrap_or_else(|| if x.is_negative() { f64::NEG_INFINITY } else { f64::INFINITY })
}

impl NumberField {
    /// Builds the field and isolates its largest real root, which must exceed 1.
    pub fn new(poly: MinimalPolynomial) -> Result<Self> {
        let d = poly.degree();
        let rpoly = poly.rational();
        let lead = rpoly[d].clone();
        let reducer: Vec<BigRational> = rpoly[..d].iter().map(|c| -(c / &lead)).collect();
        let one = BigRational::one();
        let root = if d == 1 {
            let b = reducer[0].clone();
            if b <= one {
                return Err(Error::NoRootAboveOne);
            }
            RootBox::new(b.clone(), b, d)
        } else {
            let chain = poly::sturm_chain(&rpoly);
            let mut lo = one.clone();
            let mut hi = BigRational::from_integer(poly::cauchy_bound(&rpoly));
            if poly::count_roots(&chain, &lo, &hi) == 0 {
                return Err(Error::NoRootAboveOne);
            }
            let two = BigRational::from_integer(2.into());
            while poly::count_roots(&chain, &lo, &hi) > 1 {
                let mid = (&lo + &hi) / &two;
                if poly::count_roots(&chain, &mid, &hi) >= 1 {
                    lo = mid;
                } else {
                    hi = mid;
                }
            }
            RootBox::new(lo, hi, d)
        };
        let mut field =
            NumberField { poly, rpoly, reducer, root: RwLock::new(root), approx: 0.0, powers_f64: Vec::new() };
        field.refine_until(&pow2(-80));
        let b = field.root.read().unwrap();
        let mid = (&b.lo + &b.hi) / BigRational::from_integer(2.into());
        let approx = rat_to_f64(&mid);
        drop(b);
        field.approx = approx;
        field.powers_f64 = (0..d).map(|i| approx.powi(i as i32)).collect();
        Ok(field)
    }

    pub fn poly(&self) -> &MinimalPolynomial {
        &self.poly
    }

    pub fn degree(&self) -> usize {
        self.poly.degree()
    }

    /// Floating approximation of β.
    pub fn beta_f64(&self) -> f64 {
        self.approx
    }

    /// Current rational isolating interval of β.
    pub fn isolating_interval(&self) -> (BigRational, BigRational) {
        let b = self.root.read().unwrap();
        (b.lo.clone(), b.hi.clone())
    }

    fn refine_until(&self, width: &BigRational) {
        let mut b = self.root.write().unwrap();
        if b.lo == b.hi {
            return;
        }
        let two = BigRational::from_integer(2.into());
        let lo_sign = sign_of(&poly::eval(&self.rpoly, &b.lo));
        let (mut lo, mut hi) = (b.lo.clone(), b.hi.clone());
        while &(&hi - &lo) > width {
            let mid = (&lo + &hi) / &two;
            let s = sign_of(&poly::eval(&self.rpoly, &mid));
            if s == Ordering::Equal {
                lo = mid.clone();
                hi = mid;
                break;
            }
            if s == lo_sign {
                lo = mid;
            } else {
                hi = mid;
            }
        }
        *b = RootBox::new(lo, hi, self.degree());
    }

    pub fn zero(&self) -> FieldElement {
        FieldElement { coeffs: vec![BigRational::zero(); self.degree()] }
    }

    pub fn from_rational(&self, r: BigRational) -> FieldElement {
        let mut e = self.zero();
        e.coeffs[0] = r;
        e
    }

    pub fn from_int(&self, k: i64) -> FieldElement {
        self.from_rational(BigRational::from_integer(BigInt::from(k)))
    }

    pub fn one(&self) -> FieldElement {
        self.from_int(1)
    }

    /// The element β itself.
    pub fn beta(&self) -> FieldElement {
        if self.degree() == 1 {
            return self.from_rational(self.reducer[0].clone());
        }
        let mut e = self.zero();
        e.coeffs[1] = BigRational::one();
        e
    }

    /// Element from power-basis coefficients (reduced if longer than the degree).
    pub fn from_coeffs(&self, coeffs: Vec<BigRational>) -> FieldElement {
        self.reduce(coeffs)
    }

    fn reduce(&self, mut c: Vec<BigRational>) -> FieldElement {
        let d = self.degree();
        while c.len() > d {
            let top = c.pop().unwrap();
            if top.is_zero() {
                continue;
            }
            let base = c.len() - d;
            for (i, r) in self.reducer.iter().enumerate() {
                c[base + i] += &top * r;
            }
        }
        c.resize(d, BigRational::zero());
        FieldElement { coeffs: c }
    }

    pub fn mul(&self, a: &FieldElement, b: &FieldElement) -> FieldElement {
        let d = self.degree();
        let mut prod = vec![BigRational::zero(); 2 * d - 1];
        for (i, x) in a.coeffs.iter().enumerate() {
            if x.is_zero() {
                continue;
            }
            for (j, y) in b.coeffs.iter().enumerate() {
                if !y.is_zero() {
                    prod[i + j] += x * y;
                }
            }
        }
        self.reduce(prod)
    }

    /// `β·a`, cheaper than a general product.
    pub fn mul_beta(&self, a: &FieldElement) -> FieldElement {
        let d = self.degree();
        if d == 1 {
            return FieldElement { coeffs: vec![&a.coeffs[0] * &self.reducer[0]] };
        }
        let top = &a.coeffs[d - 1];
        let mut out = Vec::with_capacity(d);
        out.push(top * &self.reducer[0]);
        for i in 1..d {
            out.push(&a.coeffs[i - 1] + top * &self.reducer[i]);
        }
        FieldElement { coeffs: out }
    }

    /// Multiplicative inverse; `None` for zero.
    pub fn inv(&self, a: &FieldElement) -> Option<FieldElement> {
        if a.is_zero() {
            return None;
        }
        // Extended Euclid on (p, a): track s with s·a ≡ r (mod p).
        let mut r0: RatPoly = self.rpoly.clone();
        let mut r1: RatPoly = a.coeffs.clone();
        poly::trim(&mut r1);
        let mut s0: RatPoly = Vec::new();
        let mut s1: RatPoly = vec![BigRational::one()];
        while poly::degree(&r1).is_some_and(|d| d > 0) {
            let (q, r) = divmod(&r0, &r1);
            let s2 = poly_sub(&s0, &poly_mul(&q, &s1));
            r0 = r1;
            r1 = r;
            s0 = s1;
            s1 = s2;
        }
        let c = r1[0].clone();
        let inv: RatPoly = s1.into_iter().map(|x| x / &c).collect();
        Some(self.reduce(inv))
    }

    pub fn div(&self, a: &FieldElement, b: &FieldElement) -> Option<FieldElement> {
        self.inv(b).map(|ib| self.mul(a, &ib))
    }

    /// `β^k` for any integer `k`.
    pub fn beta_pow(&self, k: i64) -> FieldElement {
        let base = if k >= 0 { self.beta() } else { self.inv(&self.beta()).expect("beta is nonzero") };
        let mut acc = self.one();
        for _ in 0..k.unsigned_abs() {
            acc = self.mul(&acc, &base);
        }
        acc
    }

    fn float_sign(&self, x: &FieldElement) -> Option<Ordering> {
        let mut sum = 0.0f64;
        let mut mag = 0.0f64;
        for (c, p) in x.coeffs.iter().zip(&self.powers_f64) {
            if c.is_zero() {
                continue;
            }
            let cf = c.to_f64()?;
            if !cf.is_finite() || cf.abs() < 1e-280 {
                return None;
            }
            let t = cf * p;
            sum += t;
            mag += t.abs();
        }
        let d = self.degree() as f64;
        let bound = mag * (4.0 * d + 16.0) * f64::EPSILON;
        if sum.abs() > bound {
            Some(if sum > 0.0 { Ordering::Greater } else { Ordering::Less })
        } else {
            None
        }
    }

    fn interval_sign(&self, x: &FieldElement, b: &RootBox) -> Option<Ordering> {
        let mut lo = BigRational::zero();
        let mut hi = BigRational::zero();
        for (i, c) in x.coeffs.iter().enumerate() {
            if c.is_zero() {
                continue;
            }
            let a = c * &b.lo_pows[i];
            let z = c * &b.hi_pows[i];
            if c.is_positive() {
                lo += a;
                hi += z;
            } else {
                lo += z;
                hi += a;
            }
        }
        if lo.is_positive() {
            Some(Ordering::Greater)
        } else if hi.is_negative() {
            Some(Ordering::Less)
        } else {
            None
        }
    }

    /// Sign of the real embedding of `x`. Zero is decided from coefficients
    /// alone; nonzero elements always get a definite sign.
    pub fn sign(&self, x: &FieldElement) -> Ordering {
        if x.is_zero() {
            return Ordering::Equal;
        }
        if self.degree() == 1 {
            return sign_of(&x.coeffs[0]);
        }
        if let Some(s) = self.float_sign(x) {
            return s;
        }
        loop {
            let (s, width) = {
                let b = self.root.read().unwrap();
                (self.interval_sign(x, &b), b.width())
            };
            if let Some(s) = s {
                return s;
            }
            let target = width / pow2(32);
            self.refine_until(&target);
        }
    }

    /// Real-line comparison of two field elements.
    pub fn cmp(&self, a: &FieldElement, b: &FieldElement) -> Ordering {
        self.sign(&(a - b))
    }

    pub fn to_f64(&self, x: &FieldElement) -> f64 {
        let (sum, mag) = x
            .coeffs
            .iter()
            .zip(&self.powers_f64)
            .map(|(c, p)| rat_to_f64(c) * p)
            .fold((0.0, 0.0), |(s, m), t: f64| (s + t, m + t.abs()));
        if self.degree() == 1 || x.is_zero() || !mag.is_finite() || sum.abs() * 4.0 >= mag {
            return sum;
        }
        // Cancellation: refine to ~55 significant bits.
        let scale = sum.abs().max(mag * 1e-15);
        let bits = (55.0 - scale.log2().floor()).clamp(1.0, 4000.0) as u32;
        rat_to_f64(&self.approx_rational(x, bits))
    }

    /// Rational approximation of `x` with absolute error below `2^-bits`.
    pub fn approx_rational(&self, x: &FieldElement, bits: u32) -> BigRational {
        if self.degree() == 1 {
            return x.coeffs[0].clone();
        }
        let tol = pow2(-(bits as i64));
        loop {
            let b = self.root.read().unwrap().clone();
            let mut lo = BigRational::zero();
            let mut hi = BigRational::zero();
            for (i, c) in x.coeffs.iter().enumerate() {
                let a = c * &b.lo_pows[i];
                let z = c * &b.hi_pows[i];
                if c.is_negative() {
                    lo += z;
                    hi += a;
                } else {
                    lo += a;
                    hi += z;
                }
            }
            if &hi - &lo < tol {
                return (lo + hi) / BigRational::from_integer(2.into());
            }
            self.refine_until(&(b.width() / pow2(16)));
        }
    }
}

fn poly_mul(a: &[BigRational], b: &[BigRational]) -> RatPoly {
    if a.is_empty() || b.is_empty() {
        return Vec::new();
    }
    let mut out = vec![BigRational::zero(); a.len() + b.len() - 1];
    for (i, x) in a.iter().enumerate() {
        for (j, y) in b.iter().enumerate() {
            out[i + j] += x * y;
        }
    }
    poly::trim(&mut out);
    out
}

fn poly_sub(a: &[BigRational], b: &[BigRational]) -> RatPoly {
    let n = a.len().max(b.len());
    let mut out: RatPoly = (0..n)
        .map(|i| {
            let x = a.get(i).cloned().unwrap_or_default();
            let y = b.get(i).cloned().unwrap_or_default();
            x - y
        })
        .collect();
    poly::trim(&mut out);
    out
}

fn divmod(a: &[BigRational], b: &[BigRational]) -> (RatPoly, RatPoly) {
    let db = poly::degree(b).expect("nonzero divisor");
    let mut r: RatPoly = a.to_vec();
    poly::trim(&mut r);
    let mut q = vec![BigRational::zero(); r.len().saturating_sub(db).max(1)];
    while let Some(dr) = poly::degree(&r) {
        if dr < db {
            break;
        }
        let c = &r[dr] / &b[db];
        let shift = dr - db;
        for i in 0..=db {
            r[i + shift] -= &c * &b[i];
        }
        q[shift] = c;
        poly::trim(&mut r);
    }
    poly::trim(&mut q);
    (q, r)
}

/// Pisot test for the designated (largest real) root of `p`: it must exceed 1,
/// be an algebraic integer, and every other complex root must have modulus
/// below 1. Conjugates within [`PISOT_MARGIN`] of the unit circle make the
/// answer undecidable.
pub fn is_pisot(p: &MinimalPolynomial) -> Result<bool> {
    let field = match NumberField::new(p.clone()) {
        Ok(f) => f,
        Err(Error::NoRootAboveOne) => return Ok(false),
        Err(e) => return Err(e),
    };
    if !p.is_monic() {
        return Ok(false);
    }
    if p.degree() == 1 {
        return Ok(true);
    }
    let disks = roots::isolate_complex_roots(p.coeffs())
        .ok_or_else(|| Error::Undecidable("complex roots could not be separated".into()))?;
    let beta = field.beta_f64();
    let (designated, _) = disks
        .iter()
        .enumerate()
        .map(|(i, d)| (i, (d.center - num_complex::Complex64::new(beta, 0.0)).norm()))
        .min_by(|a, b| a.1.total_cmp(&b.1))
        .expect("at least one root");
    let mut undecided = false;
    for (i, d) in disks.iter().enumerate() {
        if i == designated {
            continue;
        }
        let r = d.center.norm();
        if r - d.radius > 1.0 + PISOT_MARGIN {
            return Ok(false);
        }
        if r + d.radius >= 1.0 - PISOT_MARGIN {
            undecided = true;
        }
    }
    if undecided {
        return Err(Error::Undecidable("a conjugate lies within 1e-9 of the unit circle".into()));
    }
    Ok(true)
}

/// Base β with digit alphabet {0, …, m−1} and the associated IFS data.
#[derive(Clone, Debug)]
pub struct BetaSystem {
    field: Arc<NumberField>,
    m: u32,
    beta: FieldElement,
    rho: FieldElement,
    right_end: FieldElement,
    pisot: bool,
    label: String,
}

impl BetaSystem {
    /// Requires m ≥ β; equality is only possible for integer β (no overlaps).
    pub fn new(field: NumberField, m: u32, label: impl Into<String>) -> Result<Self> {
        if m < 2 {
            return Err(Error::BadInput("digit count m must be at least 2".into()));
        }
        let beta = field.beta();
        let gap = &field.from_int(m as i64) - &beta;
        if field.sign(&gap) == Ordering::Less {
            return Err(Error::DigitCountTooSmall { m, beta: field.beta_f64() });
        }
        let rho = field.inv(&beta).expect("beta > 1");
        let bm1 = beta.add_int(-1);
        let right_end = field.inv(&bm1).expect("beta > 1").scale_int(m as i64 - 1);
        let pisot = is_pisot(field.poly())?;
        Ok(BetaSystem { field: Arc::new(field), m, beta, rho, right_end, pisot, label: label.into() })
    }

    /// Same base with a different digit count.
    pub fn with_digits(&self, m: u32) -> Result<BetaSystem> {
        if m < 2 {
            return Err(Error::BadInput("digit count m must be at least 2".into()));
        }
        let f = &self.field;
        let gap = &f.from_int(m as i64) - &self.beta;
        if f.sign(&gap) == Ordering::Less {
            return Err(Error::DigitCountTooSmall { m, beta: f.beta_f64() });
        }
        let bm1 = self.beta.add_int(-1);
        let right_end = f.inv(&bm1).expect("beta > 1").scale_int(m as i64 - 1);
        Ok(BetaSystem {
            field: Arc::clone(&self.field),
            m,
            beta: self.beta.clone(),
            rho: self.rho.clone(),
            right_end,
            pisot: self.pisot,
            label: self.label.clone(),
        })
    }

    pub fn field(&self) -> &NumberField {
        &self.field
    }

    pub fn m(&self) -> u32 {
        self.m
    }

    pub fn beta(&self) -> &FieldElement {
        &self.beta
    }

    /// ρ = 1/β.
    pub fn rho(&self) -> &FieldElement {
        &self.rho
    }

    /// Right endpoint (m−1)/(β−1) of I_β.
    pub fn right_end(&self) -> &FieldElement {
        &self.right_end
    }

    pub fn is_pisot(&self) -> bool {
        self.pisot
    }

    pub fn label(&self) -> &str {
        &self.label
    }

    pub fn beta_f64(&self) -> f64 {
        self.field.beta_f64()
    }

    /// β as an integer, when it is one.
    pub fn integer_beta(&self) -> Option<u64> {
        self.beta.as_rational().filter(|r| r.is_integer()).and_then(|r| r.to_integer().to_u64())
    }

    pub fn sign(&self, x: &FieldElement) -> Ordering {
        self.field.sign(x)
    }

    pub fn cmp(&self, a: &FieldElement, b: &FieldElement) -> Ordering {
        self.field.cmp(a, b)
    }

    /// Embeds a rational number into ℚ(β).
    pub fn rational(&self, r: BigRational) -> FieldElement {
        self.field.from_rational(r)
    }

    /// `true` iff `0 ≤ x ≤ (m−1)/(β−1)`.
    pub fn in_interval(&self, x: &FieldElement) -> bool {
        self.sign(x) != Ordering::Less && self.cmp(x, &self.right_end) != Ordering::Greater
    }

    /// Left endpoint (i−1)(1−ρ)/(m−1) of S_i([0,1]) for the 0-based digit `i`.
    pub fn ifs_offset(&self, digit: u32) -> FieldElement {
        let one_minus_rho = self.rho.scale_int(-1).add_int(1);
        one_minus_rho.scale(&BigRational::new(BigInt::from(digit), BigInt::from(self.m - 1)))
    }
}

/// Parses a rational literal such as `1.5`, `-2`, or `3/2`.
pub fn parse_rational(s: &str) -> Result<BigRational> {
    let s = s.trim();
    let bad = || Error::BadInput(format!("not a rational literal: {s:?}"));
    if let Some((n, d)) = s.split_once('/') {
        let n: BigInt = n.trim().parse().map_err(|_| bad())?;
        let d: BigInt = d.trim().parse().map_err(|_| bad())?;
        if d.is_zero() {
            return Err(bad());
        }
        return Ok(BigRational::new(n, d));
    }
    let (neg, body) = match s.strip_prefix('-') {
        Some(rest) => (true, rest),
        None => (false, s.strip_prefix('+').unwrap_or(s)),
    };
    let (int_part, frac_part) = body.split_once('.').unwrap_or((body, ""));
    if int_part.is_empty() && frac_part.is_empty() {
        return Err(bad());
    }
    if !int_part.chars().chain(frac_part.chars()).all(|c| c.is_ascii_digit()) {
        return Err(bad());
    }
    let digits = format!("{int_part}{frac_part}");
    let num: BigInt = if digits.is_empty() { BigInt::zero() } else { digits.parse().map_err(|_| bad())? };
    let den = num_traits::pow(BigInt::from(10), frac_part.len());
    let r = BigRational::new(num, den);
    Ok(if neg { -r } else { r })
}

/// Renders a rational as `"numerator/denominator"`.
pub fn format_rational(r: &BigRational) -> String {
    format!("{}/{}", r.numer(), r.denom())
}

fn multinacci_poly(n: u32) -> MinimalPolynomial {
    let mut c = vec![-1i64; n as usize];
    c.push(1);
    MinimalPolynomial::from_i64(&c).expect("multinacci polynomials are irreducible")
}

/// The n-th multinacci number, root of xⁿ = xⁿ⁻¹ + … + x + 1, with m = 2.
pub fn multinacci(n: u32) -> Result<BetaSystem> {
    if !(2..=10).contains(&n) {
        return Err(Error::BadInput(format!("multinacci index must lie in 2..=10, got {n}")));
    }
    let field = NumberField::new(multinacci_poly(n))?;
    BetaSystem::new(field, 2, format!("multinacci:{n}"))
}

/// Parses a base description:
/// `golden`, `multinacci:n`, `int:k`, `poly:c0,c1,…,cd`, or a rational literal.
pub fn parse_beta(spec: &str, m: u32) -> Result<BetaSystem> {
    let spec = spec.trim();
    let poly = if spec == "golden" {
        multinacci_poly(2)
    } else if let Some(n) = spec.strip_prefix("multinacci:") {
        let n: u32 = n.parse().map_err(|_| Error::BadInput(format!("bad multinacci index {n:?}")))?;
        if !(2..=10).contains(&n) {
            return Err(Error::BadInput(format!("multinacci index must lie in 2..=10, got {n}")));
        }
        multinacci_poly(n)
    } else if let Some(k) = spec.strip_prefix("int:") {
        let k: i64 = k.parse().map_err(|_| Error::BadInput(format!("bad integer base {k:?}")))?;
        if k < 2 {
            return Err(Error::BadInput(format!("integer base must be at least 2, got {k}")));
        }
        MinimalPolynomial::from_i64(&[-k, 1])?
    } else if let Some(c) = spec.strip_prefix("poly:") {
        let coeffs = c
            .split(',')
            .map(|t| t.trim().parse::<BigInt>())
            .collect::<std::result::Result<Vec<_>, _>>()
            .map_err(|_| Error::BadInput(format!("bad coefficient list {c:?}")))?;
        MinimalPolynomial::new(coeffs)?
    } else {
        let r = parse_rational(spec)?;
        MinimalPolynomial::new(vec![-r.numer().clone(), r.denom().clone()])?
    };
    let field = NumberField::new(poly)?;
    BetaSystem::new(field, m, spec)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn integer_base() {
        let sys = parse_beta("int:2", 2).unwrap();
        assert_eq!(sys.rho().as_rational(), Some(&BigRational::new(1.into(), 2.into())));
        assert!(sys.is_pisot());
        assert_eq!(sys.integer_beta(), Some(2));
    }

    #[test]
    fn golden_values() {
        let sys = parse_beta("golden", 2).unwrap();
        assert!((sys.beta_f64() - 1.618034).abs() < 5e-7);
        assert!(sys.is_pisot());
        let f = sys.field();
        let b = sys.beta();
        assert_eq!(f.sign(&f.zero()), Ordering::Equal);
        assert_eq!(f.sign(&b.add_int(-1)), Ordering::Greater);
        let rel = &(&f.mul(b, b) - b) - &f.one();
        assert!(rel.is_zero());
        assert_eq!(f.sign(&rel), Ordering::Equal);
        assert!(f.mul(sys.rho(), b) == f.one());
    }

    #[test]
    fn multinacci_values() {
        for (n, v) in [(2, 1.618034), (3, 1.839287), (5, 1.965948), (10, 1.999019)] {
            let sys = multinacci(n).unwrap();
            assert!((sys.beta_f64() - v).abs() < 5e-7, "n={n}");
            assert!(sys.is_pisot());
            let f = sys.field();
            let mut rel = f.beta_pow(n as i64);
            for k in 0..n {
                rel = &rel - &f.beta_pow(k as i64);
            }
            assert!(rel.is_zero());
        }
        assert!(multinacci(1).is_err());
        assert!(multinacci(11).is_err());
    }

    #[test]
    fn pisot_classification() {
        let p = |c: &[i64]| MinimalPolynomial::from_i64(c).unwrap();
        assert!(is_pisot(&p(&[-1, -1, 1])).unwrap());
        assert!(!is_pisot(&p(&[-3, 0, 1])).unwrap());
        assert!(is_pisot(&p(&[-1, -1, -1, 1])).unwrap());
        // Salem polynomial x^4 - x^3 - x^2 - x + 1: conjugates on the unit circle.
        assert!(matches!(is_pisot(&p(&[1, -1, -1, -1, 1])), Err(Error::Undecidable(_))));
    }

    #[test]
    fn parse_errors() {
        assert!(matches!(parse_beta("poly:-1,0,0,0,1", 2), Err(Error::Reducible(_))));
        assert!(matches!(parse_beta("poly:1,1,1", 2), Err(Error::NoRootAboveOne)));
        assert!(matches!(parse_beta("0.5", 2), Err(Error::NoRootAboveOne)));
        assert!(matches!(parse_beta("2.5", 2), Err(Error::DigitCountTooSmall { .. })));
        let mut big = vec!["-1"; 11];
        big.push("1");
        assert!(matches!(parse_beta(&format!("poly:{}", big.join(",")), 2), Err(Error::DegreeTooLarge(11))));
        assert!(parse_beta("int:1", 2).is_err());
        assert!(parse_beta("banana", 2).is_err());
    }

    #[test]
    fn rational_base() {
        let sys = parse_beta("1.5", 2).unwrap();
        assert!(!sys.is_pisot());
        assert_eq!(sys.right_end().as_rational(), Some(&BigRational::from_integer(2.into())));
        let sqrt3 = parse_beta("poly:-3,0,1", 2).unwrap();
        assert!(!sqrt3.is_pisot());
    }

    #[test]
    fn inverse_roundtrip() {
        let sys = multinacci(4).unwrap();
        let f = sys.field();
        let x = f.from_coeffs([3, -2, 5, 7].iter().map(|&k| BigRational::new(k.into(), 3.into())).collect());
        let y = f.inv(&x).unwrap();
        assert_eq!(f.mul(&x, &y), f.one());
    }

    #[test]
    fn exact_sign_path_for_tiny_values() {
        // β^-40 is positive but far below the float filter's resolution
        // relative to its coefficient magnitudes.
        let sys = parse_beta("golden", 2).unwrap();
        let f = sys.field();
        let tiny = f.beta_pow(-40);
        assert_eq!(f.sign(&tiny), Ordering::Greater);
        assert_eq!(f.sign(&-&tiny), Ordering::Less);
    }
}
