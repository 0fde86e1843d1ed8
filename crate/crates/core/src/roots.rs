//! Complex root approximation with certified inclusion disks.
//!
//! Roots are approximated by Aberth–Ehrlich iteration in `f64`. The residual
//! `p(z_i)` is then evaluated exactly over ℚ(i) at the floating approximation,
//! and the disk of radius `d·|p(z_i)| / |a_d·∏_{j≠i}(z_i − z_j)|` around each
//! `z_i` is reported. When these disks are pairwise disjoint each contains
//! exactly one root.

use num_bigint::BigInt;
use num_complex::Complex64;
use num_rational::BigRational;
use num_traits::{ToPrimitive, Zero};

#[derive(Clone, Debug)]
pub struct RootDisk {
    pub center: Complex64,
    pub radius: f64,
}

fn horner(coeffs: &[f64], z: Complex64) -> (Complex64, Complex64) {
    let mut p = Complex64::zero();
    let mut dp = Complex64::zero();
    for &c in coeffs.iter().rev() {
        dp = dp * z + p;
        p = p * z + c;
    }
    (p, dp)
}

fn exact_modulus(coeffs: &[BigInt], z: Complex64) -> f64 {
    let re = BigRational::from_float(z.re).unwrap_or_default();
    let im = BigRational::from_float(z.im).unwrap_or_default();
    let mut pr = BigRational::zero();
    let mut pi = BigRational::zero();
    for c in coeffs.iter().rev() {
        let nr = &pr * &re - &pi * &im + BigRational::from_integer(c.clone());
        let ni = &pr * &im + &pi * &re;
        pr = nr;
        pi = ni;
    }
    let a = pr.to_f64().unwrap_or(f64::INFINITY);
    let b = pi.to_f64().unwrap_or(f64::INFINITY);
    a.hypot(b)
}

/// All complex roots of the integer polynomial `coeffs` (constant first),
/// each with an inclusion radius. Returns `None` if the iteration fails to
/// separate the roots.
pub fn isolate_complex_roots(coeffs: &[BigInt]) -> Option<Vec<RootDisk>> {
    let fc: Vec<f64> = coeffs.iter().map(|c| c.to_f64().unwrap_or(f64::NAN)).collect();
    let d = fc.len() - 1;
    if d == 0 || fc.iter().any(|c| !c.is_finite()) {
        return None;
    }
    let lead = fc[d];
    let bound = 1.0 + fc[..d].iter().map(|c| (c / lead).abs()).fold(0.0, f64::max);
    let mut z: Vec<Complex64> = (0..d)
        .map(|k| {
            let theta = 2.0 * std::f64::consts::PI * (k as f64 + 0.25) / d as f64 + 0.4;
            Complex64::from_polar(0.5 * bound, theta)
        })
        .collect();
    for _ in 0..500 {
        let mut moved = 0.0f64;
        for i in 0..d {
            let (p, dp) = horner(&fc, z[i]);
            if p.norm() == 0.0 {
                continue;
            }
            let ratio = p / dp;
            let sum: Complex64 = (0..d).filter(|&j| j != i).map(|j| Complex64::new(1.0, 0.0) / (z[i] - z[j])).sum();
            let step = ratio / (Complex64::new(1.0, 0.0) - ratio * sum);
            if step.is_finite() {
                z[i] -= step;
                moved = moved.max(step.norm() / z[i].norm().max(1.0));
            }
        }
        if moved < 1e-15 {
            break;
        }
    }
    let disks: Vec<RootDisk> = (0..d)
        .map(|i| {
            let prod: f64 = (0..d).filter(|&j| j != i).map(|j| (z[i] - z[j]).norm()).product();
            let residual = exact_modulus(coeffs, z[i]);
            let radius = 1.01 * d as f64 * residual / (lead.abs() * prod) + 1e-300;
            RootDisk { center: z[i], radius }
        })
        .collect();
    for i in 0..d {
        if !disks[i].radius.is_finite() {
            return None;
        }
        for j in i + 1..d {
            if (disks[i].center - disks[j].center).norm() <= disks[i].radius + disks[j].radius {
                return None;
            }
        }
    }
    Some(disks)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn golden_roots() {
        let c: Vec<BigInt> = [-1, -1, 1].iter().map(|&x| BigInt::from(x)).collect();
        let disks = isolate_complex_roots(&c).unwrap();
        let mut re: Vec<f64> = disks.iter().map(|d| d.center.re).collect();
        re.sort_by(f64::total_cmp);
        assert!((re[0] + 0.618_033_988_749_895).abs() < 1e-12);
        assert!((re[1] - 1.618_033_988_749_895).abs() < 1e-12);
        assert!(disks.iter().all(|d| d.radius < 1e-10));
    }

    #[test]
    fn complex_pair() {
        // x^2 + 1
        let c: Vec<BigInt> = [1, 0, 1].iter().map(|&x| BigInt::from(x)).collect();
        let disks = isolate_complex_roots(&c).unwrap();
        for d in disks {
            assert!((d.center.norm() - 1.0).abs() < 1e-12);
        }
    }
}
