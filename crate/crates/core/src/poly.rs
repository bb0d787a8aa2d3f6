//! Integer characteristic polynomials and the root tools built on them.
//!
//! Coefficients are stored leading-first: `[1, -1, -1, -1]` is `x^3 - x^2 - x - 1`.

use num_bigint::BigInt;
use num_complex::Complex64;
use num_rational::BigRational;
use num_traits::{One, Signed, ToPrimitive, Zero};

use crate::error::{Error, Result};
use crate::matrix::IntMatrix;

/// Largest dimension accepted by [`char_poly`].
pub const CHAR_POLY_DIM_CAP: usize = 64;

/// `det(xI - M)` by the Faddeev–LeVerrier recurrence, in exact integers.
///
/// With `N_0 = 0` and `c_m = 1`, for `j = 1..=m`:
/// `N_j = M N_{j-1} + c_{m-j+1} I` and `c_{m-j} = -tr(M N_j) / j`,
/// where every division is exact.
pub fn char_poly(m: &IntMatrix) -> Result<Vec<BigInt>> {
    let n = m.dim();
    if n > CHAR_POLY_DIM_CAP {
        return Err(Error::DimensionCap {
            dim: n,
            cap: CHAR_POLY_DIM_CAP,
        });
    }
    let a: Vec<Vec<BigInt>> = (0..n)
        .map(|i| (0..n).map(|j| BigInt::from(m.get(i, j))).collect())
        .collect();
    let mut coeffs = vec![BigInt::one()];
    let mut acc = vec![vec![BigInt::zero(); n]; n];
    for j in 1..=n {
        // acc <- M acc + c I (c is the coefficient found last round)
        let c = coeffs.last().unwrap().clone();
        let mut next = mat_mul(&a, &acc);
        for (i, row) in next.iter_mut().enumerate() {
            row[i] += &c;
        }
        acc = next;
        let prod = mat_mul(&a, &acc);
        let trace: BigInt = (0..n).map(|i| &prod[i][i]).sum();
        let coeff = -(trace / BigInt::from(j));
        coeffs.push(coeff);
    }
    Ok(coeffs)
}

fn mat_mul(a: &[Vec<BigInt>], b: &[Vec<BigInt>]) -> Vec<Vec<BigInt>> {
    let n = a.len();
    let mut out = vec![vec![BigInt::zero(); n]; n];
    for i in 0..n {
        for l in 0..n {
            if a[i][l].is_zero() {
                continue;
            }
            for j in 0..n {
                if !b[l][j].is_zero() {
                    out[i][j] += &a[i][l] * &b[l][j];
                }
            }
        }
    }
    out
}

/// Human-readable rendering, e.g. `x^3 - x^2 - x - 1`.
pub fn format_poly(coeffs: &[BigInt]) -> String {
    let deg = coeffs.len().saturating_sub(1);
    let mut out = String::new();
    for (idx, c) in coeffs.iter().enumerate() {
        if c.is_zero() {
            continue;
        }
        let power = deg - idx;
        let sign = if c.is_negative() { "-" } else { "+" };
        let mag = c.abs();
        if out.is_empty() {
            if c.is_negative() {
                out.push('-');
            }
        } else {
            out.push_str(&format!(" {sign} "));
        }
        let show_mag = !mag.is_one() || power == 0;
        if show_mag {
            out.push_str(&mag.to_string());
        }
        match power {
            0 => {}
            1 => out.push('x'),
            p => out.push_str(&format!("x^{p}")),
        }
    }
    if out.is_empty() {
        out.push('0');
    }
    out
}

/// Square-free part `p / gcd(p, p')`, made monic and converted to floats.
pub fn square_free_part(coeffs: &[BigInt]) -> Vec<f64> {
    let p: Vec<BigRational> = coeffs
        .iter()
        .map(|c| BigRational::from_integer(c.clone()))
        .collect();
    let p = trim(p);
    if p.len() <= 2 {
        return to_monic_f64(&p);
    }
    let deg = p.len() - 1;
    let dp: Vec<BigRational> = p[..deg]
        .iter()
        .enumerate()
        .map(|(i, c)| c * BigRational::from_integer(BigInt::from(deg - i)))
        .collect();
    let g = poly_gcd(p.clone(), dp);
    let (q, _) = poly_divmod(&p, &g);
    to_monic_f64(&q)
}

fn trim(mut p: Vec<BigRational>) -> Vec<BigRational> {
    let lead = p.iter().position(|c| !c.is_zero()).unwrap_or(p.len());
    p.drain(..lead);
    p
}

fn poly_divmod(a: &[BigRational], b: &[BigRational]) -> (Vec<BigRational>, Vec<BigRational>) {
    let mut rem = a.to_vec();
    if b.len() > rem.len() {
        return (vec![BigRational::zero()], trim(rem));
    }
    let qlen = rem.len() - b.len() + 1;
    let mut quot = vec![BigRational::zero(); qlen];
    for i in 0..qlen {
        let factor = &rem[i] / &b[0];
        if !factor.is_zero() {
            for (j, bc) in b.iter().enumerate() {
                rem[i + j] -= &factor * bc;
            }
        }
        quot[i] = factor;
    }
    (quot, trim(rem[qlen..].to_vec()))
}

fn poly_gcd(mut a: Vec<BigRational>, mut b: Vec<BigRational>) -> Vec<BigRational> {
    while !b.is_empty() {
        let (_, r) = poly_divmod(&a, &b);
        a = b;
        b = r;
    }
    let lead = a[0].clone();
    a.iter().map(|c| c / &lead).collect()
}

fn to_monic_f64(p: &[BigRational]) -> Vec<f64> {
    if p.is_empty() {
        return vec![0.0];
    }
    let lead = p[0].clone();
    p.iter()
        .map(|c| (c / &lead).to_f64().unwrap_or(f64::NAN))
        .collect()
}

fn horner(p: &[f64], x: f64) -> f64 {
    p.iter().fold(0.0, |acc, &c| acc * x + c)
}

/// Largest real root of `coeffs` in `[lo, hi]` by a downward sign-change scan
/// followed by bisection, applied to the square-free part so that roots of
/// even multiplicity still change sign.
pub fn largest_real_root(coeffs: &[BigInt], lo: f64, hi: f64) -> Option<f64> {
    let p = square_free_part(coeffs);
    if p.len() == 1 {
        return None;
    }
    const STEPS: usize = 1 << 14;
    let h = (hi - lo) / STEPS as f64;
    let mut upper = hi;
    let mut f_upper = horner(&p, upper);
    if f_upper == 0.0 {
        return Some(upper);
    }
    for step in 1..=STEPS {
        let x = hi - h * step as f64;
        let fx = horner(&p, x);
        if fx == 0.0 {
            return Some(x);
        }
        if fx.signum() != f_upper.signum() {
            let (mut a, mut b) = (x, upper);
            let fa = fx;
            for _ in 0..200 {
                let mid = 0.5 * (a + b);
                if mid <= a || mid >= b {
                    break;
                }
                let fm = horner(&p, mid);
                if fm == 0.0 {
                    return Some(mid);
                }
                if fm.signum() == fa.signum() {
                    a = mid;
                } else {
                    b = mid;
                }
            }
            return Some(0.5 * (a + b));
        }
        upper = x;
        f_upper = fx;
    }
    None
}

/// All complex roots of a monic float polynomial (Aberth–Ehrlich iteration).
pub fn complex_roots(p: &[f64]) -> Vec<Complex64> {
    let deg = p.len().saturating_sub(1);
    if deg == 0 {
        return Vec::new();
    }
    if deg == 1 {
        return vec![Complex64::new(-p[1] / p[0], 0.0)];
    }
    let lead = p[0];
    let p: Vec<f64> = p.iter().map(|c| c / lead).collect();
    // Cauchy bound on root moduli.
    let radius = 1.0 + p[1..].iter().map(|c| c.abs()).fold(0.0, f64::max);
    let mut z: Vec<Complex64> = (0..deg)
        .map(|i| {
            let angle = 2.0 * std::f64::consts::PI * (i as f64 + 0.25) / deg as f64 + 0.4;
            Complex64::from_polar(0.5 * radius, angle)
        })
        .collect();
    for _ in 0..2000 {
        let mut max_step: f64 = 0.0;
        for i in 0..deg {
            let (val, der) = eval_with_derivative(&p, z[i]);
            if val == Complex64::new(0.0, 0.0) {
                continue;
            }
            let ratio = val / der;
            let repulsion: Complex64 = (0..deg)
                .filter(|&j| j != i)
                .map(|j| Complex64::new(1.0, 0.0) / (z[i] - z[j]))
                .sum();
            let step = ratio / (Complex64::new(1.0, 0.0) - ratio * repulsion);
            if step.is_finite() {
                z[i] -= step;
                max_step = max_step.max(step.norm() / z[i].norm().max(1.0));
            }
        }
        if max_step < 1e-15 {
            break;
        }
    }
    z
}

fn eval_with_derivative(p: &[f64], z: Complex64) -> (Complex64, Complex64) {
    let mut val = Complex64::new(0.0, 0.0);
    let mut der = Complex64::new(0.0, 0.0);
    for &c in p {
        der = der * z + val;
        val = val * z + c;
    }
    (val, der)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn ints(v: &[i64]) -> Vec<BigInt> {
        v.iter().map(|&x| BigInt::from(x)).collect()
    }

    #[test]
    fn char_poly_examples() {
        let m = IntMatrix::from_rows(vec![vec![1, 1, 0], vec![0, 0, 1], vec![2, 1, 0]]).unwrap();
        assert_eq!(char_poly(&m).unwrap(), ints(&[1, -1, -1, -1]));
        let id = IntMatrix::identity(2);
        assert_eq!(char_poly(&id).unwrap(), ints(&[1, -2, 1]));
        let swap = IntMatrix::from_rows(vec![vec![0, 1], vec![1, 0]]).unwrap();
        assert_eq!(char_poly(&swap).unwrap(), ints(&[1, 0, -1]));
    }

    #[test]
    fn char_poly_dimension_cap() {
        let big = IntMatrix::identity(CHAR_POLY_DIM_CAP + 1);
        assert!(matches!(char_poly(&big), Err(Error::DimensionCap { .. })));
    }

    #[test]
    fn formats_polynomials() {
        assert_eq!(format_poly(&ints(&[1, -1, -1, -1])), "x^3 - x^2 - x - 1");
        assert_eq!(format_poly(&ints(&[1, 0, -1])), "x^2 - 1");
        assert_eq!(format_poly(&ints(&[1, -2])), "x - 2");
        assert_eq!(format_poly(&ints(&[2, 0, 0])), "2x^2");
    }

    #[test]
    fn square_free_drops_multiplicity() {
        // (x - 2)^2 (x + 1) = x^3 - 3x^2 + 4
        let sf = square_free_part(&ints(&[1, -3, 0, 4]));
        assert_eq!(sf.len(), 3);
        assert!((sf[1] + 1.0).abs() < 1e-12 && (sf[2] + 2.0).abs() < 1e-12);
    }

    #[test]
    fn largest_root_with_even_multiplicity() {
        let r = largest_real_root(&ints(&[1, -4, 4]), 0.0, 5.0).unwrap();
        assert!((r - 2.0).abs() < 1e-12);
        let tribonacci = largest_real_root(&ints(&[1, -1, -1, -1]), 0.0, 4.0).unwrap();
        assert!((tribonacci - 1.839_286_755_214_161).abs() < 1e-12);
        let nilpotent = largest_real_root(&ints(&[1, 0, 0]), 0.0, 1.0).unwrap();
        assert_eq!(nilpotent, 0.0);
    }

    #[test]
    fn complex_roots_of_tribonacci() {
        let roots = complex_roots(&[1.0, -1.0, -1.0, -1.0]);
        let mut moduli: Vec<f64> = roots.iter().map(|z| z.norm()).collect();
        moduli.sort_by(f64::total_cmp);
        assert!((moduli[2] - 1.839_286_755_214_161).abs() < 1e-12);
        assert!((moduli[0] - 0.737_352_705).abs() < 1e-8);
        assert!((moduli[1] - moduli[0]).abs() < 1e-12);
    }
}
