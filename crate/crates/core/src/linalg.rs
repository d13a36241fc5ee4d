//! Exact dense linear algebra over the rationals.

use crate::rational::{self, Rational};
use num_bigint::BigInt;
use num_integer::Integer;
use num_traits::{One, Signed, Zero};

pub type RatMatrix = Vec<Vec<Rational>>;

pub fn identity(n: usize) -> RatMatrix {
    (0..n)
        .map(|i| (0..n).map(|j| if i == j { rational::one() } else { Rational::zero() }).collect())
        .collect()
}

pub fn is_square(m: &RatMatrix) -> bool {
    m.iter().all(|row| row.len() == m.len())
}

/// `a * b`; panics on a shape mismatch.
pub fn mul(a: &RatMatrix, b: &RatMatrix) -> RatMatrix {
    let inner = b.len();
    let cols = b.first().map_or(0, Vec::len);
    a.iter()
        .map(|row| {
            assert_eq!(row.len(), inner, "shape mismatch");
            (0..cols)
                .map(|j| {
                    row.iter()
                        .zip(b)
                        .filter(|(x, _)| !x.is_zero())
                        .fold(Rational::zero(), |acc, (x, brow)| acc + x * &brow[j])
                })
                .collect()
        })
        .collect()
}

fn lcm_of_denominators(row: &[Rational]) -> BigInt {
    row.iter().fold(BigInt::one(), |acc, q| acc.lcm(q.denom()))
}

/// Determinant by fraction-free elimination. Rows are first scaled to integers.
pub fn det(m: &RatMatrix) -> Rational {
    assert!(is_square(m), "determinant of a non-square matrix");
    let n = m.len();
    if n == 0 {
        return rational::one();
    }
    let mut scale = BigInt::one();
    let mut a: Vec<Vec<BigInt>> = m
        .iter()
        .map(|row| {
            let l = lcm_of_denominators(row);
            let out = row.iter().map(|q| (q * Rational::from_integer(l.clone())).to_integer()).collect();
            scale *= &l;
            out
        })
        .collect();
    let d = bareiss(&mut a);
    Rational::new(d, scale)
}

/// In-place Bareiss; returns the determinant of the integer matrix.
fn bareiss(a: &mut [Vec<BigInt>]) -> BigInt {
    let n = a.len();
    let mut sign = BigInt::one();
    let mut prev = BigInt::one();
    for k in 0..n {
        if a[k][k].is_zero() {
            match (k + 1..n).find(|&i| !a[i][k].is_zero()) {
                Some(i) => {
                    a.swap(k, i);
                    sign = -sign;
                }
                None => return BigInt::zero(),
            }
        }
        for i in k + 1..n {
            for j in k + 1..n {
                let v = &a[i][j] * &a[k][k] - &a[i][k] * &a[k][j];
                a[i][j] = v / &prev;
            }
        }
        prev = a[k][k].clone();
    }
    sign * &a[n - 1][n - 1]
}

/// Reduced row echelon form; returns the pivot columns.
pub fn rref(m: &mut RatMatrix) -> Vec<usize> {
    let rows = m.len();
    let cols = m.first().map_or(0, Vec::len);
    let mut pivots = Vec::new();
    let mut r = 0;
    for c in 0..cols {
        if r == rows {
            break;
        }
        let Some(p) = (r..rows).find(|&i| !m[i][c].is_zero()) else { continue };
        m.swap(r, p);
        let inv = m[r][c].recip();
        for x in m[r].iter_mut() {
            *x *= &inv;
        }
        for i in 0..rows {
            if i != r && !m[i][c].is_zero() {
                let f = m[i][c].clone();
                for j in 0..cols {
                    let t = &f * &m[r][j];
                    m[i][j] -= t;
                }
            }
        }
        pivots.push(c);
        r += 1;
    }
    pivots
}

pub fn rank(m: &RatMatrix) -> usize {
    rref(&mut m.clone()).len()
}

/// Kernel basis vector attached to the first free column, or `None` if the kernel is trivial.
pub fn first_kernel_vector(m: &RatMatrix) -> Option<Vec<Rational>> {
    let cols = m.first().map_or(0, Vec::len);
    let mut r = m.clone();
    let pivots = rref(&mut r);
    let free = (0..cols).find(|c| !pivots.contains(c))?;
    let mut v = vec![Rational::zero(); cols];
    v[free] = rational::one();
    for (row, &p) in pivots.iter().enumerate() {
        v[p] = -r[row][free].clone();
    }
    Some(v)
}

/// Clears denominators, divides by the content and makes the first nonzero entry positive.
pub fn primitive_integer_vector(v: &[Rational]) -> Vec<BigInt> {
    let l = lcm_of_denominators(v);
    let ints: Vec<BigInt> = v.iter().map(|q| (q * Rational::from_integer(l.clone())).to_integer()).collect();
    let g = ints.iter().fold(BigInt::zero(), |acc, x| acc.gcd(x));
    if g.is_zero() {
        return ints;
    }
    let sign = match ints.iter().find(|x| !x.is_zero()) {
        Some(x) if x.is_negative() => -BigInt::one(),
        _ => BigInt::one(),
    };
    ints.into_iter().map(|x| x / &g * &sign).collect()
}

/// Coefficients (constant term first) of the polynomial through `(xs[i], ys[i])`.
pub fn interpolate(xs: &[Rational], ys: &[Rational]) -> Vec<Rational> {
    assert_eq!(xs.len(), ys.len());
    let n = xs.len();
    // Newton divided differences
    let mut dd = ys.to_vec();
    for level in 1..n {
        for i in (level..n).rev() {
            dd[i] = (&dd[i] - &dd[i - 1]) / (&xs[i] - &xs[i - level]);
        }
    }
    let mut coeffs = vec![Rational::zero(); n];
    for k in (0..n).rev() {
        // coeffs = coeffs * (x - xs[k]) + dd[k]
        for j in (1..n).rev() {
            let shifted = coeffs[j - 1].clone();
            coeffs[j] = shifted - &xs[k] * &coeffs[j];
        }
        coeffs[0] = &dd[k] - &xs[k] * &coeffs[0];
    }
    coeffs
}

pub fn eval_poly(coeffs: &[Rational], x: &Rational) -> Rational {
    coeffs.iter().rev().fold(Rational::zero(), |acc, c| acc * x + c)
}
