//! Small dense linear algebra over `ExactComplex` and `Complex64`.

use num_complex::Complex64;

use crate::error::{Result, RetractError};
use crate::exact::ExactComplex;

pub type ExactMatrix = Vec<Vec<ExactComplex>>;

pub fn identity(n: usize) -> ExactMatrix {
    (0..n)
        .map(|i| {
            (0..n)
                .map(|j| if i == j { ExactComplex::one() } else { ExactComplex::zero() })
                .collect()
        })
        .collect()
}

pub fn zeros(rows: usize, cols: usize) -> ExactMatrix {
    vec![vec![ExactComplex::zero(); cols]; rows]
}

pub fn mat_mul(a: &ExactMatrix, b: &ExactMatrix) -> ExactMatrix {
    let inner = b.len();
    let cols = b.first().map_or(0, Vec::len);
    a.iter()
        .map(|row| {
            assert_eq!(row.len(), inner, "inner dimensions");
            (0..cols)
                .map(|j| {
                    let mut acc = ExactComplex::zero();
                    for k in 0..inner {
                        if !row[k].is_zero() && !b[k][j].is_zero() {
                            acc += &(&row[k] * &b[k][j]);
                        }
                    }
                    acc
                })
                .collect()
        })
        .collect()
}

pub fn mat_vec(a: &ExactMatrix, v: &[ExactComplex]) -> Vec<ExactComplex> {
    a.iter()
        .map(|row| {
            row.iter()
                .zip(v)
                .fold(ExactComplex::zero(), |acc, (x, y)| &acc + &(x * y))
        })
        .collect()
}

pub fn transpose(a: &ExactMatrix) -> ExactMatrix {
    let cols = a.first().map_or(0, Vec::len);
    (0..cols).map(|j| a.iter().map(|r| r[j].clone()).collect()).collect()
}

pub fn sub(a: &ExactMatrix, b: &ExactMatrix) -> ExactMatrix {
    a.iter()
        .zip(b)
        .map(|(r, s)| r.iter().zip(s).map(|(x, y)| x - y).collect())
        .collect()
}

pub fn is_idempotent(a: &ExactMatrix) -> bool {
    &mat_mul(a, a) == a
}

/// Reduced row echelon form and pivot columns.
pub fn rref(a: &ExactMatrix) -> (ExactMatrix, Vec<usize>) {
    let mut m = a.clone();
    let rows = m.len();
    let cols = m.first().map_or(0, Vec::len);
    let mut pivots = Vec::new();
    let mut r = 0;
    for c in 0..cols {
        if r == rows {
            break;
        }
        let Some(p) = (r..rows).find(|&i| !m[i][c].is_zero()) else {
            continue;
        };
        m.swap(r, p);
        let inv = m[r][c].inv().expect("nonzero pivot");
        for x in m[r].iter_mut() {
            *x = &*x * &inv;
        }
        for i in 0..rows {
            if i != r && !m[i][c].is_zero() {
                let f = m[i][c].clone();
                let pivot_row = m[r].clone();
                for (x, y) in m[i].iter_mut().zip(&pivot_row) {
                    *x -= &(&f * y);
                }
            }
        }
        pivots.push(c);
        r += 1;
    }
    m.truncate(r);
    (m, pivots)
}

pub fn rank(a: &ExactMatrix) -> usize {
    rref(a).1.len()
}

pub fn inverse(a: &ExactMatrix) -> Result<ExactMatrix> {
    let n = a.len();
    if a.iter().any(|r| r.len() != n) {
        return Err(RetractError::Invalid("inverse of a non-square matrix".into()));
    }
    let aug: ExactMatrix = a
        .iter()
        .zip(identity(n))
        .map(|(r, e)| r.iter().cloned().chain(e).collect())
        .collect();
    let (m, piv) = rref(&aug);
    if piv.len() < n || piv[n - 1] >= n {
        return Err(RetractError::Invalid("singular matrix".into()));
    }
    Ok(m.into_iter().map(|r| r[n..].to_vec()).collect())
}

/// Basis of the null space `{x : A x = 0}` in `cols` unknowns.
pub fn null_space(a: &ExactMatrix, cols: usize) -> Vec<Vec<ExactComplex>> {
    let (m, piv) = rref(a);
    let free: Vec<usize> = (0..cols).filter(|c| !piv.contains(c)).collect();
    free.iter()
        .map(|&f| {
            let mut v = vec![ExactComplex::zero(); cols];
            v[f] = ExactComplex::one();
            for (row, &pc) in m.iter().zip(&piv) {
                v[pc] = -&row[f];
            }
            v
        })
        .collect()
}

pub fn to_float(a: &ExactMatrix) -> Vec<Vec<Complex64>> {
    a.iter().map(|r| r.iter().map(ExactComplex::to_c64).collect()).collect()
}

pub fn cmat_vec(a: &[Vec<Complex64>], v: &[Complex64]) -> Vec<Complex64> {
    a.iter()
        .map(|r| r.iter().zip(v).map(|(x, y)| x * y).sum())
        .collect()
}

/// Smallest singular value of a 2×n complex matrix.
pub fn smallest_singular_2xn(rows: [&[Complex64]; 2]) -> f64 {
    let dot = |a: &[Complex64], b: &[Complex64]| -> Complex64 {
        a.iter().zip(b).map(|(x, y)| x * y.conj()).sum()
    };
    let g00 = dot(rows[0], rows[0]).re;
    let g11 = dot(rows[1], rows[1]).re;
    let g01 = dot(rows[0], rows[1]);
    let tr = g00 + g11;
    let det = g00 * g11 - g01.norm_sqr();
    let disc = ((tr * tr / 4.0) - det).max(0.0).sqrt();
    let lam_max = tr / 2.0 + disc;
    // det / lam_max avoids cancellation in tr/2 − disc
    let lam_min = if lam_max > 0.0 { (det / lam_max).max(0.0) } else { 0.0 };
    lam_min.sqrt()
}

#[cfg(test)]
mod tests {
    use super::*;

    fn m(rows: &[&[i64]]) -> ExactMatrix {
        rows.iter()
            .map(|r| r.iter().map(|&x| ExactComplex::from_int(x)).collect())
            .collect()
    }

    #[test]
    fn inverse_round_trip() {
        let a = m(&[&[2, 1], &[1, 1]]);
        let inv = inverse(&a).unwrap();
        assert_eq!(mat_mul(&a, &inv), identity(2));
        assert!(inverse(&m(&[&[1, 2], &[2, 4]])).is_err());
    }

    #[test]
    fn rref_and_kernel() {
        let a = m(&[&[2, 1, -1]]);
        let ker = null_space(&a, 3);
        assert_eq!(ker.len(), 2);
        for v in &ker {
            assert!(mat_vec(&a, v)[0].is_zero());
        }
        let (r, piv) = rref(&m(&[&[1, 2, 3], &[2, 4, 6], &[0, 1, 1]]));
        assert_eq!(piv, vec![0, 1]);
        assert_eq!(r.len(), 2);
    }

    #[test]
    fn singular_value_of_parallel_rows() {
        let a = [Complex64::new(1.0, 0.0), Complex64::new(2.0, 0.0)];
        let b = [Complex64::new(2.0, 0.0), Complex64::new(4.0, 0.0)];
        assert!(smallest_singular_2xn([&a, &b]) < 1e-7);
        let c = [Complex64::new(0.0, 0.0), Complex64::new(1.0, 0.0)];
        let e = [Complex64::new(1.0, 0.0), Complex64::new(0.0, 0.0)];
        assert!((smallest_singular_2xn([&c, &e]) - 1.0).abs() < 1e-12);
    }
}
