//! Gaussian elimination over an exact field.

use super::field::Field;

/// Reduced row echelon form in place; returns the pivot columns.
pub fn row_reduce<F: Field>(m: &mut [Vec<F>]) -> Vec<usize> {
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
        let inv = m[r][c].checked_inv().expect("pivot is nonzero");
        for v in m[r].iter_mut() {
            *v *= inv;
        }
        for i in 0..rows {
            if i != r && !m[i][c].is_zero() {
                let f = m[i][c];
                for j in 0..cols {
                    let t = m[r][j];
                    m[i][j] -= f * t;
                }
            }
        }
        pivots.push(c);
        r += 1;
    }
    pivots
}

pub fn rank<F: Field>(m: &[Vec<F>]) -> usize {
    let mut work = m.to_vec();
    row_reduce(&mut work).len()
}

/// Basis of `{v : m v = 0}`.
pub fn null_space<F: Field>(m: &[Vec<F>], cols: usize) -> Vec<Vec<F>> {
    let mut work = m.to_vec();
    let pivots = row_reduce(&mut work);
    let free: Vec<usize> = (0..cols).filter(|c| !pivots.contains(c)).collect();
    free.iter()
        .map(|&f| {
            let mut v = vec![F::zero(); cols];
            v[f] = F::one();
            for (r, &pc) in pivots.iter().enumerate() {
                v[pc] = -work[r][f];
            }
            v
        })
        .collect()
}

/// Determinant by elimination (the oracle for alternating-form evaluation).
pub fn determinant<F: Field>(m: &[Vec<F>]) -> F {
    let n = m.len();
    let mut a = m.to_vec();
    let mut det = F::one();
    for c in 0..n {
        let Some(p) = (c..n).find(|&i| !a[i][c].is_zero()) else {
            return F::zero();
        };
        if p != c {
            a.swap(p, c);
            det = -det;
        }
        det *= a[c][c];
        let inv = a[c][c].checked_inv().expect("pivot is nonzero");
        for i in c + 1..n {
            let f = a[i][c] * inv;
            if !f.is_zero() {
                for j in c..n {
                    let t = a[c][j];
                    a[i][j] -= f * t;
                }
            }
        }
    }
    det
}

pub fn mat_vec<F: Field>(m: &[Vec<F>], v: &[F]) -> Vec<F> {
    m.iter()
        .map(|row| row.iter().zip(v).fold(F::zero(), |s, (&a, &b)| s + a * b))
        .collect()
}
