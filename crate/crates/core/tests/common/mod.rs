#![allow(dead_code)]

use njalg::exactlin::Rational;
use num_traits::Zero;

pub type Dense = Vec<Vec<Rational>>;

pub fn dense_rank(m: &Dense) -> usize {
    let mut a = m.clone();
    let rows = a.len();
    let cols = a.first().map_or(0, Vec::len);
    let mut r = 0;
    for c in 0..cols {
        let Some(p) = (r..rows).find(|&i| !a[i][c].is_zero()) else { continue };
        a.swap(r, p);
        for i in 0..rows {
            if i != r && !a[i][c].is_zero() {
                let f = &a[i][c] / &a[r][c];
                for j in 0..cols {
                    let t = &f * &a[r][j];
                    a[i][j] -= t;
                }
            }
        }
        r += 1;
    }
    r
}

pub fn zeros(rows: usize, cols: usize) -> Dense {
    vec![vec![Rational::zero(); cols]; rows]
}

pub fn dense_mul(a: &Dense, b: &Dense) -> Dense {
    let k = b.len();
    let cols = b.first().map_or(0, Vec::len);
    let mut out = zeros(a.len(), cols);
    for (i, row) in a.iter().enumerate() {
        for l in 0..k {
            if row[l].is_zero() {
                continue;
            }
            for j in 0..cols {
                let t = &row[l] * &b[l][j];
                out[i][j] += t;
            }
        }
    }
    out
}
