//! Exact linear algebra over `F_p`.

use crate::error::{Error, Result};
use crate::ff::{mul_mod, pow_mod};

/// Row echelon data of a matrix over `F_p`.
#[derive(Clone, Debug)]
pub struct Echelon {
    pub rows: Vec<Vec<u64>>,
    pub pivots: Vec<usize>,
    pub ncols: usize,
}

impl Echelon {
    pub fn rank(&self) -> usize {
        self.pivots.len()
    }
}

/// Reduced row echelon form by Gauss-Jordan elimination.
pub fn rref(mut rows: Vec<Vec<u64>>, ncols: usize, p: u64) -> Echelon {
    let mut pivots = Vec::new();
    let mut r = 0;
    for c in 0..ncols {
        let Some(found) = (r..rows.len()).find(|&i| rows[i][c] != 0) else {
            continue;
        };
        rows.swap(r, found);
        let inv = pow_mod(rows[r][c], p - 2, p);
        for v in rows[r].iter_mut() {
            *v = mul_mod(*v, inv, p);
        }
        let pivot_row = rows[r].clone();
        for (i, row) in rows.iter_mut().enumerate() {
            if i == r || row[c] == 0 {
                continue;
            }
            let f = row[c];
            for (v, &pv) in row.iter_mut().zip(&pivot_row).skip(c) {
                *v = (*v + p - mul_mod(f, pv, p)) % p;
            }
        }
        pivots.push(c);
        r += 1;
        if r == rows.len() {
            break;
        }
    }
    rows.truncate(r);
    Echelon { rows, pivots, ncols }
}

/// A nonzero solution of `A v = 0`, with the first free variable set to 1 and
/// the others to 0.
pub fn kernel_vector(rows: Vec<Vec<u64>>, ncols: usize, p: u64) -> Result<Vec<u64>> {
    let ech = rref(rows, ncols, p);
    let mut is_pivot = vec![false; ncols];
    for &c in &ech.pivots {
        is_pivot[c] = true;
    }
    let free = (0..ncols).find(|&c| !is_pivot[c]).ok_or(Error::NoKernel)?;
    let mut v = vec![0u64; ncols];
    v[free] = 1;
    for (row, &c) in ech.rows.iter().zip(&ech.pivots) {
        v[c] = (p - row[free]) % p;
    }
    Ok(v)
}

pub fn mat_vec(rows: &[Vec<u64>], v: &[u64], p: u64) -> Vec<u64> {
    rows.iter()
        .map(|row| row.iter().zip(v).fold(0, |acc, (&a, &b)| (acc + mul_mod(a, b, p)) % p))
        .collect()
}
