//! Exact linear algebra: reduced row-echelon form over ℚ, and Hermite
//! normal form / integer kernels over ℤ.

use crate::rational::{QVec, Q};
use num_bigint::BigInt;
use num_integer::Integer;
use num_traits::{One, Signed, Zero};

/// Reduced row-echelon form of the given rows. Zero rows are dropped, so the
/// result is the canonical basis of the row space.
pub fn rref(rows: &[QVec]) -> Vec<QVec> {
    let mut m: Vec<QVec> = rows.to_vec();
    let ncols = m.first().map_or(0, Vec::len);
    let mut pivot_row = 0;
    for col in 0..ncols {
        let Some(p) = (pivot_row..m.len()).find(|&r| !m[r][col].is_zero()) else {
            continue;
        };
        m.swap(pivot_row, p);
        let inv = m[pivot_row][col].recip();
        for x in m[pivot_row].iter_mut() {
            *x *= &inv;
        }
        let pivot = m[pivot_row].clone();
        for (r, row) in m.iter_mut().enumerate() {
            if r == pivot_row || row[col].is_zero() {
                continue;
            }
            let factor = row[col].clone();
            for (x, pv) in row.iter_mut().zip(&pivot) {
                *x -= &factor * pv;
            }
        }
        pivot_row += 1;
        if pivot_row == m.len() {
            break;
        }
    }
    m.truncate(pivot_row);
    m
}

pub fn rank(rows: &[QVec]) -> usize {
    rref(rows).len()
}

/// True iff the vectors are linearly independent over ℚ. The empty list is
/// independent; any list containing a zero vector is not.
pub fn independent(rows: &[QVec]) -> bool {
    rank(rows) == rows.len()
}

/// Multiplies every row by the lcm of its denominators, giving an integer
/// row with the same kernel.
pub fn clear_denominators(row: &[Q]) -> Vec<BigInt> {
    let l = row.iter().fold(BigInt::one(), |acc, x| acc.lcm(x.denom()));
    row.iter()
        .map(|x| (x * Q::from_integer(l.clone())).to_integer())
        .collect()
}

/// Row-style Hermite normal form of the integer lattice spanned by `gens`
/// (each generator a row of length `n`). Rows are in echelon form with
/// positive pivots, and every entry above a pivot lies in `[0, pivot)`.
/// Zero rows are dropped; the output is unique for a given lattice.
pub fn hermite_rows(gens: &[Vec<BigInt>], n: usize) -> Vec<Vec<BigInt>> {
    let mut m: Vec<Vec<BigInt>> = gens
        .iter()
        .filter(|g| g.iter().any(|x| !x.is_zero()))
        .cloned()
        .collect();
    let mut out_row = 0;
    for col in 0..n {
        // Euclid on column `col` among rows out_row.. until one nonzero remains.
        loop {
            let mut best: Option<usize> = None;
            for r in out_row..m.len() {
                if !m[r][col].is_zero() && best.is_none_or(|b| m[r][col].abs() < m[b][col].abs()) {
                    best = Some(r);
                }
            }
            let Some(b) = best else { break };
            m.swap(out_row, b);
            let mut done = true;
            for r in out_row + 1..m.len() {
                if m[r][col].is_zero() {
                    continue;
                }
                let qt = m[r][col].div_floor(&m[out_row][col]);
                let pivot = m[out_row].clone();
                for (x, p) in m[r].iter_mut().zip(&pivot) {
                    *x -= &qt * p;
                }
                if !m[r][col].is_zero() {
                    done = false;
                }
            }
            if done {
                break;
            }
        }
        if out_row < m.len() && !m[out_row][col].is_zero() {
            if m[out_row][col].is_negative() {
                for x in m[out_row].iter_mut() {
                    *x = -&*x;
                }
            }
            let pivot = m[out_row].clone();
            for r in 0..out_row {
                let qt = m[r][col].div_floor(&pivot[col]);
                if qt.is_zero() {
                    continue;
                }
                for (x, p) in m[r].iter_mut().zip(&pivot) {
                    *x -= &qt * p;
                }
            }
            out_row += 1;
        }
        m.retain(|row| row.iter().any(|x| !x.is_zero()));
        if out_row >= m.len() {
            break;
        }
    }
    m.truncate(out_row);
    m
}

/// Basis (in Hermite form) of `{x ∈ ℤⁿ : C x = 0}` for an integer matrix
/// `C` given by its rows.
pub fn integer_kernel(constraints: &[Vec<BigInt>], n: usize) -> Vec<Vec<BigInt>> {
    let r = constraints.len();
    // Row j of the augmented matrix is (column j of C | e_j). Unimodular row
    // operations keep the right block a basis change of ℤⁿ.
    let aug: Vec<Vec<BigInt>> = (0..n)
        .map(|j| {
            let mut row: Vec<BigInt> = constraints.iter().map(|c| c[j].clone()).collect();
            row.extend((0..n).map(|k| {
                if k == j {
                    BigInt::one()
                } else {
                    BigInt::zero()
                }
            }));
            row
        })
        .collect();
    let reduced = hermite_rows(&aug, r + n);
    let kernel: Vec<Vec<BigInt>> = reduced
        .into_iter()
        .filter(|row| row[..r].iter().all(Zero::is_zero))
        .map(|row| row[r..].to_vec())
        .collect();
    hermite_rows(&kernel, n)
}

/// Exact membership of `v` in the lattice whose Hermite basis is `basis`.
pub fn in_lattice(basis: &[Vec<BigInt>], v: &[BigInt]) -> bool {
    let mut rem = v.to_vec();
    for row in basis {
        let Some(col) = row.iter().position(|x| !x.is_zero()) else {
            continue;
        };
        if rem[..col].iter().any(|x| !x.is_zero()) {
            return false;
        }
        let (qt, r) = rem[col].div_rem(&row[col]);
        if !r.is_zero() {
            return false;
        }
        for (x, b) in rem.iter_mut().zip(row) {
            *x -= &qt * b;
        }
    }
    rem.iter().all(Zero::is_zero)
}
