//! Exact determinants and ranks for polynomial and rational matrices.

use num_traits::{One, Zero};

use crate::poly::{PolyError, Polynomial};
use crate::rational::Rational;

/// Determinant of a square polynomial matrix. Fraction-free Bareiss
/// elimination for sizes up to 6, cofactor expansion beyond that.
pub fn poly_det(mat: &[Vec<Polynomial>]) -> Result<Polynomial, PolyError> {
    let n = mat.len();
    if n == 0 || mat.iter().any(|row| row.len() != n) {
        return Err(PolyError::NotSquare);
    }
    let nvars = mat[0][0].nvars();
    if mat.iter().flatten().any(|p| p.nvars() != nvars) {
        return Err(PolyError::NvarsMismatch(nvars, 0));
    }
    if n <= 6 {
        Ok(bareiss(mat.to_vec(), nvars))
    } else {
        Ok(cofactor(mat, nvars))
    }
}

fn bareiss(mut m: Vec<Vec<Polynomial>>, nvars: usize) -> Polynomial {
    let n = m.len();
    let mut sign_negative = false;
    let mut prev = Polynomial::one(nvars);
    for k in 0..n {
        if m[k][k].is_zero() {
            match (k + 1..n).find(|&r| !m[r][k].is_zero()) {
                Some(r) => {
                    m.swap(k, r);
                    sign_negative = !sign_negative;
                }
                None => return Polynomial::zero(nvars),
            }
        }
        if k + 1 == n {
            break;
        }
        for i in k + 1..n {
            for j in k + 1..n {
                let num = &(&m[k][k] * &m[i][j]) - &(&m[i][k] * &m[k][j]);
                // One-step division by the previous pivot is exact in Bareiss.
                m[i][j] = num.div_exact(&prev).expect("Bareiss divisibility invariant");
            }
            m[i][k] = Polynomial::zero(nvars);
        }
        prev = m[k][k].clone();
    }
    let det = m[n - 1][n - 1].clone();
    if sign_negative {
        -&det
    } else {
        det
    }
}

fn cofactor(mat: &[Vec<Polynomial>], nvars: usize) -> Polynomial {
    let n = mat.len();
    if n == 1 {
        return mat[0][0].clone();
    }
    let mut acc = Polynomial::zero(nvars);
    for j in 0..n {
        if mat[0][j].is_zero() {
            continue;
        }
        let minor: Vec<Vec<Polynomial>> = (1..n)
            .map(|i| {
                (0..n)
                    .filter(|&c| c != j)
                    .map(|c| mat[i][c].clone())
                    .collect()
            })
            .collect();
        let term = &mat[0][j] * &cofactor(&minor, nvars);
        acc = if j % 2 == 0 { &acc + &term } else { &acc - &term };
    }
    acc
}

/// Jacobian determinant of a square polynomial system: coords[i] are
/// polynomials in as many variables as there are coordinates.
pub fn jacobian_det_of(coords: &[Polynomial]) -> Result<Polynomial, PolyError> {
    let n = coords.len();
    if n == 0 {
        return Err(PolyError::NotSquare);
    }
    let nvars = coords[0].nvars();
    if nvars != n || coords.iter().any(|p| p.nvars() != n) {
        return Err(PolyError::NotSquare);
    }
    let mat: Vec<Vec<Polynomial>> = coords
        .iter()
        .map(|f| (0..n).map(|j| f.partial_derivative(j)).collect())
        .collect();
    poly_det(&mat)
}

/// Rank of a rational matrix by Gaussian elimination.
pub fn rational_rank(rows: &[Vec<Rational>]) -> usize {
    let mut m: Vec<Vec<Rational>> = rows.to_vec();
    let nrows = m.len();
    let ncols = m.first().map(|r| r.len()).unwrap_or(0);
    let mut rank = 0;
    for col in 0..ncols {
        let pivot = (rank..nrows).find(|&r| !m[r][col].is_zero());
        let Some(pr) = pivot else { continue };
        m.swap(rank, pr);
        let inv = m[rank][col].recip();
        for c in col..ncols {
            let v = &m[rank][c] * &inv;
            m[rank][c] = v;
        }
        for r in 0..nrows {
            if r != rank && !m[r][col].is_zero() {
                let f = m[r][col].clone();
                for c in col..ncols {
                    let v = &m[r][c] - &(&m[rank][c] * &f);
                    m[r][c] = v;
                }
            }
        }
        rank += 1;
        if rank == nrows {
            break;
        }
    }
    rank
}

/// Determinant of a square rational matrix.
pub fn rational_det(rows: &[Vec<Rational>]) -> Result<Rational, PolyError> {
    let n = rows.len();
    if n == 0 || rows.iter().any(|r| r.len() != n) {
        return Err(PolyError::NotSquare);
    }
    let mut m = rows.to_vec();
    let mut det = Rational::one();
    for k in 0..n {
        let pivot = (k..n).find(|&r| !m[r][k].is_zero());
        let Some(pr) = pivot else { return Ok(Rational::zero()) };
        if pr != k {
            m.swap(k, pr);
            det = -det;
        }
        det *= &m[k][k];
        let inv = m[k][k].recip();
        for r in k + 1..n {
            if m[r][k].is_zero() {
                continue;
            }
            let f = &m[r][k] * &inv;
            for c in k..n {
                let v = &m[r][c] - &(&m[k][c] * &f);
                m[r][c] = v;
            }
        }
    }
    Ok(det)
}
