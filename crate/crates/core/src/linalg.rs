//! Small exact linear algebra: rational row reduction and an integer Hermite
//! normal form that keeps the unimodular transform.

use num_bigint::BigInt;
use num_integer::Integer;
use num_traits::{One, Signed, Zero};

use crate::rational::Rational;

pub type QMatrix = Vec<Vec<Rational>>;
pub type ZMatrix = Vec<Vec<BigInt>>;

/// Reduced row echelon form in place; returns the pivot columns.
pub fn rref(m: &mut QMatrix) -> Vec<usize> {
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
        let inv = m[r][c].recip();
        for x in m[r].iter_mut() {
            *x *= &inv;
        }
        for i in 0..rows {
            if i != r && !m[i][c].is_zero() {
                let f = m[i][c].clone();
                for j in c..cols {
                    let d = &f * &m[r][j];
                    m[i][j] -= d;
                }
            }
        }
        pivots.push(c);
        r += 1;
    }
    pivots
}

pub fn rank(m: &QMatrix) -> usize {
    let mut a = m.clone();
    rref(&mut a).len()
}

/// A basis of `{v : M v = 0}`.
pub fn nullspace(m: &QMatrix, cols: usize) -> Vec<Vec<Rational>> {
    let mut a = m.clone();
    let pivots = rref(&mut a);
    let free: Vec<usize> = (0..cols).filter(|c| !pivots.contains(c)).collect();
    free.iter()
        .map(|&f| {
            let mut v = vec![Rational::zero(); cols];
            v[f] = Rational::one();
            for (r, &p) in pivots.iter().enumerate() {
                v[p] = -a[r][f].clone();
            }
            v
        })
        .collect()
}

/// Inverse of a square matrix, if it exists.
pub fn inverse(m: &QMatrix) -> Option<QMatrix> {
    let n = m.len();
    let mut aug: QMatrix = m
        .iter()
        .enumerate()
        .map(|(i, row)| {
            let mut r = row.clone();
            r.extend((0..n).map(|j| if i == j { Rational::one() } else { Rational::zero() }));
            r
        })
        .collect();
    let pivots = rref(&mut aug);
    if pivots.len() < n || pivots[n - 1] != n - 1 {
        return None;
    }
    Some(aug.into_iter().map(|r| r[n..].to_vec()).collect())
}

/// Solves `y · M = b` for a row vector `y`; `None` if inconsistent.
pub fn solve_left(m: &QMatrix, b: &[Rational]) -> Option<Vec<Rational>> {
    let rows = m.len();
    let cols = b.len();
    // transpose system: M^T y^T = b^T
    let mut aug: QMatrix = (0..cols)
        .map(|j| {
            let mut r: Vec<Rational> = (0..rows).map(|i| m[i][j].clone()).collect();
            r.push(b[j].clone());
            r
        })
        .collect();
    let pivots = rref(&mut aug);
    if pivots.contains(&rows) {
        return None;
    }
    let mut y = vec![Rational::zero(); rows];
    for (r, &p) in pivots.iter().enumerate() {
        y[p] = aug[r][rows].clone();
    }
    Some(y)
}

/// Row-style Hermite normal form: returns `(H, U)` with `U · A = H`, `U`
/// unimodular, the nonzero rows of `H` first with positive pivots and
/// entries above each pivot reduced into `[0, pivot)`.
pub fn hermite(a: &ZMatrix) -> (ZMatrix, ZMatrix) {
    let rows = a.len();
    let cols = a.first().map_or(0, Vec::len);
    let mut h = a.clone();
    let mut u: ZMatrix = (0..rows)
        .map(|i| (0..rows).map(|j| if i == j { BigInt::one() } else { BigInt::zero() }).collect())
        .collect();
    let mut r = 0;
    for c in 0..cols {
        if r == rows {
            break;
        }
        for i in (r + 1)..rows {
            if h[i][c].is_zero() {
                continue;
            }
            if h[r][c].is_zero() {
                h.swap(r, i);
                u.swap(r, i);
                continue;
            }
            // [p q; -b/g a/g] combines rows r and i, zeroing h[i][c]
            let a0 = h[r][c].clone();
            let b0 = h[i][c].clone();
            let e = a0.extended_gcd(&b0);
            let (g, p, q) = (e.gcd, e.x, e.y);
            let ra = &a0 / &g;
            let rb = &b0 / &g;
            combine(&mut h, r, i, &p, &q, &rb, &ra);
            combine(&mut u, r, i, &p, &q, &rb, &ra);
        }
        if h[r][c].is_zero() {
            continue;
        }
        if h[r][c].is_negative() {
            for x in h[r].iter_mut() {
                *x = -x.clone();
            }
            for x in u[r].iter_mut() {
                *x = -x.clone();
            }
        }
        for i in 0..r {
            let f = h[i][c].div_floor(&h[r][c]);
            if !f.is_zero() {
                for j in 0..cols {
                    let d = &f * &h[r][j];
                    h[i][j] -= d;
                }
                for j in 0..rows {
                    let d = &f * &u[r][j];
                    u[i][j] -= d;
                }
            }
        }
        r += 1;
    }
    (h, u)
}

/// Replaces rows `(r, i)` by `(p·r + q·i, -b·r + a·i)`.
fn combine(m: &mut ZMatrix, r: usize, i: usize, p: &BigInt, q: &BigInt, b: &BigInt, a: &BigInt) {
    for j in 0..m[r].len() {
        let x = m[r][j].clone();
        let y = m[i][j].clone();
        m[r][j] = p * &x + q * &y;
        m[i][j] = a * &y - b * &x;
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::rational::q;

    fn z(rows: &[&[i64]]) -> ZMatrix {
        rows.iter().map(|r| r.iter().map(|&x| BigInt::from(x)).collect()).collect()
    }

    fn mat_mul(a: &ZMatrix, b: &ZMatrix) -> ZMatrix {
        a.iter()
            .map(|row| {
                (0..b[0].len())
                    .map(|j| row.iter().zip(b).map(|(x, br)| x * &br[j]).sum())
                    .collect()
            })
            .collect()
    }

    #[test]
    fn hermite_form() {
        let a = z(&[&[2, 4], &[3, 5], &[6, 0]]);
        let (h, u) = hermite(&a);
        assert_eq!(mat_mul(&u, &a), h);
        assert_eq!(h[0], vec![BigInt::from(1), BigInt::from(1)]);
        assert_eq!(h[1], vec![BigInt::from(0), BigInt::from(2)]);
        assert!(h[2].iter().all(Zero::is_zero));
    }

    #[test]
    fn rational_helpers() {
        let m = vec![vec![q(1), q(2)], vec![q(2), q(4)]];
        assert_eq!(rank(&m), 1);
        let ns = nullspace(&m, 2);
        assert_eq!(ns, vec![vec![q(-2), q(1)]]);
        assert!(inverse(&m).is_none());
        let m2 = vec![vec![q(2), q(1)], vec![q(1), q(1)]];
        let inv = inverse(&m2).unwrap();
        assert_eq!(inv, vec![vec![q(1), q(-1)], vec![q(-1), q(2)]]);
        let y = solve_left(&m2, &[q(3), q(2)]).unwrap();
        assert_eq!(y, vec![q(1), q(1)]);
        assert!(solve_left(&m, &[q(1), q(1)]).is_none());
    }
}
