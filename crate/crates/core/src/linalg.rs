//! Small dense linear algebra: exact over rationals, plain over binary64.

use num_traits::{One, Signed, Zero};

use crate::geometry::Rat;

/// Reduced row echelon form in place; returns pivot columns.
pub fn rref(m: &mut [Vec<Rat>]) -> Vec<usize> {
    let rows = m.len();
    if rows == 0 {
        return Vec::new();
    }
    let cols = m[0].len();
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
        for v in m[r].iter_mut() {
            *v = &*v * &inv;
        }
        for i in 0..rows {
            if i != r && !m[i][c].is_zero() {
                let f = m[i][c].clone();
                for j in 0..cols {
                    if !m[r][j].is_zero() {
                        let delta = &f * &m[r][j];
                        m[i][j] -= delta;
                    }
                }
            }
        }
        pivots.push(c);
        r += 1;
    }
    pivots
}

pub fn rank(rows: &[Vec<Rat>]) -> usize {
    let mut m = rows.to_vec();
    rref(&mut m).len()
}

/// Basis of `{x : row · x = 0 for every row}` in a space of dimension `dim`.
pub fn nullspace(rows: &[Vec<Rat>], dim: usize) -> Vec<Vec<Rat>> {
    if rows.is_empty() {
        return (0..dim)
            .map(|i| (0..dim).map(|j| if i == j { Rat::one() } else { Rat::zero() }).collect())
            .collect();
    }
    let mut m = rows.to_vec();
    let pivots = rref(&mut m);
    let free: Vec<usize> = (0..dim).filter(|c| !pivots.contains(c)).collect();
    free.iter()
        .map(|&f| {
            let mut v = vec![Rat::zero(); dim];
            v[f] = Rat::one();
            for (r, &pc) in pivots.iter().enumerate() {
                v[pc] = -m[r][f].clone();
            }
            v
        })
        .collect()
}

/// Inverse of a square rational matrix, or `None` when singular.
pub fn inverse(a: &[Vec<Rat>]) -> Option<Vec<Vec<Rat>>> {
    let n = a.len();
    let mut aug: Vec<Vec<Rat>> = a
        .iter()
        .enumerate()
        .map(|(i, row)| {
            let mut r = row.clone();
            r.extend((0..n).map(|j| if i == j { Rat::one() } else { Rat::zero() }));
            r
        })
        .collect();
    let pivots = rref(&mut aug);
    if pivots.len() < n || pivots[n - 1] >= n {
        return None;
    }
    Some(aug.into_iter().map(|r| r[n..].to_vec()).collect())
}

pub fn mat_vec(a: &[Vec<Rat>], x: &[Rat]) -> Vec<Rat> {
    a.iter()
        .map(|row| row.iter().zip(x).fold(Rat::zero(), |acc, (p, q)| acc + p * q))
        .collect()
}

/// Largest absolute value; used to rescale witnesses into a box.
pub fn max_abs(v: &[Rat]) -> Rat {
    v.iter().map(|x| x.abs()).fold(Rat::zero(), |a, b| if b > a { b } else { a })
}

pub fn dot_f64(a: &[f64], b: &[f64]) -> f64 {
    a.iter().zip(b).map(|(x, y)| x * y).sum()
}

pub fn norm_f64(a: &[f64]) -> f64 {
    dot_f64(a, a).sqrt()
}

/// Inverse of a small symmetric positive definite matrix by Gauss-Jordan with
/// partial pivoting. Returns `None` if a pivot falls below `eps`.
pub fn inverse_f64(a: &[Vec<f64>], eps: f64) -> Option<Vec<Vec<f64>>> {
    let n = a.len();
    let mut m: Vec<Vec<f64>> = a
        .iter()
        .enumerate()
        .map(|(i, row)| {
            let mut r = row.clone();
            r.extend((0..n).map(|j| if i == j { 1.0 } else { 0.0 }));
            r
        })
        .collect();
    for c in 0..n {
        let p = (c..n).max_by(|&i, &j| m[i][c].abs().total_cmp(&m[j][c].abs()))?;
        if m[p][c].abs() < eps {
            return None;
        }
        m.swap(c, p);
        let inv = 1.0 / m[c][c];
        for v in m[c].iter_mut() {
            *v *= inv;
        }
        for i in 0..n {
            if i != c {
                let f = m[i][c];
                if f != 0.0 {
                    for j in 0..2 * n {
                        m[i][j] -= f * m[c][j];
                    }
                }
            }
        }
    }
    Some(m.into_iter().map(|r| r[n..].to_vec()).collect())
}

#[cfg(test)]
mod tests {
    use super::*;

    fn r(n: i64) -> Rat {
        Rat::from_integer(n.into())
    }

    #[test]
    fn nullspace_of_single_row() {
        let ns = nullspace(&[vec![r(1), r(2), r(3)]], 3);
        assert_eq!(ns.len(), 2);
        for v in &ns {
            let d = v[0].clone() + r(2) * &v[1] + r(3) * &v[2];
            assert!(d.is_zero());
        }
    }

    #[test]
    fn inverse_round_trip() {
        let a = vec![vec![r(2), r(1)], vec![r(1), r(1)]];
        let inv = inverse(&a).unwrap();
        assert_eq!(mat_vec(&inv, &mat_vec(&a, &[r(3), r(-5)])), vec![r(3), r(-5)]);
        assert!(inverse(&[vec![r(1), r(2)], vec![r(2), r(4)]]).is_none());
    }
}
