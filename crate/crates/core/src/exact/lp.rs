//! Dense dictionary simplex over the rationals with Bland's rule.
//!
//! Solves `max c·z  s.t.  A z <= b, z >= 0` for `b >= 0`, so the origin is a
//! feasible starting vertex and no phase one is needed. Problems here are a
//! few dozen rows wide at most.

use num_traits::{Signed, Zero};

use crate::geometry::Rat;

#[derive(Clone, Debug, PartialEq)]
pub enum LpOutcome {
    Optimal { z: Vec<Rat>, value: Rat },
    Unbounded,
}

#[derive(Clone, Debug)]
pub struct Lp {
    pub a: Vec<Vec<Rat>>,
    pub b: Vec<Rat>,
    pub c: Vec<Rat>,
}

impl Lp {
    pub fn new(num_vars: usize) -> Self {
        Lp { a: Vec::new(), b: Vec::new(), c: vec![Rat::zero(); num_vars] }
    }

    pub fn num_vars(&self) -> usize {
        self.c.len()
    }

    pub fn push_le(&mut self, row: Vec<Rat>, rhs: Rat) {
        assert_eq!(row.len(), self.num_vars());
        assert!(!rhs.is_negative(), "right-hand sides must be nonnegative");
        self.a.push(row);
        self.b.push(rhs);
    }

    pub fn solve(&self) -> LpOutcome {
        let n = self.num_vars();
        let m = self.a.len();
        // Variable labels: originals 0..n, slacks n..n+m.
        let mut basic: Vec<usize> = (n..n + m).collect();
        let mut nonbasic: Vec<usize> = (0..n).collect();
        let mut t = self.a.clone();
        let mut b = self.b.clone();
        let mut c = self.c.clone();
        let mut value = Rat::zero();

        loop {
            let entering = (0..n).filter(|&j| c[j].is_positive()).min_by_key(|&j| nonbasic[j]);
            let Some(j) = entering else { break };
            let mut leave: Option<(usize, Rat)> = None;
            for r in 0..m {
                if t[r][j].is_positive() {
                    let ratio = &b[r] / &t[r][j];
                    let better = match &leave {
                        None => true,
                        Some((lr, best)) => ratio < *best || (ratio == *best && basic[r] < basic[*lr]),
                    };
                    if better {
                        leave = Some((r, ratio));
                    }
                }
            }
            let Some((r, _)) = leave else { return LpOutcome::Unbounded };

            let p = t[r][j].clone();
            let inv = p.recip();
            for k in 0..n {
                if k == j {
                    t[r][k] = inv.clone();
                } else if !t[r][k].is_zero() {
                    t[r][k] = &t[r][k] * &inv;
                }
            }
            b[r] = &b[r] * &inv;
            let (pivot_row, pivot_rhs) = (t[r].clone(), b[r].clone());
            for i in 0..m {
                if i == r || t[i][j].is_zero() {
                    continue;
                }
                let f = t[i][j].clone();
                for k in 0..n {
                    if k == j {
                        t[i][k] = -(&f * &pivot_row[j]);
                    } else if !pivot_row[k].is_zero() {
                        let delta = &f * &pivot_row[k];
                        t[i][k] -= delta;
                    }
                }
                if !pivot_rhs.is_zero() {
                    let delta = &f * &pivot_rhs;
                    b[i] -= delta;
                }
            }
            let f = c[j].clone();
            for k in 0..n {
                if k == j {
                    c[k] = -(&f * &pivot_row[j]);
                } else if !pivot_row[k].is_zero() {
                    let delta = &f * &pivot_row[k];
                    c[k] -= delta;
                }
            }
            value += &f * &pivot_rhs;
            std::mem::swap(&mut basic[r], &mut nonbasic[j]);
        }

        let mut z = vec![Rat::zero(); n];
        for (r, &label) in basic.iter().enumerate() {
            if label < n {
                z[label] = b[r].clone();
            }
        }
        LpOutcome::Optimal { z, value }
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::geometry::{rat, ratio};

    #[test]
    fn textbook_problem() {
        // max 3x + 2y, x + y <= 4, x + 3y <= 6, x <= 3  ->  (3, 1), value 11.
        let mut lp = Lp::new(2);
        lp.c = vec![rat(3), rat(2)];
        lp.push_le(vec![rat(1), rat(1)], rat(4));
        lp.push_le(vec![rat(1), rat(3)], rat(6));
        lp.push_le(vec![rat(1), rat(0)], rat(3));
        assert_eq!(lp.solve(), LpOutcome::Optimal { z: vec![rat(3), rat(1)], value: rat(11) });
    }

    #[test]
    fn fractional_optimum() {
        // max x + y, 2x + y <= 2, x + 2y <= 2  ->  (2/3, 2/3).
        let mut lp = Lp::new(2);
        lp.c = vec![rat(1), rat(1)];
        lp.push_le(vec![rat(2), rat(1)], rat(2));
        lp.push_le(vec![rat(1), rat(2)], rat(2));
        match lp.solve() {
            LpOutcome::Optimal { z, value } => {
                assert_eq!(z, vec![ratio(2, 3), ratio(2, 3)]);
                assert_eq!(value, ratio(4, 3));
            }
            other => panic!("{other:?}"),
        }
    }

    #[test]
    fn unbounded_detected() {
        let mut lp = Lp::new(2);
        lp.c = vec![rat(1), rat(0)];
        lp.push_le(vec![rat(-1), rat(1)], rat(1));
        assert_eq!(lp.solve(), LpOutcome::Unbounded);
    }

    #[test]
    fn degenerate_start_terminates() {
        // Many constraints tight at the origin; Bland's rule must not cycle.
        let mut lp = Lp::new(3);
        lp.c = vec![rat(0), rat(0), rat(1)];
        lp.push_le(vec![rat(-1), rat(1), rat(1)], rat(0));
        lp.push_le(vec![rat(1), rat(-1), rat(1)], rat(0));
        lp.push_le(vec![rat(1), rat(1), rat(1)], rat(0));
        lp.push_le(vec![rat(1), rat(0), rat(0)], rat(1));
        lp.push_le(vec![rat(0), rat(1), rat(0)], rat(1));
        lp.push_le(vec![rat(0), rat(0), rat(1)], rat(1));
        match lp.solve() {
            LpOutcome::Optimal { value, .. } => assert_eq!(value, rat(0)),
            other => panic!("{other:?}"),
        }
    }
}
