use serde::Serialize;

use crate::error::{Error, Result};

/// Known bounds on the cover numbers for one `(d, n, m)`.
///
/// `f` counts sets of an antipodal `n`-fold cover of `S^d` that is `m`-fold
/// on the open north, `fbar` the same with the closed north, and `q` the
/// largest multiplicity forced on an `n`-fold cover with `d + 2n` sets.
#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct BoundsTable {
    pub d: usize,
    pub n: usize,
    pub m: Option<usize>,
    pub f_lower: Option<usize>,
    pub f_upper: Option<usize>,
    pub f_exact: Option<usize>,
    pub fbar_exact: Option<usize>,
    #[serde(rename = "Q_lower")]
    pub q_lower: usize,
    #[serde(rename = "Q_upper")]
    pub q_upper: usize,
    #[serde(rename = "Q_exact")]
    pub q_exact: Option<usize>,
}

pub fn bounds_table(d: usize, n: usize, m: Option<usize>) -> Result<BoundsTable> {
    if d < 1 || n < 1 {
        return Err(Error::InvalidParameter(format!("need d >= 1 and n >= 1, got d = {d}, n = {n}")));
    }
    let q_lower = d.div_ceil(2) + n;
    let q_upper = d + n;
    let q_exact = (n == 1).then_some(d / 2 + 2);
    let (mut f_lower, mut f_upper, mut f_exact, mut fbar_exact) = (None, None, None, None);
    if let Some(m) = m {
        if m <= n {
            return Err(Error::InvalidParameter(format!("need m > n, got n = {n}, m = {m}")));
        }
        f_lower = Some(((d - 1).div_ceil(2) + n + m).max(d + 2 * n));
        f_upper = Some(d + n + m);
        fbar_exact = Some(d + 2 * m - 1);
        f_exact = match (d, n) {
            (1, 1) => Some(2 + m),
            (_, 1) if m <= d / 2 + 1 => Some(d + 2),
            (_, 1) => Some((d - 1) / 2 + 2 + m),
            _ => None,
        };
    }
    Ok(BoundsTable { d, n, m, f_lower, f_upper, f_exact, fbar_exact, q_lower, q_upper, q_exact })
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    #[test]
    fn examples() {
        assert_eq!(bounds_table(2, 1, Some(2)).unwrap().f_exact, Some(4));
        assert_eq!(bounds_table(2, 1, Some(5)).unwrap().f_exact, Some(7));
        let t = bounds_table(3, 2, Some(4)).unwrap();
        assert_eq!(t.fbar_exact, Some(10));
        assert_eq!((t.f_lower, t.f_upper, t.f_exact), (Some(7), Some(9), None));
        assert_eq!(bounds_table(1, 1, Some(4)).unwrap().f_exact, Some(6));
        assert!(bounds_table(2, 2, Some(2)).is_err());
        assert_eq!(bounds_table(4, 1, None).unwrap().q_exact, Some(4));
    }

    proptest! {
        #[test]
        fn consistent(d in 1usize..30, n in 1usize..10, extra in 1usize..10) {
            let m = n + extra;
            let t = bounds_table(d, n, Some(m)).unwrap();
            let (lo, hi) = (t.f_lower.unwrap(), t.f_upper.unwrap());
            prop_assert!(lo <= hi);
            prop_assert!(hi <= t.fbar_exact.unwrap());
            prop_assert!(t.q_lower <= t.q_upper);
            if let Some(f) = t.f_exact {
                prop_assert!(lo <= f && f <= hi);
            }
            if let Some(q) = t.q_exact {
                prop_assert!(t.q_lower <= q && q <= t.q_upper);
            }
        }
    }
}
