//! Exact dense simplex method (Bland's rule) for `max c·x, A x <= b, x >= 0`
//! with `b >= 0`, so the slack basis is feasible from the start.

use num::{Signed, Zero};

use crate::rational::Rat;

#[derive(Debug, PartialEq)]
pub(crate) enum LpOutcome {
    Optimal { x: Vec<Rat>, value: Rat },
    Unbounded,
}

pub(crate) fn maximize(a: &[Vec<Rat>], b: &[Rat], c: &[Rat]) -> LpOutcome {
    let m = a.len();
    let nv = c.len();
    let width = nv + m + 1;
    debug_assert!(b.iter().all(|x| !x.is_negative()));

    let mut t: Vec<Vec<Rat>> = (0..m)
        .map(|i| {
            let mut row = vec![Rat::zero(); width];
            row[..nv].clone_from_slice(&a[i]);
            row[nv + i] = Rat::from_integer(1.into());
            row[width - 1] = b[i].clone();
            row
        })
        .collect();
    let mut obj = vec![Rat::zero(); width];
    for (o, ci) in obj.iter_mut().zip(c) {
        *o = -ci.clone();
    }
    let mut basis: Vec<usize> = (nv..nv + m).collect();

    loop {
        let Some(enter) = (0..width - 1).find(|&j| obj[j].is_negative()) else {
            break;
        };
        let mut leave: Option<(usize, Rat)> = None;
        for i in 0..m {
            if !t[i][enter].is_positive() {
                continue;
            }
            let ratio = &t[i][width - 1] / &t[i][enter];
            let better = match &leave {
                None => true,
                Some((li, lr)) => ratio < *lr || (ratio == *lr && basis[i] < basis[*li]),
            };
            if better {
                leave = Some((i, ratio));
            }
        }
        let Some((r, _)) = leave else {
            return LpOutcome::Unbounded;
        };

        let piv = t[r][enter].clone();
        for x in t[r].iter_mut() {
            *x /= &piv;
        }
        let pivot_row = t[r].clone();
        for (i, row) in t.iter_mut().enumerate() {
            if i == r || row[enter].is_zero() {
                continue;
            }
            let f = row[enter].clone();
            for (x, p) in row.iter_mut().zip(&pivot_row) {
                *x -= &f * p;
            }
        }
        let f = obj[enter].clone();
        for (x, p) in obj.iter_mut().zip(&pivot_row) {
            *x -= &f * p;
        }
        basis[r] = enter;
    }

    let mut x = vec![Rat::zero(); nv];
    for (i, &bv) in basis.iter().enumerate() {
        if bv < nv {
            x[bv] = t[i][width - 1].clone();
        }
    }
    LpOutcome::Optimal { x, value: obj[width - 1].clone() }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::rational::{int, rat};

    #[test]
    fn small_programs() {
        // max x + y, x + 2y <= 4, 3x + y <= 6
        let a = vec![vec![int(1), int(2)], vec![int(3), int(1)]];
        let out = maximize(&a, &[int(4), int(6)], &[int(1), int(1)]);
        assert_eq!(out, LpOutcome::Optimal { x: vec![rat(8, 5), rat(6, 5)], value: rat(14, 5) });
        let a = vec![vec![int(-1), int(1)]];
        assert_eq!(maximize(&a, &[int(1)], &[int(1), int(0)]), LpOutcome::Unbounded);
    }
}
