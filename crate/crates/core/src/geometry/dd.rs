//! Double description method: extreme rays of a pointed polyhedral cone
//! `{y : A y >= 0}` with integer rows, using the combinatorial adjacency test.
//!
//! Both directions of the vertex/facet conversion go through this routine:
//! facets of `conv(V)` are the rays of `{(a, b) : b - a·v >= 0 for v in V}` and
//! vertices of `{x : a_i·x <= b_i}` are the rays of the homogenized cone.

use num::bigint::BigInt;
use num::{Signed, Zero};

use super::linalg::{primitive, primitive_int, rref};
use crate::rational::Rat;
use crate::{Error, Result};

#[derive(Clone, Debug, PartialEq, Eq)]
struct Bits(Vec<u64>);

impl Bits {
    fn new(n: usize) -> Self {
        Bits(vec![0; n.div_ceil(64)])
    }
    fn set(&mut self, i: usize) {
        self.0[i / 64] |= 1 << (i % 64);
    }
    fn and(&self, o: &Bits) -> Bits {
        Bits(self.0.iter().zip(&o.0).map(|(a, b)| a & b).collect())
    }
    fn count(&self) -> u32 {
        self.0.iter().map(|w| w.count_ones()).sum()
    }
    fn subset_of(&self, o: &Bits) -> bool {
        self.0.iter().zip(&o.0).all(|(a, b)| a & !b == 0)
    }
}

struct Ray {
    v: Vec<BigInt>,
    zero: Bits,
}

fn idot(a: &[BigInt], b: &[BigInt]) -> BigInt {
    a.iter().zip(b).fold(BigInt::zero(), |acc, (x, y)| acc + x * y)
}

/// Extreme rays of `{y in R^d : row·y >= 0 for every row}`, each a primitive
/// integer vector. Fails with [`Error::Unbounded`] if the cone is not pointed.
pub(crate) fn extreme_rays(rows: &[Vec<BigInt>]) -> Result<Vec<Vec<BigInt>>> {
    let Some(d) = rows.first().map(Vec::len) else {
        return Err(Error::EmptyInput("constraint rows"));
    };
    let m = rows.len();

    // Greedy choice of d independent rows.
    let mut basis: Vec<usize> = Vec::with_capacity(d);
    let mut echelon: Vec<Vec<Rat>> = Vec::new();
    for (i, row) in rows.iter().enumerate() {
        if basis.len() == d {
            break;
        }
        let mut trial = echelon.clone();
        trial.push(row.iter().map(|x| Rat::from_integer(x.clone())).collect());
        let (r, piv) = rref(trial);
        if piv.len() > echelon.len() {
            echelon = r;
            basis.push(i);
        }
    }
    if basis.len() < d {
        return Err(Error::Unbounded);
    }

    // Initial rays: columns of the inverse of the basis block.
    let block: Vec<Vec<Rat>> = basis
        .iter()
        .map(|&i| rows[i].iter().map(|x| Rat::from_integer(x.clone())).collect())
        .collect();
    let mut rays = Vec::with_capacity(d);
    for j in 0..d {
        let mut e = vec![Rat::zero(); d];
        e[j] = Rat::from_integer(BigInt::from(1));
        let col = super::linalg::solve(&block, &e).expect("basis rows are independent");
        let (v, _) = primitive(&col).expect("nonzero inverse column");
        let mut zero = Bits::new(m);
        for (jj, &bi) in basis.iter().enumerate() {
            if jj != j {
                zero.set(bi);
            }
        }
        rays.push(Ray { v, zero });
    }

    let mut in_basis = vec![false; m];
    for &b in &basis {
        in_basis[b] = true;
    }

    for (i, row) in rows.iter().enumerate() {
        if in_basis[i] {
            continue;
        }
        let vals: Vec<BigInt> = rays.iter().map(|r| idot(row, &r.v)).collect();
        let pos: Vec<usize> = (0..rays.len()).filter(|&j| vals[j].is_positive()).collect();
        let neg: Vec<usize> = (0..rays.len()).filter(|&j| vals[j].is_negative()).collect();
        if neg.is_empty() {
            for (j, r) in rays.iter_mut().enumerate() {
                if vals[j].is_zero() {
                    r.zero.set(i);
                }
            }
            continue;
        }

        let mut created = Vec::new();
        for &p in &pos {
            for &n in &neg {
                let common = rays[p].zero.and(&rays[n].zero);
                if (common.count() as usize) + 2 < d {
                    continue;
                }
                let adjacent = rays
                    .iter()
                    .enumerate()
                    .all(|(t, r)| t == p || t == n || !common.subset_of(&r.zero));
                if !adjacent {
                    continue;
                }
                let a = &vals[p];
                let b = -&vals[n];
                let v: Vec<BigInt> = rays[n].v.iter().zip(&rays[p].v).map(|(x, y)| a * x + &b * y).collect();
                let v = primitive_int(&v);
                let mut zero = common;
                zero.set(i);
                created.push(Ray { v, zero });
            }
        }

        let mut next = Vec::with_capacity(pos.len() + created.len());
        for (j, mut r) in rays.into_iter().enumerate() {
            if vals[j].is_negative() {
                continue;
            }
            if vals[j].is_zero() {
                r.zero.set(i);
            }
            next.push(r);
        }
        next.extend(created);
        rays = next;
    }

    Ok(rays.into_iter().map(|r| r.v).collect())
}

#[cfg(test)]
mod tests {
    use super::*;

    fn rows(r: &[&[i64]]) -> Vec<Vec<BigInt>> {
        r.iter().map(|x| x.iter().map(|&v| BigInt::from(v)).collect()).collect()
    }

    #[test]
    fn orthant_and_square_cone() {
        let r = extreme_rays(&rows(&[&[1, 0], &[0, 1]])).unwrap();
        assert_eq!(r.len(), 2);
        // homogenized unit square: 0 <= x <= s, 0 <= y <= s, s >= 0
        let sq = rows(&[&[1, 0, 0], &[-1, 0, 1], &[0, 1, 0], &[0, -1, 1], &[0, 0, 1]]);
        let mut r = extreme_rays(&sq).unwrap();
        r.sort();
        assert_eq!(r.len(), 4);
        assert!(r.iter().all(|v| v[2] == BigInt::from(1)));
    }

    #[test]
    fn non_pointed_is_rejected() {
        assert!(matches!(extreme_rays(&rows(&[&[1, 0]])), Err(Error::Unbounded)));
    }
}
