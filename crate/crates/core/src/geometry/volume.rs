//! Pulling triangulation of a full-dimensional polytope, used for volumes,
//! barycenters and integrals of affine functions.

use std::collections::HashSet;

use num::{One, Signed, Zero};

use super::linalg::{det, rank, sub};
use crate::rational::Rat;

/// A triangulation into simplices given by vertex indices.
pub(crate) struct Triangulation {
    pub simplices: Vec<Vec<usize>>,
}

fn affine_dim(verts: &[Vec<Rat>], idx: &[usize]) -> usize {
    if idx.len() <= 1 {
        return 0;
    }
    let base = &verts[idx[0]];
    let diffs: Vec<Vec<Rat>> = idx[1..].iter().map(|&i| sub(&verts[i], base)).collect();
    rank(&diffs)
}

/// Triangulates a `d`-dimensional polytope. `facets[i]` lists the vertices
/// on facet `i`; faces are reached as intersections with facets.
pub(crate) fn triangulate(verts: &[Vec<Rat>], facets: &[Vec<usize>], d: usize) -> Triangulation {
    let all: Vec<usize> = (0..verts.len()).collect();
    let mut out = Vec::new();
    let mut prefix = Vec::with_capacity(d + 1);
    pull(&all, d, verts, facets, &mut prefix, &mut out);
    Triangulation { simplices: out }
}

fn pull(
    face: &[usize],
    d: usize,
    verts: &[Vec<Rat>],
    facets: &[Vec<usize>],
    prefix: &mut Vec<usize>,
    out: &mut Vec<Vec<usize>>,
) {
    let apex = face[0];
    if d == 0 {
        let mut s = prefix.clone();
        s.push(apex);
        out.push(s);
        return;
    }
    let mut seen: HashSet<Vec<usize>> = HashSet::new();
    prefix.push(apex);
    for g in facets {
        let sub_face: Vec<usize> = face.iter().copied().filter(|v| g.binary_search(v).is_ok()).collect();
        if sub_face.len() < d || sub_face.binary_search(&apex).is_ok() || seen.contains(&sub_face) {
            continue;
        }
        if affine_dim(verts, &sub_face) != d - 1 {
            continue;
        }
        pull(&sub_face, d - 1, verts, facets, prefix, out);
        seen.insert(sub_face);
    }
    prefix.pop();
}

fn factorial(n: usize) -> Rat {
    (1..=n).fold(Rat::one(), |acc, i| acc * Rat::from_integer(i.into()))
}

pub(crate) fn simplex_volume(verts: &[Vec<Rat>], s: &[usize]) -> Rat {
    let base = &verts[s[0]];
    let m: Vec<Vec<Rat>> = s[1..].iter().map(|&i| sub(&verts[i], base)).collect();
    det(m).abs() / factorial(s.len() - 1)
}

pub(crate) fn simplex_centroid(verts: &[Vec<Rat>], s: &[usize]) -> Vec<Rat> {
    let n = verts[s[0]].len();
    let k = Rat::from_integer(s.len().into());
    (0..n)
        .map(|j| s.iter().fold(Rat::zero(), |acc, &i| acc + &verts[i][j]) / &k)
        .collect()
}

impl Triangulation {
    pub fn volume(&self, verts: &[Vec<Rat>]) -> Rat {
        self.simplices.iter().fold(Rat::zero(), |acc, s| acc + simplex_volume(verts, s))
    }

    /// Returns `(volume, centroid)`; the centroid is `None` for zero volume.
    pub fn moments(&self, verts: &[Vec<Rat>]) -> (Rat, Option<Vec<Rat>>) {
        let n = verts.first().map_or(0, Vec::len);
        let mut vol = Rat::zero();
        let mut first = vec![Rat::zero(); n];
        for s in &self.simplices {
            let v = simplex_volume(verts, s);
            let c = simplex_centroid(verts, s);
            for (f, ci) in first.iter_mut().zip(&c) {
                *f += &v * ci;
            }
            vol += v;
        }
        if vol.is_zero() {
            return (vol, None);
        }
        let c = first.into_iter().map(|f| f / &vol).collect();
        (vol, Some(c))
    }
}
