//! Stalks and germs.
//!
//! The stalk at `x` is the colimit of `P(U)` over opens `U ∋ x`. Since
//! `min_open(x)` is the least such open, the colimit is `P(min_open x)` and the
//! germ of `s ∈ P(U)` is `s|_{min_open x}`. [`stalk_colimit`] computes the
//! colimit the long way (a quotient of the disjoint union) for comparison.

use super::presheaf::{Presheaf, PresheafMap};

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Stalk {
    pub point: usize,
    /// Germ labels, one per element of `P(min_open x)`.
    pub carrier: Vec<String>,
}

impl Stalk {
    pub fn len(&self) -> usize {
        self.carrier.len()
    }

    pub fn is_empty(&self) -> bool {
        self.carrier.is_empty()
    }
}

pub fn stalk(p: &Presheaf, x: usize) -> Stalk {
    let mo = p.site().min_open(x);
    Stalk { point: x, carrier: p.labels(mo).to_vec() }
}

/// Germ of `s ∈ P(u)` at `x ∈ u`, as an element of `P(min_open x)`.
pub fn germ(p: &Presheaf, x: usize, u: usize, s: usize) -> usize {
    let site = p.site();
    assert!(site.open(u).contains(x), "germ needs x in u");
    p.restrict(u, site.min_open(x), s)
}

/// The map on stalks induced by a presheaf morphism.
pub fn stalk_map(f: &PresheafMap, p: &Presheaf, x: usize) -> Vec<usize> {
    f.components[p.site().min_open(x)].clone()
}

/// The colimit computed directly: elements `(U, s)` for `U ∋ x`, identified
/// along restrictions. Returns the class of each `(U, s)` and the number of
/// classes; classes are numbered in order of first appearance.
pub struct Colimit {
    pub classes: usize,
    /// `(open, element, class)` for every element over an open containing `x`.
    pub members: Vec<(usize, usize, usize)>,
}

struct UnionFind {
    parent: Vec<usize>,
}

impl UnionFind {
    fn new(n: usize) -> Self {
        UnionFind { parent: (0..n).collect() }
    }

    fn find(&mut self, a: usize) -> usize {
        let mut r = a;
        while self.parent[r] != r {
            r = self.parent[r];
        }
        let mut c = a;
        while self.parent[c] != r {
            let next = self.parent[c];
            self.parent[c] = r;
            c = next;
        }
        r
    }

    fn union(&mut self, a: usize, b: usize) {
        let (ra, rb) = (self.find(a), self.find(b));
        if ra != rb {
            self.parent[ra.max(rb)] = ra.min(rb);
        }
    }
}

pub fn stalk_colimit(p: &Presheaf, x: usize) -> Colimit {
    let site = p.site();
    let nbhds: Vec<usize> = (0..site.len()).filter(|&u| site.open(u).contains(x)).collect();
    let mut offset = vec![usize::MAX; site.len()];
    let mut members = Vec::new();
    for &u in &nbhds {
        offset[u] = members.len();
        for s in 0..p.size(u) {
            members.push((u, s, 0));
        }
    }
    let mut uf = UnionFind::new(members.len());
    for &u in &nbhds {
        for &l in &nbhds {
            if l != u && site.contains(u, l) {
                for s in 0..p.size(u) {
                    uf.union(offset[u] + s, offset[l] + p.restrict(u, l, s));
                }
            }
        }
    }
    let mut ids = std::collections::HashMap::new();
    for i in 0..members.len() {
        let r = uf.find(i);
        let next = ids.len();
        let c = *ids.entry(r).or_insert(next);
        members[i].2 = c;
    }
    Colimit { classes: ids.len(), members }
}
