//! Binary relations on small index sets, stored as an `n × n` bit matrix.

use std::fmt;
use std::sync::OnceLock;

use fixedbitset::FixedBitSet;

#[derive(Clone, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct Relation {
    n: usize,
    bits: FixedBitSet,
}

impl fmt::Debug for Relation {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.debug_set().entries(self.strict_pairs()).finish()
    }
}

impl Relation {
    pub fn empty(n: usize) -> Self {
        Relation { n, bits: FixedBitSet::with_capacity(n * n) }
    }

    pub fn identity(n: usize) -> Self {
        let mut r = Relation::empty(n);
        for i in 0..n {
            r.set(i, i);
        }
        r
    }

    /// Total order following the index order `0 ≤ 1 ≤ … ≤ n-1`.
    pub fn chain(n: usize) -> Self {
        let mut r = Relation::empty(n);
        for i in 0..n {
            for j in i..n {
                r.set(i, j);
            }
        }
        r
    }

    /// Reflexive-transitive closure of the given pairs.
    pub fn from_pairs<I: IntoIterator<Item = (usize, usize)>>(n: usize, pairs: I) -> Self {
        let mut r = Relation::identity(n);
        for (x, y) in pairs {
            r.set(x, y);
        }
        r.close();
        r
    }

    pub fn size(&self) -> usize {
        self.n
    }

    pub fn set(&mut self, x: usize, y: usize) {
        self.bits.insert(x * self.n + y);
    }

    pub fn le(&self, x: usize, y: usize) -> bool {
        self.bits.contains(x * self.n + y)
    }

    pub fn pairs(&self) -> Vec<(usize, usize)> {
        self.bits.ones().map(|b| (b / self.n, b % self.n)).collect()
    }

    /// Pairs with `x ≠ y`.
    pub fn strict_pairs(&self) -> Vec<(usize, usize)> {
        self.pairs().into_iter().filter(|(x, y)| x != y).collect()
    }

    /// Warshall transitive closure in place.
    pub fn close(&mut self) {
        let n = self.n;
        for k in 0..n {
            for i in 0..n {
                if Relation::le(self, i, k) {
                    for j in 0..n {
                        if Relation::le(self, k, j) {
                            self.set(i, j);
                        }
                    }
                }
            }
        }
    }

    pub fn is_reflexive(&self) -> bool {
        (0..self.n).all(|i| self.le(i, i))
    }

    pub fn is_antisymmetric(&self) -> bool {
        self.strict_pairs().into_iter().all(|(x, y)| !self.le(y, x))
    }

    pub fn is_transitive(&self) -> bool {
        let n = self.n;
        (0..n).all(|i| {
            (0..n).all(|k| !self.le(i, k) || (0..n).all(|j| !self.le(k, j) || self.le(i, j)))
        })
    }

    pub fn is_partial_order(&self) -> bool {
        self.is_reflexive() && self.is_antisymmetric() && self.is_transitive()
    }

    /// Restriction along an index list: `result.le(a, b) = self.le(idx[a], idx[b])`.
    pub fn restrict(&self, idx: &[usize]) -> Relation {
        let mut r = Relation::empty(idx.len());
        for (a, &x) in idx.iter().enumerate() {
            for (b, &y) in idx.iter().enumerate() {
                if self.le(x, y) {
                    r.set(a, b);
                }
            }
        }
        r
    }

    /// Product order on `self.size() × other.size()` with lexicographic indices.
    pub fn product(&self, other: &Relation) -> Relation {
        let (n, m) = (self.n, other.n);
        let mut r = Relation::empty(n * m);
        for (a, b) in self.pairs() {
            for (c, d) in other.pairs() {
                r.set(a * m + c, b * m + d);
            }
        }
        r
    }

    /// Re-index into a larger universe: local index `k` becomes `idx[k]`.
    pub fn embed(&self, idx: &[usize], universe: usize) -> Relation {
        let mut r = Relation::empty(universe);
        for (a, b) in self.pairs() {
            r.set(idx[a], idx[b]);
        }
        r
    }

    pub fn reversed(&self) -> Relation {
        let mut r = Relation::empty(self.n);
        for (a, b) in self.pairs() {
            r.set(b, a);
        }
        r
    }
}

const MAX_ENUMERATED: usize = 6;

/// All partial orders on `{0, …, k-1}`, for `k ≤ 6`.
///
/// Built by adding one element at a time: the new top index gets a down-set
/// `D` and an up-set `U` of the previous poset with every element of `D` below
/// every element of `U`.
pub fn posets(k: usize) -> &'static [Relation] {
    static CACHE: OnceLock<Vec<Vec<Relation>>> = OnceLock::new();
    assert!(k <= MAX_ENUMERATED, "poset enumeration is limited to {MAX_ENUMERATED} elements");
    &CACHE.get_or_init(|| {
        let mut all = vec![vec![Relation::empty(0)]];
        for size in 1..=MAX_ENUMERATED {
            let prev = &all[size - 1];
            let mut next = Vec::new();
            for p in prev {
                extend_poset(p, &mut next);
            }
            next.sort();
            all.push(next);
        }
        all
    })[k]
}

fn extend_poset(p: &Relation, out: &mut Vec<Relation>) {
    let n = p.size();
    let subsets = 1usize << n;
    let is_down = |d: usize| {
        (0..n).filter(|&x| d >> x & 1 == 1).all(|x| (0..n).all(|y| !p.le(y, x) || d >> y & 1 == 1))
    };
    let is_up = |u: usize| {
        (0..n).filter(|&x| u >> x & 1 == 1).all(|x| (0..n).all(|y| !p.le(x, y) || u >> y & 1 == 1))
    };
    let downs: Vec<usize> = (0..subsets).filter(|&d| is_down(d)).collect();
    let ups: Vec<usize> = (0..subsets).filter(|&u| is_up(u)).collect();
    for &d in &downs {
        for &u in &ups {
            if d & u != 0 {
                continue;
            }
            let ok = (0..n)
                .filter(|&x| d >> x & 1 == 1)
                .all(|x| (0..n).filter(|&y| u >> y & 1 == 1).all(|y| p.le(x, y)));
            if !ok {
                continue;
            }
            let mut r = Relation::empty(n + 1);
            for (a, b) in p.pairs() {
                r.set(a, b);
            }
            r.set(n, n);
            for x in 0..n {
                if d >> x & 1 == 1 {
                    r.set(x, n);
                }
                if u >> x & 1 == 1 {
                    r.set(n, x);
                }
            }
            out.push(r);
        }
    }
}
