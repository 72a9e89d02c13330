//! Finite topological spaces and continuous maps.
//!
//! A finite space is Alexandrov: arbitrary intersections of opens are open, so
//! every point `x` has a smallest open neighbourhood `min_open(x)`. The whole
//! topology is recovered from that table (the opens are exactly the up-sets of
//! the specialization preorder), which is what [`FinSpace`] stores. The full
//! open family is enumerated on demand by [`FinSpace::opens`].

use std::collections::{BTreeSet, HashMap, HashSet};
use std::fmt;

use fixedbitset::FixedBitSet;
use thiserror::Error;

/// A subset of the points of a space, as a bitset over dense point indices.
pub type PointSet = FixedBitSet;

/// Upper bound on the number of opens [`FinSpace::opens`] will enumerate.
pub const DEFAULT_OPEN_LIMIT: usize = 1 << 16;

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum SpaceError {
    #[error("duplicate point `{0}`")]
    DuplicatePoint(String),
    #[error("unknown point `{0}`")]
    UnknownPoint(String),
    #[error("open family must contain the empty set and the full point set {0}")]
    MissingEmptyOrTotal(String),
    #[error("opens not closed under union: {0} ∪ {1} = {2} is not open")]
    NotClosedUnderUnion(String, String, String),
    #[error("opens not closed under intersection: {0} ∩ {1} = {2} is not open")]
    NotClosedUnderIntersection(String, String, String),
    #[error("minimal open of `{point}` is not a valid neighbourhood basis: {detail}")]
    BadMinimalOpen { point: String, detail: String },
    #[error("subset {0} is not open")]
    NotOpen(String),
    #[error("map is not continuous: preimage of {0} is not open")]
    NotContinuous(String),
    #[error("map has {got} entries but the source has {expected} points")]
    MapArity { expected: usize, got: usize },
    #[error("more than {0} opens; refusing to enumerate")]
    TooManyOpens(usize),
}

pub fn empty_set(n: usize) -> PointSet {
    FixedBitSet::with_capacity(n)
}

pub fn full_set(n: usize) -> PointSet {
    let mut s = FixedBitSet::with_capacity(n);
    s.insert_range(..);
    s
}

pub fn singleton(n: usize, i: usize) -> PointSet {
    let mut s = FixedBitSet::with_capacity(n);
    s.insert(i);
    s
}

pub fn set_from<I: IntoIterator<Item = usize>>(n: usize, it: I) -> PointSet {
    let mut s = FixedBitSet::with_capacity(n);
    for i in it {
        s.insert(i);
    }
    s
}

/// Canonical sort key: smaller sets first, then by member indices.
pub fn set_key(s: &PointSet) -> (usize, Vec<usize>) {
    (s.count_ones(..), s.ones().collect())
}

/// A finite topological space.
#[derive(Clone)]
pub struct FinSpace {
    names: Vec<String>,
    index: HashMap<String, usize>,
    min_opens: Vec<PointSet>,
}

impl PartialEq for FinSpace {
    fn eq(&self, other: &Self) -> bool {
        self.names == other.names && self.min_opens == other.min_opens
    }
}

impl Eq for FinSpace {}

impl std::hash::Hash for FinSpace {
    fn hash<H: std::hash::Hasher>(&self, state: &mut H) {
        self.names.hash(state);
        self.min_opens.hash(state);
    }
}

impl fmt::Debug for FinSpace {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let mut m = f.debug_map();
        for (i, n) in self.names.iter().enumerate() {
            m.entry(n, &self.format_set(&self.min_opens[i]));
        }
        m.finish()
    }
}

fn index_names(names: &[String]) -> Result<HashMap<String, usize>, SpaceError> {
    let mut index = HashMap::with_capacity(names.len());
    for (i, n) in names.iter().enumerate() {
        if index.insert(n.clone(), i).is_some() {
            return Err(SpaceError::DuplicatePoint(n.clone()));
        }
    }
    Ok(index)
}

impl FinSpace {
    /// Validates an explicit open family and builds the space.
    ///
    /// Closure is checked pairwise; the first failing pair is reported with
    /// both members and the offending union or intersection.
    pub fn validate<S: AsRef<str>>(points: &[S], opens: &[Vec<S>]) -> Result<Self, SpaceError> {
        let names: Vec<String> = points.iter().map(|p| p.as_ref().to_string()).collect();
        let index = index_names(&names)?;
        let n = names.len();
        let mut family: Vec<PointSet> = Vec::with_capacity(opens.len());
        for o in opens {
            let mut s = empty_set(n);
            for p in o {
                let i = *index
                    .get(p.as_ref())
                    .ok_or_else(|| SpaceError::UnknownPoint(p.as_ref().to_string()))?;
                s.insert(i);
            }
            family.push(s);
        }
        let members: HashSet<PointSet> = family.iter().cloned().collect();
        let proto = FinSpace { names, index, min_opens: Vec::new() };
        if !members.contains(&empty_set(n)) || !members.contains(&full_set(n)) {
            return Err(SpaceError::MissingEmptyOrTotal(proto.format_set(&full_set(n))));
        }
        let mut distinct: Vec<PointSet> = members.into_iter().collect();
        distinct.sort_by_key(set_key);
        for (a_i, a) in distinct.iter().enumerate() {
            for b in &distinct[a_i + 1..] {
                let u = a | b;
                let mut found = false;
                if distinct.binary_search_by_key(&set_key(&u), set_key).is_ok() {
                    found = true;
                }
                if !found {
                    return Err(SpaceError::NotClosedUnderUnion(
                        proto.format_set(a),
                        proto.format_set(b),
                        proto.format_set(&u),
                    ));
                }
                let m = a & b;
                if distinct.binary_search_by_key(&set_key(&m), set_key).is_err() {
                    return Err(SpaceError::NotClosedUnderIntersection(
                        proto.format_set(a),
                        proto.format_set(b),
                        proto.format_set(&m),
                    ));
                }
            }
        }
        let min_opens = (0..n)
            .map(|x| {
                let mut acc = full_set(n);
                for o in distinct.iter().filter(|o| o.contains(x)) {
                    acc.intersect_with(o);
                }
                acc
            })
            .collect();
        Ok(FinSpace { min_opens, ..proto })
    }

    /// Builds a space from its minimal-open table.
    ///
    /// Requires `x ∈ min_open(x)` and `y ∈ min_open(x) ⟹ min_open(y) ⊆ min_open(x)`.
    pub fn from_min_opens(names: Vec<String>, min_opens: Vec<PointSet>) -> Result<Self, SpaceError> {
        let index = index_names(&names)?;
        let n = names.len();
        if min_opens.len() != n {
            return Err(SpaceError::MapArity { expected: n, got: min_opens.len() });
        }
        let mut min_opens = min_opens;
        for m in &mut min_opens {
            m.grow(n);
        }
        let space = FinSpace { names, index, min_opens };
        for x in 0..n {
            let mo = &space.min_opens[x];
            if mo.len() != n {
                return Err(SpaceError::BadMinimalOpen {
                    point: space.names[x].clone(),
                    detail: "set refers to points outside the space".into(),
                });
            }
            if !mo.contains(x) {
                return Err(SpaceError::BadMinimalOpen {
                    point: space.names[x].clone(),
                    detail: format!("{} does not contain the point", space.format_set(mo)),
                });
            }
            for y in mo.ones() {
                if !space.min_opens[y].is_subset(mo) {
                    return Err(SpaceError::BadMinimalOpen {
                        point: space.names[x].clone(),
                        detail: format!(
                            "contains `{}` but not its minimal open {}",
                            space.names[y],
                            space.format_set(&space.min_opens[y])
                        ),
                    });
                }
            }
        }
        Ok(space)
    }

    /// The topology whose opens are the up-sets of a preorder given as `le[x] = {y | x ≤ y}`.
    pub fn from_specialization(names: Vec<String>, le: &[PointSet]) -> Result<Self, SpaceError> {
        let n = names.len();
        // reflexive-transitive closure
        let mut up: Vec<PointSet> = le.to_vec();
        for (x, u) in up.iter_mut().enumerate() {
            u.grow(n);
            u.insert(x);
        }
        loop {
            let mut changed = false;
            for x in 0..n {
                let mut acc = up[x].clone();
                for y in up[x].ones() {
                    acc.union_with(&up[y]);
                }
                if acc != up[x] {
                    up[x] = acc;
                    changed = true;
                }
            }
            if !changed {
                break;
            }
        }
        FinSpace::from_min_opens(names, up)
    }

    pub fn discrete<S: AsRef<str>>(points: &[S]) -> Self {
        let names: Vec<String> = points.iter().map(|p| p.as_ref().to_string()).collect();
        let n = names.len();
        let mos = (0..n).map(|i| singleton(n, i)).collect();
        FinSpace::from_min_opens(names, mos).expect("discrete space is valid")
    }

    /// The space with no points.
    pub fn empty() -> Self {
        FinSpace { names: Vec::new(), index: HashMap::new(), min_opens: Vec::new() }
    }

    pub fn len(&self) -> usize {
        self.names.len()
    }

    pub fn is_empty(&self) -> bool {
        self.names.is_empty()
    }

    pub fn names(&self) -> &[String] {
        &self.names
    }

    pub fn name(&self, i: usize) -> &str {
        &self.names[i]
    }

    pub fn index_of(&self, name: &str) -> Result<usize, SpaceError> {
        self.index.get(name).copied().ok_or_else(|| SpaceError::UnknownPoint(name.to_string()))
    }

    pub fn set_of<S: AsRef<str>>(&self, names: &[S]) -> Result<PointSet, SpaceError> {
        let mut s = empty_set(self.len());
        for p in names {
            s.insert(self.index_of(p.as_ref())?);
        }
        Ok(s)
    }

    pub fn full(&self) -> PointSet {
        full_set(self.len())
    }

    pub fn empty_set(&self) -> PointSet {
        empty_set(self.len())
    }

    /// Smallest open containing `x`.
    pub fn min_open(&self, x: usize) -> &PointSet {
        &self.min_opens[x]
    }

    pub fn min_open_of(&self, name: &str) -> Result<&PointSet, SpaceError> {
        Ok(&self.min_opens[self.index_of(name)?])
    }

    pub fn min_opens(&self) -> &[PointSet] {
        &self.min_opens
    }

    /// Specialization preorder: `x ⊑ y` iff `y ∈ min_open(x)`.
    pub fn specializes(&self, x: usize, y: usize) -> bool {
        self.min_opens[x].contains(y)
    }

    /// All pairs of the specialization preorder, sorted.
    pub fn specialization(&self) -> Vec<(usize, usize)> {
        let mut out = Vec::new();
        for x in 0..self.len() {
            for y in self.min_opens[x].ones() {
                out.push((x, y));
            }
        }
        out
    }

    pub fn is_open(&self, s: &PointSet) -> bool {
        s.ones().all(|x| self.min_opens[x].is_subset(s))
    }

    pub fn is_closed(&self, s: &PointSet) -> bool {
        let mut c = self.full();
        c.difference_with(s);
        self.is_open(&c)
    }

    /// Largest open contained in `s`.
    pub fn interior(&self, s: &PointSet) -> PointSet {
        set_from(self.len(), s.ones().filter(|&x| self.min_opens[x].is_subset(s)))
    }

    /// Smallest open containing `s`.
    pub fn open_hull(&self, s: &PointSet) -> PointSet {
        let mut acc = self.empty_set();
        for x in s.ones() {
            acc.union_with(&self.min_opens[x]);
        }
        acc
    }

    /// True iff every member is open and the members' union is the whole space.
    pub fn open_cover_check(&self, family: &[PointSet]) -> bool {
        let mut u = self.empty_set();
        for m in family {
            if !self.is_open(m) {
                return false;
            }
            u.union_with(m);
        }
        u == self.full()
    }

    /// Every open of the space, in canonical order (by size, then members).
    pub fn opens(&self) -> Vec<PointSet> {
        self.opens_bounded(DEFAULT_OPEN_LIMIT).expect("open family exceeds DEFAULT_OPEN_LIMIT")
    }

    pub fn opens_bounded(&self, limit: usize) -> Result<Vec<PointSet>, SpaceError> {
        let n = self.len();
        let mut seen: HashSet<PointSet> = HashSet::new();
        let mut frontier = vec![empty_set(n)];
        seen.insert(empty_set(n));
        while let Some(o) = frontier.pop() {
            for x in 0..n {
                if o.contains(x) {
                    continue;
                }
                let u = &o | &self.min_opens[x];
                if seen.insert(u.clone()) {
                    if seen.len() > limit {
                        return Err(SpaceError::TooManyOpens(limit));
                    }
                    frontier.push(u);
                }
            }
        }
        let mut out: Vec<PointSet> = seen.into_iter().collect();
        out.sort_by_key(set_key);
        Ok(out)
    }

    /// Product topology; the pair `(i, j)` has index `i * other.len() + j`.
    pub fn product(&self, other: &FinSpace) -> FinSpace {
        FinSpace::product_all(&[self, other])
    }

    /// n-ary product with lexicographic indexing (last factor fastest) and
    /// point names `(x,y,…)`.
    pub fn product_all(factors: &[&FinSpace]) -> FinSpace {
        let dims: Vec<usize> = factors.iter().map(|f| f.len()).collect();
        let total: usize = dims.iter().product();
        let mut names = Vec::with_capacity(total);
        let mut mos = Vec::with_capacity(total);
        for idx in 0..total {
            let coords = decode(idx, &dims);
            let label: Vec<&str> =
                coords.iter().zip(factors).map(|(&c, f)| f.name(c)).collect();
            names.push(format!("({})", label.join(",")));
            let mut mo = empty_set(total);
            let parts: Vec<Vec<usize>> = coords
                .iter()
                .zip(factors)
                .map(|(&c, f)| f.min_open(c).ones().collect())
                .collect();
            for combo in cartesian(&parts) {
                mo.insert(encode(&combo, &dims));
            }
            mos.push(mo);
        }
        FinSpace::from_min_opens(names, mos).expect("product of valid spaces is valid")
    }

    /// Subspace topology on `carrier`.
    pub fn subspace(&self, carrier: &PointSet) -> Subspace {
        let parent_index: Vec<usize> = carrier.ones().collect();
        let mut local = vec![usize::MAX; self.len()];
        for (k, &p) in parent_index.iter().enumerate() {
            local[p] = k;
        }
        let m = parent_index.len();
        let names = parent_index.iter().map(|&p| self.names[p].clone()).collect();
        let mos = parent_index
            .iter()
            .map(|&p| set_from(m, self.min_opens[p].ones().filter(|&q| carrier.contains(q)).map(|q| local[q])))
            .collect();
        let space = FinSpace::from_min_opens(names, mos).expect("subspace of a valid space is valid");
        Subspace { space, parent_index }
    }

    pub fn format_set(&self, s: &PointSet) -> String {
        let parts: Vec<&str> = s.ones().filter(|&i| i < self.len()).map(|i| self.names[i].as_str()).collect();
        format!("{{{}}}", parts.join(","))
    }

    pub fn set_names(&self, s: &PointSet) -> Vec<String> {
        s.ones().map(|i| self.names[i].clone()).collect()
    }
}

pub fn decode(mut idx: usize, dims: &[usize]) -> Vec<usize> {
    let mut out = vec![0; dims.len()];
    for k in (0..dims.len()).rev() {
        out[k] = idx % dims[k];
        idx /= dims[k];
    }
    out
}

pub fn encode(coords: &[usize], dims: &[usize]) -> usize {
    coords.iter().zip(dims).fold(0, |acc, (&c, &d)| acc * d + c)
}

pub(crate) fn cartesian(parts: &[Vec<usize>]) -> Vec<Vec<usize>> {
    let mut acc: Vec<Vec<usize>> = vec![Vec::new()];
    for p in parts {
        let mut next = Vec::with_capacity(acc.len() * p.len());
        for prefix in &acc {
            for &x in p {
                let mut v = prefix.clone();
                v.push(x);
                next.push(v);
            }
        }
        acc = next;
    }
    acc
}

/// A subset with the subspace topology, remembering where its points came from.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Subspace {
    pub space: FinSpace,
    /// `parent_index[k]` is the parent index of local point `k`.
    pub parent_index: Vec<usize>,
}

impl Subspace {
    pub fn inclusion(&self, parent: &FinSpace) -> CtsMap {
        CtsMap::new(self.space.clone(), parent.clone(), self.parent_index.clone())
            .expect("subspace inclusion is continuous")
    }

    pub fn local_index(&self, parent_point: usize) -> Option<usize> {
        self.parent_index.iter().position(|&p| p == parent_point)
    }
}

/// A continuous map between finite spaces.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct CtsMap {
    pub source: FinSpace,
    pub target: FinSpace,
    pub map: Vec<usize>,
}

/// Continuity via minimal opens: `f(min_open(x)) ⊆ min_open(f(x))` for every `x`.
pub fn is_continuous(source: &FinSpace, target: &FinSpace, map: &[usize]) -> bool {
    map.len() == source.len()
        && (0..source.len()).all(|x| {
            let fx = map[x];
            source.min_open(x).ones().all(|y| target.min_open(fx).contains(map[y]))
        })
}

impl CtsMap {
    pub fn new(source: FinSpace, target: FinSpace, map: Vec<usize>) -> Result<Self, SpaceError> {
        if map.len() != source.len() {
            return Err(SpaceError::MapArity { expected: source.len(), got: map.len() });
        }
        if let Some(&bad) = map.iter().find(|&&y| y >= target.len()) {
            return Err(SpaceError::UnknownPoint(format!("#{bad}")));
        }
        for x in 0..source.len() {
            let fx = map[x];
            if !source.min_open(x).ones().all(|y| target.min_open(fx).contains(map[y])) {
                return Err(SpaceError::NotContinuous(target.format_set(target.min_open(fx))));
            }
        }
        Ok(CtsMap { source, target, map })
    }

    pub fn identity(space: &FinSpace) -> Self {
        CtsMap { source: space.clone(), target: space.clone(), map: (0..space.len()).collect() }
    }

    pub fn preimage(&self, s: &PointSet) -> PointSet {
        set_from(self.source.len(), (0..self.source.len()).filter(|&x| s.contains(self.map[x])))
    }

    pub fn image(&self, s: &PointSet) -> PointSet {
        set_from(self.target.len(), s.ones().map(|x| self.map[x]))
    }

    pub fn compose(&self, after: &CtsMap) -> CtsMap {
        CtsMap {
            source: self.source.clone(),
            target: after.target.clone(),
            map: self.map.iter().map(|&y| after.map[y]).collect(),
        }
    }
}

/// Distinct sets in canonical order.
pub fn canonical_family(family: &[PointSet]) -> Vec<PointSet> {
    let set: BTreeSet<(usize, Vec<usize>)> = family.iter().map(set_key).collect();
    let n = family.first().map(|s| s.len()).unwrap_or(0);
    set.into_iter().map(|(_, v)| set_from(n, v)).collect()
}
