//! The site `O(Z)` of opens of a local po-space, ordered by inclusion.
//!
//! Categorical notions specialise to the poset:
//!
//! * a sieve on `M` is a down-closed set of opens contained in `M`;
//! * the pullback of a sieve `S` on `N` along `M ⊆ N` is `{L ⊆ M | L ∈ S}`;
//! * a sieve covers `M` iff the union of its members is `M`. The empty sieve
//!   covers `∅`, so sheaves take a single value there;
//! * a basis assigns to each `M` the open families with union `M`. Families
//!   are normalised to antichains of their maximal members; repeated members
//!   and members contained in others carry no information on a poset.

use std::collections::{HashMap, HashSet};

use fixedbitset::FixedBitSet;
use thiserror::Error;

use crate::dispace::LocalPoSpace;
use crate::finspace::{set_key, PointSet, SpaceError};

pub const DEFAULT_COVER_LIMIT: usize = 200_000;

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum SiteError {
    #[error(transparent)]
    Space(#[from] SpaceError),
    #[error("{0} is not an open of the site")]
    NotOpen(String),
    #[error("{member} is not contained in {target}")]
    NotSubopen { member: String, target: String },
    #[error("basis axiom {axiom} fails: {witness}")]
    BasisAxiomFailure { axiom: &'static str, witness: String },
    #[error("more than {0} covers; refusing to enumerate")]
    TooManyCovers(usize),
}

/// Opens of a base space with precomputed inclusion data. Open indices follow
/// the canonical order, so `0` is `∅` and the last index is the whole space.
#[derive(Debug, Clone)]
pub struct OpenSite {
    base: LocalPoSpace,
    opens: Vec<PointSet>,
    index: HashMap<PointSet, usize>,
    sub: Vec<FixedBitSet>,
    mo_open: Vec<usize>,
}

impl PartialEq for OpenSite {
    fn eq(&self, other: &Self) -> bool {
        self.base == other.base
    }
}

impl Eq for OpenSite {}

impl OpenSite {
    pub fn new(base: LocalPoSpace) -> Result<Self, SiteError> {
        Self::with_limit(base, crate::finspace::DEFAULT_OPEN_LIMIT)
    }

    pub fn with_limit(base: LocalPoSpace, limit: usize) -> Result<Self, SiteError> {
        let opens = base.space().opens_bounded(limit)?;
        let index: HashMap<PointSet, usize> = opens.iter().cloned().enumerate().map(|(i, o)| (o, i)).collect();
        let k = opens.len();
        let sub = opens
            .iter()
            .map(|u| {
                let mut bits = FixedBitSet::with_capacity(k);
                for (j, l) in opens.iter().enumerate() {
                    if l.is_subset(u) {
                        bits.insert(j);
                    }
                }
                bits
            })
            .collect();
        let mo_open = (0..base.len()).map(|x| index[base.space().min_open(x)]).collect();
        Ok(OpenSite { base, opens, index, sub, mo_open })
    }

    pub fn base(&self) -> &LocalPoSpace {
        &self.base
    }

    pub fn len(&self) -> usize {
        self.opens.len()
    }

    pub fn is_empty(&self) -> bool {
        self.opens.is_empty()
    }

    pub fn open(&self, u: usize) -> &PointSet {
        &self.opens[u]
    }

    pub fn opens(&self) -> &[PointSet] {
        &self.opens
    }

    pub fn empty_open(&self) -> usize {
        0
    }

    pub fn top(&self) -> usize {
        self.opens.len() - 1
    }

    pub fn index_of(&self, s: &PointSet) -> Result<usize, SiteError> {
        self.index.get(s).copied().ok_or_else(|| SiteError::NotOpen(self.base.space().format_set(s)))
    }

    pub fn index_of_names<S: AsRef<str>>(&self, names: &[S]) -> Result<usize, SiteError> {
        let s = self.base.space().set_of(names)?;
        self.index_of(&s)
    }

    /// Open index of `min_open(x)`.
    pub fn min_open(&self, x: usize) -> usize {
        self.mo_open[x]
    }

    pub fn contains(&self, u: usize, l: usize) -> bool {
        self.sub[u].contains(l)
    }

    /// Opens contained in `u`, including `∅` and `u`.
    pub fn subopens(&self, u: usize) -> impl Iterator<Item = usize> + '_ {
        self.sub[u].ones()
    }

    pub fn meet(&self, u: usize, v: usize) -> usize {
        self.index[&(&self.opens[u] & &self.opens[v])]
    }

    pub fn join(&self, u: usize, v: usize) -> usize {
        self.index[&(&self.opens[u] | &self.opens[v])]
    }

    pub fn name(&self, u: usize) -> String {
        self.base.space().format_set(&self.opens[u])
    }

    /// The open `u` as a local po-space with inherited structure, and the
    /// base index of each of its points.
    pub fn lps_at(&self, u: usize) -> (LocalPoSpace, Vec<usize>) {
        self.base.restrict(&self.opens[u])
    }

    fn union_of(&self, family: &[usize]) -> PointSet {
        let mut acc = self.base.space().empty_set();
        for &m in family {
            acc.union_with(&self.opens[m]);
        }
        acc
    }

    /// Members `⊆ target` and union `= target`.
    pub fn is_cover(&self, target: usize, family: &[usize]) -> bool {
        family.iter().all(|&m| self.contains(target, m)) && self.union_of(family) == self.opens[target]
    }

    /// Maximal members, sorted, duplicates removed.
    pub fn normalize_family(&self, family: &[usize]) -> Vec<usize> {
        let mut out: Vec<usize> = family
            .iter()
            .copied()
            .filter(|&m| !family.iter().any(|&o| o != m && self.contains(o, m)))
            .collect();
        out.sort_unstable();
        out.dedup();
        out
    }

    pub fn sieve_generated(&self, target: usize, family: &[usize]) -> Result<Sieve, SiteError> {
        let mut members = FixedBitSet::with_capacity(self.len());
        for &m in family {
            if !self.contains(target, m) {
                return Err(SiteError::NotSubopen { member: self.name(m), target: self.name(target) });
            }
            members.union_with(&self.sub[m]);
        }
        Ok(Sieve { target, members })
    }

    pub fn maximal_sieve(&self, target: usize) -> Sieve {
        Sieve { target, members: self.sub[target].clone() }
    }

    /// The smallest covering sieve on `u`: generated by the minimal opens of
    /// its points. Every covering sieve on `u` contains it.
    pub fn minimal_covering_sieve(&self, u: usize) -> Sieve {
        let family: Vec<usize> = self.opens[u].ones().map(|x| self.mo_open[x]).collect();
        self.sieve_generated(u, &family).expect("minimal opens lie inside u")
    }

    /// `f*(S)` for the inclusion `m ⊆ S.target`.
    pub fn pullback_sieve(&self, s: &Sieve, m: usize) -> Result<Sieve, SiteError> {
        if !self.contains(s.target, m) {
            return Err(SiteError::NotSubopen { member: self.name(m), target: self.name(s.target) });
        }
        let mut members = s.members.clone();
        members.intersect_with(&self.sub[m]);
        Ok(Sieve { target: m, members })
    }

    pub fn is_covering(&self, s: &Sieve) -> bool {
        let members: Vec<usize> = s.members.ones().collect();
        self.union_of(&members) == self.opens[s.target]
    }

    /// Is the member set down-closed inside the target?
    pub fn is_sieve(&self, s: &Sieve) -> bool {
        s.members.ones().all(|m| self.contains(s.target, m) && self.sub[m].is_subset(&s.members))
    }

    /// All sieves on `u` (down-closed subsets of its subopens).
    pub fn sieves(&self, u: usize) -> Vec<Sieve> {
        let subs: Vec<usize> = self.sub[u].ones().collect();
        let mut out = Vec::new();
        let mut members = FixedBitSet::with_capacity(self.len());
        self.down_sets(&subs, subs.len(), &mut members, &mut out, u);
        out.sort();
        out
    }

    // Decide membership from the largest open downwards, so each open is
    // decided after everything above it.
    fn down_sets(&self, subs: &[usize], k: usize, members: &mut FixedBitSet, out: &mut Vec<Sieve>, u: usize) {
        if k == 0 {
            out.push(Sieve { target: u, members: members.clone() });
            return;
        }
        let l = subs[k - 1];
        // forced in if some chosen member contains it
        let forced = members.ones().any(|m| self.contains(m, l));
        if forced {
            members.insert(l);
            self.down_sets(subs, k - 1, members, out, u);
            members.set(l, false);
        } else {
            self.down_sets(subs, k - 1, members, out, u);
            members.insert(l);
            self.down_sets(subs, k - 1, members, out, u);
            members.set(l, false);
        }
    }

    /// Covering sieves on `u`: the sieves containing the minimal covering sieve.
    pub fn covering_sieves(&self, u: usize) -> Vec<Sieve> {
        let min = self.minimal_covering_sieve(u);
        self.sieves(u).into_iter().filter(|s| min.members.is_subset(&s.members)).collect()
    }

    /// Antichain covers of `u`, in canonical order, failing past `limit`.
    pub fn covers(&self, u: usize, limit: usize) -> Result<Vec<Vec<usize>>, SiteError> {
        if self.opens[u].count_ones(..) == 0 {
            return Ok(vec![vec![], vec![u]]);
        }
        let subs: Vec<usize> = self.sub[u].ones().filter(|&l| l != self.empty_open()).collect();
        // suffix unions for pruning
        let mut suffix = vec![self.base.space().empty_set(); subs.len() + 1];
        for i in (0..subs.len()).rev() {
            suffix[i] = &suffix[i + 1] | &self.opens[subs[i]];
        }
        let mut out = Vec::new();
        let mut chosen = Vec::new();
        self.antichains(u, &subs, &suffix, 0, &mut chosen, &self.base.space().empty_set(), &mut out, limit)?;
        out.sort();
        Ok(out)
    }

    #[allow(clippy::too_many_arguments)]
    fn antichains(
        &self,
        u: usize,
        subs: &[usize],
        suffix: &[PointSet],
        i: usize,
        chosen: &mut Vec<usize>,
        covered: &PointSet,
        out: &mut Vec<Vec<usize>>,
        limit: usize,
    ) -> Result<(), SiteError> {
        if *covered == self.opens[u] && i == subs.len() {
            out.push(chosen.clone());
            if out.len() > limit {
                return Err(SiteError::TooManyCovers(limit));
            }
            return Ok(());
        }
        if i == subs.len() || !(covered | &suffix[i]).eq(&self.opens[u]) {
            return Ok(());
        }
        let l = subs[i];
        self.antichains(u, subs, suffix, i + 1, chosen, covered, out, limit)?;
        if chosen.iter().all(|&c| !self.contains(c, l) && !self.contains(l, c)) {
            chosen.push(l);
            let next = covered | &self.opens[l];
            self.antichains(u, subs, suffix, i + 1, chosen, &next, out, limit)?;
            chosen.pop();
        }
        Ok(())
    }
}

/// A down-closed set of opens inside `target` (indices into the site).
#[derive(Debug, Clone, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct Sieve {
    pub target: usize,
    pub members: FixedBitSet,
}

impl Sieve {
    pub fn members(&self) -> Vec<usize> {
        self.members.ones().collect()
    }

    pub fn contains(&self, l: usize) -> bool {
        self.members.contains(l)
    }

    /// Sorted list of member names.
    pub fn describe(&self, site: &OpenSite) -> Vec<String> {
        let mut m: Vec<usize> = self.members();
        m.sort_by_key(|&i| set_key(site.open(i)));
        m.into_iter().map(|i| site.name(i)).collect()
    }
}

/// `K(M)` for every open `M`, as antichain families.
#[derive(Debug, Clone)]
pub struct CoverBasis {
    pub covers: Vec<Vec<Vec<usize>>>,
}

impl CoverBasis {
    pub fn contains(&self, site: &OpenSite, target: usize, family: &[usize]) -> bool {
        site.is_cover(target, family)
            && self.covers[target].binary_search(&site.normalize_family(family)).is_ok()
    }
}

/// Builds the cover basis and checks the three basis axioms:
/// `{M} ∈ K(M)`, stability under intersection with a smaller open, and
/// composition of covers (each member replaced by one of its covers; all
/// simultaneous replacements are checked when there are at most 10 000).
pub fn validate_basis(site: &OpenSite, limit: usize) -> Result<CoverBasis, SiteError> {
    let mut covers = Vec::with_capacity(site.len());
    let mut total = 0;
    for u in 0..site.len() {
        let c = site.covers(u, limit)?;
        total += c.len();
        if total > limit {
            return Err(SiteError::TooManyCovers(limit));
        }
        covers.push(c);
    }
    let basis = CoverBasis { covers };
    let lookup: Vec<HashSet<Vec<usize>>> = basis.covers.iter().map(|k| k.iter().cloned().collect()).collect();
    let fam = |f: &[usize]| f.iter().map(|&m| site.name(m)).collect::<Vec<_>>().join(" ");
    for m in 0..site.len() {
        let maximal = vec![m];
        if !lookup[m].contains(&maximal) {
            return Err(SiteError::BasisAxiomFailure { axiom: "(i)", witness: site.name(m) });
        }
        for f in &basis.covers[m] {
            for n in site.subopens(m) {
                let pulled: Vec<usize> = f.iter().map(|&u| site.meet(u, n)).collect();
                let norm = site.normalize_family(&pulled);
                let norm = drop_empty(site, n, norm);
                if !lookup[n].contains(&norm) {
                    return Err(SiteError::BasisAxiomFailure {
                        axiom: "(ii)",
                        witness: format!("[{}] pulled back to {}", fam(f), site.name(n)),
                    });
                }
            }
            // composition, one member at a time
            for (pos, &u) in f.iter().enumerate() {
                for g in &basis.covers[u] {
                    let mut comp: Vec<usize> = f.iter().enumerate().filter(|&(p, _)| p != pos).map(|(_, &v)| v).collect();
                    comp.extend(g);
                    let norm = drop_empty(site, m, site.normalize_family(&comp));
                    if !lookup[m].contains(&norm) {
                        return Err(SiteError::BasisAxiomFailure {
                            axiom: "(iii)",
                            witness: format!("[{}] refined at {} by [{}]", fam(f), site.name(u), fam(g)),
                        });
                    }
                }
            }
            let combos: usize = f.iter().map(|&u| basis.covers[u].len()).product();
            if combos <= 10_000 {
                let parts: Vec<Vec<usize>> = f.iter().map(|&u| (0..basis.covers[u].len()).collect()).collect();
                for choice in crate::finspace::cartesian(&parts) {
                    let comp: Vec<usize> =
                        f.iter().zip(&choice).flat_map(|(&u, &c)| basis.covers[u][c].iter().copied()).collect();
                    let norm = drop_empty(site, m, site.normalize_family(&comp));
                    if !lookup[m].contains(&norm) {
                        return Err(SiteError::BasisAxiomFailure { axiom: "(iii)", witness: fam(f) });
                    }
                }
            }
        }
    }
    Ok(basis)
}

// On a nonempty target, empty members are dropped; on the empty target the
// family stays as is (`[]` and `[∅]` are both covers).
fn drop_empty(site: &OpenSite, target: usize, fam: Vec<usize>) -> Vec<usize> {
    if site.open(target).count_ones(..) == 0 {
        fam
    } else {
        fam.into_iter().filter(|&m| m != site.empty_open()).collect()
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::fixtures::{circle, d2, point};

    #[test]
    fn d2_sieves() {
        let site = OpenSite::new(d2()).unwrap();
        let top = site.top();
        let a = site.index_of_names(&["-1"]).unwrap();
        let b = site.index_of_names(&["1"]).unwrap();
        let s = site.sieve_generated(top, &[a, b]).unwrap();
        assert_eq!(s.describe(&site), vec!["{}", "{-1}", "{1}"]);
        assert!(site.is_covering(&s));
        assert_eq!(site.maximal_sieve(top).members().len(), 4);
        assert!(site.sieve_generated(top, &[]).unwrap().members().is_empty());
        let only_a = site.sieve_generated(top, &[a]).unwrap();
        let pulled = site.pullback_sieve(&only_a, b).unwrap();
        assert_eq!(pulled.describe(&site), vec!["{}"]);
        assert!(!site.is_covering(&pulled));
        assert_eq!(site.pullback_sieve(&s, top).unwrap(), s);
        assert!(matches!(site.sieve_generated(a, &[b]), Err(SiteError::NotSubopen { .. })));
    }

    #[test]
    fn circle_covers() {
        let c = circle();
        let site = OpenSite::new(c.clone()).unwrap();
        let edges: Vec<usize> =
            (0..3).map(|i| site.min_open(c.space().index_of(&format!("e{i}")).unwrap())).collect();
        let s = site.sieve_generated(site.top(), &edges).unwrap();
        assert!(site.is_covering(&s));
        let v0 = site.min_open(c.space().index_of("v0").unwrap());
        let partial = site.sieve_generated(site.top(), &[v0, edges[0]]).unwrap();
        assert!(!site.is_covering(&partial));
        let basis = validate_basis(&site, DEFAULT_COVER_LIMIT).unwrap();
        assert!(basis.contains(&site, site.top(), &edges));
        let pulled: Vec<usize> = edges.iter().map(|&e| site.meet(e, edges[0])).collect();
        assert!(site.is_cover(edges[0], &pulled));
    }

    #[test]
    fn point_basis() {
        let site = OpenSite::new(point()).unwrap();
        let basis = validate_basis(&site, 100).unwrap();
        assert_eq!(basis.covers[site.top()], vec![vec![site.top()]]);
        assert!(basis.contains(&site, site.top(), &[site.top(), site.top(), 0]));
        assert_eq!(site.sieves(site.top()).len(), 3);
    }

    #[test]
    fn d2_basis_contains_singletons() {
        let site = OpenSite::new(d2()).unwrap();
        let basis = validate_basis(&site, 100).unwrap();
        let fam = vec![site.index_of_names(&["-1"]).unwrap(), site.index_of_names(&["1"]).unwrap()];
        assert!(basis.contains(&site, site.top(), &fam));
        for s in site.sieves(site.top()) {
            let gens = s.members();
            assert_eq!(site.is_covering(&s), site.is_cover(site.top(), &gens));
        }
    }
}
