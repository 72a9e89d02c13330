//! Order atlases and local po-spaces over finite spaces.
//!
//! An equivalence class of order atlases is stored in normal form: one partial
//! order per minimal open (the *germ* at that point). The germ atlas refines
//! every atlas of its class, so two atlases are equivalent exactly when their
//! germ families coincide.

mod dimap;
mod oracle;

pub use dimap::{
    chart_pair_monotone, check_dimap, compose, enumerate_dimaps, enumerate_dimaps_among, enumerate_dimaps_with, is_dimap,
    is_iso, Dimap,
};
pub use oracle::{admissible_charts, check_dimap_oracle, DimapOracle};

use thiserror::Error;

use crate::finspace::{set_key, FinSpace, PointSet, SpaceError};
use crate::order::{posets, Relation};

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum DispaceError {
    #[error(transparent)]
    Space(#[from] SpaceError),
    #[error("atlases live on different spaces")]
    DifferentSpace,
    #[error("chart carrier {0} is not open")]
    CarrierNotOpen(String),
    #[error("chart carriers do not cover the space; {0} is missing")]
    NotCover(String),
    #[error("order on {0} is not a partial order of the carrier")]
    NotPartialOrder(String),
    #[error("charts on {0} and {1} disagree on their intersection")]
    Incompatible(String, String),
    #[error("germ at `{0}` must be an order on its minimal open")]
    BadGerm(String),
    #[error("map is not continuous at `{0}`")]
    NotContinuous(String),
    #[error("map is not a dimap")]
    NotDimap,
    #[error("global order search needs at most 6 points, got {0}")]
    TooLarge(usize),
}

/// Result of [`is_pospace_order`].
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum PoVerdict {
    /// Partial order with closed graph in `X × X`.
    Strict,
    /// Partial order whose graph is not closed.
    Relaxed,
    Invalid,
}

/// A partial order on an open carrier. The relation is indexed by the points
/// of the ambient space and only relates carrier points.
#[derive(Clone, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct Chart {
    pub carrier: PointSet,
    pub order: Relation,
}

/// Keeps only the pairs of `r` with both ends in `s`.
pub fn restrict_rel(r: &Relation, s: &PointSet) -> Relation {
    let mut out = Relation::empty(r.size());
    for (a, b) in r.pairs() {
        if s.contains(a) && s.contains(b) {
            out.set(a, b);
        }
    }
    out
}

/// True when `r` is a partial order of `s` and relates nothing outside it.
pub fn is_order_on(r: &Relation, s: &PointSet) -> bool {
    r.pairs().iter().all(|&(a, b)| s.contains(a) && s.contains(b))
        && s.ones().all(|x| r.le(x, x))
        && r.is_antisymmetric()
        && r.is_transitive()
}

impl Chart {
    pub fn new(carrier: PointSet, order: Relation) -> Self {
        Chart { carrier, order }
    }

    pub fn restrict(&self, s: &PointSet) -> Chart {
        let carrier = &self.carrier & s;
        let order = restrict_rel(&self.order, &carrier);
        Chart { carrier, order }
    }

    /// Orders agree on the intersection of the carriers.
    pub fn compatible(&self, other: &Chart) -> bool {
        let common = &self.carrier & &other.carrier;
        restrict_rel(&self.order, &common) == restrict_rel(&other.order, &common)
    }

    fn sort_key(&self) -> ((usize, Vec<usize>), Vec<(usize, usize)>) {
        (set_key(&self.carrier), self.order.pairs())
    }
}

/// An open cover by pairwise compatible charts.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct OrderAtlas {
    pub space: FinSpace,
    pub charts: Vec<Chart>,
}

impl OrderAtlas {
    /// Validates the atlas and sorts its charts by (carrier, order).
    pub fn new(space: FinSpace, charts: Vec<Chart>) -> Result<Self, DispaceError> {
        let mut covered = space.empty_set();
        for c in &charts {
            if c.carrier.len() != space.len() || !space.is_open(&c.carrier) {
                return Err(DispaceError::CarrierNotOpen(space.format_set(&c.carrier)));
            }
            if c.order.size() != space.len() || !is_order_on(&c.order, &c.carrier) {
                return Err(DispaceError::NotPartialOrder(space.format_set(&c.carrier)));
            }
            covered.union_with(&c.carrier);
        }
        if covered != space.full() {
            let mut missing = space.full();
            missing.difference_with(&covered);
            return Err(DispaceError::NotCover(space.format_set(&missing)));
        }
        for (i, a) in charts.iter().enumerate() {
            for b in &charts[i + 1..] {
                if !a.compatible(b) {
                    return Err(DispaceError::Incompatible(
                        space.format_set(&a.carrier),
                        space.format_set(&b.carrier),
                    ));
                }
            }
        }
        let mut charts = charts;
        charts.sort_by_key(Chart::sort_key);
        charts.dedup();
        Ok(OrderAtlas { space, charts })
    }

    /// Atlas with a single chart on the whole space.
    pub fn global(space: FinSpace, order: Relation) -> Result<Self, DispaceError> {
        let full = space.full();
        OrderAtlas::new(space, vec![Chart::new(full, order)])
    }

    /// The paper's refinement relation: every chart point of `self` sits in a
    /// chart of `finer` contained in that chart and carrying the same order.
    pub fn is_refined_by(&self, finer: &OrderAtlas) -> bool {
        self.charts.iter().all(|u| {
            u.carrier.ones().all(|x| {
                finer.charts.iter().any(|w| {
                    w.carrier.contains(x)
                        && w.carrier.is_subset(&u.carrier)
                        && restrict_rel(&u.order, &w.carrier) == w.order
                })
            })
        })
    }
}

/// A finite space with a germ family: `germs[x]` is a partial order on
/// `min_open(x)`, and any two germs agree where their carriers overlap.
#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub struct LocalPoSpace {
    space: FinSpace,
    germs: Vec<Relation>,
}

impl LocalPoSpace {
    pub fn from_germs(space: FinSpace, germs: Vec<Relation>) -> Result<Self, DispaceError> {
        if germs.len() != space.len() {
            return Err(SpaceError::MapArity { expected: space.len(), got: germs.len() }.into());
        }
        for (x, g) in germs.iter().enumerate() {
            if g.size() != space.len() || !is_order_on(g, space.min_open(x)) {
                return Err(DispaceError::BadGerm(space.name(x).to_string()));
            }
        }
        let lps = LocalPoSpace { space, germs };
        for x in 0..lps.len() {
            for y in x + 1..lps.len() {
                if !lps.germ_chart(x).compatible(&lps.germ_chart(y)) {
                    return Err(DispaceError::Incompatible(
                        lps.space.format_set(lps.space.min_open(x)),
                        lps.space.format_set(lps.space.min_open(y)),
                    ));
                }
            }
        }
        Ok(lps)
    }

    /// Like [`from_germs`](Self::from_germs) but skips the pairwise check.
    /// Only for germ families produced by restricting a valid family.
    pub(crate) fn from_germs_unchecked(space: FinSpace, germs: Vec<Relation>) -> Self {
        LocalPoSpace { space, germs }
    }

    /// Germs from string pairs; points with no entry get the equality order.
    pub fn from_named_germs<S: AsRef<str>>(
        space: FinSpace,
        germs: &[(S, Vec<(S, S)>)],
    ) -> Result<Self, DispaceError> {
        let n = space.len();
        let mut rels: Vec<Relation> = (0..n).map(|x| trivial_on(n, space.min_open(x))).collect();
        for (p, pairs) in germs {
            let x = space.index_of(p.as_ref())?;
            let mut r = trivial_on(n, space.min_open(x));
            for (a, b) in pairs {
                r.set(space.index_of(a.as_ref())?, space.index_of(b.as_ref())?);
            }
            r.close();
            rels[x] = r;
        }
        LocalPoSpace::from_germs(space, rels)
    }

    pub fn space(&self) -> &FinSpace {
        &self.space
    }

    pub fn len(&self) -> usize {
        self.space.len()
    }

    pub fn is_empty(&self) -> bool {
        self.space.is_empty()
    }

    pub fn germ(&self, x: usize) -> &Relation {
        &self.germs[x]
    }

    pub fn germs(&self) -> &[Relation] {
        &self.germs
    }

    pub fn germ_chart(&self, x: usize) -> Chart {
        Chart::new(self.space.min_open(x).clone(), self.germs[x].clone())
    }

    /// The minimal-open atlas of this class.
    pub fn atlas(&self) -> OrderAtlas {
        let charts = (0..self.len()).map(|x| self.germ_chart(x)).collect();
        OrderAtlas::new(self.space.clone(), charts).expect("germ atlas is valid")
    }

    /// `x ≤ y` in the germ at `z`.
    pub fn le_at(&self, z: usize, x: usize, y: usize) -> bool {
        self.germs[z].le(x, y)
    }

    /// Inherited structure on an arbitrary subset; returns the subspace and
    /// the parent index of each of its points.
    pub fn restrict(&self, carrier: &PointSet) -> (LocalPoSpace, Vec<usize>) {
        let sub = self.space.subspace(carrier);
        let germs = sub
            .parent_index
            .iter()
            .enumerate()
            .map(|(k, &p)| restrict_rel(&self.germs[p].restrict(&sub.parent_index), sub.space.min_open(k)))
            .collect();
        (LocalPoSpace::from_germs_unchecked(sub.space, germs), sub.parent_index)
    }

    /// Strict pairs of the germ at `x`, by name.
    pub fn format_germ(&self, x: usize) -> String {
        let pairs: Vec<String> = self.germs[x]
            .strict_pairs()
            .into_iter()
            .map(|(a, b)| format!("{}<{}", self.space.name(a), self.space.name(b)))
            .collect();
        format!("[{}]", pairs.join(", "))
    }
}

/// The equality order on `s`, in a universe of `n` points.
pub fn trivial_on(n: usize, s: &PointSet) -> Relation {
    let mut r = Relation::empty(n);
    for x in s.ones() {
        r.set(x, x);
    }
    r
}

/// Classifies a relation on the points of `X`.
///
/// The graph is closed iff its complement is open in `X × X`, i.e. whenever
/// `x ≰ y` no pair in `min_open(x) × min_open(y)` is related.
pub fn is_pospace_order(space: &FinSpace, r: &Relation) -> PoVerdict {
    if r.size() != space.len() || !r.is_partial_order() {
        return PoVerdict::Invalid;
    }
    let n = space.len();
    for x in 0..n {
        for y in 0..n {
            if r.le(x, y) {
                continue;
            }
            for a in space.min_open(x).ones() {
                for b in space.min_open(y).ones() {
                    if r.le(a, b) {
                        return PoVerdict::Relaxed;
                    }
                }
            }
        }
    }
    PoVerdict::Strict
}

/// The germ family of the atlas's class: the order at `x` is the restriction
/// of any chart containing `x` to `min_open(x)`.
pub fn canonicalize(atlas: &OrderAtlas) -> LocalPoSpace {
    let space = &atlas.space;
    let germs = (0..space.len())
        .map(|x| {
            let chart = atlas
                .charts
                .iter()
                .find(|c| c.carrier.contains(x))
                .expect("atlas covers every point");
            restrict_rel(&chart.order, space.min_open(x))
        })
        .collect();
    LocalPoSpace::from_germs_unchecked(space.clone(), germs)
}

pub fn atlases_equivalent(a: &OrderAtlas, b: &OrderAtlas) -> Result<bool, DispaceError> {
    if a.space != b.space {
        return Err(DispaceError::DifferentSpace);
    }
    Ok(canonicalize(a) == canonicalize(b))
}

/// A common refinement of two equivalent atlases, or `None`.
///
/// Each intersection `V_i ∩ W_j` on which the two orders agree becomes a chart.
/// Where they disagree (as for `M₊` and `M₋` on a two-point discrete space),
/// the intersection is replaced by the germ charts of its points.
pub fn common_refinement(a: &OrderAtlas, b: &OrderAtlas) -> Option<OrderAtlas> {
    if !atlases_equivalent(a, b).ok()? {
        return None;
    }
    let space = &a.space;
    let germs = canonicalize(a);
    let mut charts = Vec::new();
    for v in &a.charts {
        for w in &b.charts {
            let common = &v.carrier & &w.carrier;
            if common.count_ones(..) == 0 {
                continue;
            }
            let ov = restrict_rel(&v.order, &common);
            if ov == restrict_rel(&w.order, &common) {
                charts.push(Chart::new(common, ov));
            } else {
                charts.extend(common.ones().map(|x| germs.germ_chart(x)));
            }
        }
    }
    if space.is_empty() {
        charts.clear();
    }
    Some(OrderAtlas::new(space.clone(), charts).expect("refinement of equivalent atlases is an atlas"))
}

/// Every chart of `a` passes through the class's germs (used to confirm the
/// canonical form refines the atlas).
pub fn germ_atlas_refines(a: &OrderAtlas) -> bool {
    a.is_refined_by(&canonicalize(a).atlas())
}

/// Inherited structure on a subset `L` of `M`.
pub fn inherited_structure(m: &LocalPoSpace, l: &PointSet) -> LocalPoSpace {
    m.restrict(l).0
}

/// Product with germs the componentwise order of the factor germs.
pub fn product(m: &LocalPoSpace, n: &LocalPoSpace) -> LocalPoSpace {
    product_all(&[m, n])
}

/// n-ary product; indexing and point names follow [`FinSpace::product_all`].
pub fn product_all(factors: &[&LocalPoSpace]) -> LocalPoSpace {
    let spaces: Vec<&FinSpace> = factors.iter().map(|f| &f.space).collect();
    let space = FinSpace::product_all(&spaces);
    let dims: Vec<usize> = factors.iter().map(|f| f.len()).collect();
    let total = space.len();
    let germs = (0..total)
        .map(|p| {
            let coords = crate::finspace::decode(p, &dims);
            let mo: Vec<usize> = space.min_open(p).ones().collect();
            let decoded: Vec<Vec<usize>> = mo.iter().map(|&q| crate::finspace::decode(q, &dims)).collect();
            let mut r = Relation::empty(total);
            for (i, a) in decoded.iter().enumerate() {
                for (j, b) in decoded.iter().enumerate() {
                    let ok = (0..dims.len()).all(|k| factors[k].germs[coords[k]].le(a[k], b[k]));
                    if ok {
                        r.set(mo[i], mo[j]);
                    }
                }
            }
            r
        })
        .collect();
    LocalPoSpace::from_germs_unchecked(space, germs)
}

/// The free local po-space: equality germs everywhere.
pub fn free_lps(space: &FinSpace) -> LocalPoSpace {
    let n = space.len();
    let germs = (0..n).map(|x| trivial_on(n, space.min_open(x))).collect();
    LocalPoSpace::from_germs_unchecked(space.clone(), germs)
}

pub fn forget(m: &LocalPoSpace) -> FinSpace {
    m.space.clone()
}

/// All partial orders on the whole space that restrict to every germ, i.e.
/// the single-chart atlases of the class. Limited to six points.
pub fn global_charts(m: &LocalPoSpace) -> Result<Vec<Relation>, DispaceError> {
    let n = m.len();
    if n > 6 {
        return Err(DispaceError::TooLarge(n));
    }
    let idx: Vec<usize> = (0..n).collect();
    Ok(posets(n)
        .iter()
        .map(|p| p.embed(&idx, n))
        .filter(|r| (0..n).all(|x| restrict_rel(r, m.space.min_open(x)) == m.germs[x]))
        .collect())
}

/// Source-to-target continuity check reused by dimap code.
pub(crate) fn continuity_witness(m: &LocalPoSpace, n: &LocalPoSpace, f: &[usize]) -> Option<usize> {
    (0..m.len()).find(|&x| {
        let fx = f[x];
        !m.space.min_open(x).ones().all(|y| n.space.min_open(fx).contains(f[y]))
    })
}

#[cfg(test)]
mod tests;
