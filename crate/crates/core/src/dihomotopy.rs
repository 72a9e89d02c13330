//! Directed homotopy relative to a context, on finite models.
//!
//! The unit interval is replaced by `𝕀_n`: points `0..=n` with the discrete
//! topology and trivial germs, together with a distinguished global chart
//! carrying the total order. A dihomotopy `H : M × 𝕀_n → N` is a list of
//! slices `H(·, t)`, each an anchored dimap, such that
//!
//! * consecutive values `H(m, t)`, `H(m, t+1)` are comparable in the
//!   specialization preorder and ordered by the germ at the lower one, and
//! * on each product chart `min_open(z) × 𝕀_n`, ordered by the germ at `z`
//!   times the total order, `H` is monotone wherever two values share a
//!   minimal open of `N`.
//!
//! An `n`-step dihomotopy restricts to one-step dihomotopies between
//! consecutive slices, so the equivalence closure is generated by one-step
//! moves and any `n_max ≥ 1` yields the same relation.

use std::collections::{HashMap, VecDeque};
use std::sync::Arc;

use thiserror::Error;

use crate::dispace::{compose, enumerate_dimaps_with, free_lps, is_dimap, is_iso, Chart, LocalPoSpace};
use crate::finspace::FinSpace;
use crate::order::Relation;
use crate::simplicial::SimpPresheaf;
use crate::site::OpenSite;

/// Default subdivision bound.
pub const DEFAULT_NMAX: usize = 4;
/// Default bound on hom-set sizes before a search gives up.
pub const DEFAULT_HOM_CAP: usize = 5000;

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum DihomotopyError {
    #[error("shape mismatch: {0}")]
    ShapeMismatch(String),
    #[error("anchor is not a dimap")]
    BadAnchor,
    #[error("map does not respect the anchors")]
    NotAnchored,
}

/// `𝕀_n`.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct DirectedInterval {
    pub n: usize,
}

impl DirectedInterval {
    pub fn new(n: usize) -> Self {
        DirectedInterval { n }
    }

    pub fn space(&self) -> LocalPoSpace {
        let names: Vec<String> = (0..=self.n).map(|t| t.to_string()).collect();
        free_lps(&FinSpace::discrete(&names))
    }

    pub fn global_chart(&self) -> Chart {
        let k = self.n + 1;
        Chart::new(self.space().space().full(), Relation::chain(k))
    }
}

/// `ι_M : A → M`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct ContextedSpace {
    pub context: LocalPoSpace,
    pub space: LocalPoSpace,
    pub anchor: Vec<usize>,
}

impl ContextedSpace {
    pub fn new(context: LocalPoSpace, space: LocalPoSpace, anchor: Vec<usize>) -> Result<Self, DihomotopyError> {
        if !is_dimap(&context, &space, &anchor) {
            return Err(DihomotopyError::BadAnchor);
        }
        Ok(ContextedSpace { context, space, anchor })
    }

    /// `∅ → M`.
    pub fn bare(space: LocalPoSpace) -> Self {
        ContextedSpace { context: free_lps(&FinSpace::empty()), space, anchor: Vec::new() }
    }

    pub fn identity(&self) -> Vec<usize> {
        (0..self.space.len()).collect()
    }
}

/// Is `f : M → N` a morphism under `A`?
pub fn is_anchored(m: &ContextedSpace, n: &ContextedSpace, f: &[usize]) -> bool {
    m.context == n.context && is_dimap(&m.space, &n.space, f) && compose(&m.anchor, f) == n.anchor
}

/// Anchored dimaps `M → N`, or `None` past `cap`.
pub fn anchored_homs(m: &ContextedSpace, n: &ContextedSpace, cap: usize) -> Option<Vec<Vec<usize>>> {
    let mut fixed = vec![None; m.space.len()];
    for (a, &p) in m.anchor.iter().enumerate() {
        match fixed[p] {
            Some(q) if q != n.anchor[a] => return Some(Vec::new()),
            _ => fixed[p] = Some(n.anchor[a]),
        }
    }
    enumerate_dimaps_with(&m.space, &n.space, &fixed, cap)
}

/// `H(·, t)` for `t = 0..=n`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Dihomotopy {
    pub slices: Vec<Vec<usize>>,
}

impl Dihomotopy {
    pub fn constant(f: &[usize], n: usize) -> Self {
        Dihomotopy { slices: vec![f.to_vec(); n + 1] }
    }

    pub fn steps(&self) -> usize {
        self.slices.len() - 1
    }
}

/// `u ⊑ v` or `v ⊑ u`, and `u ≤ v` in the germ at the lower point.
pub fn step_le(n: &LocalPoSpace, u: usize, v: usize) -> bool {
    let s = n.space();
    if s.min_open(u).contains(v) {
        n.le_at(u, u, v)
    } else if s.min_open(v).contains(u) {
        n.le_at(v, u, v)
    } else {
        false
    }
}

/// `a ≤ b` in the germ of some `w` whose minimal open holds both; `None` if
/// no minimal open holds both. Germs agree on overlaps, so any such `w`
/// gives the same answer.
fn shared_le(n: &LocalPoSpace, a: usize, b: usize) -> Option<bool> {
    (0..n.len()).find(|&w| n.space().min_open(w).contains(a) && n.space().min_open(w).contains(b)).map(|w| n.le_at(w, a, b))
}

/// Product-chart monotonicity for pairs involving slice `t` and any earlier
/// or equal slice.
fn chart_ok_at(m: &LocalPoSpace, n: &LocalPoSpace, slices: &[Vec<usize>], t: usize) -> bool {
    let ms = m.space();
    (0..m.len()).all(|z| {
        let mo: Vec<usize> = ms.min_open(z).ones().collect();
        mo.iter().all(|&x| {
            mo.iter().all(|&y| {
                if !m.le_at(z, x, y) {
                    return true;
                }
                (0..=t).all(|s| {
                    let (a, b) = (slices[s][x], slices[t][y]);
                    shared_le(n, a, b).unwrap_or(true)
                })
            })
        })
    })
}

fn slice_pair_ok(n: &LocalPoSpace, u: &[usize], v: &[usize]) -> bool {
    u.iter().zip(v).all(|(&a, &b)| step_le(n, a, b))
}

/// Checks a candidate dihomotopy from `f` to `g`.
pub fn is_dihomotopy(
    h: &Dihomotopy,
    f: &[usize],
    g: &[usize],
    m: &ContextedSpace,
    n: &ContextedSpace,
) -> Result<bool, DihomotopyError> {
    let len = m.space.len();
    if h.slices.is_empty() || h.slices.iter().any(|s| s.len() != len) || f.len() != len || g.len() != len {
        return Err(DihomotopyError::ShapeMismatch(format!("slices must have {len} entries")));
    }
    if m.context != n.context {
        return Err(DihomotopyError::ShapeMismatch("different contexts".into()));
    }
    let last = h.slices.len() - 1;
    if h.slices[0] != f || h.slices[last] != g {
        return Ok(false);
    }
    if !h.slices.iter().all(|s| is_anchored(m, n, s)) {
        return Ok(false);
    }
    if !h.slices.windows(2).all(|w| slice_pair_ok(&n.space, &w[0], &w[1])) {
        return Ok(false);
    }
    Ok((0..=last).all(|t| chart_ok_at(&m.space, &n.space, &h.slices, t)))
}

/// A direct dihomotopy `f ⇒ g` with exactly `steps` steps, if one exists.
pub fn find_dihomotopy(
    f: &[usize],
    g: &[usize],
    m: &ContextedSpace,
    n: &ContextedSpace,
    steps: usize,
    homs: &[Vec<usize>],
) -> Option<Dihomotopy> {
    fn go(
        slices: &mut Vec<Vec<usize>>,
        g: &[usize],
        steps: usize,
        m: &LocalPoSpace,
        n: &LocalPoSpace,
        homs: &[Vec<usize>],
    ) -> bool {
        let t = slices.len() - 1;
        if t == steps {
            return slices[t] == g;
        }
        let cands: Vec<&Vec<usize>> = if t + 1 == steps { homs.iter().filter(|h| *h == g).collect() } else { homs.iter().collect() };
        for c in cands {
            if !slice_pair_ok(n, &slices[t], c) {
                continue;
            }
            slices.push(c.clone());
            if chart_ok_at(m, n, slices, t + 1) && go(slices, g, steps, m, n, homs) {
                return true;
            }
            slices.pop();
        }
        false
    }
    if !is_anchored(m, n, f) || !is_anchored(m, n, g) {
        return None;
    }
    let mut slices = vec![f.to_vec()];
    if !chart_ok_at(&m.space, &n.space, &slices, 0) {
        return None;
    }
    if steps == 0 {
        return (f == g).then(|| Dihomotopy { slices });
    }
    go(&mut slices, g, steps, &m.space, &n.space, homs).then_some(Dihomotopy { slices })
}

/// One link of a witness chain: `H` runs from `from` to `to` when `forward`,
/// otherwise from `to` to `from`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Link {
    pub from: Vec<usize>,
    pub to: Vec<usize>,
    pub forward: bool,
    pub h: Dihomotopy,
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub enum Verdict<T> {
    Yes(T),
    No,
    /// A hom-set exceeded the cap.
    Unknown,
}

impl<T> Verdict<T> {
    pub fn is_yes(&self) -> bool {
        matches!(self, Verdict::Yes(_))
    }
}

/// The one-step dihomotopy graph on an anchored hom-set.
pub struct HomGraph {
    pub homs: Vec<Vec<usize>>,
    /// `forward[i]`: indices `j` with a one-step dihomotopy `i ⇒ j`.
    pub forward: Vec<Vec<usize>>,
    pub backward: Vec<Vec<usize>>,
    pub component: Vec<usize>,
    index: HashMap<Vec<usize>, usize>,
}

impl HomGraph {
    pub fn build(m: &ContextedSpace, n: &ContextedSpace, cap: usize) -> Option<Self> {
        let homs = anchored_homs(m, n, cap)?;
        let index: HashMap<Vec<usize>, usize> = homs.iter().cloned().enumerate().map(|(i, h)| (h, i)).collect();
        let forward: Vec<Vec<usize>> = homs
            .iter()
            .map(|u| {
                (0..homs.len())
                    .filter(|&j| {
                        let v = &homs[j];
                        u != v && slice_pair_ok(&n.space, u, v) && {
                            let s = [u.clone(), v.clone()];
                            chart_ok_at(&m.space, &n.space, &s, 0) && chart_ok_at(&m.space, &n.space, &s, 1)
                        }
                    })
                    .collect()
            })
            .collect();
        let mut backward = vec![Vec::new(); homs.len()];
        for (i, fs) in forward.iter().enumerate() {
            for &j in fs {
                backward[j].push(i);
            }
        }
        let mut component = vec![usize::MAX; homs.len()];
        let mut next = 0;
        for s in 0..homs.len() {
            if component[s] != usize::MAX {
                continue;
            }
            let mut queue = VecDeque::from([s]);
            component[s] = next;
            while let Some(i) = queue.pop_front() {
                for &j in forward[i].iter().chain(&backward[i]) {
                    if component[j] == usize::MAX {
                        component[j] = next;
                        queue.push_back(j);
                    }
                }
            }
            next += 1;
        }
        Some(HomGraph { homs, forward, backward, component, index })
    }

    pub fn classes(&self) -> usize {
        self.component.iter().copied().max().map_or(0, |c| c + 1)
    }

    pub fn index_of(&self, f: &[usize]) -> Option<usize> {
        self.index.get(f).copied()
    }

    pub fn same_class(&self, f: &[usize], g: &[usize]) -> bool {
        match (self.index_of(f), self.index_of(g)) {
            (Some(i), Some(j)) => self.component[i] == self.component[j],
            _ => false,
        }
    }

    /// Indices reachable from `i` by forward and backward steps.
    pub fn reachable(&self, i: usize) -> Vec<bool> {
        let mut seen = vec![false; self.homs.len()];
        seen[i] = true;
        let mut stack = vec![i];
        while let Some(k) = stack.pop() {
            for &j in self.forward[k].iter().chain(&self.backward[k]) {
                if !std::mem::replace(&mut seen[j], true) {
                    stack.push(j);
                }
            }
        }
        seen
    }

    /// Shortest chain of one-step dihomotopies from `f` to `g`.
    pub fn chain(&self, f: &[usize], g: &[usize]) -> Option<Vec<Link>> {
        let (s, t) = (self.index_of(f)?, self.index_of(g)?);
        let mut prev: Vec<Option<(usize, bool)>> = vec![None; self.homs.len()];
        let mut seen = vec![false; self.homs.len()];
        seen[s] = true;
        let mut queue = VecDeque::from([s]);
        while let Some(i) = queue.pop_front() {
            if i == t {
                break;
            }
            let fwd = self.forward[i].iter().map(|&j| (j, true));
            let bwd = self.backward[i].iter().map(|&j| (j, false));
            for (j, dir) in fwd.chain(bwd) {
                if !seen[j] {
                    seen[j] = true;
                    prev[j] = Some((i, dir));
                    queue.push_back(j);
                }
            }
        }
        if !seen[t] {
            return None;
        }
        let mut links = Vec::new();
        let mut cur = t;
        while let Some((p, dir)) = prev[cur] {
            let (a, b) = (&self.homs[p], &self.homs[cur]);
            let h = if dir { vec![a.clone(), b.clone()] } else { vec![b.clone(), a.clone()] };
            links.push(Link { from: a.clone(), to: b.clone(), forward: dir, h: Dihomotopy { slices: h } });
            cur = p;
        }
        links.reverse();
        Some(links)
    }
}

/// `f ≃ g` rel `A`, with a witness chain. `n_max = 0` allows only `f = g`.
pub fn dihomotopic(
    f: &[usize],
    g: &[usize],
    m: &ContextedSpace,
    n: &ContextedSpace,
    n_max: usize,
    cap: usize,
) -> Verdict<Vec<Link>> {
    if !is_anchored(m, n, f) || !is_anchored(m, n, g) {
        return Verdict::No;
    }
    if f == g {
        return Verdict::Yes(Vec::new());
    }
    if n_max == 0 {
        return Verdict::No;
    }
    match HomGraph::build(m, n, cap) {
        None => Verdict::Unknown,
        Some(graph) => graph.chain(f, g).map_or(Verdict::No, Verdict::Yes),
    }
}

/// Hom graphs needed to test equivalences between `M` and `N`.
pub struct EquivalenceSearch {
    pub mn: HomGraph,
    pub nm: HomGraph,
    pub mm: HomGraph,
    pub nn: HomGraph,
}

impl EquivalenceSearch {
    pub fn new(m: &ContextedSpace, n: &ContextedSpace, cap: usize) -> Option<Self> {
        Some(EquivalenceSearch {
            mn: HomGraph::build(m, n, cap)?,
            nm: HomGraph::build(n, m, cap)?,
            mm: HomGraph::build(m, m, cap)?,
            nn: HomGraph::build(n, n, cap)?,
        })
    }

    /// A `g` with `g ∘ f ≃ Id_M` and `f ∘ g ≃ Id_N`.
    pub fn inverse_of(&self, f: &[usize]) -> Option<Vec<usize>> {
        let id_m: Vec<usize> = (0..f.len()).collect();
        let id_n: Vec<usize> = (0..self.nn.homs.first().map_or(0, |h| h.len())).collect();
        self.nm
            .homs
            .iter()
            .find(|g| self.mm.same_class(&compose(f, g), &id_m) && self.nn.same_class(&compose(g, f), &id_n))
            .cloned()
    }

    pub fn equivalences(&self) -> Vec<(Vec<usize>, Vec<usize>)> {
        self.mn.homs.iter().filter_map(|f| self.inverse_of(f).map(|g| (f.clone(), g))).collect()
    }
}

/// Is `f` a dihomotopy equivalence rel `A`? Returns an inverse.
pub fn is_dihomotopy_equivalence(
    f: &[usize],
    m: &ContextedSpace,
    n: &ContextedSpace,
    n_max: usize,
    cap: usize,
) -> Verdict<Vec<usize>> {
    if !is_anchored(m, n, f) {
        return Verdict::No;
    }
    if n_max == 0 {
        // only equality: f must be an anchored isomorphism
        if !is_iso(&m.space, &n.space, f) {
            return Verdict::No;
        }
        let mut g = vec![0; f.len()];
        for (x, &y) in f.iter().enumerate() {
            g[y] = x;
        }
        return Verdict::Yes(g);
    }
    match EquivalenceSearch::new(m, n, cap) {
        None => Verdict::Unknown,
        Some(s) => s.inverse_of(f).map_or(Verdict::No, Verdict::Yes),
    }
}

/// All dihomotopy equivalences `M → N`, or `None` past the cap.
pub fn equivalences(m: &ContextedSpace, n: &ContextedSpace, cap: usize) -> Option<Vec<Vec<usize>>> {
    Some(EquivalenceSearch::new(m, n, cap)?.equivalences().into_iter().map(|(f, _)| f).collect())
}

/// Result of checking `ȳ(ι_N) = ȳ(f) ∘ ȳ(ι_M)` for a list of morphisms.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct EmbedReport {
    pub objects: usize,
    pub triangles: usize,
    /// `(morphism index, base index)` of each failing triangle.
    pub failures: Vec<(usize, usize)>,
}

/// Checks the triangles of the embedding into `ȳ(A) ↓ sPre` over each base in
/// `ambient`, at truncation `d`.
pub fn undercategory_embed(
    objects: &[ContextedSpace],
    morphisms: &[(usize, usize, Vec<usize>)],
    ambient: &[LocalPoSpace],
    d: usize,
) -> Result<EmbedReport, DihomotopyError> {
    let mut failures = Vec::new();
    for (k, (i, j, f)) in morphisms.iter().enumerate() {
        let (m, n) = (&objects[*i], &objects[*j]);
        if !is_anchored(m, n, f) {
            return Err(DihomotopyError::NotAnchored);
        }
        for (b, z) in ambient.iter().enumerate() {
            let site = Arc::new(OpenSite::new(z.clone()).map_err(|e| DihomotopyError::ShapeMismatch(e.to_string()))?);
            let (_, _, iota_m) = SimpPresheaf::ybar_map(site.clone(), &m.context, &m.space, &m.anchor, d);
            let (_, _, yf) = SimpPresheaf::ybar_map(site.clone(), &m.space, &n.space, f, d);
            let (_, _, iota_n) = SimpPresheaf::ybar_map(site, &n.context, &n.space, &n.anchor, d);
            let composite: Vec<_> = iota_m.levels.iter().zip(&yf.levels).map(|(a, b)| a.then(b)).collect();
            if composite != iota_n.levels {
                failures.push((k, b));
            }
        }
    }
    Ok(EmbedReport { objects: objects.len(), triangles: morphisms.len() * ambient.len(), failures })
}
