//! Truncated simplicial presheaves on `O(Z)`.

use std::sync::Arc;

use super::sset::{check_identities_with, monotone_sequences, TruncSSet};
use super::SimplicialError;
use crate::dispace::LocalPoSpace;
use crate::sheaf::{stalk, Presheaf, PresheafMap};
use crate::site::OpenSite;

/// Levelwise presheaves with natural face and degeneracy maps, indexed like
/// [`TruncSSet`].
#[derive(Clone, Debug)]
pub struct SimpPresheaf {
    pub levels: Vec<Presheaf>,
    pub faces: Vec<Vec<PresheafMap>>,
    pub degens: Vec<Vec<PresheafMap>>,
}

/// A levelwise morphism of simplicial presheaves.
#[derive(Clone, Debug, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct SMap {
    pub levels: Vec<PresheafMap>,
}

fn constant_presheaf(site: &Arc<OpenSite>, labels: &[String]) -> Presheaf {
    Presheaf::from_fn(site.clone(), vec![labels.to_vec(); site.len()], |_, _, a| a).expect("constant presheaf")
}

fn constant_map(site: &Arc<OpenSite>, table: &[usize]) -> PresheafMap {
    PresheafMap { components: vec![table.to_vec(); site.len()] }
}

impl SimpPresheaf {
    pub fn site(&self) -> &Arc<OpenSite> {
        self.levels[0].site()
    }

    pub fn truncation(&self) -> usize {
        self.levels.len() - 1
    }

    /// `κ_P`: `P` in every level, identity faces and degeneracies.
    pub fn kappa(p: &Presheaf, d: usize) -> Self {
        let id = PresheafMap::identity(p);
        SimpPresheaf {
            levels: vec![p.clone(); d + 1],
            faces: (0..=d).map(|k| if k == 0 { Vec::new() } else { vec![id.clone(); k + 1] }).collect(),
            degens: (0..=d).map(|k| if k == d { Vec::new() } else { vec![id.clone(); k + 1] }).collect(),
        }
    }

    /// `γ_K`: `K` at every open.
    pub fn gamma(site: Arc<OpenSite>, k: &TruncSSet) -> Self {
        SimpPresheaf {
            levels: k.labels.iter().map(|l| constant_presheaf(&site, l)).collect(),
            faces: k.faces.iter().map(|fs| fs.iter().map(|t| constant_map(&site, t)).collect()).collect(),
            degens: k.degens.iter().map(|ds| ds.iter().map(|t| constant_map(&site, t)).collect()).collect(),
        }
    }

    /// `ȳ(X) = κ_{y(X)}`.
    pub fn ybar(site: Arc<OpenSite>, x: &LocalPoSpace, d: usize) -> Self {
        SimpPresheaf::kappa(&Presheaf::yoneda(site, x), d)
    }

    /// `ȳ(φ)` for a dimap `φ : X → Y`.
    pub fn ybar_map(site: Arc<OpenSite>, x: &LocalPoSpace, y: &LocalPoSpace, phi: &[usize], d: usize) -> (Self, Self, SMap) {
        let (px, py, m) = Presheaf::yoneda_map(site, x, y, phi);
        (SimpPresheaf::kappa(&px, d), SimpPresheaf::kappa(&py, d), SMap { levels: vec![m; d + 1] })
    }

    /// `ȳ(U)` for an open of the base.
    pub fn ybar_open(site: Arc<OpenSite>, u: usize, d: usize) -> Self {
        SimpPresheaf::kappa(&Presheaf::yoneda_open(site, u), d)
    }

    pub fn terminal(site: Arc<OpenSite>, d: usize) -> Self {
        SimpPresheaf::kappa(&Presheaf::terminal(site), d)
    }

    /// The simplicial set of sections over `u`.
    pub fn at(&self, u: usize) -> TruncSSet {
        TruncSSet {
            labels: self.levels.iter().map(|p| p.labels(u).to_vec()).collect(),
            faces: self.faces.iter().map(|fs| fs.iter().map(|f| f.components[u].clone()).collect()).collect(),
            degens: self.degens.iter().map(|ds| ds.iter().map(|f| f.components[u].clone()).collect()).collect(),
        }
    }

    /// Naturality of every face and degeneracy, then the simplicial identities
    /// at every open.
    pub fn validate(&self) -> Result<(), SimplicialError> {
        let d = self.truncation();
        for k in 0..=d {
            for (i, f) in self.faces[k].iter().enumerate() {
                if !self.levels[k].is_natural(&self.levels[k - 1], f) {
                    return Err(SimplicialError::Shape(format!("d{i} at level {k} is not natural")));
                }
            }
            for (i, s) in self.degens[k].iter().enumerate() {
                if !self.levels[k].is_natural(&self.levels[k + 1], s) {
                    return Err(SimplicialError::Shape(format!("s{i} at level {k} is not natural")));
                }
            }
        }
        for u in 0..self.site().len() {
            check_identities_with(
                d,
                |k| self.levels[k].size(u),
                |k, i, a| self.faces[k][i].components[u][a],
                |k, i, a| self.degens[k][i].components[u][a],
            )
            .map_err(|e| SimplicialError::Shape(format!("{e} over {}", self.site().name(u))))?;
        }
        Ok(())
    }

    /// Levelwise product; element `(a, b)` has index `a * |Q| + b`.
    pub fn product(&self, q: &SimpPresheaf) -> SimpPresheaf {
        let levels: Vec<Presheaf> = self.levels.iter().zip(&q.levels).map(|(a, b)| a.product(b).0).collect();
        let pair = |fa: &PresheafMap, fb: &PresheafMap, k_from: usize, k_to: usize| {
            let site = self.site();
            PresheafMap {
                components: (0..site.len())
                    .map(|u| {
                        let (na, nb) = (self.levels[k_from].size(u), q.levels[k_from].size(u));
                        let nb_to = q.levels[k_to].size(u);
                        (0..na * nb)
                            .map(|e| fa.components[u][e / nb] * nb_to + fb.components[u][e % nb])
                            .collect()
                    })
                    .collect(),
            }
        };
        let d = self.truncation();
        let faces = (0..=d)
            .map(|k| self.faces[k].iter().zip(&q.faces[k]).map(|(a, b)| pair(a, b, k, k - 1)).collect())
            .collect();
        let degens = (0..=d)
            .map(|k| self.degens[k].iter().zip(&q.degens[k]).map(|(a, b)| pair(a, b, k, k + 1)).collect())
            .collect();
        SimpPresheaf { levels, faces, degens }
    }

    pub fn is_morphism(&self, to: &SimpPresheaf, f: &SMap) -> bool {
        let d = self.truncation();
        if f.levels.len() != d + 1 || to.truncation() != d {
            return false;
        }
        (0..=d).all(|k| self.levels[k].is_natural(&to.levels[k], &f.levels[k]))
            && (0..=d).all(|k| {
                let ok_faces = self.faces[k].iter().zip(&to.faces[k]).all(|(a, b)| a.then(&f.levels[k - 1]) == f.levels[k].then(b));
                let ok_degens =
                    self.degens[k].iter().zip(&to.degens[k]).all(|(a, b)| a.then(&f.levels[k + 1]) == f.levels[k].then(b));
                ok_faces && ok_degens
            })
    }

    /// Levelwise injective.
    pub fn is_mono(f: &SMap) -> bool {
        f.levels.iter().all(|m| m.is_injective())
    }

    /// All morphisms `self → to`, or `None` past `cap`.
    pub fn morphisms_to(&self, to: &SimpPresheaf, cap: usize) -> Option<Vec<SMap>> {
        Search::new(self, to).run(cap)
    }
}

/// The simplicial set of germs at `x`: each level's stalk with the induced
/// faces and degeneracies.
pub fn simplicial_stalk(f: &SimpPresheaf, x: usize) -> TruncSSet {
    let mo = f.site().min_open(x);
    let mut s = f.at(mo);
    s.labels = f.levels.iter().map(|p| stalk(p, x).carrier).collect();
    s
}

#[derive(Clone, Copy)]
enum Op {
    Restrict { k: usize, u: usize, l: usize },
    Face { k: usize, i: usize, u: usize },
    Degen { k: usize, i: usize, u: usize },
}

/// Backtracking over element images with forward propagation along
/// restrictions, faces and degeneracies.
struct Search<'a> {
    to: &'a SimpPresheaf,
    offsets: Vec<Vec<usize>>,
    sizes: Vec<Vec<usize>>,
    nodes: Vec<(usize, usize)>,
    edges: Vec<Vec<(usize, Op)>>,
    domain: Vec<usize>,
}

impl<'a> Search<'a> {
    fn new(from: &SimpPresheaf, to: &'a SimpPresheaf) -> Self {
        let site = from.site();
        let d = from.truncation();
        let mut offsets = vec![vec![0; site.len()]; d + 1];
        let mut nodes = Vec::new();
        let mut domain = Vec::new();
        for k in 0..=d {
            for u in 0..site.len() {
                offsets[k][u] = nodes.len();
                for _ in 0..from.levels[k].size(u) {
                    nodes.push((k, u));
                    domain.push(to.levels[k].size(u));
                }
            }
        }
        let mut edges = vec![Vec::new(); nodes.len()];
        for k in 0..=d {
            for u in 0..site.len() {
                for a in 0..from.levels[k].size(u) {
                    let id = offsets[k][u] + a;
                    for l in site.subopens(u) {
                        if l != u {
                            let b = from.levels[k].restrict(u, l, a);
                            edges[id].push((offsets[k][l] + b, Op::Restrict { k, u, l }));
                        }
                    }
                    for (i, f) in from.faces[k].iter().enumerate() {
                        edges[id].push((offsets[k - 1][u] + f.components[u][a], Op::Face { k, i, u }));
                    }
                    for (i, s) in from.degens[k].iter().enumerate() {
                        edges[id].push((offsets[k + 1][u] + s.components[u][a], Op::Degen { k, i, u }));
                    }
                }
            }
        }
        let sizes = (0..=d).map(|k| (0..site.len()).map(|u| from.levels[k].size(u)).collect()).collect();
        Search { to, offsets, sizes, nodes, edges, domain }
    }

    fn apply(&self, op: Op, v: usize) -> usize {
        match op {
            Op::Restrict { k, u, l } => self.to.levels[k].restrict(u, l, v),
            Op::Face { k, i, u } => self.to.faces[k][i].components[u][v],
            Op::Degen { k, i, u } => self.to.degens[k][i].components[u][v],
        }
    }

    /// Assigns `v` to `node` and everything it forces; returns the trail, or
    /// `None` (after undoing) on a clash.
    fn assign(&self, vals: &mut [Option<usize>], node: usize, v: usize) -> Option<Vec<usize>> {
        let mut trail = vec![node];
        vals[node] = Some(v);
        let mut stack = vec![node];
        while let Some(n) = stack.pop() {
            let val = vals[n].expect("assigned");
            for &(m, op) in &self.edges[n] {
                let w = self.apply(op, val);
                match vals[m] {
                    Some(x) if x != w => {
                        for &t in &trail {
                            vals[t] = None;
                        }
                        return None;
                    }
                    Some(_) => {}
                    None => {
                        vals[m] = Some(w);
                        trail.push(m);
                        stack.push(m);
                    }
                }
            }
        }
        Some(trail)
    }

    fn run(&self, cap: usize) -> Option<Vec<SMap>> {
        // higher levels over bigger opens first: they force the most
        let mut order: Vec<usize> = (0..self.nodes.len()).collect();
        order.sort_by_key(|&i| {
            let (k, u) = self.nodes[i];
            (std::cmp::Reverse(k), std::cmp::Reverse(u), i)
        });
        let mut vals = vec![None; self.nodes.len()];
        let mut out = Vec::new();
        self.go(&order, 0, &mut vals, &mut out, cap).then_some(out)
    }

    fn go(&self, order: &[usize], pos: usize, vals: &mut Vec<Option<usize>>, out: &mut Vec<SMap>, cap: usize) -> bool {
        let Some(rel) = order[pos..].iter().position(|&n| vals[n].is_none()) else {
            out.push(self.collect(vals));
            return out.len() <= cap;
        };
        let node = order[pos + rel];
        for v in 0..self.domain[node] {
            if let Some(trail) = self.assign(vals, node, v) {
                let ok = self.go(order, pos + rel + 1, vals, out, cap);
                for t in trail {
                    vals[t] = None;
                }
                if !ok {
                    return false;
                }
            }
        }
        true
    }

    fn collect(&self, vals: &[Option<usize>]) -> SMap {
        let levels = self
            .offsets
            .iter()
            .enumerate()
            .map(|(k, offs)| PresheafMap {
                components: offs
                    .iter()
                    .enumerate()
                    .map(|(u, &o)| (0..self.sizes[k][u]).map(|a| vals[o + a].expect("complete")).collect())
                    .collect(),
            })
            .collect();
        SMap { levels }
    }
}

/// The two sides of `Hom(κ_{y(C)} × γ_{Δ[n]}, F) ≅ F(C)_n`.
#[derive(Clone, Debug)]
pub struct BiYoneda {
    pub homs: Vec<SMap>,
    /// Image of each morphism: its value on `(∗, ι_n)` over `C`.
    pub images: Vec<usize>,
    pub target_size: usize,
}

/// `κ_{y(C)} × γ_{Δ[n]}` at truncation `d`.
pub fn bi_yoneda_source(site: Arc<OpenSite>, c: usize, n: usize, d: usize) -> SimpPresheaf {
    let yc = SimpPresheaf::kappa(&Presheaf::yoneda_open(site.clone(), c), d);
    yc.product(&SimpPresheaf::gamma(site, &TruncSSet::delta(n, d)))
}

/// Enumerates the left side and maps it to the right; errors unless the map
/// is a bijection.
pub fn bi_yoneda(c: usize, n: usize, f: &SimpPresheaf) -> Result<BiYoneda, SimplicialError> {
    let d = f.truncation();
    if n > d {
        return Err(SimplicialError::TruncationTooLow { n, d });
    }
    let site = f.site().clone();
    let src = bi_yoneda_source(site, c, n, d);
    let homs = src.morphisms_to(f, usize::MAX).expect("uncapped");
    // (∗, ι_n) has the index of ι_n = 0 1 … n in Δ[n]_n
    let iota = monotone_sequences(n, n).iter().position(|s| s.iter().copied().eq(0..=n)).expect("identity");
    let images: Vec<usize> = homs.iter().map(|h| h.levels[n].components[c][iota]).collect();
    let target_size = f.levels[n].size(c);
    let mut seen = vec![false; target_size];
    for &i in &images {
        if std::mem::replace(&mut seen[i], true) {
            return Err(SimplicialError::AssertionFailure {
                point: f.site().name(c),
                detail: format!("two morphisms hit element {i}"),
            });
        }
    }
    if images.len() != target_size {
        return Err(SimplicialError::AssertionFailure {
            point: f.site().name(c),
            detail: format!("{} morphisms for {} simplices", images.len(), target_size),
        });
    }
    Ok(BiYoneda { homs, images, target_size })
}
