use std::collections::HashMap;
use std::sync::Arc;

use super::SheafError;
use crate::dispace::{enumerate_dimaps, LocalPoSpace};
use crate::site::OpenSite;

/// A finite-set-valued presheaf on `O(Z)`.
///
/// `restr[u][l]` is the restriction `P(u) → P(l)` for every open `l ⊆ u`
/// (`None` when `l ⊄ u`).
#[derive(Clone, Debug)]
pub struct Presheaf {
    site: Arc<OpenSite>,
    labels: Vec<Vec<String>>,
    restr: Vec<Vec<Option<Vec<usize>>>>,
}

impl PartialEq for Presheaf {
    fn eq(&self, other: &Self) -> bool {
        self.site == other.site && self.labels == other.labels && self.restr == other.restr
    }
}

impl Eq for Presheaf {}

/// Components `α_U : P(U) → Q(U)`.
#[derive(Clone, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct PresheafMap {
    pub components: Vec<Vec<usize>>,
}

impl PresheafMap {
    pub fn identity(p: &Presheaf) -> Self {
        PresheafMap { components: (0..p.site.len()).map(|u| (0..p.size(u)).collect()).collect() }
    }

    /// `self` followed by `g`.
    pub fn then(&self, g: &PresheafMap) -> PresheafMap {
        PresheafMap {
            components: self
                .components
                .iter()
                .zip(&g.components)
                .map(|(f, g)| f.iter().map(|&a| g[a]).collect())
                .collect(),
        }
    }

    pub fn is_injective(&self) -> bool {
        self.components.iter().all(|c| {
            let mut seen = c.clone();
            seen.sort_unstable();
            seen.windows(2).all(|w| w[0] != w[1])
        })
    }

    pub fn is_iso(&self, p: &Presheaf, q: &Presheaf) -> bool {
        self.is_injective() && (0..p.site.len()).all(|u| p.size(u) == q.size(u))
    }
}

impl Presheaf {
    /// Builds a presheaf from element labels and a partial restriction table.
    ///
    /// Missing restrictions are filled in when forced (identity, singleton
    /// target, empty source) or by composing given ones; the completed table
    /// must be functorial.
    pub fn from_partial(
        site: Arc<OpenSite>,
        labels: Vec<Vec<String>>,
        given: HashMap<(usize, usize), Vec<usize>>,
    ) -> Result<Self, SheafError> {
        let k = site.len();
        if labels.len() != k {
            return Err(SheafError::Shape(format!("{} value sets for {} opens", labels.len(), k)));
        }
        let mut restr: Vec<Vec<Option<Vec<usize>>>> = vec![vec![None; k]; k];
        for ((u, l), map) in given {
            if !site.contains(u, l) {
                return Err(SheafError::NotSubopen(site.name(l), site.name(u)));
            }
            if map.len() != labels[u].len() || map.iter().any(|&t| t >= labels[l].len()) {
                return Err(SheafError::BadRestriction(site.name(u), site.name(l)));
            }
            restr[u][l] = Some(map);
        }
        for u in 0..k {
            restr[u][u] = Some((0..labels[u].len()).collect());
            for l in site.subopens(u) {
                if restr[u][l].is_none() && (labels[l].len() == 1 || labels[u].is_empty()) {
                    restr[u][l] = Some(vec![0; labels[u].len()]);
                }
            }
        }
        // compose along intermediate opens until nothing changes
        loop {
            let mut changed = false;
            for u in 0..k {
                for l in site.subopens(u).collect::<Vec<_>>() {
                    if restr[u][l].is_some() {
                        continue;
                    }
                    let via = site.subopens(u).find(|&m| {
                        m != u && m != l && site.contains(m, l) && restr[u][m].is_some() && restr[m][l].is_some()
                    });
                    if let Some(m) = via {
                        let first = restr[u][m].as_ref().unwrap();
                        let second = restr[m][l].as_ref().unwrap();
                        restr[u][l] = Some(first.iter().map(|&a| second[a]).collect());
                        changed = true;
                    }
                }
            }
            if !changed {
                break;
            }
        }
        for u in 0..k {
            for l in site.subopens(u) {
                if restr[u][l].is_none() {
                    return Err(SheafError::BadRestriction(site.name(u), site.name(l)));
                }
            }
        }
        let p = Presheaf { site, labels, restr };
        p.validate()?;
        Ok(p)
    }

    /// Builds a presheaf from a total restriction function.
    pub fn from_fn(
        site: Arc<OpenSite>,
        labels: Vec<Vec<String>>,
        mut restrict: impl FnMut(usize, usize, usize) -> usize,
    ) -> Result<Self, SheafError> {
        let k = site.len();
        let mut restr: Vec<Vec<Option<Vec<usize>>>> = vec![vec![None; k]; k];
        for u in 0..k {
            for l in site.subopens(u) {
                restr[u][l] = Some((0..labels[u].len()).map(|a| restrict(u, l, a)).collect());
            }
        }
        let p = Presheaf { site, labels, restr };
        p.validate()?;
        Ok(p)
    }

    #[allow(dead_code)]
    pub(crate) fn from_parts_unchecked(
        site: Arc<OpenSite>,
        labels: Vec<Vec<String>>,
        restr: Vec<Vec<Option<Vec<usize>>>>,
    ) -> Self {
        Presheaf { site, labels, restr }
    }

    /// Identity and composition laws.
    pub fn validate(&self) -> Result<(), SheafError> {
        let site = &self.site;
        for u in 0..site.len() {
            if self.restr[u][u].as_deref() != Some(&(0..self.size(u)).collect::<Vec<_>>()[..]) {
                return Err(SheafError::NotFunctorial(format!("restriction {} → itself is not the identity", site.name(u))));
            }
            for l in site.subopens(u) {
                let ul = self.restr[u][l].as_ref().ok_or_else(|| SheafError::BadRestriction(site.name(u), site.name(l)))?;
                if ul.len() != self.size(u) || ul.iter().any(|&t| t >= self.size(l)) {
                    return Err(SheafError::BadRestriction(site.name(u), site.name(l)));
                }
                for m in site.subopens(l) {
                    let lm = self.restr[l][m].as_ref().expect("checked");
                    let um = self.restr[u][m].as_ref().expect("checked");
                    if ul.iter().zip(um).any(|(&a, &b)| lm[a] != b) {
                        return Err(SheafError::NotFunctorial(format!(
                            "{} → {} → {} differs from {} → {}",
                            site.name(u),
                            site.name(l),
                            site.name(m),
                            site.name(u),
                            site.name(m)
                        )));
                    }
                }
            }
        }
        Ok(())
    }

    pub fn site(&self) -> &Arc<OpenSite> {
        &self.site
    }

    pub fn size(&self, u: usize) -> usize {
        self.labels[u].len()
    }

    pub fn labels(&self, u: usize) -> &[String] {
        &self.labels[u]
    }

    pub fn label(&self, u: usize, a: usize) -> &str {
        &self.labels[u][a]
    }

    pub fn element(&self, u: usize, label: &str) -> Option<usize> {
        self.labels[u].iter().position(|l| l == label)
    }

    /// `a|_l` for `a ∈ P(u)`.
    pub fn restrict(&self, u: usize, l: usize, a: usize) -> usize {
        self.restr[u][l].as_ref().expect("l must be a subopen of u")[a]
    }

    pub fn restriction(&self, u: usize, l: usize) -> &[usize] {
        self.restr[u][l].as_ref().expect("l must be a subopen of u")
    }

    /// Terminal presheaf: one element everywhere.
    pub fn terminal(site: Arc<OpenSite>) -> Self {
        let labels = vec![vec!["*".to_string()]; site.len()];
        Presheaf::from_fn(site, labels, |_, _, _| 0).expect("terminal is functorial")
    }

    /// Representable of an open `x`: `{∗}` on opens inside `x`, empty elsewhere.
    pub fn yoneda_open(site: Arc<OpenSite>, x: usize) -> Self {
        let labels = (0..site.len())
            .map(|u| if site.contains(x, u) { vec!["*".to_string()] } else { vec![] })
            .collect();
        Presheaf::from_fn(site, labels, |_, _, _| 0).expect("representable is functorial")
    }

    /// Representable of a local po-space `X`: dimaps `U → X` from each open
    /// with its inherited structure, restricted by precomposition.
    pub fn yoneda(site: Arc<OpenSite>, x: &LocalPoSpace) -> Self {
        let (labels, homs) = representable_tables(&site, x);
        let lookups: Vec<HashMap<Vec<usize>, usize>> = homs
            .iter()
            .map(|hs| hs.iter().cloned().enumerate().map(|(i, h)| (h, i)).collect())
            .collect();
        let parents: Vec<Vec<usize>> = (0..site.len()).map(|u| site.open(u).ones().collect()).collect();
        Presheaf::from_fn(site, labels, move |u, l, a| {
            // local index in u of each point of l
            let f = &homs[u][a];
            let g: Vec<usize> = parents[l]
                .iter()
                .map(|p| f[parents[u].binary_search(p).expect("l ⊆ u")])
                .collect();
            lookups[l][&g]
        })
        .expect("representable is functorial")
    }

    /// `y(φ) : y(X) → y(Y)`, post-composition with a dimap `φ`.
    pub fn yoneda_map(site: Arc<OpenSite>, x: &LocalPoSpace, y: &LocalPoSpace, phi: &[usize]) -> (Self, Self, PresheafMap) {
        let (_, hx) = representable_tables(&site, x);
        let (_, hy) = representable_tables(&site, y);
        let components = hx
            .iter()
            .zip(&hy)
            .map(|(xs, ys)| {
                let lookup: HashMap<&Vec<usize>, usize> = ys.iter().enumerate().map(|(i, h)| (h, i)).collect();
                xs.iter().map(|f| lookup[&f.iter().map(|&t| phi[t]).collect::<Vec<_>>()]).collect()
            })
            .collect();
        let px = Presheaf::yoneda(site.clone(), x);
        let py = Presheaf::yoneda(site, y);
        (px, py, PresheafMap { components })
    }

    /// `P(U) → ∏ P(F_j)` images for a family.
    fn restrictions_to(&self, u: usize, family: &[usize]) -> Vec<Vec<usize>> {
        (0..self.size(u)).map(|a| family.iter().map(|&l| self.restrict(u, l, a)).collect()).collect()
    }

    /// Matching families on `family` (members of the site): choices
    /// `a_j ∈ P(F_j)` agreeing on every pairwise intersection.
    pub fn matching_families(&self, family: &[usize]) -> Vec<Vec<usize>> {
        let mut out = Vec::new();
        let mut cur = Vec::with_capacity(family.len());
        self.match_rec(family, &mut cur, &mut out);
        out
    }

    fn match_rec(&self, family: &[usize], cur: &mut Vec<usize>, out: &mut Vec<Vec<usize>>) {
        let j = cur.len();
        if j == family.len() {
            out.push(cur.clone());
            return;
        }
        let fj = family[j];
        for a in 0..self.size(fj) {
            let ok = (0..j).all(|i| {
                let m = self.site.meet(family[i], fj);
                self.restrict(family[i], m, cur[i]) == self.restrict(fj, m, a)
            });
            if ok {
                cur.push(a);
                self.match_rec(family, cur, out);
                cur.pop();
            }
        }
    }

    /// Elements of `P(u)` restricting to the given family.
    pub fn amalgamations(&self, u: usize, family: &[usize], values: &[usize]) -> Vec<usize> {
        (0..self.size(u))
            .filter(|&a| family.iter().zip(values).all(|(&l, &v)| self.restrict(u, l, a) == v))
            .collect()
    }

    /// The sheaf condition over every antichain cover of every open.
    ///
    /// Checking antichain covers is enough: a family and its maximal members
    /// have the same matching families and the same amalgamations.
    pub fn check_sheaf(&self) -> SheafReport {
        self.check_sheaf_with(crate::site::DEFAULT_COVER_LIMIT)
    }

    pub fn check_sheaf_with(&self, limit: usize) -> SheafReport {
        let site = &self.site;
        let mut covers_checked = 0;
        for u in 0..site.len() {
            let covers = match site.covers(u, limit) {
                Ok(c) => c,
                Err(_) => return self.check_sheaf_minimal(),
            };
            for cover in covers {
                covers_checked += 1;
                if let Some(cx) = self.check_cover(u, &cover) {
                    return SheafReport { is_sheaf: false, covers_checked, counterexample: Some(cx) };
                }
            }
        }
        SheafReport { is_sheaf: true, covers_checked, counterexample: None }
    }

    /// The sheaf condition on the minimal-open cover of each open only, which
    /// is equivalent to the full condition on `O(Z)`.
    pub fn check_sheaf_minimal(&self) -> SheafReport {
        let site = &self.site;
        let mut covers_checked = 0;
        for u in 0..site.len() {
            let gens: Vec<usize> = site.open(u).ones().map(|x| site.min_open(x)).collect();
            let cover = site.normalize_family(&gens);
            covers_checked += 1;
            if let Some(cx) = self.check_cover(u, &cover) {
                return SheafReport { is_sheaf: false, covers_checked, counterexample: Some(cx) };
            }
        }
        SheafReport { is_sheaf: true, covers_checked, counterexample: None }
    }

    /// First matching family on `cover` without exactly one amalgamation.
    pub fn check_cover(&self, u: usize, cover: &[usize]) -> Option<Counterexample> {
        let images = self.restrictions_to(u, cover);
        for fam in self.matching_families(cover) {
            let count = images.iter().filter(|img| **img == fam).count();
            if count != 1 {
                return Some(Counterexample {
                    target: u,
                    cover: cover.to_vec(),
                    family: fam,
                    amalgamations: count,
                });
            }
        }
        None
    }

    pub fn is_sheaf(&self) -> bool {
        self.check_sheaf_minimal().is_sheaf
    }

    /// Naturality of a candidate map `P → Q`.
    pub fn is_natural(&self, q: &Presheaf, f: &PresheafMap) -> bool {
        let site = &self.site;
        f.components.len() == site.len()
            && (0..site.len()).all(|u| {
                f.components[u].len() == self.size(u)
                    && f.components[u].iter().all(|&b| b < q.size(u))
                    && site.subopens(u).all(|l| {
                        (0..self.size(u)).all(|a| f.components[l][self.restrict(u, l, a)] == q.restrict(u, l, f.components[u][a]))
                    })
            })
    }

    /// All natural transformations `P → Q`.
    pub fn morphisms_to(&self, q: &Presheaf) -> Vec<PresheafMap> {
        let opens: Vec<usize> = (0..self.site.len()).collect();
        nat_search(self, q, &opens)
            .into_iter()
            .map(|comps| PresheafMap { components: comps })
            .collect()
    }

    /// Binary product.
    pub fn product(&self, q: &Presheaf) -> (Presheaf, PresheafMap, PresheafMap) {
        let site = self.site.clone();
        let k = site.len();
        let mut labels = Vec::with_capacity(k);
        let mut pairs: Vec<Vec<(usize, usize)>> = Vec::with_capacity(k);
        for u in 0..k {
            let mut l = Vec::new();
            let mut p = Vec::new();
            for a in 0..self.size(u) {
                for b in 0..q.size(u) {
                    l.push(format!("({},{})", self.label(u, a), q.label(u, b)));
                    p.push((a, b));
                }
            }
            labels.push(l);
            pairs.push(p);
        }
        let lookup: Vec<HashMap<(usize, usize), usize>> =
            pairs.iter().map(|ps| ps.iter().copied().enumerate().map(|(i, p)| (p, i)).collect()).collect();
        let prod = Presheaf::from_fn(site, labels, |u, l, i| {
            let (a, b) = pairs[u][i];
            lookup[l][&(self.restrict(u, l, a), q.restrict(u, l, b))]
        })
        .expect("product is functorial");
        let p1 = PresheafMap { components: pairs.iter().map(|ps| ps.iter().map(|p| p.0).collect()).collect() };
        let p2 = PresheafMap { components: pairs.iter().map(|ps| ps.iter().map(|p| p.1).collect()).collect() };
        (prod, p1, p2)
    }

    /// Pullback of `f: P → R ← Q: g`, with its two projections.
    pub fn pullback(p: &Presheaf, q: &Presheaf, f: &PresheafMap, g: &PresheafMap) -> (Presheaf, PresheafMap, PresheafMap) {
        let (prod, p1, p2) = p.product(q);
        let keep: Vec<Vec<usize>> = (0..prod.site.len())
            .map(|u| {
                (0..prod.size(u))
                    .filter(|&i| f.components[u][p1.components[u][i]] == g.components[u][p2.components[u][i]])
                    .collect()
            })
            .collect();
        let (sub, incl) = prod.subpresheaf(&keep);
        (sub, incl.then(&p1), incl.then(&p2))
    }

    /// The sub-presheaf on the given element subsets (which must be closed
    /// under restriction), with its inclusion.
    pub fn subpresheaf(&self, keep: &[Vec<usize>]) -> (Presheaf, PresheafMap) {
        let site = self.site.clone();
        let labels: Vec<Vec<String>> =
            keep.iter().enumerate().map(|(u, ks)| ks.iter().map(|&a| self.labels[u][a].clone()).collect()).collect();
        let pos: Vec<HashMap<usize, usize>> =
            keep.iter().map(|ks| ks.iter().copied().enumerate().map(|(i, a)| (a, i)).collect()).collect();
        let sub = Presheaf::from_fn(site, labels, |u, l, i| pos[l][&self.restrict(u, l, keep[u][i])])
            .expect("subpresheaf closed under restriction");
        (sub, PresheafMap { components: keep.to_vec() })
    }

    /// Total element count over all opens.
    pub fn total_size(&self) -> usize {
        (0..self.site.len()).map(|u| self.size(u)).sum()
    }
}

/// Dimap tables `U → X` for every open `U`; returns `(labels, tables)`.
#[allow(clippy::type_complexity)]
pub(crate) fn representable_tables(site: &OpenSite, x: &LocalPoSpace) -> (Vec<Vec<String>>, Vec<Vec<Vec<usize>>>) {
    let mut labels = Vec::with_capacity(site.len());
    let mut tables = Vec::with_capacity(site.len());
    for u in 0..site.len() {
        let (lps, parents) = site.lps_at(u);
        let homs = enumerate_dimaps(&lps, x);
        labels.push(
            homs.iter()
                .map(|h| {
                    let parts: Vec<String> = h
                        .iter()
                        .enumerate()
                        .map(|(k, &t)| format!("{}>{}", site.base().space().name(parents[k]), x.space().name(t)))
                        .collect();
                    format!("[{}]", parts.join(","))
                })
                .collect(),
        );
        tables.push(homs);
    }
    (labels, tables)
}

/// Natural transformations between the restrictions of `p` and `q` to the
/// listed opens, which must be closed under taking subopens. Components are
/// indexed by site open; opens outside the list are left empty.
pub(crate) fn nat_search(p: &Presheaf, q: &Presheaf, opens: &[usize]) -> Vec<Vec<Vec<usize>>> {
    let site = p.site();
    let mut order: Vec<usize> = opens.to_vec();
    order.sort_by_key(|&u| site.open(u).count_ones(..));
    let slots: Vec<(usize, usize)> = order.iter().flat_map(|&u| (0..p.size(u)).map(move |a| (u, a))).collect();
    let mut comps: Vec<Vec<usize>> = (0..site.len()).map(|u| vec![usize::MAX; p.size(u)]).collect();
    let mut out = Vec::new();
    nat_rec(p, q, &order, &slots, 0, &mut comps, &mut out);
    out
}

fn nat_rec(
    p: &Presheaf,
    q: &Presheaf,
    order: &[usize],
    slots: &[(usize, usize)],
    i: usize,
    comps: &mut Vec<Vec<usize>>,
    out: &mut Vec<Vec<Vec<usize>>>,
) {
    let site = p.site();
    if i == slots.len() {
        let mut res = comps.clone();
        for (u, c) in res.iter_mut().enumerate() {
            if !order.contains(&u) {
                c.clear();
            }
        }
        out.push(res);
        return;
    }
    let (u, a) = slots[i];
    for b in 0..q.size(u) {
        // every strictly smaller open of u was assigned earlier
        let ok = site.subopens(u).filter(|&l| l != u && order.contains(&l)).all(|l| {
            comps[l][p.restrict(u, l, a)] == q.restrict(u, l, b)
        });
        if ok {
            comps[u][a] = b;
            nat_rec(p, q, order, slots, i + 1, comps, out);
        }
    }
    comps[u][a] = usize::MAX;
}

/// Witness that a presheaf fails the sheaf condition.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Counterexample {
    pub target: usize,
    pub cover: Vec<usize>,
    pub family: Vec<usize>,
    /// `0` (no amalgamation) or at least `2` (not unique).
    pub amalgamations: usize,
}

impl Counterexample {
    pub fn describe(&self, p: &Presheaf) -> String {
        let site = p.site();
        let cover: Vec<String> = self.cover.iter().map(|&u| site.name(u)).collect();
        let fam: Vec<String> = self
            .cover
            .iter()
            .zip(&self.family)
            .map(|(&u, &a)| format!("{}:{}", site.name(u), p.label(u, a)))
            .collect();
        format!(
            "target {} cover [{}] family [{}] amalgamations {}",
            site.name(self.target),
            cover.join(" "),
            fam.join(" "),
            self.amalgamations
        )
    }
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct SheafReport {
    pub is_sheaf: bool,
    pub covers_checked: usize,
    pub counterexample: Option<Counterexample>,
}
