//! Sheafification by applying the plus construction twice.
//!
//! `P⁺(U)` is the colimit, over covering sieves of `U` ordered by refinement,
//! of the matching families for `P`. Every covering sieve on `U` contains the
//! sieve generated by the minimal opens of the points of `U`, so that sieve is
//! final in the diagram and the colimit is just its set of matching families.
//! A matching family there is a choice `a_x ∈ P(min_open x)` for `x ∈ U`
//! that agrees on overlaps.

use std::collections::HashMap;
use std::sync::Arc;

use super::presheaf::{Presheaf, PresheafMap};

/// Point-indexed generators of the minimal covering sieve of `u`.
fn generators(p: &Presheaf, u: usize) -> Vec<(usize, usize)> {
    let site = p.site();
    site.open(u).ones().map(|x| (x, site.min_open(x))).collect()
}

/// Compatible families `(a_x)_{x ∈ u}` with `a_x ∈ P(min_open x)`.
fn families(p: &Presheaf, u: usize) -> Vec<Vec<usize>> {
    let gens: Vec<usize> = generators(p, u).into_iter().map(|(_, m)| m).collect();
    p.matching_families(&gens)
}

/// Elements of `P⁺`, per open, as point-indexed families.
pub struct Plus {
    pub presheaf: Presheaf,
    /// `families[u][i][k]` is the value at the `k`-th point of `u`.
    pub families: Vec<Vec<Vec<usize>>>,
}

pub fn plus_full(p: &Presheaf) -> Plus {
    let site: Arc<_> = p.site().clone();
    let k = site.len();
    let fams: Vec<Vec<Vec<usize>>> = (0..k).map(|u| families(p, u)).collect();
    let pts: Vec<Vec<usize>> = (0..k).map(|u| site.open(u).ones().collect()).collect();
    let labels: Vec<Vec<String>> = (0..k)
        .map(|u| {
            fams[u]
                .iter()
                .map(|f| {
                    let parts: Vec<String> = pts[u]
                        .iter()
                        .zip(f)
                        .map(|(&x, &a)| format!("{}={}", site.base().space().name(x), p.label(site.min_open(x), a)))
                        .collect();
                    format!("<{}>", parts.join(","))
                })
                .collect()
        })
        .collect();
    let lookup: Vec<HashMap<Vec<usize>, usize>> =
        fams.iter().map(|fs| fs.iter().cloned().enumerate().map(|(i, f)| (f, i)).collect()).collect();
    let presheaf = Presheaf::from_fn(site, labels, |u, l, i| {
        // keep the entries of the points of l
        let sub: Vec<usize> = pts[u]
            .iter()
            .zip(&fams[u][i])
            .filter(|(x, _)| pts[l].binary_search(x).is_ok())
            .map(|(_, &a)| a)
            .collect();
        lookup[l][&sub]
    })
    .expect("plus construction is functorial");
    Plus { presheaf, families: fams }
}

pub fn plus(p: &Presheaf) -> Presheaf {
    plus_full(p).presheaf
}

/// `P → P⁺`, sending `s` to the family of its restrictions.
pub fn plus_unit(p: &Presheaf) -> (Presheaf, PresheafMap) {
    let full = plus_full(p);
    let site = p.site();
    let components = (0..site.len())
        .map(|u| {
            let lookup: HashMap<&Vec<usize>, usize> = full.families[u].iter().enumerate().map(|(i, f)| (f, i)).collect();
            (0..p.size(u))
                .map(|a| {
                    let fam: Vec<usize> = generators(p, u).iter().map(|&(_, m)| p.restrict(u, m, a)).collect();
                    lookup[&fam]
                })
                .collect()
        })
        .collect();
    (full.presheaf, PresheafMap { components })
}

/// `f⁺ : P⁺ → Q⁺`, applying `f` entrywise.
pub fn plus_map(p: &Presheaf, q: &Presheaf, f: &PresheafMap) -> (Presheaf, Presheaf, PresheafMap) {
    let fp = plus_full(p);
    let fq = plus_full(q);
    let site = p.site();
    let components = (0..site.len())
        .map(|u| {
            let lookup: HashMap<&Vec<usize>, usize> = fq.families[u].iter().enumerate().map(|(i, f)| (f, i)).collect();
            let gens = generators(p, u);
            fp.families[u]
                .iter()
                .map(|fam| {
                    let image: Vec<usize> = gens.iter().zip(fam).map(|(&(_, m), &a)| f.components[m][a]).collect();
                    lookup[&image]
                })
                .collect()
        })
        .collect();
    (fp.presheaf, fq.presheaf, PresheafMap { components })
}

/// `a(P) = P⁺⁺` together with the unit `η_P : P → a(P)`.
pub fn sheafify(p: &Presheaf) -> (Presheaf, PresheafMap) {
    let (p1, eta1) = plus_unit(p);
    let (p2, eta2) = plus_unit(&p1);
    (p2, eta1.then(&eta2))
}

/// `a(f) : a(P) → a(Q)`.
pub fn sheafify_map(p: &Presheaf, q: &Presheaf, f: &PresheafMap) -> PresheafMap {
    let (p1, q1, f1) = plus_map(p, q, f);
    let (_, _, f2) = plus_map(&p1, &q1, &f1);
    f2
}
