//! Subobject classifier and exponentials in presheaves on `O(Z)`.

use std::collections::HashMap;
use std::sync::Arc;

use super::presheaf::{nat_search, Presheaf, PresheafMap};
use super::SheafError;
use crate::site::{OpenSite, Sieve};

/// `Ω`, with the sieve behind each element.
pub struct Omega {
    pub presheaf: Presheaf,
    pub sieves: Vec<Vec<Sieve>>,
    lookup: Vec<HashMap<Sieve, usize>>,
}

impl Omega {
    pub fn index(&self, s: &Sieve) -> usize {
        self.lookup[s.target][s]
    }

    /// `true : 1 → Ω`, picking the maximal sieve.
    pub fn true_map(&self) -> PresheafMap {
        let site = self.presheaf.site();
        PresheafMap { components: (0..site.len()).map(|u| vec![self.index(&site.maximal_sieve(u))]).collect() }
    }
}

/// `Ω(U)` = sieves on `U`; restriction is pullback.
pub fn subobject_classifier(site: Arc<OpenSite>) -> Omega {
    let sieves: Vec<Vec<Sieve>> = (0..site.len()).map(|u| site.sieves(u)).collect();
    let lookup: Vec<HashMap<Sieve, usize>> =
        sieves.iter().map(|ss| ss.iter().cloned().enumerate().map(|(i, s)| (s, i)).collect()).collect();
    let labels = sieves
        .iter()
        .map(|ss| ss.iter().map(|s| format!("[{}]", s.describe(&site).join(" "))).collect())
        .collect();
    let s2 = site.clone();
    let presheaf = Presheaf::from_fn(site, labels, |u, l, i| {
        let pulled = s2.pullback_sieve(&sieves[u][i], l).expect("l ⊆ u");
        lookup[l][&pulled]
    })
    .expect("Ω is functorial");
    Omega { presheaf, sieves, lookup }
}

/// The characteristic map `X → Ω` of a mono `m : S ↪ X`:
/// `χ(x) = {L ⊆ U | x|_L ∈ m(S(L))}`.
pub fn classify(omega: &Omega, x: &Presheaf, m: &PresheafMap) -> Result<PresheafMap, SheafError> {
    if !m.is_injective() {
        return Err(SheafError::NotMono);
    }
    let site = x.site();
    let components = (0..site.len())
        .map(|u| {
            (0..x.size(u))
                .map(|a| {
                    let mut members = fixedbitset::FixedBitSet::with_capacity(site.len());
                    for l in site.subopens(u) {
                        if m.components[l].contains(&x.restrict(u, l, a)) {
                            members.insert(l);
                        }
                    }
                    omega.index(&Sieve { target: u, members })
                })
                .collect()
        })
        .collect();
    Ok(PresheafMap { components })
}

/// Elements of `X` whose characteristic sieve is maximal (the pullback of
/// `true` along `χ`), per open.
pub fn pullback_of_true(omega: &Omega, chi: &PresheafMap) -> Vec<Vec<usize>> {
    let tr = omega.true_map();
    chi.components
        .iter()
        .enumerate()
        .map(|(u, c)| (0..c.len()).filter(|&a| c[a] == tr.components[u][0]).collect())
        .collect()
}

/// `Q^P`, with the component tables of each element.
pub struct Exponential {
    pub presheaf: Presheaf,
    /// `tables[u][i]` = components (per site open) of the `i`-th natural
    /// transformation `P|_U → Q|_U`; opens outside `U` are empty.
    pub tables: Vec<Vec<Vec<Vec<usize>>>>,
}

/// `Q^P(U)` = natural transformations `y(U) × P → Q`, i.e. `P|_U → Q|_U`.
pub fn exponential(p: &Presheaf, q: &Presheaf) -> Exponential {
    let site = p.site().clone();
    let k = site.len();
    let tables: Vec<Vec<Vec<Vec<usize>>>> =
        (0..k).map(|u| nat_search(p, q, &site.subopens(u).collect::<Vec<_>>())).collect();
    let lookup: Vec<HashMap<Vec<Vec<usize>>, usize>> =
        tables.iter().map(|ts| ts.iter().cloned().enumerate().map(|(i, t)| (t, i)).collect()).collect();
    let labels = tables
        .iter()
        .enumerate()
        .map(|(u, ts)| {
            ts.iter()
                .map(|t| {
                    let parts: Vec<String> = site
                        .subopens(u)
                        .map(|l| {
                            let m: Vec<String> =
                                t[l].iter().enumerate().map(|(a, &b)| format!("{}>{}", p.label(l, a), q.label(l, b))).collect();
                            format!("{}:{}", site.name(l), m.join(","))
                        })
                        .collect();
                    format!("<{}>", parts.join(";"))
                })
                .collect()
        })
        .collect();
    let s2 = site.clone();
    let presheaf = Presheaf::from_fn(site, labels, |u, l, i| {
        let mut t = tables[u][i].clone();
        for (v, c) in t.iter_mut().enumerate() {
            if !s2.contains(l, v) {
                c.clear();
            }
        }
        lookup[l][&t]
    })
    .expect("exponential is functorial");
    Exponential { presheaf, tables }
}

/// `φ : Y × P → Q` (on `y.product(p)`) to its transpose `Y → Q^P`.
pub fn curry(y: &Presheaf, p: &Presheaf, exp: &Exponential, phi: &PresheafMap) -> PresheafMap {
    let site = y.site();
    let lookups: Vec<HashMap<&Vec<Vec<usize>>, usize>> =
        exp.tables.iter().map(|ts| ts.iter().enumerate().map(|(i, t)| (t, i)).collect()).collect();
    let components = (0..site.len())
        .map(|u| {
            (0..y.size(u))
                .map(|e| {
                    let mut t: Vec<Vec<usize>> = vec![Vec::new(); site.len()];
                    for l in site.subopens(u) {
                        let el = y.restrict(u, l, e);
                        t[l] = (0..p.size(l)).map(|s| phi.components[l][el * p.size(l) + s]).collect();
                    }
                    lookups[u][&t]
                })
                .collect()
        })
        .collect();
    PresheafMap { components }
}

/// `ψ : Y → Q^P` back to `Y × P → Q`.
pub fn uncurry(y: &Presheaf, p: &Presheaf, exp: &Exponential, psi: &PresheafMap) -> PresheafMap {
    let site = y.site();
    let components = (0..site.len())
        .map(|u| {
            let mut c = Vec::with_capacity(y.size(u) * p.size(u));
            for e in 0..y.size(u) {
                let t = &exp.tables[u][psi.components[u][e]];
                for s in 0..p.size(u) {
                    c.push(t[u][s]);
                }
            }
            c
        })
        .collect();
    PresheafMap { components }
}

/// Checks `Hom(Y × P, Q) ≅ Hom(Y, Q^P)` by enumerating both sides and
/// confirming that currying is a bijection with inverse uncurrying.
pub fn check_exponential_adjunction(y: &Presheaf, p: &Presheaf, q: &Presheaf) -> bool {
    let exp = exponential(p, q);
    let (yp, _, _) = y.product(p);
    let left = yp.morphisms_to(q);
    let right = y.morphisms_to(&exp.presheaf);
    if left.len() != right.len() {
        return false;
    }
    let mut images: Vec<PresheafMap> = left.iter().map(|phi| curry(y, p, &exp, phi)).collect();
    let round_trip = left.iter().zip(&images).all(|(phi, psi)| uncurry(y, p, &exp, psi) == *phi);
    images.sort();
    images.dedup();
    round_trip && images.len() == right.len() && images.iter().all(|m| y.is_natural(&exp.presheaf, m))
}
