//! Di-étale bundles and their equivalence with sheaves on `O(Z)`.
//!
//! `Γ` takes a bundle to its presheaf of sections and `Λ` takes a presheaf to
//! its space of germs. On a finite base the germs of `P` at `x` are exactly
//! `P(min_open x)`, so a point of `Λ(P)` is a pair `(x, t)` with
//! `t ∈ P(min_open x)`.

use std::collections::HashMap;
use std::sync::Arc;

use thiserror::Error;

use crate::dispace::{enumerate_dimaps_among, is_dimap, is_iso, DispaceError, LocalPoSpace};
use crate::finspace::{set_from, FinSpace, PointSet, SpaceError};
use crate::order::Relation;
use crate::sheaf::{Presheaf, PresheafMap};
use crate::site::OpenSite;

#[derive(Debug, Error)]
pub enum EtaleError {
    #[error(transparent)]
    Dispace(#[from] DispaceError),
    #[error(transparent)]
    Space(#[from] SpaceError),
    #[error("projection is not a dimap")]
    NotDimap,
    #[error("not a local dihomeomorphism at {0}")]
    NotEtale(String),
    #[error("site is not over the bundle's base")]
    WrongBase,
}

/// A dimap `p : W → Z`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Bundle {
    pub total: LocalPoSpace,
    pub base: LocalPoSpace,
    pub projection: Vec<usize>,
}

impl Bundle {
    pub fn new(total: LocalPoSpace, base: LocalPoSpace, projection: Vec<usize>) -> Result<Self, EtaleError> {
        if !is_dimap(&total, &base, &projection) {
            return Err(EtaleError::NotDimap);
        }
        Ok(Bundle { total, base, projection })
    }

    pub fn identity(z: &LocalPoSpace) -> Self {
        Bundle { total: z.clone(), base: z.clone(), projection: (0..z.len()).collect() }
    }

    pub fn fiber(&self, x: usize) -> PointSet {
        set_from(self.total.len(), (0..self.total.len()).filter(|&w| self.projection[w] == x))
    }
}

/// A bundle with a witness open for each point of the total space.
#[derive(Clone, Debug)]
pub struct EtaleBundle {
    pub bundle: Bundle,
    pub witnesses: Vec<PointSet>,
}

/// `θ : W → W'` over the same base.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct BundleMorphism {
    pub theta: Vec<usize>,
}

impl BundleMorphism {
    /// `θ` is a dimap and `p' ∘ θ = p`.
    pub fn is_valid(&self, from: &Bundle, to: &Bundle) -> bool {
        is_dimap(&from.total, &to.total, &self.theta)
            && (0..from.total.len()).all(|w| to.projection[self.theta[w]] == from.projection[w])
    }
}

/// Does `p` restrict to an isomorphism from `v` onto an open of the base?
pub fn local_iso_on(b: &Bundle, v: &PointSet) -> bool {
    let image = set_from(b.base.len(), v.ones().map(|w| b.projection[w]));
    if image.count_ones(..) != v.count_ones(..) || !b.base.space().is_open(&image) {
        return false;
    }
    let (src, src_parent) = b.total.restrict(v);
    let (tgt, tgt_parent) = b.base.restrict(&image);
    let map: Vec<usize> = src_parent
        .iter()
        .map(|&w| tgt_parent.binary_search(&b.projection[w]).expect("image point"))
        .collect();
    is_iso(&src, &tgt, &map)
}

/// Witness opens for every point, or the first point that has none.
///
/// Candidates are tried smallest first, and the smallest open around `w` is
/// `min_open(w)`. If `p` is a local iso on some open `V ∋ w`, it is one on
/// the open `min_open(w) ⊆ V` as well, so that candidate decides the point.
pub fn is_etale(b: &Bundle) -> Result<Vec<PointSet>, usize> {
    (0..b.total.len())
        .map(|w| {
            let v = b.total.space().min_open(w).clone();
            if local_iso_on(b, &v) {
                Ok(v)
            } else {
                Err(w)
            }
        })
        .collect()
}

pub fn etale(b: Bundle) -> Result<EtaleBundle, EtaleError> {
    match is_etale(&b) {
        Ok(witnesses) => Ok(EtaleBundle { bundle: b, witnesses }),
        Err(w) => Err(EtaleError::NotEtale(b.total.space().name(w).to_string())),
    }
}

/// `Γ(b)` on `O(Z)`, with each section as its table of total-space points.
pub struct Sections {
    pub presheaf: Presheaf,
    /// `tables[u][i][k]`: value of the `i`-th section at the `k`-th point of `u`.
    pub tables: Vec<Vec<Vec<usize>>>,
}

impl Sections {
    pub fn index_of(&self, u: usize, table: &[usize]) -> Option<usize> {
        self.tables[u].iter().position(|t| t == table)
    }
}

/// Sections `s : U → W` with `p ∘ s` the inclusion.
pub fn sections(site: Arc<OpenSite>, b: &Bundle) -> Result<Sections, EtaleError> {
    if site.base() != &b.base {
        return Err(EtaleError::WrongBase);
    }
    let fibers: Vec<PointSet> = (0..b.base.len()).map(|x| b.fiber(x)).collect();
    let pts: Vec<Vec<usize>> = (0..site.len()).map(|u| site.open(u).ones().collect()).collect();
    let tables: Vec<Vec<Vec<usize>>> = (0..site.len())
        .map(|u| {
            let (sub, parent) = b.base.restrict(site.open(u));
            let allowed: Vec<PointSet> = parent.iter().map(|&x| fibers[x].clone()).collect();
            enumerate_dimaps_among(&sub, &b.total, &allowed, usize::MAX).expect("uncapped")
        })
        .collect();
    let lookup: Vec<HashMap<&Vec<usize>, usize>> =
        tables.iter().map(|ts| ts.iter().enumerate().map(|(i, t)| (t, i)).collect()).collect();
    let wname = |w: usize| b.total.space().name(w).to_string();
    let labels = tables
        .iter()
        .map(|ts| ts.iter().map(|t| format!("[{}]", t.iter().map(|&w| wname(w)).collect::<Vec<_>>().join(","))).collect())
        .collect();
    let presheaf = Presheaf::from_fn(site.clone(), labels, |u, l, i| {
        let sub: Vec<usize> = pts[u]
            .iter()
            .zip(&tables[u][i])
            .filter(|(x, _)| site.open(l).contains(**x))
            .map(|(_, &w)| w)
            .collect();
        lookup[l][&sub]
    })
    .expect("sections restrict functorially");
    Ok(Sections { presheaf, tables })
}

/// `Λ(P)`: the germ space, its projection, and the germ behind each point.
pub struct GermSpace {
    pub bundle: EtaleBundle,
    /// `(x, t)` with `t ∈ P(min_open x)`, indexed like the total space.
    pub germs: Vec<(usize, usize)>,
    index: HashMap<(usize, usize), usize>,
}

impl GermSpace {
    pub fn point_of(&self, x: usize, t: usize) -> usize {
        self.index[&(x, t)]
    }
}

pub fn germ_space(p: &Presheaf) -> GermSpace {
    let site = p.site();
    let z = site.base();
    let zs = z.space();
    let mut germs = Vec::new();
    for x in 0..z.len() {
        for t in 0..p.size(site.min_open(x)) {
            germs.push((x, t));
        }
    }
    let index: HashMap<(usize, usize), usize> = germs.iter().enumerate().map(|(i, &g)| (g, i)).collect();
    let n = germs.len();
    let mut names: Vec<String> =
        germs.iter().map(|&(x, t)| format!("{}@{}", p.label(site.min_open(x), t), zs.name(x))).collect();
    let mut seen = HashMap::new();
    for (i, name) in names.iter_mut().enumerate() {
        if seen.insert(name.clone(), i).is_some() {
            name.push_str(&format!("#{i}"));
        }
    }
    // the germ of t at each y ∈ min_open(x)
    let neighbours = |x: usize, t: usize| -> Vec<(usize, usize)> {
        zs.min_open(x)
            .ones()
            .map(|y| (y, index[&(y, p.restrict(site.min_open(x), site.min_open(y), t))]))
            .collect()
    };
    let min_opens: Vec<PointSet> =
        germs.iter().map(|&(x, t)| set_from(n, neighbours(x, t).into_iter().map(|(_, g)| g))).collect();
    let space = FinSpace::from_min_opens(names, min_opens).expect("germ neighbourhoods are transitive");
    let germ_rels: Vec<Relation> = germs
        .iter()
        .map(|&(x, t)| {
            let nb = neighbours(x, t);
            let mut r = Relation::empty(n);
            for &(y1, g1) in &nb {
                for &(y2, g2) in &nb {
                    if z.le_at(x, y1, y2) {
                        r.set(g1, g2);
                    }
                }
            }
            r
        })
        .collect();
    let total = LocalPoSpace::from_germs(space, germ_rels).expect("germ orders are compatible");
    let projection: Vec<usize> = germs.iter().map(|&(x, _)| x).collect();
    let bundle = Bundle { total, base: z.clone(), projection };
    let bundle = etale(bundle).expect("germ spaces are étale");
    GermSpace { bundle, germs, index }
}

/// `η_P : P → ΓΛP`, `s ↦ (x ↦ germ_x s)`.
pub fn unit(p: &Presheaf, lambda: &GermSpace, gamma: &Sections) -> PresheafMap {
    let site = p.site();
    let components = (0..site.len())
        .map(|u| {
            (0..p.size(u))
                .map(|s| {
                    let table: Vec<usize> = site
                        .open(u)
                        .ones()
                        .map(|x| lambda.point_of(x, p.restrict(u, site.min_open(x), s)))
                        .collect();
                    gamma.index_of(u, &table).expect("germ section")
                })
                .collect()
        })
        .collect();
    PresheafMap { components }
}

/// `ε : ΛΓb → b` and its inverse `θ`, as point tables.
pub struct Counit {
    pub epsilon: BundleMorphism,
    pub theta: BundleMorphism,
}

/// Builds `ε(germ_x s) = s(x)` and `θ(w) = germ_{p w} q` where `q` inverts `p`
/// on the witness open of `w`.
pub fn counit(b: &EtaleBundle, gamma: &Sections, lambda: &GermSpace) -> Counit {
    let bd = &b.bundle;
    let site = gamma.presheaf.site();
    let epsilon: Vec<usize> = lambda
        .germs
        .iter()
        .map(|&(x, t)| {
            let mo = site.min_open(x);
            let k = site.open(mo).ones().position(|y| y == x).expect("x ∈ min_open x");
            gamma.tables[mo][t][k]
        })
        .collect();
    let theta: Vec<usize> = (0..bd.total.len())
        .map(|w| {
            let x = bd.projection[w];
            let mo = site.min_open(x);
            let v = &b.witnesses[w];
            let q: Vec<usize> = site
                .open(mo)
                .ones()
                .map(|y| v.ones().find(|&u| bd.projection[u] == y).expect("witness covers min_open"))
                .collect();
            lambda.point_of(x, gamma.index_of(mo, &q).expect("local inverse is a section"))
        })
        .collect();
    Counit { epsilon: BundleMorphism { theta: epsilon }, theta: BundleMorphism { theta } }
}

/// Summary of a full round trip through `Γ` and `Λ`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct RoundTrip {
    pub etale: bool,
    pub epsilon_dimap: bool,
    pub theta_dimap: bool,
    pub mutually_inverse: bool,
    pub eta_iso: bool,
}

impl RoundTrip {
    pub fn ok(&self) -> bool {
        self.etale && self.epsilon_dimap && self.theta_dimap && self.mutually_inverse && self.eta_iso
    }
}

/// `ΛΓb ≅ b` via `ε`/`θ`, then `Γb ≅ ΓΛΓb` via `η`.
pub fn roundtrip(site: Arc<OpenSite>, b: &Bundle) -> Result<RoundTrip, EtaleError> {
    let eb = match etale(b.clone()) {
        Ok(eb) => eb,
        Err(EtaleError::NotEtale(_)) => {
            return Ok(RoundTrip {
                etale: false,
                epsilon_dimap: false,
                theta_dimap: false,
                mutually_inverse: false,
                eta_iso: false,
            })
        }
        Err(e) => return Err(e),
    };
    let gamma = sections(site.clone(), b)?;
    let lambda = germ_space(&gamma.presheaf);
    let c = counit(&eb, &gamma, &lambda);
    let lb = &lambda.bundle.bundle;
    let epsilon_dimap = c.epsilon.is_valid(lb, b);
    let theta_dimap = c.theta.is_valid(b, lb);
    let mutually_inverse = (0..lb.total.len()).all(|g| c.theta.theta[c.epsilon.theta[g]] == g)
        && (0..b.total.len()).all(|w| c.epsilon.theta[c.theta.theta[w]] == w);
    let gl = sections(site, lb)?;
    let eta = unit(&gamma.presheaf, &lambda, &gl);
    let eta_iso = eta.is_iso(&gamma.presheaf, &gl.presheaf);
    Ok(RoundTrip { etale: true, epsilon_dimap, theta_dimap, mutually_inverse, eta_iso })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::dispace::free_lps;
    use crate::fixtures::{catalogue, d2, interval, point};
    use crate::sheaf::{plus_full, sheafify};

    fn site_of(z: &LocalPoSpace) -> Arc<OpenSite> {
        Arc::new(OpenSite::new(z.clone()).unwrap())
    }

    fn two_sheets() -> Bundle {
        let w = free_lps(&FinSpace::discrete(&["a-1", "a1", "b-1", "b1"]));
        Bundle::new(w, d2(), vec![0, 1, 0, 1]).unwrap()
    }

    #[test]
    fn etale_examples() {
        for (_, z) in catalogue(5) {
            let w = is_etale(&Bundle::identity(&z)).unwrap();
            assert_eq!(w, z.space().min_opens().to_vec());
        }
        assert!(is_etale(&two_sheets()).is_ok());
        let lump = free_lps(&FinSpace::from_min_opens(
            vec!["a".into(), "b".into()],
            vec![set_from(2, [0, 1]), set_from(2, [0, 1])],
        )
        .unwrap());
        let fold = Bundle::new(lump, point(), vec![0, 0]).unwrap();
        assert_eq!(is_etale(&fold), Err(0));
    }

    #[test]
    fn section_counts() {
        let z = d2();
        let site = site_of(&z);
        let g = sections(site.clone(), &Bundle::identity(&z)).unwrap();
        assert!((0..site.len()).all(|u| g.presheaf.size(u) == 1));
        let g2 = sections(site.clone(), &two_sheets()).unwrap();
        assert_eq!(g2.presheaf.size(site.top()), 4);
        assert_eq!(g2.presheaf.size(site.index_of_names(&["-1"]).unwrap()), 2);
        assert_eq!(g2.presheaf.size(site.empty_open()), 1);
        assert!(g2.presheaf.is_sheaf());
    }

    #[test]
    fn germ_spaces() {
        let z = interval();
        let site = site_of(&z);
        let one = Presheaf::terminal(site.clone());
        let l = germ_space(&one);
        assert!(is_iso(&l.bundle.bundle.total, &z, &l.bundle.bundle.projection));

        let z = d2();
        let site = site_of(&z);
        let top = site.top();
        let labels = (0..site.len()).map(|u| if u == top { Vec::new() } else { vec!["*".to_string()] }).collect();
        let p = Presheaf::from_partial(site.clone(), labels, HashMap::new()).unwrap();
        let l = germ_space(&p);
        assert_eq!(l.bundle.bundle.total.len(), 2);
        assert!(l.bundle.bundle.total.space().min_opens().iter().all(|m| m.count_ones(..) == 1));

        // ΓΛP is the sheafification, and η factors through it
        let gl = sections(site.clone(), &l.bundle.bundle).unwrap();
        let eta = unit(&p, &l, &gl);
        let plus = plus_full(&p);
        let (a, eta_a) = sheafify(&p);
        let (_, eta_plus) = crate::sheaf::plus_unit(&plus.presheaf);
        let iso = PresheafMap {
            components: (0..site.len())
                .map(|u| {
                    (0..gl.presheaf.size(u))
                        .map(|i| {
                            let fam: Vec<usize> = gl.tables[u][i].iter().map(|&g| l.germs[g].1).collect();
                            plus.families[u].iter().position(|f| *f == fam).unwrap()
                        })
                        .collect()
                })
                .collect(),
        }
        .then(&eta_plus);
        assert!(iso.is_iso(&gl.presheaf, &a));
        assert!(gl.presheaf.is_natural(&a, &iso));
        assert_eq!(eta.then(&iso), eta_a);
    }

    #[test]
    fn representables_give_inclusions() {
        let z = interval();
        let site = site_of(&z);
        for u in 0..site.len() {
            let y = Presheaf::yoneda_open(site.clone(), u);
            let l = germ_space(&y);
            let b = &l.bundle.bundle;
            assert_eq!(b.total.len(), site.open(u).count_ones(..));
            let image = set_from(z.len(), b.projection.iter().copied());
            assert_eq!(&image, site.open(u));
            let (sub, parent) = z.restrict(site.open(u));
            let map: Vec<usize> = b.projection.iter().map(|x| parent.binary_search(x).unwrap()).collect();
            assert!(is_iso(&b.total, &sub, &map));
        }
    }

    #[test]
    fn roundtrips() {
        let z = d2();
        let rt = roundtrip(site_of(&z), &two_sheets()).unwrap();
        assert!(rt.ok());
        for (_, z) in catalogue(5) {
            assert!(roundtrip(site_of(&z), &Bundle::identity(&z)).unwrap().ok());
        }
        let z = d2();
        let site = site_of(&z);
        let y = Presheaf::yoneda(site.clone(), &interval());
        let l = germ_space(&y);
        let gl = sections(site.clone(), &l.bundle.bundle).unwrap();
        assert!(unit(&y, &l, &gl).is_iso(&y, &gl.presheaf));
    }

    #[test]
    fn counit_on_two_sheets() {
        let b = two_sheets();
        let site = site_of(&b.base);
        let eb = etale(b.clone()).unwrap();
        let gamma = sections(site, &b).unwrap();
        let lambda = germ_space(&gamma.presheaf);
        let c = counit(&eb, &gamma, &lambda);
        let mut hit = c.epsilon.theta.clone();
        hit.sort_unstable();
        assert_eq!(hit, vec![0, 1, 2, 3]);
    }
}
