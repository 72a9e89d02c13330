#![allow(dead_code)]

use std::collections::HashMap;
use std::sync::Arc;

use geoconc::dispace::{canonicalize, free_lps, Chart, LocalPoSpace, OrderAtlas};
use geoconc::finspace::{set_from, FinSpace, PointSet};
use geoconc::order::Relation;
use geoconc::sheaf::{Presheaf, PresheafMap};
use geoconc::site::OpenSite;
use rand::seq::SliceRandom;
use rand::Rng;
use rand_chacha::ChaCha8Rng;

pub use rand::SeedableRng;

pub fn rng(seed: u64) -> ChaCha8Rng {
    ChaCha8Rng::seed_from_u64(seed)
}

pub fn site_of(z: &LocalPoSpace) -> Arc<OpenSite> {
    Arc::new(OpenSite::new(z.clone()).unwrap())
}

/// A random finite space with at most `max_points` points and `max_opens`
/// opens, from a random transitive specialization relation.
pub fn random_space(r: &mut ChaCha8Rng, max_points: usize, max_opens: usize) -> FinSpace {
    loop {
        let n = r.gen_range(1..=max_points);
        let p = r.gen_range(0.0..0.5);
        let mut rel = Relation::identity(n);
        for x in 0..n {
            for y in 0..n {
                if x != y && r.gen_bool(p) {
                    rel.set(x, y);
                }
            }
        }
        rel.close();
        let names: Vec<String> = (0..n).map(|i| format!("p{i}")).collect();
        let mos: Vec<PointSet> = (0..n).map(|x| set_from(n, (0..n).filter(|&y| rel.le(x, y)))).collect();
        let space = FinSpace::from_min_opens(names, mos).unwrap();
        if space.opens_bounded(max_opens).is_ok() {
            return space;
        }
    }
}

/// A random partial order on all points (random linear extension, random
/// subset of its pairs, closed).
pub fn random_order(r: &mut ChaCha8Rng, n: usize) -> Relation {
    let mut perm: Vec<usize> = (0..n).collect();
    perm.shuffle(r);
    let mut rel = Relation::identity(n);
    for i in 0..n {
        for j in i + 1..n {
            if r.gen_bool(0.4) {
                rel.set(perm[i], perm[j]);
            }
        }
    }
    rel.close();
    rel
}

fn restrict(rel: &Relation, s: &PointSet) -> Relation {
    let n = rel.size();
    let mut out = Relation::empty(n);
    for x in s.ones() {
        for y in s.ones() {
            if rel.le(x, y) {
                out.set(x, y);
            }
        }
    }
    out
}

/// A random atlas whose charts take their orders from `pool`; `None` if the
/// draw is incompatible.
pub fn random_atlas(r: &mut ChaCha8Rng, space: &FinSpace, pool: &[Relation]) -> Option<OrderAtlas> {
    let opens: Vec<PointSet> = space.opens().into_iter().filter(|o| o.count_ones(..) > 0).collect();
    let mut charts = Vec::new();
    let mut covered = space.empty_set();
    while covered != space.full() {
        let o = opens.choose(r).unwrap().clone();
        let ord = pool.choose(r).unwrap();
        covered.union_with(&o);
        charts.push(Chart::new(o.clone(), restrict(ord, &o)));
    }
    if space.is_empty() {
        return OrderAtlas::new(space.clone(), Vec::new()).ok();
    }
    OrderAtlas::new(space.clone(), charts).ok()
}

/// A random local po-space on `space`.
pub fn random_lps(r: &mut ChaCha8Rng, space: &FinSpace) -> LocalPoSpace {
    for _ in 0..50 {
        let pool: Vec<Relation> = (0..2).map(|_| random_order(r, space.len())).collect();
        if let Some(a) = random_atlas(r, space, &pool) {
            return canonicalize(&a);
        }
    }
    free_lps(space)
}

/// Closes element choices downward under restriction.
pub fn close_down(p: &Presheaf, keep: &mut [Vec<usize>]) {
    let site = p.site().clone();
    loop {
        let mut changed = false;
        for u in 0..site.len() {
            for l in site.subopens(u) {
                for a in keep[u].clone() {
                    let b = p.restrict(u, l, a);
                    if !keep[l].contains(&b) {
                        keep[l].push(b);
                        changed = true;
                    }
                }
            }
        }
        if !changed {
            break;
        }
    }
    for k in keep.iter_mut() {
        k.sort_unstable();
    }
}

/// A random presheaf: a random sub-presheaf of a representable, optionally
/// multiplied by a constant presheaf (which is never a sheaf).
pub fn random_presheaf(r: &mut ChaCha8Rng, site: &Arc<OpenSite>) -> Presheaf {
    let targets = [
        geoconc::fixtures::point(),
        geoconc::fixtures::d2(),
        geoconc::fixtures::interval(),
        geoconc::fixtures::sierpinski_directed(),
        geoconc::fixtures::fork(),
    ];
    let y = Presheaf::yoneda(site.clone(), targets.choose(r).unwrap());
    let base = if r.gen_bool(0.25) {
        let k = r.gen_range(1..=2);
        let labels = vec![(0..k).map(|i| format!("c{i}")).collect::<Vec<_>>(); site.len()];
        let c = Presheaf::from_fn(site.clone(), labels, |_, _, a| a).unwrap();
        y.product(&c).0
    } else {
        y
    };
    let density = r.gen_range(0.3..1.0);
    let mut keep: Vec<Vec<usize>> =
        (0..site.len()).map(|u| (0..base.size(u)).filter(|_| r.gen_bool(density)).collect()).collect();
    close_down(&base, &mut keep);
    base.subpresheaf(&keep).0
}

/// A random span `P → R ← Q` of sub-presheaf inclusions.
pub fn random_span(r: &mut ChaCha8Rng, site: &Arc<OpenSite>) -> (Presheaf, Presheaf, Presheaf, PresheafMap, PresheafMap) {
    let rr = random_presheaf(r, site);
    let sub = |r: &mut ChaCha8Rng| {
        let mut keep: Vec<Vec<usize>> =
            (0..site.len()).map(|u| (0..rr.size(u)).filter(|_| r.gen_bool(0.6)).collect()).collect();
        close_down(&rr, &mut keep);
        rr.subpresheaf(&keep)
    };
    let (p, f) = sub(r);
    let (q, g) = sub(r);
    (p, q, rr, f, g)
}

/// Small bases for random presheaves: fixtures plus random spaces.
pub fn bases(r: &mut ChaCha8Rng, extra: usize) -> Vec<LocalPoSpace> {
    let mut out: Vec<LocalPoSpace> = geoconc::fixtures::catalogue(4).into_iter().map(|(_, z)| z).collect();
    for _ in 0..extra {
        let s = random_space(r, 4, 10);
        out.push(random_lps(r, &s));
    }
    out
}

/// Presheaf given only by values, for quick fixtures.
pub fn values_only(site: &Arc<OpenSite>, labels: Vec<Vec<String>>) -> Presheaf {
    Presheaf::from_partial(site.clone(), labels, HashMap::new()).unwrap()
}

pub mod oracles;
