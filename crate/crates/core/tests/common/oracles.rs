//! Brute-force reference implementations. They share no code with the
//! library algorithms they check beyond the data types.

use std::collections::{BTreeSet, HashMap};

use geoconc::dispace::OrderAtlas;
use geoconc::finspace::PointSet;
use geoconc::pv::ProgressModel;
use geoconc::sheaf::Presheaf;

fn orders_agree(a: &geoconc::Relation, b: &geoconc::Relation, s: &PointSet) -> bool {
    s.ones().all(|x| s.ones().all(|y| a.le(x, y) == b.le(x, y)))
}

/// Every chart point of `coarse` has a chart of `fine` around it, inside the
/// chart and with the same order there.
pub fn refines(fine: &[(PointSet, geoconc::Relation)], coarse: &OrderAtlas) -> bool {
    coarse.charts.iter().all(|v| {
        v.carrier.ones().all(|x| {
            fine.iter().any(|(w, ord)| w.contains(x) && w.is_subset(&v.carrier) && orders_agree(ord, &v.order, w))
        })
    })
}

/// Two atlases are equivalent iff they have a common refinement. Every common
/// refinement can be shrunk to charts lying in one chart of each atlas with
/// agreeing orders, so it suffices to test the family of all such charts.
pub fn atlases_equivalent(a: &OrderAtlas, b: &OrderAtlas) -> bool {
    let opens: Vec<PointSet> = a.space.opens();
    let mut candidates = Vec::new();
    for v in &a.charts {
        for u in &b.charts {
            for w in &opens {
                if w.count_ones(..) > 0 && w.is_subset(&v.carrier) && w.is_subset(&u.carrier) && orders_agree(&v.order, &u.order, w) {
                    candidates.push((w.clone(), v.order.clone()));
                }
            }
        }
    }
    refines(&candidates, a) && refines(&candidates, b)
}

/// Subopens of `u` (including `∅` and `u`).
fn subopens(p: &Presheaf, u: usize) -> Vec<usize> {
    let site = p.site();
    (0..site.len()).filter(|&l| site.open(l).is_subset(site.open(u))).collect()
}

fn union_is(p: &Presheaf, family: &[usize], u: usize) -> bool {
    let site = p.site();
    let mut acc = site.open(site.empty_open()).clone();
    for &m in family {
        acc.union_with(site.open(m));
    }
    &acc == site.open(u)
}

/// Matching families on `family`: choices that agree on pairwise meets.
fn matching(p: &Presheaf, family: &[usize]) -> Vec<Vec<usize>> {
    let site = p.site();
    let mut out = vec![Vec::new()];
    for (i, &m) in family.iter().enumerate() {
        let mut next = Vec::new();
        for prefix in &out {
            for a in 0..p.size(m) {
                let ok = (0..i).all(|j| {
                    let k = site.meet(family[j], m);
                    p.restrict(family[j], k, prefix[j]) == p.restrict(m, k, a)
                });
                if ok {
                    let mut v = prefix.clone();
                    v.push(a);
                    next.push(v);
                }
            }
        }
        out = next;
    }
    out
}

/// Sheaf condition over every family of subopens (not only antichains)
/// covering every open. Exponential in the number of subopens.
pub fn is_sheaf(p: &Presheaf) -> bool {
    let site = p.site();
    for u in 0..site.len() {
        let subs = subopens(p, u);
        assert!(subs.len() <= 14, "oracle limited to small sites");
        for mask in 0u32..(1 << subs.len()) {
            let family: Vec<usize> = (0..subs.len()).filter(|&i| mask >> i & 1 == 1).map(|i| subs[i]).collect();
            if !union_is(p, &family, u) {
                continue;
            }
            for fam in matching(p, &family) {
                let n = (0..p.size(u))
                    .filter(|&a| family.iter().zip(&fam).all(|(&m, &x)| p.restrict(u, m, a) == x))
                    .count();
                if n != 1 {
                    return false;
                }
            }
        }
    }
    true
}

/// Size of `P⁺(U)` as the colimit over all covering sieves of matching
/// families, with two families identified when they agree on some common
/// covering sieve.
pub fn plus_sizes(p: &Presheaf) -> Vec<usize> {
    let site = p.site();
    (0..site.len())
        .map(|u| {
            let subs = subopens(p, u);
            assert!(subs.len() <= 10, "oracle limited to small sites");
            let sieves: Vec<Vec<usize>> = (0u32..(1 << subs.len()))
                .map(|mask| (0..subs.len()).filter(|&i| mask >> i & 1 == 1).map(|i| subs[i]).collect::<Vec<_>>())
                .filter(|s| {
                    union_is(p, s, u)
                        && s.iter().all(|&m| subopens(p, m).iter().all(|l| s.contains(l)))
                })
                .collect();
            // (sieve index, family over the sieve)
            let mut elems: Vec<(usize, HashMap<usize, usize>)> = Vec::new();
            for (si, s) in sieves.iter().enumerate() {
                for fam in matching(p, s) {
                    elems.push((si, s.iter().copied().zip(fam).collect()));
                }
            }
            let mut parent: Vec<usize> = (0..elems.len()).collect();
            fn find(parent: &mut [usize], i: usize) -> usize {
                if parent[i] != i {
                    let r = find(parent, parent[i]);
                    parent[i] = r;
                }
                parent[i]
            }
            for i in 0..elems.len() {
                for j in i + 1..elems.len() {
                    let (si, fi) = &elems[i];
                    let (sj, fj) = &elems[j];
                    let agree = sieves.iter().any(|r| {
                        r.iter().all(|m| sieves[*si].contains(m) && sieves[*sj].contains(m)) && r.iter().all(|m| fi[m] == fj[m])
                    });
                    if agree {
                        let (a, b) = (find(&mut parent, i), find(&mut parent, j));
                        parent[a] = b;
                    }
                }
            }
            (0..elems.len()).filter(|&i| find(&mut parent, i) == i).count()
        })
        .collect()
}

/// All dipaths with `length` edges from the initial to the terminal point, by
/// direct search over point sequences `v0 e0 v1 … v_length`: each edge image
/// must hold both neighbouring vertex images in its minimal open, ordered
/// through it by its germ.
pub fn dipaths(model: &ProgressModel, length: usize) -> Vec<Vec<usize>> {
    let m = &model.space;
    let s = m.space();
    let terminal = model.terminal.expect("terminal state is allowed");
    let mut out = Vec::new();
    let mut path = vec![model.initial];
    fn go(
        m: &geoconc::LocalPoSpace,
        s: &geoconc::FinSpace,
        path: &mut Vec<usize>,
        length: usize,
        terminal: usize,
        out: &mut Vec<Vec<usize>>,
    ) {
        let at = *path.last().unwrap();
        if path.len() == 2 * length + 1 {
            if at == terminal {
                out.push(path.clone());
            }
            return;
        }
        for e in 0..m.len() {
            if !s.min_open(e).contains(at) || !m.le_at(e, at, e) {
                continue;
            }
            for v in s.min_open(e).ones() {
                if m.le_at(e, e, v) && m.le_at(e, at, v) {
                    path.push(e);
                    path.push(v);
                    go(m, s, path, length, terminal, out);
                    path.truncate(path.len() - 2);
                }
            }
        }
    }
    go(m, s, &mut path, length, terminal, &mut out);
    out
}

/// Classical census for two processes: a dipath is classified by which side
/// of each forbidden point it passes, read off the column of that point.
pub fn census(model: &ProgressModel, paths: &[Vec<usize>]) -> usize {
    assert_eq!(model.processes.len(), 2);
    let sigs: BTreeSet<Vec<bool>> = paths
        .iter()
        .map(|p| {
            model
                .forbidden
                .iter()
                .map(|f| {
                    let col: Vec<usize> = p.iter().map(|&q| &model.coords[q]).filter(|c| c[0] == f[0]).map(|c| c[1]).collect();
                    assert!(!col.is_empty(), "a dipath meets every column");
                    col.iter().all(|&y| y > f[1])
                })
                .collect()
        })
        .collect();
    sigs.len()
}
