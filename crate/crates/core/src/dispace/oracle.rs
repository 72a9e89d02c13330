//! Literal evaluation of the dimap condition over whole atlas classes.
//!
//! An atlas of a class uses charts whose orders restrict to the class germ on
//! every minimal open they contain ("admissible" charts); conversely every
//! compatible covering family of admissible charts lies in the class. The
//! condition "for all V there is U" is evaluated over those families:
//!
//! * a U that works for V also works for every subfamily of V, so it is enough
//!   to range over maximal compatible families of N that cover;
//! * U works for V iff each of its charts does, so the search for U is a cover
//!   search over the charts of M that pass against every chart of V.

use std::collections::HashMap;

use fixedbitset::FixedBitSet;

use super::{continuity_witness, restrict_rel, Chart, DispaceError, LocalPoSpace};
use crate::order::posets;

/// Every open of `m` with every order that restricts to the germs.
pub fn admissible_charts(m: &LocalPoSpace) -> Result<Vec<Chart>, DispaceError> {
    let n = m.len();
    let mut out = Vec::new();
    for open in m.space().opens() {
        let idx: Vec<usize> = open.ones().collect();
        if idx.is_empty() {
            continue;
        }
        if idx.len() > 6 {
            return Err(DispaceError::TooLarge(idx.len()));
        }
        for p in posets(idx.len()) {
            let r = p.embed(&idx, n);
            if idx.iter().all(|&x| restrict_rel(&r, m.space().min_open(x)) == *m.germ(x)) {
                out.push(Chart::new(open.clone(), r));
            }
        }
    }
    Ok(out)
}

fn compat_graph(charts: &[Chart]) -> Vec<FixedBitSet> {
    let k = charts.len();
    let mut g = vec![FixedBitSet::with_capacity(k); k];
    for i in 0..k {
        for j in i + 1..k {
            if charts[i].compatible(&charts[j]) {
                g[i].insert(j);
                g[j].insert(i);
            }
        }
    }
    g
}

fn bron_kerbosch(
    g: &[FixedBitSet],
    r: &mut Vec<usize>,
    mut p: FixedBitSet,
    mut x: FixedBitSet,
    out: &mut Vec<Vec<usize>>,
) {
    if p.count_ones(..) == 0 {
        if x.count_ones(..) == 0 {
            out.push(r.clone());
        }
        return;
    }
    let pivot = p.union(&x).max_by_key(|&u| g[u].intersection(&p).count()).expect("nonempty");
    let candidates: Vec<usize> = p.ones().filter(|&v| !g[pivot].contains(v)).collect();
    for v in candidates {
        r.push(v);
        let mut np = p.clone();
        np.intersect_with(&g[v]);
        let mut nx = x.clone();
        nx.intersect_with(&g[v]);
        bron_kerbosch(g, r, np, nx, out);
        r.pop();
        p.set(v, false);
        x.insert(v);
    }
}

fn has_compatible_cover(
    charts: &[Chart],
    compat: &[FixedBitSet],
    allowed: &FixedBitSet,
    points: usize,
    chosen: &mut Vec<usize>,
    covered: &FixedBitSet,
) -> bool {
    let Some(p) = (0..points).find(|&p| !covered.contains(p)) else {
        return true;
    };
    for a in allowed.ones() {
        if !charts[a].carrier.contains(p) || !chosen.iter().all(|&c| compat[c].contains(a)) {
            continue;
        }
        let mut next = covered.clone();
        next.union_with(&charts[a].carrier);
        chosen.push(a);
        let found = has_compatible_cover(charts, compat, allowed, points, chosen, &next);
        chosen.pop();
        if found {
            return true;
        }
    }
    false
}

/// Precomputed admissible charts and covering maximal families for a pair of
/// spaces, so many maps between them can be checked cheaply.
pub struct DimapOracle<'a> {
    m: &'a LocalPoSpace,
    n: &'a LocalPoSpace,
    am: Vec<Chart>,
    an: Vec<Chart>,
    compat_m: Vec<FixedBitSet>,
    covering_families: Vec<Vec<usize>>,
}

impl<'a> DimapOracle<'a> {
    pub fn new(m: &'a LocalPoSpace, n: &'a LocalPoSpace) -> Result<Self, DispaceError> {
        let am = admissible_charts(m)?;
        let an = admissible_charts(n)?;
        let compat_m = compat_graph(&am);
        let compat_n = compat_graph(&an);
        let mut cliques = Vec::new();
        let mut all = FixedBitSet::with_capacity(an.len());
        all.insert_range(..);
        bron_kerbosch(&compat_n, &mut Vec::new(), all, FixedBitSet::with_capacity(an.len()), &mut cliques);
        let full_n = n.space().full();
        let covering_families = cliques
            .into_iter()
            .filter(|clique| {
                let mut cover = n.space().empty_set();
                for &c in clique {
                    cover.union_with(&an[c].carrier);
                }
                cover == full_n
            })
            .collect();
        Ok(DimapOracle { m, n, am, an, compat_m, covering_families })
    }

    pub fn check(&self, f: &[usize]) -> Result<bool, DispaceError> {
        let (m, n) = (self.m, self.n);
        if f.len() != m.len() || f.iter().any(|&y| y >= n.len()) {
            return Err(crate::finspace::SpaceError::MapArity { expected: m.len(), got: f.len() }.into());
        }
        if let Some(x) = continuity_witness(m, n, f) {
            return Err(DispaceError::NotContinuous(m.space().name(x).to_string()));
        }
        let am = &self.am;
        // good[c] = charts of M passing the monotonicity test against chart c of N
        let good: Vec<FixedBitSet> = self
            .an
            .iter()
            .map(|c| {
                let mut bits = FixedBitSet::with_capacity(am.len());
                for (i, a) in am.iter().enumerate() {
                    let dom: Vec<usize> = a.carrier.ones().filter(|&x| c.carrier.contains(f[x])).collect();
                    let ok = dom.iter().all(|&x| dom.iter().all(|&y| !a.order.le(x, y) || c.order.le(f[x], f[y])));
                    bits.set(i, ok);
                }
                bits
            })
            .collect();
        let mut memo: HashMap<FixedBitSet, bool> = HashMap::new();
        for family in &self.covering_families {
            let mut allowed = FixedBitSet::with_capacity(am.len());
            allowed.insert_range(..);
            for &c in family {
                allowed.intersect_with(&good[c]);
            }
            let exists = *memo.entry(allowed.clone()).or_insert_with(|| {
                has_compatible_cover(am, &self.compat_m, &allowed, m.len(), &mut Vec::new(), &m.space().empty_set())
            });
            if !exists {
                return Ok(false);
            }
        }
        Ok(true)
    }
}

/// The dimap condition evaluated over all atlases of both classes.
pub fn check_dimap_oracle(m: &LocalPoSpace, n: &LocalPoSpace, f: &[usize]) -> Result<bool, DispaceError> {
    DimapOracle::new(m, n)?.check(f)
}
