use crate::finspace::PointSet;

use super::{continuity_witness, DispaceError, LocalPoSpace, OrderAtlas};

/// A dimap together with its endpoints.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Dimap {
    pub source: LocalPoSpace,
    pub target: LocalPoSpace,
    pub map: Vec<usize>,
}

impl Dimap {
    pub fn new(source: LocalPoSpace, target: LocalPoSpace, map: Vec<usize>) -> Result<Self, DispaceError> {
        if !check_dimap(&source, &target, &map)? {
            return Err(DispaceError::NotDimap);
        }
        Ok(Dimap { source, target, map })
    }

    pub fn identity(m: &LocalPoSpace) -> Self {
        Dimap { source: m.clone(), target: m.clone(), map: (0..m.len()).collect() }
    }

    pub fn then(&self, g: &Dimap) -> Dimap {
        Dimap { source: self.source.clone(), target: g.target.clone(), map: compose(&self.map, &g.map) }
    }

    pub fn is_iso(&self) -> bool {
        is_iso(&self.source, &self.target, &self.map)
    }
}

/// `g ∘ f` on point tables.
pub fn compose(f: &[usize], g: &[usize]) -> Vec<usize> {
    f.iter().map(|&y| g[y]).collect()
}

fn germ_ok_at(m: &LocalPoSpace, n: &LocalPoSpace, f: &[usize], z: usize) -> bool {
    let w = f[z];
    let gm = m.germ(z);
    let gn = n.germ(w);
    m.space().min_open(z).ones().all(|x| {
        m.space().min_open(z).ones().all(|y| !gm.le(x, y) || gn.le(f[x], f[y]))
    })
}

/// Germwise monotonicity: for every `z` and `x, y ∈ min_open(z)`,
/// `x ≤_z y ⟹ f(x) ≤_{f(z)} f(y)`.
///
/// Continuity puts `min_open(z)` inside `f⁻¹(min_open(f z))`, so this is the
/// condition over `min_open(z) ∩ f⁻¹(min_open(f z))`.
pub fn check_dimap(m: &LocalPoSpace, n: &LocalPoSpace, f: &[usize]) -> Result<bool, DispaceError> {
    if f.len() != m.len() || f.iter().any(|&y| y >= n.len()) {
        return Err(crate::finspace::SpaceError::MapArity { expected: m.len(), got: f.len() }.into());
    }
    if let Some(x) = continuity_witness(m, n, f) {
        return Err(DispaceError::NotContinuous(m.space().name(x).to_string()));
    }
    Ok((0..m.len()).all(|z| germ_ok_at(m, n, f, z)))
}

/// [`check_dimap`] with every error read as "no".
pub fn is_dimap(m: &LocalPoSpace, n: &LocalPoSpace, f: &[usize]) -> bool {
    check_dimap(m, n, f).unwrap_or(false)
}

/// The chartwise condition for one pair of atlases: for all charts `U_i`,
/// `V_j` and `x, y ∈ U_i ∩ f⁻¹(V_j)`, `x ≤_i y ⟹ f(x) ≤_j f(y)`.
pub fn chart_pair_monotone(f: &[usize], u: &OrderAtlas, v: &OrderAtlas) -> bool {
    u.charts.iter().all(|ui| {
        v.charts.iter().all(|vj| {
            let dom: Vec<usize> = ui.carrier.ones().filter(|&x| vj.carrier.contains(f[x])).collect();
            dom.iter().all(|&x| dom.iter().all(|&y| !ui.order.le(x, y) || vj.order.le(f[x], f[y])))
        })
    })
}

/// Bijective dimap whose inverse is a dimap.
pub fn is_iso(m: &LocalPoSpace, n: &LocalPoSpace, f: &[usize]) -> bool {
    if m.len() != n.len() || !is_dimap(m, n, f) {
        return false;
    }
    let mut inv = vec![usize::MAX; n.len()];
    for (x, &y) in f.iter().enumerate() {
        if inv[y] != usize::MAX {
            return false;
        }
        inv[y] = x;
    }
    is_dimap(n, m, &inv)
}

/// All dimaps `M → N`, in lexicographic order of their point tables.
pub fn enumerate_dimaps(m: &LocalPoSpace, n: &LocalPoSpace) -> Vec<Vec<usize>> {
    enumerate_dimaps_with(m, n, &vec![None; m.len()], usize::MAX).expect("uncapped")
}

/// Dimaps with some images prescribed. Returns `None` once more than `cap`
/// dimaps have been found.
pub fn enumerate_dimaps_with(
    m: &LocalPoSpace,
    n: &LocalPoSpace,
    fixed: &[Option<usize>],
    cap: usize,
) -> Option<Vec<Vec<usize>>> {
    let allowed: Vec<PointSet> = fixed
        .iter()
        .map(|f| match f {
            Some(t) => {
                let mut s = n.space().empty_set();
                s.insert(*t);
                s
            }
            None => n.space().full(),
        })
        .collect();
    enumerate_dimaps_among(m, n, &allowed, cap)
}

/// Dimaps with `f(k) ∈ allowed[k]`; `None` if there are more than `cap`.
pub fn enumerate_dimaps_among(
    m: &LocalPoSpace,
    n: &LocalPoSpace,
    allowed: &[PointSet],
    cap: usize,
) -> Option<Vec<Vec<usize>>> {
    let len = m.len();
    // z is checkable once every point of min_open(z) has been assigned
    let mut complete_at: Vec<Vec<usize>> = vec![Vec::new(); len];
    for z in 0..len {
        let last = m.space().min_open(z).ones().max().unwrap_or(z).max(z);
        complete_at[last].push(z);
    }
    // points y < k whose minimal open contains k
    let above: Vec<Vec<usize>> = (0..len)
        .map(|k| (0..k).filter(|&y| m.space().min_open(y).contains(k)).collect())
        .collect();
    let mut out = Vec::new();
    let mut f = vec![0usize; len];
    let ok = search(m, n, allowed, cap, &complete_at, &above, 0, &mut f, &mut out);
    ok.then_some(out)
}

#[allow(clippy::too_many_arguments)]
fn search(
    m: &LocalPoSpace,
    n: &LocalPoSpace,
    allowed: &[PointSet],
    cap: usize,
    complete_at: &[Vec<usize>],
    above: &[Vec<usize>],
    k: usize,
    f: &mut Vec<usize>,
    out: &mut Vec<Vec<usize>>,
) -> bool {
    if k == m.len() {
        out.push(f.clone());
        return out.len() <= cap;
    }
    let mut c = allowed[k].clone();
    for &y in &above[k] {
        c.intersect_with(n.space().min_open(f[y]));
    }
    let candidates: Vec<usize> = c.ones().collect();
    for t in candidates {
        if above[k].iter().any(|&y| !n.space().min_open(f[y]).contains(t)) {
            continue;
        }
        f[k] = t;
        let fine = complete_at[k].iter().all(|&z| {
            let fz = f[z];
            m.space().min_open(z).ones().all(|x| n.space().min_open(fz).contains(f[x])) && germ_ok_at(m, n, f, z)
        });
        if fine && !search(m, n, allowed, cap, complete_at, above, k + 1, f, out) {
            return false;
        }
    }
    true
}
