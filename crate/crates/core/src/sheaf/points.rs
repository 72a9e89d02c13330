//! The points `p_x` of the sheaf topos on `O(Z)`: `p_x^*` takes stalks.

use std::collections::HashSet;

use super::presheaf::{Presheaf, PresheafMap};
use super::stalk::{stalk, stalk_map};
use crate::dispace::{enumerate_dimaps, is_dimap, LocalPoSpace};
use crate::finspace::PointSet;

/// `p_x` for a point `x` of the base.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct PointFunctor {
    pub point: usize,
}

/// A cospan `P → R ← Q` used to test preservation of pullbacks.
pub struct Span<'a> {
    pub p: &'a Presheaf,
    pub q: &'a Presheaf,
    pub r: &'a Presheaf,
    pub f: &'a PresheafMap,
    pub g: &'a PresheafMap,
}

impl PointFunctor {
    pub fn new(point: usize) -> Self {
        PointFunctor { point }
    }

    pub fn apply(&self, p: &Presheaf) -> usize {
        stalk(p, self.point).len()
    }

    pub fn apply_map(&self, f: &PresheafMap, p: &Presheaf) -> Vec<usize> {
        stalk_map(f, p, self.point)
    }

    /// Does the stalk of `P ×_R Q` map bijectively onto the pullback of the
    /// stalks?
    pub fn preserves_pullback(&self, span: &Span) -> bool {
        let (pb, p1, p2) = Presheaf::pullback(span.p, span.q, span.f, span.g);
        let x = self.point;
        let fx = stalk_map(span.f, span.p, x);
        let gx = stalk_map(span.g, span.q, x);
        let mut expected: Vec<(usize, usize)> = Vec::new();
        for a in 0..fx.len() {
            for b in 0..gx.len() {
                if fx[a] == gx[b] {
                    expected.push((a, b));
                }
            }
        }
        let s1 = stalk_map(&p1, &pb, x);
        let s2 = stalk_map(&p2, &pb, x);
        let got: Vec<(usize, usize)> = s1.iter().zip(&s2).map(|(&a, &b)| (a, b)).collect();
        let distinct: HashSet<&(usize, usize)> = got.iter().collect();
        distinct.len() == got.len() && {
            let mut g = got.clone();
            g.sort_unstable();
            expected.sort_unstable();
            g == expected
        }
    }

    /// Flatness on a battery: the terminal presheaf goes to a singleton and
    /// each span's pullback is preserved.
    pub fn is_flat(&self, terminal: &Presheaf, spans: &[Span]) -> bool {
        self.apply(terminal) == 1 && spans.iter().all(|s| self.preserves_pullback(s))
    }

    /// Continuity on `O(Z)`: every basis cover of an open containing `x`
    /// becomes jointly surjective on stalks of representables, i.e. some
    /// member contains `x`.
    pub fn is_continuous(&self, p: &Presheaf, covers: &[(usize, Vec<usize>)]) -> bool {
        let site = p.site();
        let y = |u: usize| Presheaf::yoneda_open(site.clone(), u);
        covers.iter().all(|(u, fam)| {
            let total = self.apply(&y(*u));
            total == 0 || fam.iter().any(|&m| self.apply(&y(m)) > 0)
        })
    }
}

/// Continuity against a representable of an arbitrary local po-space.
///
/// Germs of `y(N)` at `x` are dimaps `min_open(x) → N`. Given an open cover of
/// `N`, each germ `f` must factor through some member `V`: with `V ∋ f(x)` the
/// image of `min_open(x)` lies in `min_open(f x) ⊆ V`, and the corestriction
/// `f″` is a dimap into `V` with its inherited structure.
pub fn continuity_against(z: &LocalPoSpace, x: usize, n: &LocalPoSpace, cover: &[PointSet]) -> bool {
    let (germ_dom, _) = z.restrict(z.space().min_open(x));
    let subs: Vec<(LocalPoSpace, Vec<usize>)> = cover.iter().map(|v| n.restrict(v)).collect();
    enumerate_dimaps(&germ_dom, n).iter().all(|f| {
        subs.iter().any(|(v, parent)| {
            let mut corestricted = Vec::with_capacity(f.len());
            for &t in f {
                match parent.iter().position(|&p| p == t) {
                    Some(k) => corestricted.push(k),
                    None => return false,
                }
            }
            is_dimap(&germ_dom, v, &corestricted)
        })
    })
}

/// A point where the stalk maps of `f` and `g` differ, if any.
pub fn separate(p: &Presheaf, f: &PresheafMap, g: &PresheafMap) -> Option<usize> {
    let n = p.site().base().len();
    (0..n).find(|&x| stalk_map(f, p, x) != stalk_map(g, p, x))
}
