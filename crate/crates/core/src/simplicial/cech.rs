//! Čech nerves of covers in `O(Z)` and their comparison map to `κ_{y(X)}`.

use std::sync::Arc;

use super::spresheaf::SimpPresheaf;
use super::SimplicialError;
use crate::sheaf::{Presheaf, PresheafMap};
use crate::site::OpenSite;

/// `Ǔ_n(V) = {(i₀, …, i_n) | V ⊆ U_{i₀} ∩ … ∩ U_{i_n}}`.
pub struct CechNerve {
    pub target: usize,
    pub cover: Vec<usize>,
    pub nerve: SimpPresheaf,
    /// `tuples[n]`: all index tuples of length `n + 1`, in nerve order.
    pub tuples: Vec<Vec<Vec<usize>>>,
    /// `elements[n][v][a]`: position in `tuples[n]` of element `a` of `Ǔ_n(V)`.
    pub elements: Vec<Vec<Vec<usize>>>,
}

fn all_tuples(m: usize, len: usize) -> Vec<Vec<usize>> {
    let parts: Vec<Vec<usize>> = vec![(0..m).collect(); len];
    crate::finspace::cartesian(&parts)
}

pub fn cech_nerve(site: Arc<OpenSite>, target: usize, cover: &[usize], d: usize) -> Result<CechNerve, SimplicialError> {
    if cover.iter().any(|&u| !site.contains(target, u)) || !site.is_cover(target, cover) {
        return Err(SimplicialError::NotCover);
    }
    let m = cover.len();
    let tuples: Vec<Vec<Vec<usize>>> = (0..=d).map(|n| all_tuples(m, n + 1)).collect();
    let meet = |t: &[usize]| t.iter().fold(target, |acc, &i| site.meet(acc, cover[i]));
    let meets: Vec<Vec<usize>> = tuples.iter().map(|ts| ts.iter().map(|t| meet(t)).collect()).collect();
    let elements: Vec<Vec<Vec<usize>>> = (0..=d)
        .map(|n| (0..site.len()).map(|v| (0..tuples[n].len()).filter(|&t| site.contains(meets[n][t], v)).collect()).collect())
        .collect();
    let label = |t: &[usize]| format!("({})", t.iter().map(|i| i.to_string()).collect::<Vec<_>>().join(","));
    let levels: Vec<Presheaf> = (0..=d)
        .map(|n| {
            let labels = elements[n].iter().map(|es| es.iter().map(|&t| label(&tuples[n][t])).collect()).collect();
            Presheaf::from_fn(site.clone(), labels, |v, l, a| {
                elements[n][l].binary_search(&elements[n][v][a]).expect("smaller opens keep tuples")
            })
            .expect("nerve levels are presheaves")
        })
        .collect();
    let position = |n: usize, t: &[usize]| tuples[n].iter().position(|s| s == t).expect("tuple");
    let induced = |from: usize, to: usize, f: &dyn Fn(&[usize]) -> Vec<usize>| PresheafMap {
        components: (0..site.len())
            .map(|v| {
                elements[from][v]
                    .iter()
                    .map(|&t| {
                        let image = position(to, &f(&tuples[from][t]));
                        elements[to][v].binary_search(&image).expect("image lies over v")
                    })
                    .collect()
            })
            .collect(),
    };
    let faces = (0..=d)
        .map(|n| {
            if n == 0 {
                return Vec::new();
            }
            (0..=n)
                .map(|i| {
                    induced(n, n - 1, &|t: &[usize]| {
                        let mut s = t.to_vec();
                        s.remove(i);
                        s
                    })
                })
                .collect()
        })
        .collect();
    let degens = (0..=d)
        .map(|n| {
            if n == d {
                return Vec::new();
            }
            (0..=n)
                .map(|i| {
                    induced(n, n + 1, &|t: &[usize]| {
                        let mut s = t.to_vec();
                        s.insert(i, t[i]);
                        s
                    })
                })
                .collect()
        })
        .collect();
    let nerve = SimpPresheaf { levels, faces, degens };
    Ok(CechNerve { target, cover: cover.to_vec(), nerve, tuples, elements })
}

impl CechNerve {
    pub fn truncation(&self) -> usize {
        self.nerve.truncation()
    }

    /// `U_{i₀…i_n}` for the tuple at position `t` of level `n`.
    pub fn meet(&self, n: usize, t: usize) -> usize {
        let site = self.nerve.site();
        self.tuples[n][t].iter().fold(self.target, |acc, &i| site.meet(acc, self.cover[i]))
    }

    /// `E_{U,X} : Ǔ → κ_{y(X)}`, sending every tuple to `∗`.
    pub fn comparison(&self) -> (SimpPresheaf, super::SMap) {
        let site = self.nerve.site().clone();
        let yx = SimpPresheaf::kappa(&Presheaf::yoneda_open(site.clone(), self.target), self.truncation());
        let levels = self
            .nerve
            .levels
            .iter()
            .map(|p| PresheafMap { components: (0..site.len()).map(|v| vec![0; p.size(v)]).collect() })
            .collect();
        (yx, super::SMap { levels })
    }

    /// The inclusion `y(U_t) → Ǔ_n` of the summand for tuple `t`.
    pub fn summand(&self, n: usize, t: usize) -> (Presheaf, PresheafMap) {
        let site = self.nerve.site().clone();
        let y = Presheaf::yoneda_open(site.clone(), self.meet(n, t));
        let components = (0..site.len())
            .map(|v| {
                if y.size(v) == 0 {
                    Vec::new()
                } else {
                    vec![self.elements[n][v].binary_search(&t).expect("tuple over v")]
                }
            })
            .collect();
        (y, PresheafMap { components })
    }

    /// `E ∘ ι_t = y(U_t ⊆ X)` for every summand at every level.
    pub fn summand_law_holds(&self) -> bool {
        let (yx, e) = self.comparison();
        (0..=self.truncation()).all(|n| {
            (0..self.tuples[n].len()).all(|t| {
                let (y, inc) = self.summand(n, t);
                let composite = inc.then(&e.levels[n]);
                let direct = PresheafMap { components: (0..y.site().len()).map(|v| vec![0; y.size(v)]).collect() };
                y.is_natural(&self.nerve.levels[n], &inc) && composite == direct && y.is_natural(&yx.levels[n], &composite)
            })
        })
    }
}
