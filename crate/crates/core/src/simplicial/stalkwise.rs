//! Stalkwise equivalence of `ȳ(φ)` over a finite list of ambient bases.
//!
//! `ȳ(X)` is levelwise constant, so its simplicial stalk at `x ∈ Z` is the
//! constant simplicial set on `LPS(min_open x, X)` and a simplicial stalk map
//! is a weak equivalence exactly when it is a bijection at level 0.

use super::SimplicialError;
use crate::dispace::{compose, enumerate_dimaps, is_dimap, is_iso, LocalPoSpace};

/// Where stalkwise bijectivity fails: ambient index, point, and the sizes of
/// the two hom-sets (equal sizes mean the map is not injective).
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct StalkFailure {
    pub ambient: usize,
    pub point: String,
    pub source: usize,
    pub target: usize,
}

fn isomorphic(a: &LocalPoSpace, b: &LocalPoSpace) -> bool {
    a.len() == b.len() && enumerate_dimaps(a, b).iter().any(|f| is_iso(a, b, f))
}

fn check_ambient(x: &LocalPoSpace, y: &LocalPoSpace, ambient: &[LocalPoSpace]) -> Result<(), SimplicialError> {
    for (what, s) in [("source", x), ("target", y)] {
        if !ambient.iter().any(|z| isomorphic(z, s)) {
            return Err(SimplicialError::NotInAmbient(what.to_string()));
        }
    }
    Ok(())
}

/// Is `g ↦ φ ∘ g` a bijection `LPS(L, X) → LPS(L, Y)`?
fn postcompose_bijective(l: &LocalPoSpace, x: &LocalPoSpace, y: &LocalPoSpace, phi: &[usize]) -> (bool, usize, usize) {
    let from = enumerate_dimaps(l, x);
    let to = enumerate_dimaps(l, y);
    let mut images: Vec<Vec<usize>> = from.iter().map(|g| compose(g, phi)).collect();
    images.sort();
    images.dedup();
    (images.len() == from.len() && images.len() == to.len(), from.len(), to.len())
}

/// The first ambient point whose stalk map is not a bijection.
pub fn stalkwise_failure(
    x: &LocalPoSpace,
    y: &LocalPoSpace,
    phi: &[usize],
    ambient: &[LocalPoSpace],
) -> Result<Option<StalkFailure>, SimplicialError> {
    check_ambient(x, y, ambient)?;
    for (i, z) in ambient.iter().enumerate() {
        for p in 0..z.len() {
            let (l, _) = z.restrict(z.space().min_open(p));
            let (ok, source, target) = postcompose_bijective(&l, x, y, phi);
            if !ok {
                return Ok(Some(StalkFailure { ambient: i, point: z.space().name(p).to_string(), source, target }));
            }
        }
    }
    Ok(None)
}

pub fn stalkwise_equiv_embedded(
    x: &LocalPoSpace,
    y: &LocalPoSpace,
    phi: &[usize],
    ambient: &[LocalPoSpace],
) -> Result<bool, SimplicialError> {
    Ok(stalkwise_failure(x, y, phi, ambient)?.is_none())
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct IsoReport {
    pub stalkwise: bool,
    pub iso: bool,
    /// The glued inverse `ψ : Y → X`, when stalkwise.
    pub inverse: Option<Vec<usize>>,
    pub failure: Option<StalkFailure>,
}

/// Checks `stalkwise ⟺ iso` for `φ`, and in the stalkwise case builds the
/// inverse from local pieces.
///
/// For each `y ∈ Y`, bijectivity over `L = min_open(y) ⊆ Y` yields a unique
/// `ψ_y : L → X` with `φ ∘ ψ_y` the inclusion. Uniqueness makes the pieces
/// agree on overlaps, so they amalgamate to `ψ(y) = ψ_y(y)`.
pub fn verify_iso_theorem(
    x: &LocalPoSpace,
    y: &LocalPoSpace,
    phi: &[usize],
    ambient: &[LocalPoSpace],
) -> Result<IsoReport, SimplicialError> {
    let failure = stalkwise_failure(x, y, phi, ambient)?;
    let stalkwise = failure.is_none();
    let iso = is_iso(x, y, phi);
    let fail = |point: String, detail: String| Err(SimplicialError::AssertionFailure { point, detail });
    if stalkwise != iso {
        let point = failure.as_ref().map(|f| f.point.clone()).unwrap_or_default();
        return fail(point, format!("stalkwise = {stalkwise} but iso = {iso}"));
    }
    if !stalkwise {
        return Ok(IsoReport { stalkwise, iso, inverse: None, failure });
    }
    let ys = y.space();
    let mut pieces: Vec<(Vec<usize>, Vec<usize>)> = Vec::with_capacity(y.len());
    for q in 0..y.len() {
        let (l, parent) = y.restrict(ys.min_open(q));
        let preimages: Vec<Vec<usize>> =
            enumerate_dimaps(&l, x).into_iter().filter(|g| compose(g, phi) == parent).collect();
        if preimages.len() != 1 {
            return fail(ys.name(q).to_string(), format!("{} germ preimages of the inclusion", preimages.len()));
        }
        pieces.push((parent, preimages.into_iter().next().expect("one")));
    }
    let value = |q: usize, at: usize| {
        let (parent, g) = &pieces[q];
        g[parent.iter().position(|&p| p == at).expect("point of the piece")]
    };
    for q in 0..y.len() {
        for r in ys.min_open(q).ones() {
            if value(q, r) != value(r, r) {
                return fail(ys.name(q).to_string(), format!("local inverses disagree at {}", ys.name(r)));
            }
        }
    }
    let psi: Vec<usize> = (0..y.len()).map(|q| value(q, q)).collect();
    let inverse_ok = is_dimap(y, x, &psi)
        && (0..x.len()).all(|p| psi[phi[p]] == p)
        && (0..y.len()).all(|q| phi[psi[q]] == q);
    if !inverse_ok {
        return fail(String::new(), "glued map is not an inverse dimap".to_string());
    }
    Ok(IsoReport { stalkwise, iso, inverse: Some(psi), failure })
}
