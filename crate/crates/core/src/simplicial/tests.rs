use std::sync::Arc;

use super::*;
use crate::dispace::{enumerate_dimaps, is_iso};
use crate::finspace::set_from;
use crate::fixtures::{catalogue, circle, d2, interval, point};
use crate::sheaf::{stalk, Presheaf};
use crate::site::OpenSite;
use crate::LocalPoSpace;

fn site_of(z: &LocalPoSpace) -> Arc<OpenSite> {
    Arc::new(OpenSite::new(z.clone()).unwrap())
}

#[test]
fn constant_embeddings() {
    let site = site_of(&d2());
    let t = SimpPresheaf::terminal(site.clone(), 3);
    t.validate().unwrap();
    let g0 = SimpPresheaf::gamma(site.clone(), &TruncSSet::delta(0, 3));
    g0.validate().unwrap();
    for u in 0..site.len() {
        assert!((0..=3).all(|k| g0.levels[k].size(u) == 1 && t.levels[k].size(u) == 1));
    }
    for u in 0..site.len() {
        let y = SimpPresheaf::ybar_open(site.clone(), u, 3);
        for v in 0..site.len() {
            assert!((0..=3).all(|k| y.levels[k].size(v) == usize::from(site.contains(u, v))));
        }
    }
    let g2 = SimpPresheaf::gamma(site.clone(), &TruncSSet::delta(2, 3));
    g2.product(&SimpPresheaf::ybar(site, &interval(), 3)).validate().unwrap();
}

#[test]
fn bi_yoneda_examples() {
    let site = site_of(&d2());
    let d = 2;
    for c in 0..site.len() {
        let f = SimpPresheaf::ybar_open(site.clone(), c, d);
        assert_eq!(bi_yoneda(c, 0, &f).unwrap().homs.len(), 1);
        let t = SimpPresheaf::terminal(site.clone(), d);
        for n in 0..=d {
            assert_eq!(bi_yoneda(c, n, &t).unwrap().homs.len(), 1);
        }
        let g = SimpPresheaf::gamma(site.clone(), &TruncSSet::delta(1, d));
        assert_eq!(bi_yoneda(c, 1, &g).unwrap().homs.len(), 3);
    }
    let t = SimpPresheaf::terminal(site, d);
    assert!(matches!(bi_yoneda(0, 3, &t), Err(SimplicialError::TruncationTooLow { .. })));
}

#[test]
fn bi_yoneda_is_natural_in_the_open() {
    let site = site_of(&d2());
    let d = 2;
    let f = SimpPresheaf::ybar(site.clone(), &interval(), d).product(&SimpPresheaf::gamma(site.clone(), &TruncSSet::delta(1, d)));
    let n = 1;
    for c in 0..site.len() {
        let big = bi_yoneda(c, n, &f).unwrap();
        for v in site.subopens(c) {
            let small = bi_yoneda(v, n, &f).unwrap();
            // precomposition with κ_{y(V)} × γ → κ_{y(C)} × γ is the identity on
            // element tables over opens inside V
            for (h, &img) in big.homs.iter().zip(&big.images) {
                let restricted = f.levels[n].restrict(c, v, img);
                let pos = small
                    .homs
                    .iter()
                    .position(|s| site.subopens(v).all(|w| (0..=d).all(|k| s.levels[k].components[w] == h.levels[k].components[w])))
                    .unwrap();
                assert_eq!(small.images[pos], restricted);
            }
        }
    }
}

#[test]
fn stalks_of_ybar() {
    let c = circle();
    let site = site_of(&c);
    let yb = SimpPresheaf::ybar(site.clone(), &c, 3);
    let v0 = c.space().index_of("v0").unwrap();
    let st = simplicial_stalk(&yb, v0);
    assert!((0..=3).all(|k| st.size(k) == 6));
    st.check_identities().unwrap();
    for u in 0..site.len() {
        let y = SimpPresheaf::ybar_open(site.clone(), u, 3);
        for x in 0..c.len() {
            let want = usize::from(site.contains(u, site.min_open(x)));
            assert!((0..=3).all(|k| simplicial_stalk(&y, x).size(k) == want));
        }
    }
    let p = Presheaf::yoneda(site.clone(), &interval());
    let kp = SimpPresheaf::kappa(&p, 2);
    for x in 0..c.len() {
        assert!((0..=2).all(|k| simplicial_stalk(&kp, x).labels[k] == stalk(&p, x).carrier));
    }
}

#[test]
fn stalkwise_examples() {
    let amb: Vec<LocalPoSpace> = catalogue(4).into_iter().map(|(_, z)| z).collect();
    let z = d2();
    assert!(stalkwise_equiv_embedded(&z, &z, &[0, 1], &amb).unwrap());

    let (minus, _) = z.restrict(&set_from(2, [0]));
    let amb2 = vec![point(), d2()];
    let fail = stalkwise_failure(&minus, &z, &[0], &amb2).unwrap().unwrap();
    assert_eq!((fail.ambient, fail.source, fail.target), (0, 1, 2));

    let c = circle();
    let rot: Vec<usize> = (0..6).map(|k| (k + 2) % 6).collect();
    assert!(is_iso(&c, &c, &rot));
    let amb3 = vec![point(), c.clone(), interval()];
    let r = verify_iso_theorem(&c, &c, &rot, &amb3).unwrap();
    assert!(r.stalkwise && r.iso);
    let inv = r.inverse.unwrap();
    assert!((0..6).all(|k| inv[rot[k]] == k));

    let amb4 = vec![point(), interval()];
    let r = verify_iso_theorem(&interval(), &point(), &[0, 0, 0], &amb4).unwrap();
    assert!(!r.stalkwise && !r.iso);

    assert!(matches!(
        stalkwise_equiv_embedded(&c, &c, &rot, &amb4),
        Err(SimplicialError::NotInAmbient(_))
    ));
}

#[test]
fn iso_theorem_on_small_fixtures() {
    let amb: Vec<LocalPoSpace> = catalogue(3).into_iter().map(|(_, z)| z).collect();
    for x in &amb {
        for y in &amb {
            for phi in enumerate_dimaps(x, y) {
                verify_iso_theorem(x, y, &phi, &amb).unwrap();
            }
        }
    }
}

#[test]
fn ybar_mono_over_a_point() {
    let site = site_of(&point());
    for (_, x) in catalogue(3) {
        for (_, y) in catalogue(3) {
            for phi in enumerate_dimaps(&x, &y) {
                let (sx, sy, f) = SimpPresheaf::ybar_map(site.clone(), &x, &y, &phi, 2);
                assert!(sx.is_morphism(&sy, &f));
                let injective = {
                    let mut s = phi.clone();
                    s.sort_unstable();
                    s.dedup();
                    s.len() == phi.len()
                };
                assert_eq!(SimpPresheaf::is_mono(&f), injective);
            }
        }
    }
}

#[test]
fn cech_nerves() {
    let c = circle();
    let site = site_of(&c);
    let edges: Vec<usize> = ["e0", "e1", "e2"].iter().map(|e| site.min_open(c.space().index_of(e).unwrap())).collect();
    let nerve = cech_nerve(site.clone(), site.top(), &edges, 3).unwrap();
    nerve.nerve.validate().unwrap();
    let v1 = site.min_open(c.space().index_of("v1").unwrap());
    assert_eq!(nerve.nerve.levels[1].size(v1), 4);
    assert!(nerve.summand_law_holds());
    let (yx, e) = nerve.comparison();
    assert!(nerve.nerve.is_morphism(&yx, &e));

    let single = cech_nerve(site.clone(), site.top(), &[site.top()], 3).unwrap();
    let (yx, e) = single.comparison();
    for k in 0..=3 {
        assert!(e.levels[k].is_iso(&single.nerve.levels[k], &yx.levels[k]));
    }
    assert!(matches!(cech_nerve(site, edges[0], &edges, 2), Err(SimplicialError::NotCover)));
}
