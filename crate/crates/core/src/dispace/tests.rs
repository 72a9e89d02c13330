use super::*;
use crate::fixtures::{circle, d2, d2_minus, d2_plus, interval, interval_free, point};

fn names_of(m: &LocalPoSpace, f: &[&str]) -> Vec<usize> {
    f.iter().map(|p| m.space().index_of(p).unwrap()).collect()
}

#[test]
fn pospace_verdicts() {
    let d = d2();
    assert_eq!(is_pospace_order(d.space(), &Relation::identity(2)), PoVerdict::Strict);
    assert_eq!(is_pospace_order(d.space(), &Relation::from_pairs(2, [(0, 1)])), PoVerdict::Strict);
    let i = interval();
    // indices: a = 0, c = 1, b = 2
    assert_eq!(is_pospace_order(i.space(), &Relation::chain(3)), PoVerdict::Relaxed);
    let mut cyc = Relation::identity(2);
    cyc.set(0, 1);
    cyc.set(1, 0);
    assert_eq!(is_pospace_order(d.space(), &cyc), PoVerdict::Invalid);
}

#[test]
fn canonical_forms() {
    let plus = canonicalize(&d2_plus());
    assert_eq!(plus, d2());
    let single = OrderAtlas::global(interval().space().clone(), Relation::chain(3)).unwrap();
    let g = canonicalize(&single);
    assert_eq!(g, interval());
    assert_eq!(g.format_germ(1), "[a<c, a<b, c<b]");
    assert_eq!(canonicalize(&g.atlas()), g);
    assert!(germ_atlas_refines(&single));
}

#[test]
fn d2_atlases() {
    assert!(atlases_equivalent(&d2_plus(), &d2_minus()).unwrap());
    assert!(atlases_equivalent(&d2_plus(), &d2_plus()).unwrap());
    let r = common_refinement(&d2_plus(), &d2_minus()).unwrap();
    let carriers: Vec<String> = r.charts.iter().map(|c| r.space.format_set(&c.carrier)).collect();
    assert_eq!(carriers, vec!["{-1}", "{1}"]);
    assert!(r.charts.iter().all(|c| c.order.strict_pairs().is_empty()));
    assert!(d2_plus().is_refined_by(&r) && d2_minus().is_refined_by(&r));
    let same = common_refinement(&d2_plus(), &d2_plus()).unwrap();
    assert!(atlases_equivalent(&same, &d2_plus()).unwrap());
    assert!(d2_plus().is_refined_by(&same));
}

#[test]
fn interval_orientations_differ() {
    let s = interval().space().clone();
    let fwd = OrderAtlas::global(s.clone(), Relation::chain(3)).unwrap();
    let bwd = OrderAtlas::global(s, Relation::chain(3).reversed()).unwrap();
    assert!(!atlases_equivalent(&fwd, &bwd).unwrap());
    assert!(common_refinement(&fwd, &bwd).is_none());
    assert_eq!(atlases_equivalent(&fwd, &d2_plus()), Err(DispaceError::DifferentSpace));
}

#[test]
fn atlas_validation() {
    let s = interval().space().clone();
    let a = s.set_of(&["a", "c"]).unwrap();
    let err = OrderAtlas::new(s.clone(), vec![Chart::new(a, Relation::identity(3))]).unwrap_err();
    assert!(matches!(err, DispaceError::CarrierNotOpen(_)));
    let only_a = s.set_of(&["a"]).unwrap();
    let err = OrderAtlas::new(s, vec![Chart::new(only_a.clone(), trivial_on(3, &only_a))]).unwrap_err();
    assert!(matches!(err, DispaceError::NotCover(_)));
}

#[test]
fn inherited_pieces() {
    let c = circle();
    let piece = c.space().set_of(&["v0", "e0", "v1"]).unwrap();
    let (sub, idx) = c.restrict(&piece);
    assert_eq!(idx.len(), 3);
    assert_eq!(sub.format_germ(1), "[v0<e0, v0<v1, e0<v1]");
    assert_eq!(inherited_structure(&c, &c.space().full()), c);
    let d = d2();
    let one = inherited_structure(&d, &d.space().set_of(&["-1"]).unwrap());
    assert_eq!(one.len(), 1);
    // the partial piece {v0, e0} keeps the germ restricted to what is left
    let half = inherited_structure(&c, &c.space().set_of(&["v0", "e0"]).unwrap());
    assert_eq!(half.format_germ(1), "[v0<e0]");
}

#[test]
fn dimap_examples() {
    let d = d2();
    assert!(check_dimap(&d, &d, &[0, 1]).unwrap());
    assert!(check_dimap(&interval(), &point(), &[0, 0, 0]).unwrap());
    let i = interval();
    assert!(!check_dimap(&i, &i, &[2, 1, 0]).unwrap());
    assert!(check_dimap(&i, &i, &[0, 1, 0]).is_ok());
    assert!(matches!(check_dimap(&i, &i, &[1, 0, 2]), Err(DispaceError::NotContinuous(_))));
    // the single-chart monotonicity check M₊ → M₋ fails for the identity
    assert!(!chart_pair_monotone(&[0, 1], &d2_plus(), &d2_minus()));
    assert!(check_dimap_oracle(&d, &d, &[0, 1]).unwrap());
    assert!(!check_dimap_oracle(&i, &i, &[2, 1, 0]).unwrap());
}

#[test]
fn dimap_enumeration() {
    assert_eq!(enumerate_dimaps(&point(), &d2()).len(), 2);
    assert_eq!(enumerate_dimaps(&d2(), &point()).len(), 1);
    let i = interval();
    let all = enumerate_dimaps(&i, &i);
    assert!(all.contains(&vec![0, 1, 2]));
    assert!(all.contains(&vec![0, 0, 0]) && all.contains(&vec![2, 2, 2]));
    assert!(!all.contains(&vec![2, 1, 0]));
    let brute: Vec<Vec<usize>> = (0..27)
        .map(|k| vec![k / 9, (k / 3) % 3, k % 3])
        .filter(|f| is_dimap(&i, &i, f))
        .collect();
    assert_eq!(all, brute);
}

#[test]
fn isomorphisms() {
    let c = circle();
    assert!(is_iso(&c, &c, &(0..6).collect::<Vec<_>>()));
    let rot: Vec<usize> = (0..6).map(|k| (k + 2) % 6).collect();
    assert!(is_iso(&c, &c, &rot));
    let d = d2();
    let (minus, _) = d.restrict(&d.space().set_of(&["-1"]).unwrap());
    assert!(!is_iso(&minus, &d, &[0]));
}

#[test]
fn products_and_free() {
    let d = d2();
    let p = product(&d, &point());
    assert!(is_iso(&p, &d, &[0, 1]));
    let dd = product(&d, &d);
    assert!(dd.germs().iter().all(|g| g.strict_pairs().is_empty()));
    let i = interval();
    let ii = product(&i, &i);
    let cc = ii.space().index_of("(c,c)").unwrap();
    assert_eq!(ii.germ(cc).pairs().len(), 36);
    assert_eq!(free_lps(d.space()), d);
    assert_eq!(forget(&free_lps(i.space())), *i.space());
    // LPS(F Ī, S¹) and Top(Ī, U S¹) coincide
    let c = circle();
    let lps = enumerate_dimaps(&interval_free(), &c);
    let top: Vec<Vec<usize>> = (0..216)
        .map(|k| vec![k / 36, (k / 6) % 6, k % 6])
        .filter(|f| crate::finspace::is_continuous(i.space(), c.space(), f))
        .collect();
    assert_eq!(lps, top);
}

#[test]
fn circle_has_no_global_chart() {
    assert!(global_charts(&circle()).unwrap().is_empty());
    assert_eq!(global_charts(&interval()).unwrap().len(), 1);
    let pos = names_of(&interval(), &["a", "c", "b"]);
    assert_eq!(pos, vec![0, 1, 2]);
}
