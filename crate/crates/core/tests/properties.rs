mod common;

use common::oracles;
use geoconc::dihomotopy::{ContextedSpace, HomGraph};
use geoconc::dispace::{atlases_equivalent, canonicalize, check_dimap, enumerate_dimaps, product_all};
use geoconc::finspace::set_from;
use geoconc::io;
use geoconc::pv::{build_model, parse_pv, print_pv, Action, PvProgram};
use geoconc::sheaf::sheafify;
use proptest::prelude::*;

const SEMS: [&str; 3] = ["a", "b", "r"];

/// `P(s) body V(s)`, nested at most `depth` deep.
fn block(depth: u32) -> BoxedStrategy<Vec<Action>> {
    let leaf = (0..SEMS.len()).prop_map(|s| vec![Action::Acquire(SEMS[s].into()), Action::Release(SEMS[s].into())]);
    leaf.prop_recursive(depth, 8, 2, |inner| {
        (0..SEMS.len(), prop::collection::vec(inner, 1..=2)).prop_map(|(s, body)| {
            let mut v = vec![Action::Acquire(SEMS[s].into())];
            v.extend(body.into_iter().flatten());
            v.push(Action::Release(SEMS[s].into()));
            v
        })
    })
    .boxed()
}

fn body(loops: bool) -> impl Strategy<Value = Vec<Action>> {
    let item = if loops {
        prop_oneof![3 => block(1), 1 => prop::collection::vec(block(1), 1..=2).prop_map(|bs| vec![Action::Loop(bs.concat())])]
            .boxed()
    } else {
        block(1)
    };
    prop::collection::vec(item, 0..=2).prop_map(|items| items.concat())
}

fn program(max_procs: usize, loops: bool) -> impl Strategy<Value = PvProgram> {
    (prop::collection::vec(1u32..=2, SEMS.len()), prop::collection::vec(body(loops), 1..=max_procs)).prop_map(|(caps, bodies)| {
        PvProgram {
            semaphores: SEMS.iter().zip(caps).map(|(s, c)| (s.to_string(), c)).collect(),
            processes: bodies.into_iter().enumerate().map(|(i, b)| (format!("p{i}"), b)).collect(),
        }
    })
}

fn action_count(body: &[Action]) -> usize {
    body.iter().map(|a| if let Action::Loop(b) = a { b.len() } else { 1 }).sum()
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(64))]

    #[test]
    fn pv_print_parse_round_trip(prog in program(3, true)) {
        let text = print_pv(&prog);
        prop_assert_eq!(parse_pv(&text).unwrap(), prog);
    }

    #[test]
    fn progress_models_are_valid(prog in program(2, true), granularity in 1usize..=2) {
        prop_assume!(prog.processes.iter().map(|(_, b)| action_count(b)).sum::<usize>() <= 6);
        let model = build_model(&prog, granularity).unwrap();
        let factors: Vec<_> = model.processes.iter().map(|p| &p.space).collect();
        let full = product_all(&factors);
        let allowed = set_from(full.len(), model.product_index.iter().copied());
        prop_assert!(full.space().is_open(&allowed));
        for u in &model.usage {
            for (used, (_, cap)) in u.iter().zip(&prog.semaphores) {
                prop_assert!(used <= cap);
            }
        }
        let back = io::lps_from_doc(&io::lps_to_doc(&model.space)).unwrap();
        prop_assert_eq!(back, model.space.clone());
    }

    #[test]
    fn atlas_equivalence_matches_oracle(seed in any::<u64>()) {
        let mut r = common::rng(seed);
        let space = common::random_space(&mut r, 4, 10);
        let pool: Vec<_> = (0..2).map(|_| common::random_order(&mut r, space.len())).collect();
        let a = common::random_atlas(&mut r, &space, &pool);
        let b = common::random_atlas(&mut r, &space, &pool);
        if let (Some(a), Some(b)) = (a, b) {
            prop_assert_eq!(atlases_equivalent(&a, &b).unwrap(), oracles::atlases_equivalent(&a, &b));
            prop_assert!(oracles::refines(&canonicalize(&a).atlas().charts.iter().map(|c| (c.carrier.clone(), c.order.clone())).collect::<Vec<_>>(), &a));
        }
    }

    #[test]
    fn documents_round_trip(seed in any::<u64>()) {
        let mut r = common::rng(seed);
        let space = common::random_space(&mut r, 5, 12);
        let m = common::random_lps(&mut r, &space);
        let text = io::to_json(&io::lps_to_doc(&m));
        prop_assert_eq!(&io::to_json(&io::lps_to_doc(&io::lps_from_doc(&io::from_json(&text).unwrap()).unwrap())), &text);
        let site = common::site_of(&m);
        let p = common::random_presheaf(&mut r, &site);
        let q = io::presheaf_from_doc(&io::presheaf_to_doc(&p)).unwrap();
        prop_assert_eq!(q, p);
    }

    #[test]
    fn sheafification_yields_sheaves(seed in any::<u64>()) {
        let mut r = common::rng(seed);
        let bases = common::bases(&mut r, 1);
        let z = &bases[bases.len() - 1];
        let site = common::site_of(z);
        prop_assume!(site.len() <= 10);
        let p = common::random_presheaf(&mut r, &site);
        let (s, _) = sheafify(&p);
        prop_assert!(oracles::is_sheaf(&s));
        prop_assert_eq!(p.is_sheaf(), oracles::is_sheaf(&p));
    }

    #[test]
    fn dihomotopy_is_an_equivalence_relation(seed in any::<u64>()) {
        let mut r = common::rng(seed);
        let sm = common::random_space(&mut r, 2, 4);
        let sn = common::random_space(&mut r, 4, 8);
        let (m, n) = (common::random_lps(&mut r, &sm), common::random_lps(&mut r, &sn));
        let (cm, cn) = (ContextedSpace::bare(m.clone()), ContextedSpace::bare(n.clone()));
        let g = HomGraph::build(&cm, &cn, 5000).unwrap();
        prop_assert_eq!(g.homs.len(), enumerate_dimaps(&m, &n).len());
        for f in &g.homs {
            prop_assert!(check_dimap(&m, &n, f).unwrap());
            prop_assert!(g.same_class(f, f));
        }
        for a in &g.homs {
            for b in &g.homs {
                prop_assert_eq!(g.same_class(a, b), g.same_class(b, a));
                if g.same_class(a, b) {
                    prop_assert!(g.chain(a, b).is_some());
                    for c in &g.homs {
                        if g.same_class(b, c) {
                            prop_assert!(g.same_class(a, c));
                        }
                    }
                }
            }
        }
    }
}
