//! Small named local po-spaces used throughout tests, benches and docs.

use crate::dispace::{free_lps, product, Chart, LocalPoSpace, OrderAtlas};
use crate::finspace::{set_from, FinSpace};
use crate::order::Relation;

/// One-point space.
pub fn point() -> LocalPoSpace {
    free_lps(&FinSpace::discrete(&["p"]))
}

/// Two-point discrete space `{-1, 1}` (all germs trivial).
pub fn d2() -> LocalPoSpace {
    free_lps(&FinSpace::discrete(&["-1", "1"]))
}

/// `{M₊}`: the single chart `-1 ≤ 1` on D2.
pub fn d2_plus() -> OrderAtlas {
    let s = FinSpace::discrete(&["-1", "1"]);
    OrderAtlas::global(s, Relation::from_pairs(2, [(0, 1)])).expect("valid chart")
}

/// `{M₋}`: the single chart `1 ≤ -1` on D2.
pub fn d2_minus() -> OrderAtlas {
    let s = FinSpace::discrete(&["-1", "1"]);
    OrderAtlas::global(s, Relation::from_pairs(2, [(1, 0)])).expect("valid chart")
}

/// A path of vertex and edge points `v0 e0 v1 e1 …` (open vertices, each edge
/// point's minimal open is `{v_i, e_i, v_{i+1}}` with germ `v_i < e_i < v_{i+1}`).
/// With `closed`, the last edge returns to `v0`.
pub fn vertex_edge(vertices: &[&str], edges: &[&str], closed: bool) -> LocalPoSpace {
    let k = vertices.len();
    assert_eq!(edges.len(), if closed { k } else { k - 1 });
    let mut names = Vec::new();
    for i in 0..k {
        names.push(vertices[i].to_string());
        if i < edges.len() {
            names.push(edges[i].to_string());
        }
    }
    let n = names.len();
    let vert = |i: usize| (2 * i) % n;
    let mut mos = Vec::with_capacity(n);
    let mut germs = Vec::with_capacity(n);
    for p in 0..n {
        if p % 2 == 0 {
            mos.push(set_from(n, [p]));
            let mut r = Relation::empty(n);
            r.set(p, p);
            germs.push(r);
        } else {
            let i = p / 2;
            let (a, b) = (vert(i), vert(i + 1));
            mos.push(set_from(n, [a, p, b]));
            let mut r = Relation::empty(n);
            for (x, y) in [(a, a), (p, p), (b, b), (a, p), (p, b), (a, b)] {
                r.set(x, y);
            }
            germs.push(r);
        }
    }
    let space = FinSpace::from_min_opens(names, mos).expect("vertex-edge table is valid");
    LocalPoSpace::from_germs(space, germs).expect("vertex-edge germs are compatible")
}

/// The interval model `Ī`: points `a, c, b` with germ `a < c < b` at `c`.
pub fn interval() -> LocalPoSpace {
    vertex_edge(&["a", "b"], &["c"], false)
}

/// `Ī` with the germ at `c` reversed (`b < c < a`).
pub fn interval_rev() -> LocalPoSpace {
    let i = interval();
    let germs = i.germs().iter().map(Relation::reversed).collect();
    LocalPoSpace::from_germs(i.space().clone(), germs).expect("reversed germs are valid")
}

/// Underlying space of `Ī` with equality germs.
pub fn interval_free() -> LocalPoSpace {
    free_lps(interval().space())
}

/// Two branches out of one point: `a, c, b` with germ `c < a`, `c < b` at `c`.
pub fn fork() -> LocalPoSpace {
    let s = interval().space().clone();
    LocalPoSpace::from_named_germs(s, &[("c", vec![("c", "a"), ("c", "b")])]).expect("valid germ")
}

/// Directed circle `S⃗¹`: `v0 e0 v1 e1 v2 e2`, with `e2` closing back to `v0`.
pub fn circle() -> LocalPoSpace {
    vertex_edge(&["v0", "v1", "v2"], &["e0", "e1", "e2"], true)
}

/// Vertex-edge path with `edges` edges: `v0 e0 v1 … v_edges`.
pub fn chain(edges: usize) -> LocalPoSpace {
    let vs: Vec<String> = (0..=edges).map(|i| format!("v{i}")).collect();
    let es: Vec<String> = (0..edges).map(|i| format!("e{i}")).collect();
    let vr: Vec<&str> = vs.iter().map(String::as_str).collect();
    let er: Vec<&str> = es.iter().map(String::as_str).collect();
    vertex_edge(&vr, &er, false)
}

/// Vertex-edge cycle with `k ≥ 1` vertices.
pub fn cycle(k: usize) -> LocalPoSpace {
    let vs: Vec<String> = (0..k).map(|i| format!("v{i}")).collect();
    let es: Vec<String> = (0..k).map(|i| format!("e{i}")).collect();
    let vr: Vec<&str> = vs.iter().map(String::as_str).collect();
    let er: Vec<&str> = es.iter().map(String::as_str).collect();
    vertex_edge(&vr, &er, true)
}

/// The Sierpiński space `{o, k}` with `{o}` open, equality germs.
pub fn sierpinski() -> LocalPoSpace {
    let s = FinSpace::validate(&["o", "k"], &[vec![], vec!["o"], vec!["o", "k"]]).expect("valid");
    free_lps(&s)
}

/// Sierpiński space with germ `k < o` at `k`.
pub fn sierpinski_directed() -> LocalPoSpace {
    let s = sierpinski().space().clone();
    LocalPoSpace::from_named_germs(s, &[("k", vec![("k", "o")])]).expect("valid germ")
}

/// Product `D2 × D2`.
pub fn d2_squared() -> LocalPoSpace {
    product(&d2(), &d2())
}

/// Single-chart po-space from an atlas, as a local po-space.
pub fn from_chart(space: FinSpace, order: Relation) -> LocalPoSpace {
    let full = space.full();
    let atlas = OrderAtlas::new(space, vec![Chart::new(full, order)]).expect("valid chart");
    crate::dispace::canonicalize(&atlas)
}

/// Named fixtures with at most `max_points` points.
pub fn catalogue(max_points: usize) -> Vec<(&'static str, LocalPoSpace)> {
    let all: Vec<(&'static str, LocalPoSpace)> = vec![
        ("empty", free_lps(&FinSpace::empty())),
        ("pt", point()),
        ("D2", d2()),
        ("S", sierpinski()),
        ("S>", sierpinski_directed()),
        ("I", interval()),
        ("I-rev", interval_rev()),
        ("I-free", interval_free()),
        ("fork", fork()),
        ("D2xD2", d2_squared()),
        ("chain2", chain(2)),
        ("circle", circle()),
    ];
    all.into_iter().filter(|(_, m)| m.len() <= max_points).collect()
}
