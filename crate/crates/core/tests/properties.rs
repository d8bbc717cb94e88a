mod common;

use std::collections::HashSet;

use chc::complex::orientable_from;
use chc::disk::{brute_force_chc, canonical, DEFAULT_ORACLE_LIMIT};
use chc::{
    check_proper, cycle_is_contractible, disk_from_tree, dualize, enumerate_proper_trees, find_chc, find_proper_tree,
    generate_fixture, tree_from_cycle, validate_surface, ChcSearch, CycleTree, SearchOptions, Triangulation,
    TreeSearch, VertexCycle,
};
use proptest::prelude::*;
use rand::seq::SliceRandom;
use rand::SeedableRng;

use common::{brute_force_proper_trees, lemma_checks, load, SMALL, STANDARD};

const RP2_6: &str = "1 2 3\n1 3 4\n1 4 5\n1 5 6\n1 6 2\n2 3 5\n3 4 6\n4 5 2\n5 6 3\n6 2 4\n";

fn shuffled_text(t: &Triangulation, seed: u64) -> String {
    let mut rng = rand::rngs::StdRng::seed_from_u64(seed);
    let mut lines: Vec<Vec<&str>> = t
        .triangles()
        .iter()
        .map(|tri| tri.iter().map(|&v| t.label(v)).collect())
        .collect();
    lines.shuffle(&mut rng);
    for l in &mut lines {
        l.shuffle(&mut rng);
    }
    lines.iter().map(|l| l.join(" ") + "\n").collect()
}

#[test]
fn counting_identities_on_fixtures() {
    for spec in STANDARD {
        let t = generate_fixture(spec).unwrap();
        let r = validate_surface(&t).unwrap();
        let (n, e, f) = (r.vertices as i64, r.edges as i64, r.faces as i64);
        assert_eq!(r.euler_characteristic, n - e + f, "{spec}");
        assert_eq!(3 * f, 2 * e, "{spec}");
        let q = r.equivelar_degree.unwrap() as i64;
        assert_eq!(n * q, 3 * f, "{spec}");
    }
}

#[test]
fn projective_plane_is_non_orientable() {
    let t = Triangulation::parse(RP2_6).unwrap();
    let r = validate_surface(&t).unwrap();
    assert_eq!((r.vertices, r.edges, r.faces), (6, 15, 10));
    assert_eq!(r.euler_characteristic, 1);
    assert!(!r.orientable);
    assert_eq!(r.equivelar_degree, Some(5));
    assert!((0..t.triangle_count()).all(|s| !orientable_from(&t, s)));
}

#[test]
fn dual_incidence_counts() {
    for spec in STANDARD {
        let (t, m, corr) = load(spec);
        let total: usize = m.faces().iter().map(Vec::len).sum();
        assert_eq!(total, 2 * m.edge_count(), "{spec}");
        let mut seen = vec![0; m.vertex_count()];
        for w in m.faces() {
            for &u in w {
                seen[u] += 1;
            }
        }
        assert!(seen.iter().all(|&c| c == 3), "{spec}");
        assert_eq!(
            (m.vertex_count(), m.edge_count(), m.face_count()),
            (t.triangle_count(), t.edge_count(), t.vertex_count())
        );
        let mut tris: Vec<_> = (0..m.vertex_count()).map(|u| corr.triangle_of(u)).collect();
        tris.sort();
        tris.dedup();
        assert_eq!(tris.len(), t.triangle_count());
    }
}

#[test]
fn proper_trees_match_brute_force() {
    // counts frozen from an independent enumeration of vertex subsets
    let expected = [
        ("tetrahedron", 6),
        ("octahedron", 32),
        ("icosahedron", 2560),
        ("cyclic7_torus", 84),
        ("torus_grid(3,3)", 360),
    ];
    for (spec, count) in expected {
        let (t, m, _) = load(spec);
        let searched = enumerate_proper_trees(&m, &t, None);
        let set: HashSet<_> = searched.iter().cloned().collect();
        assert_eq!(set.len(), searched.len(), "{spec}: duplicates");
        assert_eq!(set, brute_force_proper_trees(&t, &m), "{spec}");
        assert_eq!(searched.len(), count, "{spec}");
    }
}

#[test]
fn lemma_facts_on_every_tree() {
    for spec in SMALL {
        let (t, m, _) = load(spec);
        for tree in enumerate_proper_trees(&m, &t, None) {
            lemma_checks(&t, &m, &tree).unwrap_or_else(|e| panic!("{spec}: {tree}: {e}"));
        }
    }
}

#[test]
fn search_and_oracle_agree() {
    let mut cases: Vec<(String, Triangulation)> = STANDARD
        .iter()
        .map(|s| (s.to_string(), generate_fixture(s).unwrap()))
        .collect();
    cases.push(("rp2_6".into(), Triangulation::parse(RP2_6).unwrap()));
    let text = std::fs::read_to_string(common::fixture_dir().join("nonorientable_chi-2_12.tri")).unwrap();
    cases.push(("chi-2".into(), Triangulation::parse(&text).unwrap()));
    for (name, t) in cases {
        let tree = find_chc(&t, SearchOptions::default()).unwrap();
        let oracle = brute_force_chc(&t, 16, 1).unwrap();
        let found = matches!(tree.outcome, ChcSearch::Found(_));
        assert_eq!(found, oracle.cycle.is_some(), "{name}");
        if let Some(h) = oracle.cycle {
            let (m, corr) = dualize(&t).unwrap();
            let CycleTree::Tree(back) = tree_from_cycle(&t, &m, &corr, &h).unwrap() else {
                panic!("{name}: oracle cycle must map to a tree")
            };
            assert_eq!(back.vertices().len(), t.vertex_count() - 2);
        }
    }
}

#[test]
fn every_octahedron_hamiltonian_cycle_is_contractible() {
    let (t, m, corr) = load("octahedron");
    let n = t.vertex_count();
    let mut count = 0;
    // brute force over vertex orders starting at 0
    let mut perm: Vec<usize> = (1..n).collect();
    let mut orders = Vec::new();
    permute(&mut perm, 0, &mut orders);
    let mut seen = HashSet::new();
    for rest in orders {
        let mut vs = vec![0];
        vs.extend(rest);
        let Ok(h) = VertexCycle::new(&t, vs) else { continue };
        if !seen.insert(h.clone()) {
            continue;
        }
        count += 1;
        let CycleTree::Tree(tree) = tree_from_cycle(&t, &m, &corr, &h).unwrap() else {
            panic!("sphere cycle must bound a disk")
        };
        assert!(check_proper(&tree, &m, &t).unwrap().is_proper());
        assert_eq!(tree.vertices().len(), 4);
    }
    assert!(count > 0);
}

fn permute(v: &mut Vec<usize>, k: usize, out: &mut Vec<Vec<usize>>) {
    if k == v.len() {
        out.push(v.clone());
        return;
    }
    for i in k..v.len() {
        v.swap(k, i);
        permute(v, k + 1, out);
        v.swap(k, i);
    }
}

#[test]
fn disks_bounded_by_hamiltonian_cycles_have_n_minus_2_faces() {
    for spec in ["icosahedron", "torus_grid(3,4)"] {
        let (t, m, corr) = load(spec);
        for tree in enumerate_proper_trees(&m, &t, Some(200)) {
            let disk = disk_from_tree(&t, &m, &corr, &tree).unwrap();
            let w = cycle_is_contractible(&t, disk.boundary()).unwrap().witness.unwrap();
            assert_eq!(w.len(), t.vertex_count() - 2);
            assert_eq!(disk.boundary_edges(&t).len(), t.vertex_count());
            let on_boundary: HashSet<_> = disk.boundary().vertices().iter().collect();
            assert!(w.iter().all(|&f| t.triangle(f).iter().all(|v| on_boundary.contains(v))));
        }
    }
}

#[test]
fn search_finds_first_of_enumeration() {
    for spec in SMALL {
        let (t, m, _) = load(spec);
        let first = enumerate_proper_trees(&m, &t, Some(1));
        let TreeSearch::Found(tree) = find_proper_tree(&m, &t, SearchOptions::default()).outcome else {
            panic!("{spec}")
        };
        assert_eq!(first, vec![tree]);
    }
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(32))]

    #[test]
    fn reports_ignore_input_order(seed in any::<u64>(), idx in 0usize..7) {
        let t = generate_fixture(STANDARD[idx]).unwrap();
        let shuffled = Triangulation::parse(&shuffled_text(&t, seed)).unwrap();
        prop_assert_eq!(&shuffled, &t);
        let r = validate_surface(&shuffled).unwrap();
        prop_assert_eq!(r, validate_surface(&t).unwrap());
        let a = serde_json::to_string(&r).unwrap();
        let b = serde_json::to_string(&validate_surface(&t).unwrap()).unwrap();
        prop_assert_eq!(a, b);
        prop_assert_eq!(dualize(&shuffled).unwrap(), dualize(&t).unwrap());
    }

    #[test]
    fn orientation_ignores_seed(idx in 0usize..7, seed in 0usize..32) {
        let t = generate_fixture(STANDARD[idx]).unwrap();
        let seed = seed % t.triangle_count();
        prop_assert!(orientable_from(&t, seed));
    }

    #[test]
    fn canonical_cycle_ignores_rotation_and_reflection(
        vs in Just((0usize..9).collect::<Vec<_>>()).prop_shuffle(),
        rot in 0usize..9,
        flip in any::<bool>(),
    ) {
        let mut moved = vs.clone();
        moved.rotate_left(rot);
        if flip {
            moved.reverse();
        }
        let c = canonical(vs.clone());
        prop_assert_eq!(&canonical(moved), &c);
        prop_assert_eq!(c[0], 0);
        prop_assert!(c[1] < c[c.len() - 1]);
    }
}

#[test]
fn oracle_respects_limit_default() {
    let t = generate_fixture("torus_grid(3,4)").unwrap();
    assert!(brute_force_chc(&t, DEFAULT_ORACLE_LIMIT, 2).unwrap().cycle.is_some());
}
