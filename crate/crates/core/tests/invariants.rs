//! Cross-module invariants that exercise whole groups rather than samples:
//! closures of generator sets, exhaustive factorizations, and stabilizer
//! counts.

use num_bigint::BigUint;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use std::collections::HashSet;
use sympgraph::aut::{
    aut_order_formula, aut_search, compose, decompose, e_sigma_perm, edge_transitivity_witness,
    enumerate_e_elements, group_closure, psp_e_intersection_count, psp_perm_closure,
    q2_matrix_recover, recompose, transitivity_witness, Decomposition,
};
use sympgraph::graph::SympGraph;
use sympgraph::symplectic::Matrix;

fn transvection_perms(g: &SympGraph) -> Vec<Vec<u32>> {
    (0..g.n())
        .map(|v| {
            let t = g.form().transvection(&g.vector_of(v), 1);
            g.matrix_vertex_map(&t).unwrap()
        })
        .collect()
}

fn basis_vertices(g: &SympGraph) -> Vec<usize> {
    let dim = g.form().dim();
    (0..dim)
        .map(|i| {
            let mut v = vec![0; dim];
            v[i] = 1;
            g.index_of_vector(&v).unwrap()
        })
        .collect()
}

/// The full automorphism group of the 40-vertex graph over F₃ is generated
/// by transvections together with the basis-fixing elements, has exactly
/// the predicted order, and every single element factors back into a
/// matrix part and a basis-fixing part. The basis-fixing elements of the
/// closure are exactly the four parameterized ones.
#[test]
fn sp43_full_group_factors_completely() {
    let g = SympGraph::build(2, 3).unwrap();
    let mut gens = transvection_perms(&g);
    let e_perms: Vec<Vec<u32>> = enumerate_e_elements(g.field(), 2)
        .iter()
        .map(|e| e_sigma_perm(&g, e))
        .collect();
    gens.extend(e_perms.iter().cloned());
    let group = group_closure(g.n(), &gens, 60_000).unwrap();
    assert_eq!(BigUint::from(group.len()), aut_order_formula(2, 3).unwrap());

    let basis = basis_vertices(&g);
    let mut basis_fixers = HashSet::new();
    for perm in &group {
        let d = decompose(&g, perm).unwrap();
        assert_eq!(&recompose(&g, &d).unwrap(), perm);
        if basis.iter().all(|&b| perm[b] as usize == b) {
            basis_fixers.insert(perm.clone());
        }
    }
    let e_set: HashSet<Vec<u32>> = e_perms.into_iter().collect();
    assert_eq!(basis_fixers, e_set, "basis-fixing automorphisms are exactly the E elements");
}

/// Over F₂ the searched group has order 720, the transvections generate
/// all of it, and every element is induced by a unique symplectic matrix.
#[test]
fn sp42_every_automorphism_is_a_matrix() {
    let g = SympGraph::build(2, 2).unwrap();
    let outcome = aut_search(&g, None).unwrap();
    assert_eq!(outcome.order, 720);
    let group = group_closure(g.n(), &transvection_perms(&g), 1000).unwrap();
    assert_eq!(group.len(), 720);
    let mut matrices: HashSet<Matrix> = HashSet::new();
    for perm in &group {
        let t = q2_matrix_recover(&g, perm).unwrap();
        matrices.insert(t);
    }
    assert_eq!(matrices.len(), 720, "the matrix correspondence is bijective");
}

/// For ν = 1 the graph is complete, so the stabilizer of the two basis
/// vertices is the full symmetric group on the remaining q − 1: every one
/// of those (q−1)! permutations factors with the same matrix part.
#[test]
fn nu_one_basis_stabilizer_is_a_symmetric_group() {
    let g = SympGraph::build(1, 5).unwrap();
    let n = g.n();
    // S₆ from a transposition and a cycle.
    let mut cycle: Vec<u32> = (1..n as u32).collect();
    cycle.push(0);
    let mut swap = sympgraph::aut::identity_perm(n);
    swap.swap(0, 1);
    let group = group_closure(n, &[swap, cycle], 1000).unwrap();
    assert_eq!(BigUint::from(group.len()), aut_order_formula(1, 5).unwrap());

    let basis = basis_vertices(&g);
    let mut residuals = HashSet::new();
    let mut stabilizer_matrix: Option<Matrix> = None;
    for perm in &group {
        let d = decompose(&g, perm).unwrap();
        assert_eq!(&recompose(&g, &d).unwrap(), perm);
        let Decomposition::NuOne { matrix, residual } = d else {
            panic!("rank one always decomposes as NuOne");
        };
        if basis.iter().all(|&b| perm[b] as usize == b) {
            match &stabilizer_matrix {
                Some(m) => assert_eq!(m, &matrix),
                None => stabilizer_matrix = Some(matrix),
            }
            residuals.insert(residual);
        }
    }
    // (q−1)! distinct residual permutations of the non-basis vertices.
    assert_eq!(residuals.len(), 24);
}

/// For even q the intersection |PSp ∩ E| is (q−1)^ν — squaring is onto, so
/// no halving occurs. Verified by enumeration over F₄, where the E part
/// also contains genuine field automorphisms that must all fall outside
/// PSp.
#[test]
fn even_q_intersection_has_no_halving() {
    let g = SympGraph::build(1, 4).unwrap();
    let result = psp_e_intersection_count(&g, 1000).unwrap();
    assert_eq!(result.count, 3);
    assert_eq!(result.formula, 3);
    assert!(result.matches);
    // The PSp closure itself has order q(q²−1) (trivial center).
    let psp = psp_perm_closure(&g, 1000).unwrap();
    assert_eq!(psp.len(), 60);
}

/// Vertex transitivity, exhaustively: a witness for every ordered pair.
#[test]
fn sp42_is_vertex_transitive_exhaustively() {
    let g = SympGraph::build(2, 2).unwrap();
    for u in 0..g.n() {
        for v in 0..g.n() {
            let elt = transitivity_witness(&g, u, v).unwrap();
            assert_eq!(elt.perm[u] as usize, v);
        }
    }
}

/// Edge transitivity on the 40-vertex graph, sampled.
#[test]
fn sp43_is_edge_transitive_on_samples() {
    let g = SympGraph::build(2, 3).unwrap();
    let edges = g.edges();
    let mut rng = ChaCha8Rng::seed_from_u64(111);
    for _ in 0..100 {
        let e1 = edges[rng.gen_range(0..edges.len())];
        let e2 = edges[rng.gen_range(0..edges.len())];
        let elt = edge_transitivity_witness(&g, e1, e2).unwrap();
        assert_eq!(elt.perm[e1.0] as usize, e2.0);
        assert_eq!(elt.perm[e1.1] as usize, e2.1);
    }
}

/// Factorization is not tied to the shape the samples were built in:
/// products of three factors (matrix, basis-fixing, matrix) decompose and
/// recompose exactly as well.
#[test]
fn decompose_handles_arbitrary_products() {
    let g = SympGraph::build(2, 3).unwrap();
    let f = g.field().clone();
    let e_perms: Vec<Vec<u32>> = enumerate_e_elements(&f, 2)
        .iter()
        .map(|e| e_sigma_perm(&g, e))
        .collect();
    let mut rng = ChaCha8Rng::seed_from_u64(222);
    for _ in 0..200 {
        let s1 = g.matrix_vertex_map(&g.form().random_sp(&mut rng)).unwrap();
        let s2 = g.matrix_vertex_map(&g.form().random_sp(&mut rng)).unwrap();
        let h = &e_perms[rng.gen_range(0..e_perms.len())];
        let perm = compose(&s1, &compose(h, &s2));
        let d = decompose(&g, &perm).unwrap();
        assert_eq!(recompose(&g, &d).unwrap(), perm);
    }
}

/// The searched order matches the closed form on the 40-vertex graph; this
/// is the largest search the default suite runs.
#[test]
fn sp43_search_order_is_51840() {
    let g = SympGraph::build(2, 3).unwrap();
    let outcome = aut_search(&g, None).unwrap();
    assert_eq!(outcome.order, 51840);
}
