//! Spreads of maximal totally isotropic subspaces and the vertex colorings
//! they induce.
//!
//! The construction views F_q^{2ν} as W = F_{q^ν} × F_{q^ν} with the pairing
//! ⟨(a,b),(c,d)⟩ = Tr(ad) − Tr(bc), where Tr is the relative trace down to
//! F_q. The lines V_∞ = {(0,y)} and V_λ = {(x, λx)} for λ ∈ F_{q^ν} are
//! q^ν + 1 maximal totally isotropic subspaces that partition the nonzero
//! vectors of W. A change of basis bringing the pairing to the standard
//! Gram matrix transports the family into the standard space, where each
//! member becomes an independent set of (q^ν − 1)/(q − 1) vertices and the
//! family becomes a proper coloring with q^ν + 1 colors. An exact
//! branch-and-bound independence-number computation then pins the chromatic
//! number from below.

use crate::error::{Error, Result};
use crate::gf::{Elt, TowerCtx};
use crate::graph::SympGraph;
use crate::symplectic::{
    hyperbolic_basis_for_form, rank, row_reduce, vec_add_scaled, vec_mat, vector_from_code,
    FormCtx, Matrix,
};
use serde::{Deserialize, Serialize};

/// Exact independence-number search is gated to this many vertices.
const MAX_MIS_VERTICES: usize = 40;

/// A spread: q^ν + 1 pairwise-disjoint maximal totally isotropic subspaces
/// covering every projective point. `members[i]` is a row-reduced ν-row
/// basis. Member 0 comes from the line V_∞; member 1 + i comes from V_λ
/// where λ is the field element with index i.
pub struct Spread {
    pub members: Vec<Vec<Vec<Elt>>>,
    /// The change of basis that carried the two-coordinate model onto the
    /// standard space.
    pub transform: Matrix,
}

/// Builds the spread for the given form by transporting the trace-model
/// family through a hyperbolic change of basis, then re-verifying every
/// claimed property of the result.
pub fn build_spread(form: &FormCtx) -> Result<Spread> {
    let f = form.field();
    let nu = form.nu;
    let dim = form.dim();
    let tower = TowerCtx::build(f, nu)?;
    let big = &tower.big;

    // Gram matrix of ⟨(a,b),(c,d)⟩ = Tr(ad) − Tr(bc) in the basis
    // (β^0,0),…,(β^{ν-1},0),(0,β^0),…,(0,β^{ν-1}).
    let mut s = vec![vec![0; nu]; nu];
    for i in 0..nu {
        for j in 0..nu {
            s[i][j] = tower.rel_trace(big.mul(tower.basis[i], tower.basis[j]));
        }
    }
    if rank(f, &s) != nu {
        return Err(Error::TowerMismatch);
    }
    let mut gram = Matrix::zero(dim);
    for i in 0..nu {
        for j in 0..nu {
            gram.set(i, nu + j, s[i][j]);
            gram.set(nu + i, j, f.neg(s[i][j]));
        }
    }
    let model_form = |a: &[Elt], b: &[Elt]| -> Elt {
        let ag = vec_mat(f, a, &gram);
        ag.iter().zip(b).fold(0, |acc, (&x, &y)| f.add(acc, f.mul(x, y)))
    };

    // Hyperbolic basis H for the model pairing; mapping model coordinates
    // through N = H⁻¹ then carries the model form onto the standard one.
    let h_rows = hyperbolic_basis_for_form(f, dim, &model_form, &[])?;
    let h = Matrix::from_rows(&h_rows);
    let n_mat = h.inverse(f).ok_or(Error::TowerMismatch)?;

    // Model bases: V_∞ = {(0,y)} and V_λ = {(x, λx)}, λ in index order.
    let mut model_members: Vec<Vec<Vec<Elt>>> = Vec::with_capacity(big.q + 1);
    let infinity: Vec<Vec<Elt>> = (0..nu)
        .map(|j| {
            let mut v = vec![0; dim];
            v[nu + j] = 1;
            v
        })
        .collect();
    model_members.push(infinity);
    for lambda in big.elements() {
        model_members.push(
            (0..nu)
                .map(|j| {
                    let mut v = vec![0; dim];
                    v[j] = 1;
                    let second = tower.coords(big.mul(lambda, tower.basis[j]));
                    v[nu..].copy_from_slice(second);
                    v
                })
                .collect(),
        );
    }

    let mut members = Vec::with_capacity(model_members.len());
    for model in &model_members {
        let mut rows: Vec<Vec<Elt>> = model.iter().map(|v| vec_mat(f, v, &n_mat)).collect();
        row_reduce(f, &mut rows);
        if rows.len() != nu {
            return Err(Error::TowerMismatch);
        }
        if !form.is_totally_isotropic(&rows) {
            return Err(Error::TowerMismatch);
        }
        members.push(rows);
    }
    // Pairwise trivial intersection: stacked bases have full rank.
    for (i, a) in members.iter().enumerate() {
        for b in &members[i + 1..] {
            let mut stacked = a.clone();
            stacked.extend(b.iter().cloned());
            if rank(f, &stacked) != dim {
                return Err(Error::TowerMismatch);
            }
        }
    }
    Ok(Spread { members, transform: n_mat })
}

/// A proper coloring presented both ways: `color[v]` is the class of vertex
/// `v`, and `classes[c]` lists the vertices of class `c` ascending.
pub struct Coloring {
    pub color: Vec<u32>,
    pub classes: Vec<Vec<u32>>,
}

/// Turns a spread into a vertex coloring and verifies it is a partition
/// into independent sets of the right size.
pub fn coloring_from_spread(g: &SympGraph, spread: &Spread) -> Result<Coloring> {
    let f = g.field();
    let nu = g.form().nu;
    let per_class = (f.q.pow(nu as u32) - 1) / (f.q - 1);
    let mut color = vec![u32::MAX; g.n()];
    let mut classes = Vec::with_capacity(spread.members.len());
    for (c, member) in spread.members.iter().enumerate() {
        let mut class = Vec::with_capacity(per_class);
        // Canonical coefficient tuples (first nonzero entry 1) enumerate
        // each projective point of the member exactly once.
        for code in 1..f.q.pow(nu as u32) {
            let coeffs = vector_from_code(code, f.q, nu);
            if coeffs.iter().find(|&&c| c != 0) != Some(&1) {
                continue;
            }
            let mut v = vec![0; g.form().dim()];
            for (row, &c) in member.iter().zip(&coeffs) {
                vec_add_scaled(f, &mut v, row, c);
            }
            let vertex = g.index_of_vector(&v).expect("member vectors are nonzero");
            if color[vertex] != u32::MAX {
                return Err(Error::CountMismatch {
                    v: vertex,
                    class: c,
                    found: 2,
                    expected: 1,
                });
            }
            color[vertex] = c as u32;
            class.push(vertex as u32);
        }
        class.sort_unstable();
        if class.len() != per_class {
            return Err(Error::CountMismatch {
                v: 0,
                class: c,
                found: class.len(),
                expected: per_class,
            });
        }
        classes.push(class);
    }
    if let Some(v) = color.iter().position(|&c| c == u32::MAX) {
        return Err(Error::CountMismatch { v, class: 0, found: 0, expected: 1 });
    }
    // Properness: classes are independent sets.
    for class in &classes {
        for (i, &u) in class.iter().enumerate() {
            for &v in &class[i + 1..] {
                if g.adjacent(u as usize, v as usize) {
                    return Err(Error::ImproperColoring { u: u as usize, v: v as usize });
                }
            }
        }
    }
    Ok(Coloring { color, classes })
}

/// For every vertex and every color class, the number of neighbors the
/// vertex has inside the class. Verifies the counts are 0 toward the
/// vertex's own class and exactly q^{ν-1} toward every other class before
/// returning the table.
pub fn cross_class_degree(g: &SympGraph, coloring: &Coloring) -> Result<Vec<Vec<usize>>> {
    let expected_cross = g.field().q.pow(g.form().nu as u32 - 1);
    let mut table = vec![vec![0usize; coloring.classes.len()]; g.n()];
    for v in 0..g.n() {
        for (c, class) in coloring.classes.iter().enumerate() {
            let found = class.iter().filter(|&&w| g.adjacent(v, w as usize)).count();
            let expected = if coloring.color[v] as usize == c { 0 } else { expected_cross };
            if found != expected {
                return Err(Error::CountMismatch { v, class: c, found, expected });
            }
            table[v][c] = found;
        }
    }
    Ok(table)
}

// ---------------------------------------------------------------------------
// Exact independence number
// ---------------------------------------------------------------------------

fn alpha_upper(nbrs: &[u64], cand: u64, size: u32, best: &mut u32) {
    if cand == 0 {
        *best = (*best).max(size);
        return;
    }
    if size + cand.count_ones() <= *best {
        return;
    }
    let v = cand.trailing_zeros() as usize;
    alpha_upper(nbrs, cand & !(1 << v) & !nbrs[v], size + 1, best);
    alpha_upper(nbrs, cand & !(1 << v), size, best);
}

fn can_achieve(nbrs: &[u64], cand: u64, size: u32, target: u32) -> bool {
    if size == target {
        return true;
    }
    if size + cand.count_ones() < target {
        return false;
    }
    let v = cand.trailing_zeros() as usize;
    can_achieve(nbrs, cand & !(1 << v) & !nbrs[v], size + 1, target)
        || can_achieve(nbrs, cand & !(1 << v), size, target)
}

/// Exact maximum independent set on ≤ 64 vertices given neighbor bitmasks:
/// branch and bound for the size, then a second greedy pass that commits
/// the lexicographically least witness of that size.
fn mis_masks(n: usize, nbrs: &[u64]) -> (usize, Vec<u32>) {
    assert!(n <= 64);
    let full = if n == 64 { u64::MAX } else { (1u64 << n) - 1 };
    let mut best = 0;
    alpha_upper(nbrs, full, 0, &mut best);
    let mut witness = Vec::with_capacity(best as usize);
    let mut cand = full;
    let mut size = 0;
    for v in 0..n as u32 {
        if size == best {
            break;
        }
        if cand >> v & 1 == 0 {
            continue;
        }
        let with_v = cand & !(1 << v) & !nbrs[v as usize];
        if can_achieve(nbrs, with_v, size + 1, best) {
            witness.push(v);
            cand = with_v;
            size += 1;
        } else {
            cand &= !(1 << v);
        }
    }
    (best as usize, witness)
}

/// Exact independence number of the graph with the lexicographically least
/// maximum independent set as witness. Exponential-time search, so the
/// vertex count is gated.
pub fn maximum_independent_set(g: &SympGraph) -> Result<(usize, Vec<u32>)> {
    if g.n() > MAX_MIS_VERTICES {
        return Err(Error::SizeExceeded(format!(
            "exact independence number is gated to {MAX_MIS_VERTICES} vertices, graph has {}",
            g.n()
        )));
    }
    let nbrs: Vec<u64> = (0..g.n())
        .map(|u| (0..g.n()).filter(|&v| g.adjacent(u, v)).fold(0u64, |m, v| m | 1 << v))
        .collect();
    Ok(mis_masks(g.n(), &nbrs))
}

// ---------------------------------------------------------------------------
// Chromatic number certificate
// ---------------------------------------------------------------------------

/// Everything the coloring pipeline established. `chi` is exact when
/// `alpha_is_exact` (the clique-cover bound n/α meets the spread coloring);
/// otherwise it is the spread upper bound and `alpha` is the witness size.
#[derive(Clone, Debug, Serialize, Deserialize)]
pub struct ColoringCertificate {
    pub chi: usize,
    pub chi_is_exact: bool,
    pub alpha: usize,
    pub alpha_is_exact: bool,
    pub alpha_witness: Vec<u32>,
    /// The color classes themselves, as sorted vertex indices.
    pub classes: Vec<Vec<u32>>,
    pub class_size: usize,
    pub cross_degree: usize,
    pub failures: usize,
}

/// Runs the spread pipeline and assembles the chromatic certificate: a
/// proper (q^ν + 1)-coloring, the uniform cross-class degrees, and — when
/// the graph is small enough for the exact search — an independence number
/// matching the class size, which forces χ = q^ν + 1 exactly.
pub fn chromatic_certificate(g: &SympGraph) -> Result<ColoringCertificate> {
    let q = g.field().q;
    let nu = g.form().nu;
    let spread = build_spread(g.form())?;
    let coloring = coloring_from_spread(g, &spread)?;
    cross_class_degree(g, &coloring)?;
    for (c, class) in coloring.classes.iter().enumerate() {
        let vectors: Vec<Vec<Elt>> =
            class.iter().map(|&v| g.vector_of(v as usize)).collect();
        let spanned = rank(g.field(), &vectors);
        if spanned != nu || !g.form().is_totally_isotropic(&vectors) {
            return Err(Error::CountMismatch { v: 0, class: c, found: spanned, expected: nu });
        }
    }

    let class_size = (q.pow(nu as u32) - 1) / (q - 1);
    let chi = q.pow(nu as u32) + 1;
    assert_eq!(coloring.classes.len(), chi);
    let (alpha, alpha_witness, alpha_is_exact) = match maximum_independent_set(g) {
        Ok((alpha, witness)) => {
            assert_eq!(
                alpha, class_size,
                "independence number must equal the spread class size"
            );
            (alpha, witness, true)
        }
        Err(Error::SizeExceeded(_)) => {
            (class_size, coloring.classes[0].clone(), false)
        }
        Err(e) => return Err(e),
    };
    let chi_is_exact = alpha_is_exact && alpha * chi == g.n();
    if alpha_is_exact {
        assert!(chi_is_exact, "spread class count must meet the clique-cover bound");
    }
    Ok(ColoringCertificate {
        chi,
        chi_is_exact,
        alpha,
        alpha_is_exact,
        alpha_witness,
        classes: coloring.classes,
        class_size,
        cross_degree: q.pow(nu as u32 - 1),
        failures: 0,
    })
}
