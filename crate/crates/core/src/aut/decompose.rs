//! Factoring an arbitrary graph automorphism into a symplectic matrix part
//! and a basis-fixing part.
//!
//! Given an automorphism τ, the images of the 2ν standard basis vertices
//! determine (after rescaling the f-slots) a symplectic matrix A whose rows
//! are representatives of those images; composing with the inverse matrix
//! action yields τ₁ = σ_{A⁻¹} ∘ τ which fixes every basis vertex. For
//! ν ≥ 2 and q > 2, probing τ₁ on the vertices [e₁ + a·b_j] recovers one
//! map π_j per basis direction; the family satisfies arithmetic identities
//! that force each π_j to be a field automorphism scaled by a constant, and
//! the whole of τ₁ to be the basis-fixing automorphism built from those
//! constants. Over F₂ scalars are trivial and automorphisms are instead
//! recovered as matrices directly from additivity.

use crate::error::{Error, Result};
use crate::gf::{Elt, FieldCtx};
use crate::graph::SympGraph;
use crate::symplectic::{vec_scale, Matrix, SlotAssignment, SympClass};

use super::{compose, e_sigma_perm, EElement};

/// The maps π_1, …, π_{2ν} extracted from a basis-fixing automorphism:
/// `maps[j]` tabulates π_{j+1} as a function on field-element indices, and
/// `maps[0]` (π_1) is the identity by convention.
#[derive(Clone, Debug)]
pub struct PiFamily {
    pub maps: Vec<Vec<Elt>>,
}

#[derive(Clone, Copy, Debug)]
pub struct PiCheckReport {
    pub identities_checked: usize,
}

/// Verifies the arithmetic identities every extracted family must satisfy:
/// the interleaved products of partner maps all reproduce π₂, and each map
/// beyond π₁ is additive, odd, and multiplicative up to the constant
/// π_j(1). Together these force π_j = π_j(1)·σ for a single field
/// automorphism σ.
pub fn pi_family_check(f: &FieldCtx, fam: &PiFamily) -> Result<PiCheckReport> {
    let q = f.q;
    let dim = fam.maps.len();
    assert!(dim >= 2 && dim % 2 == 0, "family has one map per basis vector");
    for (j, map) in fam.maps.iter().enumerate() {
        assert_eq!(map.len(), q);
        assert_eq!(map[0], 0, "pi_{} must send 0 to 0", j + 1);
    }
    assert!(fam.maps[0].iter().enumerate().all(|(a, &img)| a == img), "pi_1 is the identity");

    let mut checked = 0;
    let violated = |index: usize, a: Elt, b: Elt| Error::IdentityViolated { index, a, b };

    // Partner identity: for every later hyperbolic pair (π_{2i+1}, π_{2i+2}),
    // π_{2i+1}(1)·π_{2i+2}(a) = π_{2i+2}(1)·π_{2i+1}(a) = π₂(a).
    for i in 1..dim / 2 {
        let odd = &fam.maps[2 * i];
        let even = &fam.maps[2 * i + 1];
        for a in 0..q {
            if f.mul(odd[1], even[a]) != fam.maps[1][a] {
                return Err(violated(2 * i + 2, a, 0));
            }
            if f.mul(even[1], odd[a]) != fam.maps[1][a] {
                return Err(violated(2 * i + 1, a, 0));
            }
            checked += 2;
        }
    }
    // Arithmetic identities for each map beyond the identity.
    for (idx, map) in fam.maps.iter().enumerate().skip(1) {
        let unit = map[1];
        for a in 0..q {
            for b in 0..q {
                if map[f.add(a, b)] != f.add(map[a], map[b]) {
                    return Err(violated(idx + 1, a, b));
                }
                if f.mul(map[f.mul(a, b)], unit) != f.mul(map[a], map[b]) {
                    return Err(violated(idx + 1, a, b));
                }
                checked += 2;
            }
            if map[f.neg(a)] != f.neg(map[a]) {
                return Err(violated(idx + 1, a, 0));
            }
            checked += 1;
            if a != 0 {
                if f.mul(map[f.inv(a)], map[a]) != f.mul(unit, unit) {
                    return Err(violated(idx + 1, a, 0));
                }
                checked += 1;
            }
        }
    }
    Ok(PiCheckReport { identities_checked: checked })
}

/// An automorphism factored through the standard basis.
#[derive(Clone, Debug)]
pub enum Decomposition {
    /// τ = σ_A ∘ h where h is the basis-fixing automorphism built from
    /// `e`; `pi` is the extracted family that certified the factorization.
    General { matrix: Matrix, e: EElement, pi: PiFamily },
    /// ν = 1: the graph is complete, so after the matrix part any
    /// permutation of the q − 1 non-basis vertices remains. `residual`
    /// lists their images in ascending vertex order.
    NuOne { matrix: Matrix, residual: Vec<u32> },
}

fn basis_vertex_indices(g: &SympGraph) -> Vec<usize> {
    let dim = g.form().dim();
    (0..dim)
        .map(|i| {
            let mut v = vec![0; dim];
            v[i] = 1;
            g.index_of_vector(&v).expect("unit vectors are canonical representatives")
        })
        .collect()
}

/// Vertices that are not standard basis vertices, ascending.
fn non_basis_vertices(g: &SympGraph) -> Vec<usize> {
    let basis = basis_vertex_indices(g);
    (0..g.n()).filter(|v| !basis.contains(v)).collect()
}

/// Factors an automorphism as τ = σ_A ∘ τ₁ with A symplectic and τ₁
/// basis-fixing, then identifies τ₁. Requires q > 2; over F₂ use
/// [`q2_matrix_recover`], where the scalar bookkeeping degenerates.
pub fn decompose(g: &SympGraph, perm: &[u32]) -> Result<Decomposition> {
    let f = g.field().clone();
    let nu = g.form().nu;
    let dim = g.form().dim();
    if f.q == 2 {
        return Err(Error::InvalidParameter(
            "decompose requires q > 2; over F2 use q2_matrix_recover".into(),
        ));
    }
    if !g.is_automorphism(perm) {
        return Err(Error::NotAutomorphism);
    }
    let basis_idx = basis_vertex_indices(g);

    // Images of the basis vertices give the matrix part. Rescale each
    // f-image so the pair pairs to exactly 1; all other Gram relations hold
    // automatically because τ preserves adjacency, and complete_hyperbolic
    // re-verifies them.
    let mut pairs = Vec::with_capacity(nu);
    for block in 0..nu {
        let e_img = g.vector_of(perm[basis_idx[2 * block]] as usize);
        let f_img = g.vector_of(perm[basis_idx[2 * block + 1]] as usize);
        let c = g.form().form(&e_img, &f_img);
        if c == 0 {
            return Err(Error::NotAutomorphism);
        }
        let f_img = vec_scale(&f, &f_img, f.inv(c));
        pairs.push(SlotAssignment::Pair(e_img, f_img));
    }
    let a_mat = g.form().complete_hyperbolic(&pairs)?;
    let a_inv = a_mat.inverse(&f).expect("symplectic matrices are invertible");
    let sigma_inv = g
        .matrix_vertex_map(&a_inv)
        .expect("nonsingular matrices act bijectively");
    let tau1 = compose(&sigma_inv, perm);
    for &bi in &basis_idx {
        assert_eq!(tau1[bi] as usize, bi, "the matrix part must absorb the basis images");
    }

    if nu == 1 {
        let residual = non_basis_vertices(g).iter().map(|&v| tau1[v]).collect();
        return Ok(Decomposition::NuOne { matrix: a_mat, residual });
    }

    // Probe τ₁ on [e₁ + a·b_j] to extract π_j for j = 2..2ν. The image
    // must be another vertex of the same shape, or τ₁ is not basis-fixing
    // of the expected kind.
    let mut maps: Vec<Vec<Elt>> = vec![(0..f.q).collect()];
    for j in 2..=dim {
        let mut table = vec![0; f.q];
        for a in 1..f.q {
            let mut v = vec![0; dim];
            v[0] = 1;
            v[j - 1] = a;
            let vertex = g.index_of_vector(&v).unwrap();
            let img = g.vector_of(tau1[vertex] as usize);
            let shape_ok = img[0] == 1
                && img[j - 1] != 0
                && img.iter().enumerate().all(|(c, &x)| c == 0 || c == j - 1 || x == 0);
            if !shape_ok {
                return Err(Error::ExtractionMismatch(format!(
                    "image of [e1 + {a}·b{j}] leaves the coordinate plane"
                )));
            }
            table[a] = img[j - 1];
        }
        maps.push(table);
    }
    let pi = PiFamily { maps };
    pi_family_check(&f, &pi)?;

    // π₂ = k₁·σ for a Frobenius power σ; the remaining scalars are the
    // units of the odd-position maps.
    let k1 = pi.maps[1][1];
    let normalized: Vec<Elt> = pi.maps[1].iter().map(|&x| f.mul(f.inv(k1), x)).collect();
    let frob_exp = (0..f.m)
        .find(|&t| (0..f.q).all(|a| normalized[a] == f.frob_iter(t, a)))
        .ok_or_else(|| {
            Error::ExtractionMismatch("normalized map is not a field automorphism".into())
        })?;
    let mut scalars = vec![k1];
    for j in 1..nu {
        scalars.push(pi.maps[2 * j][1]);
    }
    let e = EElement { scalars, frob_exp };
    if e_sigma_perm(g, &e) != tau1 {
        return Err(Error::ExtractionMismatch(
            "basis-fixing part does not act as the extracted scalars".into(),
        ));
    }
    Ok(Decomposition::General { matrix: a_mat, e, pi })
}

/// Rebuilds the permutation from its factorization.
pub fn recompose(g: &SympGraph, d: &Decomposition) -> Result<Vec<u32>> {
    match d {
        Decomposition::General { matrix, e, .. } => {
            let sigma = g.matrix_vertex_map(matrix).ok_or(Error::NotAutomorphism)?;
            Ok(compose(&sigma, &e_sigma_perm(g, e)))
        }
        Decomposition::NuOne { matrix, residual } => {
            let sigma = g.matrix_vertex_map(matrix).ok_or(Error::NotAutomorphism)?;
            let mut tau1: Vec<u32> = (0..g.n() as u32).collect();
            for (&v, &img) in non_basis_vertices(g).iter().zip(residual) {
                tau1[v] = img;
            }
            Ok(compose(&sigma, &tau1))
        }
    }
}

/// Recovers the symplectic matrix behind an automorphism over F₂, where a
/// vertex simply is a nonzero vector. Verifies additivity on every pair of
/// vertices — the fact that makes the map linear — and then checks the
/// assembled matrix reproduces the permutation exactly.
pub fn q2_matrix_recover(g: &SympGraph, perm: &[u32]) -> Result<Matrix> {
    let f = g.field().clone();
    let dim = g.form().dim();
    if f.q != 2 {
        return Err(Error::InvalidParameter("q2_matrix_recover requires q = 2".into()));
    }
    if !g.is_automorphism(perm) {
        return Err(Error::NotAutomorphism);
    }
    let image = |v: usize| g.vector_of(perm[v] as usize);
    for u in 0..g.n() {
        for w in u + 1..g.n() {
            // Over F₂ the sum of two distinct nonzero vectors is nonzero,
            // so it names a third vertex.
            let sum: Vec<Elt> = g
                .vector_of(u)
                .iter()
                .zip(g.vector_of(w))
                .map(|(&a, b)| f.add(a, b))
                .collect();
            let sum_vertex = g.index_of_vector(&sum).unwrap();
            let expect: Vec<Elt> =
                image(u).iter().zip(image(w)).map(|(&a, b)| f.add(a, b)).collect();
            if image(sum_vertex) != expect {
                return Err(Error::AdditivityFail { b1: u, b2: w });
            }
        }
    }
    let rows: Vec<Vec<Elt>> = (0..dim)
        .map(|i| {
            let mut v = vec![0; dim];
            v[i] = 1;
            image(g.index_of_vector(&v).unwrap())
        })
        .collect();
    let t = Matrix::from_rows(&rows);
    assert_eq!(g.form().gsp_class(&t), SympClass::Sp, "additive automorphisms are symplectic");
    assert_eq!(
        g.matrix_vertex_map(&t).as_deref(),
        Some(perm),
        "recovered matrix must reproduce the permutation"
    );
    Ok(t)
}
