//! Automorphisms of symplectic graphs: the matrix-induced ones, the
//! basis-fixing subgroup E of scalar/field-automorphism maps, exact order
//! formulas, and verification suites that cross-check all three against
//! each other and against a direct search.

mod decompose;
pub mod search;

pub use decompose::{
    decompose, pi_family_check, q2_matrix_recover, recompose, Decomposition, PiCheckReport,
    PiFamily,
};
pub use search::{aut_search, search_adjacency, SearchOutcome};

use crate::error::{Error, Result};
use crate::gf::{factor_prime_power, Elt, FieldCtx};
use crate::graph::SympGraph;
use crate::symplectic::Matrix;
use num_bigint::BigUint;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};
use std::collections::HashSet;
use std::time::Instant;

// ---------------------------------------------------------------------------
// Permutations
// ---------------------------------------------------------------------------

pub fn identity_perm(n: usize) -> Vec<u32> {
    (0..n as u32).collect()
}

/// `compose(outer, inner)` applies `inner` first.
pub fn compose(outer: &[u32], inner: &[u32]) -> Vec<u32> {
    inner.iter().map(|&v| outer[v as usize]).collect()
}

pub fn inverse_perm(p: &[u32]) -> Vec<u32> {
    let mut inv = vec![0u32; p.len()];
    for (i, &v) in p.iter().enumerate() {
        inv[v as usize] = i as u32;
    }
    inv
}

/// Closure of a generating set under composition, by breadth-first
/// multiplication. Errors out rather than exceeding `limit` elements.
pub fn group_closure(
    n: usize,
    gens: &[Vec<u32>],
    limit: usize,
) -> Result<HashSet<Vec<u32>>> {
    let mut set = HashSet::new();
    set.insert(identity_perm(n));
    let mut queue = vec![identity_perm(n)];
    while let Some(cur) = queue.pop() {
        for gen in gens {
            let next = compose(gen, &cur);
            if !set.contains(&next) {
                if set.len() >= limit {
                    return Err(Error::SizeExceeded(format!(
                        "group closure exceeds the cap of {limit} elements"
                    )));
                }
                set.insert(next.clone());
                queue.push(next);
            }
        }
    }
    Ok(set)
}

// ---------------------------------------------------------------------------
// Automorphisms with provenance
// ---------------------------------------------------------------------------

/// Where an automorphism came from.
#[derive(Clone, Debug)]
pub enum AutTag {
    FromMatrix { matrix: Matrix, multiplier: Elt },
    FromE(EElement),
    Searched,
}

/// A verified automorphism: constructing one re-checks bijectivity and
/// adjacency preservation.
#[derive(Clone, Debug)]
pub struct AutElement {
    pub perm: Vec<u32>,
    pub tag: AutTag,
}

impl AutElement {
    pub fn new(g: &SympGraph, perm: Vec<u32>, tag: AutTag) -> Result<AutElement> {
        if !g.is_automorphism(&perm) {
            return Err(Error::NotAutomorphism);
        }
        Ok(AutElement { perm, tag })
    }
}

/// The vertex permutation induced by a form-preserving matrix (up to a
/// scalar). Matrices outside GSp do not induce automorphisms and are
/// rejected.
pub fn sigma_from_matrix(g: &SympGraph, t: &Matrix) -> Result<AutElement> {
    let Some(multiplier) = g.form().gsp_class(t).multiplier() else {
        return Err(Error::NotAutomorphism);
    };
    let perm = g.matrix_vertex_map(t).ok_or(Error::NotAutomorphism)?;
    AutElement::new(g, perm, AutTag::FromMatrix { matrix: t.clone(), multiplier })
}

/// Whether σ_T is the identity permutation, asserting on the way that this
/// happens exactly when T is a scalar matrix — the kernel of the action.
pub fn kernel_check(g: &SympGraph, t: &Matrix) -> Result<bool> {
    let perm = g.matrix_vertex_map(t).ok_or(Error::NotAutomorphism)?;
    let is_id = perm == identity_perm(g.n());
    let c = t.get(0, 0);
    let is_scalar = c != 0 && *t == Matrix::identity(t.dim).scale(c, g.field());
    assert_eq!(is_id, is_scalar, "the kernel of the matrix action is the scalars");
    Ok(is_id)
}

/// A symplectic matrix whose action carries vertex `u` to vertex `v`:
/// complete both representatives to symplectic bases and divide.
pub fn transitivity_witness(g: &SympGraph, u: usize, v: usize) -> Result<AutElement> {
    use crate::symplectic::SlotAssignment::Single;
    let f = g.field().clone();
    let t1 = g.form().complete_hyperbolic(&[Single(g.vector_of(u))])?;
    let t2 = g.form().complete_hyperbolic(&[Single(g.vector_of(v))])?;
    let t = t1.inverse(&f).expect("symplectic").mul(&t2, &f);
    let elt = sigma_from_matrix(g, &t)?;
    assert_eq!(elt.perm[u] as usize, v, "witness must map u to v");
    Ok(elt)
}

/// A symplectic matrix carrying one ordered edge onto another. Each edge is
/// rescaled into a hyperbolic pair first, so the same completion machinery
/// applies.
pub fn edge_transitivity_witness(
    g: &SympGraph,
    e1: (usize, usize),
    e2: (usize, usize),
) -> Result<AutElement> {
    use crate::symplectic::SlotAssignment::Pair;
    let f = g.field().clone();
    let mut completions = Vec::new();
    for (u, v) in [e1, e2] {
        if !g.adjacent(u, v) {
            return Err(Error::NotAnEdge { a: u, b: v });
        }
        let a = g.vector_of(u);
        let b = g.vector_of(v);
        let c = g.form().form(&a, &b);
        let b = crate::symplectic::vec_scale(&f, &b, f.inv(c));
        completions.push(g.form().complete_hyperbolic(&[Pair(a, b)])?);
    }
    let t = completions[0].inverse(&f).expect("symplectic").mul(&completions[1], &f);
    let elt = sigma_from_matrix(g, &t)?;
    assert_eq!(elt.perm[e1.0] as usize, e2.0);
    assert_eq!(elt.perm[e1.1] as usize, e2.1);
    Ok(elt)
}

// ---------------------------------------------------------------------------
// The basis-fixing subgroup E
// ---------------------------------------------------------------------------

/// Parameters of a basis-fixing automorphism: ν nonzero scalars
/// (k₁, …, k_ν) and a power of the Frobenius. The induced map multiplies
/// coordinate 2j by k_{j+1}, coordinate 2j+1 by k₁·k_{j+1}⁻¹ (coordinate 0
/// by 1, coordinate 1 by k₁), after applying the field automorphism to
/// every coordinate.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct EElement {
    pub scalars: Vec<Elt>,
    pub frob_exp: usize,
}

impl EElement {
    pub fn identity(nu: usize) -> EElement {
        EElement { scalars: vec![1; nu], frob_exp: 0 }
    }
}

/// Per-coordinate multipliers of the induced map.
fn e_coordinate_multipliers(f: &FieldCtx, e: &EElement) -> Vec<Elt> {
    let nu = e.scalars.len();
    let mut mult = Vec::with_capacity(2 * nu);
    mult.push(1);
    mult.push(e.scalars[0]);
    for j in 1..nu {
        mult.push(e.scalars[j]);
        mult.push(f.mul(e.scalars[0], f.inv(e.scalars[j])));
    }
    mult
}

/// The vertex permutation induced by an E element.
pub fn e_sigma_perm(g: &SympGraph, e: &EElement) -> Vec<u32> {
    let f = g.field();
    assert_eq!(e.scalars.len(), g.form().nu);
    assert!(e.scalars.iter().all(|&k| k != 0 && k < f.q));
    assert!(e.frob_exp < f.m);
    let mult = e_coordinate_multipliers(f, e);
    (0..g.n())
        .map(|i| {
            let a = g.vector_of(i);
            let b: Vec<Elt> = a
                .iter()
                .zip(&mult)
                .map(|(&x, &m)| f.mul(m, f.frob_iter(e.frob_exp, x)))
                .collect();
            g.index_of_vector(&b).expect("images of nonzero vectors are nonzero") as u32
        })
        .collect()
}

/// Wraps an E element as a verified automorphism, additionally asserting
/// that it fixes every standard basis vertex.
pub fn e_element_apply(g: &SympGraph, e: &EElement) -> Result<AutElement> {
    let perm = e_sigma_perm(g, e);
    let dim = g.form().dim();
    for i in 0..dim {
        let mut v = vec![0; dim];
        v[i] = 1;
        let idx = g.index_of_vector(&v).unwrap();
        assert_eq!(perm[idx] as usize, idx, "E elements fix the basis vertices");
    }
    AutElement::new(g, perm, AutTag::FromE(e.clone()))
}

/// Group law on parameters, matching composition of the induced maps with
/// `a` applied second: the scalars twist through a's field automorphism.
pub fn e_group_mul(f: &FieldCtx, a: &EElement, b: &EElement) -> EElement {
    assert_eq!(a.scalars.len(), b.scalars.len());
    let scalars = a
        .scalars
        .iter()
        .zip(&b.scalars)
        .map(|(&ka, &kb)| f.mul(ka, f.frob_iter(a.frob_exp, kb)))
        .collect();
    EElement { scalars, frob_exp: (a.frob_exp + b.frob_exp) % f.m }
}

/// All (q−1)^ν · m elements of E, scalars cycling fastest.
pub fn enumerate_e_elements(f: &FieldCtx, nu: usize) -> Vec<EElement> {
    let nonzero: Vec<Elt> = f.nonzero_elements().collect();
    let mut out = Vec::with_capacity(nonzero.len().pow(nu as u32) * f.m);
    for frob_exp in 0..f.m {
        let mut odometer = vec![0usize; nu];
        loop {
            out.push(EElement {
                scalars: odometer.iter().map(|&i| nonzero[i]).collect(),
                frob_exp,
            });
            let mut pos = 0;
            loop {
                if pos == nu {
                    break;
                }
                odometer[pos] += 1;
                if odometer[pos] < nonzero.len() {
                    break;
                }
                odometer[pos] = 0;
                pos += 1;
            }
            if pos == nu {
                break;
            }
        }
    }
    out
}

// ---------------------------------------------------------------------------
// Orders and intersections
// ---------------------------------------------------------------------------

/// |Sp(2ν, q)| = q^{ν²} · Π_{i=1..ν} (q^{2i} − 1).
pub fn sp_order(nu: usize, q: usize) -> BigUint {
    let q = BigUint::from(q);
    let mut order = q.pow((nu * nu) as u32);
    for i in 1..=nu as u32 {
        order *= q.pow(2 * i) - 1u32;
    }
    order
}

/// The automorphism group order of the symplectic graph. For ν = 1 the
/// graph is complete on q + 1 vertices and the order is
/// q(q² − 1)(q − 2)! — the same number as (q + 1)!, which is asserted. For
/// ν ≥ 2 it is |Sp(2ν, q)| times the number of field automorphisms.
pub fn aut_order_formula(nu: usize, q: usize) -> Result<BigUint> {
    let (_, m) = factor_prime_power(q).ok_or(Error::NonPrime(q))?;
    if nu == 0 {
        return Err(Error::InvalidParameter("nu must be ≥ 1".into()));
    }
    if nu == 1 {
        let mut order = BigUint::from(q) * (q * q - 1);
        for i in 2..=q.saturating_sub(2) {
            order *= i;
        }
        let mut factorial = BigUint::from(1u32);
        for i in 2..=q + 1 {
            factorial *= i;
        }
        assert_eq!(order, factorial, "q(q²−1)(q−2)! must equal (q+1)!");
        Ok(order)
    } else {
        Ok(sp_order(nu, q) * m)
    }
}

/// The count |PSp ∩ E| predicted by the scalar-square argument:
/// (q−1)^ν / 2 for odd q (only square multipliers descend to PSp) and
/// (q−1)^ν for even q (squaring is onto).
pub fn psp_e_intersection_formula(nu: usize, q: usize) -> u64 {
    let count = (q as u64 - 1).pow(nu as u32);
    if q % 2 == 1 {
        count / 2
    } else {
        count
    }
}

/// The permutation group generated by all symplectic transvections — as
/// permutations, this is PSp(2ν, q). The closure size is verified against
/// |Sp| / gcd(2, q−1) before returning.
pub fn psp_perm_closure(g: &SympGraph, limit: usize) -> Result<HashSet<Vec<u32>>> {
    let f = g.field().clone();
    let gens: Vec<Vec<u32>> = (0..g.n())
        .map(|v| {
            let t = g.form().transvection(&g.vector_of(v), 1);
            g.matrix_vertex_map(&t).expect("transvections are nonsingular")
        })
        .collect();
    let set = group_closure(g.n(), &gens, limit)?;
    let center = if g.field().q % 2 == 1 { 2u32 } else { 1 };
    assert_eq!(
        BigUint::from(set.len()) * center,
        sp_order(g.form().nu, f.q),
        "transvection closure must have the size of PSp"
    );
    Ok(set)
}

#[derive(Clone, Debug, Serialize, Deserialize)]
pub struct PspEIntersection {
    pub count: u64,
    pub formula: u64,
    pub matches: bool,
}

/// Brute-force |PSp ∩ E|: enumerate E, test membership in the transvection
/// closure, and compare with the closed-form count.
pub fn psp_e_intersection_count(g: &SympGraph, limit: usize) -> Result<PspEIntersection> {
    let psp = psp_perm_closure(g, limit)?;
    let count = enumerate_e_elements(g.field(), g.form().nu)
        .iter()
        .filter(|e| psp.contains(&e_sigma_perm(g, e)))
        .count() as u64;
    let formula = psp_e_intersection_formula(g.form().nu, g.field().q);
    Ok(PspEIntersection { count, formula, matches: count == formula })
}

// ---------------------------------------------------------------------------
// Verification suites
// ---------------------------------------------------------------------------

#[derive(Clone, Debug, Serialize, Deserialize)]
pub struct CharacterizationReport {
    pub gsp_preserve: usize,
    pub non_gsp_break: usize,
    pub kernel_scalar: usize,
    pub failures: usize,
}

/// Samples the two directions of the matrix characterization: every GSp
/// matrix induces an automorphism (with the right multiplier), every
/// nonsingular matrix outside GSp breaks some adjacency, and the kernel of
/// the action is exactly the scalars.
pub fn characterization_suite(
    g: &SympGraph,
    samples: usize,
    seed: u64,
) -> Result<CharacterizationReport> {
    let f = g.field().clone();
    let nu = g.form().nu;
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut report =
        CharacterizationReport { gsp_preserve: 0, non_gsp_break: 0, kernel_scalar: 0, failures: 0 };
    for _ in 0..samples {
        let (t, k) = g.form().random_gsp(&mut rng);
        let elt = sigma_from_matrix(g, &t)?;
        match elt.tag {
            AutTag::FromMatrix { multiplier, .. } => assert_eq!(multiplier, k),
            _ => unreachable!(),
        }
        report.gsp_preserve += 1;

        // For ν = 1 every nonsingular matrix preserves the form up to its
        // determinant, so the negative direction is vacuous there.
        if nu >= 2 {
            let bad = loop {
                let m = g.form().random_nonsingular(&mut rng);
                if g.form().gsp_class(&m).multiplier().is_none() {
                    break m;
                }
            };
            let perm = g.matrix_vertex_map(&bad).ok_or(Error::NotAutomorphism)?;
            if g.find_adjacency_violation(&perm).is_none() {
                report.failures += 1;
            } else {
                report.non_gsp_break += 1;
            }
        }

        // Scalars act trivially; kernel_check itself asserts the converse
        // (an identity action forces a scalar matrix) on every call.
        let c = rng.gen_range(1..f.q);
        let scalar = Matrix::identity(g.form().dim()).scale(c, &f);
        if kernel_check(g, &scalar)? {
            report.kernel_scalar += 1;
        } else {
            report.failures += 1;
        }
        kernel_check(g, &t)?;
    }
    Ok(report)
}

#[derive(Clone, Debug, Serialize, Deserialize)]
pub struct RoundtripReport {
    pub samples: usize,
    pub identities_checked: usize,
    pub failures: usize,
}

/// Samples random products σ_S ∘ h(e) of a symplectic matrix action and a
/// basis-fixing element, factors each back apart, and re-multiplies. Over
/// F₂ the E part is trivial and the matrix is recovered from additivity
/// instead. Sample i uses its own seed, so the suite parallelizes without
/// changing results.
pub fn roundtrip_suite(g: &SympGraph, samples: usize, seed: u64) -> Result<RoundtripReport> {
    let f = g.field().clone();
    let nu = g.form().nu;
    let totals: Vec<Result<usize>> = (0..samples)
        .into_par_iter()
        .map(|i| {
            let mut rng = ChaCha8Rng::seed_from_u64(seed.wrapping_add(i as u64));
            let s = g.form().random_sp(&mut rng);
            if f.q == 2 {
                let perm = g.matrix_vertex_map(&s).unwrap();
                let t = q2_matrix_recover(g, &perm)?;
                assert_eq!(g.matrix_vertex_map(&t).as_deref(), Some(&perm[..]));
                Ok(0)
            } else {
                let e = EElement {
                    scalars: (0..nu).map(|_| rng.gen_range(1..f.q)).collect(),
                    frob_exp: rng.gen_range(0..f.m),
                };
                let perm = compose(&g.matrix_vertex_map(&s).unwrap(), &e_sigma_perm(g, &e));
                let d = decompose(g, &perm)?;
                if recompose(g, &d)? != perm {
                    return Err(Error::ExtractionMismatch(
                        "recomposition does not reproduce the sampled automorphism".into(),
                    ));
                }
                match &d {
                    Decomposition::General { pi, .. } => {
                        Ok(pi_family_check(&f, pi)?.identities_checked)
                    }
                    Decomposition::NuOne { .. } => Ok(0),
                }
            }
        })
        .collect();
    let mut identities_checked = 0;
    for total in totals {
        identities_checked += total?;
    }
    Ok(RoundtripReport { samples, identities_checked, failures: 0 })
}

// ---------------------------------------------------------------------------
// Certificate
// ---------------------------------------------------------------------------

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum AutMode {
    Formula,
    Search,
    DecomposeRoundtrip,
    All,
}

impl std::str::FromStr for AutMode {
    type Err = Error;

    fn from_str(s: &str) -> Result<AutMode> {
        match s {
            "formula" => Ok(AutMode::Formula),
            "search" => Ok(AutMode::Search),
            "decompose-roundtrip" => Ok(AutMode::DecomposeRoundtrip),
            "all" => Ok(AutMode::All),
            other => Err(Error::FormatUnsupported(other.to_string())),
        }
    }
}

/// Everything the requested modes established about the automorphism group.
/// Optional sections are present only when their mode ran.
#[derive(Clone, Debug, Serialize, Deserialize)]
pub struct AutCertificate {
    pub nu: usize,
    pub q: usize,
    /// Closed-form group order: a JSON number when it fits in u64,
    /// otherwise a decimal string.
    pub order_formula: serde_json::Value,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub order_search: Option<u64>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub order_matches: Option<bool>,
    /// Generators found by the search, as vertex permutations.
    #[serde(skip_serializing_if = "Option::is_none")]
    pub generators: Option<Vec<Vec<u32>>>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub decompositions_checked: Option<usize>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub characterization: Option<CharacterizationReport>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub roundtrip: Option<RoundtripReport>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub q2_recover: Option<String>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub psp_e_intersection: Option<PspEIntersection>,
    pub failures: usize,
}

/// Renders a group order as a JSON number when it fits in u64, falling
/// back to its decimal digits as a string.
fn order_to_json(order: &BigUint) -> serde_json::Value {
    match u64::try_from(order) {
        Ok(n) => serde_json::Value::from(n),
        Err(_) => serde_json::Value::from(order.to_string()),
    }
}

/// Caps the brute-force PSp closure used for the intersection count.
const MAX_CLOSURE: usize = 200_000;

/// Runs the requested verification modes and assembles the certificate.
pub fn aut_certificate(
    g: &SympGraph,
    mode: AutMode,
    samples: usize,
    seed: u64,
    deadline: Option<Instant>,
) -> Result<AutCertificate> {
    let nu = g.form().nu;
    let q = g.field().q;
    let order = aut_order_formula(nu, q)?;
    let mut cert = AutCertificate {
        nu,
        q,
        order_formula: order_to_json(&order),
        order_search: None,
        order_matches: None,
        generators: None,
        decompositions_checked: None,
        characterization: None,
        roundtrip: None,
        q2_recover: None,
        psp_e_intersection: None,
        failures: 0,
    };
    if matches!(mode, AutMode::Search | AutMode::All) {
        let outcome = aut_search(g, deadline)?;
        cert.order_search = Some(outcome.order);
        let matches = BigUint::from(outcome.order) == order;
        cert.order_matches = Some(matches);
        cert.generators = Some(outcome.generators);
        if !matches {
            cert.failures += 1;
        }
    }
    if matches!(mode, AutMode::DecomposeRoundtrip | AutMode::All) {
        let report = roundtrip_suite(g, samples, seed)?;
        cert.failures += report.failures;
        cert.decompositions_checked = Some(report.samples);
        if q == 2 {
            cert.q2_recover = Some(format!("{}/{}", report.samples, report.samples));
        }
        cert.roundtrip = Some(report);
    }
    if mode == AutMode::All {
        let report = characterization_suite(g, samples, seed.wrapping_add(1))?;
        cert.failures += report.failures;
        cert.characterization = Some(report);
        match psp_e_intersection_count(g, MAX_CLOSURE) {
            Ok(intersection) => {
                if !intersection.matches {
                    cert.failures += 1;
                }
                cert.psp_e_intersection = Some(intersection);
            }
            // Too large to brute-force: leave the section out.
            Err(Error::SizeExceeded(_)) => {}
            Err(e) => return Err(e),
        }
    }
    Ok(cert)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::symplectic::SympClass;

    #[test]
    fn perm_utilities_roundtrip() {
        let p = vec![2u32, 0, 3, 1];
        let inv = inverse_perm(&p);
        assert_eq!(compose(&p, &inv), identity_perm(4));
        assert_eq!(compose(&inv, &p), identity_perm(4));
        // compose applies the inner permutation first.
        let q = vec![1u32, 2, 3, 0];
        assert_eq!(compose(&p, &q)[0], p[q[0] as usize]);
    }

    #[test]
    fn closure_of_a_transposition_and_cycle_is_symmetric() {
        let swap = vec![1u32, 0, 2];
        let cycle = vec![1u32, 2, 0];
        let set = group_closure(3, &[swap, cycle], 100).unwrap();
        assert_eq!(set.len(), 6);
        assert!(matches!(
            group_closure(3, &[vec![1, 2, 0]], 2),
            Err(Error::SizeExceeded(_))
        ));
    }

    #[test]
    fn order_formula_known_values() {
        let cases: [(usize, usize, u64); 8] = [
            (1, 2, 6),
            (1, 3, 24),
            (1, 4, 120),
            (1, 5, 720),
            (2, 2, 720),
            (2, 3, 51840),
            (2, 4, 1958400),
            (3, 2, 1451520),
        ];
        for (nu, q, order) in cases {
            assert_eq!(aut_order_formula(nu, q).unwrap(), BigUint::from(order));
        }
        assert!(matches!(aut_order_formula(2, 6), Err(Error::NonPrime(6))));
        assert!(matches!(aut_order_formula(0, 3), Err(Error::InvalidParameter(_))));
    }

    #[test]
    fn sp_orders_match_the_textbook_values() {
        assert_eq!(sp_order(1, 2), BigUint::from(6u32));
        assert_eq!(sp_order(1, 3), BigUint::from(24u32));
        assert_eq!(sp_order(2, 2), BigUint::from(720u32));
        assert_eq!(sp_order(2, 3), BigUint::from(51840u32));
        assert_eq!(sp_order(3, 2), BigUint::from(1451520u32));
    }

    #[test]
    fn search_orders_match_the_formula_on_small_graphs() {
        for (nu, q) in [(1, 2), (1, 3), (1, 4), (2, 2)] {
            let g = SympGraph::build(nu, q).unwrap();
            let outcome = aut_search(&g, None).unwrap();
            assert_eq!(
                BigUint::from(outcome.order),
                aut_order_formula(nu, q).unwrap(),
                "search disagrees with the formula for ({nu},{q})"
            );
        }
    }

    #[test]
    fn e_elements_fix_basis_and_form_a_group() {
        for (nu, q) in [(2, 3), (2, 4), (1, 4), (2, 5)] {
            let g = SympGraph::build(nu, q).unwrap();
            let f = g.field().clone();
            let elements = enumerate_e_elements(&f, nu);
            assert_eq!(elements.len(), (q - 1).pow(nu as u32) * f.m);
            let perms: Vec<Vec<u32>> =
                elements.iter().map(|e| e_element_apply(&g, e).unwrap().perm).collect();
            // Injectivity: distinct parameters give distinct permutations.
            let distinct: HashSet<&Vec<u32>> = perms.iter().collect();
            assert_eq!(distinct.len(), elements.len());
            // Homomorphism: parameter product matches permutation product.
            for (i, a) in elements.iter().enumerate() {
                for (j, b) in elements.iter().enumerate() {
                    let prod = e_group_mul(&f, a, b);
                    assert_eq!(e_sigma_perm(&g, &prod), compose(&perms[i], &perms[j]));
                }
            }
        }
    }

    #[test]
    fn e_identity_is_the_identity_permutation() {
        let g = SympGraph::build(2, 3).unwrap();
        assert_eq!(e_sigma_perm(&g, &EElement::identity(2)), identity_perm(g.n()));
    }

    #[test]
    fn gsp_matrices_act_and_others_do_not() {
        let g = SympGraph::build(2, 3).unwrap();
        let mut rng = ChaCha8Rng::seed_from_u64(19);
        for _ in 0..20 {
            let (t, k) = g.form().random_gsp(&mut rng);
            let elt = sigma_from_matrix(&g, &t).unwrap();
            match elt.tag {
                AutTag::FromMatrix { multiplier, .. } => assert_eq!(multiplier, k),
                _ => unreachable!(),
            }
        }
        let mut d = Matrix::identity(4);
        d.set(3, 3, 2);
        assert_eq!(g.form().gsp_class(&d), SympClass::NotGsp);
        assert!(matches!(sigma_from_matrix(&g, &d), Err(Error::NotAutomorphism)));
    }

    #[test]
    fn kernel_is_exactly_the_scalars() {
        let g = SympGraph::build(2, 5).unwrap();
        let f = g.field().clone();
        for c in 1..5 {
            let scalar = Matrix::identity(4).scale(c, &f);
            assert!(kernel_check(&g, &scalar).unwrap());
        }
        let mut rng = ChaCha8Rng::seed_from_u64(8);
        for _ in 0..20 {
            let (t, _) = g.form().random_gsp(&mut rng);
            let c = t.get(0, 0);
            let scalar = c != 0 && t == Matrix::identity(4).scale(c, &f);
            assert_eq!(kernel_check(&g, &t).unwrap(), scalar);
        }
    }

    #[test]
    fn vertex_transitivity_witnesses() {
        let g = SympGraph::build(2, 3).unwrap();
        let mut rng = ChaCha8Rng::seed_from_u64(77);
        for _ in 0..50 {
            let u = rng.gen_range(0..g.n());
            let v = rng.gen_range(0..g.n());
            let elt = transitivity_witness(&g, u, v).unwrap();
            assert_eq!(elt.perm[u] as usize, v);
            match elt.tag {
                AutTag::FromMatrix { multiplier, .. } => assert_eq!(multiplier, 1),
                _ => unreachable!(),
            }
        }
    }

    #[test]
    fn edge_transitivity_witnesses() {
        let g = SympGraph::build(2, 3).unwrap();
        let edges = g.edges();
        let mut rng = ChaCha8Rng::seed_from_u64(78);
        for _ in 0..25 {
            let e1 = edges[rng.gen_range(0..edges.len())];
            let e2 = edges[rng.gen_range(0..edges.len())];
            let elt = edge_transitivity_witness(&g, e1, e2).unwrap();
            assert_eq!(elt.perm[e1.0] as usize, e2.0);
            assert_eq!(elt.perm[e1.1] as usize, e2.1);
        }
        // Non-adjacent pairs are rejected: orthogonal vertices share no edge.
        let (u, v) = (0..g.n())
            .flat_map(|u| (0..g.n()).map(move |v| (u, v)))
            .find(|&(u, v)| u != v && !g.adjacent(u, v))
            .unwrap();
        assert!(matches!(
            edge_transitivity_witness(&g, (u, v), edges[0]),
            Err(Error::NotAnEdge { .. })
        ));
    }

    #[test]
    fn decompose_roundtrips_random_products() {
        for (nu, q) in [(2, 3), (2, 4), (1, 5), (2, 5), (1, 9)] {
            let g = SympGraph::build(nu, q).unwrap();
            let report = roundtrip_suite(&g, 25, 13).unwrap();
            assert_eq!(report.samples, 25);
            assert_eq!(report.failures, 0);
            if nu >= 2 {
                assert!(report.identities_checked > 0);
            }
        }
    }

    #[test]
    fn decompose_requires_odd_characteristic_or_larger_fields() {
        let g = SympGraph::build(2, 2).unwrap();
        let perm = identity_perm(g.n());
        assert!(matches!(decompose(&g, &perm), Err(Error::InvalidParameter(_))));
    }

    #[test]
    fn decompose_rejects_non_automorphisms() {
        let g = SympGraph::build(2, 3).unwrap();
        let mut perm = identity_perm(g.n());
        perm.swap(0, 1);
        if !g.is_automorphism(&perm) {
            assert!(matches!(decompose(&g, &perm), Err(Error::NotAutomorphism)));
        }
    }

    #[test]
    fn q2_recovery_roundtrips_and_rejects() {
        let g = SympGraph::build(2, 2).unwrap();
        let mut rng = ChaCha8Rng::seed_from_u64(3);
        for _ in 0..25 {
            let s = g.form().random_sp(&mut rng);
            let perm = g.matrix_vertex_map(&s).unwrap();
            let t = q2_matrix_recover(&g, &perm).unwrap();
            assert_eq!(g.matrix_vertex_map(&t).unwrap(), perm);
        }
        let g3 = SympGraph::build(2, 3).unwrap();
        assert!(matches!(
            q2_matrix_recover(&g3, &identity_perm(g3.n())),
            Err(Error::InvalidParameter(_))
        ));
    }

    #[test]
    fn nu_one_is_all_of_symmetric_group() {
        // Every permutation of the K₄ = Sp(2,3) vertex set decomposes.
        let g = SympGraph::build(1, 3).unwrap();
        let all = group_closure(4, &[vec![1, 0, 2, 3], vec![1, 2, 3, 0]], 30).unwrap();
        assert_eq!(all.len(), 24);
        for perm in &all {
            let d = decompose(&g, perm).unwrap();
            assert!(matches!(d, Decomposition::NuOne { .. }));
            assert_eq!(&recompose(&g, &d).unwrap(), perm);
        }
    }

    #[test]
    fn pi_family_check_rejects_corruption() {
        let g = SympGraph::build(2, 3).unwrap();
        let f = g.field().clone();
        let mut rng = ChaCha8Rng::seed_from_u64(5);
        let s = g.form().random_sp(&mut rng);
        let e = EElement { scalars: vec![2, 1], frob_exp: 0 };
        let perm = compose(&g.matrix_vertex_map(&s).unwrap(), &e_sigma_perm(&g, &e));
        let Decomposition::General { mut pi, .. } = decompose(&g, &perm).unwrap() else {
            panic!("nu = 2 decomposes generally");
        };
        assert!(pi_family_check(&f, &pi).is_ok());
        pi.maps[1][2] = f.add(pi.maps[1][2], 1);
        assert!(matches!(pi_family_check(&f, &pi), Err(Error::IdentityViolated { .. })));
    }

    #[test]
    fn psp_e_intersection_counts() {
        for (nu, q, expected) in [(1, 3, 1), (1, 5, 2), (2, 3, 2)] {
            let g = SympGraph::build(nu, q).unwrap();
            let result = psp_e_intersection_count(&g, 200_000).unwrap();
            assert_eq!(result.count, expected, "intersection for ({nu},{q})");
            assert_eq!(result.formula, expected);
            assert!(result.matches);
        }
    }

    #[test]
    fn characterization_suite_runs_clean() {
        for (nu, q) in [(2, 2), (2, 3), (1, 4)] {
            let g = SympGraph::build(nu, q).unwrap();
            let report = characterization_suite(&g, 10, 99).unwrap();
            assert_eq!(report.failures, 0);
            assert_eq!(report.gsp_preserve, 10);
            if nu >= 2 {
                assert_eq!(report.non_gsp_break, 10);
            }
        }
    }

    #[test]
    fn certificates_assemble_by_mode() {
        let g = SympGraph::build(2, 2).unwrap();
        let cert = aut_certificate(&g, AutMode::Formula, 5, 1, None).unwrap();
        assert_eq!(cert.order_formula, serde_json::json!(720));
        assert!(cert.order_search.is_none());
        assert!(cert.generators.is_none());

        let cert = aut_certificate(&g, AutMode::All, 5, 1, None).unwrap();
        assert_eq!(cert.order_search, Some(720));
        assert_eq!(cert.order_matches, Some(true));
        assert!(!cert.generators.unwrap().is_empty());
        assert_eq!(cert.decompositions_checked, Some(5));
        assert_eq!(cert.q2_recover.as_deref(), Some("5/5"));
        assert_eq!(cert.failures, 0);
        let intersection = cert.psp_e_intersection.unwrap();
        assert_eq!(intersection.count, 1);

        let g3 = SympGraph::build(2, 3).unwrap();
        let cert = aut_certificate(&g3, AutMode::DecomposeRoundtrip, 5, 1, None).unwrap();
        assert!(cert.roundtrip.is_some());
        assert!(cert.q2_recover.is_none());
        assert_eq!(cert.failures, 0);
    }

    #[test]
    fn mode_names_parse() {
        use std::str::FromStr;
        assert_eq!(AutMode::from_str("formula").unwrap(), AutMode::Formula);
        assert_eq!(AutMode::from_str("search").unwrap(), AutMode::Search);
        assert_eq!(
            AutMode::from_str("decompose-roundtrip").unwrap(),
            AutMode::DecomposeRoundtrip
        );
        assert_eq!(AutMode::from_str("all").unwrap(), AutMode::All);
        assert!(AutMode::from_str("everything").is_err());
    }
}
