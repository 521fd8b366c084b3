//! The symplectic graph: vertices are the 1-dimensional subspaces of
//! F_q^{2ν}, and two subspaces are adjacent when their representatives pair
//! nontrivially under the alternating form.
//!
//! Each subspace is stored as its canonical representative — the unique
//! scaling whose first nonzero coordinate is 1 — and vertices are numbered
//! in lexicographic order of those representatives. Adjacency lives in a
//! bitset matrix so that common-neighbor counts are word-AND popcounts.

use crate::error::{Error, Result};
use crate::gf::{Elt, FieldCtx};
use crate::symplectic::{vec_is_zero, vec_mat, vec_scale, vector_code, vector_from_code, FormCtx, Matrix};
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

/// Hard cap on the ambient vector space: enumeration walks all q^{2ν} codes.
const MAX_CODES: usize = 1 << 24;
/// Hard cap on the vertex count: adjacency is a dense n×n bitset.
const MAX_VERTICES: usize = 1 << 16;

/// Scales `v` so its first nonzero coordinate is 1; `None` for the zero
/// vector. Two vectors span the same line exactly when they canonicalize to
/// the same representative.
pub fn canonicalize(f: &FieldCtx, v: &[Elt]) -> Option<Vec<Elt>> {
    let first = v.iter().find(|&&c| c != 0)?;
    Some(vec_scale(f, v, f.inv(*first)))
}

pub struct SympGraph {
    form: FormCtx,
    /// Codes of the canonical representatives, ascending.
    verts: Vec<u32>,
    /// Dense inverse of `verts`, indexed by code; `u32::MAX` when the code
    /// is not a canonical representative.
    code_to_index: Vec<u32>,
    /// Bitset adjacency matrix, `words` u64 words per row.
    adj: Vec<Vec<u64>>,
    words: usize,
}

/// Enumerates the canonical representatives of all 1-dimensional subspaces,
/// in lexicographic (= code) order.
pub fn enumerate_vertices(form: &FormCtx) -> Result<Vec<u32>> {
    let f = form.field();
    let dim = form.dim();
    let total = f
        .q
        .checked_pow(dim as u32)
        .filter(|&t| t <= MAX_CODES)
        .ok_or_else(|| {
            Error::SizeExceeded(format!("q^(2nu) = {}^{dim} exceeds 2^24", f.q))
        })?;
    let verts: Vec<u32> = (1..total)
        .filter(|&code| {
            let v = vector_from_code(code, f.q, dim);
            v.iter().find(|&&c| c != 0) == Some(&1)
        })
        .map(|code| code as u32)
        .collect();
    let expected = (total - 1) / (f.q - 1);
    assert_eq!(verts.len(), expected, "projective point count formula");
    Ok(verts)
}

impl SympGraph {
    /// Builds the graph for the form context, checking size bounds and the
    /// degree formula on the way.
    pub fn from_form(form: FormCtx) -> Result<SympGraph> {
        let verts = enumerate_vertices(&form)?;
        let n = verts.len();
        if n > MAX_VERTICES {
            return Err(Error::SizeExceeded(format!(
                "{n} vertices exceeds the dense adjacency limit 2^16"
            )));
        }
        let f = form.field();
        let dim = form.dim();
        let total = f.q.pow(dim as u32);
        let mut code_to_index = vec![u32::MAX; total];
        for (i, &code) in verts.iter().enumerate() {
            code_to_index[code as usize] = i as u32;
        }
        let vectors: Vec<Vec<Elt>> = verts
            .iter()
            .map(|&code| vector_from_code(code as usize, f.q, dim))
            .collect();
        let words = n.div_ceil(64);
        let mut adj = vec![vec![0u64; words]; n];
        for u in 0..n {
            for v in u + 1..n {
                if form.form(&vectors[u], &vectors[v]) != 0 {
                    adj[u][v / 64] |= 1 << (v % 64);
                    adj[v][u / 64] |= 1 << (u % 64);
                }
            }
        }
        let g = SympGraph { form, verts, code_to_index, adj, words };
        let k = g.expected_params().1;
        for u in 0..n {
            assert_eq!(g.degree(u), k, "vertex {u} violates the degree formula");
        }
        Ok(g)
    }

    /// Convenience constructor from `(ν, q)`.
    pub fn build(nu: usize, q: usize) -> Result<SympGraph> {
        let (p, m) = crate::gf::factor_prime_power(q).ok_or(Error::NonPrime(q))?;
        let field = FieldCtx::build(p, m as usize)?;
        SympGraph::from_form(FormCtx::new(nu, field)?)
    }

    pub fn n(&self) -> usize {
        self.verts.len()
    }

    pub fn form(&self) -> &FormCtx {
        &self.form
    }

    pub fn field(&self) -> &FieldCtx {
        self.form.field()
    }

    /// The canonical representative of vertex `i`.
    pub fn vector_of(&self, i: usize) -> Vec<Elt> {
        vector_from_code(self.verts[i] as usize, self.field().q, self.form.dim())
    }

    /// The vertex spanned by an arbitrary nonzero vector.
    pub fn index_of_vector(&self, v: &[Elt]) -> Option<usize> {
        let canon = canonicalize(self.field(), v)?;
        let idx = self.code_to_index[vector_code(&canon, self.field().q)];
        (idx != u32::MAX).then_some(idx as usize)
    }

    pub fn adjacent(&self, u: usize, v: usize) -> bool {
        self.adj[u][v / 64] >> (v % 64) & 1 == 1
    }

    pub fn degree(&self, u: usize) -> usize {
        self.adj[u].iter().map(|w| w.count_ones() as usize).sum()
    }

    /// Number of common neighbors, by word-AND popcount.
    pub fn common_neighbors(&self, u: usize, v: usize) -> usize {
        self.adj[u]
            .iter()
            .zip(&self.adj[v])
            .map(|(a, b)| (a & b).count_ones() as usize)
            .sum()
    }

    pub fn adjacency_row(&self, u: usize) -> &[u64] {
        &self.adj[u]
    }

    pub fn words(&self) -> usize {
        self.words
    }

    /// Edge list with `u < v`, ascending.
    pub fn edges(&self) -> Vec<(usize, usize)> {
        let mut out = Vec::new();
        for u in 0..self.n() {
            for v in u + 1..self.n() {
                if self.adjacent(u, v) {
                    out.push((u, v));
                }
            }
        }
        out
    }

    /// The strong-regularity parameters this graph must satisfy:
    /// `(n, k, λ, μ)` as closed-form expressions in ν and q.
    pub fn expected_params(&self) -> (usize, usize, usize, usize) {
        let q = self.field().q;
        let nu = self.form.nu;
        let n = (q.pow(2 * nu as u32) - 1) / (q - 1);
        let k = q.pow(2 * nu as u32 - 1);
        let lam = q.pow(2 * nu as u32 - 2) * (q - 1);
        (n, k, lam, lam)
    }

    /// The vertex permutation induced by a nonsingular matrix acting on row
    /// vectors from the right: `[α] ↦ [α·T]`. `None` when some image
    /// collapses to zero (singular `T`) or the map fails to be a bijection.
    pub fn matrix_vertex_map(&self, t: &Matrix) -> Option<Vec<u32>> {
        let f = self.field();
        let mut image = vec![u32::MAX; self.n()];
        let mut seen = vec![false; self.n()];
        for i in 0..self.n() {
            let w = vec_mat(f, &self.vector_of(i), t);
            if vec_is_zero(&w) {
                return None;
            }
            let j = self.index_of_vector(&w).expect("nonzero vectors span vertices");
            if seen[j] {
                return None;
            }
            seen[j] = true;
            image[i] = j as u32;
        }
        Some(image)
    }

    /// First pair whose adjacency is not preserved by `perm`, if any.
    pub fn find_adjacency_violation(&self, perm: &[u32]) -> Option<(usize, usize)> {
        for u in 0..self.n() {
            for v in u + 1..self.n() {
                if self.adjacent(u, v)
                    != self.adjacent(perm[u] as usize, perm[v] as usize)
                {
                    return Some((u, v));
                }
            }
        }
        None
    }

    /// Whether `perm` is a bijection on vertices preserving adjacency.
    pub fn is_automorphism(&self, perm: &[u32]) -> bool {
        if perm.len() != self.n() {
            return false;
        }
        let mut seen = vec![false; self.n()];
        for &p in perm {
            if p as usize >= self.n() || seen[p as usize] {
                return false;
            }
            seen[p as usize] = true;
        }
        self.find_adjacency_violation(perm).is_none()
    }
}

// ---------------------------------------------------------------------------
// Strong regularity certificate
// ---------------------------------------------------------------------------

/// Outcome of the exact strong-regularity check. `eigenvalues` and
/// `multiplicities` are aligned: the spectrum is `eigenvalues[i]` with
/// multiplicity `multiplicities[i]`.
#[derive(Clone, Debug, Serialize, Deserialize)]
pub struct SrgCertificate {
    pub n: usize,
    pub k: usize,
    pub lambda: usize,
    pub mu: usize,
    pub eigenvalues: [i64; 3],
    pub multiplicities: [usize; 3],
    pub identity_verified: bool,
    pub failures: usize,
}

/// Verifies strong regularity exactly: every vertex has degree k, and every
/// pair of distinct vertices has λ (adjacent) or μ (non-adjacent) common
/// neighbors — equivalently, A² = kI + λA + μ(J − I − A) over the integers.
/// The spectrum follows from that identity; multiplicities come from the
/// trace conditions and are checked for exact divisibility.
pub fn certify_srg(g: &SympGraph) -> Result<SrgCertificate> {
    let (n, k, lambda, mu) = g.expected_params();
    assert_eq!(g.n(), n);
    for u in 0..n {
        let d = g.degree(u);
        if d != k {
            return Err(Error::NotSrg { u, v: u, found: d, expected: k });
        }
    }
    let violations: Vec<(usize, usize, usize, usize)> = (0..n)
        .into_par_iter()
        .flat_map_iter(|u| {
            (u + 1..n).filter_map(move |v| {
                let found = g.common_neighbors(u, v);
                let expected = if g.adjacent(u, v) { lambda } else { mu };
                (found != expected).then_some((u, v, found, expected))
            })
        })
        .collect();
    if let Some(&(u, v, found, expected)) = violations.iter().min() {
        return Err(Error::NotSrg { u, v, found, expected });
    }

    let q = g.field().q;
    let nu = g.form().nu;
    let half = q.pow(nu as u32 - 1);
    // Trace conditions: f + g = n - 1 and k + (f - g)·q^{ν-1} = 0.
    assert_eq!(k % half, 0);
    let diff = k / half; // g - f = q^ν
    assert_eq!(diff, q.pow(nu as u32));
    assert_eq!((n - 1 - diff) % 2, 0, "multiplicities must be integers");
    let f_mult = (n - 1 - diff) / 2;
    let g_mult = n - 1 - f_mult;
    Ok(SrgCertificate {
        n,
        k,
        lambda,
        mu,
        eigenvalues: [k as i64, half as i64, -(half as i64)],
        multiplicities: [1, f_mult, g_mult],
        identity_verified: true,
        failures: 0,
    })
}

// ---------------------------------------------------------------------------
// Export formats
// ---------------------------------------------------------------------------

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum ExportFormat {
    Graph6,
    Dimacs,
    EdgeJson,
}

impl std::str::FromStr for ExportFormat {
    type Err = Error;

    fn from_str(s: &str) -> Result<ExportFormat> {
        match s {
            "graph6" => Ok(ExportFormat::Graph6),
            "dimacs" => Ok(ExportFormat::Dimacs),
            "json" | "edgelist-json" => Ok(ExportFormat::EdgeJson),
            other => Err(Error::FormatUnsupported(other.to_string())),
        }
    }
}

fn graph6_size_header(n: usize, out: &mut Vec<u8>) {
    if n <= 62 {
        out.push(n as u8 + 63);
    } else if n <= 258047 {
        out.push(126);
        out.push(((n >> 12) & 63) as u8 + 63);
        out.push(((n >> 6) & 63) as u8 + 63);
        out.push((n & 63) as u8 + 63);
    } else {
        out.push(126);
        out.push(126);
        for shift in (0..36).step_by(6).rev() {
            out.push(((n >> shift) & 63) as u8 + 63);
        }
    }
}

/// Serializes the graph. Every format ends with a single trailing newline.
pub fn export(g: &SympGraph, format: ExportFormat) -> String {
    match format {
        ExportFormat::Graph6 => {
            let n = g.n();
            let mut bytes = Vec::new();
            graph6_size_header(n, &mut bytes);
            // Upper triangle, column by column: (0,1), (0,2), (1,2), …
            let mut bit = 0u8;
            let mut filled = 0;
            for v in 1..n {
                for u in 0..v {
                    bit = (bit << 1) | u8::from(g.adjacent(u, v));
                    filled += 1;
                    if filled == 6 {
                        bytes.push(bit + 63);
                        bit = 0;
                        filled = 0;
                    }
                }
            }
            if filled > 0 {
                bytes.push((bit << (6 - filled)) + 63);
            }
            let mut s = String::from_utf8(bytes).unwrap();
            s.push('\n');
            s
        }
        ExportFormat::Dimacs => {
            let edges = g.edges();
            let mut s = format!("p edge {} {}\n", g.n(), edges.len());
            for (u, v) in edges {
                s.push_str(&format!("e {} {}\n", u + 1, v + 1));
            }
            s
        }
        ExportFormat::EdgeJson => {
            let edges: Vec<[usize; 2]> = g.edges().iter().map(|&(u, v)| [u, v]).collect();
            let value = serde_json::json!({ "n": g.n(), "edges": edges });
            let mut s = serde_json::to_string(&value).unwrap();
            s.push('\n');
            s
        }
    }
}

/// Parses a graph6 string back into `(n, edges)`; used to round-trip the
/// encoder.
pub fn graph6_decode(s: &str) -> Result<(usize, Vec<(usize, usize)>)> {
    let bytes: Vec<u8> = s.trim_end().bytes().collect();
    let bad = |msg: &str| Error::DecodeError(format!("graph6: {msg}"));
    let decode_size = |range: std::ops::Range<usize>| {
        bytes
            .get(range)
            .ok_or_else(|| bad("truncated size"))?
            .iter()
            .try_fold(0usize, |acc, &b| {
                (63..=126).contains(&b).then(|| (acc << 6) | (b - 63) as usize)
            })
            .ok_or_else(|| bad("size byte out of range"))
    };
    let (n, pos) = if bytes.first() == Some(&126) {
        if bytes.get(1) == Some(&126) {
            (decode_size(2..8)?, 8)
        } else {
            (decode_size(1..4)?, 4)
        }
    } else {
        let b = *bytes.first().ok_or_else(|| bad("empty input"))?;
        if !(63..=125).contains(&b) {
            return Err(bad("size byte out of range"));
        }
        ((b - 63) as usize, 1)
    };
    let nbits = n.saturating_sub(1) * n / 2;
    let body = &bytes[pos..];
    if body.len() != nbits.div_ceil(6) {
        return Err(bad("body length does not match vertex count"));
    }
    let mut edges = Vec::new();
    let mut idx = 0;
    'outer: for v in 1..n {
        for u in 0..v {
            let byte = body[idx / 6];
            if !(63..=126).contains(&byte) {
                return Err(bad("body byte out of range"));
            }
            if (byte - 63) >> (5 - idx % 6) & 1 == 1 {
                edges.push((u, v));
            }
            idx += 1;
            if idx == nbits {
                break 'outer;
            }
        }
    }
    edges.sort_unstable();
    Ok((n, edges))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::symplectic::SympClass;
    use rand::{Rng, SeedableRng};
    use rand_chacha::ChaCha8Rng;

    #[test]
    fn vertex_counts_match_the_projective_formula() {
        for (nu, q, n) in [(1, 2, 3), (1, 3, 4), (1, 4, 5), (2, 2, 15), (2, 3, 40), (2, 4, 85), (3, 2, 63)] {
            let g = SympGraph::build(nu, q).unwrap();
            assert_eq!(g.n(), n);
        }
    }

    #[test]
    fn rejects_bad_parameters() {
        assert!(matches!(SympGraph::build(2, 6), Err(Error::NonPrime(6))));
        assert!(matches!(SympGraph::build(0, 3), Err(Error::InvalidParameter(_))));
        assert!(matches!(SympGraph::build(13, 3), Err(Error::SizeExceeded(_))));
    }

    #[test]
    fn small_binary_case_is_the_triangle() {
        let g = SympGraph::build(1, 2).unwrap();
        assert_eq!(g.n(), 3);
        for u in 0..3 {
            for v in 0..3 {
                assert_eq!(g.adjacent(u, v), u != v);
            }
        }
        assert_eq!(export(&g, ExportFormat::Graph6), "Bw\n");
    }

    #[test]
    fn adjacency_is_symmetric_and_irreflexive() {
        let g = SympGraph::build(2, 3).unwrap();
        for u in 0..g.n() {
            assert!(!g.adjacent(u, u));
            for v in 0..g.n() {
                assert_eq!(g.adjacent(u, v), g.adjacent(v, u));
            }
        }
    }

    #[test]
    fn index_lookup_ignores_scaling() {
        let g = SympGraph::build(2, 5).unwrap();
        let f = g.field().clone();
        let mut rng = ChaCha8Rng::seed_from_u64(11);
        for _ in 0..200 {
            let i = rng.gen_range(0..g.n());
            let v = g.vector_of(i);
            let c = rng.gen_range(1..f.q);
            assert_eq!(g.index_of_vector(&vec_scale(&f, &v, c)), Some(i));
        }
        assert_eq!(g.index_of_vector(&[0, 0, 0, 0]), None);
    }

    #[test]
    fn vertices_are_sorted_canonical_representatives() {
        let g = SympGraph::build(2, 3).unwrap();
        let mut prev_code = 0;
        for i in 0..g.n() {
            let v = g.vector_of(i);
            assert_eq!(v.iter().find(|&&c| c != 0), Some(&1));
            let code = vector_code(&v, 3);
            assert!(code > prev_code || i == 0);
            prev_code = code;
        }
    }

    #[test]
    fn srg_certificates_match_known_parameters() {
        // (ν, q) → (n, k, λ=μ, f, g)
        let cases = [
            (1, 2, 3, 2, 1, 0, 2),
            (1, 3, 4, 3, 2, 0, 3),
            (1, 4, 5, 4, 3, 0, 4),
            (1, 5, 6, 5, 4, 0, 5),
            (2, 2, 15, 8, 4, 5, 9),
            (2, 3, 40, 27, 18, 15, 24),
            (2, 4, 85, 64, 48, 34, 50),
            (3, 2, 63, 32, 16, 27, 35),
        ];
        for (nu, q, n, k, lam, f_mult, g_mult) in cases {
            let g = SympGraph::build(nu, q).unwrap();
            let cert = certify_srg(&g).unwrap();
            assert_eq!((cert.n, cert.k, cert.lambda, cert.mu), (n, k, lam, lam));
            assert_eq!(cert.multiplicities, [1, f_mult, g_mult]);
            assert_eq!(cert.eigenvalues[0], k as i64);
            assert_eq!(cert.eigenvalues[1], -cert.eigenvalues[2]);
            assert_eq!(cert.multiplicities.iter().sum::<usize>(), n);
            assert!(cert.identity_verified);
            assert_eq!(cert.failures, 0);
        }
    }

    /// Independent spectral cross-check: Σ multiplicity·eigenvalue = trace(A)
    /// = 0 and Σ multiplicity·eigenvalue² = trace(A²) = n·k.
    #[test]
    fn certificate_spectrum_satisfies_trace_identities() {
        for (nu, q) in [(1, 5), (2, 2), (2, 3), (2, 4), (3, 2)] {
            let g = SympGraph::build(nu, q).unwrap();
            let cert = certify_srg(&g).unwrap();
            let trace: i64 = cert
                .eigenvalues
                .iter()
                .zip(&cert.multiplicities)
                .map(|(&e, &m)| e * m as i64)
                .sum();
            let trace_sq: i64 = cert
                .eigenvalues
                .iter()
                .zip(&cert.multiplicities)
                .map(|(&e, &m)| e * e * m as i64)
                .sum();
            assert_eq!(trace, 0);
            assert_eq!(trace_sq, (cert.n * cert.k) as i64);
        }
    }

    #[test]
    fn symplectic_matrices_induce_automorphisms() {
        let g = SympGraph::build(2, 3).unwrap();
        let mut rng = ChaCha8Rng::seed_from_u64(4);
        let id = g.matrix_vertex_map(&Matrix::identity(4)).unwrap();
        assert_eq!(id, (0..g.n() as u32).collect::<Vec<_>>());
        for _ in 0..20 {
            let t = g.form().random_sp(&mut rng);
            let perm = g.matrix_vertex_map(&t).unwrap();
            assert!(g.is_automorphism(&perm));
        }
    }

    #[test]
    fn non_form_preserving_matrices_break_adjacency() {
        let g = SympGraph::build(2, 3).unwrap();
        // diag(1,1,1,2) is nonsingular but scales only the second block.
        let mut d = Matrix::identity(4);
        d.set(3, 3, 2);
        assert_eq!(g.form().gsp_class(&d), SympClass::NotGsp);
        let perm = g.matrix_vertex_map(&d).unwrap();
        assert!(g.find_adjacency_violation(&perm).is_some());
        assert!(!g.is_automorphism(&perm));
    }

    #[test]
    fn graph6_roundtrips_including_long_headers() {
        // n = 63 exercises the multi-byte size header.
        for (nu, q) in [(1, 3), (2, 2), (2, 3), (3, 2), (2, 4)] {
            let g = SympGraph::build(nu, q).unwrap();
            let enc = export(&g, ExportFormat::Graph6);
            let (n, edges) = graph6_decode(&enc).unwrap();
            assert_eq!(n, g.n());
            assert_eq!(edges, g.edges());
        }
    }

    #[test]
    fn graph6_decoder_rejects_corrupt_input() {
        assert!(matches!(graph6_decode(""), Err(Error::DecodeError(_))));
        assert!(matches!(graph6_decode("B"), Err(Error::DecodeError(_))));
        assert!(matches!(graph6_decode("Bw~"), Err(Error::DecodeError(_))));
        assert!(matches!(graph6_decode("\x1fww"), Err(Error::DecodeError(_))));
    }

    #[test]
    fn dimacs_and_json_exports_are_well_formed() {
        let g = SympGraph::build(1, 3).unwrap();
        let dimacs = export(&g, ExportFormat::Dimacs);
        let mut lines = dimacs.lines();
        assert_eq!(lines.next(), Some("p edge 4 6"));
        assert_eq!(lines.next(), Some("e 1 2"));
        assert_eq!(dimacs.lines().count(), 7);
        assert!(dimacs.ends_with('\n'));

        let json = export(&g, ExportFormat::EdgeJson);
        let value: serde_json::Value = serde_json::from_str(&json).unwrap();
        assert_eq!(value["n"], 4);
        assert_eq!(value["edges"].as_array().unwrap().len(), 6);
        assert!(json.ends_with('\n'));
    }

    #[test]
    fn format_names_parse() {
        use std::str::FromStr;
        assert_eq!(ExportFormat::from_str("graph6").unwrap(), ExportFormat::Graph6);
        assert_eq!(ExportFormat::from_str("dimacs").unwrap(), ExportFormat::Dimacs);
        assert_eq!(ExportFormat::from_str("json").unwrap(), ExportFormat::EdgeJson);
        assert_eq!(
            ExportFormat::from_str("edgelist-json").unwrap(),
            ExportFormat::EdgeJson
        );
        assert!(matches!(ExportFormat::from_str("gml"), Err(Error::FormatUnsupported(_))));
        assert!(matches!(ExportFormat::from_str(""), Err(Error::FormatUnsupported(_))));
    }

    #[test]
    fn common_neighbor_counts_agree_with_a_direct_scan() {
        let g = SympGraph::build(2, 2).unwrap();
        for u in 0..g.n() {
            for v in 0..g.n() {
                if u == v {
                    continue;
                }
                let direct = (0..g.n())
                    .filter(|&w| g.adjacent(u, w) && g.adjacent(v, w))
                    .count();
                assert_eq!(g.common_neighbors(u, v), direct);
            }
        }
    }
}
