//! The standard alternating form on F_q^{2ν}, exact linear algebra over the
//! field, and completion of partial data to symplectic bases.
//!
//! Vectors are row vectors (`Vec<Elt>` of length 2ν) and matrices act on the
//! right: the image of `v` under `T` is `v·T`. The Gram matrix of the
//! standard form is block diagonal with ν blocks `[[0, 1], [-1, 0]]`, so the
//! standard basis comes in hyperbolic pairs `(e_i, f_i)` occupying rows
//! `2i, 2i+1`.

use crate::error::{Error, Result};
use crate::gf::{Elt, FieldCtx};
use rand::Rng;

// ---------------------------------------------------------------------------
// Vector helpers
// ---------------------------------------------------------------------------

/// Big-endian index of a coordinate vector: enumerating codes `0..q^len` in
/// order walks the vectors lexicographically.
pub fn vector_code(v: &[Elt], q: usize) -> usize {
    v.iter().fold(0, |acc, &c| acc * q + c)
}

/// Inverse of [`vector_code`].
pub fn vector_from_code(code: usize, q: usize, len: usize) -> Vec<Elt> {
    let mut v = vec![0; len];
    let mut rest = code;
    for slot in v.iter_mut().rev() {
        *slot = rest % q;
        rest /= q;
    }
    debug_assert_eq!(rest, 0);
    v
}

pub fn vec_is_zero(v: &[Elt]) -> bool {
    v.iter().all(|&c| c == 0)
}

pub fn vec_scale(f: &FieldCtx, v: &[Elt], c: Elt) -> Vec<Elt> {
    v.iter().map(|&x| f.mul(x, c)).collect()
}

/// `target += c · src`, in place.
pub fn vec_add_scaled(f: &FieldCtx, target: &mut [Elt], src: &[Elt], c: Elt) {
    for (t, &s) in target.iter_mut().zip(src) {
        *t = f.add(*t, f.mul(c, s));
    }
}

/// Row vector times matrix.
pub fn vec_mat(f: &FieldCtx, v: &[Elt], m: &Matrix) -> Vec<Elt> {
    assert_eq!(v.len(), m.dim);
    let mut out = vec![0; m.dim];
    for (i, &vi) in v.iter().enumerate() {
        if vi != 0 {
            vec_add_scaled(f, &mut out, m.row(i), vi);
        }
    }
    out
}

// ---------------------------------------------------------------------------
// Row reduction
// ---------------------------------------------------------------------------

/// In-place reduced row echelon form with leftmost-pivot, least-row
/// tie-breaking. Zero rows are dropped; returns the pivot columns.
pub fn row_reduce(f: &FieldCtx, rows: &mut Vec<Vec<Elt>>) -> Vec<usize> {
    let width = rows.first().map_or(0, |r| r.len());
    let mut pivots = Vec::new();
    let mut rank = 0;
    for col in 0..width {
        let Some(pivot_row) = (rank..rows.len()).find(|&r| rows[r][col] != 0) else {
            continue;
        };
        rows.swap(rank, pivot_row);
        let inv = f.inv(rows[rank][col]);
        rows[rank] = vec_scale(f, &rows[rank], inv);
        for r in 0..rows.len() {
            if r != rank && rows[r][col] != 0 {
                let c = f.neg(rows[r][col]);
                let pivot = rows[rank].clone();
                vec_add_scaled(f, &mut rows[r], &pivot, c);
            }
        }
        pivots.push(col);
        rank += 1;
        if rank == rows.len() {
            break;
        }
    }
    rows.truncate(rank);
    pivots
}

pub fn rank(f: &FieldCtx, rows: &[Vec<Elt>]) -> usize {
    let mut copy = rows.to_vec();
    row_reduce(f, &mut copy);
    copy.len()
}

/// Whether `v` lies in the row space of an already-reduced basis.
pub fn span_contains(f: &FieldCtx, basis: &[Vec<Elt>], pivots: &[usize], v: &[Elt]) -> bool {
    let mut r = v.to_vec();
    for (row, &col) in basis.iter().zip(pivots) {
        if r[col] != 0 {
            let c = f.neg(r[col]);
            vec_add_scaled(f, &mut r, row, c);
        }
    }
    vec_is_zero(&r)
}

/// Row-reduced basis of the right null space `{x : rows · xᵗ = 0}` of a
/// matrix given by its rows, each of length `width`.
pub fn nullspace(f: &FieldCtx, rows: &[Vec<Elt>], width: usize) -> Vec<Vec<Elt>> {
    let mut reduced = rows.to_vec();
    let pivots = row_reduce(f, &mut reduced);
    let pivot_set: std::collections::BTreeSet<usize> = pivots.iter().copied().collect();
    let mut basis = Vec::new();
    for free in (0..width).filter(|c| !pivot_set.contains(c)) {
        let mut v = vec![0; width];
        v[free] = 1;
        for (row, &p) in reduced.iter().zip(&pivots) {
            v[p] = f.neg(row[free]);
        }
        basis.push(v);
    }
    row_reduce(f, &mut basis);
    basis
}

// ---------------------------------------------------------------------------
// Matrices
// ---------------------------------------------------------------------------

/// A square matrix over the field, row major.
#[derive(Clone, PartialEq, Eq, Hash)]
pub struct Matrix {
    pub dim: usize,
    data: Vec<Elt>,
}

impl std::fmt::Debug for Matrix {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        writeln!(f, "Matrix {}x{} [", self.dim, self.dim)?;
        for i in 0..self.dim {
            writeln!(f, "  {:?}", self.row(i))?;
        }
        write!(f, "]")
    }
}

impl Matrix {
    pub fn zero(dim: usize) -> Matrix {
        Matrix { dim, data: vec![0; dim * dim] }
    }

    pub fn identity(dim: usize) -> Matrix {
        let mut m = Matrix::zero(dim);
        for i in 0..dim {
            m.set(i, i, 1);
        }
        m
    }

    pub fn from_rows(rows: &[Vec<Elt>]) -> Matrix {
        let dim = rows.len();
        let mut m = Matrix::zero(dim);
        for (i, row) in rows.iter().enumerate() {
            assert_eq!(row.len(), dim, "matrix rows must be square");
            m.data[i * dim..(i + 1) * dim].copy_from_slice(row);
        }
        m
    }

    pub fn get(&self, i: usize, j: usize) -> Elt {
        self.data[i * self.dim + j]
    }

    pub fn set(&mut self, i: usize, j: usize, v: Elt) {
        self.data[i * self.dim + j] = v;
    }

    pub fn row(&self, i: usize) -> &[Elt] {
        &self.data[i * self.dim..(i + 1) * self.dim]
    }

    pub fn rows(&self) -> impl Iterator<Item = &[Elt]> {
        (0..self.dim).map(move |i| self.row(i))
    }

    pub fn mul(&self, rhs: &Matrix, f: &FieldCtx) -> Matrix {
        assert_eq!(self.dim, rhs.dim);
        let n = self.dim;
        let mut out = Matrix::zero(n);
        for i in 0..n {
            for k in 0..n {
                let a = self.get(i, k);
                if a == 0 {
                    continue;
                }
                for j in 0..n {
                    let add = f.mul(a, rhs.get(k, j));
                    out.set(i, j, f.add(out.get(i, j), add));
                }
            }
        }
        out
    }

    pub fn transpose(&self) -> Matrix {
        let mut out = Matrix::zero(self.dim);
        for i in 0..self.dim {
            for j in 0..self.dim {
                out.set(j, i, self.get(i, j));
            }
        }
        out
    }

    pub fn scale(&self, c: Elt, f: &FieldCtx) -> Matrix {
        let mut out = self.clone();
        for x in out.data.iter_mut() {
            *x = f.mul(*x, c);
        }
        out
    }

    /// Gauss–Jordan inverse; `None` when singular.
    pub fn inverse(&self, f: &FieldCtx) -> Option<Matrix> {
        let n = self.dim;
        let mut aug: Vec<Vec<Elt>> = (0..n)
            .map(|i| {
                let mut row = self.row(i).to_vec();
                row.extend((0..n).map(|j| usize::from(i == j)));
                row
            })
            .collect();
        let pivots = row_reduce(f, &mut aug);
        if pivots.len() != n || pivots.iter().enumerate().any(|(i, &p)| p != i) {
            return None;
        }
        Some(Matrix::from_rows(
            &aug.iter().map(|r| r[n..].to_vec()).collect::<Vec<_>>(),
        ))
    }

    pub fn is_nonsingular(&self, f: &FieldCtx) -> bool {
        rank(f, &self.rows().map(<[Elt]>::to_vec).collect::<Vec<_>>()) == self.dim
    }
}

// ---------------------------------------------------------------------------
// The form context
// ---------------------------------------------------------------------------

/// How a matrix sits relative to the form: not form-preserving at all,
/// preserving it up to the scalar `k ≠ 1`, or exactly (`Sp`).
#[derive(Clone, Debug, PartialEq, Eq)]
pub enum SympClass {
    NotGsp,
    Gsp(Elt),
    Sp,
}

impl SympClass {
    /// The form multiplier, if the matrix preserves the form up to a scalar.
    pub fn multiplier(&self) -> Option<Elt> {
        match self {
            SympClass::NotGsp => None,
            SympClass::Gsp(k) => Some(*k),
            SympClass::Sp => Some(1),
        }
    }
}

/// Partial data for basis completion: either both members of a hyperbolic
/// pair or just its first vector. Assignments fill the standard-basis slots
/// `(e_1, f_1), (e_2, f_2), …` in the order given.
#[derive(Clone, Debug)]
pub enum SlotAssignment {
    Single(Vec<Elt>),
    Pair(Vec<Elt>, Vec<Elt>),
}

/// The standard alternating form on F_q^{2ν}.
pub struct FormCtx {
    pub nu: usize,
    field: FieldCtx,
    k: Matrix,
}

impl FormCtx {
    pub fn new(nu: usize, field: FieldCtx) -> Result<FormCtx> {
        if nu == 0 {
            return Err(Error::InvalidParameter("nu must be ≥ 1".into()));
        }
        let k = Self::standard_gram(nu, &field);
        Ok(FormCtx { nu, field, k })
    }

    /// The block-diagonal Gram matrix with ν blocks `[[0, 1], [-1, 0]]`.
    pub fn standard_gram(nu: usize, f: &FieldCtx) -> Matrix {
        let mut k = Matrix::zero(2 * nu);
        for i in 0..nu {
            k.set(2 * i, 2 * i + 1, 1);
            k.set(2 * i + 1, 2 * i, f.neg(1));
        }
        k
    }

    pub fn field(&self) -> &FieldCtx {
        &self.field
    }

    pub fn dim(&self) -> usize {
        2 * self.nu
    }

    pub fn gram(&self) -> &Matrix {
        &self.k
    }

    /// `form(a, b) = a · K · bᵗ`, evaluated blockwise.
    pub fn form(&self, a: &[Elt], b: &[Elt]) -> Elt {
        assert_eq!(a.len(), self.dim(), "left vector has wrong dimension");
        assert_eq!(b.len(), self.dim(), "right vector has wrong dimension");
        let f = &self.field;
        let mut acc = 0;
        for i in 0..self.nu {
            let pos = f.mul(a[2 * i], b[2 * i + 1]);
            let neg = f.mul(a[2 * i + 1], b[2 * i]);
            acc = f.add(acc, f.sub(pos, neg));
        }
        acc
    }

    /// Row-reduced basis of the orthogonal complement of the span of
    /// `vectors`.
    pub fn perp(&self, vectors: &[Vec<Elt>]) -> Vec<Vec<Elt>> {
        let rows: Vec<Vec<Elt>> = vectors
            .iter()
            .map(|v| {
                assert_eq!(v.len(), self.dim());
                vec_mat(&self.field, v, &self.k)
            })
            .collect();
        nullspace(&self.field, &rows, self.dim())
    }

    /// Whether the span of `basis` pairs to zero with itself. When it does,
    /// its dimension cannot exceed ν, and this is asserted.
    pub fn is_totally_isotropic(&self, basis: &[Vec<Elt>]) -> bool {
        for (i, a) in basis.iter().enumerate() {
            for b in &basis[i..] {
                if self.form(a, b) != 0 {
                    return false;
                }
            }
        }
        assert!(
            rank(&self.field, basis) <= self.nu,
            "an isotropic subspace cannot exceed dimension nu"
        );
        true
    }

    /// Classifies `t` by whether `t·K·tᵗ` equals `k·K` for some nonzero `k`.
    pub fn gsp_class(&self, t: &Matrix) -> SympClass {
        assert_eq!(t.dim, self.dim());
        let m = t.mul(&self.k, &self.field).mul(&t.transpose(), &self.field);
        let k = m.get(0, 1);
        if k == 0 {
            return SympClass::NotGsp;
        }
        if m == self.k.scale(k, &self.field) {
            if k == 1 {
                SympClass::Sp
            } else {
                SympClass::Gsp(k)
            }
        } else {
            SympClass::NotGsp
        }
    }

    /// Completes partial hyperbolic data to a full symplectic matrix: row
    /// `2i` of the result is the vector assigned to `e_{i+1}`, row `2i+1`
    /// the one assigned to `f_{i+1}`, with all unassigned rows filled in by
    /// deterministic symplectic Gram–Schmidt.
    pub fn complete_hyperbolic(&self, partial: &[SlotAssignment]) -> Result<Matrix> {
        let rows =
            hyperbolic_basis_for_form(&self.field, self.dim(), &|a, b| self.form(a, b), partial)?;
        let t = Matrix::from_rows(&rows);
        debug_assert_eq!(self.gsp_class(&t), SympClass::Sp);
        Ok(t)
    }

    /// The symplectic transvection `x ↦ x + c·form(x, v)·v`.
    pub fn transvection(&self, v: &[Elt], c: Elt) -> Matrix {
        assert_eq!(v.len(), self.dim());
        let f = &self.field;
        let kv: Vec<Elt> = (0..self.dim())
            .map(|i| {
                let mut acc = 0;
                for j in 0..self.dim() {
                    acc = f.add(acc, f.mul(self.k.get(i, j), v[j]));
                }
                acc
            })
            .collect();
        let mut t = Matrix::identity(self.dim());
        for i in 0..self.dim() {
            for j in 0..self.dim() {
                let add = f.mul(f.mul(c, kv[i]), v[j]);
                t.set(i, j, f.add(t.get(i, j), add));
            }
        }
        t
    }

    /// The diagonal matrix with blocks `[[k, 0], [0, 1]]`, which scales the
    /// form by exactly `k`.
    pub fn multiplier_matrix(&self, k: Elt) -> Matrix {
        assert!(k != 0 && k < self.field.q);
        let mut d = Matrix::identity(self.dim());
        for i in 0..self.nu {
            d.set(2 * i, 2 * i, k);
        }
        d
    }

    /// A random element of GSp(2ν, q): a random symplectic matrix times a
    /// random multiplier matrix.
    pub fn random_gsp<R: Rng>(&self, rng: &mut R) -> (Matrix, Elt) {
        let k = rng.gen_range(1..self.field.q);
        let t = self.random_sp(rng).mul(&self.multiplier_matrix(k), &self.field);
        (t, k)
    }

    /// Uniformly random nonsingular matrix, by rejection.
    pub fn random_nonsingular<R: Rng>(&self, rng: &mut R) -> Matrix {
        let n = self.dim();
        loop {
            let rows: Vec<Vec<Elt>> = (0..n)
                .map(|_| (0..n).map(|_| rng.gen_range(0..self.field.q)).collect())
                .collect();
            let m = Matrix::from_rows(&rows);
            if m.is_nonsingular(&self.field) {
                return m;
            }
        }
    }

    /// A random element of Sp(2ν, q), as a product of random transvections.
    pub fn random_sp<R: Rng>(&self, rng: &mut R) -> Matrix {
        let mut t = Matrix::identity(self.dim());
        for _ in 0..8 {
            let v: Vec<Elt> = loop {
                let v: Vec<Elt> =
                    (0..self.dim()).map(|_| rng.gen_range(0..self.field.q)).collect();
                if !vec_is_zero(&v) {
                    break v;
                }
            };
            let c = rng.gen_range(1..self.field.q);
            t = t.mul(&self.transvection(&v, c), &self.field);
        }
        t
    }
}

/// The Gram value required between standard-basis slots `a` and `b`:
/// `1` for `(e_i, f_i)`, `-1` for `(f_i, e_i)`, `0` otherwise.
fn required_pairing(f: &FieldCtx, a: usize, b: usize) -> Elt {
    if a / 2 == b / 2 {
        if b == a + 1 {
            1
        } else if a == b + 1 {
            f.neg(1)
        } else {
            0
        }
    } else {
        0
    }
}

/// Core completion routine, generic over the (alternating, nondegenerate)
/// form so that non-standard Gram matrices can be brought to hyperbolic
/// shape with the same code. Returns `dim` rows whose pairwise pairings
/// reproduce the standard Gram matrix.
///
/// Unassigned slots are filled deterministically: an `e`-slot takes the
/// lexicographically least vector that pairs to zero with everything chosen
/// so far and is independent of it; an `f`-slot takes the least vector
/// pairing nontrivially with its partner, scaled to pairing 1 and corrected
/// against the earlier hyperbolic pairs.
pub fn hyperbolic_basis_for_form(
    f: &FieldCtx,
    dim: usize,
    form: &dyn Fn(&[Elt], &[Elt]) -> Elt,
    partial: &[SlotAssignment],
) -> Result<Vec<Vec<Elt>>> {
    if dim == 0 || dim % 2 != 0 {
        return Err(Error::InvalidParameter("dimension must be even and positive".into()));
    }
    let nu = dim / 2;
    if partial.len() > nu {
        return Err(Error::GramMismatch(format!(
            "{} assignments but only {nu} hyperbolic pairs",
            partial.len()
        )));
    }

    let mut rows: Vec<Option<Vec<Elt>>> = vec![None; dim];
    for (block, assignment) in partial.iter().enumerate() {
        let mut place = |slot: usize, v: &Vec<Elt>| -> Result<()> {
            if v.len() != dim {
                return Err(Error::DimensionMismatch { expected: dim, found: v.len() });
            }
            if vec_is_zero(v) {
                return Err(Error::GramMismatch("assigned vector is zero".into()));
            }
            rows[slot] = Some(v.clone());
            Ok(())
        };
        match assignment {
            SlotAssignment::Single(u) => place(2 * block, u)?,
            SlotAssignment::Pair(u, v) => {
                place(2 * block, u)?;
                place(2 * block + 1, v)?;
            }
        }
    }

    // The assigned family must reproduce the Gram relations of the slots it
    // occupies and must be linearly independent.
    let assigned: Vec<(usize, Vec<Elt>)> = rows
        .iter()
        .enumerate()
        .filter_map(|(s, r)| r.clone().map(|v| (s, v)))
        .collect();
    for (i, (sa, va)) in assigned.iter().enumerate() {
        for (sb, vb) in &assigned[i + 1..] {
            let found = form(va, vb);
            let want = required_pairing(f, *sa, *sb);
            if found != want {
                return Err(Error::GramMismatch(format!(
                    "slots {sa},{sb} pair to {found}, required {want}"
                )));
            }
        }
    }
    let assigned_vecs: Vec<Vec<Elt>> = assigned.iter().map(|(_, v)| v.clone()).collect();
    if rank(f, &assigned_vecs) != assigned_vecs.len() {
        return Err(Error::GramMismatch("assigned vectors are linearly dependent".into()));
    }

    let total = f
        .q
        .checked_pow(dim as u32)
        .filter(|&t| t <= (1 << 24))
        .ok_or_else(|| Error::SizeExceeded("completion space exceeds 2^24 vectors".into()))?;

    // Reduced span of everything chosen so far, for independence tests.
    let mut reduced: Vec<Vec<Elt>> = assigned_vecs;
    let mut pivots = row_reduce(f, &mut reduced);

    for slot in 0..dim {
        if rows[slot].is_some() {
            continue;
        }
        let chosen: Vec<&Vec<Elt>> = rows.iter().filter_map(|r| r.as_ref()).collect();
        let new_row = if slot % 2 == 0 {
            // e-slot: least vector orthogonal to everything chosen, outside
            // the chosen span.
            (1..total)
                .map(|code| vector_from_code(code, f.q, dim))
                .find(|v| {
                    chosen.iter().all(|r| form(r, v) == 0)
                        && !span_contains(f, &reduced, &pivots, v)
                })
                .ok_or_else(|| {
                    Error::GramMismatch("no isotropic extension exists; degenerate input".into())
                })?
        } else {
            // f-slot: least vector pairing nontrivially with the partner,
            // scaled to pairing 1, then corrected against earlier pairs.
            let partner = rows[slot - 1].as_ref().expect("e-slot is filled first");
            let v = (1..total)
                .map(|code| vector_from_code(code, f.q, dim))
                .find(|v| form(partner, v) != 0)
                .ok_or_else(|| {
                    Error::GramMismatch("partner pairs to zero with everything".into())
                })?;
            let mut v = vec_scale(f, &v, f.inv(form(partner, &v)));
            for block in 0..slot / 2 {
                let e = rows[2 * block].as_ref().unwrap().clone();
                let fv = rows[2 * block + 1].as_ref().unwrap().clone();
                let c = form(&e, &v);
                let d = form(&fv, &v);
                // v ← v - c·f_block + d·e_block restores orthogonality to
                // the completed pair without touching the partner pairing.
                vec_add_scaled(f, &mut v, &fv, f.neg(c));
                vec_add_scaled(f, &mut v, &e, d);
            }
            debug_assert_eq!(form(partner, &v), 1);
            v
        };
        reduced.push(new_row.clone());
        pivots = row_reduce(f, &mut reduced);
        rows[slot] = Some(new_row);
    }

    let out: Vec<Vec<Elt>> = rows.into_iter().map(Option::unwrap).collect();
    // Full postcondition check: the rows reproduce the standard Gram matrix.
    for (a, va) in out.iter().enumerate() {
        for (b, vb) in out.iter().enumerate() {
            debug_assert_eq!(
                form(va, vb),
                required_pairing(f, a, b),
                "completed basis violates Gram relations at ({a},{b})"
            );
        }
    }
    Ok(out)
}
