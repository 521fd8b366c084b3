//! Arithmetic in small prime-power fields GF(p^m) and in extension towers
//! GF(q) ⊆ GF(q^ν).
//!
//! Elements are dense integer indices `0..q`. Index 0 is the zero element and
//! index 1 is the multiplicative identity; in general index
//! `c_0 + c_1·p + … + c_{m-1}·p^{m-1}` stands for the residue class of the
//! polynomial `c_0 + c_1 x + … + c_{m-1} x^{m-1}` modulo a fixed monic
//! irreducible of degree `m`. The modulus is the first irreducible in that
//! same index order, so two builds of the same field are identical.
//!
//! Arithmetic goes through dense lookup tables when `q ≤ 256` and through
//! discrete-log tables (always built, `O(q)` memory) above that, which keeps
//! every operation `O(1)` after construction up to the supported bound
//! `q ≤ 2^16`.

use crate::error::{Error, Result};

/// A field element, as a dense index into the field's tables.
pub type Elt = usize;

/// Largest supported field size.
pub const MAX_FIELD_SIZE: usize = 1 << 16;

/// Dense q×q tables are built up to this size; larger fields use log/exp.
const TABLE_LIMIT: usize = 256;

/// Trial-division primality check; inputs here never exceed 2^16.
pub fn is_prime(n: usize) -> bool {
    if n < 2 {
        return false;
    }
    let mut d = 2;
    while d * d <= n {
        if n % d == 0 {
            return false;
        }
        d += 1;
    }
    true
}

/// Writes `q` as `p^m` with `p` prime, if possible.
pub fn factor_prime_power(q: usize) -> Option<(usize, u32)> {
    if q < 2 {
        return None;
    }
    let mut p = 2;
    while p * p <= q {
        if q % p == 0 {
            let mut rest = q;
            let mut m = 0;
            while rest % p == 0 {
                rest /= p;
                m += 1;
            }
            return if rest == 1 { Some((p, m)) } else { None };
        }
        p += 1;
    }
    Some((q, 1))
}

/// Distinct prime factors of `n` by trial division.
fn prime_factors(mut n: usize) -> Vec<usize> {
    let mut out = Vec::new();
    let mut d = 2;
    while d * d <= n {
        if n % d == 0 {
            out.push(d);
            while n % d == 0 {
                n /= d;
            }
        }
        d += 1;
    }
    if n > 1 {
        out.push(n);
    }
    out
}

// ---------------------------------------------------------------------------
// Polynomial helpers over GF(p), used only during construction.
// Coefficient vectors are little-endian: index i holds the coefficient of x^i.
// ---------------------------------------------------------------------------

fn index_to_poly(idx: usize, p: usize, len: usize) -> Vec<usize> {
    let mut c = vec![0; len];
    let mut rest = idx;
    for digit in c.iter_mut() {
        *digit = rest % p;
        rest /= p;
    }
    debug_assert_eq!(rest, 0);
    c
}

fn poly_to_index(c: &[usize], p: usize) -> usize {
    c.iter().rev().fold(0, |acc, &d| acc * p + d)
}

fn poly_deg(c: &[usize]) -> Option<usize> {
    c.iter().rposition(|&d| d != 0)
}

/// Remainder of `a` modulo the monic polynomial `b`, coefficients mod `p`.
fn poly_rem(a: &[usize], b: &[usize], p: usize) -> Vec<usize> {
    let db = poly_deg(b).expect("divisor must be nonzero");
    debug_assert_eq!(b[db], 1, "divisor must be monic");
    let mut r = a.to_vec();
    while let Some(dr) = poly_deg(&r) {
        if dr < db {
            break;
        }
        let lead = r[dr];
        let shift = dr - db;
        for i in 0..=db {
            let sub = (lead * b[i]) % p;
            r[i + shift] = (r[i + shift] + p - sub) % p;
        }
    }
    r.truncate(db.max(1));
    r.resize(db.max(1), 0);
    r
}

fn poly_mul_mod(a: &[usize], b: &[usize], modulus: &[usize], p: usize) -> Vec<usize> {
    let mut prod = vec![0usize; a.len() + b.len()];
    for (i, &ai) in a.iter().enumerate() {
        if ai == 0 {
            continue;
        }
        for (j, &bj) in b.iter().enumerate() {
            prod[i + j] = (prod[i + j] + ai * bj) % p;
        }
    }
    poly_rem(&prod, modulus, p)
}

/// True iff the monic polynomial `f` has no monic divisor of degree
/// `1..=deg(f)/2` over GF(p). Exhaustive trial division; degrees here are
/// at most 16.
fn poly_is_irreducible(f: &[usize], p: usize) -> bool {
    let deg = poly_deg(f).unwrap_or(0);
    if deg == 0 {
        return false;
    }
    for d in 1..=deg / 2 {
        let count = p.pow(d as u32);
        for low in 0..count {
            let mut g = index_to_poly(low, p, d + 1);
            g[d] = 1;
            let r = poly_rem(f, &g, p);
            if poly_deg(&r).is_none() {
                return false;
            }
        }
    }
    true
}

/// The first monic irreducible of degree `m` over GF(p) in index order of the
/// lower coefficients. For `m == 1` this is the polynomial `x`.
fn least_irreducible(p: usize, m: usize) -> Vec<usize> {
    let count = p.pow(m as u32);
    for low in 0..count {
        let mut f = index_to_poly(low, p, m + 1);
        f[m] = 1;
        if poly_is_irreducible(&f, p) {
            return f;
        }
    }
    unreachable!("an irreducible of every degree exists over GF(p)")
}

// ---------------------------------------------------------------------------
// FieldCtx
// ---------------------------------------------------------------------------

/// Arithmetic context for GF(p^m).
#[derive(Clone)]
pub struct FieldCtx {
    /// Characteristic.
    pub p: usize,
    /// Extension degree over the prime field.
    pub m: usize,
    /// Field size `p^m`.
    pub q: usize,
    /// Monic irreducible modulus, little-endian coefficients, length `m + 1`.
    pub modulus: Vec<usize>,
    add_table: Option<Vec<Elt>>,
    mul_table: Option<Vec<Elt>>,
    inv_table: Option<Vec<Elt>>,
    frobenius: Vec<Elt>,
    /// Powers of the fixed generator; `exp[i] = g^i`, length `q - 1`.
    exp: Vec<Elt>,
    /// Discrete logs base `g`; `log[0]` is a sentinel.
    log: Vec<usize>,
    generator: Elt,
}

impl std::fmt::Debug for FieldCtx {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.debug_struct("FieldCtx")
            .field("p", &self.p)
            .field("m", &self.m)
            .field("q", &self.q)
            .field("modulus", &self.modulus)
            .finish()
    }
}

impl PartialEq for FieldCtx {
    fn eq(&self, other: &Self) -> bool {
        self.p == other.p && self.m == other.m && self.modulus == other.modulus
    }
}
impl Eq for FieldCtx {}

impl FieldCtx {
    /// Builds GF(p^m). Requires `p` prime, `m ≥ 1`, and `p^m ≤ 2^16`.
    pub fn build(p: usize, m: usize) -> Result<FieldCtx> {
        if !is_prime(p) {
            return Err(Error::NonPrime(p));
        }
        if m == 0 {
            return Err(Error::InvalidParameter("extension degree must be ≥ 1".into()));
        }
        let q = (p as u128).checked_pow(m as u32).ok_or_else(too_big)?;
        if q > MAX_FIELD_SIZE as u128 {
            return Err(too_big());
        }
        let q = q as usize;
        let modulus = least_irreducible(p, m);

        let raw_mul = |a: Elt, b: Elt| -> Elt {
            let pa = index_to_poly(a, p, m);
            let pb = index_to_poly(b, p, m);
            poly_to_index(&poly_mul_mod(&pa, &pb, &modulus, p), p)
        };
        let raw_pow = |mut base: Elt, mut e: usize| -> Elt {
            let mut acc = 1;
            while e > 0 {
                if e & 1 == 1 {
                    acc = raw_mul(acc, base);
                }
                base = raw_mul(base, base);
                e >>= 1;
            }
            acc
        };

        // Fixed generator: the least index of full multiplicative order.
        let factors = prime_factors(q - 1);
        let generator = (1..q)
            .find(|&g| factors.iter().all(|&r| raw_pow(g, (q - 1) / r) != 1))
            .expect("the multiplicative group of a finite field is cyclic");

        let mut exp = Vec::with_capacity(q - 1);
        let mut log = vec![usize::MAX; q];
        let mut x = 1;
        for i in 0..q - 1 {
            exp.push(x);
            log[x] = i;
            x = raw_mul(x, generator);
        }
        debug_assert_eq!(x, 1, "generator order must be q - 1");

        let frobenius = (0..q).map(|e| raw_pow(e, p)).collect();

        let raw_add = |a: Elt, b: Elt| -> Elt {
            let (mut a, mut b, mut pw, mut out) = (a, b, 1, 0);
            for _ in 0..m {
                out += ((a + b) % p) * pw;
                a /= p;
                b /= p;
                pw *= p;
            }
            out
        };

        let (add_table, mul_table, inv_table) = if q <= TABLE_LIMIT {
            let mut add = vec![0; q * q];
            let mut mul = vec![0; q * q];
            for a in 0..q {
                for b in 0..q {
                    add[a * q + b] = raw_add(a, b);
                    mul[a * q + b] = raw_mul(a, b);
                }
            }
            let mut inv = vec![0; q];
            for a in 1..q {
                inv[a] = exp[(q - 1 - log[a]) % (q - 1)];
            }
            (Some(add), Some(mul), Some(inv))
        } else {
            (None, None, None)
        };

        Ok(FieldCtx {
            p,
            m,
            q,
            modulus,
            add_table,
            mul_table,
            inv_table,
            frobenius,
            exp,
            log,
            generator,
        })
    }

    /// The fixed generator of the multiplicative group (1 when `q == 2`).
    pub fn generator(&self) -> Elt {
        self.generator
    }

    pub fn add(&self, a: Elt, b: Elt) -> Elt {
        match &self.add_table {
            Some(t) => t[a * self.q + b],
            None => {
                let (mut a, mut b, mut pw, mut out) = (a, b, 1, 0);
                for _ in 0..self.m {
                    out += ((a + b) % self.p) * pw;
                    a /= self.p;
                    b /= self.p;
                    pw *= self.p;
                }
                out
            }
        }
    }

    pub fn neg(&self, a: Elt) -> Elt {
        if self.p == 2 {
            return a;
        }
        let (mut a, mut pw, mut out) = (a, 1, 0);
        for _ in 0..self.m {
            out += ((self.p - a % self.p) % self.p) * pw;
            a /= self.p;
            pw *= self.p;
        }
        out
    }

    pub fn sub(&self, a: Elt, b: Elt) -> Elt {
        self.add(a, self.neg(b))
    }

    pub fn mul(&self, a: Elt, b: Elt) -> Elt {
        match &self.mul_table {
            Some(t) => t[a * self.q + b],
            None => {
                if a == 0 || b == 0 {
                    0
                } else {
                    self.exp[(self.log[a] + self.log[b]) % (self.q - 1)]
                }
            }
        }
    }

    /// Multiplicative inverse. Panics on zero: inverting zero is a
    /// programming error, not a data error.
    pub fn inv(&self, a: Elt) -> Elt {
        assert_ne!(a, 0, "zero has no inverse");
        match &self.inv_table {
            Some(t) => t[a],
            None => self.exp[(self.q - 1 - self.log[a]) % (self.q - 1)],
        }
    }

    pub fn div(&self, a: Elt, b: Elt) -> Elt {
        self.mul(a, self.inv(b))
    }

    pub fn pow(&self, a: Elt, e: u64) -> Elt {
        if a == 0 {
            return if e == 0 { 1 } else { 0 };
        }
        let r = (e % (self.q as u64 - 1)) as usize;
        self.exp[(self.log[a] * r) % (self.q - 1)]
    }

    /// The Frobenius map `x ↦ x^p`.
    pub fn frob(&self, a: Elt) -> Elt {
        self.frobenius[a]
    }

    /// Frobenius applied `t` times: `x ↦ x^(p^t)`.
    pub fn frob_iter(&self, t: usize, a: Elt) -> Elt {
        (0..t).fold(a, |x, _| self.frobenius[x])
    }

    pub fn elements(&self) -> std::ops::Range<Elt> {
        0..self.q
    }

    pub fn nonzero_elements(&self) -> std::ops::Range<Elt> {
        1..self.q
    }

    /// All `m` field automorphisms as permutation tables, in the order
    /// identity, Frobenius, Frobenius², ….
    pub fn automorphism_group(&self) -> Vec<Vec<Elt>> {
        let mut out = Vec::with_capacity(self.m);
        let mut cur: Vec<Elt> = (0..self.q).collect();
        for _ in 0..self.m {
            out.push(cur.clone());
            for x in cur.iter_mut() {
                *x = self.frobenius[*x];
            }
        }
        out
    }
}

fn too_big() -> Error {
    Error::SizeExceeded(format!("field size exceeds {MAX_FIELD_SIZE}"))
}

// ---------------------------------------------------------------------------
// TowerCtx
// ---------------------------------------------------------------------------

/// The extension tower GF(q) ⊆ GF(q^ν), with a fixed GF(q)-basis of the top
/// field and coordinate maps in both directions.
///
/// The embedding sends the base generator-of-the-ring representative `x` to
/// the least root of the base modulus inside the big field, which makes it a
/// field homomorphism by construction; its image is exactly the fixed set of
/// the `m`-fold Frobenius.
pub struct TowerCtx {
    pub base: FieldCtx,
    pub big: FieldCtx,
    pub nu: usize,
    /// `ν` powers `1, β, …, β^{ν-1}` of the big field's generator; a
    /// GF(q)-basis of the big field.
    pub basis: Vec<Elt>,
    embed: Vec<Elt>,
    retract: Vec<usize>,
    coords: Vec<Vec<Elt>>,
    tuple_to_big: Vec<Elt>,
    /// `x ↦ x^q` in the big field, as a permutation table.
    frob_m: Vec<Elt>,
}

impl TowerCtx {
    /// Builds the tower over `base` of relative degree `nu ≥ 1`.
    /// Requires `base.q^nu ≤ 2^16`.
    pub fn build(base: &FieldCtx, nu: usize) -> Result<TowerCtx> {
        if nu == 0 {
            return Err(Error::InvalidParameter("tower degree must be ≥ 1".into()));
        }
        let total = (base.q as u128).checked_pow(nu as u32).ok_or_else(too_big)?;
        if total > MAX_FIELD_SIZE as u128 {
            return Err(too_big());
        }
        let big = FieldCtx::build(base.p, base.m * nu)?;

        // Embed: evaluate base elements (as polynomials over GF(p)) at the
        // least root of the base modulus inside the big field. Constants
        // 0..p-1 index the prime subfield identically in both fields.
        let eval_at = |r: Elt| -> Elt {
            base.modulus
                .iter()
                .rev()
                .fold(0, |acc, &c| big.add(big.mul(acc, r), c))
        };
        let root = (0..big.q)
            .find(|&r| eval_at(r) == 0)
            .expect("the base modulus splits in the extension");
        let embed: Vec<Elt> = (0..base.q)
            .map(|e| {
                index_to_poly(e, base.p, base.m)
                    .iter()
                    .rev()
                    .fold(0, |acc, &c| big.add(big.mul(acc, root), c))
            })
            .collect();
        let mut retract = vec![usize::MAX; big.q];
        for (e, &img) in embed.iter().enumerate() {
            assert_eq!(retract[img], usize::MAX, "embedding must be injective");
            retract[img] = e;
        }

        let beta = big.generator();
        let mut basis = Vec::with_capacity(nu);
        let mut pow = 1;
        for _ in 0..nu {
            basis.push(pow);
            pow = big.mul(pow, beta);
        }

        // Coordinates: enumerate all ν-tuples over the base field and record
        // the bijection with the big field.
        let total = total as usize;
        let mut tuple_to_big = vec![0; total];
        let mut coords = vec![Vec::new(); big.q];
        let mut seen = vec![false; big.q];
        for code in 0..total {
            let tuple = index_to_poly(code, base.q, nu);
            let x = tuple
                .iter()
                .zip(&basis)
                .fold(0, |acc, (&c, &b)| big.add(acc, big.mul(embed[c], b)));
            assert!(!seen[x], "basis powers must be linearly independent");
            seen[x] = true;
            tuple_to_big[code] = x;
            coords[x] = tuple;
        }

        let mut frob_m: Vec<Elt> = (0..big.q).collect();
        for x in frob_m.iter_mut() {
            *x = (0..base.m).fold(*x, |y, _| big.frob(y));
        }

        Ok(TowerCtx {
            base: base.clone(),
            big,
            nu,
            basis,
            embed,
            retract,
            coords,
            tuple_to_big,
            frob_m,
        })
    }

    /// Image of a base element in the big field.
    pub fn embed(&self, e: Elt) -> Elt {
        self.embed[e]
    }

    /// Preimage under the embedding, if the element lies in the subfield.
    pub fn retract(&self, x: Elt) -> Option<Elt> {
        match self.retract[x] {
            usize::MAX => None,
            e => Some(e),
        }
    }

    /// GF(q)-coordinates of a big-field element in the fixed basis.
    pub fn coords(&self, x: Elt) -> &[Elt] {
        &self.coords[x]
    }

    /// Inverse of [`coords`](Self::coords).
    pub fn from_coords(&self, c: &[Elt]) -> Elt {
        assert_eq!(c.len(), self.nu);
        self.tuple_to_big[poly_to_index(c, self.base.q)]
    }

    /// `x ↦ x^q` in the big field.
    pub fn frob_base(&self, x: Elt) -> Elt {
        self.frob_m[x]
    }

    /// Relative trace `x + x^q + … + x^{q^{ν-1}}`, pulled back to the base
    /// field (the sum always lands in the subfield).
    pub fn rel_trace(&self, x: Elt) -> Elt {
        let mut acc = x;
        let mut y = x;
        for _ in 1..self.nu {
            y = self.frob_m[y];
            acc = self.big.add(acc, y);
        }
        self.retract(acc)
            .expect("the relative trace lands in the base field")
    }
}
