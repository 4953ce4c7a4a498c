//! Standard forms of the finite classical polar spaces.
//!
//! Coordinates are ordered `e_{-r}, ..., e_{-1}, e_1, ..., e_r` followed by
//! the anisotropic coordinates, so `e_{-i}` and `e_i` sit at mirrored
//! positions `r - i` and `r + i - 1`.
//!
//! * symplectic: `f(x,y) = sum x_{-i} y_i - x_i y_{-i}`
//! * quadratic: `q(x) = sum x_{-i} x_i + Q0(x_0)`
//! * Hermitian: `f(x,y) = sum x_{-i}^s y_i + x_i^s y_{-i} + f0(x_0,y_0)`
//!
//! Hermitian forms are conjugate-linear in the first argument.

use std::fmt;

use crate::error::{Error, Result};
use crate::gf::{is_prime, Elem, Field, Involution, DEFAULT_MAX_ORDER};
use crate::linalg::{null_space, Subspace};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum Kind {
    Symplectic,
    Quadratic,
    Hermitian,
}

/// Anisotropic part of the standard form.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum Aniso {
    None,
    /// `Q0(x) = x^2`
    Parabolic,
    /// `Q0(x,y) = x^2 + c1 x y + c0 y^2`, irreducible.
    Elliptic { c1: Elem, c0: Elem },
    /// `f0(x,y) = x^s y`, with `g0(x,y) = c x^s y` and `c + c^s = 1`.
    Hermitian { c: Elem },
}

#[derive(Clone, PartialEq, Eq)]
pub struct FormSpec {
    kind: Kind,
    field: Field,
    rank: usize,
    aniso: Aniso,
}

impl fmt::Debug for FormSpec {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{} = {}", self, self.classical_name())
    }
}

/// Split a prime power into `(p, k)`.
pub fn prime_power(q: u64) -> Option<(u32, u32)> {
    if q < 2 {
        return None;
    }
    let p = (2..=q).find(|d| q.is_multiple_of(*d))?;
    let mut k = 0;
    let mut r = q;
    while r.is_multiple_of(p) {
        r /= p;
        k += 1;
    }
    (r == 1 && p <= u32::MAX as u64 && is_prime(p as u32)).then_some((p as u32, k))
}

impl FormSpec {
    pub fn symplectic(field: Field, rank: usize) -> Result<FormSpec> {
        check_rank(rank)?;
        Ok(FormSpec { kind: Kind::Symplectic, field, rank, aniso: Aniso::None })
    }

    /// Quadric of Witt index `rank` with anisotropic corank 1 (parabolic)
    /// or 2 (elliptic). Corank 0 is the top-thin hyperbolic case and rejected.
    pub fn quadratic(field: Field, rank: usize, corank: usize) -> Result<FormSpec> {
        check_rank(rank)?;
        let aniso = match corank {
            0 => {
                return Err(Error::InvalidForm(
                    "hyperbolic quadric (corank 0) is top-thin, type D, out of scope".into(),
                ))
            }
            1 => Aniso::Parabolic,
            2 => {
                let (c1, c0) = first_irreducible_quadratic(&field);
                Aniso::Elliptic { c1, c0 }
            }
            c => return Err(Error::InvalidForm(format!("quadric corank {c} not in {{1,2}}"))),
        };
        let s = FormSpec { kind: Kind::Quadratic, field, rank, aniso };
        s.check_anisotropic()?;
        Ok(s)
    }

    /// Hermitian form over a field of even degree; `odd_dim` adds one
    /// anisotropic coordinate.
    pub fn hermitian(field: Field, rank: usize, odd_dim: bool) -> Result<FormSpec> {
        check_rank(rank)?;
        if !field.has_involution() {
            return Err(Error::NoInvolution);
        }
        let aniso = if odd_dim {
            let c = field
                .elements()
                .find(|&c| field.add(c, field.conj(Involution::Frobenius, c)) == 1)
                .ok_or_else(|| Error::InvalidForm("no element of trace 1".into()))?;
            Aniso::Hermitian { c }
        } else {
            Aniso::None
        };
        let s = FormSpec { kind: Kind::Hermitian, field, rank, aniso };
        s.check_anisotropic()?;
        Ok(s)
    }

    /// Build from grammar-level parameters: `q` is the base field order
    /// (for Hermitian forms the field is `GF(q^2)`).
    pub fn from_params(kind: Kind, rank: usize, q: u64, corank: usize) -> Result<FormSpec> {
        Self::from_params_bounded(kind, rank, q, corank, DEFAULT_MAX_ORDER)
    }

    pub fn from_params_bounded(
        kind: Kind,
        rank: usize,
        q: u64,
        corank: usize,
        bound: usize,
    ) -> Result<FormSpec> {
        let (p, k) = prime_power(q).ok_or_else(|| {
            Error::InvalidForm(format!("q = {q} is not a prime power"))
        })?;
        match kind {
            Kind::Symplectic => {
                if corank != 0 {
                    return Err(Error::InvalidForm("symplectic forms have no corank".into()));
                }
                Self::symplectic(Field::with_bound(p, k, bound)?, rank)
            }
            Kind::Quadratic => Self::quadratic(Field::with_bound(p, k, bound)?, rank, corank),
            Kind::Hermitian => {
                if corank > 1 {
                    return Err(Error::InvalidForm(format!(
                        "Hermitian corank {corank} not in {{0,1}}"
                    )));
                }
                Self::hermitian(Field::with_bound(p, 2 * k, bound)?, rank, corank == 1)
            }
        }
    }

    pub fn kind(&self) -> Kind {
        self.kind
    }
    pub fn field(&self) -> &Field {
        &self.field
    }
    /// Witt index: vector dimension of the maximal singular subspaces.
    pub fn rank(&self) -> usize {
        self.rank
    }
    pub fn aniso(&self) -> Aniso {
        self.aniso
    }
    pub fn corank(&self) -> usize {
        match self.aniso {
            Aniso::None => 0,
            Aniso::Parabolic | Aniso::Hermitian { .. } => 1,
            Aniso::Elliptic { .. } => 2,
        }
    }
    /// Ambient vector dimension.
    pub fn n(&self) -> usize {
        2 * self.rank + self.corank()
    }
    pub fn involution(&self) -> Involution {
        match self.kind {
            Kind::Hermitian => Involution::Frobenius,
            _ => Involution::Identity,
        }
    }
    /// Grammar-level `q`: the field order, or its square root for Hermitian forms.
    pub fn base_q(&self) -> u64 {
        match self.kind {
            Kind::Hermitian => (self.field.p() as u64).pow(self.field.k() / 2),
            _ => self.field.q() as u64,
        }
    }
    /// Quadrics are separable unless they are parabolic in characteristic 2.
    pub fn is_separable_quadric(&self) -> bool {
        self.kind == Kind::Quadratic && !(self.field.p() == 2 && self.corank() == 1)
    }

    /// Conventional name, e.g. `W(5,2)`, `Q-(7,2)`, `H(5,4)`.
    pub fn classical_name(&self) -> String {
        let q = self.field.q();
        let pd = self.n() - 1;
        match (self.kind, self.corank()) {
            (Kind::Symplectic, _) => format!("W({pd},{q})"),
            (Kind::Quadratic, 1) => format!("Q({pd},{q})"),
            (Kind::Quadratic, _) => format!("Q-({pd},{q})"),
            (Kind::Hermitian, _) => format!("H({pd},{q})"),
        }
    }

    /// Coordinate position of `e_i`, `i` in `-r..=-1` or `1..=r`.
    pub fn index_of(&self, i: i32) -> usize {
        let r = self.rank as i32;
        assert!(i != 0 && i.abs() <= r, "e_{i} outside rank {r}");
        if i < 0 {
            (r + i) as usize
        } else {
            (r + i - 1) as usize
        }
    }

    /// Basis vector `e_i`.
    pub fn e(&self, i: i32) -> Vec<Elem> {
        let mut v = vec![0; self.n()];
        v[self.index_of(i)] = 1;
        v
    }

    /// Basis vector of the anisotropic part.
    pub fn e0(&self, j: usize) -> Vec<Elem> {
        assert!(j < self.corank());
        let mut v = vec![0; self.n()];
        v[2 * self.rank + j] = 1;
        v
    }

    /// `<e_{-1}, ..., e_{-k}>`, a singular subspace of vector dimension `k`.
    pub fn standard_subspace(&self, k: usize) -> Subspace {
        let rows: Vec<Vec<Elem>> = (1..=k as i32).map(|i| self.e(-i)).collect();
        Subspace::from_rows(&self.field, self.n(), &rows).expect("standard subspace")
    }

    /// `<e_1, ..., e_k>`, opposite [`FormSpec::standard_subspace`].
    pub fn standard_opposite(&self, k: usize) -> Subspace {
        let rows: Vec<Vec<Elem>> = (1..=k as i32).map(|i| self.e(i)).collect();
        Subspace::from_rows(&self.field, self.n(), &rows).expect("standard subspace")
    }

    fn check_dim(&self, v: &[Elem]) -> Result<()> {
        if v.len() == self.n() {
            Ok(())
        } else {
            Err(Error::DimensionMismatch { expected: self.n(), got: v.len() })
        }
    }

    #[inline]
    fn conj(&self, a: Elem) -> Elem {
        self.field.conj(self.involution(), a)
    }

    /// `g0(x0, y0)` on the anisotropic coordinates.
    pub fn g0(&self, x0: &[Elem], y0: &[Elem]) -> Elem {
        let f = &self.field;
        match self.aniso {
            Aniso::None => 0,
            Aniso::Parabolic => f.mul(x0[0], y0[0]),
            Aniso::Elliptic { c1, c0 } => {
                let a = f.mul(x0[0], y0[0]);
                let b = f.mul(c1, f.mul(x0[0], y0[1]));
                let c = f.mul(c0, f.mul(x0[1], y0[1]));
                f.add(a, f.add(b, c))
            }
            Aniso::Hermitian { c } => f.mul(c, f.mul(self.conj(x0[0]), y0[0])),
        }
    }

    /// `f0(x0, y0) = g0(x0,y0) + g0(y0,x0)^s`.
    pub fn f0(&self, x0: &[Elem], y0: &[Elem]) -> Elem {
        let f = &self.field;
        match self.aniso {
            Aniso::None => 0,
            Aniso::Hermitian { .. } => f.mul(self.conj(x0[0]), y0[0]),
            _ => f.add(self.g0(x0, y0), self.conj(self.g0(y0, x0))),
        }
    }

    /// Every vector of the anisotropic part `V0`.
    pub fn v0_vectors(&self) -> Vec<Vec<Elem>> {
        let c = self.corank();
        let q = self.field.q();
        (0..q.pow(c as u32))
            .map(|mut code| {
                (0..c)
                    .map(|_| {
                        let x = (code % q) as Elem;
                        code /= q;
                        x
                    })
                    .collect()
            })
            .collect()
    }

    fn check_anisotropic(&self) -> Result<()> {
        for v0 in self.v0_vectors().into_iter().skip(1) {
            let val = match self.kind {
                Kind::Hermitian => self.f0(&v0, &v0),
                _ => self.g0(&v0, &v0),
            };
            if val == 0 {
                return Err(Error::InvalidForm(format!(
                    "anisotropic part vanishes at {v0:?}"
                )));
            }
        }
        Ok(())
    }

    /// The (sesqui)bilinear form `f(v, w)`.
    pub fn eval_bilinear(&self, v: &[Elem], w: &[Elem]) -> Result<Elem> {
        self.check_dim(v)?;
        self.check_dim(w)?;
        Ok(self.bilinear(v, w))
    }

    pub(crate) fn bilinear(&self, v: &[Elem], w: &[Elem]) -> Elem {
        let f = &self.field;
        let r = self.rank;
        let mut acc = 0;
        for i in 0..r {
            let m = i; // e_{-(r-i)}
            let p = 2 * r - 1 - i; // e_{r-i}
            let t = match self.kind {
                Kind::Symplectic => f.sub(f.mul(v[m], w[p]), f.mul(v[p], w[m])),
                Kind::Quadratic => f.add(f.mul(v[m], w[p]), f.mul(v[p], w[m])),
                Kind::Hermitian => f.add(
                    f.mul(self.conj(v[m]), w[p]),
                    f.mul(self.conj(v[p]), w[m]),
                ),
            };
            acc = f.add(acc, t);
        }
        f.add(acc, self.f0(&v[2 * r..], &w[2 * r..]))
    }

    /// Row `a` with `f(u, w) = a . w` for every `w`.
    pub fn gram_row(&self, u: &[Elem]) -> Vec<Elem> {
        let f = &self.field;
        let r = self.rank;
        let n = self.n();
        let mut a = vec![0; n];
        for i in 0..r {
            let m = i;
            let p = 2 * r - 1 - i;
            match self.kind {
                Kind::Symplectic => {
                    a[p] = u[m];
                    a[m] = f.neg(u[p]);
                }
                Kind::Quadratic => {
                    a[p] = u[m];
                    a[m] = u[p];
                }
                Kind::Hermitian => {
                    a[p] = self.conj(u[m]);
                    a[m] = self.conj(u[p]);
                }
            }
        }
        let c = self.corank();
        if c > 0 {
            let x0 = &u[2 * r..];
            for j in 0..c {
                let mut ej = vec![0; c];
                ej[j] = 1;
                a[2 * r + j] = self.f0(x0, &ej);
            }
        }
        a
    }

    /// Quadratic form value; only for quadrics.
    pub fn eval_quadratic(&self, v: &[Elem]) -> Result<Elem> {
        if self.kind != Kind::Quadratic {
            return Err(Error::WrongKind("quadratic"));
        }
        self.check_dim(v)?;
        Ok(self.g(v, v))
    }

    /// The non-symmetric form `g(v,w) = sum x_{-i}^s y_i + g0(v0,w0)`, so that
    /// `q(v) = g(v,v)` for quadrics and `g(v,v) + L_s` is the pseudo-quadratic
    /// value for Hermitian forms.
    pub fn g(&self, v: &[Elem], w: &[Elem]) -> Elem {
        let f = &self.field;
        let r = self.rank;
        let mut acc = 0;
        for i in 0..r {
            acc = f.add(acc, f.mul(self.conj(v[i]), w[2 * r - 1 - i]));
        }
        f.add(acc, self.g0(&v[2 * r..], &w[2 * r..]))
    }

    /// Whether `g(v,v)` lies in the trace-like set `L_s`.
    pub fn pseudo_quadratic_vanishes(&self, v: &[Elem]) -> bool {
        let val = self.g(v, v);
        let l = self.field.trace_like_set(self.involution());
        l.binary_search(&val).is_ok()
    }

    /// Whether the nonzero vector `v` spans a point of the polar space.
    pub fn is_point(&self, v: &[Elem]) -> bool {
        match self.kind {
            Kind::Symplectic => true,
            Kind::Quadratic => self.g(v, v) == 0,
            Kind::Hermitian => self.bilinear(v, v) == 0,
        }
    }

    /// `{w : f(u, w) = 0 for all u in U}`.
    pub fn perp(&self, u: &Subspace) -> Result<Subspace> {
        if u.ambient() != self.n() {
            return Err(Error::DimensionMismatch { expected: self.n(), got: u.ambient() });
        }
        Ok(self.perp_unchecked(u))
    }

    pub(crate) fn perp_unchecked(&self, u: &Subspace) -> Subspace {
        let rows: Vec<Vec<Elem>> = u.rows().map(|r| self.gram_row(r)).collect();
        if rows.is_empty() {
            return Subspace::full(self.n());
        }
        null_space(&self.field, self.n(), &rows).expect("perp dims")
    }

    /// Radical of the bilinear form.
    pub fn radical(&self) -> Subspace {
        self.perp_unchecked(&Subspace::full(self.n()))
    }

    /// Whether every vector of `U` is a point and `f` vanishes on `U x U`.
    pub fn is_singular(&self, u: &Subspace) -> bool {
        if u.ambient() != self.n() {
            return false;
        }
        let rows: Vec<&[Elem]> = u.rows().collect();
        for (i, a) in rows.iter().enumerate() {
            if !self.is_point(a) {
                return false;
            }
            for b in &rows[i + 1..] {
                if self.bilinear(a, b) != 0 {
                    return false;
                }
            }
        }
        true
    }

    /// `D(v0,w0,t,u) = (g0(w0,w0)+u-u^s)(g0(v0,v0)+t-t^s) + f0(w0,v0) + 1`.
    pub fn d_value(&self, v0: &[Elem], w0: &[Elem], t: Elem, u: Elem) -> Result<Elem> {
        if self.kind == Kind::Symplectic {
            return Err(Error::WrongKind("pseudo-quadratic"));
        }
        let (g1, g2) = self.g_pair(v0, w0, t, u);
        let f = &self.field;
        Ok(f.add(f.add(f.mul(g2, g1), self.f0(w0, v0)), 1))
    }

    /// `(g1, g2) = (g0(v0,v0) + t - t^s, g0(w0,w0) + u - u^s)`.
    pub fn g_pair(&self, v0: &[Elem], w0: &[Elem], t: Elem, u: Elem) -> (Elem, Elem) {
        let f = &self.field;
        let g1 = f.add(self.g0(v0, v0), f.sub(t, self.conj(t)));
        let g2 = f.add(self.g0(w0, w0), f.sub(u, self.conj(u)));
        (g1, g2)
    }
}

fn check_rank(rank: usize) -> Result<()> {
    if rank == 0 {
        Err(Error::InvalidForm("Witt index must be at least 1".into()))
    } else {
        Ok(())
    }
}

/// First `(c1, c0)` in canonical order with `t^2 + c1 t + c0` irreducible.
fn first_irreducible_quadratic(f: &Field) -> (Elem, Elem) {
    for c1 in f.elements() {
        for c0 in f.elements() {
            let has_root = f
                .elements()
                .any(|t| f.add(f.mul(t, t), f.add(f.mul(c1, t), c0)) == 0);
            if !has_root {
                return (c1, c0);
            }
        }
    }
    unreachable!("every finite field has an irreducible quadratic")
}

impl fmt::Display for FormSpec {
    /// The spec-string form, e.g. `O(n=3,q=2,corank=2)`.
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let q = self.base_q();
        let r = self.rank;
        match self.kind {
            Kind::Symplectic => write!(f, "Sp(n={r},q={q})"),
            Kind::Quadratic => write!(f, "O(n={r},q={q},corank={})", self.corank()),
            Kind::Hermitian => write!(f, "U(n={r},q={q},corank={})", self.corank()),
        }
    }
}
