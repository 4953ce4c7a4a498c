//! Exact linear algebra over a [`Field`].
//!
//! A [`Subspace`] stores its basis in reduced row echelon form, so two
//! subspaces are equal exactly when their encodings are equal. Field
//! handles are passed to every operation instead of being stored in the
//! subspace; that keeps subspaces cheap to hash and clone.

use std::fmt;

use crate::error::{Error, Result};
use crate::gf::{Elem, Field};

/// Canonical subspace of `GF(q)^n`: RREF rows, stored row-major.
#[derive(Clone, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct Subspace {
    n: usize,
    dim: usize,
    data: Vec<Elem>,
}

impl fmt::Debug for Subspace {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "<")?;
        for (i, r) in self.rows().enumerate() {
            if i > 0 {
                write!(f, "; ")?;
            }
            for (j, x) in r.iter().enumerate() {
                if j > 0 {
                    write!(f, " ")?;
                }
                write!(f, "{x}")?;
            }
        }
        write!(f, ">")
    }
}

fn check_len(n: usize, got: usize) -> Result<()> {
    if n == got {
        Ok(())
    } else {
        Err(Error::DimensionMismatch { expected: n, got })
    }
}

/// `y += a * x`
#[inline]
pub fn axpy(f: &Field, y: &mut [Elem], a: Elem, x: &[Elem]) {
    if a == 0 {
        return;
    }
    for (yi, &xi) in y.iter_mut().zip(x) {
        if xi != 0 {
            *yi = f.add(*yi, f.mul(a, xi));
        }
    }
}

pub fn scale(f: &Field, v: &mut [Elem], a: Elem) {
    for x in v.iter_mut() {
        *x = f.mul(a, *x);
    }
}

pub fn dot(f: &Field, a: &[Elem], b: &[Elem]) -> Elem {
    a.iter()
        .zip(b)
        .fold(0, |acc, (&x, &y)| f.add(acc, f.mul(x, y)))
}

/// Scale a nonzero vector so its first nonzero entry is 1.
pub fn normalize(f: &Field, v: &mut [Elem]) -> bool {
    match v.iter().find(|&&x| x != 0) {
        Some(&lead) => {
            if lead != 1 {
                let inv = f.inv_nz(lead);
                scale(f, v, inv);
            }
            true
        }
        None => false,
    }
}

/// In-place RREF of an `m x n` row-major matrix; returns the rank.
/// The first `rank` rows hold the result.
pub fn rref_in_place(f: &Field, n: usize, data: &mut [Elem]) -> usize {
    if n == 0 {
        return 0;
    }
    let m = data.len() / n;
    if f.q() == 2 && n <= 64 {
        return rref_gf2(n, data);
    }
    let mut rank = 0;
    for col in 0..n {
        if rank == m {
            break;
        }
        let Some(piv) = (rank..m).find(|&r| data[r * n + col] != 0) else {
            continue;
        };
        if piv != rank {
            for j in 0..n {
                data.swap(piv * n + j, rank * n + j);
            }
        }
        let lead = data[rank * n + col];
        if lead != 1 {
            let inv = f.inv_nz(lead);
            for j in col..n {
                data[rank * n + j] = f.mul(inv, data[rank * n + j]);
            }
        }
        let (before, rest) = data.split_at_mut(rank * n);
        let (prow, after) = rest.split_at_mut(n);
        for r in before.chunks_exact_mut(n).chain(after.chunks_exact_mut(n)) {
            let c = r[col];
            if c != 0 {
                let negc = f.neg(c);
                axpy(f, &mut r[col..], negc, &prow[col..]);
            }
        }
        rank += 1;
    }
    rank
}

/// Word-parallel elimination for GF(2), `n <= 64`.
fn rref_gf2(n: usize, data: &mut [Elem]) -> usize {
    let m = data.len() / n;
    let mut rows: Vec<u64> = data
        .chunks_exact(n)
        .map(|r| {
            r.iter()
                .enumerate()
                .fold(0u64, |acc, (j, &x)| acc | (((x & 1) as u64) << j))
        })
        .collect();
    let mut rank = 0;
    for col in 0..n {
        if rank == m {
            break;
        }
        let bit = 1u64 << col;
        let Some(piv) = (rank..m).find(|&r| rows[r] & bit != 0) else {
            continue;
        };
        rows.swap(piv, rank);
        let p = rows[rank];
        for (r, row) in rows.iter_mut().enumerate() {
            if r != rank && *row & bit != 0 {
                *row ^= p;
            }
        }
        rank += 1;
    }
    for (r, chunk) in data.chunks_exact_mut(n).enumerate() {
        for (j, x) in chunk.iter_mut().enumerate() {
            *x = ((rows[r] >> j) & 1) as Elem;
        }
    }
    rank
}

/// Rank of a list of rows.
pub fn rank(f: &Field, n: usize, rows: &[Vec<Elem>]) -> usize {
    let mut data: Vec<Elem> = rows.iter().flatten().copied().collect();
    rref_in_place(f, n, &mut data)
}

impl Subspace {
    pub fn zero(n: usize) -> Subspace {
        Subspace { n, dim: 0, data: Vec::new() }
    }

    pub fn full(n: usize) -> Subspace {
        let mut data = vec![0; n * n];
        for i in 0..n {
            data[i * n + i] = 1;
        }
        Subspace { n, dim: n, data }
    }

    /// The span of `rows`, in canonical form.
    pub fn from_rows<R: AsRef<[Elem]>>(f: &Field, n: usize, rows: &[R]) -> Result<Subspace> {
        let mut data = Vec::with_capacity(rows.len() * n);
        for r in rows {
            let r = r.as_ref();
            check_len(n, r.len())?;
            for &x in r {
                if x as usize >= f.q() {
                    return Err(Error::BadDimension(format!(
                        "entry {x} outside GF({})",
                        f.q()
                    )));
                }
            }
            data.extend_from_slice(r);
        }
        Ok(Self::from_flat(f, n, data))
    }

    /// Span of a single vector.
    pub fn point(f: &Field, v: &[Elem]) -> Subspace {
        Self::from_flat(f, v.len(), v.to_vec())
    }

    pub(crate) fn from_flat(f: &Field, n: usize, mut data: Vec<Elem>) -> Subspace {
        let rank = rref_in_place(f, n, &mut data);
        data.truncate(rank * n);
        Subspace { n, dim: rank, data }
    }

    pub fn ambient(&self) -> usize {
        self.n
    }
    pub fn dim(&self) -> usize {
        self.dim
    }
    pub fn is_zero(&self) -> bool {
        self.dim == 0
    }
    pub fn row(&self, i: usize) -> &[Elem] {
        &self.data[i * self.n..(i + 1) * self.n]
    }
    pub fn rows(&self) -> impl Iterator<Item = &[Elem]> {
        self.data.chunks_exact(self.n.max(1)).take(self.dim)
    }
    /// Row-major basis encoding.
    pub fn encoding(&self) -> &[Elem] {
        &self.data
    }
    pub fn pivots(&self) -> Vec<usize> {
        self.rows()
            .map(|r| r.iter().position(|&x| x != 0).unwrap())
            .collect()
    }

    /// Remainder of `v` after reducing against the basis.
    pub fn reduce(&self, f: &Field, v: &[Elem]) -> Vec<Elem> {
        let mut out = v.to_vec();
        for r in self.rows() {
            let p = r.iter().position(|&x| x != 0).unwrap();
            let c = out[p];
            if c != 0 {
                axpy(f, &mut out, f.neg(c), r);
            }
        }
        out
    }

    pub fn contains(&self, f: &Field, v: &[Elem]) -> Result<bool> {
        check_len(self.n, v.len())?;
        Ok(self.contains_vec(f, v))
    }

    #[inline]
    pub fn contains_vec(&self, f: &Field, v: &[Elem]) -> bool {
        self.reduce(f, v).iter().all(|&x| x == 0)
    }

    /// Whether `other` is a subspace of `self`.
    pub fn contains_subspace(&self, f: &Field, other: &Subspace) -> bool {
        other.dim <= self.dim && other.rows().all(|r| self.contains_vec(f, r))
    }

    /// Coordinates of `v` with respect to the basis, if `v` lies in the span.
    pub fn coords(&self, f: &Field, v: &[Elem]) -> Option<Vec<Elem>> {
        if !self.contains_vec(f, v) {
            return None;
        }
        Some(self.pivots().iter().map(|&p| v[p]).collect())
    }

    /// Linear combination `sum c_i row_i`.
    pub fn combine(&self, f: &Field, c: &[Elem]) -> Vec<Elem> {
        let mut out = vec![0; self.n];
        for (r, &ci) in self.rows().zip(c) {
            axpy(f, &mut out, ci, r);
        }
        out
    }

    pub fn join(&self, f: &Field, other: &Subspace) -> Result<Subspace> {
        check_len(self.n, other.n)?;
        let mut data = self.data.clone();
        data.extend_from_slice(&other.data);
        Ok(Self::from_flat(f, self.n, data))
    }

    /// Span of the subspace and one extra vector.
    pub fn join_vec(&self, f: &Field, v: &[Elem]) -> Subspace {
        let mut data = self.data.clone();
        data.extend_from_slice(v);
        Self::from_flat(f, self.n, data)
    }

    pub fn meet(&self, f: &Field, other: &Subspace) -> Result<Subspace> {
        check_len(self.n, other.n)?;
        if self.dim == 0 || other.dim == 0 {
            return Ok(Subspace::zero(self.n));
        }
        if self.dim == self.n {
            return Ok(other.clone());
        }
        if other.dim == self.n {
            return Ok(self.clone());
        }
        // (A + B)^0 = A^0 ∩ B^0, so A ∩ B = (A^0 + B^0)^0
        let a0 = self.annihilator(f);
        let b0 = other.annihilator(f);
        Ok(a0.join(f, &b0)?.annihilator(f))
    }

    /// `{w : r . w = 0 for every basis row r}` under the standard dot product.
    pub fn annihilator(&self, f: &Field) -> Subspace {
        null_space_rref(f, self.n, &self.data, self.dim)
    }

    /// Image of the subspace under `v -> v M^T`, i.e. each row mapped by `M`.
    pub fn map(&self, f: &Field, m: &Matrix) -> Subspace {
        let mut data = Vec::with_capacity(self.data.len());
        for r in self.rows() {
            data.extend(m.apply(f, r));
        }
        Self::from_flat(f, self.n, data)
    }
}

/// Null space of an RREF matrix with `rank` rows.
fn null_space_rref(f: &Field, n: usize, rref: &[Elem], rank: usize) -> Subspace {
    let mut pivots = Vec::with_capacity(rank);
    for r in 0..rank {
        let row = &rref[r * n..(r + 1) * n];
        pivots.push(row.iter().position(|&x| x != 0).unwrap());
    }
    let mut is_pivot = vec![false; n];
    for &p in &pivots {
        is_pivot[p] = true;
    }
    let mut data = Vec::with_capacity((n - rank) * n);
    for free in (0..n).filter(|&c| !is_pivot[c]) {
        let mut v = vec![0; n];
        v[free] = 1;
        for (r, &p) in pivots.iter().enumerate() {
            v[p] = f.neg(rref[r * n + free]);
        }
        data.extend(v);
    }
    Subspace::from_flat(f, n, data)
}

/// Null space of the matrix with the given rows.
pub fn null_space(f: &Field, n: usize, rows: &[Vec<Elem>]) -> Result<Subspace> {
    let s = Subspace::from_rows(f, n, rows)?;
    Ok(s.annihilator(f))
}

/// Gaussian binomial coefficient `[n choose d]_q`.
pub fn gaussian_binomial(n: u32, d: u32, q: u128) -> u128 {
    if d > n {
        return 0;
    }
    let mut num = 1u128;
    let mut den = 1u128;
    for i in 0..d {
        num *= q.pow(n - i) - 1;
        den *= q.pow(i + 1) - 1;
    }
    num / den
}

/// Every `d`-dimensional subspace of `ambient`, sorted canonically.
///
/// Walks RREF pivot patterns of `d x dim(ambient)` coefficient matrices and
/// all fillings of their free entries, mapping each through the ambient basis.
pub fn enumerate_subspaces(f: &Field, ambient: &Subspace, d: usize) -> Vec<Subspace> {
    let m = ambient.dim();
    let n = ambient.ambient();
    if d > m {
        return Vec::new();
    }
    if d == 0 {
        return vec![Subspace::zero(n)];
    }
    let q = f.q();
    let mut out = Vec::new();
    let mut pivots: Vec<usize> = (0..d).collect();
    loop {
        // free positions: row i, column c > pivots[i], c not a pivot
        let mut free = Vec::new();
        for (i, &p) in pivots.iter().enumerate() {
            for c in p + 1..m {
                if !pivots.contains(&c) {
                    free.push((i, c));
                }
            }
        }
        let mut vals = vec![0usize; free.len()];
        loop {
            let mut coef = vec![0 as Elem; d * m];
            for (i, &p) in pivots.iter().enumerate() {
                coef[i * m + p] = 1;
            }
            for (k, &(i, c)) in free.iter().enumerate() {
                coef[i * m + c] = vals[k] as Elem;
            }
            let mut data = Vec::with_capacity(d * n);
            for i in 0..d {
                data.extend(ambient.combine(f, &coef[i * m..(i + 1) * m]));
            }
            out.push(Subspace::from_flat(f, n, data));
            // odometer
            let mut k = 0;
            while k < vals.len() {
                vals[k] += 1;
                if vals[k] < q {
                    break;
                }
                vals[k] = 0;
                k += 1;
            }
            if k == vals.len() {
                break;
            }
        }
        // next pivot pattern (combinations of d out of m)
        let mut i = d;
        loop {
            if i == 0 {
                out.sort_unstable();
                return out;
            }
            i -= 1;
            if pivots[i] < m - d + i {
                pivots[i] += 1;
                for j in i + 1..d {
                    pivots[j] = pivots[j - 1] + 1;
                }
                break;
            }
        }
    }
}

/// All normalized nonzero vectors of `GF(q)^n` (one per projective point),
/// in lexicographic order of their encodings.
pub fn projective_points(f: &Field, n: usize) -> Vec<Vec<Elem>> {
    let q = f.q();
    let mut out = Vec::new();
    for lead in (0..n).rev() {
        let tail = n - lead - 1;
        let count = q.pow(tail as u32);
        for code in 0..count {
            let mut v = vec![0 as Elem; n];
            v[lead] = 1;
            let mut c = code;
            for j in (lead + 1..n).rev() {
                v[j] = (c % q) as Elem;
                c /= q;
            }
            out.push(v);
        }
    }
    out.sort_unstable();
    out
}

/// Dense square or rectangular matrix over a field, row-major.
#[derive(Clone, PartialEq, Eq, Hash, Debug)]
pub struct Matrix {
    pub rows: usize,
    pub cols: usize,
    pub data: Vec<Elem>,
}

impl Matrix {
    pub fn zeros(rows: usize, cols: usize) -> Matrix {
        Matrix { rows, cols, data: vec![0; rows * cols] }
    }
    pub fn identity(n: usize) -> Matrix {
        let mut m = Self::zeros(n, n);
        for i in 0..n {
            m.data[i * n + i] = 1;
        }
        m
    }
    pub fn from_rows(rows: &[Vec<Elem>]) -> Matrix {
        let r = rows.len();
        let c = rows.first().map_or(0, |x| x.len());
        Matrix { rows: r, cols: c, data: rows.iter().flatten().copied().collect() }
    }
    pub fn get(&self, i: usize, j: usize) -> Elem {
        self.data[i * self.cols + j]
    }
    pub fn set(&mut self, i: usize, j: usize, x: Elem) {
        self.data[i * self.cols + j] = x;
    }
    pub fn row(&self, i: usize) -> &[Elem] {
        &self.data[i * self.cols..(i + 1) * self.cols]
    }
    /// Column-vector action `M v`.
    pub fn apply(&self, f: &Field, v: &[Elem]) -> Vec<Elem> {
        (0..self.rows).map(|i| dot(f, self.row(i), v)).collect()
    }
    pub fn mul(&self, f: &Field, other: &Matrix) -> Matrix {
        assert_eq!(self.cols, other.rows);
        let mut out = Self::zeros(self.rows, other.cols);
        for i in 0..self.rows {
            for k in 0..self.cols {
                let a = self.get(i, k);
                if a == 0 {
                    continue;
                }
                let orow = other.row(k).to_vec();
                axpy(f, &mut out.data[i * other.cols..(i + 1) * other.cols], a, &orow);
            }
        }
        out
    }
    pub fn transpose(&self) -> Matrix {
        let mut out = Self::zeros(self.cols, self.rows);
        for i in 0..self.rows {
            for j in 0..self.cols {
                out.set(j, i, self.get(i, j));
            }
        }
        out
    }
    pub fn rank(&self, f: &Field) -> usize {
        let mut d = self.data.clone();
        rref_in_place(f, self.cols, &mut d)
    }
    /// `M - lambda I`
    pub fn minus_scalar(&self, f: &Field, lambda: Elem) -> Matrix {
        let mut out = self.clone();
        for i in 0..self.rows.min(self.cols) {
            out.set(i, i, f.sub(self.get(i, i), lambda));
        }
        out
    }
    pub fn scaled(&self, f: &Field, a: Elem) -> Matrix {
        let mut out = self.clone();
        scale(f, &mut out.data, a);
        out
    }
    pub fn inverse(&self, f: &Field) -> Result<Matrix> {
        let n = self.rows;
        if n != self.cols {
            return Err(Error::DimensionMismatch { expected: n, got: self.cols });
        }
        let w = 2 * n;
        let mut aug = vec![0; n * w];
        for i in 0..n {
            aug[i * w..i * w + n].copy_from_slice(self.row(i));
            aug[i * w + n + i] = 1;
        }
        let r = rref_in_place(f, w, &mut aug);
        if r < n || (0..n).any(|i| aug[i * w + i] != 1) {
            return Err(Error::Singular);
        }
        let mut out = Self::zeros(n, n);
        for i in 0..n {
            out.data[i * n..(i + 1) * n].copy_from_slice(&aug[i * w + n..(i + 1) * w]);
        }
        Ok(out)
    }
    pub fn is_scalar(&self) -> bool {
        let l = self.get(0, 0);
        (0..self.rows).all(|i| (0..self.cols).all(|j| self.get(i, j) == if i == j { l } else { 0 }))
    }
    pub fn determinant(&self, f: &Field) -> Elem {
        let n = self.rows;
        let mut a = self.data.clone();
        let mut det = 1;
        for col in 0..n {
            let Some(p) = (col..n).find(|&r| a[r * n + col] != 0) else {
                return 0;
            };
            if p != col {
                for j in 0..n {
                    a.swap(p * n + j, col * n + j);
                }
                det = f.neg(det);
            }
            let piv = a[col * n + col];
            det = f.mul(det, piv);
            let inv = f.inv_nz(piv);
            for r in col + 1..n {
                let c = f.mul(a[r * n + col], inv);
                if c != 0 {
                    let prow: Vec<Elem> = a[col * n..(col + 1) * n].to_vec();
                    axpy(f, &mut a[r * n..(r + 1) * n], f.neg(c), &prow);
                }
            }
        }
        det
    }
}
