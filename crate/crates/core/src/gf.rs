//! Small finite fields GF(p^k).
//!
//! Elements are encoded as integers `0..q`: the polynomial residue
//! `c_0 + c_1 x + ... + c_{k-1} x^{k-1}` is stored as `sum c_i p^i`.
//! Addition and multiplication go through full `q x q` tables, built once
//! per field together with log/antilog tables for the generator `x`.

use std::fmt;
use std::sync::Arc;

use crate::error::{Error, Result};

pub type Elem = u8;

/// Order bound used by [`Field::new`].
pub const DEFAULT_MAX_ORDER: usize = 81;
/// Largest order any table entry supports.
pub const MAX_ORDER: usize = 256;

/// Conway polynomials, coefficients low to high (monic).
const MODULI: &[(u32, u32, &[u8])] = &[
    (2, 2, &[1, 1, 1]),
    (2, 3, &[1, 1, 0, 1]),
    (2, 4, &[1, 1, 0, 0, 1]),
    (2, 5, &[1, 0, 1, 0, 0, 1]),
    (2, 6, &[1, 1, 0, 1, 1, 0, 1]),
    (2, 7, &[1, 1, 0, 0, 0, 0, 0, 1]),
    (2, 8, &[1, 0, 1, 1, 1, 0, 0, 0, 1]),
    (3, 2, &[2, 2, 1]),
    (3, 3, &[1, 2, 0, 1]),
    (3, 4, &[2, 0, 0, 2, 1]),
    (3, 5, &[1, 2, 0, 0, 0, 1]),
    (5, 2, &[2, 4, 1]),
    (5, 3, &[3, 3, 0, 1]),
    (7, 2, &[3, 6, 1]),
    (11, 2, &[2, 7, 1]),
    (13, 2, &[2, 12, 1]),
];

/// Which involution a form uses.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum Involution {
    Identity,
    Frobenius,
}

struct Tables {
    p: u32,
    k: u32,
    q: usize,
    modulus: Vec<u8>,
    add: Vec<Elem>,
    mul: Vec<Elem>,
    neg: Vec<Elem>,
    inv: Vec<Elem>,
    log: Vec<u16>,
    exp: Vec<Elem>,
    sigma: Option<Vec<Elem>>,
}

/// A finite field; cheap to clone.
#[derive(Clone)]
pub struct Field(Arc<Tables>);

impl PartialEq for Field {
    fn eq(&self, other: &Self) -> bool {
        self.0.p == other.0.p && self.0.k == other.0.k
    }
}
impl Eq for Field {}

impl fmt::Debug for Field {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "GF({})", self.0.q)
    }
}

impl fmt::Display for Field {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.0.k == 1 {
            write!(f, "GF({})", self.0.p)
        } else {
            write!(f, "GF({}^{})", self.0.p, self.0.k)
        }
    }
}

pub fn is_prime(n: u32) -> bool {
    if n < 2 {
        return false;
    }
    let mut d = 2;
    while d * d <= n {
        if n.is_multiple_of(d) {
            return false;
        }
        d += 1;
    }
    true
}

fn digits(mut v: usize, p: usize, k: usize) -> Vec<usize> {
    let mut out = vec![0; k];
    for d in out.iter_mut() {
        *d = v % p;
        v /= p;
    }
    out
}

fn undigits(d: &[usize], p: usize) -> usize {
    d.iter().rev().fold(0, |acc, &c| acc * p + c)
}

/// Multiply two residues as polynomials and reduce by the monic modulus.
fn poly_mulmod(a: &[usize], b: &[usize], m: &[u8], p: usize) -> Vec<usize> {
    let k = m.len() - 1;
    let mut prod = vec![0usize; 2 * k];
    for (i, &x) in a.iter().enumerate() {
        if x == 0 {
            continue;
        }
        for (j, &y) in b.iter().enumerate() {
            prod[i + j] = (prod[i + j] + x * y) % p;
        }
    }
    for deg in (k..prod.len()).rev() {
        let c = prod[deg];
        if c == 0 {
            continue;
        }
        for (i, &mc) in m.iter().enumerate().take(k) {
            let idx = deg - k + i;
            prod[idx] = (prod[idx] + (p - c) * mc as usize) % p;
        }
        prod[deg] = 0;
    }
    prod.truncate(k);
    prod
}

impl Field {
    /// GF(p^k) with the default order bound.
    pub fn new(p: u32, k: u32) -> Result<Field> {
        Self::with_bound(p, k, DEFAULT_MAX_ORDER)
    }

    /// GF(p^k) with an explicit order bound (at most [`MAX_ORDER`]).
    pub fn with_bound(p: u32, k: u32, bound: usize) -> Result<Field> {
        if !is_prime(p) {
            return Err(Error::NonPrime(p));
        }
        let bound = bound.min(MAX_ORDER);
        let too_large = Error::OrderTooLarge { p, k, bound };
        if k == 0 {
            return Err(too_large);
        }
        let q = (p as u64).checked_pow(k).filter(|&q| q as usize <= bound);
        let q = match q {
            Some(q) => q as usize,
            None => return Err(too_large),
        };
        let modulus: Vec<u8> = if k == 1 {
            let g = (1..p).find(|&g| prime_root(g, p)).expect("primitive root");
            vec![(p - g) as u8, 1]
        } else {
            match MODULI.iter().find(|(pp, kk, _)| *pp == p && *kk == k) {
                Some((_, _, m)) => m.to_vec(),
                None => return Err(too_large),
            }
        };
        Ok(Field(Arc::new(build_tables(p, k, q, modulus))))
    }

    pub fn p(&self) -> u32 {
        self.0.p
    }
    pub fn k(&self) -> u32 {
        self.0.k
    }
    pub fn q(&self) -> usize {
        self.0.q
    }
    /// Modulus coefficients, low to high.
    pub fn modulus(&self) -> &[u8] {
        &self.0.modulus
    }
    pub fn elements(&self) -> impl Iterator<Item = Elem> {
        (0..self.0.q).map(|x| x as Elem)
    }
    pub fn nonzero(&self) -> impl Iterator<Item = Elem> {
        (1..self.0.q).map(|x| x as Elem)
    }

    #[inline]
    pub fn add(&self, a: Elem, b: Elem) -> Elem {
        self.0.add[a as usize * self.0.q + b as usize]
    }
    #[inline]
    pub fn sub(&self, a: Elem, b: Elem) -> Elem {
        self.add(a, self.0.neg[b as usize])
    }
    #[inline]
    pub fn mul(&self, a: Elem, b: Elem) -> Elem {
        self.0.mul[a as usize * self.0.q + b as usize]
    }
    #[inline]
    pub fn neg(&self, a: Elem) -> Elem {
        self.0.neg[a as usize]
    }
    pub fn inv(&self, a: Elem) -> Result<Elem> {
        if a == 0 {
            Err(Error::DivisionByZero)
        } else {
            Ok(self.0.inv[a as usize])
        }
    }
    /// Inverse of a known nonzero element.
    #[inline]
    pub fn inv_nz(&self, a: Elem) -> Elem {
        debug_assert!(a != 0);
        self.0.inv[a as usize]
    }
    pub fn div(&self, a: Elem, b: Elem) -> Result<Elem> {
        Ok(self.mul(a, self.inv(b)?))
    }
    pub fn pow(&self, a: Elem, e: u64) -> Elem {
        if e == 0 {
            return 1;
        }
        if a == 0 {
            return 0;
        }
        let l = self.0.log[a as usize] as u64;
        let idx = (l * (e % (self.0.q as u64 - 1))) % (self.0.q as u64 - 1);
        self.0.exp[idx as usize]
    }
    /// Discrete log with respect to [`Field::generator`].
    pub fn log(&self, a: Elem) -> Result<usize> {
        if a == 0 {
            Err(Error::DivisionByZero)
        } else {
            Ok(self.0.log[a as usize] as usize)
        }
    }
    pub fn generator(&self) -> Elem {
        self.0.exp[if self.0.q > 2 { 1 } else { 0 }]
    }
    /// Embed an integer through the prime subfield.
    pub fn from_int(&self, n: i64) -> Elem {
        n.rem_euclid(self.0.p as i64) as Elem
    }
    pub fn is_square(&self, a: Elem) -> bool {
        a == 0 || self.0.p == 2 || self.0.log[a as usize].is_multiple_of(2)
    }

    pub fn has_involution(&self) -> bool {
        self.0.sigma.is_some()
    }
    /// The involution x -> x^sqrt(q); only defined for even degree.
    pub fn involution(&self, a: Elem) -> Result<Elem> {
        match &self.0.sigma {
            Some(s) => Ok(s[a as usize]),
            None => Err(Error::NoInvolution),
        }
    }
    /// Apply the chosen involution (the identity is always available).
    #[inline]
    pub fn conj(&self, inv: Involution, a: Elem) -> Elem {
        match inv {
            Involution::Identity => a,
            Involution::Frobenius => self.0.sigma.as_ref().expect("involution")[a as usize],
        }
    }
    /// Elements fixed by the involution.
    pub fn fixed_subfield(&self, inv: Involution) -> Vec<Elem> {
        self.elements().filter(|&x| self.conj(inv, x) == x).collect()
    }
    /// The additive group `{t - t^s}`, sorted.
    pub fn trace_like_set(&self, inv: Involution) -> Vec<Elem> {
        let mut out: Vec<Elem> = self
            .elements()
            .map(|t| self.sub(t, self.conj(inv, t)))
            .collect();
        out.sort_unstable();
        out.dedup();
        out
    }
    /// Norm `x^s x` and trace `x + x^s` relative to the involution.
    pub fn norm(&self, inv: Involution, a: Elem) -> Elem {
        self.mul(self.conj(inv, a), a)
    }
    pub fn trace(&self, inv: Involution, a: Elem) -> Elem {
        self.add(self.conj(inv, a), a)
    }
}

fn prime_root(g: u32, p: u32) -> bool {
    if p == 2 {
        return g == 1;
    }
    let mut x = 1u32;
    for i in 1..p {
        x = x * g % p;
        if x == 1 {
            return i == p - 1;
        }
    }
    false
}

fn build_tables(p: u32, k: u32, q: usize, modulus: Vec<u8>) -> Tables {
    let pu = p as usize;
    let ku = k as usize;
    let mut add = vec![0u8; q * q];
    let mut mul = vec![0u8; q * q];
    let ds: Vec<Vec<usize>> = (0..q).map(|v| digits(v, pu, ku)).collect();
    for a in 0..q {
        for b in 0..q {
            let s: Vec<usize> = ds[a].iter().zip(&ds[b]).map(|(x, y)| (x + y) % pu).collect();
            add[a * q + b] = undigits(&s, pu) as u8;
            let m = if ku == 1 {
                vec![ds[a][0] * ds[b][0] % pu]
            } else {
                poly_mulmod(&ds[a], &ds[b], &modulus, pu)
            };
            mul[a * q + b] = undigits(&m, pu) as u8;
        }
    }
    let neg: Vec<u8> = (0..q)
        .map(|a| (0..q).find(|&b| add[a * q + b] == 0).unwrap() as u8)
        .collect();
    // generator: x for extensions, the least primitive root for prime fields
    let gen = if ku == 1 { (pu - modulus[0] as usize) % pu } else { pu };
    let gen = if q == 2 { 1 } else { gen };
    let mut exp = vec![0u8; q - 1];
    let mut log = vec![0u16; q];
    let mut x = 1usize;
    for (i, e) in exp.iter_mut().enumerate() {
        *e = x as u8;
        assert!(
            i == 0 || x != 1,
            "modulus for GF({p}^{k}) is not primitive"
        );
        log[x] = i as u16;
        x = mul[x * q + gen] as usize;
    }
    assert_eq!(x, 1, "generator order mismatch for GF({p}^{k})");
    let mut inv = vec![0u8; q];
    for a in 1..q {
        let l = log[a] as usize;
        inv[a] = exp[(q - 1 - l) % (q - 1)];
    }
    let sigma = if k.is_multiple_of(2) {
        let e = (p as usize).pow(k / 2);
        Some(
            (0..q)
                .map(|a| {
                    if a == 0 {
                        0
                    } else {
                        exp[(log[a] as usize * e) % (q - 1)]
                    }
                })
                .collect(),
        )
    } else {
        None
    };
    Tables {
        p,
        k,
        q,
        modulus,
        add,
        mul,
        neg,
        inv,
        log,
        exp,
        sigma,
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn all_fields() -> Vec<Field> {
        let mut out = Vec::new();
        for p in [2u32, 3, 5, 7, 11, 13] {
            for k in 1..=8 {
                if let Ok(f) = Field::with_bound(p, k, MAX_ORDER) {
                    out.push(f);
                }
            }
        }
        for p in (17..=251).filter(|&p| is_prime(p)) {
            out.push(Field::with_bound(p, 1, MAX_ORDER).unwrap());
        }
        out
    }

    /// Irreducibility by brute force: no monic factor of degree <= k/2.
    fn irreducible_oracle(m: &[u8], p: usize) -> bool {
        let k = m.len() - 1;
        for d in 1..=k / 2 {
            let count = p.pow(d as u32);
            for code in 0..count {
                let mut g: Vec<usize> = digits(code, p, d);
                g.push(1);
                // long division of m by g
                let mut r: Vec<usize> = m.iter().map(|&c| c as usize).collect();
                for deg in (d..=k).rev() {
                    let c = r[deg];
                    if c == 0 {
                        continue;
                    }
                    for (i, &gi) in g.iter().enumerate().take(d + 1) {
                        let idx = deg - d + i;
                        r[idx] = (r[idx] + (p - c) * gi) % p;
                    }
                }
                if r.iter().all(|&c| c == 0) {
                    return false;
                }
            }
        }
        true
    }

    #[test]
    fn creation_errors() {
        assert_eq!(Field::new(4, 1).unwrap_err(), Error::NonPrime(4));
        assert!(matches!(Field::new(2, 7), Err(Error::OrderTooLarge { .. })));
        assert!(Field::with_bound(2, 7, 256).is_ok());
        assert!(matches!(Field::with_bound(2, 9, 1024), Err(Error::OrderTooLarge { .. })));
        assert!(matches!(Field::with_bound(17, 2, 1024), Err(Error::OrderTooLarge { .. })));
    }

    #[test]
    fn gf4_modulus_is_the_only_irreducible_quadratic() {
        let f = Field::new(2, 2).unwrap();
        let irr: Vec<Vec<u8>> = (0..4)
            .map(|c| vec![(c % 2) as u8, (c / 2) as u8, 1])
            .filter(|m| irreducible_oracle(m, 2))
            .collect();
        assert_eq!(irr, vec![vec![1, 1, 1]]);
        assert_eq!(f.modulus(), &[1, 1, 1]);
    }

    #[test]
    fn table_moduli_are_irreducible() {
        for (p, _, m) in MODULI {
            assert!(irreducible_oracle(m, *p as usize), "{m:?} over GF({p})");
        }
    }

    #[test]
    fn gf9_modulus_has_no_root() {
        let m = Field::new(3, 2).unwrap().modulus().to_vec();
        for x in 0..3usize {
            let v = (m[0] as usize + m[1] as usize * x + x * x) % 3;
            assert_ne!(v, 0);
        }
    }

    #[test]
    fn small_examples() {
        let f2 = Field::new(2, 1).unwrap();
        assert_eq!(f2.add(1, 1), 0);
        let f4 = Field::new(2, 2).unwrap();
        let w = 2; // the residue x
        assert_eq!(f4.mul(w, w), 3); // x^2 = x + 1
        let f9 = Field::new(3, 2).unwrap();
        let brute = f9.nonzero().find(|&y| f9.mul(2, y) == 1).unwrap();
        assert_eq!(brute, 2);
        assert_eq!(f9.inv(2).unwrap(), 2);
        assert_eq!(f9.inv(0), Err(Error::DivisionByZero));
    }

    #[test]
    fn involution_examples() {
        let f4 = Field::new(2, 2).unwrap();
        // Frobenius by repeated multiplication
        assert_eq!(f4.involution(2).unwrap(), f4.mul(2, 2));
        assert_eq!(f4.involution(2).unwrap(), 3);
        assert_eq!(f4.involution(1).unwrap(), 1);
        let f9 = Field::new(3, 2).unwrap();
        for x in f9.elements() {
            assert_eq!(f9.involution(f9.involution(x).unwrap()).unwrap(), x);
            assert_eq!(f9.involution(x).unwrap(), f9.mul(x, f9.mul(x, x)));
        }
        assert_eq!(Field::new(3, 1).unwrap().involution(1), Err(Error::NoInvolution));
        assert_eq!(Field::new(2, 3).unwrap().involution(1), Err(Error::NoInvolution));
    }

    #[test]
    fn trace_like_examples() {
        let f4 = Field::new(2, 2).unwrap();
        let oracle: std::collections::BTreeSet<u8> =
            f4.elements().map(|t| f4.add(t, f4.mul(t, t))).collect();
        assert_eq!(oracle.into_iter().collect::<Vec<_>>(), vec![0, 1]);
        assert_eq!(f4.trace_like_set(Involution::Frobenius), vec![0, 1]);
        let f9 = Field::new(3, 2).unwrap();
        let s = f9.trace_like_set(Involution::Frobenius);
        assert_eq!(s.len(), 3);
        for &x in &s {
            assert!(s.contains(&f9.neg(x)));
        }
        let f3 = Field::new(3, 1).unwrap();
        assert_eq!(f3.trace_like_set(Involution::Identity), vec![0]);
    }

    #[test]
    fn field_axioms_exhaustive() {
        for f in all_fields() {
            let q = f.q();
            assert_eq!(q, (f.p() as usize).pow(f.k()));
            for a in f.elements() {
                assert_eq!(f.add(a, 0), a);
                assert_eq!(f.mul(a, 1), a);
                assert_eq!(f.add(a, f.neg(a)), 0);
                if a != 0 {
                    assert_eq!(f.mul(a, f.inv(a).unwrap()), 1, "{f:?} {a}");
                }
            }
            if q <= 27 {
                for a in f.elements() {
                    for b in f.elements() {
                        assert_eq!(f.mul(a, b), f.mul(b, a));
                        for c in f.elements() {
                            assert_eq!(
                                f.mul(a, f.add(b, c)),
                                f.add(f.mul(a, b), f.mul(a, c))
                            );
                        }
                    }
                }
            }
        }
    }

    #[test]
    fn involution_is_automorphism_exhaustive() {
        for f in all_fields().into_iter().filter(|f| f.has_involution()) {
            let s = |x| f.involution(x).unwrap();
            for a in f.elements() {
                assert_eq!(s(s(a)), a);
                for b in f.elements() {
                    assert_eq!(s(f.add(a, b)), f.add(s(a), s(b)));
                    assert_eq!(s(f.mul(a, b)), f.mul(s(a), s(b)));
                }
            }
            let fixed = f.fixed_subfield(Involution::Frobenius).len();
            assert_eq!(fixed * fixed, f.q());
            let tl = f.trace_like_set(Involution::Frobenius);
            for &x in &tl {
                assert_eq!(s(x), f.neg(x));
                for &y in &tl {
                    assert!(tl.binary_search(&f.add(x, y)).is_ok());
                }
            }
        }
    }

    #[test]
    fn pow_and_log_agree() {
        for f in all_fields().into_iter().filter(|f| f.q() <= 81) {
            let g = f.generator();
            let mut x = 1;
            for i in 0..f.q() - 1 {
                assert_eq!(f.pow(g, i as u64), x);
                assert_eq!(f.log(x).unwrap(), i);
                x = f.mul(x, g);
            }
            assert_eq!(x, 1);
        }
    }
}
