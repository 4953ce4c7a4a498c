//! Permutation groups via deterministic Schreier-Sims, plus a catalog of
//! classical group orders.
//!
//! Permutations act on the right: `(a * b)[i] = b[a[i]]`, i.e. apply `a`
//! first.

use std::collections::{HashSet, VecDeque};
use std::fmt;

use num_bigint::BigUint;

use crate::error::{Error, Result};

#[derive(Clone, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct Perm(Vec<u32>);

impl fmt::Debug for Perm {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.is_identity() {
            return write!(f, "()");
        }
        let mut seen = vec![false; self.0.len()];
        for s in 0..self.0.len() {
            if seen[s] || self.0[s] as usize == s {
                continue;
            }
            write!(f, "(")?;
            let mut x = s;
            let mut first = true;
            while !seen[x] {
                seen[x] = true;
                if !first {
                    write!(f, " ")?;
                }
                write!(f, "{x}")?;
                first = false;
                x = self.0[x] as usize;
            }
            write!(f, ")")?;
        }
        Ok(())
    }
}

impl Perm {
    pub fn identity(n: usize) -> Perm {
        Perm((0..n as u32).collect())
    }

    /// Image list `i -> v[i]`; must be a bijection of `0..len`.
    pub fn from_images(v: Vec<u32>) -> Result<Perm> {
        let n = v.len();
        let mut seen = vec![false; n];
        for &x in &v {
            if x as usize >= n || seen[x as usize] {
                return Err(Error::BadDimension(format!("not a permutation of 0..{n}")));
            }
            seen[x as usize] = true;
        }
        Ok(Perm(v))
    }

    pub fn from_cycles(n: usize, cycles: &[&[u32]]) -> Result<Perm> {
        let mut v: Vec<u32> = (0..n as u32).collect();
        for c in cycles {
            for (i, &x) in c.iter().enumerate() {
                let y = c[(i + 1) % c.len()];
                if x as usize >= n || y as usize >= n {
                    return Err(Error::BadDimension(format!("cycle entry outside 0..{n}")));
                }
                v[x as usize] = y;
            }
        }
        Perm::from_images(v)
    }

    pub fn degree(&self) -> usize {
        self.0.len()
    }
    pub fn images(&self) -> &[u32] {
        &self.0
    }
    #[inline]
    pub fn image(&self, i: u32) -> u32 {
        self.0[i as usize]
    }
    pub fn is_identity(&self) -> bool {
        self.0.iter().enumerate().all(|(i, &x)| i as u32 == x)
    }

    /// `self` then `other`.
    pub fn mul(&self, other: &Perm) -> Perm {
        Perm(self.0.iter().map(|&x| other.0[x as usize]).collect())
    }

    pub fn inv(&self) -> Perm {
        let mut v = vec![0; self.0.len()];
        for (i, &x) in self.0.iter().enumerate() {
            v[x as usize] = i as u32;
        }
        Perm(v)
    }

    pub fn pow(&self, mut e: u64) -> Perm {
        let mut base = self.clone();
        let mut acc = Perm::identity(self.degree());
        while e > 0 {
            if e & 1 == 1 {
                acc = acc.mul(&base);
            }
            base = base.mul(&base);
            e >>= 1;
        }
        acc
    }

    pub fn first_moved(&self) -> Option<u32> {
        self.0.iter().enumerate().find(|(i, &x)| *i as u32 != x).map(|(i, _)| i as u32)
    }

    /// Sign of the permutation as a permutation of its domain.
    pub fn is_odd_permutation(&self) -> bool {
        let mut seen = vec![false; self.0.len()];
        let mut transpositions = 0usize;
        for s in 0..self.0.len() {
            let mut len = 0;
            let mut x = s;
            while !seen[x] {
                seen[x] = true;
                x = self.0[x] as usize;
                len += 1;
            }
            if len > 0 {
                transpositions += len - 1;
            }
        }
        transpositions % 2 == 1
    }
}

struct Level {
    point: u32,
    orbit: Vec<u32>,
    /// `transversal[b]` maps the base point to `b`.
    transversal: Vec<Option<Perm>>,
}

/// Permutation group with a base and strong generating set.
pub struct PermGroup {
    degree: usize,
    gens: Vec<Perm>,
    strong: Vec<Perm>,
    levels: Vec<Level>,
}

impl fmt::Debug for PermGroup {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "PermGroup(degree {}, order {})", self.degree, self.order())
    }
}

impl Clone for PermGroup {
    fn clone(&self) -> Self {
        let mut g = PermGroup { degree: self.degree, gens: self.gens.clone(), strong: self.strong.clone(), levels: Vec::new() };
        g.levels = self
            .levels
            .iter()
            .map(|l| Level { point: l.point, orbit: l.orbit.clone(), transversal: l.transversal.clone() })
            .collect();
        g
    }
}

impl PermGroup {
    pub fn trivial(degree: usize) -> PermGroup {
        PermGroup { degree, gens: Vec::new(), strong: Vec::new(), levels: Vec::new() }
    }

    pub fn from_generators(degree: usize, gens: &[Perm]) -> Result<PermGroup> {
        Self::with_base_prefix(degree, gens, &[])
    }

    /// Build with the given points leading the base, so that
    /// [`PermGroup::stabilizer_order`] answers pointwise-stabilizer queries.
    pub fn with_base_prefix(degree: usize, gens: &[Perm], prefix: &[u32]) -> Result<PermGroup> {
        let mut g = PermGroup::trivial(degree);
        for &p in prefix {
            if p as usize >= degree {
                return Err(Error::BadDimension(format!("base point {p} outside degree {degree}")));
            }
            if g.levels.iter().all(|l| l.point != p) {
                g.levels.push(Level { point: p, orbit: vec![p], transversal: Vec::new() });
            }
        }
        g.recompute(0, g.levels.len());
        for x in gens {
            g.add(x)?;
        }
        Ok(g)
    }

    pub fn degree(&self) -> usize {
        self.degree
    }
    pub fn generators(&self) -> &[Perm] {
        &self.gens
    }
    pub fn strong_generators(&self) -> &[Perm] {
        &self.strong
    }
    pub fn base(&self) -> Vec<u32> {
        self.levels.iter().map(|l| l.point).collect()
    }
    pub fn orbit_at(&self, level: usize) -> &[u32] {
        &self.levels[level].orbit
    }

    pub fn order(&self) -> BigUint {
        self.stabilizer_order(0)
    }

    /// Order of the pointwise stabilizer of the first `level` base points.
    pub fn stabilizer_order(&self, level: usize) -> BigUint {
        self.levels[level.min(self.levels.len())..]
            .iter()
            .fold(BigUint::from(1u32), |acc, l| acc * BigUint::from(l.orbit.len()))
    }

    fn fixes_prefix(&self, p: &Perm, upto: usize) -> bool {
        self.levels[..upto].iter().all(|l| p.image(l.point) == l.point)
    }

    fn recompute(&mut self, from: usize, to: usize) {
        for i in from..to.min(self.levels.len()) {
            let gens: Vec<&Perm> = self.strong.iter().filter(|s| self.fixes_prefix(s, i)).collect();
            let b = self.levels[i].point;
            let mut tr: Vec<Option<Perm>> = vec![None; self.degree];
            tr[b as usize] = Some(Perm::identity(self.degree));
            let mut orbit = vec![b];
            let mut k = 0;
            while k < orbit.len() {
                let x = orbit[k];
                let ux = tr[x as usize].clone().unwrap();
                for s in &gens {
                    let y = s.image(x);
                    if tr[y as usize].is_none() {
                        tr[y as usize] = Some(ux.mul(s));
                        orbit.push(y);
                    }
                }
                k += 1;
            }
            self.levels[i].orbit = orbit;
            self.levels[i].transversal = tr;
        }
    }

    /// Sift through the chain; returns the residue and the level reached.
    fn strip(&self, g: &Perm) -> (Perm, usize) {
        let mut h = g.clone();
        for (i, l) in self.levels.iter().enumerate() {
            let b = h.image(l.point);
            match &l.transversal[b as usize] {
                Some(u) => h = h.mul(&u.inv()),
                None => return (h, i),
            }
        }
        let k = self.levels.len();
        (h, k)
    }

    pub fn contains(&self, g: &Perm) -> bool {
        g.degree() == self.degree && self.strip(g).0.is_identity()
    }

    /// Add a generator and restore the BSGS; returns whether the group grew.
    pub fn add(&mut self, g: &Perm) -> Result<bool> {
        if g.degree() != self.degree {
            return Err(Error::DegreeMismatch { expected: self.degree, got: g.degree() });
        }
        let (h, j) = self.strip(g);
        if h.is_identity() {
            return Ok(false);
        }
        self.gens.push(g.clone());
        self.insert_strong(h, j);
        self.complete(j);
        Ok(true)
    }

    fn insert_strong(&mut self, h: Perm, j: usize) {
        if j == self.levels.len() {
            let p = h.first_moved().expect("non-identity");
            self.levels.push(Level { point: p, orbit: vec![p], transversal: Vec::new() });
        }
        self.strong.push(h);
        self.recompute(0, j + 1);
    }

    fn complete(&mut self, start: usize) {
        let mut i = start as isize;
        'outer: while i >= 0 {
            let lv = i as usize;
            let gens: Vec<Perm> = self.strong.iter().filter(|s| self.fixes_prefix(s, lv)).cloned().collect();
            let orbit = self.levels[lv].orbit.clone();
            for &beta in &orbit {
                let ub = self.levels[lv].transversal[beta as usize].clone().unwrap();
                for x in &gens {
                    let y = x.image(beta);
                    let uy = self.levels[lv].transversal[y as usize].as_ref().unwrap();
                    let sg = ub.mul(x).mul(&uy.inv());
                    if sg.is_identity() {
                        continue;
                    }
                    let (h, j) = self.strip(&sg);
                    if !h.is_identity() {
                        self.insert_strong(h, j);
                        i = j as isize;
                        continue 'outer;
                    }
                }
            }
            i -= 1;
        }
    }

    pub fn orbit(&self, p: u32) -> Vec<u32> {
        let mut seen = vec![false; self.degree];
        seen[p as usize] = true;
        let mut out = vec![p];
        let mut k = 0;
        while k < out.len() {
            let x = out[k];
            for s in &self.gens {
                let y = s.image(x);
                if !seen[y as usize] {
                    seen[y as usize] = true;
                    out.push(y);
                }
            }
            k += 1;
        }
        out.sort_unstable();
        out
    }

    pub fn is_transitive(&self) -> bool {
        self.degree == 0 || self.orbit(0).len() == self.degree
    }

    /// `|self| / |sub|`, after checking `sub`'s generators lie in `self`.
    pub fn index(&self, sub: &PermGroup) -> Result<BigUint> {
        if sub.degree != self.degree {
            return Err(Error::DegreeMismatch { expected: self.degree, got: sub.degree });
        }
        if !sub.gens.iter().all(|g| self.contains(g)) {
            return Err(Error::NotSubgroup);
        }
        Ok(self.order() / sub.order())
    }

    /// Whether `sub` is normalized by the generators of `self`.
    pub fn normalizes(&self, sub: &PermGroup) -> bool {
        self.gens.iter().all(|g| {
            let gi = g.inv();
            sub.gens.iter().all(|h| sub.contains(&gi.mul(h).mul(g)))
        })
    }
}

/// Builds a group together with the kernel of a homomorphism onto `Z/2`
/// given on generators (parity of a projectivity, or its type action).
/// The kernel is generated by Reidemeister-Schreier generators with coset
/// representatives `{1, t}`, `t` the first generator with flag set.
pub struct KernelBuilder {
    full: PermGroup,
    kernel: PermGroup,
    t: Option<(Perm, Perm)>,
    seen: HashSet<(Perm, bool)>,
    count: usize,
}

impl KernelBuilder {
    pub fn new(degree: usize) -> KernelBuilder {
        KernelBuilder {
            full: PermGroup::trivial(degree),
            kernel: PermGroup::trivial(degree),
            t: None,
            seen: HashSet::new(),
            count: 0,
        }
    }

    /// Add a generator with its flag; duplicates are skipped.
    pub fn add(&mut self, g: Perm, flag: bool) -> Result<()> {
        if g.degree() != self.full.degree() {
            return Err(Error::DegreeMismatch { expected: self.full.degree(), got: g.degree() });
        }
        if !self.seen.insert((g.clone(), flag)) {
            return Ok(());
        }
        self.count += 1;
        self.full.add(&g)?;
        match (&self.t, flag) {
            (_, false) => {
                self.kernel.add(&g)?;
                if let Some((t, ti)) = &self.t {
                    let c = t.mul(&g).mul(ti);
                    self.kernel.add(&c)?;
                }
            }
            (None, true) => {
                let ti = g.inv();
                let prev: Vec<Perm> = self.kernel.generators().to_vec();
                for x in prev {
                    let c = g.mul(&x).mul(&ti);
                    self.kernel.add(&c)?;
                }
                let sq = g.mul(&g);
                self.kernel.add(&sq)?;
                self.t = Some((g, ti));
            }
            (Some((t, ti)), true) => {
                let a = g.mul(ti);
                let b = t.mul(&g);
                self.kernel.add(&a)?;
                self.kernel.add(&b)?;
            }
        }
        Ok(())
    }

    pub fn full(&self) -> &PermGroup {
        &self.full
    }
    pub fn kernel(&self) -> &PermGroup {
        &self.kernel
    }
    pub fn has_flagged(&self) -> bool {
        self.t.is_some()
    }
    /// Distinct generators seen.
    pub fn generator_count(&self) -> usize {
        self.count
    }
    pub fn into_parts(self) -> (PermGroup, PermGroup) {
        (self.full, self.kernel)
    }
}

/// The subgroup of flag-0 words in generators carrying flags.
pub fn even_subgroup(degree: usize, gens: &[(Perm, bool)]) -> Result<PermGroup> {
    let mut b = KernelBuilder::new(degree);
    for (g, f) in gens {
        b.add(g.clone(), *f)?;
    }
    Ok(b.into_parts().1)
}

/// All elements of the group, by breadth-first closure; `None` past `limit`.
pub fn closure(degree: usize, gens: &[Perm], limit: usize) -> Option<Vec<Perm>> {
    let id = Perm::identity(degree);
    let mut seen: HashSet<Perm> = HashSet::new();
    seen.insert(id.clone());
    let mut queue = VecDeque::from([id]);
    while let Some(x) = queue.pop_front() {
        for g in gens {
            let y = x.mul(g);
            if seen.insert(y.clone()) {
                if seen.len() > limit {
                    return None;
                }
                queue.push_back(y);
            }
        }
    }
    let mut v: Vec<Perm> = seen.into_iter().collect();
    v.sort();
    Some(v)
}

/// Classical group families with closed-form orders. `q` is a field order
/// throughout; orthogonal dimensions are vector dimensions.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum Family {
    Sym(u32),
    Pgl { r: u32, q: u64 },
    Psl { r: u32, q: u64 },
    /// Matrices with determinant in the subfield `GF(q0)`, modulo scalars.
    PslSub { r: u32, q: u64, q0: u64 },
    Psp { n: u32, q: u64 },
    /// `SO_n(q)`, `n` odd.
    SoOdd { n: u32, q: u64 },
    /// `Omega_n(q)`, `n` odd.
    OmegaOdd { n: u32, q: u64 },
    /// `GO^+-_n(q)`, `n` even.
    Go { n: u32, q: u64, plus: bool },
    /// `POmega^+-_n(q)`, `n` even.
    POmega { n: u32, q: u64, plus: bool },
}

impl fmt::Display for Family {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let sg = |p: bool| if p { "+" } else { "-" };
        match *self {
            Family::Sym(n) => write!(f, "Sym({n})"),
            Family::Pgl { r, q } => write!(f, "PGL({r},{q})"),
            Family::Psl { r, q } => write!(f, "PSL({r},{q})"),
            Family::PslSub { r, q, q0 } => write!(f, "PSL({r},{q};{q0})"),
            Family::Psp { n, q } => write!(f, "PSp({n},{q})"),
            Family::SoOdd { n, q } => write!(f, "SO({n},{q})"),
            Family::OmegaOdd { n, q } => write!(f, "Omega({n},{q})"),
            Family::Go { n, q, plus } => write!(f, "GO{}({n},{q})", sg(plus)),
            Family::POmega { n, q, plus } => write!(f, "POmega{}({n},{q})", sg(plus)),
        }
    }
}

impl Family {
    /// Parse a family name with parameters, e.g. `("PGL", &[3, 2])`.
    pub fn from_name(name: &str, params: &[u64]) -> Result<Family> {
        let p = |i: usize| params.get(i).copied().ok_or_else(|| Error::UnknownFamily(format!("{name}: missing parameter")));
        Ok(match name {
            "Sym" => Family::Sym(p(0)? as u32),
            "PGL" => Family::Pgl { r: p(0)? as u32, q: p(1)? },
            "PSL" => Family::Psl { r: p(0)? as u32, q: p(1)? },
            "PSLSub" => Family::PslSub { r: p(0)? as u32, q: p(1)?, q0: p(2)? },
            "PSp" => Family::Psp { n: p(0)? as u32, q: p(1)? },
            "SO" => Family::SoOdd { n: p(0)? as u32, q: p(1)? },
            "Omega" => Family::OmegaOdd { n: p(0)? as u32, q: p(1)? },
            "GO+" | "GO-" => Family::Go { n: p(0)? as u32, q: p(1)?, plus: name.ends_with('+') },
            "POmega+" | "POmega-" => Family::POmega { n: p(0)? as u32, q: p(1)?, plus: name.ends_with('+') },
            other => return Err(Error::UnknownFamily(other.to_string())),
        })
    }
}

fn big(x: u64) -> BigUint {
    BigUint::from(x)
}

fn gcd(a: u64, b: u64) -> u64 {
    if b == 0 {
        a
    } else {
        gcd(b, a % b)
    }
}

fn qpow(q: u64, e: u32) -> BigUint {
    big(q).pow(e)
}

/// `prod_{i in range} (q^{step*i} - 1)`
fn prod_minus_one(q: u64, from: u32, to: u32, step: u32) -> BigUint {
    (from..=to).fold(big(1), |acc, i| acc * (qpow(q, step * i) - big(1)))
}

/// `|SL_r(q)|`
pub fn sl_order(r: u32, q: u64) -> BigUint {
    qpow(q, r * (r - 1) / 2) * prod_minus_one(q, 2, r, 1)
}

pub fn catalog_order(fam: &Family) -> Result<BigUint> {
    let bad = |s: &str| Err(Error::UnknownFamily(format!("{fam}: {s}")));
    Ok(match *fam {
        Family::Sym(n) => (1..=n as u64).fold(big(1), |a, i| a * big(i)),
        Family::Pgl { r, q } => {
            if r == 0 || q < 2 {
                return bad("bad parameters");
            }
            sl_order(r, q)
        }
        Family::Psl { r, q } => {
            if r == 0 || q < 2 {
                return bad("bad parameters");
            }
            sl_order(r, q) / big(gcd(r as u64, q - 1))
        }
        Family::PslSub { r, q, q0 } => {
            if r == 0 || q0 < 2 || (q - 1) % (q0 - 1) != 0 {
                return bad("GF(q0) is not a subfield");
            }
            // scalars l with l^r in GF(q0)^*: l^{r(q0-1)} = 1
            let centre = gcd(r as u64 * (q0 - 1), q - 1);
            sl_order(r, q) * big(q0 - 1) / big(centre)
        }
        Family::Psp { n, q } => {
            if n % 2 != 0 || n == 0 {
                return bad("odd dimension");
            }
            let m = n / 2;
            qpow(q, m * m) * prod_minus_one(q, 1, m, 2) / big(gcd(2, q - 1))
        }
        Family::SoOdd { n, q } => {
            if n % 2 == 0 {
                return bad("even dimension");
            }
            let m = n / 2;
            qpow(q, m * m) * prod_minus_one(q, 1, m, 2)
        }
        Family::OmegaOdd { n, q } => {
            if n % 2 == 0 {
                return bad("even dimension");
            }
            let m = n / 2;
            qpow(q, m * m) * prod_minus_one(q, 1, m, 2) / big(gcd(2, q - 1))
        }
        Family::Go { n, q, plus } => {
            if n % 2 != 0 || n == 0 {
                return bad("odd dimension");
            }
            let m = n / 2;
            let qm = qpow(q, m);
            let eps = if plus { qm - big(1) } else { qm + big(1) };
            big(2) * qpow(q, m * (m - 1)) * eps * prod_minus_one(q, 1, m - 1, 2)
        }
        Family::POmega { n, q, plus } => {
            if n % 2 != 0 || n == 0 {
                return bad("odd dimension");
            }
            let m = n / 2;
            let qm = q.pow(m);
            let eps = if plus { qm - 1 } else { qm + 1 };
            let d = gcd(4, eps);
            qpow(q, m * (m - 1)) * big(eps) * prod_minus_one(q, 1, m - 1, 2) / big(d)
        }
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    fn p(v: &[u32]) -> Perm {
        Perm::from_images(v.to_vec()).unwrap()
    }

    #[test]
    fn perm_basics() {
        let a = Perm::from_cycles(4, &[&[0, 1]]).unwrap();
        let b = Perm::from_cycles(4, &[&[0, 1, 2, 3]]).unwrap();
        // apply a then b: 0 -> 1 -> 2
        assert_eq!(a.mul(&b).image(0), 2);
        assert!(a.mul(&a).is_identity());
        assert_eq!(b.pow(4), Perm::identity(4));
        assert_eq!(b.mul(&b.inv()), Perm::identity(4));
        assert!(Perm::from_images(vec![0, 0]).is_err());
        assert_eq!(format!("{b:?}"), "(0 1 2 3)");
        assert!(a.is_odd_permutation() && !b.mul(&b).is_odd_permutation());
    }

    #[test]
    fn small_orders() {
        let t = Perm::from_cycles(2, &[&[0, 1]]).unwrap();
        assert_eq!(PermGroup::from_generators(2, &[t]).unwrap().order(), big(2));
        let a = Perm::from_cycles(4, &[&[0, 1]]).unwrap();
        let b = Perm::from_cycles(4, &[&[0, 1, 2, 3]]).unwrap();
        let g = PermGroup::from_generators(4, &[a.clone(), b.clone()]).unwrap();
        assert_eq!(g.order(), big(24));
        assert_eq!(closure(4, &[a, b], 100).unwrap().len(), 24);
        assert!(PermGroup::from_generators(3, &[Perm::identity(4)]).is_err());
    }

    #[test]
    fn index_examples() {
        let s3 = PermGroup::from_generators(3, &[p(&[1, 0, 2]), p(&[1, 2, 0])]).unwrap();
        let c3 = PermGroup::from_generators(3, &[p(&[1, 2, 0])]).unwrap();
        assert_eq!(s3.index(&s3).unwrap(), big(1));
        assert_eq!(s3.index(&c3).unwrap(), big(2));
        assert_eq!(c3.index(&s3), Err(Error::NotSubgroup));
    }

    #[test]
    fn base_prefix_stabilizers() {
        let a = Perm::from_cycles(5, &[&[0, 1]]).unwrap();
        let b = Perm::from_cycles(5, &[&[0, 1, 2, 3, 4]]).unwrap();
        let g = PermGroup::with_base_prefix(5, &[a, b], &[3, 1]).unwrap();
        assert_eq!(g.base()[..2], [3, 1]);
        assert_eq!(g.order(), big(120));
        assert_eq!(g.stabilizer_order(1), big(24));
        assert_eq!(g.stabilizer_order(2), big(6));
    }

    #[test]
    fn kernel_builder_parity() {
        // Sym(4) with sign as the flag: kernel is Alt(4)
        let a = Perm::from_cycles(4, &[&[0, 1]]).unwrap();
        let b = Perm::from_cycles(4, &[&[0, 1, 2, 3]]).unwrap();
        let c = Perm::from_cycles(4, &[&[0, 1, 2]]).unwrap();
        let k = even_subgroup(4, &[(c.clone(), false), (a, true), (b, true)]).unwrap();
        assert_eq!(k.order(), big(12));
        // all flags clear: same group
        let k2 = even_subgroup(4, &[(c.clone(), false)]).unwrap();
        assert_eq!(k2.order(), big(3));
        // the same permutation with both flags makes the kernel everything
        let k3 = even_subgroup(4, &[(c.clone(), false), (c.clone(), true)]).unwrap();
        assert_eq!(k3.order(), big(3));
    }

    #[test]
    fn catalog_examples() {
        assert_eq!(catalog_order(&Family::Pgl { r: 3, q: 2 }).unwrap(), big(168));
        assert_eq!(catalog_order(&Family::Sym(6)).unwrap(), big(720));
        assert_eq!(catalog_order(&Family::Psp { n: 4, q: 3 }).unwrap(), big(25920));
        assert_eq!(catalog_order(&Family::Pgl { r: 3, q: 3 }).unwrap(), big(5616));
        assert_eq!(catalog_order(&Family::Psl { r: 3, q: 4 }).unwrap(), big(20160));
        assert_eq!(catalog_order(&Family::PslSub { r: 3, q: 4, q0: 2 }).unwrap(), big(20160));
        assert_eq!(catalog_order(&Family::Pgl { r: 2, q: 3 }).unwrap(), big(24));
        assert_eq!(catalog_order(&Family::SoOdd { n: 5, q: 3 }).unwrap(), big(51840));
        assert_eq!(catalog_order(&Family::Go { n: 6, q: 2, plus: false }).unwrap(), big(51840));
        assert_eq!(catalog_order(&Family::POmega { n: 6, q: 2, plus: false }).unwrap(), big(25920));
        assert_eq!(catalog_order(&Family::POmega { n: 6, q: 2, plus: true }).unwrap(), big(20160));
        assert!(Family::from_name("E8", &[2]).is_err());
        assert_eq!(Family::from_name("PGL", &[3, 2]).unwrap(), Family::Pgl { r: 3, q: 2 });
    }

    /// `|PGL_3(2)|` by enumerating invertible matrices over GF(2).
    #[test]
    fn pgl32_by_matrix_enumeration() {
        let mut count = 0;
        for m in 0u32..512 {
            let bit = |i: u32| (m >> i) & 1;
            let det = (bit(0) * ((bit(4) * bit(8)) ^ (bit(5) * bit(7))))
                ^ (bit(1) * ((bit(3) * bit(8)) ^ (bit(5) * bit(6))))
                ^ (bit(2) * ((bit(3) * bit(7)) ^ (bit(4) * bit(6))));
            count += det;
        }
        assert_eq!(count, 168);
    }

    proptest! {
        #[test]
        fn bsgs_matches_closure_and_words(seed in any::<u64>(), ngens in 1usize..4) {
            let n = 7;
            let mut s = seed;
            let mut next = || { s ^= s << 13; s ^= s >> 7; s ^= s << 17; s };
            let gens: Vec<Perm> = (0..ngens).map(|_| {
                let mut v: Vec<u32> = (0..n as u32).collect();
                for i in (1..n).rev() { let j = (next() % (i as u64 + 1)) as usize; v.swap(i, j); }
                Perm::from_images(v).unwrap()
            }).collect();
            let g = PermGroup::from_generators(n, &gens).unwrap();
            let all = closure(n, &gens, 10_000).unwrap();
            prop_assert_eq!(g.order(), big(all.len() as u64));
            for x in all.iter().take(50) {
                prop_assert!(g.contains(x));
            }
            let mut w = Perm::identity(n);
            for _ in 0..20 {
                w = w.mul(&gens[(next() % ngens as u64) as usize]);
                prop_assert!(g.contains(&w));
            }
            let flags: Vec<(Perm, bool)> = gens.iter().map(|x| (x.clone(), x.is_odd_permutation())).collect();
            let k = even_subgroup(n, &flags).unwrap();
            let idx = g.index(&k).unwrap();
            prop_assert!(idx == big(1) || idx == big(2));
            prop_assert!(g.normalizes(&k));
            let evens = all.iter().filter(|x| !x.is_odd_permutation()).count();
            prop_assert_eq!(k.order(), big(evens as u64));
        }
    }
}
