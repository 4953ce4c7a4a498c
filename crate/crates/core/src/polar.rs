//! Finite polar spaces as concrete incidence structures.
//!
//! Singular subspaces are grouped by vector dimension ("level"): level 1
//! holds the points and level `r` the maximal singular subspaces. Levels
//! and incidences are built lazily and cached.

use std::collections::{HashMap, HashSet};
use std::sync::OnceLock;

use crate::error::{Error, Result};
use crate::forms::FormSpec;
use crate::gf::{Elem, Field};
use crate::linalg::{enumerate_subspaces, normalize, null_space, projective_points, rank, Subspace};

pub const DEFAULT_POINT_CAP: usize = 5000;

/// Largest projective point count scanned while building the point set.
const SCAN_CAP: usize = 2_000_000;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum Side {
    Upper,
    Lower,
}

struct Level {
    subs: Vec<Subspace>,
    index: HashMap<Subspace, u32>,
}

pub struct PolarSpace {
    spec: FormSpec,
    field: Field,
    points: Vec<Vec<Elem>>,
    collinear: Vec<Vec<u64>>,
    levels: Vec<OnceLock<Level>>,
    down: Vec<OnceLock<Vec<Vec<u32>>>>,
    up: Vec<OnceLock<Vec<Vec<u32>>>>,
    pq_mismatches: usize,
}

impl std::fmt::Debug for PolarSpace {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        write!(f, "PolarSpace({:?}, {} points)", self.spec, self.points.len())
    }
}

impl PolarSpace {
    pub fn build(spec: FormSpec) -> Result<PolarSpace> {
        Self::build_with_cap(spec, DEFAULT_POINT_CAP)
    }

    pub fn build_with_cap(spec: FormSpec, cap: usize) -> Result<PolarSpace> {
        let field = spec.field().clone();
        let n = spec.n();
        let q = field.q() as f64;
        let scan = (q.powi(n as i32) - 1.0) / (q - 1.0);
        if scan > SCAN_CAP as f64 {
            return Err(Error::TooLarge { what: "projective points", count: scan as usize, cap: SCAN_CAP });
        }
        let mut points = Vec::new();
        let mut pq_mismatches = 0;
        for v in projective_points(&field, n) {
            let is_pt = spec.is_point(&v);
            if spec.kind() == crate::forms::Kind::Hermitian && is_pt != spec.pseudo_quadratic_vanishes(&v) {
                pq_mismatches += 1;
            }
            if is_pt {
                points.push(v);
                if points.len() > cap {
                    return Err(Error::TooLarge { what: "points", count: points.len(), cap });
                }
            }
        }
        let np = points.len();
        let words = np.div_ceil(64);
        let mut collinear = vec![vec![0u64; words]; np];
        let grams: Vec<Vec<Elem>> = points.iter().map(|p| spec.gram_row(p)).collect();
        for i in 0..np {
            for j in i..np {
                let v = crate::linalg::dot(&field, &grams[i], &points[j]);
                if v == 0 {
                    collinear[i][j / 64] |= 1 << (j % 64);
                    collinear[j][i / 64] |= 1 << (i % 64);
                }
            }
        }
        let r = spec.rank();
        Ok(PolarSpace {
            spec,
            field,
            points,
            collinear,
            levels: (0..=r).map(|_| OnceLock::new()).collect(),
            down: (0..=r).map(|_| OnceLock::new()).collect(),
            up: (0..=r).map(|_| OnceLock::new()).collect(),
            pq_mismatches,
        })
    }

    pub fn spec(&self) -> &FormSpec {
        &self.spec
    }
    pub fn field(&self) -> &Field {
        &self.field
    }
    pub fn rank(&self) -> usize {
        self.spec.rank()
    }
    pub fn n(&self) -> usize {
        self.spec.n()
    }
    /// Points as normalized vectors, in canonical order.
    pub fn point_vectors(&self) -> &[Vec<Elem>] {
        &self.points
    }
    pub fn num_points(&self) -> usize {
        self.points.len()
    }
    /// Points where `f(v,v) = 0` and the pseudo-quadratic condition disagree.
    /// Always zero over finite fields; kept as a runtime check.
    pub fn pseudo_quadratic_mismatches(&self) -> usize {
        self.pq_mismatches
    }

    pub fn collinear(&self, i: usize, j: usize) -> bool {
        self.collinear[i][j / 64] >> (j % 64) & 1 == 1
    }

    /// Index of the point spanned by `v`.
    pub fn point_index(&self, v: &[Elem]) -> Option<u32> {
        let mut w = v.to_vec();
        if !normalize(&self.field, &mut w) {
            return None;
        }
        self.points.binary_search(&w).ok().map(|i| i as u32)
    }

    fn level(&self, k: usize) -> &Level {
        self.levels[k].get_or_init(|| {
            let subs: Vec<Subspace> = if k == 1 {
                self.points.iter().map(|p| Subspace::point(&self.field, p)).collect()
            } else {
                let prev = self.level(k - 1);
                let words = self.collinear.first().map_or(0, |c| c.len());
                let mut set = HashSet::new();
                for s in &prev.subs {
                    let mut common = vec![!0u64; words];
                    let mut own = Vec::with_capacity(s.dim());
                    for row in s.rows() {
                        let i = self.point_index(row).expect("basis row is a point") as usize;
                        own.push(i);
                        for (c, w) in common.iter_mut().zip(&self.collinear[i]) {
                            *c &= w;
                        }
                    }
                    for (wi, &word) in common.iter().enumerate() {
                        let mut bits = word;
                        while bits != 0 {
                            let b = bits.trailing_zeros() as usize;
                            bits &= bits - 1;
                            let j = wi * 64 + b;
                            if j >= self.points.len() || own.contains(&j) {
                                continue;
                            }
                            if s.contains_vec(&self.field, &self.points[j]) {
                                continue;
                            }
                            set.insert(s.join_vec(&self.field, &self.points[j]));
                        }
                    }
                }
                let mut v: Vec<Subspace> = set.into_iter().collect();
                v.sort();
                v
            };
            let index = subs.iter().enumerate().map(|(i, s)| (s.clone(), i as u32)).collect();
            Level { subs, index }
        })
    }

    /// Singular subspaces of vector dimension `k`, canonically ordered.
    /// Level 0 is the zero subspace; levels above the rank are empty.
    pub fn singular_subspaces(&self, k: usize) -> Vec<Subspace> {
        match k {
            0 => vec![Subspace::zero(self.n())],
            k if k > self.rank() => Vec::new(),
            k => self.level(k).subs.clone(),
        }
    }

    /// Borrowed level list for `1 <= k <= rank`.
    pub fn level_subspaces(&self, k: usize) -> &[Subspace] {
        &self.level(k).subs
    }

    pub fn level_len(&self, k: usize) -> usize {
        self.level(k).subs.len()
    }

    pub fn subspace(&self, k: usize, i: u32) -> &Subspace {
        &self.level(k).subs[i as usize]
    }

    /// Level index of a singular subspace of dimension `1..=rank`.
    pub fn index_of(&self, s: &Subspace) -> Option<u32> {
        let k = s.dim();
        if k == 0 || k > self.rank() {
            return None;
        }
        self.level(k).index.get(s).copied()
    }

    /// Level `k-1` members contained in member `i` of level `k`.
    pub fn down(&self, k: usize, i: u32) -> &[u32] {
        let table = self.down[k].get_or_init(|| {
            if k <= 1 {
                return vec![Vec::new(); self.level_len(k.max(1))];
            }
            let lower = self.level(k - 1);
            self.level(k)
                .subs
                .iter()
                .map(|s| {
                    let mut v: Vec<u32> = enumerate_subspaces(&self.field, s, k - 1)
                        .iter()
                        .map(|t| lower.index[t])
                        .collect();
                    v.sort_unstable();
                    v
                })
                .collect()
        });
        &table[i as usize]
    }

    /// Level `k+1` members containing member `i` of level `k`.
    pub fn up(&self, k: usize, i: u32) -> &[u32] {
        let table = self.up[k].get_or_init(|| {
            let mut t = vec![Vec::new(); self.level_len(k)];
            if k < self.rank() {
                for j in 0..self.level_len(k + 1) as u32 {
                    for &x in self.down(k + 1, j) {
                        t[x as usize].push(j);
                    }
                }
            }
            t
        });
        &table[i as usize]
    }

    /// Neighbours in the `s`-space graph: for non-maximal levels, members
    /// sharing a common level-`k+1` member; for maximals, members meeting
    /// in a common submaximal.
    pub fn gamma_neighbours(&self, k: usize, i: u32) -> Vec<u32> {
        let mut out = Vec::new();
        if k < self.rank() {
            for &y in self.up(k, i) {
                out.extend(self.down(k + 1, y).iter().copied().filter(|&x| x != i));
            }
        } else if k > 1 {
            for &y in self.down(k, i) {
                out.extend(self.up(k - 1, y).iter().copied().filter(|&x| x != i));
            }
        }
        out.sort_unstable();
        out.dedup();
        out
    }

    fn check_ambient(&self, s: &Subspace) -> Result<()> {
        if s.ambient() != self.n() {
            Err(Error::DimensionMismatch { expected: self.n(), got: s.ambient() })
        } else {
            Ok(())
        }
    }

    /// `f(b_j, x_i)` for bases of `b` and `x`.
    fn pairing(&self, b: &Subspace, x: &Subspace) -> Vec<Vec<Elem>> {
        b.rows()
            .map(|br| {
                let g = self.spec.gram_row(br);
                x.rows().map(|xr| crate::linalg::dot(&self.field, &g, xr)).collect()
            })
            .collect()
    }

    /// `X ∩ B^⊥`.
    pub fn meet_perp(&self, x: &Subspace, b: &Subspace) -> Subspace {
        if b.is_zero() || x.is_zero() {
            return x.clone();
        }
        let m = self.pairing(b, x);
        let coeffs = null_space(&self.field, x.dim(), &m).expect("pairing dims");
        let rows: Vec<Vec<Elem>> = coeffs.rows().map(|c| x.combine(&self.field, c)).collect();
        Subspace::from_rows(&self.field, self.n(), &rows).expect("combination dims")
    }

    /// No point of `u` is collinear with all of `v`.
    pub fn is_opposite(&self, u: &Subspace, v: &Subspace) -> Result<bool> {
        self.check_ambient(u)?;
        self.check_ambient(v)?;
        if u.dim() != v.dim() {
            return Err(Error::DimensionMismatch { expected: u.dim(), got: v.dim() });
        }
        Ok(self.opposite_unchecked(u, v))
    }

    pub(crate) fn opposite_unchecked(&self, u: &Subspace, v: &Subspace) -> bool {
        if u.dim() == 0 {
            return true;
        }
        let m = self.pairing(v, u);
        rank(&self.field, u.dim(), &m) == u.dim()
    }

    /// `S^⊥ ∩ V` for `S ⊆ U`, with `U` and `V` opposite.
    pub fn project_lower(&self, u: &Subspace, v: &Subspace, s: &Subspace) -> Result<Subspace> {
        if !self.is_opposite(u, v)? {
            return Err(Error::NotOpposite);
        }
        self.check_ambient(s)?;
        if !u.contains_subspace(&self.field, s) {
            return Err(Error::NotContained);
        }
        Ok(self.meet_perp(v, s))
    }

    /// `<V, X ∩ V^⊥>` for a singular `X ⊋ U`, with `U` and `V` opposite.
    pub fn project_upper(&self, u: &Subspace, v: &Subspace, x: &Subspace) -> Result<Subspace> {
        if !self.is_opposite(u, v)? {
            return Err(Error::NotOpposite);
        }
        self.check_ambient(x)?;
        if u.dim() + 1 > self.rank() {
            return Err(Error::BadDimension(format!(
                "upper residue of a maximal subspace (dim {}) is empty",
                u.dim()
            )));
        }
        if x.dim() <= u.dim() || x.dim() > self.rank() || !self.spec.is_singular(x) {
            return Err(Error::BadDimension(format!(
                "expected a singular subspace of dim {}..={}, got dim {}",
                u.dim() + 1,
                self.rank(),
                x.dim()
            )));
        }
        if !x.contains_subspace(&self.field, u) {
            return Err(Error::NotContained);
        }
        Ok(self.upper_image(v, x))
    }

    pub(crate) fn upper_image(&self, v: &Subspace, x: &Subspace) -> Subspace {
        self.meet_perp(x, v).join(&self.field, v).expect("same ambient")
    }

    /// Residue elements of a singular subspace as `(level, index)` pairs in
    /// canonical order.
    pub fn residue_elements(&self, u: &Subspace, side: Side) -> Result<Vec<(u8, u32)>> {
        self.check_ambient(u)?;
        let k = u.dim();
        if k > self.rank() || !self.spec.is_singular(u) {
            return Err(Error::BadDimension(format!("not a singular subspace: dim {k}")));
        }
        let mut out = Vec::new();
        match side {
            Side::Upper => {
                if k == self.rank() {
                    return Ok(out);
                }
                let mut frontier: Vec<u32> = if k == 0 {
                    (0..self.level_len(1) as u32).collect()
                } else {
                    let i = self.index_of(u).ok_or_else(|| Error::BadDimension("unknown subspace".into()))?;
                    self.up(k, i).to_vec()
                };
                for lvl in k + 1..=self.rank() {
                    out.extend(frontier.iter().map(|&i| (lvl as u8, i)));
                    if lvl == self.rank() {
                        break;
                    }
                    let mut next: Vec<u32> = frontier.iter().flat_map(|&i| self.up(lvl, i).iter().copied()).collect();
                    next.sort_unstable();
                    next.dedup();
                    frontier = next;
                }
            }
            Side::Lower => {
                for lvl in 1..k {
                    let mut v: Vec<u32> = enumerate_subspaces(&self.field, u, lvl)
                        .iter()
                        .map(|s| self.index_of(s).expect("subspace of a singular subspace"))
                        .collect();
                    v.sort_unstable();
                    out.extend(v.into_iter().map(|i| (lvl as u8, i)));
                }
            }
        }
        Ok(out)
    }

    /// The residue of `u` with its elements and chambers.
    pub fn residue(&self, u: &Subspace, side: Side) -> Result<Residue> {
        let elements = self.residue_elements(u, side)?;
        let lvls: Vec<u8> = {
            let mut l: Vec<u8> = elements.iter().map(|e| e.0).collect();
            l.dedup();
            l
        };
        let mut chambers = Vec::new();
        if let Some(&first) = lvls.first() {
            let local = |e: (u8, u32)| elements.binary_search(&e).ok().map(|i| i as u32);
            let mut stack: Vec<Vec<u32>> = elements
                .iter()
                .enumerate()
                .filter(|(_, e)| e.0 == first)
                .map(|(i, _)| vec![i as u32])
                .collect();
            stack.reverse();
            while let Some(chain) = stack.pop() {
                if chain.len() == lvls.len() {
                    chambers.push(chain);
                    continue;
                }
                let (lvl, idx) = elements[*chain.last().unwrap() as usize];
                let mut nexts: Vec<u32> = self
                    .up(lvl as usize, idx)
                    .iter()
                    .filter_map(|&j| local((lvl + 1, j)))
                    .collect();
                nexts.sort_unstable();
                for &nx in nexts.iter().rev() {
                    let mut c = chain.clone();
                    c.push(nx);
                    stack.push(c);
                }
            }
            chambers.sort();
        }
        let chamber_index = chambers.iter().enumerate().map(|(i, c)| (c.clone(), i as u32)).collect();
        Ok(Residue { node: u.clone(), side, elements, levels: lvls, chambers, chamber_index })
    }

    /// Whether `x^⊥` meets every line and is a proper subspace of the point
    /// set, checked for point `x`.
    pub fn point_perp_is_hyperplane(&self, x: usize) -> bool {
        let lines = self.level_len(2);
        let inset = |p: u32| self.collinear(x, p as usize);
        for l in 0..lines as u32 {
            let pts = self.down(2, l);
            let c = pts.iter().filter(|&&p| inset(p)).count();
            if c == 0 || (c >= 2 && c < pts.len()) {
                return false;
            }
        }
        (0..self.num_points()).any(|p| !self.collinear(x, p))
    }
}

/// A residue with canonically ordered elements and chambers.
#[derive(Debug, Clone)]
pub struct Residue {
    node: Subspace,
    side: Side,
    elements: Vec<(u8, u32)>,
    levels: Vec<u8>,
    chambers: Vec<Vec<u32>>,
    chamber_index: HashMap<Vec<u32>, u32>,
}

impl Residue {
    pub fn node(&self) -> &Subspace {
        &self.node
    }
    pub fn side(&self) -> Side {
        self.side
    }
    /// Elements as `(level, index)` pairs in the space's level lists.
    pub fn elements(&self) -> &[(u8, u32)] {
        &self.elements
    }
    /// Levels occurring in the residue, ascending.
    pub fn levels(&self) -> &[u8] {
        &self.levels
    }
    pub fn local_index(&self, e: (u8, u32)) -> Option<u32> {
        self.elements.binary_search(&e).ok().map(|i| i as u32)
    }
    /// Chambers as ascending lists of local element indices.
    pub fn chambers(&self) -> &[Vec<u32>] {
        &self.chambers
    }
    pub fn chamber_of(&self, c: &[u32]) -> Option<u32> {
        self.chamber_index.get(c).copied()
    }
    /// Local indices of the residue's points (its lowest level).
    pub fn points(&self) -> Vec<u32> {
        self.of_level_rank(0)
    }
    /// Local indices of the residue's lines (its second level).
    pub fn lines(&self) -> Vec<u32> {
        self.of_level_rank(1)
    }
    fn of_level_rank(&self, r: usize) -> Vec<u32> {
        match self.levels.get(r) {
            Some(&l) => (0..self.elements.len() as u32).filter(|&i| self.elements[i as usize].0 == l).collect(),
            None => Vec::new(),
        }
    }

    /// Local point indices on a residue line.
    pub fn points_on(&self, space: &PolarSpace, line: u32) -> Vec<u32> {
        let (lvl, idx) = self.elements[line as usize];
        space
            .down(lvl as usize, idx)
            .iter()
            .filter_map(|&j| self.local_index((lvl - 1, j)))
            .collect()
    }

    /// Whether the point set `s` (local indices) is a subspace of the
    /// residue meeting every residue line.
    pub fn geometric_hyperplane_check(&self, space: &PolarSpace, s: &[u32]) -> bool {
        let set: HashSet<u32> = s.iter().copied().collect();
        let pts: HashSet<u32> = self.points().into_iter().collect();
        if !set.iter().all(|p| pts.contains(p)) {
            return false;
        }
        for l in self.lines() {
            let on = self.points_on(space, l);
            let c = on.iter().filter(|p| set.contains(p)).count();
            if c == 0 || (c >= 2 && c < on.len()) {
                return false;
            }
        }
        true
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::forms::Kind;
    use crate::linalg::gaussian_binomial;

    fn space(kind: Kind, r: usize, q: u64, c: usize) -> PolarSpace {
        PolarSpace::build(FormSpec::from_params(kind, r, q, c).unwrap()).unwrap()
    }

    fn brute_singular(s: &PolarSpace, k: usize) -> Vec<Subspace> {
        let amb = Subspace::full(s.n());
        enumerate_subspaces(s.field(), &amb, k).into_iter().filter(|x| s.spec().is_singular(x)).collect()
    }

    #[test]
    fn point_counts() {
        let w = space(Kind::Symplectic, 3, 2, 0);
        assert_eq!(w.num_points() as u128, gaussian_binomial(6, 1, 2));
        assert_eq!(w.num_points(), 63);
        // exhaustive zero sets of the standard equations
        let par = space(Kind::Quadratic, 3, 3, 1);
        let spec = par.spec();
        let direct = projective_points(spec.field(), 7).iter().filter(|v| spec.eval_quadratic(v).unwrap() == 0).count();
        assert_eq!(par.num_points(), direct);
        assert_eq!(direct, 364);
        let ell = space(Kind::Quadratic, 3, 2, 2);
        assert_eq!(ell.num_points(), 119);
        // (q^{2r-1}+1)(q^{2r}-1)/(q^2-1) for H(2r-1, q^2)
        assert_eq!(space(Kind::Hermitian, 3, 2, 0).num_points(), 33 * 63 / 3);
        assert_eq!(space(Kind::Hermitian, 3, 2, 0).pseudo_quadratic_mismatches(), 0);
    }

    #[test]
    fn levels_match_brute_force() {
        for (kind, r, q, c) in [
            (Kind::Symplectic, 2, 2, 0),
            (Kind::Symplectic, 2, 3, 0),
            (Kind::Quadratic, 2, 2, 2),
            (Kind::Hermitian, 2, 2, 0),
            (Kind::Quadratic, 2, 3, 1),
        ] {
            let s = space(kind, r, q, c);
            for k in 1..=r {
                assert_eq!(s.singular_subspaces(k), brute_singular(&s, k), "{kind:?} {k}");
            }
            assert!(s.singular_subspaces(r + 1).is_empty());
        }
        assert_eq!(space(Kind::Symplectic, 2, 2, 0).level_len(2), 15);
    }

    #[test]
    fn thick_and_perp_hyperplanes() {
        let w = space(Kind::Symplectic, 3, 2, 0);
        for l in 0..w.level_len(2) as u32 {
            assert!(w.down(2, l).len() >= 3);
        }
        // every submaximal (line) in at least 3 maximal planes
        for l in 0..w.level_len(2) as u32 {
            assert!(w.up(2, l).len() >= 3);
        }
        for x in [0, 17, 62] {
            assert!(w.point_perp_is_hyperplane(x));
        }
        let h = space(Kind::Quadratic, 3, 2, 2);
        assert!(h.point_perp_is_hyperplane(5));
    }

    #[test]
    fn opposition_examples() {
        let w = space(Kind::Symplectic, 3, 2, 0);
        let spec = w.spec().clone();
        let m1 = spec.standard_subspace(3);
        let m2 = spec.standard_opposite(3);
        assert!(w.is_opposite(&m1, &m2).unwrap());
        assert!(!w.is_opposite(&m1, &m1).unwrap());
        let l = &w.level_subspaces(2)[0];
        let a = Subspace::point(w.field(), l.row(0));
        let b = Subspace::point(w.field(), l.row(1));
        assert!(!w.is_opposite(&a, &b).unwrap());
        assert!(w.is_opposite(&m1, &spec.standard_opposite(2)).is_err());
    }

    #[test]
    fn opposition_matches_pointwise_definition() {
        // parabolic in char 2 has a degenerate bilinear form
        let s = space(Kind::Quadratic, 3, 2, 1);
        let f = s.field().clone();
        let lines = s.level_subspaces(2);
        for a in lines.iter().step_by(7).take(20) {
            for b in lines.iter().step_by(11).take(20) {
                let pointwise = !crate::linalg::projective_points(&f, 2).iter().any(|c| {
                    let x = a.combine(&f, c);
                    b.rows().all(|br| s.spec().eval_bilinear(&x, br).unwrap() == 0)
                });
                assert_eq!(s.is_opposite(a, b).unwrap(), pointwise);
            }
        }
    }

    #[test]
    fn lower_projection_is_involutive_and_bijective() {
        let w = space(Kind::Symplectic, 2, 2, 0);
        let spec = w.spec().clone();
        let u = spec.standard_subspace(2);
        let v = spec.standard_opposite(2);
        assert_eq!(w.project_lower(&u, &v, &Subspace::zero(4)).unwrap(), v);
        assert!(w.project_lower(&u, &v, &u).unwrap().is_zero());
        let pts = enumerate_subspaces(w.field(), &u, 1);
        let mut imgs: Vec<Subspace> = pts.iter().map(|p| w.project_lower(&u, &v, p).unwrap()).collect();
        for (p, i) in pts.iter().zip(&imgs) {
            assert_eq!(i.dim(), 1);
            assert_eq!(&w.project_lower(&v, &u, i).unwrap(), p);
        }
        imgs.sort();
        imgs.dedup();
        assert_eq!(imgs.len(), 3);
        assert_eq!(w.project_lower(&u, &u, &u), Err(Error::NotOpposite));
        assert_eq!(
            w.project_lower(&u, &v, &Subspace::point(w.field(), &spec.e(1))),
            Err(Error::NotContained)
        );
    }

    #[test]
    fn lower_projection_round_trip_on_all_maximals() {
        let w = space(Kind::Symplectic, 3, 2, 0);
        let ms = w.level_subspaces(3).to_vec();
        let u = &ms[0];
        for v in ms.iter().filter(|v| w.is_opposite(u, v).unwrap()).take(10) {
            for k in 0..=3 {
                for s in enumerate_subspaces(w.field(), u, k) {
                    let img = w.project_lower(u, v, &s).unwrap();
                    assert_eq!(img.dim(), 3 - k);
                    assert_eq!(w.project_lower(v, u, &img).unwrap(), s);
                }
            }
        }
    }

    #[test]
    fn upper_projection_properties() {
        let w = space(Kind::Symplectic, 3, 2, 0);
        let spec = w.spec().clone();
        let f = w.field().clone();
        let u = Subspace::point(&f, &spec.e(-1));
        let v = Subspace::point(&f, &spec.e(1));
        let up = Subspace::from_rows(&f, 6, &[spec.e(-1), spec.e(-2)]).unwrap();
        let img = w.project_upper(&u, &v, &up).unwrap();
        assert_eq!(img.dim(), 2);
        assert!(img.contains_subspace(&f, &v));
        assert_eq!(up.meet(&f, &img).unwrap().dim(), 1);
        assert!(w.spec().is_singular(&img));
        assert_eq!(w.project_upper(&v, &u, &img).unwrap(), up);
        // exhaustive uniqueness over all 15 lines through u
        let ui = w.index_of(&u).unwrap();
        let lines_v: Vec<Subspace> = w.up(1, w.index_of(&v).unwrap()).iter().map(|&j| w.subspace(2, j).clone()).collect();
        for &j in w.up(1, ui) {
            let l = w.subspace(2, j);
            let img = w.project_upper(&u, &v, l).unwrap();
            let meeting: Vec<&Subspace> = lines_v.iter().filter(|m| l.meet(&f, m).unwrap().dim() == 1).collect();
            assert_eq!(meeting, vec![&img]);
        }
        assert!(matches!(w.project_upper(&u, &v, &u), Err(Error::BadDimension(_))));
    }

    #[test]
    fn residue_examples() {
        let w = space(Kind::Symplectic, 3, 2, 0);
        let spec = w.spec().clone();
        let p = Subspace::point(w.field(), &spec.e(-1));
        let r = w.residue(&p, Side::Upper).unwrap();
        assert_eq!(r.points().len(), 15);
        assert_eq!(r.lines().len(), 15);
        assert_eq!(r.chambers().len(), 45);
        let m = spec.standard_subspace(3);
        let l = w.residue(&m, Side::Lower).unwrap();
        assert_eq!((l.points().len(), l.lines().len(), l.chambers().len()), (7, 7, 21));
        let sub = spec.standard_subspace(2);
        let r1 = w.residue(&sub, Side::Upper).unwrap();
        assert_eq!(r1.levels(), &[3]);
        assert_eq!(r1.chambers().len(), 3);
        let empty = w.residue(&m, Side::Upper).unwrap();
        assert!(empty.elements().is_empty() && empty.chambers().is_empty());
        for (i, c) in r.chambers().iter().enumerate() {
            assert_eq!(r.chamber_of(c), Some(i as u32));
        }
    }

    #[test]
    fn upper_residue_is_polar_space_of_lower_rank() {
        // Res(p) in W(5,2) behaves like W(3,2): 3 points per line, perps are hyperplanes
        let w = space(Kind::Symplectic, 3, 2, 0);
        let p = Subspace::point(w.field(), &w.spec().e(-2));
        let r = w.residue(&p, Side::Upper).unwrap();
        for l in r.lines() {
            assert_eq!(r.points_on(&w, l).len(), 3);
        }
        for x in r.points() {
            let (_, xi) = r.elements()[x as usize];
            let xs = w.subspace(2, xi);
            let perp: Vec<u32> = r
                .points()
                .into_iter()
                .filter(|&y| {
                    let ys = w.subspace(2, r.elements()[y as usize].1);
                    w.spec().is_singular(&xs.join(w.field(), ys).unwrap())
                })
                .collect();
            assert!(r.geometric_hyperplane_check(&w, &perp));
            assert!(perp.len() < r.points().len());
        }
        let all = r.points();
        assert!(r.geometric_hyperplane_check(&w, &all));
        assert!(!r.geometric_hyperplane_check(&w, &all[..1]));
    }

    #[test]
    fn gamma_neighbours_by_definition() {
        let w = space(Kind::Symplectic, 3, 2, 0);
        let f = w.field().clone();
        let pts = w.level_subspaces(1);
        let n0 = w.gamma_neighbours(1, 0);
        let expect: Vec<u32> = (1..pts.len() as u32).filter(|&j| w.collinear(0, j as usize)).collect();
        assert_eq!(n0, expect);
        let lines = w.level_subspaces(2);
        let n1 = w.gamma_neighbours(2, 3);
        for (j, l) in lines.iter().enumerate() {
            let j = j as u32;
            if j == 3 {
                continue;
            }
            let adj = lines[3].meet(&f, l).unwrap().dim() == 1 && w.spec().is_singular(&lines[3].join(&f, l).unwrap());
            assert_eq!(n1.contains(&j), adj);
        }
        let planes = w.level_subspaces(3);
        let n2 = w.gamma_neighbours(3, 0);
        for (j, m) in planes.iter().enumerate().skip(1) {
            assert_eq!(n2.contains(&(j as u32)), planes[0].meet(&f, m).unwrap().dim() == 2);
        }
    }
}
