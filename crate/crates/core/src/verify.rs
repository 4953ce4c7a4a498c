//! Projectivity groups from the opposition graph, and checks of the
//! classification results on concrete spaces.
//!
//! `Π(F)` is realized as the fundamental group of the opposition graph at
//! `F`: every non-tree edge `(A, B)` of a BFS spanning tree gives the loop
//! `F → A ⥯ B → F`. Loops carry their hop parity, and `Π⁺(F)` is the kernel
//! of that parity on words.

use std::collections::{BTreeMap, HashMap, HashSet, VecDeque};
use std::fmt;
use std::time::Instant;

use num_bigint::BigUint;
use rand::seq::SliceRandom;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::Serialize;
use serde_json::{json, Value};

use crate::error::{Error, Result};
use crate::forms::{FormSpec, Kind};
use crate::gf::{Elem, Field};
use crate::linalg::{enumerate_subspaces, Subspace};
use crate::permgrp::{catalog_order, closure, sl_order, Family, KernelBuilder, Perm, PermGroup};
use crate::polar::{PolarSpace, Residue, Side};
use crate::proj::{
    self, admissible_elation_params, char2_conic_elation, evaluate_chain, extract_homology_factor,
    fixes_line_pointwise, homology_quadruple, preserves_conic, reflection_loop, shortenable_positions,
    standard_homology_axes, two_reflection_decomposition_check, Atlas, Chain, ChamberPerm, TypeAction,
};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "lowercase")]
pub enum Mode {
    Exhaustive,
    Sampled,
}

impl fmt::Display for Mode {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Mode::Exhaustive => "exhaustive",
            Mode::Sampled => "sampled",
        })
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum ModeChoice {
    Auto,
    Exhaustive,
    Sampled,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "lowercase")]
pub enum Outcome {
    Pass,
    Fail,
    Discrepancy,
    Skipped,
}

impl fmt::Display for Outcome {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Outcome::Pass => "pass",
            Outcome::Fail => "fail",
            Outcome::Discrepancy => "discrepancy",
            Outcome::Skipped => "skipped",
        })
    }
}

#[derive(Debug, Clone)]
pub struct RunConfig {
    pub seed: u64,
    pub point_cap: usize,
    /// Largest level size for which the opposition graph is built.
    pub node_cap: usize,
    /// Largest non-tree edge count handled exhaustively under `Auto`.
    pub edge_cap: usize,
    pub mode: ModeChoice,
    pub batch: usize,
    /// Consecutive batches without growth before sampling stops.
    pub stable_batches: usize,
    pub max_batches: usize,
    /// Sample count for configuration checks.
    pub samples: usize,
    pub timing: bool,
}

impl Default for RunConfig {
    fn default() -> Self {
        RunConfig {
            seed: 1,
            point_cap: crate::polar::DEFAULT_POINT_CAP,
            node_cap: 5000,
            edge_cap: 20_000,
            mode: ModeChoice::Auto,
            batch: 32,
            stable_batches: 5,
            max_batches: 400,
            samples: 100,
            timing: false,
        }
    }
}

/// Which residue: members of `level` (vector dimension), upper or lower.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub struct ResidueSel {
    pub level: usize,
    pub side: Side,
}

impl ResidueSel {
    pub fn point() -> ResidueSel {
        ResidueSel { level: 1, side: Side::Upper }
    }
    pub fn upper(level: usize) -> ResidueSel {
        ResidueSel { level, side: Side::Upper }
    }
    pub fn lower(level: usize) -> ResidueSel {
        ResidueSel { level, side: Side::Lower }
    }
}

#[derive(Debug, Clone, Serialize)]
pub struct Report {
    pub check: String,
    pub spec: String,
    pub mode: Mode,
    pub seed: u64,
    pub outcome: Outcome,
    pub order_pi: Option<String>,
    pub order_pi_plus: Option<String>,
    pub index: Option<String>,
    pub catalog: Option<String>,
    pub witnesses: BTreeMap<String, Value>,
    pub ms: Option<u64>,
}

impl Report {
    fn new(check: &str, spec: &str, cfg: &RunConfig) -> Report {
        Report {
            check: check.to_string(),
            spec: spec.to_string(),
            mode: Mode::Exhaustive,
            seed: cfg.seed,
            outcome: Outcome::Pass,
            order_pi: None,
            order_pi_plus: None,
            index: None,
            catalog: None,
            witnesses: BTreeMap::new(),
            ms: None,
        }
    }
    /// A run whose preconditions do not hold.
    pub fn skipped(check: &str, spec: &str, cfg: &RunConfig, reason: &str) -> Report {
        let mut r = Report::new(check, spec, cfg);
        r.outcome = Outcome::Skipped;
        r.witness("reason", reason);
        r
    }
    fn witness(&mut self, key: &str, v: impl Into<Value>) {
        self.witnesses.insert(key.to_string(), v.into());
    }
    fn groups(&mut self, g: &Generated) {
        self.order_pi = Some(g.full.order().to_string());
        self.order_pi_plus = Some(g.even.order().to_string());
        self.index = Some((g.full.order() / g.even.order()).to_string());
        if g.mode == Mode::Sampled {
            self.mode = Mode::Sampled;
        }
        self.witness("generation", g.summary());
    }
    fn sampled(&mut self) {
        self.mode = Mode::Sampled;
    }
    fn finish(mut self, t0: Instant, cfg: &RunConfig) -> Report {
        if cfg.timing {
            self.ms = Some(t0.elapsed().as_millis() as u64);
        }
        self
    }
}

/// Build a space under the configured point cap.
pub fn build_space(spec: &FormSpec, cfg: &RunConfig) -> Result<PolarSpace> {
    PolarSpace::build_with_cap(spec.clone(), cfg.point_cap)
}

/// Index of the standard member of a level, `<e_{-1}, ..., e_{-k}>`.
pub fn standard_node(space: &PolarSpace, level: usize) -> Result<u32> {
    if level == 0 || level > space.rank() {
        return Err(Error::BadDimension(format!("level {level} outside 1..={}", space.rank())));
    }
    let s = space.spec().standard_subspace(level);
    space.index_of(&s).ok_or_else(|| Error::BadDimension("standard subspace not found".into()))
}

fn check_sel(space: &PolarSpace, sel: ResidueSel) -> Result<()> {
    if sel.level == 0 || sel.level > space.rank() {
        return Err(Error::BadDimension(format!("level {} outside 1..={}", sel.level, space.rank())));
    }
    if sel.side == Side::Upper && sel.level == space.rank() {
        return Err(Error::BadDimension("upper residue of a maximal subspace is empty".into()));
    }
    if sel.side == Side::Lower && sel.level == 1 {
        return Err(Error::BadDimension("lower residue of a point is empty".into()));
    }
    Ok(())
}

/// Opposition lists of one level.
pub struct OppositionGraph {
    pub adj: Vec<Vec<u32>>,
}

impl OppositionGraph {
    pub fn build(space: &PolarSpace, level: usize, cap: usize) -> Result<OppositionGraph> {
        let n = space.level_len(level);
        if n > cap {
            return Err(Error::TooLarge { what: "opposition graph nodes", count: n, cap });
        }
        let f = space.field();
        let mut adj = vec![Vec::new(); n];
        if level == 1 {
            for i in 0..n {
                for j in i + 1..n {
                    if !space.collinear(i, j) {
                        adj[i].push(j as u32);
                        adj[j].push(i as u32);
                    }
                }
            }
        } else {
            let grams: Vec<Vec<Vec<Elem>>> = (0..n as u32)
                .map(|i| space.subspace(level, i).rows().map(|r| space.spec().gram_row(r)).collect())
                .collect();
            let rows: Vec<Vec<Vec<Elem>>> =
                (0..n as u32).map(|i| space.subspace(level, i).rows().map(|r| r.to_vec()).collect()).collect();
            let mut m = vec![0; level * level];
            for i in 0..n {
                for j in i + 1..n {
                    for (a, g) in grams[i].iter().enumerate() {
                        for (b, r) in rows[j].iter().enumerate() {
                            m[a * level + b] = crate::linalg::dot(f, g, r);
                        }
                    }
                    let mut w = m.clone();
                    if crate::linalg::rref_in_place(f, level, &mut w) == level {
                        adj[i].push(j as u32);
                        adj[j].push(i as u32);
                    }
                }
            }
        }
        Ok(OppositionGraph { adj })
    }
}

/// Generated projectivity groups of one residue.
pub struct Generated {
    pub full: PermGroup,
    pub even: PermGroup,
    /// Kernel of the type action, for lower residues with two or more levels.
    pub type_kernel: Option<PermGroup>,
    pub mode: Mode,
    pub nodes: usize,
    pub loops: usize,
    pub generators: usize,
    pub batches: usize,
    pub base: Residue,
    pub node: u32,
    /// Loop generators, in insertion order, when kept.
    pub kept: Vec<ChamberPerm>,
}

impl Generated {
    fn summary(&self) -> Value {
        json!({
            "nodes": self.nodes,
            "loops": self.loops,
            "generators": self.generators,
            "batches": self.batches,
            "degree": self.full.degree(),
        })
    }

    /// Generators acting on the residue's points, when all of them
    /// preserve type.
    pub fn kept_point_action(&self) -> Option<Vec<Perm>> {
        let np = self.base.points().len();
        self.full
            .generators()
            .iter()
            .map(|p| {
                let em = elements_of(&self.base, p);
                em[..np].iter().all(|&x| (x as usize) < np).then(|| Perm::from_images(em[..np].to_vec()).ok()).flatten()
            })
            .collect()
    }

    /// Whether odd elements are exactly the type-reversing ones.
    pub fn odd_iff_reversing(&self) -> Option<bool> {
        self.type_kernel.as_ref().map(|k| {
            k.order() == self.even.order() && self.even.generators().iter().all(|g| k.contains(g))
        })
    }
}

struct Tree {
    depth: Vec<u32>,
    transport: Vec<Vec<u32>>,
    inverse: Vec<Vec<u32>>,
    tree_edge: HashSet<(u32, u32)>,
}

fn spanning_tree(atlas: &Atlas, graph: &OppositionGraph, root: u32) -> Result<Tree> {
    let n = atlas.len();
    let mut depth = vec![u32::MAX; n];
    let mut transport: Vec<Vec<u32>> = vec![Vec::new(); n];
    let mut tree_edge = HashSet::new();
    depth[root as usize] = 0;
    transport[root as usize] = (0..atlas.elements(root).len() as u32).collect();
    let mut queue = VecDeque::from([root]);
    let mut reached = 1;
    while let Some(a) = queue.pop_front() {
        for &b in &graph.adj[a as usize] {
            if depth[b as usize] != u32::MAX {
                continue;
            }
            depth[b as usize] = depth[a as usize] + 1;
            let p = atlas.perspectivity(a, b);
            transport[b as usize] = transport[a as usize].iter().map(|&x| p[x as usize]).collect();
            tree_edge.insert((a.min(b), a.max(b)));
            reached += 1;
            queue.push_back(b);
        }
    }
    if reached < n {
        return Err(Error::DisconnectedOppositionGraph { reached, total: n });
    }
    let inverse = transport
        .iter()
        .map(|t| {
            let mut inv = vec![0; t.len()];
            for (i, &x) in t.iter().enumerate() {
                inv[x as usize] = i as u32;
            }
            inv
        })
        .collect();
    Ok(Tree { depth, transport, inverse, tree_edge })
}

fn edge_loop(atlas: &Atlas, tree: &Tree, base: &Residue, a: u32, b: u32) -> Result<ChamberPerm> {
    let p = atlas.perspectivity(a, b);
    let ta = &tree.transport[a as usize];
    let ib = &tree.inverse[b as usize];
    let em: Vec<u32> = ta.iter().map(|&x| ib[p[x as usize] as usize]).collect();
    let odd = (tree.depth[a as usize] + tree.depth[b as usize] + 1) % 2 == 1;
    ChamberPerm::from_element_map(base, em, odd)
}

/// Feed loop generators to a parity builder and, if present, a type builder.
struct Builders {
    parity: KernelBuilder,
    types: Option<KernelBuilder>,
    loops: usize,
    kept: Vec<ChamberPerm>,
    keep: bool,
}

impl Builders {
    fn new(base: &Residue, keep: bool) -> Builders {
        let d = base.chambers().len();
        let types = (base.side() == Side::Lower && base.levels().len() >= 2).then(|| KernelBuilder::new(d));
        Builders { parity: KernelBuilder::new(d), types, loops: 0, kept: Vec::new(), keep }
    }
    fn add(&mut self, cp: ChamberPerm) -> Result<()> {
        self.loops += 1;
        if let Some(t) = self.types.as_mut() {
            t.add(cp.perm.clone(), cp.type_action == TypeAction::Reversing)?;
        }
        if self.keep && !cp.is_identity() {
            self.kept.push(cp.clone());
        }
        self.parity.add(cp.perm, cp.odd)
    }
    fn orders(&self) -> (BigUint, BigUint) {
        (self.parity.full().order(), self.parity.kernel().order())
    }
}

/// `Π(F)` and `Π⁺(F)` for the standard member `F` of the selected level.
pub fn generate(space: &PolarSpace, sel: ResidueSel, cfg: &RunConfig) -> Result<Generated> {
    generate_inner(space, sel, cfg, false)
}

fn generate_inner(space: &PolarSpace, sel: ResidueSel, cfg: &RunConfig, keep: bool) -> Result<Generated> {
    check_sel(space, sel)?;
    let root = standard_node(space, sel.level)?;
    let atlas = Atlas::new(space, sel.level, sel.side);
    let base = space.residue(atlas.node(root), sel.side)?;
    let graph = OppositionGraph::build(space, sel.level, cfg.node_cap)?;
    let tree = spanning_tree(&atlas, &graph, root)?;
    let n = atlas.len();
    let edges: usize = graph.adj.iter().map(|a| a.len()).sum::<usize>() / 2 - (n - 1);
    let mode = match cfg.mode {
        ModeChoice::Exhaustive => Mode::Exhaustive,
        ModeChoice::Sampled => Mode::Sampled,
        ModeChoice::Auto if edges <= cfg.edge_cap => Mode::Exhaustive,
        ModeChoice::Auto => Mode::Sampled,
    };
    let mut b = Builders::new(&base, keep);
    let mut batches = 0;
    match mode {
        Mode::Exhaustive => {
            for a in 0..n as u32 {
                for &c in &graph.adj[a as usize] {
                    if c > a && !tree.tree_edge.contains(&(a, c)) {
                        b.add(edge_loop(&atlas, &tree, &base, a, c)?)?;
                    }
                }
            }
        }
        Mode::Sampled => {
            let mut rng = ChaCha8Rng::seed_from_u64(cfg.seed);
            let mut stable = 0;
            let mut last = b.orders();
            while stable < cfg.stable_batches && batches < cfg.max_batches {
                let mut done = 0;
                let mut tries = 0;
                while done < cfg.batch && tries < cfg.batch * 20 {
                    tries += 1;
                    let a = rng.gen_range(0..n as u32);
                    let Some(&c) = graph.adj[a as usize].choose(&mut rng) else { continue };
                    if tree.tree_edge.contains(&(a.min(c), a.max(c))) {
                        continue;
                    }
                    b.add(edge_loop(&atlas, &tree, &base, a, c)?)?;
                    done += 1;
                }
                batches += 1;
                let now = b.orders();
                if now == last && done > 0 {
                    stable += 1;
                } else {
                    stable = 0;
                    last = now;
                }
                if done == 0 {
                    break;
                }
            }
        }
    }
    let generators = b.parity.generator_count();
    let type_kernel = b.types.map(|t| t.into_parts().1);
    let kept = b.kept;
    let (full, even) = b.parity.into_parts();
    Ok(Generated { full, even, type_kernel, mode, nodes: n, loops: b.loops, generators, batches, base, node: root, kept })
}

/// `Π(F)` (`even = false`) or `Π⁺(F)` for a given singular subspace `F`.
pub fn full_projectivity_group(space: &PolarSpace, f: &Subspace, side: Side, even: bool, cfg: &RunConfig) -> Result<PermGroup> {
    let level = f.dim();
    if space.index_of(f).is_none() {
        return Err(Error::BadDimension("not a singular subspace of the space".into()));
    }
    if *f != space.spec().standard_subspace(level) {
        return Err(Error::BadDimension("groups are generated at the standard member <e_-1..e_-k>".into()));
    }
    let g = generate(space, ResidueSel { level, side }, cfg)?;
    Ok(if even { g.even } else { g.full })
}

/// Catalog families of plausible shape whose order equals `order`.
pub fn catalog_matches(space: &PolarSpace, order: &BigUint) -> Vec<Family> {
    let n = space.n() as u32;
    let fq = space.field().q() as u64;
    let bq = space.spec().base_q();
    let mut qs = vec![fq];
    if bq != fq {
        qs.push(bq);
    }
    let mut cands = Vec::new();
    for k in 2..=12 {
        cands.push(Family::Sym(k));
    }
    for &q in &qs {
        for r in 2..=n {
            cands.push(Family::Pgl { r, q });
            cands.push(Family::Psl { r, q });
            if bq != fq && q == fq {
                cands.push(Family::PslSub { r, q, q0: bq });
            }
        }
        for m in (2..=n).step_by(2) {
            cands.push(Family::Psp { n: m, q });
            cands.push(Family::Go { n: m, q, plus: true });
            cands.push(Family::Go { n: m, q, plus: false });
            cands.push(Family::POmega { n: m, q, plus: true });
            cands.push(Family::POmega { n: m, q, plus: false });
        }
        for m in (3..=n).step_by(2) {
            cands.push(Family::SoOdd { n: m, q });
            cands.push(Family::OmegaOdd { n: m, q });
        }
    }
    let mut out: Vec<Family> = cands
        .into_iter()
        .filter(|f| catalog_order(f).map(|o| &o == order).unwrap_or(false))
        .collect();
    out.dedup();
    out
}

fn catalog_text(space: &PolarSpace, order: &BigUint) -> Option<String> {
    let m = catalog_matches(space, order);
    if m.is_empty() {
        None
    } else {
        Some(format!("order matches {}", m.iter().map(|f| f.to_string()).collect::<Vec<_>>().join(", ")))
    }
}

/// Element map of a chamber permutation. Chambers list one element per
/// level, ascending; a type-reversing image pairs positions in reverse.
fn elements_of(base: &Residue, p: &Perm) -> Vec<u32> {
    let els = base.elements();
    let mut em = vec![u32::MAX; els.len()];
    for (i, c) in base.chambers().iter().enumerate() {
        let img = &base.chambers()[p.image(i as u32) as usize];
        let rev = els[c[0] as usize].0 != els[img[0] as usize].0;
        for (j, x) in c.iter().enumerate() {
            em[*x as usize] = if rev { img[c.len() - 1 - j] } else { img[j] };
        }
    }
    em
}

/// `Π` summary for the group command.
pub fn group_report(space: &PolarSpace, sel: ResidueSel, label: &str, cfg: &RunConfig) -> Result<Report> {
    let t0 = Instant::now();
    let mut rep = Report::new("group", label, cfg);
    let g = generate(space, sel, cfg)?;
    rep.groups(&g);
    let full = g.full.order();
    let even = g.even.order();
    let idx = &full / &even;
    let mut cat = Vec::new();
    if let Some(c) = catalog_text(space, &full) {
        cat.push(format!("Π: {c}"));
    }
    if let Some(c) = catalog_text(space, &even) {
        cat.push(format!("Π⁺: {c}"));
    }
    rep.catalog = (!cat.is_empty()).then(|| cat.join("; "));
    rep.witness("chambers", g.base.chambers().len());
    rep.witness("residue_points", g.base.points().len());
    if let Some(gens) = g.kept_point_action() {
        let pg = PermGroup::from_generators(g.base.points().len(), &gens)?;
        rep.witness("transitive_on_points", pg.is_transitive());
    }
    match g.odd_iff_reversing() {
        Some(v) => rep.witness("odd_iff_type_reversing", v),
        None => rep.witness("type_action", "not applicable"),
    }
    if idx != BigUint::from(1u32) && idx != BigUint::from(2u32) {
        rep.outcome = Outcome::Fail;
    }
    Ok(rep.finish(t0, cfg))
}

fn line_size(space: &PolarSpace) -> usize {
    if space.rank() < 2 {
        return 0;
    }
    space.down(2, 0).len()
}

fn maximals_per_submaximal(space: &PolarSpace) -> usize {
    let r = space.rank();
    if r < 2 {
        return space.level_len(1);
    }
    space.up(r - 1, 0).len()
}

/// Sample a random member of `level` opposite all of `others`.
fn random_opposite(rng: &mut ChaCha8Rng, atlas: &Atlas, others: &[u32], tries: usize) -> Option<u32> {
    let n = atlas.len() as u32;
    for _ in 0..tries {
        let c = rng.gen_range(0..n);
        if others.iter().all(|&o| o != c && atlas.opposite(o, c)) {
            return Some(c);
        }
    }
    None
}

/// Group generated in batches until the orders stop growing.
fn batch_closure<F>(cfg: &RunConfig, degree: usize, mut next: F) -> Result<(KernelBuilder, usize, usize)>
where
    F: FnMut() -> Result<Option<(Perm, bool)>>,
{
    let mut kb = KernelBuilder::new(degree);
    let mut stable = 0;
    let mut batches = 0;
    let mut count = 0;
    let mut last = (kb.full().order(), kb.kernel().order());
    while stable < cfg.stable_batches && batches < cfg.max_batches {
        let mut got = 0;
        for _ in 0..cfg.batch {
            if let Some((p, f)) = next()? {
                kb.add(p, f)?;
                got += 1;
            }
        }
        count += got;
        batches += 1;
        let now = (kb.full().order(), kb.kernel().order());
        if now == last && got > 0 {
            stable += 1;
        } else {
            stable = 0;
            last = now;
        }
        if got == 0 {
            break;
        }
    }
    Ok((kb, count, batches))
}

/// `Π = <Π_3>` and `Π⁺ = <θ0^{-1} θ>`.
pub fn check_triangles(space: &PolarSpace, sel: ResidueSel, label: &str, cfg: &RunConfig) -> Result<Report> {
    let t0 = Instant::now();
    let ls = line_size(space);
    if ls < 4 {
        return Err(Error::ConditionNotMet(format!("lines have {ls} points; at least 4 needed")));
    }
    let mut rep = Report::new("triangles", label, cfg);
    let g = generate(space, sel, cfg)?;
    rep.groups(&g);
    let atlas = Atlas::new(space, sel.level, sel.side);
    let f0 = g.node;
    let mut rng = ChaCha8Rng::seed_from_u64(cfg.seed.wrapping_add(3));
    let degree = g.base.chambers().len();
    let mut theta0: Option<Perm> = None;
    let mut shortenable = 0usize;
    let mut sampled_loops: Vec<(Perm, bool)> = Vec::new();
    let (kb3, count, batches) = batch_closure(cfg, degree, || {
        let Some(b) = random_opposite(&mut rng, &atlas, &[f0], 1000) else { return Ok(None) };
        let Some(c) = random_opposite(&mut rng, &atlas, &[f0, b], 1000) else { return Ok(None) };
        let cp = atlas.loop_perm(&g.base, &[f0, b, c, f0])?;
        let chain = Chain::new(vec![atlas.node(f0).clone(), atlas.node(b).clone(), atlas.node(c).clone(), atlas.node(f0).clone()], sel.side);
        if !shortenable_positions(space, &chain).is_empty() {
            shortenable += 1;
        }
        sampled_loops.push((cp.perm.clone(), cp.odd));
        if theta0.is_none() {
            theta0 = Some(cp.perm.clone());
        }
        Ok(Some((cp.perm, true)))
    })?;
    rep.sampled();
    let g3 = kb3.full().order();
    // <θ0^{-1} θ>
    let t0inv = theta0.clone().map(|t| t.inv());
    let quot: Vec<Perm> = match &t0inv {
        Some(ti) => sampled_loops.iter().map(|(p, _)| ti.mul(p)).collect(),
        None => Vec::new(),
    };
    let gq = PermGroup::from_generators(degree, &quot)?;
    let ok_full = g3 == g.full.order();
    let ok_even = gq.order() == g.even.order();
    rep.witness("length3_loops", count);
    rep.witness("batches", batches);
    rep.witness("order_length3_group", g3.to_string());
    rep.witness("order_theta0_quotients", gq.order().to_string());
    rep.witness("shortenable_loops", shortenable);
    rep.outcome = if ok_full && ok_even { Outcome::Pass } else { Outcome::Fail };
    Ok(rep.finish(t0, cfg))
}

/// `Π⁺ = <Π_4>` over up-and-down loops, plain and restricted.
pub fn check_upanddown(space: &PolarSpace, sel: ResidueSel, label: &str, cfg: &RunConfig) -> Result<Report> {
    let t0 = Instant::now();
    let mut rep = Report::new("upanddown", label, cfg);
    let g = generate(space, sel, cfg)?;
    rep.groups(&g);
    let atlas = Atlas::new(space, sel.level, sel.side);
    let f0 = g.node;
    let level = sel.level;
    let r = space.rank();
    let fld = space.field();
    let mut gamma: HashMap<u32, Vec<u32>> = HashMap::new();
    let mut nb = |x: u32| -> Vec<u32> { gamma.entry(x).or_insert_with(|| space.gamma_neighbours(level, x)).clone() };
    let mut rng = ChaCha8Rng::seed_from_u64(cfg.seed.wrapping_add(4));
    let degree = g.base.chambers().len();
    let mut sample = |restricted: bool, rng: &mut ChaCha8Rng| -> Result<Option<(Perm, bool)>> {
        for _ in 0..200 {
            let Some(f2) = random_opposite(rng, &atlas, &[f0], 1000) else { return Ok(None) };
            let n3: Vec<u32> = nb(f0).into_iter().filter(|&x| atlas.opposite(f2, x)).collect();
            let Some(&f3) = n3.choose(rng) else { continue };
            let n4: Vec<u32> = nb(f2).into_iter().filter(|&x| atlas.opposite(f3, x) && atlas.opposite(f0, x)).collect();
            let Some(&f4) = n4.choose(rng) else { continue };
            if restricted {
                let (a, b, c, d) = (atlas.node(f0), atlas.node(f3), atlas.node(f2), atlas.node(f4));
                let m1 = a.meet(fld, b)?;
                let m2 = c.meet(fld, d)?;
                if !space.opposite_unchecked(&m1, &m2) {
                    continue;
                }
                if level < r {
                    let j1 = a.join(fld, b)?;
                    let j2 = c.join(fld, d)?;
                    if !space.opposite_unchecked(&j1, &j2) {
                        continue;
                    }
                }
            }
            let cp = atlas.loop_perm(&g.base, &[f0, f2, f3, f4, f0])?;
            return Ok(Some((cp.perm, false)));
        }
        Ok(None)
    };
    let (kb_all, n_all, _) = batch_closure(cfg, degree, || sample(false, &mut rng))?;
    let (kb_res, n_res, _) = batch_closure(cfg, degree, || sample(true, &mut rng))?;
    rep.sampled();
    let even = g.even.order();
    let o_all = kb_all.full().order();
    let o_res = kb_res.full().order();
    rep.witness("loops", n_all);
    rep.witness("restricted_loops", n_res);
    rep.witness("order_length4_group", o_all.to_string());
    rep.witness("order_restricted_group", o_res.to_string());
    rep.witness("line_size", line_size(space));
    rep.outcome = if o_all == even && o_res == even && n_res > 0 { Outcome::Pass } else { Outcome::Fail };
    Ok(rep.finish(t0, cfg))
}

/// Whether the hypotheses of the connectivity propositions hold for level `u`.
pub fn gamma_hypotheses(space: &PolarSpace, u: usize) -> bool {
    let r = space.rank();
    let ls = line_size(space);
    if u == r {
        maximals_per_submaximal(space) >= 4 || ls >= 4
    } else if u == 1 && r >= 3 {
        true
    } else {
        ls >= 4
    }
}

/// BFS connectivity of the graph on members of `level` opposite both `u1`
/// and `u2`; returns `(vertices, reached)`.
pub fn gamma_connectivity(space: &PolarSpace, level: usize, u1: u32, u2: u32) -> (usize, usize) {
    let a = space.subspace(level, u1);
    let b = space.subspace(level, u2);
    let n = space.level_len(level);
    let inset: Vec<bool> = (0..n as u32)
        .map(|x| {
            let s = space.subspace(level, x);
            space.opposite_unchecked(s, a) && space.opposite_unchecked(s, b)
        })
        .collect();
    let verts: Vec<u32> = (0..n as u32).filter(|&x| inset[x as usize]).collect();
    let Some(&start) = verts.first() else { return (0, 0) };
    let mut seen = vec![false; n];
    seen[start as usize] = true;
    let mut queue = VecDeque::from([start]);
    let mut reached = 1;
    while let Some(x) = queue.pop_front() {
        for y in space.gamma_neighbours(level, x) {
            if inset[y as usize] && !seen[y as usize] {
                seen[y as usize] = true;
                reached += 1;
                queue.push_back(y);
            }
        }
    }
    (verts.len(), reached)
}

/// Connectivity of the space graph over pairs of members of the level.
pub fn check_gamma(space: &PolarSpace, level: usize, label: &str, cfg: &RunConfig) -> Result<Report> {
    let t0 = Instant::now();
    if level == 0 || level > space.rank() {
        return Err(Error::BadDimension(format!("level {level}")));
    }
    let mut rep = Report::new("gamma", label, cfg);
    let n = space.level_len(level) as u32;
    let total_pairs = n as u64 * (n as u64 - 1) / 2;
    let pairs: Vec<(u32, u32)> = if total_pairs <= 2000 {
        (0..n).flat_map(|a| (a + 1..n).map(move |b| (a, b))).collect()
    } else {
        rep.sampled();
        let mut rng = ChaCha8Rng::seed_from_u64(cfg.seed.wrapping_add(5));
        (0..cfg.samples.max(1))
            .map(|_| {
                let a = rng.gen_range(0..n);
                let mut b = rng.gen_range(0..n);
                while b == a {
                    b = rng.gen_range(0..n);
                }
                (a, b)
            })
            .collect()
    };
    let hyp = gamma_hypotheses(space, level);
    let mut connected = 0;
    let mut disconnected = Vec::new();
    let mut empty = 0;
    for &(a, b) in &pairs {
        let (v, r) = gamma_connectivity(space, level, a, b);
        if v == 0 {
            empty += 1;
        } else if v == r {
            connected += 1;
        } else {
            disconnected.push(json!([a, b, v, r]));
        }
    }
    rep.witness("pairs", pairs.len());
    rep.witness("connected", connected);
    rep.witness("empty_vertex_sets", empty);
    rep.witness("hypotheses_hold", hyp);
    rep.witness("line_size", line_size(space));
    rep.witness("maximals_per_submaximal", maximals_per_submaximal(space));
    rep.witness("s", level - 1);
    rep.outcome = if !hyp {
        Outcome::Skipped
    } else if disconnected.is_empty() {
        Outcome::Pass
    } else {
        Outcome::Fail
    };
    rep.witness("disconnected", Value::Array(disconnected.into_iter().take(10).collect()));
    Ok(rep.finish(t0, cfg))
}

/// Residue points `p1 x` for points `x` (space indices) of `p1^⊥`.
fn lines_through(space: &PolarSpace, base: &Residue, p1: &Subspace, xs: &[usize]) -> Vec<u32> {
    let f = space.field();
    xs.iter()
        .map(|&x| {
            let l = p1.join_vec(f, &space.point_vectors()[x]);
            base.local_index((2, space.index_of(&l).expect("line"))).expect("line through p1")
        })
        .collect()
}

/// A sampled `(p2, lambda, k, k')` for the reflection construction at `p1`.
struct ReflSample {
    p2: Subspace,
    lambda: Vec<Elem>,
    k: usize,
    k2: usize,
    h: Vec<usize>,
}

fn sample_reflection(space: &PolarSpace, p1i: u32, rng: &mut ChaCha8Rng) -> Option<ReflSample> {
    let f = space.field();
    let spec = space.spec();
    let n = space.num_points() as u32;
    let p1 = space.subspace(1, p1i).clone();
    for _ in 0..50 {
        let p2i = rng.gen_range(0..n);
        if space.collinear(p1i as usize, p2i as usize) {
            continue;
        }
        let p2 = space.subspace(1, p2i).clone();
        let w = spec.perp_unchecked(&p1.join(f, &p2).ok()?);
        let coeffs: Vec<Elem> = (0..w.dim()).map(|_| rng.gen_range(0..f.q()) as Elem).collect();
        if coeffs.iter().all(|&c| c == 0) {
            continue;
        }
        let z = w.combine(f, &coeffs);
        let lambda = spec.gram_row(&z);
        let gamma: Vec<usize> = (0..n as usize)
            .filter(|&x| space.collinear(x, p1i as usize) && space.collinear(x, p2i as usize))
            .collect();
        let val = |x: usize| crate::linalg::dot(f, &lambda, &space.point_vectors()[x]);
        let h: Vec<usize> = gamma.iter().copied().filter(|&x| val(x) == 0).collect();
        let off: Vec<usize> = gamma.iter().copied().filter(|&x| val(x) != 0).collect();
        let Some(&k) = off.choose(rng) else { continue };
        let trace = |x: usize| -> Vec<usize> { h.iter().copied().filter(|&y| space.collinear(x, y)).collect() };
        let tk = trace(k);
        let cands: Vec<usize> =
            off.iter().copied().filter(|&x| x != k && !space.collinear(x, k) && trace(x) == tk).collect();
        let k2 = cands.choose(rng).copied().unwrap_or(k);
        return Some(ReflSample { p2, lambda, k, k2, h });
    }
    None
}

/// Reflections of point residues: length-3 loops fix hyperplanes, reflection
/// loops generate `Π(p)`, and reflections are unique within `Π(p)`.
pub fn check_reflections(space: &PolarSpace, label: &str, cfg: &RunConfig) -> Result<Report> {
    let t0 = Instant::now();
    if space.rank() < 3 {
        return Err(Error::ConditionNotMet("rank at least 3 needed".into()));
    }
    let mut rep = Report::new("reflections", label, cfg);
    let sel = ResidueSel::point();
    let g = generate(space, sel, cfg)?;
    rep.groups(&g);
    rep.sampled();
    let atlas = Atlas::new(space, 1, Side::Upper);
    let p1i = g.node;
    let p1 = atlas.node(p1i).clone();
    let base = &g.base;
    let degree = base.chambers().len();
    let mut rng = ChaCha8Rng::seed_from_u64(cfg.seed.wrapping_add(6));

    // (a) length-3 loops fix a geometric hyperplane
    let mut hyper_ok = 0;
    let mut hyper_bad = 0;
    let n_a = cfg.samples.clamp(1, 60);
    for _ in 0..n_a {
        let Some(b) = random_opposite(&mut rng, &atlas, &[p1i], 1000) else { break };
        let Some(c) = random_opposite(&mut rng, &atlas, &[p1i, b], 1000) else { break };
        let cp = atlas.loop_perm(base, &[p1i, b, c, p1i])?;
        let xs: Vec<usize> = (0..space.num_points())
            .filter(|&x| {
                x != p1i as usize
                    && space.collinear(x, p1i as usize)
                    && space.collinear(x, b as usize)
                    && space.collinear(x, c as usize)
            })
            .collect();
        let mut s = lines_through(space, base, &p1, &xs);
        s.sort_unstable();
        s.dedup();
        let fixed = s.iter().all(|&x| cp.elements[x as usize] == x);
        if fixed && base.geometric_hyperplane_check(space, &s) {
            hyper_ok += 1;
        } else {
            hyper_bad += 1;
        }
    }
    rep.witness("length3_hyperplane_fixed", hyper_ok);
    rep.witness("length3_hyperplane_violations", hyper_bad);

    // (b) reflection-generated group
    let mut constructed = 0usize;
    let mut out_of_construction = 0usize;
    let mut nontrivial: Vec<(ReflSample, ChamberPerm)> = Vec::new();
    let (kb, _, batches) = batch_closure(cfg, degree, || {
        for _ in 0..20 {
            let Some(s) = sample_reflection(space, p1i, &mut rng) else { return Ok(None) };
            let pv = space.point_vectors();
            let ks = Subspace::point(space.field(), &pv[s.k]);
            let k2s = Subspace::point(space.field(), &pv[s.k2]);
            match reflection_loop(space, &p1, &s.p2, &s.lambda, &ks, &k2s) {
                Ok(chain) => {
                    constructed += 1;
                    let cp = evaluate_chain(space, base, &chain)?;
                    let out = (cp.perm.clone(), cp.odd);
                    if s.k != s.k2 && nontrivial.len() < 8 {
                        nontrivial.push((s, cp));
                    }
                    return Ok(Some(out));
                }
                Err(Error::NoSuchP3(_)) => out_of_construction += 1,
                Err(e) => return Err(e),
            }
        }
        Ok(None)
    })?;
    let r_full = kb.full().order();
    let r_even = kb.kernel().order();
    rep.witness("reflection_loops", constructed);
    rep.witness("out_of_construction", out_of_construction);
    rep.witness("reflection_batches", batches);
    rep.witness("order_reflection_group", r_full.to_string());
    rep.witness("order_even_reflection_products", r_even.to_string());
    let gen_ok = r_full == g.full.order() && r_even == g.even.order();

    // (c) uniqueness within Π(p), on residue points
    let np = base.points().len();
    let pgens: Vec<Perm> = g
        .full
        .generators()
        .iter()
        .map(|p| Perm::from_images(elements_of(base, p)[..np].to_vec()))
        .collect::<Result<_>>()?;
    let mut unique_ok = 0;
    let mut unique_bad = 0;
    for (s, cp) in &nontrivial {
        let hl = {
            let mut v = lines_through(space, base, &p1, &s.h);
            v.sort_unstable();
            v.dedup();
            v
        };
        let kl = lines_through(space, base, &p1, &[s.k])[0];
        let k2l = lines_through(space, base, &p1, &[s.k2])[0];
        let mut prefix = hl.clone();
        prefix.push(kl);
        let pg = PermGroup::with_base_prefix(np, &pgens, &prefix)?;
        let at = hl.len();
        let maps = pg.orbit_at(at).contains(&k2l);
        let unique = pg.stabilizer_order(at + 1) == BigUint::from(1u32);
        let own = cp.elements[kl as usize] == k2l && hl.iter().all(|&x| cp.elements[x as usize] == x);
        if maps && unique && own {
            unique_ok += 1;
        } else {
            unique_bad += 1;
        }
    }
    rep.witness("uniqueness_verified", unique_ok);
    rep.witness("uniqueness_violations", unique_bad);
    rep.witness("uniqueness_scope", "within the computed group Π(p)");
    rep.outcome = if hyper_bad == 0 && hyper_ok > 0 && gen_ok && unique_bad == 0 && constructed > 0 {
        Outcome::Pass
    } else {
        Outcome::Fail
    };
    Ok(rep.finish(t0, cfg))
}

/// One sampled configuration for the odd/even lemma.
fn oddeven_sample(space: &PolarSpace, u: usize, rng: &mut ChaCha8Rng) -> Option<bool> {
    let f = space.field();
    let n = space.level_len(u) as u32;
    let u1i = rng.gen_range(0..n);
    let u2i = rng.gen_range(0..n);
    let (u1, u2) = (space.subspace(u, u1i), space.subspace(u, u2i));
    if !space.opposite_unchecked(u1, u2) {
        return None;
    }
    let pts: Vec<usize> = (0..space.num_points())
        .filter(|&x| {
            let v = &space.point_vectors()[x];
            let s = Subspace::point(f, v);
            space.meet_perp(u1, &s) == *u1 && space.meet_perp(u2, &s) == *u2
        })
        .collect();
    let &p = pts.choose(rng)?;
    let ps = Subspace::point(f, &space.point_vectors()[p]);
    let w1 = u1.join(f, &ps).ok()?;
    let w2 = u2.join(f, &ps).ok()?;
    let span = u1.join(f, u2).ok()?;
    let hs: Vec<Subspace> = enumerate_subspaces(f, &span, u - 1)
        .into_iter()
        .filter(|h| space.spec().is_singular(h))
        .collect();
    let h = hs.choose(rng)?.clone();
    let cands: Vec<u32> = if u == 1 {
        (0..n).collect()
    } else {
        space.up(u - 1, space.index_of(&h)?).to_vec()
    };
    let good: Vec<u32> = cands
        .into_iter()
        .filter(|&c| {
            let u3 = space.subspace(u, c);
            u3.meet(f, &span).map(|m| m.dim() == u - 1).unwrap_or(false)
                && space.opposite_unchecked(u3, u1)
                && space.opposite_unchecked(u3, u2)
                && space.meet_perp(u3, &ps) != *u3
        })
        .collect();
    let &c = good.choose(rng)?;
    let u3 = space.subspace(u, c);
    let im = proj::perspectivity_image(space, u3, &w2, Side::Upper);
    let im = proj::perspectivity_image(space, u1, &im, Side::Upper);
    Some(im == w1)
}

/// The image of `W2` under `U2 ⥯ U3 ⥯ U1` is `W1` iff `d` is odd.
pub fn check_oddeven(space: &PolarSpace, d: usize, label: &str, cfg: &RunConfig) -> Result<Report> {
    let t0 = Instant::now();
    let mut rep = Report::new("oddeven", label, cfg);
    if !space.spec().is_separable_quadric() {
        return Err(Error::ConditionNotMet("a separable quadric is required".into()));
    }
    let r = space.rank();
    if r < 3 || d < 1 || d > r - 2 {
        return Err(Error::ConditionNotMet(format!("need rank >= 3 and 1 <= d <= r-2, got r={r}, d={d}")));
    }
    rep.sampled();
    let u = d + 1;
    let mut rng = ChaCha8Rng::seed_from_u64(cfg.seed.wrapping_add(7));
    let want = cfg.samples.max(1);
    let mut found = 0;
    let mut equal = 0;
    let mut attempts = 0;
    while found < want && attempts < want * 200 {
        attempts += 1;
        if let Some(eq) = oddeven_sample(space, u, &mut rng) {
            found += 1;
            if eq {
                equal += 1;
            }
        }
    }
    if found == 0 {
        return Err(Error::NoConfigurationFound(format!("after {attempts} attempts")));
    }
    rep.witness("d", d);
    rep.witness("configurations", found);
    rep.witness("images_equal_w1", equal);
    rep.witness("attempts", attempts);
    let odd = d % 2 == 1;
    let ok = if odd { equal == found } else { equal == 0 };
    rep.outcome = if ok && found >= want { Outcome::Pass } else { Outcome::Fail };
    Ok(rep.finish(t0, cfg))
}

/// `{D(v0,w0,t,u)} \ {0}`, sorted.
pub fn norm_set(spec: &FormSpec) -> Result<Vec<Elem>> {
    let f = spec.field();
    let v0s = spec.v0_vectors();
    let mut out = HashSet::new();
    for v0 in &v0s {
        for w0 in &v0s {
            for t in f.elements() {
                for u in f.elements() {
                    let d = spec.d_value(v0, w0, t, u)?;
                    if d != 0 {
                        out.insert(d);
                    }
                }
            }
        }
    }
    let mut v: Vec<Elem> = out.into_iter().collect();
    v.sort_unstable();
    Ok(v)
}

/// Order of the multiplicative subgroup generated by `set`.
pub fn generated_subgroup_order(f: &Field, set: &[Elem]) -> usize {
    let mut seen: HashSet<Elem> = HashSet::from([1]);
    let mut frontier = vec![1];
    while let Some(x) = frontier.pop() {
        for &s in set {
            let y = f.mul(x, s);
            if seen.insert(y) {
                frontier.push(y);
            }
        }
    }
    seen.len()
}

/// `|<SL_r(Q), homologies with factors in N>| / scalars`:
/// `|SL_r(Q)| h / gcd(r h, Q - 1)` with `h = |<N>|`.
pub fn norm_set_implied_order(r: u32, q: u64, h: u64) -> BigUint {
    let g = gcd(r as u64 * h, q - 1);
    sl_order(r, q) * BigUint::from(h) / BigUint::from(g)
}

fn gcd(a: u64, b: u64) -> u64 {
    if b == 0 {
        a
    } else {
        gcd(b, a % b)
    }
}

/// The conjugation identities behind closure of the norm set, checked
/// exhaustively.
fn normset_identities(spec: &FormSpec) -> bool {
    let f = spec.field();
    let inv = spec.involution();
    let v0s = spec.v0_vectors();
    for r in f.nonzero() {
        let ri = f.inv_nz(r);
        let rs = f.conj(inv, r);
        let ris = f.conj(inv, ri);
        let scale = |v: &[Elem], a: Elem| -> Vec<Elem> { v.iter().map(|&x| f.mul(x, a)).collect() };
        for v0 in &v0s {
            for w0 in &v0s {
                let lhs = f.mul(f.mul(ri, spec.f0(w0, v0)), r);
                let rhs = spec.f0(&scale(w0, ris), &scale(v0, r));
                if lhs != rhs {
                    return false;
                }
            }
        }
        for t in f.elements() {
            let lhs = f.mul(f.mul(rs, f.sub(t, f.conj(inv, t))), r);
            let x = f.mul(f.mul(rs, t), r);
            if lhs != f.sub(x, f.conj(inv, x)) {
                return false;
            }
        }
    }
    true
}

pub fn check_normset(spec: &FormSpec, label: &str, cfg: &RunConfig) -> Result<Report> {
    let t0 = Instant::now();
    let mut rep = Report::new("normset", label, cfg);
    let ns = norm_set(spec)?;
    let f = spec.field();
    let h = generated_subgroup_order(f, &ns);
    rep.witness("norm_set", ns.clone());
    rep.witness("generated_subgroup_order", h);
    let ids = normset_identities(spec);
    rep.witness("conjugation_identities", ids);
    let mut ok = ids && !ns.is_empty();
    // parabolic: the nonzero squares
    if spec.kind() == Kind::Quadratic && spec.corank() == 1 {
        let mut sq: Vec<Elem> = f.nonzero().map(|x| f.mul(x, x)).collect();
        sq.sort_unstable();
        sq.dedup();
        rep.witness("nonzero_squares", sq.clone());
        ok &= sq == ns;
    }
    // Hermitian: inside the fixed field
    if spec.kind() == Kind::Hermitian {
        let fixed = f.fixed_subfield(spec.involution());
        ok &= ns.iter().all(|x| fixed.contains(x));
        rep.witness("within_fixed_field", ns.iter().all(|x| fixed.contains(x)));
    }
    let r = spec.rank() as u32;
    let q = f.q() as u64;
    rep.witness("norm_set_implied_order", norm_set_implied_order(r, q, h as u64).to_string());
    if let Some(p) = catalog_prediction(spec) {
        rep.witness("catalog_prediction", format!("{} = {}", p.0, p.1));
        let agree = p.1 == norm_set_implied_order(r, q, h as u64);
        rep.witness("prediction_agrees", agree);
        if !agree {
            rep.outcome = Outcome::Discrepancy;
        }
    }
    if !ok {
        rep.outcome = Outcome::Fail;
    }
    Ok(rep.finish(t0, cfg))
}

/// The classification's prediction for `Π⁺` of a maximal subspace.
pub fn catalog_prediction(spec: &FormSpec) -> Option<(String, BigUint)> {
    let r = spec.rank() as u32;
    let q = spec.field().q() as u64;
    let fam = |f: Family| catalog_order(&f).ok().map(|o| (f.to_string(), o));
    match (spec.kind(), spec.corank()) {
        (Kind::Symplectic, _) => fam(Family::Pgl { r, q }),
        (Kind::Quadratic, 1) if r.is_multiple_of(2) && q % 2 == 1 => {
            Some((format!("PGL({r},{q}) square-determinant subgroup"), sl_order(r, q) / BigUint::from(2u32)))
        }
        (Kind::Quadratic, _) => fam(Family::Pgl { r, q }),
        (Kind::Hermitian, 0) => fam(Family::PslSub { r, q, q0: spec.base_q() }),
        (Kind::Hermitian, _) => fam(Family::Pgl { r, q }),
    }
}

/// Maximal subspaces: `Π⁺(M)` against the classification and against the
/// norm set; homology factors of the standard configuration.
pub fn check_maxsubspace(space: &PolarSpace, label: &str, cfg: &RunConfig) -> Result<Report> {
    let t0 = Instant::now();
    let mut rep = Report::new("maxsubspace", label, cfg);
    let spec = space.spec();
    let r = space.rank();
    let g = generate(space, ResidueSel::lower(r), cfg)?;
    rep.groups(&g);
    let even = g.even.order();
    let catalog = catalog_prediction(spec);
    let mut ok = true;
    if let Some(v) = g.odd_iff_reversing() {
        rep.witness("odd_iff_type_reversing", v);
        ok &= v;
    } else {
        rep.witness("type_action", "not applicable");
    }
    let mut implied = None;
    if spec.kind() != Kind::Symplectic {
        let ns = norm_set(spec)?;
        let h = generated_subgroup_order(space.field(), &ns) as u64;
        let o = norm_set_implied_order(r as u32, space.field().q() as u64, h);
        rep.witness("norm_set", ns.clone());
        rep.witness("norm_set_implied_order", o.to_string());
        implied = Some(o);
        // homology factors of the standard configuration
        let f = space.field();
        let m1 = spec.standard_subspace(r);
        let (axis, centre) = standard_homology_axes(spec);
        let v0s = spec.v0_vectors();
        let mut params = Vec::new();
        for v0 in &v0s {
            for w0 in &v0s {
                for t in f.elements() {
                    for u in f.elements() {
                        params.push((v0.clone(), w0.clone(), t, u));
                    }
                }
            }
        }
        if params.len() > 4096 {
            let mut rng = ChaCha8Rng::seed_from_u64(cfg.seed.wrapping_add(8));
            params.shuffle(&mut rng);
            params.truncate(cfg.samples.max(1));
            rep.sampled();
        }
        let mut factors_ok = 0;
        let mut factors_bad = 0;
        let mut degenerate = 0;
        for (v0, w0, t, u) in &params {
            match homology_quadruple(space, v0, w0, *t, *u) {
                Err(Error::DegenerateD) => degenerate += 1,
                Err(e) => return Err(e),
                Ok(chain) => {
                    let cp = evaluate_chain(space, &g.base, &chain)?;
                    let x = extract_homology_factor(space, &g.base, &cp, &axis, &centre)?;
                    let d = spec.d_value(v0, w0, *t, *u)?;
                    if x == d && ns.contains(&x) && g.even.contains(&cp.perm) && *g.base.node() == m1 {
                        factors_ok += 1;
                    } else {
                        factors_bad += 1;
                    }
                }
            }
        }
        rep.witness("homology_factors_matching", factors_ok);
        rep.witness("homology_factor_mismatches", factors_bad);
        rep.witness("degenerate_quadruples", degenerate);
        ok &= factors_bad == 0 && factors_ok > 0;
    }
    if let Some((name, o)) = &catalog {
        rep.witness("catalog_prediction", format!("{name} = {o}"));
        if o == &even {
            rep.catalog = Some(format!("order matches {name}"));
        }
    }
    let preds: Vec<&BigUint> = catalog.iter().map(|c| &c.1).chain(implied.iter()).collect();
    let disagree = preds.windows(2).any(|w| w[0] != w[1]);
    rep.outcome = if disagree {
        Outcome::Discrepancy
    } else if ok && preds.first().is_none_or(|p| **p == even) {
        Outcome::Pass
    } else {
        Outcome::Fail
    };
    Ok(rep.finish(t0, cfg))
}

/// Lower residues of non-maximal subspaces: `Π⁺ = PGL`.
pub fn check_nonmax_lower(space: &PolarSpace, level: usize, label: &str, cfg: &RunConfig) -> Result<Report> {
    let t0 = Instant::now();
    let mut rep = Report::new("nonmaxlower", label, cfg);
    let r = space.rank();
    if level >= r {
        return Err(Error::BadDimension(format!("level {level} is maximal")));
    }
    if level <= 1 {
        rep.outcome = Outcome::Skipped;
        rep.witness("reason", "lower residue of a point is empty");
        return Ok(rep.finish(t0, cfg));
    }
    let g = generate(space, ResidueSel::lower(level), cfg)?;
    rep.groups(&g);
    let q = space.field().q() as u64;
    let fam = Family::Pgl { r: level as u32, q };
    let want = catalog_order(&fam)?;
    let even = g.even.order();
    rep.witness("prediction", format!("{fam} = {want}"));
    if even == want {
        rep.catalog = Some(format!("order matches {fam}"));
    }
    let has_odd = g.full.order() != even;
    rep.witness("odd_elements_outside_even_group", has_odd);
    let mut ok = even == want;
    match g.odd_iff_reversing() {
        Some(v) => {
            rep.witness("odd_iff_type_reversing", v);
            ok &= v;
        }
        None => rep.witness("type_action", "not applicable"),
    }
    rep.outcome = if ok { Outcome::Pass } else { Outcome::Fail };
    Ok(rep.finish(t0, cfg))
}

/// Every admissible elation preserves the conic and fixes its line.
pub fn check_conic_elation(f: &Field, label: &str, cfg: &RunConfig) -> Result<Report> {
    let t0 = Instant::now();
    let mut rep = Report::new("conic-elation", label, cfg);
    if f.p() != 2 {
        return Err(Error::ConditionNotMet("characteristic 2 required".into()));
    }
    let adm = admissible_elation_params(f);
    let mut good = 0;
    let mut bad = Vec::new();
    for &(k, a, b) in &adm {
        let m = char2_conic_elation(f, a, b)?;
        if preserves_conic(f, &m) && fixes_line_pointwise(f, &m, k) {
            good += 1;
        } else {
            bad.push(json!([k, a, b]));
        }
    }
    // singular parameters are rejected
    let mut rejected = 0;
    let mut singular = 0;
    for a in f.elements() {
        for b in f.elements() {
            if f.add(1, f.mul(a, f.mul(b, b))) == 0 {
                singular += 1;
                if matches!(char2_conic_elation(f, a, b), Err(Error::Singular)) {
                    rejected += 1;
                }
            }
        }
    }
    rep.witness("admissible", adm.len());
    rep.witness("verified", good);
    rep.witness("failures", Value::Array(bad.clone()));
    rep.witness("singular_parameters", singular);
    rep.witness("singular_rejected", rejected);
    rep.witness("conic_points", proj::conic_points(f).len());
    rep.outcome = if bad.is_empty() && good > 0 && rejected == singular { Outcome::Pass } else { Outcome::Fail };
    Ok(rep.finish(t0, cfg))
}

/// Length-4 loops in the two-reflection configuration: each is a product of
/// at most two reflections of the residue.
pub fn check_two_reflections(space: &PolarSpace, level: usize, label: &str, cfg: &RunConfig) -> Result<Report> {
    let t0 = Instant::now();
    let mut rep = Report::new("tworeflections", label, cfg);
    if !space.spec().is_separable_quadric() {
        return Err(Error::ConditionNotMet("a separable quadric is required".into()));
    }
    let r = space.rank();
    if r < 3 || level == 0 || level > r - 1 {
        return Err(Error::ConditionNotMet(format!("need rank >= 3 and level <= r-1, got r={r}, level={level}")));
    }
    rep.sampled();
    let f = space.field();
    let atlas = Atlas::new(space, level, Side::Upper);
    let a1 = standard_node(space, level)?;
    let base = space.residue(atlas.node(a1), Side::Upper)?;
    let mut rng = ChaCha8Rng::seed_from_u64(cfg.seed.wrapping_add(9));
    let want = cfg.samples.clamp(1, 30);
    let mut found = 0;
    let mut decomposed = 0;
    let mut single = 0;
    let mut trivial = 0;
    let mut attempts = 0;
    let n = atlas.len() as u32;
    let nb_up = |x: u32| space.gamma_neighbours(level, x);
    while found < want && attempts < want * 400 {
        attempts += 1;
        // A1, A3 in a common (level+1)-space, A2, A4 in an opposite one
        let a3c: Vec<u32> = nb_up(a1);
        let Some(&a3) = a3c.choose(&mut rng) else { break };
        let a2 = rng.gen_range(0..n);
        if !atlas.opposite(a1, a2) || !atlas.opposite(a2, a3) {
            continue;
        }
        let a4c: Vec<u32> =
            nb_up(a2).into_iter().filter(|&x| atlas.opposite(a3, x) && atlas.opposite(a1, x)).collect();
        let Some(&a4) = a4c.choose(&mut rng) else { continue };
        let (s1, s2, s3, s4) = (atlas.node(a1), atlas.node(a2), atlas.node(a3), atlas.node(a4));
        let b = s1.meet(f, s3)?;
        let c = s2.meet(f, s4)?;
        if b.dim() + 1 != level || c.dim() + 1 != level || (level > 1 && !space.opposite_unchecked(&b, &c)) {
            continue;
        }
        let j1 = s1.join(f, s3)?;
        let j2 = s2.join(f, s4)?;
        if !space.opposite_unchecked(&j1, &j2) {
            continue;
        }
        found += 1;
        let chain = Chain::new(vec![s1.clone(), s2.clone(), s3.clone(), s4.clone(), s1.clone()], Side::Upper);
        if let Some(d) = two_reflection_decomposition_check(space, &base, &chain)? {
            decomposed += 1;
            match (&d.a, &d.b) {
                (None, None) => trivial += 1,
                (Some(_), None) => single += 1,
                _ => {}
            }
        }
    }
    if found == 0 {
        return Err(Error::NoConfigurationFound(format!("after {attempts} attempts")));
    }
    rep.witness("configurations", found);
    rep.witness("decomposed", decomposed);
    rep.witness("single_reflection", single);
    rep.witness("identity", trivial);
    rep.outcome = if decomposed == found { Outcome::Pass } else { Outcome::Fail };
    Ok(rep.finish(t0, cfg))
}

/// Spanning-tree groups against the closure of all closed walks of length
/// at most `max_len` from the base node.
pub fn check_engine_oracle(space: &PolarSpace, sel: ResidueSel, max_len: usize, label: &str, cfg: &RunConfig) -> Result<Report> {
    let t0 = Instant::now();
    let mut rep = Report::new("engine", label, cfg);
    let mut ecfg = cfg.clone();
    ecfg.mode = ModeChoice::Exhaustive;
    let g = generate(space, sel, &ecfg)?;
    rep.groups(&g);
    let atlas = Atlas::new(space, sel.level, sel.side);
    let graph = OppositionGraph::build(space, sel.level, cfg.node_cap)?;
    let root = g.node;
    let mut pmaps: HashMap<(u32, u32), Vec<u32>> = HashMap::new();
    let id: Vec<u32> = (0..atlas.elements(root).len() as u32).collect();
    let mut seen: HashSet<(u32, Vec<u32>, bool)> = HashSet::new();
    seen.insert((root, id.clone(), false));
    let mut frontier = vec![(root, id, false)];
    let mut loops_all: HashSet<Vec<u32>> = HashSet::new();
    let mut loops_even: HashSet<Vec<u32>> = HashSet::new();
    for _ in 0..max_len {
        let mut next = Vec::new();
        for (a, em, odd) in &frontier {
            for &b in &graph.adj[*a as usize] {
                let p = pmaps.entry((*a, b)).or_insert_with(|| atlas.perspectivity(*a, b));
                let em2: Vec<u32> = em.iter().map(|&x| p[x as usize]).collect();
                let st = (b, em2, !odd);
                if seen.insert(st.clone()) {
                    if b == root {
                        loops_all.insert(st.1.clone());
                        if !st.2 {
                            loops_even.insert(st.1.clone());
                        }
                    }
                    next.push(st);
                }
            }
        }
        frontier = next;
    }
    let to_perm = |em: &Vec<u32>| ChamberPerm::from_element_map(&g.base, em.clone(), false).map(|c| c.perm);
    let mut all: Vec<Perm> = loops_all.iter().map(to_perm).collect::<Result<_>>()?;
    let mut even: Vec<Perm> = loops_even.iter().map(to_perm).collect::<Result<_>>()?;
    all.sort();
    even.sort();
    let degree = g.base.chambers().len();
    let limit = 2_000_000;
    let c_all = closure(degree, &all, limit).map(|v| v.len());
    let c_even = closure(degree, &even, limit).map(|v| v.len());
    rep.witness("max_walk_length", max_len);
    rep.witness("states", seen.len());
    rep.witness("distinct_loops", all.len());
    rep.witness("closure_all", c_all.map(|x| x.to_string()));
    rep.witness("closure_even", c_even.map(|x| x.to_string()));
    let ok = c_all.map(BigUint::from) == Some(g.full.order()) && c_even.map(BigUint::from) == Some(g.even.order());
    rep.outcome = if ok { Outcome::Pass } else { Outcome::Fail };
    Ok(rep.finish(t0, cfg))
}
