//! Lifting an `r`-graph to an `(r+1)`-graph through the component graph `G_t`.
//!
//! `G_t` has `t` petals `S_1..S_t` of `s` vertices each (petal `i` occupies
//! `i·s..(i+1)·s`) and a core `X` of `m` vertices (`x_j = t·s + j`). Its edges are
//! the petal cliques, the core clique, and `x_j` joined to every vertex of the
//! `j`-th seed edge inside every petal. The lift places the `(r+1)`-edge
//! `Ψ_{S_i}(A_j) ∪ {x_j}` for every petal and seed edge; copies of `G_t` packed
//! into `K_n` then carry copies of the lift.

use std::collections::HashSet;

use rand::seq::SliceRandom;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::hypergraph::{binomial, FreenessWitness, Hypergraph, HypergraphError, Vertex};

/// Consecutive rejected samples after which [`greedy_induced_packing`] stops.
pub const DEFAULT_MAX_FAILURES: usize = 2000;

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum LiftError {
    #[error(transparent)]
    Hypergraph(#[from] HypergraphError),
    #[error("invalid parameters: {0}")]
    InvalidParameters(String),
    #[error("seed graph rejected: {reason}")]
    Precondition {
        reason: String,
        witness: Option<FreenessWitness>,
    },
}

/// An injection of `0..s` given by `j ↦ target[j]`.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct EmbeddingSpec {
    pub target: Vec<Vertex>,
}

impl EmbeddingSpec {
    pub fn new(target: Vec<Vertex>) -> Result<Self, LiftError> {
        let distinct: HashSet<_> = target.iter().collect();
        if distinct.len() != target.len() {
            return Err(LiftError::InvalidParameters(format!(
                "embedding {target:?} repeats a vertex"
            )));
        }
        Ok(EmbeddingSpec { target })
    }

    /// The order-preserving map of `0..s` onto `offset..offset+s`.
    pub fn block(offset: usize, s: usize) -> Self {
        EmbeddingSpec {
            target: (offset..offset + s).map(|v| v as Vertex).collect(),
        }
    }

    pub fn source_size(&self) -> usize {
        self.target.len()
    }

    pub fn apply(&self, set: &[Vertex]) -> Vec<Vertex> {
        let mut out: Vec<Vertex> = set.iter().map(|&v| self.target[v as usize]).collect();
        out.sort_unstable();
        out
    }
}

/// A simple graph on `0..n`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct SimpleGraph {
    n: usize,
    edges: Vec<(Vertex, Vertex)>,
    adjacency: Vec<Vec<Vertex>>,
}

impl SimpleGraph {
    pub fn new(n: usize, edges: impl IntoIterator<Item = (Vertex, Vertex)>) -> Result<Self, LiftError> {
        let mut list: Vec<(Vertex, Vertex)> = Vec::new();
        for (a, b) in edges {
            if a == b || a as usize >= n || b as usize >= n {
                return Err(LiftError::InvalidParameters(format!(
                    "bad edge ({a}, {b}) on {n} vertices"
                )));
            }
            list.push((a.min(b), a.max(b)));
        }
        list.sort_unstable();
        let before = list.len();
        list.dedup();
        if list.len() != before {
            return Err(LiftError::InvalidParameters("repeated edge".into()));
        }
        let mut adjacency = vec![Vec::new(); n];
        for &(a, b) in &list {
            adjacency[a as usize].push(b);
            adjacency[b as usize].push(a);
        }
        Ok(SimpleGraph {
            n,
            edges: list,
            adjacency,
        })
    }

    pub fn complete(n: usize) -> Self {
        let edges = (0..n as Vertex).flat_map(|a| (a + 1..n as Vertex).map(move |b| (a, b)));
        SimpleGraph::new(n, edges).expect("complete graph is valid")
    }

    pub fn vertex_count(&self) -> usize {
        self.n
    }

    pub fn len(&self) -> usize {
        self.edges.len()
    }

    pub fn is_empty(&self) -> bool {
        self.edges.is_empty()
    }

    pub fn edges(&self) -> &[(Vertex, Vertex)] {
        &self.edges
    }

    pub fn neighbors(&self, v: Vertex) -> &[Vertex] {
        &self.adjacency[v as usize]
    }

    pub fn has_edge(&self, a: Vertex, b: Vertex) -> bool {
        self.edges.binary_search(&(a.min(b), a.max(b))).is_ok()
    }

    /// The induced subgraph on `vertices` is complete.
    pub fn is_clique(&self, vertices: &[Vertex]) -> bool {
        vertices
            .iter()
            .enumerate()
            .all(|(i, &a)| vertices[i + 1..].iter().all(|&b| self.has_edge(a, b)))
    }
}

/// The component graph `G_t` for a seed `r`-graph on `s` vertices with `m` edges.
#[derive(Clone, Debug)]
pub struct GtTemplate {
    pub seed: Hypergraph,
    pub s: usize,
    pub m: usize,
    pub t: usize,
    pub petals: Vec<EmbeddingSpec>,
    pub e1: Vec<(Vertex, Vertex)>,
    pub e2: Vec<(Vertex, Vertex)>,
    pub e3: Vec<(Vertex, Vertex)>,
    graph: SimpleGraph,
}

impl GtTemplate {
    pub fn vertex_count(&self) -> usize {
        self.t * self.s + self.m
    }

    /// `x_j`, the core vertex of seed edge `j` (0-based, canonical edge order).
    pub fn core_vertex(&self, j: usize) -> Vertex {
        (self.t * self.s + j) as Vertex
    }

    pub fn graph(&self) -> &SimpleGraph {
        &self.graph
    }

    /// `t C(s,2) + C(m,2) + r m t`.
    pub fn expected_edge_count(&self) -> u128 {
        let r = self.seed.r() as u128;
        let (s, m, t) = (self.s, self.m, self.t as u128);
        t * binomial(s, 2) + binomial(m, 2) + r * m as u128 * t
    }
}

pub fn build_component_graph(h: &Hypergraph, t: usize) -> Result<GtTemplate, LiftError> {
    let (s, m) = (h.n(), h.len());
    if t == 0 {
        return Err(LiftError::InvalidParameters("t must be at least 1".into()));
    }
    if m < 2 {
        return Err(LiftError::InvalidParameters(format!(
            "the seed graph needs at least 2 edges, got {m}"
        )));
    }
    let petals: Vec<EmbeddingSpec> = (0..t).map(|i| EmbeddingSpec::block(i * s, s)).collect();
    let clique = |offset: usize, size: usize| {
        let o = offset as Vertex;
        (0..size as Vertex).flat_map(move |a| (a + 1..size as Vertex).map(move |b| (o + a, o + b)))
    };
    let e1: Vec<_> = (0..t).flat_map(|i| clique(i * s, s)).collect();
    let e2: Vec<_> = clique(t * s, m).collect();
    let mut e3 = Vec::with_capacity(h.r() * m * t);
    for petal in &petals {
        for (j, edge) in h.edges().enumerate() {
            let x = (t * s + j) as Vertex;
            for v in petal.apply(edge) {
                e3.push((v, x));
            }
        }
    }
    let graph = SimpleGraph::new(
        t * s + m,
        e1.iter().chain(&e2).chain(&e3).copied(),
    )?;
    Ok(GtTemplate {
        seed: h.clone(),
        s,
        m,
        t,
        petals,
        e1,
        e2,
        e3,
        graph,
    })
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct EdgeMeta {
    pub petal: usize,
    pub root: Vec<Vertex>,
    pub core: Vertex,
}

/// The `(r+1)`-graph on `V(G_t)`; `meta[i]` describes `graph.edge(i)`.
#[derive(Clone, Debug)]
pub struct LiftedGraph {
    pub graph: Hypergraph,
    pub meta: Vec<EdgeMeta>,
}

pub fn lift(template: &GtTemplate) -> Result<LiftedGraph, LiftError> {
    let mut rows: Vec<(Vec<Vertex>, EdgeMeta)> = Vec::new();
    for (i, petal) in template.petals.iter().enumerate() {
        for (j, edge) in template.seed.edges().enumerate() {
            let root = petal.apply(edge);
            let core = template.core_vertex(j);
            let mut full = root.clone();
            full.push(core);
            full.sort_unstable();
            rows.push((full, EdgeMeta { petal: i, root, core }));
        }
    }
    rows.sort_by(|a, b| a.0.cmp(&b.0));
    let graph = Hypergraph::new(
        template.seed.r() + 1,
        template.vertex_count(),
        rows.iter().map(|(e, _)| e),
    )?;
    Ok(LiftedGraph {
        graph,
        meta: rows.into_iter().map(|(_, m)| m).collect(),
    })
}

/// Outcome of [`verify_lift`]. The linearity and freeness verdicts are `None`
/// when the seed does not meet their hypotheses.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct LiftCheck {
    pub edge_count_ok: bool,
    pub rooted_ok: bool,
    pub root_core_disjoint: bool,
    pub same_petal_distinct_cores: bool,
    pub different_petals_disjoint_roots: bool,
    pub edges_are_cliques: bool,
    pub almost_linear: Option<bool>,
    pub free: Option<bool>,
}

impl LiftCheck {
    pub fn passed(&self) -> bool {
        self.edge_count_ok
            && self.rooted_ok
            && self.root_core_disjoint
            && self.same_petal_distinct_cores
            && self.different_petals_disjoint_roots
            && self.edges_are_cliques
            && self.almost_linear != Some(false)
            && self.free != Some(false)
    }
}

pub fn verify_lift(lifted: &LiftedGraph, template: &GtTemplate) -> Result<LiftCheck, LiftError> {
    let h = &template.seed;
    let r = h.r();
    let ts = template.t * template.s;
    let meta = &lifted.meta;

    let rooted_ok = meta.iter().enumerate().all(|(i, em)| {
        let petal = em.petal * template.s..(em.petal + 1) * template.s;
        let mut full = em.root.clone();
        full.push(em.core);
        full.sort_unstable();
        em.root.len() == r
            && em.root.iter().all(|&v| petal.contains(&(v as usize)))
            && (em.core as usize) >= ts
            && full == lifted.graph.edge(i)
    });
    let cores: HashSet<Vertex> = meta.iter().map(|em| em.core).collect();
    let root_core_disjoint = meta
        .iter()
        .all(|em| em.root.iter().all(|v| !cores.contains(v)));
    let mut same_petal_distinct_cores = true;
    let mut different_petals_disjoint_roots = true;
    for (i, a) in meta.iter().enumerate() {
        for b in &meta[i + 1..] {
            if a.petal == b.petal {
                same_petal_distinct_cores &= a.core != b.core;
            } else {
                different_petals_disjoint_roots &= a.root.iter().all(|v| !b.root.contains(v));
            }
        }
    }
    let edges_are_cliques = lifted
        .graph
        .edges()
        .all(|e| template.graph().is_clique(e));

    let (almost_linear, free) = if h.is_almost_linear() {
        let lin = Some(lifted.graph.is_almost_linear());
        let seed_free = r >= 2 && h.is_free(3 * r - 4, 3)?.is_free();
        let free = seed_free
            .then(|| lifted.graph.is_free(3 * r - 1, 3))
            .transpose()?
            .map(|f| f.is_free());
        (lin, free)
    } else {
        (None, None)
    };
    Ok(LiftCheck {
        edge_count_ok: lifted.graph.len() == template.m * template.t,
        rooted_ok,
        root_core_disjoint,
        same_petal_distinct_cores,
        different_petals_disjoint_roots,
        edges_are_cliques,
        almost_linear,
        free,
    })
}

/// Copies of a pattern graph in `K_n`; `copies[c][w]` is the image of pattern vertex `w`.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct PackingPlan {
    pub n: usize,
    pub pattern_vertices: usize,
    pub copies: Vec<Vec<Vertex>>,
}

/// Why a plan is not an induced packing.
#[derive(Clone, Debug, PartialEq, Eq, Error)]
pub enum PackingViolation {
    #[error("copy {0} is not an injection into the vertex set")]
    NotInjective(usize),
    #[error("copies {0} and {1} share the edge {2:?}")]
    SharedEdge(usize, usize, (Vertex, Vertex)),
    #[error("copies {0} and {1} share {2} vertices")]
    TooManyShared(usize, usize, usize),
    #[error("copies {0} and {1} share the pair {2:?}, which is an edge of one of them")]
    SharedPairIsEdge(usize, usize, (Vertex, Vertex)),
}

fn image_edges(pattern: &SimpleGraph, copy: &[Vertex]) -> HashSet<(Vertex, Vertex)> {
    pattern
        .edges()
        .iter()
        .map(|&(a, b)| {
            let (x, y) = (copy[a as usize], copy[b as usize]);
            (x.min(y), x.max(y))
        })
        .collect()
}

/// Checks every pair of copies directly: edge-disjoint images, at most two
/// common vertices, and a common pair is an edge of neither copy.
pub fn verify_packing(plan: &PackingPlan, pattern: &SimpleGraph) -> Result<(), PackingViolation> {
    let images: Vec<HashSet<(Vertex, Vertex)>> =
        plan.copies.iter().map(|c| image_edges(pattern, c)).collect();
    let vertex_sets: Vec<HashSet<Vertex>> =
        plan.copies.iter().map(|c| c.iter().copied().collect()).collect();
    for (i, c) in plan.copies.iter().enumerate() {
        if c.len() != pattern.vertex_count()
            || vertex_sets[i].len() != c.len()
            || c.iter().any(|&v| v as usize >= plan.n)
        {
            return Err(PackingViolation::NotInjective(i));
        }
    }
    for i in 0..plan.copies.len() {
        for j in i + 1..plan.copies.len() {
            if let Some(&e) = images[i].intersection(&images[j]).next() {
                return Err(PackingViolation::SharedEdge(i, j, e));
            }
            let mut shared: Vec<Vertex> = vertex_sets[i].intersection(&vertex_sets[j]).copied().collect();
            if shared.len() > 2 {
                return Err(PackingViolation::TooManyShared(i, j, shared.len()));
            }
            if shared.len() == 2 {
                shared.sort_unstable();
                let pair = (shared[0], shared[1]);
                if images[i].contains(&pair) || images[j].contains(&pair) {
                    return Err(PackingViolation::SharedPairIsEdge(i, j, pair));
                }
            }
        }
    }
    Ok(())
}

/// Packing state shared by the sampler and the acceptance test.
struct PackingState<'a> {
    n: usize,
    pattern: &'a SimpleGraph,
    used: Vec<bool>,
    owners: Vec<Vec<u32>>,
    copies: Vec<Vec<Vertex>>,
}

impl PackingState<'_> {
    fn used(&self, a: Vertex, b: Vertex) -> bool {
        self.used[a as usize * self.n + b as usize]
    }

    /// Whether `{a, b}` is an edge of accepted copy `c`.
    fn copy_has_edge(&self, c: usize, a: Vertex, b: Vertex) -> bool {
        let copy = &self.copies[c];
        let pa = copy.iter().position(|&v| v == a);
        let pb = copy.iter().position(|&v| v == b);
        matches!((pa, pb), (Some(x), Some(y)) if self.pattern.has_edge(x as Vertex, y as Vertex))
    }

    /// Assigns pattern vertices one at a time, each to a random target that keeps
    /// the partial copy within the packing rules so far.
    fn sample(&self, rng: &mut ChaCha8Rng) -> Option<Vec<Vertex>> {
        let size = self.pattern.vertex_count();
        let mut img: Vec<Vertex> = Vec::with_capacity(size);
        let mut taken = vec![false; self.n];
        let mut shared = vec![0u8; self.copies.len()];
        let mut options: Vec<Vertex> = Vec::with_capacity(self.n);
        for w in 0..size as Vertex {
            options.clear();
            for x in 0..self.n as Vertex {
                if taken[x as usize]
                    || self.owners[x as usize].iter().any(|&c| shared[c as usize] >= 2)
                {
                    continue;
                }
                let clash = self
                    .pattern
                    .neighbors(w)
                    .iter()
                    .filter(|&&u| u < w)
                    .any(|&u| self.used(img[u as usize], x));
                if !clash {
                    options.push(x);
                }
            }
            let &x = options.choose(rng)?;
            taken[x as usize] = true;
            for &c in &self.owners[x as usize] {
                shared[c as usize] += 1;
            }
            img.push(x);
        }
        Some(img)
    }

    fn acceptable(&self, img: &[Vertex]) -> bool {
        let edges = image_edges(self.pattern, img);
        if edges.iter().any(|&(a, b)| self.used(a, b)) {
            return false;
        }
        let mut common: Vec<Vec<Vertex>> = vec![Vec::new(); self.copies.len()];
        for &x in img {
            for &c in &self.owners[x as usize] {
                common[c as usize].push(x);
            }
        }
        common.iter().enumerate().all(|(c, shared)| match shared[..] {
            [a, b] => {
                let pair = (a.min(b), a.max(b));
                !edges.contains(&pair) && !self.copy_has_edge(c, a, b)
            }
            ref s => s.len() < 2,
        })
    }

    fn accept(&mut self, img: Vec<Vertex>) {
        let id = self.copies.len() as u32;
        for (a, b) in image_edges(self.pattern, &img) {
            self.used[a as usize * self.n + b as usize] = true;
            self.used[b as usize * self.n + a as usize] = true;
        }
        for &x in &img {
            self.owners[x as usize].push(id);
        }
        self.copies.push(img);
    }
}

/// Greedy randomized induced packing of `pattern` into `K_n`. Samples copies
/// until `max_failures` consecutive samples are rejected.
pub fn greedy_induced_packing(
    n: usize,
    pattern: &SimpleGraph,
    seed: u64,
    max_failures: usize,
) -> Result<PackingPlan, LiftError> {
    let size = pattern.vertex_count();
    if n < size {
        return Err(LiftError::InvalidParameters(format!(
            "cannot place a {size}-vertex pattern into {n} vertices"
        )));
    }
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut state = PackingState {
        n,
        pattern,
        used: vec![false; n * n],
        owners: vec![Vec::new(); n],
        copies: Vec::new(),
    };
    let mut failures = 0;
    while failures < max_failures {
        match state.sample(&mut rng) {
            Some(img) if state.acceptable(&img) => {
                state.accept(img);
                failures = 0;
            }
            _ => failures += 1,
        }
    }
    Ok(PackingPlan {
        n,
        pattern_vertices: size,
        copies: state.copies,
    })
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct LiftReport {
    pub s: usize,
    pub m: usize,
    pub t: usize,
    pub n: usize,
    pub template_vertices: usize,
    pub template_edges: usize,
    pub copies: usize,
    /// `n^2 / (2 |G_t|)`, the copy count an asymptotically optimal packing reaches.
    pub target_copies: f64,
    /// `m / t`.
    pub core_ratio: f64,
    pub edge_count: usize,
}

/// One edge of the packed union: which copy and petal it came from and its core.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct UnionEdgeMeta {
    pub copy: usize,
    pub petal: usize,
    pub core: Vertex,
}

#[derive(Clone, Debug)]
pub struct LiftedConstruction {
    pub graph: Hypergraph,
    /// Aligned with the canonical edge order of `graph`.
    pub meta: Vec<UnionEdgeMeta>,
    pub template: GtTemplate,
    pub lifted: LiftedGraph,
    pub plan: PackingPlan,
    pub report: LiftReport,
}

impl LiftedConstruction {
    /// Edges from one copy meet in at most two vertices, edges from different
    /// copies in at most one.
    pub fn copy_dichotomy_holds(&self) -> bool {
        let g = &self.graph;
        let sets: Vec<HashSet<Vertex>> = g.edges().map(|e| e.iter().copied().collect()).collect();
        (0..g.len()).all(|i| {
            (i + 1..g.len()).all(|j| {
                let common = g.edge(j).iter().filter(|v| sets[i].contains(v)).count();
                let cap = if self.meta[i].copy == self.meta[j].copy { 2 } else { 1 };
                common <= cap
            })
        })
    }
}

/// Checks the seed (almost linear and `G_r(3r-4, 3)`-free), packs `G_t` into
/// `K_n`, and returns the union of the lift mapped through every copy.
pub fn construct_lifted(
    h: &Hypergraph,
    t: usize,
    n: usize,
    seed: u64,
    max_failures: usize,
) -> Result<LiftedConstruction, LiftError> {
    let r = h.r();
    if r < 2 {
        return Err(LiftError::InvalidParameters("seed uniformity must be at least 2".into()));
    }
    if !h.is_almost_linear() {
        return Err(LiftError::Precondition {
            reason: format!(
                "seed is not almost linear (two edges share {} vertices)",
                h.max_pairwise_intersection()
            ),
            witness: None,
        });
    }
    if let Some(w) = h.is_free(3 * r - 4, 3)?.witness() {
        return Err(LiftError::Precondition {
            reason: format!(
                "seed is not G_{r}({}, 3)-free: edges {:?} span {} vertices",
                3 * r - 4,
                w.edge_indices,
                w.union_size
            ),
            witness: Some(w.clone()),
        });
    }
    let template = build_component_graph(h, t)?;
    let lifted = lift(&template)?;
    let plan = greedy_induced_packing(n, template.graph(), seed, max_failures)?;

    let mut rows: Vec<(Vec<Vertex>, UnionEdgeMeta)> = Vec::new();
    for (c, copy) in plan.copies.iter().enumerate() {
        for (e, em) in lifted.graph.edges().zip(&lifted.meta) {
            let mut image: Vec<Vertex> = e.iter().map(|&v| copy[v as usize]).collect();
            image.sort_unstable();
            rows.push((
                image,
                UnionEdgeMeta {
                    copy: c,
                    petal: em.petal,
                    core: copy[em.core as usize],
                },
            ));
        }
    }
    rows.sort_by(|a, b| a.0.cmp(&b.0));
    let graph = Hypergraph::new(r + 1, n, rows.iter().map(|(e, _)| e))?;
    let template_edges = template.graph().len();
    let report = LiftReport {
        s: template.s,
        m: template.m,
        t,
        n,
        template_vertices: template.vertex_count(),
        template_edges,
        copies: plan.copies.len(),
        target_copies: (n * n) as f64 / (2 * template_edges) as f64,
        core_ratio: template.m as f64 / t as f64,
        edge_count: graph.len(),
    };
    Ok(LiftedConstruction {
        graph,
        meta: rows.into_iter().map(|(_, m)| m).collect(),
        template,
        lifted,
        plan,
        report,
    })
}
