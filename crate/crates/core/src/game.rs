//! Multi-weighted game graphs and plays.
//!
//! A game graph `⟨V, E, d⟩` has two players (Player 1 and Player 2), a finite vertex set where each
//! vertex belongs to one player, and a finite multiset of directed edges labelled with vectors in
//! `Z^d`. Standing assumptions, enforced by [`validate`]:
//!
//! - every vertex has at least one outgoing edge (plays never get stuck),
//! - at least one edge weight is non-zero (the maximal edge norm `‖E‖` is positive),
//! - every cycle visits a Player-1 vertex ("cycle-normalized"; [`normalize_cycles`] establishes
//!   this by splitting Player-2 → Player-2 edges with pass-through Player-1 vertices).
//!
//! Plays are sequences of configurations `(vertex, level)` where the level is the running sum of
//! the edge weights taken so far, starting at `0`. The owner of the current vertex picks the next
//! edge. Two objectives are studied on top of this arena:
//!
//! - the *energy* objective with initial credit `b`: Player 1 wins iff `b + level ≥ 0` holds
//!   componentwise forever,
//! - the *bounding* objective: Player 1 wins iff the set of visited levels is bounded in norm.
//!
//! Everything here is exact: weights are arbitrary-precision integers, and all orderings used for
//! canonical forms (vertex order, edge order, weight order) are total and deterministic.

use std::collections::HashMap;
use std::fmt;

use num_bigint::BigInt;
use num_traits::{Signed, Zero};

use crate::error::{CoreError, Result, Violation};

/// Owner of a vertex.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum Player {
    One,
    Two,
}

impl Player {
    /// The other player.
    pub fn opponent(self) -> Player {
        match self {
            Player::One => Player::Two,
            Player::Two => Player::One,
        }
    }

    /// Numeric label used in file formats and reports (1 or 2).
    pub fn label(self) -> u8 {
        match self {
            Player::One => 1,
            Player::Two => 2,
        }
    }

    /// Parse a numeric label.
    pub fn from_label(n: u64) -> Result<Player> {
        match n {
            1 => Ok(Player::One),
            2 => Ok(Player::Two),
            other => Err(CoreError::InvalidInput(format!("owner must be 1 or 2, got {other}"))),
        }
    }
}

impl fmt::Display for Player {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}", self.label())
    }
}

/// A `d`-dimensional integer vector: edge weight, energy level, or initial credit.
///
/// Ordering is lexicographic with numeric component comparison; this is the canonical weight
/// order used everywhere (edge sorting, enumeration output, test fixtures).
#[derive(Debug, Clone, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct Weight(pub Vec<BigInt>);

impl Weight {
    /// The all-zero vector of dimension `d`.
    pub fn zero(d: usize) -> Weight {
        Weight(vec![BigInt::zero(); d])
    }

    /// The `i`-th (0-based) unit vector of dimension `d`.
    pub fn unit(d: usize, i: usize) -> Weight {
        let mut w = Weight::zero(d);
        w.0[i] = BigInt::from(1);
        w
    }

    /// Build from machine integers (convenience for tests and fixtures).
    pub fn from_i64(xs: &[i64]) -> Weight {
        Weight(xs.iter().map(|&x| BigInt::from(x)).collect())
    }

    pub fn dim(&self) -> usize {
        self.0.len()
    }

    pub fn is_zero(&self) -> bool {
        self.0.iter().all(|x| x.is_zero())
    }

    /// Infinity norm: the maximum absolute value of a component (0 for the empty vector).
    pub fn norm(&self) -> BigInt {
        self.0.iter().map(|x| x.abs()).max().unwrap_or_else(BigInt::zero)
    }

    /// Componentwise sum.
    pub fn add(&self, other: &Weight) -> Weight {
        debug_assert_eq!(self.dim(), other.dim());
        Weight(self.0.iter().zip(&other.0).map(|(a, b)| a + b).collect())
    }

    /// Componentwise difference `self - other`.
    pub fn sub(&self, other: &Weight) -> Weight {
        debug_assert_eq!(self.dim(), other.dim());
        Weight(self.0.iter().zip(&other.0).map(|(a, b)| a - b).collect())
    }

    /// Componentwise negation.
    pub fn neg(&self) -> Weight {
        Weight(self.0.iter().map(|a| -a).collect())
    }

    /// Scalar multiple `n · self`.
    pub fn scale(&self, n: &BigInt) -> Weight {
        Weight(self.0.iter().map(|a| a * n).collect())
    }

    /// Componentwise `self ≥ other`.
    pub fn ge(&self, other: &Weight) -> bool {
        debug_assert_eq!(self.dim(), other.dim());
        self.0.iter().zip(&other.0).all(|(a, b)| a >= b)
    }

    /// Componentwise `self ≤ other`.
    pub fn le(&self, other: &Weight) -> bool {
        other.ge(self)
    }
}

impl fmt::Display for Weight {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "(")?;
        for (i, x) in self.0.iter().enumerate() {
            if i > 0 {
                write!(f, ",")?;
            }
            write!(f, "{x}")?;
        }
        write!(f, ")")
    }
}

/// Index of a vertex in a [`GameGraph`] (canonical id order).
pub type VertexIdx = usize;
/// Index of an edge in a [`GameGraph`] (canonical edge order).
pub type EdgeIdx = usize;

/// A vertex: a stable string id plus its owner.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Vertex {
    pub id: String,
    pub owner: Player,
}

/// A directed edge with an exact integer weight vector.
///
/// Edges form a multiset: parallel edges — even with equal weights — are distinct, distinguished
/// by `ordinal` (their rank among edges with the same source, target, and weight).
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Edge {
    pub src: VertexIdx,
    pub dst: VertexIdx,
    pub weight: Weight,
    pub ordinal: u32,
}

/// A finite two-player multi-weighted game graph.
///
/// Construction canonicalizes the representation: vertices are sorted by id, edges by
/// `(src, dst, weight, ordinal)`. Two graphs built from the same data in any order are equal.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct GameGraph {
    dimension: usize,
    vertices: Vec<Vertex>,
    edges: Vec<Edge>,
    out: Vec<Vec<EdgeIdx>>,
    index_of: HashMap<String, VertexIdx>,
}

impl GameGraph {
    /// Build a graph from raw parts, canonicalizing vertex and edge order.
    ///
    /// Fails on: zero dimension, duplicate vertex ids, unknown edge endpoints, and edge weights
    /// whose length is not `dimension`. Standing assumptions are *not* checked here; call
    /// [`validate`] (or [`GameGraph::ensure_valid`]) for those.
    pub fn new(
        dimension: usize,
        vertices: Vec<(String, Player)>,
        edges: Vec<(String, String, Weight)>,
    ) -> Result<GameGraph> {
        if dimension == 0 {
            return Err(CoreError::InvalidInput("dimension must be at least 1".into()));
        }
        if vertices.is_empty() {
            return Err(CoreError::InvalidInput("vertex set must be non-empty".into()));
        }
        let mut vs: Vec<Vertex> =
            vertices.into_iter().map(|(id, owner)| Vertex { id, owner }).collect();
        vs.sort_by(|a, b| a.id.cmp(&b.id));
        for pair in vs.windows(2) {
            if pair[0].id == pair[1].id {
                return Err(CoreError::InvalidInput(format!("duplicate vertex id {:?}", pair[0].id)));
            }
        }
        let index_of: HashMap<String, VertexIdx> =
            vs.iter().enumerate().map(|(i, v)| (v.id.clone(), i)).collect();

        let mut es = Vec::with_capacity(edges.len());
        for (src, dst, weight) in edges {
            let &s = index_of
                .get(&src)
                .ok_or_else(|| CoreError::InvalidInput(format!("edge source {src:?} is not a vertex")))?;
            let &t = index_of
                .get(&dst)
                .ok_or_else(|| CoreError::InvalidInput(format!("edge target {dst:?} is not a vertex")))?;
            if weight.dim() != dimension {
                return Err(CoreError::InvalidInput(format!(
                    "edge {src:?} -> {dst:?} has weight of dimension {}, expected {dimension}",
                    weight.dim()
                )));
            }
            es.push(Edge { src: s, dst: t, weight, ordinal: 0 });
        }
        // Canonical edge order; ordinals number parallel duplicates in their resulting order.
        es.sort_by(|a, b| {
            (a.src, a.dst, &a.weight).cmp(&(b.src, b.dst, &b.weight))
        });
        let mut run = 0u32;
        for i in 0..es.len() {
            if i > 0 && es[i - 1].src == es[i].src && es[i - 1].dst == es[i].dst && es[i - 1].weight == es[i].weight
            {
                run += 1;
            } else {
                run = 0;
            }
            es[i].ordinal = run;
        }

        let mut out = vec![Vec::new(); vs.len()];
        for (i, e) in es.iter().enumerate() {
            out[e.src].push(i);
        }
        Ok(GameGraph { dimension, vertices: vs, edges: es, out, index_of })
    }

    pub fn dimension(&self) -> usize {
        self.dimension
    }

    pub fn vertex_count(&self) -> usize {
        self.vertices.len()
    }

    pub fn edge_count(&self) -> usize {
        self.edges.len()
    }

    pub fn vertices(&self) -> &[Vertex] {
        &self.vertices
    }

    pub fn edges(&self) -> &[Edge] {
        &self.edges
    }

    pub fn vertex(&self, v: VertexIdx) -> &Vertex {
        &self.vertices[v]
    }

    pub fn edge(&self, e: EdgeIdx) -> &Edge {
        &self.edges[e]
    }

    pub fn owner(&self, v: VertexIdx) -> Player {
        self.vertices[v].owner
    }

    /// Look a vertex up by id.
    pub fn vertex_index(&self, id: &str) -> Option<VertexIdx> {
        self.index_of.get(id).copied()
    }

    /// Like [`GameGraph::vertex_index`] but with an error mentioning the id.
    pub fn require_vertex(&self, id: &str) -> Result<VertexIdx> {
        self.vertex_index(id)
            .ok_or_else(|| CoreError::InvalidInput(format!("no vertex with id {id:?}")))
    }

    /// Outgoing edges of `v` in canonical order.
    pub fn out_edges(&self, v: VertexIdx) -> &[EdgeIdx] {
        &self.out[v]
    }

    /// The maximal edge norm `‖E‖`: the largest absolute value of any weight component.
    pub fn edge_norm(&self) -> BigInt {
        self.edges.iter().map(|e| e.weight.norm()).max().unwrap_or_else(BigInt::zero)
    }

    /// Human-readable rendering of an edge, for logs and witnesses.
    pub fn display_edge(&self, e: EdgeIdx) -> String {
        let edge = &self.edges[e];
        format!(
            "{} -{}-> {}{}",
            self.vertices[edge.src].id,
            edge.weight,
            self.vertices[edge.dst].id,
            if edge.ordinal > 0 { format!(" #{}", edge.ordinal) } else { String::new() }
        )
    }

    /// Validate and return `self` on success; convenience for solver entry points.
    pub fn ensure_valid(&self) -> Result<()> {
        let vs = validate(self);
        if vs.is_empty() {
            Ok(())
        } else {
            Err(CoreError::InvalidGame(vs))
        }
    }
}

/// Check the standing assumptions and return every violation found (empty = valid).
pub fn validate(g: &GameGraph) -> Vec<Violation> {
    let mut out = Vec::new();
    for (v, vertex) in g.vertices().iter().enumerate() {
        if g.out_edges(v).is_empty() {
            out.push(Violation::NoOutgoingEdge(vertex.id.clone()));
        }
    }
    if g.edge_norm().is_zero() {
        out.push(Violation::ZeroEdgeNorm);
    }
    if let Some(cycle) = player2_only_cycle(g) {
        out.push(Violation::Player2OnlyCycle(
            cycle.into_iter().map(|v| g.vertex(v).id.clone()).collect(),
        ));
    }
    out
}

/// Find a cycle through Player-2 vertices only, if one exists.
///
/// Runs an iterative DFS on the subgraph induced by Player-2 vertices (colour marking; grey-edge
/// hits close a cycle).
fn player2_only_cycle(g: &GameGraph) -> Option<Vec<VertexIdx>> {
    #[derive(Clone, Copy, PartialEq)]
    enum Colour {
        White,
        Grey,
        Black,
    }
    let n = g.vertex_count();
    let mut colour = vec![Colour::White; n];
    // DFS stack of (vertex, next out-edge position); `path` mirrors the grey chain.
    for root in 0..n {
        if g.owner(root) != Player::Two || colour[root] != Colour::White {
            continue;
        }
        let mut stack = vec![(root, 0usize)];
        let mut path = vec![root];
        colour[root] = Colour::Grey;
        while let Some(&mut (v, ref mut next)) = stack.last_mut() {
            let mut advanced = false;
            while *next < g.out_edges(v).len() {
                let e = g.out_edges(v)[*next];
                *next += 1;
                let w = g.edge(e).dst;
                if g.owner(w) != Player::Two {
                    continue;
                }
                match colour[w] {
                    Colour::Grey => {
                        // Cycle: suffix of `path` from w's position.
                        let k = path.iter().position(|&x| x == w).expect("grey vertex on path");
                        return Some(path[k..].to_vec());
                    }
                    Colour::White => {
                        colour[w] = Colour::Grey;
                        stack.push((w, 0));
                        path.push(w);
                        advanced = true;
                        break;
                    }
                    Colour::Black => {}
                }
            }
            if !advanced {
                colour[v] = Colour::Black;
                stack.pop();
                path.pop();
            }
        }
    }
    None
}

/// Split every Player-2 → Player-2 edge with a fresh pass-through Player-1 vertex, making the
/// graph cycle-normalized (every cycle visits a Player-1 vertex).
///
/// The original weight rides on the first half of the split; the second half has weight zero, so
/// levels along plays are unchanged up to the harmless intermediate configuration. Fresh vertex
/// ids derive from the split edge and are disambiguated against existing ids.
pub fn normalize_cycles(g: &GameGraph) -> Result<GameGraph> {
    let mut vertices: Vec<(String, Player)> =
        g.vertices().iter().map(|v| (v.id.clone(), v.owner)).collect();
    let mut taken: std::collections::HashSet<String> =
        vertices.iter().map(|(id, _)| id.clone()).collect();
    let mut edges = Vec::with_capacity(g.edge_count());
    for e in g.edges() {
        let src = g.vertex(e.src);
        let dst = g.vertex(e.dst);
        if src.owner == Player::Two && dst.owner == Player::Two {
            let mut id = format!("{}--{}--{}", src.id, dst.id, e.ordinal);
            while taken.contains(&id) {
                id.push('\'');
            }
            taken.insert(id.clone());
            vertices.push((id.clone(), Player::One));
            edges.push((src.id.clone(), id.clone(), e.weight.clone()));
            edges.push((id, dst.id.clone(), Weight::zero(g.dimension())));
        } else {
            edges.push((src.id.clone(), dst.id.clone(), e.weight.clone()));
        }
    }
    GameGraph::new(g.dimension(), vertices, edges)
}

/// A configuration of a play: current vertex plus the running level (sum of weights so far).
#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct Configuration {
    pub vertex: VertexIdx,
    pub level: Weight,
}

impl Configuration {
    pub fn start(v: VertexIdx, d: usize) -> Configuration {
        Configuration { vertex: v, level: Weight::zero(d) }
    }

    /// Rendering `(id, (a1,…,ad))` used in traces and reports.
    pub fn display(&self, g: &GameGraph) -> String {
        format!("({},{})", g.vertex(self.vertex).id, self.level)
    }
}

/// A finite play prefix: configurations connected by edges of the graph, starting at level `0`.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Trace {
    configs: Vec<Configuration>,
    /// Edge taken between consecutive configurations (`edges[i]` connects `configs[i]` to
    /// `configs[i+1]`).
    edges: Vec<EdgeIdx>,
}

impl Trace {
    /// Start a trace at `v` with level zero.
    pub fn start(g: &GameGraph, v: VertexIdx) -> Trace {
        Trace { configs: vec![Configuration::start(v, g.dimension())], edges: Vec::new() }
    }

    /// Extend by one edge; the edge must leave the current vertex.
    pub fn push(&mut self, g: &GameGraph, e: EdgeIdx) -> Result<()> {
        let cur = self.configs.last().expect("trace is never empty");
        let edge = g.edge(e);
        if edge.src != cur.vertex {
            return Err(CoreError::InvalidInput(format!(
                "edge {} does not leave vertex {}",
                g.display_edge(e),
                g.vertex(cur.vertex).id
            )));
        }
        let next = Configuration { vertex: edge.dst, level: cur.level.add(&edge.weight) };
        self.configs.push(next);
        self.edges.push(e);
        Ok(())
    }

    /// Reconstruct a trace from bare configurations, checking that consecutive configurations are
    /// connected by an actual edge whose weight matches the level difference. Ambiguities between
    /// parallel equal-weight edges resolve to the lowest ordinal.
    pub fn from_configurations(g: &GameGraph, configs: &[Configuration]) -> Result<Trace> {
        let Some(first) = configs.first() else {
            return Err(CoreError::InvalidInput("trace must contain at least one configuration".into()));
        };
        if !first.level.is_zero() {
            return Err(CoreError::InvalidInput("trace must start at level 0".into()));
        }
        let mut trace = Trace::start(g, first.vertex);
        for pair in configs.windows(2) {
            let (cur, next) = (&pair[0], &pair[1]);
            let delta = next.level.sub(&cur.level);
            let e = g
                .out_edges(cur.vertex)
                .iter()
                .copied()
                .find(|&e| g.edge(e).dst == next.vertex && g.edge(e).weight == delta)
                .ok_or_else(|| {
                    CoreError::InvalidInput(format!(
                        "no edge {} -{}-> {}",
                        g.vertex(cur.vertex).id,
                        delta,
                        g.vertex(next.vertex).id
                    ))
                })?;
            trace.push(g, e)?;
        }
        Ok(trace)
    }

    pub fn configurations(&self) -> &[Configuration] {
        &self.configs
    }

    pub fn edges_taken(&self) -> &[EdgeIdx] {
        &self.edges
    }

    pub fn current(&self) -> &Configuration {
        self.configs.last().expect("trace is never empty")
    }

    /// Total weight of the trace: the final level (levels start at zero).
    pub fn total_weight(&self) -> &Weight {
        &self.current().level
    }

    /// Number of edges taken.
    pub fn len(&self) -> usize {
        self.edges.len()
    }

    pub fn is_empty(&self) -> bool {
        self.edges.is_empty()
    }

    pub fn display(&self, g: &GameGraph) -> String {
        self.configs.iter().map(|c| c.display(g)).collect::<String>()
    }
}

/// A simple cycle: an edge path whose interior vertices are pairwise distinct and whose last edge
/// returns to the first vertex.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct SimpleCycle {
    /// Edges in cycle order.
    pub edges: Vec<EdgeIdx>,
    /// Total weight (sum of edge weights).
    pub weight: Weight,
}

impl SimpleCycle {
    fn from_edges(g: &GameGraph, edges: Vec<EdgeIdx>) -> SimpleCycle {
        let mut weight = Weight::zero(g.dimension());
        for &e in &edges {
            weight = weight.add(&g.edge(e).weight);
        }
        SimpleCycle { edges, weight }
    }

    /// Vertices in cycle order (first vertex repeated at the end).
    pub fn vertices(&self, g: &GameGraph) -> Vec<VertexIdx> {
        let mut vs = Vec::with_capacity(self.edges.len() + 1);
        vs.push(g.edge(self.edges[0]).src);
        for &e in &self.edges {
            vs.push(g.edge(e).dst);
        }
        vs
    }

    pub fn display(&self, g: &GameGraph) -> String {
        let vs = self.vertices(g);
        format!(
            "[{}] weight {}",
            vs.iter().map(|&v| g.vertex(v).id.as_str()).collect::<Vec<_>>().join(" -> "),
            self.weight
        )
    }
}

/// Enumerate all simple cycles (vertex-distinct except for the closing step), treating parallel
/// edges as distinct, in deterministic order.
///
/// Runs a rooted DFS per start vertex: a cycle is enumerated exactly once, rooted at its smallest
/// vertex index, visiting only larger indices in between. `cap` bounds the number of cycles
/// produced; exceeding it is a budget error (fail loud rather than return a truncated set).
pub fn enumerate_simple_cycles(g: &GameGraph, cap: usize) -> Result<Vec<SimpleCycle>> {
    let n = g.vertex_count();
    let mut cycles = Vec::new();
    let mut on_path = vec![false; n];
    // Iterative DFS: stack of (vertex, out-edge position); edge_path mirrors the chosen edges.
    for root in 0..n {
        let mut stack = vec![(root, 0usize)];
        let mut edge_path: Vec<EdgeIdx> = Vec::new();
        on_path[root] = true;
        while let Some(&mut (v, ref mut next)) = stack.last_mut() {
            if *next < g.out_edges(v).len() {
                let e = g.out_edges(v)[*next];
                *next += 1;
                let w = g.edge(e).dst;
                if w == root {
                    let mut edges = edge_path.clone();
                    edges.push(e);
                    cycles.push(SimpleCycle::from_edges(g, edges));
                    if cycles.len() > cap {
                        return Err(CoreError::Budget(format!(
                            "more than {cap} simple cycles; raise the cycle cap for this instance"
                        )));
                    }
                } else if w > root && !on_path[w] {
                    on_path[w] = true;
                    edge_path.push(e);
                    stack.push((w, 0));
                }
            } else {
                stack.pop();
                on_path[v] = false;
                if !edge_path.is_empty() {
                    edge_path.pop();
                }
            }
        }
    }
    Ok(cycles)
}

/// Sorted, deduplicated list of the non-zero simple-cycle weights of `g`.
///
/// This is the index set for the counters kept by the Player-1 strategy automaton.
pub fn nonzero_cycle_weights(g: &GameGraph, cap: usize) -> Result<Vec<Weight>> {
    let mut ws: Vec<Weight> = enumerate_simple_cycles(g, cap)?
        .into_iter()
        .map(|c| c.weight)
        .filter(|w| !w.is_zero())
        .collect();
    ws.sort();
    ws.dedup();
    Ok(ws)
}

/// A step on a [`PathStack`]: the vertex reached, a caller-chosen payload (edge index, colour, …),
/// and the weight of the edge taken.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct PathStep<P> {
    pub to: VertexIdx,
    pub payload: P,
    pub weight: Weight,
}

/// A cycle cut out of a [`PathStack`]: the steps removed (in path order; the last one closed the
/// cycle) and their total weight.
#[derive(Debug, Clone)]
pub struct PoppedCycle<P> {
    pub steps: Vec<PathStep<P>>,
    pub weight: Weight,
}

/// A simple path maintained as a stack, the shared building block of strategy memories: pushing a
/// step that revisits a vertex on the path cuts the loop out and returns it.
///
/// The residual path always remains simple, and the sum of all popped cycle weights plus the
/// residual path weight equals the total weight pushed — the invariant the strategy engine's
/// energy-identity assertion relies on.
#[derive(Debug, Clone)]
pub struct PathStack<P> {
    start: VertexIdx,
    steps: Vec<PathStep<P>>,
    /// Position of each on-path vertex: `start` has position 0, `steps[i].to` position `i + 1`.
    pos: HashMap<VertexIdx, usize>,
}

impl<P> PathStack<P> {
    pub fn new(start: VertexIdx) -> PathStack<P> {
        let mut pos = HashMap::new();
        pos.insert(start, 0);
        PathStack { start, steps: Vec::new(), pos }
    }

    /// Current end of the path.
    pub fn current(&self) -> VertexIdx {
        self.steps.last().map_or(self.start, |s| s.to)
    }

    /// Vertices on the path in order, starting with the start vertex.
    pub fn vertices(&self) -> Vec<VertexIdx> {
        let mut vs = vec![self.start];
        vs.extend(self.steps.iter().map(|s| s.to));
        vs
    }

    pub fn steps(&self) -> &[PathStep<P>] {
        &self.steps
    }

    pub fn start(&self) -> VertexIdx {
        self.start
    }

    /// Total weight of the residual path.
    pub fn total_weight(&self, d: usize) -> Weight {
        let mut w = Weight::zero(d);
        for s in &self.steps {
            w = w.add(&s.weight);
        }
        w
    }

    /// Push one step. If `to` is already on the path, the loop from its previous occurrence is
    /// removed and returned; the path then ends at `to`'s earlier position.
    pub fn push(&mut self, to: VertexIdx, payload: P, weight: Weight) -> Option<PoppedCycle<P>> {
        let new_step = PathStep { to, payload, weight };
        match self.pos.get(&to).copied() {
            None => {
                self.pos.insert(to, self.steps.len() + 1);
                self.steps.push(new_step);
                None
            }
            Some(k) => {
                // Steps k.. lead strictly beyond position k; they plus the new step form the loop.
                let mut steps: Vec<PathStep<P>> = self.steps.split_off(k);
                for s in &steps {
                    self.pos.remove(&s.to);
                }
                steps.push(new_step);
                self.pos.insert(to, k);
                let mut weight = Weight::zero(steps[0].weight.dim());
                for s in &steps {
                    weight = weight.add(&s.weight);
                }
                Some(PoppedCycle { steps, weight })
            }
        }
    }
}

/// One step of the cycle-decomposition automaton on plain traces: feed the next configuration into
/// the stack; if the vertex repeats, the enclosed simple cycle is cut out and returned.
///
/// `stack` is the residual simple path so far, `next` the configuration the play moved to, `via`
/// the edge taken. This is the trace-level face of [`PathStack::push`], shared by the first-cycle
/// solver and both strategy memories.
pub fn cycle_decomposition_step(
    g: &GameGraph,
    stack: &mut PathStack<EdgeIdx>,
    via: EdgeIdx,
) -> Result<Option<SimpleCycle>> {
    let edge = g.edge(via);
    if edge.src != stack.current() {
        return Err(CoreError::InvalidInput(format!(
            "edge {} does not leave the stack head {}",
            g.display_edge(via),
            g.vertex(stack.current()).id
        )));
    }
    let popped = stack.push(edge.dst, via, edge.weight.clone());
    Ok(popped.map(|c| SimpleCycle {
        edges: c.steps.iter().map(|s| s.payload).collect(),
        weight: c.weight,
    }))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::fixtures;

    #[test]
    fn weight_basics() {
        let w = Weight::from_i64(&[4, -3]);
        assert_eq!(w.norm(), BigInt::from(4));
        assert_eq!(w.add(&Weight::from_i64(&[-2, 2])), Weight::from_i64(&[2, -1]));
        assert!(Weight::from_i64(&[0, 0]).is_zero());
        assert!(Weight::from_i64(&[1, -1]).ge(&Weight::from_i64(&[0, -1])));
        assert!(!Weight::from_i64(&[1, -2]).ge(&Weight::from_i64(&[0, -1])));
        // Lexicographic order with numeric components.
        assert!(Weight::from_i64(&[-2, 2]) < Weight::from_i64(&[-1, 3]));
        assert!(Weight::from_i64(&[2, -1]) < Weight::from_i64(&[4, -3]));
        assert_eq!(Weight::from_i64(&[1, -1]).to_string(), "(1,-1)");
    }

    #[test]
    fn construction_is_canonical() {
        let a = fixtures::balance_game();
        // Same data, scrambled input order.
        let b = GameGraph::new(
            2,
            vec![
                ("vR".into(), Player::Two),
                ("v0".into(), Player::One),
                ("vL".into(), Player::Two),
            ],
            vec![
                ("vR".into(), "v0".into(), Weight::from_i64(&[4, -3])),
                ("vL".into(), "v0".into(), Weight::from_i64(&[-1, 3])),
                ("v0".into(), "vR".into(), Weight::from_i64(&[0, 0])),
                ("vL".into(), "v0".into(), Weight::from_i64(&[-2, 2])),
                ("vR".into(), "v0".into(), Weight::from_i64(&[2, -1])),
                ("v0".into(), "vL".into(), Weight::from_i64(&[0, 0])),
            ],
        )
        .unwrap();
        assert_eq!(a, b);
        assert_eq!(a.edge_norm(), BigInt::from(4));
        assert_eq!(a.vertex_count(), 3);
        // Vertices sorted by id: v0 < vL < vR.
        assert_eq!(a.vertex(0).id, "v0");
        assert_eq!(a.vertex(1).id, "vL");
        assert_eq!(a.vertex(2).id, "vR");
    }

    #[test]
    fn construction_rejects_bad_input() {
        assert!(GameGraph::new(0, vec![("v".into(), Player::One)], vec![]).is_err());
        assert!(GameGraph::new(
            1,
            vec![("v".into(), Player::One), ("v".into(), Player::Two)],
            vec![]
        )
        .is_err());
        assert!(GameGraph::new(
            1,
            vec![("v".into(), Player::One)],
            vec![("v".into(), "w".into(), Weight::from_i64(&[1]))]
        )
        .is_err());
        assert!(GameGraph::new(
            2,
            vec![("v".into(), Player::One)],
            vec![("v".into(), "v".into(), Weight::from_i64(&[1]))]
        )
        .is_err());
    }

    #[test]
    fn parallel_equal_weight_edges_are_distinct() {
        let g = GameGraph::new(
            1,
            vec![("a".into(), Player::One), ("b".into(), Player::Two)],
            vec![
                ("a".into(), "b".into(), Weight::from_i64(&[1])),
                ("a".into(), "b".into(), Weight::from_i64(&[1])),
                ("b".into(), "a".into(), Weight::from_i64(&[-1])),
            ],
        )
        .unwrap();
        assert_eq!(g.edge_count(), 3);
        assert_eq!(g.edge(0).ordinal, 0);
        assert_eq!(g.edge(1).ordinal, 1);
        let cycles = enumerate_simple_cycles(&g, 100).unwrap();
        // Two distinct a->b->a cycles, one per parallel edge.
        assert_eq!(cycles.len(), 2);
    }

    #[test]
    fn validate_flags_all_violations() {
        // No outgoing edge + zero norm.
        let g = GameGraph::new(
            1,
            vec![("a".into(), Player::One), ("b".into(), Player::Two)],
            vec![("a".into(), "b".into(), Weight::from_i64(&[0]))],
        )
        .unwrap();
        let vs = validate(&g);
        assert!(vs.contains(&Violation::NoOutgoingEdge("b".into())));
        assert!(vs.contains(&Violation::ZeroEdgeNorm));

        // Player-2-only cycle.
        let g = GameGraph::new(
            1,
            vec![("a".into(), Player::Two), ("b".into(), Player::Two)],
            vec![
                ("a".into(), "b".into(), Weight::from_i64(&[1])),
                ("b".into(), "a".into(), Weight::from_i64(&[-1])),
            ],
        )
        .unwrap();
        let vs = validate(&g);
        assert!(matches!(vs[0], Violation::Player2OnlyCycle(_)));

        // The fixtures are valid.
        assert!(validate(&fixtures::balance_game()).is_empty());
        assert!(validate(&fixtures::drain_game()).is_empty());
    }

    #[test]
    fn normalize_cycles_splits_player2_edges() {
        let g = GameGraph::new(
            1,
            vec![("a".into(), Player::Two), ("b".into(), Player::Two)],
            vec![
                ("a".into(), "b".into(), Weight::from_i64(&[1])),
                ("b".into(), "a".into(), Weight::from_i64(&[-1])),
            ],
        )
        .unwrap();
        let n = normalize_cycles(&g).unwrap();
        assert!(validate(&n).is_empty());
        assert_eq!(n.vertex_count(), 4);
        assert_eq!(n.edge_count(), 4);
        // Weight rides the first half of each split; second half is zero.
        let mid = n.require_vertex("a--b--0").unwrap();
        assert_eq!(n.owner(mid), Player::One);
        let halves: Vec<_> = n.out_edges(mid).iter().map(|&e| n.edge(e)).collect();
        assert_eq!(halves.len(), 1);
        assert!(halves[0].weight.is_zero());
        // Idempotent on already-normalized graphs.
        let again = normalize_cycles(&n).unwrap();
        assert_eq!(again, n);
    }

    #[test]
    fn simple_cycles_of_the_fixtures() {
        // Balance graph: 2 two-edge cycles per Player-2 vertex (parallel return edges).
        let g = fixtures::balance_game();
        let cycles = enumerate_simple_cycles(&g, 100).unwrap();
        assert_eq!(cycles.len(), 4);
        let mut ws: Vec<Weight> = cycles.iter().map(|c| c.weight.clone()).collect();
        ws.sort();
        assert_eq!(
            ws,
            vec![
                Weight::from_i64(&[-2, 2]),
                Weight::from_i64(&[-1, 3]),
                Weight::from_i64(&[2, -1]),
                Weight::from_i64(&[4, -3]),
            ]
        );

        // Drain graph: two self-loops plus the central cycle (counted once, rooted at its
        // smallest vertex).
        let g = fixtures::drain_game();
        let cycles = enumerate_simple_cycles(&g, 100).unwrap();
        assert_eq!(cycles.len(), 3);
        assert_eq!(
            nonzero_cycle_weights(&g, 100).unwrap(),
            vec![
                Weight::from_i64(&[-1, -1]),
                Weight::from_i64(&[-1, 1]),
                Weight::from_i64(&[1, -1]),
            ]
        );
    }

    #[test]
    fn cycle_cap_is_enforced() {
        let g = fixtures::balance_game();
        match enumerate_simple_cycles(&g, 3) {
            Err(CoreError::Budget(_)) => {}
            other => panic!("expected budget error, got {other:?}"),
        }
    }

    #[test]
    fn cycle_weight_norm_is_bounded() {
        // Every simple-cycle weight has norm at most |V| * ‖E‖.
        for g in [fixtures::balance_game(), fixtures::drain_game()] {
            let bound = BigInt::from(g.vertex_count()) * g.edge_norm();
            for c in enumerate_simple_cycles(&g, 1000).unwrap() {
                assert!(c.weight.norm() <= bound, "cycle {} exceeds bound", c.display(&g));
            }
        }
    }

    #[test]
    fn trace_construction_and_validation() {
        let g = fixtures::balance_game();
        let prefix = fixtures::balance_play_prefix();
        let trace = Trace::from_configurations(&g, &prefix).unwrap();
        assert_eq!(trace.len(), 6);
        assert_eq!(trace.total_weight(), &Weight::from_i64(&[0, 1]));

        // Tampering with a level breaks validation.
        let mut bad = prefix.clone();
        bad[3].level = Weight::from_i64(&[7, 7]);
        assert!(Trace::from_configurations(&g, &bad).is_err());
        // Traces must start at level zero.
        let mut shifted = prefix;
        shifted[0].level = Weight::from_i64(&[1, 0]);
        assert!(Trace::from_configurations(&g, &shifted).is_err());
    }

    /// Independent hand-simulation oracle for the decomposition: walk the canonical play prefix,
    /// keep an explicit vertex stack, and record each cut loop. The expected popped weights below
    /// were derived by hand from the prefix levels ((0,0) → (-2,2) → (0,1) differences) and are
    /// frozen here; the energy identity (popped sum + residual weight = final level) cross-checks
    /// them.
    #[test]
    fn cycle_decomposition_on_the_balance_prefix() {
        let g = fixtures::balance_game();
        let trace =
            Trace::from_configurations(&g, &fixtures::balance_play_prefix()).unwrap();
        let mut stack = PathStack::new(trace.configurations()[0].vertex);
        let mut popped = Vec::new();
        for &e in trace.edges_taken() {
            if let Some(c) = cycle_decomposition_step(&g, &mut stack, e).unwrap() {
                popped.push(c.weight);
            }
        }
        assert_eq!(
            popped,
            vec![
                Weight::from_i64(&[-2, 2]),
                Weight::from_i64(&[4, -3]),
                Weight::from_i64(&[-2, 2]),
            ]
        );
        // Residual path is the lone start vertex; identity: popped sum = total weight.
        assert_eq!(stack.vertices(), vec![trace.configurations()[0].vertex]);
        let mut sum = Weight::zero(2);
        for w in &popped {
            sum = sum.add(w);
        }
        assert_eq!(&sum, trace.total_weight());
    }

    #[test]
    fn decomposition_rejects_detached_edges() {
        let g = fixtures::balance_game();
        let v0 = g.require_vertex("v0").unwrap();
        let vr = g.require_vertex("vR").unwrap();
        let mut stack = PathStack::new(v0);
        // An edge out of vR cannot be pushed while the head is v0.
        let stray = g.out_edges(vr)[0];
        assert!(cycle_decomposition_step(&g, &mut stack, stray).is_err());
    }
}
