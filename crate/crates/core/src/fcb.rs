//! Exhaustive solver for first-cycle bounding games.
//!
//! The first-cycle bounding game on a graph plays like the bounding game, but ends at the first
//! revisit of a vertex. On top of the edge moves, Player 2 annotates the play: whenever the
//! token sits at a Player-1 vertex, Player 2 first picks a *colour* — a perfect half-space from
//! the M-generated universe with `M = |V|·‖E‖` — and only then Player 1 picks the edge, whose
//! occurrence in the play becomes coloured. When the first cycle `C` closes, Player 2 wins if
//! and only if `w(C)` lies in the least common ancestor of the colours on the cycle's
//! Player-1 edges.
//!
//! The game is finite (paths are simple, colour palettes finite) and of perfect information,
//! hence determined; [`solve_fcb`] computes the exact value by depth-first search and returns a
//! full decision table for *both* players at *every* legal state — nothing is pruned — so the
//! extracted [`FCBStrategy`] can be consulted at any coloured simple path that can ever arise,
//! not just along the minimax line. Search order is deterministic (colours in the given
//! universe order, edges in canonical order, first winning child retained), which makes
//! extracted strategies reproducible run to run.

use std::collections::HashMap;
use std::fmt::Write as _;

use num_bigint::BigInt;

use crate::error::{CoreError, Result};
use crate::game::{EdgeIdx, GameGraph, Player, VertexIdx, Weight};
use crate::geometry::{lca, PerfectHalfSpace};

/// One move of the first-cycle game: an edge, coloured exactly when it leaves a Player-1 vertex.
#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct ColouredStep {
    pub edge: EdgeIdx,
    pub colour: Option<PerfectHalfSpace>,
}

/// A state of the first-cycle game: the coloured simple path played so far. The solver only
/// produces states whose vertices are pairwise distinct (the game ends at the first revisit);
/// [`FCBState::extend`] does not re-check this, so hand-built states may be outside every
/// strategy's domain.
#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct FCBState {
    start: VertexIdx,
    steps: Vec<ColouredStep>,
}

impl FCBState {
    /// The empty path at the initial vertex.
    pub fn initial(v0: VertexIdx) -> FCBState {
        FCBState { start: v0, steps: Vec::new() }
    }

    /// The path extended by one step.
    pub fn extend(&self, step: ColouredStep) -> FCBState {
        let mut steps = self.steps.clone();
        steps.push(step);
        FCBState { start: self.start, steps }
    }

    pub fn start(&self) -> VertexIdx {
        self.start
    }

    pub fn steps(&self) -> &[ColouredStep] {
        &self.steps
    }

    pub fn len(&self) -> usize {
        self.steps.len()
    }

    pub fn is_empty(&self) -> bool {
        self.steps.is_empty()
    }

    /// The vertex the token is on.
    pub fn current(&self, g: &GameGraph) -> VertexIdx {
        self.steps.last().map_or(self.start, |s| g.edge(s.edge).dst)
    }

    /// All path vertices in order, starting with the initial vertex.
    pub fn path_vertices(&self, g: &GameGraph) -> Vec<VertexIdx> {
        let mut vs = vec![self.start];
        vs.extend(self.steps.iter().map(|s| g.edge(s.edge).dst));
        vs
    }

    /// Stable text encoding for strategy dumps and logs.
    pub fn encoding(&self, g: &GameGraph) -> String {
        let mut s = g.vertex(self.start).id.clone();
        for step in &self.steps {
            let e = g.edge(step.edge);
            let _ = write!(s, " -{}", e.weight);
            if let Some(h) = &step.colour {
                let _ = write!(s, "[{}]", h.encoding());
            }
            let _ = write!(s, "-> {}", g.vertex(e.dst).id);
        }
        s
    }
}

/// The norm bound of the default colour universe for a graph: `M = |V|·‖E‖`.
pub fn fcb_universe_norm(g: &GameGraph) -> BigInt {
    BigInt::from(g.vertex_count()) * g.edge_norm()
}

/// Decide a completed first cycle: Player 2 wins iff the cycle's total weight lies in the least
/// common ancestor of the colours on its Player-1 edges. A cycle without a single coloured step
/// would come from a graph violating the every-cycle-has-a-Player-1-vertex assumption.
pub fn evaluate_cycle(g: &GameGraph, cycle: &[ColouredStep]) -> Result<Player> {
    if cycle.is_empty() {
        return Err(CoreError::InvalidInput("cannot evaluate an empty cycle".into()));
    }
    let mut w = Weight::zero(g.dimension());
    for s in cycle {
        w = w.add(&g.edge(s.edge).weight);
    }
    let colours: Vec<PerfectHalfSpace> =
        cycle.iter().filter_map(|s| s.colour.clone()).collect();
    if colours.is_empty() {
        return Err(CoreError::InvalidInput(
            "first cycle has no coloured step; the graph has a cycle without Player-1 vertices"
                .into(),
        ));
    }
    let ancestor = lca(&colours)?;
    Ok(if ancestor.contains(&w) { Player::Two } else { Player::One })
}

/// Decision tables for both players of a first-cycle game, total over every legal state.
///
/// For Player 2: a colour per state at a Player-1 vertex and an edge per state at a Player-2
/// vertex. For Player 1: an edge per (state at a Player-1 vertex, offered colour) pair. Each
/// entry is the first winning child in search order when one exists, the first child otherwise;
/// `for_player` names the game's winner, whose entries form a winning strategy.
#[derive(Debug, Clone)]
pub struct FCBStrategy {
    for_player: Player,
    colour_choice: HashMap<FCBState, PerfectHalfSpace>,
    p2_edges: HashMap<FCBState, EdgeIdx>,
    p1_edges: HashMap<FCBState, HashMap<PerfectHalfSpace, EdgeIdx>>,
}

/// A single consulted decision: Player 2's colour at a Player-1 vertex, or an edge.
#[derive(Debug, Clone, PartialEq, Eq)]
pub enum FCBDecision {
    Colour(PerfectHalfSpace),
    Edge(EdgeIdx),
}

impl FCBStrategy {
    /// The player whose entries form a winning strategy.
    pub fn for_player(&self) -> Player {
        self.for_player
    }

    /// Text table of every stored decision, sorted by state encoding.
    pub fn dump(&self, g: &GameGraph) -> String {
        let mut lines: Vec<String> = Vec::new();
        for (state, h) in &self.colour_choice {
            lines.push(format!("{} => colour {}", state.encoding(g), h.encoding()));
        }
        for (state, &e) in &self.p2_edges {
            lines.push(format!("{} => edge {}", state.encoding(g), g.display_edge(e)));
        }
        for (state, per_colour) in &self.p1_edges {
            for (h, &e) in per_colour {
                lines.push(format!(
                    "{} ? {} => edge {}",
                    state.encoding(g),
                    h.encoding(),
                    g.display_edge(e)
                ));
            }
        }
        lines.sort();
        lines.join("\n")
    }
}

/// Consult a strategy table. With `offered = Some(h)`: Player 1's edge for the state under
/// colour `h`. With `offered = None`: Player 2's decision — a colour at Player-1 vertices, an
/// edge at Player-2 vertices. Unknown states (including any with a repeated vertex, where the
/// game is already over) are an error.
pub fn fcb_move(
    strategy: &FCBStrategy,
    state: &FCBState,
    offered: Option<&PerfectHalfSpace>,
) -> Result<FCBDecision> {
    let found = match offered {
        Some(h) => strategy
            .p1_edges
            .get(state)
            .and_then(|per| per.get(h))
            .map(|&e| FCBDecision::Edge(e)),
        None => strategy
            .colour_choice
            .get(state)
            .map(|h| FCBDecision::Colour(h.clone()))
            .or_else(|| strategy.p2_edges.get(state).map(|&e| FCBDecision::Edge(e))),
    };
    found.ok_or_else(|| {
        CoreError::InvalidInput("strategy is undefined on the queried state".into())
    })
}

struct Searcher<'a> {
    g: &'a GameGraph,
    universe: &'a [PerfectHalfSpace],
    budget: usize,
    visited: usize,
    strategy: FCBStrategy,
}

impl Searcher<'_> {
    fn charge(&mut self) -> Result<()> {
        self.visited += 1;
        if self.visited > self.budget {
            return Err(CoreError::Budget(format!(
                "first-cycle search exceeded the budget of {} states",
                self.budget
            )));
        }
        Ok(())
    }

    /// Value after taking edge `e` from the current state: either the first cycle closes and is
    /// evaluated, or the path extends and the subgame decides.
    fn after_edge(
        &mut self,
        state: &FCBState,
        on_path: &mut Vec<VertexIdx>,
        e: EdgeIdx,
        colour: Option<&PerfectHalfSpace>,
    ) -> Result<Player> {
        let u = self.g.edge(e).dst;
        let step = ColouredStep { edge: e, colour: colour.cloned() };
        if let Some(pos) = on_path.iter().position(|&x| x == u) {
            let mut cycle: Vec<ColouredStep> = state.steps[pos..].to_vec();
            cycle.push(step);
            evaluate_cycle(self.g, &cycle)
        } else {
            let next = state.extend(step);
            on_path.push(u);
            let value = self.value(&next, on_path);
            on_path.pop();
            value
        }
    }

    fn value(&mut self, state: &FCBState, on_path: &mut Vec<VertexIdx>) -> Result<Player> {
        self.charge()?;
        let v = *on_path.last().expect("path always holds the start vertex");
        match self.g.owner(v) {
            Player::One => {
                // Player 2 quantifies over colours; under each colour Player 1 picks the edge.
                let mut best_colour: Option<&PerfectHalfSpace> = None;
                for h in self.universe {
                    self.charge()?;
                    let mut best_edge: Option<EdgeIdx> = None;
                    let mut colour_value = Player::Two;
                    for &e in self.g.out_edges(v) {
                        let val = self.after_edge(state, on_path, e, Some(h))?;
                        if val == Player::One && best_edge.is_none() {
                            best_edge = Some(e);
                            colour_value = Player::One;
                        }
                    }
                    self.strategy
                        .p1_edges
                        .entry(state.clone())
                        .or_default()
                        .insert(h.clone(), best_edge.unwrap_or(self.g.out_edges(v)[0]));
                    if colour_value == Player::Two && best_colour.is_none() {
                        best_colour = Some(h);
                    }
                }
                let value = if best_colour.is_some() { Player::Two } else { Player::One };
                self.strategy
                    .colour_choice
                    .insert(state.clone(), best_colour.unwrap_or(&self.universe[0]).clone());
                Ok(value)
            }
            Player::Two => {
                let mut best_edge: Option<EdgeIdx> = None;
                for &e in self.g.out_edges(v) {
                    let val = self.after_edge(state, on_path, e, None)?;
                    if val == Player::Two && best_edge.is_none() {
                        best_edge = Some(e);
                    }
                }
                let value = if best_edge.is_some() { Player::Two } else { Player::One };
                self.strategy
                    .p2_edges
                    .insert(state.clone(), best_edge.unwrap_or(self.g.out_edges(v)[0]));
                Ok(value)
            }
        }
    }
}

/// Solve the first-cycle bounding game from `v0` over the given colour universe (normally the
/// full M-generated universe with `M = ` [`fcb_universe_norm`]; restrictions and reorders are
/// allowed — the value is universe-order independent, tie-breaks are not).
///
/// Returns the winner and the full decision table. The search is exhaustive: every legal
/// coloured simple path from `v0` is visited and receives entries for both players, so the
/// result can drive later simulations from any reachable position. `budget` caps the number of
/// visited search nodes.
pub fn solve_fcb(
    g: &GameGraph,
    v0: VertexIdx,
    universe: &[PerfectHalfSpace],
    budget: usize,
) -> Result<(Player, FCBStrategy)> {
    g.ensure_valid()?;
    if universe.is_empty() {
        return Err(CoreError::InvalidInput(
            "first-cycle games need a nonempty colour universe".into(),
        ));
    }
    let mut searcher = Searcher {
        g,
        universe,
        budget,
        visited: 0,
        strategy: FCBStrategy {
            for_player: Player::One,
            colour_choice: HashMap::new(),
            p2_edges: HashMap::new(),
            p1_edges: HashMap::new(),
        },
    };
    let state = FCBState::initial(v0);
    let mut on_path = vec![v0];
    let winner = searcher.value(&state, &mut on_path)?;
    let mut strategy = searcher.strategy;
    strategy.for_player = winner;
    Ok((winner, strategy))
}

/// Certificate check: play `strategy.for_player()`'s stored decisions against an exhaustively
/// branching opponent and report whether every completed first cycle is won. `universe` is the
/// colour palette the opponent may offer when the certified player is Player 1.
pub fn verify_fcb_strategy(
    g: &GameGraph,
    v0: VertexIdx,
    universe: &[PerfectHalfSpace],
    strategy: &FCBStrategy,
) -> Result<bool> {
    fn walk(
        g: &GameGraph,
        universe: &[PerfectHalfSpace],
        strategy: &FCBStrategy,
        state: &FCBState,
        on_path: &mut Vec<VertexIdx>,
    ) -> Result<bool> {
        let v = *on_path.last().expect("path always holds the start vertex");
        let take = |e: EdgeIdx, colour: Option<&PerfectHalfSpace>| ColouredStep {
            edge: e,
            colour: colour.cloned(),
        };
        let mut outcomes = Vec::new();
        let mut moves: Vec<(EdgeIdx, Option<PerfectHalfSpace>)> = Vec::new();
        match (g.owner(v), strategy.for_player) {
            (Player::One, Player::Two) => {
                let FCBDecision::Colour(h) = fcb_move(strategy, state, None)? else {
                    return Err(CoreError::Falsification(
                        "stored Player-2 decision at a Player-1 vertex is not a colour".into(),
                    ));
                };
                for &e in g.out_edges(v) {
                    moves.push((e, Some(h.clone())));
                }
            }
            (Player::One, Player::One) => {
                for h in universe {
                    let FCBDecision::Edge(e) = fcb_move(strategy, state, Some(h))? else {
                        return Err(CoreError::Falsification(
                            "stored Player-1 decision is not an edge".into(),
                        ));
                    };
                    moves.push((e, Some(h.clone())));
                }
            }
            (Player::Two, Player::Two) => {
                let FCBDecision::Edge(e) = fcb_move(strategy, state, None)? else {
                    return Err(CoreError::Falsification(
                        "stored Player-2 decision at a Player-2 vertex is not an edge".into(),
                    ));
                };
                moves.push((e, None));
            }
            (Player::Two, Player::One) => {
                for &e in g.out_edges(v) {
                    moves.push((e, None));
                }
            }
        }
        for (e, colour) in moves {
            let u = g.edge(e).dst;
            let step = take(e, colour.as_ref());
            if let Some(pos) = on_path.iter().position(|&x| x == u) {
                let mut cycle: Vec<ColouredStep> = state.steps[pos..].to_vec();
                cycle.push(step);
                outcomes.push(evaluate_cycle(g, &cycle)? == strategy.for_player);
            } else {
                let next = state.extend(step);
                on_path.push(u);
                let ok = walk(g, universe, strategy, &next, on_path)?;
                on_path.pop();
                outcomes.push(ok);
            }
        }
        Ok(outcomes.iter().all(|&b| b))
    }
    let state = FCBState::initial(v0);
    let mut on_path = vec![v0];
    walk(g, universe, strategy, &state, &mut on_path)
}
