//! Strategy liftings from the first-cycle game to the infinite bounding game, and an
//! instrumented simulator that plays them against each other or against simple adversaries.
//!
//! Two liftings are provided.
//!
//! - **Player 2's cycle-cutting lift** ([`P2Memory`], [`p2_lift_step`]): replays a first-cycle
//!   strategy forever by keeping the residual simple path of the play and cutting every
//!   completed cycle out of its memory. If the underlying table wins the first-cycle game, every
//!   cycle of the real play is charged to Player 1, whose levels then drift without bound.
//! - **Player 1's counter automaton** ([`P1Memory`], [`p1_auto_step`]): keeps a coloured simple
//!   path `γ`, a current colour `ℋ` (a perfect half-space), and counters `c(k, W)` for every
//!   level `k` and every nonzero simple-cycle weight `W`. Each popped cycle increments the
//!   counters of its weight; when a counter in the trigger zone of some chain level reaches the
//!   soft bound, the automaton either *shifts* that level's half-space or performs a
//!   *cancellation*, trading a zero-sum combination of counted cycles for nothing. The running
//!   energy level of the play always equals `w(γ) + Σ_W c(d, W) · W` — asserted after every
//!   simulated step.
//!
//! The numeric thresholds live in a [`BoundsPack`]. The true bounds are astronomically large, so
//! shifts and cancellations never trigger in direct simulation; [`BoundsPack::scaled_for_tests`]
//! substitutes small thresholds to exercise those code paths. Scaled packs are marked
//! non-certified: the automaton's guarantees are only proved for the true values.

use std::collections::HashMap;
use std::fmt;

use num_bigint::BigInt;
use num_traits::Zero;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use crate::error::{CoreError, Result};
use crate::fcb::{
    fcb_move, fcb_universe_norm, solve_fcb, ColouredStep, FCBDecision, FCBState, FCBStrategy,
};
use crate::game::{
    nonzero_cycle_weights, Configuration, EdgeIdx, GameGraph, PathStack, Player, VertexIdx,
    Weight,
};
use crate::geometry::{bound_l, PerfectHalfSpace, Universe};
use crate::linalg::{bound_s, positive_kernel_solution, ColumnSystem};

/// Default cap on the simple-cycle enumeration backing a counter table.
pub const DEFAULT_CYCLE_CAP: usize = 100_000;

// ---------------------------------------------------------------------------
// Bounds
// ---------------------------------------------------------------------------

/// The numeric thresholds of the counter automaton, all exact big integers computed from
/// `(|V|, ‖E‖, d)`:
///
/// - `b`: the global norm bound `(4|V|·‖E‖)^(2(d+2)³)` under which a bounded play can be kept;
/// - `soft(k)`: the level-`k` soft bound `𝒰(k) = (4|V|·‖E‖)^(2k(d+2)²)` that triggers an event;
/// - `slack(k)`: the cancellation quantum `u(k) = (4|V|·‖E‖)^((2k−1)(d+2)²)`; counters never
///   reach `soft(k) + slack(k)` (the hard bound);
/// - `solution_norm(k)`: the size bound `(2(|V|·‖E‖+1))^((k+2)²)` on positive kernel solutions
///   used by level-`k` cancellations;
/// - `halfspace_count(k)`: the bound `2(2|V|·‖E‖+1)^(d(k−1))` on the number of open half-spaces
///   available at chain level `k`.
///
/// A pack computed by [`bounds`] is *certified*: the automaton's correctness argument applies.
/// Packs produced by [`BoundsPack::scaled_for_tests`] are not.
#[derive(Debug, Clone)]
pub struct BoundsPack {
    levels: usize,
    b: BigInt,
    soft: Vec<BigInt>,
    slack: Vec<BigInt>,
    solution_norm: Vec<BigInt>,
    halfspace_count: Vec<BigInt>,
    certified: bool,
}

/// Compute the exact threshold pack for a game graph.
pub fn bounds(g: &GameGraph) -> Result<BoundsPack> {
    g.ensure_valid()?;
    let d = g.dimension();
    let m = fcb_universe_norm(g);
    let base = BigInt::from(4) * &m;
    let sq = (d + 2) * (d + 2);
    let mut soft = Vec::with_capacity(d);
    let mut slack = Vec::with_capacity(d);
    let mut solution_norm = Vec::with_capacity(d);
    let mut halfspace_count = Vec::with_capacity(d);
    for k in 1..=d {
        soft.push(num_traits::pow::pow(base.clone(), 2 * k * sq));
        slack.push(num_traits::pow::pow(base.clone(), (2 * k - 1) * sq));
        solution_norm.push(bound_s(&m, k)?);
        halfspace_count.push(bound_l(k, &m, d)?);
    }
    Ok(BoundsPack {
        levels: d,
        b: num_traits::pow::pow(base, 2 * (d + 2) * sq),
        soft,
        slack,
        solution_norm,
        halfspace_count,
        certified: true,
    })
}

impl BoundsPack {
    /// Number of levels (the weight dimension `d`).
    pub fn levels(&self) -> usize {
        self.levels
    }

    /// The global norm bound `B`.
    pub fn b(&self) -> &BigInt {
        &self.b
    }

    /// The level-`k` soft bound `𝒰(k)`, `1 ≤ k ≤ d`.
    pub fn soft(&self, k: usize) -> &BigInt {
        assert!(1 <= k && k <= self.levels, "level {k} out of range 1..={}", self.levels);
        &self.soft[k - 1]
    }

    /// The level-`k` cancellation quantum `u(k)`.
    pub fn slack(&self, k: usize) -> &BigInt {
        assert!(1 <= k && k <= self.levels, "level {k} out of range 1..={}", self.levels);
        &self.slack[k - 1]
    }

    /// The level-`k` hard bound `𝒰(k) + u(k)`, never reached by any counter in the level's span.
    pub fn hard(&self, k: usize) -> BigInt {
        self.soft(k) + self.slack(k)
    }

    /// The level-`k` positive-kernel solution-size bound `𝒮(k)`.
    pub fn solution_norm(&self, k: usize) -> &BigInt {
        assert!(1 <= k && k <= self.levels, "level {k} out of range 1..={}", self.levels);
        &self.solution_norm[k - 1]
    }

    /// The bound `ℒ(k)` on the number of open half-spaces available at chain level `k`.
    pub fn halfspace_count(&self, k: usize) -> &BigInt {
        assert!(1 <= k && k <= self.levels, "level {k} out of range 1..={}", self.levels);
        &self.halfspace_count[k - 1]
    }

    /// Whether the automaton's correctness argument applies to these thresholds (false for
    /// scaled packs).
    pub fn certified(&self) -> bool {
        self.certified
    }

    /// Replace the soft bound and slack of the listed levels with small test values, keeping all
    /// other levels exact. Each override is `(level, soft, slack)`.
    ///
    /// The result still has to be a plausible threshold ladder — `0 < slack(k) < soft(k)` and
    /// `soft(k) + slack(k) ≤ slack(k+1)` — otherwise the automaton's bookkeeping would be
    /// meaningless and the call errors. The returned pack is marked non-certified: it exists to
    /// exercise the shift/cancellation machinery in tests, and none of the proved guarantees
    /// apply to it.
    pub fn scaled_for_tests(&self, overrides: &[(usize, u64, u64)]) -> Result<BoundsPack> {
        let mut pack = self.clone();
        for &(k, soft, slack) in overrides {
            if k == 0 || k > pack.levels {
                return Err(CoreError::InvalidInput(format!(
                    "override level {k} out of range 1..={}",
                    pack.levels
                )));
            }
            pack.soft[k - 1] = BigInt::from(soft);
            pack.slack[k - 1] = BigInt::from(slack);
        }
        for k in 1..=pack.levels {
            if !pack.slack[k - 1].is_positive_nonzero() || pack.slack[k - 1] >= pack.soft[k - 1] {
                return Err(CoreError::InvalidInput(format!(
                    "scaled bounds need 0 < slack < soft at level {k}"
                )));
            }
            if k < pack.levels {
                let hard = &pack.soft[k - 1] + &pack.slack[k - 1];
                if hard > pack.slack[k] {
                    return Err(CoreError::InvalidInput(format!(
                        "scaled bounds break the ladder: soft({k}) + slack({k}) exceeds slack({})",
                        k + 1
                    )));
                }
            }
        }
        pack.certified = false;
        Ok(pack)
    }
}

trait PositiveNonzero {
    fn is_positive_nonzero(&self) -> bool;
}

impl PositiveNonzero for BigInt {
    fn is_positive_nonzero(&self) -> bool {
        *self > BigInt::zero()
    }
}

// ---------------------------------------------------------------------------
// Counter table
// ---------------------------------------------------------------------------

/// The automaton's counters: one nonnegative big integer per `(level k, cycle weight W)` pair,
/// over the fixed domain of the graph's nonzero simple-cycle weights.
///
/// The values are monotone in the level — `c(k, W) ≤ c(k′, W)` for `k ≤ k′` — because
/// increments touch all levels, subtractions touch an upward-closed range of levels, and resets
/// touch a downward-closed one. [`CounterTable::ensure_monotone`] re-checks this after every
/// mutation the automaton makes.
#[derive(Debug, Clone)]
pub struct CounterTable {
    levels: usize,
    dim: usize,
    weights: Vec<Weight>,
    values: Vec<Vec<BigInt>>,
}

impl CounterTable {
    /// Fresh table over the given weight domain, all counters zero. The domain is sorted and
    /// deduplicated; zero weights are never counted and are dropped.
    pub fn new(levels: usize, dim: usize, mut weights: Vec<Weight>) -> CounterTable {
        weights.retain(|w| !w.is_zero());
        weights.sort();
        weights.dedup();
        let values = vec![vec![BigInt::zero(); weights.len()]; levels];
        CounterTable { levels, dim, weights, values }
    }

    /// The counted weight domain, sorted.
    pub fn weights(&self) -> &[Weight] {
        &self.weights
    }

    /// Number of levels.
    pub fn levels(&self) -> usize {
        self.levels
    }

    fn index_of(&self, w: &Weight) -> Option<usize> {
        self.weights.binary_search(w).ok()
    }

    fn value_at(&self, k: usize, i: usize) -> &BigInt {
        &self.values[k - 1][i]
    }

    /// The counter `c(k, w)`; zero is reported for weights outside the domain only if they are
    /// zero weights (which are never counted) — anything else is a domain error.
    pub fn get(&self, k: usize, w: &Weight) -> Result<&BigInt> {
        if k == 0 || k > self.levels {
            return Err(CoreError::InvalidInput(format!(
                "counter level {k} out of range 1..={}",
                self.levels
            )));
        }
        let i = self.index_of(w).ok_or_else(|| {
            CoreError::InvalidInput(format!("weight {w} is not in the counter domain"))
        })?;
        Ok(self.value_at(k, i))
    }

    /// Increment `c(k, w)` for every level `k`. The weight must be a nonzero member of the
    /// domain; popped simple cycles always are, so a miss indicates a broken precomputation.
    pub fn increment_all_levels(&mut self, w: &Weight) -> Result<()> {
        let i = self.index_of(w).ok_or_else(|| {
            CoreError::Falsification(format!(
                "popped simple-cycle weight {w} is missing from the precomputed counter domain"
            ))
        })?;
        for row in &mut self.values {
            row[i] += 1;
        }
        Ok(())
    }

    /// Reset every counter at levels strictly below `k` to zero.
    pub fn reset_below(&mut self, k: usize) {
        for row in self.values.iter_mut().take(k.saturating_sub(1)) {
            for v in row.iter_mut() {
                *v = BigInt::zero();
            }
        }
    }

    /// Subtract `amount` from `c(k′, w)` for every level `k′ ∈ {k, …, d}`. Driving any counter
    /// negative is a falsification: cancellations are proved to stay nonnegative.
    pub fn subtract_from_level_up(&mut self, k: usize, w: &Weight, amount: &BigInt) -> Result<()> {
        let i = self.index_of(w).ok_or_else(|| {
            CoreError::InvalidInput(format!("weight {w} is not in the counter domain"))
        })?;
        for row in self.values.iter_mut().skip(k - 1) {
            if row[i] < *amount {
                return Err(CoreError::Falsification(format!(
                    "cancellation would drive the counter of {w} negative ({} − {amount})",
                    row[i]
                )));
            }
            row[i] -= amount;
        }
        Ok(())
    }

    /// All nonzero entries as `(level, weight, value)`, sorted by level then weight.
    pub fn snapshot(&self) -> Vec<(usize, Weight, BigInt)> {
        let mut out = Vec::new();
        for (row, values) in self.values.iter().enumerate() {
            for (i, v) in values.iter().enumerate() {
                if !v.is_zero() {
                    out.push((row + 1, self.weights[i].clone(), v.clone()));
                }
            }
        }
        out
    }

    /// Check level-monotonicity of every counter.
    pub fn ensure_monotone(&self) -> Result<()> {
        for k in 1..self.levels {
            for i in 0..self.weights.len() {
                if self.values[k - 1][i] > self.values[k][i] {
                    return Err(CoreError::Falsification(format!(
                        "counter of {} dropped from {} at level {k} to {} at level {}",
                        self.weights[i],
                        self.values[k - 1][i],
                        self.values[k][i],
                        k + 1
                    )));
                }
            }
        }
        Ok(())
    }

    /// The weighted sum `Σ_W c(k, W) · W` of the level-`k` counters.
    pub fn level_combination(&self, k: usize) -> Weight {
        let mut total = Weight::zero(self.dim);
        for (i, w) in self.weights.iter().enumerate() {
            let c = self.value_at(k, i);
            if !c.is_zero() {
                total = total.add(&w.scale(c));
            }
        }
        total
    }
}

// ---------------------------------------------------------------------------
// Events
// ---------------------------------------------------------------------------

/// The two colour-update events of the counter automaton.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum EventKind {
    Shift,
    Cancel,
}

impl EventKind {
    pub fn as_str(self) -> &'static str {
        match self {
            EventKind::Shift => "shift",
            EventKind::Cancel => "cancel",
        }
    }
}

/// One colour-update event: its kind, the chain level it fired at, and the encoding of the
/// colour adopted afterwards.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct EventRecord {
    pub kind: EventKind,
    pub level: usize,
    pub colour: String,
}

/// An [`EventRecord`] stamped with the simulation step at which it fired.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct LoggedEvent {
    pub t: usize,
    pub record: EventRecord,
}

impl fmt::Display for LoggedEvent {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(
            f,
            "t={} kind={} k={} colour={}",
            self.t,
            self.record.kind.as_str(),
            self.record.level,
            self.record.colour
        )
    }
}

// ---------------------------------------------------------------------------
// Player 2 lift
// ---------------------------------------------------------------------------

/// Memory of Player 2's lifted strategy: the residual simple path of the play (cycles cut out as
/// they complete), the level last observed, and the colour chosen at the current Player-1 vertex
/// but not yet attached to an edge.
#[derive(Debug, Clone)]
pub struct P2Memory {
    path: PathStack<ColouredStep>,
    last_level: Weight,
    pending: Option<PerfectHalfSpace>,
    started: bool,
}

impl P2Memory {
    /// Fresh memory sitting at `v0` with level zero.
    pub fn new(g: &GameGraph, v0: VertexIdx) -> P2Memory {
        P2Memory {
            path: PathStack::new(v0),
            last_level: Weight::zero(g.dimension()),
            pending: None,
            started: false,
        }
    }

    /// The residual path as a first-cycle game state.
    pub fn residual_state(&self) -> FCBState {
        let mut state = FCBState::initial(self.path.start());
        for step in self.path.steps() {
            state = state.extend(step.payload.clone());
        }
        state
    }

    /// Number of steps on the residual path.
    pub fn path_len(&self) -> usize {
        self.path.steps().len()
    }
}

/// Advance Player 2's lifted strategy by one observation and return its decision.
///
/// Call this once per configuration of the play, in order, starting with the initial one. Each
/// call after the first infers the move just taken from the previous and current configurations
/// (an error if no edge matches), extends the residual path — cutting the cycle if the move
/// closed one — and attaches the previously chosen colour when the move left a Player-1 vertex.
/// The decision returned is the table's choice at the current configuration: an edge at
/// Player-2 vertices, a colour (also recorded internally) at Player-1 vertices.
pub fn p2_lift_step(
    g: &GameGraph,
    strategy: &FCBStrategy,
    mut mem: P2Memory,
    observed: &Configuration,
) -> Result<(FCBDecision, P2Memory)> {
    if !mem.started {
        if observed.vertex != mem.path.start() || !observed.level.is_zero() {
            return Err(CoreError::InvalidInput(format!(
                "first observation {} is not the initial configuration of vertex {}",
                observed.display(g),
                g.vertex(mem.path.start()).id
            )));
        }
        mem.started = true;
    } else {
        let from = mem.path.current();
        let delta = observed.level.sub(&mem.last_level);
        let edge = g
            .out_edges(from)
            .iter()
            .copied()
            .find(|&e| g.edge(e).dst == observed.vertex && g.edge(e).weight == delta)
            .ok_or_else(|| {
                CoreError::InvalidInput(format!(
                    "observation {} is not one move after the remembered position at {}",
                    observed.display(g),
                    g.vertex(from).id
                ))
            })?;
        let colour = if g.owner(from) == Player::One {
            Some(mem.pending.take().ok_or_else(|| {
                CoreError::InvalidInput(
                    "a Player-1 move was observed but no colour was chosen for it; \
                     feed every configuration to the lift in order"
                        .into(),
                )
            })?)
        } else {
            None
        };
        let weight = g.edge(edge).weight.clone();
        mem.path.push(observed.vertex, ColouredStep { edge, colour }, weight);
        if mem.path.steps().len() >= g.vertex_count() {
            return Err(CoreError::Falsification(format!(
                "residual path grew to {} steps on a {}-vertex graph",
                mem.path.steps().len(),
                g.vertex_count()
            )));
        }
    }
    mem.last_level = observed.level.clone();

    let state = mem.residual_state();
    let decision = fcb_move(strategy, &state, None)?;
    if let FCBDecision::Colour(h) = &decision {
        mem.pending = Some(h.clone());
    }
    Ok((decision, mem))
}

// ---------------------------------------------------------------------------
// Player 1 automaton
// ---------------------------------------------------------------------------

/// Memory of Player 1's counter automaton: the coloured residual path `γ`, the current colour
/// `ℋ`, and the counter table. The invariant maintained (and asserted by the simulator) is the
/// energy identity: the play's current level equals `w(γ) + Σ_W c(d, W) · W`.
#[derive(Debug, Clone)]
pub struct P1Memory {
    gamma: PathStack<ColouredStep>,
    colour: PerfectHalfSpace,
    counters: CounterTable,
    dim: usize,
    started: bool,
    /// Domain indices of weights inside `⟨H_k⟩`, per level (cache, rebuilt on colour changes).
    span_members: Vec<Vec<usize>>,
    /// Domain indices of weights inside the trigger zone `⟨H_k⟩ ∖ closure(H_k)`, per level.
    strict_members: Vec<Vec<usize>>,
}

impl P1Memory {
    /// Fresh memory at `v0`: `γ = (v0)`, the order-minimal colour of the universe, all counters
    /// zero. `cycle_cap` bounds the simple-cycle enumeration that fixes the counter domain.
    pub fn new(
        g: &GameGraph,
        v0: VertexIdx,
        universe: &Universe,
        cycle_cap: usize,
    ) -> Result<P1Memory> {
        g.ensure_valid()?;
        if v0 >= g.vertex_count() {
            return Err(CoreError::InvalidInput(format!("vertex index {v0} out of range")));
        }
        let d = g.dimension();
        if universe.dimension() != d {
            return Err(CoreError::InvalidInput(format!(
                "universe dimension {} does not match the graph dimension {d}",
                universe.dimension()
            )));
        }
        let domain = nonzero_cycle_weights(g, cycle_cap)?;
        let counters = CounterTable::new(d, d, domain);
        let mut mem = P1Memory {
            gamma: PathStack::new(v0),
            colour: universe.minimal_colour().clone(),
            counters,
            dim: d,
            started: false,
            span_members: Vec::new(),
            strict_members: Vec::new(),
        };
        mem.refresh_zones()?;
        Ok(mem)
    }

    /// The current colour `ℋ`.
    pub fn colour(&self) -> &PerfectHalfSpace {
        &self.colour
    }

    /// The counter table.
    pub fn counters(&self) -> &CounterTable {
        &self.counters
    }

    /// The residual coloured path as a first-cycle game state.
    pub fn gamma_state(&self) -> FCBState {
        let mut state = FCBState::initial(self.gamma.start());
        for step in self.gamma.steps() {
            state = state.extend(step.payload.clone());
        }
        state
    }

    /// The level the memory implies: `w(γ) + Σ_W c(d, W) · W`.
    pub fn implied_level(&self) -> Weight {
        self.gamma.total_weight(self.dim).add(&self.counters.level_combination(self.dim))
    }

    /// Ingest an opponent's move (an edge leaving a Player-2 vertex at the end of `γ`).
    pub fn observe(&mut self, g: &GameGraph, e: EdgeIdx) -> Result<()> {
        if g.owner(g.edge(e).src) != Player::Two {
            return Err(CoreError::InvalidInput(
                "observe ingests opponent moves; the automaton's own moves are recorded by \
                 p1_auto_step"
                    .into(),
            ));
        }
        self.ingest(g, e, None)
    }

    fn ingest(&mut self, g: &GameGraph, e: EdgeIdx, colour: Option<PerfectHalfSpace>) -> Result<()> {
        let edge = g.edge(e);
        if edge.src != self.gamma.current() {
            return Err(CoreError::InvalidInput(format!(
                "edge {} does not leave the remembered position at {}",
                g.display_edge(e),
                g.vertex(self.gamma.current()).id
            )));
        }
        let popped =
            self.gamma.push(edge.dst, ColouredStep { edge: e, colour }, edge.weight.clone());
        if let Some(cycle) = popped {
            if !cycle.weight.is_zero() {
                self.counters.increment_all_levels(&cycle.weight)?;
            }
        }
        Ok(())
    }

    fn set_colour(&mut self, colour: PerfectHalfSpace) -> Result<()> {
        self.colour = colour;
        self.refresh_zones()
    }

    fn refresh_zones(&mut self) -> Result<()> {
        let d = self.dim;
        let mut span_members = Vec::with_capacity(d);
        let mut strict_members = Vec::with_capacity(d);
        for k in 1..=d {
            let h = self.colour.at_level(k).ok_or_else(|| {
                CoreError::InvalidInput(format!("the automaton's colour has no level-{k} element"))
            })?;
            let mut span = Vec::new();
            let mut strict = Vec::new();
            for (i, w) in self.counters.weights().iter().enumerate() {
                if h.ambient().contains(w) {
                    span.push(i);
                    if h.strict_part_contains(w) {
                        strict.push(i);
                    }
                }
            }
            span_members.push(span);
            strict_members.push(strict);
        }
        self.span_members = span_members;
        self.strict_members = strict_members;
        Ok(())
    }
}

/// Advance Player 1's counter automaton by one of its own turns.
///
/// `observed` must be the play's current configuration, at a Player-1 vertex matching the end of
/// `γ`; the energy identity is checked against it first. The update then runs in three phases:
///
/// 1. at most one colour event — scanning levels from `d` down, the first level whose trigger
///    zone holds a counter at the soft bound either shifts (some half-space of the level's span
///    has every violating weight weakly on its closed side) or cancels (a positive zero-sum
///    combination of the violating weights is subtracted, `slack(k) · x(i)` from every level
///    `≥ k`); both reset all counters below the level and adopt a new colour;
/// 2. hard-bound and monotonicity checks over the whole table;
/// 3. the move: the table's edge for `(γ, ℋ)`, recorded in `γ` coloured with the current `ℋ`.
///
/// Returns the chosen edge, the updated memory, and any events fired in phase 1.
pub fn p1_auto_step(
    g: &GameGraph,
    strategy: &FCBStrategy,
    mut mem: P1Memory,
    bounds: &BoundsPack,
    universe: &Universe,
    observed: &Configuration,
) -> Result<(EdgeIdx, P1Memory, Vec<EventRecord>)> {
    if g.owner(observed.vertex) != Player::One {
        return Err(CoreError::InvalidInput(format!(
            "the automaton was consulted at {}, a Player-2 vertex",
            g.vertex(observed.vertex).id
        )));
    }
    if bounds.levels() != mem.dim {
        return Err(CoreError::InvalidInput(format!(
            "bounds pack has {} levels but the game has dimension {}",
            bounds.levels(),
            mem.dim
        )));
    }
    if !mem.started {
        if observed.vertex != mem.gamma.start() || !observed.level.is_zero() {
            return Err(CoreError::InvalidInput(format!(
                "first observation {} is not the initial configuration of vertex {}",
                observed.display(g),
                g.vertex(mem.gamma.start()).id
            )));
        }
        mem.started = true;
    } else if mem.gamma.current() != observed.vertex {
        return Err(CoreError::InvalidInput(format!(
            "observation {} does not match the remembered position at {}",
            observed.display(g),
            g.vertex(mem.gamma.current()).id
        )));
    }
    if mem.implied_level() != observed.level {
        return Err(CoreError::Falsification(format!(
            "energy identity violated: the play's level is {} but the memory implies {}",
            observed.level,
            mem.implied_level()
        )));
    }

    // Phase 1: at most one colour event, at the highest triggered level.
    let mut events = Vec::new();
    for k in (1..=mem.dim).rev() {
        let soft = bounds.soft(k);
        let triggered =
            mem.strict_members[k - 1].iter().any(|&i| mem.counters.value_at(k, i) >= soft);
        if !triggered {
            continue;
        }
        let violating: Vec<Weight> = mem.span_members[k - 1]
            .iter()
            .filter(|&&i| mem.counters.value_at(k, i) >= soft)
            .map(|&i| mem.counters.weights()[i].clone())
            .collect();
        match universe.shift_target(&mem.colour, k, &violating)? {
            Some(target) => {
                mem.counters.reset_below(k);
                mem.set_colour(target)?;
                events.push(EventRecord {
                    kind: EventKind::Shift,
                    level: k,
                    colour: mem.colour.encoding(),
                });
            }
            None => {
                let system = ColumnSystem::new(violating.clone(), fcb_universe_norm(g))?;
                let x = positive_kernel_solution(&system)?.ok_or_else(|| {
                    CoreError::Falsification(format!(
                        "a level-{k} cancellation found no positive zero-sum combination of \
                         {} violating weights — the strategy table is not keeping its cycles \
                         in check",
                        violating.len()
                    ))
                })?;
                let quantum = bounds.slack(k).clone();
                for (w, xi) in violating.iter().zip(&x) {
                    mem.counters.subtract_from_level_up(k, w, &(&quantum * xi))?;
                }
                mem.counters.reset_below(k);
                let target = universe.cancel_target(&mem.colour, k)?;
                mem.set_colour(target)?;
                for &i in &mem.span_members[k - 1] {
                    if mem.counters.value_at(k, i) >= soft {
                        return Err(CoreError::Falsification(format!(
                            "a level-{k} cancellation failed to restore the soft bound for {}",
                            mem.counters.weights()[i]
                        )));
                    }
                }
                events.push(EventRecord {
                    kind: EventKind::Cancel,
                    level: k,
                    colour: mem.colour.encoding(),
                });
            }
        }
        break;
    }

    // Phase 2: hard bound over every level's span, and monotonicity.
    for k in 1..=mem.dim {
        let hard = bounds.hard(k);
        for &i in &mem.span_members[k - 1] {
            if *mem.counters.value_at(k, i) >= hard {
                return Err(CoreError::Falsification(format!(
                    "counter of {} reached {} at level {k}, at or above the hard bound {hard}",
                    mem.counters.weights()[i],
                    mem.counters.value_at(k, i)
                )));
            }
        }
    }
    mem.counters.ensure_monotone()?;

    // Phase 3: consult the table and record the move.
    let state = mem.gamma_state();
    let decision = fcb_move(strategy, &state, Some(&mem.colour))?;
    let FCBDecision::Edge(e) = decision else {
        return Err(CoreError::Falsification(
            "the strategy table answered a colour offer with another colour".into(),
        ));
    };
    if g.edge(e).src != observed.vertex {
        return Err(CoreError::InvalidInput(format!(
            "the strategy table picked {}, which does not leave {} — table and game disagree",
            g.display_edge(e),
            g.vertex(observed.vertex).id
        )));
    }
    let colour = mem.colour.clone();
    mem.ingest(g, e, Some(colour))?;
    Ok((e, mem, events))
}

// ---------------------------------------------------------------------------
// Strategy objects and the simulator
// ---------------------------------------------------------------------------

/// A strategy object the simulator can play for one side.
///
/// `Lift` is Player 2's cycle-cutting lift and is only legal on the Player-2 side; `Automaton`
/// is Player 1's counter automaton and is only legal on the Player-1 side. The remaining four
/// are simple adversaries usable on either side: `Random` draws uniformly from the outgoing
/// edges with the simulation's seeded generator; `Counterless` plays a fixed edge per vertex
/// (the first outgoing edge where the map is silent); `Scripted` consumes an explicit move list
/// cyclically, erroring if a scripted edge does not leave the current vertex; `Threshold` plays
/// `when_nonneg` whenever the chosen level coordinate is nonnegative and `when_negative`
/// otherwise (both must leave the same vertex), with the first outgoing edge elsewhere.
#[derive(Debug, Clone)]
pub enum StrategySpec {
    Random,
    Counterless(HashMap<VertexIdx, EdgeIdx>),
    Scripted(Vec<EdgeIdx>),
    Threshold { coordinate: usize, when_nonneg: EdgeIdx, when_negative: EdgeIdx },
    Lift { table: FCBStrategy },
    Automaton { table: FCBStrategy, bounds: BoundsPack, universe: Universe },
}

impl StrategySpec {
    fn kind(&self) -> &'static str {
        match self {
            StrategySpec::Random => "random",
            StrategySpec::Counterless(_) => "counterless",
            StrategySpec::Scripted(_) => "scripted",
            StrategySpec::Threshold { .. } => "threshold",
            StrategySpec::Lift { .. } => "lift",
            StrategySpec::Automaton { .. } => "automaton",
        }
    }

    fn validate(&self, g: &GameGraph, side: Player) -> Result<()> {
        match self {
            StrategySpec::Random => Ok(()),
            StrategySpec::Counterless(map) => {
                for (&v, &e) in map {
                    if v >= g.vertex_count() || e >= g.edge_count() {
                        return Err(CoreError::InvalidInput(
                            "counterless map mentions an unknown vertex or edge".into(),
                        ));
                    }
                    if g.edge(e).src != v {
                        return Err(CoreError::InvalidInput(format!(
                            "counterless map sends {} along {}, which leaves a different vertex",
                            g.vertex(v).id,
                            g.display_edge(e)
                        )));
                    }
                }
                Ok(())
            }
            StrategySpec::Scripted(edges) => {
                if edges.is_empty() {
                    return Err(CoreError::InvalidInput("scripted move list is empty".into()));
                }
                if edges.iter().any(|&e| e >= g.edge_count()) {
                    return Err(CoreError::InvalidInput(
                        "scripted move list mentions an unknown edge".into(),
                    ));
                }
                Ok(())
            }
            StrategySpec::Threshold { coordinate, when_nonneg, when_negative } => {
                if *coordinate >= g.dimension() {
                    return Err(CoreError::InvalidInput(format!(
                        "threshold coordinate {coordinate} out of range for dimension {}",
                        g.dimension()
                    )));
                }
                if *when_nonneg >= g.edge_count() || *when_negative >= g.edge_count() {
                    return Err(CoreError::InvalidInput(
                        "threshold strategy mentions an unknown edge".into(),
                    ));
                }
                if g.edge(*when_nonneg).src != g.edge(*when_negative).src {
                    return Err(CoreError::InvalidInput(
                        "threshold edges must leave the same vertex".into(),
                    ));
                }
                Ok(())
            }
            StrategySpec::Lift { .. } => {
                if side != Player::Two {
                    return Err(CoreError::InvalidInput(
                        "the cycle-cutting lift plays for Player 2 only".into(),
                    ));
                }
                Ok(())
            }
            StrategySpec::Automaton { bounds, universe, .. } => {
                if side != Player::One {
                    return Err(CoreError::InvalidInput(
                        "the counter automaton plays for Player 1 only".into(),
                    ));
                }
                if bounds.levels() != g.dimension() || universe.dimension() != g.dimension() {
                    return Err(CoreError::InvalidInput(
                        "automaton bounds or universe dimension does not match the game".into(),
                    ));
                }
                Ok(())
            }
        }
    }
}

/// Parse the textual strategy grammar shared by the command-line and Python front ends:
///
/// - `random` — uniform choice among the current vertex's out-edges;
/// - `threshold:<coordinate>` — at the start vertex, take its first out-edge while the coordinate
///   is nonnegative and its second otherwise (elsewhere: first out-edge);
/// - `counterless:<vertex>=<out-edge position>,…` — a positional strategy; unlisted vertices take
///   their first out-edge;
/// - `scripted:<edge index>,…` — global edge indices, repeated cyclically;
/// - `lift` — Player 2's cycle-cutting strategy from a freshly solved first-cycle game;
/// - `automaton` — Player 1's counter automaton over the same table and the exact bounds.
///
/// Positions and indices refer to the graph's canonical order. `lift` and `automaton` solve the
/// first-cycle game on `g` as written (no implicit lossy extension), within the given budgets.
pub fn parse_strategy_spec(
    spec: &str,
    g: &GameGraph,
    v0: VertexIdx,
    side: Player,
    geometry_budget: usize,
    search_budget: usize,
) -> Result<StrategySpec> {
    g.ensure_valid()?;
    if v0 >= g.vertex_count() {
        return Err(CoreError::InvalidInput(format!("vertex index {v0} out of range")));
    }
    let (kind, rest) = match spec.split_once(':') {
        Some((k, r)) => (k, Some(r)),
        None => (spec, None),
    };
    if matches!(kind, "random" | "lift" | "automaton") && rest.is_some() {
        return Err(CoreError::InvalidInput(format!("{kind} takes no argument, got {spec:?}")));
    }
    let parsed = match kind {
        "random" => StrategySpec::Random,
        "threshold" => {
            let coordinate: usize = rest
                .ok_or_else(|| {
                    CoreError::InvalidInput("threshold needs a coordinate: threshold:<c>".into())
                })?
                .trim()
                .parse()
                .map_err(|_| {
                    CoreError::InvalidInput("threshold coordinate must be an integer".into())
                })?;
            let out = g.out_edges(v0);
            if out.len() < 2 {
                return Err(CoreError::InvalidInput(format!(
                    "threshold strategies pick between the first two edges of {}, which has \
                     only {}",
                    g.vertex(v0).id,
                    out.len()
                )));
            }
            StrategySpec::Threshold { coordinate, when_nonneg: out[0], when_negative: out[1] }
        }
        "counterless" => {
            let mut map = HashMap::new();
            for part in rest.unwrap_or("").split(',').filter(|p| !p.is_empty()) {
                let (vid, pos) = part.split_once('=').ok_or_else(|| {
                    CoreError::InvalidInput(
                        "counterless entries look like <vertex>=<out-edge position>".into(),
                    )
                })?;
                let v = g.vertex_index(vid.trim()).ok_or_else(|| {
                    CoreError::InvalidInput(format!("no vertex named {:?}", vid.trim()))
                })?;
                let pos: usize = pos.trim().parse().map_err(|_| {
                    CoreError::InvalidInput("out-edge position must be an integer".into())
                })?;
                let out = g.out_edges(v);
                if pos >= out.len() {
                    return Err(CoreError::InvalidInput(format!(
                        "{} has {} outgoing edges; position {pos} does not exist",
                        vid.trim(),
                        out.len()
                    )));
                }
                map.insert(v, out[pos]);
            }
            StrategySpec::Counterless(map)
        }
        "scripted" => {
            let edges: Result<Vec<EdgeIdx>> = rest
                .unwrap_or("")
                .split(',')
                .filter(|p| !p.is_empty())
                .map(|p| {
                    p.trim().parse::<EdgeIdx>().map_err(|_| {
                        CoreError::InvalidInput("scripted entries are edge indices".into())
                    })
                })
                .collect();
            StrategySpec::Scripted(edges?)
        }
        "lift" => {
            if side != Player::Two {
                return Err(CoreError::InvalidInput(
                    "the cycle-cutting lift plays for Player 2 only".into(),
                ));
            }
            let universe = Universe::new(&fcb_universe_norm(g), g.dimension(), geometry_budget)?;
            let (_, table) = solve_fcb(g, v0, universe.colours(), search_budget)?;
            StrategySpec::Lift { table }
        }
        "automaton" => {
            if side != Player::One {
                return Err(CoreError::InvalidInput(
                    "the counter automaton plays for Player 1 only".into(),
                ));
            }
            let universe = Universe::new(&fcb_universe_norm(g), g.dimension(), geometry_budget)?;
            let (_, table) = solve_fcb(g, v0, universe.colours(), search_budget)?;
            let pack = bounds(g)?;
            StrategySpec::Automaton { table, bounds: pack, universe }
        }
        other => {
            return Err(CoreError::InvalidInput(format!(
                "unknown strategy {other:?}; use random, threshold:<c>, \
                 counterless:<v>=<pos>,…, scripted:<edge>,…, lift, or automaton"
            )))
        }
    };
    parsed.validate(g, side)?;
    Ok(parsed)
}

/// One side's running state during a simulation.
struct SideState<'a> {
    spec: &'a StrategySpec,
    automaton: Option<P1Memory>,
    lift: Option<P2Memory>,
    script_pos: usize,
}

impl SideState<'_> {
    fn plain_move(&mut self, g: &GameGraph, cfg: &Configuration, rng: &mut ChaCha8Rng) -> Result<EdgeIdx> {
        let v = cfg.vertex;
        match self.spec {
            StrategySpec::Random => {
                let out = g.out_edges(v);
                Ok(out[rng.random_range(0..out.len())])
            }
            StrategySpec::Counterless(map) => {
                Ok(map.get(&v).copied().unwrap_or_else(|| g.out_edges(v)[0]))
            }
            StrategySpec::Scripted(edges) => {
                let e = edges[self.script_pos % edges.len()];
                self.script_pos += 1;
                if g.edge(e).src != v {
                    return Err(CoreError::InvalidInput(format!(
                        "scripted move {} does not leave the current vertex {}",
                        g.display_edge(e),
                        g.vertex(v).id
                    )));
                }
                Ok(e)
            }
            StrategySpec::Threshold { coordinate, when_nonneg, when_negative } => {
                if g.edge(*when_nonneg).src == v {
                    let coord = &cfg.level.0[*coordinate];
                    Ok(if *coord >= BigInt::zero() { *when_nonneg } else { *when_negative })
                } else {
                    Ok(g.out_edges(v)[0])
                }
            }
            StrategySpec::Lift { .. } | StrategySpec::Automaton { .. } => {
                Err(CoreError::InvalidInput(format!(
                    "{} strategies are driven by their own step functions",
                    self.spec.kind()
                )))
            }
        }
    }
}

/// A snapshot of the automaton's nonzero counters after a given step.
#[derive(Debug, Clone)]
pub struct CounterSnapshot {
    pub t: usize,
    pub entries: Vec<(usize, Weight, BigInt)>,
}

/// Everything a simulation records.
///
/// `configurations` holds the full play, initial configuration included, so it has
/// `steps + 1` entries. `identity_checks` counts the energy-identity assertions that were
/// evaluated (and, since the report exists, passed): one per step when the Player-1 side is the
/// counter automaton, zero otherwise. `counter_snapshots` holds the automaton's nonzero
/// counters after every event step and after the final step. `bounds_certified` reports the
/// automaton's pack certification (`None` without an automaton).
#[derive(Debug, Clone)]
pub struct SimulationReport {
    pub configurations: Vec<Configuration>,
    pub max_norm: BigInt,
    pub final_level: Weight,
    pub identity_checks: usize,
    pub shifts: usize,
    pub cancellations: usize,
    pub events: Vec<LoggedEvent>,
    pub counter_snapshots: Vec<CounterSnapshot>,
    pub bounds_certified: Option<bool>,
}

impl SimulationReport {
    /// Number of maximal stretches of the play containing only events of level `< k`: one more
    /// than the number of events of level `≥ k`.
    pub fn months(&self, k: usize) -> usize {
        1 + self.events.iter().filter(|e| e.record.level >= k).count()
    }

    /// Number of maximal stretches containing only cancellations of level `< k` and shifts of
    /// level `≤ k`.
    pub fn years(&self, k: usize) -> usize {
        1 + self
            .events
            .iter()
            .filter(|e| match e.record.kind {
                EventKind::Cancel => e.record.level >= k,
                EventKind::Shift => e.record.level > k,
            })
            .count()
    }

    /// The event log, one line per event.
    pub fn event_log(&self) -> String {
        self.events.iter().map(LoggedEvent::to_string).collect::<Vec<_>>().join("\n")
    }
}

/// Play `p1` against `p2` from `v0` for `steps` moves and record the play.
///
/// The single seeded generator drives every `Random` decision in step order, so reports are
/// deterministic given `(g, v0, p1, p2, steps, seed)`. A `Lift` on the Player-2 side is fed
/// every configuration (it must observe Player-1 moves to colour them); an `Automaton` on the
/// Player-1 side is consulted at its own turns, shown its opponent's moves, and has its energy
/// identity checked after every transition. Any strategy error or falsified invariant aborts
/// the simulation with the underlying error.
pub fn simulate(
    g: &GameGraph,
    v0: VertexIdx,
    p1: &StrategySpec,
    p2: &StrategySpec,
    steps: usize,
    seed: u64,
) -> Result<SimulationReport> {
    g.ensure_valid()?;
    if v0 >= g.vertex_count() {
        return Err(CoreError::InvalidInput(format!("vertex index {v0} out of range")));
    }
    if steps == 0 {
        return Err(CoreError::InvalidInput("simulations need at least one step".into()));
    }
    p1.validate(g, Player::One)?;
    p2.validate(g, Player::Two)?;

    let mut side1 = SideState { spec: p1, automaton: None, lift: None, script_pos: 0 };
    let mut side2 = SideState { spec: p2, automaton: None, lift: None, script_pos: 0 };
    if let StrategySpec::Automaton { universe, .. } = p1 {
        side1.automaton = Some(P1Memory::new(g, v0, universe, DEFAULT_CYCLE_CAP)?);
    }
    if let StrategySpec::Lift { .. } = p2 {
        side2.lift = Some(P2Memory::new(g, v0));
    }

    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut cfg = Configuration::start(v0, g.dimension());
    let mut report = SimulationReport {
        configurations: vec![cfg.clone()],
        max_norm: cfg.level.norm(),
        final_level: cfg.level.clone(),
        identity_checks: 0,
        shifts: 0,
        cancellations: 0,
        events: Vec::new(),
        counter_snapshots: Vec::new(),
        bounds_certified: match p1 {
            StrategySpec::Automaton { bounds, .. } => Some(bounds.certified()),
            _ => None,
        },
    };

    for t in 0..steps {
        // The lift observes every configuration; at Player-2 vertices its decision is the move.
        let mut lift_edge: Option<EdgeIdx> = None;
        if let (StrategySpec::Lift { table }, Some(mem)) = (side2.spec, side2.lift.take()) {
            let (decision, mem) = p2_lift_step(g, table, mem, &cfg)?;
            side2.lift = Some(mem);
            if let FCBDecision::Edge(e) = decision {
                lift_edge = Some(e);
            }
        }

        let mover = g.owner(cfg.vertex);
        let chosen = match mover {
            Player::One => {
                if let (StrategySpec::Automaton { table, bounds, universe }, Some(mem)) =
                    (side1.spec, side1.automaton.take())
                {
                    let (e, mem, fired) = p1_auto_step(g, table, mem, bounds, universe, &cfg)?;
                    side1.automaton = Some(mem);
                    for record in fired {
                        match record.kind {
                            EventKind::Shift => report.shifts += 1,
                            EventKind::Cancel => report.cancellations += 1,
                        }
                        report.events.push(LoggedEvent { t, record });
                    }
                    e
                } else {
                    side1.plain_move(g, &cfg, &mut rng)?
                }
            }
            Player::Two => match lift_edge {
                Some(e) => e,
                None => side2.plain_move(g, &cfg, &mut rng)?,
            },
        };
        if g.edge(chosen).src != cfg.vertex {
            return Err(CoreError::Falsification(format!(
                "a strategy returned {}, which does not leave the current vertex",
                g.display_edge(chosen)
            )));
        }

        if mover == Player::Two {
            if let Some(mem) = side1.automaton.as_mut() {
                mem.observe(g, chosen)?;
            }
        }

        let edge = g.edge(chosen);
        cfg = Configuration { vertex: edge.dst, level: cfg.level.add(&edge.weight) };

        if let Some(mem) = side1.automaton.as_ref() {
            if mem.implied_level() != cfg.level {
                return Err(CoreError::Falsification(format!(
                    "energy identity violated after step {t}: level {} but memory implies {}",
                    cfg.level,
                    mem.implied_level()
                )));
            }
            report.identity_checks += 1;
            if report.events.last().is_some_and(|e| e.t == t) {
                report
                    .counter_snapshots
                    .push(CounterSnapshot { t, entries: mem.counters.snapshot() });
            }
        }

        let norm = cfg.level.norm();
        if norm > report.max_norm {
            report.max_norm = norm;
        }
        report.configurations.push(cfg.clone());
    }

    if let Some(mem) = side1.automaton.as_ref() {
        report
            .counter_snapshots
            .push(CounterSnapshot { t: steps, entries: mem.counters.snapshot() });
    }
    report.final_level = cfg.level;
    Ok(report)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::fcb::solve_fcb;
    use crate::fixtures::{balance_game, balance_play_prefix, drain_game, seesaw_game};
    use crate::geometry::DEFAULT_GEOMETRY_BUDGET;
    use crate::transforms::lossy;

    const SEARCH_BUDGET: usize = 50_000_000;

    fn universe_for(g: &GameGraph) -> Universe {
        Universe::new(&fcb_universe_norm(g), g.dimension(), DEFAULT_GEOMETRY_BUDGET)
            .expect("universe builds")
    }

    fn big(x: i64) -> BigInt {
        BigInt::from(x)
    }

    fn pow(base: i64, exp: usize) -> BigInt {
        num_traits::pow::pow(big(base), exp)
    }

    fn sigma1(g: &GameGraph) -> StrategySpec {
        let v0 = g.require_vertex("v0").unwrap();
        let out = g.out_edges(v0);
        StrategySpec::Threshold { coordinate: 0, when_nonneg: out[0], when_negative: out[1] }
    }

    /// The fixed Player-2 strategy answering `vL` with `(-2,2)` and `vR` with `(4,-3)`.
    fn sigma2(g: &GameGraph) -> StrategySpec {
        let mut map = HashMap::new();
        for (vid, w) in [("vL", Weight::from_i64(&[-2, 2])), ("vR", Weight::from_i64(&[4, -3]))] {
            let v = g.require_vertex(vid).unwrap();
            let e = g
                .out_edges(v)
                .iter()
                .copied()
                .find(|&e| g.edge(e).weight == w)
                .expect("fixture edge");
            map.insert(v, e);
        }
        StrategySpec::Counterless(map)
    }

    #[test]
    fn bounds_examples() {
        let pack = bounds(&balance_game()).unwrap();
        assert_eq!(pack.levels(), 2);
        assert_eq!(*pack.b(), pow(48, 128));
        assert_eq!(pack.b().to_string().len(), 216);
        assert_eq!(*pack.soft(1), pow(48, 32));
        assert_eq!(*pack.slack(1), pow(48, 16));
        assert_eq!(*pack.soft(2), pow(48, 64));
        assert_eq!(*pack.slack(2), pow(48, 48));
        assert!(pack.certified());

        let pack = bounds(&drain_game()).unwrap();
        assert_eq!(*pack.soft(1), pow(8, 32));
        assert_eq!(*pack.slack(1), pow(8, 16));
        assert_eq!(*pack.b(), pow(8, 128));
        // Solution-size and half-space-count ladders for |V|·‖E‖ = 2, d = 2.
        assert_eq!(*pack.solution_norm(1), pow(6, 9));
        assert_eq!(*pack.solution_norm(2), pow(6, 16));
        assert_eq!(*pack.halfspace_count(1), big(2));
        assert_eq!(*pack.halfspace_count(2), big(50));

        for g in [balance_game(), drain_game(), seesaw_game()] {
            let pack = bounds(&g).unwrap();
            for k in 1..=pack.levels() {
                assert!(pack.slack(k) < pack.soft(k), "slack below soft at level {k}");
                if k < pack.levels() {
                    assert!(
                        pack.hard(k) <= *pack.slack(k + 1),
                        "threshold ladder ordered at level {k}"
                    );
                }
            }
        }
    }

    #[test]
    fn scaled_bounds_validate_their_ladder() {
        let pack = bounds(&seesaw_game()).unwrap();
        let scaled = pack.scaled_for_tests(&[(1, 40, 8), (2, 300, 50)]).unwrap();
        assert!(!scaled.certified());
        assert_eq!(*scaled.soft(1), big(40));
        assert_eq!(*scaled.slack(1), big(8));
        assert_eq!(scaled.hard(2), big(350));
        // True values survive at untouched levels.
        let one_level = pack.scaled_for_tests(&[(1, 40, 8)]).unwrap();
        assert_eq!(*one_level.soft(2), pow(4, 64));

        assert!(pack.scaled_for_tests(&[(1, 8, 40)]).is_err(), "slack must stay below soft");
        assert!(pack.scaled_for_tests(&[(1, 40, 0)]).is_err(), "slack must be positive");
        assert!(
            pack.scaled_for_tests(&[(2, 30, 10)]).is_err(),
            "level-2 slack below the level-1 hard bound breaks the ladder"
        );
        assert!(pack.scaled_for_tests(&[(3, 40, 8)]).is_err(), "level out of range");
    }

    #[test]
    fn counter_table_behaviour() {
        let w1 = Weight::from_i64(&[1, -1]);
        let w2 = Weight::from_i64(&[-1, 1]);
        let mut table = CounterTable::new(2, 2, vec![w2.clone(), w1.clone(), w1.clone()]);
        assert_eq!(table.weights().len(), 2, "domain is deduplicated");

        for _ in 0..3 {
            table.increment_all_levels(&w1).unwrap();
        }
        table.increment_all_levels(&w2).unwrap();
        assert_eq!(*table.get(1, &w1).unwrap(), big(3));
        assert_eq!(*table.get(2, &w1).unwrap(), big(3));
        assert_eq!(*table.get(2, &w2).unwrap(), big(1));
        table.ensure_monotone().unwrap();
        assert_eq!(table.level_combination(2), Weight::from_i64(&[2, -2]));

        table.reset_below(2);
        assert_eq!(*table.get(1, &w1).unwrap(), big(0));
        assert_eq!(*table.get(2, &w1).unwrap(), big(3));
        table.ensure_monotone().unwrap();

        table.subtract_from_level_up(2, &w1, &big(2)).unwrap();
        assert_eq!(*table.get(2, &w1).unwrap(), big(1));
        let err = table.subtract_from_level_up(2, &w1, &big(5)).unwrap_err();
        assert!(matches!(err, CoreError::Falsification(_)));

        assert_eq!(table.snapshot(), vec![(2, w2.clone(), big(1)), (2, w1.clone(), big(1))]);
        assert!(table.get(1, &Weight::from_i64(&[7, 7])).is_err());
        assert!(table.get(3, &w1).is_err());
    }

    #[test]
    fn simulate_reproduces_the_balance_prefix() {
        let g = balance_game();
        let v0 = g.require_vertex("v0").unwrap();
        let report = simulate(&g, v0, &sigma1(&g), &sigma2(&g), 6, 0).unwrap();
        assert_eq!(report.configurations, balance_play_prefix());
        assert_eq!(report.identity_checks, 0, "no automaton, no identity checks");
        assert!(report.events.is_empty());
        assert_eq!(report.bounds_certified, None);
    }

    #[test]
    fn lift_on_balance_always_answers_v_l_with_the_witness_edge() {
        let g = balance_game();
        let v0 = g.require_vertex("v0").unwrap();
        let vl = g.require_vertex("vL").unwrap();
        let universe = universe_for(&g);
        let (winner, table) = solve_fcb(&g, v0, universe.colours(), SEARCH_BUDGET).unwrap();
        assert_eq!(winner, Player::Two);

        // Drive the play manually, feeding the lift every configuration exactly once:
        // Player 1 follows the balance rule, Player 2 follows the lift.
        let witness = Weight::from_i64(&[-1, 3]);
        let mut mem = P2Memory::new(&g, v0);
        let mut cfg = Configuration::start(v0, 2);
        let mut visits_to_vl = 0;
        for t in 0..60 {
            let (decision, next) = p2_lift_step(&g, &table, mem, &cfg).unwrap();
            mem = next;
            assert!(mem.path_len() < g.vertex_count(), "residual memory stays short");
            if t > 0 && cfg.vertex == v0 {
                // A full excursion v0 → side → v0 was cut, so the memory is back at the root.
                assert_eq!(mem.path_len(), 0, "completed cycles are cut from the memory");
            }
            let e = match decision {
                FCBDecision::Edge(e) => {
                    assert_eq!(g.owner(cfg.vertex), Player::Two);
                    if cfg.vertex == vl {
                        visits_to_vl += 1;
                        assert_eq!(g.edge(e).weight, witness, "vL is always answered with (-1,3)");
                    }
                    e
                }
                FCBDecision::Colour(_) => {
                    assert_eq!(g.owner(cfg.vertex), Player::One);
                    let out = g.out_edges(cfg.vertex);
                    if cfg.level.0[0] >= BigInt::zero() {
                        out[0]
                    } else {
                        out[1]
                    }
                }
            };
            let edge = g.edge(e);
            cfg = Configuration { vertex: edge.dst, level: cfg.level.add(&edge.weight) };
        }
        assert!(visits_to_vl > 0, "the play actually visited vL");
    }

    #[test]
    fn lift_rejects_inconsistent_observations() {
        let g = balance_game();
        let v0 = g.require_vertex("v0").unwrap();
        let vl = g.require_vertex("vL").unwrap();
        let universe = universe_for(&g);
        let (_, table) = solve_fcb(&g, v0, universe.colours(), SEARCH_BUDGET).unwrap();

        // First observation must be the initial configuration.
        let mem = P2Memory::new(&g, v0);
        let bad = Configuration { vertex: vl, level: Weight::from_i64(&[1, 0]) };
        assert!(matches!(
            p2_lift_step(&g, &table, mem, &bad),
            Err(CoreError::InvalidInput(_))
        ));

        // A jump that no edge explains is rejected.
        let mem = P2Memory::new(&g, v0);
        let (_, mem) = p2_lift_step(&g, &table, mem, &Configuration::start(v0, 2)).unwrap();
        let teleport = Configuration { vertex: vl, level: Weight::from_i64(&[9, 9]) };
        assert!(matches!(
            p2_lift_step(&g, &table, mem, &teleport),
            Err(CoreError::InvalidInput(_))
        ));
    }

    #[test]
    fn lifted_player_two_pumps_the_norm_against_the_balance_rule() {
        let g = balance_game();
        let v0 = g.require_vertex("v0").unwrap();
        let universe = universe_for(&g);
        let (winner, table) = solve_fcb(&g, v0, universe.colours(), SEARCH_BUDGET).unwrap();
        assert_eq!(winner, Player::Two);
        let report =
            simulate(&g, v0, &sigma1(&g), &StrategySpec::Lift { table }, 1000, 0).unwrap();
        assert!(
            report.max_norm >= big(50),
            "the lift should pump the norm to at least 50, got {}",
            report.max_norm
        );
    }

    #[test]
    fn automaton_initial_memory_is_clean_and_zero_cycles_stay_silent() {
        // v (Player 1) ⇄ w (Player 2) with weights (1,0) / (-1,0): the only cycle weight is zero.
        let g = GameGraph::new(
            2,
            vec![("v".into(), Player::One), ("w".into(), Player::Two)],
            vec![
                ("v".into(), "w".into(), Weight::from_i64(&[1, 0])),
                ("w".into(), "v".into(), Weight::from_i64(&[-1, 0])),
            ],
        )
        .unwrap();
        let v = g.require_vertex("v").unwrap();
        let universe = universe_for(&g);
        let mem = P1Memory::new(&g, v, &universe, DEFAULT_CYCLE_CAP).unwrap();
        assert_eq!(mem.gamma_state(), FCBState::initial(v));
        assert_eq!(mem.colour(), universe.minimal_colour());
        assert!(mem.counters().snapshot().is_empty());
        assert!(mem.counters().weights().is_empty(), "only the zero cycle exists");
        assert_eq!(mem.implied_level(), Weight::zero(2));

        let (winner, table) = solve_fcb(&g, v, universe.colours(), SEARCH_BUDGET).unwrap();
        assert_eq!(winner, Player::One, "zero cycles lie in no blunt cone");
        let pack = bounds(&g).unwrap();
        let auto = StrategySpec::Automaton { table, bounds: pack, universe };
        let report = simulate(&g, v, &auto, &StrategySpec::Random, 100, 5).unwrap();
        assert_eq!(report.identity_checks, 100);
        assert!(report.events.is_empty());
        assert_eq!(report.final_level, Weight::zero(2), "fifty full round trips");
        let last = report.counter_snapshots.last().unwrap();
        assert!(last.entries.is_empty(), "zero-weight cycles never touch the counters");
        assert_eq!(report.bounds_certified, Some(true));
    }

    #[test]
    fn automaton_survives_lossy_balance_with_scaled_level_one() {
        let g = lossy(&balance_game()).unwrap();
        let v0 = g.require_vertex("v0").unwrap();
        let universe = universe_for(&g);
        let (winner, table) = solve_fcb(&g, v0, universe.colours(), SEARCH_BUDGET).unwrap();
        assert_eq!(winner, Player::One);
        let pack = bounds(&g).unwrap().scaled_for_tests(&[(1, 40, 8)]).unwrap();
        let auto = StrategySpec::Automaton { table, bounds: pack, universe };

        for (p2, seed) in
            [(StrategySpec::Random, 11), (StrategySpec::Random, 12), (sigma2(&g), 0)]
        {
            let report = simulate(&g, v0, &auto, &p2, 2000, seed).unwrap();
            assert_eq!(report.identity_checks, 2000);
            assert_eq!(report.bounds_certified, Some(false));
            for event in &report.events {
                assert_eq!(event.record.level, 1, "only level 1 is scaled into reach");
            }
        }
    }

    #[test]
    fn automaton_survives_lossy_drain_self_play() {
        let g = lossy(&drain_game()).unwrap();
        let vl = g.require_vertex("vL").unwrap();
        let universe = universe_for(&g);
        let (winner, table) = solve_fcb(&g, vl, universe.colours(), SEARCH_BUDGET).unwrap();
        assert_eq!(winner, Player::Two);
        // The losing side still runs to the letter: identity and nonnegativity hold even though
        // no bounded-drift guarantee exists. True thresholds keep colour events out of reach.
        let pack = bounds(&g).unwrap();
        let auto = StrategySpec::Automaton { table, bounds: pack, universe };
        let report = simulate(&g, vl, &auto, &StrategySpec::Random, 2000, 3).unwrap();
        assert_eq!(report.identity_checks, 2000);
        assert!(report.events.is_empty(), "true thresholds are astronomically far");
        for (_, _, value) in &report.counter_snapshots.last().unwrap().entries {
            assert!(*value >= BigInt::zero());
        }
    }

    #[test]
    fn seesaw_triggers_restoring_cancellations_under_scaled_bounds() {
        let g = seesaw_game();
        let v = g.require_vertex("v").unwrap();
        let universe = universe_for(&g);
        let (winner, table) = solve_fcb(&g, v, universe.colours(), SEARCH_BUDGET).unwrap();
        assert_eq!(winner, Player::One, "each colour leaves one loop uncovered");
        let pack = bounds(&g).unwrap().scaled_for_tests(&[(1, 40, 8), (2, 300, 50)]).unwrap();
        let auto = StrategySpec::Automaton { table, bounds: pack, universe };
        let report = simulate(&g, v, &auto, &StrategySpec::Random, 3000, 1).unwrap();

        assert_eq!(report.identity_checks, 3000);
        assert!(report.cancellations >= 1, "opposite loop weights must eventually cancel");
        assert!(report.shifts >= 1, "single-sided violations shift before cancelling");
        assert_eq!(report.events.len(), report.shifts + report.cancellations);
        // Event-log lines carry the full story in the documented format.
        let log = report.event_log();
        assert!(log.contains("kind=cancel k=1 colour="));
        for line in log.lines() {
            assert!(line.starts_with("t=") && line.contains(" kind=") && line.contains(" k="));
        }
        // Calendar reconstruction: every event ends a level-1 month; level-2 years only count
        // level-2 cancellations and shifts above level 2.
        assert_eq!(report.months(1), report.events.len() + 1);
        let two_cancels = report
            .events
            .iter()
            .filter(|e| e.record.kind == EventKind::Cancel && e.record.level >= 2)
            .count();
        assert_eq!(report.years(2), 1 + two_cancels);
    }

    #[test]
    fn scripted_and_counterless_agree_on_a_deterministic_play() {
        let g = drain_game();
        let vl = g.require_vertex("vL").unwrap();
        let loop_edge = g
            .out_edges(vl)
            .iter()
            .copied()
            .find(|&e| g.edge(e).dst == vl)
            .expect("fixture self-loop");
        let scripted = simulate(&g, vl, &StrategySpec::Scripted(vec![loop_edge]), &StrategySpec::Random, 10, 0)
            .unwrap();
        let mut map = HashMap::new();
        map.insert(vl, loop_edge);
        let counterless =
            simulate(&g, vl, &StrategySpec::Counterless(map), &StrategySpec::Random, 10, 99)
                .unwrap();
        assert_eq!(scripted.configurations, counterless.configurations);
        assert_eq!(scripted.final_level, Weight::from_i64(&[10, -10]));
        assert_eq!(scripted.max_norm, big(10));
    }

    #[test]
    fn same_seed_same_play() {
        let g = balance_game();
        let v0 = g.require_vertex("v0").unwrap();
        let a = simulate(&g, v0, &StrategySpec::Random, &StrategySpec::Random, 200, 42).unwrap();
        let b = simulate(&g, v0, &StrategySpec::Random, &StrategySpec::Random, 200, 42).unwrap();
        assert_eq!(a.configurations, b.configurations);
    }

    #[test]
    fn simulate_validates_its_inputs() {
        let g = balance_game();
        let v0 = g.require_vertex("v0").unwrap();
        let vl = g.require_vertex("vL").unwrap();
        let universe = universe_for(&g);
        let (_, table) = solve_fcb(&g, v0, universe.colours(), SEARCH_BUDGET).unwrap();
        let pack = bounds(&g).unwrap();

        // Side mismatches.
        let lift = StrategySpec::Lift { table: table.clone() };
        assert!(simulate(&g, v0, &lift, &StrategySpec::Random, 5, 0).is_err());
        let auto = StrategySpec::Automaton {
            table: table.clone(),
            bounds: pack,
            universe: universe.clone(),
        };
        assert!(simulate(&g, v0, &StrategySpec::Random, &auto, 5, 0).is_err());

        // Malformed simple strategies.
        assert!(simulate(&g, v0, &StrategySpec::Scripted(vec![]), &StrategySpec::Random, 5, 0)
            .is_err());
        let wrong_vertex = simulate(
            &g,
            v0,
            &StrategySpec::Scripted(vec![g.out_edges(vl)[0]]),
            &StrategySpec::Random,
            5,
            0,
        );
        assert!(wrong_vertex.is_err(), "scripted edge must leave the current vertex");
        let mut bad_map = HashMap::new();
        bad_map.insert(v0, g.out_edges(vl)[0]);
        assert!(simulate(&g, v0, &StrategySpec::Random, &StrategySpec::Counterless(bad_map), 5, 0)
            .is_err());
        let bad_threshold = StrategySpec::Threshold {
            coordinate: 0,
            when_nonneg: g.out_edges(v0)[0],
            when_negative: g.out_edges(vl)[0],
        };
        assert!(simulate(&g, v0, &bad_threshold, &StrategySpec::Random, 5, 0).is_err());
        assert!(simulate(&g, v0, &StrategySpec::Random, &StrategySpec::Random, 0, 0).is_err());
    }

    #[test]
    fn strategy_grammar_parses_every_kind() {
        let g = balance_game();
        let v0 = g.vertex_index("v0").unwrap();
        let parse = |spec: &str, side| {
            parse_strategy_spec(spec, &g, v0, side, DEFAULT_GEOMETRY_BUDGET, SEARCH_BUDGET)
        };

        assert!(matches!(parse("random", Player::One).unwrap(), StrategySpec::Random));

        let t = parse("threshold:0", Player::One).unwrap();
        match t {
            StrategySpec::Threshold { coordinate, when_nonneg, when_negative } => {
                assert_eq!(coordinate, 0);
                assert_eq!(when_nonneg, g.out_edges(v0)[0]);
                assert_eq!(when_negative, g.out_edges(v0)[1]);
            }
            other => panic!("expected threshold, got {other:?}"),
        }

        let vl = g.vertex_index("vL").unwrap();
        let vr = g.vertex_index("vR").unwrap();
        match parse("counterless:vL=0,vR=1", Player::Two).unwrap() {
            StrategySpec::Counterless(map) => {
                assert_eq!(map[&vl], g.out_edges(vl)[0]);
                assert_eq!(map[&vr], g.out_edges(vr)[1]);
            }
            other => panic!("expected counterless, got {other:?}"),
        }

        match parse("scripted:0,2", Player::One).unwrap() {
            StrategySpec::Scripted(edges) => assert_eq!(edges, vec![0, 2]),
            other => panic!("expected scripted, got {other:?}"),
        }

        assert!(matches!(parse("lift", Player::Two).unwrap(), StrategySpec::Lift { .. }));
        assert!(matches!(
            parse("automaton", Player::One).unwrap(),
            StrategySpec::Automaton { .. }
        ));

        // A parsed pair actually plays.
        let p1 = parse("threshold:0", Player::One).unwrap();
        let p2 = parse("counterless:vL=0,vR=1", Player::Two).unwrap();
        let report = simulate(&g, v0, &p1, &p2, 6, 0).unwrap();
        assert_eq!(report.configurations, balance_play_prefix());
    }

    #[test]
    fn strategy_grammar_rejects_malformed_specs() {
        let g = balance_game();
        let v0 = g.vertex_index("v0").unwrap();
        let parse = |spec: &str, side| {
            parse_strategy_spec(spec, &g, v0, side, DEFAULT_GEOMETRY_BUDGET, SEARCH_BUDGET)
        };

        for (spec, side) in [
            ("waltz", Player::One),           // unknown kind
            ("random:7", Player::One),        // no-argument kind with an argument
            ("lift:x", Player::Two),
            ("automaton:x", Player::One),
            ("threshold", Player::One),       // missing coordinate
            ("threshold:x", Player::One),     // non-integer coordinate
            ("threshold:9", Player::One),     // coordinate out of range
            ("counterless:vX=0", Player::Two), // unknown vertex
            ("counterless:vL=9", Player::Two), // out-edge position out of range
            ("counterless:vL", Player::Two),  // missing '='
            ("scripted:", Player::One),       // empty script
            ("scripted:0,x", Player::One),    // non-integer edge
            ("lift", Player::One),            // wrong side
            ("automaton", Player::Two),       // wrong side
        ] {
            assert!(parse(spec, side).is_err(), "{spec:?} for {side:?} should be rejected");
        }
    }
}
