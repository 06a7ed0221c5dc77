//! Independent verification machinery: a self-covering strategy-tree search that certifies
//! Player-1 wins of the arbitrary-credit energy game without touching the solvers, a
//! depth-bounded forced-loss search confirming Player-2 wins of given-credit games, a seeded
//! random instance generator, and the cross-check driver comparing every route.
//!
//! The self-covering search is deliberately three-valued: `Win1` comes with a checkable tree
//! certificate, and exhausting the depth yields `Inconclusive`, never a Player-2 verdict — the
//! depth bounds that would make failure conclusive are astronomically large. The forced-loss
//! search is the mirror image: `true` proves Player 2 wins, `false` proves nothing.

use num_bigint::BigInt;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use crate::error::{CoreError, Result, Violation};
use crate::fcb::{fcb_universe_norm, solve_fcb, verify_fcb_strategy};
use crate::game::{normalize_cycles, validate, GameGraph, Player, VertexIdx, Weight};
use crate::geometry::Universe;
use crate::solver::{solve_bounding, SolveMode, SolveOpts};
use crate::transforms::lossy;

/// Reject structural violations but tolerate an all-zero weight assignment: the oracle searches
/// are well-defined without movement through level space.
fn ensure_searchable(g: &GameGraph) -> Result<()> {
    let violations: Vec<_> =
        validate(g).into_iter().filter(|v| *v != Violation::ZeroEdgeNorm).collect();
    if violations.is_empty() {
        Ok(())
    } else {
        Err(CoreError::InvalidGame(violations))
    }
}

// ---------------------------------------------------------------------------
// Self-covering strategy trees
// ---------------------------------------------------------------------------

/// One node of a self-covering strategy tree: the configuration reached, whether the node is a
/// covered leaf (its configuration dominates an ancestor at the same vertex), and the subtrees
/// under it — one child at Player-1 nodes (her chosen move), one per outgoing edge at Player-2
/// nodes.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct SelfCoveringNode {
    pub vertex: VertexIdx,
    pub level: Weight,
    pub covered: bool,
    pub children: Vec<SelfCoveringNode>,
}

impl SelfCoveringNode {
    fn count_covered(&self) -> usize {
        if self.covered {
            1
        } else {
            self.children.iter().map(SelfCoveringNode::count_covered).sum()
        }
    }

    fn height(&self) -> usize {
        self.children.iter().map(|c| 1 + c.height()).max().unwrap_or(0)
    }

    fn size(&self) -> usize {
        1 + self.children.iter().map(SelfCoveringNode::size).sum::<usize>()
    }
}

/// A Player-1 certificate for the arbitrary-credit energy game: a finite strategy tree whose
/// every leaf weakly dominates an ancestor with the same vertex. Player 1 can replay the
/// strategy from each covered leaf forever, and by monotonicity the losses along any play are
/// bounded by what the finite tree exhibits, so some finite initial credit wins.
#[derive(Debug, Clone)]
pub struct CoverCertificate {
    pub root: SelfCoveringNode,
    pub covered_leaves: usize,
    pub height: usize,
}

/// Outcome of [`self_covering_search`]: a certified Player-1 win or no answer.
#[derive(Debug, Clone)]
pub enum OracleVerdict {
    Win1(CoverCertificate),
    Inconclusive,
}

impl OracleVerdict {
    pub fn is_win1(&self) -> bool {
        matches!(self, OracleVerdict::Win1(_))
    }
}

/// AND-OR search for a self-covering strategy tree of height at most `depth`, existential over
/// Player 1's edges and universal over Player 2's. Among the certificates within the depth
/// bound, Player 1's choices minimize the node count of the tree (ties broken toward earlier
/// edges), so the returned certificate is the smallest one and the result is deterministic.
/// Success certifies a Player-1 win of the arbitrary-credit energy game; exhausting the depth
/// is inconclusive and never a Player-2 verdict.
pub fn self_covering_search(g: &GameGraph, v0: VertexIdx, depth: usize) -> Result<OracleVerdict> {
    ensure_searchable(g)?;
    if v0 >= g.vertex_count() {
        return Err(CoreError::InvalidInput(format!("vertex index {v0} out of range")));
    }
    if depth == 0 {
        return Err(CoreError::InvalidInput("search depth must be positive".into()));
    }

    fn search(
        g: &GameGraph,
        v: VertexIdx,
        level: Weight,
        depth_left: usize,
        branch: &mut Vec<(VertexIdx, Weight)>,
    ) -> Option<SelfCoveringNode> {
        if branch.iter().any(|(u, a)| *u == v && a.le(&level)) {
            return Some(SelfCoveringNode { vertex: v, level, covered: true, children: Vec::new() });
        }
        if depth_left == 0 {
            return None;
        }
        branch.push((v, level.clone()));
        let children = match g.owner(v) {
            Player::One => {
                let mut best: Option<SelfCoveringNode> = None;
                for &e in g.out_edges(v) {
                    let edge = g.edge(e);
                    let next = branch.last().unwrap().1.add(&edge.weight);
                    if let Some(child) = search(g, edge.dst, next, depth_left - 1, branch) {
                        if best.as_ref().is_none_or(|b| child.size() < b.size()) {
                            best = Some(child);
                        }
                    }
                }
                best.map(|child| vec![child])
            }
            Player::Two => {
                let mut all = Vec::with_capacity(g.out_edges(v).len());
                let mut complete = true;
                for &e in g.out_edges(v) {
                    let edge = g.edge(e);
                    let next = branch.last().unwrap().1.add(&edge.weight);
                    match search(g, edge.dst, next, depth_left - 1, branch) {
                        Some(child) => all.push(child),
                        None => {
                            complete = false;
                            break;
                        }
                    }
                }
                complete.then_some(all)
            }
        };
        let (_, level) = branch.pop().expect("pushed above");
        children.map(|children| SelfCoveringNode { vertex: v, level, covered: false, children })
    }

    let mut branch = Vec::new();
    match search(g, v0, Weight::zero(g.dimension()), depth, &mut branch) {
        Some(root) => {
            let covered_leaves = root.count_covered();
            let height = root.height();
            Ok(OracleVerdict::Win1(CoverCertificate { root, covered_leaves, height }))
        }
        None => Ok(OracleVerdict::Inconclusive),
    }
}

/// Recheck a self-covering certificate against the graph from first principles: the root sits
/// at `(v0, 0)`; every parent-child step is realized by an actual edge (Player-1 nodes have
/// exactly one child, Player-2 nodes exactly one per outgoing edge); every leaf is covered by a
/// proper ancestor with the same vertex and a componentwise-smaller-or-equal level.
pub fn verify_self_covering(g: &GameGraph, v0: VertexIdx, cert: &CoverCertificate) -> Result<bool> {
    fn walk(
        g: &GameGraph,
        node: &SelfCoveringNode,
        branch: &mut Vec<(VertexIdx, Weight)>,
    ) -> bool {
        if node.covered {
            return node.children.is_empty()
                && branch.iter().any(|(u, a)| *u == node.vertex && a.le(&node.level));
        }
        let out = g.out_edges(node.vertex);
        let realizable = |child: &SelfCoveringNode| {
            out.iter().any(|&e| {
                let edge = g.edge(e);
                edge.dst == child.vertex && node.level.add(&edge.weight) == child.level
            })
        };
        let arity_ok = match g.owner(node.vertex) {
            Player::One => node.children.len() == 1,
            Player::Two => {
                // Every outgoing move must be answered: each edge's successor configuration
                // appears among the children, and every child is realizable.
                node.children.len() == out.len()
                    && out.iter().all(|&e| {
                        let edge = g.edge(e);
                        node.children.iter().any(|c| {
                            c.vertex == edge.dst && c.level == node.level.add(&edge.weight)
                        })
                    })
            }
        };
        if !arity_ok || !node.children.iter().all(|c| realizable(c)) {
            return false;
        }
        branch.push((node.vertex, node.level.clone()));
        let ok = node.children.iter().all(|c| walk(g, c, branch));
        branch.pop();
        ok
    }

    ensure_searchable(g)?;
    if cert.root.vertex != v0 || !cert.root.level.is_zero() {
        return Ok(false);
    }
    let mut branch = Vec::new();
    Ok(walk(g, &cert.root, &mut branch))
}

// ---------------------------------------------------------------------------
// Forced-loss search
// ---------------------------------------------------------------------------

/// Depth-bounded confirmation that Player 2 wins the energy game with the given credit: `true`
/// means Player 2 can force some coordinate of `credit + total weight` below zero within
/// `depth` moves whatever Player 1 does — a proof, independent of the solvers, that the credit
/// loses. `false` proves nothing (the horizon may simply be too short).
pub fn forced_loss_search(
    g: &GameGraph,
    v0: VertexIdx,
    credit: &Weight,
    depth: usize,
) -> Result<bool> {
    ensure_searchable(g)?;
    if v0 >= g.vertex_count() {
        return Err(CoreError::InvalidInput(format!("vertex index {v0} out of range")));
    }
    if credit.dim() != g.dimension() {
        return Err(CoreError::InvalidInput(format!(
            "credit has dimension {}, expected {}",
            credit.dim(),
            g.dimension()
        )));
    }

    fn forced(g: &GameGraph, v: VertexIdx, remaining: &Weight, depth_left: usize) -> bool {
        if depth_left == 0 {
            return false;
        }
        let step = |e| {
            let edge = g.edge(e);
            let next = remaining.add(&edge.weight);
            let lost = next.0.iter().any(num_traits::Signed::is_negative);
            lost || forced(g, edge.dst, &next, depth_left - 1)
        };
        match g.owner(v) {
            Player::Two => g.out_edges(v).iter().any(|&e| step(e)),
            Player::One => g.out_edges(v).iter().all(|&e| step(e)),
        }
    }

    Ok(forced(g, v0, credit, depth))
}

// ---------------------------------------------------------------------------
// Random instances
// ---------------------------------------------------------------------------

/// Generate a pseudo-random valid game graph, deterministically from the seed: `nv` vertices,
/// each Player 1 with probability `p1_fraction`; one to three outgoing edges per vertex with
/// uniform targets and componentwise-uniform weights in `[−wmax, wmax]`. An all-zero weight
/// assignment is repaired deterministically, and the result is cycle-normalized, so it always
/// passes validation (the normalization may add pass-through vertices).
pub fn random_game(
    nv: usize,
    d: usize,
    wmax: i64,
    p1_fraction: f64,
    seed: u64,
) -> Result<GameGraph> {
    if nv == 0 || d == 0 || wmax < 1 {
        return Err(CoreError::InvalidInput(format!(
            "random games need nv ≥ 1, d ≥ 1, wmax ≥ 1; got nv={nv}, d={d}, wmax={wmax}"
        )));
    }
    if !(0.0..=1.0).contains(&p1_fraction) {
        return Err(CoreError::InvalidInput(format!(
            "p1_fraction must lie in [0, 1], got {p1_fraction}"
        )));
    }
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let vertices: Vec<(String, Player)> = (0..nv)
        .map(|i| {
            let owner = if rng.random_bool(p1_fraction) { Player::One } else { Player::Two };
            (format!("n{i}"), owner)
        })
        .collect();
    let mut edges: Vec<(String, String, Weight)> = Vec::new();
    for i in 0..nv {
        let degree = rng.random_range(1..=3usize);
        for _ in 0..degree {
            let dst = rng.random_range(0..nv);
            let weight =
                Weight((0..d).map(|_| BigInt::from(rng.random_range(-wmax..=wmax))).collect());
            edges.push((format!("n{i}"), format!("n{dst}"), weight));
        }
    }
    if edges.iter().all(|(_, _, w)| w.is_zero()) {
        edges[0].2 = Weight::unit(d, 0);
    }
    let g = GameGraph::new(d, vertices, edges)?;
    normalize_cycles(&g)
}

// ---------------------------------------------------------------------------
// Cross-checking
// ---------------------------------------------------------------------------

/// The agreement matrix of one instance: verdicts of the first-cycle route on the lossy graph,
/// the box-deepening route on the lossy graph, and the self-covering oracle on the original.
///
/// `contradictions` lists hard inconsistencies — certified verdicts that disagree, an oracle
/// certificate against a solver's Player-2 verdict, or a strategy table failing verification.
/// An inconclusive oracle next to any solver verdict is consistent, as is an uncertified
/// Player-2 box verdict next to a Player-1 first-cycle verdict (the cap budget simply ran out);
/// the latter is recorded in `notes`.
#[derive(Debug, Clone)]
pub struct CrossCheckReport {
    pub fcb_winner: Player,
    pub fcb_verified: bool,
    pub box_winner: Player,
    pub box_certified: bool,
    pub oracle_win1: bool,
    pub covered_leaves: Option<usize>,
    pub contradictions: Vec<String>,
    pub notes: Vec<String>,
}

impl CrossCheckReport {
    pub fn consistent(&self) -> bool {
        self.contradictions.is_empty()
    }
}

/// Run all three routes on one instance and report the agreement matrix. The oracle searches
/// the original graph to `depth`; the two solver routes run on the lossy graph (the
/// arbitrary-credit reduction).
pub fn cross_check(
    g: &GameGraph,
    v0: VertexIdx,
    depth: usize,
    opts: &SolveOpts,
) -> Result<CrossCheckReport> {
    g.ensure_valid()?;
    if v0 >= g.vertex_count() {
        return Err(CoreError::InvalidInput(format!("vertex index {v0} out of range")));
    }
    let l = lossy(g)?;
    let v0l = l
        .vertex_index(&g.vertex(v0).id)
        .expect("the lossy graph keeps every vertex of the original");

    let universe = Universe::new(&fcb_universe_norm(&l), l.dimension(), opts.geometry_budget)?;
    let (fcb_winner, table) = solve_fcb(&l, v0l, universe.colours(), opts.search_budget)?;
    let fcb_verified = verify_fcb_strategy(&l, v0l, universe.colours(), &table)?;

    let box_opts = SolveOpts { mode: SolveMode::Box, ..opts.clone() };
    let box_result = solve_bounding(&l, v0l, &box_opts)?;

    let verdict = self_covering_search(g, v0, depth)?;

    let mut contradictions = Vec::new();
    let mut notes = Vec::new();
    if !fcb_verified {
        contradictions.push("the first-cycle strategy table failed verification".into());
    }
    if let OracleVerdict::Win1(_) = &verdict {
        if fcb_winner == Player::Two {
            contradictions.push(
                "the oracle certified a Player-1 win but the first-cycle route says Player 2"
                    .into(),
            );
        }
        if box_result.winner == Player::Two && box_result.certified {
            contradictions.push(
                "the oracle certified a Player-1 win against a certified Player-2 box verdict"
                    .into(),
            );
        }
    }
    if fcb_winner != box_result.winner {
        if box_result.certified {
            contradictions.push(format!(
                "certified routes disagree: first-cycle says {:?}, box says {:?}",
                fcb_winner, box_result.winner
            ));
        } else {
            notes.push(format!(
                "box deepening stopped at {} without finding the Player-1 win the first-cycle \
                 route certified",
                box_result.method
            ));
        }
    }

    let covered_leaves = match &verdict {
        OracleVerdict::Win1(cert) => Some(cert.covered_leaves),
        OracleVerdict::Inconclusive => None,
    };
    Ok(CrossCheckReport {
        fcb_winner,
        fcb_verified,
        box_winner: box_result.winner,
        box_certified: box_result.certified,
        oracle_win1: verdict.is_win1(),
        covered_leaves,
        contradictions,
        notes,
    })
}
