//! Graph constructions: lossy graphs, per-coordinate capped graphs, the capped chain, and
//! arena-size arithmetic.
//!
//! The *lossy* construction inserts, at every Player-1 vertex and for each coordinate, a
//! self-loop weighted by the negative unit vector: Player 1 may discard energy at will, which is
//! exactly what makes arbitrary-initial-credit energy objectives equivalent to bounding
//! objectives downstream.
//!
//! The *capped* construction turns one coordinate's running total into finite state: vertices
//! become pairs of a base vertex and a tracked total clamped to a window `[-fence, cap]`, and
//! any transition leaving the window diverts to a sink `⊥` that is losing for Player 1. Chaining
//! cappings over all coordinates after a single lossy step yields a finite arena on which a
//! plain safety solver decides the bounding game. Windows large enough for certified answers are
//! astronomical — [`arena_size_bound`] evaluates them exactly — so practical solving sweeps the
//! cap upward and reports whether the verdict is certified (see the energy solver).
//!
//! All functions are pure and structural: they transform whatever graph they are given; the
//! semantic claims about winners assume inputs that satisfy the standing assumptions.

use num_bigint::BigInt;
use num_traits::{One, Signed};

use crate::error::{CoreError, Result};
use crate::game::{GameGraph, Player, Weight};

/// Vertex id of the out-of-window sink in capped graphs. Product vertex ids always contain
/// `@`, so the sink never collides with them.
pub const BOTTOM_ID: &str = "_bottom";

/// Default ceiling on the number of vertices any single capped arena may have.
pub const DEFAULT_ARENA_BUDGET: usize = 5_000_000;

/// The id of the product vertex for `base` with tracked total `a`.
pub fn capped_id(base: &str, a: &BigInt) -> String {
    format!("{base}@{a}")
}

/// The start vertex id after `stages` cappings of a graph rooted at `v0` (each stage starts the
/// new tracked total at zero).
pub fn chain_start_id(v0: &str, stages: usize) -> String {
    let mut id = v0.to_string();
    for _ in 0..stages {
        id.push_str("@0");
    }
    id
}

/// Insert, at each Player-1 vertex and for each coordinate `i`, a self-loop labelled by the
/// negative unit vector `-e_i`. Player-2 vertices are untouched. The edge norm of the result is
/// `max(‖E‖, 1)`.
pub fn lossy(g: &GameGraph) -> Result<GameGraph> {
    let d = g.dimension();
    let vertices: Vec<(String, Player)> =
        g.vertices().iter().map(|v| (v.id.clone(), v.owner)).collect();
    let mut edges: Vec<(String, String, Weight)> = g
        .edges()
        .iter()
        .map(|e| {
            (g.vertex(e.src).id.clone(), g.vertex(e.dst).id.clone(), e.weight.clone())
        })
        .collect();
    for v in g.vertices() {
        if v.owner == Player::One {
            for i in 0..d {
                edges.push((v.id.clone(), v.id.clone(), Weight::unit(d, i).neg()));
            }
        }
    }
    GameGraph::new(d, vertices, edges)
}

/// The capped graph over coordinate `coordinate` (0-based): the product of `g` with a tracked
/// running total clamped to `[-fence, cap]`.
///
/// Vertices are `(v, a)` for every vertex `v` and every `a` in the window, named
/// `{v.id}@{a}`, owned by `v`'s owner, plus the Player-1 sink [`BOTTOM_ID`] with a single
/// `+e_1` self-loop (any unit vector makes it losing for Player 1 under bounding). Each edge
/// `v → u` of weight `w` becomes `(v,a) → (u, a + w[coordinate])` when the new total stays in
/// the window, and `(v,a) → ⊥` otherwise; weights are unchanged, so the construction preserves
/// the edge norm and the dimension. The vertex count is `1 + |V|·(fence + cap + 1)`; exceeding
/// `budget` vertices is a budget error (checked before anything is allocated).
pub fn capped(
    g: &GameGraph,
    coordinate: usize,
    fence: &BigInt,
    cap: &BigInt,
    budget: usize,
) -> Result<GameGraph> {
    let d = g.dimension();
    if coordinate >= d {
        return Err(CoreError::InvalidInput(format!(
            "coordinate {coordinate} out of range for dimension {d}"
        )));
    }
    if fence.is_negative() || cap.is_negative() {
        return Err(CoreError::InvalidInput(format!(
            "capping window must be nonnegative, got fence {fence}, cap {cap}"
        )));
    }
    let window = fence + cap + 1u32;
    let total = BigInt::from(g.vertex_count()) * &window + 1u32;
    if total > BigInt::from(budget) {
        return Err(CoreError::Budget(format!(
            "capped arena needs {total} vertices, above the budget of {budget}"
        )));
    }

    let mut vertices: Vec<(String, Player)> = Vec::new();
    let mut edges: Vec<(String, String, Weight)> = Vec::new();
    for v in g.vertices() {
        let mut a = -fence.clone();
        while a <= *cap {
            vertices.push((capped_id(&v.id, &a), v.owner));
            let vi = g.vertex_index(&v.id).expect("iterating the graph's own vertices");
            for &ei in g.out_edges(vi) {
                let e = g.edge(ei);
                let next = &a + &e.weight.0[coordinate];
                let dst = if -fence <= next && next <= *cap {
                    capped_id(&g.vertex(e.dst).id, &next)
                } else {
                    BOTTOM_ID.to_string()
                };
                edges.push((capped_id(&v.id, &a), dst, e.weight.clone()));
            }
            a += 1u32;
        }
    }
    vertices.push((BOTTOM_ID.to_string(), Player::One));
    edges.push((BOTTOM_ID.to_string(), BOTTOM_ID.to_string(), Weight::unit(d, 0)));
    GameGraph::new(d, vertices, edges)
}

/// The capped chain: one lossy step, then a capping of every coordinate in order (`i = 1..d`),
/// each with fence `credit[i]` and the same `cap`. The start vertex of the result for a game
/// rooted at `v0` is [`chain_start_id`]`(v0, d)`.
pub fn capped_chain(
    g: &GameGraph,
    credit: &Weight,
    cap: &BigInt,
    budget: usize,
) -> Result<GameGraph> {
    let d = g.dimension();
    if credit.dim() != d {
        return Err(CoreError::InvalidInput(format!(
            "credit has dimension {}, expected {d}",
            credit.dim()
        )));
    }
    if credit.0.iter().any(Signed::is_negative) {
        return Err(CoreError::InvalidInput(format!(
            "credit must be componentwise nonnegative, got {credit}"
        )));
    }
    let mut h = lossy(g)?;
    for i in 0..d {
        h = capped(&h, i, &credit.0[i], cap, budget)?;
    }
    Ok(h)
}

/// Exact evaluation of the arena-size recurrence
/// `A_0 = nv`, `A_{i+1} = 1 + A_i·(credit[i] + (4·A_i·ne_norm)^(2(d+2)³))`,
/// returning `A_d` — the vertex count of the fully capped chain at certified windows.
pub fn arena_size_bound(
    nv: usize,
    ne_norm: &BigInt,
    credit: &Weight,
    d: usize,
) -> Result<BigInt> {
    if nv == 0 || !ne_norm.is_positive() {
        return Err(CoreError::InvalidInput(format!(
            "vertex count and edge norm must be positive, got {nv} and {ne_norm}"
        )));
    }
    if credit.dim() != d {
        return Err(CoreError::InvalidInput(format!(
            "credit has dimension {}, expected {d}",
            credit.dim()
        )));
    }
    if credit.0.iter().any(Signed::is_negative) {
        return Err(CoreError::InvalidInput(format!(
            "credit must be componentwise nonnegative, got {credit}"
        )));
    }
    let exp = 2 * (d + 2) * (d + 2) * (d + 2);
    let mut a = BigInt::from(nv);
    for i in 0..d {
        let base = BigInt::from(4) * &a * ne_norm;
        a = BigInt::one() + &a * (&credit.0[i] + num_traits::pow::pow(base, exp));
    }
    Ok(a)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::fixtures::{balance_game, drain_game, seesaw_game};
    use num_traits::Zero;

    fn big(x: i64) -> BigInt {
        BigInt::from(x)
    }

    #[test]
    fn lossy_adds_unit_loops_at_player_one_vertices() {
        let g = balance_game();
        let l = lossy(&g).unwrap();
        assert_eq!(l.edge_count(), g.edge_count() + 2);
        let v0 = l.vertex_index("v0").unwrap();
        let loops: Vec<Weight> = l
            .out_edges(v0)
            .iter()
            .map(|&e| l.edge(e))
            .filter(|e| e.dst == v0)
            .map(|e| e.weight.clone())
            .collect();
        assert_eq!(loops, vec![Weight::from_i64(&[-1, 0]), Weight::from_i64(&[0, -1])]);
        // Player-2 vertices are untouched.
        let vl = l.vertex_index("vL").unwrap();
        assert_eq!(l.out_edges(vl).len(), 2);
        assert_eq!(l.edge_norm(), big(4));

        // Both vertices of the two-vertex all-Player-1 graph gain two loops each.
        let dr = drain_game();
        assert_eq!(lossy(&dr).unwrap().edge_count(), dr.edge_count() + 4);
    }

    #[test]
    fn lossy_without_player_one_vertices_is_identity() {
        let g = GameGraph::new(
            2,
            vec![("a".into(), Player::Two)],
            vec![("a".into(), "a".into(), Weight::from_i64(&[0, 0]))],
        )
        .unwrap();
        assert_eq!(lossy(&g).unwrap(), g);
        // A Player-1 vertex with only a zero loop gains unit loops: the norm becomes 1.
        let h = GameGraph::new(
            2,
            vec![("a".into(), Player::One)],
            vec![("a".into(), "a".into(), Weight::from_i64(&[0, 0]))],
        )
        .unwrap();
        assert_eq!(lossy(&h).unwrap().edge_norm(), big(1));
    }

    #[test]
    fn capped_drain_window_zero_one() {
        let g = drain_game();
        let c = capped(&g, 0, &big(0), &big(1), DEFAULT_ARENA_BUDGET).unwrap();
        assert_eq!(c.vertex_count(), 1 + 2 * (0 + 1 + 1));
        // From (vL,0) the (1,-1) self-loop tracks up to (vL,1); from (vL,1) it overflows to ⊥.
        let from0 = c.require_vertex("vL@0").unwrap();
        let from1 = c.require_vertex("vL@1").unwrap();
        let bottom = c.require_vertex(BOTTOM_ID).unwrap();
        let w = Weight::from_i64(&[1, -1]);
        let loop0 = c.out_edges(from0).iter().map(|&e| c.edge(e)).find(|e| e.weight == w).unwrap();
        assert_eq!(c.vertex(loop0.dst).id, "vL@1");
        let loop1 = c.out_edges(from1).iter().map(|&e| c.edge(e)).find(|e| e.weight == w).unwrap();
        assert_eq!(loop1.dst, bottom);
        // (vL,0) -> vR has weight coordinate -1: underflow to ⊥.
        let out = c
            .out_edges(from0)
            .iter()
            .map(|&e| c.edge(e))
            .find(|e| e.weight == Weight::from_i64(&[-1, 0]))
            .unwrap();
        assert_eq!(out.dst, bottom);
        // The sink is a Player-1 vertex with exactly one unit self-loop.
        assert_eq!(c.owner(bottom), Player::One);
        let bottom_out: Vec<_> = c.out_edges(bottom).to_vec();
        assert_eq!(bottom_out.len(), 1);
        assert_eq!(c.edge(bottom_out[0]).dst, bottom);
        assert_eq!(c.edge(bottom_out[0]).weight, Weight::unit(2, 0));
    }

    #[test]
    fn zero_coordinate_edges_never_reach_bottom() {
        let g = drain_game();
        for coordinate in 0..2 {
            let c = capped(&g, coordinate, &big(1), &big(1), DEFAULT_ARENA_BUDGET).unwrap();
            let bottom = c.require_vertex(BOTTOM_ID).unwrap();
            for e in c.edges() {
                if e.dst == bottom && e.src != bottom {
                    assert!(!e.weight.0[coordinate].is_zero());
                }
            }
        }
    }

    #[test]
    fn capped_vertex_count_formula() {
        let g = balance_game();
        for (fence, cap) in [(0i64, 0i64), (0, 3), (2, 1), (5, 8)] {
            let c = capped(&g, 1, &big(fence), &big(cap), DEFAULT_ARENA_BUDGET).unwrap();
            assert_eq!(c.vertex_count() as i64, 1 + 3 * (fence + cap + 1));
        }
    }

    #[test]
    fn capped_rejects_oversized_windows_before_allocating() {
        let g = drain_game();
        let huge = BigInt::from(10).pow(40);
        let err = capped(&g, 0, &big(0), &huge, DEFAULT_ARENA_BUDGET).unwrap_err();
        assert!(matches!(err, CoreError::Budget(_)));
        let err = capped(&g, 0, &big(0), &big(100), 10).unwrap_err();
        assert!(matches!(err, CoreError::Budget(_)));
    }

    #[test]
    fn capped_validates_inputs() {
        let g = drain_game();
        assert!(capped(&g, 2, &big(0), &big(1), DEFAULT_ARENA_BUDGET).is_err());
        assert!(capped(&g, 0, &big(-1), &big(1), DEFAULT_ARENA_BUDGET).is_err());
        assert!(capped_chain(&g, &Weight::from_i64(&[1]), &big(1), DEFAULT_ARENA_BUDGET).is_err());
        assert!(capped_chain(&g, &Weight::from_i64(&[-1, 0]), &big(1), DEFAULT_ARENA_BUDGET)
            .is_err());
    }

    #[test]
    fn tracked_totals_match_path_sums() {
        let g = drain_game();
        let c = capped(&g, 0, &big(2), &big(2), DEFAULT_ARENA_BUDGET).unwrap();
        let bottom = c.require_vertex(BOTTOM_ID).unwrap();
        // Breadth-first walk from (vL,0): the tracked part of every reached id must equal the
        // running coordinate-0 total along the path that reached it.
        let start = c.require_vertex("vL@0").unwrap();
        let mut seen = vec![false; c.vertex_count()];
        let mut queue = std::collections::VecDeque::from([(start, BigInt::zero())]);
        seen[start] = true;
        let mut visited = 0;
        while let Some((v, total)) = queue.pop_front() {
            visited += 1;
            let id = &c.vertex(v).id;
            let tracked: BigInt = id[id.rfind('@').unwrap() + 1..].parse().unwrap();
            assert_eq!(tracked, total);
            for &ei in c.out_edges(v) {
                let e = c.edge(ei);
                if e.dst != bottom && !seen[e.dst] {
                    seen[e.dst] = true;
                    queue.push_back((e.dst, &total + &e.weight.0[0]));
                }
            }
        }
        assert!(visited > 1);
    }

    #[test]
    fn chain_composes_lossy_then_each_coordinate() {
        let g = drain_game();
        let chain = capped_chain(&g, &Weight::from_i64(&[1, 1]), &big(2), DEFAULT_ARENA_BUDGET)
            .unwrap();
        // Stage sizes: lossy keeps 2 vertices; coordinate 1 gives 2·(1+2+1)+1 = 9; coordinate 2
        // gives 9·4+1 = 37.
        assert_eq!(chain.vertex_count(), 37);
        assert_eq!(chain.dimension(), 2);
        assert!(chain.vertex_index(&chain_start_id("vL", 2)).is_some());
        // Lossy ran exactly once, before the cappings: the innermost base carries the unit
        // loops, so the doubly-tracked start vertex has them too.
        let start = chain.require_vertex("vL@0@0").unwrap();
        let mut loop_weights: Vec<Weight> = chain
            .out_edges(start)
            .iter()
            .map(|&e| chain.edge(e))
            .filter(|e| e.weight.0.iter().all(|x| !x.is_positive()))
            .map(|e| e.weight.clone())
            .collect();
        loop_weights.sort();
        assert!(loop_weights.contains(&Weight::from_i64(&[-1, 0])));
        assert!(loop_weights.contains(&Weight::from_i64(&[0, -1])));
    }

    #[test]
    fn chain_with_cap_zero_diverts_positive_coordinates() {
        let g = seesaw_game();
        let chain =
            capped_chain(&g, &Weight::zero(2), &big(0), DEFAULT_ARENA_BUDGET).unwrap();
        let bottom = chain.require_vertex(BOTTOM_ID).unwrap();
        let start = chain.require_vertex(&chain_start_id("v", 2)).unwrap();
        // The (1,-1) loop overflows coordinate 1 immediately at cap 0.
        let e = chain
            .out_edges(start)
            .iter()
            .map(|&e| chain.edge(e))
            .find(|e| e.weight == Weight::from_i64(&[1, -1]))
            .unwrap();
        assert_eq!(e.dst, bottom);
    }

    #[test]
    fn transforms_commute_with_renaming() {
        let g = balance_game();
        let renamed = GameGraph::new(
            2,
            g.vertices().iter().map(|v| (format!("x_{}", v.id), v.owner)).collect(),
            g.edges()
                .iter()
                .map(|e| {
                    (
                        format!("x_{}", g.vertex(e.src).id),
                        format!("x_{}", g.vertex(e.dst).id),
                        e.weight.clone(),
                    )
                })
                .collect(),
        )
        .unwrap();
        // lossy: rename afterwards equals renaming first.
        let lossy_then_rename = {
            let l = lossy(&g).unwrap();
            GameGraph::new(
                2,
                l.vertices().iter().map(|v| (format!("x_{}", v.id), v.owner)).collect(),
                l.edges()
                    .iter()
                    .map(|e| {
                        (
                            format!("x_{}", l.vertex(e.src).id),
                            format!("x_{}", l.vertex(e.dst).id),
                            e.weight.clone(),
                        )
                    })
                    .collect(),
            )
            .unwrap()
        };
        assert_eq!(lossy_then_rename, lossy(&renamed).unwrap());

        // capped: rename the base part of every product id.
        let rename_capped = |c: &GameGraph| {
            let map_id = |id: &str| match id.rfind('@') {
                Some(i) => format!("x_{}@{}", &id[..i], &id[i + 1..]),
                None => id.to_string(),
            };
            GameGraph::new(
                2,
                c.vertices().iter().map(|v| (map_id(&v.id), v.owner)).collect(),
                c.edges()
                    .iter()
                    .map(|e| {
                        (
                            map_id(&c.vertex(e.src).id),
                            map_id(&c.vertex(e.dst).id),
                            e.weight.clone(),
                        )
                    })
                    .collect(),
            )
            .unwrap()
        };
        let a = capped(&g, 0, &big(1), &big(1), DEFAULT_ARENA_BUDGET).unwrap();
        let b = capped(&renamed, 0, &big(1), &big(1), DEFAULT_ARENA_BUDGET).unwrap();
        assert_eq!(rename_capped(&a), b);
    }

    #[test]
    fn arena_size_bound_examples() {
        // Empty recurrence.
        assert_eq!(arena_size_bound(7, &big(3), &Weight(vec![]), 0).unwrap(), big(7));
        // One step: 1 + 1·(0 + 4^54).
        let expected = BigInt::one() + BigInt::from(4).pow(54);
        assert_eq!(
            arena_size_bound(1, &big(1), &Weight::from_i64(&[0]), 1).unwrap(),
            expected
        );
        // Monotone in each argument.
        let base = arena_size_bound(1, &big(1), &Weight::from_i64(&[0]), 1).unwrap();
        assert!(arena_size_bound(2, &big(1), &Weight::from_i64(&[0]), 1).unwrap() > base);
        assert!(arena_size_bound(1, &big(2), &Weight::from_i64(&[0]), 1).unwrap() > base);
        assert!(arena_size_bound(1, &big(1), &Weight::from_i64(&[5]), 1).unwrap() > base);
        // Input validation.
        assert!(arena_size_bound(0, &big(1), &Weight::from_i64(&[0]), 1).is_err());
        assert!(arena_size_bound(1, &big(0), &Weight::from_i64(&[0]), 1).is_err());
        assert!(arena_size_bound(1, &big(1), &Weight::from_i64(&[-1]), 1).is_err());
        assert!(arena_size_bound(1, &big(1), &Weight::from_i64(&[0, 0]), 1).is_err());
    }
}
