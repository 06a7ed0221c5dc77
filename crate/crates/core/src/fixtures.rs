//! Built-in example games used across tests, documentation, and the command-line tool.
//!
//! - [`balance_game`]: the standard 2-dimensional example where Player 1 must balance two
//!   antagonistic Player-2 vertices. Player 1 wins the energy objective from `v0` with initial
//!   credit `(2,1)` by steering towards whichever side the current level can afford, but loses
//!   the bounding objective: Player 2 can force a slow drift by answering each visit with the
//!   more extreme of its two return edges.
//! - [`drain_game`]: a 2-dimensional graph owned entirely by Player 1 whose every cycle loses
//!   weight on some coordinate; Player 1 loses energy and bounding objectives alike, no matter
//!   the initial credit.
//! - [`seesaw_game`]: a single Player-1 vertex with two opposite self-loops; the minimal graph
//!   whose cycle weights cancel, handy for exercising counter cancellation.
//!
//! The accompanying play prefixes and strategies are the ones used by the worked examples in the
//! test-suite; their exact traces are frozen in tests.

use crate::game::{Configuration, GameGraph, Player, Weight};

/// The two-sided balancing game (dimension 2).
///
/// `v0` belongs to Player 1 and chooses a side; `vL` and `vR` belong to Player 2 and return to
/// `v0` with one of two weights each: `vL` pays `(-2,2)` or `(-1,3)`, `vR` pays `(2,-1)` or
/// `(4,-3)`.
pub fn balance_game() -> GameGraph {
    GameGraph::new(
        2,
        vec![
            ("v0".into(), Player::One),
            ("vL".into(), Player::Two),
            ("vR".into(), Player::Two),
        ],
        vec![
            ("v0".into(), "vL".into(), Weight::from_i64(&[0, 0])),
            ("v0".into(), "vR".into(), Weight::from_i64(&[0, 0])),
            ("vL".into(), "v0".into(), Weight::from_i64(&[-2, 2])),
            ("vL".into(), "v0".into(), Weight::from_i64(&[-1, 3])),
            ("vR".into(), "v0".into(), Weight::from_i64(&[2, -1])),
            ("vR".into(), "v0".into(), Weight::from_i64(&[4, -3])),
        ],
    )
    .expect("fixture is well-formed")
}

/// The draining game (dimension 2): both vertices belong to Player 1.
///
/// `vL` and `vR` each carry a self-loop trading one coordinate for the other (`(1,-1)` and
/// `(-1,1)`), and the connecting edges `vL -> vR` and `vR -> vL` pay `(-1,0)` and `(0,-1)`.
/// Every cycle either strictly loses on a coordinate or is a detour through the connecting
/// edges, so Player 1 cannot keep the level bounded from below.
pub fn drain_game() -> GameGraph {
    GameGraph::new(
        2,
        vec![("vL".into(), Player::One), ("vR".into(), Player::One)],
        vec![
            ("vL".into(), "vR".into(), Weight::from_i64(&[-1, 0])),
            ("vR".into(), "vL".into(), Weight::from_i64(&[0, -1])),
            ("vL".into(), "vL".into(), Weight::from_i64(&[1, -1])),
            ("vR".into(), "vR".into(), Weight::from_i64(&[-1, 1])),
        ],
    )
    .expect("fixture is well-formed")
}

/// A single Player-1 vertex with self-loops `(1,-1)` and `(-1,1)` (dimension 2).
///
/// Its two non-zero cycle weights sum to zero, making it the smallest graph on which counter
/// cancellation has a solution.
pub fn seesaw_game() -> GameGraph {
    GameGraph::new(
        2,
        vec![("v".into(), Player::One)],
        vec![
            ("v".into(), "v".into(), Weight::from_i64(&[1, -1])),
            ("v".into(), "v".into(), Weight::from_i64(&[-1, 1])),
        ],
    )
    .expect("fixture is well-formed")
}

/// The canonical seven-configuration play prefix of the balance game.
///
/// Player 1 plays the balance strategy (go left iff the first level coordinate is non-negative);
/// Player 2 answers `vL` with its first return edge `(-2,2)` and `vR` with its second `(4,-3)`.
pub fn balance_play_prefix() -> Vec<Configuration> {
    let g = balance_game();
    let (v0, vl, vr) = (
        g.require_vertex("v0").unwrap(),
        g.require_vertex("vL").unwrap(),
        g.require_vertex("vR").unwrap(),
    );
    let cfg = |v, a: &[i64]| Configuration { vertex: v, level: Weight::from_i64(a) };
    vec![
        cfg(v0, &[0, 0]),
        cfg(vl, &[0, 0]),
        cfg(v0, &[-2, 2]),
        cfg(vr, &[-2, 2]),
        cfg(v0, &[2, -1]),
        cfg(vl, &[2, -1]),
        cfg(v0, &[0, 1]),
    ]
}
