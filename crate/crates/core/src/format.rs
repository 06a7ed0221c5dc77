//! Stable on-disk formats: the versioned JSON game file, DOT export, and run manifests.
//!
//! The game file is a single JSON document:
//!
//! ```json
//! {
//!   "format": 1,
//!   "dimension": 2,
//!   "vertices": [{"id": "v0", "owner": 1}],
//!   "edges": [{"src": "v0", "dst": "v0", "weight": [1, -1]}]
//! }
//! ```
//!
//! Weight entries are JSON numbers when their magnitude stays below 2^53 and decimal strings
//! otherwise, so documents survive parsers that read all numbers as doubles; both encodings are
//! accepted on input, and exact values are never silently rounded. DOT export mirrors the
//! solver's drawing conventions: Player-1 vertices are triangles, Player-2 vertices boxes, and
//! edge labels are the weight tuples.
//!
//! A [`RunManifest`] accompanies every command-line result: command, flags, input digest, seed,
//! and budgets — enough to reproduce a run byte for byte.

use std::collections::BTreeMap;
use std::fmt::Write as _;
use std::path::Path;

use num_bigint::BigInt;
use serde::{Deserialize, Serialize};
use serde_json::{json, Map, Value};
use sha2::{Digest, Sha256};

use crate::error::{CoreError, Result};
use crate::game::{GameGraph, Player, Weight};

/// Version stamp of the game file format.
pub const GAME_FORMAT_VERSION: u64 = 1;

/// Largest magnitude serialized as a plain JSON number; anything at or above becomes a decimal
/// string (2^53, the edge of double-precision exactness).
const NUMBER_LIMIT: u64 = 1 << 53;

/// Encode one integer: a JSON number when exactly representable in a double, a decimal string
/// otherwise.
pub fn bigint_to_json(x: &BigInt) -> Value {
    if x.magnitude() < &num_bigint::BigUint::from(NUMBER_LIMIT) {
        // Within ±(2^53 - 1), i64 conversion cannot fail.
        json!(i64::try_from(x).expect("magnitude below 2^53 fits in i64"))
    } else {
        json!(x.to_string())
    }
}

/// Decode an integer from either encoding. Floats and non-integer strings are rejected.
pub fn bigint_from_json(v: &Value) -> Result<BigInt> {
    match v {
        Value::Number(n) => {
            if let Some(i) = n.as_i64() {
                Ok(BigInt::from(i))
            } else if let Some(u) = n.as_u64() {
                Ok(BigInt::from(u))
            } else {
                Err(CoreError::InvalidInput(format!("non-integer number {n} in game file")))
            }
        }
        Value::String(s) => s
            .parse::<BigInt>()
            .map_err(|_| CoreError::InvalidInput(format!("malformed integer string {s:?}"))),
        other => Err(CoreError::InvalidInput(format!("expected an integer, got {other}"))),
    }
}

/// Serialize a game to the canonical JSON document (vertices and edges in canonical order).
pub fn game_to_json(g: &GameGraph) -> Value {
    let vertices: Vec<Value> = g
        .vertices()
        .iter()
        .map(|v| json!({"id": v.id, "owner": v.owner.label()}))
        .collect();
    let edges: Vec<Value> = g
        .edges()
        .iter()
        .map(|e| {
            json!({
                "src": g.vertex(e.src).id,
                "dst": g.vertex(e.dst).id,
                "weight": e.weight.0.iter().map(bigint_to_json).collect::<Vec<_>>(),
            })
        })
        .collect();
    json!({
        "format": GAME_FORMAT_VERSION,
        "dimension": g.dimension(),
        "vertices": vertices,
        "edges": edges,
    })
}

/// The canonical pretty-printed document, newline-terminated.
pub fn game_to_string(g: &GameGraph) -> String {
    let mut s = serde_json::to_string_pretty(&game_to_json(g)).expect("serializing plain JSON");
    s.push('\n');
    s
}

fn get<'a>(obj: &'a Map<String, Value>, key: &str) -> Result<&'a Value> {
    obj.get(key)
        .ok_or_else(|| CoreError::InvalidInput(format!("game file is missing field {key:?}")))
}

fn as_object<'a>(v: &'a Value, what: &str) -> Result<&'a Map<String, Value>> {
    v.as_object()
        .ok_or_else(|| CoreError::InvalidInput(format!("{what} must be a JSON object")))
}

fn as_array<'a>(v: &'a Value, what: &str) -> Result<&'a Vec<Value>> {
    v.as_array()
        .ok_or_else(|| CoreError::InvalidInput(format!("{what} must be a JSON array")))
}

fn as_str<'a>(v: &'a Value, what: &str) -> Result<&'a str> {
    v.as_str()
        .ok_or_else(|| CoreError::InvalidInput(format!("{what} must be a JSON string")))
}

/// Parse a game from its JSON document.
pub fn game_from_json(v: &Value) -> Result<GameGraph> {
    let doc = as_object(v, "game file")?;
    let format = get(doc, "format")?
        .as_u64()
        .ok_or_else(|| CoreError::InvalidInput("format must be an integer".into()))?;
    if format != GAME_FORMAT_VERSION {
        return Err(CoreError::InvalidInput(format!(
            "unsupported game file format {format}, expected {GAME_FORMAT_VERSION}"
        )));
    }
    let dimension = get(doc, "dimension")?
        .as_u64()
        .ok_or_else(|| CoreError::InvalidInput("dimension must be a positive integer".into()))?
        as usize;
    let mut vertices = Vec::new();
    for entry in as_array(get(doc, "vertices")?, "vertices")? {
        let vo = as_object(entry, "vertex")?;
        let id = as_str(get(vo, "id")?, "vertex id")?.to_string();
        let owner = get(vo, "owner")?
            .as_u64()
            .ok_or_else(|| CoreError::InvalidInput("owner must be 1 or 2".into()))
            .and_then(Player::from_label)?;
        vertices.push((id, owner));
    }
    let mut edges = Vec::new();
    for entry in as_array(get(doc, "edges")?, "edges")? {
        let eo = as_object(entry, "edge")?;
        let src = as_str(get(eo, "src")?, "edge src")?.to_string();
        let dst = as_str(get(eo, "dst")?, "edge dst")?.to_string();
        let weight = as_array(get(eo, "weight")?, "edge weight")?
            .iter()
            .map(bigint_from_json)
            .collect::<Result<Vec<BigInt>>>()?;
        edges.push((src, dst, Weight(weight)));
    }
    GameGraph::new(dimension, vertices, edges)
}

/// Parse a game from JSON text.
pub fn game_from_str(s: &str) -> Result<GameGraph> {
    let v: Value = serde_json::from_str(s)
        .map_err(|e| CoreError::InvalidInput(format!("malformed JSON: {e}")))?;
    game_from_json(&v)
}

/// Read a game file from disk.
pub fn load_game(path: &Path) -> Result<GameGraph> {
    let text = std::fs::read_to_string(path)
        .map_err(|e| CoreError::InvalidInput(format!("cannot read {}: {e}", path.display())))?;
    game_from_str(&text)
}

/// Write the canonical game document to disk.
pub fn save_game(path: &Path, g: &GameGraph) -> Result<()> {
    std::fs::write(path, game_to_string(g))
        .map_err(|e| CoreError::InvalidInput(format!("cannot write {}: {e}", path.display())))
}

fn dot_escape(s: &str) -> String {
    s.replace('\\', "\\\\").replace('"', "\\\"")
}

/// Render the game in DOT: Player-1 vertices as triangles, Player-2 vertices as boxes, edges
/// labelled by their weight tuples. Deterministic (canonical graph order).
pub fn game_to_dot(g: &GameGraph) -> String {
    let mut out = String::from("digraph game {\n");
    for v in g.vertices() {
        let shape = match v.owner {
            Player::One => "triangle",
            Player::Two => "box",
        };
        let _ = writeln!(out, "  \"{}\" [shape={shape}];", dot_escape(&v.id));
    }
    for e in g.edges() {
        let _ = writeln!(
            out,
            "  \"{}\" -> \"{}\" [label=\"{}\"];",
            dot_escape(&g.vertex(e.src).id),
            dot_escape(&g.vertex(e.dst).id),
            e.weight
        );
    }
    out.push_str("}\n");
    out
}

/// Hex SHA-256 digest, used to fingerprint input files in run manifests.
pub fn sha256_hex(bytes: &[u8]) -> String {
    let mut hasher = Sha256::new();
    hasher.update(bytes);
    let digest = hasher.finalize();
    let mut s = String::with_capacity(64);
    for b in digest {
        let _ = write!(s, "{b:02x}");
    }
    s
}

/// Provenance record emitted with every command-line result: what ran, on what input, with what
/// knobs. Two runs with identical manifests produce identical result bodies.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct RunManifest {
    /// Result document format version.
    pub format: u64,
    /// Tool name.
    pub tool: String,
    /// Tool version.
    pub version: String,
    /// Subcommand that ran.
    pub command: String,
    /// All arguments after the subcommand, verbatim.
    pub args: Vec<String>,
    /// SHA-256 of the input file, when the command reads one.
    #[serde(skip_serializing_if = "Option::is_none")]
    pub input_digest: Option<String>,
    /// Random seed, for seeded commands.
    #[serde(skip_serializing_if = "Option::is_none")]
    pub seed: Option<u64>,
    /// Named budgets in force (sorted for stable output).
    pub budgets: BTreeMap<String, u64>,
}
