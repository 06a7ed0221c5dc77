//! Exact geometry of M-generated subspaces, open half-spaces, and perfect half-spaces.
//!
//! A subspace of `Q^d` is *M-generated* when it is spanned by integer vectors of norm at most
//! `M`. An open half-space of a `j`-dimensional ambient subspace is the set
//! `{v ∈ ambient : normal·v < 0}`; it is M-generated when its boundary (a `(j-1)`-dimensional
//! subspace) is. A *perfect half-space* is a chain `H_d ∪ H_{d-1} ∪ ⋯ ∪ H_1` where each `H_j` is
//! an open half-space of the boundary of `H_{j+1}` — geometrically, a maximal salient blunt
//! cone. Chains may stop early (`H_d ∪ ⋯ ∪ H_k`, a *partially-perfect* half-space), and the
//! empty chain is a first-class value so least-common-ancestor computations need no special
//! cases.
//!
//! Everything is enumerable here because `M` and `d` stay small: all candidate boundaries are
//! spans of subsets of the integer lattice points of norm at most `M`, deduplicated by canonical
//! form. Two orders make results deterministic: the fixed total order `<` on open half-spaces
//! (lexicographic on dimension, canonical boundary rows, then normal — see [`hs_lt`]) and the
//! induced top-down lexicographic order `≺` on chains (see [`pphs_prec`]). The strategy
//! automaton's colour updates ([`Universe::shift_target`], [`Universe::cancel_target`]) always
//! pick order-minimal values, which is what makes runs reproducible.

use std::collections::HashMap;
use std::fmt;

use num_bigint::BigInt;
use num_traits::{Signed, ToPrimitive, Zero};

use crate::error::{CoreError, Result};
use crate::game::Weight;
use crate::linalg::{
    dot, feasible_point, kernel_basis, primitive_integer_row, rat_from_int, rref, LinearSystem,
    Rat, FM_BUDGET,
};

/// Default step budget for geometric enumerations (lattice points, candidate subsets, chains).
pub const DEFAULT_GEOMETRY_BUDGET: usize = 2_000_000;

/// A linear subspace of `Q^d` in canonical form: reduced-echelon basis scaled to primitive
/// integer rows (leading entries positive), rows in increasing pivot-column order. Two equal
/// subspaces always have identical representations, so derived equality, hashing, and ordering
/// are structural.
#[derive(Debug, Clone, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct Subspace {
    ambient_dim: usize,
    rows: Vec<Weight>,
}

impl Subspace {
    /// The span of a set of integer vectors inside `Q^d` (empty set allowed: the zero space).
    pub fn span(d: usize, vs: &[Weight]) -> Subspace {
        let rat_rows: Vec<Vec<Rat>> =
            vs.iter().map(|v| v.0.iter().map(rat_from_int).collect()).collect();
        let (rr, _) = rref(rat_rows);
        let rows = rr.iter().map(|r| Weight(primitive_integer_row(r))).collect();
        Subspace { ambient_dim: d, rows }
    }

    /// The whole space `Q^d`.
    pub fn full(d: usize) -> Subspace {
        Subspace { ambient_dim: d, rows: (0..d).map(|i| Weight::unit(d, i)).collect() }
    }

    /// The zero subspace of `Q^d`.
    pub fn zero_space(d: usize) -> Subspace {
        Subspace { ambient_dim: d, rows: Vec::new() }
    }

    pub fn dim(&self) -> usize {
        self.rows.len()
    }

    pub fn ambient_dim(&self) -> usize {
        self.ambient_dim
    }

    /// Canonical basis rows (primitive integers, echelon shape).
    pub fn basis_rows(&self) -> &[Weight] {
        &self.rows
    }

    /// Exact membership test by reduction against the echelon basis.
    pub fn contains(&self, v: &Weight) -> bool {
        debug_assert_eq!(v.dim(), self.ambient_dim);
        let mut x: Vec<Rat> = v.0.iter().map(rat_from_int).collect();
        for row in &self.rows {
            let p = row.0.iter().position(|e| !e.is_zero()).expect("basis rows are nonzero");
            if x[p].is_zero() {
                continue;
            }
            let f = &x[p] / &rat_from_int(&row.0[p]);
            for j in p..x.len() {
                let t = &f * &rat_from_int(&row.0[j]);
                x[j] = &x[j] - &t;
            }
        }
        x.iter().all(Zero::is_zero)
    }

    pub fn contains_subspace(&self, other: &Subspace) -> bool {
        other.rows.iter().all(|r| self.contains(r))
    }

    /// Primitive integer basis of the orthogonal complement (the null space of the basis
    /// matrix); `v ∈ self` iff `v` is orthogonal to every returned row.
    pub fn complement_rows(&self) -> Vec<Weight> {
        let rat_rows: Vec<Vec<Rat>> =
            self.rows.iter().map(|r| r.0.iter().map(rat_from_int).collect()).collect();
        kernel_basis(&rat_rows, self.ambient_dim)
            .iter()
            .map(|r| Weight(primitive_integer_row(r)))
            .collect()
    }

    /// All nonzero integer vectors of norm at most `m` lying in this subspace, in lexicographic
    /// order. The scan is over the full box `[-m, m]^d`, so it is guarded by `budget`.
    pub fn lattice_vectors_within(&self, m: &BigInt, budget: usize) -> Result<Vec<Weight>> {
        if !m.is_positive() {
            return Err(CoreError::InvalidInput(format!("lattice bound must be positive, got {m}")));
        }
        let d = self.ambient_dim;
        let mb = m.to_i64().ok_or_else(|| {
            CoreError::Budget(format!("lattice bound {m} is too large to enumerate"))
        })?;
        let side = 2u128 * mb as u128 + 1;
        let count = side.checked_pow(d as u32);
        if count.is_none_or(|c| c > budget as u128) {
            return Err(CoreError::Budget(format!(
                "lattice enumeration over [-{mb}, {mb}]^{d} exceeds the budget of {budget} candidates"
            )));
        }
        let mut out = Vec::new();
        let mut coords = vec![-mb; d];
        loop {
            if coords.iter().any(|&c| c != 0) {
                let w = Weight::from_i64(&coords);
                if self.contains(&w) {
                    out.push(w);
                }
            }
            // Odometer with the first coordinate most significant keeps the output sorted.
            let mut i = d;
            loop {
                if i == 0 {
                    return Ok(out);
                }
                i -= 1;
                if coords[i] < mb {
                    coords[i] += 1;
                    break;
                }
                coords[i] = -mb;
            }
        }
    }

    /// Whether the subspace is spanned by its own integer vectors of norm at most `m`.
    pub fn is_m_generated(&self, m: &BigInt, budget: usize) -> Result<bool> {
        let vs = self.lattice_vectors_within(m, budget)?;
        Ok(Subspace::span(self.ambient_dim, &vs) == *self)
    }
}

impl fmt::Display for Subspace {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        for (i, r) in self.rows.iter().enumerate() {
            if i > 0 {
                write!(f, ";")?;
            }
            write!(f, "{r}")?;
        }
        Ok(())
    }
}

/// An open half-space `{v ∈ ambient : normal·v < 0}` of a subspace, with its boundary
/// `ambient ∩ normal⊥` in canonical form. The normal is the primitive integer generator of the
/// line `ambient ∩ boundary⊥`, signed to select the side, so equal half-spaces have equal
/// representations.
#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct OpenHalfSpace {
    ambient: Subspace,
    boundary: Subspace,
    normal: Weight,
}

impl OpenHalfSpace {
    /// The two open half-spaces of `ambient` with the given boundary (which must be a
    /// codimension-1 subspace of `ambient`), in canonical order.
    pub fn sides(ambient: &Subspace, boundary: &Subspace) -> Result<[OpenHalfSpace; 2]> {
        if boundary.dim() + 1 != ambient.dim() || !ambient.contains_subspace(boundary) {
            return Err(CoreError::InvalidInput(
                "half-space boundary must be a codimension-1 subspace of the ambient".into(),
            ));
        }
        // Seek n = Σ c_l·a_l (a_l the ambient basis rows) with n ⊥ every boundary row: a
        // homogeneous system over the coefficients c with a one-dimensional kernel.
        let k = ambient.dim();
        let rows: Vec<Vec<Rat>> = boundary
            .rows
            .iter()
            .map(|b| ambient.rows.iter().map(|a| rat_from_int(&dot(&b.0, &a.0))).collect())
            .collect();
        let kernel = kernel_basis(&rows, k);
        if kernel.len() != 1 {
            return Err(CoreError::Falsification(format!(
                "normal line of a codimension-1 boundary has dimension {}",
                kernel.len()
            )));
        }
        let c = &kernel[0];
        let mut n = vec![Rat::zero(); ambient.ambient_dim()];
        for (l, a) in ambient.rows.iter().enumerate() {
            for j in 0..n.len() {
                let t = &c[l] * &rat_from_int(&a.0[j]);
                n[j] = &n[j] + &t;
            }
        }
        let n = Weight(primitive_integer_row(&n));
        let neg = n.neg();
        let make = |normal: Weight| OpenHalfSpace {
            ambient: ambient.clone(),
            boundary: boundary.clone(),
            normal,
        };
        let (a, b) = (make(n.clone()), make(neg));
        Ok(if hs_lt(&a, &b) { [a, b] } else { [b, a] })
    }

    pub fn dim(&self) -> usize {
        self.ambient.dim()
    }

    pub fn ambient(&self) -> &Subspace {
        &self.ambient
    }

    pub fn boundary(&self) -> &Subspace {
        &self.boundary
    }

    pub fn normal(&self) -> &Weight {
        &self.normal
    }

    /// Membership in the open half-space itself.
    pub fn contains(&self, v: &Weight) -> bool {
        self.ambient.contains(v) && dot(&self.normal.0, &v.0).is_negative()
    }

    /// Membership in the closure (half-space plus boundary).
    pub fn closure_contains(&self, v: &Weight) -> bool {
        self.ambient.contains(v) && !dot(&self.normal.0, &v.0).is_positive()
    }

    pub fn boundary_contains(&self, v: &Weight) -> bool {
        self.boundary.contains(v)
    }

    /// Membership in the strict part: the ambient minus the closure (the opposite open side).
    pub fn strict_part_contains(&self, v: &Weight) -> bool {
        self.ambient.contains(v) && dot(&self.normal.0, &v.0).is_positive()
    }

    /// The opposite open half-space of the same boundary.
    pub fn opposite(&self) -> OpenHalfSpace {
        OpenHalfSpace {
            ambient: self.ambient.clone(),
            boundary: self.boundary.clone(),
            normal: self.normal.neg(),
        }
    }

    /// Whether the open half-space meets the nonnegative orthant (exact rational feasibility of
    /// `v ≥ 0`, `v ∈ ambient`, `normal·v < 0`).
    pub fn intersects_nonneg_orthant(&self) -> Result<bool> {
        let d = self.ambient.ambient_dim();
        let mut ineqs: Vec<(Vec<Rat>, Rat)> = Vec::new();
        for i in 0..d {
            let mut c = vec![Rat::zero(); d];
            c[i] = Rat::from_integer(BigInt::from(1));
            ineqs.push((c, Rat::zero()));
        }
        for u in self.ambient.complement_rows() {
            let c: Vec<Rat> = u.0.iter().map(rat_from_int).collect();
            ineqs.push((c.iter().map(|x| -x).collect(), Rat::zero()));
            ineqs.push((c, Rat::zero()));
        }
        // Strict normal·v < 0 is cone-equivalent to normal·v ≤ -1.
        ineqs.push((
            self.normal.0.iter().map(|x| rat_from_int(&(-x))).collect(),
            Rat::from_integer(BigInt::from(1)),
        ));
        Ok(feasible_point(&LinearSystem { nvars: d, ineqs }, FM_BUDGET)?.is_some())
    }

    /// Stable text encoding `dim/boundary-rows/normal` used in logs and strategy dumps.
    pub fn encoding(&self) -> String {
        format!("{}/{}/{}", self.dim(), self.boundary, self.normal)
    }
}

impl fmt::Display for OpenHalfSpace {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&self.encoding())
    }
}

impl Ord for OpenHalfSpace {
    fn cmp(&self, other: &Self) -> std::cmp::Ordering {
        (self.dim(), &self.boundary, &self.normal).cmp(&(other.dim(), &other.boundary, &other.normal))
    }
}

impl PartialOrd for OpenHalfSpace {
    fn partial_cmp(&self, other: &Self) -> Option<std::cmp::Ordering> {
        Some(self.cmp(other))
    }
}

/// The fixed total order `<` on open half-spaces: lexicographic on (dimension, canonical
/// boundary rows, normal). Any fixed total order works; this one is stable across runs.
pub fn hs_lt(a: &OpenHalfSpace, b: &OpenHalfSpace) -> bool {
    a < b
}

/// All M-generated open half-spaces of `ambient`, deduplicated, sorted by `<`.
///
/// Candidate boundaries are the spans of `(dim-1)`-element subsets of the nonzero lattice
/// vectors of norm ≤ m inside `ambient`; this hits every M-generated codimension-1 subspace.
pub fn enumerate_m_open_halfspaces(
    m: &BigInt,
    ambient: &Subspace,
    budget: usize,
) -> Result<Vec<OpenHalfSpace>> {
    let k = ambient.dim();
    if k == 0 {
        return Err(CoreError::InvalidInput(
            "open half-spaces need an ambient of dimension at least 1".into(),
        ));
    }
    let lattice = ambient.lattice_vectors_within(m, budget)?;
    if Subspace::span(ambient.ambient_dim(), &lattice) != *ambient {
        return Err(CoreError::InvalidInput(format!(
            "ambient subspace [{ambient}] is not {m}-generated"
        )));
    }

    let mut boundaries: Vec<Subspace> = Vec::new();
    let mut seen: std::collections::HashSet<Subspace> = std::collections::HashSet::new();
    let mut combos = 0usize;
    for_each_combination(lattice.len(), k - 1, &mut |idx| {
        combos += 1;
        if combos > budget {
            return Err(CoreError::Budget(format!(
                "half-space boundary enumeration exceeds the budget of {budget} subsets"
            )));
        }
        let picked: Vec<Weight> = idx.iter().map(|&i| lattice[i].clone()).collect();
        let b = Subspace::span(ambient.ambient_dim(), &picked);
        if b.dim() == k - 1 && seen.insert(b.clone()) {
            boundaries.push(b);
        }
        Ok(())
    })?;

    let mut out = Vec::new();
    for b in &boundaries {
        out.extend(OpenHalfSpace::sides(ambient, b)?);
    }
    out.sort();

    let cap = bound_l(k, m, ambient.ambient_dim())?;
    if BigInt::from(out.len()) > cap {
        return Err(CoreError::Falsification(format!(
            "enumerated {} open half-spaces, above the theoretical cap {cap}",
            out.len()
        )));
    }
    Ok(out)
}

/// Visit every `t`-element index subset of `0..n` in lexicographic order.
fn for_each_combination(
    n: usize,
    t: usize,
    f: &mut impl FnMut(&[usize]) -> Result<()>,
) -> Result<()> {
    fn rec(
        n: usize,
        t: usize,
        start: usize,
        cur: &mut Vec<usize>,
        f: &mut impl FnMut(&[usize]) -> Result<()>,
    ) -> Result<()> {
        if cur.len() == t {
            return f(cur);
        }
        for i in start..n {
            cur.push(i);
            rec(n, t, i + 1, cur, f)?;
            cur.pop();
        }
        Ok(())
    }
    if t > n {
        return Ok(());
    }
    rec(n, t, 0, &mut Vec::new(), f)
}

/// Upper bound `ℒ(k) = 2(2M+1)^(d(k-1))` on the number of M-generated open half-spaces of a
/// k-dimensional subspace of `Q^d`.
pub fn bound_l(k: usize, m: &BigInt, d: usize) -> Result<BigInt> {
    if k == 0 || d == 0 || !m.is_positive() {
        return Err(CoreError::InvalidInput(format!(
            "half-space count bound needs positive arguments, got k={k}, M={m}, d={d}"
        )));
    }
    let base = BigInt::from(2) * m + 1;
    Ok(BigInt::from(2) * num_traits::pow::pow(base, d * (k - 1)))
}

/// A (partially-)perfect half-space: a chain `H_d, H_{d-1}, …, H_k` where `H_d` is an open
/// half-space of `Q^d` and each later element is an open half-space of its predecessor's
/// boundary. The chain may be empty (`k = d+1`), and is *perfect* when it reaches dimension 1.
/// As a point set it is the disjoint union of its members; it never contains the origin.
#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct PerfectHalfSpace {
    d: usize,
    chain: Vec<OpenHalfSpace>,
}

impl PerfectHalfSpace {
    /// The empty chain over `Q^d` (contains nothing; the ancestor of every colour).
    pub fn empty(d: usize) -> PerfectHalfSpace {
        PerfectHalfSpace { d, chain: Vec::new() }
    }

    /// Build and validate a chain: the first element's ambient must be `Q^d`, and every later
    /// element's ambient must be its predecessor's boundary.
    pub fn from_chain(d: usize, chain: Vec<OpenHalfSpace>) -> Result<PerfectHalfSpace> {
        let mut expected = Subspace::full(d);
        for h in &chain {
            if *h.ambient() != expected {
                return Err(CoreError::InvalidInput(format!(
                    "chain element {h} does not live in the expected ambient [{expected}]"
                )));
            }
            expected = h.boundary().clone();
        }
        Ok(PerfectHalfSpace { d, chain })
    }

    pub fn dimension(&self) -> usize {
        self.d
    }

    pub fn chain(&self) -> &[OpenHalfSpace] {
        &self.chain
    }

    /// Whether the chain reaches dimension 1 (a full perfect half-space).
    pub fn is_perfect(&self) -> bool {
        self.chain.len() == self.d
    }

    /// The lowest level present: `k` such that the chain is `H_d ∪ ⋯ ∪ H_k` (`d+1` when empty).
    pub fn lowest_level(&self) -> usize {
        self.d + 1 - self.chain.len()
    }

    /// The chain element of a given level (dimension) `k`, if the chain reaches it.
    pub fn at_level(&self, k: usize) -> Option<&OpenHalfSpace> {
        if k == 0 || k > self.d {
            return None;
        }
        self.chain.get(self.d - k)
    }

    /// Point membership: walk down the chain; a strictly negative product means inside, strictly
    /// positive means outside, zero descends to the next boundary.
    pub fn contains(&self, v: &Weight) -> bool {
        debug_assert_eq!(v.dim(), self.d);
        for h in &self.chain {
            let s = dot(&h.normal.0, &v.0);
            if s.is_negative() {
                return true;
            }
            if s.is_positive() {
                return false;
            }
        }
        false
    }

    /// The prefix `H_d ∪ ⋯ ∪ H_k` of this chain (empty when `k > d`).
    pub fn prefix_to_level(&self, k: usize) -> PerfectHalfSpace {
        let take = (self.d + 1).saturating_sub(k).min(self.chain.len());
        PerfectHalfSpace { d: self.d, chain: self.chain[..take].to_vec() }
    }

    /// Stable text encoding: chain elements joined by `|`, or `empty`.
    pub fn encoding(&self) -> String {
        if self.chain.is_empty() {
            return "empty".into();
        }
        self.chain.iter().map(|h| h.encoding()).collect::<Vec<_>>().join("|")
    }
}

impl fmt::Display for PerfectHalfSpace {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&self.encoding())
    }
}

impl Ord for PerfectHalfSpace {
    fn cmp(&self, other: &Self) -> std::cmp::Ordering {
        debug_assert_eq!(self.d, other.d, "chains from different dimensions are incomparable");
        for (a, b) in self.chain.iter().zip(&other.chain) {
            match a.cmp(b) {
                std::cmp::Ordering::Equal => continue,
                o => return o,
            }
        }
        self.chain.len().cmp(&other.chain.len())
    }
}

impl PartialOrd for PerfectHalfSpace {
    fn partial_cmp(&self, other: &Self) -> Option<std::cmp::Ordering> {
        Some(self.cmp(other))
    }
}

/// The top-down lexicographic order `≺` on chains: `a ≺ b` iff they agree above some level `k`
/// and `a`'s element at `k` is `<`-smaller (a proper prefix sorts before its extensions).
pub fn pphs_prec(a: &PerfectHalfSpace, b: &PerfectHalfSpace) -> bool {
    a < b
}

/// Least common ancestor: the longest common prefix of the chains.
pub fn lca(colours: &[PerfectHalfSpace]) -> Result<PerfectHalfSpace> {
    let Some(first) = colours.first() else {
        return Err(CoreError::InvalidInput("least common ancestor of no colours".into()));
    };
    let mut len = first.chain.len();
    for c in &colours[1..] {
        if c.d != first.d {
            return Err(CoreError::InvalidInput("colours from different dimensions".into()));
        }
        let mut common = 0;
        while common < len && common < c.chain.len() && c.chain[common] == first.chain[common] {
            common += 1;
        }
        len = common;
    }
    Ok(PerfectHalfSpace { d: first.d, chain: first.chain[..len].to_vec() })
}

/// The complete universe of M-generated perfect half-spaces of `Q^d`, with every intermediate
/// enumeration cached. Immutable once built; this is the colour palette of first-cycle games and
/// the strategy automaton.
#[derive(Debug, Clone)]
pub struct Universe {
    m: BigInt,
    d: usize,
    colours: Vec<PerfectHalfSpace>,
    by_ambient: HashMap<Subspace, Vec<OpenHalfSpace>>,
}

impl Universe {
    /// Enumerate the full universe for the given norm bound and dimension. `budget` caps both
    /// the geometric enumerations and the total number of colours.
    pub fn new(m: &BigInt, d: usize, budget: usize) -> Result<Universe> {
        if d == 0 {
            return Err(CoreError::InvalidInput("dimension must be at least 1".into()));
        }
        if !m.is_positive() {
            return Err(CoreError::InvalidInput(format!("norm bound must be positive, got {m}")));
        }
        let mut u = Universe {
            m: m.clone(),
            d,
            colours: Vec::new(),
            by_ambient: HashMap::new(),
        };
        let mut chain = Vec::new();
        u.descend(&Subspace::full(d), &mut chain, budget)?;
        Ok(u)
    }

    fn descend(
        &mut self,
        ambient: &Subspace,
        chain: &mut Vec<OpenHalfSpace>,
        budget: usize,
    ) -> Result<()> {
        if ambient.dim() == 0 {
            if self.colours.len() == budget {
                return Err(CoreError::Budget(format!(
                    "perfect half-space universe exceeds the budget of {budget} colours"
                )));
            }
            self.colours.push(PerfectHalfSpace { d: self.d, chain: chain.clone() });
            return Ok(());
        }
        let halfspaces = match self.by_ambient.get(ambient) {
            Some(hs) => hs.clone(),
            None => {
                let hs = enumerate_m_open_halfspaces(&self.m, ambient, budget)?;
                self.by_ambient.insert(ambient.clone(), hs.clone());
                hs
            }
        };
        for h in halfspaces {
            let boundary = h.boundary().clone();
            chain.push(h);
            self.descend(&boundary, chain, budget)?;
            chain.pop();
        }
        Ok(())
    }

    pub fn m(&self) -> &BigInt {
        &self.m
    }

    pub fn dimension(&self) -> usize {
        self.d
    }

    /// All perfect half-spaces, sorted by `≺` (the descent visits them in order).
    pub fn colours(&self) -> &[PerfectHalfSpace] {
        &self.colours
    }

    /// The `≺`-minimal colour (the automaton's initial memory).
    pub fn minimal_colour(&self) -> &PerfectHalfSpace {
        &self.colours[0]
    }

    /// The `<`-sorted M-generated open half-spaces of a subspace from this universe's chain
    /// tree (every chain element's ambient and boundary is a key).
    pub fn open_halfspaces_of(&self, ambient: &Subspace) -> Result<&[OpenHalfSpace]> {
        self.by_ambient
            .get(ambient)
            .map(Vec::as_slice)
            .ok_or_else(|| {
                CoreError::InvalidInput(format!(
                    "subspace [{ambient}] is not part of this universe's chain tree"
                ))
            })
    }

    /// Complete a valid chain prefix downward to a perfect half-space by greedily taking the
    /// `<`-minimal open half-space at each level — which yields the `≺`-minimal completion,
    /// since `≺` compares top-down.
    pub fn minimal_completion(&self, prefix: Vec<OpenHalfSpace>) -> Result<PerfectHalfSpace> {
        let mut chain = prefix;
        loop {
            let next_ambient =
                chain.last().map_or_else(|| Subspace::full(self.d), |h| h.boundary().clone());
            if next_ambient.dim() == 0 {
                break;
            }
            chain.push(self.open_halfspaces_of(&next_ambient)?[0].clone());
        }
        PerfectHalfSpace::from_chain(self.d, chain)
    }

    /// The k-shift target: keep the chain above level `k`; among the M-generated open
    /// half-spaces of `H_k`'s span whose *strict part* avoids every violating weight (the
    /// weights may sit inside or on the closure), pick the `<`-minimal one; complete minimally.
    /// `None` when every candidate has a violating weight strictly outside its closure — the
    /// signal that a cancellation is needed instead.
    pub fn shift_target(
        &self,
        current: &PerfectHalfSpace,
        k: usize,
        violating: &[Weight],
    ) -> Result<Option<PerfectHalfSpace>> {
        let h_k = current.at_level(k).ok_or_else(|| {
            CoreError::InvalidInput(format!("colour has no chain element at level {k}"))
        })?;
        let ambient = h_k.ambient().clone();
        for w in violating {
            if !ambient.contains(w) {
                return Err(CoreError::InvalidInput(format!(
                    "violating weight {w} lies outside the level-{k} span"
                )));
            }
        }
        for h in self.open_halfspaces_of(&ambient)? {
            if violating.iter().all(|w| !h.strict_part_contains(w)) {
                let mut prefix = current.chain[..self.d - k].to_vec();
                prefix.push(h.clone());
                return Ok(Some(self.minimal_completion(prefix)?));
            }
        }
        Ok(None)
    }

    /// The k-cancellation target: the `≺`-minimal perfect half-space agreeing with `current`
    /// above level `k`.
    pub fn cancel_target(&self, current: &PerfectHalfSpace, k: usize) -> Result<PerfectHalfSpace> {
        if current.at_level(k).is_none() {
            return Err(CoreError::InvalidInput(format!(
                "colour has no chain element at level {k}"
            )));
        }
        self.minimal_completion(current.chain[..self.d - k].to_vec())
    }
}
