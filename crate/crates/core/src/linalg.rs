//! Exact rational linear algebra and the kernel lemmas behind counter cancellation.
//!
//! Two facts about finite sets of small integer vectors do the heavy lifting for the strategy
//! automaton:
//!
//! - *alternatives*: a finite set `A` of integer vectors of norm at most `M` either lies in some
//!   M-generated closed half-space of its span, or some positive combination of its members is
//!   zero — see [`alternatives`];
//! - *small solutions*: when `Ax = 0` admits a positive solution, it admits one in positive
//!   integers bounded by `(2(M+1))^((r+2)²)` where `r` is the rank — see
//!   [`positive_kernel_solution`] and [`bound_s`].
//!
//! Everything is exact: rationals via `num_rational`, integers via `num_bigint`, no floating
//! point anywhere. Feasibility of linear systems is decided by Fourier–Motzkin elimination —
//! deliberately simple, since the systems arriving here have only a handful of variables — and
//! budget-guarded rather than clever: a blow-up aborts with a budget error instead of looping.

use num_bigint::BigInt;
use num_integer::Integer;
use num_rational::BigRational;
use num_traits::{One, Signed, Zero};

use crate::error::{CoreError, Result};
use crate::game::Weight;
use crate::geometry::{enumerate_m_open_halfspaces, OpenHalfSpace, Subspace, DEFAULT_GEOMETRY_BUDGET};

/// Exact rational scalar.
pub type Rat = BigRational;

pub(crate) fn rat_from_int(x: &BigInt) -> Rat {
    Rat::from_integer(x.clone())
}

/// Exact dot product of integer vectors.
pub(crate) fn dot(a: &[BigInt], b: &[BigInt]) -> BigInt {
    debug_assert_eq!(a.len(), b.len());
    a.iter().zip(b).map(|(x, y)| x * y).sum()
}

/// Reduced row echelon form over the rationals.
///
/// Returns the nonzero rows (pivot entries 1, pivot columns clean) and the pivot column of each
/// row, in increasing order. Deterministic: the pivot is always the first usable row.
pub(crate) fn rref(mut rows: Vec<Vec<Rat>>) -> (Vec<Vec<Rat>>, Vec<usize>) {
    let ncols = rows.first().map_or(0, |r| r.len());
    let mut pivots = Vec::new();
    let mut r = 0;
    for c in 0..ncols {
        if r == rows.len() {
            break;
        }
        let Some(p) = (r..rows.len()).find(|&i| !rows[i][c].is_zero()) else {
            continue;
        };
        rows.swap(r, p);
        let inv = rows[r][c].clone();
        for x in rows[r].iter_mut() {
            *x = &*x / &inv;
        }
        for i in 0..rows.len() {
            if i != r && !rows[i][c].is_zero() {
                let f = rows[i][c].clone();
                for j in 0..ncols {
                    let t = &rows[r][j] * &f;
                    rows[i][j] = &rows[i][j] - &t;
                }
            }
        }
        pivots.push(c);
        r += 1;
    }
    rows.truncate(r);
    (rows, pivots)
}

/// Scale a rational row to the unique primitive integer row with the same span direction: clear
/// denominators, divide by the gcd. The sign pattern of the input is preserved.
pub(crate) fn primitive_integer_row(row: &[Rat]) -> Vec<BigInt> {
    let mut l = BigInt::one();
    for x in row {
        l = l.lcm(x.denom());
    }
    let ints: Vec<BigInt> = row.iter().map(|x| x.numer() * (&l / x.denom())).collect();
    primitive_integer(&ints)
}

/// Divide an integer vector by the gcd of its entries (zero vectors pass through).
pub(crate) fn primitive_integer(v: &[BigInt]) -> Vec<BigInt> {
    let mut g = BigInt::zero();
    for x in v {
        g = g.gcd(x);
    }
    if g.is_zero() {
        return v.to_vec();
    }
    v.iter().map(|x| x / &g).collect()
}

/// Basis of the null space `{x : rows · x = 0}` via the standard free-variable construction on
/// the reduced echelon form. Rational output; callers scale to primitive integers as needed.
pub(crate) fn kernel_basis(rows: &[Vec<Rat>], ncols: usize) -> Vec<Vec<Rat>> {
    let (rr, pivots) = rref(rows.to_vec());
    let mut basis = Vec::new();
    for f in 0..ncols {
        if pivots.contains(&f) {
            continue;
        }
        let mut v = vec![Rat::zero(); ncols];
        v[f] = Rat::one();
        for (r, &p) in pivots.iter().enumerate() {
            v[p] = -rr[r][f].clone();
        }
        basis.push(v);
    }
    basis
}

/// A conjunction of linear inequalities `coeffs · y ≥ rhs` over `nvars` rational unknowns.
pub(crate) struct LinearSystem {
    pub nvars: usize,
    pub ineqs: Vec<(Vec<Rat>, Rat)>,
}

/// Default cap on the number of inequalities any one elimination stage may produce.
pub(crate) const FM_BUDGET: usize = 200_000;

/// Decide feasibility by Fourier–Motzkin elimination and, if feasible, return a concrete
/// solution, preferring small integer values (smallest integer in the final interval, midpoint
/// when no integer fits).
///
/// Exceeding `budget` inequalities in any stage is a budget error; an internal inconsistency
/// between the projection and back-substitution is a falsification error (it cannot happen if
/// the elimination is correct).
pub(crate) fn feasible_point(sys: &LinearSystem, budget: usize) -> Result<Option<Vec<Rat>>> {
    // Stage i holds the system over variables 0..=i before variable i was eliminated.
    let mut stages: Vec<Vec<(Vec<Rat>, Rat)>> = Vec::new();
    let mut cur = sys.ineqs.clone();
    for (c, _) in &cur {
        debug_assert_eq!(c.len(), sys.nvars);
    }
    for v in (1..sys.nvars).rev() {
        match eliminate(&cur, v, budget)? {
            None => return Ok(None),
            Some(next) => {
                stages.push(cur);
                cur = next;
            }
        }
    }

    let mut point: Vec<Rat> = Vec::new();
    if sys.nvars == 0 {
        // Only constant constraints `0 ≥ rhs`.
        for (_, b) in &cur {
            if b.is_positive() {
                return Ok(None);
            }
        }
        return Ok(Some(point));
    }

    // Base case: one variable left.
    match bounds_for(&cur, 0, &point)? {
        None => return Ok(None),
        Some(value) => point.push(value),
    }
    // Back-substitute, restoring variables 1, 2, … from the stages in reverse push order
    // (the stage pushed last is the one over variables 0..=1).
    for (j, stage) in stages.iter().rev().enumerate() {
        let v = j + 1;
        match bounds_for(stage, v, &point)? {
            None => {
                return Err(CoreError::Falsification(
                    "feasible projection has an infeasible back-substitution".into(),
                ))
            }
            Some(value) => point.push(value),
        }
    }
    Ok(Some(point))
}

/// Eliminate variable `v` (the highest index present). Returns `None` on a detected
/// contradiction, otherwise the reduced system over variables `0..v`.
fn eliminate(
    ineqs: &[(Vec<Rat>, Rat)],
    v: usize,
    budget: usize,
) -> Result<Option<Vec<(Vec<Rat>, Rat)>>> {
    let mut out: Vec<(Vec<Rat>, Rat)> = Vec::new();
    let mut lowers: Vec<&(Vec<Rat>, Rat)> = Vec::new();
    let mut uppers: Vec<&(Vec<Rat>, Rat)> = Vec::new();
    for ineq in ineqs {
        let cv = &ineq.0[v];
        if cv.is_zero() {
            let mut c = ineq.0.clone();
            c.truncate(v);
            if c.iter().all(|x| x.is_zero()) {
                if ineq.1.is_positive() {
                    return Ok(None);
                }
            } else {
                out.push((c, ineq.1.clone()));
            }
        } else if cv.is_positive() {
            lowers.push(ineq);
        } else {
            uppers.push(ineq);
        }
    }
    for (cl, bl) in &lowers {
        for (cu, bu) in &uppers {
            // Positive multipliers a = -cu[v], m = cl[v] cancel the eliminated variable.
            let a = -&cu[v];
            let m = &cl[v];
            let mut c: Vec<Rat> = Vec::with_capacity(v);
            for j in 0..v {
                c.push(&cl[j] * &a + &cu[j] * m);
            }
            let b = &(bl * &a) + &(bu * m);
            if c.iter().all(|x| x.is_zero()) {
                if b.is_positive() {
                    return Ok(None);
                }
            } else {
                out.push((c, b));
                if out.len() > budget {
                    return Err(CoreError::Budget(format!(
                        "Fourier-Motzkin elimination produced more than {budget} inequalities"
                    )));
                }
            }
        }
    }
    Ok(Some(out))
}

/// Given a system over variables `0..=v` and chosen values for `0..v`, compute the interval for
/// variable `v` and pick a value in it (smallest integer when one fits, midpoint otherwise).
/// `None` means the interval is empty.
fn bounds_for(ineqs: &[(Vec<Rat>, Rat)], v: usize, chosen: &[Rat]) -> Result<Option<Rat>> {
    let mut lo: Option<Rat> = None;
    let mut hi: Option<Rat> = None;
    for (c, b) in ineqs {
        let mut rest = b.clone();
        for j in 0..v {
            rest -= &c[j] * &chosen[j];
        }
        let cv = &c[v];
        if cv.is_zero() {
            if rest.is_positive() {
                // A constraint not involving this variable fails under the chosen prefix: the
                // interval is empty. (Reachable only at the base stage; carried constraints are
                // re-checked there because systems with a single variable are never projected.)
                return Ok(None);
            }
        } else if cv.is_positive() {
            let bound = rest / cv.clone();
            if lo.as_ref().is_none_or(|l| bound > *l) {
                lo = Some(bound);
            }
        } else {
            let bound = rest / cv.clone();
            if hi.as_ref().is_none_or(|h| bound < *h) {
                hi = Some(bound);
            }
        }
    }
    Ok(pick_in_interval(lo, hi))
}

fn pick_in_interval(lo: Option<Rat>, hi: Option<Rat>) -> Option<Rat> {
    match (lo, hi) {
        (None, None) => Some(Rat::zero()),
        (Some(l), None) => Some(l.ceil()),
        (None, Some(h)) => Some(h.floor()),
        (Some(l), Some(h)) => {
            if l > h {
                None
            } else {
                let c = l.ceil();
                if c <= h {
                    Some(c)
                } else {
                    Some((l + h) / Rat::from_integer(BigInt::from(2)))
                }
            }
        }
    }
}

/// The small-solutions bound `(2(M+1))^((r+2)²)`: when a positive kernel solution exists for a
/// rank-`r` system of columns with entries in `[-M, M]`, one exists with entries at most this.
pub fn bound_s(m: &BigInt, r: usize) -> Result<BigInt> {
    if !m.is_positive() {
        return Err(CoreError::InvalidInput(format!("bound base must be positive, got M={m}")));
    }
    let base = BigInt::from(2) * (m + 1u8);
    let exp = (r as u32 + 2).pow(2);
    Ok(num_traits::pow::pow(base, exp as usize))
}

/// A finite set of distinct integer column vectors with entries in `[-M, M]`, together with the
/// subspace they span. The inputs to [`alternatives`] and [`positive_kernel_solution`].
#[derive(Debug, Clone)]
pub struct ColumnSystem {
    columns: Vec<Weight>,
    m: BigInt,
    ambient: Subspace,
}

impl ColumnSystem {
    /// Build a system from distinct columns; `m` must bound every entry in absolute value.
    pub fn new(columns: Vec<Weight>, m: BigInt) -> Result<ColumnSystem> {
        if columns.is_empty() {
            return Err(CoreError::InvalidInput("column system must be non-empty".into()));
        }
        if !m.is_positive() {
            return Err(CoreError::InvalidInput(format!("column bound must be positive, got {m}")));
        }
        let d = columns[0].dim();
        for c in &columns {
            if c.dim() != d {
                return Err(CoreError::InvalidInput("columns must share one dimension".into()));
            }
            if c.norm() > m {
                return Err(CoreError::InvalidInput(format!(
                    "column {c} exceeds the declared bound {m}"
                )));
            }
        }
        let mut sorted = columns.clone();
        sorted.sort();
        if sorted.windows(2).any(|w| w[0] == w[1]) {
            return Err(CoreError::InvalidInput("columns must be distinct".into()));
        }
        let ambient = Subspace::span(d, &columns);
        Ok(ColumnSystem { columns, m, ambient })
    }

    pub fn columns(&self) -> &[Weight] {
        &self.columns
    }

    pub fn m(&self) -> &BigInt {
        &self.m
    }

    /// The span of the columns (always M-generated: the columns themselves generate it).
    pub fn ambient(&self) -> &Subspace {
        &self.ambient
    }

    /// Rank of the column family.
    pub fn rank(&self) -> usize {
        self.ambient.dim()
    }
}

/// The two mutually exclusive outcomes of [`alternatives`].
#[derive(Debug, Clone)]
pub enum Alternative {
    /// Positive integers `x` with `Σ x(i)·column(i) = 0`.
    PositiveCombination(Vec<BigInt>),
    /// An M-generated open half-space of the span whose *closure* contains every column.
    ClosedHalfSpace(OpenHalfSpace),
}

/// Find positive integers `x ≥ 1` with `Σ x(i)·column(i) = 0`, or report that none exist.
///
/// Method: parameterize the kernel of the column matrix by exact Gaussian elimination, impose
/// `x ≥ 1` on pivots and free variables alike, and decide the resulting system by
/// Fourier–Motzkin. A found rational solution is scaled to integers (lcm of denominators, then
/// gcd reduction) and checked against the small-solutions bound; a bounded brute-force fallback
/// runs if the constructed witness is too large, and failing that the bound's violation is
/// reported as a falsification.
pub fn positive_kernel_solution(s: &ColumnSystem) -> Result<Option<Vec<BigInt>>> {
    let n = s.columns.len();
    let d = s.columns[0].dim();
    // Rows are coordinates, columns are the input vectors.
    let a: Vec<Vec<Rat>> =
        (0..d).map(|i| s.columns.iter().map(|c| rat_from_int(&c.0[i])).collect()).collect();
    let (rr, pivots) = rref(a);
    let free: Vec<usize> = (0..n).filter(|j| !pivots.contains(j)).collect();
    if free.is_empty() {
        // Trivial kernel: only x = 0, which is not positive.
        return Ok(None);
    }

    // Unknowns are the free variables y; x_f = y_f and x_p = -Σ_f rr[p_row][f]·y_f.
    let mut ineqs: Vec<(Vec<Rat>, Rat)> = Vec::new();
    for (fi, _) in free.iter().enumerate() {
        let mut c = vec![Rat::zero(); free.len()];
        c[fi] = Rat::one();
        ineqs.push((c, Rat::one()));
    }
    for (r, _) in pivots.iter().enumerate() {
        let c: Vec<Rat> = free.iter().map(|&f| -rr[r][f].clone()).collect();
        ineqs.push((c, Rat::one()));
    }
    let sys = LinearSystem { nvars: free.len(), ineqs };
    let Some(y) = feasible_point(&sys, FM_BUDGET)? else {
        return Ok(None);
    };

    // Assemble the full rational solution.
    let mut x = vec![Rat::zero(); n];
    for (fi, &f) in free.iter().enumerate() {
        x[f] = y[fi].clone();
    }
    for (r, &p) in pivots.iter().enumerate() {
        let mut v = Rat::zero();
        for (fi, &f) in free.iter().enumerate() {
            v -= &rr[r][f] * &y[fi];
        }
        x[p] = v;
    }
    // Scale to integers and reduce.
    let mut l = BigInt::one();
    for xi in &x {
        l = l.lcm(xi.denom());
    }
    let ints: Vec<BigInt> = x.iter().map(|xi| xi.numer() * (&l / xi.denom())).collect();
    let witness = primitive_integer(&ints);
    check_positive_combination(s, &witness)?;

    let bound = bound_s(&s.m, self_rank(s))?;
    if witness.iter().all(|v| v <= &bound) {
        return Ok(Some(witness));
    }
    // The bound promises a small witness exists; look for one directly before crying foul.
    if let Some(small) = brute_force_kernel(s, &bound) {
        return Ok(Some(small));
    }
    Err(CoreError::Falsification(format!(
        "positive kernel witness exceeds the small-solutions bound {bound} and no small witness was found"
    )))
}

fn self_rank(s: &ColumnSystem) -> usize {
    s.rank()
}

/// Recheck a claimed positive combination exactly: all entries ≥ 1 and `Σ x(i)·column(i) = 0`.
fn check_positive_combination(s: &ColumnSystem, x: &[BigInt]) -> Result<()> {
    if x.len() != s.columns.len() || x.iter().any(|v| v < &BigInt::one()) {
        return Err(CoreError::Falsification(
            "kernel witness is not a positive integer vector".into(),
        ));
    }
    let d = s.columns[0].dim();
    for i in 0..d {
        let sum: BigInt = s.columns.iter().zip(x).map(|(c, xi)| &c.0[i] * xi).sum();
        if !sum.is_zero() {
            return Err(CoreError::Falsification(format!(
                "kernel witness misses zero on coordinate {i} (sum {sum})"
            )));
        }
    }
    Ok(())
}

/// Bounded brute-force search for a positive combination: boxes `[1..k]^n` with doubling `k`,
/// capped both by the theoretical bound and by a fixed number of candidates.
fn brute_force_kernel(s: &ColumnSystem, bound: &BigInt) -> Option<Vec<BigInt>> {
    const CANDIDATE_CAP: u64 = 2_000_000;
    let n = s.columns.len();
    let mut k: u64 = 2;
    loop {
        if BigInt::from(k) > *bound || (k.checked_pow(n as u32)).is_none_or(|c| c > CANDIDATE_CAP)
        {
            return None;
        }
        let mut x = vec![1u64; n];
        loop {
            let xi: Vec<BigInt> = x.iter().map(|&v| BigInt::from(v)).collect();
            if check_positive_combination(s, &xi).is_ok() {
                return Some(xi);
            }
            // Odometer increment over [1..k]^n.
            let mut i = 0;
            loop {
                if i == n {
                    break;
                }
                if x[i] < k {
                    x[i] += 1;
                    break;
                }
                x[i] = 1;
                i += 1;
            }
            if i == n {
                break;
            }
        }
        k *= 2;
    }
}

/// Scan the M-generated open half-spaces of the span for one whose closure contains every
/// column; returns the first in the canonical order, or `None`.
pub fn containing_closed_halfspace(s: &ColumnSystem) -> Result<Option<OpenHalfSpace>> {
    if s.ambient.dim() == 0 {
        return Ok(None);
    }
    for h in enumerate_m_open_halfspaces(&s.m, &s.ambient, DEFAULT_GEOMETRY_BUDGET)? {
        if s.columns.iter().all(|c| h.closure_contains(c)) {
            return Ok(Some(h));
        }
    }
    Ok(None)
}

/// The alternatives dichotomy: a positive combination of the columns equal to zero, or an
/// M-generated closed half-space of the span containing all of them.
///
/// Both can exist simultaneously (witnesses on a boundary); the positive combination takes
/// precedence because cancellation consumes it. Finding neither falsifies the underlying lemma
/// (or reveals a bug) and is reported as such.
pub fn alternatives(s: &ColumnSystem) -> Result<Alternative> {
    if let Some(x) = positive_kernel_solution(s)? {
        return Ok(Alternative::PositiveCombination(x));
    }
    if let Some(h) = containing_closed_halfspace(s)? {
        return Ok(Alternative::ClosedHalfSpace(h));
    }
    Err(CoreError::Falsification(
        "column system admits neither a positive combination nor a containing closed half-space"
            .into(),
    ))
}

#[cfg(test)]
mod tests {
    use super::*;

    fn rat(x: i64) -> Rat {
        Rat::from_integer(BigInt::from(x))
    }

    fn system(columns: &[&[i64]]) -> ColumnSystem {
        let ws: Vec<Weight> = columns.iter().map(|c| Weight::from_i64(c)).collect();
        let m = ws.iter().map(|w| w.norm()).max().unwrap();
        ColumnSystem::new(ws, m).unwrap()
    }

    #[test]
    fn rref_is_canonical() {
        let rows = vec![
            vec![rat(2), rat(4), rat(-2)],
            vec![rat(1), rat(2), rat(0)],
            vec![rat(3), rat(6), rat(-2)],
        ];
        let (rr, pivots) = rref(rows);
        assert_eq!(pivots, vec![0, 2]);
        assert_eq!(rr, vec![vec![rat(1), rat(2), rat(0)], vec![rat(0), rat(0), rat(1)]]);
        // Scrambled row order reaches the same form.
        let rows = vec![
            vec![rat(3), rat(6), rat(-2)],
            vec![rat(2), rat(4), rat(-2)],
            vec![rat(1), rat(2), rat(0)],
        ];
        let (rr2, _) = rref(rows);
        assert_eq!(rr, rr2);
    }

    #[test]
    fn kernel_basis_spans_the_null_space() {
        // x + 2y = 0 over 3 variables: kernel is 2-dimensional.
        let rows = vec![vec![rat(1), rat(2), rat(0)]];
        let basis = kernel_basis(&rows, 3);
        assert_eq!(basis.len(), 2);
        for v in &basis {
            assert!((&v[0] + &(&v[1] * &rat(2))).is_zero());
        }
    }

    #[test]
    fn primitive_rows_reduce_and_keep_sign() {
        let row = vec![Rat::new(BigInt::from(2), BigInt::from(3)), rat(-2)];
        assert_eq!(primitive_integer_row(&row), vec![BigInt::from(1), BigInt::from(-3)]);
        assert_eq!(
            primitive_integer(&[BigInt::from(-4), BigInt::from(6)]),
            vec![BigInt::from(-2), BigInt::from(3)]
        );
    }

    #[test]
    fn feasibility_basics() {
        // 1 ≤ y ≤ 3 → smallest integer 1.
        let sys = LinearSystem {
            nvars: 1,
            ineqs: vec![(vec![rat(1)], rat(1)), (vec![rat(-1)], rat(-3))],
        };
        assert_eq!(feasible_point(&sys, FM_BUDGET).unwrap(), Some(vec![rat(1)]));
        // Empty interval.
        let sys = LinearSystem {
            nvars: 1,
            ineqs: vec![(vec![rat(1)], rat(4)), (vec![rat(-1)], rat(-3))],
        };
        assert_eq!(feasible_point(&sys, FM_BUDGET).unwrap(), None);
        // Two variables: y0 ≥ 1, y1 ≥ 1, y0 + y1 ≤ 2 forces (1,1).
        let sys = LinearSystem {
            nvars: 2,
            ineqs: vec![
                (vec![rat(1), rat(0)], rat(1)),
                (vec![rat(0), rat(1)], rat(1)),
                (vec![rat(-1), rat(-1)], rat(-2)),
            ],
        };
        assert_eq!(feasible_point(&sys, FM_BUDGET).unwrap(), Some(vec![rat(1), rat(1)]));
        // Midpoint fallback: 1/2 ≤ y ≤ 3/4 has no integer.
        let sys = LinearSystem {
            nvars: 1,
            ineqs: vec![
                (vec![rat(2)], rat(1)),
                (vec![rat(-4)], rat(-3)),
            ],
        };
        assert_eq!(feasible_point(&sys, FM_BUDGET).unwrap(), Some(vec![Rat::new(BigInt::from(5), BigInt::from(8))]));
    }

    #[test]
    fn positive_kernel_on_opposite_vectors() {
        let s = system(&[&[1, -1], &[-1, 1]]);
        assert_eq!(
            positive_kernel_solution(&s).unwrap(),
            Some(vec![BigInt::from(1), BigInt::from(1)])
        );
    }

    #[test]
    fn positive_kernel_rejects_forced_zero() {
        // The third coefficient is forced to 0 by the two equations.
        let s = system(&[&[1, -1], &[-1, 1], &[-1, -1]]);
        assert_eq!(positive_kernel_solution(&s).unwrap(), None);
    }

    #[test]
    fn positive_kernel_on_three_cycle_weights() {
        let s = system(&[&[2, -1], &[-1, 3], &[-2, 2]]);
        assert_eq!(positive_kernel_solution(&s).unwrap(), None);
        // Independent check: no small positive integer combination hits zero.
        for a in 1i64..=12 {
            for b in 1i64..=12 {
                for c in 1i64..=12 {
                    let x = 2 * a - b - 2 * c;
                    let y = -a + 3 * b + 2 * c;
                    assert!(x != 0 || y != 0, "unexpected solution ({a},{b},{c})");
                }
            }
        }
    }

    #[test]
    fn witnesses_recheck_and_respect_the_bound() {
        for cols in [
            vec![vec![1, -1], vec![-1, 1]],
            vec![vec![2, -2], vec![-1, 1]],
            vec![vec![1, 0], vec![-1, 1], vec![0, -1]],
            vec![vec![1, 1], vec![-1, 0], vec![0, -1]],
        ] {
            let refs: Vec<&[i64]> = cols.iter().map(|c| c.as_slice()).collect();
            let s = system(&refs);
            let x = positive_kernel_solution(&s).unwrap().expect("solvable by construction");
            check_positive_combination(&s, &x).unwrap();
            let bound = bound_s(s.m(), s.rank()).unwrap();
            assert!(x.iter().all(|v| v <= &bound));
        }
    }

    #[test]
    fn bound_s_values() {
        assert_eq!(bound_s(&BigInt::from(1), 1).unwrap(), BigInt::from(262144)); // 4^9
        assert!(bound_s(&BigInt::from(0), 1).is_err());
        assert!(bound_s(&BigInt::from(1), 1).unwrap() < bound_s(&BigInt::from(2), 1).unwrap());
        assert!(bound_s(&BigInt::from(1), 1).unwrap() < bound_s(&BigInt::from(1), 2).unwrap());
    }

    #[test]
    fn column_system_validation() {
        assert!(ColumnSystem::new(vec![], BigInt::from(1)).is_err());
        assert!(ColumnSystem::new(
            vec![Weight::from_i64(&[1, 0]), Weight::from_i64(&[1, 0])],
            BigInt::from(1)
        )
        .is_err());
        assert!(ColumnSystem::new(vec![Weight::from_i64(&[2, 0])], BigInt::from(1)).is_err());
        assert!(ColumnSystem::new(vec![Weight::from_i64(&[1, 0])], BigInt::from(0)).is_err());
    }

    #[test]
    fn alternatives_prefers_the_combination() {
        let s = system(&[&[1, -1], &[-1, 1]]);
        match alternatives(&s).unwrap() {
            Alternative::PositiveCombination(x) => {
                assert_eq!(x, vec![BigInt::from(1), BigInt::from(1)])
            }
            other => panic!("expected positive combination, got {other:?}"),
        }
    }

    #[test]
    fn alternatives_finds_the_half_space() {
        // No positive combination; all three sit in {x + y ≤ 0}.
        let s = system(&[&[1, -1], &[-1, 1], &[-1, -1]]);
        match alternatives(&s).unwrap() {
            Alternative::ClosedHalfSpace(h) => {
                for c in s.columns() {
                    assert!(h.closure_contains(c));
                }
                assert_eq!(h.normal(), &Weight::from_i64(&[1, 1]));
            }
            other => panic!("expected closed half-space, got {other:?}"),
        }
    }

    #[test]
    fn alternatives_on_a_single_column() {
        let s = system(&[&[1, 0]]);
        match alternatives(&s).unwrap() {
            Alternative::ClosedHalfSpace(h) => {
                assert_eq!(h.normal(), &Weight::from_i64(&[-1, 0]));
                assert!(h.closure_contains(&Weight::from_i64(&[1, 0])));
            }
            other => panic!("expected closed half-space, got {other:?}"),
        }
    }

    /// When the combination branch fires even though the columns also fit a closed half-space,
    /// every column must lie on that half-space's boundary (otherwise the combination could not
    /// vanish). This is the mutual-exclusion cross-check.
    #[test]
    fn branches_are_consistent_when_both_apply() {
        let s = system(&[&[1, -1], &[-1, 1]]);
        let x = positive_kernel_solution(&s).unwrap().expect("combination exists");
        check_positive_combination(&s, &x).unwrap();
        if let Some(h) = containing_closed_halfspace(&s).unwrap() {
            for c in s.columns() {
                assert!(h.boundary_contains(c), "column {c} must sit on the boundary");
            }
        }
    }
}
