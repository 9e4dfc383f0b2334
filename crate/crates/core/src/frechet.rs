//! Discrete and continuous Fréchet distance.
//!
//! The discrete distance is the classic dynamic program over the grid of
//! sample pairs; it also yields an optimal coupling, which drives morphing.
//! The continuous distance is decided with the free-space diagram and found
//! by bisection between an endpoint lower bound and the discrete distance.

use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::curve::Point;

#[derive(Debug, Error, Clone, Copy, PartialEq, Eq)]
pub enum FrechetError {
    #[error("curves must contain at least one point")]
    EmptyCurve,
}

impl FrechetError {
    pub fn code(&self) -> &'static str {
        "EmptyCurve"
    }
}

/// Monotone pairing of sample indices, from `(0, 0)` to `(m - 1, n - 1)`.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct Coupling(pub Vec<(usize, usize)>);

impl Coupling {
    pub fn pairs(&self) -> &[(usize, usize)] {
        &self.0
    }

    pub fn len(&self) -> usize {
        self.0.len()
    }

    pub fn is_empty(&self) -> bool {
        self.0.is_empty()
    }

    /// Checks the start/end pairs and that every step advances `i`, `j` or both by one.
    pub fn is_valid(&self, m: usize, n: usize) -> bool {
        let pairs = &self.0;
        !pairs.is_empty()
            && pairs[0] == (0, 0)
            && pairs[pairs.len() - 1] == (m - 1, n - 1)
            && pairs.windows(2).all(|w| {
                let di = w[1].0 as isize - w[0].0 as isize;
                let dj = w[1].1 as isize - w[0].1 as isize;
                matches!((di, dj), (1, 0) | (0, 1) | (1, 1))
            })
    }

    /// Largest point distance over the coupled pairs.
    pub fn bottleneck(&self, a: &[Point], b: &[Point]) -> f64 {
        self.0
            .iter()
            .map(|&(i, j)| a[i].distance_sq(&b[j]))
            .fold(0.0, f64::max)
            .sqrt()
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct FrechetResult {
    pub distance: f64,
    pub coupling: Coupling,
}

/// Discrete Fréchet distance with one optimal coupling.
///
/// Among optimal predecessors the backtrack prefers the diagonal step, then
/// the step that advanced `i`, then the one that advanced `j`.
pub fn discrete_frechet(a: &[Point], b: &[Point]) -> Result<FrechetResult, FrechetError> {
    if a.is_empty() || b.is_empty() {
        return Err(FrechetError::EmptyCurve);
    }
    let (m, n) = (a.len(), b.len());
    // squared distances throughout; sqrt is monotone so the optimum is unchanged
    let mut d = vec![0.0f64; m * n];
    for i in 0..m {
        for j in 0..n {
            let here = a[i].distance_sq(&b[j]);
            let reach = match (i, j) {
                (0, 0) => here,
                (0, _) => d[j - 1],
                (_, 0) => d[(i - 1) * n],
                _ => d[(i - 1) * n + j - 1]
                    .min(d[(i - 1) * n + j])
                    .min(d[i * n + j - 1]),
            };
            d[i * n + j] = here.max(reach);
        }
    }

    let mut pairs = vec![(m - 1, n - 1)];
    let (mut i, mut j) = (m - 1, n - 1);
    while (i, j) != (0, 0) {
        (i, j) = if i == 0 {
            (0, j - 1)
        } else if j == 0 {
            (i - 1, 0)
        } else {
            let diag = d[(i - 1) * n + j - 1];
            let up = d[(i - 1) * n + j];
            let left = d[i * n + j - 1];
            let best = diag.min(up).min(left);
            if diag == best {
                (i - 1, j - 1)
            } else if up == best {
                (i - 1, j)
            } else {
                (i, j - 1)
            }
        };
        pairs.push((i, j));
    }
    pairs.reverse();

    Ok(FrechetResult {
        distance: d[m * n - 1].sqrt(),
        coupling: Coupling(pairs),
    })
}

/// Discrete Fréchet distance without the coupling, abandoning early.
///
/// Returns `None` as soon as every cell of a DP row exceeds `bound`, since
/// each monotone coupling passes through every row. When it returns a value
/// it is bit-identical to [`discrete_frechet`]'s distance.
pub fn discrete_frechet_bounded(a: &[Point], b: &[Point], bound: f64) -> Option<f64> {
    if a.is_empty() || b.is_empty() {
        return None;
    }
    let bound_sq = if bound.is_finite() { bound * bound } else { f64::INFINITY };
    let n = b.len();
    let mut prev = vec![0.0f64; n];
    let mut cur = vec![0.0f64; n];
    for (i, p) in a.iter().enumerate() {
        let mut row_min = f64::INFINITY;
        for j in 0..n {
            let here = p.distance_sq(&b[j]);
            let reach = match (i, j) {
                (0, 0) => here,
                (0, _) => cur[j - 1],
                (_, 0) => prev[0],
                _ => prev[j - 1].min(prev[j]).min(cur[j - 1]),
            };
            cur[j] = here.max(reach);
            row_min = row_min.min(cur[j]);
        }
        if row_min > bound_sq {
            return None;
        }
        std::mem::swap(&mut prev, &mut cur);
    }
    Some(prev[n - 1].sqrt())
}

/// Closed interval of `[0, 1]`; empty when `lo > hi`.
#[derive(Debug, Clone, Copy, PartialEq)]
struct Interval {
    lo: f64,
    hi: f64,
}

impl Interval {
    const EMPTY: Interval = Interval { lo: 1.0, hi: 0.0 };

    fn is_empty(&self) -> bool {
        self.lo > self.hi
    }

    fn contains(&self, t: f64) -> bool {
        !self.is_empty() && self.lo <= t && t <= self.hi
    }
}

/// Parameters `t` in `[0, 1]` with `|s0 + t (s1 - s0) - p| <= eps`.
fn free_interval(p: Point, s0: Point, s1: Point, eps: f64) -> Interval {
    let dx = s1.x - s0.x;
    let dy = s1.y - s0.y;
    let fx = s0.x - p.x;
    let fy = s0.y - p.y;
    let a = dx * dx + dy * dy;
    let c = fx * fx + fy * fy - eps * eps;
    if a == 0.0 {
        return if c <= 0.0 {
            Interval { lo: 0.0, hi: 1.0 }
        } else {
            Interval::EMPTY
        };
    }
    let b = fx * dx + fy * dy;
    let disc = b * b - a * c;
    if disc < 0.0 {
        return Interval::EMPTY;
    }
    let root = disc.sqrt();
    let lo = ((-b - root) / a).max(0.0);
    let hi = ((-b + root) / a).min(1.0);
    if lo > hi {
        Interval::EMPTY
    } else {
        Interval { lo, hi }
    }
}

/// Whether the continuous Fréchet distance between polylines `a` and `b` is at most `eps`.
///
/// Reachability is propagated cell by cell through the free-space diagram:
/// for each cell the reachable parts of its right and top edges follow from
/// the reachable parts of its left and bottom edges.
pub fn frechet_decision(a: &[Point], b: &[Point], eps: f64) -> bool {
    if a.is_empty() || b.is_empty() || eps < 0.0 || eps.is_nan() {
        return false;
    }
    let eps_sq = eps * eps;
    if a[0].distance_sq(&b[0]) > eps_sq || a[a.len() - 1].distance_sq(&b[b.len() - 1]) > eps_sq {
        return false;
    }
    // a single point against a polyline: the polyline must stay within eps
    if a.len() == 1 {
        return b.iter().all(|q| a[0].distance_sq(q) <= eps_sq);
    }
    if b.len() == 1 {
        return a.iter().all(|p| b[0].distance_sq(p) <= eps_sq);
    }

    let m = a.len() - 1;
    let n = b.len() - 1;

    // left[j]: reachable part of the vertical edge at the current a-vertex,
    // over b-segment j. Starts as the left boundary of the diagram.
    let mut left = vec![Interval::EMPTY; n];
    let mut open = true;
    for j in 0..n {
        let free = free_interval(a[0], b[j], b[j + 1], eps);
        left[j] = if open && free.contains(0.0) { free } else { Interval::EMPTY };
        open = left[j].contains(1.0);
    }

    // bottom: reachable part of the horizontal edge at b-vertex 0 over a-segment i
    let mut bottom_edge = vec![Interval::EMPTY; m];
    let mut open = true;
    for i in 0..m {
        let free = free_interval(b[0], a[i], a[i + 1], eps);
        bottom_edge[i] = if open && free.contains(0.0) { free } else { Interval::EMPTY };
        open = bottom_edge[i].contains(1.0);
    }

    for i in 0..m {
        // walk up the column of cells over a-segment i
        let mut bottom = bottom_edge[i];
        let mut next_left = vec![Interval::EMPTY; n];
        for j in 0..n {
            let l = left[j];
            let right_free = free_interval(a[i + 1], b[j], b[j + 1], eps);
            let top_free = free_interval(b[j + 1], a[i], a[i + 1], eps);

            next_left[j] = if !bottom.is_empty() {
                right_free
            } else if !l.is_empty() {
                Interval {
                    lo: right_free.lo.max(l.lo),
                    hi: right_free.hi,
                }
            } else {
                Interval::EMPTY
            };
            bottom = if !l.is_empty() {
                top_free
            } else if !bottom.is_empty() {
                Interval {
                    lo: top_free.lo.max(bottom.lo),
                    hi: top_free.hi,
                }
            } else {
                Interval::EMPTY
            };
        }
        left = next_left;
    }
    left[n - 1].contains(1.0)
}

/// Lower bound shared by every Fréchet variant: the endpoints must be matched.
pub fn endpoint_bound(a: &[Point], b: &[Point]) -> f64 {
    a[0].distance(&b[0]).max(a[a.len() - 1].distance(&b[b.len() - 1]))
}

/// Continuous Fréchet distance to within `tol`, by bisection on [`frechet_decision`].
///
/// The bracket starts at the endpoint bound and the discrete distance; the
/// midpoint is returned once the bracket is at most `tol` wide.
pub fn continuous_frechet(a: &[Point], b: &[Point], tol: f64) -> Result<f64, FrechetError> {
    let upper = discrete_frechet_bounded(a, b, f64::INFINITY).ok_or(FrechetError::EmptyCurve)?;
    let mut lo = endpoint_bound(a, b);
    let mut hi = upper;
    let tol = if tol > 0.0 { tol } else { f64::EPSILON };
    while hi - lo > tol {
        let mid = lo + (hi - lo) / 2.0;
        if frechet_decision(a, b, mid) {
            hi = mid;
        } else {
            lo = mid;
        }
    }
    Ok(lo + (hi - lo) / 2.0)
}
