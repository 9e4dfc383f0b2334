//! Planar subdivision induced by a closed chain.
//!
//! All vertices and intersection points are snapped to a fixed grid of
//! 2^-20 canvas units and every predicate is evaluated exactly on the integer
//! grid coordinates. Segments are split at their intersection points until no
//! two pieces meet except at shared endpoints; the resulting planar graph is
//! stored as a half-edge structure whose `next` cycles are the faces.

use std::cmp::Ordering;
use std::collections::HashMap;

use thiserror::Error;

use crate::curve::{ClosedChain, Point};

/// log2 of the grid resolution.
pub const GRID_BITS: i32 = 20;
/// Grid spacing in canvas units.
pub const GRID: f64 = 1.0 / (1u64 << GRID_BITS) as f64;
/// Above this many segments intersection search switches from all-pairs to a sweep.
pub const SWEEP_THRESHOLD: usize = 512;

const GRID_SCALE: f64 = (1u64 << GRID_BITS) as f64;
const MAX_GRID_COORD: f64 = (1u64 << 40) as f64;
const MAX_SPLIT_ROUNDS: usize = 64;
/// Attempts at moving vertices off a rounding-induced overlap.
const PERTURB_ROUNDS: usize = 4;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum ArrangementError {
    #[error("segments {first} and {second} overlap collinearly")]
    DegenerateOverlap { first: usize, second: usize },
    #[error("coordinate {0} is too large for the snapping grid")]
    CoordinateRange(f64),
    #[error("intersection splitting did not converge")]
    NoConvergence,
}

impl ArrangementError {
    pub fn code(&self) -> &'static str {
        match self {
            ArrangementError::DegenerateOverlap { .. } => "DegenerateOverlap",
            ArrangementError::CoordinateRange(_) => "CoordinateRange",
            ArrangementError::NoConvergence => "NoConvergence",
        }
    }
}

/// Point on the snapping grid, in grid units.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct GridPoint {
    pub x: i64,
    pub y: i64,
}

impl GridPoint {
    pub fn snap(p: Point) -> Result<Self, ArrangementError> {
        let snap1 = |v: f64| {
            let s = (v * GRID_SCALE).round();
            if !s.is_finite() || s.abs() >= MAX_GRID_COORD {
                Err(ArrangementError::CoordinateRange(v))
            } else {
                Ok(s as i64)
            }
        };
        Ok(GridPoint {
            x: snap1(p.x)?,
            y: snap1(p.y)?,
        })
    }

    pub fn to_point(self) -> Point {
        Point::new(self.x as f64 / GRID_SCALE, self.y as f64 / GRID_SCALE)
    }
}

/// Rounds `p` onto the snapping grid.
pub fn snap_point(p: Point) -> Result<Point, ArrangementError> {
    GridPoint::snap(p).map(GridPoint::to_point)
}

#[inline]
fn cross(ax: i128, ay: i128, bx: i128, by: i128) -> i128 {
    ax * by - ay * bx
}

/// Twice the signed area of triangle `abc`; positive when counterclockwise.
#[inline]
pub fn orient(a: GridPoint, b: GridPoint, c: GridPoint) -> i128 {
    cross(
        (b.x - a.x) as i128,
        (b.y - a.y) as i128,
        (c.x - a.x) as i128,
        (c.y - a.y) as i128,
    )
}

/// `num / den` rounded to the nearest integer, ties away from zero.
fn div_round(num: i128, den: i128) -> i128 {
    let (num, den) = if den < 0 { (-num, -den) } else { (num, den) };
    let q = (2 * num.abs() + den) / (2 * den);
    if num < 0 {
        -q
    } else {
        q
    }
}

fn in_box(p: GridPoint, a: GridPoint, b: GridPoint) -> bool {
    p.x >= a.x.min(b.x) && p.x <= a.x.max(b.x) && p.y >= a.y.min(b.y) && p.y <= a.y.max(b.y)
}

/// How two grid segments meet.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub(crate) enum Contact {
    None,
    /// Single common point, rounded to the grid for proper crossings.
    At(GridPoint),
    /// Collinear with a common sub-segment of positive length.
    Overlap,
}

pub(crate) fn contact(s0: GridPoint, s1: GridPoint, t0: GridPoint, t1: GridPoint) -> Contact {
    let d1 = orient(t0, t1, s0).signum();
    let d2 = orient(t0, t1, s1).signum();
    let d3 = orient(s0, s1, t0).signum();
    let d4 = orient(s0, s1, t1).signum();

    if d1 == 0 && d2 == 0 {
        // collinear: compare extents along the dominant axis of s
        let along_x = (s1.x - s0.x).abs() >= (s1.y - s0.y).abs();
        let key = |p: GridPoint| if along_x { p.x } else { p.y };
        let (s_lo, s_hi) = (key(s0).min(key(s1)), key(s0).max(key(s1)));
        let (t_lo, t_hi) = (key(t0).min(key(t1)), key(t0).max(key(t1)));
        let lo = s_lo.max(t_lo);
        let hi = s_hi.min(t_hi);
        return match lo.cmp(&hi) {
            Ordering::Greater => Contact::None,
            Ordering::Less => Contact::Overlap,
            Ordering::Equal => {
                let p = [s0, s1, t0, t1]
                    .into_iter()
                    .find(|&p| key(p) == lo)
                    .expect("touch point is an endpoint");
                Contact::At(p)
            }
        };
    }

    if d1 * d2 < 0 && d3 * d4 < 0 {
        let sx = (s1.x - s0.x) as i128;
        let sy = (s1.y - s0.y) as i128;
        let tx = (t1.x - t0.x) as i128;
        let ty = (t1.y - t0.y) as i128;
        let den = cross(sx, sy, tx, ty);
        let num = cross((t0.x - s0.x) as i128, (t0.y - s0.y) as i128, tx, ty);
        let x = div_round(s0.x as i128 * den + sx * num, den);
        let y = div_round(s0.y as i128 * den + sy * num, den);
        return Contact::At(GridPoint {
            x: x as i64,
            y: y as i64,
        });
    }

    if d1 == 0 && in_box(s0, t0, t1) {
        return Contact::At(s0);
    }
    if d2 == 0 && in_box(s1, t0, t1) {
        return Contact::At(s1);
    }
    if d3 == 0 && in_box(t0, s0, s1) {
        return Contact::At(t0);
    }
    if d4 == 0 && in_box(t1, s0, s1) {
        return Contact::At(t1);
    }
    Contact::None
}

#[derive(Debug, Clone, Copy)]
struct Piece {
    a: GridPoint,
    b: GridPoint,
    /// Index of the chain segment this piece came from.
    source: usize,
}

impl Piece {
    fn bbox(&self) -> (i64, i64, i64, i64) {
        (
            self.a.x.min(self.b.x),
            self.a.x.max(self.b.x),
            self.a.y.min(self.b.y),
            self.a.y.max(self.b.y),
        )
    }
}

fn all_pairs(pieces: &[Piece]) -> Vec<(usize, usize)> {
    let boxes: Vec<_> = pieces.iter().map(Piece::bbox).collect();
    let mut out = Vec::new();
    for i in 0..pieces.len() {
        let bi = boxes[i];
        for (j, bj) in boxes.iter().enumerate().skip(i + 1) {
            if bi.0 <= bj.1 && bj.0 <= bi.1 && bi.2 <= bj.3 && bj.2 <= bi.3 {
                out.push((i, j));
            }
        }
    }
    out
}

/// Sweeps a vertical line left to right keeping the pieces whose x-extent
/// spans it; only pieces simultaneously active are tested.
fn sweep_pairs(pieces: &[Piece]) -> Vec<(usize, usize)> {
    let boxes: Vec<_> = pieces.iter().map(Piece::bbox).collect();
    let mut order: Vec<usize> = (0..pieces.len()).collect();
    order.sort_by_key(|&i| (boxes[i].0, i));
    let mut active: Vec<usize> = Vec::new();
    let mut out = Vec::new();
    for &i in &order {
        let bi = boxes[i];
        active.retain(|&j| boxes[j].1 >= bi.0);
        for &j in &active {
            let bj = boxes[j];
            if bi.2 <= bj.3 && bj.2 <= bi.3 {
                out.push((i.min(j), i.max(j)));
            }
        }
        active.push(i);
    }
    out.sort_unstable();
    out
}

fn candidate_pairs(pieces: &[Piece]) -> Vec<(usize, usize)> {
    if pieces.len() > SWEEP_THRESHOLD {
        sweep_pairs(pieces)
    } else {
        all_pairs(pieces)
    }
}

fn snap_points(chain: &ClosedChain) -> Result<Vec<GridPoint>, ArrangementError> {
    chain.points().iter().map(|&p| GridPoint::snap(p)).collect()
}

fn pieces_of(snapped: &[GridPoint]) -> Vec<Piece> {
    snapped
        .windows(2)
        .enumerate()
        .filter(|(_, w)| w[0] != w[1])
        .map(|(source, w)| Piece {
            a: w[0],
            b: w[1],
            source,
        })
        .collect()
}

fn snap_chain(chain: &ClosedChain) -> Result<Vec<Piece>, ArrangementError> {
    Ok(pieces_of(&snap_points(chain)?))
}

/// An intersection between two chain segments.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Intersection {
    /// Chain segment indices, `first < second`.
    pub first: usize,
    pub second: usize,
    /// Common point, snapped to the grid.
    pub point: Point,
}

/// Finds every point where two non-adjacent segments of the chain meet.
///
/// Segment indices refer to `chain.segments()`. Zero-length segments (after
/// snapping) are skipped, and segments separated only by skipped ones count
/// as adjacent.
pub fn find_intersections(chain: &ClosedChain) -> Result<Vec<Intersection>, ArrangementError> {
    let pieces = snap_chain(chain)?;
    let n = pieces.len();
    let mut out = Vec::new();
    for (i, j) in candidate_pairs(&pieces) {
        let (s, t) = (pieces[i], pieces[j]);
        match contact(s.a, s.b, t.a, t.b) {
            Contact::None => {}
            Contact::Overlap => {
                return Err(ArrangementError::DegenerateOverlap {
                    first: s.source,
                    second: t.source,
                })
            }
            Contact::At(p) => {
                let adjacent = j == i + 1 || (i == 0 && j == n - 1);
                if !adjacent {
                    out.push(Intersection {
                        first: s.source,
                        second: t.source,
                        point: p.to_point(),
                    });
                }
            }
        }
    }
    Ok(out)
}

/// Splits pieces at contact points until the only contacts left are shared endpoints.
fn planarize(mut pieces: Vec<Piece>) -> Result<Vec<Piece>, ArrangementError> {
    for _ in 0..MAX_SPLIT_ROUNDS {
        let mut splits: Vec<Vec<GridPoint>> = vec![Vec::new(); pieces.len()];
        let mut any = false;
        for (i, j) in candidate_pairs(&pieces) {
            let (s, t) = (pieces[i], pieces[j]);
            match contact(s.a, s.b, t.a, t.b) {
                Contact::None => {}
                Contact::Overlap => {
                    return Err(ArrangementError::DegenerateOverlap {
                        first: s.source.min(t.source),
                        second: s.source.max(t.source),
                    })
                }
                Contact::At(p) => {
                    if p != s.a && p != s.b {
                        splits[i].push(p);
                        any = true;
                    }
                    if p != t.a && p != t.b {
                        splits[j].push(p);
                        any = true;
                    }
                }
            }
        }
        if !any {
            return Ok(pieces);
        }

        let mut next = Vec::with_capacity(pieces.len() * 2);
        for (piece, mut cuts) in pieces.into_iter().zip(splits) {
            if cuts.is_empty() {
                next.push(piece);
                continue;
            }
            let dx = (piece.b.x - piece.a.x) as i128;
            let dy = (piece.b.y - piece.a.y) as i128;
            cuts.sort_by_key(|p| ((p.x - piece.a.x) as i128 * dx + (p.y - piece.a.y) as i128 * dy, *p));
            cuts.dedup();
            let mut from = piece.a;
            for p in cuts.into_iter().chain(std::iter::once(piece.b)) {
                if p != from {
                    next.push(Piece {
                        a: from,
                        b: p,
                        source: piece.source,
                    });
                    from = p;
                }
            }
        }
        // Cutting can make consecutive pieces double back onto each other.
        pieces = next;
    }
    Err(ArrangementError::NoConvergence)
}

#[derive(Debug, Clone, PartialEq)]
pub struct Vertex {
    pub id: usize,
    pub position: Point,
    pub grid: GridPoint,
}

#[derive(Debug, Clone, PartialEq)]
pub struct HalfEdge {
    pub id: usize,
    pub origin: usize,
    pub twin: usize,
    pub next: usize,
    pub face: usize,
    /// +1 when the half-edge runs along the chain's orientation, -1 against it.
    pub curve_dir: i8,
    /// Chain segment the edge lies on.
    pub source_segment: usize,
}

#[derive(Debug, Clone, PartialEq)]
pub struct Face {
    pub id: usize,
    /// A half-edge on the outer boundary cycle; `None` for the unbounded face.
    pub outer_boundary: Option<usize>,
    /// One half-edge per inner boundary cycle.
    pub holes: Vec<usize>,
    pub is_unbounded: bool,
}

#[derive(Debug, Clone, PartialEq)]
pub struct Arrangement {
    vertices: Vec<Vertex>,
    half_edges: Vec<HalfEdge>,
    faces: Vec<Face>,
    unbounded: usize,
    source: ClosedChain,
}

/// Counterclockwise angular order of direction vectors, starting at +x.
fn angle_cmp(a: (i64, i64), b: (i64, i64)) -> Ordering {
    let upper = |(x, y): (i64, i64)| y > 0 || (y == 0 && x > 0);
    match (upper(a), upper(b)) {
        (true, false) => Ordering::Less,
        (false, true) => Ordering::Greater,
        _ => 0.cmp(&cross(a.0 as i128, a.1 as i128, b.0 as i128, b.1 as i128)),
    }
}

/// Builds the arrangement of a closed chain.
/// Planarizes and rejects pieces that coincide after splitting.
fn planar_pieces(snapped: &[GridPoint]) -> Result<Vec<Piece>, ArrangementError> {
    let pieces = planarize(pieces_of(snapped))?;
    let mut owner: HashMap<(GridPoint, GridPoint), usize> = HashMap::new();
    for piece in &pieces {
        let key = (piece.a.min(piece.b), piece.a.max(piece.b));
        if let Some(&other) = owner.get(&key) {
            return Err(ArrangementError::DegenerateOverlap {
                first: other.min(piece.source),
                second: other.max(piece.source),
            });
        }
        owner.insert(key, piece.source);
    }
    Ok(pieces)
}

/// Whether two snapped chain segments overlap along a stretch of positive length.
fn segments_overlap(snapped: &[GridPoint], first: usize, second: usize) -> bool {
    let (s0, s1) = (snapped[first], snapped[first + 1]);
    let (t0, t1) = (snapped[second], snapped[second + 1]);
    s0 != s1 && t0 != t1 && contact(s0, s1, t0, t1) == Contact::Overlap
}

/// Planar pieces of the snapped chain.
///
/// A thin spike can collapse onto itself when an intersection is rounded onto
/// a nearby vertex, although the input segments never overlap. Such overlaps
/// are removed by nudging the vertices of the two segments a few grid units
/// in a fixed pattern and retrying. Overlaps already present between input
/// segments are retraced lines and are reported as they are.
fn perturbed_pieces(chain: &ClosedChain) -> Result<Vec<Piece>, ArrangementError> {
    const NUDGES: [(i64, i64); 8] = [(1, 0), (1, 1), (0, 1), (-1, 1), (-1, 0), (-1, -1), (0, -1), (1, -1)];
    let original = snap_points(chain)?;
    let mut snapped = original.clone();
    let mut round = 0;
    loop {
        match planar_pieces(&snapped) {
            Err(ArrangementError::DegenerateOverlap { first, second })
                if round < PERTURB_ROUNDS && !segments_overlap(&original, first, second) =>
            {
                round += 1;
                let last = snapped.len() - 1;
                for v in [first, first + 1, second, second + 1] {
                    let (dx, dy) = NUDGES[(v * 3 + round) % NUDGES.len()];
                    let step = 1 << round;
                    snapped[v].x += dx * step;
                    snapped[v].y += dy * step;
                    // keep the chain closed
                    if v == 0 || v == last {
                        snapped[last - v] = snapped[v];
                    }
                }
                log::debug!("nudged segments {first} and {second} off a rounding overlap");
            }
            result => return result,
        }
    }
}

pub fn build_arrangement(chain: &ClosedChain) -> Result<Arrangement, ArrangementError> {
    let pieces = perturbed_pieces(chain)?;

    let mut vertices: Vec<Vertex> = Vec::new();
    let mut lookup: HashMap<GridPoint, usize> = HashMap::new();
    let mut vertex_id = |g: GridPoint, vertices: &mut Vec<Vertex>| {
        *lookup.entry(g).or_insert_with(|| {
            vertices.push(Vertex {
                id: vertices.len(),
                position: g.to_point(),
                grid: g,
            });
            vertices.len() - 1
        })
    };

    let mut half_edges: Vec<HalfEdge> = Vec::with_capacity(pieces.len() * 2);
    for piece in &pieces {
        let u = vertex_id(piece.a, &mut vertices);
        let v = vertex_id(piece.b, &mut vertices);
        let id = half_edges.len();
        for (origin, twin, curve_dir) in [(u, id + 1, 1), (v, id, -1)] {
            half_edges.push(HalfEdge {
                id: half_edges.len(),
                origin,
                twin,
                next: usize::MAX,
                face: usize::MAX,
                curve_dir,
                source_segment: piece.source,
            });
        }
    }

    // outgoing half-edges per vertex in counterclockwise order
    let mut outgoing: Vec<Vec<usize>> = vec![Vec::new(); vertices.len()];
    for he in &half_edges {
        outgoing[he.origin].push(he.id);
    }
    let direction = |he: &HalfEdge| {
        let a = vertices[he.origin].grid;
        let b = vertices[half_edges[he.twin].origin].grid;
        (b.x - a.x, b.y - a.y)
    };
    let mut rank = vec![0usize; half_edges.len()];
    for list in outgoing.iter_mut() {
        list.sort_by(|&a, &b| angle_cmp(direction(&half_edges[a]), direction(&half_edges[b])));
        for (k, &h) in list.iter().enumerate() {
            rank[h] = k;
        }
    }

    // faces lie to the left: next(e) is the clockwise neighbour of twin(e)
    for id in 0..half_edges.len() {
        let twin = half_edges[id].twin;
        let around = &outgoing[half_edges[twin].origin];
        let k = rank[twin];
        half_edges[id].next = around[(k + around.len() - 1) % around.len()];
    }

    let mut faces = Vec::new();
    let mut unbounded = None;
    for start in 0..half_edges.len() {
        if half_edges[start].face != usize::MAX {
            continue;
        }
        let face = faces.len();
        let mut area2: i128 = 0;
        let mut h = start;
        loop {
            half_edges[h].face = face;
            let a = vertices[half_edges[h].origin].grid;
            let b = vertices[half_edges[half_edges[h].twin].origin].grid;
            area2 += cross(a.x as i128, a.y as i128, b.x as i128, b.y as i128);
            h = half_edges[h].next;
            if h == start {
                break;
            }
        }
        let is_unbounded = area2 < 0;
        if is_unbounded {
            // the subdivision is connected, so exactly one cycle runs clockwise
            debug_assert!(unbounded.is_none(), "more than one clockwise boundary cycle");
            unbounded = Some(face);
        }
        faces.push(Face {
            id: face,
            outer_boundary: (!is_unbounded).then_some(start),
            holes: if is_unbounded { vec![start] } else { Vec::new() },
            is_unbounded,
        });
    }

    Ok(Arrangement {
        vertices,
        half_edges,
        faces,
        unbounded: unbounded.expect("a closed chain always bounds the unbounded face"),
        source: chain.clone(),
    })
}

impl Arrangement {
    pub fn vertices(&self) -> &[Vertex] {
        &self.vertices
    }

    pub fn half_edges(&self) -> &[HalfEdge] {
        &self.half_edges
    }

    pub fn faces(&self) -> &[Face] {
        &self.faces
    }

    pub fn source(&self) -> &ClosedChain {
        &self.source
    }

    pub fn unbounded_face(&self) -> usize {
        self.unbounded
    }

    pub fn bounded_faces(&self) -> impl Iterator<Item = &Face> {
        self.faces.iter().filter(|f| !f.is_unbounded)
    }

    /// Number of undirected edges.
    pub fn edge_count(&self) -> usize {
        self.half_edges.len() / 2
    }

    /// V - E + F.
    pub fn euler_characteristic(&self) -> i64 {
        self.vertices.len() as i64 - self.edge_count() as i64 + self.faces.len() as i64
    }

    pub fn destination(&self, he: usize) -> usize {
        self.half_edges[self.half_edges[he].twin].origin
    }

    /// Half-edge ids of the cycle containing `start`, in `next` order.
    pub fn cycle(&self, start: usize) -> Vec<usize> {
        let mut out = vec![start];
        let mut h = self.half_edges[start].next;
        while h != start {
            out.push(h);
            h = self.half_edges[h].next;
        }
        out
    }

    /// Vertex positions along the cycle containing `start` (not repeated at the end).
    pub fn ring(&self, start: usize) -> Vec<Point> {
        self.cycle(start)
            .into_iter()
            .map(|h| self.vertices[self.half_edges[h].origin].position)
            .collect()
    }

    pub(crate) fn grid_ring(&self, start: usize) -> Vec<GridPoint> {
        self.cycle(start)
            .into_iter()
            .map(|h| self.vertices[self.half_edges[h].origin].grid)
            .collect()
    }

    /// Boundary rings of a face: the outer ring first (if any), then holes.
    pub fn face_rings(&self, face: usize) -> Vec<Vec<Point>> {
        let f = &self.faces[face];
        f.outer_boundary
            .iter()
            .chain(f.holes.iter())
            .map(|&h| self.ring(h))
            .collect()
    }

    /// Signed area of a face: outer ring area minus hole areas, computed exactly
    /// on the grid. Zero for the unbounded face.
    pub fn face_area(&self, face: usize) -> f64 {
        let f = &self.faces[face];
        if f.is_unbounded {
            return 0.0;
        }
        let area2: i128 = f
            .outer_boundary
            .iter()
            .chain(f.holes.iter())
            .map(|&h| {
                let ring = self.grid_ring(h);
                (0..ring.len())
                    .map(|i| {
                        let a = ring[i];
                        let b = ring[(i + 1) % ring.len()];
                        cross(a.x as i128, a.y as i128, b.x as i128, b.y as i128)
                    })
                    .sum::<i128>()
            })
            .sum();
        area2 as f64 / 2.0 * GRID * GRID
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn chain(raw: &[(f64, f64)]) -> ClosedChain {
        ClosedChain::from_closed(raw.iter().map(|&(x, y)| Point::new(x, y)).collect()).unwrap()
    }

    fn g(x: i64, y: i64) -> GridPoint {
        GridPoint { x, y }
    }

    #[test]
    fn contact_cases() {
        assert_eq!(contact(g(0, 0), g(2, 2), g(0, 2), g(2, 0)), Contact::At(g(1, 1)));
        assert_eq!(contact(g(0, 0), g(2, 0), g(0, 1), g(2, 1)), Contact::None);
        assert_eq!(contact(g(0, 0), g(2, 0), g(1, 0), g(3, 0)), Contact::Overlap);
        assert_eq!(contact(g(0, 0), g(2, 0), g(2, 0), g(3, 0)), Contact::At(g(2, 0)));
        assert_eq!(contact(g(0, 0), g(2, 0), g(3, 0), g(4, 0)), Contact::None);
        // T-junction
        assert_eq!(contact(g(0, 0), g(4, 0), g(2, 0), g(2, 5)), Contact::At(g(2, 0)));
        // rounded crossing: (1, 1/3) snaps to (1, 0)
        assert_eq!(contact(g(0, 0), g(3, 1), g(1, 1), g(1, -1)), Contact::At(g(1, 0)));
    }

    #[test]
    fn div_round_ties_away() {
        assert_eq!(div_round(5, 2), 3);
        assert_eq!(div_round(-5, 2), -3);
        assert_eq!(div_round(4, 3), 1);
        assert_eq!(div_round(5, -3), -2);
    }

    #[test]
    fn crossing_segments() {
        let c = chain(&[(0.0, 0.0), (2.0, 2.0), (2.0, 0.0), (0.0, 2.0), (0.0, 0.0)]);
        let hits = find_intersections(&c).unwrap();
        assert_eq!(hits.len(), 1);
        assert_eq!((hits[0].first, hits[0].second), (0, 2));
        assert_eq!(hits[0].point, Point::new(1.0, 1.0));
    }

    #[test]
    fn square_arrangement() {
        let c = chain(&[(0.0, 0.0), (1.0, 0.0), (1.0, 1.0), (0.0, 1.0), (0.0, 0.0)]);
        assert!(find_intersections(&c).unwrap().is_empty());
        let arr = build_arrangement(&c).unwrap();
        assert_eq!(arr.vertices().len(), 4);
        assert_eq!(arr.edge_count(), 4);
        assert_eq!(arr.faces().len(), 2);
        assert_eq!(arr.faces().iter().filter(|f| f.is_unbounded).count(), 1);
        let inner = arr.bounded_faces().next().unwrap().id;
        assert!((arr.face_area(inner) - 1.0).abs() < 1e-12);
    }

    #[test]
    fn bowtie_arrangement() {
        let c = chain(&[(0.0, 0.0), (2.0, 2.0), (2.0, 0.0), (0.0, 2.0), (0.0, 0.0)]);
        let arr = build_arrangement(&c).unwrap();
        assert_eq!(arr.vertices().len(), 5);
        assert_eq!(arr.edge_count(), 6);
        assert_eq!(arr.faces().len(), 3);
        assert_eq!(arr.euler_characteristic(), 2);
    }

    #[test]
    fn half_edge_invariants() {
        let c = chain(&[(0.0, 0.0), (2.0, 2.0), (2.0, 0.0), (0.0, 2.0), (0.0, 0.0)]);
        let arr = build_arrangement(&c).unwrap();
        let mut seen = vec![0; arr.half_edges().len()];
        for he in arr.half_edges() {
            assert_eq!(arr.half_edges()[he.twin].twin, he.id);
            assert_eq!(arr.half_edges()[he.twin].origin, arr.destination(arr.half_edges()[he.twin].twin));
            assert_eq!(arr.half_edges()[he.next].origin, arr.destination(he.id));
            assert_eq!(arr.half_edges()[he.next].face, he.face);
            seen[he.next] += 1;
        }
        assert!(seen.iter().all(|&c| c == 1));
    }

    #[test]
    fn retraced_segment_is_reported() {
        let c = chain(&[(0.0, 0.0), (2.0, 0.0), (1.0, 0.0), (1.0, 1.0), (0.0, 0.0)]);
        assert!(matches!(
            build_arrangement(&c),
            Err(ArrangementError::DegenerateOverlap { .. })
        ));
        assert!(matches!(
            find_intersections(&c),
            Err(ArrangementError::DegenerateOverlap { .. })
        ));
    }

    #[test]
    fn rounding_overlap_on_thin_spike_is_nudged_away() {
        // the return leg passes 0.03 grid units from the spike's first vertex
        let p = |x: i64, y: i64| (x as f64 * GRID, y as f64 * GRID);
        let c = chain(&[p(0, 0), p(30847, 54176), p(30771, 44593), p(30867, 56703), p(60000, 0), p(0, 0)]);
        assert!(find_intersections(&c).is_ok());
        let original: Vec<GridPoint> = c.points().iter().map(|&q| GridPoint::snap(q).unwrap()).collect();
        assert!(matches!(
            planar_pieces(&original),
            Err(ArrangementError::DegenerateOverlap { first: 1, second: 2 })
        ));
        let arr = build_arrangement(&c).unwrap();
        assert_eq!(arr.euler_characteristic(), 2);
        let w = crate::winding::compute_winding(&arr);
        for h in arr.half_edges() {
            assert_eq!(w.get(h.face) - w.get(arr.half_edges()[h.twin].face), h.curve_dir as i64);
        }
    }

    #[test]
    fn touching_vertex_merges() {
        // the chain passes through (1, 1) twice
        let c = chain(&[
            (0.0, 0.0),
            (1.0, 1.0),
            (2.0, 0.0),
            (2.0, 2.0),
            (1.0, 1.0),
            (0.0, 2.0),
            (0.0, 0.0),
        ]);
        let arr = build_arrangement(&c).unwrap();
        assert_eq!(arr.vertices().len(), 5);
        assert_eq!(arr.euler_characteristic(), 2);
    }

    #[test]
    fn sweep_matches_all_pairs() {
        use rand::{Rng, SeedableRng};
        let mut rng = rand_chacha::ChaCha8Rng::seed_from_u64(7);
        let pieces: Vec<Piece> = (0..700)
            .map(|source| {
                let a = g(rng.random_range(0..4000), rng.random_range(0..4000));
                let b = g(a.x + rng.random_range(-300..300), a.y + rng.random_range(-300..300));
                Piece { a, b, source }
            })
            .collect();
        let pairs = |f: fn(&[Piece]) -> Vec<(usize, usize)>| {
            f(&pieces)
                .into_iter()
                .filter(|&(i, j)| {
                    contact(pieces[i].a, pieces[i].b, pieces[j].a, pieces[j].b) != Contact::None
                })
                .collect::<Vec<_>>()
        };
        let swept = pairs(sweep_pairs);
        assert!(!swept.is_empty());
        assert_eq!(swept, pairs(all_pairs));
    }

    #[test]
    fn rebuild_is_deterministic() {
        let c = chain(&[
            (0.0, 0.0),
            (3.0, 1.0),
            (1.0, 3.0),
            (1.0, -1.0),
            (3.0, 2.0),
            (0.0, 0.0),
        ]);
        assert_eq!(build_arrangement(&c).unwrap(), build_arrangement(&c).unwrap());
    }
}
