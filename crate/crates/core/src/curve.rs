//! Stroke validation, arc-length canonicalization and canonical closure.
//!
//! A visitor stroke must start on the left edge of the canvas and end on the
//! right edge. Everything downstream works on [`CanonicalCurve`]s: validated,
//! endpoint-snapped strokes resampled to a fixed number of points spaced
//! uniformly along the stroke's arc length.

use serde::{Deserialize, Serialize};
use thiserror::Error;

/// Number of samples used for canonical curves throughout the system.
pub const DEFAULT_SAMPLES: usize = 256;

/// How far outside the canvas a raw point may lie before it is rejected.
pub const CANVAS_TOLERANCE: f64 = 1e-6;

#[derive(Debug, Clone, Copy, PartialEq, Default, Serialize, Deserialize)]
pub struct Point {
    pub x: f64,
    pub y: f64,
}

impl Point {
    pub const fn new(x: f64, y: f64) -> Self {
        Point { x, y }
    }

    pub fn is_finite(&self) -> bool {
        self.x.is_finite() && self.y.is_finite()
    }

    /// Squared Euclidean distance. Every distance in the crate derives from this.
    #[inline]
    pub fn distance_sq(&self, other: &Point) -> f64 {
        let dx = self.x - other.x;
        let dy = self.y - other.y;
        dx * dx + dy * dy
    }

    #[inline]
    pub fn distance(&self, other: &Point) -> f64 {
        self.distance_sq(other).sqrt()
    }

    /// Point at parameter `t` on the segment from `self` to `other`.
    #[inline]
    pub fn lerp(&self, other: &Point, t: f64) -> Point {
        Point {
            x: self.x + (other.x - self.x) * t,
            y: self.y + (other.y - self.y) * t,
        }
    }
}

impl From<[f64; 2]> for Point {
    fn from([x, y]: [f64; 2]) -> Self {
        Point { x, y }
    }
}

impl From<Point> for [f64; 2] {
    fn from(p: Point) -> Self {
        [p.x, p.y]
    }
}

/// Axis-aligned drawing area `[0, w] x [0, h]`, y pointing up.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Canvas {
    pub w: f64,
    pub h: f64,
}

impl Default for Canvas {
    fn default() -> Self {
        Canvas { w: 1.0, h: 1.0 }
    }
}

impl Canvas {
    pub fn new(w: f64, h: f64) -> Result<Self, CurveError> {
        if !(w.is_finite() && h.is_finite() && w > 0.0 && h > 0.0) {
            return Err(CurveError::BadCanvas { w, h });
        }
        Ok(Canvas { w, h })
    }

    pub fn diagonal(&self) -> f64 {
        self.w.hypot(self.h)
    }

    pub fn contains(&self, p: &Point, tol: f64) -> bool {
        p.x >= -tol && p.x <= self.w + tol && p.y >= -tol && p.y <= self.h + tol
    }
}

#[derive(Debug, Error, Clone, PartialEq)]
pub enum CurveError {
    #[error("stroke needs at least two distinct points")]
    TooFewPoints,
    #[error("stroke must end to the right of where it starts (first x = {first}, last x = {last})")]
    NotLeftToRight { first: f64, last: f64 },
    #[error("stroke contains a non-finite coordinate at index {index}")]
    NonFinite { index: usize },
    #[error("point {index} ({x}, {y}) lies outside the canvas")]
    OutOfCanvas { index: usize, x: f64, y: f64 },
    #[error("sample count must be at least 2, got {0}")]
    BadSampleCount(usize),
    #[error("canvas dimensions must be finite and positive, got {w} x {h}")]
    BadCanvas { w: f64, h: f64 },
    #[error("canonical curve invariant violated: {0}")]
    NotCanonical(&'static str),
}

impl CurveError {
    /// Stable error code used by the CLI and the HTTP service.
    pub fn code(&self) -> &'static str {
        match self {
            CurveError::TooFewPoints => "TooFewPoints",
            CurveError::NotLeftToRight { .. } => "NotLeftToRight",
            CurveError::NonFinite { .. } => "NonFinite",
            CurveError::OutOfCanvas { .. } => "OutOfCanvas",
            CurveError::BadSampleCount(_) => "BadSampleCount",
            CurveError::BadCanvas { .. } => "BadCanvas",
            CurveError::NotCanonical(_) => "NotCanonical",
        }
    }
}

/// A stroke exactly as captured.
#[derive(Debug, Clone, PartialEq)]
pub struct RawStroke {
    pub points: Vec<Point>,
    pub canvas: Canvas,
}

impl RawStroke {
    pub fn new(points: Vec<Point>, canvas: Canvas) -> Self {
        RawStroke { points, canvas }
    }
}

/// A validated stroke: no consecutive duplicates, endpoints on the side edges.
#[derive(Debug, Clone, PartialEq)]
pub struct Polyline {
    points: Vec<Point>,
    canvas: Canvas,
}

impl Polyline {
    pub fn points(&self) -> &[Point] {
        &self.points
    }

    pub fn canvas(&self) -> Canvas {
        self.canvas
    }

    pub fn resample(&self, n: usize) -> Result<CanonicalCurve, CurveError> {
        resample(self, n)
    }
}

/// Validated, endpoint-snapped, arc-length-uniform curve.
#[derive(Debug, Clone, PartialEq)]
pub struct CanonicalCurve {
    points: Vec<Point>,
    canvas: Canvas,
}

impl CanonicalCurve {
    /// Rebuilds a canonical curve from stored points (e.g. a gallery log line).
    ///
    /// Only the structural invariants are checked: at least two points, no
    /// consecutive duplicates, everything finite and on the canvas, and the
    /// endpoints on the left and right edges.
    pub fn from_stored(points: Vec<Point>, canvas: Canvas) -> Result<Self, CurveError> {
        if points.len() < 2 {
            return Err(CurveError::TooFewPoints);
        }
        for (index, p) in points.iter().enumerate() {
            if !p.is_finite() {
                return Err(CurveError::NonFinite { index });
            }
            if !canvas.contains(p, CANVAS_TOLERANCE) {
                return Err(CurveError::OutOfCanvas { index, x: p.x, y: p.y });
            }
        }
        if points.windows(2).any(|w| w[0] == w[1]) {
            return Err(CurveError::NotCanonical("consecutive duplicate points"));
        }
        if points[0].x != 0.0 || points[points.len() - 1].x != canvas.w {
            return Err(CurveError::NotCanonical("endpoints must lie on the side edges"));
        }
        Ok(CanonicalCurve { points, canvas })
    }

    pub fn points(&self) -> &[Point] {
        &self.points
    }

    pub fn canvas(&self) -> Canvas {
        self.canvas
    }

    pub fn len(&self) -> usize {
        self.points.len()
    }

    pub fn is_empty(&self) -> bool {
        self.points.is_empty()
    }

    pub fn first(&self) -> Point {
        self.points[0]
    }

    pub fn last(&self) -> Point {
        self.points[self.points.len() - 1]
    }

    pub fn arc_length(&self) -> f64 {
        arc_length(&self.points)
    }

    pub fn close(&self) -> ClosedChain {
        close_curve(self)
    }
}

/// Closed polygonal chain: the drawing followed by the canonical return path.
#[derive(Debug, Clone, PartialEq)]
pub struct ClosedChain {
    points: Vec<Point>,
    curve_len: usize,
}

impl ClosedChain {
    /// Builds a chain from an explicit closed point list (first = last).
    ///
    /// Used for arbitrary test shapes; drawings go through [`close_curve`].
    pub fn from_closed(points: Vec<Point>) -> Result<Self, CurveError> {
        if points.len() < 4 {
            return Err(CurveError::TooFewPoints);
        }
        if let Some(index) = points.iter().position(|p| !p.is_finite()) {
            return Err(CurveError::NonFinite { index });
        }
        if points[0] != points[points.len() - 1] {
            return Err(CurveError::NotCanonical("chain is not closed"));
        }
        let curve_len = points.len();
        Ok(ClosedChain { points, curve_len })
    }

    /// All chain vertices, first = last.
    pub fn points(&self) -> &[Point] {
        &self.points
    }

    /// The part of the chain that came from the drawing.
    pub fn curve_points(&self) -> &[Point] {
        &self.points[..self.curve_len]
    }

    /// Number of segments.
    pub fn segment_count(&self) -> usize {
        self.points.len() - 1
    }

    pub fn segments(&self) -> impl Iterator<Item = (Point, Point)> + '_ {
        self.points.windows(2).map(|w| (w[0], w[1]))
    }

    /// Signed area by the shoelace formula (counterclockwise positive).
    pub fn signed_area(&self) -> f64 {
        shoelace(&self.points)
    }
}

pub fn arc_length(points: &[Point]) -> f64 {
    points.windows(2).map(|w| w[0].distance(&w[1])).sum()
}

/// Twice-halved shoelace sum over a closed ring (first = last or implicit).
pub fn shoelace(ring: &[Point]) -> f64 {
    if ring.len() < 3 {
        return 0.0;
    }
    let n = ring.len();
    let mut acc = 0.0;
    for i in 0..n {
        let a = ring[i];
        let b = ring[(i + 1) % n];
        acc += a.x * b.y - b.x * a.y;
    }
    acc / 2.0
}

fn dedup_consecutive(points: &mut Vec<Point>) {
    points.dedup_by(|b, a| a == b);
}

/// Checks a raw stroke and snaps its endpoints onto the side edges.
pub fn validate_stroke(raw: &RawStroke) -> Result<Polyline, CurveError> {
    let canvas = Canvas::new(raw.canvas.w, raw.canvas.h)?;
    for (index, p) in raw.points.iter().enumerate() {
        if !p.is_finite() {
            return Err(CurveError::NonFinite { index });
        }
    }
    for (index, p) in raw.points.iter().enumerate() {
        if !canvas.contains(p, CANVAS_TOLERANCE) {
            return Err(CurveError::OutOfCanvas { index, x: p.x, y: p.y });
        }
    }

    let mut points = raw.points.clone();
    dedup_consecutive(&mut points);
    if points.len() < 2 {
        return Err(CurveError::TooFewPoints);
    }
    let first = points[0].x;
    let last = points[points.len() - 1].x;
    if last <= first {
        return Err(CurveError::NotLeftToRight { first, last });
    }

    // Points within tolerance of the canvas are pulled onto it so that the
    // closure path stays strictly outside the drawing.
    for p in points.iter_mut() {
        p.x = p.x.clamp(0.0, canvas.w);
        p.y = p.y.clamp(0.0, canvas.h);
    }
    let n = points.len();
    points[0].x = 0.0;
    points[n - 1].x = canvas.w;
    dedup_consecutive(&mut points);
    if points.len() < 2 {
        return Err(CurveError::TooFewPoints);
    }
    Ok(Polyline { points, canvas })
}

/// Places `n` points at equal arc-length intervals along `points`.
///
/// The first and last input points are reproduced exactly. Consecutive
/// duplicate input points are ignored.
pub fn resample_points(points: &[Point], n: usize) -> Result<Vec<Point>, CurveError> {
    if n < 2 {
        return Err(CurveError::BadSampleCount(n));
    }
    let mut pts = points.to_vec();
    dedup_consecutive(&mut pts);
    if pts.len() < 2 {
        return Err(CurveError::TooFewPoints);
    }

    // cumulative[i] is the arc length from pts[0] to pts[i]
    let mut cumulative = Vec::with_capacity(pts.len());
    cumulative.push(0.0);
    for w in pts.windows(2) {
        let prev = *cumulative.last().unwrap();
        cumulative.push(prev + w[0].distance(&w[1]));
    }
    let total = cumulative[cumulative.len() - 1];

    let mut out = Vec::with_capacity(n);
    out.push(pts[0]);
    let mut seg = 0;
    for k in 1..n - 1 {
        let target = total * k as f64 / (n - 1) as f64;
        while seg + 1 < pts.len() - 1 && cumulative[seg + 1] < target {
            seg += 1;
        }
        let seg_len = cumulative[seg + 1] - cumulative[seg];
        let t = ((target - cumulative[seg]) / seg_len).clamp(0.0, 1.0);
        let p = if t == 1.0 {
            pts[seg + 1]
        } else {
            pts[seg].lerp(&pts[seg + 1], t)
        };
        out.push(p);
    }
    out.push(pts[pts.len() - 1]);
    Ok(out)
}

/// Resamples a validated stroke into a canonical curve of `n` points.
pub fn resample(polyline: &Polyline, n: usize) -> Result<CanonicalCurve, CurveError> {
    let mut points = resample_points(&polyline.points, n)?;
    // Very short strokes at large n can produce samples that collapse onto
    // each other numerically; the canonical form forbids that.
    dedup_consecutive(&mut points);
    if points.len() < 2 {
        return Err(CurveError::TooFewPoints);
    }
    Ok(CanonicalCurve {
        points,
        canvas: polyline.canvas,
    })
}

/// Validates and resamples in one step.
pub fn canonicalize(raw: &RawStroke, n: usize) -> Result<CanonicalCurve, CurveError> {
    resample(&validate_stroke(raw)?, n)
}

/// Return path used to close a left-to-right curve from `(0, y0)` to `(w, y1)`.
///
/// The path leaves the canvas to the right, runs below it, and comes back in
/// from the left, so it never touches the drawing.
pub fn return_path(canvas: Canvas, y_start: f64, y_end: f64) -> [Point; 5] {
    let Canvas { w, h } = canvas;
    [
        Point::new(1.1 * w, y_end),
        Point::new(1.1 * w, -0.1 * h),
        Point::new(-0.1 * w, -0.1 * h),
        Point::new(-0.1 * w, y_start),
        Point::new(0.0, y_start),
    ]
}

/// Closes an arbitrary left-to-right point list with the canonical return path.
///
/// `points` must start at `x = 0` and end at `x = canvas.w`.
pub fn close_points(points: &[Point], canvas: Canvas) -> ClosedChain {
    let first = points[0];
    let last = points[points.len() - 1];
    let mut chain = Vec::with_capacity(points.len() + 5);
    chain.extend_from_slice(points);
    chain.extend_from_slice(&return_path(canvas, first.y, last.y));
    ClosedChain {
        points: chain,
        curve_len: points.len(),
    }
}

pub fn close_curve(curve: &CanonicalCurve) -> ClosedChain {
    close_points(&curve.points, curve.canvas)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn pts(raw: &[(f64, f64)]) -> Vec<Point> {
        raw.iter().map(|&(x, y)| Point::new(x, y)).collect()
    }

    fn stroke(raw: &[(f64, f64)]) -> RawStroke {
        RawStroke::new(pts(raw), Canvas::default())
    }

    #[test]
    fn validate_snaps_endpoints() {
        let poly = validate_stroke(&stroke(&[(0.1, 0.5), (0.4, 0.6), (0.9, 0.5)])).unwrap();
        assert_eq!(poly.points(), pts(&[(0.0, 0.5), (0.4, 0.6), (1.0, 0.5)]).as_slice());
    }

    #[test]
    fn validate_errors() {
        assert_eq!(validate_stroke(&stroke(&[(0.5, 0.5)])), Err(CurveError::TooFewPoints));
        assert_eq!(
            validate_stroke(&stroke(&[(0.5, 0.5), (0.5, 0.5)])),
            Err(CurveError::TooFewPoints)
        );
        assert!(matches!(
            validate_stroke(&stroke(&[(0.9, 0.2), (0.1, 0.8)])),
            Err(CurveError::NotLeftToRight { .. })
        ));
        assert!(matches!(
            validate_stroke(&stroke(&[(0.1, 0.2), (f64::NAN, 0.8), (0.9, 0.1)])),
            Err(CurveError::NonFinite { index: 1 })
        ));
        assert!(matches!(
            validate_stroke(&stroke(&[(0.1, 0.2), (0.5, 1.01), (0.9, 0.1)])),
            Err(CurveError::OutOfCanvas { index: 1, .. })
        ));
        // within tolerance is accepted and clamped
        let poly = validate_stroke(&stroke(&[(0.1, 0.2), (0.5, 1.0 + 5e-7), (0.9, 0.1)])).unwrap();
        assert_eq!(poly.points()[1].y, 1.0);
    }

    #[test]
    fn validate_drops_duplicates() {
        let poly =
            validate_stroke(&stroke(&[(0.0, 0.5), (0.0, 0.5), (0.3, 0.2), (0.3, 0.2), (1.0, 0.5)]))
                .unwrap();
        assert_eq!(poly.points().len(), 3);
    }

    #[test]
    fn resample_examples() {
        let r = resample_points(&pts(&[(0.0, 0.0), (10.0, 0.0)]), 3).unwrap();
        assert_eq!(r, pts(&[(0.0, 0.0), (5.0, 0.0), (10.0, 0.0)]));

        let r = resample_points(&pts(&[(0.0, 0.0), (4.0, 0.0), (4.0, 3.0)]), 8).unwrap();
        assert_eq!(r.len(), 8);
        assert_eq!(r[4], Point::new(4.0, 0.0));
        for (k, p) in r.iter().enumerate() {
            let s = k as f64;
            let expected = if s <= 4.0 { Point::new(s, 0.0) } else { Point::new(4.0, s - 4.0) };
            assert!(p.distance(&expected) < 1e-12, "{k}: {p:?}");
        }

        let input = pts(&[(0.0, 0.3), (0.2, 0.9), (0.7, 0.1), (1.0, 0.4)]);
        let r = resample_points(&input, 2).unwrap();
        assert_eq!(r, vec![input[0], input[3]]);

        assert_eq!(resample_points(&input, 1), Err(CurveError::BadSampleCount(1)));
    }

    #[test]
    fn close_appends_return_path() {
        let poly = validate_stroke(&RawStroke::new(
            pts(&[(0.0, 0.25), (1.0, 1.0), (2.0, 0.75)]),
            Canvas::new(2.0, 1.0).unwrap(),
        ))
        .unwrap();
        let curve = resample(&poly, 3).unwrap();
        let chain = close_curve(&curve);
        let tail = &chain.points()[3..];
        assert_eq!(
            tail,
            pts(&[(2.2, 0.75), (2.2, -0.1), (-0.2, -0.1), (-0.2, 0.25), (0.0, 0.25)]).as_slice()
        );
        assert_eq!(chain.points()[0], *chain.points().last().unwrap());
        assert_eq!(chain.curve_points(), curve.points());
    }

    #[test]
    fn stored_curve_checks() {
        let c = Canvas::default();
        assert!(CanonicalCurve::from_stored(pts(&[(0.0, 0.1), (1.0, 0.2)]), c).is_ok());
        assert!(CanonicalCurve::from_stored(pts(&[(0.1, 0.1), (1.0, 0.2)]), c).is_err());
        assert!(CanonicalCurve::from_stored(pts(&[(0.0, 0.1)]), c).is_err());
    }
}
