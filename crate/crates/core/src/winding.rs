//! Winding numbers of arrangement faces and the palette coloring built on them.
//!
//! Colors depend on the winding number only, so two zones with the same
//! winding always share a color. The only freedom left to the user is the
//! palette offset, which rotates every color at once.

use std::collections::VecDeque;

use rand::Rng;
use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::arrangement::{Arrangement, GridPoint, GRID};
use crate::curve::{ClosedChain, Point};

#[derive(Debug, Error, Clone, PartialEq)]
pub enum WindingError {
    #[error("query point lies on the curve")]
    PointOnCurve,
    #[error("a palette needs at least two colors, got {0}")]
    PaletteTooSmall(usize),
    #[error("invalid color {0:?}, expected #RRGGBB")]
    BadColor(String),
}

impl WindingError {
    pub fn code(&self) -> &'static str {
        match self {
            WindingError::PointOnCurve => "PointOnCurve",
            WindingError::PaletteTooSmall(_) => "PaletteTooSmall",
            WindingError::BadColor(_) => "BadColor",
        }
    }
}

fn segment_distance_sq(q: Point, a: Point, b: Point) -> f64 {
    let dx = b.x - a.x;
    let dy = b.y - a.y;
    let len_sq = dx * dx + dy * dy;
    let t = if len_sq == 0.0 {
        0.0
    } else {
        (((q.x - a.x) * dx + (q.y - a.y) * dy) / len_sq).clamp(0.0, 1.0)
    };
    q.distance_sq(&a.lerp(&b, t))
}

/// Distance from `q` to the nearest segment of a closed chain.
pub fn distance_to_chain(chain: &ClosedChain, q: Point) -> f64 {
    chain
        .segments()
        .map(|(a, b)| segment_distance_sq(q, a, b))
        .fold(f64::INFINITY, f64::min)
        .sqrt()
}

/// Winding number of `chain` around `q` by signed ray crossings.
///
/// A horizontal ray is cast from `q` towards +x. Edges crossing it upwards
/// with `q` on their left count +1, edges crossing downwards with `q` on
/// their right count -1. Points within one grid cell of the chain are
/// rejected.
pub fn winding_at_point(chain: &ClosedChain, q: Point) -> Result<i64, WindingError> {
    if distance_to_chain(chain, q) <= GRID {
        return Err(WindingError::PointOnCurve);
    }
    let mut winding = 0;
    for (a, b) in chain.segments() {
        let side = (b.x - a.x) * (q.y - a.y) - (q.x - a.x) * (b.y - a.y);
        if a.y <= q.y {
            if b.y > q.y && side > 0.0 {
                winding += 1;
            }
        } else if b.y <= q.y && side < 0.0 {
            winding -= 1;
        }
    }
    Ok(winding)
}

/// Winding number per face, indexed by face id.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct WindingMap {
    windings: Vec<i64>,
}

impl WindingMap {
    pub fn get(&self, face: usize) -> i64 {
        self.windings[face]
    }

    pub fn as_slice(&self) -> &[i64] {
        &self.windings
    }

    pub fn len(&self) -> usize {
        self.windings.len()
    }

    pub fn is_empty(&self) -> bool {
        self.windings.is_empty()
    }

    /// Largest absolute winding over all faces.
    pub fn max_abs(&self) -> u64 {
        self.windings.iter().map(|w| w.unsigned_abs()).max().unwrap_or(0)
    }
}

/// Propagates windings outward from the unbounded face.
///
/// Crossing the curve from its right side to its left adds one, so the face
/// on the left of a half-edge has winding `w(twin face) + curve_dir`.
pub fn compute_winding(arr: &Arrangement) -> WindingMap {
    let half_edges = arr.half_edges();
    let mut boundary: Vec<Vec<usize>> = vec![Vec::new(); arr.faces().len()];
    for he in half_edges {
        boundary[he.face].push(he.id);
    }

    let mut windings: Vec<Option<i64>> = vec![None; arr.faces().len()];
    let start = arr.unbounded_face();
    windings[start] = Some(0);
    let mut queue = VecDeque::from([start]);
    while let Some(face) = queue.pop_front() {
        let w = windings[face].unwrap();
        for &h in &boundary[face] {
            // h bounds `face`; its twin bounds the neighbour
            let twin = &half_edges[half_edges[h].twin];
            if windings[twin.face].is_none() {
                windings[twin.face] = Some(w + twin.curve_dir as i64);
                queue.push_back(twin.face);
            }
        }
    }
    WindingMap {
        windings: windings
            .into_iter()
            .map(|w| w.expect("the subdivision is connected"))
            .collect(),
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub struct Rgb(pub u8, pub u8, pub u8);

impl Rgb {
    pub fn hex(&self) -> String {
        format!("#{:02x}{:02x}{:02x}", self.0, self.1, self.2)
    }

    pub fn parse_hex(s: &str) -> Result<Self, WindingError> {
        let bad = || WindingError::BadColor(s.to_string());
        let digits = s.strip_prefix('#').ok_or_else(bad)?;
        if digits.len() != 6 || !digits.is_ascii() {
            return Err(bad());
        }
        let channel = |i: usize| u8::from_str_radix(&digits[i..i + 2], 16).map_err(|_| bad());
        Ok(Rgb(channel(0)?, channel(2)?, channel(4)?))
    }

    /// Converts HSL (hue in degrees, saturation and lightness in [0, 1]) to sRGB.
    pub fn from_hsl(hue: f64, saturation: f64, lightness: f64) -> Self {
        let c = (1.0 - (2.0 * lightness - 1.0).abs()) * saturation;
        let h = hue.rem_euclid(360.0) / 60.0;
        let x = c * (1.0 - (h % 2.0 - 1.0).abs());
        let (r, g, b) = match h as u32 {
            0 => (c, x, 0.0),
            1 => (x, c, 0.0),
            2 => (0.0, c, x),
            3 => (0.0, x, c),
            4 => (x, 0.0, c),
            _ => (c, 0.0, x),
        };
        let m = lightness - c / 2.0;
        let to_u8 = |v: f64| ((v + m) * 255.0).round().clamp(0.0, 255.0) as u8;
        Rgb(to_u8(r), to_u8(g), to_u8(b))
    }
}

impl Serialize for Rgb {
    fn serialize<S: serde::Serializer>(&self, s: S) -> Result<S::Ok, S::Error> {
        s.serialize_str(&self.hex())
    }
}

impl<'de> Deserialize<'de> for Rgb {
    fn deserialize<D: serde::Deserializer<'de>>(d: D) -> Result<Self, D::Error> {
        let s = String::deserialize(d)?;
        Rgb::parse_hex(&s).map_err(serde::de::Error::custom)
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct Palette {
    colors: Vec<Rgb>,
    pub offset: i64,
}

impl Default for Palette {
    /// Eight hues 45 degrees apart, so neighbouring windings get neighbouring hues.
    fn default() -> Self {
        Palette::hue_wheel(8, 0.65, 0.55).expect("eight colors")
    }
}

impl Palette {
    pub fn new(colors: Vec<Rgb>, offset: i64) -> Result<Self, WindingError> {
        if colors.len() < 2 {
            return Err(WindingError::PaletteTooSmall(colors.len()));
        }
        Ok(Palette { colors, offset })
    }

    pub fn hue_wheel(count: usize, saturation: f64, lightness: f64) -> Result<Self, WindingError> {
        let colors = (0..count)
            .map(|k| Rgb::from_hsl(360.0 * k as f64 / count as f64, saturation, lightness))
            .collect();
        Palette::new(colors, 0)
    }

    pub fn colors(&self) -> &[Rgb] {
        &self.colors
    }

    pub fn len(&self) -> usize {
        self.colors.len()
    }

    pub fn is_empty(&self) -> bool {
        self.colors.is_empty()
    }

    pub fn with_offset(&self, offset: i64) -> Palette {
        Palette {
            colors: self.colors.clone(),
            offset,
        }
    }

    /// Color for a winding number: `colors[(winding + offset) mod P]`, nonnegative modulo.
    pub fn color_for(&self, winding: i64) -> Rgb {
        let p = self.colors.len() as i64;
        self.colors[(winding.wrapping_add(self.offset)).rem_euclid(p) as usize]
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ColoredFace {
    pub face: usize,
    /// Outer ring first, then holes. The unbounded face has only its hole ring.
    pub rings: Vec<Vec<Point>>,
    pub winding: i64,
    pub color: Rgb,
    pub unbounded: bool,
}

/// Colors every face of `arr` from its winding number.
pub fn color_faces(arr: &Arrangement, windings: &WindingMap, palette: &Palette) -> Vec<ColoredFace> {
    arr.faces()
        .iter()
        .map(|f| {
            let winding = windings.get(f.id);
            ColoredFace {
                face: f.id,
                rings: arr.face_rings(f.id),
                winding,
                color: palette.color_for(winding),
                unbounded: f.is_unbounded,
            }
        })
        .collect()
}

/// Recomputes colors for a new palette offset. Offsets are absolute.
pub fn recolor(colored: &[ColoredFace], palette: &Palette, new_offset: i64) -> Vec<ColoredFace> {
    let palette = palette.with_offset(new_offset);
    colored
        .iter()
        .map(|f| ColoredFace {
            color: palette.color_for(f.winding),
            ..f.clone()
        })
        .collect()
}

/// Closes, arranges, winds and colors a point list in one go.
pub fn color_chain(
    chain: &ClosedChain,
    palette: &Palette,
) -> Result<(Arrangement, WindingMap, Vec<ColoredFace>), crate::arrangement::ArrangementError> {
    let arr = crate::arrangement::build_arrangement(chain)?;
    let windings = compute_winding(&arr);
    let colored = color_faces(&arr, &windings, palette);
    Ok((arr, windings, colored))
}

#[inline]
fn orient(a: GridPoint, b: GridPoint, c: GridPoint) -> i128 {
    crate::arrangement::orient(a, b, c)
}

/// Ear-clipping triangulation of a counterclockwise ring on the grid.
///
/// Rings may touch themselves at repeated vertices. Returns index triples
/// into `ring`; when no ear can be found the remaining polygon is dropped.
pub(crate) fn ear_triangles(ring: &[GridPoint]) -> Vec<[usize; 3]> {
    let mut idx: Vec<usize> = (0..ring.len()).collect();
    let mut out = Vec::new();
    // drop collinear and spike vertices up front; they carry no area
    let mut guard = 0;
    while idx.len() > 3 && guard < 4 * ring.len() * ring.len() {
        guard += 1;
        let n = idx.len();
        let mut clipped = false;
        for k in 0..n {
            let (ia, ib, ic) = (idx[(k + n - 1) % n], idx[k], idx[(k + 1) % n]);
            let (a, b, c) = (ring[ia], ring[ib], ring[ic]);
            let turn = orient(a, b, c);
            if turn == 0 {
                idx.remove(k);
                clipped = true;
                break;
            }
            if turn < 0 {
                continue;
            }
            let blocked = idx.iter().any(|&j| {
                let p = ring[j];
                if p == a || p == b || p == c {
                    return false;
                }
                orient(a, b, p) >= 0 && orient(b, c, p) >= 0 && orient(c, a, p) >= 0
            });
            if !blocked {
                out.push([ia, ib, ic]);
                idx.remove(k);
                clipped = true;
                break;
            }
        }
        if !clipped {
            break;
        }
    }
    if idx.len() == 3 && orient(ring[idx[0]], ring[idx[1]], ring[idx[2]]) > 0 {
        out.push([idx[0], idx[1], idx[2]]);
    }
    out
}

/// Points strictly inside a bounded face, for checking windings against
/// [`winding_at_point`].
///
/// The first point is the centroid of the largest triangle of an ear
/// decomposition of the face; the rest are drawn uniformly from the
/// triangles (area-weighted). Every returned point is at least `clearance`
/// away from both the face boundary and the arrangement's source chain.
/// Fewer than `count` points are returned when the face is too thin to
/// host them; `attempts` bounds the rejection sampling.
pub fn sample_interior_points<R: Rng>(
    arr: &Arrangement,
    face: usize,
    count: usize,
    clearance: f64,
    attempts: usize,
    rng: &mut R,
) -> Vec<Point> {
    let f = &arr.faces()[face];
    let Some(outer) = f.outer_boundary else {
        return Vec::new();
    };
    let ring = arr.grid_ring(outer);
    let tris = ear_triangles(&ring);
    if tris.is_empty() {
        return Vec::new();
    }
    let points: Vec<Point> = ring.iter().map(|g| g.to_point()).collect();
    let area = |t: &[usize; 3]| orient(ring[t[0]], ring[t[1]], ring[t[2]]) as f64;
    let boundary: Vec<(Point, Point)> = (0..points.len())
        .map(|i| (points[i], points[(i + 1) % points.len()]))
        .collect();
    let clear = |q: Point| {
        let near_boundary = boundary
            .iter()
            .any(|&(a, b)| segment_distance_sq(q, a, b) < clearance * clearance);
        !near_boundary && distance_to_chain(arr.source(), q) >= clearance
    };

    let mut out = Vec::with_capacity(count);
    let largest = tris
        .iter()
        .max_by(|a, b| area(a).total_cmp(&area(b)))
        .unwrap();
    let centroid = {
        let [a, b, c] = largest.map(|i| points[i]);
        Point::new((a.x + b.x + c.x) / 3.0, (a.y + b.y + c.y) / 3.0)
    };
    if clear(centroid) {
        out.push(centroid);
    }

    let total: f64 = tris.iter().map(area).sum();
    let mut tries = 0;
    while out.len() < count && tries < attempts {
        tries += 1;
        let mut pick = rng.random::<f64>() * total;
        let tri = tris
            .iter()
            .find(|t| {
                pick -= area(t);
                pick <= 0.0
            })
            .unwrap_or(largest);
        let [a, b, c] = tri.map(|i| points[i]);
        let (mut u, mut v) = (rng.random::<f64>(), rng.random::<f64>());
        if u + v > 1.0 {
            u = 1.0 - u;
            v = 1.0 - v;
        }
        let q = Point::new(
            a.x + u * (b.x - a.x) + v * (c.x - a.x),
            a.y + u * (b.y - a.y) + v * (c.y - a.y),
        );
        if clear(q) {
            out.push(q);
        }
    }
    out
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::arrangement::build_arrangement;
    use rand::SeedableRng;

    fn chain(raw: &[(f64, f64)]) -> ClosedChain {
        ClosedChain::from_closed(raw.iter().map(|&(x, y)| Point::new(x, y)).collect()).unwrap()
    }

    fn unit_square_ccw() -> ClosedChain {
        chain(&[(0.0, 0.0), (1.0, 0.0), (1.0, 1.0), (0.0, 1.0), (0.0, 0.0)])
    }

    #[test]
    fn oracle_examples() {
        let sq = unit_square_ccw();
        assert_eq!(winding_at_point(&sq, Point::new(0.5, 0.5)), Ok(1));
        assert_eq!(winding_at_point(&sq, Point::new(3.0, -2.0)), Ok(0));
        assert_eq!(winding_at_point(&sq, Point::new(1.0, 0.5)), Err(WindingError::PointOnCurve));

        // two counterclockwise turns around the center
        let double = chain(&[
            (0.0, 0.0),
            (4.0, 0.0),
            (4.0, 4.0),
            (0.0, 4.0),
            (0.0, 1.0),
            (3.0, 1.0),
            (3.0, 3.0),
            (1.0, 3.0),
            (1.0, 0.5),
            (0.5, 0.5),
            (0.5, 0.0),
            (0.0, 0.0),
        ]);
        assert_eq!(winding_at_point(&double, Point::new(2.0, 2.0)), Ok(2));
        assert_eq!(winding_at_point(&double, Point::new(3.5, 2.0)), Ok(1));
    }

    #[test]
    fn square_windings() {
        let arr = build_arrangement(&unit_square_ccw()).unwrap();
        let w = compute_winding(&arr);
        let inner = arr.bounded_faces().next().unwrap().id;
        assert_eq!(w.get(arr.unbounded_face()), 0);
        assert_eq!(w.get(inner), 1);

        let cw = chain(&[(0.0, 0.0), (0.0, 1.0), (1.0, 1.0), (1.0, 0.0), (0.0, 0.0)]);
        let arr = build_arrangement(&cw).unwrap();
        let w = compute_winding(&arr);
        let inner = arr.bounded_faces().next().unwrap().id;
        assert_eq!(w.get(inner), -1);
    }

    #[test]
    fn bowtie_lobes_have_opposite_signs() {
        let c = chain(&[(0.0, 0.0), (2.0, 2.0), (2.0, 0.0), (0.0, 2.0), (0.0, 0.0)]);
        let arr = build_arrangement(&c).unwrap();
        let w = compute_winding(&arr);
        let mut lobes: Vec<i64> = arr.bounded_faces().map(|f| w.get(f.id)).collect();
        lobes.sort();
        assert_eq!(lobes, vec![-1, 1]);
    }

    #[test]
    fn palette_rule() {
        let pal = Palette::default();
        assert_eq!(pal.len(), 8);
        assert_eq!(pal.color_for(0), pal.colors()[0]);
        let six = Palette::hue_wheel(6, 0.5, 0.5).unwrap();
        assert_eq!(six.color_for(-1), six.colors()[5]);
        assert_eq!(six.with_offset(2).color_for(-1), six.colors()[1]);
        assert_eq!(Palette::new(vec![Rgb(0, 0, 0)], 0), Err(WindingError::PaletteTooSmall(1)));
    }

    #[test]
    fn hsl_primaries() {
        assert_eq!(Rgb::from_hsl(0.0, 1.0, 0.5), Rgb(255, 0, 0));
        assert_eq!(Rgb::from_hsl(120.0, 1.0, 0.5), Rgb(0, 255, 0));
        assert_eq!(Rgb::from_hsl(240.0, 1.0, 0.5), Rgb(0, 0, 255));
        assert_eq!(Rgb::parse_hex("#0a0B0c"), Ok(Rgb(10, 11, 12)));
        assert!(Rgb::parse_hex("0a0b0c").is_err());
        assert_eq!(Rgb(10, 11, 12).hex(), "#0a0b0c");
    }

    #[test]
    fn recolor_is_cyclic_and_absolute() {
        let c = chain(&[(0.0, 0.0), (2.0, 2.0), (2.0, 0.0), (0.0, 2.0), (0.0, 0.0)]);
        let pal = Palette::default();
        let (_, _, colored) = color_chain(&c, &pal).unwrap();
        assert_eq!(recolor(&colored, &pal, 0), colored);
        assert_eq!(recolor(&colored, &pal, 8), colored);
        assert_eq!(recolor(&recolor(&colored, &pal, 3), &pal, 5), recolor(&colored, &pal, 5));
    }

    #[test]
    fn ear_clipping_covers_area() {
        let g = |x, y| GridPoint { x, y };
        // L-shaped hexagon, area 3
        let ring = [g(0, 0), g(2, 0), g(2, 1), g(1, 1), g(1, 2), g(0, 2)];
        let tris = ear_triangles(&ring);
        let area2: i128 = tris.iter().map(|t| orient(ring[t[0]], ring[t[1]], ring[t[2]])).sum();
        assert_eq!(area2, 6);
        assert_eq!(tris.len(), 4);
    }

    #[test]
    fn samples_lie_inside() {
        let arr = build_arrangement(&unit_square_ccw()).unwrap();
        let face = arr.bounded_faces().next().unwrap().id;
        let mut rng = rand_chacha::ChaCha8Rng::seed_from_u64(1);
        let pts = sample_interior_points(&arr, face, 10, 1e-3, 1000, &mut rng);
        assert_eq!(pts.len(), 10);
        for p in pts {
            assert!(p.x > 0.0 && p.x < 1.0 && p.y > 0.0 && p.y < 1.0);
        }
    }
}
