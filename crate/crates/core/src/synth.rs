//! Synthetic hand-drawn-looking strokes, for tests, benchmarks and seeding
//! a gallery.
//!
//! Two families are mixed: trochoid-like strokes (a drifting baseline with a
//! rotating offset, which produces loops and hence windings above one) and
//! heading random walks with occasional curls.

use std::f64::consts::TAU;

use rand::Rng;
use rand_distr::StandardNormal;

use crate::curve::{canonicalize, CanonicalCurve, Canvas, Point, RawStroke, DEFAULT_SAMPLES};

fn normal<R: Rng>(rng: &mut R) -> f64 {
    rng.sample(StandardNormal)
}

/// Fraction of the canvas left empty around generated strokes.
const MARGIN: f64 = 0.02;

fn trochoid<R: Rng>(rng: &mut R, n: usize) -> Vec<Point> {
    let y0 = rng.random_range(0.2..0.8);
    let y1 = rng.random_range(0.2..0.8);
    let waves: Vec<(f64, f64, f64)> = (0..rng.random_range(1..4))
        .map(|_| (rng.random_range(0.02..0.15), rng.random_range(0.5..3.0), rng.random_range(0.0..TAU)))
        .collect();
    let loops: Vec<(f64, f64, f64)> = (0..rng.random_range(0..3))
        .map(|_| {
            (
                rng.random_range(0.02..0.12),
                TAU * rng.random_range(2.0..10.0) * if rng.random_bool(0.5) { 1.0 } else { -1.0 },
                rng.random_range(0.0..TAU),
            )
        })
        .collect();
    (0..n)
        .map(|k| {
            let s = k as f64 / (n - 1) as f64;
            let mut x = s;
            let mut y = y0 + (y1 - y0) * s;
            for &(amp, freq, phase) in &waves {
                y += amp * (TAU * freq * s + phase).sin();
            }
            for &(r, omega, phase) in &loops {
                x += r * (omega * s + phase).cos();
                y += r * (omega * s + phase).sin();
            }
            Point::new(x + 0.002 * normal(rng), y + 0.002 * normal(rng))
        })
        .collect()
}

fn random_walk<R: Rng>(rng: &mut R, n: usize) -> Vec<Point> {
    let step = rng.random_range(1.5..3.5) / n as f64;
    let mut p = Point::new(0.0, rng.random_range(0.2..0.8));
    let mut heading: f64 = 0.0;
    let mut curl = 0.0;
    let mut out = Vec::with_capacity(n);
    for _ in 0..n {
        out.push(p);
        if curl == 0.0 && rng.random_bool(0.02) {
            curl = rng.random_range(0.15..0.4) * if rng.random_bool(0.5) { 1.0 } else { -1.0 };
        } else if curl != 0.0 && rng.random_bool(0.05) {
            curl = 0.0;
        }
        // drift back towards the right when not curling
        let pull = if curl == 0.0 { -0.08 * heading.sin() } else { 0.0 };
        heading += curl + pull + 0.25 * normal(rng);
        p = Point::new(p.x + step * heading.cos(), p.y + step * heading.sin());
    }
    out
}

/// Maps the points affinely into the canvas with a small margin.
fn fit(points: &mut [Point], canvas: Canvas) {
    let (mut lo, mut hi) = (points[0], points[0]);
    for p in points.iter() {
        lo = Point::new(lo.x.min(p.x), lo.y.min(p.y));
        hi = Point::new(hi.x.max(p.x), hi.y.max(p.y));
    }
    let span = |a: f64, b: f64| if b > a { b - a } else { 1.0 };
    let (sx, sy) = (span(lo.x, hi.x), span(lo.y, hi.y));
    for p in points.iter_mut() {
        p.x = canvas.w * (MARGIN + (1.0 - 2.0 * MARGIN) * (p.x - lo.x) / sx);
        p.y = canvas.h * (MARGIN + (1.0 - 2.0 * MARGIN) * (p.y - lo.y) / sy);
    }
}

/// A raw stroke with `n` points that passes validation.
pub fn random_stroke<R: Rng>(rng: &mut R, n: usize, canvas: Canvas) -> RawStroke {
    let n = n.max(2);
    loop {
        let mut points = if rng.random_bool(0.5) {
            trochoid(rng, n)
        } else {
            random_walk(rng, n)
        };
        fit(&mut points, canvas);
        if points[n - 1].x > points[0].x {
            return RawStroke::new(points, canvas);
        }
    }
}

/// A canonical curve on the unit canvas from a stroke of 64 to 512 points.
pub fn random_canonical<R: Rng>(rng: &mut R) -> CanonicalCurve {
    let n = rng.random_range(64..=512);
    let stroke = random_stroke(rng, n, Canvas::default());
    canonicalize(&stroke, DEFAULT_SAMPLES).expect("generated strokes are valid")
}

#[cfg(test)]
mod tests {
    use super::*;
    use rand::SeedableRng;

    #[test]
    fn strokes_validate() {
        let mut rng = rand_chacha::ChaCha8Rng::seed_from_u64(3);
        for _ in 0..200 {
            let c = random_canonical(&mut rng);
            assert_eq!(c.len(), DEFAULT_SAMPLES);
            assert_eq!(c.first().x, 0.0);
            assert_eq!(c.last().x, 1.0);
        }
    }
}
