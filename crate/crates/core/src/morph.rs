//! Morphing between two drawings along an optimal discrete Fréchet coupling.
//!
//! Coupled samples are interpolated linearly; each intermediate frame is a
//! drawing in its own right and is colored from scratch, so windings may jump
//! as loops open and close during the morph.

use rayon::prelude::*;
use thiserror::Error;

use crate::arrangement::ArrangementError;
use crate::curve::{close_points, CanonicalCurve, Point};
use crate::frechet::{discrete_frechet, Coupling};
use crate::winding::{color_chain, ColoredFace, Palette};

pub const DEFAULT_FRAMES: usize = 24;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum MorphError {
    #[error("a morph needs at least two frames, got {0}")]
    TooFewFrames(usize),
    #[error("both drawings must share the same canvas")]
    CanvasMismatch,
}

impl MorphError {
    pub fn code(&self) -> &'static str {
        match self {
            MorphError::TooFewFrames(_) => "TooFewFrames",
            MorphError::CanvasMismatch => "CanvasMismatch",
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct MorphFrame {
    pub t: f64,
    /// One point per coupling pair.
    pub curve: Vec<Point>,
    /// Colored faces, or the arrangement error for this frame.
    pub colored: Result<Vec<ColoredFace>, ArrangementError>,
}

#[derive(Debug, Clone, PartialEq)]
pub struct Morph {
    /// Discrete Fréchet distance between the two drawings.
    pub delta: f64,
    pub coupling: Coupling,
    pub frames: Vec<MorphFrame>,
}

/// Point list of the frame at `t` along `coupling`.
pub fn interpolate(a: &[Point], b: &[Point], coupling: &Coupling, t: f64) -> Vec<Point> {
    coupling
        .pairs()
        .iter()
        .map(|&(i, j)| {
            // exact endpoints at t = 0 and t = 1
            if t == 0.0 {
                a[i]
            } else if t == 1.0 {
                b[j]
            } else {
                Point::new((1.0 - t) * a[i].x + t * b[j].x, (1.0 - t) * a[i].y + t * b[j].y)
            }
        })
        .collect()
}

/// Drops consecutive repeated points.
pub fn collapse_duplicates(points: &[Point]) -> Vec<Point> {
    let mut out = points.to_vec();
    out.dedup();
    out
}

/// Builds `frames` frames at `t = k / (frames - 1)`, each closed, arranged and colored.
pub fn make_morph(
    a: &CanonicalCurve,
    b: &CanonicalCurve,
    frames: usize,
    palette: &Palette,
) -> Result<Morph, MorphError> {
    if frames < 2 {
        return Err(MorphError::TooFewFrames(frames));
    }
    if a.canvas() != b.canvas() {
        return Err(MorphError::CanvasMismatch);
    }
    let result = discrete_frechet(a.points(), b.points()).expect("canonical curves are nonempty");
    let canvas = a.canvas();
    let coupling = result.coupling;

    let frames: Vec<MorphFrame> = (0..frames)
        .into_par_iter()
        .map(|k| {
            let t = k as f64 / (frames - 1) as f64;
            let curve = interpolate(a.points(), b.points(), &coupling, t);
            let collapsed = collapse_duplicates(&curve);
            let colored = if collapsed.len() < 2 {
                Ok(Vec::new())
            } else {
                let chain = close_points(&collapsed, canvas);
                color_chain(&chain, palette).map(|(_, _, colored)| colored)
            };
            MorphFrame { t, curve, colored }
        })
        .collect();

    Ok(Morph {
        delta: result.distance,
        coupling,
        frames,
    })
}
