//! Freehand left-to-right drawings, colored by winding number.
//!
//! A stroke is validated and resampled into a [`CanonicalCurve`], closed
//! below the canvas into a [`ClosedChain`], and cut into faces by its
//! self-intersections ([`Arrangement`]). Each face gets the winding number of
//! the closed curve around it, and the winding picks the face's color from a
//! cyclic [`Palette`]. Drawings are compared with the Fréchet distance,
//! morphed into each other along an optimal coupling, and stored in an
//! append-only [`GalleryStore`].

pub mod arrangement;
pub mod curve;
pub mod format;
pub mod frechet;
pub mod gallery;
pub mod morph;
pub mod render;
pub mod synth;
pub mod winding;

pub use arrangement::{build_arrangement, find_intersections, Arrangement, ArrangementError};
pub use curve::{
    canonicalize, close_curve, resample, validate_stroke, CanonicalCurve, Canvas, ClosedChain,
    CurveError, Point, Polyline, RawStroke, DEFAULT_SAMPLES,
};
pub use format::{ColoredDrawingDoc, DrawingDoc, MorphDoc};
pub use frechet::{
    continuous_frechet, discrete_frechet, frechet_decision, Coupling, FrechetError, FrechetResult,
};
pub use gallery::{GalleryError, GalleryRecord, GalleryStats, GalleryStore};
pub use morph::{make_morph, Morph, MorphError, MorphFrame, DEFAULT_FRAMES};
pub use render::render_svg;
pub use winding::{
    color_faces, compute_winding, recolor, winding_at_point, ColoredFace, Palette, Rgb,
    WindingError, WindingMap,
};

/// Default bisection tolerance for the continuous Fréchet distance on `canvas`.
pub fn default_tolerance(canvas: Canvas) -> f64 {
    1e-6 * canvas.diagonal()
}

/// Runs the whole coloring pipeline on a canonical curve.
pub fn color_curve(
    curve: &CanonicalCurve,
    palette: &Palette,
) -> Result<ColoredDrawingDoc, ArrangementError> {
    let (_, _, colored) = winding::color_chain(&close_curve(curve), palette)?;
    Ok(ColoredDrawingDoc::new(curve.points(), curve.canvas(), &colored, palette.offset))
}
