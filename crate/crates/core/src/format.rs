//! Text interchange formats shared by the CLI, the service and the gallery log.
//!
//! Drawings are JSON objects `{"id", "canvas": {"w", "h"}, "points": [[x, y], ...],
//! "created_at"}`; `id` and `created_at` are optional on input. Colored
//! drawings add a `faces` list where each face carries its `winding`, a
//! `#rrggbb` `color` and its coordinate `rings`.

use serde::{Deserialize, Serialize};

use crate::curve::{CanonicalCurve, Canvas, Point, RawStroke};
use crate::morph::Morph;
use crate::winding::{ColoredFace, Rgb};

fn to_pairs(points: &[Point]) -> Vec<[f64; 2]> {
    points.iter().map(|&p| p.into()).collect()
}

fn from_pairs(pairs: &[[f64; 2]]) -> Vec<Point> {
    pairs.iter().map(|&p| p.into()).collect()
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct DrawingDoc {
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub id: Option<String>,
    #[serde(default)]
    pub canvas: Canvas,
    pub points: Vec<[f64; 2]>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub created_at: Option<String>,
}

impl DrawingDoc {
    pub fn from_points(points: &[Point], canvas: Canvas) -> Self {
        DrawingDoc {
            id: None,
            canvas,
            points: to_pairs(points),
            created_at: None,
        }
    }

    pub fn from_curve(curve: &CanonicalCurve) -> Self {
        Self::from_points(curve.points(), curve.canvas())
    }

    pub fn points(&self) -> Vec<Point> {
        from_pairs(&self.points)
    }

    pub fn to_raw_stroke(&self) -> RawStroke {
        RawStroke::new(self.points(), self.canvas)
    }

    pub fn parse(text: &str) -> Result<Self, serde_json::Error> {
        serde_json::from_str(text)
    }

    pub fn to_json(&self) -> String {
        serde_json::to_string(self).expect("drawing documents always serialize")
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct FaceDoc {
    pub winding: i64,
    pub color: Rgb,
    pub rings: Vec<Vec<[f64; 2]>>,
    #[serde(default, skip_serializing_if = "std::ops::Not::not")]
    pub unbounded: bool,
}

impl From<&ColoredFace> for FaceDoc {
    fn from(f: &ColoredFace) -> Self {
        FaceDoc {
            winding: f.winding,
            color: f.color,
            rings: f.rings.iter().map(|r| to_pairs(r)).collect(),
            unbounded: f.unbounded,
        }
    }
}

/// A drawing together with its colored faces.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ColoredDrawingDoc {
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub id: Option<String>,
    pub canvas: Canvas,
    pub points: Vec<[f64; 2]>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub created_at: Option<String>,
    pub palette_offset: i64,
    pub faces: Vec<FaceDoc>,
}

impl ColoredDrawingDoc {
    pub fn new(points: &[Point], canvas: Canvas, faces: &[ColoredFace], palette_offset: i64) -> Self {
        ColoredDrawingDoc {
            id: None,
            canvas,
            points: to_pairs(points),
            created_at: None,
            palette_offset,
            faces: faces.iter().map(FaceDoc::from).collect(),
        }
    }

    pub fn with_record(mut self, drawing: &DrawingDoc) -> Self {
        self.id = drawing.id.clone();
        self.created_at = drawing.created_at.clone();
        self
    }

    pub fn bounded_faces(&self) -> impl Iterator<Item = &FaceDoc> {
        self.faces.iter().filter(|f| !f.unbounded)
    }

    pub fn background(&self) -> Option<Rgb> {
        self.faces.iter().find(|f| f.unbounded).map(|f| f.color)
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct MorphFrameDoc {
    pub t: f64,
    #[serde(flatten)]
    pub drawing: ColoredDrawingDoc,
    /// Error code when this frame's arrangement could not be built.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub error: Option<String>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct MorphDoc {
    pub delta: f64,
    pub frames: Vec<MorphFrameDoc>,
}

impl MorphDoc {
    pub fn new(morph: &Morph, canvas: Canvas, palette_offset: i64) -> Self {
        let frames = morph
            .frames
            .iter()
            .map(|frame| {
                let (faces, error) = match &frame.colored {
                    Ok(faces) => (faces.as_slice(), None),
                    Err(e) => (&[][..], Some(e.code().to_string())),
                };
                MorphFrameDoc {
                    t: frame.t,
                    drawing: ColoredDrawingDoc::new(&frame.curve, canvas, faces, palette_offset),
                    error,
                }
            })
            .collect();
        MorphDoc {
            delta: morph.delta,
            frames,
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn parse_minimal_drawing() {
        let doc = DrawingDoc::parse(r#"{"points": [[0.1, 0.5], [0.9, 0.5]]}"#).unwrap();
        assert_eq!(doc.canvas, Canvas::default());
        assert_eq!(doc.id, None);
        assert_eq!(doc.points(), vec![Point::new(0.1, 0.5), Point::new(0.9, 0.5)]);
    }

    #[test]
    fn drawing_json_round_trip() {
        let doc = DrawingDoc {
            id: Some("000007".into()),
            canvas: Canvas { w: 2.0, h: 1.5 },
            points: vec![[0.0, 0.1], [0.123456789012345, 1.0 / 3.0], [2.0, 0.7]],
            created_at: Some("2025-01-20T10:00:00.000000Z".into()),
        };
        let text = doc.to_json();
        assert!(text.contains(r#""canvas":{"w":2.0,"h":1.5}"#));
        assert_eq!(DrawingDoc::parse(&text).unwrap(), doc);
    }

    #[test]
    fn face_doc_uses_hex_colors() {
        let face = FaceDoc {
            winding: -2,
            color: Rgb(255, 0, 16),
            rings: vec![vec![[0.0, 0.0], [1.0, 0.0], [0.0, 1.0]]],
            unbounded: false,
        };
        let text = serde_json::to_string(&face).unwrap();
        assert_eq!(text, r##"{"winding":-2,"color":"#ff0010","rings":[[[0.0,0.0],[1.0,0.0],[0.0,1.0]]]}"##);
    }
}
