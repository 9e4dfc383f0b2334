//! Python bindings: `import lifelines`.

use lifelines_core::format::{ColoredDrawingDoc, DrawingDoc};
use lifelines_core::{
    canonicalize, close_curve, color_curve, default_tolerance, make_morph, render_svg, winding_at_point,
    CanonicalCurve, Canvas, MorphDoc, Palette, Point, RawStroke, DEFAULT_FRAMES, DEFAULT_SAMPLES,
};
use pyo3::create_exception;
use pyo3::exceptions::PyValueError;
use pyo3::prelude::*;
use pyo3::types::PyDict;

create_exception!(lifelines, LifelinesError, PyValueError, "Raised with the failing module error name in `.code`.");

fn error(code: &str, message: impl std::fmt::Display) -> PyErr {
    let err = LifelinesError::new_err(format!("{code}: {message}"));
    Python::attach(|py| {
        let _ = err.value(py).setattr("code", code);
    });
    err
}

fn points(p: &[Point]) -> Vec<(f64, f64)> {
    p.iter().map(|q| (q.x, q.y)).collect()
}

/// A validated stroke resampled to equally spaced points.
#[pyclass(frozen, module = "lifelines")]
pub struct Curve {
    inner: CanonicalCurve,
}

#[pymethods]
impl Curve {
    #[new]
    #[pyo3(signature = (points, width = 1.0, height = 1.0, samples = DEFAULT_SAMPLES))]
    fn new(points: Vec<(f64, f64)>, width: f64, height: f64, samples: usize) -> PyResult<Self> {
        let canvas = Canvas::new(width, height).map_err(|e| error(e.code(), &e))?;
        let raw = RawStroke::new(points.into_iter().map(|(x, y)| Point::new(x, y)).collect(), canvas);
        let inner = canonicalize(&raw, samples).map_err(|e| error(e.code(), &e))?;
        Ok(Curve { inner })
    }

    /// Parses a drawing document (`{"points": [[x, y], ...], "canvas": ...}`).
    #[staticmethod]
    #[pyo3(signature = (text, samples = DEFAULT_SAMPLES))]
    fn from_json(text: &str, samples: usize) -> PyResult<Self> {
        let doc = DrawingDoc::parse(text).map_err(|e| error("BadInput", e))?;
        let inner = canonicalize(&doc.to_raw_stroke(), samples).map_err(|e| error(e.code(), &e))?;
        Ok(Curve { inner })
    }

    fn to_json(&self) -> String {
        DrawingDoc::from_curve(&self.inner).to_json()
    }

    #[getter]
    fn points(&self) -> Vec<(f64, f64)> {
        points(self.inner.points())
    }

    #[getter]
    fn canvas(&self) -> (f64, f64) {
        let c = self.inner.canvas();
        (c.w, c.h)
    }

    #[getter]
    fn arc_length(&self) -> f64 {
        self.inner.arc_length()
    }

    fn __len__(&self) -> usize {
        self.inner.len()
    }

    /// Winding number of the closed curve around `(x, y)`.
    fn winding_at(&self, x: f64, y: f64) -> PyResult<i64> {
        winding_at_point(&close_curve(&self.inner), Point::new(x, y)).map_err(|e| error(e.code(), &e))
    }

    /// Splits the drawing into faces and colors them by winding number.
    #[pyo3(signature = (offset = 0))]
    fn color(&self, offset: i64) -> PyResult<Drawing> {
        let doc = color_curve(&self.inner, &Palette::default().with_offset(offset)).map_err(|e| error(e.code(), &e))?;
        Ok(Drawing { doc })
    }

    fn __repr__(&self) -> String {
        let (w, h) = self.canvas();
        format!("Curve({} points, canvas {w}x{h})", self.inner.len())
    }
}

/// A colored drawing.
#[pyclass(frozen, module = "lifelines")]
pub struct Drawing {
    doc: ColoredDrawingDoc,
}

#[pymethods]
impl Drawing {
    /// Faces as dicts with `winding`, `color`, `rings` and `unbounded`.
    #[getter]
    fn faces<'py>(&self, py: Python<'py>) -> PyResult<Vec<Bound<'py, PyDict>>> {
        self.doc
            .faces
            .iter()
            .map(|f| {
                let d = PyDict::new(py);
                d.set_item("winding", f.winding)?;
                d.set_item("color", f.color.hex())?;
                let rings: Vec<Vec<(f64, f64)>> =
                    f.rings.iter().map(|r| r.iter().map(|p| (p[0], p[1])).collect()).collect();
                d.set_item("rings", rings)?;
                d.set_item("unbounded", f.unbounded)?;
                Ok(d)
            })
            .collect()
    }

    #[getter]
    fn max_winding(&self) -> u64 {
        self.doc.faces.iter().map(|f| f.winding.unsigned_abs()).max().unwrap_or(0)
    }

    #[pyo3(signature = (width = 800))]
    fn svg(&self, width: u32) -> String {
        render_svg(&self.doc, width)
    }

    fn to_json(&self) -> String {
        serde_json::to_string(&self.doc).expect("documents serialize")
    }
}

/// Discrete Fréchet distance and an optimal coupling as `(i, j)` index pairs.
#[pyfunction]
fn discrete_frechet(a: &Curve, b: &Curve) -> PyResult<(f64, Vec<(usize, usize)>)> {
    let r = lifelines_core::discrete_frechet(a.inner.points(), b.inner.points()).map_err(|e| error(e.code(), &e))?;
    Ok((r.distance, r.coupling.0))
}

/// Continuous Fréchet distance to within `tol`.
#[pyfunction]
#[pyo3(signature = (a, b, tol = None))]
fn continuous_frechet(a: &Curve, b: &Curve, tol: Option<f64>) -> PyResult<f64> {
    let tol = tol.unwrap_or_else(|| default_tolerance(a.inner.canvas()));
    lifelines_core::continuous_frechet(a.inner.points(), b.inner.points(), tol).map_err(|e| error(e.code(), &e))
}

/// Morph `a` into `b`. Returns `(delta, frames)` where each frame is
/// `(t, points, drawing)` and `drawing` is None if the frame could not be colored.
#[pyfunction]
#[pyo3(signature = (a, b, frames = DEFAULT_FRAMES, offset = 0))]
fn morph(a: &Curve, b: &Curve, frames: usize, offset: i64) -> PyResult<(f64, Vec<(f64, Vec<(f64, f64)>, Option<Drawing>)>)> {
    let m = make_morph(&a.inner, &b.inner, frames, &Palette::default().with_offset(offset))
        .map_err(|e| error(e.code(), &e))?;
    let doc = MorphDoc::new(&m, a.inner.canvas(), offset);
    let out = doc
        .frames
        .into_iter()
        .map(|f| {
            let pts = f.drawing.points.iter().map(|p| (p[0], p[1])).collect();
            let drawing = f.error.is_none().then_some(Drawing { doc: f.drawing });
            (f.t, pts, drawing)
        })
        .collect();
    Ok((doc.delta, out))
}

/// Append-only drawing store, on disk when given a path.
#[pyclass(module = "lifelines")]
pub struct Gallery {
    store: lifelines_core::GalleryStore,
}

#[pymethods]
impl Gallery {
    #[new]
    #[pyo3(signature = (path = None))]
    fn new(path: Option<std::path::PathBuf>) -> PyResult<Self> {
        let store = match path {
            Some(p) => lifelines_core::GalleryStore::open(p).map_err(|e| error(e.code(), &e))?,
            None => lifelines_core::GalleryStore::in_memory(),
        };
        Ok(Gallery { store })
    }

    /// Stores a curve and returns its id.
    fn add(&mut self, curve: &Curve) -> PyResult<String> {
        let r = self.store.add_drawing(curve.inner.clone()).map_err(|e| error(e.code(), &e))?;
        Ok(r.id.clone())
    }

    fn get(&self, id: &str) -> PyResult<Curve> {
        self.store
            .get(id)
            .map(|r| Curve { inner: r.curve.clone() })
            .ok_or_else(|| error("NotFound", format!("no drawing with id {id:?}")))
    }

    /// A page of `(id, created_at, curve)` tuples in insertion order.
    #[pyo3(signature = (offset = 0, limit = 50))]
    fn list(&self, offset: usize, limit: usize) -> PyResult<Vec<(String, String, Curve)>> {
        let page = self.store.list_drawings(offset, limit).map_err(|e| error(e.code(), &e))?;
        Ok(page
            .iter()
            .map(|r| {
                let doc = r.to_doc();
                (r.id.clone(), doc.created_at.unwrap_or_default(), Curve { inner: r.curve.clone() })
            })
            .collect())
    }

    /// The `k` stored curves closest to `query` as `(id, distance)`, nearest first.
    #[pyo3(signature = (query, k = 10))]
    fn nearest(&self, py: Python<'_>, query: &Curve, k: usize) -> Vec<(String, f64)> {
        let store = &self.store;
        py.detach(|| {
            store
                .nearest(&query.inner, k)
                .into_iter()
                .map(|n| (n.record.id.clone(), n.distance))
                .collect()
        })
    }

    fn stats<'py>(&self, py: Python<'py>) -> PyResult<Bound<'py, PyDict>> {
        let s = self.store.stats();
        let d = PyDict::new(py);
        d.set_item("count", s.count)?;
        d.set_item("max_winding_histogram", s.max_winding_histogram)?;
        d.set_item("mean_arc_length", s.mean_arc_length)?;
        Ok(d)
    }

    fn sync(&mut self) -> PyResult<()> {
        self.store.sync().map_err(|e| error(e.code(), &e))
    }

    fn __len__(&self) -> usize {
        self.store.len()
    }
}

#[pymodule]
fn lifelines(m: &Bound<'_, PyModule>) -> PyResult<()> {
    m.add("LifelinesError", m.py().get_type::<LifelinesError>())?;
    m.add("DEFAULT_SAMPLES", DEFAULT_SAMPLES)?;
    m.add_class::<Curve>()?;
    m.add_class::<Drawing>()?;
    m.add_class::<Gallery>()?;
    m.add_function(wrap_pyfunction!(discrete_frechet, m)?)?;
    m.add_function(wrap_pyfunction!(continuous_frechet, m)?)?;
    m.add_function(wrap_pyfunction!(morph, m)?)?;
    Ok(())
}
