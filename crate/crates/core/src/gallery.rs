//! Append-only drawing gallery with an in-memory summary index.
//!
//! The log is a text file with one drawing per line in the interchange
//! format. Opening a gallery replays the log; the index (record list plus
//! per-record summaries) is always the fold of the log. A trailing line cut
//! short by a crash is dropped on open.

use std::collections::BTreeMap;
use std::fs::{File, OpenOptions};
use std::io::{BufRead, BufReader, Read, Seek, SeekFrom, Write};
use std::path::{Path, PathBuf};

use chrono::{DateTime, SecondsFormat, SubsecRound, Utc};
use rayon::prelude::*;
use thiserror::Error;

use crate::arrangement::build_arrangement;
use crate::curve::{close_curve, CanonicalCurve, CurveError, Point};
use crate::format::DrawingDoc;
use crate::frechet::{discrete_frechet_bounded, endpoint_bound};
use crate::winding::compute_winding;

/// Largest page `list_drawings` hands out.
pub const MAX_PAGE: usize = 500;

/// Bounds are scaled down by this factor before pruning so that rounding in
/// the bound can never cut a record whose true distance ties the k-th best.
const BOUND_SLACK: f64 = 1.0 - 1e-12;

#[derive(Debug, Error)]
pub enum GalleryError {
    #[error("gallery storage failure: {0}")]
    Storage(#[from] std::io::Error),
    #[error("gallery log line {line} is corrupt: {reason}")]
    Corrupt { line: usize, reason: String },
    #[error("page limit must be in 1..={MAX_PAGE}, got {0}")]
    BadPage(usize),
}

impl GalleryError {
    pub fn code(&self) -> &'static str {
        match self {
            GalleryError::Storage(_) | GalleryError::Corrupt { .. } => "StorageFailure",
            GalleryError::BadPage(_) => "BadPage",
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct BoundingBox {
    pub min: Point,
    pub max: Point,
}

impl BoundingBox {
    pub fn of(points: &[Point]) -> Self {
        let mut min = Point::new(f64::INFINITY, f64::INFINITY);
        let mut max = Point::new(f64::NEG_INFINITY, f64::NEG_INFINITY);
        for p in points {
            min.x = min.x.min(p.x);
            min.y = min.y.min(p.y);
            max.x = max.x.max(p.x);
            max.y = max.y.max(p.y);
        }
        BoundingBox { min, max }
    }

    /// Lower bound on the Fréchet distance between curves with these boxes.
    ///
    /// The sample realizing a curve's extreme coordinate must be matched to
    /// some sample of the other curve, which cannot lie beyond that curve's
    /// own extreme, so every side offset bounds the distance from below.
    pub fn separation(&self, other: &BoundingBox) -> f64 {
        (self.min.x - other.min.x)
            .abs()
            .max((self.max.x - other.max.x).abs())
            .max((self.min.y - other.min.y).abs())
            .max((self.max.y - other.max.y).abs())
    }
}

/// Cached per-record facts, recomputable from the curve.
#[derive(Debug, Clone, PartialEq)]
pub struct Summary {
    pub first: Point,
    pub last: Point,
    pub bbox: BoundingBox,
    pub arc_length: f64,
    /// Face count per winding number; `None` when the arrangement is degenerate.
    pub winding_histogram: Option<BTreeMap<i64, usize>>,
}

impl Summary {
    pub fn compute(curve: &CanonicalCurve) -> Self {
        let winding_histogram = build_arrangement(&close_curve(curve)).ok().map(|arr| {
            let windings = compute_winding(&arr);
            let mut hist = BTreeMap::new();
            for f in arr.bounded_faces() {
                *hist.entry(windings.get(f.id)).or_insert(0) += 1;
            }
            hist
        });
        Summary {
            first: curve.first(),
            last: curve.last(),
            bbox: BoundingBox::of(curve.points()),
            arc_length: curve.arc_length(),
            winding_histogram,
        }
    }

    pub fn max_abs_winding(&self) -> Option<u64> {
        self.winding_histogram
            .as_ref()
            .map(|h| h.keys().map(|w| w.unsigned_abs()).max().unwrap_or(0))
    }

    /// Lower bound on the discrete Fréchet distance between `query` and this curve.
    pub fn lower_bound(&self, query: &[Point], query_box: &BoundingBox) -> f64 {
        let ends = query[0]
            .distance(&self.first)
            .max(query[query.len() - 1].distance(&self.last));
        ends.max(self.bbox.separation(query_box)) * BOUND_SLACK
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct GalleryRecord {
    pub id: String,
    pub curve: CanonicalCurve,
    pub created_at: DateTime<Utc>,
    pub summary: Summary,
}

impl GalleryRecord {
    pub fn to_doc(&self) -> DrawingDoc {
        DrawingDoc {
            id: Some(self.id.clone()),
            created_at: Some(self.created_at.to_rfc3339_opts(SecondsFormat::Micros, true)),
            ..DrawingDoc::from_curve(&self.curve)
        }
    }

    fn from_doc(doc: DrawingDoc, line: usize) -> Result<Self, GalleryError> {
        let corrupt = |reason: String| GalleryError::Corrupt { line, reason };
        let id = doc.id.clone().ok_or_else(|| corrupt("missing id".into()))?;
        let created_at = doc
            .created_at
            .as_deref()
            .ok_or_else(|| corrupt("missing created_at".into()))
            .and_then(|s| {
                DateTime::parse_from_rfc3339(s).map_err(|e| corrupt(format!("created_at: {e}")))
            })?
            .with_timezone(&Utc);
        let curve = CanonicalCurve::from_stored(doc.points(), doc.canvas)
            .map_err(|e: CurveError| corrupt(e.to_string()))?;
        let summary = Summary::compute(&curve);
        Ok(GalleryRecord {
            id,
            curve,
            created_at,
            summary,
        })
    }
}

fn format_id(n: u64) -> String {
    format!("{n:06}")
}

#[derive(Debug, Clone, PartialEq)]
pub struct Neighbor<'a> {
    pub record: &'a GalleryRecord,
    pub distance: f64,
}

#[derive(Debug, Clone, PartialEq)]
pub struct GalleryStats {
    pub count: usize,
    /// Number of drawings per maximum absolute face winding.
    pub max_winding_histogram: BTreeMap<u64, usize>,
    pub mean_arc_length: f64,
}

/// Single-writer drawing store. Wrap in a lock for shared use.
#[derive(Debug)]
pub struct GalleryStore {
    path: Option<PathBuf>,
    log: Option<File>,
    records: Vec<GalleryRecord>,
    next_id: u64,
}

impl GalleryStore {
    /// A store that keeps everything in memory.
    pub fn in_memory() -> Self {
        GalleryStore {
            path: None,
            log: None,
            records: Vec::new(),
            next_id: 1,
        }
    }

    /// Opens (creating if needed) the log at `path` and replays it.
    pub fn open(path: impl AsRef<Path>) -> Result<Self, GalleryError> {
        let path = path.as_ref().to_path_buf();
        let mut file = OpenOptions::new()
            .read(true)
            .append(true)
            .create(true)
            .open(&path)?;

        let mut text = String::new();
        file.read_to_string(&mut text)?;
        let complete = match text.rfind('\n') {
            Some(end) => end + 1,
            None => 0,
        };
        if complete < text.len() {
            log::warn!(
                "dropping {} bytes of incomplete trailing record in {}",
                text.len() - complete,
                path.display()
            );
            file.set_len(complete as u64)?;
            file.seek(SeekFrom::End(0))?;
        }

        let docs = BufReader::new(text[..complete].as_bytes())
            .lines()
            .enumerate()
            .filter(|(_, l)| l.as_ref().map(|l| !l.trim().is_empty()).unwrap_or(true))
            .map(|(k, line)| {
                let line_no = k + 1;
                let line = line?;
                DrawingDoc::parse(&line)
                    .map(|d| (line_no, d))
                    .map_err(|e| GalleryError::Corrupt {
                        line: line_no,
                        reason: e.to_string(),
                    })
            })
            .collect::<Result<Vec<_>, _>>()?;
        let records = docs
            .into_par_iter()
            .map(|(line, doc)| GalleryRecord::from_doc(doc, line))
            .collect::<Result<Vec<_>, _>>()?;

        let mut next_id = 1;
        for (k, r) in records.iter().enumerate() {
            let n: u64 = r.id.parse().map_err(|_| GalleryError::Corrupt {
                line: k + 1,
                reason: format!("id {:?} is not a counter", r.id),
            })?;
            if n < next_id {
                return Err(GalleryError::Corrupt {
                    line: k + 1,
                    reason: format!("id {:?} is not increasing", r.id),
                });
            }
            next_id = n + 1;
        }

        Ok(GalleryStore {
            path: Some(path),
            log: Some(file),
            records,
            next_id,
        })
    }

    pub fn path(&self) -> Option<&Path> {
        self.path.as_deref()
    }

    pub fn len(&self) -> usize {
        self.records.len()
    }

    pub fn is_empty(&self) -> bool {
        self.records.is_empty()
    }

    pub fn records(&self) -> &[GalleryRecord] {
        &self.records
    }

    pub fn get(&self, id: &str) -> Option<&GalleryRecord> {
        // ids are increasing, so the record list is sorted by id
        self.records
            .binary_search_by(|r| (r.id.len(), r.id.as_str()).cmp(&(id.len(), id)))
            .ok()
            .map(|k| &self.records[k])
    }

    fn append(&mut self, batch: Vec<GalleryRecord>) -> Result<(), GalleryError> {
        if let Some(log) = self.log.as_mut() {
            let mut text = String::new();
            for r in &batch {
                text.push_str(&r.to_doc().to_json());
                text.push('\n');
            }
            log.write_all(text.as_bytes())?;
            log.sync_data()?;
        }
        self.next_id += batch.len() as u64;
        self.records.extend(batch);
        Ok(())
    }

    /// Appends a drawing; it is on disk when this returns.
    pub fn add_drawing(&mut self, curve: CanonicalCurve) -> Result<&GalleryRecord, GalleryError> {
        self.add_drawing_at(curve, Utc::now())
    }

    pub fn add_drawing_at(
        &mut self,
        curve: CanonicalCurve,
        created_at: DateTime<Utc>,
    ) -> Result<&GalleryRecord, GalleryError> {
        let record = GalleryRecord {
            id: format_id(self.next_id),
            summary: Summary::compute(&curve),
            curve,
            created_at: created_at.trunc_subsecs(6),
        };
        self.append(vec![record])?;
        Ok(self.records.last().unwrap())
    }

    /// Appends many drawings with a single sync; returns their ids.
    pub fn add_drawings(&mut self, curves: Vec<CanonicalCurve>) -> Result<Vec<String>, GalleryError> {
        let now = Utc::now().trunc_subsecs(6);
        let first = self.next_id;
        let batch: Vec<GalleryRecord> = curves
            .into_par_iter()
            .enumerate()
            .map(|(k, curve)| GalleryRecord {
                id: format_id(first + k as u64),
                summary: Summary::compute(&curve),
                curve,
                created_at: now,
            })
            .collect();
        let ids = batch.iter().map(|r| r.id.clone()).collect();
        self.append(batch)?;
        Ok(ids)
    }

    /// Flushes the log to disk.
    pub fn sync(&mut self) -> Result<(), GalleryError> {
        if let Some(log) = self.log.as_mut() {
            log.flush()?;
            log.sync_all()?;
        }
        Ok(())
    }

    /// Records `offset..offset + limit` in id order.
    pub fn list_drawings(&self, offset: usize, limit: usize) -> Result<&[GalleryRecord], GalleryError> {
        if !(1..=MAX_PAGE).contains(&limit) {
            return Err(GalleryError::BadPage(limit));
        }
        let start = offset.min(self.records.len());
        let end = offset.saturating_add(limit).min(self.records.len());
        Ok(&self.records[start..end])
    }

    /// The `k` records closest to `query` under discrete Fréchet distance,
    /// ascending, ties broken by id.
    ///
    /// Records are visited in order of a cheap lower bound (endpoint
    /// distances and bounding-box offsets). The scan stops once the bound
    /// exceeds the current k-th best distance, and each distance computation
    /// is abandoned as soon as it provably exceeds it.
    pub fn nearest(&self, query: &CanonicalCurve, k: usize) -> Vec<Neighbor<'_>> {
        if k == 0 {
            return Vec::new();
        }
        let q = query.points();
        let q_box = BoundingBox::of(q);
        let mut order: Vec<(f64, usize)> = self
            .records
            .par_iter()
            .enumerate()
            .map(|(idx, r)| (r.summary.lower_bound(q, &q_box), idx))
            .collect();
        order.sort_by(|a, b| a.0.total_cmp(&b.0).then(a.1.cmp(&b.1)));

        // (distance, record index), sorted, at most k long
        let mut best: Vec<(f64, usize)> = Vec::with_capacity(k + 1);
        for (bound, idx) in order {
            let cutoff = if best.len() == k { best[k - 1].0 } else { f64::INFINITY };
            if bound > cutoff {
                break;
            }
            let Some(d) = discrete_frechet_bounded(q, self.records[idx].curve.points(), cutoff) else {
                continue;
            };
            let entry = (d, idx);
            let pos = best.partition_point(|b| b.0 < d || (b.0 == d && b.1 < idx));
            if pos < k {
                best.insert(pos, entry);
                best.truncate(k);
            }
        }
        best.into_iter()
            .map(|(distance, idx)| Neighbor {
                record: &self.records[idx],
                distance,
            })
            .collect()
    }

    pub fn stats(&self) -> GalleryStats {
        let mut hist = BTreeMap::new();
        for r in &self.records {
            if let Some(m) = r.summary.max_abs_winding() {
                *hist.entry(m).or_insert(0) += 1;
            }
        }
        let mean_arc_length = if self.records.is_empty() {
            0.0
        } else {
            self.records.iter().map(|r| r.summary.arc_length).sum::<f64>() / self.records.len() as f64
        };
        GalleryStats {
            count: self.records.len(),
            max_winding_histogram: hist,
            mean_arc_length,
        }
    }
}

/// Lower bounds used by [`GalleryStore::nearest`], exposed for checking.
pub fn lower_bounds(a: &[Point], b: &[Point]) -> (f64, f64) {
    (endpoint_bound(a, b), BoundingBox::of(a).separation(&BoundingBox::of(b)))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::curve::{resample, validate_stroke, Canvas, RawStroke};

    fn canonical(raw: &[(f64, f64)]) -> CanonicalCurve {
        let stroke = RawStroke::new(raw.iter().map(|&(x, y)| Point::new(x, y)).collect(), Canvas::default());
        resample(&validate_stroke(&stroke).unwrap(), 32).unwrap()
    }

    fn flat(y: f64) -> CanonicalCurve {
        canonical(&[(0.0, y), (1.0, y)])
    }

    #[test]
    fn ids_count_up_from_one() {
        let mut store = GalleryStore::in_memory();
        assert_eq!(store.add_drawing(flat(0.1)).unwrap().id, "000001");
        assert_eq!(store.add_drawing(flat(0.2)).unwrap().id, "000002");
        assert_eq!(store.get("000002").unwrap().curve, flat(0.2));
        assert!(store.get("000003").is_none());
        assert_eq!(format_id(1_234_567), "1234567");
    }

    #[test]
    fn pagination() {
        let mut store = GalleryStore::in_memory();
        assert!(store.list_drawings(0, 10).unwrap().is_empty());
        for y in [0.1, 0.2, 0.3] {
            store.add_drawing(flat(y)).unwrap();
        }
        let page = store.list_drawings(1, 1).unwrap();
        assert_eq!(page.len(), 1);
        assert_eq!(page[0].id, "000002");
        assert!(store.list_drawings(5, 10).unwrap().is_empty());
        assert!(matches!(store.list_drawings(0, 0), Err(GalleryError::BadPage(0))));
        assert!(matches!(store.list_drawings(0, 501), Err(GalleryError::BadPage(501))));
    }

    #[test]
    fn nearest_examples() {
        let mut store = GalleryStore::in_memory();
        let a = canonical(&[(0.0, 0.2), (0.5, 0.8), (1.0, 0.3)]);
        store.add_drawing(a.clone()).unwrap();
        store.add_drawing(a.clone()).unwrap();
        let hits = store.nearest(&a, 2);
        assert_eq!(hits.len(), 2);
        assert_eq!((hits[0].record.id.as_str(), hits[0].distance), ("000001", 0.0));
        assert_eq!((hits[1].record.id.as_str(), hits[1].distance), ("000002", 0.0));

        let mut store = GalleryStore::in_memory();
        for y in [0.3, 0.1, 0.2] {
            store.add_drawing(flat(y)).unwrap();
        }
        let hits = store.nearest(&flat(0.0), 3);
        let ids: Vec<_> = hits.iter().map(|h| h.record.id.as_str()).collect();
        assert_eq!(ids, ["000002", "000003", "000001"]);
        let dists: Vec<_> = hits.iter().map(|h| h.distance).collect();
        assert_eq!(dists, [0.1, 0.2, 0.3]);
    }

    #[test]
    fn stats_examples() {
        let mut store = GalleryStore::in_memory();
        let s = store.stats();
        assert_eq!(s.count, 0);
        assert!(s.max_winding_histogram.is_empty());

        store.add_drawing(canonical(&[(0.0, 0.4), (0.5, 0.9), (1.0, 0.4)])).unwrap();
        let s = store.stats();
        assert_eq!(s.count, 1);
        assert_eq!(s.max_winding_histogram, BTreeMap::from([(1, 1)]));
    }

    #[test]
    fn reload_reproduces_index() {
        let dir = tempfile::tempdir().unwrap();
        let path = dir.path().join("gallery.log");
        let mut store = GalleryStore::open(&path).unwrap();
        store.add_drawing(flat(0.25)).unwrap();
        store.add_drawings(vec![flat(0.5), canonical(&[(0.0, 0.1), (0.4, 0.9), (1.0, 0.2)])]).unwrap();
        let before = store.records().to_vec();
        drop(store);

        let mut store = GalleryStore::open(&path).unwrap();
        assert_eq!(store.records(), before.as_slice());
        assert_eq!(store.add_drawing(flat(0.75)).unwrap().id, "000004");
    }

    #[test]
    fn torn_tail_is_dropped() {
        let dir = tempfile::tempdir().unwrap();
        let path = dir.path().join("gallery.log");
        let mut store = GalleryStore::open(&path).unwrap();
        store.add_drawing(flat(0.25)).unwrap();
        drop(store);
        let mut f = OpenOptions::new().append(true).open(&path).unwrap();
        f.write_all(br#"{"id":"000002","canvas":{"w":1.0"#).unwrap();
        drop(f);

        let mut store = GalleryStore::open(&path).unwrap();
        assert_eq!(store.len(), 1);
        assert_eq!(store.add_drawing(flat(0.5)).unwrap().id, "000002");
        drop(store);
        assert_eq!(GalleryStore::open(&path).unwrap().len(), 2);
    }

    #[test]
    fn corrupt_line_is_reported() {
        let dir = tempfile::tempdir().unwrap();
        let path = dir.path().join("gallery.log");
        std::fs::write(&path, "not json\n").unwrap();
        let err = GalleryStore::open(&path).unwrap_err();
        assert!(matches!(err, GalleryError::Corrupt { line: 1, .. }));
        assert_eq!(err.code(), "StorageFailure");
    }
}
