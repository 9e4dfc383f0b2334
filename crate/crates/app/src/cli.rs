//! The `lifelines` command line.
//!
//! Exit status is 0 on success, 2 when the input is rejected by validation
//! and 1 for every other failure.

use std::io::Read;
use std::path::{Path, PathBuf};

use clap::{Args, Parser, Subcommand};
use lifelines_core::format::DrawingDoc;
use lifelines_core::gallery::GalleryStore;
use lifelines_core::{
    canonicalize, color_curve, continuous_frechet, default_tolerance, discrete_frechet, make_morph,
    render_svg, ArrangementError, CanonicalCurve, CurveError, GalleryError, MorphDoc, MorphError, Palette,
    DEFAULT_FRAMES, DEFAULT_SAMPLES,
};

use crate::config::{Overrides, ServiceConfig, DEFAULT_DATA};

#[derive(Debug, Parser)]
#[command(name = "lifelines", version, about = "Color freehand drawings by winding number, compare and morph them")]
pub struct Cli {
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Args)]
pub struct RenderOpts {
    /// Palette offset: rotates every color by this many steps.
    #[arg(long, default_value_t = 0, allow_negative_numbers = true)]
    pub offset: i64,
    /// SVG width in pixels.
    #[arg(long, default_value_t = 800)]
    pub width: u32,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Color a drawing and write it as SVG.
    Color {
        /// Drawing JSON file, or `-` for stdin.
        input: PathBuf,
        #[arg(short, long)]
        output: PathBuf,
        /// Also write the colored faces as JSON.
        #[arg(long)]
        json: Option<PathBuf>,
        #[command(flatten)]
        render: RenderOpts,
    },
    /// Fréchet distance between two drawings.
    Frechet {
        a: PathBuf,
        b: PathBuf,
        /// Continuous distance instead of the discrete one.
        #[arg(long)]
        continuous: bool,
        /// Bisection tolerance for --continuous (default 1e-6 of the canvas diagonal).
        #[arg(long, requires = "continuous")]
        tol: Option<f64>,
    },
    /// Morph one drawing into another, writing one SVG per frame plus morph.json.
    Morph {
        a: PathBuf,
        b: PathBuf,
        #[arg(long, default_value_t = DEFAULT_FRAMES)]
        frames: usize,
        /// Output directory.
        #[arg(short, long)]
        output: PathBuf,
        #[command(flatten)]
        render: RenderOpts,
    },
    /// Work with a gallery log.
    Gallery {
        #[arg(long, env = "LIFELINES_DATA", default_value = DEFAULT_DATA)]
        data: PathBuf,
        #[command(subcommand)]
        action: GalleryCommand,
    },
    /// Run the HTTP service.
    Serve {
        #[arg(long)]
        port: Option<u16>,
        #[arg(long)]
        data: Option<PathBuf>,
        /// TOML config file; flags and environment take precedence over it.
        #[arg(long, env = "LIFELINES_CONFIG")]
        config: Option<PathBuf>,
    },
}

#[derive(Debug, Subcommand)]
pub enum GalleryCommand {
    /// Add drawings; prints the new ids.
    Add {
        #[arg(required = true)]
        inputs: Vec<PathBuf>,
    },
    /// Print a page of drawings as JSON lines.
    List {
        #[arg(long, default_value_t = 0)]
        offset: usize,
        #[arg(long, default_value_t = 50)]
        limit: usize,
    },
    /// Print the k nearest drawings as `id<TAB>distance` lines.
    Nearest {
        /// Query drawing file.
        #[arg(required_unless_present = "id", conflicts_with = "id")]
        input: Option<PathBuf>,
        /// Use a stored drawing as the query; it is left out of the results.
        #[arg(long)]
        id: Option<String>,
        #[arg(short, long, default_value_t = 10)]
        k: usize,
    },
    /// Print corpus statistics as JSON.
    Stats,
}

#[derive(Debug)]
pub enum CliError {
    /// The input was rejected; exit status 2.
    Invalid { code: String, message: String },
    /// Anything else; exit status 1.
    Failed { code: String, message: String },
}

impl CliError {
    fn invalid(code: &str, message: impl ToString) -> Self {
        CliError::Invalid {
            code: code.to_string(),
            message: message.to_string(),
        }
    }

    fn failed(code: &str, message: impl ToString) -> Self {
        CliError::Failed {
            code: code.to_string(),
            message: message.to_string(),
        }
    }

    pub fn exit_code(&self) -> i32 {
        match self {
            CliError::Invalid { .. } => 2,
            CliError::Failed { .. } => 1,
        }
    }
}

impl std::fmt::Display for CliError {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        let (CliError::Invalid { code, message } | CliError::Failed { code, message }) = self;
        write!(f, "{code}: {message}")
    }
}

impl From<CurveError> for CliError {
    fn from(e: CurveError) -> Self {
        CliError::invalid(e.code(), &e)
    }
}

impl From<ArrangementError> for CliError {
    fn from(e: ArrangementError) -> Self {
        match e {
            ArrangementError::NoConvergence => CliError::failed(e.code(), &e),
            _ => CliError::invalid(e.code(), &e),
        }
    }
}

impl From<MorphError> for CliError {
    fn from(e: MorphError) -> Self {
        CliError::invalid(e.code(), &e)
    }
}

impl From<GalleryError> for CliError {
    fn from(e: GalleryError) -> Self {
        match e {
            GalleryError::BadPage(_) => CliError::invalid(e.code(), &e),
            _ => CliError::failed(e.code(), &e),
        }
    }
}

fn io_error(path: &Path, e: std::io::Error) -> CliError {
    CliError::failed("IoError", format!("{}: {e}", path.display()))
}

fn read_drawing(path: &Path) -> Result<CanonicalCurve, CliError> {
    let mut text = String::new();
    if path == Path::new("-") {
        std::io::stdin()
            .read_to_string(&mut text)
            .map_err(|e| io_error(path, e))?;
    } else {
        text = std::fs::read_to_string(path).map_err(|e| io_error(path, e))?;
    }
    let doc = DrawingDoc::parse(&text).map_err(|e| CliError::invalid("BadInput", format!("{}: {e}", path.display())))?;
    Ok(canonicalize(&doc.to_raw_stroke(), DEFAULT_SAMPLES)?)
}

fn write(path: &Path, contents: &str) -> Result<(), CliError> {
    std::fs::write(path, contents).map_err(|e| io_error(path, e))
}

pub fn run(cli: Cli) -> Result<(), CliError> {
    match cli.command {
        Command::Color {
            input,
            output,
            json,
            render,
        } => {
            let curve = read_drawing(&input)?;
            let doc = color_curve(&curve, &Palette::default().with_offset(render.offset))?;
            write(&output, &render_svg(&doc, render.width))?;
            if let Some(json) = json {
                write(&json, &serde_json::to_string_pretty(&doc).expect("documents serialize"))?;
            }
            let bounded = doc.bounded_faces().count();
            let max = doc.faces.iter().map(|f| f.winding.unsigned_abs()).max().unwrap_or(0);
            println!("{bounded} zones, max |winding| {max}");
        }
        Command::Frechet { a, b, continuous, tol } => {
            let (a, b) = (read_drawing(&a)?, read_drawing(&b)?);
            let d = if continuous {
                let tol = tol.unwrap_or_else(|| default_tolerance(a.canvas()));
                if !(tol > 0.0 && tol.is_finite()) {
                    return Err(CliError::invalid("BadTolerance", format!("tolerance must be positive, got {tol}")));
                }
                continuous_frechet(a.points(), b.points(), tol)
            } else {
                discrete_frechet(a.points(), b.points()).map(|r| r.distance)
            }
            .map_err(|e| CliError::invalid(e.code(), &e))?;
            println!("{d}");
        }
        Command::Morph {
            a,
            b,
            frames,
            output,
            render,
        } => {
            let (a, b) = (read_drawing(&a)?, read_drawing(&b)?);
            let m = make_morph(&a, &b, frames, &Palette::default().with_offset(render.offset))?;
            let doc = MorphDoc::new(&m, a.canvas(), render.offset);
            std::fs::create_dir_all(&output).map_err(|e| io_error(&output, e))?;
            for (k, frame) in doc.frames.iter().enumerate() {
                if let Some(code) = &frame.error {
                    log::warn!("frame {k} (t = {}) could not be colored: {code}", frame.t);
                }
                write(&output.join(format!("frame_{k:03}.svg")), &render_svg(&frame.drawing, render.width))?;
            }
            write(&output.join("morph.json"), &serde_json::to_string(&doc).expect("documents serialize"))?;
            println!("{} frames, delta {}", doc.frames.len(), doc.delta);
        }
        Command::Gallery { data, action } => gallery(&data, action)?,
        Command::Serve { port, data, config } => {
            let config = ServiceConfig::resolve(config.as_deref(), &Overrides { port, data })
                .map_err(|e| CliError::invalid("BadConfig", e))?;
            let runtime = tokio::runtime::Runtime::new().map_err(|e| CliError::failed("Runtime", e))?;
            runtime
                .block_on(crate::service::serve(config))
                .map_err(|e| CliError::failed(e.code(), &e))?;
        }
    }
    Ok(())
}

fn gallery(data: &Path, action: GalleryCommand) -> Result<(), CliError> {
    let mut store = GalleryStore::open(data)?;
    match action {
        GalleryCommand::Add { inputs } => {
            // validate everything before writing anything
            let curves = inputs.iter().map(|p| read_drawing(p)).collect::<Result<Vec<_>, _>>()?;
            for id in store.add_drawings(curves)? {
                println!("{id}");
            }
        }
        GalleryCommand::List { offset, limit } => {
            for r in store.list_drawings(offset, limit)? {
                println!("{}", r.to_doc().to_json());
            }
        }
        GalleryCommand::Nearest { input, id, k } => {
            if k == 0 {
                return Err(CliError::invalid("BadK", "k must be at least 1"));
            }
            let (query, skip) = match (input, id) {
                (_, Some(id)) => {
                    let r = store
                        .get(&id)
                        .ok_or_else(|| CliError::invalid("NotFound", format!("no drawing with id {id:?}")))?;
                    (r.curve.clone(), Some(id))
                }
                (Some(path), None) => (read_drawing(&path)?, None),
                (None, None) => unreachable!("clap requires a query"),
            };
            let hits = store.nearest(&query, k + usize::from(skip.is_some()));
            for n in hits.iter().filter(|n| Some(&n.record.id) != skip.as_ref()).take(k) {
                println!("{}\t{}", n.record.id, n.distance);
            }
        }
        GalleryCommand::Stats => {
            let s = store.stats();
            let doc = serde_json::json!({
                "count": s.count,
                "max_winding_histogram": s.max_winding_histogram,
                "mean_arc_length": s.mean_arc_length,
            });
            println!("{doc}");
        }
    }
    Ok(())
}
