//! Subcommand implementations.

use std::path::{Path, PathBuf};

use clap::Args;
use serde::Serialize;

use nuft::baselines;
use nuft::mesh::{
    load_mesh, load_mesh_with_format, save_mesh, validate_boundary, AffineMap, MeshFormat,
    SimplexMesh,
};
use nuft::oracle::{quad_polytope_ft, quad_simplex_ft, QuadratureSpec};
use nuft::recon::{
    cell_seed, iou as mesh_iou, reconstruct_boundary, reconstruct_via, FidelityReport,
    FidelityRow, Representation, SweepConfig,
};
use nuft::spectral::{
    inverse_transform, raised_cosine_window, upsample_by, ScalarField,
};
use nuft::transform::{
    auxnode_ft, auxnode_ft_at, jitter_vertices, mesh_ft, mesh_ft_at, DcPolicy, JitterConfig,
    KGrid, SpectralGrid,
};
use nuft::{Error, Result};

use crate::manifest::{self, Manifest};

pub struct Context {
    pub seed: u64,
    pub manifest_override: Option<PathBuf>,
}

impl Context {
    fn write_manifest<C: Serialize>(
        &self,
        output: &Path,
        command: &'static str,
        config: C,
        inputs: &[&Path],
        outputs: &[&Path],
    ) -> Result<()> {
        let path = self
            .manifest_override
            .clone()
            .unwrap_or_else(|| manifest::default_path(output));
        manifest::write(
            &path,
            &Manifest {
                command,
                seed: self.seed,
                config,
                inputs: inputs.iter().map(|p| p.display().to_string()).collect(),
                outputs: outputs.iter().map(|p| p.display().to_string()).collect(),
            },
        )
    }
}

fn load_input(path: &Path, format: Option<MeshFormat>, degree: Option<usize>) -> Result<SimplexMesh> {
    let mesh = match format {
        Some(f) => load_mesh_with_format(path, f)?,
        None => load_mesh(path)?,
    };
    if let Some(want) = degree {
        if mesh.degree() != want {
            return Err(Error::Unsupported(format!(
                "input holds degree-{} elements, --degree asked for {want}",
                mesh.degree()
            )));
        }
    }
    let degenerate = mesh.degenerate_element_count();
    if degenerate > 0 {
        eprintln!(
            "note: {degenerate} zero-content elements retained; they contribute nothing to transforms"
        );
    }
    Ok(mesh)
}

fn parse_axes(spec: &str) -> Result<Vec<usize>> {
    let parts: Vec<usize> = spec
        .split(',')
        .map(|t| {
            t.trim()
                .parse::<usize>()
                .map_err(|_| Error::Unsupported(format!("bad resolution component {t:?}")))
        })
        .collect::<Result<_>>()?;
    if parts.is_empty() || parts.len() > 3 {
        return Err(Error::Unsupported("resolution needs 1..=3 components".into()));
    }
    Ok(parts)
}

fn parse_mode_vector(spec: &str) -> Result<Vec<i64>> {
    spec.split(',')
        .map(|t| {
            t.trim()
                .parse::<i64>()
                .map_err(|_| Error::Unsupported(format!("bad mode component {t:?}")))
        })
        .collect()
}

fn save_mesh_by_extension(path: &Path, mesh: &SimplexMesh) -> Result<()> {
    save_mesh(path, mesh, MeshFormat::from_path(path)?)
}

// ---------------------------------------------------------------------------
// transform

#[derive(Args)]
pub struct TransformArgs {
    /// Input mesh (.off, .obj, .xyz, .json).
    #[arg(long)]
    input: PathBuf,
    /// Override the format inferred from the extension.
    #[arg(long)]
    format: Option<MeshFormat>,
    /// Reject inputs whose element degree differs.
    #[arg(long)]
    degree: Option<usize>,
    /// Output spectrum path (raw payload; `<path>.json` sidecar).
    #[arg(long)]
    output: PathBuf,
    /// Modes per axis: `64` or `64,64,32`.
    #[arg(long)]
    res: String,
    /// Transform the enclosed solid via the auxiliary-node method
    /// (requires a watertight oriented boundary mesh).
    #[arg(long)]
    aux_node: bool,
    /// Relative jitter magnitude.
    #[arg(long, default_value_t = 1e-6)]
    eps: f64,
    /// Zero-frequency policy.
    #[arg(long, value_parser = parse_dc_policy, default_value = "analytic")]
    dc_policy: DcPolicy,
    /// Skip unit-cell normalization.
    #[arg(long)]
    no_normalize: bool,
    /// Normalization margin.
    #[arg(long, default_value_t = 0.125)]
    margin: f64,
}

fn parse_dc_policy(s: &str) -> std::result::Result<DcPolicy, String> {
    match s.to_ascii_lowercase().as_str() {
        "analytic" => Ok(DcPolicy::Analytic),
        "jittered" => Ok(DcPolicy::Jittered),
        other => Err(format!("unknown dc policy {other:?}")),
    }
}

#[derive(Serialize)]
struct TransformConfig {
    input: String,
    output: String,
    resolution: Vec<usize>,
    aux_node: bool,
    eps: f64,
    dc_policy: DcPolicy,
    normalize: bool,
    margin: f64,
    degree_override: Option<usize>,
}

pub fn transform(ctx: &Context, args: TransformArgs) -> Result<()> {
    let mesh = load_input(&args.input, args.format, args.degree)?;
    let (mesh, affine) = if args.no_normalize {
        let dim = mesh.dim();
        (mesh, AffineMap::identity(dim))
    } else {
        nuft::mesh::normalize_to_unit_cell(&mesh, args.margin)?
    };
    let axes = parse_axes(&args.res)?;
    let shape = if axes.len() == 1 {
        vec![axes[0]; mesh.dim()]
    } else {
        axes
    };
    let grid = KGrid::with_shape(shape.clone())?;
    let jitter = JitterConfig {
        eps: args.eps,
        seed: ctx.seed,
        dc_policy: args.dc_policy,
    };
    let mut spectrum = if args.aux_node {
        let boundary = validate_boundary(&mesh)?;
        auxnode_ft(&boundary, &grid, &jitter)?
    } else {
        mesh_ft(&mesh, &grid, &jitter)?
    };
    spectrum.meta_mut().affine = Some(affine);
    spectrum.save(&args.output)?;
    ctx.write_manifest(
        &args.output,
        "transform",
        TransformConfig {
            input: args.input.display().to_string(),
            output: args.output.display().to_string(),
            resolution: shape,
            aux_node: args.aux_node,
            eps: args.eps,
            dc_policy: args.dc_policy,
            normalize: !args.no_normalize,
            margin: args.margin,
            degree_override: args.degree,
        },
        &[&args.input],
        &[&args.output],
    )
}

// ---------------------------------------------------------------------------
// field

#[derive(Args)]
pub struct FieldArgs {
    /// Input spectrum.
    #[arg(long)]
    input: PathBuf,
    /// Output field path (raw payload; `<path>.json` sidecar).
    #[arg(long)]
    output: PathBuf,
    /// Zero-pad upsampling factor before the inverse transform.
    #[arg(long, default_value_t = 1)]
    upsample: usize,
    /// Apply a raised-cosine window (visualization only).
    #[arg(long)]
    window: bool,
}

#[derive(Serialize)]
struct FieldConfig {
    input: String,
    output: String,
    upsample: usize,
    window: bool,
}

pub fn field(ctx: &Context, args: FieldArgs) -> Result<()> {
    let mut spectrum = SpectralGrid::load(&args.input)?;
    if args.upsample > 1 {
        spectrum = upsample_by(&spectrum, args.upsample)?;
    }
    if args.window {
        spectrum = raised_cosine_window(&spectrum);
    }
    let field = inverse_transform(&spectrum)?;
    field.save(&args.output)?;
    ctx.write_manifest(
        &args.output,
        "field",
        FieldConfig {
            input: args.input.display().to_string(),
            output: args.output.display().to_string(),
            upsample: args.upsample,
            window: args.window,
        },
        &[&args.input],
        &[&args.output],
    )
}

// ---------------------------------------------------------------------------
// rasterize

#[derive(Args)]
pub struct RasterizeArgs {
    #[arg(long)]
    input: PathBuf,
    #[arg(long)]
    format: Option<MeshFormat>,
    #[arg(long)]
    output: PathBuf,
    /// Cells per axis.
    #[arg(long)]
    res: usize,
    /// `binary` or `distance`.
    #[arg(long)]
    mode: String,
    /// Treat the input as a watertight boundary and fill its interior
    /// (binary mode).
    #[arg(long)]
    solid: bool,
    /// Signed distance (requires a watertight boundary).
    #[arg(long)]
    signed: bool,
    #[arg(long)]
    no_normalize: bool,
    #[arg(long, default_value_t = 0.125)]
    margin: f64,
}

#[derive(Serialize)]
struct RasterizeConfig {
    input: String,
    output: String,
    resolution: usize,
    mode: String,
    solid: bool,
    signed: bool,
    normalize: bool,
    margin: f64,
}

pub fn rasterize(ctx: &Context, args: RasterizeArgs) -> Result<()> {
    let mesh = load_input(&args.input, args.format, None)?;
    let (mesh, affine) = if args.no_normalize {
        let dim = mesh.dim();
        (mesh, AffineMap::identity(dim))
    } else {
        nuft::mesh::normalize_to_unit_cell(&mesh, args.margin)?
    };
    let mut field = match args.mode.as_str() {
        "binary" => {
            if args.solid {
                let boundary = validate_boundary(&mesh)?;
                baselines::rasterize_binary_solid(&boundary, args.res, ctx.seed)?
            } else {
                baselines::rasterize_binary(&mesh, args.res)?
            }
        }
        "distance" => {
            if args.signed {
                let boundary = validate_boundary(&mesh)?;
                baselines::rasterize_distance_signed(&boundary, args.res, ctx.seed)?
            } else {
                baselines::rasterize_distance(&mesh, args.res, ctx.seed)?
            }
        }
        other => {
            return Err(Error::Unsupported(format!(
                "unknown rasterization mode {other:?}"
            )))
        }
    };
    field.affine = Some(affine);
    field.save(&args.output)?;
    ctx.write_manifest(
        &args.output,
        "rasterize",
        RasterizeConfig {
            input: args.input.display().to_string(),
            output: args.output.display().to_string(),
            resolution: args.res,
            mode: args.mode.clone(),
            solid: args.solid,
            signed: args.signed,
            normalize: !args.no_normalize,
            margin: args.margin,
        },
        &[&args.input],
        &[&args.output],
    )
}

// ---------------------------------------------------------------------------
// contour

#[derive(Args)]
pub struct ContourArgs {
    /// Input field, or a binary PGM raster to polygonize.
    #[arg(long)]
    input: PathBuf,
    /// Output mesh (.json, .obj or .off).
    #[arg(long)]
    output: PathBuf,
    /// Iso level.
    #[arg(long, default_value_t = 0.5)]
    iso: f64,
    /// Multilinear upsampling factor applied to PGM rasters before
    /// contouring.
    #[arg(long, default_value_t = 4)]
    upsample: usize,
    /// Components below this fraction of the largest are discarded.
    #[arg(long, default_value_t = 1e-3)]
    min_component_frac: f64,
    /// Keep the normalized frame instead of mapping the contour back
    /// through the field's affine record.
    #[arg(long)]
    keep_frame: bool,
}

#[derive(Serialize)]
struct ContourConfig {
    input: String,
    output: String,
    iso: f64,
    upsample: usize,
    min_component_frac: f64,
    keep_frame: bool,
    discarded_components: usize,
    elements: usize,
}

pub fn contour(ctx: &Context, args: ContourArgs) -> Result<()> {
    let is_pgm = args
        .input
        .extension()
        .map(|e| e.eq_ignore_ascii_case("pgm"))
        .unwrap_or(false);
    let (boundary, affine) = if is_pgm {
        let image = baselines::load_pgm(&args.input)?;
        (baselines::polygonize_raster(&image, args.upsample, args.iso)?, None)
    } else {
        let field = ScalarField::load(&args.input)?;
        let affine = field.affine.clone();
        (reconstruct_boundary(&field, args.iso)?, affine)
    };
    let (boundary, discarded) =
        nuft::recon::filter_small_components(&boundary, args.min_component_frac);
    if boundary.is_empty() {
        eprintln!("warning: empty contour (field entirely on one side of the iso level)");
    }
    let mut mesh = boundary.into_mesh();
    if !args.keep_frame {
        if let Some(affine) = &affine {
            mesh = affine.inverse().apply_mesh(&mesh);
        }
    }
    save_mesh_by_extension(&args.output, &mesh)?;
    ctx.write_manifest(
        &args.output,
        "contour",
        ContourConfig {
            input: args.input.display().to_string(),
            output: args.output.display().to_string(),
            iso: args.iso,
            upsample: args.upsample,
            min_component_frac: args.min_component_frac,
            keep_frame: args.keep_frame,
            discarded_components: discarded,
            elements: mesh.element_count(),
        },
        &[&args.input],
        &[&args.output],
    )
}

// ---------------------------------------------------------------------------
// iou

#[derive(Args)]
pub struct IouArgs {
    /// Ground-truth boundary mesh.
    #[arg(long)]
    a: PathBuf,
    /// Candidate boundary mesh.
    #[arg(long)]
    b: PathBuf,
    #[arg(long, default_value_t = 1_000_000)]
    samples: usize,
    /// Report path (JSON).
    #[arg(long)]
    output: PathBuf,
}

#[derive(Serialize)]
struct IouConfig {
    a: String,
    b: String,
    samples: usize,
}

#[derive(Serialize)]
struct IouReport {
    iou: f64,
    rel_error: f64,
    stderr: f64,
    samples: usize,
    seed: u64,
}

pub fn iou(ctx: &Context, args: IouArgs) -> Result<()> {
    let a = validate_boundary(&load_input(&args.a, None, None)?)?;
    let b = validate_boundary(&load_input(&args.b, None, None)?)?;
    let est = mesh_iou(&a, &b, args.samples, ctx.seed)?;
    let report = IouReport {
        iou: est.iou,
        rel_error: est.rel_error,
        stderr: est.stderr,
        samples: est.samples,
        seed: est.seed,
    };
    std::fs::write(
        &args.output,
        serde_json::to_string_pretty(&report).expect("report serializes"),
    )?;
    ctx.write_manifest(
        &args.output,
        "iou",
        IouConfig {
            a: args.a.display().to_string(),
            b: args.b.display().to_string(),
            samples: args.samples,
        },
        &[&args.a, &args.b],
        &[&args.output],
    )
}

// ---------------------------------------------------------------------------
// sweep

#[derive(Args)]
pub struct SweepArgs {
    /// Ground-truth boundary mesh.
    #[arg(long)]
    input: PathBuf,
    /// Output CSV.
    #[arg(long)]
    output: PathBuf,
    /// Comma-separated resolutions, e.g. `16,32,64`.
    #[arg(long)]
    res: String,
    /// Comma-separated representations out of nuft, binary, distance.
    #[arg(long, default_value = "nuft,binary,distance")]
    reps: String,
    #[arg(long, default_value_t = 1_000_000)]
    samples: usize,
    #[arg(long, default_value_t = 4)]
    spectral_upsample: usize,
    #[arg(long, default_value_t = 4)]
    raster_upsample: usize,
    #[arg(long, default_value_t = 0.5)]
    iso: f64,
    #[arg(long, default_value_t = 1e-6)]
    eps: f64,
    #[arg(long, default_value_t = 0.125)]
    margin: f64,
    #[arg(long, default_value_t = 1e-3)]
    min_component_frac: f64,
    /// Save each cell's reconstructed mesh into this directory.
    #[arg(long)]
    save_meshes: Option<PathBuf>,
}

#[derive(Serialize)]
struct SweepConfigEcho {
    input: String,
    output: String,
    resolutions: Vec<usize>,
    representations: Vec<String>,
    samples: usize,
    spectral_upsample: usize,
    raster_upsample: usize,
    iso: f64,
    eps: f64,
    margin: f64,
    min_component_frac: f64,
    save_meshes: Option<String>,
    discarded_components: Vec<usize>,
}

pub fn sweep(ctx: &Context, args: SweepArgs) -> Result<()> {
    let gt = validate_boundary(&load_input(&args.input, None, None)?)?;
    let (gt, _) = gt.normalized(args.margin)?;
    let resolutions = parse_axes(&args.res)?;
    let reps: Vec<Representation> = args
        .reps
        .split(',')
        .map(|t| t.trim().parse())
        .collect::<Result<_>>()?;
    let config = SweepConfig {
        samples: args.samples,
        seed: ctx.seed,
        spectral_upsample: args.spectral_upsample,
        raster_upsample: args.raster_upsample,
        iso: args.iso,
        jitter_eps: args.eps,
        min_component_fraction: args.min_component_frac,
    };
    if let Some(dir) = &args.save_meshes {
        std::fs::create_dir_all(dir)?;
    }
    let mut report = FidelityReport::default();
    for &rep in &reps {
        for &res in &resolutions {
            let seed = cell_seed(ctx.seed, rep, res);
            let (recon, discarded) = reconstruct_via(&gt, rep, res, &config, seed)?;
            if let Some(dir) = &args.save_meshes {
                let ext = if recon.mesh().dim() == 3 { "obj" } else { "json" };
                let path = dir.join(format!("{}_{res}.{ext}", rep.name()));
                save_mesh_by_extension(&path, recon.mesh())?;
            }
            let est = mesh_iou(&gt, &recon, config.samples, seed)?;
            report.rows.push(FidelityRow {
                rep,
                resolution: res,
                iou: est.iou,
                rel_error: est.rel_error,
                stderr: est.stderr,
                samples: est.samples,
                seed,
                discarded_components: discarded,
            });
        }
    }
    std::fs::write(&args.output, report.to_csv())?;
    ctx.write_manifest(
        &args.output,
        "sweep",
        SweepConfigEcho {
            input: args.input.display().to_string(),
            output: args.output.display().to_string(),
            resolutions,
            representations: reps.iter().map(|r| r.name().to_string()).collect(),
            samples: args.samples,
            spectral_upsample: args.spectral_upsample,
            raster_upsample: args.raster_upsample,
            iso: args.iso,
            eps: args.eps,
            margin: args.margin,
            min_component_frac: args.min_component_frac,
            save_meshes: args.save_meshes.as_ref().map(|p| p.display().to_string()),
            discarded_components: report.rows.iter().map(|r| r.discarded_components).collect(),
        },
        &[&args.input],
        &[&args.output],
    )
}

// ---------------------------------------------------------------------------
// oracle

#[derive(Args)]
pub struct OracleArgs {
    #[arg(long)]
    input: PathBuf,
    /// Integer mode vector, e.g. `1,2` (frequency is 2*pi times this).
    #[arg(long)]
    k: String,
    #[arg(long, default_value_t = 4_000_000)]
    samples: usize,
    /// `mc` (stratified Monte Carlo) or `midpoint` (recursive subdivision).
    #[arg(long, default_value = "mc")]
    method: String,
    /// Subdivision depth for the midpoint method.
    #[arg(long, default_value_t = 6)]
    depth: usize,
    /// Compare the auxiliary-node solid transform instead of the mesh sum.
    #[arg(long)]
    aux_node: bool,
    #[arg(long, default_value_t = 1e-6)]
    eps: f64,
    #[arg(long)]
    no_normalize: bool,
    #[arg(long, default_value_t = 0.125)]
    margin: f64,
    /// Report path (JSON).
    #[arg(long)]
    output: PathBuf,
}

#[derive(Serialize)]
struct OracleConfig {
    input: String,
    output: String,
    mode: Vec<i64>,
    samples: usize,
    method: String,
    depth: usize,
    aux_node: bool,
    eps: f64,
    normalize: bool,
    margin: f64,
}

#[derive(Serialize)]
struct OracleReport {
    mode: Vec<i64>,
    closed_form: [f64; 2],
    quadrature: [f64; 2],
    std_error: f64,
    abs_difference: f64,
    within_3_stderr: bool,
    evaluations: usize,
}

pub fn oracle(ctx: &Context, args: OracleArgs) -> Result<()> {
    let mesh = load_input(&args.input, None, None)?;
    let mesh = if args.no_normalize {
        mesh
    } else {
        nuft::mesh::normalize_to_unit_cell(&mesh, args.margin)?.0
    };
    let mode = parse_mode_vector(&args.k)?;
    if mode.len() != mesh.dim() {
        return Err(Error::Unsupported(format!(
            "mode vector has {} components, mesh is {}D",
            mode.len(),
            mesh.dim()
        )));
    }
    let k: Vec<f64> = mode
        .iter()
        .map(|&m| 2.0 * std::f64::consts::PI * m as f64)
        .collect();
    let spec = match args.method.as_str() {
        "mc" => QuadratureSpec::monte_carlo(args.samples, ctx.seed),
        "midpoint" => QuadratureSpec::midpoint(args.depth),
        other => return Err(Error::Unsupported(format!("unknown method {other:?}"))),
    };
    // both routes see the same jittered geometry
    let jittered = jitter_vertices(&mesh, &JitterConfig::new(args.eps, ctx.seed));
    let (closed, quad) = if args.aux_node {
        let boundary = validate_boundary(&jittered)?;
        let closed = auxnode_ft_at(&boundary, &k)?;
        let quad = quad_polytope_ft(&boundary, &k, &spec)?;
        (closed, quad)
    } else {
        let closed = mesh_ft_at(&jittered, &k)?;
        let mut value = nuft::Complex64::ZERO;
        let mut var = 0.0;
        let mut evaluations = 0;
        for n in 0..jittered.element_count() {
            let pts = jittered.element_points(n);
            let est = quad_simplex_ft(&pts, &k, &spec)?;
            value += jittered.density(n) * est.value;
            var += (jittered.density(n) * est.std_error).powi(2);
            evaluations += est.evaluations;
        }
        (
            closed,
            nuft::oracle::QuadEstimate {
                value,
                std_error: var.sqrt(),
                evaluations,
            },
        )
    };
    let diff = (closed - quad.value).norm();
    let report = OracleReport {
        mode: mode.clone(),
        closed_form: [closed.re, closed.im],
        quadrature: [quad.value.re, quad.value.im],
        std_error: quad.std_error,
        abs_difference: diff,
        within_3_stderr: diff <= 3.0 * quad.std_error,
        evaluations: quad.evaluations,
    };
    std::fs::write(
        &args.output,
        serde_json::to_string_pretty(&report).expect("report serializes"),
    )?;
    ctx.write_manifest(
        &args.output,
        "oracle",
        OracleConfig {
            input: args.input.display().to_string(),
            output: args.output.display().to_string(),
            mode,
            samples: args.samples,
            method: args.method.clone(),
            depth: args.depth,
            aux_node: args.aux_node,
            eps: args.eps,
            normalize: !args.no_normalize,
            margin: args.margin,
        },
        &[&args.input],
        &[&args.output],
    )
}
