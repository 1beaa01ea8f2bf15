//! Batch front-end: reproducible pipelines over the library.
//!
//! Every subcommand writes its artifacts plus a JSON manifest echoing the
//! resolved configuration. Outputs are byte-identical across re-runs with
//! the same config and seed, independent of the worker count.

mod commands;
mod manifest;

use std::process::ExitCode;

use clap::{Parser, Subcommand};

#[derive(Parser)]
#[command(
    name = "nuft",
    about = "Exact Fourier transforms of simplex meshes, rasterization baselines and fidelity evaluation",
    version
)]
struct Cli {
    /// Base RNG seed for jitter, parity rays and sampling.
    #[arg(long, global = true, default_value_t = 0)]
    seed: u64,

    /// Worker threads (0 = all available cores). Outputs do not depend on
    /// this.
    #[arg(long, global = true, default_value_t = 0)]
    workers: usize,

    /// Manifest path override (default: `<output>.manifest.json`).
    #[arg(long, global = true)]
    manifest: Option<std::path::PathBuf>,

    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Exact Fourier transform of a mesh onto a frequency grid.
    Transform(commands::TransformArgs),
    /// Inverse-transform a spectrum into a physical-domain field.
    Field(commands::FieldArgs),
    /// Rasterize a mesh into a binary or distance field.
    Rasterize(commands::RasterizeArgs),
    /// Extract an iso contour from a field (or polygonize a PGM raster).
    Contour(commands::ContourArgs),
    /// Mesh intersection-over-union between two watertight boundaries.
    Iou(commands::IouArgs),
    /// Fidelity sweep across representations and resolutions.
    Sweep(commands::SweepArgs),
    /// Compare closed-form transforms against the quadrature oracle.
    Oracle(commands::OracleArgs),
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    if cli.workers > 0 {
        // ignore failure: the pool can only be set once per process
        let _ = rayon::ThreadPoolBuilder::new()
            .num_threads(cli.workers)
            .build_global();
    }
    let ctx = commands::Context {
        seed: cli.seed,
        manifest_override: cli.manifest.clone(),
    };
    let result = match cli.command {
        Command::Transform(args) => commands::transform(&ctx, args),
        Command::Field(args) => commands::field(&ctx, args),
        Command::Rasterize(args) => commands::rasterize(&ctx, args),
        Command::Contour(args) => commands::contour(&ctx, args),
        Command::Iou(args) => commands::iou(&ctx, args),
        Command::Sweep(args) => commands::sweep(&ctx, args),
        Command::Oracle(args) => commands::oracle(&ctx, args),
    };
    match result {
        Ok(()) => ExitCode::SUCCESS,
        Err(err) => {
            let kind = error_kind(&err);
            let mut payload = serde_json::json!({
                "error": { "kind": kind, "message": err.to_string() }
            });
            // boundary failures carry the full defect report: element
            // indices and defect kinds, machine-readable
            if let nuft::Error::Boundary(report) = &err {
                payload["error"]["defects"] =
                    serde_json::to_value(&report.defects).expect("defects serialize");
            }
            eprintln!("{payload}");
            ExitCode::from(exit_code(&err))
        }
    }
}

fn error_kind(err: &nuft::Error) -> &'static str {
    use nuft::Error::*;
    match err {
        Io(_) => "io",
        Parse { .. } => "parse",
        InvalidMesh(_) => "invalid_mesh",
        Boundary(_) => "boundary_defects",
        SigmaCollision { .. } => "sigma_collision",
        NegativeRadicand { .. } => "negative_radicand",
        NonHermitian { .. } => "non_hermitian",
        BadFile { .. } => "bad_file",
        Unsupported(_) => "unsupported",
    }
}

/// 2: input/validation error, 3: numerical error, 4: i/o error.
fn exit_code(err: &nuft::Error) -> u8 {
    use nuft::Error::*;
    match err {
        Io(_) => 4,
        SigmaCollision { .. } | NegativeRadicand { .. } | NonHermitian { .. } => 3,
        _ => 2,
    }
}
