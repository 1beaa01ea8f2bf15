//! Exact Fourier-domain representations of signals on weighted simplex
//! meshes, with rasterization baselines and shape-fidelity evaluation.
//!
//! Points, segment loops, triangle and tetrahedral meshes, and solid
//! polytopes given as watertight boundary meshes all transform into their
//! exact continuous Fourier coefficients on a frequency grid: no spatial
//! sampling, no aliasing. Spectra convert back to physical-domain grids by
//! a truncated Fourier series, the same shapes rasterize into
//! binary-occupancy and distance fields, and the fidelity machinery
//! quantifies how much shape information every representation preserves.
//!
//! The crate splits along the pipeline:
//!
//! - [`mesh`]: weighted simplex meshes, file formats, unit-cell
//!   normalization, content and distortion measures, boundary validation.
//! - [`transform`]: the closed-form transform kernels, frequency grids,
//!   vertex jitter and the grid drivers.
//! - [`spectral`]: inverse transforms, zero-pad upsampling, scalar fields.
//! - [`baselines`]: binary and distance rasterization, PGM input,
//!   raster polygonization.
//! - [`recon`]: marching squares / marching cubes, mesh IoU, fidelity
//!   sweeps.
//! - [`oracle`]: independent quadrature estimators used to validate the
//!   closed forms.
//! - [`shapes`]: deterministic sample geometry for tests and demos.
//!
//! ```
//! use nuft::shapes;
//! use nuft::transform::{auxnode_ft, JitterConfig, KGrid};
//!
//! let square = shapes::square_loop(0.25, 0.75);
//! let grid = KGrid::cubic(2, 8);
//! let spectrum = auxnode_ft(&square, &grid, &JitterConfig::default()).unwrap();
//! // the zero-frequency coefficient is the enclosed area
//! assert!((spectrum.dc().re - 0.25).abs() < 1e-12);
//! ```

pub mod baselines;
pub mod error;
pub mod geom;
pub mod mesh;
pub mod oracle;
pub mod query;
pub(crate) mod rawio;
pub mod recon;
pub mod shapes;
pub mod spectral;
pub mod transform;

pub use error::{Error, Result};
pub use num_complex::Complex64;

#[cfg(doctest)]
mod book {
    //! The guide chapters double as doctests: every fenced Rust block in
    //! `book/src` runs under `cargo test --doc`.
    macro_rules! chapter {
        ($name:ident, $path:literal) => {
            #[doc = include_str!($path)]
            #[allow(unused)]
            struct $name;
        };
    }
    chapter!(Introduction, "../../../book/src/introduction.md");
    chapter!(Meshes, "../../../book/src/meshes.md");
    chapter!(Transform, "../../../book/src/transform.md");
    chapter!(Solids, "../../../book/src/solids.md");
    chapter!(Fields, "../../../book/src/fields.md");
    chapter!(Baselines, "../../../book/src/baselines.md");
    chapter!(Fidelity, "../../../book/src/fidelity.md");
    chapter!(Cli, "../../../book/src/cli.md");
}
