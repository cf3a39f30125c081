//! Contour-integral eigensolvers for sparse Hermitian-definite pencils
//! `A x = λ B x`, with contours placed from a predicted spectrum.
//!
//! The pieces, in pipeline order:
//!
//! - [`problems`]: FEM pencils (thermal diffusion, EM cavity, Kirchhoff-Love
//!   plate) on random coefficient fields, a dense reference oracle, and the
//!   Matrix Market + `meta.json` dataset layout.
//! - [`predictor`]: spectrum predictions, the prediction JSON file (schema v1)
//!   and a noisy-oracle stand-in for a learned predictor.
//! - [`contours`]: KDE interval partitioning, Krylov scouting with calibrated
//!   bounding boxes, random placement, and quadrature rules.
//! - [`solvers`]: the quadrature spectral projector, CIRR and FEAST, and
//!   independent multi-contour solves.
//! - [`bench`]: strategy pipelines, matching and speedup metrics, the
//!   random-contour sensitivity study and long-format reports.
//!
//! Each capability has a runnable example:
//!
//! ```text
//! cargo run --example projector_quadrature
//! cargo run --release --example generate_problems
//! cargo run --example kde_contours
//! cargo run --release --example cirr_vs_feast
//! cargo run --release --example scout_baseline
//! cargo run --release --example sensitivity_study
//! cargo run --release --example pipeline_end_to_end
//! cargo run --example matrix_market_io
//! ```
//!
//! A minimal solve:
//!
//! ```
//! use contour_eig::contours::{Contour, ContourSource};
//! use contour_eig::linalg::{MatrixPencil, SparseMatrix};
//! use contour_eig::solvers::{cirr_solve, SolverConfig};
//!
//! let a = SparseMatrix::diagonal(&[1.0, 2.0, 3.0, 10.0]);
//! let pencil = MatrixPencil::new(a, SparseMatrix::identity(4), true, true, "diag").unwrap();
//! let contour = Contour::circle(2.0, 1.5, 3, ContourSource::Manual).unwrap();
//! let res = cirr_solve(&pencil, &contour, &SolverConfig::default(), 0).unwrap();
//! assert_eq!(res.eigenvalues.len(), 3);
//! ```

pub mod bench;
pub mod contours;
pub mod error;
pub mod linalg;
pub mod predictor;
pub mod problems;
pub mod solvers;

pub use error::{Error, Result};
