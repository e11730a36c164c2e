//! Numerical workbench for the `C⁰`-rigidity of Poisson brackets on the
//! two-torus and on planar charts.
//!
//! * [`field`]: closed-form fields, the field DSL, exact differentiation,
//!   Poisson brackets, lattice sampling and extrema.
//! * [`flow`]: symplectic integration of Hamiltonian flows and their
//!   compositions.
//! * [`commutator`]: the generating Hamiltonian of a flow commutator and the
//!   dyadic scan of its deviation from `st{F,G}`.
//! * [`hofer`]: Hofer-type lengths of explicit paths (upper bounds) and
//!   the numerical chain behind the commutator length estimate.
//! * [`tamed`]: thick grids and tamed approximations that kill triple
//!   brackets.
//! * [`implant`]: separable fields on a 4-dimensional Darboux chart.
//! * [`experiment`]: seeded perturbation searches.
//! * [`report`] and [`svg`]: CSV and SVG output.
//! * [`cli`]: the `rigidity-lab` command line.

pub mod cli;
pub mod commutator;
pub mod error;
pub mod experiment;
pub mod field;
pub mod flow;
pub mod hofer;
pub mod implant;
pub mod report;
pub mod svg;
pub mod tamed;

pub use error::{Error, ParseError, Result};
pub use field::{poisson, FieldExpr, GridSample, Point2};
