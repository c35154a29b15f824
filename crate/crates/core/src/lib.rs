//! Analytical and Monte Carlo toolkit for cooperative integrated sensing and
//! communication (ISAC) networks.
//!
//! Base stations are scattered as a Poisson point process around a typical
//! target (which is also the typical user). The crate estimates how well the
//! cooperating cluster can localize the target (Cramér-Rao bounds for angle,
//! time-of-flight and hybrid measurements), how fast it can serve the user,
//! and how the two trade off when a fixed antenna budget is split into more
//! or fewer base stations.
//!
//! Module map:
//!
//! * [`params`]: system constants, validation and the gain constants.
//! * [`geometry`]: deployment sampling and distance order statistics.
//! * [`mc`] and [`rng`]: reproducible parallel Monte Carlo plumbing.
//! * [`sensing`]: Fisher information matrices and their Monte Carlo CRLBs.
//! * [`closed_forms`]: GDoP and CRLB approximations and scaling laws.
//! * [`special`]: incomplete Beta/Gamma functions and adaptive quadrature.
//! * [`comms`]: Laplace transforms of signal and interference, rate integral.
//! * [`boundary`]: rate-CRLB operating points and Pareto frontiers.

pub mod boundary;
pub mod closed_forms;
pub mod comms;
pub mod error;
pub mod geometry;
pub mod mc;
pub mod params;
pub mod rng;
pub mod sensing;
pub mod special;

pub use boundary::{OperatingPoint, ParetoFrontier};
pub use error::{Error, Result};
pub use geometry::{DeploymentMode, DeploymentSpec, NetworkRealization};
pub use mc::McEstimate;
pub use sensing::{Fim2, SensingMode};
pub use params::{PowerMode, SystemParams, Violation};
