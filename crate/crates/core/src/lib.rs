//! Solvable central potentials from similarity transformations of the
//! Euler operator `D = rho d/drho`, with analytic spectra, numerical radial
//! eigenvalue oracles to check them against, and a command-line front end.

pub mod checks;
pub mod cli;
pub mod engine;
pub mod error;
pub mod family;
pub mod oracle;
pub mod pct;
pub mod quadrature;
pub mod second_class;
pub mod spectrum;

pub use engine::{exp_series, series_eval, MonomialTerm, OperatorA, OperatorO, WeightedPowerSeries};
pub use error::{Error, Result};
pub use family::{classify_alpha, couplings, potential_eval, AlphaClass, CouplingSet, FamilyParams, PhysicalConstants};
pub use oracle::{fd_spectrum, numerov_eigen, residual, Eigenpair, RadialGrid};
pub use spectrum::{Branch, SpectralLine, Wavefunction};
