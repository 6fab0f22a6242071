//! Gaussian covariance-matrix simulator for mechanical squeezing in an
//! optomechanical cavity driven by two tones and fed with squeezed vacuum.
//!
//! The linearized fluctuations of the cavity `(X, Y)` and mechanical `(Q, P)`
//! quadratures obey `dV/dt = A V + V A^T + D`. [`model`] builds the drift and
//! diffusion matrices, [`dynamics`] evolves or solves for the covariance,
//! [`stability`] checks the drift matrix, [`metrics`] turns covariances into
//! squeezing figures of merit and Wigner grids, [`spectrum`] evaluates the
//! homodyne output spectrum and [`sweep`] runs declarative parameter scans.
//!
//! ```
//! use gauss_squeeze::{bath_correlations, squeezing_report, Mode, SystemParams};
//!
//! let params = SystemParams::reference();
//! let bath = bath_correlations(1.0, 0.0).unwrap();
//! let report = squeezing_report(&params, &bath, Mode::Rwa).unwrap();
//! assert!(report.s_q_db > 10.0);
//! ```

// `!(x > 0.0)` deliberately rejects NaN as well.
#![allow(clippy::neg_cmp_op_on_partial_ord)]

pub mod cli;
pub mod config;
pub mod dynamics;
pub mod error;
pub mod metrics;
pub mod model;
pub mod output;
pub mod spectrum;
pub mod stability;
pub mod sweep;

pub use dynamics::{
    check_physicality, evolve_covariance, periodic_steady_state, steady_state,
    steady_state_covariance, CovarianceMatrix, EvolveOptions, Trajectory,
};
pub use error::{Error, Result};
pub use metrics::{
    bogoliubov_params, quadrature_squeezing_db, reduced_mech_covariance, squeezing_report,
    total_squeezing, wigner, Quadrature, ReducedMechCovariance, SqueezingReport, WignerGrid,
    WignerSpec,
};
pub use model::{
    bath_correlations, classical_steady_state, diffusion_matrix, drift_matrix, effective_couplings,
    ClassicalSteadyState, DiffusionMatrix, DriftMatrix, DriveConfig, Mode, SqueezedBath,
    SystemParams,
};
pub use spectrum::{output_spectrum, spectrum_coefficients, CoefficientForm, SpectrumConfig};
pub use stability::{routh_hurwitz, spectral_abscissa, StabilityReport};
pub use sweep::{preset, run_sweep, Observable, Preset, SweepResult, SweepScenario};
