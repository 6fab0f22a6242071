//! Routh-Hurwitz and eigenvalue stability checks of the RWA drift matrix.

use serde::Serialize;

use crate::error::{Error, Result};
use crate::model::{drift_matrix, DriftMatrix, Mode, SystemParams};

/// Margins whose magnitude is below this fraction of their natural scale are
/// treated as marginal, and the algebraic steady-state solve refuses them.
pub const MARGINAL_REL_TOL: f64 = 1e-12;

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct StabilityReport {
    pub rh1: f64,
    pub rh2: f64,
    pub rh3: f64,
    pub spectral_abscissa: f64,
    pub stable_rh: bool,
    pub stable_eig: bool,
    #[serde(skip)]
    scales: [f64; 3],
}

impl StabilityReport {
    pub fn margins(&self) -> [f64; 3] {
        [self.rh1, self.rh2, self.rh3]
    }

    /// Every margin is positive by more than [`MARGINAL_REL_TOL`] relative to
    /// its scale and the spectral abscissa is negative.
    pub fn is_solvable(&self) -> bool {
        self.stable_rh
            && self.stable_eig
            && self
                .margins()
                .iter()
                .zip(self.scales)
                .all(|(m, s)| *m > MARGINAL_REL_TOL * s)
    }

    /// Smallest margin relative to its scale. Zero on the stability boundary.
    pub fn relative_margin(&self) -> f64 {
        self.margins()
            .iter()
            .zip(self.scales)
            .map(|(m, s)| if s > 0.0 { m / s } else { *m })
            .fold(f64::INFINITY, f64::min)
    }

    pub fn to_error(&self) -> Error {
        Error::Unstable {
            margins: self.margins(),
            spectral_abscissa: self.spectral_abscissa,
        }
    }

    /// `Ok(())` when [`Self::is_solvable`], otherwise an [`Error::Unstable`].
    pub fn require_solvable(&self) -> Result<()> {
        if self.is_solvable() {
            Ok(())
        } else {
            Err(self.to_error())
        }
    }
}

/// The simpler sufficient condition `g_+ < g_-`.
pub fn sufficient_condition(params: &SystemParams) -> bool {
    params.g_plus < params.g_minus
}

/// Evaluates the three Routh-Hurwitz inequalities for the RWA drift matrix and
/// cross-checks them against its eigenvalues.
pub fn routh_hurwitz(params: &SystemParams) -> StabilityReport {
    let k = params.kappa;
    let g = params.gamma_m;
    let gm2 = 4.0 * params.g_minus * params.g_minus;
    let gp2 = 4.0 * params.g_plus * params.g_plus;
    let kg = k * g;
    let delta = gm2 - gp2 + kg;
    let sum = gm2 + gp2 + kg;
    let kg4 = (k + g).powi(4);

    let rh1 = (k + g) * (gm2 - gp2 + g * g + 3.0 * kg + k * k) / 4.0;
    let rh2 = kg4 * delta / 16.0;
    let rh3 = delta * delta / 16.0;
    let scales = [
        (k + g) * (gm2 + gp2 + g * g + 3.0 * kg + k * k) / 4.0,
        kg4 * sum / 16.0,
        sum * sum / 16.0,
    ];

    let abscissa = spectral_abscissa(&drift_matrix(params, 0.0, Mode::Rwa));
    StabilityReport {
        rh1,
        rh2,
        rh3,
        spectral_abscissa: abscissa,
        stable_rh: rh1 > 0.0 && rh2 > 0.0 && rh3 > 0.0,
        stable_eig: abscissa < 0.0,
        scales,
    }
}

/// Largest real part over the eigenvalues of `a`.
pub fn spectral_abscissa(a: &DriftMatrix) -> f64 {
    a.matrix()
        .complex_eigenvalues()
        .iter()
        .map(|z| z.re)
        .fold(f64::NEG_INFINITY, f64::max)
}
