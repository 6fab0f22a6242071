//! Physical parameters and the linearized quadrature equations of motion.
//!
//! All rates and couplings are expressed in units of the mechanical frequency
//! `omega_m`, which is fixed to 1. Quadratures are ordered `(X, Y, Q, P)`:
//! cavity amplitude and phase, then mechanical position and momentum.

use std::fmt;
use std::str::FromStr;

use nalgebra::Matrix4;
use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// Mechanical frequency. Every other quantity is measured relative to it.
pub const OMEGA_M: f64 = 1.0;

/// How the two-tone drive enters the fluctuation dynamics.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Default, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Mode {
    /// Rotating-wave approximation: terms oscillating at `2 omega_m` are dropped
    /// and the drift matrix is constant.
    #[default]
    Rwa,
    /// Keep the counter-rotating terms; the drift matrix is `pi`-periodic in time.
    Full,
}

impl fmt::Display for Mode {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Mode::Rwa => "rwa",
            Mode::Full => "full",
        })
    }
}

impl FromStr for Mode {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s.to_ascii_lowercase().as_str() {
            "rwa" => Ok(Mode::Rwa),
            "full" => Ok(Mode::Full),
            other => Err(Error::Config(format!(
                "unknown mode `{other}` (expected rwa or full)"
            ))),
        }
    }
}

/// Rates and couplings of the linearized optomechanical system.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct SystemParams {
    /// Cavity energy decay rate.
    pub kappa: f64,
    /// Mechanical dissipation rate.
    pub gamma_m: f64,
    /// Single-photon optomechanical coupling.
    pub g0: f64,
    /// Effective beam-splitter coupling from the red-detuned tone.
    pub g_minus: f64,
    /// Effective parametric coupling from the blue-detuned tone.
    pub g_plus: f64,
    /// Thermal phonon occupation of the mechanical bath.
    pub n_th: f64,
}

impl SystemParams {
    pub fn new(
        kappa: f64,
        gamma_m: f64,
        g0: f64,
        g_minus: f64,
        g_plus: f64,
        n_th: f64,
    ) -> Result<Self> {
        let p = SystemParams {
            kappa,
            gamma_m,
            g0,
            g_minus,
            g_plus,
            n_th,
        };
        p.validate()?;
        Ok(p)
    }

    /// Working point used throughout the phase and ratio scans:
    /// `kappa = 0.1`, `gamma_m = 1e-6`, `g0 = 1e-4`, `g_- = 0.01`,
    /// `g_+ = 0.2 g_-`, `n_th = 0`.
    pub fn reference() -> Self {
        SystemParams {
            kappa: 0.1,
            gamma_m: 1e-6,
            g0: 1e-4,
            g_minus: 0.01,
            g_plus: 0.2 * 0.01,
            n_th: 0.0,
        }
    }

    pub fn omega_m(&self) -> f64 {
        OMEGA_M
    }

    /// Sets `g_plus = ratio * g_minus`.
    pub fn with_ratio(mut self, ratio: f64) -> Self {
        self.g_plus = ratio * self.g_minus;
        self
    }

    /// `g_+ / g_-`, or `NaN` when `g_- = 0`.
    pub fn ratio(&self) -> f64 {
        if self.g_minus == 0.0 {
            f64::NAN
        } else {
            self.g_plus / self.g_minus
        }
    }

    pub fn validate(&self) -> Result<()> {
        let checks: [(&'static str, f64, bool); 6] = [
            ("kappa", self.kappa, self.kappa > 0.0),
            ("gamma_m", self.gamma_m, self.gamma_m > 0.0),
            ("g0", self.g0, self.g0 >= 0.0),
            ("g_minus", self.g_minus, self.g_minus >= 0.0),
            ("g_plus", self.g_plus, self.g_plus >= 0.0),
            ("n_th", self.n_th, self.n_th >= 0.0),
        ];
        for (name, value, ok) in checks {
            if !value.is_finite() {
                return Err(Error::invalid(name, format!("must be finite, got {value}")));
            }
            if !ok {
                let bound = if matches!(name, "kappa" | "gamma_m") {
                    "> 0"
                } else {
                    ">= 0"
                };
                return Err(Error::invalid(
                    name,
                    format!("must be {bound}, got {value}"),
                ));
            }
        }
        Ok(())
    }
}

impl Default for SystemParams {
    fn default() -> Self {
        Self::reference()
    }
}

/// Squeezed-vacuum input of the cavity.
///
/// The non-zero input correlations are `<c_in^dag c_in> = N`,
/// `<c_in c_in^dag> = N + 1` and `<c_in c_in> = M`, with `N = sinh^2 r` and
/// `M = exp(-i theta) sinh r cosh r`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SqueezedBath {
    r: f64,
    theta: f64,
    n: f64,
    m: Complex64,
}

impl SqueezedBath {
    pub fn vacuum() -> Self {
        SqueezedBath {
            r: 0.0,
            theta: 0.0,
            n: 0.0,
            m: Complex64::new(0.0, 0.0),
        }
    }

    pub fn r(&self) -> f64 {
        self.r
    }

    pub fn theta(&self) -> f64 {
        self.theta
    }

    /// Photon-number correlation `N`.
    pub fn n(&self) -> f64 {
        self.n
    }

    /// Anomalous correlation `M`.
    pub fn m(&self) -> Complex64 {
        self.m
    }
}

/// Builds the bath correlations for squeezing parameter `r` and phase `theta`.
pub fn bath_correlations(r: f64, theta: f64) -> Result<SqueezedBath> {
    if !r.is_finite() {
        return Err(Error::invalid("r", format!("must be finite, got {r}")));
    }
    if r < 0.0 {
        return Err(Error::invalid("r", format!("must be >= 0, got {r}")));
    }
    if !theta.is_finite() {
        return Err(Error::invalid(
            "theta",
            format!("must be finite, got {theta}"),
        ));
    }
    let (s, c) = (r.sinh(), r.cosh());
    Ok(SqueezedBath {
        r,
        theta,
        n: s * s,
        m: Complex64::from_polar(s * c, -theta),
    })
}

/// Two-tone drive of the cavity. The tones sit at `omega_c +/- omega_m`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct DriveConfig {
    /// Blue-detuned drive amplitude.
    pub epsilon_plus: f64,
    /// Red-detuned drive amplitude.
    pub epsilon_minus: f64,
    /// Bare cavity frequency.
    pub omega_c: f64,
}

impl DriveConfig {
    pub fn omega_plus(&self) -> f64 {
        self.omega_c + OMEGA_M
    }

    pub fn omega_minus(&self) -> f64 {
        self.omega_c - OMEGA_M
    }
}

/// Mean-field amplitudes of the driven system.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ClassicalSteadyState {
    pub c_plus: Complex64,
    pub c_minus: Complex64,
    pub b_mean: Complex64,
    /// Cavity frequency shifted by the static mechanical displacement.
    pub omega_c_eff: f64,
    pub iterations: usize,
}

impl ClassicalSteadyState {
    /// `omega_m <b> - g0 (|<c>_+|^2 + |<c>_-|^2)`.
    pub fn residual(&self, g0: f64) -> f64 {
        OMEGA_M * self.b_mean.re - g0 * (self.c_plus.norm_sqr() + self.c_minus.norm_sqr())
    }
}

/// Controls for the mean-field fixed-point iteration.
#[derive(Debug, Clone, Copy)]
pub struct FixedPointOptions {
    pub max_iterations: usize,
    pub tolerance: f64,
}

impl Default for FixedPointOptions {
    fn default() -> Self {
        FixedPointOptions {
            max_iterations: 10_000,
            tolerance: 1e-12,
        }
    }
}

fn sideband_amplitude(epsilon: f64, detuning: f64, kappa: f64) -> Complex64 {
    Complex64::new(epsilon, 0.0) / Complex64::new(detuning, kappa / 2.0)
}

/// Mean-field amplitudes from the drive strengths.
///
/// The mechanical displacement is taken from the time-averaged intracavity
/// photon number `|<c>_+|^2 + |<c>_-|^2`; the cross term oscillating at
/// `2 omega_m` is discarded.
pub fn classical_steady_state(
    drive: &DriveConfig,
    params: &SystemParams,
) -> Result<ClassicalSteadyState> {
    classical_steady_state_with(drive, params, FixedPointOptions::default())
}

pub fn classical_steady_state_with(
    drive: &DriveConfig,
    params: &SystemParams,
    opts: FixedPointOptions,
) -> Result<ClassicalSteadyState> {
    params.validate()?;
    if !(drive.epsilon_plus >= 0.0 && drive.epsilon_plus.is_finite()) {
        return Err(Error::invalid("epsilon_plus", "must be finite and >= 0"));
    }
    if !(drive.epsilon_minus >= 0.0 && drive.epsilon_minus.is_finite()) {
        return Err(Error::invalid("epsilon_minus", "must be finite and >= 0"));
    }
    if !drive.omega_c.is_finite() {
        return Err(Error::invalid("omega_c", "must be finite"));
    }

    let amplitudes = |b: f64| {
        let omega_eff = drive.omega_c - 2.0 * params.g0 * b;
        let cp = sideband_amplitude(
            drive.epsilon_plus,
            drive.omega_plus() - omega_eff,
            params.kappa,
        );
        let cm = sideband_amplitude(
            drive.epsilon_minus,
            drive.omega_minus() - omega_eff,
            params.kappa,
        );
        (cp, cm, omega_eff)
    };

    let mut b = 0.0;
    let mut step = f64::INFINITY;
    for iteration in 1..=opts.max_iterations {
        let (cp, cm, _) = amplitudes(b);
        let next = params.g0 * (cp.norm_sqr() + cm.norm_sqr()) / OMEGA_M;
        step = (next - b).abs();
        b = next;
        if !b.is_finite() {
            break;
        }
        if step < opts.tolerance * b.abs().max(1.0) {
            let (c_plus, c_minus, omega_c_eff) = amplitudes(b);
            return Ok(ClassicalSteadyState {
                c_plus,
                c_minus,
                b_mean: Complex64::new(b, 0.0),
                omega_c_eff,
                iterations: iteration,
            });
        }
    }
    Err(Error::NonConvergence {
        iterations: opts.max_iterations,
        residual: step,
    })
}

/// Effective couplings `(g_+, g_-) = g0 (|<c>_+|, |<c>_-|)`.
///
/// The phases of the sideband amplitudes are rotated away so both couplings
/// are real and non-negative.
pub fn effective_couplings(g0: f64, css: &ClassicalSteadyState) -> (f64, f64) {
    (g0 * css.c_plus.norm(), g0 * css.c_minus.norm())
}

/// Linear generator of the quadrature fluctuations.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct DriftMatrix {
    matrix: Matrix4<f64>,
    mode: Mode,
    t: f64,
}

impl DriftMatrix {
    pub fn matrix(&self) -> &Matrix4<f64> {
        &self.matrix
    }

    pub fn mode(&self) -> Mode {
        self.mode
    }

    pub fn t(&self) -> f64 {
        self.t
    }
}

/// Time-dependent coupling coefficients `f_1, f_2, f_3` of the fluctuation
/// equations.
fn coupling_coefficients(params: &SystemParams, t: f64, mode: Mode) -> [Complex64; 3] {
    let gp = Complex64::new(params.g_plus, 0.0);
    let gm = Complex64::new(params.g_minus, 0.0);
    match mode {
        Mode::Rwa => [gp, gm, gm],
        Mode::Full => {
            let up = Complex64::from_polar(1.0, 2.0 * OMEGA_M * t);
            let down = up.conj();
            [gp + gm * up, gm + gp * down, gm + gp * up]
        }
    }
}

/// Drift matrix at time `t` (ignored in RWA mode).
pub fn drift_matrix(params: &SystemParams, t: f64, mode: Mode) -> DriftMatrix {
    let [f1, f2, f3] = coupling_coefficients(params, t, mode);
    let (f12p, f12m) = (f1 + f2, f1 - f2);
    let (f13p, f13m) = (f1 + f3, f1 - f3);
    let k = params.kappa / 2.0;
    let g = params.gamma_m / 2.0;
    #[rustfmt::skip]
    let matrix = Matrix4::new(
        -k,        0.0,       -f12p.im,  f12m.re,
        0.0,       -k,        f12p.re,   f12m.im,
        -f13p.im,  f13m.re,   -g,        0.0,
        f13p.re,   f13m.im,   0.0,       -g,
    );
    DriftMatrix {
        matrix,
        mode,
        t: if mode == Mode::Rwa { 0.0 } else { t },
    }
}

/// Noise source of the covariance dynamics, `D = D_a (+) D_b`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct DiffusionMatrix {
    matrix: Matrix4<f64>,
}

impl DiffusionMatrix {
    pub fn matrix(&self) -> &Matrix4<f64> {
        &self.matrix
    }
}

pub fn diffusion_matrix(params: &SystemParams, bath: &SqueezedBath) -> DiffusionMatrix {
    let n = bath.n();
    let m = bath.m();
    let k = params.kappa / 2.0;
    // M + M* = 2 Re M and i(M* - M) = 2 Im M.
    let xx = k * (2.0 * n + 1.0 + 2.0 * m.re);
    let yy = k * (2.0 * n + 1.0 - 2.0 * m.re);
    let xy = k * 2.0 * m.im;
    let mech = params.gamma_m / 2.0 * (2.0 * params.n_th + 1.0);
    #[rustfmt::skip]
    let matrix = Matrix4::new(
        xx,  xy,  0.0,  0.0,
        xy,  yy,  0.0,  0.0,
        0.0, 0.0, mech, 0.0,
        0.0, 0.0, 0.0,  mech,
    );
    DiffusionMatrix { matrix }
}
