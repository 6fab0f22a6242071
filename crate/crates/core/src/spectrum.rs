//! Homodyne spectrum of the cavity output field.
//!
//! Solving the Fourier-transformed RWA Langevin equations for the cavity
//! fluctuation and applying `c_out = sqrt(kappa) c - c_in` expresses a measured
//! output quadrature `Z_phi(omega)` through the input noise quadratures:
//!
//! ```text
//! Z_out = A X_in + B Y_in + E Q_in + F P_in
//! A = R cos(phi),  B = R sin(phi),  R = (2 kappa u - d) / d
//! E = 4 sqrt(kappa gamma_m) sin(phi) (g+ + g-) / d
//! F = 4 sqrt(kappa gamma_m) cos(phi) (g+ - g-) / d
//! u = gamma_m - 2 i omega,  v = kappa - 2 i omega,  d = 4 g-^2 - 4 g+^2 + u v
//! ```
//!
//! Frequencies are measured in the frame rotating with the cavity, in units of
//! `omega_m`. [`CoefficientForm::AsPrinted`] substitutes `v` for `u` in the
//! reflection numerator; that variant does not reduce to a unit-modulus
//! reflection when the couplings vanish and is kept only for comparison.

use std::io::Write;

use num_complex::Complex64;
use rayon::prelude::*;
use serde::Serialize;

use crate::error::{Error, Result};
use crate::metrics::linspace;
use crate::model::{SqueezedBath, SystemParams};
use crate::output::fmt_num;
use crate::stability::routh_hurwitz;

/// Largest tolerated imaginary part of a spectral density sample.
pub const IMAG_TOL: f64 = 1e-10;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize)]
pub enum CoefficientForm {
    /// Reflection numerator `2 kappa u(omega) - d(omega)`.
    #[default]
    Corrected,
    /// Reflection numerator `2 kappa v(omega) - d(omega)`.
    AsPrinted,
}

#[derive(Debug, Clone, PartialEq)]
pub struct SpectrumConfig {
    /// Homodyne phase in radians.
    pub phi: f64,
    pub omegas: Vec<f64>,
    pub form: CoefficientForm,
}

impl SpectrumConfig {
    /// 1001 points over `[-5 kappa, 5 kappa]`.
    pub fn default_grid(params: &SystemParams, phi: f64) -> Self {
        SpectrumConfig {
            phi,
            omegas: linspace(-5.0 * params.kappa, 5.0 * params.kappa, 1001),
            form: CoefficientForm::Corrected,
        }
    }

    pub fn with_form(mut self, form: CoefficientForm) -> Self {
        self.form = form;
        self
    }

    fn validate(&self) -> Result<()> {
        if !self.phi.is_finite() {
            return Err(Error::invalid("phi", "must be finite"));
        }
        if self.omegas.iter().any(|w| !w.is_finite()) {
            return Err(Error::invalid("omega", "grid must be finite"));
        }
        if self.omegas.windows(2).any(|w| w[1] < w[0]) {
            return Err(Error::invalid("omega", "grid must be sorted ascending"));
        }
        Ok(())
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SpectrumCoefficients {
    pub a: Complex64,
    pub b: Complex64,
    pub e: Complex64,
    pub f: Complex64,
    pub u: Complex64,
    pub v: Complex64,
    pub d: Complex64,
}

pub fn spectrum_coefficients(
    params: &SystemParams,
    omega: f64,
    phi: f64,
    form: CoefficientForm,
) -> Result<SpectrumCoefficients> {
    let kappa = params.kappa;
    let u = Complex64::new(params.gamma_m, -2.0 * omega);
    let v = Complex64::new(kappa, -2.0 * omega);
    let coupling = 4.0 * (params.g_minus * params.g_minus - params.g_plus * params.g_plus);
    let d = u * v + coupling;
    if d.norm() == 0.0 || !d.norm().is_finite() {
        return Err(Error::Singular(format!(
            "d(omega) vanishes at omega = {omega}"
        )));
    }
    let numerator = match form {
        CoefficientForm::Corrected => 2.0 * kappa * u,
        CoefficientForm::AsPrinted => 2.0 * kappa * v,
    };
    let reflection = (numerator - d) / d;
    let thermal = 4.0 * (kappa * params.gamma_m).sqrt() / d;
    let (s, c) = phi.sin_cos();
    Ok(SpectrumCoefficients {
        a: reflection * c,
        b: reflection * s,
        e: thermal * s * (params.g_plus + params.g_minus),
        f: thermal * c * (params.g_plus - params.g_minus),
        u,
        v,
        d,
    })
}

/// Complex spectral density at one frequency, before the reality check.
pub fn spectral_density(
    params: &SystemParams,
    bath: &SqueezedBath,
    omega: f64,
    phi: f64,
    form: CoefficientForm,
) -> Result<Complex64> {
    let pos = spectrum_coefficients(params, omega, phi, form)?;
    let neg = spectrum_coefficients(params, -omega, phi, form)?;
    let n = bath.n();
    let m = bath.m();
    let mc = m.conj();
    let i = Complex64::i();
    let one = Complex64::new(1.0, 0.0);
    let xx = 2.0 * n + 1.0 + m + mc;
    let yy = 2.0 * n + 1.0 - m - mc;
    let s = 0.5 * pos.a * neg.a * xx
        + 0.5 * pos.b * neg.b * yy
        + 0.5 * i * pos.a * neg.b * (one - m + mc)
        + 0.5 * i * pos.b * neg.a * (mc - m - one)
        + (pos.e * neg.e + pos.f * neg.f) * (params.n_th + 0.5);
    Ok(s)
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct SpectrumSample {
    pub omega: f64,
    #[serde(rename = "S")]
    pub s: f64,
    pub phi: f64,
}

/// Output spectral density over the configured grid, in grid order.
pub fn output_spectrum(
    params: &SystemParams,
    bath: &SqueezedBath,
    config: &SpectrumConfig,
) -> Result<Vec<SpectrumSample>> {
    params.validate()?;
    config.validate()?;
    routh_hurwitz(params).require_solvable()?;
    config
        .omegas
        .par_iter()
        .map(|&omega| {
            let s = spectral_density(params, bath, omega, config.phi, config.form)?;
            if s.im.abs() > IMAG_TOL * s.re.abs().max(1.0) {
                return Err(Error::Unphysical(format!(
                    "spectral density has imaginary part {:.3e} at omega = {omega}",
                    s.im
                )));
            }
            Ok(SpectrumSample {
                omega,
                s: s.re,
                phi: config.phi,
            })
        })
        .collect()
}

pub fn write_spectrum_csv<W: Write>(samples: &[SpectrumSample], out: W) -> Result<()> {
    let mut w = csv::Writer::from_writer(out);
    w.write_record(["omega", "S", "phi"])?;
    for s in samples {
        w.write_record([fmt_num(s.omega), fmt_num(s.s), fmt_num(s.phi)])?;
    }
    w.flush()?;
    Ok(())
}
