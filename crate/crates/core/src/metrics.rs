//! Squeezing observables of the mechanical oscillator.
//!
//! Quadrature squeezing is normalized to the vacuum variance `1/2`. The total
//! squeezing degree is reported in two conventions: `s_total_paper_db` is
//! `-10 log10(lambda)` with no vacuum normalization, and `s_total_norm_db` is
//! `-10 log10(lambda / 0.5)`.
//! They differ by exactly `10 log10 2 ~ 3.0103 dB`. Positive values mean
//! squeezing below vacuum; negative values mean anti-squeezing.

use std::f64::consts::{LN_2, PI};
use std::io::Write;

use nalgebra::Matrix2;
use serde::{Deserialize, Serialize};

use crate::dynamics::{steady_state, CovarianceMatrix};
use crate::error::{Error, Result};
use crate::model::{Mode, SqueezedBath, SystemParams};
use crate::output::fmt_num;

/// Variance of either quadrature in the vacuum state.
pub const VACUUM_VARIANCE: f64 = 0.5;

/// `10 log10 2`, the offset between the two total-squeezing conventions.
pub const VACUUM_OFFSET_DB: f64 = 10.0 * LN_2 / std::f64::consts::LN_10;

fn db(x: f64) -> f64 {
    -10.0 * x.log10()
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub enum Quadrature {
    /// Mechanical position.
    Q,
    /// Mechanical momentum.
    P,
}

/// `-10 log10(<dO^2> / 0.5)` for the mechanical position or momentum.
pub fn quadrature_squeezing_db(v: &CovarianceMatrix, which: Quadrature) -> Result<f64> {
    let var = match which {
        Quadrature::Q => v.get(2, 2),
        Quadrature::P => v.get(3, 3),
    };
    if !(var > 0.0) {
        return Err(Error::Unphysical(format!(
            "{which:?} variance must be positive, got {var}"
        )));
    }
    Ok(db(var / VACUUM_VARIANCE))
}

/// Lower-right 2x2 block of the covariance matrix: `[[V33, V34], [V43, V44]]`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ReducedMechCovariance(Matrix2<f64>);

impl ReducedMechCovariance {
    pub fn new(m: Matrix2<f64>) -> Result<Self> {
        if m.iter().any(|x| !x.is_finite()) {
            return Err(Error::Unphysical(
                "reduced covariance has non-finite entries".into(),
            ));
        }
        if (m[(0, 1)] - m[(1, 0)]).abs() > 1e-12 * m.amax().max(1.0) {
            return Err(Error::Unphysical(
                "reduced covariance is not symmetric".into(),
            ));
        }
        Ok(ReducedMechCovariance(m))
    }

    pub fn matrix(&self) -> &Matrix2<f64> {
        &self.0
    }

    pub fn det(&self) -> f64 {
        let m = &self.0;
        m[(0, 0)] * m[(1, 1)] - m[(0, 1)] * m[(1, 0)]
    }

    /// Eigenvalues in ascending order.
    pub fn eigenvalues(&self) -> (f64, f64) {
        let m = &self.0;
        let mean = 0.5 * (m[(0, 0)] + m[(1, 1)]);
        let half_diff = 0.5 * (m[(0, 0)] - m[(1, 1)]);
        let off = 0.5 * (m[(0, 1)] + m[(1, 0)]);
        let radius = half_diff.hypot(off);
        (mean - radius, mean + radius)
    }

    /// Heisenberg bound `det sigma >= 1/4` for a single mode.
    pub fn satisfies_uncertainty(&self) -> bool {
        self.det() >= 0.25 - 1e-9
    }
}

pub fn reduced_mech_covariance(v: &CovarianceMatrix) -> ReducedMechCovariance {
    let m = v.matrix();
    ReducedMechCovariance(Matrix2::new(m[(2, 2)], m[(2, 3)], m[(3, 2)], m[(3, 3)]))
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct TotalSqueezing {
    pub lambda_min: f64,
    pub s_total_paper_db: f64,
    pub s_total_norm_db: f64,
}

/// Total squeezing from the smallest eigenvalue of the reduced covariance.
pub fn total_squeezing(sigma: &ReducedMechCovariance) -> Result<TotalSqueezing> {
    let (lambda, _) = sigma.eigenvalues();
    if !(lambda > 0.0) {
        return Err(Error::Unphysical(format!(
            "smallest eigenvalue of the reduced covariance must be positive, got {lambda}"
        )));
    }
    let paper = db(lambda);
    Ok(TotalSqueezing {
        lambda_min: lambda,
        s_total_paper_db: paper,
        s_total_norm_db: paper - VACUUM_OFFSET_DB,
    })
}

/// Bogoliubov squeezing coefficient `xi` and effective coupling `G_eff`.
///
/// Defined only for `0 <= g_plus < g_minus`.
pub fn bogoliubov_params(g_plus: f64, g_minus: f64) -> Result<(f64, f64)> {
    if !(g_plus >= 0.0 && g_plus.is_finite()) {
        return Err(Error::invalid("g_plus", "must be finite and >= 0"));
    }
    if !(g_plus < g_minus) || !g_minus.is_finite() {
        return Err(Error::invalid(
            "g_plus",
            format!("Bogoliubov mode needs g_plus < g_minus, got {g_plus} >= {g_minus}"),
        ));
    }
    let xi = 0.5 * ((g_minus + g_plus) / (g_minus - g_plus)).ln();
    let g_eff = ((g_minus - g_plus) * (g_minus + g_plus)).sqrt();
    Ok((xi, g_eff))
}

/// Flat summary of the steady-state squeezing.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct SqueezingReport {
    pub s_q_db: f64,
    pub s_p_db: f64,
    pub lambda_min: f64,
    pub s_total_paper_db: f64,
    pub s_total_norm_db: f64,
    /// `None` when `g_plus >= g_minus`.
    pub xi: Option<f64>,
    pub g_eff: Option<f64>,
}

impl SqueezingReport {
    pub fn from_covariance(v: &CovarianceMatrix, params: &SystemParams) -> Result<Self> {
        let total = total_squeezing(&reduced_mech_covariance(v))?;
        let bogoliubov = bogoliubov_params(params.g_plus, params.g_minus).ok();
        Ok(SqueezingReport {
            s_q_db: quadrature_squeezing_db(v, Quadrature::Q)?,
            s_p_db: quadrature_squeezing_db(v, Quadrature::P)?,
            lambda_min: total.lambda_min,
            s_total_paper_db: total.s_total_paper_db,
            s_total_norm_db: total.s_total_norm_db,
            xi: bogoliubov.map(|b| b.0),
            g_eff: bogoliubov.map(|b| b.1),
        })
    }

    pub const FIELDS: [&'static str; 7] = [
        "s_q_db",
        "s_p_db",
        "lambda_min",
        "s_total_paper_db",
        "s_total_norm_db",
        "xi",
        "g_eff",
    ];

    pub fn values(&self) -> [Option<f64>; 7] {
        [
            Some(self.s_q_db),
            Some(self.s_p_db),
            Some(self.lambda_min),
            Some(self.s_total_paper_db),
            Some(self.s_total_norm_db),
            self.xi,
            self.g_eff,
        ]
    }
}

/// Steady state in `mode` followed by [`SqueezingReport::from_covariance`].
pub fn squeezing_report(
    params: &SystemParams,
    bath: &SqueezedBath,
    mode: Mode,
) -> Result<SqueezingReport> {
    let v = steady_state(params, bath, mode)?;
    SqueezingReport::from_covariance(&v, params)
}

/// Uniformly spaced samples of one phase-space axis.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Axis {
    pub min: f64,
    pub max: f64,
    pub points: usize,
}

impl Axis {
    pub fn symmetric(half_width: f64, points: usize) -> Self {
        Axis {
            min: -half_width,
            max: half_width,
            points,
        }
    }

    pub fn values(&self) -> Vec<f64> {
        linspace(self.min, self.max, self.points)
    }

    pub fn step(&self) -> f64 {
        if self.points < 2 {
            0.0
        } else {
            (self.max - self.min) / (self.points - 1) as f64
        }
    }
}

/// `n` evenly spaced points from `start` to `stop` inclusive.
pub fn linspace(start: f64, stop: f64, n: usize) -> Vec<f64> {
    match n {
        0 => Vec::new(),
        1 => vec![start],
        _ => {
            let step = (stop - start) / (n - 1) as f64;
            (0..n)
                .map(|i| {
                    if i == n - 1 {
                        stop
                    } else {
                        start + step * i as f64
                    }
                })
                .collect()
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct WignerSpec {
    pub q: Axis,
    pub p: Axis,
}

impl WignerSpec {
    /// 201 x 201 points spanning `+/- 5 sqrt(max(sigma_11, sigma_22))`.
    pub fn default_for(sigma: &ReducedMechCovariance) -> Self {
        Self::spanning(sigma, 5.0, 201)
    }

    /// Square grid of `points` per axis spanning `+/- widths` standard
    /// deviations of the broader quadrature.
    pub fn spanning(sigma: &ReducedMechCovariance, widths: f64, points: usize) -> Self {
        let m = sigma.matrix();
        let half = widths * m[(0, 0)].max(m[(1, 1)]).sqrt();
        WignerSpec {
            q: Axis::symmetric(half, points),
            p: Axis::symmetric(half, points),
        }
    }
}

/// Wigner function sampled on a Cartesian `(Q, P)` grid.
#[derive(Debug, Clone, PartialEq)]
pub struct WignerGrid {
    pub q: Vec<f64>,
    pub p: Vec<f64>,
    /// `values[i][j] = W(q[i], p[j])`.
    pub values: Vec<Vec<f64>>,
}

impl WignerGrid {
    /// Riemann-sum estimate of the integral over the grid.
    pub fn integral(&self) -> f64 {
        let dq = spacing(&self.q);
        let dp = spacing(&self.p);
        self.values.iter().flatten().sum::<f64>() * dq * dp
    }

    pub fn max(&self) -> f64 {
        self.values
            .iter()
            .flatten()
            .copied()
            .fold(f64::NEG_INFINITY, f64::max)
    }

    /// Three-column CSV `q,p,W`, `q` varying slowest.
    pub fn write_csv<W: Write>(&self, out: W) -> Result<()> {
        let mut w = csv::Writer::from_writer(out);
        w.write_record(["q", "p", "W"])?;
        for (i, q) in self.q.iter().enumerate() {
            for (j, p) in self.p.iter().enumerate() {
                w.write_record([fmt_num(*q), fmt_num(*p), fmt_num(self.values[i][j])])?;
            }
        }
        w.flush()?;
        Ok(())
    }
}

fn spacing(xs: &[f64]) -> f64 {
    if xs.len() < 2 {
        0.0
    } else {
        (xs[xs.len() - 1] - xs[0]) / (xs.len() - 1) as f64
    }
}

/// Normalized Gaussian Wigner function of the reduced state at one point.
pub fn wigner_at(sigma: &ReducedMechCovariance, q: f64, p: f64) -> Result<f64> {
    let det = sigma.det();
    if !(det > 0.0) {
        return Err(Error::Unphysical(format!(
            "Wigner function needs det(sigma) > 0, got {det}"
        )));
    }
    Ok(gaussian(sigma, det, q, p))
}

fn gaussian(sigma: &ReducedMechCovariance, det: f64, q: f64, p: f64) -> f64 {
    let m = sigma.matrix();
    // R^T sigma^-1 R with the explicit 2x2 inverse.
    let quad = (m[(1, 1)] * q * q - (m[(0, 1)] + m[(1, 0)]) * q * p + m[(0, 0)] * p * p) / det;
    (-0.5 * quad).exp() / (2.0 * PI * det.sqrt())
}

pub fn wigner(sigma: &ReducedMechCovariance, spec: &WignerSpec) -> Result<WignerGrid> {
    let det = sigma.det();
    if !(det > 0.0) {
        return Err(Error::Unphysical(format!(
            "Wigner function needs det(sigma) > 0, got {det}"
        )));
    }
    if spec.q.points == 0 || spec.p.points == 0 {
        return Err(Error::invalid("points", "grid axes must be non-empty"));
    }
    let q = spec.q.values();
    let p = spec.p.values();
    let values = q
        .iter()
        .map(|&qi| p.iter().map(|&pj| gaussian(sigma, det, qi, pj)).collect())
        .collect();
    Ok(WignerGrid { q, p, values })
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::assert_relative_eq;
    use nalgebra::Matrix4;

    fn cov_with_mech(v33: f64, v34: f64, v44: f64) -> CovarianceMatrix {
        let mut m = Matrix4::identity() * 0.5;
        m[(2, 2)] = v33;
        m[(2, 3)] = v34;
        m[(3, 2)] = v34;
        m[(3, 3)] = v44;
        CovarianceMatrix::new(m).unwrap()
    }

    fn sigma(a: f64, b: f64, d: f64) -> ReducedMechCovariance {
        ReducedMechCovariance::new(Matrix2::new(a, b, b, d)).unwrap()
    }

    #[test]
    fn quadrature_reference_values() {
        let v = cov_with_mech(0.5, 0.0, 0.5);
        assert_eq!(quadrature_squeezing_db(&v, Quadrature::Q).unwrap(), 0.0);
        let v = cov_with_mech(0.25, 0.0, 1.0);
        assert_relative_eq!(
            quadrature_squeezing_db(&v, Quadrature::Q).unwrap(),
            3.0103,
            epsilon = 1e-4
        );
        assert_relative_eq!(
            quadrature_squeezing_db(&v, Quadrature::P).unwrap(),
            -3.0103,
            epsilon = 1e-4
        );
    }

    #[test]
    fn non_positive_variance_rejected() {
        let mut m = Matrix4::identity() * 0.5;
        m[(2, 2)] = 0.0;
        let v = CovarianceMatrix::new(m).unwrap();
        assert!(quadrature_squeezing_db(&v, Quadrature::Q).is_err());
    }

    #[test]
    fn reduced_block() {
        let s = reduced_mech_covariance(&CovarianceMatrix::vacuum());
        assert_eq!(*s.matrix(), Matrix2::identity() * 0.5);
        let s = reduced_mech_covariance(&cov_with_mech(0.3, 0.1, 2.0));
        assert_eq!(*s.matrix(), Matrix2::new(0.3, 0.1, 0.1, 2.0));
    }

    #[test]
    fn total_squeezing_conventions() {
        let t = total_squeezing(&sigma(0.5, 0.0, 0.5)).unwrap();
        assert_eq!(t.lambda_min, 0.5);
        assert_relative_eq!(t.s_total_paper_db, 3.0103, epsilon = 1e-4);
        assert!(t.s_total_norm_db.abs() < 1e-15);

        let t = total_squeezing(&sigma(0.25, 0.0, 1.0)).unwrap();
        assert_eq!(t.lambda_min, 0.25);
        assert_relative_eq!(t.s_total_norm_db, 3.0103, epsilon = 1e-4);
        assert_relative_eq!(
            t.s_total_paper_db - t.s_total_norm_db,
            VACUUM_OFFSET_DB,
            epsilon = 1e-15
        );
        assert_relative_eq!(VACUUM_OFFSET_DB, 10.0 * 2.0f64.log10(), epsilon = 1e-15);
    }

    #[test]
    fn total_squeezing_rejects_nonpositive() {
        assert!(total_squeezing(&sigma(0.5, 0.5, 0.5)).is_err());
    }

    #[test]
    fn eigenvalues_of_rotated_ellipse() {
        // Rotation by 30 degrees of diag(0.2, 1.25).
        let (c, s) = (30f64.to_radians().cos(), 30f64.to_radians().sin());
        let r = Matrix2::new(c, -s, s, c);
        let m = r * Matrix2::new(0.2, 0.0, 0.0, 1.25) * r.transpose();
        let sym = ReducedMechCovariance::new((m + m.transpose()) * 0.5).unwrap();
        let (lo, hi) = sym.eigenvalues();
        assert_relative_eq!(lo, 0.2, epsilon = 1e-14);
        assert_relative_eq!(hi, 1.25, epsilon = 1e-14);
        assert!(sym.satisfies_uncertainty());
    }

    #[test]
    #[allow(clippy::approx_constant)]
    fn wigner_vacuum_values() {
        let s = sigma(0.5, 0.0, 0.5);
        assert_relative_eq!(wigner_at(&s, 0.0, 0.0).unwrap(), 1.0 / PI, epsilon = 1e-15);
        assert_relative_eq!(wigner_at(&s, 0.0, 0.0).unwrap(), 0.31831, epsilon = 1e-5);
        assert_relative_eq!(
            wigner_at(&s, 1.0, 0.0).unwrap(),
            (-1.0f64).exp() / PI,
            epsilon = 1e-15
        );
        assert_relative_eq!(wigner_at(&s, 1.0, 0.0).unwrap(), 0.11709, epsilon = 1e-5);
    }

    #[test]
    fn wigner_grid_normalization() {
        for s in [
            sigma(0.5, 0.0, 0.5),
            sigma(0.05, 0.03, 5.0),
            sigma(2.0, -0.9, 0.7),
        ] {
            let grid = wigner(&s, &WignerSpec::spanning(&s, 6.0, 201)).unwrap();
            let total = grid.integral();
            assert!((0.99..=1.01).contains(&total), "integral {total}");
            assert!(grid.values.iter().flatten().all(|w| *w >= 0.0));
            assert!(grid.max() > 0.0);
        }
    }

    #[test]
    fn wigner_default_grid_shape_and_csv() {
        let s = sigma(0.5, 0.0, 0.5);
        let spec = WignerSpec::default_for(&s);
        assert_eq!(spec.q.points, 201);
        assert_relative_eq!(spec.q.max, 5.0 * 0.5f64.sqrt(), epsilon = 1e-15);
        let grid = wigner(&s, &WignerSpec::spanning(&s, 5.0, 3)).unwrap();
        let mut buf = Vec::new();
        grid.write_csv(&mut buf).unwrap();
        let text = String::from_utf8(buf).unwrap();
        assert_eq!(text.lines().count(), 10);
        assert!(text.starts_with("q,p,W\n"));
    }

    #[test]
    fn wigner_rejects_singular() {
        let s = sigma(1.0, 1.0, 1.0);
        assert!(wigner(&s, &WignerSpec::spanning(&s, 5.0, 11)).is_err());
        assert!(wigner_at(&s, 0.0, 0.0).is_err());
    }

    #[test]
    fn bogoliubov_values() {
        assert_eq!(bogoliubov_params(0.0, 0.01).unwrap(), (0.0, 0.01));
        let (xi, g) = bogoliubov_params(0.002, 0.01).unwrap();
        assert_relative_eq!(xi, 0.5 * 1.5f64.ln(), epsilon = 1e-15);
        assert_relative_eq!(xi, 0.20273, epsilon = 1e-5);
        assert_relative_eq!(g, 0.01 * 0.96f64.sqrt(), epsilon = 1e-15);
        assert_relative_eq!(g, 0.0097980, epsilon = 1e-7);
    }

    #[test]
    fn bogoliubov_diverges_at_equal_couplings() {
        let (xi, g) = bogoliubov_params(0.01 * (1.0 - 1e-12), 0.01).unwrap();
        assert!(xi > 13.0);
        assert!(g < 1e-7);
        assert!(bogoliubov_params(0.01, 0.01).is_err());
        assert!(bogoliubov_params(0.02, 0.01).is_err());
    }

    #[test]
    fn linspace_endpoints() {
        let xs = linspace(0.0, 1.0, 5);
        assert_eq!(xs, vec![0.0, 0.25, 0.5, 0.75, 1.0]);
        assert_eq!(linspace(2.0, 3.0, 1), vec![2.0]);
        assert!(linspace(0.0, 1.0, 0).is_empty());
    }
}
