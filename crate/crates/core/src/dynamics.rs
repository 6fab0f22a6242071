//! Covariance-matrix dynamics `dV/dt = A(t) V + V A(t)^T + D`.
//!
//! Three routes to the long-time state are provided:
//! * [`steady_state_covariance`] solves the algebraic Lyapunov equation of the
//!   time-independent RWA drift matrix through its 16x16 Kronecker form;
//! * [`evolve_covariance`] integrates the differential equation with fixed-step
//!   classical RK4 in either mode;
//! * [`periodic_steady_state`] finds the `pi`-periodic orbit of the full
//!   time-dependent dynamics as the fixed point of the one-period RK4 map.

use std::f64::consts::PI;
use std::io::Write;

use nalgebra::{Complex, Matrix4, SMatrix, SVector};

use crate::error::{Error, Result};
use crate::model::{diffusion_matrix, drift_matrix, Mode, SqueezedBath, SystemParams, OMEGA_M};
use crate::output::fmt_num;
use crate::stability::routh_hurwitz;

/// Tolerance used by [`check_physicality`].
pub const PHYSICALITY_TOL: f64 = 1e-9;

/// Symmetric second-moment matrix of `(X, Y, Q, P)`, with
/// `V_jk = <U_j U_k + U_k U_j> / 2`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct CovarianceMatrix(Matrix4<f64>);

impl CovarianceMatrix {
    /// Wraps `m` after checking that it is finite and symmetric to `1e-12`
    /// relative to its largest entry.
    pub fn new(m: Matrix4<f64>) -> Result<Self> {
        if m.iter().any(|x| !x.is_finite()) {
            return Err(Error::Unphysical(
                "covariance has non-finite entries".into(),
            ));
        }
        let defect = symmetry_defect(&m);
        if defect > 1e-12 * m.amax().max(1.0) {
            return Err(Error::Unphysical(format!(
                "covariance is not symmetric (defect {defect:.3e})"
            )));
        }
        Ok(CovarianceMatrix(m))
    }

    /// Wraps `(m + m^T) / 2`.
    pub fn symmetrized(m: Matrix4<f64>) -> Self {
        CovarianceMatrix((m + m.transpose()) * 0.5)
    }

    /// Vacuum state of both modes, `I / 2`.
    pub fn vacuum() -> Self {
        CovarianceMatrix(Matrix4::identity() * 0.5)
    }

    /// Uncorrelated vacuum cavity and thermal mechanics,
    /// `diag(1/2, 1/2, n_th + 1/2, n_th + 1/2)`.
    pub fn thermal(n_th: f64) -> Self {
        let m = n_th + 0.5;
        CovarianceMatrix(Matrix4::from_diagonal(&nalgebra::Vector4::new(
            0.5, 0.5, m, m,
        )))
    }

    pub fn matrix(&self) -> &Matrix4<f64> {
        &self.0
    }

    pub fn get(&self, row: usize, col: usize) -> f64 {
        self.0[(row, col)]
    }

    /// Upper triangle in row-major order: `V11, V12, V13, V14, V22, ..., V44`.
    pub fn upper_triangle(&self) -> [f64; 10] {
        let mut out = [0.0; 10];
        let mut k = 0;
        for i in 0..4 {
            for j in i..4 {
                out[k] = self.0[(i, j)];
                k += 1;
            }
        }
        out
    }

    pub fn max_abs_diff(&self, other: &CovarianceMatrix) -> f64 {
        (self.0 - other.0).amax()
    }
}

fn symmetry_defect(m: &Matrix4<f64>) -> f64 {
    (m - m.transpose()).amax()
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct PhysicalityReport {
    pub symmetry_defect: f64,
    /// Smallest eigenvalue of the Hermitian matrix `V + (i/2) Omega`.
    pub min_eigenvalue: f64,
    pub physical: bool,
}

/// Gaussian-state validity: symmetry, non-negative diagonal and the
/// uncertainty relation `V + (i/2) Omega >= 0`.
pub fn check_physicality(v: &CovarianceMatrix) -> PhysicalityReport {
    let m = v.matrix();
    let mut h: Matrix4<Complex<f64>> = m.map(|x| Complex::new(x, 0.0));
    for base in [0, 2] {
        h[(base, base + 1)] += Complex::new(0.0, 0.5);
        h[(base + 1, base)] -= Complex::new(0.0, 0.5);
    }
    let defect = symmetry_defect(m);
    // Hermitian part only; the antisymmetric defect is reported separately.
    let h = (h + h.adjoint()) * Complex::new(0.5, 0.0);
    let min_eigenvalue = h
        .symmetric_eigenvalues()
        .iter()
        .copied()
        .fold(f64::INFINITY, f64::min);
    let diag_ok = (0..4).all(|i| m[(i, i)] >= 0.0);
    PhysicalityReport {
        symmetry_defect: defect,
        min_eigenvalue,
        physical: defect <= 1e-12 * m.amax().max(1.0)
            && diag_ok
            && min_eigenvalue >= -PHYSICALITY_TOL,
    }
}

/// `A V + V A^T + D`.
pub fn lyapunov_rhs(a: &Matrix4<f64>, v: &Matrix4<f64>, d: &Matrix4<f64>) -> Matrix4<f64> {
    a * v + v * a.transpose() + d
}

/// Max-norm of the steady-state Lyapunov residual for `v`.
pub fn lyapunov_residual(params: &SystemParams, bath: &SqueezedBath, v: &CovarianceMatrix) -> f64 {
    let a = drift_matrix(params, 0.0, Mode::Rwa);
    let d = diffusion_matrix(params, bath);
    lyapunov_rhs(a.matrix(), v.matrix(), d.matrix()).amax()
}

/// Column-major vectorization of a 4x4 matrix.
fn vec16(m: &Matrix4<f64>) -> SVector<f64, 16> {
    SVector::<f64, 16>::from_column_slice(m.as_slice())
}

fn unvec16(v: &SVector<f64, 16>) -> Matrix4<f64> {
    Matrix4::from_column_slice(v.as_slice())
}

/// `I (x) A + A (x) I`, the operator of `V -> A V + V A^T` on column-major
/// `vec(V)`.
fn lyapunov_operator(a: &Matrix4<f64>) -> SMatrix<f64, 16, 16> {
    let eye = Matrix4::<f64>::identity();
    let mut k = SMatrix::<f64, 16, 16>::zeros();
    for i in 0..4 {
        for j in 0..4 {
            for p in 0..4 {
                for q in 0..4 {
                    k[(4 * i + p, 4 * j + q)] = eye[(i, j)] * a[(p, q)] + a[(i, j)] * eye[(p, q)];
                }
            }
        }
    }
    k
}

/// Solves `A V + V A^T + D = 0` for the RWA drift matrix.
///
/// Parameters that are unstable or marginal per the Routh-Hurwitz report give
/// [`Error::Unstable`]; a numerically singular system gives
/// [`Error::Singular`].
pub fn steady_state_covariance(
    params: &SystemParams,
    bath: &SqueezedBath,
) -> Result<CovarianceMatrix> {
    params.validate()?;
    routh_hurwitz(params).require_solvable()?;

    let a = drift_matrix(params, 0.0, Mode::Rwa);
    let d = diffusion_matrix(params, bath);
    let k = lyapunov_operator(a.matrix());
    let rhs = -vec16(d.matrix());
    let lu = k.lu();
    let mut x = lu
        .solve(&rhs)
        .ok_or_else(|| Error::Singular("Kronecker Lyapunov operator has a zero pivot".into()))?;
    // One round of iterative refinement.
    let r = rhs - k * x;
    if let Some(dx) = lu.solve(&r) {
        x += dx;
    }
    let v = CovarianceMatrix::symmetrized(unvec16(&x));

    let residual = lyapunov_rhs(a.matrix(), v.matrix(), d.matrix()).amax();
    let scale = d.matrix().amax().max(a.matrix().amax() * v.matrix().amax());
    if !residual.is_finite() || residual > 1e-8 * scale.max(1e-300) {
        return Err(Error::Singular(format!(
            "Lyapunov residual {residual:.3e} after solve"
        )));
    }
    Ok(v)
}

/// Integration settings for [`evolve_covariance`].
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct EvolveOptions {
    pub t_end: f64,
    pub dt: f64,
    pub mode: Mode,
    /// Keep every `sample_every`-th step. The initial and final states are
    /// always kept.
    pub sample_every: usize,
    /// Abort with [`Error::Divergence`] once any entry exceeds this magnitude.
    pub divergence_bound: f64,
}

impl EvolveOptions {
    pub fn new(t_end: f64, dt: f64, mode: Mode) -> Self {
        EvolveOptions {
            t_end,
            dt,
            mode,
            sample_every: 1,
            divergence_bound: 1e12,
        }
    }

    pub fn sample_every(mut self, n: usize) -> Self {
        self.sample_every = n;
        self
    }

    /// Largest step that resolves the `2 omega_m` modulation with 20 points per
    /// period.
    pub fn max_full_dt() -> f64 {
        2.0 * PI / (20.0 * 2.0 * OMEGA_M)
    }

    fn validate(&self) -> Result<()> {
        if !(self.dt > 0.0 && self.dt.is_finite()) {
            return Err(Error::invalid(
                "dt",
                format!("must be > 0, got {}", self.dt),
            ));
        }
        if !(self.t_end >= 0.0 && self.t_end.is_finite()) {
            return Err(Error::invalid(
                "t_end",
                format!("must be >= 0, got {}", self.t_end),
            ));
        }
        if self.mode == Mode::Full && self.dt > Self::max_full_dt() * (1.0 + 1e-12) {
            return Err(Error::invalid(
                "dt",
                format!(
                    "must be <= {:.6} in full mode to resolve the 2 omega_m modulation, got {}",
                    Self::max_full_dt(),
                    self.dt
                ),
            ));
        }
        if self.sample_every == 0 {
            return Err(Error::invalid("sample_every", "must be >= 1"));
        }
        Ok(())
    }
}

/// Time-ordered covariance samples.
#[derive(Debug, Clone, PartialEq)]
pub struct Trajectory {
    samples: Vec<(f64, CovarianceMatrix)>,
    stride: f64,
}

impl Trajectory {
    pub fn samples(&self) -> &[(f64, CovarianceMatrix)] {
        &self.samples
    }

    /// Nominal spacing between stored samples, in units of `1 / omega_m`.
    pub fn stride(&self) -> f64 {
        self.stride
    }

    pub fn last(&self) -> &(f64, CovarianceMatrix) {
        self.samples
            .last()
            .expect("trajectory always holds the initial state")
    }

    pub const CSV_HEADER: [&'static str; 11] = [
        "t", "V11", "V12", "V13", "V14", "V22", "V23", "V24", "V33", "V34", "V44",
    ];

    pub fn write_csv<W: Write>(&self, out: W) -> Result<()> {
        let mut w = csv::Writer::from_writer(out);
        w.write_record(Self::CSV_HEADER)?;
        for (t, v) in &self.samples {
            let mut row = Vec::with_capacity(11);
            row.push(fmt_num(*t));
            row.extend(v.upper_triangle().iter().map(|x| fmt_num(*x)));
            w.write_record(&row)?;
        }
        w.flush()?;
        Ok(())
    }
}

struct Stepper {
    params: SystemParams,
    d: Matrix4<f64>,
    mode: Mode,
    a_const: Matrix4<f64>,
}

impl Stepper {
    fn new(params: &SystemParams, bath: &SqueezedBath, mode: Mode) -> Self {
        Stepper {
            params: *params,
            d: *diffusion_matrix(params, bath).matrix(),
            mode,
            a_const: *drift_matrix(params, 0.0, Mode::Rwa).matrix(),
        }
    }

    fn drift(&self, t: f64) -> Matrix4<f64> {
        match self.mode {
            Mode::Rwa => self.a_const,
            Mode::Full => *drift_matrix(&self.params, t, Mode::Full).matrix(),
        }
    }

    /// One classical RK4 step. `with_noise = false` propagates the homogeneous
    /// part only.
    fn step(&self, v: &Matrix4<f64>, t: f64, h: f64, with_noise: bool) -> Matrix4<f64> {
        let zero = Matrix4::zeros();
        let d = if with_noise { &self.d } else { &zero };
        let a0 = self.drift(t);
        let ah = self.drift(t + 0.5 * h);
        let a1 = self.drift(t + h);
        let k1 = lyapunov_rhs(&a0, v, d);
        let k2 = lyapunov_rhs(&ah, &(v + k1 * (0.5 * h)), d);
        let k3 = lyapunov_rhs(&ah, &(v + k2 * (0.5 * h)), d);
        let k4 = lyapunov_rhs(&a1, &(v + k3 * h), d);
        v + (k1 + (k2 + k3) * 2.0 + k4) * (h / 6.0)
    }

    /// One RK4 step of the fundamental-matrix equation `dX/dt = A(t) X`.
    fn step_linear(&self, x: &Matrix4<f64>, t: f64, h: f64) -> Matrix4<f64> {
        let a0 = self.drift(t);
        let ah = self.drift(t + 0.5 * h);
        let a1 = self.drift(t + h);
        let k1 = a0 * x;
        let k2 = ah * (x + k1 * (0.5 * h));
        let k3 = ah * (x + k2 * (0.5 * h));
        let k4 = a1 * (x + k3 * h);
        x + (k1 + (k2 + k3) * 2.0 + k4) * (h / 6.0)
    }
}

/// Integrates the covariance dynamics from `v0` at `t = 0` to `opts.t_end`.
///
/// Steps have length `opts.dt` except possibly the last, which is shortened to
/// land on `t_end`. Each stored sample is re-symmetrized.
pub fn evolve_covariance(
    v0: &CovarianceMatrix,
    params: &SystemParams,
    bath: &SqueezedBath,
    opts: &EvolveOptions,
) -> Result<Trajectory> {
    params.validate()?;
    opts.validate()?;
    let stepper = Stepper::new(params, bath, opts.mode);

    let n_steps = ((opts.t_end / opts.dt) - 1e-9).ceil().max(0.0) as usize;
    let mut samples = vec![(0.0, *v0)];
    let mut v = *v0.matrix();
    for k in 0..n_steps {
        let t = k as f64 * opts.dt;
        let t_next = if k + 1 == n_steps {
            opts.t_end
        } else {
            (k + 1) as f64 * opts.dt
        };
        v = stepper.step(&v, t, t_next - t, true);
        let magnitude = v.amax();
        if !magnitude.is_finite() || magnitude > opts.divergence_bound {
            return Err(Error::Divergence {
                t: t_next,
                magnitude,
            });
        }
        if (k + 1) % opts.sample_every == 0 || k + 1 == n_steps {
            samples.push((t_next, CovarianceMatrix::symmetrized(v)));
        }
    }
    Ok(Trajectory {
        samples,
        stride: opts.dt * opts.sample_every as f64,
    })
}

/// Relaxation horizon `50 / |spectral abscissa|` of the RWA drift matrix.
pub fn default_horizon(params: &SystemParams) -> Result<f64> {
    let report = routh_hurwitz(params);
    report.require_solvable()?;
    Ok(50.0 / report.spectral_abscissa.abs())
}

/// One period of the asymptotic orbit under the full time-dependent drift.
#[derive(Debug, Clone, PartialEq)]
pub struct PeriodicOrbit {
    /// Samples at `t_k = k pi / n`, `k = 0..n` (the endpoint is excluded).
    pub samples: Vec<(f64, CovarianceMatrix)>,
    /// Largest modulus among the eigenvalues of the one-period linear map.
    pub contraction: f64,
}

impl PeriodicOrbit {
    /// Average over one period.
    pub fn mean(&self) -> CovarianceMatrix {
        let sum = self
            .samples
            .iter()
            .fold(Matrix4::zeros(), |acc, (_, v)| acc + v.matrix());
        CovarianceMatrix::symmetrized(sum / self.samples.len() as f64)
    }
}

/// Default number of RK4 steps per modulation period in full mode.
pub const STEPS_PER_PERIOD: usize = 200;

/// The `pi / omega_m`-periodic covariance orbit reached after relaxation in
/// full mode.
///
/// The one-period RK4 map `V -> L(V) + P0` is assembled column by column and
/// its fixed point solved directly, which is the `t -> infinity` limit of
/// [`evolve_covariance`] sampled at multiples of the period.
pub fn periodic_steady_state(
    params: &SystemParams,
    bath: &SqueezedBath,
    steps_per_period: usize,
) -> Result<PeriodicOrbit> {
    params.validate()?;
    if steps_per_period < 20 {
        return Err(Error::invalid("steps_per_period", "must be >= 20"));
    }
    let stepper = Stepper::new(params, bath, Mode::Full);
    let period = PI / OMEGA_M;
    let h = period / steps_per_period as f64;
    let propagate = |v0: Matrix4<f64>, with_noise: bool| {
        let mut v = v0;
        for k in 0..steps_per_period {
            v = stepper.step(&v, k as f64 * h, h, with_noise);
        }
        v
    };

    let mut lin = SMatrix::<f64, 16, 16>::zeros();
    for col in 0..16 {
        let mut e = Matrix4::zeros();
        e[(col % 4, col / 4)] = 1.0;
        lin.set_column(col, &vec16(&propagate(e, false)));
    }
    let offset = vec16(&propagate(Matrix4::zeros(), true));

    // Multipliers of the covariance map are products of pairs of Floquet
    // multipliers, so the 4x4 monodromy matrix decides contraction. Its
    // eigenvalues are also far better conditioned than those of `lin`, whose
    // spectrum is degenerate.
    let mut monodromy = Matrix4::identity();
    for k in 0..steps_per_period {
        monodromy = stepper.step_linear(&monodromy, k as f64 * h, h);
    }
    let floquet = monodromy
        .complex_eigenvalues()
        .iter()
        .map(|z| z.norm())
        .fold(0.0, f64::max);
    let contraction = floquet * floquet;
    if !(contraction < 1.0 - 1e-14) {
        let rh = routh_hurwitz(params);
        return Err(Error::Unstable {
            margins: rh.margins(),
            spectral_abscissa: floquet.ln() / period,
        });
    }

    let system = SMatrix::<f64, 16, 16>::identity() - lin;
    let fixed = system
        .lu()
        .solve(&offset)
        .ok_or_else(|| Error::Singular("one-period map has a unit multiplier".into()))?;
    let mut v = CovarianceMatrix::symmetrized(unvec16(&fixed)).0;
    let mut samples = Vec::with_capacity(steps_per_period);
    for k in 0..steps_per_period {
        samples.push((k as f64 * h, CovarianceMatrix::symmetrized(v)));
        v = stepper.step(&v, k as f64 * h, h, true);
    }
    Ok(PeriodicOrbit {
        samples,
        contraction,
    })
}

/// Steady-state covariance in the requested mode: the algebraic solution in
/// RWA mode, the period-averaged asymptotic orbit in full mode.
pub fn steady_state(
    params: &SystemParams,
    bath: &SqueezedBath,
    mode: Mode,
) -> Result<CovarianceMatrix> {
    match mode {
        Mode::Rwa => steady_state_covariance(params, bath),
        Mode::Full => Ok(periodic_steady_state(params, bath, STEPS_PER_PERIOD)?.mean()),
    }
}
