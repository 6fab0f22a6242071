//! Relaxation of the covariance matrix from a thermal mechanical state, in
//! the rotating-wave and full time-dependent descriptions.

use gauss_squeeze::dynamics::periodic_steady_state;
use gauss_squeeze::*;

fn main() -> Result<()> {
    let params = SystemParams {
        kappa: 0.5,
        gamma_m: 0.01,
        g_minus: 0.1,
        g_plus: 0.02,
        n_th: 5.0,
        ..SystemParams::reference()
    };
    let bath = bath_correlations(0.8, 0.0)?;
    let v0 = CovarianceMatrix::thermal(params.n_th);

    let rwa = evolve_covariance(
        &v0,
        &params,
        &bath,
        &EvolveOptions::new(200.0, 0.05, Mode::Rwa).sample_every(200),
    )?;
    let full = evolve_covariance(
        &v0,
        &params,
        &bath,
        &EvolveOptions::new(200.0, 0.05, Mode::Full).sample_every(200),
    )?;
    println!("t,V33_rwa,V33_full");
    for ((t, a), (_, b)) in rwa.samples().iter().zip(full.samples()) {
        println!("{t:.1},{:.6},{:.6}", a.get(2, 2), b.get(2, 2));
    }

    let algebraic = steady_state_covariance(&params, &bath)?;
    let orbit = periodic_steady_state(&params, &bath, 200)?;
    eprintln!(
        "RWA gap to algebraic steady state: {:.2e}",
        rwa.last().1.max_abs_diff(&algebraic)
    );
    eprintln!(
        "period-averaged V33 in full mode: {:.6}",
        orbit.mean().get(2, 2)
    );
    Ok(())
}
