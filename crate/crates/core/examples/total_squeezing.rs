//! Total squeezing from the smallest eigenvalue of the mechanical covariance,
//! in both dB conventions, against the bath phase.

use std::f64::consts::PI;

use gauss_squeeze::metrics::linspace;
use gauss_squeeze::*;

fn main() -> Result<()> {
    let params = SystemParams::reference().with_ratio(0.2);
    println!("theta_over_pi,lambda_min,S_total_paper,S_total_norm,S_Q");
    for theta in linspace(0.0, 2.0 * PI, 41) {
        let v = steady_state_covariance(&params, &bath_correlations(1.0, theta)?)?;
        let total = total_squeezing(&reduced_mech_covariance(&v))?;
        let s_q = quadrature_squeezing_db(&v, Quadrature::Q)?;
        println!(
            "{:.3},{:.6e},{:.4},{:.4},{:.4}",
            theta / PI,
            total.lambda_min,
            total.s_total_paper_db,
            total.s_total_norm_db,
            s_q
        );
    }
    Ok(())
}
