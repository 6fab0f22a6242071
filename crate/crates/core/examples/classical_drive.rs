//! Mean-field amplitudes of the two-tone drive and the effective couplings
//! they produce.

use gauss_squeeze::*;

fn main() -> Result<()> {
    let params = SystemParams::reference();
    let drive = DriveConfig {
        epsilon_plus: 10.0,
        epsilon_minus: 50.0,
        omega_c: 100.0,
    };
    let css = classical_steady_state(&drive, &params)?;
    let (g_plus, g_minus) = effective_couplings(params.g0, &css);
    println!(
        "tones at {} and {}",
        drive.omega_plus(),
        drive.omega_minus()
    );
    println!(
        "|c+| = {:.4}, |c-| = {:.4}, <b> = {:.4e}",
        css.c_plus.norm(),
        css.c_minus.norm(),
        css.b_mean.re
    );
    println!(
        "converged in {} iterations, residual {:.1e}",
        css.iterations,
        css.residual(params.g0)
    );
    println!(
        "g+ = {g_plus:.4e}, g- = {g_minus:.4e}, ratio {:.3}",
        g_plus / g_minus
    );

    let linear = SystemParams {
        g_plus,
        g_minus,
        ..params
    };
    let report = routh_hurwitz(&linear);
    println!("stable: {}", report.is_solvable());
    Ok(())
}
