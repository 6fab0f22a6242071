//! Wigner function of the steady mechanical state, exported as a `q,p,W` CSV
//! grid ready for a contour plot.
//!
//! `cargo run --example wigner_ellipse -- wigner.csv`

use std::fs::File;
use std::io::BufWriter;

use gauss_squeeze::*;

fn main() -> Result<()> {
    let path = std::env::args()
        .nth(1)
        .unwrap_or_else(|| "wigner.csv".into());
    let params = SystemParams::reference().with_ratio(0.2);
    let v = steady_state_covariance(&params, &bath_correlations(1.0, 0.0)?)?;
    let sigma = reduced_mech_covariance(&v);
    let (lo, hi) = sigma.eigenvalues();
    println!("principal variances {lo:.4e} and {hi:.4e} (vacuum 0.5)");

    let grid = wigner(&sigma, &WignerSpec::default_for(&sigma))?;
    println!(
        "peak {:.4}, grid integral {:.6}",
        grid.max(),
        grid.integral()
    );
    grid.write_csv(BufWriter::new(File::create(&path)?))?;
    println!("wrote {path}");
    Ok(())
}
