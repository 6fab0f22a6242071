//! Routh-Hurwitz margins and spectral abscissa across the coupling ratio.

use gauss_squeeze::metrics::linspace;
use gauss_squeeze::*;

fn main() {
    let base = SystemParams::reference();
    println!("ratio,rh1,rh2,rh3,spectral_abscissa,stable_rh,stable_eig");
    for ratio in linspace(0.9, 1.1, 21) {
        let s = routh_hurwitz(&base.with_ratio(ratio));
        println!(
            "{ratio:.3},{:.4e},{:.4e},{:.4e},{:.4e},{},{}",
            s.rh1, s.rh2, s.rh3, s.spectral_abscissa, s.stable_rh, s.stable_eig
        );
    }
}
