//! Position squeezing against the coupling ratio `g_plus / g_minus` at zero
//! bath phase. Shows how squeezing grows as the ratio approaches the
//! stability boundary at 1.

use gauss_squeeze::*;

fn main() -> Result<()> {
    let r_set = [0.5, 1.0, 1.5, 2.0];
    let result = run_sweep(&sweep::preset_with_r(Preset::Fig3a, &r_set))?;
    for r in r_set {
        let (ratio, best) = result
            .rows
            .iter()
            .filter(|row| row.axis_values[0] == r)
            .filter_map(|row| Some((row.axis_values[1], row.cells[0].as_f64()?)))
            .fold(
                (0.0, f64::NEG_INFINITY),
                |acc, x| if x.1 > acc.1 { x } else { acc },
            );
        println!("r = {r:3}: max S_Q = {best:6.2} dB at g+/g- = {ratio:.4}");
    }
    Ok(())
}
