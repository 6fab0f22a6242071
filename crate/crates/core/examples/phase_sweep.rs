//! Position and momentum squeezing against the bath phase for several
//! squeezing parameters, written as CSV to stdout.

use gauss_squeeze::sweep::DEFAULT_R_SET;
use gauss_squeeze::*;

fn main() -> Result<()> {
    let scenario = sweep::preset_with_r(Preset::Fig2, &DEFAULT_R_SET);
    let result = run_sweep(&scenario)?;
    result.write_csv(std::io::stdout().lock())?;

    for r in DEFAULT_R_SET {
        let rows = result.rows.iter().filter(|row| row.axis_values[0] == r);
        let best = rows
            .filter_map(|row| row.cells[0].as_f64())
            .fold(f64::NEG_INFINITY, f64::max);
        eprintln!("r = {r}: max S_Q = {best:.2} dB");
    }
    Ok(())
}
