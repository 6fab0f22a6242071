//! Total squeezing over cavity decay rate and thermal occupation, with a
//! reduced grid. Pass `full` to run the complete 100 x 101 map.

use gauss_squeeze::sweep::AxisSpec;
use gauss_squeeze::*;

fn main() -> Result<()> {
    let mut scenario = sweep::preset(Preset::Fig6);
    if std::env::args().nth(1).as_deref() != Some("full") {
        scenario.axes = vec![
            AxisSpec::values("kappa", vec![0.02, 0.1, 0.5, 2.0]),
            AxisSpec::values("n_th", vec![0.0, 10.0, 100.0, 1000.0]),
        ];
    }
    let result = run_sweep(&scenario)?;
    result.write_csv(std::io::stdout().lock())?;
    Ok(())
}
