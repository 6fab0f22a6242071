//! Steady-state squeezing report at the two-tone working point.
//!
//! `cargo run --example steady_state -- 1.0 0.0` (squeezing parameter, bath phase)

use gauss_squeeze::*;

fn main() -> Result<()> {
    let mut args = std::env::args()
        .skip(1)
        .map(|a| a.parse::<f64>().expect("numeric argument"));
    let r = args.next().unwrap_or(1.0);
    let theta = args.next().unwrap_or(0.0);

    let params = SystemParams::reference().with_ratio(0.2);
    let bath = bath_correlations(r, theta)?;
    let v = steady_state_covariance(&params, &bath)?;
    println!("V =\n{}", v.matrix());
    println!("physicality: {:?}", check_physicality(&v));
    let report = SqueezingReport::from_covariance(&v, &params)?;
    println!("{}", serde_json::to_string_pretty(&report).unwrap());
    Ok(())
}
