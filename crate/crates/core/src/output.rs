//! Number formatting shared by every tabular export.

/// Formats a float with 17 significant digits in scientific notation, which
/// round-trips every `f64` and keeps textual diffs stable across runs.
pub fn fmt_num(x: f64) -> String {
    if x.is_nan() {
        "NaN".to_string()
    } else if x.is_infinite() {
        if x > 0.0 { "inf" } else { "-inf" }.to_string()
    } else {
        format!("{x:.16e}")
    }
}

#[cfg(test)]
mod tests {
    use super::fmt_num;

    #[test]
    fn round_trips() {
        for x in [
            0.0,
            -0.0,
            1.0,
            0.1,
            1e-300,
            -3.0f64.sqrt(),
            f64::MAX,
            f64::MIN_POSITIVE,
        ] {
            let s = fmt_num(x);
            assert_eq!(s.parse::<f64>().unwrap().to_bits(), x.to_bits(), "{s}");
        }
        assert_eq!(fmt_num(0.5), "5.0000000000000000e-1");
        assert_eq!(fmt_num(f64::NAN), "NaN");
    }
}
