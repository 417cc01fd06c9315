//! Decimal formatting with six significant digits.

/// `x` in plain decimal notation rounded to six significant digits.
pub fn sig6(x: f64) -> String {
    if x == 0.0 || !x.is_finite() {
        return if x == 0.0 { "0".into() } else { x.to_string() };
    }
    let magnitude = x.abs().log10().floor() as i32;
    let decimals = 5 - magnitude;
    let s = if decimals >= 0 {
        format!("{:.*}", decimals as usize, x)
    } else {
        let scale = 10f64.powi(-decimals);
        format!("{:.0}", (x / scale).round() * scale)
    };
    // Rounding can carry into a new leading digit (9.999995 -> 10.00000).
    let reparsed: f64 = s.parse().expect("formatted number parses");
    if reparsed != 0.0 && (reparsed.abs().log10().floor() as i32) != magnitude {
        sig6(reparsed)
    } else {
        s
    }
}

/// `x` as it reads back after formatting.
pub fn round6(x: f64) -> f64 {
    sig6(x).parse().expect("formatted number parses")
}
