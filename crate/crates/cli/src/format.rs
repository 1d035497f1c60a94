//! Number formatting shared by every table.

/// Formats with ten significant digits: fixed point for magnitudes in
/// `[1e-4, 1e9)`, scientific otherwise.
pub fn num(x: f64) -> String {
    if x == 0.0 {
        return "0".into();
    }
    if !x.is_finite() {
        return if x.is_nan() { "nan".into() } else if x > 0.0 { "inf".into() } else { "-inf".into() };
    }
    let mag = x.abs();
    if (1e-4..1e9).contains(&mag) {
        let exp10 = mag.log10().floor() as i32;
        let decimals = (9 - exp10).max(0) as usize;
        format!("{x:.decimals$}")
    } else {
        format!("{x:.9e}")
    }
}
