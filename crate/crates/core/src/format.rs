//! Text formatting shared by exports.

/// Shortest representation that parses back to the same `f64`. Plain
/// notation for moderate magnitudes, scientific otherwise; infinities print
/// as `inf` / `-inf`.
pub fn format_float(v: f64) -> String {
    if v.is_nan() {
        return "nan".into();
    }
    if v.is_infinite() {
        return if v > 0.0 { "inf".into() } else { "-inf".into() };
    }
    let a = v.abs();
    if v == 0.0 || (1e-5..1e16).contains(&a) {
        format!("{v}")
    } else {
        format!("{v:e}")
    }
}
