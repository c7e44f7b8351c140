//! Shortest round-trip decimal formatting for report files.

/// Shortest string that parses back to `v`; exponent form outside
/// `[1e-5, 1e16)`.
pub fn num(v: f64) -> String {
    let a = v.abs();
    if v == 0.0 || !v.is_finite() || (1e-5..1e16).contains(&a) {
        format!("{v}")
    } else {
        format!("{v:e}")
    }
}
