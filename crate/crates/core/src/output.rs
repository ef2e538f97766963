//! Shared CSV conventions.

/// First line of every CSV file written by this crate.
pub const CSV_SCHEMA: &str = "# esdlab-schema v1";

const SIGNIFICANT: i32 = 12;

/// Formats `x` with 12 significant digits, dropping trailing zeros.
pub fn fmt_sig(x: f64) -> String {
    if !x.is_finite() {
        return x.to_string();
    }
    if x == 0.0 {
        return "0".to_string();
    }
    let exp = x.abs().log10().floor() as i32;
    if !(-5..SIGNIFICANT).contains(&exp) {
        return format!("{:.*e}", (SIGNIFICANT - 1) as usize, x);
    }
    let decimals = (SIGNIFICANT - 1 - exp).max(0) as usize;
    let s = format!("{x:.decimals$}");
    if s.contains('.') {
        s.trim_end_matches('0').trim_end_matches('.').to_string()
    } else {
        s
    }
}

/// Formats an optional value, leaving the field empty when absent.
pub fn fmt_opt(x: Option<f64>) -> String {
    x.map(fmt_sig).unwrap_or_default()
}
