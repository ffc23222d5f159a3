//! Text formatting shared by CSV and JSON exporters.

/// Scientific notation with 17 significant digits, enough to round-trip.
pub fn fmt_f64(x: f64) -> String {
    format!("{x:.16e}")
}

/// One CSV line per row.
pub fn rows_to_csv(rows: usize, cols: usize, data: &[f64]) -> String {
    let mut out = String::with_capacity(rows * cols * 24);
    for r in 0..rows {
        for c in 0..cols {
            if c > 0 {
                out.push(',');
            }
            out.push_str(&fmt_f64(data[r * cols + c]));
        }
        out.push('\n');
    }
    out
}
