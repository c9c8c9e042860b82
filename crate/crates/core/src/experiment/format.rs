use std::io::Write;

use super::RunRecord;
use crate::error::{Error, Result};

pub const CSV_HEADER: [&str; 11] = [
    "instance",
    "algorithm",
    "k",
    "z",
    "seed",
    "processed",
    "total",
    "pct",
    "runtime_ms",
    "placed_nodes",
    "status",
];

/// Formats like C's `%.9g`: nine significant digits, trailing zeros removed,
/// scientific notation for exponents below -4 or above 8.
pub fn format_float(x: f64) -> String {
    if x == 0.0 {
        return "0".into();
    }
    if !x.is_finite() {
        return x.to_string();
    }
    let sci = format!("{x:.8e}");
    let (mantissa, exp) = sci.split_once('e').expect("exponent present");
    let exp: i32 = exp.parse().expect("integer exponent");
    if (-4..9).contains(&exp) {
        let decimals = (8 - exp).max(0) as usize;
        trim_zeros(&format!("{x:.decimals$}")).to_string()
    } else {
        let sign = if exp < 0 { '-' } else { '+' };
        format!("{}e{sign}{:02}", trim_zeros(mantissa), exp.abs())
    }
}

fn trim_zeros(s: &str) -> &str {
    if s.contains('.') {
        s.trim_end_matches('0').trim_end_matches('.')
    } else {
        s
    }
}

fn opt(x: Option<f64>) -> String {
    x.map(format_float).unwrap_or_default()
}

pub fn write_csv<W: Write>(records: &[RunRecord], out: W) -> Result<()> {
    let csv_err = |e: csv::Error| Error::Io(e.to_string());
    let mut w = csv::Writer::from_writer(out);
    w.write_record(CSV_HEADER).map_err(csv_err)?;
    for r in records {
        w.write_record([
            r.instance.clone(),
            r.algorithm.name().to_string(),
            r.k.to_string(),
            opt(r.z),
            r.seed.to_string(),
            opt(r.processed),
            format_float(r.total),
            opt(r.pct),
            format_float(r.runtime_ms),
            r.placed_nodes.join(";"),
            r.status.clone(),
        ])
        .map_err(csv_err)?;
    }
    w.flush()?;
    Ok(())
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn matches_printf_g9() {
        let cases = [
            (2.03, "2.03"),
            (1.0, "1"),
            (0.1 + 0.2, "0.3"),
            (1.0 / 3.0, "0.333333333"),
            (123456789.0, "123456789"),
            (1234567890.0, "1.23456789e+09"),
            (0.0001, "0.0001"),
            (0.00001234, "1.234e-05"),
            (-2.5, "-2.5"),
            (99999999.95, "100000000"),
            (999999999.5, "1e+09"),
        ];
        for (x, want) in cases {
            assert_eq!(format_float(x), want, "{x}");
        }
    }
}
