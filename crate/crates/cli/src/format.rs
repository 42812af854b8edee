//! Canonical text forms for floats and the CSV/plot artifacts.

use std::fmt::Write;

use vortex_core::wavepackets::IntensityMap;

pub const MAP_HEADER: &str = "m1,m2,intensity";
pub const PARTIAL_MAP_HEADER: &str = "m1,m2,intensity,error_estimate,converged";
pub const FIELD_HEADER: &str = "r,phi,re,im";

/// Shortest decimal that parses back to the same `f64`; never more than 17 significant
/// digits. Negative zero prints as `0.0`.
pub fn float(x: f64) -> String {
    format!("{:?}", x + 0.0)
}

/// `x` rounded to `digits` significant digits, then printed canonically.
pub fn float_sig(x: f64, digits: usize) -> String {
    let rounded: f64 = format!("{:.*e}", digits.saturating_sub(1), x).parse().unwrap_or(x);
    float(rounded)
}

/// Rows in `m1`-outer order, intensities to 9 significant digits.
pub fn map_csv(map: &IntensityMap) -> String {
    let mut out = String::from(MAP_HEADER);
    out.push('\n');
    for c in &map.cells {
        let _ = writeln!(out, "{},{},{}", c.m1, c.m2, float_sig(c.intensity, 9));
    }
    out
}

/// Every cell with its error estimate, for a map that did not converge.
pub fn partial_map_csv(map: &IntensityMap) -> String {
    let mut out = String::from(PARTIAL_MAP_HEADER);
    out.push('\n');
    for c in &map.cells {
        let _ = writeln!(
            out,
            "{},{},{},{},{}",
            c.m1,
            c.m2,
            float_sig(c.intensity, 9),
            float_sig(c.error_estimate, 9),
            c.converged
        );
    }
    out
}

/// A gnuplot script drawing each cell as a square whose area is proportional to its
/// intensity.
pub fn gnuplot_script(map: &IntensityMap, data_path: &str, m: i32) -> String {
    let (m1_lo, m1_hi) = map.m1_range;
    let (m2_lo, m2_hi) = map.m2_range;
    let mut s = String::new();
    let _ = writeln!(s, "# proportional box plot of the (m1, m2) intensity map, m = {m}");
    let _ = writeln!(s, "set datafile separator ','");
    let _ = writeln!(s, "set key off");
    let _ = writeln!(s, "set size ratio -1");
    let _ = writeln!(s, "set xlabel 'm_1'");
    let _ = writeln!(s, "set ylabel 'm_2'");
    let _ = writeln!(s, "set xrange [{}:{}]", m1_lo - 1, m1_hi + 1);
    let _ = writeln!(s, "set yrange [{}:{}]", m2_lo - 1, m2_hi + 1);
    let _ = writeln!(s, "set xtics 1");
    let _ = writeln!(s, "set ytics 1");
    let _ = writeln!(s, "set grid front");
    let _ = writeln!(s, "set style fill solid 0.8 noborder");
    let _ = writeln!(
        s,
        "plot '{}' skip 1 using 1:2:(0.45*sqrt($3)):(0.45*sqrt($3)) with boxxyerror lc rgb '#2f5d8a'",
        data_path.replace('\'', "''")
    );
    s
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn canonical_floats_round_trip() {
        for x in [0.1, 1.0 / 3.0, 1e-300, 6.02214076e23, -2.5, f64::MIN_POSITIVE, 0.30000000000000004] {
            let s = float(x);
            assert_eq!(s.parse::<f64>().unwrap().to_bits(), x.to_bits(), "{s}");
            let mantissa: String = s.split('e').next().unwrap().chars().filter(char::is_ascii_digit).collect();
            assert!(mantissa.trim_start_matches('0').len() <= 17, "{s}");
        }
        assert_eq!(float(-0.0), "0.0");
        assert_eq!(float(1.0), "1.0");
    }

    #[test]
    fn significant_digit_rounding() {
        assert_eq!(float_sig(1.0, 9), "1.0");
        assert_eq!(float_sig(0.123456789123, 9), "0.123456789");
        assert_eq!(float_sig(2.0 / 3.0, 9), "0.666666667");
        assert_eq!(float_sig(1.234567891e-7, 9), "1.23456789e-7");
    }
}
