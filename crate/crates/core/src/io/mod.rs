//! File formats: dictionary files, TOML configs, CSV result tables and run
//! manifests.

pub mod config;
pub mod dictionary_file;
pub mod manifest;
pub mod table;

/// Fixed 17-significant-digit, locale-independent float formatting.
pub fn format_float(x: f64) -> String {
    format!("{x:.16e}")
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn floats_round_trip_through_text() {
        for x in [0.0, 1.0, 2.0 / 3.0, 1e-300, 12345.678901234567, -0.1] {
            let s = format_float(x);
            assert_eq!(s.parse::<f64>().unwrap(), x, "{s}");
        }
        assert_eq!(format_float(1.5), "1.5000000000000000e0");
    }
}
