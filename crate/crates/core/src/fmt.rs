//! Deterministic number rendering shared by the text formats.

use alloc::format;
use alloc::string::String;

const MIN_SIGNIFICANT: usize = 6;

/// Renders `v` so that parsing the text gives back exactly `v`, padded with
/// trailing zeros to at least six significant digits.
///
/// ```
/// use acetab_core::fmt::decimal;
/// assert_eq!(decimal(0.5), "0.500000");
/// assert_eq!(decimal(116.56), "116.560");
/// assert_eq!(decimal(26.56505117707799), "26.56505117707799");
/// ```
pub fn decimal(v: f64) -> String {
    if v == 0.0 {
        return String::from("0.00000");
    }
    let mut s = format!("{v}");
    if !v.is_finite() {
        return s;
    }
    let sig = significant_digits(&s);
    if sig < MIN_SIGNIFICANT {
        if !s.contains('.') {
            s.push('.');
        }
        for _ in sig..MIN_SIGNIFICANT {
            s.push('0');
        }
    }
    s
}

fn significant_digits(s: &str) -> usize {
    let mut seen_nonzero = false;
    let mut count = 0;
    for c in s.chars().filter(char::is_ascii_digit) {
        if c != '0' {
            seen_nonzero = true;
        }
        if seen_nonzero {
            count += 1;
        }
    }
    count
}

/// Exact decimal rendering of `num / den` with `decimals` fractional digits,
/// rounding half away from zero. Integer arithmetic only.
///
/// Panics if `den` is zero.
pub fn ratio(num: u64, den: u64, decimals: u32) -> String {
    assert!(den != 0, "ratio with zero denominator");
    let scale = 10u128.pow(decimals);
    let scaled = (u128::from(num) * scale * 2 + u128::from(den)) / (u128::from(den) * 2);
    let whole = scaled / scale;
    if decimals == 0 {
        return format!("{whole}");
    }
    let frac = scaled % scale;
    format!("{whole}.{frac:0width$}", width = decimals as usize)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn pads_short_values() {
        assert_eq!(decimal(0.0), "0.00000");
        assert_eq!(decimal(1.0), "1.00000");
        assert_eq!(decimal(100.0), "100.000");
        assert_eq!(decimal(-2.5), "-2.50000");
        assert_eq!(decimal(0.0000001), "0.000000100000");
        assert_eq!(decimal(123456.0), "123456");
    }

    #[test]
    fn ratio_rounds_half_up() {
        assert_eq!(ratio(9, 10, 3), "0.900");
        assert_eq!(ratio(900, 10, 1), "90.0");
        assert_eq!(ratio(10, 10, 1), "1.0");
        assert_eq!(ratio(2, 3, 2), "0.67");
        assert_eq!(ratio(1, 8, 2), "0.13");
        assert_eq!(ratio(5, 2, 0), "3");
    }

    proptest::proptest! {
        #[test]
        fn decimal_round_trips(v in proptest::num::f64::NORMAL | proptest::num::f64::ZERO) {
            let text = decimal(v);
            let back: f64 = text.parse().unwrap();
            proptest::prop_assert!(back == v || (back == 0.0 && v == 0.0));
            proptest::prop_assert!(significant_digits(&text) >= MIN_SIGNIFICANT || v == 0.0);
        }
    }
}
