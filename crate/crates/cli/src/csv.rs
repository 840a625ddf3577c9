//! Locale-independent CSV with fixed 17-significant-digit decimals.
use std::fmt::Write as _;

/// Positional decimal with exactly 17 significant digits (`0` for zero).
pub fn sig17(x: f64) -> String {
    if x == 0.0 {
        return "0".to_string();
    }
    if !x.is_finite() {
        return format!("{x}");
    }
    let sci = format!("{:.16e}", x.abs());
    let (mantissa, exp) = sci.split_once('e').expect("exponent marker");
    let exp: i32 = exp.parse().expect("integer exponent");
    let digits: String = mantissa.chars().filter(|c| *c != '.').collect();
    let mut out = String::with_capacity(24);
    if x < 0.0 {
        out.push('-');
    }
    if exp < 0 {
        out.push_str("0.");
        for _ in 0..(-exp - 1) {
            out.push('0');
        }
        out.push_str(&digits);
    } else if exp as usize >= digits.len() - 1 {
        out.push_str(&digits);
        for _ in 0..(exp as usize + 1 - digits.len()) {
            out.push('0');
        }
    } else {
        let split = exp as usize + 1;
        out.push_str(&digits[..split]);
        out.push('.');
        out.push_str(&digits[split..]);
    }
    out
}

/// Two-column CSV with a single header row and `\n` line endings.
pub fn two_columns(header: (&str, &str), xs: &[f64], ys: &[f64]) -> String {
    let mut out = String::with_capacity(40 * xs.len() + 16);
    let _ = writeln!(out, "{},{}", header.0, header.1);
    for (x, y) in xs.iter().zip(ys) {
        let _ = writeln!(out, "{},{}", sig17(*x), sig17(*y));
    }
    out
}
