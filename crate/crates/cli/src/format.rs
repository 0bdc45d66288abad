//! Locale-independent numeric text: 12 significant digits, `%g`-style.

use serde_json::Value;

pub const SIG_DIGITS: usize = 12;

/// `%.12g`: fixed notation for exponents in `[-4, 12)`, scientific otherwise,
/// trailing zeros removed.
pub fn num(x: f64) -> String {
    if x == 0.0 {
        return "0".into();
    }
    if x.is_nan() {
        return "nan".into();
    }
    if x.is_infinite() {
        return if x > 0.0 { "inf".into() } else { "-inf".into() };
    }
    let sci = format!("{:.*e}", SIG_DIGITS - 1, x);
    let (mantissa, exp) = sci.split_once('e').unwrap();
    let exp: i32 = exp.parse().unwrap();
    if (-4..SIG_DIGITS as i32).contains(&exp) {
        let decimals = (SIG_DIGITS as i32 - 1 - exp).max(0) as usize;
        trim(format!("{x:.decimals$}"))
    } else {
        let sign = if exp < 0 { '-' } else { '+' };
        format!("{}e{sign}{:02}", trim(mantissa.to_string()), exp.abs())
    }
}

fn trim(s: String) -> String {
    if !s.contains('.') {
        return s;
    }
    s.trim_end_matches('0').trim_end_matches('.').to_string()
}

/// Round to 12 significant digits, keeping NaN and infinities.
pub fn round(x: f64) -> f64 {
    if x.is_finite() {
        num(x).parse().unwrap()
    } else {
        x
    }
}

/// Round every float in a JSON tree; non-finite values become `null`.
pub fn round_json(v: &mut Value) {
    match v {
        Value::Number(n) if n.is_f64() => {
            let x = n.as_f64().unwrap();
            *v = serde_json::Number::from_f64(round(x)).map_or(Value::Null, Value::Number);
        }
        Value::Array(items) => items.iter_mut().for_each(round_json),
        Value::Object(map) => map.values_mut().for_each(round_json),
        _ => {}
    }
}

/// Pretty JSON with rounded floats and a trailing newline.
pub fn json_text<T: serde::Serialize>(value: &T) -> String {
    let mut v = serde_json::to_value(value).expect("serialisable output");
    round_json(&mut v);
    let mut s = serde_json::to_string_pretty(&v).unwrap();
    s.push('\n');
    s
}

/// Comma-separated table with a header row.
pub fn csv<R: AsRef<[String]>>(header: &[&str], rows: &[R]) -> String {
    let mut out = header.join(",");
    out.push('\n');
    for r in rows {
        out.push_str(&r.as_ref().join(","));
        out.push('\n');
    }
    out
}

/// Two numeric columns.
pub fn csv_xy(hx: &str, hy: &str, x: &[f64], y: &[f64]) -> String {
    let rows: Vec<Vec<String>> = x.iter().zip(y).map(|(a, b)| vec![num(*a), num(*b)]).collect();
    csv(&[hx, hy], &rows)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn twelve_significant_digits() {
        assert_eq!(num(1.0 / 120.0), "0.00833333333333");
        assert_eq!(num(1.0), "1");
        assert_eq!(num(-2.5), "-2.5");
        assert_eq!(num(1.0 / 3.0), "0.333333333333");
        assert_eq!(num(123456.0), "123456");
        assert_eq!(num(1e-7), "1e-07");
        assert_eq!(num(-1.5e20), "-1.5e+20");
        assert_eq!(num(999999999999.9), "1e+12");
        assert_eq!(num(0.0000123456789012345), "1.23456789012e-05");
        assert_eq!(num(f64::NAN), "nan");
    }

    #[test]
    fn round_is_idempotent() {
        for x in [1.0 / 7.0, 2.0f64.sqrt() * 1e8, -1e-9 / 3.0] {
            assert_eq!(round(round(x)), round(x));
            assert!((round(x) - x).abs() <= 1e-11 * x.abs());
        }
    }
}
