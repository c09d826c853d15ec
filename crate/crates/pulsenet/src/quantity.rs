//! Physical quantities written as `<number><si-prefix?><unit>`, e.g. `600ps`,
//! `31mA`, `2.555ohm`.

use std::fmt;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum Dimension {
    Second,
    Ampere,
    Volt,
    Ohm,
    Henry,
    Farad,
    Hertz,
    Kelvin,
    Dimensionless,
}

impl Dimension {
    pub fn symbol(self) -> &'static str {
        match self {
            Dimension::Second => "s",
            Dimension::Ampere => "A",
            Dimension::Volt => "V",
            Dimension::Ohm => "ohm",
            Dimension::Henry => "H",
            Dimension::Farad => "F",
            Dimension::Hertz => "Hz",
            Dimension::Kelvin => "K",
            Dimension::Dimensionless => "",
        }
    }
}

impl fmt::Display for Dimension {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Dimension::Dimensionless => f.write_str("dimensionless"),
            d => f.write_str(d.symbol()),
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Quantity {
    pub value: f64,
    pub dim: Dimension,
}

/// Parse failure; `column` is 1-based and counts characters.
#[derive(Debug, Clone, PartialEq, Eq, thiserror::Error)]
#[error("column {column}: {message}")]
pub struct QuantityError {
    pub column: usize,
    pub message: String,
}

const UNITS: &[(&str, Dimension)] = &[
    ("s", Dimension::Second),
    ("A", Dimension::Ampere),
    ("V", Dimension::Volt),
    ("ohm", Dimension::Ohm),
    ("Ohm", Dimension::Ohm),
    ("Ω", Dimension::Ohm),
    ("H", Dimension::Henry),
    ("F", Dimension::Farad),
    ("Hz", Dimension::Hertz),
    ("K", Dimension::Kelvin),
];

const PREFIXES: &[(char, i32)] =
    &[('f', -15), ('p', -12), ('n', -9), ('u', -6), ('µ', -6), ('μ', -6), ('m', -3), ('k', 3), ('M', 6), ('G', 9)];

fn unit(s: &str) -> Option<Dimension> {
    UNITS.iter().find(|(u, _)| *u == s).map(|&(_, d)| d)
}

/// Parses a quantity. The decimal mantissa and the prefix exponent are combined
/// before a single correctly rounded conversion, so `496ps` is exactly the
/// double nearest to 4.96e-10.
pub fn parse_quantity(text: &str) -> Result<Quantity, QuantityError> {
    let err = |byte: usize, message: String| QuantityError { column: text[..byte].chars().count() + 1, message };
    let bytes = text.as_bytes();
    let mut i = 0;
    if i < bytes.len() && (bytes[i] == b'+' || bytes[i] == b'-') {
        i += 1;
    }
    let digits_start = i;
    let mut digits = 0;
    while i < bytes.len() && (bytes[i].is_ascii_digit() || bytes[i] == b'.') {
        digits += usize::from(bytes[i] != b'.');
        i += 1;
    }
    if digits == 0 {
        return Err(err(digits_start, "expected a number".into()));
    }
    let mantissa = &text[..i];
    if mantissa.matches('.').count() > 1 {
        return Err(err(digits_start, format!("malformed number `{mantissa}`")));
    }
    let mut exponent: i32 = 0;
    if i < bytes.len() && (bytes[i] == b'e' || bytes[i] == b'E') {
        let mut j = i + 1;
        if j < bytes.len() && (bytes[j] == b'+' || bytes[j] == b'-') {
            j += 1;
        }
        let exp_digits = j;
        while j < bytes.len() && bytes[j].is_ascii_digit() {
            j += 1;
        }
        if j > exp_digits {
            exponent = text[i + 1..j].parse().map_err(|_| err(i, "exponent out of range".into()))?;
            i = j;
        }
    }
    let suffix = &text[i..];
    let (prefix_exp, dim) = if suffix.is_empty() {
        (0, Dimension::Dimensionless)
    } else if let Some(d) = unit(suffix) {
        (0, d)
    } else {
        let mut chars = suffix.chars();
        let first = chars.next().unwrap_or_default();
        let rest = chars.as_str();
        let prefix = PREFIXES.iter().find(|(p, _)| *p == first).map(|&(_, e)| e);
        match (prefix, unit(rest)) {
            (Some(p), Some(d)) => (p, d),
            (Some(_), None) if !rest.is_empty() => {
                return Err(err(i + first.len_utf8(), format!("unknown unit `{rest}`")));
            }
            (Some(_), None) => return Err(err(i, format!("prefix `{first}` without a unit"))),
            (None, _) => return Err(err(i, format!("unknown unit or prefix `{suffix}`"))),
        }
    };
    let value: f64 = format!("{mantissa}e{}", i64::from(exponent) + i64::from(prefix_exp))
        .parse()
        .map_err(|_| err(0, format!("malformed number `{mantissa}`")))?;
    if !value.is_finite() {
        return Err(err(0, "value out of range".into()));
    }
    Ok(Quantity { value, dim })
}

/// Parses a quantity and checks its dimension. Bare numbers are accepted only
/// for dimensionless targets unless `allow_bare` is set.
pub fn parse_as(text: &str, expected: Dimension, allow_bare: bool) -> Result<f64, QuantityError> {
    let q = parse_quantity(text)?;
    if q.dim == expected || (allow_bare && q.dim == Dimension::Dimensionless) {
        return Ok(q.value);
    }
    let column = text.char_indices().position(|(_, c)| c.is_alphabetic() || c == 'Ω' || c == 'µ').map_or(1, |p| p + 1);
    let message = if q.dim == Dimension::Dimensionless {
        format!("missing unit, expected {expected}")
    } else {
        format!("expected {expected}, found {}", q.dim)
    };
    Err(QuantityError { column: if q.dim == Dimension::Dimensionless { text.chars().count() + 1 } else { column }, message })
}

/// Formats `value` with an engineering prefix, e.g. `600 ps`.
pub fn format_quantity(value: f64, dim: Dimension) -> String {
    if dim == Dimension::Dimensionless {
        return format!("{value:.6}");
    }
    let mag = value.abs();
    let (scale, prefix) = [(1e9, "G"), (1e6, "M"), (1e3, "k"), (1.0, ""), (1e-3, "m"), (1e-6, "u"), (1e-9, "n"), (1e-12, "p")]
        .into_iter()
        .find(|&(s, _)| mag >= s * 0.9995)
        .unwrap_or((1e-15, "f"));
    if value == 0.0 {
        return format!("0 {}", dim.symbol());
    }
    format!("{:.4} {prefix}{}", value / scale, dim.symbol())
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn examples() {
        assert_eq!(parse_quantity("496ps").unwrap(), Quantity { value: 4.96e-10, dim: Dimension::Second });
        assert_eq!(parse_quantity("0s").unwrap(), Quantity { value: 0.0, dim: Dimension::Second });
        assert_eq!(parse_quantity("2.346V").unwrap(), Quantity { value: 2.346, dim: Dimension::Volt });
        assert_eq!(parse_quantity("31mA").unwrap().value, 31e-3);
        assert_eq!(parse_quantity("2.555ohm").unwrap().value, 2.555);
        assert_eq!(parse_quantity("6.184pH").unwrap().value, 6.184e-12);
        assert_eq!(parse_quantity("0.3557nF").unwrap().value, 0.3557e-9);
        assert_eq!(parse_quantity("100kHz").unwrap().value, 100e3);
        assert_eq!(parse_quantity("100MΩ").unwrap().value, 100e6);
        assert_eq!(parse_quantity("1µH").unwrap().value, 1e-6);
        assert_eq!(parse_quantity("-5.511mohm").unwrap().value, -5.511e-3);
        assert_eq!(parse_quantity("1.5e3ps").unwrap().value, 1.5e-9);
        assert_eq!(parse_quantity("300.1K").unwrap(), Quantity { value: 300.1, dim: Dimension::Kelvin });
        assert_eq!(parse_quantity("1e-5").unwrap(), Quantity { value: 1e-5, dim: Dimension::Dimensionless });
    }

    #[test]
    fn errors_carry_position() {
        assert_eq!(parse_quantity("12xs").unwrap_err().column, 3);
        assert_eq!(parse_quantity("12mq").unwrap_err().column, 4);
        assert_eq!(parse_quantity("ps").unwrap_err().column, 1);
        assert_eq!(parse_quantity("1.2.3s").unwrap_err().column, 1);
        assert!(parse_quantity("5m").unwrap_err().message.contains("without a unit"));
    }

    #[test]
    fn dimension_checks() {
        assert_eq!(parse_as("600ps", Dimension::Second, false).unwrap(), 600e-12);
        let e = parse_as("600", Dimension::Second, false).unwrap_err();
        assert!(e.message.contains("missing unit"), "{e}");
        let e = parse_as("600pF", Dimension::Second, false).unwrap_err();
        assert!(e.message.contains("expected s"), "{e}");
        assert_eq!(parse_as("600", Dimension::Second, true).unwrap(), 600.0);
    }

    #[test]
    fn engineering_format() {
        assert_eq!(format_quantity(600e-12, Dimension::Second), "600.0000 ps");
        assert_eq!(format_quantity(41.5e-3, Dimension::Ampere), "41.5000 mA");
        assert_eq!(format_quantity(0.0, Dimension::Ampere), "0 A");
    }
}
