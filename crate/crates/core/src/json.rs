//! JSON number formatting shared by reports.

use serde::{Serialize, Serializer};
use serde_json::value::RawValue;

/// `x` with 17 significant digits, in plain decimal notation when the
/// exponent is in `[-5, 17)` and scientific notation otherwise. Trailing
/// zeros after the decimal point are dropped, keeping at least one digit.
/// Non-finite values become `null`.
pub fn sig17(x: f64) -> String {
    if !x.is_finite() {
        return "null".into();
    }
    let sci = format!("{:.16e}", x);
    let (mantissa, exp) = sci.split_once('e').expect("exponent present");
    let exp: i32 = exp.parse().expect("integer exponent");
    let negative = mantissa.starts_with('-');
    let digits: String = mantissa.chars().filter(|c| c.is_ascii_digit()).collect();
    let sign = if negative { "-" } else { "" };
    if !(-5..17).contains(&exp) {
        return format!("{sign}{}.{}e{exp}", &digits[..1], trim(&digits[1..]));
    }
    if exp >= 0 {
        let split = exp as usize + 1;
        format!("{sign}{}.{}", &digits[..split], trim(&digits[split..]))
    } else {
        let zeros = "0".repeat((-exp - 1) as usize);
        format!("{sign}0.{}", trim(&format!("{zeros}{digits}")))
    }
}

fn trim(frac: &str) -> &str {
    let t = frac.trim_end_matches('0');
    if t.is_empty() {
        "0"
    } else {
        t
    }
}

/// Serializes an `f64` through [`sig17`].
pub fn serialize_sig17<S: Serializer>(x: &f64, serializer: S) -> Result<S::Ok, S::Error> {
    let raw = RawValue::from_string(sig17(*x)).map_err(serde::ser::Error::custom)?;
    raw.serialize(serializer)
}

/// An `f64` that serializes through [`sig17`].
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct Sig17(pub f64);

impl Serialize for Sig17 {
    fn serialize<S: Serializer>(&self, serializer: S) -> Result<S::Ok, S::Error> {
        serialize_sig17(&self.0, serializer)
    }
}
