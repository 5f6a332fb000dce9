//! Deterministic JSON: sorted keys, every float printed with 17 significant digits.

use std::io::{self, Write};

use serde::Serialize;
use serde_json::ser::{Formatter, PrettyFormatter};
use serde_json::Value;

/// Pretty formatter that prints every finite float as `d.dddddddddddddddde±x`.
pub struct FixedFloat<'a>(PrettyFormatter<'a>);

impl FixedFloat<'_> {
    pub fn new() -> Self {
        FixedFloat(PrettyFormatter::with_indent(b"  "))
    }
}

macro_rules! delegate {
    ($($name:ident $(($arg:ident: $ty:ty))?),* $(,)?) => {
        $(
            fn $name<W: ?Sized + Write>(&mut self, w: &mut W $(, $arg: $ty)?) -> io::Result<()> {
                self.0.$name(w $(, $arg)?)
            }
        )*
    };
}

impl Formatter for FixedFloat<'_> {
    fn write_f64<W: ?Sized + Write>(&mut self, w: &mut W, value: f64) -> io::Result<()> {
        write!(w, "{}", format_float(value))
    }

    fn write_f32<W: ?Sized + Write>(&mut self, w: &mut W, value: f32) -> io::Result<()> {
        self.write_f64(w, value as f64)
    }

    delegate!(
        begin_array,
        end_array,
        begin_array_value(first: bool),
        end_array_value,
        begin_object,
        end_object,
        begin_object_key(first: bool),
        begin_object_value,
        end_object_value,
    );
}

/// 17 significant digits in scientific notation; negative zero prints as zero.
pub fn format_float(x: f64) -> String {
    let x = if x == 0.0 { 0.0 } else { x };
    format!("{x:.16e}")
}

/// Serialize through a `Value` so map keys come out sorted.
pub fn to_json<T: Serialize>(report: &T) -> serde_json::Result<String> {
    let value: Value = serde_json::to_value(report)?;
    let mut buf = Vec::new();
    let mut ser = serde_json::Serializer::with_formatter(&mut buf, FixedFloat::new());
    value.serialize(&mut ser)?;
    buf.push(b'\n');
    Ok(String::from_utf8(buf).expect("JSON is UTF-8"))
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn floats_have_seventeen_digits() {
        assert_eq!(format_float(0.25), "2.5000000000000000e-1");
        assert_eq!(format_float(-0.0), "0.0000000000000000e0");
        let x = std::f64::consts::FRAC_PI_4;
        assert_eq!(format_float(x).parse::<f64>().unwrap(), x);
    }

    #[test]
    fn keys_are_sorted_and_output_parses() {
        let v = serde_json::json!({"b": 1.5, "a": [0.1, 2], "c": {"z": null, "y": true}});
        let s = to_json(&v).unwrap();
        assert!(s.find("\"a\"").unwrap() < s.find("\"b\"").unwrap());
        let back: Value = serde_json::from_str(&s).unwrap();
        assert_eq!(back["b"], 1.5);
        assert_eq!(back["a"][1], 2);
    }
}
