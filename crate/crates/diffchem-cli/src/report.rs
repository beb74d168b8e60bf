//! JSON report writing with fixed-precision floats.
//!
//! Every float in a report is printed with ten decimal places so that
//! repeated runs of the same command are byte-identical (the timing field
//! is the one intentional exception, carrying real wall-clock time).

use serde::Serialize;
use serde_json::ser::Formatter;
use std::io;

struct TenDecimals;

fn write_fixed<W: ?Sized + io::Write>(writer: &mut W, value: f64) -> io::Result<()> {
    // energies and other O(1) quantities get ten decimal places; values
    // outside the fixed-point sweet spot keep their information in
    // scientific notation instead of collapsing to zeros
    let magnitude = value.abs();
    if value == 0.0 || (1e-4..1e15).contains(&magnitude) {
        write!(writer, "{value:.10}")
    } else {
        write!(writer, "{value:.10e}")
    }
}

impl Formatter for TenDecimals {
    fn write_f64<W>(&mut self, writer: &mut W, value: f64) -> io::Result<()>
    where
        W: ?Sized + io::Write,
    {
        write_fixed(writer, value)
    }

    fn write_f32<W>(&mut self, writer: &mut W, value: f32) -> io::Result<()>
    where
        W: ?Sized + io::Write,
    {
        write_fixed(writer, value as f64)
    }
}

/// Serializes a report with 10-decimal floats and a trailing newline.
pub fn to_json_string<T: Serialize>(value: &T) -> io::Result<String> {
    let mut buf = Vec::new();
    let mut ser = serde_json::Serializer::with_formatter(&mut buf, TenDecimals);
    value
        .serialize(&mut ser)
        .map_err(|e| io::Error::new(io::ErrorKind::InvalidData, e))?;
    buf.push(b'\n');
    String::from_utf8(buf).map_err(|e| io::Error::new(io::ErrorKind::InvalidData, e))
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn floats_are_fixed_precision() {
        let s = to_json_string(&serde_json::json!({"e": -1.5, "n": 3})).unwrap();
        assert_eq!(s, "{\"e\":-1.5000000000,\"n\":3}\n");
    }

    #[test]
    fn tiny_floats_keep_their_information() {
        let s = to_json_string(&serde_json::json!({"tol": 1e-12, "zero": 0.0})).unwrap();
        assert_eq!(s, "{\"tol\":1.0000000000e-12,\"zero\":0.0000000000}\n");
    }
}
