//! Deterministic report serialization: sorted keys and fixed 12-significant-
//! digit float formatting, so identical runs produce byte-identical files.

use serde::Serialize;
use serde_json::ser::Formatter;
use serde_json::Value;
use std::io;

/// Format a float with 12 significant digits, scientific notation.
pub fn format_float(x: f64) -> String {
    if x == 0.0 {
        // normalize the sign of zero
        return "0.00000000000e0".into();
    }
    format!("{:.11e}", x)
}

struct FixedFormatter;

impl Formatter for FixedFormatter {
    fn write_f64<W: ?Sized + io::Write>(&mut self, writer: &mut W, value: f64) -> io::Result<()> {
        writer.write_all(format_float(value).as_bytes())
    }

    fn write_f32<W: ?Sized + io::Write>(&mut self, writer: &mut W, value: f32) -> io::Result<()> {
        self.write_f64(writer, value as f64)
    }
}

/// Canonical JSON bytes: keys sorted (serde_json maps are ordered), floats in
/// fixed 12-digit scientific form, trailing newline.
pub fn canonical_json<T: Serialize>(value: &T) -> Vec<u8> {
    let v: Value = serde_json::to_value(value).expect("serializable report");
    let mut out = Vec::new();
    let mut ser = serde_json::Serializer::with_formatter(&mut out, FixedFormatter);
    v.serialize(&mut ser).expect("JSON serialization");
    out.push(b'\n');
    out
}

/// CSV with a fixed header and the same float format.
pub fn convergence_csv(rows: &[crate::quadrature::ConvergenceRow]) -> String {
    let mut s = String::from("h,residual,observed_order\n");
    for r in rows {
        s.push_str(&format_float(r.h));
        s.push(',');
        s.push_str(&format_float(r.residual));
        s.push(',');
        match r.observed_order {
            Some(o) => s.push_str(&format_float(o)),
            None => s.push_str(""),
        }
        s.push('\n');
    }
    s
}
