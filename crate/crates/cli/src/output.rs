use std::fmt::Write as _;
use std::fs;
use std::io;
use std::path::Path;

use serde::Serialize;
use serde_json::ser::{Formatter, PrettyFormatter};

use crate::CliError;

/// `v` with 17 significant digits in exponent form; bit-exact round trip.
pub fn f17(v: f64) -> String {
    format!("{v:.16e}")
}

/// Pretty JSON whose floats are always written by [`f17`]. Non-finite
/// values become `null` before reaching the formatter.
struct F17Formatter<'a>(PrettyFormatter<'a>);

impl Formatter for F17Formatter<'_> {
    fn write_f64<W: ?Sized + io::Write>(&mut self, w: &mut W, v: f64) -> io::Result<()> {
        w.write_all(f17(v).as_bytes())
    }

    fn write_f32<W: ?Sized + io::Write>(&mut self, w: &mut W, v: f32) -> io::Result<()> {
        self.write_f64(w, v as f64)
    }

    fn begin_array<W: ?Sized + io::Write>(&mut self, w: &mut W) -> io::Result<()> {
        self.0.begin_array(w)
    }

    fn end_array<W: ?Sized + io::Write>(&mut self, w: &mut W) -> io::Result<()> {
        self.0.end_array(w)
    }

    fn begin_array_value<W: ?Sized + io::Write>(&mut self, w: &mut W, first: bool) -> io::Result<()> {
        self.0.begin_array_value(w, first)
    }

    fn end_array_value<W: ?Sized + io::Write>(&mut self, w: &mut W) -> io::Result<()> {
        self.0.end_array_value(w)
    }

    fn begin_object<W: ?Sized + io::Write>(&mut self, w: &mut W) -> io::Result<()> {
        self.0.begin_object(w)
    }

    fn end_object<W: ?Sized + io::Write>(&mut self, w: &mut W) -> io::Result<()> {
        self.0.end_object(w)
    }

    fn begin_object_key<W: ?Sized + io::Write>(&mut self, w: &mut W, first: bool) -> io::Result<()> {
        self.0.begin_object_key(w, first)
    }

    fn begin_object_value<W: ?Sized + io::Write>(&mut self, w: &mut W) -> io::Result<()> {
        self.0.begin_object_value(w)
    }

    fn end_object_value<W: ?Sized + io::Write>(&mut self, w: &mut W) -> io::Result<()> {
        self.0.end_object_value(w)
    }
}

pub fn to_json<T: Serialize>(value: &T) -> String {
    let mut buf = Vec::new();
    let mut ser = serde_json::Serializer::with_formatter(&mut buf, F17Formatter(PrettyFormatter::new()));
    value.serialize(&mut ser).expect("report serialization");
    buf.push(b'\n');
    String::from_utf8(buf).expect("JSON is UTF-8")
}

pub fn write_file(path: &Path, contents: &str) -> Result<(), CliError> {
    if let Some(dir) = path.parent() {
        fs::create_dir_all(dir).map_err(|e| CliError::Io(format!("{}: {e}", dir.display())))?;
    }
    fs::write(path, contents).map_err(|e| CliError::Io(format!("{}: {e}", path.display())))
}

/// `t,x,y,z` header and one row per sample.
pub fn trajectory_csv(rows: &[(f64, [f64; 3])]) -> String {
    let mut out = String::from("t,x,y,z\n");
    for (t, [x, y, z]) in rows {
        let _ = writeln!(out, "{},{},{},{}", f17(*t), f17(*x), f17(*y), f17(*z));
    }
    out
}

pub const SVG_SIZE: f64 = 800.0;
const MARGIN: f64 = 0.05 * SVG_SIZE;

fn range(v: impl Iterator<Item = f64>) -> (f64, f64) {
    let (lo, hi) = v.fold((f64::INFINITY, f64::NEG_INFINITY), |(lo, hi), x| (lo.min(x), hi.max(x)));
    if hi > lo {
        (lo, hi)
    } else {
        (lo - 0.5, lo + 0.5)
    }
}

/// Projection of the trajectory onto coordinates `(u, v)` as a single
/// polyline in an 800x800 viewport, autoscaled with a 5% margin.
pub fn projection_svg(rows: &[(f64, [f64; 3])], u: usize, v: usize) -> String {
    const NAMES: [&str; 3] = ["x", "y", "z"];
    let (u0, u1) = range(rows.iter().map(|r| r.1[u]));
    let (v0, v1) = range(rows.iter().map(|r| r.1[v]));
    let span = SVG_SIZE - 2.0 * MARGIN;
    let mut points = String::new();
    for (i, (_, s)) in rows.iter().enumerate() {
        let px = MARGIN + (s[u] - u0) / (u1 - u0) * span;
        let py = SVG_SIZE - MARGIN - (s[v] - v0) / (v1 - v0) * span;
        if i > 0 {
            points.push(' ');
        }
        let _ = write!(points, "{px:.6},{py:.6}");
    }
    let (nu, nv) = (NAMES[u], NAMES[v]);
    let mut out = String::new();
    let _ = writeln!(
        out,
        r#"<svg xmlns="http://www.w3.org/2000/svg" width="800" height="800" viewBox="0 0 800 800">"#
    );
    let _ = writeln!(out, r#"<rect width="800" height="800" fill="white"/>"#);
    let _ = writeln!(
        out,
        r#"<polyline fill="none" stroke="black" stroke-width="0.5" points="{points}"/>"#
    );
    let _ = writeln!(
        out,
        r#"<text x="400" y="792" text-anchor="middle" font-family="monospace" font-size="12">{nu} [{u0:.6}, {u1:.6}]</text>"#
    );
    let _ = writeln!(
        out,
        r#"<text x="12" y="400" text-anchor="middle" font-family="monospace" font-size="12" transform="rotate(-90 12 400)">{nv} [{v0:.6}, {v1:.6}]</text>"#
    );
    out.push_str("</svg>\n");
    out
}
