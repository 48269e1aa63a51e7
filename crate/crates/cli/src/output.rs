//! Deterministic output writers: CSV and JSON with a fixed 17-significant-
//! digit float format, the run manifest, and a small self-contained SVG
//! chart for risk curves. Identical runs produce byte-identical payloads.

use std::fs;
use std::io;
use std::path::{Path, PathBuf};

use serde::Serialize;
use sha2::{Digest, Sha256};

/// 17 significant digits, scientific: round-trips every f64.
pub fn fmt_float(v: f64) -> String {
    format!("{v:.16e}")
}

pub fn write_csv(
    path: &Path,
    header: &[&str],
    rows: impl IntoIterator<Item = Vec<String>>,
) -> io::Result<()> {
    let mut out = String::new();
    out.push_str(&header.join(","));
    out.push('\n');
    for row in rows {
        out.push_str(&row.join(","));
        out.push('\n');
    }
    fs::write(path, out)
}

struct SciFloatFormatter;

impl serde_json::ser::Formatter for SciFloatFormatter {
    fn write_f64<W>(&mut self, writer: &mut W, value: f64) -> io::Result<()>
    where
        W: ?Sized + io::Write,
    {
        write!(writer, "{value:.16e}")
    }

    fn write_f32<W>(&mut self, writer: &mut W, value: f32) -> io::Result<()>
    where
        W: ?Sized + io::Write,
    {
        write!(writer, "{value:.16e}")
    }
}

pub fn to_json_string<T: Serialize>(value: &T) -> io::Result<String> {
    let mut buf = Vec::new();
    let mut ser = serde_json::Serializer::with_formatter(&mut buf, SciFloatFormatter);
    value
        .serialize(&mut ser)
        .map_err(|e| io::Error::new(io::ErrorKind::InvalidData, e))?;
    buf.push(b'\n');
    String::from_utf8(buf).map_err(|e| io::Error::new(io::ErrorKind::InvalidData, e))
}

pub fn write_json<T: Serialize>(path: &Path, value: &T) -> io::Result<()> {
    fs::write(path, to_json_string(value)?)
}

pub fn sha256_hex(bytes: &[u8]) -> String {
    let digest = Sha256::digest(bytes);
    digest.iter().map(|b| format!("{b:02x}")).collect()
}

#[derive(Serialize)]
pub struct OutputFile {
    pub path: String,
    pub sha256: String,
}

#[derive(Serialize)]
pub struct RunManifest {
    pub tool_version: &'static str,
    pub command: String,
    pub config_sha256: String,
    pub master_seed: u64,
    pub prng: &'static str,
    pub grid_steps: usize,
    pub horizon: f64,
    pub threads: Option<usize>,
    pub wall_ms: u128,
    pub outputs: Vec<OutputFile>,
}

/// Tracks files written during one command so the manifest can checksum
/// every artifact it leaves behind.
pub struct OutputDir {
    dir: PathBuf,
    written: Vec<OutputFile>,
}

impl OutputDir {
    pub fn create(dir: &Path) -> io::Result<Self> {
        fs::create_dir_all(dir)?;
        Ok(Self {
            dir: dir.to_path_buf(),
            written: Vec::new(),
        })
    }

    fn record(&mut self, name: &str) -> io::Result<()> {
        let full = self.dir.join(name);
        let bytes = fs::read(&full)?;
        self.written.push(OutputFile {
            path: name.to_string(),
            sha256: sha256_hex(&bytes),
        });
        Ok(())
    }

    pub fn csv(
        &mut self,
        name: &str,
        header: &[&str],
        rows: impl IntoIterator<Item = Vec<String>>,
    ) -> io::Result<()> {
        write_csv(&self.dir.join(name), header, rows)?;
        self.record(name)
    }

    pub fn json<T: Serialize>(&mut self, name: &str, value: &T) -> io::Result<()> {
        write_json(&self.dir.join(name), value)?;
        self.record(name)
    }

    pub fn raw(&mut self, name: &str, contents: &str) -> io::Result<()> {
        fs::write(self.dir.join(name), contents)?;
        self.record(name)
    }

    pub fn finish(self, manifest: RunManifest) -> io::Result<()> {
        let mut manifest = manifest;
        manifest.outputs = self.written;
        write_json(&self.dir.join("run_manifest.json"), &manifest)
    }
}

/// Minimal log-log scatter-with-line SVG; no external assets.
pub fn svg_loglog(title: &str, points: &[(f64, f64)], slope: f64, intercept: f64) -> String {
    let (w, h) = (640.0, 440.0);
    let (ml, mr, mt, mb) = (70.0, 20.0, 40.0, 50.0);
    let xs: Vec<f64> = points.iter().map(|p| p.0.log10()).collect();
    let ys: Vec<f64> = points.iter().map(|p| p.1.log10()).collect();
    let (x_min, x_max) = bounds(&xs);
    let (y_min, y_max) = bounds(&ys);
    let px = |x: f64| ml + (x - x_min) / (x_max - x_min) * (w - ml - mr);
    let py = |y: f64| h - mb - (y - y_min) / (y_max - y_min) * (h - mt - mb);

    let mut s = String::new();
    s.push_str(&format!(
        "<svg xmlns=\"http://www.w3.org/2000/svg\" width=\"{w}\" height=\"{h}\" \
         viewBox=\"0 0 {w} {h}\">\n"
    ));
    s.push_str("<rect width=\"100%\" height=\"100%\" fill=\"white\"/>\n");
    s.push_str(&format!(
        "<text x=\"{}\" y=\"24\" font-family=\"sans-serif\" font-size=\"15\" \
         text-anchor=\"middle\">{title}</text>\n",
        w / 2.0
    ));
    s.push_str(&format!(
        "<rect x=\"{ml}\" y=\"{mt}\" width=\"{}\" height=\"{}\" fill=\"none\" \
         stroke=\"black\"/>\n",
        w - ml - mr,
        h - mt - mb
    ));
    // fitted line over the x-range
    let y0 = intercept + slope * x_min * std::f64::consts::LN_10;
    let y1 = intercept + slope * x_max * std::f64::consts::LN_10;
    s.push_str(&format!(
        "<line x1=\"{:.2}\" y1=\"{:.2}\" x2=\"{:.2}\" y2=\"{:.2}\" stroke=\"#888\" \
         stroke-dasharray=\"6 3\"/>\n",
        px(x_min),
        py(y0 / std::f64::consts::LN_10),
        px(x_max),
        py(y1 / std::f64::consts::LN_10),
    ));
    let mut poly = String::from("<polyline fill=\"none\" stroke=\"#1f77b4\" stroke-width=\"1.5\" points=\"");
    for (x, y) in xs.iter().zip(&ys) {
        poly.push_str(&format!("{:.2},{:.2} ", px(*x), py(*y)));
    }
    poly.push_str("\"/>\n");
    s.push_str(&poly);
    for (x, y) in xs.iter().zip(&ys) {
        s.push_str(&format!(
            "<circle cx=\"{:.2}\" cy=\"{:.2}\" r=\"3.5\" fill=\"#1f77b4\"/>\n",
            px(*x),
            py(*y)
        ));
    }
    s.push_str(&format!(
        "<text x=\"{}\" y=\"{}\" font-family=\"sans-serif\" font-size=\"12\" \
         text-anchor=\"middle\">log10(epsilon)</text>\n",
        w / 2.0,
        h - 14.0
    ));
    s.push_str(&format!(
        "<text x=\"18\" y=\"{}\" font-family=\"sans-serif\" font-size=\"12\" \
         text-anchor=\"middle\" transform=\"rotate(-90 18 {})\">log10(risk)</text>\n",
        h / 2.0,
        h / 2.0
    ));
    s.push_str(&format!(
        "<text x=\"{}\" y=\"{}\" font-family=\"sans-serif\" font-size=\"12\">slope {:.4}</text>\n",
        ml + 10.0,
        mt + 18.0,
        slope
    ));
    s.push_str("</svg>\n");
    s
}

fn bounds(v: &[f64]) -> (f64, f64) {
    let lo = v.iter().cloned().fold(f64::INFINITY, f64::min);
    let hi = v.iter().cloned().fold(f64::NEG_INFINITY, f64::max);
    if (hi - lo).abs() < 1e-12 {
        (lo - 0.5, hi + 0.5)
    } else {
        let pad = 0.05 * (hi - lo);
        (lo - pad, hi + pad)
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn float_format_is_17_significant_digits_and_round_trips() {
        let v = std::f64::consts::PI;
        let s = fmt_float(v);
        assert_eq!(s, "3.1415926535897931e0");
        assert_eq!(s.parse::<f64>().unwrap(), v);
        let tiny = 1.2345678901234567e-9;
        assert_eq!(fmt_float(tiny).parse::<f64>().unwrap(), tiny);
    }

    #[test]
    fn json_floats_use_the_fixed_format() {
        #[derive(Serialize)]
        struct S {
            a: f64,
            b: Vec<f64>,
        }
        let s = to_json_string(&S {
            a: 0.5,
            b: vec![1.0, 0.25],
        })
        .unwrap();
        assert_eq!(
            s,
            "{\"a\":5.0000000000000000e-1,\"b\":[1.0000000000000000e0,2.5000000000000000e-1]}\n"
        );
    }

    #[test]
    fn sha256_known_vector() {
        assert_eq!(
            sha256_hex(b"abc"),
            "ba7816bf8f01cfea414140de5dae2223b00361a396177a9cb410ff61f20015ad"
        );
    }

    #[test]
    fn svg_contains_points_and_slope() {
        let svg = svg_loglog("risk", &[(0.25, 1e-2), (0.125, 3e-3), (0.0625, 1e-3)], 1.6, 0.0);
        assert!(svg.starts_with("<svg"));
        assert_eq!(svg.matches("<circle").count(), 3);
        assert!(svg.contains("slope 1.6"));
    }
}
