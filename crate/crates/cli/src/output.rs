//! CSV and JSON artifacts with bit-stable number formatting.

use std::fs;
use std::io;
use std::path::{Path, PathBuf};

use serde::Serialize;
use serde_json::ser::{Formatter, PrettyFormatter};

use crate::error::{CliError, Result};

/// Seventeen significant digits, enough to round-trip any `f64`.
pub fn fmt_f64(v: f64) -> String {
    format!("{v:.16e}")
}

/// Pretty JSON whose floats use [`fmt_f64`].
struct SciFormatter<'a>(PrettyFormatter<'a>);

impl Formatter for SciFormatter<'_> {
    fn write_f64<W: ?Sized + io::Write>(&mut self, w: &mut W, value: f64) -> io::Result<()> {
        w.write_all(fmt_f64(value).as_bytes())
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
    let mut ser = serde_json::Serializer::with_formatter(&mut buf, SciFormatter(PrettyFormatter::new()));
    value.serialize(&mut ser).expect("in-memory JSON serialisation");
    buf.push(b'\n');
    String::from_utf8(buf).expect("serde_json emits UTF-8")
}

/// Header line plus one comma-joined line per row.
pub fn csv(header: &str, rows: impl IntoIterator<Item = Vec<String>>) -> String {
    let mut out = String::from(header);
    out.push('\n');
    for row in rows {
        out.push_str(&row.join(","));
        out.push('\n');
    }
    out
}

/// Writes a set of files into one directory, refusing to clobber unless
/// told to. All targets are checked before anything is written.
pub struct Emitter {
    dir: PathBuf,
    overwrite: bool,
}

impl Emitter {
    pub fn new(dir: &Path, overwrite: bool) -> Self {
        Self {
            dir: dir.to_path_buf(),
            overwrite,
        }
    }

    pub fn write_all(&self, files: &[(String, String)]) -> Result<Vec<PathBuf>> {
        fs::create_dir_all(&self.dir).map_err(|source| CliError::Io {
            path: self.dir.clone(),
            source,
        })?;
        let paths: Vec<PathBuf> = files.iter().map(|(name, _)| self.dir.join(name)).collect();
        if !self.overwrite {
            if let Some(p) = paths.iter().find(|p| p.exists()) {
                return Err(CliError::Exists(p.clone()));
            }
        }
        for (path, (_, body)) in paths.iter().zip(files) {
            fs::write(path, body).map_err(|source| CliError::Io {
                path: path.clone(),
                source,
            })?;
            log::info!("wrote {}", path.display());
        }
        Ok(paths)
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn float_format() {
        assert_eq!(fmt_f64(1.0), "1.0000000000000000e0");
        assert_eq!(fmt_f64(-0.125), "-1.2500000000000000e-1");
        let x = 0.1 + 0.2;
        assert_eq!(fmt_f64(x).parse::<f64>().unwrap(), x);
    }

    #[test]
    fn json_uses_float_format() {
        #[derive(Serialize)]
        struct S {
            a: f64,
            b: usize,
            c: Vec<f64>,
            d: f64,
        }
        let s = to_json(&S {
            a: 0.5,
            b: 3,
            c: vec![2.0],
            d: f64::NAN,
        });
        assert_eq!(
            s,
            "{\n  \"a\": 5.0000000000000000e-1,\n  \"b\": 3,\n  \"c\": [\n    2.0000000000000000e0\n  ],\n  \"d\": null\n}\n"
        );
        let back: serde_json::Value = serde_json::from_str(&s).unwrap();
        assert_eq!(back["a"], 0.5);
    }

    #[test]
    fn header_only_csv() {
        assert_eq!(csv("n,mean_risk,risk_se,kept_mean", Vec::<Vec<String>>::new()), "n,mean_risk,risk_se,kept_mean\n");
    }
}
