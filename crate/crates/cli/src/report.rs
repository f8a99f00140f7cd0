//! Report serialization: fixed-precision JSON, CSV sequences, atomic writes.

use std::io::{self, Write};
use std::path::Path;

use anyhow::{bail, Context};
use dkit_core::{Matrix, SequenceWindow, TimeWindow, Vector};
use serde::Serialize;
use serde_json::ser::{Formatter, PrettyFormatter};

/// Pretty JSON with every float printed to 17 significant digits, so equal
/// values always produce equal bytes.
struct FixedFloats<'a>(PrettyFormatter<'a>);

impl Formatter for FixedFloats<'_> {
    fn write_f64<W: ?Sized + Write>(&mut self, w: &mut W, v: f64) -> io::Result<()> {
        write!(w, "{}", float17(v))
    }

    fn write_f32<W: ?Sized + Write>(&mut self, w: &mut W, v: f32) -> io::Result<()> {
        write!(w, "{}", float17(v as f64))
    }

    fn begin_array<W: ?Sized + Write>(&mut self, w: &mut W) -> io::Result<()> {
        self.0.begin_array(w)
    }

    fn end_array<W: ?Sized + Write>(&mut self, w: &mut W) -> io::Result<()> {
        self.0.end_array(w)
    }

    fn begin_array_value<W: ?Sized + Write>(&mut self, w: &mut W, first: bool) -> io::Result<()> {
        self.0.begin_array_value(w, first)
    }

    fn end_array_value<W: ?Sized + Write>(&mut self, w: &mut W) -> io::Result<()> {
        self.0.end_array_value(w)
    }

    fn begin_object<W: ?Sized + Write>(&mut self, w: &mut W) -> io::Result<()> {
        self.0.begin_object(w)
    }

    fn end_object<W: ?Sized + Write>(&mut self, w: &mut W) -> io::Result<()> {
        self.0.end_object(w)
    }

    fn begin_object_key<W: ?Sized + Write>(&mut self, w: &mut W, first: bool) -> io::Result<()> {
        self.0.begin_object_key(w, first)
    }

    fn begin_object_value<W: ?Sized + Write>(&mut self, w: &mut W) -> io::Result<()> {
        self.0.begin_object_value(w)
    }

    fn end_object_value<W: ?Sized + Write>(&mut self, w: &mut W) -> io::Result<()> {
        self.0.end_object_value(w)
    }
}

/// `d.dddddddddddddddde±x`; a valid JSON number for every finite input.
pub fn float17(v: f64) -> String {
    format!("{v:.16e}")
}

/// Non-finite floats serialize as `null`.
pub fn to_json<T: Serialize>(value: &T) -> anyhow::Result<String> {
    let mut buf = Vec::new();
    let mut ser = serde_json::Serializer::with_formatter(&mut buf, FixedFloats(PrettyFormatter::new()));
    value.serialize(&mut ser)?;
    buf.push(b'\n');
    Ok(String::from_utf8(buf)?)
}

/// Writes through a temporary file in the target directory, then renames.
pub fn write_atomic(path: &Path, contents: &[u8]) -> anyhow::Result<()> {
    let dir = match path.parent() {
        Some(d) if !d.as_os_str().is_empty() => d,
        _ => Path::new("."),
    };
    std::fs::create_dir_all(dir).with_context(|| format!("creating {}", dir.display()))?;
    let mut tmp = tempfile::NamedTempFile::new_in(dir)?;
    tmp.write_all(contents)?;
    tmp.as_file().sync_all()?;
    tmp.persist(path).with_context(|| format!("writing {}", path.display()))?;
    Ok(())
}

pub fn write_json<T: Serialize>(path: &Path, value: &T) -> anyhow::Result<()> {
    write_atomic(path, to_json(value)?.as_bytes())
}

pub fn matrix_rows(m: &Matrix) -> Vec<Vec<f64>> {
    m.row_iter().map(|r| r.iter().copied().collect()).collect()
}

pub fn vector_values(v: &Vector) -> Vec<f64> {
    v.iter().copied().collect()
}

/// CSV with header `t,<prefix>1..<prefix>n`.
pub fn sequence_csv(x: &SequenceWindow, prefix: &str) -> anyhow::Result<Vec<u8>> {
    let mut w = csv::Writer::from_writer(Vec::new());
    let mut header = vec!["t".to_string()];
    header.extend((1..=x.dim()).map(|i| format!("{prefix}{i}")));
    w.write_record(&header)?;
    for (t, v) in x.iter() {
        let mut row = vec![t.to_string()];
        row.extend(v.iter().map(|c| float17(*c)));
        w.write_record(&row)?;
    }
    Ok(w.into_inner()?)
}

/// Reads a sequence CSV: first column `t` (consecutive integers), then one
/// column per component.
pub fn read_sequence_csv(path: &Path) -> anyhow::Result<SequenceWindow> {
    let mut r = csv::Reader::from_path(path).with_context(|| format!("opening {}", path.display()))?;
    let headers = r.headers()?.clone();
    if headers.len() < 2 || headers.get(0).map(str::trim) != Some("t") {
        bail!("expected a header `t,v1,...`, got `{}`", headers.iter().collect::<Vec<_>>().join(","));
    }
    let dim = headers.len() - 1;
    let mut first = None;
    let mut values = Vec::new();
    for (line, record) in r.records().enumerate() {
        let record = record?;
        let row = line + 2;
        let t: i64 = record[0].trim().parse().with_context(|| format!("row {row}: bad t `{}`", &record[0]))?;
        let start = *first.get_or_insert(t);
        if t != start + values.len() as i64 {
            bail!("row {row}: t = {t} breaks the consecutive index sequence");
        }
        let comps = (1..=dim)
            .map(|i| {
                let v: f64 =
                    record[i].trim().parse().with_context(|| format!("row {row}: bad value `{}`", &record[i]))?;
                if !v.is_finite() {
                    bail!("row {row}: non-finite value");
                }
                Ok(v)
            })
            .collect::<anyhow::Result<Vec<f64>>>()?;
        values.push(Vector::from_vec(comps));
    }
    let Some(lo) = first else { bail!("{} has no data rows", path.display()) };
    let window = TimeWindow::new(lo, lo + values.len() as i64 - 1)?;
    Ok(SequenceWindow::new(window, values)?)
}
