//! On-disk formats: field and surface CSVs, JSON reports.
//!
//! Floats are written with Rust's shortest round-trip formatting, so a
//! re-run from the same configuration reproduces files byte for byte.

use std::fs::File;
use std::io::{BufWriter, Write};
use std::path::Path;

use anyhow::Context;
use flavors_core::bench::{Cell, ErrorSurface};
use flavors_core::SpaceTimeField;
use serde::Serialize;

/// Marker written for masked surface cells.
pub const MASKED: &str = "unstable";

fn create(path: &Path) -> anyhow::Result<BufWriter<File>> {
    if let Some(dir) = path.parent() {
        std::fs::create_dir_all(dir).with_context(|| format!("creating {}", dir.display()))?;
    }
    let f = File::create(path).with_context(|| format!("creating {}", path.display()))?;
    Ok(BufWriter::new(f))
}

/// One row per spatial node: `x, u(x, t_0), u(x, t_1), ...`; the header row
/// is `x` followed by the stored times.
pub fn write_field_csv(path: &Path, field: &SpaceTimeField) -> anyhow::Result<()> {
    let mut w = csv::Writer::from_writer(create(path)?);
    let mut record = Vec::with_capacity(field.n_columns() + 1);
    record.push("x".to_string());
    record.extend(field.times().iter().map(|t| t.to_string()));
    w.write_record(&record)?;
    for (i, x) in field.space_nodes().iter().enumerate() {
        record.clear();
        record.push(x.to_string());
        record.extend((0..field.n_columns()).map(|j| field.value(i, j).to_string()));
        w.write_record(&record)?;
    }
    w.flush()?;
    Ok(())
}

/// First row `H\h, h_0, h_1, ...`; then one row per `H` with the error of
/// each cell, or [`MASKED`] where the cell is not stable.
pub fn write_surface_csv(path: &Path, surface: &ErrorSurface) -> anyhow::Result<()> {
    let mut w = csv::Writer::from_writer(create(path)?);
    let mut record = vec!["H\\h".to_string()];
    record.extend(surface.micro_steps.iter().map(|h| h.to_string()));
    w.write_record(&record)?;
    for (a, big) in surface.macro_steps.iter().enumerate() {
        record.clear();
        record.push(big.to_string());
        for b in 0..surface.micro_steps.len() {
            record.push(match surface.cell(a, b) {
                Cell::Stable(e) => e.to_string(),
                Cell::Unstable | Cell::Invalid => MASKED.to_string(),
            });
        }
        w.write_record(&record)?;
    }
    w.flush()?;
    Ok(())
}

pub fn write_json<T: Serialize>(path: &Path, value: &T) -> anyhow::Result<()> {
    let mut w = create(path)?;
    serde_json::to_writer_pretty(&mut w, value)?;
    w.write_all(b"\n")?;
    w.flush()?;
    Ok(())
}

/// `(H values, h values, cells)`; masked cells are `None`.
pub type SurfaceTable = (Vec<f64>, Vec<f64>, Vec<Vec<Option<f64>>>);

/// Reads back a file written by [`write_surface_csv`].
pub fn read_surface_csv(path: &Path) -> anyhow::Result<SurfaceTable> {
    let mut r = csv::ReaderBuilder::new()
        .has_headers(false)
        .from_path(path)
        .with_context(|| format!("reading {}", path.display()))?;
    let mut rows = r.records();
    let header = rows.next().context("empty surface file")??;
    let micro: Vec<f64> = header.iter().skip(1).map(str::parse).collect::<Result<_, _>>()?;
    let mut macro_steps = Vec::new();
    let mut cells = Vec::new();
    for rec in rows {
        let rec = rec?;
        let mut it = rec.iter();
        macro_steps.push(it.next().context("missing H value")?.parse()?);
        let row =
            it.map(|s| if s == MASKED { Ok(None) } else { s.parse().map(Some) }).collect::<Result<Vec<_>, _>>()?;
        anyhow::ensure!(row.len() == micro.len(), "ragged surface row");
        cells.push(row);
    }
    Ok((macro_steps, micro, cells))
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn field_csv_layout() {
        let dir = tempfile::tempdir().unwrap();
        let mut f = SpaceTimeField::new(2.0, 2);
        f.push_column(0.0, true, &[1.0, -1.0]).unwrap();
        f.push_column(0.5, true, &[0.25, 3.0]).unwrap();
        let p = dir.path().join("field_u.csv");
        write_field_csv(&p, &f).unwrap();
        let text = std::fs::read_to_string(&p).unwrap();
        assert_eq!(text, "x,0,0.5\n0,1,0.25\n1,-1,3\n");
    }

    #[test]
    fn surface_round_trip() {
        let dir = tempfile::tempdir().unwrap();
        let s = ErrorSurface::from_cells(
            vec![0.001, 0.002],
            vec![1e-4, 3e-3],
            vec![Cell::Stable(0.125), Cell::Invalid, Cell::Stable(0.5), Cell::Unstable],
        )
        .unwrap();
        let p = dir.path().join("surface.csv");
        write_surface_csv(&p, &s).unwrap();
        let text = std::fs::read_to_string(&p).unwrap();
        assert_eq!(text.lines().next().unwrap(), "H\\h,0.0001,0.003");
        assert_eq!(text.lines().nth(1).unwrap(), "0.001,0.125,unstable");
        let (big, small, cells) = read_surface_csv(&p).unwrap();
        assert_eq!(big, vec![0.001, 0.002]);
        assert_eq!(small, vec![1e-4, 3e-3]);
        assert_eq!(cells, vec![vec![Some(0.125), None], vec![Some(0.5), None]]);
    }
}
