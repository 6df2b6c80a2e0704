//! Snapshot, slice, energy-series and VTK writers.

use crate::config::Axis;
use crate::error::SvmError;
use crate::fv2d::{FieldState, Grid2D, LedgerEntry};
use crate::linalg::Vec2;
use crate::model::{free_energy, strain_from_state, CellState, PhysicalParams};
use std::fmt::Write as _;
use std::io::{self, BufRead, Write};
use std::path::Path;

pub const SNAPSHOT_COLUMNS: [&str; 18] = [
    "x", "y", "H", "Ux", "Uy", "Fxa", "Fya", "Fxb", "Fyb", "Aaa", "Aab", "Abb", "Acc", "Bxx",
    "Bxy", "Byy", "Bzz", "E",
];
pub const SLICE_COLUMNS: [&str; 9] = ["position", "H", "Ux", "Uy", "Bzz", "Bxx", "Bxy", "Byy", "E"];
pub const ENERGY_COLUMNS: [&str; 7] = [
    "step",
    "t",
    "dt",
    "E_total",
    "boundary_flux",
    "dissipation",
    "residual",
];

#[derive(Debug, thiserror::Error)]
pub enum OutputError {
    #[error(transparent)]
    Io(#[from] io::Error),
    #[error("line {line}: {msg}")]
    Format { line: usize, msg: String },
    #[error("slice coordinate {at} outside [{lo}, {hi}]")]
    OutOfDomain { at: f64, lo: f64, hi: f64 },
    #[error(transparent)]
    Solver(#[from] SvmError),
}

/// `%.12e` as printed by C.
pub fn fmt_sci(x: f64) -> String {
    if !x.is_finite() {
        return format!("{x}");
    }
    let s = format!("{x:.12e}");
    let (mant, exp) = s.split_once('e').expect("exponent");
    let exp: i32 = exp.parse().expect("exponent");
    let sign = if exp < 0 { '-' } else { '+' };
    format!("{mant}e{sign}{:02}", exp.abs())
}

fn join(values: &[f64]) -> String {
    let mut out = String::new();
    for (k, v) in values.iter().enumerate() {
        if k > 0 {
            out.push(',');
        }
        out.push_str(&fmt_sci(*v));
    }
    out
}

/// One snapshot row, in [`SNAPSHOT_COLUMNS`] order.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct SnapshotRow(pub [f64; 18]);

impl SnapshotRow {
    pub fn from_state(x: Vec2, s: &CellState, p: &PhysicalParams) -> Self {
        let st = strain_from_state(s);
        let (f, a, b) = (s.f.m, s.a.m, st.b.m);
        SnapshotRow([
            x[0],
            x[1],
            s.h,
            s.u[0],
            s.u[1],
            f[0][0],
            f[1][0],
            f[0][1],
            f[1][1],
            a[0][0],
            a[0][1],
            a[1][1],
            s.acc,
            b[0][0],
            b[0][1],
            b[1][1],
            st.bzz,
            free_energy(s, p),
        ])
    }

    pub fn get(&self, column: &str) -> Option<f64> {
        SNAPSHOT_COLUMNS
            .iter()
            .position(|c| *c == column)
            .map(|k| self.0[k])
    }

    pub fn position(&self) -> Vec2 {
        [self.0[0], self.0[1]]
    }

    fn slice_record(&self, position: f64) -> SliceRecord {
        let r = &self.0;
        SliceRecord([position, r[2], r[3], r[4], r[16], r[13], r[14], r[15], r[17]])
    }
}

/// Rows in grid order, `j * nx + i`.
pub fn snapshot_rows(
    fs: &FieldState,
    grid: &Grid2D,
    p: &PhysicalParams,
) -> Result<Vec<SnapshotRow>, SvmError> {
    let prims = fs.primitives(grid)?;
    let mut out = Vec::with_capacity(prims.len());
    for j in 0..grid.ny {
        for i in 0..grid.nx {
            let s = &prims[grid.index(i, j)];
            out.push(SnapshotRow::from_state(grid.center(i, j), s, p));
        }
    }
    Ok(out)
}

pub fn write_snapshot_csv<W: Write>(out: &mut W, rows: &[SnapshotRow]) -> io::Result<()> {
    writeln!(out, "{}", SNAPSHOT_COLUMNS.join(","))?;
    for r in rows {
        writeln!(out, "{}", join(&r.0))?;
    }
    Ok(())
}

pub fn write_snapshot(
    path: &Path,
    fs: &FieldState,
    grid: &Grid2D,
    p: &PhysicalParams,
) -> Result<(), OutputError> {
    let rows = snapshot_rows(fs, grid, p)?;
    let mut w = io::BufWriter::new(std::fs::File::create(path)?);
    write_snapshot_csv(&mut w, &rows)?;
    w.flush()?;
    Ok(())
}

fn parse_rows<R: BufRead, const N: usize>(input: R, header: &[&str; N]) -> Result<Vec<[f64; N]>, OutputError> {
    let mut lines = input.lines();
    let first = lines.next().transpose()?.unwrap_or_default();
    let got: Vec<&str> = first.trim().split(',').collect();
    if got != header.as_slice() {
        return Err(OutputError::Format {
            line: 1,
            msg: format!("expected header {}, got {}", header.join(","), first.trim()),
        });
    }
    let mut out = Vec::new();
    for (n, line) in lines.enumerate() {
        let line = line?;
        if line.trim().is_empty() {
            continue;
        }
        let bad = |msg: String| OutputError::Format { line: n + 2, msg };
        let mut row = [0.0; N];
        let mut count = 0;
        for (k, field) in line.trim().split(',').enumerate() {
            if k >= N {
                return Err(bad(format!("more than {N} fields")));
            }
            row[k] = field
                .trim()
                .parse()
                .map_err(|_| bad(format!("bad number '{field}'")))?;
            count += 1;
        }
        if count != N {
            return Err(bad(format!("expected {N} fields, got {count}")));
        }
        out.push(row);
    }
    Ok(out)
}

pub fn read_snapshot_csv<R: BufRead>(input: R) -> Result<Vec<SnapshotRow>, OutputError> {
    Ok(parse_rows(input, &SNAPSHOT_COLUMNS)?
        .into_iter()
        .map(SnapshotRow)
        .collect())
}

pub fn read_snapshot(path: &Path) -> Result<Vec<SnapshotRow>, OutputError> {
    read_snapshot_csv(io::BufReader::new(std::fs::File::open(path)?))
}

/// One slice row, in [`SLICE_COLUMNS`] order.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct SliceRecord(pub [f64; 9]);

impl SliceRecord {
    pub fn position(&self) -> f64 {
        self.0[0]
    }

    pub fn h(&self) -> f64 {
        self.0[1]
    }
}

fn sorted_unique(mut v: Vec<f64>) -> Vec<f64> {
    v.sort_by(|a, b| a.total_cmp(b));
    v.dedup();
    v
}

/// Profile along the row (`Axis::Y`) or column (`Axis::X`) of cell centres
/// nearest to `at`. Ties go to the lower coordinate.
pub fn slice_rows(rows: &[SnapshotRow], axis: Axis, at: f64) -> Result<Vec<SliceRecord>, OutputError> {
    let (fixed, along) = match axis {
        Axis::X => (0, 1),
        Axis::Y => (1, 0),
    };
    let centres = sorted_unique(rows.iter().map(|r| r.0[fixed]).collect());
    let (Some(&first), Some(&last)) = (centres.first(), centres.last()) else {
        return Err(OutputError::Format {
            line: 0,
            msg: "empty snapshot".into(),
        });
    };
    let half = if centres.len() > 1 {
        0.5 * (centres[1] - centres[0])
    } else {
        0.0
    };
    let (lo, hi) = (first - half, last + half);
    if !(at >= lo && at <= hi) {
        return Err(OutputError::OutOfDomain { at, lo, hi });
    }
    let mut best = first;
    for &c in &centres {
        if (c - at).abs() < (best - at).abs() {
            best = c;
        }
    }
    let mut out: Vec<_> = rows
        .iter()
        .filter(|r| r.0[fixed] == best)
        .map(|r| r.slice_record(r.0[along]))
        .collect();
    out.sort_by(|a, b| a.position().total_cmp(&b.position()));
    Ok(out)
}

pub fn extract_slice(
    fs: &FieldState,
    grid: &Grid2D,
    p: &PhysicalParams,
    axis: Axis,
    at: f64,
) -> Result<Vec<SliceRecord>, OutputError> {
    slice_rows(&snapshot_rows(fs, grid, p)?, axis, at)
}

/// Profile along the ray from `centre` at angle `theta`, sampling the nearest
/// cell every half cell width; `position` is the distance from `centre`.
/// Consecutive samples in the same cell are kept once.
pub fn extract_ray(
    fs: &FieldState,
    grid: &Grid2D,
    p: &PhysicalParams,
    centre: Vec2,
    theta: f64,
    length: f64,
) -> Result<Vec<SliceRecord>, OutputError> {
    let step = 0.5 * grid.dx.min(grid.dy);
    let dir = [theta.cos(), theta.sin()];
    let mut out = Vec::new();
    let mut last = None;
    let mut k = 0usize;
    loop {
        let r = k as f64 * step;
        if r > length {
            break;
        }
        k += 1;
        let x = [centre[0] + r * dir[0], centre[1] + r * dir[1]];
        let fi = ((x[0] - grid.x0) / grid.dx).floor();
        let fj = ((x[1] - grid.y0) / grid.dy).floor();
        if fi < 0.0 || fj < 0.0 || fi >= grid.nx as f64 || fj >= grid.ny as f64 {
            break;
        }
        let (i, j) = (fi as usize, fj as usize);
        if last == Some((i, j)) {
            continue;
        }
        last = Some((i, j));
        let s = fs.primitive(grid, i, j)?;
        out.push(SnapshotRow::from_state(x, &s, p).slice_record(r));
    }
    Ok(out)
}

pub fn write_slice_csv<W: Write>(out: &mut W, records: &[SliceRecord]) -> io::Result<()> {
    writeln!(out, "{}", SLICE_COLUMNS.join(","))?;
    for r in records {
        writeln!(out, "{}", join(&r.0))?;
    }
    Ok(())
}

pub fn read_slice_csv<R: BufRead>(input: R) -> Result<Vec<SliceRecord>, OutputError> {
    Ok(parse_rows(input, &SLICE_COLUMNS)?
        .into_iter()
        .map(SliceRecord)
        .collect())
}

/// Energy series writer; one row per step, flushed on drop.
pub struct EnergyWriter<W: Write> {
    out: W,
}

impl<W: Write> EnergyWriter<W> {
    pub fn new(mut out: W) -> io::Result<Self> {
        writeln!(out, "{}", ENERGY_COLUMNS.join(","))?;
        Ok(Self { out })
    }

    pub fn initial(&mut self, e_total: f64) -> io::Result<()> {
        writeln!(self.out, "0,{}", join(&[0.0, 0.0, e_total, 0.0, 0.0, 0.0]))
    }

    /// The `dissipation` column holds relaxation plus friction.
    pub fn record(&mut self, e: &LedgerEntry) -> io::Result<()> {
        writeln!(
            self.out,
            "{},{}",
            e.step,
            join(&[
                e.t,
                e.dt,
                e.e_total,
                e.boundary_flux,
                e.dissipation + e.friction,
                e.residual
            ])
        )
    }

    pub fn flush(&mut self) -> io::Result<()> {
        self.out.flush()
    }

    pub fn into_inner(self) -> W {
        self.out
    }
}

/// Legacy ASCII VTK with the snapshot scalars plus `U` as a vector field.
pub fn write_vtk<W: Write>(out: &mut W, grid: &Grid2D, rows: &[SnapshotRow]) -> io::Result<()> {
    let mut s = String::new();
    let _ = writeln!(s, "# vtk DataFile Version 2.0");
    let _ = writeln!(s, "svm snapshot");
    let _ = writeln!(s, "ASCII");
    let _ = writeln!(s, "DATASET STRUCTURED_POINTS");
    let _ = writeln!(s, "DIMENSIONS {} {} 1", grid.nx + 1, grid.ny + 1);
    let _ = writeln!(s, "ORIGIN {} {} 0", fmt_sci(grid.x0), fmt_sci(grid.y0));
    let _ = writeln!(s, "SPACING {} {} 1", fmt_sci(grid.dx), fmt_sci(grid.dy));
    let _ = writeln!(s, "CELL_DATA {}", rows.len());
    out.write_all(s.as_bytes())?;
    for (k, name) in SNAPSHOT_COLUMNS.iter().enumerate().skip(2) {
        writeln!(out, "SCALARS {name} double 1")?;
        writeln!(out, "LOOKUP_TABLE default")?;
        for r in rows {
            writeln!(out, "{}", fmt_sci(r.0[k]))?;
        }
    }
    writeln!(out, "VECTORS U double")?;
    for r in rows {
        writeln!(out, "{} {} {}", fmt_sci(r.0[3]), fmt_sci(r.0[4]), fmt_sci(0.0))?;
    }
    Ok(())
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::fv2d::Boundary;

    #[test]
    fn c_style_exponent() {
        assert_eq!(fmt_sci(1.0), "1.000000000000e+00");
        assert_eq!(fmt_sci(-0.0025), "-2.500000000000e-03");
        assert_eq!(fmt_sci(1.5e120), "1.500000000000e+120");
    }

    #[test]
    fn uniform_identity_snapshot() {
        let grid = Grid2D::uniform(2, 2, [0.0, 0.0], [1.0, 1.0], Boundary::Copy).unwrap();
        let fs = FieldState::uniform(&grid, &CellState::identity()).unwrap();
        let p = PhysicalParams::default();
        let mut buf = Vec::new();
        write_snapshot_csv(&mut buf, &snapshot_rows(&fs, &grid, &p).unwrap()).unwrap();
        let text = String::from_utf8(buf).unwrap();
        assert_eq!(text.lines().count(), 5);
        let rows = read_snapshot_csv(text.as_bytes()).unwrap();
        for r in &rows {
            assert_eq!(r.get("Bxx"), Some(1.0));
            assert_eq!(r.get("Bxy"), Some(0.0));
            assert_eq!(r.get("Byy"), Some(1.0));
            assert_eq!(r.get("Bzz"), Some(1.0));
        }
    }

    #[test]
    fn slice_nearest_row() {
        let grid = Grid2D::uniform(4, 4, [0.0, 0.0], [4.0, 4.0], Boundary::Copy).unwrap();
        let fs = FieldState::from_fn(&grid, |x| CellState {
            u: [x[1], 0.0],
            ..CellState::identity()
        })
        .unwrap();
        let p = PhysicalParams::default();
        let s = extract_slice(&fs, &grid, &p, Axis::Y, 2.9).unwrap();
        assert_eq!(s.len(), 4);
        assert!(s.iter().all(|r| r.0[2] == 2.5));
        assert!(extract_slice(&fs, &grid, &p, Axis::X, 4.5).is_err());
    }

    #[test]
    fn header_mismatch_is_rejected() {
        let err = read_slice_csv("position,h\n".as_bytes()).unwrap_err();
        assert!(matches!(err, OutputError::Format { line: 1, .. }));
    }
}
