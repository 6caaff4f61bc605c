//! Output artifacts: CSV tables, JSON envelopes and two-column plot data,
//! each written atomically.

use std::fs;
use std::io::Write;
use std::path::Path;

use serde::Serialize;

use crate::error::{Error, Result};
use crate::field::DiscreteField;
use crate::metric::{ball_volume, regime, GridOracle};
use crate::random::PRNG_NAME;
use crate::Geometry;

/// Writes through a sibling temporary file and a rename, so readers never
/// see a partial file.
pub fn write_atomic(path: &Path, bytes: &[u8]) -> Result<()> {
    let dir = path.parent().filter(|d| !d.as_os_str().is_empty()).unwrap_or(Path::new("."));
    fs::create_dir_all(dir)?;
    let name = path.file_name().ok_or_else(|| Error::Io(format!("{} has no file name", path.display())))?;
    let tmp = dir.join(format!(".{}.tmp{}", name.to_string_lossy(), std::process::id()));
    {
        let mut f = fs::File::create(&tmp)?;
        f.write_all(bytes)?;
        f.sync_all()?;
    }
    fs::rename(&tmp, path).map_err(|e| {
        let _ = fs::remove_file(&tmp);
        Error::from(e)
    })
}

/// `x` with 17 significant digits, independent of locale.
pub fn fmt17(x: f64) -> String {
    format!("{x:.16e}")
}

/// Whitespace-separated two-column data with a `#` header line.
pub fn plot_data(header: [&str; 2], rows: &[(f64, f64)]) -> String {
    let mut s = format!("# {} {}\n", header[0], header[1]);
    for &(a, b) in rows {
        s.push_str(&fmt17(a));
        s.push(' ');
        s.push_str(&fmt17(b));
        s.push('\n');
    }
    s
}

pub fn write_plot(path: &Path, header: [&str; 2], rows: &[(f64, f64)]) -> Result<()> {
    write_atomic(path, plot_data(header, rows).as_bytes())
}

/// CSV with an explicit header, so an empty table still has one line.
pub fn csv_table<T: Serialize>(header: &[&str], rows: &[T]) -> Result<String> {
    let mut w = csv::WriterBuilder::new().has_headers(false).from_writer(Vec::new());
    w.write_record(header)?;
    for r in rows {
        w.serialize(r)?;
    }
    let bytes = w.into_inner().map_err(|e| Error::Io(e.to_string()))?;
    String::from_utf8(bytes).map_err(|e| Error::Io(e.to_string()))
}

pub const INEQUALITY_HEADER: [&str; 9] =
    ["inequality", "geometry", "x1", "r", "seed", "lhs", "rhs", "implied_constant", "applicable"];

pub const VOLUME_HEADER: [&str; 8] = ["geometry", "n", "x1", "r", "regime", "analytic", "numeric", "ratio"];

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct VolumeRow {
    pub geometry: String,
    pub n: usize,
    pub x1: f64,
    pub r: f64,
    pub regime: String,
    pub analytic: f64,
    /// Grid-measured area; only available for `n = 2`.
    pub numeric: Option<f64>,
    pub ratio: Option<f64>,
}

/// Analytic volume of `B((x1, 0), r)` and, for `n = 2`, the grid measurement.
pub fn volume_row(g: &Geometry, n: usize, x1: f64, r: f64, cells: usize) -> Result<VolumeRow> {
    let analytic = ball_volume(g, n, x1, r)?;
    let numeric = if n == 2 { Some(GridOracle::for_ball(g, x1, r, cells)?.ball_area([x1, 0.0], r)?) } else { None };
    Ok(VolumeRow {
        geometry: g.id(),
        n,
        x1,
        r,
        regime: regime(g, x1, r)?.as_str().into(),
        analytic,
        numeric,
        ratio: numeric.map(|v| v / analytic),
    })
}

pub const FIELD_HEADER: [&str; 5] = ["i", "j", "x1", "x2", "u"];

pub fn field_csv(u: &DiscreteField) -> Result<String> {
    let gr = u.grid();
    let rows: Vec<(usize, usize, f64, f64, f64)> = (0..gr.len())
        .map(|k| {
            let (i, j) = gr.ij(k);
            (i, j, gr.x1(i), gr.x2(j), u.values()[k])
        })
        .collect();
    csv_table(&FIELD_HEADER, &rows)
}

/// JSON wrapper recording what produced a result.
#[derive(Debug, Clone, Serialize)]
pub struct Envelope<'a, C: Serialize, R: Serialize> {
    pub tool: &'static str,
    pub version: &'static str,
    pub prng: &'static str,
    pub command: &'a str,
    pub config: &'a C,
    pub result: &'a R,
}

impl<'a, C: Serialize, R: Serialize> Envelope<'a, C, R> {
    pub fn new(command: &'a str, config: &'a C, result: &'a R) -> Self {
        Envelope { tool: "dglab", version: env!("CARGO_PKG_VERSION"), prng: PRNG_NAME, command, config, result }
    }

    pub fn to_json(&self) -> Result<String> {
        let mut s = serde_json::to_string_pretty(self)?;
        s.push('\n');
        Ok(s)
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn plot_rows_have_seventeen_digits() {
        let s = plot_data(["r", "osc"], &[(0.1, 1.0 / 3.0)]);
        let line = s.lines().nth(1).unwrap();
        let cols: Vec<&str> = line.split(' ').collect();
        assert_eq!(cols[1], "3.3333333333333331e-1");
        assert_eq!(cols[1].parse::<f64>().unwrap(), 1.0 / 3.0);
    }

    #[test]
    fn empty_tables_keep_headers() {
        assert_eq!(plot_data(["j", "ln_lambda"], &[]), "# j ln_lambda\n");
        let rows: Vec<VolumeRow> = vec![];
        assert_eq!(csv_table(&VOLUME_HEADER, &rows).unwrap(), "geometry,n,x1,r,regime,analytic,numeric,ratio\n");
    }

    #[test]
    fn atomic_write_replaces_content() {
        let dir = tempfile::tempdir().unwrap();
        let p = dir.path().join("sub").join("a.txt");
        write_atomic(&p, b"one").unwrap();
        write_atomic(&p, b"two").unwrap();
        assert_eq!(fs::read_to_string(&p).unwrap(), "two");
        assert_eq!(fs::read_dir(p.parent().unwrap()).unwrap().count(), 1);
    }

    #[test]
    fn volume_row_in_small_regime() {
        let g = Geometry::power_log(3, 0.5).unwrap();
        let row = volume_row(&g, 2, 0.2, 2f64.powi(-6), 128).unwrap();
        assert_eq!(row.regime, "small");
        let ratio = row.ratio.unwrap();
        assert!(ratio > 0.125 && ratio < 8.0);
        let csv = csv_table(&VOLUME_HEADER, &[row]).unwrap();
        assert_eq!(csv.lines().count(), 2);
    }
}
