use std::collections::BTreeMap;
use std::fmt::Write as _;
use std::fs;
use std::path::Path;

use nalgebra::DMatrix;

use super::Provenance;
use crate::error::{Error, Result};
use crate::schmidt::MeasurementRecord;
use crate::spectral::{Axis, SpectralGrid};

const MATRIX_MAGIC: &str = "biphoton-matrix v1";
const FILTER_MAGIC: &str = "biphoton-filter v1";

/// A matrix read back from disk together with its header.
#[derive(Debug, Clone, PartialEq)]
pub struct MatrixFile {
    pub quantity: String,
    pub grid: SpectralGrid,
    pub values: DMatrix<f64>,
    pub provenance: Option<Provenance>,
}

fn grid_lines(grid: &SpectralGrid) -> Vec<String> {
    vec![
        "units: nm".to_string(),
        format!("axis1: signal"),
        format!("axis1_start_nm: {}", grid.signal.start_nm),
        format!("axis1_pitch_nm: {}", grid.signal.pitch_nm),
        format!("axis1_count: {}", grid.signal.count),
        format!("axis2: idler"),
        format!("axis2_start_nm: {}", grid.idler.start_nm),
        format!("axis2_pitch_nm: {}", grid.idler.pitch_nm),
        format!("axis2_count: {}", grid.idler.count),
        format!("linearized: {}", grid.linearized),
    ]
}

fn header(magic: &str, quantity: &str, grid: &SpectralGrid, prov: &Provenance) -> String {
    let mut out = String::new();
    let mut lines = vec![magic.to_string(), format!("quantity: {quantity}")];
    lines.extend(prov.header_lines());
    lines.extend(grid_lines(grid));
    for l in lines {
        let _ = writeln!(out, "# {l}");
    }
    out
}

fn write_text(path: &Path, text: &str) -> Result<()> {
    if let Some(dir) = path.parent().filter(|d| !d.as_os_str().is_empty()) {
        fs::create_dir_all(dir).map_err(|e| Error::io(dir, e))?;
    }
    fs::write(path, text).map_err(|e| Error::io(path, e))
}

fn write_rows<F: Fn(usize, usize) -> String>(
    path: &Path,
    magic: &str,
    quantity: &str,
    grid: &SpectralGrid,
    prov: &Provenance,
    shape: (usize, usize),
    cell: F,
) -> Result<()> {
    if shape != grid.shape() {
        return Err(Error::Validation(format!(
            "matrix is {}x{} but grid is {}x{}",
            shape.0, shape.1, grid.signal.count, grid.idler.count
        )));
    }
    let mut text = header(magic, quantity, grid, prov);
    for i in 0..shape.0 {
        let row: Vec<String> = (0..shape.1).map(|j| cell(i, j)).collect();
        text.push_str(&row.join(","));
        text.push('\n');
    }
    write_text(path, &text)
}

/// Real matrix, rows along the signal axis; 17 significant digits.
pub fn write_matrix(
    path: impl AsRef<Path>,
    values: &DMatrix<f64>,
    grid: &SpectralGrid,
    quantity: &str,
    prov: &Provenance,
) -> Result<()> {
    write_rows(path.as_ref(), MATRIX_MAGIC, quantity, grid, prov, values.shape(), |i, j| {
        format!("{:.16e}", values[(i, j)])
    })
}

pub fn write_count_matrix(
    path: impl AsRef<Path>,
    values: &DMatrix<u64>,
    grid: &SpectralGrid,
    quantity: &str,
    prov: &Provenance,
) -> Result<()> {
    write_rows(path.as_ref(), MATRIX_MAGIC, quantity, grid, prov, values.shape(), |i, j| {
        values[(i, j)].to_string()
    })
}

/// Complex matrix as two files, `<stem>_re.csv` and `<stem>_im.csv`.
pub fn write_complex_matrix(
    dir: impl AsRef<Path>,
    stem: &str,
    values: &DMatrix<num_complex::Complex64>,
    grid: &SpectralGrid,
    prov: &Provenance,
) -> Result<()> {
    let dir = dir.as_ref();
    write_matrix(dir.join(format!("{stem}_re.csv")), &values.map(|v| v.re), grid, &format!("{stem} real part"), prov)?;
    write_matrix(dir.join(format!("{stem}_im.csv")), &values.map(|v| v.im), grid, &format!("{stem} imaginary part"), prov)
}

struct Parsed {
    meta: BTreeMap<String, String>,
    rows: Vec<Vec<f64>>,
}

fn parse_err(path: &Path, message: impl Into<String>) -> Error {
    Error::Parse {
        path: path.display().to_string(),
        message: message.into(),
    }
}

fn parse_file(path: &Path, magic: &str) -> Result<Parsed> {
    let text = fs::read_to_string(path).map_err(|e| Error::io(path, e))?;
    let mut meta = BTreeMap::new();
    let mut rows = Vec::new();
    let mut saw_magic = false;
    for (lineno, line) in text.lines().enumerate() {
        let line = line.trim();
        if line.is_empty() {
            continue;
        }
        if let Some(h) = line.strip_prefix('#') {
            let h = h.trim();
            if h == magic {
                saw_magic = true;
            } else if let Some((k, v)) = h.split_once(':') {
                meta.insert(k.trim().to_string(), v.trim().to_string());
            }
            continue;
        }
        let row = line
            .split(',')
            .map(|c| c.trim().parse::<f64>())
            .collect::<std::result::Result<Vec<_>, _>>()
            .map_err(|e| parse_err(path, format!("line {}: {e}", lineno + 1)))?;
        rows.push(row);
    }
    if !saw_magic {
        return Err(parse_err(path, format!("missing '# {magic}' header")));
    }
    if rows.is_empty() {
        return Err(parse_err(path, "header present but no data rows (missing payload)"));
    }
    Ok(Parsed { meta, rows })
}

fn meta_value<T: std::str::FromStr>(path: &Path, meta: &BTreeMap<String, String>, key: &str) -> Result<T> {
    meta.get(key)
        .ok_or_else(|| parse_err(path, format!("missing header key '{key}'")))?
        .parse()
        .map_err(|_| parse_err(path, format!("bad value for header key '{key}'")))
}

fn axis_from(path: &Path, meta: &BTreeMap<String, String>, prefix: &str) -> Result<Axis> {
    Ok(Axis::new(
        meta_value(path, meta, &format!("{prefix}_start_nm"))?,
        meta_value(path, meta, &format!("{prefix}_pitch_nm"))?,
        meta_value(path, meta, &format!("{prefix}_count"))?,
    ))
}

fn provenance_from(meta: &BTreeMap<String, String>) -> Option<Provenance> {
    Some(Provenance {
        tool: meta.get("tool")?.clone(),
        config_sha256: meta.get("config_sha256")?.clone(),
        seed: meta.get("seed")?.parse().ok()?,
    })
}

pub fn read_matrix(path: impl AsRef<Path>) -> Result<MatrixFile> {
    let path = path.as_ref();
    let parsed = parse_file(path, MATRIX_MAGIC)?;
    let meta = &parsed.meta;
    let grid = SpectralGrid {
        signal: axis_from(path, meta, "axis1")?,
        idler: axis_from(path, meta, "axis2")?,
        linearized: meta_value(path, meta, "linearized").unwrap_or(true),
    };
    let (m, n) = grid.shape();
    if parsed.rows.len() != m || parsed.rows.iter().any(|r| r.len() != n) {
        return Err(parse_err(
            path,
            format!("payload does not match header shape {m}x{n} ({} rows)", parsed.rows.len()),
        ));
    }
    Ok(MatrixFile {
        quantity: meta.get("quantity").cloned().unwrap_or_default(),
        grid,
        values: DMatrix::from_fn(m, n, |i, j| parsed.rows[i][j]),
        provenance: provenance_from(meta),
    })
}

/// Filter transmittance and transmitted seed power per seed step.
pub fn write_filter(path: impl AsRef<Path>, rec: &MeasurementRecord, prov: &Provenance) -> Result<()> {
    let mut text = header(FILTER_MAGIC, "filter transmittance and reference power", &rec.grid, prov);
    text.push_str("# columns: index,wavelength_nm,transmittance,reference_power\n");
    for m in 0..rec.transmittance.len() {
        let _ = writeln!(
            text,
            "{m},{},{:.16e},{:.16e}",
            rec.grid.signal.wavelength(m),
            rec.transmittance[m],
            rec.reference_power[m]
        );
    }
    write_text(path.as_ref(), &text)
}

/// Write the intensity matrix and the filter vector of a seed-sweep record.
pub fn write_record(
    intensity_path: impl AsRef<Path>,
    filter_path: impl AsRef<Path>,
    rec: &MeasurementRecord,
    prov: &Provenance,
) -> Result<()> {
    write_matrix(intensity_path, &rec.intensity, &rec.grid, "dfg intensity R", prov)?;
    write_filter(filter_path, rec, prov)
}

/// Load a seed-sweep record; the two files must describe the same seed axis.
pub fn read_record(intensity_path: impl AsRef<Path>, filter_path: impl AsRef<Path>) -> Result<MeasurementRecord> {
    let r = read_matrix(intensity_path)?;
    let filter_path = filter_path.as_ref();
    let parsed = parse_file(filter_path, FILTER_MAGIC)?;
    let axis = axis_from(filter_path, &parsed.meta, "axis1")?;
    if axis != r.grid.signal {
        return Err(Error::Validation(format!(
            "seed axis of {} ({} nm + {} x {} nm) differs from the intensity matrix ({} nm + {} x {} nm)",
            filter_path.display(),
            axis.start_nm,
            axis.count,
            axis.pitch_nm,
            r.grid.signal.start_nm,
            r.grid.signal.count,
            r.grid.signal.pitch_nm
        )));
    }
    if parsed.rows.len() != axis.count || parsed.rows.iter().any(|row| row.len() != 4) {
        return Err(parse_err(filter_path, "expected one 4-column row per seed step"));
    }
    let transmittance = parsed.rows.iter().map(|row| row[2]).collect();
    let reference = parsed.rows.iter().map(|row| row[3]).collect();
    MeasurementRecord::new(r.grid, r.values, transmittance, reference)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn prov() -> Provenance {
        Provenance::new("abc", 7)
    }

    #[test]
    fn header_only_file_names_missing_payload() {
        let dir = tempfile::tempdir().unwrap();
        let p = dir.path().join("h.csv");
        let grid = SpectralGrid::dfg_window();
        std::fs::write(&p, header(MATRIX_MAGIC, "jsd", &grid, &prov())).unwrap();
        let err = read_matrix(&p).unwrap_err();
        assert!(err.to_string().contains("missing payload"), "{err}");
    }

    #[test]
    fn shape_mismatch_rejected() {
        let dir = tempfile::tempdir().unwrap();
        let p = dir.path().join("m.csv");
        let grid = SpectralGrid::new(Axis::new(1.0, 0.1, 2), Axis::new(2.0, 0.1, 3));
        let mut text = header(MATRIX_MAGIC, "x", &grid, &prov());
        text.push_str("1,2,3\n");
        std::fs::write(&p, text).unwrap();
        assert!(matches!(read_matrix(&p), Err(Error::Parse { .. })));
    }

    #[test]
    fn provenance_survives() {
        let dir = tempfile::tempdir().unwrap();
        let p = dir.path().join("m.csv");
        let grid = SpectralGrid::new(Axis::new(1.0, 0.1, 2), Axis::new(2.0, 0.1, 2));
        write_matrix(&p, &DMatrix::from_element(2, 2, 0.25), &grid, "x", &prov()).unwrap();
        let back = read_matrix(&p).unwrap();
        assert_eq!(back.provenance, Some(prov()));
        assert_eq!(back.quantity, "x");
    }
}
