use std::fs;
use std::path::Path;

use nalgebra::DMatrix;

use super::Provenance;
use crate::error::{Error, Result};

/// 16-bit binary PGM heatmap scaled to the matrix maximum.
///
/// Image columns follow the signal axis, image rows the idler axis with the
/// longest idler wavelength on top.
pub fn write_pgm(path: impl AsRef<Path>, values: &DMatrix<f64>, prov: &Provenance) -> Result<()> {
    let path = path.as_ref();
    let (m, n) = values.shape();
    let max = values.iter().cloned().filter(|v| v.is_finite()).fold(0.0_f64, f64::max);
    let mut out = Vec::with_capacity(64 + 2 * m * n);
    out.extend_from_slice(b"P5\n");
    for line in prov.header_lines() {
        out.extend_from_slice(format!("# {line}\n").as_bytes());
    }
    out.extend_from_slice(format!("{m} {n}\n65535\n").as_bytes());
    for row in (0..n).rev() {
        for col in 0..m {
            let v = values[(col, row)];
            let level = if max > 0.0 && v.is_finite() { (v.max(0.0) / max * 65535.0).round() as u16 } else { 0 };
            out.extend_from_slice(&level.to_be_bytes());
        }
    }
    if let Some(dir) = path.parent().filter(|d| !d.as_os_str().is_empty()) {
        fs::create_dir_all(dir).map_err(|e| Error::io(dir, e))?;
    }
    fs::write(path, out).map_err(|e| Error::io(path, e))
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn layout_and_scaling() {
        let dir = tempfile::tempdir().unwrap();
        let p = dir.path().join("a.pgm");
        // 2 signal x 3 idler
        let m = DMatrix::from_row_slice(2, 3, &[0.0, 1.0, 2.0, 3.0, 4.0, 8.0]);
        write_pgm(&p, &m, &Provenance::new("x", 1)).unwrap();
        let bytes = std::fs::read(&p).unwrap();
        let header_end = bytes.windows(6).position(|w| w == b"65535\n").unwrap() + 6;
        let text = String::from_utf8_lossy(&bytes[..header_end]);
        assert!(text.starts_with("P5\n"));
        assert!(text.contains("\n2 3\n"));
        let px: Vec<u16> = bytes[header_end..].chunks(2).map(|c| u16::from_be_bytes([c[0], c[1]])).collect();
        assert_eq!(px.len(), 6);
        // top row is the last idler sample
        assert_eq!(px[0], (2.0 / 8.0 * 65535.0_f64).round() as u16);
        assert_eq!(px[1], 65535);
        assert_eq!(px[4], 0);
    }
}
