//! CSV emission. One fixed header per command, 17-significant-digit
//! scientific notation, `.` decimal point, LF line endings — dependable
//! enough to diff byte-for-byte across runs.

use std::fs::File;
use std::io::{self, BufWriter, Write};
use std::path::Path;

pub fn number(v: f64) -> String {
    format!("{v:.16e}")
}

pub fn write_csv(path: &Path, header: &str, rows: &[Vec<f64>]) -> io::Result<()> {
    let mut w = BufWriter::new(File::create(path)?);
    w.write_all(header.as_bytes())?;
    w.write_all(b"\n")?;
    for row in rows {
        let line = row.iter().map(|&v| number(v)).collect::<Vec<_>>().join(",");
        w.write_all(line.as_bytes())?;
        w.write_all(b"\n")?;
    }
    w.flush()
}
