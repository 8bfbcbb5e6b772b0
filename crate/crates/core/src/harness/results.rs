//! Result rows and their CSV form.
//!
//! Columns, in order: `n, k, theta, mode, seed, repeat, wall_time_seconds,
//! peak_state_bytes, epr_count, classical_msg_count, block_slots,
//! fidelity_exact, fidelity_sampled, modal_outcome`. Comma separated, LF
//! line endings, header always present, floats with 9 significant digits.

use std::collections::BTreeSet;
use std::fs::{File, OpenOptions};
use std::io::Write;
use std::path::Path;

use crate::error::{Error, Result};
use crate::qft::Mode;

pub const HEADER: [&str; 14] = [
    "n",
    "k",
    "theta",
    "mode",
    "seed",
    "repeat",
    "wall_time_seconds",
    "peak_state_bytes",
    "epr_count",
    "classical_msg_count",
    "block_slots",
    "fidelity_exact",
    "fidelity_sampled",
    "modal_outcome",
];

/// Index of the wall-time column, the one field that differs between
/// otherwise identical runs.
pub const WALL_TIME_COLUMN: usize = 6;

#[derive(Debug, Clone, PartialEq)]
pub struct ResultRow {
    pub n: usize,
    pub k: usize,
    pub theta: f64,
    pub mode: Mode,
    pub seed: u64,
    pub repeat: usize,
    pub wall_time_seconds: f64,
    pub peak_state_bytes: u64,
    pub epr_count: u64,
    pub classical_msg_count: u64,
    pub block_slots: usize,
    pub fidelity_exact: f64,
    pub fidelity_sampled: f64,
    pub modal_outcome: u64,
}

/// Formats like C's `%.9g`.
pub fn format_sig9(x: f64) -> String {
    if x == 0.0 {
        return "0".into();
    }
    if !x.is_finite() {
        return x.to_string();
    }
    let sci = format!("{x:.8e}");
    let (mantissa, exp) = sci.split_once('e').expect("exponent present");
    let exp: i32 = exp.parse().expect("integer exponent");
    if (-4..9).contains(&exp) {
        let decimals = (8 - exp).max(0) as usize;
        trim_zeros(format!("{x:.decimals$}"))
    } else {
        format!("{}e{}{:02}", trim_zeros(mantissa.to_string()), if exp < 0 { '-' } else { '+' }, exp.abs())
    }
}

fn trim_zeros(s: String) -> String {
    if s.contains('.') {
        s.trim_end_matches('0').trim_end_matches('.').to_string()
    } else {
        s
    }
}

/// Identity of a run within a sweep, used to skip rows already on disk.
pub type RowKey = (usize, usize, String, String, u64, usize);

impl ResultRow {
    pub fn record(&self) -> Vec<String> {
        vec![
            self.n.to_string(),
            self.k.to_string(),
            format_sig9(self.theta),
            self.mode.to_string(),
            self.seed.to_string(),
            self.repeat.to_string(),
            format_sig9(self.wall_time_seconds),
            self.peak_state_bytes.to_string(),
            self.epr_count.to_string(),
            self.classical_msg_count.to_string(),
            self.block_slots.to_string(),
            format_sig9(self.fidelity_exact),
            format_sig9(self.fidelity_sampled),
            self.modal_outcome.to_string(),
        ]
    }

    pub fn key(&self) -> RowKey {
        (
            self.n,
            self.k,
            format_sig9(self.theta),
            self.mode.to_string(),
            self.seed,
            self.repeat,
        )
    }

    pub fn csv_line(&self) -> String {
        self.record().join(",")
    }

    fn from_record(rec: &csv::StringRecord) -> Result<Self> {
        let field = |i: usize| rec.get(i).ok_or_else(|| Error::Io(format!("row has {} fields", rec.len())));
        fn num<T: std::str::FromStr>(s: &str) -> Result<T> {
            s.parse().map_err(|_| Error::Io(format!("cannot parse {s:?}")))
        }
        Ok(Self {
            n: num(field(0)?)?,
            k: num(field(1)?)?,
            theta: num(field(2)?)?,
            mode: field(3)?.parse()?,
            seed: num(field(4)?)?,
            repeat: num(field(5)?)?,
            wall_time_seconds: num(field(6)?)?,
            peak_state_bytes: num(field(7)?)?,
            epr_count: num(field(8)?)?,
            classical_msg_count: num(field(9)?)?,
            block_slots: num(field(10)?)?,
            fidelity_exact: num(field(11)?)?,
            fidelity_sampled: num(field(12)?)?,
            modal_outcome: num(field(13)?)?,
        })
    }
}

/// Reads every row of a results file. A missing file reads as empty.
pub fn read_rows(path: &Path) -> Result<Vec<ResultRow>> {
    if !path.exists() {
        return Ok(Vec::new());
    }
    let mut reader = csv::ReaderBuilder::new().has_headers(true).from_path(path)?;
    let header = reader.headers()?.clone();
    if header.iter().ne(HEADER.iter().copied()) {
        return Err(Error::Io(format!(
            "{} has an unexpected header",
            path.display()
        )));
    }
    reader
        .records()
        .map(|r| ResultRow::from_record(&r?))
        .collect()
}

pub fn existing_keys(path: &Path) -> Result<BTreeSet<RowKey>> {
    Ok(read_rows(path)?.iter().map(ResultRow::key).collect())
}

/// Appends rows to a results file, writing the header first if the file is
/// new. Each row is written and flushed as one unit.
pub struct ResultWriter {
    file: File,
}

impl ResultWriter {
    pub fn open(path: &Path) -> Result<Self> {
        if let Some(dir) = path.parent().filter(|d| !d.as_os_str().is_empty()) {
            std::fs::create_dir_all(dir)?;
        }
        let fresh = std::fs::metadata(path).map(|m| m.len() == 0).unwrap_or(true);
        let file = OpenOptions::new().create(true).append(true).open(path)?;
        let mut w = Self { file };
        if fresh {
            w.write_line(&HEADER.join(","))?;
        }
        Ok(w)
    }

    fn write_line(&mut self, line: &str) -> Result<()> {
        let mut buf = line.as_bytes().to_vec();
        buf.push(b'\n');
        self.file.write_all(&buf)?;
        self.file.flush()?;
        Ok(())
    }

    pub fn append(&mut self, row: &ResultRow) -> Result<()> {
        self.write_line(&row.csv_line())
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn row() -> ResultRow {
        ResultRow {
            n: 8,
            k: 4,
            theta: 1.0 / 3.0,
            mode: Mode::Telegate,
            seed: 3,
            repeat: 0,
            wall_time_seconds: 0.00123456789,
            peak_state_bytes: 65536,
            epr_count: 12,
            classical_msg_count: 24,
            block_slots: 7,
            fidelity_exact: 1.0,
            fidelity_sampled: 0.987654321012,
            modal_outcome: 85,
        }
    }

    #[test]
    fn nine_significant_digits() {
        assert_eq!(format_sig9(1.0 / 3.0), "0.333333333");
        assert_eq!(format_sig9(2.0 / 3.0), "0.666666667");
        assert_eq!(format_sig9(1.0), "1");
        assert_eq!(format_sig9(0.0), "0");
        assert_eq!(format_sig9(0.00123456789), "0.00123456789");
        assert_eq!(format_sig9(123456789012.0), "1.23456789e+11");
        assert_eq!(format_sig9(0.0000012345), "1.2345e-06");
        assert_eq!(format_sig9(0.999999999999), "1");
        assert_eq!(format_sig9(0.000065818), "6.5818e-05");
        assert_eq!(format_sig9(0.00012), "0.00012");
    }

    #[test]
    fn csv_line_layout() {
        assert_eq!(
            row().csv_line(),
            "8,4,0.333333333,telegate,3,0,0.00123456789,65536,12,24,7,1,0.987654321,85"
        );
    }

    #[test]
    fn write_then_read() {
        let dir = tempfile::tempdir().unwrap();
        let path = dir.path().join("nested/out.csv");
        let mut w = ResultWriter::open(&path).unwrap();
        w.append(&row()).unwrap();
        drop(w);
        let mut w = ResultWriter::open(&path).unwrap();
        let mut second = row();
        second.repeat = 1;
        w.append(&second).unwrap();
        let text = std::fs::read_to_string(&path).unwrap();
        assert_eq!(text.lines().count(), 3);
        assert!(text.starts_with("n,k,theta,mode,"));
        assert!(!text.contains('\r'));
        let rows = read_rows(&path).unwrap();
        assert_eq!(rows.len(), 2);
        assert_eq!(rows[0].key(), row().key());
        assert_eq!(existing_keys(&path).unwrap().len(), 2);
    }

    #[test]
    fn rejects_foreign_header() {
        let dir = tempfile::tempdir().unwrap();
        let path = dir.path().join("x.csv");
        std::fs::write(&path, "a,b\n1,2\n").unwrap();
        assert!(read_rows(&path).is_err());
    }
}
