//! Signal CSV format: optional `# fs=<hz>` comment lines, a header row of
//! channel names, then one row of samples per time step. Values are written
//! with Rust's shortest round-trip float formatting, so write-then-read
//! recovers every sample bit-exactly.

use crate::error::{CliError, CliResult};
use std::fs;
use std::io::Write;
use std::path::Path;

/// A parsed multi-channel table, column-major.
#[derive(Debug, Clone)]
pub struct SignalTable {
    /// Sampling rate from a `# fs=` comment, if present.
    pub fs: Option<f64>,
    pub channel_names: Vec<String>,
    pub columns: Vec<Vec<f64>>,
}

impl SignalTable {
    /// Restricts the table to the named channels, in the order given.
    pub fn select(&self, names: &[String]) -> CliResult<SignalTable> {
        let mut columns = Vec::with_capacity(names.len());
        for name in names {
            let idx = self
                .channel_names
                .iter()
                .position(|n| n == name)
                .ok_or_else(|| {
                    CliError::Usage(format!(
                        "unknown channel '{name}'; available: {}",
                        self.channel_names.join(", ")
                    ))
                })?;
            columns.push(self.columns[idx].clone());
        }
        Ok(SignalTable {
            fs: self.fs,
            channel_names: names.to_vec(),
            columns,
        })
    }
}

pub fn read_table(path: &Path) -> CliResult<SignalTable> {
    let raw = fs::read_to_string(path)
        .map_err(|e| CliError::Usage(format!("cannot read {}: {e}", path.display())))?;

    // fs metadata lives in comment lines the CSV reader will skip.
    let mut fs_meta = None;
    for line in raw.lines() {
        let line = line.trim();
        if let Some(rest) = line.strip_prefix('#') {
            let rest = rest.trim();
            if let Some(value) = rest.strip_prefix("fs=") {
                let parsed: f64 = value.trim().parse().map_err(|_| {
                    CliError::Data(format!("malformed fs metadata line: '{line}'"))
                })?;
                fs_meta = Some(parsed);
            }
        }
    }

    let mut reader = csv::ReaderBuilder::new()
        .comment(Some(b'#'))
        .has_headers(true)
        .trim(csv::Trim::All)
        .from_reader(raw.as_bytes());

    let channel_names: Vec<String> = reader
        .headers()
        .map_err(|e| CliError::Data(format!("cannot parse header of {}: {e}", path.display())))?
        .iter()
        .map(str::to_string)
        .collect();
    if channel_names.is_empty() {
        return Err(CliError::Data(format!("{}: no channels in header", path.display())));
    }

    let mut columns: Vec<Vec<f64>> = vec![Vec::new(); channel_names.len()];
    for record in reader.records() {
        let record =
            record.map_err(|e| CliError::Data(format!("{}: {e}", path.display())))?;
        let line = record.position().map_or(0, |p| p.line());
        if record.len() != channel_names.len() {
            return Err(CliError::Data(format!(
                "{}: line {line}: expected {} fields, got {}",
                path.display(),
                channel_names.len(),
                record.len()
            )));
        }
        for (idx, field) in record.iter().enumerate() {
            let name = &channel_names[idx];
            let value: f64 = field.parse().map_err(|_| {
                CliError::Data(format!(
                    "{}: line {line}, column '{name}': malformed value '{field}'",
                    path.display()
                ))
            })?;
            if !value.is_finite() {
                return Err(CliError::Data(format!(
                    "{}: line {line}, column '{name}': non-finite value '{field}'",
                    path.display()
                )));
            }
            columns[idx].push(value);
        }
    }

    if columns[0].is_empty() {
        return Err(CliError::Data(format!("{}: no samples", path.display())));
    }

    Ok(SignalTable {
        fs: fs_meta,
        channel_names,
        columns,
    })
}

/// Writes a signal table with the `# fs=` comment first; columns must be
/// equal length.
pub fn write_table(
    path: &Path,
    fs_hz: f64,
    channel_names: &[String],
    columns: &[Vec<f64>],
) -> CliResult<()> {
    let mut file = fs::File::create(path)
        .map_err(|e| CliError::Usage(format!("cannot create {}: {e}", path.display())))?;
    writeln!(file, "# fs={fs_hz}")
        .map_err(|e| CliError::Usage(format!("cannot write {}: {e}", path.display())))?;
    write_columns(file, path, channel_names, columns)
}

/// Plain CSV without signal metadata, for report panels.
pub fn write_plain(path: &Path, column_names: &[String], columns: &[Vec<f64>]) -> CliResult<()> {
    let file = fs::File::create(path)
        .map_err(|e| CliError::Usage(format!("cannot create {}: {e}", path.display())))?;
    write_columns(file, path, column_names, columns)
}

fn write_columns(
    file: fs::File,
    path: &Path,
    channel_names: &[String],
    columns: &[Vec<f64>],
) -> CliResult<()> {
    let mut writer = csv::Writer::from_writer(file);
    writer
        .write_record(channel_names)
        .map_err(|e| CliError::Usage(format!("cannot write {}: {e}", path.display())))?;
    let n = columns.first().map_or(0, Vec::len);
    let mut row: Vec<String> = Vec::with_capacity(columns.len());
    for i in 0..n {
        row.clear();
        row.extend(columns.iter().map(|c| c[i].to_string()));
        writer
            .write_record(&row)
            .map_err(|e| CliError::Usage(format!("cannot write {}: {e}", path.display())))?;
    }
    writer
        .flush()
        .map_err(|e| CliError::Usage(format!("cannot write {}: {e}", path.display())))?;
    Ok(())
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    fn write_temp(content: &str) -> tempfile::NamedTempFile {
        use std::io::Write;
        let mut f = tempfile::NamedTempFile::new().unwrap();
        f.write_all(content.as_bytes()).unwrap();
        f
    }

    #[test]
    fn parses_fs_comment_and_channels() {
        let f = write_temp("# fs=256\nch1,ch2\n1.0,2.0\n3.5,-4.25\n");
        let table = read_table(f.path()).unwrap();
        assert_eq!(table.fs, Some(256.0));
        assert_eq!(table.channel_names, vec!["ch1", "ch2"]);
        assert_eq!(table.columns[1], vec![2.0, -4.25]);
    }

    #[test]
    fn reports_malformed_cell_with_line_and_column() {
        let mut content = String::from("ch1\n");
        for i in 0..20 {
            if i == 15 {
                content.push_str("oops\n");
            } else {
                content.push_str("1.0\n");
            }
        }
        let f = write_temp(&content);
        let err = read_table(f.path()).unwrap_err();
        let msg = err.to_string();
        // header is line 1, so the bad cell is on line 17
        assert!(msg.contains("line 17"), "message: {msg}");
        assert!(msg.contains("ch1"), "message: {msg}");
        assert_eq!(err.exit_code(), 3);
    }

    #[test]
    fn reports_nan_cell() {
        let f = write_temp("ch1\n1.0\nNaN\n");
        let err = read_table(f.path()).unwrap_err();
        assert!(err.to_string().contains("line 3"));
        assert_eq!(err.exit_code(), 3);
    }

    #[test]
    fn empty_file_is_a_data_error() {
        let f = write_temp("ch1,ch2\n");
        let err = read_table(f.path()).unwrap_err();
        assert_eq!(err.exit_code(), 3);
    }

    #[test]
    fn select_unknown_channel_is_usage_error() {
        let f = write_temp("a,b\n1,2\n");
        let table = read_table(f.path()).unwrap();
        let err = table.select(&["c".to_string()]).unwrap_err();
        assert_eq!(err.exit_code(), 2);
    }

    proptest! {
        // Shortest round-trip float formatting recovers samples bit-exactly.
        #[test]
        fn csv_round_trip_is_exact(values in proptest::collection::vec(-1e12f64..1e12, 1..50)) {
            let dir = tempfile::tempdir().unwrap();
            let path = dir.path().join("t.csv");
            write_table(&path, 256.0, &["x".to_string()], std::slice::from_ref(&values)).unwrap();
            let back = read_table(&path).unwrap();
            prop_assert_eq!(back.fs, Some(256.0));
            prop_assert_eq!(&back.columns[0], &values);
        }
    }
}
