//! CSV output with a provenance line, shared by every emitted series.

use std::io::Write;

use crate::error::{Error, Result};

/// Shortest round-trip representation; identical inputs give identical bytes.
pub fn real(x: f64) -> String {
    if x.is_nan() {
        "NaN".into()
    } else if x.is_infinite() {
        if x > 0.0 {
            "inf".into()
        } else {
            "-inf".into()
        }
    } else {
        format!("{x:e}")
    }
}

/// The comment line that opens every CSV file.
pub fn provenance_line(config_hash: &str) -> String {
    format!(
        "# stefan-lab {} config_sha256={config_hash}",
        env!("CARGO_PKG_VERSION")
    )
}

/// Write the provenance line, the header and the rows.
pub fn write_csv<W: Write>(
    mut out: W,
    config_hash: &str,
    header: &[&str],
    rows: &[Vec<String>],
) -> Result<()> {
    writeln!(out, "{}", provenance_line(config_hash))?;
    let mut writer = csv::Writer::from_writer(out);
    let csv_err = |e: csv::Error| Error::Io(e.to_string());
    writer.write_record(header).map_err(csv_err)?;
    for row in rows {
        if row.len() != header.len() {
            return Err(Error::Io(format!(
                "row has {} fields but the header has {}",
                row.len(),
                header.len()
            )));
        }
        writer.write_record(row).map_err(csv_err)?;
    }
    writer.flush()?;
    Ok(())
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn provenance_then_header() {
        let mut buf = Vec::new();
        write_csv(
            &mut buf,
            "abc",
            &["a", "b"],
            &[vec![real(0.5), real(f64::NAN)]],
        )
        .unwrap();
        let text = String::from_utf8(buf).unwrap();
        let lines: Vec<&str> = text.lines().collect();
        assert!(lines[0].starts_with("# stefan-lab") && lines[0].ends_with("config_sha256=abc"));
        assert_eq!(lines[1], "a,b");
        assert_eq!(lines[2], "5e-1,NaN");
    }

    #[test]
    fn ragged_rows_are_rejected() {
        assert!(write_csv(Vec::new(), "x", &["a"], &[vec!["1".into(), "2".into()]]).is_err());
    }

    #[test]
    fn reals_round_trip() {
        for x in [0.1, 1.0 / 3.0, -2.5e-300, 6.02e23] {
            assert_eq!(real(x).parse::<f64>().unwrap(), x);
        }
    }
}
