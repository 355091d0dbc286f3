use serde::Serialize;

use crate::error::Result;
use crate::spec::Format;

/// A table row type with a fixed, versioned column layout.
pub trait Row: Serialize {
    const SCHEMA: &'static str;
    const COLUMNS: &'static [&'static str];
}

/// One output file, rendered in memory.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Artifact {
    pub name: String,
    pub bytes: Vec<u8>,
}

pub fn render<R: Row>(rows: &[R], time_unit: &str, format: Format) -> Result<Vec<u8>> {
    match format {
        Format::Csv => {
            let mut out = format!("# schema={} time_unit={time_unit} power_unit=P\n", R::SCHEMA).into_bytes();
            let mut w = csv::WriterBuilder::new().has_headers(false).from_writer(&mut out);
            w.write_record(R::COLUMNS)?;
            for row in rows {
                w.serialize(row)?;
            }
            w.flush()?;
            drop(w);
            Ok(out)
        }
        Format::Json => {
            #[derive(Serialize)]
            struct Doc<'a, R> {
                schema: &'static str,
                time_unit: &'a str,
                power_unit: &'static str,
                rows: &'a [R],
            }
            let mut out = serde_json::to_vec_pretty(&Doc {
                schema: R::SCHEMA,
                time_unit,
                power_unit: "P",
                rows,
            })?;
            out.push(b'\n');
            Ok(out)
        }
    }
}

pub fn artifact<R: Row>(stem: &str, rows: &[R], time_unit: &str, format: Format) -> Result<Artifact> {
    Ok(Artifact {
        name: format!("{stem}.{}", format.extension()),
        bytes: render(rows, time_unit, format)?,
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    #[derive(Serialize)]
    struct Demo {
        a: f64,
        b: Option<f64>,
    }

    impl Row for Demo {
        const SCHEMA: &'static str = "demo/v1";
        const COLUMNS: &'static [&'static str] = &["a", "b"];
    }

    #[test]
    fn csv_has_versioned_header_even_when_empty() {
        let out = render::<Demo>(&[], "us", Format::Csv).unwrap();
        assert_eq!(String::from_utf8(out).unwrap(), "# schema=demo/v1 time_unit=us power_unit=P\na,b\n");
        let out = render(&[Demo { a: 0.5, b: None }], "slot", Format::Csv).unwrap();
        assert!(String::from_utf8(out).unwrap().ends_with("a,b\n0.5,\n"));
    }

    #[test]
    fn json_wraps_rows() {
        let out = render(&[Demo { a: 1.0, b: Some(2.0) }], "us", Format::Json).unwrap();
        let v: serde_json::Value = serde_json::from_slice(&out).unwrap();
        assert_eq!(v["schema"], "demo/v1");
        assert_eq!(v["rows"][0]["b"], 2.0);
    }
}
