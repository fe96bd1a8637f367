//! Trajectory CSV input and cleansed CSV output.

use std::io::{Read, Write};
use std::path::Path;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::motion::Provenance;
use crate::netmodel::CellularLocation;

#[derive(Debug, Deserialize)]
struct InputRow {
    object_id: String,
    t: i64,
    lat: f64,
    lon: f64,
    u: u8,
}

/// One cleansed or inferred position.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct OutputRow {
    pub object_id: String,
    pub t: i64,
    pub lat: f64,
    pub lon: f64,
    pub provenance: Provenance,
}

pub fn read_locations_from<R: Read>(reader: R, source: &Path) -> Result<Vec<CellularLocation>> {
    let mut rdr = csv::ReaderBuilder::new()
        .trim(csv::Trim::All)
        .from_reader(reader);
    let mut out = Vec::new();
    for (i, row) in rdr.deserialize::<InputRow>().enumerate() {
        let line = i + 2;
        let row = row.map_err(|e| Error::Parse {
            path: source.to_path_buf(),
            line,
            msg: e.to_string(),
        })?;
        let cl = CellularLocation {
            object_id: row.object_id,
            t: row.t,
            lat: row.lat,
            lon: row.lon,
            u: row.u,
        };
        cl.validate().map_err(|e| Error::Parse {
            path: source.to_path_buf(),
            line,
            msg: e.to_string(),
        })?;
        out.push(cl);
    }
    Ok(out)
}

pub fn read_locations(path: impl AsRef<Path>) -> Result<Vec<CellularLocation>> {
    let path = path.as_ref();
    let f = std::fs::File::open(path)
        .map_err(|e| Error::Input(format!("cannot open {}: {e}", path.display())))?;
    read_locations_from(f, path)
}

pub fn write_locations(path: impl AsRef<Path>, locations: &[CellularLocation]) -> Result<()> {
    let mut w = csv::Writer::from_path(path)?;
    w.write_record(["object_id", "t", "lat", "lon", "u"])?;
    for cl in locations {
        w.write_record([
            cl.object_id.clone(),
            cl.t.to_string(),
            format!("{:.7}", cl.lat),
            format!("{:.7}", cl.lon),
            cl.u.to_string(),
        ])?;
    }
    w.flush()?;
    Ok(())
}

/// Writes rows with fixed 7-decimal coordinates so output bytes depend only
/// on the computed values.
pub fn write_output<W: Write>(writer: W, rows: &[OutputRow]) -> Result<()> {
    let mut w = csv::Writer::from_writer(writer);
    w.write_record(["object_id", "t", "lat", "lon", "provenance"])?;
    for r in rows {
        w.write_record([
            r.object_id.clone(),
            r.t.to_string(),
            format!("{:.7}", r.lat),
            format!("{:.7}", r.lon),
            r.provenance.to_string(),
        ])?;
    }
    w.flush()?;
    Ok(())
}

pub fn read_output(path: impl AsRef<Path>) -> Result<Vec<OutputRow>> {
    let path = path.as_ref();
    let mut rdr = csv::Reader::from_path(path)?;
    rdr.deserialize::<OutputRow>()
        .enumerate()
        .map(|(i, r)| {
            r.map_err(|e| Error::Parse {
                path: path.to_path_buf(),
                line: i + 2,
                msg: e.to_string(),
            })
        })
        .collect()
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn parses_and_validates() {
        let data = "object_id,t,lat,lon,u\na,10,1.3,103.8,3\nb,11,1.31,103.81,5\n";
        let v = read_locations_from(data.as_bytes(), Path::new("in.csv")).unwrap();
        assert_eq!(v.len(), 2);
        assert_eq!(v[1].object_id, "b");
        let bad = "object_id,t,lat,lon,u\na,10,1.3,103.8,7\n";
        let err = read_locations_from(bad.as_bytes(), Path::new("in.csv")).unwrap_err();
        assert!(err.to_string().contains("in.csv:2"), "{err}");
        let bad = "object_id,t,lat,lon,u\na,x,1.3,103.8,1\n";
        assert!(read_locations_from(bad.as_bytes(), Path::new("in.csv")).is_err());
    }

    #[test]
    fn output_round_trip() {
        let rows = vec![OutputRow {
            object_id: "a".into(),
            t: 5,
            lat: 1.25,
            lon: 103.5,
            provenance: Provenance::InferredMissing,
        }];
        let mut buf = Vec::new();
        write_output(&mut buf, &rows).unwrap();
        let text = String::from_utf8(buf).unwrap();
        assert_eq!(
            text,
            "object_id,t,lat,lon,provenance\na,5,1.2500000,103.5000000,inferred_missing\n"
        );
    }
}
