//! Two-part field files: `<stem>.json` holds the header, `<stem>.bin` the raw
//! little-endian scalars in row-major order (last axis contiguous).

use std::fs;
use std::path::{Path, PathBuf};

use poisson_core::{BoundaryCondition, GridKind, GridSpec};
use serde::{Deserialize, Serialize};

use crate::error::{CliError, CliResult};

pub const FORMAT_VERSION: u32 = 1;

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct AxisHeader {
    pub n: usize,
    pub length: f64,
    pub bc: BoundaryCondition,
    pub grid: GridKind,
}

impl AxisHeader {
    pub fn from_spec(spec: &GridSpec) -> Self {
        Self {
            n: spec.n(),
            length: spec.length(),
            bc: spec.bc(),
            grid: spec.kind(),
        }
    }

    pub fn to_spec(&self) -> CliResult<GridSpec> {
        Ok(GridSpec::new(self.n, self.length, self.grid, self.bc)?)
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Precision {
    F32,
    F64,
}

impl Precision {
    pub fn width(self) -> usize {
        match self {
            Precision::F32 => 4,
            Precision::F64 => 8,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum ByteOrder {
    Little,
    Big,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct FieldHeader {
    pub version: u32,
    pub dims: usize,
    pub extents: Vec<usize>,
    /// Grid description per axis; absent for staggered flow snapshots.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub axes: Option<Vec<AxisHeader>>,
    pub precision: Precision,
    pub byte_order: ByteOrder,
}

impl FieldHeader {
    pub fn new(extents: &[usize], axes: Option<Vec<AxisHeader>>, precision: Precision) -> Self {
        Self {
            version: FORMAT_VERSION,
            dims: extents.len(),
            extents: extents.to_vec(),
            axes,
            precision,
            byte_order: ByteOrder::Little,
        }
    }

    pub fn len(&self) -> usize {
        self.extents.iter().product()
    }

    pub fn is_empty(&self) -> bool {
        self.len() == 0
    }

    fn validate(&self) -> CliResult<()> {
        let bad = |m: String| Err(CliError::Io(m));
        if self.version != FORMAT_VERSION {
            return bad(format!("unsupported format version {} (supported: {FORMAT_VERSION})", self.version));
        }
        if self.byte_order != ByteOrder::Little {
            return bad("only little-endian payloads are supported".into());
        }
        if !(1..=3).contains(&self.dims) || self.extents.len() != self.dims {
            return bad(format!("dims {} does not match extents {:?}", self.dims, self.extents));
        }
        if let Some(axes) = &self.axes {
            let ns: Vec<usize> = axes.iter().map(|a| a.n).collect();
            if ns != self.extents {
                return bad(format!("axis sizes {ns:?} do not match extents {:?}", self.extents));
            }
        }
        Ok(())
    }
}

#[derive(Debug, Clone, PartialEq)]
pub enum FieldData {
    F32(Vec<f32>),
    F64(Vec<f64>),
}

impl FieldData {
    pub fn len(&self) -> usize {
        match self {
            FieldData::F32(v) => v.len(),
            FieldData::F64(v) => v.len(),
        }
    }

    pub fn is_empty(&self) -> bool {
        self.len() == 0
    }

    pub fn precision(&self) -> Precision {
        match self {
            FieldData::F32(_) => Precision::F32,
            FieldData::F64(_) => Precision::F64,
        }
    }

    fn to_bytes(&self) -> CliResult<Vec<u8>> {
        let mut out = Vec::new();
        out.try_reserve_exact(self.len() * self.precision().width())
            .map_err(|e| CliError::Alloc(e.to_string()))?;
        match self {
            FieldData::F32(v) => v.iter().for_each(|x| out.extend_from_slice(&x.to_le_bytes())),
            FieldData::F64(v) => v.iter().for_each(|x| out.extend_from_slice(&x.to_le_bytes())),
        }
        Ok(out)
    }

    fn from_bytes(bytes: &[u8], precision: Precision) -> CliResult<Self> {
        let n = bytes.len() / precision.width();
        Ok(match precision {
            Precision::F32 => {
                let mut v = Vec::new();
                v.try_reserve_exact(n).map_err(|e| CliError::Alloc(e.to_string()))?;
                v.extend(bytes.chunks_exact(4).map(|c| f32::from_le_bytes(c.try_into().expect("4 bytes"))));
                FieldData::F32(v)
            }
            Precision::F64 => {
                let mut v = Vec::new();
                v.try_reserve_exact(n).map_err(|e| CliError::Alloc(e.to_string()))?;
                v.extend(bytes.chunks_exact(8).map(|c| f64::from_le_bytes(c.try_into().expect("8 bytes"))));
                FieldData::F64(v)
            }
        })
    }
}

/// Strips a `.json` or `.bin` extension, if any.
pub fn stem_of(path: &Path) -> PathBuf {
    match path.extension().and_then(|e| e.to_str()) {
        Some("json") | Some("bin") => path.with_extension(""),
        _ => path.to_path_buf(),
    }
}

fn with_suffix(stem: &Path, ext: &str) -> PathBuf {
    let mut s = stem.as_os_str().to_owned();
    s.push(".");
    s.push(ext);
    PathBuf::from(s)
}

pub fn header_path(stem: &Path) -> PathBuf {
    with_suffix(stem, "json")
}

pub fn payload_path(stem: &Path) -> PathBuf {
    with_suffix(stem, "bin")
}

fn io_err(path: &Path, e: impl std::fmt::Display) -> CliError {
    CliError::Io(format!("{}: {e}", path.display()))
}

/// Reads a header and its payload. `path` may name either file or the stem.
pub fn read_field(path: &Path) -> CliResult<(FieldHeader, FieldData)> {
    let stem = stem_of(path);
    let hp = header_path(&stem);
    let text = fs::read_to_string(&hp).map_err(|e| io_err(&hp, e))?;
    let header: FieldHeader = serde_json::from_str(&text).map_err(|e| io_err(&hp, e))?;
    header.validate()?;
    let pp = payload_path(&stem);
    let bytes = fs::read(&pp).map_err(|e| io_err(&pp, e))?;
    let expected = header.len() * header.precision.width();
    if bytes.len() != expected {
        return Err(CliError::Io(format!(
            "{}: payload has {} bytes, header requires {expected}",
            pp.display(),
            bytes.len()
        )));
    }
    let data = FieldData::from_bytes(&bytes, header.precision)?;
    Ok((header, data))
}

/// Writes `<stem>.json` and `<stem>.bin`; returns both paths.
pub fn write_field(stem: &Path, header: &FieldHeader, data: &FieldData) -> CliResult<Vec<PathBuf>> {
    if data.len() != header.len() || data.precision() != header.precision {
        return Err(CliError::Io("payload does not match header".into()));
    }
    let hp = header_path(stem);
    let pp = payload_path(stem);
    fs::write(&hp, serde_json::to_string_pretty(header)? + "\n").map_err(|e| io_err(&hp, e))?;
    fs::write(&pp, data.to_bytes()?).map_err(|e| io_err(&pp, e))?;
    Ok(vec![hp, pp])
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn round_trip_both_precisions() {
        let dir = tempfile::tempdir().unwrap();
        let stem = dir.path().join("f");
        for data in [FieldData::F64(vec![1.5, -2.0, 3.25, 0.0, 1e-300, 7.0]), FieldData::F32(vec![1.5, -2.0, 3.25, 0.0, 1e-30, 7.0])] {
            let header = FieldHeader::new(&[2, 3], None, data.precision());
            write_field(&stem, &header, &data).unwrap();
            let (h, d) = read_field(&header_path(&stem)).unwrap();
            assert_eq!(h, header);
            assert_eq!(d, data);
        }
    }

    #[test]
    fn rejects_bad_files() {
        let dir = tempfile::tempdir().unwrap();
        let stem = dir.path().join("g");
        let mut header = FieldHeader::new(&[4], None, Precision::F64);
        write_field(&stem, &header, &FieldData::F64(vec![0.0; 4])).unwrap();
        fs::write(payload_path(&stem), [0u8; 31]).unwrap();
        assert!(matches!(read_field(&stem), Err(CliError::Io(_))));
        header.version = 9;
        fs::write(header_path(&stem), serde_json::to_string(&header).unwrap()).unwrap();
        assert!(matches!(read_field(&stem), Err(CliError::Io(_))));
        assert!(matches!(read_field(&dir.path().join("missing")), Err(CliError::Io(_))));
    }

    #[test]
    fn stems() {
        assert_eq!(stem_of(Path::new("a/b.json")), PathBuf::from("a/b"));
        assert_eq!(stem_of(Path::new("a/b.bin")), PathBuf::from("a/b"));
        assert_eq!(stem_of(Path::new("a/b")), PathBuf::from("a/b"));
        assert_eq!(payload_path(Path::new("x.v1")), PathBuf::from("x.v1.bin"));
    }
}
