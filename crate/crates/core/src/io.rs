//! Dataset files.
//!
//! Binary layout (little-endian): magic `GSMP`, version `u16` (= 1), dim
//! `u32`, record count `u64`, then per record: id length `u16`, UTF-8 id
//! bytes, role `u8` (0 gallery, 1 mate, 2 nonmate, 3 sample) and `dim` f32
//! components.
//!
//! Text layout: a `# gsmp v1 dim=<d>` header line, then one
//! `<id>,<role>,<f1>,...,<fd>` line per record with the role spelled out.
//!
//! Components are f32 on disk and widened to f64 on read.

use std::collections::BTreeMap;
use std::fmt::Write as _;
use std::fs;
use std::path::Path;
use std::str::FromStr;

use thiserror::Error;

use crate::gallery::{CondensedGallery, Gallery, ProbeSet, Provenance, SampleSet};
use crate::vector::{normalize, FeatureVector, IdentityId};

pub const MAGIC: &[u8; 4] = b"GSMP";
pub const VERSION: u16 = 1;
const TEXT_MAGIC: &str = "# gsmp";

#[derive(Debug, Error)]
pub enum FormatError {
    #[error("i/o: {0}")]
    Io(#[from] std::io::Error),
    #[error("bad magic: not a gsmp dataset")]
    BadMagic,
    #[error("unsupported format version {0}")]
    UnsupportedVersion(u16),
    #[error("record {record}: expected {expected} components, found {found}")]
    DimMismatch { record: usize, expected: usize, found: usize },
    #[error("truncated file: {0}")]
    Truncated(String),
    #[error("{0} bytes of trailing data after the last record")]
    TrailingData(usize),
    #[error("record {record}: invalid role `{role}`")]
    InvalidRole { record: usize, role: String },
    #[error("record {record}: invalid identity id: {reason}")]
    InvalidId { record: usize, reason: String },
    #[error("line {line}: {reason}")]
    Parse { line: usize, reason: String },
    #[error("record {0}: non-finite component")]
    NonFinite(usize),
    #[error("dataset has no `{0}` records")]
    MissingRole(&'static str),
    #[error(transparent)]
    Invalid(#[from] crate::error::Error),
}

impl FormatError {
    /// Stable numeric code per error kind; the CLI uses it as exit status.
    pub fn code(&self) -> i32 {
        match self {
            FormatError::Io(_) => 10,
            FormatError::BadMagic => 11,
            FormatError::UnsupportedVersion(_) => 12,
            FormatError::DimMismatch { .. } => 13,
            FormatError::Truncated(_) => 14,
            FormatError::TrailingData(_) => 15,
            FormatError::InvalidRole { .. } => 16,
            FormatError::InvalidId { .. } => 17,
            FormatError::Parse { .. } => 18,
            FormatError::NonFinite(_) => 19,
            FormatError::MissingRole(_) => 20,
            FormatError::Invalid(_) => 21,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Role {
    Gallery = 0,
    Mate = 1,
    Nonmate = 2,
    Sample = 3,
}

impl Role {
    pub fn name(self) -> &'static str {
        match self {
            Role::Gallery => "gallery",
            Role::Mate => "mate",
            Role::Nonmate => "nonmate",
            Role::Sample => "sample",
        }
    }

    fn from_u8(b: u8) -> Option<Self> {
        match b {
            0 => Some(Role::Gallery),
            1 => Some(Role::Mate),
            2 => Some(Role::Nonmate),
            3 => Some(Role::Sample),
            _ => None,
        }
    }
}

impl FromStr for Role {
    type Err = ();

    fn from_str(s: &str) -> Result<Self, ()> {
        [Role::Gallery, Role::Mate, Role::Nonmate, Role::Sample]
            .into_iter()
            .find(|r| r.name() == s)
            .ok_or(())
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub enum Format {
    #[default]
    Binary,
    Text,
}

impl FromStr for Format {
    type Err = String;

    fn from_str(s: &str) -> Result<Self, String> {
        match s {
            "binary" | "bin" => Ok(Format::Binary),
            "text" | "txt" => Ok(Format::Text),
            other => Err(format!("unknown format `{other}` (expected binary or text)")),
        }
    }
}

/// One on-disk record. Components keep their f32 on-disk precision.
#[derive(Debug, Clone, PartialEq)]
pub struct Record {
    pub id: String,
    pub role: Role,
    pub values: Vec<f32>,
}

#[derive(Debug, Clone, PartialEq)]
pub struct Dataset {
    pub dim: usize,
    pub records: Vec<Record>,
}

fn to_f32(v: &FeatureVector) -> Vec<f32> {
    v.iter().map(|&c| c as f32).collect()
}

impl Dataset {
    pub fn new(dim: usize) -> Self {
        Self { dim, records: Vec::new() }
    }

    pub fn push(&mut self, id: &str, role: Role, v: &FeatureVector) {
        self.records.push(Record { id: id.to_string(), role, values: to_f32(v) });
    }

    pub fn from_gallery(g: &Gallery) -> Self {
        let mut d = Self::new(g.dim());
        d.append_gallery(g);
        d
    }

    pub fn append_gallery(&mut self, g: &Gallery) {
        for (id, vs) in g.entries() {
            for v in vs {
                self.push(id.as_str(), Role::Gallery, v);
            }
        }
    }

    /// Mates first, then non-mates (written with an empty id).
    pub fn from_probes(p: &ProbeSet) -> Self {
        let mut d = Self::new(p.dim());
        for (id, v) in &p.mates {
            d.push(id.as_str(), Role::Mate, v);
        }
        for v in &p.nonmates {
            d.push("", Role::Nonmate, v);
        }
        d
    }

    pub fn from_condensed(c: &CondensedGallery) -> Self {
        let mut d = Self::new(c.dim());
        for (id, set) in c.entries() {
            for v in &set.samples {
                d.push(id.as_str(), Role::Sample, v);
            }
        }
        d
    }

    pub fn has_role(&self, role: Role) -> bool {
        self.records.iter().any(|r| r.role == role)
    }

    fn vector(&self, i: usize, normalize_on_ingest: bool) -> Result<FeatureVector, FormatError> {
        let v = FeatureVector::from_f32(&self.records[i].values).map_err(|_| FormatError::NonFinite(i))?;
        Ok(if normalize_on_ingest { normalize(&v)? } else { v })
    }

    fn identity(&self, i: usize) -> Result<IdentityId, FormatError> {
        IdentityId::new(self.records[i].id.clone())
            .map_err(|e| FormatError::InvalidId { record: i, reason: e.to_string() })
    }

    /// Gallery from the `gallery` records, in file order per identity.
    pub fn gallery(&self, normalize_on_ingest: bool) -> Result<Gallery, FormatError> {
        let mut entries: BTreeMap<IdentityId, Vec<FeatureVector>> = BTreeMap::new();
        for (i, r) in self.records.iter().enumerate() {
            if r.role == Role::Gallery {
                entries.entry(self.identity(i)?).or_default().push(self.vector(i, normalize_on_ingest)?);
            }
        }
        if entries.is_empty() {
            return Err(FormatError::MissingRole("gallery"));
        }
        Ok(Gallery::new(entries)?)
    }

    pub fn probes(&self, normalize_on_ingest: bool) -> Result<ProbeSet, FormatError> {
        let mut mates = Vec::new();
        let mut nonmates = Vec::new();
        for (i, r) in self.records.iter().enumerate() {
            match r.role {
                Role::Mate => mates.push((self.identity(i)?, self.vector(i, normalize_on_ingest)?)),
                Role::Nonmate => nonmates.push(self.vector(i, normalize_on_ingest)?),
                _ => {}
            }
        }
        if mates.is_empty() && nonmates.is_empty() {
            return Err(FormatError::MissingRole("mate/nonmate"));
        }
        Ok(ProbeSet::new(mates, nonmates, self.dim)?)
    }

    /// Probe vectors of either kind, in file order.
    pub fn probe_vectors(&self, normalize_on_ingest: bool) -> Result<Vec<FeatureVector>, FormatError> {
        (0..self.records.len())
            .filter(|&i| matches!(self.records[i].role, Role::Mate | Role::Nonmate))
            .map(|i| self.vector(i, normalize_on_ingest))
            .collect()
    }

    /// Condensed gallery from the `sample` records. Samples are never renormalized.
    pub fn condensed(&self, provenance: Provenance) -> Result<CondensedGallery, FormatError> {
        let mut entries: BTreeMap<IdentityId, Vec<FeatureVector>> = BTreeMap::new();
        for (i, r) in self.records.iter().enumerate() {
            if r.role == Role::Sample {
                entries.entry(self.identity(i)?).or_default().push(self.vector(i, false)?);
            }
        }
        if entries.is_empty() {
            return Err(FormatError::MissingRole("sample"));
        }
        let entries = entries.into_iter().map(|(id, vs)| (id, SampleSet::verbatim(vs))).collect();
        Ok(CondensedGallery::new(entries, self.dim, provenance)?)
    }

    fn check(&self) -> Result<(), FormatError> {
        for (i, r) in self.records.iter().enumerate() {
            if r.values.len() != self.dim {
                return Err(FormatError::DimMismatch { record: i, expected: self.dim, found: r.values.len() });
            }
            if r.values.iter().any(|v| !v.is_finite()) {
                return Err(FormatError::NonFinite(i));
            }
        }
        Ok(())
    }

    pub fn to_binary(&self) -> Result<Vec<u8>, FormatError> {
        self.check()?;
        let dim = u32::try_from(self.dim).map_err(|_| FormatError::Invalid(crate::Error::InvalidParameter("dim exceeds u32".into())))?;
        let mut out = Vec::with_capacity(18 + self.records.len() * (8 + 4 * self.dim));
        out.extend_from_slice(MAGIC);
        out.extend_from_slice(&VERSION.to_le_bytes());
        out.extend_from_slice(&dim.to_le_bytes());
        out.extend_from_slice(&(self.records.len() as u64).to_le_bytes());
        for (i, r) in self.records.iter().enumerate() {
            let len = u16::try_from(r.id.len())
                .map_err(|_| FormatError::InvalidId { record: i, reason: "longer than 65535 bytes".into() })?;
            out.extend_from_slice(&len.to_le_bytes());
            out.extend_from_slice(r.id.as_bytes());
            out.push(r.role as u8);
            for v in &r.values {
                out.extend_from_slice(&v.to_le_bytes());
            }
        }
        Ok(out)
    }

    pub fn from_binary(bytes: &[u8]) -> Result<Self, FormatError> {
        let mut cur = Cursor { bytes, pos: 0 };
        if cur.take(4, "magic").map_err(|_| FormatError::BadMagic)? != MAGIC {
            return Err(FormatError::BadMagic);
        }
        let version = u16::from_le_bytes(cur.array("version")?);
        if version != VERSION {
            return Err(FormatError::UnsupportedVersion(version));
        }
        let dim = u32::from_le_bytes(cur.array("dim")?) as usize;
        let count = u64::from_le_bytes(cur.array("record count")?);
        let mut records = Vec::new();
        for i in 0..count as usize {
            let len = u16::from_le_bytes(cur.array("id length")?) as usize;
            let id = std::str::from_utf8(cur.take(len, "id")?)
                .map_err(|e| FormatError::InvalidId { record: i, reason: e.to_string() })?
                .to_string();
            let role_byte = cur.take(1, "role")?[0];
            let role = Role::from_u8(role_byte)
                .ok_or_else(|| FormatError::InvalidRole { record: i, role: role_byte.to_string() })?;
            let values = cur
                .take(4 * dim, "components")?
                .chunks_exact(4)
                .map(|c| f32::from_le_bytes([c[0], c[1], c[2], c[3]]))
                .collect();
            records.push(Record { id, role, values });
        }
        if cur.pos != bytes.len() {
            return Err(FormatError::TrailingData(bytes.len() - cur.pos));
        }
        let d = Self { dim, records };
        d.check()?;
        Ok(d)
    }

    pub fn to_text(&self) -> Result<String, FormatError> {
        self.check()?;
        let mut out = format!("{TEXT_MAGIC} v{VERSION} dim={}\n", self.dim);
        for (i, r) in self.records.iter().enumerate() {
            if r.id.contains([',', '\n', '\r']) {
                return Err(FormatError::InvalidId { record: i, reason: "text ids cannot contain commas or newlines".into() });
            }
            out.push_str(&r.id);
            out.push(',');
            out.push_str(r.role.name());
            for v in &r.values {
                // `{}` on f32 prints the shortest string that round-trips.
                write!(out, ",{v}").expect("writing to a String");
            }
            out.push('\n');
        }
        Ok(out)
    }

    pub fn from_text(text: &str) -> Result<Self, FormatError> {
        let mut lines = text.lines().enumerate();
        let header = lines.next().map(|(_, l)| l).unwrap_or("");
        let rest = header.strip_prefix(TEXT_MAGIC).ok_or(FormatError::BadMagic)?;
        let mut parts = rest.split_whitespace();
        let version = parts.next().and_then(|v| v.strip_prefix('v')).ok_or_else(|| FormatError::Parse {
            line: 1,
            reason: "missing version".into(),
        })?;
        let version: u16 = version
            .parse()
            .map_err(|_| FormatError::Parse { line: 1, reason: format!("bad version `{version}`") })?;
        if version != VERSION {
            return Err(FormatError::UnsupportedVersion(version));
        }
        let dim: usize = parts
            .next()
            .and_then(|d| d.strip_prefix("dim="))
            .and_then(|d| d.parse().ok())
            .ok_or_else(|| FormatError::Parse { line: 1, reason: "missing or bad dim=<d>".into() })?;

        let mut records = Vec::new();
        for (n, line) in lines {
            if line.trim().is_empty() {
                continue;
            }
            let i = records.len();
            let mut fields = line.split(',');
            let id = fields.next().unwrap_or_default().to_string();
            let role_name = fields
                .next()
                .ok_or_else(|| FormatError::Truncated(format!("line {} has no role", n + 1)))?;
            let role = role_name
                .parse::<Role>()
                .map_err(|_| FormatError::InvalidRole { record: i, role: role_name.to_string() })?;
            let values = fields
                .map(|f| {
                    f.trim()
                        .parse::<f32>()
                        .map_err(|_| FormatError::Parse { line: n + 1, reason: format!("bad number `{f}`") })
                })
                .collect::<Result<Vec<f32>, _>>()?;
            if values.len() < dim {
                return Err(FormatError::Truncated(format!(
                    "line {} has {} of {dim} components",
                    n + 1,
                    values.len()
                )));
            }
            if values.len() > dim {
                return Err(FormatError::DimMismatch { record: i, expected: dim, found: values.len() });
            }
            records.push(Record { id, role, values });
        }
        let d = Self { dim, records };
        d.check()?;
        Ok(d)
    }

    /// Parses either format, chosen by the leading bytes.
    pub fn from_bytes(bytes: &[u8]) -> Result<Self, FormatError> {
        if bytes.starts_with(MAGIC) {
            Self::from_binary(bytes)
        } else if bytes.starts_with(TEXT_MAGIC.as_bytes()) {
            let text = std::str::from_utf8(bytes)
                .map_err(|e| FormatError::Parse { line: 0, reason: e.to_string() })?;
            Self::from_text(text)
        } else {
            Err(FormatError::BadMagic)
        }
    }

    pub fn to_bytes(&self, format: Format) -> Result<Vec<u8>, FormatError> {
        match format {
            Format::Binary => self.to_binary(),
            Format::Text => self.to_text().map(String::into_bytes),
        }
    }
}

struct Cursor<'a> {
    bytes: &'a [u8],
    pos: usize,
}

impl<'a> Cursor<'a> {
    fn take(&mut self, n: usize, what: &str) -> Result<&'a [u8], FormatError> {
        let end = self.pos.checked_add(n).filter(|&e| e <= self.bytes.len()).ok_or_else(|| {
            FormatError::Truncated(format!("{what} at byte {} needs {n} bytes", self.pos))
        })?;
        let s = &self.bytes[self.pos..end];
        self.pos = end;
        Ok(s)
    }

    fn array<const N: usize>(&mut self, what: &str) -> Result<[u8; N], FormatError> {
        Ok(self.take(N, what)?.try_into().expect("length checked"))
    }
}

pub fn read_dataset(path: impl AsRef<Path>) -> Result<Dataset, FormatError> {
    Dataset::from_bytes(&fs::read(path)?)
}

pub fn write_dataset(path: impl AsRef<Path>, dataset: &Dataset, format: Format) -> Result<(), FormatError> {
    fs::write(path, dataset.to_bytes(format)?)?;
    Ok(())
}
