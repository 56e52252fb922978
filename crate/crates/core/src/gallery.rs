//! Containers for enrolled galleries, probe sets and condensed galleries.

use std::collections::BTreeMap;
use std::fmt;
use std::str::FromStr;

use crate::error::{Error, Result};
use crate::vector::{check_dims, normalize, FeatureVector, IdentityId};

/// Identities mapped to their enrolled feature vectors.
#[derive(Debug, Clone, PartialEq)]
pub struct Gallery {
    entries: BTreeMap<IdentityId, Vec<FeatureVector>>,
    dim: usize,
}

impl Gallery {
    pub fn new(entries: BTreeMap<IdentityId, Vec<FeatureVector>>) -> Result<Self> {
        let dim = entries
            .values()
            .flat_map(|vs| vs.first())
            .map(FeatureVector::dim)
            .next()
            .ok_or(Error::Empty("gallery has no identities"))?;
        for (id, vs) in &entries {
            if vs.is_empty() {
                return Err(Error::InvalidParameter(format!("identity `{id}` has no vectors")));
            }
            for v in vs {
                check_dims(dim, v.dim())?;
            }
        }
        Ok(Self { entries, dim })
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    pub fn entries(&self) -> &BTreeMap<IdentityId, Vec<FeatureVector>> {
        &self.entries
    }

    pub fn into_entries(self) -> BTreeMap<IdentityId, Vec<FeatureVector>> {
        self.entries
    }

    pub fn num_identities(&self) -> usize {
        self.entries.len()
    }

    pub fn num_vectors(&self) -> usize {
        self.entries.values().map(Vec::len).sum()
    }

    pub fn get(&self, id: &IdentityId) -> Option<&[FeatureVector]> {
        self.entries.get(id).map(Vec::as_slice)
    }

    /// L2-normalizes every vector (the normalize-on-ingest step).
    pub fn normalized(&self) -> Result<Self> {
        let entries = self
            .entries
            .iter()
            .map(|(id, vs)| Ok((id.clone(), vs.iter().map(normalize).collect::<Result<_>>()?)))
            .collect::<Result<_>>()?;
        Ok(Self { entries, dim: self.dim })
    }
}

/// Mate probes carry their true identity; non-mate probes carry none.
#[derive(Debug, Clone, PartialEq)]
pub struct ProbeSet {
    pub mates: Vec<(IdentityId, FeatureVector)>,
    pub nonmates: Vec<FeatureVector>,
    dim: usize,
}

impl ProbeSet {
    pub fn new(
        mates: Vec<(IdentityId, FeatureVector)>,
        nonmates: Vec<FeatureVector>,
        dim: usize,
    ) -> Result<Self> {
        for v in mates.iter().map(|(_, v)| v).chain(&nonmates) {
            check_dims(dim, v.dim())?;
        }
        Ok(Self { mates, nonmates, dim })
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    pub fn len(&self) -> usize {
        self.mates.len() + self.nonmates.len()
    }

    pub fn is_empty(&self) -> bool {
        self.len() == 0
    }

    pub fn normalized(&self) -> Result<Self> {
        Ok(Self {
            mates: self
                .mates
                .iter()
                .map(|(id, v)| Ok((id.clone(), normalize(v)?)))
                .collect::<Result<_>>()?,
            nonmates: self.nonmates.iter().map(normalize).collect::<Result<_>>()?,
            dim: self.dim,
        })
    }

    /// Every mate identity must be enrolled in `gallery`.
    pub fn check_against(&self, gallery: &CondensedGallery) -> Result<()> {
        check_dims(gallery.dim(), self.dim)?;
        for (id, _) in &self.mates {
            if !gallery.entries().contains_key(id) {
                return Err(Error::UnknownIdentity(id.to_string()));
            }
        }
        Ok(())
    }
}

/// Representative vectors of one identity after condensation.
#[derive(Debug, Clone, PartialEq)]
pub struct SampleSet {
    pub samples: Vec<FeatureVector>,
    /// Number of vectors the samples were derived from.
    pub source_count: usize,
}

impl SampleSet {
    /// Wraps vectors as their own samples (Raw / PrunRaw).
    pub fn verbatim(samples: Vec<FeatureVector>) -> Self {
        let source_count = samples.len();
        Self { samples, source_count }
    }

    pub fn len(&self) -> usize {
        self.samples.len()
    }

    pub fn is_empty(&self) -> bool {
        self.samples.is_empty()
    }
}

/// How a gallery was derived from enrolled vectors.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum Provenance {
    Raw,
    PrunedRaw,
    Single,
    PrunedSingle,
    Generated,
    PrunedGenerated,
}

impl Provenance {
    pub const ALL: [Provenance; 6] = [
        Provenance::Raw,
        Provenance::PrunedRaw,
        Provenance::Single,
        Provenance::PrunedSingle,
        Provenance::Generated,
        Provenance::PrunedGenerated,
    ];

    /// Selector spelling used by the CLI and config files.
    pub fn key(self) -> &'static str {
        match self {
            Provenance::Raw => "raw",
            Provenance::PrunedRaw => "prun_raw",
            Provenance::Single => "sgl",
            Provenance::PrunedSingle => "prun_sgl",
            Provenance::Generated => "gen",
            Provenance::PrunedGenerated => "prun_gen",
        }
    }

    /// Display name used in report tables.
    pub fn label(self) -> &'static str {
        match self {
            Provenance::Raw => "Raw",
            Provenance::PrunedRaw => "PrunRaw",
            Provenance::Single => "Sgl",
            Provenance::PrunedSingle => "PrunSgl",
            Provenance::Generated => "Gen",
            Provenance::PrunedGenerated => "PrunGen",
        }
    }

    pub fn is_pruned(self) -> bool {
        matches!(
            self,
            Provenance::PrunedRaw | Provenance::PrunedSingle | Provenance::PrunedGenerated
        )
    }
}

impl fmt::Display for Provenance {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.key())
    }
}

impl FromStr for Provenance {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        Provenance::ALL
            .into_iter()
            .find(|p| p.key() == s)
            .ok_or_else(|| Error::InvalidParameter(format!("unknown method `{s}`")))
    }
}

/// Identities mapped to their representative samples.
#[derive(Debug, Clone, PartialEq)]
pub struct CondensedGallery {
    entries: BTreeMap<IdentityId, SampleSet>,
    dim: usize,
    pub provenance: Provenance,
}

impl CondensedGallery {
    pub fn new(
        entries: BTreeMap<IdentityId, SampleSet>,
        dim: usize,
        provenance: Provenance,
    ) -> Result<Self> {
        if entries.is_empty() {
            return Err(Error::Empty("condensed gallery has no identities"));
        }
        for (id, set) in &entries {
            if set.is_empty() {
                return Err(Error::InvalidParameter(format!("identity `{id}` has no samples")));
            }
            for s in &set.samples {
                check_dims(dim, s.dim())?;
            }
        }
        Ok(Self { entries, dim, provenance })
    }

    /// The uncondensed gallery, each vector its own sample.
    pub fn raw(g: &Gallery) -> Self {
        let entries = g
            .entries()
            .iter()
            .map(|(id, vs)| (id.clone(), SampleSet::verbatim(vs.clone())))
            .collect();
        Self { entries, dim: g.dim(), provenance: Provenance::Raw }
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    pub fn entries(&self) -> &BTreeMap<IdentityId, SampleSet> {
        &self.entries
    }

    pub fn num_identities(&self) -> usize {
        self.entries.len()
    }

    pub fn num_samples(&self) -> usize {
        self.entries.values().map(SampleSet::len).sum()
    }

    /// Mean number of samples per identity.
    pub fn avg_gallery_size(&self) -> f64 {
        self.num_samples() as f64 / self.num_identities() as f64
    }
}
