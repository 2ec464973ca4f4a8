use serde::{Deserialize, Serialize};

use crate::rng::StreamKey;

/// Where a batch of draws came from.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct Provenance {
    pub key: StreamKey,
    /// Stream position (in 64-bit words) at which the batch started.
    pub counter: u64,
    /// Canonical text of the generating spec.
    pub spec: String,
}

#[derive(Debug, Clone, PartialEq)]
pub struct Sample {
    pub values: Vec<f64>,
    pub provenance: Option<Provenance>,
}

impl Sample {
    pub fn new(values: Vec<f64>, provenance: Option<Provenance>) -> Self {
        Sample { values, provenance }
    }

    pub fn len(&self) -> usize {
        self.values.len()
    }

    pub fn is_empty(&self) -> bool {
        self.values.is_empty()
    }

    pub fn seed(&self) -> Option<u64> {
        self.provenance.as_ref().map(|p| p.key.seed)
    }
}

impl AsRef<[f64]> for Sample {
    fn as_ref(&self) -> &[f64] {
        &self.values
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct PairSample {
    pub xs: Vec<f64>,
    pub ys: Vec<f64>,
    pub provenance: Option<Provenance>,
}

impl PairSample {
    pub fn len(&self) -> usize {
        self.xs.len()
    }

    pub fn is_empty(&self) -> bool {
        self.xs.is_empty()
    }

    pub fn seed(&self) -> Option<u64> {
        self.provenance.as_ref().map(|p| p.key.seed)
    }

    pub fn iter(&self) -> impl Iterator<Item = (f64, f64)> + '_ {
        self.xs.iter().copied().zip(self.ys.iter().copied())
    }

    /// The pairs with coordinates exchanged.
    pub fn swapped(&self) -> PairSample {
        PairSample {
            xs: self.ys.clone(),
            ys: self.xs.clone(),
            provenance: self.provenance.clone(),
        }
    }
}
