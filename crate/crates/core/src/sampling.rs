//! Reproducible randomness and the i.i.d. / overlapping sampling schemes.
//!
//! Every random stream is a ChaCha8 generator whose 256-bit key is derived
//! from `(master_seed, purpose, cell)` and whose stream id is the
//! replication index `k`:
//!
//! ```text
//! s0  = splitmix64(master_seed ^ splitmix64(purpose_tag))
//! s1  = splitmix64(s0 ^ cell)
//! key = le_bytes(w1..w4), w_j = splitmix64(s1 + j * 0x9E3779B97F4A7C15)
//! rng = ChaCha8Rng::from_seed(key); rng.set_stream(k)
//! ```
//!
//! `cell` is usually the 64-bit FNV-1a hash of a textual cell label (see
//! [`label_id`]). Streams are independent values: replications can run in
//! any order, on any number of threads, and draw the same numbers.

use std::fmt;
use std::str::FromStr;

use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

use crate::distributions::DistributionSpec;
use crate::error::{Result, RiskError};
use crate::sample::Sample;

pub type Stream = ChaCha8Rng;

const GOLDEN: u64 = 0x9E37_79B9_7F4A_7C15;

pub fn splitmix64(x: u64) -> u64 {
    let mut z = x.wrapping_add(GOLDEN);
    z = (z ^ (z >> 30)).wrapping_mul(0xBF58_476D_1CE4_E5B9);
    z = (z ^ (z >> 27)).wrapping_mul(0x94D0_49BB_1331_11EB);
    z ^ (z >> 31)
}

/// 64-bit FNV-1a hash.
pub fn label_id(label: &str) -> u64 {
    let mut h: u64 = 0xcbf2_9ce4_8422_2325;
    for b in label.bytes() {
        h ^= b as u64;
        h = h.wrapping_mul(0x0000_0100_0000_01b3);
    }
    h
}

/// What a stream is used for; distinct purposes never share draws.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum Purpose {
    Sample,
    Companion,
    Oracle,
    Coherence,
    Consistency,
    OrderStatistics,
    Custom(u64),
}

impl Purpose {
    pub fn tag(&self) -> u64 {
        match *self {
            Purpose::Sample => 1,
            Purpose::Companion => 2,
            Purpose::Oracle => 3,
            Purpose::Coherence => 4,
            Purpose::Consistency => 5,
            Purpose::OrderStatistics => 6,
            Purpose::Custom(t) => 0x1000 + t,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub struct StreamFactory {
    master_seed: u64,
}

impl StreamFactory {
    pub fn new(master_seed: u64) -> Self {
        Self { master_seed }
    }

    pub fn master_seed(&self) -> u64 {
        self.master_seed
    }

    pub fn stream(&self, purpose: Purpose, cell: u64, k: u64) -> Stream {
        let s0 = splitmix64(self.master_seed ^ splitmix64(purpose.tag()));
        let s1 = splitmix64(s0 ^ cell);
        let mut key = [0u8; 32];
        for (j, chunk) in key.chunks_exact_mut(8).enumerate() {
            let w = splitmix64(s1.wrapping_add((j as u64 + 1).wrapping_mul(GOLDEN)));
            chunk.copy_from_slice(&w.to_le_bytes());
        }
        let mut rng = ChaCha8Rng::from_seed(key);
        rng.set_stream(k);
        rng
    }
}

/// How an estimation window is built from base draws.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum SamplingScheme {
    Iid { n: usize },
    /// Rolling sums of `h` consecutive base draws.
    Overlapping { n: usize, h: usize },
}

impl SamplingScheme {
    pub fn iid(n: usize) -> Result<Self> {
        SchemeKind::Iid.with_n(n)
    }

    pub fn overlapping(n: usize, h: usize) -> Result<Self> {
        SchemeKind::Overlapping { h }.with_n(n)
    }

    pub fn n(&self) -> usize {
        match *self {
            Self::Iid { n } | Self::Overlapping { n, .. } => n,
        }
    }

    /// Length of the target variable in base periods.
    pub fn horizon(&self) -> usize {
        match *self {
            Self::Iid { .. } => 1,
            Self::Overlapping { h, .. } => h,
        }
    }

    pub fn base_draws(&self) -> usize {
        self.n() + self.horizon() - 1
    }

    pub fn kind(&self) -> SchemeKind {
        match *self {
            Self::Iid { .. } => SchemeKind::Iid,
            Self::Overlapping { h, .. } => SchemeKind::Overlapping { h },
        }
    }
}

impl fmt::Display for SamplingScheme {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}", self.kind())
    }
}

/// A sampling scheme without its sample size, as used in configurations:
/// `iid` or `overlapping:<h>`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(try_from = "String", into = "String")]
pub enum SchemeKind {
    Iid,
    Overlapping { h: usize },
}

impl SchemeKind {
    pub fn with_n(self, n: usize) -> Result<SamplingScheme> {
        if n == 0 {
            return Err(RiskError::InvalidParameter("sample size must be at least 1".into()));
        }
        match self {
            SchemeKind::Iid => Ok(SamplingScheme::Iid { n }),
            SchemeKind::Overlapping { h } if h >= 1 => Ok(SamplingScheme::Overlapping { n, h }),
            SchemeKind::Overlapping { .. } => {
                Err(RiskError::InvalidParameter("overlapping horizon must be at least 1".into()))
            }
        }
    }
}

impl fmt::Display for SchemeKind {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            SchemeKind::Iid => write!(f, "iid"),
            SchemeKind::Overlapping { h } => write!(f, "overlapping:{h}"),
        }
    }
}

impl FromStr for SchemeKind {
    type Err = RiskError;

    fn from_str(s: &str) -> Result<Self> {
        let s = s.trim().to_ascii_lowercase();
        if s == "iid" {
            return Ok(SchemeKind::Iid);
        }
        if let Some(h) = s.strip_prefix("overlapping:") {
            let h: usize = h.parse().map_err(|e| RiskError::Parse(format!("'{s}': {e}")))?;
            if h == 0 {
                return Err(RiskError::Parse("overlapping horizon must be at least 1".into()));
            }
            return Ok(SchemeKind::Overlapping { h });
        }
        Err(RiskError::Parse(format!("unrecognised sampling scheme '{s}'")))
    }
}

impl TryFrom<String> for SchemeKind {
    type Error = RiskError;

    fn try_from(s: String) -> Result<Self> {
        s.parse()
    }
}

impl From<SchemeKind> for String {
    fn from(k: SchemeKind) -> Self {
        k.to_string()
    }
}

/// Fills `out` with one estimation window, reusing `base` as scratch.
pub fn draw_sample_into(
    dist: &DistributionSpec,
    scheme: &SamplingScheme,
    stream: &mut Stream,
    base: &mut Vec<f64>,
    out: &mut Vec<f64>,
) {
    out.clear();
    match *scheme {
        SamplingScheme::Iid { n } => out.extend((0..n).map(|_| dist.sample(stream))),
        SamplingScheme::Overlapping { n, h } => {
            base.clear();
            base.extend((0..n + h - 1).map(|_| dist.sample(stream)));
            out.extend(base.windows(h).map(|w| w.iter().sum::<f64>()));
        }
    }
}

pub fn draw_sample(dist: &DistributionSpec, scheme: &SamplingScheme, stream: &mut Stream) -> Sample {
    let mut base = Vec::new();
    let mut out = Vec::with_capacity(scheme.n());
    draw_sample_into(dist, scheme, stream, &mut base, &mut out);
    Sample::new(out).expect("samplers produce finite values")
}

/// One fresh draw of the target variable (an `h`-day sum for overlapping
/// schemes). Callers pass a stream distinct from the estimation stream.
pub fn draw_secured_companion(dist: &DistributionSpec, scheme: &SamplingScheme, stream: &mut Stream) -> f64 {
    (0..scheme.horizon()).map(|_| dist.sample(stream)).sum()
}

#[cfg(test)]
mod tests {
    use super::*;
    use rand::Rng;

    #[test]
    fn streams_are_reproducible_and_distinct() {
        let f = StreamFactory::new(42);
        let a: Vec<u64> = (0..4).map({
            let mut r = f.stream(Purpose::Sample, 9, 3);
            move |_| r.random()
        }).collect();
        let b: Vec<u64> = (0..4).map({
            let mut r = f.stream(Purpose::Sample, 9, 3);
            move |_| r.random()
        }).collect();
        assert_eq!(a, b);
        let first = |p, c, k| f.stream(p, c, k).random::<u64>();
        let x = first(Purpose::Sample, 9, 3);
        assert_ne!(x, first(Purpose::Sample, 9, 4));
        assert_ne!(x, first(Purpose::Companion, 9, 3));
        assert_ne!(x, first(Purpose::Sample, 10, 3));
        assert_ne!(x, StreamFactory::new(43).stream(Purpose::Sample, 9, 3).random::<u64>());
    }

    #[test]
    fn fnv_reference_values() {
        assert_eq!(label_id(""), 0xcbf29ce484222325);
        assert_eq!(label_id("a"), 0xaf63dc4c8601ec8c);
    }

    #[test]
    fn overlapping_with_unit_horizon_is_iid() {
        let d = DistributionSpec::normal(0.0, 1.0).unwrap();
        let f = StreamFactory::new(1);
        let a = draw_sample(&d, &SamplingScheme::iid(25).unwrap(), &mut f.stream(Purpose::Sample, 0, 0));
        let b = draw_sample(&d, &SamplingScheme::overlapping(25, 1).unwrap(), &mut f.stream(Purpose::Sample, 0, 0));
        assert_eq!(a, b);
    }

    #[test]
    fn overlapping_hand_expansion_and_draw_count() {
        let d = DistributionSpec::normal(0.0, 1.0).unwrap();
        let f = StreamFactory::new(5);
        let mut s = f.stream(Purpose::Sample, 0, 0);
        let z: Vec<f64> = (0..4).map(|_| d.sample(&mut s)).collect();
        let x = draw_sample(&d, &SamplingScheme::overlapping(3, 2).unwrap(), &mut f.stream(Purpose::Sample, 0, 0));
        assert_eq!(x.values(), &[z[0] + z[1], z[1] + z[2], z[2] + z[3]]);

        let scheme = SamplingScheme::overlapping(250, 10).unwrap();
        assert_eq!(scheme.base_draws(), 259);
        let mut s1 = f.stream(Purpose::Sample, 1, 0);
        let mut s2 = f.stream(Purpose::Sample, 1, 0);
        draw_sample(&d, &scheme, &mut s1);
        for _ in 0..259 {
            d.sample(&mut s2);
        }
        assert_eq!(d.sample(&mut s1), d.sample(&mut s2));
    }

    #[test]
    fn companion_variance_scales_with_horizon() {
        let d = DistributionSpec::normal(0.0, 1.0).unwrap();
        let f = StreamFactory::new(8);
        let scheme = SamplingScheme::overlapping(250, 10).unwrap();
        let k = 100_000;
        let c: Vec<f64> = (0..k)
            .map(|i| draw_secured_companion(&d, &scheme, &mut f.stream(Purpose::Companion, 0, i)))
            .collect();
        let m = c.iter().sum::<f64>() / k as f64;
        let v = c.iter().map(|x| (x - m).powi(2)).sum::<f64>() / (k - 1) as f64;
        // sd of the sample variance is about 10 * sqrt(2 / k) = 0.045
        assert!((v - 10.0).abs() < 0.2, "{v}");
        let again = draw_secured_companion(&d, &scheme, &mut f.stream(Purpose::Companion, 0, 17));
        assert_eq!(again, c[17]);
    }

    #[test]
    fn scheme_labels() {
        for s in ["iid", "overlapping:10"] {
            assert_eq!(s.parse::<SchemeKind>().unwrap().to_string(), s);
        }
        assert!("overlapping:0".parse::<SchemeKind>().is_err());
        assert!("rolling".parse::<SchemeKind>().is_err());
        assert!(SamplingScheme::iid(0).is_err());
    }
}
