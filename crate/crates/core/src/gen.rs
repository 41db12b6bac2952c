//! Seeded random instance generators.
//!
//! * `UNI`: every applicant lists `⌊|P|·d⌋` distinct posts drawn uniformly
//!   without replacement, ranked in draw order.
//! * `HC`: a seeded global post order is drawn first; each applicant–post pair
//!   is an edge with probability `d`, and every list follows the global order.
//!
//! Generation is deterministic for a given [`GenSpec`] (ChaCha8 stream).

use std::fmt;
use std::str::FromStr;

use rand::seq::SliceRandom;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::instance::Instance;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub enum Model {
    #[serde(rename = "UNI")]
    Uniform,
    #[serde(rename = "HC")]
    HighlyCorrelated,
}

impl Model {
    /// Stable identifier mixed into grid seeds.
    pub fn id(self) -> u64 {
        match self {
            Model::Uniform => 1,
            Model::HighlyCorrelated => 2,
        }
    }
}

impl fmt::Display for Model {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Model::Uniform => "UNI",
            Model::HighlyCorrelated => "HC",
        })
    }
}

impl FromStr for Model {
    type Err = Error;
    fn from_str(s: &str) -> Result<Self> {
        match s.to_ascii_lowercase().as_str() {
            "uni" => Ok(Model::Uniform),
            "hc" => Ok(Model::HighlyCorrelated),
            _ => Err(Error::InvalidConfig(format!("unknown model `{s}`"))),
        }
    }
}

/// Density in `[0, 1]`, stored exactly as millionths.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct Density(u32);

impl Density {
    pub const SCALE: u32 = 1_000_000;

    pub fn from_millionths(ppm: u32) -> Result<Self> {
        if ppm > Self::SCALE {
            return Err(Error::InvalidConfig(format!(
                "density {} exceeds 1",
                Density(ppm)
            )));
        }
        Ok(Density(ppm))
    }

    pub fn millionths(self) -> u32 {
        self.0
    }

    /// `d·1000` rounded half up.
    pub fn thousandths(self) -> u64 {
        (u64::from(self.0) + 500) / 1000
    }

    /// `⌊n·d⌋`, exactly.
    pub fn floor_times(self, n: usize) -> usize {
        (n as u128 * u128::from(self.0) / u128::from(Self::SCALE)) as usize
    }

    pub fn to_f64(self) -> f64 {
        f64::from(self.0) / f64::from(Self::SCALE)
    }
}

impl fmt::Display for Density {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let whole = self.0 / Self::SCALE;
        let frac = self.0 % Self::SCALE;
        if frac == 0 {
            return write!(f, "{whole}");
        }
        let digits = format!("{frac:06}");
        write!(f, "{whole}.{}", digits.trim_end_matches('0'))
    }
}

impl FromStr for Density {
    type Err = Error;
    /// Parses a plain decimal such as `0.02`; at most six fractional digits.
    fn from_str(s: &str) -> Result<Self> {
        let bad = || Error::InvalidConfig(format!("invalid density `{s}`"));
        let s = s.trim();
        let (whole, frac) = s.split_once('.').unwrap_or((s, ""));
        if (whole.is_empty() && frac.is_empty()) || frac.len() > 6 {
            return Err(bad());
        }
        if !whole
            .chars()
            .chain(frac.chars())
            .all(|c| c.is_ascii_digit())
        {
            return Err(bad());
        }
        let whole: u64 = if whole.is_empty() {
            0
        } else {
            whole.parse().map_err(|_| bad())?
        };
        let frac_val: u64 = if frac.is_empty() {
            0
        } else {
            format!("{frac:0<6}").parse().map_err(|_| bad())?
        };
        let ppm = whole
            .checked_mul(u64::from(Self::SCALE))
            .and_then(|w| w.checked_add(frac_val))
            .ok_or_else(bad)?;
        Density::from_millionths(u32::try_from(ppm).map_err(|_| bad())?)
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct GenSpec {
    pub model: Model,
    pub n_applicants: usize,
    pub n_posts: usize,
    pub density: Density,
    pub seed: u64,
}

pub fn generate(spec: &GenSpec) -> Result<Instance> {
    match spec.model {
        Model::Uniform => gen_uniform(spec),
        Model::HighlyCorrelated => gen_highly_correlated(spec),
    }
}

pub fn gen_uniform(spec: &GenSpec) -> Result<Instance> {
    let mut rng = ChaCha8Rng::seed_from_u64(spec.seed);
    let len = spec.density.floor_times(spec.n_posts);
    let mut posts: Vec<usize> = (0..spec.n_posts).collect();
    let prefs = (0..spec.n_applicants)
        .map(|_| {
            let (chosen, _) = posts.partial_shuffle(&mut rng, len);
            chosen.to_vec()
        })
        .collect();
    Instance::new(spec.n_posts, prefs)
}

pub fn gen_highly_correlated(spec: &GenSpec) -> Result<Instance> {
    let mut rng = ChaCha8Rng::seed_from_u64(spec.seed);
    let mut order: Vec<usize> = (0..spec.n_posts).collect();
    order.shuffle(&mut rng);
    let ppm = spec.density.millionths();
    let prefs = (0..spec.n_applicants)
        .map(|_| {
            let picked: Vec<bool> = (0..spec.n_posts)
                .map(|_| rng.gen_range(0..Density::SCALE) < ppm)
                .collect();
            order.iter().copied().filter(|&p| picked[p]).collect()
        })
        .collect();
    Instance::new(spec.n_posts, prefs)
}

fn splitmix64(mut z: u64) -> u64 {
    z = z.wrapping_add(0x9E37_79B9_7F4A_7C15);
    z = (z ^ (z >> 30)).wrapping_mul(0xBF58_476D_1CE4_E5B9);
    z = (z ^ (z >> 27)).wrapping_mul(0x94D0_49BB_1331_11EB);
    z ^ (z >> 31)
}

/// Seed of one grid cell: each field is folded in with
/// `state = splitmix64(state ^ field)`, starting from the master seed.
pub fn cell_seed(master: u64, model: Model, n: usize, density: Density, replicate: usize) -> u64 {
    [
        model.id(),
        n as u64,
        density.thousandths(),
        replicate as u64,
    ]
    .into_iter()
    .fold(splitmix64(master), |state, field| splitmix64(state ^ field))
}
