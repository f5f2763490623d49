//! Counter-based seed derivation.
//!
//! Every random stream in the crate is addressed by a path of integers
//! (experiment, replicate, stream role, ...) hashed down from a master seed,
//! so results never depend on the order in which work is scheduled.

use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

/// Stream roles used when deriving child seeds.
pub mod role {
    pub const DATA: u64 = 1;
    pub const REFERENCE: u64 = 2;
    pub const SECOND_SAMPLE: u64 = 3;
    pub const TIES: u64 = 4;
    pub const PERMUTATION: u64 = 5;
    pub const NULL_TABLE: u64 = 6;
    pub const DIRECTIONS: u64 = 7;
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct Seed(pub u64);

#[inline]
fn splitmix64(mut z: u64) -> u64 {
    z = z.wrapping_add(0x9E37_79B9_7F4A_7C15);
    z = (z ^ (z >> 30)).wrapping_mul(0xBF58_476D_1CE4_E5B9);
    z = (z ^ (z >> 27)).wrapping_mul(0x94D0_49BB_1331_11EB);
    z ^ (z >> 31)
}

impl Seed {
    /// Child seed for one path component.
    pub fn derive(self, component: u64) -> Seed {
        Seed(splitmix64(self.0 ^ splitmix64(component.wrapping_add(0x5851_F42D_4C95_7F2D))))
    }

    pub fn derive_path(self, path: &[u64]) -> Seed {
        path.iter().fold(self, |s, &c| s.derive(c))
    }

    pub fn rng(self) -> ChaCha8Rng {
        ChaCha8Rng::seed_from_u64(self.0)
    }
}

impl From<u64> for Seed {
    fn from(v: u64) -> Self {
        Seed(v)
    }
}
