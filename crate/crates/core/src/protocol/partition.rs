use rand::seq::SliceRandom;
use rand::Rng;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::gf2::BitVector;

/// Class of a position under a partition.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub enum BitClass {
    Info,
    TestZ,
    TestX,
}

/// The strings `(s, z, b)` splitting `N` positions into INFO, TEST-Z and
/// TEST-X bits.
#[derive(Clone, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct Partition {
    pub s: BitVector,
    pub z: BitVector,
    pub b: BitVector,
}

impl Partition {
    /// Builds a partition from per-position classes.
    pub fn from_classes(classes: &[BitClass]) -> Self {
        let mask = |c: BitClass| BitVector::from_bits(classes.iter().map(|&x| x == c));
        Partition {
            s: mask(BitClass::Info),
            z: mask(BitClass::TestZ),
            b: mask(BitClass::TestX),
        }
    }

    pub fn total(&self) -> usize {
        self.s.len()
    }

    pub fn class_of(&self, j: usize) -> BitClass {
        if self.s.get(j) {
            BitClass::Info
        } else if self.z.get(j) {
            BitClass::TestZ
        } else {
            BitClass::TestX
        }
    }

    /// Checks `|s + z + b| = N` with pairwise disjoint supports.
    pub fn is_valid(&self) -> bool {
        let n = self.total();
        if self.z.len() != n || self.b.len() != n {
            return false;
        }
        (0..n).all(|j| self.s.get(j) as u8 + self.z.get(j) as u8 + self.b.get(j) as u8 == 1)
    }

    pub fn info_indices(&self) -> Vec<usize> {
        self.s.support()
    }

    pub fn test_z_indices(&self) -> Vec<usize> {
        self.z.support()
    }

    pub fn test_x_indices(&self) -> Vec<usize> {
        self.b.support()
    }
}

/// A uniformly random partition with the given class sizes, drawn as a
/// uniform shuffle of the class labels.
pub fn sample_partition<R: Rng + ?Sized>(
    total: usize,
    n: usize,
    n_z: usize,
    n_x: usize,
    rng: &mut R,
) -> Result<Partition> {
    if n + n_z + n_x != total {
        return Err(Error::InvalidParams(format!(
            "N = {total} differs from n + n_z + n_x = {}",
            n + n_z + n_x
        )));
    }
    let mut labels: Vec<BitClass> = std::iter::repeat_n(BitClass::Info, n)
        .chain(std::iter::repeat_n(BitClass::TestZ, n_z))
        .chain(std::iter::repeat_n(BitClass::TestX, n_x))
        .collect();
    labels.shuffle(rng);
    Ok(Partition::from_classes(&labels))
}
