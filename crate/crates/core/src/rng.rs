//! Seeded uniform(0,1) streams.
//!
//! Every stream is a ChaCha8 keystream keyed by `(seed, salt)`. ChaCha is a
//! counter-mode generator, so the `n`-th draw of a stream is a pure function of
//! `(seed, salt, n)` on every platform, and a stream can be repositioned to any
//! cursor without replaying the draws before it.

use rand::RngCore;
use rand_chacha::rand_core::SeedableRng;
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::scalar::Real;

const KEY_DOMAIN: &[u8; 16] = b"gginf.uniform.v1";
const TWO_POW_NEG_53: f64 = 1.0 / (1u64 << 53) as f64;

/// The four pseudo-random sequences a run may consume.
///
/// `E` and `F` feed inter-arrival times, `G` and `H` feed service times. The
/// second stream of each pair is only needed by two-stage (Erlang-2) laws.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub enum Role {
    E,
    F,
    G,
    H,
}

impl Role {
    pub fn name(self) -> &'static str {
        match self {
            Role::E => "E",
            Role::F => "F",
            Role::G => "G",
            Role::H => "H",
        }
    }
}

/// Seeds for the E/F/G/H streams plus the salt that separates replications.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub struct SeedPlan {
    pub e_seed: i64,
    pub f_seed: Option<i64>,
    pub g_seed: i64,
    pub h_seed: Option<i64>,
    pub master_salt: u64,
}

impl SeedPlan {
    pub fn new(e_seed: i64, g_seed: i64) -> Self {
        Self {
            e_seed,
            f_seed: None,
            g_seed,
            h_seed: None,
            master_salt: 0,
        }
    }

    pub fn with_f(mut self, seed: i64) -> Self {
        self.f_seed = Some(seed);
        self
    }

    pub fn with_h(mut self, seed: i64) -> Self {
        self.h_seed = Some(seed);
        self
    }

    pub fn with_salt(mut self, salt: u64) -> Self {
        self.master_salt = salt;
        self
    }

    pub fn seed(&self, role: Role) -> Option<i64> {
        match role {
            Role::E => Some(self.e_seed),
            Role::F => self.f_seed,
            Role::G => Some(self.g_seed),
            Role::H => self.h_seed,
        }
    }

    pub fn validate(&self) -> Result<()> {
        for role in [Role::E, Role::F, Role::G, Role::H] {
            if let Some(seed) = self.seed(role) {
                if seed <= 0 {
                    return Err(Error::Config(format!(
                        "seed {} must be a positive integer, got {seed}",
                        role.name()
                    )));
                }
            }
        }
        Ok(())
    }

    /// Salt used by replication `index`; replication 0 uses the master salt itself.
    pub fn replication_salt(&self, index: usize) -> u64 {
        self.master_salt.wrapping_add(index as u64)
    }

    /// Opens the stream for `role` in replication `replication`.
    pub fn stream(&self, role: Role, replication: usize) -> Result<UniformStream> {
        let seed = self
            .seed(role)
            .ok_or_else(|| Error::Config(format!("seed {} is required by this law", role.name())))?;
        UniformStream::new(seed, self.replication_salt(replication))
    }
}

/// A deterministic sequence of uniform draws on the open interval (0, 1).
#[derive(Debug, Clone)]
pub struct UniformStream {
    seed: i64,
    salt: u64,
    cursor: u64,
    rng: ChaCha8Rng,
}

impl UniformStream {
    /// Creates a stream at cursor 0. Rejects non-positive seeds.
    pub fn new(seed: i64, salt: u64) -> Result<Self> {
        if seed <= 0 {
            return Err(Error::Config(format!(
                "stream seed must be a positive integer, got {seed}"
            )));
        }
        Ok(Self {
            seed,
            salt,
            cursor: 0,
            rng: ChaCha8Rng::from_seed(key(seed, salt)),
        })
    }

    pub fn seed(&self) -> i64 {
        self.seed
    }

    pub fn salt(&self) -> u64 {
        self.salt
    }

    /// Number of values emitted so far.
    pub fn cursor(&self) -> u64 {
        self.cursor
    }

    /// Rewinds to cursor 0.
    pub fn reset(&mut self) {
        self.seek(0);
    }

    /// Positions the stream so the next draw is draw number `cursor`.
    pub fn seek(&mut self, cursor: u64) {
        // one u64 per draw = two 32-bit keystream words
        self.rng.set_word_pos(u128::from(cursor) * 2);
        self.cursor = cursor;
    }

    /// Next draw in (0, 1) at full `f64` resolution. Never returns 0 or 1.
    pub fn next_uniform(&mut self) -> f64 {
        self.cursor += 1;
        let bits = self.rng.next_u64() >> 11;
        // midpoint of one of 2^53 equal cells, so always interior
        (bits as f64 + 0.5) * TWO_POW_NEG_53
    }

    /// Next draw converted to `T`, kept strictly inside (0, 1).
    pub fn draw<T: Real>(&mut self) -> T {
        to_interior(self.next_uniform())
    }
}

/// Converts a uniform draw to `T`, mapping values that round onto 0 or 1 to the
/// nearest interior representable value.
pub fn to_interior<T: Real>(u: f64) -> T {
    let v = T::lit(u);
    if v <= T::zero() {
        T::min_positive_value()
    } else if v >= T::one() {
        T::one_below()
    } else {
        v
    }
}

fn key(seed: i64, salt: u64) -> [u8; 32] {
    let mut k = [0u8; 32];
    k[..8].copy_from_slice(&seed.to_le_bytes());
    k[8..16].copy_from_slice(&salt.to_le_bytes());
    k[16..].copy_from_slice(KEY_DOMAIN);
    k
}
