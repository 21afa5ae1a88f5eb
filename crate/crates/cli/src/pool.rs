//! Seeded random transducers.

use std::path::{Path, PathBuf};

use fsdim_core::fst::format;
use fsdim_core::{Base, Error, Fst, Result};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

/// Shape of a generated pool.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct PoolParams {
    pub seed: u64,
    pub count: usize,
    pub max_states: usize,
    pub base: Base,
    pub max_burst: usize,
}

/// `count` complete machines drawn from one generator seeded with `seed`.
/// Each has `1..=max_states` states and start state 0; every transition
/// gets a uniform target and an output of uniform length `0..=max_burst`
/// with uniform digits.
pub fn gen_pool(p: PoolParams) -> Result<Vec<Fst>> {
    if p.count == 0 || p.max_states == 0 {
        return Err(Error::InvalidParameter("count and max states must be at least 1".into()));
    }
    let mut rng = ChaCha8Rng::seed_from_u64(p.seed);
    (0..p.count)
        .map(|_| {
            let states = rng.gen_range(1..=p.max_states);
            Fst::from_fn(p.base, states, 0, |_, _| {
                let to = rng.gen_range(0..states);
                let len = rng.gen_range(0..=p.max_burst);
                (to, (0..len).map(|_| rng.gen_range(0..p.base.get())).collect())
            })
        })
        .collect()
}

pub fn pool_file_name(seed: u64, i: usize) -> String {
    format!("pool_{seed}_{i}.fst")
}

/// Writes the pool as `pool_<seed>_<i>.fst` files under `dir`.
pub fn write_pool(dir: &Path, p: PoolParams) -> Result<Vec<PathBuf>> {
    std::fs::create_dir_all(dir).map_err(|e| io_error(dir, e))?;
    gen_pool(p)?
        .iter()
        .enumerate()
        .map(|(i, t)| {
            let path = dir.join(pool_file_name(p.seed, i));
            std::fs::write(&path, format(t)).map_err(|e| io_error(&path, e))?;
            Ok(path)
        })
        .collect()
}

pub(crate) fn io_error(path: &Path, e: std::io::Error) -> Error {
    Error::Io {
        path: path.display().to_string(),
        msg: e.to_string(),
    }
}
