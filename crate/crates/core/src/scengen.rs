//! Seeded scenario generation.
//!
//! Every scenario is drawn from a ChaCha8 stream seeded with the scenario's own
//! seed; corpus member `i` uses `base_seed + i`. The draw order is: for each
//! request in id order, size, then demand, then one distance per node.

use std::fs;
use std::path::{Path, PathBuf};

use rand::distributions::{Distribution, Uniform};
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

use crate::channel::WirelessParams;
use crate::error::{Error, Result};
use crate::num::Scalar;
use crate::problem::{EdgeNode, Request, Scenario};

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct GenConfig {
    pub node_count: usize,
    pub request_count: usize,
    pub bandwidth_mhz: u32,
    pub capacity_mhz: f64,
    pub demand_range: (f64, f64),
    pub distance_range: (f64, f64),
    pub size_range: (f64, f64),
    pub seed: u64,
}

impl Default for GenConfig {
    fn default() -> Self {
        Self {
            node_count: 2,
            request_count: 20,
            bandwidth_mhz: 100,
            capacity_mhz: 1500.0,
            demand_range: (50.0, 150.0),
            distance_range: (30.0, 200.0),
            size_range: (10.0, 100.0),
            seed: 0,
        }
    }
}

impl GenConfig {
    pub fn with_seed(&self, seed: u64) -> Self {
        Self {
            seed,
            ..self.clone()
        }
    }

    pub fn validate(&self) -> Result<()> {
        let err = |m: &str| Err(Error::Config(m.to_string()));
        if self.node_count == 0 || self.request_count == 0 {
            return err("node_count and request_count must be at least 1");
        }
        if self.bandwidth_mhz == 0 || !(self.capacity_mhz > 0.0) {
            return err("node capacities must be positive");
        }
        for (name, (lo, hi), min) in [
            ("demand_range", self.demand_range, f64::MIN_POSITIVE),
            ("distance_range", self.distance_range, 1.0),
            ("size_range", self.size_range, f64::MIN_POSITIVE),
        ] {
            if !(lo.is_finite() && hi.is_finite() && lo <= hi) {
                return Err(Error::Config(format!("{name} must satisfy low <= high")));
            }
            if lo < min {
                return Err(Error::Config(format!("{name} lower bound must be at least {min}")));
            }
        }
        Ok(())
    }
}

pub fn generate<T: Scalar>(config: &GenConfig) -> Result<Scenario<T>> {
    config.validate()?;
    let mut rng = ChaCha8Rng::seed_from_u64(config.seed);
    let size = Uniform::new_inclusive(config.size_range.0, config.size_range.1);
    let demand = Uniform::new_inclusive(config.demand_range.0, config.demand_range.1);
    let distance = Uniform::new_inclusive(config.distance_range.0, config.distance_range.1);

    let nodes = (0..config.node_count)
        .map(|id| EdgeNode {
            id,
            bandwidth_capacity: config.bandwidth_mhz,
            compute_capacity: T::lit(config.capacity_mhz),
        })
        .collect();
    let requests = (0..config.request_count)
        .map(|id| {
            let size = T::lit(size.sample(&mut rng));
            let demand = T::lit(demand.sample(&mut rng));
            let distances = (0..config.node_count)
                .map(|_| T::lit(distance.sample(&mut rng)))
                .collect();
            Request {
                id,
                size,
                demand,
                distances,
            }
        })
        .collect();
    Scenario::new(nodes, requests, WirelessParams::default(), config.seed)
}

/// `count` scenarios; member `i` is `generate` with seed `config.seed + i`.
pub fn generate_corpus<T: Scalar>(config: &GenConfig, count: usize) -> Result<Vec<Scenario<T>>> {
    (0..count)
        .map(|i| generate(&config.with_seed(config.seed.wrapping_add(i as u64))))
        .collect()
}

/// File name of corpus member `index`.
pub fn scenario_file_name(index: usize) -> String {
    format!("scenario-{index:05}.json")
}

/// Writes `scenario-00000.json`, `scenario-00001.json`, ... into `dir`,
/// creating it if needed.
pub fn save_corpus<T: Scalar>(corpus: &[Scenario<T>], dir: &Path) -> Result<()> {
    fs::create_dir_all(dir)?;
    for (i, s) in corpus.iter().enumerate() {
        s.save(&dir.join(scenario_file_name(i)))?;
    }
    Ok(())
}

/// Reads every `scenario-*.json` in `dir`, ordered by file name.
pub fn load_corpus<T: Scalar>(dir: &Path) -> Result<Vec<Scenario<T>>> {
    let mut paths: Vec<PathBuf> = fs::read_dir(dir)?
        .filter_map(|e| e.ok().map(|e| e.path()))
        .filter(|p| {
            p.file_name()
                .and_then(|n| n.to_str())
                .is_some_and(|n| n.starts_with("scenario-") && n.ends_with(".json"))
        })
        .collect();
    paths.sort();
    if paths.is_empty() {
        return Err(Error::InvalidScenario(format!(
            "no scenario-*.json files in {}",
            dir.display()
        )));
    }
    paths.iter().map(|p| Scenario::load(p)).collect()
}
