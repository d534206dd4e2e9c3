use serde::{Deserialize, Serialize};
use sha2::{Digest, Sha256};

use crate::symbolic::GeneratorSystem;
use crate::{Error, Result};

/// The grid run by default.
pub const DEFAULT_GRID: &str = include_str!("default_grid.toml");

/// Config format understood by this version.
pub const GRID_VERSION: u32 = 1;

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct GridConfig {
    pub version: u32,
    pub seed: u64,
    /// Generator system for suites that draw random words.
    pub r: u32,
    pub conjugation: ConjugationGrid,
    pub sign_lemma: SignGrid,
    pub triviality: TrivialityGrid,
    pub square_law: SquareGrid,
    pub classification: ClassificationGrid,
    pub conjugacy_classes: ConjugacyGrid,
    pub group_g: GroupGrid,
    pub blocks: BlocksGrid,
    pub density: DensityGrid,
    pub stable_criterion: CriterionGrid,
    pub counting_laws: CountingGrid,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ConjugationGrid {
    pub ks: Vec<i64>,
    pub random_units: usize,
    pub random_bits: u32,
    pub max_level: u32,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct SignGrid {
    pub ks: Vec<i64>,
    pub max_level: u32,
    pub random_words: usize,
    pub word_max_level: u32,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct TrivialityGrid {
    pub ks: Vec<i64>,
    pub ms: Vec<i64>,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct SquareGrid {
    pub ks: Vec<i64>,
    pub max_level: u32,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ClassificationGrid {
    pub ks: Vec<i64>,
    pub ms: Vec<i64>,
    pub random_ms: usize,
    pub max_level: u32,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ConjugacyGrid {
    pub ks: Vec<i64>,
    pub max_level: u32,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct GroupGrid {
    pub rs: Vec<u32>,
    pub max_level: u32,
    pub diagonal_depth: u32,
    pub diagonal_words: usize,
    pub conjugator_max_level: u32,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct BlocksGrid {
    pub rs: Vec<u32>,
    pub ks: Vec<i64>,
    pub ms: Vec<i64>,
    pub depth: u32,
    pub formula_depth: u32,
    pub profile_level: u32,
    pub ratio_floor: f64,
    pub estimate_max_level: u32,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct DensityGrid {
    pub words: usize,
    pub max_level: u32,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct CriterionGrid {
    pub words: usize,
    pub max_level: u32,
    pub extra_levels: u32,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct CountingGrid {
    pub words: usize,
    pub max_level: u32,
    pub conjugators: usize,
}

impl Default for GridConfig {
    fn default() -> Self {
        GridConfig::from_toml(DEFAULT_GRID).expect("embedded grid parses")
    }
}

impl GridConfig {
    pub fn from_toml(text: &str) -> Result<GridConfig> {
        let cfg: GridConfig =
            toml::from_str(text).map_err(|e| Error::Codec(format!("grid config: {e}")))?;
        if cfg.version != GRID_VERSION {
            return Err(Error::Codec(format!(
                "grid config version {} is not supported (expected {GRID_VERSION})",
                cfg.version
            )));
        }
        GeneratorSystem::new(cfg.r)?;
        for &r in cfg.group_g.rs.iter().chain(&cfg.blocks.rs) {
            GeneratorSystem::new(r)?;
        }
        Ok(cfg)
    }

    pub fn with_seed(mut self, seed: u64) -> Self {
        self.seed = seed;
        self
    }

    /// Uses a single generator system everywhere.
    pub fn with_r(mut self, r: u32) -> Result<Self> {
        GeneratorSystem::new(r)?;
        self.r = r;
        self.group_g.rs = vec![r];
        self.blocks.rs = vec![r];
        Ok(self)
    }

    /// Caps every level and depth of the grid at `n`.
    pub fn with_max_level(mut self, n: u32) -> Self {
        for v in [
            &mut self.conjugation.max_level,
            &mut self.sign_lemma.max_level,
            &mut self.sign_lemma.word_max_level,
            &mut self.square_law.max_level,
            &mut self.classification.max_level,
            &mut self.conjugacy_classes.max_level,
            &mut self.group_g.max_level,
            &mut self.group_g.diagonal_depth,
            &mut self.group_g.conjugator_max_level,
            &mut self.blocks.depth,
            &mut self.blocks.formula_depth,
            &mut self.blocks.profile_level,
            &mut self.blocks.estimate_max_level,
            &mut self.density.max_level,
            &mut self.stable_criterion.max_level,
            &mut self.counting_laws.max_level,
        ] {
            *v = (*v).min(n);
        }
        self
    }

    /// SHA-256 of the grid, as lowercase hex.
    pub fn hash(&self) -> String {
        let json = serde_json::to_string(self).expect("grid serializes");
        Sha256::digest(json.as_bytes())
            .iter()
            .map(|b| format!("{b:02x}"))
            .collect()
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn default_grid_parses_and_hashes_stably() {
        let a = GridConfig::default();
        assert_eq!(a.conjugation.ks, vec![3, 5, 7, 11, 17]);
        assert_eq!(a.hash(), GridConfig::default().hash());
        assert_ne!(a.hash(), a.clone().with_seed(7).hash());
        assert_eq!(a.hash().len(), 64);
    }

    #[test]
    fn overrides() {
        let c = GridConfig::default().with_max_level(6).with_r(3).unwrap();
        assert_eq!(c.classification.max_level, 6);
        assert_eq!(c.blocks.rs, vec![3]);
        assert!(GridConfig::default().with_r(1).is_err());
    }

    #[test]
    fn rejects_bad_versions_and_keys() {
        let bad = DEFAULT_GRID.replace("version = 1", "version = 2");
        assert!(GridConfig::from_toml(&bad).is_err());
        let extra = format!("{DEFAULT_GRID}\n[bogus]\nx = 1\n");
        assert!(GridConfig::from_toml(&extra).is_err());
    }
}
