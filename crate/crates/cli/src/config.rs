//! Seeds and frozen regression bounds, read from a TOML file.

use std::path::Path;

use serde::Deserialize;

#[derive(Debug, Clone, Deserialize)]
pub struct Config {
    pub seeds: Seeds,
    pub frozen: Frozen,
}

#[derive(Debug, Clone, Deserialize)]
pub struct Seeds {
    pub gen: u64,
}

/// Largest ratios observed when the bounds were frozen.
#[derive(Debug, Clone, Deserialize)]
pub struct Frozen {
    /// Grid makespan / d.
    pub grid_stretch: f64,
    /// Separated disks makespan / d.
    pub separated_stretch: f64,
    /// Dense disks makespan / (d + sqrt N).
    pub dense_ratio: f64,
}

pub const DEFAULT: &str = include_str!("../../../config/swarmplan.toml");

impl Config {
    /// The file at `path` if it exists, the checked-in defaults otherwise.
    pub fn load(path: &Path) -> Result<Config, String> {
        let text = match std::fs::read_to_string(path) {
            Ok(t) => t,
            Err(e) if e.kind() == std::io::ErrorKind::NotFound => DEFAULT.to_string(),
            Err(e) => return Err(format!("{}: {e}", path.display())),
        };
        toml::from_str(&text).map_err(|e| format!("{}: {e}", path.display()))
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn checked_in_bounds_are_frozen() {
        let c: Config = toml::from_str(DEFAULT).unwrap();
        assert_eq!(c.frozen.grid_stretch, 37.0);
        assert_eq!(c.frozen.separated_stretch, 18.51);
        assert_eq!(c.frozen.dense_ratio, 30.14);
    }

    #[test]
    fn missing_file_falls_back() {
        let c = Config::load(Path::new("/nonexistent/swarmplan.toml")).unwrap();
        assert_eq!(c.seeds.gen, 1);
    }
}
