//! `key = value` run files. Command-line flags take precedence over file values.

use std::collections::BTreeMap;
use std::fmt::Display;
use std::path::{Path, PathBuf};
use std::str::FromStr;

use crate::failure::Failure;

pub const KEYS: &[&str] = &[
    "dataset",
    "fleet",
    "demand",
    "wind",
    "curve",
    "grid",
    "time-limit",
    "mip-gap",
    "uplift-convention",
    "curtailment",
    "out",
    "jobs",
    "day",
    "capacity",
    "bin-width",
    "days",
    "seed",
];

#[derive(Debug, Default)]
pub struct RunFile {
    origin: Option<PathBuf>,
    values: BTreeMap<String, String>,
}

impl RunFile {
    pub fn load(path: &Path) -> Result<Self, Failure> {
        let text = std::fs::read_to_string(path)
            .map_err(|e| Failure::usage(format!("cannot read config {}: {e}", path.display())))?;
        Self::parse(&text, path)
    }

    pub fn parse(text: &str, path: &Path) -> Result<Self, Failure> {
        let mut values = BTreeMap::new();
        for (n, raw) in text.lines().enumerate() {
            let line = raw.split('#').next().unwrap_or("").trim();
            if line.is_empty() {
                continue;
            }
            let Some((key, value)) = line.split_once('=') else {
                return Err(Failure::usage(format!("{}:{}: expected key = value", path.display(), n + 1)));
            };
            let key = key.trim().replace('_', "-");
            if !KEYS.contains(&key.as_str()) {
                return Err(Failure::usage(format!("{}:{}: unknown key {key:?}", path.display(), n + 1)));
            }
            if values.insert(key.clone(), value.trim().to_string()).is_some() {
                return Err(Failure::usage(format!("{}:{}: {key:?} given twice", path.display(), n + 1)));
            }
        }
        Ok(RunFile {
            origin: Some(path.to_path_buf()),
            values,
        })
    }

    /// The flag value if present, otherwise the parsed file value.
    pub fn pick<T>(&self, flag: Option<T>, key: &str) -> Result<Option<T>, Failure>
    where
        T: FromStr,
        T::Err: Display,
    {
        if flag.is_some() {
            return Ok(flag);
        }
        match self.values.get(key) {
            None => Ok(None),
            Some(v) => v.parse().map(Some).map_err(|e| {
                let origin = self.origin.as_deref().map(|p| p.display().to_string()).unwrap_or_default();
                Failure::usage(format!("{origin}: invalid {key} {v:?}: {e}"))
            }),
        }
    }

    /// Paths in the file are relative to the file's directory.
    pub fn pick_path(&self, flag: Option<PathBuf>, key: &str) -> Result<Option<PathBuf>, Failure> {
        if flag.is_some() {
            return Ok(flag);
        }
        let base = self.origin.as_deref().and_then(Path::parent).unwrap_or(Path::new(""));
        Ok(self.pick::<PathBuf>(None, key)?.map(|p| base.join(p)))
    }

    /// A boolean switch is on when the flag is given or the file says `true`.
    pub fn pick_switch(&self, flag: bool, key: &str) -> Result<bool, Failure> {
        Ok(flag || self.pick::<bool>(None, key)?.unwrap_or(false))
    }
}

/// Comma-separated capacities; `start:end:step` expands to an inclusive range.
/// The result is sorted and duplicates are removed.
pub fn parse_grid(text: &str) -> Result<Vec<f64>, String> {
    let mut grid = Vec::new();
    for part in text.split(',').map(str::trim).filter(|p| !p.is_empty()) {
        let nums: Vec<f64> = part
            .split(':')
            .map(|s| s.trim().parse::<f64>().map_err(|e| format!("{s:?}: {e}")))
            .collect::<Result<_, _>>()?;
        match nums[..] {
            [v] => grid.push(v),
            [start, end, step] => {
                if !(step > 0.0) || !(end >= start) {
                    return Err(format!("range {part:?} needs start <= end and a positive step"));
                }
                let n = ((end - start) / step + 1e-9).floor() as usize;
                grid.extend((0..=n).map(|k| start + k as f64 * step));
            }
            _ => return Err(format!("{part:?} is neither a number nor start:end:step")),
        }
    }
    grid.sort_by(f64::total_cmp);
    grid.dedup();
    if grid.is_empty() {
        return Err("capacity grid is empty".into());
    }
    Ok(grid)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn grid_ranges_and_points() {
        assert_eq!(parse_grid("0:100:50, 75,50").unwrap(), vec![0.0, 50.0, 75.0, 100.0]);
        assert_eq!(parse_grid("0").unwrap(), vec![0.0]);
        assert!(parse_grid("0:10:0").is_err());
        assert!(parse_grid("a").is_err());
        assert!(parse_grid("").is_err());
    }

    #[test]
    fn flags_override_file_values() {
        let f = RunFile::parse("# run\nmip-gap = 0.01\njobs=2\nfleet = data/f.csv\n", Path::new("/x/run.conf")).unwrap();
        assert_eq!(f.pick::<f64>(None, "mip-gap").unwrap(), Some(0.01));
        assert_eq!(f.pick(Some(3usize), "jobs").unwrap(), Some(3));
        assert_eq!(f.pick_path(None, "fleet").unwrap(), Some(PathBuf::from("/x/data/f.csv")));
        assert_eq!(f.pick::<f64>(None, "capacity").unwrap(), None);
    }

    #[test]
    fn rejects_unknown_and_malformed_lines() {
        assert!(RunFile::parse("colour = red", Path::new("r")).is_err());
        assert!(RunFile::parse("jobs", Path::new("r")).is_err());
        let f = RunFile::parse("jobs = many", Path::new("r")).unwrap();
        assert!(f.pick::<usize>(None, "jobs").is_err());
    }
}
