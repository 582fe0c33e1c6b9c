use std::collections::BTreeMap;
use std::path::{Path, PathBuf};

use serde::{Deserialize, Serialize};

use crate::bench::{parse_conditions, BenchPair, Condition, GroupKey};
use crate::error::{Error, Result};
use crate::DEFAULT_SUPPORT_RADIUS_PR;

use super::ply::read_ply;
use super::pose::read_pose;
use super::synthetic::{generate_synthetic_pair, SyntheticShapeSpec};

/// Manifest schema understood by this version.
pub const MANIFEST_SCHEMA_VERSION: u32 = 1;

#[derive(Debug, Clone, PartialEq)]
pub enum PairSource {
    Files {
        source: PathBuf,
        target: PathBuf,
        pose: PathBuf,
    },
    Synthetic(SyntheticShapeSpec),
}

#[derive(Debug, Clone, PartialEq)]
pub struct ManifestPair {
    pub name: String,
    pub input: PairSource,
    pub labels: BTreeMap<String, String>,
}

#[derive(Debug, Clone, PartialEq)]
pub struct DatasetManifest {
    pub schema_version: u32,
    pub name: String,
    pub support_radius_pr: f64,
    /// Condition strings as accepted by `parse_conditions`; empty means
    /// baseline only.
    pub conditions: Vec<String>,
    pub pairs: Vec<ManifestPair>,
}

#[derive(Debug, Deserialize, Serialize)]
#[serde(deny_unknown_fields)]
struct RawManifest {
    schema_version: u32,
    name: String,
    #[serde(default = "default_radius")]
    support_radius_pr: f64,
    #[serde(default, skip_serializing_if = "Vec::is_empty")]
    conditions: Vec<String>,
    #[serde(default, rename = "pair")]
    pairs: Vec<RawPair>,
}

fn default_radius() -> f64 {
    DEFAULT_SUPPORT_RADIUS_PR
}

#[derive(Debug, Default, Deserialize, Serialize)]
#[serde(deny_unknown_fields)]
struct RawPair {
    #[serde(skip_serializing_if = "Option::is_none")]
    name: Option<String>,
    #[serde(skip_serializing_if = "Option::is_none")]
    source: Option<PathBuf>,
    #[serde(skip_serializing_if = "Option::is_none")]
    target: Option<PathBuf>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pose: Option<PathBuf>,
    #[serde(skip_serializing_if = "Option::is_none")]
    synthetic: Option<SyntheticShapeSpec>,
    #[serde(default, skip_serializing_if = "BTreeMap::is_empty")]
    labels: BTreeMap<String, String>,
}

/// Parse manifest text; relative paths resolve against `base`. Every
/// problem found is reported, not only the first.
pub fn parse_manifest(text: &str, base: &Path, origin: &Path) -> Result<DatasetManifest> {
    let fail = |problems: Vec<String>| Error::Manifest {
        path: origin.to_path_buf(),
        problems,
    };
    let raw: RawManifest = toml::from_str(text).map_err(|e| fail(vec![e.to_string()]))?;
    let mut problems = Vec::new();
    if raw.schema_version != MANIFEST_SCHEMA_VERSION {
        problems.push(format!(
            "schema_version {} is not supported (expected {MANIFEST_SCHEMA_VERSION})",
            raw.schema_version
        ));
    }
    if !(raw.support_radius_pr > 0.0) {
        problems.push(format!(
            "support_radius_pr must be positive, got {}",
            raw.support_radius_pr
        ));
    }
    for c in &raw.conditions {
        if let Err(e) = parse_conditions(c) {
            problems.push(format!("condition `{c}`: {e}"));
        }
    }
    if raw.pairs.is_empty() {
        problems.push("the manifest lists no pairs".into());
    }
    let mut pairs = Vec::with_capacity(raw.pairs.len());
    for (i, p) in raw.pairs.into_iter().enumerate() {
        let name = p.name.clone().unwrap_or_else(|| format!("pair{i}"));
        let at = format!("pair {i} ({name})");
        for (key, value) in &p.labels {
            match GroupKey::from_name(key) {
                None => problems.push(format!("{at}: unknown label `{key}`")),
                Some(g) if !g.labels().contains(&value.as_str()) => problems.push(format!(
                    "{at}: `{value}` is not a {key} bucket (expected one of {})",
                    g.labels().join(", ")
                )),
                Some(_) => {}
            }
        }
        let input = match (p.source, p.target, p.pose, p.synthetic) {
            (Some(s), Some(t), Some(pose), None) => {
                let resolve = |rel: PathBuf| {
                    if rel.is_absolute() {
                        rel
                    } else {
                        base.join(rel)
                    }
                };
                let (s, t, pose) = (resolve(s), resolve(t), resolve(pose));
                for f in [&s, &t, &pose] {
                    if !f.is_file() {
                        problems.push(format!("{at}: cannot find {}", f.display()));
                    }
                }
                PairSource::Files {
                    source: s,
                    target: t,
                    pose,
                }
            }
            (None, None, None, Some(spec)) => {
                if let Err(e) = spec.validate() {
                    problems.push(format!("{at}: {e}"));
                }
                PairSource::Synthetic(spec)
            }
            _ => {
                problems.push(format!(
                    "{at}: give either source, target and pose, or a synthetic spec"
                ));
                continue;
            }
        };
        pairs.push(ManifestPair {
            name,
            input,
            labels: p.labels,
        });
    }
    if !problems.is_empty() {
        return Err(fail(problems));
    }
    Ok(DatasetManifest {
        schema_version: raw.schema_version,
        name: raw.name,
        support_radius_pr: raw.support_radius_pr,
        conditions: raw.conditions,
        pairs,
    })
}

pub fn load_manifest(path: &Path) -> Result<DatasetManifest> {
    let text = std::fs::read_to_string(path).map_err(|e| Error::io(path, e))?;
    let base = path.parent().unwrap_or(Path::new("."));
    parse_manifest(&text, base, path)
}

impl DatasetManifest {
    /// Read or generate one pair.
    pub fn load_pair(&self, i: usize) -> Result<BenchPair> {
        let p = self
            .pairs
            .get(i)
            .ok_or_else(|| Error::invalid(format!("pair index {i} out of range")))?;
        let (source, target, transform) = match &p.input {
            PairSource::Files {
                source,
                target,
                pose,
            } => (read_ply(source)?, read_ply(target)?, read_pose(pose)?),
            PairSource::Synthetic(spec) => generate_synthetic_pair(spec)?,
        };
        Ok(BenchPair {
            name: p.name.clone(),
            source,
            target,
            transform,
            labels: p.labels.clone(),
        })
    }

    /// The expanded condition list, in manifest order.
    pub fn expanded_conditions(&self) -> Result<Vec<Condition>> {
        let mut out = Vec::new();
        for c in &self.conditions {
            for cond in parse_conditions(c)? {
                if !out.contains(&cond) {
                    out.push(cond);
                }
            }
        }
        Ok(out)
    }

    /// Manifest text; file paths are written as stored.
    pub fn to_toml(&self) -> String {
        let raw = RawManifest {
            schema_version: self.schema_version,
            name: self.name.clone(),
            support_radius_pr: self.support_radius_pr,
            conditions: self.conditions.clone(),
            pairs: self
                .pairs
                .iter()
                .map(|p| {
                    let mut r = RawPair {
                        name: Some(p.name.clone()),
                        labels: p.labels.clone(),
                        ..RawPair::default()
                    };
                    match &p.input {
                        PairSource::Files {
                            source,
                            target,
                            pose,
                        } => {
                            r.source = Some(source.clone());
                            r.target = Some(target.clone());
                            r.pose = Some(pose.clone());
                        }
                        PairSource::Synthetic(spec) => r.synthetic = Some(*spec),
                    }
                    r
                })
                .collect(),
        };
        toml::to_string(&raw).expect("manifest serializes")
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn parse(text: &str) -> Result<DatasetManifest> {
        parse_manifest(text, Path::new("."), Path::new("test.toml"))
    }

    #[test]
    fn synthetic_pair() {
        let m = parse(
            r#"
schema_version = 1
name = "demo"
conditions = ["baseline", "gaussian", "shot=3%"]

[[pair]]
synthetic = { kind = "bumpy-sphere", points = 500, seed = 1, pose_seed = 2 }
labels = { overlap = "0.8-0.9" }
"#,
        )
        .unwrap();
        assert_eq!(m.pairs.len(), 1);
        assert_eq!(m.support_radius_pr, 15.0);
        assert_eq!(m.expanded_conditions().unwrap().len(), 10);
        assert_eq!(m.pairs[0].name, "pair0");
        let pair = m.load_pair(0).unwrap();
        assert_eq!(pair.source.len(), 500);
        assert_eq!(parse(&m.to_toml()).unwrap(), m);
    }

    #[test]
    fn every_problem_is_listed() {
        let err = parse(
            r#"
schema_version = 1
name = "bad"
conditions = ["gaussian=9"]

[[pair]]
source = "missing-a.ply"
target = "missing-b.ply"
pose = "missing.txt"
labels = { clutter = "99", color = "red" }
"#,
        )
        .unwrap_err();
        match err {
            Error::Manifest { problems, .. } => assert_eq!(problems.len(), 6, "{problems:?}"),
            other => panic!("{other:?}"),
        }
    }

    #[test]
    fn empty_pair_list() {
        assert!(parse("schema_version = 1\nname = \"x\"\n").is_err());
        assert!(parse("schema_version = 2\nname = \"x\"\n[[pair]]\nsynthetic = { kind = \"heightfield\", points = 200, seed = 0, pose_seed = 0 }\n").is_err());
    }
}
