//! Bundle verification: structural checks over a directory of instance
//! files.
//!
//! Files are classified by their `kind` field (`pmrs`, `hard_sample`,
//! `gibbs_model`); kindless JSON falls back on shape: `{n, edges}` is a
//! graph, `{values}` an assignment, `{w}` a witness, `{edges}` a matching.
//! A hard sample names its family through the `family` field (a path
//! relative to the sample file) so its YES/NO structure can be rechecked.

use std::collections::HashMap;
use std::path::{Path, PathBuf};

use serde::Serialize;

use monodag::error::Result;
use monodag::gibbs::GibbsModel;
use monodag::graph::{orient_bipartite, Dag};
use monodag::hard::{HardSample, SampleTag};
use monodag::monotonicity::{violating_pairs_with_closure, Assignment};
use monodag::pmrs::{verify_pmrs, PmrsFamily};
use monodag::positivity::{Matching, WeightWitness};

#[derive(Debug, Clone, Serialize)]
pub struct BundleEntry {
    pub path: String,
    pub kind: String,
    pub pass: bool,
    pub detail: String,
}

#[derive(Debug, Clone, Serialize)]
pub struct BundleReport {
    pub entries: Vec<BundleEntry>,
    pub warnings: Vec<String>,
    pub pass: bool,
}

impl BundleReport {
    pub fn render(&self) -> String {
        let mut out = String::new();
        for e in &self.entries {
            out.push_str(&format!(
                "[{}] {} ({}): {}\n",
                if e.pass { "PASS" } else { "FAIL" },
                e.path,
                e.kind,
                e.detail
            ));
        }
        for w in &self.warnings {
            out.push_str(&format!("[WARN] {w}\n"));
        }
        out.push_str(if self.pass { "bundle: PASS\n" } else { "bundle: FAIL\n" });
        out
    }
}

struct FamilyCache {
    loaded: HashMap<PathBuf, std::result::Result<PmrsFamily, String>>,
}

impl FamilyCache {
    fn get(&mut self, path: &Path) -> std::result::Result<&PmrsFamily, String> {
        let canon = path.to_path_buf();
        self.loaded
            .entry(canon)
            .or_insert_with(|| PmrsFamily::from_file(path).map_err(|e| e.to_string()))
            .as_ref()
            .map_err(|e| e.clone())
    }
}

/// Verify every `.json` file in a directory (non-recursive). Exit-code
/// semantics: pass iff every file passes; an empty directory passes with a
/// warning.
pub fn verify_bundle(dir: &Path) -> Result<BundleReport> {
    let mut paths: Vec<PathBuf> = std::fs::read_dir(dir)?
        .filter_map(|e| e.ok())
        .map(|e| e.path())
        .filter(|p| p.extension().map(|x| x == "json").unwrap_or(false))
        .collect();
    paths.sort();

    let mut entries = Vec::new();
    let mut warnings = Vec::new();
    if paths.is_empty() {
        warnings.push(format!("no .json files under {}", dir.display()));
    }
    let mut cache = FamilyCache {
        loaded: HashMap::new(),
    };
    for path in &paths {
        entries.push(verify_file(path, &mut cache));
    }
    let pass = entries.iter().all(|e| e.pass);
    Ok(BundleReport {
        entries,
        warnings,
        pass,
    })
}

fn entry(path: &Path, kind: &str, result: std::result::Result<String, String>) -> BundleEntry {
    match result {
        Ok(detail) => BundleEntry {
            path: path.display().to_string(),
            kind: kind.into(),
            pass: true,
            detail,
        },
        Err(detail) => BundleEntry {
            path: path.display().to_string(),
            kind: kind.into(),
            pass: false,
            detail,
        },
    }
}

fn verify_file(path: &Path, cache: &mut FamilyCache) -> BundleEntry {
    let data = match std::fs::read_to_string(path) {
        Ok(d) => d,
        Err(e) => return entry(path, "unreadable", Err(e.to_string())),
    };
    let value: serde_json::Value = match serde_json::from_str(&data) {
        Ok(v) => v,
        Err(e) => return entry(path, "invalid-json", Err(e.to_string())),
    };
    let kind = value.get("kind").and_then(|k| k.as_str()).unwrap_or("");
    match kind {
        "pmrs" => entry(path, "pmrs", verify_pmrs_file(path)),
        "hard_sample" => entry(path, "hard_sample", verify_sample_file(path, cache)),
        "gibbs_model" => entry(
            path,
            "gibbs_model",
            GibbsModel::from_file(path)
                .map(|m| format!("n0 = {}, s = {}, C4-free, params admissible", m.n0(), m.matchings().len()))
                .map_err(|e| e.to_string()),
        ),
        "" if value.get("n").is_some() && value.get("edges").is_some() => entry(
            path,
            "graph",
            Dag::from_file(path)
                .map(|g| format!("acyclic, n = {}, m = {}", g.n(), g.m()))
                .map_err(|e| e.to_string()),
        ),
        "" if value.get("values").is_some() => entry(
            path,
            "assignment",
            Assignment::from_file(path)
                .map(|f| format!("{} values, {} mode", f.len(), if f.is_exact() { "exact" } else { "float" }))
                .map_err(|e| e.to_string()),
        ),
        "" if value.get("w").is_some() => entry(
            path,
            "witness",
            WeightWitness::from_file(path)
                .map(|w| format!("{} weights", w.w.len()))
                .map_err(|e| e.to_string()),
        ),
        "" if value.get("edges").is_some() => entry(
            path,
            "matching",
            Matching::from_file(path)
                .map(|m| format!("{} vertex-disjoint edges", m.len()))
                .map_err(|e| e.to_string()),
        ),
        other => entry(
            path,
            "unrecognized",
            Err(format!("unknown file kind {other:?}")),
        ),
    }
}

fn verify_pmrs_file(path: &Path) -> std::result::Result<String, String> {
    let fam = PmrsFamily::from_file(path).map_err(|e| e.to_string())?;
    let report = verify_pmrs(&fam);
    if report.pass {
        Ok(format!(
            "n0 = {}, s = {}, all PMRS checks pass",
            fam.n0(),
            fam.s()
        ))
    } else {
        let mut msgs = Vec::new();
        for c in &report.checks {
            if !c.pass {
                msgs.push(format!("{}: {}", c.name, c.failures.join("; ")));
            }
        }
        Err(msgs.join(" | "))
    }
}

fn verify_sample_file(path: &Path, cache: &mut FamilyCache) -> std::result::Result<String, String> {
    let data = std::fs::read_to_string(path).map_err(|e| e.to_string())?;
    let raw: serde_json::Value = serde_json::from_str(&data).map_err(|e| e.to_string())?;
    let family_rel = raw
        .get("family")
        .and_then(|f| f.as_str())
        .ok_or("sample file lacks a family reference")?;
    let family_path = path
        .parent()
        .unwrap_or_else(|| Path::new("."))
        .join(family_rel);
    let sample = HardSample::from_file(path).map_err(|e| e.to_string())?;
    let family = cache.get(&family_path)?;

    let view = sample.verification_view();
    if view.index >= family.s() {
        return Err(format!("hidden index {} out of range", view.index));
    }
    let matching = &family.matchings[view.index];
    if view.noise.len() != matching.len() {
        return Err(format!(
            "noise length {} != matching size {}",
            view.noise.len(),
            matching.len()
        ));
    }
    let g = orient_bipartite(&family.scaffold);
    let tc = g.transitive_closure().map_err(|e| e.to_string())?;
    let violated =
        violating_pairs_with_closure(&tc, sample.assignment()).map_err(|e| e.to_string())?;
    match sample.tag() {
        SampleTag::Yes => {
            if violated.is_empty() {
                Ok("YES sample is monotone".into())
            } else {
                Err(format!("YES sample has {} violating pairs", violated.len()))
            }
        }
        SampleTag::No => {
            let n0 = family.scaffold.n0();
            let expected: std::collections::HashSet<(usize, usize)> = matching
                .edges()
                .iter()
                .zip(view.noise)
                .filter(|(_, &z)| z != 0)
                .map(|(&(l, r), _)| (l, n0 + r))
                .collect();
            let got: std::collections::HashSet<(usize, usize)> = violated.into_iter().collect();
            if got == expected {
                Ok(format!(
                    "NO sample violates exactly the {} nonzero-noise edges",
                    expected.len()
                ))
            } else {
                Err("NO sample's violated set differs from the nonzero-noise edges".into())
            }
        }
    }
}
