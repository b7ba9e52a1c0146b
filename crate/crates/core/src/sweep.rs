//! Parameter grids and their concurrent evaluation.

use std::path::{Path, PathBuf};

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::curve::{validate_params, CurveParams};
use crate::error::{Error, Result};
use crate::report::{
    check_genus_cap, verify_with, Format, SkipRecord, SweepRecord, VerifyOptions, DEFAULT_GENUS_CAP,
};

/// Environment variable overriding the worker count.
pub const WORKERS_ENV: &str = "CARTIER_WORKERS";

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum MMode {
    Two,
    Three,
    /// `m = p^b`.
    PPower(u32),
}

impl MMode {
    pub fn resolve(self, p: u64) -> Option<u64> {
        match self {
            MMode::Two => Some(2),
            MMode::Three => Some(3),
            MMode::PPower(b) => p.checked_pow(b),
        }
    }
}

fn default_strict() -> bool {
    true
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct SweepSpec {
    pub primes: Vec<u64>,
    pub s_values: Vec<u32>,
    pub m_modes: Vec<MMode>,
    #[serde(default = "default_strict")]
    pub strict_hypotheses: bool,
    #[serde(default)]
    pub output_path: Option<PathBuf>,
    #[serde(default)]
    pub format: Option<Format>,
    #[serde(default)]
    pub genus_cap: Option<u64>,
    #[serde(default)]
    pub workers: Option<usize>,
}

/// A triple the grid named but that will not be run.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Excluded {
    pub p: u64,
    pub s: u32,
    pub m: u64,
    pub reason: String,
}

impl SweepSpec {
    /// Reads TOML, or JSON when the extension is `.json`.
    pub fn load(path: &Path) -> Result<Self> {
        let text = std::fs::read_to_string(path)?;
        if path.extension().is_some_and(|e| e == "json") {
            serde_json::from_str(&text).map_err(|e| Error::Parse(e.to_string()))
        } else {
            toml::from_str(&text).map_err(|e| Error::Parse(e.to_string()))
        }
    }

    pub fn genus_cap(&self) -> u64 {
        self.genus_cap.unwrap_or(DEFAULT_GENUS_CAP)
    }

    /// Grid instances in `(p, s, mode)` order, duplicates removed. Triples
    /// failing structural checks, or hypotheses in strict mode, are returned
    /// separately.
    pub fn expand(&self) -> (Vec<CurveParams>, Vec<Excluded>) {
        let mut seen = std::collections::HashSet::new();
        let mut keep = Vec::new();
        let mut excluded = Vec::new();
        for &p in &self.primes {
            for &s in &self.s_values {
                for &mode in &self.m_modes {
                    let Some(m) = mode.resolve(p) else {
                        excluded.push(Excluded {
                            p,
                            s,
                            m: 0,
                            reason: format!("{mode:?} overflows for p = {p}"),
                        });
                        continue;
                    };
                    if !seen.insert((p, s, m)) {
                        continue;
                    }
                    match validate_params(p, s, m) {
                        Err(e) => excluded.push(Excluded {
                            p,
                            s,
                            m,
                            reason: e.to_string(),
                        }),
                        Ok(params) if self.strict_hypotheses && !params.hypotheses.all_hold() => {
                            excluded.push(Excluded {
                                p,
                                s,
                                m,
                                reason: format!(
                                    "hypotheses fail: {}",
                                    params.hypotheses.failures().join(", ")
                                ),
                            })
                        }
                        Ok(params) => keep.push(params),
                    }
                }
            }
        }
        (keep, excluded)
    }
}

fn run_instance(params: &CurveParams, cap: u64) -> Result<SweepRecord> {
    if let Err(e @ Error::GenusCapExceeded { .. }) = check_genus_cap(params, cap) {
        return Ok(SweepRecord::Skipped(SkipRecord {
            p: params.p(),
            s: params.s,
            m: params.m,
            n: params.n,
            q: params.q,
            g: params.g,
            skip_reason: e.to_string(),
        }));
    }
    let opts = VerifyOptions {
        genus_cap: cap,
        count_points: true,
    };
    verify_with(params, opts).map(SweepRecord::Report)
}

/// Worker count: environment override, then the spec, then rayon's default.
pub fn worker_count(spec: &SweepSpec) -> Option<usize> {
    std::env::var(WORKERS_ENV)
        .ok()
        .and_then(|v| v.parse().ok())
        .filter(|&n: &usize| n > 0)
        .or(spec.workers)
}

/// Evaluates every instance concurrently; results come back in grid order.
pub fn run_sweep(spec: &SweepSpec, instances: &[CurveParams]) -> Result<Vec<Result<SweepRecord>>> {
    let cap = spec.genus_cap();
    let mut builder = rayon::ThreadPoolBuilder::new();
    if let Some(n) = worker_count(spec) {
        builder = builder.num_threads(n);
    }
    let pool = builder
        .build()
        .map_err(|e| Error::IoFailure(format!("thread pool: {e}")))?;
    Ok(pool.install(|| {
        instances
            .par_iter()
            .map(|params| run_instance(params, cap))
            .collect()
    }))
}

#[cfg(test)]
mod tests {
    use super::*;

    fn grid() -> SweepSpec {
        SweepSpec {
            primes: vec![5, 7, 4],
            s_values: vec![1],
            m_modes: vec![MMode::Two, MMode::Three, MMode::PPower(1)],
            strict_hypotheses: true,
            output_path: None,
            format: None,
            genus_cap: None,
            workers: None,
        }
    }

    #[test]
    fn expansion_filters_and_orders() {
        let (keep, excluded) = grid().expand();
        let triples: Vec<_> = keep.iter().map(|c| (c.p(), c.s, c.m)).collect();
        assert_eq!(triples, vec![(5, 1, 2), (5, 1, 5), (7, 1, 3), (7, 1, 7)]);
        // (5,1,3), (7,1,2) fail gcd(n,m); p = 4 fails primality three times
        assert_eq!(excluded.len(), 5);
    }

    #[test]
    fn non_strict_keeps_hypothesis_failures() {
        let mut spec = grid();
        spec.strict_hypotheses = false;
        let (keep, _) = spec.expand();
        assert_eq!(keep.len(), 6);
    }

    #[test]
    fn spec_parses_from_toml() {
        let text = r#"
            primes = [5, 7]
            s_values = [1, 2]
            m_modes = ["two", "three", { p_power = 1 }, { p_power = 2 }]
            format = "csv"
            genus_cap = 500
        "#;
        let spec: SweepSpec = toml::from_str(text).unwrap();
        assert_eq!(spec.m_modes[2], MMode::PPower(1));
        assert!(spec.strict_hypotheses);
        assert_eq!(spec.format, Some(Format::Csv));
        assert_eq!(spec.genus_cap(), 500);
    }

    #[test]
    fn capped_instances_are_recorded() {
        let mut spec = grid();
        spec.primes = vec![7];
        spec.genus_cap = Some(5);
        let (keep, _) = spec.expand();
        let out = run_sweep(&spec, &keep).unwrap();
        assert!(matches!(out[0], Ok(SweepRecord::Report(_))));
        match &out[1] {
            Ok(SweepRecord::Skipped(s)) => assert!(s.skip_reason.contains("exceeds cap 5")),
            other => panic!("expected skip, got {other:?}"),
        }
    }
}
