//! Counts of noise coefficients above the threshold.

use std::collections::BTreeMap;

use crate::experiments::runner::TrialReport;
use crate::pyramid::CoefficientPyramid;

/// Detail coefficients with `|d| > λ`, per absolute level, and the same
/// count for the coarse approximation block.
pub fn count_exceedances(pyramid: &CoefficientPyramid, lambda: f64) -> (Vec<(u32, usize)>, usize) {
    let over = |v: &[f64]| v.iter().filter(|x| x.abs() > lambda).count();
    (
        pyramid.details().map(|(j, d)| (j, over(d))).collect(),
        over(pyramid.approx()),
    )
}

/// Exceedances of one level summed over trials.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct LevelCount {
    pub level: u32,
    pub exceed: usize,
    /// Coefficients inspected at this level over all trials.
    pub total: usize,
}

impl LevelCount {
    pub fn fraction(&self) -> f64 {
        self.exceed as f64 / self.total as f64
    }
}

#[derive(Debug, Clone, Default, PartialEq)]
pub struct Census {
    pub trials: usize,
    pub levels: Vec<LevelCount>,
    pub approx_exceed: usize,
    pub approx_total: usize,
}

impl Census {
    pub fn detail_exceed(&self) -> usize {
        self.levels.iter().map(|l| l.exceed).sum()
    }

    pub fn detail_total(&self) -> usize {
        self.levels.iter().map(|l| l.total).sum()
    }
}

/// Aggregates the per-level exceedance diagnostics of `reports`.
pub fn threshold_exceedance_census(reports: &[TrialReport]) -> Census {
    let mut levels: BTreeMap<u32, (usize, usize)> = BTreeMap::new();
    let mut census = Census {
        trials: reports.len(),
        ..Default::default()
    };
    for r in reports {
        let d = &r.diagnostics;
        for (offset, &count) in d.exceed_by_level.iter().enumerate() {
            let level = d.coarse_level + offset as u32;
            let entry = levels.entry(level).or_default();
            entry.0 += count;
            entry.1 += 1 << level;
        }
        census.approx_exceed += d.approx_exceed;
        census.approx_total += 1 << d.coarse_level;
    }
    census.levels = levels
        .into_iter()
        .map(|(level, (exceed, total))| LevelCount { level, exceed, total })
        .collect();
    census
}
