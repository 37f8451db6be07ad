use serde::{Deserialize, Serialize};

use crate::error::Result;
use crate::fidelity::{DefectReport, PlacementRecord};
use crate::operator::io::MatrixFile;
use crate::operator::ToleranceProfile;

/// Which placements a braidability verdict quantifies over.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum Reading {
    /// All ordered triples with repetition.
    AllPlacements,
    /// Only placements of three distinct list positions.
    DistinctPlacements,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct TrialRecord {
    pub index: usize,
    pub seed: u64,
    pub dim: usize,
    pub min_defect: f64,
    pub max_defect: f64,
    pub min_distinct_defect: f64,
    pub max_distinct_defect: f64,
    pub max_commutator: f64,
    pub braidable: bool,
    pub braidable_distinct: bool,
    /// Injected `(a, a, a)` control.
    pub control: bool,
}

impl TrialRecord {
    pub fn from_report(index: usize, seed: u64, r: &DefectReport, control: bool) -> Self {
        Self {
            index,
            seed,
            dim: r.dim,
            min_defect: r.min_defect,
            max_defect: r.max_defect,
            min_distinct_defect: r.min_distinct_defect,
            max_distinct_defect: r.max_distinct_defect,
            max_commutator: r.max_commutator(),
            braidable: r.verdict,
            braidable_distinct: r.verdict_distinct,
            control,
        }
    }
}

/// A triple that is braidable under some reading while failing to commute.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct Counterexample {
    pub trial: usize,
    pub seed: u64,
    pub readings: Vec<Reading>,
    pub max_commutator: f64,
    pub matrices: Vec<MatrixFile>,
    pub placements: Vec<PlacementRecord>,
    pub tolerance: ToleranceProfile,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct EvidenceSummary {
    pub trials: usize,
    pub controls: usize,
    pub counterexamples: usize,
    pub braidable_all: usize,
    pub braidable_distinct: usize,
    pub smallest_max_defect: f64,
    pub smallest_max_distinct_defect: f64,
    pub median_max_defect: f64,
    /// Pearson correlation of `log10(max_defect)` against `log10(max_commutator)` over
    /// non-control trials.
    pub log_correlation: f64,
    pub tolerance: ToleranceProfile,
    pub seed: u64,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct ConjectureEvidence {
    pub records: Vec<TrialRecord>,
    pub counterexamples: Vec<Counterexample>,
    pub summary: EvidenceSummary,
}

fn pearson(xs: &[f64], ys: &[f64]) -> f64 {
    let n = xs.len() as f64;
    if xs.len() < 2 {
        return 0.0;
    }
    let mx = xs.iter().sum::<f64>() / n;
    let my = ys.iter().sum::<f64>() / n;
    let (mut sxy, mut sxx, mut syy) = (0.0, 0.0, 0.0);
    for (x, y) in xs.iter().zip(ys) {
        sxy += (x - mx) * (y - my);
        sxx += (x - mx) * (x - mx);
        syy += (y - my) * (y - my);
    }
    if sxx == 0.0 || syy == 0.0 {
        0.0
    } else {
        sxy / (sxx * syy).sqrt()
    }
}

impl ConjectureEvidence {
    pub(crate) fn assemble(
        records: Vec<TrialRecord>,
        counterexamples: Vec<Counterexample>,
        tolerance: ToleranceProfile,
        seed: u64,
    ) -> Self {
        let real: Vec<&TrialRecord> = records.iter().filter(|r| !r.control).collect();
        let floor = |x: f64| x.max(1e-300).log10();
        let xs: Vec<f64> = real.iter().map(|r| floor(r.max_commutator)).collect();
        let ys: Vec<f64> = real.iter().map(|r| floor(r.max_defect)).collect();
        let mut sorted: Vec<f64> = real.iter().map(|r| r.max_defect).collect();
        sorted.sort_by(f64::total_cmp);
        let median = if sorted.is_empty() { 0.0 } else { sorted[sorted.len() / 2] };
        let summary = EvidenceSummary {
            trials: real.len(),
            controls: records.len() - real.len(),
            counterexamples: counterexamples.len(),
            braidable_all: real.iter().filter(|r| r.braidable).count(),
            braidable_distinct: real.iter().filter(|r| r.braidable_distinct).count(),
            smallest_max_defect: real.iter().map(|r| r.max_defect).fold(f64::INFINITY, f64::min),
            smallest_max_distinct_defect: real.iter().map(|r| r.max_distinct_defect).fold(f64::INFINITY, f64::min),
            median_max_defect: median,
            log_correlation: pearson(&xs, &ys),
            tolerance,
            seed,
        };
        Self {
            records,
            counterexamples,
            summary,
        }
    }

    /// One JSON object per trial record.
    pub fn to_jsonl(&self) -> Result<String> {
        let mut out = String::new();
        for r in &self.records {
            out.push_str(&serde_json::to_string(r)?);
            out.push('\n');
        }
        Ok(out)
    }

    /// `(max_defect, max_commutator)` pairs with trial metadata.
    pub fn to_csv(&self) -> Result<String> {
        let mut w = csv::Writer::from_writer(Vec::new());
        w.write_record(["index", "seed", "dim", "max_defect", "min_defect", "max_commutator", "control"])
            .map_err(|e| crate::Error::Parse(e.to_string()))?;
        for r in &self.records {
            w.write_record([
                r.index.to_string(),
                r.seed.to_string(),
                r.dim.to_string(),
                format!("{:e}", r.max_defect),
                format!("{:e}", r.min_defect),
                format!("{:e}", r.max_commutator),
                r.control.to_string(),
            ])
            .map_err(|e| crate::Error::Parse(e.to_string()))?;
        }
        let bytes = w.into_inner().map_err(|e| crate::Error::Parse(e.to_string()))?;
        Ok(String::from_utf8(bytes).expect("csv output is UTF-8"))
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn pearson_edge_cases() {
        assert_eq!(pearson(&[1.0], &[2.0]), 0.0);
        assert!((pearson(&[1.0, 2.0, 3.0], &[2.0, 4.0, 6.0]) - 1.0).abs() < 1e-15);
        assert_eq!(pearson(&[1.0, 1.0], &[0.0, 5.0]), 0.0);
    }
}
