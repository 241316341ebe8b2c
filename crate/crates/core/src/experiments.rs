//! Replicated evaluation: sample sizing, stability, ranking and the
//! controller × demand-level grid.

use std::fmt;
use std::fs;
use std::path::Path;

use rayon::prelude::*;
use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::controller::ControllerKind;
use crate::report::fmt_num;
use crate::sim::{
    run_csv_header, run_csv_row, run_detailed, ControllerSpec, MetricsRecord, SafetyAudit, SimConfig, SimError,
};

#[derive(Debug, Error)]
pub enum ExperimentError {
    #[error("ragged input: {0}")]
    DimensionMismatch(String),
    #[error("invalid grid configuration: {0}")]
    Config(String),
    #[error(transparent)]
    Sim(#[from] SimError),
    #[error("writing report: {0}")]
    Io(#[from] std::io::Error),
    #[error("serializing report: {0}")]
    Json(#[from] serde_json::Error),
}

/// Inputs of the finite-population sample size rule.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct ConfidenceParams {
    pub z: f64,
    pub sigma: f64,
    pub margin: f64,
}

impl Default for ConfidenceParams {
    /// 95 % confidence, σ = 0.5, ±5 % margin.
    fn default() -> Self {
        ConfidenceParams { z: 1.96, sigma: 0.5, margin: 0.05 }
    }
}

impl ConfidenceParams {
    /// Sample size for an unbounded population.
    pub fn unbounded_sample_size(&self) -> f64 {
        (self.z * self.sigma / self.margin).powi(2)
    }
}

/// Replications needed for a population of `population` (the hourly
/// per-lane demand), rounded to the nearest integer.
pub fn sample_size(population: u64, p: &ConfidenceParams) -> u64 {
    let n0 = p.unbounded_sample_size();
    let n = population as f64;
    (n0 * n / (n0 + n - 1.0)).round() as u64
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum DemandLevel {
    VerySmall,
    Small,
    Medium,
    Large,
    VeryLarge,
}

impl DemandLevel {
    pub const ALL: [DemandLevel; 5] =
        [DemandLevel::VerySmall, DemandLevel::Small, DemandLevel::Medium, DemandLevel::Large, DemandLevel::VeryLarge];

    /// Arrival rate in vehicles per hour per lane.
    pub fn rate(self) -> u32 {
        match self {
            DemandLevel::VerySmall => 250,
            DemandLevel::Small => 375,
            DemandLevel::Medium => 750,
            DemandLevel::Large => 1125,
            DemandLevel::VeryLarge => 1300,
        }
    }

    pub fn name(self) -> &'static str {
        match self {
            DemandLevel::VerySmall => "very-small",
            DemandLevel::Small => "small",
            DemandLevel::Medium => "medium",
            DemandLevel::Large => "large",
            DemandLevel::VeryLarge => "very-large",
        }
    }
}

impl fmt::Display for DemandLevel {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

/// Limits beyond which a run counts as unstable.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct StabilityThresholds {
    pub max_avg_wait_s: f64,
    /// Largest tolerated growth of the total queue at the end of a run.
    pub max_queue_slope_veh_per_s: f64,
    /// Trailing fraction of the run the queue slope is fitted on.
    pub tail_fraction: f64,
}

impl StabilityThresholds {
    pub fn for_cycle(full_cycle_s: f64) -> Self {
        StabilityThresholds {
            max_avg_wait_s: 10.0 * full_cycle_s,
            max_queue_slope_veh_per_s: 0.05,
            tail_fraction: 0.25,
        }
    }
}

impl Default for StabilityThresholds {
    fn default() -> Self {
        Self::for_cycle(120.0)
    }
}

/// Least-squares slope of `series` against time, in units per second.
pub fn least_squares_slope(series: &[f64], step_s: f64) -> f64 {
    let n = series.len();
    if n < 2 {
        return 0.0;
    }
    let nf = n as f64;
    let mean_x = (nf - 1.0) / 2.0;
    let mean_y = series.iter().sum::<f64>() / nf;
    let (mut sxy, mut sxx) = (0.0, 0.0);
    for (i, y) in series.iter().enumerate() {
        let dx = i as f64 - mean_x;
        sxy += dx * (y - mean_y);
        sxx += dx * dx;
    }
    sxy / sxx / step_s
}

/// 1 when the run stayed bounded, 0 when waits exploded or the queue was
/// still growing over the tail of the run.
pub fn observe_stability(queue_series: &[f64], step_s: f64, avg_wait_s: f64, thresholds: &StabilityThresholds) -> u8 {
    if avg_wait_s > thresholds.max_avg_wait_s {
        return 0;
    }
    let tail_len = ((queue_series.len() as f64) * thresholds.tail_fraction).ceil() as usize;
    let tail = &queue_series[queue_series.len() - tail_len.min(queue_series.len())..];
    if least_squares_slope(tail, step_s) > thresholds.max_queue_slope_veh_per_s {
        0
    } else {
        1
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Better {
    Higher,
    Lower,
}

/// The six measured factors in table order, with their direction.
pub const MEASURED_FACTORS: [(&str, Better); 6] = [
    ("departure_arrival_pct", Better::Higher),
    ("avg_queue_veh", Better::Lower),
    ("max_queue_veh", Better::Lower),
    ("avg_wait_s", Better::Lower),
    ("max_wait_s", Better::Lower),
    ("green_time_utilization", Better::Higher),
];

pub fn measured_values(m: &MetricsRecord) -> [f64; 6] {
    [m.departure_arrival_pct, m.avg_queue_veh, m.max_queue_veh, m.avg_wait_s, m.max_wait_s, m.green_time_utilization]
}

/// Points per factor and method plus each method's overall score.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct RankTable {
    /// `points[factor][method]`; 0 for methods excluded as unstable.
    pub points: Vec<Vec<f64>>,
    pub overall: Vec<f64>,
}

/// Points-order ranking.
///
/// Among the stable methods, the best on a factor gets as many points as
/// there are stable methods and the worst gets 1; tied methods share the
/// mean of the positions they span. Unstable methods are left out of the
/// ordering and score 0. Overall = stability × Σ points.
pub fn rank_methods(
    matrix: &[Vec<f64>],
    directions: &[Better],
    stability: &[u8],
) -> Result<RankTable, ExperimentError> {
    if matrix.len() != directions.len() {
        return Err(ExperimentError::DimensionMismatch(format!(
            "{} factor rows but {} directions",
            matrix.len(),
            directions.len()
        )));
    }
    let methods = stability.len();
    if let Some(row) = matrix.iter().find(|r| r.len() != methods) {
        return Err(ExperimentError::DimensionMismatch(format!(
            "factor row has {} values for {} methods",
            row.len(),
            methods
        )));
    }
    let ranked: Vec<usize> = (0..methods).filter(|&j| stability[j] != 0).collect();
    let m = ranked.len();
    let mut points = vec![vec![0.0; methods]; matrix.len()];
    for (row, (values, dir)) in matrix.iter().zip(directions).enumerate() {
        let mut order = ranked.clone();
        // best first
        order.sort_by(|&a, &b| {
            let ord = values[a].total_cmp(&values[b]);
            match dir {
                Better::Higher => ord.reverse(),
                Better::Lower => ord,
            }
        });
        let mut start = 0;
        while start < m {
            let mut end = start + 1;
            while end < m && values[order[end]] == values[order[start]] {
                end += 1;
            }
            // positions start..end earn m-start .. m-end+1 points
            let share = (start..end).map(|p| (m - p) as f64).sum::<f64>() / (end - start) as f64;
            for &j in &order[start..end] {
                points[row][j] = share;
            }
            start = end;
        }
    }
    let overall = (0..methods).map(|j| f64::from(stability[j]) * points.iter().map(|r| r[j]).sum::<f64>()).collect();
    Ok(RankTable { points, overall })
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum Replications {
    /// 95 % confidence sample size of each demand level.
    SampleSize,
    Fixed(u32),
}

fn default_duration() -> u32 {
    3600
}
fn default_cycle() -> f64 {
    120.0
}
fn default_headway() -> f64 {
    2.0
}
fn default_lost_time() -> f64 {
    2.0
}
fn default_levels() -> Vec<DemandLevel> {
    DemandLevel::ALL.to_vec()
}
fn default_replications() -> Replications {
    Replications::Fixed(20)
}

/// Experiment grid description, as read from the JSON config file.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct GridConfig {
    pub controllers: Vec<ControllerSpec>,
    #[serde(default = "default_levels")]
    pub demand_levels: Vec<DemandLevel>,
    #[serde(default = "default_duration")]
    pub duration_s: u32,
    #[serde(default)]
    pub seed_base: u64,
    #[serde(default = "default_replications")]
    pub replications: Replications,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub output_dir: Option<String>,
    #[serde(default = "default_cycle")]
    pub full_cycle_s: f64,
    #[serde(default = "default_headway")]
    pub saturation_headway_s: f64,
    #[serde(default = "default_lost_time")]
    pub startup_lost_time_s: f64,
    #[serde(default)]
    pub confidence: ConfidenceParams,
}

impl GridConfig {
    /// Every implemented controller with default parameters.
    pub fn desk_scale(seed_base: u64) -> Self {
        GridConfig {
            controllers: ControllerKind::ALL.iter().map(|&k| ControllerSpec::default_for(k)).collect(),
            demand_levels: default_levels(),
            duration_s: default_duration(),
            seed_base,
            replications: default_replications(),
            output_dir: None,
            full_cycle_s: default_cycle(),
            saturation_headway_s: default_headway(),
            startup_lost_time_s: default_lost_time(),
            confidence: ConfidenceParams::default(),
        }
    }

    pub fn replications_for(&self, level: DemandLevel) -> u64 {
        match self.replications {
            Replications::SampleSize => sample_size(u64::from(level.rate()), &self.confidence),
            Replications::Fixed(k) => u64::from(k),
        }
    }

    pub fn validate(&self) -> Result<(), ExperimentError> {
        if self.controllers.is_empty() {
            return Err(ExperimentError::Config("no controllers listed".into()));
        }
        if self.demand_levels.is_empty() {
            return Err(ExperimentError::Config("no demand levels listed".into()));
        }
        if self.replications == Replications::Fixed(0) {
            return Err(ExperimentError::Config("replications must be >= 1".into()));
        }
        for (_, cfg) in self.cells().flat_map(|(_, specs)| specs) {
            cfg.validate()?;
        }
        Ok(())
    }

    /// Column labels; repeated controller kinds get a numeric suffix.
    pub fn labels(&self) -> Vec<String> {
        let mut out = Vec::new();
        for (i, spec) in self.controllers.iter().enumerate() {
            let kind = spec.kind();
            let seen = self.controllers[..i].iter().filter(|s| s.kind() == kind).count();
            out.push(if seen == 0 { kind.label().to_string() } else { format!("{}#{}", kind.label(), seen + 1) });
        }
        out
    }

    fn sim_config(&self, spec: &ControllerSpec, level: DemandLevel, seed: u64) -> SimConfig {
        SimConfig {
            duration_s: self.duration_s,
            step_s: 1.0,
            demand_veh_per_hour_per_lane: f64::from(level.rate()),
            seed,
            saturation_headway_s: self.saturation_headway_s,
            startup_lost_time_s: self.startup_lost_time_s,
            controller: spec.clone(),
            full_cycle_s: self.full_cycle_s,
            back_road_queue: 0,
            next_road_occupancy_pct: 0.0,
        }
    }

    /// One sim config per controller for a level's first replication; used
    /// for validation.
    fn cells(&self) -> impl Iterator<Item = (DemandLevel, Vec<(usize, SimConfig)>)> + '_ {
        self.demand_levels.iter().map(move |&level| {
            let specs = self
                .controllers
                .iter()
                .enumerate()
                .map(|(i, spec)| (i, self.sim_config(spec, level, self.seed_base)))
                .collect();
            (level, specs)
        })
    }
}

/// One simulated replication.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct RunRecord {
    pub level: DemandLevel,
    pub controller: String,
    pub replication: u64,
    pub seed: u64,
    pub metrics: MetricsRecord,
}

/// Aggregated results of one demand level (one results table).
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct LevelReport {
    pub level: DemandLevel,
    pub demand_veh_per_hour_per_lane: u32,
    pub replications: u64,
    /// Replication means per controller column; stability is the AND.
    pub means: Vec<MetricsRecord>,
    pub ranking: RankTable,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct GridReport {
    pub config: GridConfig,
    pub seed_base: u64,
    pub controllers: Vec<String>,
    pub levels: Vec<LevelReport>,
    pub audit: SafetyAudit,
    pub runs: Vec<RunRecord>,
}

/// Mean of each factor over replications; stability is 1 only when every
/// replication was stable.
pub fn aggregate(records: &[MetricsRecord]) -> MetricsRecord {
    if records.is_empty() {
        return MetricsRecord::default();
    }
    let n = records.len() as f64;
    let mean = |f: fn(&MetricsRecord) -> f64| records.iter().map(f).sum::<f64>() / n;
    MetricsRecord {
        departure_arrival_pct: mean(|m| m.departure_arrival_pct),
        avg_queue_veh: mean(|m| m.avg_queue_veh),
        max_queue_veh: mean(|m| m.max_queue_veh),
        avg_wait_s: mean(|m| m.avg_wait_s),
        max_wait_s: mean(|m| m.max_wait_s),
        green_time_utilization: mean(|m| m.green_time_utilization),
        stability: u8::from(records.iter().all(|m| m.stability == 1)),
    }
}

/// Runs every (level, controller, replication) cell on `jobs` worker
/// threads. Results are keyed by position, so the report does not depend on
/// completion order or on `jobs`.
pub fn run_grid(config: &GridConfig, jobs: usize) -> Result<GridReport, ExperimentError> {
    config.validate()?;
    let labels = config.labels();
    let mut tasks = Vec::new();
    for &level in &config.demand_levels {
        let reps = config.replications_for(level);
        for (ci, spec) in config.controllers.iter().enumerate() {
            for rep in 0..reps {
                let seed = config.seed_base.wrapping_add(rep);
                tasks.push((level, ci, rep, config.sim_config(spec, level, seed)));
            }
        }
    }

    let pool = rayon::ThreadPoolBuilder::new()
        .num_threads(jobs.max(1))
        .build()
        .map_err(|e| ExperimentError::Config(format!("thread pool: {e}")))?;
    let outcomes: Vec<_> = pool
        .install(|| tasks.par_iter().map(|(_, _, _, cfg)| run_detailed(cfg)).collect::<Result<Vec<_>, SimError>>())?;

    let mut audit = SafetyAudit::default();
    let mut runs = Vec::with_capacity(tasks.len());
    for ((level, ci, rep, cfg), outcome) in tasks.iter().zip(&outcomes) {
        audit.steps_checked += outcome.audit.steps_checked;
        audit.conservation_violations += outcome.audit.conservation_violations;
        audit.conflicting_green_steps += outcome.audit.conflicting_green_steps;
        audit.detection_mismatches += outcome.audit.detection_mismatches;
        runs.push(RunRecord {
            level: *level,
            controller: labels[*ci].clone(),
            replication: *rep,
            seed: cfg.seed,
            metrics: outcome.metrics,
        });
    }

    let directions: Vec<Better> = MEASURED_FACTORS.iter().map(|(_, d)| *d).collect();
    let mut levels = Vec::new();
    for &level in &config.demand_levels {
        let means: Vec<MetricsRecord> = labels
            .iter()
            .map(|label| {
                let recs: Vec<MetricsRecord> =
                    runs.iter().filter(|r| r.level == level && &r.controller == label).map(|r| r.metrics).collect();
                aggregate(&recs)
            })
            .collect();
        let matrix: Vec<Vec<f64>> =
            (0..MEASURED_FACTORS.len()).map(|f| means.iter().map(|m| measured_values(m)[f]).collect()).collect();
        let stability: Vec<u8> = means.iter().map(|m| m.stability).collect();
        let ranking = rank_methods(&matrix, &directions, &stability)?;
        levels.push(LevelReport {
            level,
            demand_veh_per_hour_per_lane: level.rate(),
            replications: config.replications_for(level),
            means,
            ranking,
        });
    }

    Ok(GridReport { config: config.clone(), seed_base: config.seed_base, controllers: labels, levels, audit, runs })
}

const TABLE_ROWS: [&str; 7] = [
    "departure_arrival_pct",
    "avg_queue_veh",
    "max_queue_veh",
    "avg_wait_s",
    "max_wait_s",
    "green_time_utilization",
    "stability",
];

fn push_line(out: &mut String, fields: impl IntoIterator<Item = String>) {
    out.push_str(&fields.into_iter().collect::<Vec<_>>().join(","));
    out.push('\n');
}

impl GridReport {
    /// Results table for one level: factors as rows, controllers as columns.
    pub fn level_table_csv(&self, level: &LevelReport) -> String {
        let mut out = String::new();
        push_line(&mut out, std::iter::once("factor".to_string()).chain(self.controllers.iter().cloned()));
        for (i, name) in TABLE_ROWS.iter().enumerate() {
            let values =
                level.means.iter().map(
                    |m| {
                        if i < 6 {
                            fmt_num(measured_values(m)[i])
                        } else {
                            m.stability.to_string()
                        }
                    },
                );
            push_line(&mut out, std::iter::once(name.to_string()).chain(values));
        }
        out
    }

    pub fn ranking_csv(&self) -> String {
        let mut out = String::new();
        push_line(
            &mut out,
            ["level".to_string(), "factor".to_string()].into_iter().chain(self.controllers.iter().cloned()),
        );
        for level in &self.levels {
            for (f, (name, _)) in MEASURED_FACTORS.iter().enumerate() {
                push_line(
                    &mut out,
                    [level.level.to_string(), name.to_string()]
                        .into_iter()
                        .chain(level.ranking.points[f].iter().map(|p| fmt_num(*p))),
                );
            }
            push_line(
                &mut out,
                [level.level.to_string(), "overall".to_string()]
                    .into_iter()
                    .chain(level.ranking.overall.iter().map(|p| fmt_num(*p))),
            );
        }
        out
    }

    pub fn overall_scores_csv(&self) -> String {
        let mut out = String::new();
        push_line(
            &mut out,
            ["level".to_string(), "demand".to_string()].into_iter().chain(self.controllers.iter().cloned()),
        );
        for level in &self.levels {
            push_line(
                &mut out,
                [level.level.to_string(), level.demand_veh_per_hour_per_lane.to_string()]
                    .into_iter()
                    .chain(level.ranking.overall.iter().map(|p| fmt_num(*p))),
            );
        }
        out
    }

    pub fn runs_csv(&self) -> String {
        let mut out = run_csv_header();
        out.push('\n');
        for r in &self.runs {
            out.push_str(&run_csv_row(&r.controller, f64::from(r.level.rate()), r.seed, &r.metrics));
            out.push('\n');
        }
        out
    }

    pub fn table_file_name(level: DemandLevel) -> String {
        format!("table_{}.csv", level.name())
    }

    /// Writes every report file into `dir`.
    pub fn write_to(&self, dir: &Path) -> Result<Vec<String>, ExperimentError> {
        fs::create_dir_all(dir)?;
        let mut written = Vec::new();
        let mut put = |name: String, body: String| -> Result<(), ExperimentError> {
            fs::write(dir.join(&name), body)?;
            written.push(name);
            Ok(())
        };
        for level in &self.levels {
            put(Self::table_file_name(level.level), self.level_table_csv(level))?;
        }
        put("ranking.csv".into(), self.ranking_csv())?;
        put("overall_scores.csv".into(), self.overall_scores_csv())?;
        put("runs.csv".into(), self.runs_csv())?;
        let mut json = serde_json::to_string_pretty(self)?;
        json.push('\n');
        put("report.json".into(), json)?;
        Ok(written)
    }

    /// Plain-text overview of the overall scores.
    pub fn summary(&self) -> String {
        let mut out = format!("{:<12}", "level");
        for c in &self.controllers {
            out.push_str(&format!("{c:>10}"));
        }
        out.push('\n');
        for level in &self.levels {
            out.push_str(&format!("{:<12}", level.level.name()));
            for s in &level.ranking.overall {
                out.push_str(&format!("{:>10}", fmt_num(*s)));
            }
            out.push('\n');
        }
        out
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn level_sample_sizes() {
        let p = ConfidenceParams::default();
        let got: Vec<u64> = [250, 375, 750, 1125, 1300].iter().map(|&n| sample_size(n, &p)).collect();
        assert_eq!(got, vec![152, 190, 254, 287, 297]);
        assert_eq!(sample_size(1_000_000_000, &p), 384);
        assert_eq!(sample_size(1, &p), 1);
    }

    #[test]
    fn demand_levels_roundtrip_names() {
        for level in DemandLevel::ALL {
            let json = serde_json::to_string(&level).unwrap();
            assert_eq!(json, format!("\"{}\"", level.name()));
        }
        let rates: Vec<u32> = DemandLevel::ALL.iter().map(|l| l.rate()).collect();
        assert_eq!(rates, vec![250, 375, 750, 1125, 1300]);
    }

    #[test]
    fn stability_examples() {
        let th = StabilityThresholds::default();
        assert_eq!(observe_stability(&vec![40.0; 3600], 1.0, 100.0, &th), 1);
        let growing: Vec<f64> = (0..3600).map(|t| 0.25 * f64::from(t)).collect();
        assert_eq!(observe_stability(&growing, 1.0, 2500.0, &th), 0);
        // growth alone is enough
        assert_eq!(observe_stability(&growing, 1.0, 100.0, &th), 0);
        assert_eq!(observe_stability(&vec![0.0; 3600], 1.0, 0.0, &th), 1);
        assert_eq!(observe_stability(&[], 1.0, 0.0, &th), 1);
    }

    #[test]
    fn slope_of_a_line() {
        let line: Vec<f64> = (0..100).map(|i| 3.0 + 0.5 * f64::from(i)).collect();
        assert!((least_squares_slope(&line, 1.0) - 0.5).abs() < 1e-12);
        assert!((least_squares_slope(&line, 2.0) - 0.25).abs() < 1e-12);
    }

    #[test]
    fn ranking_examples() {
        let dirs: Vec<Better> = MEASURED_FACTORS.iter().map(|(_, d)| *d).collect();
        // method 0 dominates every factor
        let matrix: Vec<Vec<f64>> = dirs
            .iter()
            .map(|d| match d {
                Better::Higher => vec![5.0, 4.0, 3.0, 2.0, 1.0],
                Better::Lower => vec![1.0, 2.0, 3.0, 4.0, 5.0],
            })
            .collect();
        let t = rank_methods(&matrix, &dirs, &[1; 5]).unwrap();
        assert_eq!(t.overall, vec![30.0, 24.0, 18.0, 12.0, 6.0]);
        for row in &t.points {
            assert_eq!(row.iter().sum::<f64>(), 15.0);
        }

        let t = rank_methods(&matrix, &dirs, &[0, 1, 1, 1, 1]).unwrap();
        assert_eq!(t.overall[0], 0.0);
        assert_eq!(t.overall[1], 24.0);

        let mut tied = matrix.clone();
        tied[0] = vec![5.0, 5.0, 3.0, 2.0, 1.0];
        let t = rank_methods(&tied, &dirs, &[1; 5]).unwrap();
        assert_eq!(&t.points[0][..2], &[4.5, 4.5]);
        assert_eq!(t.points[0].iter().sum::<f64>(), 15.0);
    }

    #[test]
    fn ranking_rejects_ragged_input() {
        let dirs = [Better::Higher, Better::Lower];
        assert!(matches!(
            rank_methods(&[vec![1.0, 2.0], vec![1.0]], &dirs, &[1, 1]),
            Err(ExperimentError::DimensionMismatch(_))
        ));
        assert!(rank_methods(&[vec![1.0, 2.0]], &dirs, &[1, 1]).is_err());
    }

    #[test]
    fn aggregate_means_and_stability() {
        let a = MetricsRecord { avg_queue_veh: 2.0, stability: 1, ..MetricsRecord::default() };
        let b = MetricsRecord { avg_queue_veh: 4.0, stability: 0, ..MetricsRecord::default() };
        let m = aggregate(&[a, b]);
        assert_eq!(m.avg_queue_veh, 3.0);
        assert_eq!(m.stability, 0);
    }

    #[test]
    fn grid_config_json() {
        let cfg: GridConfig = serde_json::from_str(
            r#"{"controllers":[{"kind":"bm1"},{"kind":"dt3p"}],"replications":"sample-size","seed_base":7}"#,
        )
        .unwrap();
        assert_eq!(cfg.replications, Replications::SampleSize);
        assert_eq!(cfg.demand_levels.len(), 5);
        let counts: Vec<u64> = cfg.demand_levels.iter().map(|&l| cfg.replications_for(l)).collect();
        assert_eq!(counts, vec![152, 190, 254, 287, 297]);
        let cfg: GridConfig =
            serde_json::from_str(r#"{"controllers":[{"kind":"bm2"}],"replications":{"fixed":3}}"#).unwrap();
        assert_eq!(cfg.replications, Replications::Fixed(3));
        assert!(serde_json::from_str::<GridConfig>(r#"{"controllers":[],"bogus":1}"#).is_err());
    }
}
