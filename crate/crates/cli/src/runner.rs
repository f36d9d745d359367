//! Batch execution of verification checks over a seeded ensemble.

use std::fs;
use std::path::{Path, PathBuf};
use std::time::Instant;

use clap::ValueEnum;
use opgeom::ensemble::{self, EnsembleSpec, Pairing};
use opgeom::{
    attained_radius_battery, bj_pythagoras_equivalence, check_radius_bounds, exec, identity_parallel_battery, io,
    norm_attainment_battery, norm_crawford_radius_check, norm_radius_gap_bound, op_norm,
    parallel_dependence_equivalence, power_radius_battery, r_pythagoras_equivalence, rank_one, rank_one_battery,
    scalar_shift_bound, square_radius_gap_bound, ComplexMatrix, Consistency, EquivalenceBattery, InequalityReport,
    Result, ToleranceConfig, Verdict,
};

use crate::report::{witness_digest, ReportRow};

#[derive(Clone, Copy, Debug, PartialEq, Eq, ValueEnum)]
pub enum CheckKind {
    #[value(name = "thm-2-1")]
    ParallelDependence,
    #[value(name = "thm-2-2")]
    BjPythagoras,
    #[value(name = "thm-2-3")]
    RPythagoras,
    #[value(name = "refine-i")]
    NormRadiusGap,
    #[value(name = "refine-ii")]
    ScalarShift,
    #[value(name = "refine-iii")]
    SquareRadiusGap,
    #[value(name = "thm-3-1")]
    IdentityParallel,
    #[value(name = "cor-3-1")]
    NormAttainment,
    #[value(name = "cor-3-3")]
    PowerRadius,
    #[value(name = "cor-3-4")]
    RankOne,
    #[value(name = "cor-3-5")]
    AttainedRadius,
    #[value(name = "bounds")]
    Bounds,
    #[value(name = "z2")]
    NormCrawford,
}

impl CheckKind {
    pub fn name(&self) -> &'static str {
        match self {
            CheckKind::ParallelDependence => "thm-2-1",
            CheckKind::BjPythagoras => "thm-2-2",
            CheckKind::RPythagoras => "thm-2-3",
            CheckKind::NormRadiusGap => "refine-i",
            CheckKind::ScalarShift => "refine-ii",
            CheckKind::SquareRadiusGap => "refine-iii",
            CheckKind::IdentityParallel => "thm-3-1",
            CheckKind::NormAttainment => "cor-3-1",
            CheckKind::PowerRadius => "cor-3-3",
            CheckKind::RankOne => "cor-3-4",
            CheckKind::AttainedRadius => "cor-3-5",
            CheckKind::Bounds => "bounds",
            CheckKind::NormCrawford => "z2",
        }
    }

    /// Whether the check consumes a partner operator.
    pub fn uses_pair(&self) -> bool {
        matches!(
            self,
            CheckKind::ParallelDependence | CheckKind::BjPythagoras | CheckKind::RPythagoras | CheckKind::Bounds
        )
    }
}

#[derive(Clone, Debug)]
pub struct VerifyJob {
    pub check: CheckKind,
    pub spec: EnsembleSpec,
    pub pairing: Pairing,
    pub cfg: ToleranceConfig,
    /// Record wall-clock time per instance. Off by default so that reports
    /// are byte-reproducible.
    pub timing: bool,
}

#[derive(Clone, Debug)]
pub struct InstanceOutcome {
    pub rows: Vec<ReportRow>,
    /// A row failed where the theory demands that it hold.
    pub demanded_failure: bool,
}

#[derive(Clone, Debug)]
pub struct VerifyOutcome {
    pub rows: Vec<ReportRow>,
    pub failed_instances: Vec<usize>,
}

/// The operators an instance is built from.
struct Inputs {
    t: ComplexMatrix,
    s: Option<ComplexMatrix>,
}

fn inputs(job: &VerifyJob, index: usize) -> Result<Inputs> {
    if job.check == CheckKind::RankOne {
        let (x, y) = ensemble::instance_vectors(&job.spec, index, job.pairing)?;
        return Ok(Inputs { t: rank_one(&x, &y)?, s: None });
    }
    if job.check.uses_pair() {
        let (t, s) = ensemble::instance_pair(&job.spec, index, job.pairing)?;
        Ok(Inputs { t, s: Some(s) })
    } else {
        Ok(Inputs { t: ensemble::instance(&job.spec, index)?, s: None })
    }
}

fn consistency_str(c: Consistency) -> &'static str {
    match c {
        Consistency::AllAgree => "all-agree",
        Consistency::Disagree => "disagree",
        Consistency::Marginal => "marginal",
    }
}

fn battery_rows(index: usize, check: &str, b: &EquivalenceBattery) -> (Vec<ReportRow>, bool) {
    let digest = witness_digest(b.witness.as_ref());
    let mut rows: Vec<ReportRow> = b
        .conditions
        .iter()
        .map(|c| ReportRow::from_verdict(index, format!("{check}:{}", c.label), c.lhs, c.rhs, c.margin, c.verdict, digest.clone()))
        .collect();
    let holding = b.conditions.iter().filter(|c| c.verdict == Verdict::Holds).count();
    let disagree = b.consistent == Consistency::Disagree;
    rows.push(ReportRow::new(
        index,
        format!("{check}:agreement"),
        holding as f64,
        b.conditions.len() as f64,
        if disagree { -1.0 } else { 0.0 },
        consistency_str(b.consistent),
        digest,
    ));
    let (side, side_failed) = inequality_rows(index, check, &b.side_checks);
    rows.extend(side);
    (rows, disagree || side_failed)
}

fn inequality_rows(index: usize, check: &str, reports: &[InequalityReport]) -> (Vec<ReportRow>, bool) {
    let rows = reports
        .iter()
        .map(|r| ReportRow::from_verdict(index, format!("{check}:{}", r.name), r.lhs, r.rhs, r.slack, r.verdict, String::new()))
        .collect();
    (rows, reports.iter().any(|r| r.verdict == Verdict::Fails))
}

/// Runs one instance of the job.
pub fn run_instance(job: &VerifyJob, index: usize) -> Result<InstanceOutcome> {
    let start = Instant::now();
    let Inputs { t, s } = inputs(job, index)?;
    let cfg = &job.cfg;
    let name = job.check.name();
    let partner = || s.as_ref().expect("pair checks always draw a partner");
    let (mut rows, demanded_failure) = match job.check {
        CheckKind::ParallelDependence => battery_rows(index, name, &parallel_dependence_equivalence(&t, partner(), cfg)?),
        CheckKind::BjPythagoras => battery_rows(index, name, &bj_pythagoras_equivalence(&t, partner(), cfg)?),
        CheckKind::RPythagoras => battery_rows(index, name, &r_pythagoras_equivalence(&t, partner(), cfg)?),
        CheckKind::IdentityParallel => battery_rows(index, name, &identity_parallel_battery(&t, cfg)?),
        CheckKind::NormAttainment => battery_rows(index, name, &norm_attainment_battery(&t, cfg)?),
        CheckKind::PowerRadius => battery_rows(index, name, &power_radius_battery(&t, cfg)?),
        CheckKind::AttainedRadius => battery_rows(index, name, &attained_radius_battery(&t, cfg)?),
        CheckKind::RankOne => {
            let (x, y) = ensemble::instance_vectors(&job.spec, index, job.pairing)?;
            battery_rows(index, name, &rank_one_battery(&x, &y, cfg)?)
        }
        CheckKind::NormRadiusGap => inequality_rows(index, name, &[norm_radius_gap_bound(&t, cfg)?]),
        CheckKind::ScalarShift => {
            let xi = ensemble::instance_shift(&job.spec, index, op_norm(&t)?.value);
            inequality_rows(index, name, &[scalar_shift_bound(&t, xi, cfg)?])
        }
        CheckKind::SquareRadiusGap => inequality_rows(index, name, &[square_radius_gap_bound(&t, cfg)?]),
        CheckKind::Bounds => inequality_rows(index, name, &check_radius_bounds(&t, partner(), cfg)?),
        CheckKind::NormCrawford => inequality_rows(index, name, &norm_crawford_radius_check(&t, cfg)?),
    };
    if job.timing {
        let ms = start.elapsed().as_millis() as u64;
        rows.iter_mut().for_each(|r| r.wall_time_ms = ms);
    }
    rows.sort_by(|a, b| a.check_name.cmp(&b.check_name));
    Ok(InstanceOutcome { rows, demanded_failure })
}

/// Runs every instance, in parallel when enabled, and merges rows by instance.
pub fn run_verify(job: &VerifyJob) -> Result<VerifyOutcome> {
    job.spec.validate()?;
    job.cfg.validate()?;
    let outcomes = exec::map_indexed(job.spec.count, |i| run_instance(job, i));
    let mut rows = Vec::new();
    let mut failed_instances = Vec::new();
    for (i, outcome) in outcomes.into_iter().enumerate() {
        let outcome = outcome?;
        if outcome.demanded_failure {
            failed_instances.push(i);
        }
        rows.extend(outcome.rows);
    }
    Ok(VerifyOutcome { rows, failed_instances })
}

/// Writes the operators of each listed instance as matrix JSON files named
/// `<check>-<instance>-left.json` and, for pair checks, `-right.json`.
pub fn dump_replay(job: &VerifyJob, instances: &[usize], dir: &Path) -> Result<Vec<PathBuf>> {
    if instances.is_empty() {
        return Ok(Vec::new());
    }
    fs::create_dir_all(dir)?;
    let mut written = Vec::new();
    for &i in instances {
        let Inputs { t, s } = inputs(job, i)?;
        let stem = format!("{}-{i:06}", job.check.name());
        let left = dir.join(format!("{stem}-left.json"));
        io::write_matrix(&left, &t)?;
        written.push(left);
        if let Some(s) = s {
            let right = dir.join(format!("{stem}-right.json"));
            io::write_matrix(&right, &s)?;
            written.push(right);
        }
    }
    Ok(written)
}
