//! Execution of an experiment spec.

use std::fmt;
use std::time::Instant;

use fas_core::{
    estimate_outage, outage_asymptotic, outage_gc, outage_lower_bound, McConfig, Method, OutageEstimate, SystemConfig,
};
use rayon::prelude::*;

use crate::spec::{expand_points, validate_spec, ExperimentSpec, Point, Violation};
use crate::table::ResultRow;

/// The spec failed validation; nothing was computed.
#[derive(Debug, Clone, PartialEq)]
pub struct InvalidSpec(pub Vec<Violation>);

impl fmt::Display for InvalidSpec {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        writeln!(f, "invalid experiment spec:")?;
        for v in &self.0 {
            writeln!(f, "  {v}")?;
        }
        Ok(())
    }
}

impl std::error::Error for InvalidSpec {}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct RunOptions {
    /// Worker threads; 0 means one per core.
    pub jobs: usize,
    /// Record per-row wall time. Off for byte-identical reruns.
    pub wall_time: bool,
}

impl Default for RunOptions {
    fn default() -> Self {
        Self { jobs: 0, wall_time: true }
    }
}

fn evaluate(spec: &ExperimentSpec, point: &Point, method: Method) -> fas_core::Result<OutageEstimate> {
    let cfg = SystemConfig::with_snr_db(point.ports, point.active, point.aperture, point.rate, point.phi_db)?;
    match method {
        Method::Mc => {
            let mut mc = McConfig::new(spec.mc.samples, spec.mc.seed);
            if let Some(c) = spec.mc.chunk_size {
                mc.chunk_size = c;
            }
            estimate_outage(&cfg, &mc)
        }
        Method::Gc => outage_gc(&cfg, &spec.truncation.resolve(), &spec.quadrature.resolve(cfg.avg_snr)),
        Method::Lb => outage_lower_bound(&cfg),
        Method::Asy => outage_asymptotic(&cfg),
    }
}

fn run_one(spec: &ExperimentSpec, point: &Point, method: Method, opts: RunOptions) -> ResultRow {
    let start = Instant::now();
    let result = evaluate(spec, point, method);
    let wall_ms = opts.wall_time.then(|| start.elapsed().as_secs_f64() * 1e3);
    let mut row = ResultRow {
        sweep_var: spec.sweep.to_string(),
        sweep_value: point.sweep_value,
        ports: point.ports,
        active: point.active,
        aperture: point.aperture,
        rate: point.rate,
        phi_db: point.phi_db,
        method,
        value: None,
        ci_low: None,
        ci_high: None,
        diag_tail: None,
        diag_nodes: None,
        samples: None,
        status: "ok".into(),
        wall_ms,
        diagnostics: Default::default(),
        error: None,
    };
    match result {
        Ok(est) => {
            row.value = Some(est.value);
            row.ci_low = Some(est.ci_low);
            row.ci_high = Some(est.ci_high);
            match method {
                Method::Gc => {
                    row.diag_tail = est.diagnostic("tail_bound");
                    row.diag_nodes = Some(est.samples_or_nodes);
                }
                Method::Mc => row.samples = Some(est.samples_or_nodes),
                Method::Lb | Method::Asy => {}
            }
            row.diagnostics = est.diagnostics;
        }
        Err(e) => {
            row.status = e.code().into();
            row.error = Some(e.to_string());
        }
    }
    row
}

/// Run every (point, method) pair of a valid spec.
///
/// Rows come back in spec order: series, then sweep value, then method in
/// the order listed. Points run concurrently on `opts.jobs` threads; every
/// Monte-Carlo point reuses the spec seed, so curves share their random
/// numbers and results do not depend on the thread count.
pub fn run_experiment(spec: &ExperimentSpec, opts: RunOptions) -> Result<Vec<ResultRow>, InvalidSpec> {
    let violations = validate_spec(spec);
    if !violations.is_empty() {
        return Err(InvalidSpec(violations));
    }
    let tasks: Vec<(Point, Method)> = expand_points(spec)
        .into_iter()
        .flat_map(|p| spec.methods.iter().map(move |&m| (p, m)))
        .collect();
    let pool = rayon::ThreadPoolBuilder::new()
        .num_threads(opts.jobs)
        .build()
        .expect("thread pool");
    Ok(pool.install(|| tasks.par_iter().map(|(p, m)| run_one(spec, p, *m, opts)).collect()))
}
