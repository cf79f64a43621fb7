//! Index builds and the measurements reported by the CLI.

use std::time::Instant;

use mlix_core::{
    brute_force_retrieve, expected_addition, expected_retrieval, AdditionMethod, Dataset, Deployment,
    ExpectationInputs, IndexError, IndexModel, IndexStats, KeySelector, KeyStrategy, ServiceId,
};

use crate::report::{mean, median, stddev, ResultRow, Value};

/// Comparison totals over a whole build.
#[derive(Debug, Clone, Copy, Default, PartialEq, Eq)]
pub struct BuildTotals {
    pub parameter_comparisons: u64,
    pub key_directory_comparisons: u64,
    pub classes_scanned: u64,
    pub stats: IndexStats,
}

/// Adds every service in file order. Services whose id is in `skip` are left
/// out, which is only used to plant faults for verification tests.
pub fn build_index_skipping(
    data: &Dataset,
    deployment: Deployment,
    strategy: KeyStrategy,
    seed: u64,
    skip: &[ServiceId],
) -> Result<(IndexModel, BuildTotals), IndexError> {
    let mut index = IndexModel::for_table(deployment, &data.parameters);
    let mut selector = KeySelector::new(strategy, seed);
    let mut totals = BuildTotals::default();
    for service in data.services.iter().filter(|s| !skip.contains(&s.id)) {
        let report = index.add_service(service.clone(), &mut selector)?;
        totals.parameter_comparisons += report.parameter_comparisons;
        totals.key_directory_comparisons += report.key_directory_comparisons;
        totals.classes_scanned += report.classes_scanned;
    }
    totals.stats = index.stats();
    Ok((index, totals))
}

pub fn build_index(
    data: &Dataset,
    deployment: Deployment,
    strategy: KeyStrategy,
    seed: u64,
) -> Result<(IndexModel, BuildTotals), IndexError> {
    build_index_skipping(data, deployment, strategy, seed, &[])
}

/// Mean input, output and request sizes actually present in the dataset.
pub fn dataset_averages(data: &Dataset) -> (f64, f64, f64) {
    let ins: Vec<f64> = data.services.iter().map(|s| s.inputs().len() as f64).collect();
    let outs: Vec<f64> = data.services.iter().map(|s| s.outputs().len() as f64).collect();
    let reqs: Vec<f64> = data.requests.iter().map(|r| r.len() as f64).collect();
    (mean(&ins), mean(&outs), mean(&reqs))
}

pub fn expectation_inputs(data: &Dataset, stats: &IndexStats) -> ExpectationInputs {
    let (n, m, r) = dataset_averages(data);
    ExpectationInputs {
        r,
        n,
        m,
        ..ExpectationInputs::from_stats(stats)
    }
}

struct RowSink<'a> {
    experiment: &'static str,
    dataset_id: &'a str,
    deployment: Deployment,
    strategy: KeyStrategy,
    rows: &'a mut Vec<ResultRow>,
}

impl RowSink<'_> {
    fn push(&mut self, metric: &str, value: Value, rep: usize) {
        self.rows.push(ResultRow {
            experiment: self.experiment,
            dataset_id: self.dataset_id.to_owned(),
            deployment: self.deployment.to_string(),
            key_method: self.strategy.to_string(),
            metric: metric.to_owned(),
            value,
            rep,
        });
    }

    fn count(&mut self, metric: &str, value: impl TryInto<u64>, rep: usize) {
        let value = value.try_into().unwrap_or(u64::MAX);
        self.push(metric, Value::Count(value), rep);
    }

    fn stats(&mut self, stats: &IndexStats) {
        self.count("services", stats.service_count, 0);
        self.count("keys", stats.key_count, 0);
        self.count("input_similar_classes", stats.input_similar_count, 0);
        self.count("similar_classes", stats.similar_count, 0);
        self.count("parameters", stats.parameter_count, 0);
    }

    fn timings(&mut self, mut samples: Vec<u64>) {
        for (rep, &ns) in samples.iter().enumerate() {
            self.count("wall_ns", ns, rep);
        }
        self.count("wall_ns_median", median(&mut samples), 0);
    }
}

/// Build cost of every (deployment × method) cell. The build is repeated
/// `reps` times for timing; counts come from the first build and are
/// identical across repetitions.
pub fn bench_add(
    data: &Dataset,
    dataset_id: &str,
    deployments: &[Deployment],
    strategies: &[KeyStrategy],
    reps: usize,
    seed: u64,
) -> Result<(Vec<ResultRow>, Vec<(Deployment, KeyStrategy, BuildTotals)>), IndexError> {
    let mut rows = Vec::new();
    let mut cells = Vec::new();
    for &deployment in deployments {
        for &strategy in strategies {
            let mut times = Vec::with_capacity(reps);
            let mut first = None;
            for _ in 0..reps.max(1) {
                let start = Instant::now();
                let (_, totals) = build_index(data, deployment, strategy, seed)?;
                times.push(start.elapsed().as_nanos() as u64);
                first.get_or_insert(totals);
            }
            let totals = first.expect("at least one build");
            let mut sink = RowSink {
                experiment: "add",
                dataset_id,
                deployment,
                strategy,
                rows: &mut rows,
            };
            sink.count("parameter_comparisons", totals.parameter_comparisons, 0);
            sink.count("key_directory_comparisons", totals.key_directory_comparisons, 0);
            sink.count("classes_scanned", totals.classes_scanned, 0);
            sink.stats(&totals.stats);
            let method = match strategy {
                KeyStrategy::Designated => Some(AdditionMethod::Designated),
                KeyStrategy::Random => Some(AdditionMethod::Random),
                _ => None,
            };
            if let Some(method) = method {
                if let Ok(v) = expected_addition(deployment, method, &expectation_inputs(data, &totals.stats)) {
                    sink.push("expected_comparisons_per_addition", Value::Real(v), 0);
                }
            }
            sink.timings(times);
            cells.push((deployment, strategy, totals));
        }
    }
    Ok((rows, cells))
}

/// Runs every request against every (deployment × method) index; emits
/// per-request traversal rows (request index in `rep`) and per-cell means.
pub fn bench_retrieve(
    data: &Dataset,
    dataset_id: &str,
    deployments: &[Deployment],
    strategies: &[KeyStrategy],
    reps: usize,
    seed: u64,
) -> Result<Vec<ResultRow>, IndexError> {
    let mut rows = Vec::new();
    for &deployment in deployments {
        for &strategy in strategies {
            let (index, totals) = build_index(data, deployment, strategy, seed)?;
            let mut sink = RowSink {
                experiment: "retrieve",
                dataset_id,
                deployment,
                strategy,
                rows: &mut rows,
            };
            let (mut services, mut classes, mut results) = (Vec::new(), Vec::new(), Vec::new());
            for (i, req) in data.requests.iter().enumerate() {
                let (_, report) = index.retrieve(req.as_slice());
                sink.count("traversed_services", report.traversed_services, i);
                sink.count("traversed_classes", report.traversed_classes, i);
                sink.count("parameter_comparisons", report.parameter_comparisons, i);
                sink.count("results", report.results, i);
                services.push(report.traversed_services as f64);
                classes.push(report.traversed_classes as f64);
                results.push(report.results as f64);
            }
            sink.push("mean_traversed_services", Value::Real(mean(&services)), 0);
            sink.push("mean_traversed_classes", Value::Real(mean(&classes)), 0);
            sink.push("mean_results", Value::Real(mean(&results)), 0);
            if let Ok(v) = expected_retrieval(deployment, &expectation_inputs(data, &totals.stats)) {
                sink.push("expected_traversed", Value::Real(v), 0);
            }
            sink.stats(&totals.stats);

            let mut times = Vec::with_capacity(reps);
            for _ in 0..reps.max(1) {
                let start = Instant::now();
                for req in &data.requests {
                    std::hint::black_box(index.retrieve(req.as_slice()));
                }
                times.push(start.elapsed().as_nanos() as u64);
            }
            sink.timings(times);
        }
    }
    Ok(rows)
}

/// Spread of traversed services over requests, per key method.
#[derive(Debug, Clone, PartialEq)]
pub struct StabilitySummary {
    pub strategy: KeyStrategy,
    pub traversed: Vec<u64>,
    pub mean: f64,
    pub stddev: f64,
}

pub fn stability(
    data: &Dataset,
    dataset_id: &str,
    deployment: Deployment,
    strategies: &[KeyStrategy],
    request_limit: usize,
    seed: u64,
) -> Result<(Vec<ResultRow>, Vec<StabilitySummary>), IndexError> {
    let requests = &data.requests[..request_limit.min(data.requests.len())];
    let mut rows = Vec::new();
    let mut summaries = Vec::new();
    for &strategy in strategies {
        let (index, _) = build_index(data, deployment, strategy, seed)?;
        let mut sink = RowSink {
            experiment: "stability",
            dataset_id,
            deployment,
            strategy,
            rows: &mut rows,
        };
        let traversed: Vec<u64> = requests
            .iter()
            .map(|r| index.retrieve(r.as_slice()).1.traversed_services)
            .collect();
        for (i, &t) in traversed.iter().enumerate() {
            sink.count("traversed_services", t, i);
        }
        let as_f64: Vec<f64> = traversed.iter().map(|&t| t as f64).collect();
        let summary = StabilitySummary {
            strategy,
            mean: mean(&as_f64),
            stddev: stddev(&as_f64),
            traversed,
        };
        sink.push("mean_traversed_services", Value::Real(summary.mean), 0);
        sink.push("stddev_traversed_services", Value::Real(summary.stddev), 0);
        summaries.push(summary);
    }
    Ok((rows, summaries))
}

#[derive(Debug, Clone, PartialEq)]
pub struct Mismatch {
    pub request_index: usize,
    pub request: Vec<u32>,
    pub expected: Vec<ServiceId>,
    pub actual: Vec<ServiceId>,
}

#[derive(Debug, Clone, PartialEq)]
pub struct VerifyOutcome {
    pub deployment: Deployment,
    pub strategy: KeyStrategy,
    pub requests: usize,
    pub first_mismatch: Option<Mismatch>,
}

/// Compares indexed retrieval with the exhaustive oracle for every request.
pub fn verify(
    data: &Dataset,
    deployment: Deployment,
    strategy: KeyStrategy,
    seed: u64,
    skip: &[ServiceId],
) -> Result<VerifyOutcome, IndexError> {
    let (index, _) = build_index_skipping(data, deployment, strategy, seed, skip)?;
    let mut first_mismatch = None;
    for (i, req) in data.requests.iter().enumerate() {
        let expected = brute_force_retrieve(&data.services, req.as_slice());
        let (actual, _) = index.retrieve(req.as_slice());
        if actual != expected {
            first_mismatch = Some(Mismatch {
                request_index: i,
                request: req.iter().map(|p| p.0).collect(),
                expected,
                actual,
            });
            break;
        }
    }
    Ok(VerifyOutcome {
        deployment,
        strategy,
        requests: data.requests.len(),
        first_mismatch,
    })
}

/// A service the oracle returns for some request, if any. Dropping it from
/// the build is guaranteed to make verification fail.
pub fn fault_candidate(data: &Dataset) -> Option<ServiceId> {
    data.requests
        .iter()
        .find_map(|r| brute_force_retrieve(&data.services, r.as_slice()).first().copied())
}
