//! Seeded synthetic datasets and the `mlix-dataset v1` text format.
//!
//! ```text
//! #mlix-dataset v1 P=10 S=2 n=2 m=2 r=4 seed=42
//! S 0|1 4|2 9
//! S 1|3 5|0 7
//! R 1 3 4 5
//! ```
//!
//! Service lines carry `id|inputs|outputs`, each set space-separated in
//! ascending order. Request lines carry one ascending set. Parameters are
//! implicitly named `p0 .. p{P-1}`.

use std::fmt::Write as _;
use std::io::{self, BufRead, Write};

use rand::seq::index::sample;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use thiserror::Error;

use crate::model::{ParamSet, ParameterId, ParameterTable, Service, ServiceId};

const MAGIC: &str = "#mlix-dataset";
const VERSION: &str = "v1";

#[derive(Debug, Error)]
pub enum DatasetError {
    #[error("invalid dataset spec: {0}")]
    Spec(String),
    #[error("line {line}: {message}")]
    Parse { line: usize, message: String },
    #[error(transparent)]
    Io(#[from] io::Error),
}

fn parse_err(line: usize, message: impl Into<String>) -> DatasetError {
    DatasetError::Parse {
        line,
        message: message.into(),
    }
}

/// Generation parameters.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct DatasetSpec {
    /// |P|
    pub parameter_count: usize,
    /// |S|
    pub service_count: usize,
    /// n
    pub inputs_per_service: usize,
    /// m
    pub outputs_per_service: usize,
    pub request_count: usize,
    /// r
    pub request_size: usize,
    pub seed: u64,
}

impl DatasetSpec {
    /// Shape of the reference experiment: 1000 parameters, 20,000 services
    /// with 10 inputs and 10 outputs, 100 requests of 32 parameters.
    pub fn reference(seed: u64) -> Self {
        DatasetSpec {
            parameter_count: 1000,
            service_count: 20_000,
            inputs_per_service: 10,
            outputs_per_service: 10,
            request_count: 100,
            request_size: 32,
            seed,
        }
    }

    pub fn validate(&self) -> Result<(), DatasetError> {
        let p = self.parameter_count;
        if p == 0 || p > u32::MAX as usize {
            return Err(DatasetError::Spec(format!("P={p} must be in 1..=2^32-1")));
        }
        for (name, v) in [
            ("n", self.inputs_per_service),
            ("m", self.outputs_per_service),
            ("r", self.request_size),
        ] {
            if v == 0 || v > p {
                return Err(DatasetError::Spec(format!("{name}={v} must be in 1..=P ({p})")));
            }
        }
        Ok(())
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Dataset {
    /// Header values. `request_count` always equals `requests.len()`.
    pub spec: DatasetSpec,
    pub parameters: ParameterTable,
    pub services: Vec<Service>,
    pub requests: Vec<ParamSet>,
}

fn sample_set(rng: &mut ChaCha8Rng, universe: usize, amount: usize) -> ParamSet {
    ParamSet::from_unsorted(sample(rng, universe, amount).into_iter().map(|i| ParameterId(i as u32)))
}

/// Services first, then requests, all drawn from one ChaCha8 stream seeded
/// with `spec.seed`. Each set is sampled uniformly without replacement.
pub fn generate(spec: &DatasetSpec) -> Result<Dataset, DatasetError> {
    spec.validate()?;
    let mut rng = ChaCha8Rng::seed_from_u64(spec.seed);
    let p = spec.parameter_count;
    let services = (0..spec.service_count)
        .map(|i| {
            let inputs = sample_set(&mut rng, p, spec.inputs_per_service);
            let outputs = sample_set(&mut rng, p, spec.outputs_per_service);
            Service::from_sets(i as ServiceId, inputs, outputs).expect("inputs are non-empty")
        })
        .collect();
    let requests = (0..spec.request_count)
        .map(|_| sample_set(&mut rng, p, spec.request_size))
        .collect();
    Ok(Dataset {
        spec: *spec,
        parameters: ParameterTable::generated(p),
        services,
        requests,
    })
}

fn push_ids(out: &mut String, set: &ParamSet) {
    for (i, id) in set.iter().enumerate() {
        if i > 0 {
            out.push(' ');
        }
        write!(out, "{id}").unwrap();
    }
}

impl Dataset {
    pub fn to_text(&self) -> String {
        let s = &self.spec;
        let mut out = format!(
            "{MAGIC} {VERSION} P={} S={} n={} m={} r={} seed={}\n",
            s.parameter_count,
            self.services.len(),
            s.inputs_per_service,
            s.outputs_per_service,
            s.request_size,
            s.seed
        );
        for svc in &self.services {
            write!(out, "S {}|", svc.id).unwrap();
            push_ids(&mut out, svc.inputs());
            out.push('|');
            push_ids(&mut out, svc.outputs());
            out.push('\n');
        }
        for req in &self.requests {
            out.push_str("R ");
            push_ids(&mut out, req);
            out.push('\n');
        }
        out
    }

    pub fn write_to<W: Write>(&self, mut w: W) -> io::Result<()> {
        w.write_all(self.to_text().as_bytes())
    }

    pub fn read_from<R: BufRead>(reader: R) -> Result<Dataset, DatasetError> {
        let mut parser = Parser::default();
        for (i, line) in reader.lines().enumerate() {
            parser.line(i + 1, &line?)?;
        }
        parser.finish()
    }

    pub fn parse(text: &str) -> Result<Dataset, DatasetError> {
        let mut parser = Parser::default();
        for (i, line) in text.lines().enumerate() {
            parser.line(i + 1, line)?;
        }
        parser.finish()
    }
}

pub fn write_dataset(dataset: &Dataset, path: &std::path::Path) -> Result<(), DatasetError> {
    std::fs::write(path, dataset.to_text())?;
    Ok(())
}

pub fn read_dataset(path: &std::path::Path) -> Result<Dataset, DatasetError> {
    let file = std::fs::File::open(path)?;
    Dataset::read_from(io::BufReader::new(file))
}

#[derive(Default)]
struct Parser {
    header: Option<(DatasetSpec, usize)>,
    services: Vec<Service>,
    seen: std::collections::HashSet<ServiceId>,
    requests: Vec<ParamSet>,
    last_line: usize,
}

impl Parser {
    fn line(&mut self, no: usize, line: &str) -> Result<(), DatasetError> {
        self.last_line = no;
        let line = line.strip_suffix('\r').unwrap_or(line);
        let Some((spec, _)) = self.header else {
            self.header = Some(parse_header(no, line)?);
            return Ok(());
        };
        if line.trim().is_empty() {
            return Ok(());
        }
        if let Some(rest) = line.strip_prefix("S ") {
            let mut fields = rest.split('|');
            let (Some(id), Some(inputs), Some(outputs), None) =
                (fields.next(), fields.next(), fields.next(), fields.next())
            else {
                return Err(parse_err(no, "service line must be `S <id>|<inputs>|<outputs>`"));
            };
            let id: ServiceId = id
                .trim()
                .parse()
                .map_err(|_| parse_err(no, format!("bad service id `{}`", id.trim())))?;
            let inputs = parse_set(no, inputs, spec.parameter_count)?;
            let outputs = parse_set(no, outputs, spec.parameter_count)?;
            if !self.seen.insert(id) {
                return Err(parse_err(no, format!("duplicate service id {id}")));
            }
            let svc = Service::from_sets(id, inputs, outputs)
                .map_err(|_| parse_err(no, format!("service {id} has no inputs")))?;
            self.services.push(svc);
        } else if line == "R" || line.starts_with("R ") {
            self.requests.push(parse_set(no, &line[1..], spec.parameter_count)?);
        } else {
            return Err(parse_err(no, "expected a service (`S`) or request (`R`) line"));
        }
        Ok(())
    }

    fn finish(self) -> Result<Dataset, DatasetError> {
        let Some((mut spec, declared)) = self.header else {
            return Err(parse_err(1, "missing header"));
        };
        if declared != self.services.len() {
            return Err(parse_err(
                self.last_line,
                format!(
                    "header declares S={declared} but {} services were read",
                    self.services.len()
                ),
            ));
        }
        spec.service_count = declared;
        spec.request_count = self.requests.len();
        Ok(Dataset {
            spec,
            parameters: ParameterTable::generated(spec.parameter_count),
            services: self.services,
            requests: self.requests,
        })
    }
}

fn parse_header(no: usize, line: &str) -> Result<(DatasetSpec, usize), DatasetError> {
    let mut words = line.split_whitespace();
    if words.next() != Some(MAGIC) || words.next() != Some(VERSION) {
        return Err(parse_err(no, format!("expected `{MAGIC} {VERSION}` header")));
    }
    let mut fields: [Option<u64>; 6] = [None; 6];
    const NAMES: [&str; 6] = ["P", "S", "n", "m", "r", "seed"];
    for word in words {
        let (name, value) = word
            .split_once('=')
            .ok_or_else(|| parse_err(no, format!("malformed header field `{word}`")))?;
        let slot = NAMES
            .iter()
            .position(|&n| n == name)
            .ok_or_else(|| parse_err(no, format!("unknown header field `{name}`")))?;
        let value = value
            .parse()
            .map_err(|_| parse_err(no, format!("header field `{name}` is not an integer")))?;
        if fields[slot].replace(value).is_some() {
            return Err(parse_err(no, format!("header field `{name}` repeated")));
        }
    }
    let get = |i: usize| fields[i].ok_or_else(|| parse_err(no, format!("header field `{}` missing", NAMES[i])));
    let parameter_count = get(0)?;
    if parameter_count > u64::from(u32::MAX) {
        return Err(parse_err(no, "P exceeds the id range"));
    }
    let declared = usize::try_from(get(1)?).map_err(|_| parse_err(no, "S too large"))?;
    let to_usize = |v: u64| usize::try_from(v).map_err(|_| parse_err(no, "header value too large"));
    let spec = DatasetSpec {
        parameter_count: parameter_count as usize,
        service_count: declared,
        inputs_per_service: to_usize(get(2)?)?,
        outputs_per_service: to_usize(get(3)?)?,
        request_count: 0,
        request_size: to_usize(get(4)?)?,
        seed: get(5)?,
    };
    Ok((spec, declared))
}

fn parse_set(no: usize, field: &str, parameter_count: usize) -> Result<ParamSet, DatasetError> {
    let mut ids = Vec::new();
    for word in field.split_whitespace() {
        let id: u32 = word
            .parse()
            .map_err(|_| parse_err(no, format!("bad parameter id `{word}`")))?;
        if id as usize >= parameter_count {
            return Err(parse_err(no, format!("parameter id {id} outside 0..{parameter_count}")));
        }
        ids.push(ParameterId(id));
    }
    ParamSet::from_sorted(ids).ok_or_else(|| parse_err(no, "parameter ids must be strictly ascending"))
}
