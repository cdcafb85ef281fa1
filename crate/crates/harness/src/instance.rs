//! JSON instance documents.
//!
//! ```json
//! {"type": "kserver", "metric": {"points": [[0], [5]]}, "k": 1, "initial": [0], "requests": [1]}
//! ```
//!
//! `metric` holds exactly one of `matrix`, `points` or `graph` (`[p, q, w]`
//! edges). MTS requests are cost vectors in which `null` stands for an
//! infinite cost; k-server requests are point indices.

use std::fs;
use std::path::Path;

use boundedwfa_core::{Configuration, KServerInstance, MetricSpace, MtsInstance};
use serde::{Deserialize, Serialize};
use sha2::{Digest, Sha256};

use crate::error::{HarnessError, Result};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum InstanceKind {
    Mts,
    Kserver,
}

#[derive(Debug, Clone, Default, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct MetricDoc {
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub matrix: Option<Vec<Vec<f64>>>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub points: Option<Vec<Vec<f64>>>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub graph: Option<Vec<(usize, usize, f64)>>,
}

/// One request: a point (k-server) or a cost vector (MTS).
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(untagged)]
pub enum RequestDoc {
    Point(usize),
    Costs(Vec<Option<f64>>),
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct InstanceDoc {
    #[serde(rename = "type")]
    pub kind: InstanceKind,
    pub metric: MetricDoc,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub k: Option<usize>,
    pub initial: Vec<usize>,
    pub requests: Vec<RequestDoc>,
}

#[derive(Debug, Clone)]
pub enum Instance {
    Mts(MtsInstance<f64>),
    KServer(KServerInstance<f64>),
}

impl Instance {
    pub fn kind(&self) -> InstanceKind {
        match self {
            Self::Mts(_) => InstanceKind::Mts,
            Self::KServer(_) => InstanceKind::Kserver,
        }
    }

    pub fn space(&self) -> &MetricSpace<f64> {
        match self {
            Self::Mts(i) => i.space(),
            Self::KServer(i) => i.space(),
        }
    }

    pub fn request_count(&self) -> usize {
        match self {
            Self::Mts(i) => i.requests().len(),
            Self::KServer(i) => i.requests().len(),
        }
    }

    /// Text for the `request` column of a trace row.
    pub fn request_label(&self, step: usize) -> String {
        match self {
            Self::Mts(i) => {
                let costs: Vec<String> = i.requests()[step].iter().map(|&c| crate::trace_csv::fmt_float(c)).collect();
                costs.join(";")
            }
            Self::KServer(i) => i.requests()[step].to_string(),
        }
    }
}

impl InstanceDoc {
    pub fn parse(text: &str) -> Result<Self> {
        serde_json::from_str(text).map_err(|e| HarnessError::schema(format!("line {} column {}", e.line(), e.column()), e.to_string()))
    }

    pub fn to_json(&self) -> String {
        serde_json::to_string(self).expect("instance documents always serialize")
    }

    /// Short SHA-256 digest of the canonical serialization; identifies the
    /// instance in trace metadata.
    pub fn fingerprint(&self) -> String {
        let canonical = serde_json::to_vec(self).expect("instance documents always serialize");
        hex::encode(&Sha256::digest(&canonical)[..8])
    }

    pub fn build_space(&self) -> Result<MetricSpace<f64>> {
        let m = &self.metric;
        let present = [("matrix", m.matrix.is_some()), ("points", m.points.is_some()), ("graph", m.graph.is_some())];
        let named: Vec<&str> = present.iter().filter(|(_, p)| *p).map(|(n, _)| *n).collect();
        if named.len() != 1 {
            let message = if named.is_empty() {
                "exactly one of \"matrix\", \"points\" or \"graph\" is required".to_string()
            } else {
                format!("exactly one metric form is allowed, found {}", named.join(" and "))
            };
            return Err(HarnessError::schema("metric", message));
        }
        let (location, built) = if let Some(matrix) = &m.matrix {
            ("metric.matrix", MetricSpace::from_matrix(matrix))
        } else if let Some(points) = &m.points {
            ("metric.points", MetricSpace::from_points(points))
        } else {
            ("metric.graph", MetricSpace::from_graph(m.graph.as_deref().unwrap_or_default()))
        };
        built.map_err(|e| HarnessError::Invalid { location: location.into(), source: e.into() })
    }

    /// Validates the document and builds the instance.
    pub fn build(&self) -> Result<Instance> {
        let space = self.build_space()?;
        let n = space.len();
        let point = |location: String, p: usize| {
            if p < n {
                Ok(p)
            } else {
                Err(HarnessError::Invalid { location, source: boundedwfa_core::Error::OutOfRange { index: p, size: n } })
            }
        };
        for (i, &p) in self.initial.iter().enumerate() {
            point(format!("initial[{i}]"), p)?;
        }
        match self.kind {
            InstanceKind::Mts => {
                if self.k.is_some() {
                    return Err(HarnessError::schema("k", "only kserver instances take k"));
                }
                let [initial] = self.initial[..] else {
                    return Err(HarnessError::schema("initial", format!("mts needs exactly one initial state, got {}", self.initial.len())));
                };
                let mut requests = Vec::with_capacity(self.requests.len());
                for (i, r) in self.requests.iter().enumerate() {
                    let RequestDoc::Costs(costs) = r else {
                        return Err(HarnessError::schema(format!("requests[{i}]"), "expected a cost vector"));
                    };
                    if costs.len() != n {
                        return Err(HarnessError::schema(
                            format!("requests[{i}]"),
                            format!("expected {n} costs, got {}", costs.len()),
                        ));
                    }
                    let mut row = Vec::with_capacity(n);
                    for (s, c) in costs.iter().enumerate() {
                        match *c {
                            None => row.push(f64::INFINITY),
                            Some(c) if c >= 0.0 => row.push(c),
                            Some(c) => {
                                return Err(HarnessError::schema(format!("requests[{i}][{s}]"), format!("negative cost {c}")))
                            }
                        }
                    }
                    requests.push(row);
                }
                Ok(Instance::Mts(MtsInstance::new(space, initial, requests)?))
            }
            InstanceKind::Kserver => {
                let k = self.k.ok_or_else(|| HarnessError::schema("k", "kserver instances need k"))?;
                if k == 0 {
                    return Err(HarnessError::schema("k", "k must be at least 1"));
                }
                if self.initial.len() != k {
                    return Err(HarnessError::schema(
                        "initial",
                        format!("expected {k} server positions, got {}", self.initial.len()),
                    ));
                }
                let mut requests = Vec::with_capacity(self.requests.len());
                for (i, r) in self.requests.iter().enumerate() {
                    let RequestDoc::Point(p) = *r else {
                        return Err(HarnessError::schema(format!("requests[{i}]"), "expected a point index"));
                    };
                    requests.push(point(format!("requests[{i}]"), p)?);
                }
                let initial = Configuration::new(self.initial.iter().copied());
                Ok(Instance::KServer(KServerInstance::new(space, k, initial, requests)?))
            }
        }
    }
}

/// Parses and validates an instance document.
pub fn load_instance(text: &str) -> Result<Instance> {
    InstanceDoc::parse(text)?.build()
}

/// Reads a document from disk, returning it with the validated instance.
pub fn read_instance(path: &Path) -> Result<(InstanceDoc, Instance)> {
    let text = fs::read_to_string(path)?;
    let doc = InstanceDoc::parse(&text)?;
    let instance = doc.build()?;
    Ok((doc, instance))
}
