//! Job payloads shared by the command line and the HTTP service.

use locusforge_core::cancel::Deadline;
use locusforge_core::fit::{fit_implicit, FitRequest, FitWire};
use locusforge_core::linkage::LinkageSpec;
use locusforge_core::locus::{locus_equation, prove_membership, LocusWire, PolynomialWire, Verdict};
use locusforge_core::poly::parse_system;
use locusforge_core::tracer::{trace, Branch, TraceWire};
use locusforge_core::Error as CoreError;
use serde::{Deserialize, Serialize};
use serde_json::Value;
use sha2::{Digest, Sha256};
use thiserror::Error;

pub const DEFAULT_DEADLINE_MS: u64 = 30_000;
pub const DEFAULT_SAMPLES: usize = 360;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum JobKind {
    Locus,
    Trace,
    Fit,
    Prove,
}

impl JobKind {
    pub fn as_str(self) -> &'static str {
        match self {
            JobKind::Locus => "locus",
            JobKind::Trace => "trace",
            JobKind::Fit => "fit",
            JobKind::Prove => "prove",
        }
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct JobRequest {
    #[serde(default)]
    pub kind: Option<JobKind>,
    pub payload: Value,
    #[serde(default)]
    pub deadline_ms: Option<u64>,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum BranchSet {
    Both,
    Ccw,
    Cw,
}

impl BranchSet {
    pub fn branches(self) -> Vec<Branch> {
        match self {
            BranchSet::Both => Branch::BOTH.to_vec(),
            BranchSet::Ccw => vec![Branch::Ccw],
            BranchSet::Cw => vec![Branch::Cw],
        }
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct TracePayload {
    pub spec: LinkageSpec,
    #[serde(default = "default_samples")]
    pub samples: usize,
    #[serde(default = "default_branches")]
    pub branches: BranchSet,
}

fn default_samples() -> usize {
    DEFAULT_SAMPLES
}

fn default_branches() -> BranchSet {
    BranchSet::Both
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ProvePayload {
    pub hypotheses: Vec<String>,
    pub thesis: String,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct CertificateWire {
    pub basis: Vec<PolynomialWire>,
    pub quotients: Vec<PolynomialWire>,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct ProveWire {
    pub verdict: Verdict,
    pub variables: Vec<String>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub certificate: Option<CertificateWire>,
}

#[derive(Debug, Error)]
pub enum JobError {
    #[error("invalid request: {0}")]
    BadRequest(String),
    #[error(transparent)]
    Core(#[from] CoreError),
    #[error("internal error: {0}")]
    Internal(String),
}

impl JobError {
    pub fn code(&self) -> &'static str {
        match self {
            JobError::BadRequest(_) => "bad_request",
            JobError::Internal(_) => "internal",
            JobError::Core(e) => match e {
                CoreError::Cancelled => "deadline_exceeded",
                CoreError::ContextMismatch => "context_mismatch",
                CoreError::ZeroPolynomial => "zero_polynomial",
                CoreError::EmptyIdeal => "empty_ideal",
                CoreError::ExponentOverflow => "exponent_overflow",
                CoreError::UnknownVariable(_) => "unknown_variable",
                CoreError::InvalidSpec(_) => "invalid_spec",
                CoreError::DegenerateCoupler => "degenerate_coupler",
                CoreError::NoAssembly { .. } => "no_assembly",
                CoreError::InvalidDegree(_) => "invalid_degree",
                CoreError::InsufficientPoints { .. } => "insufficient_points",
                CoreError::RankDeficient { .. } => "rank_deficient",
                CoreError::NoCurve => "no_curve",
                CoreError::Parse(_) => "parse_error",
            },
        }
    }

    pub fn is_cancelled(&self) -> bool {
        matches!(self, JobError::Core(CoreError::Cancelled))
    }

    pub fn is_internal(&self) -> bool {
        matches!(self, JobError::Internal(_))
    }
}

/// A job whose payload has been validated and is ready to run.
#[derive(Clone, Debug, PartialEq)]
pub enum Job {
    Locus(LinkageSpec),
    Trace(TracePayload),
    Fit(FitRequest),
    Prove(ProvePayload),
}

fn decode<T: serde::de::DeserializeOwned>(payload: Value) -> Result<T, JobError> {
    serde_json::from_value(payload).map_err(|e| JobError::BadRequest(e.to_string()))
}

impl Job {
    pub fn parse(kind: JobKind, payload: Value) -> Result<Self, JobError> {
        let job = match kind {
            JobKind::Locus => Job::Locus(decode(payload)?),
            JobKind::Trace => Job::Trace(decode(payload)?),
            JobKind::Fit => Job::Fit(decode(payload)?),
            JobKind::Prove => Job::Prove(decode(payload)?),
        };
        job.validate()?;
        Ok(job)
    }

    fn validate(&self) -> Result<(), JobError> {
        match self {
            Job::Locus(spec) => spec.validate()?,
            Job::Trace(t) => {
                t.spec.validate()?;
                if t.samples == 0 {
                    return Err(JobError::BadRequest("samples must be at least 1".into()));
                }
            }
            Job::Fit(f) => {
                f.to_problem()?;
            }
            Job::Prove(p) => {
                parse_prove(p)?;
            }
        }
        Ok(())
    }

    pub fn kind(&self) -> JobKind {
        match self {
            Job::Locus(_) => JobKind::Locus,
            Job::Trace(_) => JobKind::Trace,
            Job::Fit(_) => JobKind::Fit,
            Job::Prove(_) => JobKind::Prove,
        }
    }

    pub fn run(&self, deadline: &Deadline) -> Result<JobOutput, JobError> {
        deadline.check()?;
        Ok(match self {
            Job::Locus(spec) => JobOutput::Locus(locus_equation(spec, deadline)?.to_wire(false)),
            Job::Trace(t) => JobOutput::Trace(trace(&t.spec, t.samples, &t.branches.branches())?.to_wire()),
            Job::Fit(f) => JobOutput::Fit(fit_implicit(&f.to_problem()?)?.to_wire()),
            Job::Prove(p) => JobOutput::Prove(run_prove(p, deadline)?),
        })
    }
}

fn parse_prove(p: &ProvePayload) -> Result<(locusforge_core::Context, Vec<locusforge_core::Polynomial>), JobError> {
    let mut exprs: Vec<&str> = p.hypotheses.iter().map(String::as_str).collect();
    exprs.push(&p.thesis);
    Ok(parse_system(&exprs)?)
}

fn run_prove(p: &ProvePayload, deadline: &Deadline) -> Result<ProveWire, JobError> {
    let (ctx, mut polys) = parse_prove(p)?;
    let thesis = polys.pop().expect("thesis parsed");
    let proof = prove_membership(&polys, &thesis, deadline)?;
    Ok(ProveWire {
        verdict: proof.verdict,
        variables: ctx.names().to_vec(),
        certificate: proof.certificate.map(|c| CertificateWire {
            basis: c.basis.iter().map(PolynomialWire::from_polynomial).collect(),
            quotients: c.quotients.iter().map(PolynomialWire::from_polynomial).collect(),
        }),
    })
}

#[derive(Clone, Debug, PartialEq)]
pub enum JobOutput {
    Locus(LocusWire),
    Trace(TraceWire),
    Fit(FitWire),
    Prove(ProveWire),
}

impl JobOutput {
    /// Compact JSON, the same bytes from the CLI and the service.
    pub fn to_json(&self) -> String {
        let s = match self {
            JobOutput::Locus(w) => serde_json::to_string(w),
            JobOutput::Trace(w) => serde_json::to_string(w),
            JobOutput::Fit(w) => serde_json::to_string(w),
            JobOutput::Prove(w) => serde_json::to_string(w),
        };
        s.expect("wire types serialize")
    }

    pub fn degenerate(&self) -> bool {
        matches!(self, JobOutput::Locus(w) if w.degenerate)
    }
}

/// SHA-256 over the kind and the key-sorted compact payload.
pub fn request_hash(kind: JobKind, payload: &Value) -> String {
    let mut h = Sha256::new();
    h.update(kind.as_str().as_bytes());
    h.update(b"\n");
    h.update(serde_json::to_string(payload).expect("value serializes").as_bytes());
    hex::encode(h.finalize())
}
