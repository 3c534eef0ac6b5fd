use serde_json::{json, Value};

use powerdomain::hyperspace::HyperspaceError;
use powerdomain::probability::ProbabilityError;
use powerdomain::space::TopologyError;
use powerdomain::support::SupportError;
use powerdomain::valuation::ValuationError;

#[derive(Debug, thiserror::Error)]
pub enum CliError {
    #[error("malformed input: {0}")]
    Malformed(String),
    #[error("axiom violated: {message}")]
    Axiom { message: String, witness: Value },
    #[error("precondition failed: {0}")]
    Precondition(String),
    #[error("{0} law failure(s)")]
    LawFailures(usize),
    #[error("unknown suite {0:?}")]
    UnknownSuite(String),
}

impl CliError {
    pub fn exit_code(&self) -> i32 {
        match self {
            CliError::Malformed(_) => 1,
            CliError::Axiom { .. } => 2,
            CliError::Precondition(_) => 3,
            CliError::LawFailures(_) => 4,
            CliError::UnknownSuite(_) => 5,
        }
    }

    /// The JSON written to stderr.
    pub fn report(&self) -> Value {
        match self {
            CliError::Malformed(m) => json!({ "error": "malformed", "message": m }),
            CliError::Axiom { message, witness } => json!({ "error": "axiom", "message": message, "witness": witness }),
            CliError::Precondition(m) => json!({ "error": "precondition", "message": m }),
            CliError::LawFailures(n) => json!({ "error": "law-failures", "failures": n }),
            CliError::UnknownSuite(s) => json!({ "error": "unknown-suite", "suite": s }),
        }
    }

    fn axiom(message: String, witness: Value) -> Self {
        CliError::Axiom { message, witness }
    }
}

impl From<serde_json::Error> for CliError {
    fn from(e: serde_json::Error) -> Self {
        CliError::Malformed(e.to_string())
    }
}

impl From<TopologyError> for CliError {
    fn from(e: TopologyError) -> Self {
        let message = e.to_string();
        let witness = match &e {
            TopologyError::NotReflexive(x) => json!({ "axiom": "reflexive", "point": x }),
            TopologyError::NotTransitive(x, y, z) => {
                json!({ "axiom": "transitive", "pairs": [[x, y], [y, z]], "missing": [x, z] })
            }
            TopologyError::MissingBound(which) => json!({ "axiom": format!("contains the {which} set") }),
            TopologyError::NotClosedUnder { op, left, right } => {
                json!({ "axiom": format!("closed under {op}"), "left": left, "right": right })
            }
            TopologyError::NotContinuous { open, preimage } => {
                json!({ "axiom": "continuous", "open": open, "preimage": preimage })
            }
            TopologyError::NotOpen(set) => json!({ "axiom": "open", "set": set }),
            TopologyError::DuplicatePoint(_)
            | TopologyError::UnknownPoint(_)
            | TopologyError::AssignmentLength { .. }
            | TopologyError::ShapeMismatch(_) => return CliError::Malformed(message),
            TopologyError::CrossCheck(_) => json!({ "axiom": "internal cross-check" }),
        };
        CliError::axiom(message, witness)
    }
}

impl From<ValuationError> for CliError {
    fn from(e: ValuationError) -> Self {
        let message = e.to_string();
        let witness = match e {
            ValuationError::Topology(t) => return t.into(),
            ValuationError::PreconditionFailed(_) | ValuationError::InfinityIndeterminate(_) => {
                return CliError::Precondition(message)
            }
            ValuationError::ShapeMismatch(_) => return CliError::Malformed(message),
            ValuationError::NotStrict(v) => json!({ "axiom": "strict", "value": v }),
            ValuationError::NotMonotone { smaller, larger, smaller_value, larger_value } => json!({
                "axiom": "monotone", "smaller": smaller, "larger": larger,
                "smaller_value": smaller_value, "larger_value": larger_value,
            }),
            ValuationError::NotModular { left, right, union_plus_meet, sum } => json!({
                "axiom": "modular", "left": left, "right": right,
                "union_plus_meet": union_plus_meet, "sum": sum,
            }),
            ValuationError::NotLowerSemicontinuous { below, above } => {
                json!({ "axiom": "lower semicontinuous", "below": below, "above": above })
            }
            ValuationError::NotOpen(set) => json!({ "axiom": "open", "set": set }),
            other => json!({ "axiom": other.to_string() }),
        };
        CliError::axiom(message, witness)
    }
}

impl From<ProbabilityError> for CliError {
    fn from(e: ProbabilityError) -> Self {
        match e {
            ProbabilityError::Valuation(v) => v.into(),
            ProbabilityError::InfiniteMass | ProbabilityError::NotNormalized(_) => {
                CliError::Precondition(e.to_string())
            }
            ProbabilityError::ShapeMismatch(m) => CliError::Malformed(m),
            other => CliError::axiom(other.to_string(), json!({ "axiom": "nonnegative extension" })),
        }
    }
}

impl From<HyperspaceError> for CliError {
    fn from(e: HyperspaceError) -> Self {
        match e {
            HyperspaceError::Topology(t) => t.into(),
            other => CliError::axiom(other.to_string(), Value::Null),
        }
    }
}

impl From<SupportError> for CliError {
    fn from(e: SupportError) -> Self {
        match e {
            SupportError::Valuation(v) => v.into(),
            SupportError::Hyperspace(h) => h.into(),
            SupportError::Probability(p) => p.into(),
            other => CliError::axiom(other.to_string(), Value::Null),
        }
    }
}
