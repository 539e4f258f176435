//! Command failures and their exit codes.

use clarity_core::pipeline::PipelineError;
use std::fmt;

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Stage {
    Config,
    Inputs,
    Index,
    Dataset,
    Scorer,
    Cache,
    Predict,
    Sweep,
    Graph,
    Evaluate,
    Output,
}

impl fmt::Display for Stage {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Stage::Config => "config",
            Stage::Inputs => "reading inputs",
            Stage::Index => "index",
            Stage::Dataset => "dataset",
            Stage::Scorer => "scorer",
            Stage::Cache => "pair cache",
            Stage::Predict => "predict",
            Stage::Sweep => "sweep",
            Stage::Graph => "graph",
            Stage::Evaluate => "evaluate",
            Stage::Output => "writing outputs",
        })
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Kind {
    Usage,
    Data,
    Scorer,
}

#[derive(Debug)]
pub struct Failure {
    pub kind: Kind,
    pub stage: Stage,
    pub error: anyhow::Error,
}

impl Failure {
    pub fn usage(message: impl Into<String>) -> Self {
        Failure {
            kind: Kind::Usage,
            stage: Stage::Config,
            error: anyhow::anyhow!(message.into()),
        }
    }

    pub fn data<E: Into<anyhow::Error>>(stage: Stage) -> impl FnOnce(E) -> Failure {
        move |e| Failure {
            kind: Kind::Data,
            stage,
            error: e.into(),
        }
    }

    pub fn scorer<E: Into<anyhow::Error>>(stage: Stage) -> impl FnOnce(E) -> Failure {
        move |e| Failure {
            kind: Kind::Scorer,
            stage,
            error: e.into(),
        }
    }

    pub fn pipeline(stage: Stage) -> impl FnOnce(PipelineError) -> Failure {
        move |e| {
            let kind = match &e {
                e if e.is_scorer_failure() => Kind::Scorer,
                PipelineError::MissingScorer(_) => Kind::Usage,
                _ => Kind::Data,
            };
            Failure {
                kind,
                stage,
                error: e.into(),
            }
        }
    }

    pub fn exit_code(&self) -> i32 {
        match self.kind {
            Kind::Usage => 1,
            Kind::Data => 2,
            Kind::Scorer => 3,
        }
    }
}

impl fmt::Display for Failure {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}: {:#}", self.stage, self.error)
    }
}
