use thiserror::Error;

pub type Result<T> = std::result::Result<T, Error>;

#[derive(Debug, Clone, PartialEq, Error)]
pub enum Error {
    #[error("{quantity} = {value} is outside the admissible domain ({reason})")]
    Domain {
        quantity: &'static str,
        value: f64,
        reason: &'static str,
    },

    #[error("invalid model parameter {name} = {value}")]
    InvalidParams { name: &'static str, value: f64 },

    #[error("degenerate shock: density jump {jump:e} is too small")]
    DegenerateJump { jump: f64 },

    #[error("cell {cell}: {source}")]
    Cell {
        cell: usize,
        #[source]
        source: Box<Error>,
    },

    #[error("cell ({i}, {j}): {source}")]
    Cell2 {
        i: usize,
        j: usize,
        #[source]
        source: Box<Error>,
    },

    #[error("unsupported configuration: {0}")]
    Unsupported(String),

    #[error("vehicles {follower} and {leader} violate the minimal spacing (gap {gap})")]
    Collision {
        follower: usize,
        leader: usize,
        gap: f64,
    },

    #[error("non-finite value encountered: {0}")]
    NonFinite(String),

    #[error("step rejected after {halvings} halvings of dt: {reason}")]
    StepRejected { halvings: u32, reason: String },
}

impl Error {
    pub(crate) fn domain(quantity: &'static str, value: f64, reason: &'static str) -> Self {
        Error::Domain {
            quantity,
            value,
            reason,
        }
    }

    pub(crate) fn at_cell(self, cell: usize) -> Self {
        Error::Cell {
            cell,
            source: Box::new(self),
        }
    }
}
