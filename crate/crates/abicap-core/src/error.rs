use alloc::string::String;
use core::fmt;

/// Errors raised by graph construction, parameter validation, and run setup.
#[derive(Debug, Clone, PartialEq)]
pub enum ModelError {
    /// A numeric argument fell outside its allowed range.
    OutOfRange {
        what: &'static str,
        detail: String,
    },
    /// A node index does not exist in the topology.
    BadNodeIndex {
        node: usize,
        node_count: usize,
    },
    /// Interactive practice requires an even number of mutually partnered agents.
    BadDyad(String),
    /// A schedule or run configuration failed validation.
    BadConfig(String),
}

impl fmt::Display for ModelError {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            ModelError::OutOfRange { what, detail } => {
                write!(f, "{what} out of range: {detail}")
            }
            ModelError::BadNodeIndex { node, node_count } => {
                write!(f, "node index {node} out of range for {node_count} nodes")
            }
            ModelError::BadDyad(msg) => write!(f, "invalid dyad: {msg}"),
            ModelError::BadConfig(msg) => write!(f, "invalid configuration: {msg}"),
        }
    }
}

impl core::error::Error for ModelError {}
