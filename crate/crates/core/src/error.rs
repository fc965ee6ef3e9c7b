//! Error types for the four layers of the crate.

use core::fmt;

/// Errors from graph construction and configuration handling.
#[derive(Debug, Clone, PartialEq, Eq)]
pub enum GraphError {
    /// Requested box exceeds the configured vertex/edge budget.
    BudgetExceeded { vertices: usize, edges: usize, budget: usize },
    /// Box dimensions produce an empty or degenerate graph.
    InvalidDimensions,
    /// An arbitrary-graph edge list repeats an edge.
    DuplicateEdge { a: usize, b: usize },
    /// An arbitrary-graph edge joins a vertex to itself.
    SelfLoop { v: usize },
    /// An edge or boundary list refers to a vertex that does not exist.
    VertexOutOfRange { v: usize, len: usize },
    /// Operation requires a plain `Box(k, m)` graph.
    NotABox,
    /// Operation requires `k >= 1` so the dual box is non-empty.
    DualOfDegenerateBox,
    /// A configuration's length does not match the graph.
    ConfigLengthMismatch { expected: usize, got: usize },
    /// The requested crossing/radius mode does not apply to the given state
    /// kind (edge configurations take open paths; spin configurations take
    /// plus or minus-star paths).
    ModeStateMismatch,
    /// Crossing direction requires a box-like graph with named sides.
    NoSides,
}

impl fmt::Display for GraphError {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            GraphError::BudgetExceeded { vertices, edges, budget } => write!(
                f,
                "graph with {vertices} vertices / {edges} edges exceeds budget {budget}"
            ),
            GraphError::InvalidDimensions => write!(f, "degenerate box dimensions"),
            GraphError::DuplicateEdge { a, b } => write!(f, "duplicate edge ({a}, {b})"),
            GraphError::SelfLoop { v } => write!(f, "self-loop at vertex {v}"),
            GraphError::VertexOutOfRange { v, len } => {
                write!(f, "vertex {v} out of range for {len} vertices")
            }
            GraphError::NotABox => write!(f, "operation requires a Box(k, m) graph"),
            GraphError::DualOfDegenerateBox => {
                write!(f, "dual box requires horizontal span k >= 1")
            }
            GraphError::ConfigLengthMismatch { expected, got } => {
                write!(f, "configuration length {got} does not match graph size {expected}")
            }
            GraphError::ModeStateMismatch => {
                write!(f, "path mode does not apply to this state kind")
            }
            GraphError::NoSides => write!(f, "crossing direction undefined for this graph"),
        }
    }
}

impl core::error::Error for GraphError {}

/// Errors from exact enumeration.
#[derive(Debug, Clone, PartialEq, Eq)]
pub enum ExactError {
    /// Too many edges to enumerate edge configurations.
    EdgeBudget { edges: usize, budget: usize },
    /// Too many free vertices to enumerate spin configurations.
    VertexBudget { vertices: usize, budget: usize },
    /// Conditioning event has probability zero.
    DegenerateConditioning,
    /// Model parameters outside their admissible range.
    InvalidParams(&'static str),
    /// Event kind does not match the measure (edge event under a spin
    /// measure or vice versa).
    EventKindMismatch,
    /// Underlying graph problem.
    Graph(GraphError),
}

impl fmt::Display for ExactError {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            ExactError::EdgeBudget { edges, budget } => {
                write!(f, "{edges} edges exceed enumeration budget {budget}")
            }
            ExactError::VertexBudget { vertices, budget } => {
                write!(f, "{vertices} vertices exceed enumeration budget {budget}")
            }
            ExactError::DegenerateConditioning => {
                write!(f, "conditioning event has probability zero")
            }
            ExactError::InvalidParams(msg) => write!(f, "invalid parameters: {msg}"),
            ExactError::EventKindMismatch => {
                write!(f, "event kind does not match the measure")
            }
            ExactError::Graph(e) => write!(f, "{e}"),
        }
    }
}

impl core::error::Error for ExactError {}

impl From<GraphError> for ExactError {
    fn from(e: GraphError) -> Self {
        ExactError::Graph(e)
    }
}

/// Errors from Monte Carlo samplers and couplings.
#[derive(Debug, Clone, PartialEq, Eq)]
pub enum SampleError {
    /// Chain specification with zero chains, zero thinning, or similar.
    InvalidChainSpec(&'static str),
    /// Sampler does not support the given parameters (for example q < 1 for
    /// the heat bath, or a non-integer q for Swendsen–Wang).
    UnsupportedParams(&'static str),
    /// Couplings enumerate conditional distributions and inherit the exact
    /// layer's budgets.
    Exact(ExactError),
    /// Underlying graph problem.
    Graph(GraphError),
}

impl fmt::Display for SampleError {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            SampleError::InvalidChainSpec(msg) => write!(f, "invalid chain spec: {msg}"),
            SampleError::UnsupportedParams(msg) => write!(f, "unsupported parameters: {msg}"),
            SampleError::Exact(e) => write!(f, "{e}"),
            SampleError::Graph(e) => write!(f, "{e}"),
        }
    }
}

impl core::error::Error for SampleError {}

impl From<ExactError> for SampleError {
    fn from(e: ExactError) -> Self {
        SampleError::Exact(e)
    }
}

impl From<GraphError> for SampleError {
    fn from(e: GraphError) -> Self {
        SampleError::Graph(e)
    }
}

/// Errors from threshold-lab quantities.
#[derive(Debug, Clone, PartialEq, Eq)]
pub enum LabError {
    /// Parameter grid must be strictly increasing and inside (0, 1) or the
    /// relevant control range.
    BadGrid(&'static str),
    /// Ambient box too small for the requested crossing box or radius.
    MarginTooSmall { need: u32, got: u32 },
    /// Invalid model parameters.
    InvalidParams(&'static str),
    Exact(ExactError),
    Sample(SampleError),
    Graph(GraphError),
}

impl fmt::Display for LabError {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            LabError::BadGrid(msg) => write!(f, "bad grid: {msg}"),
            LabError::MarginTooSmall { need, got } => {
                write!(f, "ambient box radius {got} too small, need at least {need}")
            }
            LabError::InvalidParams(msg) => write!(f, "invalid parameters: {msg}"),
            LabError::Exact(e) => write!(f, "{e}"),
            LabError::Sample(e) => write!(f, "{e}"),
            LabError::Graph(e) => write!(f, "{e}"),
        }
    }
}

impl core::error::Error for LabError {}

impl From<ExactError> for LabError {
    fn from(e: ExactError) -> Self {
        LabError::Exact(e)
    }
}

impl From<SampleError> for LabError {
    fn from(e: SampleError) -> Self {
        LabError::Sample(e)
    }
}

impl From<GraphError> for LabError {
    fn from(e: GraphError) -> Self {
        LabError::Graph(e)
    }
}
