//! Patent portfolio analysis over IPC/CPC technology classes.
//!
//! The crate builds class-count portfolios from saved USPTO-style patent
//! exports, computes diversity statistics (Gini-Simpson, Rao-Stirling,
//! true diversity) and whole-network cohesion measures over class
//! co-occurrence graphs, and writes Pajek and VOSviewer files for
//! downstream mapping.
//!
//! Core math is generic over the scalar type through [`scalar::Real`];
//! the aliases below fix `f64`, which is what the CLI uses.

pub mod compare;
pub mod diversity;
pub mod error;
pub mod export;
pub mod ingest;
pub mod network;
pub mod pipeline;
pub mod portfolio;
pub mod scalar;
pub mod taxonomy;

pub use error::Error;
pub use scalar::Real;

/// `f64`-backed base map, the default for the CLI path.
pub type SimilarityMap = taxonomy::ClassSimilarityMap<f64>;
/// `f64`-backed similarity graph.
pub type Graph = network::SimilarityGraph<f64>;
/// `f64`-backed cohesion report.
pub type Cohesion = network::CohesionReport<f64>;
/// `f64`-backed diversity record.
pub type Diversity = diversity::DiversityRecord<f64>;
/// `f64`-backed city distance matrix.
pub type DistanceMatrix = compare::PortfolioDistanceMatrix<f64>;

pub type Result<T> = std::result::Result<T, Error>;
