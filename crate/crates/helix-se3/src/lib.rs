//! Stationary helical conformations of charged rods and their linear stability,
//! formulated on the rigid-motion group SE(3).

pub mod cli;
pub mod config;
pub mod conformation;
pub mod eigen;
pub mod molecule;
pub mod optimize;
pub mod output;
pub mod se3;
pub mod stability;
pub mod sum;

pub use conformation::{Conformation, HelicalAssembly, HelixSpec};
pub use molecule::{Bouquet, BouquetNode, ElasticModel, Environment, UnitSystem};
pub use se3::{Se3, Se3Covector, Se3Vector};
pub use stability::{DispersionResult, LinearizationContext, StabilityMatrix};
pub use sum::SumRule;

#[derive(Debug, thiserror::Error)]
pub enum Error {
    #[error("domain error: {0}")]
    Domain(String),
    #[error("config error: {0}")]
    Config(String),
    #[error("numerical contract violated: {0}")]
    Numerical(String),
    #[error("oracle mismatch: {0}")]
    Oracle(String),
    #[error(transparent)]
    Io(#[from] std::io::Error),
}

impl Error {
    /// Process exit status for the command-line tool.
    pub fn exit_code(&self) -> i32 {
        match self {
            Error::Config(_) | Error::Domain(_) => 2,
            Error::Numerical(_) => 3,
            Error::Oracle(_) => 4,
            Error::Io(_) => 2,
        }
    }
}
