//! Finite-horizon Dec-POMDP planning toolkit.

pub mod error;
pub mod model;

pub use error::{Error, Result};
pub use model::{mdp_value, parse_dpomdp, random_policy_value, DecPomdp, Horizon, MdpTable};

pub mod clustering;
pub mod policy;

pub use clustering::{cluster_stage, f_extend, sliding_window_cluster, ClusterId, MergeMode, Occupancy, StageClustering};
pub use policy::{evaluate_policy, ClusterPolicy};

#[cfg(test)]
pub(crate) mod testdata {
    pub const DECTIGER: &str = include_str!("../fixtures/dectiger.dpomdp");
}
