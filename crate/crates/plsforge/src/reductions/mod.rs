//! Instance compilers paired with their solution maps.

pub mod cf2nmc;
pub mod mc2sp;
pub mod nmc2multi;

pub use cf2nmc::{map_back_cf, reduce_cf_to_nmc, CfInstance, CfMap, Half, Pow2Sum, VertexRole};
pub use mc2sp::{embed_cut_to_sp, map_back_sp, reduce_mc_to_sp, Mc2SpMap};
pub use nmc2multi::{constants_on_middle, embed_cut_to_multi, map_back_multi, reduce_nmc_to_multi, Nmc2MultiMap};
