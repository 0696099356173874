//! Symbolic side: words over the alphabet of the system carrying the
//! Bernoulli measure `p_a`, with cylinders of diameter `r_a`.

pub mod blocks;
pub mod estimator;
pub mod moran;
pub mod types;

pub use blocks::{
    abundance_report, base_alphabet, gamma_n_alpha, subshift_dimension, AbundanceReport,
    BlockAlphabet, BlockBase, BlockClass,
};
pub use estimator::{
    assouad_estimate, greedy_block_word, greedy_word, local_dim_prefixes, sample_word,
    AssouadEstimate, WindowRow,
};
pub use moran::{moran_construct, moran_dimension, MoranSpec, MoranSummary};
pub use types::{
    entropy_functionals, type_class_log_count, type_of, Entropies, TypeClassCount, TypeVector,
};
