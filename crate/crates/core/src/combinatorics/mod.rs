//! Partitions, pair partitions, consistent tuples and exact expectation oracles
//! for the moment method.

mod pairing;
mod partition;
mod tuple;
mod wick;

pub use pairing::{
    enumerate_ncpp, enumerate_pair_partitions, is_crossing, PairPartition, PairPartitions,
    MAX_PAIRING_K,
};
pub use partition::{enumerate_partitions, Partition, Partitions, MAX_PARTITION_K};
pub use tuple::{
    count_s_n, count_s_n_star, enumerate_consistent_tuples, induced_partition, satisfies_star,
    tally_classes, ClassCount, ConsistentTuple, ConsistentTuples, MAX_TUPLES,
};
pub use wick::{
    exact_expected_trace_moment, expected_product_gaussian, star_abs_expectation, MAX_WICK_K,
};
