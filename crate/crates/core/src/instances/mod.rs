//! Testbed generation, the Subset-Sum-Interval reduction and instance files.

pub mod generate;
pub mod io;
pub mod ssi;

pub use generate::{gen_quad, gen_testbed, instance_id, stream_seed, GenConfig, QKind, TestbedInstance, TESTBED_N_Y};
pub use io::{format_instance, parse_instance, read_instance, write_instance, InstanceFile, FORMAT_HEADER};
pub use ssi::{reduce_ssi, ssi_follower_value, SsiInstance};
