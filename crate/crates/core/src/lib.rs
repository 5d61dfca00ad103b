//! Frequency-time hopping patterns for device-to-device discovery.
//!
//! The crate is layered bottom-up:
//!
//! * [`ff_poly`] – polynomials over GF(p), irreducibility and primitivity.
//! * [`ff_linalg`] – vectors/matrices over GF(p), companion matrix, `b(t)`.
//! * [`patterns`] – random, QC and primitive-polynomial hopping patterns.
//! * [`metrics`] – column period, maximal collision ratio, maximal continual
//!   collision number.
//! * [`table`] – published primitive polynomials and a checker for them.
//! * [`sim`] – half-duplex discovery simulation on a hexagonal cell layout.
//! * [`config`] and [`csv_io`] – the text formats used by the CLI.

pub mod config;
pub mod csv_io;
pub mod ff_linalg;
pub mod ff_poly;
pub mod metrics;
pub mod patterns;
pub mod sim;
pub mod table;

pub use config::{
    load_pattern_config, load_sim_config, parse_pattern_config, parse_sim_config, ConfigError,
};
pub use csv_io::CsvError;
pub use ff_linalg::{
    b_sequence, companion_matrix, is_nonsingular, mat_pow, BSequence, FpMatrix, FpVec, LinalgError,
};
pub use ff_poly::{
    find_condition_g_poly, is_irreducible, minimal_r, poly_mul_mod, primitivity_check,
    satisfies_condition_g, FpPoly, PolyError, Prime, PrimitivityCheck,
};
pub use metrics::{
    algebraic_column_period, column_period, is_local_good, max_collision_ratio_empirical,
    max_collision_ratio_exact, max_continual_collision, CollisionRatio, ContinualCollision,
    ExtendedCount, MetricsError, MetricsReport,
};
pub use num_rational::Ratio;
pub use patterns::{
    digits, Coord, FrameStructure, HoppingPattern, InitialMap, LogicalResource, Partition,
    PatternError, PatternKind, PatternSpec,
};
pub use sim::{drop_ues, run, LinkMode, PathLoss, SimConfig, SimError, SimResult, Simulation, Ue};
pub use table::{read_table, RowCheck, TableEntry, TableError, TableRow, PRIMITIVE_TABLE};
