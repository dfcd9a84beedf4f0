//! Shared fixtures for the criterion benches.

use pntap_core::ArithmeticTables;

/// Tables to `limit`, built once per bench binary.
pub fn tables(limit: u64) -> ArithmeticTables {
    ArithmeticTables::build(limit).expect("bench tables")
}
