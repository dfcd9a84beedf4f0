//! Sieved tables and exact evaluators for `Λ`, `μ`, `φ`, `τ_r`, `P⁻`, `P⁺`.

mod cache;
mod factor;
mod functions;
mod tables;

pub use cache::{load_or_build, read_cache, write_cache, FORMAT_VERSION, MAGIC};
pub use factor::{factorize, gcd, is_prime, lcm, mod_pow, totient, Factorization};
pub use functions::{chebyshev_psi, dirichlet_convolve, tau_r, tau_r_approx, tau_r_with, theta_sum, OverflowMode};
pub use tables::{ArithmeticTables, TableConfig, INFINITE_PRIME};
