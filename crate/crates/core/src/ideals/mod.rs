//! Fractional ideals as exact lattices, prime splitting and principality.

pub mod fp_poly;
pub mod ideal;
pub mod prime;
pub mod principal;

pub use ideal::{conj_ideal, ideal_inv, ideal_mul, ideal_norm, FracIdeal};
pub use prime::{product_above, split_prime, splits_completely_in, PrimeIdeal};
pub use principal::{class_number_imag_quadratic, default_slack, is_principal, real_unit_bound, Principality, DEFAULT_UNIT_SEARCH_DEPTH};
