//! Decides, for an even scale g >= 4 and odd m >= 1, whether the digit set
//! {0, m} admits non-trivial extreme cycles under x -> (x + l)/g, l in
//! {0, m}. Numbers with no such cycle are complete, the rest incomplete;
//! an incomplete number whose proper divisors are all complete is
//! primitive. The crate enumerates cycles with two independent searches,
//! issues theorem-backed certificates with machine-checkable witnesses, and
//! runs the constructions and sweeps that discover primitive numbers.

pub mod arith;
pub mod certificates;
pub mod cycles;
pub mod error;
pub mod search;

pub use arith::{
    divisors, factor, gcd, iota, is_prime, lcm, mod_pow, multiplicative_order,
    order_of_power_product, set_probabilistic_seed, Factorization, OrderProfile,
};
pub use certificates::{
    certify, certify_with, group_generated, CertVerdict, Certificate, CertifyOptions, Rule,
    Witness,
};
pub use cycles::{
    classify, classify_with, coset_check, cycle_point_bound, enumerate_cycles_refine,
    enumerate_cycles_scan, successor, verify_cycle, Classification, ClassifyOptions, DigitWord,
    ExtremeCycle, Instance, SearchAlgorithm, Verdict,
};
pub use error::{Error, Result};
pub use search::{
    conjecture_scan, conjecture_scan_with, construct_from_digits, construct_quotient,
    divisor_sweep, order_catalogue, prime_divisor_orders, repunit, scan_primitives,
    ConjectureReport, Construction, PrimitiveRecord,
};
