pub mod denseness;
pub mod error;
pub mod oracle;
pub mod padic;
pub mod poly;
pub mod primes;
pub mod roots;
mod serde_util;
pub mod waring;
pub mod witness;
