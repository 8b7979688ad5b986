//! Special functions, entropy and seeded sampling shared by every other module.

mod entropy;
mod gamma;
mod marcum;
mod rng;

pub use entropy::{binary_entropy, binary_entropy_from_log_odds};
pub use gamma::{inv_reg_gamma_upper, ln_gamma, reg_gamma_lower, reg_gamma_upper};
pub use marcum::{ln_chi2_pdf, ln_ncx2_pdf, marcum_q};
pub use rng::{sample_central_chi2, sample_chi2, sample_gaussian, SimRng};
