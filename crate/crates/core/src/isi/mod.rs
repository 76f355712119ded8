//! Infinite-block (Szegő) versions of the receiver designs for ISI channels.
//!
//! Every banded Toeplitz operator is represented by its symbol
//! `E(ω) = Σ e_k exp(jkω)` and every `∫ dω / 2π` is a mean over a uniform
//! [`QuadratureGrid`]. Prior quality is a scalar `α`, i.e. `P = αI`.

mod method1;
mod method2;
mod method3;
mod props;
mod series;
mod theorem3;

pub use method1::{isi_method1, isi_method1_from, isi_method1_point, IsiMethod1, IsiMethod1Point};
pub use method2::{isi_method2, isi_method2_point, isi_rate_vrg, section_gmi, IsiMethod2, IsiMethod2Point};
pub use method3::{isi_method3, section_wiener_symbols, spectral_m_hat, IsiMethod3, SECTION_K, SECTION_TAPS};
pub use props::{check_method3_band, check_prop6, check_prop8, CoeffMatch};
pub use series::{format_taps, lag_gram, lag_vector, parse_taps, read_taps, write_taps, QuadratureGrid, SpectralSeries};
pub use theorem3::{
    autocorrelation, min_phase_taps, spectral_factor, spectral_mse, theorem3_objective, theorem3_optimal_g,
    SpectralMse, Theorem3,
};
