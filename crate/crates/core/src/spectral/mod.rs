mod basis;
mod chardet;
mod scan;
mod specq;
mod xmatrix;

pub use basis::{Branch, EigenBasis};
pub use chardet::{char_det, char_det_y, char_eval, char_matrix, CharEval};
pub use scan::{
    eigenfunction, eigenfunction_at, scan_real_spectrum, scan_real_spectrum_with, search_complex_spectrum, spectral_point_at,
    ScanOptions, ScanReport, ScanWarning, SpectralPoint,
};
pub use specq::{spec_q, SpecQ};
pub use xmatrix::{
    column_shifts, eigen_matrix, p_matrix, p_minus, p_n, p_plus, x_closed, x_closed_shifted, x_degenerate, x_direct, x_matrix,
    y_matrix, EigenMatrix, SINGULAR_X_TOL,
};
pub(crate) use xmatrix::{x_pair_balanced, y_for_basis};
