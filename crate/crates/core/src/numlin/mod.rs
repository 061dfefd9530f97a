//! Dense linear-algebra kernels: the matrix type, a symmetric eigensolver,
//! thin SVD, inverse square roots, polar factors, projectors and the
//! projector-distance subspace loss.

mod decomp;
mod eigen;
mod matrix;

pub use decomp::{
    inv_sqrt_psd, orthonormality_defect, polar_orth, projector, spectral_norm_sq, subspace_loss, thin_qr, thin_svd,
    ThinSvd, DEFAULT_RANK_TOL,
};
pub use eigen::{sym_eig, sym_eigenvalues, SymEig};
pub use matrix::DenseMatrix;
