//! Exact integer and finite-field linear algebra: Smith normal form,
//! finitely generated abelian groups, homology of bounded complexes, and
//! group homology via Künneth.

mod coefficients;
mod group;
mod homology;
mod matrix;
mod quotient;
mod snf;

pub use coefficients::{Coefficients, ModuleDesc};
pub use group::{cokernel_structure, group_homology, scalar_tensor_tor, FgAbGroup};
pub use homology::{complex_homology, Complex};
pub use matrix::IntMatrix;
pub use quotient::{GroupElem, QuotientGroup};
pub use snf::{
    elementary_divisors, inverse_unimodular, kernel_basis, rank, smith_normal_form, solve,
    SmithForm,
};
