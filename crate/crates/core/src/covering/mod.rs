//! Direction coverings: bounded Bézout pairs, Dirichlet approximation by
//! lattice directions, effective coverings of the circle and their
//! certification against a field.

mod certify;
mod diophantine;
mod effective;

pub use certify::{
    comb_gcc_certify, CertificateReport, CertifyOptions, CoveringBuilder, EntryResult, LambdaCertificate,
};
pub use diophantine::{bezout_bounded, dirichlet_direction, farey_directions, RationalDirection};
pub use effective::{
    periodic_effective_covering, periodic_lambda0, product_effective_covering, product_lambda0, verify_covering,
    Certificate, CoveringEntry, CoveringReport, EffectiveCovering,
};
