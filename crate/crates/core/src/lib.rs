//! Many-to-one mappings over finite fields.
//!
//! `galois` supplies table-driven arithmetic in GF(p^n); `multiplicity` decides
//! m-to-1 verdicts for explicit maps; `criteria` checks the local criterion and
//! its constructions on finite models; `cyclotomic` predicts verdicts for maps of
//! the form x^r h(x^s); `unitline` handles rational maps on the unit circle
//! U_{q+1} and the projective line over F_q.

pub mod arith;
pub mod criteria;
pub mod cyclotomic;
mod error;
pub mod galois;
pub mod multiplicity;
pub mod unitline;

pub use error::{Error, Result};
pub use galois::{build_field, Elem, FieldSpec, GaloisField, Poly};
pub use multiplicity::{check_m_to_1, FiniteMapping, Mto1Report};
