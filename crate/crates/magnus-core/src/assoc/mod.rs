//! The Stasheff complex `K_{p+1}`: bracketing cells with signed face maps,
//! the signed eta-word cochain `Y`, and its exact verification on a
//! truncated Maurer-Cartan model.

mod cell;
mod eta;
mod eval;

pub use cell::{boundary_chain, cells, face_map, face_sign, AssocCell, SignedCell};
pub use eta::{all_peeling_terms, y_cochain, EtaTerm};
pub use eval::{
    d_of_form, evaluate_form, f_vector, f_vector_oracle, verify_cocycle, CellCheck, CocycleReport,
    MCModel,
};
