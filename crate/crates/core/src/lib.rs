pub mod bigphase;
pub mod cli;
pub mod constraints;
pub mod correlators;
pub mod diffop;
pub mod exactnum;
pub mod fock;
pub mod model;
pub mod symfun;
