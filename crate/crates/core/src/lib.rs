pub mod effect;
pub mod fj;
pub mod interp;
pub mod region;
pub mod solver;
pub mod check;
