pub mod aiger;
pub mod certify;
pub mod check;
pub mod cnf;
pub mod engines;
pub mod error;
pub mod experiment;
pub mod family;
pub mod formula;
pub mod itp;
pub mod kavy;
pub mod oracle;
pub mod par;
pub mod pdr;
pub mod sat;
pub mod state;
pub mod trace;
