pub mod abstract_eval;
pub mod alloc_spec;
pub mod cnf;
pub mod concrete;
pub mod domain;
pub mod formula;
pub mod frontend;
pub mod pipeline;
pub mod sat;
pub mod value;
