//! A MIR-lite to ULLBC/LLBC middle-end: parsing, cleanup passes, control-flow
//! restructuring, trait resolution, serialization and a taint analysis.

pub mod cfg;
pub mod driver;
pub mod frontend;
pub mod interp;
pub mod ir;
pub mod passes;
pub mod serialize;
pub mod taint;
pub mod traits;
