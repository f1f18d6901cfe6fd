//! File formats, synthetic designs, reports and the staged flow around
//! [`nsplace_core`].

pub mod flow;
pub mod format;
pub mod gen;
pub mod lpfile;
pub mod report;
pub mod svg;
