//! Test oracles shared by the integration suites. Everything here is
//! written independently of the code paths it checks.
#![allow(dead_code)]

pub mod designs;
pub mod disjunctive;
pub mod enumerate;
pub mod oracles;
