//! Shared test support: a seeded random formula generator and an
//! independent semantic evaluator for sentences over Q.

#![allow(dead_code)]

pub mod gen;
pub mod oracle;
