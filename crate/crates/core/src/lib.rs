//! Exact character-theoretic tooling for rigidity computations.

pub mod arith;
pub mod chartable;
pub mod cli;
pub mod dixon;
pub mod dl_rank1;
pub mod modp;
pub mod regunip;
pub mod rigidity;
pub mod smallgrp;
