// SPDX-License-Identifier: Apache-2.0

//! Causal game semantics workbench.
//!
//! The crate builds, from the ground up: finite prime event structures with
//! binary conflict (`es`), replicated Question/Answer arenas (`arena`),
//! causal strategies with composition and the exponential machinery
//! (`strategy`), linearizations into plays (`plays`), semantic conditions
//! such as determinism, innocence and well-bracketing (`conditions`), the
//! interpreter for a higher-order concurrent imperative language (`lang`),
//! and positional collapses of strategies (`positions`).

pub mod arena;
pub mod conditions;
pub mod es;
pub mod interp;
pub mod lang;
pub mod plays;
pub mod positions;
pub mod samples;
pub mod strategy;
