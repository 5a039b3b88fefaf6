//! Live play and command-line harness on top of `coord_core`.
//!
//! [`session::SessionManager`] owns running games; [`server::router`] exposes
//! them over HTTP with a resumable event stream; [`cli`] backs the binary.

pub mod cli;
pub mod server;
pub mod session;
pub mod view;
