//! Shared job plumbing for the `locusforge` command line and HTTP service.

pub mod jobs;
pub mod server;
