//! `sxgraph` — spectral machinery for (q+1)-regular multigraphs.
//!
//! The library studies how far a finite (q+1)-regular multigraph is from its
//! universal cover, the (q+1)-regular tree, through four interlocking lenses:
//!
//! * **spectral** — eigenvalues of the normalized adjacency operator,
//!   annotated with the p-value / θ parametrization used in the Sarnak–Xue
//!   density condition ([`spectral`]);
//! * **hecke** — non-backtracking path counts and the Hecke-operator
//!   recursion that ties them to the spectrum ([`hecke`]);
//! * **zeta** — closed non-backtracking cycle counts via the Hashimoto edge
//!   operator, i.e. the coefficients of the Ihara zeta function ([`zeta`]);
//! * **walks** — simple-random-walk mixing profiles, cutoff windows, and
//!   almost-diameter statistics ([`walks`]).
//!
//! Graphs come from [`groups`] + [`graph`]: Cayley and Schreier graphs of
//! `SL2(F_t)` acting on itself or on the projective line, LPS-style
//! quaternion generator sets, uniform random regular multigraphs, and a few
//! small fixed presets. Everything is exact enough to cross-validate: each
//! spectral identity has a combinatorial counterpart and the test-suite
//! checks them against each other.
//!
//! The `sxgraph` binary (see `src/bin/sxgraph.rs`) exposes construction,
//! analysis, and frozen reproduction experiments on top of this library.

pub mod config;
pub mod error;
pub mod experiments;
pub mod graph;
pub mod groups;
pub mod hecke;
pub mod report;
pub mod spectral;
pub mod walks;
pub mod zeta;

pub use error::{Error, Result};
