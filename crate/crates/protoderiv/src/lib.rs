//! Sparse sequence-space toolkit built around a norm-radial bump-sum
//! operator with unusual variational behavior.
//!
//! The operator `T(x) = sum_n f_n(||x||) e_n` stacks piecewise-linear bumps
//! `f_n` supported on dyadic annuli, so any input touches at most three
//! output coordinates. Despite being Lipschitz with constant `sqrt(17)/2`
//! and bounded below by `||x||/2` on the unit ball, it concentrates all of
//! its action near zero in a way that breaks several classical regularity
//! properties of the monotone perturbations `B = Id + alpha*T`:
//!
//! * the graph rescalings `B_m(x) = m*B(x/m)` converge graphically to the
//!   operator whose graph is the single pair `(0, 0)` — a monotone operator
//!   that is not maximally monotone ([`limits`]);
//! * the resolvent `(Id + B)^{-1}` is globally Lipschitz yet fails to be
//!   directionally differentiable at the origin, which the dyadic
//!   difference-quotient probe exhibits as bounded-below oscillation
//!   ([`resolvent`]).
//!
//! Modules:
//!
//! * [`seqspace`]: canonical sparse vectors with unbounded indices and
//!   deterministic arithmetic;
//! * [`bumps`]: the bump family, one-sided slopes, and active-window lookup;
//! * [`operators`]: the operator catalog, evaluation, Lipschitz and
//!   monotonicity measurements, and sampled certificates;
//! * [`resolvent`]: certified resolvent solves, the differentiability probe,
//!   and the finite-step quotient identity;
//! * [`limits`]: graphical-limit mechanism diagnostics and finite-step graph
//!   quotients;
//! * [`dyadic`]: exact power-of-two helpers and ulp distances;
//! * [`sampling`]: seeded sparse-vector generators.
//!
//! All computations are deterministic: randomized drivers take explicit
//! seeds, and iteration order over vector entries is always ascending by
//! index.

pub mod bumps;
pub mod dyadic;
pub mod error;
pub mod limits;
pub mod operators;
pub mod resolvent;
pub mod sampling;
pub mod seqspace;

pub use error::Error;
pub use operators::{GraphPoint, OperatorSpec};
pub use resolvent::{QuotientTrace, SolveReport, Verdict};
pub use seqspace::SparseVec;
