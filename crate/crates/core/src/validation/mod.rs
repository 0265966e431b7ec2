//! Analytic references, convergence and exactness studies, and scenario
//! property checks.

pub mod convergence;
pub mod fit;
pub mod quadrature;
pub mod scenario;
pub mod spheroid;
pub mod taylor;
