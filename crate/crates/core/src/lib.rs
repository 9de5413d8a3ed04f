//! Convex and star-shaped risk measures on finite probability spaces,
//! mean-risk optimal boundaries, and primal and dual detection of
//! (strong) risk-measure arbitrage in one-period markets.

// `!(x > 0.0)` also rejects NaN.
#![allow(clippy::neg_cmp_op_on_partial_ord)]

pub mod error;
pub mod ext;
pub mod finite_market;
pub mod fixtures;
pub mod frontier;
pub mod io;
mod linalg;
pub mod lp;
pub mod lses;
pub mod normal;
pub mod pricing;
pub mod recession_dual;
pub mod risk_measures;

pub use error::{Error, Result};
pub use ext::Ext;
pub use finite_market::{
    check_classical_arbitrage, excess_return, portfolio_slice, ArbitrageWitness, FiniteSpace, Market, Portfolio,
    RandVar, Slice,
};
pub use frontier::{
    descent_ray, detect_arbitrage, efficient_frontier, mean_rho_solve, optimal_boundary, rho_inf_1, rho_nu,
    ArbitrageReport, EfficientFrontier, FrontierResult, MeanRhoMode, MeanRhoOutcome, Regime, RhoNu,
};
pub use io::{emit_market, parse_market};
pub use pricing::{price_bounds, PriceInterval, PriceKind};
pub use recession_dual::{
    closure_dual_set, dual_evaluate, dual_set, g_hat_transform, interior_martingale_feasibility,
    martingale_feasibility, numeric_recession_probe, recession_value, Density, DualDomain, DualSetSpec, Penalty,
    Recession,
};
pub use risk_measures::{evaluate, Family, LossFunction, RiskSpec, TargetProfile};
