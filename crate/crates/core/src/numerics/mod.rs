//! Dense numeric kernels: symmetric eigendecomposition, simplex LP,
//! exact-fill max-flow and the secular-equation root finder.

pub mod eigen;
pub mod flow;
pub mod lp;
pub mod matrix;
pub mod secular;

pub use eigen::{leading_eigenpair, normalize_sign, sym_eig, EigenDecomposition};
pub use flow::{assign_rows, max_flow_exact_fill, FlowArc, FlowNetwork};
pub use lp::{solve_lp, solve_lp_with, LpProblem, LpResult, LpStatus, Relation, Row};
pub use matrix::{dot, norm2, Matrix, SymMatrix};
pub use secular::{phi, secular_root, secular_root_bisect};
