//! Symbolic-numeric toolkit for three-dimensional Walker Lorentzian
//! metrics `g_f` in adapted coordinates `(x, y, x̃)`.
//!
//! The crate provides truncated-Taylor (jet) arithmetic over expression
//! trees, curvature tensors and their covariant derivatives to arbitrary
//! order, curvature-homogeneity classification against the known model
//! spaces, isometry construction and verification, gradient Ricci/Cotton
//! soliton certificates, and geodesic integration with closed-form
//! cross-checks.

pub mod classify;
pub mod config;
pub mod expr;
pub mod frames;
pub mod geodesics;
pub mod jet;
pub mod metric;
pub mod ode;
pub mod solitons;
pub mod tensor;

pub use classify::{
    build_isometry_to_model, classify_sampled, classify_structured, cw_homogeneity_map,
    nb_homogeneity_map, pc_homogeneity_map, verify_isometry, ClassTag, Classification,
    ClassifyError, DomainBox, StructuredFamily, Transform,
};
pub use expr::{Expr2, ExprError, Var};
pub use frames::{
    frame_0, frame_1, kv_frame, kv_weighted_slots, match_model, model_invariants, FrameCoeffs,
    FrameError, ModelRecord, ModelTag,
};
pub use geodesics::{
    blowup_experiment_pc, energy, geodesic_rhs, inner_product, integrate_geodesic,
    integrate_geodesic_with, nb_closed_form, nb_closed_form_deriv, nb_closed_form_residual,
    parallel_transport, pc_phi_closed_form, pc_phi_closed_form_deriv, BlowupReport, BlowupRow,
    GeodesicState, GeodesicTrajectory, TransportSample,
};
pub use jet::{jet_eval, Jet2, JetError, DEFAULT_JET_ORDER};
pub use metric::{
    christoffel, cotton, metric_at, nabla_k_r, nabla_k_r_with_order, recurrence_form, riemann,
    ricci_scalar_schouten, CottonTensors, Geometry, MetricAtPoint, OneForm, WalkerError,
};
pub use solitons::{
    build_cotton_soliton, build_ricci_soliton, derive_hhat_xx, family_constraint_residual,
    hessian, homothety_best_fit, homothety_grid_search, homothety_residual, lie_metric,
    ricci_soliton_residual, verify_soliton, ConsistencyReport, CottonCase, HomothetyFit,
    Potential, RicciCase, SolitonCertificate, SolitonError, SolitonKind, VectorField,
    VectorFieldAnsatz,
};
pub use tensor::{Connection, CovTensor, JetTensor, SymTable, DIM, INDEX_LABELS};
