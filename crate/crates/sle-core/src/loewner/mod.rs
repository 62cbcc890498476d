//! Radial Loewner machinery: covering flows with derivative jets, exact
//! frozen-driving slit maps, multislit chains, per-curve charts and tracing.

mod charts;
mod jet;
mod multislit;
mod slit;
mod trace;

pub use charts::{tip_jet_estimate, OwnTimeCharts, TipJet, DEFAULT_ZIP_POINTS};
pub use jet::{cot_half_derivs, flow_covering, flow_frozen, DerivativeJet, SWALLOW_THRESHOLD};
pub use multislit::{
    accumulate_m, min_circular_gap, mixed_partial_at_origin, multislit_step, n_coefficient, AngleConfig,
    MultiSlitState, COLLISION_GAP,
};
pub use slit::{Chart, SlitStep};
pub use trace::{common_to_multi_time, joint_chart, trace_curves, write_traces_csv, CurveTrace, JointChart};
