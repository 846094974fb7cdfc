//! Community concentration and social reinforcement measures.
//!
//! All per-meme measures are meant to be evaluated on the early stage of a
//! trace ([`early_stage`], first 50 tweets by default) so that popular memes
//! are not favoured by their length. Entropies use the natural log.

mod binning;
mod concentration;
mod exposure;
mod filter;
mod flow;
mod report;

pub use binning::{binned_curve, write_binned_csv, BinRow};
pub use concentration::{
    adoption_dominance, adoption_entropy, early_stage, entropy_of_counts, usage_dominance, usage_entropy,
    Dominance, DEFAULT_EARLY_STAGE,
};
pub use exposure::{average_exposures, ExposureMode};
pub use filter::{new_meme_filter, NEW_MEME_THRESHOLD};
pub use flow::{community_flow, CommunityFlow, CommunityFlowReport, FlowSummary, UserFocus};
pub use report::{
    raw_metrics, relative_report, write_reports_csv, ConcentrationReport, M1Baseline, RawMetrics, REPORT_HEADER,
};
