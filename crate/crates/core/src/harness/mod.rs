//! Experiment plumbing: degree-condition audits and seeded campaigns.

pub mod audit;
pub mod campaign;

pub use audit::{lemma_audit, AuditRecord, CompleteHost, EdgeCounter};
pub use campaign::{run_campaign, CampaignConfig, CampaignSummary, TrialReport};
