//! File formats, sketch manifests, and verification campaigns.

pub mod codefile;
pub mod dataset;
pub mod manifest;
pub mod verify;

/// Version stamped on every binary file and JSON document this crate writes.
pub const FORMAT_VERSION: u32 = 1;

pub use codefile::{decode_codes, encode_codes, load_codes, save_codes, Codes};
pub use dataset::{load_dataset, save_dataset, DatasetFormat, DatasetMatrix};
pub use manifest::{SketchKind, SketchManifest, Sketcher};
pub use verify::{
    error_curve, verify_distance_embedding, verify_inner_product_embedding, CampaignConfig,
    ErrorCurve, VerificationReport,
};
