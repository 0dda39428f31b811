//! Dataset assembly: simulated corpora, ingestion of labelled image/mask
//! folders, splits, cross-validation folds and manifests.

mod ingest;
mod io;
mod manifest;
mod seed;
mod sim;
mod split;

pub use ingest::{discover_pairs, ingest_labeled_corpus, PairNaming};
pub use io::{quantize, read_gray, read_mask, write_gray, write_mask};
pub use manifest::{
    DatasetKind, DatasetManifest, ManifestEntry, SimulationConfig, Split, SplitCounts,
    SubsampleRecord, MANIFEST_FILE,
};
pub use seed::{derive_seed, splitmix64, stream_seed};
pub use sim::{generate_sim_dataset, sim_id, SimOptions, IMAGE_DIR};
pub use split::{make_folds, subsample, FoldPlan, SplitPolicy, SplitRule};
