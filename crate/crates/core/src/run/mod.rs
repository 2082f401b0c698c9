//! Configuration, persistence, reports and the commands built on them.

pub mod bundle;
pub mod config;
pub mod pipeline;
pub mod report;
pub mod selfcheck;

pub use bundle::{HeadSpec, ModelBundle, FORMAT_VERSION};
pub use config::{parse_override, RunConfig, TaskKind};
pub use pipeline::{
    ablate_in_memory, build_channels, cmd_ablate, cmd_detect_patterns, cmd_eval, cmd_filter_bugs, cmd_gen_clones, cmd_train,
    evaluate, load_dataset, train_in_memory, Dataset, Evaluation,
};
pub use selfcheck::{run_selfcheck, SelfcheckReport};
