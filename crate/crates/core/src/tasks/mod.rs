//! Classification and clone-detection heads, end-to-end training and evaluation,
//! and the synthetic clone-pair generator.

pub mod clones;
pub mod eval;
pub mod heads;
pub mod prepare;
pub mod train;
pub mod variant;

pub use clones::{gen_clone_suite, gen_synthetic_clones, CloneEdit, SyntheticClones};
pub use eval::{eval_classification, eval_clone, ClassificationEval, CloneEval};
pub use heads::{classify, clone_score, ClassifierHead, CloneHead, Head, TaskModel};
pub use prepare::{check_channels, prepare_unit, Channels};
pub use train::{train_task, EpochLog, TaskConfig, TaskData, TrainedTask};
pub use variant::Variant;
