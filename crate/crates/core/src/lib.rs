//! Maximal-volume seed-set selection for cold-start rating elicitation.
//!
//! The pipeline follows the usual elicitation scheme: factor the warm rating
//! matrix with PureSVD ([`factorization`]), pick a seed set of representative
//! items from the item factors with Square or Rectangular Maxvol ([`maxvol`]),
//! then predict a cold user's full rating row from their ratings on the seed
//! set ([`elicitation`]). [`evaluation`] runs the fold-based cold-start
//! protocol with Precision@k / Recall@k, and [`oracle`] holds slow reference
//! implementations used by tests and the `verify` command.
//!
//! Item cold start is the same problem on the transposed matrix; see
//! [`data::transpose`].

pub mod cli;
pub mod data;
pub mod elicitation;
pub mod error;
pub mod evaluation;
pub mod factorization;
pub mod io;
pub mod linalg;
pub mod maxvol;
pub mod oracle;
pub mod synthetic;
pub mod verify;

pub use data::{
    binarize_relevance, parse_ratings, read_ratings_file, split_folds, transpose, write_triplets, FoldSplit,
    HeaderMode, RatingMatrix, RatingTriplet, RatingsFormat, RelevanceMatrix,
};
pub use elicitation::{
    build_predictor, coefficients_via_factors, coefficients_via_ratings, predict_cold, select_seeds, Predictor,
    PredictorConfig, SeedSize, Selector, Variant,
};
pub use error::{Error, Result};
pub use evaluation::{
    coverage, diversity, evaluate_cold_start, precision_at_k, recall_at_k, sweep, EvalConfig, EvalReport, Evaluator,
    Mode, RankChoice, SweepTable,
};
pub use factorization::{pure_svd, Factorization, SvdOptions, SvdSolver};
pub use maxvol::{
    append_column, lu_pivot_init, rect_maxvol, rect_maxvol_auto, rectangular_volume, square_maxvol, volume_gain,
    CoefficientState, InitStrategy, SeedSet, SquareMaxvolOptions,
};
