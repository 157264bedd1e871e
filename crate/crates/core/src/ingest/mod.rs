//! Dataset ingestion: parsing, validation, partitioning and cleaning.

mod load;
mod partition;
mod record;

pub use load::{load_dataset, required_columns};
pub use partition::{
    apply_partition, compare_with_rest, filter_atypical, filter_iqr_outliers, grouping_report,
    parse_partition_specs, prepare_partition, summarize_distribution, summarize_values,
    DistributionSummary, Exclusion, ExclusionLog, PartitionSpec, GROUPING_ALPHA, MIN_SUMMARY_RECORDS,
};
pub use record::{
    compare_ids, CategoricalField, Dataset, EffortMultipliers, Mode, NumericField, ProjectRecord, Schema,
    EFFORT_MULTIPLIERS, MAX_YEAR, MIN_YEAR,
};
