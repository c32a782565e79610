//! Loop code generation for retimed graphs and the metrics reported for it.

mod generate;
mod metrics;
mod program;

pub use generate::{generate_loop_code, generate_loop_code_with_schedule};
pub use metrics::{
    count_code_size, cycle_count, execution_time, iteration_schedule, measure, IterationSchedule, MetricsReport,
    ScheduleEntry, INSTANCE_LIMIT,
};
pub use program::{
    default_loop_vars, default_upper_names, ArrayAccess, Assign, GeneratedProgram, IndexBase, IndexExpr, Item,
    LoopNest, PrintOptions,
};
