mod cli_runs;
mod approx_props;
mod exact_props;
mod schemes_stats;
