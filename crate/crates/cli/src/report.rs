//! Report emission: a delimiter-separated table for the terminal and a
//! structured JSON file for downstream tooling.

use crate::harness::SimulationReport;
use std::fmt::Write as _;

pub fn table_header() -> String {
    "delta_s\tmode\tqueries\tquery_err\tjourney_err\thypo_query_err\thypo_journey_err\t\
     infeasible_j\tmedian_detour\tshortcuts_full\tshortcuts_filtered\tphases\t\
     update_s\tsearch_s\tmerge_s\thash\n"
        .to_string()
}

pub fn table_row(r: &SimulationReport) -> String {
    let mut s = String::new();
    let _ = writeln!(
        s,
        "{}\t{}\t{}\t{:.4}\t{:.4}\t{:.4}\t{:.4}\t{}\t{:.4}\t{}\t{}\t{}\t{:.3}\t{:.3}\t{:.3}\t{:#018x}",
        r.delay_limit,
        r.mode,
        r.queries,
        r.query_error_rate(),
        r.journey_error_rate(),
        r.hypo_query_error_rate(),
        r.hypo_journey_error_rate(),
        r.infeasible_journeys,
        r.median_detour,
        r.shortcut_full,
        r.shortcut_filtered_initial,
        r.phases,
        r.mean_update_seconds,
        r.mean_search_seconds,
        r.mean_merge_seconds,
        r.determinism_hash,
    );
    s
}

pub fn write_reports(
    rows: &[SimulationReport],
    table_path: Option<&str>,
    json_path: Option<&str>,
) -> anyhow::Result<String> {
    let mut table = table_header();
    for r in rows {
        table.push_str(&table_row(r));
    }
    if let Some(p) = table_path {
        std::fs::write(p, &table)?;
    }
    if let Some(p) = json_path {
        std::fs::write(p, serde_json::to_string_pretty(rows)?)?;
    }
    Ok(table)
}
