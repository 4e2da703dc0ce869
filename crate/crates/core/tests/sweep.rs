use proptest::prelude::*;
use refsat::satcoeff::{Family, QStrategy, ReferenceProblem};
use refsat::sweep::{
    from_csv, run_sweep, to_csv, to_markdown, CellStatus, OutputFormat, SweepConfig, SweepRow, CSV_HEADER,
    DEFAULT_BUDGET_SECONDS,
};
use refsat::table::{parse_published, published_table, reproduce_table};

const SMALL: &str = r#"
strategies = ["plus-four", "double"]
p_values = [2, 3]
r_factors = [2, 4]
problems = ["E1", "F4", "C"]
record_timing = false
"#;

#[test]
fn config_defaults_and_order() {
    let config = SweepConfig::from_toml(SMALL).unwrap();
    assert_eq!(config.format, OutputFormat::Csv);
    assert_eq!(config.budget_seconds, Some(DEFAULT_BUDGET_SECONDS));
    assert_eq!(config.strategies, [QStrategy::PlusFour, QStrategy::Double]);
    let specs = config.specs();
    assert_eq!(specs.len(), 3 * 2 * 2 * 2);
    assert_eq!(specs[0], ReferenceProblem::E1.spec(2, 6, 12));
    assert_eq!(specs[1], ReferenceProblem::E1.spec(2, 6, 24));
    assert_eq!(specs[2], ReferenceProblem::E1.spec(3, 7, 14));
    assert_eq!(specs[4], ReferenceProblem::E1.spec(2, 4, 8));
    assert_eq!(specs[8].family, Family::B);

    let all = SweepConfig::from_toml("strategies = [\"double\"]\np_values = [4]").unwrap();
    assert_eq!(all.problems, ReferenceProblem::ALL);
    assert_eq!(all.r_factors, [2]);
    assert!(all.record_timing);
}

#[test]
fn bad_configs_are_rejected() {
    for text in [
        "strategies = [\"double\"]\np_values = [4]\nr_factors = [3]",
        "strategies = [\"double\"]\np_values = []",
        "strategies = [\"triple\"]\np_values = [4]",
        "strategies = [\"double\"]\np_values = [4]\nproblems = [\"E9\"]",
        "strategies = [\"double\"]\np_values = [4]\nformat = \"xml\"",
        "strategies = [\"double\"]\np_values = [4]\ncolour = 1",
        "strategies = [\"double\"]\np_values = [4]\nbudget_seconds = -1",
        "p_values = [4]",
        "not toml at all [",
    ] {
        assert!(SweepConfig::from_toml(text).is_err(), "{text}");
    }
}

#[test]
fn untimed_sweeps_are_byte_identical() {
    let config = SweepConfig::from_toml(SMALL).unwrap();
    let first = to_csv(&run_sweep(&config).unwrap()).unwrap();
    let second = to_csv(&run_sweep(&config).unwrap()).unwrap();
    assert_eq!(first, second);
    assert!(first.starts_with(&CSV_HEADER.join(",")));
    assert_eq!(first.lines().count(), 1 + 24);
}

#[test]
fn sweep_rows_carry_dimensions_and_values() {
    let config = SweepConfig::from_toml(SMALL).unwrap();
    let rows = run_sweep(&config).unwrap();
    for row in &rows {
        assert_eq!(row.status, CellStatus::Ok, "{row:?}");
        assert!(row.mu.unwrap() >= 1.0 - 1e-10);
        assert_eq!(row.wall_seconds, 0.0);
    }
    let e1 = &rows[0];
    assert_eq!((e1.edge_class.as_str(), e1.p, e1.q, e1.r), ("E1", 2, 6, 12));
    assert_eq!((e1.dim_h, e1.dim_v, e1.dim_f), (12 * 13, 6 * 7, 9));
    let c = rows.iter().find(|r| r.family == Family::C).unwrap();
    assert_eq!(c.dim_h, (c.r + 1) * (c.r + 1) - 1);
    assert_eq!(c.dim_f, c.p);
}

#[test]
fn failures_and_budget_overruns_become_statuses() {
    let ill_posed = SweepConfig::from_toml(
        "strategies = [\"plus-ceil-p7\"]\np_values = [4]\nproblems = [\"E5\"]\nrecord_timing = false",
    )
    .unwrap();
    let rows = run_sweep(&ill_posed).unwrap();
    assert!(matches!(rows[0].status, CellStatus::Failed(_)), "{:?}", rows[0].status);
    assert_eq!(rows[0].mu, None);

    let mut tight = SweepConfig::from_toml(SMALL).unwrap();
    tight.budget_seconds = Some(1e-9);
    let rows = run_sweep(&tight).unwrap();
    assert!(rows.iter().all(|r| r.status == CellStatus::Skipped));
    let csv = to_csv(&rows).unwrap();
    assert!(csv.lines().skip(1).all(|l| l.contains(",---,") && l.ends_with(",skipped")));
}

#[test]
fn markdown_has_one_line_per_row() {
    let config = SweepConfig::from_toml(SMALL).unwrap();
    let rows = run_sweep(&config).unwrap();
    let md = to_markdown(&rows);
    assert_eq!(md.lines().count(), rows.len() + 2);
    assert!(md.lines().all(|l| l.starts_with('|') && l.ends_with('|')));
}

fn row() -> impl Strategy<Value = SweepRow> {
    (
        prop::sample::select(ReferenceProblem::ALL.to_vec()),
        1usize..200,
        prop::option::of(1.0f64..3.0),
        0.0f64..1e4,
        prop::sample::select(vec![CellStatus::Ok, CellStatus::Skipped, CellStatus::Failed("ill, \"posed\"".into())]),
        (0usize..100_000, 0usize..100_000, 0usize..1000),
    )
        .prop_map(|(problem, p, mu, wall_seconds, status, (dim_h, dim_v, dim_f))| SweepRow {
            family: problem.family(),
            edge_class: problem.name().to_string(),
            p,
            q: 2 * p,
            r: 4 * p,
            mu,
            dim_h,
            dim_v,
            dim_f,
            wall_seconds,
            status,
        })
}

proptest! {
    #[test]
    fn csv_round_trips(rows in prop::collection::vec(row(), 0..20)) {
        let text = to_csv(&rows).unwrap();
        prop_assert_eq!(from_csv(&text).unwrap(), rows);
    }
}

#[test]
fn csv_parse_errors() {
    assert!(from_csv("a,b,c\n1,2,3\n").is_err());
    let bad = format!("{}\nA,E1,x,8,16,1.0,1.0000,1,1,1,0,ok\n", CSV_HEADER.join(","));
    assert!(from_csv(&bad).is_err());
}

#[test]
fn published_table_shape() {
    let table = published_table();
    assert_eq!(table.len(), 224);
    assert_eq!(table.iter().filter(|c| c.value.is_none()).count(), 47);
    let f4 = table
        .iter()
        .find(|c| c.problem == ReferenceProblem::F4 && c.strategy == QStrategy::PlusFour && c.p == 4 && c.r_factor == 2)
        .unwrap();
    assert_eq!((f4.q, f4.r, f4.value), (8, 16, Some(1.0346)));
    assert!(parse_published("strategy,problem,p,q,r_factor,r,value\ndouble,E1,4,9,2,18,1.0\n").is_err());
}

#[test]
fn smallest_published_cells_reproduce() {
    let report = reproduce_table(4, 2e-4, None).unwrap();
    assert!(report.rows.len() >= 20);
    assert!(report.passes(), "max difference {}", report.max_difference());
    assert!(reproduce_table(4, 0.0, None).is_err());
}
