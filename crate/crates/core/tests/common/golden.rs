//! Report layouts checked against the files in tests/golden.

use std::fs;
use std::path::Path;

use supplynet::sim::slug;

pub const CELL_SCHEMA: &str = include_str!("../golden/cell.schema");
pub const SUITE_SCHEMA: &str = include_str!("../golden/suite.schema");
pub const TOP_K: usize = 5;

struct Section {
    file: String,
    header: Option<String>,
    column: Option<Vec<String>>,
    keys: Option<Vec<String>>,
}

fn parse_schema(text: &str, policy: &str) -> Vec<Section> {
    let mut out: Vec<Section> = Vec::new();
    for line in text.lines().filter(|l| !l.trim().is_empty()) {
        if let Some(name) = line.strip_prefix('[').and_then(|l| l.strip_suffix(']')) {
            out.push(Section {
                file: name.into(),
                header: None,
                column: None,
                keys: None,
            });
            continue;
        }
        let sec = out.last_mut().expect("schema starts with a section");
        let list = |v: &str| v.split(';').map(str::to_string).collect::<Vec<_>>();
        if let Some(v) = line.strip_prefix("header: ") {
            sec.header = Some(v.replace("{policy}", policy));
        } else if let Some(v) = line.strip_prefix("column: ") {
            sec.column = Some(list(v));
        } else if let Some(v) = line.strip_prefix("keys: ") {
            sec.keys = Some(list(v));
        } else {
            panic!("bad schema line {line:?}");
        }
    }
    out
}

fn read_csv(path: &Path) -> Result<(String, Vec<Vec<String>>), String> {
    let mut rdr = csv::Reader::from_path(path).map_err(|e| format!("{}: {e}", path.display()))?;
    let header = rdr
        .headers()
        .map_err(|e| e.to_string())?
        .iter()
        .collect::<Vec<_>>()
        .join(",");
    let rows = rdr
        .records()
        .map(|r| {
            r.map(|r| r.iter().map(str::to_string).collect())
                .map_err(|e| e.to_string())
        })
        .collect::<Result<_, _>>()?;
    Ok((header, rows))
}

fn check_against(dir: &Path, schema: &str, policy: &str, problems: &mut Vec<String>) {
    for sec in parse_schema(schema, policy) {
        let path = dir.join(&sec.file);
        if !path.is_file() {
            problems.push(format!("missing {}", path.display()));
            continue;
        }
        if let Some(keys) = &sec.keys {
            let v: serde_json::Value = match fs::read(&path)
                .map_err(|e| e.to_string())
                .and_then(|b| serde_json::from_slice(&b).map_err(|e| e.to_string()))
            {
                Ok(v) => v,
                Err(e) => {
                    problems.push(format!("{}: {e}", path.display()));
                    continue;
                }
            };
            let mut got: Vec<String> = v
                .as_object()
                .map(|o| o.keys().cloned().collect())
                .unwrap_or_default();
            got.sort();
            if &got != keys {
                problems.push(format!("{}: keys {got:?}", path.display()));
            }
            continue;
        }
        let (header, rows) = match read_csv(&path) {
            Ok(x) => x,
            Err(e) => {
                problems.push(e);
                continue;
            }
        };
        if Some(&header) != sec.header.as_ref() {
            problems.push(format!("{}: header {header:?}", path.display()));
        }
        if let Some(col) = &sec.column {
            let got: Vec<String> = rows.iter().map(|r| r[0].clone()).collect();
            if &got != col {
                problems.push(format!("{}: first column {got:?}", path.display()));
            }
        }
        for (i, row) in rows.iter().enumerate() {
            let numeric = match sec.file.as_str() {
                "vulnerable_industries.csv"
                | "affected_by_industry.csv"
                | "affected_by_country.csv" => vec![row.len() - 1],
                "vulnerable_products.csv" => vec![0, 4],
                "summary.csv" | "substitutability.csv" => (2..row.len()).collect(),
                _ => (1..row.len()).collect(),
            };
            for j in numeric {
                if row[j] != "NA" && row[j].parse::<f64>().is_err() {
                    problems.push(format!(
                        "{}:{}: {:?} is not a number",
                        path.display(),
                        i + 2,
                        row[j]
                    ));
                }
            }
        }
        if sec.file.starts_with("vulnerable_") {
            if rows.len() > TOP_K {
                problems.push(format!("{}: {} rows", path.display(), rows.len()));
            }
            let ranks: Vec<String> = rows.iter().map(|r| r[0].clone()).collect();
            let expected: Vec<String> = (1..=rows.len()).map(|i| i.to_string()).collect();
            if ranks != expected {
                problems.push(format!("{}: ranks {ranks:?}", path.display()));
            }
        }
        if sec.file == "boxplot.csv" {
            for row in &rows {
                let v: Vec<f64> = row[1..].iter().filter_map(|x| x.parse().ok()).collect();
                if v.windows(2).any(|w| w[0] > w[1]) {
                    problems.push(format!(
                        "{}: unordered quartiles in {row:?}",
                        path.display()
                    ));
                }
            }
        }
    }
}

/// All problems found in a `simulate` output directory of the standard suite.
pub fn check_suite_dir(out: &Path) -> Vec<String> {
    let mut problems = Vec::new();
    check_against(out, SUITE_SCHEMA, "", &mut problems);
    for cluster in [
        "American",
        "European",
        "Asian",
        "Low Risk",
        "Low & Medium Risk",
    ] {
        for policy in ["Country+1", "Friendshoring", "Reshoring"] {
            let dir = out.join(slug(&format!("{cluster} {policy}")));
            check_against(&dir, CELL_SCHEMA, policy, &mut problems);
        }
    }
    problems
}

/// Problems in one scenario directory.
pub fn check_cell_dir(dir: &Path, policy_label: &str) -> Vec<String> {
    let mut problems = Vec::new();
    check_against(dir, CELL_SCHEMA, policy_label, &mut problems);
    problems
}
