//! Tables of `b(n, k)` laid out like the published one: one row per `n`,
//! one column per `k`.
//!
//! A cell is blank when `n < 2k`, `-` when `n >= floor(k(k+1)/2) + 1` (the
//! closed-form range) unless closed-form filling is on, and computed
//! otherwise.

use std::fmt::Write as _;

use bsize_core::{closed_form_threshold, halasi_formula, Error, Result};
use serde::{Deserialize, Serialize};

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum NPolicy {
    /// Rows from `2 k_min` up to `floor(k_max (k_max + 1) / 2)`.
    PaperRange,
    /// Rows from `2 k_min` up to `n_max`.
    UpTo(u32),
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct TableSpec {
    pub k_min: u32,
    pub k_max: u32,
    pub n_policy: NPolicy,
    pub fill_closed_form: bool,
}

impl TableSpec {
    pub fn validate(&self) -> Result<()> {
        if self.k_min == 0 || self.k_min > self.k_max {
            return Err(Error::InvalidArgument(format!(
                "need 1 <= kmin <= kmax, got kmin = {}, kmax = {}",
                self.k_min, self.k_max
            )));
        }
        if self.rows().is_empty() {
            return Err(Error::InvalidArgument(format!(
                "no rows: the table starts at n = {} but ends at n = {}",
                2 * self.k_min,
                self.n_max()
            )));
        }
        Ok(())
    }

    fn n_max(&self) -> u32 {
        match self.n_policy {
            NPolicy::PaperRange => (closed_form_threshold(self.k_max) - 1) as u32,
            NPolicy::UpTo(n) => n,
        }
    }

    pub fn rows(&self) -> std::ops::RangeInclusive<u32> {
        2 * self.k_min..=self.n_max()
    }

    pub fn columns(&self) -> std::ops::RangeInclusive<u32> {
        self.k_min..=self.k_max
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Cell {
    /// `n < 2k`.
    Blank,
    /// Closed-form range, not filled.
    Dash,
    Computed(u32),
    ClosedForm(u32),
}

impl Cell {
    pub fn value(self) -> Option<u32> {
        match self {
            Cell::Computed(b) | Cell::ClosedForm(b) => Some(b),
            _ => None,
        }
    }
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Table {
    pub spec: TableSpec,
    pub rows: Vec<(u32, Vec<Cell>)>,
}

/// Fills a table. `compute(n, ks)` returns `b(n, k)` for each `k` in `ks`,
/// the columns of row `n` outside the closed-form range.
pub fn build(
    spec: TableSpec,
    mut compute: impl FnMut(u32, &[u32]) -> Result<Vec<u32>>,
) -> Result<Table> {
    spec.validate()?;
    let mut rows = Vec::new();
    for n in spec.rows() {
        let wanted: Vec<u32> = spec
            .columns()
            .filter(|&k| n >= 2 * k && u64::from(n) < closed_form_threshold(k))
            .collect();
        let mut values = if wanted.is_empty() {
            Vec::new()
        } else {
            compute(n, &wanted)?
        }
        .into_iter();
        let mut cells = Vec::new();
        for k in spec.columns() {
            let cell = if n < 2 * k {
                Cell::Blank
            } else if u64::from(n) >= closed_form_threshold(k) {
                if spec.fill_closed_form {
                    Cell::ClosedForm(halasi_formula(n, k)?.b)
                } else {
                    Cell::Dash
                }
            } else {
                Cell::Computed(values.next().expect("one value per requested column"))
            };
            cells.push(cell);
        }
        rows.push((n, cells));
    }
    Ok(Table { spec, rows })
}

/// One filled cell, as emitted in CSV and JSON.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct Record {
    pub n: u32,
    pub k: u32,
    pub b: u32,
}

impl Table {
    /// Filled cells in row-major order.
    pub fn records(&self) -> Vec<Record> {
        let mut out = Vec::new();
        for (n, cells) in &self.rows {
            for (k, cell) in self.spec.columns().zip(cells) {
                if let Some(b) = cell.value() {
                    out.push(Record { n: *n, k, b });
                }
            }
        }
        out
    }

    pub fn to_text(&self) -> String {
        let header: Vec<String> = std::iter::once("n\\k".to_string())
            .chain(self.spec.columns().map(|k| k.to_string()))
            .collect();
        let body: Vec<Vec<String>> = self
            .rows
            .iter()
            .map(|(n, cells)| {
                std::iter::once(n.to_string())
                    .chain(cells.iter().map(|c| match c {
                        Cell::Blank => String::new(),
                        Cell::Dash => "-".to_string(),
                        Cell::Computed(b) | Cell::ClosedForm(b) => b.to_string(),
                    }))
                    .collect()
            })
            .collect();
        let widths: Vec<usize> = (0..header.len())
            .map(|i| {
                std::iter::once(&header)
                    .chain(&body)
                    .map(|r| r[i].len())
                    .max()
                    .unwrap_or(0)
            })
            .collect();
        let mut out = String::new();
        for row in std::iter::once(&header).chain(&body) {
            let line: Vec<String> = row
                .iter()
                .zip(&widths)
                .map(|(s, w)| format!("{s:>w$}"))
                .collect();
            let _ = writeln!(out, "{}", line.join(" ").trim_end());
        }
        out
    }
}

pub fn to_csv(records: &[Record]) -> String {
    let mut out = String::from("n,k,b\n");
    for r in records {
        let _ = writeln!(out, "{},{},{}", r.n, r.k, r.b);
    }
    out
}

pub fn parse_csv(text: &str) -> Result<Vec<Record>> {
    let mut lines = text.lines();
    if lines.next() != Some("n,k,b") {
        return Err(Error::InvalidArgument(
            "CSV table must start with the header n,k,b".into(),
        ));
    }
    lines
        .enumerate()
        .map(|(i, line)| {
            let fields: Vec<&str> = line.split(',').collect();
            let parsed: Option<Vec<u32>> = fields.iter().map(|f| f.parse().ok()).collect();
            match parsed.as_deref() {
                Some(&[n, k, b]) => Ok(Record { n, k, b }),
                _ => Err(Error::InvalidArgument(format!(
                    "CSV line {}: {line:?}",
                    i + 2
                ))),
            }
        })
        .collect()
}

pub fn to_json(records: &[Record]) -> String {
    let mut s = serde_json::to_string(records).expect("records serialize");
    s.push('\n');
    s
}

pub fn parse_json(text: &str) -> Result<Vec<Record>> {
    serde_json::from_str(text).map_err(|e| Error::InvalidArgument(format!("JSON table: {e}")))
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    fn paper(k_max: u32) -> TableSpec {
        TableSpec {
            k_min: 3,
            k_max,
            n_policy: NPolicy::PaperRange,
            fill_closed_form: false,
        }
    }

    #[test]
    fn layout_matches_published_shape() {
        let t = build(paper(5), |n, ks| {
            Ok(ks.iter().map(|k| 100 * n + k).collect())
        })
        .unwrap();
        assert_eq!(t.rows.first().unwrap().0, 6);
        assert_eq!(t.rows.last().unwrap().0, 15);
        let row = |n: u32| &t.rows.iter().find(|r| r.0 == n).unwrap().1;
        assert_eq!(row(6), &vec![Cell::Computed(603), Cell::Blank, Cell::Blank]);
        assert_eq!(row(7), &vec![Cell::Dash, Cell::Blank, Cell::Blank]);
        assert_eq!(
            row(10),
            &vec![Cell::Dash, Cell::Computed(1004), Cell::Computed(1005)]
        );
        assert_eq!(row(11), &vec![Cell::Dash, Cell::Dash, Cell::Computed(1105)]);
    }

    #[test]
    fn closed_form_fill() {
        let spec = TableSpec {
            fill_closed_form: true,
            ..paper(4)
        };
        let t = build(spec, |_, ks| Ok(vec![0; ks.len()])).unwrap();
        let row9 = &t.rows.iter().find(|r| r.0 == 9).unwrap().1;
        // ceil(16/4)
        assert_eq!(row9[0], Cell::ClosedForm(4));
    }

    #[test]
    fn explicit_rows() {
        let spec = TableSpec {
            n_policy: NPolicy::UpTo(10),
            ..paper(3)
        };
        let t = build(spec, |_, ks| Ok(vec![3; ks.len()])).unwrap();
        assert_eq!(t.records(), vec![Record { n: 6, k: 3, b: 3 }]);
        assert_eq!(t.rows.len(), 5);
        assert!(t.rows[1..].iter().all(|(_, c)| c == &vec![Cell::Dash]));
    }

    #[test]
    fn bad_specs() {
        assert!(build(
            TableSpec {
                k_min: 4,
                ..paper(3)
            },
            |_, ks| Ok(vec![0; ks.len()])
        )
        .is_err());
        assert!(build(
            TableSpec {
                k_min: 0,
                ..paper(3)
            },
            |_, ks| Ok(vec![0; ks.len()])
        )
        .is_err());
        // floor(2*3/2) = 3 < 4
        assert!(build(
            TableSpec {
                k_min: 2,
                ..paper(2)
            },
            |_, ks| Ok(vec![0; ks.len()])
        )
        .is_err());
    }

    #[test]
    fn text_rendering() {
        let t = build(paper(4), |n, ks| Ok(vec![n - 3; ks.len()])).unwrap();
        assert_eq!(
            t.to_text(),
            "n\\k 3 4\n  6 3\n  7 -\n  8 - 5\n  9 - 6\n 10 - 7\n"
        );
    }

    #[test]
    fn malformed_csv() {
        assert!(parse_csv("n,k\n").is_err());
        assert!(parse_csv("n,k,b\n1,2\n").is_err());
        assert!(parse_csv("n,k,b\n1,2,x\n").is_err());
    }

    proptest! {
        #[test]
        fn emissions_round_trip(cells in prop::collection::vec((0u32..500, 0u32..50, 0u32..100), 0..40)) {
            let records: Vec<Record> = cells.into_iter().map(|(n, k, b)| Record { n, k, b }).collect();
            let csv = to_csv(&records);
            prop_assert_eq!(to_csv(&parse_csv(&csv).unwrap()), csv);
            let json = to_json(&records);
            prop_assert_eq!(to_json(&parse_json(&json).unwrap()), json);
        }
    }
}
