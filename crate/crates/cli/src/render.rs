//! Output rendering: every command produces one JSON document and one flat
//! table, and the chosen format decides which is written.

use serde_json::Value;

pub struct Table {
    pub columns: Vec<&'static str>,
    pub rows: Vec<Vec<String>>,
}

impl Table {
    pub fn new(columns: Vec<&'static str>) -> Self {
        Table { columns, rows: Vec::new() }
    }

    pub fn row(mut self, cells: Vec<String>) -> Self {
        debug_assert_eq!(cells.len(), self.columns.len());
        self.rows.push(cells);
        self
    }
}

pub struct Document {
    pub json: Value,
    pub table: Table,
}

fn csv_field(raw: &str) -> String {
    if raw.contains([',', '"', '\n']) {
        format!("\"{}\"", raw.replace('"', "\"\""))
    } else {
        raw.to_string()
    }
}

impl Document {
    pub fn render_json(&self) -> String {
        let mut s = serde_json::to_string(&self.json).expect("JSON values serialize");
        s.push('\n');
        s
    }

    pub fn render_csv(&self) -> String {
        let mut out = String::new();
        out.push_str(&self.table.columns.join(","));
        out.push('\n');
        for row in &self.table.rows {
            let fields: Vec<String> = row.iter().map(|c| csv_field(c)).collect();
            out.push_str(&fields.join(","));
            out.push('\n');
        }
        out
    }
}
