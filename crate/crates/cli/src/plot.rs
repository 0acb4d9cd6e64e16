//! Line charts for rendered outputs.

use groupsim::solve::Rendered;
use groupsim::svg::{line_chart, Series};
use groupsim::ScalarField;

/// Number of inner-axis slices drawn for a 2-D field.
const SLICES: usize = 5;

fn field_series(field: &ScalarField) -> Vec<Series> {
    let axes = field.axes();
    let values = field.values();
    if axes.len() == 1 {
        return vec![Series {
            label: field.label().to_string(),
            x: axes[0].grid.points().to_vec(),
            y: values.to_vec(),
        }];
    }
    let outer = axes[0].grid.points();
    let inner = axes[1].grid.points();
    let n = inner.len();
    let picks = SLICES.min(outer.len());
    (0..picks)
        .map(|k| {
            let i = if picks == 1 {
                0
            } else {
                k * (outer.len() - 1) / (picks - 1)
            };
            Series {
                label: format!("{} {}={}", field.label(), axes[0].name, outer[i]),
                x: inner.to_vec(),
                y: values[i * n..(i + 1) * n].to_vec(),
            }
        })
        .collect()
}

fn x_label(rendered: &Rendered) -> String {
    match rendered {
        Rendered::Fields(fields) => fields
            .first()
            .map(|f| f.axes()[f.axes().len() - 1].name.clone())
            .unwrap_or_default(),
        Rendered::Table { header, .. } => header.first().cloned().unwrap_or_default(),
    }
}

pub fn chart(title: &str, rendered: &Rendered) -> String {
    let series: Vec<Series> = match rendered {
        Rendered::Fields(fields) => fields.iter().flat_map(field_series).collect(),
        Rendered::Table { header, rows } => (1..header.len())
            .map(|c| Series {
                label: header[c].clone(),
                x: rows.iter().map(|r| r[0]).collect(),
                y: rows.iter().map(|r| r[c]).collect(),
            })
            .collect(),
    };
    line_chart(title, &x_label(rendered), &series)
}
