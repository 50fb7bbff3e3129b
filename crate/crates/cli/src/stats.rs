use serde::Serialize;

#[derive(Debug, Clone, Serialize, PartialEq)]
pub struct Histogram {
    /// `bins + 1` edges over [0, 1]; the last bin is closed.
    pub edges: Vec<f64>,
    pub counts: Vec<usize>,
}

#[derive(Debug, Clone, Serialize, PartialEq)]
pub struct Summary {
    pub count: usize,
    pub min: f64,
    pub max: f64,
    pub mean: f64,
    pub median: f64,
    /// Number of values exactly equal to 1.
    pub exact: usize,
    pub histogram: Histogram,
}

/// Statistics of ratios in [0, 1]. Values are summed in input order.
pub fn summarize(values: &[f64], bins: usize) -> Summary {
    let mut sorted = values.to_vec();
    sorted.sort_by(f64::total_cmp);
    let count = values.len();
    let median = match count {
        0 => f64::NAN,
        c if c % 2 == 1 => sorted[c / 2],
        c => 0.5 * (sorted[c / 2 - 1] + sorted[c / 2]),
    };
    let bins = bins.max(1);
    let mut counts = vec![0; bins];
    for &v in values {
        let b = ((v.clamp(0.0, 1.0) * bins as f64) as usize).min(bins - 1);
        counts[b] += 1;
    }
    Summary {
        count,
        min: sorted.first().copied().unwrap_or(f64::NAN),
        max: sorted.last().copied().unwrap_or(f64::NAN),
        mean: values.iter().sum::<f64>() / count as f64,
        median,
        exact: values.iter().filter(|&&v| v == 1.0).count(),
        histogram: Histogram { edges: (0..=bins).map(|b| b as f64 / bins as f64).collect(), counts },
    }
}
