use crate::error::{Error, Result};

/// Ranks `1..=n` with ties receiving the average of the ranks they span.
#[derive(Debug, Clone, PartialEq)]
pub struct RankVector {
    ranks: Vec<f64>,
    has_ties: bool,
}

impl RankVector {
    pub fn as_slice(&self) -> &[f64] {
        &self.ranks
    }

    pub fn len(&self) -> usize {
        self.ranks.len()
    }

    pub fn is_empty(&self) -> bool {
        self.ranks.is_empty()
    }

    pub fn has_ties(&self) -> bool {
        self.has_ties
    }
}

pub fn ranks(values: &[f64]) -> Result<RankVector> {
    if values.is_empty() {
        return Err(Error::Argument("cannot rank an empty list".into()));
    }
    if let Some(i) = values.iter().position(|v| v.is_nan()) {
        return Err(Error::Argument(format!("value {i} is NaN")));
    }
    let mut order: Vec<usize> = (0..values.len()).collect();
    order.sort_by(|&a, &b| values[a].total_cmp(&values[b]));

    let mut ranks = vec![0.0; values.len()];
    let mut has_ties = false;
    let mut start = 0;
    while start < order.len() {
        let mut end = start + 1;
        while end < order.len() && values[order[end]] == values[order[start]] {
            end += 1;
        }
        has_ties |= end - start > 1;
        // positions start..end hold ranks start+1..=end
        let avg = (start + 1 + end) as f64 / 2.0;
        for &k in &order[start..end] {
            ranks[k] = avg;
        }
        start = end;
    }
    Ok(RankVector { ranks, has_ties })
}
