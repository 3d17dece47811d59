use serde::{Deserialize, Serialize};

use crate::Label;

/// Brute-force k-nearest-neighbor vote over stored training rows.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct KnnModel {
    pub k: usize,
    pub rows: Vec<Vec<f64>>,
    pub labels: Vec<Label>,
}

fn squared_distance(a: &[f64], b: &[f64]) -> f64 {
    a.iter().zip(b).map(|(x, y)| (x - y) * (x - y)).sum()
}

impl KnnModel {
    pub fn fit(rows: &[Vec<f64>], labels: &[Label], k: usize) -> Self {
        Self {
            k,
            rows: rows.to_vec(),
            labels: labels.to_vec(),
        }
    }

    /// Training-row indices of the nearest neighbors, closest first.
    /// Distance ties go to the lower row index.
    pub fn neighbors(&self, x: &[f64]) -> Vec<usize> {
        let mut d: Vec<(f64, usize)> = self
            .rows
            .iter()
            .enumerate()
            .map(|(i, r)| (squared_distance(r, x), i))
            .collect();
        let k = self.k.min(d.len());
        let by_distance =
            |a: &(f64, usize), b: &(f64, usize)| a.0.total_cmp(&b.0).then(a.1.cmp(&b.1));
        if k < d.len() {
            d.select_nth_unstable_by(k - 1, by_distance);
            d.truncate(k);
        }
        d.sort_unstable_by(by_distance);
        d.into_iter().map(|(_, i)| i).collect()
    }

    fn votes_for_one(&self, nn: &[usize]) -> usize {
        nn.iter().filter(|&&i| self.labels[i] == 1).count()
    }

    pub fn predict(&self, x: &[f64]) -> Label {
        let nn = self.neighbors(x);
        let ones = self.votes_for_one(&nn);
        let zeros = nn.len() - ones;
        match ones.cmp(&zeros) {
            std::cmp::Ordering::Greater => 1,
            std::cmp::Ordering::Less => 0,
            std::cmp::Ordering::Equal => self.labels[nn[0]],
        }
    }

    pub fn score(&self, x: &[f64]) -> f64 {
        let nn = self.neighbors(x);
        self.votes_for_one(&nn) as f64 / nn.len() as f64
    }
}
