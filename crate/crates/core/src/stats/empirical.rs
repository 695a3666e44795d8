use super::rank::{ranks, RankVector};
use super::Sample;
use crate::copula::UnitPoint;
use crate::error::{Error, Result};

/// Empirical copula `C_n(u, v) = (1/n) #{ i : R_i/n <= u, S_i/n <= v }`
/// built from the (average) ranks of a sample.
#[derive(Debug, Clone, PartialEq)]
pub struct EmpiricalCopula {
    rx: RankVector,
    ry: RankVector,
}

impl EmpiricalCopula {
    pub fn n(&self) -> usize {
        self.rx.len()
    }

    pub fn ranks_x(&self) -> &RankVector {
        &self.rx
    }

    pub fn ranks_y(&self) -> &RankVector {
        &self.ry
    }

    pub fn eval(&self, p: UnitPoint) -> f64 {
        let n = self.n() as f64;
        let count = self
            .rx
            .as_slice()
            .iter()
            .zip(self.ry.as_slice())
            .filter(|(r, s)| **r / n <= p.u && **s / n <= p.v)
            .count();
        count as f64 / n
    }

    /// Points bucketed by lattice cell: entry `k` holds the 1-based lattice
    /// indices `(ceil R_k, ceil S_k)`. `R_k/n <= i/n` iff `ceil R_k <= i`.
    fn cells(&self) -> Vec<(usize, usize)> {
        self.rx
            .as_slice()
            .iter()
            .zip(self.ry.as_slice())
            .map(|(r, s)| (r.ceil() as usize, s.ceil() as usize))
            .collect()
    }
}

pub fn empirical_copula(s: &Sample) -> Result<EmpiricalCopula> {
    Ok(EmpiricalCopula { rx: ranks(s.x())?, ry: ranks(s.y())? })
}

/// `max |a(i/n, j/n) - b(i/n, j/n)|` over the lattice `1 <= i, j <= n`.
///
/// Runs in `O(n²)` time and `O(n)` memory by sweeping lattice rows and
/// keeping per-column counts for both copulas.
pub fn empirical_copula_distance(a: &EmpiricalCopula, b: &EmpiricalCopula) -> Result<f64> {
    let n = a.n();
    if b.n() != n {
        return Err(Error::Argument(format!("sample sizes differ: {n} vs {}", b.n())));
    }
    let mut rows_a = vec![Vec::new(); n + 1];
    let mut rows_b = vec![Vec::new(); n + 1];
    for (i, j) in a.cells() {
        rows_a[i].push(j);
    }
    for (i, j) in b.cells() {
        rows_b[i].push(j);
    }

    let nf = n as f64;
    let mut col_a = vec![0usize; n + 1];
    let mut col_b = vec![0usize; n + 1];
    let mut worst = 0.0f64;
    for i in 1..=n {
        rows_a[i].iter().for_each(|&j| col_a[j] += 1);
        rows_b[i].iter().for_each(|&j| col_b[j] += 1);
        let (mut ca, mut cb) = (0usize, 0usize);
        for j in 1..=n {
            ca += col_a[j];
            cb += col_b[j];
            if ca != cb {
                worst = worst.max((ca as f64 / nf - cb as f64 / nf).abs());
            }
        }
    }
    Ok(worst)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn ec(pairs: &[(f64, f64)]) -> EmpiricalCopula {
        empirical_copula(&Sample::from_pairs(pairs).unwrap()).unwrap()
    }

    fn at(u: f64, v: f64) -> UnitPoint {
        UnitPoint::new(u, v).unwrap()
    }

    #[test]
    fn evaluation_examples() {
        let diag = ec(&[(1.0, 1.0), (2.0, 2.0)]);
        assert_eq!(diag.eval(at(0.5, 0.5)), 0.5);
        assert_eq!(diag.eval(at(1.0, 1.0)), 1.0);
        let anti = ec(&[(1.0, 2.0), (2.0, 1.0)]);
        assert_eq!(anti.eval(at(0.5, 0.5)), 0.0);
        assert_eq!(anti.eval(at(0.0, 1.0)), 0.0);
    }

    #[test]
    fn distance_examples() {
        let diag = ec(&[(1.0, 1.0), (2.0, 2.0)]);
        let anti = ec(&[(1.0, 2.0), (2.0, 1.0)]);
        assert_eq!(empirical_copula_distance(&diag, &diag).unwrap(), 0.0);
        assert_eq!(empirical_copula_distance(&diag, &anti).unwrap(), 0.5);
        let three = ec(&[(1.0, 1.0), (2.0, 2.0), (3.0, 3.0)]);
        assert!(empirical_copula_distance(&diag, &three).is_err());
    }

    #[test]
    fn ties_use_average_ranks() {
        // ranks x = (1.5, 1.5, 3): neither tied point is counted at u = 1/3
        let c = ec(&[(0.0, 0.0), (0.0, 1.0), (1.0, 2.0)]);
        assert_eq!(c.eval(at(1.0 / 3.0, 1.0)), 0.0);
        assert_eq!(c.eval(at(2.0 / 3.0, 1.0)), 2.0 / 3.0);
        assert_eq!(c.eval(at(1.0, 1.0)), 1.0);
    }
}
