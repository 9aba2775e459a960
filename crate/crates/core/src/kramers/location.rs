//! Concentration of collision locations around the predicted point.

use serde::Serialize;

use super::regression::quantile_sorted;
use crate::point::{self, Point};
use crate::stopping::CollisionRecord;

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct LocationSummary {
    pub n: usize,
    /// Coordinatewise median of the midpoints.
    pub median_midpoint: Point,
    /// Median of `|midpoint - lambda0|`.
    pub median_distance: f64,
    /// Median absolute deviation of `|midpoint - lambda0|`.
    pub mad_distance: f64,
    /// `(delta, share with max(|x - lambda0|, |y - lambda0|) <= delta)`.
    pub within: Vec<(f64, f64)>,
}

pub fn median(values: &[f64]) -> f64 {
    let mut v = values.to_vec();
    v.sort_by(f64::total_cmp);
    quantile_sorted(&v, 0.5)
}

/// Summary over the uncensored records; `None` when there are none.
pub fn location_report(
    records: &[CollisionRecord],
    lambda0: &[f64],
    deltas: &[f64],
) -> Option<LocationSummary> {
    let hits: Vec<(&Point, &Point, &Point)> = records
        .iter()
        .filter(|r| !r.censored)
        .filter_map(|r| Some((r.x_loc.as_ref()?, r.y_loc.as_ref()?, r.midpoint.as_ref()?)))
        .collect();
    if hits.is_empty() {
        return None;
    }
    let d = lambda0.len();
    let median_midpoint = (0..d)
        .map(|k| median(&hits.iter().map(|h| h.2[k]).collect::<Vec<_>>()))
        .collect();
    let dists: Vec<f64> = hits.iter().map(|h| point::dist(h.2, lambda0)).collect();
    let median_distance = median(&dists);
    let mad_distance = median(
        &dists
            .iter()
            .map(|v| (v - median_distance).abs())
            .collect::<Vec<_>>(),
    );
    let spread: Vec<f64> = hits
        .iter()
        .map(|h| point::dist(h.0, lambda0).max(point::dist(h.1, lambda0)))
        .collect();
    let within = deltas
        .iter()
        .map(|&delta| {
            let k = spread.iter().filter(|s| **s <= delta).count();
            (delta, k as f64 / spread.len() as f64)
        })
        .collect();
    Some(LocationSummary {
        n: hits.len(),
        median_midpoint,
        median_distance,
        mad_distance,
        within,
    })
}

/// Share of `times` inside `[exp(2(H - delta)/sigma^2), exp(2(H + delta)/sigma^2)]`.
pub fn window_fraction(times: &[f64], hbar: f64, sigma: f64, delta: f64) -> Option<f64> {
    if times.is_empty() {
        return None;
    }
    let s2 = sigma * sigma;
    let lo = (2.0 * (hbar - delta) / s2).exp();
    let hi = (2.0 * (hbar + delta) / s2).exp();
    let k = times.iter().filter(|t| **t >= lo && **t <= hi).count();
    Some(k as f64 / times.len() as f64)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn rec(x: f64, y: f64) -> CollisionRecord {
        CollisionRecord {
            replicate: 0,
            rule: "eps_collision".into(),
            time: 1.0,
            x_loc: Some(vec![x]),
            y_loc: Some(vec![y]),
            midpoint: Some(vec![0.5 * (x + y)]),
            censored: false,
        }
    }

    #[test]
    fn symmetric_placement_has_zero_deviation() {
        let eps = 0.05;
        let recs = vec![rec(0.3 + eps, 0.3 - eps); 5];
        let s = location_report(&recs, &[0.3], &[0.04, 0.06]).unwrap();
        assert!(s.median_distance.abs() < 1e-15);
        assert_eq!(s.mad_distance, 0.0);
        assert_eq!(s.within, vec![(0.04, 0.0), (0.06, 1.0)]);
    }

    #[test]
    fn censored_records_are_skipped() {
        let recs = vec![CollisionRecord::censored(0, 10.0)];
        assert!(location_report(&recs, &[0.0], &[0.1]).is_none());
    }

    #[test]
    fn window_fraction_grows_with_delta() {
        let times: Vec<f64> = (1..200).map(|i| i as f64 * 0.7).collect();
        let mut last = 0.0;
        for delta in [0.0, 0.05, 0.1, 0.2, 0.4] {
            let w = window_fraction(&times, 0.25, 0.5, delta).unwrap();
            assert!(w >= last);
            last = w;
        }
    }
}
