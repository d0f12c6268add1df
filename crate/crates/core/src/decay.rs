//! Dyadic-window maxima and grid-continuity statistics.

use crate::Evidence;

#[derive(Clone, Copy, Debug, PartialEq)]
pub struct Window {
    pub start: f64,
    pub end: f64,
    pub max: f64,
}

/// Maxima of `points` over `[0,1)`, `[1,2)`, `[2,4)`, …, with the last
/// window `[2^K, t_end]` closed at the final parameter. Empty windows are
/// skipped. `points` must be sorted by parameter.
pub fn dyadic_maxima(points: &[(f64, f64)]) -> Vec<Window> {
    let Some(&(t_end, _)) = points.last() else {
        return Vec::new();
    };
    let mut edges = vec![0.0];
    let mut e = 1.0;
    while e <= t_end {
        edges.push(e);
        e *= 2.0;
    }
    let mut windows: Vec<Window> = edges
        .iter()
        .enumerate()
        .map(|(k, &start)| Window {
            start,
            end: edges.get(k + 1).copied().unwrap_or(t_end),
            max: f64::NEG_INFINITY,
        })
        .collect();
    let last = windows.len() - 1;
    for &(t, v) in points {
        let k = edges.partition_point(|&x| x <= t).saturating_sub(1).min(last);
        windows[k].max = windows[k].max.max(v);
    }
    windows.retain(|w| w.max > f64::NEG_INFINITY);
    windows
}

pub fn windows_evidence(name: &str, windows: &[Window]) -> Evidence {
    Evidence::new(name, windows.iter().map(|w| (w.start, w.max)).collect())
}

/// Whether the final window sits at or below `threshold`.
pub fn last_window_below(windows: &[Window], threshold: f64) -> bool {
    windows.last().is_some_and(|w| w.max <= threshold)
}

/// `max |Δφ| / (Δt · ω · scale)` over consecutive known nodes.
pub fn lipschitz_statistic(nodes: &[f64], abs_steps: impl Iterator<Item = f64>, omega: &[f64], scale: f64) -> f64 {
    if scale == 0.0 {
        return 0.0;
    }
    abs_steps
        .enumerate()
        .map(|(i, d)| d / ((nodes[i + 1] - nodes[i]) * omega[i].max(omega[i + 1]) * scale))
        .fold(0.0, f64::max)
}
