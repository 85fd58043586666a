/// Interior local extrema, `(index, value)` in increasing index order.
#[derive(Debug, Clone, Default, PartialEq)]
pub struct ExtremaSet {
    pub maxima: Vec<(usize, f64)>,
    pub minima: Vec<(usize, f64)>,
}

impl ExtremaSet {
    pub fn count(&self) -> usize {
        self.maxima.len() + self.minima.len()
    }
}

/// Finds strict interior extrema. A plateau counts once, at its midpoint,
/// and only if the signal strictly rises into it and strictly falls out of it
/// (or the reverse for minima). End samples are never extrema.
pub fn find_extrema(signal: &[f64]) -> ExtremaSet {
    let mut set = ExtremaSet::default();
    let n = signal.len();
    if n < 3 {
        return set;
    }
    let mut i = 1;
    while i < n - 1 {
        let prev = signal[i - 1];
        let cur = signal[i];
        if cur == prev {
            i += 1;
            continue;
        }
        let mut j = i;
        while j + 1 < n && signal[j + 1] == cur {
            j += 1;
        }
        if j + 1 < n {
            let next = signal[j + 1];
            let mid = (i + j) / 2;
            if cur > prev && next < cur {
                set.maxima.push((mid, cur));
            } else if cur < prev && next > cur {
                set.minima.push((mid, cur));
            }
        }
        i = j + 1;
    }
    set
}

/// Sign changes between consecutive nonzero samples; exact zeros are
/// skipped rather than counted twice.
pub fn count_zero_crossings(signal: &[f64]) -> usize {
    let mut last = 0.0f64;
    let mut count = 0;
    for &v in signal {
        if v == 0.0 {
            continue;
        }
        if last != 0.0 && (v > 0.0) != (last > 0.0) {
            count += 1;
        }
        last = v;
    }
    count
}

#[cfg(test)]
mod tests {
    use super::*;
    use std::f64::consts::PI;

    #[test]
    fn single_peak() {
        let e = find_extrema(&[0.0, 1.0, 0.0]);
        assert_eq!(e.maxima, vec![(1, 1.0)]);
        assert!(e.minima.is_empty());
    }

    #[test]
    fn ramp_has_none() {
        let ramp: Vec<f64> = (0..100).map(|i| i as f64).collect();
        assert_eq!(find_extrema(&ramp).count(), 0);
        assert_eq!(find_extrema(&[2.0; 50]).count(), 0);
    }

    #[test]
    fn five_cycle_sine() {
        let x: Vec<f64> = (0..1000)
            .map(|k| (2.0 * PI * 5.0 * k as f64 / 1000.0).sin())
            .collect();
        let e = find_extrema(&x);
        assert_eq!(e.maxima.len(), 5);
        assert_eq!(e.minima.len(), 5);
        // analytic peaks at k = 50 + 200 m, troughs at k = 150 + 200 m
        for (m, &(idx, _)) in e.maxima.iter().enumerate() {
            assert_eq!(idx, 50 + 200 * m);
        }
        for (m, &(idx, _)) in e.minima.iter().enumerate() {
            assert_eq!(idx, 150 + 200 * m);
        }
        let mut all: Vec<(usize, bool)> = e.maxima.iter().map(|&(i, _)| (i, true)).collect();
        all.extend(e.minima.iter().map(|&(i, _)| (i, false)));
        all.sort();
        assert!(all.windows(2).all(|w| w[0].1 != w[1].1), "must alternate");
    }

    #[test]
    fn plateau_collapses_to_midpoint() {
        let e = find_extrema(&[0.0, 1.0, 1.0, 1.0, 1.0, 0.0, -1.0, -1.0, 0.0]);
        assert_eq!(e.maxima, vec![(2, 1.0)]);
        assert_eq!(e.minima, vec![(6, -1.0)]);
        // a step is not an extremum
        assert_eq!(find_extrema(&[0.0, 1.0, 1.0, 2.0]).count(), 0);
    }

    #[test]
    fn zero_crossings() {
        assert_eq!(count_zero_crossings(&[1.0, -1.0, 1.0]), 2);
        assert_eq!(count_zero_crossings(&[1.0, 0.0, -1.0]), 1);
        assert_eq!(count_zero_crossings(&[1.0, 0.0, 1.0]), 0);
        assert_eq!(count_zero_crossings(&[0.0, 0.0]), 0);
    }
}
