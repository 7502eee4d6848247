//! Wall-clock measurement with warmup and minimum-of-k reporting.

use std::time::{Duration, Instant};

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct Timing {
    pub warmup: usize,
    pub runs: usize,
}

impl Default for Timing {
    fn default() -> Self {
        Timing { warmup: 3, runs: 5 }
    }
}

/// Result of the fastest run together with all measured durations.
#[derive(Debug, Clone)]
pub struct Measured<T> {
    pub value: T,
    pub samples: Vec<Duration>,
}

impl<T> Measured<T> {
    pub fn min(&self) -> Duration {
        self.samples.iter().copied().min().unwrap_or_default()
    }

    pub fn median(&self) -> Duration {
        let mut s = self.samples.clone();
        s.sort();
        s.get(s.len() / 2).copied().unwrap_or_default()
    }
}

impl Timing {
    pub fn new(warmup: usize, runs: usize) -> Timing {
        Timing { warmup, runs: runs.max(1) }
    }

    /// Runs `f` `warmup` times untimed, then `runs` times timed. Stops
    /// early (keeping what was measured) as soon as `f` fails.
    pub fn measure<T, E>(&self, mut f: impl FnMut() -> Result<T, E>) -> Result<Measured<T>, E> {
        for _ in 0..self.warmup {
            f()?;
        }
        let mut samples = Vec::with_capacity(self.runs);
        let mut last = None;
        for _ in 0..self.runs {
            let start = Instant::now();
            let v = f()?;
            samples.push(start.elapsed().max(Duration::from_nanos(1)));
            last = Some(v);
        }
        Ok(Measured {
            value: last.expect("at least one run"),
            samples,
        })
    }
}

/// Runs `f` once and reports how long it took.
pub fn time_once<T>(f: impl FnOnce() -> T) -> (T, Duration) {
    let start = Instant::now();
    let v = f();
    (v, start.elapsed())
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn counts_runs() {
        let mut calls = 0;
        let m = Timing::new(3, 5)
            .measure(|| {
                calls += 1;
                Ok::<_, ()>(calls)
            })
            .unwrap();
        assert_eq!(calls, 8);
        assert_eq!(m.samples.len(), 5);
        assert_eq!(m.value, 8);
        assert!(m.min() <= m.median());
        assert!(m.min() > Duration::ZERO);
    }

    #[test]
    fn failure_propagates() {
        let r = Timing::default().measure(|| Err::<(), _>("no"));
        assert_eq!(r.unwrap_err(), "no");
    }
}
