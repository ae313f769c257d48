//! Single-pass persistence over a stream of activation sets.
//!
//! Keeps, for every ingredient, the last step at which it was active and the
//! last step at which the full conjunction was active. A window
//! `[u0, u0 + horizon]` is decided the moment its last step arrives: it
//! occurs iff every last-seen index is `>= u0`, and it co-instantiates iff
//! the last full step is `>= u0`.

use crate::activation::ActivationSet;
use crate::error::{Error, Result};
use crate::identity::GroundedIdentity;
use crate::metrics::persistence::{PersistenceResult, WindowOutcome};
use crate::window::WindowConfig;

#[derive(Debug)]
pub struct PersistenceStream {
    k: usize,
    horizon: usize,
    stride: usize,
    pending: std::vec::IntoIter<usize>,
    next_t: Option<usize>,
    last_seen: Vec<Option<usize>>,
    last_full: Option<usize>,
    next_step: usize,
    outcomes: Vec<WindowOutcome>,
}

impl PersistenceStream {
    pub fn new(k: usize, cfg: &WindowConfig) -> Result<Self> {
        if cfg.eval_indices.is_empty() {
            return Err(Error::parameter("evaluation index set is empty"));
        }
        if k == 0 {
            return Err(Error::structural("identity has no ingredients"));
        }
        let mut pending = cfg.eval_indices.clone().into_iter();
        let next_t = pending.next();
        Ok(Self {
            k,
            horizon: cfg.horizon,
            stride: cfg.stride,
            pending,
            next_t,
            last_seen: vec![None; k],
            last_full: None,
            next_step: 0,
            outcomes: Vec::with_capacity(cfg.eval_indices.len()),
        })
    }

    /// Feeds the activation set of the next objective step.
    pub fn push(&mut self, f: &ActivationSet) -> Result<()> {
        if f.step != self.next_step {
            return Err(Error::Stream {
                expected: self.next_step,
                got: f.step,
            });
        }
        let u = f.step;
        for i in f.active.iter() {
            match self.last_seen.get_mut(i) {
                Some(slot) => *slot = Some(u),
                None => {
                    return Err(Error::structural(format!(
                        "step {u}: ingredient index {i} outside universe of size {}",
                        self.k
                    )))
                }
            }
        }
        if f.is_full(self.k) {
            self.last_full = Some(u);
        }
        while let Some(t) = self.next_t {
            let u0 = self.stride * t;
            if u0 + self.horizon != u {
                break;
            }
            self.outcomes.push(WindowOutcome {
                t,
                occurs: self.last_seen.iter().all(|s| s.is_some_and(|s| s >= u0)),
                coinst: self.last_full.is_some_and(|s| s >= u0),
            });
            self.next_t = self.pending.next();
        }
        self.next_step += 1;
        Ok(())
    }

    pub fn finish(self) -> Result<PersistenceResult> {
        if let Some(t) = self.next_t {
            return Err(Error::range(format!(
                "stream ended after {} steps before the window at t = {t} completed",
                self.next_step
            )));
        }
        PersistenceResult::from_outcomes(self.outcomes)
    }
}

/// Same contract as [`persistence`](crate::metrics::persistence), computed in one pass.
pub fn persistence_streaming(
    activations: &[ActivationSet],
    identity: &GroundedIdentity,
    cfg: &WindowConfig,
) -> Result<PersistenceResult> {
    let mut stream = PersistenceStream::new(identity.k(), cfg)?;
    for f in activations {
        stream.push(f)?;
    }
    stream.finish()
}
