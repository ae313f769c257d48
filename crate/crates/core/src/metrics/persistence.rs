use crate::activation::{ActivationSet, IngredientSet};
use crate::error::{Error, Result};
use crate::identity::GroundedIdentity;
use crate::window::WindowConfig;

/// Occur / CoInst verdicts for one evaluated layer time.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct WindowOutcome {
    pub t: usize,
    pub occurs: bool,
    pub coinst: bool,
}

#[derive(Clone, Debug, PartialEq)]
pub struct PersistenceResult {
    pub p_weak: f64,
    pub p_strong: f64,
    pub per_window: Vec<WindowOutcome>,
}

impl PersistenceResult {
    pub(crate) fn from_outcomes(per_window: Vec<WindowOutcome>) -> Result<Self> {
        if per_window.is_empty() {
            return Err(Error::parameter("evaluation index set is empty"));
        }
        let n = per_window.len() as f64;
        let weak = per_window.iter().filter(|w| w.occurs).count() as f64;
        let strong = per_window.iter().filter(|w| w.coinst).count() as f64;
        Ok(Self {
            p_weak: weak / n,
            p_strong: strong / n,
            per_window,
        })
    }
}

/// Weak and strong persistence over the windows in `cfg`.
///
/// Per window: Occur checks each ingredient for an activation somewhere in
/// the window, CoInst checks for a step with `|F_u| = k`.
pub fn persistence(
    activations: &[ActivationSet],
    identity: &GroundedIdentity,
    cfg: &WindowConfig,
) -> Result<PersistenceResult> {
    cfg.validate(activations.len())?;
    let k = identity.k();
    let full = identity.full_set();
    let outcomes = cfg
        .eval_indices
        .iter()
        .map(|&t| {
            let u0 = cfg.start(t);
            let window = &activations[u0..=u0 + cfg.horizon];
            let mut seen = IngredientSet::new();
            for f in window {
                seen.union_with(&f.active);
            }
            WindowOutcome {
                t,
                occurs: full.is_subset(&seen),
                coinst: window.iter().any(|f| f.is_full(k)),
            }
        })
        .collect();
    PersistenceResult::from_outcomes(outcomes)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::activation::sequence_from_indices;

    fn ident(k: usize) -> GroundedIdentity {
        GroundedIdentity::from_tokens((0..k).map(|i| format!("g{i}"))).unwrap()
    }

    #[test]
    fn alternating_trace() {
        let acts = sequence_from_indices((0..100).map(|u| vec![u % 2]));
        let cfg = WindowConfig::new(1, 1, (0..99).collect(), 0).unwrap();
        let r = persistence(&acts, &ident(2), &cfg).unwrap();
        assert_eq!(r.p_weak, 1.0);
        assert_eq!(r.p_strong, 0.0);
        assert_eq!(r.per_window.len(), 99);
    }

    #[test]
    fn fully_active_trace() {
        let acts = sequence_from_indices(vec![vec![0, 1, 2]; 10]);
        let cfg = WindowConfig::new(3, 2, vec![0, 1, 2, 3], 0).unwrap();
        let r = persistence(&acts, &ident(3), &cfg).unwrap();
        assert_eq!((r.p_weak, r.p_strong), (1.0, 1.0));
    }

    #[test]
    fn worked_example() {
        let acts = sequence_from_indices(vec![vec![0], vec![1], vec![2]]);
        let cfg = WindowConfig::new(2, 1, vec![0], 0).unwrap();
        let r = persistence(&acts, &ident(3), &cfg).unwrap();
        assert_eq!((r.p_weak, r.p_strong), (1.0, 0.0));
        assert_eq!(r.per_window, vec![WindowOutcome { t: 0, occurs: true, coinst: false }]);
    }

    #[test]
    fn empty_eval_set_is_parameter_error() {
        let acts = sequence_from_indices(vec![vec![0]; 3]);
        let cfg = WindowConfig::new(0, 1, vec![], 0).unwrap();
        assert!(matches!(persistence(&acts, &ident(1), &cfg), Err(Error::Parameter(_))));
    }

    #[test]
    fn zero_horizon_collapses_scores() {
        let acts = sequence_from_indices(vec![vec![0], vec![0, 1], vec![1], vec![]]);
        let cfg = WindowConfig::new(0, 1, (0..4).collect(), 0).unwrap();
        let r = persistence(&acts, &ident(2), &cfg).unwrap();
        assert_eq!(r.p_weak, r.p_strong);
        assert_eq!(r.p_weak, 0.25);
    }
}
