use std::collections::BTreeSet;

use crate::activation::{set_distance, ActivationSet, IngredientSet};
use crate::error::{Error, Result};

/// Thresholds and weights for the auxiliary metrics.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct MetricParams {
    pub delta_i: f64,
    pub delta_cons: f64,
    pub epsilon: f64,
    pub alpha: f64,
}

impl Default for MetricParams {
    fn default() -> Self {
        Self {
            delta_i: 0.25,
            delta_cons: 0.5,
            epsilon: 0.01,
            alpha: 0.5,
        }
    }
}

impl MetricParams {
    pub fn validate(&self) -> Result<()> {
        unit("delta_i", self.delta_i)?;
        unit("delta_cons", self.delta_cons)?;
        unit("alpha", self.alpha)?;
        if !(self.epsilon > 0.0 && self.epsilon.is_finite()) {
            return Err(Error::parameter(format!("epsilon must be > 0, got {}", self.epsilon)));
        }
        Ok(())
    }
}

fn unit(name: &str, x: f64) -> Result<()> {
    if (0.0..=1.0).contains(&x) {
        Ok(())
    } else {
        Err(Error::parameter(format!("{name} must lie in [0, 1], got {x}")))
    }
}

/// 1 when `current` lies within `delta_i` of `reference`, else 0.
pub fn identifiability(current: &ActivationSet, reference: &ActivationSet, k: usize, delta_i: f64) -> Result<u8> {
    let d = set_distance(&current.active, &reference.active, k)?;
    Ok(u8::from(d <= delta_i))
}

#[derive(Clone, Debug, PartialEq)]
pub struct Continuity {
    /// `(u, C_u)` in the order requested.
    pub per_step: Vec<(usize, f64)>,
    pub mean: f64,
}

/// Stepwise continuity `C_u = 1 - d(F_u, F_{u-1})` and its mean over `steps`.
pub fn continuity(activations: &[ActivationSet], k: usize, steps: &[usize]) -> Result<Continuity> {
    if steps.is_empty() {
        return Err(Error::parameter("continuity needs at least one step"));
    }
    let per_step = steps
        .iter()
        .map(|&u| {
            if u == 0 || u >= activations.len() {
                return Err(Error::range(format!(
                    "continuity step {u} needs a predecessor inside a trace of {} steps",
                    activations.len()
                )));
            }
            let d = set_distance(&activations[u].active, &activations[u - 1].active, k)?;
            Ok((u, 1.0 - d))
        })
        .collect::<Result<Vec<_>>>()?;
    let mean = per_step.iter().map(|(_, c)| c).sum::<f64>() / per_step.len() as f64;
    Ok(Continuity { per_step, mean })
}

/// A symmetric output similarity in `[0, 1]`.
pub trait Similarity {
    fn similarity(&self, a: &str, b: &str) -> f64;
}

impl<F: Fn(&str, &str) -> f64> Similarity for F {
    fn similarity(&self, a: &str, b: &str) -> f64 {
        self(a, b)
    }
}

/// Jaccard index of whitespace-split, lower-cased token sets. Two empty texts score 1.
#[derive(Clone, Copy, Debug, Default)]
pub struct TokenJaccard;

impl Similarity for TokenJaccard {
    fn similarity(&self, a: &str, b: &str) -> f64 {
        let ta: BTreeSet<String> = a.split_whitespace().map(str::to_lowercase).collect();
        let tb: BTreeSet<String> = b.split_whitespace().map(str::to_lowercase).collect();
        let union = ta.union(&tb).count();
        if union == 0 {
            return 1.0;
        }
        ta.intersection(&tb).count() as f64 / union as f64
    }
}

#[derive(Clone, Copy, Debug, PartialEq)]
pub struct ConsistencyScore {
    pub score: f64,
    pub pairs: usize,
    pub agreeing: usize,
}

/// Fraction of unordered output pairs whose similarity reaches `delta_cons`.
pub fn consistency<S: AsRef<str>>(outputs: &[S], sim: &impl Similarity, delta_cons: f64) -> Result<ConsistencyScore> {
    let n = outputs.len();
    if n < 2 {
        return Err(Error::parameter(format!("consistency needs at least 2 outputs, got {n}")));
    }
    let mut agreeing = 0;
    for i in 0..n {
        for j in i + 1..n {
            if sim.similarity(outputs[i].as_ref(), outputs[j].as_ref()) >= delta_cons {
                agreeing += 1;
            }
        }
    }
    let pairs = n * (n - 1) / 2;
    Ok(ConsistencyScore {
        score: agreeing as f64 / pairs as f64,
        pairs,
        agreeing,
    })
}

/// `R_K = max(0, 1 - d(recovered, ref) / (d(drifted, ref) + epsilon))`.
pub fn recovery(
    reference: &ActivationSet,
    drifted: &ActivationSet,
    recovered: &ActivationSet,
    k: usize,
    epsilon: f64,
) -> Result<f64> {
    if !(epsilon > 0.0) {
        return Err(Error::parameter(format!("epsilon must be > 0, got {epsilon}")));
    }
    let d_rec = set_distance(&recovered.active, &reference.active, k)?;
    let d_drift = set_distance(&drifted.active, &reference.active, k)?;
    Ok((1.0 - d_rec / (d_drift + epsilon)).max(0.0))
}

/// Recovery with no regulariser; defined only when the drifted state differs from the reference.
pub fn recovery_unregularized(
    reference: &ActivationSet,
    drifted: &ActivationSet,
    recovered: &ActivationSet,
    k: usize,
) -> Result<Option<f64>> {
    let d_rec = set_distance(&recovered.active, &reference.active, k)?;
    let d_drift = set_distance(&drifted.active, &reference.active, k)?;
    Ok((d_drift > 0.0).then(|| (1.0 - d_rec / d_drift).max(0.0)))
}

/// Upper bound on recovery when interventions can only touch `controllable`:
/// `(|P ∩ D| + epsilon*k) / (|D| + epsilon*k)` with `D = F(ref) △ F(drift)`.
pub fn recovery_bound(
    reference: &ActivationSet,
    drifted: &ActivationSet,
    controllable: &IngredientSet,
    k: usize,
    epsilon: f64,
) -> Result<f64> {
    if epsilon < 0.0 {
        return Err(Error::parameter(format!("epsilon must be >= 0, got {epsilon}")));
    }
    let diff = reference.active.symmetric_difference(&drifted.active);
    let eps_k = epsilon * k as f64;
    let den = diff.len() as f64 + eps_k;
    if den == 0.0 {
        return Ok(1.0);
    }
    Ok((controllable.intersection_len(&diff) as f64 + eps_k) / den)
}

#[derive(Clone, Copy, Debug, PartialEq)]
pub struct MorphospacePoint {
    pub coherence: f64,
    pub availability: f64,
    pub binding: f64,
    pub alpha: f64,
}

/// Coherence `alpha*Cons + (1-alpha)*I`, availability `p_weak`, binding `p_strong`.
pub fn morphospace(
    identifiability_rate: f64,
    consistency: f64,
    p_weak: f64,
    p_strong: f64,
    alpha: f64,
) -> Result<MorphospacePoint> {
    for (name, x) in [
        ("identifiability", identifiability_rate),
        ("consistency", consistency),
        ("p_weak", p_weak),
        ("p_strong", p_strong),
        ("alpha", alpha),
    ] {
        unit(name, x)?;
    }
    Ok(MorphospacePoint {
        coherence: alpha * consistency + (1.0 - alpha) * identifiability_rate,
        availability: p_weak,
        binding: p_strong,
        alpha,
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    fn set(ids: &[usize]) -> ActivationSet {
        ActivationSet::from_indices(0, ids.iter().copied())
    }

    #[test]
    fn identifiability_cases() {
        assert_eq!(identifiability(&set(&[0, 2]), &set(&[0, 2]), 4, 0.0).unwrap(), 1);
        assert_eq!(identifiability(&set(&[0, 1, 2, 3]), &set(&[3]), 4, 0.5).unwrap(), 0);
        // Boundary is inclusive.
        assert_eq!(identifiability(&set(&[0, 1]), &set(&[0]), 4, 0.25).unwrap(), 1);
    }

    #[test]
    fn continuity_cases() {
        let constant: Vec<_> = (0..5).map(|u| ActivationSet::from_indices(u, [0, 1])).collect();
        let c = continuity(&constant, 2, &[1, 2, 3, 4]).unwrap();
        assert!(c.per_step.iter().all(|&(_, x)| x == 1.0));
        assert_eq!(c.mean, 1.0);

        let alternating: Vec<_> = (0..6).map(|u| ActivationSet::from_indices(u, [u % 2])).collect();
        let c = continuity(&alternating, 2, &[1, 2, 3, 4, 5]).unwrap();
        assert!(c.per_step.iter().all(|&(_, x)| x == 0.0));

        let flip = vec![
            ActivationSet::from_indices(0, [0, 1, 2]),
            ActivationSet::from_indices(1, [0, 1, 2, 3]),
        ];
        assert_eq!(continuity(&flip, 4, &[1]).unwrap().per_step, vec![(1, 0.75)]);

        assert!(matches!(continuity(&flip, 4, &[0]), Err(Error::Range(_))));
    }

    #[test]
    fn consistency_cases() {
        let same = ["I am Alice", "I am Alice", "I am Alice"];
        assert_eq!(consistency(&same, &TokenJaccard, 1.0).unwrap().score, 1.0);

        // Only the first two agree.
        let sim = |a: &str, b: &str| if a.len() == b.len() { 1.0 } else { 0.0 };
        let r = consistency(&["aa", "bb", "ccc"], &sim, 0.5).unwrap();
        assert_eq!((r.agreeing, r.pairs), (1, 3));
        assert!((r.score - 1.0 / 3.0).abs() < 1e-15);

        assert_eq!(consistency(&["alpha beta", "gamma delta"], &TokenJaccard, 0.5).unwrap().score, 0.0);
        assert!(matches!(consistency(&["only"], &TokenJaccard, 0.5), Err(Error::Parameter(_))));
    }

    #[test]
    fn jaccard_folds_case() {
        assert_eq!(TokenJaccard.similarity("I am ALICE", "alice am i"), 1.0);
        assert_eq!(TokenJaccard.similarity("a b", "b c"), 1.0 / 3.0);
        assert_eq!(TokenJaccard.similarity("", " "), 1.0);
    }

    #[test]
    fn recovery_cases() {
        let reference = set(&[0, 1, 2, 3]);
        let drifted = set(&[3]);
        assert_eq!(recovery(&reference, &drifted, &reference, 4, 0.01).unwrap(), 1.0);

        // 1 - 0.75 / 0.76
        let r = recovery(&reference, &drifted, &drifted, 4, 0.01).unwrap();
        assert!((r - (1.0 - 0.75 / 0.76)).abs() < 1e-12);
        assert!((r - 0.013157894736842).abs() < 1e-12);

        // 1 - 0.5 / 0.76
        let r = recovery(&reference, &drifted, &set(&[0, 3]), 4, 0.01).unwrap();
        assert!((r - 0.342105263157894).abs() < 1e-12);

        assert!(matches!(recovery(&reference, &drifted, &drifted, 4, 0.0), Err(Error::Parameter(_))));
    }

    #[test]
    fn recovery_bound_cases() {
        let reference = set(&[0, 1, 2, 3]);
        let drifted = set(&[3]);
        let p = IngredientSet::from_indices([0]);
        assert!((recovery_bound(&reference, &drifted, &p, 4, 0.0).unwrap() - 1.0 / 3.0).abs() < 1e-15);
        // (1 + 0.04) / (3 + 0.04)
        let b = recovery_bound(&reference, &drifted, &p, 4, 0.01).unwrap();
        assert!((b - 1.04 / 3.04).abs() < 1e-15);
        let all = IngredientSet::from_indices([0, 1, 2]);
        assert_eq!(recovery_bound(&reference, &drifted, &all, 4, 0.0).unwrap(), 1.0);
        assert_eq!(recovery_bound(&reference, &reference, &p, 4, 0.0).unwrap(), 1.0);
    }

    #[test]
    fn morphospace_cases() {
        assert_eq!(morphospace(1.0, 1.0, 0.5, 0.2, 0.5).unwrap().coherence, 1.0);
        let m = morphospace(0.6, 0.8, 0.9, 0.1, 0.5).unwrap();
        assert!((m.coherence - 0.7).abs() < 1e-15);
        assert_eq!((m.availability, m.binding), (0.9, 0.1));
        assert!(morphospace(1.2, 0.0, 0.0, 0.0, 0.5).is_err());
    }

    #[test]
    fn params_validation() {
        MetricParams::default().validate().unwrap();
        assert!(MetricParams { epsilon: 0.0, ..Default::default() }.validate().is_err());
        assert!(MetricParams { alpha: 1.5, ..Default::default() }.validate().is_err());
    }
}
