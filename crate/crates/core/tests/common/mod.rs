#![allow(dead_code)]

pub mod oracle;

use std::collections::BTreeSet;

use idgap_core::activation::{sequence_from_indices, ActivationSet};
use idgap_core::GroundedIdentity;
use rand::Rng;

pub use oracle::Steps;

pub fn identity(k: usize) -> GroundedIdentity {
    GroundedIdentity::from_tokens((0..k).map(|i| format!("g{i}"))).unwrap()
}

/// Random trace; each ingredient is active with probability `density`.
pub fn random_steps<R: Rng>(rng: &mut R, k: usize, len: usize, density: f64) -> Steps {
    (0..len)
        .map(|_| (0..k).filter(|_| rng.gen_bool(density)).collect::<BTreeSet<usize>>())
        .collect()
}

pub fn to_activations(steps: &Steps) -> Vec<ActivationSet> {
    sequence_from_indices(steps.iter().map(|s| s.iter().copied().collect::<Vec<_>>()))
}

pub mod cli {
    use std::path::{Path, PathBuf};
    use std::process::{Command, Output};

    use idgap_core::format::sidecar::{parse_sidecar, EvalSpec, RunSpec, Sidecar, SIDECAR_FILE};

    pub fn bin() -> Command {
        Command::new(env!("CARGO_BIN_EXE_idgap"))
    }

    pub fn fixtures_dir() -> PathBuf {
        Path::new(env!("CARGO_MANIFEST_DIR")).join("tests").join("fixtures")
    }

    pub fn golden_dir() -> PathBuf {
        Path::new(env!("CARGO_MANIFEST_DIR")).join("tests").join("golden")
    }

    pub fn fixtures() -> Vec<PathBuf> {
        let mut dirs: Vec<PathBuf> = std::fs::read_dir(fixtures_dir())
            .unwrap()
            .map(|e| e.unwrap().path())
            .filter(|p| p.join(SIDECAR_FILE).exists())
            .collect();
        dirs.sort();
        dirs
    }

    pub fn sidecar(dir: &Path) -> Sidecar {
        parse_sidecar(&std::fs::read_to_string(dir.join(SIDECAR_FILE)).unwrap()).unwrap()
    }

    /// `analyze` arguments reproducing the sidecar's configuration for one run.
    pub fn analyze_args(dir: &Path, s: &Sidecar, run: &RunSpec) -> Vec<String> {
        let eval = match &s.window.eval {
            EvalSpec::Keyword(k) => k.clone(),
            EvalSpec::List(v) => v.iter().map(|t| t.to_string()).collect::<Vec<_>>().join(","),
        };
        let mut args = vec![
            "analyze".to_string(),
            "--trace".into(),
            dir.join(&run.trace).display().to_string(),
            "--identity".into(),
            dir.join(&s.identity).display().to_string(),
            "--delta".into(),
            s.window.delta.to_string(),
            "--stride".into(),
            s.window.stride.to_string(),
            "--eval".into(),
            eval,
            "--horizon-max".into(),
            s.window.horizon_max.to_string(),
            "--delta-i".into(),
            s.params.delta_i.to_string(),
            "--delta-cons".into(),
            s.params.delta_cons.to_string(),
            "--epsilon".into(),
            s.params.epsilon.to_string(),
            "--alpha".into(),
            s.params.alpha.to_string(),
            "--ref-index".into(),
            run.ref_index.to_string(),
        ];
        if let Some(r) = &run.recovery {
            args.extend([
                "--drift-index".into(),
                r.drift_index.to_string(),
                "--recov-index".into(),
                r.recov_index.to_string(),
                "--controllable".into(),
                r.controllable.join(","),
            ]);
        }
        args
    }

    pub fn run(args: &[String]) -> Output {
        bin().args(args).output().unwrap()
    }
}
