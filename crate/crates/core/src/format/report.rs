//! Metric reports.
//!
//! The JSON layout is fixed: keys in a set order, reals with six decimals,
//! unbounded values as the string `"inf"`, and absent values as `null`. Equal
//! inputs give byte-identical output.

use std::fmt::Write as _;

use crate::metrics::{MetricParams, MorphospacePoint, Ratio};
use crate::window::Horizon;

#[derive(Clone, Debug, PartialEq)]
pub struct WindowRow {
    pub t: usize,
    pub occurs: bool,
    pub coinst: bool,
    pub w_weak: Horizon,
    pub w_strong: Horizon,
}

#[derive(Clone, Debug, PartialEq)]
pub struct MetricsReport {
    pub k: usize,
    pub steps: usize,
    pub horizon: usize,
    pub stride: usize,
    pub horizon_max: usize,
    pub params: MetricParams,
    pub ref_index: usize,
    pub p_weak: f64,
    pub p_strong: f64,
    /// `None` when every layer time is undefined.
    pub gap_ratio: Option<Ratio>,
    pub gap_undefined_count: usize,
    pub identifiability_rate: f64,
    pub continuity_mean: Option<f64>,
    pub consistency: Option<f64>,
    pub recovery: Option<f64>,
    pub recovery_bound: Option<f64>,
    pub coherence: Option<f64>,
    pub windows: Vec<WindowRow>,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum ReportFormat {
    Json,
    Text,
}

impl std::str::FromStr for ReportFormat {
    type Err = String;

    fn from_str(s: &str) -> Result<Self, String> {
        match s {
            "json" => Ok(ReportFormat::Json),
            "text" => Ok(ReportFormat::Text),
            other => Err(format!("unknown format `{other}` (expected json or text)")),
        }
    }
}

impl MetricsReport {
    pub fn morphospace(&self) -> Option<MorphospacePoint> {
        self.coherence.map(|coherence| MorphospacePoint {
            coherence,
            availability: self.p_weak,
            binding: self.p_strong,
            alpha: self.params.alpha,
        })
    }

    pub fn render(&self, format: ReportFormat) -> String {
        match format {
            ReportFormat::Json => self.to_json(),
            ReportFormat::Text => self.to_text(),
        }
    }

    pub fn to_json(&self) -> String {
        let mut o = String::new();
        o.push_str("{\n");
        let _ = writeln!(o, "  \"k\": {},", self.k);
        let _ = writeln!(o, "  \"steps\": {},", self.steps);
        let _ = writeln!(
            o,
            "  \"window\": {{\"delta\": {}, \"stride\": {}, \"t_count\": {}, \"horizon_max\": {}}},",
            self.horizon,
            self.stride,
            self.windows.len(),
            self.horizon_max
        );
        let p = &self.params;
        let _ = writeln!(
            o,
            "  \"params\": {{\"delta_i\": {}, \"delta_cons\": {}, \"epsilon\": {}, \"alpha\": {}}},",
            real(p.delta_i),
            real(p.delta_cons),
            real(p.epsilon),
            real(p.alpha)
        );
        let _ = writeln!(o, "  \"ref_index\": {},", self.ref_index);
        let _ = writeln!(o, "  \"p_weak\": {},", real(self.p_weak));
        let _ = writeln!(o, "  \"p_strong\": {},", real(self.p_strong));
        let _ = writeln!(o, "  \"gap_ratio\": {},", ratio_json(self.gap_ratio));
        let _ = writeln!(o, "  \"gap_undefined_count\": {},", self.gap_undefined_count);
        let _ = writeln!(o, "  \"identifiability_rate\": {},", real(self.identifiability_rate));
        let _ = writeln!(o, "  \"continuity_mean\": {},", opt(self.continuity_mean));
        let _ = writeln!(o, "  \"consistency\": {},", opt(self.consistency));
        let _ = writeln!(o, "  \"recovery\": {},", opt(self.recovery));
        let _ = writeln!(o, "  \"recovery_bound\": {},", opt(self.recovery_bound));
        let _ = writeln!(
            o,
            "  \"morphospace\": {{\"coh\": {}, \"avail\": {}, \"bind\": {}, \"alpha\": {}}},",
            opt(self.coherence),
            real(self.p_weak),
            real(self.p_strong),
            real(self.params.alpha)
        );
        o.push_str("  \"windows\": [");
        for (i, w) in self.windows.iter().enumerate() {
            o.push_str(if i == 0 { "\n" } else { ",\n" });
            let _ = write!(
                o,
                "    {{\"t\": {}, \"occurs\": {}, \"coinst\": {}, \"w_weak\": {}, \"w_strong\": {}}}",
                w.t,
                w.occurs,
                w.coinst,
                horizon_json(w.w_weak),
                horizon_json(w.w_strong)
            );
        }
        o.push_str(if self.windows.is_empty() { "]\n" } else { "\n  ]\n" });
        o.push_str("}\n");
        o
    }

    pub fn to_text(&self) -> String {
        let mut o = String::new();
        let _ = writeln!(
            o,
            "k={} steps={} delta={} stride={} t_count={} horizon_max={}",
            self.k,
            self.steps,
            self.horizon,
            self.stride,
            self.windows.len(),
            self.horizon_max
        );
        let rows: [(&str, String); 11] = [
            ("p_weak", real(self.p_weak)),
            ("p_strong", real(self.p_strong)),
            ("gap_ratio", ratio_text(self.gap_ratio)),
            ("gap_undefined_count", self.gap_undefined_count.to_string()),
            ("identifiability_rate", real(self.identifiability_rate)),
            ("continuity_mean", opt_text(self.continuity_mean)),
            ("consistency", opt_text(self.consistency)),
            ("recovery", opt_text(self.recovery)),
            ("recovery_bound", opt_text(self.recovery_bound)),
            ("coherence", opt_text(self.coherence)),
            ("alpha", real(self.params.alpha)),
        ];
        for (name, value) in rows {
            let _ = writeln!(o, "{name:<22}{value}");
        }
        let _ = writeln!(o, "{:>6} {:>6} {:>6} {:>6} {:>8}", "t", "occurs", "coinst", "w_weak", "w_strong");
        for w in &self.windows {
            let _ = writeln!(
                o,
                "{:>6} {:>6} {:>6} {:>6} {:>8}",
                w.t,
                u8::from(w.occurs),
                u8::from(w.coinst),
                w.w_weak.to_string(),
                w.w_strong.to_string()
            );
        }
        o
    }
}

fn real(x: f64) -> String {
    if x.is_infinite() {
        "\"inf\"".into()
    } else {
        // Avoid "-0.000000" for tiny negative rounding noise.
        let s = format!("{x:.6}");
        if s == "-0.000000" {
            "0.000000".into()
        } else {
            s
        }
    }
}

fn opt(x: Option<f64>) -> String {
    x.map_or_else(|| "null".into(), real)
}

fn opt_text(x: Option<f64>) -> String {
    x.map_or_else(|| "-".into(), real)
}

fn ratio_json(r: Option<Ratio>) -> String {
    match r {
        None => "null".into(),
        Some(Ratio::Infinite) => "\"inf\"".into(),
        Some(Ratio::Finite(x)) => real(x),
    }
}

fn ratio_text(r: Option<Ratio>) -> String {
    match r {
        None => "undefined".into(),
        Some(r) => r.to_string(),
    }
}

fn horizon_json(h: Horizon) -> String {
    match h {
        Horizon::Finite(n) => n.to_string(),
        Horizon::Infinite => "\"inf\"".into(),
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn sample() -> MetricsReport {
        MetricsReport {
            k: 3,
            steps: 3,
            horizon: 2,
            stride: 1,
            horizon_max: 16,
            params: MetricParams::default(),
            ref_index: 0,
            p_weak: 1.0,
            p_strong: 0.0,
            gap_ratio: Some(Ratio::Infinite),
            gap_undefined_count: 0,
            identifiability_rate: 1.0,
            continuity_mean: Some(1.0 / 3.0),
            consistency: None,
            recovery: None,
            recovery_bound: None,
            coherence: None,
            windows: vec![WindowRow {
                t: 0,
                occurs: true,
                coinst: false,
                w_weak: Horizon::Finite(2),
                w_strong: Horizon::Infinite,
            }],
        }
    }

    #[test]
    fn json_is_valid_and_fixed_precision() {
        let text = sample().to_json();
        let v: serde_json::Value = serde_json::from_str(&text).unwrap();
        assert_eq!(v["gap_ratio"], "inf");
        assert_eq!(v["windows"][0]["w_strong"], "inf");
        assert_eq!(v["windows"][0]["w_weak"], 2);
        assert_eq!(v["consistency"], serde_json::Value::Null);
        assert!(text.contains("\"continuity_mean\": 0.333333,"));
        assert!(text.contains("\"p_weak\": 1.000000,"));
        assert_eq!(text, sample().to_json());
    }

    #[test]
    fn empty_window_list() {
        let mut r = sample();
        r.windows.clear();
        let v: serde_json::Value = serde_json::from_str(&r.to_json()).unwrap();
        assert_eq!(v["window"]["t_count"], 0);
    }

    #[test]
    fn text_lists_windows() {
        let text = sample().to_text();
        assert!(text.contains("gap_ratio             inf"));
        assert!(text.lines().last().unwrap().trim_end().ends_with("inf"));
    }

    #[test]
    fn negative_zero_is_normalised() {
        assert_eq!(real(-1e-12), "0.000000");
    }
}
