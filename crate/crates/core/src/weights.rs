//! Priority vectors and their normalization gauges.

use serde::{Deserialize, Serialize};

use crate::format::round_sig;

/// Normalization applied to a weight vector; weights are only defined up to
/// a positive multiple.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum Gauge {
    #[default]
    SumOne,
    SumHundred,
    LastOne,
    GeomMeanOne,
}

impl std::str::FromStr for Gauge {
    type Err = String;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        match s {
            "sum-one" => Ok(Gauge::SumOne),
            "sum-hundred" => Ok(Gauge::SumHundred),
            "last-one" => Ok(Gauge::LastOne),
            "geom-mean-one" => Ok(Gauge::GeomMeanOne),
            other => Err(format!("unknown gauge {other:?}")),
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct WeightVector {
    weights: Vec<f64>,
    gauge: Gauge,
    log_view: Vec<f64>,
}

impl WeightVector {
    /// From positive weights in any scaling.
    pub fn from_weights(weights: &[f64], gauge: Gauge) -> Self {
        let logs: Vec<f64> = weights.iter().map(|w| w.ln()).collect();
        Self::from_logs(&logs, gauge)
    }

    /// From log-weights in any additive shift.
    pub fn from_logs(logs: &[f64], gauge: Gauge) -> Self {
        let n = logs.len() as f64;
        let shift = match gauge {
            Gauge::GeomMeanOne => logs.iter().sum::<f64>() / n,
            Gauge::LastOne => *logs.last().expect("non-empty"),
            Gauge::SumOne | Gauge::SumHundred => {
                // log-sum-exp for a stable unit-sum shift
                let m = logs.iter().copied().fold(f64::NEG_INFINITY, f64::max);
                m + logs.iter().map(|y| (y - m).exp()).sum::<f64>().ln()
            }
        };
        let mut weights: Vec<f64> = logs.iter().map(|y| (y - shift).exp()).collect();
        match gauge {
            Gauge::SumOne | Gauge::SumHundred => {
                let s: f64 = weights.iter().sum();
                let target = if gauge == Gauge::SumHundred {
                    100.0
                } else {
                    1.0
                };
                weights.iter_mut().for_each(|w| *w *= target / s);
            }
            Gauge::LastOne => *weights.last_mut().expect("non-empty") = 1.0,
            Gauge::GeomMeanOne => {}
        }
        let log_view = weights.iter().map(|w| w.ln()).collect();
        Self {
            weights,
            gauge,
            log_view,
        }
    }

    pub fn weights(&self) -> &[f64] {
        &self.weights
    }

    pub fn gauge(&self) -> Gauge {
        self.gauge
    }

    /// Natural logarithms of the weights.
    pub fn log_view(&self) -> &[f64] {
        &self.log_view
    }

    pub fn len(&self) -> usize {
        self.weights.len()
    }

    pub fn is_empty(&self) -> bool {
        self.weights.is_empty()
    }

    pub fn regauge(&self, gauge: Gauge) -> Self {
        Self::from_logs(&self.log_view, gauge)
    }

    /// Alternatives sorted by weight descending (ties by index).
    pub fn ranking(&self) -> Vec<usize> {
        let mut idx: Vec<usize> = (0..self.weights.len()).collect();
        idx.sort_by(|&a, &b| self.weights[b].total_cmp(&self.weights[a]).then(a.cmp(&b)));
        idx
    }

    /// Serializable form with 12 significant digits.
    pub fn to_document(&self) -> WeightsDocument {
        WeightsDocument {
            gauge: self.gauge,
            weights: self.weights.iter().map(|&w| round_sig(w, 12)).collect(),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct WeightsDocument {
    pub gauge: Gauge,
    pub weights: Vec<f64>,
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn gauges_hold() {
        let raw = [3.0, 1.0, 6.0, 2.0];
        let one = WeightVector::from_weights(&raw, Gauge::SumOne);
        assert!((one.weights().iter().sum::<f64>() - 1.0).abs() < 1e-12);
        let hundred = one.regauge(Gauge::SumHundred);
        assert!((hundred.weights().iter().sum::<f64>() - 100.0).abs() < 1e-12);
        assert!((hundred.weights()[2] - 50.0).abs() < 1e-12);
        let last = one.regauge(Gauge::LastOne);
        assert_eq!(last.weights()[3], 1.0);
        assert!((last.weights()[0] - 1.5).abs() < 1e-12);
        let gm = one.regauge(Gauge::GeomMeanOne);
        assert!(gm.log_view().iter().sum::<f64>().abs() < 1e-12);
    }

    #[test]
    fn ranking_is_gauge_invariant() {
        let w = WeightVector::from_weights(&[0.2, 0.5, 0.1, 0.2], Gauge::SumOne);
        let r = w.ranking();
        assert_eq!(r, vec![1, 0, 3, 2]);
        for g in [Gauge::SumHundred, Gauge::LastOne, Gauge::GeomMeanOne] {
            assert_eq!(w.regauge(g).ranking(), r);
        }
    }

    #[test]
    fn document_uses_kebab_case_gauge() {
        let doc = WeightVector::from_weights(&[1.0, 1.0], Gauge::SumHundred).to_document();
        let json = serde_json::to_string(&doc).unwrap();
        assert_eq!(json, r#"{"gauge":"sum-hundred","weights":[50.0,50.0]}"#);
    }
}
