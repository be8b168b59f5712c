//! JSON model files.
//!
//! ```json
//! {"states": 3, "transitions": [[0,1,0.5],[0,2,0.5],[1,1,1],[2,2,1]],
//!  "alpha": 0.9, "payoff": [1,2,3], "initial_set": [1,2]}
//! ```
//!
//! `states` is either a count or a list of labels. A scalar `alpha` applies
//! to every state. `initial_set` is optional and defaults to all states.

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::model::Model;
use crate::sparse::CsrMatrix;
use crate::state_set::StateSet;

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(untagged)]
pub enum StatesField {
    Count(usize),
    Labels(Vec<String>),
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(untagged)]
pub enum AlphaField {
    Scalar(f64),
    PerState(Vec<f64>),
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ModelFile {
    pub states: StatesField,
    pub transitions: Vec<(usize, usize, f64)>,
    pub alpha: AlphaField,
    pub payoff: Vec<f64>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub initial_set: Option<Vec<usize>>,
}

impl ModelFile {
    pub fn from_json(text: &str) -> Result<Self> {
        serde_json::from_str(text).map_err(|e| Error::Parse(e.to_string()))
    }

    pub fn to_json(&self) -> String {
        serde_json::to_string(self).expect("model file serializes")
    }

    /// Builds the validated model and the initial candidate set.
    pub fn into_model(self) -> Result<(Model, StateSet)> {
        let (n, labels) = match self.states {
            StatesField::Count(n) => (n, None),
            StatesField::Labels(labels) => (labels.len(), Some(labels)),
        };
        let alpha = match self.alpha {
            AlphaField::Scalar(a) => vec![a; n],
            AlphaField::PerState(a) => a,
        };
        let pi = CsrMatrix::from_triplets(n, n, &self.transitions)?;
        let model = Model::new(labels, pi, alpha, self.payoff)?;
        let initial = match self.initial_set {
            None => StateSet::full(n),
            Some(states) => StateSet::from_states(n, states.iter().copied())
                .ok_or_else(|| Error::Parse("initial_set contains an unknown state".into()))?,
        };
        Ok((model, initial))
    }

    pub fn from_model(model: &Model, initial: Option<&StateSet>) -> Self {
        let states = match model.labels() {
            Some(labels) => StatesField::Labels(labels.to_vec()),
            None => StatesField::Count(model.n_states()),
        };
        let alpha = model.alpha();
        let alpha = if alpha.iter().all(|&a| a == alpha[0]) {
            AlphaField::Scalar(alpha[0])
        } else {
            AlphaField::PerState(alpha.to_vec())
        };
        Self {
            states,
            transitions: model.transitions().triplets().collect(),
            alpha,
            payoff: model.payoff().to_vec(),
            initial_set: initial.filter(|s| !s.is_full()).map(|s| s.iter().collect()),
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn scalar_alpha_broadcasts() {
        let file = ModelFile::from_json(
            r#"{"states": 2, "transitions": [[0,1,1.0],[1,1,1]], "alpha": 0.5, "payoff": [1, 2]}"#,
        )
        .unwrap();
        let (model, initial) = file.into_model().unwrap();
        assert_eq!(model.alpha(), &[0.5, 0.5]);
        assert!(initial.is_full());
    }

    #[test]
    fn labels_and_initial_set() {
        let file = ModelFile::from_json(
            r#"{"states": ["x","y"], "transitions": [[0,0,1],[1,1,1]], "alpha": [1, 0.9], "payoff": [0, 1], "initial_set": [1]}"#,
        )
        .unwrap();
        let (model, initial) = file.clone().into_model().unwrap();
        assert_eq!(model.label(1), "y");
        assert_eq!(initial.iter().collect::<Vec<_>>(), vec![1]);
        assert_eq!(ModelFile::from_model(&model, Some(&initial)), file);
    }

    #[test]
    fn invalid_rows_surface_as_model_errors() {
        let file =
            ModelFile::from_json(r#"{"states": 1, "transitions": [[0,0,0.9]], "alpha": 1, "payoff": [0]}"#).unwrap();
        assert!(matches!(file.into_model(), Err(Error::RowNotStochastic { row: 0, .. })));
        assert!(matches!(ModelFile::from_json("{"), Err(Error::Parse(_))));
    }
}
