use std::fs;
use std::path::Path;

use serde::{Deserialize, Serialize};

use super::{Instance, ModelError};

/// On-disk instance layout; `transitions[j][0]` is the no-purchase weight.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct InstanceFile {
    pub n: usize,
    pub revenues: Vec<f64>,
    pub arrivals: Vec<f64>,
    pub transitions: Vec<Vec<f64>>,
}

impl InstanceFile {
    pub fn from_instance(inst: &Instance) -> Self {
        Self {
            n: inst.n(),
            revenues: inst.revenues().to_vec(),
            arrivals: inst.arrivals().to_vec(),
            transitions: (0..inst.n()).map(|j| inst.row(j)).collect(),
        }
    }

    pub fn into_instance(self) -> Result<Instance, ModelError> {
        if self.revenues.len() != self.n {
            return Err(ModelError::Dimension(format!(
                "n = {} but {} revenues given",
                self.n,
                self.revenues.len()
            )));
        }
        Instance::from_rows(self.revenues, self.arrivals, &self.transitions)
    }

    pub fn to_json(&self) -> String {
        serde_json::to_string_pretty(self).expect("plain numeric data serializes")
    }

    pub fn from_json(text: &str) -> Result<Self, ModelError> {
        Ok(serde_json::from_str(text)?)
    }
}

impl Instance {
    pub fn to_json(&self) -> String {
        InstanceFile::from_instance(self).to_json()
    }

    pub fn from_json(text: &str) -> Result<Self, ModelError> {
        InstanceFile::from_json(text)?.into_instance()
    }

    pub fn read_json(path: impl AsRef<Path>) -> Result<Self, ModelError> {
        Self::from_json(&fs::read_to_string(path)?)
    }

    pub fn write_json(&self, path: impl AsRef<Path>) -> Result<(), ModelError> {
        fs::write(path, self.to_json())?;
        Ok(())
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::model::regularity_example;

    #[test]
    fn json_round_trip_is_exact() {
        let rows = vec![vec![0.1, 0.2, 0.7], vec![1.0 / 3.0, 0.0, 2.0 / 3.0]];
        let inst = Instance::from_rows(vec![1.0 / 7.0, 1e-300], vec![0.3, 0.7], &rows).unwrap();
        let back = Instance::from_json(&inst.to_json()).unwrap();
        assert_eq!(back, inst);
        let ex = regularity_example();
        assert_eq!(Instance::from_json(&ex.to_json()).unwrap(), ex);
    }

    #[test]
    fn mismatched_n_rejected() {
        let text = r#"{"n": 3, "revenues": [1, 2], "arrivals": [0.5, 0.5],
            "transitions": [[1, 0, 0], [1, 0, 0]]}"#;
        assert!(matches!(
            Instance::from_json(text),
            Err(ModelError::Dimension(_))
        ));
        assert!(matches!(Instance::from_json("{"), Err(ModelError::Json(_))));
    }
}
