use serde::{Deserialize, Serialize};

/// One evaluated decision vector. Objectives are in maximization sense.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Solution {
    pub genes: Vec<f64>,
    pub objectives: Vec<f64>,
}

/// A set of solutions with the column names used for serialization.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Front {
    pub variable_names: Vec<String>,
    pub objective_names: Vec<String>,
    pub solutions: Vec<Solution>,
}

impl Front {
    pub fn new(variable_names: Vec<String>, objective_names: Vec<String>) -> Self {
        Front {
            variable_names,
            objective_names,
            solutions: Vec::new(),
        }
    }

    pub fn len(&self) -> usize {
        self.solutions.len()
    }

    pub fn is_empty(&self) -> bool {
        self.solutions.is_empty()
    }

    pub fn num_objectives(&self) -> usize {
        self.objective_names.len()
    }

    pub fn points(&self) -> Vec<Vec<f64>> {
        self.solutions
            .iter()
            .map(|s| s.objectives.clone())
            .collect()
    }
}
