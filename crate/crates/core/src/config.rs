//! TOML model files.
//!
//! ```toml
//! label = "M1"
//! kernel = [[0.9, 0.1], [0.1, 0.9]]
//! stationary = [0.5, 0.5]          # optional, computed when absent
//!
//! [channel]
//! type = "finite"
//! m = 2
//! g = [[0.8, 0.2], [0.2, 0.8]]     # density against phi, one row per state
//! phi = [1.0, 1.0]                 # optional, counting measure when absent
//! ```
//!
//! A Gaussian channel is `type = "gaussian"` with `means` (one per state)
//! and `sigma`.

use std::path::Path;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::model::{
    stationary_distribution, ContinuousChannel, Distribution, FiniteChannel, HmmModel,
    ObservationChannel, TransitionKernel, DEFAULT_STATIONARY_TOL,
};

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ModelFile {
    pub label: String,
    pub kernel: Vec<Vec<f64>>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub stationary: Option<Vec<f64>>,
    pub channel: ChannelFile,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "type", rename_all = "lowercase", deny_unknown_fields)]
pub enum ChannelFile {
    Finite {
        m: usize,
        g: Vec<Vec<f64>>,
        #[serde(default, skip_serializing_if = "Option::is_none")]
        phi: Option<Vec<f64>>,
    },
    Gaussian {
        means: Vec<f64>,
        sigma: f64,
    },
}

impl ModelFile {
    pub fn from_model(model: &HmmModel) -> Result<Self> {
        let channel = match &model.channel {
            ObservationChannel::Finite(c) => ChannelFile::Finite {
                m: c.alphabet_size(),
                g: c.density_table().to_vec(),
                phi: Some(c.reference().to_vec()),
            },
            ObservationChannel::Continuous(c) => {
                let g = c.gaussian_params().ok_or(Error::ContinuousChannel)?;
                ChannelFile::Gaussian {
                    means: g.means.clone(),
                    sigma: g.sigma,
                }
            }
        };
        Ok(Self {
            label: model.label.clone(),
            kernel: model.kernel.rows().to_vec(),
            stationary: Some(model.stationary.weights().to_vec()),
            channel,
        })
    }

    fn channel(&self) -> Result<ObservationChannel> {
        match &self.channel {
            ChannelFile::Finite { m, g, phi } => {
                if let Some(row) = g.iter().find(|r| r.len() != *m) {
                    return Err(Error::InvalidChannel(format!(
                        "density row has {} entries, m = {m}",
                        row.len()
                    )));
                }
                let phi = phi.clone().unwrap_or_else(|| vec![1.0; *m]);
                Ok(ObservationChannel::Finite(FiniteChannel::new_unchecked(g.clone(), phi)))
            }
            ChannelFile::Gaussian { means, sigma } => Ok(ObservationChannel::Continuous(
                ContinuousChannel::gaussian(means.clone(), *sigma)?,
            )),
        }
    }

    /// Builds the model without checking its invariants. A missing
    /// stationary law is still computed, which needs a unique one.
    pub fn into_model_unchecked(self) -> Result<HmmModel> {
        let channel = self.channel()?;
        let kernel = TransitionKernel::from_rows_unchecked(self.kernel);
        let stationary = match self.stationary {
            Some(w) => Distribution::from_weights_unchecked(w),
            None => stationary_distribution(&kernel, DEFAULT_STATIONARY_TOL)?,
        };
        Ok(HmmModel::new_unchecked(kernel, stationary, channel, self.label))
    }

    pub fn into_model(self) -> Result<HmmModel> {
        let model = self.into_model_unchecked()?;
        HmmModel::new(model.kernel, model.stationary, model.channel, model.label)
    }
}

pub fn parse_model_file(text: &str) -> Result<ModelFile> {
    toml::from_str(text).map_err(|e| Error::Config(e.to_string()))
}

pub fn read_model_file(path: &Path) -> Result<ModelFile> {
    let text = std::fs::read_to_string(path)
        .map_err(|e| Error::Config(format!("{}: {e}", path.display())))?;
    parse_model_file(&text)
}

/// Reads and validates a model.
pub fn load_model(path: &Path) -> Result<HmmModel> {
    read_model_file(path)?.into_model()
}

pub fn model_to_toml(model: &HmmModel) -> Result<String> {
    toml::to_string(&ModelFile::from_model(model)?).map_err(|e| Error::Config(e.to_string()))
}

pub fn model_from_toml(text: &str) -> Result<HmmModel> {
    parse_model_file(text)?.into_model()
}
