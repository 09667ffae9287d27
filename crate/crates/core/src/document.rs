//! JSON channel documents: one channel in any representation, tagged with
//! the basis and convention needed to interpret it.
//!
//! ```json
//! {
//!   "representation": "chi",
//!   "basis_kind": "pauli",
//!   "convention": "trace",
//!   "dim": 2,
//!   "payload": {"rows": 4, "cols": 4, "entries": [[re, im], ...]},
//!   "metadata": {"note": "free-form strings"}
//! }
//! ```
//!
//! `payload` is a single matrix for `dynamical` and `chi`, and a list of
//! matrices for `kraus`.

use std::collections::BTreeMap;

use serde::{Deserialize, Serialize};

use crate::basis::{BasisKind, OperatorBasis};
use crate::channel::{
    chi_from_kraus, dynamical_from_kraus, kraus_from_chi, kraus_from_dynamical, ChiConvention, ChiMatrix,
    DynamicalMatrix, KrausSet,
};
use crate::error::{Error, Result};
use crate::matrix::ComplexMatrix;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Representation {
    Dynamical,
    Kraus,
    Chi,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(untagged)]
pub enum Payload {
    Matrix(ComplexMatrix<f64>),
    List(Vec<ComplexMatrix<f64>>),
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ChannelDocument {
    pub representation: Representation,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub basis_kind: Option<BasisKind>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub convention: Option<ChiConvention>,
    pub dim: usize,
    pub payload: Payload,
    #[serde(default)]
    pub metadata: BTreeMap<String, String>,
}

/// A channel in one of its three representations.
#[derive(Debug, Clone, PartialEq)]
pub enum Channel {
    Dynamical(DynamicalMatrix<f64>),
    Kraus(KrausSet<f64>),
    Chi(ChiMatrix<f64>),
}

impl Channel {
    pub fn dim(&self) -> usize {
        match self {
            Channel::Dynamical(b) => b.dim(),
            Channel::Kraus(k) => k.dim(),
            Channel::Chi(c) => c.dim(),
        }
    }

    pub fn representation(&self) -> Representation {
        match self {
            Channel::Dynamical(_) => Representation::Dynamical,
            Channel::Kraus(_) => Representation::Kraus,
            Channel::Chi(_) => Representation::Chi,
        }
    }

    pub fn to_kraus(&self, tol: f64) -> Result<KrausSet<f64>> {
        match self {
            Channel::Dynamical(b) => kraus_from_dynamical(b, tol),
            Channel::Kraus(k) => Ok(k.clone()),
            Channel::Chi(c) => kraus_from_chi(c, &OperatorBasis::for_kind(c.basis_kind(), c.dim())?, tol),
        }
    }

    pub fn to_dynamical(&self, tol: f64) -> Result<DynamicalMatrix<f64>> {
        match self {
            Channel::Dynamical(b) => Ok(b.clone()),
            other => Ok(dynamical_from_kraus(&other.to_kraus(tol)?)),
        }
    }

    pub fn to_chi(&self, kind: BasisKind, convention: ChiConvention, tol: f64) -> Result<ChiMatrix<f64>> {
        let basis = OperatorBasis::for_kind(kind, self.dim())?;
        match self {
            Channel::Chi(c) if c.basis_kind() == kind => c.to_convention(convention, &basis),
            other => chi_from_kraus(&other.to_kraus(tol)?, &basis, convention),
        }
    }

    /// Converts to `target`; `kind` and `convention` only matter for chi.
    pub fn convert(
        &self,
        target: Representation,
        kind: BasisKind,
        convention: ChiConvention,
        tol: f64,
    ) -> Result<Channel> {
        Ok(match target {
            Representation::Dynamical => Channel::Dynamical(self.to_dynamical(tol)?),
            Representation::Kraus => Channel::Kraus(self.to_kraus(tol)?),
            Representation::Chi => Channel::Chi(self.to_chi(kind, convention, tol)?),
        })
    }
}

impl ChannelDocument {
    pub fn from_channel(channel: &Channel) -> Self {
        let (basis_kind, convention, payload) = match channel {
            Channel::Dynamical(b) => (None, None, Payload::Matrix(b.matrix().clone())),
            Channel::Kraus(k) => (None, None, Payload::List(k.operators().to_vec())),
            Channel::Chi(c) => (Some(c.basis_kind()), Some(c.convention()), Payload::Matrix(c.matrix().clone())),
        };
        Self {
            representation: channel.representation(),
            basis_kind,
            convention,
            dim: channel.dim(),
            payload,
            metadata: BTreeMap::new(),
        }
    }

    pub fn with_metadata(mut self, key: impl Into<String>, value: impl Into<String>) -> Self {
        self.metadata.insert(key.into(), value.into());
        self
    }

    /// Validates the payload against `representation` and `dim`.
    pub fn to_channel(&self) -> Result<Channel> {
        let check_dim = |d: usize| {
            if d != self.dim {
                Err(Error::Dimension(format!("document declares dim {} but payload has dim {d}", self.dim)))
            } else {
                Ok(())
            }
        };
        let single = || match &self.payload {
            Payload::Matrix(m) => Ok(m.clone()),
            Payload::List(_) => Err(Error::Format(format!(
                "{:?} documents carry a single matrix payload",
                self.representation
            ))),
        };
        let channel = match self.representation {
            Representation::Dynamical => Channel::Dynamical(DynamicalMatrix::new(single()?)?),
            Representation::Chi => {
                let kind = self
                    .basis_kind
                    .ok_or_else(|| Error::Format("chi documents need a basis_kind".into()))?;
                Channel::Chi(ChiMatrix::new(single()?, kind, self.convention.unwrap_or_default())?)
            }
            Representation::Kraus => match &self.payload {
                Payload::List(ops) => Channel::Kraus(KrausSet::new(ops.clone())?),
                Payload::Matrix(m) => Channel::Kraus(KrausSet::new(vec![m.clone()])?),
            },
        };
        check_dim(channel.dim())?;
        Ok(channel)
    }

    pub fn to_json(&self) -> String {
        let mut s = serde_json::to_string_pretty(self).expect("channel documents serialize");
        s.push('\n');
        s
    }

    pub fn from_json(text: &str) -> Result<Self> {
        serde_json::from_str(text).map_err(|e| Error::Format(e.to_string()))
    }
}

/// Input accepted by the analysis front end: a bare matrix or a channel.
#[derive(Debug, Clone)]
pub enum AnalysisInput {
    Matrix(ComplexMatrix<f64>),
    Channel(ChannelDocument),
}

impl AnalysisInput {
    pub fn from_json(text: &str) -> Result<Self> {
        let value: serde_json::Value = serde_json::from_str(text).map_err(|e| Error::Format(e.to_string()))?;
        if value.get("representation").is_some() {
            serde_json::from_value(value)
                .map(AnalysisInput::Channel)
                .map_err(|e| Error::Format(e.to_string()))
        } else {
            serde_json::from_value(value)
                .map(AnalysisInput::Matrix)
                .map_err(|e| Error::Format(e.to_string()))
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::basis::pauli_tensor_basis;
    use num_complex::Complex;

    fn reset() -> KrausSet<f64> {
        KrausSet::new(vec![
            ComplexMatrix::single_entry(2, 2, 0, 0, Complex::new(1.0, 0.0)),
            ComplexMatrix::single_entry(2, 2, 0, 1, Complex::new(1.0, 0.0)),
        ])
        .unwrap()
    }

    #[test]
    fn json_round_trip_for_every_representation() {
        let k = Channel::Kraus(reset());
        for target in [Representation::Dynamical, Representation::Kraus, Representation::Chi] {
            let ch = k.convert(target, BasisKind::PauliTensor, ChiConvention::TraceCoefficient, 1e-9).unwrap();
            let doc = ChannelDocument::from_channel(&ch).with_metadata("source", "test");
            let back = ChannelDocument::from_json(&doc.to_json()).unwrap();
            assert_eq!(back, doc);
            assert_eq!(back.to_channel().unwrap(), ch);
        }
    }

    #[test]
    fn chi_convention_conversion_through_documents() {
        let chi = Channel::Kraus(reset()).to_chi(BasisKind::PauliTensor, ChiConvention::TraceCoefficient, 1e-9).unwrap();
        let ortho = Channel::Chi(chi.clone()).to_chi(BasisKind::PauliTensor, ChiConvention::Orthonormal, 1e-9).unwrap();
        let basis = pauli_tensor_basis::<f64>(1).unwrap();
        assert_eq!(ortho, chi.to_convention(ChiConvention::Orthonormal, &basis).unwrap());
    }

    #[test]
    fn malformed_documents_are_rejected() {
        let mut doc = ChannelDocument::from_channel(&Channel::Kraus(reset()));
        doc.dim = 3;
        assert!(matches!(doc.to_channel(), Err(Error::Dimension(_))));
        let chi = Channel::Kraus(reset()).convert(Representation::Chi, BasisKind::PauliTensor, ChiConvention::TraceCoefficient, 1e-9).unwrap();
        let mut doc = ChannelDocument::from_channel(&chi);
        doc.basis_kind = None;
        assert!(matches!(doc.to_channel(), Err(Error::Format(_))));
        assert!(ChannelDocument::from_json("{\"representation\": \"nope\"}").is_err());
    }

    #[test]
    fn analysis_input_detects_shape() {
        let m = ComplexMatrix::<f64>::identity(2);
        let text = serde_json::to_string(&m).unwrap();
        assert!(matches!(AnalysisInput::from_json(&text).unwrap(), AnalysisInput::Matrix(_)));
        let doc = ChannelDocument::from_channel(&Channel::Kraus(reset())).to_json();
        assert!(matches!(AnalysisInput::from_json(&doc).unwrap(), AnalysisInput::Channel(_)));
    }
}
