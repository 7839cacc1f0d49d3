use std::path::Path;

use indexmap::IndexMap;
use serde::{Deserialize, Serialize};
use thiserror::Error;

use super::{Frame, KripkeError, Model};

#[derive(Debug, Error)]
pub enum ModelFileError {
    #[error("cannot read {path}: {source}")]
    Io {
        path: String,
        source: std::io::Error,
    },
    #[error("malformed model file: {0}")]
    Json(#[from] serde_json::Error),
    #[error("unsupported \"close\" value {0:?} (only \"rt\" is recognised)")]
    BadClose(String),
    #[error(transparent)]
    Kripke(#[from] KripkeError),
}

/// On-disk form of a [`Model`]:
///
/// ```json
/// {"worlds": ["w0","w1"], "relation": [["w0","w0"],["w0","w1"],["w1","w1"]],
///  "valuation": {"w0": [], "w1": ["p"]}}
/// ```
///
/// Unknown keys are rejected. `"close": "rt"` asks for the
/// reflexive-transitive closure of the relation at load time.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ModelFile {
    pub worlds: Vec<String>,
    pub relation: Vec<(String, String)>,
    pub valuation: IndexMap<String, Vec<String>>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub close: Option<String>,
}

impl ModelFile {
    pub fn from_model(m: &Model) -> Self {
        let fr = m.frame();
        ModelFile {
            worlds: fr.worlds().to_vec(),
            relation: fr.pairs(),
            valuation: (0..m.len())
                .map(|i| {
                    (
                        m.world_id(i).to_string(),
                        m.atoms_at(i).iter().cloned().collect(),
                    )
                })
                .collect(),
            close: None,
        }
    }

    pub fn into_model(self) -> Result<Model, ModelFileError> {
        let mut frame = Frame::new(self.worlds, self.relation)?;
        match self.close.as_deref() {
            None => {}
            Some("rt") => frame = frame.reflexive_transitive_closure(),
            Some(other) => return Err(ModelFileError::BadClose(other.to_string())),
        }
        let valuation = self
            .valuation
            .into_iter()
            .map(|(w, atoms)| (w, atoms.into_iter().collect()))
            .collect();
        Ok(Model::new(frame, valuation)?)
    }

    pub fn parse(text: &str) -> Result<Model, ModelFileError> {
        serde_json::from_str::<ModelFile>(text)?.into_model()
    }

    pub fn load(path: impl AsRef<Path>) -> Result<Model, ModelFileError> {
        let path = path.as_ref();
        let text = std::fs::read_to_string(path).map_err(|source| ModelFileError::Io {
            path: path.display().to_string(),
            source,
        })?;
        Self::parse(&text)
    }

    pub fn to_json(m: &Model) -> String {
        serde_json::to_string(&Self::from_model(m)).expect("model serialises")
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    const EXAMPLE: &str = r#"{"worlds": ["w0","w1"], "relation": [["w0","w0"],["w0","w1"],["w1","w1"]], "valuation": {"w0": [], "w1": ["p"]}}"#;

    #[test]
    fn reads_the_documented_example() {
        let m = ModelFile::parse(EXAMPLE).unwrap();
        assert_eq!(m.len(), 2);
        assert!(m.model_check("w0", &"<>[]p".parse().unwrap()).unwrap());
        assert_eq!(
            ModelFile::to_json(&m),
            r#"{"worlds":["w0","w1"],"relation":[["w0","w0"],["w0","w1"],["w1","w1"]],"valuation":{"w0":[],"w1":["p"]}}"#
        );
    }

    #[test]
    fn rejects_unknown_keys_and_bad_close() {
        let extra = EXAMPLE.replacen('{', r#"{"colour": 1, "#, 1);
        assert!(matches!(
            ModelFile::parse(&extra),
            Err(ModelFileError::Json(_))
        ));
        let bad = EXAMPLE.replacen('{', r#"{"close": "r", "#, 1);
        assert!(matches!(
            ModelFile::parse(&bad),
            Err(ModelFileError::BadClose(_))
        ));
    }

    #[test]
    fn closes_on_request() {
        let text = r#"{"worlds":["a","b","c"],"relation":[["a","b"],["b","c"]],"valuation":{"a":[],"b":[],"c":["p"]},"close":"rt"}"#;
        let m = ModelFile::parse(text).unwrap();
        assert!(m.frame().accesses(0, 2));
        assert!(m.frame().accesses(1, 1));
    }

    #[test]
    fn rejects_dangling_worlds() {
        let text = r#"{"worlds":["a"],"relation":[["a","z"]],"valuation":{"a":[]}}"#;
        assert!(matches!(
            ModelFile::parse(text),
            Err(ModelFileError::Kripke(KripkeError::UnknownWorld(_)))
        ));
    }
}
