//! Scenario files and network references as they appear on the command line.
//!
//! A network is named by `ieee14` (the bundled swing model), a path to a graph
//! or swing JSON file, or given inline. A scenario adds the attacked and
//! monitored vertices (1-based) and the two budgets:
//!
//! ```json
//! {"graph": "ieee14", "attack": [5], "monitor": [4], "delta": 1.0, "attack_energy": 1.0}
//! {"graph": {"n": 2, "edges": [[1, 2, 1.0]]}, "attack": [1], "monitor": [2]}
//! ```

use std::path::{Path, PathBuf};

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::graph::{Graph, GraphFile};
use crate::model::{load_ieee14, Network, SwingFile, SwingParams, SystemModel};
use crate::sets::{AttackSet, MonitorSet, VertexSet};
use crate::wcai::ScenarioParams;

pub const IEEE14: &str = "ieee14";

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(untagged)]
pub enum NetworkSpec {
    Named(String),
    Graph(GraphFile),
    Swing(SwingFile),
}

impl NetworkSpec {
    /// Resolves file references relative to `base`.
    pub fn resolve(&self, base: &Path) -> Result<Network> {
        match self {
            NetworkSpec::Named(name) if name.eq_ignore_ascii_case(IEEE14) => Ok(Network::Swing(load_ieee14()?)),
            NetworkSpec::Named(path) => load_network(&base.join(path)),
            NetworkSpec::Graph(g) => Ok(Network::Consensus(Graph::from_json(g)?)),
            NetworkSpec::Swing(s) => Ok(Network::Swing(SwingParams::from_file(s)?)),
        }
    }
}

/// `ieee14`, or a JSON file holding either a graph or a swing network.
pub fn load_network(path: &Path) -> Result<Network> {
    if path.as_os_str().eq_ignore_ascii_case(IEEE14) {
        return Ok(Network::Swing(load_ieee14()?));
    }
    let text = std::fs::read_to_string(path).map_err(|e| Error::io(path, e))?;
    let value: serde_json::Value = serde_json::from_str(&text)?;
    if value.get("buses").is_some() {
        Ok(Network::Swing(SwingParams::from_file(&serde_json::from_value(value)?)?))
    } else {
        Ok(Network::Consensus(Graph::from_json(&serde_json::from_value(value)?)?))
    }
}

fn one() -> f64 {
    1.0
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ScenarioFile {
    pub graph: NetworkSpec,
    pub attack: Vec<usize>,
    pub monitor: Vec<usize>,
    #[serde(default = "one")]
    pub delta: f64,
    #[serde(default = "one")]
    pub attack_energy: f64,
}

#[derive(Debug, Clone)]
pub struct Scenario {
    pub network: Network,
    pub attack: AttackSet,
    pub monitors: MonitorSet,
    pub params: ScenarioParams,
}

impl Scenario {
    pub fn from_file(file: &ScenarioFile, base: &Path) -> Result<Self> {
        let network = file.graph.resolve(base)?;
        let n = network.vertex_count();
        Ok(Scenario {
            attack: VertexSet::from_one_based(&file.attack, n)?,
            monitors: VertexSet::from_one_based(&file.monitor, n)?,
            params: ScenarioParams::new(file.delta, file.attack_energy)?,
            network,
        })
    }

    pub fn load(path: impl AsRef<Path>) -> Result<Self> {
        let path = path.as_ref();
        let text = std::fs::read_to_string(path).map_err(|e| Error::io(path, e))?;
        let file: ScenarioFile = serde_json::from_str(&text)?;
        let base = path.parent().map(Path::to_path_buf).unwrap_or_else(|| PathBuf::from("."));
        Scenario::from_file(&file, &base)
    }

    pub fn model(&self) -> Result<SystemModel> {
        self.network.build(&self.attack, &self.monitors)
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn inline_and_named_networks() {
        let s: ScenarioFile =
            serde_json::from_str(r#"{"graph": {"n": 2, "edges": [[1, 2, 1.0]]}, "attack": [1], "monitor": [2]}"#)
                .unwrap();
        let sc = Scenario::from_file(&s, Path::new(".")).unwrap();
        assert_eq!(sc.network.vertex_count(), 2);
        assert_eq!(sc.params, ScenarioParams::default());
        assert_eq!(sc.model().unwrap().state_dim, 2);

        let s: ScenarioFile =
            serde_json::from_str(r#"{"graph": "ieee14", "attack": [5], "monitor": [4], "delta": 2}"#).unwrap();
        let sc = Scenario::from_file(&s, Path::new(".")).unwrap();
        assert!(matches!(sc.network, Network::Swing(_)));
        assert_eq!(sc.params.delta, 2.0);
    }

    #[test]
    fn files_resolve_relative_to_the_scenario() {
        let dir = tempfile::tempdir().unwrap();
        Graph::new(3, [(0, 1, 1.0), (1, 2, 1.0)]).unwrap().save(dir.path().join("g.json")).unwrap();
        std::fs::write(
            dir.path().join("s.json"),
            r#"{"graph": "g.json", "attack": [1], "monitor": [3], "attack_energy": 0.5}"#,
        )
        .unwrap();
        let sc = Scenario::load(dir.path().join("s.json")).unwrap();
        assert_eq!(sc.network.vertex_count(), 3);
        assert_eq!(sc.monitors.one_based(), vec![3]);

        let swing = load_ieee14().unwrap().to_file();
        std::fs::write(dir.path().join("w.json"), serde_json::to_string(&swing).unwrap()).unwrap();
        assert!(matches!(load_network(&dir.path().join("w.json")).unwrap(), Network::Swing(_)));
        assert!(load_network(&dir.path().join("missing.json")).is_err());
    }

    #[test]
    fn rejects_bad_vertices() {
        let s: ScenarioFile =
            serde_json::from_str(r#"{"graph": {"n": 2, "edges": [[1, 2, 1.0]]}, "attack": [3], "monitor": [2]}"#)
                .unwrap();
        assert!(matches!(
            Scenario::from_file(&s, Path::new(".")),
            Err(Error::VertexOutOfRange { .. })
        ));
    }
}
