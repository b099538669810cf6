//! Linear time-invariant models of a network under data-injection attack.
//!
//! Two families are supported: first-order consensus `ẋ = −Lx + Bζ` and the
//! linearized swing equation of a power grid. Both start from `x(0) = 0`.

use std::path::Path;

use nalgebra::{DMatrix, DVector};
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::graph::{laplacian, Graph};
use crate::sets::{AttackSet, MonitorSet, VertexSet};

const IEEE14_JSON: &str = include_str!("../data/ieee14.json");

#[derive(Debug, Clone, PartialEq)]
pub struct SystemModel {
    pub state_dim: usize,
    /// Closed-loop dynamics.
    pub a_mat: DMatrix<f64>,
    /// One column per attacked vertex.
    pub b_cols: DMatrix<f64>,
    /// Performance outputs, one selector row each.
    pub perf_rows: DMatrix<f64>,
    /// Monitor outputs, one selector row per monitored vertex.
    pub monitor_rows: DMatrix<f64>,
    /// Human-readable name of every state coordinate.
    pub labels: Vec<String>,
}

impl SystemModel {
    pub fn attack_dim(&self) -> usize {
        self.b_cols.ncols()
    }

    pub fn monitor_count(&self) -> usize {
        self.monitor_rows.nrows()
    }

    pub fn check_dimensions(&self) -> Result<()> {
        let s = self.state_dim;
        let ok = self.a_mat.shape() == (s, s)
            && self.b_cols.nrows() == s
            && self.perf_rows.ncols() == s
            && self.monitor_rows.ncols() == s
            && self.labels.len() == s;
        if ok {
            Ok(())
        } else {
            Err(Error::DimensionMismatch(format!(
                "state_dim {s}, A {:?}, B {:?}, perf {:?}, monitors {:?}, {} labels",
                self.a_mat.shape(),
                self.b_cols.shape(),
                self.perf_rows.shape(),
                self.monitor_rows.shape(),
                self.labels.len()
            )))
        }
    }
}

fn unit_row(dim: usize, k: usize) -> DVector<f64> {
    let mut e = DVector::zeros(dim);
    e[k] = 1.0;
    e
}

fn selector(dim: usize, coords: impl Iterator<Item = usize>) -> DMatrix<f64> {
    let rows: Vec<_> = coords.map(|k| unit_row(dim, k).transpose()).collect();
    if rows.is_empty() {
        DMatrix::zeros(0, dim)
    } else {
        DMatrix::from_rows(&rows)
    }
}

fn check_set(set: &VertexSet, n: usize) -> Result<()> {
    match set.max_id() {
        Some(v) if v >= n => Err(Error::VertexOutOfRange { vertex: v + 1, n }),
        _ => Ok(()),
    }
}

/// `ẋ = −Lx + B(𝒜)ζ`, performance `y = x`, monitors `y_m = e_mᵀx`.
pub fn build_consensus_model(
    g: &Graph,
    attack: &AttackSet,
    monitors: &MonitorSet,
) -> Result<SystemModel> {
    let n = g.n();
    check_set(attack, n)?;
    check_set(monitors, n)?;
    if !g.is_connected() {
        return Err(Error::Disconnected);
    }
    let mut b_cols = DMatrix::zeros(n, attack.len());
    for (c, &v) in attack.ids().iter().enumerate() {
        b_cols[(v, c)] = 1.0;
    }
    Ok(SystemModel {
        state_dim: n,
        a_mat: -laplacian(g).matrix,
        b_cols,
        perf_rows: DMatrix::identity(n, n),
        monitor_rows: selector(n, monitors.ids().iter().copied()),
        labels: (1..=n).map(|v| format!("x{v}")).collect(),
    })
}

/// Per-bus inertia and damping with susceptance-weighted lines.
#[derive(Debug, Clone, PartialEq)]
pub struct SwingParams {
    pub inertia: Vec<f64>,
    pub damping: Vec<f64>,
    /// 0-based `(i, j, |ℓ_ij|)` with `i < j`.
    pub susceptance_edges: Vec<(usize, usize, f64)>,
}

impl SwingParams {
    pub fn new(
        inertia: Vec<f64>,
        damping: Vec<f64>,
        susceptance_edges: Vec<(usize, usize, f64)>,
    ) -> Result<Self> {
        let p = SwingParams {
            inertia,
            damping,
            susceptance_edges,
        };
        p.validate()?;
        Ok(p)
    }

    pub fn bus_count(&self) -> usize {
        self.inertia.len()
    }

    pub fn validate(&self) -> Result<()> {
        let n = self.inertia.len();
        if n == 0 || self.damping.len() != n {
            return Err(Error::InvalidParameter(format!(
                "{} inertias and {} damping values",
                n,
                self.damping.len()
            )));
        }
        if let Some((bus, &m)) = self
            .inertia
            .iter()
            .enumerate()
            .find(|(_, &m)| !(m > 0.0 && m.is_finite()))
        {
            return Err(Error::InvalidParameter(format!(
                "inertia of bus {} is {m}; must be positive",
                bus + 1
            )));
        }
        if let Some((bus, &d)) = self
            .damping
            .iter()
            .enumerate()
            .find(|(_, &d)| !(d >= 0.0 && d.is_finite()))
        {
            return Err(Error::InvalidParameter(format!(
                "damping of bus {} is {d}; must be non-negative",
                bus + 1
            )));
        }
        self.network().map(|_| ())
    }

    /// Network weighted by line susceptance magnitudes.
    pub fn network(&self) -> Result<Graph> {
        Graph::new(self.bus_count(), self.susceptance_edges.iter().copied())
    }

    pub fn to_file(&self) -> SwingFile {
        SwingFile {
            name: None,
            version: 1,
            buses: self
                .inertia
                .iter()
                .zip(&self.damping)
                .enumerate()
                .map(|(k, (&inertia, &damping))| BusEntry {
                    bus: k + 1,
                    inertia,
                    damping,
                })
                .collect(),
            lines: self
                .susceptance_edges
                .iter()
                .map(|&(i, j, b)| (i + 1, j + 1, b))
                .collect(),
        }
    }

    pub fn from_file(file: &SwingFile) -> Result<Self> {
        let n = file.buses.len();
        let mut inertia = vec![f64::NAN; n];
        let mut damping = vec![f64::NAN; n];
        for entry in &file.buses {
            if entry.bus == 0 || entry.bus > n {
                return Err(Error::VertexOutOfRange { vertex: entry.bus, n });
            }
            if !inertia[entry.bus - 1].is_nan() {
                return Err(Error::DuplicateVertex(entry.bus));
            }
            inertia[entry.bus - 1] = entry.inertia;
            damping[entry.bus - 1] = entry.damping;
        }
        let mut edges = Vec::with_capacity(file.lines.len());
        for &(i, j, b) in &file.lines {
            if i == 0 || j == 0 || i > n || j > n {
                return Err(Error::VertexOutOfRange { vertex: i.max(j), n });
            }
            edges.push((i.min(j) - 1, i.max(j) - 1, b.abs()));
        }
        SwingParams::new(inertia, damping, edges)
    }

    pub fn load(path: impl AsRef<Path>) -> Result<Self> {
        let path = path.as_ref();
        let text = std::fs::read_to_string(path).map_err(|e| Error::io(path, e))?;
        SwingParams::from_file(&serde_json::from_str(&text)?)
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct BusEntry {
    pub bus: usize,
    pub inertia: f64,
    pub damping: f64,
}

/// JSON layout of a swing-equation network: 1-based buses and lines
/// `[i, j, susceptance]`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SwingFile {
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub name: Option<String>,
    pub version: u32,
    pub buses: Vec<BusEntry>,
    pub lines: Vec<(usize, usize, f64)>,
}

/// The bundled IEEE 14-bus parameters.
pub fn load_ieee14() -> Result<SwingParams> {
    parse_ieee14(IEEE14_JSON)
}

fn parse_ieee14(text: &str) -> Result<SwingParams> {
    let file: SwingFile =
        serde_json::from_str(text).map_err(|e| Error::CorruptData(format!("ieee14.json: {e}")))?;
    if file.version != 1 {
        return Err(Error::CorruptData(format!(
            "ieee14.json: unsupported version {}",
            file.version
        )));
    }
    let params = SwingParams::from_file(&file)
        .map_err(|e| Error::CorruptData(format!("ieee14.json: {e}")))?;
    if params.bus_count() != 14 || params.susceptance_edges.len() != 20 {
        return Err(Error::CorruptData(format!(
            "ieee14.json: expected 14 buses and 20 lines, found {} and {}",
            params.bus_count(),
            params.susceptance_edges.len()
        )));
    }
    Ok(params)
}

/// Linearized swing dynamics with state `[θ; θ̇]`:
/// `A = [[0, I], [−M⁻¹L, −M⁻¹D]]`, attack torque `e_a / M_a` on the
/// acceleration of each attacked bus, angles as performance and monitor
/// outputs.
pub fn build_swing_model(
    params: &SwingParams,
    attack: &AttackSet,
    monitors: &MonitorSet,
) -> Result<SystemModel> {
    params.validate()?;
    let n = params.bus_count();
    check_set(attack, n)?;
    check_set(monitors, n)?;
    let l = laplacian(&params.network()?).matrix;
    let s = 2 * n;
    let mut a = DMatrix::zeros(s, s);
    for i in 0..n {
        a[(i, n + i)] = 1.0;
        let inv_m = 1.0 / params.inertia[i];
        for j in 0..n {
            a[(n + i, j)] = -inv_m * l[(i, j)];
        }
        a[(n + i, n + i)] = -inv_m * params.damping[i];
    }
    let mut b_cols = DMatrix::zeros(s, attack.len());
    for (c, &bus) in attack.ids().iter().enumerate() {
        b_cols[(n + bus, c)] = 1.0 / params.inertia[bus];
    }
    let labels = (1..=n)
        .map(|b| format!("theta{b}"))
        .chain((1..=n).map(|b| format!("omega{b}")))
        .collect();
    Ok(SystemModel {
        state_dim: s,
        a_mat: a,
        b_cols,
        perf_rows: selector(s, 0..n),
        monitor_rows: selector(s, monitors.ids().iter().copied()),
        labels,
    })
}

/// A network whose attacked/monitored model can be rebuilt for any vertex sets.
#[derive(Debug, Clone, PartialEq)]
pub enum Network {
    Consensus(Graph),
    Swing(SwingParams),
}

impl Network {
    pub fn vertex_count(&self) -> usize {
        match self {
            Network::Consensus(g) => g.n(),
            Network::Swing(p) => p.bus_count(),
        }
    }

    /// Interconnection graph with its native weights.
    pub fn graph(&self) -> Result<Graph> {
        match self {
            Network::Consensus(g) => Ok(g.clone()),
            Network::Swing(p) => p.network(),
        }
    }

    pub fn build(&self, attack: &AttackSet, monitors: &MonitorSet) -> Result<SystemModel> {
        match self {
            Network::Consensus(g) => build_consensus_model(g, attack, monitors),
            Network::Swing(p) => build_swing_model(p, attack, monitors),
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::graph::fixtures::*;
    use nalgebra::SymmetricEigen;

    fn set(ids: &[usize], n: usize) -> VertexSet {
        VertexSet::from_one_based(ids, n).unwrap()
    }

    #[test]
    fn consensus_examples() {
        let m = build_consensus_model(&path(3), &set(&[1], 3), &set(&[3], 3)).unwrap();
        let l = DMatrix::from_row_slice(3, 3, &[1., -1., 0., -1., 2., -1., 0., -1., 1.]);
        assert_eq!(m.a_mat, -l);
        assert_eq!(m.b_cols, DMatrix::from_column_slice(3, 1, &[1., 0., 0.]));
        assert_eq!(m.monitor_rows, DMatrix::from_row_slice(1, 3, &[0., 0., 1.]));
        assert_eq!(m.perf_rows, DMatrix::identity(3, 3));
        m.check_dimensions().unwrap();

        let m = build_consensus_model(&complete(2), &set(&[2], 2), &set(&[2], 2)).unwrap();
        assert_eq!(m.a_mat, DMatrix::from_row_slice(2, 2, &[-1., 1., 1., -1.]));
        assert_eq!(m.b_cols, DMatrix::from_column_slice(2, 1, &[0., 1.]));

        let single = Graph::new(1, []).unwrap();
        let m = build_consensus_model(&single, &set(&[1], 1), &set(&[1], 1)).unwrap();
        assert_eq!(m.a_mat, DMatrix::zeros(1, 1));
        assert_eq!(m.b_cols, DMatrix::from_element(1, 1, 1.0));
    }

    #[test]
    fn consensus_rejects_bad_sets() {
        let g = path(3);
        let out = VertexSet::new(vec![3], 4).unwrap();
        assert!(matches!(
            build_consensus_model(&g, &out, &set(&[1], 3)),
            Err(Error::VertexOutOfRange { vertex: 4, n: 3 })
        ));
        assert!(build_consensus_model(&Graph::new(2, []).unwrap(), &set(&[1], 2), &set(&[1], 2)).is_err());
    }

    #[test]
    fn consensus_matrix_is_nsd_with_single_zero_mode() {
        let er = crate::graph::generate_erdos_renyi(12, 0.4, crate::graph::RngSeed(3)).unwrap();
        let m = build_consensus_model(&er.graph, &set(&[1], 12), &set(&[2], 12)).unwrap();
        assert_eq!(m.a_mat, m.a_mat.transpose());
        let eig = SymmetricEigen::new(m.a_mat.clone()).eigenvalues;
        assert!(eig.iter().all(|&l| l < 1e-12));
        assert_eq!(eig.iter().filter(|&&l| l.abs() < 1e-9).count(), 1);
    }

    #[test]
    fn swing_block_structure() {
        let p = SwingParams::new(vec![1.0; 3], vec![0.0; 3], vec![(0, 1, 1.0), (1, 2, 1.0)]).unwrap();
        let m = build_swing_model(&p, &set(&[2], 3), &set(&[1], 3)).unwrap();
        let l = DMatrix::from_row_slice(3, 3, &[1., -1., 0., -1., 2., -1., 0., -1., 1.]);
        assert_eq!(m.a_mat.view((3, 0), (3, 3)), -l);
        assert_eq!(m.a_mat.view((3, 3), (3, 3)), DMatrix::<f64>::zeros(3, 3));
        assert_eq!(m.a_mat.view((0, 3), (3, 3)), DMatrix::<f64>::identity(3, 3));
        assert_eq!(m.b_cols[(4, 0)], 1.0);
        assert_eq!(m.monitor_rows, DMatrix::from_row_slice(1, 6, &[1., 0., 0., 0., 0., 0.]));
        m.check_dimensions().unwrap();
    }

    #[test]
    fn swing_rejects_bad_params() {
        assert!(SwingParams::new(vec![1.0, 0.0], vec![0.0; 2], vec![(0, 1, 1.0)]).is_err());
        assert!(SwingParams::new(vec![1.0, 1.0], vec![0.0], vec![(0, 1, 1.0)]).is_err());
        let p = SwingParams::new(vec![1.0; 2], vec![0.0; 2], vec![(0, 1, 1.0)]).unwrap();
        let unknown = VertexSet::new(vec![2], 3).unwrap();
        assert!(build_swing_model(&p, &unknown, &set(&[1], 2)).is_err());
    }

    #[test]
    fn ieee14_matches_table() {
        let p = load_ieee14().unwrap();
        assert_eq!(p.susceptance_edges.len(), 20);
        assert_eq!(p.bus_count(), 14);
        assert_eq!(p.susceptance_edges[0], (0, 1, 8.2838));
        assert_eq!((p.inertia[0], p.damping[0]), (1.060, 0.0));
        assert_eq!((p.inertia[13], p.damping[13]), (1.036, 16.04));
        assert!(p.susceptance_edges.contains(&(12, 13, 48.7228)));
    }

    #[test]
    fn ieee14_swing_model_dimensions_and_bus4_degree() {
        let p = load_ieee14().unwrap();
        let m = build_swing_model(&p, &set(&[1], 14), &set(&[2], 14)).unwrap();
        assert_eq!(m.state_dim, 28);
        let l = laplacian(&p.network().unwrap()).matrix;
        let expected = 24.6848 + 23.9442 + 5.8954 + 29.2768 + 77.8652;
        assert!((l[(3, 3)] - expected).abs() < 1e-12);
        assert!((l[(3, 3)] - 161.6664).abs() < 1e-9);
    }

    #[test]
    fn swing_rigid_rotation_is_an_equilibrium() {
        let p = load_ieee14().unwrap();
        let m = build_swing_model(&p, &set(&[3], 14), &set(&[4], 14)).unwrap();
        let mut v = DVector::zeros(28);
        v.rows_mut(0, 14).fill(1.0);
        assert!((&m.a_mat * v).amax() < 1e-12);
    }

    #[test]
    fn ieee14_round_trips_through_json() {
        let p = load_ieee14().unwrap();
        let text = serde_json::to_string(&p.to_file()).unwrap();
        let back = SwingParams::from_file(&serde_json::from_str(&text).unwrap()).unwrap();
        assert_eq!(back, p);
    }

    #[test]
    fn corrupt_asset_is_reported() {
        assert!(matches!(parse_ieee14("{"), Err(Error::CorruptData(_))));
        let mut file = load_ieee14().unwrap().to_file();
        file.lines.pop();
        let text = serde_json::to_string(&file).unwrap();
        assert!(matches!(parse_ieee14(&text), Err(Error::CorruptData(_))));
    }
}
