//! JSON-in, JSON-out operations behind the browser bindings.

use rigiscope::polytopes::{canonical_polytope, flexible_example};
use rigiscope::rigidity::{motion_space, rigidity_matrix, rigidity_verdict};
use rigiscope::{Convention, Framework, GeometrySpec, Model, Tolerance, Verdict};
use serde::{Deserialize, Serialize};

/// A planar framework as the page holds it.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct Sketch {
    pub points: Vec<[f64; 2]>,
    pub edges: Vec<[usize; 2]>,
}

pub const MODELS: [Model; 4] = [
    Model::Euclidean,
    Model::ProjSphere,
    Model::ProjHyperbolic,
    Model::ProjExteriorHyperbolic,
];

#[derive(Debug, Serialize)]
pub struct Analysis {
    pub model: Model,
    pub verdict: Verdict,
    pub rank: usize,
    pub motion_dim: usize,
    pub trivial_dim: usize,
    pub internal_dim: usize,
    pub stress_dim: usize,
    /// Internal flexes as one velocity per vertex, each scaled to unit max length.
    pub flexes: Vec<Vec<[f64; 2]>>,
}

#[derive(Debug, Serialize)]
pub struct ModelVerdict {
    pub model: Model,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub verdict: Option<Verdict>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub rank: Option<usize>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub internal_dim: Option<usize>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub error: Option<String>,
}

fn parse_sketch(json: &str) -> Result<Sketch, String> {
    serde_json::from_str(json).map_err(|e| format!("bad sketch: {e}"))
}

fn model(name: &str) -> Result<Model, String> {
    match Model::from_name(name) {
        Some(m) if MODELS.contains(&m) => Ok(m),
        _ => Err(format!(
            "model {name:?} is not available in the planar demo"
        )),
    }
}

fn framework(sketch: &Sketch, model: Model) -> Result<Framework, String> {
    let points = sketch.points.iter().map(|p| p.to_vec()).collect();
    let edges = sketch.edges.iter().map(|e| (e[0], e[1])).collect();
    Framework::new(
        GeometrySpec::for_model(model, 2),
        Convention::Model,
        points,
        edges,
    )
    .map_err(|e| e.to_string())
}

pub fn analyze(sketch_json: &str, model_name: &str) -> Result<String, String> {
    let sketch = parse_sketch(sketch_json)?;
    let model = model(model_name)?;
    let tol = Tolerance::default();
    let fw = framework(&sketch, model)?;
    let report = rigidity_verdict(&fw, &tol).map_err(|e| e.to_string())?;
    let m = rigidity_matrix(&fw, &tol).map_err(|e| e.to_string())?;
    let flex = motion_space(&m, &tol)
        .map_err(|e| e.to_string())?
        .internal_flexes();
    let flexes = flex
        .column_iter()
        .map(|c| {
            let arrows: Vec<[f64; 2]> = c.as_slice().chunks(2).map(|v| [v[0], v[1]]).collect();
            let longest = arrows.iter().map(|a| a[0].hypot(a[1])).fold(0.0, f64::max);
            arrows
                .iter()
                .map(|a| [a[0] / longest, a[1] / longest])
                .collect()
        })
        .collect();
    let analysis = Analysis {
        model,
        verdict: report.verdict,
        rank: report.rank,
        motion_dim: report.motion_dim,
        trivial_dim: report.trivial_dim,
        internal_dim: report.internal_dim,
        stress_dim: report.stress_dim,
        flexes,
    };
    Ok(serde_json::to_string(&analysis).expect("serializable"))
}

/// Verdicts for the same coordinates read in every planar model.
pub fn compare(sketch_json: &str) -> Result<String, String> {
    let sketch = parse_sketch(sketch_json)?;
    let tol = Tolerance::default();
    let rows: Vec<ModelVerdict> = MODELS
        .iter()
        .map(|&m| {
            let result = framework(&sketch, m)
                .and_then(|fw| rigidity_verdict(&fw, &tol).map_err(|e| e.to_string()));
            match result {
                Ok(r) => ModelVerdict {
                    model: m,
                    verdict: Some(r.verdict),
                    rank: Some(r.rank),
                    internal_dim: Some(r.internal_dim),
                    error: None,
                },
                Err(e) => ModelVerdict {
                    model: m,
                    verdict: None,
                    rank: None,
                    internal_dim: None,
                    error: Some(e),
                },
            }
        })
        .collect();
    Ok(serde_json::to_string(&rows).expect("serializable"))
}

/// Planar example frameworks, scaled.
pub fn example(name: &str, scale: f64) -> Result<String, String> {
    let tol = Tolerance::default();
    let fw = match name {
        "triangle" => canonical_polytope("simplex(2)", &GeometrySpec::euclidean(2), scale, &tol)
            .map_err(|e| e.to_string())?,
        _ => {
            let fw = flexible_example(name).map_err(|e| e.to_string())?;
            fw.with_points(
                fw.points
                    .iter()
                    .map(|p| p.iter().map(|x| x * scale).collect())
                    .collect(),
            )
        }
    };
    if fw.dimension() != 2 {
        return Err(format!("{name} is not planar"));
    }
    let sketch = Sketch {
        points: fw.points.iter().map(|p| [p[0], p[1]]).collect(),
        edges: fw.graph.edges.iter().map(|&(i, j)| [i, j]).collect(),
    };
    Ok(serde_json::to_string(&sketch).expect("serializable"))
}
