use std::path::PathBuf;

use serde::{Deserialize, Serialize};
use siegel::jordan::Kind;
use siegel::quadrature::QuadratureSpec;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize, clap::ValueEnum)]
#[serde(rename_all = "kebab-case")]
pub enum Command {
    Reproduce,
    KernelEval,
    Disintegrate,
    Clark,
    Verify,
}

#[derive(Clone, Copy, Debug, Default, PartialEq, Eq, Serialize, Deserialize, clap::ValueEnum)]
#[serde(rename_all = "lowercase")]
pub enum Format {
    #[default]
    Csv,
    Json,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize, clap::ValueEnum)]
#[serde(rename_all = "lowercase")]
pub enum Example {
    Ex1,
    Ex1bis,
    Ex6,
    Ex7,
}

#[derive(Clone, Copy, Debug, Default, PartialEq, Eq, Serialize, Deserialize, clap::ValueEnum)]
#[serde(rename_all = "lowercase")]
pub enum Suite {
    Jordan,
    Kernels,
    Measures,
    Clark,
    #[default]
    All,
}

/// Positive pluriharmonic test functions available to `disintegrate`.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize, clap::ValueEnum)]
#[serde(rename_all = "kebab-case")]
pub enum Function {
    /// Re⟨Im z, e⟩, linear and positive on every domain.
    Height,
    /// Re(w₁w₂/(i(w₁+w₂))) on the bidisc.
    BidiscQuotient,
    /// Re f for the rational spin function, on Spin(1).
    SpinRe,
    /// Re(f∘ι), on Spin(1).
    SpinInvolutedRe,
}

/// Self-maps of the upper half-plane into the disc available to `clark`.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize, clap::ValueEnum)]
#[serde(rename_all = "kebab-case")]
pub enum DiscMapChoice {
    Cayley,
    Exponential,
    HalfCayley,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct RunConfig {
    pub domain: Kind,
    pub command: Option<Command>,
    pub quad: QuadratureSpec,
    pub out: Option<PathBuf>,
    pub format: Format,
    pub seed: u64,
    pub example: Option<Example>,
    /// Example parameters: (h₁, h₂) for ex6, (a, b) for ex7, (a, c) for ex1.
    pub params: Option<Vec<f64>>,
    pub suite: Suite,
    /// Tube points for `kernel-eval`, each a list of (re, im) coordinates.
    pub points: Vec<Vec<[f64; 2]>>,
    /// Boundary points for `kernel-eval` in chart coordinates.
    pub boundary: Vec<Vec<f64>>,
    pub function: Function,
    /// Cone direction for `disintegrate` and fibered `clark`, real coordinates.
    pub direction: Option<Vec<f64>>,
    pub base_nodes: usize,
    pub base_radius: Option<f64>,
    pub map: DiscMapChoice,
    /// arg α of the Clark parameter.
    pub alpha_angle: f64,
    /// Samples per check in `verify`.
    pub samples: usize,
}

impl Default for RunConfig {
    fn default() -> Self {
        Self {
            domain: Kind::HalfLine,
            command: None,
            quad: QuadratureSpec::default(),
            out: None,
            format: Format::Csv,
            seed: 1,
            example: None,
            params: None,
            suite: Suite::All,
            points: Vec::new(),
            boundary: Vec::new(),
            function: Function::Height,
            direction: None,
            base_nodes: 8,
            base_radius: None,
            map: DiscMapChoice::Cayley,
            alpha_angle: 0.0,
            samples: 100,
        }
    }
}

/// `halfline`, `polydisc:N`, `matrix:PxQ`, `spin:D`, or a JSON kind record.
pub fn parse_domain(s: &str) -> Result<Kind, String> {
    let s = s.trim();
    if s.starts_with('{') {
        return serde_json::from_str(s).map_err(|e| format!("domain JSON: {e}"));
    }
    let (name, arg) = s.split_once(':').unwrap_or((s, ""));
    let num = |t: &str| t.trim().parse::<usize>().map_err(|_| format!("bad number '{t}' in domain '{s}'"));
    match name.to_ascii_lowercase().as_str() {
        "halfline" | "half-line" | "h" => Ok(Kind::HalfLine),
        "polydisc" => Ok(Kind::Product { factors: vec![Kind::HalfLine; num(arg)?] }),
        "matrix" => {
            let (p, q) = arg.split_once(['x', ',']).ok_or_else(|| format!("matrix domain needs P x Q, got '{arg}'"))?;
            Ok(Kind::Matrix { p: num(p)?, q: num(q)? })
        }
        "spin" => Ok(Kind::Spin { dim_h: num(arg)? }),
        _ => Err(format!("unknown domain '{s}'")),
    }
}
