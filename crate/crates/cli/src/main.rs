use std::collections::BTreeMap;
use std::path::{Path, PathBuf};
use std::process::ExitCode;

use clap::{Parser, Subcommand, ValueEnum};
use serde_json::json;

use medtk::graphs::{FiniteGraph, GraphJson};
use medtk::groups::{fwn_virtually_abelian, Presentation, PresentationJson};
use medtk::median::{certify_median, cubical_dimension, Certification};
use medtk::scenario::run_scenario;
use medtk::wallspace::{cubulate, Wallspace, WallspaceJson};
use medtk::{Error, Result};

#[derive(Copy, Clone, Debug, PartialEq, Eq, ValueEnum)]
enum Format {
    Text,
    Json,
}

#[derive(Parser, Debug)]
#[command(name = "medtk", version, about = "Median graphs, cubulations, graph products and fixed-point criteria at desk scale")]
struct Cli {
    #[arg(long, value_enum, default_value_t = Format::Text, global = true)]
    format: Format,
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand, Debug)]
enum Command {
    /// Low-index subgroups and D-infinity witnesses for the affine Coxeter group of rank n.
    AffineCoxeter {
        #[arg(long)]
        n: Option<usize>,
        /// Coset enumeration limit.
        #[arg(long)]
        limit: Option<usize>,
    },
    /// Hypotheses for graph products over the join of n pairs with Z/q vertex groups.
    CubulableFw {
        #[arg(long)]
        n: Option<usize>,
        #[arg(long)]
        q: Option<u64>,
        #[arg(long)]
        radius: Option<usize>,
    },
    /// Graphs from r-cubes joined up to distance s, and their nerve spheres.
    GammaRs {
        #[arg(long)]
        r: Option<usize>,
        #[arg(long)]
        s: Option<usize>,
        #[arg(long)]
        n: Option<usize>,
    },
    /// Wallspace round trips over a corpus of median graphs.
    Duality {
        /// `small` or `full`.
        #[arg(long)]
        corpus: Option<String>,
    },
    /// Coset complex, quasi-median structure and wall-system cubulation of a graph product.
    GraphProduct {
        /// kN, pN, cN or eN (complete, path, cycle, edgeless).
        #[arg(long)]
        gamma: Option<String>,
        #[arg(long)]
        q: Option<usize>,
        #[arg(long)]
        radius: Option<usize>,
        #[arg(long)]
        margin: Option<usize>,
    },
    /// Morphism onto D-infinity from an action on a periodic quasi-line.
    QuasilineDinfty {
        /// `standard`, `shift` or `ladder`.
        #[arg(long)]
        action: Option<String>,
        /// Longest word in the exhaustive checks.
        #[arg(long)]
        length: Option<usize>,
    },
    /// Fixed set of the coordinate rotation on the k-cube.
    CubeFix {
        #[arg(long)]
        k: Option<usize>,
    },
    /// Certify a graph (`{"n": .., "edges": [[i, j], ..]}`) as median.
    CheckMedian { graph: PathBuf },
    /// Cubulate a wallspace (`{"points": .., "walls": [[..], ..]}`).
    Cubulate { walls: PathBuf },
    /// Fixed-point criterion for a virtually abelian presentation.
    FwAbelian {
        /// Presentation JSON: `{"generators": k, "relators": [[1, 2, -1, -2], ..]}`.
        #[arg(long)]
        pres: PathBuf,
        #[arg(long)]
        n: usize,
    },
}

fn params<const N: usize>(pairs: [(&str, Option<String>); N]) -> BTreeMap<String, String> {
    pairs
        .into_iter()
        .filter_map(|(k, v)| v.map(|v| (k.to_string(), v)))
        .collect()
}

fn s<T: ToString>(v: Option<T>) -> Option<String> {
    v.map(|x| x.to_string())
}

fn read_text(path: &Path) -> Result<String> {
    Ok(std::fs::read_to_string(path)?)
}

/// Output and exit code of one invocation.
fn run(cli: Cli) -> Result<(String, u8)> {
    let scenario = |name: &str, p: BTreeMap<String, String>| -> Result<(String, u8)> {
        let report = run_scenario(name, &p)?;
        let out = match cli.format {
            Format::Text => report.to_text(),
            Format::Json => report.to_json() + "\n",
        };
        Ok((out, report.exit_code() as u8))
    };
    match cli.command {
        Command::AffineCoxeter { n, limit } => scenario("affine-coxeter", params([("n", s(n)), ("limit", s(limit))])),
        Command::CubulableFw { n, q, radius } => {
            scenario("cubulable-fw", params([("n", s(n)), ("q", s(q)), ("radius", s(radius))]))
        }
        Command::GammaRs { r, s: sv, n } => scenario("gamma-rs", params([("r", s(r)), ("s", s(sv)), ("n", s(n))])),
        Command::Duality { corpus } => scenario("duality", params([("corpus", corpus)])),
        Command::GraphProduct { gamma, q, radius, margin } => scenario(
            "graph-product",
            params([("gamma", gamma), ("q", s(q)), ("radius", s(radius)), ("margin", s(margin))]),
        ),
        Command::QuasilineDinfty { action, length } => {
            scenario("quasiline-dinfty", params([("action", action), ("length", s(length))]))
        }
        Command::CubeFix { k } => scenario("cube-fix", params([("k", s(k))])),
        Command::CheckMedian { graph } => {
            let g = FiniteGraph::from_json(&serde_json::from_str::<GraphJson>(&read_text(&graph)?)?)?;
            let (value, code) = match certify_median(&g)? {
                Certification::Median(m) => (
                    json!({
                        "median": true,
                        "vertices": m.vertex_count(),
                        "hyperplanes": m.hyperplanes().len(),
                        "cubical_dimension": cubical_dimension(&m),
                        "report": m.hyperplane_report(),
                    }),
                    0,
                ),
                Certification::NotMedian(f) => (json!({"median": false, "failure": f}), 1),
            };
            let out = match cli.format {
                Format::Json => serde_json::to_string_pretty(&value)? + "\n",
                Format::Text if code == 0 => format!(
                    "median: yes\nvertices: {}\nhyperplanes: {}\ncubical dimension: {}\n",
                    value["vertices"], value["hyperplanes"], value["cubical_dimension"]
                ),
                Format::Text => format!("median: no\nwitness: {}\n", value["failure"]),
            };
            Ok((out, code))
        }
        Command::Cubulate { walls } => {
            let ws = Wallspace::from_json(&serde_json::from_str::<WallspaceJson>(&read_text(&walls)?)?)?;
            let c = cubulate(&ws)?;
            let g = c.median.graph();
            let value = json!({
                "graph": g.to_json(),
                "orientations": (0..g.vertex_count()).map(|v| c.bit_string(v, ws.wall_count())).collect::<Vec<_>>(),
                "point_vertex": c.point_vertex,
                "cubical_dimension": cubical_dimension(&c.median),
            });
            let out = match cli.format {
                Format::Json => serde_json::to_string_pretty(&value)? + "\n",
                Format::Text => format!(
                    "walls: {}\nvertices: {}\nedges: {}\ncubical dimension: {}\npoint vertices: {:?}\n",
                    ws.wall_count(),
                    g.vertex_count(),
                    g.edge_count(),
                    cubical_dimension(&c.median),
                    c.point_vertex
                ),
            };
            Ok((out, 0))
        }
        Command::FwAbelian { pres, n } => {
            let p = Presentation::from_json(&serde_json::from_str::<PresentationJson>(&read_text(&pres)?)?)?;
            if n == 0 {
                return Err(Error::InvalidInput("n must be positive".into()));
            }
            let v = fwn_virtually_abelian(&p, n)?;
            let code = if v.holds { 0 } else { 1 };
            let out = match cli.format {
                Format::Json => serde_json::to_string_pretty(&v)? + "\n",
                Format::Text => {
                    let mut t = format!(
                        "subgroup classes of index <= {n}: {}\n",
                        v.subgroup_indices.len()
                    );
                    match &v.failure {
                        None => t.push_str(&format!("(FW_{n}) holds\n")),
                        Some(f) => t.push_str(&format!(
                            "(FW_{n}) fails: index-{} subgroup, sigma {:?}, lambda {:?}, certificate {} -> {}\n",
                            f.index,
                            f.witness.sigma,
                            f.witness.lambda.iter().map(|x| x.to_string()).collect::<Vec<_>>(),
                            p.format_word(&f.certificate_in_group),
                            f.witness.certificate_value
                        )),
                    }
                    t.push_str("note: virtual abelianness is assumed, not verified\n");
                    t
                }
            };
            Ok((out, code))
        }
    }
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    match run(cli) {
        Ok((out, code)) => {
            print!("{out}");
            ExitCode::from(code)
        }
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::from(2)
        }
    }
}
