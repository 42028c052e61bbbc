use std::fs;
use std::path::{Path, PathBuf};
use std::process::ExitCode;

use anyhow::{bail, Context, Result};
use clap::{Args, Parser, Subcommand, ValueEnum};
use knnph::{
    bottleneck, compute_persistence, knn_filtered_complex, load_edge_list, ordering_function, pairwise_distances,
    power_iterate, rank_order, symmetrize, vr_filtered_complex, ConvergenceReport, Family, FilteredComplex, Graph,
    InitialVector, IterationTrace, PageRankConfig, PersistenceDiagram, PointCloud, ReportConfig, SymMethod, TieRule,
};

#[derive(Parser)]
#[command(
    name = "knnph",
    version,
    about = "kNN and Vietoris-Rips persistent homology, PageRank rank convergence"
)]
struct Cli {
    /// How equal distances or scores are ordered.
    #[arg(long, global = true, value_enum, default_value_t = Tie::ByIndex)]
    tie: Tie,
    /// Seed for `--tie seeded-random`.
    #[arg(long, global = true, default_value_t = 0)]
    seed: u64,
    /// Suppress progress messages on stderr.
    #[arg(long, short, global = true)]
    quiet: bool,
    #[command(subcommand)]
    command: Command,
}

#[derive(Clone, Copy, ValueEnum)]
enum Tie {
    ByIndex,
    SeededRandom,
}

#[derive(Clone, Copy, PartialEq, Eq, ValueEnum)]
enum FamilyArg {
    Vr,
    Knn,
}

#[derive(Clone, Copy, ValueEnum)]
enum Sym {
    Min,
    Trans,
    Max,
}

impl From<Sym> for SymMethod {
    fn from(s: Sym) -> Self {
        match s {
            Sym::Min => SymMethod::Min,
            Sym::Trans => SymMethod::Trans,
            Sym::Max => SymMethod::Max,
        }
    }
}

#[derive(Clone, Copy, ValueEnum)]
enum Format {
    Json,
    Csv,
}

#[derive(Subcommand)]
enum Command {
    /// Pairwise Euclidean distance matrix as CSV.
    Distances {
        #[arg(long)]
        points: PathBuf,
    },
    /// kNN order matrix as CSV, raw or symmetrized.
    KnnOrder {
        #[arg(long)]
        points: PathBuf,
        /// Symmetrize with this rule; omit for the raw ordering function.
        #[arg(long, value_enum)]
        sym: Option<Sym>,
    },
    /// Filtered flag complex, one `value<TAB>v0,v1,...` line per simplex.
    Filtration(ComplexArgs),
    /// Persistence diagram of a point cloud.
    Persistence {
        #[command(flatten)]
        complex: ComplexArgs,
        /// Highest homology dimension reported (default: dim-cap - 1).
        #[arg(long)]
        max_dim: Option<usize>,
        #[arg(long, value_enum, default_value_t = Format::Json)]
        format: Format,
    },
    /// Bottleneck distance between two diagram JSON files.
    Bottleneck {
        a: PathBuf,
        b: PathBuf,
        #[arg(long, default_value_t = 0)]
        dim: usize,
    },
    /// Power iteration trace (JSON) or stationary vector with ranks (CSV).
    Pagerank {
        /// Edge list, one or more `a b` pairs per line.
        #[arg(long)]
        edges: PathBuf,
        #[command(flatten)]
        run: PageRankArgs,
        #[arg(long, value_enum, default_value_t = Format::Json)]
        format: Format,
    },
    /// Convergence curves as CSV, with a JSON summary.
    Converge {
        /// Edge list, one or more `a b` pairs per line.
        #[arg(long, required_unless_present = "trace")]
        edges: Option<PathBuf>,
        #[command(flatten)]
        run: PageRankArgs,
        /// Read a saved trace instead of running PageRank.
        #[arg(long, conflicts_with = "edges")]
        trace: Option<PathBuf>,
        /// Filtration families: `vr`, `knn-min`, `knn-trans`, `knn-max`.
        #[arg(long, value_delimiter = ',', default_value = "vr,knn-min,knn-max")]
        families: Vec<String>,
        /// Symmetrization used for kNN convergence times.
        #[arg(long, value_enum, default_value_t = Sym::Min)]
        sym: Sym,
        #[arg(long, value_delimiter = ',', default_value = "0,1")]
        dims: Vec<usize>,
        #[arg(long, default_value_t = 2)]
        dim_cap: usize,
        /// Restrict kNN convergence to neighbor orders up to this level.
        #[arg(long)]
        kappa: Option<f64>,
        /// Node subset (names or indices, comma separated) for local convergence.
        #[arg(long, value_delimiter = ',')]
        subset: Option<Vec<String>>,
        /// Write the JSON summary here instead of stderr.
        #[arg(long)]
        summary: Option<PathBuf>,
    },
}

#[derive(Args)]
struct ComplexArgs {
    #[arg(long)]
    points: PathBuf,
    #[arg(long, value_enum, default_value_t = FamilyArg::Vr)]
    family: FamilyArg,
    #[arg(long, value_enum, default_value_t = Sym::Min)]
    sym: Sym,
    #[arg(long, default_value_t = 2)]
    dim_cap: usize,
    /// Largest filtration value kept: a distance for VR, an order for kNN.
    #[arg(long)]
    max_value: Option<f64>,
}

#[derive(Args)]
struct PageRankArgs {
    #[arg(long, default_value_t = 0.85)]
    alpha: f64,
    #[arg(long, default_value_t = 30)]
    iters: usize,
    #[arg(long)]
    directed: bool,
    /// `paper` (x_i(0) proportional to i + 1), `uniform`, or a file of nonnegative weights.
    #[arg(long, default_value = "paper")]
    x0: String,
}

fn read(path: &Path) -> Result<String> {
    fs::read_to_string(path).with_context(|| format!("cannot read {}", path.display()))
}

fn load_points(path: &Path) -> Result<PointCloud> {
    PointCloud::from_csv(&read(path)?).with_context(|| format!("in {}", path.display()))
}

fn build_complex(args: &ComplexArgs, tie: TieRule) -> Result<FilteredComplex> {
    let cloud = load_points(&args.points)?;
    let complex = match args.family {
        FamilyArg::Vr => vr_filtered_complex(
            &pairwise_distances(&cloud),
            args.dim_cap,
            args.max_value.unwrap_or(f64::INFINITY),
        )?,
        FamilyArg::Knn => {
            let sym = symmetrize(&ordering_function(&cloud, tie)?, args.sym.into());
            let k_max = args.max_value.unwrap_or((cloud.len() - 1) as f64);
            knn_filtered_complex(&sym, args.dim_cap, k_max)?
        }
    };
    Ok(complex)
}

fn load_graph(path: &Path, run: &PageRankArgs, quiet: bool) -> Result<Graph> {
    let g = load_edge_list(&read(path)?, !run.directed).with_context(|| format!("in {}", path.display()))?;
    if !quiet {
        eprintln!("loaded {} nodes, {} edges", g.len(), g.edges().len());
    }
    Ok(g)
}

fn run_pagerank(g: &Graph, run: &PageRankArgs) -> Result<IterationTrace> {
    let n = g.len();
    let x0 = match run.x0.as_str() {
        "paper" => InitialVector::Increasing,
        "uniform" => InitialVector::Uniform,
        file => {
            let text = read(Path::new(file))?;
            let weights = text
                .split(|c: char| c.is_whitespace() || c == ',')
                .filter(|t| !t.is_empty())
                .map(|t| t.parse::<f64>().with_context(|| format!("bad weight {t:?} in {file}")))
                .collect::<Result<Vec<_>>>()?;
            InitialVector::Given(weights)
        }
    };
    let cfg = PageRankConfig {
        alpha: run.alpha,
        x0: x0.build(n)?,
        max_iter: run.iters,
        ..PageRankConfig::new(n)
    };
    Ok(power_iterate(g, &cfg)?)
}

fn parse_family(s: &str) -> Result<Family> {
    match s {
        "vr" => Ok(Family::Vr),
        _ => match s.strip_prefix("knn-").or_else(|| s.strip_prefix("knn_")) {
            Some(m) => Ok(Family::Knn(m.parse()?)),
            None => bail!("unknown family {s:?}; expected vr, knn-min, knn-trans or knn-max"),
        },
    }
}

fn resolve_node(name: &str, labels: Option<&[String]>, n: usize) -> Result<usize> {
    if let Some(i) = labels.and_then(|l| l.iter().position(|x| x == name)) {
        return Ok(i);
    }
    match name.parse::<usize>() {
        Ok(i) if i < n => Ok(i),
        _ => bail!("unknown node {name:?}"),
    }
}

fn execute(cli: Cli) -> Result<String> {
    let tie = match cli.tie {
        Tie::ByIndex => TieRule::ByIndex,
        Tie::SeededRandom => TieRule::SeededRandom(cli.seed),
    };
    let out = match cli.command {
        Command::Distances { points } => pairwise_distances(&load_points(&points)?).to_csv(),
        Command::KnnOrder { points, sym } => {
            let f = ordering_function(&load_points(&points)?, tie)?;
            match sym {
                Some(m) => symmetrize(&f, m.into()).to_csv(),
                None => f.to_csv(),
            }
        }
        Command::Filtration(args) => build_complex(&args, tie)?.dump(),
        Command::Persistence {
            complex,
            max_dim,
            format,
        } => {
            let c = build_complex(&complex, tie)?;
            let diagram = compute_persistence(&c, max_dim.unwrap_or(complex.dim_cap.saturating_sub(1)))?;
            match format {
                Format::Json => diagram.to_json()? + "\n",
                Format::Csv => diagram.to_csv(),
            }
        }
        Command::Bottleneck { a, b, dim } => {
            let load = |p: &Path| -> Result<PersistenceDiagram> {
                PersistenceDiagram::from_json(&read(p)?).with_context(|| format!("in {}", p.display()))
            };
            format!("{}\n", bottleneck(&load(&a)?, &load(&b)?, dim))
        }
        Command::Pagerank { edges, run, format } => {
            let g = load_graph(&edges, &run, cli.quiet)?;
            let trace = run_pagerank(&g, &run)?;
            match format {
                Format::Json => trace.to_json()? + "\n",
                Format::Csv => {
                    let ranks = rank_order(trace.pi())?;
                    let mut out = String::from("node,pi,rank\n");
                    for (i, (p, r)) in trace.pi().iter().zip(ranks).enumerate() {
                        let name = g.labels().map_or_else(|| i.to_string(), |l| l[i].clone());
                        out.push_str(&format!("{name},{p},{r}\n"));
                    }
                    out
                }
            }
        }
        Command::Converge {
            edges,
            run,
            trace,
            families,
            sym,
            dims,
            dim_cap,
            kappa,
            subset,
            summary,
        } => {
            let trace = match (trace, edges) {
                (Some(path), _) => {
                    IterationTrace::from_json(&read(&path)?).with_context(|| format!("in {}", path.display()))?
                }
                (None, Some(edges)) => run_pagerank(&load_graph(&edges, &run, cli.quiet)?, &run)?,
                (None, None) => unreachable!("clap requires --edges or --trace"),
            };
            let families = families.iter().map(|f| parse_family(f)).collect::<Result<Vec<_>>>()?;
            let subset = subset
                .map(|names| {
                    names
                        .iter()
                        .map(|s| resolve_node(s.trim(), trace.labels(), trace.len()))
                        .collect::<Result<Vec<_>>>()
                })
                .transpose()?;
            let cfg = ReportConfig {
                families,
                dims,
                dim_cap,
                tie_rule: tie,
                knn_method: Some(sym.into()),
                kappa,
                subset,
            };
            let report = ConvergenceReport::build(&trace, &cfg)?;
            let json = report.summary_json()?;
            match summary {
                Some(path) => {
                    fs::write(&path, json + "\n").with_context(|| format!("cannot write {}", path.display()))?
                }
                None if !cli.quiet => eprintln!("{json}"),
                None => {}
            }
            report.to_csv()
        }
    };
    Ok(out)
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    match execute(cli) {
        Ok(out) => {
            print!("{out}");
            ExitCode::SUCCESS
        }
        Err(e) => {
            eprintln!("error: {e:#}");
            ExitCode::from(1)
        }
    }
}
