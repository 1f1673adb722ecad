use std::io::Read;
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand, ValueEnum};
use serde_json::{json, Value};

use mutant::diagram::{class_to_dot, mutation_class, recognize_matrix_type, recognize_type, weight_profile};
use mutant::engine::{build_exchange_graph, label_variables, ExchangeRun, Seed};
use mutant::models::ModelKind;
use mutant::verify::{root_run, run_suite, SuiteOptions, SUITES};
use mutant::{CartanKillingType, Diagram, Error, ExchangeMatrix, RootSystem};

#[derive(Parser)]
#[command(name = "mutant", version, about = "Finite-type cluster algebra toolkit")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Mutate a matrix or diagram at one or more vertices (1-based, comma separated).
    Mutate {
        #[command(flatten)]
        input: Input,
        #[arg(long, value_delimiter = ',', required = true)]
        at: Vec<usize>,
        #[arg(long, value_enum, default_value = "json")]
        format: Format,
    },
    /// Cartan-Killing type of a matrix or diagram, or "infinite".
    Classify {
        #[command(flatten)]
        input: Input,
    },
    /// Mutation class of a matrix or diagram, modulo relabelling.
    Class {
        #[command(flatten)]
        input: Input,
        #[arg(long, default_value_t = 1_000_000)]
        cap: usize,
        #[arg(long, value_enum, default_value = "text")]
        format: Format,
    },
    /// Clusters of a finite root system.
    Clusters {
        #[command(flatten)]
        ty: TypeArg,
        #[arg(long)]
        count: bool,
        #[arg(long, value_enum, default_value = "text")]
        format: Format,
    },
    /// Exchange graph of a root system, or of an engine run from a matrix.
    ExchangeGraph {
        #[command(flatten)]
        source: Source,
        #[arg(long, default_value_t = 100_000)]
        cap: usize,
        #[arg(long, value_enum, default_value = "dot")]
        format: Format,
    },
    /// Cluster variables as Laurent polynomials in the initial cluster.
    Variables {
        #[command(flatten)]
        source: Source,
        #[arg(long, default_value_t = 100_000)]
        cap: usize,
        #[arg(long, value_enum, default_value = "text")]
        format: Format,
    },
    /// Run a verification suite.
    Verify {
        #[arg(value_parser = clap::builder::PossibleValuesParser::new(SUITES))]
        suite: String,
        #[command(flatten)]
        ty: OptType,
        #[arg(long, default_value_t = 0)]
        seed: u64,
        #[arg(long, value_enum, default_value = "text")]
        format: Format,
    },
}

#[derive(Args)]
#[group(required = true, multiple = false)]
struct Input {
    /// Exchange matrix JSON ({"rows": ..}), "-" for stdin
    #[arg(long)]
    matrix: Option<String>,
    /// Diagram JSON ({"n": .., "edges": [..]}), "-" for stdin
    #[arg(long)]
    diagram: Option<String>,
}

#[derive(Args)]
struct TypeArg {
    /// Cartan-Killing type such as A3, B2xA1, or a family letter with --n
    #[arg(long = "type", required = true)]
    ty: String,
    #[arg(long)]
    n: Option<usize>,
}

#[derive(Args)]
struct OptType {
    #[arg(long = "type")]
    ty: Option<String>,
    #[arg(long)]
    n: Option<usize>,
}

#[derive(Args)]
#[group(required = true, multiple = false)]
struct Source {
    #[arg(long = "type")]
    ty: Option<String>,
    #[arg(long)]
    matrix: Option<String>,
}

#[derive(Clone, Copy, PartialEq, Eq, ValueEnum)]
enum Format {
    Json,
    Dot,
    Text,
}

enum Failure {
    Usage(String),
    Domain(String),
}

impl From<Error> for Failure {
    fn from(e: Error) -> Self {
        Failure::Domain(e.to_string())
    }
}

type Out = std::result::Result<(String, bool), Failure>;

fn read_json(path: &str) -> std::result::Result<Value, Failure> {
    let text = if path == "-" {
        let mut s = String::new();
        std::io::stdin().read_to_string(&mut s).map_err(|e| Failure::Domain(format!("stdin: {e}")))?;
        s
    } else {
        std::fs::read_to_string(path).map_err(|e| Failure::Domain(format!("{path}: {e}")))?
    };
    serde_json::from_str(&text).map_err(|e| Failure::Domain(format!("{path}: {e}")))
}

fn parse_type(ty: &str, n: Option<usize>, flag: &str) -> std::result::Result<CartanKillingType, Failure> {
    let s = match n {
        Some(n) if ty.len() == 1 => format!("{ty}{n}"),
        Some(_) => return Err(Failure::Usage(format!("--n needs a bare family letter in {flag}, got \"{ty}\""))),
        None => ty.to_string(),
    };
    s.parse().map_err(|e: Error| Failure::Usage(format!("{flag}: {e}")))
}

fn unsupported(format: Format, what: &str) -> Failure {
    let f = match format {
        Format::Json => "json",
        Format::Dot => "dot",
        Format::Text => "text",
    };
    Failure::Usage(format!("--format {f} is not available for {what}"))
}

fn pretty(v: &Value) -> String {
    serde_json::to_string_pretty(v).expect("serializable") + "\n"
}

fn check_at(at: &[usize], n: usize) -> std::result::Result<Vec<usize>, Failure> {
    at.iter()
        .map(|&k| if (1..=n).contains(&k) { Ok(k - 1) } else { Err(Failure::Usage(format!("--at {k} is outside 1..{n}"))) })
        .collect()
}

fn engine_run(path: &str, cap: usize) -> std::result::Result<ExchangeRun, Failure> {
    let v = read_json(path)?;
    let seed = if v.get("matrix").is_some() { Seed::from_json(&v)? } else { Seed::coefficient_free(ExchangeMatrix::from_json(&v)?)? };
    Ok(build_exchange_graph(&seed, cap)?)
}

fn run(cli: Cli) -> Out {
    match cli.command {
        Command::Mutate { input, at, format } => {
            if let Some(p) = input.matrix {
                let b = ExchangeMatrix::from_json(&read_json(&p)?)?;
                let m = b.mutate_seq(&check_at(&at, b.n())?)?;
                match format {
                    Format::Json => Ok((pretty(&m.to_json()), true)),
                    Format::Text => Ok((m.to_i64_rows().iter().map(|r| r.iter().map(|x| format!("{x:>3}")).collect::<String>() + "\n").collect(), true)),
                    Format::Dot => Err(unsupported(format, "matrices")),
                }
            } else {
                let d = Diagram::from_json(&read_json(&input.diagram.unwrap())?)?;
                let m = d.mutate_seq(&check_at(&at, d.n())?)?;
                match format {
                    Format::Json => Ok((pretty(&m.to_json()), true)),
                    Format::Text => Ok((format!("{m}\n"), true)),
                    Format::Dot => Ok((m.to_dot("diagram"), true)),
                }
            }
        }
        Command::Classify { input } => {
            let t = if let Some(p) = input.matrix {
                let b = ExchangeMatrix::from_json(&read_json(&p)?)?;
                if !b.is_skew_symmetrizable() {
                    return Err(Error::NotSkewSymmetrizable.into());
                }
                recognize_matrix_type(&b)
            } else {
                recognize_type(&Diagram::from_json(&read_json(&input.diagram.unwrap())?)?)
            };
            Ok((t.map_or_else(|| "infinite".to_string(), |t| t.to_string()) + "\n", true))
        }
        Command::Class { input, cap, format } => {
            let d = match (input.matrix, input.diagram) {
                (Some(p), _) => Diagram::of_matrix(&ExchangeMatrix::from_json(&read_json(&p)?)?)?,
                (_, Some(p)) => Diagram::from_json(&read_json(&p)?)?,
                _ => unreachable!(),
            };
            let c = mutation_class(&d, u64::MAX, cap)?;
            match format {
                Format::Text => {
                    let prof: Vec<String> = weight_profile(&c.members).iter().map(|(w, k)| format!("{w}:{k}")).collect();
                    Ok((format!("members {}\nclosed {}\nweights {}\n", c.members.len(), c.closed, prof.join(" ")), true))
                }
                Format::Json => {
                    let ms: Vec<Value> = c.members.iter().map(|m| m.to_diagram().to_json()).collect();
                    Ok((pretty(&json!({"closed": c.closed, "members": ms})), true))
                }
                Format::Dot => Ok((class_to_dot(&c.members), true)),
            }
        }
        Command::Clusters { ty, count, format } => {
            let rs = RootSystem::new(&parse_type(&ty.ty, ty.n, "--type")?)?;
            if count {
                return Ok((format!("{}\n", rs.clusters().len()), true));
            }
            match format {
                Format::Text => Ok((
                    rs.clusters().iter().map(|c| c.iter().map(|&r| rs.root_label(r)).collect::<Vec<_>>().join(", ") + "\n").collect(),
                    true,
                )),
                Format::Json => Ok((pretty(&rs.clusters_json()), true)),
                Format::Dot => Err(unsupported(format, "clusters")),
            }
        }
        Command::ExchangeGraph { source, cap, format } => {
            if let Some(t) = source.ty {
                let rs = RootSystem::new(&parse_type(&t, None, "--type")?)?;
                let g = rs.exchange_graph();
                match format {
                    Format::Dot => Ok((rs.exchange_graph_dot(), true)),
                    Format::Text => Ok((format!("vertices {}\nedges {}\n", g.clusters.len(), g.edges.len()), true)),
                    Format::Json => {
                        let es: Vec<Value> =
                            g.edges.iter().map(|e| json!({"a": e.a, "b": e.b, "out": rs.root(e.out), "in": rs.root(e.into)})).collect();
                        Ok((pretty(&json!({"clusters": rs.clusters_json(), "edges": es})), true))
                    }
                }
            } else {
                let run = engine_run(&source.matrix.unwrap(), cap)?;
                let out = match format {
                    Format::Dot => run.to_dot(),
                    Format::Json => pretty(&run.to_json()),
                    Format::Text => format!("seeds {}\nedges {}\nclosed {}\n", run.seeds.len(), run.edges().len(), run.closed),
                };
                Ok((out, run.closed))
            }
        }
        Command::Variables { source, cap, format } => {
            let (run, labels) = if let Some(t) = source.ty {
                let rs = RootSystem::new(&parse_type(&t, None, "--type")?)?;
                let run = root_run(&rs, cap)?;
                let labels: Vec<String> = label_variables(&run, &rs)?.iter().map(|&r| rs.root_label(r)).collect();
                (run, Some(labels))
            } else {
                (engine_run(&source.matrix.unwrap(), cap)?, None)
            };
            let out = match format {
                Format::Text => (0..run.variables.len())
                    .map(|i| match &labels {
                        Some(l) => format!("{}\t{}\n", l[i], run.render_variable(i)),
                        None => format!("{}\n", run.render_variable(i)),
                    })
                    .collect(),
                Format::Json => {
                    let vs: Vec<Value> = (0..run.variables.len())
                        .map(|i| match &labels {
                            Some(l) => json!({"root": l[i], "value": run.render_variable(i)}),
                            None => json!({"value": run.render_variable(i)}),
                        })
                        .collect();
                    pretty(&json!({"closed": run.closed, "variables": vs}))
                }
                Format::Dot => return Err(unsupported(format, "variables")),
            };
            Ok((out, run.closed))
        }
        Command::Verify { suite, ty, seed, format } => {
            let mut opts = SuiteOptions { seed, ..Default::default() };
            match (ty.ty, ty.n) {
                (Some(t), n) if t.len() == 1 => {
                    let c = t.chars().next().unwrap();
                    opts.kind = Some(ModelKind::from_letter(c).ok_or_else(|| Failure::Usage(format!("--type: no polygon model for \"{t}\"")))?);
                    opts.n = n;
                }
                (Some(t), None) => opts.ty = Some(parse_type(&t, None, "--type")?),
                (Some(_), Some(_)) => return Err(Failure::Usage("--n needs a bare family letter in --type".into())),
                (None, Some(_)) => return Err(Failure::Usage("--n needs --type".into())),
                (None, None) => {}
            }
            let rep = run_suite(&suite, &opts)?;
            let out = match format {
                Format::Text => format!("{rep}\n"),
                Format::Json => pretty(&rep.to_json()),
                Format::Dot => return Err(unsupported(format, "verify")),
            };
            Ok((out, rep.passed()))
        }
    }
}

fn main() -> ExitCode {
    if let Some(n) = std::env::var("MUTANT_THREADS").ok().and_then(|s| s.parse::<usize>().ok()) {
        let _ = rayon::ThreadPoolBuilder::new().num_threads(n).build_global();
    }
    let cli = Cli::parse();
    match run(cli) {
        Ok((out, ok)) => {
            print!("{out}");
            if ok {
                ExitCode::SUCCESS
            } else {
                ExitCode::from(1)
            }
        }
        Err(Failure::Usage(m)) => {
            eprintln!("error: {m}");
            ExitCode::from(2)
        }
        Err(Failure::Domain(m)) => {
            eprintln!("error: {m}");
            ExitCode::from(1)
        }
    }
}
