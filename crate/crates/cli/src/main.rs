mod report;

use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Parser, Subcommand};
use serde_json::{json, Value};

use gbds_core::corpus;
use gbds_core::error::Error;
use gbds_core::expr;
use gbds_core::genalg::{self, AlgElement, GenTriple};
use gbds_core::groupoid;
use gbds_core::input;
use gbds_core::paths;
use gbds_core::Gbds;

#[derive(Parser)]
#[command(
    name = "gbds",
    about = "Exact analysis of finite generalized Boolean dynamical systems",
    long_about = "Decides structural properties of a finite generalized Boolean dynamical \
                  system, computes in the *-algebra of its standard generators, and \
                  cross-validates products against groupoid convolution.\n\n\
                  Elements are written as `word.{atoms}` or `word.{atoms}|word` with `e` \
                  for the empty word, e.g. `(2+1i)*a.{v}|aa + e.{v}`. Group elements are \
                  `word`, `e`, or `word1/word2` for word1·word2^-1."
)]
struct Cli {
    /// System description file (TOML)
    #[arg(long, global = true)]
    system: Option<PathBuf>,

    /// Emit machine-readable JSON instead of text
    #[arg(long, global = true)]
    json: bool,

    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Validate the system file and print its canonical form
    Check,
    /// Decide Condition (L); prints a witness cycle on failure
    ConditionL,
    /// List cycle words with their maximal bases and no-exit atoms
    Cycles {
        #[arg(long, default_value_t = 3)]
        max_len: usize,
    },
    /// Print the edges of the graph with domains, ranges, and the
    /// singular vertices
    Graph,
    /// Enumerate the boundary path space to a depth
    Boundary {
        #[arg(long, default_value_t = 3)]
        depth: usize,
    },
    /// Multiply two elements by rewriting and cross-check against
    /// groupoid convolution
    Mul { x: String, y: String },
    /// Decide equality of two elements in the algebra
    Eq { x: String, y: String },
    /// Refine the diagonal family of an element and orthogonalize it
    NormalizeDiag { x: String },
    /// Report abelian-core membership for each generator of an element
    Core { x: String },
    /// Decide whether {T} x CYL lies in the interior of the isotropy
    /// bundle (T like `aa/a`, CYL like `a.{v}`)
    IsoInterior { t: String, cyl: String },
    /// Run the four-way effectiveness suite
    Effective {
        #[arg(long, default_value_t = 3)]
        depth: usize,
    },
    /// Generate random systems and run the invariant suite on each
    Corpus {
        #[arg(long, default_value_t = 0)]
        seed: u64,
        #[arg(long, default_value_t = 10)]
        count: usize,
    },
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    match run(&cli) {
        Ok(code) => code,
        Err(err) => {
            eprintln!("error: {err}");
            match err {
                Error::Usage(_) | Error::Domain(_) => ExitCode::from(2),
                _ => ExitCode::from(3),
            }
        }
    }
}

fn load_system(cli: &Cli) -> Result<(Gbds, Vec<String>), Error> {
    let path = cli
        .system
        .as_ref()
        .ok_or_else(|| Error::Usage("this command needs --system FILE".into()))?;
    let text = std::fs::read_to_string(path)
        .map_err(|e| Error::Invalid(format!("cannot read {}: {e}", path.display())))?;
    let parsed = input::parse_system_str(&text)?;
    Ok((parsed.sys, parsed.defaulted_ideals))
}

fn emit(cli: &Cli, value: &Value) {
    print!("{}", report::render(value, cli.json));
    if cli.json {
        println!();
    }
}

fn run(cli: &Cli) -> Result<ExitCode, Error> {
    match &cli.command {
        Command::Check => {
            let (sys, defaulted) = load_system(cli)?;
            let value = json!({
                "valid": true,
                "canonical": input::system_to_doc(&sys),
                "defaulted_ideals": defaulted,
            });
            emit(cli, &value);
            Ok(ExitCode::SUCCESS)
        }
        Command::ConditionL => {
            let (sys, _) = load_system(cli)?;
            let verdict = sys.condition_l();
            emit(cli, &report::condition_l_to_json(&sys, &verdict));
            Ok(ExitCode::SUCCESS)
        }
        Command::Cycles { max_len } => {
            let (sys, _) = load_system(cli)?;
            let reports = sys.cycles_up_to(*max_len);
            emit(
                cli,
                &json!({ "cycles": report::cycles_to_json(&sys, &reports) }),
            );
            Ok(ExitCode::SUCCESS)
        }
        Command::Graph => {
            let (sys, _) = load_system(cli)?;
            let edges: Vec<Value> = paths::all_edges(&sys)
                .iter()
                .map(|e| report::edge_to_json(&sys, e))
                .collect();
            let singular = paths::singular_atoms(&sys);
            emit(
                cli,
                &json!({
                    "edges": edges,
                    "singular_vertices": report::set_to_json(&sys, &singular),
                }),
            );
            Ok(ExitCode::SUCCESS)
        }
        Command::Boundary { depth } => {
            let (sys, _) = load_system(cli)?;
            let e = paths::boundary_paths(&sys, *depth);
            emit(cli, &report::boundary_to_json(&sys, &e));
            Ok(ExitCode::SUCCESS)
        }
        Command::Mul { x, y } => {
            let (sys, _) = load_system(cli)?;
            let ex = expr::parse_element(&sys, x)?;
            let ey = expr::parse_element(&sys, y)?;
            let product = ex.mul(&sys, &ey);
            let agrees = groupoid::oracle_product_check(&sys, &ex, &ey);
            emit(
                cli,
                &json!({
                    "product": report::element_to_json(&sys, &product),
                    "convolution_agrees": agrees,
                }),
            );
            Ok(if agrees {
                ExitCode::SUCCESS
            } else {
                ExitCode::from(1)
            })
        }
        Command::Eq { x, y } => {
            let (sys, _) = load_system(cli)?;
            let ex = expr::parse_element(&sys, x)?;
            let ey = expr::parse_element(&sys, y)?;
            let equal = groupoid::oracle_equal(&sys, &ex, &ey);
            emit(cli, &json!({ "equal": equal }));
            Ok(if equal {
                ExitCode::SUCCESS
            } else {
                ExitCode::from(1)
            })
        }
        Command::NormalizeDiag { x } => {
            let (sys, _) = load_system(cli)?;
            let ex = expr::parse_element(&sys, x)?;
            if !ex.is_diagonal() {
                return Err(Error::Usage(
                    "normalize-diag needs a diagonal element".into(),
                ));
            }
            let family: Vec<GenTriple> = ex.terms().map(|(t, _)| t.clone()).collect();
            let refined = genalg::refine_family(&sys, &family)?;
            let qs = genalg::orthogonalize(&sys, &refined);

            let mut all_ok = true;
            let mut members = Vec::new();
            for u in refined.members() {
                members.push(json!({
                    "member": report::triple_to_json(&sys, u),
                    "projection": report::element_to_json(&sys, &qs[u]),
                }));
            }
            // pairwise orthogonality through the oracle
            for (i, u) in refined.members().iter().enumerate() {
                for v in refined.members().iter().skip(i + 1) {
                    let prod = qs[u].mul(&sys, &qs[v]);
                    if !groupoid::oracle_equal(&sys, &prod, &AlgElement::zero()) {
                        all_ok = false;
                    }
                }
            }
            // reconstruction of the original members
            let mut recon = Vec::new();
            for t in &family {
                let mut sum = AlgElement::zero();
                for v in refined.members() {
                    if genalg::diag_leq(&sys, v, t) {
                        sum = sum.add(&qs[v]);
                    }
                }
                let ok = groupoid::oracle_equal(&sys, &AlgElement::from_triple(t.clone()), &sum);
                all_ok &= ok;
                recon.push(json!({
                    "member": report::triple_to_json(&sys, t),
                    "reconstructed": ok,
                }));
            }
            emit(
                cli,
                &json!({
                    "family": members,
                    "reconstruction": recon,
                    "orthogonal_and_reconstructed": all_ok,
                }),
            );
            Ok(if all_ok {
                ExitCode::SUCCESS
            } else {
                ExitCode::from(1)
            })
        }
        Command::Core { x } => {
            let (sys, _) = load_system(cli)?;
            let ex = expr::parse_element(&sys, x)?;
            let verdicts: Vec<Value> = ex
                .terms()
                .map(|(t, _)| {
                    json!({
                        "generator": report::triple_to_json(&sys, t),
                        "in_core": genalg::in_abelian_core(&sys, t),
                    })
                })
                .collect();
            emit(cli, &json!({ "generators": verdicts }));
            Ok(ExitCode::SUCCESS)
        }
        Command::IsoInterior { t, cyl } => {
            let (sys, _) = load_system(cli)?;
            let elem = expr::parse_group_elem(&sys, t)?;
            let cylinder = expr::parse_cylinder(&sys, cyl)?;
            let inside = groupoid::bisection_in_iso_interior(&sys, &elem, &cylinder)?;
            emit(cli, &json!({ "in_isotropy_interior": inside }));
            Ok(ExitCode::SUCCESS)
        }
        Command::Effective { depth } => {
            let (sys, _) = load_system(cli)?;
            let r = groupoid::effectiveness_suite(&sys, *depth);
            emit(cli, &report::effectiveness_to_json(&sys, &r));
            Ok(if r.consistent {
                ExitCode::SUCCESS
            } else {
                ExitCode::from(1)
            })
        }
        Command::Corpus { seed, count } => {
            let mut rng = corpus::rng_from_seed(*seed);
            let mut rows = Vec::new();
            let mut all_ok = true;
            for i in 0..*count {
                let sys = corpus::random_system(&mut rng);
                let checks = corpus::run_invariant_suite(&sys, &mut rng, 25);
                let ok = checks.iter().all(|c| c.passed());
                all_ok &= ok;
                rows.push(json!({
                    "index": i,
                    "atoms": sys.algebra().atom_count(),
                    "letters": sys.letter_count(),
                    "passed": ok,
                    "checks": checks.iter().map(|c| json!({
                        "name": c.name,
                        "cases": c.cases,
                        "failures": c.failures,
                    })).collect::<Vec<_>>(),
                }));
            }
            emit(
                cli,
                &json!({ "seed": seed, "count": count, "systems": rows, "all_passed": all_ok }),
            );
            Ok(if all_ok {
                ExitCode::SUCCESS
            } else {
                ExitCode::from(1)
            })
        }
    }
}
