use std::io::Read;
use std::path::{Path, PathBuf};
use std::process::ExitCode;

use clap::{Parser, Subcommand, ValueEnum};
use nalgebra::DVector;
use rand::rngs::StdRng;
use rand::{Rng, SeedableRng};
use serde_json::{json, Value};

use solvlat::classify::{
    commensurable, common_sublattice, delta_of, equivalent_by, equivalent_by_exact, search_equivalence,
    valid_permutations, ClassifyError, Method, SearchOptions, DEFAULT_EQUIV_TOL, DEFAULT_SEARCH_RADIUS,
};
use solvlat::exact::{ExactMatrix, IntMatrix, DEFAULT_RECONSTRUCT_TOL};
use solvlat::factory::{family_3d, from_hyperbolic, from_hyperbolic_exact_2d, FactoryError, HyperbolicInput};
use solvlat::group::{SystemError, DEFAULT_GROUP_TOL};
use solvlat::io::*;
use solvlat::lattice::{CompatiblePair, Lattice, LatticeError, ReduceOptions, DEFAULT_MAX_POWER, DEFAULT_PAIR_TOL};

#[derive(Parser)]
#[command(name = "solvlat", version, about = "Splittable lattices in R^n x| R^m")]
struct Cli {
    /// Numerical tolerance (default 1e-6 for pair verification and decisions, 1e-9 for group checks)
    #[arg(long, global = true)]
    tol: Option<f64>,
    /// Largest denominator tried by rational reconstruction and searches
    #[arg(long, global = true, default_value_t = 1_000_000)]
    denom_bound: u64,
    /// Require the exact arithmetic path and fail if it is unavailable
    #[arg(long, global = true)]
    exact: bool,
    /// Seed for randomized self-checks
    #[arg(long, global = true, default_value_t = 0x5eed)]
    seed: u64,
    /// Write the result document here instead of standard output
    #[arg(long, global = true)]
    output: Option<PathBuf>,
    #[command(subcommand)]
    command: Command,
}

#[derive(Clone, Copy, ValueEnum)]
enum MethodArg {
    RationalTest,
    RankTest,
}

#[derive(Subcommand)]
enum Command {
    /// Check a diagonal system
    ValidateSystem {
        #[arg(long)]
        system: String,
    },
    /// Build a compatible pair from commuting positive hyperbolic integer matrices
    MakePair {
        /// A matrix document; repeat for several commuting matrices
        #[arg(long = "matrix", required = true)]
        matrices: Vec<String>,
    },
    /// Verify a compatible pair
    VerifyPair {
        #[arg(long)]
        system: String,
        #[arg(long)]
        sigma: String,
        #[arg(long)]
        rho: Option<String>,
        /// Exact diagonal multipliers exp(rho_j . Delta), one document per column of rho
        #[arg(long = "multiplier")]
        multipliers: Vec<String>,
    },
    /// Decompose a group element as gamma * r with r in the fundamental domain
    Reduce {
        #[arg(long)]
        lattice: String,
        #[arg(long)]
        element: String,
        #[arg(long, default_value_t = DEFAULT_MAX_POWER)]
        max_power: i64,
    },
    /// Product of two lattice elements, or of two group elements
    Mul {
        #[arg(long)]
        lattice: String,
        #[arg(long)]
        left: String,
        #[arg(long)]
        right: String,
    },
    /// Inverse of a lattice element or group element
    Inv {
        #[arg(long)]
        lattice: String,
        #[arg(long)]
        element: String,
    },
    /// Whether a group element lies in the lattice
    Membership {
        #[arg(long)]
        lattice: String,
        #[arg(long)]
        element: String,
    },
    /// Valid coordinate permutations, or certify a given automorphism
    Automorphisms {
        #[arg(long)]
        system: Option<String>,
        #[arg(long)]
        automorphism: Option<String>,
    },
    /// Test or search for an automorphism carrying one lattice onto another
    Equivalent {
        #[arg(long)]
        left: String,
        #[arg(long)]
        right: String,
        #[arg(long)]
        automorphism: Option<String>,
        #[arg(long, default_value_t = DEFAULT_SEARCH_RADIUS)]
        radius: i64,
    },
    /// Decide commensurability of two lattices
    Commensurable {
        #[arg(long)]
        left: String,
        #[arg(long)]
        right: String,
        #[arg(long, value_enum, default_value = "rational-test")]
        method: MethodArg,
    },
    /// Common sublattice of two commensurable lattices, or of rational witnesses Q and R
    Sublattice {
        #[arg(long, requires = "right", conflicts_with_all = ["q", "r"])]
        left: Option<String>,
        #[arg(long)]
        right: Option<String>,
        #[arg(long, requires = "r")]
        q: Option<String>,
        #[arg(long)]
        r: Option<String>,
    },
    /// The matrix A(k, l) of the three-dimensional family
    Family3d {
        #[arg(long, allow_negative_numbers = true)]
        k: i64,
        #[arg(long, allow_negative_numbers = true)]
        l: i64,
    },
    /// Generators and relations of a lattice
    Presentation {
        #[arg(long)]
        lattice: String,
    },
}

/// Exit code 1 for domain failures, 2 for unreadable input.
enum Failure {
    Parse(String),
    Domain { name: String, message: String, details: Value },
}

impl Failure {
    fn domain(name: &str, message: impl Into<String>) -> Self {
        Failure::Domain { name: name.to_string(), message: message.into(), details: Value::Null }
    }
}

impl From<ParseError> for Failure {
    fn from(e: ParseError) -> Self {
        Failure::Parse(e.to_string())
    }
}

impl From<SystemError> for Failure {
    fn from(e: SystemError) -> Self {
        Failure::Domain {
            name: "SystemError".into(),
            message: e.to_string(),
            details: json!({ "errors": e.names(), "violations": e.0 }),
        }
    }
}

impl From<LatticeError> for Failure {
    fn from(e: LatticeError) -> Self {
        Failure::domain(e.name(), e.to_string())
    }
}

impl From<ClassifyError> for Failure {
    fn from(e: ClassifyError) -> Self {
        Failure::domain(e.name(), e.to_string())
    }
}

impl From<FactoryError> for Failure {
    fn from(e: FactoryError) -> Self {
        match e {
            FactoryError::System(s) => s.into(),
            other => Failure::domain(other.name(), other.to_string()),
        }
    }
}

impl From<BuildError> for Failure {
    fn from(e: BuildError) -> Self {
        match e {
            BuildError::System(s) => s.into(),
            BuildError::Lattice(l) => l.into(),
            BuildError::Classify(c) => c.into(),
            BuildError::Parse(p) => p.into(),
        }
    }
}

type Outcome = Result<Document, Failure>;

fn read_document(path: &str) -> Result<Document, Failure> {
    let text = if path == "-" {
        let mut s = String::new();
        std::io::stdin()
            .read_to_string(&mut s)
            .map_err(|e| Failure::Parse(format!("standard input: {e}")))?;
        s
    } else {
        std::fs::read_to_string(Path::new(path)).map_err(|e| Failure::Parse(format!("{path}: {e}")))?
    };
    Document::parse(&text).map_err(|e| Failure::Parse(format!("{path}: {e}")))
}

fn read_payload(path: &str, kind: Kind) -> Result<Value, Failure> {
    let doc = read_document(path)?;
    Ok(doc.expect_kind(kind)?.clone())
}

fn read_lattice(path: &str, tol: f64) -> Result<Lattice, Failure> {
    let spec = pair_from_payload(&read_payload(path, Kind::Pair)?)?;
    Ok(Lattice::new(spec.build(DEFAULT_GROUP_TOL, tol)?))
}

fn read_matrix(path: &str) -> Result<ExactMatrix, Failure> {
    Ok(matrix_from_payload(&read_payload(path, Kind::Matrix)?)?)
}

fn read_int_matrix(path: &str) -> Result<IntMatrix, Failure> {
    read_matrix(path)?.to_int().ok_or_else(|| Failure::Parse(format!("{path}: expected an integer matrix")))
}

fn require_exact(cli: &Cli, available: bool, what: &str) -> Result<(), Failure> {
    if cli.exact && !available {
        Err(Failure::domain("InexactInput", format!("--exact was given but {what} has no exact data")))
    } else {
        Ok(())
    }
}

fn run(cli: &Cli) -> Outcome {
    let verify_tol = cli.tol.unwrap_or(DEFAULT_PAIR_TOL);
    let group_tol = cli.tol.unwrap_or(DEFAULT_GROUP_TOL);
    match &cli.command {
        Command::ValidateSystem { system } => {
            let spec = system_from_payload(&read_payload(system, Kind::System)?)?;
            let sys = spec.build(group_tol)?;
            Ok(Document::new(Kind::System, system_payload(&sys)))
        }
        Command::MakePair { matrices } => {
            let ms = matrices.iter().map(|p| read_int_matrix(p)).collect::<Result<Vec<_>, _>>()?;
            if cli.exact {
                let square = ms.len() == 1 && ms[0].rows() == 2 && ms[0].cols() == 2;
                let entries = ms[0].to_i64_rows().filter(|_| square);
                let Some(a) = entries else {
                    return Err(Failure::domain("InexactInput", "the exact path handles a single 2x2 matrix"));
                };
                let out = from_hyperbolic_exact_2d([[a[0][0], a[0][1]], [a[1][0], a[1][1]]])?;
                return Ok(Document::new(Kind::Pair, pair_payload(&out.pair)));
            }
            let out = from_hyperbolic(&HyperbolicInput::new(ms)?)?;
            let mut payload = pair_payload(&out.pair);
            payload["eigenvalues"] = matrix_to_json(&out.eigenvalues);
            Ok(Document::new(Kind::Pair, payload))
        }
        Command::VerifyPair { system, sigma, rho, multipliers } => {
            let sys = system_from_payload(&read_payload(system, Kind::System)?)?.build(DEFAULT_GROUP_TOL)?;
            let sigma = read_matrix(sigma)?;
            let pair = if cli.exact || !multipliers.is_empty() {
                let mults = if multipliers.is_empty() {
                    inferred_multipliers(&sys, &sigma, rho.as_deref())?
                } else {
                    multipliers.iter().map(|p| read_matrix(p)).collect::<Result<Vec<_>, _>>()?
                };
                CompatiblePair::verify_exact(&sys, &sigma, &mults)?
            } else {
                let rho = rho.as_deref().ok_or_else(|| Failure::Parse("--rho or --multiplier is required".into()))?;
                CompatiblePair::verify(&sys, &sigma.to_f64(), &read_matrix(rho)?.to_f64(), verify_tol)?
            };
            Ok(Document::new(Kind::Pair, pair_payload(&pair)))
        }
        Command::Reduce { lattice, element, max_power } => {
            let lat = read_lattice(lattice, verify_tol)?;
            let g = group_element_from_payload(&read_payload(element, Kind::GroupElement)?)?;
            let opts = ReduceOptions { max_power: *max_power, ..ReduceOptions::default() };
            let red = lat.reduce_with(&g, opts)?;
            Ok(Document::new(Kind::Reduction, reduction_payload(&red)))
        }
        Command::Mul { lattice, left, right } => {
            let lat = read_lattice(lattice, verify_tol)?;
            let (a, b) = (read_document(left)?, read_document(right)?);
            if a.kind == Kind::GroupElement {
                let g = group_element_from_payload(&a.payload)?;
                let h = group_element_from_payload(b.expect_kind(Kind::GroupElement)?)?;
                check_group_shape(&lat, &[&g, &h])?;
                return Ok(Document::new(Kind::GroupElement, group_element_payload(&lat.pair().sys().mul(&g, &h))));
            }
            let x = lattice_element_from_payload(a.expect_kind(Kind::LatticeElement)?)?;
            let y = lattice_element_from_payload(b.expect_kind(Kind::LatticeElement)?)?;
            check_element_shape(&lat, &[&x, &y])?;
            Ok(Document::new(Kind::LatticeElement, lattice_element_payload(&lat.mul(&x, &y))))
        }
        Command::Inv { lattice, element } => {
            let lat = read_lattice(lattice, verify_tol)?;
            let doc = read_document(element)?;
            if doc.kind == Kind::GroupElement {
                let g = group_element_from_payload(&doc.payload)?;
                check_group_shape(&lat, &[&g])?;
                return Ok(Document::new(Kind::GroupElement, group_element_payload(&lat.pair().sys().inv(&g))));
            }
            let x = lattice_element_from_payload(doc.expect_kind(Kind::LatticeElement)?)?;
            check_element_shape(&lat, &[&x])?;
            Ok(Document::new(Kind::LatticeElement, lattice_element_payload(&lat.inv(&x))))
        }
        Command::Membership { lattice, element } => {
            let lat = read_lattice(lattice, verify_tol)?;
            let g = group_element_from_payload(&read_payload(element, Kind::GroupElement)?)?;
            check_group_shape(&lat, &[&g])?;
            let record = DecisionRecord::Membership { element: lat.membership(&g, group_tol), tol: group_tol };
            Ok(Document::new(Kind::Decision, decision_payload(&record)))
        }
        Command::Automorphisms { system, automorphism } => {
            if let Some(path) = automorphism {
                let spec = automorphism_from_payload(&read_payload(path, Kind::Automorphism)?)?;
                let phi = spec.build(DEFAULT_GROUP_TOL)?;
                require_exact(cli, phi.exact_c().is_some(), "the automorphism")?;
                let mut payload = automorphism_payload(&phi);
                payload["self_check"] = seeded_self_check(&phi, cli.seed);
                return Ok(Document::new(Kind::Automorphism, payload));
            }
            let path = system.as_deref().ok_or_else(|| Failure::Parse("--system or --automorphism is required".into()))?;
            let sys = system_from_payload(&read_payload(path, Kind::System)?)?.build(DEFAULT_GROUP_TOL)?;
            let perms = valid_permutations(&sys)?
                .into_iter()
                .map(|tau| delta_of(&sys, &tau).map(|d| (tau, d)))
                .collect::<Result<Vec<_>, _>>()?;
            Ok(Document::new(Kind::Permutations, permutations_payload(&sys, &perms)))
        }
        Command::Equivalent { left, right, automorphism, radius } => {
            let tol = cli.tol.unwrap_or(DEFAULT_EQUIV_TOL);
            let (l1, l2) = (read_lattice(left, verify_tol)?, read_lattice(right, verify_tol)?);
            let record = match automorphism {
                Some(path) => {
                    let phi = automorphism_from_payload(&read_payload(path, Kind::Automorphism)?)?.build(DEFAULT_GROUP_TOL)?;
                    let check = if cli.exact { equivalent_by_exact(&phi, &l1, &l2, tol)? } else { equivalent_by(&phi, &l1, &l2, tol)? };
                    DecisionRecord::Equivalence { check, witness: Some(phi) }
                }
                None => {
                    let opts = SearchOptions { denom_bound: cli.denom_bound, radius: *radius, tol, ..SearchOptions::default() };
                    match search_equivalence(&l1, &l2, opts)? {
                        Some((phi, check)) => DecisionRecord::Equivalence { check, witness: Some(phi) },
                        None => DecisionRecord::EquivalenceNotFound { denom_bound: cli.denom_bound, radius: *radius, tol },
                    }
                }
            };
            Ok(Document::new(Kind::Decision, decision_payload(&record)))
        }
        Command::Commensurable { left, right, method } => {
            let (l1, l2) = (read_lattice(left, verify_tol)?, read_lattice(right, verify_tol)?);
            require_exact(cli, l1.pair().exact().is_some() && l2.pair().exact().is_some(), "one of the lattices")?;
            let method = match method {
                MethodArg::RationalTest => Method::RationalTest,
                MethodArg::RankTest => Method::RankTest,
            };
            let tol = cli.tol.unwrap_or(DEFAULT_RECONSTRUCT_TOL);
            let rec = commensurable(&l1, &l2, method, cli.denom_bound, tol)?;
            Ok(Document::new(Kind::Decision, decision_payload(&DecisionRecord::Commensurability(rec))))
        }
        Command::Sublattice { left, right, q, r } => {
            let sub = match (left, right, q, r) {
                (Some(left), Some(right), _, _) => {
                    let (l1, l2) = (read_lattice(left, verify_tol)?, read_lattice(right, verify_tol)?);
                    let tol = cli.tol.unwrap_or(DEFAULT_RECONSTRUCT_TOL);
                    commensurable(&l1, &l2, Method::RationalTest, cli.denom_bound, tol)?.common_sublattice()?
                }
                (_, _, Some(q), Some(r)) => common_sublattice(&read_matrix(q)?, &read_matrix(r)?)?,
                _ => return Err(Failure::Parse("give --left and --right, or --q and --r".into())),
            };
            Ok(Document::new(Kind::Sublattice, sublattice_payload(&sub)))
        }
        Command::Family3d { k, l } => {
            let a = family_3d(*k, *l)?;
            Ok(Document::new(Kind::Matrix, matrix_payload(&ExactMatrix::from_int(&a))))
        }
        Command::Presentation { lattice } => {
            let lat = read_lattice(lattice, verify_tol)?;
            Ok(Document::new(Kind::Presentation, presentation_payload(&lat.presentation())))
        }
    }
}

/// Multipliers `σ⁻¹ A_j σ` for the integer matrices `A_j` obtained from the
/// floating-point holonomy of `(σ, ρ)`.
fn inferred_multipliers(sys: &solvlat::group::DiagSystem, sigma: &ExactMatrix, rho: Option<&str>) -> Result<Vec<ExactMatrix>, Failure> {
    let rho = rho.ok_or_else(|| Failure::Parse("--exact without --multiplier needs --rho".into()))?;
    let rho = read_matrix(rho)?.to_f64();
    let float = CompatiblePair::verify(sys, &sigma.to_f64(), &rho, DEFAULT_PAIR_TOL)?;
    let sigma_inv = sigma.inverse().map_err(|_| Failure::from(LatticeError::Singular))?;
    float
        .holonomy()
        .iter()
        .map(|a| {
            let e = sigma_inv.mul(&ExactMatrix::from_int(a))?.mul(sigma)?;
            Ok(e)
        })
        .collect::<Result<Vec<_>, solvlat::exact::ExactError>>()
        .map_err(|e| LatticeError::from(e).into())
}

fn seeded_self_check(phi: &solvlat::classify::Automorphism, seed: u64) -> Value {
    let mut rng = StdRng::seed_from_u64(seed);
    let samples = 32;
    let worst = (0..samples)
        .map(|_| {
            let t = DVector::from_fn(phi.sys().m(), |_, _| rng.random_range(-1.0..1.0));
            phi.intertwining_residual_at(&t)
        })
        .fold(0.0, f64::max);
    json!({ "seed": seed, "samples": samples, "max_intertwining_residual": float_to_json(worst) })
}

fn check_group_shape(lat: &Lattice, gs: &[&solvlat::group::GroupElement]) -> Result<(), Failure> {
    for g in gs {
        if g.x.len() != lat.n() || g.t.len() != lat.m() {
            return Err(Failure::Parse(format!("group element has shape ({}, {}), expected ({}, {})", g.x.len(), g.t.len(), lat.n(), lat.m())));
        }
    }
    Ok(())
}

fn check_element_shape(lat: &Lattice, es: &[&solvlat::lattice::LatticeElement]) -> Result<(), Failure> {
    for e in es {
        if e.v.len() != lat.n() || e.k.len() != lat.m() {
            return Err(Failure::Parse(format!("lattice element has shape ({}, {}), expected ({}, {})", e.v.len(), e.k.len(), lat.n(), lat.m())));
        }
    }
    Ok(())
}

fn emit(doc: &Document, output: Option<&Path>) -> Result<(), String> {
    let text = doc.emit();
    match output {
        Some(path) => std::fs::write(path, text + "\n").map_err(|e| format!("{}: {e}", path.display())),
        None => {
            print_stdout(&text);
            Ok(())
        }
    }
}

fn print_stdout(text: &str) {
    use std::io::Write;
    let mut out = std::io::stdout().lock();
    // a closed pipe (e.g. `| head`) is not an error worth reporting
    let _ = writeln!(out, "{text}").and_then(|_| out.flush());
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    let (doc, code) = match run(&cli) {
        Ok(doc) => (doc, 0),
        Err(Failure::Parse(message)) => (Document::new(Kind::Error, error_payload("ParseError", &message, Value::Null)), 2),
        Err(Failure::Domain { name, message, details }) => (Document::new(Kind::Error, error_payload(&name, &message, details)), 1),
    };
    if code != 0 {
        print_stdout(&doc.emit());
        return ExitCode::from(code);
    }
    match emit(&doc, cli.output.as_deref()) {
        Ok(()) => ExitCode::SUCCESS,
        Err(message) => {
            print_stdout(&Document::new(Kind::Error, error_payload("IoError", &message, Value::Null)).emit());
            ExitCode::from(2)
        }
    }
}
