use std::cmp::Ordering;
use std::io::Write;
use std::path::{Path, PathBuf};
use std::process::ExitCode;

use anyhow::{bail, Context, Result};
use clap::{Args, Parser, Subcommand, ValueEnum};
use serde_json::{json, Value};

use njalg::acceptance::{self, Options, DEFAULT_SEED};
use njalg::algebra_core::{check_associativity, check_bimodule, check_nijenhuis, check_nijenhuis_bimodule, CheckReport};
use njalg::cohomology::{alg_complex, cohomology_table, nja_complex, njo_complex};
use njalg::exactlin::{format_rational, SparseMatrix};
use njalg::homotopy_structures::{
    check_ainf1, check_ainf1_bimodule, check_homotopy_nijenhuis, check_homotopy_rb, check_stasheff,
    rb_to_nijenhuis, ResidualReport,
};
use njalg::io::{load_ainf1, load_ainf1_bimodule, load_rb_operator, AlgebraFile, GradedFile, LoadedAlgebra, ModuleFile};
use njalg::linf_deformation::{from_structure, mc_residual, twisted_cohomology, DeformationElement};
use njalg::operad_forest::{
    compare_xi, d_squared_report, generator_differential, Family, Generator, Presentation, SignMutation, TreeMonomial,
};

#[derive(Parser)]
#[command(name = "njalg", version, about = "Exact computations with Nijenhuis associative algebras")]
struct Cli {
    /// seed for every randomized check
    #[arg(long, global = true, default_value_t = DEFAULT_SEED)]
    seed: u64,
    /// print a JSON document instead of text
    #[arg(long, global = true)]
    json: bool,
    /// also write the JSON report into this directory
    #[arg(long, global = true, value_name = "DIR")]
    emit: Option<PathBuf>,
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Verify structure identities
    #[command(subcommand)]
    Check(CheckCmd),
    /// Cohomology table of a Nijenhuis algebra with coefficients
    Cohomology {
        algebra: PathBuf,
        #[arg(long, default_value_t = 4)]
        max_degree: usize,
        /// bimodule file; defaults to the regular bimodule
        #[arg(long)]
        module: Option<PathBuf>,
        /// write every differential as a sparse triple list
        #[arg(long, value_name = "DIR")]
        emit_matrices: Option<PathBuf>,
    },
    /// Differentials of the minimal model
    #[command(subcommand)]
    Cobar(CobarCmd),
    /// Monomial order on tree monomials
    #[command(subcommand)]
    Order(OrderCmd),
    /// Maurer-Cartan residuals
    #[command(subcommand)]
    Mc(McCmd),
    /// Twisted deformation complex
    #[command(subcommand)]
    Twist(TwistCmd),
    /// Homotopy relative Rota-Baxter operators
    #[command(subcommand)]
    Rb(RbCmd),
    /// Run the acceptance suite, one JSON line per criterion
    Acceptance {
        /// criterion numbers or name fragments
        #[arg(long)]
        only: Vec<String>,
        #[arg(long, value_enum, default_value_t = Mutation::None)]
        mutate: Mutation,
    },
}

#[derive(Subcommand)]
enum CheckCmd {
    /// Associativity, the Nijenhuis identity and, if present, the bimodule identities
    Nijenhuis { file: PathBuf },
    /// Stasheff and homotopy Nijenhuis identities of a graded structure
    Hnja {
        file: PathBuf,
        #[arg(long, default_value_t = 4)]
        max_arity: usize,
    },
    /// A∞[1] identities and the homotopy relative Rota-Baxter identity
    Rb {
        #[command(flatten)]
        files: RbFiles,
        #[arg(long, default_value_t = 4)]
        max_arity: usize,
    },
}

#[derive(Args)]
struct RbFiles {
    a_file: PathBuf,
    m_file: PathBuf,
    b_file: PathBuf,
}

#[derive(Subcommand)]
enum CobarCmd {
    /// Check that the differential squares to zero on every generator
    D2 {
        #[arg(long, default_value_t = 4)]
        max_arity: usize,
        #[arg(long, value_enum, default_value_t = Pres::Mp)]
        presentation: Pres,
        #[arg(long, value_enum, default_value_t = Mutation::None)]
        mutate: Mutation,
    },
    /// Print the differential of a generator such as m3 or P2
    Show {
        generator: String,
        #[arg(long, value_enum, default_value_t = Mutation::None)]
        mutate: Mutation,
    },
}

#[derive(Subcommand)]
enum OrderCmd {
    /// Compare two tree monomials, printing GT, LT or EQ
    Compare { left: String, right: String },
}

#[derive(Subcommand)]
enum McCmd {
    /// Residual norms per arity for a graded structure or an algebra file
    Check {
        file: PathBuf,
        #[arg(long, default_value_t = 4)]
        max_arity: usize,
    },
}

#[derive(Subcommand)]
enum TwistCmd {
    /// Cohomology of the twisted complex next to the cone cohomology
    Cohomology {
        algebra: PathBuf,
        #[arg(long, default_value_t = 4)]
        max_degree: usize,
    },
}

#[derive(Subcommand)]
enum RbCmd {
    /// Emit the induced homotopy Nijenhuis structure in the graded format
    Lift {
        #[command(flatten)]
        files: RbFiles,
        #[arg(long, default_value_t = 4)]
        max_arity: usize,
    },
}

#[derive(Clone, Copy, ValueEnum)]
enum Pres {
    Mp,
    Xy,
}

#[derive(Clone, Copy, ValueEnum)]
enum Mutation {
    None,
    FlipNested,
}

impl From<Mutation> for SignMutation {
    fn from(m: Mutation) -> Self {
        match m {
            Mutation::None => SignMutation::None,
            Mutation::FlipNested => SignMutation::FlipNested,
        }
    }
}

/// Result of a command: text lines, the same content as JSON, and whether
/// every mathematical check passed.
struct Report {
    name: &'static str,
    text: Vec<String>,
    json: Value,
    passed: bool,
}

fn read(path: &Path) -> Result<String> {
    std::fs::read_to_string(path).with_context(|| format!("cannot read {}", path.display()))
}

fn load_algebra(path: &Path) -> Result<LoadedAlgebra> {
    let f = AlgebraFile::parse(&read(path)?).with_context(|| format!("{}", path.display()))?;
    f.load().with_context(|| format!("{}", path.display()))
}

fn load_graded(path: &Path) -> Result<GradedFile> {
    GradedFile::parse(&read(path)?).with_context(|| format!("{}", path.display()))
}

fn pass(ok: bool) -> &'static str {
    if ok {
        "PASS"
    } else {
        "FAIL"
    }
}

fn vector(v: &[njalg::exactlin::Rational]) -> Vec<String> {
    v.iter().map(format_rational).collect()
}

fn check_lines(r: &CheckReport, text: &mut Vec<String>) -> Value {
    text.push(format!("{}: {}", r.name, pass(r.passed())));
    for v in &r.violations {
        text.push(format!("  {:?}: {} defect [{}]", v.indices, v.relation, vector(&v.defect).join(", ")));
    }
    json!({
        "name": r.name,
        "passed": r.passed(),
        "violations": r.violations.iter().map(|v| json!({
            "relation": v.relation, "indices": v.indices, "defect": vector(&v.defect)
        })).collect::<Vec<_>>(),
    })
}

fn residual_lines(r: &ResidualReport, text: &mut Vec<String>) -> Value {
    let norms = r.norms();
    text.push(format!("{}: {}", r.name, pass(r.passed())));
    for &(n, nnz) in &norms {
        text.push(format!("  arity {n}: {nnz} nonzero coefficients {}", pass(nnz == 0)));
    }
    json!({
        "name": r.name,
        "passed": r.passed(),
        "first_failure": r.first_failure(),
        "norms": norms.iter().map(|&(n, k)| json!({"arity": n, "nonzero": k})).collect::<Vec<_>>(),
    })
}

fn check_nijenhuis_cmd(file: &Path) -> Result<Report> {
    let l = load_algebra(file)?;
    let a = &l.algebra.algebra;
    let mut reports = vec![check_associativity(a), check_nijenhuis(a, &l.algebra.operator)];
    if l.explicit_module {
        reports.push(check_bimodule(a, &l.module.module));
        reports.push(check_nijenhuis_bimodule(&l.algebra, &l.module.module, &l.module.operator));
    }
    let mut text = Vec::new();
    let checks: Vec<Value> = reports.iter().map(|r| check_lines(r, &mut text)).collect();
    let passed = reports.iter().all(CheckReport::passed);
    Ok(Report { name: "check", text, json: json!({"checks": checks, "passed": passed}), passed })
}

fn check_hnja_cmd(file: &Path, max: usize) -> Result<Report> {
    let h = load_graded(file)?.homotopy_nijenhuis()?;
    let st = check_stasheff(&h, max)?;
    let hn = check_homotopy_nijenhuis(&h, max)?;
    let mut text = Vec::new();
    let checks = vec![residual_lines(&st, &mut text), residual_lines(&hn, &mut text)];
    let passed = st.passed() && hn.passed();
    Ok(Report { name: "check", text, json: json!({"checks": checks, "passed": passed}), passed })
}

fn load_rb(files: &RbFiles) -> Result<(njalg::homotopy_structures::AInfinityOneBimodule, njalg::homotopy_structures::HomotopyRbOperator)> {
    let a = load_ainf1(&load_graded(&files.a_file)?).with_context(|| files.a_file.display().to_string())?;
    let m = load_ainf1_bimodule(&a, &load_graded(&files.m_file)?).with_context(|| files.m_file.display().to_string())?;
    let b = load_rb_operator(&m, &load_graded(&files.b_file)?).with_context(|| files.b_file.display().to_string())?;
    Ok((m, b))
}

fn check_rb_cmd(files: &RbFiles, max: usize) -> Result<Report> {
    let (m, b) = load_rb(files)?;
    let reports = [check_ainf1(&m.algebra, max)?, check_ainf1_bimodule(&m, max)?, check_homotopy_rb(&m, &b, max)?];
    let mut text = Vec::new();
    let checks: Vec<Value> = reports.iter().map(|r| residual_lines(r, &mut text)).collect();
    let passed = reports.iter().all(ResidualReport::passed);
    Ok(Report { name: "check", text, json: json!({"checks": checks, "passed": passed}), passed })
}

fn matrix_json(m: &SparseMatrix) -> Value {
    let entries: Vec<Value> = m.triples().map(|(i, j, c)| json!([i, j, format_rational(c)])).collect();
    json!({"rows": m.nrows(), "cols": m.ncols(), "entries": entries})
}

fn write_json(dir: &Path, name: &str, v: &Value) -> Result<()> {
    std::fs::create_dir_all(dir).with_context(|| format!("cannot create {}", dir.display()))?;
    let path = dir.join(name);
    std::fs::write(&path, serde_json::to_string_pretty(v)? + "\n").with_context(|| format!("cannot write {}", path.display()))
}

/// Checks that the loaded data is a Nijenhuis algebra with a Nijenhuis
/// bimodule; failures are reported as a failed mathematical check.
fn verify(l: &LoadedAlgebra, text: &mut Vec<String>) -> Option<Value> {
    let reports = [
        check_associativity(&l.algebra.algebra),
        check_nijenhuis(&l.algebra.algebra, &l.algebra.operator),
        check_bimodule(&l.algebra.algebra, &l.module.module),
        check_nijenhuis_bimodule(&l.algebra, &l.module.module, &l.module.operator),
    ];
    if reports.iter().all(CheckReport::passed) {
        return None;
    }
    let checks: Vec<Value> = reports.iter().filter(|r| !r.passed()).map(|r| check_lines(r, text)).collect();
    Some(json!({"checks": checks, "passed": false}))
}

fn cohomology_cmd(algebra: &Path, max: usize, module: Option<&Path>, emit: Option<&Path>) -> Result<Report> {
    let mut l = load_algebra(algebra)?;
    if let Some(path) = module {
        let mf: ModuleFile = serde_json::from_str(&read(path)?).with_context(|| path.display().to_string())?;
        let f = AlgebraFile { module: Some(mf), ..AlgebraFile::from_structures(&l.algebra, None) };
        l = f.load().with_context(|| path.display().to_string())?;
    }
    let mut text = Vec::new();
    if let Some(j) = verify(&l, &mut text) {
        return Ok(Report { name: "cohomology", text, json: j, passed: false });
    }
    let (n, m) = (&l.algebra, &l.module);
    let t = cohomology_table(n, m, max)?;
    text.push(format!("{:>6} {:>8} {:>8} {:>8}", "degree", "Alg", "NjO", "NjA"));
    for k in 0..=max {
        text.push(format!("{k:>6} {:>8} {:>8} {:>8}", t.alg[k], t.njo[k], t.nja[k]));
    }
    text.push(format!("euler and exactness checks: {}", pass(t.euler.consistent())));
    if let Some(dir) = emit {
        for (tag, c) in [("alg", alg_complex(n, m, max)), ("njo", njo_complex(n, m, max)), ("nja", nja_complex(n, m, max))] {
            for (k, d) in c.maps.iter().enumerate() {
                write_json(dir, &format!("d_{tag}_{k}.json"), &matrix_json(d))?;
            }
        }
        text.push(format!("differentials written to {}", dir.display()));
    }
    let json = json!({
        "max_degree": max, "alg": t.alg, "njo": t.njo, "nja": t.nja,
        "euler": {"chain_level": t.euler.chain_level, "cohomology_level": t.euler.cohomology_level,
                  "exactness_bounds": t.euler.exactness_bounds},
    });
    Ok(Report { name: "cohomology", text, json, passed: t.euler.consistent() })
}

fn presentation_of(g: &Generator) -> Presentation {
    match g.family {
        Family::M | Family::P => Presentation::Mp,
        Family::X | Family::Y => Presentation::Xy,
    }
}

fn cobar_d2_cmd(max: usize, pres: Pres, mutate: Mutation) -> Result<Report> {
    let p = match pres {
        Pres::Mp => Presentation::Mp,
        Pres::Xy => Presentation::Xy,
    };
    let rep = d_squared_report(max, p, mutate.into());
    let mut text = Vec::new();
    let mut entries = Vec::new();
    for e in &rep.entries {
        text.push(format!("d^2({}): {} ({} terms in d)", e.generator, pass(e.terms_in_d2 == 0), e.terms_in_d));
        entries.push(json!({"generator": e.generator.to_string(), "terms_in_d": e.terms_in_d, "terms_in_d2": e.terms_in_d2}));
    }
    let passed = rep.all_zero();
    Ok(Report { name: "cobar", text, json: json!({"entries": entries, "passed": passed}), passed })
}

fn cobar_show_cmd(gen: &str, mutate: Mutation) -> Result<Report> {
    let g = Generator::parse(gen)?;
    let d = generator_differential(g, mutate.into());
    let terms = d.sorted_terms();
    let text = if terms.is_empty() {
        vec!["0".to_string()]
    } else {
        terms.iter().map(|(t, c)| format!("{} * {t}", format_rational(c))).collect()
    };
    let json = json!({
        "generator": g.to_string(),
        "terms": terms.iter().map(|(t, c)| json!([format_rational(c), t.to_string()])).collect::<Vec<_>>(),
    });
    Ok(Report { name: "cobar", text, json, passed: true })
}

fn order_cmd(left: &str, right: &str) -> Result<Report> {
    let a = TreeMonomial::parse(left)?;
    let b = TreeMonomial::parse(right)?;
    let pres: Vec<Presentation> = a.vertices().chain(b.vertices()).map(|g| presentation_of(&g)).collect();
    if pres.windows(2).any(|w| w[0] != w[1]) {
        bail!("terms mix the m/P and x/y presentations");
    }
    let o = match compare_xi(&a, &b) {
        Ordering::Greater => "GT",
        Ordering::Less => "LT",
        Ordering::Equal => "EQ",
    };
    Ok(Report { name: "order", text: vec![o.to_string()], json: json!({"left": left, "right": right, "order": o}), passed: true })
}

/// A graded structure file, or an algebra file read as a strict structure.
fn load_deformation(path: &Path) -> Result<DeformationElement> {
    let text = read(path)?;
    let v: Value = serde_json::from_str(&text).with_context(|| path.display().to_string())?;
    if v.get("basis").is_some() {
        let l = load_algebra(path)?;
        return Ok(from_structure(&l.algebra));
    }
    GradedFile::parse(&text)?.deformation().with_context(|| path.display().to_string())
}

fn mc_check_cmd(file: &Path, max: usize) -> Result<Report> {
    let alpha = load_deformation(file)?;
    let mut text = Vec::new();
    let mut rows = Vec::new();
    let mut passed = true;
    for n in 1..=max {
        let (alg, njo) = mc_residual(&alpha, n)?;
        let ok = alg.is_zero() && njo.is_zero();
        passed &= ok;
        text.push(format!("arity {n}: alg {} njo {} {}", alg.nnz(), njo.nnz(), pass(ok)));
        rows.push(json!({"arity": n, "alg": alg.nnz(), "njo": njo.nnz(), "passed": ok}));
    }
    text.push(format!("maurer-cartan: {}", pass(passed)));
    Ok(Report { name: "mc", text, json: json!({"residuals": rows, "passed": passed}), passed })
}

fn twist_cmd(algebra: &Path, max: usize) -> Result<Report> {
    let l = load_algebra(algebra)?;
    let mut text = Vec::new();
    // the twisted complex uses the regular bimodule
    let reg = LoadedAlgebra { module: njalg::algebra_core::NijenhuisBimodule::regular(&l.algebra), ..l };
    if let Some(j) = verify(&reg, &mut text) {
        return Ok(Report { name: "twist", text, json: j, passed: false });
    }
    let n = &reg.algebra;
    let tw = twisted_cohomology(&from_structure(n), n.dim(), max)?;
    let cone = cohomology_table(n, &reg.module, max)?.nja;
    text.push(format!("{:>6} {:>8} {:>8}", "degree", "twisted", "cone"));
    let mut passed = true;
    for k in 1..=max {
        passed &= tw[k - 1] == cone[k];
        text.push(format!("{k:>6} {:>8} {:>8}", tw[k - 1], cone[k]));
    }
    text.push(format!("agreement: {}", pass(passed)));
    Ok(Report { name: "twist", text, json: json!({"twisted": tw, "cone": &cone[1..], "passed": passed}), passed })
}

fn rb_lift_cmd(files: &RbFiles, max: usize) -> Result<Report> {
    let (m, b) = load_rb(files)?;
    let rb = check_homotopy_rb(&m, &b, max)?;
    if !rb.passed() {
        let mut text = Vec::new();
        let j = residual_lines(&rb, &mut text);
        return Ok(Report { name: "rb", text, json: json!({"checks": [j], "passed": false}), passed: false });
    }
    let h = rb_to_nijenhuis(&m, &b, max)?;
    let file = GradedFile::from_homotopy_nijenhuis(&h);
    let out = serde_json::to_value(&file)?;
    let text = vec![serde_json::to_string_pretty(&file)?];
    Ok(Report { name: "rb", text, json: out, passed: true })
}

fn acceptance_cmd(seed: u64, only: &[String], mutate: Mutation) -> Report {
    let opts = Options { seed, only: only.to_vec(), mutation: mutate.into() };
    let reports = acceptance::run(&opts);
    let text: Vec<String> = reports.iter().map(|r| r.json()).collect();
    let passed = reports.iter().all(|r| r.passed);
    let json = serde_json::to_value(&reports).expect("plain structs");
    Report { name: "acceptance", text, json, passed }
}

fn dispatch(cli: &Cli) -> Result<Report> {
    match &cli.command {
        Command::Check(CheckCmd::Nijenhuis { file }) => check_nijenhuis_cmd(file),
        Command::Check(CheckCmd::Hnja { file, max_arity }) => check_hnja_cmd(file, *max_arity),
        Command::Check(CheckCmd::Rb { files, max_arity }) => check_rb_cmd(files, *max_arity),
        Command::Cohomology { algebra, max_degree, module, emit_matrices } => {
            cohomology_cmd(algebra, *max_degree, module.as_deref(), emit_matrices.as_deref())
        }
        Command::Cobar(CobarCmd::D2 { max_arity, presentation, mutate }) => cobar_d2_cmd(*max_arity, *presentation, *mutate),
        Command::Cobar(CobarCmd::Show { generator, mutate }) => cobar_show_cmd(generator, *mutate),
        Command::Order(OrderCmd::Compare { left, right }) => order_cmd(left, right),
        Command::Mc(McCmd::Check { file, max_arity }) => mc_check_cmd(file, *max_arity),
        Command::Twist(TwistCmd::Cohomology { algebra, max_degree }) => twist_cmd(algebra, *max_degree),
        Command::Rb(RbCmd::Lift { files, max_arity }) => rb_lift_cmd(files, *max_arity),
        Command::Acceptance { only, mutate } => Ok(acceptance_cmd(cli.seed, only, *mutate)),
    }
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    let report = match dispatch(&cli) {
        Ok(r) => r,
        Err(e) => {
            eprintln!("error: {e:#}");
            return ExitCode::from(2);
        }
    };
    // a closed pipe is not an error worth reporting
    let mut out = std::io::stdout().lock();
    if cli.json {
        let _ = writeln!(out, "{}", serde_json::to_string_pretty(&report.json).expect("json value"));
    } else {
        for line in &report.text {
            if writeln!(out, "{line}").is_err() {
                break;
            }
        }
    }
    if let Some(dir) = &cli.emit {
        if let Err(e) = write_json(dir, &format!("{}.json", report.name), &report.json) {
            eprintln!("error: {e:#}");
            return ExitCode::from(2);
        }
    }
    if report.passed {
        ExitCode::SUCCESS
    } else {
        ExitCode::from(1)
    }
}
