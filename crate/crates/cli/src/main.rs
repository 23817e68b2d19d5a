use std::io::Read;
use std::path::PathBuf;
use std::process::ExitCode;

use anyhow::{anyhow, bail, Context, Result};
use clap::{Args, Parser, Subcommand};
use serde_json::{json, Value};

use toric_forms::aut::{automorphism_group, identify_gl2_class, Gl2Label};
use toric_forms::builtin::{builtin, builtin_names};
use toric_forms::classify::{
    classify_fan, classify_projective, classify_surface_real, evaluate, surface_table,
    BrauerTower, ClassificationReport, ClassifyError, Evaluated, H1Value,
};
use toric_forms::cohomology::{
    brute_force_h1_finite, h1_finite_field_torus, h1_real_involution, FiniteModule,
    LatticeAction,
};
use toric_forms::fan::Fan;
use toric_forms::galois::{enumerate_hom_classes, FieldBackend, GroupSpec, SymbolicBrauer};
use toric_forms::linalg::{FGAbelianGroup, IntMatrix};

#[derive(Parser)]
#[command(name = "toric-forms", version, about = "Twisted forms of split toric varieties")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Fan validation and invariants
    #[command(subcommand)]
    Fan(FanCmd),
    /// Classification of twisted forms
    #[command(subcommand)]
    Classify(ClassifyCmd),
    /// Direct cohomology computations
    #[command(subcommand)]
    Cohomology(CohomologyCmd),
    /// Symbolic tables
    #[command(subcommand)]
    Table(TableCmd),
}

#[derive(Subcommand)]
enum FanCmd {
    /// Validate a fan and echo it
    Validate(FanArgs),
    /// Rank, rays, smoothness, completeness, class group, a-sequence
    Info(FanArgs),
    /// Automorphism group and its GL(2,Z) class
    Aut(FanArgs),
    /// Cox construction data
    Cox(FanArgs),
}

#[derive(Subcommand)]
enum ClassifyCmd {
    /// Forms of projective space over a cyclic extension
    Projective {
        #[arg(short = 'n', value_name = "N")]
        n: usize,
        #[arg(long, value_parser = parse_backend)]
        backend: BackendSpec,
        #[arg(long)]
        json: bool,
    },
    /// Forms of an arbitrary fan
    Fan {
        #[command(flatten)]
        source: FanSource,
        #[arg(long, value_parser = parse_backend)]
        backend: BackendSpec,
        /// defaults to the cyclic group of the backend
        #[arg(long, value_parser = parse_group)]
        group: Option<GroupArg>,
        /// assert that the fan is quasiprojective
        #[arg(long)]
        quasiprojective: bool,
        #[arg(long)]
        json: bool,
    },
    /// Real forms of a toric surface from the involution table
    SurfaceReal(FanArgs),
}

#[derive(Subcommand)]
enum CohomologyCmd {
    /// H^1 over C/R for an involution given as a JSON matrix
    H1Real {
        #[arg(long, value_name = "JSON")]
        matrix: String,
        #[arg(long)]
        json: bool,
    },
    /// Compare the norm formula, the torus ker/im route and brute force over a finite field
    Oracle {
        #[command(flatten)]
        source: FanSource,
        #[arg(long, value_parser = parse_backend)]
        backend: BackendSpec,
        #[arg(long)]
        json: bool,
    },
}

#[derive(Subcommand)]
enum TableCmd {
    /// Cohomology of real-or-arbitrary toric surfaces by subgroup class
    Surface {
        /// single label such as C3 or D6p; all labels when omitted
        #[arg(long)]
        label: Option<String>,
        /// evaluate at `real`, `split` or a JSON tower file
        #[arg(long)]
        tower: Option<String>,
        #[arg(long)]
        json: bool,
    },
}

#[derive(Args)]
struct FanArgs {
    #[command(flatten)]
    source: FanSource,
    #[arg(long)]
    json: bool,
}

#[derive(Args)]
#[group(required = true, multiple = false)]
struct FanSource {
    /// fan JSON file
    #[arg(long)]
    file: Option<PathBuf>,
    /// read fan JSON from standard input
    #[arg(long)]
    stdin: bool,
    /// builtin fan: projective:N, hexagon or surface:LABEL
    #[arg(long, value_name = "NAME")]
    builtin: Option<String>,
}

#[derive(Clone)]
enum BackendSpec {
    Real,
    FiniteField(u64, u64),
    Symbolic(PathBuf),
}

#[derive(Clone)]
enum GroupArg {
    Cyclic(usize),
    Dihedral(usize),
}

fn parse_backend(s: &str) -> Result<BackendSpec, String> {
    if s == "real" {
        return Ok(BackendSpec::Real);
    }
    if let Some(rest) = s.strip_prefix("ff:") {
        let (q, d) = rest.split_once(',').ok_or("expected ff:q,d")?;
        let q = q.trim().parse().map_err(|_| format!("bad field size {q:?}"))?;
        let d = d.trim().parse().map_err(|_| format!("bad degree {d:?}"))?;
        return Ok(BackendSpec::FiniteField(q, d));
    }
    if let Some(path) = s.strip_prefix("symbolic:") {
        if path.is_empty() {
            return Err("expected symbolic:PATH".into());
        }
        return Ok(BackendSpec::Symbolic(path.into()));
    }
    Err(format!("unknown backend {s:?}; use real, ff:q,d or symbolic:PATH"))
}

fn parse_group(s: &str) -> Result<GroupArg, String> {
    let num = |x: &str| x.parse::<usize>().map_err(|_| format!("bad group order {x:?}"));
    if let Some(d) = s.strip_prefix("cyclic:") {
        Ok(GroupArg::Cyclic(num(d)?))
    } else if let Some(n) = s.strip_prefix("dihedral:") {
        Ok(GroupArg::Dihedral(num(n)?))
    } else {
        Err(format!("unknown group {s:?}; use cyclic:d or dihedral:2m"))
    }
}

impl BackendSpec {
    fn build(&self, group_order: Option<usize>) -> Result<FieldBackend> {
        Ok(match self {
            BackendSpec::Real => FieldBackend::RealComplex,
            BackendSpec::FiniteField(q, d) => FieldBackend::finite_field(*q, *d)?,
            BackendSpec::Symbolic(path) => {
                FieldBackend::symbolic(SymbolicBrauer::from_path(path, group_order)?)
            }
        })
    }
}

impl GroupArg {
    fn build(&self) -> Result<GroupSpec> {
        Ok(match self {
            GroupArg::Cyclic(d) => GroupSpec::cyclic(*d)?,
            GroupArg::Dihedral(n) => GroupSpec::dihedral(*n)?,
        })
    }
}

impl FanSource {
    fn load(&self) -> Result<Fan> {
        if let Some(name) = &self.builtin {
            return Ok(builtin(name)
                .with_context(|| format!("known names: projective:N, {}", builtin_names().join(", ")))?
                .fan);
        }
        let text = if let Some(path) = &self.file {
            std::fs::read_to_string(path).with_context(|| format!("reading {}", path.display()))?
        } else {
            let mut s = String::new();
            std::io::stdin().read_to_string(&mut s).context("reading standard input")?;
            s
        };
        Ok(Fan::from_json_str(&text)?)
    }
}

fn print_json(v: &Value) {
    println!("{}", serde_json::to_string_pretty(v).expect("JSON values serialize"));
}

fn tuple(v: &[i64]) -> String {
    let parts: Vec<String> = v.iter().map(ToString::to_string).collect();
    format!("({})", parts.join(","))
}

fn group_text(g: &FGAbelianGroup) -> String {
    if g.is_trivial() {
        "trivial".into()
    } else {
        g.to_string()
    }
}

fn h1_text(h: &H1Value) -> String {
    match h {
        H1Value::Explicit(g) => match g.order() {
            Some(o) => format!("{} (order {o})", group_text(g)),
            None => group_text(g),
        },
        H1Value::Symbolic(e) => e.to_string(),
    }
}

fn fan_validate(args: &FanArgs) -> Result<()> {
    let fan = args.source.load()?;
    if args.json {
        println!("{}", fan.to_json_string());
    } else {
        println!(
            "valid fan: rank {}, {} rays, {} maximal cones",
            fan.rank(),
            fan.ray_count(),
            fan.cones().len()
        );
    }
    for w in fan.warnings() {
        eprintln!("warning: {w}");
    }
    Ok(())
}

fn fan_info(args: &FanArgs) -> Result<()> {
    let fan = args.source.load()?;
    let complete = if fan.rank() == 2 { fan.is_complete_rank2().ok() } else { None };
    let a_seq = fan.a_sequence().ok();
    let cl = fan.class_group();
    if args.json {
        print_json(&json!({
            "rank": fan.rank(),
            "rays": fan.rays(),
            "cones": fan.cones(),
            "smooth": fan.is_smooth(),
            "complete": complete,
            "class_group": cl.to_json(),
            "a_sequence": a_seq,
        }));
        return Ok(());
    }
    let rays: Vec<String> = fan.rays().iter().map(|r| tuple(r)).collect();
    println!("rank: {}", fan.rank());
    println!("rays: {}", rays.join(" "));
    println!("cones: {:?}", fan.cones());
    println!("smooth: {}", fan.is_smooth());
    match complete {
        Some(c) => println!("complete: {c}"),
        None => println!("complete: n/a (rank 2 only)"),
    }
    println!("class group: {cl}");
    match a_seq {
        Some(a) => println!("a-sequence: {}", tuple(&a)),
        None => println!("a-sequence: n/a (smooth complete rank 2 only)"),
    }
    Ok(())
}

fn fan_aut(args: &FanArgs) -> Result<()> {
    let fan = args.source.load()?;
    let g = automorphism_group(&fan)?;
    let label = (fan.rank() == 2)
        .then(|| identify_gl2_class(&g))
        .transpose()?;
    if args.json {
        print_json(&json!({
            "order": g.order(),
            "label": label.as_ref().map(|l| l.label.to_string()),
            "witness": label.as_ref().map(|l| &l.witness),
            "elements": g.elements().iter().map(|e| json!({"matrix": e.matrix, "perm": e.perm})).collect::<Vec<_>>(),
        }));
        return Ok(());
    }
    match &label {
        Some(l) => println!("order {}, label {}", g.order(), l.label),
        None => println!("order {}", g.order()),
    }
    for e in g.elements() {
        println!("  {}  rays -> {:?}", e.matrix, e.perm);
    }
    Ok(())
}

fn fan_cox(args: &FanArgs) -> Result<()> {
    let fan = args.source.load()?;
    let cox = fan.cox_data();
    if args.json {
        print_json(&json!({
            "ray_count": cox.ray_count,
            "irrelevant_monomials": cox.irrelevant_monomials,
            "class_group": cox.class_group.to_json(),
            "degree_matrix": cox.degree_matrix,
            "degree_moduli": cox.degree_moduli.iter().map(toric_forms::linalg::bigint_json).collect::<Vec<_>>(),
        }));
        return Ok(());
    }
    let monomials: Vec<String> = cox
        .irrelevant_monomials
        .iter()
        .map(|m| {
            if m.is_empty() {
                "1".to_string()
            } else {
                m.iter().map(|i| format!("u{i}")).collect::<Vec<_>>().join("*")
            }
        })
        .collect();
    println!("variables: u0..u{}", cox.ray_count.saturating_sub(1));
    println!("irrelevant ideal: <{}>", monomials.join(", "));
    println!("class group: {}", cox.class_group);
    println!("degree matrix: {}", cox.degree_matrix);
    let moduli: Vec<String> = cox.degree_moduli.iter().map(ToString::to_string).collect();
    println!("row moduli: {}", moduli.join(" "));
    Ok(())
}

fn print_report(r: &ClassificationReport, json: bool) {
    if json {
        print_json(&r.to_json());
        return;
    }
    println!("group: {}   backend: {}", r.group, r.backend);
    for (i, e) in r.entries.iter().enumerate() {
        let phi: Vec<String> = e.phi.iter().map(ToString::to_string).collect();
        let mut tags = Vec::new();
        if let Some(p) = &e.partition {
            tags.push(format!("partition {}", tuple(&p.iter().map(|&x| x as i64).collect::<Vec<_>>())));
        }
        if let Some(t) = e.involution {
            tags.push(format!("type {t}"));
        }
        let tags = if tags.is_empty() { String::new() } else { format!("  [{}]", tags.join(", ")) };
        println!(
            "{i:>3}  phi = {}  H1 = {}  {}{tags}",
            if phi.is_empty() { "1".to_string() } else { phi.join(" ") },
            h1_text(&e.h1),
            e.descent.status
        );
        if let Some(note) = &e.descent.note {
            if i == 0 {
                println!("     note: {note}");
            }
        }
    }
    match &r.total {
        Some(t) => println!("total: {t} forms"),
        None => println!("total: symbolic"),
    }
    if let Some(a) = r.prime_shortcut_agrees {
        println!("prime-degree closed form agrees: {a}");
    }
}

fn classify(cmd: &ClassifyCmd) -> Result<()> {
    match cmd {
        ClassifyCmd::Projective { n, backend, json } => {
            if *n == 0 {
                bail!("n must be at least 1");
            }
            let b = backend.build(None)?;
            print_report(&classify_projective(*n, &b)?, *json);
        }
        ClassifyCmd::Fan { source, backend, group, quasiprojective, json } => {
            let fan = source.load()?;
            let group = group.as_ref().map(GroupArg::build).transpose()?;
            let b = backend.build(group.as_ref().map(GroupSpec::order))?;
            let group = match group {
                Some(g) => g,
                None => b.galois_group(),
            };
            print_report(&classify_fan(&fan, &group, &b, *quasiprojective)?, *json);
        }
        ClassifyCmd::SurfaceReal(args) => {
            let fan = args.source.load()?;
            print_report(&classify_surface_real(&fan)?, args.json);
        }
    }
    Ok(())
}

fn cohomology(cmd: &CohomologyCmd) -> Result<()> {
    match cmd {
        CohomologyCmd::H1Real { matrix, json } => {
            let rows: Vec<Vec<i64>> =
                serde_json::from_str(matrix).context("matrix must be a JSON array of integer rows")?;
            let n = rows.len();
            if n == 0 || rows.iter().any(|r| r.len() != n) {
                bail!("matrix must be square and nonempty");
            }
            let s = IntMatrix::from_rows(&rows);
            let h = h1_real_involution(&s)?;
            if *json {
                print_json(&h.to_json());
            } else {
                println!("H1 = {}", h1_text(&H1Value::Explicit(h)));
            }
        }
        CohomologyCmd::Oracle { source, backend, json } => {
            let BackendSpec::FiniteField(q, d) = backend else {
                bail!("the oracle compares finite field routes; use --backend ff:q,d");
            };
            let fan = source.load()?;
            let b = backend.build(None)?;
            let group = b.galois_group();
            let aut = automorphism_group(&fan)?;
            let n = q.checked_pow(*d as u32).ok_or_else(|| anyhow!("field too large"))? - 1;
            let mut rows = Vec::new();
            let mut all_agree = true;
            for hom in enumerate_hom_classes(&group, &aut) {
                let norm = toric_forms::classify::class_h1(&hom, &b, true)?;
                let action = LatticeAction::from_hom(&hom);
                let gen = action
                    .generators
                    .first()
                    .cloned()
                    .unwrap_or_else(|| IntMatrix::identity(fan.rank()));
                let torus = h1_finite_field_torus(*q, *d, &gen)?;
                let module = FiniteModule::from_lattice_action(&action, n, *q as i64);
                let brute = brute_force_h1_finite(&group, &module)?;
                let agree = norm == H1Value::Explicit(torus.clone()) && torus == brute;
                all_agree &= agree;
                rows.push((hom.generator_matrices(), norm, torus, brute, agree));
            }
            if *json {
                print_json(&json!({
                    "backend": b.label(),
                    "classes": rows.iter().map(|(phi, norm, torus, brute, agree)| json!({
                        "phi": phi,
                        "norm_formula": norm.to_json(),
                        "torus": torus.to_json(),
                        "brute_force": brute.to_json(),
                        "agree": agree,
                    })).collect::<Vec<_>>(),
                    "agree": all_agree,
                }));
            } else {
                println!("backend: {}", b.label());
                for (i, (phi, norm, torus, brute, agree)) in rows.iter().enumerate() {
                    let phi: Vec<String> = phi.iter().map(ToString::to_string).collect();
                    println!(
                        "{i:>3}  phi = {}  norm: {}  torus: {}  brute: {}  {}",
                        if phi.is_empty() { "1".to_string() } else { phi.join(" ") },
                        h1_text(norm),
                        group_text(torus),
                        group_text(brute),
                        if *agree { "agree" } else { "DISAGREE" }
                    );
                }
            }
            if !all_agree {
                bail!("cohomology routes disagree");
            }
        }
    }
    Ok(())
}

fn table(cmd: &TableCmd) -> Result<()> {
    let TableCmd::Surface { label, tower, json } = cmd;
    let labels = match label {
        Some(l) => vec![l.parse::<Gl2Label>()?],
        None => Gl2Label::ALL.to_vec(),
    };
    let tower = match tower.as_deref() {
        None => None,
        Some("real") => Some(BrauerTower::real_complex()),
        Some("split") => Some(BrauerTower::split()),
        Some(path) => {
            let s = std::fs::read_to_string(path).with_context(|| format!("reading {path}"))?;
            Some(BrauerTower::from_json_str(&s)?)
        }
    };
    let single = label.is_some();
    let mut out = Vec::new();
    for l in labels {
        let expr = surface_table(l);
        // In the full listing a row the tower cannot decide is reported, not fatal.
        let value = match tower.as_ref().map(|t| evaluate(&expr, t)) {
            None => None,
            Some(Ok(v)) => Some(Ok(v)),
            Some(Err(ClassifyError::Unevaluable(why))) if !single => Some(Err(why)),
            Some(Err(e)) => return Err(e.into()),
        };
        if *json {
            let mut row = json!({"label": l.to_string(), "h1": expr.to_json()});
            match &value {
                Some(Ok(v)) => row["value"] = v.to_json(),
                Some(Err(why)) => row["unevaluable"] = json!(why),
                None => {}
            }
            out.push(row);
        } else {
            match value {
                Some(Ok(Evaluated::Group(g))) => println!("{:<4} {expr}  =  {}", l.to_string(), group_text(&g)),
                Some(Ok(v)) => println!("{:<4} {expr}  =  {v}", l.to_string()),
                Some(Err(why)) => println!("{:<4} {expr}  (no tower value for {why})", l.to_string()),
                None => println!("{:<4} {expr}", l.to_string()),
            }
        }
    }
    if *json {
        print_json(&Value::Array(out));
    }
    Ok(())
}

fn run(cli: Cli) -> Result<()> {
    match &cli.command {
        Command::Fan(FanCmd::Validate(a)) => fan_validate(a),
        Command::Fan(FanCmd::Info(a)) => fan_info(a),
        Command::Fan(FanCmd::Aut(a)) => fan_aut(a),
        Command::Fan(FanCmd::Cox(a)) => fan_cox(a),
        Command::Classify(c) => classify(c),
        Command::Cohomology(c) => cohomology(c),
        Command::Table(t) => table(t),
    }
}

fn main() -> ExitCode {
    let cli = match Cli::try_parse() {
        Ok(cli) => cli,
        Err(e) => {
            let _ = e.print();
            return ExitCode::from(e.exit_code() as u8);
        }
    };
    match run(cli) {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("error: {e:#}");
            ExitCode::from(1)
        }
    }
}
