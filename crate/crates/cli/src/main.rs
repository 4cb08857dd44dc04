use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand, ValueEnum};
use serde_json::{json, Value};

use nlcover::discform::discriminant_form;
use nlcover::glue::{check_unique_embedding, find_anti_isometry, glue_to_k3, Verdict};
use nlcover::io;
use nlcover::isom::{automorphism_group, group_report};
use nlcover::modp::{
    choose_p, enumerate_index_p_sublattices, index_bound, line_classes, line_classes_formula, line_count,
    sublattice_disc_split, MAX_EXHAUSTIVE_LINES,
};
use nlcover::padic::jordan_decompose;
use nlcover::planner::{build_triangle, plan_covering, stability, sublattice_brauer_bijection, Target};
use nlcover::{Budget, Error, IntegralLattice};

#[derive(Parser)]
#[command(name = "nlcover", version, about = "Lattice computations for covers of orthogonal Shimura varieties")]
struct Cli {
    #[command(subcommand)]
    command: Command,
    /// Write the report to this file instead of stdout.
    #[arg(long, global = true)]
    out: Option<PathBuf>,
    /// Render tables instead of JSON.
    #[arg(long, global = true)]
    human: bool,
    /// Order budget for group and subgroup searches.
    #[arg(long, global = true)]
    budget: Option<u64>,
}

#[derive(Args)]
struct LatticeArg {
    /// JSON file or built-in label (U, A2, E8minus, K3, "U^2+<-2>", ...).
    #[arg(long)]
    lattice: String,
}

#[derive(Args)]
struct PrimeArg {
    #[arg(long)]
    p: u64,
}

#[derive(Clone, Copy, ValueEnum)]
enum TargetArg {
    #[value(name = "S")]
    S,
    #[value(name = "M")]
    M,
}

#[derive(Subcommand)]
enum Command {
    /// Signature, determinant, discriminant form and stability.
    Info(LatticeArg),
    /// Glue L and its complement T to a unimodular lattice of signature (3,19).
    #[command(alias = "glue")]
    GlueK3 {
        #[command(flatten)]
        lattice: LatticeArg,
        /// The complement T (JSON file or built-in label).
        #[arg(long)]
        complement: String,
        /// GlueMap JSON; searched for when omitted.
        #[arg(long)]
        glue: Option<PathBuf>,
    },
    /// Automorphism group of a definite lattice.
    Aut(LatticeArg),
    /// Counts of isotropic, square and nonsquare lines mod p.
    Lines {
        #[command(flatten)]
        lattice: LatticeArg,
        #[command(flatten)]
        p: PrimeArg,
    },
    /// All index-p sublattices with the shape of their discriminant group.
    Sublattices {
        #[command(flatten)]
        lattice: LatticeArg,
        #[command(flatten)]
        p: PrimeArg,
    },
    /// Jordan decomposition over Z_p for odd p.
    Jordan {
        #[command(flatten)]
        lattice: LatticeArg,
        #[command(flatten)]
        p: PrimeArg,
        #[arg(long)]
        precision: Option<u32>,
    },
    /// Covering certificate of degree above N.
    PlanCover {
        #[command(flatten)]
        lattice: LatticeArg,
        #[arg(long = "N")]
        n: u64,
        #[arg(long, value_enum, default_value = "S")]
        target: TargetArg,
    },
    /// The triangle T -> S' -> S for a corank-one primitive T.
    Triangle {
        /// Embedding JSON {"ambient", "basis"} of T in S.
        #[arg(long)]
        embedding: PathBuf,
        /// Prime; chosen from --N when omitted.
        #[arg(long)]
        p: Option<u64>,
        #[arg(long = "N")]
        n: Option<u64>,
    },
    /// Index-p sublattices paired with their functionals mod p.
    BrauerMap {
        #[command(flatten)]
        lattice: LatticeArg,
        #[command(flatten)]
        p: PrimeArg,
    },
}

fn verdict_json(v: &Verdict) -> Value {
    json!({"holds": v.holds, "reason": v.reason})
}

fn info(l: &IntegralLattice) -> nlcover::Result<Value> {
    let d = discriminant_form(l)?;
    let sig = l.signature();
    let st = stability(l).ok();
    Ok(json!({
        "lattice": io::lattice_to_json(l),
        "rank": l.rank(),
        "signature": [sig.n_plus, sig.n_minus],
        "det": io::int_to_json(&l.det()),
        "discriminant_form": io::fqf_to_json(d.form()),
        "discriminant_order": d.order(),
        "length": d.length(),
        "stability": st.as_ref().map(io::stability_to_json),
    }))
}

fn run(cli: &Cli) -> nlcover::Result<Value> {
    let budget = cli.budget.map_or_else(Budget::default, Budget::new);
    match &cli.command {
        Command::Info(a) => info(&io::load_lattice(&a.lattice)?),
        Command::GlueK3 {
            lattice,
            complement,
            glue,
        } => {
            let l = io::load_lattice(&lattice.lattice)?;
            let t = io::load_lattice(complement)?;
            let gamma = match glue {
                Some(path) => {
                    let path = path.display().to_string();
                    io::glue_from_json(&io::load_json(&path)?, &path)?
                }
                None => {
                    let (al, at) = (discriminant_form(&l)?, discriminant_form(&t)?);
                    find_anti_isometry(al.form(), at.form(), &budget)?
                        .ok_or_else(|| Error::Hypothesis("A_L and A_T are not anti-isometric".into()))?
                }
            };
            let g = glue_to_k3(&l, &t, &gamma)?;
            let sig = g.lattice.signature();
            Ok(json!({
                "lattice": io::lattice_to_json(&g.lattice),
                "signature": [sig.n_plus, sig.n_minus],
                "det": io::int_to_json(&g.lattice.det()),
                "l_embedding": io::matrix_to_json(g.l_embedding.basis()),
                "t_embedding": io::matrix_to_json(g.t_embedding.basis()),
                "glue": io::glue_to_json(&gamma),
                "unique_embedding": verdict_json(&check_unique_embedding(&l)?),
            }))
        }
        Command::Aut(a) => {
            let l = io::load_lattice(&a.lattice)?;
            let group = automorphism_group(&l, &budget)?;
            let mut v = io::group_report_to_json(&group_report(&group));
            v["lattice"] = io::lattice_to_json(&l);
            Ok(v)
        }
        Command::Lines { lattice, p } => {
            let s = io::load_lattice(&lattice.lattice)?;
            let formula = line_classes_formula(&s, p.p)?;
            let exhaustive = match line_count(s.rank(), p.p) <= MAX_EXHAUSTIVE_LINES.into() {
                true => Some(line_classes(&s, p.p)?),
                false => None,
            };
            let (_, bound) = index_bound(&s, p.p)?;
            Ok(json!({
                "p": p.p,
                "line_counts": io::line_counts_to_json(&formula),
                "exhaustive": exhaustive.as_ref().map(io::line_counts_to_json),
                "agree": exhaustive.as_ref().map(|e| *e == formula),
                "bound": io::int_to_json(&bound),
            }))
        }
        Command::Sublattices { lattice, p } => {
            let s = io::load_lattice(&lattice.lattice)?;
            let coprime = (s.det() % p.p as i64) != 0.into();
            let subs = enumerate_index_p_sublattices(&s, p.p)?;
            let mut out = Vec::with_capacity(subs.len());
            for (id, sub) in subs.iter().enumerate() {
                let mut v = io::sublattice_to_json(sub);
                v["id"] = json!(id);
                if coprime && p.p != 2 {
                    let split = sublattice_disc_split(&s, sub, &budget)?;
                    v["p_part"] = json!(split.tag.label(p.p));
                    v["length"] = json!(split.length);
                    v["split_certified"] = json!(split.certified);
                }
                out.push(v);
            }
            Ok(json!({"p": p.p, "count": out.len(), "sublattices": out}))
        }
        Command::Jordan {
            lattice,
            p,
            precision,
        } => {
            let l = io::load_lattice(&lattice.lattice)?;
            Ok(io::jordan_to_json(&jordan_decompose(&l, p.p, *precision)?))
        }
        Command::PlanCover { lattice, n, target } => {
            let s = io::load_lattice(&lattice.lattice)?;
            let target = match target {
                TargetArg::S => Target::SQuotient,
                TargetArg::M => Target::MQuotient,
            };
            Ok(io::certificate_to_json(&plan_covering(&s, *n, target, &budget)?))
        }
        Command::Triangle { embedding, p, n } => {
            let path = embedding.display().to_string();
            let e = io::embedding_from_json(&io::load_json(&path)?, &path)?;
            let p = match (p, n) {
                (Some(p), _) => *p,
                (None, Some(n)) => choose_p(e.ambient(), *n)?.p,
                (None, None) => return Err(Error::Invalid("triangle needs --p or --N".into())),
            };
            Ok(io::triangle_to_json(&build_triangle(&e, p, &budget)?))
        }
        Command::BrauerMap { lattice, p } => {
            let s = io::load_lattice(&lattice.lattice)?;
            let pairs = sublattice_brauer_bijection(&s, p.p)?;
            Ok(json!({
                "p": p.p,
                "count": pairs.len(),
                "pairs": pairs.iter().map(|(sub, line)| json!({
                    "alpha": line.alpha,
                    "basis": io::matrix_to_json(&sub.basis),
                })).collect::<Vec<_>>(),
            }))
        }
    }
}

fn scalar(v: &Value) -> String {
    match v {
        Value::String(s) => s.clone(),
        Value::Null => "-".into(),
        other => other.to_string(),
    }
}

fn is_table(v: &Value) -> bool {
    matches!(v, Value::Array(a) if !a.is_empty() && a.iter().all(Value::is_object))
}

fn render_table(rows: &[Value], out: &mut String) {
    let mut cols: Vec<String> = Vec::new();
    for r in rows {
        for (k, v) in r.as_object().unwrap() {
            if !v.is_object() && !cols.contains(k) {
                cols.push(k.clone());
            }
        }
    }
    let cells: Vec<Vec<String>> = rows
        .iter()
        .map(|r| cols.iter().map(|c| r.get(c).map_or_else(String::new, scalar)).collect())
        .collect();
    let widths: Vec<usize> = cols
        .iter()
        .enumerate()
        .map(|(i, c)| cells.iter().map(|r| r[i].len()).chain([c.len()]).max().unwrap())
        .collect();
    let line = |vals: &[String]| -> String {
        let v: Vec<String> = vals.iter().zip(&widths).map(|(s, w)| format!("{s:<w$}")).collect();
        format!("  {}\n", v.join("  ").trim_end())
    };
    out.push_str(&line(&cols));
    out.push_str(&line(&widths.iter().map(|w| "-".repeat(*w)).collect::<Vec<_>>()));
    for r in &cells {
        out.push_str(&line(r));
    }
}

enum Item<'a> {
    Pair(String, String),
    Table(String, &'a [Value]),
}

fn flatten<'a>(v: &'a Value, prefix: &str, out: &mut Vec<Item<'a>>) {
    let Some(obj) = v.as_object() else {
        out.push(Item::Pair(prefix.trim_end_matches('.').into(), scalar(v)));
        return;
    };
    for (k, x) in obj {
        let key = format!("{prefix}{k}");
        if x.is_object() {
            flatten(x, &format!("{key}."), out);
        } else if is_table(x) {
            out.push(Item::Table(key, x.as_array().unwrap()));
        } else {
            out.push(Item::Pair(key, scalar(x)));
        }
    }
}

fn render(v: &Value) -> String {
    let mut items = Vec::new();
    flatten(v, "", &mut items);
    let width = items
        .iter()
        .filter_map(|i| match i {
            Item::Pair(k, _) => Some(k.len()),
            Item::Table(..) => None,
        })
        .max()
        .unwrap_or(0);
    let mut out = String::new();
    for item in items {
        match item {
            Item::Pair(k, v) => out.push_str(&format!("{k:<width$}  {v}\n")),
            Item::Table(k, rows) => {
                out.push_str(&format!("{k}:\n"));
                render_table(rows, &mut out);
            }
        }
    }
    out
}

fn main() -> ExitCode {
    let cli = match Cli::try_parse() {
        Ok(c) => c,
        Err(e) => {
            let code = if e.use_stderr() { 1 } else { 0 };
            let _ = e.print();
            return ExitCode::from(code);
        }
    };
    let report = match run(&cli) {
        Ok(v) => v,
        Err(e) => {
            let code = if e.is_refusal() { 2 } else { 1 };
            let kind = if e.is_refusal() { "refusal" } else { "error" };
            eprintln!("{}", json!({ kind: e.to_string() }));
            return ExitCode::from(code);
        }
    };
    let text = if cli.human {
        render(&report)
    } else {
        serde_json::to_string_pretty(&report).expect("reports serialize") + "\n"
    };
    match &cli.out {
        Some(path) => {
            if let Err(e) = std::fs::write(path, text) {
                eprintln!("{}", json!({"error": format!("{}: {e}", path.display())}));
                return ExitCode::from(1);
            }
        }
        None => {
            use std::io::Write;
            // a closed pipe (e.g. `| head`) is not an error
            let _ = std::io::stdout().lock().write_all(text.as_bytes());
        }
    }
    ExitCode::SUCCESS
}
