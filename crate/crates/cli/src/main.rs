//! `weylpoly`: batch front end for orbit functions, grids, polynomial families and branching.

use std::fs::File;
use std::io::{self, Write};
use std::path::PathBuf;
use std::process::ExitCode;

use anyhow::{anyhow, bail, Context, Result};
use clap::{Parser, Subcommand, ValueEnum};
use num_complex::Complex64;
use num_rational::Rational64;
use serde_json::{json, Value};

use weylpoly::branching::{find_rule, reduce_polynomial, render_decomposition, rule_json, rules_catalog};
use weylpoly::family::{
    c_polynomial, coefficient_table, default_table_labels, domain_vertices, map_point_to_u,
    s_polynomial,
};
use weylpoly::grid::{admissible_weights, gram_c, gram_s, grid_rows, Family, GridSpec};
use weylpoly::group::{group_data, weyl_orbit};
use weylpoly::orbit::{eval_c, eval_character, eval_s, EvalPoint};
use weylpoly::poly::{var_names, PolyJson};
use weylpoly::{Execution, GroupId, LevelOrder, MultiPoly, Weight};

#[derive(Parser)]
#[command(name = "weylpoly", version, about = "Weyl orbit functions and their polynomials")]
struct Cli {
    /// Output format; each command has its own default.
    #[arg(long, global = true, value_enum)]
    format: Option<Format>,
    /// Write output here instead of stdout.
    #[arg(long, global = true)]
    out: Option<PathBuf>,
    /// Relative tolerance for `gram` assertions.
    #[arg(long, global = true, default_value_t = 1e-8)]
    tolerance: f64,
    /// Largest label sum for `table`, largest level for `poly` and `branch`.
    #[arg(long, global = true)]
    max_degree: Option<i64>,
    #[command(subcommand)]
    cmd: Cmd,
}

#[derive(Clone, Copy, PartialEq, Eq, ValueEnum)]
enum Format {
    Text,
    Json,
    Csv,
}

#[derive(Clone, Copy, PartialEq, Eq, ValueEnum)]
enum Fam {
    #[value(name = "C", alias = "c")]
    C,
    #[value(name = "S", alias = "s")]
    S,
    /// Irreducible character (eval only).
    #[value(name = "chi")]
    Chi,
}

#[derive(Subcommand)]
enum Cmd {
    /// Weyl orbit of a dominant weight.
    Orbit { group: GroupId, lambda: Weight },
    /// Value of C_λ, S_λ or χ_λ at a point given in α̌-coordinates (`1/3,1/3` or decimals).
    Eval { group: GroupId, family: Fam, lambda: Weight, point: String },
    /// The grid F_M with ε and u-images.
    Grid {
        group: GroupId,
        m: u32,
        /// Interior points F~_M only.
        #[arg(long)]
        interior: bool,
    },
    /// Gram matrix of C- or S-functions on F_M; `all` or labels separated by `;`.
    Gram { group: GroupId, m: u32, family: Fam, labels: String },
    /// C- or S-polynomial of a label.
    Poly { group: GroupId, family: Fam, lambda: Weight },
    /// Coefficient table of C-polynomials, split by congruence class.
    Table { group: GroupId },
    /// Reduction of a polynomial along a rule such as `A2:A1` or `B3:A1xA1xA1`.
    Branch { rule: String, family: Fam, lambda: Weight },
    /// Vertices of the image of the fundamental region.
    Domain { group: GroupId },
    /// The branching rule catalog.
    Rules,
}

fn main() -> ExitCode {
    let cli = match Cli::try_parse() {
        Ok(c) => c,
        Err(e) if !e.use_stderr() => {
            let _ = e.print();
            return ExitCode::SUCCESS;
        }
        Err(e) => {
            let msg = e.render().to_string();
            let first = msg.lines().next().unwrap_or("").trim_start_matches("error: ");
            eprintln!("{}", json!({ "error": first }));
            return ExitCode::from(2);
        }
    };
    match run(&cli) {
        Ok(true) => ExitCode::SUCCESS,
        Ok(false) => ExitCode::from(1),
        Err(e) => {
            eprintln!("{}", json!({ "error": format!("{e:#}") }));
            ExitCode::from(2)
        }
    }
}

/// Rounds to 15 significant digits; magnitudes below `1e-12` become `0`.
fn round15(v: f64) -> f64 {
    if v.abs() < 1e-12 {
        return 0.0;
    }
    format!("{v:.14e}").parse().unwrap_or(v)
}

fn num(v: f64) -> String {
    round15(v).to_string()
}

fn jnum(v: f64) -> Value {
    json!(round15(v))
}

fn complex_text(z: Complex64) -> String {
    let (re, im) = (num(z.re), num(z.im.abs()));
    if im == "0" {
        re
    } else if z.im < 0.0 {
        format!("{re} - {im}i")
    } else {
        format!("{re} + {im}i")
    }
}

fn csv_string(header: &[String], rows: &[Vec<String>]) -> Result<String> {
    let mut w = csv::Writer::from_writer(Vec::new());
    w.write_record(header)?;
    for r in rows {
        w.write_record(r)?;
    }
    Ok(String::from_utf8(w.into_inner().map_err(|e| anyhow!("{e}"))?)?)
}

fn check_level(cli: &Cli, g: &GroupId, lambda: &Weight) -> Result<()> {
    if let Some(max) = cli.max_degree {
        let level = group_data(g).level(lambda);
        if level > max {
            bail!("label {lambda} has level {level}, above --max-degree {max}");
        }
    }
    Ok(())
}

fn check_rank(g: &GroupId, lambda: &Weight) -> Result<()> {
    if lambda.rank() != g.rank() {
        bail!("label {lambda} has {} entries, {g} has rank {}", lambda.rank(), g.rank());
    }
    Ok(())
}

fn family_poly(g: &GroupId, fam: Fam, lambda: &Weight) -> Result<MultiPoly> {
    Ok(match fam {
        Fam::C => (*c_polynomial(g, lambda)?).clone(),
        Fam::S => (*s_polynomial(g, lambda)?).clone(),
        Fam::Chi => bail!("family must be C or S"),
    })
}

fn fam_name(fam: Fam) -> &'static str {
    match fam {
        Fam::C => "C",
        Fam::S => "S",
        Fam::Chi => "chi",
    }
}

fn parse_point(s: &str) -> Result<EvalPoint> {
    let parts: Vec<&str> = s.split(',').map(str::trim).collect();
    if parts.iter().all(|p| !p.contains('.') && !p.contains('e')) {
        let exact = parts
            .iter()
            .map(|p| p.parse::<Rational64>().map_err(|e| anyhow!("bad coordinate `{p}`: {e}")))
            .collect::<Result<Vec<_>>>()?;
        return Ok(EvalPoint::Exact(exact));
    }
    let float = parts
        .iter()
        .map(|p| p.parse::<f64>().map_err(|e| anyhow!("bad coordinate `{p}`: {e}")))
        .collect::<Result<Vec<_>>>()?;
    Ok(EvalPoint::Float(float))
}

fn run(cli: &Cli) -> Result<bool> {
    let mut ok = true;
    let text = match &cli.cmd {
        Cmd::Orbit { group, lambda } => orbit(cli, group, lambda)?,
        Cmd::Eval { group, family, lambda, point } => eval(cli, group, *family, lambda, point)?,
        Cmd::Grid { group, m, interior } => grid(cli, group, *m, *interior)?,
        Cmd::Gram { group, m, family, labels } => {
            let (t, pass) = gram(cli, group, *m, *family, labels)?;
            ok = pass;
            t
        }
        Cmd::Poly { group, family, lambda } => poly(cli, group, *family, lambda)?,
        Cmd::Table { group } => table(cli, group)?,
        Cmd::Branch { rule, family, lambda } => branch(cli, rule, *family, lambda)?,
        Cmd::Domain { group } => domain(cli, group)?,
        Cmd::Rules => {
            let all = rules_catalog().iter().map(rule_json).collect::<weylpoly::Result<Vec<_>>>()?;
            serde_json::to_string_pretty(&all)? + "\n"
        }
    };
    match &cli.out {
        Some(path) => File::create(path)
            .and_then(|mut f| f.write_all(text.as_bytes()))
            .with_context(|| format!("writing {}", path.display()))?,
        None => io::stdout().write_all(text.as_bytes())?,
    }
    Ok(ok)
}

fn orbit(cli: &Cli, g: &GroupId, lambda: &Weight) -> Result<String> {
    check_rank(g, lambda)?;
    if !lambda.is_dominant() {
        bail!("weight {lambda} is not dominant");
    }
    let pts = weyl_orbit(g, lambda)?.sorted_points();
    Ok(match cli.format.unwrap_or(Format::Text) {
        Format::Json => {
            let points: Vec<Value> = pts
                .iter()
                .map(|p| json!({ "weight": p.weight.0, "depth": p.depth, "sign": p.sign() }))
                .collect();
            let doc = json!({ "group": g.to_string(), "seed": lambda.0, "size": pts.len(), "points": points });
            serde_json::to_string_pretty(&doc)? + "\n"
        }
        Format::Csv => {
            let mut header: Vec<String> = (1..=g.rank()).map(|j| format!("w{j}")).collect();
            header.extend(["depth".into(), "sign".into()]);
            let rows: Vec<Vec<String>> = pts
                .iter()
                .map(|p| {
                    let mut r: Vec<String> = p.weight.0.iter().map(|v| v.to_string()).collect();
                    r.push(p.depth.to_string());
                    r.push(p.sign().to_string());
                    r
                })
                .collect();
            csv_string(&header, &rows)?
        }
        Format::Text => {
            let mut s = format!("orbit of {lambda} in {g}: {} points\n", pts.len());
            for p in &pts {
                s.push_str(&format!("{} {}\n", p.weight, if p.sign() > 0 { "+" } else { "-" }));
            }
            s
        }
    })
}

fn eval(cli: &Cli, g: &GroupId, fam: Fam, lambda: &Weight, point: &str) -> Result<String> {
    check_rank(g, lambda)?;
    let x = parse_point(point)?;
    let z = match fam {
        Fam::C => eval_c(g, lambda, &x)?,
        Fam::S => eval_s(g, lambda, &x)?,
        Fam::Chi => eval_character(g, lambda, &x)?,
    };
    Ok(match cli.format.unwrap_or(Format::Text) {
        Format::Json => {
            let doc = json!({
                "group": g.to_string(), "family": fam_name(fam), "label": lambda.0,
                "x": x.to_f64().into_iter().map(jnum).collect::<Vec<_>>(),
                "value": [jnum(z.re), jnum(z.im)],
            });
            serde_json::to_string_pretty(&doc)? + "\n"
        }
        Format::Csv => csv_string(&["re".into(), "im".into()], &[vec![num(z.re), num(z.im)]])?,
        Format::Text => complex_text(z) + "\n",
    })
}

fn grid(cli: &Cli, g: &GroupId, m: u32, interior: bool) -> Result<String> {
    let n = g.rank();
    let rows = if m == 0 {
        // F_0 is the origin alone.
        let x = EvalPoint::Exact(vec![Rational64::from_integer(0); n]);
        vec![(vec![0i64; n], 1u64, x.to_f64(), map_point_to_u(g, &x)?)]
    } else {
        grid_rows(&GridSpec::new(g.clone(), m), interior)?
            .into_iter()
            .map(|r| (r.s, r.epsilon, r.x, r.u))
            .collect()
    };
    Ok(match cli.format.unwrap_or(Format::Csv) {
        Format::Json => {
            let out: Vec<Value> = rows
                .iter()
                .map(|(s, e, x, u)| {
                    json!({
                        "s": s, "epsilon": e,
                        "x": x.iter().map(|v| jnum(*v)).collect::<Vec<_>>(),
                        "u": u.iter().map(|z| [jnum(z.re), jnum(z.im)]).collect::<Vec<_>>(),
                    })
                })
                .collect();
            let doc = json!({ "group": g.to_string(), "m": m, "interior": interior, "points": out });
            serde_json::to_string_pretty(&doc)? + "\n"
        }
        Format::Csv | Format::Text => {
            let mut header: Vec<String> = (1..=n).map(|j| format!("s{j}")).collect();
            header.push("epsilon".into());
            header.extend((1..=n).map(|j| format!("x{j}")));
            for j in 1..=n {
                header.push(format!("u{j}_re"));
                header.push(format!("u{j}_im"));
            }
            let body: Vec<Vec<String>> = rows
                .iter()
                .map(|(s, e, x, u)| {
                    let mut r: Vec<String> = s.iter().map(|v| v.to_string()).collect();
                    r.push(e.to_string());
                    r.extend(x.iter().map(|v| num(*v)));
                    for z in u {
                        r.push(num(z.re));
                        r.push(num(z.im));
                    }
                    r
                })
                .collect();
            csv_string(&header, &body)?
        }
    })
}

fn gram(cli: &Cli, g: &GroupId, m: u32, fam: Fam, spec: &str) -> Result<(String, bool)> {
    let family = match fam {
        Fam::C => Family::C,
        Fam::S => Family::S,
        Fam::Chi => bail!("family must be C or S"),
    };
    let labels: Vec<Weight> = if spec.trim() == "all" {
        admissible_weights(g, m, family)
    } else {
        spec.split(';')
            .map(|s| {
                let w: Weight = s.parse()?;
                check_rank(g, &w)?;
                Ok(w)
            })
            .collect::<Result<_>>()?
    };
    let rep = match family {
        Family::C => gram_c(g, m, &labels, Execution::default())?,
        Family::S => gram_s(g, m, &labels, Execution::default())?,
    };
    let pass = rep.inadmissible.is_empty() && rep.passes(cli.tolerance, cli.tolerance);
    let text = match cli.format.unwrap_or(Format::Json) {
        Format::Csv => {
            let header: Vec<String> = ["row", "col", "re", "im"].map(String::from).to_vec();
            let mut body = Vec::new();
            for (i, row) in rep.matrix.iter().enumerate() {
                for (j, z) in row.iter().enumerate() {
                    body.push(vec![
                        rep.labels[i].to_string(),
                        rep.labels[j].to_string(),
                        num(z.re),
                        num(z.im),
                    ]);
                }
            }
            csv_string(&header, &body)?
        }
        _ => {
            let mut doc = serde_json::to_value(&rep)?;
            doc["matrix"] = json!(rep
                .matrix
                .iter()
                .map(|row| row.iter().map(|z| [jnum(z.re), jnum(z.im)]).collect::<Vec<_>>())
                .collect::<Vec<_>>());
            doc["max_offdiag"] = jnum(rep.max_offdiag);
            doc["max_offdiag_relative"] = jnum(rep.max_offdiag_relative());
            doc["max_diag_rel_error"] = jnum(rep.max_diag_rel_error);
            doc["tolerance"] = json!(cli.tolerance);
            doc["pass"] = json!(pass);
            serde_json::to_string_pretty(&doc)? + "\n"
        }
    };
    Ok((text, pass))
}

fn poly_json(g: &GroupId, fam: Fam, lambda: &Weight, p: &MultiPoly) -> PolyJson {
    PolyJson {
        group: g.to_string(),
        family: fam_name(fam).into(),
        label: lambda.0.clone(),
        terms: p.to_json_terms(),
    }
}

fn poly(cli: &Cli, g: &GroupId, fam: Fam, lambda: &Weight) -> Result<String> {
    check_rank(g, lambda)?;
    check_level(cli, g, lambda)?;
    let p = family_poly(g, fam, lambda)?;
    let names = var_names("u", g.rank());
    Ok(match cli.format.unwrap_or(Format::Text) {
        Format::Json => serde_json::to_string_pretty(&poly_json(g, fam, lambda, &p))? + "\n",
        Format::Csv => {
            let mut header: Vec<String> = names.iter().map(|n| format!("{n}_exp")).collect();
            header.extend(["num".into(), "den".into()]);
            let body: Vec<Vec<String>> = p
                .to_json_terms()
                .into_iter()
                .map(|t| {
                    let mut r: Vec<String> = t.exps.iter().map(|e| e.to_string()).collect();
                    r.extend([t.num, t.den]);
                    r
                })
                .collect();
            csv_string(&header, &body)?
        }
        Format::Text => p.render(&LevelOrder::for_group(g), &names) + "\n",
    })
}

fn table(cli: &Cli, g: &GroupId) -> Result<String> {
    let labels = default_table_labels(g, cli.max_degree.unwrap_or(3));
    let blocks = coefficient_table(g, &labels)?;
    let names = var_names("u", g.rank());
    let cell = |c: &Option<i64>| c.map(|v| v.to_string()).unwrap_or_default();
    Ok(match cli.format.unwrap_or(Format::Text) {
        Format::Json => {
            let doc: Vec<Value> = blocks
                .iter()
                .map(|b| {
                    json!({
                        "class": b.class,
                        "columns": b.columns.iter().map(|m| m.render(&names)).collect::<Vec<_>>(),
                        "rows": b.rows.iter().map(|r| json!({ "label": r.label.0, "cells": r.cells })).collect::<Vec<_>>(),
                    })
                })
                .collect();
            serde_json::to_string_pretty(&json!({ "group": g.to_string(), "blocks": doc }))? + "\n"
        }
        Format::Csv => {
            let mut out = String::new();
            for b in &blocks {
                let mut header = vec!["class".to_string(), "label".to_string()];
                header.extend(b.columns.iter().map(|m| m.render(&names)));
                let body: Vec<Vec<String>> = b
                    .rows
                    .iter()
                    .map(|r| {
                        let mut row = vec![b.class.to_string(), r.label.to_string()];
                        row.extend(r.cells.iter().map(cell));
                        row
                    })
                    .collect();
                out.push_str(&csv_string(&header, &body)?);
            }
            out
        }
        Format::Text => {
            let mut out = String::new();
            for b in &blocks {
                out.push_str(&format!("#{}\n", b.class));
                let cols: Vec<String> = b.columns.iter().map(|m| m.render(&names)).collect();
                let width = cols.iter().map(String::len).max().unwrap_or(1).max(4);
                let lab_w = b.rows.iter().map(|r| r.label.to_string().len()).max().unwrap_or(1);
                out.push_str(&format!("{:lab_w$}", ""));
                for c in &cols {
                    out.push_str(&format!(" {c:>width$}"));
                }
                out.push('\n');
                for r in &b.rows {
                    out.push_str(&format!("{:lab_w$}", r.label.to_string()));
                    for c in &r.cells {
                        out.push_str(&format!(" {:>width$}", cell(c)));
                    }
                    out.push('\n');
                }
            }
            out
        }
    })
}

fn branch(cli: &Cli, rule: &str, fam: Fam, lambda: &Weight) -> Result<String> {
    let rule = find_rule(rule)?;
    check_rank(&rule.parent, lambda)?;
    check_level(cli, &rule.parent, lambda)?;
    let p = family_poly(&rule.parent, fam, lambda)?;
    let (image, dec) = reduce_polynomial(rule, &p)?;
    let order = LevelOrder::for_group(&rule.child);
    let names = rule.child_names();
    let rendered = render_decomposition(&rule.child, &dec);
    Ok(match cli.format.unwrap_or(Format::Text) {
        Format::Json => {
            let terms: Vec<Value> = dec
                .terms
                .iter()
                .map(|(w, c)| json!({ "label": w.0, "num": c.numer().to_string(), "den": c.denom().to_string() }))
                .collect();
            let doc = json!({
                "rule": rule.name(),
                "family": fam_name(fam),
                "label": lambda.0,
                "image": image.render(&order, &names),
                "image_terms": image.to_json_terms(),
                "decomposition": rendered,
                "terms": terms,
                "exact": dec.is_exact(),
            });
            serde_json::to_string_pretty(&doc)? + "\n"
        }
        Format::Csv => {
            let mut header: Vec<String> = (1..=rule.child.rank()).map(|j| format!("d{j}")).collect();
            header.extend(["num".into(), "den".into()]);
            let body: Vec<Vec<String>> = dec
                .terms
                .iter()
                .map(|(w, c)| {
                    let mut r: Vec<String> = w.0.iter().map(|v| v.to_string()).collect();
                    r.extend([c.numer().to_string(), c.denom().to_string()]);
                    r
                })
                .collect();
            csv_string(&header, &body)?
        }
        Format::Text => format!(
            "{}({}) -> {}\n       = {}\n",
            fam_name(fam),
            lambda.0.iter().map(|v| v.to_string()).collect::<Vec<_>>().join(","),
            image.render(&order, &names),
            rendered
        ),
    })
}

fn domain(cli: &Cli, g: &GroupId) -> Result<String> {
    let v = domain_vertices(g)?;
    let n = g.rank();
    Ok(match cli.format.unwrap_or(Format::Text) {
        Format::Json => {
            let doc = json!({
                "group": g.to_string(),
                "vertices": v.preimages.iter().zip(&v.coordinates).map(|(p, c)| json!({
                    "omega_check": p,
                    "u": c.iter().map(|x| jnum(*x)).collect::<Vec<_>>(),
                })).collect::<Vec<_>>(),
            });
            serde_json::to_string_pretty(&doc)? + "\n"
        }
        Format::Csv => {
            let mut header: Vec<String> = (1..=n).map(|j| format!("t{j}")).collect();
            header.extend((1..=v.coordinates[0].len()).map(|j| format!("p{j}")));
            let body: Vec<Vec<String>> = v
                .preimages
                .iter()
                .zip(&v.coordinates)
                .map(|(p, c)| p.iter().cloned().chain(c.iter().map(|x| num(*x))).collect())
                .collect();
            csv_string(&header, &body)?
        }
        Format::Text => {
            let mut s = String::new();
            for (i, (p, c)) in v.preimages.iter().zip(&v.coordinates).enumerate() {
                let c: Vec<String> = c.iter().map(|x| num(*x)).collect();
                s.push_str(&format!("P{i} ({}) -> ({})\n", p.join(","), c.join(", ")));
            }
            s
        }
    })
}
