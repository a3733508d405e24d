//! Free-format MPS reading and writing.
//!
//! Export is deterministic: rows and columns keep model order and numbers use
//! the shortest representation that round-trips, so exporting the same model
//! twice yields identical bytes. Model metadata travels as `* meta key=value`
//! comment lines ahead of `NAME`.

use std::collections::HashMap;
use std::fmt::Write as _;

use thiserror::Error;

use crate::model::{LinExpr, MilpModel, ModelError, Sense, VarKind};

#[derive(Debug, Error)]
pub enum MpsError {
    #[error("line {line}: {msg}")]
    Parse { line: usize, msg: String },
    #[error("line {line}: unknown row `{name}`")]
    UnknownRow { line: usize, name: String },
    #[error("line {line}: unknown column `{name}`")]
    UnknownColumn { line: usize, name: String },
    #[error("COLUMNS section is missing or empty")]
    EmptyColumns,
    #[error("maximization models are not supported")]
    Maximize,
    #[error("name `{0}` cannot be written to MPS")]
    InvalidName(String),
    #[error("non-finite value in {0}")]
    NonFinite(String),
    #[error(transparent)]
    Model(#[from] ModelError),
}

const MAX_NAME: usize = 255;

fn check_name(name: &str) -> Result<(), MpsError> {
    if name.is_empty() || name.len() > MAX_NAME || name.chars().any(char::is_whitespace) {
        return Err(MpsError::InvalidName(name.to_string()));
    }
    Ok(())
}

fn num(v: f64) -> String {
    if v == 0.0 {
        return "0".to_string();
    }
    let a = v.abs();
    if (1e-4..1e15).contains(&a) {
        format!("{v}")
    } else {
        format!("{v:e}")
    }
}

fn finite(v: f64, what: impl FnOnce() -> String) -> Result<f64, MpsError> {
    if v.is_finite() {
        Ok(v)
    } else {
        Err(MpsError::NonFinite(what()))
    }
}

pub fn export_mps(model: &MilpModel) -> Result<String, MpsError> {
    let mut out = String::new();
    for (k, v) in &model.metadata {
        if k.contains('=') || k.contains('\n') || v.contains('\n') || k.is_empty() {
            return Err(MpsError::InvalidName(format!("metadata {k}")));
        }
        let _ = writeln!(out, "* meta {k}={v}");
    }
    if model.name.is_empty() {
        out.push_str("NAME\n");
    } else {
        check_name(&model.name)?;
        let _ = writeln!(out, "NAME {}", model.name);
    }

    let mut obj = "OBJ".to_string();
    let mut k = 0;
    while model.constraint_by_name(&obj).is_some() {
        k += 1;
        obj = format!("OBJ_{k}");
    }

    out.push_str("ROWS\n");
    let _ = writeln!(out, " N {obj}");
    for c in model.constraints() {
        check_name(&c.name)?;
        let tag = match c.sense {
            Sense::Le => 'L',
            Sense::Ge => 'G',
            Sense::Eq => 'E',
        };
        let _ = writeln!(out, " {tag} {}", c.name);
    }

    let n = model.num_vars();
    let mut cols: Vec<Vec<(usize, f64)>> = vec![Vec::new(); n];
    for (i, c) in model.constraints().iter().enumerate() {
        for &(v, a) in &c.expr.terms {
            cols[v.0].push((i, a));
        }
    }
    let mut obj_coef = vec![0.0; n];
    for &(v, a) in &model.objective().terms {
        obj_coef[v.0] = a;
    }

    out.push_str("COLUMNS\n");
    for (j, v) in model.vars().iter().enumerate() {
        check_name(&v.name)?;
        let c = finite(obj_coef[j], || format!("objective coefficient of {}", v.name))?;
        if c != 0.0 || cols[j].is_empty() {
            let _ = writeln!(out, "    {} {obj} {}", v.name, num(c));
        }
        for &(i, a) in &cols[j] {
            let _ = writeln!(out, "    {} {} {}", v.name, model.constraints()[i].name, num(a));
        }
    }

    out.push_str("RHS\n");
    let offset = model.objective().constant;
    if offset != 0.0 {
        finite(offset, || "objective offset".into())?;
        let _ = writeln!(out, "    RHS {obj} {}", num(-offset));
    }
    for c in model.constraints() {
        let r = finite(c.rhs, || format!("rhs of {}", c.name))?;
        if r != 0.0 {
            let _ = writeln!(out, "    RHS {} {}", c.name, num(r));
        }
    }

    let ranged: Vec<_> = model
        .constraints()
        .iter()
        .filter_map(|c| c.range.map(|r| (c, r)))
        .collect();
    if !ranged.is_empty() {
        out.push_str("RANGES\n");
        for (c, r) in ranged {
            finite(r, || format!("range of {}", c.name))?;
            let _ = writeln!(out, "    RNG {} {}", c.name, num(r));
        }
    }

    let mut bounds = String::new();
    for v in model.vars() {
        let name = &v.name;
        match v.kind {
            VarKind::Binary => {
                let _ = writeln!(bounds, " BV BND {name}");
                if v.lower != 0.0 {
                    let _ = writeln!(bounds, " LO BND {name} {}", num(v.lower));
                }
                if v.upper != 1.0 {
                    let _ = writeln!(bounds, " UP BND {name} {}", num(v.upper));
                }
            }
            VarKind::Continuous => {
                let (lo, hi) = (v.lower, v.upper);
                if lo == hi {
                    let _ = writeln!(bounds, " FX BND {name} {}", num(lo));
                } else if lo == f64::NEG_INFINITY && hi == f64::INFINITY {
                    let _ = writeln!(bounds, " FR BND {name}");
                } else {
                    if lo == f64::NEG_INFINITY {
                        let _ = writeln!(bounds, " MI BND {name}");
                    } else if lo != 0.0 {
                        finite(lo, || format!("lower bound of {name}"))?;
                        let _ = writeln!(bounds, " LO BND {name} {}", num(lo));
                    }
                    if hi != f64::INFINITY {
                        finite(hi, || format!("upper bound of {name}"))?;
                        let _ = writeln!(bounds, " UP BND {name} {}", num(hi));
                    }
                }
            }
        }
    }
    if !bounds.is_empty() {
        out.push_str("BOUNDS\n");
        out.push_str(&bounds);
    }
    out.push_str("ENDATA\n");
    Ok(out)
}

#[derive(Clone, Copy, PartialEq, Eq)]
enum Section {
    None,
    Rows,
    Columns,
    Rhs,
    Ranges,
    Bounds,
    ObjSense,
    End,
}

struct Col {
    name: String,
    kind: VarKind,
    lower: f64,
    upper: f64,
    explicit_lower: bool,
}

struct Row {
    name: String,
    sense: Sense,
    rhs: f64,
    range: Option<f64>,
    terms: Vec<(usize, f64)>,
}

fn parse_num(tok: &str, line: usize) -> Result<f64, MpsError> {
    let v: f64 = tok.parse().map_err(|_| MpsError::Parse {
        line,
        msg: format!("bad number `{tok}`"),
    })?;
    Ok(v)
}

enum RowRef {
    Objective,
    FreeRow,
    Row(usize),
}

pub fn import_mps(text: &str) -> Result<MilpModel, MpsError> {
    let mut name = String::new();
    let mut metadata = Vec::new();
    let mut section = Section::None;
    let mut obj_name: Option<String> = None;
    let mut free_rows: Vec<String> = Vec::new();
    let mut rows: Vec<Row> = Vec::new();
    let mut row_idx: HashMap<String, usize> = HashMap::new();
    let mut cols: Vec<Col> = Vec::new();
    let mut col_idx: HashMap<String, usize> = HashMap::new();
    let mut obj_terms: Vec<(usize, f64)> = Vec::new();
    let mut offset = 0.0;
    let mut integer_block = false;

    for (ln0, raw) in text.lines().enumerate() {
        let line = ln0 + 1;
        if let Some(rest) = raw.strip_prefix('*') {
            if let Some(kv) = rest.trim_start().strip_prefix("meta ") {
                if let Some((k, v)) = kv.split_once('=') {
                    metadata.push((k.to_string(), v.to_string()));
                }
            }
            continue;
        }
        if raw.trim().is_empty() {
            continue;
        }
        let toks: Vec<&str> = raw.split_whitespace().collect();
        let header = !raw.starts_with(char::is_whitespace);
        if header {
            section = match toks[0] {
                "NAME" => {
                    name = toks.get(1).map(|s| s.to_string()).unwrap_or_default();
                    Section::None
                }
                "ROWS" => Section::Rows,
                "COLUMNS" => Section::Columns,
                "RHS" => Section::Rhs,
                "RANGES" => Section::Ranges,
                "BOUNDS" => Section::Bounds,
                "OBJSENSE" => {
                    if let Some(&s) = toks.get(1) {
                        if s == "MAX" || s == "MAXIMIZE" {
                            return Err(MpsError::Maximize);
                        }
                    }
                    Section::ObjSense
                }
                "ENDATA" => Section::End,
                other => {
                    return Err(MpsError::Parse {
                        line,
                        msg: format!("unknown section `{other}`"),
                    })
                }
            };
            if section == Section::End {
                break;
            }
            continue;
        }

        let resolve = |n: &str| -> Result<RowRef, MpsError> {
            if obj_name.as_deref() == Some(n) {
                Ok(RowRef::Objective)
            } else if free_rows.iter().any(|f| f == n) {
                Ok(RowRef::FreeRow)
            } else if let Some(&i) = row_idx.get(n) {
                Ok(RowRef::Row(i))
            } else {
                Err(MpsError::UnknownRow {
                    line,
                    name: n.to_string(),
                })
            }
        };

        match section {
            Section::ObjSense => match toks[0] {
                "MAX" | "MAXIMIZE" => return Err(MpsError::Maximize),
                "MIN" | "MINIMIZE" => {}
                other => {
                    return Err(MpsError::Parse {
                        line,
                        msg: format!("bad OBJSENSE `{other}`"),
                    })
                }
            },
            Section::Rows => {
                if toks.len() != 2 {
                    return Err(MpsError::Parse {
                        line,
                        msg: "expected `<type> <name>`".into(),
                    });
                }
                let n = toks[1].to_string();
                let sense = match toks[0] {
                    "N" => {
                        if obj_name.is_none() {
                            obj_name = Some(n);
                        } else {
                            free_rows.push(n);
                        }
                        continue;
                    }
                    "L" => Sense::Le,
                    "G" => Sense::Ge,
                    "E" => Sense::Eq,
                    t => {
                        return Err(MpsError::Parse {
                            line,
                            msg: format!("bad row type `{t}`"),
                        })
                    }
                };
                if row_idx.insert(n.clone(), rows.len()).is_some() {
                    return Err(MpsError::Parse {
                        line,
                        msg: format!("duplicate row `{n}`"),
                    });
                }
                rows.push(Row {
                    name: n,
                    sense,
                    rhs: 0.0,
                    range: None,
                    terms: Vec::new(),
                });
            }
            Section::Columns => {
                if toks.len() >= 3 && toks[1].trim_matches('\'') == "MARKER" {
                    match toks[2].trim_matches('\'') {
                        "INTORG" => integer_block = true,
                        "INTEND" => integer_block = false,
                        m => {
                            return Err(MpsError::Parse {
                                line,
                                msg: format!("bad marker `{m}`"),
                            })
                        }
                    }
                    continue;
                }
                if toks.len() != 3 && toks.len() != 5 {
                    return Err(MpsError::Parse {
                        line,
                        msg: "expected `<column> <row> <value> [<row> <value>]`".into(),
                    });
                }
                let cname = toks[0];
                let j = match col_idx.get(cname) {
                    Some(&j) => j,
                    None => {
                        let j = cols.len();
                        col_idx.insert(cname.to_string(), j);
                        cols.push(Col {
                            name: cname.to_string(),
                            kind: if integer_block {
                                VarKind::Binary
                            } else {
                                VarKind::Continuous
                            },
                            lower: 0.0,
                            upper: if integer_block { 1.0 } else { f64::INFINITY },
                            explicit_lower: false,
                        });
                        j
                    }
                };
                for pair in toks[1..].chunks(2) {
                    let v = parse_num(pair[1], line)?;
                    match resolve(pair[0])? {
                        RowRef::Objective => obj_terms.push((j, v)),
                        RowRef::FreeRow => {}
                        RowRef::Row(i) => rows[i].terms.push((j, v)),
                    }
                }
            }
            Section::Rhs | Section::Ranges => {
                let body = if toks.len() % 2 == 1 { &toks[1..] } else { &toks[..] };
                if body.is_empty() {
                    return Err(MpsError::Parse {
                        line,
                        msg: "expected `<row> <value>` pairs".into(),
                    });
                }
                for pair in body.chunks(2) {
                    let v = parse_num(pair[1], line)?;
                    match (resolve(pair[0])?, section) {
                        (RowRef::Objective, Section::Rhs) => offset = -v,
                        (RowRef::Row(i), Section::Rhs) => rows[i].rhs = v,
                        (RowRef::Row(i), _) => rows[i].range = Some(v),
                        _ => {}
                    }
                }
            }
            Section::Bounds => {
                let kind = toks[0];
                let needs_value = !matches!(kind, "FR" | "MI" | "PL" | "BV");
                let (cname, value) = match (toks.len(), needs_value) {
                    (4, true) => (toks[2], Some(toks[3])),
                    (3, true) => (toks[1], Some(toks[2])),
                    (3, false) => (toks[2], None),
                    (2, false) => (toks[1], None),
                    (4, false) => (toks[2], None),
                    _ => {
                        return Err(MpsError::Parse {
                            line,
                            msg: "malformed bound".into(),
                        })
                    }
                };
                let &j = col_idx.get(cname).ok_or_else(|| MpsError::UnknownColumn {
                    line,
                    name: cname.to_string(),
                })?;
                let v = value.map(|t| parse_num(t, line)).transpose()?;
                let c = &mut cols[j];
                match kind {
                    "UP" | "UI" => {
                        let v = v.unwrap_or_default();
                        c.upper = v;
                        if v < 0.0 && !c.explicit_lower {
                            c.lower = f64::NEG_INFINITY;
                        }
                        if kind == "UI" {
                            c.kind = VarKind::Binary;
                        }
                    }
                    "LO" | "LI" => {
                        c.lower = v.unwrap_or_default();
                        c.explicit_lower = true;
                        if kind == "LI" {
                            c.kind = VarKind::Binary;
                        }
                    }
                    "FX" => {
                        let v = v.unwrap_or_default();
                        c.lower = v;
                        c.upper = v;
                        c.explicit_lower = true;
                    }
                    "FR" => {
                        c.lower = f64::NEG_INFINITY;
                        c.upper = f64::INFINITY;
                        c.explicit_lower = true;
                    }
                    "MI" => {
                        c.lower = f64::NEG_INFINITY;
                        c.explicit_lower = true;
                    }
                    "PL" => c.upper = f64::INFINITY,
                    "BV" => {
                        c.kind = VarKind::Binary;
                        c.lower = 0.0;
                        c.upper = 1.0;
                        c.explicit_lower = true;
                    }
                    other => {
                        return Err(MpsError::Parse {
                            line,
                            msg: format!("unsupported bound type `{other}`"),
                        })
                    }
                }
            }
            Section::None => {
                return Err(MpsError::Parse {
                    line,
                    msg: "data outside of a section".into(),
                })
            }
            Section::End => unreachable!(),
        }
    }

    if cols.is_empty() {
        return Err(MpsError::EmptyColumns);
    }

    let mut model = MilpModel::new(name);
    for (k, v) in metadata {
        model.metadata.insert(k, v);
    }
    let mut ids = Vec::with_capacity(cols.len());
    for c in &cols {
        ids.push(model.add_var(c.name.clone(), c.kind, c.lower, c.upper)?);
    }
    for r in rows {
        let mut e = LinExpr::new();
        for (j, a) in r.terms {
            e.add_term(ids[j], a);
        }
        model.add_ranged_row(r.name, &e, r.sense, r.rhs, r.range)?;
    }
    let mut obj = LinExpr::constant(offset);
    for (j, a) in obj_terms {
        obj.add_term(ids[j], a);
    }
    model.set_objective(&obj)?;
    Ok(model)
}
