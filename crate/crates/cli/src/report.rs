//! Report construction: every command produces a JSON value with
//! sorted keys (the default map of serde_json is ordered), so machine
//! output is byte-identical across runs for identical inputs.

use serde_json::{json, Map, Value};

use gbds_core::dynamics::{ConditionL, CycleReport, Gbds, Word};
use gbds_core::genalg::{AlgElement, GenTriple};
use gbds_core::groupoid::EffectivenessReport;
use gbds_core::lattice::AtomSet;
use gbds_core::paths::{BoundaryEnum, Edge, Vertex};

pub fn set_to_json(sys: &Gbds, s: &AtomSet) -> Value {
    Value::Array(
        s.iter()
            .map(|a| Value::String(sys.algebra().atom_name(a).to_string()))
            .collect(),
    )
}

pub fn word_to_json(sys: &Gbds, w: &Word) -> Value {
    Value::String(w.display(sys).to_string())
}

pub fn triple_to_json(sys: &Gbds, t: &GenTriple) -> Value {
    Value::String(t.display(sys).to_string())
}

pub fn element_to_json(sys: &Gbds, e: &AlgElement) -> Value {
    Value::String(e.display(sys).to_string())
}

pub fn vertex_to_json(sys: &Gbds, v: Vertex) -> Value {
    match v {
        Vertex::Atom(a) => Value::String(sys.algebra().atom_name(a).to_string()),
        Vertex::Infinity => Value::String("inf".into()),
    }
}

pub fn edge_to_json(sys: &Gbds, e: &Edge) -> Value {
    json!({
        "edge": e.display(sys).to_string(),
        "letter": sys.letter_name(e.letter),
        "domain": vertex_to_json(sys, e.domain()),
        "range": vertex_to_json(sys, e.range(sys)),
    })
}

pub fn condition_l_to_json(sys: &Gbds, v: &ConditionL) -> Value {
    match v {
        ConditionL::Holds { bases_examined } => json!({
            "holds": true,
            "bases_examined": bases_examined,
        }),
        ConditionL::Fails { witness } => json!({
            "holds": false,
            "witness": {
                "word": word_to_json(sys, &witness.word),
                "base": set_to_json(sys, &witness.base),
            },
        }),
    }
}

pub fn cycles_to_json(sys: &Gbds, reports: &[CycleReport]) -> Value {
    Value::Array(
        reports
            .iter()
            .map(|r| {
                json!({
                    "word": word_to_json(sys, &r.word),
                    "max_base": set_to_json(sys, &r.max_base),
                    "no_exit_atoms": set_to_json(sys, &r.no_exit_atoms),
                    "has_no_exit_cycle": !r.no_exit_atoms.is_empty(),
                })
            })
            .collect(),
    )
}

pub fn boundary_to_json(sys: &Gbds, e: &BoundaryEnum) -> Value {
    json!({
        "finite": e.finite.iter().map(|p| p.display(sys).to_string()).collect::<Vec<_>>(),
        "prefixes": e.prefixes.iter().map(|p| p.display(sys).to_string()).collect::<Vec<_>>(),
        "periodic": e.periodic.iter().map(|p| p.display(sys).to_string()).collect::<Vec<_>>(),
    })
}

pub fn effectiveness_to_json(sys: &Gbds, r: &EffectivenessReport) -> Value {
    let mut m = Map::new();
    m.insert(
        "condition_l".into(),
        condition_l_to_json(sys, &r.condition_l),
    );
    m.insert(
        "topologically_free".into(),
        Value::Bool(r.topologically_free),
    );
    if let Some(p) = &r.entrance_free_loop {
        m.insert(
            "entrance_free_loop".into(),
            Value::String(p.display(sys).to_string()),
        );
    }
    m.insert("effective".into(), Value::Bool(r.effective));
    if let Some((w, cyl)) = &r.interior_witness {
        m.insert(
            "interior_witness".into(),
            json!({
                "word": word_to_json(sys, w),
                "cylinder": format!("{}.{}", cyl.word.display(sys), cyl.set.display(sys.algebra())),
            }),
        );
    }
    m.insert("principal_shadow".into(), Value::Bool(r.principal_shadow));
    m.insert("shadow_depth".into(), Value::Number(r.shadow_depth.into()));
    m.insert("consistent".into(), Value::Bool(r.consistent));
    Value::Object(m)
}

/// Render a report either as pretty JSON or as indented text.
pub fn render(value: &Value, as_json: bool) -> String {
    if as_json {
        serde_json::to_string_pretty(value).expect("reports serialize")
    } else {
        let mut out = String::new();
        render_text(value, 0, &mut out);
        out
    }
}

fn render_text(value: &Value, indent: usize, out: &mut String) {
    let pad = "  ".repeat(indent);
    match value {
        Value::Object(m) => {
            for (k, v) in m {
                match v {
                    Value::Object(_) | Value::Array(_) => {
                        out.push_str(&format!("{pad}{k}:\n"));
                        render_text(v, indent + 1, out);
                    }
                    _ => out.push_str(&format!("{pad}{k}: {}\n", scalar_text(v))),
                }
            }
        }
        Value::Array(items) => {
            if items.is_empty() {
                out.push_str(&format!("{pad}(none)\n"));
            }
            for v in items {
                match v {
                    Value::Object(_) | Value::Array(_) => {
                        out.push_str(&format!("{pad}-\n"));
                        render_text(v, indent + 1, out);
                    }
                    _ => out.push_str(&format!("{pad}- {}\n", scalar_text(v))),
                }
            }
        }
        _ => out.push_str(&format!("{pad}{}\n", scalar_text(value))),
    }
}

fn scalar_text(v: &Value) -> String {
    match v {
        Value::String(s) => s.clone(),
        other => other.to_string(),
    }
}
