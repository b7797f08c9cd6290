//! System ingestion: a human-writable TOML document describing the
//! atoms, alphabet, actions, and (optionally) the per-letter ideals.
//!
//! ```toml
//! atoms = ["1", "2"]
//! letters = ["a"]
//!
//! [actions.a]
//! 1 = ["2"]
//!
//! [ideals]
//! a = ["1", "2"]
//! ```
//!
//! Missing atom rows of an action default to the empty image; a
//! missing ideal defaults to the image of the top element under the
//! letter. Rejections name the violated axiom.

use std::collections::BTreeMap;

use serde::{Deserialize, Serialize};

use crate::dynamics::{Action, Gbds};
use crate::error::Error;
use crate::lattice::Algebra;

#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct SystemDoc {
    pub atoms: Vec<String>,
    pub letters: Vec<String>,
    #[serde(default)]
    pub actions: BTreeMap<String, BTreeMap<String, Vec<String>>>,
    #[serde(default, skip_serializing_if = "BTreeMap::is_empty")]
    pub ideals: BTreeMap<String, Vec<String>>,
}

/// The outcome of ingestion: the validated system plus the letters
/// whose ideals were defaulted.
#[derive(Debug)]
pub struct ParsedSystem {
    pub sys: Gbds,
    pub defaulted_ideals: Vec<String>,
}

pub fn parse_system_str(text: &str) -> Result<ParsedSystem, Error> {
    let doc: SystemDoc = toml::from_str(text).map_err(|e| {
        let offset = e.span().map(|s| s.start).unwrap_or(0);
        Error::Parse {
            offset,
            msg: e.message().to_string(),
        }
    })?;
    system_from_doc(&doc)
}

pub fn system_from_doc(doc: &SystemDoc) -> Result<ParsedSystem, Error> {
    let algebra = Algebra::new(doc.atoms.clone())?;
    let atom = |name: &str| {
        algebra
            .atom_by_name(name)
            .ok_or_else(|| Error::Invalid(format!("unknown atom `{name}`")))
    };

    for letter in doc.actions.keys().chain(doc.ideals.keys()) {
        if !doc.letters.contains(letter) {
            return Err(Error::Invalid(format!("unknown letter `{letter}`")));
        }
    }

    let mut actions = Vec::new();
    for letter in &doc.letters {
        let table = doc.actions.get(letter);
        let mut images = vec![algebra.empty(); algebra.atom_count()];
        if let Some(table) = table {
            for (src, targets) in table {
                let s = atom(src)?;
                let mut img = algebra.empty();
                for t in targets {
                    img = img.join(&algebra.singleton(atom(t)?));
                }
                images[s as usize] = img;
            }
        }
        let action = Action::new(&algebra, images).map_err(|e| match e {
            Error::Axiom(msg) => Error::Axiom(format!("action `{letter}`: {msg}")),
            other => other,
        })?;
        actions.push(action);
    }

    let mut ideal_gens = Vec::new();
    let mut defaulted = Vec::new();
    for (i, letter) in doc.letters.iter().enumerate() {
        match doc.ideals.get(letter) {
            Some(atoms) => {
                let mut g = algebra.empty();
                for a in atoms {
                    g = g.join(&algebra.singleton(atom(a)?));
                }
                ideal_gens.push(g);
            }
            None => {
                ideal_gens.push(actions[i].apply(&algebra.top()));
                defaulted.push(letter.clone());
            }
        }
    }

    let sys = Gbds::new(algebra, doc.letters.clone(), actions, ideal_gens)?;
    Ok(ParsedSystem {
        sys,
        defaulted_ideals: defaulted,
    })
}

/// The canonical document of a system: sorted tables, explicit ideals.
pub fn system_to_doc(sys: &Gbds) -> SystemDoc {
    let alg = sys.algebra();
    let mut actions = BTreeMap::new();
    for l in sys.letters() {
        let mut table = BTreeMap::new();
        for a in alg.atoms() {
            let img = sys.action(l).image_of_atom(a);
            if !img.is_empty() {
                table.insert(
                    alg.atom_name(a).to_string(),
                    img.iter().map(|b| alg.atom_name(b).to_string()).collect(),
                );
            }
        }
        actions.insert(sys.letter_name(l).to_string(), table);
    }
    let mut ideals = BTreeMap::new();
    for l in sys.letters() {
        ideals.insert(
            sys.letter_name(l).to_string(),
            sys.letter_ideal_gen(l)
                .iter()
                .map(|a| alg.atom_name(a).to_string())
                .collect(),
        );
    }
    SystemDoc {
        atoms: (0..alg.atom_count() as u8)
            .map(|a| alg.atom_name(a).to_string())
            .collect(),
        letters: sys
            .letters()
            .map(|l| sys.letter_name(l).to_string())
            .collect(),
        actions,
        ideals,
    }
}

pub fn system_to_toml(sys: &Gbds) -> String {
    toml::to_string(&system_to_doc(sys)).expect("system document serializes")
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::fixtures;

    const F1_DOC: &str = r#"
atoms = ["v"]
letters = ["a"]

[actions.a]
v = ["v"]

[ideals]
a = ["v"]
"#;

    #[test]
    fn parse_f1() {
        let parsed = parse_system_str(F1_DOC).unwrap();
        assert_eq!(parsed.sys.algebra().atom_count(), 1);
        assert!(parsed.defaulted_ideals.is_empty());
        assert!(parsed.sys.condition_l() == fixtures::f1().condition_l());
    }

    #[test]
    fn non_disjoint_rejected() {
        let doc = r#"
atoms = ["1", "2"]
letters = ["a"]

[actions.a]
1 = ["1"]
2 = ["1"]
"#;
        match parse_system_str(doc) {
            Err(Error::Axiom(msg)) => assert!(msg.contains("non-disjoint")),
            other => panic!("expected axiom violation, got {other:?}"),
        }
    }

    #[test]
    fn range_outside_ideal_rejected() {
        let doc = r#"
atoms = ["1", "2"]
letters = ["a"]

[actions.a]
1 = ["2"]

[ideals]
a = ["1"]
"#;
        match parse_system_str(doc) {
            Err(Error::Axiom(msg)) => assert!(msg.contains("ideal")),
            other => panic!("expected axiom violation, got {other:?}"),
        }
    }

    #[test]
    fn defaulted_ideals_reported() {
        let doc = r#"
atoms = ["v"]
letters = ["a"]

[actions.a]
v = ["v"]
"#;
        let parsed = parse_system_str(doc).unwrap();
        assert_eq!(parsed.defaulted_ideals, vec!["a".to_string()]);
    }

    #[test]
    fn roundtrip_canonical_doc() {
        for sys in fixtures::all() {
            let text = system_to_toml(&sys);
            let parsed = parse_system_str(&text).unwrap();
            assert_eq!(system_to_toml(&parsed.sys), text);
        }
    }

    #[test]
    fn syntax_error_is_positioned() {
        match parse_system_str("atoms = [") {
            Err(Error::Parse { .. }) => {}
            other => panic!("expected parse error, got {other:?}"),
        }
    }
}
