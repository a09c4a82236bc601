//! Frontend for the Neno-style object language: lexer, parser, printer
//! and typechecker.

pub mod ast;
mod error;
mod lexer;
mod parser;
mod printer;
mod typecheck;

pub use ast::*;
pub use error::{NenoError, Result};
pub use parser::parse;
pub use printer::print;
pub use typecheck::{typecheck, CheckedUnit, Ty, VOID};

#[cfg(test)]
mod tests {
    use super::*;

    pub const PERSON: &str = r#"
prefix lanl: <http://www.lanl.gov#>;
prefix foaf: <http://xmlns.com/foaf/0.1/>;

foaf:Agent lanl:Person {
  xsd:string foaf:name[1];
  lanl:Person foaf:knows[0..*];

  makeFriend(lanl:Person p) {
    this.foaf:knows =+ p;
  }

  makeEnemy(lanl:Person p) {
    this.foaf:knows =- p;
  }

  makeAllEnemies() {
    this.foaf:knows =/;
  }

  xsd:boolean isFriend(lanl:Person p) {
    return this.foaf:knows =? p;
  }
}
"#;

    #[test]
    fn person_golden() {
        let unit = parse(PERSON).unwrap();
        assert_eq!(unit.prefixes.len(), 2);
        assert_eq!(unit.classes.len(), 1);
        let class = &unit.classes[0];
        assert_eq!(class.uri, "lanl:Person");
        assert_eq!(class.super_class, "foaf:Agent");
        assert_eq!(class.fields.len(), 2);
        assert_eq!(class.fields[0].predicate, "foaf:name");
        assert_eq!(class.fields[0].card, Card { min: 1, max: Some(1) });
        assert_eq!(class.fields[1].card, Card { min: 0, max: None });
        assert_eq!(class.methods.len(), 4);
        assert_eq!(class.methods[3].return_type.as_deref(), Some("xsd:boolean"));
        typecheck(&unit).unwrap();
    }

    #[test]
    fn print_parse_roundtrip() {
        let unit = parse(PERSON).unwrap();
        let printed = print(&unit);
        let reparsed = parse(&printed).unwrap();
        assert_eq!(print(&reparsed), printed);
    }

    #[test]
    fn arithmetic_and_control_flow() {
        let src = r#"
prefix ex: <http://example.org#>;
ex:Thing ex:Counter {
  xsd:int ex:count[1];

  xsd:int bump(xsd:int by) {
    xsd:int x = 1 + 2 * 3;
    while (this.ex:count =? x) {
      this.ex:count = x + by;
    }
    if (this.ex:count =? 7) {
      return x;
    } else {
      return this.ex:count + 1;
    }
  }
}
"#;
        let unit = parse(src).unwrap();
        let checked = typecheck(&unit).unwrap();
        // 1 + 2 * 3 must parse with multiplication bound tighter
        let printed = print(&unit);
        assert!(printed.contains("1 + 2 * 3"));
        assert!(!checked.expr_types.is_empty());
    }

    #[test]
    fn unknown_prefix_rejected() {
        let src = "foaf:Agent lanl:Person { makeFriend(lanl:Person p) { } }";
        match parse(src) {
            Err(NenoError::UnknownPrefix { prefix, .. }) => {
                assert!(prefix == "foaf" || prefix == "lanl")
            }
            other => panic!("expected UnknownPrefix, got {other:?}"),
        }
    }

    #[test]
    fn arity_error() {
        let src = r#"
prefix lanl: <http://www.lanl.gov#>;
prefix foaf: <http://xmlns.com/foaf/0.1/>;
foaf:Agent lanl:Person {
  lanl:Person foaf:knows[0..*];
  xsd:boolean isFriend(lanl:Person p) {
    return this.foaf:knows =? p;
  }
  check(lanl:Person p, lanl:Person q) {
    xsd:boolean b = isFriend(p, q);
  }
}
"#;
        let unit = parse(src).unwrap();
        match typecheck(&unit) {
            Err(NenoError::ArityError { method, .. }) => assert_eq!(method, "isFriend"),
            other => panic!("expected ArityError, got {other:?}"),
        }
    }

    #[test]
    fn type_mismatch_on_set() {
        let src = r#"
prefix lanl: <http://www.lanl.gov#>;
prefix foaf: <http://xmlns.com/foaf/0.1/>;
foaf:Agent lanl:Person {
  lanl:Person foaf:knows[0..*];
  bad() {
    this.foaf:knows =+ "not a person";
  }
}
"#;
        let unit = parse(src).unwrap();
        assert!(matches!(
            typecheck(&unit),
            Err(NenoError::TypeMismatch { .. })
        ));
    }

    #[test]
    fn clear_on_mandatory_field_rejected() {
        let src = r#"
prefix lanl: <http://www.lanl.gov#>;
prefix foaf: <http://xmlns.com/foaf/0.1/>;
foaf:Agent lanl:Person {
  xsd:string foaf:name[1];
  bad() {
    this.foaf:name =/;
  }
}
"#;
        let unit = parse(src).unwrap();
        assert!(matches!(
            typecheck(&unit),
            Err(NenoError::CardinalityError { .. })
        ));
    }

    #[test]
    fn non_void_must_return() {
        let src = r#"
prefix ex: <http://example.org#>;
ex:Thing ex:T {
  xsd:int f(xsd:boolean b) {
    if (b) {
      return 1;
    }
  }
}
"#;
        let unit = parse(src).unwrap();
        assert!(matches!(typecheck(&unit), Err(NenoError::DeclError { .. })));
    }

    #[test]
    fn inverse_invocation_requires_void() {
        let src = r#"
prefix lanl: <http://www.lanl.gov#>;
prefix foaf: <http://xmlns.com/foaf/0.1/>;
foaf:Agent lanl:Person {
  lanl:Person foaf:knows[0..*];
  makeEnemy(lanl:Person p) {
    this.foaf:knows =- p;
  }
  xsd:boolean isFriend(lanl:Person p) {
    return this.foaf:knows =? p;
  }
  ok(lanl:Person p) {
    lanl:marko..foaf:knows.makeEnemy(p);
  }
  bad(lanl:Person p) {
    xsd:boolean b = lanl:marko..foaf:knows.isFriend(p);
  }
}
"#;
        let unit = parse(src).unwrap();
        match typecheck(&unit) {
            Err(NenoError::TypeMismatch { expected, .. }) => {
                assert!(expected.contains("void"))
            }
            other => panic!("expected TypeMismatch, got {other:?}"),
        }
    }

    #[test]
    fn void_call_is_not_a_value() {
        let src = r#"
prefix lanl: <http://www.lanl.gov#>;
prefix foaf: <http://xmlns.com/foaf/0.1/>;
foaf:Agent lanl:Person {
  lanl:Person foaf:knows[0..*];
  makeFriend(lanl:Person p) {
    this.foaf:knows =+ p;
  }
  bad(lanl:Person p) {
    lanl:Person q = makeFriend(p);
  }
}
"#;
        let unit = parse(src).unwrap();
        assert!(matches!(
            typecheck(&unit),
            Err(NenoError::TypeMismatch { .. })
        ));
    }

    #[test]
    fn garbage_never_panics() {
        use rand::{Rng, SeedableRng};
        let mut rng = rand_chacha::ChaCha8Rng::seed_from_u64(0xba5e);
        let alphabet: Vec<char> =
            "abcXYZ019 :;.{}()[]=+-*/<>\"\\\n\t_prefix this return if while".chars().collect();
        for _ in 0..500 {
            let len = rng.gen_range(0..120);
            let src: String = (0..len)
                .map(|_| alphabet[rng.gen_range(0..alphabet.len())])
                .collect();
            // must either parse or return an error, never panic
            if let Ok(unit) = parse(&src) {
                let _ = typecheck(&unit);
            }
        }
    }
}
