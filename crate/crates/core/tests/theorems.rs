use ideals::theorems::{catalog, check, controls, recheck, CheckError};

#[test]
fn verdicts_are_deterministic() {
    for id in ["T1.i", "L3.v", "T-fb"] {
        let a = check(id, Some(40), 9).unwrap();
        let b = check(id, Some(40), 9).unwrap();
        assert_eq!(a, b);
        assert!(a.pass, "{id}: {:?}", a.counterexample);
    }
}

#[test]
fn counterexamples_replay() {
    for e in controls() {
        let v = check(e.id, Some(500), 11).unwrap();
        let c = v.counterexample.expect("controls fail");
        let again = recheck(e.id, &c.instance).unwrap();
        assert_eq!(again, Err(c.explanation.clone()), "{}", e.id);
    }
}

#[test]
fn catalog_ids_and_errors() {
    let ids: Vec<&str> = catalog().iter().map(|e| e.id).collect();
    assert_eq!(ids.len(), 24);
    assert!(ids.contains(&"D-double") && ids.contains(&"T-attr"));
    assert!(!ids.iter().any(|id| id.starts_with("NC.")));
    assert_eq!(check("nope", None, 1), Err(CheckError::UnknownCheckId("nope".into())));
    assert_eq!(check("T1.i", Some(0), 1), Err(CheckError::NoTrials));
}
