mod common;

use common::*;
use impcat_core::logics::coupling::Answer;
use impcat_core::backends::BackendId;
use impcat_core::surface::files::format_source;
use impcat_core::surface::{FileKind, SourceFile, TripleFile};

#[test]
fn corpus_parses_checks_and_round_trips() {
    let m = nat3();
    let files = corpus_files();
    assert!(files.len() >= 30, "{} files", files.len());
    let bad: Vec<String> = files.iter().filter_map(|p| corpus_ok(p, &m).err()).collect();
    assert!(bad.is_empty(), "{}", bad.join("\n"));
}

#[test]
fn formatting_is_idempotent() {
    for p in corpus_files() {
        let src = SourceFile::read(&p).unwrap();
        let once = format_source(&src).unwrap();
        let again = SourceFile { text: once.clone(), ..src };
        assert_eq!(format_source(&again).unwrap(), once, "{}", p.display());
    }
}

#[test]
fn bad_fixtures_report_the_expected_code_and_span() {
    let m = nat3();
    let man = manifest();
    assert!(man.model.ends_with("nat3.model.json"));
    let errs: Vec<String> = man.files.iter().filter_map(|(n, e)| bad_ok(n, e, &m).err()).collect();
    assert!(errs.is_empty(), "{}", errs.join("\n"));
    let on_disk = std::fs::read_dir(fixtures().join("bad"))
        .unwrap()
        .filter(|e| FileKind::of(&e.as_ref().unwrap().path()).is_some())
        .count();
    assert_eq!(on_disk, man.files.len(), "every bad fixture has a manifest entry");
}

#[test]
fn triples_meet_their_expectations() {
    for p in corpus_files().into_iter().filter(|p| FileKind::of(p) == Some(FileKind::Triple)) {
        let t = TripleFile::load(&p).unwrap_or_else(|d| panic!("{}", d.render()));
        let want = t.spec.expect.unwrap_or_else(|| panic!("{} has no expectation", p.display()));
        for b in t.backends() {
            let got = t.check(b).unwrap();
            assert_eq!(got.verdict, want, "{} on {b:?}", p.display());
        }
    }
}

#[test]
fn countdown_is_valid_on_every_backend() {
    let t = TripleFile::load(&fixtures().join("corpus/fig_prop1.triple.json")).unwrap();
    assert_eq!(t.backends(), BackendId::ALL.to_vec());
    for b in BackendId::ALL {
        assert_eq!(t.check(b).unwrap().verdict, Answer::Valid, "{b:?}");
    }
}

#[test]
fn rendered_diagnostics_quote_the_line() {
    let m = nat3();
    let d = impcat_core::surface::files::validate(&fixtures().join("bad/unknown_var.gcl"), &m.sig).unwrap_err();
    let out = d.render();
    assert!(out.contains("error[type]"), "{out}");
    assert!(out.lines().any(|l| l.trim_start_matches([' ', '|']).starts_with('^')), "{out}");
}
