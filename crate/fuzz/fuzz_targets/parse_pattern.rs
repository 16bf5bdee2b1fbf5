//! Parser round-trip target: any accepted pattern must validate, render,
//! and re-parse to a structurally identical tree; rejected input must
//! never panic.

#![no_main]

use libfuzzer_sys::fuzz_target;
use xregex::syntax::{parse, render, structural_eq};

fuzz_target!(|data: &[u8]| {
    let Ok(text) = std::str::from_utf8(data) else {
        return;
    };
    let Ok(ast) = parse(text) else {
        return;
    };
    ast.validate().expect("parsed tree validates");
    let rendered = render(&ast);
    let reparsed = parse(&rendered).expect("rendered pattern re-parses");
    assert!(
        structural_eq(&ast, &reparsed),
        "render round trip changed the tree: {text:?} -> {rendered:?}"
    );
});
