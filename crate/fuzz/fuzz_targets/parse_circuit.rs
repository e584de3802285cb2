#![no_main]

use libfuzzer_sys::fuzz_target;
use linopt::script::parse_circuit;

fuzz_target!(|data: &[u8]| {
    let Ok(text) = std::str::from_utf8(data) else { return };
    if let Ok(spec) = parse_circuit(text) {
        // printed steps parse back to the same operations
        let printed: Vec<String> = spec.steps.iter().map(|s| s.op.to_string()).collect();
        let again = format!("paths {}\n{}", spec.paths.join(" "), printed.join("\n"));
        if !spec.paths.is_empty() {
            let reparsed = parse_circuit(&again).expect("printed circuit parses");
            let ops: Vec<_> = reparsed.steps.iter().map(|s| &s.op).collect();
            assert_eq!(ops, spec.steps.iter().map(|s| &s.op).collect::<Vec<_>>());
        }
    }
});
