#![no_main]

use libfuzzer_sys::fuzz_target;
use linopt::script::{parse_circuit, run_circuit, RunOptions};

fuzz_target!(|data: &[u8]| {
    let Ok(text) = std::str::from_utf8(data) else { return };
    let Ok(spec) = parse_circuit(text) else { return };
    if spec.photon_count() > 6 {
        return;
    }
    if let Ok(res) = run_circuit(&spec, &RunOptions::default()) {
        assert!(res.success_prob.is_finite());
        assert!(res.success_prob <= 1.0 + 1e-9);
    }
});
