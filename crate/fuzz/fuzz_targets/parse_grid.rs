#![no_main]

use libfuzzer_sys::fuzz_target;
use linopt::grid::{parse_grid, parse_number, MAX_GRID_POINTS};

fuzz_target!(|data: &[u8]| {
    let Ok(text) = std::str::from_utf8(data) else { return };
    if let Some(x) = parse_number(text) {
        assert!(x.is_finite());
    }
    if let Ok(points) = parse_grid(text) {
        assert!(!points.is_empty() && points.len() <= MAX_GRID_POINTS);
        assert!(points.windows(2).all(|w| w[0] < w[1]));
    }
});
