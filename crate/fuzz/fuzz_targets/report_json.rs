#![no_main]

use collide_cli::schema::check_report_json;
use libfuzzer_sys::fuzz_target;

fuzz_target!(|data: &[u8]| {
    if let Ok(text) = std::str::from_utf8(data) {
        let _ = check_report_json(text);
    }
});
