#![no_main]

use collide_cli::schema::check_records_csv;
use libfuzzer_sys::fuzz_target;

fuzz_target!(|data: &[u8]| {
    if let Ok(text) = std::str::from_utf8(data) {
        let _ = check_records_csv(text);
    }
});
