#![no_main]

use collide_cli::config::Config;
use libfuzzer_sys::fuzz_target;

fuzz_target!(|data: &[u8]| {
    if let Ok(text) = std::str::from_utf8(data) {
        if let Ok(cfg) = Config::parse(text) {
            let again = Config::parse(&cfg.echo()).expect("echo re-parses");
            assert_eq!(again.raw, cfg.raw);
        }
    }
});
