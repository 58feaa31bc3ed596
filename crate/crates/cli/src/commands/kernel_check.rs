use std::process::ExitCode;

use anyhow::Result;
use mapi::selfcheck;

pub fn run(json: bool) -> Result<ExitCode> {
    let results = selfcheck::run_all();
    let all_passed = results.iter().all(|r| r.passed);
    if json {
        let doc = serde_json::json!({
            "passed": all_passed,
            "checks": results,
        });
        println!("{}", serde_json::to_string_pretty(&doc)?);
    } else {
        println!("{:<26} {:>6} {:>7} {:>12}  detail", "check", "status", "cases", "max error");
        for r in &results {
            println!(
                "{:<26} {:>6} {:>7} {:>12.3e}  {}",
                r.name,
                if r.passed { "PASS" } else { "FAIL" },
                r.cases,
                r.max_error,
                r.detail
            );
        }
        println!(
            "\nkernel-check: {}",
            if all_passed { "all suites passed" } else { "FAILURES present" }
        );
    }
    Ok(if all_passed {
        ExitCode::SUCCESS
    } else {
        ExitCode::from(1)
    })
}
