use cvtele::acceptance::{run_all, Outcome};

fn line(o: &Outcome) -> String {
    format!(
        "[{}] {:>2} {:<32} {:>7.2} s  {}",
        if o.passed { "PASS" } else { "FAIL" },
        o.id,
        o.title,
        o.seconds,
        o.detail
    )
}

#[test]
fn acceptance_criteria() {
    let outcomes = run_all();
    for o in &outcomes {
        println!("{}", line(o));
    }
    let failed: Vec<u32> = outcomes.iter().filter(|o| !o.passed).map(|o| o.id).collect();
    assert!(failed.is_empty(), "failed criteria: {failed:?}");
}
