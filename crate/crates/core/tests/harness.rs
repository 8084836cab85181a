use lozenge_core::error::FormulaError;
use lozenge_core::harness::{
    correspondence_probe, reversed_dent_mismatches, run_sweep, run_sweep_with, Check, ClosedForms,
    DentPolicy, QuarteredRange, Span, SweepSpec,
};
use lozenge_core::lattice::QHParams;
use lozenge_core::matching::Count;

/// MacMahon's formula off by one whenever all three sides are positive.
struct OffByOne;

impl ClosedForms for OffByOne {
    fn macmahon(&self, a: u32, b: u32, c: u32) -> Result<Count, FormulaError> {
        let n = lozenge_core::formula::macmahon_count(a, b, c)?;
        Ok(if a > 0 && b > 0 && c > 0 {
            n + Count::one()
        } else {
            n
        })
    }
}

/// Quartered formula that ignores the dents.
struct DentBlind;

impl ClosedForms for DentBlind {
    fn quartered(&self, p: &QHParams) -> Result<Count, FormulaError> {
        let k = p.k();
        lozenge_core::formula::formula_quartered(&QHParams {
            dents: (1..=k).collect(),
            ..p.clone()
        })
    }
}

#[test]
fn desk_preset_passes() {
    let report = run_sweep(&SweepSpec::desk()).unwrap();
    assert!(report.all_passed(), "{}", report.summary_text());
    for check in Check::ALL {
        assert!(
            report.records_for(check).count() > 0,
            "{check} produced no records"
        );
    }
}

#[test]
fn corrupted_formula_is_caught_with_both_values() {
    let mut spec = SweepSpec::desk();
    spec.checks = vec![Check::Macmahon];
    let report = run_sweep_with(&spec, &OffByOne).unwrap();
    let bad: Vec<_> = report.failures().collect();
    assert_eq!(bad.len(), 27);
    let h111 = bad.iter().find(|r| r.params == "H(1,1,1)").unwrap();
    assert_eq!(h111.expected, "3");
    assert_eq!(h111.actual, "2");

    spec.checks = vec![Check::QuarteredOdd, Check::QuarteredEven];
    let report = run_sweep_with(&spec, &DentBlind).unwrap();
    assert!(report.failures().count() > 0);
    assert!(report
        .failures()
        .all(|r| !r.expected.is_empty() && !r.actual.is_empty()));
}

#[test]
fn reports_are_byte_identical() {
    let dir = std::env::temp_dir().join(format!("lozenge-report-{}", std::process::id()));
    let mut spec = SweepSpec::desk();
    spec.dents = DentPolicy::Sample(5);
    spec.lemma_samples = 50;
    let mut outputs = Vec::new();
    for (i, ext) in ["jsonl", "jsonl", "csv", "csv"].iter().enumerate() {
        let path = dir.join(format!("run{i}.{ext}"));
        spec.output = Some(path.clone());
        run_sweep(&spec).unwrap();
        outputs.push(std::fs::read(&path).unwrap());
    }
    assert_eq!(outputs[0], outputs[1]);
    assert_eq!(outputs[2], outputs[3]);
    let text = String::from_utf8(outputs[0].clone()).unwrap();
    assert!(text.lines().last().unwrap().contains("\"seed\":20141107"));
    assert!(String::from_utf8(outputs[2].clone())
        .unwrap()
        .starts_with("check,params,expected,actual,pass\n"));
    std::fs::remove_dir_all(dir).ok();
}

#[test]
fn timings_are_opt_in() {
    let mut spec = SweepSpec::empty();
    spec.identity_grid = 3;
    spec.checks = vec![Check::Identity];
    let plain = run_sweep(&spec).unwrap();
    assert!(plain.records.iter().all(|r| r.elapsed_us.is_none()));
    spec.timings = true;
    let timed = run_sweep(&spec).unwrap();
    assert!(timed.records.iter().all(|r| r.elapsed_us.is_some()));
    assert!(timed
        .to_csv()
        .starts_with("check,params,expected,actual,pass,elapsed_us\n"));
}

#[test]
fn unwritable_output_reports_the_path() {
    let mut spec = SweepSpec::empty();
    let blocker = std::env::temp_dir().join(format!("lozenge-blocker-{}", std::process::id()));
    std::fs::write(&blocker, b"x").unwrap();
    spec.output = Some(blocker.join("report.jsonl"));
    let err = run_sweep(&spec).unwrap_err().to_string();
    assert!(err.contains("lozenge-blocker"), "{err}");
    std::fs::remove_file(blocker).ok();
}

#[test]
fn staircases_are_reduced_quartered_hexagons() {
    let report = correspondence_probe(3, 6, 4);
    assert_eq!(report.unmatched().count(), 0);
    assert!(report.identity_map(), "{}", report.to_text());
    let e = report
        .entries
        .iter()
        .find(|e| (e.a, e.b, e.c) == (3, 6, 4))
        .unwrap();
    assert_eq!(e.count.to_string(), "182182");
    assert_eq!(e.matched.as_ref().unwrap().dents, vec![1]);
    assert!(report
        .entries
        .iter()
        .filter(|e| e.a == 0)
        .all(|e| e.count == Count::one()));
}

#[test]
fn dents_are_numbered_from_the_axis() {
    let range = QuarteredRange {
        a: Span::new(0, 2),
        c: Span::new(0, 3),
        k: Span::new(0, 2),
    };
    assert!(reversed_dent_mismatches(&range) > 0);
}

#[test]
fn boundary_dent_at_d_matches_formula() {
    // s_k = d lies outside the standing assumptions but is still covered
    let mut spec = SweepSpec::empty();
    spec.quartered = QuarteredRange {
        a: Span::new(0, 3),
        c: Span::new(0, 3),
        k: Span::new(1, 3),
    };
    spec.checks = vec![Check::QuarteredOdd, Check::QuarteredEven];
    let report = run_sweep(&spec).unwrap();
    let boundary = report
        .records
        .iter()
        .filter(|r| {
            let p: Vec<u32> = r.params[2..r.params.len() - 1]
                .split([',', ';'])
                .filter_map(|v| v.trim().parse().ok())
                .collect();
            let (a, dents) = (p[0], &p[3..]);
            dents.last() == Some(&(a + dents.len() as u32))
        })
        .count();
    assert!(boundary > 0);
    assert!(report.all_passed(), "{}", report.summary_text());
}
