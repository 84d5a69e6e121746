//! Rule engine properties: literal rules against a direct check, tumbling
//! and sliding window means against a recomputation, ordering rules.

use std::collections::BTreeMap;

use proptest::prelude::*;
use semcep::cep::{parse_rule, CepEngine, CepError, VitalEvent, WindowSpec};

fn stream() -> impl Strategy<Value = Vec<(i64, f64)>> {
    prop::collection::vec((1i64..4_000, 40.0..160.0f64), 1..80).prop_map(|steps| {
        let mut ts = 0;
        steps
            .into_iter()
            .map(|(dt, v)| {
                ts += dt;
                (ts, v.round())
            })
            .collect()
    })
}

fn events(s: &[(i64, f64)]) -> Vec<VitalEvent> {
    s.iter().map(|&(ts, v)| VitalEvent::new(ts, "P", &[("hr", v)])).collect()
}

fn window_oracle(s: &[(i64, f64)], spec: WindowSpec, threshold: f64) -> Vec<(i64, f64)> {
    let mut windows: BTreeMap<i64, Vec<f64>> = BTreeMap::new();
    for &(ts, v) in s {
        // every start that is a multiple of the slide and covers ts
        let mut start = (ts / spec.slide_ms) * spec.slide_ms;
        while start >= 0 && start + spec.length_ms > ts {
            windows.entry(start).or_default().push(v);
            start -= spec.slide_ms;
        }
    }
    windows
        .into_iter()
        .map(|(start, vs)| (start + spec.length_ms, vs.iter().sum::<f64>() / vs.len() as f64))
        .filter(|&(_, mean)| mean > threshold)
        .collect()
}

proptest! {
    #[test]
    fn literal_rule_fires_exactly_when_condition_holds(s in stream(), t in 40i64..160, op in 0usize..4) {
        let sym = ["<", "<=", ">", ">="][op];
        let engine = CepEngine::with_rules(vec![
            parse_rule(&format!("r: from S [hr {sym} {t}] select hr insert into (X);")).unwrap(),
        ]).unwrap();
        let fired: Vec<i64> = engine.run(&events(&s)).unwrap().iter().map(|d| d.ts).collect();
        let t = t as f64;
        let want: Vec<i64> = s
            .iter()
            .filter(|(_, v)| match op { 0 => *v < t, 1 => *v <= t, 2 => *v > t, _ => *v >= t })
            .map(|(ts, _)| *ts)
            .collect();
        prop_assert_eq!(fired, want);
    }

    #[test]
    fn windowed_rule_fires_on_window_means(s in stream(), len_s in 1i64..8, slide_s in 1i64..8, t in 60i64..140) {
        let slide_s = slide_s.min(len_s);
        let spec = if slide_s == len_s {
            format!("tumbling:{len_s}s")
        } else {
            format!("sliding:{len_s}s,{slide_s}s")
        };
        let rule = parse_rule(&format!("w: from S [hr > {t}] window({spec}) select hr insert into (M);")).unwrap();
        let ws: WindowSpec = spec.parse().unwrap();
        let engine = CepEngine::with_rules(vec![rule]).unwrap();
        let got: Vec<(i64, f64)> = engine.run(&events(&s)).unwrap().iter().map(|d| (d.ts, d.values["hr"])).collect();
        let want = window_oracle(&s, ws, t as f64);
        prop_assert_eq!(got.len(), want.len());
        for (g, w) in got.iter().zip(&want) {
            prop_assert_eq!(g.0, w.0);
            prop_assert!((g.1 - w.1).abs() < 1e-9);
        }
    }
}

#[test]
fn out_of_order_event_rejected_per_patient() {
    let e = CepEngine::with_rules(vec![parse_rule("from S [hr > 1] select hr insert into (X);").unwrap()]).unwrap();
    e.ingest(&VitalEvent::new(10, "A", &[("hr", 5.0)])).unwrap();
    // another patient may lag behind
    e.ingest(&VitalEvent::new(3, "B", &[("hr", 5.0)])).unwrap();
    assert!(matches!(e.ingest(&VitalEvent::new(9, "A", &[("hr", 5.0)])), Err(CepError::OutOfOrder { .. })));
}

#[test]
fn duplicate_rule_id_rejected() {
    let e = CepEngine::new();
    e.deploy(parse_rule("a: from S [hr > 1] select hr insert into (X);").unwrap()).unwrap();
    assert!(matches!(
        e.deploy(parse_rule("a: from S [hr > 2] select hr insert into (Y);").unwrap()),
        Err(CepError::DuplicateRule(_))
    ));
}
