use pirarray::fixtures::{from_index_lists, intro_code};
use pirarray::verify::k_pir_pairs;
use pirarray::ArrayCode;
use pirarray_tool::formats::{parse_code, parse_plan, write_code, write_plan};
use proptest::prelude::*;

fn disjoint_code() -> impl Strategy<Value = ArrayCode> {
    (1usize..=9, 1usize..=4, 1usize..=6).prop_flat_map(|(p, t, m)| {
        let t = t.min(p);
        let column = proptest::collection::vec(0..=t, p).prop_filter_map("every cell non-empty", move |labels| {
            let cells: Vec<Vec<usize>> = (1..=t).map(|c| (0..p).filter(|&i| labels[i] == c).collect()).collect();
            cells.iter().all(|c| !c.is_empty()).then_some(cells)
        });
        proptest::collection::vec(column, m).prop_map(move |cols| from_index_lists(p, t, &cols).unwrap())
    })
}

proptest! {
    #[test]
    fn code_round_trip(code in disjoint_code()) {
        let text = write_code(&code);
        let back = parse_code(&text).unwrap();
        prop_assert_eq!(&back, &code);
        prop_assert_eq!(write_code(&back), text);
    }

    #[test]
    fn plan_round_trip(code in disjoint_code()) {
        let plan = k_pir_pairs(&code).plan;
        let text = write_plan(&plan);
        prop_assert_eq!(parse_plan(&text, code.p()).unwrap(), plan);
    }
}

#[test]
fn intro_file_parses_to_fixture() {
    let text = include_str!("golden/intro.pir");
    assert_eq!(parse_code(text).unwrap(), intro_code());
    let canonical = write_code(&intro_code());
    assert!(canonical.lines().nth(5).unwrap().starts_with("4;6;7;9;10;12;1+2+3"));
}
