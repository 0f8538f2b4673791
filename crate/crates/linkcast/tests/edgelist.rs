mod common;

use linkcast::edgelist::{
    load_edge_list, read_canonical, write_canonical, EdgeListFormat, HeaderMode,
};
use linkcast::Error;

fn csv() -> EdgeListFormat {
    EdgeListFormat::default()
}

#[test]
fn example_file_loads_with_chronological_labels() {
    let dir = tempfile::tempdir().unwrap();
    let p = common::write(dir.path(), "g.csv", "a,b,1\nb,c,2\nc,a,2\n");
    let g = load_edge_list(&p, &csv(), 1).unwrap();
    assert_eq!(g.graph.node_count(), 3);
    assert_eq!(g.graph.edge_count(), 3);
    assert_eq!((g.graph.t_min(), g.graph.t_max()), (1, 2));
    assert_eq!(g.labels, ["a", "b", "c"]);
}

#[test]
fn single_edge() {
    let dir = tempfile::tempdir().unwrap();
    let p = common::write(dir.path(), "g.csv", "x,y,0\n");
    let g = load_edge_list(&p, &csv(), 1).unwrap();
    assert_eq!(
        (
            g.graph.node_count(),
            g.graph.edge_count(),
            g.graph.duration()
        ),
        (2, 1, 0)
    );
}

#[test]
fn row_order_does_not_matter_beyond_ties() {
    let dir = tempfile::tempdir().unwrap();
    let shuffled = common::write(dir.path(), "a.csv", "a,b,5\nc,a,2\nb,c,2\na,b,1\nb,a,5\n");
    let sorted = common::write(dir.path(), "b.csv", "a,b,1\nc,a,2\nb,c,2\na,b,5\nb,a,5\n");
    let x = load_edge_list(&shuffled, &csv(), 1).unwrap();
    let y = load_edge_list(&sorted, &csv(), 1).unwrap();
    assert_eq!(x.graph, y.graph);
    assert_eq!(x.labels, y.labels);
    assert_ne!(x.fingerprint, y.fingerprint);
}

#[test]
fn formats_and_headers() {
    let dir = tempfile::tempdir().unwrap();
    let ws = common::write(dir.path(), "g.txt", "# comment\n1 u v 7\n\n2\tv  w 9\n");
    let f: EdgeListFormat = "ws:cols=1,2,0".parse().unwrap();
    let g = load_edge_list(&ws, &f, 1).unwrap();
    assert_eq!(g.graph.edge_count(), 2);
    assert_eq!(g.labels, ["u", "v", "w"]);
    assert_eq!(g.graph.edges()[1].t, 2);

    let tsv = common::write(dir.path(), "g.tsv", "from\tto\twhen\textra\na\tb\t3.0\tz\n");
    let g = load_edge_list(&tsv, &"tsv".parse().unwrap(), 1).unwrap();
    assert_eq!(g.graph.edges()[0].t, 3);

    // a numeric header is only skipped when declared
    let numeric = common::write(dir.path(), "n.csv", "1,2,3\n4,5,6\n");
    let yes = EdgeListFormat {
        header: HeaderMode::Present,
        ..csv()
    };
    assert_eq!(
        load_edge_list(&numeric, &yes, 1)
            .unwrap()
            .graph
            .edge_count(),
        1
    );
    assert_eq!(
        load_edge_list(&numeric, &csv(), 1)
            .unwrap()
            .graph
            .edge_count(),
        2
    );

    let f: EdgeListFormat = "csv:delim=;:header=no".parse().unwrap();
    assert_eq!(f.to_string().parse::<EdgeListFormat>().unwrap(), f);
    assert!("xml".parse::<EdgeListFormat>().is_err());
    assert!("csv:cols=1,2".parse::<EdgeListFormat>().is_err());
}

#[test]
fn errors_carry_line_numbers() {
    let dir = tempfile::tempdir().unwrap();
    let cases = [
        ("src,dst,t\na,b,1\na,b\n", 3, "at least 3 fields"),
        ("a,b,1\n# c\nb,c,soon\n", 3, "not an integer"),
        ("a,b,1\nb,c,-4\n", 2, "negative"),
        ("a,b,1\nb,c,2.5\n", 2, "not an integer"),
    ];
    for (i, (body, line, needle)) in cases.into_iter().enumerate() {
        let p = common::write(dir.path(), &format!("bad{i}.csv"), body);
        match load_edge_list(&p, &csv(), 1) {
            Err(Error::Parse {
                line: l, message, ..
            }) => {
                assert_eq!(l, line, "{body:?}");
                assert!(message.contains(needle), "{message}");
            }
            other => panic!("{body:?}: {other:?}"),
        }
    }
    let empty = common::write(dir.path(), "empty.csv", "src,dst,t\n");
    assert!(matches!(
        load_edge_list(&empty, &csv(), 1),
        Err(Error::Format { .. })
    ));
    let missing = dir.path().join("nope.csv");
    assert!(matches!(
        load_edge_list(&missing, &csv(), 1),
        Err(Error::Read { .. })
    ));
}

#[test]
fn canonical_round_trip_is_identical() {
    let dir = tempfile::tempdir().unwrap();
    let p = common::write(dir.path(), "g.txt", "q \"x\" 4\ny,z q 2\nq y 2\n");
    let g = load_edge_list(&p, &"ws".parse().unwrap(), 2).unwrap();
    let out = dir.path().join("canon.csv");
    write_canonical(&g, &out).unwrap();
    let (again, meta) = read_canonical(&out).unwrap();
    assert_eq!(again.graph, g.graph);
    assert_eq!(again.labels, g.labels);
    assert_eq!(meta.source_fingerprint, g.fingerprint);
    assert_eq!(meta.resolution, 2);
    // a second round trip reproduces the same bytes
    let out2 = dir.path().join("canon2.csv");
    write_canonical(&again, &out2).unwrap();
    assert_eq!(std::fs::read(&out).unwrap(), std::fs::read(&out2).unwrap());
}
