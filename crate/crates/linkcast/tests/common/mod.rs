#![allow(dead_code)]

use std::fmt::Write as _;
use std::path::{Path, PathBuf};
use std::process::{Command, Output};

pub fn write(dir: &Path, name: &str, body: &str) -> PathBuf {
    let p = dir.join(name);
    std::fs::write(&p, body).unwrap();
    p
}

/// The six-edge example graph with letter labels.
pub const EXAMPLE: &str = "src,dst,t\na,b,1\nb,c,2\nc,a,2\na,c,4\na,b,5\nb,a,5\n";

/// Train edges at unique times with distinct pairs, then one 400-edge
/// snapshot holding 200 fresh pairs followed by the same 200 pairs again.
/// With b=200 the second batch's positives were all seen in the first batch.
pub fn leak_fixture() -> String {
    let mut s = String::from("src,dst,t\n");
    let mut k = 0;
    for i in 0..100u32 {
        for j in 0..100u32 {
            if k == 600 {
                break;
            }
            if i != j && (i + 3 * j) % 7 == 0 {
                let _ = writeln!(s, "n{i},n{j},{k}");
                k += 1;
            }
        }
    }
    assert_eq!(k, 600);
    let fresh: Vec<(u32, u32)> = (0..200u32).map(|i| (100 + i, 300 + i)).collect();
    for _ in 0..2 {
        for (a, b) in &fresh {
            let _ = writeln!(s, "n{a},n{b},1000");
        }
    }
    s
}

pub fn linkcast(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_linkcast"))
        .args(args)
        .env_remove("LINKCAST_THREADS")
        .output()
        .expect("binary runs")
}

pub fn files_of(dir: &Path) -> Vec<(String, Vec<u8>)> {
    let mut v: Vec<_> = std::fs::read_dir(dir)
        .unwrap()
        .map(|e| {
            let e = e.unwrap();
            (
                e.file_name().to_string_lossy().into_owned(),
                std::fs::read(e.path()).unwrap(),
            )
        })
        .collect();
    v.sort();
    v
}
