//! Reader and writer for the METIS graph text format.
//!
//! Layout: a header line `n m [fmt [ncon]]` followed by one line per node
//! listing its neighbors as 1-indexed ids. The `fmt` field is read as a
//! decimal-coded bit string: units digit 1 means edge weights follow each
//! neighbor id, tens digit 1 means each node line starts with the node
//! weight. Lines starting with `%` are comments and may appear anywhere.
//!
//! Reading validates everything the in-memory representation promises:
//! symmetric adjacency with matching weights, no self-loops, no duplicate
//! neighbor entries, ids in range. Writing emits the minimal `fmt` for the
//! graph's weights, so a write/read round trip reproduces the graph exactly.

use std::fs::File;
use std::io::{BufRead, BufReader, BufWriter, Write};
use std::path::Path;

use crate::error::{Error, Result};
use crate::graph::{Graph, NodeId, Weight};

struct Tokens<'a> {
    line_no: usize,
    iter: std::str::SplitWhitespace<'a>,
}

impl<'a> Tokens<'a> {
    fn new(line_no: usize, line: &'a str) -> Self {
        Tokens {
            line_no,
            iter: line.split_whitespace(),
        }
    }

    fn next_int(&mut self, what: &str) -> Result<Option<i64>> {
        match self.iter.next() {
            None => Ok(None),
            Some(tok) => tok.parse::<i64>().map(Some).map_err(|_| Error::Malformed {
                line: self.line_no,
                message: format!("{what}: expected an integer, found {tok:?}"),
            }),
        }
    }

    fn require_int(&mut self, what: &str) -> Result<i64> {
        self.next_int(what)?.ok_or_else(|| Error::Malformed {
            line: self.line_no,
            message: format!("missing {what}"),
        })
    }
}

pub fn read_metis<R: BufRead>(reader: R) -> Result<Graph> {
    let mut lines = reader.lines();
    let mut line_no = 0usize;

    // Header: first non-comment line.
    let header = loop {
        match lines.next() {
            None => {
                return Err(Error::Malformed {
                    line: line_no,
                    message: "empty input, expected a header line".into(),
                })
            }
            Some(line) => {
                line_no += 1;
                let line = line?;
                if !line.trim_start().starts_with('%') {
                    break line;
                }
            }
        }
    };

    let mut toks = Tokens::new(line_no, &header);
    let n = toks.require_int("node count")?;
    let m = toks.require_int("edge count")?;
    if n < 0 || m < 0 {
        return Err(Error::Malformed {
            line: line_no,
            message: "negative counts in header".into(),
        });
    }
    let (n, m) = (n as usize, m as usize);
    let fmt = toks.next_int("fmt")?.unwrap_or(0);
    let ncon = toks.next_int("ncon")?;
    if toks.iter.next().is_some() {
        return Err(Error::Malformed {
            line: line_no,
            message: "trailing tokens in header".into(),
        });
    }
    if !matches!(fmt, 0 | 1 | 10 | 11) {
        return Err(Error::Malformed {
            line: line_no,
            message: format!("unsupported fmt {fmt}; supported values are 0, 1, 10, 11"),
        });
    }
    let has_edge_weights = fmt % 10 == 1;
    let has_node_weights = (fmt / 10) % 10 == 1;
    match ncon {
        None => {}
        Some(1) if has_node_weights => {}
        Some(c) => {
            return Err(Error::Malformed {
                line: line_no,
                message: format!("unsupported ncon {c}; only one node weight is supported"),
            })
        }
    }

    let mut node_weights: Vec<Weight> = Vec::with_capacity(n);
    let mut offsets = vec![0usize; n + 1];
    let mut targets: Vec<NodeId> = Vec::with_capacity(2 * m);
    let mut weights: Vec<Weight> = Vec::with_capacity(2 * m);

    let mut parsed_nodes = 0usize;
    while parsed_nodes < n {
        let line = match lines.next() {
            None => {
                return Err(Error::Malformed {
                    line: line_no,
                    message: format!(
                        "truncated input: expected {n} node lines, found {parsed_nodes}"
                    ),
                })
            }
            Some(line) => {
                line_no += 1;
                line?
            }
        };
        if line.trim_start().starts_with('%') {
            continue;
        }
        let v = parsed_nodes as NodeId;
        let mut toks = Tokens::new(line_no, &line);
        if has_node_weights {
            let c = toks.require_int("node weight")?;
            if c <= 0 {
                return Err(Error::NonPositiveWeight {
                    what: format!("node {} (line {line_no})", v + 1),
                    weight: c,
                });
            }
            node_weights.push(c);
        } else {
            node_weights.push(1);
        }
        loop {
            let t = match toks.next_int("neighbor id")? {
                None => break,
                Some(t) => t,
            };
            if t < 1 || t as usize > n {
                return Err(Error::Malformed {
                    line: line_no,
                    message: format!("neighbor id {t} outside 1..={n}"),
                });
            }
            let target = (t - 1) as NodeId;
            if target == v {
                return Err(Error::SelfLoop { node: v });
            }
            let w = if has_edge_weights {
                let w = toks.require_int("edge weight")?;
                if w <= 0 {
                    return Err(Error::NonPositiveWeight {
                        what: format!("edge ({}, {t}) (line {line_no})", v + 1),
                        weight: w,
                    });
                }
                w
            } else {
                1
            };
            targets.push(target);
            weights.push(w);
        }
        parsed_nodes += 1;
        offsets[parsed_nodes] = targets.len();
    }

    // Anything after the node lines must be comments or blank.
    for line in lines {
        line_no += 1;
        let line = line?;
        let trimmed = line.trim();
        if !trimmed.is_empty() && !trimmed.starts_with('%') {
            return Err(Error::Malformed {
                line: line_no,
                message: "unexpected content after the last node line".into(),
            });
        }
    }

    if targets.len() != 2 * m {
        return Err(Error::Malformed {
            line: line_no,
            message: format!(
                "header promises {m} edges but the node lines contain {} adjacency entries (expected {})",
                targets.len(),
                2 * m
            ),
        });
    }

    // Sort each adjacency list, reject duplicates, verify symmetry.
    let mut sorted_targets = Vec::with_capacity(targets.len());
    let mut sorted_weights = Vec::with_capacity(weights.len());
    let mut entries: Vec<(NodeId, Weight)> = Vec::new();
    for v in 0..n {
        entries.clear();
        entries.extend(
            targets[offsets[v]..offsets[v + 1]]
                .iter()
                .copied()
                .zip(weights[offsets[v]..offsets[v + 1]].iter().copied()),
        );
        entries.sort_unstable_by_key(|&(t, _)| t);
        for pair in entries.windows(2) {
            if pair[0].0 == pair[1].0 {
                return Err(Error::DuplicateNeighbor {
                    node: v as NodeId,
                    neighbor: pair[0].0,
                });
            }
        }
        sorted_targets.extend(entries.iter().map(|&(t, _)| t));
        sorted_weights.extend(entries.iter().map(|&(_, w)| w));
    }

    let g = Graph::from_parts_for_read(offsets, sorted_targets, sorted_weights, node_weights)?;
    Ok(g)
}

pub fn read_metis_file<P: AsRef<Path>>(path: P) -> Result<Graph> {
    read_metis(BufReader::new(File::open(path)?))
}

pub fn write_metis<W: Write>(g: &Graph, mut out: W) -> Result<()> {
    let has_node_weights = g.node_weights().iter().any(|&c| c != 1);
    let has_edge_weights = g.edges().any(|(_, _, _, w)| w != 1);
    let fmt = (has_node_weights as u32) * 10 + has_edge_weights as u32;

    if fmt == 0 {
        writeln!(out, "{} {}", g.node_count(), g.edge_count())?;
    } else {
        writeln!(out, "{} {} {}", g.node_count(), g.edge_count(), fmt)?;
    }
    let mut line = String::new();
    for v in 0..g.node_count() as NodeId {
        line.clear();
        if has_node_weights {
            line.push_str(&g.node_weight(v).to_string());
        }
        for (t, w) in g.neighbors(v) {
            if !line.is_empty() {
                line.push(' ');
            }
            line.push_str(&(t + 1).to_string());
            if has_edge_weights {
                line.push(' ');
                line.push_str(&w.to_string());
            }
        }
        writeln!(out, "{line}")?;
    }
    Ok(())
}

pub fn write_metis_file<P: AsRef<Path>>(g: &Graph, path: P) -> Result<()> {
    let mut w = BufWriter::new(File::create(path)?);
    write_metis(g, &mut w)?;
    w.flush()?;
    Ok(())
}

#[cfg(test)]
mod tests {
    use super::*;
    use std::io::Cursor;

    fn parse(s: &str) -> Result<Graph> {
        read_metis(Cursor::new(s.as_bytes()))
    }

    fn render(g: &Graph) -> String {
        let mut buf = Vec::new();
        write_metis(g, &mut buf).unwrap();
        String::from_utf8(buf).unwrap()
    }

    #[test]
    fn reads_unweighted_path() {
        let g = parse("3 2\n2\n1 3\n2\n").unwrap();
        assert_eq!(g.node_count(), 3);
        assert_eq!(g.edge_count(), 2);
        assert_eq!(g.edge_weight_between(0, 1), Some(1));
        assert_eq!(g.edge_weight_between(1, 2), Some(1));
        assert_eq!(g.edge_weight_between(0, 2), None);
        g.validate().unwrap();
    }

    #[test]
    fn reads_weighted_with_comments() {
        let input = "% a comment\n3 2 11\n% another\n2 2 5\n1 1 5 3 4\n3 2 4\n";
        let g = parse(input).unwrap();
        assert_eq!(g.node_weight(0), 2);
        assert_eq!(g.node_weight(1), 1);
        assert_eq!(g.node_weight(2), 3);
        assert_eq!(g.edge_weight_between(0, 1), Some(5));
        assert_eq!(g.edge_weight_between(1, 2), Some(4));
        g.validate().unwrap();
    }

    #[test]
    fn reads_edge_weight_only_format() {
        let g = parse("2 1 1\n2 7\n1 7\n").unwrap();
        assert_eq!(g.edge_count(), 1);
        assert_eq!(g.edge_weight_between(0, 1), Some(7));
        assert_eq!(g.node_weight(0), 1);
    }

    #[test]
    fn rejects_asymmetric_adjacency() {
        // Node 2 lists node 1, but node 1 does not list node 2.
        let err = parse("3 2\n2\n1 3\n2 1\n");
        assert!(err.is_err());
    }

    #[test]
    fn rejects_mismatched_reverse_weight() {
        let err = parse("2 1 1\n2 7\n1 8\n");
        assert!(matches!(err.unwrap_err(), Error::Asymmetric { .. }));
    }

    #[test]
    fn rejects_truncated_input() {
        let err = parse("3 2\n2\n1 3\n").unwrap_err();
        assert!(matches!(err, Error::Malformed { .. }));
    }

    #[test]
    fn rejects_non_integer_token() {
        let err = parse("2 1\n2x\n1\n").unwrap_err();
        assert!(matches!(err, Error::Malformed { .. }));
    }

    #[test]
    fn rejects_out_of_range_neighbor() {
        let err = parse("2 1\n3\n1\n").unwrap_err();
        assert!(matches!(err, Error::Malformed { .. }));
    }

    #[test]
    fn rejects_inconsistent_weight_flags() {
        // fmt=1 demands (neighbor, weight) pairs; a lone neighbor is an error.
        let err = parse("2 1 1\n2\n1\n").unwrap_err();
        assert!(matches!(err, Error::Malformed { .. }));
    }

    #[test]
    fn rejects_edge_count_mismatch() {
        let err = parse("3 3\n2\n1 3\n2\n").unwrap_err();
        assert!(matches!(err, Error::Malformed { .. }));
    }

    #[test]
    fn writes_unweighted_path() {
        let g = Graph::build(3, &[(0, 1, 1), (1, 2, 1)], None).unwrap();
        assert_eq!(render(&g), "3 2\n2\n1 3\n2\n");
    }

    #[test]
    fn writes_weighted_single_edge() {
        let g = Graph::build(2, &[(0, 1, 7)], None).unwrap();
        assert_eq!(render(&g), "2 1 1\n2 7\n1 7\n");
    }

    #[test]
    fn writes_edgeless_graph_with_blank_lines() {
        let g = Graph::build(4, &[], None).unwrap();
        assert_eq!(render(&g), "4 0\n\n\n\n\n");
    }

    #[test]
    fn writes_node_weights_when_nontrivial() {
        let g = Graph::build(2, &[(0, 1, 1)], Some(vec![3, 1])).unwrap();
        assert_eq!(render(&g), "2 1 10\n3 2\n1 1\n");
        let back = parse(&render(&g)).unwrap();
        assert_eq!(back, g);
    }

    #[test]
    fn round_trip_identity() {
        let g = Graph::build(
            5,
            &[(0, 1, 3), (0, 2, 1), (1, 2, 2), (2, 3, 9), (3, 4, 1)],
            Some(vec![2, 1, 4, 1, 7]),
        )
        .unwrap();
        let back = parse(&render(&g)).unwrap();
        assert_eq!(back, g);
        // Unweighted graphs round trip through the minimal header too.
        let g2 = Graph::build(4, &[(0, 3, 1), (1, 3, 1)], None).unwrap();
        assert_eq!(parse(&render(&g2)).unwrap(), g2);
    }
}
