//! Text ingestion: edge-list files and Matrix Market coordinate files.

use std::collections::HashSet;
use std::io::BufRead;

use crate::dag::Dag;
use crate::error::{Error, Result};

/// Parses the edge-list format: one `src dst` pair per line, `#` comments.
///
/// Node names are interned in first-appearance order.
pub fn parse_edge_list<R: BufRead>(reader: R) -> Result<Dag> {
    let mut pairs: Vec<(String, String)> = Vec::new();
    let mut seen: HashSet<(String, String)> = HashSet::new();
    for (i, line) in reader.lines().enumerate() {
        let line = line?;
        let lineno = i + 1;
        let text = match line.find('#') {
            Some(pos) => &line[..pos],
            None => &line[..],
        };
        let mut tokens = text.split_whitespace();
        let (src, dst) = match (tokens.next(), tokens.next(), tokens.next()) {
            (None, _, _) => continue,
            (Some(s), Some(d), None) => (s.to_owned(), d.to_owned()),
            _ => {
                return Err(Error::Parse {
                    line: lineno,
                    reason: "expected two whitespace-separated node names".into(),
                })
            }
        };
        if src == dst {
            return Err(Error::Parse {
                line: lineno,
                reason: format!("self-loop on '{src}'"),
            });
        }
        if !seen.insert((src.clone(), dst.clone())) {
            return Err(Error::Parse {
                line: lineno,
                reason: format!("duplicate edge '{src}' -> '{dst}'"),
            });
        }
        pairs.push((src, dst));
    }
    Dag::from_pairs(&pairs)
}

/// Writes a DAG back out in the edge-list format.
pub fn write_edge_list(dag: &Dag) -> String {
    let mut out = String::new();
    for &(u, v) in dag.edges() {
        out.push_str(dag.name(u));
        out.push(' ');
        out.push_str(dag.name(v));
        out.push('\n');
    }
    out
}

/// Parses a Matrix Market coordinate file into the bipartite DAG of `y = Ax`:
/// one source `x{j}` per column, one sink `y{i}` per row, and an edge
/// `x{j} -> y{i}` for every stored nonzero `A[i][j]`.
pub fn parse_matrix_market<R: BufRead>(reader: R) -> Result<Dag> {
    let mut lines = reader.lines().enumerate();

    let (_, header) = lines.next().ok_or(Error::Parse {
        line: 1,
        reason: "empty stream".into(),
    })?;
    let header = header?;
    let fields: Vec<String> = header.split_whitespace().map(str::to_lowercase).collect();
    if fields.len() < 4
        || fields[0] != "%%matrixmarket"
        || fields[1] != "matrix"
        || fields[2] != "coordinate"
    {
        return Err(Error::Parse {
            line: 1,
            reason: "expected '%%MatrixMarket matrix coordinate ...' header".into(),
        });
    }
    let symmetry = fields.last().map(String::as_str).unwrap_or("general");
    let symmetric = match symmetry {
        "general" => false,
        "symmetric" => true,
        other => {
            return Err(Error::Parse {
                line: 1,
                reason: format!("unsupported symmetry '{other}'"),
            })
        }
    };

    // Size line: "nrows ncols nnz", after any % comments.
    let (mut nrows, mut ncols, mut nnz) = (0usize, 0usize, 0usize);
    let mut size_seen = false;
    let mut raw_count = 0usize;
    let mut entries: Vec<(usize, usize)> = Vec::new();
    let mut seen: HashSet<(usize, usize)> = HashSet::new();
    for (i, line) in lines {
        let line = line?;
        let lineno = i + 1;
        let text = line.trim();
        if text.is_empty() || text.starts_with('%') {
            continue;
        }
        let nums: Vec<&str> = text.split_whitespace().collect();
        if !size_seen {
            if nums.len() != 3 {
                return Err(Error::Parse {
                    line: lineno,
                    reason: "expected size line 'rows cols nnz'".into(),
                });
            }
            nrows = parse_num(nums[0], lineno)?;
            ncols = parse_num(nums[1], lineno)?;
            nnz = parse_num(nums[2], lineno)?;
            if symmetric && nrows != ncols {
                return Err(Error::Parse {
                    line: lineno,
                    reason: format!("symmetric matrix must be square, got {nrows}x{ncols}"),
                });
            }
            size_seen = true;
            continue;
        }
        if nums.len() < 2 {
            return Err(Error::Parse {
                line: lineno,
                reason: "expected entry 'row col [value]'".into(),
            });
        }
        let r: usize = parse_num(nums[0], lineno)?;
        let c: usize = parse_num(nums[1], lineno)?;
        if r == 0 || r > nrows || c == 0 || c > ncols {
            return Err(Error::Parse {
                line: lineno,
                reason: format!("entry ({r}, {c}) outside {nrows}x{ncols}"),
            });
        }
        if !seen.insert((r, c)) {
            return Err(Error::Parse {
                line: lineno,
                reason: format!("duplicate entry ({r}, {c})"),
            });
        }
        raw_count += 1;
        entries.push((r, c));
        if symmetric && r != c {
            if !seen.insert((c, r)) {
                return Err(Error::Parse {
                    line: lineno,
                    reason: format!("duplicate entry ({c}, {r})"),
                });
            }
            entries.push((c, r));
        }
    }
    if !size_seen {
        return Err(Error::Parse {
            line: 1,
            reason: "missing size line".into(),
        });
    }
    if raw_count != nnz {
        return Err(Error::Parse {
            line: 1,
            reason: format!("header declares {nnz} entries, found {raw_count}"),
        });
    }

    // Columns first, then rows, so node ids are independent of entry order.
    let mut names: Vec<String> = Vec::with_capacity(ncols + nrows);
    for j in 1..=ncols {
        names.push(format!("x{j}"));
    }
    for i in 1..=nrows {
        names.push(format!("y{i}"));
    }
    let edges: Vec<(usize, usize)> = entries
        .iter()
        .map(|&(r, c)| (c - 1, ncols + r - 1))
        .collect();
    Dag::new(names, edges)
}

fn parse_num(token: &str, line: usize) -> Result<usize> {
    token.parse().map_err(|_| Error::Parse {
        line,
        reason: format!("'{token}' is not a non-negative integer"),
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::dag::NodeRole;

    #[test]
    fn edge_list_basics() {
        let g = parse_edge_list("a c\nb c".as_bytes()).unwrap();
        assert_eq!(g.node_count(), 3);
        assert_eq!(g.edge_count(), 2);

        let empty = parse_edge_list("".as_bytes()).unwrap();
        assert_eq!(empty.node_count(), 0);

        let err = parse_edge_list("a b\nb a".as_bytes()).unwrap_err();
        assert!(matches!(err, Error::Cycle { .. }));
    }

    #[test]
    fn edge_list_comments_and_errors() {
        let g = parse_edge_list("# header\na b # trailing\n\nb c".as_bytes()).unwrap();
        assert_eq!(g.edge_count(), 2);

        match parse_edge_list("a b\nx\n".as_bytes()).unwrap_err() {
            Error::Parse { line, .. } => assert_eq!(line, 2),
            other => panic!("unexpected {other:?}"),
        }
        match parse_edge_list("a a".as_bytes()).unwrap_err() {
            Error::Parse { line, reason } => {
                assert_eq!(line, 1);
                assert!(reason.contains("self-loop"));
            }
            other => panic!("unexpected {other:?}"),
        }
        match parse_edge_list("a b\na b".as_bytes()).unwrap_err() {
            Error::Parse { line, reason } => {
                assert_eq!(line, 2);
                assert!(reason.contains("duplicate"));
            }
            other => panic!("unexpected {other:?}"),
        }
    }

    #[test]
    fn round_trip_edge_list() {
        let text = "a c\nb c\nb d\n";
        let g = parse_edge_list(text.as_bytes()).unwrap();
        assert_eq!(write_edge_list(&g), text);
    }

    #[test]
    fn matrix_market_example() {
        // The 2x4 pattern with rows {1:{1,2,3}, 2:{3,4}}.
        let text = "%%MatrixMarket matrix coordinate pattern general\n\
                    2 4 5\n1 1\n1 2\n1 3\n2 3\n2 4\n";
        let g = parse_matrix_market(text.as_bytes()).unwrap();
        assert_eq!(g.node_count(), 6);
        assert_eq!(g.edge_count(), 5);
        let x3 = g.node_by_name("x3").unwrap();
        assert_eq!(g.out_degree(x3), 2);
        assert!(g.is_one_level());
    }

    #[test]
    fn matrix_market_single_and_identity() {
        let text = "%%MatrixMarket matrix coordinate real general\n1 1 1\n1 1 2.5\n";
        let g = parse_matrix_market(text.as_bytes()).unwrap();
        assert_eq!(g.node_count(), 2);
        assert_eq!(g.edge_count(), 1);

        let text = "%%MatrixMarket matrix coordinate pattern general\n3 3 3\n1 1\n2 2\n3 3\n";
        let g = parse_matrix_market(text.as_bytes()).unwrap();
        assert_eq!(g.edge_count(), 3);
        for v in g.node_ids() {
            let deg = g.in_degree(v) + g.out_degree(v);
            assert_eq!(deg, 1);
        }
    }

    #[test]
    fn matrix_market_errors() {
        assert!(parse_matrix_market("%%MatrixMarket vector\n".as_bytes()).is_err());
        let bad_index = "%%MatrixMarket matrix coordinate pattern general\n2 2 1\n3 1\n";
        assert!(parse_matrix_market(bad_index.as_bytes()).is_err());
        let dup = "%%MatrixMarket matrix coordinate pattern general\n2 2 2\n1 1\n1 1\n";
        assert!(parse_matrix_market(dup.as_bytes()).is_err());
        let rect_sym = "%%MatrixMarket matrix coordinate pattern symmetric\n2 4 1\n1 1\n";
        assert!(parse_matrix_market(rect_sym.as_bytes()).is_err());
    }

    #[test]
    fn matrix_market_symmetric_expansion() {
        let text =
            "%%MatrixMarket matrix coordinate real symmetric\n3 3 3\n1 1 2.0\n2 1 1.0\n3 2 1.0\n";
        let g = parse_matrix_market(text.as_bytes()).unwrap();
        // Diagonal entry stays single; off-diagonal entries mirror.
        assert_eq!(g.edge_count(), 5);
    }

    #[test]
    fn matrix_market_empty_column_is_source() {
        let text = "%%MatrixMarket matrix coordinate pattern general\n1 2 1\n1 1\n";
        let g = parse_matrix_market(text.as_bytes()).unwrap();
        let x2 = g.node_by_name("x2").unwrap();
        assert_eq!(g.role(x2), NodeRole::Source);
    }
}
