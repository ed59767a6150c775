//! Preflib classic SOC/SOI reading and writing.
//!
//! Layout: optional `#` comment lines (ignored anywhere), the
//! alternative count `m`, then `m` lines `index,name` (1-based
//! indices; names may contain commas), a header line
//! `n,sum_of_counts,unique_orders`, and one line per ballot group
//! `count,a1,a2,...`. SOC files carry full-length rankings, SOI files
//! may truncate. Rankings with tie braces `{...}` (TOC/TOI) are not
//! supported.

use crate::error::{Error, Result};
use crate::profile::{Profile, VoteGroup};

/// Parse a Preflib classic SOC or SOI document.
pub fn parse_preflib(text: &str) -> Result<Profile> {
    let mut lines = text
        .lines()
        .enumerate()
        .map(|(i, l)| (i + 1, l.trim()))
        .filter(|(_, l)| !l.is_empty() && !l.starts_with('#'));

    let (line_no, m_line) = lines
        .next()
        .ok_or_else(|| Error::parse(0, "empty document"))?;
    let m: usize = m_line
        .parse()
        .map_err(|_| Error::parse(line_no, format!("expected alternative count, got {m_line:?}")))?;

    let mut alt_names = vec![String::new(); m];
    for expected in 1..=m {
        let (line_no, line) = lines
            .next()
            .ok_or_else(|| Error::parse(0, "unexpected end of file in alternative list"))?;
        let (idx_str, name) = line
            .split_once(',')
            .ok_or_else(|| Error::parse(line_no, "expected `index,name`"))?;
        let idx: usize = idx_str
            .trim()
            .parse()
            .map_err(|_| Error::parse(line_no, format!("bad alternative index {idx_str:?}")))?;
        if idx != expected {
            return Err(Error::parse(
                line_no,
                format!("alternative indices must be 1..=m in order, got {idx}"),
            ));
        }
        alt_names[idx - 1] = name.trim().to_string();
    }

    let (line_no, header) = lines
        .next()
        .ok_or_else(|| Error::parse(0, "missing ballot header line"))?;
    let header_fields: Vec<&str> = header.split(',').collect();
    if header_fields.len() != 3 {
        return Err(Error::parse(line_no, "expected `n,sum_of_counts,unique_orders`"));
    }
    for f in &header_fields {
        f.trim()
            .parse::<u64>()
            .map_err(|_| Error::parse(line_no, format!("bad ballot header field {f:?}")))?;
    }

    let mut votes = Vec::new();
    for (line_no, line) in lines {
        if line.contains('{') || line.contains('}') {
            return Err(Error::Unsupported(format!(
                "line {line_no}: rankings with ties (TOC/TOI braces) are not supported"
            )));
        }
        let mut fields = line.split(',');
        let count_str = fields.next().unwrap();
        let count: u64 = count_str
            .trim()
            .parse()
            .map_err(|_| Error::parse(line_no, format!("bad ballot count {count_str:?}")))?;
        if count == 0 {
            return Err(Error::parse(line_no, "ballot count must be >= 1"));
        }
        let mut ranking = Vec::new();
        let mut seen = vec![false; m];
        for f in fields {
            let a: usize = f
                .trim()
                .parse()
                .map_err(|_| Error::parse(line_no, format!("bad alternative {f:?}")))?;
            if a == 0 || a > m {
                return Err(Error::Validation(format!(
                    "line {line_no}: alternative {a} out of range 1..={m}"
                )));
            }
            if seen[a - 1] {
                return Err(Error::Validation(format!(
                    "line {line_no}: alternative {a} appears twice in one ranking"
                )));
            }
            seen[a - 1] = true;
            ranking.push(a - 1);
        }
        votes.push(VoteGroup { count, ranking });
    }

    Profile::new(m, alt_names, votes)
}

/// Serialize a profile back to the classic format. Parsing the output
/// reproduces the input profile exactly (group order, counts, names).
pub fn serialize_preflib(profile: &Profile) -> String {
    let mut out = String::new();
    out.push_str(&format!("{}\n", profile.m));
    for (i, name) in profile.alt_names.iter().enumerate() {
        out.push_str(&format!("{},{}\n", i + 1, name));
    }
    let n = profile.voter_count();
    out.push_str(&format!("{},{},{}\n", n, n, profile.votes.len()));
    for v in &profile.votes {
        out.push_str(&v.count.to_string());
        for &a in &v.ranking {
            out.push_str(&format!(",{}", a + 1));
        }
        out.push('\n');
    }
    out
}

#[cfg(test)]
mod tests {
    use super::*;

    const SOC: &str = "\
# a comment
3
1,Alice
2,Bob
3,Carol
4,4,2
2,1,2,3
2,2,1,3
";

    #[test]
    fn parses_soc() {
        let p = parse_preflib(SOC).unwrap();
        assert_eq!(p.m, 3);
        assert_eq!(p.alt_names[1], "Bob");
        assert_eq!(p.votes.len(), 2);
        assert_eq!(p.votes[0].count, 2);
        assert_eq!(p.votes[0].ranking, vec![0, 1, 2]);
    }

    #[test]
    fn parses_truncated_soi_ballot() {
        let text = "3\n1,A\n2,B\n3,C\n1,1,1\n1,3\n";
        let p = parse_preflib(text).unwrap();
        assert_eq!(p.votes[0].ranking, vec![2]);
    }

    #[test]
    fn rejects_duplicate_alternative() {
        let text = "3\n1,A\n2,B\n3,C\n1,1,1\n1,2,2,3\n";
        match parse_preflib(text) {
            Err(Error::Validation(msg)) => assert!(msg.contains("twice"), "{msg}"),
            other => panic!("expected validation error, got {other:?}"),
        }
    }

    #[test]
    fn rejects_tie_braces() {
        let text = "3\n1,A\n2,B\n3,C\n1,1,1\n1,{1,2},3\n";
        assert!(matches!(parse_preflib(text), Err(Error::Unsupported(_))));
    }

    #[test]
    fn reports_line_numbers() {
        let text = "3\n1,A\n2,B\n3,C\n1,1,1\n1,zzz\n";
        match parse_preflib(text) {
            Err(Error::Parse { line, .. }) => assert_eq!(line, 6),
            other => panic!("expected parse error, got {other:?}"),
        }
    }

    #[test]
    fn roundtrip_preserves_profile() {
        let p = parse_preflib(SOC).unwrap();
        let q = parse_preflib(&serialize_preflib(&p)).unwrap();
        assert_eq!(p, q);
    }

    #[test]
    fn names_with_commas_roundtrip() {
        let text = "2\n1,Obama, Barack\n2,McCain, John\n1,1,1\n1,1,2\n";
        let p = parse_preflib(text).unwrap();
        assert_eq!(p.alt_names[0], "Obama, Barack");
        let q = parse_preflib(&serialize_preflib(&p)).unwrap();
        assert_eq!(p, q);
    }
}
