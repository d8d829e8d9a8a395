use std::io::{BufRead, Write};

use super::KmerError;

/// One FASTA record. The sequence is stored exactly as read, with line
/// breaks removed.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct FastaRecord {
    pub header: String,
    pub seq: Vec<u8>,
}

/// Parses multi-record FASTA with wrapped or unwrapped sequence lines.
///
/// Sequence content before the first header is accepted as an anonymous
/// record so that bare sequence files can be counted too. Blank lines are
/// ignored and `\r` is stripped.
pub fn parse_fasta<R: BufRead>(reader: R) -> Result<Vec<FastaRecord>, KmerError> {
    let mut records: Vec<FastaRecord> = Vec::new();
    for line in reader.split(b'\n') {
        let mut line = line?;
        if line.last() == Some(&b'\r') {
            line.pop();
        }
        if let Some(header) = line.strip_prefix(b">") {
            records.push(FastaRecord {
                header: String::from_utf8_lossy(header).trim().to_string(),
                seq: Vec::new(),
            });
        } else {
            let trimmed = line.trim_ascii();
            if trimmed.is_empty() {
                continue;
            }
            if records.is_empty() {
                records.push(FastaRecord {
                    header: String::new(),
                    seq: Vec::new(),
                });
            }
            records.last_mut().unwrap().seq.extend_from_slice(trimmed);
        }
    }
    Ok(records)
}

/// Writes records unwrapped, one sequence line per record.
pub fn write_fasta<W: Write>(mut out: W, records: &[FastaRecord]) -> std::io::Result<()> {
    for r in records {
        out.write_all(b">")?;
        out.write_all(r.header.as_bytes())?;
        out.write_all(b"\n")?;
        out.write_all(&r.seq)?;
        out.write_all(b"\n")?;
    }
    Ok(())
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn wrapped_multi_record() {
        let text = b">r1 desc\nACGT\nacgt\r\n\n>r2\nNNAC\n";
        let recs = parse_fasta(&text[..]).unwrap();
        assert_eq!(recs.len(), 2);
        assert_eq!(recs[0].header, "r1 desc");
        assert_eq!(recs[0].seq, b"ACGTacgt");
        assert_eq!(recs[1].seq, b"NNAC");
    }

    #[test]
    fn headerless_and_empty() {
        assert_eq!(parse_fasta(&b"ACGT\n"[..]).unwrap()[0].seq, b"ACGT");
        assert!(parse_fasta(&b""[..]).unwrap().is_empty());
        let recs = parse_fasta(&b">empty\n"[..]).unwrap();
        assert_eq!(recs.len(), 1);
        assert!(recs[0].seq.is_empty());
    }

    #[test]
    fn write_then_parse() {
        let recs = vec![
            FastaRecord {
                header: "0".into(),
                seq: b"ACG".to_vec(),
            },
            FastaRecord {
                header: "1".into(),
                seq: b"TTT".to_vec(),
            },
        ];
        let mut buf = Vec::new();
        write_fasta(&mut buf, &recs).unwrap();
        assert_eq!(buf, b">0\nACG\n>1\nTTT\n");
        assert_eq!(parse_fasta(&buf[..]).unwrap(), recs);
    }
}
