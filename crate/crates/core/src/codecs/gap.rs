use super::CodecError;

/// A non-decreasing list stored as its first value plus successive
/// differences.
#[derive(Debug, Clone, PartialEq, Eq, Default)]
pub struct GapFile {
    pub offset: u64,
    pub gaps: Vec<u64>,
}

impl GapFile {
    /// `[offset, gaps...]`, or empty for an empty source list.
    pub fn to_stream(&self, n: usize) -> Vec<u64> {
        if n == 0 {
            return Vec::new();
        }
        let mut v = Vec::with_capacity(n);
        v.push(self.offset);
        v.extend_from_slice(&self.gaps);
        v
    }

    pub fn from_stream(stream: &[u64]) -> GapFile {
        match stream.split_first() {
            Some((&offset, gaps)) => GapFile {
                offset,
                gaps: gaps.to_vec(),
            },
            None => GapFile::default(),
        }
    }
}

pub fn gap_encode(sorted_values: &[u64]) -> Result<GapFile, CodecError> {
    let Some(&offset) = sorted_values.first() else {
        return Ok(GapFile::default());
    };
    let mut gaps = Vec::with_capacity(sorted_values.len() - 1);
    for (i, w) in sorted_values.windows(2).enumerate() {
        if w[1] < w[0] {
            return Err(CodecError::Decreasing { index: i + 1 });
        }
        gaps.push(w[1] - w[0]);
    }
    Ok(GapFile { offset, gaps })
}

pub fn gap_decode(g: &GapFile, n: usize) -> Result<Vec<u64>, CodecError> {
    if n == 0 {
        return Ok(Vec::new());
    }
    if g.gaps.len() + 1 != n {
        return Err(CodecError::Corrupt(format!(
            "gap file holds {} values, expected {n}",
            g.gaps.len() + 1
        )));
    }
    let mut out = Vec::with_capacity(n);
    let mut cur = g.offset;
    out.push(cur);
    for &gap in &g.gaps {
        cur = cur
            .checked_add(gap)
            .ok_or_else(|| CodecError::Corrupt("gap sum overflows".into()))?;
        out.push(cur);
    }
    Ok(out)
}
