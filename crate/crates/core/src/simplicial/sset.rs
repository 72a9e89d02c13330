//! Simplicial sets truncated at a fixed level.

/// Levels `0..=D` with face and degeneracy tables.
///
/// `faces[n][i]` maps level `n` to `n - 1` (empty for `n = 0`);
/// `degens[n][i]` maps level `n` to `n + 1` (empty for `n = D`).
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct TruncSSet {
    pub labels: Vec<Vec<String>>,
    pub faces: Vec<Vec<Vec<usize>>>,
    pub degens: Vec<Vec<Vec<usize>>>,
}

/// Monotone sequences of length `k + 1` in `0..=n`, lexicographically.
pub fn monotone_sequences(n: usize, k: usize) -> Vec<Vec<usize>> {
    let mut out = Vec::new();
    let mut cur = Vec::with_capacity(k + 1);
    fn go(n: usize, len: usize, cur: &mut Vec<usize>, out: &mut Vec<Vec<usize>>) {
        if cur.len() == len {
            out.push(cur.clone());
            return;
        }
        let start = cur.last().copied().unwrap_or(0);
        for v in start..=n {
            cur.push(v);
            go(n, len, cur, out);
            cur.pop();
        }
    }
    go(n, k + 1, &mut cur, &mut out);
    out
}

impl TruncSSet {
    pub fn truncation(&self) -> usize {
        self.labels.len() - 1
    }

    pub fn size(&self, k: usize) -> usize {
        self.labels[k].len()
    }

    /// `Δ[n]` up to level `d`.
    pub fn delta(n: usize, d: usize) -> Self {
        let seqs: Vec<Vec<Vec<usize>>> = (0..=d).map(|k| monotone_sequences(n, k)).collect();
        let find = |k: usize, s: &[usize]| seqs[k].iter().position(|t| t == s).expect("monotone");
        let faces = (0..=d)
            .map(|k| {
                if k == 0 {
                    return Vec::new();
                }
                (0..=k)
                    .map(|i| {
                        seqs[k]
                            .iter()
                            .map(|s| {
                                let mut t = s.clone();
                                t.remove(i);
                                find(k - 1, &t)
                            })
                            .collect()
                    })
                    .collect()
            })
            .collect();
        let degens = (0..=d)
            .map(|k| {
                if k == d {
                    return Vec::new();
                }
                (0..=k)
                    .map(|i| {
                        seqs[k]
                            .iter()
                            .map(|s| {
                                let mut t = s.clone();
                                t.insert(i, s[i]);
                                find(k + 1, &t)
                            })
                            .collect()
                    })
                    .collect()
            })
            .collect();
        let labels = seqs
            .iter()
            .map(|ss| ss.iter().map(|s| s.iter().map(|v| v.to_string()).collect::<String>()).collect())
            .collect();
        TruncSSet { labels, faces, degens }
    }

    /// The constant simplicial set on `labels`.
    pub fn constant(labels: Vec<String>, d: usize) -> Self {
        let id: Vec<usize> = (0..labels.len()).collect();
        TruncSSet {
            labels: vec![labels; d + 1],
            faces: (0..=d).map(|k| if k == 0 { Vec::new() } else { vec![id.clone(); k + 1] }).collect(),
            degens: (0..=d).map(|k| if k == d { Vec::new() } else { vec![id.clone(); k + 1] }).collect(),
        }
    }

    /// The first simplicial identity that fails, if any.
    pub fn check_identities(&self) -> Result<(), String> {
        check_identities_with(
            self.truncation(),
            |k| self.size(k),
            |k, i, a| self.faces[k][i][a],
            |k, i, a| self.degens[k][i][a],
        )
    }
}

/// Checks the simplicial identities for face and degeneracy functions given
/// by closures, wherever every map involved exists below the truncation.
pub(crate) fn check_identities_with(
    d: usize,
    size: impl Fn(usize) -> usize,
    face: impl Fn(usize, usize, usize) -> usize,
    degen: impl Fn(usize, usize, usize) -> usize,
) -> Result<(), String> {
    for k in 0..=d {
        for a in 0..size(k) {
            if k >= 2 {
                for j in 1..=k {
                    for i in 0..j {
                        if face(k - 1, i, face(k, j, a)) != face(k - 1, j - 1, face(k, i, a)) {
                            return Err(format!("d{i} d{j} = d{} d{i} at level {k}", j - 1));
                        }
                    }
                }
            }
            if k + 2 <= d {
                for j in 0..=k {
                    for i in 0..=j {
                        if degen(k + 1, i, degen(k, j, a)) != degen(k + 1, j + 1, degen(k, i, a)) {
                            return Err(format!("s{i} s{j} = s{} s{i} at level {k}", j + 1));
                        }
                    }
                }
            }
            if k < d {
                for j in 0..=k {
                    let up = degen(k, j, a);
                    for i in 0..=k + 1 {
                        let lhs = face(k + 1, i, up);
                        let ok = if i == j || i == j + 1 {
                            lhs == a
                        } else if i < j {
                            k >= 1 && lhs == degen(k - 1, j - 1, face(k, i, a))
                        } else {
                            k >= 1 && lhs == degen(k - 1, j, face(k, i - 1, a))
                        };
                        if !ok {
                            return Err(format!("d{i} s{j} at level {k}"));
                        }
                    }
                }
            }
        }
    }
    Ok(())
}
