//! Scores, integer orders and the tabular result format shared by every
//! ranking method.

use std::io;

use serde::{Deserialize, Serialize};

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct RankEntry {
    pub id: String,
    pub score: f64,
    /// 1 is best. Tied scores share the smaller order.
    pub order: usize,
    #[serde(default)]
    pub tied: bool,
}

/// Per-item scores and orders, kept in the input item order.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct RankingResult {
    pub method: String,
    pub entries: Vec<RankEntry>,
}

impl RankingResult {
    /// Orders items by descending score. Equal scores share the smallest
    /// order of their group (1, 1, 3, ...).
    pub fn from_scores(method: impl Into<String>, ids: &[String], scores: &[f64]) -> Self {
        assert_eq!(ids.len(), scores.len());
        let n = scores.len();
        let mut idx: Vec<usize> = (0..n).collect();
        idx.sort_by(|&a, &b| scores[b].total_cmp(&scores[a]).then(a.cmp(&b)));
        let mut order = vec![0; n];
        let mut tied = vec![false; n];
        let mut pos = 0;
        while pos < n {
            let mut end = pos + 1;
            while end < n && scores[idx[end]] == scores[idx[pos]] {
                end += 1;
            }
            for &i in &idx[pos..end] {
                order[i] = pos + 1;
                tied[i] = end - pos > 1;
            }
            pos = end;
        }
        let entries = (0..n)
            .map(|i| RankEntry {
                id: ids[i].clone(),
                score: scores[i],
                order: order[i],
                tied: tied[i],
            })
            .collect();
        Self {
            method: method.into(),
            entries,
        }
    }

    pub fn len(&self) -> usize {
        self.entries.len()
    }

    pub fn is_empty(&self) -> bool {
        self.entries.is_empty()
    }

    pub fn has_ties(&self) -> bool {
        self.entries.iter().any(|e| e.tied)
    }

    pub fn scores(&self) -> Vec<f64> {
        self.entries.iter().map(|e| e.score).collect()
    }

    pub fn orders(&self) -> Vec<usize> {
        self.entries.iter().map(|e| e.order).collect()
    }

    pub fn get(&self, id: &str) -> Option<&RankEntry> {
        self.entries.iter().find(|e| e.id == id)
    }

    /// Entries from best to worst; ties keep input order.
    pub fn sorted(&self) -> Vec<&RankEntry> {
        let mut v: Vec<&RankEntry> = self.entries.iter().collect();
        v.sort_by_key(|e| e.order);
        v
    }

    /// Ids of the best `k` items.
    pub fn top(&self, k: usize) -> Vec<&str> {
        self.sorted()
            .into_iter()
            .take(k)
            .map(|e| e.id.as_str())
            .collect()
    }

    /// Writes `id,score,order` rows, best first.
    pub fn write_csv<W: io::Write>(&self, w: W) -> Result<(), csv::Error> {
        let mut wtr = csv::Writer::from_writer(w);
        wtr.write_record(["id", "score", "order"])?;
        for e in self.sorted() {
            wtr.write_record([e.id.clone(), e.score.to_string(), e.order.to_string()])?;
        }
        wtr.flush()?;
        Ok(())
    }

    /// Reads the CSV written by [`write_csv`](Self::write_csv). Tie flags are
    /// recomputed from shared orders.
    pub fn read_csv<R: io::Read>(method: impl Into<String>, r: R) -> Result<Self, csv::Error> {
        #[derive(Deserialize)]
        struct Row {
            id: String,
            score: f64,
            order: usize,
        }
        let mut entries = Vec::new();
        for row in csv::Reader::from_reader(r).deserialize() {
            let row: Row = row?;
            entries.push(RankEntry {
                id: row.id,
                score: row.score,
                order: row.order,
                tied: false,
            });
        }
        let orders: Vec<usize> = entries.iter().map(|e| e.order).collect();
        for e in entries.iter_mut() {
            e.tied = orders.iter().filter(|&&o| o == e.order).count() > 1;
        }
        Ok(Self {
            method: method.into(),
            entries,
        })
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn ids(n: usize) -> Vec<String> {
        (0..n).map(|i| format!("i{i}")).collect()
    }

    #[test]
    fn descending_orders() {
        let r = RankingResult::from_scores("m", &ids(4), &[0.2, 0.9, 0.5, 0.1]);
        assert_eq!(r.orders(), vec![3, 1, 2, 4]);
        assert!(!r.has_ties());
        assert_eq!(r.top(2), vec!["i1", "i2"]);
    }

    #[test]
    fn ties_share_smaller_order() {
        let r = RankingResult::from_scores("m", &ids(5), &[0.5, 0.7, 0.5, 0.5, 0.1]);
        assert_eq!(r.orders(), vec![2, 1, 2, 2, 5]);
        assert!(r.entries[0].tied && !r.entries[1].tied);
        let all = RankingResult::from_scores("m", &ids(3), &[0.4; 3]);
        assert_eq!(all.orders(), vec![1, 1, 1]);
        assert!(all.has_ties());
    }

    #[test]
    fn csv_round_trip() {
        let r = RankingResult::from_scores("rpc", &ids(4), &[0.25, 1.0, 0.25, 0.0]);
        let mut buf = Vec::new();
        r.write_csv(&mut buf).unwrap();
        let text = String::from_utf8(buf.clone()).unwrap();
        assert!(text.starts_with("id,score,order\ni1,1,1\n"));
        let back = RankingResult::read_csv("rpc", buf.as_slice()).unwrap();
        let mut expect: Vec<_> = r.sorted().into_iter().cloned().collect();
        expect.sort_by_key(|e| e.order);
        assert_eq!(back.entries, expect);
    }
}
