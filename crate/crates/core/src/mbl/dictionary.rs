use std::collections::HashMap;

use super::schema::FeatureValue;

/// Interns the values of one feature as dense codes.
#[derive(Debug, Clone, Default)]
pub(crate) struct ValueDictionary {
    codes: HashMap<FeatureValue, u32>,
    values: Vec<FeatureValue>,
}

impl ValueDictionary {
    pub fn intern(&mut self, value: &FeatureValue) -> u32 {
        if let Some(&code) = self.codes.get(value) {
            return code;
        }
        let code = self.values.len() as u32;
        self.codes.insert(value.clone(), code);
        self.values.push(value.clone());
        code
    }

    pub fn code(&self, value: &FeatureValue) -> Option<u32> {
        self.codes.get(value).copied()
    }

    pub fn value(&self, code: u32) -> &FeatureValue {
        &self.values[code as usize]
    }
}

/// Interns each instance row column by column; returns the per-feature
/// dictionaries and the coded rows.
pub(crate) fn encode_rows<'a, I>(
    n_features: usize,
    rows: I,
) -> (Vec<ValueDictionary>, Vec<Vec<u32>>)
where
    I: IntoIterator<Item = &'a [FeatureValue]>,
{
    let mut dicts = vec![ValueDictionary::default(); n_features];
    let coded = rows
        .into_iter()
        .map(|values| {
            values
                .iter()
                .zip(dicts.iter_mut())
                .map(|(v, d)| d.intern(v))
                .collect()
        })
        .collect();
    (dicts, coded)
}
