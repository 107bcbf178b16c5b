use serde_json::{Map, Value};

/// Ordered result fields, printed as `key=value` lines or as one JSON object.
#[derive(Default)]
pub struct Output {
    fields: Vec<(String, Value)>,
}

impl Output {
    pub fn new() -> Self {
        Self::default()
    }

    pub fn set(&mut self, key: &str, v: impl Into<Value>) -> &mut Self {
        self.fields.push((key.to_string(), v.into()));
        self
    }

    /// A certificate block: one line per entry.
    pub fn block(&mut self, key: &str, lines: Vec<String>) -> &mut Self {
        self.set(key, Value::Array(lines.into_iter().map(Value::String).collect()))
    }

    /// A list of records, one line each in text mode.
    pub fn records(&mut self, key: &str, rows: Vec<Map<String, Value>>) -> &mut Self {
        self.set(key, Value::Array(rows.into_iter().map(Value::Object).collect()))
    }

    pub fn render(&self, json: bool) -> String {
        if json {
            let map: Map<String, Value> = self.fields.iter().cloned().collect();
            return serde_json::to_string_pretty(&Value::Object(map)).expect("serializable") + "\n";
        }
        let mut s = String::new();
        for (k, v) in &self.fields {
            match v {
                Value::Array(items) if items.iter().all(Value::is_object) && !items.is_empty() => {
                    for item in items {
                        let Value::Object(o) = item else { unreachable!() };
                        let parts: Vec<String> = o.iter().map(|(k, v)| format!("{k}={}", scalar(v))).collect();
                        s.push_str(&format!("{k} {}\n", parts.join(" ")));
                    }
                }
                Value::Array(items) => {
                    s.push_str(&format!("{k}:\n"));
                    for item in items {
                        match item {
                            Value::String(line) => s.push_str(&format!("  {line}\n")),
                            other => s.push_str(&format!("  {other}\n")),
                        }
                    }
                }
                other => s.push_str(&format!("{k}={}\n", scalar(other))),
            }
        }
        s
    }
}

fn scalar(v: &Value) -> String {
    match v {
        Value::String(s) if s.is_empty() || s.chars().any(|c| c.is_whitespace() || c == '"') => {
            format!("{:?}", s)
        }
        Value::String(s) => s.clone(),
        other => other.to_string(),
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn text_and_json() {
        let mut o = Output::new();
        o.set("tau", 5).set("note", "two words").block("cover", vec!["set 0 1".into()]);
        assert_eq!(o.render(false), "tau=5\nnote=\"two words\"\ncover:\n  set 0 1\n");
        let v: Value = serde_json::from_str(&o.render(true)).unwrap();
        assert_eq!(v["tau"], 5);
        assert_eq!(v["cover"][0], "set 0 1");
    }
}
