use std::io::Write;

/// Thin wrapper over `csv::Writer` for numeric tables.
pub(crate) struct Table<W: Write> {
    inner: csv::Writer<W>,
}

impl<W: Write> Table<W> {
    pub(crate) fn new(sink: W, header: &[&str]) -> csv::Result<Self> {
        let mut inner = csv::Writer::from_writer(sink);
        inner.write_record(header)?;
        Ok(Table { inner })
    }

    pub(crate) fn row<I, S>(&mut self, fields: I) -> csv::Result<()>
    where
        I: IntoIterator<Item = S>,
        S: AsRef<[u8]>,
    {
        self.inner.write_record(fields)
    }

    pub(crate) fn finish(mut self) -> std::io::Result<()> {
        self.inner.flush()
    }
}

/// Shortest round-trip formatting, so equal inputs produce equal bytes.
pub(crate) fn num(v: f64) -> String {
    format!("{v}")
}
