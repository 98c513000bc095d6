//! Cached downloads from the SuiteSparse Matrix Collection.
//!
//! Archives are fetched from `{base}/MM/{group}/{name}.tar.gz`, the
//! `{name}/{name}.mtx` member is extracted and written atomically to
//! `cache_dir/{group}/{name}.mtx`. Once a file is cached, later calls never
//! touch the network.

use std::fs;
use std::io::{Read, Write};
use std::path::{Path, PathBuf};
use std::thread;
use std::time::Duration;

use flate2::read::GzDecoder;
use log::{debug, info, warn};
use mmf_core::dataio::{parse_matrix_market, MatrixMetadata};
use mmf_core::{MmfError, SquareMatrix};
use thiserror::Error;

pub const DEFAULT_BASE_URL: &str = "https://sparse.tamu.edu";
pub const DEFAULT_ATTEMPTS: u32 = 3;
/// Delay before the second attempt; doubled for each later one.
pub const DEFAULT_BACKOFF: Duration = Duration::from_millis(500);
const MAX_ARCHIVE_BYTES: u64 = 1 << 30;

#[derive(Debug, Error)]
pub enum FetchError {
    #[error("{group}/{name} does not exist in the collection")]
    NotFound { group: String, name: String },

    #[error("invalid matrix identifier '{0}'")]
    InvalidName(String),

    #[error("download of {url} failed after {attempts} attempts: {msg}")]
    Http { url: String, attempts: u32, msg: String },

    #[error("corrupt archive: {0}")]
    Archive(String),

    #[error("cache I/O: {0}")]
    Io(#[from] std::io::Error),

    #[error(transparent)]
    Matrix(#[from] MmfError),
}

/// Failure of a single GET.
#[derive(Debug, Clone, PartialEq, Eq)]
pub enum TransportError {
    Status(u16),
    Other(String),
}

/// Minimal blocking HTTP GET.
pub trait Transport: Send + Sync {
    fn get(&self, url: &str) -> Result<Vec<u8>, TransportError>;
}

pub struct HttpTransport {
    agent: ureq::Agent,
}

impl HttpTransport {
    pub fn new(timeout: Duration) -> Self {
        let agent = ureq::Agent::config_builder()
            .timeout_global(Some(timeout))
            .build()
            .into();
        Self { agent }
    }
}

impl Default for HttpTransport {
    fn default() -> Self {
        Self::new(Duration::from_secs(300))
    }
}

impl Transport for HttpTransport {
    fn get(&self, url: &str) -> Result<Vec<u8>, TransportError> {
        match self.agent.get(url).call() {
            Ok(mut resp) => resp
                .body_mut()
                .with_config()
                .limit(MAX_ARCHIVE_BYTES)
                .read_to_vec()
                .map_err(|e| TransportError::Other(e.to_string())),
            Err(ureq::Error::StatusCode(code)) => Err(TransportError::Status(code)),
            Err(e) => Err(TransportError::Other(e.to_string())),
        }
    }
}

fn valid_part(s: &str) -> bool {
    !s.is_empty() && s != "." && s != ".." && s.chars().all(|c| c.is_ascii_alphanumeric() || "_-.+".contains(c))
}

/// Returns the bytes of `{name}.mtx` inside a `.tar.gz` archive.
pub fn extract_mtx(archive: &[u8], name: &str) -> Result<Vec<u8>, FetchError> {
    let want = format!("{name}.mtx");
    let mut tar = tar::Archive::new(GzDecoder::new(archive));
    let entries = tar.entries().map_err(|e| FetchError::Archive(e.to_string()))?;
    for entry in entries {
        let mut entry = entry.map_err(|e| FetchError::Archive(e.to_string()))?;
        let path = entry.path().map_err(|e| FetchError::Archive(e.to_string()))?;
        if path.file_name().is_some_and(|f| f == want.as_str()) {
            let mut out = Vec::new();
            entry
                .read_to_end(&mut out)
                .map_err(|e| FetchError::Archive(e.to_string()))?;
            return Ok(out);
        }
    }
    Err(FetchError::Archive(format!("no {want} member")))
}

pub struct Fetcher<T: Transport = HttpTransport> {
    transport: T,
    cache_dir: PathBuf,
    base_url: String,
    attempts: u32,
    backoff: Duration,
}

impl Fetcher<HttpTransport> {
    pub fn http(cache_dir: impl Into<PathBuf>) -> Self {
        Self::new(HttpTransport::default(), cache_dir)
    }
}

impl<T: Transport> Fetcher<T> {
    pub fn new(transport: T, cache_dir: impl Into<PathBuf>) -> Self {
        Self {
            transport,
            cache_dir: cache_dir.into(),
            base_url: DEFAULT_BASE_URL.to_string(),
            attempts: DEFAULT_ATTEMPTS,
            backoff: DEFAULT_BACKOFF,
        }
    }

    pub fn base_url(mut self, url: impl Into<String>) -> Self {
        self.base_url = url.into().trim_end_matches('/').to_string();
        self
    }

    pub fn backoff(mut self, first_delay: Duration) -> Self {
        self.backoff = first_delay;
        self
    }

    pub fn attempts(mut self, attempts: u32) -> Self {
        self.attempts = attempts.max(1);
        self
    }

    pub fn transport(&self) -> &T {
        &self.transport
    }

    pub fn archive_url(&self, group: &str, name: &str) -> String {
        format!("{}/MM/{group}/{name}.tar.gz", self.base_url)
    }

    pub fn cache_path(&self, group: &str, name: &str) -> PathBuf {
        self.cache_dir.join(group).join(format!("{name}.mtx"))
    }

    fn download(&self, group: &str, name: &str) -> Result<Vec<u8>, FetchError> {
        let url = self.archive_url(group, name);
        let mut delay = self.backoff;
        let mut last = String::new();
        for attempt in 1..=self.attempts {
            debug!("GET {url} (attempt {attempt})");
            match self.transport.get(&url) {
                Ok(bytes) => return Ok(bytes),
                Err(TransportError::Status(404)) => {
                    return Err(FetchError::NotFound {
                        group: group.into(),
                        name: name.into(),
                    })
                }
                Err(TransportError::Status(code)) => last = format!("HTTP status {code}"),
                Err(TransportError::Other(msg)) => last = msg,
            }
            if attempt < self.attempts {
                warn!("{url}: {last}; retrying in {delay:?}");
                thread::sleep(delay);
                delay *= 2;
            }
        }
        Err(FetchError::Http {
            url,
            attempts: self.attempts,
            msg: last,
        })
    }

    fn store(&self, path: &Path, bytes: &[u8]) -> Result<(), FetchError> {
        let dir = path.parent().expect("cache path has a parent");
        fs::create_dir_all(dir)?;
        let mut tmp = tempfile::NamedTempFile::new_in(dir)?;
        tmp.write_all(bytes)?;
        tmp.as_file().sync_all()?;
        tmp.persist(path).map_err(|e| FetchError::Io(e.error))?;
        Ok(())
    }

    /// Raw `.mtx` bytes, from the cache when present.
    pub fn fetch_bytes(&self, group: &str, name: &str) -> Result<Vec<u8>, FetchError> {
        if !valid_part(group) || !valid_part(name) {
            return Err(FetchError::InvalidName(format!("{group}/{name}")));
        }
        let path = self.cache_path(group, name);
        if path.is_file() {
            debug!("cache hit {}", path.display());
            return Ok(fs::read(&path)?);
        }
        info!("downloading {group}/{name}");
        let archive = self.download(group, name)?;
        let mtx = extract_mtx(&archive, name)?;
        // reject anything unparseable before it reaches the cache
        parse_matrix_market(&mtx)?;
        self.store(&path, &mtx)?;
        Ok(mtx)
    }

    pub fn fetch(&self, group: &str, name: &str) -> Result<(SquareMatrix, MatrixMetadata), FetchError> {
        let bytes = self.fetch_bytes(group, name)?;
        let (a, mut meta) = parse_matrix_market(&bytes)?;
        if meta.name.is_empty() {
            meta.name = name.to_string();
        }
        if meta.group.is_empty() {
            meta.group = group.to_string();
        }
        Ok((a, meta))
    }
}

/// Fetches `group/name` over HTTPS through the cache at `cache_dir`.
pub fn fetch_suitesparse(
    group: &str,
    name: &str,
    cache_dir: impl Into<PathBuf>,
) -> Result<(SquareMatrix, MatrixMetadata), FetchError> {
    Fetcher::http(cache_dir).fetch(group, name)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn names_are_checked() {
        assert!(valid_part("west0479"));
        assert!(valid_part("HB"));
        assert!(!valid_part(".."));
        assert!(!valid_part("a/b"));
        assert!(!valid_part(""));
    }

    #[test]
    fn url_scheme() {
        let f = Fetcher::http("/tmp/x").base_url("https://example.org/");
        assert_eq!(
            f.archive_url("HB", "west0479"),
            "https://example.org/MM/HB/west0479.tar.gz"
        );
        assert_eq!(f.cache_path("HB", "west0479"), PathBuf::from("/tmp/x/HB/west0479.mtx"));
    }
}
