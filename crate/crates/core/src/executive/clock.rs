use std::fmt;
use std::sync::atomic::{AtomicU64, Ordering};
use std::sync::OnceLock;
use std::time::Instant;

/// Monotonic milliseconds since the session started.
pub trait Clock: Send + Sync + fmt::Debug {
    fn now_ms(&self) -> u64;
}

#[derive(Debug)]
pub struct SystemClock {
    start: Instant,
}

impl SystemClock {
    pub fn new() -> Self {
        SystemClock { start: Instant::now() }
    }
}

impl Default for SystemClock {
    fn default() -> Self {
        Self::new()
    }
}

impl Clock for SystemClock {
    fn now_ms(&self) -> u64 {
        self.start.elapsed().as_millis() as u64
    }
}

/// Time moves only when told to, until `run_free` hands it over to the
/// system clock. Used by the simulator, replay and crash recovery.
#[derive(Debug, Default)]
pub struct ManualClock {
    now: AtomicU64,
    free: OnceLock<(Instant, u64)>,
}

impl ManualClock {
    pub fn new(start: u64) -> Self {
        ManualClock {
            now: AtomicU64::new(start),
            free: OnceLock::new(),
        }
    }

    /// From now on, time advances in real time from the current value.
    pub fn run_free(&self) {
        let _ = self.free.set((Instant::now(), self.now.load(Ordering::SeqCst)));
    }

    pub fn set(&self, ms: u64) {
        self.now.store(ms, Ordering::SeqCst);
    }

    pub fn advance(&self, ms: u64) -> u64 {
        self.now.fetch_add(ms, Ordering::SeqCst) + ms
    }
}

impl Clock for ManualClock {
    fn now_ms(&self) -> u64 {
        match self.free.get() {
            Some((at, base)) => base + at.elapsed().as_millis() as u64,
            None => self.now.load(Ordering::SeqCst),
        }
    }
}
