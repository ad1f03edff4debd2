//! The evaluators recurse on the structure of terms and recurrences, so
//! deep programs need more stack than a default thread has.

use std::thread;

pub const BIG_STACK: usize = 1 << 30;

/// Runs `f` on a thread with a large stack and returns its result,
/// re-raising any panic.
pub fn with_big_stack<T: Send + 'static>(f: impl FnOnce() -> T + Send + 'static) -> T {
    let handle = thread::Builder::new()
        .stack_size(BIG_STACK)
        .spawn(f)
        .expect("spawn evaluation thread");
    match handle.join() {
        Ok(v) => v,
        Err(panic) => std::panic::resume_unwind(panic),
    }
}
