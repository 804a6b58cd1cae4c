//! Ordered parallel map over replicas and grid points.

use std::sync::atomic::{AtomicUsize, Ordering};
use std::sync::mpsc;
use std::thread;

/// Applies `f` to every item, on up to `threads` workers, and returns the
/// results in input order. With one thread this is a plain sequential map;
/// with more, work is handed out by a shared counter and results are
/// reassembled by index, so the output never depends on the thread count.
pub fn ordered_map<T, R, F>(items: &[T], threads: usize, f: F) -> Vec<R>
where
    T: Sync,
    R: Send,
    F: Fn(&T) -> R + Sync,
{
    let n = items.len();
    if threads <= 1 || n <= 1 {
        return items.iter().map(&f).collect();
    }
    let next = AtomicUsize::new(0);
    let (tx, rx) = mpsc::channel::<(usize, R)>();
    thread::scope(|scope| {
        for _ in 0..threads.min(n) {
            let tx = tx.clone();
            let next = &next;
            let f = &f;
            scope.spawn(move || loop {
                let i = next.fetch_add(1, Ordering::Relaxed);
                if i >= n {
                    break;
                }
                // The receiver outlives the scope, so a send cannot fail.
                tx.send((i, f(&items[i]))).unwrap();
            });
        }
    });
    drop(tx);
    let mut slots: Vec<Option<R>> = (0..n).map(|_| None).collect();
    while let Ok((i, r)) = rx.recv() {
        slots[i] = Some(r);
    }
    slots
        .into_iter()
        .map(|r| r.expect("worker sent every index"))
        .collect()
}
