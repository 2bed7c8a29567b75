//! Ordered parallel map over a stream of work items.

use std::collections::BTreeMap;
use std::sync::mpsc;
use std::sync::Mutex;
use std::thread;

/// Applies `work` to every item on `workers` threads and hands the results
/// to `sink` in input order. At most `2 * workers` items are in flight, so
/// memory stays bounded for arbitrarily long inputs. The first error from
/// `sink` stops the run once in-flight items finish.
pub fn for_each_ordered<I, T, U, E, F, S>(items: I, workers: usize, work: F, mut sink: S) -> Result<(), E>
where
    I: IntoIterator<Item = T>,
    T: Send,
    U: Send,
    F: Fn(usize, T) -> U + Sync,
    S: FnMut(U) -> Result<(), E>,
{
    if workers <= 1 {
        for (i, item) in items.into_iter().enumerate() {
            sink(work(i, item))?;
        }
        return Ok(());
    }

    let window = workers * 2;
    let (job_tx, job_rx) = mpsc::sync_channel::<(usize, T)>(window);
    let job_rx = Mutex::new(job_rx);
    let (result_tx, result_rx) = mpsc::channel::<(usize, U)>();

    thread::scope(|scope| {
        for _ in 0..workers {
            let result_tx = result_tx.clone();
            let (job_rx, work) = (&job_rx, &work);
            scope.spawn(move || loop {
                let job = job_rx.lock().unwrap().recv();
                let Ok((i, item)) = job else { break };
                if result_tx.send((i, work(i, item))).is_err() {
                    break;
                }
            });
        }
        drop(result_tx);

        let mut pending = BTreeMap::new();
        let mut next_emit = 0usize;
        let mut sent = 0usize;
        let mut outcome = Ok(());

        let mut drain = |pending: &mut BTreeMap<usize, U>, next_emit: &mut usize, outcome: &mut Result<(), E>| {
            while let Some(result) = pending.remove(next_emit) {
                if outcome.is_ok() {
                    *outcome = sink(result);
                }
                *next_emit += 1;
            }
        };

        for (i, item) in items.into_iter().enumerate() {
            while sent - next_emit >= window && outcome.is_ok() {
                let (j, u) = result_rx.recv().expect("worker alive while jobs pending");
                pending.insert(j, u);
                drain(&mut pending, &mut next_emit, &mut outcome);
            }
            if outcome.is_err() {
                break;
            }
            job_tx.send((i, item)).expect("workers alive");
            sent += 1;
        }
        drop(job_tx);

        while next_emit < sent {
            let Ok((j, u)) = result_rx.recv() else { break };
            pending.insert(j, u);
            drain(&mut pending, &mut next_emit, &mut outcome);
        }
        outcome
    })
}
