//! Deterministic fan-out over independent tasks. Results are reassembled in
//! input order, so parallel and serial execution are indistinguishable.

/// Worker cap from `LAGNET_THREADS`; 0 or 1 means serial, unset uses the
/// machine's available parallelism.
pub fn thread_cap() -> usize {
    match std::env::var("LAGNET_THREADS") {
        Ok(v) => match v.trim().parse::<usize>() {
            Ok(0) | Ok(1) => 1,
            Ok(n) => n,
            Err(_) => 1,
        },
        Err(_) => std::thread::available_parallelism().map_or(1, |n| n.get()),
    }
}

/// Applies `f` to every item, possibly across threads, preserving order.
pub fn ordered_map<T, R, F>(items: Vec<T>, f: F) -> Vec<R>
where
    T: Send,
    R: Send,
    F: Fn(T) -> R + Sync,
{
    let workers = thread_cap().min(items.len().max(1));
    if workers <= 1 {
        return items.into_iter().map(f).collect();
    }
    let mut slots: Vec<Option<R>> = Vec::with_capacity(items.len());
    slots.resize_with(items.len(), || None);
    let tasks: Vec<(usize, T)> = items.into_iter().enumerate().collect();
    let queue = std::sync::Mutex::new(tasks);
    let results = std::sync::Mutex::new(&mut slots);
    std::thread::scope(|scope| {
        for _ in 0..workers {
            scope.spawn(|| loop {
                let task = queue.lock().expect("queue lock").pop();
                match task {
                    Some((idx, item)) => {
                        let out = f(item);
                        results.lock().expect("results lock")[idx] = Some(out);
                    }
                    None => break,
                }
            });
        }
    });
    slots
        .into_iter()
        .map(|slot| slot.expect("every task completed"))
        .collect()
}
