//! Scoped fan-out over contiguous chunks. Results come back in input order,
//! so output never depends on the worker count.

use crate::error::Result;

pub(crate) fn map_chunked<T, R, F>(items: &[T], workers: usize, f: F) -> Result<Vec<R>>
where
    T: Sync,
    R: Send,
    F: Fn(&T) -> Result<R> + Sync,
{
    let workers = workers.max(1).min(items.len().max(1));
    if workers == 1 {
        return items.iter().map(&f).collect();
    }
    let chunk = items.len().div_ceil(workers);
    let f = &f;
    let parts: Vec<Result<Vec<R>>> = std::thread::scope(|scope| {
        let handles: Vec<_> = items
            .chunks(chunk)
            .map(|part| scope.spawn(move || part.iter().map(f).collect::<Result<Vec<R>>>()))
            .collect();
        handles
            .into_iter()
            .map(|h| h.join().expect("worker thread panicked"))
            .collect()
    });
    let mut out = Vec::with_capacity(items.len());
    for part in parts {
        out.extend(part?);
    }
    Ok(out)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::error::Error;

    #[test]
    fn order_is_preserved() {
        let items: Vec<u32> = (0..101).collect();
        for workers in [1, 2, 3, 8, 200] {
            let out = map_chunked(&items, workers, |x| Ok(x * 2)).unwrap();
            assert_eq!(out, items.iter().map(|x| x * 2).collect::<Vec<_>>());
        }
    }

    #[test]
    fn first_error_in_input_order_wins() {
        let items: Vec<u32> = (0..40).collect();
        let err = map_chunked(&items, 4, |&x| {
            if x == 7 || x == 33 {
                Err(Error::UnknownUser(x.to_string()))
            } else {
                Ok(x)
            }
        })
        .unwrap_err();
        assert!(matches!(err, Error::UnknownUser(ref u) if u == "7"));
    }
}
