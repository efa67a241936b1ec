use super::Limit;

/// Limit of a slowly converging sequence by Wynn's epsilon algorithm.
///
/// Exact for finite sums of geometric sequences, which is what samples of a
/// sum of powers c t^q at t = t₀ r^j form. Every even column offers its last
/// entry as an estimate; the one that moved least against its neighbours in
/// the table wins, and that movement is the error estimate.
pub fn wynn_epsilon(seq: &[f64]) -> Limit {
    let n = seq.len();
    let Some(&last) = seq.last() else {
        return Limit { value: f64::NAN, error: f64::INFINITY };
    };
    if n == 1 {
        return Limit { value: last, error: f64::INFINITY };
    }
    let scale = seq.iter().fold(0.0f64, |m, v| m.max(v.abs()));
    if scale == 0.0 {
        return Limit { value: 0.0, error: 0.0 };
    }

    let mut best = Limit { value: last, error: (seq[n - 1] - seq[n - 2]).abs() };
    let mut prev_estimate = last;
    let mut prev = vec![0.0; n + 1];
    let mut cur = seq.to_vec();
    let mut k = 0;
    while cur.len() >= 2 {
        let mut next = Vec::with_capacity(cur.len() - 1);
        for j in 0..cur.len() - 1 {
            let diff = cur[j + 1] - cur[j];
            if diff == 0.0 {
                // An odd column blowing up means the even one has converged.
                return if k % 2 == 0 { Limit { value: cur[j + 1], error: 0.0 } } else { best };
            }
            next.push(prev[j + 1] + 1.0 / diff);
        }
        k += 1;
        prev = cur;
        cur = next;
        if k % 2 == 0 && cur.len() >= 2 {
            let m = cur.len();
            let value = cur[m - 1];
            let error = (value - cur[m - 2]).abs() + (value - prev_estimate).abs();
            if value.is_finite() && error < best.error {
                best = Limit { value, error };
            }
            prev_estimate = value;
        }
    }
    best
}
