"""NumPy implementation of the interference-accumulation kernel."""

import numpy as np


def interference_matrix(
    starts,
    durations,
    freqs,
    bandwidths,
    rel_power,
    target_index,
    dist_pow,
    fading,
    chunk: int = 65536,
):
    """Aggregate interference seen by each target event at each receiver.

    Events must be sorted ascending by ``starts``. Two events interfere when
    their time intervals strictly overlap and the center-frequency gap is
    strictly below the half-bandwidth sum. ``dist_pow[e, k]`` is the pathloss
    factor d^(-alpha) from the source of event e to receiver k and
    ``fading[e, k]`` the per-(event, receiver) fading gain; an interferer j
    contributes rel_power[j] * fading[j, k] * dist_pow[j, k].

    Returns an array of shape (len(target_index), n_receivers).
    """
    starts = np.asarray(starts, dtype=float)
    durations = np.asarray(durations, dtype=float)
    freqs = np.asarray(freqs, dtype=float)
    bandwidths = np.asarray(bandwidths, dtype=float)
    rel_power = np.asarray(rel_power, dtype=float)
    target_index = np.asarray(target_index, dtype=np.intp)

    n_rx = dist_pow.shape[1]
    out = np.zeros((target_index.shape[0], n_rx))
    if starts.shape[0] == 0 or target_index.shape[0] == 0:
        return out

    ends = starts + durations
    max_dur = float(durations.max())

    for c0 in range(0, target_index.shape[0], chunk):
        t_idx = target_index[c0 : c0 + chunk]
        t_start = starts[t_idx]
        t_end = ends[t_idx]
        lo = np.searchsorted(starts, t_start - max_dur, side="left")
        hi = np.searchsorted(starts, t_end, side="left")
        counts = hi - lo
        total = int(counts.sum())
        if total == 0:
            continue
        rows = np.repeat(np.arange(t_idx.shape[0]), counts)
        offsets = np.repeat(np.cumsum(counts) - counts, counts)
        j = np.repeat(lo, counts) + (np.arange(total) - offsets)

        ok = (j != t_idx[rows]) & (ends[j] > t_start[rows]) & (starts[j] < t_end[rows])
        df = np.abs(freqs[j] - freqs[t_idx[rows]])
        ok &= df < 0.5 * (bandwidths[j] + bandwidths[t_idx[rows]])
        if not ok.any():
            continue
        rows = rows[ok]
        j = j[ok]
        contrib = rel_power[j, None] * fading[j, :] * dist_pow[j, :]
        np.add.at(out[c0 : c0 + chunk], rows, contrib)
    return out
