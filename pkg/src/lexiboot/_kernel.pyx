# cython: boundscheck=False, wraparound=False, cdivision=True, initializedcheck=False
"""Compiled episode loop.

Mirrors the pure-Python loop in game.py draw for draw: the same Lemire
bounded reduction over the same PCG64 raw stream, the same context/topic/
tie-break/word-draw order, the same transfer barrier rules.  The
equivalence test suite holds the two backends to bit-identical games.
"""

from cpython.pycapsule cimport PyCapsule_GetPointer, PyCapsule_IsValid
from libc.stdint cimport int32_t, int64_t, uint64_t
from libc.stdlib cimport free, malloc

from numpy.random cimport bitgen_t

cdef extern from *:
    ctypedef unsigned long long uint128_t "__uint128_t"


# ------------------------------------------------------------------ draws

cdef inline uint64_t _below(bitgen_t *bg, uint64_t k) noexcept nogil:
    # Lemire bounded draw over raw 64-bit outputs; k <= 1 consumes nothing.
    cdef uint64_t x, low, threshold
    cdef uint128_t m
    if k <= 1:
        return 0
    x = bg.next_raw(bg.state)
    m = (<uint128_t> x) * (<uint128_t> k)
    low = <uint64_t> m
    if low < k:
        threshold = (0 - k) % k  # 2^64 mod k via uint64 wraparound
        while low < threshold:
            x = bg.next_raw(bg.state)
            m = (<uint128_t> x) * (<uint128_t> k)
            low = <uint64_t> m
    return <uint64_t> (m >> 64)


cdef inline int _argmax_row(bitgen_t *bg, int64_t *row, int n) noexcept nogil:
    # Largest entry, ties uniform (draw consumed only when tied).
    cdef int h, best, k, r
    cdef int64_t mx
    mx = row[0]
    best = 0
    k = 1
    for h in range(1, n):
        if row[h] > mx:
            mx = row[h]
            best = h
            k = 1
        elif row[h] == mx:
            k += 1
    if k > 1:
        r = <int> _below(bg, <uint64_t> k)
        k = 0
        for h in range(n):
            if row[h] == mx:
                if k == r:
                    return h
                k += 1
    return best


cdef inline int _guess_object(bitgen_t *bg, int64_t[:, ::1] counts,
                              int32_t *ctx, int c, int word) noexcept nogil:
    # Introspective obverter over the context, ties uniform in slot order.
    cdef int i, k, r, best
    cdef int64_t mx, v
    mx = counts[ctx[0], word]
    best = ctx[0]
    k = 1
    for i in range(1, c):
        v = counts[ctx[i], word]
        if v > mx:
            mx = v
            best = ctx[i]
            k = 1
        elif v == mx:
            k += 1
    if k > 1:
        r = <int> _below(bg, <uint64_t> k)
        k = 0
        for i in range(c):
            if counts[ctx[i], word] == mx:
                if k == r:
                    return ctx[i]
                k += 1
    return best


# --------------------------------------------------------------- transfers

cdef inline void _transfer(int64_t[:, ::1] counts, int32_t[:, ::1] posw,
                           int32_t[:, ::1] poss, int32_t[::1] posc,
                           int *frozen_rows, int obj, int inc, int dec) noexcept nogil:
    # One count unit dec -> inc; no-op on self-transfer or absorbed endpoint.
    cdef int64_t ci, cd
    cdef int slot, last, moved
    if inc == dec:
        return
    ci = counts[obj, inc]
    cd = counts[obj, dec]
    if ci == 0 or cd == 0:
        return
    counts[obj, inc] = ci + 1
    counts[obj, dec] = cd - 1
    if cd == 1:
        slot = poss[obj, dec]
        last = posc[obj] - 1
        moved = posw[obj, last]
        posw[obj, slot] = moved
        poss[obj, moved] = slot
        poss[obj, dec] = -1
        posc[obj] = last
        if last == 1:
            frozen_rows[0] += 1


# ----------------------------------------------------------------- episode

cdef inline void _episode(bitgen_t *bg,
                          int64_t[:, ::1] cs, int32_t[:, ::1] pws,
                          int32_t[:, ::1] pss, int32_t[::1] pcs, int *fs,
                          int64_t[:, ::1] ch, int32_t[:, ::1] pwh,
                          int32_t[:, ::1] psh, int32_t[::1] pch, int *fh,
                          int32_t *ctx, int n_objects, int n_words,
                          int c, bint supervised) noexcept nogil:
    cdef int i, j, v, dup, topic, word, dec, guess, word_s, word_h, row
    # context: slot-wise rejection, uniform over C-subsets
    for i in range(c):
        while True:
            v = <int> _below(bg, <uint64_t> n_objects)
            dup = 0
            for j in range(i):
                if ctx[j] == v:
                    dup = 1
                    break
            if not dup:
                break
        ctx[i] = v
    topic = ctx[<int> _below(bg, <uint64_t> c)]
    word = _argmax_row(bg, &cs[topic, 0], n_words)
    if not supervised:
        for i in range(c):
            v = ctx[i]
            dec = pwh[v, <int> _below(bg, <uint64_t> pch[v])]
            _transfer(ch, pwh, psh, pch, fh, v, word, dec)
    else:
        guess = _guess_object(bg, ch, ctx, c, word)
        word_s = pws[topic, <int> _below(bg, <uint64_t> pcs[topic])]
        if guess == topic:
            _transfer(cs, pws, pss, pcs, fs, topic, word, word_s)
            word_h = pwh[topic, <int> _below(bg, <uint64_t> pch[topic])]
            _transfer(ch, pwh, psh, pch, fh, topic, word, word_h)
        else:
            _transfer(cs, pws, pss, pcs, fs, topic, word_s, word)
            word_h = pwh[guess, <int> _below(bg, <uint64_t> pch[guess])]
            _transfer(ch, pwh, psh, pch, fh, guess, word_h, word)


# ------------------------------------------------------------------ driver

def run_to_freeze(counts_i, posw_i, poss_i, posc_i, int frozen_i,
                  counts_j, posw_j, poss_j, posc_j, int frozen_j,
                  int context_size, bint supervised, long long max_episodes,
                  bit_generator):
    """Run episodes until both matrices freeze or the cap; returns the tuple
    (episodes, frozen_rows_i, frozen_rows_j)."""
    cdef int64_t[:, ::1] ci = counts_i
    cdef int64_t[:, ::1] cj = counts_j
    cdef int32_t[:, ::1] pwi = posw_i
    cdef int32_t[:, ::1] pwj = posw_j
    cdef int32_t[:, ::1] psi = poss_i
    cdef int32_t[:, ::1] psj = poss_j
    cdef int32_t[::1] pci = posc_i
    cdef int32_t[::1] pcj = posc_j
    cdef int n_objects = ci.shape[0]
    cdef int n_words = ci.shape[1]
    cdef int c = context_size
    cdef int fi = frozen_i
    cdef int fj = frozen_j
    cdef long long cap = max_episodes
    cdef long long episodes = 0
    cdef bint sup = supervised
    cdef bitgen_t *bg
    cdef int32_t *ctx

    capsule = bit_generator.capsule
    if not PyCapsule_IsValid(capsule, "BitGenerator"):
        raise ValueError("invalid BitGenerator capsule")
    bg = <bitgen_t *> PyCapsule_GetPointer(capsule, "BitGenerator")
    ctx = <int32_t *> malloc(c * sizeof(int32_t))
    if ctx == NULL:
        raise MemoryError()
    try:
        with bit_generator.lock, nogil:
            while episodes < cap and (fi < n_objects or fj < n_objects):
                if episodes % 2 == 0:
                    _episode(bg, ci, pwi, psi, pci, &fi,
                             cj, pwj, psj, pcj, &fj,
                             ctx, n_objects, n_words, c, sup)
                else:
                    _episode(bg, cj, pwj, psj, pcj, &fj,
                             ci, pwi, psi, pci, &fi,
                             ctx, n_objects, n_words, c, sup)
                episodes += 1
    finally:
        free(ctx)
    return episodes, fi, fj


def probe_below(bit_generator, ks):
    """Debug hook: the kernel's bounded draws for a list of bounds, for
    cross-checking against GameRng.below."""
    cdef bitgen_t *bg
    capsule = bit_generator.capsule
    if not PyCapsule_IsValid(capsule, "BitGenerator"):
        raise ValueError("invalid BitGenerator capsule")
    bg = <bitgen_t *> PyCapsule_GetPointer(capsule, "BitGenerator")
    out = []
    with bit_generator.lock:
        for k in ks:
            out.append(_below(bg, <uint64_t> k))
    return out
