"""Batched membership kernels.

The hot loop of slice enumeration decides membership for millions of short
words.  The automaton is flattened into integer tables and each word is
decided by an iterative depth-first search.  Configurations are encoded
exactly: the stack is an integer in base ``|stack alphabet| + 1`` (digit 0
never occurs, so the empty stack is 0 and the top is ``code % base``).

Set ``DHPDA_DISABLE_JIT=1`` to run the same kernels as plain Python over
numpy arrays.
"""
from __future__ import annotations

import os
from dataclasses import dataclass

import numpy as np

from .model import Automaton, Head, Kind

JIT_DISABLED = os.environ.get("DHPDA_DISABLE_JIT", "").lower() in ("1", "true", "yes")

try:
    import numba
except ImportError:  # pragma: no cover - numba is a declared dependency
    numba = None

JIT_ENABLED = numba is not None and not JIT_DISABLED


def _identity(fn):
    fn.py_func = fn
    return fn


jit = numba.njit(cache=True, nogil=True) if JIT_ENABLED else _identity

# action codes in the tables
A_INTERNAL, A_PUSH, A_POP = 0, 1, 2
INT64_LIMIT = 2 ** 62


@dataclass(frozen=True)
class Tables:
    """Flattened transition relation.

    ``offsets`` is CSR-indexed by ``((state * base + top) * 2 + head) * nsym + symbol``
    where ``top`` is 0 for the empty stack and ``head`` is 0 for left.
    """

    nstates: int
    nsym: int
    base: int
    initial: int
    accepting: np.ndarray
    offsets: np.ndarray
    targets: np.ndarray
    actions: np.ndarray
    pushes: np.ndarray

    def max_exact_length(self) -> int:
        """Longest word whose every reachable stack code fits in int64."""
        if self.base == 1:
            return 1 << 30  # no stack symbols: the code is always 0
        n, v = 0, 1
        while v * self.base < INT64_LIMIT:
            v *= self.base
            n += 1
        return n


def compile_tables(a: Automaton) -> Tables:
    states = {q: i for i, q in enumerate(a.states)}
    syms = {s: i for i, s in enumerate(a.input_alphabet)}
    stack = {g: i + 1 for i, g in enumerate(a.stack_alphabet)}
    base = len(a.stack_alphabet) + 1
    nsym = max(len(syms), 1)
    nkeys = len(states) * base * 2 * nsym
    buckets: list[list[tuple[int, int, int]]] = [[] for _ in range(nkeys)]
    for t in a.transitions:
        top = stack.get(t.top, 0)
        key = ((states[t.source] * base + top) * 2 + (t.head is Head.RIGHT)) * nsym + syms[t.symbol]
        if t.action.kind is Kind.PUSH:
            act, p = A_PUSH, stack[t.action.symbol]
        else:
            act, p = (A_POP if t.action.kind is Kind.POP else A_INTERNAL), 0
        buckets[key].append((states[t.target], act, p))
    offsets = np.zeros(nkeys + 1, dtype=np.int64)
    offsets[1:] = np.cumsum([len(b) for b in buckets])
    flat = [x for b in buckets for x in b]
    arr = np.array(flat, dtype=np.int64).reshape(-1, 3) if flat else np.zeros((0, 3), np.int64)
    accepting = np.array([q in a.accepting for q in a.states], dtype=np.bool_)
    return Tables(len(states), nsym, base, states[a.initial], accepting, offsets,
                  np.ascontiguousarray(arr[:, 0]), np.ascontiguousarray(arr[:, 1]),
                  np.ascontiguousarray(arr[:, 2]))


@jit
def _visit(k1, k2, gens, gen, mask, a, b):
    """Insert (a, b) into the open-addressing set; False if it was present."""
    # no products that can leave int64: b may be close to 2**62
    h = (a * 40503 + (b % 1000003) * 69069 + (b >> 20)) & mask
    while gens[h] == gen:
        if k1[h] == a and k2[h] == b:
            return False
        h = (h + 1) & mask
    gens[h] = gen
    k1[h] = a
    k2[h] = b
    return True


@jit
def _accepts_one(word, n, nsym, base, initial, accepting, offsets, targets, actions, pushes,
                 k1, k2, gens, gen, frames):
    if n == 0:
        return accepting[initial]
    mask = k1.shape[0] - 1
    budget = (k1.shape[0] * 3) // 4
    span = n + 1
    # frame columns: state, left, right, stack code, next candidate,
    # left range start, left range size, right range start, candidate count
    sp = 0
    frames[0, 0] = initial
    frames[0, 1] = 0
    frames[0, 2] = n
    frames[0, 3] = 0
    frames[0, 4] = -1
    _visit(k1, k2, gens, gen, mask, initial * span * span + n, 0)
    used = 1
    while sp >= 0:
        st = frames[sp, 0]
        lf = frames[sp, 1]
        rt = frames[sp, 2]
        code = frames[sp, 3]
        idx = frames[sp, 4]
        if idx == -1:
            kb = (st * base + code % base) * 2
            kl = kb * nsym + word[lf]
            kr = (kb + 1) * nsym + word[rt - 1]
            frames[sp, 5] = offsets[kl]
            frames[sp, 6] = offsets[kl + 1] - offsets[kl]
            frames[sp, 7] = offsets[kr]
            frames[sp, 8] = frames[sp, 6] + offsets[kr + 1] - offsets[kr]
            idx = 0
        if idx >= frames[sp, 8]:
            sp -= 1
            continue
        frames[sp, 4] = idx + 1
        if idx < frames[sp, 6]:
            pos = frames[sp, 5] + idx
            nl = lf + 1
            nr = rt
        else:
            pos = frames[sp, 7] + idx - frames[sp, 6]
            nl = lf
            nr = rt - 1
        act = actions[pos]
        if act == 1:
            ncode = code * base + pushes[pos]
        elif act == 2:
            ncode = code // base
        else:
            ncode = code
        nst = targets[pos]
        if nl == nr:
            if accepting[nst]:
                return True
            continue
        if used < budget:
            # past the budget the search runs unmemoized; depth still bounds it
            if not _visit(k1, k2, gens, gen, mask, (nst * span + nl) * span + nr, ncode):
                continue
            used += 1
        sp += 1
        frames[sp, 0] = nst
        frames[sp, 1] = nl
        frames[sp, 2] = nr
        frames[sp, 3] = ncode
        frames[sp, 4] = -1
    return False


@jit
def accepts_range(length, start, stop, nsym, base, initial, accepting, offsets, targets,
                  actions, pushes, table_bits):
    """Decide membership for words number ``start .. stop-1`` of the given length.

    Word number ``i`` spells ``i`` in base ``nsym``, most significant digit
    first, so the order is lexicographic in the alphabet order.
    """
    count = stop - start
    out = np.zeros(count, dtype=np.bool_)
    size = 1 << table_bits
    k1 = np.zeros(size, dtype=np.int64)
    k2 = np.zeros(size, dtype=np.int64)
    gens = np.zeros(size, dtype=np.int64)
    frames = np.zeros((length + 2, 9), dtype=np.int64)
    word = np.zeros(max(length, 1), dtype=np.int64)
    for i in range(count):
        x = start + i
        for j in range(length - 1, -1, -1):
            word[j] = x % nsym
            x //= nsym
        out[i] = _accepts_one(word, length, nsym, base, initial, accepting, offsets, targets,
                              actions, pushes, k1, k2, gens, i + 1, frames)
    return out


@jit
def accepts_words(words, lengths, nsym, base, initial, accepting, offsets, targets, actions,
                  pushes, table_bits):
    """Decide membership for a padded batch of encoded words."""
    count = words.shape[0]
    out = np.zeros(count, dtype=np.bool_)
    size = 1 << table_bits
    k1 = np.zeros(size, dtype=np.int64)
    k2 = np.zeros(size, dtype=np.int64)
    gens = np.zeros(size, dtype=np.int64)
    frames = np.zeros((words.shape[1] + 2, 9), dtype=np.int64)
    for i in range(count):
        out[i] = _accepts_one(words[i], lengths[i], nsym, base, initial, accepting, offsets,
                              targets, actions, pushes, k1, k2, gens, i + 1, frames)
    return out


def table_args(t: Tables) -> tuple:
    return (t.nsym, t.base, t.initial, t.accepting, t.offsets, t.targets, t.actions, t.pushes)
