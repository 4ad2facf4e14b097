"""Statistics of binary index sequences and reference circle-map codings.

Sequences are plain strings over ``"01"``.  Factor counting packs each
length-``n`` window into an integer (rolling binary code) and counts distinct
codes with ``numpy.unique``.
"""

from __future__ import annotations

import enum
import math
from collections import Counter
from dataclasses import dataclass, field

import numpy as np

MAX_PACKED = 62


class Verdict(str, enum.Enum):
    STURMIAN_CANDIDATE = "SturmianCandidate"
    GENERALIZED_STURMIAN = "GeneralizedSturmian"
    NON_STURMIAN = "NonSturmian"


def check_sequence(s: str) -> str:
    if not isinstance(s, str) or (s and set(s) - {"0", "1"}):
        raise ValueError("sequence must be a string over the alphabet '01'")
    return s


def _bits(s: str) -> np.ndarray:
    return np.frombuffer(s.encode("ascii"), dtype=np.uint8) - ord("0")


def _window_codes(bits: np.ndarray, n: int) -> np.ndarray:
    codes = np.zeros(len(bits) - n + 1, dtype=np.int64)
    for k in range(n):
        codes = (codes << 1) | bits[k : len(bits) - n + 1 + k]
    return codes


def complexity(s: str, n_max: int) -> list[int]:
    """``[p(1), ..., p(n_max)]`` where ``p(n)`` counts distinct factors of length ``n``."""
    check_sequence(s)
    if len(s) < n_max:
        raise ValueError("sequence shorter than n_max")
    bits = _bits(s).astype(np.int64)
    out = []
    for n in range(1, n_max + 1):
        if n <= MAX_PACKED:
            out.append(int(len(np.unique(_window_codes(bits, n)))))
        else:
            out.append(len({s[i : i + n] for i in range(len(s) - n + 1)}))
    return out


def balance_defect(s: str, n_max: int) -> list[int]:
    """``b(n) = max - min`` number of zeros over factors of length ``n``."""
    zeros = np.concatenate([[0], np.cumsum(1 - _bits(s).astype(np.int64))])
    out = []
    for n in range(1, n_max + 1):
        c = zeros[n:] - zeros[:-n]
        out.append(int(c.max() - c.min()))
    return out


def word_frequencies(s: str, max_len: int) -> dict[str, float]:
    """Sliding-window frequencies of every factor of length ``1..max_len``."""
    bits = _bits(s).astype(np.int64)
    out: dict[str, float] = {}
    for n in range(1, max_len + 1):
        total = len(s) - n + 1
        if total <= 0:
            break
        codes, counts = np.unique(_window_codes(bits, n), return_counts=True)
        for c, k in zip(codes.tolist(), counts.tolist()):
            out[format(c, f"0{n}b")] = k / total
    return out


def run_lengths(s: str) -> dict[str, dict[int, int]]:
    """Histogram of maximal blocks ``0...0`` and ``1...1`` (partial end blocks included)."""
    hist: dict[str, Counter] = {"0": Counter(), "1": Counter()}
    if not s:
        return {"0": {}, "1": {}}
    cur, n = s[0], 0
    for ch in s:
        if ch == cur:
            n += 1
        else:
            hist[cur][n] += 1
            cur, n = ch, 1
    hist[cur][n] += 1
    return {k: dict(sorted(v.items())) for k, v in hist.items()}


@dataclass(frozen=True)
class SequenceStats:
    length: int
    freq0: float
    freq1: float
    word_freqs: dict[str, float]
    complexity: list[int]
    balance_defect: list[int]
    verdict: Verdict
    missing_digram: str | None
    n_max: int = 20
    window: int = 4
    notes: tuple[str, ...] = field(default=())

    def freq(self, word: str) -> float:
        return self.word_freqs.get(word, 0.0)

    def report(self) -> dict:
        return {
            "length": self.length,
            "freq0": self.freq0,
            "freq1": self.freq1,
            "word_freqs": dict(sorted(self.word_freqs.items(), key=lambda kv: (len(kv[0]), kv[0]))),
            "complexity": self.complexity,
            "balance_defect": self.balance_defect,
            "verdict": self.verdict.value,
            "missing_digram": self.missing_digram,
            "n_max": self.n_max,
            "notes": list(self.notes),
        }


def analyze(s: str, n_max: int = 20, W: int = 4) -> SequenceStats:
    """Frequencies, complexity, balance and a Sturmian verdict for ``s``.

    The verdict is NonSturmian when both ``00`` and ``11`` occur, when
    ``p(n) > n + 1`` for some tested ``n``, or when the sequence is unbalanced.
    Otherwise it is SturmianCandidate if ``p(n) == n + 1`` throughout and
    GeneralizedSturmian (eventually periodic) if the complexity stalls below
    that.  A candidate verdict is a non-refutation on a finite window only.
    """
    check_sequence(s)
    if len(s) < max(n_max, 2):
        raise ValueError("sequence shorter than n_max")
    L = len(s)
    f0 = s.count("0") / L
    words = word_frequencies(s, W)
    p = complexity(s, n_max)
    b = balance_defect(s, n_max)

    has00, has11 = "00" in words, "11" in words
    missing = "00" if not has00 else "11" if not has11 else None
    notes = [f"window {L}"]
    if has00 and has11:
        verdict = Verdict.NON_STURMIAN
        notes.append("both 00 and 11 occur")
    elif any(pn > n + 1 for n, pn in enumerate(p, start=1)):
        verdict = Verdict.NON_STURMIAN
        notes.append("complexity exceeds n+1")
    elif any(bn > 1 for bn in b):
        verdict = Verdict.NON_STURMIAN
        notes.append("unbalanced")
    elif all(pn == n + 1 for n, pn in enumerate(p, start=1)):
        verdict = Verdict.STURMIAN_CANDIDATE
    else:
        verdict = Verdict.GENERALIZED_STURMIAN
        stall = next(n for n, pn in enumerate(p, start=1) if pn < n + 1)
        notes.append(f"complexity stalls at n={stall} (p={p[-1]}): eventually periodic")
    return SequenceStats(
        length=L,
        freq0=f0,
        freq1=1.0 - f0,
        word_freqs=words,
        complexity=p,
        balance_defect=b,
        verdict=verdict,
        missing_digram=missing,
        n_max=n_max,
        window=W,
        notes=tuple(notes),
    )


def _check_unit(name: str, v: float, open_low: bool = True) -> None:
    if not (0.0 < v < 1.0 if open_low else 0.0 <= v < 1.0):
        raise ValueError(f"{name} must lie in {'(0, 1)' if open_low else '[0, 1)'}")


def gen_sturmian(theta: float, eta: float, n: int) -> str:
    """``sigma_k = floor((k+1) theta + eta) - floor(k theta + eta)``, ``k = 0..n-1``."""
    _check_unit("theta", theta)
    k = np.arange(n + 1, dtype=float)
    fl = np.floor(k * theta + eta)
    return "".join("1" if v else "0" for v in np.diff(fl).astype(int).tolist())


def _orbit_coding(phi0: float, n: int, shift_in, shift_out, cut: float, code_cut: float) -> str:
    phi = float(phi0) % 1.0
    out = []
    for _ in range(n):
        out.append("1" if phi < code_cut else "0")
        phi = (phi + (shift_in if phi < cut else shift_out)) % 1.0
    return "".join(out)


def gen_rotation_coding(theta: float, phi0: float, n: int) -> str:
    """Coding of ``phi -> phi + theta mod 1`` by ``1`` on ``[0, theta)``."""
    _check_unit("theta", theta)
    return _orbit_coding(phi0, n, theta, theta, theta, theta)


def gen_double_rotation(theta1: float, theta2: float, theta: float, phi0: float, n: int) -> str:
    """Coding of the double rotation: ``+theta1`` on ``[0, theta)``, ``+theta2`` on
    ``[theta, 1)``; the symbol is ``1`` on ``[0, theta)``."""
    for name, v in (("theta1", theta1), ("theta2", theta2), ("theta", theta)):
        _check_unit(name, v, open_low=False)
    return _orbit_coding(phi0, n, theta1, theta2, theta, theta)


def gen_mismatched_coding(theta: float, theta0: float, phi0: float, n: int) -> str:
    """Rotation by ``theta`` coded by ``1`` on ``[0, theta0)`` with ``theta0 != theta`` allowed."""
    _check_unit("theta", theta)
    _check_unit("theta0", theta0)
    return _orbit_coding(phi0, n, theta, theta, 1.0, theta0)


@dataclass(frozen=True)
class Comparison:
    left: SequenceStats
    right: SequenceStats
    word_gaps: dict[str, float]
    run_lengths: tuple[dict, dict]
    max_gap: float

    def report(self) -> dict:
        return {
            "max_gap": self.max_gap,
            "word_gaps": self.word_gaps,
            "left": self.left.report(),
            "right": self.right.report(),
            "run_lengths": {"left": self.run_lengths[0], "right": self.run_lengths[1]},
        }


def compare(s: str, t: str, W: int = 4, n_max: int = 20) -> Comparison:
    """Side-by-side word frequencies, block lengths and complexity of two sequences."""
    a, b = analyze(s, n_max, W), analyze(t, n_max, W)
    keys = sorted(set(a.word_freqs) | set(b.word_freqs), key=lambda w: (len(w), w))
    gaps = {w: abs(a.freq(w) - b.freq(w)) for w in keys}
    return Comparison(a, b, gaps, (run_lengths(s), run_lengths(t)), max(gaps.values(), default=0.0))


def fit_double_rotation(
    s: str, grid: int = 12, n: int | None = None, words: tuple[str, ...] = ("0", "00", "01", "10", "11")
) -> tuple[tuple[float, float, float], float]:
    """Grid search for double-rotation parameters whose coding best matches the
    digram frequencies of ``s``; returns ``((theta1, theta2, theta), distance)``."""
    n = n or min(len(s), 2000)
    target = word_frequencies(s, 2)
    best, best_d = (0.0, 0.0, 0.5), math.inf
    ticks = (np.arange(grid) + 0.5) / grid
    for t1 in ticks:
        for t2 in ticks:
            for th in ticks:
                f = word_frequencies(gen_double_rotation(t1, t2, th, 0.0, n), 2)
                d = max(abs(target.get(w, 0.0) - f.get(w, 0.0)) for w in words)
                if d < best_d:
                    best, best_d = (float(t1), float(t2), float(th)), d
    return best, best_d
