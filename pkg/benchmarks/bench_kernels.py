"""Compare the compiled and pure-Python kernels on the same inputs.

Usage: python benchmarks/bench_kernels.py [--repeat N] [--scale S]

Each row reports the best of N runs for both backends and the speedup.
Outputs of the two backends are checked for equality before timing.
"""

import argparse
import random
import re
import sys
import timeit
from pathlib import Path

from tokfair._kernels import _pykernels as py
from tokfair.tokenizers import DEFAULT_PRETOKENIZE

try:
    from tokfair._kernels import _ckernels as ck
except ImportError:
    sys.exit("compiled kernels are not built; run `pip install --no-build-isolation -e .` first")

sys.path.insert(0, str(Path(__file__).resolve().parents[1] / "tests"))
from toymodels import random_bpe_model, random_text  # noqa: E402


def _setup(scale):
    rng = random.Random(7)
    model = random_bpe_model(0, n_merges=400)
    texts = [random_text(rng, 512) for _ in range(int(2000 * scale))]
    pattern = re.compile(DEFAULT_PRETOKENIZE)
    chunks = [pattern.findall(t) for t in texts]
    byte_ids = [model.vocab[ch] for ch in model.byte_remap.forward]
    long_ids = [byte_ids[b] for b in "".join(texts[:50]).encode("utf-8")]
    data = "\n".join(texts).encode("utf-8")
    return model, chunks, byte_ids, long_ids, data


def _encode_all(mod, pairs, byte_ids, chunks, cached):
    table = mod.BPETable(pairs, byte_ids)
    cache = {}
    limit = 200_000 if cached else 0
    return [table.encode_chunks(c, cache, limit) for c in chunks]


def _count(mod, data, order):
    pc, tot = {}, {}
    mod.ngram_count(data, order, pc, tot)
    return pc, tot


def main(argv=None):
    ap = argparse.ArgumentParser(description=__doc__.splitlines()[0])
    ap.add_argument("--repeat", type=int, default=3)
    ap.add_argument("--scale", type=float, default=1.0, help="multiplies the input size")
    args = ap.parse_args(argv)

    model, chunks, byte_ids, long_ids, data = _setup(args.scale)
    pairs = model.pair_table
    pc, tot = _count(py, data, 4)

    cases = {
        "bpe encode (no cache)": lambda m: _encode_all(m, pairs, byte_ids, chunks, False),
        "bpe encode (cached)": lambda m: _encode_all(m, pairs, byte_ids, chunks, True),
        f"merge_ids ({len(long_ids)} ids)": lambda m: m.merge_ids(long_ids, pairs),
        f"ngram_count k=4 ({len(data)} B)": lambda m: _count(m, data, 4),
        f"ngram_nll k=4 ({len(data)} B)": lambda m: m.ngram_nll(data, 4, pc, tot, 0.01),
    }

    print(f"{'kernel':<34}{'python s':>10}{'cython s':>10}{'speedup':>9}")
    for name, fn in cases.items():
        a, b = fn(py), fn(ck)
        if isinstance(a, float):
            same = abs(a - b) <= 1e-9 * max(1.0, abs(a))
        else:
            same = a == b
        if not same:
            sys.exit(f"{name}: backends disagree")
        t_py = min(timeit.repeat(lambda: fn(py), number=1, repeat=args.repeat))
        t_ck = min(timeit.repeat(lambda: fn(ck), number=1, repeat=args.repeat))
        print(f"{name:<34}{t_py:>10.3f}{t_ck:>10.3f}{t_py / t_ck:>8.1f}x")


if __name__ == "__main__":
    main()
