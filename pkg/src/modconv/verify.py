"""Self-verification suites behind the `verify` CLI command.

Each suite re-derives expected values from an independent oracle (quadratic
sums, full transforms plus reordering, classical multipliers) and checks the
fast paths against them. Reports are deterministic for a fixed seed: no
timings, stable ordering, counts only.
"""

from __future__ import annotations

import random
from dataclasses import replace

from .convolve import (
    ConvRequest,
    circ_conv_def,
    circ_conv_split,
    conv_tft,
    lin_conv_def,
    lin_conv_fft_pad,
    nega_conv,
    poly_mul,
    recombine_residues,
    split_residues,
)
from .field import Felt, FourierPrime, root_of_unity
from .planner import PlanEntry, PlanKey, PlanSession, PlanStore, plan_mirror, store_load, store_save
from .poly import DensePoly, eval_poly, mul_karatsuba, mul_schoolbook, schoolbook_raw
from .transform import (
    OpCounters,
    TwiddleTable,
    bit_reverse_permute,
    get_table,
    itft,
    moddft,
    moddft_naive,
    moddft_plan,
    tft,
)

SMALL_PRIME = 257
LARGE_PRIME = 998244353


def _pow2_range(limit: int, lo: int = 2):
    n = lo
    while n <= limit:
        yield n
        n <<= 1


def _suite_field_axioms(rng, cap, fields):
    for fp in fields:
        p = fp.p
        for _ in range(5000):
            a, b, c = (Felt(rng.randrange(p), fp) for _ in range(3))
            if (a + b) + c != a + (b + c):
                return False, f"associativity broke at p={p}"
            if a * (b + c) != a * b + a * c:
                return False, f"distributivity broke at p={p}"
            if a * b != b * a or a + b != b + a:
                return False, f"commutativity broke at p={p}"
            if a + (-a) != fp.zero():
                return False, f"additive inverse broke at p={p}"
    return True, f"{2 * 5000} random triples over {len(fields)} primes"


def _suite_roots(rng, cap, fields):
    checked = 0
    for fp in fields:
        p = fp.p
        for n in _pow2_range(min(cap, 1 << fp.two_adicity)):
            w = root_of_unity(fp, n).value
            if pow(w, n, p) != 1 or pow(w, n // 2, p) != p - 1:
                return False, f"root order wrong for p={p}, n={n}"
            if sum(pow(w, j, p) for j in range(n)) % p != 0:
                return False, f"geometric sum nonzero for p={p}, n={n}"
            checked += 1
    return True, f"{checked} (p, n) pairs"


def _suite_inverses(rng, cap, fields):
    for fp in fields:
        p = fp.p
        for _ in range(2000):
            a = Felt(rng.randrange(1, p), fp)
            if a.inv().inv() != a or a * a.inv() != fp.one():
                return False, f"inverse broke at p={p}"
    return True, "2000 nonzero elements per prime"


def _suite_classical_mul(rng, cap, fields):
    fp = fields[-1]
    top = min(cap, 64)
    for _ in range(150):
        la, lb = rng.randint(1, top), rng.randint(1, top)
        a = DensePoly(fp, tuple(rng.randrange(fp.p) for _ in range(la)))
        b = DensePoly(fp, tuple(rng.randrange(fp.p) for _ in range(lb)))
        want = mul_schoolbook(a, b)
        for threshold in (1, 4, 16, 128):
            if mul_karatsuba(a, b, threshold) != want:
                return False, f"karatsuba(threshold={threshold}) != schoolbook at {la}x{lb}"
    return True, f"150 random pairs, lengths <= {top}"


def _suite_eval_homomorphism(rng, cap, fields):
    fp = fields[0]
    for _ in range(200):
        a = DensePoly(fp, tuple(rng.randrange(fp.p) for _ in range(rng.randint(1, 24))))
        b = DensePoly(fp, tuple(rng.randrange(fp.p) for _ in range(rng.randint(1, 24))))
        x = Felt(rng.randrange(fp.p), fp)
        if eval_poly(mul_schoolbook(a, b), x) != eval_poly(a, x) * eval_poly(b, x):
            return False, "eval(a*b) != eval(a)*eval(b)"
    return True, "200 random products and points"


def _suite_transform_roundtrip(rng, cap, fields, fault_table=None):
    fp = fields[-1]
    checked = 0
    for n in _pow2_range(min(cap, 1 << fp.two_adicity)):
        table = get_table(fp, n)
        if fault_table is not None and n == fault_table.size:
            table = fault_table
        x = [rng.randrange(fp.p) for _ in range(n)]
        counters = OpCounters()
        back = moddft(moddft(x, table, "fwd", counters), table, "inv", counters)
        if back != x:
            return False, f"inverse(forward(x)) != x at n={n}"
        if counters.butterflies != n * (n.bit_length() - 1):
            return False, f"butterfly count off at n={n}"
        checked += 1
    return True, f"{checked} sizes up to {min(cap, 1 << fp.two_adicity)}"


def _suite_transform_naive(rng, cap, fields):
    for fp in fields:
        for n in _pow2_range(min(cap, 128, 1 << fp.two_adicity)):
            table = get_table(fp, n)
            x = [rng.randrange(fp.p) for _ in range(n)]
            if moddft(x, table) != moddft_naive(x, table):
                return False, f"fast != naive at p={fp.p}, n={n}"
    return True, "all sizes <= 128 against the quadratic oracle"


def _all_plans(n, menu=(2, 4, 8)):
    if n in menu:
        yield (), n
    for radix in menu:
        if radix < n and n % radix == 0 and n // radix >= 2:
            for splits, base in _all_plans(n // radix, menu):
                yield (radix,) + splits, base


def _suite_plan_paths(rng, cap, fields):
    fp = fields[-1]
    total = 0
    for n in _pow2_range(min(cap, 32, 1 << fp.two_adicity), lo=4):
        table = get_table(fp, n)
        x = [rng.randrange(fp.p) for _ in range(n)]
        want = moddft(x, table)
        for splits, base in _all_plans(n):
            if moddft_plan(x, table, splits, base) != want:
                return False, f"plan {splits}x{base} diverged at n={n}"
            total += 1
    return True, f"{total} decomposition paths"


def _suite_truncated(rng, cap, fields):
    fp = fields[-1]
    top = min(cap, 256, 1 << fp.two_adicity)
    checked = 0
    for size in _pow2_range(top):
        table = get_table(fp, size)
        lg = size.bit_length() - 1
        ns = range(1, size + 1) if size <= 32 else sorted(
            {1, 2, size // 2, size // 2 + 1, size - 1, size}
            | {rng.randint(1, size) for _ in range(10)}
        )
        for n in ns:
            z = rng.randint(1, n)
            x = [rng.randrange(fp.p) for _ in range(z)]
            spectral = tft(table, x, n, OpCounters())
            full = bit_reverse_permute(moddft(x + [0] * (size - z), table))
            if spectral != full[:n]:
                return False, f"tft != reordered full transform at L={size}, n={n}, z={z}"
            counters = OpCounters()
            xs = x + [0] * (n - z)
            back = itft(table, tft(table, xs, n, counters), counters)
            if back != [v * size % fp.p for v in xs]:
                return False, f"itft(tft(x)) != L*x at L={size}, n={n}"
            if counters.butterflies > 2 * (n * lg / 2 + size):
                return False, f"butterfly bound broke at L={size}, n={n}"
            checked += 1
    return True, f"{checked} (L, n, z) cases up to L={top}"


def _suite_convolution_theorem(rng, cap, fields):
    fp = fields[-1]
    for n in _pow2_range(min(cap, 128, 1 << fp.two_adicity)):
        table = get_table(fp, n)
        for _ in range(20):
            u = [rng.randrange(fp.p) for _ in range(n)]
            v = [rng.randrange(fp.p) for _ in range(n)]
            lhs = moddft(circ_conv_def(u, v, fp), table)
            rhs = [a * b % fp.p for a, b in zip(moddft(u, table), moddft(v, table))]
            if lhs != rhs:
                return False, f"transform of convolution != pointwise product at n={n}"
    return True, "20 random pairs per size <= 128"


def _suite_engines(rng, cap, fields):
    top = min(cap, 128)
    for fp in fields:
        req = ConvRequest(fp, engine="definition")
        for _ in range(60):
            z1, z2 = rng.randint(1, top), rng.randint(1, top)
            a = DensePoly(fp, tuple(rng.randrange(fp.p) for _ in range(z1)))
            b = DensePoly(fp, tuple(rng.randrange(fp.p) for _ in range(z2)))
            # poly_mul normalizes; schoolbook keeps padded length on padded input.
            want = mul_schoolbook(a, b).normalize()
            for engine in ("definition", "fft_pad", "tft", "split"):
                got = poly_mul(a, b, replace(req, engine=engine))
                if got != want:
                    return False, f"engine {engine} != schoolbook at p={fp.p}, {z1}x{z2}"
    return True, f"60 random pairs per prime, engines vs schoolbook, lengths <= {top}"


def _suite_split_residues(rng, cap, fields):
    fp = fields[-1]
    req = ConvRequest(fp, engine="definition")
    for size in _pow2_range(min(cap, 128, 1 << (fp.two_adicity - 1))):
        u = [rng.randrange(fp.p) for _ in range(size)]
        v = [rng.randrange(fp.p) for _ in range(size)]
        a, b = split_residues(u, fp.p)
        if recombine_residues(a, b, fp.p) != u:
            return False, f"recombine(split(u)) != u at 2n={size}"
        if circ_conv_split(u, v, req) != circ_conv_def(u, v, fp):
            return False, f"split engine != definition at 2n={size}"
    return True, "residue maps and split engine up to 2n=128"


def _suite_negacyclic(rng, cap, fields):
    fp = fields[-1]
    req = ConvRequest(fp, engine="definition")
    for size in _pow2_range(min(cap, 64, 1 << (fp.two_adicity - 1))):
        u = [rng.randrange(fp.p) for _ in range(size)]
        v = [rng.randrange(fp.p) for _ in range(size)]
        full = schoolbook_raw(u, v, fp.p) + [0]
        want = [(full[i] - full[i + size]) % fp.p for i in range(size)]
        if nega_conv(u, v, req) != want:
            return False, f"negacyclic != reduced schoolbook at n={size}"
    return True, "negacyclic vs schoolbook reduced mod x^n + 1, n <= 64"


def _suite_linear_defs(rng, cap, fields):
    fp = fields[0]
    req = ConvRequest(fp, engine="definition")
    for _ in range(80):
        m, n = rng.randint(1, 32), rng.randint(1, 32)
        u = [rng.randrange(fp.p) for _ in range(m)]
        v = [rng.randrange(fp.p) for _ in range(n)]
        want = schoolbook_raw(u, v, fp.p)
        if lin_conv_def(u, v, fp) != want:
            return False, "lin_conv_def != schoolbook"
        if lin_conv_fft_pad(u, v, req) != want:
            return False, "fft_pad != schoolbook"
        if conv_tft(u, v, req) != want:
            return False, "tft engine != schoolbook"
    return True, "80 random pairs, definitions and engines agree"


def _fuzz_entry(rng, sig) -> PlanEntry:
    kind = rng.choice(("dft", "tft", "itft"))
    lg = rng.randint(1, 10)
    size = 1 << lg
    splits = []
    rest = lg
    while rest > 3 or (rest > 1 and rng.random() < 0.5):
        step = rng.choice([s for s in (1, 2, 3) if s <= rest - 1])
        splits.append(1 << step)
        rest -= step
    key = PlanKey(kind, LARGE_PRIME, size, rng.randint(0, size), rng.randint(0, size), rng.randint(1, 8))
    return PlanEntry(key, tuple(splits), 1 << rest, rng.randrange(10**9), sig)


def _suite_plan_store(rng, cap, fields, tmp_dir=None):
    import os
    import tempfile

    for trial in range(25):
        store = PlanStore()
        sig = f"host-{rng.randint(0, 99)};cores={rng.randint(1, 64)}"
        for _ in range(rng.randint(0, 30)):
            try:
                store.add(_fuzz_entry(rng, sig))
            except ValueError:
                continue  # duplicate key from the fuzzer; uniqueness is the contract
        fd, path = tempfile.mkstemp(prefix="modconv-plan-")
        os.close(fd)
        try:
            store_save(store, path)
            if store_load(path) != store:
                return False, f"store round-trip diverged on trial {trial}"
        finally:
            os.unlink(path)
    return True, "25 fuzzed stores round-tripped"


def _suite_plan_policy(rng, cap, fields):
    ticks = iter(range(0, 10**9, 7))
    session = PlanSession(
        PlanStore(), signature="sig-a", timer=lambda: next(ticks), reps=3
    )
    key = PlanKey("tft", LARGE_PRIME, 16, 16, 16, 1)
    first = session.lookup(key)
    if session.search_count != 1:
        return False, "fresh lookup did not search"
    session.lookup(key)
    if session.search_count != 1:
        return False, "exact hit performed a search"
    other = PlanSession(session.store, signature="sig-b", timer=lambda: next(ticks))
    cloned = other.lookup(key)
    if other.search_count != 0 or cloned.exec_signature != "sig-b":
        return False, "signature miss did not clone"
    if session.store.get(key, "sig-a") != first:
        return False, "clone disturbed the original entry"
    mirrored = plan_mirror(first)
    if plan_mirror(mirrored) != first:
        return False, "mirror is not involutive"
    return True, "three-tier lookup and mirror involution"


_SUITES = (
    ("field-axioms", _suite_field_axioms),
    ("roots-of-unity", _suite_roots),
    ("inverses", _suite_inverses),
    ("classical-multipliers", _suite_classical_mul),
    ("eval-homomorphism", _suite_eval_homomorphism),
    ("transform-roundtrip", _suite_transform_roundtrip),
    ("transform-vs-naive", _suite_transform_naive),
    ("plan-paths", _suite_plan_paths),
    ("truncated-transforms", _suite_truncated),
    ("convolution-theorem", _suite_convolution_theorem),
    ("linear-convolutions", _suite_linear_defs),
    ("engine-agreement", _suite_engines),
    ("split-residues", _suite_split_residues),
    ("negacyclic", _suite_negacyclic),
    ("plan-store-roundtrip", _suite_plan_store),
    ("plan-lookup-policy", _suite_plan_policy),
)


def run_verification(seed: int = 0, cap: int = 256, inject_fault: bool = False):
    """Run every suite; returns [(name, ok, detail)] in a fixed order.

    `inject_fault` corrupts one twiddle in a private table fed to the
    transform-roundtrip suite, proving the harness actually detects faults.
    """
    fields = [FourierPrime.from_modulus(SMALL_PRIME), FourierPrime.from_modulus(LARGE_PRIME)]
    fault_table = None
    if inject_fault:
        size = min(64, cap)
        size = max(4, 1 << (size.bit_length() - 1))
        fault_table = TwiddleTable(fields[-1], size)
        stage = fault_table.fwd_stages[-1]
        stage[1] = (stage[1] + 1) % fields[-1].p
    results = []
    for name, suite in _SUITES:
        rng = random.Random(f"{seed}:{name}")
        if suite is _suite_transform_roundtrip:
            ok, detail = suite(rng, cap, fields, fault_table)
        else:
            ok, detail = suite(rng, cap, fields)
        results.append((name, ok, detail))
    return results
